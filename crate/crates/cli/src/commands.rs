use anyhow::Result;
use serde::Serialize;
use thermal_qkd::info::{bootstrap_trials, offset_correlation, BinaryJoint, BootstrapErrors, JointHistogram};
use thermal_qkd::montecarlo::{derive_bits, run_protocol};
use thermal_qkd::uncertainty::{uncertainty_point, NoiseModel};
use thermal_qkd::{BitString, InfoSummary, Party, ProtocolConfig, ProtocolState, TrialEnsemble};

use crate::args::{Format, OffsetArgs, Pair, SamplingArgs, SimulateArgs, SweepEveArgs, SweepVarianceArgs};
use crate::table::{fmt_sig, to_csv};

pub const SWEEP_HEADER: [&str; 13] = [
    "eve_t2", "flavor", "H_A", "H_B", "H_E", "I_AB", "I_AE", "I_BE", "K_DR", "K_RR", "err_I_AB",
    "err_I_AE", "err_I_BE",
];

pub const VARIANCE_HEADER: [&str; 8] = [
    "V",
    "mean_photon",
    "photon_number_variance",
    "unc_I_AB",
    "unc_I_BE",
    "cov_I_AB",
    "cov_I_BE",
    "cov_K_RR",
];

pub const OFFSET_HEADER: [&str; 4] = ["offset", "r", "pairs", "degenerate"];

pub const TRIALS_HEADER: [&str; 14] = [
    "trial", "source", "alice_n1", "alice_n2", "alice_z", "bob_n1", "bob_n2", "bob_z", "eve_n1",
    "eve_n2", "eve_z", "alice_bit", "bob_bit", "eve_bit",
];

/// Text produced by one command: the main table and, for `simulate`, the
/// per-trial records.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifacts {
    pub primary: String,
    pub trials: Option<String>,
}

/// One row of an information table. Analytic rows carry zero errors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InfoRow {
    pub eve_t2: f64,
    pub summary: InfoSummary,
    pub errors: BootstrapErrors,
}

impl InfoRow {
    fn csv_fields(&self) -> Vec<String> {
        let s = &self.summary;
        let mut row = vec![fmt_sig(self.eve_t2), s.flavor.as_str().to_string()];
        row.extend(
            [
                s.h_a,
                s.h_b,
                s.h_e,
                s.i_ab,
                s.i_ae,
                s.i_be,
                s.k_dr,
                s.k_rr,
                self.errors.i_ab,
                self.errors.i_ae,
                self.errors.i_be,
            ]
            .map(fmt_sig),
        );
        row
    }
}

/// Simulated run plus its bit strings and Shannon summary.
pub struct Simulated {
    pub ensemble: TrialEnsemble,
    pub bits: [BitString; 3],
    pub row: InfoRow,
}

pub fn simulate_point(s: &SamplingArgs, eve_t2: f64, resamples: usize) -> Result<Simulated> {
    let cfg = ProtocolConfig::new(s.mean_photon, eve_t2)?;
    let ensemble = run_protocol(&cfg, s.trials, s.seed, s.measurement.into())?;
    let bits = [&ensemble.alice, &ensemble.bob, &ensemble.eve].map(|p| derive_bits(&p.z));
    let [a, b, e] = bits;
    let bits = [a?, b?, e?];
    let hist = JointHistogram::from_strings(&[&bits[0], &bits[1], &bits[2]])?;
    let summary = BinaryJoint::from_histogram(&hist).summary()?;
    let z = [&ensemble.alice.z[..], &ensemble.bob.z[..], &ensemble.eve.z[..]];
    let errors = bootstrap_trials(z, resamples, s.seed)?;
    Ok(Simulated {
        ensemble,
        bits,
        row: InfoRow {
            eve_t2,
            summary,
            errors,
        },
    })
}

pub fn covariance_row(mean_photon: f64, eve_t2: f64) -> Result<InfoRow> {
    let cfg = ProtocolConfig::new(mean_photon, eve_t2)?;
    Ok(InfoRow {
        eve_t2,
        summary: ProtocolState::build(&cfg)?.information()?,
        errors: BootstrapErrors::default(),
    })
}

fn info_table(rows: &[InfoRow], format: Format) -> Result<String> {
    match format {
        Format::Csv => to_csv(&SWEEP_HEADER, rows.iter().map(InfoRow::csv_fields)),
        Format::Json => json(&rows),
    }
}

fn json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

fn trials_csv(sim: &Simulated) -> Result<String> {
    let e = &sim.ensemble;
    let parties = [&e.alice, &e.bob, &e.eve];
    let rows = (0..e.trials).map(|t| {
        let mut row = vec![t.to_string(), e.source[t].to_string()];
        for p in parties {
            row.push(p.n1[t].to_string());
            row.push(p.n2[t].to_string());
            row.push(fmt_sig(p.z[t]));
        }
        for b in &sim.bits {
            row.push(b.bits()[t].to_string());
        }
        row
    });
    to_csv(&TRIALS_HEADER, rows)
}

#[derive(Serialize)]
struct SimulateReport<'a> {
    trials: usize,
    thresholds: [Option<f64>; 3],
    ones: [usize; 3],
    shannon: &'a InfoRow,
    von_neumann: &'a InfoRow,
}

pub fn simulate(args: &SimulateArgs) -> Result<Artifacts> {
    let sim = simulate_point(&args.sampling, args.eve_t2, args.bootstrap)?;
    let analytic = covariance_row(args.sampling.mean_photon, args.eve_t2)?;
    let primary = match args.output.format {
        Format::Csv => info_table(&[sim.row, analytic], Format::Csv)?,
        Format::Json => json(&SimulateReport {
            trials: sim.ensemble.trials,
            thresholds: sim.bits.each_ref().map(BitString::threshold),
            ones: sim.bits.each_ref().map(BitString::ones),
            shannon: &sim.row,
            von_neumann: &analytic,
        })?,
    };
    Ok(Artifacts {
        primary,
        trials: Some(trials_csv(&sim)?),
    })
}

/// Shannon and von Neumann rows per grid point, in that order.
pub fn sweep_eve_rows(args: &SweepEveArgs) -> Result<Vec<InfoRow>> {
    let mut rows = Vec::new();
    for t2 in args.sweep.points() {
        rows.push(simulate_point(&args.sampling, t2, args.bootstrap)?.row);
        rows.push(covariance_row(args.sampling.mean_photon, t2)?);
    }
    Ok(rows)
}

pub fn sweep_eve(args: &SweepEveArgs) -> Result<Artifacts> {
    let rows = sweep_eve_rows(args)?;
    Ok(Artifacts {
        primary: info_table(&rows, args.output.format)?,
        trials: None,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VarianceRow {
    pub variance: f64,
    pub mean_photon: f64,
    pub photon_number_variance: f64,
    pub unc_i_ab: f64,
    pub unc_i_be: f64,
    pub cov_i_ab: f64,
    pub cov_i_be: f64,
    pub cov_k_rr: f64,
}

pub fn sweep_variance_rows(args: &SweepVarianceArgs) -> Result<Vec<VarianceRow>> {
    let nm = NoiseModel::default();
    let (tau, mu) = (args.eve_t2.sqrt(), (1.0 - args.eve_t2).sqrt());
    args.sweep
        .points()
        .into_iter()
        .map(|v| {
            let n_bar = (v - 1.0) / 2.0;
            let unc = uncertainty_point(&nm, tau, mu, v)?;
            let cov = ProtocolState::build(&ProtocolConfig::new(n_bar, args.eve_t2)?)?.information()?;
            Ok(VarianceRow {
                variance: v,
                mean_photon: n_bar,
                photon_number_variance: n_bar * (n_bar + 1.0),
                unc_i_ab: unc.i_ab,
                unc_i_be: unc.i_be,
                cov_i_ab: cov.i_ab,
                cov_i_be: cov.i_be,
                cov_k_rr: cov.k_rr,
            })
        })
        .collect()
}

pub fn sweep_variance(args: &SweepVarianceArgs) -> Result<Artifacts> {
    let rows = sweep_variance_rows(args)?;
    let primary = match args.output.format {
        Format::Csv => to_csv(
            &VARIANCE_HEADER,
            rows.iter().map(|r| {
                [
                    r.variance,
                    r.mean_photon,
                    r.photon_number_variance,
                    r.unc_i_ab,
                    r.unc_i_be,
                    r.cov_i_ab,
                    r.cov_i_be,
                    r.cov_k_rr,
                ]
                .map(fmt_sig)
            }),
        )?,
        Format::Json => json(&rows)?,
    };
    Ok(Artifacts {
        primary,
        trials: None,
    })
}

pub fn offset(args: &OffsetArgs) -> Result<Artifacts> {
    let cfg = ProtocolConfig::new(args.sampling.mean_photon, args.eve_t2)?;
    let s = &args.sampling;
    let run = run_protocol(&cfg, s.trials, s.seed, s.measurement.into())?;
    let (x, y) = match args.pair {
        Pair::AliceBob => (Party::Alice, Party::Bob),
        Pair::AliceEve => (Party::Alice, Party::Eve),
        Pair::BobEve => (Party::Bob, Party::Eve),
        Pair::SelfCheck => (Party::Alice, Party::Alice),
    };
    let rows = offset_correlation(&run.party(x).z, &run.party(y).z, args.max_offset)?;
    let primary = match args.output.format {
        Format::Csv => to_csv(
            &OFFSET_HEADER,
            rows.iter().map(|r| {
                vec![
                    r.offset.to_string(),
                    fmt_sig(r.r),
                    r.pairs.to_string(),
                    r.degenerate.to_string(),
                ]
            }),
        )?,
        Format::Json => json(&rows)?,
    };
    Ok(Artifacts {
        primary,
        trials: None,
    })
}
