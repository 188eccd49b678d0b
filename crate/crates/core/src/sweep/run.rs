use std::f64::consts::TAU;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::mpsc;
use std::thread;

use serde::{Deserialize, Serialize};

use super::config::{InitialState, Measure, ModelParams, SweepConfig, TransientConfig};
use crate::dynamics::{auto_cutoff, build_liouvillian, evolve_with, AutoCutoffOptions, EvolveOptions, SteadyStateOptions};
use crate::dynamics::TimeSeries;
use crate::error::{Error, Result};
use crate::measures::{discord, mutual_information, negativity, phase_locking_sp, sync_measure_sc};
use crate::models::{build_cavity_qubit_pair, build_vdp_pair, CavityQubitParams, VdpParams, QUBIT1, QUBIT2};
use crate::operators::{embed, number_op, pauli, DensityMatrix, Operator, Pauli};

/// One grid point. `values` follows [`SweepResult::measures`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub delta: f64,
    pub g: f64,
    pub values: Vec<f64>,
    pub cutoff: Option<usize>,
    pub leakage: f64,
    pub residual: f64,
    /// [`Error::code`] of the first failure at this point.
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub measures: Vec<Measure>,
    /// Δ-major, g-minor.
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    pub fn column(&self, measure: Measure) -> Option<Vec<f64>> {
        let k = self.measures.iter().position(|&m| m == measure)?;
        Some(self.rows.iter().map(|r| r.values[k]).collect())
    }

    pub fn value(&self, row: usize, measure: Measure) -> Option<f64> {
        let k = self.measures.iter().position(|&m| m == measure)?;
        self.rows.get(row).map(|r| r.values[k])
    }

    pub fn failures(&self) -> usize {
        self.rows.iter().filter(|r| r.error.is_some()).count()
    }
}

/// Solves every `(Δ, g)` point of the grid on `cfg.workers` threads.
///
/// Detuning moves the second oscillator: `ω2 = ω1 + Δ`. Failures are
/// recorded per row and never abort the sweep.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepResult> {
    cfg.validate()?;
    let points: Vec<(f64, f64)> = cfg
        .delta
        .values()
        .into_iter()
        .flat_map(|d| cfg.g.values().into_iter().map(move |g| (d, g)))
        .collect();
    let total = points.len();
    let workers = cfg.workers.min(total).max(1);
    log::info!("{} sweep: {total} points on {workers} workers", cfg.model().name());

    let next = AtomicUsize::new(0);
    let (tx, rx) = mpsc::channel();
    let mut rows: Vec<(usize, SweepRow)> = thread::scope(|scope| {
        for _ in 0..workers {
            let tx = tx.clone();
            let (next, points) = (&next, &points);
            scope.spawn(move || loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(&(delta, g)) = points.get(i) else {
                    break;
                };
                let row = solve_point(cfg, delta, g);
                if tx.send((i, row)).is_err() {
                    break;
                }
            });
        }
        drop(tx);
        let mut rows = Vec::with_capacity(total);
        for (i, row) in rx {
            match &row.error {
                Some(code) => log::warn!("point {}/{total} (Δ={}, g={}) failed: {code}", rows.len() + 1, row.delta, row.g),
                None => log::info!("point {}/{total} (Δ={}, g={}) done", rows.len() + 1, row.delta, row.g),
            }
            rows.push((i, row));
        }
        rows
    });
    if rows.len() != total {
        return Err(Error::InvalidArgument(format!("{} of {total} points returned", rows.len())));
    }
    rows.sort_by_key(|(i, _)| *i);
    Ok(SweepResult {
        measures: cfg.measures.clone(),
        rows: rows.into_iter().map(|(_, r)| r).collect(),
    })
}

fn solve_point(cfg: &SweepConfig, delta: f64, g: f64) -> SweepRow {
    let mut row = SweepRow {
        delta,
        g,
        values: vec![f64::NAN; cfg.measures.len()],
        cutoff: None,
        leakage: f64::NAN,
        residual: f64::NAN,
        error: None,
    };
    let cutoff_opts = AutoCutoffOptions {
        start: cfg.solver.start_cutoff,
        max: cfg.solver.max_cutoff,
        leak_tol: cfg.solver.leak_tol,
        obs_tol: cfg.solver.obs_tol,
        growth: cfg.solver.growth,
    };
    let solver = SteadyStateOptions {
        tol: cfg.solver.tol,
        ..Default::default()
    };
    // Measures act on the two oscillators (vdp) or the reduced two-qubit state.
    let outcome = match &cfg.params {
        ModelParams::Vdp(p) => {
            let family = |cutoff| {
                build_vdp_pair::<f64>(&VdpParams {
                    omega2: p.omega1 + delta,
                    g,
                    cutoff,
                    ..p.clone()
                })
            };
            auto_cutoff(family, |rho| mutual_information(rho, &[0], &[1]), &cutoff_opts, &solver)
                .map(|out| (out.report.rho.clone(), out))
        }
        ModelParams::CavityQubit(p) => {
            let family = |cutoff| {
                build_cavity_qubit_pair::<f64>(&CavityQubitParams {
                    omega2: p.omega1 + delta,
                    g,
                    cutoff,
                    ..p.clone()
                })
            };
            let qubit_mi = |rho: &DensityMatrix<f64>| mutual_information(&qubit_state(rho)?, &[0], &[1]);
            auto_cutoff(family, qubit_mi, &cutoff_opts, &solver)
                .and_then(|out| Ok((qubit_state(&out.report.rho)?, out)))
        }
    };
    let (rho, outcome) = match outcome {
        Ok(v) => v,
        Err(e) => {
            row.error = Some(e.code().to_string());
            if let Error::CutoffExceeded { max, .. } = e {
                row.cutoff = Some(max);
            }
            return row;
        }
    };
    row.cutoff = outcome.report.cutoff_used.first().copied();
    row.leakage = outcome.report.leakage;
    row.residual = outcome.report.residual;

    let mut correlations = None;
    for (slot, &m) in row.values.iter_mut().zip(&cfg.measures) {
        let value = match m {
            Measure::Mi => Ok(outcome.observable),
            Measure::Sc => sync_measure_sc(&rho, 0, 1),
            Measure::Negativity => negativity(&rho, &[0], &[1]),
            Measure::Classical | Measure::Discord => {
                let bundle = correlations.get_or_insert_with(|| discord(&rho, cfg.side)).clone();
                bundle.map(|b| if m == Measure::Classical { b.classical } else { b.discord })
            }
        };
        match value {
            Ok(v) => *slot = v,
            Err(e) => {
                row.error.get_or_insert_with(|| e.code().to_string());
            }
        }
    }
    row
}

/// Two-qubit reduced state of the cavity-qubit model.
fn qubit_state(rho: &DensityMatrix<f64>) -> Result<DensityMatrix<f64>> {
    Ok(DensityMatrix::new_unchecked(rho.op().partial_trace(&[QUBIT1, QUBIT2])?))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransientResult {
    pub times: Vec<f64>,
    pub sx1: TimeSeries<f64>,
    pub sx2: TimeSeries<f64>,
    pub sp: TimeSeries<f64>,
    /// Qubit mutual information; `NaN` between sub-grid samples.
    pub mi: Vec<f64>,
    /// Requested observables other than `sx1` and `sx2`, in config order.
    pub extra: Vec<(String, Vec<f64>)>,
}

impl TransientResult {
    /// `(t, MI)` on the sub-grid where MI was evaluated.
    pub fn mi_series(&self) -> TimeSeries<f64> {
        let (times, values) = self
            .times
            .iter()
            .zip(&self.mi)
            .filter(|(_, m)| !m.is_nan())
            .map(|(&t, &m)| (t, m))
            .unzip();
        TimeSeries { times, values }
    }
}

/// Integrates the cavity-qubit pair from `cfg.initial` over
/// `cfg.periods · 2π/ω1`, recording `<σx>` of both qubits, `s_p` and the
/// qubit mutual information.
pub fn run_transient(cfg: &TransientConfig) -> Result<TransientResult> {
    cfg.validate()?;
    let model = build_cavity_qubit_pair::<f64>(&cfg.params)?;
    let s = model.structure().clone();
    let qubit_level = match cfg.initial {
        InitialState::VacuumGround => 1,
        InitialState::VacuumExcited => 0,
    };
    let rho0 = DensityMatrix::basis(s.clone(), &[0, 0, qubit_level, qubit_level])?;
    let dt = TAU / cfg.params.omega1 / cfg.samples_per_period as f64;
    let n = (cfg.periods * cfg.samples_per_period as f64).round() as usize + 1;
    let times: Vec<f64> = (0..n).map(|i| i as f64 * dt).collect();

    let mut names = vec!["sx1".to_string(), "sx2".to_string()];
    names.extend(cfg.observables.iter().filter(|o| *o != "sx1" && *o != "sx2").cloned());
    let ops = names
        .iter()
        .map(|name| observable(name, &cfg.params, &s))
        .collect::<Result<Vec<_>>>()?;

    let l = build_liouvillian(&model)?;
    let opts = EvolveOptions {
        rtol: cfg.rtol,
        atol: cfg.atol,
        ..Default::default()
    };
    let mut series = vec![Vec::with_capacity(n); ops.len()];
    let mut mi = vec![f64::NAN; n];
    let mut failure = None;
    log::info!("transient: {n} samples over {} periods", cfg.periods);
    let stats = evolve_with(&l, &rho0, &times, &opts, |i, _, m| {
        for (out, op) in series.iter_mut().zip(&ops) {
            out.push(crate::operators::trace_of_product(op.matrix(), m).re);
        }
        if i % cfg.mi_every == 0 && failure.is_none() {
            let value = Operator::new(m.clone(), s.clone())
                .and_then(|op| qubit_state(&DensityMatrix::new_unchecked(op)))
                .and_then(|q| mutual_information(&q, &[0], &[1]));
            match value {
                Ok(v) => mi[i] = v,
                Err(e) => failure = Some(e),
            }
        }
    })?;
    if let Some(e) = failure {
        return Err(e);
    }
    log::debug!("transient: {} steps accepted, {} rejected", stats.accepted, stats.rejected);

    let mut series = series.into_iter();
    let sx1 = TimeSeries::new(times.clone(), series.next().unwrap_or_default())?;
    let sx2 = TimeSeries::new(times.clone(), series.next().unwrap_or_default())?;
    let sp = phase_locking_sp(&sx1, &sx2)?;
    Ok(TransientResult {
        extra: names.into_iter().skip(2).zip(series).collect(),
        times,
        sx1,
        sx2,
        sp,
        mi,
    })
}

fn observable(name: &str, p: &CavityQubitParams, s: &crate::operators::HilbertStructure) -> Result<Operator<f64>> {
    let (op, site) = match name {
        "sx1" => (pauli(Pauli::X), QUBIT1),
        "sx2" => (pauli(Pauli::X), QUBIT2),
        "sy1" => (pauli(Pauli::Y), QUBIT1),
        "sy2" => (pauli(Pauli::Y), QUBIT2),
        "sz1" => (pauli(Pauli::Z), QUBIT1),
        "sz2" => (pauli(Pauli::Z), QUBIT2),
        "n1" => (number_op(p.cutoff)?, crate::models::CAVITY1),
        "n2" => (number_op(p.cutoff)?, crate::models::CAVITY2),
        _ => return Err(Error::Config(format!("transient.observables: unknown observable '{name}'"))),
    };
    embed(&op, site, s)
}
