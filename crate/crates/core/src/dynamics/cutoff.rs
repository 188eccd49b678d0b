use super::steady::{steady_state, SteadyStateOptions, SteadyStateReport};
use super::ModelSpec;
use crate::error::{Error, Result};
use crate::operators::DensityMatrix;
use crate::scalar::Real;

#[derive(Clone, Debug, PartialEq)]
pub struct AutoCutoffOptions {
    pub start: usize,
    pub max: usize,
    /// Top-two-level population every bosonic site must stay below.
    pub leak_tol: f64,
    /// Allowed change of the monitored observable between consecutive cutoffs.
    pub obs_tol: f64,
    pub growth: f64,
}

impl Default for AutoCutoffOptions {
    fn default() -> Self {
        Self {
            start: 4,
            max: 32,
            leak_tol: 1e-4,
            obs_tol: 1e-4,
            growth: 1.5,
        }
    }
}

#[derive(Clone, Debug)]
pub struct CutoffOutcome<T: Real> {
    pub report: SteadyStateReport<T>,
    /// Observable evaluated on `report.rho`.
    pub observable: T,
    /// `(cutoff, leakage, observable)` for every cutoff that produced a state.
    pub history: Vec<(usize, T, T)>,
}

/// Solves `family(cutoff)` on a geometric cutoff schedule until the leakage
/// is below `leak_tol` and `observable` moved less than `obs_tol` since the
/// previous cutoff.
///
/// Cutoffs at which the solver rejects the state (negative eigenvalues or a
/// large residual, both symptoms of truncation) are skipped.
pub fn auto_cutoff<T, F, O>(
    family: F,
    observable: O,
    opts: &AutoCutoffOptions,
    solver: &SteadyStateOptions,
) -> Result<CutoffOutcome<T>>
where
    T: Real,
    F: Fn(usize) -> Result<ModelSpec<T>>,
    O: Fn(&DensityMatrix<T>) -> Result<T>,
{
    if opts.start < 3 {
        return Err(Error::InvalidArgument(format!(
            "starting cutoff {} is below 3",
            opts.start
        )));
    }
    if !(opts.growth > 1.0) {
        return Err(Error::InvalidArgument(format!("cutoff growth {} must exceed 1", opts.growth)));
    }
    let mut cutoff = opts.start;
    let mut previous: Option<T> = None;
    let mut history = Vec::new();
    loop {
        if cutoff > opts.max {
            return Err(Error::CutoffExceeded {
                cutoff,
                max: opts.max,
            });
        }
        let model = family(cutoff)?;
        match steady_state(&model, solver) {
            Ok(report) => {
                let value = observable(&report.rho)?;
                history.push((cutoff, report.leakage, value));
                log::debug!(
                    "cutoff {cutoff}: leakage {:.3e}, observable {:.9}",
                    report.leakage.f64(),
                    value.f64()
                );
                let settled = previous.is_some_and(|p| (value - p).abs() < T::lit(opts.obs_tol));
                if report.leakage < T::lit(opts.leak_tol) && settled {
                    return Ok(CutoffOutcome {
                        report,
                        observable: value,
                        history,
                    });
                }
                previous = Some(value);
            }
            Err(e @ (Error::NotConverged { .. } | Error::NegativeSteadyState(_))) => {
                log::debug!("cutoff {cutoff}: {e}");
                previous = None;
            }
            Err(e) => return Err(e),
        }
        cutoff = next_cutoff(cutoff, opts);
    }
}

/// `ceil(growth · cutoff)`, clamped so the maximum itself is tried once.
fn next_cutoff(cutoff: usize, opts: &AutoCutoffOptions) -> usize {
    let next = ((cutoff as f64) * opts.growth).ceil() as usize;
    let next = next.max(cutoff + 1);
    if cutoff < opts.max && next > opts.max {
        opts.max
    } else {
        next
    }
}
