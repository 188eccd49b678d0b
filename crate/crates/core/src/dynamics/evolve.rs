use nalgebra::{Complex, ComplexField, DMatrix};
use serde::{Deserialize, Serialize};

use super::liouvillian::{build_liouvillian, devectorize, vectorize, Liouvillian};
use super::ModelSpec;
use crate::error::{Error, Result};
use crate::operators::{trace_of_product, DensityMatrix, Operator};
use crate::scalar::{re, Real};

/// Scalar samples on a time grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries<T> {
    pub times: Vec<T>,
    pub values: Vec<T>,
}

impl<T: Real> TimeSeries<T> {
    pub fn new(times: Vec<T>, values: Vec<T>) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} times for {} values",
                times.len(),
                values.len()
            )));
        }
        Ok(Self { times, values })
    }

    /// Samples `f` on `times`.
    pub fn from_fn(times: Vec<T>, f: impl Fn(T) -> T) -> Self {
        let values = times.iter().map(|&t| f(t)).collect();
        Self { times, values }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EvolveOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Abort when `|Tr ρ - 1|` exceeds this.
    pub trace_tol: f64,
    pub max_steps: usize,
    /// Overrides the Gershgorin-based first step.
    pub initial_step: Option<f64>,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-8,
            atol: 1e-10,
            trace_tol: 1e-6,
            max_steps: 50_000_000,
            initial_step: None,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct EvolveStats {
    pub accepted: usize,
    pub rejected: usize,
}

/// Expectation values `Re Tr(O ρ(t))` of every observable on `t_grid`.
///
/// `rho0` is the state at `t_grid[0]`.
pub fn time_evolve<T: Real>(
    model: &ModelSpec<T>,
    rho0: &DensityMatrix<T>,
    t_grid: &[T],
    observables: &[Operator<T>],
    opts: &EvolveOptions,
) -> Result<Vec<TimeSeries<T>>> {
    for o in observables {
        if o.structure() != model.structure() {
            return Err(Error::DimensionMismatch(format!(
                "observable on {:?}, model on {:?}",
                o.structure().dims(),
                model.structure().dims()
            )));
        }
    }
    let l = build_liouvillian(model)?;
    let mut values = vec![Vec::with_capacity(t_grid.len()); observables.len()];
    evolve_with(&l, rho0, t_grid, opts, |_, _, rho| {
        for (series, o) in values.iter_mut().zip(observables) {
            series.push(trace_of_product(o.matrix(), rho).re);
        }
    })?;
    Ok(values
        .into_iter()
        .map(|v| TimeSeries {
            times: t_grid.to_vec(),
            values: v,
        })
        .collect())
}

// Dormand–Prince 5(4) tableau with Hairer's continuous extension.
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];
const D: [f64; 7] = [
    -12715105075.0 / 11282082432.0,
    0.0,
    87487479700.0 / 32700410799.0,
    -10690763975.0 / 1880347072.0,
    701980252875.0 / 199316789632.0,
    -1453857185.0 / 822651844.0,
    69997945.0 / 29380423.0,
];

/// Integrates `dρ/dt = L ρ` with adaptive Dormand–Prince steps and hands
/// the state at every grid time to `sample(index, t, ρ)`.
///
/// Hermiticity is restored after each accepted step.
pub fn evolve_with<T: Real, F>(
    l: &Liouvillian<T>,
    rho0: &DensityMatrix<T>,
    t_grid: &[T],
    opts: &EvolveOptions,
    mut sample: F,
) -> Result<EvolveStats>
where
    F: FnMut(usize, T, &DMatrix<Complex<T>>),
{
    if rho0.structure() != l.structure() {
        return Err(Error::DimensionMismatch(format!(
            "initial state on {:?}, generator on {:?}",
            rho0.structure().dims(),
            l.structure().dims()
        )));
    }
    if t_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::NonUniformGrid);
    }
    let n = l.structure().total_dim();
    let m = n * n;
    let mut stats = EvolveStats::default();
    let Some(&t_end) = t_grid.last() else {
        return Ok(stats);
    };

    let zero = Complex::new(T::zero(), T::zero());
    let rtol = T::lit(opts.rtol);
    let atol = T::lit(opts.atol);
    let mut t = t_grid[0];
    let mut y = vectorize(rho0.matrix());
    sample(0, t, rho0.matrix());
    let mut next_sample = 1;

    let mut k: Vec<Vec<Complex<T>>> = vec![vec![zero; m]; 7];
    let mut stage = vec![zero; m];
    let mut y_new = vec![zero; m];
    l.superop().mul_vec_into(&y, &mut k[0]);

    let mut h = match opts.initial_step {
        Some(h) => T::lit(h),
        None => initial_step(l.hamiltonian_bound()),
    };
    let h_min = T::lit(1e-14) * (t_end.abs().max(T::one()));

    while next_sample < t_grid.len() {
        if stats.accepted + stats.rejected >= opts.max_steps {
            return Err(Error::StepUnderflow { t: t.f64() });
        }
        if h < h_min {
            return Err(Error::StepUnderflow { t: t.f64() });
        }
        h = h.min(t_end - t);

        for s in 1..7 {
            for (i, out) in stage.iter_mut().enumerate() {
                let mut acc = y[i];
                for (j, kj) in k.iter().enumerate().take(s) {
                    let a = A[s][j];
                    if a != 0.0 {
                        acc += kj[i] * re(h * T::lit(a));
                    }
                }
                *out = acc;
            }
            l.superop().mul_vec_into(&stage, &mut k[s]);
            if s == 6 {
                y_new.copy_from_slice(&stage);
            }
        }

        // y_new = y + h Σ b_j k_j was formed as the last stage input; the
        // error estimate uses k_7 = f(y_new).
        let mut err_sq = T::zero();
        for i in 0..m {
            let mut e = zero;
            for (j, kj) in k.iter().enumerate() {
                if E[j] != 0.0 {
                    e += kj[i] * re(T::lit(E[j]));
                }
            }
            e *= re(h);
            let scale = atol + rtol * y[i].modulus().max(y_new[i].modulus());
            err_sq += (e / re(scale)).norm_sqr();
        }
        let err = (err_sq / T::lit(m as f64)).sqrt();

        if err <= T::one() {
            stats.accepted += 1;
            let t_new = t + h;
            while next_sample < t_grid.len() && t_grid[next_sample] <= t_new + h_min {
                let theta = (t_grid[next_sample] - t) / h;
                let state = dense_output(&y, &y_new, &k, h, theta);
                let rho = devectorize(&state, n);
                sample(next_sample, t_grid[next_sample], &rho);
                next_sample += 1;
            }
            t = t_new;
            symmetrize(&mut y_new, n);
            std::mem::swap(&mut y, &mut y_new);
            // L commutes with the adjoint, so f(sym(y)) = sym(f(y)).
            let mut k7 = std::mem::take(&mut k[6]);
            symmetrize(&mut k7, n);
            k[0] = k7;
            k[6] = vec![zero; m];

            let tr = (0..n).fold(zero, |acc, i| acc + y[i * n + i]);
            let drift = (tr - re(T::one())).modulus();
            if drift > T::lit(opts.trace_tol) {
                return Err(Error::TraceDrift {
                    t: t.f64(),
                    drift: drift.f64(),
                });
            }
        } else {
            stats.rejected += 1;
        }

        let factor = if err == T::zero() {
            T::lit(5.0)
        } else {
            (T::lit(0.9) * err.powf(T::lit(-0.2))).clamp(T::lit(0.2), T::lit(5.0))
        };
        h *= factor;
    }
    Ok(stats)
}

fn dense_output<T: Real>(
    y: &[Complex<T>],
    y_new: &[Complex<T>],
    k: &[Vec<Complex<T>>],
    h: T,
    theta: T,
) -> Vec<Complex<T>> {
    let theta1 = T::one() - theta;
    (0..y.len())
        .map(|i| {
            let diff = y_new[i] - y[i];
            let bspl = k[0][i] * re(h) - diff;
            let r4 = diff - k[6][i] * re(h) - bspl;
            let mut r5 = Complex::new(T::zero(), T::zero());
            for (j, kj) in k.iter().enumerate() {
                if D[j] != 0.0 {
                    r5 += kj[i] * re(T::lit(D[j]));
                }
            }
            r5 *= re(h);
            y[i] + (diff + (bspl + (r4 + r5 * re(theta1)) * re(theta)) * re(theta1)) * re(theta)
        })
        .collect()
}

/// `vec(ρ) ← vec((ρ + ρ†)/2)`.
fn symmetrize<T: Real>(v: &mut [Complex<T>], n: usize) {
    let half = T::lit(0.5);
    for c in 0..n {
        v[c * n + c].im = T::zero();
        for r in 0..c {
            let upper = v[c * n + r];
            let lower = v[r * n + c];
            let avg = (upper + lower.conj()) * re(half);
            v[c * n + r] = avg;
            v[r * n + c] = avg.conj();
        }
    }
}

/// A thousandth of the shortest period allowed by the spectral bound.
fn initial_step<T: Real>(bound: T) -> T {
    if bound <= T::zero() {
        return T::lit(1e-3);
    }
    T::lit(1e-3) * T::two_pi() / bound
}
