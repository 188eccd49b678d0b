//! Order parameters and correlation diagnostics. Entropies are in nats.

mod discord;
mod phase;

pub use discord::{classical_correlations, discord, CorrelationBundle, MeasurementBasis, Side};
pub use phase::{extract_phase, phase_lock_stats, phase_locking_sp, PhaseLockStats, LOCKED_STD};

use crate::error::{Error, Result};
use crate::operators::{hermitian_eigenvalues, partial_transpose_matrix, quadratures, DensityMatrix};
use crate::scalar::Real;

/// `-Σ λ ln λ` over the spectrum; eigenvalues below `1e-10` count as zero.
pub fn von_neumann_entropy<T: Real>(rho: &DensityMatrix<T>) -> Result<T> {
    entropy_of_spectrum(&rho.eigenvalues())
}

pub(crate) fn entropy_of_spectrum<T: Real>(values: &[T]) -> Result<T> {
    let mut s = T::zero();
    for &x in values {
        if x < -T::tol(1e-8) {
            return Err(Error::InvalidState(format!("negative eigenvalue {:.3e}", x.f64())));
        }
        let x = x.min(T::one());
        if x > T::lit(1e-10) {
            s -= x * x.ln();
        }
    }
    Ok(s)
}

/// `S(ρ_A) + S(ρ_B) - S(ρ)` for a bipartition of the sites.
pub fn mutual_information<T: Real>(rho: &DensityMatrix<T>, a: &[usize], b: &[usize]) -> Result<T> {
    check_bipartition(rho, a, b)?;
    let ra = rho.op().partial_trace(a)?;
    let rb = rho.op().partial_trace(b)?;
    let sa = entropy_of_spectrum(&hermitian_eigenvalues(ra.matrix()))?;
    let sb = entropy_of_spectrum(&hermitian_eigenvalues(rb.matrix()))?;
    Ok(sa + sb - von_neumann_entropy(rho)?)
}

/// `1 / <p_-² + q_-²>` with `x_- = (x_2 - x_1)/√2` for two bosonic sites.
pub fn sync_measure_sc<T: Real>(rho: &DensityMatrix<T>, site1: usize, site2: usize) -> Result<T> {
    if site1 == site2 {
        return Err(Error::InvalidArgument("S_c needs two distinct sites".into()));
    }
    let s = rho.structure();
    let (q1, p1) = quadratures::<T>(site1, s)?;
    let (q2, p2) = quadratures::<T>(site2, s)?;
    let h = T::lit(std::f64::consts::FRAC_1_SQRT_2);
    let qm = (&q2 - &q1).scale_real(h);
    let pm = (&p2 - &p1).scale_real(h);
    let op = &(&pm * &pm) + &(&qm * &qm);
    let value = op.expect(rho).re;
    if !(value > T::zero()) {
        return Err(Error::NonPositiveExpectation(value.f64()));
    }
    Ok(T::one() / value)
}

/// `(‖ρ^{T_A}‖₁ - 1)/2`, the summed magnitude of negative eigenvalues of the
/// partial transpose on `a`.
pub fn negativity<T: Real>(rho: &DensityMatrix<T>, a: &[usize], b: &[usize]) -> Result<T> {
    check_bipartition(rho, a, b)?;
    let pt = partial_transpose_matrix(rho.matrix(), rho.structure(), a)?;
    let neg = hermitian_eigenvalues(&pt)
        .into_iter()
        .filter(|&x| x < T::zero())
        .fold(T::zero(), |acc, x| acc - x);
    Ok(neg)
}

fn check_bipartition<T: Real>(rho: &DensityMatrix<T>, a: &[usize], b: &[usize]) -> Result<()> {
    let s = rho.structure();
    let a = s.normalize_sites(a)?;
    let b = s.normalize_sites(b)?;
    if a.is_empty() || b.is_empty() {
        return Err(Error::InvalidArgument("both parts of a bipartition must be non-empty".into()));
    }
    let mut all: Vec<usize> = a.iter().chain(&b).copied().collect();
    all.sort_unstable();
    let len = all.len();
    all.dedup();
    if all.len() != len || len != s.n_sites() {
        return Err(Error::InvalidArgument(format!(
            "{a:?} and {b:?} do not partition {} sites",
            s.n_sites()
        )));
    }
    Ok(())
}
