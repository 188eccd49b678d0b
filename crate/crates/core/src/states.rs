//! Frequently used kets and density matrices.

use nalgebra::{Complex, DMatrix, DVector};

use crate::error::{Error, Result};
use crate::operators::{DensityMatrix, HilbertStructure, Operator};
use crate::scalar::{re, Real};

/// Fock state `|n>` in a space truncated at `d` levels.
pub fn fock_ket<T: Real>(d: usize, n: usize) -> Result<DVector<Complex<T>>> {
    if n >= d {
        return Err(Error::InvalidArgument(format!("level {n} outside cutoff {d}")));
    }
    let mut v = DVector::zeros(d);
    v[n] = re(T::one());
    Ok(v)
}

/// Coherent state `|α>` truncated at `d` levels and renormalized.
pub fn coherent_ket<T: Real>(d: usize, alpha: Complex<T>) -> DVector<Complex<T>> {
    let mut v = DVector::zeros(d);
    let mut amp = re(T::one());
    for n in 0..d {
        if n > 0 {
            amp = amp * alpha / re(T::lit(n as f64).sqrt());
        }
        v[n] = amp;
    }
    let norm = v.norm();
    v.unscale(norm)
}

pub fn coherent_state<T: Real>(d: usize, alpha: Complex<T>) -> Result<DensityMatrix<T>> {
    DensityMatrix::from_ket(&coherent_ket(d, alpha), HilbertStructure::single(d)?)
}

/// `(|00> + |11>)/√2` projector.
pub fn bell_phi_plus<T: Real>() -> DensityMatrix<T> {
    let h = re(T::lit(std::f64::consts::FRAC_1_SQRT_2));
    let z = re(T::zero());
    let ket = DVector::from_vec(vec![h, z, z, h]);
    DensityMatrix::from_ket(&ket, two_qubits()).expect("Bell state is valid")
}

/// `p |Φ+><Φ+| + (1 - p) I/4`.
pub fn werner<T: Real>(p: T) -> Result<DensityMatrix<T>> {
    if p < T::zero() || p > T::one() {
        return Err(Error::InvalidArgument(format!("Werner weight {} outside [0, 1]", p.f64())));
    }
    let bell = bell_phi_plus::<T>();
    let mixed = DMatrix::<Complex<T>>::identity(4, 4).map(|z| z * re(T::lit(0.25)));
    let m = bell.matrix().map(|z| z * re(p)) + mixed.map(|z| z * re(T::one() - p));
    DensityMatrix::new(Operator::new(m, two_qubits())?)
}

pub fn two_qubits() -> HilbertStructure {
    HilbertStructure::new(vec![2, 2]).expect("valid structure")
}
