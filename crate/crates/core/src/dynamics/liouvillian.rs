use nalgebra::{Complex, ComplexField, DMatrix};

use super::ModelSpec;
use crate::error::Result;
use crate::operators::{HilbertStructure, Operator};
use crate::scalar::{re, Real};
use crate::sparse::CsrMatrix;

/// Superoperator acting on column-stacked density matrices.
#[derive(Clone, Debug, PartialEq)]
pub struct Liouvillian<T: Real> {
    superop: CsrMatrix<T>,
    structure: HilbertStructure,
    hamiltonian_bound: T,
}

impl<T: Real> Liouvillian<T> {
    pub fn superop(&self) -> &CsrMatrix<T> {
        &self.superop
    }

    pub fn structure(&self) -> &HilbertStructure {
        &self.structure
    }

    /// Gershgorin bound on the Hamiltonian spectrum, `max_i Σ_j |H_ij|`.
    pub fn hamiltonian_bound(&self) -> T {
        self.hamiltonian_bound
    }

    /// Side of the superoperator, `total_dim²`.
    pub fn dim(&self) -> usize {
        self.superop.nrows()
    }

    /// `L(ρ)` as a matrix.
    pub fn apply(&self, rho: &DMatrix<Complex<T>>) -> DMatrix<Complex<T>> {
        let n = self.structure.total_dim();
        devectorize(&self.superop.mul_vec(&vectorize(rho)), n)
    }
}

/// Column stacking: `vec(ρ)[c·n + r] = ρ[r, c]`.
pub fn vectorize<T: Real>(m: &DMatrix<Complex<T>>) -> Vec<Complex<T>> {
    // nalgebra storage is column-major already.
    m.as_slice().to_vec()
}

pub fn devectorize<T: Real>(v: &[Complex<T>], n: usize) -> DMatrix<Complex<T>> {
    DMatrix::from_column_slice(n, n, v)
}

/// `-i(I ⊗ H - Hᵀ ⊗ I)`, the commutator part of the generator.
pub fn hamiltonian_superop<T: Real>(h: &Operator<T>) -> CsrMatrix<T> {
    let n = h.dim();
    let id = CsrMatrix::identity(n);
    let hs = CsrMatrix::from_dense(h.matrix());
    let ht = CsrMatrix::from_dense(&h.matrix().transpose());
    let minus_i = Complex::new(T::zero(), -T::one());
    let left = id.kron(&hs).scale(minus_i);
    let right = ht.kron(&id).scale(-minus_i);
    CsrMatrix::sum([&left, &right], n * n, n * n)
}

/// `γ (2 L̄ ⊗ L - I ⊗ L†L - (L†L)ᵀ ⊗ I)`.
pub fn dissipator_superop<T: Real>(l: &Operator<T>, rate: T) -> CsrMatrix<T> {
    let n = l.dim();
    let id = CsrMatrix::identity(n);
    let ldl = l.adjoint().matrix() * l.matrix();
    let jump = CsrMatrix::from_dense(&l.matrix().map(|z| z.conj()))
        .kron(&CsrMatrix::from_dense(l.matrix()))
        .scale(re(T::lit(2.0) * rate));
    let left = id.kron(&CsrMatrix::from_dense(&ldl)).scale(re(-rate));
    let right = CsrMatrix::from_dense(&ldl.transpose()).kron(&id).scale(re(-rate));
    CsrMatrix::sum([&jump, &left, &right], n * n, n * n)
}

/// Assembles the full generator of `model` under column stacking,
/// `vec(AρB) = (Bᵀ ⊗ A) vec(ρ)`.
pub fn build_liouvillian<T: Real>(model: &ModelSpec<T>) -> Result<Liouvillian<T>> {
    model.validate()?;
    let n = model.structure().total_dim();
    let mut parts = vec![hamiltonian_superop(model.hamiltonian())];
    for term in model.collapse_terms() {
        if term.rate > T::zero() {
            parts.push(dissipator_superop(&term.operator, term.rate));
        }
    }
    let h = model.hamiltonian().matrix();
    let hamiltonian_bound = h
        .row_iter()
        .map(|row| row.iter().fold(T::zero(), |acc, z| acc + z.modulus()))
        .fold(T::zero(), |a, b| a.max(b));
    Ok(Liouvillian {
        superop: CsrMatrix::sum(parts.iter(), n * n, n * n),
        structure: model.structure().clone(),
        hamiltonian_bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{annihilation_op, number_op, pauli, Pauli};

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    /// Direct evaluation of the master equation right-hand side.
    fn rhs(model: &ModelSpec<f64>, rho: &DMatrix<Complex<f64>>) -> DMatrix<Complex<f64>> {
        let h = model.hamiltonian().matrix();
        let mut out = (h * rho - rho * h) * c(0.0, -1.0);
        for t in model.collapse_terms() {
            let l = t.operator.matrix();
            let ld = l.adjoint();
            let ldl = &ld * l;
            out += (l * rho * &ld * c(2.0, 0.0) - &ldl * rho - rho * &ldl) * c(t.rate, 0.0);
        }
        out
    }

    fn test_model() -> ModelSpec<f64> {
        let a = annihilation_op::<f64>(4).unwrap();
        let h = &number_op::<f64>(4).unwrap().scale_real(1.3) + &(&a + &a.adjoint()).scale_real(0.4);
        ModelSpec::new(h, vec![(a.clone(), 0.2), (a.adjoint(), 0.05), (&a * &a, 0.7)]).unwrap()
    }

    #[test]
    fn superoperator_matches_direct_rhs() {
        let model = test_model();
        let l = build_liouvillian(&model).unwrap();
        let rho = DMatrix::from_fn(4, 4, |i, j| c((i + j) as f64 * 0.1, i as f64 * 0.03 - j as f64 * 0.03));
        let diff = l.apply(&rho) - rhs(&model, &rho);
        assert!(diff.norm() < 1e-13, "{}", diff.norm());
    }

    #[test]
    fn generator_is_trace_free() {
        let l = build_liouvillian(&test_model()).unwrap();
        let n = 4;
        // Tr(dρ/dt) = Σ_i row (i, i) applied to vec(ρ) must vanish for every ρ,
        // i.e. the diagonal rows sum to zero column by column.
        let dense = l.superop().to_dense();
        for col in 0..n * n {
            let s: Complex<f64> = (0..n).map(|i| dense[(i * n + i, col)]).sum();
            assert!(s.norm() < 1e-12);
        }
    }

    #[test]
    fn vectorization_round_trip_is_exact() {
        let m = DMatrix::from_fn(5, 5, |i, j| c(i as f64 - 0.5 * j as f64, (i * j) as f64));
        assert_eq!(devectorize(&vectorize(&m), 5), m);
    }

    #[test]
    fn invalid_models_are_rejected() {
        let a = annihilation_op::<f64>(3).unwrap();
        assert!(ModelSpec::new(a.clone(), vec![]).is_err());
        let h = number_op::<f64>(3).unwrap();
        assert!(ModelSpec::new(h.clone(), vec![(a.clone(), -0.1)]).is_err());
        assert!(ModelSpec::new(h, vec![(pauli(Pauli::Minus), 0.1)]).is_err());
    }
}
