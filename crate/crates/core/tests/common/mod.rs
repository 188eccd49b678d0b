#![allow(dead_code)]

use nalgebra::{Complex, DMatrix};
use qsync::operators::{annihilation_op, embed, HilbertStructure, Operator};
use qsync::{DensityMatrix, ModelSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn ginibre(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<Complex<f64>> {
    DMatrix::from_fn(n, n, |_, _| Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
}

/// `G G† / Tr(G G†)`, full rank with probability one.
pub fn random_density(rng: &mut ChaCha8Rng, dims: &[usize]) -> DensityMatrix<f64> {
    let s = HilbertStructure::new(dims.to_vec()).unwrap();
    let g = ginibre(rng, s.total_dim());
    let m = &g * g.adjoint();
    let tr = m.trace();
    DensityMatrix::from_matrix(m / tr, s).unwrap()
}

pub fn random_hermitian(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<Complex<f64>> {
    let g = ginibre(rng, n);
    (&g + g.adjoint()) * Complex::new(0.5, 0.0)
}

/// Unitary from the QR factor of a Ginibre matrix.
pub fn random_unitary(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<Complex<f64>> {
    ginibre(rng, n).qr().q()
}

/// Random Hamiltonian plus a few random collapse operators on `dims`,
/// with a loss channel per site so the steady state is unique.
pub fn random_model(rng: &mut ChaCha8Rng, dims: &[usize]) -> ModelSpec<f64> {
    let s = HilbertStructure::new(dims.to_vec()).unwrap();
    let n = s.total_dim();
    let h = Operator::new(random_hermitian(rng, n), s.clone()).unwrap();
    let mut collapse = Vec::new();
    for (site, &d) in dims.iter().enumerate() {
        let a = embed(&annihilation_op::<f64>(d).unwrap(), site, &s).unwrap();
        collapse.push((a, rng.gen_range(0.2..1.0)));
    }
    for _ in 0..rng.gen_range(0..3) {
        let l = Operator::new(ginibre(rng, n) * Complex::new(0.3, 0.0), s.clone()).unwrap();
        collapse.push((l, rng.gen_range(0.0..0.5)));
    }
    ModelSpec::new(h, collapse).unwrap()
}

pub fn trace_distance(a: &DMatrix<Complex<f64>>, b: &DMatrix<Complex<f64>>) -> f64 {
    let d = a - b;
    let d = (&d + d.adjoint()) * Complex::new(0.5, 0.0);
    d.symmetric_eigenvalues().iter().map(|x| x.abs()).sum::<f64>() / 2.0
}
