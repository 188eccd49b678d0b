use faer::linalg::solvers::Solve;
use faer::sparse::{SparseColMat, Triplet};
use nalgebra::{Complex, DMatrix, DVector};

use super::liouvillian::{build_liouvillian, devectorize, vectorize, Liouvillian};
use super::ModelSpec;
use crate::error::{Error, Result};
use crate::operators::{hermitian_eigenvalues, hermitize, DensityMatrix, Operator};
use crate::scalar::{re, Real};

#[derive(Clone, Debug, PartialEq)]
pub struct SteadyStateOptions {
    /// Bound on `‖L(ρ)‖_F`.
    pub tol: f64,
    /// Largest Hilbert-space dimension solved with dense algebra.
    pub dense_max_dim: usize,
    /// Largest dimension for the dense fallback when the sparse factorization fails.
    pub dense_fallback_max_dim: usize,
    /// Re-solve with a perturbed normalization row and require the same state.
    pub check_uniqueness: bool,
}

impl Default for SteadyStateOptions {
    fn default() -> Self {
        Self {
            tol: 1e-9,
            dense_max_dim: 16,
            dense_fallback_max_dim: 40,
            check_uniqueness: false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolveMethod {
    DenseLu,
    DenseNullSpace,
    SparseLu,
}

#[derive(Clone, Debug)]
pub struct SteadyStateReport<T: Real> {
    pub rho: DensityMatrix<T>,
    /// `‖L(ρ)‖_F` of the returned state.
    pub residual: T,
    /// Local dimensions of the bosonic sites.
    pub cutoff_used: Vec<usize>,
    /// Largest population held by the top two Fock levels of any bosonic site.
    pub leakage: T,
    pub method: SolveMethod,
}

/// Finds the unit-trace null vector of the model's Liouvillian.
///
/// Small spaces use a dense LU of the trace-augmented generator (first row
/// replaced by the trace functional); larger ones a sparse LU of the same
/// system. A singular dense system falls back to the SVD null space.
pub fn steady_state<T: Real>(model: &ModelSpec<T>, opts: &SteadyStateOptions) -> Result<SteadyStateReport<T>> {
    let liouvillian = build_liouvillian(model)?;
    let structure = model.structure();
    let n = structure.total_dim();
    let weights = vec![T::one(); n];

    let (vec_rho, method) = solve_augmented(&liouvillian, &weights, opts)?;
    let rho = finish(&liouvillian, vec_rho, opts.tol)?;

    if opts.check_uniqueness {
        let perturbed: Vec<T> = (0..n)
            .map(|i| T::one() + T::lit(0.25 * ((i + 1) as f64).sin()))
            .collect();
        let (other, _) = solve_augmented(&liouvillian, &perturbed, opts)?;
        let other = finish(&liouvillian, other, opts.tol)?;
        let gap = trace_distance_matrices(rho.matrix(), other.matrix());
        if gap > T::tol(1e-8) {
            return Err(Error::Singular(format!(
                "steady state depends on the normalization row (trace distance {:.3e})",
                gap.f64()
            )));
        }
    }

    let residual = residual_of(&liouvillian, rho.matrix());
    let cutoff_used = model
        .bosonic_sites()
        .iter()
        .map(|&s| structure.dims()[s])
        .collect();
    let leakage = leakage(&rho, model.bosonic_sites());
    Ok(SteadyStateReport {
        rho,
        residual,
        cutoff_used,
        leakage,
        method,
    })
}

/// Population in the top two Fock levels, maximized over `sites`.
pub fn leakage<T: Real>(rho: &DensityMatrix<T>, sites: &[usize]) -> T {
    let structure = rho.structure();
    let mut worst = T::zero();
    for &site in sites {
        let d = structure.dims()[site];
        let top = d.saturating_sub(2);
        let mut pop = T::zero();
        for i in 0..structure.total_dim() {
            if structure.digits(i)[site] >= top {
                pop += rho.matrix()[(i, i)].re;
            }
        }
        worst = worst.max(pop);
    }
    worst
}

fn solve_augmented<T: Real>(
    l: &Liouvillian<T>,
    weights: &[T],
    opts: &SteadyStateOptions,
) -> Result<(Vec<Complex<T>>, SolveMethod)> {
    let n = l.structure().total_dim();
    if n <= opts.dense_max_dim {
        return solve_dense(l, weights);
    }
    match solve_sparse(l, weights) {
        Ok(v) => Ok((v, SolveMethod::SparseLu)),
        Err(e) if n <= opts.dense_fallback_max_dim => {
            log::debug!("sparse steady-state solve failed ({e}); retrying dense");
            solve_dense(l, weights)
        }
        Err(e) => Err(e),
    }
}

/// Row 0 of the generator is replaced by `Σ_i w_i ρ_ii`; the right-hand side is `e_0`.
fn augmented_triplets<T: Real>(l: &Liouvillian<T>, weights: &[T]) -> Vec<(usize, usize, Complex<T>)> {
    let n = l.structure().total_dim();
    let mut triplets: Vec<_> = l.superop().iter().filter(|&(r, _, _)| r != 0).collect();
    triplets.extend(weights.iter().enumerate().map(|(i, &w)| (0, i * n + i, re(w))));
    triplets
}

fn solve_dense<T: Real>(l: &Liouvillian<T>, weights: &[T]) -> Result<(Vec<Complex<T>>, SolveMethod)> {
    let m = l.dim();
    let mut a = DMatrix::zeros(m, m);
    for (r, c, v) in augmented_triplets(l, weights) {
        a[(r, c)] += v;
    }
    let mut b = DVector::zeros(m);
    b[0] = re(T::one());
    if let Some(x) = a.lu().solve(&b) {
        if x.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Ok((x.as_slice().to_vec(), SolveMethod::DenseLu));
        }
    }
    log::debug!("augmented system singular; using the SVD null space");
    Ok((null_vector(l)?, SolveMethod::DenseNullSpace))
}

fn null_vector<T: Real>(l: &Liouvillian<T>) -> Result<Vec<Complex<T>>> {
    let svd = l.superop().to_dense().svd(false, true);
    let v_t = svd
        .v_t
        .ok_or_else(|| Error::Singular("SVD did not produce right singular vectors".into()))?;
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| {
        svd.singular_values[a]
            .partial_cmp(&svd.singular_values[b])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let largest = svd.singular_values.max();
    if order.len() > 1 && svd.singular_values[order[1]] <= T::tol(1e-10) * largest {
        return Err(Error::Singular("steady state is not unique".into()));
    }
    Ok(v_t.row(order[0]).iter().map(|z| z.conj()).collect())
}

/// Sparse LU on the real parametrization of Hermitian matrices.
///
/// `L` maps Hermitian matrices to Hermitian matrices, so it is solved on the
/// `n²` real coordinates `ρ_ii`, `Re ρ_ij`, `Im ρ_ij` (`i < j`) instead of the
/// `n²` complex entries. The trace condition takes the place of the `ρ_00`
/// equation.
fn solve_sparse<T: Real>(l: &Liouvillian<T>, weights: &[T]) -> Result<Vec<Complex<T>>> {
    let n = l.structure().total_dim();
    let m = l.dim();
    // Real coordinate of each upper-triangle entry; `im` only for i < j.
    let mut re_of = vec![usize::MAX; m];
    let mut next = 0;
    for c in 0..n {
        for r in 0..=c {
            re_of[c * n + r] = next;
            next += if r == c { 1 } else { 2 };
        }
    }
    let coord = |r: usize, c: usize| -> (usize, bool) {
        // (re index, conjugated)
        if r <= c {
            (re_of[c * n + r], false)
        } else {
            (re_of[r * n + c], true)
        }
    };

    let mut triplets: Vec<Triplet<usize, usize, T>> = Vec::with_capacity(2 * l.superop().nnz());
    for (row, col, v) in l.superop().iter() {
        let (ro, co) = (row % n, row / n);
        if ro > co || (ro == 0 && co == 0) {
            continue;
        }
        let out = re_of[row];
        let (ki, kj) = (col % n, col / n);
        let (x, conj) = coord(ki, kj);
        let diag_in = ki == kj;
        // v · ρ_kl with ρ_kl = x_re ± i x_im.
        let sign = if conj { -T::one() } else { T::one() };
        triplets.push(Triplet::new(out, x, v.re));
        if !diag_in {
            triplets.push(Triplet::new(out, x + 1, -v.im * sign));
        }
        if ro != co {
            triplets.push(Triplet::new(out + 1, x, v.im));
            if !diag_in {
                triplets.push(Triplet::new(out + 1, x + 1, v.re * sign));
            }
        }
    }
    for (i, &w) in weights.iter().enumerate() {
        triplets.push(Triplet::new(0, re_of[i * n + i], w));
    }

    let a = SparseColMat::<usize, T>::try_new_from_triplets(m, m, &triplets)
        .map_err(|e| Error::Singular(format!("sparse assembly failed: {e:?}")))?;
    let lu = a
        .sp_lu()
        .map_err(|e| Error::Singular(format!("sparse LU failed: {e}")))?;
    let mut rhs = faer::Mat::<T>::zeros(m, 1);
    rhs[(0, 0)] = T::one();
    lu.solve_in_place(rhs.as_mut());
    if (0..m).any(|i| !rhs[(i, 0)].is_finite()) {
        return Err(Error::Singular("sparse LU produced non-finite values".into()));
    }

    let mut out = vec![re(T::zero()); m];
    for c in 0..n {
        for r in 0..n {
            let (x, conj) = coord(r, c);
            out[c * n + r] = if r == c {
                re(rhs[(x, 0)])
            } else if conj {
                Complex::new(rhs[(x, 0)], -rhs[(x + 1, 0)])
            } else {
                Complex::new(rhs[(x, 0)], rhs[(x + 1, 0)])
            };
        }
    }
    Ok(out)
}

/// Hermitizes, normalizes and validates a raw null vector.
fn finish<T: Real>(l: &Liouvillian<T>, v: Vec<Complex<T>>, tol: f64) -> Result<DensityMatrix<T>> {
    let structure = l.structure();
    let n = structure.total_dim();
    let mut m = hermitize(&devectorize(&v, n));
    let tr = m.trace().re;
    if tr.abs() <= T::zero() || !tr.is_finite() {
        return Err(Error::Singular("null vector has zero trace".into()));
    }
    m.iter_mut().for_each(|z| *z /= re(tr));

    let lowest = hermitian_eigenvalues(&m).first().copied().unwrap_or_else(T::zero);
    if lowest < -T::tol(1e-8) {
        return Err(Error::NegativeSteadyState(lowest.f64()));
    }
    if lowest < -T::tol(1e-10) {
        m = project_psd(&m);
    }

    let residual = residual_of(l, &m);
    if !(residual <= T::tol(tol)) {
        return Err(Error::NotConverged {
            residual: residual.f64(),
            tol,
        });
    }
    Ok(DensityMatrix::new_unchecked(Operator::new(m, structure.clone())?))
}

fn residual_of<T: Real>(l: &Liouvillian<T>, m: &DMatrix<Complex<T>>) -> T {
    l.superop()
        .mul_vec(&vectorize(m))
        .iter()
        .fold(T::zero(), |acc, z| acc + z.norm_sqr())
        .sqrt()
}

/// Clips negative eigenvalues and renormalizes.
fn project_psd<T: Real>(m: &DMatrix<Complex<T>>) -> DMatrix<Complex<T>> {
    let eig = m.clone().symmetric_eigen();
    let clipped: Vec<T> = eig.eigenvalues.iter().map(|&x| x.max(T::zero())).collect();
    let total = clipped.iter().fold(T::zero(), |a, &b| a + b);
    let d = DMatrix::from_diagonal(&DVector::from_iterator(
        clipped.len(),
        clipped.iter().map(|&x| re(x / total)),
    ));
    let v = &eig.eigenvectors;
    hermitize(&(v * d * v.adjoint()))
}

pub(crate) fn trace_distance_matrices<T: Real>(a: &DMatrix<Complex<T>>, b: &DMatrix<Complex<T>>) -> T {
    let diff = hermitize(&(a - b));
    hermitian_eigenvalues(&diff)
        .iter()
        .fold(T::zero(), |acc, x| acc + x.abs())
        * T::lit(0.5)
}
