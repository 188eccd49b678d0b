//! Operators on tensor-product Hilbert spaces.
//!
//! Composite indices follow the Kronecker convention: for sites with local
//! dimensions `[d0, d1, ..., dn]` the flat index of `|i0 i1 ... in>` is
//! `i0 * (d1 * ... * dn) + ... + in`, so site 0 is the most significant
//! digit. Every routine addresses subsystems by site index.

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{Complex, ComplexField, DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{cplx, re, Real};

/// Ordered local dimensions of a composite Hilbert space.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HilbertStructure {
    dims: Vec<usize>,
}

impl HilbertStructure {
    pub fn new(dims: impl Into<Vec<usize>>) -> Result<Self> {
        let dims = dims.into();
        if dims.is_empty() {
            return Err(Error::InvalidArgument("a Hilbert space needs at least one site".into()));
        }
        if let Some((site, d)) = dims.iter().enumerate().find(|(_, &d)| d < 2) {
            return Err(Error::InvalidArgument(format!(
                "site {site} has dimension {d}, at least 2 required"
            )));
        }
        Ok(Self { dims })
    }

    /// A single site of dimension `d`.
    pub fn single(d: usize) -> Result<Self> {
        Self::new(vec![d])
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn n_sites(&self) -> usize {
        self.dims.len()
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn dim(&self, site: usize) -> Result<usize> {
        self.dims.get(site).copied().ok_or(Error::SiteOutOfRange {
            site,
            sites: self.dims.len(),
        })
    }

    /// Structure of `self ⊗ other`.
    pub fn concat(&self, other: &HilbertStructure) -> HilbertStructure {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        HilbertStructure { dims }
    }

    /// Structure of the subsystem made of `sites` (kept in ascending order).
    pub fn subsystem(&self, sites: &[usize]) -> Result<HilbertStructure> {
        let sites = self.normalize_sites(sites)?;
        Ok(HilbertStructure {
            dims: sites.iter().map(|&s| self.dims[s]).collect(),
        })
    }

    /// Per-site digits of a flat index, site 0 first.
    pub fn digits(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.dims.len()];
        for (slot, &d) in out.iter_mut().zip(&self.dims).rev() {
            *slot = index % d;
            index /= d;
        }
        out
    }

    /// Sorts, deduplicates and range-checks a site set.
    pub(crate) fn normalize_sites(&self, sites: &[usize]) -> Result<Vec<usize>> {
        let mut out = sites.to_vec();
        out.sort_unstable();
        out.dedup();
        if let Some(&bad) = out.iter().find(|&&s| s >= self.dims.len()) {
            return Err(Error::SiteOutOfRange {
                site: bad,
                sites: self.dims.len(),
            });
        }
        Ok(out)
    }
}

/// A complex square matrix tagged with the composite space it acts on.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator<T: Real> {
    matrix: DMatrix<Complex<T>>,
    structure: HilbertStructure,
}

impl<T: Real> Operator<T> {
    pub fn new(matrix: DMatrix<Complex<T>>, structure: HilbertStructure) -> Result<Self> {
        let n = structure.total_dim();
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::DimensionMismatch(format!(
                "matrix is {}x{}, structure {:?} needs {n}x{n}",
                matrix.nrows(),
                matrix.ncols(),
                structure.dims()
            )));
        }
        Ok(Self { matrix, structure })
    }

    /// Wraps a square matrix as an operator on a single site.
    pub fn local(matrix: DMatrix<Complex<T>>) -> Result<Self> {
        let structure = HilbertStructure::single(matrix.nrows())?;
        Self::new(matrix, structure)
    }

    pub fn identity(structure: &HilbertStructure) -> Self {
        let n = structure.total_dim();
        Self {
            matrix: DMatrix::identity(n, n),
            structure: structure.clone(),
        }
    }

    pub fn zeros(structure: &HilbertStructure) -> Self {
        let n = structure.total_dim();
        Self {
            matrix: DMatrix::zeros(n, n),
            structure: structure.clone(),
        }
    }

    pub fn matrix(&self) -> &DMatrix<Complex<T>> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<Complex<T>> {
        self.matrix
    }

    pub fn structure(&self) -> &HilbertStructure {
        &self.structure
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn adjoint(&self) -> Self {
        Self {
            matrix: self.matrix.adjoint(),
            structure: self.structure.clone(),
        }
    }

    pub fn trace(&self) -> Complex<T> {
        self.matrix.trace()
    }

    pub fn scale(&self, factor: Complex<T>) -> Self {
        Self {
            matrix: self.matrix.map(|z| z * factor),
            structure: self.structure.clone(),
        }
    }

    pub fn scale_real(&self, factor: T) -> Self {
        self.scale(re(factor))
    }

    /// `[self, other]`.
    pub fn commutator(&self, other: &Self) -> Self {
        &(self * other) - &(other * self)
    }

    pub fn powi(&self, n: u32) -> Self {
        (0..n).fold(Self::identity(&self.structure), |acc, _| &acc * self)
    }

    pub fn max_abs(&self) -> T {
        max_abs(&self.matrix)
    }

    /// Largest element of `|A - A†|`.
    pub fn hermiticity_defect(&self) -> T {
        hermiticity_defect(&self.matrix)
    }

    /// Hermitian up to `rel_tol` relative to the largest element.
    pub fn is_hermitian(&self, rel_tol: T) -> bool {
        self.hermiticity_defect() <= rel_tol * self.max_abs().max(T::one())
    }

    /// `Tr(O ρ)`.
    pub fn expect(&self, rho: &DensityMatrix<T>) -> Complex<T> {
        trace_of_product(&self.matrix, rho.matrix())
    }

    /// Reduced operator on `keep` obtained by tracing out the other sites.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<Self> {
        let (matrix, structure) = partial_trace_matrix(&self.matrix, &self.structure, keep)?;
        Ok(Self { matrix, structure })
    }

    fn assert_same_space(&self, other: &Self, what: &str) {
        assert_eq!(
            self.structure, other.structure,
            "{what} of operators on different spaces"
        );
    }
}

impl<T: Real> Add for &Operator<T> {
    type Output = Operator<T>;

    fn add(self, rhs: &Operator<T>) -> Operator<T> {
        self.assert_same_space(rhs, "sum");
        Operator {
            matrix: &self.matrix + &rhs.matrix,
            structure: self.structure.clone(),
        }
    }
}

impl<T: Real> Sub for &Operator<T> {
    type Output = Operator<T>;

    fn sub(self, rhs: &Operator<T>) -> Operator<T> {
        self.assert_same_space(rhs, "difference");
        Operator {
            matrix: &self.matrix - &rhs.matrix,
            structure: self.structure.clone(),
        }
    }
}

impl<T: Real> Mul for &Operator<T> {
    type Output = Operator<T>;

    fn mul(self, rhs: &Operator<T>) -> Operator<T> {
        self.assert_same_space(rhs, "product");
        Operator {
            matrix: &self.matrix * &rhs.matrix,
            structure: self.structure.clone(),
        }
    }
}

impl<T: Real> Neg for &Operator<T> {
    type Output = Operator<T>;

    fn neg(self) -> Operator<T> {
        Operator {
            matrix: -&self.matrix,
            structure: self.structure.clone(),
        }
    }
}

impl<T: Real> Add for Operator<T> {
    type Output = Operator<T>;

    fn add(self, rhs: Operator<T>) -> Operator<T> {
        &self + &rhs
    }
}

impl<T: Real> Sub for Operator<T> {
    type Output = Operator<T>;

    fn sub(self, rhs: Operator<T>) -> Operator<T> {
        &self - &rhs
    }
}

impl<T: Real> Mul for Operator<T> {
    type Output = Operator<T>;

    fn mul(self, rhs: Operator<T>) -> Operator<T> {
        &self * &rhs
    }
}

/// Hermitian, positive semidefinite, unit-trace operator.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix<T: Real> {
    op: Operator<T>,
}

impl<T: Real> DensityMatrix<T> {
    /// Validates Hermiticity (1e-12 relative), unit trace (1e-10) and
    /// positivity (smallest eigenvalue >= -1e-10).
    pub fn new(op: Operator<T>) -> Result<Self> {
        let rho = Self { op };
        rho.validate()?;
        Ok(rho)
    }

    pub(crate) fn new_unchecked(op: Operator<T>) -> Self {
        Self { op }
    }

    pub fn from_matrix(matrix: DMatrix<Complex<T>>, structure: HilbertStructure) -> Result<Self> {
        Self::new(Operator::new(matrix, structure)?)
    }

    /// `|ψ><ψ|` for a ket, normalized first.
    pub fn from_ket(ket: &DVector<Complex<T>>, structure: HilbertStructure) -> Result<Self> {
        let norm = ket.norm();
        if norm <= T::zero() {
            return Err(Error::InvalidState("zero ket".into()));
        }
        let ket = ket.unscale(norm);
        Self::new(Operator::new(&ket * ket.adjoint(), structure)?)
    }

    /// Product basis state `|n0, n1, ...>`.
    pub fn basis(structure: HilbertStructure, levels: &[usize]) -> Result<Self> {
        if levels.len() != structure.n_sites() {
            return Err(Error::DimensionMismatch(format!(
                "{} levels for {} sites",
                levels.len(),
                structure.n_sites()
            )));
        }
        let mut index = 0;
        for (&n, &d) in levels.iter().zip(structure.dims()) {
            if n >= d {
                return Err(Error::InvalidArgument(format!("level {n} outside dimension {d}")));
            }
            index = index * d + n;
        }
        let dim = structure.total_dim();
        let mut m = DMatrix::zeros(dim, dim);
        m[(index, index)] = Complex::new(T::one(), T::zero());
        Ok(Self::new_unchecked(Operator::new(m, structure)?))
    }

    pub fn maximally_mixed(structure: HilbertStructure) -> Self {
        let n = structure.total_dim();
        let m = DMatrix::identity(n, n).map(|z: Complex<T>| z / re(T::lit(n as f64)));
        Self::new_unchecked(Operator { matrix: m, structure })
    }

    /// `ρ_0 ⊗ ρ_1 ⊗ ...`.
    pub fn product(states: &[DensityMatrix<T>]) -> Result<Self> {
        let (first, rest) = states
            .split_first()
            .ok_or_else(|| Error::InvalidArgument("empty product".into()))?;
        let op = rest
            .iter()
            .fold(first.op.clone(), |acc, s| tensor_product(&acc, &s.op));
        Ok(Self::new_unchecked(op))
    }

    pub fn op(&self) -> &Operator<T> {
        &self.op
    }

    pub fn into_op(self) -> Operator<T> {
        self.op
    }

    pub fn matrix(&self) -> &DMatrix<Complex<T>> {
        &self.op.matrix
    }

    pub fn structure(&self) -> &HilbertStructure {
        &self.op.structure
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<T> {
        hermitian_eigenvalues(&self.op.matrix)
    }

    pub fn purity(&self) -> T {
        trace_of_product(&self.op.matrix, &self.op.matrix).re
    }

    pub fn validate(&self) -> Result<()> {
        let m = &self.op.matrix;
        let defect = hermiticity_defect(m);
        let scale = max_abs(m);
        if defect > T::tol(1e-12) * scale {
            return Err(Error::InvalidState(format!(
                "not Hermitian: defect {:.3e}",
                defect.f64()
            )));
        }
        let tr = m.trace();
        if (tr - re(T::one())).modulus() > T::tol(1e-10) {
            return Err(Error::InvalidState(format!(
                "trace {:.12} differs from 1",
                tr.re.f64()
            )));
        }
        let lowest = self.eigenvalues().first().copied().unwrap_or_else(T::zero);
        if lowest < -T::tol(1e-10) {
            return Err(Error::InvalidState(format!(
                "negative eigenvalue {:.3e}",
                lowest.f64()
            )));
        }
        Ok(())
    }
}

/// Truncated bosonic annihilation operator, `<n-1|a|n> = sqrt(n)`.
pub fn annihilation_op<T: Real>(d: usize) -> Result<Operator<T>> {
    if d < 2 {
        return Err(Error::InvalidArgument(format!(
            "Fock cutoff {d} is below the minimum of 2"
        )));
    }
    let mut m = DMatrix::zeros(d, d);
    for n in 1..d {
        m[(n - 1, n)] = re(T::lit(n as f64).sqrt());
    }
    Operator::local(m)
}

/// `a†a` on a truncated Fock space.
pub fn number_op<T: Real>(d: usize) -> Result<Operator<T>> {
    let structure = HilbertStructure::single(d)?;
    let matrix = DMatrix::from_fn(d, d, |i, j| if i == j { re(T::lit(i as f64)) } else { re(T::zero()) });
    Operator::new(matrix, structure)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Pauli {
    X,
    Y,
    Z,
    /// `σ+ = (σx + iσy)/2 = |0><1|`.
    Plus,
    /// `σ- = (σx - iσy)/2 = |1><0|`.
    Minus,
    Identity,
}

/// Qubit operators in the basis where `σz = diag(1, -1)`.
pub fn pauli<T: Real>(which: Pauli) -> Operator<T> {
    let z = cplx::<T>(0.0, 0.0);
    let one = cplx::<T>(1.0, 0.0);
    let i = cplx::<T>(0.0, 1.0);
    let entries = match which {
        Pauli::X => [z, one, one, z],
        Pauli::Y => [z, -i, i, z],
        Pauli::Z => [one, z, z, -one],
        Pauli::Plus => [z, one, z, z],
        Pauli::Minus => [z, z, one, z],
        Pauli::Identity => [one, z, z, one],
    };
    Operator {
        matrix: DMatrix::from_row_slice(2, 2, &entries),
        structure: HilbertStructure { dims: vec![2] },
    }
}

/// Lifts a local operator to `I ⊗ ... ⊗ local ⊗ ... ⊗ I` with `local` at `site`.
pub fn embed<T: Real>(
    local: &Operator<T>,
    site: usize,
    structure: &HilbertStructure,
) -> Result<Operator<T>> {
    let d = structure.dim(site)?;
    if local.dim() != d {
        return Err(Error::DimensionMismatch(format!(
            "local operator of side {} placed on site {site} of dimension {d}",
            local.dim()
        )));
    }
    let left: usize = structure.dims()[..site].iter().product();
    let right: usize = structure.dims()[site + 1..].iter().product();
    let mut m = local.matrix.clone();
    if right > 1 {
        m = m.kronecker(&DMatrix::identity(right, right));
    }
    if left > 1 {
        m = DMatrix::<Complex<T>>::identity(left, left).kronecker(&m);
    }
    Operator::new(m, structure.clone())
}

/// Kronecker product; the result's sites are `a`'s followed by `b`'s.
pub fn tensor_product<T: Real>(a: &Operator<T>, b: &Operator<T>) -> Operator<T> {
    Operator {
        matrix: a.matrix.kronecker(&b.matrix),
        structure: a.structure.concat(&b.structure),
    }
}

/// Reduced density matrix on the sites in `keep`.
pub fn partial_trace<T: Real>(rho: &DensityMatrix<T>, keep: &[usize]) -> Result<DensityMatrix<T>> {
    Ok(DensityMatrix::new_unchecked(rho.op.partial_trace(keep)?))
}

/// Dimensionless quadratures `q = (a + a†)/√2`, `p = i(a† - a)/√2` of a
/// bosonic site, embedded in the composite space.
pub fn quadratures<T: Real>(
    site: usize,
    structure: &HilbertStructure,
) -> Result<(Operator<T>, Operator<T>)> {
    let a = embed(&annihilation_op::<T>(structure.dim(site)?)?, site, structure)?;
    let ad = a.adjoint();
    let inv_sqrt2 = T::lit(std::f64::consts::FRAC_1_SQRT_2);
    let q = (&a + &ad).scale_real(inv_sqrt2);
    let p = (&ad - &a).scale(Complex::new(T::zero(), inv_sqrt2));
    Ok((q, p))
}

pub(crate) fn partial_trace_matrix<T: Real>(
    m: &DMatrix<Complex<T>>,
    structure: &HilbertStructure,
    keep: &[usize],
) -> Result<(DMatrix<Complex<T>>, HilbertStructure)> {
    let keep = structure.normalize_sites(keep)?;
    if keep.is_empty() {
        return Err(Error::InvalidArgument("partial trace must keep at least one site".into()));
    }
    let kept = structure.subsystem(&keep)?;
    let kept_dim = kept.total_dim();
    let traced_dim = structure.total_dim() / kept_dim;

    // Bucket every flat index by its traced-out digits.
    let mut buckets: Vec<Vec<(usize, usize)>> = vec![Vec::with_capacity(kept_dim); traced_dim];
    for full in 0..structure.total_dim() {
        let digits = structure.digits(full);
        let (mut k, mut t) = (0, 0);
        for (site, (&digit, &d)) in digits.iter().zip(structure.dims()).enumerate() {
            if keep.binary_search(&site).is_ok() {
                k = k * d + digit;
            } else {
                t = t * d + digit;
            }
        }
        buckets[t].push((full, k));
    }

    let mut out = DMatrix::zeros(kept_dim, kept_dim);
    for bucket in &buckets {
        for &(c, kc) in bucket {
            for &(r, kr) in bucket {
                out[(kr, kc)] += m[(r, c)];
            }
        }
    }
    Ok((out, kept))
}

/// Transposes the digits of `sites` between row and column indices.
pub(crate) fn partial_transpose_matrix<T: Real>(
    m: &DMatrix<Complex<T>>,
    structure: &HilbertStructure,
    sites: &[usize],
) -> Result<DMatrix<Complex<T>>> {
    let sites = structure.normalize_sites(sites)?;
    let n = structure.total_dim();
    let digits: Vec<Vec<usize>> = (0..n).map(|i| structure.digits(i)).collect();
    let flat = |ds: &[usize]| ds.iter().zip(structure.dims()).fold(0, |acc, (&x, &d)| acc * d + x);
    let mut out = DMatrix::zeros(n, n);
    let mut row = vec![0; structure.n_sites()];
    let mut col = vec![0; structure.n_sites()];
    for r in 0..n {
        for c in 0..n {
            row.copy_from_slice(&digits[r]);
            col.copy_from_slice(&digits[c]);
            for &s in &sites {
                std::mem::swap(&mut row[s], &mut col[s]);
            }
            out[(flat(&row), flat(&col))] = m[(r, c)];
        }
    }
    Ok(out)
}

pub(crate) fn hermitian_eigenvalues<T: Real>(m: &DMatrix<Complex<T>>) -> Vec<T> {
    let mut values: Vec<T> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    values.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    values
}

pub(crate) fn hermiticity_defect<T: Real>(m: &DMatrix<Complex<T>>) -> T {
    let n = m.nrows();
    let mut worst = T::zero();
    for c in 0..n {
        for r in 0..=c {
            worst = worst.max((m[(r, c)] - m[(c, r)].conj()).modulus());
        }
    }
    worst
}

pub(crate) fn max_abs<T: Real>(m: &DMatrix<Complex<T>>) -> T {
    m.iter().fold(T::zero(), |acc, z| acc.max(z.modulus()))
}

/// `Tr(A B)` without forming the product.
pub(crate) fn trace_of_product<T: Real>(a: &DMatrix<Complex<T>>, b: &DMatrix<Complex<T>>) -> Complex<T> {
    let n = a.nrows();
    let mut acc = Complex::new(T::zero(), T::zero());
    for j in 0..n {
        for i in 0..n {
            acc += a[(i, j)] * b[(j, i)];
        }
    }
    acc
}

/// `(M + M†)/2`.
pub(crate) fn hermitize<T: Real>(m: &DMatrix<Complex<T>>) -> DMatrix<Complex<T>> {
    let half = re(T::lit(0.5));
    (m + m.adjoint()).map(|z| z * half)
}
