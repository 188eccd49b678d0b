use std::f64::consts::{PI, TAU};

use nalgebra::{Complex, DMatrix};
use serde::{Deserialize, Serialize};

use super::{mutual_information, negativity};
use crate::error::{Error, Result};
use crate::operators::{DensityMatrix, Operator};
use crate::scalar::Real;

const GRID: usize = 64;
const SIMPLEX_TOL: f64 = 1e-6;
const MAX_ITER: usize = 5000;
const MIN_PROB: f64 = 1e-12;

/// Orthogonal projective qubit measurement along the Bloch direction
/// `(sinθ cosφ, sinθ sinφ, cosθ)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasurementBasis {
    pub theta: f64,
    pub phi: f64,
}

impl MeasurementBasis {
    /// Folds arbitrary angles into `θ ∈ [0, π]`, `φ ∈ [0, 2π)`.
    pub fn new(theta: f64, phi: f64) -> Self {
        let mut theta = theta.rem_euclid(TAU);
        let mut phi = phi;
        if theta > PI {
            theta = TAU - theta;
            phi += PI;
        }
        Self {
            theta,
            phi: phi.rem_euclid(TAU),
        }
    }

    pub fn direction(&self) -> [f64; 3] {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [st * cp, st * sp, ct]
    }

    /// `Π± = (I ± n·σ)/2`.
    pub fn projectors<T: Real>(&self) -> [Operator<T>; 2] {
        let [x, y, z] = self.direction();
        let proj = |s: f64| {
            let m = DMatrix::from_row_slice(
                2,
                2,
                &[
                    Complex::new(0.5 * (1.0 + s * z), 0.0),
                    Complex::new(0.5 * s * x, -0.5 * s * y),
                    Complex::new(0.5 * s * x, 0.5 * s * y),
                    Complex::new(0.5 * (1.0 - s * z), 0.0),
                ],
            )
            .map(|c| Complex::new(T::lit(c.re), T::lit(c.im)));
            Operator::local(m).expect("2x2 projector")
        };
        [proj(1.0), proj(-1.0)]
    }
}

/// Which qubit is measured.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    A,
    B,
}

/// Correlations of a two-qubit state, all in nats.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrelationBundle<T> {
    pub mutual_info: T,
    pub classical: T,
    pub discord: T,
    pub negativity: T,
    pub basis_at_optimum: MeasurementBasis,
}

/// Maximum over projective measurements on `side` of the entropy reduction
/// of the other qubit,
///
/// ```text
/// S(ρ_B) - Σ_a p_a S(ρ_B|a)
/// ```
///
/// searched on a 64×64 angle grid and refined by Nelder–Mead.
pub fn classical_correlations<T: Real>(rho: &DensityMatrix<T>, side: Side) -> Result<(T, MeasurementBasis)> {
    let blocks = Blocks::new(rho, side)?;
    let mut best = (f64::NEG_INFINITY, 0.0, 0.0);
    for i in 0..GRID {
        let theta = PI * i as f64 / (GRID - 1) as f64;
        for j in 0..GRID {
            let phi = TAU * j as f64 / GRID as f64;
            let v = blocks.objective(theta, phi);
            if v > best.0 {
                best = (v, theta, phi);
            }
        }
    }
    let step = PI / (GRID - 1) as f64;
    let (v, theta, phi) = nelder_mead(|x| -blocks.objective(x[0], x[1]), [best.1, best.2], step);
    let (value, theta, phi) = if -v > best.0 { (-v, theta, phi) } else { best };
    Ok((T::lit(value), MeasurementBasis::new(theta, phi)))
}

/// Mutual information, classical correlations, their difference (discord)
/// and negativity of a two-qubit state.
pub fn discord<T: Real>(rho: &DensityMatrix<T>, side: Side) -> Result<CorrelationBundle<T>> {
    let (classical, basis) = classical_correlations(rho, side)?;
    let mutual_info = mutual_information(rho, &[0], &[1])?;
    Ok(CorrelationBundle {
        mutual_info,
        classical,
        discord: mutual_info - classical,
        negativity: negativity(rho, &[0], &[1])?,
        basis_at_optimum: basis,
    })
}

/// The 2×2 blocks `ρ[(i,·),(j,·)]` of a two-qubit state with the measured
/// qubit first.
struct Blocks {
    b: [[[Complex<f64>; 4]; 2]; 2],
    entropy_unmeasured: f64,
}

impl Blocks {
    fn new<T: Real>(rho: &DensityMatrix<T>, side: Side) -> Result<Self> {
        if rho.structure().dims() != [2, 2] {
            return Err(Error::InvalidArgument(format!(
                "classical correlations need two qubits, got dims {:?}",
                rho.structure().dims()
            )));
        }
        let m = rho.matrix();
        let at = |r: usize, c: usize| {
            let z = m[(r, c)];
            Complex::new(z.re.f64(), z.im.f64())
        };
        // Flat index of (measured, other).
        let idx = |mq: usize, o: usize| match side {
            Side::A => 2 * mq + o,
            Side::B => 2 * o + mq,
        };
        let mut b = [[[Complex::new(0.0, 0.0); 4]; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                for r in 0..2 {
                    for c in 0..2 {
                        b[i][j][2 * r + c] = at(idx(i, r), idx(j, c));
                    }
                }
            }
        }
        let reduced = add(b[0][0], b[1][1]);
        Ok(Self {
            entropy_unmeasured: entropy2(reduced),
            b,
        })
    }

    /// `S(ρ_B) - Σ_a p_a S(ρ_B|a)` for the basis `(θ, φ)`.
    fn objective(&self, theta: f64, phi: f64) -> f64 {
        let [x, y, z] = MeasurementBasis { theta, phi }.direction();
        let mut conditional = 0.0;
        for s in [1.0, -1.0] {
            // Π = (I + s n·σ)/2; Tr_A[(Π⊗I)ρ] = Σ_ij Π_ji ρ_ij.
            let p = [
                [Complex::new(0.5 * (1.0 + s * z), 0.0), Complex::new(0.5 * s * x, -0.5 * s * y)],
                [Complex::new(0.5 * s * x, 0.5 * s * y), Complex::new(0.5 * (1.0 - s * z), 0.0)],
            ];
            let mut m = [Complex::new(0.0, 0.0); 4];
            for i in 0..2 {
                for j in 0..2 {
                    let w = p[j][i];
                    for k in 0..4 {
                        m[k] += w * self.b[i][j][k];
                    }
                }
            }
            let prob = m[0].re + m[3].re;
            if prob < MIN_PROB {
                continue;
            }
            let scaled = m.map(|v| v / prob);
            conditional += prob * entropy2(scaled);
        }
        self.entropy_unmeasured - conditional
    }
}

fn add(a: [Complex<f64>; 4], b: [Complex<f64>; 4]) -> [Complex<f64>; 4] {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]]
}

/// Entropy of a 2×2 Hermitian unit-trace matrix `[a b; b* d]` from its
/// closed-form eigenvalues.
fn entropy2(m: [Complex<f64>; 4]) -> f64 {
    let (a, d) = (m[0].re, m[3].re);
    let half = 0.5 * (a + d);
    let r = (0.25 * (a - d).powi(2) + m[1].norm_sqr()).sqrt();
    [half + r, half - r]
        .into_iter()
        .filter(|&x| x > 1e-10)
        .map(|x| -x.min(1.0) * x.min(1.0).ln())
        .sum()
}

/// Minimizes `f` from `start` with an initial simplex of edge `step`;
/// returns `(f_min, x0, x1)`.
fn nelder_mead(f: impl Fn([f64; 2]) -> f64, start: [f64; 2], step: f64) -> (f64, f64, f64) {
    let mut pts = [start, [start[0] + step, start[1]], [start[0], start[1] + step]];
    let mut vals = pts.map(&f);
    for _ in 0..MAX_ITER {
        let mut order = [0, 1, 2];
        order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
        pts = order.map(|i| pts[i]);
        vals = order.map(|i| vals[i]);
        let diameter = (0..3)
            .flat_map(|i| (0..3).map(move |j| (i, j)))
            .map(|(i, j)| ((pts[i][0] - pts[j][0]).powi(2) + (pts[i][1] - pts[j][1]).powi(2)).sqrt())
            .fold(0.0, f64::max);
        if diameter < SIMPLEX_TOL {
            break;
        }
        let centroid = [(pts[0][0] + pts[1][0]) / 2.0, (pts[0][1] + pts[1][1]) / 2.0];
        let along = |t: f64| {
            [
                centroid[0] + t * (pts[2][0] - centroid[0]),
                centroid[1] + t * (pts[2][1] - centroid[1]),
            ]
        };
        let reflected = along(-1.0);
        let fr = f(reflected);
        if fr < vals[0] {
            let expanded = along(-2.0);
            let fe = f(expanded);
            (pts[2], vals[2]) = if fe < fr { (expanded, fe) } else { (reflected, fr) };
        } else if fr < vals[1] {
            (pts[2], vals[2]) = (reflected, fr);
        } else {
            let contracted = if fr < vals[2] { along(-0.5) } else { along(0.5) };
            let fc = f(contracted);
            if fc < vals[2].min(fr) {
                (pts[2], vals[2]) = (contracted, fc);
            } else {
                for i in 1..3 {
                    pts[i] = [
                        pts[0][0] + 0.5 * (pts[i][0] - pts[0][0]),
                        pts[0][1] + 0.5 * (pts[i][1] - pts[0][1]),
                    ];
                    vals[i] = f(pts[i]);
                }
            }
        }
    }
    let best = (0..3).min_by(|&a, &b| vals[a].total_cmp(&vals[b])).unwrap_or(0);
    (vals[best], pts[best][0], pts[best][1])
}
