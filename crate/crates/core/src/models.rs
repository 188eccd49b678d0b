//! The two coupled-oscillator systems studied here, built as [`ModelSpec`]s.
//!
//! Frequencies and rates are plain numbers; the Van der Pol pair is usually
//! quoted in units of `kappa1`.
//!
//! The qubit energy enters as `ω σz` with the bare Pauli matrix, so the
//! qubit splitting is `2ω` while the cavity spacing is `ω`.

use serde::{Deserialize, Serialize};

use crate::dynamics::ModelSpec;
use crate::error::{Error, Result};
use crate::operators::{annihilation_op, embed, pauli, HilbertStructure, Operator, Pauli};
use crate::scalar::Real;

/// Two quantum Van der Pol oscillators with coherent (hopping) coupling.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VdpParams {
    pub omega1: f64,
    pub omega2: f64,
    pub g: f64,
    /// One-phonon gain rate.
    pub kappa1: f64,
    /// Two-phonon loss rate.
    pub kappa2: f64,
    /// Fock levels kept per mode.
    pub cutoff: usize,
}

impl Default for VdpParams {
    fn default() -> Self {
        Self {
            omega1: 0.0,
            omega2: 0.0,
            g: 0.0,
            kappa1: 1.0,
            kappa2: 100.0,
            cutoff: 6,
        }
    }
}

impl VdpParams {
    pub fn validate(&self) -> Result<()> {
        finite("omega1", self.omega1)?;
        finite("omega2", self.omega2)?;
        finite("g", self.g)?;
        positive("kappa1", self.kappa1)?;
        positive("kappa2", self.kappa2)?;
        min_cutoff(self.cutoff)
    }

    /// Starting cutoff for the automatic escalation: weak nonlinearity
    /// (`kappa2 < kappa1`) puts many phonons in each mode.
    pub fn default_cutoff(kappa1: f64, kappa2: f64) -> usize {
        if kappa2 / kappa1 < 1.0 {
            14
        } else {
            6
        }
    }
}

/// Two driven, lossy cavities, each holding a qubit, coupled by photon hopping.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CavityQubitParams {
    /// Cavity 1 and qubit 1 frequency.
    pub omega1: f64,
    /// Cavity 2 and qubit 2 frequency.
    pub omega2: f64,
    /// Inter-cavity hopping.
    pub g: f64,
    /// Qubit-field coupling.
    pub mu: f64,
    /// Drive amplitude on cavity 1.
    pub drive: f64,
    pub kappa: f64,
    /// Fock levels kept per cavity.
    pub cutoff: usize,
    /// Multiplies the `ω σz` qubit terms. `1` is the Hamiltonian as written;
    /// `0.5` makes each qubit resonant with its own cavity.
    #[serde(default = "one")]
    pub qubit_energy_factor: f64,
}

fn one() -> f64 {
    1.0
}

impl Default for CavityQubitParams {
    fn default() -> Self {
        Self {
            omega1: 10.0,
            omega2: 10.0,
            g: 0.5,
            mu: 1.0,
            drive: 3.0,
            kappa: 0.05,
            cutoff: 5,
            qubit_energy_factor: 1.0,
        }
    }
}

impl CavityQubitParams {
    pub fn validate(&self) -> Result<()> {
        finite("omega1", self.omega1)?;
        finite("omega2", self.omega2)?;
        finite("g", self.g)?;
        finite("mu", self.mu)?;
        finite("drive", self.drive)?;
        finite("qubit_energy_factor", self.qubit_energy_factor)?;
        positive("kappa", self.kappa)?;
        min_cutoff(self.cutoff)
    }
}

/// Site order of the cavity-qubit model.
pub const CAVITY1: usize = 0;
pub const CAVITY2: usize = 1;
pub const QUBIT1: usize = 2;
pub const QUBIT2: usize = 3;

/// `H = ω1 a1†a1 + ω2 a2†a2 + g(a1†a2 + a2†a1)`, collapse terms
/// `(a_i†, κ1)` and `(a_i², κ2)` on both modes.
pub fn build_vdp_pair<T: Real>(p: &VdpParams) -> Result<ModelSpec<T>> {
    p.validate()?;
    let s = HilbertStructure::new(vec![p.cutoff, p.cutoff])?;
    let a = annihilation_op::<T>(p.cutoff)?;
    let a1 = embed(&a, 0, &s)?;
    let a2 = embed(&a, 1, &s)?;
    let (a1d, a2d) = (a1.adjoint(), a2.adjoint());
    let h = &(&(&a1d * &a1).scale_real(T::lit(p.omega1)) + &(&a2d * &a2).scale_real(T::lit(p.omega2)))
        + &(&(&a1d * &a2) + &(&a2d * &a1)).scale_real(T::lit(p.g));
    let (k1, k2) = (T::lit(p.kappa1), T::lit(p.kappa2));
    let collapse = vec![
        (a1d.clone(), k1),
        (&a1 * &a1, k2),
        (a2d.clone(), k1),
        (&a2 * &a2, k2),
    ];
    ModelSpec::new(h, collapse)?.with_bosonic_sites(&[0, 1])
}

/// Cavity-qubit pair on sites `(cavity1, cavity2, qubit1, qubit2)`:
///
/// ```text
/// H = ω1 a1†a1 + ω2 a2†a2 + ω1 σz1 + ω2 σz2 + E(a1 + a1†)
///   + g(a1†a2 + a2†a1) + μ(a1 + a1†)σx1 + μ(a2 + a2†)σx2
/// ```
///
/// with cavity losses `(a1, κ)`, `(a2, κ)` and no qubit decoherence. The
/// `σz` terms are scaled by `qubit_energy_factor`.
pub fn build_cavity_qubit_pair<T: Real>(p: &CavityQubitParams) -> Result<ModelSpec<T>> {
    p.validate()?;
    let s = HilbertStructure::new(vec![p.cutoff, p.cutoff, 2, 2])?;
    let a = annihilation_op::<T>(p.cutoff)?;
    let a1 = embed(&a, CAVITY1, &s)?;
    let a2 = embed(&a, CAVITY2, &s)?;
    let sz1 = embed(&pauli(Pauli::Z), QUBIT1, &s)?;
    let sz2 = embed(&pauli(Pauli::Z), QUBIT2, &s)?;
    let sx1 = embed(&pauli(Pauli::X), QUBIT1, &s)?;
    let sx2 = embed(&pauli(Pauli::X), QUBIT2, &s)?;
    let (a1d, a2d) = (a1.adjoint(), a2.adjoint());
    let x1 = &a1 + &a1d;
    let x2 = &a2 + &a2d;
    let (w1, w2) = (T::lit(p.omega1), T::lit(p.omega2));

    let terms: [Operator<T>; 6] = [
        (&a1d * &a1).scale_real(w1) + (&a2d * &a2).scale_real(w2),
        (sz1.scale_real(w1) + sz2.scale_real(w2)).scale_real(T::lit(p.qubit_energy_factor)),
        x1.scale_real(T::lit(p.drive)),
        (&(&a1d * &a2) + &(&a2d * &a1)).scale_real(T::lit(p.g)),
        (&x1 * &sx1).scale_real(T::lit(p.mu)),
        (&x2 * &sx2).scale_real(T::lit(p.mu)),
    ];
    let h = terms.into_iter().reduce(|acc, t| acc + t).expect("non-empty");
    let kappa = T::lit(p.kappa);
    ModelSpec::new(h, vec![(a1, kappa), (a2, kappa)])?.with_bosonic_sites(&[CAVITY1, CAVITY2])
}

/// Single driven damped cavity, `H = ω a†a + E(a + a†)` with loss `(a, κ)`.
pub fn build_driven_cavity<T: Real>(omega: f64, drive: f64, kappa: f64, cutoff: usize) -> Result<ModelSpec<T>> {
    finite("omega", omega)?;
    finite("drive", drive)?;
    positive("kappa", kappa)?;
    min_cutoff(cutoff)?;
    let a = annihilation_op::<T>(cutoff)?;
    let h = (&a.adjoint() * &a).scale_real(T::lit(omega)) + (&a + &a.adjoint()).scale_real(T::lit(drive));
    ModelSpec::new(h, vec![(a, T::lit(kappa))])?.with_bosonic_sites(&[0])
}

fn finite(name: &str, x: f64) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidModel(format!("{name} must be finite, got {x}")))
    }
}

fn positive(name: &str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidModel(format!("{name} must be positive, got {x}")))
    }
}

fn min_cutoff(cutoff: usize) -> Result<()> {
    if cutoff >= 3 {
        Ok(())
    } else {
        Err(Error::InvalidModel(format!("cutoff must be at least 3, got {cutoff}")))
    }
}
