//! Lindblad master equations: model definition, Liouvillian assembly,
//! steady states and time evolution.
//!
//! The generator is
//!
//! ```text
//! dρ/dt = -i[H, ρ] + Σ_k γ_k (2 L_k ρ L_k† - L_k†L_k ρ - ρ L_k†L_k)
//! ```
//!
//! so a collapse term listed with rate `γ` drives populations at `2γ`.

mod cutoff;
mod evolve;
mod liouvillian;
mod steady;

pub use cutoff::{auto_cutoff, AutoCutoffOptions, CutoffOutcome};
pub use evolve::{evolve_with, time_evolve, EvolveOptions, EvolveStats, TimeSeries};
pub use liouvillian::{
    build_liouvillian, devectorize, dissipator_superop, hamiltonian_superop, vectorize, Liouvillian,
};
pub use steady::{leakage, steady_state, SolveMethod, SteadyStateOptions, SteadyStateReport};

use crate::error::{Error, Result};
use crate::operators::{HilbertStructure, Operator};
use crate::scalar::Real;

#[derive(Clone, Debug, PartialEq)]
pub struct CollapseTerm<T: Real> {
    pub operator: Operator<T>,
    pub rate: T,
}

/// Hamiltonian plus weighted collapse operators on one composite space.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelSpec<T: Real> {
    hamiltonian: Operator<T>,
    collapse_terms: Vec<CollapseTerm<T>>,
    bosonic_sites: Vec<usize>,
}

impl<T: Real> ModelSpec<T> {
    pub fn new(hamiltonian: Operator<T>, collapse_terms: Vec<(Operator<T>, T)>) -> Result<Self> {
        let model = Self {
            hamiltonian,
            collapse_terms: collapse_terms
                .into_iter()
                .map(|(operator, rate)| CollapseTerm { operator, rate })
                .collect(),
            bosonic_sites: Vec::new(),
        };
        model.validate()?;
        Ok(model)
    }

    /// Marks Fock-truncated sites; they are monitored for population leakage.
    pub fn with_bosonic_sites(mut self, sites: &[usize]) -> Result<Self> {
        self.bosonic_sites = self.structure().normalize_sites(sites)?;
        Ok(self)
    }

    pub fn hamiltonian(&self) -> &Operator<T> {
        &self.hamiltonian
    }

    pub fn collapse_terms(&self) -> &[CollapseTerm<T>] {
        &self.collapse_terms
    }

    pub fn bosonic_sites(&self) -> &[usize] {
        &self.bosonic_sites
    }

    pub fn structure(&self) -> &HilbertStructure {
        self.hamiltonian.structure()
    }

    /// Same model with `H → H + shift·I`.
    pub fn with_energy_shift(&self, shift: T) -> Self {
        let id = Operator::identity(self.structure()).scale_real(shift);
        Self {
            hamiltonian: &self.hamiltonian + &id,
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.hamiltonian.is_hermitian(T::tol(1e-12)) {
            return Err(Error::InvalidModel(format!(
                "Hamiltonian is not Hermitian (defect {:.3e})",
                self.hamiltonian.hermiticity_defect().f64()
            )));
        }
        for (k, term) in self.collapse_terms.iter().enumerate() {
            if !(term.rate >= T::zero()) || !term.rate.is_finite() {
                return Err(Error::InvalidModel(format!(
                    "collapse term {k} has rate {}",
                    term.rate.f64()
                )));
            }
            if term.operator.structure() != self.structure() {
                return Err(Error::InvalidModel(format!(
                    "collapse term {k} acts on {:?}, Hamiltonian on {:?}",
                    term.operator.structure().dims(),
                    self.structure().dims()
                )));
            }
        }
        Ok(())
    }
}
