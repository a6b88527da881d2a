//! The cubic Dirac operator on `V_λ ⊗ S`, its gauge family, spectra, kernels and equivariance.
//!
//! On `V_λ ⊗ S` the enveloping factor is even: `ρ(e_ij) ⊗ Id` commutes with `Id ⊗ γ_kl`.

pub mod build;
pub mod equivariance;
pub mod gauge;
pub mod kernel;
pub mod operator;
pub mod spectrum;
pub mod verify;

pub use build::{
    build_dirac, casimir, casimir_vacuum_value, couple, dirac_square_closed_form, gamma_field, gamma_operator, t_apply,
    t_operator, Casimir, ClosedFormConvention,
};
pub use equivariance::{
    check_equivariance, exp_action, rep_exponential, rep_generator, verify_ktheory_conditions, EquivarianceResiduals,
    KTheoryPoint, KTheoryReport,
};
pub use gauge::{gauge_act, gauge_diagonalize, isotropy, GaugeDiagonalization, GaugeField, IsotropyReport};
pub use kernel::{kernel, KernelOptions, KernelReport, WeightBlock};
pub use operator::{KronTerm, WeilOperator};
pub use spectrum::{
    compare_multisets, predicted_spectrum, spectrum, PredictedLevel, PredictedSpectrum, SpectrumOptions, SpectrumReport,
};
pub use verify::{check_dirac, CheckMode};

use crate::hwmodule::{build_module, HwModule, Weight};
use crate::liealg::Truncation;
use crate::spinrep::{vacuum_sector_basis, ModeTable, SpinModule};
use crate::{re, Error, Result, C64};

/// Largest total dimension accepted for `V_λ ⊗ S` (one vector is 16 bytes per entry).
pub const MAX_WEIL_DIM: usize = 1 << 23;

#[derive(Clone, Debug)]
pub struct WeilSpace {
    module: HwModule,
    spin: SpinModule,
    module_weights: Vec<Vec<i64>>,
    fock_weights: Vec<Vec<i64>>,
}

impl WeilSpace {
    pub fn new(weight: &Weight, module_dim_cap: usize) -> Result<Self> {
        let module = build_module(weight, module_dim_cap)?;
        let spin = SpinModule::new(weight.trunc)?;
        Self::from_parts(module, spin)
    }

    pub fn from_parts(module: HwModule, spin: SpinModule) -> Result<Self> {
        if module.trunc() != spin.trunc() {
            return Err(Error::Precondition(format!(
                "module truncation N={} differs from spin truncation N={}",
                module.trunc().n(),
                spin.trunc().n()
            )));
        }
        let dim = module.dim().saturating_mul(spin.dim());
        if dim > MAX_WEIL_DIM {
            return Err(Error::Resource(format!(
                "V ⊗ S has dimension {} x {} above the limit {MAX_WEIL_DIM}",
                module.dim(),
                spin.dim()
            )));
        }
        let module_weights = (0..module.dim()).map(|a| module.weight_of(a)).collect();
        let fock_weights = (0..spin.dim()).map(|f| spin.weight_vector(f)).collect();
        Ok(Self { module, spin, module_weights, fock_weights })
    }

    pub fn module(&self) -> &HwModule {
        &self.module
    }

    pub fn spin(&self) -> &SpinModule {
        &self.spin
    }

    pub fn table(&self) -> &ModeTable {
        self.spin.table()
    }

    pub fn trunc(&self) -> Truncation {
        self.module.trunc()
    }

    pub fn level(&self) -> i64 {
        self.module.weight().level
    }

    pub fn lambda(&self) -> &[i64] {
        &self.module.weight().lambda
    }

    pub fn dim_module(&self) -> usize {
        self.module.dim()
    }

    pub fn dim_fock(&self) -> usize {
        self.spin.dim()
    }

    pub fn dim(&self) -> usize {
        self.dim_module() * self.dim_fock()
    }

    pub fn index(&self, a: usize, f: usize) -> usize {
        a * self.dim_fock() + f
    }

    pub fn split(&self, idx: usize) -> (usize, usize) {
        (idx / self.dim_fock(), idx % self.dim_fock())
    }

    /// `t_ii` eigenvalues of a product basis vector, window order.
    pub fn weight_of(&self, idx: usize) -> Vec<i64> {
        let (a, f) = self.split(idx);
        self.module_weights[a].iter().zip(&self.fock_weights[f]).map(|(x, y)| x + y).collect()
    }

    /// Indices of `v_hw ⊗ w` for `w` in the paired-mode (vacuum) sector of `S`.
    pub fn vacuum_sector(&self) -> Vec<usize> {
        vacuum_sector_basis(self.trunc()).into_iter().map(|f| self.index(crate::hwmodule::HW_INDEX, f)).collect()
    }

    /// `v_hw ⊗ |0>`
    pub fn hw_vacuum(&self) -> Vec<C64> {
        let mut v = vec![C64::new(0.0, 0.0); self.dim()];
        v[self.index(crate::hwmodule::HW_INDEX, 0)] = re(1.0);
        v
    }

    pub fn zero_vector(&self) -> Vec<C64> {
        vec![C64::new(0.0, 0.0); self.dim()]
    }
}
