use crate::{Error, Result};

/// Physical problem definition: secondaries ratio `c` and the truncated
/// Legendre expansion coefficients `omega_0..omega_L` of the scattering
/// kernel. Coefficients vanish for l > L.
#[derive(Debug, Clone, PartialEq)]
pub struct ScatteringKernel {
    c: f64,
    omegas: Vec<f64>,
    label: String,
    unscaled_h: bool,
}

impl ScatteringKernel {
    /// Build a kernel, enforcing `0 <= c < 1`, a non-empty coefficient list
    /// and the normalization `omega_0 = 1`.
    pub fn new(c: f64, omegas: Vec<f64>) -> Result<Self> {
        Self::build(c, omegas, false)
    }

    /// Like [`ScatteringKernel::new`] but relaxes the `omega_0 = 1`
    /// normalization requirement. Callers should surface a warning.
    pub fn new_unnormalized(c: f64, omegas: Vec<f64>) -> Result<Self> {
        Self::build(c, omegas, true)
    }

    fn build(c: f64, omegas: Vec<f64>, allow_unnormalized: bool) -> Result<Self> {
        if !c.is_finite() || !(0.0..1.0).contains(&c) {
            return Err(Error::InvalidKernel(format!(
                "c = {c} violates the bound 0 ≤ c < 1"
            )));
        }
        if omegas.is_empty() {
            return Err(Error::InvalidKernel(
                "omega list is empty; at least omega_0 is required".into(),
            ));
        }
        if omegas.iter().any(|w| !w.is_finite()) {
            return Err(Error::InvalidKernel(
                "omega coefficients must be finite".into(),
            ));
        }
        if !allow_unnormalized && (omegas[0] - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidKernel(format!(
                "omega_0 = {} but a normalized kernel requires omega_0 = 1",
                omegas[0]
            )));
        }
        Ok(Self {
            c,
            omegas,
            label: String::new(),
            unscaled_h: false,
        })
    }

    /// Isotropic kernel: a single coefficient omega_0 = 1.
    pub fn isotropic(c: f64) -> Result<Self> {
        Self::new(c, vec![1.0])
    }

    /// Diagnostic variant that drops the `c` factor from the recurrence
    /// coefficient, using h_l = 2l+1 - omega_l instead of 2l+1 - c omega_l.
    /// Tables built this way violate the identity suite; it exists as the
    /// negative control for the verification machinery.
    pub fn with_unscaled_h(mut self) -> Self {
        self.unscaled_h = true;
        self
    }

    /// Attach a display label (carried into CLI output manifests).
    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Secondaries ratio c.
    pub fn c(&self) -> f64 {
        self.c
    }

    /// Truncation order L (index of the last retained coefficient).
    pub fn order(&self) -> usize {
        self.omegas.len() - 1
    }

    /// omega_l, zero beyond the truncation order.
    pub fn omega(&self, l: usize) -> f64 {
        self.omegas.get(l).copied().unwrap_or(0.0)
    }

    pub fn omegas(&self) -> &[f64] {
        &self.omegas
    }

    /// Recurrence coefficient h_l = 2l+1 - c omega_l (2l+1 beyond L).
    pub fn h(&self, l: usize) -> f64 {
        let factor = if self.unscaled_h { 1.0 } else { self.c };
        (2 * l + 1) as f64 - factor * self.omega(l)
    }

    /// Whether the diagnostic unscaled-h convention is active.
    pub fn uses_unscaled_h(&self) -> bool {
        self.unscaled_h
    }

    /// Whether omega_0 deviates from the normalized value 1.
    pub fn is_unnormalized(&self) -> bool {
        (self.omegas[0] - 1.0).abs() > 1e-12
    }
}
