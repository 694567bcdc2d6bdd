//! Run configuration: one JSON document holding the kernel plus per-command
//! sections, so benchmark setups are shareable files.

use serde::Deserialize;

use transport_greens::ScatteringKernel;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(default)]
    pub label: String,
    pub c: f64,
    pub omega: Vec<f64>,
    #[serde(default)]
    pub allow_unnormalized: bool,
    #[serde(default)]
    pub flux: Option<FluxSection>,
    #[serde(default)]
    #[allow(dead_code)] // accepted for schema completeness; the command has no knobs yet
    pub spectrum: Option<SpectrumSection>,
    #[serde(default)]
    pub verify: Option<VerifySection>,
    #[serde(default)]
    pub oracle_compare: Option<OracleSection>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FluxSection {
    pub x: Vec<f64>,
    pub mu0: Vec<f64>,
    pub l_max: usize,
    #[serde(default)]
    pub quad_abs_tol: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumSection {}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifySection {
    #[serde(default)]
    pub samples: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleSection {
    pub x: Vec<f64>,
    pub mu0: Vec<f64>,
    pub l_max: usize,
    #[serde(default)]
    pub rel_tol: Option<f64>,
}

impl ConfigFile {
    /// Build and validate the scattering kernel. Unnormalized kernels are
    /// accepted only with the explicit flag; the caller prints the warning.
    pub fn kernel(&self) -> Result<(ScatteringKernel, Option<String>), String> {
        let built = if self.allow_unnormalized {
            ScatteringKernel::new_unnormalized(self.c, self.omega.clone())
        } else {
            ScatteringKernel::new(self.c, self.omega.clone())
        };
        let kernel = built
            .map_err(|e| e.to_string())?
            .with_label(self.label.clone());
        let warning = kernel.is_unnormalized().then(|| {
            format!(
                "warning: omega_0 = {} deviates from the normalized value 1",
                kernel.omega(0)
            )
        });
        Ok((kernel, warning))
    }

    pub fn validate_grids(&self) -> Result<(), String> {
        if let Some(f) = &self.flux {
            if f.x.is_empty() || f.mu0.is_empty() {
                return Err("flux section needs non-empty x and mu0 grids".into());
            }
            if f.mu0.iter().any(|m| *m == 0.0 || m.abs() > 1.0) {
                return Err("flux mu0 grid entries must lie in [-1, 1] and be nonzero".into());
            }
            if let Some(t) = f.quad_abs_tol {
                if !(t > 0.0) {
                    return Err("flux quad_abs_tol must be > 0".into());
                }
            }
        }
        if let Some(o) = &self.oracle_compare {
            if o.x.is_empty() || o.mu0.is_empty() {
                return Err("oracle_compare section needs non-empty x and mu0 grids".into());
            }
            if o.x.iter().any(|x| *x == 0.0) {
                return Err("oracle_compare x grid must avoid 0 (oscillatory inversion)".into());
            }
            if o.mu0.iter().any(|m| *m == 0.0 || m.abs() > 1.0) {
                return Err("oracle_compare mu0 entries must lie in [-1, 1] and be nonzero".into());
            }
            if let Some(t) = o.rel_tol {
                if !(t > 0.0) {
                    return Err("oracle_compare rel_tol must be > 0".into());
                }
            }
        }
        Ok(())
    }
}
