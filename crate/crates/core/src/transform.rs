//! Everything in Fourier-transform space, with z = 1/(ik): the dense matrix
//! solution of the transformed moment system, two closed-form routes to the
//! same moments, the off-cut generalized eigenfunction values, and the
//! angular transform assembled from them. Mutual agreement of the routes is
//! the module's headline property.
//!
//! Conventions: with w = -z, the even functions Lambda_L and gamma_L satisfy
//! Lambda_L(z) = Lambda_L(w), so all closed-form routes are written in terms
//! of one polynomial/Legendre table at w:
//!
//!   psi_0 = [w/(w - mu0) - c w sum_l omega_l Q_l(w) chi_l(w, mu0)] / Lambda_L(w)
//!   psi_l = g_l(w) psi_0 - chi_l(w, mu0)
//!   psi_0 = 2 phi_L(w, mu0) gamma_L(w) / Lambda_L(w) - 2 Theta_L(w, mu0)
//!
//! where phi_L(w, mu) = (c w / 2) g*_L(w, mu)/(w - mu) and
//! Theta_L(w, mu) = (w/2)[c h*_L(w, mu) - 1]/(w - mu) are the off-cut
//! (delta-free) generalized eigenfunction values.

use num_complex::Complex64;

use crate::chandrasekhar::PolyTable;
use crate::kernel::ScatteringKernel;
use crate::legendre::{self, is_on_cut, p_seq, p_seq_real};
use crate::spectral;
use crate::{Error, Result};

/// Which formula produced a set of transform moments.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    Matrix,
    Closure,
    GammaForm,
}

/// Transform moments psi_0..psi_L at one (z, mu0).
#[derive(Debug, Clone)]
pub struct TransformSample {
    pub z: Complex64,
    pub mu0: f64,
    pub moments: Vec<Complex64>,
    pub route: Route,
}

/// Off-cut value of a generalized singular eigenfunction: a regular part and
/// the coefficient of delta(z - mu), which vanishes identically off the cut
/// but is carried so on-cut code shares the shape.
#[derive(Debug, Clone, Copy)]
pub struct EigenfunctionValue {
    pub regular: Complex64,
    pub delta_weight: Complex64,
}

/// Which of the two generalized eigenfunctions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EigenfunctionKind {
    /// phi_L, built on the first-kind polynomials.
    First,
    /// Theta_L, built on the second-kind polynomials.
    Second,
}

/// Angular-transform evaluation route.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AngularRoute {
    /// (c/2) [z/(z+mu)] P^T(mu) W psi directly from the matrix solve.
    Direct,
    /// Generalized-eigenfunction assembly with the finite correction sum.
    Assembled,
}

/// Matrix element L_{j,l}(z) = (-1)^{l+j} z Q_max(z) P_min(z), symmetric in
/// (j, l).
pub fn eval_lmatrix(j: usize, l: usize, z: Complex64) -> Result<Complex64> {
    if is_on_cut(z) {
        return Err(Error::OnCut { z });
    }
    let hi = j.max(l);
    let q = legendre::q_seq(z, hi)?;
    let p = p_seq(z, hi);
    Ok(lmatrix_from(&q, &p, z, j, l))
}

fn lmatrix_from(q: &[Complex64], p: &[Complex64], z: Complex64, j: usize, l: usize) -> Complex64 {
    let (hi, lo) = if j >= l { (j, l) } else { (l, j) };
    let sign = if (j + l) % 2 == 0 { 1.0 } else { -1.0 };
    sign * z * q[hi] * p[lo]
}

/// In-place dense complex LU solve with partial pivoting (row-major n x n).
fn solve_dense(a: &mut [Complex64], n: usize, b: &mut [Complex64]) -> Result<()> {
    for col in 0..n {
        let mut pivot_row = col;
        let mut pivot_mag = a[col * n + col].norm();
        for row in col + 1..n {
            let mag = a[row * n + col].norm();
            if mag > pivot_mag {
                pivot_mag = mag;
                pivot_row = row;
            }
        }
        if pivot_mag < 1e-300 {
            return Err(Error::Domain("singular moment matrix".into()));
        }
        if pivot_row != col {
            for k in 0..n {
                a.swap(col * n + k, pivot_row * n + k);
            }
            b.swap(col, pivot_row);
        }
        let pivot = a[col * n + col];
        for row in col + 1..n {
            let factor = a[row * n + col] / pivot;
            if factor.norm() == 0.0 {
                continue;
            }
            for k in col..n {
                let v = a[col * n + k];
                a[row * n + k] -= factor * v;
            }
            let bc = b[col];
            b[row] -= factor * bc;
        }
    }
    for col in (0..n).rev() {
        let mut s = b[col];
        for k in col + 1..n {
            s -= a[col * n + k] * b[k];
        }
        b[col] = s / a[col * n + col];
    }
    Ok(())
}

fn near_root_error(kernel: &ScatteringKernel, z: Complex64) -> Error {
    let nearest = spectral::find_discrete_spectrum(kernel).ok().and_then(|s| {
        s.roots().iter().map(|m| m.nu0).min_by(|a, b| {
            let da = (z - *a).norm().min((z + *a).norm());
            let db = (z - *b).norm().min((z + *b).norm());
            da.partial_cmp(&db).unwrap()
        })
    });
    Error::NearDispersionRoot { z, nearest }
}

fn guard_dispersion(kernel: &ScatteringKernel, z: Complex64) -> Result<Complex64> {
    let lam = spectral::eval_dispersion(kernel, z)?;
    if lam.norm() < 1e-11 {
        return Err(near_root_error(kernel, z));
    }
    Ok(lam)
}

/// Moments by dense solve of the transformed system:
/// psi = [z/(z+mu0)] (I - c L(z) W)^{-1} P(mu0).
pub fn solve_moments_matrix(
    kernel: &ScatteringKernel,
    z: Complex64,
    mu0: f64,
) -> Result<TransformSample> {
    if is_on_cut(z) {
        return Err(Error::OnCut { z });
    }
    guard_dispersion(kernel, z)?;
    let big_l = kernel.order();
    let n = big_l + 1;
    let q = legendre::q_seq(z, big_l)?;
    let p = p_seq(z, big_l);
    let pm = p_seq_real(mu0, big_l);
    let w0 = z / (z + mu0);

    let mut a = vec![Complex64::new(0.0, 0.0); n * n];
    let mut rhs = vec![Complex64::new(0.0, 0.0); n];
    for j in 0..n {
        for l in 0..n {
            let mut entry = -kernel.c() * kernel.omega(l) * lmatrix_from(&q, &p, z, j, l);
            if j == l {
                entry += 1.0;
            }
            a[j * n + l] = entry;
        }
        rhs[j] = w0 * pm[j];
    }
    solve_dense(&mut a, n, &mut rhs).map_err(|_| near_root_error(kernel, z))?;
    Ok(TransformSample {
        z,
        mu0,
        moments: rhs,
        route: Route::Matrix,
    })
}

/// Shared context for the closed-form routes: tables at w = -z.
struct WContext {
    w: Complex64,
    table: PolyTable,
    q: Vec<Complex64>,
    lambda: Complex64,
}

impl WContext {
    fn build(kernel: &ScatteringKernel, z: Complex64) -> Result<Self> {
        if is_on_cut(z) {
            return Err(Error::OnCut { z });
        }
        let w = -z;
        let lambda = guard_dispersion(kernel, w)?; // Lambda is even: Lambda(z) = Lambda(w)
        let big_l = kernel.order();
        let table = PolyTable::build(kernel, w, big_l + 1)?;
        let q = legendre::q_seq(w, big_l)?;
        Ok(Self {
            w,
            table,
            q,
            lambda,
        })
    }

    /// gamma_L(w) = w Q_0(w) - c w sum_l omega_l Q_l(w) rho_l(w).
    fn gamma(&self, kernel: &ScatteringKernel) -> Complex64 {
        let mut s = Complex64::new(0.0, 0.0);
        for l in 0..=kernel.order() {
            s += kernel.omega(l) * self.q[l] * self.table.rho(l);
        }
        self.w * self.q[0] - kernel.c() * self.w * s
    }

    /// Regular parts of phi_l(w, mu) and Theta_l(w, mu).
    fn eigen_regular(
        &self,
        kernel: &ScatteringKernel,
        l: usize,
        mu: f64,
    ) -> (Complex64, Complex64) {
        let (gs, hs) = self.table.partial_sums(l, mu);
        let denom = self.w - mu;
        let phi = 0.5 * kernel.c() * self.w * gs / denom;
        let theta = 0.5 * self.w * (kernel.c() * hs - 1.0) / denom;
        (phi, theta)
    }
}

/// Moments from the recurrence solution closed by the j = 0 transform row:
/// psi_0 = [w/(w-mu0) - c w sum omega_l Q_l(w) chi_l(w, mu0)] / Lambda_L(w),
/// then psi_l = g_l(w) psi_0 - chi_l(w, mu0).
pub fn eval_moments_closure(
    kernel: &ScatteringKernel,
    z: Complex64,
    mu0: f64,
) -> Result<TransformSample> {
    let ctx = WContext::build(kernel, z)?;
    let big_l = kernel.order();
    let mut s = Complex64::new(0.0, 0.0);
    for l in 0..=big_l {
        s += kernel.omega(l) * ctx.q[l] * ctx.table.chi(l, mu0);
    }
    let psi0 = (ctx.w / (ctx.w - mu0) - kernel.c() * ctx.w * s) / ctx.lambda;
    let moments = (0..=big_l)
        .map(|l| ctx.table.g(l) * psi0 - ctx.table.chi(l, mu0))
        .collect();
    Ok(TransformSample {
        z,
        mu0,
        moments,
        route: Route::Closure,
    })
}

/// Moments with the scalar moment taken from the eigenfunction form
/// psi_0 = 2 phi_L(w, mu0) gamma_L(w)/Lambda_L(w) - 2 Theta_L(w, mu0).
pub fn eval_moments_gamma_form(
    kernel: &ScatteringKernel,
    z: Complex64,
    mu0: f64,
) -> Result<TransformSample> {
    let ctx = WContext::build(kernel, z)?;
    let big_l = kernel.order();
    let (phi, theta) = ctx.eigen_regular(kernel, big_l, mu0);
    let psi0 = 2.0 * phi * ctx.gamma(kernel) / ctx.lambda - 2.0 * theta;
    let moments = (0..=big_l)
        .map(|l| ctx.table.g(l) * psi0 - ctx.table.chi(l, mu0))
        .collect();
    Ok(TransformSample {
        z,
        mu0,
        moments,
        route: Route::GammaForm,
    })
}

/// Off-cut generalized eigenfunction value at (z, mu); every delta weight is
/// identically zero off the cut.
pub fn eval_eigenfunction_offcut(
    kernel: &ScatteringKernel,
    z: Complex64,
    mu: f64,
    which: EigenfunctionKind,
) -> Result<EigenfunctionValue> {
    if is_on_cut(z) {
        return Err(Error::OnCut { z });
    }
    let big_l = kernel.order();
    let table = PolyTable::build(kernel, z, big_l.max(1))?;
    let (gs, hs) = table.partial_sums(big_l, mu);
    let regular = match which {
        EigenfunctionKind::First => 0.5 * kernel.c() * z * gs / (z - mu),
        EigenfunctionKind::Second => 0.5 * z * (kernel.c() * hs - 1.0) / (z - mu),
    };
    Ok(EigenfunctionValue {
        regular,
        delta_weight: Complex64::new(0.0, 0.0),
    })
}

/// Collided part of the angular transform at mu != mu0, by either route.
pub fn eval_transform_angular(
    kernel: &ScatteringKernel,
    z: Complex64,
    mu: f64,
    mu0: f64,
    route: AngularRoute,
) -> Result<Complex64> {
    if (mu - mu0).abs() < 1e-12 {
        return Err(Error::CoincidentAngles { mu });
    }
    match route {
        AngularRoute::Direct => {
            let sample = solve_moments_matrix(kernel, z, mu0)?;
            let big_l = kernel.order();
            let pm = p_seq_real(mu, big_l);
            let mut s = Complex64::new(0.0, 0.0);
            for l in 0..=big_l {
                s += kernel.omega(l) * pm[l] * sample.moments[l];
            }
            Ok(0.5 * kernel.c() * z / (z + mu) * s)
        }
        AngularRoute::Assembled => {
            let ctx = WContext::build(kernel, z)?;
            let big_l = kernel.order();
            let (phi_mu, theta_mu) = ctx.eigen_regular(kernel, big_l, mu);
            let (phi_mu0, theta_mu0) = ctx.eigen_regular(kernel, big_l, mu0);
            let gamma = ctx.gamma(kernel);

            // finite correction sum over l <= L
            let pm = p_seq_real(mu, big_l);
            let mut corr = Complex64::new(0.0, 0.0);
            for l in 0..=big_l {
                let (phi_l, theta_l) = ctx.eigen_regular(kernel, l, mu0);
                let weight = (2 * l + 1) as f64 / 2.0 * pm[l];
                corr += weight
                    * (ctx.table.rho(l) * (phi_l - phi_mu0)
                        - ctx.table.g(l) * (theta_l - theta_mu0));
            }
            let h = 2.0 * (theta_mu * phi_mu0 + corr);
            Ok(2.0 * phi_mu * phi_mu0 * gamma / ctx.lambda - h)
        }
    }
}

/// Collided transform moments psi^c_l(k; mu0) for l = 0..=l_max, with the
/// uncollided part [z/(z+mu0)] P_l(mu0) removed analytically. Moments beyond
/// the truncation order come from the projection rows
/// psi_j = c sum_{l<=L} omega_l L_{j,l}(z) psi_l + [z/(z+mu0)] P_j(mu0),
/// which stay numerically benign for any |z|.
pub fn collided_moment_transform(
    kernel: &ScatteringKernel,
    z: Complex64,
    mu0: f64,
    l_max: usize,
) -> Result<Vec<Complex64>> {
    let sample = solve_moments_matrix(kernel, z, mu0)?;
    let big_l = kernel.order();
    let deg = l_max.max(big_l);
    let pm = p_seq_real(mu0, deg);
    let w0 = z / (z + mu0);
    let mut out = Vec::with_capacity(l_max + 1);
    for j in 0..=l_max.min(big_l) {
        out.push(sample.moments[j] - w0 * pm[j]);
    }
    if l_max > big_l {
        let q = legendre::q_seq(z, l_max)?;
        let p = p_seq(z, big_l);
        for j in big_l + 1..=l_max {
            let mut s = Complex64::new(0.0, 0.0);
            for l in 0..=big_l {
                // j > l here, so L_{j,l} = (-1)^{j+l} z Q_j(z) P_l(z)
                let sign = if (j + l) % 2 == 0 { 1.0 } else { -1.0 };
                s += kernel.omega(l) * sign * z * q[j] * p[l] * sample.moments[l];
            }
            out.push(kernel.c() * s);
        }
    }
    Ok(out)
}
