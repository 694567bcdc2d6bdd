//! The dispersion function Lambda_L on and off the branch cut, its
//! derivative, the discrete spectrum {nu_0m}, and on-cut boundary values.
//!
//! Off the cut two algebraically equivalent forms are always computed and
//! compared, as a live health check:
//!
//!   series form:    Lambda_L(z) = 1 - c z sum_{l<=L} omega_l Q_l(z) g_l(z)
//!   Wronskian form: Lambda_L(z) = (L+1)[g_{L+1}(z) Q_L(z) - g_L(z) Q_{L+1}(z)]
//!
//! The real zeros nu_0m > 1 are simple, occur in ± pairs (only the positive
//! member is stored) and define the discrete relaxation lengths. On the cut,
//! boundary values follow the Plemelj formula:
//!   Lambda±(nu) = Lambda*(nu) ± (i pi / 2) c nu g*_L(nu, nu).

use num_complex::Complex64;

use crate::chandrasekhar::PolyTable;
use crate::kernel::ScatteringKernel;
use crate::legendre::{self, is_on_cut, p_seq_real, q_seq_real};
use crate::{Error, Result};

/// Relative tolerance for the agreement of the two dispersion forms.
const CROSS_FORM_TOL: f64 = 1e-11;

/// Roots this close above the cut endpoint are rejected as numerically
/// unresolvable (they indicate c -> 1 pathologies).
const ROOT_GUARD: f64 = 1e-10;

/// Default scan density in t = 1/nu, and the doubling cap.
const DEFAULT_GRID: usize = 2048;
const GRID_CAP: usize = 1 << 16;

/// Largest nu probed by the scan; Lambda is monotone-flat beyond any
/// physical root well before this.
const NU_SCAN_MAX: f64 = 1.0e4;

/// One discrete eigenvalue with its residue data.
#[derive(Debug, Clone, Copy)]
pub struct DiscreteMode {
    /// Root nu_0m > 1 of Lambda_L.
    pub nu0: f64,
    /// d Lambda_L / d nu at the root.
    pub lambda_prime: f64,
    /// Normalization M_L(nu_0m) = (c nu^2 / 2) g*_L(nu_0m, nu_0m) Lambda'_L(nu_0m).
    pub big_m: f64,
    /// Isolation interval found by the scanner (in nu).
    pub bracket: (f64, f64),
}

/// Discrete spectrum of a kernel.
#[derive(Debug, Clone)]
pub struct SpectralData {
    kernel: ScatteringKernel,
    roots: Vec<DiscreteMode>,
    warnings: Vec<String>,
}

impl SpectralData {
    pub fn kernel(&self) -> &ScatteringKernel {
        &self.kernel
    }

    /// Roots sorted ascending; only positive members of the ± pairs.
    pub fn roots(&self) -> &[DiscreteMode] {
        &self.roots
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }
}

/// On-cut quantities at nu in (0, 1).
#[derive(Debug, Clone, Copy)]
pub struct CutEval {
    pub nu: f64,
    /// Principal-value dispersion Lambda*_L(nu).
    pub lambda_star: f64,
    /// Boundary values Lambda± = Lambda* ± (i pi/2) c nu g*_L(nu,nu).
    pub lambda_plus: Complex64,
    pub lambda_minus: Complex64,
    /// gamma*_L(nu) = nu Q*_0 - c nu sum omega_l Q*_l rho_l.
    pub gamma_star: f64,
    /// Diagonal partial sums g*_L(nu, nu), h*_L(nu, nu).
    pub gstar_diag: f64,
    pub hstar_diag: f64,
    /// M_L(nu) = nu Lambda+ Lambda- = nu [Lambda*^2 + (pi c nu g*/2)^2].
    pub big_m: f64,
}

/// Real g_0..g_n and rho_0..rho_n (fast path for real arguments).
pub(crate) fn gr_seq_real(kernel: &ScatteringKernel, x: f64, n: usize) -> (Vec<f64>, Vec<f64>) {
    let n = n.max(1);
    let mut g = Vec::with_capacity(n + 1);
    let mut r = Vec::with_capacity(n + 1);
    g.push(1.0);
    g.push(x * kernel.h(0));
    r.push(0.0);
    r.push(x);
    for l in 1..n {
        let lf = l as f64;
        let h = kernel.h(l);
        g.push((x * h * g[l] - lf * g[l - 1]) / (lf + 1.0));
        r.push((x * h * r[l] - lf * r[l - 1]) / (lf + 1.0));
    }
    (g, r)
}

/// Both dispersion forms at an off-cut argument: (series, wronskian).
pub fn dispersion_forms(kernel: &ScatteringKernel, z: Complex64) -> Result<(Complex64, Complex64)> {
    if is_on_cut(z) {
        return Err(Error::OnCut { z });
    }
    let big_l = kernel.order();
    let table = PolyTable::build(kernel, z, big_l + 1)?;
    let q = legendre::q_seq(z, big_l + 1)?;
    let mut series_sum = Complex64::new(0.0, 0.0);
    let mut scale = 0.0f64;
    for l in 0..=big_l {
        let term = kernel.omega(l) * q[l] * table.g(l);
        series_sum += term;
        scale += term.norm();
    }
    let cz = kernel.c() * z;
    let series = 1.0 - cz * series_sum;
    let lf = (big_l + 1) as f64;
    let wronskian = lf * (table.g(big_l + 1) * q[big_l] - table.g(big_l) * q[big_l + 1]);
    let tol_scale = 1.0 + cz.norm() * scale;
    let diff = (series - wronskian).norm();
    if diff > CROSS_FORM_TOL * tol_scale {
        return Err(Error::Instability {
            what: format!("dispersion cross-form agreement at z = {z}"),
            residual: diff / tol_scale,
        });
    }
    Ok((series, wronskian))
}

/// Lambda_L(z) off the cut (Wronskian form, cross-checked against the series
/// form).
pub fn eval_dispersion(kernel: &ScatteringKernel, z: Complex64) -> Result<Complex64> {
    Ok(dispersion_forms(kernel, z)?.1)
}

/// Lambda_L at real nu > 1 (fast path used by the scanner).
pub fn dispersion_real(kernel: &ScatteringKernel, nu: f64) -> Result<f64> {
    if !(nu > 1.0) {
        return Err(Error::Domain(format!(
            "real dispersion evaluation requires nu > 1, got {nu}"
        )));
    }
    let big_l = kernel.order();
    let (g, _) = gr_seq_real(kernel, nu, big_l + 1);
    let q = q_seq_real(nu, big_l + 1)?;
    let lf = (big_l + 1) as f64;
    Ok(lf * (g[big_l + 1] * q[big_l] - g[big_l] * q[big_l + 1]))
}

/// d Lambda_L / d nu at real nu > 1 via the complex-step method:
/// Im[Lambda(nu + ih)]/h with h = 1e-20 max(1, nu). Lambda is analytic off
/// the cut, so the step is exact to second order with no subtractive
/// cancellation.
pub fn eval_dispersion_derivative(kernel: &ScatteringKernel, nu: f64) -> Result<f64> {
    if !(nu > 1.0) {
        return Err(Error::Domain(format!(
            "dispersion derivative requires nu > 1, got {nu}"
        )));
    }
    let h = 1e-20 * nu.max(1.0);
    let z = Complex64::new(nu, h);
    let big_l = kernel.order();
    let table = PolyTable::build(kernel, z, big_l + 1)?;
    let q = legendre::q_seq(z, big_l + 1)?;
    let lf = (big_l + 1) as f64;
    let lam = lf * (table.g(big_l + 1) * q[big_l] - table.g(big_l) * q[big_l + 1]);
    Ok(lam.im / h)
}

/// All positive real roots of Lambda_L in (1, inf), with per-root residue
/// data. Scans in t = 1/nu, brackets sign changes, bisects, then polishes
/// with one complex-step Newton pass. The scan density auto-doubles (up to a
/// cap) until the root count is stable.
pub fn find_discrete_spectrum(kernel: &ScatteringKernel) -> Result<SpectralData> {
    let mut warnings = Vec::new();
    if kernel.c() == 0.0 {
        return Ok(SpectralData {
            kernel: kernel.clone(),
            roots: Vec::new(),
            warnings,
        });
    }

    let mut grid = DEFAULT_GRID;
    let mut roots = scan_roots(kernel, grid, &mut warnings)?;
    loop {
        if grid * 2 > GRID_CAP {
            break;
        }
        let finer = scan_roots(kernel, grid * 2, &mut warnings)?;
        let stable = finer.len() == roots.len()
            && finer
                .iter()
                .zip(roots.iter())
                .all(|(a, b)| (a.0 - b.0).abs() < 1e-9 * (1.0 + a.0.abs()));
        roots = finer;
        grid *= 2;
        if stable {
            break;
        }
        warnings.push(format!(
            "root count changed between scan densities; doubled grid to {grid}"
        ));
    }

    let mut modes = Vec::with_capacity(roots.len());
    for &(nu0, bracket) in &roots {
        if nu0 < 1.0 + ROOT_GUARD {
            warnings.push(format!(
                "root nu_0 = {nu0:.15e} within {ROOT_GUARD:.0e} of the cut endpoint rejected"
            ));
            continue;
        }
        let lambda_prime = eval_dispersion_derivative(kernel, nu0)?;
        let (g, _) = gr_seq_real(kernel, nu0, kernel.order().max(1));
        let p = p_seq_real(nu0, kernel.order());
        let mut gstar = 0.0;
        for j in 0..=kernel.order() {
            gstar += kernel.omega(j) * g[j] * p[j];
        }
        let big_m = 0.5 * kernel.c() * nu0 * nu0 * gstar * lambda_prime;
        modes.push(DiscreteMode {
            nu0,
            lambda_prime,
            big_m,
            bracket,
        });
    }
    modes.sort_by(|a, b| a.nu0.partial_cmp(&b.nu0).unwrap());
    Ok(SpectralData {
        kernel: kernel.clone(),
        roots: modes,
        warnings,
    })
}

/// Scan Lambda(1/t) on a uniform t grid, bisect each sign change, polish.
/// Returns each root with its isolating bracket in nu.
fn scan_roots(
    kernel: &ScatteringKernel,
    grid: usize,
    warnings: &mut Vec<String>,
) -> Result<Vec<(f64, (f64, f64))>> {
    let lam_t = |t: f64| dispersion_real(kernel, 1.0 / t);

    // Interior grid plus a synthetic point hugging each end: nu = NU_SCAN_MAX
    // on the left and nu = 1 + 1e-11 on the right (where Lambda -> -inf).
    let mut ts = Vec::with_capacity(grid + 2);
    ts.push(1.0 / NU_SCAN_MAX);
    for i in 1..grid {
        let t = i as f64 / grid as f64;
        if t > ts[0] && 1.0 / t > 1.0 + 0.5 * ROOT_GUARD {
            ts.push(t);
        }
    }
    ts.push(1.0 / (1.0 + 1e-11));

    let mut roots = Vec::new();
    let mut prev_t = ts[0];
    let mut prev_v = lam_t(prev_t)?;
    for &t in &ts[1..] {
        let v = lam_t(t)?;
        if prev_v == 0.0 {
            roots.push((1.0 / prev_t, (1.0 / t, 1.0 / prev_t)));
        } else if prev_v.signum() != v.signum() {
            let root_t = bisect(&lam_t, prev_t, t, prev_v)?;
            let mut nu = 1.0 / root_t;
            nu = newton_polish(kernel, nu)?;
            let residual = dispersion_real(kernel, nu)?.abs();
            let scale = 1.0 + kernel.c() * nu * legendre::q_seq_real(nu, 0)?[0].abs();
            if residual > 1e-12 * scale {
                warnings.push(format!(
                    "root at nu = {nu:.15e} polished to residual {residual:.3e} only"
                ));
            }
            roots.push((nu, (1.0 / t, 1.0 / prev_t)));
        }
        prev_t = t;
        prev_v = v;
    }
    roots.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    roots.dedup_by(|a, b| (a.0 - b.0).abs() < 1e-10 * (1.0 + b.0.abs()));
    Ok(roots)
}

fn bisect(f: &dyn Fn(f64) -> Result<f64>, mut lo: f64, mut hi: f64, flo: f64) -> Result<f64> {
    let mut sign_lo = flo.signum();
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break; // interval at floating point resolution
        }
        let v = f(mid)?;
        if v == 0.0 {
            return Ok(mid);
        }
        if v.signum() == sign_lo {
            lo = mid;
            sign_lo = v.signum();
        } else {
            hi = mid;
        }
        if hi - lo < 1e-14 * hi.abs() {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn newton_polish(kernel: &ScatteringKernel, mut nu: f64) -> Result<f64> {
    for _ in 0..3 {
        let f = dispersion_real(kernel, nu)?;
        let fp = eval_dispersion_derivative(kernel, nu)?;
        if fp == 0.0 {
            break;
        }
        let step = f / fp;
        let next = nu - step;
        if !(next > 1.0) {
            break;
        }
        nu = next;
        if step.abs() < 1e-15 * nu {
            break;
        }
    }
    Ok(nu)
}

/// On-cut boundary values at nu in (0, 1).
pub fn eval_cut(kernel: &ScatteringKernel, nu: f64) -> Result<CutEval> {
    if !(nu > 0.0 && nu < 1.0) {
        return Err(Error::Domain(format!(
            "cut evaluation requires 0 < nu < 1, got {nu}"
        )));
    }
    eval_cut_with_artanh(kernel, nu, legendre::artanh(nu))
}

/// [`eval_cut`] with artanh(nu) supplied exactly (used by cut integrands
/// parameterized as nu = tanh t, where recomputing t from nu is lossy).
pub(crate) fn eval_cut_with_artanh(
    kernel: &ScatteringKernel,
    nu: f64,
    artanh_nu: f64,
) -> Result<CutEval> {
    let big_l = kernel.order();
    let c = kernel.c();
    let (g, rho) = gr_seq_real(kernel, nu, big_l + 1);
    let qs = legendre::qstar_seq_with_artanh(nu, artanh_nu, big_l + 1);
    let p = p_seq_real(nu, big_l);

    let lf = (big_l + 1) as f64;
    let lambda_star = lf * (g[big_l + 1] * qs[big_l] - g[big_l] * qs[big_l + 1]);

    let mut gstar = 0.0;
    let mut hstar = 0.0;
    let mut gamma_sum = 0.0;
    for j in 0..=big_l {
        let w = kernel.omega(j);
        gstar += w * g[j] * p[j];
        hstar += w * rho[j] * p[j];
        gamma_sum += w * qs[j] * rho[j];
    }
    let gamma_star = nu * qs[0] - c * nu * gamma_sum;

    let half_jump = 0.5 * std::f64::consts::PI * c * nu * gstar;
    let lambda_plus = Complex64::new(lambda_star, half_jump);
    let lambda_minus = Complex64::new(lambda_star, -half_jump);
    let big_m = nu * (lambda_star * lambda_star + half_jump * half_jump);

    Ok(CutEval {
        nu,
        lambda_star,
        lambda_plus,
        lambda_minus,
        gamma_star,
        gstar_diag: gstar,
        hstar_diag: hstar,
        big_m,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const LN3_HALF: f64 = 0.549306144334054845697622618461;

    fn iso(c: f64) -> ScatteringKernel {
        ScatteringKernel::isotropic(c).unwrap()
    }

    /// Independent oracle: 200-iteration bisection on 1 = c nu artanh(1/nu).
    fn iso_root_oracle(c: f64) -> f64 {
        let f = |nu: f64| c * nu * 0.5 * (2.0 / (nu - 1.0)).ln_1p() - 1.0;
        let (mut lo, mut hi) = (1.0 + 1e-13, 100.0);
        assert!(f(lo) > 0.0 && f(hi) < 0.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn dispersion_free_streaming_is_one() {
        let v = eval_dispersion(&iso(0.0), Complex64::new(1.7, 2.2)).unwrap();
        assert!((v - 1.0).norm() < 1e-14);
    }

    #[test]
    fn dispersion_isotropic_closed_form() {
        let v = eval_dispersion(&iso(0.5), Complex64::new(2.0, 0.0)).unwrap();
        assert!((v.re - (1.0 - LN3_HALF)).abs() < 1e-13, "{v}");
        assert!(v.im.abs() < 1e-15);
    }

    #[test]
    fn dispersion_is_even() {
        let k = ScatteringKernel::new(0.8, vec![1.0, 0.7, -0.3]).unwrap();
        for &(re, im) in &[(2.0, 0.0), (1.2, 0.8), (0.3, 1.4)] {
            let z = Complex64::new(re, im);
            let a = eval_dispersion(&k, z).unwrap();
            let b = eval_dispersion(&k, -z).unwrap();
            assert!((a - b).norm() / a.norm().max(1.0) < 1e-12);
        }
    }

    #[test]
    fn derivative_against_central_difference() {
        for kernel in [
            iso(0.5),
            ScatteringKernel::new(0.9, vec![1.0, 0.9, 0.5]).unwrap(),
        ] {
            for &nu in &[1.5, 2.0, 3.7] {
                let cs = eval_dispersion_derivative(&kernel, nu).unwrap();
                let h = 1e-6;
                let fd = (dispersion_real(&kernel, nu + h).unwrap()
                    - dispersion_real(&kernel, nu - h).unwrap())
                    / (2.0 * h);
                assert!(
                    (cs - fd).abs() < 1e-8 * (1.0 + fd.abs()),
                    "nu={nu}: {cs} vs {fd}"
                );
            }
        }
        assert!(eval_dispersion_derivative(&iso(0.0), 2.0).unwrap().abs() < 1e-14);
    }

    #[test]
    fn free_streaming_spectrum_is_empty() {
        let s = find_discrete_spectrum(&iso(0.0)).unwrap();
        assert!(s.roots().is_empty());
    }

    #[test]
    fn isotropic_roots_match_bisection_oracle() {
        for &c in &[0.3, 0.5, 0.9] {
            let s = find_discrete_spectrum(&iso(c)).unwrap();
            assert_eq!(s.roots().len(), 1, "c={c}");
            let nu = s.roots()[0].nu0;
            let oracle = iso_root_oracle(c);
            assert!((nu - oracle).abs() < 1e-10, "c={c}: {nu} vs {oracle}");
            // residual check
            let res = dispersion_real(&iso(c), nu).unwrap().abs();
            assert!(res < 1e-12, "c={c} residual {res:.3e}");
            // root of evenness
            let neg = eval_dispersion(&iso(c), Complex64::new(-nu, 0.0)).unwrap();
            assert!(neg.norm() < 1e-10);
        }
        // spot value from the oracle itself
        assert!((iso_root_oracle(0.5) - 1.0444).abs() < 1e-4);
    }

    #[test]
    fn small_c_root_near_endpoint_is_found() {
        // c = 0.1: nu_0 - 1 ~ 2 e^{-20}, far below any uniform grid cell.
        let s = find_discrete_spectrum(&iso(0.1)).unwrap();
        assert_eq!(s.roots().len(), 1);
        let nu = s.roots()[0].nu0;
        let oracle = iso_root_oracle(0.1);
        assert!((nu - oracle).abs() < 1e-10, "{nu} vs {oracle}");
        assert!(nu > 1.0 + ROOT_GUARD);
    }

    #[test]
    fn anisotropic_spectrum_has_positive_normalization() {
        let k = ScatteringKernel::new(0.9, vec![1.0, 0.9, 0.5]).unwrap();
        let s = find_discrete_spectrum(&k).unwrap();
        assert!(!s.roots().is_empty());
        for m in s.roots() {
            assert!(m.nu0 > 1.0);
            assert!(m.big_m > 0.0, "M_L(nu_0) = {}", m.big_m);
            assert!(m.lambda_prime.is_finite());
            let (lo, hi) = m.bracket;
            assert!(
                lo <= m.nu0 && m.nu0 <= hi,
                "bracket {lo}..{hi} vs {}",
                m.nu0
            );
        }
    }

    #[test]
    fn cut_free_streaming() {
        let e = eval_cut(&iso(0.0), 0.5).unwrap();
        assert!((e.lambda_star - 1.0).abs() < 1e-14);
        assert!((e.big_m - 0.5).abs() < 1e-14);
        assert!(eval_cut(&iso(0.0), 1.0).is_err());
        assert!(eval_cut(&iso(0.0), 0.0).is_err());
    }

    #[test]
    fn cut_isotropic_values() {
        let e = eval_cut(&iso(0.9), 0.5).unwrap();
        let expect = 1.0 - 0.9 * 0.5 * LN3_HALF;
        assert!((e.lambda_star - expect).abs() < 1e-13, "{}", e.lambda_star);
        let half = 0.5 * std::f64::consts::PI * 0.9 * 0.5;
        let m = 0.5 * (expect * expect + half * half);
        assert!((e.big_m - m).abs() < 1e-13);
        assert!((e.lambda_plus.im - half).abs() < 1e-14);
        assert!((e.lambda_minus.im + half).abs() < 1e-14);
    }

    #[test]
    fn boundary_value_convergence_onto_cut() {
        // Lambda(nu ± i eps) -> Lambda±(nu) at eps = 1e-7, abs tol 1e-5
        let kernels = [
            iso(0.5),
            ScatteringKernel::new(0.9, vec![1.0, 0.9, 0.5]).unwrap(),
        ];
        for k in &kernels {
            for &nu in &[0.1, 0.5, 0.9] {
                let cut = eval_cut(k, nu).unwrap();
                for &(sign, expect) in &[(1.0, cut.lambda_plus), (-1.0, cut.lambda_minus)] {
                    let z = Complex64::new(nu, sign * 1e-7);
                    let lam = eval_dispersion(k, z).unwrap();
                    assert!(
                        (lam - expect).norm() < 1e-5,
                        "L={} nu={nu} sign={sign}: {lam} vs {expect}",
                        k.order()
                    );
                }
            }
        }
    }

    #[test]
    fn big_m_positive_across_cut() {
        let kernels = [
            iso(0.3),
            iso(0.9),
            ScatteringKernel::new(0.9, vec![1.0, 0.9, 0.5]).unwrap(),
        ];
        for k in &kernels {
            for i in 1..1000 {
                let nu = i as f64 / 1000.0;
                let e = eval_cut(k, nu).unwrap();
                assert!(e.big_m > 0.0, "L={} nu={nu}", k.order());
            }
        }
    }

    #[test]
    fn gamma_star_matches_wronskian_combination() {
        // gamma* from the series definition equals the on-cut Wronskian form
        // (L+1)[rho_{L+1} Q*_L - rho_L Q*_{L+1}].
        let k = ScatteringKernel::new(0.8, vec![1.0, 0.4, 0.2]).unwrap();
        for &nu in &[0.2, 0.55, 0.93] {
            let e = eval_cut(&k, nu).unwrap();
            let big_l = k.order();
            let (_, rho) = gr_seq_real(&k, nu, big_l + 1);
            let qs = legendre::qstar_seq(nu, big_l + 1).unwrap();
            let lf = (big_l + 1) as f64;
            let w = lf * (rho[big_l + 1] * qs[big_l] - rho[big_l] * qs[big_l + 1]);
            assert!(
                (e.gamma_star - w).abs() < 1e-12 * (1.0 + w.abs()),
                "nu={nu}"
            );
        }
    }
}
