//! Chandrasekhar polynomials of the first kind g_l and second kind rho_l,
//! their omega-weighted partial sums, the particular-solution kernel chi_l,
//! and the Wronskian-type surface functions Lambda_l, gamma_l, sigma_l,
//! theta_l.
//!
//! Both kinds satisfy z h_l f_l - (l+1) f_{l+1} - l f_{l-1} = 0 with
//! h_l = 2l+1 - c omega_l (2l+1 beyond the truncation order), from the
//! starting values g_0 = 1 and rho_0 = 0, rho_1 = z. Those starting values
//! pin the Liouville-Ostrogradski invariant
//!     l [rho_l g_{l-1} - g_l rho_{l-1}] = z   for every l >= 1,
//! the discrete analogue of a Wronskian, which the table verifies at build
//! time.

use num_complex::Complex64;

use crate::kernel::ScatteringKernel;
use crate::legendre::{p_seq, p_seq_real, LegendreTable};
use crate::{Error, Result};

/// Relative tolerance on the Liouville-Ostrogradski invariant at build time.
const LO_BUILD_TOL: f64 = 1e-8;

/// Immutable table of g_l and rho_l at a fixed complex argument.
#[derive(Debug, Clone)]
pub struct PolyTable {
    kernel: ScatteringKernel,
    argument: Complex64,
    max_degree: usize,
    g_values: Vec<Complex64>,
    rho_values: Vec<Complex64>,
}

/// Wronskian-type combinations of (g, rho) with (P, Q) at one degree:
///   Lambda_l = (l+1)[g_{l+1} Q_l - g_l Q_{l+1}]
///   gamma_l  = (l+1)[rho_{l+1} Q_l - rho_l Q_{l+1}]
///   sigma_l  = (l+1)[g_l P_{l+1} - g_{l+1} P_l]      (= c z g*_l(z, z))
///   theta_l  = (l+1)[rho_l P_{l+1} - rho_{l+1} P_l]  (= z [c h*_l(z, z) - 1])
#[derive(Debug, Clone, Copy)]
pub struct SurfaceFunctions {
    pub lambda_l: Complex64,
    pub gamma_l: Complex64,
    pub sigma_l: Complex64,
    pub theta_l: Complex64,
}

impl PolyTable {
    /// Fill g_0..g_N and rho_0..rho_N by upward recurrence and verify the
    /// Liouville-Ostrogradski invariant at every degree.
    pub fn build(kernel: &ScatteringKernel, z: Complex64, max_degree: usize) -> Result<Self> {
        let n = max_degree.max(1);
        let mut g = Vec::with_capacity(n + 1);
        let mut rho = Vec::with_capacity(n + 1);
        g.push(Complex64::new(1.0, 0.0));
        g.push(z * kernel.h(0));
        rho.push(Complex64::new(0.0, 0.0));
        rho.push(z);
        for l in 1..n {
            let lf = l as f64;
            let h = kernel.h(l);
            g.push((z * h * g[l] - lf * g[l - 1]) / (lf + 1.0));
            rho.push((z * h * rho[l] - lf * rho[l - 1]) / (lf + 1.0));
        }

        let table = Self {
            kernel: kernel.clone(),
            argument: z,
            max_degree: n,
            g_values: g,
            rho_values: rho,
        };
        if z.norm() > 0.0 {
            let res = table.lo_residual();
            if res > LO_BUILD_TOL {
                return Err(Error::Instability {
                    what: format!("Liouville-Ostrogradski invariant at z = {z}"),
                    residual: res,
                });
            }
        }
        Ok(table)
    }

    pub fn kernel(&self) -> &ScatteringKernel {
        &self.kernel
    }

    pub fn argument(&self) -> Complex64 {
        self.argument
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn g(&self, l: usize) -> Complex64 {
        self.g_values[l]
    }

    pub fn rho(&self, l: usize) -> Complex64 {
        self.rho_values[l]
    }

    /// Worst relative residual of l[rho_l g_{l-1} - g_l rho_{l-1}] = z.
    ///
    /// The Wronskian combination cancels two products that grow with degree;
    /// once their magnitude passes ~1e5 |z| the f64 cancellation noise alone
    /// exceeds the target, so higher degrees are skipped. Degree 1 (which
    /// pins the starting values, the usual failure mode) is always checked.
    pub fn lo_residual(&self) -> f64 {
        let z = self.argument;
        let zn = z.norm();
        if zn == 0.0 {
            return 0.0;
        }
        let mut worst = 0.0f64;
        for l in 1..=self.max_degree {
            let lf = l as f64;
            let scale = self.rho_values[l].norm() * self.g_values[l - 1].norm()
                + self.g_values[l].norm() * self.rho_values[l - 1].norm();
            if l > 1 && scale > 1e4 * zn {
                break;
            }
            let w = lf
                * (self.rho_values[l] * self.g_values[l - 1]
                    - self.g_values[l] * self.rho_values[l - 1]);
            worst = worst.max((w - z).norm() / zn);
        }
        worst
    }

    /// Weighted partial sums g*_l(z, mu) = sum_{j<=min(l,L)} omega_j g_j P_j(mu)
    /// and h*_l(z, mu) built on rho. The sums saturate at the truncation order.
    pub fn partial_sums(&self, l: usize, mu: f64) -> (Complex64, Complex64) {
        let top = l.min(self.kernel.order());
        let p = p_seq_real(mu, top);
        let mut gs = Complex64::new(0.0, 0.0);
        let mut hs = Complex64::new(0.0, 0.0);
        for j in 0..=top {
            let w = self.kernel.omega(j) * p[j];
            gs += w * self.g_values[j];
            hs += w * self.rho_values[j];
        }
        (gs, hs)
    }

    /// Diagonal partial sums g*_l(z, z), h*_l(z, z) with complex P_j(z).
    pub fn partial_sums_diag(&self, l: usize) -> (Complex64, Complex64) {
        let top = l.min(self.kernel.order());
        let p = p_seq(self.argument, top);
        let mut gs = Complex64::new(0.0, 0.0);
        let mut hs = Complex64::new(0.0, 0.0);
        for j in 0..=top {
            let w = self.kernel.omega(j) * p[j];
            gs += w * self.g_values[j];
            hs += w * self.rho_values[j];
        }
        (gs, hs)
    }

    /// chi_l(z, mu) = sum_{j<=l} (2j+1) P_j(mu) [rho_l g_j - g_l rho_j],
    /// by the direct sum.
    pub fn chi(&self, l: usize, mu: f64) -> Complex64 {
        let p = p_seq_real(mu, l);
        let gl = self.g_values[l];
        let rl = self.rho_values[l];
        let mut s = Complex64::new(0.0, 0.0);
        for j in 0..=l {
            s += (2 * j + 1) as f64 * p[j] * (rl * self.g_values[j] - gl * self.rho_values[j]);
        }
        s
    }

    /// chi_l via the Darboux closed form
    /// z/(z-mu) { -P_l(mu) + c rho_l g*_l(z,mu) - g_l [c h*_l(z,mu) - 1] },
    /// an independent route used as a cross check.
    pub fn chi_closed_form(&self, l: usize, mu: f64) -> Complex64 {
        let z = self.argument;
        let c = self.kernel.c();
        let (gs, hs) = self.partial_sums(l, mu);
        let pl = p_seq_real(mu, l)[l];
        z / (z - mu) * (-pl + c * self.rho_values[l] * gs - self.g_values[l] * (c * hs - 1.0))
    }

    /// Surface functions at degree l, from this table and a Legendre table at
    /// the same off-cut argument (degree l+1 must be available in both).
    pub fn surface_functions(
        &self,
        legendre: &LegendreTable,
        l: usize,
    ) -> Result<SurfaceFunctions> {
        if (legendre.argument() - self.argument).norm() > 1e-13 * (1.0 + self.argument.norm()) {
            return Err(Error::Domain(format!(
                "surface functions need matching arguments, got {} and {}",
                self.argument,
                legendre.argument()
            )));
        }
        if l + 1 > self.max_degree || l + 1 > legendre.max_degree() + 1 {
            return Err(Error::Domain(format!(
                "surface functions at degree {l} need degree {} in both tables",
                l + 1
            )));
        }
        let lf = (l + 1) as f64;
        let (gl, gl1) = (self.g_values[l], self.g_values[l + 1]);
        let (rl, rl1) = (self.rho_values[l], self.rho_values[l + 1]);
        let (pl, pl1) = (legendre.p(l), legendre.p(l + 1));
        let (ql, ql1) = (legendre.q(l)?, legendre.q(l + 1)?);
        Ok(SurfaceFunctions {
            lambda_l: lf * (gl1 * ql - gl * ql1),
            gamma_l: lf * (rl1 * ql - rl * ql1),
            sigma_l: lf * (gl * pl1 - gl1 * pl),
            theta_l: lf * (rl * pl1 - rl1 * pl),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::legendre;
    use proptest::prelude::*;

    const LN3_HALF: f64 = 0.549306144334054845697622618461;

    fn iso(c: f64) -> ScatteringKernel {
        ScatteringKernel::isotropic(c).unwrap()
    }

    #[test]
    fn starting_values() {
        let z = Complex64::new(2.0, 0.0);
        let t = PolyTable::build(&iso(0.5), z, 4).unwrap();
        assert_eq!(t.g(0), Complex64::new(1.0, 0.0));
        assert_eq!(t.rho(0), Complex64::new(0.0, 0.0));
        assert_eq!(t.rho(1), z);
        // g_1 = z (1 - c) for an isotropic kernel
        assert!((t.g(1) - Complex64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn lo_invariant_at_l1_is_exact() {
        let z = Complex64::new(2.0, 0.0);
        let t = PolyTable::build(&iso(0.5), z, 3).unwrap();
        let w = t.rho(1) * t.g(0) - t.g(1) * t.rho(0);
        assert!((w - z).norm() < 1e-15);
    }

    #[test]
    fn partial_sums_trivial_and_saturating() {
        let t = PolyTable::build(&iso(0.5), Complex64::new(2.0, 0.0), 6).unwrap();
        let (gs, hs) = t.partial_sums(0, 0.77);
        assert!((gs - 1.0).norm() < 1e-15);
        assert!(hs.norm() < 1e-15);
        // saturation: isotropic L = 0, any l gives the same single term
        let (gs5, _) = t.partial_sums(5, 0.3);
        assert!((gs5 - 1.0).norm() < 1e-15);
    }

    #[test]
    fn partial_sums_anisotropic_hand_value() {
        let k = ScatteringKernel::new(0.9, vec![1.0, 0.9]).unwrap();
        let t = PolyTable::build(&k, Complex64::new(2.0, 0.0), 3).unwrap();
        // g_1 = z h_0 = 2 (1 - 0.9) = 0.2; at mu = 1: g* = 1 + 0.9 * 0.2
        let (gs, _) = t.partial_sums(1, 1.0);
        assert!((gs - Complex64::new(1.18, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn chi_low_degrees() {
        let z = Complex64::new(2.0, 0.0);
        let t = PolyTable::build(&iso(0.5), z, 4).unwrap();
        assert!(t.chi(0, 0.3).norm() < 1e-15);
        assert!((t.chi(1, -0.7) - z).norm() < 1e-14);
    }

    #[test]
    fn chi_direct_matches_closed_form() {
        let kernels = [
            iso(0.5),
            ScatteringKernel::new(0.9, vec![1.0, 0.9, 0.5]).unwrap(),
        ];
        for k in &kernels {
            for &(re, im) in &[(2.0, 0.0), (1.3, 0.8), (-0.4, 1.1)] {
                let z = Complex64::new(re, im);
                let t = PolyTable::build(k, z, 8).unwrap();
                for l in 0..=8 {
                    for &mu in &[0.0, 0.35, -0.9] {
                        let a = t.chi(l, mu);
                        let b = t.chi_closed_form(l, mu);
                        let scale = a.norm().max(b.norm()).max(1.0);
                        assert!(
                            (a - b).norm() / scale < 1e-12,
                            "kernel L={} z={z} l={l} mu={mu}",
                            k.order()
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn surface_functions_isotropic_values() {
        let z = Complex64::new(2.0, 0.0);
        let k = iso(0.5);
        let t = PolyTable::build(&k, z, 2).unwrap();
        let leg = LegendreTable::off_cut(z, 2).unwrap();
        let s = t.surface_functions(&leg, 0).unwrap();
        // Lambda_0 = 1 - c z Q_0, gamma_0 = z Q_0
        assert!((s.lambda_l - Complex64::new(1.0 - 2.0 * 0.5 * LN3_HALF, 0.0)).norm() < 1e-13);
        assert!((s.gamma_l - Complex64::new(2.0 * LN3_HALF, 0.0)).norm() < 1e-13);
        // Free streaming: Lambda_0 = 1 when c = 0
        let t0 = PolyTable::build(&iso(0.0), z, 2).unwrap();
        let s0 = t0.surface_functions(&leg, 0).unwrap();
        assert!((s0.lambda_l - 1.0).norm() < 1e-14);
    }

    #[test]
    fn sigma_theta_match_diagonal_partial_sums() {
        // sigma_l = c z g*_l(z,z), theta_l = z [c h*_l(z,z) - 1].
        // Past the truncation order the left side keeps cancelling growing
        // products while the right saturates, so the check stays within L+2.
        let k = ScatteringKernel::new(0.85, vec![1.0, 0.6, -0.2, 0.1]).unwrap();
        let z = Complex64::new(1.6, 0.5);
        let t = PolyTable::build(&k, z, 9).unwrap();
        let leg = LegendreTable::off_cut(z, 9).unwrap();
        for l in 0..=k.order() + 2 {
            let s = t.surface_functions(&leg, l).unwrap();
            let (gs, hs) = t.partial_sums_diag(l);
            let a = k.c() * z * gs;
            let b = z * (k.c() * hs - 1.0);
            assert!((s.sigma_l - a).norm() / a.norm().max(1.0) < 1e-10, "l={l}");
            assert!((s.theta_l - b).norm() / b.norm().max(1.0) < 1e-10, "l={l}");
        }
    }

    #[test]
    fn surface_wronskian_identity() {
        // g_l gamma_l - rho_l Lambda_l = z Q_l
        let k = ScatteringKernel::new(0.7, vec![1.0, 0.3, 0.9]).unwrap();
        let z = Complex64::new(-1.8, 0.9);
        let t = PolyTable::build(&k, z, 10).unwrap();
        let leg = LegendreTable::off_cut(z, 10).unwrap();
        for l in 0..=9 {
            let s = t.surface_functions(&leg, l).unwrap();
            let lhs = t.g(l) * s.gamma_l - t.rho(l) * s.lambda_l;
            let rhs = z * leg.q(l).unwrap();
            assert!(
                (lhs - rhs).norm() / rhs.norm().max(1.0) < 1e-11,
                "l={l}: {lhs} vs {rhs}"
            );
        }
    }

    #[test]
    fn extension_formulas_beyond_truncation() {
        // For l >= L: g_l = Lambda_L P_l + sigma_L Q_l and
        //             rho_l = gamma_L P_l + theta_L Q_l
        let k = ScatteringKernel::new(0.9, vec![1.0, 0.9, 0.5]).unwrap();
        let big_l = k.order();
        for &(re, im) in &[(2.0, 0.3), (1.4, -0.9), (-2.3, 0.6)] {
            let z = Complex64::new(re, im);
            let t = PolyTable::build(&k, z, big_l + 10).unwrap();
            let leg = LegendreTable::off_cut(z, big_l + 10).unwrap();
            let s = t.surface_functions(&leg, big_l).unwrap();
            for l in big_l + 1..=big_l + 10 {
                let ge = s.lambda_l * leg.p(l) + s.sigma_l * leg.q(l).unwrap();
                let re_ = s.gamma_l * leg.p(l) + s.theta_l * leg.q(l).unwrap();
                let g_rel = (t.g(l) - ge).norm() / t.g(l).norm();
                let r_rel = (t.rho(l) - re_).norm() / t.rho(l).norm();
                assert!(g_rel < 1e-8, "g ext l={l} rel={g_rel:.2e}");
                assert!(r_rel < 1e-8, "rho ext l={l} rel={r_rel:.2e}");
            }
        }
    }

    #[test]
    fn t1_pins_sign_convention() {
        // t_1 = g_1 Q_0 - g_0 Q_1 = 1 - c z Q_0 with omega_0 = 1
        let z = Complex64::new(2.4, 1.1);
        for &c in &[0.1, 0.5, 0.9] {
            let t = PolyTable::build(&iso(c), z, 2).unwrap();
            let q = legendre::q_seq(z, 1).unwrap();
            let t1 = t.g(1) * q[0] - t.g(0) * q[1];
            let expect = 1.0 - c * z * q[0];
            assert!((t1 - expect).norm() < 1e-13);
        }
    }

    #[test]
    fn unscaled_h_breaks_t1() {
        let z = Complex64::new(2.0, 0.0);
        let k = iso(0.5).with_unscaled_h();
        let t = PolyTable::build(&k, z, 2).unwrap();
        let q = legendre::q_seq(z, 1).unwrap();
        let t1 = t.g(1) * q[0] - t.g(0) * q[1];
        let expect = 1.0 - 0.5 * z * q[0];
        assert!((t1 - expect).norm() > 0.1);
    }

    proptest! {
        #[test]
        fn lo_formula_random(c in 0.0f64..0.95, w1 in -0.9f64..0.9, w2 in -0.9f64..0.9,
                             re in -3.0f64..3.0, im in 0.05f64..2.0) {
            let k = ScatteringKernel::new(c, vec![1.0, w1, w2]).unwrap();
            let z = Complex64::new(re, im);
            let t = PolyTable::build(&k, z, 40).unwrap();
            prop_assert!(t.lo_residual() < 1e-10);
        }
    }
}
