//! Legendre polynomials P_l(z), second-kind functions Q_l(z) off the cut,
//! and principal-value functions Q*_l(nu) on the cut (-1, 1).
//!
//! Q_0(z) = (1/2) ln((z+1)/(z-1)) with the principal branch, which places the
//! branch cut exactly on the real segment [-1, 1]. On the cut the boundary
//! values are Q_l(nu ± i0) = Q*_l(nu) ∓ (i pi / 2) P_l(nu) with
//! Q*_l(nu) = P_l(nu) artanh(nu) - W_{l-1}(nu), where W is the second-kind
//! polynomial generated by the Legendre recurrence from W_{-1} = 0, W_0 = 1.
//!
//! Method selection for Q is driven by the per-degree growth factor
//! G = |z + sqrt(z^2 - 1)|^2 of the recurrence: for |z| >= 1.3 each degree
//! comes from a hypergeometric series; otherwise a large G means Q is
//! strongly minimal and a normalized downward (Miller) recurrence is exact,
//! while G near 1 (close to the cut interior) makes the plain upward
//! recurrence benign. Tables carry the Wronskian
//! (l+1)[P_{l+1} Q_l - P_l Q_{l+1}] = 1 as a live accuracy sentinel over
//! whatever values they hold.

use num_complex::Complex64;

use crate::{Error, Result};

/// Half-width of the guard band around the cut: |Im z| below this with
/// |Re z| <= 1 is treated as on-cut to avoid branch ambiguity from rounding.
pub const CUT_GUARD_IM: f64 = 1e-12;

/// Radius beyond which the series evaluator is always used (ratio 1/|z|^2
/// keeps it under ~90 terms there).
const SERIES_RADIUS: f64 = 1.3;

/// Growth factors above this make Q minimal enough for the downward
/// recurrence; below it the upward recurrence is benign.
const MILLER_GROWTH: f64 = 1.5;

/// True when z falls in the on-cut guard band.
pub fn is_on_cut(z: Complex64) -> bool {
    z.im.abs() < CUT_GUARD_IM && z.re.abs() <= 1.0
}

/// artanh for real |x| < 1, written to stay accurate near the endpoints.
pub fn artanh(x: f64) -> f64 {
    0.5 * ((1.0 + x) / (1.0 - x)).ln()
}

/// P_0..P_n at complex argument.
pub fn p_seq(z: Complex64, n: usize) -> Vec<Complex64> {
    let mut p = Vec::with_capacity(n + 1);
    p.push(Complex64::new(1.0, 0.0));
    if n == 0 {
        return p;
    }
    p.push(z);
    for l in 1..n {
        let lf = l as f64;
        let next = ((2.0 * lf + 1.0) * z * p[l] - lf * p[l - 1]) / (lf + 1.0);
        p.push(next);
    }
    p
}

/// P_0..P_n at real argument.
pub fn p_seq_real(x: f64, n: usize) -> Vec<f64> {
    let mut p = Vec::with_capacity(n + 1);
    p.push(1.0);
    if n == 0 {
        return p;
    }
    p.push(x);
    for l in 1..n {
        let lf = l as f64;
        let next = ((2.0 * lf + 1.0) * x * p[l] - lf * p[l - 1]) / (lf + 1.0);
        p.push(next);
    }
    p
}

/// P_l(z) by upward recurrence.
pub fn eval_p(l: usize, z: Complex64) -> Complex64 {
    p_seq(z, l)[l]
}

/// Q_0..Q_n by plain upward recurrence from the principal-branch logarithm.
fn q_upward(z: Complex64, n: usize) -> Vec<Complex64> {
    let q0 = 0.5 * ((z + 1.0) / (z - 1.0)).ln();
    let mut q = Vec::with_capacity(n + 1);
    q.push(q0);
    if n == 0 {
        return q;
    }
    q.push(z * q0 - 1.0);
    for l in 1..n {
        let lf = l as f64;
        let next = ((2.0 * lf + 1.0) * z * q[l] - lf * q[l - 1]) / (lf + 1.0);
        q.push(next);
    }
    q
}

/// Hypergeometric series for Q_l(z), |z| > 1:
/// Q_l(z) = [l! / (2l+1)!!] z^{-l-1} 2F1(l/2 + 1, (l+1)/2; l + 3/2; 1/z^2).
/// Each degree is evaluated independently, so the result is accurate at every
/// degree (no error transport along the recurrence).
fn q_series_one(l: usize, z: Complex64) -> Complex64 {
    // l! / (2l+1)!! built as a product of l/(2l+1) ratios.
    let mut prefactor = 1.0f64;
    for k in 1..=l {
        prefactor *= k as f64 / (2 * k + 1) as f64;
    }
    let a = 0.5 * l as f64 + 1.0;
    let b = 0.5 * (l as f64 + 1.0);
    let c = l as f64 + 1.5;
    let w = 1.0 / (z * z);
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    for nn in 0..700 {
        let nf = nn as f64;
        term *= (a + nf) * (b + nf) / ((c + nf) * (nf + 1.0)) * w;
        sum += term;
        if term.norm() < 1e-17 * sum.norm() {
            break;
        }
    }
    prefactor * z.powi(-(l as i32) - 1) * sum
}

/// Per-degree growth factor |z + sqrt(z^2 - 1)|^2 of the Legendre
/// recurrence (the ratio |P_{l+1}/P_l|^2 asymptotically).
fn growth_factor(z: Complex64) -> f64 {
    let s = (z * z - 1.0).sqrt();
    (z + s).norm_sqr().max((z - s).norm_sqr())
}

/// Q_0..Q_n by normalized downward (Miller) recurrence; valid when the
/// growth factor is comfortably above 1 so that Q is the minimal solution.
fn q_miller(z: Complex64, n: usize, growth: f64) -> Vec<Complex64> {
    // Start high enough that the dominant-solution contamination is crushed
    // by growth^(2 pad) >= ~1e18.
    let pad = (42.0 / growth.ln()).ceil() as usize + 10;
    let start = n + pad;
    let mut raw = vec![Complex64::new(0.0, 0.0); start + 2];
    raw[start] = Complex64::new(1.0, 0.0);
    for l in (1..=start).rev() {
        let lf = l as f64;
        let v = ((2.0 * lf + 1.0) * z * raw[l] - (lf + 1.0) * raw[l + 1]) / lf;
        raw[l - 1] = v;
        if v.norm() > 1e240 {
            for r in raw[l - 1..].iter_mut() {
                *r *= 1e-240;
            }
        }
    }
    let q0 = 0.5 * ((z + 1.0) / (z - 1.0)).ln();
    let scale = q0 / raw[0];
    raw.truncate(n + 1);
    for r in raw.iter_mut() {
        *r *= scale;
    }
    raw
}

/// Q_0..Q_n, each degree accurate on its own (see module docs for the
/// method selection). Errors on the cut guard band.
pub fn q_seq(z: Complex64, n: usize) -> Result<Vec<Complex64>> {
    if is_on_cut(z) {
        return Err(Error::OnCut { z });
    }
    if z.norm() >= SERIES_RADIUS {
        return Ok((0..=n).map(|l| q_series_one(l, z)).collect());
    }
    let growth = growth_factor(z);
    if growth > MILLER_GROWTH {
        Ok(q_miller(z, n, growth))
    } else {
        Ok(q_upward(z, n))
    }
}

/// Q_0..Q_n at real nu > 1, each degree accurate (series / upward hybrid).
pub fn q_seq_real(nu: f64, n: usize) -> Result<Vec<f64>> {
    if !(nu > 1.0) {
        return Err(Error::Domain(format!(
            "q_seq_real requires nu > 1, got {nu}"
        )));
    }
    if nu >= 1.5 {
        let z = Complex64::new(nu, 0.0);
        return Ok((0..=n).map(|l| q_series_one(l, z).re).collect());
    }
    // Close above the cut endpoint the upward recurrence is benign for the
    // low degrees used there.
    let q0 = 0.5 * (2.0 / (nu - 1.0)).ln_1p();
    let mut q = Vec::with_capacity(n + 1);
    q.push(q0);
    if n == 0 {
        return Ok(q);
    }
    q.push(nu * q0 - 1.0);
    for l in 1..n {
        let lf = l as f64;
        let next = ((2.0 * lf + 1.0) * nu * q[l] - lf * q[l - 1]) / (lf + 1.0);
        q.push(next);
    }
    Ok(q)
}

/// W_{-1}..W_{n-1} (second-kind polynomials): entry l holds W_{l-1}, so
/// Q*_l = P_l artanh - w[l]. Generated by (l+1) W_l = (2l+1) nu W_{l-1} - l W_{l-2}.
pub fn w_seq_real(nu: f64, n: usize) -> Vec<f64> {
    let mut w = Vec::with_capacity(n + 1);
    w.push(0.0); // W_{-1}
    if n == 0 {
        return w;
    }
    w.push(1.0); // W_0
    for l in 1..n {
        let lf = l as f64;
        let next = ((2.0 * lf + 1.0) * nu * w[l] - lf * w[l - 1]) / (lf + 1.0);
        w.push(next);
    }
    w
}

/// Complex W_{-1}..W_{n-1}, same layout as [`w_seq_real`].
pub fn w_seq(z: Complex64, n: usize) -> Vec<Complex64> {
    let mut w = Vec::with_capacity(n + 1);
    w.push(Complex64::new(0.0, 0.0));
    if n == 0 {
        return w;
    }
    w.push(Complex64::new(1.0, 0.0));
    for l in 1..n {
        let lf = l as f64;
        let next = ((2.0 * lf + 1.0) * z * w[l] - lf * w[l - 1]) / (lf + 1.0);
        w.push(next);
    }
    w
}

/// Q*_0..Q*_n on the cut, |nu| < 1.
pub fn qstar_seq(nu: f64, n: usize) -> Result<Vec<f64>> {
    if !(nu.abs() < 1.0) {
        return Err(Error::Domain(format!(
            "principal-value Q* requires |nu| < 1, got {nu}"
        )));
    }
    Ok(qstar_seq_with_artanh(nu, artanh(nu), n))
}

/// Q* with the artanh supplied by the caller. Cut integrands substituted as
/// nu = tanh(t) pass their exact t here: recovering it from the rounded nu
/// loses digits once nu hugs the endpoint.
pub(crate) fn qstar_seq_with_artanh(nu: f64, artanh_nu: f64, n: usize) -> Vec<f64> {
    let p = p_seq_real(nu, n);
    let w = w_seq_real(nu, n);
    (0..=n).map(|l| p[l] * artanh_nu - w[l]).collect()
}

/// Q_l(z) off the cut (accurate standalone value).
pub fn eval_q(l: usize, z: Complex64) -> Result<Complex64> {
    Ok(q_seq(z, l)?[l])
}

/// Q*_l(nu) on the cut.
pub fn eval_q_star(l: usize, nu: f64) -> Result<f64> {
    Ok(qstar_seq(nu, l)?[l])
}

/// Immutable table of P_l (and Q_l off cut, Q*_l on cut) at a fixed argument.
#[derive(Debug, Clone)]
pub struct LegendreTable {
    argument: Complex64,
    max_degree: usize,
    p_values: Vec<Complex64>,
    q_values: Option<Vec<Complex64>>,
    qstar_values: Option<Vec<f64>>,
    wronskian_residual: f64,
}

impl LegendreTable {
    /// Table with P and Q at an off-cut argument; the worst Wronskian
    /// residual over all degrees is recorded.
    pub fn off_cut(z: Complex64, max_degree: usize) -> Result<Self> {
        let n = max_degree.max(1);
        let p = p_seq(z, n + 1);
        let q = q_seq(z, n + 1)?;
        let mut worst = 0.0f64;
        for l in 0..=n {
            let lf = (l + 1) as f64;
            let res = (lf * (p[l + 1] * q[l] - p[l] * q[l + 1]) - 1.0).norm();
            worst = worst.max(res);
        }
        Ok(Self {
            argument: z,
            max_degree: n,
            p_values: p,
            q_values: Some(q),
            qstar_values: None,
            wronskian_residual: worst,
        })
    }

    /// Table with P and principal-value Q* at a real on-cut argument.
    pub fn on_cut(nu: f64, max_degree: usize) -> Result<Self> {
        let n = max_degree.max(1);
        let qs = qstar_seq(nu, n + 1)?;
        let p = p_seq(Complex64::new(nu, 0.0), n + 1);
        Ok(Self {
            argument: Complex64::new(nu, 0.0),
            max_degree: n,
            p_values: p,
            q_values: None,
            qstar_values: Some(qs),
            wronskian_residual: 0.0,
        })
    }

    pub fn argument(&self) -> Complex64 {
        self.argument
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    /// P_l; available for l <= max_degree + 1.
    pub fn p(&self, l: usize) -> Complex64 {
        self.p_values[l]
    }

    pub fn q(&self, l: usize) -> Result<Complex64> {
        match &self.q_values {
            Some(q) => Ok(q[l]),
            None => Err(Error::OnCut { z: self.argument }),
        }
    }

    pub fn qstar(&self, l: usize) -> Result<f64> {
        match &self.qstar_values {
            Some(q) => Ok(q[l]),
            None => Err(Error::Domain(
                "Q* values are only present for on-cut tables".into(),
            )),
        }
    }

    /// Worst Wronskian residual |(l+1)(P_{l+1}Q_l - P_l Q_{l+1}) - 1| seen
    /// while building the table (0 for on-cut tables).
    pub fn wronskian_residual(&self) -> f64 {
        self.wronskian_residual
    }

    /// Fails when the recorded Wronskian residual exceeds `tol`.
    pub fn check_stability(&self, tol: f64) -> Result<()> {
        if self.wronskian_residual > tol {
            Err(Error::Instability {
                what: format!("Legendre Q table at {}", self.argument),
                residual: self.wronskian_residual,
            })
        } else {
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const LN3_HALF: f64 = 0.549306144334054845697622618461;

    #[test]
    fn p_trivial_values() {
        assert_eq!(
            eval_p(0, Complex64::new(7.3, -2.0)),
            Complex64::new(1.0, 0.0)
        );
        let p2 = eval_p(2, Complex64::new(0.5, 0.0));
        assert!((p2.re + 0.125).abs() < 1e-15);
        let p3 = eval_p(3, Complex64::new(2.0, 0.0));
        assert!((p3.re - 17.0).abs() < 1e-12);
    }

    #[test]
    fn q_closed_forms() {
        let q0 = eval_q(0, Complex64::new(2.0, 0.0)).unwrap();
        assert!((q0.re - LN3_HALF).abs() < 1e-14, "{q0}");
        let q1 = eval_q(1, Complex64::new(2.0, 0.0)).unwrap();
        assert!((q1.re - (2.0 * LN3_HALF - 1.0)).abs() < 1e-14);
        let q0b = eval_q(0, Complex64::new(3.0, 0.0)).unwrap();
        assert!((q0b.re - 0.5 * 2.0f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn q_rejects_cut_argument() {
        assert!(matches!(
            eval_q(1, Complex64::new(0.3, 0.0)),
            Err(Error::OnCut { .. })
        ));
        // Just outside the guard band is accepted.
        assert!(eval_q(1, Complex64::new(0.3, 1e-9)).is_ok());
    }

    #[test]
    fn qstar_values() {
        assert_eq!(eval_q_star(0, 0.0).unwrap(), 0.0);
        assert!((eval_q_star(0, 0.5).unwrap() - LN3_HALF).abs() < 1e-15);
        assert!((eval_q_star(1, 0.5).unwrap() - (0.5 * LN3_HALF - 1.0)).abs() < 1e-15);
        assert!(eval_q_star(0, 1.0).is_err());
    }

    #[test]
    fn q_satisfies_recurrence_per_degree() {
        // Independent per-degree values must satisfy the three-term
        // recurrence to near machine precision relative to the term size.
        for &(re, im) in &[
            (2.0, 0.0),
            (1.3, 0.4),
            (-2.2, 0.7),
            (0.1, 2.0),
            (1.05, 0.04),
        ] {
            let z = Complex64::new(re, im);
            let q = q_seq(z, 20).unwrap();
            for l in 1..20 {
                let lf = l as f64;
                let res = (2.0 * lf + 1.0) * z * q[l] - lf * q[l - 1] - (lf + 1.0) * q[l + 1];
                let scale = ((2.0 * lf + 1.0) * z * q[l]).norm().max(q[l - 1].norm());
                assert!(
                    res.norm() / scale < 1e-12,
                    "z={z} l={l}: {:.2e}",
                    res.norm() / scale
                );
            }
        }
    }

    #[test]
    fn methods_agree_in_overlap_regions() {
        // series vs Miller around |z| = 1.3, Miller vs upward around G = 1.5
        for &(re, im) in &[(1.31, 0.2), (1.29, 0.2), (1.22, 0.48), (1.02, 0.08)] {
            let z = Complex64::new(re, im);
            let a = q_seq(z, 12).unwrap();
            let growth = growth_factor(z);
            let b = if z.norm() >= SERIES_RADIUS {
                q_miller(z, 12, growth)
            } else if growth > MILLER_GROWTH {
                (0..=12).map(|l| q_series_one(l, z)).collect()
            } else {
                q_miller(z, 12, growth)
            };
            for l in 0..=12 {
                let rel = (a[l] - b[l]).norm() / a[l].norm();
                assert!(rel < 1e-11, "z={z} l={l} rel={rel:.2e}");
            }
        }
    }

    #[test]
    fn q_matches_closed_form_near_cut() {
        let z = Complex64::new(0.5, 1e-7);
        let q = q_seq(z, 6).unwrap();
        let q0 = 0.5 * ((z + 1.0) / (z - 1.0)).ln();
        assert!((q[0] - q0).norm() < 1e-14);
        assert!((q[1] - (z * q0 - 1.0)).norm() < 1e-13);
    }

    #[test]
    fn boundary_values_match_plemelj_form() {
        // Q_l(nu ± i eps) -> Q*_l(nu) ∓ (i pi/2) P_l(nu)
        let eps = 1e-7;
        for &nu in &[0.1, 0.5, 0.9] {
            let qs = qstar_seq(nu, 10).unwrap();
            let p = p_seq_real(nu, 10);
            for &sign in &[1.0, -1.0] {
                let z = Complex64::new(nu, sign * eps);
                let q = q_seq(z, 10).unwrap();
                for l in 0..=10 {
                    let expect = Complex64::new(qs[l], -sign * std::f64::consts::FRAC_PI_2 * p[l]);
                    assert!(
                        (q[l] - expect).norm() < 1e-5,
                        "nu={nu} sign={sign} l={l}: {} vs {expect}",
                        q[l]
                    );
                }
            }
        }
    }

    #[test]
    fn wronskian_residual_stays_small_to_degree_40() {
        // includes points hugging the real axis beyond the cut endpoints
        for &(re, im) in &[
            (2.0, 0.0),
            (1.1, 0.06),
            (-0.4, 0.08),
            (0.0, 1.5),
            (2.5, -1.0),
            (1.2, 1e-3),
            (-1.06, 1e-6),
        ] {
            let t = LegendreTable::off_cut(Complex64::new(re, im), 40).unwrap();
            assert!(
                t.wronskian_residual() < 1e-9,
                "z=({re},{im}) residual {:.3e}",
                t.wronskian_residual()
            );
        }
    }

    #[test]
    fn christoffel_darboux_direct_vs_closed() {
        // sum_{l<=L} ((2l+1)/2) P_l(z) P_l(mu) against the closed two-term form.
        let z = Complex64::new(1.7, 0.9);
        let mu = 0.37;
        for big_l in [1usize, 5, 12, 20] {
            let pz = p_seq(z, big_l + 1);
            let pm = p_seq_real(mu, big_l + 1);
            let mut s = Complex64::new(0.0, 0.0);
            for l in 0..=big_l {
                s += (2 * l + 1) as f64 / 2.0 * pz[l] * pm[l];
            }
            let lf = (big_l + 1) as f64;
            let closed =
                lf / 2.0 * (pz[big_l + 1] * pm[big_l] - pz[big_l] * pm[big_l + 1]) / (z - mu);
            let rel = (s - closed).norm() / closed.norm().max(1.0);
            assert!(rel < 1e-10, "L={big_l} rel={rel:.2e}");
        }
    }

    #[test]
    fn mixed_sum_direct_vs_closed() {
        // sum_{l<=L} ((2l+1)/2) Q_l(z) P_l(mu)
        //   = 1/(2(z-mu)) - (L+1)/2 [P_{L+1}(mu) Q_L(z) - P_L(mu) Q_{L+1}(z)]/(z-mu)
        let z = Complex64::new(-1.4, 0.8);
        let mu = -0.62;
        for big_l in [0usize, 3, 9, 20] {
            let q = q_seq(z, big_l + 1).unwrap();
            let pm = p_seq_real(mu, big_l + 1);
            let mut s = Complex64::new(0.0, 0.0);
            for l in 0..=big_l {
                s += (2 * l + 1) as f64 / 2.0 * q[l] * pm[l];
            }
            let lf = (big_l + 1) as f64;
            let closed = 0.5 / (z - mu)
                - lf / 2.0 * (pm[big_l + 1] * q[big_l] - pm[big_l] * q[big_l + 1]) / (z - mu);
            let rel = (s - closed).norm() / s.norm().max(1e-12);
            assert!(rel < 1e-10, "L={big_l} rel={rel:.2e}");
        }
    }

    proptest! {
        #[test]
        fn parity_of_p(re in -3.0f64..3.0, im in -2.0f64..2.0, l in 0usize..30) {
            let z = Complex64::new(re, im);
            let lhs = eval_p(l, -z);
            let rhs = eval_p(l, z) * if l % 2 == 0 { 1.0 } else { -1.0 };
            let scale = lhs.norm().max(rhs.norm()).max(1.0);
            prop_assert!((lhs - rhs).norm() / scale < 1e-12);
        }

        #[test]
        fn wronskian_holds_for_random_offcut_z(re in -3.0f64..3.0, im in 0.05f64..2.0, l in 0usize..40) {
            let z = Complex64::new(re, im);
            let t = LegendreTable::off_cut(z, l + 1).unwrap();
            let lf = (l + 1) as f64;
            let res = (lf * (t.p(l + 1) * t.q(l).unwrap() - t.p(l) * t.q(l + 1).unwrap()) - 1.0).norm();
            prop_assert!(res < 1e-9, "res={res:.2e}");
        }
    }
}
