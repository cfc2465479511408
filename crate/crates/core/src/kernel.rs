//! Pointwise kernels and the sampled inequalities between them.
//!
//! Every kernel depends on its argument only through `(|ξ|, |η|, |τ|)`, so the
//! hot path is [`KernelSpec::eval_norms`]; [`KernelSpec::eval`] adds the
//! singular-set guard.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, HlsError, Result};
use crate::group::{DilationSpec, GroupPoint};

/// Norms below this are treated as zero.
pub const SINGULAR_GUARD: f64 = 1e-300;

/// Relative slack allowed on pointwise inequalities.
pub const INEQUALITY_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OmegaAParams {
    pub n: usize,
    pub a: f64,
}

impl OmegaAParams {
    pub fn new(n: usize, a: f64) -> Result<Self> {
        check_n(n)?;
        if !(a > 0.0 && a < (n + 1) as f64) {
            return Err(invalid(format!("Omega^a needs 0 < a < n+1, got a={a}")));
        }
        Ok(Self { n, a })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OmegaABParams {
    pub n: usize,
    pub a: f64,
    pub b: f64,
}

impl OmegaABParams {
    /// `a ≥ n·b` is deliberately not enforced here; see [`crate::verifier`].
    pub fn new(n: usize, a: f64, b: f64) -> Result<Self> {
        check_n(n)?;
        if !(a > 0.0 && a < n as f64) {
            return Err(invalid(format!("Omega^ab needs 0 < a < n, got a={a}")));
        }
        if !(b > 0.0 && b < 1.0) {
            return Err(invalid(format!("Omega^ab needs 0 < b < 1, got b={b}")));
        }
        Ok(Self { n, a, b })
    }
}

/// Exponents of the general kernel
/// `|ξ|^{α₁−n} |η|^{α₂−n} |τ|^{β−1} [|ξ||η|/|τ| + |τ|/(|ξ||η|)]^{−ϑ}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VParams {
    pub n: usize,
    pub alpha1: f64,
    pub alpha2: f64,
    pub beta: f64,
    pub theta: f64,
}

impl VParams {
    /// Symmetric kernel `α₁ = α₂ = α` with the sharp `ϑ = |α − nβ|/(n+1)`.
    pub fn symmetric(n: usize, alpha: f64, beta: f64) -> Result<Self> {
        Self::new(n, alpha, alpha, beta, None)
    }

    /// `theta = None` selects the sharp default, which is only defined for
    /// `α₁ = α₂`.
    pub fn new(n: usize, alpha1: f64, alpha2: f64, beta: f64, theta: Option<f64>) -> Result<Self> {
        check_n(n)?;
        for (name, val) in [("alpha1", alpha1), ("alpha2", alpha2), ("beta", beta)] {
            if !val.is_finite() {
                return Err(invalid(format!("{name} must be finite")));
            }
        }
        let theta = match theta {
            Some(t) if t.is_finite() && t >= 0.0 => t,
            Some(t) => return Err(invalid(format!("theta must be >= 0, got {t}"))),
            None if alpha1 == alpha2 => sharp_theta(n, alpha1, beta),
            None => {
                return Err(invalid("theta has no default when alpha1 != alpha2"));
            }
        };
        Ok(Self { n, alpha1, alpha2, beta, theta })
    }

    pub fn is_symmetric(&self) -> bool {
        self.alpha1 == self.alpha2
    }

    /// Exponent sum `α + β` of a symmetric kernel.
    pub fn s(&self) -> f64 {
        self.alpha1 + self.beta
    }

    pub fn has_sharp_theta(&self) -> bool {
        self.is_symmetric() && self.theta == sharp_theta(self.n, self.alpha1, self.beta)
    }
}

/// `|α − nβ| / (n+1)`.
pub fn sharp_theta(n: usize, alpha: f64, beta: f64) -> f64 {
    (alpha - n as f64 * beta).abs() / (n + 1) as f64
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        Err(invalid("block dimension n must be at least 1"))
    } else {
        Ok(())
    }
}

/// Which kernel to evaluate or integrate against.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum KernelSpec {
    OmegaA(OmegaAParams),
    OmegaAB(OmegaABParams),
    V(VParams),
    /// Product kernel `|ξ|^{ns/(n+1)−n} |η|^{ns/(n+1)−n} |τ|^{s/(n+1)−1}`.
    SeparableMajorant { n: usize, s: f64 },
}

impl KernelSpec {
    pub fn separable_majorant(n: usize, s: f64) -> Result<Self> {
        check_n(n)?;
        check_majorant_s(n, s)?;
        Ok(KernelSpec::SeparableMajorant { n, s })
    }

    pub fn n(&self) -> usize {
        match self {
            KernelSpec::OmegaA(p) => p.n,
            KernelSpec::OmegaAB(p) => p.n,
            KernelSpec::V(p) => p.n,
            KernelSpec::SeparableMajorant { n, .. } => *n,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            KernelSpec::OmegaA(_) => "Omega^a",
            KernelSpec::OmegaAB(_) => "Omega^ab",
            KernelSpec::V(_) => "V",
            KernelSpec::SeparableMajorant { .. } => "separable majorant",
        }
    }

    /// Sum `s` such that the kernel is homogeneous of degree `2(s − n − 1)`
    /// under the one-parameter family `δ₁ = δ₂ = δ`.
    pub fn homogeneity_sum(&self) -> f64 {
        match self {
            KernelSpec::OmegaA(p) => p.a,
            KernelSpec::OmegaAB(p) => p.a + p.b,
            KernelSpec::V(p) => 0.5 * (p.alpha1 + p.alpha2) + p.beta,
            KernelSpec::SeparableMajorant { s, .. } => *s,
        }
    }

    /// `c` with `K(D x) = c·K(x)` for every `x`, or `None` when the kernel is
    /// not homogeneous under `d` (any `λ ≠ 1`, or `δ₁ ≠ δ₂` for the radial
    /// kernels).
    pub fn homogeneity_factor(&self, d: &DilationSpec) -> Option<f64> {
        if d.lambda() != 1.0 {
            return None;
        }
        let (du, dv, _) = d.factors();
        let n = self.n() as f64;
        match self {
            KernelSpec::OmegaA(_) | KernelSpec::OmegaAB(_) => {
                (du == dv).then(|| du.powf(2.0 * (self.homogeneity_sum() - n - 1.0)))
            }
            KernelSpec::V(p) => Some(du.powf(p.alpha1 + p.beta - n - 1.0) * dv.powf(p.alpha2 + p.beta - n - 1.0)),
            KernelSpec::SeparableMajorant { n, s } => {
                let (e, g) = majorant_exponents(*n, *s);
                Some((du * dv).powf(e + g))
            }
        }
    }

    /// Range in which the operator integral converges locally; enforced by
    /// the quadrature routines, not by pointwise evaluation.
    pub fn check_integrable(&self) -> Result<()> {
        let n1 = (self.n() + 1) as f64;
        match self {
            KernelSpec::OmegaA(p) => OmegaAParams::new(p.n, p.a).map(|_| ()),
            KernelSpec::OmegaAB(p) => OmegaABParams::new(p.n, p.a, p.b).map(|_| ()),
            KernelSpec::V(p) => {
                for s in [p.alpha1 + p.beta, p.alpha2 + p.beta] {
                    if !(s > 0.0 && s < n1) {
                        return Err(invalid(format!(
                            "V kernel needs 0 < alpha+beta < n+1 for integrability, got {s}"
                        )));
                    }
                }
                Ok(())
            }
            KernelSpec::SeparableMajorant { n, s } => check_majorant_s(*n, *s),
        }
    }

    fn singular_rule(&self) -> SingularRule {
        match self {
            KernelSpec::OmegaA(_) => SingularRule::Origin,
            KernelSpec::OmegaAB(_) => SingularRule::XiEtaPlane,
            KernelSpec::V(_) | KernelSpec::SeparableMajorant { .. } => SingularRule::AnyBlock,
        }
    }

    /// True when a point with these block norms sits on the singular set.
    pub fn is_singular_norms(&self, xi: f64, eta: f64, tau: f64) -> bool {
        match self.singular_rule() {
            SingularRule::Origin => xi < SINGULAR_GUARD && eta < SINGULAR_GUARD && tau < SINGULAR_GUARD,
            SingularRule::XiEtaPlane => xi < SINGULAR_GUARD && eta < SINGULAR_GUARD,
            SingularRule::AnyBlock => xi < SINGULAR_GUARD || eta < SINGULAR_GUARD || tau < SINGULAR_GUARD,
        }
    }

    /// Kernel value from block norms `|ξ|, |η|, |τ|` without the singular
    /// guard.
    #[inline]
    pub fn eval_norms(&self, xi: f64, eta: f64, tau: f64) -> f64 {
        self.stage(xi, eta).at(tau)
    }

    /// Fixes `|ξ|, |η|` so that repeated evaluation along `τ` only pays for
    /// the `τ`-dependent powers.
    #[inline]
    pub fn stage(&self, xi: f64, eta: f64) -> Staged {
        match *self {
            KernelSpec::OmegaA(p) => {
                Staged::Radial { pre: 1.0, r2: xi * xi + eta * eta, exp: -((p.n + 1) as f64 - p.a) }
            }
            KernelSpec::OmegaAB(p) => {
                let r2 = xi * xi + eta * eta;
                Staged::Radial { pre: r2.powf(-(p.n as f64 - p.a)), r2, exp: -(1.0 - p.b) }
            }
            KernelSpec::V(p) => {
                let n = p.n as f64;
                Staged::Bracket {
                    pre: xi.powf(p.alpha1 - n) * eta.powf(p.alpha2 - n),
                    product: xi * eta,
                    tau_exp: p.beta - 1.0,
                    theta: p.theta,
                }
            }
            KernelSpec::SeparableMajorant { n, s } => {
                let (eb, et) = majorant_exponents(n, s);
                Staged::Power { pre: (xi * eta).powf(eb), tau_exp: et }
            }
        }
    }

    pub fn eval(&self, x: &GroupPoint) -> Result<f64> {
        if x.n() != self.n() {
            return Err(HlsError::DimensionMismatch { expected: self.n(), found: x.n() });
        }
        let (xi, eta, tau) = (x.xi_norm(), x.eta_norm(), x.t.abs());
        if self.is_singular_norms(xi, eta, tau) {
            return Err(HlsError::SingularPoint { kernel: self.name() });
        }
        Ok(self.eval_norms(xi, eta, tau))
    }
}

/// A kernel with its `(ξ, η)` dependence already evaluated.
#[derive(Debug, Clone, Copy)]
pub enum Staged {
    /// `pre · (r2 + τ)^exp`
    Radial { pre: f64, r2: f64, exp: f64 },
    /// `pre · τ^{tau_exp} · (P/τ + τ/P)^{−θ}`
    Bracket { pre: f64, product: f64, tau_exp: f64, theta: f64 },
    /// `pre · τ^{tau_exp}`
    Power { pre: f64, tau_exp: f64 },
}

impl Staged {
    #[inline]
    pub fn at(&self, tau: f64) -> f64 {
        match *self {
            Staged::Radial { pre, r2, exp } => pre * (r2 + tau).powf(exp),
            Staged::Bracket { pre, product, tau_exp, theta } => {
                let val = pre * tau.powf(tau_exp);
                if theta == 0.0 {
                    val
                } else {
                    let r = product / tau;
                    val * (r + 1.0 / r).powf(-theta)
                }
            }
            Staged::Power { pre, tau_exp } => pre * tau.powf(tau_exp),
        }
    }
}

#[derive(Clone, Copy)]
enum SingularRule {
    Origin,
    XiEtaPlane,
    AnyBlock,
}

fn check_majorant_s(n: usize, s: f64) -> Result<()> {
    if !(s > 0.0 && s < (n + 1) as f64) {
        return Err(invalid(format!("separable majorant needs 0 < s < n+1, got s={s}")));
    }
    Ok(())
}

/// Block and `τ` exponents `(ns/(n+1) − n, s/(n+1) − 1)` of the majorant.
pub fn majorant_exponents(n: usize, s: f64) -> (f64, f64) {
    let n = n as f64;
    let ratio = s / (n + 1.0);
    (n * ratio - n, ratio - 1.0)
}

pub fn eval_omega_a(p: &OmegaAParams, x: &GroupPoint) -> Result<f64> {
    KernelSpec::OmegaA(*p).eval(x)
}

pub fn eval_omega_ab(p: &OmegaABParams, x: &GroupPoint) -> Result<f64> {
    KernelSpec::OmegaAB(*p).eval(x)
}

pub fn eval_v(p: &VParams, x: &GroupPoint) -> Result<f64> {
    KernelSpec::V(*p).eval(x)
}

pub fn eval_separable_majorant(n: usize, s: f64, x: &GroupPoint) -> Result<f64> {
    KernelSpec::separable_majorant(n, s)?.eval(x)
}

/// Exponent pairs splitting `Ω^{ab}` into two `V` kernels.
///
/// On `|ξ||η| ≥ |τ|` the pair `(a, b)` dominates; on `|ξ||η| ≤ |τ|` the pair
/// `(a+θ−1, b−θ+1)` does, for any `b < θ < 1 − (a−nb)/(n+1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DominanceWitness {
    pub a: f64,
    pub b: f64,
    pub n: usize,
    pub theta: f64,
    pub region1_pair: (f64, f64),
    pub region2_pair: (f64, f64),
}

impl DominanceWitness {
    pub fn omega(&self) -> OmegaABParams {
        OmegaABParams { n: self.n, a: self.a, b: self.b }
    }

    pub fn region1_kernel(&self) -> VParams {
        let (alpha, beta) = self.region1_pair;
        VParams { n: self.n, alpha1: alpha, alpha2: alpha, beta, theta: sharp_theta(self.n, alpha, beta) }
    }

    pub fn region2_kernel(&self) -> VParams {
        let (alpha, beta) = self.region2_pair;
        VParams { n: self.n, alpha1: alpha, alpha2: alpha, beta, theta: sharp_theta(self.n, alpha, beta) }
    }
}

/// Open interval `(b, 1 − (a − nb)/(n+1))` for the splitting parameter.
pub fn theta_interval(a: f64, b: f64, n: usize) -> (f64, f64) {
    let nf = n as f64;
    (b, 1.0 - (a - nf * b) / (nf + 1.0))
}

pub fn dominance_pairs(a: f64, b: f64, n: usize, theta: Option<f64>) -> Result<DominanceWitness> {
    OmegaABParams::new(n, a, b)?;
    if a < n as f64 * b {
        return Err(invalid(format!("dominance needs a >= n*b, got a={a}, n*b={}", n as f64 * b)));
    }
    let (lo, hi) = theta_interval(a, b, n);
    let theta = theta.unwrap_or(0.5 * (lo + hi));
    if !(theta > lo && theta < hi) {
        return Err(invalid(format!("theta={theta} outside the open interval ({lo}, {hi})")));
    }
    Ok(DominanceWitness {
        a,
        b,
        n,
        theta,
        region1_pair: (a, b),
        region2_pair: (a + theta - 1.0, b - theta + 1.0),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DominanceCheck {
    /// `Ω^{ab} ≤ V` with the first pair, on `|ξ||η| ≥ |τ|`.
    Region1,
    /// `Ω^{ab} ≤ V` with the second pair, on `|ξ||η| ≤ |τ|`.
    Region2,
    /// `Ω^{ab} ≤ V₁ + V₂` everywhere.
    Sum,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DominanceViolation {
    pub point: GroupPoint,
    pub check: DominanceCheck,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct DominanceReport {
    pub region1_checked: usize,
    pub region2_checked: usize,
    /// Smallest `rhs / lhs` seen over all checks.
    pub min_ratio: f64,
    pub violations: Vec<DominanceViolation>,
}

impl DominanceReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

#[inline]
fn leq_with_slack(lhs: f64, rhs: f64) -> bool {
    lhs <= rhs * (1.0 + INEQUALITY_SLACK)
}

pub fn check_pointwise_dominance(w: &DominanceWitness, samples: &[GroupPoint]) -> Result<DominanceReport> {
    let omega = KernelSpec::OmegaAB(w.omega());
    let v1 = KernelSpec::V(w.region1_kernel());
    let v2 = KernelSpec::V(w.region2_kernel());
    let mut report = DominanceReport { min_ratio: f64::INFINITY, ..Default::default() };

    for x in samples {
        let lhs = omega.eval(x)?;
        let r1 = v1.eval(x)?;
        let r2 = v2.eval(x)?;
        let product = x.xi_norm() * x.eta_norm();
        let tau = x.t.abs();

        let mut checks = Vec::with_capacity(3);
        if product >= tau {
            report.region1_checked += 1;
            checks.push((DominanceCheck::Region1, r1));
        }
        if product <= tau {
            report.region2_checked += 1;
            checks.push((DominanceCheck::Region2, r2));
        }
        checks.push((DominanceCheck::Sum, r1 + r2));

        for (check, rhs) in checks {
            report.min_ratio = report.min_ratio.min(rhs / lhs);
            if !leq_with_slack(lhs, rhs) {
                report.violations.push(DominanceViolation { point: x.clone(), check, lhs, rhs });
            }
        }
    }
    Ok(report)
}

/// Lower multiplier `m(λ)`: `λ^ϑ` for `λ < 1`, `λ^{−ϑ}` for `λ ≥ 1`.
pub fn lambda_multiplier(theta: f64, lambda: f64) -> f64 {
    if lambda < 1.0 {
        lambda.powf(theta)
    } else {
        lambda.powf(-theta)
    }
}

/// Checks `[xy/(λt) + λt/xy]^{−ϑ} ≥ m(λ)·[xy/t + t/xy]^{−ϑ}`.
pub fn check_lambda_bracket_bound(theta: f64, xy: f64, t: f64, lambda: f64) -> Result<bool> {
    if !(theta >= 0.0 && theta.is_finite()) {
        return Err(invalid(format!("theta must be >= 0, got {theta}")));
    }
    for (name, val) in [("xy", xy), ("t", t), ("lambda", lambda)] {
        if !(val > 0.0 && val.is_finite()) {
            return Err(invalid(format!("{name} must be positive, got {val}")));
        }
    }
    let (lhs, rhs) = lambda_bracket_sides(theta, xy, t, lambda);
    Ok(rhs <= lhs * (1.0 + INEQUALITY_SLACK))
}

/// Both sides of the bracket bound, `(lhs, rhs)`.
pub fn lambda_bracket_sides(theta: f64, xy: f64, t: f64, lambda: f64) -> (f64, f64) {
    let scaled = xy / (lambda * t);
    let plain = xy / t;
    let lhs = (scaled + 1.0 / scaled).powf(-theta);
    let rhs = lambda_multiplier(theta, lambda) * (plain + 1.0 / plain).powf(-theta);
    (lhs, rhs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(u: f64, v: f64, t: f64) -> GroupPoint {
        GroupPoint::scalar(u, v, t)
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn omega_a_examples() {
        let k = OmegaAParams::new(1, 1.0).unwrap();
        assert!(close(eval_omega_a(&k, &p(1., 1., 2.)).unwrap(), 0.25, 1e-15));
        assert!(close(eval_omega_a(&k, &p(0.6, 0.0, 0.64)).unwrap(), 1.0, 1e-15));
        let k = OmegaAParams::new(1, 0.5).unwrap();
        assert!(close(eval_omega_a(&k, &p(0., 0., 4.)).unwrap(), 0.125, 1e-15));
        assert!(matches!(eval_omega_a(&k, &p(0., 0., 0.)), Err(HlsError::SingularPoint { .. })));
    }

    #[test]
    fn omega_ab_examples() {
        let k = OmegaABParams::new(1, 0.5, 0.25).unwrap();
        assert!(close(eval_omega_ab(&k, &p(1., 0., 3.)).unwrap(), 0.353553, 1e-6));
        assert!(close(eval_omega_ab(&k, &p(2., 1., 1.)).unwrap(), 0.11666, 1e-5));
        assert!(close(eval_omega_ab(&OmegaABParams::new(1, 0.3, 0.9).unwrap(), &p(0.0, 1.0, 0.0)).unwrap(), 1.0, 1e-15));
        // τ alone does not regularize the (ξ,η) = 0 plane.
        assert!(eval_omega_ab(&k, &p(0., 0., 5.)).is_err());
        assert!(eval_omega_ab(&k, &p(1e-301, 0., 5.)).is_err());
    }

    #[test]
    fn v_examples() {
        let k = VParams::symmetric(1, 0.5, 0.25).unwrap();
        assert_eq!(k.theta, 0.125);
        // 2^{-1/2}·2.5^{-1/8} = 0.630583…
        assert!(close(eval_v(&k, &p(2., 1., 1.)).unwrap(), 2f64.powf(-0.5) * 2.5f64.powf(-0.125), 1e-15));
        assert!(close(eval_v(&k, &p(2., 1., 1.)).unwrap(), 0.63057, 5e-5));

        let flat = VParams::symmetric(1, 0.25, 0.25).unwrap();
        assert_eq!(flat.theta, 0.0);
        assert_eq!(eval_v(&flat, &p(1., 1., 1.)).unwrap(), 1.0);

        let general = VParams::new(1, 0.25, 0.5, 0.25, Some(0.2)).unwrap();
        assert!(close(eval_v(&general, &p(4., 1., 2.)).unwrap(), 0.17502, 1e-5));

        for bad in [p(0., 1., 1.), p(1., 0., 1.), p(1., 1., 0.)] {
            assert!(eval_v(&k, &bad).is_err());
        }
    }

    #[test]
    fn v_theta_defaults() {
        assert!(VParams::new(1, 0.2, 0.3, 0.1, None).is_err());
        assert!(VParams::new(1, 0.2, 0.2, 0.1, Some(-0.1)).is_err());
        let k = VParams::new(2, 1.0, 1.0, 0.2, None).unwrap();
        assert!(close(k.theta, 0.6 / 3.0, 1e-15));
        assert!(k.has_sharp_theta());
    }

    #[test]
    fn majorant_examples() {
        assert!(close(eval_separable_majorant(1, 0.75, &p(2., 1., 1.)).unwrap(), 0.64842, 1e-5));
        assert_eq!(eval_separable_majorant(1, 1.3, &p(1., 1., 1.)).unwrap(), 1.0);
        let v = eval_v(&VParams::symmetric(1, 0.5, 0.25).unwrap(), &p(2., 1., 1.)).unwrap();
        assert!(eval_separable_majorant(1, 0.75, &p(2., 1., 1.)).unwrap() >= v);
        assert!(eval_separable_majorant(1, 0.0, &p(2., 1., 1.)).is_err());
        assert!(eval_separable_majorant(1, 2.0, &p(2., 1., 1.)).is_err());
    }

    #[test]
    fn dominance_pair_examples() {
        let w = dominance_pairs(0.5, 0.25, 1, None).unwrap();
        assert_eq!(theta_interval(0.5, 0.25, 1), (0.25, 0.875));
        assert_eq!(w.theta, 0.5625);
        assert_eq!(w.region1_pair, (0.5, 0.25));
        assert!(close(w.region2_pair.0, 0.0625, 1e-15));
        assert!(close(w.region2_pair.1, 0.6875, 1e-15));
        for (alpha, beta) in [w.region1_pair, w.region2_pair] {
            assert!(close(alpha + beta, 0.75, 1e-15));
        }
        assert!(dominance_pairs(0.5, 0.25, 1, Some(0.9)).is_err());
        assert!(dominance_pairs(0.5, 0.25, 1, Some(0.25)).is_err());
        assert!(dominance_pairs(0.2, 0.25, 1, None).is_err());
    }

    #[test]
    fn dominance_at_sample_and_boundary() {
        let w = dominance_pairs(0.5, 0.25, 1, None).unwrap();
        let report = check_pointwise_dominance(&w, &[p(2., 1., 1.)]).unwrap();
        assert!(report.passed());
        assert_eq!((report.region1_checked, report.region2_checked), (1, 0));

        let report = check_pointwise_dominance(&w, &[p(2., 1.5, 3.)]).unwrap();
        assert!(report.passed());
        assert_eq!((report.region1_checked, report.region2_checked), (1, 1));

        assert!(check_pointwise_dominance(&w, &[p(0., 1., 1.)]).is_err());
    }

    #[test]
    fn lambda_bracket_examples() {
        let (lhs, rhs) = lambda_bracket_sides(0.5, 2.0, 1.0, 4.0);
        assert!(close(lhs, 0.63246, 1e-5));
        assert!(close(rhs, 0.31623, 1e-5));
        assert!(check_lambda_bracket_bound(0.5, 2.0, 1.0, 4.0).unwrap());

        let (lhs, rhs) = lambda_bracket_sides(0.7, 3.0, 0.2, 1.0);
        assert_eq!(lhs, rhs);
        let (lhs, rhs) = lambda_bracket_sides(0.0, 3.0, 0.2, 17.0);
        assert_eq!((lhs, rhs), (1.0, 1.0));

        assert!(check_lambda_bracket_bound(0.5, 0.0, 1.0, 2.0).is_err());
        assert!(check_lambda_bracket_bound(-0.5, 1.0, 1.0, 2.0).is_err());
    }

    #[test]
    fn integrable_ranges() {
        assert!(KernelSpec::V(VParams::symmetric(1, 0.5, 0.25).unwrap()).check_integrable().is_ok());
        assert!(KernelSpec::V(VParams::symmetric(1, 1.5, 0.75).unwrap()).check_integrable().is_err());
        assert!(KernelSpec::V(VParams::symmetric(1, -0.5, 0.25).unwrap()).check_integrable().is_err());
    }

    #[test]
    fn homogeneity_factor_matches_evaluation() {
        let x = GroupPoint::scalar(0.7, -1.3, 0.4);
        let kernels = [
            KernelSpec::OmegaA(OmegaAParams::new(1, 0.8).unwrap()),
            KernelSpec::OmegaAB(OmegaABParams::new(1, 0.5, 0.25).unwrap()),
            KernelSpec::V(VParams::new(1, 0.4, 0.7, 0.3, Some(0.2)).unwrap()),
            KernelSpec::separable_majorant(1, 0.75).unwrap(),
        ];
        for k in &kernels {
            let d = DilationSpec::parabolic(2.5).unwrap();
            let c = k.homogeneity_factor(&d).unwrap();
            let lhs = k.eval(&d.apply(&x)).unwrap();
            assert!((lhs / (c * k.eval(&x).unwrap()) - 1.0).abs() < 1e-12, "{}", k.name());
        }
        let z = DilationSpec::zygmund(2.0, 0.5).unwrap();
        assert!(kernels[0].homogeneity_factor(&z).is_none());
        let c = kernels[2].homogeneity_factor(&z).unwrap();
        assert!((kernels[2].eval(&z.apply(&x)).unwrap() / (c * kernels[2].eval(&x).unwrap()) - 1.0).abs() < 1e-12);
        assert!(kernels[2].homogeneity_factor(&z.with_lambda(2.0).unwrap()).is_none());
    }
}
