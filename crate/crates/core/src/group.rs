//! Heisenberg group algebra in the real-variable picture `R^n x R^n x R`.
//!
//! The product is `(u,v,t) ⊙ (ξ,η,τ) = (u+ξ, v+η, t+τ+μ(u·η − v·ξ))` with
//! inverse `(ξ,η,τ)^{-1} = (−ξ,−η,−τ)`. Points do not carry `n` or `μ`; the
//! [`GroupContext`] is passed to each operation instead.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, HlsError, Result};

/// Block dimension `n` and twist coefficient `μ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroupContext {
    n: usize,
    mu: f64,
}

impl GroupContext {
    pub fn new(n: usize, mu: f64) -> Result<Self> {
        if n == 0 {
            return Err(invalid("block dimension n must be at least 1"));
        }
        if !mu.is_finite() {
            return Err(invalid("twist coefficient mu must be finite"));
        }
        Ok(Self { n, mu })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// Number of real coordinates, `2n + 1`.
    pub fn dim(&self) -> usize {
        2 * self.n + 1
    }

    pub fn identity(&self) -> GroupPoint {
        GroupPoint::origin(self.n)
    }

    pub fn check(&self, x: &GroupPoint) -> Result<()> {
        if x.u.len() != self.n {
            return Err(HlsError::DimensionMismatch { expected: self.n, found: x.u.len() });
        }
        if x.v.len() != self.n {
            return Err(HlsError::DimensionMismatch { expected: self.n, found: x.v.len() });
        }
        Ok(())
    }

    /// `x ⊙ y`.
    pub fn multiply(&self, x: &GroupPoint, y: &GroupPoint) -> Result<GroupPoint> {
        self.check(x)?;
        self.check(y)?;
        let u = x.u.iter().zip(&y.u).map(|(a, b)| a + b).collect();
        let v = x.v.iter().zip(&y.v).map(|(a, b)| a + b).collect();
        let t = x.t + y.t + self.mu * symplectic(&x.u, &x.v, &y.u, &y.v);
        Ok(GroupPoint { u, v, t })
    }

    /// `x ⊙ y^{-1} = (u−ξ, v−η, t−τ−μ(u·η − v·ξ))`.
    pub fn difference(&self, x: &GroupPoint, y: &GroupPoint) -> Result<GroupPoint> {
        self.check(x)?;
        self.check(y)?;
        let u = x.u.iter().zip(&y.u).map(|(a, b)| a - b).collect();
        let v = x.v.iter().zip(&y.v).map(|(a, b)| a - b).collect();
        let t = x.t - y.t - self.mu * symplectic(&x.u, &x.v, &y.u, &y.v);
        Ok(GroupPoint { u, v, t })
    }
}

/// `u·η − v·ξ`.
#[inline]
pub fn symplectic(u: &[f64], v: &[f64], xi: &[f64], eta: &[f64]) -> f64 {
    dot(u, eta) - dot(v, xi)
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// A point `(u, v, t)`; also used for `(ξ, η, τ)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupPoint {
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub t: f64,
}

impl GroupPoint {
    pub fn new(u: Vec<f64>, v: Vec<f64>, t: f64) -> Result<Self> {
        if u.len() != v.len() {
            return Err(HlsError::DimensionMismatch { expected: u.len(), found: v.len() });
        }
        if u.is_empty() {
            return Err(invalid("point blocks must be non-empty"));
        }
        if !(u.iter().chain(&v).all(|c| c.is_finite()) && t.is_finite()) {
            return Err(invalid("point coordinates must be finite"));
        }
        Ok(Self { u, v, t })
    }

    /// Convenience constructor for `n = 1`.
    pub fn scalar(u: f64, v: f64, t: f64) -> Self {
        Self { u: vec![u], v: vec![v], t }
    }

    pub fn origin(n: usize) -> Self {
        Self { u: vec![0.0; n], v: vec![0.0; n], t: 0.0 }
    }

    /// Builds a point from `2n + 1` flat coordinates ordered `(u, v, t)`.
    pub fn from_flat(coords: &[f64]) -> Result<Self> {
        if coords.len() < 3 || coords.len().is_multiple_of(2) {
            return Err(invalid(format!(
                "flat point needs 2n+1 coordinates, got {}",
                coords.len()
            )));
        }
        let n = (coords.len() - 1) / 2;
        Self::new(coords[..n].to_vec(), coords[n..2 * n].to_vec(), coords[2 * n])
    }

    pub fn to_flat(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.u.len() * 2 + 1);
        out.extend_from_slice(&self.u);
        out.extend_from_slice(&self.v);
        out.push(self.t);
        out
    }

    pub fn n(&self) -> usize {
        self.u.len()
    }

    pub fn inverse(&self) -> GroupPoint {
        GroupPoint {
            u: self.u.iter().map(|c| -c).collect(),
            v: self.v.iter().map(|c| -c).collect(),
            t: -self.t,
        }
    }

    pub fn xi_norm(&self) -> f64 {
        norm(&self.u)
    }

    pub fn eta_norm(&self) -> f64 {
        norm(&self.v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DilationMode {
    /// `(δu, δv, δ²t)`
    Parabolic,
    /// `(δ₁u, δ₂v, δ₁δ₂t)`
    Zygmund,
}

/// A dilation, optionally with an extra factor `λ` on the `t` axis.
///
/// With `λ = 1` both modes are group automorphisms; with `λ ≠ 1` they are not.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DilationSpec {
    mode: DilationMode,
    delta1: f64,
    delta2: f64,
    lambda: f64,
}

impl DilationSpec {
    pub fn new(mode: DilationMode, delta1: f64, delta2: f64, lambda: f64) -> Result<Self> {
        for (name, val) in [("delta1", delta1), ("delta2", delta2), ("lambda", lambda)] {
            if !(val.is_finite() && val > 0.0) {
                return Err(invalid(format!("{name} must be a positive finite real, got {val}")));
            }
        }
        Ok(Self { mode, delta1, delta2, lambda })
    }

    pub fn parabolic(delta: f64) -> Result<Self> {
        Self::new(DilationMode::Parabolic, delta, delta, 1.0)
    }

    pub fn zygmund(delta1: f64, delta2: f64) -> Result<Self> {
        Self::new(DilationMode::Zygmund, delta1, delta2, 1.0)
    }

    pub fn with_lambda(self, lambda: f64) -> Result<Self> {
        Self::new(self.mode, self.delta1, self.delta2, lambda)
    }

    pub fn mode(&self) -> DilationMode {
        self.mode
    }

    pub fn delta1(&self) -> f64 {
        self.delta1
    }

    pub fn delta2(&self) -> f64 {
        self.delta2
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Scale factors applied to the `u`, `v` and `t` blocks.
    pub fn factors(&self) -> (f64, f64, f64) {
        match self.mode {
            DilationMode::Parabolic => {
                (self.delta1, self.delta1, self.delta1 * self.delta1 * self.lambda)
            }
            DilationMode::Zygmund => {
                (self.delta1, self.delta2, self.delta1 * self.delta2 * self.lambda)
            }
        }
    }

    /// The inverse map, of the same mode.
    pub fn inverse(&self) -> Self {
        Self {
            mode: self.mode,
            delta1: 1.0 / self.delta1,
            delta2: 1.0 / self.delta2,
            lambda: 1.0 / self.lambda,
        }
    }

    pub fn apply(&self, x: &GroupPoint) -> GroupPoint {
        let (du, dv, dt) = self.factors();
        GroupPoint {
            u: x.u.iter().map(|c| du * c).collect(),
            v: x.v.iter().map(|c| dv * c).collect(),
            t: dt * x.t,
        }
    }

    /// Jacobian of the map on `R^{2n+1}`.
    pub fn jacobian(&self, n: usize) -> f64 {
        let (du, dv, dt) = self.factors();
        (du * dv).powi(n as i32) * dt
    }
}

pub fn multiply(ctx: &GroupContext, x: &GroupPoint, y: &GroupPoint) -> Result<GroupPoint> {
    ctx.multiply(x, y)
}

pub fn inverse(x: &GroupPoint) -> GroupPoint {
    x.inverse()
}

pub fn group_difference(ctx: &GroupContext, x: &GroupPoint, y: &GroupPoint) -> Result<GroupPoint> {
    ctx.difference(x, y)
}

pub fn dilate(spec: &DilationSpec, x: &GroupPoint) -> GroupPoint {
    spec.apply(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(u: f64, v: f64, t: f64) -> GroupPoint {
        GroupPoint::scalar(u, v, t)
    }

    #[test]
    fn multiply_examples() {
        let ctx = GroupContext::new(1, 1.0).unwrap();
        assert_eq!(ctx.multiply(&p(0., 0., 0.), &p(3., 4., 5.)).unwrap(), p(3., 4., 5.));

        let ctx = GroupContext::new(1, 2.0).unwrap();
        assert_eq!(ctx.multiply(&p(1., 2., 0.), &p(3., 4., 5.)).unwrap(), p(4., 6., 1.));

        let ctx = GroupContext::new(2, 0.0).unwrap();
        let x = GroupPoint::new(vec![1., 0.], vec![0., 1.], 1.).unwrap();
        let y = GroupPoint::new(vec![0., 1.], vec![1., 0.], 2.).unwrap();
        let z = GroupPoint::new(vec![1., 1.], vec![1., 1.], 3.).unwrap();
        assert_eq!(ctx.multiply(&x, &y).unwrap(), z);
    }

    #[test]
    fn multiply_rejects_mismatched_dimensions() {
        let ctx = GroupContext::new(2, 1.0).unwrap();
        let err = ctx.multiply(&p(1., 1., 1.), &p(1., 1., 1.)).unwrap_err();
        assert!(matches!(err, HlsError::DimensionMismatch { expected: 2, found: 1 }));
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(p(1., 2., 3.).inverse(), p(-1., -2., -3.));
        assert_eq!(p(0., 0., 0.).inverse(), p(0., 0., 0.));
        let ctx = GroupContext::new(1, 5.0).unwrap();
        let x = p(2., 3., 4.);
        assert_eq!(ctx.multiply(&x, &x.inverse()).unwrap(), p(0., 0., 0.));
    }

    #[test]
    fn difference_examples() {
        let ctx = GroupContext::new(1, 1.0).unwrap();
        assert_eq!(ctx.difference(&p(1., 1., 1.), &p(1., 1., 1.)).unwrap(), p(0., 0., 0.));
        assert_eq!(ctx.difference(&p(2., 0., 0.), &p(0., 1., 0.)).unwrap(), p(2., -1., -2.));
        let ctx = GroupContext::new(1, 0.0).unwrap();
        assert_eq!(ctx.difference(&p(5., 4., 3.), &p(1., 1., 1.)).unwrap(), p(4., 3., 2.));
    }

    #[test]
    fn difference_matches_multiply_by_inverse() {
        let ctx = GroupContext::new(1, 1.5).unwrap();
        let (x, y) = (p(0.3, -1.2, 2.0), p(-0.7, 0.4, 1.1));
        assert_eq!(ctx.difference(&x, &y).unwrap(), ctx.multiply(&x, &y.inverse()).unwrap());
    }

    #[test]
    fn dilation_examples() {
        let z = DilationSpec::zygmund(2.0, 3.0).unwrap();
        assert_eq!(z.apply(&p(1., 1., 1.)), p(2., 3., 6.));
        let par = DilationSpec::parabolic(2.0).unwrap();
        assert_eq!(par.apply(&p(1., 1., 1.)), p(2., 2., 4.));
        for mode in [DilationMode::Parabolic, DilationMode::Zygmund] {
            let id = DilationSpec::new(mode, 1.0, 1.0, 1.0).unwrap();
            assert_eq!(id.apply(&p(0.1, -2.0, 7.0)), p(0.1, -2.0, 7.0));
        }
    }

    #[test]
    fn lambda_scales_only_t() {
        let d = DilationSpec::zygmund(2.0, 3.0).unwrap().with_lambda(0.5).unwrap();
        assert_eq!(d.apply(&p(1., 1., 1.)), p(2., 3., 3.));
        assert_eq!(d.jacobian(1), 2.0 * 3.0 * 3.0);
    }

    #[test]
    fn invalid_constructors() {
        assert!(GroupContext::new(0, 1.0).is_err());
        assert!(GroupContext::new(1, f64::NAN).is_err());
        assert!(DilationSpec::zygmund(0.0, 1.0).is_err());
        assert!(DilationSpec::parabolic(-1.0).is_err());
        assert!(GroupPoint::new(vec![1.0], vec![f64::INFINITY], 0.0).is_err());
        assert!(GroupPoint::new(vec![1.0], vec![1.0, 2.0], 0.0).is_err());
        assert!(GroupPoint::from_flat(&[1.0, 2.0]).is_err());
    }
}
