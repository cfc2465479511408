//! Closed-form nonnegative inputs, evaluable at arbitrary (twisted) points.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, HlsError, Result};
use crate::group::{DilationSpec, GroupPoint};

/// One-dimensional factor of a product function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Profile {
    /// `exp(−π ((x − center)/width)²)`
    Gaussian { center: f64, width: f64 },
    /// `1` on `[lo, hi)`, else `0`.
    Indicator { lo: f64, hi: f64 },
    Constant { value: f64 },
}

impl Profile {
    pub fn zero() -> Self {
        Profile::Constant { value: 0.0 }
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            Profile::Gaussian { center, width } => {
                let z = (x - center) / width;
                (-std::f64::consts::PI * z * z).exp()
            }
            Profile::Indicator { lo, hi } => {
                if x >= lo && x < hi {
                    1.0
                } else {
                    0.0
                }
            }
            Profile::Constant { value } => value,
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            Profile::Gaussian { center, width } => {
                if !(center.is_finite() && width.is_finite() && width > 0.0) {
                    return Err(invalid("gaussian profile needs finite center and width > 0"));
                }
            }
            Profile::Indicator { lo, hi } => {
                if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                    return Err(invalid("indicator profile needs finite lo < hi"));
                }
            }
            Profile::Constant { value } => {
                if !(value.is_finite() && value >= 0.0) {
                    return Err(invalid("constant profile must be finite and >= 0"));
                }
            }
        }
        Ok(())
    }

    fn width(&self) -> Option<f64> {
        match *self {
            Profile::Gaussian { width, .. } => Some(width),
            _ => None,
        }
    }
}

/// A nonnegative function on `R^{2n+1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TestFunction {
    /// `exp(−π(|u−c_u|²/σ_u² + |v−c_v|²/σ_v² + (t−c_t)²/σ_t²))`
    Gaussian { center: GroupPoint, sigma_u: f64, sigma_v: f64, sigma_t: f64 },
    /// `height` on the half-open box `[corner, corner + sides)`.
    Box { corner: GroupPoint, sides: Vec<f64>, height: f64 },
    /// Product of one profile per axis, ordered `(u.., v.., t)`.
    Product { profiles: Vec<Profile> },
    /// `Σ cᵢ fᵢ` with `cᵢ ≥ 0`.
    Combination { terms: Vec<(f64, TestFunction)> },
    /// `inner ∘ D^{-1}`.
    Dilated { inner: std::boxed::Box<TestFunction>, dilation: DilationSpec },
}

impl TestFunction {
    pub fn gaussian(center: GroupPoint, sigma_u: f64, sigma_v: f64, sigma_t: f64) -> Result<Self> {
        let f = TestFunction::Gaussian { center, sigma_u, sigma_v, sigma_t };
        f.validate(f.n().unwrap_or(1))?;
        Ok(f)
    }

    /// Unit gaussian `exp(−π|x|²)` at the origin.
    pub fn standard_gaussian(n: usize) -> Self {
        TestFunction::Gaussian { center: GroupPoint::origin(n), sigma_u: 1.0, sigma_v: 1.0, sigma_t: 1.0 }
    }

    pub fn product(profiles: Vec<Profile>) -> Result<Self> {
        let f = TestFunction::Product { profiles };
        f.validate(f.n().unwrap_or(1))?;
        Ok(f)
    }

    pub fn dilated(self, dilation: DilationSpec) -> Self {
        TestFunction::Dilated { inner: std::boxed::Box::new(self), dilation }
    }

    pub fn scaled(self, c: f64) -> Self {
        TestFunction::Combination { terms: vec![(c, self)] }
    }

    /// Block dimension, if the variant fixes it.
    pub fn n(&self) -> Option<usize> {
        match self {
            TestFunction::Gaussian { center, .. } => Some(center.n()),
            TestFunction::Box { corner, .. } => Some(corner.n()),
            TestFunction::Product { profiles } => {
                (profiles.len() % 2 == 1 && profiles.len() >= 3).then(|| (profiles.len() - 1) / 2)
            }
            TestFunction::Combination { terms } => terms.iter().find_map(|(_, f)| f.n()),
            TestFunction::Dilated { inner, .. } => inner.n(),
        }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        let dim = 2 * n + 1;
        match self {
            TestFunction::Gaussian { center, sigma_u, sigma_v, sigma_t } => {
                if center.n() != n || center.v.len() != n {
                    return Err(HlsError::DimensionMismatch { expected: n, found: center.n() });
                }
                for s in [sigma_u, sigma_v, sigma_t] {
                    if !(s.is_finite() && *s > 0.0) {
                        return Err(invalid("gaussian widths must be positive"));
                    }
                }
            }
            TestFunction::Box { corner, sides, height } => {
                if corner.n() != n {
                    return Err(HlsError::DimensionMismatch { expected: n, found: corner.n() });
                }
                if sides.len() != dim {
                    return Err(HlsError::DimensionMismatch { expected: dim, found: sides.len() });
                }
                if !sides.iter().all(|s| s.is_finite() && *s > 0.0) {
                    return Err(invalid("box sides must be positive"));
                }
                if !(height.is_finite() && *height >= 0.0) {
                    return Err(invalid("box height must be >= 0"));
                }
            }
            TestFunction::Product { profiles } => {
                if profiles.len() != dim {
                    return Err(HlsError::DimensionMismatch { expected: dim, found: profiles.len() });
                }
                profiles.iter().try_for_each(Profile::validate)?;
            }
            TestFunction::Combination { terms } => {
                if terms.is_empty() {
                    return Err(HlsError::EmptyInput("combination terms"));
                }
                for (c, f) in terms {
                    if !(c.is_finite() && *c >= 0.0) {
                        return Err(invalid("combination coefficients must be >= 0"));
                    }
                    f.validate(n)?;
                }
            }
            TestFunction::Dilated { inner, .. } => inner.validate(n)?,
        }
        Ok(())
    }

    /// Value at `(u, v, t)`.
    #[inline]
    pub fn eval(&self, u: &[f64], v: &[f64], t: f64) -> f64 {
        self.eval_scaled(u, v, t, (1.0, 1.0, 1.0))
    }

    /// Value at `(su·u, sv·v, st·t)`; dilations compose into the scales so
    /// evaluation never allocates.
    fn eval_scaled(&self, u: &[f64], v: &[f64], t: f64, (su, sv, st): (f64, f64, f64)) -> f64 {
        match self {
            TestFunction::Gaussian { center, sigma_u, sigma_v, sigma_t } => {
                let mut q = 0.0;
                for (x, c) in u.iter().zip(&center.u) {
                    let z = (su * x - c) / sigma_u;
                    q += z * z;
                }
                for (x, c) in v.iter().zip(&center.v) {
                    let z = (sv * x - c) / sigma_v;
                    q += z * z;
                }
                let z = (st * t - center.t) / sigma_t;
                q += z * z;
                (-std::f64::consts::PI * q).exp()
            }
            TestFunction::Box { corner, sides, height } => {
                let n = u.len();
                let inside = |x: f64, lo: f64, side: f64| x >= lo && x < lo + side;
                let all = u.iter().zip(&corner.u).zip(&sides[..n]).all(|((x, lo), s)| inside(su * x, *lo, *s))
                    && v.iter().zip(&corner.v).zip(&sides[n..2 * n]).all(|((x, lo), s)| inside(sv * x, *lo, *s))
                    && inside(st * t, corner.t, sides[2 * n]);
                if all {
                    *height
                } else {
                    0.0
                }
            }
            TestFunction::Product { profiles } => {
                let n = u.len();
                let mut val = profiles[2 * n].eval(st * t);
                for (x, p) in u.iter().zip(&profiles[..n]) {
                    if val == 0.0 {
                        return 0.0;
                    }
                    val *= p.eval(su * x);
                }
                for (x, p) in v.iter().zip(&profiles[n..2 * n]) {
                    if val == 0.0 {
                        return 0.0;
                    }
                    val *= p.eval(sv * x);
                }
                val
            }
            TestFunction::Combination { terms } => {
                terms.iter().map(|(c, f)| c * f.eval_scaled(u, v, t, (su, sv, st))).sum()
            }
            TestFunction::Dilated { inner, dilation } => {
                let (du, dv, dt) = dilation.factors();
                inner.eval_scaled(u, v, t, (su / du, sv / dv, st / dt))
            }
        }
    }

    pub fn eval_point(&self, x: &GroupPoint) -> f64 {
        self.eval(&x.u, &x.v, x.t)
    }

    /// Characteristic widths `(u, v, t)` for gaussian-like inputs, used to
    /// fit a grid to the function.
    pub fn block_widths(&self) -> Option<(f64, f64, f64)> {
        match self {
            TestFunction::Gaussian { sigma_u, sigma_v, sigma_t, .. } => Some((*sigma_u, *sigma_v, *sigma_t)),
            TestFunction::Product { profiles } if profiles.len() >= 3 => {
                let n = (profiles.len() - 1) / 2;
                let wu = profiles[0].width()?;
                let wv = profiles[n].width()?;
                let wt = profiles[2 * n].width()?;
                Some((wu, wv, wt))
            }
            TestFunction::Combination { terms } if terms.len() == 1 => terms[0].1.block_widths(),
            TestFunction::Dilated { inner, dilation } => {
                let (wu, wv, wt) = inner.block_widths()?;
                let (du, dv, dt) = dilation.factors();
                Some((wu * du, wv * dv, wt * dt))
            }
            _ => None,
        }
    }
}
