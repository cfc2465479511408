//! Quadrature application of the fractional operators.
//!
//! Outputs are evaluated on nodes staggered against the input grid, so no
//! kernel argument ever lands on a coordinate zero. Inputs stay in closed
//! form: the twisted argument `τ + μ(u·η − v·ξ)` is evaluated exactly.
//! Each output value is a pairwise reduction over input nodes in layout
//! order, so results are bit-identical for any worker count.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, HlsError, Result};
use crate::grid::{pairwise_sum, GridFunction, GridSpec};
use crate::group::{norm, symplectic, GroupContext, GroupPoint};
use crate::kernel::{KernelSpec, SINGULAR_GUARD};
use crate::testfn::{Profile, TestFunction};
use crate::zeta;

/// Lebesgue exponents with `1 < p < q < ∞`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentPair {
    p: f64,
    q: f64,
}

impl ExponentPair {
    pub fn new(p: f64, q: f64) -> Result<Self> {
        if !(p > 1.0 && q > p && q.is_finite()) {
            return Err(invalid(format!("exponents need 1 < p < q < inf, got p={p}, q={q}")));
        }
        Ok(Self { p, q })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    /// `1/p − 1/q`.
    pub fn gap(&self) -> f64 {
        1.0 / self.p - 1.0 / self.q
    }
}

fn grid_n(spec: &GridSpec) -> Result<usize> {
    spec.n().ok_or_else(|| invalid(format!("expected a (2n+1)-axis grid, got {} axes", spec.dim())))
}

/// Samples `f` at every node of `spec`.
pub fn sample(f: &TestFunction, spec: &GridSpec) -> Result<GridFunction> {
    let n = grid_n(spec)?;
    f.validate(n)?;
    let values = (0..spec.len())
        .into_par_iter()
        .map(|i| {
            let c = spec.node_coords(i);
            f.eval(&c[..n], &c[n..2 * n], c[2 * n])
        })
        .collect();
    GridFunction::new(spec.clone(), values)
}

/// How the one-point singularity of `|x − y|^{a−N}` is treated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SingularRule {
    /// Bare midpoint sum; error decays like `h^a` near the singularity.
    #[default]
    Plain,
    /// One-axis midpoint sum minus `2ζ(1−a, ½)·h^a·f(x)`, removing the
    /// leading singular error term. Requires `N = 1`.
    ZetaCorrected,
}

fn product_value(profiles: &[Profile], x: &[f64]) -> f64 {
    profiles.iter().zip(x).map(|(p, c)| p.eval(*c)).product()
}

fn check_classical(a: f64, dim: usize, profiles: &[Profile], rule: SingularRule) -> Result<()> {
    if !(a > 0.0 && a < dim as f64) {
        return Err(invalid(format!("classical HLS needs 0 < a < N, got a={a}, N={dim}")));
    }
    if profiles.len() != dim {
        return Err(HlsError::DimensionMismatch { expected: dim, found: profiles.len() });
    }
    if rule == SingularRule::ZetaCorrected && dim != 1 {
        return Err(invalid("zeta-corrected rule is only defined on one axis"));
    }
    Ok(())
}

/// `T_a f(x) = Σ_y f(y) |x − y|^{a−N} hᴺ` at arbitrary `x`, with `y` over the
/// nodes of `in_spec`.
pub fn classical_hls_at(
    a: f64,
    profiles: &[Profile],
    in_spec: &GridSpec,
    x: &[f64],
    rule: SingularRule,
) -> Result<f64> {
    let dim = in_spec.dim();
    check_classical(a, dim, profiles, rule)?;
    if x.len() != dim {
        return Err(HlsError::DimensionMismatch { expected: dim, found: x.len() });
    }
    let dist = (0..dim).map(|k| in_spec.axis_distance(k, x[k]).powi(2)).sum::<f64>().sqrt();
    if dist < SINGULAR_GUARD {
        return Err(HlsError::SingularPoint { kernel: "|x-y|^(a-N)" });
    }
    let input: Vec<f64> = (0..in_spec.len()).map(|j| product_value(profiles, &in_spec.node_coords(j))).collect();
    Ok(classical_sum(a, &input, in_spec, x, rule, profiles))
}

fn classical_sum(
    a: f64,
    input: &[f64],
    in_spec: &GridSpec,
    x: &[f64],
    rule: SingularRule,
    profiles: &[Profile],
) -> f64 {
    let dim = in_spec.dim();
    let exp = a - dim as f64;
    let terms: Vec<f64> = input
        .iter()
        .enumerate()
        .map(|(j, fy)| {
            if *fy == 0.0 {
                return 0.0;
            }
            let y = in_spec.node_coords(j);
            let r = x.iter().zip(&y).map(|(p, q)| (p - q) * (p - q)).sum::<f64>().sqrt();
            fy * r.powf(exp)
        })
        .collect();
    let mut out = pairwise_sum(&terms) * in_spec.cell_volume();
    if rule == SingularRule::ZetaCorrected {
        let h = in_spec.step(0);
        out -= 2.0 * zeta::hurwitz(1.0 - a, 0.5) * h.powf(a) * product_value(profiles, x);
    }
    out
}

/// Classical fractional integral on all nodes of `out_spec`; the input grid
/// is `out_spec.complement()`.
pub fn apply_classical_hls(
    a: f64,
    profiles: &[Profile],
    out_spec: &GridSpec,
    rule: SingularRule,
) -> Result<GridFunction> {
    let dim = out_spec.dim();
    check_classical(a, dim, profiles, rule)?;
    let in_spec = out_spec.complement();
    let input: Vec<f64> = (0..in_spec.len()).map(|j| product_value(profiles, &in_spec.node_coords(j))).collect();
    let values = (0..out_spec.len())
        .into_par_iter()
        .map(|i| classical_sum(a, &input, &in_spec, &out_spec.node_coords(i), rule, profiles))
        .collect();
    GridFunction::new(out_spec.clone(), values)
}

/// `F(ξ,η,u,v,t) = Σ_τ f(ξ, η, τ + μ(u·η − v·ξ)) |t − τ|^{s/(n+1)−1} h`
/// over the nodes of the one-axis grid `t_grid`.
#[allow(clippy::too_many_arguments)]
pub fn twisted_profile(
    ctx: &GroupContext,
    f: &TestFunction,
    s: f64,
    xi: &[f64],
    eta: &[f64],
    u: &[f64],
    v: &[f64],
    t: f64,
    t_grid: &GridSpec,
) -> Result<f64> {
    let n = ctx.n();
    if !(s > 0.0 && s < (n + 1) as f64) {
        return Err(invalid(format!("twisted profile needs 0 < s < n+1, got s={s}")));
    }
    if t_grid.dim() != 1 {
        return Err(invalid("twisted profile integrates over a one-axis grid"));
    }
    for block in [xi, eta, u, v] {
        if block.len() != n {
            return Err(HlsError::DimensionMismatch { expected: n, found: block.len() });
        }
    }
    if t_grid.axis_distance(0, t) < SINGULAR_GUARD {
        return Err(HlsError::SingularPoint { kernel: "|t-tau|^(s/(n+1)-1)" });
    }
    let taus = t_grid.axis_coords(0);
    let shift = ctx.mu() * symplectic(u, v, xi, eta);
    Ok(twisted_sum(f, xi, eta, shift, t, &taus, s / (n + 1) as f64 - 1.0, t_grid.step(0)))
}

#[allow(clippy::too_many_arguments)]
pub(crate) fn twisted_sum(
    f: &TestFunction,
    xi: &[f64],
    eta: &[f64],
    shift: f64,
    t: f64,
    taus: &[f64],
    exp: f64,
    h: f64,
) -> f64 {
    let terms: Vec<f64> = taus
        .iter()
        .map(|tau| {
            let fv = f.eval(xi, eta, tau + shift);
            if fv == 0.0 {
                0.0
            } else {
                fv * (t - tau).abs().powf(exp)
            }
        })
        .collect();
    pairwise_sum(&terms) * h
}

/// Node coordinates of one `n`-block of a grid, in layout order.
pub(crate) fn block_nodes(spec: &GridSpec, first_axis: usize, n: usize) -> Vec<Vec<f64>> {
    let m = spec.nodes_per_axis();
    (0..m.pow(n as u32))
        .map(|mut idx| {
            let mut c = vec![0.0; n];
            for k in (0..n).rev() {
                c[k] = spec.coord(first_axis + k, idx % m);
                idx /= m;
            }
            c
        })
        .collect()
}

/// Input grid prepared for repeated operator application.
pub(crate) struct InputLattice {
    pub xi: Vec<Vec<f64>>,
    pub eta: Vec<Vec<f64>>,
    pub tau: Vec<f64>,
    pub volume: f64,
}

impl InputLattice {
    pub fn new(spec: &GridSpec, n: usize) -> Self {
        Self {
            xi: block_nodes(spec, 0, n),
            eta: block_nodes(spec, n, n),
            tau: spec.axis_coords(2 * n),
            volume: spec.cell_volume(),
        }
    }
}

/// Distances from `x` to the nearest input node, per block.
fn block_clearance(spec: &GridSpec, x: &GroupPoint) -> (f64, f64, f64) {
    let n = x.n();
    let dist = |first: usize, block: &[f64]| {
        block.iter().enumerate().map(|(k, c)| spec.axis_distance(first + k, *c).powi(2)).sum::<f64>().sqrt()
    };
    (dist(0, &x.u), dist(n, &x.v), spec.axis_distance(2 * n, x.t))
}

pub(crate) fn validate_operator(
    kernel: &KernelSpec,
    ctx: &GroupContext,
    f: &TestFunction,
    in_spec: &GridSpec,
) -> Result<usize> {
    kernel.check_integrable()?;
    let n = ctx.n();
    if kernel.n() != n {
        return Err(HlsError::DimensionMismatch { expected: n, found: kernel.n() });
    }
    if grid_n(in_spec)? != n {
        return Err(HlsError::DimensionMismatch { expected: n, found: grid_n(in_spec)? });
    }
    f.validate(n)?;
    Ok(n)
}

/// Rejects `x` if some input node puts the kernel argument on its singular set.
pub(crate) fn check_clearance(kernel: &KernelSpec, ctx: &GroupContext, in_spec: &GridSpec, x: &GroupPoint) -> Result<()> {
    ctx.check(x)?;
    let (cx, ce, ct) = block_clearance(in_spec, x);
    if kernel.is_singular_norms(cx, ce, ct) {
        return Err(HlsError::SingularPoint { kernel: kernel.name() });
    }
    Ok(())
}

/// One output value of the operator, from the rewritten form
/// `Σ f(ξ, η, τ + μ(u·η − v·ξ)) K(u−ξ, v−η, t−τ) h^{2n+1}`.
pub(crate) fn operator_at(
    kernel: &KernelSpec,
    ctx: &GroupContext,
    f: &TestFunction,
    lattice: &InputLattice,
    x: &GroupPoint,
) -> f64 {
    let mut terms = Vec::with_capacity(lattice.xi.len() * lattice.eta.len() * lattice.tau.len());
    let mut du = vec![0.0; x.n()];
    let mut dv = vec![0.0; x.n()];
    for xi in &lattice.xi {
        for (d, (a, b)) in du.iter_mut().zip(x.u.iter().zip(xi)) {
            *d = a - b;
        }
        let nxi = norm(&du);
        for eta in &lattice.eta {
            for (d, (a, b)) in dv.iter_mut().zip(x.v.iter().zip(eta)) {
                *d = a - b;
            }
            let staged = kernel.stage(nxi, norm(&dv));
            let shift = ctx.mu() * symplectic(&x.u, &x.v, xi, eta);
            for tau in &lattice.tau {
                let fv = f.eval(xi, eta, tau + shift);
                terms.push(if fv == 0.0 { 0.0 } else { fv * staged.at((x.t - tau).abs()) });
            }
        }
    }
    pairwise_sum(&terms) * lattice.volume
}

/// Applies the operator with kernel `kernel` to `f`, sampled on `in_spec`,
/// at each of `out_nodes`.
pub fn apply_fractional(
    kernel: &KernelSpec,
    ctx: &GroupContext,
    f: &TestFunction,
    in_spec: &GridSpec,
    out_nodes: &[GroupPoint],
) -> Result<Vec<f64>> {
    let n = validate_operator(kernel, ctx, f, in_spec)?;
    for x in out_nodes {
        check_clearance(kernel, ctx, in_spec, x)?;
    }
    let lattice = InputLattice::new(in_spec, n);
    Ok(out_nodes.par_iter().map(|x| operator_at(kernel, ctx, f, &lattice, x)).collect())
}

/// Operator output on every node of `in_spec.complement()`.
pub fn apply_fractional_grid(
    kernel: &KernelSpec,
    ctx: &GroupContext,
    f: &TestFunction,
    in_spec: &GridSpec,
) -> Result<GridFunction> {
    let out_spec = in_spec.complement();
    let nodes = out_spec.points()?;
    let values = apply_fractional(kernel, ctx, f, in_spec, &nodes)?;
    GridFunction::new(out_spec, values)
}
