//! Exponent arithmetic and the numerical experiments built on the
//! quadrature engine: dilation-exponent fits, norm probes, the necessity
//! scan and the pointwise reduction chain for `I_{αβ}`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, HlsError, Result};
use crate::grid::{pairwise_sum, weighted_lp, GridFunction, GridSpec};
use crate::group::{norm, symplectic, DilationSpec, GroupContext, GroupPoint};
use crate::kernel::{majorant_exponents, KernelSpec, OmegaABParams, VParams, INEQUALITY_SLACK};
use crate::quad::{
    apply_fractional, apply_fractional_grid, block_nodes, check_clearance, sample, twisted_sum,
    validate_operator, ExponentPair,
};
use crate::testfn::TestFunction;

/// Absolute tolerance on exponent arithmetic.
pub const EXPONENT_TOL: f64 = 1e-12;

/// A fitted dilation slope at most this large (in absolute value) counts as
/// bounded. Off-line slopes probed are at least 0.4.
pub const ADMISSIBLE_SLOPE: f64 = 0.1;

/// The `q` on the line `s/(n+1) = 1/p − 1/q`.
pub fn admissible_q(n: usize, s: f64, p: f64) -> Result<f64> {
    if n == 0 {
        return Err(invalid("block dimension n must be at least 1"));
    }
    if !(p > 1.0 && p.is_finite()) {
        return Err(invalid(format!("need 1 < p < inf, got p={p}")));
    }
    let gap = s / (n + 1) as f64;
    if gap.is_nan() || gap <= 0.0 {
        return Err(HlsError::NoAdmissibleExponent(format!("s={s} gives q <= p")));
    }
    if gap >= 1.0 / p {
        return Err(HlsError::NoAdmissibleExponent(format!("s/(n+1)={gap} >= 1/p gives q = inf or q < 0")));
    }
    Ok(1.0 / (1.0 / p - gap))
}

/// `2[s − (n+1)(1/p − 1/q)]`: log-slope of the norm ratio under `δ₁ = δ₂ = δ`.
pub fn predicted_slope(n: usize, s: f64, pq: &ExponentPair) -> f64 {
    2.0 * (s - (n + 1) as f64 * pq.gap())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ConstraintParams {
    V(VParams),
    OmegaAB(OmegaABParams),
}

/// Flags that are not meaningful for a kernel family are `None`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstraintReport {
    pub homogeneity_ok: bool,
    pub theta_ok: Option<bool>,
    pub band_ok: Option<bool>,
    pub ab_b_ok: Option<bool>,
    pub ab_anb_ok: Option<bool>,
    pub tolerance: f64,
}

impl ConstraintReport {
    pub fn all_ok(&self) -> bool {
        self.homogeneity_ok
            && [self.theta_ok, self.band_ok, self.ab_b_ok, self.ab_anb_ok].iter().all(|f| f.unwrap_or(true))
    }
}

pub fn constraint_report(params: &ConstraintParams, pq: &ExponentPair) -> ConstraintReport {
    constraint_report_with_tol(params, pq, EXPONENT_TOL)
}

pub fn constraint_report_with_tol(params: &ConstraintParams, pq: &ExponentPair, tol: f64) -> ConstraintReport {
    let gap = pq.gap();
    match params {
        ConstraintParams::V(v) => {
            let n1 = (v.n + 1) as f64;
            let nf = v.n as f64;
            // Both blocks must sit on the line, which forces α₁ = α₂.
            let homogeneity_ok = [v.alpha1, v.alpha2].iter().all(|a| ((a + v.beta) / n1 - gap).abs() <= tol);
            let needed = [v.alpha1, v.alpha2].iter().map(|a| (a - nf * v.beta).abs() / n1).fold(0.0, f64::max);
            ConstraintReport {
                homogeneity_ok,
                theta_ok: Some(v.theta >= needed - tol),
                band_ok: Some(v.beta - v.theta <= gap + tol && gap <= v.beta + v.theta + tol),
                ab_b_ok: None,
                ab_anb_ok: None,
                tolerance: tol,
            }
        }
        ConstraintParams::OmegaAB(p) => {
            let n1 = (p.n + 1) as f64;
            ConstraintReport {
                homogeneity_ok: ((p.a + p.b) / n1 - gap).abs() <= tol,
                theta_ok: None,
                band_ok: None,
                ab_b_ok: Some(p.b <= gap + tol),
                ab_anb_ok: Some(p.a >= p.n as f64 * p.b - tol),
                tolerance: tol,
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub slope: f64,
    pub intercept: f64,
    pub max_residual: f64,
    pub predicted_slope: f64,
}

/// Ordinary least squares line through `(x, y)`; returns
/// `(slope, intercept, max |residual|)`.
pub fn least_squares(xs: &[f64], ys: &[f64]) -> Result<(f64, f64, f64)> {
    if xs.len() != ys.len() {
        return Err(HlsError::DimensionMismatch { expected: xs.len(), found: ys.len() });
    }
    if xs.len() < 2 {
        return Err(invalid("line fit needs at least two points"));
    }
    let m = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(invalid("line fit needs distinct abscissae"));
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let max_residual = xs.iter().zip(ys).map(|(x, y)| (y - intercept - slope * x).abs()).fold(0.0, f64::max);
    Ok((slope, intercept, max_residual))
}

/// Input and full operator output for one member of the dilated family
/// `f ∘ D_δ^{-1}`, on the grid dilated along with it.
#[derive(Debug, Clone)]
pub struct DilationRun {
    pub delta: f64,
    pub input: GridFunction,
    pub output: GridFunction,
}

impl DilationRun {
    pub fn ratio(&self, pq: &ExponentPair) -> Result<f64> {
        norm_ratio(&self.input, &self.output, pq)
    }
}

fn norm_ratio(input: &GridFunction, output: &GridFunction, pq: &ExponentPair) -> Result<f64> {
    let denom = input.lp_norm(pq.p())?;
    if denom == 0.0 {
        return Err(invalid("zero input function"));
    }
    Ok(output.lp_norm(pq.q())? / denom)
}

fn check_deltas(deltas: &[f64]) -> Result<()> {
    if deltas.len() < 3 {
        return Err(invalid(format!("dilation fit needs at least 3 deltas, got {}", deltas.len())));
    }
    if let Some(d) = deltas.iter().find(|d| !(d.is_finite() && **d >= 1.0)) {
        return Err(invalid(format!("deltas must be >= 1, got {d}")));
    }
    Ok(())
}

/// Runs the operator on `f ∘ D_δ^{-1}` for each zygmund `δ₁ = δ₂ = δ`.
pub fn dilation_runs(
    kernel: &KernelSpec,
    ctx: &GroupContext,
    f: &TestFunction,
    base: &GridSpec,
    deltas: &[f64],
) -> Result<Vec<DilationRun>> {
    check_deltas(deltas)?;
    validate_operator(kernel, ctx, f, base)?;
    deltas
        .iter()
        .map(|&delta| {
            let d = DilationSpec::zygmund(delta, delta)?;
            let fd = f.clone().dilated(d);
            let grid = base.dilated(&d)?;
            Ok(DilationRun {
                delta,
                input: sample(&fd, &grid)?,
                output: apply_fractional_grid(kernel, ctx, &fd, &grid)?,
            })
        })
        .collect()
}

/// Fits `log R(δ)` against `log δ` for precomputed runs.
pub fn fit_runs(runs: &[DilationRun], kernel: &KernelSpec, pq: &ExponentPair) -> Result<FitResult> {
    let deltas: Vec<f64> = runs.iter().map(|r| r.delta).collect();
    check_deltas(&deltas)?;
    let xs: Vec<f64> = deltas.iter().map(|d| d.ln()).collect();
    let ys = runs.iter().map(|r| r.ratio(pq).map(f64::ln)).collect::<Result<Vec<_>>>()?;
    let (slope, intercept, max_residual) = least_squares(&xs, &ys)?;
    Ok(FitResult {
        slope,
        intercept,
        max_residual,
        predicted_slope: predicted_slope(kernel.n(), kernel.homogeneity_sum(), pq),
    })
}

pub fn dilation_exponent_fit(
    kernel: &KernelSpec,
    ctx: &GroupContext,
    f: &TestFunction,
    pq: &ExponentPair,
    deltas: &[f64],
    base: &GridSpec,
) -> Result<FitResult> {
    let runs = dilation_runs(kernel, ctx, f, base, deltas)?;
    fit_runs(&runs, kernel, pq)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyMember {
    pub label: String,
    pub function: TestFunction,
}

impl FamilyMember {
    pub fn new(label: impl Into<String>, function: TestFunction) -> Self {
        Self { label: label.into(), function }
    }
}

/// Input/output pair of one probe, kept so several `(p, q)` can share it.
#[derive(Debug, Clone)]
pub struct ProbeSample {
    pub label: String,
    pub input: GridFunction,
    pub output: GridFunction,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeRow {
    pub label: String,
    pub output_norm: f64,
    pub input_norm: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeResult {
    pub rows: Vec<ProbeRow>,
    /// `max ratio / min ratio`.
    pub ratio_spread: f64,
    /// Largest ratio: a lower bound on the discrete operator norm.
    pub norm_lower_bound: f64,
}

/// Grid for a family member: `base` stretched by the member's widths when
/// it has them, so every member is resolved alike.
pub fn fitted_grid(base: &GridSpec, f: &TestFunction) -> Result<GridSpec> {
    match (f.block_widths(), base.n()) {
        (Some((wu, wv, wt)), Some(n)) => {
            let scale = (0..base.dim())
                .map(|k| {
                    let w = if k < n {
                        wu
                    } else if k < 2 * n {
                        wv
                    } else {
                        wt
                    };
                    base.scale()[k] * w
                })
                .collect();
            base.clone().with_scale(scale)
        }
        _ => Ok(base.clone()),
    }
}

pub fn probe_samples(
    kernel: &KernelSpec,
    ctx: &GroupContext,
    family: &[FamilyMember],
    base: &GridSpec,
) -> Result<Vec<ProbeSample>> {
    if family.is_empty() {
        return Err(HlsError::EmptyInput("test-function family"));
    }
    family
        .iter()
        .map(|m| {
            validate_operator(kernel, ctx, &m.function, base)?;
            let grid = fitted_grid(base, &m.function)?;
            let input = sample(&m.function, &grid)?;
            if input.values().iter().all(|v| *v == 0.0) {
                return Err(invalid(format!("family member {} is zero on its grid", m.label)));
            }
            let output = apply_fractional_grid(kernel, ctx, &m.function, &grid)?;
            Ok(ProbeSample { label: m.label.clone(), input, output })
        })
        .collect()
}

pub fn probe_from_samples(samples: &[ProbeSample], pq: &ExponentPair) -> Result<ProbeResult> {
    if samples.is_empty() {
        return Err(HlsError::EmptyInput("probe samples"));
    }
    let rows = samples
        .iter()
        .map(|s| {
            let input_norm = s.input.lp_norm(pq.p())?;
            let output_norm = s.output.lp_norm(pq.q())?;
            Ok(ProbeRow { label: s.label.clone(), output_norm, input_norm, ratio: output_norm / input_norm })
        })
        .collect::<Result<Vec<_>>>()?;
    let max = rows.iter().map(|r| r.ratio).fold(f64::NEG_INFINITY, f64::max);
    let min = rows.iter().map(|r| r.ratio).fold(f64::INFINITY, f64::min);
    Ok(ProbeResult { rows, ratio_spread: max / min, norm_lower_bound: max })
}

pub fn norm_probe(
    kernel: &KernelSpec,
    ctx: &GroupContext,
    family: &[FamilyMember],
    pq: &ExponentPair,
    base: &GridSpec,
) -> Result<ProbeResult> {
    probe_from_samples(&probe_samples(kernel, ctx, family, base)?, pq)
}

/// Isotropic gaussians `σ = 2^k` for `k ∈ [−3, 3]` followed by the
/// zygmund-anisotropic `(σ_u, σ_v, σ_t) = (w, 1/w, 1)`, `w ∈ {¼, ½, 2, 4, 8}`.
pub fn gaussian_probe_family(n: usize) -> Vec<FamilyMember> {
    let mut family: Vec<FamilyMember> = (-3..=3)
        .map(|k| {
            let w = 2f64.powi(k);
            FamilyMember::new(
                format!("iso:{w}"),
                TestFunction::Gaussian { center: GroupPoint::origin(n), sigma_u: w, sigma_v: w, sigma_t: w },
            )
        })
        .collect();
    for w in [0.25, 0.5, 2.0, 4.0, 8.0] {
        family.push(FamilyMember::new(
            format!("zyg:{w}"),
            TestFunction::Gaussian { center: GroupPoint::origin(n), sigma_u: w, sigma_v: 1.0 / w, sigma_t: 1.0 },
        ));
    }
    family
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NecessityRow {
    pub p: f64,
    pub q: f64,
    pub fit: FitResult,
    /// `|slope| ≤ ADMISSIBLE_SLOPE`.
    pub admissible: bool,
    /// `(p, q)` lies on `s/(n+1) = 1/p − 1/q`.
    pub on_line: bool,
}

impl NecessityRow {
    /// Fitted divergence exponent, `None` when labeled admissible.
    pub fn divergence_exponent(&self) -> Option<f64> {
        (!self.admissible).then_some(self.fit.slope)
    }

    pub fn consistent(&self) -> bool {
        self.admissible == self.on_line
    }
}

pub fn necessity_scan(
    kernel: &KernelSpec,
    ctx: &GroupContext,
    f: &TestFunction,
    base: &GridSpec,
    pairs: &[ExponentPair],
    deltas: &[f64],
) -> Result<Vec<NecessityRow>> {
    let runs = dilation_runs(kernel, ctx, f, base, deltas)?;
    let s = kernel.homogeneity_sum();
    let n1 = (kernel.n() + 1) as f64;
    pairs
        .iter()
        .map(|pq| {
            let fit = fit_runs(&runs, kernel, pq)?;
            Ok(NecessityRow {
                p: pq.p(),
                q: pq.q(),
                admissible: fit.slope.abs() <= ADMISSIBLE_SLOPE,
                on_line: (s / n1 - pq.gap()).abs() <= EXPONENT_TOL,
                fit,
            })
        })
        .collect()
}

/// Norm ratio of `f` for each twist coefficient; exploratory.
pub fn mu_sweep(
    kernel: &KernelSpec,
    f: &TestFunction,
    pq: &ExponentPair,
    mus: &[f64],
    grid: &GridSpec,
) -> Result<Vec<(f64, f64)>> {
    mus.iter()
        .map(|&mu| {
            let ctx = GroupContext::new(kernel.n(), mu)?;
            let input = sample(f, grid)?;
            let output = apply_fractional_grid(kernel, &ctx, f, grid)?;
            Ok((mu, norm_ratio(&input, &output, pq)?))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DominationCheck {
    pub node: GroupPoint,
    /// `I_{αβ} f`
    pub operator: f64,
    /// Same sum with the separable majorant.
    pub majorant: f64,
}

impl DominationCheck {
    pub fn margin(&self) -> f64 {
        self.majorant - self.operator
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RearrangementCheck {
    pub node: GroupPoint,
    pub direct: f64,
    pub iterated: f64,
}

impl RearrangementCheck {
    pub fn relative_discrepancy(&self) -> f64 {
        let scale = self.direct.abs().max(self.iterated.abs());
        if scale == 0.0 {
            0.0
        } else {
            (self.direct - self.iterated).abs() / scale
        }
    }
}

/// Discrete Minkowski interchange at one `(u, v)`:
/// `‖Σ K·F‖_{L^q(t)} ≤ Σ K·‖F‖_{L^q(t)}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MinkowskiCheck {
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub norm_of_sum: f64,
    pub sum_of_norms: f64,
}

impl MinkowskiCheck {
    pub fn holds(&self) -> bool {
        self.norm_of_sum <= self.sum_of_norms * (1.0 + INEQUALITY_SLACK)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProofChainReport {
    pub domination: Vec<DominationCheck>,
    pub rearrangement: Vec<RearrangementCheck>,
    pub minkowski: Vec<MinkowskiCheck>,
}

/// Bound on the relative discrepancy of the iterated rearrangement.
pub const REARRANGEMENT_TOL: f64 = 1e-9;

impl ProofChainReport {
    pub fn min_domination_margin(&self) -> f64 {
        self.domination.iter().map(DominationCheck::margin).fold(f64::INFINITY, f64::min)
    }

    pub fn max_rearrangement_discrepancy(&self) -> f64 {
        self.rearrangement.iter().map(RearrangementCheck::relative_discrepancy).fold(0.0, f64::max)
    }

    pub fn domination_holds(&self) -> bool {
        self.domination.iter().all(|c| c.margin() >= 0.0)
    }

    pub fn rearrangement_holds(&self) -> bool {
        self.max_rearrangement_discrepancy() <= REARRANGEMENT_TOL
    }

    pub fn minkowski_holds(&self) -> bool {
        self.minkowski.iter().all(MinkowskiCheck::holds)
    }

    pub fn passed(&self) -> bool {
        self.domination_holds() && self.rearrangement_holds() && self.minkowski_holds()
    }
}

/// Evaluates the pointwise reduction of `I_{αβ}` at `probe_nodes`:
/// domination by the separable operator, the iterated form through the
/// twisted profile `F`, and the Minkowski interchange along `t`.
pub fn proof_chain_check(
    ctx: &GroupContext,
    f: &TestFunction,
    vparams: &VParams,
    pq: &ExponentPair,
    in_spec: &GridSpec,
    probe_nodes: &[GroupPoint],
) -> Result<ProofChainReport> {
    if !vparams.has_sharp_theta() {
        return Err(invalid("proof chain needs a symmetric V with the sharp theta"));
    }
    let n = ctx.n();
    let s = vparams.s();
    let majorant = KernelSpec::separable_majorant(n, s)?;
    if (s / (n + 1) as f64 - pq.gap()).abs() > EXPONENT_TOL {
        return Err(invalid(format!("(p,q)=({}, {}) is off the admissible line for s={s}", pq.p(), pq.q())));
    }
    let v = KernelSpec::V(*vparams);
    validate_operator(&v, ctx, f, in_spec)?;
    if sample(f, in_spec)?.values().iter().any(|x| *x < 0.0) {
        return Err(invalid("proof chain needs f >= 0"));
    }
    if probe_nodes.is_empty() {
        return Err(HlsError::EmptyInput("probe nodes"));
    }
    for x in probe_nodes {
        check_clearance(&majorant, ctx, in_spec, x)?;
    }

    let operator = apply_fractional(&v, ctx, f, in_spec, probe_nodes)?;
    let separable = apply_fractional(&majorant, ctx, f, in_spec, probe_nodes)?;
    let domination = probe_nodes
        .iter()
        .zip(operator.iter().zip(&separable))
        .map(|(x, (i, m))| DominationCheck { node: x.clone(), operator: *i, majorant: *m })
        .collect();

    let (block_exp, tau_exp) = majorant_exponents(n, s);
    let xis = block_nodes(in_spec, 0, n);
    let etas = block_nodes(in_spec, n, n);
    let taus = in_spec.axis_coords(2 * n);
    let h_tau = in_spec.step(2 * n);
    let h_blocks: f64 = (0..2 * n).map(|k| in_spec.step(k)).product();

    // Block kernel |u−ξ|^{e}|v−η|^{e}, written as a power of the product to
    // match the direct sum.
    let block_kernel = |x: &GroupPoint, xi: &[f64], eta: &[f64]| {
        let du: Vec<f64> = x.u.iter().zip(xi).map(|(a, b)| a - b).collect();
        let dv: Vec<f64> = x.v.iter().zip(eta).map(|(a, b)| a - b).collect();
        (norm(&du) * norm(&dv)).powf(block_exp)
    };

    let rearrangement = probe_nodes
        .par_iter()
        .zip(separable.par_iter())
        .map(|(x, direct)| {
            let mut terms = Vec::with_capacity(xis.len() * etas.len());
            for xi in &xis {
                for eta in &etas {
                    let shift = ctx.mu() * symplectic(&x.u, &x.v, xi, eta);
                    let profile = twisted_sum(f, xi, eta, shift, x.t, &taus, tau_exp, h_tau);
                    terms.push(block_kernel(x, xi, eta) * profile);
                }
            }
            RearrangementCheck { node: x.clone(), direct: *direct, iterated: pairwise_sum(&terms) * h_blocks }
        })
        .collect();

    // Distinct (u, v) in first-seen order; t runs over the output t-axis.
    let mut planes: Vec<(Vec<f64>, Vec<f64>)> = Vec::new();
    for x in probe_nodes {
        if !planes.iter().any(|(u, v)| *u == x.u && *v == x.v) {
            planes.push((x.u.clone(), x.v.clone()));
        }
    }
    let out_t = in_spec.complement().axis_coords(2 * n);
    let h_t = in_spec.complement().step(2 * n);
    let minkowski = planes
        .par_iter()
        .map(|(u, v)| {
            let x0 = GroupPoint { u: u.clone(), v: v.clone(), t: 0.0 };
            let mut weighted_sum = vec![Vec::with_capacity(xis.len() * etas.len()); out_t.len()];
            let mut norm_terms = Vec::with_capacity(xis.len() * etas.len());
            for xi in &xis {
                for eta in &etas {
                    let k = block_kernel(&x0, xi, eta) * h_blocks;
                    let shift = ctx.mu() * symplectic(u, v, xi, eta);
                    let profile: Vec<f64> =
                        out_t.iter().map(|t| twisted_sum(f, xi, eta, shift, *t, &taus, tau_exp, h_tau)).collect();
                    for (acc, val) in weighted_sum.iter_mut().zip(&profile) {
                        acc.push(k * val);
                    }
                    norm_terms.push(k * weighted_lp(&profile, h_t, pq.q()).expect("q > 1"));
                }
            }
            let summed: Vec<f64> = weighted_sum.iter().map(|terms| pairwise_sum(terms)).collect();
            MinkowskiCheck {
                u: u.clone(),
                v: v.clone(),
                norm_of_sum: weighted_lp(&summed, h_t, pq.q()).expect("q > 1"),
                sum_of_norms: pairwise_sum(&norm_terms),
            }
        })
        .collect();

    Ok(ProofChainReport { domination, rearrangement, minkowski })
}

/// `count³` nodes of the grid complementary to `in_spec`, evenly spread by
/// index (requires a `(2n+1)`-axis grid with `n = 1`).
pub fn probe_lattice(in_spec: &GridSpec, count: usize) -> Result<Vec<GroupPoint>> {
    if in_spec.n() != Some(1) {
        return Err(invalid("probe lattice is defined for n = 1 grids"));
    }
    if count < 1 || count > in_spec.nodes_per_axis() {
        return Err(invalid(format!("probe count must be in 1..={}", in_spec.nodes_per_axis())));
    }
    let out = in_spec.complement();
    let m = in_spec.nodes_per_axis();
    // Indices spread over the central half of each axis.
    let idx: Vec<usize> = (0..count)
        .map(|j| if count == 1 { m / 2 } else { m / 4 + j * (m / 2) / (count - 1) })
        .collect();
    let mut nodes = Vec::with_capacity(count.pow(3));
    for &i in &idx {
        for &j in &idx {
            for &k in &idx {
                nodes.push(GroupPoint::scalar(out.coord(0, i), out.coord(1, j), out.coord(2, k)));
            }
        }
    }
    Ok(nodes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testfn::Profile;

    fn pq(p: f64, q: f64) -> ExponentPair {
        ExponentPair::new(p, q).unwrap()
    }

    #[test]
    fn admissible_q_examples() {
        assert!((admissible_q(1, 0.75, 2.0).unwrap() - 8.0).abs() < 1e-12);
        assert!((admissible_q(1, 1.0, 4.0 / 3.0).unwrap() - 4.0).abs() < 1e-12);
        assert!(matches!(admissible_q(1, 0.0, 2.0), Err(HlsError::NoAdmissibleExponent(_))));
        assert!(matches!(admissible_q(1, 1.0, 2.0), Err(HlsError::NoAdmissibleExponent(_))));
        assert!(admissible_q(1, 0.5, 1.0).is_err());
    }

    #[test]
    fn constraint_examples() {
        let v = VParams::new(1, 0.5, 0.5, 0.25, Some(0.125)).unwrap();
        let r = constraint_report(&ConstraintParams::V(v), &pq(2.0, 8.0));
        assert!(r.all_ok(), "{r:?}");

        let v = VParams::new(1, 0.5, 0.5, 0.25, Some(0.05)).unwrap();
        let r = constraint_report(&ConstraintParams::V(v), &pq(2.0, 8.0));
        assert_eq!(r.theta_ok, Some(false));
        assert!(r.homogeneity_ok);

        let ab = OmegaABParams::new(1, 0.5, 0.25).unwrap();
        let r = constraint_report(&ConstraintParams::OmegaAB(ab), &pq(2.0, 8.0));
        assert_eq!((r.homogeneity_ok, r.ab_b_ok, r.ab_anb_ok), (true, Some(true), Some(true)));
        assert_eq!(r.theta_ok, None);
    }

    #[test]
    fn asymmetric_v_fails_homogeneity() {
        let v = VParams::new(1, 0.5, 0.6, 0.25, Some(0.3)).unwrap();
        let r = constraint_report(&ConstraintParams::V(v), &pq(2.0, 8.0));
        assert!(!r.homogeneity_ok);
    }

    #[test]
    fn least_squares_recovers_line() {
        let xs = [0.0, 1.0, 2.0, 3.0];
        let ys: Vec<f64> = xs.iter().map(|x| 0.5 * x - 1.0).collect();
        let (m, c, r) = least_squares(&xs, &ys).unwrap();
        assert!((m - 0.5).abs() < 1e-15 && (c + 1.0).abs() < 1e-15 && r < 1e-15);
        assert!(least_squares(&[1.0, 1.0], &[0.0, 1.0]).is_err());
    }

    #[test]
    fn predicted_slopes() {
        assert_eq!(predicted_slope(1, 0.75, &pq(2.0, 8.0)), 0.0);
        assert_eq!(predicted_slope(1, 0.75, &pq(2.0, 4.0)), 0.5);
        let s = predicted_slope(1, 0.75, &pq(2.0, 2.01));
        assert!((s - 2.0 * (0.75 - 2.0 * (0.5 - 1.0 / 2.01))).abs() < 1e-15);
        assert!((s - 1.49).abs() < 0.01);
    }

    #[test]
    fn fit_rejects_short_or_small_deltas() {
        let k = KernelSpec::V(VParams::symmetric(1, 0.5, 0.25).unwrap());
        let ctx = GroupContext::new(1, 1.0).unwrap();
        let f = TestFunction::standard_gaussian(1);
        let grid = GridSpec::heisenberg(1, 3.0, 5, false).unwrap();
        assert!(dilation_exponent_fit(&k, &ctx, &f, &pq(2.0, 8.0), &[1.0, 2.0], &grid).is_err());
        assert!(dilation_exponent_fit(&k, &ctx, &f, &pq(2.0, 8.0), &[0.5, 1.0, 2.0], &grid).is_err());
    }

    #[test]
    fn small_fit_on_and_off_line() {
        let k = KernelSpec::V(VParams::symmetric(1, 0.5, 0.25).unwrap());
        let ctx = GroupContext::new(1, 1.0).unwrap();
        let f = TestFunction::standard_gaussian(1);
        let grid = GridSpec::heisenberg(1, 3.0, 7, false).unwrap();
        let runs = dilation_runs(&k, &ctx, &f, &grid, &[1.0, 2.0, 4.0]).unwrap();
        let on = fit_runs(&runs, &k, &pq(2.0, 8.0)).unwrap();
        assert!(on.slope.abs() < 1e-9, "{on:?}");
        let off = fit_runs(&runs, &k, &pq(2.0, 4.0)).unwrap();
        assert!((off.slope - 0.5).abs() < 1e-9, "{off:?}");
    }

    #[test]
    fn single_member_probe_has_unit_spread() {
        let k = KernelSpec::V(VParams::symmetric(1, 0.5, 0.25).unwrap());
        let ctx = GroupContext::new(1, 1.0).unwrap();
        let grid = GridSpec::heisenberg(1, 3.0, 5, false).unwrap();
        let family = [FamilyMember::new("g", TestFunction::standard_gaussian(1))];
        let r = norm_probe(&k, &ctx, &family, &pq(2.0, 8.0), &grid).unwrap();
        assert_eq!(r.rows.len(), 1);
        assert_eq!(r.ratio_spread, 1.0);
        assert!(norm_probe(&k, &ctx, &[], &pq(2.0, 8.0), &grid).is_err());
        let zero = [FamilyMember::new("z", TestFunction::product(vec![Profile::zero(); 3]).unwrap())];
        assert!(norm_probe(&k, &ctx, &zero, &pq(2.0, 8.0), &grid).is_err());
    }

    #[test]
    fn proof_chain_zero_input_is_equality() {
        let ctx = GroupContext::new(1, 1.0).unwrap();
        let grid = GridSpec::heisenberg(1, 3.0, 9, false).unwrap();
        let v = VParams::symmetric(1, 0.5, 0.25).unwrap();
        let zero = TestFunction::product(vec![Profile::zero(); 3]).unwrap();
        let nodes = probe_lattice(&grid, 2).unwrap();
        let r = proof_chain_check(&ctx, &zero, &v, &pq(2.0, 8.0), &grid, &nodes).unwrap();
        assert!(r.passed());
        assert!(r.domination.iter().all(|c| c.operator == 0.0 && c.majorant == 0.0));
        assert!(r.minkowski.iter().all(|c| c.norm_of_sum == 0.0 && c.sum_of_norms == 0.0));
    }

    #[test]
    fn proof_chain_rejects_bad_inputs() {
        let ctx = GroupContext::new(1, 1.0).unwrap();
        let grid = GridSpec::heisenberg(1, 3.0, 9, false).unwrap();
        let nodes = probe_lattice(&grid, 2).unwrap();
        let f = TestFunction::standard_gaussian(1);
        let v = VParams::symmetric(1, 0.5, 0.25).unwrap();
        assert!(proof_chain_check(&ctx, &f, &v, &pq(2.0, 4.0), &grid, &nodes).is_err());
        let loose = VParams::new(1, 0.5, 0.5, 0.25, Some(0.3)).unwrap();
        assert!(proof_chain_check(&ctx, &f, &loose, &pq(2.0, 8.0), &grid, &nodes).is_err());
        assert!(proof_chain_check(&ctx, &f, &v, &pq(2.0, 8.0), &grid, &[]).is_err());
    }
}
