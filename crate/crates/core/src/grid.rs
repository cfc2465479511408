//! Uniform grids over a truncated box, sampled functions, `L^p` norms and
//! the binary cache format.
//!
//! Node `i` on an axis of half-width `L` with `N` nodes sits at
//! `−L + (i + ½)h` when staggered and at `−L + i·h` otherwise, `h = 2L/N`.
//! An optional per-axis scale stretches axis `k` by `scale[k]`, which is how
//! grids follow dilated inputs.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, HlsError, Result};
use crate::group::{DilationSpec, GroupPoint};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    dim: usize,
    half_width: f64,
    nodes: usize,
    staggered: bool,
    scale: Vec<f64>,
}

impl GridSpec {
    /// Grid over `R^{2n+1}`.
    pub fn heisenberg(n: usize, half_width: f64, nodes: usize, staggered: bool) -> Result<Self> {
        if n == 0 {
            return Err(invalid("block dimension n must be at least 1"));
        }
        Self::cube(2 * n + 1, half_width, nodes, staggered)
    }

    /// Grid over `R^dim`.
    pub fn cube(dim: usize, half_width: f64, nodes: usize, staggered: bool) -> Result<Self> {
        if dim == 0 {
            return Err(invalid("grid needs at least one axis"));
        }
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(invalid(format!("half width must be positive, got {half_width}")));
        }
        if nodes < 2 {
            return Err(invalid(format!("need at least 2 nodes per axis, got {nodes}")));
        }
        Ok(Self { dim, half_width, nodes, staggered, scale: vec![1.0; dim] })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Block dimension `n` when `dim = 2n + 1`.
    pub fn n(&self) -> Option<usize> {
        (self.dim % 2 == 1 && self.dim >= 3).then(|| (self.dim - 1) / 2)
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn nodes_per_axis(&self) -> usize {
        self.nodes
    }

    pub fn staggered(&self) -> bool {
        self.staggered
    }

    pub fn scale(&self) -> &[f64] {
        &self.scale
    }

    pub fn is_unit_scale(&self) -> bool {
        self.scale.iter().all(|s| *s == 1.0)
    }

    pub fn with_scale(mut self, scale: Vec<f64>) -> Result<Self> {
        if scale.len() != self.dim {
            return Err(HlsError::DimensionMismatch { expected: self.dim, found: scale.len() });
        }
        if !scale.iter().all(|s| s.is_finite() && *s > 0.0) {
            return Err(invalid("axis scales must be positive"));
        }
        self.scale = scale;
        Ok(self)
    }

    /// Grid with the other staggering; its nodes sit half a cell off ours.
    pub fn complement(&self) -> Self {
        Self { staggered: !self.staggered, ..self.clone() }
    }

    /// Image of this grid under a dilation (requires `dim = 2n + 1`).
    pub fn dilated(&self, d: &DilationSpec) -> Result<Self> {
        let n = self.n().ok_or_else(|| invalid("dilation needs a (2n+1)-axis grid"))?;
        let (du, dv, dt) = d.factors();
        let scale = (0..self.dim)
            .map(|k| {
                let f = if k < n {
                    du
                } else if k < 2 * n {
                    dv
                } else {
                    dt
                };
                self.scale[k] * f
            })
            .collect();
        self.clone().with_scale(scale)
    }

    /// Cell size on the unit-scale axis.
    pub fn base_step(&self) -> f64 {
        2.0 * self.half_width / self.nodes as f64
    }

    pub fn step(&self, axis: usize) -> f64 {
        self.base_step() * self.scale[axis]
    }

    pub fn cell_volume(&self) -> f64 {
        (0..self.dim).map(|k| self.step(k)).product()
    }

    pub fn len(&self) -> usize {
        self.nodes.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn coord(&self, axis: usize, i: usize) -> f64 {
        let offset = if self.staggered { 0.5 } else { 0.0 };
        self.scale[axis] * (-self.half_width + (i as f64 + offset) * self.base_step())
    }

    pub fn axis_coords(&self, axis: usize) -> Vec<f64> {
        (0..self.nodes).map(|i| self.coord(axis, i)).collect()
    }

    /// Per-axis indices of flat node `index` (row-major, last axis fastest).
    pub fn unravel(&self, mut index: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dim];
        for k in (0..self.dim).rev() {
            idx[k] = index % self.nodes;
            index /= self.nodes;
        }
        idx
    }

    pub fn node_coords(&self, index: usize) -> Vec<f64> {
        self.unravel(index).iter().enumerate().map(|(k, i)| self.coord(k, *i)).collect()
    }

    pub fn node_point(&self, index: usize) -> Result<GroupPoint> {
        GroupPoint::from_flat(&self.node_coords(index))
    }

    /// All nodes of a `(2n+1)`-axis grid, in layout order.
    pub fn points(&self) -> Result<Vec<GroupPoint>> {
        (0..self.len()).map(|i| self.node_point(i)).collect()
    }

    /// Smallest distance from `x` to a grid coordinate on `axis`.
    pub fn axis_distance(&self, axis: usize, x: f64) -> f64 {
        let h = self.step(axis);
        let first = self.coord(axis, 0);
        let pos = ((x - first) / h).round().clamp(0.0, (self.nodes - 1) as f64) as usize;
        let lo = pos.saturating_sub(1);
        let hi = (pos + 1).min(self.nodes - 1);
        (lo..=hi).map(|i| (x - self.coord(axis, i)).abs()).fold(f64::INFINITY, f64::min)
    }
}

/// Deterministic pairwise sum in index order.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const BLOCK: usize = 16;
    if values.len() <= BLOCK {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Discrete `(Σ |vᵢ|^p · w)^{1/p}`, scaled by the max to avoid overflow.
pub fn weighted_lp(values: &[f64], weight: f64, p: f64) -> Result<f64> {
    if !(p >= 1.0 && p.is_finite()) {
        return Err(invalid(format!("L^p norm needs 1 <= p < inf, got {p}")));
    }
    let peak = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if peak == 0.0 {
        return Ok(0.0);
    }
    let powers: Vec<f64> = values.iter().map(|v| (v.abs() / peak).powf(p)).collect();
    Ok(peak * (pairwise_sum(&powers) * weight).powf(1.0 / p))
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    spec: GridSpec,
    values: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct Header {
    n: usize,
    #[serde(rename = "L")]
    half_width: f64,
    #[serde(rename = "N")]
    nodes: usize,
    staggered: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    axis_scale: Option<Vec<f64>>,
}

impl GridFunction {
    pub fn new(spec: GridSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != spec.len() {
            return Err(HlsError::DimensionMismatch { expected: spec.len(), found: values.len() });
        }
        if !values.iter().all(|v| v.is_finite()) {
            return Err(invalid("grid values must be finite"));
        }
        Ok(Self { spec, values })
    }

    pub fn zeros(spec: GridSpec) -> Self {
        let values = vec![0.0; spec.len()];
        Self { spec, values }
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        weighted_lp(&self.values, self.spec.cell_volume(), p)
    }

    /// Header line `{"n":..,"L":..,"N":..,"staggered":..}` then the values as
    /// little-endian `f64`.
    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        let n = self.spec.n().ok_or_else(|| invalid("only (2n+1)-axis grids are serializable"))?;
        let header = Header {
            n,
            half_width: self.spec.half_width,
            nodes: self.spec.nodes,
            staggered: self.spec.staggered,
            axis_scale: (!self.spec.is_unit_scale()).then(|| self.spec.scale.clone()),
        };
        let line = serde_json::to_string(&header).map_err(|e| HlsError::Format(e.to_string()))?;
        w.write_all(line.as_bytes())?;
        w.write_all(b"\n")?;
        for v in &self.values {
            w.write_all(&v.to_le_bytes())?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_from<R: BufRead>(mut r: R) -> Result<Self> {
        let mut line = String::new();
        r.read_line(&mut line)?;
        let header: Header =
            serde_json::from_str(line.trim_end()).map_err(|e| HlsError::Format(format!("bad header: {e}")))?;
        let mut spec = GridSpec::heisenberg(header.n, header.half_width, header.nodes, header.staggered)?;
        if let Some(scale) = header.axis_scale {
            spec = spec.with_scale(scale)?;
        }
        let mut bytes = Vec::new();
        r.read_to_end(&mut bytes)?;
        if bytes.len() != spec.len() * 8 {
            return Err(HlsError::Format(format!(
                "expected {} value bytes, found {}",
                spec.len() * 8,
                bytes.len()
            )));
        }
        let values = bytes
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
            .collect();
        Self::new(spec, values)
    }

    pub fn save(&self, path: &std::path::Path) -> Result<()> {
        let file = std::fs::File::create(path)?;
        self.write_to(std::io::BufWriter::new(file))
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Self::read_from(std::io::BufReader::new(file))
    }
}

pub fn lp_norm(g: &GridFunction, p: f64) -> Result<f64> {
    g.lp_norm(p)
}
