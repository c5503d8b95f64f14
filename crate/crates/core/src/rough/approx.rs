use std::time::Instant;

use rayon::prelude::*;

use super::{d_alpha, increment_sup, uniform_distance, RoughPath};
use crate::error::{Error, Result};
use crate::paths::{connect, polygonize, PLPath};

/// Grid times nearest to `t₀ + m·mesh`, always including both ends.
pub fn mesh_partition(x: &RoughPath, mesh: f64) -> Result<Vec<f64>> {
    if !(mesh.is_finite() && mesh > 0.0) {
        return Err(Error::InvalidParam(format!("mesh {mesh} must be positive")));
    }
    let times = x.times();
    let (t0, t1) = (times[0], times[times.len() - 1]);
    let steps = ((t1 - t0) / mesh - 1e-9).ceil().max(1.0) as usize;
    let mut idx: Vec<usize> = (0..=steps)
        .map(|m| {
            let target = (t0 + m as f64 * mesh).min(t1);
            let i = times.partition_point(|&s| s < target);
            match i {
                0 => 0,
                i if i == times.len() => i - 1,
                i if target - times[i - 1] <= times[i] - target => i - 1,
                i => i,
            }
        })
        .collect();
    idx.dedup();
    *idx.last_mut().expect("nonempty") = times.len() - 1;
    idx.dedup();
    Ok(idx.into_iter().map(|i| times[i]).collect())
}

fn partition_indices(x: &RoughPath, pi: &[f64]) -> Result<Vec<usize>> {
    if pi.len() < 2 {
        return Err(Error::InvalidParam("partition needs at least two points".into()));
    }
    let idx = pi
        .iter()
        .map(|&t| x.index_of(t).ok_or_else(|| Error::NotSubset(format!("time {t}"))))
        .collect::<Result<Vec<_>>>()?;
    if idx.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParam("partition must be strictly increasing".into()));
    }
    Ok(idx)
}

/// Piecewise-linear path whose signature over `[t_i, t_j]` equals `x_{t_i t_j}`
/// for all partition points: on each partition interval the increment is
/// joined by `connect` and polygonized with `k` segments per winding.
pub fn geodesic_interpolation(x: &RoughPath, pi: &[f64], k: usize) -> Result<PLPath> {
    let idx = partition_indices(x, pi)?;
    let pieces = idx
        .par_windows(2)
        .map(|w| polygonize(&connect(&x.increment(w[0], w[1]))?, k))
        .collect::<Result<Vec<_>>>()?;
    let total: usize = pieces.iter().map(|p| p.len() - 1).sum();
    let mut times = Vec::with_capacity(total + 1);
    let mut points = Vec::with_capacity(total + 1);
    times.push(pi[0]);
    points.push(x.samples()[idx[0]].vector().clone());
    for (w, piece) in idx.windows(2).zip(&pieces) {
        let (s, t) = (x.times()[w[0]], x.times()[w[1]]);
        let shift = x.samples()[w[0]].vector();
        let last = piece.len() - 1;
        for (v, (tau, p)) in piece.times().iter().zip(piece.points()).enumerate().skip(1) {
            times.push(if v == last { t } else { s + tau * (t - s) });
            points.push(p + shift);
        }
    }
    PLPath::new(times, points)
}

/// Signature of `path` sampled on the grid of `x`, as a rough path with the
/// same exponent and norms.
fn sample_on_grid(x: &RoughPath, path: &PLPath) -> Result<RoughPath> {
    let samples = path.signatures_at(x.times());
    RoughPath::new(x.times().to_vec(), samples, x.alpha(), x.norms().clone())
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub mesh: f64,
    /// Polygon resolution `K`.
    pub param: usize,
    pub partition_len: usize,
    pub d_beta: f64,
    /// `sup_t d(x^Π_t, x_t)` on the grid.
    pub sup_d: f64,
    /// `max(C_x, C_{x^Π})`, the larger empirical α-Hölder constant.
    pub holder: f64,
    /// `ε^θ C^{1−θ}` with `ε = 2C sup_d`.
    pub bound: f64,
    /// `ε'^θ (2C)^{1−θ}` with `ε' = sup_{s<t} d(x^Π_{st}, x_{st})`.
    pub increment_bound: f64,
    /// Largest coordinate difference between `x^Π_{t_i t_j}` and `x_{t_i t_j}`
    /// over partition pairs.
    pub endpoint_error: f64,
    pub seconds: f64,
}

impl ConvergenceRow {
    pub fn within_bound(&self) -> bool {
        self.d_beta <= self.bound * (1.0 + 1e-12) + 1e-12
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub alpha: f64,
    pub beta: f64,
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceReport {
    /// Whether `d_β` strictly decreases down the table.
    pub fn strictly_decreasing(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].d_beta < w[0].d_beta)
    }

    /// Rows whose `d_β` exceeds the previous row.
    pub fn non_monotone_rows(&self) -> Vec<usize> {
        (1..self.rows.len())
            .filter(|&i| self.rows[i].d_beta > self.rows[i - 1].d_beta)
            .collect()
    }

    /// Least-squares slope of `log d_β` against `log mesh` over rows with
    /// positive `d_β`.
    pub fn loglog_slope(&self) -> Option<f64> {
        let pts: Vec<(f64, f64)> = self
            .rows
            .iter()
            .filter(|r| r.d_beta > 0.0)
            .map(|r| (r.mesh.ln(), r.d_beta.ln()))
            .collect();
        if pts.len() < 2 {
            return None;
        }
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
        Some(sxy / sxx)
    }
}

/// One row per mesh: geodesic interpolation on the mesh partition, compared
/// with `x` on its whole grid.
pub fn convergence_study(x: &RoughPath, beta: f64, meshes: &[f64], k: usize) -> Result<ConvergenceReport> {
    let alpha = x.alpha();
    if !(beta > 1.0 / 3.0 && beta < alpha) {
        return Err(Error::InvalidParam(format!(
            "β = {beta} outside (1/3, {alpha})"
        )));
    }
    if meshes.is_empty() || meshes.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidParam("meshes must be nonempty and strictly decreasing".into()));
    }
    let theta = 1.0 - beta / alpha;
    let rows = meshes
        .iter()
        .map(|&mesh| {
            let start = Instant::now();
            let pi = mesh_partition(x, mesh)?;
            let path = geodesic_interpolation(x, &pi, k)?;
            let y = sample_on_grid(x, &path)?;
            let d_beta = d_alpha(&y, x, beta)?;
            let sup_d = uniform_distance(&y, x)?;
            let holder = x.holder().max(y.holder());
            let eps = 2.0 * holder * sup_d;
            let eps_inc = increment_sup(&y, x)?;
            let idx = partition_indices(x, &pi)?;
            let endpoint_error = idx
                .par_iter()
                .enumerate()
                .map(|(a, &i)| {
                    idx[a + 1..]
                        .iter()
                        .map(|&j| x.increment(i, j).max_abs_diff(&y.increment(i, j)))
                        .fold(0.0, f64::max)
                })
                .reduce(|| 0.0, f64::max);
            Ok(ConvergenceRow {
                mesh,
                param: k,
                partition_len: pi.len(),
                d_beta,
                sup_d,
                holder,
                bound: eps.powf(theta) * holder.powf(1.0 - theta),
                increment_bound: eps_inc.powf(theta) * (2.0 * holder).powf(1.0 - theta),
                endpoint_error,
                seconds: start.elapsed().as_secs_f64(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let report = ConvergenceReport { alpha, beta, rows };
    for i in report.non_monotone_rows() {
        log::warn!("d_beta increased at mesh {}", report.rows[i].mesh);
    }
    Ok(report)
}
