//! Grid-sampled rough paths, their metrics, and the two approximation
//! pipelines (geodesic interpolation and finite-rank projection).
//!
//! All distances between grid pairs go through [`pair_sup`], which has a fast
//! path for the Hilbert-Schmidt norm: for `z = x_{st}⁻¹ y_{st}` the area splits
//! as `P_t − Q_s + ½ e_s ∧ f_t` with per-time data
//!
//! ```text
//! P = A_y − A_x − ½ a_x ∧ a_y,   Q = A_y − A_x + ½ a_x ∧ a_y,
//! e = a_x − a_y,                 f = a_x + a_y,
//! ```
//!
//! and `‖A + ½ a⊗a‖_F² = ‖A‖_F² + ¼|a|⁴`.

mod approx;
mod project;
mod synth;

pub use approx::{
    convergence_study, geodesic_interpolation, mesh_partition, ConvergenceReport, ConvergenceRow,
};
pub use project::{project_roughpath, ProjectionReport};
pub use synth::{synth, SynthKind};

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::algebra::{GroupElem, HomNorms};
use crate::error::{Error, Result};

/// Slack for comparisons of the metric `d`: area round-off of order 1e-16
/// enters through a square root.
pub const EPS_METRIC: f64 = 1e-7;

/// Grid-sampled α-Hölder path in `G²(R^d)` with `x_{t₀}` the identity.
#[derive(Debug, Clone, PartialEq)]
pub struct RoughPath {
    times: Vec<f64>,
    samples: Vec<GroupElem>,
    alpha: f64,
    norms: HomNorms,
    holder: f64,
}

impl RoughPath {
    /// Validates the grid, left-normalizes the samples and records the
    /// empirical α-Hölder constant.
    pub fn new(times: Vec<f64>, samples: Vec<GroupElem>, alpha: f64, norms: HomNorms) -> Result<Self> {
        validate_grid(&times, samples.len())?;
        if !(alpha > 1.0 / 3.0 && alpha <= 0.5) {
            return Err(Error::InvalidParam(format!(
                "Hölder exponent {alpha} outside (1/3, 1/2]"
            )));
        }
        let d = samples[0].dim();
        for s in &samples {
            if s.dim() != d {
                return Err(Error::DimMismatch {
                    expected: d,
                    found: s.dim(),
                });
            }
            if s.vector().iter().chain(s.area().iter()).any(|v| !v.is_finite()) {
                return Err(Error::NonFinite("rough path sample"));
            }
        }
        let samples = if samples[0] == GroupElem::identity(d) {
            samples
        } else {
            let inv = samples[0].inv();
            samples.iter().map(|s| inv.mul_unchecked(s)).collect()
        };
        let mut x = Self {
            times,
            samples,
            alpha,
            norms,
            holder: 0.0,
        };
        x.holder = holder_constant(&x.times, &x.samples, alpha, &x.norms);
        Ok(x)
    }

    pub fn dim(&self) -> usize {
        self.samples[0].dim()
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn samples(&self) -> &[GroupElem] {
        &self.samples
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn norms(&self) -> &HomNorms {
        &self.norms
    }

    /// `sup_{i<j} d(x_{t_i}, x_{t_j}) / |t_j − t_i|^α` over the grid.
    pub fn holder(&self) -> f64 {
        self.holder
    }

    /// `x_{t_i}⁻¹ x_{t_j}`.
    pub fn increment(&self, i: usize, j: usize) -> GroupElem {
        self.samples[i].inv().mul_unchecked(&self.samples[j])
    }

    /// Index of the grid time equal to `t` (up to `1e-12` relative).
    pub fn index_of(&self, t: f64) -> Option<usize> {
        let tol = 1e-12 * (self.times[self.len() - 1] - self.times[0]).abs().max(1.0);
        let i = self.times.partition_point(|&s| s < t - tol);
        (i < self.len() && (self.times[i] - t).abs() <= tol).then_some(i)
    }

    /// Same path under different norms.
    pub fn with_norms(&self, norms: HomNorms) -> Result<Self> {
        Self::new(self.times.clone(), self.samples.clone(), self.alpha, norms)
    }
}

fn validate_grid(times: &[f64], n: usize) -> Result<()> {
    if times.len() < 2 || times.len() != n {
        return Err(Error::InvalidPath(format!(
            "{} times for {n} samples (need at least two)",
            times.len()
        )));
    }
    if times.iter().any(|t| !t.is_finite()) {
        return Err(Error::NonFinite("time grid"));
    }
    if let Some(i) = times.windows(2).position(|w| w[1] <= w[0]) {
        return Err(Error::InvalidPath(format!(
            "times not strictly increasing at index {}",
            i + 1
        )));
    }
    Ok(())
}

/// Per-time data of the Hilbert-Schmidt pair kernel. Areas are stored as
/// their strict upper triangles.
struct PairData {
    d: usize,
    tri: usize,
    p: Vec<f64>,
    q: Vec<f64>,
    e: Vec<f64>,
    f: Vec<f64>,
    r: Vec<f64>,
}

impl PairData {
    fn new(xs: &[GroupElem], ys: &[GroupElem]) -> Self {
        let d = xs[0].dim();
        let tri = d * (d - 1) / 2;
        let n = xs.len();
        let mut out = Self {
            d,
            tri,
            p: Vec::with_capacity(n * tri),
            q: Vec::with_capacity(n * tri),
            e: Vec::with_capacity(n * d),
            f: Vec::with_capacity(n * d),
            r: Vec::with_capacity(n * d),
        };
        for (x, y) in xs.iter().zip(ys) {
            let (ax, ay) = (x.vector(), y.vector());
            let (big_x, big_y) = (x.area(), y.area());
            for i in 0..d {
                for j in i + 1..d {
                    let base = big_y[(i, j)] - big_x[(i, j)];
                    let w = 0.5 * (ax[i] * ay[j] - ax[j] * ay[i]);
                    out.p.push(base - w);
                    out.q.push(base + w);
                }
            }
            for i in 0..d {
                out.e.push(ax[i] - ay[i]);
                out.f.push(ax[i] + ay[i]);
                out.r.push(ay[i] - ax[i]);
            }
        }
        out
    }

    /// `(|z.a|, ‖z level 2‖_F)` for `z = x_{st}⁻¹ y_{st}`.
    #[inline]
    fn pair(&self, s: usize, t: usize) -> (f64, f64) {
        let d = self.d;
        let (es, ft) = (&self.e[s * d..(s + 1) * d], &self.f[t * d..(t + 1) * d]);
        let (pt, qs) = (
            &self.p[t * self.tri..(t + 1) * self.tri],
            &self.q[s * self.tri..(s + 1) * self.tri],
        );
        let mut area2 = 0.0;
        let mut k = 0;
        for i in 0..d {
            let (ei, fi) = (es[i], ft[i]);
            for j in i + 1..d {
                let z = pt[k] - qs[k] + 0.5 * (ei * ft[j] - es[j] * fi);
                area2 += z * z;
                k += 1;
            }
        }
        let (rs, rt) = (&self.r[s * d..(s + 1) * d], &self.r[t * d..(t + 1) * d]);
        let a2: f64 = rs.iter().zip(rt).map(|(a, b)| (b - a) * (b - a)).sum();
        (a2.sqrt(), (2.0 * area2 + 0.25 * a2 * a2).sqrt())
    }
}

/// `max_{s<t} f(t − s, |z.a|, ‖z⁽²⁾‖)` over grid pairs with
/// `z = x_{st}⁻¹ y_{st}` and `z⁽²⁾` its signature level 2.
///
/// `f` returns `None` to skip a pair; pairs are skipped wholesale once
/// `t − s > max_gap`.
pub(crate) fn pair_sup<F>(
    times: &[f64],
    xs: &[GroupElem],
    ys: &[GroupElem],
    norms: &HomNorms,
    max_gap: f64,
    f: F,
) -> f64
where
    F: Fn(f64, f64, f64) -> Option<f64> + Sync,
{
    let n = times.len();
    if norms.p() == 2.0 {
        let data = PairData::new(xs, ys);
        (0..n)
            .into_par_iter()
            .map(|s| {
                let mut best: f64 = 0.0;
                for t in s + 1..n {
                    let h = times[t] - times[s];
                    if h > max_gap {
                        break;
                    }
                    let (a, l2) = data.pair(s, t);
                    if let Some(v) = f(h, a, l2) {
                        best = best.max(v);
                    }
                }
                best
            })
            .reduce(|| 0.0, f64::max)
    } else {
        (0..n)
            .into_par_iter()
            .map(|s| {
                let (xinv, yinv) = (xs[s].inv(), ys[s].inv());
                let mut best: f64 = 0.0;
                for t in s + 1..n {
                    let h = times[t] - times[s];
                    if h > max_gap {
                        break;
                    }
                    let xst = xinv.mul_unchecked(&xs[t]);
                    let yst = yinv.mul_unchecked(&ys[t]);
                    let z = xst.inv().mul_unchecked(&yst);
                    let l2 = norms.tensor_norm(&z.sig_level2());
                    if let Some(v) = f(h, z.vector().norm(), l2) {
                        best = best.max(v);
                    }
                }
                best
            })
            .reduce(|| 0.0, f64::max)
    }
}

fn hom(a: f64, l2: f64) -> f64 {
    a.max(l2.sqrt())
}

fn holder_constant(times: &[f64], xs: &[GroupElem], alpha: f64, norms: &HomNorms) -> f64 {
    let id = vec![GroupElem::identity(xs[0].dim()); xs.len()];
    pair_sup(times, &id, xs, norms, f64::INFINITY, |h, a, l2| {
        Some(hom(a, l2) / h.powf(alpha))
    })
}

/// `max d(x_s, x_t)` over grid pairs with `|t − s| ≤ delta`.
pub fn oscillation(x: &RoughPath, delta: f64) -> f64 {
    let id = vec![GroupElem::identity(x.dim()); x.len()];
    let slack = 1e-12 * delta.abs().max(1.0);
    pair_sup(&x.times, &id, &x.samples, &x.norms, delta + slack, |_, a, l2| {
        Some(hom(a, l2))
    })
}

fn check_same_grid(x: &RoughPath, y: &RoughPath) -> Result<()> {
    if x.dim() != y.dim() {
        return Err(Error::DimMismatch {
            expected: x.dim(),
            found: y.dim(),
        });
    }
    if x.times.len() != y.times.len()
        || x.times.iter().zip(&y.times).any(|(a, b)| (a - b).abs() > 1e-12)
    {
        return Err(Error::GridMismatch);
    }
    Ok(())
}

/// `sup_{s<t} d(x_{st}, y_{st}) / |t − s|^β` over grid pairs. This is a lower
/// bound for the supremum over all `s < t`.
pub fn d_alpha(x: &RoughPath, y: &RoughPath, beta: f64) -> Result<f64> {
    check_same_grid(x, y)?;
    let top = x.alpha.min(y.alpha);
    if !(beta > 1.0 / 3.0 && beta <= top) {
        return Err(Error::InvalidParam(format!(
            "β = {beta} outside (1/3, {top}]"
        )));
    }
    Ok(pair_sup(&x.times, &x.samples, &y.samples, &x.norms, f64::INFINITY, |h, a, l2| {
        Some(hom(a, l2) / h.powf(beta))
    }))
}

/// `sup_{s<t} d(x_{st}, y_{st})`.
pub fn increment_sup(x: &RoughPath, y: &RoughPath) -> Result<f64> {
    check_same_grid(x, y)?;
    Ok(pair_sup(&x.times, &x.samples, &y.samples, &x.norms, f64::INFINITY, |_, a, l2| {
        Some(hom(a, l2))
    }))
}

/// `sup_i d(x_{t_i}, y_{t_i})`.
pub fn uniform_distance(x: &RoughPath, y: &RoughPath) -> Result<f64> {
    check_same_grid(x, y)?;
    let mut best: f64 = 0.0;
    for (g, h) in x.samples.iter().zip(&y.samples) {
        best = best.max(crate::algebra::metric_d(g, h, &x.norms)?);
    }
    Ok(best)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CheckReport {
    /// Largest weak-geometricity defect over all grid increments.
    pub defect: f64,
    /// `sup |x_{st}| / |t − s|^α`.
    pub holder: f64,
    /// `sup ‖x_t − x_s‖ / |t − s|^α`.
    pub holder_level1: f64,
    /// `sup ‖x⁽²⁾_{st}‖_⊗ / |t − s|^{2α}`.
    pub holder_level2: f64,
}

pub fn check(x: &RoughPath) -> CheckReport {
    let id = vec![GroupElem::identity(x.dim()); x.len()];
    let alpha = x.alpha;
    let l1 = pair_sup(&x.times, &id, &x.samples, &x.norms, f64::INFINITY, |h, a, _| {
        Some(a / h.powf(alpha))
    });
    let l2 = pair_sup(&x.times, &id, &x.samples, &x.norms, f64::INFINITY, |h, _, l2| {
        Some(l2 / h.powf(2.0 * alpha))
    });
    CheckReport {
        defect: 0.0,
        holder: x.holder,
        holder_level1: l1,
        holder_level2: l2,
    }
}

/// Sampled step-2 data that need not be group-like: at each time a level-1
/// value `a` and a raw level-2 value `L` (for group-like data
/// `L = A + ½ a⊗a` with `A` skew).
#[derive(Debug, Clone, PartialEq)]
pub struct RawRoughPath {
    pub times: Vec<f64>,
    pub level1: Vec<DVector<f64>>,
    pub level2: Vec<DMatrix<f64>>,
}

impl RawRoughPath {
    pub fn new(times: Vec<f64>, level1: Vec<DVector<f64>>, level2: Vec<DMatrix<f64>>) -> Result<Self> {
        validate_grid(&times, level1.len())?;
        if level2.len() != level1.len() {
            return Err(Error::InvalidPath(format!(
                "{} level-1 samples but {} level-2 samples",
                level1.len(),
                level2.len()
            )));
        }
        let d = level1[0].len();
        for (a, l) in level1.iter().zip(&level2) {
            if a.len() != d || l.nrows() != d || l.ncols() != d {
                return Err(Error::DimMismatch {
                    expected: d,
                    found: a.len().max(l.nrows()).max(l.ncols()),
                });
            }
            if a.iter().chain(l.iter()).any(|v| !v.is_finite()) {
                return Err(Error::NonFinite("raw sample"));
            }
        }
        Ok(Self {
            times,
            level1,
            level2,
        })
    }

    pub fn dim(&self) -> usize {
        self.level1[0].len()
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// `(x_t − x_s, L_t − L_s − x_s ⊗ (x_t − x_s))`.
    pub fn increment(&self, s: usize, t: usize) -> (DVector<f64>, DMatrix<f64>) {
        let da = &self.level1[t] - &self.level1[s];
        let l = &self.level2[t] - &self.level2[s] - &self.level1[s] * da.transpose();
        (da, l)
    }

    /// Symmetric defect `sym(L) − ½ a⊗a` of each sample; the defect of the
    /// increment over `[s, t]` is `D_t − D_s`.
    fn defects(&self) -> Vec<DMatrix<f64>> {
        self.level1
            .iter()
            .zip(&self.level2)
            .map(|(a, l)| (l + l.transpose()) * 0.5 - (a * a.transpose()) * 0.5)
            .collect()
    }

    /// Largest `‖sym(L_{st}) − ½ a_{st}⊗a_{st}‖_⊗` over grid pairs.
    pub fn max_defect(&self, norms: &HomNorms) -> f64 {
        let dfs = self.defects();
        let n = self.len();
        (0..n)
            .into_par_iter()
            .map(|s| {
                (s + 1..n)
                    .map(|t| norms.tensor_norm(&(&dfs[t] - &dfs[s])))
                    .fold(0.0, f64::max)
            })
            .reduce(|| 0.0, f64::max)
    }

    /// Group-valued path from the antisymmetric parts, refusing data whose
    /// defect exceeds `tol`.
    pub fn to_rough(&self, alpha: f64, norms: HomNorms, tol: f64) -> Result<RoughPath> {
        let defect = self.max_defect(&norms);
        if defect > tol {
            return Err(Error::NotWeaklyGeometric { defect });
        }
        let samples = self
            .level1
            .iter()
            .zip(&self.level2)
            .map(|(a, l)| GroupElem::from_parts_unchecked(a.clone(), (l - l.transpose()) * 0.5))
            .collect();
        RoughPath::new(self.times.clone(), samples, alpha, norms)
    }
}

impl From<&RoughPath> for RawRoughPath {
    fn from(x: &RoughPath) -> Self {
        Self {
            times: x.times.clone(),
            level1: x.samples.iter().map(|g| g.vector().clone()).collect(),
            level2: x.samples.iter().map(GroupElem::sig_level2).collect(),
        }
    }
}

/// `check` for raw data: the defect is reported, never thrown.
pub fn check_raw(x: &RawRoughPath, alpha: f64, norms: &HomNorms) -> CheckReport {
    let n = x.len();
    let quotients: Vec<(f64, f64, f64)> = (0..n)
        .into_par_iter()
        .map(|s| {
            let mut best = (0.0f64, 0.0f64, 0.0f64);
            for t in s + 1..n {
                let h = x.times[t] - x.times[s];
                let (a, l) = x.increment(s, t);
                let (na, nl) = (a.norm(), norms.tensor_norm(&l));
                best.0 = best.0.max(hom(na, nl) / h.powf(alpha));
                best.1 = best.1.max(na / h.powf(alpha));
                best.2 = best.2.max(nl / h.powf(2.0 * alpha));
            }
            best
        })
        .collect();
    let fold = |k: fn(&(f64, f64, f64)) -> f64| quotients.iter().map(k).fold(0.0, f64::max);
    CheckReport {
        defect: x.max_defect(norms),
        holder: fold(|q| q.0),
        holder_level1: fold(|q| q.1),
        holder_level2: fold(|q| q.2),
    }
}
