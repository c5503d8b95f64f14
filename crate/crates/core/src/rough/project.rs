use nalgebra::DVector;
use rayon::prelude::*;

use super::{oscillation, RoughPath};
use crate::algebra::metric_d;
use crate::error::{Error, Result};
use crate::spectral::{project_group, skew_canonical, Subspace};

/// Output of [`project_roughpath`].
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionReport {
    pub projected: RoughPath,
    pub subspace: Subspace,
    /// Largest distance from a grid time to the nearest partition point.
    pub mesh: f64,
    /// `o_{mesh}`: largest `d(x_s, x_t)` over grid pairs with `|t − s| ≤ mesh`.
    pub oscillation: f64,
    /// `max_{t∈Π} d(x_t, pr_{F_{t,n}} x_t)`.
    pub tail: f64,
    /// `2 o + tail`.
    pub bound: f64,
    /// `sup_t d(pr x_t, x_t)` over the grid.
    pub realized: f64,
}

/// `F_{t,n}`: the level-1 value and the top `n` planes of the area at `t`.
fn local_vectors(x: &RoughPath, i: usize, n: usize) -> Result<Vec<DVector<f64>>> {
    let g = &x.samples()[i];
    let spec = skew_canonical(g.area())?;
    let mut v = vec![g.vector().clone()];
    for j in 0..spec.rank().min(n) {
        let (a, b) = spec.plane(j);
        v.push(a);
        v.push(b);
    }
    Ok(v)
}

const SPAN_TOL: f64 = 1e-10;

/// Projects every sample onto `F_{Π,n} = span ⋃_{t∈Π} F_{t,n}` and reports
/// the realized uniform error next to the bound `2 o_{|Π|} + tail_n`.
pub fn project_roughpath(x: &RoughPath, n: usize, pi: &[f64]) -> Result<ProjectionReport> {
    if n == 0 {
        return Err(Error::InvalidParam("projection rank must be at least 1".into()));
    }
    if pi.is_empty() {
        return Err(Error::InvalidParam("empty partition".into()));
    }
    let idx = pi
        .iter()
        .map(|&t| x.index_of(t).ok_or_else(|| Error::NotSubset(format!("time {t}"))))
        .collect::<Result<Vec<_>>>()?;
    let d = x.dim();
    let norms = x.norms();

    let locals = idx
        .par_iter()
        .map(|&i| local_vectors(x, i, n))
        .collect::<Result<Vec<_>>>()?;
    let mut tail: f64 = 0.0;
    for (&i, vecs) in idx.iter().zip(&locals) {
        let local = Subspace::span(d, vecs, SPAN_TOL)?;
        let g = &x.samples()[i];
        tail = tail.max(metric_d(g, &project_group(g, &local)?, norms)?);
    }
    let all: Vec<DVector<f64>> = locals.into_iter().flatten().collect();
    let subspace = Subspace::span(d, &all, SPAN_TOL)?;

    let projected = x
        .samples()
        .par_iter()
        .map(|g| project_group(g, &subspace))
        .collect::<Result<Vec<_>>>()?;
    let realized = x
        .samples()
        .iter()
        .zip(&projected)
        .map(|(g, h)| metric_d(g, h, norms))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0, f64::max);

    let mesh = x
        .times()
        .iter()
        .map(|&t| pi.iter().map(|&s| (t - s).abs()).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max);
    let osc = oscillation(x, mesh);
    let projected = RoughPath::new(x.times().to_vec(), projected, x.alpha(), norms.clone())?;
    Ok(ProjectionReport {
        projected,
        subspace,
        mesh,
        oscillation: osc,
        tail,
        bound: 2.0 * osc + tail,
        realized,
    })
}
