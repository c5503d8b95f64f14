//! Bounded-variation paths and their step-2 signatures, horizontal controls,
//! and the explicit sub-Riemannian curves built from them.

mod control;
mod geodesic;

pub use control::{
    connect, evolve, evolve_trace, polygon_length_excess, polygonize, vertical_geodesic,
    Control, Segment, SpiralPlane,
};
pub use geodesic::{geodesic_endpoint, geodesic_path, GeodesicParams};

use nalgebra::{DMatrix, DVector};

use crate::algebra::GroupElem;
use crate::error::{Error, Result};

/// Piecewise-linear path through `points[i]` at `times[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PLPath {
    times: Vec<f64>,
    points: Vec<DVector<f64>>,
}

impl PLPath {
    pub fn new(times: Vec<f64>, points: Vec<DVector<f64>>) -> Result<Self> {
        if times.is_empty() || times.len() != points.len() {
            return Err(Error::InvalidPath(format!(
                "{} times for {} points",
                times.len(),
                points.len()
            )));
        }
        let d = points[0].len();
        if d == 0 {
            return Err(Error::InvalidPath("zero-dimensional points".into()));
        }
        for (i, p) in points.iter().enumerate() {
            if p.len() != d {
                return Err(Error::DimMismatch {
                    expected: d,
                    found: p.len(),
                });
            }
            if p.iter().any(|v| !v.is_finite()) || !times[i].is_finite() {
                return Err(Error::NonFinite("path vertex"));
            }
        }
        if let Some(w) = times.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::InvalidPath(format!(
                "times not strictly increasing at vertex {}",
                w + 1
            )));
        }
        Ok(Self { times, points })
    }

    /// Vertices at equally spaced times on `[0, 1]`.
    pub fn uniform(points: Vec<DVector<f64>>) -> Result<Self> {
        let n = points.len();
        let times = if n == 1 {
            vec![0.0]
        } else {
            (0..n).map(|i| i as f64 / (n - 1) as f64).collect()
        };
        Self::new(times, points)
    }

    pub fn dim(&self) -> usize {
        self.points[0].len()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn points(&self) -> &[DVector<f64>] {
        &self.points
    }

    pub fn start_time(&self) -> f64 {
        self.times[0]
    }

    pub fn end_time(&self) -> f64 {
        self.times[self.times.len() - 1]
    }

    pub fn length(&self) -> f64 {
        self.points.windows(2).map(|w| (&w[1] - &w[0]).norm()).sum()
    }

    /// Exact signature between vertices `i ≤ j`.
    pub fn signature_between(&self, i: usize, j: usize) -> GroupElem {
        assert!(i <= j && j < self.len());
        let d = self.dim();
        let origin = &self.points[i];
        let mut area = DMatrix::zeros(d, d);
        for k in i..j {
            let offset = &self.points[k] - origin;
            let step = &self.points[k + 1] - &self.points[k];
            accumulate_wedge(&mut area, &offset, &step, 0.5);
        }
        GroupElem::from_parts_unchecked(&self.points[j] - origin, area)
    }

    /// Signature from the first vertex to time `t`, interpolating inside the
    /// segment that contains `t`.
    pub fn signature_at(&self, t: f64) -> GroupElem {
        self.signatures_at(&[t]).pop().expect("one time requested")
    }

    /// Signatures from the first vertex to each of the sorted times `ts`.
    pub fn signatures_at(&self, ts: &[f64]) -> Vec<GroupElem> {
        let d = self.dim();
        let origin = &self.points[0];
        let mut area = DMatrix::zeros(d, d);
        let mut out = Vec::with_capacity(ts.len());
        let mut k = 0;
        for &t in ts {
            // advance whole segments ending at or before t
            while k + 1 < self.len() && self.times[k + 1] <= t {
                let offset = &self.points[k] - origin;
                let step = &self.points[k + 1] - &self.points[k];
                accumulate_wedge(&mut area, &offset, &step, 0.5);
                k += 1;
            }
            let pos = if k + 1 < self.len() && t > self.times[k] {
                let frac = (t - self.times[k]) / (self.times[k + 1] - self.times[k]);
                let step = (&self.points[k + 1] - &self.points[k]) * frac;
                let offset = &self.points[k] - origin;
                let mut a = area.clone();
                accumulate_wedge(&mut a, &offset, &step, 0.5);
                out.push(GroupElem::from_parts_unchecked(offset + step, a));
                continue;
            } else {
                &self.points[k] - origin
            };
            out.push(GroupElem::from_parts_unchecked(pos, area.clone()));
        }
        out
    }

    /// Signatures from the first vertex to every vertex.
    pub fn prefix_signatures(&self) -> Vec<GroupElem> {
        self.signatures_at(&self.times.clone())
    }

    pub fn reverse(&self) -> Self {
        let t0 = self.start_time();
        let t1 = self.end_time();
        let times = self.times.iter().rev().map(|t| t0 + t1 - t).collect();
        let points = self.points.iter().rev().cloned().collect();
        Self { times, points }
    }

    /// Appends `other`, translated to start where `self` ends and shifted in
    /// time to follow it.
    pub fn concat(&self, other: &Self) -> Result<Self> {
        if other.dim() != self.dim() {
            return Err(Error::DimMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        let shift_x = self.points[self.len() - 1].clone() - &other.points[0];
        let shift_t = self.end_time() - other.start_time();
        let mut times = self.times.clone();
        let mut points = self.points.clone();
        for (t, p) in other.times.iter().zip(&other.points).skip(1) {
            times.push(t + shift_t);
            points.push(p + &shift_x);
        }
        Self::new(times, points)
    }

    /// Applies a strictly increasing time change.
    pub fn reparametrize(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(
            self.times.iter().map(|&t| f(t)).collect(),
            self.points.clone(),
        )
    }
}

/// `area += scale · (x ∧ y)`.
pub(crate) fn accumulate_wedge(area: &mut DMatrix<f64>, x: &DVector<f64>, y: &DVector<f64>, scale: f64) {
    let d = x.len();
    for j in 0..d {
        let (xj, yj) = (x[j] * scale, y[j] * scale);
        let col = area.column_mut(j);
        for (i, a) in col.into_iter().enumerate() {
            *a += x[i] * yj - xj * y[i];
        }
    }
}

/// Step-2 signature of a piecewise-linear path.
pub fn pl_signature(p: &PLPath) -> GroupElem {
    p.signature_between(0, p.len() - 1)
}
