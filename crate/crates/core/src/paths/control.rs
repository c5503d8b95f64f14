use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{accumulate_wedge, PLPath};
use crate::algebra::GroupElem;
use crate::error::{Error, Result};
use crate::spectral::{skew_canonical, EPS_SPEC};
use crate::trig::{TrigPath, TrigTerm};

/// One rotating plane of a spiral segment.
///
/// On local time `τ ∈ [0, 1]` it contributes the velocity
/// `Re(w e^{-2πinτ} (x − i y))`: `|n|` turns of a circle of speed `|w|`,
/// clockwise in the `(x, y)` plane when `n > 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpiralPlane {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    /// Complex amplitude as `[re, im]`.
    pub amplitude: [f64; 2],
    pub winding: i64,
}

impl SpiralPlane {
    fn w(&self) -> Complex64 {
        Complex64::new(self.amplitude[0], self.amplitude[1])
    }

    fn xv(&self) -> DVector<f64> {
        DVector::from_column_slice(&self.x)
    }

    fn yv(&self) -> DVector<f64> {
        DVector::from_column_slice(&self.y)
    }

    fn omega(&self) -> f64 {
        2.0 * PI * self.winding as f64
    }

    /// `w (x − i y)`.
    fn coeff(&self) -> DVector<Complex64> {
        let w = self.w();
        DVector::from_iterator(
            self.x.len(),
            self.x
                .iter()
                .zip(&self.y)
                .map(|(&a, &b)| w * Complex64::new(a, -b)),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Segment {
    Constant { displacement: Vec<f64>, duration: f64 },
    Spiral { planes: Vec<SpiralPlane>, duration: f64 },
}

impl Segment {
    pub fn duration(&self) -> f64 {
        match self {
            Segment::Constant { duration, .. } | Segment::Spiral { duration, .. } => *duration,
        }
    }

    fn duration_mut(&mut self) -> &mut f64 {
        match self {
            Segment::Constant { duration, .. } | Segment::Spiral { duration, .. } => duration,
        }
    }

    /// L¹ norm of the velocity; independent of the duration.
    pub fn l1_length(&self) -> f64 {
        match self {
            Segment::Constant { displacement, .. } => {
                displacement.iter().map(|v| v * v).sum::<f64>().sqrt()
            }
            Segment::Spiral { planes, .. } => {
                planes.iter().map(|p| p.w().norm_sqr()).sum::<f64>().sqrt()
            }
        }
    }

    /// Exact increment of the horizontal lift over the whole segment.
    pub fn increment(&self, dim: usize) -> GroupElem {
        match self {
            Segment::Constant { displacement, .. } => {
                GroupElem::horizontal(DVector::from_column_slice(displacement))
            }
            Segment::Spiral { planes, .. } => {
                // distinct |n| make every cross-plane term integrate to zero
                let mut area = DMatrix::zeros(dim, dim);
                for p in planes {
                    let scale = -p.w().norm_sqr() / (4.0 * PI * p.winding as f64);
                    accumulate_wedge(&mut area, &p.xv(), &p.yv(), scale);
                }
                GroupElem::from_parts_unchecked(DVector::zeros(dim), area)
            }
        }
    }

    /// Increment over local time `[0, tau]`.
    pub fn partial_increment(&self, dim: usize, tau: f64) -> GroupElem {
        match self {
            Segment::Constant { displacement, .. } => {
                GroupElem::horizontal(DVector::from_column_slice(displacement) * tau)
            }
            Segment::Spiral { .. } if tau >= 1.0 => self.increment(dim),
            Segment::Spiral { planes, .. } => self.trig(dim, planes).signature(tau),
        }
    }

    fn trig(&self, dim: usize, planes: &[SpiralPlane]) -> TrigPath {
        let terms = planes
            .iter()
            .map(|p| TrigTerm {
                freq: -p.omega(),
                coeff: p.coeff(),
            })
            .collect();
        TrigPath::new(dim, terms)
    }

    fn validate(&self, dim: usize) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidControl(m));
        let dur = self.duration();
        if !(dur.is_finite() && dur > 0.0) {
            return bad(format!("segment duration {dur} is not positive"));
        }
        match self {
            Segment::Constant { displacement, .. } => {
                if displacement.len() != dim {
                    return Err(Error::DimMismatch {
                        expected: dim,
                        found: displacement.len(),
                    });
                }
                if displacement.iter().any(|v| !v.is_finite()) {
                    return Err(Error::NonFinite("constant segment"));
                }
            }
            Segment::Spiral { planes, .. } => {
                if planes.is_empty() {
                    return bad("spiral segment without planes".into());
                }
                let mut windings: Vec<u64> = planes.iter().map(|p| p.winding.unsigned_abs()).collect();
                windings.sort_unstable();
                if windings[0] == 0 {
                    return bad("spiral winding must be nonzero".into());
                }
                if windings.windows(2).any(|w| w[0] == w[1]) {
                    return bad("spiral windings must have distinct absolute values".into());
                }
                let mut basis = Vec::with_capacity(2 * planes.len());
                for p in planes {
                    if p.x.len() != dim || p.y.len() != dim {
                        return Err(Error::DimMismatch {
                            expected: dim,
                            found: p.x.len().max(p.y.len()),
                        });
                    }
                    if p.x.iter().chain(&p.y).chain(&p.amplitude).any(|v| !v.is_finite()) {
                        return Err(Error::NonFinite("spiral plane"));
                    }
                    basis.push(p.xv());
                    basis.push(p.yv());
                }
                for (i, u) in basis.iter().enumerate() {
                    for (j, v) in basis.iter().enumerate().skip(i) {
                        let target = if i == j { 1.0 } else { 0.0 };
                        if (u.dot(v) - target).abs() > EPS_SPEC {
                            return bad("spiral plane vectors are not orthonormal".into());
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// Piecewise velocity on `[0, 1]`; segment durations are positive and sum to 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Control {
    pub dim: usize,
    pub segments: Vec<Segment>,
}

impl Control {
    pub fn new(dim: usize, segments: Vec<Segment>) -> Result<Self> {
        let c = Self { dim, segments };
        c.validate()?;
        Ok(c)
    }

    pub fn empty(dim: usize) -> Self {
        Self {
            dim,
            segments: Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::InvalidControl("dimension must be positive".into()));
        }
        for s in &self.segments {
            s.validate(self.dim)?;
        }
        if !self.segments.is_empty() {
            let total: f64 = self.segments.iter().map(Segment::duration).sum();
            if (total - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidControl(format!(
                    "durations sum to {total}, expected 1"
                )));
            }
        }
        Ok(())
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    pub fn l1_length(&self) -> f64 {
        self.segments.iter().map(Segment::l1_length).sum()
    }

    /// Runs `self` then `other`, each on half of the unit interval.
    pub fn then(&self, other: &Control) -> Result<Control> {
        if self.dim != other.dim {
            return Err(Error::DimMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        let (ws, wo) = match (self.is_empty(), other.is_empty()) {
            (true, _) => (0.0, 1.0),
            (_, true) => (1.0, 0.0),
            _ => (0.5, 0.5),
        };
        let mut segments = Vec::with_capacity(self.segments.len() + other.segments.len());
        for (src, w) in [(self, ws), (other, wo)] {
            for s in &src.segments {
                let mut s = s.clone();
                *s.duration_mut() *= w;
                segments.push(s);
            }
        }
        Ok(Control {
            dim: self.dim,
            segments,
        })
    }
}

/// Endpoint of the horizontal lift of `c` started at the identity.
pub fn evolve(c: &Control) -> GroupElem {
    c.segments
        .iter()
        .fold(GroupElem::identity(c.dim), |g, s| g.mul_unchecked(&s.increment(c.dim)))
}

/// Lift of `c` sampled at `per_segment` equally spaced local times inside every
/// segment, including both ends. Returns `(t, γ(t))` pairs.
pub fn evolve_trace(c: &Control, per_segment: usize) -> Vec<(f64, GroupElem)> {
    let steps = per_segment.max(1);
    let mut out = vec![(0.0, GroupElem::identity(c.dim))];
    let mut base = GroupElem::identity(c.dim);
    let mut t0 = 0.0;
    for s in &c.segments {
        for k in 1..=steps {
            let tau = k as f64 / steps as f64;
            let g = base.mul_unchecked(&s.partial_increment(c.dim, tau));
            out.push((t0 + tau * s.duration(), g));
        }
        base = base.mul_unchecked(&s.increment(c.dim));
        t0 += s.duration();
    }
    out
}

/// Spiral with endpoint `(0, A)` and L¹ length `2√π (Σ_j jσ_j)^{1/2}`.
pub fn vertical_geodesic(area: &DMatrix<f64>) -> Result<Control> {
    let dim = area.nrows();
    let spec = skew_canonical(area)?;
    if spec.is_empty() {
        return Ok(Control::empty(dim));
    }
    // σ X∧Y = −|w|²/(4πj) (Y∧X) for w = 2√(πjσ)
    let planes = spec
        .sigmas
        .iter()
        .zip(&spec.planes)
        .enumerate()
        .map(|(i, (&sigma, (x, y)))| {
            let j = (i + 1) as f64;
            SpiralPlane {
                x: y.clone(),
                y: x.clone(),
                amplitude: [2.0 * (PI * j * sigma).sqrt(), 0.0],
                winding: (i + 1) as i64,
            }
        })
        .collect();
    Ok(Control {
        dim,
        segments: vec![Segment::Spiral {
            planes,
            duration: 1.0,
        }],
    })
}

/// Straight line to `a` followed by the vertical spiral for `A`, with
/// durations proportional to length.
pub fn connect(g: &GroupElem) -> Result<Control> {
    let dim = g.dim();
    let vertical = vertical_geodesic(g.area())?;
    let line_len = g.vector().norm();
    let mut segments = Vec::with_capacity(2);
    if line_len > 0.0 {
        segments.push(Segment::Constant {
            displacement: g.vector().as_slice().to_vec(),
            duration: 1.0,
        });
    }
    if let Some(spiral) = vertical.segments.into_iter().next() {
        segments.push(spiral);
    }
    let total: f64 = segments.iter().map(Segment::l1_length).sum();
    if segments.len() == 2 {
        // keep both pieces resolvable on the time axis
        let first = (segments[0].l1_length() / total).clamp(1e-9, 1.0 - 1e-9);
        *segments[0].duration_mut() = first;
        *segments[1].duration_mut() = 1.0 - first;
    }
    Ok(Control { dim, segments })
}

/// `δ(K)` with PL length ≤ L¹ length · (1 + δ(K)) for `polygonize(·, K)`.
pub fn polygon_length_excess(k: usize) -> f64 {
    let h = PI / k as f64;
    (h.tan() / h).sqrt() - 1.0
}

/// Piecewise-linear realization of `c` with exactly the same signature.
///
/// A spiral segment with largest winding `m` is sampled at `K·m` equal steps.
/// Each plane's polygon is rescaled about its starting vertex so that its
/// signed area equals the area of the circles it replaces; the vertex sum
/// keeps cross-plane areas at zero since `K·m` exceeds any `|n_j| + |n_k|`.
pub fn polygonize(c: &Control, k: usize) -> Result<PLPath> {
    if k < 3 {
        return Err(Error::InvalidParam(format!(
            "polygon resolution K = {k} must be at least 3"
        )));
    }
    c.validate()?;
    let dim = c.dim;
    let mut times = vec![0.0];
    let mut points = vec![DVector::zeros(dim)];
    if c.is_empty() {
        times.push(1.0);
        points.push(DVector::zeros(dim));
        return PLPath::new(times, points);
    }
    let mut t0 = 0.0;
    for (si, s) in c.segments.iter().enumerate() {
        let start = points[points.len() - 1].clone();
        let t1 = if si + 1 == c.segments.len() {
            1.0
        } else {
            t0 + s.duration()
        };
        match s {
            Segment::Constant { displacement, .. } => {
                times.push(t1);
                points.push(start + DVector::from_column_slice(displacement));
            }
            Segment::Spiral { planes, .. } => {
                let m = planes.iter().map(|p| p.winding.unsigned_abs()).max().unwrap_or(1);
                let n = k * m as usize;
                let radial: Vec<(f64, Complex64, DVector<Complex64>)> = planes
                    .iter()
                    .map(|p| {
                        let theta = 2.0 * PI * p.winding.unsigned_abs() as f64 / n as f64;
                        let s = (theta / theta.sin()).sqrt();
                        // z(τ) = s w (e^{-iωτ} − 1)/(−iω)
                        let scale = Complex64::new(0.0, p.omega()).inv() * (-s);
                        (p.omega(), scale, p.coeff())
                    })
                    .collect();
                for step in 1..=n {
                    let tau = step as f64 / n as f64;
                    let mut v = start.clone();
                    if step < n {
                        for (omega, scale, coeff) in &radial {
                            let f = (Complex64::from_polar(1.0, -omega * tau) - 1.0) * scale;
                            for (vi, ci) in v.iter_mut().zip(coeff.iter()) {
                                *vi += (f * ci).re;
                            }
                        }
                    }
                    times.push(if step == n { t1 } else { t0 + tau * (t1 - t0) });
                    points.push(v);
                }
            }
        }
        t0 = t1;
    }
    PLPath::new(times, points)
}
