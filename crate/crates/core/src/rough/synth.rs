use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::RoughPath;
use crate::algebra::{skew_defect, wedge, GroupElem, HomNorms, EPS_SKEW};
use crate::error::{Error, Result};
use crate::paths::PLPath;
use crate::trig::{TrigPath, TrigTerm};

fn default_modes() -> usize {
    4
}

fn default_area_scale() -> f64 {
    1.0
}

/// Test-corpus generators, all sampled on a uniform grid of `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SynthKind {
    /// Signature of the polygon through `points` at uniform times.
    Lift { points: Vec<Vec<f64>> },
    /// `x_t = (0, t Σ_j σ_j e_{2j} ∧ e_{2j+1})`.
    PureArea {
        sigmas: Vec<f64>,
        #[serde(default)]
        dim: Option<usize>,
    },
    /// Polygon signature times the central drift `(0, t B)`.
    LiftPlusArea {
        points: Vec<Vec<f64>>,
        drift: Vec<Vec<f64>>,
    },
    /// Random smooth lift with coordinate scales `(i+1)^{-decay/2}`, times a
    /// central drift `(0, t B)` where `B` has singular values `j^{-decay}` on
    /// random orthonormal planes.
    RandomWg {
        dim: usize,
        seed: u64,
        decay: f64,
        #[serde(default = "default_modes")]
        modes: usize,
        #[serde(default = "default_area_scale")]
        area_scale: f64,
    },
}

fn grid(steps: usize) -> Vec<f64> {
    (0..=steps).map(|i| i as f64 / steps as f64).collect()
}

fn polygon(points: &[Vec<f64>]) -> Result<PLPath> {
    if points.len() < 2 {
        return Err(Error::InvalidParam("lift needs at least two points".into()));
    }
    PLPath::uniform(points.iter().map(|p| DVector::from_column_slice(p)).collect())
}

fn skew_from_rows(rows: &[Vec<f64>], d: usize) -> Result<DMatrix<f64>> {
    if rows.len() != d || rows.iter().any(|r| r.len() != d) {
        return Err(Error::DimMismatch {
            expected: d,
            found: rows.len(),
        });
    }
    let m = DMatrix::from_fn(d, d, |i, j| rows[i][j]);
    let defect = skew_defect(&m);
    if defect > EPS_SKEW {
        return Err(Error::NotSkew { defect });
    }
    Ok(m)
}

fn random_wg(dim: usize, seed: u64, decay: f64, modes: usize, area_scale: f64, times: &[f64]) -> Result<Vec<GroupElem>> {
    if dim < 2 {
        return Err(Error::InvalidParam("RANDOM_WG needs dim ≥ 2".into()));
    }
    if !(decay.is_finite() && decay >= 0.0) || modes == 0 || !area_scale.is_finite() {
        return Err(Error::InvalidParam("RANDOM_WG needs decay ≥ 0 and modes ≥ 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut normal = || -> f64 { StandardNormal.sample(&mut rng) };
    let scale: Vec<f64> = (0..dim).map(|i| ((i + 1) as f64).powf(-decay / 2.0)).collect();
    let mut terms = Vec::with_capacity(modes + 1);
    terms.push(TrigTerm {
        freq: 0.0,
        coeff: DVector::from_fn(dim, |i, _| Complex64::new(normal() * scale[i], 0.0)),
    });
    for m in 1..=modes {
        let amp = 1.0 / m as f64;
        let coeff = DVector::from_fn(dim, |i, _| Complex64::new(normal(), normal()) * (amp * scale[i]));
        terms.push(TrigTerm {
            freq: 2.0 * PI * m as f64,
            coeff,
        });
    }
    let lift = TrigPath::new(dim, terms);

    let gauss = DMatrix::from_fn(dim, dim, |_, _| normal());
    let q = gauss.qr().q();
    let mut drift = DMatrix::zeros(dim, dim);
    for j in 0..dim / 2 {
        let sigma = area_scale * ((j + 1) as f64).powf(-decay);
        drift += wedge(&q.column(2 * j).into_owned(), &q.column(2 * j + 1).into_owned()) * sigma;
    }
    Ok(times
        .iter()
        .map(|&t| {
            let (a, area) = lift.signature(t).into_parts();
            GroupElem::from_parts_unchecked(a, area + &drift * t)
        })
        .collect())
}

/// Generates a rough path on `steps + 1` uniform grid points of `[0, 1]`.
pub fn synth(kind: &SynthKind, steps: usize, alpha: f64, norms: HomNorms) -> Result<RoughPath> {
    if steps == 0 {
        return Err(Error::InvalidParam("grid needs at least one step".into()));
    }
    let times = grid(steps);
    let samples = match kind {
        SynthKind::Lift { points } => polygon(points)?.signatures_at(&times),
        SynthKind::PureArea { sigmas, dim } => {
            let d = dim.unwrap_or(2 * sigmas.len());
            if sigmas.is_empty() || d < 2 * sigmas.len() {
                return Err(Error::InvalidParam(format!(
                    "{} area planes do not fit in dimension {d}",
                    sigmas.len()
                )));
            }
            if sigmas.iter().any(|s| !s.is_finite()) {
                return Err(Error::NonFinite("area sigmas"));
            }
            let mut area = DMatrix::zeros(d, d);
            for (j, s) in sigmas.iter().enumerate() {
                area[(2 * j, 2 * j + 1)] = *s;
                area[(2 * j + 1, 2 * j)] = -*s;
            }
            times
                .iter()
                .map(|&t| GroupElem::from_parts_unchecked(DVector::zeros(d), &area * t))
                .collect()
        }
        SynthKind::LiftPlusArea { points, drift } => {
            let path = polygon(points)?;
            let b = skew_from_rows(drift, path.dim())?;
            path.signatures_at(&times)
                .into_iter()
                .zip(&times)
                .map(|(g, &t)| {
                    let (a, area) = g.into_parts();
                    GroupElem::from_parts_unchecked(a, area + &b * t)
                })
                .collect()
        }
        SynthKind::RandomWg {
            dim,
            seed,
            decay,
            modes,
            area_scale,
        } => random_wg(*dim, *seed, *decay, *modes, *area_scale, &times)?,
    };
    RoughPath::new(times, samples, alpha, norms)
}
