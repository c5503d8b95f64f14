use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::PLPath;
use crate::algebra::{antisymmetrize, skew_defect, GroupElem, EPS_SKEW};
use crate::error::{Error, Result};
use crate::spectral::skew_canonical;
use crate::trig::{TrigPath, TrigTerm};

/// Normal geodesic data: `γ̇(s) = e^{sΛ} u₀`, `γ̇⁽²⁾ = ½ γ ∧ γ̇`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeodesicParams {
    pub u0: Vec<f64>,
    #[serde(rename = "Lambda")]
    pub lambda: Vec<Vec<f64>>,
}

impl GeodesicParams {
    pub fn new(u0: &DVector<f64>, lambda: &DMatrix<f64>) -> Result<Self> {
        let gp = Self {
            u0: u0.as_slice().to_vec(),
            lambda: lambda.row_iter().map(|r| r.iter().copied().collect()).collect(),
        };
        gp.matrices()?;
        Ok(gp)
    }

    /// Validated `(u₀, Λ)`; Λ is antisymmetrized.
    pub fn matrices(&self) -> Result<(DVector<f64>, DMatrix<f64>)> {
        let d = self.u0.len();
        if d == 0 {
            return Err(Error::InvalidParam("empty initial velocity".into()));
        }
        if self.lambda.len() != d || self.lambda.iter().any(|r| r.len() != d) {
            return Err(Error::DimMismatch {
                expected: d,
                found: self.lambda.len(),
            });
        }
        let lam = DMatrix::from_fn(d, d, |i, j| self.lambda[i][j]);
        let u0 = DVector::from_column_slice(&self.u0);
        if lam.iter().chain(u0.iter()).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("geodesic parameters"));
        }
        let defect = skew_defect(&lam);
        if defect > EPS_SKEW {
            return Err(Error::NotSkew { defect });
        }
        Ok((u0, antisymmetrize(&lam)))
    }

    /// Velocity as a trigonometric polynomial: one rotating term per block of
    /// Λ and a constant term on its kernel.
    fn trig(&self) -> Result<TrigPath> {
        let (u0, lam) = self.matrices()?;
        let d = u0.len();
        let spec = skew_canonical(&lam)?;
        let mut kernel = u0.clone();
        let mut terms = Vec::with_capacity(spec.rank() + 1);
        for (j, &lambda) in spec.sigmas.iter().enumerate() {
            let (x, y) = spec.plane(j);
            let (px, py) = (u0.dot(&x), u0.dot(&y));
            kernel -= &x * px + &y * py;
            // Λ sends x ↦ −λy, y ↦ λx, so px + i·py turns as e^{−iλs}
            let z = Complex64::new(px, py);
            let coeff = DVector::from_fn(d, |i, _| z * Complex64::new(x[i], -y[i]));
            terms.push(TrigTerm {
                freq: -lambda,
                coeff,
            });
        }
        terms.push(TrigTerm {
            freq: 0.0,
            coeff: kernel.map(|v| Complex64::new(v, 0.0)),
        });
        Ok(TrigPath::new(d, terms))
    }
}

/// Point `γ(t)` of the normal geodesic started at the identity.
pub fn geodesic_endpoint(gp: &GeodesicParams, t: f64) -> Result<GroupElem> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::InvalidParam(format!("geodesic time {t} outside [0, 1]")));
    }
    Ok(gp.trig()?.signature(t))
}

/// First-level trace of the geodesic at `samples + 1` equally spaced times.
pub fn geodesic_path(gp: &GeodesicParams, samples: usize) -> Result<PLPath> {
    let tp = gp.trig()?;
    let n = samples.max(1);
    let points = (0..=n)
        .map(|k| tp.signature(k as f64 / n as f64).into_parts().0)
        .collect();
    PLPath::uniform(points)
}
