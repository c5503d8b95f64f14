//! Flows driven by rough paths whose coordinates are identified with smooth
//! vector fields on `R^m`, and their Wong-Zakai approximation by ODE flows
//! along geodesic interpolations.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::HomNorms;
use crate::error::{Error, Result};
use crate::paths::PLPath;
use crate::rough::{geodesic_interpolation, mesh_partition, RawRoughPath, RoughPath};

pub const MAX_STATE_DIM: usize = 3;
pub const MAX_FIELDS: usize = 8;
/// Largest weak-geometricity defect a driver may carry.
pub const DEFECT_TOL: f64 = 1e-8;
/// RK4 step, measured in driver path length.
pub const ODE_STEP: f64 = 0.005;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SineField {
    pub v: Vec<f64>,
    pub w: Vec<f64>,
    #[serde(default)]
    pub phase: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BumpField {
    pub v: Vec<f64>,
    pub center: Vec<f64>,
    pub width: f64,
}

/// Vector fields `φ_1 … φ_M` on `R^m` with closed-form Jacobians.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum FieldBasis {
    /// `φ_k(y) = c_k`.
    Constant { vectors: Vec<Vec<f64>> },
    /// `φ_k(y) = B_k y`, matrices given row-major.
    Linear { matrices: Vec<Vec<Vec<f64>>> },
    /// `φ_k(y) = v_k cos(⟨w_k, y⟩ + θ_k)`.
    Sine { fields: Vec<SineField> },
    /// `φ_k(y) = v_k / (1 + |y − c_k|²/w_k²)`.
    Bump { fields: Vec<BumpField> },
}

impl FieldBasis {
    pub fn len(&self) -> usize {
        match self {
            FieldBasis::Constant { vectors } => vectors.len(),
            FieldBasis::Linear { matrices } => matrices.len(),
            FieldBasis::Sine { fields } => fields.len(),
            FieldBasis::Bump { fields } => fields.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn state_dim(&self) -> usize {
        match self {
            FieldBasis::Constant { vectors } => vectors.first().map_or(0, Vec::len),
            FieldBasis::Linear { matrices } => matrices.first().map_or(0, Vec::len),
            FieldBasis::Sine { fields } => fields.first().map_or(0, |f| f.v.len()),
            FieldBasis::Bump { fields } => fields.first().map_or(0, |f| f.v.len()),
        }
    }

    /// Checks sizes, finiteness, and the Jacobians against central finite
    /// differences on a small lattice.
    pub fn validate(&self) -> Result<()> {
        let m = self.state_dim();
        let big_m = self.len();
        if m == 0 || m > MAX_STATE_DIM {
            return Err(Error::InvalidParam(format!(
                "state dimension {m} outside 1..={MAX_STATE_DIM}"
            )));
        }
        if big_m == 0 || big_m > MAX_FIELDS {
            return Err(Error::InvalidParam(format!(
                "basis size {big_m} outside 1..={MAX_FIELDS}"
            )));
        }
        let vecs: Vec<&Vec<f64>> = match self {
            FieldBasis::Constant { vectors } => vectors.iter().collect(),
            FieldBasis::Linear { matrices } => {
                if matrices.iter().any(|b| b.len() != m) {
                    return Err(Error::DimMismatch { expected: m, found: 0 });
                }
                matrices.iter().flatten().collect()
            }
            FieldBasis::Sine { fields } => fields.iter().flat_map(|f| [&f.v, &f.w]).collect(),
            FieldBasis::Bump { fields } => {
                if fields.iter().any(|f| !(f.width.is_finite() && f.width > 0.0)) {
                    return Err(Error::InvalidParam("bump width must be positive".into()));
                }
                fields.iter().flat_map(|f| [&f.v, &f.center]).collect()
            }
        };
        for v in vecs {
            if v.len() != m {
                return Err(Error::DimMismatch {
                    expected: m,
                    found: v.len(),
                });
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(Error::NonFinite("field basis"));
            }
        }
        if let FieldBasis::Sine { fields } = self {
            if fields.iter().any(|f| !f.phase.is_finite()) {
                return Err(Error::NonFinite("field basis"));
            }
        }
        self.check_jacobians()
    }

    fn check_jacobians(&self) -> Result<()> {
        let m = self.state_dim();
        let h = 1e-5;
        for point in 0..3usize.pow(m as u32) {
            let y = DVector::from_fn(m, |i, _| ((point / 3usize.pow(i as u32)) % 3) as f64 * 0.7 - 0.7);
            for k in 0..self.len() {
                let jac = self.jacobian(k, &y);
                for j in 0..m {
                    let mut up = y.clone();
                    let mut dn = y.clone();
                    up[j] += h;
                    dn[j] -= h;
                    let fd = (self.eval(k, &up) - self.eval(k, &dn)) / (2.0 * h);
                    let err = (fd - jac.column(j)).amax();
                    if err > 1e-6 * (1.0 + jac.amax()) {
                        return Err(Error::InvalidParam(format!(
                            "Jacobian of field {k} disagrees with finite differences ({err:e})"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn eval(&self, k: usize, y: &DVector<f64>) -> DVector<f64> {
        match self {
            FieldBasis::Constant { vectors } => DVector::from_column_slice(&vectors[k]),
            FieldBasis::Linear { matrices } => row_major(&matrices[k]) * y,
            FieldBasis::Sine { fields } => {
                let f = &fields[k];
                let arg = dot(&f.w, y) + f.phase;
                DVector::from_column_slice(&f.v) * arg.cos()
            }
            FieldBasis::Bump { fields } => {
                let f = &fields[k];
                let r2 = dist2(&f.center, y) / (f.width * f.width);
                DVector::from_column_slice(&f.v) / (1.0 + r2)
            }
        }
    }

    /// `Dφ_k(y)`, an `m × m` matrix.
    pub fn jacobian(&self, k: usize, y: &DVector<f64>) -> DMatrix<f64> {
        let m = y.len();
        match self {
            FieldBasis::Constant { .. } => DMatrix::zeros(m, m),
            FieldBasis::Linear { matrices } => row_major(&matrices[k]),
            FieldBasis::Sine { fields } => {
                let f = &fields[k];
                let arg = dot(&f.w, y) + f.phase;
                DVector::from_column_slice(&f.v)
                    * DVector::from_column_slice(&f.w).transpose()
                    * (-arg.sin())
            }
            FieldBasis::Bump { fields } => {
                let f = &fields[k];
                let w2 = f.width * f.width;
                let s = 1.0 + dist2(&f.center, y) / w2;
                let grad = DVector::from_fn(m, |i, _| -2.0 * (y[i] - f.center[i]) / (w2 * s * s));
                DVector::from_column_slice(&f.v) * grad.transpose()
            }
        }
    }

    /// `Σ_k φ_k(y) v_k`.
    pub fn drive(&self, y: &DVector<f64>, v: &DVector<f64>) -> DVector<f64> {
        let mut out = DVector::zeros(y.len());
        for (k, vk) in v.iter().enumerate() {
            if *vk != 0.0 {
                out += self.eval(k, y) * *vk;
            }
        }
        out
    }

    /// `[φ_k, φ_l](y) = Dφ_l φ_k − Dφ_k φ_l`.
    pub fn bracket(&self, k: usize, l: usize, y: &DVector<f64>) -> DVector<f64> {
        self.jacobian(l, y) * self.eval(k, y) - self.jacobian(k, y) * self.eval(l, y)
    }
}

fn row_major(rows: &[Vec<f64>]) -> DMatrix<f64> {
    DMatrix::from_fn(rows.len(), rows.len(), |i, j| rows[i][j])
}

fn dot(w: &[f64], y: &DVector<f64>) -> f64 {
    w.iter().zip(y.iter()).map(|(a, b)| a * b).sum()
}

fn dist2(c: &[f64], y: &DVector<f64>) -> f64 {
    c.iter().zip(y.iter()).map(|(a, b)| (a - b) * (a - b)).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// Second-order Euler step using level-1 and level-2 increments.
    Davie,
    /// RK4 along a piecewise-linear driver.
    Rk4,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowResult {
    pub times: Vec<f64>,
    pub states: Vec<DVector<f64>>,
    pub scheme: Scheme,
    /// Largest time step of the driver.
    pub mesh: f64,
}

fn check_driver(m_fields: usize, dim: usize, y0: &DVector<f64>, basis: &FieldBasis) -> Result<()> {
    basis.validate()?;
    if m_fields != dim {
        return Err(Error::DimMismatch {
            expected: basis.len(),
            found: dim,
        });
    }
    if y0.len() != basis.state_dim() {
        return Err(Error::DimMismatch {
            expected: basis.state_dim(),
            found: y0.len(),
        });
    }
    Ok(())
}

fn max_step(times: &[f64]) -> f64 {
    times.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max)
}

/// `y ← y + φ(y) x_{st} + Σ_{k,l} Dφ_l(y) φ_k(y) x⁽²⁾_{st,kl}` on every grid
/// step. Drivers with weak-geometricity defect above [`DEFECT_TOL`] are
/// refused.
pub fn rough_flow(x: &RawRoughPath, basis: &FieldBasis, y0: &DVector<f64>) -> Result<FlowResult> {
    check_driver(basis.len(), x.dim(), y0, basis)?;
    let defect = x.max_defect(&HomNorms::default());
    if defect > DEFECT_TOL {
        return Err(Error::NotWeaklyGeometric { defect });
    }
    let m_fields = basis.len();
    let mut y = y0.clone();
    let mut states = Vec::with_capacity(x.len());
    states.push(y.clone());
    for i in 0..x.len() - 1 {
        let (da, l2) = x.increment(i, i + 1);
        let values: Vec<DVector<f64>> = (0..m_fields).map(|k| basis.eval(k, &y)).collect();
        let mut step = DVector::zeros(y.len());
        for (k, phi) in values.iter().enumerate() {
            step += phi * da[k];
        }
        for l in 0..m_fields {
            let mut dir = DVector::zeros(y.len());
            for (k, phi) in values.iter().enumerate() {
                dir += phi * l2[(k, l)];
            }
            step += basis.jacobian(l, &y) * dir;
        }
        y += step;
        states.push(y.clone());
    }
    Ok(FlowResult {
        times: x.times.clone(),
        states,
        scheme: Scheme::Davie,
        mesh: max_step(&x.times),
    })
}

/// Solves `dy = Σ_k φ_k(y) dx_k` along a piecewise-linear driver with RK4,
/// recording the state at every vertex.
pub fn ode_flow(path: &PLPath, basis: &FieldBasis, y0: &DVector<f64>) -> Result<FlowResult> {
    check_driver(basis.len(), path.dim(), y0, basis)?;
    let mut y = y0.clone();
    let mut states = Vec::with_capacity(path.len());
    states.push(y.clone());
    for w in path.points().windows(2) {
        let delta = &w[1] - &w[0];
        let steps = (delta.norm() / ODE_STEP).ceil().max(1.0) as usize;
        let v = delta / steps as f64;
        for _ in 0..steps {
            let k1 = basis.drive(&y, &v);
            let k2 = basis.drive(&(&y + &k1 * 0.5), &v);
            let k3 = basis.drive(&(&y + &k2 * 0.5), &v);
            let k4 = basis.drive(&(&y + &k3), &v);
            y += (k1 + k2 * 2.0 + k3 * 2.0 + k4) / 6.0;
        }
        states.push(y.clone());
    }
    Ok(FlowResult {
        times: path.times().to_vec(),
        states,
        scheme: Scheme::Rk4,
        mesh: max_step(path.times()),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WzRow {
    pub mesh: f64,
    pub y0_index: usize,
    pub sup_err: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WzReport {
    pub rows: Vec<WzRow>,
    /// Times shared by every partition; errors are measured there.
    pub eval_times: Vec<f64>,
}

impl WzReport {
    /// Errors for one initial condition, in mesh order.
    pub fn column(&self, y0_index: usize) -> Vec<f64> {
        self.rows
            .iter()
            .filter(|r| r.y0_index == y0_index)
            .map(|r| r.sup_err)
            .collect()
    }
}

/// For each mesh and initial point: the ODE flow along the geodesic
/// interpolation of `x`, compared with the rough flow on the full grid at the
/// times common to all partitions.
pub fn wong_zakai_table(
    x: &RoughPath,
    basis: &FieldBasis,
    y0s: &[DVector<f64>],
    meshes: &[f64],
    k: usize,
) -> Result<WzReport> {
    if meshes.is_empty() || meshes.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidParam("meshes must be nonempty and strictly decreasing".into()));
    }
    if y0s.is_empty() {
        return Err(Error::InvalidParam("no initial conditions".into()));
    }
    let raw = RawRoughPath::from(x);
    let reference = y0s
        .par_iter()
        .map(|y0| rough_flow(&raw, basis, y0))
        .collect::<Result<Vec<_>>>()?;

    let partitions = meshes
        .iter()
        .map(|&m| mesh_partition(x, m))
        .collect::<Result<Vec<_>>>()?;
    let eval_times: Vec<f64> = partitions[0]
        .iter()
        .copied()
        .filter(|t| partitions.iter().all(|p| p.contains(t)))
        .collect();
    let eval_idx: Vec<usize> = eval_times
        .iter()
        .map(|&t| x.index_of(t).expect("partition points lie on the grid"))
        .collect();

    let paths = partitions
        .par_iter()
        .map(|pi| geodesic_interpolation(x, pi, k))
        .collect::<Result<Vec<_>>>()?;
    let jobs: Vec<(usize, usize)> = (0..meshes.len())
        .flat_map(|i| (0..y0s.len()).map(move |j| (i, j)))
        .collect();
    let rows = jobs
        .par_iter()
        .map(|&(i, j)| {
            let flow = ode_flow(&paths[i], basis, &y0s[j])?;
            let mut sup_err: f64 = 0.0;
            for (&t, &gi) in eval_times.iter().zip(&eval_idx) {
                let v = flow.times.partition_point(|&s| s < t);
                let err = (&flow.states[v] - &reference[j].states[gi]).amax();
                sup_err = sup_err.max(err);
            }
            Ok(WzRow {
                mesh: meshes[i],
                y0_index: j,
                sup_err,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(WzReport { rows, eval_times })
}

/// `{-r, 0, r}^m`, the default lattice of initial conditions.
pub fn default_lattice(m: usize, r: f64) -> Vec<DVector<f64>> {
    (0..3usize.pow(m as u32))
        .map(|p| DVector::from_fn(m, |i, _| ((p / 3usize.pow(i as u32)) % 3) as f64 * r - r))
        .collect()
}
