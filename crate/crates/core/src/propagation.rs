//! Line-of-sight geometry against the building grid, the block term,
//! the radio depth map, and log-distance path loss regression.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::grid::{Cell, RegionMask, ScalarGrid, Units};
use crate::scene::{LdplParams, Point, Scene};

/// Cells crossed by a straight segment, with the exact length of the segment
/// inside each cell (in cell units). Lengths sum to the segment length.
#[derive(Debug, Clone)]
pub struct RayTraversal {
    pub steps: Vec<(Cell, f64)>,
    pub total_length: f64,
}

/// Walk the segment from `from` to the center of `to`, producing per-cell
/// intersection lengths in visit order.
///
/// Cell boundaries are the integer grid lines; the cell index of each span is
/// taken at the span midpoint, which stays well-defined when the segment runs
/// along a grid line.
pub fn traverse(scene: &Scene, from: Point, to: Cell) -> RayTraversal {
    let (tx, ty) = to.center();
    let p0 = from;
    let p1 = Point::new(tx, ty);
    let dx = p1.x - p0.x;
    let dy = p1.y - p0.y;
    let length = p0.distance(p1);

    let clamp_cell = |x: f64, y: f64| -> Cell {
        let c = (x.floor() as isize).clamp(0, scene.cols() as isize - 1) as usize;
        let r = (y.floor() as isize).clamp(0, scene.rows() as isize - 1) as usize;
        Cell::new(r, c)
    };

    if length == 0.0 {
        return RayTraversal {
            steps: vec![(clamp_cell(p0.x, p0.y), 0.0)],
            total_length: 0.0,
        };
    }

    // Parameter values where the segment crosses vertical/horizontal grid lines.
    let mut ts = vec![0.0, 1.0];
    if dx != 0.0 {
        let (lo, hi) = if p0.x < p1.x { (p0.x, p1.x) } else { (p1.x, p0.x) };
        let mut gx = lo.floor() + 1.0;
        while gx < hi {
            ts.push((gx - p0.x) / dx);
            gx += 1.0;
        }
    }
    if dy != 0.0 {
        let (lo, hi) = if p0.y < p1.y { (p0.y, p1.y) } else { (p1.y, p0.y) };
        let mut gy = lo.floor() + 1.0;
        while gy < hi {
            ts.push((gy - p0.y) / dy);
            gy += 1.0;
        }
    }
    ts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ts.dedup();

    let mut steps: Vec<(Cell, f64)> = Vec::with_capacity(ts.len());
    for pair in ts.windows(2) {
        let (t0, t1) = (pair[0], pair[1]);
        let tm = 0.5 * (t0 + t1);
        let cell = clamp_cell(p0.x + tm * dx, p0.y + tm * dy);
        let seg = (t1 - t0) * length;
        match steps.last_mut() {
            Some((last, acc)) if *last == cell => *acc += seg,
            _ => steps.push((cell, seg)),
        }
    }
    RayTraversal {
        steps,
        total_length: length,
    }
}

/// Fraction of the transmitter-to-cell segment that runs outside buildings.
/// A zero-length segment counts as unblocked.
pub fn block_term(scene: &Scene, tx_index: usize, p: Cell) -> f64 {
    let ray = traverse(scene, scene.tx(tx_index).position, p);
    if ray.total_length == 0.0 {
        return 1.0;
    }
    let clear: f64 = ray
        .steps
        .iter()
        .filter(|(cell, _)| !scene.is_building(*cell))
        .map(|(_, len)| len)
        .sum();
    clear / ray.total_length
}

/// Strength of radio hitting the boundary at `p`:
/// `|d(tx, p)|^-beta * |l . n|` with unit propagation direction `l` and unit
/// boundary normal `n`; `d` in meters, clamped below at half a cell.
/// Zero when `p` coincides with the transmitter (direction undefined).
pub fn radio_factor(scene: &Scene, tx_index: usize, p: Cell, normal: (f64, f64), beta: f64) -> f64 {
    let n_norm = (normal.0 * normal.0 + normal.1 * normal.1).sqrt();
    debug_assert!(n_norm > 0.0, "boundary normal must be nonzero");
    let (px, py) = p.center();
    let tx = scene.tx(tx_index).position;
    let lx = px - tx.x;
    let ly = py - tx.y;
    let l_norm = (lx * lx + ly * ly).sqrt();
    if l_norm < 1e-12 {
        return 0.0;
    }
    let d = scene.tx_distance_m(tx_index, p);
    let cos = ((lx * normal.0 + ly * normal.1) / (l_norm * n_norm)).abs();
    d.powf(-beta) * cos
}

/// Distance-decay model for the depth map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DepthModel {
    /// `E_i = w_i * d^-sigma` with `w_i` the linear power ratio to the
    /// strongest transmitter.
    Idw { sigma: f64 },
    /// `E_i = theta_i - epsilon_i * log10(d)`, coefficients fitted per
    /// transmitter from the observed cells unless the scene provides them.
    Ldpl,
}

impl Default for DepthModel {
    fn default() -> Self {
        DepthModel::Idw { sigma: 0.01 }
    }
}

/// Radio depth map: per-cell blend of distance decay and line-of-sight
/// blockage, min-max normalized to `[0, 1]`.
#[derive(Debug, Clone)]
pub struct DepthMap {
    pub grid: ScalarGrid,
    /// True when the pre-normalization field was constant; the map is all zero.
    pub degenerate_span: bool,
}

impl DepthMap {
    pub fn get(&self, cell: Cell) -> f64 {
        self.grid.get(cell)
    }
}

/// Build the radio depth map for a scene. `observations` supplies the
/// radiomap and mask for LDPL fitting; the IDW model ignores it.
pub fn depth_map(
    scene: &Scene,
    model: DepthModel,
    observations: Option<(&ScalarGrid, &RegionMask)>,
) -> Result<DepthMap> {
    scene.require_transmitters()?;
    let rows = scene.rows();
    let cols = scene.cols();
    let nt = scene.tx_count();

    let decays: Vec<TxDecay> = match model {
        DepthModel::Idw { sigma } => {
            let p_ref = scene
                .transmitters
                .iter()
                .map(|t| t.power_dbm)
                .fold(f64::NEG_INFINITY, f64::max);
            (0..nt)
                .map(|i| TxDecay::Idw {
                    sigma,
                    weight: 10f64.powf((scene.tx(i).power_dbm - p_ref) / 10.0),
                })
                .collect()
        }
        DepthModel::Ldpl => {
            let mut v = Vec::with_capacity(nt);
            for i in 0..nt {
                let params = match scene.tx(i).ldpl {
                    Some(p) => p,
                    None => {
                        let (map, mask) = observations.ok_or_else(|| {
                            Error::InvalidScenario(
                                "LDPL depth map needs observations or per-transmitter coefficients"
                                    .into(),
                            )
                        })?;
                        if mask.observed_count() < 10 {
                            return Err(Error::InsufficientSamples {
                                needed: 10,
                                available: mask.observed_count(),
                            });
                        }
                        let fit = ldpl_fit(map, mask, scene, i)?;
                        LdplParams {
                            theta: fit.theta,
                            epsilon: fit.epsilon,
                        }
                    }
                };
                v.push(TxDecay::Ldpl(params));
            }
            v
        }
    };

    let mut raw = vec![0.0f64; rows * cols];
    for r in 0..rows {
        for c in 0..cols {
            let cell = Cell::new(r, c);
            let mut acc = 0.0;
            for (i, decay) in decays.iter().enumerate() {
                let d = scene.tx_distance_m(i, cell);
                acc += decay.eval(d) * block_term(scene, i, cell);
            }
            raw[r * cols + c] = acc;
        }
    }

    let lo = raw.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = raw.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let span = hi - lo;
    let degenerate = span <= 0.0;
    let data = if degenerate {
        vec![0.0; rows * cols]
    } else {
        raw.iter().map(|v| (v - lo) / span).collect()
    };
    Ok(DepthMap {
        grid: ScalarGrid::from_data(rows, cols, data, Units::Normalized)?,
        degenerate_span: degenerate,
    })
}

enum TxDecay {
    Idw { sigma: f64, weight: f64 },
    Ldpl(LdplParams),
}

impl TxDecay {
    fn eval(&self, d_m: f64) -> f64 {
        match self {
            TxDecay::Idw { sigma, weight } => weight * d_m.powf(-sigma),
            TxDecay::Ldpl(p) => p.theta - p.epsilon * d_m.log10(),
        }
    }
}

/// Result of a single-transmitter log-distance fit.
#[derive(Debug, Clone, Copy)]
pub struct LdplFit {
    pub theta: f64,
    pub epsilon: f64,
    pub rmse: f64,
}

/// Least-squares fit of `r = theta - epsilon * log10(d)` over the observed cells.
pub fn ldpl_fit(
    map: &ScalarGrid,
    mask: &RegionMask,
    scene: &Scene,
    tx_index: usize,
) -> Result<LdplFit> {
    let joint = ldpl_fit_multi(map, mask, scene, &[tx_index])?;
    Ok(LdplFit {
        theta: joint.intercept,
        epsilon: -joint.slopes[0],
        rmse: joint.rmse,
    })
}

/// Joint multi-transmitter log-distance regression:
/// `r = intercept + sum_i slopes[i] * log10(d_i)` over observed cells.
#[derive(Debug, Clone)]
pub struct JointLdplFit {
    pub intercept: f64,
    pub slopes: Vec<f64>,
    pub rmse: f64,
    tx_indices: Vec<usize>,
}

impl JointLdplFit {
    pub fn predict(&self, scene: &Scene, cell: Cell) -> f64 {
        let mut v = self.intercept;
        for (slot, &tx) in self.tx_indices.iter().enumerate() {
            v += self.slopes[slot] * scene.tx_distance_m(tx, cell).log10();
        }
        v
    }
}

/// Fit the joint log-distance model over the given transmitters.
pub fn ldpl_fit_multi(
    map: &ScalarGrid,
    mask: &RegionMask,
    scene: &Scene,
    tx_indices: &[usize],
) -> Result<JointLdplFit> {
    map.same_dims(mask.rows(), mask.cols())?;
    if tx_indices.is_empty() {
        return Err(Error::InvalidScenario("no transmitters to fit".into()));
    }
    let obs: Vec<Cell> = mask.observed_cells().collect();
    let k = tx_indices.len() + 1;
    if obs.len() < k {
        return Err(Error::InsufficientSamples {
            needed: k,
            available: obs.len(),
        });
    }

    let mut design = DMatrix::zeros(obs.len(), k);
    let mut target = DVector::zeros(obs.len());
    for (row, &cell) in obs.iter().enumerate() {
        design[(row, 0)] = 1.0;
        for (slot, &tx) in tx_indices.iter().enumerate() {
            design[(row, slot + 1)] = scene.tx_distance_m(tx, cell).log10();
        }
        target[row] = map.get(cell);
    }

    let gram = design.transpose() * &design;
    let rhs = design.transpose() * &target;
    let coeffs = gram
        .clone()
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::SingularSystem("log-distance normal equations".into()))?;
    // LU on nearly singular systems can still "solve"; reject unstable fits.
    let det_scale = gram.diagonal().amax();
    if !coeffs.iter().all(|v| v.is_finite())
        || gram.determinant().abs() < 1e-12 * det_scale.powi(k as i32)
    {
        return Err(Error::SingularSystem(
            "log-distance features have insufficient spatial spread".into(),
        ));
    }

    let residual = &design * &coeffs - &target;
    let rmse = (residual.norm_squared() / obs.len() as f64).sqrt();
    Ok(JointLdplFit {
        intercept: coeffs[0],
        slopes: coeffs.iter().skip(1).cloned().collect(),
        rmse,
        tx_indices: tx_indices.to_vec(),
    })
}
