//! Conventional compressed sensing for comparison.
//!
//! A dense Gaussian matrix with `M = ⌈multiplier·m_max⌉` rows senses the signal
//! directly. Recovery is a greedy pursuit over the real Fourier dictionary seen
//! through the sensing matrix: each frequency contributes its cosine and sine
//! columns as one group, so a selected frequency always enters with its
//! conjugate mirror and the estimate stays real. Each step adds the group that
//! most reduces the least-squares residual (order-recursive matching pursuit)
//! and refits all selected coefficients.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, Matrix2, Vector2};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::sigcore::Signal;

/// Measurements per unit of design sparsity at `N = 1000`.
pub const DEFAULT_MULTIPLIER: f64 = 7.0;

/// Pursuit stops once the residual drops below this fraction of `‖y‖`.
pub const RESIDUAL_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CsConfig {
    pub n: usize,
    pub m_max: usize,
    pub multiplier: f64,
    pub seed: u64,
}

impl CsConfig {
    pub fn new(n: usize, m_max: usize, multiplier: f64, seed: u64) -> Result<Self> {
        let config = Self {
            n,
            m_max,
            multiplier,
            seed,
        };
        config.validate()?;
        Ok(config)
    }

    /// `M = ⌈multiplier·m_max⌉`.
    pub fn measurements(&self) -> usize {
        (self.multiplier * self.m_max as f64).ceil() as usize
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 || self.n % 2 != 0 {
            return Err(Error::InvalidLength(self.n));
        }
        if !(self.multiplier > 0.0 && self.multiplier.is_finite()) {
            return Err(Error::BadDimensions(format!(
                "multiplier {} must be positive",
                self.multiplier
            )));
        }
        let m = self.measurements();
        if m == 0 || m > self.n {
            return Err(Error::BadDimensions(format!(
                "{m} measurements for a length-{} signal",
                self.n
            )));
        }
        Ok(())
    }
}

/// The `M×N` sensing matrix: i.i.d. standard normals scaled by `1/√M`, filled row by row.
pub fn sensing_matrix(config: &CsConfig) -> Result<DMatrix<f64>> {
    config.validate()?;
    let m = config.measurements();
    let scale = 1.0 / (m as f64).sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let values: Vec<f64> = (0..m * config.n)
        .map(|_| {
            let z: f64 = StandardNormal.sample(&mut rng);
            scale * z
        })
        .collect();
    Ok(DMatrix::from_row_slice(m, config.n, &values))
}

pub fn cs_encode(signal: &Signal, config: &CsConfig) -> Result<Vec<f64>> {
    if signal.len() != config.n {
        return Err(Error::BadDimensions(format!(
            "signal length {} does not match configured {}",
            signal.len(),
            config.n
        )));
    }
    let a = sensing_matrix(config)?;
    Ok((a * DVector::from_column_slice(signal.samples())).as_slice().to_vec())
}

/// One frequency bin and the range of its columns in [`Dictionary::columns`].
struct Group {
    bin: usize,
    start: usize,
    len: usize,
}

/// The real Fourier dictionary seen through the sensing matrix.
struct Dictionary {
    columns: DMatrix<f64>,
    groups: Vec<Group>,
    /// `‖c‖²` per column.
    norms: Vec<f64>,
    /// `c·s` per group, zero for single-column groups.
    cross: Vec<f64>,
}

// Column for bin k of cos(2πkn/N) is Re(F[k]) and of sin(2πkn/N) is -Im(F[k]),
// with F the DFT of each sensing-matrix row.
impl Dictionary {
    fn new(a: &DMatrix<f64>) -> Self {
        let (m, n) = a.shape();
        let fft = FftPlanner::new().plan_fft_forward(n);
        let rows: Vec<Vec<Complex64>> = (0..m)
            .map(|r| {
                let mut row: Vec<Complex64> = a.row(r).iter().map(|&v| Complex64::new(v, 0.0)).collect();
                fft.process(&mut row);
                row
            })
            .collect();
        let mut groups = Vec::with_capacity(n / 2 + 1);
        let mut values = Vec::with_capacity(m * (n + 2));
        for k in 0..=n / 2 {
            let start = groups.iter().map(|g: &Group| g.len).sum();
            values.extend(rows.iter().map(|row| row[k].re));
            let len = if k == 0 || 2 * k == n {
                1
            } else {
                values.extend(rows.iter().map(|row| -row[k].im));
                2
            };
            groups.push(Group { bin: k, start, len });
        }
        let columns = DMatrix::from_column_slice(m, values.len() / m, &values);
        let norms = columns.column_iter().map(|c| c.norm_squared()).collect();
        let cross = groups
            .iter()
            .map(|g| {
                if g.len == 2 {
                    columns.column(g.start).dot(&columns.column(g.start + 1))
                } else {
                    0.0
                }
            })
            .collect();
        Self {
            columns,
            groups,
            norms,
            cross,
        }
    }
}

// Candidates this close to the selected span carry no new direction.
const GRAM_FLOOR: f64 = 1e-10;

/// Residual norms after each accepted pursuit step, starting with `‖y‖`.
#[derive(Clone, Debug, PartialEq)]
pub struct PursuitTrace {
    pub residuals: Vec<f64>,
    /// Bins of the final support, in selection order.
    pub support: Vec<usize>,
}

/// A partial support with an orthonormal basis of its columns, the residual of
/// `y` against that basis, and for every dictionary column the Gram terms of
/// its projection onto the basis.
#[derive(Clone)]
struct Path {
    chosen: Vec<usize>,
    basis: Vec<DVector<f64>>,
    residual: DVector<f64>,
    residuals: Vec<f64>,
    /// `Σ (q·c)²` per column.
    span_sq: Vec<f64>,
    /// `Σ (q·c)(q·s)` per group.
    span_cross: Vec<f64>,
}

impl Path {
    fn root(y: &DVector<f64>, dict: &Dictionary) -> Self {
        Self {
            chosen: Vec::new(),
            basis: Vec::new(),
            residual: y.clone(),
            residuals: vec![y.norm()],
            span_sq: vec![0.0; dict.norms.len()],
            span_cross: vec![0.0; dict.groups.len()],
        }
    }

    fn extend(&self, dict: &Dictionary, next: usize) -> Self {
        let mut path = self.clone();
        let group = &dict.groups[next];
        for j in group.start..group.start + group.len {
            let mut q = dict.columns.column(j).into_owned();
            for b in &path.basis {
                let proj = b.dot(&q);
                q.axpy(-proj, b, 1.0);
            }
            let norm = q.norm();
            if norm <= GRAM_FLOOR.sqrt() * dict.norms[j].sqrt() {
                continue;
            }
            q /= norm;
            let proj = q.dot(&path.residual);
            path.residual.axpy(-proj, &q, 1.0);
            let qc = dict.columns.tr_mul(&q);
            for (acc, v) in path.span_sq.iter_mut().zip(qc.iter()) {
                *acc += v * v;
            }
            for (acc, g) in path.span_cross.iter_mut().zip(&dict.groups) {
                if g.len == 2 {
                    *acc += qc[g.start] * qc[g.start + 1];
                }
            }
            path.basis.push(q);
        }
        path.chosen.push(next);
        path.residuals.push(path.residual.norm());
        path
    }

    /// Squared norm of the residual's projection onto the part of group `i`
    /// orthogonal to the selected span.
    ///
    /// The residual is already orthogonal to the span, so `c·r` needs no
    /// correction and only the Gram matrix is reduced by the span terms.
    fn score(&self, dict: &Dictionary, i: usize, cr: &DVector<f64>) -> f64 {
        let g = &dict.groups[i];
        let gram = |j: usize| dict.norms[j] - self.span_sq[j];
        if g.len == 1 {
            let d = gram(g.start);
            if d <= GRAM_FLOOR * dict.norms[g.start] {
                return 0.0;
            }
            return cr[g.start].powi(2) / d;
        }
        let (c, s) = (g.start, g.start + 1);
        let m = Matrix2::new(
            gram(c),
            dict.cross[i] - self.span_cross[i],
            dict.cross[i] - self.span_cross[i],
            gram(s),
        );
        let scale = dict.norms[c] + dict.norms[s];
        if m.determinant() <= GRAM_FLOOR * scale * scale {
            return 0.0;
        }
        let b = Vector2::new(cr[c], cr[s]);
        m.try_inverse().map_or(0.0, |inv| b.dot(&(inv * b)))
    }

    /// Unselected groups ranked by how much of the residual they would remove.
    fn ranked(&self, dict: &Dictionary) -> Vec<usize> {
        let cr = dict.columns.tr_mul(&self.residual);
        let mut scored: Vec<(usize, f64)> = (0..dict.groups.len())
            .filter(|i| !self.chosen.contains(i))
            .map(|i| (i, self.score(dict, i, &cr)))
            .collect();
        scored.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        scored.into_iter().map(|(i, _)| i).collect()
    }
}

/// Candidates considered per level once the plain greedy path has failed.
const BRANCHING: usize = 3;

/// Upper bound on expanded partial supports.
const MAX_NODES: usize = 20_000;

/// Limited-discrepancy search: taking the candidate of rank `r` at any level
/// costs `r`, and a probe may spend at most its allowance.
struct Search<'a> {
    dict: &'a Dictionary,
    budget: usize,
    tolerance: f64,
    expanded: usize,
    best: Path,
}

impl Search<'_> {
    fn probe(&mut self, path: Path, allowance: usize) -> Option<Path> {
        let norm = *path.residuals.last().unwrap();
        if norm < *self.best.residuals.last().unwrap() {
            self.best = path.clone();
        }
        if norm <= self.tolerance {
            return Some(path);
        }
        if path.chosen.len() == self.budget || self.expanded >= MAX_NODES {
            return None;
        }
        self.expanded += 1;
        let ranked = path.ranked(self.dict);
        for (rank, &next) in ranked.iter().take(BRANCHING.min(allowance + 1)).enumerate() {
            let child = path.extend(self.dict, next);
            if let Some(found) = self.probe(child, allowance - rank) {
                return Some(found);
            }
        }
        None
    }
}

/// Recovers a real signal from `y` with at most `sparsity_budget` frequencies.
pub fn cs_decode(y: &[f64], config: &CsConfig, sparsity_budget: usize) -> Result<Signal> {
    cs_decode_traced(y, config, sparsity_budget).map(|(x, _)| x)
}

/// [`cs_decode`] that also reports the residual after every step of the
/// accepted path.
///
/// Steps follow the greedy rule. The plain greedy path is tried first; if it
/// uses up the budget without converging, paths that deviate from the greedy
/// choice at a few levels are tried in order of total deviation, until some
/// support of at most `sparsity_budget` frequencies explains `y` or the
/// exploration cap is hit.
pub fn cs_decode_traced(y: &[f64], config: &CsConfig, sparsity_budget: usize) -> Result<(Signal, PursuitTrace)> {
    let m = config.measurements();
    let n = config.n;
    if y.len() != m {
        return Err(Error::BadDimensions(format!(
            "expected {m} measurements, got {}",
            y.len()
        )));
    }
    if sparsity_budget > m / 2 {
        return Err(Error::BadDimensions(format!(
            "sparsity budget {sparsity_budget} exceeds half of {m} measurements"
        )));
    }
    let y = DVector::from_column_slice(y);
    let y_norm = y.norm();
    if y_norm == 0.0 {
        let trace = PursuitTrace {
            residuals: vec![0.0],
            support: Vec::new(),
        };
        return Ok((Signal::zeros(n)?, trace));
    }

    let dict = Dictionary::new(&sensing_matrix(config)?);
    let root = Path::root(&y, &dict);
    let mut search = Search {
        dict: &dict,
        budget: sparsity_budget,
        tolerance: RESIDUAL_TOL * y_norm,
        expanded: 0,
        best: root.clone(),
    };
    let max_allowance = sparsity_budget * (BRANCHING - 1);
    let mut found = None;
    for allowance in 0..=max_allowance {
        found = search.probe(root.clone(), allowance);
        if found.is_some() || search.expanded >= MAX_NODES {
            break;
        }
    }
    let Some(path) = found else {
        return Err(Error::NoConvergence {
            relative_residual: search.best.residual.norm() / y_norm,
            iterations: search.best.chosen.len(),
        });
    };

    let columns: Vec<usize> = path
        .chosen
        .iter()
        .flat_map(|&i| dict.groups[i].start..dict.groups[i].start + dict.groups[i].len)
        .collect();
    let coefficients = if columns.is_empty() {
        DVector::zeros(0)
    } else {
        dict.columns
            .select_columns(&columns)
            .svd(true, true)
            .solve(&y, 1e-12)
            .map_err(|e| Error::BadDimensions(e.to_string()))?
    };

    let mut samples = vec![0.0; n];
    let mut next = 0;
    for &i in &path.chosen {
        let group = &dict.groups[i];
        let weights = coefficients.rows(next, group.len);
        next += group.len;
        for (t, sample) in samples.iter_mut().enumerate() {
            let phase = 2.0 * PI * ((group.bin * t) % n) as f64 / n as f64;
            *sample += weights[0] * phase.cos();
            if group.len == 2 {
                *sample += weights[1] * phase.sin();
            }
        }
    }
    let trace = PursuitTrace {
        residuals: path.residuals,
        support: path.chosen.iter().map(|&i| dict.groups[i].bin).collect(),
    };
    Ok((Signal::new(samples)?, trace))
}
