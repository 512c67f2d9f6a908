use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaussian::GaussianState;
use crate::linalg::RVec;

/// Uniform tensor grid on `[−X, X)^n` with `N` points per axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    n: usize,
    half_extent: f64,
    points: usize,
}

impl GridSpec {
    pub fn new(n: usize, half_extent: f64, points: usize) -> Result<Self> {
        if !(1..=2).contains(&n) {
            return Err(Error::Unsupported(format!("grids exist for n=1 and n=2 only, got n={n}")));
        }
        if !(half_extent > 0.0 && half_extent.is_finite()) {
            return Err(Error::InvalidParameter(format!("half extent X={half_extent} must be positive")));
        }
        if points < 8 || !points.is_power_of_two() {
            return Err(Error::InvalidParameter(format!("N={points} must be a power of two ≥ 8")));
        }
        Ok(Self { n, half_extent, points })
    }

    /// `X = 12, N = 256` for `n = 1`; `X = 8, N = 128` for `n = 2`.
    pub fn default_for(n: usize) -> Result<Self> {
        match n {
            1 => Self::new(1, 12.0, 256),
            2 => Self::new(2, 8.0, 128),
            _ => Err(Error::Unsupported(format!("no grid for n={n}"))),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn half_extent(&self) -> f64 {
        self.half_extent
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_extent / self.points as f64
    }

    pub fn node(&self, k: usize) -> f64 {
        -self.half_extent + k as f64 * self.spacing()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.points).map(|k| self.node(k)).collect()
    }

    /// Total number of samples `N^n`.
    pub fn len(&self) -> usize {
        self.points.pow(self.n as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Per-axis indices of a flat row-major index.
    pub fn multi_index(&self, flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.n];
        let mut r = flat;
        for a in (0..self.n).rev() {
            idx[a] = r % self.points;
            r /= self.points;
        }
        idx
    }

    pub fn coords(&self, flat: usize) -> RVec {
        let idx = self.multi_index(flat);
        RVec::from_fn(self.n, |a, _| self.node(idx[a]))
    }

    /// Volume element `Δ^n`.
    pub fn cell(&self) -> f64 {
        self.spacing().powi(self.n as i32)
    }
}

/// Warnings attached to a grid result.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridFlags {
    /// A shift or the support of the result reached past `0.8·X`.
    pub domain_overflow: bool,
    /// The input did not decay below the boundary threshold.
    pub truncation: bool,
}

/// Samples of a function on a [`GridSpec`], row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    spec: GridSpec,
    samples: Vec<Complex64>,
    pub flags: GridFlags,
}

/// Boundary samples above this (relative to the peak, floored at 1) count as
/// truncation.
pub const BOUNDARY_DECAY: f64 = 1e-12;

impl GridFunction {
    pub fn new(spec: GridSpec, samples: Vec<Complex64>) -> Result<Self> {
        if samples.len() != spec.len() {
            return Err(Error::Dimension(format!("expected {} samples, got {}", spec.len(), samples.len())));
        }
        if samples.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::InvalidParameter("grid samples must be finite".into()));
        }
        Ok(Self { spec, samples, flags: GridFlags::default() })
    }

    pub(crate) fn from_parts(spec: GridSpec, samples: Vec<Complex64>, flags: GridFlags) -> Self {
        debug_assert_eq!(samples.len(), spec.len());
        Self { spec, samples, flags }
    }

    pub fn zeros(spec: GridSpec) -> Self {
        Self::from_parts(spec, vec![Complex64::new(0.0, 0.0); spec.len()], GridFlags::default())
    }

    pub fn from_fn<F: FnMut(&RVec) -> Complex64>(spec: GridSpec, mut f: F) -> Self {
        let samples = (0..spec.len()).map(|k| f(&spec.coords(k))).collect();
        Self::from_parts(spec, samples, GridFlags::default())
    }

    pub fn from_gaussian(spec: GridSpec, g: &GaussianState) -> Result<Self> {
        if g.n() != spec.n() {
            return Err(Error::Dimension(format!("grid n={}, state n={}", spec.n(), g.n())));
        }
        let q = g.to_quadexp();
        Ok(Self::from_fn(spec, |x| q.eval(x)))
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<Complex64> {
        self.samples
    }

    pub fn max_abs(&self) -> f64 {
        self.samples.iter().fold(0.0, |m, v| m.max(v.norm()))
    }

    /// `Δ^{n/2}‖samples‖₂`.
    pub fn l2_norm(&self) -> f64 {
        (self.spec.cell() * self.samples.iter().map(|v| v.norm_sqr()).sum::<f64>()).sqrt()
    }

    /// Discrete `Δ^n Σ conj(self)·other`.
    pub fn inner(&self, other: &GridFunction) -> Result<Complex64> {
        self.check_same(other)?;
        let s: Complex64 = self.samples.iter().zip(&other.samples).map(|(a, b)| a.conj() * b).sum();
        Ok(s * self.spec.cell())
    }

    pub fn max_abs_diff(&self, other: &GridFunction) -> Result<f64> {
        self.check_same(other)?;
        Ok(self.samples.iter().zip(&other.samples).fold(0.0, |m, (a, b)| m.max((a - b).norm())))
    }

    pub fn scaled(&self, c: Complex64) -> GridFunction {
        Self::from_parts(self.spec, self.samples.iter().map(|v| v * c).collect(), self.flags)
    }

    fn check_same(&self, other: &GridFunction) -> Result<()> {
        if self.spec != other.spec {
            return Err(Error::Dimension("grid functions live on different grids".into()));
        }
        Ok(())
    }

    /// Largest modulus over the nodes on the first or last slice of any axis.
    pub fn boundary_max(&self) -> f64 {
        let last = self.spec.points - 1;
        (0..self.spec.len())
            .filter(|&k| self.spec.multi_index(k).iter().any(|&i| i == 0 || i == last))
            .fold(0.0, |m, k| m.max(self.samples[k].norm()))
    }

    pub fn is_truncated(&self) -> bool {
        self.boundary_max() > BOUNDARY_DECAY * self.max_abs().max(1.0)
    }

    /// Whether samples beyond `0.8·X` on some axis exceed `tol` relative to
    /// the peak.
    pub fn reaches_outer_band(&self, tol: f64) -> bool {
        let band = 0.8 * self.spec.half_extent;
        let peak = self.max_abs();
        (0..self.spec.len()).any(|k| {
            self.spec.coords(k).iter().any(|x| x.abs() > band) && self.samples[k].norm() > tol * peak.max(1e-300)
        })
    }

    pub fn to_json(&self) -> GridFunctionJson {
        GridFunctionJson {
            spec: GridSpecJson { n: self.spec.n, x: self.spec.half_extent, points: self.spec.points },
            re: self.samples.iter().map(|v| v.re).collect(),
            im: self.samples.iter().map(|v| v.im).collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridSpecJson {
    pub n: usize,
    #[serde(rename = "X")]
    pub x: f64,
    #[serde(rename = "N")]
    pub points: usize,
}

/// `{"spec": {"n", "X", "N"}, "re": [..], "im": [..]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridFunctionJson {
    pub spec: GridSpecJson,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl TryFrom<GridFunctionJson> for GridFunction {
    type Error = Error;

    fn try_from(j: GridFunctionJson) -> Result<Self> {
        let spec = GridSpec::new(j.spec.n, j.spec.x, j.spec.points).map_err(|e| Error::Malformed(e.to_string()))?;
        if j.re.len() != j.im.len() {
            return Err(Error::Malformed("re and im have different lengths".into()));
        }
        let samples = j.re.iter().zip(&j.im).map(|(&r, &i)| Complex64::new(r, i)).collect();
        GridFunction::new(spec, samples).map_err(|e| Error::Malformed(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_validation_and_nodes() {
        assert!(GridSpec::new(3, 1.0, 16).is_err());
        assert!(GridSpec::new(1, 1.0, 12).is_err());
        assert!(GridSpec::new(1, 1.0, 4).is_err());
        assert!(GridSpec::new(1, 0.0, 16).is_err());
        let s = GridSpec::new(1, 2.0, 8).unwrap();
        assert_eq!(s.spacing(), 0.5);
        assert_eq!(s.nodes(), vec![-2.0, -1.5, -1.0, -0.5, 0.0, 0.5, 1.0, 1.5]);
        let s2 = GridSpec::new(2, 2.0, 8).unwrap();
        assert_eq!(s2.multi_index(8 * 3 + 5), vec![3, 5]);
        assert_eq!(s2.coords(8 * 3 + 5).as_slice(), &[-0.5, 0.5]);
    }

    #[test]
    fn gaussian_norm_and_json_round_trip() {
        let spec = GridSpec::default_for(1).unwrap();
        let g = GridFunction::from_gaussian(spec, &GaussianState::standard(1)).unwrap();
        assert!((g.l2_norm() - 1.0).abs() < 1e-12);
        assert!(!g.is_truncated());
        let text = serde_json::to_string(&g.to_json()).unwrap();
        assert!(text.contains("\"X\":12.0") && text.contains("\"N\":256"));
        let back: GridFunction = serde_json::from_str::<GridFunctionJson>(&text).unwrap().try_into().unwrap();
        assert_eq!(back.samples(), g.samples());
    }

    #[test]
    fn truncation_detected() {
        let spec = GridSpec::new(1, 2.0, 16).unwrap();
        let g = GridFunction::from_gaussian(spec, &GaussianState::standard(1)).unwrap();
        assert!(g.is_truncated());
        assert!(g.reaches_outer_band(1e-10));
    }
}
