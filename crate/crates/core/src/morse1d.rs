//! One-dimensional Morse filtrations.
//!
//! A noisy signal is smoothed with a truncated cosine series whose
//! coefficients are attenuated by the heat kernel, its local extrema are
//! extracted with three-point stencils, and the extrema are paired by the
//! Elder rule to produce the 0-dimensional persistence diagram of the
//! sublevel-set filtration.

use std::f64::consts::{PI, SQRT_2};

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::unionfind::UnionFind;

/// Samples `(t_i, y_i)` of a function on an interval.
#[derive(Debug, Clone, PartialEq)]
pub struct Signal1D {
    t: Vec<f64>,
    y: Vec<f64>,
}

impl Signal1D {
    pub fn new(t: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        if t.len() != y.len() {
            return Err(Error::InvalidInput(format!(
                "{} positions but {} values",
                t.len(),
                y.len()
            )));
        }
        if t.is_empty() {
            return Err(Error::InvalidInput("empty signal".into()));
        }
        if let Some(i) = t.iter().chain(&y).position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "non-finite sample at index {}",
                i % t.len()
            )));
        }
        if let Some(i) = t.windows(2).position(|w| w[0] >= w[1]) {
            return Err(Error::InvalidInput(format!(
                "positions must be strictly increasing (index {} to {})",
                i,
                i + 1
            )));
        }
        Ok(Self { t, y })
    }

    /// `n` equally spaced samples of `f` on `[0, 1]`.
    pub fn uniform(n: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidInput("need at least 2 samples".into()));
        }
        let t: Vec<f64> = (0..n).map(|i| i as f64 / (n - 1) as f64).collect();
        let y = t.iter().map(|&x| f(x)).collect();
        Self::new(t, y)
    }

    pub fn positions(&self) -> &[f64] {
        &self.t
    }

    pub fn values(&self) -> &[f64] {
        &self.y
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    /// `y - fitted`, the noise estimate left by a smoother.
    pub fn residual(&self, fitted: &Signal1D) -> Result<Vec<f64>> {
        if fitted.t != self.t {
            return Err(Error::InvalidInput(
                "signals are sampled at different positions".into(),
            ));
        }
        Ok(self.y.iter().zip(&fitted.y).map(|(a, b)| a - b).collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothingParams {
    pub degree: usize,
    pub bandwidth: f64,
}

impl SmoothingParams {
    pub fn new(degree: usize, bandwidth: f64) -> Result<Self> {
        if !(bandwidth >= 0.0 && bandwidth.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "bandwidth must be finite and nonnegative, got {bandwidth}"
            )));
        }
        Ok(Self { degree, bandwidth })
    }
}

impl Default for SmoothingParams {
    fn default() -> Self {
        Self {
            degree: 100,
            bandwidth: 1e-4,
        }
    }
}

fn cosine_basis(l: usize, t: f64) -> f64 {
    if l == 0 {
        1.0
    } else {
        SQRT_2 * (l as f64 * PI * t).cos()
    }
}

/// Heat-kernel smoothing in the cosine eigenbasis of `[0, 1]`.
///
/// The coefficients `c_l` of `ψ_0 = 1, ψ_l = √2 cos(lπt)` are fitted to `y`
/// by least squares and the fit is evaluated with weights `exp(-l²π²σ)`.
pub fn smooth_cosine(signal: &Signal1D, params: &SmoothingParams) -> Result<Signal1D> {
    let n = signal.len();
    if n < 2 {
        return Err(Error::InvalidInput(
            "smoothing needs at least 2 samples".into(),
        ));
    }
    if signal.t.iter().any(|&t| !(0.0..=1.0).contains(&t)) {
        return Err(Error::InvalidInput("positions must lie in [0, 1]".into()));
    }
    SmoothingParams::new(params.degree, params.bandwidth)?;
    let cols = params.degree + 1;
    let design = DMatrix::from_fn(n, cols, |i, l| cosine_basis(l, signal.t[i]));
    let svd = design.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let tol = n.max(cols) as f64 * f64::EPSILON * smax;
    if svd.rank(tol) < cols {
        return Err(Error::InvalidInput(format!(
            "degenerate design matrix: {n} samples cannot determine {cols} cosine coefficients"
        )));
    }
    let coef = svd
        .solve(&DVector::from_column_slice(&signal.y), tol)
        .map_err(|e| Error::Internal(e.to_string()))?;
    let weighted = DVector::from_fn(cols, |l, _| {
        let lf = l as f64;
        (-lf * lf * PI * PI * params.bandwidth).exp() * coef[l]
    });
    let fitted = design * weighted;
    Signal1D::new(signal.t.clone(), fitted.iter().copied().collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CriticalKind {
    Minimum,
    Maximum,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalPoint {
    /// Sample index in the source signal.
    pub index: usize,
    pub position: f64,
    pub value: f64,
    pub kind: CriticalKind,
}

/// Critical points in spatial order. Minima and maxima alternate.
#[derive(Debug, Clone, PartialEq)]
pub struct CriticalSequence {
    points: Vec<CriticalPoint>,
}

impl CriticalSequence {
    /// Wraps critical points listed in spatial order. Values must be pairwise
    /// distinct.
    pub fn from_spatial(points: Vec<CriticalPoint>) -> Result<Self> {
        let mut values: Vec<f64> = points.iter().map(|p| p.value).collect();
        values.sort_by(f64::total_cmp);
        if let Some(w) = values.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::Degenerate(format!(
                "critical value {} occurs more than once; the Morse condition requires distinct values",
                w[0]
            )));
        }
        Ok(Self { points })
    }

    pub fn spatial(&self) -> &[CriticalPoint] {
        &self.points
    }

    pub fn minima(&self) -> Vec<CriticalPoint> {
        self.of_kind(CriticalKind::Minimum)
    }

    pub fn maxima(&self) -> Vec<CriticalPoint> {
        self.of_kind(CriticalKind::Maximum)
    }

    fn of_kind(&self, kind: CriticalKind) -> Vec<CriticalPoint> {
        self.points
            .iter()
            .filter(|p| p.kind == kind)
            .copied()
            .collect()
    }

    /// All critical points sorted by value, smallest first.
    pub fn merged(&self) -> Vec<CriticalPoint> {
        let mut m = self.points.clone();
        m.sort_by(|a, b| a.value.total_cmp(&b.value));
        m
    }
}

/// Local extrema by three-point stencils; both boundary samples are treated
/// as critical values.
pub fn critical_points(signal: &Signal1D) -> Result<CriticalSequence> {
    let (t, y) = (&signal.t, &signal.y);
    let n = y.len();
    if n < 2 {
        return Err(Error::InvalidInput("need at least 2 samples".into()));
    }
    if let Some(i) = y.windows(2).position(|w| w[0] == w[1]) {
        return Err(Error::Degenerate(format!(
            "plateau at samples {i} and {}: tied values violate the Morse condition; add small noise first",
            i + 1
        )));
    }
    let point = |i: usize, kind| CriticalPoint {
        index: i,
        position: t[i],
        value: y[i],
        kind,
    };
    let mut pts = Vec::new();
    pts.push(point(
        0,
        if y[0] < y[1] {
            CriticalKind::Minimum
        } else {
            CriticalKind::Maximum
        },
    ));
    for i in 1..n - 1 {
        if y[i - 1] > y[i] && y[i] < y[i + 1] {
            pts.push(point(i, CriticalKind::Minimum));
        } else if y[i - 1] < y[i] && y[i] > y[i + 1] {
            pts.push(point(i, CriticalKind::Maximum));
        }
    }
    pts.push(point(
        n - 1,
        if y[n - 1] < y[n - 2] {
            CriticalKind::Minimum
        } else {
            CriticalKind::Maximum
        },
    ));
    CriticalSequence::from_spatial(pts)
}

/// One finite point of the 0-dimensional diagram.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MorsePair {
    pub birth: f64,
    pub death: f64,
    pub birth_position: f64,
    pub death_position: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PersistencePairs1D {
    /// Finite pairs in order of death.
    pub pairs: Vec<MorsePair>,
    /// Birth of the component that never dies (the global minimum).
    pub essential: Option<f64>,
}

impl PersistencePairs1D {
    /// Number of sublevel-set components at `level`, replayed from the pairs.
    pub fn betti0_at(&self, level: f64) -> usize {
        let finite = self
            .pairs
            .iter()
            .filter(|p| p.birth <= level && level < p.death)
            .count();
        finite + usize::from(self.essential.is_some_and(|b| b <= level))
    }
}

/// Elder-rule pairing of a critical sequence.
///
/// Sweeping the critical values upward, each minimum starts a component and
/// each interior maximum merges its two neighbouring components; the younger
/// one (higher minimum) dies at the maximum.
pub fn morse_pairs(crit: &CriticalSequence) -> Result<PersistencePairs1D> {
    let pts = &crit.points;
    let n = pts.len();
    if n == 0 {
        return Ok(PersistencePairs1D::default());
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| pts[a].value.total_cmp(&pts[b].value));

    let mut uf = UnionFind::new(n);
    // Oldest (lowest) minimum of the component rooted at each index.
    let mut oldest: Vec<usize> = (0..n).collect();
    let mut born = vec![false; n];
    let mut out = PersistencePairs1D::default();

    for &i in &order {
        match pts[i].kind {
            CriticalKind::Minimum => {
                born[i] = true;
                if out.essential.is_none() {
                    out.essential = Some(pts[i].value);
                }
            }
            CriticalKind::Maximum => {
                let neighbours: Vec<usize> = [i.checked_sub(1), Some(i + 1)]
                    .into_iter()
                    .flatten()
                    .filter(|&j| j < n)
                    .collect();
                for &j in &neighbours {
                    if pts[j].kind != CriticalKind::Minimum || !born[j] {
                        return Err(Error::Internal(format!(
                            "maximum at index {} is not flanked by lower minima",
                            pts[i].index
                        )));
                    }
                }
                if let [a, b] = neighbours[..] {
                    let (ra, rb) = (uf.find(a), uf.find(b));
                    if ra == rb {
                        return Err(Error::Internal(format!(
                            "maximum at index {} merges a component with itself",
                            pts[i].index
                        )));
                    }
                    let (old, young) = if pts[oldest[ra]].value < pts[oldest[rb]].value {
                        (oldest[ra], oldest[rb])
                    } else {
                        (oldest[rb], oldest[ra])
                    };
                    out.pairs.push(MorsePair {
                        birth: pts[young].value,
                        death: pts[i].value,
                        birth_position: pts[young].position,
                        death_position: pts[i].position,
                    });
                    uf.union(ra, rb);
                    let root = uf.find(ra);
                    oldest[root] = old;
                } else if neighbours.is_empty() {
                    return Err(Error::Internal("isolated maximum".into()));
                }
            }
        }
    }
    Ok(out)
}

/// Smoothing, extremum detection and pairing in one call.
pub fn morse_diagram(
    signal: &Signal1D,
    params: Option<&SmoothingParams>,
) -> Result<PersistencePairs1D> {
    let smoothed;
    let source = match params {
        Some(p) => {
            smoothed = smooth_cosine(signal, p)?;
            &smoothed
        }
        None => signal,
    };
    morse_pairs(&critical_points(source)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn sig(y: &[f64]) -> Signal1D {
        let n = y.len();
        Signal1D::new(
            (0..n).map(|i| i as f64 / (n - 1) as f64).collect(),
            y.to_vec(),
        )
        .unwrap()
    }

    #[test]
    fn rejects_bad_signals() {
        assert!(Signal1D::new(vec![0.0, 0.0], vec![1.0, 2.0]).is_err());
        assert!(Signal1D::new(vec![0.0, 1.0], vec![1.0]).is_err());
        assert!(Signal1D::new(vec![], vec![]).is_err());
        assert!(SmoothingParams::new(3, -1.0).is_err());
    }

    #[test]
    fn constant_is_preserved() {
        let s = Signal1D::uniform(50, |_| 5.0).unwrap();
        for p in [
            SmoothingParams::new(0, 0.3).unwrap(),
            SmoothingParams::new(10, 0.01).unwrap(),
        ] {
            let f = smooth_cosine(&s, &p).unwrap();
            for v in f.values() {
                assert_abs_diff_eq!(*v, 5.0, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn exact_basis_function_zero_bandwidth() {
        let s = Signal1D::uniform(501, |t| (PI * t).cos()).unwrap();
        let f = smooth_cosine(&s, &SmoothingParams::new(1, 0.0).unwrap()).unwrap();
        for (a, b) in f.values().iter().zip(s.values()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-8);
        }
    }

    #[test]
    fn heat_kernel_attenuates_single_mode() {
        let s = Signal1D::uniform(501, |t| (PI * t).cos()).unwrap();
        let f = smooth_cosine(&s, &SmoothingParams::new(1, 0.1).unwrap()).unwrap();
        let damp = (-PI * PI * 0.1f64).exp();
        for (i, v) in f.values().iter().enumerate() {
            let expected = damp * (PI * s.positions()[i]).cos();
            assert_abs_diff_eq!(*v, expected, epsilon = 1e-8);
        }
    }

    #[test]
    fn underdetermined_fit_is_rejected() {
        let s = sig(&[1.0, 2.0, 0.5]);
        let err = smooth_cosine(&s, &SmoothingParams::new(10, 0.0).unwrap()).unwrap_err();
        assert!(matches!(err, Error::InvalidInput(_)));
        let one = Signal1D::new(vec![0.5], vec![1.0]).unwrap();
        assert!(smooth_cosine(&one, &SmoothingParams::default()).is_err());
    }

    #[test]
    fn single_interior_minimum() {
        let c = critical_points(&sig(&[3.0, 1.0, 2.0])).unwrap();
        let min: Vec<_> = c.minima().iter().map(|p| (p.index, p.value)).collect();
        let max: Vec<_> = c.maxima().iter().map(|p| (p.index, p.value)).collect();
        assert_eq!(min, vec![(1, 1.0)]);
        assert_eq!(max, vec![(0, 3.0), (2, 2.0)]);
        let merged: Vec<f64> = c.merged().iter().map(|p| p.value).collect();
        assert_eq!(merged, vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn boundary_only_criticals() {
        let c = critical_points(&sig(&[1.0, 2.0])).unwrap();
        assert_eq!(c.minima().len(), 1);
        assert_eq!(c.minima()[0].value, 1.0);
        assert_eq!(c.maxima()[0].value, 2.0);
        let pairs = morse_pairs(&c).unwrap();
        assert!(pairs.pairs.is_empty());
        assert_eq!(pairs.essential, Some(1.0));
    }

    #[test]
    fn plateau_is_degenerate() {
        let err = critical_points(&sig(&[1.0, 2.0, 2.0, 0.0])).unwrap_err();
        assert!(matches!(err, Error::Degenerate(_)));
    }

    #[test]
    fn min_max_min() {
        // Sublevel sets: {0} at 0, {0},{2} at 2, one component from 5 on.
        let c = critical_points(&sig(&[0.0, 5.0, 2.0])).unwrap();
        let p = morse_pairs(&c).unwrap();
        assert_eq!(p.pairs.len(), 1);
        assert_eq!((p.pairs[0].birth, p.pairs[0].death), (2.0, 5.0));
        assert_eq!(p.essential, Some(0.0));
    }

    #[test]
    fn elder_rule_pairs_younger_minimum() {
        // Minima a<b<d<f, maxima c<e<g laid out as b c a e d g f.
        let (a, b, d, f) = (0.0, 1.0, 2.0, 3.0);
        let (c, e, g) = (4.0, 5.0, 6.0);
        let ys = [7.0, b, c, a, e, d, g, f, 8.0];
        let p = morse_pairs(&critical_points(&sig(&ys)).unwrap()).unwrap();
        let pairs: Vec<(f64, f64)> = p.pairs.iter().map(|q| (q.birth, q.death)).collect();
        assert_eq!(pairs, vec![(b, c), (d, e), (f, g)]);
        assert_eq!(p.essential, Some(a));
    }

    #[test]
    fn single_minimum_has_no_pairs() {
        let p = morse_pairs(&critical_points(&sig(&[2.0, 0.5, 3.0])).unwrap()).unwrap();
        assert!(p.pairs.is_empty());
        assert_eq!(p.essential, Some(0.5));
    }

    #[test]
    fn non_alternating_sequence_is_inconsistent() {
        let pt = |index, value, kind| CriticalPoint {
            index,
            position: index as f64,
            value,
            kind,
        };
        let seq = CriticalSequence::from_spatial(vec![
            pt(0, 0.0, CriticalKind::Minimum),
            pt(1, 2.0, CriticalKind::Maximum),
            pt(2, 3.0, CriticalKind::Maximum),
            pt(3, 1.0, CriticalKind::Minimum),
        ])
        .unwrap();
        assert!(matches!(morse_pairs(&seq), Err(Error::Internal(_))));
    }
}
