//! Geometry of real band sets `I = ∪ [a_k, b_k]` and of their images under
//! the linear-fractional map `λ_ω(z) = 1/(z − ω)`, together with the lower
//! bounds on the distortion ratio
//!
//! ```text
//!     dist(λ_ω(z), λ_ω(I)) / dist(z, I)
//! ```
//!
//! Three bounds are provided (`distor1`, `distor2`, `distor3`); which one
//! applies depends on where `Re z` sits relative to the bands and on the sign
//! of `ω`. [`verify_distortion`] samples a rectangle of the complex plane and
//! reports the smallest margin `ratio − bound` it encountered.
//!
//! Only finitely many bands are stored. For `Re z ≤ b_K` the distance to the
//! retained bands equals the distance to any extension of the set by bands to
//! the right of `b_K`, so queries are restricted to that half-plane.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Real;

/// Absolute slack allowed on distortion margins.
pub const TOL_GEOM: f64 = 1e-12;

/// Sample points closer than this to the bands are discarded.
pub const NEAR_SPECTRUM: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("band set is empty")]
    Empty,
    #[error("invalid band set: {0}")]
    InvalidBands(String),
    #[error("shift ω = {omega} must lie strictly left of a_1 = {a1}")]
    ShiftNotLeftOfSpectrum { omega: f64, a1: f64 },
    #[error("x = {x} is at or beyond the last retained edge b_K = {edge}")]
    TruncationExceeded { x: f64, edge: f64 },
    #[error("crossing ordinates need 0 < x < a_j (x = {x}, a_j = {a_j})")]
    CrossingDomain { x: f64, a_j: f64 },
    #[error("band index {0} out of range")]
    BandIndex(usize),
    #[error("bound {kind} does not apply: {reason}")]
    WrongRegion { kind: BoundKind, reason: String },
    #[error("z lies on the band set")]
    OnSpectrum,
    #[error("invalid sampling region: {0}")]
    InvalidRegion(String),
}

/// Finite truncation `∪_{k≤K} [a_k, b_k]` of a band spectrum with
/// `0 < a_1 < b_1 < a_2 < … < b_K`.
///
/// Serializes as a JSON array of `[a_k, b_k]` pairs in ascending order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<[T; 2]>", into = "Vec<[T; 2]>")]
#[serde(bound(serialize = "T: Real + Serialize", deserialize = "T: Real + Deserialize<'de>"))]
pub struct BandSet<T> {
    edges: Vec<[T; 2]>,
}

impl<T: Real> BandSet<T> {
    pub fn new(edges: Vec<[T; 2]>) -> Result<Self, GeometryError> {
        let Some(first) = edges.first() else {
            return Err(GeometryError::Empty);
        };
        if !(first[0] > T::zero()) {
            return Err(GeometryError::InvalidBands(format!(
                "a_1 = {} must be positive",
                first[0]
            )));
        }
        for (k, e) in edges.iter().enumerate() {
            if !(e[0].is_finite() && e[1].is_finite()) {
                return Err(GeometryError::InvalidBands(format!(
                    "band {} has non-finite edges",
                    k + 1
                )));
            }
            if !(e[0] < e[1]) {
                return Err(GeometryError::InvalidBands(format!(
                    "band {} needs a_k < b_k, got [{}, {}]",
                    k + 1,
                    e[0],
                    e[1]
                )));
            }
            if let Some(next) = edges.get(k + 1) {
                if !(e[1] < next[0]) {
                    return Err(GeometryError::InvalidBands(format!(
                        "bands {} and {} overlap or touch: b = {} ≥ a = {}",
                        k + 1,
                        k + 2,
                        e[1],
                        next[0]
                    )));
                }
            }
        }
        Ok(BandSet { edges })
    }

    pub fn from_pairs(pairs: &[(T, T)]) -> Result<Self, GeometryError> {
        Self::new(pairs.iter().map(|&(a, b)| [a, b]).collect())
    }

    /// Number of retained bands `K`.
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn edges(&self) -> &[[T; 2]] {
        &self.edges
    }

    /// Leftmost edge `a_1`.
    pub fn a1(&self) -> T {
        self.edges[0][0]
    }

    /// Right edge of the last retained band.
    pub fn last_edge(&self) -> T {
        self.edges[self.edges.len() - 1][1]
    }

    /// `a_k`, 1-based.
    pub fn a(&self, k: usize) -> T {
        self.edges[k - 1][0]
    }

    /// `b_k`, 1-based.
    pub fn b(&self, k: usize) -> T {
        self.edges[k - 1][1]
    }

    pub fn gap_stats(&self) -> GapStats<T> {
        let gap_lengths: Vec<T> = self.edges.windows(2).map(|w| w[1][0] - w[0][1]).collect();
        let relative_bound = gap_lengths
            .iter()
            .zip(&self.edges)
            .fold(T::zero(), |r, (&gap, e)| r.max(gap / e[1]));
        GapStats {
            gap_lengths,
            relative_bound,
        }
    }

    /// `r(I) = max_k r_k / b_k`.
    pub fn relative_gap_bound(&self) -> T {
        self.gap_stats().relative_bound
    }

    /// Euclidean distance from `z` to the union of segments.
    pub fn dist(&self, z: Complex<T>) -> T {
        dist_to_segments(z, self.edges.iter().map(|e| (e[0], e[1])))
    }

    pub fn classify(&self, x: T) -> Result<RegionClass, GeometryError> {
        classify(x, self)
    }
}

impl<T: Real> TryFrom<Vec<[T; 2]>> for BandSet<T> {
    type Error = GeometryError;
    fn try_from(edges: Vec<[T; 2]>) -> Result<Self, GeometryError> {
        BandSet::new(edges)
    }
}

impl<T> From<BandSet<T>> for Vec<[T; 2]> {
    fn from(b: BandSet<T>) -> Self {
        b.edges
    }
}

/// Gap lengths `r_k = a_{k+1} − b_k` and `r = max r_k/b_k`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GapStats<T> {
    pub gap_lengths: Vec<T>,
    pub relative_bound: T,
}

fn dist_to_segments<T: Real>(z: Complex<T>, segments: impl Iterator<Item = (T, T)>) -> T {
    let y = z.im.abs();
    segments.fold(T::infinity(), |best, (lo, hi)| {
        let dx = if z.re < lo {
            lo - z.re
        } else if z.re > hi {
            z.re - hi
        } else {
            T::zero()
        };
        best.min(dx.hypot(y))
    })
}

/// `dist(z, I)`; zero exactly when `z ∈ I`.
pub fn dist_to_bands<T: Real>(z: Complex<T>, bands: &BandSet<T>) -> T {
    bands.dist(z)
}

/// Where `Re z` falls relative to the bands. Indices are 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RegionClass {
    LeftOfSpectrum,
    OnBandProjection(usize),
    InGap(usize),
}

pub fn classify<T: Real>(x: T, bands: &BandSet<T>) -> Result<RegionClass, GeometryError> {
    let last = bands.last_edge();
    if x >= last {
        return Err(GeometryError::TruncationExceeded {
            x: x.to_f64_lossy(),
            edge: last.to_f64_lossy(),
        });
    }
    if x < bands.a1() {
        return Ok(RegionClass::LeftOfSpectrum);
    }
    // first band whose right edge is ≥ x
    let k = bands.edges.partition_point(|e| e[1] < x);
    if x >= bands.edges[k][0] {
        Ok(RegionClass::OnBandProjection(k + 1))
    } else {
        Ok(RegionClass::InGap(k))
    }
}

/// Heights `u_j = √(x(a_j − x))`, `v_j = √(x(b_j − x))` at which the vertical
/// line `Re z = x` is mapped by `λ_0` onto the edges `α_j`, `β_j`.
pub fn crossing_ordinates<T: Real>(x: T, bands: &BandSet<T>, j: usize) -> Result<(T, T), GeometryError> {
    if j == 0 || j > bands.len() {
        return Err(GeometryError::BandIndex(j));
    }
    let (a_j, b_j) = (bands.a(j), bands.b(j));
    if !(x > T::zero() && x < a_j) {
        return Err(GeometryError::CrossingDomain {
            x: x.to_f64_lossy(),
            a_j: a_j.to_f64_lossy(),
        });
    }
    Ok(((x * (a_j - x)).sqrt(), (x * (b_j - x)).sqrt()))
}

/// `λ_ω(z) = 1/(z − ω)` with real `ω < a_1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MobiusMap<T> {
    omega: T,
}

impl<T: Real> MobiusMap<T> {
    pub fn new(omega: T, bands: &BandSet<T>) -> Result<Self, GeometryError> {
        if !(omega < bands.a1()) {
            return Err(GeometryError::ShiftNotLeftOfSpectrum {
                omega: omega.to_f64_lossy(),
                a1: bands.a1().to_f64_lossy(),
            });
        }
        Ok(MobiusMap { omega })
    }

    pub fn omega(&self) -> T {
        self.omega
    }

    pub fn apply(&self, z: Complex<T>) -> Complex<T> {
        (z - Complex::new(self.omega, T::zero())).inv()
    }
}

/// Image intervals `[β_k, α_k]`, `β_k = 1/(b_k − ω)`, `α_k = 1/(a_k − ω)`,
/// listed in decreasing order (band `k` first).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ImageBandSet<T> {
    omega: T,
    intervals: Vec<[T; 2]>,
}

impl<T: Real> ImageBandSet<T> {
    pub fn intervals(&self) -> &[[T; 2]] {
        &self.intervals
    }

    pub fn omega(&self) -> T {
        self.omega
    }

    pub fn dist(&self, w: Complex<T>) -> T {
        dist_to_segments(w, self.intervals.iter().map(|i| (i[0], i[1])))
    }
}

pub fn mobius_image<T: Real>(bands: &BandSet<T>, omega: T) -> Result<ImageBandSet<T>, GeometryError> {
    MobiusMap::new(omega, bands)?;
    let intervals = bands
        .edges
        .iter()
        .map(|e| [T::one() / (e[1] - omega), T::one() / (e[0] - omega)])
        .collect();
    Ok(ImageBandSet { omega, intervals })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundKind {
    Distor1,
    Distor2,
    Distor3,
}

impl fmt::Display for BoundKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            BoundKind::Distor1 => "distor1",
            BoundKind::Distor2 => "distor2",
            BoundKind::Distor3 => "distor3",
        };
        f.write_str(s)
    }
}

/// Right-hand side of the selected distortion inequality at `z`.
///
/// * `distor1`: `1 / (3|z−ω|(|z−ω| + a_1 − ω))`, for `Re z < a_1` or `Re z` on a band.
/// * `distor2`: `(1 + r_k/(b_k − ω))⁻¹ / (2|z−ω|²)`, for `b_k < Re z < a_{k+1}`.
/// * `distor3`: `1 / (5(1 + r(I))·|z−ω|(|z−ω| + a_1 − ω))`, for `ω < 0`, any `z`.
pub fn distortion_bound<T: Real>(
    z: Complex<T>,
    omega: T,
    bands: &BandSet<T>,
    kind: BoundKind,
) -> Result<T, GeometryError> {
    MobiusMap::new(omega, bands)?;
    let m = (z - Complex::new(omega, T::zero())).norm();
    let a1 = bands.a1();
    match kind {
        BoundKind::Distor1 => match classify(z.re, bands)? {
            RegionClass::LeftOfSpectrum | RegionClass::OnBandProjection(_) => {
                Ok(T::one() / (T::lit(3.0) * m * (m + a1 - omega)))
            }
            RegionClass::InGap(k) => Err(GeometryError::WrongRegion {
                kind,
                reason: format!("Re z lies in gap {k}"),
            }),
        },
        BoundKind::Distor2 => match classify(z.re, bands)? {
            RegionClass::InGap(k) => {
                let (b_k, a_next) = (bands.b(k), bands.a(k + 1));
                let factor = T::one() + (a_next - b_k) / (b_k - omega);
                Ok(T::one() / (T::lit(2.0) * m * m * factor))
            }
            other => Err(GeometryError::WrongRegion {
                kind,
                reason: format!("Re z is not in an interior gap ({other:?})"),
            }),
        },
        BoundKind::Distor3 => {
            if !(omega < T::zero()) {
                return Err(GeometryError::WrongRegion {
                    kind,
                    reason: format!("requires ω < 0, got {omega}"),
                });
            }
            let r = bands.relative_gap_bound();
            Ok(T::one() / (T::lit(5.0) * (T::one() + r) * m * (m + a1 - omega)))
        }
    }
}

/// The bound that applies to `Re z` regardless of the sign of `ω`.
pub fn region_bound_kind<T: Real>(x: T, bands: &BandSet<T>) -> Result<BoundKind, GeometryError> {
    Ok(match classify(x, bands)? {
        RegionClass::InGap(_) => BoundKind::Distor2,
        _ => BoundKind::Distor1,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DistortionSample<T> {
    pub z: [T; 2],
    pub omega: T,
    pub dist_z: T,
    pub dist_lambda: T,
    pub ratio: T,
    pub bound: T,
    pub bound_kind: BoundKind,
    pub margin: T,
}

/// Measures the distortion at `z` against one specific bound.
pub fn distortion_sample<T: Real>(
    z: Complex<T>,
    omega: T,
    bands: &BandSet<T>,
    kind: BoundKind,
) -> Result<DistortionSample<T>, GeometryError> {
    let bound = distortion_bound(z, omega, bands, kind)?;
    let dist_z = bands.dist(z);
    if !(dist_z > T::zero()) {
        return Err(GeometryError::OnSpectrum);
    }
    let image = mobius_image(bands, omega)?;
    let lambda = MobiusMap::new(omega, bands)?.apply(z);
    let dist_lambda = image.dist(lambda);
    let ratio = dist_lambda / dist_z;
    Ok(DistortionSample {
        z: [z.re, z.im],
        omega,
        dist_z,
        dist_lambda,
        ratio,
        bound,
        bound_kind: kind,
        margin: ratio - bound,
    })
}

/// Distortion sample with the preferred bound: `distor3` when `ω < 0`,
/// otherwise `distor1`/`distor2` according to the region of `Re z`.
pub fn distortion_ratio<T: Real>(
    z: Complex<T>,
    omega: T,
    bands: &BandSet<T>,
) -> Result<DistortionSample<T>, GeometryError> {
    let kind = if omega < T::zero() {
        BoundKind::Distor3
    } else {
        region_bound_kind(z.re, bands)?
    };
    distortion_sample(z, omega, bands, kind)
}

/// Axis-aligned rectangle of the complex plane.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rect<T> {
    pub re_min: T,
    pub re_max: T,
    pub im_min: T,
    pub im_max: T,
}

impl<T: Real> Rect<T> {
    pub fn new(re: (T, T), im: (T, T)) -> Self {
        Rect {
            re_min: re.0,
            re_max: re.1,
            im_min: im.0,
            im_max: im.1,
        }
    }
}

/// Outcome of a sampled distortion check.
///
/// `counts` has one entry per bound kind checked plus `discarded` for points
/// that fell within [`NEAR_SPECTRUM`] of the bands.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationReport<T> {
    pub min_margin: Option<T>,
    pub worst_z: Option<[T; 2]>,
    pub worst_kind: Option<BoundKind>,
    pub counts: BTreeMap<String, usize>,
    pub seed: u64,
    #[serde(rename = "N")]
    pub n: usize,
    pub omega: T,
    pub success: bool,
}

/// Van der Corput radical inverse.
fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut r = 0.0;
    while i > 0 {
        r += f * (i % base) as f64;
        i /= base;
        f *= inv;
    }
    r
}

/// Sample `i` of a Cranley–Patterson rotated Halton(2,3) sequence.
fn halton_point(i: usize, shift: (f64, f64)) -> (f64, f64) {
    let u = (radical_inverse(i as u64 + 1, 2) + shift.0).fract();
    let v = (radical_inverse(i as u64 + 1, 3) + shift.1).fract();
    (u, v)
}

#[derive(Clone, Debug)]
struct Partial<T> {
    worst: Option<(T, usize, BoundKind)>,
    counts: BTreeMap<String, usize>,
}

impl<T: Real> Partial<T> {
    fn empty() -> Self {
        Partial {
            worst: None,
            counts: BTreeMap::new(),
        }
    }

    fn record(&mut self, margin: T, index: usize, kind: BoundKind) {
        *self.counts.entry(kind.to_string()).or_insert(0) += 1;
        let replace = match self.worst {
            None => true,
            Some((m, i, _)) => margin < m || (margin == m && index < i),
        };
        if replace {
            self.worst = Some((margin, index, kind));
        }
    }

    // associative and commutative; ties broken by sample index
    fn merge(mut self, other: Self) -> Self {
        for (k, v) in other.counts {
            *self.counts.entry(k).or_insert(0) += v;
        }
        if let Some((m, i, kind)) = other.worst {
            let replace = match self.worst {
                None => true,
                Some((m0, i0, _)) => m < m0 || (m == m0 && i < i0),
            };
            if replace {
                self.worst = Some((m, i, kind));
            }
        }
        self
    }
}

/// Samples `n` points of `region` and checks the distortion bounds at each.
///
/// Every point is tested against its region bound (`distor1`/`distor2`);
/// when `ω < 0` it is additionally tested against `distor3`. The report
/// succeeds iff the smallest margin is at least `-TOL_GEOM`.
pub fn verify_distortion<T: Real>(
    bands: &BandSet<T>,
    omega: T,
    region: Rect<T>,
    n: usize,
    seed: u64,
) -> Result<VerificationReport<T>, GeometryError> {
    MobiusMap::new(omega, bands)?;
    if !(region.re_min <= region.re_max && region.im_min <= region.im_max) {
        return Err(GeometryError::InvalidRegion("empty rectangle".into()));
    }
    if region.re_max >= bands.last_edge() {
        return Err(GeometryError::TruncationExceeded {
            x: region.re_max.to_f64_lossy(),
            edge: bands.last_edge().to_f64_lossy(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shift: (f64, f64) = (rng.gen(), rng.gen());
    let re_w = (region.re_max - region.re_min).to_f64_lossy();
    let im_w = (region.im_max - region.im_min).to_f64_lossy();
    let near = T::lit(NEAR_SPECTRUM);

    let check = |i: usize| -> Result<Partial<T>, GeometryError> {
        let mut part = Partial::empty();
        let (u, v) = halton_point(i, shift);
        let z = Complex::new(region.re_min + T::lit(u * re_w), region.im_min + T::lit(v * im_w));
        if bands.dist(z) <= near {
            *part.counts.entry("discarded".into()).or_insert(0) += 1;
            return Ok(part);
        }
        let kind = region_bound_kind(z.re, bands)?;
        let s = distortion_sample(z, omega, bands, kind)?;
        part.record(s.margin, i, kind);
        if omega < T::zero() {
            let s = distortion_sample(z, omega, bands, BoundKind::Distor3)?;
            part.record(s.margin, i, BoundKind::Distor3);
        }
        Ok(part)
    };

    let merged = (0..n)
        .into_par_iter()
        .map(check)
        .try_reduce(Partial::empty, |a, b| Ok(a.merge(b)))?;

    let worst_z = merged.worst.map(|(_, i, _)| {
        let (u, v) = halton_point(i, shift);
        [region.re_min + T::lit(u * re_w), region.im_min + T::lit(v * im_w)]
    });
    let min_margin = merged.worst.map(|w| w.0);
    let success = min_margin.is_none_or(|m| m >= -T::lit(TOL_GEOM));
    Ok(VerificationReport {
        min_margin,
        worst_z,
        worst_kind: merged.worst.map(|w| w.2),
        counts: merged.counts,
        seed,
        n,
        omega,
        success,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn two_bands() -> BandSet<f64> {
        BandSet::from_pairs(&[(1.0, 2.0), (3.0, 4.0)]).unwrap()
    }

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn band_set_invariants() {
        assert!(matches!(BandSet::<f64>::new(vec![]), Err(GeometryError::Empty)));
        assert!(BandSet::from_pairs(&[(0.0, 1.0)]).is_err());
        assert!(BandSet::from_pairs(&[(1.0, 1.0)]).is_err());
        assert!(BandSet::from_pairs(&[(1.0, 2.0), (2.0, 3.0)]).is_err());
        assert!(BandSet::from_pairs(&[(1.0, 2.0), (1.5, 3.0)]).is_err());
        let g = two_bands().gap_stats();
        assert_eq!(g.gap_lengths, vec![1.0]);
        assert_eq!(g.relative_bound, 0.5);
    }

    #[test]
    fn json_shape() {
        let b = two_bands();
        let s = serde_json::to_string(&b).unwrap();
        assert_eq!(s, "[[1.0,2.0],[3.0,4.0]]");
        let back: BandSet<f64> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, b);
        assert!(serde_json::from_str::<BandSet<f64>>("[[3.0,4.0],[1.0,2.0]]").is_err());
    }

    #[test]
    fn distance_examples() {
        let b = two_bands();
        assert_eq!(dist_to_bands(c(2.5, 0.0), &b), 0.5);
        assert!((dist_to_bands(c(2.5, 1.0), &b) - 1.25f64.sqrt()).abs() < 1e-15);
        assert!((dist_to_bands(c(1.5, 0.3), &b) - 0.3).abs() < 1e-15);
        assert_eq!(dist_to_bands(c(3.5, 0.0), &b), 0.0);
        assert_eq!(dist_to_bands(c(0.25, 0.0), &b), 0.75);
    }

    #[test]
    fn image_examples() {
        let one = BandSet::<f64>::from_pairs(&[(1.0, 2.0)]).unwrap();
        assert_eq!(mobius_image(&one, 0.0).unwrap().intervals(), &[[0.5, 1.0]]);
        let img = mobius_image(&one, -1.0).unwrap();
        assert!((img.intervals()[0][0] - 1.0 / 3.0).abs() < 1e-15);
        assert!((img.intervals()[0][1] - 0.5).abs() < 1e-15);
        let img = mobius_image(&two_bands(), 0.0).unwrap();
        assert_eq!(img.intervals()[0], [0.5, 1.0]);
        assert!((img.intervals()[1][0] - 0.25).abs() < 1e-15);
        assert!((img.intervals()[1][1] - 1.0 / 3.0).abs() < 1e-15);
        assert!(matches!(
            mobius_image(&one, 1.0),
            Err(GeometryError::ShiftNotLeftOfSpectrum { .. })
        ));
    }

    #[test]
    fn classification_examples() {
        let b = two_bands();
        assert_eq!(classify(0.5, &b).unwrap(), RegionClass::LeftOfSpectrum);
        assert_eq!(classify(-7.0, &b).unwrap(), RegionClass::LeftOfSpectrum);
        assert_eq!(classify(1.5, &b).unwrap(), RegionClass::OnBandProjection(1));
        assert_eq!(classify(2.7, &b).unwrap(), RegionClass::InGap(1));
        assert_eq!(classify(1.0, &b).unwrap(), RegionClass::OnBandProjection(1));
        assert_eq!(classify(2.0, &b).unwrap(), RegionClass::OnBandProjection(1));
        assert_eq!(classify(3.0, &b).unwrap(), RegionClass::OnBandProjection(2));
        assert!(matches!(
            classify(4.0, &b),
            Err(GeometryError::TruncationExceeded { .. })
        ));
    }

    #[test]
    fn crossing_ordinate_examples() {
        let b = BandSet::from_pairs(&[(2.0, 5.0)]).unwrap();
        assert_eq!(crossing_ordinates(1.0, &b, 1).unwrap(), (1.0, 2.0));
        let b = BandSet::from_pairs(&[(3.0, 4.0)]).unwrap();
        let (u, v) = crossing_ordinates(2.0, &b, 1).unwrap();
        assert!((u - 2f64.sqrt()).abs() < 1e-15 && (v - 2.0).abs() < 1e-15);
        let b = BandSet::<f64>::from_pairs(&[(1.0, 2.0)]).unwrap();
        let (u, v) = crossing_ordinates(0.5, &b, 1).unwrap();
        assert!((u - 0.5).abs() < 1e-15 && (v - 0.75f64.sqrt()).abs() < 1e-15);
        assert!(crossing_ordinates(0.0, &b, 1).is_err());
        assert!(crossing_ordinates(1.0, &b, 1).is_err());
        assert!(crossing_ordinates(0.5, &b, 2).is_err());
    }

    #[test]
    fn crossing_ordinates_map_to_image_edges() {
        // λ_0(x + i u_j) has real part α_j; λ_0(x + i v_j) has real part β_j
        let b = BandSet::from_pairs(&[(1.0, 2.0), (3.0, 4.5)]).unwrap();
        for &x in &[0.2, 0.7, 0.95] {
            for j in 1..=2 {
                let (u, v) = crossing_ordinates(x, &b, j).unwrap();
                assert!(u < v);
                let ru = c(x, u).inv().re;
                let rv = c(x, v).inv().re;
                assert!((ru - 1.0 / b.a(j)).abs() < 1e-14);
                assert!((rv - 1.0 / b.b(j)).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn bound_examples() {
        let one = BandSet::from_pairs(&[(1.0, 2.0)]).unwrap();
        let d1 = distortion_bound(c(-1.0, 0.0), 0.0, &one, BoundKind::Distor1).unwrap();
        assert!((d1 - 1.0 / 6.0).abs() < 1e-15);
        let b = two_bands();
        let d2 = distortion_bound(c(2.5, 0.0), 0.0, &b, BoundKind::Distor2).unwrap();
        assert!((d2 - 0.053_333_333_333_333_33).abs() < 1e-15);
        let d3 = distortion_bound(c(2.5, 0.0), -1.0, &b, BoundKind::Distor3).unwrap();
        assert!((d3 - 1.0 / (5.0 * 1.5 * 3.5 * 5.5)).abs() < 1e-16);
        assert!((d3 - 0.006_926_4).abs() < 1e-7);
    }

    #[test]
    fn bound_region_errors() {
        let b = two_bands();
        assert!(matches!(
            distortion_bound(c(2.5, 0.0), 0.0, &b, BoundKind::Distor1),
            Err(GeometryError::WrongRegion { .. })
        ));
        assert!(matches!(
            distortion_bound(c(0.5, 0.0), 0.0, &b, BoundKind::Distor2),
            Err(GeometryError::WrongRegion { .. })
        ));
        assert!(matches!(
            distortion_bound(c(0.5, 0.0), 0.0, &b, BoundKind::Distor3),
            Err(GeometryError::WrongRegion { .. })
        ));
    }

    #[test]
    fn ratio_examples() {
        let one = BandSet::from_pairs(&[(1.0, 2.0)]).unwrap();
        let s = distortion_ratio(c(-1.0, 0.0), 0.0, &one).unwrap();
        assert_eq!(s.bound_kind, BoundKind::Distor1);
        assert!((s.dist_z - 2.0).abs() < 1e-15);
        assert!((s.dist_lambda - 1.5).abs() < 1e-15);
        assert!((s.ratio - 0.75).abs() < 1e-15);
        assert!(s.margin > 0.0);

        let b = two_bands();
        let s = distortion_ratio(c(2.5, 0.0), 0.0, &b).unwrap();
        assert_eq!(s.bound_kind, BoundKind::Distor2);
        assert!((s.dist_z - 0.5).abs() < 1e-15);
        assert!((s.dist_lambda - 1.0 / 15.0).abs() < 1e-15);
        assert!((s.ratio - 0.133_333_333_333_333_3).abs() < 1e-14);
        assert!(s.ratio >= s.bound);

        let s = distortion_ratio(c(2.5, 0.0), -1.0, &b).unwrap();
        assert_eq!(s.bound_kind, BoundKind::Distor3);
        assert!((s.dist_lambda - (2.0 / 7.0 - 0.25)).abs() < 1e-15);
        assert!((s.ratio - 0.071_428_571_428_571_4).abs() < 1e-14);
        assert!(s.margin > 0.0);

        assert!(matches!(
            distortion_ratio(c(1.5, 0.0), 0.0, &b),
            Err(GeometryError::OnSpectrum)
        ));
    }

    #[test]
    fn verification_examples() {
        let one = BandSet::from_pairs(&[(1.0, 2.0)]).unwrap();
        let r = verify_distortion(&one, 0.0, Rect::new((-3.0, 0.0), (-2.0, 2.0)), 10_000, 1).unwrap();
        assert!(r.success);
        assert!(r.min_margin.unwrap() > 0.0);
        assert_eq!(r.counts["distor1"], 10_000);

        let r = verify_distortion(&two_bands(), -5.0, Rect::new((-2.0, 3.5), (-5.0, 5.0)), 100_000, 2).unwrap();
        assert!(r.success && r.min_margin.unwrap() > 0.0);
        let checked_d3 = r.counts["distor3"];
        assert_eq!(checked_d3 + r.counts.get("discarded").copied().unwrap_or(0), 100_000);

        let r = verify_distortion(&one, 0.0, Rect::new((-3.0, 0.0), (-2.0, 2.0)), 0, 1).unwrap();
        assert!(r.success && r.min_margin.is_none() && r.counts.is_empty());
    }

    #[test]
    fn verification_is_deterministic() {
        let b = two_bands();
        let region = Rect::new((-2.0, 3.5), (-3.0, 3.0));
        let a = verify_distortion(&b, -1.0, region, 5_000, 42).unwrap();
        let again = verify_distortion(&b, -1.0, region, 5_000, 42).unwrap();
        assert_eq!(a, again);
        let other = verify_distortion(&b, -1.0, region, 5_000, 43).unwrap();
        assert_ne!(a.worst_z, other.worst_z);
    }

    #[test]
    fn verification_rejects_truncation_edge() {
        let b = two_bands();
        let err = verify_distortion(&b, 0.0, Rect::new((0.0, 4.5), (-1.0, 1.0)), 10, 0).unwrap_err();
        assert!(matches!(err, GeometryError::TruncationExceeded { .. }));
    }

    #[test]
    fn single_precision_geometry() {
        let b = BandSet::<f32>::from_pairs(&[(1.0, 2.0), (3.0, 4.0)]).unwrap();
        let s = distortion_ratio(Complex::new(2.5f32, 0.0), 0.0, &b).unwrap();
        assert!(s.margin > 0.0);
    }

    proptest! {
        #[test]
        fn dist_is_one_lipschitz(x1 in -5.0..10.0f64, y1 in -5.0..5.0f64, x2 in -5.0..10.0f64, y2 in -5.0..5.0f64) {
            let b = BandSet::from_pairs(&[(1.0, 2.0), (3.0, 4.0), (5.5, 9.0)]).unwrap();
            let (z1, z2) = (c(x1, y1), c(x2, y2));
            prop_assert!((b.dist(z1) - b.dist(z2)).abs() <= (z1 - z2).norm() * (1.0 + 1e-15) + 1e-15);
        }

        #[test]
        fn image_intervals_are_ordered(omega in -50.0..0.999f64) {
            let b = BandSet::from_pairs(&[(1.0, 2.0), (3.0, 4.0), (5.5, 9.0)]).unwrap();
            let img = mobius_image(&b, omega).unwrap();
            let iv = img.intervals();
            for k in 0..iv.len() {
                prop_assert!(iv[k][0] > 0.0 && iv[k][1] > iv[k][0]);
                if k + 1 < iv.len() {
                    prop_assert!(iv[k + 1][1] < iv[k][0]);
                }
            }
        }

        #[test]
        fn image_distance_matches_direct_evaluation(x in -5.0..8.0f64, y in -5.0..5.0f64, omega in -10.0..0.9f64) {
            let b = BandSet::from_pairs(&[(1.0, 2.0), (3.0, 4.0), (5.5, 9.0)]).unwrap();
            let z = c(x, y);
            prop_assume!(b.dist(z) > 1e-6);
            let img = mobius_image(&b, omega).unwrap();
            let lambda = (z - omega).inv();
            // nearest-point search on densely sampled image of each band
            let direct = b.edges().iter().map(|e| {
                let (lo, hi) = (1.0 / (e[1] - omega), 1.0 / (e[0] - omega));
                let t = lambda.re.clamp(lo, hi);
                (lambda - c(t, 0.0)).norm()
            }).fold(f64::INFINITY, f64::min);
            prop_assert!((img.dist(lambda) - direct).abs() <= 1e-14 * direct.max(1e-300));
        }

        #[test]
        fn left_real_points_measure_to_a1(x in -20.0..0.999f64) {
            let b = BandSet::from_pairs(&[(1.0, 2.0), (3.0, 4.0)]).unwrap();
            prop_assert_eq!(b.dist(c(x, 0.0)), 1.0 - x);
        }
    }
}
