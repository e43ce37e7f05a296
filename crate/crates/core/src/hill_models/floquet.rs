use rayon::prelude::*;
use serde::Serialize;

use super::{HillError, PeriodicPotential};
use crate::band_geometry::BandSet;
use crate::scalar::Real;

/// Smallest step count accepted by [`discriminant`].
pub const MIN_STEPS: usize = 100;
/// Gaps narrower than this are treated as touching bands.
pub const GAP_MERGE: f64 = 1e-6;
/// `Δ² − 4` below this at the range start means the scan begins inside a band.
const START_IN_BAND: f64 = 1e-8;
/// Target width of the bisection bracket around each edge.
pub const EDGE_TOL: f64 = 1e-10;

/// Monodromy matrix of `−y″ + V₀y = Ey` over one period, columns being the
/// solutions with `(y, y′)(0) = (1, 0)` and `(0, 1)`.
///
/// `samples` holds `V₀` at the `2·steps + 1` half-step nodes of `[0, L]`.
fn monodromy_sampled<T: Real>(samples: &[T], period: T, e: T) -> [[T; 2]; 2] {
    let steps = (samples.len() - 1) / 2;
    let h = period / T::from_usize_lossy(steps);
    let half = h / T::lit(2.0);
    let sixth = h / T::lit(6.0);
    let two = T::lit(2.0);
    // state: (y1, y1', y2, y2')
    let mut s = [T::one(), T::zero(), T::zero(), T::one()];
    let deriv = |q: T, s: &[T; 4]| [s[1], q * s[0], s[3], q * s[2]];
    for i in 0..steps {
        let q0 = samples[2 * i] - e;
        let qm = samples[2 * i + 1] - e;
        let q1 = samples[2 * i + 2] - e;
        let k1 = deriv(q0, &s);
        let t2: [T; 4] = std::array::from_fn(|j| s[j] + half * k1[j]);
        let k2 = deriv(qm, &t2);
        let t3: [T; 4] = std::array::from_fn(|j| s[j] + half * k2[j]);
        let k3 = deriv(qm, &t3);
        let t4: [T; 4] = std::array::from_fn(|j| s[j] + h * k3[j]);
        let k4 = deriv(q1, &t4);
        for j in 0..4 {
            s[j] += sixth * (k1[j] + two * (k2[j] + k3[j]) + k4[j]);
        }
    }
    [[s[0], s[2]], [s[1], s[3]]]
}

fn sample_potential<T: Real>(v0: &PeriodicPotential<T>, steps: usize) -> Vec<T> {
    let h = v0.period / T::from_usize_lossy(2 * steps);
    (0..=2 * steps).map(|i| v0.value(h * T::from_usize_lossy(i))).collect()
}

fn check_steps(steps: usize) -> Result<(), HillError> {
    if steps < MIN_STEPS {
        return Err(HillError::TooFewSteps {
            min: MIN_STEPS,
            got: steps,
        });
    }
    Ok(())
}

/// Monodromy matrix at energy `E` using `steps` classical RK4 steps.
pub fn monodromy<T: Real>(v0: &PeriodicPotential<T>, e: T, steps: usize) -> Result<[[T; 2]; 2], HillError> {
    check_steps(steps)?;
    Ok(monodromy_sampled(&sample_potential(v0, steps), v0.period, e))
}

/// `Δ(E)` together with diagnostics of the integration.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DiscriminantValue<T> {
    pub energy: T,
    /// Trace of the monodromy matrix at `steps`.
    pub delta: T,
    /// `|Δ_{2·steps} − Δ_steps| / 15`, the Richardson estimate of the error in `delta`.
    pub error_estimate: T,
    /// `det M`, equal to 1 for the exact flow.
    pub determinant: T,
    pub steps: usize,
}

/// Hill discriminant at `E`, with a Richardson error estimate from a second
/// integration at twice the step count.
pub fn discriminant<T: Real>(v0: &PeriodicPotential<T>, e: T, steps: usize) -> Result<DiscriminantValue<T>, HillError> {
    DiscriminantCurve::new(v0.clone(), steps)?.evaluate(e)
}

/// `E ↦ Δ(E)` for a fixed potential and step count. Potential samples are
/// cached, so repeated evaluations cost one RK4 sweep each.
#[derive(Clone, Debug)]
pub struct DiscriminantCurve<T> {
    potential: PeriodicPotential<T>,
    steps: usize,
    coarse: Vec<T>,
    fine: Vec<T>,
}

impl<T: Real> DiscriminantCurve<T> {
    pub fn new(potential: PeriodicPotential<T>, steps: usize) -> Result<Self, HillError> {
        check_steps(steps)?;
        let coarse = sample_potential(&potential, steps);
        let fine = sample_potential(&potential, 2 * steps);
        Ok(DiscriminantCurve {
            potential,
            steps,
            coarse,
            fine,
        })
    }

    pub fn potential(&self) -> &PeriodicPotential<T> {
        &self.potential
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    /// Step size `h = L / steps`.
    pub fn step_size(&self) -> T {
        self.potential.period / T::from_usize_lossy(self.steps)
    }

    /// Order of the integrator.
    pub fn order(&self) -> u32 {
        4
    }

    pub fn monodromy(&self, e: T) -> [[T; 2]; 2] {
        monodromy_sampled(&self.coarse, self.potential.period, e)
    }

    /// `Δ(E)` without the error estimate.
    pub fn delta(&self, e: T) -> T {
        let m = self.monodromy(e);
        m[0][0] + m[1][1]
    }

    pub fn evaluate(&self, e: T) -> Result<DiscriminantValue<T>, HillError> {
        let m = self.monodromy(e);
        let fine = monodromy_sampled(&self.fine, self.potential.period, e);
        let delta = m[0][0] + m[1][1];
        let refined = fine[0][0] + fine[1][1];
        Ok(DiscriminantValue {
            energy: e,
            delta,
            error_estimate: (refined - delta).abs() / T::lit(15.0),
            determinant: m[0][0] * m[1][1] - m[0][1] * m[1][0],
            steps: self.steps,
        })
    }

    /// `Δ(E)² − 4` written as `(m₁₁ − m₂₂)² + 4 m₁₂ m₂₁`.
    ///
    /// The two agree when `det M = 1`. This form does not cancel near
    /// touching bands, so integration error moves edges by `O(ε)` rather
    /// than `O(√ε)`. Bands are `{E : gap_function(E) ≤ 0}`.
    pub fn gap_function(&self, e: T) -> T {
        let m = self.monodromy(e);
        let d = m[0][0] - m[1][1];
        d * d + T::lit(4.0) * m[0][1] * m[1][0]
    }
}

/// Scan settings for [`band_edges_with`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BandScan {
    /// RK4 steps per period.
    pub steps: usize,
    /// Uniform grid points across the energy range.
    pub scan_points: usize,
}

impl Default for BandScan {
    fn default() -> Self {
        BandScan {
            steps: 2048,
            scan_points: 4000,
        }
    }
}

/// Computed band structure with the shifts applied to it.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound(serialize = "T: Real + Serialize"))]
pub struct HillBands<T> {
    pub bands: BandSet<T>,
    /// Total constant `c` added to `V₀`: the potential's own shift plus `auto_shift`.
    pub shift: T,
    /// Shift added so that `a₁ > 0` (`1 + |min edge|`, or 0 if not needed).
    pub auto_shift: T,
    /// Whether the last band runs into the end of the energy range.
    pub truncated: bool,
    /// Near-touching gaps below [`GAP_MERGE`] that were closed.
    pub merged_gaps: usize,
    /// Largest `|det M − 1|` over all evaluated energies.
    pub max_det_defect: T,
}

impl<T: Real> HillBands<T> {
    /// The potential the band set belongs to, including the automatic shift.
    pub fn shifted_potential(&self, v0: &PeriodicPotential<T>) -> PeriodicPotential<T> {
        v0.shifted(self.auto_shift)
    }
}

/// First `K` bands of `−d²/dx² + V₀` within `E_range`, with default scan settings.
pub fn band_edges<T: Real>(v0: &PeriodicPotential<T>, e_range: (T, T), k: usize) -> Result<HillBands<T>, HillError> {
    band_edges_with(v0, e_range, k, BandScan::default())
}

fn bisect<T: Real>(curve: &DiscriminantCurve<T>, mut lo: T, mut hi: T, f_lo_positive: bool) -> T {
    let tol = T::lit(EDGE_TOL) * T::lit(0.1);
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        let mid = (lo + hi) / T::lit(2.0);
        if (curve.gap_function(mid) > T::zero()) == f_lo_positive {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo + hi) / T::lit(2.0)
}

/// Golden-section search for the maximum of the gap function on `[lo, hi]`.
fn golden_max<T: Real>(curve: &DiscriminantCurve<T>, mut lo: T, mut hi: T) -> (T, T) {
    let r = T::lit(0.618_033_988_749_894_8);
    let mut x1 = hi - r * (hi - lo);
    let mut x2 = lo + r * (hi - lo);
    let mut f1 = curve.gap_function(x1);
    let mut f2 = curve.gap_function(x2);
    let tol = T::lit(EDGE_TOL) * T::lit(0.1);
    for _ in 0..200 {
        if hi - lo <= tol || f1.max(f2) > T::zero() {
            break;
        }
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + r * (hi - lo);
            f2 = curve.gap_function(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - r * (hi - lo);
            f1 = curve.gap_function(x1);
        }
    }
    if f1 > f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Band edges from the discriminant.
///
/// `e_range` refers to the unshifted potential `V₀`; the potential's own
/// shift is added to the edges afterwards. The returned bands are
/// `{E : |Δ(E)| ≤ 2}` within the range, with edges bisected to [`EDGE_TOL`]
/// and gaps below [`GAP_MERGE`] closed. If the lowest shifted edge is not
/// positive, `1 + |min edge|` is added to every edge and recorded as
/// `auto_shift`. The last band is cut at the end of the range when
/// it runs past it. Only the first `k` bands are kept. A range that starts
/// strictly inside a band is rejected, since `a₁` would be unknown.
///
/// Far below `min V₀` the fundamental solutions grow like `e^{L√(V₀−E)}` and
/// rounding in the integration spoils `det M = 1`; `max_det_defect` reports
/// this, and ranges should start near `min V₀`.
pub fn band_edges_with<T: Real>(
    v0: &PeriodicPotential<T>,
    e_range: (T, T),
    k: usize,
    scan: BandScan,
) -> Result<HillBands<T>, HillError> {
    let (lo, hi) = e_range;
    if !(lo < hi && lo.is_finite() && hi.is_finite()) {
        return Err(HillError::EnergyRange {
            lo: lo.to_f64_lossy(),
            hi: hi.to_f64_lossy(),
        });
    }
    if k == 0 {
        return Err(HillError::FewerBandsFound(0));
    }
    let raw = PeriodicPotential {
        shift: T::zero(),
        ..v0.clone()
    };
    let curve = DiscriminantCurve::new(raw, scan.steps)?;
    let n = scan.scan_points.max(16);
    let de = (hi - lo) / T::from_usize_lossy(n - 1);
    let grid: Vec<T> = (0..n).map(|i| lo + de * T::from_usize_lossy(i)).collect();
    let evals: Vec<(T, T)> = grid
        .par_iter()
        .map(|&e| {
            let m = curve.monodromy(e);
            let d = m[0][0] - m[1][1];
            let g = d * d + T::lit(4.0) * m[0][1] * m[1][0];
            let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
            (g, (det - T::one()).abs())
        })
        .collect();
    let max_det_defect = evals.iter().fold(T::zero(), |m, e| m.max(e.1));
    let g: Vec<T> = evals.iter().map(|e| e.0).collect();
    if g[0] < -T::lit(START_IN_BAND) {
        return Err(HillError::RangeStartsInBand { lo: lo.to_f64_lossy() });
    }

    // (left, right) of every maximal interval with g <= 0
    let mut bands: Vec<[T; 2]> = Vec::new();
    let mut open: Option<T> = if g[0] <= T::zero() { Some(lo) } else { None };
    for i in 1..n {
        let (prev, cur) = (g[i - 1] <= T::zero(), g[i] <= T::zero());
        match (prev, cur) {
            (false, true) => open = Some(bisect(&curve, grid[i - 1], grid[i], true)),
            (true, false) => {
                let right = bisect(&curve, grid[i - 1], grid[i], false);
                bands.push([open.take().expect("band opened"), right]);
            }
            _ => {}
        }
    }
    let truncated = open.is_some();
    if let Some(left) = open {
        bands.push([left, hi]);
    }

    // Gaps that open and close between two grid points: look at each
    // interior local maximum of g inside a band.
    let mut hidden: Vec<(T, T)> = Vec::new();
    for i in 1..n - 1 {
        if g[i] <= T::zero() && g[i - 1] <= T::zero() && g[i + 1] <= T::zero() && g[i] >= g[i - 1] && g[i] >= g[i + 1] {
            let (x, fx) = golden_max(&curve, grid[i - 1], grid[i + 1]);
            if fx > T::zero() {
                hidden.push((
                    bisect(&curve, grid[i - 1], x, false),
                    bisect(&curve, x, grid[i + 1], true),
                ));
            }
        }
    }
    for (gl, gr) in hidden {
        if let Some(pos) = bands.iter().position(|b| b[0] < gl && gr < b[1]) {
            let b = bands[pos];
            bands[pos] = [b[0], gl];
            bands.insert(pos + 1, [gr, b[1]]);
        }
    }

    let mut merged: Vec<[T; 2]> = Vec::with_capacity(bands.len());
    let mut merged_gaps = 0;
    for b in bands {
        match merged.last_mut() {
            Some(last) if b[0] - last[1] < T::lit(GAP_MERGE) => {
                last[1] = b[1];
                merged_gaps += 1;
            }
            _ => merged.push(b),
        }
    }
    if merged.len() < k {
        return Err(HillError::FewerBandsFound(merged.len()));
    }
    let truncated = truncated && merged.len() == k;
    merged.truncate(k);

    let min_edge = merged[0][0] + v0.shift;
    let auto_shift = if min_edge <= T::zero() {
        T::one() + min_edge.abs()
    } else {
        T::zero()
    };
    let c = v0.shift + auto_shift;
    let edges = merged.into_iter().map(|[a, b]| [a + c, b + c]).collect();
    Ok(HillBands {
        bands: BandSet::new(edges)?,
        shift: c,
        auto_shift,
        truncated,
        merged_gaps,
        max_det_defect,
    })
}
