use std::path::Path;

use serde::{Deserialize, Serialize};

use super::HillError;
use crate::scalar::Real;

/// Shape of a periodic potential over one period.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum PotentialKind<T> {
    /// `V₀ ≡ 0`
    Free,
    /// `V₀(x) = amplitude · cos(2πx / period)`
    Cosine { amplitude: T },
    /// Samples `(x_i, V₀(x_i))` on `[x_0, x_0 + period)`, linearly
    /// interpolated and wrapped periodically.
    Table { xs: Vec<T>, values: Vec<T> },
}

/// Real periodic potential `V₀(x) + shift` with period `L`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeriodicPotential<T> {
    pub kind: PotentialKind<T>,
    pub period: T,
    pub shift: T,
}

impl<T: Real> PeriodicPotential<T> {
    pub fn new(kind: PotentialKind<T>, period: T, shift: T) -> Result<Self, HillError> {
        if !(period > T::zero() && period.is_finite()) {
            return Err(HillError::Potential(format!("period must be positive, got {period}")));
        }
        if !shift.is_finite() {
            return Err(HillError::Potential("shift must be finite".into()));
        }
        match &kind {
            PotentialKind::Free => {}
            PotentialKind::Cosine { amplitude } => {
                if !amplitude.is_finite() {
                    return Err(HillError::Potential("amplitude must be finite".into()));
                }
            }
            PotentialKind::Table { xs, values } => {
                if xs.len() != values.len() || xs.len() < 2 {
                    return Err(HillError::Potential(
                        "table needs at least two (x, V) rows of equal length".into(),
                    ));
                }
                if xs.windows(2).any(|w| !(w[0] < w[1])) {
                    return Err(HillError::Potential("table abscissae must increase strictly".into()));
                }
                if !(xs[xs.len() - 1] - xs[0] < period) {
                    return Err(HillError::Potential("table must span less than one period".into()));
                }
                if values.iter().any(|v| !v.is_finite()) {
                    return Err(HillError::Potential("table values must be finite".into()));
                }
            }
        }
        Ok(PeriodicPotential { kind, period, shift })
    }

    pub fn free(period: T, shift: T) -> Result<Self, HillError> {
        Self::new(PotentialKind::Free, period, shift)
    }

    pub fn cosine(amplitude: T, period: T, shift: T) -> Result<Self, HillError> {
        Self::new(PotentialKind::Cosine { amplitude }, period, shift)
    }

    /// Reads a two-column CSV `x,V0(x)`; a header row is allowed.
    pub fn from_csv(path: &Path, period: T, shift: T) -> Result<Self, HillError> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .from_path(path)
            .map_err(|e| HillError::Io(e.to_string()))?;
        let mut xs = Vec::new();
        let mut values = Vec::new();
        for (line, record) in reader.records().enumerate() {
            let record = record.map_err(|e| HillError::Io(e.to_string()))?;
            if record.len() < 2 {
                return Err(HillError::Potential(format!(
                    "row {} has fewer than two columns",
                    line + 1
                )));
            }
            match (record[0].parse::<f64>(), record[1].parse::<f64>()) {
                (Ok(x), Ok(v)) => {
                    xs.push(T::lit(x));
                    values.push(T::lit(v));
                }
                _ if line == 0 => continue,
                _ => return Err(HillError::Potential(format!("row {} is not numeric", line + 1))),
            }
        }
        Self::new(PotentialKind::Table { xs, values }, period, shift)
    }

    /// Same potential with an additional constant shift.
    pub fn shifted(&self, extra: T) -> Self {
        PeriodicPotential {
            kind: self.kind.clone(),
            period: self.period,
            shift: self.shift + extra,
        }
    }

    /// Unshifted shape `V₀(x)`.
    pub fn raw(&self, x: T) -> T {
        match &self.kind {
            PotentialKind::Free => T::zero(),
            PotentialKind::Cosine { amplitude } => *amplitude * (T::lit(2.0) * T::PI() * x / self.period).cos(),
            PotentialKind::Table { xs, values } => {
                let x0 = xs[0];
                let mut t = (x - x0) % self.period;
                if t < T::zero() {
                    t += self.period;
                }
                let t = x0 + t;
                let k = xs.partition_point(|&xi| xi <= t);
                let (xl, vl, xr, vr) = if k == xs.len() {
                    (xs[k - 1], values[k - 1], x0 + self.period, values[0])
                } else {
                    (xs[k - 1], values[k - 1], xs[k], values[k])
                };
                vl + (vr - vl) * (t - xl) / (xr - xl)
            }
        }
    }

    /// `V₀(x) + shift`
    pub fn value(&self, x: T) -> T {
        self.raw(x) + self.shift
    }

    /// Exact `sup |V₀ + shift|` (piecewise-linear tables attain it at nodes).
    pub fn sup_norm(&self) -> T {
        match &self.kind {
            PotentialKind::Free => self.shift.abs(),
            PotentialKind::Cosine { amplitude } => amplitude.abs() + self.shift.abs(),
            PotentialKind::Table { values, .. } => values.iter().fold(T::zero(), |m, &v| m.max((v + self.shift).abs())),
        }
    }
}
