//! Distortion profiles over chain positions, the rate-distortion bound for
//! the symmetric Bernoulli source, and the inverse-temperature map for a
//! test-channel flip probability.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Per-position distortion of one encoded instance (or an average of many).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistortionProfile {
    /// `d_z` for each chain position `z = 0..L-1`.
    pub values: Vec<f64>,
    /// Coupling width the instance was sampled with.
    pub width: usize,
}

impl DistortionProfile {
    pub fn new(values: Vec<f64>, width: usize) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidParameter("profile must be non-empty".into()));
        }
        if width == 0 {
            return Err(Error::InvalidParameter("width must be >= 1".into()));
        }
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidParameter(
                "profile entries must be finite and non-negative".into(),
            ));
        }
        Ok(DistortionProfile { values, width })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Overall distortion: the positions carry equal weight.
    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// Mean of `d_z` over the bulk positions `z ∈ [w, L-1-w]`, away from the
    /// seeded boundary. `None` when the chain is too short to have a bulk
    /// (`L <= 2w`).
    pub fn saturation_value(&self) -> Option<f64> {
        let (l, w) = (self.values.len(), self.width);
        if l <= 2 * w {
            return None;
        }
        let bulk = &self.values[w..l - w];
        Some(bulk.iter().sum::<f64>() / bulk.len() as f64)
    }

    /// Median of the bulk positions; robust to a few stragglers.
    pub fn saturation_median(&self) -> Option<f64> {
        let (l, w) = (self.values.len(), self.width);
        if l <= 2 * w {
            return None;
        }
        let mut bulk = self.values[w..l - w].to_vec();
        bulk.sort_by(|a, b| a.total_cmp(b));
        let k = bulk.len();
        Some(if k % 2 == 1 {
            bulk[k / 2]
        } else {
            0.5 * (bulk[k / 2 - 1] + bulk[k / 2])
        })
    }

    /// Largest minus smallest bulk value.
    pub fn saturation_spread(&self) -> Option<f64> {
        let (l, w) = (self.values.len(), self.width);
        if l <= 2 * w {
            return None;
        }
        let bulk = &self.values[w..l - w];
        let lo = bulk.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = bulk.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        Some(hi - lo)
    }

    /// Center of the collision bump: the position maximizing the sum of the
    /// `2w - 1` profile values around it (ring indexing). The two encoding
    /// waves meet at a ring position that varies from instance to instance;
    /// the moving-window sum locates the resulting bump robustly against
    /// single-position noise.
    pub fn bump_center(&self) -> usize {
        let l = self.values.len();
        let half = self.width.saturating_sub(1);
        let mut best = (f64::NEG_INFINITY, 0);
        for z in 0..l {
            let mut s = 0.0;
            for d in 0..=2 * half {
                s += self.values[(z + l + d - half) % l];
            }
            if s > best.0 {
                best = (s, z);
            }
        }
        best.1
    }

    /// Plateau level of the profile: the mean of the values lying at ring
    /// distance greater than `w` from the collision bump. On a profile whose
    /// bump sits exactly at the ring boundary this equals the mean over
    /// `[w, L-1-w]`, but unlike that fixed window it is unaffected by where
    /// the waves happened to collide. `None` when no positions remain.
    pub fn plateau_value(&self) -> Option<f64> {
        let (l, w) = (self.values.len(), self.width);
        if l <= 2 * w + 1 {
            return None;
        }
        let center = self.bump_center();
        let kept: Vec<f64> = (0..l)
            .filter(|&z| {
                let d = (z + l - center) % l;
                d.min(l - d) > w
            })
            .map(|z| self.values[z])
            .collect();
        Some(kept.iter().sum::<f64>() / kept.len() as f64)
    }

    /// Rotate the ring so position `center` lands at index 0. Useful for
    /// aligning profiles whose seed window sits mid-ring before comparing
    /// their boundary decay.
    pub fn recentered(&self, center: usize) -> Result<DistortionProfile> {
        let l = self.values.len();
        if center >= l {
            return Err(Error::InvalidParameter(format!(
                "center {center} out of range for {l} positions"
            )));
        }
        let values = (0..l).map(|k| self.values[(center + k) % l]).collect();
        DistortionProfile::new(values, self.width)
    }

    /// Average each position with its mirror image around index 0, exploiting
    /// the ring symmetry of a profile already rotated by [`Self::recentered`].
    pub fn folded(&self) -> DistortionProfile {
        let l = self.values.len();
        let values = (0..l)
            .map(|k| 0.5 * (self.values[k] + self.values[(l - k) % l]))
            .collect();
        DistortionProfile {
            values,
            width: self.width,
        }
    }

    /// CSV rows `z,d_z` with a header line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("z,d_z\n");
        for (z, v) in self.values.iter().enumerate() {
            out.push_str(&format!("{z},{v:.8}\n"));
        }
        out
    }
}

/// Binary entropy in bits.
pub fn binary_entropy(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        return 0.0;
    }
    -(p * p.log2() + (1.0 - p) * (1.0 - p).log2())
}

/// Shannon distortion bound `D_sh(R)`: the unique `D ∈ [0, 1/2]` with
/// `h(D) = 1 - R`, found by bisection to 1e-10.
pub fn rd_bound(rate: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&rate) || !rate.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "rate must lie in [0, 1], got {rate}"
        )));
    }
    let target = 1.0 - rate;
    let (mut lo, mut hi) = (0.0f64, 0.5f64);
    while hi - lo > 1e-10 {
        let mid = 0.5 * (lo + hi);
        if binary_entropy(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Inverse temperature matched to a test channel with flip probability `p`:
/// `beta = ln((1-p)/p)`.
pub fn beta_from_bsc(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 0.5) {
        return Err(Error::InvalidParameter(format!(
            "flip probability must lie in (0, 1/2), got {p}"
        )));
    }
    Ok(((1.0 - p) / p).ln())
}
