//! Urban-macro channel model: log-distance path loss, Rayleigh fading, and
//! thermal noise, with dBm/mW unit helpers.
//!
//! All powers are linear milliwatts inside the library; dBm appears only at
//! configuration boundaries.

use crate::error::{Error, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};

/// Cell-wide radio parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelParams {
    /// Per-device bandwidth in Hz.
    pub bandwidth_hz: f64,
    /// Noise power spectral density in dBm/Hz.
    pub noise_psd_dbm_per_hz: f64,
    /// When false, small-scale fading is skipped and gains are pure path loss.
    pub fading: bool,
}

impl Default for ChannelParams {
    fn default() -> Self {
        Self {
            bandwidth_hz: 180_000.0,
            noise_psd_dbm_per_hz: -174.0,
            fading: true,
        }
    }
}

/// One device's sampled link state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelRealization {
    pub distance_km: f64,
    pub path_loss_db: f64,
    /// Linear channel power gain |h|² (path loss times fading power).
    pub gain_sq: f64,
}

/// Log-distance path loss in dB for a BS–device distance in km.
pub fn path_loss_db(distance_km: f64) -> Result<f64> {
    if !(distance_km > 0.0) || !distance_km.is_finite() {
        return Err(Error::Domain(format!(
            "path loss needs a positive finite distance, got {distance_km} km"
        )));
    }
    Ok(128.1 + 37.6 * distance_km.log10())
}

/// Thermal noise power in mW over the configured bandwidth.
pub fn noise_power_mw(params: &ChannelParams) -> f64 {
    dbm_to_mw(params.noise_psd_dbm_per_hz) * params.bandwidth_hz
}

pub fn dbm_to_mw(dbm: f64) -> f64 {
    10f64.powf(dbm / 10.0)
}

/// Inverse of [`dbm_to_mw`]; power must be strictly positive.
pub fn mw_to_dbm(mw: f64) -> Result<f64> {
    if !(mw > 0.0) {
        return Err(Error::Domain(format!(
            "dBm is undefined for non-positive power {mw} mW"
        )));
    }
    Ok(10.0 * mw.log10())
}

/// Samples one channel realization per distance.
///
/// Pure function of its arguments: the same seed, distances, and params
/// always produce bitwise-identical gains. Fading power |β|² is unit-mean
/// exponential (Rayleigh amplitude); with `params.fading == false` the gain
/// is deterministic path loss alone.
pub fn sample_channels(
    seed: u64,
    distances_km: &[f64],
    params: &ChannelParams,
) -> Result<Vec<ChannelRealization>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(distances_km.len());
    for &d in distances_km {
        let loss_db = path_loss_db(d)?;
        let fading_power: f64 = if params.fading {
            Exp1.sample(&mut rng)
        } else {
            1.0
        };
        out.push(ChannelRealization {
            distance_km: d,
            path_loss_db: loss_db,
            gain_sq: dbm_to_mw(-loss_db) * fading_power,
        });
    }
    Ok(out)
}
