//! Layered-video quality model.
//!
//! A device's stream is encoded into cumulative SVC layers; decoding the
//! first `l` layers requires rate `R_l` and yields PSNR `Q_l`. Received
//! quality as a function of rate is therefore a right-continuous staircase:
//! crossing a layer's rate threshold (inclusively) unlocks that layer's full
//! PSNR, and anything below the base layer is worth zero.

use crate::error::{Error, Result};
use crate::noma::min_sinr_from_rate;
use serde::{Deserialize, Serialize};

/// One cumulative SVC layer: the rate needed to decode through this layer
/// and the PSNR obtained when it is decoded.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SvcLayer {
    pub rate_bps: f64,
    pub psnr_db: f64,
}

/// A device's layer table, ordered base layer first.
///
/// Rates and PSNRs are strictly increasing across layers; the base-layer
/// rate is the device's minimum service requirement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TableRepr")]
pub struct SvcLayerTable {
    layers: Vec<SvcLayer>,
}

#[derive(Deserialize)]
struct TableRepr {
    layers: Vec<SvcLayer>,
}

impl TryFrom<TableRepr> for SvcLayerTable {
    type Error = Error;
    fn try_from(repr: TableRepr) -> Result<Self> {
        SvcLayerTable::new(repr.layers)
    }
}

impl SvcLayerTable {
    pub fn new(layers: Vec<SvcLayer>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::InvalidTable {
                device: None,
                layer: 0,
                reason: "a table needs at least one layer".into(),
            });
        }
        for (l, layer) in layers.iter().enumerate() {
            if !layer.rate_bps.is_finite() || !layer.psnr_db.is_finite() {
                return Err(Error::InvalidTable {
                    device: None,
                    layer: l,
                    reason: format!(
                        "non-finite entry (rate {} bps, psnr {} dB)",
                        layer.rate_bps, layer.psnr_db
                    ),
                });
            }
            if layer.rate_bps < 0.0 {
                return Err(Error::InvalidTable {
                    device: None,
                    layer: l,
                    reason: format!("negative rate {} bps", layer.rate_bps),
                });
            }
            if l > 0 {
                let prev = &layers[l - 1];
                if layer.rate_bps <= prev.rate_bps {
                    return Err(Error::InvalidTable {
                        device: None,
                        layer: l,
                        reason: format!(
                            "rates must be strictly increasing ({} bps after {} bps)",
                            layer.rate_bps, prev.rate_bps
                        ),
                    });
                }
                if layer.psnr_db <= prev.psnr_db {
                    return Err(Error::InvalidTable {
                        device: None,
                        layer: l,
                        reason: format!(
                            "PSNR must be strictly increasing ({} dB after {} dB)",
                            layer.psnr_db, prev.psnr_db
                        ),
                    });
                }
            }
        }
        Ok(Self { layers })
    }

    pub fn layers(&self) -> &[SvcLayer] {
        &self.layers
    }

    pub fn num_layers(&self) -> usize {
        self.layers.len()
    }

    /// Rate required to decode through the base layer.
    pub fn base_rate_bps(&self) -> f64 {
        self.layers[0].rate_bps
    }
}

/// A raster of luminance intensities in `[0, 255]`, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    width: usize,
    height: usize,
    pixels: Vec<f64>,
}

impl Frame {
    pub fn new(width: usize, height: usize, pixels: Vec<f64>) -> Result<Self> {
        if pixels.len() != width * height {
            return Err(Error::Dimension {
                expected: width * height,
                got: pixels.len(),
            });
        }
        if let Some(bad) = pixels
            .iter()
            .find(|v| !v.is_finite() || **v < 0.0 || **v > 255.0)
        {
            return Err(Error::Domain(format!(
                "pixel intensity {bad} outside [0, 255]"
            )));
        }
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    pub fn pixels(&self) -> &[f64] {
        &self.pixels
    }
}

/// Mean squared error between two equally sized frames.
pub fn mse_between_frames(a: &Frame, b: &Frame) -> Result<f64> {
    if a.width != b.width || a.height != b.height {
        return Err(Error::Dimension {
            expected: a.pixels.len(),
            got: b.pixels.len(),
        });
    }
    let n = a.pixels.len() as f64;
    let sum: f64 = a
        .pixels
        .iter()
        .zip(&b.pixels)
        .map(|(x, y)| (x - y) * (x - y))
        .sum();
    Ok(sum / n)
}

/// PSNR in dB for 8-bit content; an exact reconstruction (MSE 0) is +∞.
pub fn psnr_from_mse(mse: f64) -> Result<f64> {
    if !(mse >= 0.0) {
        return Err(Error::Domain(format!("MSE must be nonnegative, got {mse}")));
    }
    if mse == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(10.0 * (255.0 * 255.0 / mse).log10())
}

/// Per-layer PSNR increments `q_l = Q_l − Q_{l−1}` with `Q_0 = 0`.
pub fn layer_increments(table: &SvcLayerTable) -> Vec<f64> {
    let mut prev = 0.0;
    table
        .layers
        .iter()
        .map(|layer| {
            let q = layer.psnr_db - prev;
            prev = layer.psnr_db;
            q
        })
        .collect()
}

/// Quality delivered at a given rate: the PSNR of the deepest layer whose
/// rate requirement is met (threshold inclusive), or 0 below the base layer.
pub fn qos_of_rate(rate_bps: f64, table: &SvcLayerTable) -> f64 {
    let mut q = 0.0;
    for layer in &table.layers {
        if rate_bps >= layer.rate_bps {
            q = layer.psnr_db;
        } else {
            break;
        }
    }
    q
}

/// Average quality across devices at SINR vector `y`, under per-device
/// tables and a common bandwidth.
pub fn average_qos(y: &[f64], tables: &[SvcLayerTable], bandwidth_hz: f64) -> Result<f64> {
    if y.len() != tables.len() {
        return Err(Error::Dimension {
            expected: tables.len(),
            got: y.len(),
        });
    }
    if y.is_empty() {
        return Err(Error::Domain("average QoS over zero devices".into()));
    }
    let sum: f64 = y
        .iter()
        .zip(tables)
        .map(|(&yi, table)| qos_of_rate(bandwidth_hz * (1.0 + yi).log2(), table))
        .sum();
    Ok(sum / y.len() as f64)
}

/// A layer table re-expressed in SINR space for a fixed bandwidth.
///
/// Thresholds are the exact SINRs at which each layer's rate is reached, so
/// evaluating quality directly on SINR avoids the rate round trip and agrees
/// bitwise with table lookups at the thresholds themselves.
#[derive(Debug, Clone)]
pub struct SinrStaircase {
    thresholds: Vec<f64>,
    values: Vec<f64>,
}

impl SinrStaircase {
    pub fn new(table: &SvcLayerTable, bandwidth_hz: f64) -> Result<Self> {
        let thresholds = table
            .layers
            .iter()
            .map(|layer| min_sinr_from_rate(layer.rate_bps, bandwidth_hz))
            .collect::<Result<Vec<_>>>()?;
        let values = table.layers.iter().map(|layer| layer.psnr_db).collect();
        Ok(Self { thresholds, values })
    }

    /// SINR at which the base layer becomes decodable.
    pub fn base_threshold(&self) -> f64 {
        self.thresholds[0]
    }

    pub fn thresholds(&self) -> &[f64] {
        &self.thresholds
    }

    pub fn qos_at_sinr(&self, sinr: f64) -> f64 {
        let mut q = 0.0;
        for (threshold, value) in self.thresholds.iter().zip(&self.values) {
            if sinr >= *threshold {
                q = *value;
            } else {
                break;
            }
        }
        q
    }
}

/// Builds a synthetic table with geometrically spaced rates (ratio 2 from
/// `base_rate_bps`) and PSNR following `a + b·log10(1 + c·R)`.
pub fn synth_table(
    a: f64,
    b: f64,
    c: f64,
    base_rate_bps: f64,
    num_layers: usize,
) -> Result<SvcLayerTable> {
    if b == 0.0 {
        return Err(Error::Domain(
            "synthetic PSNR curve needs a nonzero slope".into(),
        ));
    }
    if num_layers == 0 {
        return Err(Error::Domain("a table needs at least one layer".into()));
    }
    let layers = (0..num_layers)
        .map(|l| {
            let rate_bps = base_rate_bps * 2f64.powi(l as i32);
            SvcLayer {
                rate_bps,
                psnr_db: a + b * (1.0 + c * rate_bps).log10(),
            }
        })
        .collect();
    SvcLayerTable::new(layers)
}
