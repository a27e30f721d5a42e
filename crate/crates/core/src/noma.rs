//! Uplink NOMA signal model.
//!
//! Devices are indexed in decode order: the base station applies successive
//! interference cancellation in descending channel-gain order, so device `i`
//! is decoded against the residual interference of devices `i+1..M` plus
//! noise. The SINR map is triangular in that order, which makes it exactly
//! invertible by back-substitution — the inverse is the workhorse for
//! testing feasibility of a SINR target without any iterative solving.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// One uplink device, described by its link gain and its constraints.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Device {
    /// Linear channel power gain |h|².
    pub gain_sq: f64,
    /// Transmit power cap in mW.
    pub p_max_mw: f64,
    /// Energy-efficiency floor in bit/s per mW (0 disables the floor).
    pub ee_min_bps_per_mw: f64,
}

/// A cell instance: devices in decode order plus the shared radio constants.
///
/// Construction sorts devices by descending gain and breaks exact gain ties
/// by nudging the later device down one ULP, so decode order is total and
/// deterministic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UplinkScenario {
    devices: Vec<Device>,
    noise_mw: f64,
    bandwidth_hz: f64,
}

impl UplinkScenario {
    pub fn new(mut devices: Vec<Device>, noise_mw: f64, bandwidth_hz: f64) -> Result<Self> {
        if devices.is_empty() {
            return Err(Error::InvalidScenario("no devices".into()));
        }
        if !(noise_mw > 0.0) || !noise_mw.is_finite() {
            return Err(Error::InvalidScenario(format!(
                "noise power must be positive, got {noise_mw} mW"
            )));
        }
        if !(bandwidth_hz > 0.0) || !bandwidth_hz.is_finite() {
            return Err(Error::InvalidScenario(format!(
                "bandwidth must be positive, got {bandwidth_hz} Hz"
            )));
        }
        for (i, d) in devices.iter().enumerate() {
            if !(d.gain_sq > 0.0) || !d.gain_sq.is_finite() {
                return Err(Error::InvalidScenario(format!(
                    "device {i}: gain_sq must be positive, got {}",
                    d.gain_sq
                )));
            }
            if !(d.p_max_mw > 0.0) || !d.p_max_mw.is_finite() {
                return Err(Error::InvalidScenario(format!(
                    "device {i}: p_max must be positive, got {} mW",
                    d.p_max_mw
                )));
            }
            if !(d.ee_min_bps_per_mw >= 0.0) || !d.ee_min_bps_per_mw.is_finite() {
                return Err(Error::InvalidScenario(format!(
                    "device {i}: EE floor must be nonnegative, got {}",
                    d.ee_min_bps_per_mw
                )));
            }
        }
        devices.sort_by(|a, b| b.gain_sq.total_cmp(&a.gain_sq));
        for i in 1..devices.len() {
            if devices[i].gain_sq >= devices[i - 1].gain_sq {
                devices[i].gain_sq = next_down(devices[i - 1].gain_sq);
            }
        }
        Ok(Self {
            devices,
            noise_mw,
            bandwidth_hz,
        })
    }

    pub fn devices(&self) -> &[Device] {
        &self.devices
    }

    pub fn num_devices(&self) -> usize {
        self.devices.len()
    }

    pub fn noise_mw(&self) -> f64 {
        self.noise_mw
    }

    pub fn bandwidth_hz(&self) -> f64 {
        self.bandwidth_hz
    }
}

fn next_down(x: f64) -> f64 {
    // f64::next_down is unstable on older toolchains; bit-decrement a
    // positive finite value instead.
    debug_assert!(x > 0.0 && x.is_finite());
    f64::from_bits(x.to_bits() - 1)
}

/// Per-device SINR under SIC for a transmit power vector.
pub fn sinr_vector(powers_mw: &[f64], scenario: &UplinkScenario) -> Result<Vec<f64>> {
    let devices = scenario.devices();
    if powers_mw.len() != devices.len() {
        return Err(Error::Dimension {
            expected: devices.len(),
            got: powers_mw.len(),
        });
    }
    for (i, &p) in powers_mw.iter().enumerate() {
        if !(p >= 0.0) || !p.is_finite() {
            return Err(Error::Domain(format!(
                "device {i}: power must be nonnegative, got {p} mW"
            )));
        }
    }
    let mut sinr = vec![0.0; devices.len()];
    let mut interference = scenario.noise_mw();
    for i in (0..devices.len()).rev() {
        let received = devices[i].gain_sq * powers_mw[i];
        sinr[i] = received / interference;
        interference += received;
    }
    Ok(sinr)
}

/// Shannon rate in bit/s at a given SINR.
pub fn rate_bps(sinr: f64, bandwidth_hz: f64) -> Result<f64> {
    if !(sinr >= 0.0) {
        return Err(Error::Domain(format!(
            "rate is undefined for negative SINR {sinr}"
        )));
    }
    Ok(bandwidth_hz * (1.0 + sinr).log2())
}

/// Bits delivered per mW spent; transmitting nothing costs nothing, so zero
/// power is +∞ by convention.
pub fn energy_efficiency(rate_bps: f64, power_mw: f64) -> Result<f64> {
    if !(power_mw >= 0.0) {
        return Err(Error::Domain(format!(
            "power must be nonnegative, got {power_mw} mW"
        )));
    }
    if power_mw == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(rate_bps / power_mw)
}

/// Smallest SINR delivering a target rate: `2^(R/B) − 1`.
pub fn min_sinr_from_rate(rate_bps: f64, bandwidth_hz: f64) -> Result<f64> {
    if !(rate_bps >= 0.0) {
        return Err(Error::Domain(format!(
            "target rate must be nonnegative, got {rate_bps} bit/s"
        )));
    }
    if !(bandwidth_hz > 0.0) {
        return Err(Error::Domain(format!(
            "bandwidth must be positive, got {bandwidth_hz} Hz"
        )));
    }
    Ok((rate_bps / bandwidth_hz).exp2() - 1.0)
}

/// Exact inverse of [`sinr_vector`]: the unique power vector realizing a
/// SINR target, found by back-substitution from the last-decoded device up.
pub fn powers_from_sinr(sinr: &[f64], scenario: &UplinkScenario) -> Result<Vec<f64>> {
    let devices = scenario.devices();
    if sinr.len() != devices.len() {
        return Err(Error::Dimension {
            expected: devices.len(),
            got: sinr.len(),
        });
    }
    for (i, &y) in sinr.iter().enumerate() {
        if !(y >= 0.0) || !y.is_finite() {
            return Err(Error::Domain(format!(
                "device {i}: SINR target must be nonnegative, got {y}"
            )));
        }
    }
    let mut powers = vec![0.0; devices.len()];
    let mut interference = scenario.noise_mw();
    for i in (0..devices.len()).rev() {
        powers[i] = sinr[i] * interference / devices[i].gain_sq;
        interference += devices[i].gain_sq * powers[i];
    }
    Ok(powers)
}

/// Membership in the normal (downward-closed) constraint set G: the SINR
/// target's unique power preimage must respect every cap and EE floor.
///
/// Vectors with negative or non-finite components are simply outside G.
pub fn is_in_g(sinr: &[f64], scenario: &UplinkScenario) -> bool {
    if sinr.len() != scenario.num_devices() {
        return false;
    }
    if sinr.iter().any(|y| !(*y >= 0.0) || !y.is_finite()) {
        return false;
    }
    let powers = match powers_from_sinr(sinr, scenario) {
        Ok(p) => p,
        Err(_) => return false,
    };
    for ((device, &p), &y) in scenario.devices().iter().zip(&powers).zip(sinr) {
        if p > device.p_max_mw {
            return false;
        }
        if p > 0.0 && device.ee_min_bps_per_mw > 0.0 {
            let rate = scenario.bandwidth_hz() * (1.0 + y).log2();
            if rate / p < device.ee_min_bps_per_mw {
                return false;
            }
        }
    }
    true
}

/// Membership in the conormal (upward-closed) requirement set H: every
/// component at or above its lower bound.
pub fn is_in_h(sinr: &[f64], lower_bounds: &[f64]) -> bool {
    sinr.len() == lower_bounds.len() && sinr.iter().zip(lower_bounds).all(|(y, b)| y >= b)
}

/// Componentwise SINR cap of G: what each device reaches at full power with
/// noise-only interference. The box `[0, cap]` encloses all of G.
pub fn sinr_cap(scenario: &UplinkScenario) -> Vec<f64> {
    scenario
        .devices()
        .iter()
        .map(|d| d.gain_sq * d.p_max_mw / scenario.noise_mw())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn scenario(gains: &[f64], p_max: f64, ee_min: f64, noise: f64) -> UplinkScenario {
        let devices = gains
            .iter()
            .map(|&gain_sq| Device {
                gain_sq,
                p_max_mw: p_max,
                ee_min_bps_per_mw: ee_min,
            })
            .collect();
        UplinkScenario::new(devices, noise, 180_000.0).unwrap()
    }

    fn random_scenario(rng: &mut ChaCha8Rng, m: usize) -> UplinkScenario {
        let gains: Vec<f64> = (0..m).map(|_| 10f64.powf(rng.gen_range(-14.0..-11.0))).collect();
        scenario(
            &gains,
            rng.gen_range(10.0..1000.0),
            0.0,
            10f64.powf(rng.gen_range(-13.0..-12.0)),
        )
    }

    #[test]
    fn single_device_sinr() {
        let s = scenario(&[2.0], 100.0, 0.0, 1.0);
        assert_abs_diff_eq!(sinr_vector(&[3.0], &s).unwrap()[0], 6.0, epsilon = 1e-15);
    }

    #[test]
    fn two_device_sinr_with_sic() {
        let s = scenario(&[4.0, 1.0], 100.0, 0.0, 1.0);
        let y = sinr_vector(&[1.0, 2.0], &s).unwrap();
        assert_relative_eq!(y[0], 4.0 / 3.0, max_relative = 1e-15);
        assert_relative_eq!(y[1], 2.0, max_relative = 1e-15);
    }

    #[test]
    fn zero_powers_give_zero_sinr() {
        let s = scenario(&[4.0, 1.0], 100.0, 0.0, 1.0);
        assert_eq!(sinr_vector(&[0.0, 0.0], &s).unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn sinr_rejects_bad_input() {
        let s = scenario(&[4.0, 1.0], 100.0, 0.0, 1.0);
        assert!(sinr_vector(&[1.0], &s).is_err());
        assert!(sinr_vector(&[1.0, -0.5], &s).is_err());
    }

    #[test]
    fn rate_reference_points() {
        assert_eq!(rate_bps(0.0, 180e3).unwrap(), 0.0);
        assert_relative_eq!(rate_bps(1.0, 180e3).unwrap(), 180e3, max_relative = 1e-15);
        assert_relative_eq!(rate_bps(3.0, 180e3).unwrap(), 360e3, max_relative = 1e-15);
        assert!(rate_bps(-0.1, 180e3).is_err());
    }

    #[test]
    fn energy_efficiency_reference_points() {
        assert_eq!(energy_efficiency(1000.0, 2.0).unwrap(), 500.0);
        assert_eq!(energy_efficiency(1000.0, 0.0).unwrap(), f64::INFINITY);
        assert!(energy_efficiency(1000.0, -1.0).is_err());
    }

    #[test]
    fn min_sinr_inverts_rate() {
        assert_eq!(min_sinr_from_rate(0.0, 180e3).unwrap(), 0.0);
        assert_relative_eq!(min_sinr_from_rate(180e3, 180e3).unwrap(), 1.0, max_relative = 1e-15);
        assert_relative_eq!(min_sinr_from_rate(360e3, 180e3).unwrap(), 3.0, max_relative = 1e-15);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..500 {
            let r = rng.gen_range(0.0..2e6);
            let y = min_sinr_from_rate(r, 180e3).unwrap();
            assert_relative_eq!(rate_bps(y, 180e3).unwrap(), r, max_relative = 1e-12);
        }
        assert!(min_sinr_from_rate(-1.0, 180e3).is_err());
    }

    #[test]
    fn back_substitution_matches_hand_computed_powers() {
        let s = scenario(&[2.0], 100.0, 0.0, 1.0);
        assert_relative_eq!(
            powers_from_sinr(&[6.0], &s).unwrap()[0],
            3.0,
            max_relative = 1e-15
        );

        let s = scenario(&[4.0, 1.0], 100.0, 0.0, 1.0);
        let p = powers_from_sinr(&[4.0 / 3.0, 2.0], &s).unwrap();
        assert_relative_eq!(p[0], 1.0, max_relative = 1e-12);
        assert_relative_eq!(p[1], 2.0, max_relative = 1e-12);
    }

    #[test]
    fn sinr_power_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..300 {
            let m = rng.gen_range(1..=6);
            let s = random_scenario(&mut rng, m);
            let y: Vec<f64> = (0..m).map(|_| rng.gen_range(0.0..50.0)).collect();
            let p = powers_from_sinr(&y, &s).unwrap();
            let back = sinr_vector(&p, &s).unwrap();
            for (a, b) in y.iter().zip(&back) {
                assert_relative_eq!(a, b, max_relative = 1e-9);
            }
        }
    }

    #[test]
    fn powers_grow_with_any_sinr_target() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        for _ in 0..300 {
            let m = rng.gen_range(2..=5);
            let s = random_scenario(&mut rng, m);
            let y: Vec<f64> = (0..m).map(|_| rng.gen_range(0.0..20.0)).collect();
            let p = powers_from_sinr(&y, &s).unwrap();
            let mut bumped = y.clone();
            let j = rng.gen_range(0..m);
            bumped[j] += rng.gen_range(0.1..5.0);
            let p_bumped = powers_from_sinr(&bumped, &s).unwrap();
            for (a, b) in p.iter().zip(&p_bumped) {
                assert!(b >= a);
            }
        }
    }

    #[test]
    fn g_membership_flips_exactly_at_the_power_cap() {
        let s = scenario(&[3e-13, 1e-13], 200.0, 0.0, 7e-13);
        assert!(is_in_g(&[0.0, 0.0], &s));

        let y = vec![5.0, 3.0];
        assert!(is_in_g(&y, &s));
        // Scale until membership flips, then bracket the flip tightly and
        // confirm it coincides with a power crossing its cap.
        let mut lo = 1.0;
        let mut hi = 1.0;
        while is_in_g(&scale(&y, hi), &s) {
            hi *= 2.0;
        }
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if is_in_g(&scale(&y, mid), &s) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let p_lo = powers_from_sinr(&scale(&y, lo), &s).unwrap();
        let p_hi = powers_from_sinr(&scale(&y, hi), &s).unwrap();
        let caps: Vec<f64> = s.devices().iter().map(|d| d.p_max_mw).collect();
        assert!(p_lo.iter().zip(&caps).all(|(p, c)| p <= c));
        assert!(p_hi.iter().zip(&caps).any(|(p, c)| p > c));
    }

    #[test]
    fn g_is_downward_closed() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let mut checked = 0;
        while checked < 200 {
            let m = rng.gen_range(1..=5);
            let mut s = random_scenario(&mut rng, m);
            if rng.gen_bool(0.5) {
                // Re-add EE floors on a fraction of cases.
                let devices = s
                    .devices()
                    .iter()
                    .map(|d| Device {
                        ee_min_bps_per_mw: rng.gen_range(0.0..2000.0),
                        ..*d
                    })
                    .collect();
                s = UplinkScenario::new(devices, s.noise_mw(), s.bandwidth_hz()).unwrap();
            }
            let cap = sinr_cap(&s);
            let y: Vec<f64> = cap.iter().map(|c| rng.gen_range(0.0..*c)).collect();
            if !is_in_g(&y, &s) {
                continue;
            }
            let smaller: Vec<f64> = y.iter().map(|v| v * rng.gen_range(0.0..1.0)).collect();
            assert!(is_in_g(&smaller, &s));
            checked += 1;
        }
    }

    #[test]
    fn h_is_upward_closed() {
        let bounds = [1.0, 0.5, 2.0];
        assert!(is_in_h(&[1.0, 0.5, 2.0], &bounds));
        assert!(is_in_h(&[5.0, 1.0, 2.5], &bounds));
        assert!(!is_in_h(&[0.99, 1.0, 2.5], &bounds));
        assert!(!is_in_h(&[1.0, 0.5], &bounds));
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..200 {
            let y: Vec<f64> = bounds.iter().map(|b| b + rng.gen_range(0.0..3.0)).collect();
            let bigger: Vec<f64> = y.iter().map(|v| v + rng.gen_range(0.0..3.0)).collect();
            assert!(is_in_h(&y, &bounds) && is_in_h(&bigger, &bounds));
        }
    }

    #[test]
    fn sinr_cap_encloses_g() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        for _ in 0..50 {
            let m = rng.gen_range(1..=4);
            let s = random_scenario(&mut rng, m);
            let cap = sinr_cap(&s);
            for (d, c) in s.devices().iter().zip(&cap) {
                assert_relative_eq!(
                    c,
                    &(d.gain_sq * d.p_max_mw / s.noise_mw()),
                    max_relative = 1e-15
                );
            }
            let mut found = 0;
            while found < 20 {
                let y: Vec<f64> = cap.iter().map(|c| rng.gen_range(0.0..2.0 * c)).collect();
                if is_in_g(&y, &s) {
                    assert!(y.iter().zip(&cap).all(|(a, b)| a <= b));
                    found += 1;
                }
            }
        }
    }

    #[test]
    fn scenario_sorts_and_breaks_gain_ties() {
        let d = |gain_sq| Device {
            gain_sq,
            p_max_mw: 100.0,
            ee_min_bps_per_mw: 0.0,
        };
        let s = UplinkScenario::new(vec![d(1e-13), d(5e-13), d(5e-13), d(5e-13)], 7e-13, 180e3)
            .unwrap();
        let gains: Vec<f64> = s.devices().iter().map(|x| x.gain_sq).collect();
        for w in gains.windows(2) {
            assert!(w[0] > w[1]);
        }
        assert_relative_eq!(gains[0], 5e-13, max_relative = 1e-12);
        assert_relative_eq!(gains[2], 5e-13, max_relative = 1e-12);
        assert_eq!(gains[3], 1e-13);
    }

    #[test]
    fn scenario_rejects_bad_parameters() {
        let d = Device {
            gain_sq: 1e-13,
            p_max_mw: 100.0,
            ee_min_bps_per_mw: 0.0,
        };
        assert!(UplinkScenario::new(vec![], 7e-13, 180e3).is_err());
        assert!(UplinkScenario::new(vec![d], 0.0, 180e3).is_err());
        assert!(UplinkScenario::new(vec![d], 7e-13, 0.0).is_err());
        assert!(UplinkScenario::new(
            vec![Device {
                gain_sq: 0.0,
                ..d
            }],
            7e-13,
            180e3
        )
        .is_err());
        assert!(UplinkScenario::new(
            vec![Device {
                p_max_mw: -1.0,
                ..d
            }],
            7e-13,
            180e3
        )
        .is_err());
        assert!(UplinkScenario::new(
            vec![Device {
                ee_min_bps_per_mw: -1.0,
                ..d
            }],
            7e-13,
            180e3
        )
        .is_err());
    }

    fn scale(y: &[f64], s: f64) -> Vec<f64> {
        y.iter().map(|v| v * s).collect()
    }
}
