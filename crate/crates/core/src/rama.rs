//! Secondary-structure distributions induced from backbone torsions.
//!
//! Each SS3 class is an isotropic Gaussian on the (φ, ψ) torus. Differences to
//! the centres are wrapped, so ψ = 175° and ψ = -175° are scored alike.

use crate::error::{Error, Result};
use crate::geometry::wrap_finite;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RamaConfig {
    /// Helix, strand and coil centres as (φ, ψ) in degrees.
    pub centers: [(f64, f64); 3],
    /// Kernel width in degrees.
    pub sigma: f64,
}

impl Default for RamaConfig {
    fn default() -> Self {
        Self {
            centers: [(-60.0, -45.0), (-120.0, 130.0), (0.0, 0.0)],
            sigma: 40.0,
        }
    }
}

impl RamaConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.sigma.is_finite() && self.sigma > 0.0) {
            return Err(Error::Config(format!(
                "kernel width must be positive, got {}",
                self.sigma
            )));
        }
        if self
            .centers
            .iter()
            .any(|(p, s)| !p.is_finite() || !s.is_finite())
        {
            return Err(Error::Config("kernel centres must be finite".into()));
        }
        Ok(())
    }
}

/// SS3 probabilities `(H, E, C)` for one residue, or `None` if either angle is
/// non-finite.
pub fn induce_ss3(phi_hat: f64, psi_hat: f64, cfg: &RamaConfig) -> Option<[f64; 3]> {
    if !phi_hat.is_finite() || !psi_hat.is_finite() {
        return None;
    }
    let two_var = 2.0 * cfg.sigma * cfg.sigma;
    let exponents = cfg.centers.map(|(phi_c, psi_c)| {
        let dphi = wrap_finite(phi_hat - phi_c.to_radians()).to_degrees();
        let dpsi = wrap_finite(psi_hat - psi_c.to_radians()).to_degrees();
        -(dphi * dphi + dpsi * dpsi) / two_var
    });
    // shift by the largest exponent so the normalizer never underflows
    let top = exponents.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let scores = exponents.map(|e| (e - top).exp());
    let z: f64 = scores.iter().sum();
    Some(scores.map(|s| s / z))
}

const HELIX_SPLIT: [f64; 3] = [0.8, 0.1, 0.1];
const STRAND_SPLIT: [f64; 2] = [0.9, 0.1];
const COIL_SPLIT: f64 = 1.0 / 3.0;

/// Split SS3 `(H, E, C)` into SS8 `[H, G, I, E, B, T, S, L]`.
pub fn expand_ss8(p3: [f64; 3]) -> Result<[f64; 8]> {
    let sum: f64 = p3.iter().sum();
    if !sum.is_finite() || (sum - 1.0).abs() > 1e-9 {
        return Err(Error::Validation(format!(
            "SS3 distribution sums to {sum}, expected 1"
        )));
    }
    Ok(expand_ss8_unchecked(p3))
}

pub(crate) fn expand_ss8_unchecked([h, e, c]: [f64; 3]) -> [f64; 8] {
    [
        h * HELIX_SPLIT[0],
        h * HELIX_SPLIT[1],
        h * HELIX_SPLIT[2],
        e * STRAND_SPLIT[0],
        e * STRAND_SPLIT[1],
        c * COIL_SPLIT,
        c * COIL_SPLIT,
        c * COIL_SPLIT,
    ]
}

/// Fold SS8 back onto SS3 via {H,G,I}→H, {E,B}→E, {T,S,L}→C.
pub fn marginalize_ss8(p8: [f64; 8]) -> [f64; 3] {
    [p8[0] + p8[1] + p8[2], p8[3] + p8[4], p8[5] + p8[6] + p8[7]]
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::f64::consts::{PI, TAU};

    fn rad(deg: f64) -> f64 {
        deg.to_radians()
    }

    #[test]
    fn helix_centre_values() {
        let p = induce_ss3(rad(-60.0), rad(-45.0), &RamaConfig::default()).unwrap();
        // kernels written out by hand: helix 1, strand exp(-(60²+175²)/3200),
        // coil exp(-(60²+45²)/3200)
        let strand = (-(60.0f64.powi(2) + 175.0f64.powi(2)) / 3200.0).exp();
        let coil = (-(60.0f64.powi(2) + 45.0f64.powi(2)) / 3200.0).exp();
        let z = 1.0 + strand + coil;
        assert_abs_diff_eq!(p[0], 1.0 / z, epsilon = 1e-12);
        assert_abs_diff_eq!(p[1], strand / z, epsilon = 1e-12);
        assert_abs_diff_eq!(p[2], coil / z, epsilon = 1e-12);
        assert_abs_diff_eq!(p[0], 0.8530, epsilon = 1e-4);
        assert_abs_diff_eq!(p[2], 0.1470, epsilon = 1e-4);
        assert!(p[1] < 1e-4 && p[1] > 0.0);
    }

    #[test]
    fn argmax_at_each_centre() {
        let cfg = RamaConfig::default();
        for (k, (phi, psi)) in cfg.centers.iter().enumerate() {
            let p = induce_ss3(rad(*phi), rad(*psi), &cfg).unwrap();
            let best = (0..3).max_by(|&a, &b| p[a].total_cmp(&p[b])).unwrap();
            assert_eq!(best, k);
        }
    }

    #[test]
    fn non_finite_is_masked() {
        assert!(induce_ss3(f64::NAN, 0.0, &RamaConfig::default()).is_none());
        assert!(induce_ss3(0.0, f64::INFINITY, &RamaConfig::default()).is_none());
    }

    #[test]
    fn wrapped_kernel_symmetry() {
        let cfg = RamaConfig::default();
        let a = induce_ss3(rad(-120.0), rad(175.0), &cfg).unwrap();
        let b = induce_ss3(rad(-120.0), rad(-175.0), &cfg).unwrap();
        // the strand centre sits at ψ = 130°, so +175° is closer than -175°
        assert!(a[1] > b[1]);
        // -175° is 55° away through the seam, not 305°
        assert!(b[1] > 0.01);
    }

    #[test]
    fn expand_examples() {
        assert_eq!(
            expand_ss8([1.0, 0.0, 0.0]).unwrap(),
            [0.8, 0.1, 0.1, 0.0, 0.0, 0.0, 0.0, 0.0]
        );
        assert_eq!(
            expand_ss8([0.0, 1.0, 0.0]).unwrap(),
            [0.0, 0.0, 0.0, 0.9, 0.1, 0.0, 0.0, 0.0]
        );
        let t = 1.0 / 3.0;
        assert_eq!(
            expand_ss8([0.0, 0.0, 1.0]).unwrap(),
            [0.0, 0.0, 0.0, 0.0, 0.0, t, t, t]
        );
        assert!(matches!(
            expand_ss8([0.5, 0.5, 0.5]),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn config_validation() {
        let mut cfg = RamaConfig::default();
        assert!(cfg.validate().is_ok());
        cfg.sigma = 0.0;
        assert!(cfg.validate().is_err());
    }

    proptest! {
        #[test]
        fn induced_is_positive_normalized_periodic(phi in -PI..PI, psi in -PI..PI) {
            let cfg = RamaConfig::default();
            let p = induce_ss3(phi, psi, &cfg).unwrap();
            prop_assert!(p.iter().all(|&v| v > 0.0));
            prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            let q = induce_ss3(phi + TAU, psi, &cfg).unwrap();
            for (a, b) in p.iter().zip(q) {
                prop_assert!((a - b).abs() < 1e-9);
            }
        }

        #[test]
        fn expand_preserves_mass_and_marginals(a in 0.0..1.0f64, b in 0.0..1.0f64) {
            let total = a + b + 1e-3;
            let p3 = [a / total, b / total, 1e-3 / total];
            let p8 = expand_ss8(p3).unwrap();
            prop_assert!((p8.iter().sum::<f64>() - p3.iter().sum::<f64>()).abs() < 1e-12);
            let back = marginalize_ss8(p8);
            for (x, y) in back.iter().zip(p3) {
                prop_assert!((x - y).abs() < 1e-12);
            }
        }
    }
}
