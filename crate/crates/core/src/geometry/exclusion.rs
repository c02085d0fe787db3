//! Exclusion regions implied by maximum-average-power association.
//!
//! When the UE is served by a node at distance `x`, every competitor of a
//! different kind must deliver less mean power, which pushes it beyond a
//! minimum distance.

use crate::analytic::NetworkParams;
use crate::channel::LinkClass;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExclusionKind {
    /// Serving BS at horizontal distance `x`; minimum 3-D distance of a UAV of the given class.
    UavGivenBs(LinkClass),
    /// Serving UAV of the given class at distance `x`; minimum horizontal distance of any BS.
    BsGivenUav(LinkClass),
    /// Serving UAV of the given class at distance `x`; minimum distance of a UAV of the other class.
    OtherClassUav(LinkClass),
    /// Backhaul BS of the given class at horizontal distance `x`;
    /// minimum horizontal distance of a backhaul BS of the other class.
    Backhaul(LinkClass),
}

/// Exclusion distance for `kind` given serving distance `x`.
pub fn exclusion_region(kind: ExclusionKind, x: f64, p: &NetworkParams) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(Error::domain(format!("exclusion argument must be nonnegative, got {x}")));
    }
    Ok(exclusion_unchecked(kind, x, p))
}

#[inline]
pub(crate) fn exclusion_unchecked(kind: ExclusionKind, x: f64, p: &NetworkParams) -> f64 {
    let h_g = p.geometry.h_g;
    match kind {
        ExclusionKind::UavGivenBs(z) => {
            let eta = p.eta(z);
            (p.p_u / p.p_g).powf(1.0 / eta) * (x * x + h_g * h_g).powf(p.eta_g / (2.0 * eta))
        }
        ExclusionKind::BsGivenUav(z) => {
            let eta = p.eta(z);
            let radicand = (p.p_g / p.p_u).powf(2.0 / p.eta_g) * x.powf(2.0 * eta / p.eta_g) - h_g * h_g;
            radicand.max(0.0).sqrt()
        }
        ExclusionKind::OtherClassUav(z) => x.powf(p.eta(z) / p.eta(z.other())),
        ExclusionKind::Backhaul(xi) => {
            let other = xi.other();
            let dh = p.geometry.delta_h();
            let d2 = x * x + dh * dh;
            let radicand = (p.intercept(other) / p.intercept(xi)).powf(2.0 / p.eta(other))
                * d2.powf(p.eta(xi) / p.eta(other))
                - dh * dh;
            radicand.max(0.0).sqrt()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use LinkClass::{Los, Nlos};

    #[test]
    fn unit_fixed_point() {
        let p = NetworkParams::default();
        assert_eq!(exclusion_region(ExclusionKind::OtherClassUav(Los), 1.0, &p).unwrap(), 1.0);
        assert_eq!(exclusion_region(ExclusionKind::OtherClassUav(Nlos), 1.0, &p).unwrap(), 1.0);
    }

    #[test]
    fn los_uav_exclusion_at_zero() {
        let p = NetworkParams::default();
        let e = exclusion_region(ExclusionKind::UavGivenBs(Los), 0.0, &p).unwrap();
        // Equal mean powers: P_u z^{-2.5} = P_g (h_g²)^{-2}.
        let z = (p.p_u / (p.p_g * 625f64.powi(-2))).powf(1.0 / 2.5);
        assert_relative_eq!(e, z, max_relative = 1e-12);
        assert_relative_eq!(e, 52.03, epsilon = 5e-3);
    }

    #[test]
    fn bs_and_uav_maps_invert() {
        let p = NetworkParams::default();
        for z in LinkClass::BOTH {
            for x in [0.0, 10.0, 100.0, 1000.0, 4000.0] {
                let y = exclusion_unchecked(ExclusionKind::UavGivenBs(z), x, &p);
                let back = exclusion_unchecked(ExclusionKind::BsGivenUav(z), y, &p);
                assert_relative_eq!(back, x, max_relative = 1e-9, epsilon = 1e-6);
            }
        }
    }

    #[test]
    fn clamps_below_ground() {
        let p = NetworkParams::default();
        assert_eq!(exclusion_region(ExclusionKind::BsGivenUav(Los), 1.0, &p).unwrap(), 0.0);
        assert!(exclusion_region(ExclusionKind::BsGivenUav(Los), -1.0, &p).is_err());
    }

    #[test]
    fn backhaul_maps_equalize_path_loss() {
        let p = NetworkParams::default();
        let dh = p.geometry.delta_h();
        for x in [50.0, 300.0, 2000.0] {
            let e = exclusion_unchecked(ExclusionKind::Backhaul(Los), x, &p);
            if e > 0.0 {
                let los = p.c_l * (x * x + dh * dh).powf(-p.eta_l / 2.0);
                let nlos = p.c_n * (e * e + dh * dh).powf(-p.eta_n / 2.0);
                assert_relative_eq!(los, nlos, max_relative = 1e-9);
            }
        }
    }

    proptest::proptest! {
        #[test]
        fn maps_are_nondecreasing(x in 0.0f64..5000.0, dx in 1e-3f64..100.0) {
            let p = NetworkParams::default();
            for z in LinkClass::BOTH {
                for kind in [
                    ExclusionKind::UavGivenBs(z),
                    ExclusionKind::BsGivenUav(z),
                    ExclusionKind::OtherClassUav(z),
                    ExclusionKind::Backhaul(z),
                ] {
                    let lo = exclusion_unchecked(kind, x, &p);
                    let hi = exclusion_unchecked(kind, x + dx, &p);
                    proptest::prop_assert!(hi >= lo, "{kind:?} at {x}");
                }
            }
        }
    }
}
