use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::C64;

use super::element::DiskElement;
use super::poly::Poly;

/// `Phi = ((1 + q)/2)^m` with `q(z) = (1 + z conj(zeta0))/2`, so
/// `Phi(z) = ((3 + z conj(zeta0))/4)^m`. It equals one at `zeta0` and has
/// modulus below one elsewhere on the closed disk.
///
/// ```
/// use stablerank::disk::peak_function;
/// use stablerank::C64;
/// let phi = peak_function(C64::new(1.0, 0.0), 2).unwrap();
/// assert_eq!(phi.eval(C64::new(1.0, 0.0)), C64::new(1.0, 0.0));
/// assert_eq!(phi.eval(C64::new(-1.0, 0.0)), C64::new(0.25, 0.0));
/// ```
pub fn peak_function(zeta0: C64, m: u32) -> Result<DiskElement> {
    if m < 2 {
        return Err(Error::InvalidParameter(format!("peak exponent must be at least 2, got {m}")));
    }
    let r = zeta0.norm();
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::InvalidParameter("peak point must be nonzero".into()));
    }
    let zeta = zeta0 / r;
    let base = Poly::new(vec![C64::new(0.75, 0.0), zeta.conj() * 0.25]);
    Ok(DiskElement::polynomial(base).pow(m))
}

/// Bound of `|Phi|` off the disk of radius `rho` about the peak point.
///
/// With `w = z conj(zeta0)`, `|w| <= 1` and `|w - 1| >= rho` force
/// `Re w <= 1 - rho^2/2`, hence `|3 + w|^2 <= 10 + 6 Re w <= 16 - 3 rho^2`.
pub fn peak_off_region_bound(rho: f64, m: u32) -> f64 {
    let rho = rho.clamp(0.0, 2.0);
    (1.0 - 3.0 * rho * rho / 16.0).powf(m as f64 / 2.0)
}

/// Smallest exponent in `2, 4, 8, ..` with `|Phi| <= 1/2` off the disk of
/// radius `rho` about the peak point.
pub fn peak_exponent(rho: f64) -> Result<u32> {
    if !(rho > 0.0) {
        return Err(Error::InvalidParameter(format!("peak region radius must be positive, got {rho}")));
    }
    let mut m = 2u32;
    while peak_off_region_bound(rho, m) > 0.5 {
        m = m.checked_mul(2).ok_or_else(|| Error::Budget("peak exponent overflow".into()))?;
    }
    Ok(m)
}

/// Parameters of the disk automorphism `L_a(z) = (z - a)/(1 - a z)`, which
/// fixes `1` and `-1`, vanishes at `a`, and maps `{|z - 1| >= eta}` into
/// `{|w + 1| < eps}` when `a = 1 - eps*eta/8`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MobiusParams {
    pub eta: f64,
    pub epsilon: f64,
    pub a: f64,
}

impl MobiusParams {
    pub fn apply(&self, z: C64) -> C64 {
        mobius(self.a, z)
    }
}

/// `a = 1 - eps*eta/8`.
///
/// On `|z - 1| >= eta` one has `|1 - a z| >= eta - (1 - a)`, so
/// `|L_a(z) + 1| = (1 - a)|1 + z|/|1 - a z| <= 2(1-a)/(eta - (1-a))`, which
/// equals `(eps/4)/(1 - eps/8) < eps`.
///
/// ```
/// use stablerank::disk::mobius_param;
/// let p = mobius_param(0.5, 0.1).unwrap();
/// assert!((p.a - 0.99375).abs() < 1e-15);
/// ```
pub fn mobius_param(eta: f64, epsilon: f64) -> Result<MobiusParams> {
    if !(eta > 0.0 && eta < 1.0) || !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidParameter(format!("need 0 < eta, eps < 1, got eta = {eta}, eps = {epsilon}")));
    }
    Ok(MobiusParams { eta, epsilon, a: 1.0 - epsilon * eta / 8.0 })
}

pub fn mobius(a: f64, z: C64) -> C64 {
    (z - a) / (1.0 - a * z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::disk::{disk_sup_norm, DiskBudget};

    #[test]
    fn peak_value_is_one_for_every_exponent() {
        for m in [2, 3, 16, 128] {
            let zeta = C64::from_polar(1.0, 0.7);
            let phi = peak_function(zeta, m).unwrap();
            assert!((phi.eval(zeta) - 1.0).norm() < 1e-12);
        }
    }

    #[test]
    fn peak_sup_norm_at_most_one() {
        let phi = peak_function(C64::new(1.0, 0.0), 64).unwrap();
        let (upper, lower) = disk_sup_norm(&phi, &DiskBudget::default());
        assert!(upper <= 1.0 + 1e-6);
        assert!(lower >= 1.0 - 1e-6);
    }

    #[test]
    fn exponent_meets_off_region_bound() {
        for rho in [0.05, 0.25, 1.0, 2.0] {
            let m = peak_exponent(rho).unwrap();
            assert!(peak_off_region_bound(rho, m) <= 0.5);
            if m > 2 {
                assert!(peak_off_region_bound(rho, m / 2) > 0.5);
            }
        }
    }

    #[test]
    fn mobius_fixes_plus_and_minus_one() {
        for a in [0.1, 0.5, 0.99] {
            assert!((mobius(a, C64::new(1.0, 0.0)) - 1.0).norm() < 1e-12);
            assert!((mobius(a, C64::new(-1.0, 0.0)) + 1.0).norm() < 1e-12);
            assert_eq!(mobius(a, C64::new(a, 0.0)), C64::new(0.0, 0.0));
        }
    }

    #[test]
    fn out_of_range_parameters_are_rejected() {
        assert!(mobius_param(0.0, 0.5).is_err());
        assert!(mobius_param(0.5, 1.0).is_err());
    }
}
