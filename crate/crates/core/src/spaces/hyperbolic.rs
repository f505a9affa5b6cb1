//! Closed-form geometry of the upper half-plane `{(a, b) : b > 0}` with
//! metric `(da² + db²) / b²`, which is the left-invariant metric of the
//! affine group `t ↦ b·t + a`.

use std::f64::consts::PI;

/// Hyperbolic distance between `(a1, b1)` and `(a2, b2)`.
///
/// Evaluated as `ln(1 + z + sqrt(z (z + 2)))` with
/// `z = ((a1-a2)² + (b1-b2)²) / (2 b1 b2)`, which keeps full relative
/// precision for nearby points where `acosh(1 + z)` would cancel.
#[inline]
pub fn distance(a1: f64, b1: f64, a2: f64, b2: f64) -> f64 {
    let da = a1 - a2;
    let db = b1 - b2;
    let z = (da * da + db * db) / (2.0 * b1 * b2);
    (z + (z * (z + 2.0)).sqrt()).ln_1p()
}

/// `cosh r - 1` without cancellation for small `r`.
#[inline]
pub fn cosh_m1(r: f64) -> f64 {
    let s = (0.5 * r).sinh();
    2.0 * s * s
}

/// Area of a hyperbolic disk of radius `r`: `2π (cosh r − 1)`.
#[inline]
pub fn disk_area(r: f64) -> f64 {
    2.0 * PI * cosh_m1(r)
}

/// Group law `(a1, b1)·(a2, b2) = (a1 + b1 a2, b1 b2)`.
#[inline]
pub fn compose(a1: f64, b1: f64, a2: f64, b2: f64) -> (f64, f64) {
    (a1 + b1 * a2, b1 * b2)
}

#[inline]
pub fn inverse(a: f64, b: f64) -> (f64, f64) {
    (-a / b, 1.0 / b)
}

/// Point at hyperbolic distance `rho` from the identity `(0, 1)` in the
/// direction `theta`, using the Poincaré disk and the Cayley map
/// `w = i (1 + z) / (1 − z)`.
///
/// Angles are uniform for the rotation group fixing the identity, so a
/// uniform `theta` gives the invariant measure on each geodesic circle.
#[inline]
pub fn polar_from_identity(rho: f64, theta: f64) -> (f64, f64) {
    // t = tanh(rho/2); 1 - t² = 1 / cosh²(rho/2)
    let c = cosh_m1(rho) + 1.0;
    polar_from_cosh(c, theta)
}

/// Same as [`polar_from_identity`] but parameterized by `cosh rho`, which is
/// the natural coordinate for area-uniform sampling.
#[inline]
pub fn polar_from_cosh(cosh_rho: f64, theta: f64) -> (f64, f64) {
    let t2 = (cosh_rho - 1.0) / (cosh_rho + 1.0);
    let one_minus_t2 = 2.0 / (cosh_rho + 1.0);
    let t = t2.sqrt();
    let (s, c) = theta.sin_cos();
    let u = t * c;
    let v = t * s;
    let den = (1.0 - u) * (1.0 - u) + v * v;
    (-2.0 * v / den, one_minus_t2 / den)
}

/// Euclidean disk occupied by the hyperbolic ball of radius `r` about `(a, b)`:
/// centre `(a, b cosh r)`, radius `b sinh r`.
#[inline]
pub fn shadow(a: f64, b: f64, r: f64) -> ((f64, f64), f64) {
    ((a, b * r.cosh()), b * r.sinh())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distance_along_vertical_geodesic_is_log_ratio() {
        let e = std::f64::consts::E;
        assert!((distance(0.0, 1.0, 0.0, e) - 1.0).abs() < 1e-12);
        assert!((distance(0.0, 2.0, 0.0, 8.0) - 4f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn polar_points_sit_at_requested_distance() {
        for &rho in &[1e-6, 0.3, 1.0, 4.0, 12.0] {
            for k in 0..16 {
                let theta = k as f64 * 0.4 - 3.0;
                let (a, b) = polar_from_identity(rho, theta);
                let d = distance(0.0, 1.0, a, b);
                assert!((d - rho).abs() <= 1e-9 * rho.max(1.0), "rho={rho} d={d}");
            }
        }
    }

    #[test]
    fn shadow_boundary_is_at_distance_r() {
        let (a0, b0, r) = (2.0, 3.0, 1.3);
        let ((ca, cb), rad) = shadow(a0, b0, r);
        for k in 0..12 {
            let phi = k as f64 * 0.5;
            let d = distance(a0, b0, ca + rad * phi.cos(), cb + rad * phi.sin());
            assert!((d - r).abs() < 1e-10);
        }
    }
}
