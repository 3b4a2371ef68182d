//! Exponential-integrator weight functions.

/// `phi1(z) = (e^z - 1) / z`.
pub fn phi1(z: f64) -> f64 {
    if z == 0.0 {
        1.0
    } else {
        z.exp_m1() / z
    }
}

/// `phi2(z) = (e^z - 1 - z) / z^2`.
pub fn phi2(z: f64) -> f64 {
    if z.abs() < 0.1 {
        // Taylor series sum z^k / (k + 2)!
        let mut term = 0.5;
        let mut sum = 0.5;
        for k in 1..10 {
            term *= z / (k as f64 + 2.0);
            sum += term;
        }
        sum
    } else {
        (z.exp_m1() - z) / (z * z)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn limits_and_continuity() {
        assert_eq!(phi1(0.0), 1.0);
        assert_eq!(phi2(0.0), 0.5);
        for &z in &[-0.1, 0.1] {
            let a = phi2(z * (1.0 - 1e-12));
            let b = phi2(z * (1.0 + 1e-12));
            assert!((a - b).abs() < 1e-13);
        }
        assert!((phi1(-1.0) - (1.0 - (-1.0f64).exp())).abs() < 1e-15);
        assert!((phi2(-2.0) - ((-2.0f64).exp() - 1.0 + 2.0) / 4.0).abs() < 1e-15);
    }
}
