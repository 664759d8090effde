//! φ-functions of exponential integrators,
//! `φ₁(z) = (e^z - 1)/z`, `φ₂(z) = (e^z - 1 - z)/z²`, `φ₃(z) = (e^z - 1 - z - z²/2)/z³`.
//!
//! Below `|z| = 1e-4` the closed forms cancel catastrophically and a
//! five-term Taylor series is used instead. `φ₃` cancels one order worse and
//! uses an eight-term series below `0.1`.

pub const SERIES_THRESHOLD: f64 = 1e-4;
const PHI3_SERIES_THRESHOLD: f64 = 0.1;

pub fn phi1(z: f64) -> f64 {
    if z.abs() < SERIES_THRESHOLD {
        1.0 + z * (1.0 / 2.0 + z * (1.0 / 6.0 + z * (1.0 / 24.0 + z / 120.0)))
    } else {
        z.exp_m1() / z
    }
}

pub fn phi2(z: f64) -> f64 {
    if z.abs() < SERIES_THRESHOLD {
        1.0 / 2.0 + z * (1.0 / 6.0 + z * (1.0 / 24.0 + z * (1.0 / 120.0 + z / 720.0)))
    } else {
        (z.exp_m1() - z) / (z * z)
    }
}

pub fn phi3(z: f64) -> f64 {
    if z.abs() < PHI3_SERIES_THRESHOLD {
        // Σ_j z^j / (j + 3)!, Horner from the top
        let mut acc = 0.0;
        let mut j = 8;
        while j > 0 {
            j -= 1;
            acc = acc * z / (j + 4) as f64 + 1.0;
        }
        acc / 6.0
    } else {
        (z.exp_m1() - z - 0.5 * z * z) / (z * z * z)
    }
}
