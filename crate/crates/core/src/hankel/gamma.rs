//! Reciprocal gamma function for real arguments (Lanczos, g = 7, n = 9).

use std::f64::consts::PI;

const LANCZOS_G: f64 = 7.0;
#[allow(clippy::excessive_precision)]
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Γ(x) for x ≥ 1/2.
fn gamma_lanczos(x: f64) -> f64 {
    let x = x - 1.0;
    let mut a = LANCZOS_COEFFS[0];
    let t = x + LANCZOS_G + 0.5;
    for (i, c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    (2.0 * PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * a
}

/// 1/Γ(x), an entire function: exactly zero at x = 0, −1, −2, …
pub fn rgamma(x: f64) -> f64 {
    if x <= 0.0 && x == x.floor() {
        return 0.0;
    }
    if x < 0.5 {
        // reflection: 1/Γ(x) = sin(πx) Γ(1 − x) / π
        (PI * x).sin() * gamma_lanczos(1.0 - x) / PI
    } else if x > 170.0 {
        0.0
    } else {
        1.0 / gamma_lanczos(x)
    }
}

pub fn gamma(x: f64) -> f64 {
    1.0 / rgamma(x)
}

/// Digamma at positive integers: ψ(n) = −γ + Σ_{k<n} 1/k.
pub fn digamma_int(n: u64) -> f64 {
    const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
    let mut s = -EULER_GAMMA;
    for k in 1..n {
        s += 1.0 / k as f64;
    }
    s
}
