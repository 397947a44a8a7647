//! Exponential integrals needed by the Ewald split of the torus Green's function.

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Entire exponential integral `Ein(z) = sum_{k>=1} (-1)^{k+1} z^k / (k k!)`,
/// so that `E1(z) = -gamma - ln z + Ein(z)`. Valid for `z >= 0`.
pub fn ein(z: f64) -> f64 {
    if z > 1.0 {
        return exp_integral_e1(z) + EULER_GAMMA + z.ln();
    }
    let mut term = z; // z^k / k! with sign
    let mut sum = z;
    let mut k = 1.0;
    loop {
        k += 1.0;
        term *= -z / k;
        let add = term / k;
        sum += add;
        if add.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

/// Exponential integral `E1(z) = int_z^inf e^{-t}/t dt` for `z > 0`.
pub fn exp_integral_e1(z: f64) -> f64 {
    debug_assert!(z > 0.0);
    if z <= 1.0 {
        return -EULER_GAMMA - z.ln() + ein(z);
    }
    // modified Lentz on the continued fraction
    const TINY: f64 = 1e-300;
    let mut b = z + 1.0;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..10_000 {
        let an = -((i * i) as f64);
        b += 2.0;
        d = 1.0 / (an * d + b);
        c = b + an / c;
        let del = c * d;
        h *= del;
        if (del - 1.0).abs() < 1e-16 {
            break;
        }
    }
    h * (-z).exp()
}
