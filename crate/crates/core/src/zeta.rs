//! Hurwitz zeta `ζ(s, q)` for real `s ≠ 1`, via Euler–Maclaurin.
//!
//! Only needed for the singular correction of the one-axis midpoint rule,
//! where `s = 1 − a ∈ (0, 1)` and `q = ½`.

const SHIFT: usize = 24;

// B_{2j} / (2j)!
const BERNOULLI_OVER_FACT: [f64; 6] = [
    1.0 / 12.0,
    -1.0 / 720.0,
    1.0 / 30240.0,
    -1.0 / 1209600.0,
    1.0 / 47900160.0,
    -691.0 / 1307674368000.0,
];

/// `ζ(s, q) = Σ_{k≥0} (k+q)^{−s}`, analytically continued to `s < 1`.
pub fn hurwitz(s: f64, q: f64) -> f64 {
    debug_assert!(q > 0.0 && s != 1.0);
    let head: f64 = (0..SHIFT).map(|k| (k as f64 + q).powf(-s)).sum();
    let x = SHIFT as f64 + q;
    let mut tail = x.powf(1.0 - s) / (s - 1.0) + 0.5 * x.powf(-s);
    // rising factorial s(s+1)...(s+2j-2) times x^{-s-2j+1}
    let mut rising = s;
    let mut power = x.powf(-s - 1.0);
    for (j, coeff) in BERNOULLI_OVER_FACT.iter().enumerate() {
        tail += coeff * rising * power;
        let k = (2 * j) as f64;
        rising *= (s + k + 1.0) * (s + k + 2.0);
        power /= x * x;
    }
    head + tail
}
