//! Riemann zeta by Euler–Maclaurin summation.
//!
//! `zeta(s) = sum_{n<M} n^-s + M^-s/2 + M^(1-s)/(s-1)
//!            + sum_k B_2k/(2k)! s(s+1)...(s+2k-2) M^(-s-2k+1) + R`

use crate::complex::Complex;
use crate::error::{Error, Result};
use crate::sum::CompensatedSum;

/// `B_2k / (2k)!` for k = 1..=7.
const BERNOULLI_OVER_FACTORIAL: [f64; 7] = [
    1.0 / 6.0 / 2.0,
    -1.0 / 30.0 / 24.0,
    1.0 / 42.0 / 720.0,
    -1.0 / 30.0 / 40_320.0,
    5.0 / 66.0 / 3_628_800.0,
    -691.0 / 2730.0 / 479_001_600.0,
    7.0 / 6.0 / 87_178_291_200.0,
];

const TARGET: f64 = 1e-13;

/// `zeta(s)` for real `s > 1`, with correction terms through `B_4`.
///
/// `M` is the smallest cutoff for which the first omitted (`B_6`) term falls below
/// `1e-13 * zeta(s)`.
pub fn zeta_real(s: f64) -> Result<f64> {
    if !(s > 1.0) {
        return Err(Error::domain(format!("zeta_real needs s > 1, got {s}")));
    }
    const TERMS: usize = 2;
    // Cheap lower bound on zeta(s) to scale the target.
    let floor = (1.0 / (s - 1.0)).max(1.0);
    let rising: f64 = (0..2 * TERMS + 1).map(|j| s + j as f64).product();
    let c = BERNOULLI_OVER_FACTORIAL[TERMS].abs() * rising;
    // c * M^-(s + 2 TERMS + 1) < TARGET * floor
    let exponent = s + (2 * TERMS + 1) as f64;
    let m = ((c / (TARGET * floor)).powf(1.0 / exponent).ceil() as u64).max(4);

    let mut acc = CompensatedSum::new();
    for n in (1..m).rev() {
        acc.add((-s * (n as f64).ln()).exp());
    }
    let mf = m as f64;
    let ln_m = mf.ln();
    let m_pow = (-s * ln_m).exp();
    acc.add(0.5 * m_pow);
    acc.add(mf * m_pow / (s - 1.0));
    let mut rising = s;
    let mut power = m_pow / mf;
    for (k, coeff) in BERNOULLI_OVER_FACTORIAL.iter().take(TERMS).enumerate() {
        acc.add(coeff * rising * power);
        let j = (2 * k + 1) as f64;
        rising *= (s + j) * (s + j + 1.0);
        power /= mf * mf;
    }
    Ok(acc.value())
}

/// `zeta(s)` for complex `s` with `Re s > 0`, `s != 1`, with corrections through `B_12`.
///
/// The cutoff grows roughly linearly in `|Im s|`.
pub fn zeta_complex(s: Complex) -> Result<Complex> {
    if !(s.re > 0.0) || (s - Complex::ONE).abs() < 1e-12 {
        return Err(Error::domain(format!(
            "zeta_complex needs Re s > 0, s != 1, got {s:?}"
        )));
    }
    const TERMS: usize = 6;
    let rising_abs: f64 = (0..2 * TERMS + 1).map(|j| (s + j as f64).abs()).product();
    let c = BERNOULLI_OVER_FACTORIAL[TERMS].abs() * rising_abs;
    let exponent = s.re + (2 * TERMS + 1) as f64;
    let m = ((c / TARGET).powf(1.0 / exponent).ceil() as u64).max(8);

    let (mut re, mut im) = (CompensatedSum::new(), CompensatedSum::new());
    for n in (1..m).rev() {
        let z = s.neg_pow_of_log((n as f64).ln());
        re.add(z.re);
        im.add(z.im);
    }
    let mf = m as f64;
    let m_pow = s.neg_pow_of_log(mf.ln());
    let mut tail = m_pow.scale(0.5) + m_pow.scale(mf) / (s + -1.0);
    let mut rising = s;
    let mut power = m_pow.scale(1.0 / mf);
    for (k, coeff) in BERNOULLI_OVER_FACTORIAL.iter().take(TERMS).enumerate() {
        tail += (rising * power).scale(*coeff);
        let j = (2 * k + 1) as f64;
        rising = rising * (s + j) * (s + (j + 1.0));
        power = power.scale(1.0 / (mf * mf));
    }
    Ok(Complex::new(re.value() + tail.re, im.value() + tail.im))
}
