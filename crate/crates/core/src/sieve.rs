//! Segmented sieve of Eratosthenes over odd numbers.

use rayon::prelude::*;

/// Odd numbers covered by one segment; each is one bit.
pub const SEGMENT_BITS: usize = 1 << 20;
const SEGMENT_SPAN: u64 = 2 * SEGMENT_BITS as u64;

/// All primes `<= limit` in increasing order.
pub fn rational_primes(limit: u64) -> Vec<u64> {
    collect_primes(limit, false)
}

/// Same sequence as [`rational_primes`], with segments sieved on the current rayon pool.
pub fn rational_primes_parallel(limit: u64) -> Vec<u64> {
    collect_primes(limit, true)
}

fn collect_primes(limit: u64, parallel: bool) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let base = small_primes(isqrt(limit));
    let segments: Vec<u64> = (0..)
        .map(|i| 1 + i * SEGMENT_SPAN)
        .take_while(|&lo| lo <= limit)
        .collect();
    let hi_of = |lo: u64| (lo + SEGMENT_SPAN).min(limit + 1);

    let mut out = Vec::with_capacity(prime_count_upper(limit));
    out.push(2);
    if parallel && segments.len() > 1 {
        let parts: Vec<Vec<u64>> = segments
            .par_iter()
            .map(|&lo| sieve_segment(lo, hi_of(lo), &base))
            .collect();
        for part in parts {
            out.extend(part);
        }
    } else {
        for &lo in &segments {
            out.extend(sieve_segment(lo, hi_of(lo), &base));
        }
    }
    out
}

/// Odd primes in `[lo, hi)`, `lo` odd.
fn sieve_segment(lo: u64, hi: u64, base: &[u64]) -> Vec<u64> {
    debug_assert!(lo % 2 == 1);
    let nbits = (hi - lo).div_ceil(2) as usize;
    let mut composite = vec![0u64; nbits.div_ceil(64)];
    for &q in base.iter().skip(1) {
        let q2 = q * q;
        if q2 >= hi {
            break;
        }
        let mut start = if q2 >= lo { q2 } else { lo.div_ceil(q) * q };
        if start % 2 == 0 {
            start += q;
        }
        let mut bit = ((start - lo) / 2) as usize;
        while bit < nbits {
            composite[bit >> 6] |= 1 << (bit & 63);
            bit += q as usize;
        }
    }
    let mut primes = Vec::new();
    for (w, &word) in composite.iter().enumerate() {
        let mut free = !word;
        while free != 0 {
            let b = w * 64 + free.trailing_zeros() as usize;
            if b >= nbits {
                break;
            }
            let n = lo + 2 * b as u64;
            if n > 1 {
                primes.push(n);
            }
            free &= free - 1;
        }
    }
    primes
}

/// Plain sieve for the base primes up to `limit`.
fn small_primes(limit: u64) -> Vec<u64> {
    let n = limit as usize;
    let mut is_prime = vec![true; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if is_prime[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                is_prime[j] = false;
                j += i;
            }
        }
    }
    out
}

pub(crate) fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

/// Rosser–Schoenfeld style upper bound, used only to size the output buffer.
fn prime_count_upper(limit: u64) -> usize {
    if limit < 17 {
        return 8;
    }
    let x = limit as f64;
    (1.26 * x / x.ln()) as usize
}

/// Trial-division primality test.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    if n.is_multiple_of(3) {
        return n == 3;
    }
    let mut d = 5u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) || n.is_multiple_of(d + 2) {
            return false;
        }
        d += 6;
    }
    true
}
