//! Generalized Legendre factorials: valuations, the factorial ideal, its increments, and
//! the summatory function.
//!
//! For a weight function `f` on prime ideals outside S, the factorial `n!_{K,f}` is the
//! ideal with `v_p(n!) = sum_{k>=0} floor(n / (f(p) N(p)^k))`. The increment
//! `B(n) = log N(n! / (n-1)!)` equals `sum_p log N(p) * #{k : f(p) N(p)^k | n}`, which is
//! what the range sieve in [`increments_upto`] accumulates.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{BufRead, Write};
use std::path::Path;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::{ideals_above, prime_ideal_stream, FieldSpec, PrimeIdeal, SSet};
use crate::format::fmt_f64;
use crate::sum::{compensated_sum, CompensatedSum};

/// Largest table `increments_upto` will allocate.
pub const TABLE_CAP: u64 = 20_000_000;

#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    /// `f(p) = round(c N(p))`.
    ExactNorm,
    /// `f(p) = max(1, round(c N(p)) - 1)`.
    NormMinusOne,
    /// Per-ideal values keyed by `(p, index)`, falling back to `ExactNorm`.
    Table(BTreeMap<(u64, u8), u64>),
}

/// The weight function `f` on prime ideals.
#[derive(Debug, Clone, PartialEq)]
pub struct FSpec {
    c: f64,
    shape: Shape,
    delta_hint: Option<f64>,
}

impl FSpec {
    pub fn new(c: f64, shape: Shape) -> Result<Self> {
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::config(format!(
                "scale c must be a positive real, got {c}"
            )));
        }
        if let Shape::Table(t) = &shape {
            if let Some(((p, i), _)) = t.iter().find(|(_, &v)| v == 0) {
                return Err(Error::config(format!("override f({p},{i}) must be >= 1")));
            }
        }
        Ok(Self {
            c,
            shape,
            delta_hint: None,
        })
    }

    /// `f(p) = N(p)`, the classical factorial over Q.
    pub fn norm() -> Self {
        Self::new(1.0, Shape::ExactNorm).expect("valid")
    }

    /// `f(p) = N(p) - 1`.
    pub fn norm_minus_one() -> Self {
        Self::new(1.0, Shape::NormMinusOne).expect("valid")
    }

    pub fn scaled_norm(c: f64) -> Result<Self> {
        Self::new(c, Shape::ExactNorm)
    }

    pub fn with_delta_hint(mut self, delta: f64) -> Self {
        self.delta_hint = Some(delta);
        self
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn delta_hint(&self) -> Option<f64> {
        self.delta_hint
    }

    /// Largest possible `|f(p) - c N(p)|` for ideals not covered by an override.
    pub(crate) fn max_offset(&self) -> f64 {
        match self.shape {
            Shape::NormMinusOne => 1.5,
            _ => 0.5,
        }
    }

    pub fn value(&self, ideal: &PrimeIdeal) -> u64 {
        let base = (self.c * ideal.norm as f64).round_ties_even() as u64;
        match &self.shape {
            Shape::ExactNorm => base.max(1),
            Shape::NormMinusOne => base.saturating_sub(1).max(1),
            Shape::Table(t) => t
                .get(&(ideal.p, ideal.index))
                .copied()
                .unwrap_or(base.max(1)),
        }
    }

    /// A norm bound `B` such that every ideal of `field` with `N(p) > B` has `f(p) > x`.
    pub fn norm_bound(&self, field: &FieldSpec, x: u64) -> u64 {
        // f(p) >= c N(p) - max_offset, so f(p) <= x forces N(p) <= (x + offset) / c.
        let mut bound = ((x as f64 + self.max_offset()) / self.c).floor() as u64 + 1;
        if let Shape::Table(t) = &self.shape {
            for (&(p, index), &v) in t {
                if v <= x {
                    if let Some(i) = ideals_above(field, p).iter().find(|i| i.index == index) {
                        bound = bound.max(i.norm);
                    }
                }
            }
        }
        bound.max(2)
    }
}

impl fmt::Display for FSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.shape, self.c == 1.0) {
            (Shape::ExactNorm, true) => write!(f, "norm"),
            (Shape::ExactNorm, false) => write!(f, "c*norm:{}", self.c),
            (Shape::NormMinusOne, true) => write!(f, "norm-1"),
            (Shape::NormMinusOne, false) => write!(f, "c*norm-1:{}", self.c),
            (Shape::Table(t), _) => write!(f, "table[{} overrides, c={}]", t.len(), self.c),
        }
    }
}

/// Parses the weight-function grammar: `norm`, `norm-1`, `c*norm:<real>`,
/// `c*norm-1:<real>`, or `table:<path>`.
pub fn parse_fspec(s: &str) -> Result<FSpec> {
    let s = s.trim();
    let parse_c = |v: &str| -> Result<f64> {
        v.trim()
            .parse::<f64>()
            .map_err(|_| Error::config(format!("bad scale in fspec {s:?}")))
    };
    match s {
        "norm" => Ok(FSpec::norm()),
        "norm-1" => Ok(FSpec::norm_minus_one()),
        _ => {
            if let Some(v) = s.strip_prefix("c*norm-1:") {
                FSpec::new(parse_c(v)?, Shape::NormMinusOne)
            } else if let Some(v) = s.strip_prefix("c*norm:") {
                FSpec::new(parse_c(v)?, Shape::ExactNorm)
            } else if let Some(path) = s.strip_prefix("table:") {
                FSpec::new(1.0, Shape::Table(read_override_table(Path::new(path))?))
            } else {
                Err(Error::config(format!("unknown fspec {s:?}")))
            }
        }
    }
}

/// Reads `p,index,f` rows (header optional, `#` comments allowed).
pub fn read_override_table(path: &Path) -> Result<BTreeMap<(u64, u8), u64>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_override_table(&text)
}

pub fn parse_override_table(text: &str) -> Result<BTreeMap<(u64, u8), u64>> {
    let mut out = BTreeMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with('p') {
            continue;
        }
        let cols: Vec<&str> = line.split(',').map(str::trim).collect();
        let bad = || Error::config(format!("override table line {}: {line:?}", lineno + 1));
        if cols.len() != 3 {
            return Err(bad());
        }
        let p = cols[0].parse().map_err(|_| bad())?;
        let index: u8 = cols[1].parse().map_err(|_| bad())?;
        let v = cols[2].parse().map_err(|_| bad())?;
        if index > 1 {
            return Err(bad());
        }
        out.insert((p, index), v);
    }
    Ok(out)
}

/// `v_p(n!_{K,f}) = sum_{k>=0} floor(n / (f(p) N(p)^k))`, in exact integer arithmetic.
pub fn valuation(n: u64, ideal: &PrimeIdeal, f: &FSpec) -> u64 {
    valuation_with(n, f.value(ideal), ideal.norm)
}

fn valuation_with(n: u64, fp: u64, norm: u64) -> u64 {
    let mut total = 0;
    let mut m = fp;
    while m <= n {
        total += n / m;
        m = match m.checked_mul(norm) {
            Some(next) => next,
            None => break,
        };
    }
    total
}

/// `#{k >= 0 : f(p) N(p)^k | n}`.
fn divisor_chain_len(n: u64, fp: u64, norm: u64) -> u32 {
    let mut count = 0;
    let mut m = fp;
    while m <= n && n.is_multiple_of(m) {
        count += 1;
        m = match m.checked_mul(norm) {
            Some(next) => next,
            None => break,
        };
    }
    count
}

/// A finite product of prime ideals, stored as a sparse exponent map.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ExponentIdeal {
    entries: BTreeMap<PrimeIdeal, u64>,
}

impl ExponentIdeal {
    pub fn new() -> Self {
        Self::default()
    }

    /// Sets an exponent; zero removes the entry.
    pub fn insert(&mut self, ideal: PrimeIdeal, exponent: u64) {
        if exponent == 0 {
            self.entries.remove(&ideal);
        } else {
            self.entries.insert(ideal, exponent);
        }
    }

    pub fn exponent(&self, ideal: &PrimeIdeal) -> u64 {
        self.entries.get(ideal).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&PrimeIdeal, u64)> {
        self.entries.iter().map(|(i, &e)| (i, e))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn log_norm(&self) -> f64 {
        log_norm_of_ideal(self)
    }
}

/// Natural log of the absolute norm of an ideal.
pub fn log_norm_of_ideal(ideal: &ExponentIdeal) -> f64 {
    compensated_sum(ideal.iter().map(|(p, e)| e as f64 * p.log_norm))
}

/// The ideal `n!_{K,f}` of the ring of S-integers.
pub fn factorial_ideal(n: u64, field: &FieldSpec, s: &SSet, f: &FSpec) -> Result<ExponentIdeal> {
    if n == 0 {
        return Err(Error::domain("factorial index must be >= 1"));
    }
    let ideals = prime_ideal_stream(field, s, f.norm_bound(field, n))?;
    let mut out = ExponentIdeal::new();
    for ideal in ideals {
        out.insert(ideal, valuation(n, &ideal, f));
    }
    Ok(out)
}

/// `B(n)`, evaluated directly from the divisibility identity.
pub fn increment(n: u64, field: &FieldSpec, s: &SSet, f: &FSpec) -> Result<f64> {
    if n == 0 {
        return Err(Error::domain("increment index must be >= 1"));
    }
    let ideals = prime_ideal_stream(field, s, f.norm_bound(field, n))?;
    Ok(increment_over(n, &ideals, f))
}

pub(crate) fn increment_over(n: u64, ideals: &[PrimeIdeal], f: &FSpec) -> f64 {
    let mut acc = CompensatedSum::new();
    for ideal in ideals {
        let fp = f.value(ideal);
        if fp <= n && n.is_multiple_of(fp) {
            acc.add(divisor_chain_len(n, fp, ideal.norm) as f64 * ideal.log_norm);
        }
    }
    acc.value()
}

/// `B(n)` for `n = 1..=x_max` together with the summatory function `S(n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct IncrementTable {
    x_max: u64,
    // Slot 0 is a zero sentinel so that `values[n] = B(n)`.
    values: Vec<f64>,
    prefix: Vec<f64>,
    scale: f64,
}

impl IncrementTable {
    fn from_values(values: Vec<f64>, scale: f64) -> Self {
        let mut prefix = Vec::with_capacity(values.len());
        let mut acc = CompensatedSum::new();
        prefix.push(0.0);
        for &v in &values[1..] {
            acc.add(v);
            prefix.push(acc.value());
        }
        Self {
            x_max: (values.len() - 1) as u64,
            values,
            prefix,
            scale,
        }
    }

    pub fn x_max(&self) -> u64 {
        self.x_max
    }

    /// The scale constant `c` of the weight function the table was built with.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// `B(n)` for `1 <= n <= x_max`.
    pub fn value(&self, n: u64) -> f64 {
        assert!(
            n >= 1 && n <= self.x_max,
            "index {n} outside 1..={}",
            self.x_max
        );
        self.values[n as usize]
    }

    /// `S(n) = B(1) + ... + B(n)` for `1 <= n <= x_max`.
    pub fn prefix(&self, n: u64) -> f64 {
        assert!(
            n >= 1 && n <= self.x_max,
            "index {n} outside 1..={}",
            self.x_max
        );
        self.prefix[n as usize]
    }

    pub fn values(&self) -> &[f64] {
        &self.values[1..]
    }

    pub fn prefixes(&self) -> &[f64] {
        &self.prefix[1..]
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "n,B,S")?;
        for n in 1..=self.x_max as usize {
            writeln!(
                w,
                "{},{},{}",
                n,
                fmt_f64(self.values[n]),
                fmt_f64(self.prefix[n])
            )?;
        }
        Ok(())
    }

    /// Reads the `n,B,S` form back. The stored prefix column is kept verbatim.
    pub fn read_csv<R: BufRead>(r: R, scale: f64) -> Result<Self> {
        let mut values = vec![0.0];
        let mut prefix = vec![0.0];
        for (lineno, line) in r.lines().enumerate() {
            let line = line.map_err(|e| Error::io("<csv>", e))?;
            if lineno == 0 {
                if line.trim() != "n,B,S" {
                    return Err(Error::config(format!(
                        "expected header n,B,S, got {line:?}"
                    )));
                }
                continue;
            }
            let bad = || Error::config(format!("increment table line {}: {line:?}", lineno + 1));
            let mut cols = line.split(',');
            let n: usize = cols.next().and_then(|c| c.parse().ok()).ok_or_else(bad)?;
            let b: f64 = cols.next().and_then(|c| c.parse().ok()).ok_or_else(bad)?;
            let s: f64 = cols.next().and_then(|c| c.parse().ok()).ok_or_else(bad)?;
            if n != values.len() || cols.next().is_some() {
                return Err(bad());
            }
            values.push(b);
            prefix.push(s);
        }
        if values.len() < 2 {
            return Err(Error::config("increment table has no rows"));
        }
        Ok(Self {
            x_max: (values.len() - 1) as u64,
            values,
            prefix,
            scale,
        })
    }
}

/// Sieves `B(1..=x)`.
///
/// Every modulus `m = f(p) N(p)^k <= x` adds `log N(p)` at each multiple of `m`. Moduli are
/// applied in prime-then-k order. The value array is cut into contiguous blocks that may be
/// processed in parallel, but each entry still receives its additions in that fixed order,
/// so the result is bit-identical for any thread count.
pub fn increments_upto(x: u64, field: &FieldSpec, s: &SSet, f: &FSpec) -> Result<IncrementTable> {
    if x == 0 {
        return Err(Error::domain("x_max must be >= 1"));
    }
    if x > TABLE_CAP {
        return Err(Error::Size {
            requested: x,
            cap: TABLE_CAP,
        });
    }
    let ideals = prime_ideal_stream(field, s, f.norm_bound(field, x))?;
    let mut moduli: Vec<(u64, f64)> = Vec::new();
    for ideal in &ideals {
        let mut m = f.value(ideal);
        while m <= x {
            moduli.push((m, ideal.log_norm));
            m = match m.checked_mul(ideal.norm) {
                Some(next) => next,
                None => break,
            };
        }
    }

    let len = x as usize + 1;
    let mut values = vec![0.0f64; len];
    let blocks = (rayon::current_num_threads() * 4)
        .min(len.div_ceil(1 << 16))
        .max(1);
    let block_len = len.div_ceil(blocks);
    values
        .par_chunks_mut(block_len)
        .enumerate()
        .for_each(|(b, chunk)| {
            let lo = (b * block_len) as u64;
            let hi = lo + chunk.len() as u64;
            for &(m, w) in &moduli {
                let mut k = lo.div_ceil(m).max(1) * m;
                while k < hi {
                    chunk[(k - lo) as usize] += w;
                    k += m;
                }
            }
        });
    Ok(IncrementTable::from_values(values, f.c()))
}

/// `S(x) = sum_{n <= x} B(n)`.
pub fn summatory(x: f64, table: &IncrementTable) -> Result<f64> {
    if !(x >= 1.0) {
        return Err(Error::domain(format!("summatory needs x >= 1, got {x}")));
    }
    let n = x.floor();
    if n > table.x_max as f64 {
        return Err(Error::domain(format!(
            "x = {x} exceeds table range {}",
            table.x_max
        )));
    }
    Ok(table.prefix(n as u64))
}

#[cfg(test)]
mod tests {
    use super::*;

    const LN_10_FACT: f64 = 15.104_412_573_075_516; // ln 3628800

    fn q() -> FieldSpec {
        FieldSpec::rationals()
    }

    fn gaussian() -> FieldSpec {
        "Q(sqrt-1)".parse().unwrap()
    }

    fn ideal(p: u64) -> PrimeIdeal {
        PrimeIdeal::new(p, 1, 0)
    }

    /// Exponents of `n!` from the divisibility identity: `sum_{m <= n} #{k : f N^k | m}`.
    fn factorial_by_divisibility(
        n: u64,
        field: &FieldSpec,
        s: &SSet,
        f: &FSpec,
    ) -> BTreeMap<PrimeIdeal, u64> {
        let ideals = prime_ideal_stream(field, s, n + 2).unwrap();
        let mut out = BTreeMap::new();
        for i in ideals {
            let fp = f.value(&i);
            let mut e = 0;
            for m in 1..=n {
                let mut d = fp;
                while d <= m && m % d == 0 {
                    e += 1;
                    d *= i.norm;
                }
            }
            if e > 0 {
                out.insert(i, e);
            }
        }
        out
    }

    #[test]
    fn fspec_values() {
        let p7 = ideal(7);
        assert_eq!(FSpec::norm().value(&p7), 7);
        assert_eq!(FSpec::norm_minus_one().value(&p7), 6);
        assert_eq!(FSpec::norm_minus_one().value(&ideal(2)), 1);
        assert_eq!(FSpec::scaled_norm(2.0).unwrap().value(&p7), 14);
        // round half to even: 0.5 * 5 = 2.5 -> 2, 0.5 * 7 = 3.5 -> 4
        assert_eq!(FSpec::scaled_norm(0.5).unwrap().value(&ideal(5)), 2);
        assert_eq!(FSpec::scaled_norm(0.5).unwrap().value(&p7), 4);
        let t = Shape::Table(BTreeMap::from([((3, 0), 10)]));
        let f = FSpec::new(1.0, t).unwrap();
        assert_eq!(f.value(&ideal(3)), 10);
        assert_eq!(f.value(&ideal(5)), 5);
    }

    #[test]
    fn fspec_validation() {
        assert!(FSpec::scaled_norm(0.0).is_err());
        assert!(FSpec::scaled_norm(-1.0).is_err());
        assert!(FSpec::scaled_norm(f64::NAN).is_err());
        assert!(FSpec::new(1.0, Shape::Table(BTreeMap::from([((3, 0), 0)]))).is_err());
    }

    #[test]
    fn fspec_grammar() {
        assert_eq!(parse_fspec("norm").unwrap(), FSpec::norm());
        assert_eq!(parse_fspec("norm-1").unwrap(), FSpec::norm_minus_one());
        assert_eq!(parse_fspec("c*norm:2").unwrap().c(), 2.0);
        assert_eq!(
            parse_fspec("c*norm-1:3").unwrap().shape(),
            &Shape::NormMinusOne
        );
        assert!(parse_fspec("c*norm:0").is_err());
        assert!(parse_fspec("c*norm:abc").is_err());
        assert!(parse_fspec("sqrt").is_err());
        assert!(parse_fspec("table:/definitely/not/here.csv").is_err());
        let t = parse_override_table("p,index,f\n3,0,10\n# note\n5,1,2\n").unwrap();
        assert_eq!(t.get(&(5, 1)), Some(&2));
        assert!(parse_override_table("3,2,1").is_err());
        assert!(parse_override_table("3,0").is_err());
    }

    #[test]
    fn valuation_examples() {
        assert_eq!(valuation(10, &ideal(2), &FSpec::norm()), 8);
        assert_eq!(valuation(6, &ideal(7), &FSpec::norm_minus_one()), 1);
        assert_eq!(valuation(1, &ideal(3), &FSpec::norm()), 0);
        // no overflow near the top of the range
        assert_eq!(
            valuation(
                u64::MAX,
                &PrimeIdeal::new(4_294_967_311, 1, 0),
                &FSpec::norm()
            ),
            u64::MAX / 4_294_967_311
        );
    }

    #[test]
    fn factorial_ideal_examples() {
        let f = FSpec::norm();
        let four = factorial_ideal(4, &q(), &SSet::empty(), &f).unwrap();
        assert_eq!(
            four.iter().map(|(i, e)| (i.p, e)).collect::<Vec<_>>(),
            vec![(2, 3), (3, 1)]
        );
        assert!((four.log_norm() - 24f64.ln()).abs() < 1e-15);
        assert!(factorial_ideal(1, &q(), &SSet::empty(), &f)
            .unwrap()
            .is_empty());
        assert!(factorial_ideal(0, &q(), &SSet::empty(), &f).is_err());
    }

    #[test]
    fn factorial_ideal_norm_minus_one_matches_oracle() {
        let f = FSpec::norm_minus_one();
        let six = factorial_ideal(6, &q(), &SSet::empty(), &f).unwrap();
        let oracle = factorial_by_divisibility(6, &q(), &SSet::empty(), &f);
        let got: BTreeMap<PrimeIdeal, u64> = six.iter().map(|(i, e)| (*i, e)).collect();
        assert_eq!(got, oracle);
        // frozen from the oracle: 2^10 3^4 5 7
        assert_eq!(
            got.iter().map(|(i, &e)| (i.p, e)).collect::<Vec<_>>(),
            vec![(2, 10), (3, 4), (5, 1), (7, 1)]
        );
    }

    #[test]
    fn factorial_ideal_agrees_with_divisibility_everywhere() {
        let shapes = [
            FSpec::norm(),
            FSpec::norm_minus_one(),
            FSpec::scaled_norm(2.0).unwrap(),
        ];
        for field in [q(), gaussian(), "Q(sqrt5)".parse().unwrap()] {
            for f in &shapes {
                for n in [1u64, 2, 7, 30, 97] {
                    let got: BTreeMap<PrimeIdeal, u64> =
                        factorial_ideal(n, &field, &SSet::empty(), f)
                            .unwrap()
                            .iter()
                            .map(|(i, e)| (*i, e))
                            .collect();
                    assert_eq!(
                        got,
                        factorial_by_divisibility(n, &field, &SSet::empty(), f),
                        "{field} {f} n={n}"
                    );
                }
            }
        }
    }

    #[test]
    fn increment_examples() {
        let e = SSet::empty();
        assert!((increment(12, &q(), &e, &FSpec::norm()).unwrap() - 12f64.ln()).abs() < 1e-15);
        assert_eq!(increment(1, &gaussian(), &e, &FSpec::norm()).unwrap(), 0.0);
        let want = 2.0 * 2f64.ln() + 2.0 * 3f64.ln() + 7f64.ln();
        assert!((increment(6, &q(), &e, &FSpec::norm_minus_one()).unwrap() - want).abs() < 1e-14);
        assert!((want - 5.529_429_0).abs() < 1e-7);
    }

    #[test]
    fn table_examples() {
        let e = SSet::empty();
        let t = increments_upto(12, &q(), &e, &FSpec::norm()).unwrap();
        assert!((t.prefix(12) - 479_001_600f64.ln()).abs() < 1e-12);
        assert!((t.prefix(12) - 19.987_214_5).abs() < 1e-7);
        let t1 = increments_upto(1, &q(), &e, &FSpec::norm()).unwrap();
        assert_eq!(t1.values(), &[0.0]);
        assert_eq!(t1.prefixes(), &[0.0]);
        let g = increments_upto(10, &gaussian(), &e, &FSpec::norm()).unwrap();
        assert!((g.value(5) - 2.0 * 5f64.ln()).abs() < 1e-15);
        assert!(matches!(
            increments_upto(TABLE_CAP + 1, &q(), &e, &FSpec::norm()),
            Err(Error::Size { .. })
        ));
    }

    #[test]
    fn summatory_examples() {
        let t = increments_upto(20, &q(), &SSet::empty(), &FSpec::norm()).unwrap();
        assert!((summatory(10.7, &t).unwrap() - LN_10_FACT).abs() < 1e-12);
        assert_eq!(summatory(1.0, &t).unwrap(), 0.0);
        assert!(summatory(0.5, &t).is_err());
        assert!(summatory(21.0, &t).is_err());
        assert!(summatory(f64::NAN, &t).is_err());
    }

    #[test]
    fn log_norm_examples() {
        assert_eq!(log_norm_of_ideal(&ExponentIdeal::new()), 0.0);
        let mut i = ExponentIdeal::new();
        i.insert(ideal(2), 3);
        i.insert(ideal(3), 1);
        i.insert(ideal(5), 0);
        assert_eq!(i.len(), 2);
        assert!((log_norm_of_ideal(&i) - 3.178_053_8).abs() < 1e-7);
        let ten = factorial_ideal(10, &q(), &SSet::empty(), &FSpec::norm()).unwrap();
        assert!((ten.log_norm() - LN_10_FACT).abs() < 1e-13);
    }

    #[test]
    fn sieve_matches_direct_increments() {
        let shapes = [
            FSpec::norm(),
            FSpec::norm_minus_one(),
            FSpec::scaled_norm(2.0).unwrap(),
            FSpec::new(1.0, Shape::NormMinusOne).unwrap(),
            FSpec::new(
                1.0,
                Shape::Table(BTreeMap::from([((3, 0), 1), ((5, 1), 4)])),
            )
            .unwrap(),
        ];
        let x = 10_000;
        for field in [q(), gaussian()] {
            for f in &shapes {
                let t = increments_upto(x, &field, &SSet::empty(), f).unwrap();
                let ideals =
                    prime_ideal_stream(&field, &SSet::empty(), f.norm_bound(&field, x)).unwrap();
                for n in 1..=x {
                    let d = increment_over(n, &ideals, f);
                    let v = t.value(n);
                    assert!(
                        (v - d).abs() <= 1e-12 * d.abs().max(1.0),
                        "{field} {f} n={n}: {v} vs {d}"
                    );
                }
            }
        }
    }

    #[test]
    fn removing_one_ideal_shifts_increments_locally() {
        let k = gaussian();
        let f = FSpec::norm_minus_one();
        let s: SSet = "5:one".parse().unwrap();
        let full = increments_upto(3000, &k, &SSet::empty(), &f).unwrap();
        let cut = increments_upto(3000, &k, &s, &f).unwrap();
        let removed = PrimeIdeal::new(5, 1, 0);
        let fp = f.value(&removed);
        for n in 1..=3000u64 {
            let want = removed.log_norm * divisor_chain_len(n, fp, removed.norm) as f64;
            assert!((full.value(n) - cut.value(n) - want).abs() < 1e-12, "n={n}");
        }
    }

    #[test]
    fn csv_round_trip() {
        let t = increments_upto(50, &gaussian(), &SSet::empty(), &FSpec::norm_minus_one()).unwrap();
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        assert!(buf.starts_with(b"n,B,S\n1,"));
        let back = IncrementTable::read_csv(&buf[..], t.scale()).unwrap();
        assert_eq!(back, t);
        let mut again = Vec::new();
        back.write_csv(&mut again).unwrap();
        assert_eq!(buf, again);
        assert!(IncrementTable::read_csv(&b"n,B\n"[..], 1.0).is_err());
    }
}
