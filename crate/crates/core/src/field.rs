//! Base fields, prime ideals, and the ordered prime-ideal stream with an exclusion set.
//!
//! Only the rationals and quadratic fields are supported. A prime ideal is identified by
//! the rational prime below it, its residue degree, and (for split primes) which of the
//! two conjugate ideals it is. Every formula downstream depends only on the norm, so no
//! ideal arithmetic is needed.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::sieve::{is_prime, isqrt, rational_primes};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FieldKind {
    Rationals,
    /// `Q(sqrt d)` with `d` squarefree and `d != 0, 1`.
    Quadratic(i64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldSpec {
    kind: FieldKind,
    discriminant: i64,
    degree: u32,
}

impl FieldSpec {
    pub const fn rationals() -> Self {
        Self {
            kind: FieldKind::Rationals,
            discriminant: 1,
            degree: 1,
        }
    }

    pub fn quadratic(d: i64) -> Result<Self> {
        if d == 0 || d == 1 {
            return Err(Error::config(format!(
                "Q(sqrt{d}) is not a quadratic field"
            )));
        }
        if !is_squarefree(d) {
            return Err(Error::config(format!("{d} is not squarefree")));
        }
        let discriminant = if d.rem_euclid(4) == 1 { d } else { 4 * d };
        Ok(Self {
            kind: FieldKind::Quadratic(d),
            discriminant,
            degree: 2,
        })
    }

    pub fn kind(&self) -> FieldKind {
        self.kind
    }

    pub fn discriminant(&self) -> i64 {
        self.discriminant
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn splitting_type(&self, p: u64) -> Result<SplittingType> {
        if !is_prime(p) {
            return Err(Error::domain(format!("{p} is not prime")));
        }
        Ok(self.splitting_type_unchecked(p))
    }

    fn splitting_type_unchecked(&self, p: u64) -> SplittingType {
        match self.kind {
            FieldKind::Rationals => SplittingType::Rational,
            FieldKind::Quadratic(_) => match kronecker_unchecked(self.discriminant, p) {
                0 => SplittingType::Ramified,
                1 => SplittingType::Split,
                _ => SplittingType::Inert,
            },
        }
    }
}

fn is_squarefree(d: i64) -> bool {
    let mut n = d.unsigned_abs();
    let mut q = 2u64;
    while q * q <= n {
        if n.is_multiple_of(q) {
            n /= q;
            if n.is_multiple_of(q) {
                return false;
            }
        }
        q += 1;
    }
    true
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            FieldKind::Rationals => write!(f, "Q"),
            FieldKind::Quadratic(d) => write!(f, "Q(sqrt{d})"),
        }
    }
}

impl FromStr for FieldSpec {
    type Err = Error;

    /// Accepts `Q` and `Q(sqrt<d>)`, e.g. `Q(sqrt-1)`, `Q(sqrt5)`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "Q" {
            return Ok(Self::rationals());
        }
        let d = s
            .strip_prefix("Q(sqrt")
            .and_then(|rest| rest.strip_suffix(')'))
            .ok_or_else(|| {
                Error::config(format!(
                    "cannot parse field {s:?}; expected Q or Q(sqrt<d>)"
                ))
            })?;
        let d: i64 = d
            .trim()
            .parse()
            .map_err(|_| Error::config(format!("bad radicand in field {s:?}")))?;
        Self::quadratic(d)
    }
}

impl Serialize for FieldSpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for FieldSpec {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SplittingType {
    Split,
    Inert,
    Ramified,
    Rational,
}

/// Kronecker symbol `(d|p)` for a prime `p`.
///
/// For `p = 2`: 0 if `d` is even, +1 if `d ≡ ±1 (mod 8)`, −1 if `d ≡ ±3 (mod 8)`.
pub fn kronecker_symbol(d: i64, p: u64) -> Result<i8> {
    if !is_prime(p) {
        return Err(Error::domain(format!("{p} is not prime")));
    }
    Ok(kronecker_unchecked(d, p))
}

fn kronecker_unchecked(d: i64, p: u64) -> i8 {
    if p == 2 {
        return match d.rem_euclid(8) {
            1 | 7 => 1,
            3 | 5 => -1,
            _ => 0,
        };
    }
    let a = d.rem_euclid(p as i64) as u64;
    if a == 0 {
        return 0;
    }
    // Euler's criterion.
    if pow_mod(a, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

fn pow_mod(base: u64, mut exp: u64, m: u64) -> u64 {
    let m = m as u128;
    let mut acc: u128 = 1;
    let mut b = base as u128 % m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        exp >>= 1;
    }
    acc as u64
}

/// A nonzero prime ideal, identified by `(p, residue_degree, index)`.
///
/// `index` distinguishes the two conjugate ideals above a split prime and is 0 otherwise.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct PrimeIdeal {
    pub p: u64,
    pub residue_degree: u8,
    pub index: u8,
    pub norm: u64,
    pub log_norm: f64,
}

impl PrimeIdeal {
    pub fn new(p: u64, residue_degree: u8, index: u8) -> Self {
        let norm = p.pow(residue_degree as u32);
        Self {
            p,
            residue_degree,
            index,
            norm,
            log_norm: (norm as f64).ln(),
        }
    }

    fn key(&self) -> (u64, u64, u8) {
        (self.norm, self.p, self.index)
    }
}

impl PartialEq for PrimeIdeal {
    fn eq(&self, other: &Self) -> bool {
        self.key() == other.key()
    }
}

impl Eq for PrimeIdeal {}

impl Hash for PrimeIdeal {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.key().hash(state);
    }
}

impl PartialOrd for PrimeIdeal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Nondecreasing norm, ties by `(p, index)`.
impl Ord for PrimeIdeal {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key().cmp(&other.key())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Exclusion {
    /// Every prime ideal above `p`.
    AllAbove,
    /// The first ideal (index 0) of a split pair; the conjugate stays.
    OneOfSplitPair,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SEntry {
    pub p: u64,
    pub which: Exclusion,
}

/// The finite set S of excluded prime ideals.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SSet {
    entries: Vec<SEntry>,
}

impl SSet {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn new(entries: impl IntoIterator<Item = SEntry>) -> Result<Self> {
        let mut out: Vec<SEntry> = Vec::new();
        for e in entries {
            if !is_prime(e.p) {
                return Err(Error::config(format!("S entry {} is not prime", e.p)));
            }
            if out.iter().any(|o| o.p == e.p) {
                return Err(Error::config(format!("S lists the prime {} twice", e.p)));
            }
            out.push(e);
        }
        out.sort_by_key(|e| e.p);
        Ok(Self { entries: out })
    }

    pub fn entries(&self) -> &[SEntry] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Checks that every `OneOfSplitPair` entry sits over a split prime of `field`.
    pub fn validate(&self, field: &FieldSpec) -> Result<()> {
        for e in &self.entries {
            if e.which == Exclusion::OneOfSplitPair
                && field.splitting_type_unchecked(e.p) != SplittingType::Split
            {
                return Err(Error::config(format!(
                    "S entry {}:one requires {} to split in {field}",
                    e.p, e.p
                )));
            }
        }
        Ok(())
    }

    pub fn excludes(&self, ideal: &PrimeIdeal) -> bool {
        self.entries
            .binary_search_by_key(&ideal.p, |e| e.p)
            .map(|i| match self.entries[i].which {
                Exclusion::AllAbove => true,
                Exclusion::OneOfSplitPair => ideal.index == 0,
            })
            .unwrap_or(false)
    }

    /// Ideals of `field` removed by S.
    pub fn ideals(&self, field: &FieldSpec) -> Vec<PrimeIdeal> {
        self.entries
            .iter()
            .flat_map(|e| ideals_above(field, e.p))
            .filter(|i| self.excludes(i))
            .collect()
    }
}

impl fmt::Display for SSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.entries.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}", e.p)?;
            if e.which == Exclusion::OneOfSplitPair {
                f.write_str(":one")?;
            }
        }
        Ok(())
    }
}

impl FromStr for SSet {
    type Err = Error;

    /// Comma-separated primes, each optionally suffixed `:one`, e.g. `2,5:one`.
    fn from_str(s: &str) -> Result<Self> {
        let mut entries = Vec::new();
        for tok in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let (num, which) = match tok.split_once(':') {
                Some((num, "one")) => (num, Exclusion::OneOfSplitPair),
                Some((_, suffix)) => {
                    return Err(Error::config(format!(
                        "unknown S suffix {suffix:?} in {tok:?}"
                    )))
                }
                None => (tok, Exclusion::AllAbove),
            };
            let p: u64 = num
                .trim()
                .parse()
                .map_err(|_| Error::config(format!("bad S entry {tok:?}")))?;
            entries.push(SEntry { p, which });
        }
        Self::new(entries)
    }
}

/// The prime ideals of `field` above the rational prime `p`.
pub fn ideals_above(field: &FieldSpec, p: u64) -> Vec<PrimeIdeal> {
    match field.splitting_type_unchecked(p) {
        SplittingType::Rational | SplittingType::Ramified => vec![PrimeIdeal::new(p, 1, 0)],
        SplittingType::Split => vec![PrimeIdeal::new(p, 1, 0), PrimeIdeal::new(p, 1, 1)],
        SplittingType::Inert => vec![PrimeIdeal::new(p, 2, 0)],
    }
}

/// Every prime ideal of `field` with norm `<= norm_bound`, not in `s`, in nondecreasing
/// norm order (ties by `(p, index)`).
pub fn prime_ideal_stream(field: &FieldSpec, s: &SSet, norm_bound: u64) -> Result<Vec<PrimeIdeal>> {
    s.validate(field)?;
    if norm_bound < 2 {
        return Ok(Vec::new());
    }
    let primes = rational_primes(norm_bound);
    let keep = |i: &PrimeIdeal| !s.excludes(i);
    if field.kind == FieldKind::Rationals {
        return Ok(primes
            .into_iter()
            .map(|p| PrimeIdeal::new(p, 1, 0))
            .filter(keep)
            .collect());
    }

    // Degree-one ideals come in rational-prime order; inert ideals (norm p^2) form a
    // second sorted run. A norm p can never equal a norm q^2, so merging on norm suffices.
    let mut linear = Vec::with_capacity(primes.len() + primes.len() / 2);
    let mut inert = Vec::new();
    let root = isqrt(norm_bound);
    for &p in &primes {
        match field.splitting_type_unchecked(p) {
            SplittingType::Inert => {
                if p <= root {
                    inert.push(PrimeIdeal::new(p, 2, 0));
                }
            }
            _ => linear.extend(ideals_above(field, p)),
        }
    }
    let mut out = Vec::with_capacity(linear.len() + inert.len());
    let (mut a, mut b) = (linear.into_iter().peekable(), inert.into_iter().peekable());
    loop {
        let next = match (a.peek(), b.peek()) {
            (Some(x), Some(y)) => {
                if x <= y {
                    a.next()
                } else {
                    b.next()
                }
            }
            (Some(_), None) => a.next(),
            (None, Some(_)) => b.next(),
            (None, None) => break,
        };
        let ideal = next.expect("peeked");
        if keep(&ideal) {
            out.push(ideal);
        }
    }
    Ok(out)
}
