//! Exact graded characters `t^offset * P(t) / (1-t)^rank`.
//!
//! `P` has integer coefficients and non-negative integer exponents; the rational
//! offset carries the lowest-weight shift so that characters of modules in one
//! block (whose weights differ by integers) can be added exactly.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::rational::{format_rational, parse_rational};

/// A graded character in canonical form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedCharacter {
    offset: BigRational,
    numerator: BTreeMap<i64, BigInt>,
    rank: u32,
}

/// Result of cancelling factors of `(1-t)` against the denominator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PoleOrder {
    /// Order of the pole at `t = 1`.
    pub order: u32,
    /// The same character with every cancellable `(1-t)` removed; its rank equals `order`.
    pub reduced: GradedCharacter,
}

impl GradedCharacter {
    /// The zero character with the given denominator power.
    pub fn zero(rank: u32) -> Self {
        GradedCharacter {
            offset: BigRational::zero(),
            numerator: BTreeMap::new(),
            rank,
        }
    }

    /// `coeff * t^exponent / (1-t)^rank`.
    pub fn monomial(exponent: BigRational, coeff: impl Into<BigInt>, rank: u32) -> Self {
        Self::from_terms(rank, [(exponent, coeff.into())]).expect("a single term is always compatible")
    }

    /// Builds `Σ c t^e / (1-t)^rank`; all exponent gaps must be integers.
    pub fn from_terms<I>(rank: u32, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (BigRational, BigInt)>,
    {
        let terms: Vec<(BigRational, BigInt)> = terms.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        let Some(base) = terms.iter().map(|(e, _)| e.clone()).min() else {
            return Ok(Self::zero(rank));
        };
        let mut numerator = BTreeMap::new();
        for (e, c) in terms {
            let gap = &e - &base;
            if !gap.is_integer() {
                return Err(Error::Incompatible(format!(
                    "exponents {} and {} differ by a non-integer",
                    format_rational(&e),
                    format_rational(&base)
                )));
            }
            let k = gap
                .to_integer()
                .to_i64()
                .ok_or_else(|| Error::Incompatible("exponent gap does not fit in 64 bits".into()))?;
            *numerator.entry(k).or_insert_with(BigInt::zero) += c;
        }
        Ok(Self::normalized(base, numerator, rank))
    }

    /// Builds a character from an offset and coefficients of `1, t, t^2, ...`.
    pub fn from_coefficients<C: Into<BigInt>>(
        offset: BigRational,
        coefficients: impl IntoIterator<Item = C>,
        rank: u32,
    ) -> Self {
        let numerator = coefficients
            .into_iter()
            .enumerate()
            .map(|(k, c)| (k as i64, c.into()))
            .collect();
        Self::normalized(offset, numerator, rank)
    }

    fn normalized(offset: BigRational, numerator: BTreeMap<i64, BigInt>, rank: u32) -> Self {
        let numerator: BTreeMap<i64, BigInt> = numerator.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        let Some(&low) = numerator.keys().next() else {
            return Self::zero(rank);
        };
        let offset = offset + BigRational::from_integer(BigInt::from(low));
        let numerator = numerator.into_iter().map(|(k, c)| (k - low, c)).collect();
        GradedCharacter {
            offset,
            numerator,
            rank,
        }
    }

    pub fn offset(&self) -> &BigRational {
        &self.offset
    }

    pub fn rank(&self) -> u32 {
        self.rank
    }

    pub fn is_zero(&self) -> bool {
        self.numerator.is_empty()
    }

    /// Numerator coefficients of `1, t, ..., t^deg` (dense, zeros included).
    pub fn coefficients(&self) -> Vec<BigInt> {
        let deg = self.degree().unwrap_or(-1);
        (0..=deg)
            .map(|k| self.numerator.get(&k).cloned().unwrap_or_default())
            .collect()
    }

    /// Degree of the numerator, `None` for the zero character.
    pub fn degree(&self) -> Option<i64> {
        self.numerator.keys().next_back().copied()
    }

    /// Exact sum; ranks must agree and offsets must differ by an integer.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.rank != other.rank {
            return Err(Error::Incompatible(format!(
                "denominator powers {} and {} differ",
                self.rank, other.rank
            )));
        }
        if self.is_zero() {
            return Ok(other.clone());
        }
        if other.is_zero() {
            return Ok(self.clone());
        }
        let terms = self.terms().chain(other.terms());
        Self::from_terms(self.rank, terms)
    }

    /// Multiplies every coefficient by `k`.
    pub fn scale(&self, k: &BigInt) -> Self {
        let numerator = self.numerator.iter().map(|(e, c)| (*e, c * k)).collect();
        Self::normalized(self.offset.clone(), numerator, self.rank)
    }

    fn terms(&self) -> impl Iterator<Item = (BigRational, BigInt)> + '_ {
        self.numerator
            .iter()
            .map(|(k, c)| (&self.offset + BigRational::from_integer(BigInt::from(*k)), c.clone()))
    }

    /// Multiplies the numerator by `(1-t)`, keeping the denominator.
    pub fn mul_one_minus_t(&self) -> Self {
        let mut numerator: BTreeMap<i64, BigInt> = BTreeMap::new();
        for (k, c) in &self.numerator {
            *numerator.entry(*k).or_default() += c;
            *numerator.entry(*k + 1).or_default() -= c;
        }
        Self::normalized(self.offset.clone(), numerator, self.rank)
    }

    /// Numerator evaluated at `t = 1`.
    pub fn numerator_at_one(&self) -> BigInt {
        self.numerator.values().sum()
    }

    /// Divides the numerator by `(1-t)` if it vanishes at `t = 1` (synthetic division).
    fn divide_one_minus_t(numerator: &BTreeMap<i64, BigInt>) -> Option<BTreeMap<i64, BigInt>> {
        let total: BigInt = numerator.values().sum();
        if !total.is_zero() {
            return None;
        }
        let deg = *numerator.keys().next_back()?;
        let mut running = BigInt::zero();
        let mut quotient = BTreeMap::new();
        for k in 0..deg {
            if let Some(c) = numerator.get(&k) {
                running += c;
            }
            if !running.is_zero() {
                quotient.insert(k, running.clone());
            }
        }
        Some(quotient)
    }

    /// Order of the pole at `t = 1` and the reduced character.
    pub fn pole_order_at_one(&self) -> Result<PoleOrder> {
        if self.is_zero() {
            return Err(Error::ZeroCharacter);
        }
        let mut numerator = self.numerator.clone();
        let mut order = self.rank;
        while order > 0 {
            match Self::divide_one_minus_t(&numerator) {
                Some(q) => {
                    numerator = q;
                    order -= 1;
                }
                None => break,
            }
        }
        Ok(PoleOrder {
            order,
            reduced: Self::normalized(self.offset.clone(), numerator, order),
        })
    }

    /// Dimension of the module when the character is a Laurent polynomial.
    pub fn dimension_if_finite(&self) -> Result<Option<BigInt>> {
        let pole = self.pole_order_at_one()?;
        Ok((pole.order == 0).then(|| pole.reduced.numerator_at_one()))
    }

    /// Coefficient of `t^(offset + n)` in the power-series expansion.
    pub fn series_coefficient(&self, n: i64) -> BigInt {
        if n < 0 {
            return BigInt::zero();
        }
        if self.rank == 0 {
            return self.numerator.get(&n).cloned().unwrap_or_default();
        }
        let r = self.rank as i64;
        self.numerator
            .range(..=n)
            .map(|(k, c)| c * binomial(n - k + r - 1, r - 1))
            .sum()
    }

    /// Graded dimensions `(offset + n, dim)` for `n = 0..=upto`.
    pub fn graded_dims(&self, upto: u32) -> Vec<(BigRational, BigInt)> {
        (0..=upto as i64)
            .map(|n| {
                (
                    &self.offset + BigRational::from_integer(BigInt::from(n)),
                    self.series_coefficient(n),
                )
            })
            .collect()
    }

    /// Graded dimension in absolute degree `degree` (zero outside the support).
    pub fn dim_in_degree(&self, degree: &BigRational) -> BigInt {
        let gap = degree - &self.offset;
        if !gap.is_integer() {
            return BigInt::zero();
        }
        match gap.to_integer().to_i64() {
            Some(n) => self.series_coefficient(n),
            None => BigInt::zero(),
        }
    }

    /// Laurent-polynomial rendering grouping symmetric pairs, e.g. `56(t^-2+t^2)+448(t^-1+t)+720`.
    ///
    /// Returns `None` unless the character has rank 0 and its exponents are integers.
    pub fn laurent_form(&self) -> Option<String> {
        if self.rank != 0 || !self.offset.is_integer() {
            return None;
        }
        if self.is_zero() {
            return Some("0".into());
        }
        let base = self.offset.to_integer().to_i64()?;
        let coeff: BTreeMap<i64, BigInt> = self.numerator.iter().map(|(k, c)| (k + base, c.clone())).collect();
        let mut parts: Vec<(BigInt, String)> = Vec::new();
        let mut done = std::collections::BTreeSet::new();
        for (e, c) in &coeff {
            if done.contains(e) {
                continue;
            }
            if *e < 0 && coeff.get(&-e) == Some(c) {
                done.insert(-e);
                let inner = if *e == -1 {
                    "t^-1+t".to_string()
                } else {
                    format!("t^{}+t^{}", e, -e)
                };
                parts.push((c.clone(), format!("({inner})")));
            } else {
                let body = match e {
                    0 => String::new(),
                    1 => "t".into(),
                    e => format!("t^{e}"),
                };
                parts.push((c.clone(), body));
            }
        }
        let mut out = String::new();
        for (i, (c, body)) in parts.iter().enumerate() {
            let sign = if c.is_negative() {
                "-"
            } else if i > 0 {
                "+"
            } else {
                ""
            };
            let mag = c.abs();
            let coeff_str = if mag.is_one() && !body.is_empty() {
                String::new()
            } else {
                mag.to_string()
            };
            out.push_str(sign);
            out.push_str(&coeff_str);
            out.push_str(body);
        }
        Some(out)
    }
}

/// `binom(n, k)` as a big integer (zero when out of range).
pub fn binomial(n: i64, k: i64) -> BigInt {
    if k < 0 || n < k || n < 0 {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

impl fmt::Display for GradedCharacter {
    /// Canonical text form `t^(p/q) * (c0 + c1*t + ...) / (1-t)^r`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "t^({}) * (", format_rational(&self.offset))?;
        if self.is_zero() {
            write!(f, "0")?;
        }
        for (i, (k, c)) in self.numerator.iter().enumerate() {
            let mag = c.abs();
            if i == 0 {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            match k {
                0 => write!(f, "{mag}")?,
                1 => write!(f, "{mag}*t")?,
                k => write!(f, "{mag}*t^{k}")?,
            }
        }
        write!(f, ") / (1-t)^{}", self.rank)
    }
}

impl FromStr for GradedCharacter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |m: &str| Error::schema("character text", m.to_string());
        let s = s.trim();
        let rest = s.strip_prefix("t^(").ok_or_else(|| bad("expected `t^(`"))?;
        let close = rest.find(')').ok_or_else(|| bad("unclosed offset"))?;
        let offset = parse_rational(&rest[..close])?;
        let rest = rest[close + 1..].trim_start();
        let rest = rest.strip_prefix('*').ok_or_else(|| bad("expected `*`"))?.trim_start();
        let rest = rest.strip_prefix('(').ok_or_else(|| bad("expected `(`"))?;
        let close = rest.find(')').ok_or_else(|| bad("unclosed numerator"))?;
        let body = &rest[..close];
        let tail = rest[close + 1..].trim();
        let rank_str = tail
            .strip_prefix('/')
            .map(str::trim)
            .and_then(|t| t.strip_prefix("(1-t)^"))
            .ok_or_else(|| bad("expected `/ (1-t)^r`"))?;
        let rank: u32 = rank_str.trim().parse().map_err(|_| bad("bad denominator power"))?;
        let mut numerator = BTreeMap::new();
        let compact: String = body.chars().filter(|c| !c.is_whitespace()).collect();
        if compact != "0" {
            let mut term = String::new();
            let mut terms = Vec::new();
            for (i, ch) in compact.chars().enumerate() {
                if (ch == '+' || ch == '-') && i > 0 && !term.ends_with('^') {
                    terms.push(std::mem::take(&mut term));
                }
                term.push(ch);
            }
            terms.push(term);
            for t in terms {
                let (coef, power) = match t.split_once('*') {
                    Some((c, p)) => {
                        let k = match p {
                            "t" => 1,
                            p => p
                                .strip_prefix("t^")
                                .and_then(|e| e.parse::<i64>().ok())
                                .ok_or_else(|| bad("bad power of t"))?,
                        };
                        (c.to_string(), k)
                    }
                    None => (t.clone(), 0),
                };
                let coef: BigInt = coef
                    .trim_start_matches('+')
                    .parse()
                    .map_err(|_| bad("bad coefficient"))?;
                *numerator.entry(power).or_insert_with(BigInt::zero) += coef;
            }
        }
        let parsed = Self::normalized(offset, numerator, rank);
        Ok(parsed)
    }
}

/// Greatest common divisor of the numerator coefficients (zero for the zero character).
pub fn content(x: &GradedCharacter) -> BigInt {
    x.numerator.values().fold(BigInt::zero(), |g, c| g.gcd(c))
}
