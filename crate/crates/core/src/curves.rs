//! Simple closed curves on the once-punctured torus as Farey slopes, measured
//! laminations, intersection numbers and continued-fraction approximation of
//! irrational laminations.

use crate::error::{Error, Result};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Bezout coefficients `(u, v)` with `u·a + v·b = gcd(a, b)`.
fn bezout(a: i64, b: i64) -> (i64, i64) {
    let (mut r0, mut r1) = (a, b);
    let (mut u0, mut u1) = (1i64, 0i64);
    let (mut v0, mut v1) = (0i64, 1i64);
    while r1 != 0 {
        let k = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - k * r1);
        (u0, u1) = (u1, u0 - k * u1);
        (v0, v1) = (v1, v0 - k * v1);
    }
    if r0 < 0 {
        (-u0, -v0)
    } else {
        (u0, v0)
    }
}

/// An unoriented essential simple closed curve, stored as the reduced
/// fraction `p/q` with `q > 0`, or `1/0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Slope {
    p: i64,
    q: i64,
}

impl Slope {
    pub const ZERO: Slope = Slope { p: 0, q: 1 };
    pub const INFINITY: Slope = Slope { p: 1, q: 0 };
    pub const ONE: Slope = Slope { p: 1, q: 1 };

    /// Reduces `p/q` and moves the sign to the numerator.
    pub fn new(p: i64, q: i64) -> Result<Slope> {
        if p == 0 && q == 0 {
            return Err(Error::ZeroSlope);
        }
        if q == 0 {
            return Ok(Slope::INFINITY);
        }
        let g = gcd(p, q);
        let (p, q) = (p / g, q / g);
        Ok(if q < 0 { Slope { p: -p, q: -q } } else { Slope { p, q } })
    }

    pub fn p(&self) -> i64 {
        self.p
    }

    pub fn q(&self) -> i64 {
        self.q
    }

    /// Oriented determinant `p_a·q_b − q_a·p_b` of the normalized representatives.
    pub fn determinant(&self, other: &Slope) -> i64 {
        self.p * other.q - self.q * other.p
    }

    pub fn is_farey_neighbor(&self, other: &Slope) -> bool {
        self.determinant(other).abs() == 1
    }

    pub fn farey_mediant(&self, other: &Slope) -> Result<Slope> {
        if !self.is_farey_neighbor(other) {
            return Err(Error::NotNeighbors(*self, *other));
        }
        Slope::new(self.p + other.p, self.q + other.q)
    }

    /// A Farey neighbour of `self` (a curve meeting it exactly once).
    pub fn dual(&self) -> Slope {
        if self.q == 0 {
            return Slope::ZERO;
        }
        // u·p + v·q = 1 gives p·u − q·(−v) = 1, i.e. (−v)/u is a neighbour
        let (u, v) = bezout(self.p, self.q);
        Slope::new(-v, u).expect("bezout coefficients are coprime")
    }

    /// Exact comparison of slope values on the extended real line; `1/0`
    /// compares greater than every finite slope.
    pub fn cmp_value(&self, other: &Slope) -> Ordering {
        match (self.q, other.q) {
            (0, 0) => Ordering::Equal,
            (0, _) => Ordering::Greater,
            (_, 0) => Ordering::Less,
            _ => (self.p as i128 * other.q as i128).cmp(&(other.p as i128 * self.q as i128)),
        }
    }

    pub fn value(&self) -> f64 {
        if self.q == 0 {
            f64::INFINITY
        } else {
            self.p as f64 / self.q as f64
        }
    }
}

impl fmt::Display for Slope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.p, self.q)
    }
}

impl FromStr for Slope {
    type Err = Error;
    fn from_str(s: &str) -> Result<Slope> {
        let bad = || Error::Parse(s.to_string());
        let (p, q) = s.trim().split_once('/').ok_or_else(bad)?;
        let p: i64 = p.trim().parse().map_err(|_| bad())?;
        let q: i64 = q.trim().parse().map_err(|_| bad())?;
        Slope::new(p, q)
    }
}

impl Serialize for Slope {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Slope {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A marking of the torus by a pair of Farey neighbours `(base, dual)`.
///
/// Frame coordinates are slopes relative to the marking: frame `0/1` is
/// `base`, frame `1/0` is `dual`, and frame `1/1` is the mediant
/// `base ⊕ dual`. The change of coordinates is the integral matrix with
/// columns `dual` and `base`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Frame {
    base: Slope,
    dual: Slope,
}

impl Frame {
    pub const STANDARD: Frame = Frame {
        base: Slope::ZERO,
        dual: Slope::INFINITY,
    };

    pub fn new(base: Slope, dual: Slope) -> Result<Frame> {
        if !base.is_farey_neighbor(&dual) {
            return Err(Error::NotNeighbors(base, dual));
        }
        Ok(Frame { base, dual })
    }

    /// The frame whose base curve is `base`, with its canonical dual.
    pub fn adapted(base: Slope) -> Frame {
        Frame {
            base,
            dual: base.dual(),
        }
    }

    pub fn base(&self) -> Slope {
        self.base
    }

    pub fn dual(&self) -> Slope {
        self.dual
    }

    pub fn third(&self) -> Slope {
        self.to_standard(Slope::ONE)
    }

    /// Frame coordinates to standard coordinates.
    pub fn to_standard(&self, s: Slope) -> Slope {
        let p = s.p * self.dual.p + s.q * self.base.p;
        let q = s.p * self.dual.q + s.q * self.base.q;
        Slope::new(p, q).expect("unimodular image of a slope")
    }

    /// Standard coordinates to frame coordinates.
    pub fn from_standard(&self, s: Slope) -> Slope {
        // inverse of [[dual.p, base.p], [dual.q, base.q]]
        let det = self.dual.p * self.base.q - self.base.p * self.dual.q;
        let p = (self.base.q * s.p - self.base.p * s.q) * det;
        let q = (-self.dual.q * s.p + self.dual.p * s.q) * det;
        Slope::new(p, q).expect("unimodular image of a slope")
    }
}

/// An irrational slope given by its continued-fraction expansion
/// `[a0; a1, a2, ...]`.
///
/// The expansion is `head` followed by `period` repeated forever (an empty
/// period makes it finite). `truncation` is the number of partial quotients
/// used for serialization and as the finest available convergent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IrrationalSlope {
    head: Vec<i64>,
    period: Vec<i64>,
    truncation: usize,
}

impl IrrationalSlope {
    pub fn new(head: Vec<i64>, period: Vec<i64>, truncation: usize) -> Result<Self> {
        if head.is_empty() {
            return Err(Error::Parse("continued fraction needs a0".into()));
        }
        let available = if period.is_empty() { head.len() } else { usize::MAX };
        if truncation == 0 || truncation > available {
            return Err(Error::Truncated {
                available,
                requested: truncation,
            });
        }
        let s = IrrationalSlope {
            head,
            period,
            truncation,
        };
        for index in 1..s.head.len() + s.period.len() {
            let value = s.partial_quotient(index).unwrap_or(1);
            if value <= 0 {
                return Err(Error::PartialQuotient { index, value });
            }
        }
        Ok(s)
    }

    /// `[1; 1, 1, ...]`, the golden ratio.
    pub fn golden(truncation: usize) -> Self {
        IrrationalSlope::new(vec![1], vec![1], truncation).expect("valid expansion")
    }

    /// `[2; 2, 2, ...] = 1 + √2`.
    pub fn silver(truncation: usize) -> Self {
        IrrationalSlope::new(vec![2], vec![2], truncation).expect("valid expansion")
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn with_truncation(&self, truncation: usize) -> Result<Self> {
        IrrationalSlope::new(self.head.clone(), self.period.clone(), truncation)
    }

    pub fn partial_quotient(&self, index: usize) -> Option<i64> {
        if index < self.head.len() {
            Some(self.head[index])
        } else if self.period.is_empty() {
            None
        } else {
            Some(self.period[(index - self.head.len()) % self.period.len()])
        }
    }

    /// The first `n` convergents `p_k/q_k`.
    pub fn convergents(&self, n: usize) -> Result<Vec<Slope>> {
        let mut out = Vec::with_capacity(n);
        let (mut p_prev, mut p) = (0i64, 1i64);
        let (mut q_prev, mut q) = (1i64, 0i64);
        for k in 0..n {
            let a = self.partial_quotient(k).ok_or(Error::Truncated {
                available: k,
                requested: n,
            })?;
            let p_next = a.checked_mul(p).and_then(|v| v.checked_add(p_prev));
            let q_next = a.checked_mul(q).and_then(|v| v.checked_add(q_prev));
            let (Some(p_next), Some(q_next)) = (p_next, q_next) else {
                return Err(Error::Truncated {
                    available: k,
                    requested: n,
                });
            };
            (p_prev, p) = (p, p_next);
            (q_prev, q) = (q, q_next);
            out.push(Slope::new(p, q)?);
        }
        Ok(out)
    }

    pub fn convergent(&self, index: usize) -> Result<Slope> {
        Ok(*self.convergents(index + 1)?.last().expect("n ≥ 1"))
    }

    /// Value from the finest convergent that fits in `i64` arithmetic.
    pub fn value(&self) -> f64 {
        let mut best = self.head[0] as f64;
        let limit = if self.period.is_empty() { self.head.len() } else { 80 };
        for n in 1..=limit {
            match self.convergents(n) {
                Ok(c) => best = c[n - 1].value(),
                Err(_) => break,
            }
        }
        best
    }

    fn quotients(&self) -> Vec<i64> {
        (0..self.truncation)
            .map(|k| self.partial_quotient(k).expect("within truncation"))
            .collect()
    }
}

impl fmt::Display for IrrationalSlope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let a = self.quotients();
        let tail: Vec<String> = a[1..].iter().map(|v| v.to_string()).collect();
        write!(f, "[{};{}]x{}", a[0], tail.join(","), self.truncation)
    }
}

impl FromStr for IrrationalSlope {
    type Err = Error;

    /// Parses `[a0;a1,...,ak]xN`. When `N` exceeds the number of listed
    /// quotients, the block `a1..ak` repeats periodically.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(s.to_string());
        let s = s.trim();
        let (body, n) = s.rsplit_once(']').ok_or_else(bad)?;
        let body = body.strip_prefix('[').ok_or_else(bad)?;
        let (a0, rest) = body.split_once(';').unwrap_or((body, ""));
        let a0: i64 = a0.trim().parse().map_err(|_| bad())?;
        let tail: Vec<i64> = rest
            .split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(|t| t.parse().map_err(|_| bad()))
            .collect::<Result<_>>()?;
        let listed = 1 + tail.len();
        let n = match n.trim() {
            "" => listed,
            t => t.strip_prefix('x').ok_or_else(bad)?.parse().map_err(|_| bad())?,
        };
        if n <= listed {
            let mut head = vec![a0];
            head.extend(tail);
            IrrationalSlope::new(head, Vec::new(), n)
        } else {
            if tail.is_empty() {
                return Err(bad());
            }
            IrrationalSlope::new(vec![a0], tail, n)
        }
    }
}

impl Serialize for IrrationalSlope {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for IrrationalSlope {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Support {
    Rational(Slope),
    Irrational(IrrationalSlope),
}

impl fmt::Display for Support {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Support::Rational(s) => s.fmt(f),
            Support::Irrational(s) => s.fmt(f),
        }
    }
}

/// A weighted simple closed curve `weight · δ_slope`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightedCurve {
    pub slope: Slope,
    pub weight: f64,
}

impl WeightedCurve {
    pub fn unit(slope: Slope) -> Self {
        WeightedCurve { slope, weight: 1.0 }
    }

    pub fn intersection(&self, other: &WeightedCurve) -> f64 {
        self.weight * other.weight * self.slope.determinant(&other.slope).abs() as f64
    }
}

/// A measured lamination on the punctured torus. Its projective class is
/// determined by the support alone.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Lamination {
    support: Support,
    weight: f64,
}

/// An intersection number together with the convergent index it was
/// evaluated at (`None` when both supports are rational).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Intersection {
    pub value: f64,
    pub convergent_index: Option<usize>,
}

impl Lamination {
    pub fn new(support: Support, weight: f64) -> Result<Self> {
        if !(weight > 0.0 && weight.is_finite()) {
            return Err(Error::Precondition(format!(
                "lamination weight must be positive, got {weight}"
            )));
        }
        Ok(Lamination { support, weight })
    }

    /// `weight · δ_slope`.
    pub fn rational(slope: Slope, weight: f64) -> Result<Self> {
        Lamination::new(Support::Rational(slope), weight)
    }

    /// The unit lamination `δ_slope`.
    pub fn delta(slope: Slope) -> Self {
        Lamination {
            support: Support::Rational(slope),
            weight: 1.0,
        }
    }

    /// The irrational lamination normalized so that its intersection with
    /// `1/0` equals `weight`: the limit of `(weight/q_k)·δ_{p_k/q_k}`.
    pub fn irrational(slope: IrrationalSlope, weight: f64) -> Result<Self> {
        Lamination::new(Support::Irrational(slope), weight)
    }

    pub fn support(&self) -> &Support {
        &self.support
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Lamination::new(self.support.clone(), self.weight * factor)
    }

    pub fn same_class(&self, other: &Lamination) -> bool {
        match (&self.support, &other.support) {
            (Support::Rational(a), Support::Rational(b)) => a == b,
            (Support::Irrational(a), Support::Irrational(b)) => {
                let n = a.truncation.min(b.truncation);
                (0..n).all(|k| a.partial_quotient(k) == b.partial_quotient(k))
            }
            _ => false,
        }
    }

    /// The `index`-th rational approximant `(weight/q)·δ_{p/q}`; rational
    /// laminations are their own approximants.
    pub fn approximant(&self, index: usize) -> Result<WeightedCurve> {
        match &self.support {
            Support::Rational(slope) => Ok(WeightedCurve {
                slope: *slope,
                weight: self.weight,
            }),
            Support::Irrational(s) => {
                let slope = s.convergent(index)?;
                Ok(WeightedCurve {
                    slope,
                    weight: self.weight / slope.q() as f64,
                })
            }
        }
    }

    /// The finest approximant: the lamination itself when rational, the
    /// convergent at the truncation index otherwise.
    pub fn finest_approximant(&self) -> Result<(WeightedCurve, Option<usize>)> {
        match &self.support {
            Support::Rational(_) => Ok((self.approximant(0)?, None)),
            Support::Irrational(s) => {
                let index = finest_index(s);
                Ok((self.approximant(index)?, Some(index)))
            }
        }
    }
}

/// Largest convergent index within the truncation whose denominators stay
/// inside exact `i64` arithmetic.
fn finest_index(s: &IrrationalSlope) -> usize {
    let mut index = 0;
    for n in 1..=s.truncation {
        if s.convergents(n).is_err() {
            break;
        }
        index = n - 1;
    }
    index
}

impl fmt::Display for Lamination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.weight == 1.0 {
            write!(f, "δ[{}]", self.support)
        } else {
            write!(f, "{}·δ[{}]", self.weight, self.support)
        }
    }
}

/// Geometric intersection number. Irrational supports are evaluated at their
/// finest convergent, reported in the result.
pub fn intersection(m: &Lamination, n: &Lamination) -> Intersection {
    if m.same_class(n) {
        return Intersection {
            value: 0.0,
            convergent_index: match (&m.support, &n.support) {
                (Support::Irrational(s), _) => Some(finest_index(s)),
                _ => None,
            },
        };
    }
    let (a, ia) = m.finest_approximant().expect("finest index is available");
    let (b, ib) = n.finest_approximant().expect("finest index is available");
    let determinant = a.slope.determinant(&b.slope).abs() as f64;
    Intersection {
        value: a.weight * b.weight * determinant,
        convergent_index: ia.max(ib),
    }
}
