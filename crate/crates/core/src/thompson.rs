//! Thompson's group F as piecewise-linear homeomorphisms of `[0,1]`.
//!
//! An element is stored as its canonical breakpoint list: dyadic
//! coordinates, power-of-two slopes, and no breakpoint between two
//! segments of equal slope. Two elements are equal exactly when their
//! breakpoint lists are equal.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dyadic::{Dyadic, NumberParseError, Rational};
use crate::group::Group;
use crate::interval::{Interval, IntervalSet};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PlError {
    #[error("breakpoint list must start at (0,0) and end at (1,1)")]
    MissingEndpoints,
    #[error("coordinates must be strictly increasing (at breakpoint {0})")]
    NotMonotone(usize),
    #[error("slope of segment {0} is not a power of 2")]
    BadSlope(usize),
    #[error("point {0} is outside [0,1]")]
    OutOfRange(String),
    #[error("need 0 <= a < b <= 1, got [{0}, {1}]")]
    BadInterval(Dyadic, Dyadic),
    #[error("bad partition: {0}")]
    BadPartition(String),
    #[error(transparent)]
    Number(#[from] NumberParseError),
    #[error("breakpoint coordinate {0} is not dyadic")]
    NotDyadic(String),
    #[error("malformed element: {0}")]
    Syntax(String),
}

/// An element of Thompson's group F.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PlHomeo {
    pts: Vec<(Dyadic, Dyadic)>,
    /// `slopes[i]` is the base-2 log of the slope on `[pts[i], pts[i+1]]`.
    slopes: Vec<i64>,
}

fn mul_pow2_rational(q: &Rational, k: i64) -> Rational {
    if k >= 0 {
        q * Rational::from_integer(BigInt::one() << k as usize)
    } else {
        q / Rational::from_integer(BigInt::one() << (-k) as usize)
    }
}

impl PlHomeo {
    pub fn identity() -> Self {
        PlHomeo {
            pts: vec![(Dyadic::zero(), Dyadic::zero()), (Dyadic::one(), Dyadic::one())],
            slopes: vec![0],
        }
    }

    /// Validates a breakpoint list and drops redundant breakpoints.
    pub fn from_breakpoints(pts: Vec<(Dyadic, Dyadic)>) -> Result<Self, PlError> {
        let zero = Dyadic::zero();
        let one = Dyadic::one();
        match (pts.first(), pts.last()) {
            (Some(f), Some(l)) if pts.len() >= 2 && f == &(zero.clone(), zero.clone()) && l == &(one.clone(), one.clone()) => {}
            _ => return Err(PlError::MissingEndpoints),
        }
        for (x, y) in &pts {
            for c in [x, y] {
                if c < &zero || c > &one {
                    return Err(PlError::OutOfRange(c.to_string()));
                }
            }
        }
        let mut slopes = Vec::with_capacity(pts.len() - 1);
        for (i, w) in pts.windows(2).enumerate() {
            let dx = &w[1].0 - &w[0].0;
            let dy = &w[1].1 - &w[0].1;
            if !dx.is_positive() || !dy.is_positive() {
                return Err(PlError::NotMonotone(i + 1));
            }
            slopes.push(dy.log2_ratio(&dx).ok_or(PlError::BadSlope(i))?);
        }
        Ok(Self::canonical(pts, slopes))
    }

    /// Like [`PlHomeo::from_breakpoints`] for arbitrary rational coordinates.
    /// Slopes are checked before dyadicity, so `(1/2, 1/3)` reports `BadSlope`.
    pub fn from_rational_breakpoints(pts: &[(Rational, Rational)]) -> Result<Self, PlError> {
        let zero = Rational::zero();
        let one = Rational::one();
        if pts.len() < 2
            || pts[0] != (zero.clone(), zero.clone())
            || pts[pts.len() - 1] != (one.clone(), one.clone())
        {
            return Err(PlError::MissingEndpoints);
        }
        for (x, y) in pts {
            for c in [x, y] {
                if c < &zero || c > &one {
                    return Err(PlError::OutOfRange(crate::dyadic::format_rational(c)));
                }
            }
        }
        for (i, w) in pts.windows(2).enumerate() {
            let dx = &w[1].0 - &w[0].0;
            let dy = &w[1].1 - &w[0].1;
            if dx <= zero || dy <= zero {
                return Err(PlError::NotMonotone(i + 1));
            }
            let r = dy / dx;
            let is_pow2 = |n: &BigInt| n.bits() > 0 && n.trailing_zeros() == Some(n.bits() - 1);
            if !(is_pow2(r.numer()) && is_pow2(r.denom())) {
                return Err(PlError::BadSlope(i));
            }
        }
        let mut dy = Vec::with_capacity(pts.len());
        for (x, y) in pts {
            let conv = |c: &Rational| {
                Dyadic::from_rational(c)
                    .ok_or_else(|| PlError::NotDyadic(crate::dyadic::format_rational(c)))
            };
            dy.push((conv(x)?, conv(y)?));
        }
        PlHomeo::from_breakpoints(dy)
    }

    /// Drops breakpoints between equal slopes. Inputs are assumed valid.
    fn canonical(pts: Vec<(Dyadic, Dyadic)>, slopes: Vec<i64>) -> Self {
        let mut out_pts = Vec::with_capacity(pts.len());
        let mut out_slopes: Vec<i64> = Vec::with_capacity(slopes.len());
        let mut it = pts.into_iter();
        out_pts.push(it.next().expect("nonempty"));
        for (p, s) in it.zip(slopes) {
            if out_slopes.last() == Some(&s) {
                *out_pts.last_mut().expect("nonempty") = p;
            } else {
                out_pts.push(p);
                out_slopes.push(s);
            }
        }
        PlHomeo {
            pts: out_pts,
            slopes: out_slopes,
        }
    }

    pub fn breakpoints(&self) -> &[(Dyadic, Dyadic)] {
        &self.pts
    }

    /// Base-2 logarithms of the segment slopes.
    pub fn slope_exponents(&self) -> &[i64] {
        &self.slopes
    }

    pub fn is_identity(&self) -> bool {
        self.pts.len() == 2
    }

    fn segment_of(&self, x: &Dyadic) -> usize {
        // last i with pts[i].0 <= x, clamped to a real segment
        let i = self.pts.partition_point(|(px, _)| px <= x);
        i.saturating_sub(1).min(self.slopes.len() - 1)
    }

    fn segment_of_rational(&self, x: &Rational) -> usize {
        let i = self.pts.partition_point(|(px, _)| &px.to_rational() <= x);
        i.saturating_sub(1).min(self.slopes.len() - 1)
    }

    /// Image of a dyadic point.
    pub fn apply(&self, x: &Dyadic) -> Dyadic {
        let i = self.segment_of(x);
        let (x0, y0) = &self.pts[i];
        y0 + &(x - x0).mul_pow2(self.slopes[i])
    }

    /// Exact image of a rational point of `[0,1]`.
    pub fn evaluate(&self, q: &Rational) -> Result<Rational, PlError> {
        if q < &Rational::zero() || q > &Rational::one() {
            return Err(PlError::OutOfRange(crate::dyadic::format_rational(q)));
        }
        Ok(self.eval_rational(q))
    }

    pub(crate) fn eval_rational(&self, q: &Rational) -> Rational {
        if let Some(d) = Dyadic::from_rational(q) {
            return self.apply(&d).to_rational();
        }
        let i = self.segment_of_rational(q);
        let (x0, y0) = &self.pts[i];
        y0.to_rational() + mul_pow2_rational(&(q - x0.to_rational()), self.slopes[i])
    }

    /// The product `self·g`: apply `g` first, then `self`.
    pub fn compose(&self, g: &PlHomeo) -> PlHomeo {
        let f = self;
        let mut pts = Vec::with_capacity(f.pts.len() + g.pts.len());
        let mut slopes = Vec::with_capacity(f.pts.len() + g.pts.len());
        pts.push((Dyadic::zero(), Dyadic::zero()));
        let last_f = f.slopes.len() - 1;
        let mut j = 0usize;
        for i in 0..g.slopes.len() {
            let (x0, y0) = &g.pts[i];
            let (x1, y1) = &g.pts[i + 1];
            let s = g.slopes[i];
            while j < last_f && &f.pts[j + 1].0 < y1 {
                let (fx, fy) = &f.pts[j + 1];
                let px = x0 + &(fx - y0).mul_pow2(-s);
                pts.push((px, fy.clone()));
                slopes.push(s + f.slopes[j]);
                j += 1;
            }
            let (fx, fy) = &f.pts[j];
            let val = fy + &(y1 - fx).mul_pow2(f.slopes[j]);
            pts.push((x1.clone(), val));
            slopes.push(s + f.slopes[j]);
            if j < last_f && &f.pts[j + 1].0 == y1 {
                j += 1;
            }
        }
        PlHomeo::canonical(pts, slopes)
    }

    pub fn invert(&self) -> PlHomeo {
        PlHomeo {
            pts: self.pts.iter().map(|(x, y)| (y.clone(), x.clone())).collect(),
            slopes: self.slopes.iter().map(|s| -s).collect(),
        }
    }

    /// Closed set of fixed points.
    pub fn fixed_set(&self) -> IntervalSet {
        let mut parts = Vec::new();
        for (i, s) in self.slopes.iter().enumerate() {
            let (x0, y0) = &self.pts[i];
            let (x1, _) = &self.pts[i + 1];
            if *s == 0 {
                if x0 == y0 {
                    parts.push(Interval::closed(x0.to_rational(), x1.to_rational()));
                }
                continue;
            }
            // f(x) - x = (y0 - x0) + (x - x0)(2^s - 1)
            let c = (y0 - x0).to_rational();
            let k = mul_pow2_rational(&Rational::one(), *s) - Rational::one();
            let root = x0.to_rational() - c / k;
            if root >= x0.to_rational() && root <= x1.to_rational() {
                parts.push(Interval::point(root));
            }
        }
        IntervalSet::from_intervals(parts)
    }

    /// The open set `{x : f(x) != x}`.
    pub fn support(&self) -> IntervalSet {
        self.fixed_set().complement()
    }

    pub fn support_closure(&self) -> IntervalSet {
        self.support().closure()
    }

    /// Dyadic points of `closure(supp) \ supp`, together with 0 and 1, sorted.
    pub fn dividing_points(&self) -> Vec<Dyadic> {
        let mut out = vec![Dyadic::zero()];
        for iv in self.support().intervals() {
            for e in [&iv.lo, &iv.hi] {
                if let Some(d) = Dyadic::from_rational(e) {
                    if out.last() != Some(&d) && d != Dyadic::one() {
                        out.push(d);
                    }
                }
            }
        }
        out.push(Dyadic::one());
        out
    }

    /// Copy of `self` on `[a,b]`, identity elsewhere. `a` and `b` must be fixed.
    pub(crate) fn restrict(&self, a: &Dyadic, b: &Dyadic) -> PlHomeo {
        let mut pts = vec![(Dyadic::zero(), Dyadic::zero()), (a.clone(), a.clone())];
        pts.extend(
            self.pts
                .iter()
                .filter(|(x, _)| x > a && x < b)
                .cloned(),
        );
        pts.push((b.clone(), b.clone()));
        pts.push((Dyadic::one(), Dyadic::one()));
        pts.dedup();
        PlHomeo::from_breakpoints(pts).expect("restriction of an element of F at fixed dyadic points")
    }

    /// Restrictions of `self` to the cells cut out by its dividing points,
    /// identity fragments removed. The fragments commute and multiply to `self`.
    pub fn defragmentation(&self) -> Vec<PlHomeo> {
        self.dividing_points()
            .windows(2)
            .map(|w| self.restrict(&w[0], &w[1]))
            .filter(|g| !g.is_identity())
            .collect()
    }

    /// True iff `self` is the identity near 1, i.e. `1 ∉ closure(supp)`.
    pub fn in_h_lt1(&self) -> bool {
        let (x, y) = &self.pts[self.pts.len() - 2];
        x == y
    }

    /// Right-hand slope exponent at `p` (`p < 1`).
    pub fn right_slope_at(&self, p: &Rational) -> i64 {
        self.slopes[self.segment_of_rational(p)]
    }

    /// `Some(k)` with `self = h^k` if such `k` exists.
    ///
    /// At the left end `p` of the first support component of `h` the right
    /// slope of `h` is `2^m`, `m != 0`. A power `h^k` has slope `2^(km)`
    /// there, which pins down the only candidate.
    pub fn is_power_of(&self, h: &PlHomeo) -> Option<i64> {
        if h.is_identity() {
            return self.is_identity().then_some(0);
        }
        let supp = h.support();
        let p = supp.intervals()[0].lo.clone();
        let m = h.right_slope_at(&p);
        debug_assert!(m != 0);
        if self.eval_rational(&p) != p {
            return None;
        }
        let e = self.right_slope_at(&p);
        let k = crate::dyadic::is_integer_multiple(e, m)?;
        (h.pow(k) == *self).then_some(k)
    }
}

impl Group for PlHomeo {
    fn identity() -> Self {
        PlHomeo::identity()
    }

    fn mul(&self, rhs: &Self) -> Self {
        self.compose(rhs)
    }

    fn inverse(&self) -> Self {
        self.invert()
    }

    fn is_identity(&self) -> bool {
        PlHomeo::is_identity(self)
    }

    fn group_eq(&self, other: &Self) -> bool {
        self == other
    }
}

/// The generator `x_n` of the infinite presentation.
pub fn generator_x(n: u32) -> PlHomeo {
    let a = Dyadic::one_minus_pow2(n);
    let b = Dyadic::one_minus_pow2(n + 1);
    let c = Dyadic::one_minus_pow2(n + 2);
    let pts = vec![
        (Dyadic::zero(), Dyadic::zero()),
        (a.clone(), a.clone()),
        (b.clone(), b.mul_pow2(-1) + a.mul_pow2(-1)),
        (c.clone(), &c - &Dyadic::pow2(-(n as i64) - 2)),
        (Dyadic::one(), Dyadic::one()),
    ];
    let mut pts = pts;
    pts.dedup();
    PlHomeo::from_breakpoints(pts).expect("generator formula is a valid element")
}

/// `ι_[a,b](f)`: the copy of `f` conjugated onto `[a,b]` by `t ↦ a + (b-a)t`,
/// identity outside `[a,b]`.
pub fn iota(a: &Dyadic, b: &Dyadic, f: &PlHomeo) -> Result<PlHomeo, PlError> {
    if a < &Dyadic::zero() || a >= b || b > &Dyadic::one() {
        return Err(PlError::BadInterval(a.clone(), b.clone()));
    }
    let width = b - a;
    let lam = |t: &Dyadic| -> Dyadic {
        // a + width * t, exact product of dyadics
        let prod = Dyadic::new(width.numerator() * t.numerator(), width.exponent() + t.exponent());
        a + &prod
    };
    let mut pts = vec![(Dyadic::zero(), Dyadic::zero())];
    pts.extend(f.pts.iter().map(|(x, y)| (lam(x), lam(y))));
    pts.push((Dyadic::one(), Dyadic::one()));
    pts.dedup();
    PlHomeo::from_breakpoints(pts)
}

/// Greedy split of `[a,b]` into standard dyadic intervals `[k/2^n, (k+1)/2^n]`,
/// returned as the list of their exponents `n`.
fn standard_pieces(a: &Dyadic, b: &Dyadic) -> Vec<i64> {
    let mut out = Vec::new();
    let mut x = a.clone();
    while &x < b {
        let mut k = if x.is_zero() { 0 } else { x.exponent() as i64 };
        while &(&x + &Dyadic::pow2(-k)) > b {
            k += 1;
        }
        out.push(k);
        x = &x + &Dyadic::pow2(-k);
    }
    out
}

fn split_to_len(pieces: &mut Vec<i64>, len: usize) {
    while pieces.len() < len {
        let (idx, _) = pieces
            .iter()
            .enumerate()
            .min_by_key(|(i, k)| (**k, *i))
            .expect("nonempty");
        let k = pieces[idx] + 1;
        pieces[idx] = k;
        pieces.insert(idx + 1, k);
    }
}

/// Some `f` in F with `f(s_i) = t_i`, which is the identity on every cell
/// `[s_{i-1}, s_i]` whose ends are both fixed.
pub fn partition_map(s: &[Dyadic], t: &[Dyadic]) -> Result<PlHomeo, PlError> {
    let check = |v: &[Dyadic], name: &str| -> Result<(), PlError> {
        if v.len() < 2 || v[0] != Dyadic::zero() || v[v.len() - 1] != Dyadic::one() {
            return Err(PlError::BadPartition(format!("{name} must run from 0 to 1")));
        }
        if v.windows(2).any(|w| w[0] >= w[1]) {
            return Err(PlError::BadPartition(format!("{name} is not strictly increasing")));
        }
        Ok(())
    };
    check(s, "source")?;
    check(t, "target")?;
    if s.len() != t.len() {
        return Err(PlError::BadPartition("partitions differ in length".into()));
    }
    let mut pts = vec![(Dyadic::zero(), Dyadic::zero())];
    let mut slopes = Vec::new();
    for i in 1..s.len() {
        if s[i - 1] == t[i - 1] && s[i] == t[i] {
            pts.push((s[i].clone(), t[i].clone()));
            slopes.push(0);
            continue;
        }
        let mut src = standard_pieces(&s[i - 1], &s[i]);
        let mut dst = standard_pieces(&t[i - 1], &t[i]);
        let n = src.len().max(dst.len());
        split_to_len(&mut src, n);
        split_to_len(&mut dst, n);
        let mut x = s[i - 1].clone();
        let mut y = t[i - 1].clone();
        for (ks, kt) in src.into_iter().zip(dst) {
            x = &x + &Dyadic::pow2(-ks);
            y = &y + &Dyadic::pow2(-kt);
            pts.push((x.clone(), y.clone()));
            slopes.push(ks - kt);
        }
    }
    Ok(PlHomeo::canonical(pts, slopes))
}

fn standard_letters() -> [PlHomeo; 4] {
    let x0 = generator_x(0);
    let x1 = generator_x(1);
    [x0.invert(), x0, x1.invert(), x1]
}

/// Product of `length` letters drawn uniformly and independently from
/// `{x0, x0⁻¹, x1, x1⁻¹}`. Free cancellation can make the word shorter.
pub fn random_element_with<R: Rng>(rng: &mut R, length: usize) -> PlHomeo {
    let letters = standard_letters();
    let mut acc = PlHomeo::identity();
    for _ in 0..length {
        acc = acc.compose(&letters[rng.gen_range(0..4)]);
    }
    acc
}

/// Deterministic [`random_element_with`] driven by ChaCha8 seeded with `seed`.
pub fn random_element(seed: u64, length: usize) -> PlHomeo {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_element_with(&mut rng, length)
}

impl fmt::Display for PlHomeo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, (x, y)) in self.pts.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "({x},{y})")?;
        }
        write!(f, "]")
    }
}

impl fmt::Debug for PlHomeo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Parses the text form `[(0,0), (1/2^1,1/2^2), ..., (1,1)]`.
impl FromStr for PlHomeo {
    type Err = PlError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let body = s
            .trim()
            .strip_prefix('[')
            .and_then(|r| r.strip_suffix(']'))
            .ok_or_else(|| PlError::Syntax(s.to_string()))?;
        let mut pts = Vec::new();
        for chunk in body.split(')') {
            let chunk = chunk.trim().trim_start_matches(',').trim();
            if chunk.is_empty() {
                continue;
            }
            let inner = chunk
                .strip_prefix('(')
                .ok_or_else(|| PlError::Syntax(chunk.to_string()))?;
            let (x, y) = inner
                .split_once(',')
                .ok_or_else(|| PlError::Syntax(chunk.to_string()))?;
            pts.push((
                crate::dyadic::parse_rational(x)?,
                crate::dyadic::parse_rational(y)?,
            ));
        }
        PlHomeo::from_rational_breakpoints(&pts)
    }
}

/// Structured form: `{"version": 1, "breakpoints": [["0","0"], ..., ["1","1"]]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElementRecord {
    pub version: u32,
    pub breakpoints: Vec<(Dyadic, Dyadic)>,
}

pub const FORMAT_VERSION: u32 = 1;

impl PlHomeo {
    pub fn to_record(&self) -> ElementRecord {
        ElementRecord {
            version: FORMAT_VERSION,
            breakpoints: self.pts.clone(),
        }
    }

    pub fn from_record(rec: ElementRecord) -> Result<Self, PlError> {
        if rec.version != FORMAT_VERSION {
            return Err(PlError::Syntax(format!(
                "unsupported element format version {}",
                rec.version
            )));
        }
        PlHomeo::from_breakpoints(rec.breakpoints)
    }
}

impl Serialize for PlHomeo {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_record().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for PlHomeo {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let rec = ElementRecord::deserialize(deserializer)?;
        PlHomeo::from_record(rec).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::parse_rational;

    fn d(s: &str) -> Dyadic {
        s.parse().unwrap()
    }

    fn q(s: &str) -> Rational {
        parse_rational(s).unwrap()
    }

    fn pl(pts: &[(&str, &str)]) -> Result<PlHomeo, PlError> {
        PlHomeo::from_breakpoints(pts.iter().map(|(x, y)| (d(x), d(y))).collect())
    }

    fn open(a: &str, b: &str) -> IntervalSet {
        IntervalSet::single(Interval::open(q(a), q(b)))
    }

    #[test]
    fn from_breakpoints_examples() {
        assert!(pl(&[("0", "0"), ("1", "1")]).unwrap().is_identity());
        let x0 = pl(&[("0", "0"), ("1/2", "1/4"), ("3/4", "1/2"), ("1", "1")]).unwrap();
        assert_eq!(x0, generator_x(0));
        let thirds = [(q("0"), q("0")), (q("1/2"), q("1/3")), (q("1"), q("1"))];
        assert_eq!(
            PlHomeo::from_rational_breakpoints(&thirds).unwrap_err(),
            PlError::BadSlope(0)
        );
        let off_grid = [(q("0"), q("0")), (q("1/3"), q("1/3")), (q("1"), q("1"))];
        assert!(matches!(
            PlHomeo::from_rational_breakpoints(&off_grid),
            Err(PlError::NotDyadic(_))
        ));
        assert_eq!(
            "[(0,0),(1/2,1/3),(1,1)]".parse::<PlHomeo>().unwrap_err(),
            PlError::BadSlope(0)
        );
        let bad = PlHomeo::from_breakpoints(vec![
            (d("0"), d("0")),
            (d("1/2"), d("3/8")),
            (d("1"), d("1")),
        ]);
        assert_eq!(bad.unwrap_err(), PlError::BadSlope(0));
        assert_eq!(
            pl(&[("0", "0"), ("1/2", "1/2"), ("1/2", "3/4"), ("1", "1")]).unwrap_err(),
            PlError::NotMonotone(2)
        );
        assert_eq!(pl(&[("0", "0"), ("1/2", "1/2")]).unwrap_err(), PlError::MissingEndpoints);
        // redundant breakpoint on the diagonal is removed
        assert!(pl(&[("0", "0"), ("1/2", "1/2"), ("1", "1")]).unwrap().is_identity());
    }

    #[test]
    fn generator_breakpoints() {
        let x1 = generator_x(1);
        let expect = pl(&[("0", "0"), ("1/2", "1/2"), ("3/4", "5/8"), ("7/8", "3/4"), ("1", "1")]).unwrap();
        assert_eq!(x1, expect);
        for n in 0..8u32 {
            let p = Dyadic::one_minus_pow2(n);
            assert_eq!(generator_x(n).apply(&p), p);
        }
    }

    #[test]
    fn evaluate_examples() {
        let x0 = generator_x(0);
        assert_eq!(x0.evaluate(&q("1/2")).unwrap(), q("1/4"));
        assert_eq!(generator_x(1).evaluate(&q("7/8")).unwrap(), q("3/4"));
        assert_eq!(PlHomeo::identity().evaluate(&q("1/3")).unwrap(), q("1/3"));
        // non-dyadic input on the 2t-1 piece of x0
        assert_eq!(x0.evaluate(&q("5/6")).unwrap(), q("2/3"));
        assert!(matches!(x0.evaluate(&q("3/2")), Err(PlError::OutOfRange(_))));
        assert_eq!(x0.invert().evaluate(&q("1/4")).unwrap(), q("1/2"));
    }

    #[test]
    fn compose_and_invert() {
        let x0 = generator_x(0);
        let x1 = generator_x(1);
        assert_eq!(x0.compose(&PlHomeo::identity()), x0);
        assert!(x0.compose(&x0.invert()).is_identity());
        assert_eq!(x0.invert().invert(), x0);
        assert!(PlHomeo::identity().invert().is_identity());
        let c = x0.invert().compose(&x1.compose(&x0));
        assert_eq!(c.support(), open("3/4", "1"));
        assert_eq!(c, generator_x(2));
    }

    #[test]
    fn compose_order_is_apply_right_first() {
        let x0 = generator_x(0);
        let x1 = generator_x(1);
        let p = d("5/8");
        assert_eq!(x1.compose(&x0).apply(&p), x1.apply(&x0.apply(&p)));
    }

    #[test]
    fn support_examples() {
        assert!(PlHomeo::identity().support().is_empty());
        assert_eq!(generator_x(1).support(), open("1/2", "1"));
        assert_eq!(generator_x(0).support(), open("0", "1"));
        let h = iota(&d("0"), &d("1/2"), &generator_x(0)).unwrap();
        assert_eq!(h.support(), open("0", "1/2"));
    }

    #[test]
    fn support_with_isolated_fixed_points() {
        // slope 2 on [1/4,1/2] touches the diagonal only at 3/8
        let g = pl(&[("0", "0"), ("1/4", "1/8"), ("1/2", "5/8"), ("3/4", "3/4"), ("1", "1")]).unwrap();
        assert_eq!(
            g.support(),
            IntervalSet::from_intervals(vec![
                Interval::open(q("0"), q("3/8")),
                Interval::open(q("3/8"), q("3/4"))
            ])
        );
        assert_eq!(g.dividing_points(), vec![d("0"), d("3/8"), d("3/4"), d("1")]);

        // slope 4 on [1/4,3/8]: 1/8 + 4(x - 1/4) = x at x = 7/24
        let k = pl(&[("0", "0"), ("1/4", "1/8"), ("3/8", "5/8"), ("7/8", "7/8"), ("1", "1")]).unwrap();
        assert!(k.fixed_set().contains(&q("7/24")));
        assert_eq!(
            k.support(),
            IntervalSet::from_intervals(vec![
                Interval::open(q("0"), q("7/24")),
                Interval::open(q("7/24"), q("7/8"))
            ])
        );
        assert_eq!(k.dividing_points(), vec![d("0"), d("7/8"), d("1")]);
        assert_eq!(k.defragmentation(), vec![k.clone()]);
    }

    #[test]
    fn dividing_points_and_defragmentation() {
        let x0 = generator_x(0);
        assert_eq!(x0.dividing_points(), vec![d("0"), d("1")]);
        assert_eq!(PlHomeo::identity().dividing_points(), vec![d("0"), d("1")]);
        let left = iota(&d("0"), &d("1/2"), &x0).unwrap();
        let right = iota(&d("1/2"), &d("1"), &x0).unwrap();
        let f = left.compose(&right);
        assert_eq!(f.dividing_points(), vec![d("0"), d("1/2"), d("1")]);
        assert_eq!(f.defragmentation(), vec![left.clone(), right]);

        let r1 = iota(&d("1/2"), &d("1"), &generator_x(1)).unwrap();
        let g = left.compose(&r1);
        assert_eq!(r1.support(), open("3/4", "1"));
        assert_eq!(g.defragmentation(), vec![left, r1]);
        assert_eq!(x0.defragmentation(), vec![x0.clone()]);
        assert!(PlHomeo::identity().defragmentation().is_empty());
    }

    #[test]
    fn iota_examples() {
        let x0 = generator_x(0);
        assert_eq!(iota(&d("0"), &d("1"), &x0).unwrap(), x0);
        assert!(matches!(iota(&d("1/2"), &d("1/2"), &x0), Err(PlError::BadInterval(_, _))));
        assert!(matches!(iota(&d("1/2"), &d("3/2"), &x0), Err(PlError::BadInterval(_, _))));
    }

    /// Branches 1, 3, 4 and 5 of the displayed `x_[a,b],n` formula.
    #[test]
    fn iota_matches_displayed_branches() {
        let intervals = [("1/4", "1/2"), ("1/2", "3/4"), ("0", "1/2"), ("3/8", "7/8")];
        for (a, b) in intervals {
            let (a, b) = (d(a), d(b));
            let w = &b - &a;
            for n in 0..5u32 {
                let f = iota(&a, &b, &generator_x(n)).unwrap();
                let at = |num: &Dyadic| -> Dyadic {
                    // a + num * (b - a)
                    &a + &Dyadic::new(num.numerator() * w.numerator(), num.exponent() + w.exponent())
                };
                let c1 = at(&Dyadic::one_minus_pow2(n));
                let c2 = at(&Dyadic::one_minus_pow2(n + 1));
                let c3 = at(&Dyadic::one_minus_pow2(n + 2));
                // branch 1: identity on [0, c1]
                assert_eq!(f.apply(&c1), c1);
                assert_eq!(f.apply(&Dyadic::midpoint(&Dyadic::zero(), &c1)), Dyadic::midpoint(&Dyadic::zero(), &c1));
                // branch 3: t - (b-a)/2^(n+2) on [c2, c3]
                let shift = w.mul_pow2(-(n as i64) - 2);
                for t in [&c2, &c3, &Dyadic::midpoint(&c2, &c3)] {
                    assert_eq!(f.apply(t), t - &shift);
                }
                // branch 4: 2t - b on [c3, b]
                for t in [&c3, &b, &Dyadic::midpoint(&c3, &b)] {
                    assert_eq!(f.apply(t), &t.mul_pow2(1) - &b);
                }
                // branch 5: identity on [b, 1]
                let m = Dyadic::midpoint(&b, &Dyadic::one());
                assert_eq!(f.apply(&m), m);
            }
        }
    }

    #[test]
    fn partition_map_examples() {
        let f = partition_map(&[d("0"), d("1/2"), d("1")], &[d("0"), d("1/2"), d("1")]).unwrap();
        assert_eq!(f.apply(&d("1/2")), d("1/2"));
        assert!(f.is_identity());
        let g = partition_map(&[d("0"), d("1/2"), d("1")], &[d("0"), d("1/4"), d("1")]).unwrap();
        assert_eq!(g.apply(&d("1/2")), d("1/4"));
        let h = partition_map(
            &[d("0"), d("1/4"), d("1/2"), d("1")],
            &[d("0"), d("1/4"), d("3/4"), d("1")],
        )
        .unwrap();
        assert_eq!(h.apply(&d("1/2")), d("3/4"));
        assert_eq!(h.apply(&d("1/8")), d("1/8"));
        assert_eq!(h.apply(&d("1/4")), d("1/4"));
        assert!(matches!(
            partition_map(&[d("0"), d("1")], &[d("0"), d("1/2"), d("1")]),
            Err(PlError::BadPartition(_))
        ));
        assert!(matches!(
            partition_map(&[d("0"), d("1/2"), d("1/2"), d("1")], &[d("0"), d("1/4"), d("1/2"), d("1")]),
            Err(PlError::BadPartition(_))
        ));
        // a far-apart pair with large exponents stays small
        let k = partition_map(
            &[d("0"), Dyadic::one_minus_pow2(40), d("1")],
            &[d("0"), Dyadic::pow2(-40), d("1")],
        )
        .unwrap();
        assert_eq!(k.apply(&Dyadic::one_minus_pow2(40)), Dyadic::pow2(-40));
        assert!(k.breakpoints().len() < 200);
    }

    #[test]
    fn is_power_examples() {
        let h = generator_x(0).compose(&generator_x(2));
        let h3 = h.compose(&h).compose(&h);
        assert_eq!(h3.is_power_of(&h), Some(3));
        assert_eq!(PlHomeo::identity().is_power_of(&h), Some(0));
        assert_eq!(h.invert().is_power_of(&h), Some(-1));
        assert_eq!(generator_x(1).is_power_of(&generator_x(0)), None);
        let x0 = generator_x(0);
        assert_eq!(x0.compose(&x0).is_power_of(&x0.compose(&x0).compose(&x0)), None);
    }

    #[test]
    fn h_lt1_membership() {
        let x0 = generator_x(0);
        assert!(iota(&d("0"), &d("1/2"), &x0).unwrap().in_h_lt1());
        assert!(!x0.in_h_lt1());
        assert!(PlHomeo::identity().in_h_lt1());
        // x0 x1^-1 agrees with the identity near 1
        assert!(x0.compose(&generator_x(1).invert()).in_h_lt1());
    }

    #[test]
    fn random_element_is_deterministic() {
        assert!(random_element(7, 0).is_identity());
        assert_eq!(random_element(42, 15), random_element(42, 15));
        assert_ne!(random_element(1, 25), random_element(2, 25));
    }

    #[test]
    fn text_and_json_roundtrip() {
        let f = generator_x(3).compose(&generator_x(0).invert());
        let text = f.to_string();
        assert_eq!(text.parse::<PlHomeo>().unwrap(), f);
        let json = serde_json::to_string(&f).unwrap();
        assert!(json.contains("\"version\":1"));
        assert_eq!(serde_json::from_str::<PlHomeo>(&json).unwrap(), f);
        assert_eq!(
            generator_x(0).to_string(),
            "[(0,0), (1/2^1,1/2^2), (3/2^2,1/2^1), (1,1)]"
        );
    }
}
