//! Finite unions of intervals of `[0,1]` with exact rational endpoints.

use std::fmt;

use num_traits::{One, Zero};

use crate::dyadic::{format_rational, parse_rational, Rational};

/// One interval. Empty and degenerate shapes are removed by [`IntervalSet`].
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Interval {
    pub lo: Rational,
    pub lo_closed: bool,
    pub hi: Rational,
    pub hi_closed: bool,
}

impl Interval {
    pub fn open(lo: Rational, hi: Rational) -> Self {
        Interval {
            lo,
            lo_closed: false,
            hi,
            hi_closed: false,
        }
    }

    pub fn closed(lo: Rational, hi: Rational) -> Self {
        Interval {
            lo,
            lo_closed: true,
            hi,
            hi_closed: true,
        }
    }

    pub fn point(p: Rational) -> Self {
        Interval::closed(p.clone(), p)
    }

    pub fn is_empty(&self) -> bool {
        self.lo > self.hi || (self.lo == self.hi && !(self.lo_closed && self.hi_closed))
    }

    pub fn contains(&self, x: &Rational) -> bool {
        let above = if self.lo_closed {
            x >= &self.lo
        } else {
            x > &self.lo
        };
        let below = if self.hi_closed {
            x <= &self.hi
        } else {
            x < &self.hi
        };
        above && below
    }

    fn intersect(&self, other: &Interval) -> Interval {
        let (lo, lo_closed) = match self.lo.cmp(&other.lo) {
            std::cmp::Ordering::Greater => (self.lo.clone(), self.lo_closed),
            std::cmp::Ordering::Less => (other.lo.clone(), other.lo_closed),
            std::cmp::Ordering::Equal => (self.lo.clone(), self.lo_closed && other.lo_closed),
        };
        let (hi, hi_closed) = match self.hi.cmp(&other.hi) {
            std::cmp::Ordering::Less => (self.hi.clone(), self.hi_closed),
            std::cmp::Ordering::Greater => (other.hi.clone(), other.hi_closed),
            std::cmp::Ordering::Equal => (self.hi.clone(), self.hi_closed && other.hi_closed),
        };
        Interval {
            lo,
            lo_closed,
            hi,
            hi_closed,
        }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.lo == self.hi {
            return write!(f, "{{{}}}", format_rational(&self.lo));
        }
        write!(
            f,
            "{}{}, {}{}",
            if self.lo_closed { '[' } else { '(' },
            format_rational(&self.lo),
            format_rational(&self.hi),
            if self.hi_closed { ']' } else { ')' }
        )
    }
}

/// Sorted, pairwise disjoint, non-adjacent intervals. The representation is
/// canonical, so `==` is set equality.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct IntervalSet {
    parts: Vec<Interval>,
}

impl IntervalSet {
    pub fn empty() -> Self {
        IntervalSet { parts: Vec::new() }
    }

    /// The whole unit interval `[0,1]`.
    pub fn unit() -> Self {
        IntervalSet::from_intervals(vec![Interval::closed(Rational::zero(), Rational::one())])
    }

    /// The open unit interval `(0,1)`.
    pub fn open_unit() -> Self {
        IntervalSet::from_intervals(vec![Interval::open(Rational::zero(), Rational::one())])
    }

    pub fn from_intervals(mut parts: Vec<Interval>) -> Self {
        parts.retain(|i| !i.is_empty());
        parts.sort_by(|a, b| {
            a.lo.cmp(&b.lo)
                .then_with(|| b.lo_closed.cmp(&a.lo_closed))
        });
        let mut out: Vec<Interval> = Vec::with_capacity(parts.len());
        for iv in parts {
            if let Some(last) = out.last_mut() {
                let touches = iv.lo < last.hi
                    || (iv.lo == last.hi && (iv.lo_closed || last.hi_closed));
                if touches {
                    match iv.hi.cmp(&last.hi) {
                        std::cmp::Ordering::Greater => {
                            last.hi = iv.hi;
                            last.hi_closed = iv.hi_closed;
                        }
                        std::cmp::Ordering::Equal => last.hi_closed |= iv.hi_closed,
                        std::cmp::Ordering::Less => {}
                    }
                    continue;
                }
            }
            out.push(iv);
        }
        IntervalSet { parts: out }
    }

    pub fn single(iv: Interval) -> Self {
        IntervalSet::from_intervals(vec![iv])
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.parts
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn contains(&self, x: &Rational) -> bool {
        self.parts.iter().any(|i| i.contains(x))
    }

    pub fn union(&self, other: &IntervalSet) -> IntervalSet {
        let mut all = self.parts.clone();
        all.extend(other.parts.iter().cloned());
        IntervalSet::from_intervals(all)
    }

    pub fn intersection(&self, other: &IntervalSet) -> IntervalSet {
        let mut out = Vec::new();
        for a in &self.parts {
            for b in &other.parts {
                let c = a.intersect(b);
                if !c.is_empty() {
                    out.push(c);
                }
            }
        }
        IntervalSet::from_intervals(out)
    }

    pub fn intersects(&self, other: &IntervalSet) -> bool {
        !self.intersection(other).is_empty()
    }

    /// Complement inside `[0,1]`.
    pub fn complement(&self) -> IntervalSet {
        let mut out = Vec::new();
        let mut lo = Rational::zero();
        let mut lo_closed = true;
        for p in &self.parts {
            out.push(Interval {
                lo: lo.clone(),
                lo_closed,
                hi: p.lo.clone(),
                hi_closed: !p.lo_closed,
            });
            lo = p.hi.clone();
            lo_closed = !p.hi_closed;
        }
        out.push(Interval {
            lo,
            lo_closed,
            hi: Rational::one(),
            hi_closed: true,
        });
        IntervalSet::from_intervals(out)
    }

    pub fn difference(&self, other: &IntervalSet) -> IntervalSet {
        self.intersection(&other.complement())
    }

    pub fn is_subset_of(&self, other: &IntervalSet) -> bool {
        &self.intersection(other) == self
    }

    pub fn closure(&self) -> IntervalSet {
        IntervalSet::from_intervals(
            self.parts
                .iter()
                .map(|i| Interval::closed(i.lo.clone(), i.hi.clone()))
                .collect(),
        )
    }

    pub fn is_open(&self) -> bool {
        self.parts.iter().all(|i| !i.lo_closed && !i.hi_closed)
    }

    /// Image under an increasing bijection of `[0,1]` given pointwise.
    pub fn map_monotone(&self, f: impl Fn(&Rational) -> Rational) -> IntervalSet {
        IntervalSet::from_intervals(
            self.parts
                .iter()
                .map(|i| Interval {
                    lo: f(&i.lo),
                    lo_closed: i.lo_closed,
                    hi: f(&i.hi),
                    hi_closed: i.hi_closed,
                })
                .collect(),
        )
    }

    /// Endpoints of all components, in order.
    pub fn endpoints(&self) -> Vec<Rational> {
        let mut v = Vec::new();
        for p in &self.parts {
            v.push(p.lo.clone());
            if p.hi != p.lo {
                v.push(p.hi.clone());
            }
        }
        v
    }
}

impl fmt::Display for IntervalSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.parts.is_empty() {
            return write!(f, "{{}}");
        }
        let s: Vec<String> = self.parts.iter().map(|p| p.to_string()).collect();
        write!(f, "{}", s.join(" u "))
    }
}

/// Parses the [`Display`](fmt::Display) form: components such as `(a, b]`
/// or `{p}` joined by `u`, or `{}` for the empty set.
impl std::str::FromStr for IntervalSet {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "{}" || s.is_empty() {
            return Ok(IntervalSet::empty());
        }
        let num = |t: &str| parse_rational(t.trim()).map_err(|e| format!("{e}: `{}`", t.trim()));
        let mut parts = Vec::new();
        for chunk in s.split(['u', 'U']) {
            let c = chunk.trim();
            if let Some(p) = c.strip_prefix('{').and_then(|r| r.strip_suffix('}')) {
                parts.push(Interval::point(num(p)?));
                continue;
            }
            let lo_closed = match c.chars().next() {
                Some('[') => true,
                Some('(') => false,
                _ => return Err(format!("expected `[` or `(` in `{c}`")),
            };
            let hi_closed = match c.chars().last() {
                Some(']') => true,
                Some(')') => false,
                _ => return Err(format!("expected `]` or `)` in `{c}`")),
            };
            let (a, b) = c[1..c.len() - 1]
                .split_once(',')
                .ok_or_else(|| format!("expected `lo, hi` in `{c}`"))?;
            let (lo, hi) = (num(a)?, num(b)?);
            if lo < Rational::zero() || hi > Rational::one() || lo > hi {
                return Err(format!("`{c}` is not an interval inside [0,1]"));
            }
            parts.push(Interval {
                lo,
                lo_closed,
                hi,
                hi_closed,
            });
        }
        Ok(IntervalSet::from_intervals(parts))
    }
}
