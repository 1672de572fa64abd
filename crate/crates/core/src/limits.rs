//! Marked groups, relation balls and the relations metric.
//!
//! Two markings are at distance `e^{-r}` when they have exactly the same
//! relations of length at most `r`. Length is the letter count of a freely
//! reduced word over the markers and their inverses.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::group::Group;
use crate::solvers::{self, H1Budget, H1Solution, SolverError};
use crate::thompson::{generator_x, iota, PlHomeo};
use crate::words::{Letter, MixedWord, VarLetter, WordError};
use crate::Dyadic;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LimitsError {
    #[error("arity mismatch: {0} markers vs {1}")]
    ArityMismatch(usize, usize),
    #[error("atomic type lists `{0}` both as an equation and an inequation")]
    Inconsistent(String),
    #[error("bad marked tuple: {0}")]
    Format(String),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Word(#[from] WordError),
}

/// A reduced word over abstract markers `y1, y2, ...`.
pub type AbstractWord = Vec<VarLetter>;

pub fn format_abstract(w: &[VarLetter]) -> String {
    if w.is_empty() {
        return "1".into();
    }
    w.iter().map(VarLetter::to_string).collect::<Vec<_>>().join(" ")
}

/// Letters in enumeration order: `y1 < y1^-1 < y2 < y2^-1 < ...`.
fn alphabet(m: usize) -> Vec<VarLetter> {
    (1..=m)
        .flat_map(|i| [VarLetter::new(i, false), VarLetter::new(i, true)])
        .collect()
}

/// Length-lexicographic order on abstract words.
pub fn length_lex(a: &AbstractWord, b: &AbstractWord) -> std::cmp::Ordering {
    a.len().cmp(&b.len()).then_with(|| a.cmp(b))
}

/// A group together with an ordered tuple of markers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarkedTuple<G> {
    pub markers: Vec<G>,
}

impl<G: Group> MarkedTuple<G> {
    pub fn new(markers: Vec<G>) -> Result<Self, LimitsError> {
        if markers.is_empty() {
            return Err(LimitsError::Format("at least one marker is required".into()));
        }
        Ok(MarkedTuple { markers })
    }

    pub fn rank(&self) -> usize {
        self.markers.len()
    }

    /// Values of the letters of [`alphabet`], in the same order.
    fn letter_values(&self) -> Vec<G> {
        self.markers
            .iter()
            .flat_map(|g| [g.clone(), g.inverse()])
            .collect()
    }

    pub fn evaluate(&self, w: &[VarLetter]) -> G {
        w.iter().fold(G::identity(), |acc, l| {
            let g = &self.markers[l.index - 1];
            if l.inverse {
                acc.mul(&g.inverse())
            } else {
                acc.mul(g)
            }
        })
    }
}

/// Depth-first walk over nonempty reduced words of length `<= r`, carrying
/// prefix values. `visit` returns the new depth bound (to allow pruning).
fn walk_reduced<G: Group>(
    markings: &[&MarkedTuple<G>],
    r: usize,
    mut visit: impl FnMut(&AbstractWord, &[G]) -> usize,
) {
    let m = markings[0].rank();
    let letters = alphabet(m);
    let values: Vec<Vec<G>> = markings.iter().map(|mk| mk.letter_values()).collect();
    let mut bound = r;
    let mut word: AbstractWord = Vec::new();
    let identity: Vec<G> = markings.iter().map(|_| G::identity()).collect();
    // stack of (depth, next letter index to try) with prefix values per depth
    let mut prefixes: Vec<Vec<G>> = vec![identity];
    let mut next: Vec<usize> = vec![0];
    while let Some(&i) = next.last() {
        let depth = word.len();
        if i >= letters.len() || depth >= bound {
            next.pop();
            prefixes.pop();
            word.pop();
            continue;
        }
        *next.last_mut().expect("nonempty") += 1;
        if let Some(last) = word.last() {
            if letters[i] == last.inv() {
                continue;
            }
        }
        let vals: Vec<G> = prefixes[depth]
            .iter()
            .zip(&values)
            .map(|(p, v)| p.mul(&v[i]))
            .collect();
        word.push(letters[i]);
        bound = visit(&word, &vals).min(bound);
        prefixes.push(vals);
        next.push(0);
    }
}

/// All nonempty reduced words of length `<= r` that vanish on the markers,
/// in length-lexicographic order.
pub fn relations_up_to<G: Group>(m: &MarkedTuple<G>, r: usize) -> Vec<AbstractWord> {
    let mut out = Vec::new();
    walk_reduced(&[m], r, |w, vals| {
        if vals[0].is_identity() {
            out.push(w.clone());
        }
        usize::MAX
    });
    out.sort_by(length_lex);
    out
}

/// `e^{-r}` when the balls first differ at length `r + 1`, otherwise the
/// bound `≤ e^{-r_max}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "r", rename_all = "snake_case")]
pub enum Distance {
    Exact(usize),
    AtMost(usize),
}

impl Distance {
    pub fn radius(&self) -> usize {
        match self {
            Distance::Exact(r) | Distance::AtMost(r) => *r,
        }
    }

    pub fn to_f64(&self) -> f64 {
        (-(self.radius() as f64)).exp()
    }
}

impl fmt::Display for Distance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Distance::Exact(r) => write!(f, "e^-{r}"),
            Distance::AtMost(r) => write!(f, "<= e^-{r}"),
        }
    }
}

/// The shortest reduced word that is a relation in exactly one marking.
pub fn first_difference<G: Group>(
    a: &MarkedTuple<G>,
    b: &MarkedTuple<G>,
    r_max: usize,
) -> Result<Option<AbstractWord>, LimitsError> {
    if a.rank() != b.rank() {
        return Err(LimitsError::ArityMismatch(a.rank(), b.rank()));
    }
    let mut best: Option<AbstractWord> = None;
    walk_reduced(&[a, b], r_max, |w, vals| {
        if vals[0].is_identity() != vals[1].is_identity() {
            let better = best
                .as_ref()
                .is_none_or(|bw| length_lex(w, bw) == std::cmp::Ordering::Less);
            if better {
                best = Some(w.clone());
            }
            // only shorter words can still improve on this one
            return w.len() - 1;
        }
        usize::MAX
    });
    Ok(best)
}

/// Largest `r <= r_max` with equal relation balls of radius `r`.
pub fn agreement_radius<G: Group>(
    a: &MarkedTuple<G>,
    b: &MarkedTuple<G>,
    r_max: usize,
) -> Result<usize, LimitsError> {
    Ok(distance(a, b, r_max)?.radius())
}

pub fn distance<G: Group>(
    a: &MarkedTuple<G>,
    b: &MarkedTuple<G>,
    r_max: usize,
) -> Result<Distance, LimitsError> {
    Ok(match first_difference(a, b, r_max)? {
        Some(w) => Distance::Exact(w.len() - 1),
        None => Distance::AtMost(r_max),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sign {
    Equal,
    NotEqual,
}

/// A finite consistent set of equations `w = 1` and inequations `w ≠ 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AtomicType<G> {
    entries: Vec<(MixedWord<G>, Sign)>,
}

impl<G: Group + PartialEq> AtomicType<G> {
    pub fn new(entries: Vec<(MixedWord<G>, Sign)>) -> Result<Self, LimitsError> {
        for (i, (w, s)) in entries.iter().enumerate() {
            if *s == Sign::NotEqual && w.is_empty() {
                return Err(LimitsError::Inconsistent("1".into()));
            }
            for (w2, s2) in &entries[..i] {
                if s != s2 && w == w2 {
                    return Err(LimitsError::Inconsistent(format!("{w:?}")));
                }
            }
        }
        Ok(AtomicType { entries })
    }

    pub fn entries(&self) -> &[(MixedWord<G>, Sign)] {
        &self.entries
    }

    pub fn arity(&self) -> usize {
        self.entries.iter().map(|(w, _)| w.arity()).max().unwrap_or(0)
    }

    /// Whether `args` realizes every entry.
    pub fn check(&self, args: &[G]) -> Result<bool, LimitsError> {
        if args.len() < self.arity() {
            return Err(LimitsError::ArityMismatch(self.arity(), args.len()));
        }
        for (w, s) in &self.entries {
            let v = w.clone().with_arity(args.len()).evaluate(args)?;
            if v.is_identity() != (*s == Sign::Equal) {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

pub fn check_atomic_type<G: Group + PartialEq>(
    p: &AtomicType<G>,
    args: &[G],
) -> Result<bool, LimitsError> {
    p.check(args)
}

/// The `i`-th element of the default enumeration of `H_{<1}`: the
/// elements `iota([0, 1-2^-j], x_k)` for `j >= 1, k >= 0`, listed along
/// the diagonals `j + k = 1, 2, ...` with `k` increasing.
pub fn default_h_lt1(i: usize) -> PlHomeo {
    let mut d = 1usize;
    let mut left = i;
    while left >= d {
        left -= d;
        d += 1;
    }
    let k = left;
    let j = d - k;
    iota(
        &Dyadic::zero(),
        &Dyadic::one_minus_pow2(j as u32),
        &generator_x(k as u32),
    )
    .expect("proper interval")
}

/// Whether a one-variable word is accepted by [`solvers::solve_h1`].
pub fn h1_admissible(w: &MixedWord<PlHomeo>) -> bool {
    w.arity() == 1
        && w.has_variables()
        && !matches!(
            solvers::solve_h1(
                &[],
                std::slice::from_ref(w),
                H1Budget {
                    max_k: 0,
                    candidates: 0
                }
            ),
            Err(SolverError::PreconditionFailed(_))
        )
}

/// The first `n` admissible one-variable words, length-lexicographic over
/// `y < y^-1 < x0 < x0^-1 < x1 < x1^-1`, each reduced word once.
pub fn default_h1_words(n: usize) -> Vec<MixedWord<PlHomeo>> {
    let x0 = generator_x(0);
    let x1 = generator_x(1);
    let letters: Vec<Letter<PlHomeo>> = vec![
        Letter::Var(VarLetter::new(1, false)),
        Letter::Var(VarLetter::new(1, true)),
        Letter::Const(x0.clone()),
        Letter::Const(x0.invert()),
        Letter::Const(x1.clone()),
        Letter::Const(x1.invert()),
    ];
    let mut out: Vec<MixedWord<PlHomeo>> = Vec::new();
    let mut len = 1;
    while out.len() < n {
        let total = letters.len().pow(len as u32);
        for code in 0..total {
            let mut idx = Vec::with_capacity(len);
            let mut c = code;
            for _ in 0..len {
                idx.push(c % letters.len());
                c /= letters.len();
            }
            idx.reverse();
            // letter-level reducedness: no x x^-1 and no y y^-1
            if idx.windows(2).any(|p| p[0] / 2 == p[1] / 2 && p[0] != p[1]) {
                continue;
            }
            let w = MixedWord::new(idx.iter().map(|&i| letters[i].clone()).collect(), 1);
            if w.len() != len || out.contains(&w) || !h1_admissible(&w) {
                continue;
            }
            out.push(w);
            if out.len() == n {
                break;
            }
        }
        len += 1;
    }
    out
}

/// One term of the sequence: the marking `(g_n, x0, x1)` together with the
/// constraints `g_n` was built to satisfy.
#[derive(Debug, Clone)]
pub struct H1Term {
    pub marked: MarkedTuple<PlHomeo>,
    pub solution: H1Solution,
    pub constraints: AtomicType<PlHomeo>,
}

/// `G_n = (F, (g_n, x0, x1))` with `g_n` solving the first `n` commutation
/// constraints and the first `n` inequalities.
pub fn h1_sequence(
    n: usize,
    enum_e: impl Fn(usize) -> PlHomeo,
    enum_w: impl Fn(usize) -> Vec<MixedWord<PlHomeo>>,
    budget: H1Budget,
) -> Result<H1Term, LimitsError> {
    let e: Vec<PlHomeo> = (0..n).map(enum_e).collect();
    let w = enum_w(n);
    let solution = solvers::solve_h1(&e, &w, budget)?;
    let y = MixedWord::var(1);
    let mut entries = Vec::new();
    for h in &e {
        entries.push((
            MixedWord::commutator(&y, &MixedWord::constant(h.clone())),
            Sign::Equal,
        ));
    }
    for word in &w {
        entries.push((word.clone(), Sign::NotEqual));
    }
    let constraints = AtomicType::new(entries)?;
    let marked = MarkedTuple::new(vec![
        solution.element.clone(),
        generator_x(0),
        generator_x(1),
    ])?;
    Ok(H1Term {
        marked,
        solution,
        constraints,
    })
}

pub fn h1_sequence_default(n: usize) -> Result<H1Term, LimitsError> {
    h1_sequence(n, default_h_lt1, default_h1_words, H1Budget::default())
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ConvergeReport {
    /// `(i, j, distance)` for all `i < j`.
    pub pairs: Vec<(usize, usize, Distance)>,
    /// `(i, distance(M_i, M_{i+1}))`.
    pub diagonal: Vec<(usize, Distance)>,
}

impl ConvergeReport {
    pub fn to_table(&self) -> String {
        let mut s = String::from("i\tj\tradius\tdistance\n");
        for (i, j, d) in &self.pairs {
            s.push_str(&format!("{i}\t{j}\t{}\t{d}\n", d.radius()));
        }
        s
    }
}

/// Pairwise and consecutive agreement radii. Diagnostic only.
pub fn converge_report<G: Group>(
    seq: &[MarkedTuple<G>],
    r_max: usize,
) -> Result<ConvergeReport, LimitsError> {
    let mut rep = ConvergeReport::default();
    for i in 0..seq.len() {
        for j in i + 1..seq.len() {
            let d = distance(&seq[i], &seq[j], r_max)?;
            rep.pairs.push((i, j, d));
            if j == i + 1 {
                rep.diagonal.push((i, d));
            }
        }
    }
    Ok(rep)
}

/// Ties a group type to its name in marked-tuple files.
pub trait Backend: Group + fmt::Display + FromStr {
    const NAME: &'static str;
}

impl Backend for PlHomeo {
    const NAME: &'static str = "thompson";
}

pub const MARKED_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MarkedRecord {
    pub version: u32,
    pub backend: String,
    pub markers: Vec<String>,
}

impl<G: Backend> MarkedTuple<G> {
    pub fn to_record(&self) -> MarkedRecord {
        MarkedRecord {
            version: MARKED_FORMAT_VERSION,
            backend: G::NAME.into(),
            markers: self.markers.iter().map(|g| g.to_string()).collect(),
        }
    }

    pub fn from_record(rec: &MarkedRecord) -> Result<Self, LimitsError> {
        if rec.version != MARKED_FORMAT_VERSION {
            return Err(LimitsError::Format(format!("unsupported version {}", rec.version)));
        }
        if rec.backend != G::NAME {
            return Err(LimitsError::Format(format!(
                "expected backend {}, found {}",
                G::NAME,
                rec.backend
            )));
        }
        let markers = rec
            .markers
            .iter()
            .map(|s| {
                s.parse::<G>()
                    .map_err(|_| LimitsError::Format(format!("bad marker `{s}`")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        MarkedTuple::new(markers)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::thompson::random_element;

    fn fx() -> MarkedTuple<PlHomeo> {
        MarkedTuple::new(vec![generator_x(0), generator_x(1)]).unwrap()
    }

    fn parse_abstract(s: &str) -> AbstractWord {
        s.split_whitespace()
            .map(|t| {
                let (name, inv) = match t.strip_suffix("^-1") {
                    Some(n) => (n, true),
                    None => (t, false),
                };
                VarLetter::new(name[1..].parse().unwrap(), inv)
            })
            .collect()
    }

    #[test]
    fn relations_examples() {
        assert!(relations_up_to(&fx(), 4).is_empty());
        let g = generator_x(0);
        let rep = MarkedTuple::new(vec![g.clone(), g]).unwrap();
        let rels = relations_up_to(&rep, 2);
        assert!(rels.contains(&parse_abstract("y1 y2^-1")));
        assert_eq!(rels.len(), 4);
    }

    #[test]
    fn length_ten_relator_is_found() {
        let rels = relations_up_to(&fx(), 10);
        // [x0 x1^-1, x0^-1 x1 x0] written out
        let rel = parse_abstract("y2 y1^-1 y1^-1 y2^-1 y1 y1 y2^-1 y1^-1 y2 y1");
        assert_eq!(fx().evaluate(&rel), PlHomeo::identity());
        assert!(rels.contains(&rel));
        assert!(rels.iter().all(|w| w.len() == 10));
    }

    #[test]
    fn distance_examples() {
        let m = fx();
        assert_eq!(distance(&m, &m, 5).unwrap(), Distance::AtMost(5));
        let swapped = MarkedTuple::new(vec![generator_x(1), generator_x(0)]).unwrap();
        let d = distance(&m, &swapped, 10).unwrap();
        // brute-force oracle: compare balls radius by radius
        let mut oracle = 10;
        for r in 1..=10 {
            let a = relations_up_to(&m, r);
            let b = relations_up_to(&swapped, r);
            if a != b {
                oracle = r - 1;
                break;
            }
        }
        assert_eq!(d.radius(), oracle);
        assert!(matches!(d, Distance::Exact(_)));
        assert_eq!(agreement_radius(&m, &swapped, 0).unwrap(), 0);
        let three = MarkedTuple::new(vec![generator_x(0); 3]).unwrap();
        assert_eq!(
            distance(&m, &three, 3).unwrap_err(),
            LimitsError::ArityMismatch(2, 3)
        );
    }

    #[test]
    fn distance_is_symmetric_and_ultrametric() {
        let ms: Vec<MarkedTuple<PlHomeo>> = (0..3)
            .map(|s| MarkedTuple::new(vec![random_element(s, 3), random_element(s + 10, 2)]).unwrap())
            .collect();
        let r = |a: usize, b: usize| agreement_radius(&ms[a], &ms[b], 4).unwrap();
        for a in 0..3 {
            for b in 0..3 {
                assert_eq!(r(a, b), r(b, a));
                for c in 0..3 {
                    assert!(r(a, c) >= r(a, b).min(r(b, c)));
                }
            }
        }
    }

    #[test]
    fn atomic_type_examples() {
        let y = MixedWord::<PlHomeo>::var(1);
        let p = AtomicType::new(vec![(y.clone(), Sign::Equal)]).unwrap();
        assert!(check_atomic_type(&p, &[PlHomeo::identity()]).unwrap());
        assert!(!check_atomic_type(&p, &[generator_x(0)]).unwrap());
        assert!(matches!(
            AtomicType::new(vec![(y.clone(), Sign::Equal), (y, Sign::NotEqual)]),
            Err(LimitsError::Inconsistent(_))
        ));
    }

    #[test]
    fn default_enumerations() {
        let first: Vec<PlHomeo> = (0..3).map(default_h_lt1).collect();
        assert_eq!(first[0], iota(&Dyadic::zero(), &"1/2".parse().unwrap(), &generator_x(0)).unwrap());
        assert_eq!(first[1], iota(&Dyadic::zero(), &"3/4".parse().unwrap(), &generator_x(0)).unwrap());
        assert_eq!(first[2], iota(&Dyadic::zero(), &"1/2".parse().unwrap(), &generator_x(1)).unwrap());
        assert!(first.iter().all(PlHomeo::in_h_lt1));
        let ws = default_h1_words(5);
        assert_eq!(ws.len(), 5);
        assert_eq!(ws[0], MixedWord::var(1));
        assert!(ws.iter().all(h1_admissible));
    }

    #[test]
    fn h1_sequence_examples() {
        let t0 = h1_sequence_default(0).unwrap();
        assert!(!t0.marked.markers[0].is_identity());
        let t3 = h1_sequence_default(3).unwrap();
        assert_eq!(t3.constraints.entries().len(), 6);
        assert!(t3.constraints.check(&t3.marked.markers[..1]).unwrap());
        let t4 = h1_sequence_default(4).unwrap();
        assert!(t3.constraints.check(&t4.marked.markers[..1]).unwrap());
    }

    #[test]
    fn converge_report_examples() {
        let m = fx();
        let rep = converge_report(&[m.clone(), m.clone(), m], 3).unwrap();
        assert!(rep.pairs.iter().all(|(_, _, d)| *d == Distance::AtMost(3)));
        assert_eq!(rep.diagonal.len(), 2);
        let empty = converge_report::<PlHomeo>(&[], 3).unwrap();
        assert!(empty.pairs.is_empty());
    }

    #[test]
    fn marked_record_round_trip() {
        let rec = fx().to_record();
        let json = serde_json::to_string(&rec).unwrap();
        let back: MarkedRecord = serde_json::from_str(&json).unwrap();
        assert_eq!(MarkedTuple::<PlHomeo>::from_record(&back).unwrap(), fx());
    }
}
