//! Constructive solvers for systems of inequalities `w(ȳ) ≠ 1` over F.
//!
//! Every solver re-checks its output by exact evaluation before returning
//! it, and returns a [`Certificate`] listing what was checked.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::dyadic::{Dyadic, Rational};
use crate::group::Group;
use crate::interval::{Interval, IntervalSet};
use crate::thompson::{generator_x, iota, PlHomeo};
use crate::words::{Letter, MixedWord, ReducedForm, WordError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolverError {
    #[error("input element is the identity")]
    IdentityInput,
    #[error("bad input: {0}")]
    BadInput(String),
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("search budget of {0} candidates exhausted")]
    BudgetExceeded(usize),
    #[error(transparent)]
    Word(#[from] WordError),
}

/// One verified constraint of a solution.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub constraint: String,
    pub holds: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Certificate {
    pub checks: Vec<Check>,
}

impl Certificate {
    fn push(&mut self, constraint: impl Into<String>, holds: bool) {
        self.checks.push(Check {
            constraint: constraint.into(),
            holds,
        });
    }

    pub fn all_hold(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }
}

/// A dyadic point moved by `f`: breakpoints first, then midpoints of
/// consecutive breakpoints, smallest denominator then smallest numerator.
pub fn moved_point(f: &PlHomeo) -> Result<Dyadic, SolverError> {
    if f.is_identity() {
        return Err(SolverError::IdentityInput);
    }
    let xs: Vec<Dyadic> = f.breakpoints().iter().map(|(x, _)| x.clone()).collect();
    let mut cands = xs.clone();
    cands.extend(xs.windows(2).map(|w| Dyadic::midpoint(&w[0], &w[1])));
    cands.sort_by(|a, b| {
        a.exponent()
            .cmp(&b.exponent())
            .then_with(|| a.numerator().cmp(b.numerator()))
    });
    cands
        .into_iter()
        .find(|p| &f.apply(p) != p)
        .ok_or(SolverError::IdentityInput)
}

/// A closed dyadic interval `[a,b]` strictly inside the open interval `(lo,hi)`.
pub fn dyadic_inside(lo: &Rational, hi: &Rational) -> Option<(Dyadic, Dyadic)> {
    if lo >= hi {
        return None;
    }
    let width = hi - lo;
    let mut m = 0u32;
    let mut step = Rational::from_integer(1.into());
    let quarter = &width / Rational::from_integer(4.into());
    while step > quarter {
        m += 1;
        step /= Rational::from_integer(2.into());
    }
    // first grid point strictly above lo, last strictly below hi
    let scale = Rational::from_integer(num_bigint::BigInt::from(1) << m);
    let a_num = (lo * &scale).floor().to_integer() + 1;
    let b_num = (hi * &scale).ceil().to_integer() - 1;
    if a_num >= b_num {
        return None;
    }
    Some((Dyadic::new(a_num, m), Dyadic::new(b_num, m)))
}

/// Output of [`solve_nontrivial_product`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductSolution {
    pub tuple: Vec<PlHomeo>,
    pub interval: (Dyadic, Dyadic),
    /// `(p_j, w_j(ḡ)(p_j))` for every word.
    pub witnesses: Vec<(Dyadic, Dyadic)>,
    pub certificate: Certificate,
}

/// Solves `w_j(ȳ) ≠ 1` for words with nontrivial product of constants by
/// rescaling `h̄` into an interval `U` that avoids every point the words'
/// constants carry a moved point through.
pub fn solve_nontrivial_product(
    words: &[ReducedForm<PlHomeo>],
    h: &[PlHomeo],
) -> Result<ProductSolution, SolverError> {
    let mut points: Vec<Dyadic> = vec![Dyadic::zero(), Dyadic::one()];
    let mut moved = Vec::with_capacity(words.len());
    for (j, w) in words.iter().enumerate() {
        if w.arity > h.len() {
            return Err(WordError::Arity {
                expected: h.len(),
                got: w.arity,
            }
            .into());
        }
        let prod = w.constants_product();
        if prod.is_identity() {
            return Err(SolverError::BadInput(format!(
                "word {} has trivial product of constants",
                j + 1
            )));
        }
        let p = moved_point(&prod)?;
        for partial in w.partial_products() {
            points.push(partial.apply(&p));
        }
        moved.push((p, prod));
    }
    points.sort();
    points.dedup();
    let (lo, hi) = points
        .windows(2)
        .max_by(|a, b| (&a[1] - &a[0]).cmp(&(&b[1] - &b[0])))
        .map(|w| (w[0].clone(), w[1].clone()))
        .expect("0 and 1 are always present");
    let quarter = (&hi - &lo).mul_pow2(-2);
    let u = (&lo + &quarter, &hi - &quarter);
    let tuple: Vec<PlHomeo> = h
        .iter()
        .map(|hi| iota(&u.0, &u.1, hi).expect("U is a proper dyadic interval"))
        .collect();

    let mut cert = Certificate::default();
    let u_set = IntervalSet::single(Interval::closed(u.0.to_rational(), u.1.to_rational()));
    for (i, g) in tuple.iter().enumerate() {
        cert.push(
            format!("supp(g{}) inside U", i + 1),
            g.support().is_subset_of(&u_set),
        );
    }
    let mut witnesses = Vec::new();
    for (j, (w, (p, prod))) in words.iter().zip(&moved).enumerate() {
        let args = &tuple[..];
        let value = w.to_word().with_arity(h.len()).evaluate(args)?;
        let image = value.apply(p);
        cert.push(
            format!("w{}(g)({}) = {} != {}", j + 1, p, image, p),
            image == prod.apply(p) && &image != p,
        );
        witnesses.push((p.clone(), image));
    }
    debug_assert!(cert.all_hold());
    if !cert.all_hold() {
        return Err(SolverError::PreconditionFailed(
            "verification of the rescaled tuple failed".into(),
        ));
    }
    Ok(ProductSolution {
        tuple,
        interval: u,
        witnesses,
        certificate: cert,
    })
}

/// Short products used as shapes of candidate witnesses.
pub fn candidate_bases() -> Vec<PlHomeo> {
    let x0 = generator_x(0);
    let x1 = generator_x(1);
    let x0i = x0.invert();
    let x1i = x1.invert();
    vec![
        x0.clone(),
        x0i.clone(),
        x1.clone(),
        x1i.clone(),
        x0.compose(&x1),
        x1.compose(&x0),
        x0.compose(&x0),
        x0.compose(&x1i),
        x1.compose(&x0i),
        x0i.compose(&x1),
        x0.compose(&x0).compose(&x1),
        x1.compose(&x1),
    ]
}

/// Rewrites a one-variable word using that `y` commutes with `H_{<1}`:
/// while some constant `v_i ∈ H_{<1}` sits in a form with at least two
/// blocks, move it across its variable block and merge with its neighbour.
/// Returns the normalized word and the absorbed constants.
fn absorb_h_lt1(w: &MixedWord<PlHomeo>) -> Result<(Normalized, Vec<PlHomeo>), SolverError> {
    let mut absorbed = Vec::new();
    let mut current = w.clone();
    loop {
        let form = match current.to_reduced_form() {
            Ok(f) => f,
            Err(WordError::PureConstant) => {
                return Ok((Normalized::Constant, absorbed));
            }
            Err(WordError::TrivialWord) => {
                return Err(SolverError::PreconditionFailed(
                    "word is trivial once y commutes with H_<1".into(),
                ))
            }
            Err(e) => return Err(e.into()),
        };
        if form.n() == 0 {
            return Ok((Normalized::Oscillating(form), absorbed));
        }
        if form.n() == 1 {
            return Ok(if form.blocks[0].constant.in_h_lt1() {
                (Normalized::Exceptional(form), absorbed)
            } else {
                (Normalized::Oscillating(form), absorbed)
            });
        }
        // block 1 first, as in the displayed rewrite, then any other block
        let Some(i) = form.blocks.iter().position(|b| b.constant.in_h_lt1()) else {
            return Ok((Normalized::Oscillating(form), absorbed));
        };
        absorbed.push(form.blocks[i].constant.clone());
        let mut letters = Vec::new();
        for (k, b) in form.blocks.iter().enumerate().rev() {
            if k == i {
                letters.push(Letter::Const(b.constant.clone()));
                letters.extend(b.vars.iter().map(|v| Letter::Var(*v)));
            } else {
                letters.extend(b.vars.iter().map(|v| Letter::Var(*v)));
                letters.push(Letter::Const(b.constant.clone()));
            }
        }
        current = MixedWord::new(letters, form.arity);
    }
}

enum Normalized {
    /// No constants in `H_{<1}`; explicitly oscillating near 1.
    Oscillating(ReducedForm<PlHomeo>),
    /// `y^a v` with `v ∈ H_{<1}`.
    Exceptional(ReducedForm<PlHomeo>),
    /// A nontrivial constant up to conjugation.
    Constant,
}

/// Output of [`solve_h1`]: `supp(g) ⊆ [1-2^{-k}, 1)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct H1Solution {
    pub element: PlHomeo,
    pub k: u32,
    pub tried: usize,
    pub certificate: Certificate,
}

/// Search limits for [`solve_h1`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct H1Budget {
    pub max_k: u32,
    pub candidates: usize,
}

impl Default for H1Budget {
    fn default() -> Self {
        H1Budget {
            max_k: 48,
            candidates: 20_000,
        }
    }
}

/// Finds `g ≠ 1` supported near 1 with `[g,e] = 1` for all `e ∈ E` and
/// `w(g) ≠ 1` for all `w ∈ W`.
pub fn solve_h1(
    e: &[PlHomeo],
    w: &[MixedWord<PlHomeo>],
    budget: H1Budget,
) -> Result<H1Solution, SolverError> {
    for (i, h) in e.iter().enumerate() {
        if !h.in_h_lt1() {
            return Err(SolverError::PreconditionFailed(format!(
                "E[{}] has 1 in the closure of its support",
                i + 1
            )));
        }
    }
    let mut avoid: Vec<PlHomeo> = e.to_vec();
    let mut regular = Vec::new();
    for (j, word) in w.iter().enumerate() {
        if word.arity() > 1 {
            return Err(SolverError::PreconditionFailed(format!(
                "word {} has more than one variable",
                j + 1
            )));
        }
        if !word.has_variables() {
            return Err(SolverError::PreconditionFailed(format!(
                "word {} has no variable",
                j + 1
            )));
        }
        let (norm, absorbed) = absorb_h_lt1(word)?;
        avoid.extend(absorbed);
        match norm {
            Normalized::Oscillating(f) => regular.push(f),
            Normalized::Exceptional(f) => avoid.push(f.blocks[0].constant.clone()),
            Normalized::Constant => {}
        }
    }
    let avoid_support = avoid
        .iter()
        .fold(IntervalSet::empty(), |acc, h| acc.union(&h.support()));
    let omegas: Vec<IntervalSet> = regular.iter().map(ReducedForm::omega_set).collect();

    let one = Rational::from_integer(1.into());
    let mut tried = 0usize;
    for k in 1..=budget.max_k {
        let a = Dyadic::one_minus_pow2(k);
        let tail = IntervalSet::single(Interval {
            lo: a.to_rational(),
            lo_closed: true,
            hi: one.clone(),
            hi_closed: false,
        });
        if tail.intersects(&avoid_support) {
            continue;
        }
        if !omegas.iter().all(|o| tail.is_subset_of(o)) {
            continue;
        }
        let images_clear = regular.iter().all(|f| {
            f.v_family(&tail)
                .iter()
                .all(|s| !s.intersects(&avoid_support))
        });
        if !images_clear {
            continue;
        }
        for j in 0..=6u32 {
            let b = if j == 0 {
                Dyadic::one()
            } else {
                Dyadic::one_minus_pow2(k + j)
            };
            for base in candidate_bases() {
                if tried >= budget.candidates {
                    return Err(SolverError::BudgetExceeded(tried));
                }
                tried += 1;
                let g = iota(&a, &b, &base).expect("a < b");
                let cert = h1_certificate(&g, e, w)?;
                if cert.all_hold() {
                    return Ok(H1Solution {
                        element: g,
                        k,
                        tried,
                        certificate: cert,
                    });
                }
            }
        }
    }
    Err(SolverError::BudgetExceeded(tried))
}

/// Exact checks behind a [`solve_h1`] answer.
pub fn h1_certificate(
    g: &PlHomeo,
    e: &[PlHomeo],
    w: &[MixedWord<PlHomeo>],
) -> Result<Certificate, SolverError> {
    let mut cert = Certificate::default();
    cert.push("g != 1", !g.is_identity());
    for (i, h) in e.iter().enumerate() {
        cert.push(
            format!("[g, e{}] = 1", i + 1),
            g.commutator(h).is_identity(),
        );
    }
    for (j, word) in w.iter().enumerate() {
        let value = word.clone().with_arity(1).evaluate(std::slice::from_ref(g))?;
        cert.push(format!("w{}(g) != 1", j + 1), !value.is_identity());
    }
    Ok(cert)
}

/// Words `w_j(ȳ) ≠ 1` with optional side constraints on the solution.
#[derive(Debug, Clone, Default)]
pub struct InequalitySystem {
    pub words: Vec<MixedWord<PlHomeo>>,
    /// Every `g_i` must commute with these.
    pub commute_with: Vec<PlHomeo>,
    /// Every `g_i` must be supported inside this set.
    pub support_region: Option<IntervalSet>,
}

impl InequalitySystem {
    pub fn arity(&self) -> usize {
        self.words.iter().map(MixedWord::arity).max().unwrap_or(0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OscillatingSolution {
    pub tuple: Vec<PlHomeo>,
    pub allowed_support: IntervalSet,
    pub tried: usize,
    pub certificate: Certificate,
}

/// Randomized search over rescaled short elements supported in small
/// dyadic subintervals of the regions. Deterministic in `seed`; `Ok(None)`
/// when `budget` candidates fail.
pub fn solve_explicit_oscillating(
    system: &InequalitySystem,
    regions: &[IntervalSet],
    budget: usize,
    seed: u64,
) -> Result<Option<OscillatingSolution>, SolverError> {
    if regions.len() != system.words.len() {
        return Err(SolverError::BadInput(format!(
            "{} words but {} regions",
            system.words.len(),
            regions.len()
        )));
    }
    let ell = system.arity().max(1);
    let mut allowed = IntervalSet::empty();
    let mut cells: Vec<(Rational, Rational)> = Vec::new();
    for (j, (w, region)) in system.words.iter().zip(regions).enumerate() {
        let form = w.to_reduced_form().map_err(|e| {
            SolverError::PreconditionFailed(format!("word {}: {e}", j + 1))
        })?;
        let omega = form.omega_set();
        if region.is_empty() || !region.is_open() || !region.is_subset_of(&omega) {
            return Err(SolverError::PreconditionFailed(format!(
                "region {} is not a nonempty open subset of O_w = {}",
                j + 1,
                omega
            )));
        }
        allowed = allowed.union(region);
        for s in form.v_family(region) {
            allowed = allowed.union(&s);
        }
        cells.extend(
            region
                .intervals()
                .iter()
                .map(|iv| (iv.lo.clone(), iv.hi.clone())),
        );
    }
    if let Some(r) = &system.support_region {
        allowed = allowed.intersection(r);
        cells = cells
            .into_iter()
            .flat_map(|(lo, hi)| {
                IntervalSet::single(Interval::open(lo, hi))
                    .intersection(r)
                    .intervals()
                    .iter()
                    .map(|iv| (iv.lo.clone(), iv.hi.clone()))
                    .collect::<Vec<_>>()
            })
            .collect();
    }
    let lattices: Vec<(Dyadic, Dyadic)> = cells
        .iter()
        .filter_map(|(lo, hi)| dyadic_inside(lo, hi))
        .collect();
    if lattices.is_empty() {
        return Ok(None);
    }
    let bases = candidate_bases();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for tried in 1..=budget {
        // the unscaled bases first, then random rescaled copies
        let tuple: Vec<PlHomeo> = (0..ell)
            .map(|_| {
                if tried <= bases.len() {
                    return bases[tried - 1].clone();
                }
                let (a, b) = &lattices[rng.gen_range(0..lattices.len())];
                let (lo, hi) = random_subinterval(&mut rng, a, b);
                iota(&lo, &hi, &bases[rng.gen_range(0..bases.len())]).expect("lo < hi")
            })
            .collect();
        let cert = oscillating_certificate(system, &tuple, &allowed)?;
        if cert.all_hold() {
            return Ok(Some(OscillatingSolution {
                tuple,
                allowed_support: allowed,
                tried,
                certificate: cert,
            }));
        }
    }
    Ok(None)
}

/// A dyadic subinterval of `[a,b]` at a random depth.
fn random_subinterval<R: Rng>(rng: &mut R, a: &Dyadic, b: &Dyadic) -> (Dyadic, Dyadic) {
    let depth = rng.gen_range(0..4i64);
    let width = (b - a).mul_pow2(-depth);
    let slots = 1i64 << depth;
    let start = rng.gen_range(0..slots);
    let mut lo = a.clone();
    for _ in 0..start {
        lo = &lo + &width;
    }
    let hi = &lo + &width;
    (lo, hi)
}

fn oscillating_certificate(
    system: &InequalitySystem,
    tuple: &[PlHomeo],
    allowed: &IntervalSet,
) -> Result<Certificate, SolverError> {
    let mut cert = Certificate::default();
    for (i, g) in tuple.iter().enumerate() {
        cert.push(
            format!("supp(g{}) inside the allowed region", i + 1),
            g.support().is_subset_of(allowed),
        );
        for (k, h) in system.commute_with.iter().enumerate() {
            cert.push(
                format!("[g{}, e{}] = 1", i + 1, k + 1),
                g.commutator(h).is_identity(),
            );
        }
    }
    for (j, w) in system.words.iter().enumerate() {
        let value = w.clone().with_arity(tuple.len()).evaluate(tuple)?;
        cert.push(format!("w{}(g) != 1", j + 1), !value.is_identity());
    }
    Ok(cert)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FreePairWitness {
    pub element: PlHomeo,
    pub length: usize,
    pub words_checked: usize,
    pub tried: usize,
}

/// Number of nonempty freely reduced words of length `<= l` over two
/// generators and their inverses.
pub fn reduced_word_count(l: usize) -> usize {
    (1..=l).map(|n| 4 * 3usize.pow(n as u32 - 1)).sum()
}

/// Checks that no nonempty reduced word of length `<= l` in `h^{±1}, g^{±1}`
/// is trivial; returns the number of words checked, or the first relation.
pub fn check_free_pair(h: &PlHomeo, g: &PlHomeo, l: usize) -> Result<usize, Vec<(usize, bool)>> {
    let letters = [h.clone(), h.invert(), g.clone(), g.invert()];
    let mut checked = 0usize;
    // depth-first over reduced words with prefix products
    let mut stack: Vec<(Vec<usize>, PlHomeo)> = vec![(Vec::new(), PlHomeo::identity())];
    while let Some((word, value)) = stack.pop() {
        if word.len() == l {
            continue;
        }
        for (i, letter) in letters.iter().enumerate() {
            if let Some(&last) = word.last() {
                if last ^ 1 == i {
                    continue;
                }
            }
            let next = value.compose(letter);
            let mut w = word.clone();
            w.push(i);
            checked += 1;
            if next.is_identity() {
                return Err(w.iter().map(|&i| (i / 2, i % 2 == 1)).collect());
            }
            stack.push((w, next));
        }
    }
    Ok(checked)
}

/// Finds `g` such that `{h, g}` satisfies no relation of length `<= l`.
pub fn free_pair_witness(
    h: &PlHomeo,
    l: usize,
    budget: usize,
    seed: u64,
) -> Result<FreePairWitness, SolverError> {
    if h.is_identity() {
        return Err(SolverError::IdentityInput);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x1 = generator_x(1);
    for tried in 1..=budget {
        let len = rng.gen_range(4..=12);
        let conj = crate::thompson::random_element_with(&mut rng, len);
        let g = if tried % 2 == 1 {
            x1.conjugate(&conj)
        } else {
            conj.compose(&crate::thompson::random_element_with(&mut rng, 6))
        };
        if g.is_identity() {
            continue;
        }
        if let Ok(n) = check_free_pair(h, &g, l) {
            return Ok(FreePairWitness {
                element: g,
                length: l,
                words_checked: n,
                tried,
            });
        }
    }
    Err(SolverError::BudgetExceeded(budget))
}
