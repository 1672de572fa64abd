//! Mixed words: words over a group with variables `y1, y2, ...`.
//!
//! A [`MixedWord`] is kept freely reduced in `G ∗ F_ℓ`: no adjacent
//! cancelling variable letters, no adjacent constants, no identity constants.
//! [`ReducedForm`] is the cyclic normal form `u_n v_n … u_1 v_1` with pure
//! variable blocks `u_i` and nontrivial constants `v_i`.

use std::fmt;

use rand::Rng;
use thiserror::Error;

use crate::dyadic::Dyadic;
use crate::group::Group;
use crate::interval::IntervalSet;
use crate::thompson::PlHomeo;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WordError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("arity mismatch: expected {expected}, got {got}")]
    Arity { expected: usize, got: usize },
    #[error("word is a pure constant")]
    PureConstant,
    #[error("word is trivial")]
    TrivialWord,
    #[error("intervals must be disjoint open dyadic subintervals with p1 < p2")]
    BadIntervals,
    #[error("constant {0} is trivial or not supported in its interval")]
    BadConstants(usize),
}

/// A variable letter `y_index^(±1)`; indices start at 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarLetter {
    pub index: usize,
    pub inverse: bool,
}

impl VarLetter {
    pub fn new(index: usize, inverse: bool) -> Self {
        VarLetter { index, inverse }
    }

    pub fn inv(self) -> Self {
        VarLetter {
            index: self.index,
            inverse: !self.inverse,
        }
    }
}

impl fmt::Display for VarLetter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.inverse {
            write!(f, "y{}^-1", self.index)
        } else {
            write!(f, "y{}", self.index)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Letter<G> {
    Var(VarLetter),
    Const(G),
}

impl<G: Group> Letter<G> {
    fn inverse(&self) -> Self {
        match self {
            Letter::Var(v) => Letter::Var(v.inv()),
            Letter::Const(g) => Letter::Const(g.inverse()),
        }
    }
}

/// A freely reduced word in `G ∗ F_ℓ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MixedWord<G> {
    letters: Vec<Letter<G>>,
    arity: usize,
}

/// Pushes one letter onto a reduced stack, cancelling and merging.
fn push_reduced<G: Group>(stack: &mut Vec<Letter<G>>, letter: Letter<G>) {
    match letter {
        Letter::Var(v) => {
            if let Some(Letter::Var(top)) = stack.last() {
                if *top == v.inv() {
                    stack.pop();
                    return;
                }
            }
            stack.push(Letter::Var(v));
        }
        Letter::Const(g) => {
            if g.is_identity() {
                return;
            }
            if let Some(Letter::Const(top)) = stack.last() {
                let merged = top.mul(&g);
                stack.pop();
                if !merged.is_identity() {
                    stack.push(Letter::Const(merged));
                }
                return;
            }
            stack.push(Letter::Const(g));
        }
    }
}

impl<G: Group> MixedWord<G> {
    pub fn empty(arity: usize) -> Self {
        MixedWord {
            letters: Vec::new(),
            arity,
        }
    }

    /// Reduces `letters`; the arity is raised to the largest variable index if needed.
    pub fn new(letters: Vec<Letter<G>>, arity: usize) -> Self {
        let mut stack = Vec::with_capacity(letters.len());
        let mut max_index = 0;
        for l in letters {
            if let Letter::Var(v) = &l {
                max_index = max_index.max(v.index);
            }
            push_reduced(&mut stack, l);
        }
        MixedWord {
            letters: stack,
            arity: arity.max(max_index),
        }
    }

    pub fn var(index: usize) -> Self {
        MixedWord::new(vec![Letter::Var(VarLetter::new(index, false))], index)
    }

    pub fn constant(g: G) -> Self {
        MixedWord::new(vec![Letter::Const(g)], 0)
    }

    pub fn letters(&self) -> &[Letter<G>] {
        &self.letters
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn with_arity(mut self, arity: usize) -> Self {
        self.arity = self.arity.max(arity);
        self
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn has_variables(&self) -> bool {
        self.letters.iter().any(|l| matches!(l, Letter::Var(_)))
    }

    pub fn has_constants(&self) -> bool {
        self.letters.iter().any(|l| matches!(l, Letter::Const(_)))
    }

    pub fn constants(&self) -> impl Iterator<Item = &G> {
        self.letters.iter().filter_map(|l| match l {
            Letter::Const(g) => Some(g),
            Letter::Var(_) => None,
        })
    }

    pub fn mul(&self, rhs: &MixedWord<G>) -> MixedWord<G> {
        let mut stack = self.letters.clone();
        for l in &rhs.letters {
            push_reduced(&mut stack, l.clone());
        }
        MixedWord {
            letters: stack,
            arity: self.arity.max(rhs.arity),
        }
    }

    pub fn inverse(&self) -> MixedWord<G> {
        MixedWord {
            letters: self.letters.iter().rev().map(Letter::inverse).collect(),
            arity: self.arity,
        }
    }

    pub fn pow(&self, k: i64) -> MixedWord<G> {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut acc = MixedWord::empty(self.arity);
        for _ in 0..k.unsigned_abs() {
            acc = acc.mul(&base);
        }
        acc
    }

    /// `[a, b] = a⁻¹ b⁻¹ a b`.
    pub fn commutator(a: &MixedWord<G>, b: &MixedWord<G>) -> MixedWord<G> {
        a.inverse().mul(&b.inverse()).mul(a).mul(b)
    }

    /// Substitutes `args` for the variables and multiplies out.
    pub fn evaluate(&self, args: &[G]) -> Result<G, WordError> {
        if args.len() != self.arity {
            return Err(WordError::Arity {
                expected: self.arity,
                got: args.len(),
            });
        }
        let inverses: Vec<G> = args.iter().map(Group::inverse).collect();
        let mut acc = G::identity();
        for l in &self.letters {
            acc = match l {
                Letter::Const(g) => acc.mul(g),
                Letter::Var(v) if v.inverse => acc.mul(&inverses[v.index - 1]),
                Letter::Var(v) => acc.mul(&args[v.index - 1]),
            };
        }
        Ok(acc)
    }

    /// Replaces `y_i` by `images[i-1]` and reduces. The result has the
    /// arity of the images.
    pub fn substitute(&self, images: &[MixedWord<G>]) -> Result<MixedWord<G>, WordError> {
        if images.len() != self.arity {
            return Err(WordError::Arity {
                expected: self.arity,
                got: images.len(),
            });
        }
        let arity = images.iter().map(MixedWord::arity).max().unwrap_or(0);
        let inverses: Vec<MixedWord<G>> = images.iter().map(MixedWord::inverse).collect();
        let mut out = MixedWord::empty(arity);
        for l in &self.letters {
            out = match l {
                Letter::Const(g) => out.mul(&MixedWord::constant(g.clone())),
                Letter::Var(v) if v.inverse => out.mul(&inverses[v.index - 1]),
                Letter::Var(v) => out.mul(&images[v.index - 1]),
            };
        }
        Ok(out)
    }

    /// Applies `f` to every constant and reduces again.
    pub fn map_constants<H: Group>(&self, f: impl Fn(&G) -> H) -> MixedWord<H> {
        MixedWord::new(
            self.letters
                .iter()
                .map(|l| match l {
                    Letter::Var(v) => Letter::Var(*v),
                    Letter::Const(g) => Letter::Const(f(g)),
                })
                .collect(),
            self.arity,
        )
    }

    /// Cyclic normal form `u_n v_n … u_1 v_1` together with the conjugator.
    pub fn to_reduced_form(&self) -> Result<ReducedForm<G>, WordError> {
        if self.is_empty() {
            return Err(WordError::TrivialWord);
        }
        if !self.has_variables() {
            return Err(WordError::PureConstant);
        }
        let mut w: std::collections::VecDeque<Letter<G>> = self.letters.iter().cloned().collect();
        let mut conj = MixedWord::empty(self.arity);
        let has_const = self.has_constants();
        loop {
            if w.len() < 2 {
                break;
            }
            let first = w.front().expect("len >= 2").clone();
            let last = w.back().expect("len >= 2").clone();
            match (&first, &last) {
                // a X a⁻¹ -> X
                (Letter::Var(a), Letter::Var(b)) if *b == a.inv() => {
                    w.pop_front();
                    w.pop_back();
                    conj = conj.mul(&MixedWord::new(vec![first], 0));
                }
                // a X b -> X (b a)
                (Letter::Const(a), Letter::Const(b)) => {
                    w.pop_front();
                    w.pop_back();
                    let merged = b.mul(a);
                    if !merged.is_identity() {
                        w.push_back(Letter::Const(merged));
                    }
                    conj = conj.mul(&MixedWord::constant(a.clone()));
                }
                // a X -> X a
                (Letter::Const(a), Letter::Var(_)) => {
                    w.pop_front();
                    w.push_back(Letter::Const(a.clone()));
                    conj = conj.mul(&MixedWord::constant(a.clone()));
                }
                // X b -> b X, until the word ends in a constant
                (Letter::Var(_), Letter::Var(b)) if has_const => {
                    w.pop_back();
                    w.push_front(Letter::Var(*b));
                    conj = conj.mul(&MixedWord::new(vec![Letter::Var(b.inv())], 0));
                }
                _ => break,
            }
        }
        if w.iter().all(|l| matches!(l, Letter::Const(_))) {
            // only reachable if cyclic cancellation ate every variable
            return Err(if w.is_empty() {
                WordError::TrivialWord
            } else {
                WordError::PureConstant
            });
        }
        let mut blocks = Vec::new();
        let mut head = Vec::new();
        let mut vars: Vec<VarLetter> = Vec::new();
        for l in w {
            match l {
                Letter::Var(v) => vars.push(v),
                Letter::Const(g) => blocks.push(Block {
                    vars: std::mem::take(&mut vars),
                    constant: g,
                }),
            }
        }
        if blocks.is_empty() {
            head = vars;
        }
        blocks.reverse();
        Ok(ReducedForm {
            blocks,
            pure: head,
            conjugator: conj.with_arity(self.arity),
            arity: self.arity,
        })
    }

    /// Text form; constants are rendered by `name`.
    pub fn render(&self, name: impl Fn(&G) -> String) -> String {
        if self.letters.is_empty() {
            return "1".to_string();
        }
        self.letters
            .iter()
            .map(|l| match l {
                Letter::Var(v) => v.to_string(),
                Letter::Const(g) => name(g),
            })
            .collect::<Vec<_>>()
            .join(" * ")
    }
}

/// One block `u_i v_i` of the cyclic normal form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Block<G> {
    pub vars: Vec<VarLetter>,
    pub constant: G,
}

/// The form `u_n v_n … u_1 v_1`; `blocks[0]` is `(u_1, v_1)`.
///
/// For a word without constants `blocks` is empty and `pure` holds the
/// cyclically reduced variable word. The original word equals
/// `conjugator · form · conjugator⁻¹` in `G ∗ F_ℓ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReducedForm<G> {
    pub blocks: Vec<Block<G>>,
    pub pure: Vec<VarLetter>,
    pub conjugator: MixedWord<G>,
    pub arity: usize,
}

impl<G: Group> ReducedForm<G> {
    pub fn n(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_pure_variable(&self) -> bool {
        self.blocks.is_empty()
    }

    /// The form as a word, `u_n v_n … u_1 v_1`.
    pub fn to_word(&self) -> MixedWord<G> {
        let mut letters = Vec::new();
        if self.blocks.is_empty() {
            letters.extend(self.pure.iter().map(|v| Letter::Var(*v)));
        }
        for b in self.blocks.iter().rev() {
            letters.extend(b.vars.iter().map(|v| Letter::Var(*v)));
            letters.push(Letter::Const(b.constant.clone()));
        }
        MixedWord::new(letters, self.arity)
    }

    /// `conjugator · form · conjugator⁻¹`, which reduces to the original word.
    pub fn unrotate(&self) -> MixedWord<G> {
        self.conjugator
            .mul(&self.to_word())
            .mul(&self.conjugator.inverse())
    }

    /// `v_n · … · v_1`.
    pub fn constants_product(&self) -> G {
        self.blocks
            .iter()
            .rev()
            .fold(G::identity(), |acc, b| acc.mul(&b.constant))
    }

    pub fn has_nontrivial_constant_product(&self) -> bool {
        !self.constants_product().is_identity()
    }

    /// Partial products `v_i · … · v_1` for `i = 0..=n` (the first is the identity).
    pub fn partial_products(&self) -> Vec<G> {
        let mut out = vec![G::identity()];
        let mut acc = G::identity();
        for b in &self.blocks {
            acc = b.constant.mul(&acc);
            out.push(acc.clone());
        }
        out
    }
}

impl ReducedForm<PlHomeo> {
    /// `O_w = ⋂_{i<n} (v_i⋯v_1)⁻¹(supp v_{i+1})`; `(0,1)` for pure variable words.
    pub fn omega_set(&self) -> IntervalSet {
        if self.blocks.is_empty() {
            return IntervalSet::open_unit();
        }
        let mut acc = IntervalSet::open_unit();
        let mut prefix = PlHomeo::identity();
        for b in &self.blocks {
            let inv = prefix.invert();
            let pulled = b.constant.support().map_monotone(|x| inv.eval_rational(x));
            acc = acc.intersection(&pulled);
            prefix = b.constant.compose(&prefix);
        }
        acc
    }

    /// Nontrivial and `V ∩ O_w ≠ ∅`.
    pub fn is_explicitly_oscillating(&self, region: &IntervalSet) -> bool {
        self.omega_set().intersects(region)
    }

    /// `{ v_j^{ε_j} ⋯ v_1^{ε_1}(A) : ε ∈ {0,1}^j, 1 ≤ j ≤ n }`, first
    /// occurrence order, duplicates dropped.
    pub fn v_family(&self, a: &IntervalSet) -> Vec<IntervalSet> {
        let mut out: Vec<IntervalSet> = Vec::new();
        // images after processing v_1..v_j, all 2^j choices
        let mut layer: Vec<IntervalSet> = vec![a.clone()];
        for b in &self.blocks {
            let mut next = Vec::with_capacity(layer.len() * 2);
            for s in &layer {
                next.push(s.clone());
                next.push(s.map_monotone(|x| b.constant.eval_rational(x)));
            }
            for s in &next {
                if !out.contains(s) {
                    out.push(s.clone());
                }
            }
            layer = next;
        }
        out
    }

    /// Raw size of the family before merging duplicates: `2^(n+1) - 2`.
    pub fn v_family_raw_len(&self) -> usize {
        (1usize << (self.blocks.len() + 1)) - 2
    }
}

/// Free-reducing `w` and asking whether it is explicitly oscillating in `region`.
pub fn is_explicitly_oscillating(w: &MixedWord<PlHomeo>, region: &IntervalSet) -> bool {
    match w.to_reduced_form() {
        Ok(f) => f.is_explicitly_oscillating(region),
        // a nontrivial pure constant has no O_w of its own; treat like (1.1) with no variables
        Err(WordError::PureConstant) => false,
        Err(_) => false,
    }
}

/// `w(y) = [w⁻(y), w⁺(y)]` with
/// `w⁻ = y⁻¹h₁⁻¹y h₂⁻¹ y⁻¹h₁y h₂` and `w⁺ = y h₁⁻¹y⁻¹ h₂⁻¹ y h₁y⁻¹ h₂`.
///
/// `I₁ = (p₁,q₁)` and `I₂ = (p₂,q₂)` must be disjoint with `p₁ < p₂`, and
/// each `hᵢ` must be nontrivial and supported in the closure of `Iᵢ`.
pub fn law_lwc2m(
    i1: (&Dyadic, &Dyadic),
    i2: (&Dyadic, &Dyadic),
    h1: &PlHomeo,
    h2: &PlHomeo,
) -> Result<MixedWord<PlHomeo>, WordError> {
    let (p1, q1) = i1;
    let (p2, q2) = i2;
    let zero = Dyadic::zero();
    let one = Dyadic::one();
    if !(p1 >= &zero && p1 < q1 && q1 <= p2 && p2 < q2 && q2 <= &one) {
        return Err(WordError::BadIntervals);
    }
    for (k, (h, p, q)) in [(h1, p1, q1), (h2, p2, q2)].into_iter().enumerate() {
        let allowed = IntervalSet::single(crate::interval::Interval::closed(
            p.to_rational(),
            q.to_rational(),
        ));
        if h.is_identity() || !h.support_closure().is_subset_of(&allowed) {
            return Err(WordError::BadConstants(k + 1));
        }
    }
    let y = MixedWord::<PlHomeo>::var(1);
    let yi = y.inverse();
    let c = |g: &PlHomeo| MixedWord::constant(g.clone());
    let (h1w, h2w) = (c(h1), c(h2));
    let (h1i, h2i) = (c(&h1.invert()), c(&h2.invert()));
    let chain = |parts: &[&MixedWord<PlHomeo>]| {
        parts
            .iter()
            .fold(MixedWord::empty(1), |acc, p| acc.mul(p))
    };
    let minus = chain(&[&yi, &h1i, &y, &h2i, &yi, &h1w, &y, &h2w]);
    let plus = chain(&[&y, &h1i, &yi, &h2i, &y, &h1w, &yi, &h2w]);
    Ok(MixedWord::commutator(&minus, &plus))
}

/// Outcome of sampling a candidate law.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LawCheck<G> {
    /// No sampled tuple refuted the law. This is not a proof.
    Holds { samples: usize },
    Counterexample(Vec<G>),
}

impl<G> LawCheck<G> {
    pub fn holds(&self) -> bool {
        matches!(self, LawCheck::Holds { .. })
    }
}

/// Evaluates `w` on `n` tuples from `sampler` and returns the first
/// tuple giving a nonidentity value.
pub fn is_law_sampled<G: Group>(
    w: &MixedWord<G>,
    mut sampler: impl FnMut(usize) -> Vec<G>,
    n: usize,
) -> Result<LawCheck<G>, WordError> {
    if w.is_empty() {
        return Ok(LawCheck::Holds { samples: 0 });
    }
    for i in 0..n {
        let args = sampler(i);
        if !w.evaluate(&args)?.is_identity() {
            return Ok(LawCheck::Counterexample(args));
        }
    }
    Ok(LawCheck::Holds { samples: n })
}

/// A sampler producing tuples of [`crate::thompson::random_element_with`] elements.
pub fn thompson_sampler<R: Rng>(
    rng: &mut R,
    arity: usize,
    max_len: usize,
) -> impl FnMut(usize) -> Vec<PlHomeo> + '_ {
    move |_| {
        (0..arity)
            .map(|_| {
                let len = rng.gen_range(0..=max_len);
                crate::thompson::random_element_with(rng, len)
            })
            .collect()
    }
}
