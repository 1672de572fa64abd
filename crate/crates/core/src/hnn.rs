//! Words in HNN extensions `⟨F, t | t⁻¹ h t = α(h), h ∈ H⟩` and Britton
//! reduction against a membership oracle for `H`.

use std::fmt;

use rand::Rng;
use thiserror::Error;

use crate::dyadic::Dyadic;
use crate::thompson::{iota, partition_map, random_element_with, PlHomeo};
use crate::words::{Letter, MixedWord};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HnnError {
    #[error("oracle reports membership but the associated map is undefined at {0}")]
    OracleInconsistent(PlHomeo),
    #[error("input element is the identity")]
    IdentityInput,
    #[error("word uses variables other than the stable letter")]
    NotAnHnnWord,
}

/// Membership in the associated subgroups `H` and `α(H)`, and the map `α`.
///
/// `None` from a membership query means the oracle cannot decide.
pub trait MembershipOracle {
    fn contains(&self, h: &PlHomeo) -> Option<bool>;

    /// Membership in `α(H)`; equal to [`contains`](Self::contains) for identity `α`.
    fn contains_image(&self, h: &PlHomeo) -> Option<bool> {
        self.contains(h)
    }

    fn alpha(&self, h: &PlHomeo) -> Option<PlHomeo>;

    fn alpha_inverse(&self, h: &PlHomeo) -> Option<PlHomeo>;
}

/// `H_{<1}`: elements whose support closure misses 1. `α` is the identity.
#[derive(Debug, Clone, Copy, Default)]
pub struct HLt1Oracle;

impl MembershipOracle for HLt1Oracle {
    fn contains(&self, h: &PlHomeo) -> Option<bool> {
        Some(h.in_h_lt1())
    }

    fn alpha(&self, h: &PlHomeo) -> Option<PlHomeo> {
        h.in_h_lt1().then(|| h.clone())
    }

    fn alpha_inverse(&self, h: &PlHomeo) -> Option<PlHomeo> {
        self.alpha(h)
    }
}

pub fn oracle_h_lt1() -> HLt1Oracle {
    HLt1Oracle
}

/// The cyclic subgroup `⟨h⟩` with identity `α`.
#[derive(Debug, Clone)]
pub struct CyclicOracle {
    generator: PlHomeo,
}

impl CyclicOracle {
    pub fn generator(&self) -> &PlHomeo {
        &self.generator
    }
}

impl MembershipOracle for CyclicOracle {
    fn contains(&self, f: &PlHomeo) -> Option<bool> {
        Some(f.is_power_of(&self.generator).is_some())
    }

    fn alpha(&self, f: &PlHomeo) -> Option<PlHomeo> {
        f.is_power_of(&self.generator).map(|_| f.clone())
    }

    fn alpha_inverse(&self, f: &PlHomeo) -> Option<PlHomeo> {
        self.alpha(f)
    }
}

pub fn oracle_cyclic(h: &PlHomeo) -> Result<CyclicOracle, HnnError> {
    if h.is_identity() {
        return Err(HnnError::IdentityInput);
    }
    Ok(CyclicOracle {
        generator: h.clone(),
    })
}

/// `f_0 t^{ε_1} f_1 … t^{ε_k} f_k`; `inverse[i]` is true when `ε_{i+1} = -1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HnnWord {
    pieces: Vec<PlHomeo>,
    inverse: Vec<bool>,
}

impl HnnWord {
    pub fn new(pieces: Vec<PlHomeo>, inverse: Vec<bool>) -> Self {
        assert_eq!(pieces.len(), inverse.len() + 1, "k stable letters need k+1 pieces");
        HnnWord { pieces, inverse }
    }

    pub fn element(f: PlHomeo) -> Self {
        HnnWord::new(vec![f], Vec::new())
    }

    /// A mixed word in one variable, read with `y1` as the stable letter.
    pub fn from_mixed(w: &MixedWord<PlHomeo>) -> Result<Self, HnnError> {
        let mut pieces = vec![PlHomeo::identity()];
        let mut inverse = Vec::new();
        for l in w.letters() {
            match l {
                Letter::Const(g) => {
                    let last = pieces.last_mut().expect("nonempty");
                    *last = last.compose(g);
                }
                Letter::Var(v) if v.index == 1 => {
                    inverse.push(v.inverse);
                    pieces.push(PlHomeo::identity());
                }
                Letter::Var(_) => return Err(HnnError::NotAnHnnWord),
            }
        }
        Ok(HnnWord { pieces, inverse })
    }

    pub fn to_mixed(&self) -> MixedWord<PlHomeo> {
        let mut letters = vec![Letter::Const(self.pieces[0].clone())];
        for (s, f) in self.inverse.iter().zip(&self.pieces[1..]) {
            letters.push(Letter::Var(crate::words::VarLetter::new(1, *s)));
            letters.push(Letter::Const(f.clone()));
        }
        MixedWord::new(letters, 1)
    }

    pub fn pieces(&self) -> &[PlHomeo] {
        &self.pieces
    }

    /// Signs of the stable letters, `+1` or `-1`.
    pub fn signs(&self) -> Vec<i8> {
        self.inverse.iter().map(|&i| if i { -1 } else { 1 }).collect()
    }

    pub fn stable_count(&self) -> usize {
        self.inverse.len()
    }

    pub fn mul(&self, rhs: &HnnWord) -> HnnWord {
        let mut pieces = self.pieces.clone();
        let last = pieces.pop().expect("nonempty");
        pieces.push(last.compose(&rhs.pieces[0]));
        pieces.extend(rhs.pieces[1..].iter().cloned());
        let mut inverse = self.inverse.clone();
        inverse.extend(rhs.inverse.iter().copied());
        HnnWord { pieces, inverse }
    }

    pub fn inverse(&self) -> HnnWord {
        HnnWord {
            pieces: self.pieces.iter().rev().map(PlHomeo::invert).collect(),
            inverse: self.inverse.iter().rev().map(|s| !s).collect(),
        }
    }

    /// The stable letter `t`.
    pub fn stable() -> HnnWord {
        HnnWord::new(vec![PlHomeo::identity(), PlHomeo::identity()], vec![false])
    }

    /// Position `i` such that `t^{ε_i} f_i t^{ε_{i+1}}` has opposite signs
    /// and the middle piece lies in the relevant subgroup. `Err(())` if a
    /// candidate pinch is undecidable by the oracle.
    fn find_pinch(&self, oracle: &dyn MembershipOracle) -> Result<Option<usize>, ()> {
        let mut undecided = false;
        for i in 0..self.inverse.len().saturating_sub(1) {
            let (a, b) = (self.inverse[i], self.inverse[i + 1]);
            if a == b {
                continue;
            }
            let mid = &self.pieces[i + 1];
            let member = if a {
                oracle.contains(mid)
            } else {
                oracle.contains_image(mid)
            };
            match member {
                Some(true) => return Ok(Some(i)),
                Some(false) => {}
                None => undecided = true,
            }
        }
        if undecided {
            Err(())
        } else {
            Ok(None)
        }
    }

    fn reduce_inner(&self, oracle: &dyn MembershipOracle) -> Result<(HnnWord, bool), HnnError> {
        let mut w = self.clone();
        let mut undecided = false;
        loop {
            let found = match w.find_pinch(oracle) {
                Ok(f) => f,
                Err(()) => {
                    undecided = true;
                    // retry ignoring undecided spots: only decided pinches fire
                    w.first_decided_pinch(oracle)
                }
            };
            let Some(i) = found else {
                return Ok((w, undecided));
            };
            let mid = &w.pieces[i + 1];
            let replaced = if w.inverse[i] {
                oracle.alpha(mid)
            } else {
                oracle.alpha_inverse(mid)
            }
            .ok_or_else(|| HnnError::OracleInconsistent(mid.clone()))?;
            let merged = w.pieces[i].compose(&replaced).compose(&w.pieces[i + 2]);
            w.pieces.splice(i..i + 3, [merged]);
            w.inverse.drain(i..i + 2);
        }
    }

    fn first_decided_pinch(&self, oracle: &dyn MembershipOracle) -> Option<usize> {
        (0..self.inverse.len().saturating_sub(1)).find(|&i| {
            let (a, b) = (self.inverse[i], self.inverse[i + 1]);
            a != b
                && if a {
                    oracle.contains(&self.pieces[i + 1]) == Some(true)
                } else {
                    oracle.contains_image(&self.pieces[i + 1]) == Some(true)
                }
        })
    }

    /// Whether some pinch is present (decided by `oracle`).
    pub fn has_pinch(&self, oracle: &dyn MembershipOracle) -> bool {
        self.first_decided_pinch(oracle).is_some()
    }

    pub fn render(&self, name: impl Fn(&PlHomeo) -> String) -> String {
        let mut parts = Vec::new();
        let push_piece = |f: &PlHomeo, parts: &mut Vec<String>| {
            if !f.is_identity() {
                parts.push(name(f));
            }
        };
        push_piece(&self.pieces[0], &mut parts);
        for (s, f) in self.inverse.iter().zip(&self.pieces[1..]) {
            parts.push(if *s { "t^-1".into() } else { "t".into() });
            push_piece(f, &mut parts);
        }
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join(" * ")
        }
    }
}

impl fmt::Display for HnnWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render(|g| g.to_string()))
    }
}

/// Leftmost-innermost pinch removal until no pinch remains.
pub fn britton_reduce(w: &HnnWord, oracle: &dyn MembershipOracle) -> Result<HnnWord, HnnError> {
    Ok(w.reduce_inner(oracle)?.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Yes,
    No,
    Unknown,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Yes => "yes",
            Verdict::No => "no",
            Verdict::Unknown => "unknown",
        })
    }
}

/// Triviality in the extension: a reduced word with stable letters is
/// nontrivial; otherwise compare the remaining element of F with 1.
pub fn is_trivial_in_hnn(w: &HnnWord, oracle: &dyn MembershipOracle) -> Result<Verdict, HnnError> {
    let (r, undecided) = w.reduce_inner(oracle)?;
    if r.stable_count() > 0 {
        return Ok(if undecided { Verdict::Unknown } else { Verdict::No });
    }
    Ok(if r.pieces[0].is_identity() {
        Verdict::Yes
    } else {
        Verdict::No
    })
}

/// `[t, f⁻¹ t f] = t⁻¹ · f⁻¹ t⁻¹ f · t · f⁻¹ t f`.
pub fn stable_commutator_word(f: &PlHomeo) -> HnnWord {
    let t = HnnWord::stable();
    let tf = HnnWord::element(f.invert())
        .mul(&t)
        .mul(&HnnWord::element(f.clone()));
    t.inverse().mul(&tf.inverse()).mul(&t).mul(&tf)
}

/// A random word with `k` stable letters. Each piece is an element of
/// `H_{<1}` with probability one half, otherwise a random element.
pub fn random_hnn_word<R: Rng>(rng: &mut R, k: usize, piece_len: usize) -> HnnWord {
    let mut pieces = Vec::with_capacity(k + 1);
    for _ in 0..=k {
        let f = random_element_with(rng, piece_len);
        if rng.gen_bool(0.5) {
            let j = rng.gen_range(1..4u32);
            pieces.push(iota(&Dyadic::zero(), &Dyadic::one_minus_pow2(j), &f).expect("proper"));
        } else {
            pieces.push(f);
        }
    }
    let inverse = (0..k).map(|_| rng.gen_bool(0.5)).collect();
    HnnWord::new(pieces, inverse)
}

/// An instance `(g, f0)` of the commutation setup: points
/// `p_r < q_r < p_t < q_t`, `g` fixing `[p_r,q_r] ∪ [p_t,q_t]` pointwise and
/// `f0` supported in `[p_r,q_t]` with `f0(q_r) = p_t`.
pub fn commuting_instance<R: Rng>(rng: &mut R) -> (PlHomeo, PlHomeo, [Dyadic; 4]) {
    // four distinct points on the grid of 1/32, kept away from 0 and 1
    let mut cuts: Vec<i64> = Vec::new();
    while cuts.len() < 4 {
        let c = rng.gen_range(1..32i64);
        if !cuts.contains(&c) {
            cuts.push(c);
        }
    }
    cuts.sort_unstable();
    let pts: Vec<Dyadic> = cuts.iter().map(|&c| Dyadic::new(c, 5)).collect();
    let (pr, qr, pt, qt) = (&pts[0], &pts[1], &pts[2], &pts[3]);
    let zero = Dyadic::zero();
    let one = Dyadic::one();
    let mut g = PlHomeo::identity();
    for (a, b) in [(&zero, pr), (qr, pt), (qt, &one)] {
        let len = rng.gen_range(0..8);
        let piece = iota(a, b, &random_element_with(rng, len)).expect("a < b");
        g = g.compose(&piece);
    }
    let f0 = partition_map(
        &[zero.clone(), pr.clone(), qr.clone(), qt.clone(), one.clone()],
        &[zero, pr.clone(), pt.clone(), qt.clone(), one],
    )
    .expect("matching partitions");
    (g, f0, [pr.clone(), qr.clone(), pt.clone(), qt.clone()])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::{parse_word_with, thompson_resolver, ParseOptions, SymbolTable};
    use crate::group::Group;
    use crate::thompson::generator_x;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn d(s: &str) -> Dyadic {
        s.parse().unwrap()
    }

    fn h() -> PlHomeo {
        iota(&d("0"), &d("1/2"), &generator_x(0)).unwrap()
    }

    fn hw(text: &str, table: &SymbolTable) -> HnnWord {
        let opts = ParseOptions {
            arity: Some(1),
            alias: Some("t".into()),
        };
        HnnWord::from_mixed(&parse_word_with(text, &thompson_resolver(table), &opts).unwrap())
            .unwrap()
    }

    #[test]
    fn oracle_examples() {
        let o = oracle_h_lt1();
        assert_eq!(o.contains(&h()), Some(true));
        assert_eq!(o.contains(&generator_x(0)), Some(false));
        assert_eq!(o.contains(&PlHomeo::identity()), Some(true));
        let x0 = generator_x(0);
        let c = oracle_cyclic(&x0).unwrap();
        assert_eq!(c.contains(&x0.pow(3)), Some(true));
        assert_eq!(c.contains(&generator_x(1)), Some(false));
        assert_eq!(c.contains(&PlHomeo::identity()), Some(true));
        assert_eq!(
            oracle_cyclic(&PlHomeo::identity()).unwrap_err(),
            HnnError::IdentityInput
        );
    }

    #[test]
    fn reduce_examples() {
        let mut t = SymbolTable::new();
        t.insert("h", h());
        let o = oracle_h_lt1();
        let r = britton_reduce(&hw("t * h * t^-1", &t), &o).unwrap();
        assert_eq!(r, HnnWord::element(h()));
        let w = hw("t * x0 * t^-1", &t);
        assert_eq!(britton_reduce(&w, &o).unwrap(), w);
        let f = HnnWord::element(generator_x(1));
        assert_eq!(britton_reduce(&f, &o).unwrap(), f);
    }

    #[test]
    fn triviality_examples() {
        let o = oracle_h_lt1();
        let mut t = SymbolTable::new();
        t.insert("h", h());
        assert_eq!(
            is_trivial_in_hnn(&stable_commutator_word(&generator_x(0)), &o).unwrap(),
            Verdict::No
        );
        assert_eq!(
            is_trivial_in_hnn(&hw("t * h * t^-1 * h^-1", &t), &o).unwrap(),
            Verdict::Yes
        );
        assert_eq!(
            is_trivial_in_hnn(&HnnWord::element(generator_x(0)), &o).unwrap(),
            Verdict::No
        );
        // with f in H the commutator collapses
        assert_eq!(is_trivial_in_hnn(&stable_commutator_word(&h()), &o).unwrap(), Verdict::Yes);
    }

    struct Undecided;

    impl MembershipOracle for Undecided {
        fn contains(&self, _: &PlHomeo) -> Option<bool> {
            None
        }
        fn alpha(&self, _: &PlHomeo) -> Option<PlHomeo> {
            None
        }
        fn alpha_inverse(&self, _: &PlHomeo) -> Option<PlHomeo> {
            None
        }
    }

    struct Broken;

    impl MembershipOracle for Broken {
        fn contains(&self, _: &PlHomeo) -> Option<bool> {
            Some(true)
        }
        fn alpha(&self, _: &PlHomeo) -> Option<PlHomeo> {
            None
        }
        fn alpha_inverse(&self, _: &PlHomeo) -> Option<PlHomeo> {
            None
        }
    }

    #[test]
    fn oracle_failures() {
        let w = stable_commutator_word(&generator_x(0));
        assert_eq!(is_trivial_in_hnn(&w, &Undecided).unwrap(), Verdict::Unknown);
        assert!(matches!(
            britton_reduce(&w, &Broken),
            Err(HnnError::OracleInconsistent(_))
        ));
    }

    #[test]
    fn reduction_is_idempotent_and_pinch_free() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let o = oracle_h_lt1();
        for _ in 0..30 {
            let k = rng.gen_range(0..6);
            let w = random_hnn_word(&mut rng, k, 4);
            let r = britton_reduce(&w, &o).unwrap();
            assert!(!r.has_pinch(&o));
            assert_eq!(britton_reduce(&r, &o).unwrap(), r);
            assert_eq!(r.stable_count() % 2, w.stable_count() % 2);
            // the exponent sum of t is invariant
            let sum = |x: &HnnWord| x.signs().iter().map(|&s| s as i64).sum::<i64>();
            assert_eq!(sum(&r), sum(&w));
        }
    }

    #[test]
    fn commuting_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..20 {
            let (g, f0, [_, qr, pt, _]) = commuting_instance(&mut rng);
            assert_eq!(f0.apply(&qr), pt);
            assert!(g.commutator(&g.conjugate(&f0)).is_identity());
        }
    }

    #[test]
    fn mixed_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let w = random_hnn_word(&mut rng, 3, 3);
        let back = HnnWord::from_mixed(&w.to_mixed()).unwrap();
        let o = oracle_h_lt1();
        assert_eq!(
            britton_reduce(&back, &o).unwrap().stable_count(),
            britton_reduce(&w, &o).unwrap().stable_count()
        );
    }
}
