//! The first Grigorchuk group acting on the binary rooted tree.
//!
//! Generators act by `a` = swap at the root, `b = (a, c)`, `c = (a, d)`,
//! `d = (1, b)`, where `(u, v)` lists the sections at the children `0`
//! and `1`. Words act on the left: the rightmost letter acts first.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;
use std::sync::{Mutex, OnceLock, RwLock};

use rand::Rng;
use thiserror::Error;

use crate::group::Group;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GrigError {
    #[error("bad letter `{0}` (expected a, b, c or d)")]
    BadLetter(char),
    #[error("syntax error at byte {0}: {1}")]
    Syntax(usize, String),
    #[error("bad vertex `{0}` (expected a string over 0 and 1)")]
    BadVertex(String),
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("search budget of {0} words exhausted")]
    BudgetExceeded(usize),
}

/// A reduced word: no two equal adjacent letters, and no two adjacent
/// letters from `{b, c, d}`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct GrigWord(Vec<u8>);

fn third(x: u8, y: u8) -> u8 {
    // b, c, d with bc = d, bd = c, cd = b
    b'b' ^ b'c' ^ b'd' ^ x ^ y
}

fn push_letter(stack: &mut Vec<u8>, l: u8) {
    match stack.last().copied() {
        Some(top) if top == l => {
            stack.pop();
        }
        Some(top) if top != b'a' && l != b'a' => {
            stack.pop();
            stack.push(third(top, l));
        }
        _ => stack.push(l),
    }
}

impl GrigWord {
    pub fn empty() -> Self {
        GrigWord(Vec::new())
    }

    /// Reduces an arbitrary letter sequence.
    pub fn reduce(letters: &[u8]) -> Result<Self, GrigError> {
        let mut stack = Vec::with_capacity(letters.len());
        for &l in letters {
            if !matches!(l, b'a'..=b'd') {
                return Err(GrigError::BadLetter(l as char));
            }
            push_letter(&mut stack, l);
        }
        Ok(GrigWord(stack))
    }

    fn from_reduced(letters: Vec<u8>) -> Self {
        GrigWord(letters)
    }

    pub fn letters(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Root permutation: an odd number of `a`s swaps the children.
    pub fn root_swap(&self) -> bool {
        self.0.iter().filter(|&&l| l == b'a').count() % 2 == 1
    }

    /// `(root_swap, section at 0, section at 1)`.
    pub fn sections(&self) -> (bool, GrigWord, GrigWord) {
        // process right to left: (l·acc)|_i = l|_{acc(i)} · acc|_i
        let mut swap = false;
        let mut left: Vec<u8> = Vec::new();
        let mut right: Vec<u8> = Vec::new();
        for &l in self.0.iter().rev() {
            let (s0, s1) = match l {
                b'a' => (None, None),
                b'b' => (Some(b'a'), Some(b'c')),
                b'c' => (Some(b'a'), Some(b'd')),
                _ => (None, Some(b'b')),
            };
            // acc maps child 0 to child `swap as usize`
            let (for_left, for_right) = if swap { (s1, s0) } else { (s0, s1) };
            if let Some(x) = for_left {
                left.push(x);
            }
            if let Some(x) = for_right {
                right.push(x);
            }
            if l == b'a' {
                swap = !swap;
            }
        }
        // letters were collected right to left
        left.reverse();
        right.reverse();
        let reduce = |v: Vec<u8>| GrigWord::reduce(&v).expect("letters are valid");
        (swap, reduce(left), reduce(right))
    }

    pub fn section_at(&self, v: &Vertex) -> GrigWord {
        let mut w = self.clone();
        for &bit in &v.0 {
            let (_, l, r) = w.sections();
            w = if bit { r } else { l };
        }
        w
    }

    /// Image of a vertex.
    pub fn act(&self, v: &Vertex) -> Vertex {
        let mut bits = v.0.clone();
        for &l in self.0.iter().rev() {
            act_letter(l, &mut bits);
        }
        Vertex(bits)
    }

    pub fn portrait(&self, depth: usize) -> Portrait {
        let mut bits = Vec::with_capacity((1usize << depth).saturating_sub(1));
        let mut level = vec![self.clone()];
        let mut memo: HashMap<GrigWord, (bool, GrigWord, GrigWord)> = HashMap::new();
        for d in 0..depth {
            let mut next = Vec::with_capacity(level.len() * 2);
            for w in &level {
                let (s, l, r) = memo.entry(w.clone()).or_insert_with(|| w.sections()).clone();
                bits.push(s);
                if d + 1 < depth {
                    next.push(l);
                    next.push(r);
                }
            }
            level = next;
        }
        Portrait { depth, bits }
    }

    pub fn pow(&self, k: u64) -> GrigWord {
        let mut out = Vec::with_capacity(self.len() * k as usize);
        for _ in 0..k {
            for &l in &self.0 {
                push_letter(&mut out, l);
            }
        }
        GrigWord(out)
    }

    /// Smallest `2^j <= 2^max_exp` with `w^(2^j) = 1`.
    pub fn order(&self, max_exp: u32) -> Option<u64> {
        let mut p = self.clone();
        for j in 0..=max_exp {
            if p.is_identity() {
                return Some(1u64 << j);
            }
            p = p.mul(&p);
        }
        None
    }
}

fn act_letter(l: u8, bits: &mut [bool]) {
    let mut g = l;
    let mut i = 0;
    while i < bits.len() {
        match g {
            b'a' => {
                bits[i] = !bits[i];
                return;
            }
            b'b' => g = if bits[i] { b'c' } else { b'a' },
            b'c' => g = if bits[i] { b'd' } else { b'a' },
            _ => {
                if !bits[i] {
                    return;
                }
                g = b'b';
            }
        }
        i += 1;
    }
}

fn identity_memo() -> &'static RwLock<HashMap<GrigWord, bool>> {
    static MEMO: OnceLock<RwLock<HashMap<GrigWord, bool>>> = OnceLock::new();
    MEMO.get_or_init(|| RwLock::new(HashMap::new()))
}

fn is_identity_rec(w: &GrigWord) -> bool {
    if w.is_empty() {
        return true;
    }
    if w.len() == 1 || w.root_swap() {
        return false;
    }
    if let Some(&v) = identity_memo().read().expect("memo lock").get(w) {
        return v;
    }
    let (_, l, r) = w.sections();
    let v = is_identity_rec(&l) && is_identity_rec(&r);
    if w.len() <= 64 {
        identity_memo().write().expect("memo lock").insert(w.clone(), v);
    }
    v
}

impl Group for GrigWord {
    fn identity() -> Self {
        GrigWord::empty()
    }

    fn mul(&self, rhs: &Self) -> Self {
        let mut out = self.0.clone();
        for &l in &rhs.0 {
            push_letter(&mut out, l);
        }
        GrigWord(out)
    }

    /// Generators are involutions, so the inverse is the reversed word.
    fn inverse(&self) -> Self {
        GrigWord(self.0.iter().rev().copied().collect())
    }

    fn is_identity(&self) -> bool {
        is_identity_rec(self)
    }
}

impl crate::limits::Backend for GrigWord {
    const NAME: &'static str = "grigorchuk";
}

impl fmt::Display for GrigWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        f.write_str(std::str::from_utf8(&self.0).expect("ascii letters"))
    }
}

impl serde::Serialize for GrigWord {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> serde::Deserialize<'de> for GrigWord {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl fmt::Debug for GrigWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Letters, `1`, parentheses and integer powers, e.g. `(ad)^4` or `a b a`.
impl FromStr for GrigWord {
    type Err = GrigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bytes = s.as_bytes();
        let mut pos = 0;
        let w = parse_seq(bytes, &mut pos)?;
        skip_ws(bytes, &mut pos);
        if pos != bytes.len() {
            return Err(GrigError::Syntax(pos, "unexpected input".into()));
        }
        Ok(w)
    }
}

fn skip_ws(b: &[u8], pos: &mut usize) {
    while *pos < b.len() && (b[*pos] as char).is_whitespace() {
        *pos += 1;
    }
}

fn parse_seq(b: &[u8], pos: &mut usize) -> Result<GrigWord, GrigError> {
    let mut acc = GrigWord::empty();
    loop {
        skip_ws(b, pos);
        let Some(&ch) = b.get(*pos) else {
            return Ok(acc);
        };
        let item = match ch {
            b'a'..=b'd' => {
                *pos += 1;
                GrigWord(vec![ch])
            }
            b'1' => {
                *pos += 1;
                GrigWord::empty()
            }
            b'*' => {
                *pos += 1;
                continue;
            }
            b'(' => {
                *pos += 1;
                let inner = parse_seq(b, pos)?;
                skip_ws(b, pos);
                if b.get(*pos) != Some(&b')') {
                    return Err(GrigError::Syntax(*pos, "expected `)`".into()));
                }
                *pos += 1;
                inner
            }
            b')' => return Ok(acc),
            other if other.is_ascii_alphabetic() => return Err(GrigError::BadLetter(other as char)),
            _ => return Err(GrigError::Syntax(*pos, format!("unexpected `{}`", ch as char))),
        };
        skip_ws(b, pos);
        let item = if b.get(*pos) == Some(&b'^') {
            *pos += 1;
            skip_ws(b, pos);
            let neg = b.get(*pos) == Some(&b'-');
            if neg {
                *pos += 1;
            }
            let start = *pos;
            while *pos < b.len() && b[*pos].is_ascii_digit() {
                *pos += 1;
            }
            let k: u64 = std::str::from_utf8(&b[start..*pos])
                .expect("digits")
                .parse()
                .map_err(|_| GrigError::Syntax(start, "expected exponent".into()))?;
            if k > 1 << 20 {
                return Err(GrigError::Syntax(start, "exponent too large".into()));
            }
            let base = if neg { item.inverse() } else { item };
            base.pow(k)
        } else {
            item
        };
        acc = acc.mul(&item);
    }
}

pub fn reduce_word(letters: &str) -> Result<GrigWord, GrigError> {
    GrigWord::reduce(letters.as_bytes())
}

/// `a → aca, b → d, c → b, d → c`.
pub fn sigma_substitute(w: &GrigWord) -> GrigWord {
    let mut out = Vec::with_capacity(w.len() * 3);
    for &l in w.letters() {
        match l {
            b'a' => {
                for x in *b"aca" {
                    push_letter(&mut out, x);
                }
            }
            b'b' => push_letter(&mut out, b'd'),
            b'c' => push_letter(&mut out, b'b'),
            _ => push_letter(&mut out, b'c'),
        }
    }
    GrigWord(out)
}

/// Relators `σ^k((ad)^4)` and `σ^k((adacac)^4)` for `k <= max_k`, plus the
/// involution and `bcd` relators.
pub fn presentation_relators(max_k: u32) -> Vec<(String, GrigWord)> {
    let mut out: Vec<(String, GrigWord)> = ["aa", "bb", "cc", "dd", "bcd"]
        .iter()
        .map(|s| (s.to_string(), GrigWord(s.as_bytes().to_vec())))
        .collect();
    for (name, base) in [("(ad)^4", "adadadad"), ("(adacac)^4", "adacacadacacadacacadacac")] {
        let mut w = reduce_word(base).expect("valid letters");
        for k in 0..=max_k {
            out.push((format!("sigma^{k}({name})"), w.clone()));
            w = sigma_substitute(&w);
        }
    }
    out
}

/// A vertex of the tree: a binary string.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Vertex(pub Vec<bool>);

impl Vertex {
    pub fn root() -> Self {
        Vertex(Vec::new())
    }

    pub fn level(&self) -> usize {
        self.0.len()
    }

    pub fn is_prefix_of(&self, other: &Vertex) -> bool {
        other.0.starts_with(&self.0)
    }

    /// All vertices of a given level, lexicographic with `0 < 1`.
    pub fn level_vertices(level: usize) -> Vec<Vertex> {
        (0..1usize << level)
            .map(|n| Vertex((0..level).map(|i| (n >> (level - 1 - i)) & 1 == 1).collect()))
            .collect()
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\"{self}\"")
    }
}

impl FromStr for Vertex {
    type Err = GrigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(GrigError::BadVertex(s.to_string())),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Vertex)
    }
}

/// Root-swap bits of all vertices above `depth`, level by level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Portrait {
    pub depth: usize,
    pub bits: Vec<bool>,
}

impl Portrait {
    pub fn is_trivial(&self) -> bool {
        self.bits.iter().all(|b| !b)
    }

    /// Swap bit at a vertex of level `< depth`.
    pub fn bit(&self, v: &Vertex) -> bool {
        let base = (1usize << v.level()) - 1;
        let offset = v.0.iter().fold(0usize, |acc, &b| acc * 2 + b as usize);
        self.bits[base + offset]
    }
}

/// Whether `w` lies in the rigid stabilizer of `v` and is nontrivial:
/// it fixes level `|v|`, has trivial sections at the other vertices of
/// that level and a nontrivial section at `v`.
pub fn in_rist(w: &GrigWord, v: &Vertex) -> bool {
    let mut level = vec![(Vertex::root(), w.clone())];
    for _ in 0..v.level() {
        let mut next = Vec::with_capacity(level.len() * 2);
        for (u, s) in level {
            let (swap, l, r) = s.sections();
            if swap {
                return false;
            }
            let mut ul = u.0.clone();
            ul.push(false);
            let mut ur = u.0;
            ur.push(true);
            next.push((Vertex(ul), l));
            next.push((Vertex(ur), r));
        }
        level = next;
    }
    level.iter().all(|(u, s)| {
        if u == v {
            !s.is_identity()
        } else {
            s.is_identity()
        }
    })
}

/// Independent check by the action on strings: `w` fixes every string of
/// length `<= depth` not below `v`, and moves some string below `v`.
pub fn verify_rist_by_action(w: &GrigWord, v: &Vertex, depth: usize) -> bool {
    let mut moved_inside = false;
    for len in 0..=depth {
        for u in Vertex::level_vertices(len) {
            let image = w.act(&u);
            let inside = v.is_prefix_of(&u);
            if !inside && image != u {
                return false;
            }
            if inside && image != u {
                moved_inside = true;
            }
        }
    }
    moved_inside
}

fn rist_cache() -> &'static Mutex<HashMap<Vertex, GrigWord>> {
    static CACHE: OnceLock<Mutex<HashMap<Vertex, GrigWord>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Reduced words in length-lexicographic order (`a < b < c < d`).
pub struct ReducedWords {
    queue: VecDeque<GrigWord>,
}

impl Default for ReducedWords {
    fn default() -> Self {
        ReducedWords {
            queue: VecDeque::from([GrigWord::empty()]),
        }
    }
}

impl Iterator for ReducedWords {
    type Item = GrigWord;

    fn next(&mut self) -> Option<GrigWord> {
        let w = self.queue.pop_front()?;
        let last = w.0.last().copied();
        for l in *b"abcd" {
            let ok = match last {
                None => true,
                Some(b'a') => l != b'a',
                Some(_) => l == b'a',
            };
            if ok {
                let mut v = w.0.clone();
                v.push(l);
                self.queue.push_back(GrigWord::from_reduced(v));
            }
        }
        Some(w)
    }
}

/// Shortest (then lexicographically first) nontrivial element of the
/// rigid stabilizer of `v`, verified exactly and by its action down to
/// `|v| + 4`. Results are cached.
pub fn rist_element(v: &Vertex, budget: usize) -> Result<GrigWord, GrigError> {
    if v.level() == 0 {
        return Err(GrigError::PreconditionFailed(
            "the root vertex has no proper rigid stabilizer".into(),
        ));
    }
    if let Some(w) = rist_cache().lock().expect("cache lock").get(v) {
        return Ok(w.clone());
    }
    for (i, w) in ReducedWords::default().enumerate().skip(1) {
        if i > budget {
            return Err(GrigError::BudgetExceeded(budget));
        }
        if in_rist(&w, v) && verify_rist_by_action(&w, v, v.level() + 4) {
            rist_cache()
                .lock()
                .expect("cache lock")
                .insert(v.clone(), w.clone());
            return Ok(w);
        }
    }
    unreachable!("the word enumeration is infinite")
}

/// A uniformly chosen reduced word of length `len`.
pub fn random_word<R: Rng>(rng: &mut R, len: usize) -> GrigWord {
    let mut out = Vec::with_capacity(len);
    let mut a_next = rng.gen_bool(0.5);
    for _ in 0..len {
        if a_next {
            out.push(b'a');
        } else {
            out.push(b"bcd"[rng.gen_range(0..3)]);
        }
        a_next = !a_next;
    }
    GrigWord(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MixedCheck {
    Holds { samples: usize },
    Counterexample(GrigWord),
}

/// `[[y h1 y⁻¹, h2], [y h1 y⁻¹, h3]]`.
pub fn branch_word_value(y: &GrigWord, h: [&GrigWord; 3]) -> GrigWord {
    let c = y.mul(h[0]).mul(&y.inverse());
    c.commutator(h[1]).commutator(&c.commutator(h[2]))
}

/// Samples `y` and checks the mixed identity built from three
/// rigid-stabilizer elements at distinct vertices of one level. With
/// `depth_check`, the portrait of each value is also required to be trivial.
pub fn branch_mixed_identity_check<R: Rng>(
    pairs: &[(Vertex, GrigWord); 3],
    samples: usize,
    max_len: usize,
    depth_check: Option<usize>,
    rng: &mut R,
) -> Result<MixedCheck, GrigError> {
    let level = pairs[0].0.level();
    for (i, (v, h)) in pairs.iter().enumerate() {
        if v.level() != level || level == 0 {
            return Err(GrigError::PreconditionFailed(
                "vertices must be non-root and on the same level".into(),
            ));
        }
        if pairs[..i].iter().any(|(u, _)| u == v) {
            return Err(GrigError::PreconditionFailed(format!("vertex {v} repeated")));
        }
        if !in_rist(h, v) {
            return Err(GrigError::PreconditionFailed(format!(
                "{h} is not a nontrivial element of the rigid stabilizer of {v}"
            )));
        }
    }
    let hs = [&pairs[0].1, &pairs[1].1, &pairs[2].1];
    for i in 0..samples {
        let y = if i == 0 {
            GrigWord::empty()
        } else {
            let len = rng.gen_range(0..=max_len);
            random_word(rng, len)
        };
        let value = branch_word_value(&y, hs);
        let trivial = value.is_identity()
            && depth_check.is_none_or(|d| value.portrait(d).is_trivial());
        if !trivial {
            return Ok(MixedCheck::Counterexample(y));
        }
    }
    Ok(MixedCheck::Holds { samples })
}
