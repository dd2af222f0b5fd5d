//! The negative half `U_q^-` as weight-graded combinations of words in the `f_i`.
//!
//! Words are never rewritten. Two elements are equal when their difference pairs to zero
//! with every word of the same weight; coordinates are taken against a fixed set of basis
//! words chosen per weight space.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use serde_json::{json, Value};

use crate::cache::OnceMap;
use crate::engine::Engine;
use crate::error::{Error, Result};
use crate::linalg::{self, modp, Matrix};
use crate::rootdata::{RootDatum, RootVector};
use crate::scalars::{LaurentPoly, Scalar};

/// A word `f_{i_1} ... f_{i_k}`, letters 0-based.
pub type Word = Vec<u8>;

/// Finite linear combination of words.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct NCElement {
    terms: BTreeMap<Word, Scalar>,
}

impl NCElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::word(Vec::new())
    }

    pub fn generator(i: usize) -> Self {
        Self::word(vec![i as u8])
    }

    pub fn word(w: Word) -> Self {
        Self::monomial(w, Scalar::one())
    }

    pub fn monomial(w: Word, c: Scalar) -> Self {
        let mut x = Self::zero();
        x.add_term(w, c);
        x
    }

    pub fn from_terms<I: IntoIterator<Item = (Word, Scalar)>>(terms: I) -> Self {
        let mut x = Self::zero();
        for (w, c) in terms {
            x.add_term(w, c);
        }
        x
    }

    pub fn scalar(c: Scalar) -> Self {
        Self::monomial(Vec::new(), c)
    }

    pub fn add_term(&mut self, w: Word, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&w) {
            Some(old) => {
                let s = &*old + &c;
                if s.is_zero() {
                    self.terms.remove(&w);
                } else {
                    *old = s;
                }
            }
            None => {
                self.terms.insert(w, c);
            }
        }
    }

    /// True when no words are stored. Semantic zero is [`Engine::is_zero`].
    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &Scalar)> {
        self.terms.iter()
    }

    pub fn coeff(&self, w: &[u8]) -> Scalar {
        self.terms.get(w).cloned().unwrap_or_default()
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        NCElement { terms: self.terms.iter().map(|(w, x)| (w.clone(), x * c)).collect() }
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut r = Self::one();
        for _ in 0..n {
            r = &r * self;
        }
        r
    }

    /// Anti-involution reversing every word.
    pub fn star(&self) -> Self {
        Self::from_terms(self.terms.iter().map(|(w, c)| (w.iter().rev().copied().collect(), c.clone())))
    }

    /// Bar involution: words are fixed, coefficients conjugated.
    pub fn bar(&self) -> Self {
        NCElement { terms: self.terms.iter().map(|(w, c)| (w.clone(), c.bar())).collect() }
    }

    /// Splits into homogeneous components keyed by root content (the negated weight).
    pub fn components(&self, rank: usize) -> BTreeMap<RootVector, NCElement> {
        let mut out: BTreeMap<RootVector, NCElement> = BTreeMap::new();
        for (w, c) in &self.terms {
            out.entry(word_content(w, rank)).or_default().terms.insert(w.clone(), c.clone());
        }
        out
    }

    /// Root content of a homogeneous element; `None` if empty or mixed.
    pub fn homogeneous_content(&self, rank: usize) -> Option<RootVector> {
        let mut it = self.terms.keys().map(|w| word_content(w, rank));
        let first = it.next()?;
        it.all(|c| c == first).then_some(first)
    }

    /// JSON form of a homogeneous element; letters are 1-based.
    pub fn to_json(&self, rank: usize) -> Value {
        let content = self.homogeneous_content(rank).unwrap_or_else(|| vec![0; rank]);
        json!({
            "weight": content.iter().map(|x| -x).collect::<Vec<_>>(),
            "terms": self.terms.iter().map(|(w, c)| json!({
                "word": w.iter().map(|&l| l as usize + 1).collect::<Vec<_>>(),
                "coeff": c.to_string(),
            })).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value, rank: usize) -> Result<Self> {
        let bad = |m: &str| Error::Parse(format!("element json: {m}"));
        let terms = v.get("terms").and_then(Value::as_array).ok_or_else(|| bad("missing terms"))?;
        let mut x = Self::zero();
        for t in terms {
            let word = t
                .get("word")
                .and_then(Value::as_array)
                .ok_or_else(|| bad("missing word"))?
                .iter()
                .map(|l| match l.as_u64() {
                    Some(k) if k >= 1 && (k as usize) <= rank => Ok((k - 1) as u8),
                    _ => Err(bad("letter out of range")),
                })
                .collect::<Result<Word>>()?;
            let coeff = Scalar::parse(t.get("coeff").and_then(Value::as_str).ok_or_else(|| bad("missing coeff"))?)?;
            x.add_term(word, coeff);
        }
        Ok(x)
    }
}

impl fmt::Display for NCElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (w, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            let word: String = if w.is_empty() {
                "1".into()
            } else {
                w.iter().map(|l| format!("f{}", l + 1)).collect::<Vec<_>>().join("*")
            };
            if c.is_one() {
                write!(f, "{word}")?;
            } else {
                write!(f, "({c})*{word}")?;
            }
        }
        Ok(())
    }
}

impl Add for &NCElement {
    type Output = NCElement;
    fn add(self, o: &NCElement) -> NCElement {
        let mut r = self.clone();
        for (w, c) in &o.terms {
            r.add_term(w.clone(), c.clone());
        }
        r
    }
}

impl Sub for &NCElement {
    type Output = NCElement;
    fn sub(self, o: &NCElement) -> NCElement {
        let mut r = self.clone();
        for (w, c) in &o.terms {
            r.add_term(w.clone(), -c);
        }
        r
    }
}

impl Neg for &NCElement {
    type Output = NCElement;
    fn neg(self) -> NCElement {
        NCElement { terms: self.terms.iter().map(|(w, c)| (w.clone(), -c)).collect() }
    }
}

impl Mul for &NCElement {
    type Output = NCElement;
    fn mul(self, o: &NCElement) -> NCElement {
        let mut r = NCElement::zero();
        for (a, x) in &self.terms {
            for (b, y) in &o.terms {
                let mut w = a.clone();
                w.extend_from_slice(b);
                r.add_term(w, x * y);
            }
        }
        r
    }
}

impl Add for NCElement {
    type Output = NCElement;
    fn add(self, o: NCElement) -> NCElement {
        &self + &o
    }
}

impl Sub for NCElement {
    type Output = NCElement;
    fn sub(self, o: NCElement) -> NCElement {
        &self - &o
    }
}

impl Mul for NCElement {
    type Output = NCElement;
    fn mul(self, o: NCElement) -> NCElement {
        &self * &o
    }
}

impl Neg for NCElement {
    type Output = NCElement;
    fn neg(self) -> NCElement {
        -&self
    }
}

pub fn word_content(w: &[u8], rank: usize) -> RootVector {
    let mut c = vec![0; rank];
    for &l in w {
        c[l as usize] += 1;
    }
    c
}

pub fn height(beta: &[i64]) -> usize {
    beta.iter().sum::<i64>().max(0) as usize
}

/// Number of words of content `beta`, saturating.
pub fn word_count(beta: &[i64]) -> usize {
    let mut total: u128 = 1;
    let mut n: u128 = 0;
    for &b in beta {
        for k in 1..=b.max(0) as u128 {
            n += 1;
            total = total * n / k;
            if total > usize::MAX as u128 {
                return usize::MAX;
            }
        }
    }
    total as usize
}

/// All words of a given content, in lexicographic order.
pub fn words_of_content(beta: &[i64]) -> Vec<Word> {
    fn rec(rem: &mut Vec<i64>, cur: &mut Word, out: &mut Vec<Word>, left: usize) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for i in 0..rem.len() {
            if rem[i] > 0 {
                rem[i] -= 1;
                cur.push(i as u8);
                rec(rem, cur, out, left - 1);
                cur.pop();
                rem[i] += 1;
            }
        }
    }
    let mut out = Vec::new();
    if beta.iter().any(|&b| b < 0) {
        return out;
    }
    rec(&mut beta.to_vec(), &mut Vec::new(), &mut out, height(beta));
    out
}

// ---------------------------------------------------------------------------
// Pairing recursions over subsets of positions.

/// Multiplier contributed by one step of a recursion.
#[derive(Clone, Copy)]
pub(crate) enum Factor {
    /// `q^e`
    QPow(i64),
    /// balanced `[n]_{q^d}`
    QInt(i64, i64),
}

pub(crate) trait DpValue: Clone {
    fn zero() -> Self;
    fn one() -> Self;
    fn add_assign(&mut self, o: &Self);
    fn times(&self, f: Factor) -> Self;
}

/// Laurent polynomial in `q` with machine integer coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct IntPoly {
    low: i64,
    c: Vec<i64>,
}

impl IntPoly {
    pub fn to_laurent(&self) -> LaurentPoly {
        LaurentPoly::from_terms(
            self.c.iter().enumerate().filter(|(_, &x)| x != 0).map(|(k, &x)| (2 * (self.low + k as i64), BigInt::from(x))),
        )
    }

    pub fn to_scalar(&self) -> Scalar {
        Scalar::from_poly(self.to_laurent())
    }

    fn shifted(&self, e: i64) -> Self {
        IntPoly { low: self.low + e, c: self.c.clone() }
    }

    fn mul(&self, o: &IntPoly) -> Self {
        if self.c.is_empty() || o.c.is_empty() {
            return Self::zero();
        }
        let mut c = vec![0i64; self.c.len() + o.c.len() - 1];
        for (i, &x) in self.c.iter().enumerate() {
            if x != 0 {
                for (j, &y) in o.c.iter().enumerate() {
                    c[i + j] += x * y;
                }
            }
        }
        IntPoly { low: self.low + o.low, c }
    }

    fn q_integer(n: i64, d: i64) -> Self {
        if n == 0 {
            return Self::zero();
        }
        let (m, sign) = if n > 0 { (n, 1) } else { (-n, -1) };
        // q^{d(m-1)} + q^{d(m-3)} + ... + q^{-d(m-1)}
        let low = -d * (m - 1);
        let mut c = vec![0i64; (2 * d * (m - 1) + 1) as usize];
        for k in 0..m {
            c[(2 * d * k) as usize] = sign;
        }
        IntPoly { low, c }
    }
}

impl DpValue for IntPoly {
    fn zero() -> Self {
        IntPoly { low: 0, c: Vec::new() }
    }

    fn one() -> Self {
        IntPoly { low: 0, c: vec![1] }
    }

    fn add_assign(&mut self, o: &Self) {
        if o.c.is_empty() {
            return;
        }
        if self.c.is_empty() {
            *self = o.clone();
            return;
        }
        let low = self.low.min(o.low);
        let high = (self.low + self.c.len() as i64).max(o.low + o.c.len() as i64);
        let mut c = vec![0i64; (high - low) as usize];
        for (k, &x) in self.c.iter().enumerate() {
            c[(self.low - low) as usize + k] += x;
        }
        for (k, &x) in o.c.iter().enumerate() {
            c[(o.low - low) as usize + k] += x;
        }
        *self = IntPoly { low, c };
    }

    fn times(&self, f: Factor) -> Self {
        match f {
            Factor::QPow(e) => self.shifted(e),
            Factor::QInt(n, d) => self.mul(&IntPoly::q_integer(n, d)),
        }
    }
}

/// Value at the fixed evaluation point modulo the working prime.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct ModVal(pub u64);

fn q0_pow(e: i64) -> u64 {
    const SPAN: i64 = 256;
    static TABLE: OnceLock<Vec<u64>> = OnceLock::new();
    if e.abs() > SPAN {
        return modp::q_pow(e);
    }
    let t = TABLE.get_or_init(|| (-SPAN..=SPAN).map(modp::q_pow).collect());
    t[(e + SPAN) as usize]
}

impl DpValue for ModVal {
    fn zero() -> Self {
        ModVal(0)
    }

    fn one() -> Self {
        ModVal(1)
    }

    fn add_assign(&mut self, o: &Self) {
        self.0 = modp::add(self.0, o.0);
    }

    fn times(&self, f: Factor) -> Self {
        match f {
            Factor::QPow(e) => ModVal(modp::mul(self.0, q0_pow(e))),
            Factor::QInt(n, d) => {
                if n == 0 {
                    return ModVal(0);
                }
                let m = n.abs();
                let mut s = 0;
                for k in 0..m {
                    s = modp::add(s, q0_pow(d * (m - 1 - 2 * k)));
                }
                if n < 0 {
                    s = modp::sub(0, s);
                }
                ModVal(modp::mul(self.0, s))
            }
        }
    }
}

/// Runs the subset recursion: letters of `a` are consumed from the left, each matched
/// against a remaining position `p` of `b`, with multiplier `factor(remaining, p)`.
pub(crate) fn subset_recursion<T: DpValue>(a: &[u8], b: &[u8], factor: &dyn Fn(u32, usize) -> Factor) -> T {
    let n = a.len();
    if b.len() != n {
        return T::zero();
    }
    assert!(n <= 24, "word too long for the subset recursion");
    let mut memo: Vec<Option<T>> = vec![None; 1 << n];
    fn rec<T: DpValue>(
        mask: u32,
        a: &[u8],
        b: &[u8],
        factor: &dyn Fn(u32, usize) -> Factor,
        memo: &mut Vec<Option<T>>,
    ) -> T {
        if mask == 0 {
            return T::one();
        }
        if let Some(v) = &memo[mask as usize] {
            return v.clone();
        }
        let letter = a[a.len() - mask.count_ones() as usize];
        let mut acc = T::zero();
        for p in 0..b.len() {
            if mask & (1 << p) != 0 && b[p] == letter {
                let sub = rec(mask & !(1 << p), a, b, factor, memo);
                acc.add_assign(&sub.times(factor(mask, p)));
            }
        }
        memo[mask as usize] = Some(acc.clone());
        acc
    }
    rec((1u32 << n) - 1, a, b, factor, &mut memo)
}

/// All values `subset_recursion(a, b, factor)` for `a` running over the rearrangements of `b`.
///
/// Words `a` are grown from the right, so each suffix is shared by every word ending in it.
pub(crate) fn subset_column<T: DpValue>(b: &[u8], rank: usize, factor: &dyn Fn(u32, usize) -> Factor) -> HashMap<Word, T> {
    let n = b.len();
    assert!(n <= 24, "word too long for the subset recursion");
    let mut rem = vec![0i64; rank];
    for &l in b {
        rem[l as usize] += 1;
    }
    struct Level<T> {
        entries: Vec<(u32, T)>,
    }
    fn grow<T: DpValue>(
        b: &[u8],
        rem: &mut Vec<i64>,
        suffix: &mut Vec<u8>,
        level: &Level<T>,
        slot: &mut Vec<u32>,
        factor: &dyn Fn(u32, usize) -> Factor,
        out: &mut HashMap<Word, T>,
    ) {
        if suffix.len() == b.len() {
            let full = (1u32 << b.len()) - 1;
            let v = level.entries.iter().find(|(m, _)| *m == full).map_or_else(T::zero, |(_, v)| v.clone());
            let mut w = suffix.clone();
            w.reverse();
            out.insert(w, v);
            return;
        }
        for l in 0..rem.len() {
            if rem[l] == 0 {
                continue;
            }
            // `slot[mask]` is one more than the index of `mask` in `next`, or 0
            let mut next: Vec<(u32, T)> = Vec::new();
            for (mask, v) in &level.entries {
                for p in 0..b.len() {
                    if b[p] as usize == l && mask & (1 << p) == 0 {
                        let m = mask | (1 << p);
                        let term = v.times(factor(m, p));
                        match slot[m as usize] {
                            0 => {
                                next.push((m, term));
                                slot[m as usize] = next.len() as u32;
                            }
                            k => next[k as usize - 1].1.add_assign(&term),
                        }
                    }
                }
            }
            for (m, _) in &next {
                slot[*m as usize] = 0;
            }
            rem[l] -= 1;
            suffix.push(l as u8);
            grow(b, rem, suffix, &Level { entries: next }, slot, factor, out);
            suffix.pop();
            rem[l] += 1;
        }
    }
    let mut out = HashMap::new();
    let mut slot = vec![0u32; 1 << n];
    let start = Level { entries: vec![(0u32, T::one())] };
    grow(b, &mut rem, &mut Vec::new(), &start, &mut slot, factor, &mut out);
    out
}

/// Bit masks of the positions holding each letter.
pub(crate) fn letter_masks(b: &[u8], rank: usize) -> Vec<u32> {
    let mut m = vec![0u32; rank];
    for (p, &l) in b.iter().enumerate() {
        m[l as usize] |= 1 << p;
    }
    m
}

/// Numerator `P(a,b)` of the pairing of two words; `(a,b)_L = P(a,b) / prod (1-q_i^2)`.
pub(crate) fn word_pairing_numerator<T: DpValue>(rd: &RootDatum, a: &[u8], b: &[u8]) -> T {
    let letter_masks = letter_masks(b, rd.rank());
    let factor = |mask: u32, p: usize| {
        let i = b[p] as usize;
        let below = mask & ((1u32 << p) - 1);
        let e: i64 = letter_masks
            .iter()
            .enumerate()
            .map(|(j, &m)| -rd.form_simple(i, j) * (below & m).count_ones() as i64)
            .sum();
        Factor::QPow(e)
    };
    subset_recursion(a, b, &factor)
}

/// Pairing numerators `P(a, b)` for every word `a` with the content of `b`.
pub(crate) fn word_pairing_column<T: DpValue>(rd: &RootDatum, b: &[u8]) -> HashMap<Word, T> {
    let letter_masks = letter_masks(b, rd.rank());
    let factor = |mask: u32, p: usize| {
        let i = b[p] as usize;
        let below = mask & ((1u32 << p) - 1);
        let e: i64 = letter_masks
            .iter()
            .enumerate()
            .map(|(j, &m)| -rd.form_simple(i, j) * (below & m).count_ones() as i64)
            .sum();
        Factor::QPow(e)
    };
    subset_column(b, rd.rank(), &factor)
}

/// `prod_i (1 - q_i^2)^{beta_i}`, the denominator of pairings in content `beta`.
pub fn pairing_denominator(rd: &RootDatum, beta: &[i64]) -> Scalar {
    let mut s = Scalar::one();
    for (i, &b) in beta.iter().enumerate() {
        let f = Scalar::one_minus_q(2 * rd.sym(i));
        for _ in 0..b {
            s = &s * &f;
        }
    }
    s
}

// ---------------------------------------------------------------------------
// Weight spaces.

/// A weight space of `U_q^-` with its chosen basis words and Gram data.
///
/// Elements are identified through their pairing vectors `(P(b, x))_b` against the basis
/// words `b`, which determine them modulo the radical.
pub struct WeightSpace {
    pub content: RootVector,
    pub basis: Vec<Word>,
    raw: Vec<Vec<LaurentPoly>>,
    /// `raw^{-1} = adj / det`
    adj: Vec<Vec<LaurentPoly>>,
    det: LaurentPoly,
    denominator: Scalar,
    pairings: OnceMap<Word, Arc<Vec<LaurentPoly>>>,
    /// `P(w, b)` for every word `w`, one map per basis word `b`.
    columns: OnceLock<Vec<HashMap<Word, LaurentPoly>>>,
}

/// Weight spaces with at most this many words tabulate all word pairings at once.
const COLUMN_WORD_LIMIT: usize = 3000;

impl WeightSpace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Gram matrix `(b_i, b_j)_L` of the basis words.
    pub fn gram(&self) -> Matrix {
        let inv = self.denominator.inv().expect("nonzero");
        self.raw.iter().map(|row| row.iter().map(|x| &Scalar::from_poly(x.clone()) * &inv).collect()).collect()
    }

    /// Coordinates from a pairing vector.
    fn solve_coords(&self, r: &[Scalar]) -> Vec<Scalar> {
        let det_inv = Scalar::from_poly(self.det.clone()).inv().expect("nonzero determinant");
        self.adj_apply(r).iter().map(|x| x * &det_inv).collect()
    }

    /// `adj * r`, accumulating over a common denominator of `r`.
    fn adj_apply(&self, r: &[Scalar]) -> Vec<Scalar> {
        let mut common = LaurentPoly::one();
        for x in r {
            let d = x.denominator();
            if !d.is_one() {
                let g = common.gcd(d);
                common = &common * &d.div_exact(&g).expect("gcd divides");
            }
        }
        let scale = Scalar::from_poly(common.clone());
        let nums: Vec<LaurentPoly> =
            r.iter().map(|x| (x * &scale).as_laurent().cloned().expect("common denominator")).collect();
        let cinv = scale.inv().expect("nonzero");
        self.adj
            .iter()
            .map(|row| {
                let mut acc = LaurentPoly::zero();
                for (a, x) in row.iter().zip(&nums) {
                    if !a.is_zero() && !x.is_zero() {
                        acc = &acc + &(a * x);
                    }
                }
                &Scalar::from_poly(acc) * &cinv
            })
            .collect()
    }

    /// True when every stored word is a basis word of this space.
    fn is_reduced(&self, x: &NCElement) -> bool {
        x.terms().all(|(w, _)| self.basis.contains(w))
    }

    /// Coefficients of a reduced element on the basis words.
    fn reduced_coeffs(&self, x: &NCElement) -> Vec<Scalar> {
        self.basis.iter().map(|b| x.coeff(b)).collect()
    }
}

/// Inverse of a Laurent-polynomial matrix as `(adj, d)` with `m^{-1} = adj / d`.
pub(crate) fn polynomial_inverse(m: &[Vec<LaurentPoly>]) -> Result<(Vec<Vec<LaurentPoly>>, LaurentPoly)> {
    let inv = linalg::invert(&m.iter().map(|r| r.iter().cloned().map(Scalar::from_poly).collect()).collect())?;
    let mut common = LaurentPoly::one();
    for x in inv.iter().flatten() {
        let d = x.denominator();
        if d.is_one() {
            continue;
        }
        let g = common.gcd(d);
        common = &common * &d.div_exact(&g).expect("gcd divides");
    }
    let scale = Scalar::from_poly(common.clone());
    let adj = inv
        .iter()
        .map(|r| {
            r.iter()
                .map(|x| (x * &scale).as_laurent().cloned().ok_or_else(|| Error::Internal("common denominator".into())))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((adj, common))
}

/// Greedy choice of independent words for a bilinear form, by rank modulo a prime.
///
/// Candidates are tried in order; a candidate is kept if its row of values against the
/// probe words is independent of the rows kept so far.
pub(crate) fn select_independent(
    words: &[Word],
    dim: usize,
    column: &dyn Fn(&[u8]) -> HashMap<Word, ModVal>,
) -> Result<Vec<Word>> {
    if dim == 0 {
        return Ok(Vec::new());
    }
    let probes_wanted = 2 * dim + 16;
    let attempt = |probes: &[&Word]| {
        let columns: Vec<HashMap<Word, ModVal>> = probes.iter().map(|p| column(p)).collect();
        let mut ech = modp::Echelon::default();
        let mut chosen = Vec::new();
        for w in words {
            let row: Vec<u64> = columns.iter().map(|c| c.get(w).map_or(0, |v| v.0)).collect();
            if ech.try_add(row) {
                chosen.push(w.clone());
                if chosen.len() == dim {
                    break;
                }
            }
        }
        chosen
    };
    if words.len() > probes_wanted {
        let stride = words.len().div_ceil(probes_wanted);
        let probes: Vec<&Word> = words.iter().step_by(stride).collect();
        let chosen = attempt(&probes);
        if chosen.len() == dim {
            return Ok(chosen);
        }
    }
    let probes: Vec<&Word> = words.iter().collect();
    let chosen = attempt(&probes);
    if chosen.len() != dim {
        return Err(Error::Internal(format!("found {} independent words, expected {dim}", chosen.len())));
    }
    Ok(chosen)
}

#[derive(Default)]
pub(crate) struct UqCache {
    spaces: OnceMap<RootVector, Result<Arc<WeightSpace>>>,
}

/// Which side a q-derivation acts from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// The involutions of `U_q^-`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Involution {
    Star,
    Bar,
    Sigma,
    SigmaPrime,
}

impl Engine {
    pub fn check_height(&self, beta: &[i64]) -> Result<()> {
        let h = height(beta);
        if h > self.height_cap() {
            return Err(Error::HeightCap { height: h, cap: self.height_cap() });
        }
        Ok(())
    }

    pub fn content(&self, w: &[u8]) -> RootVector {
        word_content(w, self.rank())
    }

    /// The weight space of content `beta` (weight `-beta`), built once.
    pub fn weight_space(&self, beta: &[i64]) -> Result<Arc<WeightSpace>> {
        self.check_height(beta)?;
        if beta.len() != self.rank() || beta.iter().any(|&b| b < 0) {
            return Err(Error::InvalidArgument(format!("{beta:?} is not in the positive root cone")));
        }
        let key = beta.to_vec();
        self.uq.spaces.get_or_init(&key, || self.build_weight_space(beta).map(Arc::new))
    }

    fn build_weight_space(&self, beta: &[i64]) -> Result<WeightSpace> {
        let rd = self.root_datum();
        let words = words_of_content(beta);
        let dim = rd.kostant_partition(beta) as usize;
        let basis = select_independent(&words, dim, &|p| word_pairing_column::<ModVal>(rd, p))?;
        let raw: Vec<Vec<LaurentPoly>> = basis
            .iter()
            .map(|a| basis.iter().map(|b| word_pairing_numerator::<IntPoly>(rd, a, b).to_laurent()).collect())
            .collect();
        let (adj, det) = polynomial_inverse(&raw)?;
        Ok(WeightSpace {
            content: beta.to_vec(),
            basis,
            raw,
            adj,
            det,
            denominator: pairing_denominator(rd, beta),
            pairings: OnceMap::default(),
            columns: OnceLock::new(),
        })
    }

    /// Exact Lusztig pairing of two words.
    pub fn pair_words(&self, a: &[u8], b: &[u8]) -> Result<Scalar> {
        let beta = self.content(a);
        if beta != self.content(b) {
            return Ok(Scalar::zero());
        }
        let p = word_pairing_numerator::<IntPoly>(self.root_datum(), a, b).to_scalar();
        if p.is_zero() {
            return Ok(p);
        }
        p.div_ref(&pairing_denominator(self.root_datum(), &beta))
    }

    /// Pairing numerators `P(b, w)` of a word against the basis words of its weight space.
    pub fn word_pairings(&self, w: &[u8]) -> Result<Arc<Vec<LaurentPoly>>> {
        let space = self.weight_space(&self.content(w))?;
        let rd = self.root_datum();
        Ok(space.pairings.get_or_init(&w.to_vec(), || {
            if word_count(&space.content) <= COLUMN_WORD_LIMIT {
                // the pairing is symmetric, so P(b, w) = P(w, b)
                let columns = space.columns.get_or_init(|| {
                    space
                        .basis
                        .iter()
                        .map(|b| {
                            word_pairing_column::<IntPoly>(rd, b).into_iter().map(|(a, v)| (a, v.to_laurent())).collect()
                        })
                        .collect()
                });
                return Arc::new(columns.iter().map(|c| c[w].clone()).collect());
            }
            Arc::new(space.basis.iter().map(|b| word_pairing_numerator::<IntPoly>(rd, b, w).to_laurent()).collect())
        }))
    }

    /// Pairing vector of the `beta` component of `x`; zero exactly when that component is.
    pub fn pairing_vector(&self, beta: &[i64], x: &NCElement) -> Result<Vec<Scalar>> {
        let space = self.weight_space(beta)?;
        let n = space.dim();
        // Accumulate numerators per coefficient denominator to avoid repeated gcds.
        let mut groups: Vec<(LaurentPoly, Vec<LaurentPoly>)> = Vec::new();
        for (w, c) in x.terms() {
            if self.content(w) != beta {
                continue;
            }
            let r = self.word_pairings(w)?;
            let k = match groups.iter().position(|(d, _)| d == c.denominator()) {
                Some(k) => k,
                None => {
                    groups.push((c.denominator().clone(), vec![LaurentPoly::zero(); n]));
                    groups.len() - 1
                }
            };
            let acc = &mut groups[k].1;
            for (a, p) in acc.iter_mut().zip(r.iter()) {
                if !p.is_zero() {
                    *a = &*a + &(c.numerator() * p);
                }
            }
        }
        let mut out = vec![Scalar::zero(); n];
        for (d, acc) in groups {
            let dinv = Scalar::from_poly(d).inv()?;
            for (o, a) in out.iter_mut().zip(acc) {
                if !a.is_zero() {
                    *o = &*o + &(&Scalar::from_poly(a) * &dinv);
                }
            }
        }
        Ok(out)
    }

    /// Coordinates of the `beta` component of `x` in the basis of that weight space.
    pub fn weight_basis_coords(&self, beta: &[i64], x: &NCElement) -> Result<Vec<Scalar>> {
        let space = self.weight_space(beta)?;
        let comp = NCElement::from_terms(x.terms().filter(|(w, _)| self.content(w) == beta).map(|(w, c)| (w.clone(), c.clone())));
        if space.is_reduced(&comp) {
            return Ok(space.reduced_coeffs(&comp));
        }
        let r = self.pairing_vector(beta, &comp)?;
        Ok(space.solve_coords(&r))
    }

    /// Coordinates of the element whose pairing vector is `r`.
    pub fn coords_from_pairing_vector(&self, beta: &[i64], r: &[Scalar]) -> Result<Vec<Scalar>> {
        Ok(self.weight_space(beta)?.solve_coords(r))
    }

    /// Element with the given coordinates in the basis of content `beta`.
    pub fn from_coords(&self, beta: &[i64], coords: &[Scalar]) -> Result<NCElement> {
        let space = self.weight_space(beta)?;
        Ok(NCElement::from_terms(space.basis.iter().cloned().zip(coords.iter().cloned())))
    }

    /// Rewrites `x` in terms of basis words only. Equal elements reduce to identical values.
    pub fn reduce(&self, x: &NCElement) -> Result<NCElement> {
        let mut out = NCElement::zero();
        for (beta, comp) in x.components(self.rank()) {
            let c = self.weight_basis_coords(&beta, &comp)?;
            out = &out + &self.from_coords(&beta, &c)?;
        }
        Ok(out)
    }

    pub fn is_zero(&self, x: &NCElement) -> Result<bool> {
        for (beta, comp) in x.components(self.rank()) {
            if self.pairing_vector(&beta, &comp)?.iter().any(|c| !c.is_zero()) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn equal(&self, x: &NCElement, y: &NCElement) -> Result<bool> {
        self.is_zero(&(x - y))
    }

    /// The Lusztig pairing `(x, y)_L`.
    pub fn pair(&self, x: &NCElement, y: &NCElement) -> Result<Scalar> {
        let xs = x.components(self.rank());
        let ys = y.components(self.rank());
        let mut total = Scalar::zero();
        for (beta, xc) in &xs {
            let Some(yc) = ys.get(beta) else { continue };
            let space = self.weight_space(beta)?;
            // With one side on basis words, (x, sum_j c_j b_j) = sum_j c_j P(b_j, x) / denominator.
            let (other, coeffs) = if space.is_reduced(yc) {
                (xc, space.reduced_coeffs(yc))
            } else if space.is_reduced(xc) {
                (yc, space.reduced_coeffs(xc))
            } else {
                let (small, big) = if xc.len() <= yc.len() { (xc, yc) } else { (yc, xc) };
                (big, self.weight_basis_coords(beta, small)?)
            };
            let num = linalg::dot(&self.pairing_vector(beta, other)?, &coeffs);
            if !num.is_zero() {
                total = &total + &num.div_ref(&space.denominator)?;
            }
        }
        Ok(total)
    }

    /// `e'_i` (left) or `_ie'` (right) applied to `x`.
    pub fn q_derivation(&self, i: usize, x: &NCElement, side: Side) -> NCElement {
        let rd = self.root_datum();
        let mut out = NCElement::zero();
        for (w, c) in x.terms() {
            for p in 0..w.len() {
                if w[p] as usize != i {
                    continue;
                }
                let others: Box<dyn Iterator<Item = &u8>> = match side {
                    Side::Left => Box::new(w[..p].iter()),
                    Side::Right => Box::new(w[p + 1..].iter()),
                };
                let e: i64 = others.map(|&l| -rd.form_simple(i, l as usize)).sum();
                let mut rest = w.clone();
                rest.remove(p);
                out.add_term(rest, c * &Scalar::q_pow(e));
            }
        }
        out
    }

    /// Divided power `f_i^{(n)}`.
    pub fn divided_power(&self, i: usize, n: u32) -> NCElement {
        let d = self.root_datum().sym(i);
        let fact = Scalar::q_factorial(n as i64, d);
        NCElement::monomial(vec![i as u8; n as usize], fact.inv().expect("nonzero factorial"))
    }

    /// Exponent of `q` in the twist of `bar . star` defining the dual bar involution.
    pub fn sigma_exponent(&self, beta: &[i64]) -> i64 {
        let rd = self.root_datum();
        rd.form_roots(beta, beta) / 2 + beta.iter().enumerate().map(|(j, b)| b * rd.sym(j)).sum::<i64>()
    }

    pub fn involution(&self, x: &NCElement, kind: Involution) -> NCElement {
        match kind {
            Involution::Star => x.star(),
            Involution::Bar => x.bar(),
            Involution::Sigma | Involution::SigmaPrime => {
                let mut out = NCElement::zero();
                for (beta, comp) in x.components(self.rank()) {
                    let sign = if height(&beta) % 2 == 0 { 1 } else { -1 };
                    let mut f = Scalar::from_int(sign);
                    if kind == Involution::Sigma {
                        f = &f * &Scalar::q_pow(self.sigma_exponent(&beta));
                    }
                    out = &out + &comp.star().bar().scale(&f);
                }
                out
            }
        }
    }

    pub fn sigma(&self, x: &NCElement) -> NCElement {
        self.involution(x, Involution::Sigma)
    }
}
