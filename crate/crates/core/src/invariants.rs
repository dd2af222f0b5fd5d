//! Named property checks for every module, run on small instances.
//!
//! Each check returns a short summary on success and a witness on failure. Checks are
//! deterministic for a given seed.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::canonical::CrystalLabel;
use crate::cells::{CellElement, LocalizedSubgroupElement};
use crate::engine::Engine;
use crate::highest_weight::{ModuleGenerator, ModuleVector};
use crate::pbw::{braid_apply, pbw_norm_closed, BraidDirection, TriangularElement};
use crate::qcluster::CompatiblePair;
use crate::rootdata::{RootDatum, Weight};
use crate::scalars::{LaurentPoly, Scalar};
use crate::uqminus::{words_of_content, Involution, NCElement, Side};

/// Modules with property checks, in dependency order.
pub const MODULES: [&str; 8] = ["scalars", "rootdata", "uqminus", "pbw", "canonical", "highest_weight", "cells", "qcluster"];

type Outcome = std::result::Result<String, String>;
type Check = fn(&mut ChaCha8Rng) -> Outcome;

/// Result of one property check.
#[derive(Clone, Debug)]
pub struct CheckResult {
    pub module: &'static str,
    pub property: &'static str,
    /// Summary on success, witness on failure.
    pub outcome: Outcome,
}

impl CheckResult {
    pub fn passed(&self) -> bool {
        self.outcome.is_ok()
    }
}

macro_rules! ensure {
    ($cond:expr, $($arg:tt)*) => {
        if !$cond {
            return Err(format!($($arg)*));
        }
    };
}

trait Witness<T> {
    fn w(self) -> std::result::Result<T, String>;
}

impl<T> Witness<T> for crate::error::Result<T> {
    fn w(self) -> std::result::Result<T, String> {
        self.map_err(|e| e.to_string())
    }
}

fn engine(ty: &str) -> std::result::Result<Engine, String> {
    Engine::from_type(ty).w()
}

/// The checks of one module, by property name.
pub fn checks(module: &str) -> Option<Vec<(&'static str, Check)>> {
    let list: Vec<(&'static str, Check)> = match module {
        "scalars" => vec![
            ("bar is an involution", scalars_bar),
            ("field arithmetic", scalars_field),
            ("canonical form is unique", scalars_canonical),
        ],
        "rootdata" => vec![
            ("word-independence of the Weyl action", rootdata_words),
            ("length of the longest element", rootdata_longest),
            ("integral weight-root pairing", rootdata_integral),
        ],
        "uqminus" => vec![
            ("pairing is symmetric", uq_symmetric),
            ("pairing is star-invariant", uq_star),
            ("q-derivation recursions", uq_derivations),
            ("sigma is an involution, sigma' an anti-homomorphism", uq_sigma),
            ("Gram rank equals the Kostant count", uq_gram_rank),
        ],
        "pbw" => vec![
            ("braid relations", pbw_braid),
            ("orthogonality", pbw_orthogonal),
            ("closed-form norms", pbw_norms),
            ("word-independence of the span", pbw_span),
        ],
        "canonical" => vec![
            ("reduced-word independence", dcb_word_independence),
            ("sigma-invariance", dcb_sigma),
            ("star permutes the basis", dcb_star),
            ("Demazure membership is word-independent", dcb_demazure),
        ],
        "highest_weight" => vec![
            ("contravariance", hw_contravariance),
            ("extremal vectors have norm one", hw_extremal),
            ("defining identity of matrix coefficients", hw_matrix_coefficient),
            ("Kumar-Peterson labels of minors", hw_kumar_peterson),
            ("Demazure module dimensions", hw_demazure),
        ],
        "cells" => vec![
            ("twist is multiplicative", cells_multiplicative),
            ("twist permutes the localized basis", cells_permutes),
            ("sigma commutes with the twist and reverses products", cells_sigma),
            ("minor times basis element is a basis element", cells_single_term),
            ("commutative at q = 1", cells_classical),
            ("gamma then the embedding equals the twist", cells_pipeline),
        ],
        "qcluster" => vec![
            ("mutation preserves compatibility", qc_compatible),
            ("mutation is an involution", qc_involution),
            ("Laurent containment", qc_laurent),
            ("initial seed is compatible", qc_initial),
        ],
        _ => return None,
    };
    Some(list)
}

/// Runs the checks of one module.
pub fn run_module(module: &'static str, seed: u64) -> Option<Vec<CheckResult>> {
    let list = checks(module)?;
    Some(
        list.into_iter()
            .enumerate()
            .map(|(k, (property, check))| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(1_000_003).wrapping_add(k as u64));
                CheckResult { module, property, outcome: check(&mut rng) }
            })
            .collect(),
    )
}

/// Runs every module's checks.
pub fn run_all(seed: u64) -> Vec<CheckResult> {
    MODULES.iter().flat_map(|m| run_module(m, seed).expect("known module")).collect()
}

// ---------------------------------------------------------------------------
// Samplers.

fn random_poly(rng: &mut ChaCha8Rng) -> LaurentPoly {
    let n = rng.gen_range(1..=4);
    LaurentPoly::from_terms((0..n).map(|_| (rng.gen_range(-6..=6), BigInt::from(rng.gen_range(-5..=5)))))
}

fn random_scalar(rng: &mut ChaCha8Rng) -> Scalar {
    loop {
        let den = random_poly(rng);
        if den.is_zero() {
            continue;
        }
        return Scalar::ratio(random_poly(rng), den).expect("nonzero denominator");
    }
}

fn random_q_coeff(rng: &mut ChaCha8Rng) -> Scalar {
    let c = loop {
        let c = rng.gen_range(-3..=3);
        if c != 0 {
            break c;
        }
    };
    &Scalar::from_int(c) * &Scalar::q_pow(rng.gen_range(-2..=2))
}

/// A random combination of words of content `beta`.
fn random_homogeneous(rng: &mut ChaCha8Rng, beta: &[i64]) -> NCElement {
    let words = words_of_content(beta);
    let mut x = NCElement::zero();
    for _ in 0..rng.gen_range(1..=3) {
        let w = words.choose(rng).expect("nonempty content").clone();
        x = &x + &NCElement::monomial(w, random_q_coeff(rng));
    }
    x
}

fn random_content(rng: &mut ChaCha8Rng, rank: usize, height: i64) -> Vec<i64> {
    loop {
        let beta: Vec<i64> = (0..rank).map(|_| rng.gen_range(0..=height)).collect();
        let h: i64 = beta.iter().sum();
        if h > 0 && h <= height {
            return beta;
        }
    }
}

fn contents_up_to(rank: usize, height: i64) -> Vec<Vec<i64>> {
    let mut out = vec![vec![]];
    for _ in 0..rank {
        out = out.into_iter().flat_map(|v: Vec<i64>| (0..=height).map(move |x| [v.clone(), vec![x]].concat())).collect();
    }
    out.retain(|v| v.iter().sum::<i64>() <= height);
    out.sort();
    out
}

fn labels_up_to(e: &Engine, height: i64) -> std::result::Result<Vec<CrystalLabel>, String> {
    let word = e.reference_word();
    let mut out = Vec::new();
    for beta in contents_up_to(e.rank(), height) {
        if beta.iter().any(|&b| b > 0) {
            out.extend(e.labels_of_weight(&word, &beta).w()?);
        }
    }
    Ok(out)
}

fn sample_localized(e: &Engine, rng: &mut ChaCha8Rng, n: usize, height: i64) -> std::result::Result<Vec<CellElement>, String> {
    let rd = e.root_datum();
    let w0 = rd.longest_element();
    let pool = labels_up_to(e, height)?;
    let lambdas: Vec<Weight> = (0..rd.rank()).map(|i| rd.fundamental_weight(i)).chain([vec![0; rd.rank()]]).collect();
    (0..n)
        .map(|_| {
            let b = pool.choose(rng).expect("nonempty pool");
            let lambda = lambdas.choose(rng).expect("nonempty");
            e.localized_basis_element(&w0, lambda, b).w()
        })
        .collect()
}

fn random_pair(rng: &mut ChaCha8Rng) -> CompatiblePair {
    let n = rng.gen_range(2..=4);
    let mut b = vec![vec![0i64; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let x = rng.gen_range(-2..=2);
            b[i][j] = x;
            b[j][i] = -x;
        }
    }
    let mut exchange = b.clone();
    exchange.extend((0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()));
    let mut lambda = vec![vec![0i64; 2 * n]; 2 * n];
    for i in 0..n {
        lambda[i][n + i] = -1;
        lambda[n + i][i] = 1;
        for j in 0..n {
            lambda[n + i][n + j] = -b[i][j];
        }
    }
    CompatiblePair { lambda, exchange }
}

/// Rank of a matrix over `Q(q^{1/2})` by exact elimination.
fn exact_rank(mut m: Vec<Vec<Scalar>>) -> usize {
    let mut rank = 0;
    let cols = m.first().map_or(0, Vec::len);
    for c in 0..cols {
        let Some(p) = (rank..m.len()).find(|&r| !m[r][c].is_zero()) else { continue };
        m.swap(rank, p);
        let inv = m[rank][c].inv().expect("nonzero pivot");
        let pivot = m[rank].clone();
        for row in m.iter_mut().skip(rank + 1) {
            if row[c].is_zero() {
                continue;
            }
            let f = &row[c] * &inv;
            for (x, y) in row.iter_mut().zip(&pivot) {
                *x = &*x - &(&f * y);
            }
        }
        rank += 1;
    }
    rank
}

// ---------------------------------------------------------------------------
// scalars

fn scalars_bar(rng: &mut ChaCha8Rng) -> Outcome {
    for _ in 0..50 {
        let a = random_scalar(rng);
        ensure!(a.bar().bar() == a, "bar(bar({a})) = {}", a.bar().bar());
    }
    Ok("50 samples".into())
}

fn scalars_field(rng: &mut ChaCha8Rng) -> Outcome {
    for _ in 0..50 {
        let a = random_scalar(rng);
        let b = random_scalar(rng);
        if b.is_zero() {
            continue;
        }
        let back = (&a * &b).div_ref(&b).w()?;
        ensure!(back == a, "({a})({b})/({b}) = {back}");
        ensure!(&(&a + &b) - &b == a, "({a}) + ({b}) - ({b}) != ({a})");
    }
    Ok("50 samples".into())
}

fn scalars_canonical(rng: &mut ChaCha8Rng) -> Outcome {
    for _ in 0..50 {
        let a = random_scalar(rng);
        let c = random_scalar(rng);
        if c.is_zero() {
            continue;
        }
        // the same value built along a different route
        let b = (&(&a * &c) + &c).div_ref(&c).w()? - Scalar::one();
        ensure!((&a - &b).is_zero() == (a == b), "{a} and {b}: difference and syntax disagree");
        ensure!(a == b, "{a} rebuilt as {b}");
        let d = &a + &Scalar::q_pow(1);
        ensure!(!(&a - &d).is_zero() && a != d, "{a} equals {a} + q");
    }
    Ok("50 samples".into())
}

// ---------------------------------------------------------------------------
// rootdata

fn rootdata_words(rng: &mut ChaCha8Rng) -> Outcome {
    let mut checked = 0;
    for ty in ["A2", "A3", "B2", "G2"] {
        let rd = RootDatum::from_type(ty).w()?;
        let mu: Weight = (0..rd.rank()).map(|_| rng.gen_range(-4..=4)).collect();
        for w in rd.weyl_group() {
            let want = rd.act(&w, &mu);
            for word in rd.reduced_words(&w) {
                let got = rd.act_word_weight(&word, &mu);
                ensure!(got == want, "{ty}: word {word:?} sends {mu:?} to {got:?}, expected {want:?}");
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} reduced words"))
}

fn rootdata_longest(_: &mut ChaCha8Rng) -> Outcome {
    for ty in ["A1", "A2", "A3", "B2", "G2"] {
        let rd = RootDatum::from_type(ty).w()?;
        let l = rd.longest_element().length();
        let n = rd.positive_roots().len();
        ensure!(l == n, "{ty}: length {l}, {n} positive roots");
    }
    Ok("5 types".into())
}

fn rootdata_integral(rng: &mut ChaCha8Rng) -> Outcome {
    for ty in ["A2", "A3", "B2", "G2"] {
        let rd = RootDatum::from_type(ty).w()?;
        for _ in 0..20 {
            let lambda: Weight = (0..rd.rank()).map(|_| rng.gen_range(-5..=5)).collect();
            let xi: Vec<i64> = (0..rd.rank()).map(|_| rng.gen_range(-5..=5)).collect();
            let exact = rd.form_weights(&lambda, &rd.root_to_weight(&xi));
            ensure!(exact.is_integer(), "{ty}: ({lambda:?}, {xi:?}) = {exact}");
            ensure!(exact.to_integer() == rd.form_weight_root(&lambda, &xi), "{ty}: integer form disagrees at {lambda:?}, {xi:?}");
        }
    }
    Ok("80 samples".into())
}

// ---------------------------------------------------------------------------
// uqminus

fn uq_symmetric(rng: &mut ChaCha8Rng) -> Outcome {
    for ty in ["A2", "B2"] {
        let e = engine(ty)?;
        for _ in 0..8 {
            let beta = random_content(rng, 2, 4);
            let x = random_homogeneous(rng, &beta);
            let y = random_homogeneous(rng, &beta);
            let (a, b) = (e.pair(&x, &y).w()?, e.pair(&y, &x).w()?);
            ensure!(a == b, "{ty}: (x,y) = {a}, (y,x) = {b} for x = {x}, y = {y}");
        }
    }
    Ok("16 pairs".into())
}

fn uq_star(rng: &mut ChaCha8Rng) -> Outcome {
    for ty in ["A2", "B2"] {
        let e = engine(ty)?;
        for _ in 0..8 {
            let beta = random_content(rng, 2, 4);
            let x = random_homogeneous(rng, &beta);
            let y = random_homogeneous(rng, &beta);
            let (a, b) = (e.pair(&x, &y).w()?, e.pair(&x.star(), &y.star()).w()?);
            ensure!(a == b, "{ty}: (x,y) = {a}, (*x,*y) = {b} for x = {x}, y = {y}");
        }
    }
    Ok("16 pairs".into())
}

fn uq_derivations(rng: &mut ChaCha8Rng) -> Outcome {
    for ty in ["A2", "B2"] {
        let e = engine(ty)?;
        let rd = e.root_datum();
        for _ in 0..8 {
            let beta = random_content(rng, 2, 3);
            let i = rng.gen_range(0..2);
            let x = random_homogeneous(rng, &beta);
            let mut gamma = beta.clone();
            gamma[i] += 1;
            let y = random_homogeneous(rng, &gamma);
            let f = NCElement::generator(i);
            let norm = Scalar::one_minus_q(2 * rd.sym(i)).inv().w()?;
            for (side, fx) in [(Side::Left, &f * &x), (Side::Right, &x * &f)] {
                let lhs = e.pair(&fx, &y).w()?;
                let rhs = &norm * &e.pair(&x, &e.q_derivation(i, &y, side)).w()?;
                ensure!(lhs == rhs, "{ty} {side:?}, i = {}: {lhs} != {rhs} for x = {x}, y = {y}", i + 1);
            }
        }
    }
    Ok("16 samples on both sides".into())
}

fn uq_sigma(rng: &mut ChaCha8Rng) -> Outcome {
    for ty in ["A2", "B2"] {
        let e = engine(ty)?;
        for _ in 0..8 {
            let beta_x = random_content(rng, 2, 3);
            let x = random_homogeneous(rng, &beta_x);
            let beta_y = random_content(rng, 2, 3);
            let y = random_homogeneous(rng, &beta_y);
            ensure!(e.equal(&e.sigma(&e.sigma(&x)), &x).w()?, "{ty}: sigma^2 != id on {x}");
            let lhs = e.involution(&(&x * &y), Involution::SigmaPrime);
            let rhs = &e.involution(&y, Involution::SigmaPrime) * &e.involution(&x, Involution::SigmaPrime);
            ensure!(e.equal(&lhs, &rhs).w()?, "{ty}: sigma'(xy) != sigma'(y) sigma'(x) for x = {x}, y = {y}");
        }
    }
    Ok("16 samples".into())
}

fn uq_gram_rank(_: &mut ChaCha8Rng) -> Outcome {
    let mut checked = 0;
    for ty in ["A2", "B2", "G2"] {
        let e = engine(ty)?;
        let rd = e.root_datum();
        for beta in contents_up_to(2, 4) {
            let words = words_of_content(&beta);
            let gram: Vec<Vec<Scalar>> =
                words.iter().map(|a| words.iter().map(|b| e.pair_words(a, b)).collect::<crate::error::Result<_>>()).collect::<crate::error::Result<_>>().w()?;
            let rank = exact_rank(gram);
            let want = rd.kostant_partition(&beta) as usize;
            ensure!(rank == want, "{ty} content {beta:?}: Gram rank {rank}, Kostant count {want}");
            checked += 1;
        }
    }
    Ok(format!("{checked} weights"))
}

// ---------------------------------------------------------------------------
// pbw

fn pbw_braid(_: &mut ChaCha8Rng) -> Outcome {
    let mut checked = 0;
    for (ty, m) in [("A2", 3), ("B2", 4), ("G2", 6)] {
        let e = engine(ty)?.with_height_cap(12);
        let rd = e.root_datum();
        let apply = |word: &[usize], x: &TriangularElement| {
            word.iter().rev().fold(x.clone(), |acc, &i| braid_apply(i, &acc, BraidDirection::Forward, rd))
        };
        let w1: Vec<usize> = (0..m).map(|k| k % 2).collect();
        let w2: Vec<usize> = (0..m).map(|k| (k + 1) % 2).collect();
        for j in 0..2 {
            for (name, g) in [
                ("f", TriangularElement::f_gen(j, 2)),
                ("e", TriangularElement::e_gen(j, 2)),
                ("K", TriangularElement::torus(rd.simple_root(j))),
            ] {
                ensure!(e.triangular_equal(&apply(&w1, &g), &apply(&w2, &g)).w()?, "{ty}: braid relation fails on {name}_{}", j + 1);
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} generators"))
}

/// PBW exponents along every reduced word of `w0`, grouped by content, up to total degree 3.
fn pbw_families(e: &Engine) -> Vec<(Vec<usize>, Vec<Vec<Vec<u32>>>)> {
    let rd = e.root_datum();
    rd.reduced_words(&rd.longest_element())
        .into_iter()
        .map(|word| {
            let mut groups = Vec::new();
            for beta in contents_up_to(rd.rank(), 4) {
                let cs: Vec<Vec<u32>> =
                    e.pbw_exponents(&word, &beta).into_iter().filter(|c| c.iter().sum::<u32>() <= 3).collect();
                if !cs.is_empty() {
                    groups.push(cs);
                }
            }
            (word, groups)
        })
        .collect()
}

fn pbw_orthogonal(_: &mut ChaCha8Rng) -> Outcome {
    let mut checked = 0;
    for ty in ["A2", "B2"] {
        let e = engine(ty)?;
        for (word, groups) in pbw_families(&e) {
            for cs in groups {
                for (k, c) in cs.iter().enumerate() {
                    let f = e.pbw_vector(c, &word).w()?;
                    for c2 in &cs[k + 1..] {
                        let p = e.pair(&f, &*e.pbw_vector(c2, &word).w()?).w()?;
                        ensure!(p.is_zero(), "{ty} {word:?}: (F({c:?}), F({c2:?})) = {p}");
                        checked += 1;
                    }
                }
            }
        }
    }
    Ok(format!("{checked} pairs"))
}

fn pbw_norms(_: &mut ChaCha8Rng) -> Outcome {
    let mut checked = 0;
    for ty in ["A2", "B2"] {
        let e = engine(ty)?;
        for (word, groups) in pbw_families(&e) {
            for c in groups.iter().flatten() {
                let f = e.pbw_vector(c, &word).w()?;
                let norm = e.pair(&f, &f).w()?;
                let want = pbw_norm_closed(c, &word, e.root_datum());
                ensure!(norm == want, "{ty} {word:?} {c:?}: (F,F) = {norm}, closed form {want}");
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} vectors"))
}

fn pbw_span(_: &mut ChaCha8Rng) -> Outcome {
    let mut checked = 0;
    for ty in ["A2", "B2"] {
        let e = engine(ty)?;
        let rd = e.root_datum();
        let e2 = engine(ty)?;
        for w in rd.weyl_group() {
            let words = rd.reduced_words(&w);
            for word in &words {
                for beta in contents_up_to(rd.rank(), 3) {
                    for c in e.pbw_exponents(word, &beta) {
                        let f = e.pbw_vector(&c, word).w()?;
                        for other in &words {
                            let r = e2.pbw_expand(&f, other).w()?;
                            ensure!(r.residual.is_empty(), "{ty}: F({c:?}) along {word:?} leaves the span along {other:?}");
                            checked += 1;
                        }
                    }
                }
            }
        }
    }
    Ok(format!("{checked} expansions"))
}

// ---------------------------------------------------------------------------
// canonical

fn dcb_word_independence(_: &mut ChaCha8Rng) -> Outcome {
    let e = engine("A2")?;
    let words = [vec![0, 1, 0], vec![1, 0, 1]];
    let mut count = 0;
    for beta in contents_up_to(2, 4) {
        let a = e.dcb_space(&words[0], &beta).w()?;
        let b = e.dcb_space(&words[1], &beta).w()?;
        ensure!(a.dim() == b.dim(), "content {beta:?}: dimensions {} and {}", a.dim(), b.dim());
        let mut matched = BTreeSet::new();
        for (k, g) in a.elements.iter().enumerate() {
            let mut hit = None;
            for (m, h) in b.elements.iter().enumerate() {
                if e.equal(g, h).w()? {
                    hit = Some(m);
                }
            }
            let Some(m) = hit else { return Err(format!("content {beta:?}: label {:?} has no partner", a.labels[k])) };
            matched.insert(m);
            count += 1;
        }
        ensure!(matched.len() == b.dim(), "content {beta:?}: not a bijection");
    }
    Ok(format!("{count} elements"))
}

fn dcb_sigma(_: &mut ChaCha8Rng) -> Outcome {
    let mut count = 0;
    for ty in ["A2", "B2"] {
        let e = engine(ty)?;
        for b in labels_up_to(&e, 4)? {
            let g = e.label_element(&b).w()?;
            ensure!(e.equal(&e.sigma(&g), &g).w()?, "{ty}: G({:?}) is not sigma-invariant", b.exponents);
            count += 1;
        }
    }
    Ok(format!("{count} elements"))
}

fn dcb_star(_: &mut ChaCha8Rng) -> Outcome {
    let mut count = 0;
    for ty in ["A2", "B2"] {
        let e = engine(ty)?;
        let mut images = BTreeSet::new();
        let labels = labels_up_to(&e, 4)?;
        for b in &labels {
            let g = e.label_element(b).w()?.star();
            let exp = e.dcb_expand(&g).w()?;
            ensure!(exp.len() == 1 && exp.values().all(Scalar::is_one), "{ty}: *G({:?}) is not a basis element", b.exponents);
            images.insert(exp.into_keys().next().expect("one term"));
            count += 1;
        }
        ensure!(images.len() == labels.len(), "{ty}: star is not injective on the basis");
    }
    Ok(format!("{count} elements"))
}

fn dcb_demazure(_: &mut ChaCha8Rng) -> Outcome {
    let mut count = 0;
    for ty in ["A2", "B2"] {
        let e = engine(ty)?;
        let rd = e.root_datum();
        let labels = labels_up_to(&e, 4)?;
        for w in rd.weyl_group() {
            let words = rd.reduced_words(&w);
            for b in &labels {
                let g = e.label_element(b).w()?;
                let verdicts: Vec<bool> =
                    words.iter().map(|word| e.pairs_with_demazure_monomial(&g, word)).collect::<crate::error::Result<_>>().w()?;
                ensure!(
                    verdicts.iter().all(|&v| v == verdicts[0]),
                    "{ty}: membership of {:?} depends on the reduced word of {:?}",
                    b.exponents,
                    w.word()
                );
                count += 1;
            }
        }
    }
    Ok(format!("{count} label-pattern pairs"))
}

// ---------------------------------------------------------------------------
// highest_weight

fn random_module_vector(e: &Engine, rng: &mut ChaCha8Rng, lambda: &[i64], beta: &[i64]) -> std::result::Result<ModuleVector, String> {
    e.module_vector(lambda, beta, &random_homogeneous(rng, beta)).w()
}

fn hw_contravariance(rng: &mut ChaCha8Rng) -> Outcome {
    let mut count = 0;
    for ty in ["A2", "B2"] {
        let e = engine(ty)?;
        for _ in 0..8 {
            let lambda: Weight = (0..2).map(|_| rng.gen_range(0..=2)).collect();
            let beta = random_content(rng, 2, 3);
            let i = rng.gen_range(0..2);
            let mut gamma = beta.clone();
            gamma[i] += 1;
            let v1 = random_module_vector(&e, rng, &lambda, &beta)?;
            let v2 = random_module_vector(&e, rng, &lambda, &gamma)?;
            let lhs = e.contravariant_form(&e.module_action(&ModuleGenerator::F(i), &v1).w()?, &v2).w()?;
            let rhs = e.contravariant_form(&v1, &e.module_action(&ModuleGenerator::E(i), &v2).w()?).w()?;
            ensure!(lhs == rhs, "{ty} lambda {lambda:?}, i = {}: (f v1, v2) = {lhs}, (v1, e v2) = {rhs}", i + 1);
            count += 1;
        }
    }
    Ok(format!("{count} samples"))
}

fn hw_extremal(_: &mut ChaCha8Rng) -> Outcome {
    let mut count = 0;
    for ty in ["A2", "B2"] {
        let e = engine(ty)?;
        let rd = e.root_datum();
        for lambda in [rd.fundamental_weight(0), rd.fundamental_weight(1), rd.rho()] {
            for w in rd.weyl_group() {
                let u = e.extremal_vector(&w, &lambda).w()?;
                let n = e.contravariant_form(&u, &u).w()?;
                ensure!(n.is_one(), "{ty}: (u, u) = {n} for w = {:?}, lambda {lambda:?}", w.word());
                count += 1;
            }
        }
    }
    Ok(format!("{count} extremal vectors"))
}

fn hw_matrix_coefficient(_: &mut ChaCha8Rng) -> Outcome {
    let mut count = 0;
    for ty in ["A2", "B2"] {
        let e = engine(ty)?;
        let rd = e.root_datum();
        let lambda = rd.rho();
        let top = rd.longest_element();
        for w in rd.weyl_group() {
            let u = e.extremal_vector(&top, &lambda).w()?;
            let u2 = e.extremal_vector(&w, &lambda).w()?;
            let d = e.matrix_coefficient(&u, &u2).w()?;
            let beta: Vec<i64> = u.content.iter().zip(&u2.content).map(|(a, b)| a - b).collect();
            for m in words_of_content(&beta) {
                let mut v = u2.clone();
                for &i in m.iter().rev() {
                    v = e.module_action(&ModuleGenerator::F(i as usize), &v).w()?;
                }
                let lhs = e.pair(&d, &NCElement::word(m.clone())).w()?;
                let rhs = e.contravariant_form(&u, &v).w()?;
                ensure!(lhs == rhs, "{ty}: (D, {m:?}) = {lhs}, (u, m u') = {rhs} for w = {:?}", w.word());
                count += 1;
            }
        }
    }
    Ok(format!("{count} monomials"))
}

fn hw_kumar_peterson(_: &mut ChaCha8Rng) -> Outcome {
    let e = engine("A2")?;
    let rd = e.root_datum();
    let word = e.reference_word();
    let w0 = rd.longest_element();
    let lambdas = [vec![1, 0], vec![0, 1], vec![1, 1], vec![2, 2]];
    let mut report = Vec::new();
    for w_word in [vec![0], vec![0, 1], vec![0, 1, 0]] {
        let w = rd.weyl_from_reduced_word(&w_word).w()?;
        // B(U^-(w)) up to height 4, by PBW membership, with right string data
        let mut target = BTreeMap::new();
        for beta in contents_up_to(2, 4) {
            for b in e.labels_of_weight(&word, &beta).w()? {
                if e.pbw_expand(&e.label_element(&b).w()?, w.word()).w()?.residual.is_empty() {
                    let eps: Vec<i64> = (0..2).map(|i| e.crystal_epsilon(i, &b, Side::Right).map(i64::from)).collect::<crate::error::Result<_>>().w()?;
                    target.insert(b, eps);
                }
            }
        }
        let mut image = BTreeSet::new();
        for lambda in &lambdas {
            let top = e.extremal_vector(&w, lambda).w()?;
            let mut seen = BTreeSet::new();
            for gamma in contents_up_to(2, 8) {
                if gamma.iter().zip(&top.content).any(|(g, t)| g > t) {
                    continue;
                }
                let rest: i64 = top.content.iter().zip(&gamma).map(|(t, g)| t - g).sum();
                if rest > 4 {
                    continue;
                }
                for b in e.labels_of_weight(&word, &gamma).w()? {
                    if e.minimal_lambda(&b).w()?.iter().zip(lambda).any(|(m, l)| m > l) {
                        continue;
                    }
                    let u = e.upper_global_vector(lambda, &b).w()?;
                    let d = e.matrix_coefficient(&top, &u).w()?;
                    if e.is_zero(&d).w()? {
                        continue;
                    }
                    let g = e
                        .label_of(&d, &word)
                        .w()?
                        .ok_or_else(|| format!("w {w_word:?}, lambda {lambda:?}: D is not a basis element at {:?}", b.exponents))?;
                    ensure!(seen.insert(e.star_label(&g).w()?), "w {w_word:?}, lambda {lambda:?}: map is not injective");
                }
            }
            if w == w0 {
                let dual: Weight = rd.act(&w0, lambda).iter().map(|x| -x).collect();
                let want: BTreeSet<CrystalLabel> =
                    target.iter().filter(|(_, eps)| eps.iter().zip(&dual).all(|(a, b)| a <= b)).map(|(b, _)| b.clone()).collect();
                ensure!(seen == want, "w0, lambda {lambda:?}: image differs from the eps* bound");
            }
            image.extend(seen);
        }
        let labels: BTreeSet<CrystalLabel> = target.keys().cloned().collect();
        ensure!(image.is_subset(&labels), "w {w_word:?}: image leaves the PBW span of w");
        // weights up to 2 rho reach every label whose eps* is at most 2
        let bounded: BTreeSet<CrystalLabel> = target.iter().filter(|(_, eps)| eps.iter().all(|&x| x <= 2)).map(|(b, _)| b.clone()).collect();
        ensure!(bounded.is_subset(&image), "w {w_word:?}: labels not reached: {:?}", bounded.difference(&image).collect::<Vec<_>>());
        report.push(format!("{}/{}", image.len(), labels.len()));
    }
    Ok(format!("labels reached per pattern: {}", report.join(", ")))
}

fn hw_demazure(_: &mut ChaCha8Rng) -> Outcome {
    let mut report = Vec::new();
    for ty in ["A2", "B2"] {
        let e = engine(ty)?;
        let rd = e.root_datum();
        let word = e.reference_word();
        let lambda = rd.rho();
        for w in rd.weyl_group() {
            // span of U^+ u_{w lambda}, weight by weight
            let start = e.extremal_vector(&w, &lambda).w()?;
            let mut spans: BTreeMap<Vec<i64>, Vec<ModuleVector>> = BTreeMap::new();
            let mut queue = vec![start];
            while let Some(v) = queue.pop() {
                if v.is_zero() {
                    continue;
                }
                let span = spans.entry(v.content.clone()).or_default();
                let mut rows: Vec<Vec<Scalar>> = span.iter().map(|x| x.coords.clone()).collect();
                rows.push(v.coords.clone());
                if exact_rank(rows) == span.len() {
                    continue;
                }
                span.push(v.clone());
                for i in 0..rd.rank() {
                    if v.content[i] > 0 {
                        queue.push(e.module_action(&ModuleGenerator::E(i), &v).w()?);
                    }
                }
            }
            let dim: usize = spans.values().map(Vec::len).sum();
            // |B_w(lambda)|: labels with eps*_i <= lambda_i in the Demazure crystal of w
            let mut count = 0;
            let top = e.extremal_vector(&w, &lambda).w()?;
            for beta in contents_up_to(rd.rank(), top.content.iter().sum()) {
                if beta.iter().zip(&top.content).any(|(b, t)| b > t) {
                    continue;
                }
                for b in e.labels_of_weight(&word, &beta).w()? {
                    let fits = (0..rd.rank()).all(|i| e.crystal_epsilon(i, &b, Side::Right).map(|x| i64::from(x) <= lambda[i]).unwrap_or(false));
                    if fits && e.demazure_membership(&b, &w).w()? {
                        count += 1;
                    }
                }
            }
            ensure!(dim == count, "{ty} w = {:?}: Demazure module has dimension {dim}, crystal has {count}", w.word());
            report.push(dim);
        }
    }
    Ok(format!("dimensions {report:?}"))
}

// ---------------------------------------------------------------------------
// cells

fn cells_engine() -> std::result::Result<Engine, String> {
    Ok(engine("A2")?.with_height_cap(16))
}

fn cells_multiplicative(rng: &mut ChaCha8Rng) -> Outcome {
    let e = cells_engine()?;
    let samples = sample_localized(&e, rng, 10, 2)?;
    for _ in 0..10 {
        let x = samples.choose(rng).expect("nonempty");
        let y = samples.choose(rng).expect("nonempty");
        let lhs = e.twist_auto(&e.cell_mul(x, y).w()?).w()?;
        let rhs = e.cell_mul(&e.twist_auto(x).w()?, &e.twist_auto(y).w()?).w()?;
        ensure!(e.cell_equal(&lhs, &rhs).w()?, "eta(xy) != eta(x) eta(y) for x = {:?}, y = {:?}", x.numerator.terms, y.numerator.terms);
    }
    Ok("10 pairs".into())
}

fn cells_permutes(rng: &mut ChaCha8Rng) -> Outcome {
    let e = cells_engine()?;
    let samples = sample_localized(&e, rng, 15, 2)?;
    let mut images = BTreeSet::new();
    let mut sources = BTreeSet::new();
    for x in &samples {
        let y = e.twist_auto(x).w()?;
        let label = e.localized_basis_label(&y).w()?.ok_or_else(|| format!("eta of {:?} is not a basis element", x.numerator.terms))?;
        sources.insert(e.localized_basis_label(x).w()?);
        images.insert(label);
    }
    ensure!(sources.len() == images.len(), "eta is not injective on the samples");
    Ok(format!("{} distinct basis elements", images.len()))
}

fn cells_sigma(rng: &mut ChaCha8Rng) -> Outcome {
    let e = cells_engine()?;
    let rd = e.root_datum();
    let samples = sample_localized(&e, rng, 10, 2)?;
    for (k, x) in samples.iter().enumerate() {
        let y = &samples[(k + 1) % samples.len()];
        let z = e.cell_add(&e.cell_scale(x, &random_q_coeff(rng)), &e.cell_scale(y, &random_q_coeff(rng))).w()?;
        let lhs = e.cell_sigma(&e.twist_auto(&z).w()?).w()?;
        let rhs = e.twist_auto(&e.cell_sigma(&z).w()?).w()?;
        ensure!(e.cell_equal(&lhs, &rhs).w()?, "sigma and eta do not commute on sample {k}");
        let (wx, wy) = (e.cell_weight(x).w()?.expect("homogeneous"), e.cell_weight(y).w()?.expect("homogeneous"));
        let f = rd.form_weights(&wx, &wy);
        ensure!(f.is_integer(), "non-integral (wt x, wt y)");
        let lhs = e.cell_sigma(&e.cell_mul(x, y).w()?).w()?;
        let rhs = e.cell_scale(&e.cell_mul(&e.cell_sigma(y).w()?, &e.cell_sigma(x).w()?).w()?, &Scalar::q_pow(f.to_integer()));
        ensure!(e.cell_equal(&lhs, &rhs).w()?, "sigma(xy) != q^(wt x, wt y) sigma(y) sigma(x) on sample {k}");
    }
    Ok("10 samples".into())
}

fn cells_single_term(rng: &mut ChaCha8Rng) -> Outcome {
    let e = engine("A2")?;
    let rd = e.root_datum();
    let w0 = rd.longest_element();
    let pool = labels_up_to(&e, 3)?;
    for lambda in [vec![1, 0], vec![0, 1], vec![1, 1]] {
        let d = e.frozen_minor(&w0, &lambda).w()?;
        for b in pool.choose_multiple(rng, 8) {
            let beta = e.label_weight(b).w()?;
            let x = (&d * &e.label_element(b).w()?).scale(&Scalar::q_pow(rd.form_weight_root(&lambda, &beta)));
            let exp = e.dcb_expand(&x).w()?;
            ensure!(exp.len() == 1 && exp.values().all(Scalar::is_one), "lambda {lambda:?}, label {:?}: {} terms", b.exponents, exp.len());
        }
    }
    Ok("24 products".into())
}

fn cells_classical(rng: &mut ChaCha8Rng) -> Outcome {
    let e = cells_engine()?;
    let basis = sample_localized(&e, rng, 12, 2)?;
    for t in 0..8 {
        let pick = |rng: &mut ChaCha8Rng| -> std::result::Result<CellElement, String> {
            let mut x = e.cell_scale(&basis[0], &Scalar::zero());
            for _ in 0..rng.gen_range(1..=2) {
                x = e.cell_add(&x, &e.cell_scale(basis.choose(rng).expect("nonempty"), &random_q_coeff(rng))).w()?;
            }
            Ok(x)
        };
        let x = pick(rng)?;
        let y = pick(rng)?;
        let c = e.cell_sub(&e.cell_mul(&x, &y).w()?, &e.cell_mul(&y, &x).w()?).w()?;
        for (b, coeff) in &c.numerator.terms {
            let v = coeff.specialize().w()?;
            ensure!(v.is_zero(), "pair {t}: coefficient {coeff} on {:?} is {v} at q = 1", b.exponents);
        }
    }
    Ok("8 pairs".into())
}

fn cells_pipeline(_: &mut ChaCha8Rng) -> Outcome {
    let e = cells_engine()?;
    let rd = e.root_datum();
    let w0 = rd.longest_element();
    let mut count = 0;
    for b in labels_up_to(&e, 2)? {
        let x = e.localized_basis_element(&w0, &vec![0; rd.rank()], &b).w()?;
        let want = e.twist_auto(&x).w()?;
        let least = e.minimal_lambda(&b).w()?;
        let beta = e.label_weight(&b).w()?;
        for i in 0..rd.rank() {
            let mut lambda = least.clone();
            lambda[i] += 1;
            let u = e.upper_global_vector(&lambda, &b).w()?;
            let d = e.matrix_coefficient(&e.extremal_vector(&w0, &lambda).w()?, &u).w()?;
            let numerator = d.scale(&Scalar::q_pow(rd.form_weight_root(&lambda, &beta)));
            ensure!(e.in_unipotent_subgroup(&numerator, &w0).w()?, "gamma image of {:?} leaves the subgroup", b.exponents);
            let gamma = LocalizedSubgroupElement { pattern: w0.clone(), denominator: lambda.clone(), numerator };
            ensure!(e.cell_equal(&e.dcp_embed(&gamma).w()?, &want).w()?, "pipeline differs at {:?}, lambda {lambda:?}", b.exponents);
            count += 1;
        }
    }
    Ok(format!("{count} elements"))
}

// ---------------------------------------------------------------------------
// qcluster

fn qc_compatible(rng: &mut ChaCha8Rng) -> Outcome {
    for t in 0..50 {
        let mut pair = random_pair(rng);
        ensure!(pair.is_compatible(), "pair {t} is not compatible");
        for _ in 0..5 {
            let k = rng.gen_range(0..pair.exchangeable());
            pair = pair.mutate(k).w()?;
            ensure!(pair.is_compatible(), "pair {t}: mutation at {} breaks compatibility", k + 1);
        }
    }
    Ok("50 pairs, 5 mutations each".into())
}

fn qc_involution(rng: &mut ChaCha8Rng) -> Outcome {
    for t in 0..50 {
        let pair = random_pair(rng);
        let k = rng.gen_range(0..pair.exchangeable());
        ensure!(pair.mutate(k).w()?.mutate(k).w()? == pair, "pair {t}: mu_{} twice is not the identity", k + 1);
    }
    let e = engine("A2")?;
    let seed = e.initial_seed(&e.root_datum().longest_element(), &[0, 1, 0]).w()?;
    for k in 0..seed.pair.exchangeable() {
        let back = e.mutate_path(&seed, &[k, k]).w()?;
        ensure!(back.pair == seed.pair && back.expressions == seed.expressions, "A2 seed: mu_{} twice is not the identity", k + 1);
        let (Some(a), Some(b)) = (&back.realizations, &seed.realizations) else { return Err("seed lost its realization".into()) };
        for (x, y) in a.iter().zip(b) {
            ensure!(e.cell_equal(x, y).w()?, "A2 seed: realization changes under mu_{} twice", k + 1);
        }
    }
    Ok("50 pairs and the A2 seed".into())
}

fn qc_laurent(rng: &mut ChaCha8Rng) -> Outcome {
    let mut count = 0;
    for (ty, word) in [("A2", vec![0, 1, 0]), ("A3", vec![0, 1, 0, 2, 1, 0])] {
        let e = engine(ty)?;
        let w0 = e.root_datum().longest_element();
        let seed = crate::qcluster::QuantumSeed::from_pair(e.initial_seed(&w0, &word).w()?.pair).w()?;
        for _ in 0..6 {
            let m = seed.pair.exchangeable();
            let path: Vec<usize> = (0..rng.gen_range(1..=4)).map(|_| rng.gen_range(0..m)).collect();
            // mutate_seed fails unless each new variable divides out as a Laurent polynomial
            let s = e.mutate_path(&seed, &path).w()?;
            for expr in &s.expressions {
                ensure!(!expr.terms.is_empty(), "{ty} path {path:?}: a variable vanished");
            }
            count += 1;
        }
    }
    Ok(format!("{count} mutation paths"))
}

fn qc_initial(_: &mut ChaCha8Rng) -> Outcome {
    let mut report = Vec::new();
    for (ty, word) in [("A2", vec![0, 1, 0]), ("A2", vec![1, 0, 1]), ("A3", vec![0, 1, 0, 2, 1, 0])] {
        let e = engine(ty)?;
        let seed = e.initial_seed(&e.root_datum().longest_element(), &word).w()?;
        let lambda = &seed.pair.lambda;
        for (i, row) in lambda.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                ensure!(*x == -lambda[j][i], "{ty} {word:?}: Lambda is not skew-symmetric at ({}, {})", i + 1, j + 1);
            }
        }
        let d = seed.pair.check().w()?;
        ensure!(d.iter().all(|&x| x > 0), "{ty} {word:?}: d = {d:?}");
        report.push(format!("{ty} d = {d:?}"));
    }
    Ok(report.join(", "))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_module_has_checks() {
        for m in MODULES {
            assert!(!checks(m).unwrap().is_empty());
        }
        assert!(checks("nonsense").is_none());
    }

    #[test]
    fn exact_rank_small() {
        let m = vec![
            vec![Scalar::one(), Scalar::q_pow(1)],
            vec![Scalar::q_pow(1), Scalar::q_pow(2)],
        ];
        assert_eq!(exact_rank(m), 1);
    }
}
