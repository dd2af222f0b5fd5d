//! Finite-type root data: Cartan matrices, the invariant form, Weyl groups.
//!
//! Weights are integer vectors in the fundamental-weight basis; root-lattice
//! vectors are integer vectors in the simple-root basis. Indices are 0-based
//! internally and 1-based in every text or JSON interface.

use std::collections::{BTreeSet, HashMap, VecDeque};

use num_rational::Rational64;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Integer coordinates in the basis of fundamental weights.
pub type Weight = Vec<i64>;
/// Integer coordinates in the basis of simple roots.
pub type RootVector = Vec<i64>;

/// A symmetrizable Cartan matrix of finite type together with its symmetrizer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootDatum {
    name: String,
    cartan: Vec<Vec<i64>>,
    sym: Vec<i64>,
    cartan_inv: Vec<Vec<Rational64>>,
}

/// Weyl group element, stored as its lexicographically least reduced word.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WeylElt {
    word: Vec<usize>,
}

impl WeylElt {
    pub fn identity() -> Self {
        WeylElt { word: Vec::new() }
    }

    /// Canonical reduced word (0-based letters).
    pub fn word(&self) -> &[usize] {
        &self.word
    }

    pub fn length(&self) -> usize {
        self.word.len()
    }
}

impl RootDatum {
    /// Validates `cartan` and `sym` and builds the datum.
    pub fn new(cartan: Vec<Vec<i64>>, sym: Vec<i64>) -> Result<Self> {
        Self::named("custom", cartan, sym)
    }

    fn named(name: &str, cartan: Vec<Vec<i64>>, sym: Vec<i64>) -> Result<Self> {
        let r = cartan.len();
        let bad = |m: String| Err(Error::InvalidRootDatum(m));
        if r == 0 {
            return bad("empty Cartan matrix".into());
        }
        if sym.len() != r || cartan.iter().any(|row| row.len() != r) {
            return bad("dimension mismatch".into());
        }
        for i in 0..r {
            if cartan[i][i] != 2 {
                return bad(format!("a_{{{0}{0}}} must be 2", i + 1));
            }
            if sym[i] <= 0 {
                return bad("symmetrizer entries must be positive".into());
            }
            for j in 0..r {
                if i != j {
                    if cartan[i][j] > 0 {
                        return bad("off-diagonal entries must be nonpositive".into());
                    }
                    if (cartan[i][j] == 0) != (cartan[j][i] == 0) {
                        return bad("a_ij = 0 must match a_ji = 0".into());
                    }
                    if sym[i] * cartan[i][j] != sym[j] * cartan[j][i] {
                        return bad("DA is not symmetric".into());
                    }
                }
            }
        }
        // Positive definiteness of DA through leading principal minors.
        let da: Vec<Vec<Rational64>> = (0..r)
            .map(|i| (0..r).map(|j| Rational64::from_integer(sym[i] * cartan[i][j])).collect())
            .collect();
        for k in 1..=r {
            let minor: Vec<Vec<Rational64>> = da[..k].iter().map(|row| row[..k].to_vec()).collect();
            if determinant(minor) <= Rational64::zero() {
                return bad("not of finite type (symmetrised matrix is not positive definite)".into());
            }
        }
        let cartan_inv = invert(&cartan);
        Ok(RootDatum { name: name.to_string(), cartan, sym, cartan_inv })
    }

    /// Expands a type shorthand: `A1`, `A2`, `A3`, `B2`, `G2`.
    pub fn from_type(name: &str) -> Result<Self> {
        let (cartan, sym) = match name {
            "A1" => (vec![vec![2]], vec![1]),
            "A2" => (vec![vec![2, -1], vec![-1, 2]], vec![1, 1]),
            "A3" => (vec![vec![2, -1, 0], vec![-1, 2, -1], vec![0, -1, 2]], vec![1, 1, 1]),
            "B2" => (vec![vec![2, -1], vec![-2, 2]], vec![2, 1]),
            "G2" => (vec![vec![2, -1], vec![-3, 2]], vec![3, 1]),
            _ => return Err(Error::InvalidArgument(format!("unknown type {name:?}"))),
        };
        Self::named(name, cartan, sym)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn rank(&self) -> usize {
        self.cartan.len()
    }

    /// `a_{ij} = <h_i, alpha_j>`.
    pub fn cartan(&self, i: usize, j: usize) -> i64 {
        self.cartan[i][j]
    }

    pub fn cartan_matrix(&self) -> &[Vec<i64>] {
        &self.cartan
    }

    /// `d_i = (alpha_i, alpha_i) / 2`.
    pub fn sym(&self, i: usize) -> i64 {
        self.sym[i]
    }

    pub fn symmetrizer(&self) -> &[i64] {
        &self.sym
    }

    /// True when every simple root has the same length.
    pub fn is_simply_laced(&self) -> bool {
        self.sym.iter().all(|&d| d == self.sym[0])
    }

    /// `(alpha_i, alpha_j) = d_i a_{ij}`.
    pub fn form_simple(&self, i: usize, j: usize) -> i64 {
        self.sym[i] * self.cartan[i][j]
    }

    /// `(beta, gamma)` for root-lattice vectors.
    pub fn form_roots(&self, beta: &[i64], gamma: &[i64]) -> i64 {
        let r = self.rank();
        let mut s = 0;
        for i in 0..r {
            if beta[i] == 0 {
                continue;
            }
            for j in 0..r {
                s += beta[i] * self.form_simple(i, j) * gamma[j];
            }
        }
        s
    }

    /// `(lambda, beta)` for a weight and a root-lattice vector; always an integer.
    pub fn form_weight_root(&self, lambda: &[i64], beta: &[i64]) -> i64 {
        (0..self.rank()).map(|i| lambda[i] * beta[i] * self.sym[i]).sum()
    }

    /// `(lambda, mu)` for two weights.
    pub fn form_weights(&self, lambda: &[i64], mu: &[i64]) -> Rational64 {
        let r = self.rank();
        let mut s = Rational64::zero();
        for i in 0..r {
            let mut coord = Rational64::zero();
            for j in 0..r {
                coord += self.cartan_inv[i][j] * mu[j];
            }
            s += coord * (lambda[i] * self.sym[i]);
        }
        s
    }

    /// Simple-root coordinates as a weight: `alpha_j = sum_i a_{ij} varpi_i`.
    pub fn root_to_weight(&self, beta: &[i64]) -> Weight {
        let r = self.rank();
        (0..r).map(|i| (0..r).map(|j| self.cartan[i][j] * beta[j]).sum()).collect()
    }

    /// Simple-root coordinates of a weight, if it lies in the root lattice.
    pub fn weight_to_root(&self, mu: &[i64]) -> Option<RootVector> {
        let r = self.rank();
        let mut out = Vec::with_capacity(r);
        for i in 0..r {
            let mut c = Rational64::zero();
            for j in 0..r {
                c += self.cartan_inv[i][j] * mu[j];
            }
            if !c.is_integer() {
                return None;
            }
            out.push(c.to_integer());
        }
        Some(out)
    }

    pub fn simple_root(&self, i: usize) -> RootVector {
        let mut v = vec![0; self.rank()];
        v[i] = 1;
        v
    }

    pub fn fundamental_weight(&self, i: usize) -> Weight {
        self.simple_root(i)
    }

    pub fn rho(&self) -> Weight {
        vec![1; self.rank()]
    }

    /// `<h_i, beta>` for a root-lattice vector.
    pub fn coroot_on_root(&self, i: usize, beta: &[i64]) -> i64 {
        (0..self.rank()).map(|j| self.cartan[i][j] * beta[j]).sum()
    }

    /// `s_i(mu) = mu - <h_i, mu> alpha_i` on a weight.
    pub fn reflect_weight(&self, i: usize, mu: &[i64]) -> Weight {
        let c = mu[i];
        (0..self.rank()).map(|k| mu[k] - c * self.cartan[k][i]).collect()
    }

    /// `s_i(beta)` on a root-lattice vector.
    pub fn reflect_root(&self, i: usize, beta: &[i64]) -> RootVector {
        let c = self.coroot_on_root(i, beta);
        let mut out = beta.to_vec();
        out[i] -= c;
        out
    }

    /// `s_{i_1} ... s_{i_k} (mu)` on a weight.
    pub fn act_word_weight(&self, word: &[usize], mu: &[i64]) -> Weight {
        word.iter().rev().fold(mu.to_vec(), |acc, &i| self.reflect_weight(i, &acc))
    }

    /// `s_{i_1} ... s_{i_k} (beta)` on a root-lattice vector.
    pub fn act_word_root(&self, word: &[usize], beta: &[i64]) -> RootVector {
        word.iter().rev().fold(beta.to_vec(), |acc, &i| self.reflect_root(i, &acc))
    }

    pub fn act(&self, w: &WeylElt, mu: &[i64]) -> Weight {
        self.act_word_weight(&w.word, mu)
    }

    /// Canonical element of the word's product (letters 0-based).
    pub fn weyl_from_word(&self, word: &[usize]) -> Result<WeylElt> {
        if let Some(&i) = word.iter().find(|&&i| i >= self.rank()) {
            return Err(Error::InvalidArgument(format!("letter {} out of range", i + 1)));
        }
        Ok(self.weyl_from_rho_image(self.act_word_weight(word, &self.rho())))
    }

    /// Same as [`weyl_from_word`](Self::weyl_from_word) but rejects non-reduced words.
    pub fn weyl_from_reduced_word(&self, word: &[usize]) -> Result<WeylElt> {
        let w = self.weyl_from_word(word)?;
        if w.length() != word.len() {
            return Err(Error::NotReduced(word.iter().map(|i| i + 1).collect()));
        }
        Ok(w)
    }

    pub fn is_reduced(&self, word: &[usize]) -> bool {
        self.weyl_from_reduced_word(word).is_ok()
    }

    /// Recovers the lex-least reduced word from `w(rho)` by peeling left descents.
    fn weyl_from_rho_image(&self, mut mu: Weight) -> WeylElt {
        let mut word = Vec::new();
        while let Some(i) = (0..self.rank()).find(|&i| mu[i] < 0) {
            word.push(i);
            mu = self.reflect_weight(i, &mu);
        }
        WeylElt { word }
    }

    pub fn simple_reflection(&self, i: usize) -> WeylElt {
        WeylElt { word: vec![i] }
    }

    pub fn weyl_mul(&self, a: &WeylElt, b: &WeylElt) -> WeylElt {
        let mut w = a.word.clone();
        w.extend_from_slice(&b.word);
        self.weyl_from_word(&w).expect("letters in range")
    }

    pub fn weyl_inverse(&self, w: &WeylElt) -> WeylElt {
        let mut word = w.word.clone();
        word.reverse();
        self.weyl_from_word(&word).expect("letters in range")
    }

    /// Every element of the Weyl group, ordered by length then word.
    pub fn weyl_group(&self) -> Vec<WeylElt> {
        let mut seen: HashMap<Weight, WeylElt> = HashMap::new();
        let mut queue = VecDeque::from([self.rho()]);
        seen.insert(self.rho(), WeylElt::identity());
        while let Some(mu) = queue.pop_front() {
            for i in 0..self.rank() {
                let nu = self.reflect_weight(i, &mu);
                if !seen.contains_key(&nu) {
                    seen.insert(nu.clone(), self.weyl_from_rho_image(nu.clone()));
                    queue.push_back(nu);
                }
            }
        }
        let mut all: Vec<WeylElt> = seen.into_values().collect();
        all.sort_by(|a, b| (a.length(), &a.word).cmp(&(b.length(), &b.word)));
        all
    }

    pub fn longest_element(&self) -> WeylElt {
        let minus_rho: Weight = self.rho().iter().map(|x| -x).collect();
        self.weyl_from_rho_image(minus_rho)
    }

    /// The set `I(w)` of reduced words, in lexicographic order.
    pub fn reduced_words(&self, w: &WeylElt) -> Vec<Vec<usize>> {
        let mut out = BTreeSet::new();
        self.collect_words(&self.act(w, &self.rho()), &mut Vec::new(), &mut out);
        out.into_iter().collect()
    }

    fn collect_words(&self, mu: &Weight, prefix: &mut Vec<usize>, out: &mut BTreeSet<Vec<usize>>) {
        let descents: Vec<usize> = (0..self.rank()).filter(|&i| mu[i] < 0).collect();
        if descents.is_empty() {
            out.insert(prefix.clone());
            return;
        }
        for i in descents {
            prefix.push(i);
            self.collect_words(&self.reflect_weight(i, mu), prefix, out);
            prefix.pop();
        }
    }

    /// Positive roots in simple-root coordinates, by closure under reflections.
    pub fn positive_roots(&self) -> Vec<RootVector> {
        let r = self.rank();
        let mut seen: BTreeSet<RootVector> = (0..r).map(|i| self.simple_root(i)).collect();
        let mut queue: VecDeque<RootVector> = seen.iter().cloned().collect();
        while let Some(b) = queue.pop_front() {
            for i in 0..r {
                let c = self.reflect_root(i, &b);
                if c.iter().all(|&x| x >= 0) && !seen.contains(&c) {
                    seen.insert(c.clone());
                    queue.push_back(c);
                }
            }
        }
        let mut roots: Vec<RootVector> = seen.into_iter().collect();
        roots.sort_by_key(|b| (b.iter().sum::<i64>(), b.clone()));
        roots
    }

    /// Roots `beta_k = s_{i_1} ... s_{i_{k-1}} alpha_{i_k}` along a word.
    pub fn roots_along_word(&self, word: &[usize]) -> Vec<RootVector> {
        (0..word.len()).map(|k| self.act_word_root(&word[..k], &self.simple_root(word[k]))).collect()
    }

    /// Number of ways to write `beta` as a sum of positive roots.
    pub fn kostant_partition(&self, beta: &[i64]) -> u64 {
        if beta.iter().any(|&x| x < 0) {
            return 0;
        }
        let roots = self.positive_roots();
        let mut memo = HashMap::new();
        kostant_rec(&roots, 0, beta.to_vec(), &mut memo)
    }

    /// Weight multiplicity `dim V(lambda)_mu` by Kostant's alternating formula.
    pub fn weight_multiplicity(&self, lambda: &[i64], mu: &[i64]) -> u64 {
        let rho = self.rho();
        let lr: Weight = lambda.iter().zip(&rho).map(|(a, b)| a + b).collect();
        let mr: Weight = mu.iter().zip(&rho).map(|(a, b)| a + b).collect();
        let mut total: i64 = 0;
        for w in self.weyl_group() {
            let image = self.act(&w, &lr);
            let diff: Weight = image.iter().zip(&mr).map(|(a, b)| a - b).collect();
            if let Some(beta) = self.weight_to_root(&diff) {
                let k = self.kostant_partition(&beta) as i64;
                total += if w.length() % 2 == 0 { k } else { -k };
            }
        }
        total as u64
    }

    pub fn is_dominant(&self, lambda: &[i64]) -> bool {
        lambda.iter().all(|&x| x >= 0)
    }
}

fn kostant_rec(
    roots: &[RootVector],
    start: usize,
    beta: RootVector,
    memo: &mut HashMap<(usize, RootVector), u64>,
) -> u64 {
    if beta.iter().all(|&x| x == 0) {
        return 1;
    }
    if start == roots.len() {
        return 0;
    }
    if let Some(&v) = memo.get(&(start, beta.clone())) {
        return v;
    }
    let mut total = kostant_rec(roots, start + 1, beta.clone(), memo);
    let mut rest = beta.clone();
    loop {
        for (x, y) in rest.iter_mut().zip(&roots[start]) {
            *x -= y;
        }
        if rest.iter().any(|&x| x < 0) {
            break;
        }
        total += kostant_rec(roots, start + 1, rest.clone(), memo);
    }
    memo.insert((start, beta), total);
    total
}

fn determinant(mut m: Vec<Vec<Rational64>>) -> Rational64 {
    let n = m.len();
    let mut det = Rational64::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| !m[r][c].is_zero()) else {
            return Rational64::zero();
        };
        if p != c {
            m.swap(p, c);
            det = -det;
        }
        det *= m[c][c];
        for r in c + 1..n {
            let f = m[r][c] / m[c][c];
            for k in c..n {
                let t = m[c][k];
                m[r][k] -= f * t;
            }
        }
    }
    det
}

fn invert(a: &[Vec<i64>]) -> Vec<Vec<Rational64>> {
    let n = a.len();
    let mut m: Vec<Vec<Rational64>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r: Vec<Rational64> = row.iter().map(|&x| Rational64::from_integer(x)).collect();
            r.extend((0..n).map(|j| if i == j { Rational64::one() } else { Rational64::zero() }));
            r
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&r| !m[r][c].is_zero()).expect("Cartan matrix is invertible");
        m.swap(p, c);
        let piv = m[c][c];
        for k in 0..2 * n {
            m[c][k] /= piv;
        }
        for r in 0..n {
            if r != c && !m[r][c].is_zero() {
                let f = m[r][c];
                for k in 0..2 * n {
                    let t = m[c][k];
                    m[r][k] -= f * t;
                }
            }
        }
    }
    m.into_iter().map(|row| row[n..].to_vec()).collect()
}
