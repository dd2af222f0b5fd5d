//! Quantum seeds: compatible pairs, the based quantum torus, mutation, the initial seed of
//! a reduced word realized by flag minors, and checks against the cell algebra.
//!
//! Indices are 0-based; exchangeable indices come first and the frozen ones last.

use std::collections::BTreeMap;

use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::canonical::CrystalLabel;
use crate::cells::CellElement;
use crate::engine::Engine;
use crate::error::{Error, Result};
use crate::rootdata::{Weight, WeylElt};
use crate::scalars::Scalar;

pub type IntMatrix = Vec<Vec<i64>>;

/// A pair `(Lambda, B)` of a skew-symmetric `l x l` matrix and an `l x (l - n)` matrix.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompatiblePair {
    pub lambda: IntMatrix,
    pub exchange: IntMatrix,
}

impl CompatiblePair {
    pub fn size(&self) -> usize {
        self.lambda.len()
    }

    pub fn exchangeable(&self) -> usize {
        self.exchange.first().map_or(0, Vec::len)
    }

    /// The integers `d_j` with `sum_k b_kj lambda_ki = delta_ij d_j`, or the first failing `(i, j)`.
    pub fn check(&self) -> Result<Vec<i64>> {
        let l = self.size();
        let m = self.exchangeable();
        if self.exchange.len() != l || self.lambda.iter().any(|r| r.len() != l) || self.exchange.iter().any(|r| r.len() != m) {
            return Err(Error::InvalidArgument("matrix shapes do not match".into()));
        }
        for i in 0..l {
            for j in 0..l {
                if self.lambda[i][j] != -self.lambda[j][i] {
                    return Err(Error::InvalidArgument(format!("Lambda is not skew-symmetric at ({}, {})", i + 1, j + 1)));
                }
            }
        }
        let mut d = Vec::with_capacity(m);
        for j in 0..m {
            for i in 0..l {
                let v: i64 = (0..l).map(|k| self.exchange[k][j] * self.lambda[k][i]).sum();
                if (i == j && v <= 0) || (i != j && v != 0) {
                    return Err(Error::InvalidArgument(format!("pair is not compatible at ({}, {}): value {v}", i + 1, j + 1)));
                }
                if i == j {
                    d.push(v);
                }
            }
        }
        Ok(d)
    }

    pub fn is_compatible(&self) -> bool {
        self.check().is_ok()
    }

    fn check_index(&self, k: usize) -> Result<()> {
        if k >= self.exchangeable() {
            return Err(Error::InvalidArgument(format!("index {} is not exchangeable", k + 1)));
        }
        Ok(())
    }

    /// Mutation in direction `k`.
    pub fn mutate(&self, k: usize) -> Result<Self> {
        self.check_index(k)?;
        let l = self.size();
        let m = self.exchangeable();
        let b = &self.exchange;
        let e: IntMatrix = (0..l)
            .map(|i| {
                (0..l)
                    .map(|j| {
                        if j != k {
                            (i == j) as i64
                        } else if i == k {
                            -1
                        } else {
                            (-b[i][k]).max(0)
                        }
                    })
                    .collect()
            })
            .collect();
        let f: IntMatrix = (0..m)
            .map(|i| {
                (0..m)
                    .map(|j| {
                        if i != k {
                            (i == j) as i64
                        } else if j == k {
                            -1
                        } else {
                            b[k][j].max(0)
                        }
                    })
                    .collect()
            })
            .collect();
        let lambda = mat_mul(&mat_mul(&transpose(&e), &self.lambda), &e);
        let exchange = mat_mul(&mat_mul(&e, b), &f);
        Ok(CompatiblePair { lambda, exchange })
    }

    /// `Lambda(a, b) = a^T Lambda b`.
    pub fn form(&self, a: &[i64], b: &[i64]) -> i64 {
        let mut s = 0;
        for (i, x) in a.iter().enumerate() {
            if *x != 0 {
                for (j, y) in b.iter().enumerate() {
                    s += x * self.lambda[i][j] * y;
                }
            }
        }
        s
    }
}

fn transpose(a: &IntMatrix) -> IntMatrix {
    let cols = a.first().map_or(0, Vec::len);
    (0..cols).map(|j| a.iter().map(|r| r[j]).collect()).collect()
}

fn mat_mul(a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter().map(|r| (0..cols).map(|j| (0..inner).map(|k| r[k] * b[k][j]).sum()).collect()).collect()
}

/// `X^a X^b = q^{Lambda(a,b)/2} X^{a+b}`: returns the factor and `a + b`.
pub fn torus_mul(a: &[i64], b: &[i64], lambda: &IntMatrix) -> (Scalar, Vec<i64>) {
    let pair = CompatiblePair { lambda: lambda.clone(), exchange: Vec::new() };
    (Scalar::v_pow(pair.form(a, b)), a.iter().zip(b).map(|(x, y)| x + y).collect())
}

/// An element of the based quantum torus of a fixed `Lambda`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct TorusElement {
    pub terms: BTreeMap<Vec<i64>, Scalar>,
}

impl TorusElement {
    pub fn monomial(a: Vec<i64>, c: Scalar) -> Self {
        let mut t = TorusElement::default();
        t.add_term(a, c);
        t
    }

    pub fn add_term(&mut self, a: Vec<i64>, c: Scalar) {
        if c.is_zero() {
            return;
        }
        let s = match self.terms.get(&a) {
            Some(x) => x + &c,
            None => c,
        };
        if s.is_zero() {
            self.terms.remove(&a);
        } else {
            self.terms.insert(a, s);
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for (a, c) in &o.terms {
            out.add_term(a.clone(), c.clone());
        }
        out
    }

    pub fn mul(&self, o: &Self, lambda: &IntMatrix) -> Self {
        let mut out = TorusElement::default();
        for (a, x) in &self.terms {
            for (b, y) in &o.terms {
                let (f, s) = torus_mul(a, b, lambda);
                out.add_term(s, &(x * y) * &f);
            }
        }
        out
    }

    /// Exact quotient `q` with `q * d = self`, if it exists.
    pub fn right_divide(&self, d: &Self, lambda: &IntMatrix) -> Result<Option<Self>> {
        let Some((dlead, dc)) = d.terms.iter().next_back() else { return Err(Error::DivisionByZero) };
        let Some((dlow, _)) = d.terms.iter().next() else { return Err(Error::DivisionByZero) };
        let floor = match self.terms.keys().next() {
            Some(low) => low.iter().zip(dlow).map(|(a, b)| a - b).collect::<Vec<_>>(),
            None => return Ok(Some(TorusElement::default())),
        };
        let mut rem = self.clone();
        let mut quot = TorusElement::default();
        while let Some((lead, c)) = rem.terms.iter().next_back() {
            let e: Vec<i64> = lead.iter().zip(dlead).map(|(a, b)| a - b).collect();
            if e < floor {
                return Ok(None);
            }
            let (f, _) = torus_mul(&e, dlead, lambda);
            let coeff = c.div_ref(&(&f * dc))?;
            let t = TorusElement::monomial(e, coeff);
            rem = rem.add(&t.mul(d, lambda).scale(&Scalar::from_int(-1)));
            quot = quot.add(&t);
        }
        Ok(Some(quot))
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        let mut out = TorusElement::default();
        for (a, x) in &self.terms {
            out.add_term(a.clone(), x * c);
        }
        out
    }

    /// Whether this is a single monomial `c X^a`.
    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }
}

/// A quantum seed with cluster variables expressed in the torus of the initial seed.
#[derive(Clone, Debug, PartialEq)]
pub struct QuantumSeed {
    pub pair: CompatiblePair,
    pub labels: Vec<String>,
    /// Each variable in the initial torus.
    pub expressions: Vec<TorusElement>,
    pub initial_lambda: IntMatrix,
    /// Cell-algebra realization of the variables, when known.
    pub realizations: Option<Vec<CellElement>>,
    /// Sign applied to the combinatorial exchange rule (initial seeds only).
    pub convention: i64,
}

impl QuantumSeed {
    /// The seed whose variables are the coordinates of its own torus.
    pub fn from_pair(pair: CompatiblePair) -> Result<Self> {
        pair.check()?;
        let l = pair.size();
        let expressions = (0..l)
            .map(|k| {
                let mut a = vec![0; l];
                a[k] = 1;
                TorusElement::monomial(a, Scalar::one())
            })
            .collect();
        Ok(QuantumSeed {
            labels: (1..=l).map(|k| format!("x{k}")).collect(),
            expressions,
            initial_lambda: pair.lambda.clone(),
            pair,
            realizations: None,
            convention: 1,
        })
    }

    pub fn frozen_range(&self) -> std::ops::Range<usize> {
        self.pair.exchangeable()..self.pair.size()
    }

    /// Normalization `q^{-1/2 sum_{s<t} lambda_st a_s a_t}` of an ordered monomial.
    pub fn ordering_factor(&self, a: &[i64]) -> Scalar {
        let mut e = 0;
        for s in 0..a.len() {
            for t in s + 1..a.len() {
                e += self.pair.lambda[s][t] * a[s] * a[t];
            }
        }
        Scalar::v_pow(-e)
    }

    /// The monomial `X^a`, for `a >= 0`, in the initial torus.
    pub fn monomial_expression(&self, a: &[i64]) -> TorusElement {
        let l = self.pair.size();
        let mut out = TorusElement::monomial(vec![0; l], self.ordering_factor(a));
        for (s, &k) in a.iter().enumerate() {
            for _ in 0..k {
                out = out.mul(&self.expressions[s], &self.initial_lambda);
            }
        }
        out
    }

    /// The two monomials `v_+`, `v_-` of the exchange relation in direction `k`.
    pub fn exchange_monomials(&self, k: usize) -> (Vec<i64>, Vec<i64>) {
        let l = self.pair.size();
        let col: Vec<i64> = (0..l).map(|j| self.pair.exchange[j][k]).collect();
        (col.iter().map(|&b| b.max(0)).collect(), col.iter().map(|&b| (-b).max(0)).collect())
    }

    /// `X'_k X_k` as a combination of monomials in the current variables.
    pub fn exchange_numerator(&self, k: usize) -> Vec<(Scalar, Vec<i64>)> {
        let l = self.pair.size();
        let mut ek = vec![0; l];
        ek[k] = 1;
        let (plus, minus) = self.exchange_monomials(k);
        [plus, minus].into_iter().map(|v| (Scalar::v_pow(self.pair.form(&v, &ek)), v)).collect()
    }
}

impl Engine {
    fn check_simply_laced(&self) -> Result<()> {
        if !self.root_datum().is_simply_laced() {
            return Err(Error::Unsupported("quantum seeds are only provided for simply-laced types".into()));
        }
        Ok(())
    }

    /// `Lambda` from the q-commutation of the given cell elements.
    pub fn derive_lambda(&self, vars: &[CellElement]) -> Result<IntMatrix> {
        let l = vars.len();
        let mut out = vec![vec![0; l]; l];
        for s in 0..l {
            for t in s + 1..l {
                let m = self.q_commutation_exponent(&vars[s], &vars[t])?.ok_or_else(|| {
                    Error::Internal(format!("variables {} and {} do not q-commute", s + 1, t + 1))
                })?;
                out[s][t] = m;
                out[t][s] = -m;
            }
        }
        Ok(out)
    }

    /// `m` with `x y = q^m y x`, if one exists.
    pub fn q_commutation_exponent(&self, x: &CellElement, y: &CellElement) -> Result<Option<i64>> {
        let xy = self.cell_mul(x, y)?;
        let yx = self.cell_mul(y, x)?;
        let top: Weight = xy.denominator.iter().zip(&yx.denominator).map(|(a, b)| *a.max(b)).collect();
        if xy.numerator.is_zero() {
            return Ok(if yx.numerator.is_zero() { Some(0) } else { None });
        }
        let (Some((b, c1)), true) = (xy.numerator.terms.iter().next(), xy.denominator == yx.denominator || top.is_empty()) else {
            return Ok(None);
        };
        let Some(c2) = yx.numerator.terms.get(b) else { return Ok(None) };
        let ratio = c1.div_ref(c2)?;
        let num = ratio.numerator();
        if !ratio.denominator().is_one() || num.terms().count() != 1 || !num.coeff(num.low()).is_one() || num.low() % 2 != 0 {
            return Ok(None);
        }
        let m = num.low() / 2;
        Ok(self.cell_equal(&xy, &self.cell_scale(&yx, &Scalar::q_pow(m)))?.then_some(m))
    }

    /// The initial seed of a reduced word of `w`, realized by the flag minors.
    pub fn initial_seed(&self, w: &WeylElt, word: &[usize]) -> Result<QuantumSeed> {
        self.check_simply_laced()?;
        let rd = self.root_datum();
        if rd.weyl_from_reduced_word(word)? != *w {
            return Err(Error::InvalidArgument("word is not a reduced word of the pattern".into()));
        }
        let l = word.len();
        let next: Vec<usize> = (0..l).map(|k| (k + 1..l).find(|&m| word[m] == word[k]).unwrap_or(l)).collect();
        let order: Vec<usize> = (0..l).filter(|&k| next[k] < l).chain((0..l).filter(|&k| next[k] == l)).collect();
        let m = (0..l).filter(|&k| next[k] < l).count();
        let mut vars = Vec::with_capacity(l);
        let mut labels = Vec::with_capacity(l);
        for &k in &order {
            let wk = rd.weyl_from_word(&word[..=k])?;
            let fw = rd.fundamental_weight(word[k]);
            let d = self.frozen_minor(&wk, &fw)?;
            vars.push(self.cell_from(&d, w)?);
            labels.push(format!("D[{}]", word[..=k].iter().map(|i| (i + 1).to_string()).collect::<Vec<_>>().join(",")));
        }
        let lambda = self.derive_lambda(&vars)?;
        let rule = |s: usize, t: usize| -> i64 {
            let (is, it) = (word[s], word[t]);
            if t == next[s] {
                1
            } else if s == next[t] {
                -1
            } else if s < t && t < next[s] && next[s] < next[t] {
                rd.cartan(is, it)
            } else if t < s && s < next[t] && next[t] < next[s] {
                -rd.cartan(is, it)
            } else {
                0
            }
        };
        let base: IntMatrix = order.iter().map(|&s| order[..m].iter().map(|&t| rule(s, t)).collect()).collect();
        let mut failure = None;
        for sign in [1, -1] {
            let exchange: IntMatrix = base.iter().map(|r| r.iter().map(|x| sign * x).collect()).collect();
            let pair = CompatiblePair { lambda: lambda.clone(), exchange };
            match pair.check() {
                Ok(_) => {
                    let mut seed = QuantumSeed::from_pair(pair)?;
                    seed.labels = labels;
                    seed.realizations = Some(vars);
                    seed.convention = sign;
                    return Ok(seed);
                }
                Err(e) => failure = Some(e),
            }
        }
        Err(failure.unwrap_or_else(|| Error::Internal("no exchange convention".into())))
    }

    /// `q^{(beta, beta)/4}` for the root content `beta` of a homogeneous cell element.
    fn quarter_form_factor(&self, x: &CellElement) -> Result<Scalar> {
        let wt = self.cell_weight(x)?.ok_or_else(|| Error::InvalidArgument("element is not homogeneous".into()))?;
        let rd = self.root_datum();
        let beta = rd.weight_to_root(&wt).expect("root lattice");
        Ok(Scalar::v_pow(rd.form_roots(&beta, &beta) / 2))
    }

    /// Realization of the torus monomial `X^a`, `a >= 0`.
    ///
    /// Each variable enters as `q^{-(beta,beta)/4} V`, so that the bar involution of the torus
    /// matches the dual bar involution twisted by `q^{-(wt,wt)/2}`.
    pub fn seed_monomial(&self, seed: &QuantumSeed, a: &[i64]) -> Result<CellElement> {
        let vars = seed.realizations.as_ref().ok_or_else(|| Error::InvalidArgument("seed has no realization".into()))?;
        let mut out = self.cell_scale(&self.cell_one(&vars[0].pattern), &seed.ordering_factor(a));
        for (s, &k) in a.iter().enumerate() {
            if k < 0 {
                return Err(Error::InvalidArgument("negative exponent".into()));
            }
            if k == 0 {
                continue;
            }
            let v = self.cell_scale(&vars[s], &self.quarter_form_factor(&vars[s])?.inv()?);
            for _ in 0..k {
                out = self.cell_mul(&out, &v)?;
            }
        }
        Ok(out)
    }

    /// The dual-bar-invariant normalization `Y = q^{(beta,beta)/4} X^a` of a cluster monomial.
    pub fn dual_bar_monomial(&self, seed: &QuantumSeed, a: &[i64]) -> Result<CellElement> {
        let x = self.seed_monomial(seed, a)?;
        Ok(self.cell_scale(&x, &self.quarter_form_factor(&x)?))
    }

    /// Mutation of a seed; realizations, when present, follow by solving the exchange
    /// relation in the cell algebra.
    pub fn mutate_seed(&self, seed: &QuantumSeed, k: usize) -> Result<QuantumSeed> {
        let pair = seed.pair.mutate(k)?;
        let terms = seed.exchange_numerator(k);
        let mut numerator = TorusElement::default();
        for (c, v) in &terms {
            numerator = numerator.add(&seed.monomial_expression(v).scale(c));
        }
        let expr = numerator
            .right_divide(&seed.expressions[k], &seed.initial_lambda)?
            .ok_or_else(|| Error::Internal("exchange relation is not Laurent in the initial torus".into()))?;
        let mut out = seed.clone();
        out.pair = pair;
        out.expressions[k] = expr;
        // mutation is an involution, so the prime toggles
        out.labels[k] = match seed.labels[k].strip_suffix('\'') {
            Some(base) => base.to_string(),
            None => format!("{}'", seed.labels[k]),
        };
        if let Some(vars) = &seed.realizations {
            let w = vars[k].pattern.clone();
            let mut rhs = self.cell_scale(&vars[k], &Scalar::zero());
            for (c, v) in &terms {
                rhs = self.cell_add(&rhs, &self.cell_scale(&self.seed_monomial(seed, v)?, c))?;
            }
            let rhs = self.canonicalize_cell(&rhs)?;
            if rhs.denominator.iter().any(|&x| x != 0) || vars[k].denominator.iter().any(|&x| x != 0) {
                return Err(Error::Internal("exchange relation left the closed cell".into()));
            }
            let old = self.cell_scale(&vars[k], &self.quarter_form_factor(&vars[k])?.inv()?);
            let z = self
                .class_divide(&w, &rhs.numerator, &old.numerator, false)?
                .ok_or_else(|| Error::Internal("exchange relation is not divisible by the old variable".into()))?;
            let z = CellElement { pattern: w, denominator: vec![0; self.rank()], numerator: z };
            let mut new_vars = vars.clone();
            new_vars[k] = self.cell_scale(&z, &self.quarter_form_factor(&z)?);
            out.realizations = Some(new_vars);
        }
        Ok(out)
    }

    /// Mutates along a path of exchangeable indices.
    pub fn mutate_path(&self, seed: &QuantumSeed, path: &[usize]) -> Result<QuantumSeed> {
        let mut s = seed.clone();
        for &k in path {
            s = self.mutate_seed(&s, k)?;
        }
        Ok(s)
    }

    /// Whether a cell element with trivial denominator is a dual-bar-invariant basis element.
    pub fn is_basis_cell_element(&self, x: &CellElement) -> Result<Option<CrystalLabel>> {
        if x.denominator.iter().any(|&v| v != 0) || x.numerator.terms.len() != 1 {
            return Ok(None);
        }
        let (b, c) = x.numerator.terms.iter().next().expect("one term");
        if !c.is_one() {
            return Ok(None);
        }
        let sigma = self.cell_sigma(x)?;
        Ok(self.cell_equal(&sigma, x)?.then(|| b.clone()))
    }

    /// Checks the exchange in direction `k` against the cell algebra.
    pub fn verify_exchange(&self, seed: &QuantumSeed, k: usize) -> Result<ExchangeReport> {
        let mutated = self.mutate_seed(seed, k)?;
        let vars = mutated.realizations.as_ref().ok_or_else(|| Error::InvalidArgument("seed has no realization".into()))?;
        let new_var = vars[k].clone();
        let label = self.is_basis_cell_element(&new_var)?;
        let derived = self.derive_lambda(vars)?;
        let back = self.mutate_seed(&mutated, k)?;
        let recovered = match (&back.realizations, &seed.realizations) {
            (Some(a), Some(b)) => self.cell_equal(&a[k], &b[k])?,
            _ => false,
        };
        Ok(ExchangeReport {
            index: k,
            new_variable: new_var,
            basis_label: label.clone(),
            lambda_matches: derived == mutated.pair.lambda,
            recovered,
            holds: label.is_some() && derived == mutated.pair.lambda && recovered && back.expressions == seed.expressions,
        })
    }

    /// Checks the shape of the twist image of the normalized monomial `Y_R = X^a`.
    pub fn qgls_check(&self, seed: &QuantumSeed, a: &[i64]) -> Result<TwistShapeReport> {
        self.check_simply_laced()?;
        let rd = self.root_datum();
        let y = self.dual_bar_monomial(seed, a)?;
        let w = y.pattern.clone();
        let beta = match self.cell_weight(&y)? {
            Some(wt) => rd.weight_to_root(&wt.iter().map(|v| -v).collect::<Weight>()).expect("root lattice"),
            None => return Err(Error::InvalidArgument("monomial is not homogeneous".into())),
        };
        let image = self.twist_auto(&y)?;
        let lambda = image.denominator.clone();
        // frozen variables are D_{w varpi_i, varpi_i}; find the one for each i
        let vars = seed.realizations.as_ref().expect("checked by dual_bar_monomial");
        let mut frozen_exp = vec![0; seed.pair.size()];
        for (i, &li) in lambda.iter().enumerate() {
            if li == 0 {
                continue;
            }
            let target = self.minor_class(&w, &rd.fundamental_weight(i))?;
            let pos = seed
                .frozen_range()
                .find(|&s| vars[s].numerator == target)
                .ok_or_else(|| Error::Internal(format!("no frozen variable for index {}", i + 1)))?;
            frozen_exp[pos] = li;
        }
        let frozen_monomial = self.dual_bar_monomial(seed, &frozen_exp)?;
        let rest = self.cell_mul(&frozen_monomial, &image)?;
        let expected_power = rd.form_weight_root(&lambda, &beta);
        let (power, label) = match rest.numerator.terms.iter().collect::<Vec<_>>().as_slice() {
            [(b, c)] if rest.denominator.iter().all(|&v| v == 0) => (pure_q_power(c), Some((*b).clone())),
            _ => (None, None),
        };
        let holds = match (power, &label) {
            (Some(p), Some(b)) => {
                let unit = CellElement {
                    pattern: w.clone(),
                    denominator: vec![0; self.rank()],
                    numerator: crate::cells::ClosedCellElement { pattern: w, terms: BTreeMap::from([(b.clone(), Scalar::one())]) },
                };
                p == expected_power && self.is_basis_cell_element(&unit)?.is_some()
            }
            _ => false,
        };
        Ok(TwistShapeReport { exponents: a.to_vec(), frozen_weight: lambda, q_power: power, expected_power, label, holds })
    }
}

/// `k` when `c = q^k`.
fn pure_q_power(c: &Scalar) -> Option<i64> {
    let n = c.numerator();
    (c.denominator().is_one() && n.terms().count() == 1 && n.coeff(n.low()).is_one() && n.low() % 2 == 0).then(|| n.low() / 2)
}

#[derive(Clone, Debug)]
pub struct ExchangeReport {
    pub index: usize,
    pub new_variable: CellElement,
    pub basis_label: Option<CrystalLabel>,
    pub lambda_matches: bool,
    pub recovered: bool,
    pub holds: bool,
}

#[derive(Clone, Debug)]
pub struct TwistShapeReport {
    pub exponents: Vec<i64>,
    /// Weight `lambda` of the frozen monomial divided out.
    pub frozen_weight: Weight,
    pub q_power: Option<i64>,
    pub expected_power: i64,
    pub label: Option<CrystalLabel>,
    pub holds: bool,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_by_one() -> CompatiblePair {
        CompatiblePair { lambda: vec![vec![0, -1], vec![1, 0]], exchange: vec![vec![0], vec![1]] }
    }

    #[test]
    fn torus_products() {
        let lam = vec![vec![0, -1], vec![1, 0]];
        let (f, s) = torus_mul(&[1, 0], &[0, 1], &lam);
        assert_eq!((f, s), (Scalar::v_pow(-1), vec![1, 1]));
        let (f, s) = torus_mul(&[2, -1], &[-2, 1], &lam);
        assert_eq!((f, s), (Scalar::one(), vec![0, 0]));
        let (g, _) = torus_mul(&[0, 1], &[1, 0], &lam);
        assert_eq!(f_ratio(&torus_mul(&[1, 0], &[0, 1], &lam).0, &g), Scalar::q_pow(-1));
    }

    fn f_ratio(a: &Scalar, b: &Scalar) -> Scalar {
        a.div_ref(b).unwrap()
    }

    #[test]
    fn pair_mutation() {
        let p = two_by_one();
        assert_eq!(p.check().unwrap(), vec![1]);
        let m = p.mutate(0).unwrap();
        assert_eq!(m.lambda[0][1], 1);
        assert!(m.is_compatible());
        assert_eq!(m.mutate(0).unwrap(), p);
        assert!(p.mutate(1).is_err());
    }

    #[test]
    fn seed_mutation() {
        let s = QuantumSeed::from_pair(two_by_one()).unwrap();
        let e = Engine::from_type("A1").unwrap();
        let m = e.mutate_seed(&s, 0).unwrap();
        let want = TorusElement::monomial(vec![-1, 1], Scalar::one()).add(&TorusElement::monomial(vec![-1, 0], Scalar::one()));
        assert_eq!(m.expressions[0], want);
        assert_eq!(m.expressions[1], s.expressions[1]);
        let back = e.mutate_seed(&m, 0).unwrap();
        assert_eq!(back.expressions, s.expressions);
        assert_eq!(back.pair, s.pair);
    }

    #[test]
    fn a2_initial_seed() {
        let e = Engine::from_type("A2").unwrap();
        let rd = e.root_datum().clone();
        let w0 = rd.longest_element();
        let seed = e.initial_seed(&w0, &[0, 1, 0]).unwrap();
        assert_eq!(seed.pair.size(), 3);
        assert_eq!(seed.pair.exchangeable(), 1);
        let d = seed.pair.check().unwrap();
        assert!(d.iter().all(|&x| x > 0));
        let vars = seed.realizations.as_ref().unwrap();
        let f1 = crate::uqminus::NCElement::generator(0).scale(&Scalar::one_minus_q(2));
        assert_eq!(vars[0], e.cell_from(&f1, &w0).unwrap());
        assert_eq!(vars[2].numerator, e.minor_class(&w0, &[1, 0]).unwrap());
        let report = e.verify_exchange(&seed, 0).unwrap();
        assert!(report.holds, "{report:?}");
    }

    #[test]
    fn a2_twist_shapes() {
        let e = Engine::from_type("A2").unwrap();
        let w0 = e.root_datum().longest_element();
        let seed = e.initial_seed(&w0, &[0, 1, 0]).unwrap();
        for a in [[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1]] {
            let r = e.qgls_check(&seed, &a).unwrap();
            assert!(r.holds, "{r:?}");
        }
    }

    #[test]
    fn non_simply_laced_is_gated() {
        let e = Engine::from_type("B2").unwrap();
        let w0 = e.root_datum().longest_element();
        assert!(matches!(e.initial_seed(&w0, &[0, 1, 0, 1]), Err(Error::Unsupported(_))));
    }
}
