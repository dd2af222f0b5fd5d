//! Quantum closed unipotent cells, their localizations by the frozen minors, the De
//! Concini-Procesi embedding and the twist automorphism.
//!
//! A localized element is stored as `D_lambda^{-1} N` with `D_lambda = D_{w lambda, lambda}`
//! and `lambda` dominant. Every q-power below comes from two rules: `x D_mu^{-1} =
//! q^{(mu + w mu, wt x)} D_mu^{-1} x` for homogeneous `x`, and `D_mu D_lambda =
//! q^{(mu, w lambda - lambda)} D_{lambda + mu}`.

use std::collections::BTreeMap;

use serde_json::{json, Value};

use crate::cache::OnceMap;
use crate::canonical::CrystalLabel;
use crate::engine::Engine;
use crate::error::{Error, Result};
use crate::linalg;
use crate::rootdata::{RootVector, Weight, WeylElt};
use crate::scalars::Scalar;
use crate::uqminus::NCElement;

/// An element `[x]` of the quantum closed unipotent cell, on the dual canonical basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosedCellElement {
    pub pattern: WeylElt,
    pub terms: BTreeMap<CrystalLabel, Scalar>,
}

impl ClosedCellElement {
    pub fn zero(pattern: &WeylElt) -> Self {
        ClosedCellElement { pattern: pattern.clone(), terms: BTreeMap::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add(&self, o: &Self) -> Self {
        let mut terms = self.terms.clone();
        for (b, c) in &o.terms {
            let s = match terms.get(b) {
                Some(x) => x + c,
                None => c.clone(),
            };
            if s.is_zero() {
                terms.remove(b);
            } else {
                terms.insert(b.clone(), s);
            }
        }
        ClosedCellElement { pattern: self.pattern.clone(), terms }
    }

    fn scale(&self, c: &Scalar) -> Self {
        if c.is_zero() {
            return Self::zero(&self.pattern);
        }
        ClosedCellElement { pattern: self.pattern.clone(), terms: self.terms.iter().map(|(b, x)| (b.clone(), x * c)).collect() }
    }
}

/// `[D_{w lambda, lambda}]^{-1} [N]` in the localized cell.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CellElement {
    pub pattern: WeylElt,
    pub denominator: Weight,
    pub numerator: ClosedCellElement,
}

/// `D_{w lambda, lambda}^{-1} y` in the localized quantum unipotent subgroup.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalizedSubgroupElement {
    pub pattern: WeylElt,
    pub denominator: Weight,
    pub numerator: NCElement,
}

/// Outcome of iterating the twist automorphism.
#[derive(Clone, Debug)]
pub struct PeriodReport {
    pub iterations: u32,
    pub image: CellElement,
    pub expected: CellElement,
    pub holds: bool,
}

#[derive(Default)]
pub(crate) struct CellCache {
    minors: OnceMap<(WeylElt, Weight), Result<NCElement>>,
    minor_classes: OnceMap<(WeylElt, Weight), Result<ClosedCellElement>>,
    twists: OnceMap<(WeylElt, CrystalLabel), Result<LocalizedSubgroupElement>>,
    twisted_classes: OnceMap<(WeylElt, CrystalLabel), Result<CellElement>>,
    twisted_terms: OnceMap<(WeylElt, Weight, CrystalLabel), Result<CellElement>>,
}

/// Numerators the localization formulas can work with.
trait Numerator: Clone {
    fn zero_of(w: &WeylElt) -> Self;
    fn sum(&self, o: &Self) -> Self;
    fn times(&self, c: &Scalar) -> Self;
    fn parts(&self, e: &Engine) -> Result<Vec<(RootVector, Self)>>;
    fn product(e: &Engine, w: &WeylElt, a: &Self, b: &Self) -> Result<Self>;
    fn minor(e: &Engine, w: &WeylElt, lambda: &[i64]) -> Result<Self>;
}

impl Numerator for ClosedCellElement {
    fn zero_of(w: &WeylElt) -> Self {
        Self::zero(w)
    }

    fn sum(&self, o: &Self) -> Self {
        self.add(o)
    }

    fn times(&self, c: &Scalar) -> Self {
        self.scale(c)
    }

    fn parts(&self, e: &Engine) -> Result<Vec<(RootVector, Self)>> {
        let mut out: BTreeMap<RootVector, Self> = BTreeMap::new();
        for (b, c) in &self.terms {
            out.entry(e.label_weight(b)?).or_insert_with(|| Self::zero(&self.pattern)).terms.insert(b.clone(), c.clone());
        }
        Ok(out.into_iter().collect())
    }

    fn product(e: &Engine, w: &WeylElt, a: &Self, b: &Self) -> Result<Self> {
        e.class_mul(w, a, b)
    }

    fn minor(e: &Engine, w: &WeylElt, lambda: &[i64]) -> Result<Self> {
        e.minor_class(w, lambda)
    }
}

impl Numerator for NCElement {
    fn zero_of(_: &WeylElt) -> Self {
        NCElement::zero()
    }

    fn sum(&self, o: &Self) -> Self {
        self + o
    }

    fn times(&self, c: &Scalar) -> Self {
        self.scale(c)
    }

    fn parts(&self, e: &Engine) -> Result<Vec<(RootVector, Self)>> {
        Ok(self.components(e.rank()).into_iter().collect())
    }

    fn product(e: &Engine, _: &WeylElt, a: &Self, b: &Self) -> Result<Self> {
        e.reduce(&(a * b))
    }

    fn minor(e: &Engine, w: &WeylElt, lambda: &[i64]) -> Result<Self> {
        e.frozen_minor(w, lambda)
    }
}

fn add_weights(a: &[i64], b: &[i64]) -> Weight {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn sub_weights(a: &[i64], b: &[i64]) -> Weight {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

impl Engine {
    /// `w lambda - lambda` in root coordinates.
    fn weyl_shift(&self, w: &WeylElt, lambda: &[i64]) -> RootVector {
        let rd = self.root_datum();
        rd.weight_to_root(&sub_weights(&rd.act(w, lambda), lambda)).expect("w lambda - lambda lies in the root lattice")
    }

    /// `(lambda, w mu - mu)`.
    fn shift_pairing(&self, w: &WeylElt, lambda: &[i64], mu: &[i64]) -> i64 {
        self.root_datum().form_weight_root(lambda, &self.weyl_shift(w, mu))
    }

    /// `(mu + w mu, wt x)` for `x` of root content `beta`.
    fn commutation_exponent(&self, w: &WeylElt, mu: &[i64], beta: &[i64]) -> i64 {
        let rd = self.root_datum();
        let s = add_weights(mu, &rd.act(w, mu));
        -rd.form_weight_root(&s, beta)
    }

    /// The minor `D_{w lambda, lambda}` as an element of `U_q^-`.
    pub fn frozen_minor(&self, w: &WeylElt, lambda: &[i64]) -> Result<NCElement> {
        self.cells.minors.get_or_init(&(w.clone(), lambda.to_vec()), || {
            let d = self.quantum_minor(w, &WeylElt::identity(), lambda)?;
            self.reduce(&d)
        })
    }

    /// The class `[D_{w lambda, lambda}]`.
    pub fn minor_class(&self, w: &WeylElt, lambda: &[i64]) -> Result<ClosedCellElement> {
        self.cells.minor_classes.get_or_init(&(w.clone(), lambda.to_vec()), || {
            let d = self.frozen_minor(w, lambda)?;
            self.project_closed(&d, w)
        })
    }

    /// The class `[x]` in the closed cell of `w`.
    pub fn project_closed(&self, x: &NCElement, w: &WeylElt) -> Result<ClosedCellElement> {
        let mut terms = BTreeMap::new();
        for (b, c) in self.dcb_expand(x)? {
            if self.demazure_membership(&b, w)? {
                terms.insert(b, c);
            }
        }
        Ok(ClosedCellElement { pattern: w.clone(), terms })
    }

    /// A representative of a class in `U_q^-`.
    pub fn class_element(&self, x: &ClosedCellElement) -> Result<NCElement> {
        let mut out = NCElement::zero();
        for (b, c) in &x.terms {
            out = &out + &self.label_element(b)?.scale(c);
        }
        Ok(out)
    }

    pub fn class_mul(&self, w: &WeylElt, a: &ClosedCellElement, b: &ClosedCellElement) -> Result<ClosedCellElement> {
        if a.is_zero() || b.is_zero() {
            return Ok(ClosedCellElement::zero(w));
        }
        let x = &self.class_element(a)? * &self.class_element(b)?;
        self.project_closed(&x, w)
    }

    fn local_raise<N: Numerator>(&self, w: &WeylElt, lambda: &[i64], n: &N, nu: &[i64]) -> Result<(Weight, N)> {
        if nu.iter().all(|&x| x == 0) {
            return Ok((lambda.to_vec(), n.clone()));
        }
        let f = Scalar::q_pow(-self.shift_pairing(w, nu, lambda));
        let d = N::minor(self, w, nu)?;
        Ok((add_weights(lambda, nu), N::product(self, w, &d, n)?.times(&f)))
    }

    fn local_add<N: Numerator>(&self, w: &WeylElt, x: (&[i64], &N), y: (&[i64], &N)) -> Result<(Weight, N)> {
        let top: Weight = x.0.iter().zip(y.0).map(|(a, b)| *a.max(b)).collect();
        let (_, xn) = self.local_raise(w, x.0, x.1, &sub_weights(&top, x.0))?;
        let (_, yn) = self.local_raise(w, y.0, y.1, &sub_weights(&top, y.0))?;
        Ok((top, xn.sum(&yn)))
    }

    fn local_mul<N: Numerator>(&self, w: &WeylElt, x: (&[i64], &N), y: (&[i64], &N)) -> Result<(Weight, N)> {
        let (lambda, mu) = (x.0, y.0);
        let base = -self.shift_pairing(w, mu, lambda);
        let mut out = N::zero_of(w);
        for (beta, part) in x.1.parts(self)? {
            let f = Scalar::q_pow(base + self.commutation_exponent(w, mu, &beta));
            out = out.sum(&N::product(self, w, &part, y.1)?.times(&f));
        }
        Ok((add_weights(lambda, mu), out))
    }

    fn check_pattern(&self, a: &WeylElt, b: &WeylElt) -> Result<()> {
        if a != b {
            return Err(Error::InvalidArgument("elements of different cells".into()));
        }
        Ok(())
    }

    pub fn cell_one(&self, w: &WeylElt) -> CellElement {
        let one = CrystalLabel::new(self.reference_word(), vec![0; self.root_datum().longest_element().length()]);
        let numerator = ClosedCellElement { pattern: w.clone(), terms: BTreeMap::from([(one, Scalar::one())]) };
        CellElement { pattern: w.clone(), denominator: vec![0; self.rank()], numerator }
    }

    /// `[x]` as a cell element with trivial denominator.
    pub fn cell_from(&self, x: &NCElement, w: &WeylElt) -> Result<CellElement> {
        Ok(CellElement { pattern: w.clone(), denominator: vec![0; self.rank()], numerator: self.project_closed(x, w)? })
    }

    pub fn cell_scale(&self, x: &CellElement, c: &Scalar) -> CellElement {
        CellElement { numerator: x.numerator.scale(c), ..x.clone() }
    }

    pub fn cell_add(&self, x: &CellElement, y: &CellElement) -> Result<CellElement> {
        self.check_pattern(&x.pattern, &y.pattern)?;
        let (denominator, numerator) =
            self.local_add(&x.pattern, (&x.denominator, &x.numerator), (&y.denominator, &y.numerator))?;
        Ok(CellElement { pattern: x.pattern.clone(), denominator, numerator })
    }

    pub fn cell_sub(&self, x: &CellElement, y: &CellElement) -> Result<CellElement> {
        self.cell_add(x, &self.cell_scale(y, &Scalar::from_int(-1)))
    }

    pub fn cell_mul(&self, x: &CellElement, y: &CellElement) -> Result<CellElement> {
        self.check_pattern(&x.pattern, &y.pattern)?;
        let (denominator, numerator) =
            self.local_mul(&x.pattern, (&x.denominator, &x.numerator), (&y.denominator, &y.numerator))?;
        self.canonicalize_cell(&CellElement { pattern: x.pattern.clone(), denominator, numerator })
    }

    pub fn cell_equal(&self, x: &CellElement, y: &CellElement) -> Result<bool> {
        Ok(self.cell_sub(x, y)?.numerator.is_zero())
    }

    /// Weight of a homogeneous cell element.
    pub fn cell_weight(&self, x: &CellElement) -> Result<Option<Weight>> {
        let parts = x.numerator.parts(self)?;
        if parts.len() != 1 {
            return Ok(None);
        }
        let rd = self.root_datum();
        let beta: RootVector = parts[0].0.iter().zip(self.weyl_shift(&x.pattern, &x.denominator)).map(|(b, s)| b + s).collect();
        Ok(Some(rd.root_to_weight(&beta).iter().map(|v| -v).collect()))
    }

    /// `D_{w, lambda}` for an arbitrary weight `lambda`.
    pub fn frozen(&self, w: &WeylElt, lambda: &[i64]) -> Result<CellElement> {
        let low: Weight = lambda.iter().map(|&x| (-x).max(0)).collect();
        let high: Weight = lambda.iter().map(|&x| x.max(0)).collect();
        self.frozen_split(w, &low, &high)
    }

    /// `q^{(low, w lambda - lambda)} D_{w low, low}^{-1} D_{w high, high}` with `lambda = high - low`.
    pub fn frozen_split(&self, w: &WeylElt, low: &[i64], high: &[i64]) -> Result<CellElement> {
        let lambda = sub_weights(high, low);
        let f = Scalar::q_pow(self.shift_pairing(w, low, &lambda));
        let numerator = self.minor_class(w, high)?.scale(&f);
        Ok(CellElement { pattern: w.clone(), denominator: low.to_vec(), numerator })
    }

    /// Exponent `e` of the localized basis element `q^e [D_{w lambda, lambda}]^{-1} [G^up(b)]`,
    /// `e = (lambda, wt b + lambda - w lambda)`.
    fn localized_exponent(&self, w: &WeylElt, lambda: &[i64], beta: &[i64]) -> i64 {
        -self.root_datum().form_weight_root(lambda, beta) - self.shift_pairing(w, lambda, lambda)
    }

    /// The localized dual canonical basis element attached to `lambda` and `b`.
    pub fn localized_basis_element(&self, w: &WeylElt, lambda: &[i64], b: &CrystalLabel) -> Result<CellElement> {
        if !self.root_datum().is_dominant(lambda) {
            return Err(Error::InvalidArgument("lambda must be dominant".into()));
        }
        if !self.demazure_membership(b, w)? {
            return Err(Error::InvalidArgument("label is not in the Demazure crystal".into()));
        }
        let f = Scalar::q_pow(self.localized_exponent(w, lambda, &self.label_weight(b)?));
        let numerator = ClosedCellElement { pattern: w.clone(), terms: BTreeMap::from([(b.clone(), f)]) };
        Ok(CellElement { pattern: w.clone(), denominator: lambda.to_vec(), numerator })
    }

    /// `(lambda, b)` when `x` is a localized dual canonical basis element.
    pub fn localized_basis_label(&self, x: &CellElement) -> Result<Option<(Weight, CrystalLabel)>> {
        let x = self.canonicalize_cell(x)?;
        let [(b, c)] = x.numerator.terms.iter().collect::<Vec<_>>()[..] else { return Ok(None) };
        let want = Scalar::q_pow(self.localized_exponent(&x.pattern, &x.denominator, &self.label_weight(b)?));
        Ok((*c == want).then(|| (x.denominator.clone(), b.clone())))
    }

    /// Solves `d y = n` (`d_left`) or `y d = n` in the closed cell; `d` homogeneous.
    pub fn class_divide(
        &self,
        w: &WeylElt,
        n: &ClosedCellElement,
        d: &ClosedCellElement,
        d_left: bool,
    ) -> Result<Option<ClosedCellElement>> {
        let dparts = d.parts(self)?;
        let [(gamma, _)] = dparts.as_slice() else {
            return Err(Error::InvalidArgument("divisor must be homogeneous and nonzero".into()));
        };
        let word = self.reference_word();
        let mut out = ClosedCellElement::zero(w);
        for (beta, part) in n.parts(self)? {
            let rest: RootVector = beta.iter().zip(gamma).map(|(b, g)| b - g).collect();
            if rest.iter().any(|&x| x < 0) {
                return Ok(None);
            }
            let mut cols = Vec::new();
            let mut unknowns = Vec::new();
            for b in self.labels_of_weight(&word, &rest)? {
                if self.demazure_membership(&b, w)? {
                    let one = ClosedCellElement { pattern: w.clone(), terms: BTreeMap::from([(b.clone(), Scalar::one())]) };
                    cols.push(if d_left { self.class_mul(w, d, &one)? } else { self.class_mul(w, &one, d)? });
                    unknowns.push(b);
                }
            }
            let mut rows: Vec<CrystalLabel> = part.terms.keys().cloned().collect();
            for c in &cols {
                rows.extend(c.terms.keys().cloned());
            }
            rows.sort();
            rows.dedup();
            let a: linalg::Matrix = rows
                .iter()
                .map(|r| cols.iter().map(|c| c.terms.get(r).cloned().unwrap_or_else(Scalar::zero)).collect())
                .collect();
            let rhs: Vec<Scalar> = rows.iter().map(|r| part.terms.get(r).cloned().unwrap_or_else(Scalar::zero)).collect();
            let Some(y) = linalg::solve(&a, &rhs)? else { return Ok(None) };
            for (b, c) in unknowns.into_iter().zip(y) {
                if !c.is_zero() {
                    out.terms.insert(b, c);
                }
            }
        }
        Ok(Some(out))
    }

    /// Lowers the denominator while the numerator stays divisible by the frozen minors.
    pub fn canonicalize_cell(&self, x: &CellElement) -> Result<CellElement> {
        let w = &x.pattern;
        if x.numerator.is_zero() {
            return Ok(CellElement { pattern: w.clone(), denominator: vec![0; self.rank()], numerator: x.numerator.clone() });
        }
        let mut cur = x.clone();
        loop {
            let mut changed = false;
            for i in 0..self.rank() {
                if cur.denominator[i] == 0 {
                    continue;
                }
                let fw = self.root_datum().fundamental_weight(i);
                let d = self.minor_class(w, &fw)?;
                let Some(y) = self.class_divide(w, &cur.numerator, &d, true)? else { continue };
                let mut lower = cur.denominator.clone();
                lower[i] -= 1;
                let f = Scalar::q_pow(self.shift_pairing(w, &fw, &lower));
                cur = CellElement { pattern: w.clone(), denominator: lower, numerator: y.scale(&f) };
                changed = true;
            }
            if !changed {
                return Ok(cur);
            }
        }
    }

    /// The dual bar involution extended to the localized cell.
    pub fn cell_sigma(&self, x: &CellElement) -> Result<CellElement> {
        let w = &x.pattern;
        let rd = self.root_datum();
        let shift = self.weyl_shift(w, &x.denominator);
        let self_term = rd.form_roots(&shift, &shift);
        let mut numerator = ClosedCellElement::zero(w);
        for (beta, part) in x.numerator.parts(self)? {
            let e = self_term + rd.form_roots(&shift, &beta) + self.commutation_exponent(w, &x.denominator, &beta);
            let f = Scalar::q_pow(e);
            for (b, c) in part.terms {
                numerator.terms.insert(b, &c.bar() * &f);
            }
        }
        Ok(CellElement { pattern: w.clone(), denominator: x.denominator.clone(), numerator })
    }

    /// Whether `y` lies in the quantum unipotent subgroup `*(U_q^-(w))`.
    pub fn in_unipotent_subgroup(&self, y: &NCElement, w: &WeylElt) -> Result<bool> {
        Ok(self.pbw_expand(&y.star(), w.word())?.residual.is_empty())
    }

    /// `De Concini-Procesi` embedding into the localized cell.
    pub fn dcp_embed(&self, x: &LocalizedSubgroupElement) -> Result<CellElement> {
        let numerator = self.project_closed(&x.numerator, &x.pattern)?;
        self.canonicalize_cell(&CellElement { pattern: x.pattern.clone(), denominator: x.denominator.clone(), numerator })
    }

    /// Image of one basis class under the twist isomorphism.
    fn twist_label(&self, w: &WeylElt, b: &CrystalLabel) -> Result<LocalizedSubgroupElement> {
        self.cells.twists.get_or_init(&(w.clone(), b.clone()), || {
            let (lambda, u) = self.vector_from_dcb(b)?;
            let beta = self.label_weight(b)?;
            let d = self.matrix_coefficient(&self.extremal_vector(w, &lambda)?, &u)?;
            let f = Scalar::q_pow(self.root_datum().form_weight_root(&lambda, &beta));
            Ok(LocalizedSubgroupElement { pattern: w.clone(), denominator: lambda, numerator: self.reduce(&d.scale(&f))? })
        })
    }

    /// The twist isomorphism from the localized cell to the localized unipotent subgroup.
    pub fn twist_iso(&self, x: &CellElement) -> Result<LocalizedSubgroupElement> {
        let w = &x.pattern;
        let zero = vec![0; self.rank()];
        let mut acc = (zero.clone(), NCElement::zero());
        for (b, c) in &x.numerator.terms {
            let t = self.twist_label(w, b)?;
            acc = self.local_add(w, (&acc.0, &acc.1), (&t.denominator, &t.numerator.scale(c)))?;
        }
        let f = Scalar::q_pow(self.shift_pairing(w, &x.denominator, &x.denominator));
        let front = self.frozen_minor(w, &x.denominator)?.scale(&f);
        let (denominator, numerator) = self.local_mul(w, (&zero, &front), (&acc.0, &acc.1))?;
        Ok(LocalizedSubgroupElement { pattern: w.clone(), denominator, numerator })
    }

    /// `eta([G^up(b)])`.
    fn twist_class(&self, w: &WeylElt, b: &CrystalLabel) -> Result<CellElement> {
        self.cells.twisted_classes.get_or_init(&(w.clone(), b.clone()), || self.dcp_embed(&self.twist_label(w, b)?))
    }

    /// `eta(D_lambda^{-1} [G(b)])`, cached per term.
    fn twist_term(&self, w: &WeylElt, lambda: &[i64], b: &CrystalLabel) -> Result<CellElement> {
        self.cells.twisted_terms.get_or_init(&(w.clone(), lambda.to_vec(), b.clone()), || {
            let class = self.twist_class(w, b)?;
            if lambda.iter().all(|&v| v == 0) {
                return Ok(class);
            }
            let f = Scalar::q_pow(self.shift_pairing(w, lambda, lambda));
            let front = CellElement {
                pattern: w.clone(),
                denominator: vec![0; self.rank()],
                numerator: self.minor_class(w, lambda)?.scale(&f),
            };
            self.cell_mul(&front, &class)
        })
    }

    /// The twist automorphism of the localized cell, evaluated multiplicatively:
    /// `eta(D_lambda^{-1} N) = q^{(lambda, w lambda - lambda)} [D_lambda] eta(N)`.
    pub fn twist_auto(&self, x: &CellElement) -> Result<CellElement> {
        let w = &x.pattern;
        let mut acc = self.cell_scale(&self.cell_one(w), &Scalar::zero());
        for (b, c) in &x.numerator.terms {
            acc = self.cell_add(&acc, &self.cell_scale(&self.twist_term(w, &x.denominator, b)?, c))?;
        }
        self.canonicalize_cell(&acc)
    }

    /// Iterates the twist automorphism of the longest-element cell and compares with the
    /// expected closed form.
    pub fn periodicity_check(&self, x: &CellElement, n: u32) -> Result<PeriodReport> {
        let rd = self.root_datum();
        let w0 = rd.longest_element();
        if x.pattern != w0 {
            return Err(Error::InvalidArgument("periodicity needs the longest element".into()));
        }
        let wt = self.cell_weight(x)?.ok_or_else(|| Error::InvalidArgument("element is not homogeneous".into()))?;
        let mut image = x.clone();
        for _ in 0..n {
            image = self.twist_auto(&image)?;
        }
        let expected = if n == 6 {
            let s = add_weights(&wt, &rd.act(&w0, &wt));
            let e = rd.form_weights(&s, &wt);
            if !e.is_integer() {
                return Err(Error::Internal("non-integral period exponent".into()));
            }
            let d = self.frozen(&w0, &s.iter().map(|v| -v).collect::<Weight>())?;
            self.cell_scale(&self.cell_mul(&d, x)?, &Scalar::q_pow(e.to_integer()))
        } else {
            x.clone()
        };
        let holds = self.cell_equal(&image, &expected)?;
        Ok(PeriodReport { iterations: n, image, expected, holds })
    }

    /// JSON form: pattern word and labels are 1-based.
    pub fn cell_to_json(&self, x: &CellElement) -> Value {
        let terms: Vec<Value> = x
            .numerator
            .terms
            .iter()
            .map(|(b, c)| json!({ "label": b.exponents, "coeff": c.to_string() }))
            .collect();
        json!({
            "pattern": x.pattern.word().iter().map(|i| i + 1).collect::<Vec<_>>(),
            "reference_word": self.reference_word().iter().map(|i| i + 1).collect::<Vec<_>>(),
            "denominator": x.denominator,
            "terms": terms,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(x: &str) -> Scalar {
        Scalar::parse(x).unwrap()
    }

    #[test]
    fn projection_examples() {
        let e = Engine::from_type("A2").unwrap();
        let rd = e.root_datum().clone();
        let s1 = rd.simple_reflection(0);
        assert!(e.project_closed(&NCElement::generator(1), &s1).unwrap().is_zero());
        assert!(!e.project_closed(&NCElement::generator(0), &s1).unwrap().is_zero());
        let x = &NCElement::word(vec![0, 1]) + &NCElement::generator(1);
        let full = e.project_closed(&x, &rd.longest_element()).unwrap();
        assert_eq!(full.terms.len(), e.dcb_expand(&x).unwrap().len());
    }

    #[test]
    fn frozen_elements() {
        let e = Engine::from_type("A2").unwrap();
        let rd = e.root_datum().clone();
        let w0 = rd.longest_element();
        assert!(e.cell_equal(&e.frozen(&w0, &[0, 0]).unwrap(), &e.cell_one(&w0)).unwrap());
        for lam in [[1, 0], [1, -1], [-1, 2]] {
            let d = e.frozen(&w0, &lam).unwrap();
            let neg: Weight = lam.iter().map(|x| -x).collect();
            let dn = e.frozen(&w0, &neg).unwrap();
            // D_{w,lambda}^{-1} = q^{(lambda, w lambda - lambda)} D_{w,-lambda}
            let f = Scalar::q_pow(e.shift_pairing(&w0, &lam, &lam));
            let prod = e.cell_mul(&d, &e.cell_scale(&dn, &f)).unwrap();
            assert!(e.cell_equal(&prod, &e.cell_one(&w0)).unwrap(), "{lam:?}");
            let low: Weight = lam.iter().map(|&x| (-x).max(0) + 1).collect();
            let high: Weight = lam.iter().map(|&x| x.max(0) + 1).collect();
            assert!(e.cell_equal(&e.frozen_split(&w0, &low, &high).unwrap(), &d).unwrap());
        }
    }

    #[test]
    fn q_central_frozen_minors() {
        let e = Engine::from_type("A2").unwrap();
        let rd = e.root_datum().clone();
        let w0 = rd.longest_element();
        let d = e.frozen(&w0, &[1, 0]).unwrap();
        let g = e.cell_from(&NCElement::generator(1), &w0).unwrap();
        let lhs = e.cell_mul(&d, &g).unwrap();
        let rhs = e.cell_mul(&g, &d).unwrap();
        let lam = vec![1, 0];
        let ex = e.commutation_exponent(&w0, &lam, &[0, 1]);
        assert!(e.cell_equal(&lhs, &e.cell_scale(&rhs, &Scalar::q_pow(ex))).unwrap());
        // A1: the frozen minor commutes with f
        let a1 = Engine::from_type("A1").unwrap();
        let w = a1.root_datum().longest_element();
        let d = a1.frozen(&w, &[1]).unwrap();
        let f = a1.cell_from(&NCElement::generator(0), &w).unwrap();
        assert!(a1.cell_equal(&a1.cell_mul(&d, &f).unwrap(), &a1.cell_mul(&f, &d).unwrap()).unwrap());
    }

    #[test]
    fn products_reassociate() {
        let e = Engine::from_type("A2").unwrap();
        let w0 = e.root_datum().longest_element();
        let a = e.cell_mul(&e.frozen(&w0, &[-1, 0]).unwrap(), &e.cell_from(&NCElement::generator(1), &w0).unwrap()).unwrap();
        let b = e.cell_mul(&e.frozen(&w0, &[0, -1]).unwrap(), &e.cell_from(&NCElement::generator(0), &w0).unwrap()).unwrap();
        let c = e.frozen(&w0, &[1, -1]).unwrap();
        let left = e.cell_mul(&e.cell_mul(&a, &b).unwrap(), &c).unwrap();
        let right = e.cell_mul(&a, &e.cell_mul(&b, &c).unwrap()).unwrap();
        assert!(e.cell_equal(&left, &right).unwrap());
    }

    #[test]
    fn canonical_forms() {
        let e = Engine::from_type("A2").unwrap();
        let w0 = e.root_datum().longest_element();
        let g = e.cell_from(&NCElement::generator(1), &w0).unwrap();
        let d = e.frozen(&w0, &[1, 0]).unwrap();
        let x = e.cell_mul(&e.frozen(&w0, &[-1, 0]).unwrap(), &e.cell_mul(&d, &g).unwrap()).unwrap();
        // D_{w,-varpi_1} D_{w,varpi_1} = q^{-(varpi_1, w varpi_1 - varpi_1)} = q
        assert_eq!(x.denominator, vec![0, 0]);
        assert_eq!(x, e.cell_scale(&g, &s("q")));
        let zero = e.cell_scale(&d, &Scalar::zero());
        assert_eq!(e.canonicalize_cell(&zero).unwrap().denominator, vec![0, 0]);
    }

    #[test]
    fn twist_examples() {
        let e = Engine::from_type("A1").unwrap();
        let w0 = e.root_datum().longest_element();
        let one = e.cell_one(&w0);
        assert!(e.cell_equal(&e.twist_auto(&one).unwrap(), &one).unwrap());
        let d = e.frozen(&w0, &[1]).unwrap();
        let image = e.twist_auto(&d).unwrap();
        let inv = CellElement { pattern: w0.clone(), denominator: vec![1], numerator: e.cell_one(&w0).numerator };
        assert!(e.cell_equal(&image, &e.cell_scale(&inv, &s("q"))).unwrap());
        assert!(e.cell_equal(&image, &e.frozen(&w0, &[-1]).unwrap()).unwrap());
        let iso = e.twist_iso(&inv).unwrap();
        assert_eq!(iso.denominator, vec![0]);
        assert!(e.equal(&iso.numerator, &e.frozen_minor(&w0, &[1]).unwrap().scale(&s("q^-1"))).unwrap());
    }

    #[test]
    fn twist_of_frozen_is_frozen_of_negative() {
        let e = Engine::from_type("A2").unwrap();
        let w0 = e.root_datum().longest_element();
        for lam in [[1, 0], [0, 1], [1, -1]] {
            let d = e.frozen(&w0, &lam).unwrap();
            let neg: Weight = lam.iter().map(|x| -x).collect();
            assert!(e.cell_equal(&e.twist_auto(&d).unwrap(), &e.frozen(&w0, &neg).unwrap()).unwrap(), "{lam:?}");
        }
    }

    #[test]
    fn a1_period_two() {
        let e = Engine::from_type("A1").unwrap();
        let w0 = e.root_datum().longest_element();
        let d = e.frozen(&w0, &[1]).unwrap();
        assert!(e.periodicity_check(&d, 2).unwrap().holds);
        let f = e.cell_from(&NCElement::generator(0), &w0).unwrap();
        assert!(e.periodicity_check(&f, 6).unwrap().holds);
    }
}
