//! The dual canonical basis via dual bar invariance and unitriangularity over the dual
//! PBW basis, together with the crystal statistics `epsilon_i`, `epsilon_i^*`.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::cache::OnceMap;
use crate::engine::Engine;
use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::pbw::pbw_norm_closed;
use crate::rootdata::{RootVector, WeylElt};
use crate::scalars::{LaurentPoly, Scalar};
use crate::uqminus::{word_content, NCElement, Side};

/// PBW parametrization `b(c, word)` of a dual canonical basis element.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CrystalLabel {
    /// Reduced word for the longest element (0-based letters).
    pub word: Vec<usize>,
    pub exponents: Vec<u32>,
}

impl CrystalLabel {
    pub fn new(word: Vec<usize>, exponents: Vec<u32>) -> Self {
        CrystalLabel { word, exponents }
    }
}

/// The dual canonical basis of one weight space along one reduced word.
pub struct DcbSpace {
    pub content: RootVector,
    pub word: Vec<usize>,
    /// Exponent vectors in increasing lexicographic order.
    pub labels: Vec<Vec<u32>>,
    /// Row `k`: coordinates of `G(labels[k])` on the dual PBW vectors.
    pub dual_pbw_coords: Matrix,
    /// `G(labels[k])`, reduced.
    pub elements: Vec<NCElement>,
    /// Rows: reduced coefficients of `F^low(labels[k])` on the basis words.
    lower_pbw: Matrix,
}

impl DcbSpace {
    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn index_of(&self, c: &[u32]) -> Option<usize> {
        self.labels.iter().position(|l| l.as_slice() == c)
    }
}

#[derive(Default)]
pub(crate) struct CanonicalCache {
    spaces: OnceMap<(Vec<usize>, RootVector), Result<Arc<DcbSpace>>>,
    epsilons: OnceMap<(CrystalLabel, usize, bool), Result<u32>>,
    demazure: OnceMap<(CrystalLabel, WeylElt), Result<bool>>,
}

/// Positive-exponent part of a Laurent polynomial in `q`.
fn positive_part(p: &LaurentPoly) -> LaurentPoly {
    LaurentPoly::from_terms(p.terms().filter(|(e, _)| *e > 0).map(|(e, c)| (e, c.clone())))
}

fn is_in_q_zq(s: &Scalar) -> bool {
    s.is_zero() || (s.is_q_laurent() && s.numerator().low() > 0)
}

impl Engine {
    /// Lexicographically least reduced word of the longest element.
    pub fn reference_word(&self) -> Vec<usize> {
        let rd = self.root_datum();
        rd.reduced_words(&rd.longest_element()).into_iter().next().unwrap_or_default()
    }

    fn check_longest_word(&self, word: &[usize]) -> Result<()> {
        let rd = self.root_datum();
        let w = rd.weyl_from_reduced_word(word)?;
        if w != rd.longest_element() {
            return Err(Error::InvalidArgument("word is not a reduced word of the longest element".into()));
        }
        Ok(())
    }

    /// Dual canonical basis of content `beta`, parametrized along `word`.
    pub fn dcb_space(&self, word: &[usize], beta: &[i64]) -> Result<Arc<DcbSpace>> {
        self.check_longest_word(word)?;
        self.check_height(beta)?;
        let key = (word.to_vec(), beta.to_vec());
        self.dcb.spaces.get_or_init(&key, || self.build_dcb_space(word, beta).map(Arc::new))
    }

    fn build_dcb_space(&self, word: &[usize], beta: &[i64]) -> Result<DcbSpace> {
        let rd = self.root_datum();
        let labels = self.pbw_exponents(word, beta);
        let n = labels.len();
        let space = self.weight_space(beta)?;
        if n != space.dim() {
            return Err(Error::Internal("PBW count differs from the weight space dimension".into()));
        }
        let lower_pbw: Matrix = labels
            .iter()
            .map(|c| -> Result<Vec<Scalar>> { self.weight_basis_coords(beta, &*self.pbw_vector(c, word)?) })
            .collect::<Result<_>>()?;
        let norms: Vec<Scalar> = labels.iter().map(|c| pbw_norm_closed(c, word, rd)).collect();
        let denominator = crate::uqminus::pairing_denominator(rd, beta);
        let mut coords: Matrix = Vec::with_capacity(n);
        for k in 0..n {
            // sigma(F^up(c_k)) on the dual PBW basis: the coefficient on F^up(c') is the pairing
            // with F^low(c').
            let fup = self.from_coords(beta, &lower_pbw[k])?.scale(&norms[k].inv()?);
            let image = self.sigma(&fup);
            let r = self.pairing_vector(beta, &image)?;
            let mut a: Vec<Scalar> = lower_pbw
                .iter()
                .map(|row| linalg::dot(&r, row).div_ref(&denominator))
                .collect::<Result<_>>()?;
            if !a[k].is_one() || a[k + 1..].iter().any(|x| !x.is_zero()) {
                return Err(Error::Internal(format!("dual bar image of F^up{:?} is not unitriangular", labels[k])));
            }
            a[k] = Scalar::zero();
            // Rewrite the lower part in terms of the elements already built.
            let mut s = vec![Scalar::zero(); n];
            for j in (0..k).rev() {
                let sj = a[j].clone();
                if sj.is_zero() {
                    continue;
                }
                for (x, g) in a.iter_mut().zip(&coords[j]) {
                    if !g.is_zero() {
                        *x = &*x - &(&sj * g);
                    }
                }
                s[j] = sj;
            }
            let mut row = vec![Scalar::zero(); n];
            row[k] = Scalar::one();
            for j in 0..k {
                if s[j].is_zero() {
                    continue;
                }
                if !s[j].is_q_laurent() || s[j].bar() != -&s[j] {
                    return Err(Error::Internal(format!(
                        "correction term {} for {:?} is not bar-antisymmetric",
                        s[j], labels[k]
                    )));
                }
                let t = Scalar::from_poly(positive_part(s[j].numerator()));
                for (x, g) in row.iter_mut().zip(&coords[j]) {
                    if !g.is_zero() {
                        *x = &*x + &(&t * g);
                    }
                }
            }
            if row.iter().enumerate().any(|(j, x)| j != k && !is_in_q_zq(x)) {
                return Err(Error::Internal(format!("triangularity fails for {:?}", labels[k])));
            }
            coords.push(row);
        }
        let mut elements = Vec::with_capacity(n);
        for row in &coords {
            let mut wc = vec![Scalar::zero(); n];
            for (j, x) in row.iter().enumerate() {
                if x.is_zero() {
                    continue;
                }
                let f = x * &norms[j].inv()?;
                for (acc, y) in wc.iter_mut().zip(&lower_pbw[j]) {
                    if !y.is_zero() {
                        *acc = &*acc + &(&f * y);
                    }
                }
            }
            elements.push(self.from_coords(beta, &wc)?);
        }
        for (g, c) in elements.iter().zip(&labels) {
            if !self.equal(&self.sigma(g), g)? {
                return Err(Error::Internal(format!("G{c:?} is not dual bar invariant")));
            }
        }
        Ok(DcbSpace { content: beta.to_vec(), word: word.to_vec(), labels, dual_pbw_coords: coords, elements, lower_pbw })
    }

    /// The dual canonical basis element `G^up(b(c, word))`.
    pub fn dual_canonical_element(&self, c: &[u32], word: &[usize]) -> Result<NCElement> {
        let beta = self.label_content(c, word)?;
        let space = self.dcb_space(word, &beta)?;
        let k = space.index_of(c).ok_or_else(|| Error::InvalidArgument("exponent vector not found".into()))?;
        Ok(space.elements[k].clone())
    }

    pub fn label_element(&self, b: &CrystalLabel) -> Result<NCElement> {
        self.dual_canonical_element(&b.exponents, &b.word)
    }

    fn label_content(&self, c: &[u32], word: &[usize]) -> Result<RootVector> {
        if c.len() != word.len() {
            return Err(Error::InvalidArgument("exponent vector and word differ in length".into()));
        }
        let roots = self.root_datum().roots_along_word(word);
        let mut beta = vec![0; self.rank()];
        for (ck, r) in c.iter().zip(&roots) {
            for (b, x) in beta.iter_mut().zip(r) {
                *b += *ck as i64 * x;
            }
        }
        Ok(beta)
    }

    /// Root content (negated weight) of a label.
    pub fn label_weight(&self, b: &CrystalLabel) -> Result<RootVector> {
        self.label_content(&b.exponents, &b.word)
    }

    /// Coordinates of `x` on the dual canonical basis along the reference word.
    pub fn dcb_expand(&self, x: &NCElement) -> Result<BTreeMap<CrystalLabel, Scalar>> {
        self.dcb_expand_along(x, &self.reference_word())
    }

    pub fn dcb_expand_along(&self, x: &NCElement, word: &[usize]) -> Result<BTreeMap<CrystalLabel, Scalar>> {
        let mut out = BTreeMap::new();
        for (beta, comp) in x.components(self.rank()) {
            let space = self.dcb_space(word, &beta)?;
            let r = self.pairing_vector(&beta, &comp)?;
            let den = crate::uqminus::pairing_denominator(self.root_datum(), &beta);
            // coefficients on the dual PBW basis
            let mut a: Vec<Scalar> =
                space.lower_pbw.iter().map(|row| linalg::dot(&r, row).div_ref(&den)).collect::<Result<_>>()?;
            for k in (0..space.dim()).rev() {
                let ck = a[k].clone();
                if ck.is_zero() {
                    continue;
                }
                for (x, g) in a.iter_mut().zip(&space.dual_pbw_coords[k]).take(k) {
                    if !g.is_zero() {
                        *x = &*x - &(&ck * g);
                    }
                }
                out.insert(CrystalLabel::new(word.to_vec(), space.labels[k].clone()), ck);
            }
        }
        Ok(out)
    }

    /// `epsilon_i` (left) or `epsilon_i^*` (right) of a basis element.
    pub fn crystal_epsilon(&self, i: usize, b: &CrystalLabel, side: Side) -> Result<u32> {
        let key = (b.clone(), i, side == Side::Left);
        self.dcb.epsilons.get_or_init(&key, || {
            let mut x = self.label_element(b)?;
            let mut k = 0;
            loop {
                x = self.q_derivation(i, &x, side);
                if x.is_empty() || self.is_zero(&x)? {
                    return Ok(k);
                }
                x = self.reduce(&x)?;
                k += 1;
            }
        })
    }

    /// Whether the label lies in the Demazure crystal of `w`: some monomial along a reduced
    /// word of `w` pairs nontrivially with the basis element.
    pub fn demazure_membership(&self, b: &CrystalLabel, w: &WeylElt) -> Result<bool> {
        self.dcb.demazure.get_or_init(&(b.clone(), w.clone()), || {
            let g = self.label_element(b)?;
            self.pairs_with_demazure_monomial(&g, w.word())
        })
    }

    /// The label whose basis element equals `g`, if any.
    pub fn label_of(&self, g: &NCElement, word: &[usize]) -> Result<Option<CrystalLabel>> {
        let Some(beta) = g.homogeneous_content(self.rank()) else { return Ok(None) };
        let space = self.dcb_space(word, &beta)?;
        for (c, e) in space.labels.iter().zip(&space.elements) {
            if self.equal(e, g)? {
                return Ok(Some(CrystalLabel::new(word.to_vec(), c.clone())));
            }
        }
        Ok(None)
    }

    /// The label of `*(G^up(b))`.
    pub fn star_label(&self, b: &CrystalLabel) -> Result<CrystalLabel> {
        let g = self.label_element(b)?.star();
        self.label_of(&g, &b.word)?.ok_or_else(|| Error::Internal("star does not permute the basis".into()))
    }

    pub(crate) fn pairs_with_demazure_monomial(&self, g: &NCElement, word: &[usize]) -> Result<bool> {
        let rank = self.rank();
        for (beta, comp) in g.components(rank) {
            for a in crate::pbw::exponents_of_weight(
                &word.iter().map(|&i| self.root_datum().simple_root(i)).collect::<Vec<_>>(),
                &beta,
            ) {
                let m: Vec<u8> = word.iter().zip(&a).flat_map(|(&i, &k)| std::iter::repeat(i as u8).take(k as usize)).collect();
                debug_assert_eq!(word_content(&m, rank), beta);
                if !self.pair(&comp, &NCElement::word(m))?.is_zero() {
                    return Ok(true);
                }
            }
        }
        Ok(false)
    }

    /// All labels of content `beta` along `word`.
    pub fn labels_of_weight(&self, word: &[usize], beta: &[i64]) -> Result<Vec<CrystalLabel>> {
        Ok(self.dcb_space(word, beta)?.labels.iter().map(|c| CrystalLabel::new(word.to_vec(), c.clone())).collect())
    }
}
