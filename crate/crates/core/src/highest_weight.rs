//! Integrable highest-weight modules `V(lambda)`, their contravariant form, extremal vectors
//! and unipotent quantum matrix coefficients.
//!
//! A vector of `V(lambda)` is stored as coordinates on monomial classes `b . u_lambda`, where
//! the words `b` are chosen so that their classes form a basis of the weight space.

use std::sync::Arc;

use crate::cache::OnceMap;
use crate::canonical::CrystalLabel;
use crate::engine::Engine;
use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::rootdata::{RootDatum, RootVector, Weight, WeylElt};
use crate::scalars::{LaurentPoly, Scalar};
use crate::uqminus::{
    letter_masks, polynomial_inverse, select_independent, subset_column, subset_recursion, word_content, words_of_content, DpValue,
    Factor, IntPoly, ModVal, NCElement, Side, Word,
};

/// Step multiplier of the contravariant-form recursion against the word `b`.
fn module_factor<'a>(rd: &'a RootDatum, lambda: &'a [i64], b: &'a [u8]) -> impl Fn(u32, usize) -> Factor + 'a {
    let masks = letter_masks(b, rd.rank());
    move |mask: u32, p: usize| {
        let i = b[p] as usize;
        let above = mask & !((2u32 << p) - 1);
        // <h_i, lambda - sum of the letters still to the right of p>
        let n = lambda[i]
            - masks.iter().enumerate().map(|(j, &m)| rd.cartan(i, j) * (above & m).count_ones() as i64).sum::<i64>();
        Factor::QInt(n, rd.sym(i))
    }
}

/// Contravariant form of two monomial classes `(a . u_lambda, b . u_lambda)`.
pub(crate) fn module_form_words<T: DpValue>(rd: &RootDatum, lambda: &[i64], a: &[u8], b: &[u8]) -> T {
    subset_recursion(a, b, &module_factor(rd, lambda, b))
}

/// One weight space of `V(lambda)`.
pub struct ModuleSpace {
    pub lambda: Weight,
    /// `lambda` minus the weight of the space.
    pub content: RootVector,
    pub basis: Vec<Word>,
    gram: Vec<Vec<LaurentPoly>>,
    adj: Vec<Vec<LaurentPoly>>,
    det: LaurentPoly,
    pairings: OnceMap<Word, Arc<Vec<LaurentPoly>>>,
}

impl ModuleSpace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Gram matrix of the contravariant form on the basis.
    pub fn gram(&self) -> Matrix {
        self.gram.iter().map(|r| r.iter().cloned().map(Scalar::from_poly).collect()).collect()
    }
}

/// A weight vector of `V(lambda)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModuleVector {
    pub lambda: Weight,
    pub content: RootVector,
    /// Coordinates on the basis words of the weight space.
    pub coords: Vec<Scalar>,
}

impl ModuleVector {
    pub fn weight(&self, rd: &RootDatum) -> Weight {
        let b = rd.root_to_weight(&self.content);
        self.lambda.iter().zip(&b).map(|(l, x)| l - x).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Scalar::is_zero)
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        ModuleVector { coords: self.coords.iter().map(|x| x * c).collect(), ..self.clone() }
    }
}

/// Generators acting on `V(lambda)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ModuleGenerator {
    F(usize),
    E(usize),
    /// `K_beta` for a root-lattice vector `beta`.
    Torus(RootVector),
}

#[derive(Default)]
pub(crate) struct ModuleCache {
    spaces: OnceMap<(Weight, RootVector), Result<Arc<ModuleSpace>>>,
}

impl Engine {
    fn check_dominant(&self, lambda: &[i64]) -> Result<()> {
        if lambda.len() != self.rank() || !self.root_datum().is_dominant(lambda) {
            return Err(Error::InvalidArgument(format!("{lambda:?} is not a dominant weight")));
        }
        Ok(())
    }

    /// The weight space of `V(lambda)` of weight `lambda - beta`.
    pub fn module_space(&self, lambda: &[i64], beta: &[i64]) -> Result<Arc<ModuleSpace>> {
        self.check_dominant(lambda)?;
        if beta.len() != self.rank() {
            return Err(Error::InvalidArgument("content has the wrong rank".into()));
        }
        if beta.iter().all(|&b| b >= 0) {
            self.check_height(beta)?;
        }
        let key = (lambda.to_vec(), beta.to_vec());
        self.hw.spaces.get_or_init(&key, || self.build_module_space(lambda, beta).map(Arc::new))
    }

    fn build_module_space(&self, lambda: &[i64], beta: &[i64]) -> Result<ModuleSpace> {
        let rd = self.root_datum();
        let empty = || ModuleSpace {
            lambda: lambda.to_vec(),
            content: beta.to_vec(),
            basis: Vec::new(),
            gram: Vec::new(),
            adj: Vec::new(),
            det: LaurentPoly::one(),
            pairings: OnceMap::default(),
        };
        if beta.iter().any(|&b| b < 0) {
            return Ok(empty());
        }
        let mu: Weight = lambda.iter().zip(rd.root_to_weight(beta)).map(|(l, b)| l - b).collect();
        let dim = rd.weight_multiplicity(lambda, &mu) as usize;
        if dim == 0 {
            return Ok(empty());
        }
        let words = words_of_content(beta);
        let basis = select_independent(&words, dim, &|p| subset_column::<ModVal>(p, rd.rank(), &module_factor(rd, lambda, p)))?;
        let gram: Vec<Vec<LaurentPoly>> = basis
            .iter()
            .map(|a| basis.iter().map(|b| module_form_words::<IntPoly>(rd, lambda, a, b).to_laurent()).collect())
            .collect();
        let (adj, det) = polynomial_inverse(&gram)?;
        Ok(ModuleSpace { lambda: lambda.to_vec(), content: beta.to_vec(), basis, gram, adj, det, pairings: OnceMap::default() })
    }

    /// Basis of `V(lambda)_mu`.
    pub fn weight_basis_module(&self, lambda: &[i64], mu: &[i64]) -> Result<Arc<ModuleSpace>> {
        self.check_dominant(lambda)?;
        let diff: Weight = lambda.iter().zip(mu).map(|(l, m)| l - m).collect();
        let beta = self
            .root_datum()
            .weight_to_root(&diff)
            .ok_or_else(|| Error::InvalidArgument("weight is not in the root lattice of lambda".into()))?;
        self.module_space(lambda, &beta)
    }

    /// Forms `(b . u_lambda, w . u_lambda)` for every basis word `b` of the space of `w`.
    fn module_word_pairings(&self, space: &ModuleSpace, w: &[u8]) -> Arc<Vec<LaurentPoly>> {
        let rd = self.root_datum();
        space.pairings.get_or_init(&w.to_vec(), || {
            Arc::new(
                space.basis.iter().map(|b| module_form_words::<IntPoly>(rd, &space.lambda, b, w).to_laurent()).collect(),
            )
        })
    }

    /// Pairings of the basis vectors with `y . u_lambda`, for `y` homogeneous of the space content.
    fn module_pairing_vector(&self, space: &ModuleSpace, y: &NCElement) -> Vec<Scalar> {
        let mut out = vec![Scalar::zero(); space.dim()];
        for (w, c) in y.terms() {
            if word_content(w, self.rank()) != space.content {
                continue;
            }
            let r = self.module_word_pairings(space, w);
            for (o, p) in out.iter_mut().zip(r.iter()) {
                if !p.is_zero() {
                    *o = &*o + &(c * &Scalar::from_poly(p.clone()));
                }
            }
        }
        out
    }

    /// The vector `y . u_lambda`, using the component of `y` of content `beta`.
    pub fn module_vector(&self, lambda: &[i64], beta: &[i64], y: &NCElement) -> Result<ModuleVector> {
        let space = self.module_space(lambda, beta)?;
        let r = self.module_pairing_vector(&space, y);
        let det_inv = Scalar::from_poly(space.det.clone()).inv()?;
        let adj: Matrix = space.adj.iter().map(|row| row.iter().cloned().map(Scalar::from_poly).collect()).collect();
        let coords = linalg::mat_vec(&adj, &r).iter().map(|x| x * &det_inv).collect();
        Ok(ModuleVector { lambda: lambda.to_vec(), content: beta.to_vec(), coords })
    }

    pub fn highest_weight_vector(&self, lambda: &[i64]) -> Result<ModuleVector> {
        self.module_vector(lambda, &vec![0; self.rank()], &NCElement::one())
    }

    /// A representative `y` with `y . u_lambda = v`.
    pub fn module_representative(&self, v: &ModuleVector) -> Result<NCElement> {
        let space = self.module_space(&v.lambda, &v.content)?;
        Ok(NCElement::from_terms(space.basis.iter().cloned().zip(v.coords.iter().cloned())))
    }

    pub fn module_action(&self, g: &ModuleGenerator, v: &ModuleVector) -> Result<ModuleVector> {
        let rd = self.root_datum();
        match g {
            ModuleGenerator::F(i) => {
                let y = &NCElement::generator(*i) * &self.module_representative(v)?;
                let mut beta = v.content.clone();
                beta[*i] += 1;
                self.module_vector(&v.lambda, &beta, &y)
            }
            ModuleGenerator::E(i) => {
                let i = *i;
                let mut beta = v.content.clone();
                beta[i] -= 1;
                let y = self.module_representative(v)?;
                let mut out = NCElement::zero();
                for (w, c) in y.terms() {
                    for p in 0..w.len() {
                        if w[p] as usize != i {
                            continue;
                        }
                        let right = word_content(&w[p + 1..], self.rank());
                        let n = v.lambda[i] - rd.coroot_on_root(i, &right);
                        let mut rest = w.clone();
                        rest.remove(p);
                        out.add_term(rest, c * &Scalar::q_integer(n, rd.sym(i)));
                    }
                }
                self.module_vector(&v.lambda, &beta, &out)
            }
            ModuleGenerator::Torus(beta) => {
                let e = rd.form_weight_root(&v.weight(rd), beta);
                Ok(v.scale(&Scalar::q_pow(e)))
            }
        }
    }

    pub fn contravariant_form(&self, v1: &ModuleVector, v2: &ModuleVector) -> Result<Scalar> {
        if v1.lambda != v2.lambda {
            return Err(Error::InvalidArgument("vectors of different modules".into()));
        }
        if v1.content != v2.content {
            return Ok(Scalar::zero());
        }
        let g = self.module_space(&v1.lambda, &v1.content)?.gram();
        Ok(linalg::dot(&v1.coords, &linalg::mat_vec(&g, &v2.coords)))
    }

    /// `(u, y . u_lambda)` for a homogeneous `y`.
    fn form_with_element(&self, u: &ModuleVector, y: &NCElement) -> Result<Scalar> {
        let space = self.module_space(&u.lambda, &u.content)?;
        Ok(linalg::dot(&u.coords, &self.module_pairing_vector(&space, y)))
    }

    /// Exponents `a_k = <h_{i_k}, s_{i_{k+1}} ... s_{i_l} lambda>` along a reduced word.
    pub fn extremal_exponents(&self, word: &[usize], lambda: &[i64]) -> Vec<u32> {
        let rd = self.root_datum();
        (0..word.len()).map(|k| rd.act_word_weight(&word[k + 1..], lambda)[word[k]] as u32).collect()
    }

    /// The extremal vector `u_{w lambda}`.
    pub fn extremal_vector(&self, w: &WeylElt, lambda: &[i64]) -> Result<ModuleVector> {
        self.check_dominant(lambda)?;
        let word = w.word();
        let a = self.extremal_exponents(word, lambda);
        let mut y = NCElement::one();
        let mut beta = vec![0; self.rank()];
        for (&i, &k) in word.iter().zip(&a) {
            y = &y * &self.divided_power(i, k);
            beta[i] += k as i64;
        }
        self.module_vector(lambda, &beta, &y)
    }

    /// The unipotent quantum matrix coefficient `D_{u, u'}`.
    pub fn matrix_coefficient(&self, u: &ModuleVector, u_prime: &ModuleVector) -> Result<NCElement> {
        if u.lambda != u_prime.lambda {
            return Err(Error::InvalidArgument("vectors of different modules".into()));
        }
        let beta: RootVector = u.content.iter().zip(&u_prime.content).map(|(a, b)| a - b).collect();
        if beta.iter().any(|&b| b < 0) || u.is_zero() || u_prime.is_zero() {
            return Ok(NCElement::zero());
        }
        if beta.iter().all(|&b| b == 0) {
            return Ok(NCElement::scalar(self.contravariant_form(u, u_prime)?));
        }
        self.check_height(&beta)?;
        let rep = self.module_representative(u_prime)?;
        // Expand over the dual of the basis words of U_q^- of content beta.
        let space = self.weight_space(&beta)?;
        let den = crate::uqminus::pairing_denominator(self.root_datum(), &beta);
        let mut r = Vec::with_capacity(space.dim());
        for b in &space.basis {
            let x = &NCElement::word(b.clone()) * &rep;
            r.push(&self.form_with_element(u, &x)? * &den);
        }
        let coords = self.coords_from_pairing_vector(&beta, &r)?;
        let d = self.from_coords(&beta, &coords)?;
        for w in words_of_content(&beta) {
            let x = &NCElement::word(w.clone()) * &rep;
            if self.pair(&d, &NCElement::word(w))? != self.form_with_element(u, &x)? {
                return Err(Error::Internal("matrix coefficient fails its defining identity".into()));
            }
        }
        Ok(d)
    }

    /// The unipotent quantum minor `D_{w lambda, w' lambda}`.
    pub fn quantum_minor(&self, w: &WeylElt, w_prime: &WeylElt, lambda: &[i64]) -> Result<NCElement> {
        let u = self.extremal_vector(w, lambda)?;
        let u_prime = self.extremal_vector(w_prime, lambda)?;
        self.matrix_coefficient(&u, &u_prime)
    }

    /// `lambda_b = sum_i epsilon_i^*(b) varpi_i`.
    pub fn minimal_lambda(&self, b: &CrystalLabel) -> Result<Weight> {
        (0..self.rank()).map(|i| self.crystal_epsilon(i, b, Side::Right).map(|e| e as i64)).collect()
    }

    /// The weight `lambda_b` and the vector `u` of `V(lambda_b)` with `D_{u, u_lambda} = G^up(b)`.
    pub fn vector_from_dcb(&self, b: &CrystalLabel) -> Result<(Weight, ModuleVector)> {
        let lambda = self.minimal_lambda(b)?;
        let u = self.upper_global_vector(&lambda, b)?;
        Ok((lambda, u))
    }

    /// `G^up_lambda(b)`: the vector `u` of `V(lambda)` with `D_{u, u_lambda} = G^up(b)`.
    pub fn upper_global_vector(&self, lambda: &[i64], b: &CrystalLabel) -> Result<ModuleVector> {
        self.check_dominant(lambda)?;
        let least = self.minimal_lambda(b)?;
        if least.iter().zip(lambda).any(|(m, l)| m > l) {
            return Err(Error::InvalidArgument("label does not lie in B(lambda)".into()));
        }
        let beta = self.label_weight(b)?;
        let g = self.label_element(b)?;
        let mspace = self.module_space(lambda, &beta)?;
        let uspace = self.weight_space(&beta)?;
        // (u, B_k u_lambda) = (G, B_k)_L for the basis words B_k of U_q^-.
        let mut rows: Matrix = Vec::with_capacity(uspace.dim());
        let mut rhs = Vec::with_capacity(uspace.dim());
        for bw in &uspace.basis {
            let r = self.module_word_pairings(&mspace, bw);
            rows.push(r.iter().cloned().map(Scalar::from_poly).collect());
            rhs.push(self.pair(&g, &NCElement::word(bw.clone()))?);
        }
        let coords = if mspace.dim() == 0 {
            if rhs.iter().any(|x| !x.is_zero()) {
                return Err(Error::Internal("no module vector realizes the basis element".into()));
            }
            Vec::new()
        } else {
            linalg::solve(&rows, &rhs)?.ok_or_else(|| Error::Internal("no module vector realizes the basis element".into()))?
        };
        Ok(ModuleVector { lambda: lambda.to_vec(), content: beta, coords })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(x: &str) -> Scalar {
        Scalar::parse(x).unwrap()
    }

    #[test]
    fn weight_space_dimensions() {
        let e = Engine::from_type("A2").unwrap();
        assert_eq!(e.weight_basis_module(&[1, 0], &[-1, 1]).unwrap().dim(), 1);
        assert_eq!(e.weight_basis_module(&[1, 0], &[0, -1]).unwrap().dim(), 1);
        assert_eq!(e.weight_basis_module(&[1, 1], &[0, 0]).unwrap().dim(), 2);
        assert_eq!(e.weight_basis_module(&[1, 0], &[-3, 2]).unwrap().dim(), 0);
        assert!(e.weight_basis_module(&[1, 0], &[-2, 1]).is_err());
        let a1 = Engine::from_type("A1").unwrap();
        let sp = a1.weight_basis_module(&[1], &[1]).unwrap();
        assert_eq!(sp.basis, vec![Vec::<u8>::new()]);
    }

    #[test]
    fn action_and_form() {
        let e = Engine::from_type("A1").unwrap();
        let u = e.highest_weight_vector(&[1]).unwrap();
        assert!(e.module_action(&ModuleGenerator::E(0), &u).unwrap().is_zero());
        let fu = e.module_action(&ModuleGenerator::F(0), &u).unwrap();
        assert_eq!(e.module_action(&ModuleGenerator::E(0), &fu).unwrap(), u);
        assert!(e.module_action(&ModuleGenerator::F(0), &fu).unwrap().is_zero());
        assert_eq!(e.contravariant_form(&u, &u).unwrap(), Scalar::one());
        assert_eq!(e.contravariant_form(&fu, &fu).unwrap(), Scalar::one());
        assert_eq!(e.contravariant_form(&u, &fu).unwrap(), Scalar::zero());
        let k = e.module_action(&ModuleGenerator::Torus(vec![1]), &u).unwrap();
        assert_eq!(k, u.scale(&s("q")));
    }

    #[test]
    fn extremal_vectors() {
        let e = Engine::from_type("A2").unwrap();
        let rd = e.root_datum().clone();
        let w0 = rd.longest_element();
        assert_eq!(e.extremal_exponents(&[0, 1, 0], &[1, 0]), vec![0, 1, 1]);
        let u = e.extremal_vector(&w0, &[1, 0]).unwrap();
        let want = e.module_vector(&[1, 0], &[1, 1], &NCElement::word(vec![1, 0])).unwrap();
        assert_eq!(u, want);
        assert_eq!(e.contravariant_form(&u, &u).unwrap(), Scalar::one());
        assert_eq!(u.weight(&rd), vec![0, -1]);
    }

    #[test]
    fn matrix_coefficients() {
        let e = Engine::from_type("B2").unwrap();
        let rd = e.root_datum().clone();
        for i in 0..2 {
            let lambda = rd.fundamental_weight(i);
            let d = e.quantum_minor(&rd.simple_reflection(i), &WeylElt::identity(), &lambda).unwrap();
            let qi2 = Scalar::q_pow(2 * rd.sym(i));
            let want = NCElement::generator(i).scale(&(&Scalar::one() - &qi2));
            assert!(e.equal(&d, &want).unwrap());
            assert_eq!(e.quantum_minor(&WeylElt::identity(), &WeylElt::identity(), &lambda).unwrap(), NCElement::one());
        }
        let a2 = Engine::from_type("A2").unwrap();
        let r2 = a2.root_datum().clone();
        let d = a2.quantum_minor(&r2.simple_reflection(0), &WeylElt::identity(), &[0, 1]).unwrap();
        assert_eq!(d, NCElement::one());
        let u = a2.highest_weight_vector(&[1, 0]).unwrap();
        let fu = a2.module_action(&ModuleGenerator::F(0), &u).unwrap();
        assert_eq!(a2.matrix_coefficient(&u, &fu).unwrap(), NCElement::zero());
    }

    #[test]
    fn minor_is_a_canonical_element() {
        let e = Engine::from_type("A2").unwrap();
        let rd = e.root_datum().clone();
        let d = e.quantum_minor(&rd.longest_element(), &WeylElt::identity(), &[1, 0]).unwrap();
        let g = e.dual_canonical_element(&[1, 0, 1], &[0, 1, 0]).unwrap();
        assert!(e.equal(&d, &g.star()).unwrap());
    }

    #[test]
    fn vectors_from_basis_elements() {
        let e = Engine::from_type("A2").unwrap();
        let rd = e.root_datum().clone();
        let w = e.reference_word();
        let one = CrystalLabel::new(w.clone(), vec![0, 0, 0]);
        let (lambda, u) = e.vector_from_dcb(&one).unwrap();
        assert_eq!(lambda, vec![0, 0]);
        assert_eq!(u, e.highest_weight_vector(&[0, 0]).unwrap());
        let b = CrystalLabel::new(w, vec![1, 0, 0]);
        let (lambda, u) = e.vector_from_dcb(&b).unwrap();
        assert_eq!(lambda, vec![1, 0]);
        assert_eq!(u, e.extremal_vector(&rd.simple_reflection(0), &lambda).unwrap());
    }
}
