//! Exact arithmetic in the rational function field of `v = q^{1/2}`.
//!
//! A [`Scalar`] is kept in a canonical form: numerator and denominator are
//! integer Laurent polynomials in `v`, the denominator has lowest exponent
//! zero and a positive leading coefficient, the two share no polynomial
//! factor, and their contents are coprime. Equality is therefore syntactic.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Integer Laurent polynomial in `v`.
///
/// Stored densely from the lowest exponent; both ends are nonzero unless
/// the polynomial is zero, in which case `coeffs` is empty.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct LaurentPoly {
    low: i64,
    coeffs: Vec<BigInt>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(BigInt::one(), 0)
    }

    pub fn monomial(c: BigInt, exp: i64) -> Self {
        Self::from_dense(exp, vec![c])
    }

    /// Builds from coefficients of `v^low, v^(low+1), ...`.
    pub fn from_dense(low: i64, coeffs: Vec<BigInt>) -> Self {
        let mut p = LaurentPoly { low, coeffs };
        p.trim();
        p
    }

    /// Builds from `(exponent in v, coefficient)` pairs; repeated exponents add up.
    pub fn from_terms<I: IntoIterator<Item = (i64, BigInt)>>(terms: I) -> Self {
        let terms: Vec<(i64, BigInt)> = terms.into_iter().collect();
        if terms.is_empty() {
            return Self::zero();
        }
        let lo = terms.iter().map(|t| t.0).min().unwrap();
        let hi = terms.iter().map(|t| t.0).max().unwrap();
        let mut coeffs = vec![BigInt::zero(); (hi - lo + 1) as usize];
        for (e, c) in terms {
            coeffs[(e - lo) as usize] += c;
        }
        Self::from_dense(lo, coeffs)
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
        let lead = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        if lead > 0 {
            self.coeffs.drain(..lead);
            self.low += lead as i64;
        }
        if self.coeffs.is_empty() {
            self.low = 0;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.low == 0 && self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    /// Lowest exponent (0 for the zero polynomial).
    pub fn low(&self) -> i64 {
        self.low
    }

    /// Highest exponent (0 for the zero polynomial).
    pub fn high(&self) -> i64 {
        if self.is_zero() {
            0
        } else {
            self.low + self.coeffs.len() as i64 - 1
        }
    }

    /// Coefficient of `v^exp`.
    pub fn coeff(&self, exp: i64) -> BigInt {
        let k = exp - self.low;
        if k < 0 || k as usize >= self.coeffs.len() {
            BigInt::zero()
        } else {
            self.coeffs[k as usize].clone()
        }
    }

    /// Nonzero terms as `(exponent in v, coefficient)`, ascending.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &BigInt)> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(move |(k, c)| (self.low + k as i64, c))
    }

    fn leading(&self) -> &BigInt {
        self.coeffs.last().expect("nonzero polynomial")
    }

    pub fn shift(&self, by: i64) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        LaurentPoly { low: self.low + by, coeffs: self.coeffs.clone() }
    }

    /// Substitutes `v -> v^{-1}`.
    pub fn bar(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut coeffs = self.coeffs.clone();
        coeffs.reverse();
        LaurentPoly { low: -self.high(), coeffs }
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        LaurentPoly { low: self.low, coeffs: self.coeffs.iter().map(|x| x * c).collect() }
    }

    /// Value at `v = 1`.
    pub fn eval_one(&self) -> BigInt {
        self.coeffs.iter().sum()
    }

    /// Greatest common divisor of the coefficients (nonnegative).
    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for c in &self.coeffs {
            g = g.gcd(c);
            if g.is_one() {
                break;
            }
        }
        g
    }

    /// Gcd in `Z[v]` of two polynomials, normalized to lowest exponent 0 and positive
    /// leading coefficient.
    pub fn gcd(&self, o: &Self) -> Self {
        if self.is_zero() {
            return o.normalized_associate();
        }
        if o.is_zero() {
            return self.normalized_associate();
        }
        let c = self.content().gcd(&o.content());
        let g = dense_gcd(&self.coeffs, &o.coeffs);
        Self::from_dense(0, g.into_iter().map(|x| x * &c).collect())
    }

    fn normalized_associate(&self) -> Self {
        let mut p = Self::from_dense(0, self.coeffs.clone());
        if p.coeffs.last().is_some_and(|l| l.is_negative()) {
            p = p.neg_ref();
        }
        p
    }

    /// Exact quotient `self / d`, or `None` if `d` does not divide `self` in `Z[v, v^{-1}]`.
    pub fn div_exact(&self, d: &Self) -> Option<Self> {
        if d.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(Self::zero());
        }
        let mut r = self.coeffs.clone();
        let db = d.coeffs.len() - 1;
        if r.len() <= db {
            return None;
        }
        let lb = d.leading();
        let mut q = vec![BigInt::zero(); r.len() - db];
        while r.len() > db {
            let dr = r.len() - 1;
            let (c, rem) = r[dr].div_rem(lb);
            if !rem.is_zero() {
                return None;
            }
            for (k, x) in d.coeffs.iter().enumerate() {
                r[dr - db + k] -= &c * x;
            }
            q[dr - db] = c;
            r.pop();
        }
        if r.iter().any(|c| !c.is_zero()) {
            return None;
        }
        Some(Self::from_dense(self.low - d.low, q))
    }

    fn div_scalar_exact(&self, c: &BigInt) -> Self {
        LaurentPoly { low: self.low, coeffs: self.coeffs.iter().map(|x| x / c).collect() }
    }

    fn add_ref(&self, o: &Self) -> Self {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        let lo = self.low.min(o.low);
        let hi = self.high().max(o.high());
        let mut coeffs = vec![BigInt::zero(); (hi - lo + 1) as usize];
        for (k, c) in self.coeffs.iter().enumerate() {
            coeffs[(self.low - lo) as usize + k] += c;
        }
        for (k, c) in o.coeffs.iter().enumerate() {
            coeffs[(o.low - lo) as usize + k] += c;
        }
        Self::from_dense(lo, coeffs)
    }

    fn neg_ref(&self) -> Self {
        LaurentPoly { low: self.low, coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }

    fn mul_ref(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![BigInt::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (a, x) in self.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (b, y) in o.coeffs.iter().enumerate() {
                coeffs[a + b] += x * y;
            }
        }
        Self::from_dense(self.low + o.low, coeffs)
    }
}

impl Add for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, o: &LaurentPoly) -> LaurentPoly {
        self.add_ref(o)
    }
}

impl Sub for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, o: &LaurentPoly) -> LaurentPoly {
        self.add_ref(&o.neg_ref())
    }
}

impl Mul for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, o: &LaurentPoly) -> LaurentPoly {
        self.mul_ref(o)
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        self.neg_ref()
    }
}

// Dense polynomial helpers on coefficient vectors with exponent offset zero.

fn dense_trim(p: &mut Vec<BigInt>) {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

fn dense_content(p: &[BigInt]) -> BigInt {
    let mut g = BigInt::zero();
    for c in p {
        g = g.gcd(c);
        if g.is_one() {
            break;
        }
    }
    g
}

fn dense_primitive(p: &[BigInt]) -> Vec<BigInt> {
    let c = dense_content(p);
    let mut out: Vec<BigInt> = if c.is_one() { p.to_vec() } else { p.iter().map(|x| x / &c).collect() };
    if out.last().is_some_and(|l| l.is_negative()) {
        for x in out.iter_mut() {
            *x = -&*x;
        }
    }
    out
}

/// Pseudo-remainder of `f` by `g` (both nonzero, trimmed).
fn dense_prem(f: &[BigInt], g: &[BigInt]) -> Vec<BigInt> {
    let mut r = f.to_vec();
    let dg = g.len() - 1;
    let lg = &g[dg];
    while r.len() > dg && !r.is_empty() {
        let dr = r.len() - 1;
        let lr = r[dr].clone();
        let shift = dr - dg;
        for x in r.iter_mut() {
            *x *= lg;
        }
        for (k, c) in g.iter().enumerate() {
            r[shift + k] -= &lr * c;
        }
        dense_trim(&mut r);
        if !r.is_empty() {
            let c = dense_content(&r);
            if !c.is_one() {
                for x in r.iter_mut() {
                    *x = &*x / &c;
                }
            }
        }
    }
    r
}

/// Primitive gcd (positive leading coefficient) of two integer polynomials.
fn dense_gcd(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    if a.len() > 1 && b.len() > 1 {
        let (f, g) = (dense_primitive(a), dense_primitive(b));
        if let Some(h) = heuristic_gcd(&f, &g) {
            return h;
        }
    }
    dense_gcd_prs(a, b)
}

/// Quotient `a / b` if the division is exact.
fn dense_try_div(a: &[BigInt], b: &[BigInt]) -> Option<Vec<BigInt>> {
    if b.is_empty() || a.len() < b.len() {
        return None;
    }
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let lb = &b[db];
    let mut q = vec![BigInt::zero(); a.len() - db];
    while r.len() > db {
        let dr = r.len() - 1;
        let (c, rem) = r[dr].div_rem(lb);
        if !rem.is_zero() {
            return None;
        }
        for (k, x) in b.iter().enumerate() {
            r[dr - db + k] -= &c * x;
        }
        q[dr - db] = c;
        r.pop();
    }
    r.iter().all(|c| c.is_zero()).then_some(q)
}

/// Gcd by evaluation at a large integer and balanced digit reconstruction.
/// Returns `None` when the candidate fails the divisibility check.
fn heuristic_gcd(f: &[BigInt], g: &[BigInt]) -> Option<Vec<BigInt>> {
    let norm = |p: &[BigInt]| p.iter().map(|c| c.abs()).max().unwrap_or_default();
    let mut xi: BigInt = norm(f).min(norm(g)) * 2 + 29;
    let eval = |p: &[BigInt], x: &BigInt| p.iter().rev().fold(BigInt::zero(), |acc, c| acc * x + c);
    for _ in 0..6 {
        let gamma = eval(f, &xi).gcd(&eval(g, &xi));
        if !gamma.is_zero() {
            let mut digits = Vec::new();
            let mut rest = gamma;
            let half = &xi / 2;
            while !rest.is_zero() {
                let mut d = rest.mod_floor(&xi);
                if d > half {
                    d -= &xi;
                }
                rest = (&rest - &d) / &xi;
                digits.push(d);
            }
            let h = dense_primitive(&digits);
            if h.len() == 1 {
                return Some(vec![BigInt::one()]);
            }
            if dense_try_div(f, &h).is_some() && dense_try_div(g, &h).is_some() {
                return Some(h);
            }
        }
        xi = &xi * 73794 / 27011 + 1;
    }
    None
}

/// Gcd by primitive pseudo-remainder sequences.
fn dense_gcd_prs(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    if a.is_empty() {
        return dense_primitive(b);
    }
    if b.is_empty() {
        return dense_primitive(a);
    }
    if a.len() == 1 || b.len() == 1 {
        return vec![BigInt::one()];
    }
    let (mut f, mut g) = if a.len() >= b.len() {
        (dense_primitive(a), dense_primitive(b))
    } else {
        (dense_primitive(b), dense_primitive(a))
    };
    loop {
        let r = dense_prem(&f, &g);
        if r.is_empty() {
            return g;
        }
        if r.len() == 1 {
            return vec![BigInt::one()];
        }
        f = g;
        g = dense_primitive(&r);
    }
}

/// Exact quotient `a / b` in `Z[v]`, assuming `b` primitive divides `a`.
fn dense_div_exact(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    if b.len() == 1 {
        return a.iter().map(|x| x / &b[0]).collect();
    }
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let lb = &b[db];
    let mut q = vec![BigInt::zero(); a.len() - db];
    while r.len() > db {
        let dr = r.len() - 1;
        let c = &r[dr] / lb;
        for (k, x) in b.iter().enumerate() {
            r[dr - db + k] -= &c * x;
        }
        q[dr - db] = c;
        dense_trim(&mut r);
    }
    debug_assert!(r.is_empty(), "inexact polynomial division");
    q
}

/// Element of `Q(v)` in canonical form.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Scalar {
    num: LaurentPoly,
    den: LaurentPoly,
}

impl Default for Scalar {
    fn default() -> Self {
        Scalar::zero()
    }
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar { num: LaurentPoly::zero(), den: LaurentPoly::one() }
    }

    pub fn one() -> Self {
        Scalar { num: LaurentPoly::one(), den: LaurentPoly::one() }
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_poly(LaurentPoly::monomial(BigInt::from(n), 0))
    }

    pub fn from_poly(p: LaurentPoly) -> Self {
        Scalar { num: p, den: LaurentPoly::one() }
    }

    /// `v^e`.
    pub fn v_pow(e: i64) -> Self {
        Self::from_poly(LaurentPoly::monomial(BigInt::one(), e))
    }

    /// `q^k = v^{2k}`.
    pub fn q_pow(k: i64) -> Self {
        Self::v_pow(2 * k)
    }

    /// Builds `num / den` and normalizes.
    pub fn ratio(num: LaurentPoly, den: LaurentPoly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::normalize(num, den))
    }

    /// Balanced quantum integer `[n]_{q^d} = (q^{dn} - q^{-dn}) / (q^d - q^{-d})`.
    pub fn q_integer(n: i64, d: i64) -> Self {
        if n == 0 {
            return Self::zero();
        }
        let sign = if n < 0 { -1 } else { 1 };
        let m = n.abs();
        let terms = (0..m).map(|k| (2 * d * (m - 1 - 2 * k), BigInt::from(sign)));
        Self::from_poly(LaurentPoly::from_terms(terms))
    }

    /// Balanced quantum factorial `[n]_{q^d}!`.
    pub fn q_factorial(n: i64, d: i64) -> Self {
        (1..=n).fold(Self::one(), |acc, k| &acc * &Self::q_integer(k, d))
    }

    /// `1 - q^k`.
    pub fn one_minus_q(k: i64) -> Self {
        Self::from_poly(LaurentPoly::from_terms([(0, BigInt::one()), (2 * k, -BigInt::one())]))
    }

    pub fn numerator(&self) -> &LaurentPoly {
        &self.num
    }

    pub fn denominator(&self) -> &LaurentPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    /// The Laurent polynomial when the denominator is 1.
    pub fn as_laurent(&self) -> Option<&LaurentPoly> {
        if self.den.is_one() {
            Some(&self.num)
        } else {
            None
        }
    }

    /// True when the scalar is a Laurent polynomial in `q` (even `v`-exponents only).
    pub fn is_q_laurent(&self) -> bool {
        self.den.is_one() && self.num.terms().all(|(e, _)| e % 2 == 0)
    }

    fn normalize(mut num: LaurentPoly, mut den: LaurentPoly) -> Self {
        if num.is_zero() {
            return Self::zero();
        }
        if den.low != 0 {
            num.low -= den.low;
            den.low = 0;
        }
        if den.coeffs.len() > 1 && num.coeffs.len() > 1 {
            let g = dense_gcd(&num.coeffs, &den.coeffs);
            if g.len() > 1 {
                num.coeffs = dense_div_exact(&num.coeffs, &g);
                den.coeffs = dense_div_exact(&den.coeffs, &g);
                num.trim();
                den.trim();
            }
        }
        Self::fix_content(num, den)
    }

    fn fix_content(mut num: LaurentPoly, mut den: LaurentPoly) -> Self {
        let c = num.content().gcd(&den.content());
        if !c.is_one() {
            num = num.div_scalar_exact(&c);
            den = den.div_scalar_exact(&c);
        }
        if den.leading().is_negative() {
            num = num.neg_ref();
            den = den.neg_ref();
        }
        Scalar { num, den }
    }

    pub fn add_ref(&self, o: &Self) -> Self {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        if self.den.is_one() && o.den.is_one() {
            return Self::from_poly(&self.num + &o.num);
        }
        if self.den == o.den {
            return Self::normalize(&self.num + &o.num, self.den.clone());
        }
        if o.den.is_one() {
            return Self::normalize(&self.num + &(&o.num * &self.den), self.den.clone());
        }
        if self.den.is_one() {
            return Self::normalize(&(&self.num * &o.den) + &o.num, o.den.clone());
        }
        let g = dense_gcd(&self.den.coeffs, &o.den.coeffs);
        if g.len() == 1 {
            let num = &(&self.num * &o.den) + &(&o.num * &self.den);
            return Self::normalize(num, &self.den * &o.den);
        }
        let gp = LaurentPoly::from_dense(0, g.clone());
        let b1 = LaurentPoly::from_dense(0, dense_div_exact(&self.den.coeffs, &g));
        let d1 = LaurentPoly::from_dense(0, dense_div_exact(&o.den.coeffs, &g));
        let num = &(&self.num * &d1) + &(&o.num * &b1);
        Self::normalize(num, &(&b1 * &d1) * &gp)
    }

    pub fn mul_ref(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        if self.den.is_one() && o.den.is_one() {
            return Self::from_poly(&self.num * &o.num);
        }
        let (a, d) = cancel(&self.num, &o.den);
        let (c, b) = cancel(&o.num, &self.den);
        Self::fix_content(&a * &c, &b * &d)
    }

    pub fn neg_ref(&self) -> Self {
        Scalar { num: self.num.neg_ref(), den: self.den.clone() }
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let mut num = self.den.clone();
        let mut den = self.num.clone();
        num.low -= den.low;
        den.low = 0;
        Ok(Self::fix_content(num, den))
    }

    pub fn div_ref(&self, o: &Self) -> Result<Self> {
        Ok(self.mul_ref(&o.inv()?))
    }

    /// The bar involution `v -> v^{-1}`.
    pub fn bar(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut num = self.num.bar();
        let mut den = self.den.bar();
        num.low -= den.low;
        den.low = 0;
        Self::fix_content(num, den)
    }

    /// Value at `q = 1`.
    pub fn specialize(&self) -> Result<BigRational> {
        let d = self.den.eval_one();
        if d.is_zero() {
            return Err(Error::PoleAtOne);
        }
        Ok(BigRational::new(self.num.eval_one(), d))
    }

    pub fn pow(&self, n: u32) -> Self {
        (0..n).fold(Self::one(), |acc, _| &acc * self)
    }

    /// Parses the text form produced by `Display`.
    pub fn parse(s: &str) -> Result<Self> {
        parse::parse_scalar(s)
    }
}

/// Removes the common factor of `a` and `b` (b has lowest exponent 0).
fn cancel(a: &LaurentPoly, b: &LaurentPoly) -> (LaurentPoly, LaurentPoly) {
    if b.coeffs.len() <= 1 || a.coeffs.len() <= 1 {
        return (a.clone(), b.clone());
    }
    let g = dense_gcd(&a.coeffs, &b.coeffs);
    if g.len() == 1 {
        return (a.clone(), b.clone());
    }
    (
        LaurentPoly::from_dense(a.low, dense_div_exact(&a.coeffs, &g)),
        LaurentPoly::from_dense(0, dense_div_exact(&b.coeffs, &g)),
    )
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, o: &Scalar) -> Scalar {
        self.add_ref(o)
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, o: &Scalar) -> Scalar {
        self.add_ref(&o.neg_ref())
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, o: &Scalar) -> Scalar {
        self.mul_ref(o)
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        self.neg_ref()
    }
}

impl Add for Scalar {
    type Output = Scalar;
    fn add(self, o: Scalar) -> Scalar {
        self.add_ref(&o)
    }
}

impl Sub for Scalar {
    type Output = Scalar;
    fn sub(self, o: Scalar) -> Scalar {
        &self - &o
    }
}

impl Mul for Scalar {
    type Output = Scalar;
    fn mul(self, o: Scalar) -> Scalar {
        self.mul_ref(&o)
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        self.neg_ref()
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::from_int(n)
    }
}

fn fmt_exponent(e: i64) -> String {
    // e is an exponent of v; print the exponent of q.
    if e % 2 == 0 {
        let k = e / 2;
        if k == 1 {
            String::new()
        } else if k > 0 {
            format!("^{k}")
        } else {
            format!("^{{{k}}}")
        }
    } else {
        format!("^{{{e}/2}}")
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (n, (e, c)) in self.terms().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if n == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            }
            if e == 0 {
                write!(f, "{abs}")?;
            } else {
                if !abs.is_one() {
                    write!(f, "{abs}")?;
                }
                write!(f, "q{}", fmt_exponent(e))?;
            }
        }
        Ok(())
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

impl FromStr for Scalar {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Scalar::parse(s)
    }
}

impl serde::Serialize for Scalar {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> serde::Deserialize<'de> for Scalar {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Scalar::parse(&s).map_err(serde::de::Error::custom)
    }
}

mod parse {
    //! Recursive-descent parser for scalar expressions in `q` (and `v`).

    use super::*;

    #[derive(Debug, Clone, PartialEq)]
    enum Tok {
        Int(BigInt),
        Q,
        V,
        Plus,
        Minus,
        Star,
        Slash,
        Caret,
        LParen,
        RParen,
        LBrace,
        RBrace,
    }

    fn lex(s: &str) -> Result<Vec<Tok>> {
        let mut out = Vec::new();
        let chars: Vec<char> = s.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            match c {
                ' ' | '\t' | '\n' => {}
                '0'..='9' => {
                    let start = i;
                    while i + 1 < chars.len() && chars[i + 1].is_ascii_digit() {
                        i += 1;
                    }
                    let digits: String = chars[start..=i].iter().collect();
                    out.push(Tok::Int(digits.parse().map_err(|_| Error::Parse(digits.clone()))?));
                }
                'q' => out.push(Tok::Q),
                'v' => out.push(Tok::V),
                '+' => out.push(Tok::Plus),
                '-' | '\u{2212}' => out.push(Tok::Minus),
                '*' => out.push(Tok::Star),
                '/' => out.push(Tok::Slash),
                '^' => out.push(Tok::Caret),
                '(' => out.push(Tok::LParen),
                ')' => out.push(Tok::RParen),
                '{' => out.push(Tok::LBrace),
                '}' => out.push(Tok::RBrace),
                _ => return Err(Error::Parse(format!("unexpected character {c:?} in {s:?}"))),
            }
            i += 1;
        }
        Ok(out)
    }

    struct Parser {
        toks: Vec<Tok>,
        pos: usize,
    }

    impl Parser {
        fn peek(&self) -> Option<&Tok> {
            self.toks.get(self.pos)
        }

        fn next(&mut self) -> Option<Tok> {
            let t = self.toks.get(self.pos).cloned();
            self.pos += 1;
            t
        }

        fn expect(&mut self, t: Tok) -> Result<()> {
            match self.next() {
                Some(ref x) if *x == t => Ok(()),
                other => Err(Error::Parse(format!("expected {t:?}, found {other:?}"))),
            }
        }

        fn expr(&mut self) -> Result<Scalar> {
            let mut acc = match self.peek() {
                Some(Tok::Minus) => {
                    self.pos += 1;
                    self.term()?.neg_ref()
                }
                Some(Tok::Plus) => {
                    self.pos += 1;
                    self.term()?
                }
                _ => self.term()?,
            };
            loop {
                match self.peek() {
                    Some(Tok::Plus) => {
                        self.pos += 1;
                        acc = &acc + &self.term()?;
                    }
                    Some(Tok::Minus) => {
                        self.pos += 1;
                        acc = &acc - &self.term()?;
                    }
                    _ => return Ok(acc),
                }
            }
        }

        fn term(&mut self) -> Result<Scalar> {
            let mut acc = self.factor()?;
            loop {
                match self.peek() {
                    Some(Tok::Star) => {
                        self.pos += 1;
                        acc = &acc * &self.factor()?;
                    }
                    Some(Tok::Slash) => {
                        self.pos += 1;
                        acc = acc.div_ref(&self.factor()?)?;
                    }
                    Some(Tok::Int(_)) | Some(Tok::Q) | Some(Tok::V) | Some(Tok::LParen) => {
                        acc = &acc * &self.factor()?;
                    }
                    _ => return Ok(acc),
                }
            }
        }

        /// Exponent as a multiple of 1/2, returned doubled.
        fn exponent(&mut self) -> Result<i64> {
            let close = match self.peek() {
                Some(Tok::LBrace) => Some(Tok::RBrace),
                Some(Tok::LParen) => Some(Tok::RParen),
                _ => None,
            };
            if close.is_some() {
                self.pos += 1;
            }
            let neg = if self.peek() == Some(&Tok::Minus) {
                self.pos += 1;
                true
            } else {
                false
            };
            let n = match self.next() {
                Some(Tok::Int(n)) => to_i64(&n)?,
                other => return Err(Error::Parse(format!("bad exponent {other:?}"))),
            };
            let mut doubled = 2 * n;
            if close.is_some() && self.peek() == Some(&Tok::Slash) {
                self.pos += 1;
                match self.next() {
                    Some(Tok::Int(d)) if d == BigInt::from(2) => doubled = n,
                    Some(Tok::Int(d)) if d.is_one() => {}
                    other => return Err(Error::Parse(format!("exponent denominator must be 2, found {other:?}"))),
                }
            }
            if let Some(c) = close {
                self.expect(c)?;
            }
            Ok(if neg { -doubled } else { doubled })
        }

        fn factor(&mut self) -> Result<Scalar> {
            match self.next() {
                Some(Tok::Int(n)) => Ok(Scalar::from_poly(LaurentPoly::monomial(n, 0))),
                Some(Tok::Q) => {
                    let e = if self.peek() == Some(&Tok::Caret) {
                        self.pos += 1;
                        self.exponent()?
                    } else {
                        2
                    };
                    Ok(Scalar::v_pow(e))
                }
                Some(Tok::V) => {
                    let e = if self.peek() == Some(&Tok::Caret) {
                        self.pos += 1;
                        let d = self.exponent()?;
                        if d % 2 != 0 {
                            return Err(Error::Parse("v exponents must be integers".into()));
                        }
                        d / 2
                    } else {
                        1
                    };
                    Ok(Scalar::v_pow(e))
                }
                Some(Tok::LParen) => {
                    let inner = self.expr()?;
                    self.expect(Tok::RParen)?;
                    if self.peek() == Some(&Tok::Caret) {
                        self.pos += 1;
                        let d = self.exponent()?;
                        if d % 2 != 0 {
                            return Err(Error::Parse("powers of expressions must be integers".into()));
                        }
                        let k = d / 2;
                        let p = inner.pow(k.unsigned_abs() as u32);
                        return if k < 0 { p.inv() } else { Ok(p) };
                    }
                    Ok(inner)
                }
                other => Err(Error::Parse(format!("unexpected token {other:?}"))),
            }
        }
    }

    fn to_i64(n: &BigInt) -> Result<i64> {
        i64::try_from(n).map_err(|_| Error::Parse(format!("exponent {n} out of range")))
    }

    pub(super) fn parse_scalar(s: &str) -> Result<Scalar> {
        let toks = lex(s)?;
        if toks.is_empty() {
            return Err(Error::Parse("empty scalar".into()));
        }
        let mut p = Parser { toks, pos: 0 };
        let v = p.expr()?;
        if p.pos != p.toks.len() {
            return Err(Error::Parse(format!("trailing input in {s:?}")));
        }
        Ok(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn s(x: &str) -> Scalar {
        Scalar::parse(x).unwrap()
    }

    #[test]
    fn inverse_pair() {
        assert_eq!(&Scalar::q_pow(1) * &Scalar::q_pow(-1), Scalar::one());
    }

    #[test]
    fn division_forced() {
        let r = Scalar::one().div_ref(&s("1 - q^2")).unwrap();
        assert_eq!(r.to_string(), "(-1)/(-1 + q^2)");
        assert_eq!(&r * &s("1 - q^2"), Scalar::one());
    }

    #[test]
    fn rational_addition() {
        let a = s("q/(1 - q^2)");
        let b = s("q^2/(1 - q^2)");
        assert_eq!(&a + &b, s("(q + q^2)/(1 - q^2)"));
    }

    #[test]
    fn bar_examples() {
        assert_eq!(Scalar::q_pow(3).bar(), Scalar::q_pow(-3));
        assert_eq!(s("1/(1 - q^2)").bar(), s("-q^2/(1 - q^2)"));
        assert_eq!(Scalar::one().bar(), Scalar::one());
    }

    #[test]
    fn specialize_examples() {
        assert_eq!(s("q + q^{-1}").specialize().unwrap(), BigRational::from_integer(2.into()));
        assert_eq!(s("(1 - q^4)/(1 - q^2)").specialize().unwrap(), BigRational::from_integer(2.into()));
        assert_eq!(s("1/(1 - q^2)").specialize(), Err(Error::PoleAtOne));
    }

    #[test]
    fn division_by_zero() {
        assert_eq!(Scalar::one().div_ref(&Scalar::zero()), Err(Error::DivisionByZero));
    }

    #[test]
    fn half_powers_render() {
        let x = Scalar::v_pow(1);
        assert_eq!(x.to_string(), "q^{1/2}");
        assert_eq!(Scalar::v_pow(-3).to_string(), "q^{-3/2}");
        assert_eq!(s("q^{1/2}") * s("q^{1/2}"), Scalar::q_pow(1));
    }

    #[test]
    fn render_examples() {
        assert_eq!(s("1 - q^2").to_string(), "1 - q^2");
        assert_eq!(s("2q^{-1} - 3 + q").to_string(), "2q^{-1} - 3 + q");
        assert_eq!(s("q/(1 - q^2)").to_string(), "(-q)/(-1 + q^2)");
    }

    #[test]
    fn canonical_denominator() {
        let x = s("q/(1 - q^2)");
        assert_eq!(x.denominator().low(), 0);
        assert!(x.denominator().coeff(x.denominator().high()) > BigInt::zero());
        let half = s("1/2");
        assert_eq!(half.numerator(), &LaurentPoly::one());
        assert_eq!(s("2/4"), half);
    }

    #[test]
    fn quantum_integers() {
        assert_eq!(Scalar::q_integer(2, 1), s("q + q^{-1}"));
        assert_eq!(Scalar::q_integer(3, 2), s("q^4 + 1 + q^{-4}"));
        assert_eq!(Scalar::q_integer(-2, 1), s("-q - q^{-1}"));
        assert_eq!(Scalar::q_factorial(3, 1), s("(q + q^{-1})(q^2 + 1 + q^{-2})"));
    }

    fn arb_poly() -> impl Strategy<Value = LaurentPoly> {
        (-4i64..4, prop::collection::vec(-3i64..4, 0..5))
            .prop_map(|(low, cs)| LaurentPoly::from_dense(low, cs.into_iter().map(BigInt::from).collect()))
    }

    fn arb_scalar() -> impl Strategy<Value = Scalar> {
        (arb_poly(), arb_poly()).prop_filter_map("nonzero denominator", |(n, d)| Scalar::ratio(n, d).ok())
    }

    proptest! {
        #[test]
        fn bar_is_involutive(a in arb_scalar()) {
            prop_assert_eq!(a.bar().bar(), a);
        }

        #[test]
        fn field_division_roundtrip(a in arb_scalar(), b in arb_scalar()) {
            prop_assume!(!b.is_zero());
            prop_assert_eq!((&a * &b).div_ref(&b).unwrap(), a);
        }

        #[test]
        fn difference_zero_iff_equal(a in arb_scalar(), b in arb_scalar()) {
            prop_assert_eq!((&a - &b).is_zero(), a == b);
        }

        #[test]
        fn display_parse_roundtrip(a in arb_scalar()) {
            prop_assert_eq!(Scalar::parse(&a.to_string()).unwrap(), a);
        }

        #[test]
        fn bar_is_multiplicative(a in arb_scalar(), b in arb_scalar()) {
            prop_assert_eq!((&a * &b).bar(), &a.bar() * &b.bar());
            prop_assert_eq!((&a + &b).bar(), &a.bar() + &b.bar());
        }
    }
}
