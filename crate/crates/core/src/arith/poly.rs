//! Sparse multivariate (optionally Laurent) polynomials over exact rationals.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::ArithError;

/// Exact rational coefficients.
pub type Rational = BigRational;

/// `n/d` as an exact rational. Panics on `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// The integer `n` as an exact rational.
pub fn int(n: i64) -> Rational {
    BigRational::from_integer(BigInt::from(n))
}

#[derive(Debug, PartialEq, Eq, Hash)]
struct ContextInner {
    names: Vec<String>,
    laurent: Vec<bool>,
}

/// An ordered list of named indeterminates.
///
/// Every [`MultiPoly`] carries its context. Two polynomials can only be
/// combined when their contexts are equal (same names, same order, same
/// Laurent flags); there is no implicit coercion between contexts.
#[derive(Debug, Clone)]
pub struct VarContext(Arc<ContextInner>);

impl PartialEq for VarContext {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0 == other.0
    }
}

impl Eq for VarContext {}

impl VarContext {
    /// Context of ordinary polynomial variables.
    pub fn new<S: AsRef<str>>(names: &[S]) -> Self {
        Self::with_flags(names.iter().map(|n| (n.as_ref(), false)))
    }

    /// Context in which every variable may carry negative exponents.
    pub fn laurent<S: AsRef<str>>(names: &[S]) -> Self {
        Self::with_flags(names.iter().map(|n| (n.as_ref(), true)))
    }

    /// Context with an explicit Laurent flag per variable.
    ///
    /// Panics on duplicate names.
    pub fn with_flags<'a, I>(vars: I) -> Self
    where
        I: IntoIterator<Item = (&'a str, bool)>,
    {
        let (names, laurent): (Vec<String>, Vec<bool>) =
            vars.into_iter().map(|(n, l)| (n.to_string(), l)).unzip();
        for (i, n) in names.iter().enumerate() {
            assert!(
                !names[..i].contains(n),
                "duplicate variable name {n:?} in context"
            );
        }
        VarContext(Arc::new(ContextInner { names, laurent }))
    }

    pub fn len(&self) -> usize {
        self.0.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.0.names
    }

    pub fn is_laurent(&self, index: usize) -> bool {
        self.0.laurent[index]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.0.names.iter().position(|n| n == name)
    }

    /// The variable `name` as a polynomial.
    pub fn var(&self, name: &str) -> Result<MultiPoly, ArithError> {
        let i = self
            .index_of(name)
            .ok_or_else(|| ArithError::UnknownVariable(name.to_string()))?;
        Ok(self.var_at(i))
    }

    /// The variable at position `index`.
    pub fn var_at(&self, index: usize) -> MultiPoly {
        let mut e = vec![0; self.len()];
        e[index] = 1;
        MultiPoly::from_term(self, e, Rational::one())
    }

    fn check_exponents(&self, exps: &[i32]) -> Result<(), ArithError> {
        for (i, &e) in exps.iter().enumerate() {
            if e < 0 && !self.is_laurent(i) {
                return Err(ArithError::NegativeExponent(self.0.names[i].clone()));
            }
        }
        Ok(())
    }
}

/// Exponent vector ordered graded-lexicographically (total degree first,
/// then lexicographic with the first variable most significant).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Exponents(pub Vec<i32>);

impl Exponents {
    pub fn degree(&self) -> i64 {
        self.0.iter().map(|&e| e as i64).sum()
    }
}

impl Ord for Exponents {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Exponents {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse polynomial: exponent vectors mapped to nonzero rationals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiPoly {
    ctx: VarContext,
    terms: BTreeMap<Exponents, Rational>,
}

impl MultiPoly {
    pub fn zero(ctx: &VarContext) -> Self {
        MultiPoly {
            ctx: ctx.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(ctx: &VarContext) -> Self {
        Self::constant(ctx, Rational::one())
    }

    pub fn constant(ctx: &VarContext, c: Rational) -> Self {
        Self::from_term(ctx, vec![0; ctx.len()], c)
    }

    pub fn from_int(ctx: &VarContext, n: i64) -> Self {
        Self::constant(ctx, int(n))
    }

    /// A single term `c * x^exps`. Checks the Laurent flags.
    pub fn monomial(ctx: &VarContext, exps: Vec<i32>, c: Rational) -> Result<Self, ArithError> {
        if exps.len() != ctx.len() {
            return Err(ArithError::Precondition(format!(
                "exponent vector of length {} in a context of {} variables",
                exps.len(),
                ctx.len()
            )));
        }
        ctx.check_exponents(&exps)?;
        Ok(Self::from_term(ctx, exps, c))
    }

    fn from_term(ctx: &VarContext, exps: Vec<i32>, c: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Exponents(exps), c);
        }
        MultiPoly {
            ctx: ctx.clone(),
            terms,
        }
    }

    pub fn ctx(&self) -> &VarContext {
        &self.ctx
    }

    /// Terms in ascending graded-lexicographic order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&[i32], &Rational)> {
        self.terms.iter().map(|(e, c)| (e.0.as_slice(), c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.constant_value().is_some_and(|c| c.is_one())
    }

    /// `Some(c)` when the polynomial is the constant `c` (including zero).
    pub fn constant_value(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => {
                let (e, c) = self.terms.iter().next().unwrap();
                e.0.iter().all(|&x| x == 0).then(|| c.clone())
            }
            _ => None,
        }
    }

    /// Coefficient of the constant monomial.
    pub fn constant_term(&self) -> Rational {
        self.terms
            .get(&Exponents(vec![0; self.ctx.len()]))
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub fn coeff(&self, exps: &[i32]) -> Rational {
        self.terms
            .get(&Exponents(exps.to_vec()))
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    /// Largest total degree of a term, `None` for zero.
    pub fn total_degree(&self) -> Option<i64> {
        self.terms.keys().map(Exponents::degree).max()
    }

    /// `(min, max)` exponent of variable `index` over all terms.
    pub fn degree_range(&self, index: usize) -> Option<(i32, i32)> {
        let mut it = self.terms.keys().map(|e| e.0[index]);
        let first = it.next()?;
        Some(it.fold((first, first), |(lo, hi), e| (lo.min(e), hi.max(e))))
    }

    fn same_ctx(&self, other: &Self) -> Result<(), ArithError> {
        if self.ctx == other.ctx {
            Ok(())
        } else {
            Err(ArithError::ContextMismatch)
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, ArithError> {
        self.same_ctx(other)?;
        let mut out = self.clone();
        out.add_assign_unchecked(other, &Rational::one());
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, ArithError> {
        self.same_ctx(other)?;
        let mut out = self.clone();
        out.add_assign_unchecked(other, &-Rational::one());
        Ok(out)
    }

    /// `self += factor * other`.
    pub fn add_scaled(&mut self, other: &Self, factor: &Rational) -> Result<(), ArithError> {
        self.same_ctx(other)?;
        self.add_assign_unchecked(other, factor);
        Ok(())
    }

    fn add_assign_unchecked(&mut self, other: &Self, factor: &Rational) {
        if factor.is_zero() {
            return;
        }
        for (e, c) in &other.terms {
            let v = if factor.is_one() {
                c.clone()
            } else {
                c * factor
            };
            add_into(&mut self.terms, e.clone(), v);
        }
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, ArithError> {
        self.same_ctx(other)?;
        Ok(self.mul_unchecked(other))
    }

    fn mul_unchecked(&self, other: &Self) -> Self {
        let mut terms = BTreeMap::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e: Vec<i32> = ea.0.iter().zip(&eb.0).map(|(a, b)| a + b).collect();
                add_into(&mut terms, Exponents(e), ca * cb);
            }
        }
        MultiPoly {
            ctx: self.ctx.clone(),
            terms,
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(&self.ctx);
        }
        MultiPoly {
            ctx: self.ctx.clone(),
            terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect(),
        }
    }

    pub fn pow(&self, mut k: u32) -> Self {
        let mut result = Self::one(&self.ctx);
        let mut base = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                result = result.mul_unchecked(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul_unchecked(&base);
            }
        }
        result
    }

    /// Integer power; negative powers are only defined for monomials in
    /// Laurent variables (the units of the ring).
    pub fn powi(&self, k: i64) -> Result<Self, ArithError> {
        if k >= 0 {
            return Ok(self.pow(k as u32));
        }
        let inv = self.monomial_inverse()?;
        Ok(inv.pow((-k) as u32))
    }

    /// Inverse of a unit monomial `c * x^e`.
    pub fn monomial_inverse(&self) -> Result<Self, ArithError> {
        if !self.is_monomial() {
            return Err(ArithError::NotInvertible);
        }
        let (e, c) = self.terms.iter().next().unwrap();
        let neg: Vec<i32> = e.0.iter().map(|x| -x).collect();
        Self::monomial(&self.ctx, neg, c.recip()).map_err(|_| ArithError::NotInvertible)
    }

    /// Keeps only the terms whose exponent vector satisfies `keep`.
    pub fn retain<F: FnMut(&[i32]) -> bool>(&self, mut keep: F) -> Self {
        MultiPoly {
            ctx: self.ctx.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| keep(&e.0))
                .map(|(e, c)| (e.clone(), c.clone()))
                .collect(),
        }
    }

    /// Ring homomorphism sending variable `i` to `images[i]`, all of which
    /// live in `target`. Negative exponents need unit (monomial) images.
    pub fn map_vars(&self, target: &VarContext, images: &[MultiPoly]) -> Result<Self, ArithError> {
        if images.len() != self.ctx.len() {
            return Err(ArithError::Precondition(format!(
                "{} images for {} variables",
                images.len(),
                self.ctx.len()
            )));
        }
        if images.iter().any(|p| p.ctx != *target) {
            return Err(ArithError::ContextMismatch);
        }
        let mut cache: Vec<BTreeMap<i32, MultiPoly>> = vec![BTreeMap::new(); images.len()];
        let mut out = Self::zero(target);
        for (e, c) in &self.terms {
            let mut term = Self::constant(target, c.clone());
            for (i, &k) in e.0.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                if !cache[i].contains_key(&k) {
                    let p = images[i].powi(k as i64)?;
                    cache[i].insert(k, p);
                }
                term = term.mul_unchecked(&cache[i][&k]);
            }
            out.add_assign_unchecked(&term, &Rational::one());
        }
        Ok(out)
    }

    /// Substitutes `value` (same context) for the variable at `index`.
    pub fn substitute(&self, index: usize, value: &MultiPoly) -> Result<Self, ArithError> {
        self.same_ctx(value)?;
        let images: Vec<MultiPoly> = (0..self.ctx.len())
            .map(|i| {
                if i == index {
                    value.clone()
                } else {
                    self.ctx.var_at(i)
                }
            })
            .collect();
        self.map_vars(&self.ctx, &images)
    }

    /// Exact quotient `self / divisor`.
    ///
    /// Graded-lex division is a total order compatible with multiplication
    /// on exponent vectors, so an exact quotient is found leading term by
    /// leading term. Candidate quotient terms must also lie in the exponent
    /// box implied by per-variable degree ranges, which bounds the search in
    /// the Laurent case.
    pub fn div_exact(&self, divisor: &MultiPoly) -> Result<Self, ArithError> {
        self.same_ctx(divisor)?;
        if divisor.is_zero() {
            return Err(ArithError::NotInvertible);
        }
        let n = self.ctx.len();
        let mut quotient = Self::zero(&self.ctx);
        if self.is_zero() {
            return Ok(quotient);
        }
        let bounds: Vec<(i32, i32)> = (0..n)
            .map(|i| {
                let (plo, phi) = self.degree_range(i).unwrap();
                let (dlo, dhi) = divisor.degree_range(i).unwrap();
                (plo - dlo, phi - dhi)
            })
            .collect();
        let (lead_e, lead_c) = divisor.terms.iter().next_back().unwrap();
        let mut rem = self.clone();
        while let Some((re, rc)) = rem.terms.iter().next_back() {
            let e: Vec<i32> = re.0.iter().zip(&lead_e.0).map(|(a, b)| a - b).collect();
            let inside = e
                .iter()
                .zip(&bounds)
                .all(|(x, (lo, hi))| lo <= x && x <= hi);
            if !inside || self.ctx.check_exponents(&e).is_err() {
                return Err(ArithError::NotDivisible);
            }
            let c = rc / lead_c;
            let term = Self::from_term(&self.ctx, e, c);
            rem.add_assign_unchecked(&term.mul_unchecked(divisor), &-Rational::one());
            quotient.add_assign_unchecked(&term, &Rational::one());
        }
        Ok(quotient)
    }
}

fn add_into(terms: &mut BTreeMap<Exponents, Rational>, e: Exponents, c: Rational) {
    use std::collections::btree_map::Entry;
    match terms.entry(e) {
        Entry::Vacant(v) => {
            if !c.is_zero() {
                v.insert(c);
            }
        }
        Entry::Occupied(mut o) => {
            *o.get_mut() += c;
            if o.get().is_zero() {
                o.remove();
            }
        }
    }
}

/// Generalised binomial coefficient `p (p-1) ... (p-k+1) / k!`.
pub fn poly_binomial(p: &MultiPoly, k: u32) -> MultiPoly {
    let ctx = p.ctx();
    let mut acc = MultiPoly::one(ctx);
    let mut fact = Rational::one();
    for i in 0..k {
        let shifted = p - &MultiPoly::from_int(ctx, i as i64);
        acc = &acc * &shifted;
        fact *= int(i as i64 + 1);
    }
    acc.scale(&fact.recip())
}

impl Add for &MultiPoly {
    type Output = MultiPoly;
    /// Panics when the contexts differ; see [`MultiPoly::checked_add`].
    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        self.checked_add(rhs).expect("polynomial context mismatch")
    }
}

impl Sub for &MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        self.checked_sub(rhs).expect("polynomial context mismatch")
    }
}

impl Mul for &MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        self.checked_mul(rhs).expect("polynomial context mismatch")
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        self.scale(&-Rational::one())
    }
}

impl Add for MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: MultiPoly) -> MultiPoly {
        &self + &rhs
    }
}

impl Sub for MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: MultiPoly) -> MultiPoly {
        &self - &rhs
    }
}

impl Mul for MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: MultiPoly) -> MultiPoly {
        &self * &rhs
    }
}

impl Neg for MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        -&self
    }
}

/// Formats a rational as `a` or `a/b`.
pub fn fmt_rational(c: &Rational) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

impl MultiPoly {
    fn monomial_text(&self, e: &[i32]) -> String {
        e.iter()
            .enumerate()
            .filter(|(_, &k)| k != 0)
            .map(|(i, &k)| {
                let name = &self.ctx.names()[i];
                if k == 1 {
                    name.clone()
                } else {
                    format!("{name}^{k}")
                }
            })
            .collect::<Vec<_>>()
            .join("*")
    }

    /// Canonical text of a single term without its sign.
    fn term_text(&self, e: &[i32], c: &Rational) -> String {
        let mono = self.monomial_text(e);
        let mag = c.abs();
        if mono.is_empty() {
            fmt_rational(&mag)
        } else if mag.is_one() {
            mono
        } else {
            format!("{}*{}", fmt_rational(&mag), mono)
        }
    }
}

impl fmt::Display for MultiPoly {
    /// Terms in descending graded-lex order with explicit signs, e.g.
    /// `t^2 - 1/2*t + 3`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (k, (e, c)) in self.terms.iter().rev().enumerate() {
            let body = self.term_text(&e.0, c);
            match (k, c.is_negative()) {
                (0, false) => write!(f, "{body}")?,
                (0, true) => write!(f, "-{body}")?,
                (_, false) => write!(f, " + {body}")?,
                (_, true) => write!(f, " - {body}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t_ctx() -> VarContext {
        VarContext::new(&["t"])
    }

    #[test]
    fn binomial_of_t() {
        let ctx = t_ctx();
        let t = ctx.var("t").unwrap();
        let b2 = poly_binomial(&t, 2);
        let expect = (&(&t * &t) - &t).scale(&rat(1, 2));
        assert_eq!(b2, expect);
        assert!(poly_binomial(&t, 0).is_one());
    }

    #[test]
    fn binomial_of_sum() {
        let ctx = VarContext::new(&["t1", "t2"]);
        let s = &ctx.var("t1").unwrap() + &ctx.var("t2").unwrap();
        let one = MultiPoly::one(&ctx);
        let expect = (&s * &(&s - &one)).scale(&rat(1, 2));
        assert_eq!(poly_binomial(&s, 2), expect);
    }

    #[test]
    fn display_is_graded_lex_descending() {
        let ctx = t_ctx();
        let t = ctx.var("t").unwrap();
        let p = &(&t * &t) - &MultiPoly::one(&ctx);
        assert_eq!(p.to_string(), "t^2 - 1");
        let q = (&t.scale(&rat(-3, 2)) + &MultiPoly::from_int(&ctx, 2)).scale(&int(1));
        assert_eq!(q.to_string(), "-3/2*t + 2");
        assert_eq!(MultiPoly::zero(&ctx).to_string(), "0");
    }

    #[test]
    fn laurent_monomials_display_negative_powers() {
        let ctx = VarContext::laurent(&["s", "t"]);
        let p = MultiPoly::monomial(&ctx, vec![-1, 2], int(1)).unwrap();
        assert_eq!(p.to_string(), "s^-1*t^2");
    }

    #[test]
    fn negative_exponent_rejected_outside_laurent() {
        let ctx = t_ctx();
        assert!(matches!(
            MultiPoly::monomial(&ctx, vec![-1], int(1)),
            Err(ArithError::NegativeExponent(_))
        ));
    }

    #[test]
    fn context_mismatch_is_an_error() {
        let a = VarContext::new(&["t"]).var("t").unwrap();
        let b = VarContext::new(&["t1"]).var("t1").unwrap();
        assert_eq!(a.checked_add(&b), Err(ArithError::ContextMismatch));
        // equal contents are the same context
        let c = VarContext::new(&["t"]).var("t").unwrap();
        assert!(a.checked_mul(&c).is_ok());
    }

    #[test]
    fn exact_division_laurent() {
        let ctx = VarContext::laurent(&["s"]);
        let s = ctx.var("s").unwrap();
        let bracket = |i: i64| &s.powi(i).unwrap() - &s.powi(-i).unwrap();
        // <3>/<1> = s^2 + 1 + s^-2
        let q = bracket(3).div_exact(&bracket(1)).unwrap();
        assert_eq!(q.to_string(), "s^2 + 1 + s^-2");
        assert_eq!(
            bracket(3).div_exact(&bracket(2)),
            Err(ArithError::NotDivisible)
        );
    }

    #[test]
    fn exact_division_multivariate() {
        let ctx = VarContext::new(&["x", "y"]);
        let x = ctx.var("x").unwrap();
        let y = ctx.var("y").unwrap();
        let a = &(&x + &y) * &(&x - &y.scale(&int(2)));
        let b = &x + &y;
        assert_eq!(a.div_exact(&b).unwrap(), &x - &y.scale(&int(2)));
        assert_eq!(x.div_exact(&y), Err(ArithError::NotDivisible));
    }

    #[test]
    fn map_vars_specialises() {
        let ctx = VarContext::new(&["t1", "t2"]);
        let target = VarContext::new(&["t"]);
        let t = target.var("t").unwrap();
        let p = &ctx.var("t1").unwrap() * &ctx.var("t2").unwrap();
        let img = p.map_vars(&target, &[t.clone(), -&t]).unwrap();
        assert_eq!(img, -&(&t * &t));
    }
}
