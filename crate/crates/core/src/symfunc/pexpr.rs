use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::arith::{fmt_rational, MultiPoly, Rational, VarContext};
use crate::partitions::Partition;

use super::SymError;

/// Element of `Q[p_1, p_2, ...]` with monomials of weight above a cutoff
/// discarded. The monomial `p_{μ1} p_{μ2} ...` is indexed by the partition μ.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PExpr {
    cutoff: usize,
    terms: BTreeMap<Partition, Rational>,
}

/// `z_μ = prod_k k^{m_k} m_k!`.
pub fn z_lambda(mu: &Partition) -> BigInt {
    let mut z = BigInt::one();
    for (k, m) in mu.multiplicities() {
        for i in 1..=m {
            z *= BigInt::from(k) * BigInt::from(i);
        }
    }
    z
}

impl PExpr {
    pub fn zero(cutoff: usize) -> Self {
        PExpr {
            cutoff,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(cutoff: usize) -> Self {
        Self::constant(Rational::one(), cutoff)
    }

    pub fn constant(c: Rational, cutoff: usize) -> Self {
        let mut e = Self::zero(cutoff);
        e.add_term(Partition::empty(), c);
        e
    }

    /// The monomial `c * p_μ`; zero when `|μ|` exceeds the cutoff.
    pub fn monomial(mu: Partition, c: Rational, cutoff: usize) -> Self {
        let mut e = Self::zero(cutoff);
        e.add_term(mu, c);
        e
    }

    /// The power sum `p_k`.
    pub fn power_sum(k: usize, cutoff: usize) -> Result<Self, SymError> {
        if k == 0 || k > cutoff {
            return Err(SymError::WeightTooLarge { weight: k, cutoff });
        }
        Ok(Self::monomial(
            Partition::new(vec![k]).unwrap(),
            Rational::one(),
            cutoff,
        ))
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Partition, &Rational)> {
        self.terms.iter()
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

    pub fn coeff(&self, mu: &Partition) -> Rational {
        self.terms.get(mu).cloned().unwrap_or_else(Rational::zero)
    }

    /// Largest weight of a stored monomial.
    pub fn weight(&self) -> Option<usize> {
        self.terms.keys().map(Partition::size).max()
    }

    pub fn add_term(&mut self, mu: Partition, c: Rational) {
        if c.is_zero() || mu.size() > self.cutoff {
            return;
        }
        let slot = self.terms.entry(mu).or_insert_with(Rational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    fn check(&self, other: &Self) -> Result<(), SymError> {
        if self.cutoff == other.cutoff {
            Ok(())
        } else {
            Err(SymError::CutoffMismatch(self.cutoff, other.cutoff))
        }
    }

    /// `self += c * other`.
    pub fn add_scaled(&mut self, other: &Self, c: &Rational) -> Result<(), SymError> {
        self.check(other)?;
        for (mu, v) in &other.terms {
            self.add_term(mu.clone(), v * c);
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, SymError> {
        let mut out = self.clone();
        out.add_scaled(other, &Rational::one())?;
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, SymError> {
        let mut out = self.clone();
        out.add_scaled(other, &-Rational::one())?;
        Ok(out)
    }

    /// Product with monomials above the cutoff dropped.
    pub fn checked_mul(&self, other: &Self) -> Result<Self, SymError> {
        self.check(other)?;
        let mut out = Self::zero(self.cutoff);
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                if a.size() + b.size() <= self.cutoff {
                    out.add_term(a.union(b), ca * cb);
                }
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let mut out = Self::zero(self.cutoff);
        for (mu, v) in &self.terms {
            out.add_term(mu.clone(), v * c);
        }
        out
    }

    /// Component of weight exactly `w`.
    pub fn homogeneous_part(&self, w: usize) -> Self {
        PExpr {
            cutoff: self.cutoff,
            terms: self
                .terms
                .iter()
                .filter(|(mu, _)| mu.size() == w)
                .map(|(mu, c)| (mu.clone(), c.clone()))
                .collect(),
        }
    }

    /// Substitutes `p_k -> values[k-1]`. Every part of every stored monomial
    /// needs a value.
    pub fn substitute(
        &self,
        ctx: &VarContext,
        values: &[MultiPoly],
    ) -> Result<MultiPoly, SymError> {
        let mut out = MultiPoly::zero(ctx);
        for (mu, c) in &self.terms {
            let mut term = MultiPoly::constant(ctx, c.clone());
            for &k in mu.parts() {
                let v = values.get(k - 1).ok_or(SymError::MissingPowerSum(k))?;
                term = term.checked_mul(v)?;
            }
            out = out.checked_add(&term)?;
        }
        Ok(out)
    }

    /// Rewrites the element as a polynomial in variables named
    /// `{prefix}1 .. {prefix}W` of `ctx`.
    pub fn to_poly(&self, ctx: &VarContext, prefix: &str) -> Result<MultiPoly, SymError> {
        let w = self.weight().unwrap_or(0);
        let values = (1..=w)
            .map(|k| ctx.var(&format!("{prefix}{k}")).map_err(SymError::from))
            .collect::<Result<Vec<_>, _>>()?;
        self.substitute(ctx, &values)
    }
}

/// Bilinear pairing with `<p_μ, p_ν> = z_μ δ_{μν}`.
pub fn hall_inner(a: &PExpr, b: &PExpr) -> Result<Rational, SymError> {
    a.check(b)?;
    let mut acc = Rational::zero();
    for (mu, ca) in &a.terms {
        if let Some(cb) = b.terms.get(mu) {
            acc += ca * cb * Rational::from_integer(z_lambda(mu));
        }
    }
    Ok(acc)
}

/// Substitutes `p_k -> v` for every `k`.
pub fn specialize_pk_const(a: &PExpr, v: &MultiPoly) -> Result<MultiPoly, SymError> {
    let w = a.weight().unwrap_or(0);
    a.substitute(v.ctx(), &vec![v.clone(); w])
}

/// Substitutes `p_k -> sum_j values[j]^k`.
pub fn specialize_finite_vars(
    a: &PExpr,
    ctx: &VarContext,
    values: &[MultiPoly],
) -> Result<MultiPoly, SymError> {
    let w = a.weight().unwrap_or(0);
    a.substitute(ctx, &power_sums_of(ctx, values, w)?)
}

/// `[p_1(values), ..., p_w(values)]`.
pub fn power_sums_of(
    ctx: &VarContext,
    values: &[MultiPoly],
    w: usize,
) -> Result<Vec<MultiPoly>, SymError> {
    let mut powers: Vec<MultiPoly> = values.to_vec();
    let mut sums = Vec::with_capacity(w);
    for k in 1..=w {
        if k > 1 {
            for (p, v) in powers.iter_mut().zip(values) {
                *p = p.checked_mul(v)?;
            }
        }
        let mut s = MultiPoly::zero(ctx);
        for p in &powers {
            s = s.checked_add(p)?;
        }
        sums.push(s);
    }
    Ok(sums)
}

/// Context `{prefix}1, ..., {prefix}w`.
pub fn power_sum_names(prefix: &str, w: usize) -> Vec<String> {
    (1..=w).map(|k| format!("{prefix}{k}")).collect()
}

impl fmt::Display for PExpr {
    /// Monomials printed as `p2*p1^2`, by descending weight and then with
    /// more parts first.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut entries: Vec<_> = self.terms.iter().collect();
        entries.sort_by(|(a, _), (b, _)| b.size().cmp(&a.size()).then_with(|| b.cmp(a)));
        for (k, (mu, c)) in entries.into_iter().enumerate() {
            let mono = mu
                .multiplicities()
                .iter()
                .rev()
                .map(|&(part, m)| {
                    if m == 1 {
                        format!("p{part}")
                    } else {
                        format!("p{part}^{m}")
                    }
                })
                .collect::<Vec<_>>()
                .join("*");
            let mag = c.abs();
            let body = if mono.is_empty() {
                fmt_rational(&mag)
            } else if mag.is_one() {
                mono
            } else {
                format!("{}*{}", fmt_rational(&mag), mono)
            };
            let sign = if c.is_negative() { "-" } else { "+" };
            if k == 0 {
                write!(f, "{}{}", if c.is_negative() { "-" } else { "" }, body)?;
            } else {
                write!(f, " {sign} {body}")?;
            }
        }
        Ok(())
    }
}
