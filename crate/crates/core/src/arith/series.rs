//! Power series in `q` truncated at a fixed order, with polynomial
//! coefficients.

use std::fmt;

use num_traits::{One, Signed, Zero};

use super::poly::{fmt_rational, int, poly_binomial, MultiPoly, Rational, VarContext};
use super::ArithError;

/// `c0 + c1 q + ... + cN q^N  (mod q^{N+1})`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QSeries {
    ctx: VarContext,
    coeffs: Vec<MultiPoly>,
}

impl QSeries {
    pub fn zero(ctx: &VarContext, order: usize) -> Self {
        QSeries {
            ctx: ctx.clone(),
            coeffs: vec![MultiPoly::zero(ctx); order + 1],
        }
    }

    pub fn one(ctx: &VarContext, order: usize) -> Self {
        let mut s = Self::zero(ctx, order);
        s.coeffs[0] = MultiPoly::one(ctx);
        s
    }

    /// `c * q^power`, zero when `power > order`.
    pub fn term(c: MultiPoly, power: usize, order: usize) -> Self {
        let mut s = Self::zero(c.ctx(), order);
        if power <= order {
            s.coeffs[power] = c;
        }
        s
    }

    /// Builds a series from its coefficients; the order is `coeffs.len() - 1`.
    pub fn from_coeffs(ctx: &VarContext, coeffs: Vec<MultiPoly>) -> Result<Self, ArithError> {
        if coeffs.is_empty() {
            return Err(ArithError::Precondition(
                "a series needs at least one coefficient".into(),
            ));
        }
        if coeffs.iter().any(|c| c.ctx() != ctx) {
            return Err(ArithError::ContextMismatch);
        }
        Ok(QSeries {
            ctx: ctx.clone(),
            coeffs,
        })
    }

    pub fn ctx(&self) -> &VarContext {
        &self.ctx
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, k: usize) -> &MultiPoly {
        &self.coeffs[k]
    }

    pub fn coeffs(&self) -> &[MultiPoly] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<MultiPoly> {
        self.coeffs
    }

    pub fn truncate(&self, order: usize) -> Self {
        let n = order.min(self.order());
        QSeries {
            ctx: self.ctx.clone(),
            coeffs: self.coeffs[..=n].to_vec(),
        }
    }

    fn check(&self, other: &Self) -> Result<usize, ArithError> {
        if self.ctx != other.ctx {
            return Err(ArithError::ContextMismatch);
        }
        Ok(self.order().min(other.order()))
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, ArithError> {
        let n = self.check(other)?;
        Ok(QSeries {
            ctx: self.ctx.clone(),
            coeffs: (0..=n)
                .map(|k| &self.coeffs[k] + &other.coeffs[k])
                .collect(),
        })
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, ArithError> {
        let n = self.check(other)?;
        Ok(QSeries {
            ctx: self.ctx.clone(),
            coeffs: (0..=n)
                .map(|k| &self.coeffs[k] - &other.coeffs[k])
                .collect(),
        })
    }

    /// Cauchy product truncated at the smaller of the two orders.
    pub fn checked_mul(&self, other: &Self) -> Result<Self, ArithError> {
        let n = self.check(other)?;
        let mut out = Self::zero(&self.ctx, n);
        for i in 0..=n {
            if self.coeffs[i].is_zero() {
                continue;
            }
            for j in 0..=(n - i) {
                if other.coeffs[j].is_zero() {
                    continue;
                }
                let prod = &self.coeffs[i] * &other.coeffs[j];
                out.coeffs[i + j] = &out.coeffs[i + j] + &prod;
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &MultiPoly) -> Result<Self, ArithError> {
        if c.ctx() != &self.ctx {
            return Err(ArithError::ContextMismatch);
        }
        Ok(self.map_coeffs(|p| p * c))
    }

    pub fn scale_rational(&self, c: &Rational) -> Self {
        self.map_coeffs(|p| p.scale(c))
    }

    pub fn neg(&self) -> Self {
        self.scale_rational(&-Rational::one())
    }

    /// Applies `f` coefficient-wise; `f` must stay in the same context.
    pub fn map_coeffs<F: FnMut(&MultiPoly) -> MultiPoly>(&self, f: F) -> Self {
        QSeries {
            ctx: self.ctx.clone(),
            coeffs: self.coeffs.iter().map(f).collect(),
        }
    }

    /// Applies a coefficient homomorphism into another context.
    pub fn map_vars(&self, target: &VarContext, images: &[MultiPoly]) -> Result<Self, ArithError> {
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| c.map_vars(target, images))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(QSeries {
            ctx: target.clone(),
            coeffs,
        })
    }

    /// The substitution `q -> -q`.
    pub fn negate_q(&self) -> Self {
        QSeries {
            ctx: self.ctx.clone(),
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| if k % 2 == 1 { -c } else { c.clone() })
                .collect(),
        }
    }

    /// First power of `q` at which the two series differ, up to the common
    /// order.
    pub fn first_difference(&self, other: &Self) -> Option<usize> {
        let n = self.order().min(other.order());
        (0..=n).find(|&k| self.coeffs[k] != other.coeffs[k])
    }

    /// Multiplicative inverse. The constant coefficient must be a nonzero
    /// rational.
    pub fn inv(&self) -> Result<Self, ArithError> {
        let c0 = self.coeffs[0]
            .constant_value()
            .filter(|c| !c.is_zero())
            .ok_or(ArithError::NotInvertible)?;
        let c0_inv = c0.recip();
        let n = self.order();
        let mut b = Self::zero(&self.ctx, n);
        b.coeffs[0] = MultiPoly::constant(&self.ctx, c0_inv.clone());
        for k in 1..=n {
            let mut acc = MultiPoly::zero(&self.ctx);
            for j in 1..=k {
                if !self.coeffs[j].is_zero() && !b.coeffs[k - j].is_zero() {
                    acc = &acc + &(&self.coeffs[j] * &b.coeffs[k - j]);
                }
            }
            b.coeffs[k] = acc.scale(&-c0_inv.clone());
        }
        Ok(b)
    }

    /// Logarithm of a series with constant term 1.
    pub fn log(&self) -> Result<Self, ArithError> {
        if !self.coeffs[0].is_one() {
            return Err(ArithError::Precondition("log needs constant term 1".into()));
        }
        let n = self.order();
        let mut b = Self::zero(&self.ctx, n);
        // n a_n = sum_{k=1}^{n} k b_k a_{n-k}
        for m in 1..=n {
            let mut acc = self.coeffs[m].scale(&int(m as i64));
            for k in 1..m {
                if !b.coeffs[k].is_zero() && !self.coeffs[m - k].is_zero() {
                    let prod = (&b.coeffs[k] * &self.coeffs[m - k]).scale(&int(k as i64));
                    acc = &acc - &prod;
                }
            }
            b.coeffs[m] = acc.scale(&Rational::new(1.into(), (m as i64).into()));
        }
        Ok(b)
    }

    /// Exponential of a series with zero constant term.
    pub fn exp(&self) -> Result<Self, ArithError> {
        if !self.coeffs[0].is_zero() {
            return Err(ArithError::Precondition("exp needs constant term 0".into()));
        }
        let n = self.order();
        let mut b = Self::one(&self.ctx, n);
        // n b_n = sum_{k=1}^{n} k a_k b_{n-k}
        let weighted: Vec<MultiPoly> = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, a)| a.scale(&int(k as i64)))
            .collect();
        for m in 1..=n {
            let mut acc = MultiPoly::zero(&self.ctx);
            for (k, w) in weighted.iter().enumerate().take(m + 1).skip(1) {
                if !w.is_zero() && !b.coeffs[m - k].is_zero() {
                    acc = &acc + &(w * &b.coeffs[m - k]);
                }
            }
            b.coeffs[m] = acc.scale(&Rational::new(1.into(), (m as i64).into()));
        }
        Ok(b)
    }

    /// `self^e = exp(e * log(self))` for a polynomial exponent `e`; the
    /// constant term must be 1.
    pub fn pow_poly(&self, e: &MultiPoly) -> Result<Self, ArithError> {
        self.log()?.scale(e)?.exp()
    }

    /// Integer power by repeated multiplication (and inversion for `m < 0`).
    pub fn pow_int(&self, m: i64) -> Result<Self, ArithError> {
        let base = if m < 0 { self.inv()? } else { self.clone() };
        let mut acc = Self::one(&self.ctx, self.order());
        for _ in 0..m.unsigned_abs() {
            acc = acc.checked_mul(&base)?;
        }
        Ok(acc)
    }

    /// `self^e` through the binomial series `sum_k C(e, k) (self - 1)^k`.
    /// An independent route to [`QSeries::pow_poly`].
    pub fn pow_binomial(&self, e: &MultiPoly) -> Result<Self, ArithError> {
        if !self.coeffs[0].is_one() {
            return Err(ArithError::Precondition(
                "binomial power needs constant term 1".into(),
            ));
        }
        if e.ctx() != &self.ctx {
            return Err(ArithError::ContextMismatch);
        }
        let n = self.order();
        let mut x = self.clone();
        x.coeffs[0] = MultiPoly::zero(&self.ctx);
        let mut acc = Self::one(&self.ctx, n);
        let mut xk = Self::one(&self.ctx, n);
        for k in 1..=n {
            xk = xk.checked_mul(&x)?;
            acc = acc.checked_add(&xk.scale(&poly_binomial(e, k as u32))?)?;
        }
        Ok(acc)
    }
}

impl fmt::Display for QSeries {
    /// `c0 + c1*q + ... + cN*q^N`, zero coefficients omitted.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let qpart = match k {
                0 => String::new(),
                1 => "q".to_string(),
                _ => format!("q^{k}"),
            };
            let (negative, body) = if let Some(v) = c.constant_value() {
                let mag = v.abs();
                let body = if qpart.is_empty() {
                    fmt_rational(&mag)
                } else if mag.is_one() {
                    qpart.clone()
                } else {
                    format!("{}*{}", fmt_rational(&mag), qpart)
                };
                (v.is_negative(), body)
            } else if c.is_monomial() {
                let (_, lead) = c.terms().next().unwrap();
                let text = if lead.is_negative() {
                    (-c).to_string()
                } else {
                    c.to_string()
                };
                let body = if qpart.is_empty() {
                    text
                } else {
                    format!("{text}*{qpart}")
                };
                (lead.is_negative(), body)
            } else {
                let body = if qpart.is_empty() {
                    format!("({c})")
                } else {
                    format!("({c})*{qpart}")
                };
                (false, body)
            };
            match (first, negative) {
                (true, false) => write!(f, "{body}")?,
                (true, true) => write!(f, "-{body}")?,
                (false, false) => write!(f, " + {body}")?,
                (false, true) => write!(f, " - {body}")?,
            }
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}
