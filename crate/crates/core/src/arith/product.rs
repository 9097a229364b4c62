//! Truncated infinite products of factors `(1 - c q^k)^e`.

use num_traits::One;

use super::poly::{MultiPoly, Rational, VarContext};
use super::series::QSeries;
use super::ArithError;

/// The factor `(1 - scale * q^shift)^exponent`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductFactor {
    pub shift: usize,
    pub scale: MultiPoly,
    pub exponent: MultiPoly,
}

impl ProductFactor {
    /// `(1 - q^shift)^exponent`.
    pub fn new(shift: usize, exponent: MultiPoly) -> Result<Self, ArithError> {
        if shift == 0 {
            return Err(ArithError::Precondition(
                "factor shift must be at least 1".into(),
            ));
        }
        let scale = MultiPoly::one(exponent.ctx());
        Ok(ProductFactor {
            shift,
            scale,
            exponent,
        })
    }

    pub fn with_scale(mut self, scale: MultiPoly) -> Self {
        self.scale = scale;
        self
    }

    /// `exponent * log(1 - scale q^shift)`, i.e.
    /// `-exponent * sum_j scale^j q^{j shift} / j`.
    pub fn log_series(&self, order: usize) -> Result<QSeries, ArithError> {
        let ctx = self.exponent.ctx();
        if self.scale.ctx() != ctx {
            return Err(ArithError::ContextMismatch);
        }
        let mut coeffs = vec![MultiPoly::zero(ctx); order + 1];
        let mut power = MultiPoly::one(ctx);
        let mut j = 1;
        while j * self.shift <= order {
            power = &power * &self.scale;
            let c = (&power * &self.exponent).scale(&Rational::new((-1).into(), (j as i64).into()));
            coeffs[j * self.shift] = c;
            j += 1;
        }
        QSeries::from_coeffs(ctx, coeffs)
    }

    /// The factor expanded on its own, through [`QSeries::pow_poly`].
    pub fn to_series(&self, order: usize) -> Result<QSeries, ArithError> {
        let ctx = self.exponent.ctx();
        let base = QSeries::one(ctx, order).checked_sub(&QSeries::term(
            self.scale.clone(),
            self.shift,
            order,
        ))?;
        base.pow_poly(&self.exponent)
    }
}

/// The factors `(1 - c_n q^{slope n - offset})^exponent` for `n >= 1`.
///
/// With `alternating` set the scale of the `n`-th factor is
/// `(-1)^{n+1} scale`, which covers products such as `prod (1 + (-q^2)^n)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorFamily {
    slope: usize,
    offset: usize,
    scale: MultiPoly,
    alternating: bool,
    exponent: MultiPoly,
}

impl FactorFamily {
    /// Rejects families whose shift does not grow with `n` or whose first
    /// shift is not positive.
    pub fn new(slope: usize, offset: usize, exponent: MultiPoly) -> Result<Self, ArithError> {
        if slope == 0 {
            return Err(ArithError::NonGrowingShift);
        }
        if offset >= slope {
            return Err(ArithError::Precondition(format!(
                "shift {slope}n - {offset} is not positive at n = 1"
            )));
        }
        let scale = MultiPoly::one(exponent.ctx());
        Ok(FactorFamily {
            slope,
            offset,
            scale,
            alternating: false,
            exponent,
        })
    }

    pub fn with_scale(mut self, scale: MultiPoly) -> Self {
        self.scale = scale;
        self
    }

    pub fn alternating(mut self) -> Self {
        self.alternating = true;
        self
    }

    pub fn shift(&self, n: usize) -> usize {
        self.slope * n - self.offset
    }

    pub fn factor(&self, n: usize) -> ProductFactor {
        let scale = if self.alternating && n.is_multiple_of(2) {
            -&self.scale
        } else {
            self.scale.clone()
        };
        ProductFactor {
            shift: self.shift(n),
            scale,
            exponent: self.exponent.clone(),
        }
    }

    /// Factors with shift at most `order`; the rest are 1 modulo `q^{order+1}`.
    pub fn factors_up_to(&self, order: usize) -> Vec<ProductFactor> {
        (1..)
            .map_while(|n| (self.shift(n) <= order).then(|| self.factor(n)))
            .collect()
    }
}

/// Product of finitely many factors, modulo `q^{order+1}`.
///
/// The logarithms of all factors are summed and exponentiated once.
pub fn finite_product(
    ctx: &VarContext,
    factors: &[ProductFactor],
    order: usize,
) -> Result<QSeries, ArithError> {
    let mut log = QSeries::zero(ctx, order);
    for f in factors {
        if f.shift > order {
            continue;
        }
        log = log.checked_add(&f.log_series(order)?)?;
    }
    log.exp()
}

/// Product over all `n >= 1` of every family, exact modulo `q^{order+1}`.
pub fn truncated_infinite_product(
    ctx: &VarContext,
    families: &[FactorFamily],
    order: usize,
) -> Result<QSeries, ArithError> {
    let factors: Vec<ProductFactor> = families
        .iter()
        .flat_map(|f| f.factors_up_to(order))
        .collect();
    finite_product(ctx, &factors, order)
}

/// Multiplies the factors one at a time with [`ProductFactor::to_series`].
/// Slower, and independent of the log-sum route.
pub fn product_by_multiplication(
    ctx: &VarContext,
    factors: &[ProductFactor],
    order: usize,
) -> Result<QSeries, ArithError> {
    let mut acc = QSeries::one(ctx, order);
    for f in factors.iter().filter(|f| f.shift <= order) {
        acc = acc.checked_mul(&f.to_series(order)?)?;
    }
    Ok(acc)
}

/// Convenience: `1` as a polynomial exponent.
pub fn unit_exponent(ctx: &VarContext) -> MultiPoly {
    MultiPoly::constant(ctx, Rational::one())
}
