//! Both sides of each generating-function identity, and an exact checker.
//!
//! Every identity is compared coefficient by coefficient in `q`, with
//! coefficients kept as exact polynomials in the free parameters.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_traits::{One, Zero};
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::arith::{
    finite_product, int, poly_binomial, rat, truncated_infinite_product, ArithError, FactorFamily,
    MultiPoly, ProductFactor, QSeries, Rational, VarContext,
};
use crate::partitions::{
    cell_stats, enumerate_partitions, weight_product, ContentKind, PartitionError, WeightFactor,
};
use crate::symfunc::{power_sum_names, specialize_finite_vars, LrCache, SymError, SymRing};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Error)]
pub enum IdentityError {
    #[error("unknown identity {0:?}; valid ids: {valid}", valid = IdentityId::valid_list())]
    UnknownIdentity(String),
    #[error("{0} has no product-form right-hand side")]
    NoProductForm(IdentityId),
    #[error("p-weight cutoff {pweight} is below the q-order {order}")]
    InsufficientCutoff { order: usize, pweight: usize },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error(transparent)]
    Partition(#[from] PartitionError),
    #[error(transparent)]
    Sym(#[from] SymError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum IdentityId {
    ThmMainCsp,
    CorMainCo,
    ThmSpsp,
    ThmCoco,
    CorSign,
    ThmCspC,
    ExConj,
    ThmSumSp,
    ThmSumSpsp,
    LemCauchySpS,
    RemQst,
}

impl IdentityId {
    pub const ALL: [IdentityId; 11] = [
        IdentityId::ThmMainCsp,
        IdentityId::CorMainCo,
        IdentityId::ThmSpsp,
        IdentityId::ThmCoco,
        IdentityId::CorSign,
        IdentityId::ThmCspC,
        IdentityId::ExConj,
        IdentityId::ThmSumSp,
        IdentityId::ThmSumSpsp,
        IdentityId::LemCauchySpS,
        IdentityId::RemQst,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            IdentityId::ThmMainCsp => "thm-main-csp",
            IdentityId::CorMainCo => "cor-main-co",
            IdentityId::ThmSpsp => "thm-spsp",
            IdentityId::ThmCoco => "thm-coco",
            IdentityId::CorSign => "cor-sign",
            IdentityId::ThmCspC => "thm-csp-c",
            IdentityId::ExConj => "ex-conj63a",
            IdentityId::ThmSumSp => "thm-sum-sp",
            IdentityId::ThmSumSpsp => "thm-sum-spsp",
            IdentityId::LemCauchySpS => "lem-cauchy-sp-s",
            IdentityId::RemQst => "rem-qst",
        }
    }

    pub fn valid_list() -> String {
        Self::ALL
            .iter()
            .map(|i| i.as_str())
            .collect::<Vec<_>>()
            .join(", ")
    }

    /// Default `q`-order (for `cor-sign`, the largest `n`).
    pub fn default_order(self) -> usize {
        match self {
            IdentityId::ThmMainCsp
            | IdentityId::CorMainCo
            | IdentityId::CorSign
            | IdentityId::ExConj => 12,
            IdentityId::ThmSpsp | IdentityId::ThmCoco | IdentityId::ThmCspC => 10,
            IdentityId::ThmSumSp => 8,
            IdentityId::ThmSumSpsp | IdentityId::LemCauchySpS => 6,
            IdentityId::RemQst => 3,
        }
    }

    fn uses_pweight(self) -> bool {
        matches!(self, IdentityId::ThmSumSp | IdentityId::ThmSumSpsp)
    }
}

impl fmt::Display for IdentityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for IdentityId {
    type Err = IdentityError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .iter()
            .copied()
            .find(|i| i.as_str() == s)
            .ok_or_else(|| IdentityError::UnknownIdentity(s.to_string()))
    }
}

impl Serialize for IdentityId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

/// Truncation parameters. `None` fields fall back to per-identity defaults.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Params {
    pub order: Option<usize>,
    /// p-weight cutoff for the power-sum identities; defaults to the order.
    pub pweight: Option<usize>,
    /// `n` and `m` of the Laurent specialization.
    pub n: usize,
    pub m: usize,
    /// Number of `y` and `y'` variables in the Cauchy identity.
    pub y_vars: usize,
    pub yp_vars: usize,
    /// Optional cap on the total `y, y'` degree in the Cauchy identity; both
    /// sides are truncated to it before comparison.
    pub aux_degree: Option<usize>,
}

impl Default for Params {
    fn default() -> Self {
        Params {
            order: None,
            pweight: None,
            n: 1,
            m: 1,
            y_vars: 2,
            yp_vars: 2,
            aux_degree: None,
        }
    }
}

impl Params {
    pub fn with_order(order: usize) -> Self {
        Params {
            order: Some(order),
            ..Self::default()
        }
    }

    pub fn order_for(&self, id: IdentityId) -> usize {
        self.order.unwrap_or_else(|| id.default_order())
    }

    pub fn pweight_for(&self, id: IdentityId) -> usize {
        self.pweight.unwrap_or_else(|| self.order_for(id))
    }

    fn to_json(&self, id: IdentityId) -> Value {
        let mut m = serde_json::Map::new();
        m.insert("order".into(), json!(self.order_for(id)));
        match id {
            IdentityId::ThmSumSp | IdentityId::ThmSumSpsp => {
                m.insert("pweight".into(), json!(self.pweight_for(id)));
            }
            IdentityId::LemCauchySpS => {
                m.insert("y_vars".into(), json!(self.y_vars));
                m.insert("yp_vars".into(), json!(self.yp_vars));
                m.insert("aux_degree".into(), json!(self.aux_degree));
            }
            IdentityId::RemQst => {
                m.insert("n".into(), json!(self.n));
                m.insert("m".into(), json!(self.m));
            }
            _ => {}
        }
        Value::Object(m)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Equal,
    Mismatch {
        q_power: usize,
        lhs: String,
        rhs: String,
    },
}

impl Outcome {
    fn to_json(&self) -> Value {
        match self {
            Outcome::Equal => json!("equal"),
            Outcome::Mismatch { q_power, lhs, rhs } => {
                json!({ "q_power": q_power, "lhs": lhs, "rhs": rhs })
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub identity: IdentityId,
    pub params: Value,
    pub outcome: Outcome,
    pub millis: u128,
}

impl VerificationReport {
    pub fn is_equal(&self) -> bool {
        self.outcome == Outcome::Equal
    }

    /// `{"identity", "params", "outcome", "millis"}` with keys sorted.
    pub fn to_json(&self) -> Value {
        json!({
            "identity": self.identity.as_str(),
            "params": self.params,
            "outcome": self.outcome.to_json(),
            "millis": self.millis as u64,
        })
    }

    pub fn to_json_string(&self) -> String {
        self.to_json().to_string()
    }
}

/// Milliseconds since the call; always zero on targets without a clock.
#[cfg(not(target_arch = "wasm32"))]
fn stopwatch() -> impl Fn() -> u128 {
    let start = std::time::Instant::now();
    move || start.elapsed().as_millis()
}

#[cfg(target_arch = "wasm32")]
fn stopwatch() -> impl Fn() -> u128 {
    || 0
}

/// First coefficient at which two series differ.
pub fn compare(lhs: &QSeries, rhs: &QSeries) -> Outcome {
    match lhs.first_difference(rhs) {
        None => Outcome::Equal,
        Some(k) => Outcome::Mismatch {
            q_power: k,
            lhs: lhs.coeff(k).to_string(),
            rhs: rhs.coeff(k).to_string(),
        },
    }
}

fn first_mismatch(outcomes: impl IntoIterator<Item = Outcome>) -> Outcome {
    outcomes
        .into_iter()
        .find(|o| *o != Outcome::Equal)
        .unwrap_or(Outcome::Equal)
}

// ---------------------------------------------------------------------------
// contexts

pub fn t_context() -> VarContext {
    VarContext::new(&["t"])
}

pub fn t1t2_context() -> VarContext {
    VarContext::new(&["t1", "t2"])
}

/// `p1..pW`.
pub fn p_context(w: usize) -> VarContext {
    VarContext::new(&power_sum_names("p", w))
}

/// `p1..pW, p'1..p'W`.
pub fn pp_context(w: usize) -> VarContext {
    let mut names = power_sum_names("p", w);
    names.extend(power_sum_names("p'", w));
    VarContext::new(&names)
}

/// `y1..ya, y'1..y'b`.
pub fn cauchy_context(a: usize, b: usize) -> VarContext {
    let mut names: Vec<String> = (1..=a).map(|i| format!("y{i}")).collect();
    names.extend((1..=b).map(|j| format!("y'{j}")));
    VarContext::new(&names)
}

pub fn qst_context() -> VarContext {
    VarContext::laurent(&["s", "t"])
}

fn var(ctx: &VarContext, name: &str) -> MultiPoly {
    ctx.var(name).expect("variable declared by the builder")
}

fn binom2(x: &MultiPoly) -> MultiPoly {
    poly_binomial(x, 2)
}

fn plus_one(x: &MultiPoly) -> MultiPoly {
    x + &MultiPoly::one(x.ctx())
}

fn minus_one(x: &MultiPoly) -> MultiPoly {
    x - &MultiPoly::one(x.ctx())
}

// ---------------------------------------------------------------------------
// left-hand sides

/// `sum_{n <= N} q^n sum_{λ ⊢ n} weight_product(λ, spec)`.
pub fn lhs_content_sum(spec: &[WeightFactor], order: usize) -> Result<QSeries, IdentityError> {
    let ctx = spec
        .first()
        .ok_or(PartitionError::EmptyWeightSpec)?
        .shift
        .ctx()
        .clone();
    let level = |n: usize| -> Result<MultiPoly, IdentityError> {
        let mut acc = MultiPoly::zero(&ctx);
        for lambda in enumerate_partitions(n) {
            acc = acc.checked_add(&weight_product(&lambda, spec)?)?;
        }
        Ok(acc)
    };
    let coeffs = per_level(order, level)?;
    Ok(QSeries::from_coeffs(&ctx, coeffs)?)
}

/// Evaluates `f(0), ..., f(order)`, in parallel when enabled.
fn per_level<F>(order: usize, f: F) -> Result<Vec<MultiPoly>, IdentityError>
where
    F: Fn(usize) -> Result<MultiPoly, IdentityError> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..=order).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..=order).map(f).collect()
    }
}

fn check_pweight(order: usize, pweight: usize) -> Result<(), IdentityError> {
    if pweight < order {
        Err(IdentityError::InsufficientCutoff { order, pweight })
    } else {
        Ok(())
    }
}

/// `sum_{|λ| <= N} q^{|λ|} sp_λ(p)` in `Q[p1..pW][[q]]`.
pub fn lhs_sp_partition_function(ring: &SymRing, order: usize) -> Result<QSeries, IdentityError> {
    let w = ring.cutoff();
    check_pweight(order, w)?;
    let ctx = p_context(w);
    let coeffs = per_level(order, |n| {
        let mut acc = MultiPoly::zero(&ctx);
        for lambda in enumerate_partitions(n) {
            acc = acc.checked_add(&ring.symplectic_schur(&lambda)?.to_poly(&ctx, "p")?)?;
        }
        Ok(acc)
    })?;
    Ok(QSeries::from_coeffs(&ctx, coeffs)?)
}

/// `sum_{|λ| <= N} q^{|λ|} sp_λ(p) sp_λ(p')`.
pub fn lhs_spsp_partition_function(ring: &SymRing, order: usize) -> Result<QSeries, IdentityError> {
    let w = ring.cutoff();
    check_pweight(order, w)?;
    let ctx = pp_context(w);
    let coeffs = per_level(order, |n| {
        let mut acc = MultiPoly::zero(&ctx);
        for lambda in enumerate_partitions(n) {
            let sp = ring.symplectic_schur(&lambda)?;
            let a = sp.to_poly(&ctx, "p")?;
            let b = sp.to_poly(&ctx, "p'")?;
            acc = acc.checked_add(&a.checked_mul(&b)?)?;
        }
        Ok(acc)
    })?;
    Ok(QSeries::from_coeffs(&ctx, coeffs)?)
}

/// `sum q^{|λ|} sp_λ(y_1..y_a) s_λ(y'_1..y'_b)`.
pub fn lhs_cauchy_sp_s(
    ring: &SymRing,
    order: usize,
    a: usize,
    b: usize,
) -> Result<QSeries, IdentityError> {
    check_pweight(order, ring.cutoff())?;
    let ctx = cauchy_context(a, b);
    let ys: Vec<MultiPoly> = (1..=a).map(|i| var(&ctx, &format!("y{i}"))).collect();
    let yps: Vec<MultiPoly> = (1..=b).map(|j| var(&ctx, &format!("y'{j}"))).collect();
    let coeffs = per_level(order, |n| {
        let mut acc = MultiPoly::zero(&ctx);
        for lambda in enumerate_partitions(n) {
            let sp = specialize_finite_vars(&ring.symplectic_schur(&lambda)?, &ctx, &ys)?;
            if sp.is_zero() {
                continue;
            }
            let s = specialize_finite_vars(&ring.schur(&lambda)?, &ctx, &yps)?;
            acc = acc.checked_add(&sp.checked_mul(&s)?)?;
        }
        Ok(acc)
    })?;
    Ok(QSeries::from_coeffs(&ctx, coeffs)?)
}

/// `<i>_x = x^i - x^{-i}`.
pub fn bracket(x: &MultiPoly, i: i64) -> Result<MultiPoly, IdentityError> {
    Ok(x.powi(i)?.checked_sub(&x.powi(-i)?)?)
}

/// `sum q^{|λ|} prod <2n + c_sp>_s <2m + c>_t / (<h>_s <h>_t)`, each
/// hook quotient divided exactly in the Laurent ring.
pub fn lhs_qst(n: usize, m: usize, order: usize) -> Result<QSeries, IdentityError> {
    if n == 0 || m == 0 {
        return Err(IdentityError::InvalidParams(
            "n and m must be positive".into(),
        ));
    }
    let ctx = qst_context();
    let s = var(&ctx, "s");
    let t = var(&ctx, "t");
    let coeffs = per_level(order, |k| {
        let mut acc = MultiPoly::zero(&ctx);
        for lambda in enumerate_partitions(k) {
            let mut num = MultiPoly::one(&ctx);
            let mut den = MultiPoly::one(&ctx);
            for c in cell_stats(&lambda) {
                num = num.checked_mul(&bracket(&s, 2 * n as i64 + c.symplectic)?)?;
                num = num.checked_mul(&bracket(&t, 2 * m as i64 + c.content)?)?;
                den = den.checked_mul(&bracket(&s, c.hook as i64)?)?;
                den = den.checked_mul(&bracket(&t, c.hook as i64)?)?;
            }
            if num.is_zero() {
                continue;
            }
            acc = acc.checked_add(&num.div_exact(&den)?)?;
        }
        Ok(acc)
    })?;
    Ok(QSeries::from_coeffs(&ctx, coeffs)?)
}

// ---------------------------------------------------------------------------
// right-hand sides

fn family(slope: usize, offset: usize, e: MultiPoly) -> Result<FactorFamily, IdentityError> {
    Ok(FactorFamily::new(slope, offset, e)?)
}

/// Factor families of the product-form identities.
pub fn product_families(id: IdentityId) -> Result<(VarContext, Vec<FactorFamily>), IdentityError> {
    use IdentityId::*;
    match id {
        ThmMainCsp | CorMainCo => {
            let ctx = t_context();
            let t = var(&ctx, "t");
            let b1 = binom2(&plus_one(&t));
            let b0 = binom2(&t);
            let (top, a8m2, a8m4, a8m6) = if id == ThmMainCsp {
                // (1-q^{8n})^{B1} (1-q^{8n-2})^{-(B1-1)} (1-q^{8n-4})^{B0-1} (1-q^{8n-6})^{-(B0-1)}
                (b1.clone(), -minus_one(&b1), minus_one(&b0), -minus_one(&b0))
            } else {
                // (1-q^{8n})^{B0} (1-q^{8n-6})^{-(B0-1)} (1-q^{8n-4})^{B1-1} (1-q^{8n-2})^{-(B1-1)}
                (b0.clone(), -minus_one(&b1), minus_one(&b1), -minus_one(&b0))
            };
            let fams = vec![
                family(8, 0, top)?,
                family(8, 2, a8m2)?,
                family(8, 4, a8m4)?,
                family(8, 6, a8m6)?,
                family(4, 1, t.clone())?,
                family(4, 3, -&t)?,
            ];
            Ok((ctx, fams))
        }
        ThmSpsp | ThmCoco => {
            let ctx = t1t2_context();
            let t1 = var(&ctx, "t1");
            let t2 = var(&ctx, "t2");
            let b1 = &binom2(&plus_one(&t1)) + &binom2(&plus_one(&t2));
            let b0 = &binom2(&t1) + &binom2(&t2);
            let (e2, e0) = if id == ThmSpsp {
                (minus_one(&b0), b1)
            } else {
                (minus_one(&b1), b0)
            };
            let tt = &t1 * &t2;
            let fams = vec![
                family(4, 2, e2)?,
                family(4, 0, e0)?,
                family(4, 3, -&tt)?,
                family(4, 1, -&tt)?,
            ];
            Ok((ctx, fams))
        }
        ExConj => {
            // prod 1 / ((1 - q^{4n-2}) (1 - q^n)^{-t^2})
            let ctx = t_context();
            let t = var(&ctx, "t");
            let fams = vec![
                family(4, 2, MultiPoly::from_int(&ctx, -1))?,
                family(1, 0, t.pow(2))?,
            ];
            Ok((ctx, fams))
        }
        _ => Err(IdentityError::NoProductForm(id)),
    }
}

/// The right-hand side of a product-form identity, modulo `q^{N+1}`.
pub fn rhs_product(id: IdentityId, order: usize) -> Result<QSeries, IdentityError> {
    if id == IdentityId::ThmCspC {
        // (1-q^2)^{binom(t2,2)} / (1-q)^{t1 t2}
        let ctx = t1t2_context();
        let t1 = var(&ctx, "t1");
        let t2 = var(&ctx, "t2");
        let factors = [
            ProductFactor::new(2, binom2(&t2))?,
            ProductFactor::new(1, -(&t1 * &t2))?,
        ];
        return Ok(finite_product(&ctx, &factors, order)?);
    }
    let (ctx, fams) = product_families(id)?;
    Ok(truncated_infinite_product(&ctx, &fams, order)?)
}

/// The first displayed form of the `t1 = -t2 = t` specialization:
/// `prod (1-q^{4n-2})^{t^2-1} (1-q^{4n})^{t^2} / ((1-q^{4n-3})^{-t^2} (1-q^{4n-1})^{-t^2})`.
pub fn rhs_ex_expanded(order: usize) -> Result<QSeries, IdentityError> {
    let ctx = t_context();
    let t2 = var(&ctx, "t").pow(2);
    let fams = vec![
        family(4, 2, minus_one(&t2))?,
        family(4, 0, t2.clone())?,
        family(4, 3, t2.clone())?,
        family(4, 1, t2)?,
    ];
    Ok(truncated_infinite_product(&ctx, &fams, order)?)
}

/// `∏ 1 / ((1 - q^{4n-2}) (1 - q^n)^t)`: the form in the single parameter
/// `t` that replaces `t^2` by `-t`.
pub fn rhs_ex_linear(order: usize) -> Result<QSeries, IdentityError> {
    let ctx = t_context();
    let t = var(&ctx, "t");
    let fams = vec![
        family(4, 2, MultiPoly::from_int(&ctx, -1))?,
        family(1, 0, -&t)?,
    ];
    Ok(truncated_infinite_product(&ctx, &fams, order)?)
}

/// Replaces `t^2` by `-t` in a polynomial of `t` that is even.
pub fn even_to_linear(p: &MultiPoly) -> Result<MultiPoly, IdentityError> {
    let ctx = p.ctx();
    let mut out = MultiPoly::zero(ctx);
    for (e, c) in p.terms() {
        if e[0] % 2 != 0 {
            return Err(IdentityError::InvalidParams(format!(
                "{p} is not even in t"
            )));
        }
        let k = e[0] / 2;
        let sign = if k % 2 == 0 {
            Rational::one()
        } else {
            -Rational::one()
        };
        out = out.checked_add(&MultiPoly::monomial(ctx, vec![k], c * sign)?)?;
    }
    Ok(out)
}

/// Right side of the power-sum form for single symplectic Schur functions.
pub fn rhs_sum_sp(order: usize, pweight: usize) -> Result<QSeries, IdentityError> {
    check_pweight(order, pweight)?;
    let ctx = p_context(pweight);
    let p = |k: usize| var(&ctx, &format!("p{k}"));
    let mut log = vec![MultiPoly::zero(&ctx); order + 1];
    let mut add = |power: usize, c: MultiPoly| {
        if power <= order {
            log[power] = &log[power] + &c;
        }
    };
    for n in 1..=order {
        for k in 1..=order {
            let inv_k = rat(1, k as i64);
            let inv_2k = rat(1, 2 * k as i64);
            if (4 * n - 3) * k > order {
                break;
            }
            let pk = p(k);
            add((4 * n - 3) * k, pk.scale(&inv_k));
            add((4 * n - 1) * k, pk.scale(&-inv_k.clone()));
            let quad_minus = (8 * n - 6) * k <= order;
            let need_p2k = 8 * n * k <= order || (8 * n - 2) * k <= order || quad_minus;
            if !need_p2k {
                continue;
            }
            let p2k = p(2 * k);
            add(8 * n * k, p2k.scale(&-inv_k.clone()));
            let minus = (&pk * &pk) - p2k.clone();
            let plus = (&pk * &pk) + p2k;
            add((8 * n - 6) * k, minus.scale(&inv_2k));
            add((8 * n - 4) * k, minus.scale(&-inv_2k.clone()));
            add(8 * n * k, minus.scale(&-inv_2k.clone()));
            add((8 * n - 2) * k, plus.scale(&inv_2k));
        }
    }
    let mut log = QSeries::from_coeffs(&ctx, log)?;
    // prod (1 + (-q^2)^n)
    let signs = FactorFamily::new(2, 0, MultiPoly::one(&ctx))?.alternating();
    for f in signs.factors_up_to(order) {
        log = log.checked_add(&f.log_series(order)?)?;
    }
    Ok(log.exp()?)
}

/// Right side of the power-sum form for products of two symplectic Schur
/// functions.
pub fn rhs_sum_spsp(order: usize, pweight: usize) -> Result<QSeries, IdentityError> {
    check_pweight(order, pweight)?;
    let ctx = pp_context(pweight);
    let p = |k: usize| var(&ctx, &format!("p{k}"));
    let pp = |k: usize| var(&ctx, &format!("p'{k}"));
    let mut log = vec![MultiPoly::zero(&ctx); order + 1];
    let mut add = |power: usize, c: MultiPoly| {
        if power <= order {
            log[power] = &log[power] + &c;
        }
    };
    for n in 1..=order {
        for k in 1..=order {
            if (4 * n - 3) * k > order {
                break;
            }
            let inv_k = rat(1, k as i64);
            let inv_2k = rat(1, 2 * k as i64);
            let cross = &p(k) * &pp(k);
            add((4 * n - 3) * k, cross.scale(&inv_k));
            add((4 * n - 1) * k, cross.scale(&inv_k));
            if (4 * n - 2) * k > order {
                continue;
            }
            let quad = &(&(&p(k) * &p(k)) - &p(2 * k)) + &(&(&pp(k) * &pp(k)) - &pp(2 * k));
            add((4 * n - 2) * k, quad.scale(&-inv_2k.clone()));
            add(4 * n * k, quad.scale(&-inv_2k.clone()));
            add(4 * n * k, (&p(2 * k) + &pp(2 * k)).scale(&-inv_k));
        }
    }
    let mut log = QSeries::from_coeffs(&ctx, log)?;
    for f in FactorFamily::new(4, 2, MultiPoly::from_int(&ctx, -1))?.factors_up_to(order) {
        log = log.checked_add(&f.log_series(order)?)?;
    }
    Ok(log.exp()?)
}

/// `prod_{i<j} (1 - q^2 y'_i y'_j) / prod_{i,j} (1 - q y'_i y_j)`.
pub fn rhs_cauchy(order: usize, a: usize, b: usize) -> Result<QSeries, IdentityError> {
    let ctx = cauchy_context(a, b);
    let ys: Vec<MultiPoly> = (1..=a).map(|i| var(&ctx, &format!("y{i}"))).collect();
    let yps: Vec<MultiPoly> = (1..=b).map(|j| var(&ctx, &format!("y'{j}"))).collect();
    let one = MultiPoly::one(&ctx);
    let mut factors = Vec::new();
    for i in 0..b {
        for j in i + 1..b {
            factors.push(ProductFactor::new(2, one.clone())?.with_scale(&yps[i] * &yps[j]));
        }
    }
    for yp in &yps {
        for y in &ys {
            factors.push(ProductFactor::new(1, -&one)?.with_scale(yp * y));
        }
    }
    Ok(finite_product(&ctx, &factors, order)?)
}

/// `d_{i,m}`: `floor((i+1)/2)` for `i <= 2m-1`, else `floor((4m-1-i)/2)`.
pub fn d_exponent(i: usize, m: usize) -> usize {
    if i < 2 * m {
        i.div_ceil(2)
    } else {
        (4 * m - 1 - i) / 2
    }
}

/// `prod_{i=1}^{4m-3} (1 - q^2 t^{2i-4m+2})^{d_{i,m}} / prod_{i<=2m, j<=2n} (1 - q s^{2j-2n-1} t^{2i-2m-1})`.
pub fn rhs_qst(n: usize, m: usize, order: usize) -> Result<QSeries, IdentityError> {
    if n == 0 || m == 0 {
        return Err(IdentityError::InvalidParams(
            "n and m must be positive".into(),
        ));
    }
    let ctx = qst_context();
    let mono =
        |s: i64, t: i64| MultiPoly::monomial(&ctx, vec![s as i32, t as i32], Rational::one());
    let (n, m) = (n as i64, m as i64);
    let mut factors = Vec::new();
    for i in 1..=(4 * m - 3) {
        let d = d_exponent(i as usize, m as usize) as i64;
        if d != 0 {
            factors.push(
                ProductFactor::new(2, MultiPoly::from_int(&ctx, d))?
                    .with_scale(mono(0, 2 * i - 4 * m + 2)?),
            );
        }
    }
    for i in 1..=2 * m {
        for j in 1..=2 * n {
            let scale = mono(2 * j - 2 * n - 1, 2 * i - 2 * m - 1)?;
            factors.push(ProductFactor::new(1, MultiPoly::from_int(&ctx, -1))?.with_scale(scale));
        }
    }
    Ok(finite_product(&ctx, &factors, order)?)
}

// ---------------------------------------------------------------------------
// the sign identity

/// `(lhs_n, rhs_n)` with `lhs_n = (-1)^{binom(n,2)} sum_{λ ⊢ n} prod c_sp^2/h^2`
/// and `rhs_n = sum_{λ ⊢ n} prod c_sp/h`.
pub fn sign_identity_sides(n: usize) -> Result<(Rational, Rational), IdentityError> {
    let ctx = VarContext::new::<&str>(&[]);
    let zero = WeightFactor::new(ContentKind::Symplectic, MultiPoly::zero(&ctx));
    let (mut l, mut r) = (Rational::zero(), Rational::zero());
    for lambda in enumerate_partitions(n) {
        l += weight_product(&lambda, &[zero.clone(), zero.clone()])?.constant_term();
        r += weight_product(&lambda, std::slice::from_ref(&zero))?.constant_term();
    }
    if (n * n.saturating_sub(1) / 2) % 2 == 1 {
        l = -l;
    }
    Ok((l, r))
}

fn sign_series(nmax: usize) -> Result<(QSeries, QSeries), IdentityError> {
    let ctx = VarContext::new::<&str>(&[]);
    let mut ls = Vec::new();
    let mut rs = Vec::new();
    for n in 0..=nmax {
        let (l, r) = sign_identity_sides(n)?;
        ls.push(MultiPoly::constant(&ctx, l));
        rs.push(MultiPoly::constant(&ctx, r));
    }
    Ok((
        QSeries::from_coeffs(&ctx, ls)?,
        QSeries::from_coeffs(&ctx, rs)?,
    ))
}

/// Checks the signed equality for every `n <= nmax`, and that both sides
/// vanish for odd `n`.
pub fn verify_sign_identity(nmax: usize) -> Result<VerificationReport, IdentityError> {
    let elapsed = stopwatch();
    let (l, r) = sign_series(nmax)?;
    let mut outcome = compare(&l, &r);
    if outcome == Outcome::Equal {
        if let Some(n) = (1..=nmax).step_by(2).find(|&n| !l.coeff(n).is_zero()) {
            outcome = Outcome::Mismatch {
                q_power: n,
                lhs: l.coeff(n).to_string(),
                rhs: "0".into(),
            };
        }
    }
    Ok(VerificationReport {
        identity: IdentityId::CorSign,
        params: Params::with_order(nmax).to_json(IdentityId::CorSign),
        outcome,
        millis: elapsed(),
    })
}

// ---------------------------------------------------------------------------
// dispatch

fn sp_factor(ctx: &VarContext, name: &str, sign: i64) -> WeightFactor {
    WeightFactor::new(ContentKind::Symplectic, var(ctx, name).scale(&int(sign)))
}

fn content_spec(id: IdentityId) -> Option<Vec<WeightFactor>> {
    use ContentKind::*;
    use IdentityId::*;
    let one = |kind: ContentKind| {
        let ctx = t_context();
        vec![WeightFactor::new(kind, var(&ctx, "t"))]
    };
    let two = |k1: ContentKind, k2: ContentKind| {
        let ctx = t1t2_context();
        vec![
            WeightFactor::new(k1, var(&ctx, "t1")),
            WeightFactor::new(k2, var(&ctx, "t2")),
        ]
    };
    match id {
        ThmMainCsp => Some(one(Symplectic)),
        CorMainCo => Some(one(Orthogonal)),
        ThmSpsp => Some(two(Symplectic, Symplectic)),
        ThmCoco => Some(two(Orthogonal, Orthogonal)),
        ThmCspC => Some(two(Symplectic, Ordinary)),
        ExConj => {
            let ctx = t_context();
            Some(vec![sp_factor(&ctx, "t", 1), sp_factor(&ctx, "t", -1)])
        }
        _ => None,
    }
}

/// Shared state for a batch of verifications: the Littlewood–Richardson
/// memo, possibly file-backed.
#[derive(Debug, Clone)]
pub struct Engine {
    cache: Arc<LrCache>,
}

impl Default for Engine {
    fn default() -> Self {
        Engine {
            cache: Arc::new(LrCache::in_memory()),
        }
    }
}

/// Which side of an identity to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Lhs,
    Rhs,
}

impl FromStr for Side {
    type Err = IdentityError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "lhs" => Ok(Side::Lhs),
            "rhs" => Ok(Side::Rhs),
            _ => Err(IdentityError::InvalidParams(format!(
                "side must be lhs or rhs, got {s:?}"
            ))),
        }
    }
}

impl Engine {
    pub fn new(cache: Arc<LrCache>) -> Self {
        Engine { cache }
    }

    pub fn cache(&self) -> &Arc<LrCache> {
        &self.cache
    }

    pub fn ring(&self, cutoff: usize) -> SymRing {
        SymRing::with_cache(cutoff, self.cache.clone())
    }

    /// One side of an identity as a truncated series.
    pub fn expand(
        &self,
        id: IdentityId,
        side: Side,
        params: &Params,
    ) -> Result<QSeries, IdentityError> {
        use IdentityId::*;
        let order = params.order_for(id);
        let w = params.pweight_for(id);
        if id.uses_pweight() {
            check_pweight(order, w)?;
        }
        match (id, side) {
            (CorSign, _) => {
                let (l, r) = sign_series(order)?;
                Ok(if side == Side::Lhs { l } else { r })
            }
            (ThmSumSp, Side::Lhs) => lhs_sp_partition_function(&self.ring(w), order),
            (ThmSumSp, Side::Rhs) => rhs_sum_sp(order, w),
            (ThmSumSpsp, Side::Lhs) => lhs_spsp_partition_function(&self.ring(w), order),
            (ThmSumSpsp, Side::Rhs) => rhs_sum_spsp(order, w),
            (LemCauchySpS, Side::Lhs) => {
                let s = lhs_cauchy_sp_s(&self.ring(order), order, params.y_vars, params.yp_vars)?;
                Ok(truncate_aux(&s, params.aux_degree))
            }
            (LemCauchySpS, Side::Rhs) => {
                let s = rhs_cauchy(order, params.y_vars, params.yp_vars)?;
                Ok(truncate_aux(&s, params.aux_degree))
            }
            (RemQst, Side::Lhs) => lhs_qst(params.n, params.m, order),
            (RemQst, Side::Rhs) => rhs_qst(params.n, params.m, order),
            (_, Side::Lhs) => {
                lhs_content_sum(&content_spec(id).expect("content-sum identity"), order)
            }
            (_, Side::Rhs) => rhs_product(id, order),
        }
    }

    /// Builds both sides and compares them exactly. Some identities carry
    /// extra consistency checks; the first failing comparison is reported.
    pub fn verify(
        &self,
        id: IdentityId,
        params: &Params,
    ) -> Result<VerificationReport, IdentityError> {
        if id == IdentityId::CorSign {
            return verify_sign_identity(params.order_for(id));
        }
        let elapsed = stopwatch();
        let lhs = self.expand(id, Side::Lhs, params)?;
        let rhs = self.expand(id, Side::Rhs, params)?;
        let mut outcomes = vec![compare(&lhs, &rhs)];
        let order = params.order_for(id);
        match id {
            IdentityId::CorMainCo => {
                let ctx = t_context();
                let sp = lhs_content_sum(&[sp_factor(&ctx, "t", -1)], order)?.negate_q();
                outcomes.push(compare(&lhs, &sp));
            }
            IdentityId::ExConj => {
                let images = [t_var(), -t_var()];
                let spsp =
                    rhs_product(IdentityId::ThmSpsp, order)?.map_vars(&t_context(), &images)?;
                let expanded = rhs_ex_expanded(order)?;
                outcomes.push(compare(&spsp, &expanded));
                outcomes.push(compare(&expanded, &rhs));
                let coco_spec = [
                    WeightFactor::new(ContentKind::Orthogonal, t_var()),
                    WeightFactor::new(ContentKind::Orthogonal, -t_var()),
                ];
                outcomes.push(compare(&lhs_content_sum(&coco_spec, order)?, &rhs));
                let coco =
                    rhs_product(IdentityId::ThmCoco, order)?.map_vars(&t_context(), &images)?;
                outcomes.push(compare(&coco, &rhs));
                let linear = QSeries::from_coeffs(
                    &t_context(),
                    lhs.coeffs()
                        .iter()
                        .map(even_to_linear)
                        .collect::<Result<Vec<_>, _>>()?,
                )?;
                outcomes.push(compare(&linear, &rhs_ex_linear(order)?));
            }
            IdentityId::ThmSumSp => {
                let w = params.pweight_for(id);
                let t = t_var();
                let images = vec![t; w];
                let csp_l = lhs_content_sum(&content_spec(IdentityId::ThmMainCsp).unwrap(), order)?;
                let csp_r = rhs_product(IdentityId::ThmMainCsp, order)?;
                outcomes.push(compare(&lhs.map_vars(&t_context(), &images)?, &csp_l));
                outcomes.push(compare(&rhs.map_vars(&t_context(), &images)?, &csp_r));
            }
            IdentityId::ThmSumSpsp => {
                let w = params.pweight_for(id);
                let ctx = t1t2_context();
                let mut images = vec![var(&ctx, "t1"); w];
                images.extend(vec![var(&ctx, "t2"); w]);
                let spsp_l = lhs_content_sum(&content_spec(IdentityId::ThmSpsp).unwrap(), order)?;
                outcomes.push(compare(&lhs.map_vars(&ctx, &images)?, &spsp_l));
                outcomes.push(compare(&rhs.map_vars(&ctx, &images)?, &spsp_l));
            }
            _ => {}
        }
        Ok(VerificationReport {
            identity: id,
            params: params.to_json(id),
            outcome: first_mismatch(outcomes),
            millis: elapsed(),
        })
    }
}

fn t_var() -> MultiPoly {
    var(&t_context(), "t")
}

/// Drops monomials of total degree above `cap`.
fn truncate_aux(s: &QSeries, cap: Option<usize>) -> QSeries {
    match cap {
        None => s.clone(),
        Some(d) => {
            s.map_coeffs(|c| c.retain(|e| e.iter().map(|&x| x as i64).sum::<i64>() <= d as i64))
        }
    }
}

pub fn verify(id: IdentityId, params: &Params) -> Result<VerificationReport, IdentityError> {
    Engine::default().verify(id, params)
}

pub fn expand(id: IdentityId, side: Side, params: &Params) -> Result<QSeries, IdentityError> {
    Engine::default().expand(id, side, params)
}

/// Parses the report JSON back into a value; used to check round trips.
pub fn parse_report(text: &str) -> Result<Value, serde_json::Error> {
    serde_json::from_str(text)
}
