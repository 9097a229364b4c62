//! Truncated bosonic Fock space `C[q_1, q_2, ...]` with Heisenberg and
//! vertex operators.
//!
//! Vectors are polynomials in the `q_k` (graded by `deg q_k = k`) whose
//! coefficients live in an auxiliary polynomial ring (`z`, `w`, `y_i`, `q`,
//! ...). Operators are sparse matrices in the monomial basis `q_μ`.
//!
//! A space stores every monomial of degree at most its internal cutoff.
//! Raising operators drop whatever lands above it, so a product of operators
//! is exact on outputs of degree `D` only when the cutoff is at least `D`
//! plus the largest amount by which later factors can lower the degree.
//! The auxiliary ring carries its own degree caps; monomials beyond a cap
//! are discarded after every multiplication.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use num_traits::Zero;
use thiserror::Error;

use crate::arith::{ArithError, MultiPoly, Rational, VarContext};
use crate::partitions::Partition;
use crate::symfunc::{z_lambda, PExpr, SymError, SymRing};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Error)]
pub enum FockError {
    #[error("alpha_0 is not part of the Heisenberg algebra used here")]
    ZeroMode,
    #[error("operands belong to different Fock spaces")]
    SpaceMismatch,
    #[error("truncated inverse does not terminate: {0}")]
    NotNilpotent(String),
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error(transparent)]
    Sym(#[from] SymError),
}

/// Degree caps on groups of auxiliary variables: a monomial survives when,
/// for every group, the summed exponents of the group's variables stay at or
/// below the cap.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AuxTruncation {
    groups: Vec<(Vec<usize>, i64)>,
}

impl AuxTruncation {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn cap(
        mut self,
        ctx: &VarContext,
        names: &[&str],
        max_degree: i64,
    ) -> Result<Self, FockError> {
        let idx = names
            .iter()
            .map(|n| {
                ctx.index_of(n)
                    .ok_or_else(|| ArithError::UnknownVariable(n.to_string()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        self.groups.push((idx, max_degree));
        Ok(self)
    }

    pub fn keeps(&self, exps: &[i32]) -> bool {
        self.groups
            .iter()
            .all(|(idx, cap)| idx.iter().map(|&i| exps[i] as i64).sum::<i64>() <= *cap)
    }

    pub fn apply(&self, p: &MultiPoly) -> MultiPoly {
        if self.groups.is_empty() {
            p.clone()
        } else {
            p.retain(|e| self.keeps(e))
        }
    }

    pub fn mul(&self, a: &MultiPoly, b: &MultiPoly) -> MultiPoly {
        self.apply(&(a * b))
    }

    /// `1/p` expanded as a geometric series in `1 - p/c`, where `c` is the
    /// constant term. Every non-constant monomial must carry positive degree
    /// in some capped group, so that the powers die out.
    pub fn inverse(&self, p: &MultiPoly) -> Result<MultiPoly, FockError> {
        let c = p.constant_term();
        if c.is_zero() {
            return Err(ArithError::NotInvertible.into());
        }
        let ctx = p.ctx();
        let inv_c = c.recip();
        let x = MultiPoly::one(ctx) - p.scale(&inv_c);
        let mut acc = MultiPoly::one(ctx);
        let mut power = MultiPoly::one(ctx);
        let bound: i64 = self.groups.iter().map(|(_, c)| (*c).max(0)).sum::<i64>() + 1;
        for _ in 0..=bound {
            power = self.mul(&power, &x);
            if power.is_zero() {
                return Ok(acc.scale(&inv_c));
            }
            acc = acc + power.clone();
        }
        Err(FockError::NotNilpotent(p.to_string()))
    }

    /// Product of the listed factors, each raised to `±1`.
    pub fn product(
        &self,
        ctx: &VarContext,
        factors: &[(MultiPoly, bool)],
    ) -> Result<MultiPoly, FockError> {
        let mut acc = MultiPoly::one(ctx);
        for (f, invert) in factors {
            let g = if *invert {
                self.inverse(f)?
            } else {
                self.apply(f)
            };
            acc = self.mul(&acc, &g);
        }
        Ok(acc)
    }
}

/// Element of the truncated Fock space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FockVector {
    ctx: VarContext,
    cutoff: usize,
    terms: BTreeMap<Partition, MultiPoly>,
}

impl FockVector {
    pub fn zero(ctx: &VarContext, cutoff: usize) -> Self {
        FockVector {
            ctx: ctx.clone(),
            cutoff,
            terms: BTreeMap::new(),
        }
    }

    pub fn ctx(&self) -> &VarContext {
        &self.ctx
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Partition, &MultiPoly)> {
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

    pub fn coeff(&self, mu: &Partition) -> MultiPoly {
        self.terms
            .get(mu)
            .cloned()
            .unwrap_or_else(|| MultiPoly::zero(&self.ctx))
    }

    /// Adds `c q_μ`; returns `false` (and drops the term) when `|μ|` exceeds
    /// the cutoff.
    pub fn add_term(&mut self, mu: Partition, c: MultiPoly) -> bool {
        if mu.size() > self.cutoff {
            return false;
        }
        if c.is_zero() {
            return true;
        }
        match self.terms.get_mut(&mu) {
            Some(slot) => {
                *slot = &*slot + &c;
                if slot.is_zero() {
                    self.terms.remove(&mu);
                }
            }
            None => {
                self.terms.insert(mu, c);
            }
        }
        true
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, FockError> {
        if self.ctx != other.ctx || self.cutoff != other.cutoff {
            return Err(FockError::SpaceMismatch);
        }
        let mut out = self.clone();
        for (mu, c) in &other.terms {
            out.add_term(mu.clone(), c.clone());
        }
        Ok(out)
    }

    /// Components of degree exactly `d`.
    pub fn homogeneous_part(&self, d: usize) -> Self {
        self.filter_degree(|k| k == d)
    }

    /// Components of degree at most `d`.
    pub fn up_to_degree(&self, d: usize) -> Self {
        self.filter_degree(|k| k <= d)
    }

    fn filter_degree(&self, keep: impl Fn(usize) -> bool) -> Self {
        FockVector {
            ctx: self.ctx.clone(),
            cutoff: self.cutoff,
            terms: self
                .terms
                .iter()
                .filter(|(mu, _)| keep(mu.size()))
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Largest degree of a stored monomial.
    pub fn degree(&self) -> Option<usize> {
        self.terms.keys().map(Partition::size).max()
    }
}

impl fmt::Display for FockVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(mu, c)| {
                let mono = if mu.is_empty() {
                    "1".to_string()
                } else {
                    mu.parts()
                        .iter()
                        .map(|k| format!("q{k}"))
                        .collect::<Vec<_>>()
                        .join("*")
                };
                format!("({c})*{mono}")
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Bilinear pairing with `(q_μ, q_ν) = z_μ δ_{μν}`, under which `|λ>` is
/// orthonormal.
pub fn pair(a: &FockVector, b: &FockVector) -> Result<MultiPoly, FockError> {
    if a.ctx != b.ctx {
        return Err(ArithError::ContextMismatch.into());
    }
    let mut acc = MultiPoly::zero(&a.ctx);
    for (mu, ca) in &a.terms {
        if let Some(cb) = b.terms.get(mu) {
            acc.add_scaled(&(ca * cb), &Rational::from_integer(z_lambda(mu)))?;
        }
    }
    Ok(acc)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

/// Argument of a vertex operator: one formal variable `z`, or a finite list
/// of variables `y_j` entering through `p_k(y) = sum_j y_j^k`.
#[derive(Debug, Clone)]
pub enum VertexArg {
    Single(MultiPoly),
    Vars(Vec<MultiPoly>),
}

impl VertexArg {
    fn power_sums(&self, ctx: &VarContext, w: usize) -> Result<Vec<MultiPoly>, FockError> {
        let values = match self {
            VertexArg::Single(z) => std::slice::from_ref(z),
            VertexArg::Vars(ys) => ys.as_slice(),
        };
        Ok(crate::symfunc::power_sums_of(ctx, values, w)?)
    }
}

/// The quadratic exponentials.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quadratic {
    /// `exp(G)`, `G = -sum (α_{-n}^2 - α_{-2n}) / 2n`.
    G,
    /// `exp(G*)`.
    GStar,
    /// `exp(F)`, `F = sum (α_{-n} + α_{-n}^2/2 - α_{-2n}/2) / n`.
    F,
    /// `exp(F*)`.
    FStar,
}

#[derive(Debug)]
struct SpaceInner {
    ctx: VarContext,
    cutoff: usize,
    trunc: AuxTruncation,
    basis: Vec<Partition>,
    index: HashMap<Partition, usize>,
}

/// Monomials `q_μ` with `|μ| <= cutoff` over a fixed auxiliary ring.
#[derive(Debug, Clone)]
pub struct FockSpace(Arc<SpaceInner>);

impl PartialEq for FockSpace {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.ctx == other.0.ctx
                && self.0.cutoff == other.0.cutoff
                && self.0.trunc == other.0.trunc)
    }
}

impl FockSpace {
    pub fn new(ctx: &VarContext, cutoff: usize, trunc: AuxTruncation) -> Self {
        let basis = crate::partitions::partitions_up_to(cutoff);
        let index = basis
            .iter()
            .enumerate()
            .map(|(i, p)| (p.clone(), i))
            .collect();
        FockSpace(Arc::new(SpaceInner {
            ctx: ctx.clone(),
            cutoff,
            trunc,
            basis,
            index,
        }))
    }

    pub fn ctx(&self) -> &VarContext {
        &self.0.ctx
    }

    pub fn cutoff(&self) -> usize {
        self.0.cutoff
    }

    pub fn truncation(&self) -> &AuxTruncation {
        &self.0.trunc
    }

    pub fn basis(&self) -> &[Partition] {
        &self.0.basis
    }

    pub fn dim(&self) -> usize {
        self.0.basis.len()
    }

    fn idx(&self, mu: &Partition) -> Option<usize> {
        self.0.index.get(mu).copied()
    }

    fn one(&self) -> MultiPoly {
        MultiPoly::one(self.ctx())
    }

    pub fn zero_vector(&self) -> FockVector {
        FockVector::zero(self.ctx(), self.cutoff())
    }

    /// `|0>`.
    pub fn vacuum(&self) -> FockVector {
        self.monomial(Partition::empty())
    }

    /// The monomial `q_μ`.
    pub fn monomial(&self, mu: Partition) -> FockVector {
        let mut v = self.zero_vector();
        v.add_term(mu, self.one());
        v
    }

    /// `p_μ -> q_μ`.
    pub fn from_pexpr(&self, e: &PExpr) -> FockVector {
        let mut v = self.zero_vector();
        for (mu, c) in e.terms() {
            v.add_term(mu.clone(), MultiPoly::constant(self.ctx(), c.clone()));
        }
        v
    }

    /// `|λ> = s_λ(q)`.
    pub fn schur_vector(
        &self,
        ring: &SymRing,
        lambda: &Partition,
    ) -> Result<FockVector, FockError> {
        Ok(self.from_pexpr(&ring.schur(lambda)?))
    }

    /// `c * v` with auxiliary caps applied.
    pub fn scale(&self, v: &FockVector, c: &MultiPoly) -> FockVector {
        let mut out = self.zero_vector();
        for (mu, x) in v.terms() {
            out.add_term(mu.clone(), self.truncation().mul(x, c));
        }
        out
    }

    /// Product in `C[q]`, truncated in degree and auxiliary caps.
    pub fn mul_vectors(&self, a: &FockVector, b: &FockVector) -> FockVector {
        let mut out = self.zero_vector();
        for (ma, ca) in a.terms() {
            for (mb, cb) in b.terms() {
                if ma.size() + mb.size() <= self.cutoff() {
                    let c = self.truncation().mul(ca, cb);
                    out.add_term(ma.union(mb), c);
                }
            }
        }
        out
    }

    /// `exp(g)` for `g` without a constant component, via
    /// `n b_n = sum_k k g_k b_{n-k}` on homogeneous components.
    pub fn exp_vector(&self, g: &FockVector) -> Result<FockVector, FockError> {
        if !g.coeff(&Partition::empty()).is_zero() {
            return Err(
                ArithError::Precondition("exponent has a constant component".into()).into(),
            );
        }
        let d = self.cutoff();
        let gs: Vec<FockVector> = (0..=d).map(|k| g.homogeneous_part(k)).collect();
        let mut bs = vec![self.vacuum()];
        for n in 1..=d {
            let mut acc = self.zero_vector();
            for k in 1..=n {
                if gs[k].is_zero() || bs[n - k].is_zero() {
                    continue;
                }
                let prod = self.mul_vectors(&gs[k], &bs[n - k]);
                acc = acc
                    .checked_add(&self.scale(&prod, &MultiPoly::from_int(self.ctx(), k as i64)))?;
            }
            let inv_n = MultiPoly::constant(self.ctx(), Rational::new(1.into(), (n as i64).into()));
            bs.push(self.scale(&acc, &inv_n));
        }
        let mut out = self.zero_vector();
        for b in bs {
            out = out.checked_add(&b)?;
        }
        Ok(out)
    }

    pub fn identity(&self) -> FockOperator {
        let cols = (0..self.dim()).map(|i| vec![(i, self.one())]).collect();
        FockOperator::from_columns(self.clone(), cols, 0)
    }

    /// `α_n`: `n ∂/∂q_n` for `n > 0`, multiplication by `q_{-n}` for `n < 0`.
    pub fn alpha(&self, n: i64) -> Result<FockOperator, FockError> {
        if n == 0 {
            return Err(FockError::ZeroMode);
        }
        let k = n.unsigned_abs() as usize;
        let mut dropped = 0;
        let cols = self
            .basis()
            .iter()
            .map(|mu| {
                if n < 0 {
                    let nu = mu.union(&Partition::new(vec![k]).unwrap());
                    match self.idx(&nu) {
                        Some(j) => vec![(j, self.one())],
                        None => {
                            dropped += 1;
                            vec![]
                        }
                    }
                } else {
                    let m = mu.parts().iter().filter(|&&p| p == k).count();
                    if m == 0 {
                        return vec![];
                    }
                    let mut parts = mu.parts().to_vec();
                    let pos = parts.iter().position(|&p| p == k).unwrap();
                    parts.remove(pos);
                    let j = self.idx(&Partition::from_unsorted(parts)).unwrap();
                    vec![(j, MultiPoly::from_int(self.ctx(), (m * k) as i64))]
                }
            })
            .collect();
        Ok(FockOperator::from_columns(self.clone(), cols, dropped))
    }

    /// Multiplication by `f`.
    pub fn multiplication(&self, f: &FockVector) -> FockOperator {
        let mut dropped = 0;
        let cols = self
            .basis()
            .iter()
            .map(|nu| {
                let mut col = Vec::new();
                for (mu, c) in f.terms() {
                    if mu.size() + nu.size() > self.cutoff() {
                        dropped += 1;
                        continue;
                    }
                    let c = self.truncation().apply(c);
                    if !c.is_zero() {
                        col.push((self.idx(&mu.union(nu)).unwrap(), c));
                    }
                }
                col.sort_by_key(|(i, _)| *i);
                col
            })
            .collect();
        FockOperator::from_columns(self.clone(), cols, dropped)
    }

    /// `sum_n c_n q_n`.
    fn linear(&self, coeffs: impl IntoIterator<Item = (usize, MultiPoly)>) -> FockVector {
        let mut v = self.zero_vector();
        for (n, c) in coeffs {
            if n >= 1 {
                v.add_term(
                    Partition::new(vec![n]).unwrap(),
                    self.truncation().apply(&c),
                );
            }
        }
        v
    }

    /// `exp(sum_n p_n q_n / n)` with `p_n` the power sums of the argument;
    /// the negated exponent when `inverse` is set.
    fn gamma_minus_vector(&self, arg: &VertexArg, inverse: bool) -> Result<FockVector, FockError> {
        let d = self.cutoff();
        let ps = arg.power_sums(self.ctx(), d)?;
        let sign = if inverse { -1 } else { 1 };
        let g = self.linear(ps.into_iter().enumerate().map(|(i, p)| {
            (
                i + 1,
                p.scale(&Rational::new(sign.into(), ((i + 1) as i64).into())),
            )
        }));
        self.exp_vector(&g)
    }

    /// `Γ_±(z)` or `Γ_±(p(y))`.
    pub fn gamma(&self, sign: Sign, arg: &VertexArg) -> Result<FockOperator, FockError> {
        let m = self.multiplication(&self.gamma_minus_vector(arg, false)?);
        Ok(match sign {
            Sign::Minus => m,
            Sign::Plus => m.adjoint(),
        })
    }

    /// `Γ_±(z)^{-1}` or `Γ_±(p(y))^{-1}`.
    pub fn gamma_inverse(&self, sign: Sign, arg: &VertexArg) -> Result<FockOperator, FockError> {
        let m = self.multiplication(&self.gamma_minus_vector(arg, true)?);
        Ok(match sign {
            Sign::Minus => m,
            Sign::Plus => m.adjoint(),
        })
    }

    /// `exp(G)`, `exp(G*)`, `exp(F)` or `exp(F*)`.
    pub fn exp_quadratic(&self, which: Quadratic) -> Result<FockOperator, FockError> {
        let v = match which {
            Quadratic::G | Quadratic::GStar => self.exp_g_vector()?,
            Quadratic::F | Quadratic::FStar => self.exp_f_vector()?,
        };
        let m = self.multiplication(&v);
        Ok(match which {
            Quadratic::G | Quadratic::F => m,
            Quadratic::GStar | Quadratic::FStar => m.adjoint(),
        })
    }

    /// `exp(G)|0> = exp(-sum (q_n^2 - q_{2n}) / 2n)`.
    pub fn exp_g_vector(&self) -> Result<FockVector, FockError> {
        let mut g = self.zero_vector();
        for n in 1..=self.cutoff() / 2 {
            let c = Rational::new((-1).into(), (2 * n as i64).into());
            g.add_term(
                Partition::new(vec![n, n]).unwrap(),
                MultiPoly::constant(self.ctx(), c.clone()),
            );
            g.add_term(
                Partition::new(vec![2 * n]).unwrap(),
                MultiPoly::constant(self.ctx(), -c),
            );
        }
        self.exp_vector(&g)
    }

    /// `exp(F)|0> = exp(sum (q_n + q_n^2/2 - q_{2n}/2) / n)`.
    pub fn exp_f_vector(&self) -> Result<FockVector, FockError> {
        let mut g = self.zero_vector();
        for n in 1..=self.cutoff() {
            let inv = Rational::new(1.into(), (n as i64).into());
            let half = &inv / Rational::from_integer(2.into());
            g.add_term(
                Partition::new(vec![n]).unwrap(),
                MultiPoly::constant(self.ctx(), inv),
            );
            g.add_term(
                Partition::new(vec![n, n]).unwrap(),
                MultiPoly::constant(self.ctx(), half.clone()),
            );
            g.add_term(
                Partition::new(vec![2 * n]).unwrap(),
                MultiPoly::constant(self.ctx(), -half),
            );
        }
        self.exp_vector(&g)
    }

    /// `q^{L_0}`: scales `q_μ` by `q^{|μ|}`. `q` may be any monomial of the
    /// auxiliary ring, e.g. `q^-1` in a Laurent context.
    pub fn grading(&self, q: &MultiPoly) -> FockOperator {
        let cols = self
            .basis()
            .iter()
            .enumerate()
            .map(|(i, mu)| {
                let c = self.truncation().apply(&q.pow(mu.size() as u32));
                if c.is_zero() {
                    vec![]
                } else {
                    vec![(i, c)]
                }
            })
            .collect();
        FockOperator::from_columns(self.clone(), cols, 0)
    }
}

/// Linear map on a truncated Fock space, stored by columns.
#[derive(Debug, Clone)]
pub struct FockOperator {
    space: FockSpace,
    cols: Vec<Vec<(usize, MultiPoly)>>,
    dropped: usize,
}

impl FockOperator {
    fn from_columns(space: FockSpace, cols: Vec<Vec<(usize, MultiPoly)>>, dropped: usize) -> Self {
        FockOperator {
            space,
            cols,
            dropped,
        }
    }

    pub fn space(&self) -> &FockSpace {
        &self.space
    }

    /// Number of contributions discarded because they landed above the
    /// degree cutoff while the matrix was built.
    pub fn dropped_terms(&self) -> usize {
        self.dropped
    }

    /// Coefficient of `q_row` in the image of `q_col`.
    pub fn entry(&self, row: &Partition, col: &Partition) -> MultiPoly {
        let zero = MultiPoly::zero(self.space.ctx());
        let (Some(r), Some(c)) = (self.space.idx(row), self.space.idx(col)) else {
            return zero;
        };
        self.cols[c]
            .iter()
            .find(|(i, _)| *i == r)
            .map(|(_, v)| v.clone())
            .unwrap_or(zero)
    }

    pub fn nonzero_entries(&self) -> usize {
        self.cols.iter().map(Vec::len).sum()
    }

    pub fn apply(&self, v: &FockVector) -> Result<FockVector, FockError> {
        self.apply_up_to(v, self.space.cutoff())
    }

    /// `apply`, keeping only output components of degree `<= max_degree`.
    pub fn apply_up_to(&self, v: &FockVector, max_degree: usize) -> Result<FockVector, FockError> {
        let sp = &self.space;
        if v.ctx() != sp.ctx() || v.cutoff() != sp.cutoff() {
            return Err(FockError::SpaceMismatch);
        }
        let mut acc: BTreeMap<usize, MultiPoly> = BTreeMap::new();
        for (mu, c) in v.terms() {
            let j = sp.idx(mu).ok_or(FockError::SpaceMismatch)?;
            for (i, a) in &self.cols[j] {
                if sp.basis()[*i].size() > max_degree {
                    continue;
                }
                let t = sp.truncation().mul(a, c);
                if t.is_zero() {
                    continue;
                }
                match acc.get_mut(i) {
                    Some(slot) => *slot = &*slot + &t,
                    None => {
                        acc.insert(*i, t);
                    }
                }
            }
        }
        let mut out = sp.zero_vector();
        for (i, c) in acc {
            out.add_term(sp.basis()[i].clone(), c);
        }
        Ok(out)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &FockOperator) -> Result<FockOperator, FockError> {
        if self.space != other.space {
            return Err(FockError::SpaceMismatch);
        }
        let sp = &self.space;
        let cols = other
            .cols
            .iter()
            .map(|col| {
                let mut acc: BTreeMap<usize, MultiPoly> = BTreeMap::new();
                for (k, b) in col {
                    for (i, a) in &self.cols[*k] {
                        let t = sp.truncation().mul(a, b);
                        if t.is_zero() {
                            continue;
                        }
                        let slot = acc.entry(*i).or_insert_with(|| MultiPoly::zero(sp.ctx()));
                        *slot = &*slot + &t;
                    }
                }
                acc.into_iter().filter(|(_, v)| !v.is_zero()).collect()
            })
            .collect();
        Ok(FockOperator::from_columns(
            sp.clone(),
            cols,
            self.dropped + other.dropped,
        ))
    }

    /// Adjoint for the pairing `(q_μ, q_ν) = z_μ δ_{μν}`:
    /// `A*_{μν} = A_{νμ} z_ν / z_μ`.
    pub fn adjoint(&self) -> FockOperator {
        let sp = &self.space;
        let z: Vec<Rational> = sp
            .basis()
            .iter()
            .map(|p| Rational::from_integer(z_lambda(p)))
            .collect();
        let mut cols: Vec<Vec<(usize, MultiPoly)>> = vec![Vec::new(); sp.dim()];
        for (mu, col) in self.cols.iter().enumerate() {
            for (nu, a) in col {
                cols[*nu].push((mu, a.scale(&(&z[*nu] / &z[mu]))));
            }
        }
        for col in &mut cols {
            col.sort_by_key(|(i, _)| *i);
        }
        FockOperator::from_columns(sp.clone(), cols, self.dropped)
    }
}

/// `<bra| ops[0] ops[1] ... |ket>`.
pub fn vev(
    bra: &FockVector,
    ops: &[&FockOperator],
    ket: &FockVector,
) -> Result<MultiPoly, FockError> {
    let mut v = ket.clone();
    for op in ops.iter().rev() {
        v = op.apply(&v)?;
    }
    pair(bra, &v)
}

/// Linear combination of operator products `sum_i c_i A_{i,1} A_{i,2} ...`.
#[derive(Debug, Clone, Default)]
pub struct OpExpr<'a> {
    terms: Vec<(Option<MultiPoly>, Vec<&'a FockOperator>)>,
}

impl<'a> OpExpr<'a> {
    pub fn product(ops: &[&'a FockOperator]) -> Self {
        OpExpr {
            terms: vec![(None, ops.to_vec())],
        }
    }

    pub fn scaled(scalar: MultiPoly, ops: &[&'a FockOperator]) -> Self {
        OpExpr {
            terms: vec![(Some(scalar), ops.to_vec())],
        }
    }

    pub fn plus(mut self, scalar: MultiPoly, ops: &[&'a FockOperator]) -> Self {
        self.terms.push((Some(scalar), ops.to_vec()));
        self
    }

    pub fn apply(&self, space: &FockSpace, v: &FockVector) -> Result<FockVector, FockError> {
        self.apply_up_to(space, v, space.cutoff())
    }

    /// `apply` with the result needed only through `max_degree`; the
    /// outermost factor skips everything above it.
    pub fn apply_up_to(
        &self,
        space: &FockSpace,
        v: &FockVector,
        max_degree: usize,
    ) -> Result<FockVector, FockError> {
        let mut out = space.zero_vector();
        for (scalar, ops) in &self.terms {
            let mut w = v.clone();
            for (k, op) in ops.iter().enumerate().rev() {
                w = if k == 0 {
                    op.apply_up_to(&w, max_degree)?
                } else {
                    op.apply(&w)?
                };
            }
            if let Some(s) = scalar {
                w = space.scale(&w, s);
            }
            out = out.checked_add(&w)?;
        }
        Ok(out)
    }
}

/// First entry where two operator expressions disagree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OperatorMismatch {
    pub basis: Partition,
    pub component: Partition,
    pub lhs: String,
    pub rhs: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OperatorCheck {
    pub degree: usize,
    pub vectors: usize,
    pub mismatch: Option<OperatorMismatch>,
}

impl OperatorCheck {
    pub fn is_equal(&self) -> bool {
        self.mismatch.is_none()
    }
}

/// Applies both sides to every `q_μ` with `|μ| <= degree` and compares all
/// components of degree `<= degree`.
pub fn check_operator_identity(
    space: &FockSpace,
    lhs: &OpExpr<'_>,
    rhs: &OpExpr<'_>,
    degree: usize,
) -> Result<OperatorCheck, FockError> {
    let basis: Vec<&Partition> = space
        .basis()
        .iter()
        .filter(|p| p.size() <= degree)
        .collect();
    let compare = |mu: &Partition| -> Result<Option<OperatorMismatch>, FockError> {
        let v = space.monomial(mu.clone());
        let a = lhs.apply_up_to(space, &v, degree)?.up_to_degree(degree);
        let b = rhs.apply_up_to(space, &v, degree)?.up_to_degree(degree);
        if a == b {
            return Ok(None);
        }
        let keys: std::collections::BTreeSet<&Partition> =
            a.terms.keys().chain(b.terms.keys()).collect();
        for k in keys {
            let (x, y) = (a.coeff(k), b.coeff(k));
            if x != y {
                return Ok(Some(OperatorMismatch {
                    basis: mu.clone(),
                    component: k.clone(),
                    lhs: x.to_string(),
                    rhs: y.to_string(),
                }));
            }
        }
        Ok(None)
    };
    #[cfg(feature = "parallel")]
    let results: Vec<Result<Option<OperatorMismatch>, FockError>> =
        basis.par_iter().map(|mu| compare(mu)).collect();
    #[cfg(not(feature = "parallel"))]
    let results: Vec<Result<Option<OperatorMismatch>, FockError>> =
        basis.iter().map(|mu| compare(mu)).collect();
    let mut mismatch = None;
    for r in results {
        if let Some(m) = r? {
            mismatch = Some(m);
            break;
        }
    }
    Ok(OperatorCheck {
        degree,
        vectors: basis.len(),
        mismatch,
    })
}

/// `Γ_+(z) f(q) = f(q_n + z^n)`, computed by substitution. Independent of
/// the adjoint construction; used to cross-check it.
pub fn gamma_plus_by_translation(
    space: &FockSpace,
    z: &MultiPoly,
) -> Result<FockOperator, FockError> {
    let tr = space.truncation();
    let cols = space
        .basis()
        .iter()
        .map(|mu| {
            // prod_i (q_{μ_i} + z^{μ_i})
            let mut v = space.vacuum();
            for &k in mu.parts() {
                let mut factor = space.monomial(Partition::new(vec![k]).unwrap());
                factor.add_term(Partition::empty(), tr.apply(&z.pow(k as u32)));
                v = space.mul_vectors(&v, &factor);
            }
            let mut col: Vec<(usize, MultiPoly)> = v
                .terms()
                .map(|(p, c)| (space.idx(p).unwrap(), c.clone()))
                .collect();
            col.sort_by_key(|(i, _)| *i);
            col
        })
        .collect();
    Ok(FockOperator::from_columns(space.clone(), cols, 0))
}

/// Truncated exponential `sum_k A^k / k!` of a nilpotent operator.
pub fn exp_nilpotent(a: &FockOperator) -> Result<FockOperator, FockError> {
    let sp = a.space();
    let mut acc = sp.identity();
    let mut term = sp.identity();
    for k in 1..=4 * sp.cutoff() + 64 {
        term = a.compose(&term)?;
        let inv = MultiPoly::constant(sp.ctx(), Rational::new(1.into(), (k as i64).into()));
        term = scale_operator(&term, &inv);
        if term.nonzero_entries() == 0 {
            return Ok(acc);
        }
        acc = add_operators(&acc, &term)?;
    }
    Err(FockError::NotNilpotent("operator exponential".into()))
}

pub fn scale_operator(a: &FockOperator, c: &MultiPoly) -> FockOperator {
    let tr = a.space.truncation();
    let cols = a
        .cols
        .iter()
        .map(|col| {
            col.iter()
                .map(|(i, v)| (*i, tr.mul(v, c)))
                .filter(|(_, v)| !v.is_zero())
                .collect()
        })
        .collect();
    FockOperator::from_columns(a.space.clone(), cols, a.dropped)
}

pub fn add_operators(a: &FockOperator, b: &FockOperator) -> Result<FockOperator, FockError> {
    if a.space != b.space {
        return Err(FockError::SpaceMismatch);
    }
    let cols = a
        .cols
        .iter()
        .zip(&b.cols)
        .map(|(x, y)| {
            let mut acc: BTreeMap<usize, MultiPoly> = x.iter().cloned().collect();
            for (i, v) in y {
                let slot = acc
                    .entry(*i)
                    .or_insert_with(|| MultiPoly::zero(a.space.ctx()));
                *slot = &*slot + v;
            }
            acc.into_iter().filter(|(_, v)| !v.is_zero()).collect()
        })
        .collect();
    Ok(FockOperator::from_columns(
        a.space.clone(),
        cols,
        a.dropped + b.dropped,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Partition {
        s.parse().unwrap()
    }

    #[test]
    fn alpha_examples() {
        let ctx = VarContext::new(&["z"]);
        let sp = FockSpace::new(&ctx, 6, AuxTruncation::none());
        let up = sp.alpha(-1).unwrap();
        let down = sp.alpha(1).unwrap();
        let q1 = up.apply(&sp.vacuum()).unwrap();
        assert_eq!(q1, sp.monomial(p("[1]")));
        assert_eq!(down.apply(&q1).unwrap(), sp.vacuum());
        assert!(matches!(sp.alpha(0), Err(FockError::ZeroMode)));
        let v = sp.monomial(p("[2,2,1]"));
        let w = sp.alpha(2).unwrap().apply(&v).unwrap();
        assert_eq!(w.coeff(&p("[2,1]")), MultiPoly::from_int(&ctx, 4));
    }

    #[test]
    fn gamma_examples() {
        let ctx = VarContext::new(&["z"]);
        let z = ctx.var("z").unwrap();
        let sp = FockSpace::new(&ctx, 6, AuxTruncation::none());
        let ring = SymRing::new(6);
        let arg = VertexArg::Single(z.clone());
        let gp = sp.gamma(Sign::Plus, &arg).unwrap();
        assert_eq!(gp.apply(&sp.vacuum()).unwrap(), sp.vacuum());
        let gm = sp.gamma(Sign::Minus, &arg).unwrap();
        let two = sp.schur_vector(&ring, &p("[2]")).unwrap();
        let one_one = sp.schur_vector(&ring, &p("[1,1]")).unwrap();
        assert_eq!(vev(&two, &[&gm], &sp.vacuum()).unwrap(), z.pow(2));
        assert!(vev(&one_one, &[&gm], &sp.vacuum()).unwrap().is_zero());
    }

    #[test]
    fn adjoint_matches_translation() {
        let ctx = VarContext::new(&["z"]);
        let z = ctx.var("z").unwrap();
        let sp = FockSpace::new(&ctx, 7, AuxTruncation::none());
        let gp = sp.gamma(Sign::Plus, &VertexArg::Single(z.clone())).unwrap();
        let tr = gamma_plus_by_translation(&sp, &z).unwrap();
        for a in sp.basis() {
            for b in sp.basis() {
                assert_eq!(gp.entry(a, b), tr.entry(a, b), "entry ({a}, {b})");
            }
        }
    }

    #[test]
    fn multiplication_operators_match_matrix_exponential() {
        let ctx = VarContext::new(&["z"]);
        let z = ctx.var("z").unwrap();
        let sp = FockSpace::new(&ctx, 6, AuxTruncation::none());
        // sum_n z^n α_{-n} / n
        let mut gen = scale_operator(&sp.alpha(-1).unwrap(), &z);
        for n in 2..=6 {
            let c = z
                .pow(n as u32)
                .scale(&Rational::new(1.into(), n.into()));
            gen = add_operators(&gen, &scale_operator(&sp.alpha(-n).unwrap(), &c)).unwrap();
        }
        let by_exp = exp_nilpotent(&gen).unwrap();
        let direct = sp.gamma(Sign::Minus, &VertexArg::Single(z)).unwrap();
        for a in sp.basis() {
            for b in sp.basis() {
                assert_eq!(by_exp.entry(a, b), direct.entry(a, b));
            }
        }
    }

    #[test]
    fn quadratic_examples() {
        let ctx = VarContext::new(&["q"]);
        let sp = FockSpace::new(&ctx, 4, AuxTruncation::none());
        let ring = SymRing::new(4);
        let g = sp
            .exp_quadratic(Quadratic::G)
            .unwrap()
            .apply(&sp.vacuum())
            .unwrap();
        let s11 = sp.schur_vector(&ring, &p("[1,1]")).unwrap();
        let neg = sp.scale(&s11, &MultiPoly::from_int(&ctx, -1));
        assert_eq!(g.homogeneous_part(2), neg);
        let f = sp
            .exp_quadratic(Quadratic::F)
            .unwrap()
            .apply(&sp.vacuum())
            .unwrap();
        let s2 = sp.schur_vector(&ring, &p("[2]")).unwrap();
        assert_eq!(f.homogeneous_part(2), s2.checked_add(&s11).unwrap());
    }

    #[test]
    fn grading_examples() {
        let ctx = VarContext::new(&["q"]);
        let q = ctx.var("q").unwrap();
        let sp = FockSpace::new(&ctx, 4, AuxTruncation::none());
        let g = sp.grading(&q);
        assert_eq!(g.apply(&sp.vacuum()).unwrap(), sp.vacuum());
        let v = sp.monomial(p("[1,1]"));
        assert_eq!(g.apply(&v).unwrap(), sp.scale(&v, &q.pow(2)));
    }

    #[test]
    fn vev_examples() {
        let ctx = VarContext::new(&["q"]);
        let q = ctx.var("q").unwrap();
        let sp = FockSpace::new(&ctx, 6, AuxTruncation::none());
        let fs = sp.exp_quadratic(Quadratic::FStar).unwrap();
        let g = sp.exp_quadratic(Quadratic::G).unwrap();
        let ql0 = sp.grading(&q);
        let v = vev(&sp.vacuum(), &[&fs, &ql0, &g], &sp.vacuum()).unwrap();
        assert_eq!(v.to_string(), "-2*q^6 + q^4 - q^2 + 1");
        let sp4 = FockSpace::new(&ctx, 4, AuxTruncation::none());
        let v = vev(
            &sp4.vacuum(),
            &[
                &sp4.exp_quadratic(Quadratic::GStar).unwrap(),
                &sp4.grading(&q),
                &sp4.exp_quadratic(Quadratic::G).unwrap(),
            ],
            &sp4.vacuum(),
        )
        .unwrap();
        // prod (1 + q^{2n}) = 1 + q^2 + q^4 + ...; P' has one partition of size 4.
        assert_eq!(v.to_string(), "q^4 + q^2 + 1");
    }

    #[test]
    fn skew_vev_example() {
        let ctx = VarContext::new(&["y1", "y2"]);
        let ys = vec![ctx.var("y1").unwrap(), ctx.var("y2").unwrap()];
        let sp = FockSpace::new(&ctx, 3, AuxTruncation::none());
        let ring = SymRing::new(3);
        let gm = sp.gamma(Sign::Minus, &VertexArg::Vars(ys.clone())).unwrap();
        let bra = sp.schur_vector(&ring, &p("[2,1]")).unwrap();
        let ket = sp.schur_vector(&ring, &p("[1]")).unwrap();
        let v = vev(&bra, &[&gm], &ket).unwrap();
        assert_eq!(v, (&ys[0] + &ys[1]).pow(2));
    }

    #[test]
    fn truncated_inverse() {
        let ctx = VarContext::new(&["z", "w"]);
        let tr = AuxTruncation::none().cap(&ctx, &["z"], 3).unwrap();
        let z = ctx.var("z").unwrap();
        let w = ctx.var("w").unwrap();
        let inv = tr.inverse(&(MultiPoly::one(&ctx) - &z * &w)).unwrap();
        assert_eq!(inv.to_string(), "z^3*w^3 + z^2*w^2 + z*w + 1");
        assert!(AuxTruncation::none()
            .inverse(&(MultiPoly::one(&ctx) - w.clone()))
            .is_err());
        assert!(tr.inverse(&MultiPoly::zero(&ctx)).is_err());
    }
}
