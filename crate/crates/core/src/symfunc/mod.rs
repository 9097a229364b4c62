//! Symmetric functions in power-sum coordinates: complete homogeneous,
//! Schur, skew Schur and symplectic Schur functions, Littlewood–Richardson
//! coefficients and specializations.

mod lr_cache;
mod pexpr;

pub use lr_cache::{format_record, parse_record, LrCache, LrKey};
pub use pexpr::{
    hall_inner, power_sum_names, power_sums_of, specialize_finite_vars, specialize_pk_const,
    z_lambda, PExpr,
};

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use num_traits::{One, Signed, ToPrimitive};
use thiserror::Error;

use crate::arith::{ArithError, Rational};
use crate::partitions::{enumerate_partitions, enumerate_pprime, Partition};

#[derive(Debug, Error)]
pub enum SymError {
    #[error("weight cutoffs differ: {0} vs {1}")]
    CutoffMismatch(usize, usize),
    #[error("weight {weight} exceeds cutoff {cutoff}")]
    WeightTooLarge { weight: usize, cutoff: usize },
    #[error("no value supplied for p{0}")]
    MissingPowerSum(usize),
    #[error("Littlewood-Richardson pairing gave {0}, not a nonnegative integer")]
    NotIntegral(String),
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error("cache i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed cache record {0:?}")]
    CacheFormat(String),
}

/// Memoizing factory for symmetric functions of weight at most `cutoff`.
///
/// Safe to share between threads; the memo tables sit behind locks.
#[derive(Debug)]
pub struct SymRing {
    cutoff: usize,
    h: RwLock<Vec<PExpr>>,
    schur: RwLock<HashMap<Partition, PExpr>>,
    sp: RwLock<HashMap<Partition, PExpr>>,
    lr: Arc<LrCache>,
}

impl SymRing {
    pub fn new(cutoff: usize) -> Self {
        Self::with_cache(cutoff, Arc::new(LrCache::in_memory()))
    }

    pub fn with_cache(cutoff: usize, lr: Arc<LrCache>) -> Self {
        SymRing {
            cutoff,
            h: RwLock::new(vec![PExpr::one(cutoff)]),
            schur: RwLock::new(HashMap::new()),
            sp: RwLock::new(HashMap::new()),
            lr,
        }
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn lr_cache(&self) -> &Arc<LrCache> {
        &self.lr
    }

    fn check_weight(&self, w: usize) -> Result<(), SymError> {
        if w > self.cutoff {
            Err(SymError::WeightTooLarge {
                weight: w,
                cutoff: self.cutoff,
            })
        } else {
            Ok(())
        }
    }

    /// `h_k` from Newton's identity `k h_k = sum_{i=1}^k p_i h_{k-i}`.
    pub fn complete_homogeneous(&self, k: usize) -> Result<PExpr, SymError> {
        self.check_weight(k)?;
        if let Some(h) = self.h.read().unwrap().get(k) {
            return Ok(h.clone());
        }
        let mut table = self.h.write().unwrap();
        while table.len() <= k {
            let n = table.len();
            let mut acc = PExpr::zero(self.cutoff);
            for i in 1..=n {
                let p = PExpr::power_sum(i, self.cutoff)?;
                acc.add_scaled(&p.checked_mul(&table[n - i])?, &Rational::one())?;
            }
            table.push(acc.scale(&Rational::new(1.into(), (n as i64).into())));
        }
        Ok(table[k].clone())
    }

    /// `s_λ = det(h_{λ_i - i + j})`.
    pub fn schur(&self, lambda: &Partition) -> Result<PExpr, SymError> {
        self.check_weight(lambda.size())?;
        if let Some(s) = self.schur.read().unwrap().get(lambda) {
            return Ok(s.clone());
        }
        let s = self.jacobi_trudi(lambda)?;
        self.schur
            .write()
            .unwrap()
            .insert(lambda.clone(), s.clone());
        Ok(s)
    }

    /// Determinant expanded row by row; `dp[mask]` holds the signed sum over
    /// injections of the first `popcount(mask)` rows onto the columns `mask`.
    fn jacobi_trudi(&self, lambda: &Partition) -> Result<PExpr, SymError> {
        let r = lambda.len();
        if r == 0 {
            return Ok(PExpr::one(self.cutoff));
        }
        let entry = |i: usize, j: usize| -> Result<Option<PExpr>, SymError> {
            let k = lambda.parts()[i] as i64 - i as i64 + j as i64;
            if k < 0 {
                Ok(None)
            } else {
                self.complete_homogeneous(k as usize).map(Some)
            }
        };
        let mut dp: Vec<Option<PExpr>> = vec![None; 1 << r];
        dp[0] = Some(PExpr::one(self.cutoff));
        for mask in 0usize..(1 << r) {
            let Some(cur) = dp[mask].take() else { continue };
            let row = mask.count_ones() as usize;
            if row == r {
                dp[mask] = Some(cur);
                continue;
            }
            for j in 0..r {
                if mask & (1 << j) != 0 {
                    continue;
                }
                let Some(h) = entry(row, j)? else { continue };
                let above = (mask >> (j + 1)).count_ones();
                let sign = if above % 2 == 0 {
                    Rational::one()
                } else {
                    -Rational::one()
                };
                let term = cur.checked_mul(&h)?;
                let slot = dp[mask | (1 << j)].get_or_insert_with(|| PExpr::zero(self.cutoff));
                slot.add_scaled(&term, &sign)?;
            }
        }
        Ok(dp[(1 << r) - 1]
            .take()
            .unwrap_or_else(|| PExpr::zero(self.cutoff)))
    }

    /// `c^λ_{μν} = <s_μ s_ν, s_λ>`.
    pub fn lr_coefficient(
        &self,
        lambda: &Partition,
        mu: &Partition,
        nu: &Partition,
    ) -> Result<u64, SymError> {
        if lambda.size() != mu.size() + nu.size() || !lambda.contains(mu) || !lambda.contains(nu) {
            return Ok(0);
        }
        if mu.is_empty() || nu.is_empty() {
            return Ok(1);
        }
        let key = (lambda.clone(), mu.clone(), nu.clone());
        if let Some(c) = self.lr.get(&key)? {
            return Ok(c);
        }
        self.check_weight(lambda.size())?;
        let prod = self.schur(mu)?.checked_mul(&self.schur(nu)?)?;
        let v = hall_inner(&prod, &self.schur(lambda)?)?;
        let c = if v.is_integer() && !v.is_negative() {
            v.to_integer().to_u64()
        } else {
            None
        }
        .ok_or_else(|| SymError::NotIntegral(v.to_string()))?;
        self.lr.insert(key, c)?;
        Ok(c)
    }

    /// `s_{λ/μ} = sum_ν c^λ_{μν} s_ν`.
    pub fn skew_schur(&self, lambda: &Partition, mu: &Partition) -> Result<PExpr, SymError> {
        self.check_weight(lambda.size())?;
        let mut out = PExpr::zero(self.cutoff);
        if !lambda.contains(mu) {
            return Ok(out);
        }
        for nu in enumerate_partitions(lambda.size() - mu.size()) {
            let c = self.lr_coefficient(lambda, mu, &nu)?;
            if c != 0 {
                out.add_scaled(&self.schur(&nu)?, &Rational::from_integer(c.into()))?;
            }
        }
        Ok(out)
    }

    /// `sp_λ = sum_{μ ⊆ λ} s_μ sum_{β ∈ P'} (-1)^{|β|/2} c^λ_{μβ}`.
    pub fn symplectic_schur(&self, lambda: &Partition) -> Result<PExpr, SymError> {
        self.check_weight(lambda.size())?;
        if let Some(s) = self.sp.read().unwrap().get(lambda) {
            return Ok(s.clone());
        }
        let n = lambda.size();
        let mut out = PExpr::zero(self.cutoff);
        for b in (0..=n).step_by(2) {
            let sign = if (b / 2) % 2 == 0 {
                Rational::one()
            } else {
                -Rational::one()
            };
            let betas = enumerate_pprime(b);
            for mu in enumerate_partitions(n - b)
                .into_iter()
                .filter(|m| lambda.contains(m))
            {
                let mut c = 0u64;
                for beta in betas.iter().filter(|beta| lambda.contains(beta)) {
                    c += self.lr_coefficient(lambda, &mu, beta)?;
                }
                if c != 0 {
                    out.add_scaled(
                        &self.schur(&mu)?,
                        &(&sign * Rational::from_integer(c.into())),
                    )?;
                }
            }
        }
        self.sp.write().unwrap().insert(lambda.clone(), out.clone());
        Ok(out)
    }
}

pub fn complete_homogeneous(k: usize, cutoff: usize) -> Result<PExpr, SymError> {
    SymRing::new(cutoff).complete_homogeneous(k)
}

pub fn schur_to_p(lambda: &Partition, cutoff: usize) -> Result<PExpr, SymError> {
    SymRing::new(cutoff).schur(lambda)
}

pub fn lr_coefficient(lambda: &Partition, mu: &Partition, nu: &Partition) -> Result<u64, SymError> {
    SymRing::new(lambda.size()).lr_coefficient(lambda, mu, nu)
}

pub fn skew_schur_to_p(
    lambda: &Partition,
    mu: &Partition,
    cutoff: usize,
) -> Result<PExpr, SymError> {
    SymRing::new(cutoff).skew_schur(lambda, mu)
}

pub fn symplectic_schur_to_p(lambda: &Partition, cutoff: usize) -> Result<PExpr, SymError> {
    SymRing::new(cutoff).symplectic_schur(lambda)
}

/// `1/z_μ` as a rational.
pub fn inv_z(mu: &Partition) -> Rational {
    Rational::new(1.into(), z_lambda(mu))
}
