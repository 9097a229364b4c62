//! Independent oracles shared by the integration tests. Nothing here goes
//! through power sums, exp/log series or the Hall inner product.

#![allow(dead_code)]

use std::collections::HashMap;

use itertools::Itertools;
use num_traits::One;
use sympart::arith::{rat, MultiPoly, QSeries, Rational, VarContext};
use sympart::partitions::Partition;

/// Cells of the skew shape `λ/μ` as `(row, col)`, 0-based, row by row.
fn skew_cells(lambda: &Partition, mu: &Partition) -> Vec<(usize, usize)> {
    let mut cells = Vec::new();
    for (r, &l) in lambda.parts().iter().enumerate() {
        let start = mu.parts().get(r).copied().unwrap_or(0);
        for c in start..l {
            cells.push((r, c));
        }
    }
    cells
}

/// Number of semistandard fillings of `λ/μ` with entries in `0..n`, keyed by
/// content vector.
pub fn ssyt_contents(lambda: &Partition, mu: &Partition, n: usize) -> HashMap<Vec<usize>, u64> {
    let mut out = HashMap::new();
    if !lambda.contains(mu) {
        return out;
    }
    let cells = skew_cells(lambda, mu);
    let mut filling: HashMap<(usize, usize), usize> = HashMap::new();
    fill(&cells, 0, n, &mut filling, &mut out);
    out
}

fn fill(
    cells: &[(usize, usize)],
    i: usize,
    n: usize,
    filling: &mut HashMap<(usize, usize), usize>,
    out: &mut HashMap<Vec<usize>, u64>,
) {
    if i == cells.len() {
        let mut content = vec![0; n];
        for v in filling.values() {
            content[*v] += 1;
        }
        *out.entry(content).or_insert(0) += 1;
        return;
    }
    let (r, c) = cells[i];
    // weakly increasing along rows, strictly down columns
    let lo_row = if c > 0 {
        filling.get(&(r, c - 1)).copied().unwrap_or(0)
    } else {
        0
    };
    let lo_col = if r > 0 {
        filling.get(&(r - 1, c)).map(|v| v + 1).unwrap_or(0)
    } else {
        0
    };
    for v in lo_row.max(lo_col)..n {
        filling.insert((r, c), v);
        fill(cells, i + 1, n, filling, out);
        filling.remove(&(r, c));
    }
}

/// `s_{λ/μ}(y_1..y_n)` as a polynomial, by summing over tableaux.
pub fn skew_schur_poly(
    ctx: &VarContext,
    ys: &[usize],
    lambda: &Partition,
    mu: &Partition,
) -> MultiPoly {
    let mut acc = MultiPoly::zero(ctx);
    for (content, count) in ssyt_contents(lambda, mu, ys.len()) {
        let mut exps = vec![0i32; ctx.len()];
        for (k, &e) in content.iter().enumerate() {
            exps[ys[k]] += e as i32;
        }
        acc = &acc
            + &MultiPoly::monomial(ctx, exps, Rational::from_integer((count as i64).into()))
                .unwrap();
    }
    acc
}

/// `c^λ_{μν}` as the coefficient of `x^{λ+δ}` in `a_δ s_μ s_ν`, with the
/// Schur products expanded over tableaux in `ℓ(λ)` variables.
pub fn lr_brute_force(lambda: &Partition, mu: &Partition, nu: &Partition) -> u64 {
    if lambda.size() != mu.size() + nu.size() {
        return 0;
    }
    let n = lambda.len().max(1);
    let empty = Partition::empty();
    let a = ssyt_contents(mu, &empty, n);
    let b = ssyt_contents(nu, &empty, n);
    let mut prod: HashMap<Vec<usize>, i64> = HashMap::new();
    for (ca, xa) in &a {
        for (cb, xb) in &b {
            let c: Vec<usize> = ca.iter().zip(cb).map(|(x, y)| x + y).collect();
            *prod.entry(c).or_insert(0) += (*xa * *xb) as i64;
        }
    }
    let target: Vec<i64> = (0..n)
        .map(|i| lambda.parts().get(i).copied().unwrap_or(0) as i64 + (n - 1 - i) as i64)
        .collect();
    let mut total = 0i64;
    for perm in (0..n).permutations(n) {
        let sign = inversion_sign(&perm);
        let alpha: Option<Vec<usize>> = (0..n)
            .map(|i| {
                let v = target[i] - (n - 1 - perm[i]) as i64;
                (v >= 0).then_some(v as usize)
            })
            .collect();
        if let Some(alpha) = alpha {
            total += sign * prod.get(&alpha).copied().unwrap_or(0);
        }
    }
    assert!(total >= 0, "negative LR coefficient");
    total as u64
}

fn inversion_sign(p: &[usize]) -> i64 {
    let inv = (0..p.len())
        .flat_map(|i| (i + 1..p.len()).map(move |j| (i, j)))
        .filter(|&(i, j)| p[i] > p[j])
        .count();
    if inv % 2 == 0 {
        1
    } else {
        -1
    }
}

/// `binom(e, j) = e (e-1) ... (e-j+1) / j!`.
fn falling_binomial(e: &MultiPoly, j: usize) -> MultiPoly {
    let ctx = e.ctx();
    let mut acc = MultiPoly::one(ctx);
    for i in 0..j {
        acc = &acc * &(e - &MultiPoly::from_int(ctx, i as i64));
    }
    let mut fact = Rational::one();
    for i in 1..=j {
        fact *= Rational::from_integer((i as i64).into());
    }
    acc.scale(&fact.recip())
}

/// `(1 - c q^k)^e` expanded by the binomial series.
pub fn binomial_factor(
    ctx: &VarContext,
    k: usize,
    c: &MultiPoly,
    e: &MultiPoly,
    order: usize,
) -> Vec<MultiPoly> {
    let mut out = vec![MultiPoly::zero(ctx); order + 1];
    let mut j = 0;
    while j * k <= order {
        let sign = if j % 2 == 0 { 1 } else { -1 };
        out[j * k] = (&falling_binomial(e, j) * &c.pow(j as u32)).scale(&rat(sign, 1));
        j += 1;
    }
    out
}

pub fn mul_trunc(a: &[MultiPoly], b: &[MultiPoly]) -> Vec<MultiPoly> {
    let n = a.len().min(b.len());
    let ctx = a[0].ctx().clone();
    let mut out = vec![MultiPoly::zero(&ctx); n];
    for i in 0..n {
        if a[i].is_zero() {
            continue;
        }
        for j in 0..n - i {
            if !b[j].is_zero() {
                out[i + j] = &out[i + j] + &(&a[i] * &b[j]);
            }
        }
    }
    out
}

/// `prod_{n >= 1} prod_{(slope, offset, e)} (1 - q^{slope n - offset})^e`,
/// multiplied out factor by factor.
pub fn product_oracle(
    ctx: &VarContext,
    families: &[(usize, usize, MultiPoly)],
    order: usize,
) -> QSeries {
    let one = MultiPoly::one(ctx);
    let mut acc = vec![MultiPoly::zero(ctx); order + 1];
    acc[0] = one.clone();
    for (slope, offset, e) in families {
        for n in 1.. {
            let k = slope * n - offset;
            if k > order {
                break;
            }
            if k == 0 {
                continue;
            }
            acc = mul_trunc(&acc, &binomial_factor(ctx, k, &one, e, order));
        }
    }
    QSeries::from_coeffs(ctx, acc).unwrap()
}

pub fn series_from(ctx: &VarContext, coeffs: Vec<MultiPoly>) -> QSeries {
    QSeries::from_coeffs(ctx, coeffs).unwrap()
}
