//! Integer partitions and their cell statistics.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{int, MultiPoly, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PartitionError {
    #[error("parts must be positive and weakly decreasing, got {0:?}")]
    InvalidParts(Vec<usize>),
    #[error("cell ({row},{col}) is not in the partition {partition}")]
    CellOutside {
        partition: String,
        row: usize,
        col: usize,
    },
    #[error("cannot parse partition literal {0:?}")]
    Parse(String),
    #[error("invalid Frobenius coordinates")]
    InvalidFrobenius,
    #[error("weight specification is empty")]
    EmptyWeightSpec,
}

/// A weakly decreasing sequence of positive integers.
///
/// Partitions order reverse-lexicographically: `[4] < [3,1] < [2,2] < ...`,
/// which is also the order [`enumerate_partitions`] produces.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Partition(Vec<usize>);

impl Ord for Partition {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.cmp(&self.0)
    }
}

impl PartialOrd for Partition {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl TryFrom<Vec<usize>> for Partition {
    type Error = PartitionError;
    fn try_from(parts: Vec<usize>) -> Result<Self, Self::Error> {
        Partition::new(parts)
    }
}

impl From<Partition> for Vec<usize> {
    fn from(p: Partition) -> Self {
        p.0
    }
}

/// A box `(row, col)` of a Young diagram, 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cell {
    pub row: usize,
    pub col: usize,
}

impl Cell {
    pub fn new(row: usize, col: usize) -> Self {
        Cell { row, col }
    }
}

impl Partition {
    pub fn new(parts: Vec<usize>) -> Result<Self, PartitionError> {
        if parts.contains(&0) || parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(PartitionError::InvalidParts(parts));
        }
        Ok(Partition(parts))
    }

    /// Sorts and drops zeros; any multiset of sizes is a partition.
    pub fn from_unsorted(mut parts: Vec<usize>) -> Self {
        parts.retain(|&p| p > 0);
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Partition(parts)
    }

    pub fn empty() -> Self {
        Partition(Vec::new())
    }

    pub fn parts(&self) -> &[usize] {
        &self.0
    }

    pub fn size(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `λ_i` with the convention `λ_i = 0` past the length; 1-based.
    pub fn part(&self, i: usize) -> usize {
        if i == 0 {
            return 0;
        }
        self.0.get(i - 1).copied().unwrap_or(0)
    }

    pub fn contains_cell(&self, u: Cell) -> bool {
        u.row >= 1 && u.col >= 1 && u.col <= self.part(u.row)
    }

    /// Whether the diagram of `other` fits inside this one.
    pub fn contains(&self, other: &Partition) -> bool {
        other.len() <= self.len() && other.0.iter().zip(&self.0).all(|(a, b)| a <= b)
    }

    /// Cells in row-major order.
    pub fn cells(&self) -> impl Iterator<Item = Cell> + '_ {
        self.0
            .iter()
            .enumerate()
            .flat_map(|(i, &len)| (1..=len).map(move |j| Cell::new(i + 1, j)))
    }

    /// Multiset union of the parts.
    pub fn union(&self, other: &Partition) -> Partition {
        let mut parts = Vec::with_capacity(self.len() + other.len());
        let (mut a, mut b) = (self.0.iter().peekable(), other.0.iter().peekable());
        loop {
            match (a.peek(), b.peek()) {
                (Some(&&x), Some(&&y)) => {
                    if x >= y {
                        parts.push(x);
                        a.next();
                    } else {
                        parts.push(y);
                        b.next();
                    }
                }
                (Some(&&x), None) => {
                    parts.push(x);
                    a.next();
                }
                (None, Some(&&y)) => {
                    parts.push(y);
                    b.next();
                }
                (None, None) => break,
            }
        }
        Partition(parts)
    }

    /// `(k, m_k)` for every part size `k` present.
    pub fn multiplicities(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<(usize, usize)> = Vec::new();
        for &p in self.0.iter().rev() {
            match out.last_mut() {
                Some((k, m)) if *k == p => *m += 1,
                _ => out.push((p, 1)),
            }
        }
        out
    }

    fn check_cell(&self, u: Cell) -> Result<(), PartitionError> {
        if self.contains_cell(u) {
            Ok(())
        } else {
            Err(PartitionError::CellOutside {
                partition: self.to_string(),
                row: u.row,
                col: u.col,
            })
        }
    }
}

impl fmt::Display for Partition {
    /// Bracket form, e.g. `[3,1,1]`; the empty partition is `[]`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, p) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, "]")
    }
}

impl FromStr for Partition {
    type Err = PartitionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || PartitionError::Parse(s.to_string());
        let inner = s
            .trim()
            .strip_prefix('[')
            .and_then(|r| r.strip_suffix(']'))
            .ok_or_else(bad)?
            .trim();
        if inner.is_empty() {
            return Ok(Partition::empty());
        }
        let parts = inner
            .split(',')
            .map(|p| p.trim().parse::<usize>().map_err(|_| bad()))
            .collect::<Result<Vec<_>, _>>()?;
        Partition::new(parts)
    }
}

/// All partitions of `n` in reverse lexicographic order.
pub fn enumerate_partitions(n: usize) -> Vec<Partition> {
    fn rec(remaining: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Partition>) {
        if remaining == 0 {
            out.push(Partition(cur.clone()));
            return;
        }
        for p in (1..=remaining.min(max)).rev() {
            cur.push(p);
            rec(remaining - p, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, n, &mut Vec::new(), &mut out);
    out
}

/// All partitions of size at most `n`, by size then reverse-lex.
pub fn partitions_up_to(n: usize) -> Vec<Partition> {
    (0..=n).flat_map(enumerate_partitions).collect()
}

/// `λ^t_i = #{j : λ_j >= i}`.
pub fn conjugate(lambda: &Partition) -> Partition {
    let first = lambda.part(1);
    Partition(
        (1..=first)
            .map(|i| lambda.0.iter().filter(|&&p| p >= i).count())
            .collect(),
    )
}

/// `h(i,j) = λ_i + λ^t_j - i - j + 1`.
pub fn hook(lambda: &Partition, u: Cell) -> Result<usize, PartitionError> {
    lambda.check_cell(u)?;
    let conj = conjugate(lambda);
    Ok(hook_with(lambda, &conj, u))
}

fn hook_with(lambda: &Partition, conj: &Partition, u: Cell) -> usize {
    lambda.part(u.row) + conj.part(u.col) + 1 - u.row - u.col
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ContentKind {
    Ordinary,
    Symplectic,
    Orthogonal,
}

/// Ordinary, symplectic or orthogonal content of a cell.
pub fn content_value(
    kind: ContentKind,
    lambda: &Partition,
    u: Cell,
) -> Result<i64, PartitionError> {
    lambda.check_cell(u)?;
    Ok(content_with(kind, lambda, &conjugate(lambda), u))
}

fn content_with(kind: ContentKind, lambda: &Partition, conj: &Partition, u: Cell) -> i64 {
    let (i, j) = (u.row as i64, u.col as i64);
    let row = |k: i64| lambda.part(k as usize) as i64;
    let col = |k: i64| conj.part(k as usize) as i64;
    match kind {
        ContentKind::Ordinary => j - i,
        ContentKind::Symplectic => {
            if i > j {
                row(i) + row(j) - i - j + 2
            } else {
                i + j - col(i) - col(j)
            }
        }
        ContentKind::Orthogonal => {
            if i >= j {
                row(i) + row(j) - i - j
            } else {
                i + j - col(i) - col(j) - 2
            }
        }
    }
}

/// Per-cell statistics, as printed by the `stats` command.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CellStats {
    pub row: usize,
    pub col: usize,
    pub hook: usize,
    pub content: i64,
    pub symplectic: i64,
    pub orthogonal: i64,
}

pub fn cell_stats(lambda: &Partition) -> Vec<CellStats> {
    let conj = conjugate(lambda);
    lambda
        .cells()
        .map(|u| CellStats {
            row: u.row,
            col: u.col,
            hook: hook_with(lambda, &conj, u),
            content: content_with(ContentKind::Ordinary, lambda, &conj, u),
            symplectic: content_with(ContentKind::Symplectic, lambda, &conj, u),
            orthogonal: content_with(ContentKind::Orthogonal, lambda, &conj, u),
        })
        .collect()
}

/// One factor `shift + c_kind(u)` of a weight product.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightFactor {
    pub kind: ContentKind,
    pub shift: MultiPoly,
}

impl WeightFactor {
    pub fn new(kind: ContentKind, shift: MultiPoly) -> Self {
        WeightFactor { kind, shift }
    }
}

/// `prod_{u} prod_{(k, v) in spec} (v + c_k(u)) / prod_u h(u)^{|spec|}`.
pub fn weight_product(
    lambda: &Partition,
    spec: &[WeightFactor],
) -> Result<MultiPoly, PartitionError> {
    let first = spec.first().ok_or(PartitionError::EmptyWeightSpec)?;
    let ctx = first.shift.ctx();
    let conj = conjugate(lambda);
    let mut acc = MultiPoly::one(ctx);
    let mut denom = Rational::from_integer(1.into());
    for u in lambda.cells() {
        let h = hook_with(lambda, &conj, u) as i64;
        for wf in spec {
            let c = content_with(wf.kind, lambda, &conj, u);
            let factor = &wf.shift + &MultiPoly::from_int(ctx, c);
            acc = &acc * &factor;
            denom *= int(h);
        }
    }
    Ok(acc.scale(&denom.recip()))
}

/// Frobenius coordinates `(arms | legs)` with `arms_i = λ_i - i` and
/// `legs_i = λ^t_i - i` over the diagonal cells.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrobeniusCoords {
    pub arms: Vec<usize>,
    pub legs: Vec<usize>,
}

impl FrobeniusCoords {
    pub fn rank(&self) -> usize {
        self.arms.len()
    }

    /// Rebuilds the partition. Arms and legs must be strictly decreasing and
    /// of equal length.
    pub fn to_partition(&self) -> Result<Partition, PartitionError> {
        let strict = |v: &[usize]| v.windows(2).all(|w| w[0] > w[1]);
        if self.arms.len() != self.legs.len() || !strict(&self.arms) || !strict(&self.legs) {
            return Err(PartitionError::InvalidFrobenius);
        }
        let r = self.rank();
        // rows 1..=r from arms; the remaining rows come from legs
        let mut parts: Vec<usize> = self
            .arms
            .iter()
            .enumerate()
            .map(|(i, a)| a + i + 1)
            .collect();
        let conj_len = |j: usize| self.legs[j - 1] + j; // λ^t_j for j <= r
        let depth = if r == 0 { 0 } else { conj_len(1) };
        for i in (r + 1)..=depth {
            parts.push((1..=r).filter(|&j| conj_len(j) >= i).count());
        }
        Partition::new(parts)
    }
}

pub fn frobenius(lambda: &Partition) -> FrobeniusCoords {
    let conj = conjugate(lambda);
    let r = (1..=lambda.len())
        .take_while(|&i| lambda.part(i) >= i)
        .count();
    FrobeniusCoords {
        arms: (1..=r).map(|i| lambda.part(i) - i).collect(),
        legs: (1..=r).map(|i| conj.part(i) - i).collect(),
    }
}

/// Whether the Frobenius form is `(m_1,...,m_r | m_1+1,...,m_r+1)`.
/// The empty partition counts.
pub fn is_doubled_type(lambda: &Partition) -> bool {
    let f = frobenius(lambda);
    f.arms.iter().zip(&f.legs).all(|(a, b)| *b == a + 1)
}

/// All partitions of type `(m | m+1)` of size `n`, reverse-lex.
///
/// Such a partition has size `2 sum (m_i + 1)`, so they correspond to
/// partitions of `n/2` into distinct parts `m_i + 1`.
pub fn enumerate_pprime(n: usize) -> Vec<Partition> {
    if n % 2 == 1 {
        return Vec::new();
    }
    let mut out: Vec<Partition> = enumerate_partitions(n / 2)
        .into_iter()
        .filter(|p| p.0.windows(2).all(|w| w[0] > w[1]))
        .map(|p| {
            let arms: Vec<usize> = p.0.iter().map(|x| x - 1).collect();
            let legs: Vec<usize> = p.0.clone();
            FrobeniusCoords { arms, legs }
                .to_partition()
                .expect("distinct parts give valid Frobenius coordinates")
        })
        .collect();
    out.sort();
    out
}
