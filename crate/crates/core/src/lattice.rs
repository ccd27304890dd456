//! Integer lattices in canonical Hermite normal form.
//!
//! Every sublattice of `Z^k` is stored by its row-style HNF: upper echelon,
//! strictly positive pivots, entries above a pivot reduced into `[0, pivot)`,
//! zero rows removed. Two lattices are equal exactly when their bases are.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::matrix::ExactMatrix;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("matrix shape {rows}x{cols} does not match {entries} entries")]
    ShapeMismatch { rows: usize, cols: usize, entries: usize },
    #[error("ambient rank mismatch: {left} vs {right}")]
    RankMismatch { left: usize, right: usize },
    #[error("vector of length {found} where {expected} was expected")]
    LengthMismatch { expected: usize, found: usize },
}

/// A sublattice of `Z^ambient_rank`, always held in canonical HNF.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LatticeBasis {
    ambient_rank: usize,
    basis: ExactMatrix,
}

impl LatticeBasis {
    /// Canonical basis of the row span of `generators`.
    pub fn span(generators: &ExactMatrix) -> Self {
        hnf(generators)
    }

    pub fn zero(ambient_rank: usize) -> Self {
        Self {
            ambient_rank,
            basis: ExactMatrix::zeros(0, ambient_rank),
        }
    }

    pub fn full(ambient_rank: usize) -> Self {
        Self {
            ambient_rank,
            basis: ExactMatrix::identity(ambient_rank),
        }
    }

    pub fn ambient_rank(&self) -> usize {
        self.ambient_rank
    }

    /// Number of basis rows, i.e. the rank of the lattice.
    pub fn rank(&self) -> usize {
        self.basis.rows()
    }

    pub fn basis(&self) -> &ExactMatrix {
        &self.basis
    }

    pub fn rows(&self) -> impl Iterator<Item = &[BigInt]> + '_ {
        self.basis.row_iter()
    }

    pub fn is_zero(&self) -> bool {
        self.basis.rows() == 0
    }

    /// Whether the stored basis satisfies every HNF invariant. Always true for
    /// values built through this module; exposed for tests and assertions.
    pub fn is_canonical(&self) -> bool {
        let mut last_pivot: Option<usize> = None;
        let mut pivots = Vec::new();
        for row in self.basis.row_iter() {
            let Some(p) = row.iter().position(|e| !e.is_zero()) else {
                return false;
            };
            if last_pivot.is_some_and(|lp| p <= lp) || !row[p].is_positive() {
                return false;
            }
            last_pivot = Some(p);
            pivots.push(p);
        }
        for (i, &p) in pivots.iter().enumerate() {
            let pivot = self.basis.get(i, p);
            for above in 0..i {
                let e = self.basis.get(above, p);
                if e.is_negative() || e >= pivot {
                    return false;
                }
            }
        }
        true
    }

    /// `(column, value)` of each pivot, top to bottom.
    pub fn pivots(&self) -> Vec<(usize, BigInt)> {
        self.basis
            .row_iter()
            .map(|row| {
                let c = row.iter().position(|e| !e.is_zero()).unwrap();
                (c, row[c].clone())
            })
            .collect()
    }

    /// `factor * L`. Scaling a canonical basis by a positive integer keeps it
    /// canonical, so no elimination is needed.
    pub fn scaled(&self, factor: &BigInt) -> Self {
        if factor.is_zero() {
            return Self::zero(self.ambient_rank);
        }
        Self {
            ambient_rank: self.ambient_rank,
            basis: self.basis.scaled(&factor.abs()),
        }
    }

    pub fn sum(&self, other: &Self) -> Result<Self, LatticeError> {
        lattice_sum(self, other)
    }

    pub fn intersect(&self, other: &Self) -> Result<Self, LatticeError> {
        lattice_intersect(self, other)
    }

    pub fn contains(&self, v: &[BigInt]) -> Result<bool, LatticeError> {
        Ok(self.coordinates(v)?.is_some())
    }

    /// Whether every vector of `other` lies in `self`.
    pub fn contains_lattice(&self, other: &Self) -> Result<bool, LatticeError> {
        check_rank(self, other)?;
        for row in other.rows() {
            if !self.contains(row)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Integer coefficients `c` with `c * basis = v`, if `v` is in the lattice.
    /// Back-substitution down the echelon form.
    pub fn coordinates(&self, v: &[BigInt]) -> Result<Option<Vec<BigInt>>, LatticeError> {
        if v.len() != self.ambient_rank {
            return Err(LatticeError::LengthMismatch {
                expected: self.ambient_rank,
                found: v.len(),
            });
        }
        let mut residual = v.to_vec();
        let mut coeffs = Vec::with_capacity(self.rank());
        let mut col = 0;
        for row in self.basis.row_iter() {
            let p = row.iter().position(|e| !e.is_zero()).unwrap();
            if residual[col..p].iter().any(|e| !e.is_zero()) {
                return Ok(None);
            }
            let (q, r) = residual[p].div_rem(&row[p]);
            if !r.is_zero() {
                return Ok(None);
            }
            if !q.is_zero() {
                for (x, y) in residual[p..].iter_mut().zip(&row[p..]) {
                    *x -= &q * y;
                }
            }
            coeffs.push(q);
            col = p + 1;
        }
        if residual[col..].iter().any(|e| !e.is_zero()) {
            return Ok(None);
        }
        Ok(Some(coeffs))
    }

    /// Reduces `v` modulo the lattice to the canonical coset representative:
    /// each pivot coordinate lands in `[0, pivot)`.
    pub fn reduce(&self, v: &[BigInt]) -> Result<Vec<BigInt>, LatticeError> {
        if v.len() != self.ambient_rank {
            return Err(LatticeError::LengthMismatch {
                expected: self.ambient_rank,
                found: v.len(),
            });
        }
        let mut out = v.to_vec();
        for row in self.basis.row_iter() {
            let p = row.iter().position(|e| !e.is_zero()).unwrap();
            let q = out[p].div_floor(&row[p]);
            if !q.is_zero() {
                for (x, y) in out[p..].iter_mut().zip(&row[p..]) {
                    *x -= &q * y;
                }
            }
        }
        Ok(out)
    }
}

impl Ord for LatticeBasis {
    /// Lexicographic order on the canonical basis rows.
    fn cmp(&self, other: &Self) -> Ordering {
        self.ambient_rank
            .cmp(&other.ambient_rank)
            .then_with(|| self.rows().cmp(other.rows()))
    }
}

impl PartialOrd for LatticeBasis {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for LatticeBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.basis)
    }
}

fn check_rank(a: &LatticeBasis, b: &LatticeBasis) -> Result<(), LatticeError> {
    if a.ambient_rank != b.ambient_rank {
        return Err(LatticeError::RankMismatch {
            left: a.ambient_rank,
            right: b.ambient_rank,
        });
    }
    Ok(())
}

fn sub_multiple(target: &mut [BigInt], source: &[BigInt], q: &BigInt, from: usize) {
    for (x, y) in target[from..].iter_mut().zip(&source[from..]) {
        *x -= q * y;
    }
}

/// Row-style Hermite normal form of the row span of `a`.
pub fn hnf(a: &ExactMatrix) -> LatticeBasis {
    let cols = a.cols();
    let mut rows: Vec<Vec<BigInt>> = a
        .row_iter()
        .filter(|r| r.iter().any(|e| !e.is_zero()))
        .map(<[BigInt]>::to_vec)
        .collect();
    hnf_rows(&mut rows, cols);
    LatticeBasis {
        ambient_rank: cols,
        basis: ExactMatrix::from_row_vecs(cols, rows),
    }
}

fn hnf_rows(rows: &mut Vec<Vec<BigInt>>, cols: usize) {
    let mut pivot_row = 0;
    for col in 0..cols {
        if pivot_row == rows.len() {
            break;
        }
        loop {
            // Pivot on the smallest nonzero magnitude to curb coefficient growth.
            let best = (pivot_row..rows.len())
                .filter(|&i| !rows[i][col].is_zero())
                .min_by(|&i, &j| rows[i][col].magnitude().cmp(rows[j][col].magnitude()));
            let Some(best) = best else { break };
            rows.swap(pivot_row, best);
            let mut clean = true;
            for i in pivot_row + 1..rows.len() {
                if rows[i][col].is_zero() {
                    continue;
                }
                let q = &rows[i][col] / &rows[pivot_row][col];
                let (head, tail) = rows.split_at_mut(i);
                sub_multiple(&mut tail[0], &head[pivot_row], &q, col);
                if !tail[0][col].is_zero() {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            if rows[pivot_row][col].is_negative() {
                for e in rows[pivot_row][col..].iter_mut() {
                    *e = -&*e;
                }
            }
            for i in 0..pivot_row {
                let q = rows[i][col].div_floor(&rows[pivot_row][col]);
                if !q.is_zero() {
                    let (head, tail) = rows.split_at_mut(pivot_row);
                    sub_multiple(&mut head[i], &tail[0], &q, col);
                }
            }
            pivot_row += 1;
            break;
        }
    }
    rows.truncate(pivot_row);
}

/// Invariant factors `d_1 | d_2 | ... | d_r` of `a`, one per unit of rank.
pub fn snf(a: &ExactMatrix) -> Vec<BigInt> {
    let mut m = a.to_row_vecs();
    let rows = a.rows();
    let cols = a.cols();
    let mut diag = Vec::new();
    let mut t = 0;
    while t < rows.min(cols) {
        // smallest nonzero entry of the trailing block
        let mut best: Option<(usize, usize)> = None;
        for (i, row) in m.iter().enumerate().skip(t) {
            for (j, e) in row.iter().enumerate().skip(t) {
                if !e.is_zero() && best.is_none_or(|(bi, bj)| e.magnitude() < m[bi][bj].magnitude()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((bi, bj)) = best else { break };
        m.swap(t, bi);
        for row in m.iter_mut() {
            row.swap(t, bj);
        }
        let mut clean = true;
        for i in t + 1..rows {
            if m[i][t].is_zero() {
                continue;
            }
            let q = &m[i][t] / &m[t][t];
            let (head, tail) = m.split_at_mut(i);
            sub_multiple(&mut tail[0], &head[t], &q, t);
            if !tail[0][t].is_zero() {
                clean = false;
            }
        }
        for j in t + 1..cols {
            if m[t][j].is_zero() {
                continue;
            }
            let q = &m[t][j] / &m[t][t];
            for row in m.iter_mut().skip(t) {
                let v = &row[t] * &q;
                row[j] -= v;
            }
            if !m[t][j].is_zero() {
                clean = false;
            }
        }
        if clean {
            diag.push(m[t][t].abs());
            t += 1;
        }
    }
    // Enforce the divisibility chain: (a, b) -> (gcd, lcm) leaves the group unchanged.
    for i in 0..diag.len() {
        for j in i + 1..diag.len() {
            let g = diag[i].gcd(&diag[j]);
            if g != diag[i] {
                let l = diag[i].lcm(&diag[j]);
                diag[i] = g;
                diag[j] = l;
            }
        }
    }
    diag.sort();
    debug_assert!(diag.iter().all(|d| d >= &BigInt::one()));
    diag
}

pub fn lattice_sum(a: &LatticeBasis, b: &LatticeBasis) -> Result<LatticeBasis, LatticeError> {
    check_rank(a, b)?;
    if a.is_zero() {
        return Ok(b.clone());
    }
    if b.is_zero() || a == b {
        return Ok(a.clone());
    }
    Ok(hnf(&a.basis.stack(&b.basis)?))
}

/// `a ∩ b` through the kernel of `[A; -B]`: row-reduce `[[A, A], [B, 0]]`; the
/// rows whose left half vanishes carry the intersection in their right half.
pub fn lattice_intersect(a: &LatticeBasis, b: &LatticeBasis) -> Result<LatticeBasis, LatticeError> {
    check_rank(a, b)?;
    let k = a.ambient_rank;
    if a.is_zero() || b.is_zero() {
        return Ok(LatticeBasis::zero(k));
    }
    if a == b {
        return Ok(a.clone());
    }
    let mut rows: Vec<Vec<BigInt>> = Vec::with_capacity(a.rank() + b.rank());
    for r in a.rows() {
        let mut v = r.to_vec();
        v.extend_from_slice(r);
        rows.push(v);
    }
    for r in b.rows() {
        let mut v = r.to_vec();
        v.extend(std::iter::repeat_n(BigInt::zero(), k));
        rows.push(v);
    }
    hnf_rows(&mut rows, 2 * k);
    let inter: Vec<Vec<BigInt>> = rows
        .into_iter()
        .filter(|r| r[..k].iter().all(Zero::is_zero))
        .map(|r| r[k..].to_vec())
        .collect();
    Ok(LatticeBasis {
        ambient_rank: k,
        basis: ExactMatrix::from_row_vecs(k, inter),
    })
}

pub fn lattice_contains(l: &LatticeBasis, v: &[BigInt]) -> Result<bool, LatticeError> {
    l.contains(v)
}
