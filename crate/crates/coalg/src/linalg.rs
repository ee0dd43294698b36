//! Exact linear algebra over the coefficient fields (Q and F_p):
//! row reduction, rank, kernel bases, and rational root extraction for
//! the character enumeration.

use std::collections::BTreeSet;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::scalar::{RingSpec, Scalar};
use crate::{CoalgError, Result};

fn require_field(ring: &Arc<RingSpec>) -> Result<()> {
    if ring.is_field() {
        Ok(())
    } else {
        Err(CoalgError::NotAField(ring.to_string()))
    }
}

/// In-place reduced row echelon form; returns the pivot columns.
pub fn row_reduce(matrix: &mut [Vec<Scalar>], ring: &Arc<RingSpec>) -> Result<Vec<usize>> {
    require_field(ring)?;
    let rows = matrix.len();
    let cols = matrix.first().map(|r| r.len()).unwrap_or(0);
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        let Some(pivot_row) = (row..rows).find(|&r| !matrix[r][col].is_zero()) else {
            continue;
        };
        matrix.swap(row, pivot_row);
        let inv = matrix[row][col]
            .inverse()
            .ok_or_else(|| CoalgError::NotAField(ring.to_string()))?;
        for c in col..cols {
            matrix[row][c] = matrix[row][c].mul(&inv)?;
        }
        for r in 0..rows {
            if r != row && !matrix[r][col].is_zero() {
                let factor = matrix[r][col].clone();
                for c in col..cols {
                    let sub = matrix[row][c].mul(&factor)?;
                    matrix[r][c] = matrix[r][c].sub(&sub)?;
                }
            }
        }
        pivots.push(col);
        row += 1;
        if row == rows {
            break;
        }
    }
    Ok(pivots)
}

pub fn rank(matrix: &[Vec<Scalar>], ring: &Arc<RingSpec>) -> Result<usize> {
    let mut m = matrix.to_vec();
    Ok(row_reduce(&mut m, ring)?.len())
}

/// Basis of the right kernel `{x : M x = 0}`.
pub fn kernel_basis(matrix: &[Vec<Scalar>], cols: usize, ring: &Arc<RingSpec>) -> Result<Vec<Vec<Scalar>>> {
    let mut m = matrix.to_vec();
    let pivots = row_reduce(&mut m, ring)?;
    let zero = Scalar::zero(ring);
    let one = Scalar::one(ring);
    let mut basis = Vec::new();
    for free in 0..cols {
        if pivots.contains(&free) {
            continue;
        }
        let mut v = vec![zero.clone(); cols];
        v[free] = one.clone();
        for (r, &p) in pivots.iter().enumerate() {
            v[p] = m[r][free].neg();
        }
        basis.push(v);
    }
    Ok(basis)
}

/// Solve `A x = b` with `A` given by columns; `None` when inconsistent.
pub fn solve_columns(columns: &[Vec<Scalar>], b: &[Scalar], ring: &Arc<RingSpec>) -> Result<Option<Vec<Scalar>>> {
    let rows = b.len();
    let cols = columns.len();
    let mut m: Vec<Vec<Scalar>> = (0..rows)
        .map(|r| {
            let mut row: Vec<Scalar> = columns.iter().map(|c| c[r].clone()).collect();
            row.push(b[r].clone());
            row
        })
        .collect();
    let pivots = row_reduce(&mut m, ring)?;
    if pivots.contains(&cols) {
        return Ok(None);
    }
    let zero = Scalar::zero(ring);
    let mut x = vec![zero; cols];
    for (r, &p) in pivots.iter().enumerate() {
        x[p] = m[r][cols].clone();
    }
    Ok(Some(x))
}

/// For vectors `v_0, …, v_m`: coefficients `(a_0, …, a_{m-1}, 1)` with
/// `Σ a_i v_i + v_m = 0`, when the last vector depends on the earlier
/// ones. Feeding in successive powers of an element yields its monic
/// minimal polynomial.
pub fn linear_dependency(vectors: &[Vec<Scalar>], ring: &Arc<RingSpec>) -> Result<Option<Vec<Scalar>>> {
    let m = vectors.len();
    if m == 0 {
        return Ok(None);
    }
    let last = &vectors[m - 1];
    let neg_last: Vec<Scalar> = last.iter().map(|c| c.neg()).collect();
    match solve_columns(&vectors[..m - 1], &neg_last, ring)? {
        Some(mut coeffs) => {
            coeffs.push(Scalar::one(ring));
            Ok(Some(coeffs))
        }
        None => Ok(None),
    }
}

fn divisors(n: &BigInt) -> Result<Vec<BigInt>> {
    let n = n.abs();
    let digits = n.to_u64_digits().1;
    if digits.len() > 1 {
        return Err(CoalgError::BadParameter("coefficient too large for root search".into()));
    }
    let v = digits.first().copied().unwrap_or(0);
    let mut out = Vec::new();
    let mut d = 1u64;
    while d.saturating_mul(d) <= v {
        if v % d == 0 {
            out.push(BigInt::from(d));
            out.push(BigInt::from(v / d));
        }
        d += 1;
    }
    out.sort();
    out.dedup();
    Ok(out)
}

/// All rational roots of a polynomial with rational coefficients
/// (constant term first), exactly.
pub fn rational_roots(poly: &[Scalar], ring: &Arc<RingSpec>) -> Result<Vec<Scalar>> {
    if !matches!(&**ring, RingSpec::Rationals) {
        return Err(CoalgError::NotAField(ring.to_string()));
    }
    let mut coeffs: Vec<BigRational> = poly
        .iter()
        .map(|c| c.to_rational().ok_or_else(|| CoalgError::BadParameter("rational coefficients expected".into())))
        .collect::<Result<_>>()?;
    while coeffs.last().is_some_and(|c| c.is_zero()) {
        coeffs.pop();
    }
    if coeffs.is_empty() {
        return Err(CoalgError::BadParameter("zero polynomial has every root".into()));
    }
    // clear denominators
    let mut lcm = BigInt::one();
    for c in &coeffs {
        lcm = lcm.lcm(c.denom());
    }
    let ints: Vec<BigInt> = coeffs.iter().map(|c| (c * BigRational::from(lcm.clone())).to_integer()).collect();
    let mut roots: BTreeSet<BigRational> = BTreeSet::new();
    let low = ints.iter().position(|c| !c.is_zero()).unwrap_or(0);
    if low > 0 {
        roots.insert(BigRational::zero());
    }
    let reduced = &ints[low..];
    if reduced.len() > 1 {
        let a0 = &reduced[0];
        let lead = &reduced[reduced.len() - 1];
        for p in divisors(a0)? {
            for q in divisors(lead)? {
                for sign in [1i64, -1] {
                    let cand = BigRational::new(&p * BigInt::from(sign), q.clone());
                    let mut value = BigRational::zero();
                    for c in reduced.iter().rev() {
                        value = value * &cand + BigRational::from(c.clone());
                    }
                    if value.is_zero() {
                        roots.insert(cand);
                    }
                }
            }
        }
    }
    roots
        .into_iter()
        .map(|r| Scalar::from_rational(ring, &r))
        .collect()
}
