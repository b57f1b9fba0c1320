//! Exact integer linear algebra for constraint kernels.
//!
//! Row reduction is fraction-free: rows are combined by cross-multiplication
//! and stripped of their content afterwards, so every intermediate value stays
//! integral and no rounding ever happens.

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Signed, Zero};

/// Reduce `rows` in place to row echelon form and drop the zero rows.
/// Returns the pivot column indices in increasing order; the rank is their count.
pub fn row_echelon<I>(rows: &mut Vec<Vec<I>>, ncols: usize) -> Vec<usize>
where
    I: Integer + Signed + Clone,
{
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..ncols {
        if r == rows.len() {
            break;
        }
        // Smallest nonzero pivot keeps the cross-multiplied entries small.
        let best = (r..rows.len())
            .filter(|&i| !rows[i][col].is_zero())
            .min_by_key(|&i| rows[i][col].abs());
        let Some(best) = best else { continue };
        rows.swap(r, best);
        for i in (r + 1)..rows.len() {
            if rows[i][col].is_zero() {
                continue;
            }
            let a = rows[r][col].clone();
            let b = rows[i][col].clone();
            for j in 0..ncols {
                let v = a.clone() * rows[i][j].clone() - b.clone() * rows[r][j].clone();
                rows[i][j] = v;
            }
            strip_content(&mut rows[i]);
        }
        pivots.push(col);
        r += 1;
    }
    rows.truncate(r);
    pivots
}

/// Basis of the right kernel of echelonized `rows`, one vector per free column.
/// Vectors are integral with content one and positive leading entry, sorted
/// lexicographically.
pub fn kernel_basis<I>(rows: &[Vec<I>], ncols: usize, pivots: &[usize]) -> Vec<Vec<I>>
where
    I: Integer + Signed + Clone,
{
    let pivot_set: std::collections::BTreeSet<usize> = pivots.iter().copied().collect();
    let mut basis = Vec::new();
    for free in 0..ncols {
        if pivot_set.contains(&free) {
            continue;
        }
        // x[free] = 1, the other free variables 0; back-substitute the pivots.
        let mut x: Vec<Ratio<I>> = vec![Ratio::zero(); ncols];
        x[free] = Ratio::one();
        for (k, &pc) in pivots.iter().enumerate().rev() {
            let mut s: Ratio<I> = Ratio::zero();
            for j in (pc + 1)..ncols {
                if !rows[k][j].is_zero() && !x[j].is_zero() {
                    s = s + Ratio::from_integer(rows[k][j].clone()) * x[j].clone();
                }
            }
            x[pc] = -s / Ratio::from_integer(rows[k][pc].clone());
        }
        basis.push(clear_denominators(&x));
    }
    basis.sort();
    basis
}

/// Convenience wrapper: echelonize a copy and return `(rank, kernel basis)`.
pub fn kernel<I>(mut rows: Vec<Vec<I>>, ncols: usize) -> (usize, Vec<Vec<I>>)
where
    I: Integer + Signed + Clone,
{
    let pivots = row_echelon(&mut rows, ncols);
    let basis = kernel_basis(&rows, ncols, &pivots);
    (pivots.len(), basis)
}

/// Exact dot product, used to check kernel vectors against rows.
pub fn dot<I>(row: &[I], x: &[I]) -> I
where
    I: Integer + Signed + Clone,
{
    let mut s = I::zero();
    for (a, b) in row.iter().zip(x) {
        s = s + a.clone() * b.clone();
    }
    s
}

fn strip_content<I: Integer + Signed + Clone>(row: &mut [I]) {
    let mut g = I::zero();
    for v in row.iter() {
        g = g.gcd(v);
    }
    if g.is_zero() || g.is_one() {
        return;
    }
    for v in row.iter_mut() {
        *v = v.clone() / g.clone();
    }
}

fn clear_denominators<I: Integer + Signed + Clone>(x: &[Ratio<I>]) -> Vec<I> {
    let mut l = I::one();
    for v in x {
        l = l.lcm(v.denom());
    }
    let mut out: Vec<I> = x
        .iter()
        .map(|v| v.numer().clone() * (l.clone() / v.denom().clone()))
        .collect();
    strip_content(&mut out);
    if let Some(first) = out.iter().find(|v| !v.is_zero()) {
        if first.is_negative() {
            for v in out.iter_mut() {
                *v = -v.clone();
            }
        }
    }
    out
}
