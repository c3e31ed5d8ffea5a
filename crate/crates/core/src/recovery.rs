//! Greedy sparse recovery.
//!
//! [`omp`] is orthogonal matching pursuit with a known sparsity level. The
//! least-squares refit keeps an incrementally updated orthonormal basis of the
//! selected columns (modified Gram-Schmidt with one re-orthogonalization pass).
//! [`onecol_matched`] is the 1-sparse special case evaluated column by column.

use ndarray::{Array1, ArrayView1, ArrayView2};

use crate::error::{Error, Result};
use crate::scalar::{norm_sqr, Cx, Real};

#[derive(Debug, Clone, PartialEq)]
pub struct SparseEstimate<T: Real> {
    /// Selected column indices in selection order.
    pub support: Vec<usize>,
    /// Least-squares coefficients aligned with `support`.
    pub coefficients: Vec<Cx<T>>,
    pub residual_norm: T,
    /// Residual norm after each iteration.
    pub residual_history: Vec<T>,
    /// Set when a selected column was linearly dependent on earlier ones; its
    /// coefficient is then zero and the fit uses the independent columns.
    pub rank_deficient: bool,
}

fn check_dims<T: Real>(y: ArrayView1<'_, Cx<T>>, a: ArrayView2<'_, Cx<T>>) -> Result<()> {
    if a.nrows() != y.len() {
        return Err(Error::domain(format!(
            "measurement length {} does not match dictionary rows {}",
            y.len(),
            a.nrows()
        )));
    }
    Ok(())
}

/// Index of the largest value, first one on ties.
fn argmax<T: Real>(vals: impl Iterator<Item = T>) -> Option<(usize, T)> {
    vals.enumerate().fold(None, |best, (i, v)| match best {
        Some((_, b)) if v <= b => best,
        _ => Some((i, v)),
    })
}

fn vdot<T: Real>(a: ArrayView1<'_, Cx<T>>, b: ArrayView1<'_, Cx<T>>) -> Cx<T> {
    a.iter()
        .zip(b)
        .fold(Cx::new(T::zero(), T::zero()), |acc, (x, y)| acc + x.conj() * y)
}

/// Orthogonal matching pursuit: recovers a `k`-sparse `x` from `y ≈ A x`.
pub fn omp<T: Real>(y: ArrayView1<'_, Cx<T>>, a: ArrayView2<'_, Cx<T>>, k: usize) -> Result<SparseEstimate<T>> {
    check_dims(y, a)?;
    let cols = a.ncols();
    if k == 0 || k > cols {
        return Err(Error::domain(format!("sparsity {k} must lie in 1..={cols}")));
    }

    let mut residual = y.to_owned();
    let mut selected = vec![false; cols];
    let mut support = Vec::with_capacity(k);
    // Orthonormal basis of independent selected columns, and for each selected
    // column its coordinates in that basis (None when dependent).
    let mut basis: Vec<Array1<Cx<T>>> = Vec::with_capacity(k);
    let mut coords: Vec<Option<Vec<Cx<T>>>> = Vec::with_capacity(k);
    let mut residual_history = Vec::with_capacity(k);
    let mut rank_deficient = false;
    let at = a.t();

    for _ in 0..k {
        // |a_jᴴ r| = |a_jᵀ conj(r)|
        let corr = at.dot(&residual.mapv(|z| z.conj()));
        let (j, _) = argmax(
            corr.iter()
                .zip(&selected)
                .map(|(c, &s)| if s { -T::one() } else { c.norm_sqr() }),
        )
        .expect("dictionary has columns");
        selected[j] = true;
        support.push(j);

        let col = a.column(j);
        let col_norm = norm_sqr(col.iter()).sqrt();
        let mut v = col.to_owned();
        let mut r = vec![Cx::new(T::zero(), T::zero()); basis.len()];
        for _pass in 0..2 {
            for (q, ri) in basis.iter().zip(r.iter_mut()) {
                let p = vdot(q.view(), v.view());
                *ri += p;
                v.zip_mut_with(q, |vi, qi| *vi -= *qi * p);
            }
        }
        let v_norm = norm_sqr(v.iter()).sqrt();
        let tol = T::epsilon().sqrt() * T::of(16.0) * col_norm.max(T::min_positive_value());
        if v_norm <= tol {
            rank_deficient = true;
            coords.push(None);
        } else {
            r.push(Cx::new(v_norm, T::zero()));
            let inv = T::one() / v_norm;
            let q = v.mapv(|z| z * inv);
            let p = vdot(q.view(), residual.view());
            residual.zip_mut_with(&q, |ri, qi| *ri -= *qi * p);
            basis.push(q);
            coords.push(Some(r));
        }
        residual_history.push(norm_sqr(residual.iter()).sqrt());
    }

    let coefficients = back_substitute(&basis, &coords, y);
    Ok(SparseEstimate {
        support,
        coefficients,
        residual_norm: *residual_history.last().expect("k >= 1"),
        residual_history,
        rank_deficient,
    })
}

/// Solves `R c = Qᴴ y` over the independent columns; dependent ones get zero.
fn back_substitute<T: Real>(
    basis: &[Array1<Cx<T>>],
    coords: &[Option<Vec<Cx<T>>>],
    y: ArrayView1<'_, Cx<T>>,
) -> Vec<Cx<T>> {
    let zero = Cx::new(T::zero(), T::zero());
    let rhs: Vec<Cx<T>> = basis.iter().map(|q| vdot(q.view(), y)).collect();
    // Columns of R, restricted to independent columns.
    let indep: Vec<(usize, &Vec<Cx<T>>)> = coords
        .iter()
        .enumerate()
        .filter_map(|(i, c)| c.as_ref().map(|c| (i, c)))
        .collect();
    let m = indep.len();
    let mut sol = vec![zero; m];
    for row in (0..m).rev() {
        let mut acc = rhs[row];
        for (col, c) in sol.iter().enumerate().skip(row + 1) {
            acc -= indep[col].1[row] * *c;
        }
        sol[row] = acc / indep[row].1[row];
    }
    let mut out = vec![zero; coords.len()];
    for ((i, _), c) in indep.iter().zip(sol) {
        out[*i] = c;
    }
    out
}

/// Best single column for `y`: maximizes `|a_jᴴ y|` (lowest index on ties) and
/// returns it with its projection coefficient.
pub fn onecol_matched<T: Real>(y: ArrayView1<'_, Cx<T>>, a: ArrayView2<'_, Cx<T>>) -> Result<(usize, Cx<T>)> {
    check_dims(y, a)?;
    if a.ncols() == 0 {
        return Err(Error::domain("dictionary has no columns"));
    }
    let mut best = (0, -T::one(), Cx::new(T::zero(), T::zero()));
    for (j, col) in a.columns().into_iter().enumerate() {
        let c = vdot(col, y);
        let m = c.norm_sqr();
        if m > best.1 {
            best = (j, m, c);
        }
    }
    let (j, _, c) = best;
    let energy = norm_sqr(a.column(j).iter());
    let coef = if energy > T::zero() { c / energy } else { c };
    Ok((j, coef))
}
