//! Exact dense linear solving over the rationals.
//!
//! Both the Virasoro linear route and the Hurwitz polynomial fits reduce
//! to overdetermined systems that must be solved exactly and whose surplus
//! rows carry meaning: a surplus row failing to close is evidence against
//! the theory being tested, not numerical noise. The solver therefore
//! reports rank deficiency and inconsistency as distinct outcomes and
//! never returns an approximate answer.

use crate::rat::Rat;

/// Why a system had no unique solution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LinearFailure {
    /// Fewer independent rows than columns; `pivots` got determined.
    RankDeficient { pivots: usize, cols: usize },
    /// Row `row` (0-based, in input order) reduced to `0 = nonzero`.
    Inconsistent { row: usize },
}

/// Solves `rows * x = rhs` exactly, requiring full column rank; surplus
/// rows must be consistent with the unique solution.
pub fn solve_unique(
    ncols: usize,
    rows: Vec<(Vec<Rat>, Rat)>,
) -> std::result::Result<Vec<Rat>, LinearFailure> {
    let mut mat: Vec<(Vec<Rat>, Rat, usize)> = rows
        .into_iter()
        .enumerate()
        .map(|(i, (r, b))| {
            assert!(r.len() == ncols, "row {i} has wrong width");
            (r, b, i)
        })
        .collect();

    let mut pivot_rows: Vec<usize> = Vec::with_capacity(ncols);
    let mut next_row = 0usize;
    for col in 0..ncols {
        let Some(p) = (next_row..mat.len()).find(|&r| !mat[r].0[col].is_zero()) else {
            continue;
        };
        mat.swap(next_row, p);
        let inv = mat[next_row].0[col].recip().expect("pivot is nonzero");
        for x in mat[next_row].0.iter_mut() {
            *x = &*x * &inv;
        }
        mat[next_row].1 = &mat[next_row].1 * &inv;
        for r in 0..mat.len() {
            if r == next_row || mat[r].0[col].is_zero() {
                continue;
            }
            let f = mat[r].0[col].clone();
            for c in col..ncols {
                let delta = &f * &mat[next_row].0[c];
                mat[r].0[c] = &mat[r].0[c] - &delta;
            }
            let delta = &f * &mat[next_row].1;
            mat[r].1 = &mat[r].1 - &delta;
        }
        pivot_rows.push(col);
        next_row += 1;
    }

    for (r, b, orig) in mat.iter().skip(next_row) {
        debug_assert!(r.iter().all(|x| x.is_zero()));
        if !b.is_zero() {
            return Err(LinearFailure::Inconsistent { row: *orig });
        }
    }
    if pivot_rows.len() < ncols {
        return Err(LinearFailure::RankDeficient {
            pivots: pivot_rows.len(),
            cols: ncols,
        });
    }

    let mut x = vec![Rat::zero(); ncols];
    for (i, &col) in pivot_rows.iter().enumerate() {
        x[col] = mat[i].1.clone();
    }
    Ok(x)
}
