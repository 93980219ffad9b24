//! Independent rank oracle for persistent homology.
//!
//! [`rank_of`] computes the rank of the map `H_q(K^s) -> H_q(K^t)` induced
//! by inclusion of sublevel complexes (relative cells quotiented away) by
//! direct Gaussian elimination:
//!
//! ```text
//! rank = dim(Z_q^s + B_q^t) - dim B_q^t
//! ```
//!
//! where `Z_q^s` is the degree-`q` cycle space of the sublevel complex at
//! `s` and `B_q^t` the boundary space at `t`.  No part of the column
//! reduction in [`crate::reduce`] is reused; this is the ground truth that
//! barcodes are checked against (`#bars with birth ≤ s and death > t` must
//! equal this rank).

use crate::complex::FilteredComplex;
use crate::error::{Error, Result};
use crate::gf2::{dim_of_sum, rank_of_rows, BitMat, BitVec};

/// Ids of the non-relative cells of dimension `dim` with value ≤ `level`,
/// ascending by id (a stable coordinate system for chain vectors).
fn cells_below(complex: &FilteredComplex, dim: usize, level: f64) -> Vec<usize> {
    (0..complex.len())
        .filter(|&i| {
            let c = complex.cell(i);
            !c.relative && c.dim == dim && c.value <= level
        })
        .collect()
}

/// Boundary matrix of the dimension-`q` cells in `cols`, with rows indexed
/// by `rows` (ids of (q-1)-cells).  Relative facets are dropped (quotient).
fn boundary_matrix(complex: &FilteredComplex, rows: &[usize], cols: &[usize]) -> BitMat {
    let row_pos: std::collections::HashMap<usize, usize> =
        rows.iter().enumerate().map(|(p, &id)| (id, p)).collect();
    let mut m = BitMat::zeros(rows.len(), cols.len());
    for (c, &id) in cols.iter().enumerate() {
        for &f in &complex.cell(id).facets {
            if complex.cell(f).relative {
                continue;
            }
            let r = row_pos[&f];
            // mod-2 multiplicity: facets are listed at most once per cell
            m.set(r, c, true);
        }
    }
    m
}

/// Rank of `H_q(K^s) -> H_q(K^t)` for `s ≤ t`.
///
/// The complex is assumed valid (see [`FilteredComplex::validate`]); `s > t`
/// is an argument error.
pub fn rank_of(complex: &FilteredComplex, s: f64, t: f64, degree: usize) -> Result<usize> {
    if s > t {
        return Err(Error::Argument(format!(
            "rank_of requires s ≤ t, got s = {s}, t = {t}"
        )));
    }
    let q = degree;
    let q_cells_t = cells_below(complex, q, t);
    let pos_t: std::collections::HashMap<usize, usize> =
        q_cells_t.iter().enumerate().map(|(p, &id)| (id, p)).collect();

    // cycle space at level s, embedded into the level-t coordinate system
    let q_cells_s = cells_below(complex, q, s);
    let cycles_s: Vec<BitVec> = if q == 0 {
        q_cells_s
            .iter()
            .map(|&id| BitVec::unit(q_cells_t.len(), pos_t[&id]))
            .collect()
    } else {
        let rows_s = cells_below(complex, q - 1, s);
        let d_s = boundary_matrix(complex, &rows_s, &q_cells_s);
        d_s.kernel_basis()
            .into_iter()
            .map(|k| {
                let mut v = BitVec::zeros(q_cells_t.len());
                for c in k.ones() {
                    v.set(pos_t[&q_cells_s[c]], true);
                }
                v
            })
            .collect()
    };

    // boundary space at level t
    let up_cells_t = cells_below(complex, q + 1, t);
    let mut boundaries_t: Vec<BitVec> = Vec::with_capacity(up_cells_t.len());
    for &id in &up_cells_t {
        let mut v = BitVec::zeros(q_cells_t.len());
        for &f in &complex.cell(id).facets {
            if !complex.cell(f).relative {
                v.set(pos_t[&f], true);
            }
        }
        boundaries_t.push(v);
    }

    let dim_sum = dim_of_sum(&cycles_s, &boundaries_t);
    let dim_b = rank_of_rows(&mut boundaries_t);
    Ok(dim_sum - dim_b)
}

/// Betti number of the sublevel complex at `t` in the given degree.
pub fn betti(complex: &FilteredComplex, t: f64, degree: usize) -> Result<usize> {
    rank_of(complex, t, t, degree)
}

/// Cross-check the reduction against this oracle: for every pair of critical
/// values `s ≤ t` and every degree, the persistence rank must equal the
/// number of bars containing `[s, t]`.  Panics on the first mismatch.
pub fn assert_matches_barcode(complex: &FilteredComplex) {
    let barcode = crate::reduce::reduce(complex).expect("reduction failed");
    let values = complex.critical_values();
    let top = complex.max_dim();
    for (i, &s) in values.iter().enumerate() {
        for &t in &values[i..] {
            for q in 0..=top {
                let rank = rank_of(complex, s, t, q).unwrap();
                let bars = barcode.n_bars_containing(s, t, q);
                assert_eq!(rank, bars, "mismatch at s={s} t={t} q={q}");
            }
        }
    }
}
