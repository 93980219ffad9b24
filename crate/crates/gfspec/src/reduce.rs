//! Persistence of a filtered complex by boundary-matrix column reduction.
//!
//! Cells are processed in the canonical order `(value, dimension, id)`;
//! relative cells are excluded both as rows and as columns, so the output is
//! the persistent homology of the pair (complex, relative subcomplex) over
//! GF(2).  Columns are reduced dimension by dimension from the top down with
//! the clearing optimization: once a row is identified as the pivot of a
//! reduced column, the column of that row's cell is known to reduce to zero
//! and is skipped.
//!
//! Columns are sparse ascending index lists; the pivot is the last entry.

use crate::barcode::{Bar, Barcode};
use crate::complex::FilteredComplex;
use crate::error::Result;

/// Symmetric difference of two sorted index lists (GF(2) column addition).
fn xor_columns(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// Compute the barcode of a filtered complex.
///
/// Validates the complex first; a non-monotone filtration or a relative
/// subcomplex that is not closed under facets is a validation error.
pub fn reduce(complex: &FilteredComplex) -> Result<Barcode> {
    complex.validate()?;
    let order = complex.sorted_order();
    let n = order.len();
    // map cell id -> position in the processing order (relative cells absent)
    let mut pos = vec![usize::MAX; complex.len()];
    for (p, &id) in order.iter().enumerate() {
        pos[id] = p;
    }

    // reduced columns (by position), pivot ownership, bookkeeping
    let mut columns: Vec<Option<Vec<usize>>> = vec![None; n];
    let mut pivot_owner: Vec<Option<usize>> = vec![None; n];
    let mut is_death = vec![false; n];
    let mut cleared = vec![false; n];

    let max_dim = complex.max_dim();
    for q in (1..=max_dim).rev() {
        for (p, &id) in order.iter().enumerate() {
            let cell = complex.cell(id);
            if cell.dim != q || cleared[p] {
                continue;
            }
            // boundary column: positions of non-relative facets, sorted
            let mut col: Vec<usize> = cell
                .facets
                .iter()
                .filter(|&&f| !complex.cell(f).relative)
                .map(|&f| pos[f])
                .collect();
            col.sort_unstable();
            loop {
                let Some(&low) = col.last() else {
                    // zero column: `p` is a birth; pairing (if any) was
                    // already decided while processing dimension q+1
                    columns[p] = Some(col);
                    break;
                };
                match pivot_owner[low] {
                    None => {
                        pivot_owner[low] = Some(p);
                        is_death[p] = true;
                        cleared[low] = true;
                        columns[p] = Some(col);
                        break;
                    }
                    Some(owner) => {
                        let other = columns[owner]
                            .as_ref()
                            .expect("pivot owner must have a stored column");
                        col = xor_columns(&col, other);
                    }
                }
            }
        }
    }

    let mut bars = Vec::new();
    for (p, &id) in order.iter().enumerate() {
        if is_death[p] {
            continue;
        }
        let cell = complex.cell(id);
        match pivot_owner[p] {
            Some(death_pos) => {
                let death_cell = complex.cell(order[death_pos]);
                bars.push(Bar {
                    degree: cell.dim,
                    birth: cell.value,
                    death: death_cell.value,
                });
            }
            None => bars.push(Bar {
                degree: cell.dim,
                birth: cell.value,
                death: f64::INFINITY,
            }),
        }
    }
    Ok(Barcode::new(bars))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::Cell;

    fn vertex(value: f64) -> Cell {
        Cell { dim: 0, facets: vec![], value, relative: false }
    }

    fn edge(a: usize, b: usize, value: f64) -> Cell {
        Cell { dim: 1, facets: vec![a, b], value, relative: false }
    }

    #[test]
    fn single_vertex_gives_one_infinite_bar() {
        let c = FilteredComplex::new(vec![vertex(0.0)]).unwrap();
        let bc = reduce(&c).unwrap();
        assert_eq!(bc.bars(), &[Bar { degree: 0, birth: 0.0, death: f64::INFINITY }]);
    }

    #[test]
    fn circle_of_three_vertices() {
        // triangle boundary with values 0, 0.5, 1 and edges at the max of
        // their endpoints: one component born at 0, one loop born at 1
        let c = FilteredComplex::new(vec![
            vertex(0.0),
            vertex(0.5),
            vertex(1.0),
            edge(0, 1, 0.5),
            edge(1, 2, 1.0),
            edge(2, 0, 1.0),
        ])
        .unwrap();
        let bc = reduce(&c).unwrap();
        assert_eq!(
            bc.bars(),
            &[
                Bar { degree: 0, birth: 0.0, death: f64::INFINITY },
                Bar { degree: 1, birth: 1.0, death: f64::INFINITY },
            ]
        );
    }

    #[test]
    fn merge_creates_finite_bar() {
        // two components merged by an edge at value 2
        let c = FilteredComplex::new(vec![
            vertex(0.0),
            vertex(1.0),
            edge(0, 1, 2.0),
        ])
        .unwrap();
        let bc = reduce(&c).unwrap();
        assert_eq!(
            bc.bars(),
            &[
                Bar { degree: 0, birth: 0.0, death: f64::INFINITY },
                Bar { degree: 0, birth: 1.0, death: 2.0 },
            ]
        );
    }

    #[test]
    fn relative_subcomplex_is_quotiented() {
        // interval with both endpoints relative: H_1(I, dI) = GF(2), born at
        // the edge value
        let c = FilteredComplex::new(vec![
            Cell { dim: 0, facets: vec![], value: f64::NEG_INFINITY, relative: true },
            Cell { dim: 0, facets: vec![], value: f64::NEG_INFINITY, relative: true },
            edge(0, 1, 0.75),
        ])
        .unwrap();
        let bc = reduce(&c).unwrap();
        assert_eq!(bc.bars(), &[Bar { degree: 1, birth: 0.75, death: f64::INFINITY }]);
    }

    #[test]
    fn filled_triangle_kills_the_loop() {
        let c = FilteredComplex::new(vec![
            vertex(0.0),
            vertex(0.0),
            vertex(0.0),
            edge(0, 1, 1.0),
            edge(1, 2, 1.0),
            edge(2, 0, 1.0),
            Cell { dim: 2, facets: vec![3, 4, 5], value: 2.0, relative: false },
        ])
        .unwrap();
        let bc = reduce(&c).unwrap();
        assert_eq!(
            bc.bars(),
            &[
                Bar { degree: 0, birth: 0.0, death: 1.0 },
                Bar { degree: 0, birth: 0.0, death: 1.0 },
                Bar { degree: 0, birth: 0.0, death: f64::INFINITY },
                Bar { degree: 1, birth: 1.0, death: 2.0 },
            ]
        );
    }

    #[test]
    fn barcode_invariant_under_id_permutation() {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let cells = vec![
            vertex(0.3),
            vertex(0.1),
            vertex(0.7),
            vertex(0.2),
            edge(0, 1, 0.5),
            edge(1, 2, 0.9),
            edge(2, 3, 1.1),
            edge(3, 0, 0.6),
        ];
        let base = reduce(&FilteredComplex::new(cells.clone()).unwrap()).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        for _ in 0..10 {
            let mut perm: Vec<usize> = (0..cells.len()).collect();
            perm.shuffle(&mut rng);
            // perm[old] = new id; rebuild with facets renumbered
            let mut new_cells: Vec<Cell> = vec![vertex(0.0); cells.len()];
            for (old, cell) in cells.iter().enumerate() {
                let mut c = cell.clone();
                c.facets = c.facets.iter().map(|&f| perm[f]).collect();
                new_cells[perm[old]] = c;
            }
            let permuted = reduce(&FilteredComplex::new(new_cells).unwrap()).unwrap();
            assert_eq!(base, permuted, "barcode changed under id permutation");
        }
    }
}
