//! Filtered cell complexes with an optional relative subcomplex.
//!
//! A [`FilteredComplex`] is a list of cells, each carrying a dimension, the
//! ids of its codimension-one faces, a filtration value and a `relative`
//! flag.  Cells flagged relative form a subcomplex that is quotiented away:
//! homology is always computed for the pair (complex, relative subcomplex).
//! Internally relative cells carry the filtration value `-inf`, which keeps
//! the monotonicity check uniform (a `-inf` face is below every value).
//!
//! The processing order used everywhere downstream is fixed here: cells are
//! sorted by `(filtration value, dimension, id)`.  Barcodes are therefore
//! invariant under any renumbering of cells that preserves values and
//! dimensions, which the tests exercise.

use crate::error::{Error, Result};

/// One cell of a filtered complex.
#[derive(Clone, Debug)]
pub struct Cell {
    /// Dimension of the cell (0 for vertices).
    pub dim: usize,
    /// Ids of the codimension-one faces.  Over GF(2) multiplicity is taken
    /// mod 2, so each facet appears at most once.
    pub facets: Vec<usize>,
    /// Filtration value; `-inf` exactly for relative cells.
    pub value: f64,
    /// Whether the cell belongs to the relative (quotiented) subcomplex.
    pub relative: bool,
}

/// A filtered complex; cell ids are indices into `cells`.
#[derive(Clone, Debug)]
pub struct FilteredComplex {
    cells: Vec<Cell>,
}

impl FilteredComplex {
    /// Wrap a list of cells without validating; call [`validate`] separately
    /// or use [`new`] for checked construction.
    ///
    /// [`validate`]: FilteredComplex::validate
    /// [`new`]: FilteredComplex::new
    pub fn from_cells(cells: Vec<Cell>) -> Self {
        FilteredComplex { cells }
    }

    /// Checked construction: validates all structural invariants.
    pub fn new(cells: Vec<Cell>) -> Result<Self> {
        let c = FilteredComplex { cells };
        c.validate()?;
        Ok(c)
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn cell(&self, id: usize) -> &Cell {
        &self.cells[id]
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    /// Highest cell dimension present (0 for an empty complex).
    pub fn max_dim(&self) -> usize {
        self.cells.iter().map(|c| c.dim).max().unwrap_or(0)
    }

    /// Structural validation:
    ///
    /// * facet ids are in range and have dimension one less;
    /// * filtration is monotone (each facet value ≤ the cell value);
    /// * relative cells are closed under taking facets and carry `-inf`;
    /// * non-relative cells carry finite values;
    /// * the boundary of a boundary vanishes mod 2.
    pub fn validate(&self) -> Result<()> {
        for (id, cell) in self.cells.iter().enumerate() {
            if cell.relative {
                if cell.value != f64::NEG_INFINITY {
                    return Err(Error::Validation(format!(
                        "relative cell {id} must carry value -inf"
                    )));
                }
            } else if !cell.value.is_finite() {
                return Err(Error::Validation(format!(
                    "cell {id} has non-finite filtration value {}",
                    cell.value
                )));
            }
            let mut seen = std::collections::HashSet::new();
            for &f in &cell.facets {
                if f >= self.cells.len() {
                    return Err(Error::Validation(format!(
                        "cell {id} lists facet {f} out of range"
                    )));
                }
                if !seen.insert(f) {
                    return Err(Error::Validation(format!(
                        "cell {id} lists facet {f} twice"
                    )));
                }
                let facet = &self.cells[f];
                if cell.dim == 0 || facet.dim != cell.dim - 1 {
                    return Err(Error::Validation(format!(
                        "cell {id} (dim {}) has facet {f} of dim {}",
                        cell.dim, facet.dim
                    )));
                }
                if facet.value > cell.value {
                    return Err(Error::Validation(format!(
                        "filtration not monotone: facet {f} ({}) above cell {id} ({})",
                        facet.value, cell.value
                    )));
                }
                if cell.relative && !facet.relative {
                    return Err(Error::Validation(format!(
                        "relative subcomplex not closed: cell {id} is relative, facet {f} is not"
                    )));
                }
            }
        }
        // boundary-of-boundary: every (d-2)-face must occur an even number of
        // times among the facets of the facets of each cell.
        for (id, cell) in self.cells.iter().enumerate() {
            if cell.dim < 2 {
                continue;
            }
            let mut counts: std::collections::HashMap<usize, usize> =
                std::collections::HashMap::new();
            for &f in &cell.facets {
                for &g in &self.cells[f].facets {
                    *counts.entry(g).or_insert(0) += 1;
                }
            }
            if let Some((g, n)) = counts.iter().find(|(_, n)| *n % 2 != 0) {
                return Err(Error::Validation(format!(
                    "boundary of boundary nonzero at cell {id}: face {g} occurs {n} times"
                )));
            }
        }
        Ok(())
    }

    /// Ids of the non-relative cells in processing order
    /// `(value, dimension, id)`.
    pub fn sorted_order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.cells.len())
            .filter(|&i| !self.cells[i].relative)
            .collect();
        order.sort_by(|&a, &b| {
            let ca = &self.cells[a];
            let cb = &self.cells[b];
            ca.value
                .partial_cmp(&cb.value)
                .expect("finite filtration values")
                .then(ca.dim.cmp(&cb.dim))
                .then(a.cmp(&b))
        });
        order
    }

    /// Sorted distinct filtration values of the non-relative cells.
    pub fn critical_values(&self) -> Vec<f64> {
        let mut vals: Vec<f64> = self
            .cells
            .iter()
            .filter(|c| !c.relative)
            .map(|c| c.value)
            .collect();
        vals.sort_by(|a, b| a.partial_cmp(b).expect("finite values"));
        vals.dedup();
        vals
    }
}
