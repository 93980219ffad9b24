//! Grids, sampled fields and lower-star cubical filtrations.
//!
//! A [`GridDomain`] is a product of axes, each either periodic (a circle
//! sampled at `len` points, spacing `2π/len`) or non-periodic (a symmetric
//! box axis with `len` samples, centered at 0).  A zero-axis domain is a
//! single point.  A [`GridField`] samples a real function at the grid
//! vertices.
//!
//! The cubical complex of a domain has one cell per choice, on every axis,
//! of either a vertex or an edge between consecutive vertices; the cell's
//! dimension is the number of edge factors.  The lower-star filtration value
//! of a cell is the maximum of the field over its corner vertices, so
//! sublevel complexes of the filtration are exactly the cubical complexes of
//! the sublevel sets of the sampled function.

use crate::complex::{Cell, FilteredComplex};
use crate::error::{Error, Result};

pub const TAU: f64 = std::f64::consts::TAU;

/// One axis of a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct Axis {
    /// Number of sample points (≥ 4 on any real axis).
    pub len: usize,
    /// Periodic (circle) or not (box interval).
    pub periodic: bool,
    /// Distance between consecutive samples.
    pub spacing: f64,
}

impl Axis {
    /// Circle axis with `len` samples over `[0, 2π)`.
    pub fn circle(len: usize) -> Self {
        Axis { len, periodic: true, spacing: TAU / len as f64 }
    }

    /// Box axis with `len` samples over `[-halfwidth, halfwidth]`.
    pub fn box_interval(len: usize, halfwidth: f64) -> Self {
        Axis { len, periodic: false, spacing: 2.0 * halfwidth / (len as f64 - 1.0) }
    }

    /// Coordinate of vertex `i`: `i*spacing` on a circle, centered on a box.
    pub fn coordinate(&self, i: usize) -> f64 {
        if self.periodic {
            i as f64 * self.spacing
        } else {
            (i as f64 - (self.len as f64 - 1.0) / 2.0) * self.spacing
        }
    }

    /// Number of cell codes on this axis (vertices and edges interleaved).
    pub(crate) fn n_codes(&self) -> usize {
        if self.periodic {
            2 * self.len
        } else {
            2 * self.len - 1
        }
    }
}

/// A product of axes; zero axes is a point.
#[derive(Clone, Debug, PartialEq)]
pub struct GridDomain {
    axes: Vec<Axis>,
}

impl GridDomain {
    /// Checked construction: every axis needs `len ≥ 4` and positive spacing.
    /// (A point domain — no axes — is allowed and used for point bases.)
    pub fn new(axes: Vec<Axis>) -> Result<Self> {
        for (i, a) in axes.iter().enumerate() {
            if a.len < 4 {
                return Err(Error::Validation(format!(
                    "axis {i}: length {} < 4",
                    a.len
                )));
            }
            if !a.spacing.is_finite() || a.spacing <= 0.0 {
                return Err(Error::Validation(format!(
                    "axis {i}: spacing {} not positive",
                    a.spacing
                )));
            }
        }
        Ok(GridDomain { axes })
    }

    /// The zero-dimensional point domain.
    pub fn point() -> Self {
        GridDomain { axes: Vec::new() }
    }

    /// Torus of the given axis lengths (1 or 2 axes in practice).
    pub fn torus(lens: &[usize]) -> Result<Self> {
        Self::new(lens.iter().map(|&n| Axis::circle(n)).collect())
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    /// Number of grid vertices (1 for a point).
    pub fn n_vertices(&self) -> usize {
        self.axes.iter().map(|a| a.len).product()
    }

    /// Concatenation of two domains (base ⊕ fiber style products).
    pub fn product(&self, other: &GridDomain) -> GridDomain {
        let mut axes = self.axes.clone();
        axes.extend(other.axes.iter().cloned());
        GridDomain { axes }
    }

    /// Flat row-major index of a vertex multi-index.
    pub fn flat_index(&self, idx: &[usize]) -> usize {
        assert_eq!(idx.len(), self.axes.len(), "index rank mismatch");
        let mut flat = 0;
        for (a, &i) in self.axes.iter().zip(idx) {
            assert!(i < a.len, "vertex index out of range");
            flat = flat * a.len + i;
        }
        flat
    }

    /// Inverse of [`flat_index`](GridDomain::flat_index).
    pub fn multi_index(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.axes.len()];
        for (k, a) in self.axes.iter().enumerate().rev() {
            idx[k] = flat % a.len;
            flat /= a.len;
        }
        idx
    }

    /// Largest axis spacing (0 for a point domain).
    pub fn max_spacing(&self) -> f64 {
        self.axes.iter().map(|a| a.spacing).fold(0.0, f64::max)
    }

    /// All vertex multi-indices in flat order.
    pub fn vertices(&self) -> Vec<Vec<usize>> {
        let mut out = Vec::with_capacity(self.n_vertices());
        let mut idx = vec![0usize; self.axes.len()];
        loop {
            out.push(idx.clone());
            // odometer increment; a point domain has exactly one vertex
            let mut k = self.axes.len();
            loop {
                if k == 0 {
                    return out;
                }
                k -= 1;
                idx[k] += 1;
                if idx[k] < self.axes[k].len {
                    break;
                }
                idx[k] = 0;
            }
        }
    }
}

/// A real-valued function sampled on the vertices of a domain.
#[derive(Clone, Debug)]
pub struct GridField {
    domain: GridDomain,
    values: Vec<f64>,
}

impl GridField {
    pub fn new(domain: GridDomain, values: Vec<f64>) -> Result<Self> {
        if values.len() != domain.n_vertices() {
            return Err(Error::Argument(format!(
                "value count {} does not match vertex count {}",
                values.len(),
                domain.n_vertices()
            )));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::Validation(format!("non-finite field value {v}")));
        }
        Ok(GridField { domain, values })
    }

    /// Sample a function of the vertex coordinates.
    pub fn sample(domain: GridDomain, f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        let values: Vec<f64> = domain
            .vertices()
            .iter()
            .map(|idx| {
                let coords: Vec<f64> = idx
                    .iter()
                    .zip(domain.axes())
                    .map(|(&i, a)| a.coordinate(i))
                    .collect();
                f(&coords)
            })
            .collect();
        GridField::new(domain, values)
    }

    pub fn domain(&self) -> &GridDomain {
        &self.domain
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value_at(&self, idx: &[usize]) -> f64 {
        self.values[self.domain.flat_index(idx)]
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Sup-norm distance to another field on the same domain.
    pub fn sup_distance(&self, other: &GridField) -> Result<f64> {
        if self.domain != other.domain {
            return Err(Error::Argument("sup_distance: domain mismatch".into()));
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    /// Discrete Lipschitz estimate: the largest absolute difference between
    /// axis-neighbors divided by the axis spacing.
    pub fn lipschitz(&self) -> f64 {
        let mut best: f64 = 0.0;
        for idx in self.domain.vertices() {
            let v = self.value_at(&idx);
            for (k, a) in self.domain.axes().iter().enumerate() {
                let mut nb = idx.clone();
                if idx[k] + 1 < a.len {
                    nb[k] = idx[k] + 1;
                } else if a.periodic {
                    nb[k] = 0;
                } else {
                    continue;
                }
                best = best.max((self.value_at(&nb) - v).abs() / a.spacing);
            }
        }
        best
    }

    /// Multilinear interpolation over the first `n_interp` axes at real
    /// coordinates given in *index units* (periodic wrap applied); the
    /// remaining axes are fixed at integer indices.
    pub fn interpolate_partial(&self, real_idx: &[f64], rest: &[usize]) -> f64 {
        let n = real_idx.len();
        assert_eq!(n + rest.len(), self.domain.dim(), "coordinate rank mismatch");
        let mut acc = 0.0;
        // iterate over the 2^n corners of the interpolation cell
        for corner in 0..(1usize << n) {
            let mut weight = 1.0;
            let mut idx = Vec::with_capacity(self.domain.dim());
            for (k, &x) in real_idx.iter().enumerate() {
                let axis = &self.domain.axes()[k];
                let base = x.floor();
                let frac = x - base;
                let (i, w) = if corner >> k & 1 == 0 {
                    (base as i64, 1.0 - frac)
                } else {
                    (base as i64 + 1, frac)
                };
                let wrapped = if axis.periodic {
                    i.rem_euclid(axis.len as i64) as usize
                } else {
                    i.clamp(0, axis.len as i64 - 1) as usize
                };
                weight *= w;
                idx.push(wrapped);
            }
            if weight == 0.0 {
                continue;
            }
            idx.extend_from_slice(rest);
            acc += weight * self.value_at(&idx);
        }
        acc
    }
}

// ---------------------------------------------------------------------------
// cubical complexes
// ---------------------------------------------------------------------------

/// Per-axis cell code: even `2i` is vertex `i`, odd `2i+1` is the edge from
/// vertex `i` to vertex `i+1` (wrapping on periodic axes).
pub type CellCode = Vec<usize>;

/// Enumerate all cell codes of the domain in flat (row-major) order.
pub fn cell_codes(domain: &GridDomain) -> Vec<CellCode> {
    let radices: Vec<usize> = domain.axes().iter().map(|a| a.n_codes()).collect();
    let total: usize = radices.iter().product();
    let mut out = Vec::with_capacity(total);
    let mut code = vec![0usize; radices.len()];
    loop {
        out.push(code.clone());
        let mut k = radices.len();
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            code[k] += 1;
            if code[k] < radices[k] {
                break;
            }
            code[k] = 0;
        }
    }
}

/// Dimension of a cell code (number of edge factors).
pub fn code_dim(code: &CellCode) -> usize {
    code.iter().filter(|&&c| c % 2 == 1).count()
}

/// Corner vertex multi-indices of a cell.
pub fn code_vertices(domain: &GridDomain, code: &CellCode) -> Vec<Vec<usize>> {
    let mut corners = vec![Vec::with_capacity(code.len())];
    for (k, &c) in code.iter().enumerate() {
        let axis = &domain.axes()[k];
        let choices: Vec<usize> = if c % 2 == 0 {
            vec![c / 2]
        } else {
            let i = (c - 1) / 2;
            let j = if i + 1 < axis.len { i + 1 } else { 0 }; // wrap (periodic only)
            vec![i, j]
        };
        let mut next = Vec::with_capacity(corners.len() * choices.len());
        for base in &corners {
            for &ch in &choices {
                let mut v = base.clone();
                v.push(ch);
                next.push(v);
            }
        }
        corners = next;
    }
    corners
}

/// Facet codes of a cell (replace one edge factor by an endpoint vertex).
pub fn code_facets(domain: &GridDomain, code: &CellCode) -> Vec<CellCode> {
    let mut out = Vec::new();
    for (k, &c) in code.iter().enumerate() {
        if c % 2 == 0 {
            continue;
        }
        let axis = &domain.axes()[k];
        let low = c - 1;
        let high = if c + 1 < axis.n_codes() { c + 1 } else { 0 }; // wrap
        for repl in [low, high] {
            let mut f = code.clone();
            f[k] = repl;
            out.push(f);
        }
    }
    out
}

/// Flat id of a cell code.
pub fn code_flat(domain: &GridDomain, code: &CellCode) -> usize {
    let mut flat = 0;
    for (a, &c) in domain.axes().iter().zip(code) {
        flat = flat * a.n_codes() + c;
    }
    flat
}

/// How a cell participates in a filtered complex.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CellClass {
    /// Present with its lower-star value.
    Normal,
    /// Present in the relative (quotiented) subcomplex.
    Relative,
    /// Not part of the complex.
    Excluded,
}

/// Build the filtered cubical complex of `field`'s domain, classifying each
/// cell by `class(code, lower-star value)`.  Excluded cells must not occur as
/// facets of included ones (validated).
pub fn build_complex_with<F>(field: &GridField, mut class: F) -> Result<FilteredComplex>
where
    F: FnMut(&CellCode, f64) -> CellClass,
{
    let domain = field.domain();
    let codes = cell_codes(domain);
    // map flat code -> new id for included cells
    let mut id_of = vec![usize::MAX; codes.len()];
    let mut cells: Vec<Cell> = Vec::new();
    let mut kept: Vec<(CellCode, CellClass)> = Vec::new();
    for code in &codes {
        let value = code_vertices(domain, code)
            .iter()
            .map(|v| field.value_at(v))
            .fold(f64::NEG_INFINITY, f64::max);
        let c = class(code, value);
        if c == CellClass::Excluded {
            continue;
        }
        id_of[code_flat(domain, code)] = cells.len();
        let relative = c == CellClass::Relative;
        cells.push(Cell {
            dim: code_dim(code),
            facets: Vec::new(),
            value: if relative { f64::NEG_INFINITY } else { value },
            relative,
        });
        kept.push((code.clone(), c));
    }
    for (i, (code, _)) in kept.iter().enumerate() {
        let mut facets = Vec::new();
        for f in code_facets(domain, code) {
            let fid = id_of[code_flat(domain, &f)];
            if fid == usize::MAX {
                return Err(Error::Validation(
                    "included cell has an excluded facet".into(),
                ));
            }
            facets.push(fid);
        }
        cells[i].facets = facets;
    }
    FilteredComplex::new(cells)
}

/// Lower-star filtration of a field: every cell, none relative.
pub fn lower_star(field: &GridField) -> Result<FilteredComplex> {
    build_complex_with(field, |_, _| CellClass::Normal)
}
