//! Localized invariants: spectral values of a field restricted to a region
//! of its base grid, computed from the filtration of the pair
//! (closure, boundary).
//!
//! A [`Region`] is a union of axis-aligned closed index boxes (wrap-around
//! allowed on periodic axes), possibly disconnected.  Cells of the grid
//! complex belong to the region closure when they fit inside one of the
//! boxes; the boundary consists of the closure cells with a top-dimensional
//! coface outside the closure.  Degenerate boxes (single vertices) have no
//! boundary — they model the shrinking-neighborhood limit of the pointwise
//! invariant.
//!
//! For a field `f` on the base:
//! * `region_c_minus` = level at which every component of the region meets
//!   the sublevel set (absolute filtration, degree-0 classes);
//! * `region_c_plus` = level at which the relative fundamental class of
//!   every component of (closure, boundary) is present (top-degree classes);
//! * `region_beta` = boundary depth of the relative-pair filtration.
//!
//! The same invariants exist for a product-base field `S(x, y; xi)` with a
//! region in the `x` factor: the pair adds the deep fiber sublevel to the
//! relative part, and the degrees shift by the fiber index and the `y`
//! dimension.

use crate::barcode::Barcode;
use crate::complex::FilteredComplex;
use crate::error::{Error, Result};
use crate::gfqi::GfqiField;
use crate::grid::{build_complex_with, code_dim, CellClass, CellCode, GridDomain, GridField};
use crate::reduce::reduce;

/// Per-axis closed vertex window: start index and vertex count (count equal
/// to the axis length means the full axis).
pub type BoxSpec = Vec<(usize, usize)>;

/// A union of closed index boxes in a grid domain.
#[derive(Clone, Debug)]
pub struct Region {
    domain: GridDomain,
    boxes: Vec<BoxSpec>,
}

impl Region {
    pub fn new(domain: GridDomain, boxes: Vec<BoxSpec>) -> Result<Self> {
        if boxes.is_empty() {
            return Err(Error::Argument("empty region".into()));
        }
        for b in &boxes {
            if b.len() != domain.dim() {
                return Err(Error::Argument("box rank does not match the grid".into()));
            }
            for ((start, count), axis) in b.iter().zip(domain.axes()) {
                if *count == 0 || *count > axis.len || *start >= axis.len {
                    return Err(Error::Argument(format!(
                        "box window ({start}, {count}) out of range on an axis of length {}",
                        axis.len
                    )));
                }
                if !axis.periodic && start + count > axis.len {
                    return Err(Error::Argument(
                        "wrap-around window on a non-periodic axis".into(),
                    ));
                }
            }
        }
        Ok(Region { domain, boxes })
    }

    /// The whole grid as one region.
    pub fn full(domain: GridDomain) -> Self {
        let b: BoxSpec = domain.axes().iter().map(|a| (0, a.len)).collect();
        Region { boxes: vec![b], domain }
    }

    /// A single vertex.
    pub fn vertex(domain: GridDomain, idx: &[usize]) -> Result<Self> {
        let b: BoxSpec = idx.iter().map(|&i| (i, 1)).collect();
        Region::new(domain, vec![b])
    }

    /// An arc on a one-dimensional grid: `count` vertices from `start`.
    pub fn arc(domain: GridDomain, start: usize, count: usize) -> Result<Self> {
        if domain.dim() != 1 {
            return Err(Error::Argument("arc regions need a one-axis grid".into()));
        }
        Region::new(domain, vec![vec![(start, count)]])
    }

    /// Union of two regions over the same grid.
    pub fn union(&self, other: &Region) -> Result<Region> {
        if self.domain != other.domain {
            return Err(Error::Argument("regions live on different grids".into()));
        }
        let mut boxes = self.boxes.clone();
        boxes.extend(other.boxes.iter().cloned());
        Region::new(self.domain.clone(), boxes)
    }

    pub fn domain(&self) -> &GridDomain {
        &self.domain
    }

    pub fn boxes(&self) -> &[BoxSpec] {
        &self.boxes
    }

    /// Does the closure contain this cell?
    pub fn contains_code(&self, code: &CellCode) -> bool {
        self.boxes.iter().any(|b| {
            code.iter().zip(b).zip(self.domain.axes()).all(|((&c, &(start, count)), axis)| {
                let n = axis.len;
                if count == n {
                    return true;
                }
                let v = c / 2;
                let pos = (v + n - start) % n;
                if c % 2 == 0 {
                    pos < count
                } else {
                    // edge [v, v+1]: needs one more vertex of room
                    pos + 1 < count
                }
            })
        })
    }

    /// Largest dimension of a member cell.
    pub fn top_dim(&self) -> usize {
        self.boxes
            .iter()
            .map(|b| {
                b.iter()
                    .zip(self.domain.axes())
                    .filter(|(&(_, count), axis)| count == axis.len || count > 1)
                    .count()
            })
            .max()
            .unwrap_or(0)
    }

    /// Top-dimensional cofaces of a cell in the ambient grid.
    fn top_cofaces(&self, code: &CellCode) -> Vec<CellCode> {
        let mut out = vec![code.clone()];
        for (k, axis) in self.domain.axes().iter().enumerate() {
            let n_codes = axis.n_codes();
            let mut next = Vec::new();
            for partial in out {
                let c = partial[k];
                if c % 2 == 1 {
                    next.push(partial);
                    continue;
                }
                // vertex on this axis: the two adjacent edges
                let mut lower_ok = c > 0 || axis.periodic;
                let mut upper_ok = c + 1 < n_codes || axis.periodic;
                if axis.periodic && axis.len == 1 {
                    lower_ok = false;
                    upper_ok = false;
                }
                if lower_ok {
                    let mut p = partial.clone();
                    p[k] = if c == 0 { n_codes - 1 } else { c - 1 };
                    next.push(p);
                }
                if upper_ok {
                    let mut p = partial.clone();
                    p[k] = c + 1;
                    next.push(p);
                }
            }
            out = next;
        }
        out
    }

    /// Class of each cell: interior, boundary, or outside the closure.
    ///
    /// Boundary rule: for full-dimensional regions, a closure cell is
    /// boundary when some top-dimensional coface leaves the closure; a
    /// vertex-only region has no boundary.  Other intermediate dimensions
    /// are rejected.
    pub fn classify(&self, code: &CellCode) -> Result<RegionClass> {
        if !self.contains_code(code) {
            return Ok(RegionClass::Outside);
        }
        let r = self.top_dim();
        if r == self.domain.dim() {
            let escapes = self
                .top_cofaces(code)
                .iter()
                .any(|c| code_dim(c) == self.domain.dim() && !self.contains_code(c));
            Ok(if escapes { RegionClass::Boundary } else { RegionClass::Interior })
        } else if r == 0 {
            Ok(RegionClass::Interior)
        } else {
            Err(Error::Argument(
                "regions must be full-dimensional or pure vertex sets".into(),
            ))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RegionClass {
    Interior,
    Boundary,
    Outside,
}

/// Filtration of the region closure, absolute (no relative cells).
fn absolute_complex(f: &GridField, region: &Region) -> Result<FilteredComplex> {
    check_domain(f, region)?;
    let mut status = Ok(());
    let complex = build_complex_with(f, |code, _| match region.classify(code) {
        Ok(RegionClass::Outside) => CellClass::Excluded,
        Ok(_) => CellClass::Normal,
        Err(e) => {
            if status.is_ok() {
                status = Err(e);
            }
            CellClass::Excluded
        }
    })?;
    status?;
    Ok(complex)
}

/// Filtration of the pair (closure, boundary).
fn pair_complex(f: &GridField, region: &Region) -> Result<FilteredComplex> {
    check_domain(f, region)?;
    let mut status = Ok(());
    let complex = build_complex_with(f, |code, _| match region.classify(code) {
        Ok(RegionClass::Outside) => CellClass::Excluded,
        Ok(RegionClass::Boundary) => CellClass::Relative,
        Ok(RegionClass::Interior) => CellClass::Normal,
        Err(e) => {
            if status.is_ok() {
                status = Err(e);
            }
            CellClass::Excluded
        }
    })?;
    status?;
    Ok(complex)
}

fn check_domain(f: &GridField, region: &Region) -> Result<()> {
    if f.domain() != region.domain() {
        return Err(Error::Argument("region grid does not match the field".into()));
    }
    Ok(())
}

/// Largest birth among the infinite bars of the given degree; error when
/// there are none.
fn last_infinite_birth(barcode: &Barcode, degree: usize, what: &str) -> Result<f64> {
    barcode
        .infinite_in_degree(degree)
        .iter()
        .map(|b| b.birth)
        .fold(None, |acc: Option<f64>, b| Some(acc.map_or(b, |a| a.max(b))))
        .ok_or_else(|| {
            Error::InternalInvariant(format!(
                "no infinite bar in degree {degree} for the {what} class"
            ))
        })
}

/// Level at which every component of the region meets the sublevel set.
pub fn region_c_minus(f: &GridField, region: &Region) -> Result<f64> {
    let barcode = reduce(&absolute_complex(f, region)?)?;
    last_infinite_birth(&barcode, 0, "unit")
}

/// Level at which the relative fundamental class of every component of
/// (closure, boundary) is present.
pub fn region_c_plus(f: &GridField, region: &Region) -> Result<f64> {
    let barcode = reduce(&pair_complex(f, region)?)?;
    last_infinite_birth(&barcode, region.top_dim(), "fundamental")
}

/// Boundary depth of the relative-pair filtration.
pub fn region_beta(f: &GridField, region: &Region) -> Result<f64> {
    Ok(reduce(&pair_complex(f, region)?)?.boundary_depth())
}

pub fn region_gamma(f: &GridField, region: &Region) -> Result<f64> {
    Ok(region_c_plus(f, region)? - region_c_minus(f, region)?)
}

/// Pointwise invariant: the shrinking-region limit collapses to `f(x)`.
/// Computed as the region invariant of the single-vertex region (asserted
/// equal to `f(x)` exactly) and bracketed by the invariants of the one-cell
/// star neighborhood.
pub fn local_c(f: &GridField, x: &[usize]) -> Result<f64> {
    let v = Region::vertex(f.domain().clone(), x)?;
    let lo = region_c_minus(f, &v)?;
    let hi = region_c_plus(f, &v)?;
    let fx = f.value_at(x);
    if lo != fx || hi != fx {
        return Err(Error::InternalInvariant(format!(
            "vertex-region invariants ({lo}, {hi}) disagree with the field value {fx}"
        )));
    }
    let star_box: BoxSpec = x
        .iter()
        .zip(f.domain().axes())
        .map(|(&i, a)| {
            if a.len >= 3 {
                ((i + a.len - 1) % a.len, 3)
            } else {
                (0, a.len)
            }
        })
        .collect();
    let star = Region::new(f.domain().clone(), vec![star_box])?;
    let s_lo = region_c_minus(f, &star)?;
    let s_hi = region_c_plus(f, &star)?;
    if !(s_lo <= fx && fx <= s_hi) {
        return Err(Error::InternalInvariant(format!(
            "star bracket [{s_lo}, {s_hi}] misses the field value {fx}"
        )));
    }
    Ok(fx)
}

// ---------------------------------------------------------------------------
// product-base variants
// ---------------------------------------------------------------------------

/// Check that the region matches the leading `split` axes of the field's
/// base, and return the quotient-pair complex over the region: cells whose
/// `x` part leaves the closure are dropped; cells over the region boundary
/// or below the deep threshold are relative.
fn product_pair_complex(s: &GfqiField, split: usize, region: &Region) -> Result<FilteredComplex> {
    if split > s.base().dim() {
        return Err(Error::Argument("split exceeds the base dimension".into()));
    }
    if region.domain().axes() != &s.base().axes()[..split] {
        return Err(Error::Argument(
            "region grid does not match the leading base axes".into(),
        ));
    }
    let c0 = s.deep_threshold();
    let field = s.as_grid_field();
    let mut status = Ok(());
    let complex = build_complex_with(&field, |code, value| {
        let xpart: CellCode = code[..split].to_vec();
        match region.classify(&xpart) {
            Ok(RegionClass::Outside) => CellClass::Excluded,
            Ok(RegionClass::Boundary) => CellClass::Relative,
            Ok(RegionClass::Interior) => {
                if value <= -c0 {
                    CellClass::Relative
                } else {
                    CellClass::Normal
                }
            }
            Err(e) => {
                if status.is_ok() {
                    status = Err(e);
                }
                CellClass::Excluded
            }
        }
    })?;
    status?;
    Ok(complex)
}

/// Absolute-in-`x` variant: only the deep fiber sublevel is relative.
fn product_absolute_complex(
    s: &GfqiField,
    split: usize,
    region: &Region,
) -> Result<FilteredComplex> {
    if region.domain().axes() != &s.base().axes()[..split] {
        return Err(Error::Argument(
            "region grid does not match the leading base axes".into(),
        ));
    }
    let c0 = s.deep_threshold();
    let field = s.as_grid_field();
    let mut status = Ok(());
    let complex = build_complex_with(&field, |code, value| {
        let xpart: CellCode = code[..split].to_vec();
        match region.classify(&xpart) {
            Ok(RegionClass::Outside) => CellClass::Excluded,
            Ok(_) => {
                if value <= -c0 {
                    CellClass::Relative
                } else {
                    CellClass::Normal
                }
            }
            Err(e) => {
                if status.is_ok() {
                    status = Err(e);
                }
                CellClass::Excluded
            }
        }
    })?;
    status?;
    Ok(complex)
}

/// `c_plus` of a product-base field localized to a region of the leading
/// base factor.
pub fn product_region_c_plus(s: &GfqiField, split: usize, region: &Region) -> Result<f64> {
    let barcode = reduce(&product_pair_complex(s, split, region)?)?;
    let degree = s.q_index() + region.top_dim() + (s.base().dim() - split);
    last_infinite_birth(&barcode, degree, "fundamental")
}

/// `c_minus` of a product-base field localized to a region of the leading
/// base factor.
pub fn product_region_c_minus(s: &GfqiField, split: usize, region: &Region) -> Result<f64> {
    let barcode = reduce(&product_absolute_complex(s, split, region)?)?;
    last_infinite_birth(&barcode, s.q_index(), "unit")
}

/// Boundary depth of the localized pair filtration.
pub fn product_region_beta(s: &GfqiField, split: usize, region: &Region) -> Result<f64> {
    Ok(reduce(&product_pair_complex(s, split, region)?)?.boundary_depth())
}
