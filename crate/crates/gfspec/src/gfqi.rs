//! Generating-function fields: quadratic at infinity in the fiber.
//!
//! A [`GfqiField`] samples `S(x; xi) = Q(xi) + P(x; xi)` on (periodic base
//! grid) × (non-periodic fiber box), where `Q(xi) = Σ_j signs[j]·xi_j²` is a
//! diagonal ±1 quadratic form.  The support invariant: on the outer
//! `support_margin` layers of every fiber axis, the perturbation
//! `P = values - Q` must vanish for primitive fields, and must at least be
//! constant along that axis for fields obtained by fiberwise difference or
//! sum (the difference of two primitives is exactly quadratic only where
//! *both* fiber blocks sit in their margins, so the strong form cannot
//! survive composition).  Constructors track a verified per-axis margin.
//!
//! [`relative_filtration`] builds the sublevel filtration of the pair
//! (field, deep sublevel): every cell whose value is at most `-c0` is moved
//! to the relative subcomplex, where
//!
//! ```text
//! c0 = 1 + max |P|  +  max { |Q(xi)| : xi in the inner (support) box }.
//! ```
//!
//! All critical values of a field with support inside the inner box lie
//! strictly above `-c0`, while on the escape directions (`Q` negative and
//! large) the field dives below `-c0`; the sublevel at `-c0` is therefore a
//! faithful stand-in for the "minus infinity" sublevel, which is what makes
//! the degree bookkeeping of the spectral invariants come out right.
//!
//! [`relative_filtration`]: GfqiField::relative_filtration

use crate::complex::FilteredComplex;
use crate::error::{Error, Result};
use crate::grid::{build_complex_with, Axis, CellClass, GridDomain, GridField};

/// A grid-sampled generating function, quadratic at infinity in the fiber.
#[derive(Clone, Debug)]
pub struct GfqiField {
    base: GridDomain,
    fiber: GridDomain,
    signs: Vec<i8>,
    /// Values on `base × fiber`, row-major with base axes first.
    values: Vec<f64>,
    /// Verified per-fiber-axis margin: on the outer `margins[j]` layers of
    /// fiber axis `j`, `P` does not depend on that coordinate.
    margins: Vec<usize>,
}

impl GfqiField {
    /// Checked primitive construction.  Requires `P = values - Q` to vanish
    /// exactly on the outer `support_margin` layers of every fiber axis
    /// (`support_margin ≥ 1` whenever there are fiber axes); the actual
    /// margin stored per axis is the widest that holds.
    pub fn new(
        base: GridDomain,
        fiber: GridDomain,
        signs: Vec<i8>,
        values: Vec<f64>,
        support_margin: usize,
    ) -> Result<Self> {
        validate_shape(&base, &fiber, &signs, &values)?;
        if fiber.dim() > 0 && support_margin == 0 {
            return Err(Error::Validation(
                "support_margin must be at least 1 when the fiber is nontrivial".into(),
            ));
        }
        let field = GfqiField {
            margins: vec![0; fiber.dim()],
            base,
            fiber,
            signs,
            values,
        };
        let margins = field.detect_exact_margins();
        for (j, &m) in margins.iter().enumerate() {
            if m < support_margin {
                return Err(Error::Validation(format!(
                    "support_margin violation: fiber axis {j} is exactly quadratic only on \
                     {m} outer layers, {support_margin} required"
                )));
            }
        }
        Ok(GfqiField { margins, ..field })
    }

    /// Internal constructor for composites: margins supplied by the caller,
    /// weak margin invariant (per-axis independence of `P`) spot-checked with
    /// a floating-point tolerance.
    fn from_parts(
        base: GridDomain,
        fiber: GridDomain,
        signs: Vec<i8>,
        values: Vec<f64>,
        margins: Vec<usize>,
    ) -> Result<Self> {
        validate_shape(&base, &fiber, &signs, &values)?;
        let field = GfqiField { base, fiber, signs, values, margins };
        field.check_weak_margins()?;
        Ok(field)
    }

    pub fn base(&self) -> &GridDomain {
        &self.base
    }

    pub fn fiber(&self) -> &GridDomain {
        &self.fiber
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    pub fn margins(&self) -> &[usize] {
        &self.margins
    }

    /// The combined base × fiber domain.
    pub fn domain(&self) -> GridDomain {
        self.base.product(&self.fiber)
    }

    /// The values as a field on the combined domain.
    pub fn as_grid_field(&self) -> GridField {
        GridField::new(self.domain(), self.values.clone()).expect("validated at construction")
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Index of the quadratic form: number of `-1` signs.
    pub fn q_index(&self) -> usize {
        self.signs.iter().filter(|&&s| s < 0).count()
    }

    /// `Q` at a fiber multi-index.
    pub fn q_at(&self, fiber_idx: &[usize]) -> f64 {
        let mut q = 0.0;
        for ((&i, axis), &s) in fiber_idx.iter().zip(self.fiber.axes()).zip(&self.signs) {
            let xi = axis.coordinate(i);
            q += f64::from(s) * xi * xi;
        }
        q
    }

    fn value_at_split(&self, base_idx: &[usize], fiber_idx: &[usize]) -> f64 {
        let mut idx = base_idx.to_vec();
        idx.extend_from_slice(fiber_idx);
        self.values[self.domain().flat_index(&idx)]
    }

    /// Widest exact margins: on the outer `m` layers of fiber axis `j`,
    /// `values == Q` bit-for-bit (primitive fields are built that way).
    fn detect_exact_margins(&self) -> Vec<usize> {
        let k = self.fiber.dim();
        let mut margins = vec![0usize; k];
        if k == 0 {
            return margins;
        }
        let fiber_vertices = self.fiber.vertices();
        let base_vertices = self.base.vertices();
        // exact_q[fiber flat] = is values == Q at every base point
        let mut exact = vec![true; fiber_vertices.len()];
        for (fi, fidx) in fiber_vertices.iter().enumerate() {
            let q = self.q_at(fidx);
            for bidx in &base_vertices {
                if self.value_at_split(bidx, fidx) != q {
                    exact[fi] = false;
                    break;
                }
            }
        }
        for (j, axis) in self.fiber.axes().iter().enumerate() {
            let cap = axis.len.div_ceil(2);
            let mut m = 0;
            'widen: while m < cap {
                for (fi, fidx) in fiber_vertices.iter().enumerate() {
                    let d = fidx[j].min(axis.len - 1 - fidx[j]);
                    if d <= m && !exact[fi] {
                        break 'widen;
                    }
                }
                m += 1;
            }
            margins[j] = m;
        }
        margins
    }

    /// Weak margin invariant for composites: within the outer `margins[j]`
    /// layers of fiber axis `j`, `P` must agree (to rounding) with its value
    /// at the same-side edge layer.
    fn check_weak_margins(&self) -> Result<()> {
        let scale = 1.0 + self.values.iter().fold(0.0f64, |a, &v| a.max(v.abs()));
        let tol = 1e-9 * scale;
        let base_vertices = self.base.vertices();
        for (j, axis) in self.fiber.axes().iter().enumerate() {
            let m = self.margins[j];
            if m == 0 {
                return Err(Error::Validation(format!(
                    "support_margin violation: fiber axis {j} has margin 0"
                )));
            }
            for fidx in self.fiber.vertices() {
                let side = if fidx[j] < m {
                    0
                } else if fidx[j] >= axis.len - m {
                    axis.len - 1
                } else {
                    continue;
                };
                let mut edge = fidx.clone();
                edge[j] = side;
                let q_here = self.q_at(&fidx);
                let q_edge = self.q_at(&edge);
                for bidx in &base_vertices {
                    let p_here = self.value_at_split(bidx, &fidx) - q_here;
                    let p_edge = self.value_at_split(bidx, &edge) - q_edge;
                    if (p_here - p_edge).abs() > tol {
                        return Err(Error::Validation(format!(
                            "support_margin violation on fiber axis {j}: perturbation varies \
                             by {} inside the declared margin",
                            (p_here - p_edge).abs()
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// `max |P|` over the whole grid.
    pub fn p_max(&self) -> f64 {
        let mut best: f64 = 0.0;
        for fidx in self.fiber.vertices() {
            let q = self.q_at(&fidx);
            for bidx in self.base.vertices() {
                best = best.max((self.value_at_split(&bidx, &fidx) - q).abs());
            }
        }
        best
    }

    /// `max |Q|` over the inner (non-margin) fiber box; 0 if that box is
    /// empty.
    pub fn q_inner_max(&self) -> f64 {
        let mut best: f64 = 0.0;
        for fidx in self.fiber.vertices() {
            let inner = fidx
                .iter()
                .zip(self.fiber.axes())
                .zip(&self.margins)
                .all(|((&i, a), &m)| i >= m && i < a.len - m);
            if inner {
                best = best.max(self.q_at(&fidx).abs());
            }
        }
        best
    }

    /// Depth threshold for the relative subcomplex.
    pub fn deep_threshold(&self) -> f64 {
        1.0 + self.p_max() + self.q_inner_max()
    }

    /// Sublevel filtration of the pair (field, deep sublevel): cells with
    /// lower-star value ≤ `-c0` form the relative subcomplex.  For an
    /// indefinite `Q` the deep sublevel must be nonempty (otherwise the fiber
    /// box is too shallow to contain the escape directions and the field is
    /// rejected).
    pub fn relative_filtration(&self) -> Result<FilteredComplex> {
        self.relative_filtration_at(self.deep_threshold())
    }

    /// Same, with an explicit threshold (used when two fields must share one
    /// deep sublevel level, e.g. for stability comparisons).
    pub fn relative_filtration_at(&self, c0: f64) -> Result<FilteredComplex> {
        if self.fiber.dim() > 0 {
            self.check_weak_margins()?;
        }
        let field = self.as_grid_field();
        let complex = build_complex_with(&field, |_, value| {
            if value <= -c0 {
                CellClass::Relative
            } else {
                CellClass::Normal
            }
        })?;
        if self.q_index() > 0 {
            let has_relative = complex.cells().iter().any(|c| c.relative);
            if !has_relative {
                return Err(Error::Validation(format!(
                    "fiber box too shallow: indefinite quadratic form but no value reaches \
                     the deep sublevel at {}",
                    -c0
                )));
            }
        }
        Ok(complex)
    }

    /// Tolerance for inequality checks involving this field:
    /// `4 · (max grid spacing) · (discrete Lipschitz estimate)`.
    pub fn tau(&self) -> f64 {
        let field = self.as_grid_field();
        4.0 * self.domain().max_spacing() * field.lipschitz()
    }

    /// The dual field: values and quadratic signs negated.
    pub fn dual(&self) -> GfqiField {
        GfqiField {
            base: self.base.clone(),
            fiber: self.fiber.clone(),
            signs: self.signs.iter().map(|&s| -s).collect(),
            values: self.values.iter().map(|&v| -v).collect(),
            margins: self.margins.clone(),
        }
    }

    /// Fix the leading `idx.len()` base axes at the given vertex indices,
    /// producing a field over the remaining base axes (same fiber).
    pub fn fix_leading_base(&self, idx: &[usize]) -> Result<GfqiField> {
        if idx.len() > self.base.dim() {
            return Err(Error::Argument("more fixed axes than base axes".into()));
        }
        for (k, &i) in idx.iter().enumerate() {
            if i >= self.base.axes()[k].len {
                return Err(Error::Argument(format!(
                    "slice index {i} out of range on base axis {k}"
                )));
            }
        }
        let rest_axes: Vec<Axis> = self.base.axes()[idx.len()..].to_vec();
        let rest_base = GridDomain::new(rest_axes)?;
        let domain = self.domain();
        let slice_domain = rest_base.product(&self.fiber);
        let mut values = Vec::with_capacity(slice_domain.n_vertices());
        for tail in slice_domain.vertices() {
            let mut full = idx.to_vec();
            full.extend_from_slice(&tail);
            values.push(self.values[domain.flat_index(&full)]);
        }
        GfqiField::from_parts(
            rest_base,
            self.fiber.clone(),
            self.signs.clone(),
            values,
            self.margins.clone(),
        )
    }
}

fn validate_shape(
    base: &GridDomain,
    fiber: &GridDomain,
    signs: &[i8],
    values: &[f64],
) -> Result<()> {
    if let Some(a) = base.axes().iter().find(|a| !a.periodic) {
        return Err(Error::Validation(format!(
            "base axes must be periodic, found non-periodic axis of length {}",
            a.len
        )));
    }
    if let Some(a) = fiber.axes().iter().find(|a| a.periodic) {
        return Err(Error::Validation(format!(
            "fiber axes must be non-periodic, found periodic axis of length {}",
            a.len
        )));
    }
    if signs.len() != fiber.dim() {
        return Err(Error::Validation(format!(
            "{} quadratic signs for {} fiber axes",
            signs.len(),
            fiber.dim()
        )));
    }
    if let Some(&s) = signs.iter().find(|&&s| s != 1 && s != -1) {
        return Err(Error::Validation(format!("quadratic sign {s} must be ±1")));
    }
    let expect = base.n_vertices() * fiber.n_vertices();
    if values.len() != expect {
        return Err(Error::Validation(format!(
            "value count {} does not match grid size {expect}",
            values.len()
        )));
    }
    if let Some(v) = values.iter().find(|v| !v.is_finite()) {
        return Err(Error::Validation(format!("non-finite value {v}")));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// constructions
// ---------------------------------------------------------------------------

/// Build a field from an arbitrary sampling function by clamping it to the
/// quadratic form near the fiber-box edge.
///
/// Inside the *inner box* (central half of every fiber axis) the field equals
/// `raw(x, xi)` up to rounding.  Outside, the perturbation `raw - Q` is
/// frozen at its value on the inner-box face (coordinatewise index
/// projection) and faded linearly to zero over the bridge, reaching zero on
/// the outer `support_margin` layers, so the result satisfies the exact
/// margin invariant by construction.  Functions whose growth already matches
/// `Q` near the edge pick up no spurious critical values from the fade-out.
pub fn clamp_to_quadratic(
    base: GridDomain,
    fiber: GridDomain,
    signs: Vec<i8>,
    support_margin: usize,
    raw: impl Fn(&[f64], &[f64]) -> f64,
) -> Result<GfqiField> {
    if fiber.dim() == 0 {
        let values: Vec<f64> = base.vertices().iter().map(|b| {
            let coords: Vec<f64> =
                b.iter().zip(base.axes()).map(|(&i, a)| a.coordinate(i)).collect();
            raw(&coords, &[])
        }).collect();
        return GfqiField::new(base, fiber, signs, values, 0);
    }
    let margin = support_margin.max(1);
    let inner_lo: Vec<usize> = fiber.axes().iter().map(|a| (a.len - 1) / 4).collect();
    for (j, (a, &lo)) in fiber.axes().iter().zip(&inner_lo).enumerate() {
        if lo <= margin {
            return Err(Error::Argument(format!(
                "fiber axis {j} too coarse to fit a margin of {margin} outside the inner box"
            )));
        }
        if a.len < 4 * margin {
            return Err(Error::Argument(format!("fiber axis {j} too short")));
        }
    }
    let probe = GfqiField {
        base: base.clone(),
        fiber: fiber.clone(),
        signs: signs.clone(),
        values: Vec::new(),
        margins: Vec::new(),
    };
    let mut values = Vec::with_capacity(base.n_vertices() * fiber.n_vertices());
    for bidx in base.vertices() {
        let x: Vec<f64> =
            bidx.iter().zip(base.axes()).map(|(&i, a)| a.coordinate(i)).collect();
        for fidx in fiber.vertices() {
            let mut weight = 1.0f64;
            let mut proj = Vec::with_capacity(fidx.len());
            for ((&i, a), &lo) in fidx.iter().zip(fiber.axes()).zip(&inner_lo) {
                let hi = a.len - 1 - lo;
                let d = i.min(a.len - 1 - i);
                let w = ((d as f64 - margin as f64) / (lo as f64 - margin as f64))
                    .clamp(0.0, 1.0);
                weight = weight.min(w);
                proj.push(i.clamp(lo, hi));
            }
            let q = probe.q_at(&fidx);
            if weight == 0.0 {
                values.push(q);
            } else {
                let proj_coords: Vec<f64> = proj
                    .iter()
                    .zip(fiber.axes())
                    .map(|(&i, a)| a.coordinate(i))
                    .collect();
                let p = raw(&x, &proj_coords) - probe.q_at(&proj);
                values.push(q + weight * p);
            }
        }
    }
    GfqiField::new(base, fiber, signs, values, margin)
}

/// The graph construction: a base function as a fiberless field.
pub fn graph_gf(f: &GridField) -> Result<GfqiField> {
    GfqiField::new(
        f.domain().clone(),
        GridDomain::point(),
        Vec::new(),
        f.values().to_vec(),
        0,
    )
}

/// Fiberwise difference `(S1 ⊖ S2)(x; xi1, xi2) = S1(x; xi1) - S2(x; xi2)`,
/// with the second block's quadratic signs negated.  Bases must agree.
pub fn gf_difference(s1: &GfqiField, s2: &GfqiField) -> Result<GfqiField> {
    combine(s1, s2, |a, b| a - b, true)
}

/// Fiberwise sum `(S1 ⊕ S2)(x; xi1, xi2) = S1(x; xi1) + S2(x; xi2)`.
pub fn fiberwise_sum(s1: &GfqiField, s2: &GfqiField) -> Result<GfqiField> {
    combine(s1, s2, |a, b| a + b, false)
}

fn combine(
    s1: &GfqiField,
    s2: &GfqiField,
    op: impl Fn(f64, f64) -> f64,
    negate_second: bool,
) -> Result<GfqiField> {
    if s1.base() != s2.base() {
        return Err(Error::Argument(
            "fiberwise combination requires identical base grids".into(),
        ));
    }
    let fiber = s1.fiber.product(&s2.fiber);
    let mut signs = s1.signs.clone();
    signs.extend(s2.signs.iter().map(|&s| if negate_second { -s } else { s }));
    let mut margins = s1.margins.clone();
    margins.extend_from_slice(&s2.margins);
    let mut values =
        Vec::with_capacity(s1.base.n_vertices() * s1.fiber.n_vertices() * s2.fiber.n_vertices());
    // row-major over base ++ fiber1 ++ fiber2
    for bidx in s1.base.vertices() {
        for f1 in s1.fiber.vertices() {
            let v1 = s1.value_at_split(&bidx, &f1);
            for f2 in s2.fiber.vertices() {
                let v2 = s2.value_at_split(&bidx, &f2);
                values.push(op(v1, v2));
            }
        }
    }
    if fiber.dim() == 0 {
        // both fiberless: result is primitive again
        return GfqiField::new(s1.base.clone(), fiber, signs, values, 0);
    }
    GfqiField::from_parts(s1.base.clone(), fiber, signs, values, margins)
}

/// Rotate a field over a one-axis circle base: `S_θ(x; xi) = S(x - θ; xi)`.
/// Off-grid shifts interpolate the base direction linearly.
pub fn shift_gf(s: &GfqiField, theta: f64) -> Result<GfqiField> {
    if s.base().dim() != 1 {
        return Err(Error::Argument(
            "shift_gf requires a one-dimensional circle base".into(),
        ));
    }
    let grid = s.as_grid_field();
    let axis = &s.base().axes()[0];
    let shift_idx = theta / axis.spacing;
    let mut values = Vec::with_capacity(s.values.len());
    for idx in s.domain().vertices() {
        let x = idx[0] as f64 - shift_idx;
        values.push(grid.interpolate_partial(&[x], &idx[1..]));
    }
    GfqiField::from_parts(
        s.base.clone(),
        s.fiber.clone(),
        s.signs.clone(),
        values,
        s.margins.clone(),
    )
}

/// A map between torus bases: integer winding matrix plus a periodic offset
/// sampled on the source grid, `f(x)_t = Σ_i winding[t][i]·x_i + offset_t(x)`.
#[derive(Clone, Debug)]
pub struct MapSpec {
    source: GridDomain,
    target: GridDomain,
    winding: Vec<Vec<i64>>,
    offsets: Vec<GridField>,
}

impl MapSpec {
    /// Checked construction; `offsets` may be empty for a purely linear map.
    pub fn new(
        source: GridDomain,
        target: GridDomain,
        winding: Vec<Vec<i64>>,
        offsets: Vec<GridField>,
    ) -> Result<Self> {
        if source.axes().iter().any(|a| !a.periodic) || target.axes().iter().any(|a| !a.periodic) {
            return Err(Error::Validation("map endpoints must be tori".into()));
        }
        if winding.len() != target.dim() {
            return Err(Error::Validation(format!(
                "winding has {} rows for a {}-dimensional target",
                winding.len(),
                target.dim()
            )));
        }
        if winding.iter().any(|row| row.len() != source.dim()) {
            return Err(Error::Validation("winding row rank mismatch".into()));
        }
        if !offsets.is_empty() {
            if offsets.len() != target.dim() {
                return Err(Error::Validation("one offset field per target axis".into()));
            }
            if offsets.iter().any(|o| o.domain() != &source) {
                return Err(Error::Validation("offset fields must live on the source".into()));
            }
        }
        Ok(MapSpec { source, target, winding, offsets })
    }

    pub fn source(&self) -> &GridDomain {
        &self.source
    }

    pub fn winding(&self) -> &[Vec<i64>] {
        &self.winding
    }

    /// Does the map have nonzero total winding (surjective on top homology)?
    /// For the square winding matrix this is `det ≠ 0`; only 1×1 and 2×2
    /// matrices occur here.
    pub fn winding_nonzero(&self) -> bool {
        match self.winding.len() {
            0 => true,
            1 => self.winding[0][0] != 0,
            2 => {
                self.winding[0][0] * self.winding[1][1]
                    - self.winding[0][1] * self.winding[1][0]
                    != 0
            }
            n => panic!("winding matrices of rank {n} are not supported"),
        }
    }

    /// Image of the source vertex `idx` in target *index units* per axis.
    fn image_index(&self, idx: &[usize]) -> Vec<f64> {
        (0..self.target.dim())
            .map(|t| {
                let mut y = 0.0;
                for (i, &w) in self.winding[t].iter().enumerate() {
                    let x = self.source.axes()[i].coordinate(idx[i]);
                    y += w as f64 * x;
                }
                if let Some(o) = self.offsets.get(t) {
                    y += o.value_at(idx);
                }
                y / self.target.axes()[t].spacing
            })
            .collect()
    }
}

/// Pull a field back along a base map: `S_f(x; xi) = S(f(x); xi)`, sampling
/// `S` multilinearly over its base grid.  The fiber is untouched.
pub fn pullback_gf(s: &GfqiField, map: &MapSpec) -> Result<GfqiField> {
    if &map.target != s.base() {
        return Err(Error::Argument(
            "pullback map target must match the field's base grid".into(),
        ));
    }
    let grid = s.as_grid_field();
    let new_domain = map.source.product(&s.fiber);
    let mut values = Vec::with_capacity(new_domain.n_vertices());
    for idx in new_domain.vertices() {
        let (src, fiber_idx) = idx.split_at(map.source.dim());
        let y = map.image_index(src);
        values.push(grid.interpolate_partial(&y, fiber_idx));
    }
    GfqiField::from_parts(
        map.source.clone(),
        s.fiber.clone(),
        s.signs.clone(),
        values,
        s.margins.clone(),
    )
}
