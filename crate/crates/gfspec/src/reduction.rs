//! Reduction laboratory: slicing product-base fields, the direct and
//! inverse reduction inequalities, Mayer–Vietoris gluing over covers, the
//! pullback comparison, and the circle-shift sweep.
//!
//! All checkers return reports carrying every computed number plus the
//! applied tolerance, so callers can re-verify or aggregate worst cases.

use crate::error::{Error, Result};
use crate::gfqi::{gf_difference, pullback_gf, shift_gf, GfqiField, MapSpec};
use crate::grid::{cell_codes, code_dim, GridDomain, GridField, TAU};
use crate::region::{
    product_region_beta, product_region_c_minus, product_region_c_plus, region_beta,
    region_c_minus, region_c_plus, BoxSpec, Region,
};
use crate::spectral::{gamma_pair, spectral_report};

/// A field whose base splits as X × Y: the leading `split` axes form the
/// sliced factor X.
#[derive(Clone, Debug)]
pub struct ProductGfqi {
    field: GfqiField,
    split: usize,
}

impl ProductGfqi {
    pub fn new(field: GfqiField, split: usize) -> Result<Self> {
        if split == 0 || split > field.base().dim() {
            return Err(Error::Argument(format!(
                "split {split} invalid for a base of dimension {}",
                field.base().dim()
            )));
        }
        Ok(ProductGfqi { field, split })
    }

    pub fn field(&self) -> &GfqiField {
        &self.field
    }

    pub fn split_dim(&self) -> usize {
        self.split
    }

    /// The X-factor grid.
    pub fn x_grid(&self) -> GridDomain {
        GridDomain::new(self.field.base().axes()[..self.split].to_vec())
            .expect("axes already validated")
    }

    /// Freeze the X coordinates at a grid point.
    pub fn slice(&self, x: &[usize]) -> Result<GfqiField> {
        if x.len() != self.split {
            return Err(Error::Argument(format!(
                "slice point has {} coordinates, expected {}",
                x.len(),
                self.split
            )));
        }
        self.field.fix_leading_base(x)
    }
}

/// Numbers from one direct-reduction comparison.
#[derive(Clone, Debug)]
pub struct DirectReductionReport {
    pub sup_slice_c_plus: f64,
    pub inf_slice_c_minus: f64,
    pub sup_slice_gamma: f64,
    pub global_c_plus: f64,
    pub global_c_minus: f64,
    pub global_gamma: f64,
    /// `global_c_plus - sup_slice_c_plus` (must be ≥ -tolerance)
    pub margin_plus: f64,
    /// `inf_slice_c_minus - global_c_minus`
    pub margin_minus: f64,
    /// `global_gamma - sup_slice_gamma`
    pub margin_gamma: f64,
    pub tolerance: f64,
    pub holds: bool,
}

fn slice_extremes(d: &ProductGfqi) -> Result<(f64, f64, f64)> {
    let x_grid = d.x_grid();
    let mut sup_plus = f64::NEG_INFINITY;
    let mut inf_minus = f64::INFINITY;
    let mut sup_gamma = f64::NEG_INFINITY;
    for x in x_grid.vertices() {
        let r = spectral_report(&d.slice(&x)?)?;
        sup_plus = sup_plus.max(r.c_plus);
        inf_minus = inf_minus.min(r.c_minus);
        sup_gamma = sup_gamma.max(r.gamma);
    }
    Ok((sup_plus, inf_minus, sup_gamma))
}

/// Every slice invariant is dominated by the global one:
/// `sup_x c_plus(S_x) ≤ c_plus`, `c_minus ≤ inf_x c_minus(S_x)`,
/// `sup_x γ(S_x) ≤ γ` — all computed on the difference `S1 ⊖ S2`.
pub fn check_direct_reduction(
    s1: &ProductGfqi,
    s2: &ProductGfqi,
) -> Result<DirectReductionReport> {
    let d = difference_product(s1, s2)?;
    let global = spectral_report(&d.field)?;
    let (sup_plus, inf_minus, sup_gamma) = slice_extremes(&d)?;
    let tolerance = global.tolerance;
    let margin_plus = global.c_plus - sup_plus;
    let margin_minus = inf_minus - global.c_minus;
    let margin_gamma = global.gamma - sup_gamma;
    Ok(DirectReductionReport {
        sup_slice_c_plus: sup_plus,
        inf_slice_c_minus: inf_minus,
        sup_slice_gamma: sup_gamma,
        global_c_plus: global.c_plus,
        global_c_minus: global.c_minus,
        global_gamma: global.gamma,
        margin_plus,
        margin_minus,
        margin_gamma,
        tolerance,
        holds: margin_plus >= -tolerance
            && margin_minus >= -tolerance
            && margin_gamma >= -tolerance,
    })
}

fn difference_product(s1: &ProductGfqi, s2: &ProductGfqi) -> Result<ProductGfqi> {
    if s1.split != s2.split {
        return Err(Error::Argument("split dimensions differ".into()));
    }
    ProductGfqi::new(gf_difference(&s1.field, &s2.field)?, s1.split)
}

/// Numbers from one inverse-reduction comparison, for both candidate
/// constants.
#[derive(Clone, Debug)]
pub struct InverseReductionReport {
    pub sup_slice_c_plus: f64,
    pub inf_slice_c_minus: f64,
    pub sup_slice_gamma: f64,
    pub global_c_plus: f64,
    pub global_c_minus: f64,
    pub d: usize,
    /// Bound with constant K = d.
    pub holds_k_d: bool,
    /// Bound with constant K = d + 1.
    pub holds_k_d_plus_1: bool,
    /// Observed `(c_plus - sup_slice_c_plus) / sup_slice_gamma`, the
    /// empirical constant; 0 when the numerator is non-positive, infinite
    /// when the slice γ vanishes but the numerator does not.
    pub ratio: f64,
    pub tolerance: f64,
}

/// The global invariants exceed the slice ones by at most `K` slice-γ's:
/// `c_plus ≤ sup_x c_plus(S_x) + K·sup_x γ(S_x)` and
/// `c_minus ≥ inf_x c_minus(S_x) - K·sup_x γ(S_x)`, tested for K = d and
/// K = d + 1 where d is the sliced dimension.
pub fn check_inverse_reduction(
    s1: &ProductGfqi,
    s2: &ProductGfqi,
) -> Result<InverseReductionReport> {
    let dp = difference_product(s1, s2)?;
    let global = spectral_report(&dp.field)?;
    let (sup_plus, inf_minus, sup_gamma) = slice_extremes(&dp)?;
    let d = dp.split;
    let tolerance = global.tolerance;
    let holds_with = |k: f64| {
        global.c_plus <= sup_plus + k * sup_gamma + tolerance
            && global.c_minus >= inf_minus - k * sup_gamma - tolerance
    };
    let excess = global.c_plus - sup_plus;
    let ratio = if excess <= 0.0 {
        0.0
    } else if sup_gamma <= 0.0 {
        f64::INFINITY
    } else {
        excess / sup_gamma
    };
    Ok(InverseReductionReport {
        sup_slice_c_plus: sup_plus,
        inf_slice_c_minus: inf_minus,
        sup_slice_gamma: sup_gamma,
        global_c_plus: global.c_plus,
        global_c_minus: global.c_minus,
        d,
        holds_k_d: holds_with(d as f64),
        holds_k_d_plus_1: holds_with(d as f64 + 1.0),
        ratio,
        tolerance,
    })
}

/// Numbers from one Mayer–Vietoris comparison.
#[derive(Clone, Debug)]
pub struct MvReport {
    pub c_plus_u: f64,
    pub c_plus_v: f64,
    pub c_plus_union: f64,
    pub beta_u: f64,
    pub beta_v: f64,
    pub gamma_u: f64,
    pub gamma_v: f64,
    /// `max(c_plus_u, c_plus_v) + max(beta_u, beta_v)`
    pub bound_beta: f64,
    /// `max(c_plus_u, c_plus_v) + max(gamma_u, gamma_v)`
    pub bound_gamma: f64,
    pub tolerance: f64,
    pub holds_beta: bool,
    pub holds_gamma: bool,
}

fn field_tolerance(f: &GridField) -> f64 {
    4.0 * f.domain().max_spacing() * f.lipschitz()
}

/// The union's localized `c_plus` is bounded by the larger piece value plus
/// the larger boundary depth (and, more loosely, the larger γ).
pub fn mv_bound(f: &GridField, u: &Region, v: &Region) -> Result<MvReport> {
    let union = u.union(v)?;
    let c_plus_u = region_c_plus(f, u)?;
    let c_plus_v = region_c_plus(f, v)?;
    let c_plus_union = region_c_plus(f, &union)?;
    let beta_u = region_beta(f, u)?;
    let beta_v = region_beta(f, v)?;
    let gamma_u = c_plus_u - region_c_minus(f, u)?;
    let gamma_v = c_plus_v - region_c_minus(f, v)?;
    let tolerance = field_tolerance(f);
    finish_mv(
        c_plus_u, c_plus_v, c_plus_union, beta_u, beta_v, gamma_u, gamma_v, tolerance,
    )
}

/// Product-base version: regions live in the leading `split` axes.
pub fn mv_bound_product(
    s: &ProductGfqi,
    u: &Region,
    v: &Region,
) -> Result<MvReport> {
    let union = u.union(v)?;
    let split = s.split;
    let c_plus_u = product_region_c_plus(&s.field, split, u)?;
    let c_plus_v = product_region_c_plus(&s.field, split, v)?;
    let c_plus_union = product_region_c_plus(&s.field, split, &union)?;
    let beta_u = product_region_beta(&s.field, split, u)?;
    let beta_v = product_region_beta(&s.field, split, v)?;
    let gamma_u = c_plus_u - product_region_c_minus(&s.field, split, u)?;
    let gamma_v = c_plus_v - product_region_c_minus(&s.field, split, v)?;
    let tolerance = s.field.tau();
    finish_mv(
        c_plus_u, c_plus_v, c_plus_union, beta_u, beta_v, gamma_u, gamma_v, tolerance,
    )
}

#[allow(clippy::too_many_arguments)]
fn finish_mv(
    c_plus_u: f64,
    c_plus_v: f64,
    c_plus_union: f64,
    beta_u: f64,
    beta_v: f64,
    gamma_u: f64,
    gamma_v: f64,
    tolerance: f64,
) -> Result<MvReport> {
    let bound_beta = c_plus_u.max(c_plus_v) + beta_u.max(beta_v);
    let bound_gamma = c_plus_u.max(c_plus_v) + gamma_u.max(gamma_v);
    Ok(MvReport {
        c_plus_u,
        c_plus_v,
        c_plus_union,
        beta_u,
        beta_v,
        gamma_u,
        gamma_v,
        bound_beta,
        bound_gamma,
        tolerance,
        holds_beta: c_plus_union <= bound_beta + tolerance,
        holds_gamma: c_plus_union <= bound_gamma + tolerance,
    })
}

/// A cover of a torus grid by `dim + 1` families of pairwise vertex-disjoint
/// pieces; every top-dimensional cell lies in some piece.
#[derive(Clone, Debug)]
pub struct Cover {
    domain: GridDomain,
    /// families → pieces → boxes of the piece
    families: Vec<Vec<Vec<BoxSpec>>>,
}

impl Cover {
    pub fn domain(&self) -> &GridDomain {
        &self.domain
    }

    pub fn n_families(&self) -> usize {
        self.families.len()
    }

    /// All pieces of one family as a single (disconnected) region.
    pub fn family_region(&self, f: usize) -> Result<Region> {
        let boxes: Vec<BoxSpec> = self.families[f].iter().flatten().cloned().collect();
        Region::new(self.domain.clone(), boxes)
    }

    /// Union of families `0..=f`.
    pub fn partial_union(&self, f: usize) -> Result<Region> {
        let boxes: Vec<BoxSpec> = self.families[..=f]
            .iter()
            .flatten()
            .flatten()
            .cloned()
            .collect();
        Region::new(self.domain.clone(), boxes)
    }

    fn piece_vertices(&self, piece: &[BoxSpec]) -> std::collections::BTreeSet<Vec<usize>> {
        let mut out = std::collections::BTreeSet::new();
        for b in piece {
            let mut cursor: Vec<usize> = vec![0; b.len()];
            'boxes: loop {
                let v: Vec<usize> = cursor
                    .iter()
                    .zip(b)
                    .zip(self.domain.axes())
                    .map(|((&c, &(start, _)), axis)| (start + c) % axis.len)
                    .collect();
                out.insert(v);
                let mut k = b.len();
                loop {
                    if k == 0 {
                        break 'boxes;
                    }
                    k -= 1;
                    cursor[k] += 1;
                    if cursor[k] < b[k].1 {
                        break;
                    }
                    cursor[k] = 0;
                }
            }
        }
        out
    }

    /// Exhaustive certificate: coverage of every top cell, and pairwise
    /// vertex-disjointness of the pieces within each family.
    pub fn validate(&self) -> Result<()> {
        let top = self.domain.dim();
        let piece_regions: Vec<Vec<Region>> = self
            .families
            .iter()
            .map(|fam| {
                fam.iter()
                    .map(|p| Region::new(self.domain.clone(), p.clone()))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        for code in cell_codes(&self.domain) {
            if code_dim(&code) != top {
                continue;
            }
            let covered = piece_regions
                .iter()
                .flatten()
                .any(|p| p.contains_code(&code));
            if !covered {
                return Err(Error::InfeasibleCover(format!(
                    "cell {code:?} not covered by any piece"
                )));
            }
        }
        for (fi, fam) in self.families.iter().enumerate() {
            for (a, piece_a) in fam.iter().enumerate() {
                let va = self.piece_vertices(piece_a);
                for (b, piece_b) in fam.iter().enumerate().skip(a + 1) {
                    let vb = self.piece_vertices(piece_b);
                    if va.intersection(&vb).next().is_some() {
                        return Err(Error::InfeasibleCover(format!(
                            "family {fi}: pieces {a} and {b} share grid vertices"
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Build a cover of a torus by `dim + 1` families of disjoint pieces.
///
/// * Circles: `pieces_per_axis` closed arcs of equal length, assigned
///   alternately to two families; needs an even count of at least 4 so that
///   same-family arcs stay separated.
/// * Square 2-tori: `pieces_per_axis` diagonal staircase stripes (the
///   thickened diagonals of the standard triangulated square pattern); a
///   proper 3-coloring of the stripe cycle yields three families, feasible
///   for any count ≥ 3.
pub fn triangulation_cover(x: &GridDomain, pieces_per_axis: usize) -> Result<Cover> {
    if x.axes().iter().any(|a| !a.periodic) {
        return Err(Error::InfeasibleCover("cover construction needs a torus".into()));
    }
    let p = pieces_per_axis;
    match x.dim() {
        1 => {
            let n = x.axes()[0].len;
            if p < 4 || !p.is_multiple_of(2) {
                return Err(Error::InfeasibleCover(format!(
                    "{p} arcs cannot form two separated alternating families \
                     (needs an even count ≥ 4)"
                )));
            }
            if !n.is_multiple_of(p) || n / p < 2 {
                return Err(Error::InfeasibleCover(format!(
                    "{n} grid points do not divide into {p} arcs of length ≥ 2"
                )));
            }
            let s = n / p;
            let mut families: Vec<Vec<Vec<BoxSpec>>> = vec![Vec::new(), Vec::new()];
            for k in 0..p {
                // closed arc covering cells [k·s, (k+1)·s): s+1 vertices
                families[k % 2].push(vec![vec![(k * s, s + 1)]]);
            }
            Ok(Cover { domain: x.clone(), families })
        }
        2 => {
            let n = x.axes()[0].len;
            if x.axes()[1].len != n {
                return Err(Error::InfeasibleCover(
                    "diagonal stripe covers need a square torus".into(),
                ));
            }
            if p < 3 || !n.is_multiple_of(p) || n / p < 2 {
                return Err(Error::InfeasibleCover(format!(
                    "cannot cut a {n}×{n} torus into {p} stripes of width ≥ 2"
                )));
            }
            let colors = cycle_three_coloring(p);
            let s = n / p;
            let mut families: Vec<Vec<Vec<BoxSpec>>> = vec![Vec::new(); 3];
            for c in 0..p {
                // stripe c: cells with (x - y) mod n in [c·s, (c+1)·s);
                // one two-vertex-tall box per vertex row, shifted with y
                let mut boxes: Vec<BoxSpec> = Vec::new();
                for y in 0..n {
                    boxes.push(vec![((c * s + y) % n, s + 1), (y, 2)]);
                }
                families[colors[c]].push(boxes);
            }
            Ok(Cover { domain: x.clone(), families })
        }
        d => Err(Error::InfeasibleCover(format!(
            "covers are implemented for 1- and 2-dimensional tori, not {d}"
        ))),
    }
}

/// Proper 3-coloring of the cycle on `p ≥ 3` vertices.
fn cycle_three_coloring(p: usize) -> Vec<usize> {
    let mut colors: Vec<usize> = (0..p).map(|i| i % 2).collect();
    if p % 2 == 1 {
        colors[p - 1] = 2;
    }
    colors
}

/// One step of the gluing induction.
#[derive(Clone, Debug)]
pub struct GlueStep {
    pub family: usize,
    pub mv: MvReport,
}

/// Result of replaying the gluing induction over a cover.
#[derive(Clone, Debug)]
pub struct GlueReport {
    pub steps: Vec<GlueStep>,
    /// `max_j c_plus(U_j) + d · max β` — the chained bound.
    pub chained_bound: f64,
    pub direct_c_plus: f64,
    pub tolerance: f64,
    pub holds: bool,
}

/// Replay the induction `c_plus(U_0 ∪ … ∪ U_j)` over the cover families:
/// each step is a Mayer–Vietoris bound, and the chained estimate
/// `max_j c_plus(U_j) + d·max β` must dominate the direct global value.
pub fn glued_upper_bound(s: &ProductGfqi, cover: &Cover) -> Result<GlueReport> {
    if cover.domain().axes() != &s.field.base().axes()[..s.split] {
        return Err(Error::Argument("cover grid does not match the sliced factor".into()));
    }
    let split = s.split;
    let mut steps = Vec::new();
    let mut max_piece_c_plus = f64::NEG_INFINITY;
    let mut max_beta: f64 = 0.0;
    for f in 0..cover.n_families() {
        let fam = cover.family_region(f)?;
        max_piece_c_plus =
            max_piece_c_plus.max(product_region_c_plus(&s.field, split, &fam)?);
        max_beta = max_beta.max(product_region_beta(&s.field, split, &fam)?);
        if f > 0 {
            let prev = cover.partial_union(f - 1)?;
            let mv = mv_bound_product(s, &prev, &fam)?;
            max_beta = max_beta.max(mv.beta_u);
            steps.push(GlueStep { family: f, mv });
        }
    }
    let d = cover.n_families() - 1;
    let chained_bound = max_piece_c_plus + d as f64 * max_beta;
    let full = cover.partial_union(cover.n_families() - 1)?;
    let direct_c_plus = product_region_c_plus(&s.field, split, &full)?;
    let tolerance = s.field.tau();
    let steps_hold = steps.iter().all(|st| st.mv.holds_beta);
    Ok(GlueReport {
        steps,
        chained_bound,
        direct_c_plus,
        tolerance,
        holds: steps_hold && direct_c_plus <= chained_bound + (d as f64 + 1.0) * tolerance,
    })
}

/// Numbers from one pullback comparison.
#[derive(Clone, Debug)]
pub struct PullbackReport {
    pub gamma_source: f64,
    pub gamma_pulled: f64,
    pub winding_nonzero: bool,
    pub tolerance: f64,
    /// `γ(pullback) ≤ γ + tolerance` always.
    pub holds_inequality: bool,
    /// `|γ(pullback) - γ| ≤ tolerance`; only asserted for nonzero winding.
    pub holds_equality: bool,
}

/// γ never grows under pullback along a base map, and is preserved when the
/// map has nonzero winding.
pub fn pullback_check(s: &GfqiField, map: &MapSpec) -> Result<PullbackReport> {
    let pulled = pullback_gf(s, map)?;
    let gamma_source = spectral_report(s)?.gamma;
    let gamma_pulled = spectral_report(&pulled)?.gamma;
    let tolerance = s.tau().max(pulled.tau());
    let winding_nonzero = map.winding_nonzero();
    let gap = gamma_pulled - gamma_source;
    Ok(PullbackReport {
        gamma_source,
        gamma_pulled,
        winding_nonzero,
        tolerance,
        holds_inequality: gap <= tolerance,
        holds_equality: gap.abs() <= tolerance,
    })
}

/// Numbers from one shift sweep.
#[derive(Clone, Debug)]
pub struct ShiftReport {
    pub gamma: f64,
    pub sup_pair_gamma: f64,
    pub best_theta: f64,
    /// `sup_pair_gamma / gamma`; 0 when γ vanishes.
    pub ratio: f64,
    pub tolerance: f64,
    pub holds: bool,
}

/// Sweep rotations over the base grid: some rotation must move the field by
/// at least a third of its γ: `sup_θ γ(S, S_θ) ≥ γ(S)/3 - tolerance`.
pub fn circle_shift_test(s: &GfqiField) -> Result<ShiftReport> {
    if s.base().dim() != 1 {
        return Err(Error::Argument("shift sweep requires a circle base".into()));
    }
    let gamma = spectral_report(s)?.gamma;
    let n = s.base().axes()[0].len;
    let mut sup = f64::NEG_INFINITY;
    let mut best_theta = 0.0;
    for k in 0..n {
        let theta = k as f64 * TAU / n as f64;
        let shifted = shift_gf(s, theta)?;
        let g = gamma_pair(s, &shifted)?;
        if g > sup {
            sup = g;
            best_theta = theta;
        }
    }
    let tolerance = s.tau();
    Ok(ShiftReport {
        gamma,
        sup_pair_gamma: sup,
        best_theta,
        ratio: if gamma > 0.0 { sup / gamma } else { 0.0 },
        tolerance,
        holds: sup >= gamma / 3.0 - tolerance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generator::random_gfqi;
    use crate::gfqi::graph_gf;

    fn graph_product(nx: usize, ny: usize, f: impl Fn(&[f64]) -> f64) -> ProductGfqi {
        let d = GridDomain::torus(&[nx, ny]).unwrap();
        let g = GridField::sample(d, f).unwrap();
        ProductGfqi::new(graph_gf(&g).unwrap(), 1).unwrap()
    }

    #[test]
    fn slices_extract_rows() {
        let s = graph_product(8, 8, |x| x[0].cos() + 2.0 * x[1].sin());
        let sl = s.slice(&[3]).unwrap();
        assert_eq!(sl.base().dim(), 1);
        let expect: Vec<f64> = (0..8)
            .map(|j| {
                (3.0 * TAU / 8.0).cos() + 2.0 * (j as f64 * TAU / 8.0).sin()
            })
            .collect();
        for (a, b) in sl.values().iter().zip(&expect) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn direct_reduction_on_graph_fields_is_tight() {
        // f - g independent of the fiber: sup_x max_y (f-g) = max(f-g)
        let s1 = graph_product(8, 8, |x| x[0].cos() + x[1].sin());
        let s2 = graph_product(8, 8, |x| 0.5 * (x[0] + x[1]).cos());
        let r = check_direct_reduction(&s1, &s2).unwrap();
        assert!(r.holds);
        assert!(r.margin_plus.abs() < 1e-12, "graph case is an equality");
        assert!(r.margin_minus.abs() < 1e-12);
        // identical fields: everything 0
        let r0 = check_direct_reduction(&s1, &s1).unwrap();
        assert!(r0.global_gamma.abs() < 1e-12);
        assert!(r0.sup_slice_gamma.abs() < 1e-12);
    }

    #[test]
    fn inverse_reduction_on_graph_fields() {
        let s1 = graph_product(8, 8, |x| x[0].cos() * x[1].cos());
        let s2 = graph_product(8, 8, |x| 0.3 * (x[0] - x[1]).sin());
        let r = check_inverse_reduction(&s1, &s2).unwrap();
        assert!(r.holds_k_d_plus_1);
        assert!(r.ratio <= r.d as f64 + 1.0 + 1e-9);
    }

    #[test]
    fn reduction_checks_on_fibered_products() {
        let base = GridDomain::torus(&[6, 6]).unwrap();
        for seed in 0..3u64 {
            let s1 = ProductGfqi::new(random_gfqi(&base, seed, 1, 17, 0.5).unwrap(), 1).unwrap();
            let s2 =
                ProductGfqi::new(random_gfqi(&base, seed + 50, 1, 17, 0.5).unwrap(), 1).unwrap();
            let rd = check_direct_reduction(&s1, &s2).unwrap();
            assert!(rd.holds, "seed {seed}: margins {} {} {}", rd.margin_plus, rd.margin_minus, rd.margin_gamma);
            let ri = check_inverse_reduction(&s1, &s2).unwrap();
            assert!(ri.holds_k_d_plus_1, "seed {seed}");
        }
    }

    #[test]
    fn mv_bound_on_cosine_arcs() {
        let d = GridDomain::torus(&[64]).unwrap();
        let f = GridField::sample(d.clone(), |x| x[0].cos()).unwrap();
        let u = Region::arc(d.clone(), 48, 33).unwrap(); // around the max
        let v = Region::arc(d.clone(), 16, 33).unwrap(); // around the min
        let r = mv_bound(&f, &u, &v).unwrap();
        assert!(r.holds_beta);
        assert!(r.holds_gamma);
        assert_eq!(r.c_plus_union, 1.0, "union covers the circle");
        // u = v degenerate case
        let r2 = mv_bound(&f, &u, &u).unwrap();
        assert!(r2.holds_beta);
    }

    #[test]
    fn covers_validate_and_reject_degenerate_parameters() {
        let c1 = GridDomain::torus(&[16]).unwrap();
        let cover = triangulation_cover(&c1, 4).unwrap();
        cover.validate().unwrap();
        assert_eq!(cover.n_families(), 2);
        assert!(matches!(
            triangulation_cover(&c1, 2),
            Err(Error::InfeasibleCover(_))
        ));
        assert!(matches!(
            triangulation_cover(&c1, 5),
            Err(Error::InfeasibleCover(_))
        ));
        let t2 = GridDomain::torus(&[16, 16]).unwrap();
        let cover2 = triangulation_cover(&t2, 4).unwrap();
        cover2.validate().unwrap();
        assert_eq!(cover2.n_families(), 3);
        let cover3 = triangulation_cover(&t2, 8).unwrap();
        cover3.validate().unwrap();
    }

    #[test]
    fn glued_bound_on_product_fields() {
        // constant in x: every region sees the same y-profile
        let s = graph_product(16, 8, |x| x[1].cos());
        let cover = triangulation_cover(&GridDomain::torus(&[16]).unwrap(), 4).unwrap();
        let r = glued_upper_bound(&s, &cover).unwrap();
        assert!(r.holds);
        assert!((r.direct_c_plus - 1.0).abs() < 1e-12);
        // double-well in x
        let s2 = graph_product(16, 8, |x| (1.0 + (2.0 * x[0]).cos()) / 2.0 + 0.5 * x[1].sin());
        let r2 = glued_upper_bound(&s2, &cover).unwrap();
        assert!(r2.holds);
        assert!(r2.direct_c_plus <= r2.chained_bound + 1e-9);
    }

    #[test]
    fn pullback_degree_two_and_constant() {
        let d = GridDomain::torus(&[64]).unwrap();
        let f = GridField::sample(d.clone(), |x| x[0].cos()).unwrap();
        let s = graph_gf(&f).unwrap();
        let double = MapSpec::new(d.clone(), d.clone(), vec![vec![2]], vec![]).unwrap();
        let r = pullback_check(&s, &double).unwrap();
        assert!(r.winding_nonzero);
        assert!(r.holds_equality, "γ {} vs {}", r.gamma_source, r.gamma_pulled);
        let id = MapSpec::new(d.clone(), d.clone(), vec![vec![1]], vec![]).unwrap();
        let ri = pullback_check(&s, &id).unwrap();
        assert_eq!(ri.gamma_pulled, ri.gamma_source);
        let constant = MapSpec::new(d.clone(), d, vec![vec![0]], vec![]).unwrap();
        let rc = pullback_check(&s, &constant).unwrap();
        assert!(!rc.winding_nonzero);
        assert_eq!(rc.gamma_pulled, 0.0);
        assert!(rc.holds_inequality);
    }

    #[test]
    fn shift_sweep_on_cosine_achieves_ratio_two() {
        let d = GridDomain::torus(&[128]).unwrap();
        let f = GridField::sample(d, |x| x[0].cos()).unwrap();
        let s = graph_gf(&f).unwrap();
        let r = circle_shift_test(&s).unwrap();
        assert_eq!(r.gamma, 2.0);
        assert!((r.sup_pair_gamma - 4.0).abs() < 1e-9);
        assert!((r.ratio - 2.0).abs() < 1e-9);
        assert!((r.best_theta - TAU / 2.0).abs() < 1e-9);
        assert!(r.holds);
    }

    #[test]
    fn x_constant_field_shifts_trivially() {
        let d = GridDomain::torus(&[32]).unwrap();
        let f = GridField::sample(d, |_| 0.25).unwrap();
        let s = graph_gf(&f).unwrap();
        let r = circle_shift_test(&s).unwrap();
        assert_eq!(r.gamma, 0.0);
        assert!(r.holds);
    }
}
