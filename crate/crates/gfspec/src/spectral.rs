//! Spectral invariants of a field: the filtration levels at which the unit
//! and fundamental classes appear, their difference γ, and the boundary
//! depth β, together with the inequality checkers built on them (duality,
//! sup-norm stability, the triangle inequality, and the β ≤ γ check with its
//! engineered counterexample).
//!
//! Degree bookkeeping: for a field with fiber quadratic index `ind` over a
//! `d`-torus base, the pair filtration has one infinite bar in degree `ind`
//! (unit class, birth = `c_minus`) and one in degree `ind + d` (fundamental
//! class, birth = `c_plus`).  Both one-dimensional extremes are validated;
//! a missing or duplicated extreme bar is an internal-invariant error.

use crate::barcode::Barcode;
use crate::error::{Error, Result};
use crate::gfqi::{fiberwise_sum, gf_difference, GfqiField};
use crate::grid::GridField;
use crate::reduce::reduce;

/// Invariants of one field, with the barcode they were read from.
#[derive(Clone, Debug)]
pub struct SpectralReport {
    pub c_minus: f64,
    pub c_plus: f64,
    pub gamma: f64,
    pub beta: f64,
    /// Quadratic index of the fiber form.
    pub degree_offset: usize,
    pub base_dim: usize,
    /// Inequality tolerance: 4 · spacing · Lipschitz estimate.
    pub tolerance: f64,
    pub barcode: Barcode,
}

/// Birth values of the extreme infinite bars: degree `ind` (unit class) and
/// degree `ind + d` (fundamental class).  Both must be unique.
fn extreme_births(barcode: &Barcode, ind: usize, d: usize) -> Result<(f64, f64)> {
    let unique = |degree: usize, what: &str| -> Result<f64> {
        let bars = barcode.infinite_in_degree(degree);
        match bars.len() {
            1 => Ok(bars[0].birth),
            n => Err(Error::InternalInvariant(format!(
                "{n} infinite bars in degree {degree}, expected the unique {what} class"
            ))),
        }
    };
    let c_minus = unique(ind, "unit")?;
    let c_plus = if d == 0 { c_minus } else { unique(ind + d, "fundamental")? };
    Ok((c_minus, c_plus))
}

/// Compute all invariants of a field.
pub fn spectral_report(s: &GfqiField) -> Result<SpectralReport> {
    let complex = s.relative_filtration()?;
    let barcode = reduce(&complex)?;
    let ind = s.q_index();
    let d = s.base().dim();
    let (c_minus, c_plus) = extreme_births(&barcode, ind, d)?;
    Ok(SpectralReport {
        c_minus,
        c_plus,
        gamma: c_plus - c_minus,
        beta: barcode.boundary_depth(),
        degree_offset: ind,
        base_dim: d,
        tolerance: s.tau(),
        barcode,
    })
}

pub fn c_minus(s: &GfqiField) -> Result<f64> {
    Ok(spectral_report(s)?.c_minus)
}

pub fn c_plus(s: &GfqiField) -> Result<f64> {
    Ok(spectral_report(s)?.c_plus)
}

pub fn gamma(s: &GfqiField) -> Result<f64> {
    Ok(spectral_report(s)?.gamma)
}

pub fn beta(s: &GfqiField) -> Result<f64> {
    Ok(spectral_report(s)?.beta)
}

/// Report for the difference field `S1 ⊖ S2`.
pub fn pair_report(s1: &GfqiField, s2: &GfqiField) -> Result<SpectralReport> {
    spectral_report(&gf_difference(s1, s2)?)
}

/// γ of the difference field — the distance-like invariant of the pair.
pub fn gamma_pair(s1: &GfqiField, s2: &GfqiField) -> Result<f64> {
    Ok(pair_report(s1, s2)?.gamma)
}

/// Outcome of the β ≤ γ check.
#[derive(Clone, Debug)]
pub struct KsReport {
    pub beta: f64,
    pub gamma: f64,
    /// Tolerance from the slope of the field *near the endpoints of the
    /// longest finite bar* — the global Lipschitz constant would drown the
    /// verdict in discretization slack precisely on the interesting
    /// (non-embedded) instances.
    pub tolerance: f64,
    pub holds: bool,
}

/// Largest slope of any grid edge whose value span comes within `delta` of
/// `level`.
fn slope_near(field: &GridField, level: f64, delta: f64) -> f64 {
    let domain = field.domain();
    let mut best: f64 = 0.0;
    for idx in domain.vertices() {
        let v = field.value_at(&idx);
        for (k, axis) in domain.axes().iter().enumerate() {
            let next = if idx[k] + 1 < axis.len {
                idx[k] + 1
            } else if axis.periodic {
                0
            } else {
                continue;
            };
            let mut jdx = idx.clone();
            jdx[k] = next;
            let w = field.value_at(&jdx);
            let (lo, hi) = (v.min(w), v.max(w));
            if lo - delta <= level && level <= hi + delta {
                best = best.max((w - v).abs() / axis.spacing);
            }
        }
    }
    best
}

/// Check β ≤ γ.  Reports `holds = false` when the longest finite bar beats
/// γ by more than the local-slope tolerance — notably on the double-well
/// field over a point, where β = 1 but γ = 0.
pub fn verify_ks(s: &GfqiField) -> Result<KsReport> {
    let report = spectral_report(s)?;
    let tolerance = if report.beta == 0.0 {
        0.0
    } else {
        let field = s.as_grid_field();
        let spacing = s.domain().max_spacing();
        let delta = 2.0 * spacing * field.lipschitz();
        let bar = report
            .barcode
            .bars()
            .iter()
            .filter(|b| !b.is_infinite())
            .max_by(|a, b| a.length().partial_cmp(&b.length()).unwrap())
            .expect("beta > 0 implies a finite bar");
        let slope = slope_near(&field, bar.birth, delta).max(slope_near(&field, bar.death, delta));
        4.0 * spacing * slope
    };
    Ok(KsReport {
        beta: report.beta,
        gamma: report.gamma,
        tolerance,
        holds: report.beta <= report.gamma + tolerance,
    })
}

/// Outcome of the duality check `c_plus(S) = -c_minus(dual S)`.
#[derive(Clone, Debug)]
pub struct DualityReport {
    pub c_plus: f64,
    pub c_minus: f64,
    pub dual_c_plus: f64,
    pub dual_c_minus: f64,
    /// `|c_plus + dual_c_minus|`
    pub gap_plus: f64,
    /// `|c_minus + dual_c_plus|`
    pub gap_minus: f64,
    pub tolerance: f64,
    pub holds: bool,
}

/// Reflect the field (negate values and quadratic signs) and compare the
/// invariants: `c_plus(S) = -c_minus(dual)` and `c_minus(S) = -c_plus(dual)`.
/// Exact for fiberless fields; within `2 · spacing · Lipschitz` otherwise.
pub fn verify_duality(s: &GfqiField) -> Result<DualityReport> {
    let a = spectral_report(s)?;
    let b = spectral_report(&s.dual())?;
    let tolerance = if s.fiber().dim() == 0 {
        0.0
    } else {
        2.0 * s.domain().max_spacing() * s.as_grid_field().lipschitz()
    };
    let gap_plus = (a.c_plus + b.c_minus).abs();
    let gap_minus = (a.c_minus + b.c_plus).abs();
    Ok(DualityReport {
        c_plus: a.c_plus,
        c_minus: a.c_minus,
        dual_c_plus: b.c_plus,
        dual_c_minus: b.c_minus,
        gap_plus,
        gap_minus,
        tolerance,
        holds: gap_plus <= tolerance && gap_minus <= tolerance,
    })
}

/// Outcome of the sup-norm stability check.
#[derive(Clone, Debug)]
pub struct StabilityReport {
    pub sup_distance: f64,
    pub gap_plus: f64,
    pub gap_minus: f64,
    pub holds: bool,
}

/// `|c_±(S1) - c_±(S2)| ≤ ‖S1 - S2‖_∞` for fields of identical shape.  Both
/// filtrations are cut at a common deep-sublevel threshold so the two
/// barcodes are comparable level by level.
pub fn stability_gap(s1: &GfqiField, s2: &GfqiField) -> Result<StabilityReport> {
    if s1.base() != s2.base() || s1.fiber() != s2.fiber() || s1.signs() != s2.signs() {
        return Err(Error::Argument(
            "stability comparison requires identical domains and quadratic signs".into(),
        ));
    }
    let c0 = s1.deep_threshold().max(s2.deep_threshold());
    let report = |s: &GfqiField| -> Result<(f64, f64)> {
        let barcode = reduce(&s.relative_filtration_at(c0)?)?;
        extreme_births(&barcode, s.q_index(), s.base().dim())
    };
    let (m1, p1) = report(s1)?;
    let (m2, p2) = report(s2)?;
    let sup_distance = s1
        .values()
        .iter()
        .zip(s2.values())
        .fold(0.0f64, |acc, (a, b)| acc.max((a - b).abs()));
    let gap_plus = (p1 - p2).abs();
    let gap_minus = (m1 - m2).abs();
    let slack = 1e-9 * (1.0 + sup_distance);
    Ok(StabilityReport {
        sup_distance,
        gap_plus,
        gap_minus,
        holds: gap_plus <= sup_distance + slack && gap_minus <= sup_distance + slack,
    })
}

/// Outcome of the triangle-inequality check on a fiberwise sum.
#[derive(Clone, Debug)]
pub struct TriangleReport {
    pub sum_c_minus: f64,
    pub sum_c_plus: f64,
    pub parts_c_minus: f64,
    pub parts_c_plus_mixed: f64,
    pub tolerance: f64,
    pub holds: bool,
}

/// `c_minus(S1 ⊕ S2) ≥ c_minus(S1) + c_minus(S2)` and
/// `c_plus(S1 ⊕ S2) ≥ c_plus(S1) + c_minus(S2)`.
pub fn triangle_check(s1: &GfqiField, s2: &GfqiField) -> Result<TriangleReport> {
    let sum = fiberwise_sum(s1, s2)?;
    let rs = spectral_report(&sum)?;
    let r1 = spectral_report(s1)?;
    let r2 = spectral_report(s2)?;
    let tolerance = rs.tolerance;
    let parts_c_minus = r1.c_minus + r2.c_minus;
    let parts_c_plus_mixed = r1.c_plus + r2.c_minus;
    Ok(TriangleReport {
        sum_c_minus: rs.c_minus,
        sum_c_plus: rs.c_plus,
        parts_c_minus,
        parts_c_plus_mixed,
        tolerance,
        holds: rs.c_minus >= parts_c_minus - tolerance
            && rs.c_plus >= parts_c_plus_mixed - tolerance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generator::{quartic_point_field, random_gfqi, random_trig_field};
    use crate::gfqi::graph_gf;
    use crate::grid::GridDomain;

    fn cos_graph(n: usize) -> GfqiField {
        let d = GridDomain::torus(&[n]).unwrap();
        graph_gf(&GridField::sample(d, |x| x[0].cos()).unwrap()).unwrap()
    }

    #[test]
    fn cosine_invariants_are_exact() {
        let r = spectral_report(&cos_graph(256)).unwrap();
        assert_eq!(r.c_minus, -1.0);
        assert_eq!(r.c_plus, 1.0);
        assert_eq!(r.gamma, 2.0);
        assert_eq!(r.beta, 0.0);
        assert_eq!(r.degree_offset, 0);
    }

    #[test]
    fn double_well_circle_field() {
        // (1 + cos 2x)/2: two maxima at 1, two minima at 0 → γ = 1 and one
        // finite bar of length exactly 1
        let d = GridDomain::torus(&[256]).unwrap();
        let f = GridField::sample(d.clone(), |x| (1.0 + (2.0 * x[0]).cos()) / 2.0).unwrap();
        let r = spectral_report(&graph_gf(&f).unwrap()).unwrap();
        assert_eq!(r.gamma, 1.0);
        assert_eq!(r.beta, 1.0);
        // perturbed so all four critical values are distinct: β < γ strictly
        let g = GridField::sample(d, |x| (1.0 + (2.0 * x[0]).cos()) / 2.0 + 0.1 * x[0].sin())
            .unwrap();
        let rp = spectral_report(&graph_gf(&g).unwrap()).unwrap();
        assert!(rp.beta < rp.gamma, "beta {} gamma {}", rp.beta, rp.gamma);
    }

    #[test]
    fn quartic_gamma_zero_beta_one_ks_fails() {
        let s = quartic_point_field(513, 4.0).unwrap();
        let r = spectral_report(&s).unwrap();
        assert_eq!(r.c_minus, -1.0);
        assert_eq!(r.c_plus, -1.0);
        assert_eq!(r.gamma, 0.0);
        assert_eq!(r.beta, 1.0);
        let ks = verify_ks(&s).unwrap();
        assert_eq!(ks.beta, 1.0);
        assert_eq!(ks.gamma, 0.0);
        assert!(ks.tolerance < 0.9, "local tolerance {}", ks.tolerance);
        assert!(!ks.holds);
    }

    #[test]
    fn self_difference_is_null() {
        let base = GridDomain::torus(&[12]).unwrap();
        let s = random_gfqi(&base, 3, 1, 33, 0.5).unwrap();
        let d = gf_difference(&s, &s).unwrap();
        let r = spectral_report(&d).unwrap();
        let tau = r.tolerance;
        assert!(r.gamma.abs() <= tau, "gamma {} tau {tau}", r.gamma);
        let ks = verify_ks(&d).unwrap();
        assert!(ks.holds);
    }

    #[test]
    fn duality_exact_for_graphs_and_close_for_fibers() {
        let g = cos_graph(64);
        let r = verify_duality(&g).unwrap();
        assert_eq!(r.gap_plus, 0.0);
        assert_eq!(r.gap_minus, 0.0);
        assert!(r.holds);
        let base = GridDomain::torus(&[16]).unwrap();
        for seed in 0..5u64 {
            let s = random_gfqi(&base, seed, -1, 65, 0.7).unwrap();
            let r = verify_duality(&s).unwrap();
            assert!(r.holds, "seed {seed}: gaps {} {}", r.gap_plus, r.gap_minus);
        }
    }

    #[test]
    fn constant_shift_moves_extremes_only() {
        let base = GridDomain::torus(&[16]).unwrap();
        let s = random_gfqi(&base, 11, 1, 33, 0.6).unwrap();
        let shifted = crate::gfqi::GfqiField::new(
            s.base().clone(),
            s.fiber().clone(),
            s.signs().to_vec(),
            s.values().iter().map(|v| v + 0.375).collect(),
            1,
        );
        // a constant breaks the exact margin; rebuild through stability path
        // instead: compare reports at matched thresholds
        assert!(shifted.is_err());
        // graph fields shift cleanly
        let g = cos_graph(64);
        let d = GridDomain::torus(&[64]).unwrap();
        let gs = graph_gf(&GridField::sample(d, |x| x[0].cos() + 0.375).unwrap()).unwrap();
        let r0 = spectral_report(&g).unwrap();
        let r1 = spectral_report(&gs).unwrap();
        assert_eq!(r1.c_minus, r0.c_minus + 0.375);
        assert_eq!(r1.c_plus, r0.c_plus + 0.375);
        assert_eq!(r1.gamma, r0.gamma);
        assert_eq!(r1.beta, r0.beta);
    }

    #[test]
    fn monotone_fields_have_monotone_invariants() {
        let d = GridDomain::torus(&[48]).unwrap();
        let f = random_trig_field(&d, 5, 3, 1.0).unwrap();
        let g = GridField::new(
            d.clone(),
            f.values().iter().map(|v| v + 0.2 + 0.1 * v.abs()).collect(),
        )
        .unwrap();
        let rf = spectral_report(&graph_gf(&f).unwrap()).unwrap();
        let rg = spectral_report(&graph_gf(&g).unwrap()).unwrap();
        assert!(rf.c_minus <= rg.c_minus);
        assert!(rf.c_plus <= rg.c_plus);
    }

    #[test]
    fn gamma_pair_is_symmetric() {
        let base = GridDomain::torus(&[12]).unwrap();
        let s1 = random_gfqi(&base, 21, 1, 17, 0.4).unwrap();
        let s2 = random_gfqi(&base, 22, 1, 17, 0.4).unwrap();
        let a = gamma_pair(&s1, &s2).unwrap();
        let b = gamma_pair(&s2, &s1).unwrap();
        assert!((a - b).abs() < 1e-9, "{a} vs {b}");
    }

    #[test]
    fn stability_under_constant_and_small_perturbations() {
        let d = GridDomain::torus(&[32]).unwrap();
        let f = random_trig_field(&d, 9, 3, 1.0).unwrap();
        let g1 = graph_gf(&f).unwrap();
        let g2 = graph_gf(
            &GridField::new(d.clone(), f.values().iter().map(|v| v + 0.25).collect()).unwrap(),
        )
        .unwrap();
        let r = stability_gap(&g1, &g2).unwrap();
        assert!((r.sup_distance - 0.25).abs() < 1e-12);
        assert!((r.gap_plus - 0.25).abs() < 1e-12);
        assert!(r.holds);
        // random small perturbation
        let eps = 0.05;
        let p = random_trig_field(&d, 10, 3, eps).unwrap();
        let g3 = graph_gf(
            &GridField::new(
                d,
                f.values().iter().zip(p.values()).map(|(a, b)| a + b).collect(),
            )
            .unwrap(),
        )
        .unwrap();
        let r = stability_gap(&g1, &g3).unwrap();
        assert!(r.holds, "gaps {} {} vs sup {}", r.gap_plus, r.gap_minus, r.sup_distance);
    }

    #[test]
    fn triangle_inequality_on_graphs() {
        let d = GridDomain::torus(&[32]).unwrap();
        for seed in 0..10u64 {
            let f = random_trig_field(&d, seed, 3, 1.0).unwrap();
            let g = random_trig_field(&d, seed + 100, 3, 1.0).unwrap();
            let r =
                triangle_check(&graph_gf(&f).unwrap(), &graph_gf(&g).unwrap()).unwrap();
            assert!(r.holds, "seed {seed}");
            // graph case is exact: min(f+g) ≥ min f + min g with no slack
            assert!(r.sum_c_minus >= r.parts_c_minus - 1e-12);
        }
    }
}
