//! End-to-end acceptance suite: one test per documented guarantee.  Each test
//! prints a single `ACCEPTANCE <nn> <label>: PASS (...)` line (visible under
//! `--nocapture`) with the measured quantities and its elapsed wall time, and
//! fails loudly if a numeric bound or its time budget is violated.
//!
//! Heavy batches are shared between tests (the 200 reduction instances feed
//! both the direct and the inverse checks) and computed by a small seeded
//! worker pool; results are indexed by seed, so the outcome is independent of
//! thread count.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Mutex, OnceLock};
use std::time::Instant;

use gfspec::generator::{
    quartic_point_field, random_gfqi, random_simplicial, random_trig_field,
};
use gfspec::rank::assert_matches_barcode;
use gfspec::reduction::{DirectReductionReport, InverseReductionReport};
use gfspec::spectral::{stability_gap, verify_duality, verify_ks};
use gfspec::{
    check_direct_reduction, check_inverse_reduction, circle_shift_test, glued_upper_bound,
    graph_gf, ks_check, mutate_system, mv_bound, pullback_check, random_system, spectral_report,
    triangulation_cover, GridDomain, GridField, MapSpec, ProductGfqi, Region, SystemSize,
};

/// Assert the elapsed time against the budget and print the per-criterion
/// verdict line.
fn pass_line(n: usize, label: &str, started: Instant, budget_s: f64, details: &str) {
    let dt = started.elapsed().as_secs_f64();
    assert!(
        dt < budget_s,
        "criterion {n} overran its {budget_s} s budget ({dt:.1} s)"
    );
    println!("ACCEPTANCE {n:02} {label}: PASS ({details}; {dt:.2} s)");
}

/// Map `f` over `0..count` on a pool of workers, collecting results in index
/// order.
fn par_map<T, F>(count: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync,
{
    let workers = std::thread::available_parallelism()
        .map(|p| p.get())
        .unwrap_or(4)
        .min(count.max(1));
    let next = AtomicUsize::new(0);
    let slots: Vec<Mutex<Option<T>>> = (0..count).map(|_| Mutex::new(None)).collect();
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= count {
                    break;
                }
                let value = f(i);
                *slots[i].lock().unwrap() = Some(value);
            });
        }
    });
    slots
        .into_iter()
        .map(|m| m.into_inner().unwrap().expect("worker filled every slot"))
        .collect()
}

// ---------------------------------------------------------------------------
// Shared batch for the reduction criteria: 200 seeded product instances with
// a one-dimensional leading factor and a one-dimensional fiber.
// ---------------------------------------------------------------------------

struct ReductionTrial {
    direct: DirectReductionReport,
    inverse: InverseReductionReport,
}

static REDUCTION_TRIALS: OnceLock<Vec<ReductionTrial>> = OnceLock::new();

fn reduction_trials() -> &'static [ReductionTrial] {
    REDUCTION_TRIALS.get_or_init(|| {
        par_map(200, |i| {
            let seed = i as u64;
            let base = GridDomain::torus(&[6, 6]).unwrap();
            let sign = if i % 2 == 0 { 1 } else { -1 };
            let s1 = ProductGfqi::new(
                random_gfqi(&base, seed, sign, 13, 0.5).unwrap(),
                1,
            )
            .unwrap();
            let s2 = ProductGfqi::new(
                random_gfqi(&base, 1000 + seed, sign, 13, 0.5).unwrap(),
                1,
            )
            .unwrap();
            ReductionTrial {
                direct: check_direct_reduction(&s1, &s2).unwrap(),
                inverse: check_inverse_reduction(&s1, &s2).unwrap(),
            }
        })
    })
}

// ---------------------------------------------------------------------------

#[test]
fn criterion_01_quartic_well_flat_gamma_deep_beta() {
    let t0 = Instant::now();
    let field = quartic_point_field(513, 4.0).unwrap();
    let r = spectral_report(&field).unwrap();
    assert!(
        (-0.02..=0.02).contains(&r.gamma),
        "gamma {} outside [-0.02, 0.02]",
        r.gamma
    );
    assert!(
        (0.98..=1.02).contains(&r.beta),
        "beta {} outside [0.98, 1.02]",
        r.beta
    );
    let ks = verify_ks(&field).unwrap();
    assert!(
        !ks.holds,
        "the deep-well example must violate beta ≤ gamma (beta {}, gamma {})",
        ks.beta, ks.gamma
    );
    pass_line(
        1,
        "quartic-well",
        t0,
        1.0,
        &format!("gamma={:.4} beta={:.4} ks_holds=false", r.gamma, r.beta),
    );
}

#[test]
fn criterion_02_double_well_circle() {
    let t0 = Instant::now();
    let d = GridDomain::torus(&[256]).unwrap();
    let f = GridField::sample(d.clone(), |x| (1.0 + (2.0 * x[0]).cos()) / 2.0).unwrap();
    let r = spectral_report(&graph_gf(&f).unwrap()).unwrap();
    assert!((r.gamma - 1.0).abs() <= 0.02, "gamma {}", r.gamma);
    assert!((r.beta - 1.0).abs() <= 0.02, "beta {}", r.beta);

    // Breaking the well symmetry separates the critical values: the lower
    // peak and the shallower well strictly shrink the longest finite bar
    // while the extremes stretch the gap.
    let g = GridField::sample(d, |x| {
        (1.0 + (2.0 * x[0]).cos()) / 2.0 + 0.08 * x[0].sin() + 0.05 * x[0].cos()
    })
    .unwrap();
    let rp = spectral_report(&graph_gf(&g).unwrap()).unwrap();
    assert!(
        rp.beta < rp.gamma - 0.01,
        "perturbed well should have beta strictly below gamma ({} vs {})",
        rp.beta,
        rp.gamma
    );
    pass_line(
        2,
        "double-well-circle",
        t0,
        1.0,
        &format!(
            "gamma={:.4} beta={:.4}; perturbed beta={:.4} < gamma={:.4}",
            r.gamma, r.beta, rp.beta, rp.gamma
        ),
    );
}

#[test]
fn criterion_03_oscillation_identity() {
    let t0 = Instant::now();
    let one = GridDomain::torus(&[64]).unwrap();
    let two = GridDomain::torus(&[12, 12]).unwrap();
    for i in 0..100usize {
        let domain = if i < 50 { &one } else { &two };
        let degree = 1 + (i % 4) as u32;
        let amplitude = 0.5 + 0.4 * (i % 5) as f64;
        let f = random_trig_field(domain, 300 + i as u64, degree, amplitude).unwrap();
        let r = spectral_report(&graph_gf(&f).unwrap()).unwrap();
        let oscillation = f.max() - f.min();
        assert!(
            r.gamma == oscillation,
            "trial {i}: gamma {} != max - min {}",
            r.gamma,
            oscillation
        );
        assert!(r.c_plus == f.max() && r.c_minus == f.min(), "trial {i}");
    }
    pass_line(
        3,
        "oscillation-identity",
        t0,
        30.0,
        "100/100 fields: gamma equals the sampled oscillation bit-for-bit",
    );
}

#[test]
fn criterion_04_direct_reduction_inequalities() {
    let t0 = Instant::now();
    let trials = reduction_trials();
    let mut worst = f64::INFINITY;
    for (i, t) in trials.iter().enumerate() {
        let d = &t.direct;
        assert!(
            d.holds,
            "trial {i}: margins {} {} {} vs tolerance {}",
            d.margin_plus, d.margin_minus, d.margin_gamma, d.tolerance
        );
        worst = worst
            .min(d.margin_plus)
            .min(d.margin_minus)
            .min(d.margin_gamma);
    }
    pass_line(
        4,
        "direct-reduction",
        t0,
        300.0,
        &format!("200/200 instances, worst margin {worst:.3e}"),
    );
}

#[test]
fn criterion_05_inverse_reduction_inequalities() {
    let t0 = Instant::now();
    let trials = reduction_trials();
    let mut k_d_holds = 0usize;
    let mut worst_ratio = 0.0f64;
    for (i, t) in trials.iter().enumerate() {
        let r = &t.inverse;
        assert!(r.d == 1, "one-dimensional leading factor expected");
        assert!(r.holds_k_d_plus_1, "trial {i}: K = d+1 bound failed");
        if r.holds_k_d {
            k_d_holds += 1;
        }
        if r.ratio.is_finite() {
            worst_ratio = worst_ratio.max(r.ratio);
        }
    }
    pass_line(
        5,
        "inverse-reduction",
        t0,
        300.0,
        &format!(
            "200/200 instances at K=d+1; K=d held in {k_d_holds}/200; worst finite ratio {worst_ratio:.3}"
        ),
    );
}

#[test]
fn criterion_06_cover_bounds_and_glued_chains() {
    let t0 = Instant::now();
    // Part one: seeded arc pairs on a circle.
    let d1 = GridDomain::torus(&[48]).unwrap();
    for i in 0..100usize {
        let s = i as u64;
        let f = random_trig_field(&d1, 600 + s, 1 + (i % 4) as u32, 1.0 + 0.3 * (i % 3) as f64)
            .unwrap();
        let u = Region::arc(d1.clone(), (7 * i) % 48, 9 + (5 * i) % 30).unwrap();
        let v = Region::arc(d1.clone(), (11 * i + 17) % 48, 9 + (3 * i) % 30).unwrap();
        let r = mv_bound(&f, &u, &v).unwrap();
        assert!(r.holds_beta && r.holds_gamma, "arc trial {i}");
    }
    // Part two: glued chains over covers of the leading factor.
    let mut chains = 0usize;
    for i in 0..14usize {
        let base = GridDomain::torus(&[16, 8]).unwrap();
        let f = random_trig_field(&base, 900 + i as u64, 1 + (i % 3) as u32, 0.8).unwrap();
        let s = ProductGfqi::new(graph_gf(&f).unwrap(), 1).unwrap();
        let pieces = if i % 2 == 0 { 4 } else { 8 };
        let cover = triangulation_cover(&GridDomain::torus(&[16]).unwrap(), pieces).unwrap();
        cover.validate().unwrap();
        let r = glued_upper_bound(&s, &cover).unwrap();
        assert!(r.holds, "chain trial {i} (one leading axis)");
        chains += 1;
    }
    for i in 0..6usize {
        let base = GridDomain::torus(&[9, 9, 6]).unwrap();
        let f = random_trig_field(&base, 950 + i as u64, 1, 0.7).unwrap();
        let s = ProductGfqi::new(graph_gf(&f).unwrap(), 2).unwrap();
        let cover = triangulation_cover(&GridDomain::torus(&[9, 9]).unwrap(), 3).unwrap();
        cover.validate().unwrap();
        let r = glued_upper_bound(&s, &cover).unwrap();
        assert!(r.holds, "chain trial {i} (two leading axes)");
        chains += 1;
    }
    pass_line(
        6,
        "cover-gluing",
        t0,
        120.0,
        &format!("100/100 arc pairs, {chains}/20 glued chains"),
    );
}

#[test]
fn criterion_07_shift_sweep_lower_bound() {
    let t0 = Instant::now();
    let domain = GridDomain::torus(&[128]).unwrap();
    let reports = par_map(50, |i| {
        let f = random_trig_field(
            &domain,
            700 + i as u64,
            1 + (i % 4) as u32,
            0.6 + 0.2 * (i % 5) as f64,
        )
        .unwrap();
        circle_shift_test(&graph_gf(&f).unwrap()).unwrap()
    });
    for (i, r) in reports.iter().enumerate() {
        assert!(
            r.holds,
            "trial {i}: sup {} below gamma/3 {} - tol {}",
            r.sup_pair_gamma,
            r.gamma / 3.0,
            r.tolerance
        );
    }
    let min_ratio = reports
        .iter()
        .filter(|r| r.gamma > 0.0)
        .map(|r| r.ratio)
        .fold(f64::INFINITY, f64::min);
    // The pure cosine realizes the extreme case exactly.
    let f = GridField::sample(domain, |x| x[0].cos()).unwrap();
    let r = circle_shift_test(&graph_gf(&f).unwrap()).unwrap();
    assert!((r.ratio - 2.0).abs() < 1e-9, "cosine ratio {}", r.ratio);
    assert!((r.sup_pair_gamma - 4.0).abs() < 1e-9);
    pass_line(
        7,
        "shift-sweep",
        t0,
        120.0,
        &format!("50/50 sweeps hold, min ratio {min_ratio:.3}; cosine ratio 2"),
    );
}

#[test]
fn criterion_08_pullback_along_circle_maps() {
    let t0 = Instant::now();
    let d = GridDomain::torus(&[64]).unwrap();
    let double = MapSpec::new(d.clone(), d.clone(), vec![vec![2]], vec![]).unwrap();
    let constant = MapSpec::new(d.clone(), d.clone(), vec![vec![0]], vec![]).unwrap();
    for i in 0..20usize {
        let f = random_trig_field(&d, 800 + i as u64, 1 + (i % 4) as u32, 1.0).unwrap();
        let s = graph_gf(&f).unwrap();
        let r = pullback_check(&s, &double).unwrap();
        assert!(r.winding_nonzero);
        assert!(
            r.holds_equality,
            "trial {i}: {} vs {} (tol {})",
            r.gamma_source, r.gamma_pulled, r.tolerance
        );
        let rc = pullback_check(&s, &constant).unwrap();
        assert!(!rc.winding_nonzero);
        assert!(rc.gamma_pulled == 0.0, "constant pullback trial {i}");
        assert!(rc.holds_inequality);
    }
    pass_line(
        8,
        "pullback",
        t0,
        60.0,
        "20/20 degree-two equalities, 20/20 constant-map collapses",
    );
}

#[test]
fn criterion_09_exact_product_systems() {
    let t0 = Instant::now();
    let size_for = |i: usize| SystemSize {
        indices: 1 + i % 3,
        levels: 2 + i % 5,
        max_extra_bars: i % 4,
    };
    let checked: usize = par_map(500, |i| {
        let sys = random_system(i as u64, &size_for(i)).unwrap();
        sys.validate().unwrap_or_else(|e| panic!("system {i}: {e}"));
        let mut pairs = 0;
        for a in 0..sys.n_indices() {
            for b in 0..sys.n_indices() {
                let ks = ks_check(&sys, a, b).unwrap();
                assert!(ks.holds, "system {i} pair ({a},{b}): beta > gamma");
                assert!(
                    ks.distance_doubles_to_beta,
                    "system {i} pair ({a},{b}): 2*d_I != beta"
                );
                pairs += 1;
            }
        }
        pairs
    })
    .into_iter()
    .sum();
    let labels = par_map(100, |i| {
        let sys = random_system(i as u64, &size_for(i)).unwrap();
        let (bad, label) = mutate_system(&sys, i as u64).unwrap();
        assert!(
            bad.validate().is_err(),
            "system {i}: corruption '{label}' slipped through"
        );
        label
    });
    let distinct = {
        let mut l: Vec<_> = labels.clone();
        l.sort();
        l.dedup();
        l.len()
    };
    pass_line(
        9,
        "product-systems",
        t0,
        120.0,
        &format!(
            "500/500 systems valid and exact across {checked} index pairs; 100/100 corruptions rejected ({distinct} kinds)"
        ),
    );
}

#[test]
fn criterion_10_reduction_matches_rank_oracle() {
    let t0 = Instant::now();
    let menus: [&[f64]; 3] = [
        &[0.0, 0.5, 1.0, 1.5, 2.0],
        &[-1.0, 0.0, 0.25, 1.0],
        &[0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7],
    ];
    par_map(500, |i| {
        let nv = 8 + i % 40;
        let ne = 2 * nv;
        let nt = nv;
        let complex = random_simplicial(i as u64, nv, ne, nt, menus[i % 3]).unwrap();
        assert!(complex.len() <= 300, "trial {i} too large");
        assert_matches_barcode(&complex);
    });
    pass_line(
        10,
        "rank-oracle",
        t0,
        120.0,
        "500/500 complexes: bar-containment counts equal persistence ranks at every critical (s, t, degree)",
    );
}

#[test]
fn criterion_11_stability_and_duality() {
    let t0 = Instant::now();
    let circle = GridDomain::torus(&[32]).unwrap();
    let torus = GridDomain::torus(&[10, 10]).unwrap();
    for i in 0..60usize {
        let domain = if i < 30 { &circle } else { &torus };
        let f = random_trig_field(domain, 1100 + i as u64, 1 + (i % 4) as u32, 1.0).unwrap();
        let h = random_trig_field(domain, 2200 + i as u64, 2, 1.0).unwrap();
        let eps = 0.01 + 0.02 * (i % 5) as f64;
        let g = GridField::new(
            domain.clone(),
            f.values()
                .iter()
                .zip(h.values())
                .map(|(a, b)| a + eps * b)
                .collect(),
        )
        .unwrap();
        let s1 = graph_gf(&f).unwrap();
        let s2 = graph_gf(&g).unwrap();
        let st = stability_gap(&s1, &s2).unwrap();
        assert!(st.holds, "graph pair {i}: gaps {} {}", st.gap_plus, st.gap_minus);
        assert!(verify_duality(&s1).unwrap().holds, "graph duality {i}");
    }
    let base = GridDomain::torus(&[12]).unwrap();
    for i in 0..40usize {
        let sign = if i % 2 == 0 { 1 } else { -1 };
        let s1 = random_gfqi(&base, 3000 + i as u64, sign, 33, 0.6).unwrap();
        let s2 = random_gfqi(&base, 5000 + i as u64, sign, 33, 0.6).unwrap();
        let st = stability_gap(&s1, &s2).unwrap();
        assert!(st.holds, "fiber pair {i}: gaps {} {}", st.gap_plus, st.gap_minus);
        assert!(verify_duality(&s1).unwrap().holds, "fiber duality {i}");
    }
    pass_line(
        11,
        "stability-duality",
        t0,
        60.0,
        "100/100 pairs within the sup-norm bound; duality gaps at rounding scale",
    );
}
