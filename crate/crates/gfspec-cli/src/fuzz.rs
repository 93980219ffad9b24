//! Seeded random-trial batches for every check the tool exposes.
//!
//! Trials are independent, so the driver runs them on a worker pool sized by
//! the `GFSPEC_THREADS` environment variable (default: available
//! parallelism); results are assembled in trial order, so the report is
//! identical whatever the thread count.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use clap::Args;
use serde_json::json;

use gfspec::generator::{random_gfqi, random_simplicial, random_trig_field};
use gfspec::rank::rank_of;
use gfspec::reduce::reduce;
use gfspec::spectral::{spectral_report, stability_gap, verify_duality};
use gfspec::{
    check_direct_reduction, check_inverse_reduction, circle_shift_test, glued_upper_bound,
    graph_gf, ks_check, mutate_system, mv_bound, pullback_check, random_system,
    triangulation_cover, GridDomain, GridField, MapSpec, ProductGfqi, Region, SystemSize,
};

use crate::commands::Globals;
use crate::input::{InputError, InputResult};
use crate::report::Outcome;

pub const CHECKS: &[&str] = &[
    "oscillation",
    "direct-reduction",
    "inverse-reduction",
    "mv-arcs",
    "glue",
    "shift",
    "pullback",
    "algebra",
    "rank-oracle",
    "stability",
    "duality",
];

/// Run a batch of seeded random trials for one named check.
#[derive(Args, Debug)]
pub struct FuzzArgs {
    /// Which check to exercise (see `--check help` output for the list).
    #[arg(long)]
    pub check: String,
    /// Number of trials.
    #[arg(long, default_value_t = 20)]
    pub trials: usize,
}

struct Trial {
    pass: bool,
    details: serde_json::Value,
}

pub fn run(args: &FuzzArgs, g: &Globals) -> InputResult<(serde_json::Value, Outcome)> {
    let check = args.check.as_str();
    if !CHECKS.contains(&check) {
        return Err(InputError(format!(
            "unknown check '{check}': expected one of {}",
            CHECKS.join(", ")
        )));
    }
    if args.trials == 0 {
        return Err(InputError("at least one trial is required".into()));
    }
    let base_seed = g.seed.unwrap_or(0);
    let threads = thread_count(args.trials);
    let outcomes = pooled(args.trials, threads, |i| {
        run_trial(check, base_seed.wrapping_add(i as u64), i)
    });
    // The worker count is deliberately not echoed into the report: results are
    // indexed by trial, so the report content is identical for any pool size.
    let inputs = json!({
        "check": check,
        "trials": args.trials,
    });
    let mut out = Outcome::default();
    let mut passed = 0usize;
    let mut trials = Vec::with_capacity(outcomes.len());
    for (i, t) in outcomes.iter().enumerate() {
        if t.pass {
            passed += 1;
        } else {
            out.fail(format!("trial {i} failed: {}", t.details));
        }
        trials.push(json!({
            "trial": i,
            "seed": base_seed.wrapping_add(i as u64),
            "pass": t.pass,
            "details": t.details,
        }));
    }
    out.results = json!({
        "check": check,
        "passed": passed,
        "failed": outcomes.len() - passed,
    });
    out.trials = Some(trials);
    Ok((inputs, out))
}

fn thread_count(trials: usize) -> usize {
    let default = std::thread::available_parallelism()
        .map(|p| p.get())
        .unwrap_or(1);
    std::env::var("GFSPEC_THREADS")
        .ok()
        .and_then(|v| v.parse().ok())
        .filter(|&n: &usize| n >= 1)
        .unwrap_or(default)
        .min(trials)
}

fn pooled<T: Send>(count: usize, threads: usize, f: impl Fn(usize) -> T + Sync) -> Vec<T> {
    let next = AtomicUsize::new(0);
    let slots: Vec<Mutex<Option<T>>> = (0..count).map(|_| Mutex::new(None)).collect();
    std::thread::scope(|scope| {
        for _ in 0..threads {
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
        .map(|m| m.into_inner().unwrap().expect("pool filled every slot"))
        .collect()
}

fn run_trial(check: &str, seed: u64, index: usize) -> Trial {
    match check {
        "oscillation" => oscillation_trial(seed, index),
        "direct-reduction" => reduction_trial(seed, index, false),
        "inverse-reduction" => reduction_trial(seed, index, true),
        "mv-arcs" => mv_trial(seed, index),
        "glue" => glue_trial(seed, index),
        "shift" => shift_trial(seed, index),
        "pullback" => pullback_trial(seed, index),
        "algebra" => algebra_trial(seed, index),
        "rank-oracle" => rank_trial(seed, index),
        "stability" => stability_trial(seed, index),
        "duality" => duality_trial(seed, index),
        _ => unreachable!("checked against the menu"),
    }
}

fn oscillation_trial(seed: u64, index: usize) -> Trial {
    let domain = if index.is_multiple_of(2) {
        GridDomain::torus(&[32]).unwrap()
    } else {
        GridDomain::torus(&[8, 8]).unwrap()
    };
    let f = random_trig_field(&domain, seed, 1 + (index % 4) as u32, 1.0).unwrap();
    let r = spectral_report(&graph_gf(&f).unwrap()).unwrap();
    let oscillation = f.max() - f.min();
    Trial {
        pass: r.gamma == oscillation,
        details: json!({ "gamma": r.gamma, "oscillation": oscillation }),
    }
}

fn reduction_trial(seed: u64, index: usize, inverse: bool) -> Trial {
    let base = GridDomain::torus(&[4, 4]).unwrap();
    let sign = if index.is_multiple_of(2) { 1 } else { -1 };
    let s1 = ProductGfqi::new(random_gfqi(&base, seed, sign, 9, 0.4).unwrap(), 1).unwrap();
    let s2 =
        ProductGfqi::new(random_gfqi(&base, seed ^ 0x5bd1e995, sign, 9, 0.4).unwrap(), 1).unwrap();
    if inverse {
        let r = check_inverse_reduction(&s1, &s2).unwrap();
        Trial {
            pass: r.holds_k_d_plus_1,
            details: json!({
                "global_c_plus": r.global_c_plus,
                "sup_slice_c_plus": r.sup_slice_c_plus,
                "sup_slice_gamma": r.sup_slice_gamma,
            }),
        }
    } else {
        let r = check_direct_reduction(&s1, &s2).unwrap();
        Trial {
            pass: r.holds,
            details: json!({
                "margin_plus": r.margin_plus,
                "margin_minus": r.margin_minus,
                "margin_gamma": r.margin_gamma,
            }),
        }
    }
}

fn mv_trial(seed: u64, index: usize) -> Trial {
    let n = 32;
    let domain = GridDomain::torus(&[n]).unwrap();
    let f = random_trig_field(&domain, seed, 1 + (index % 3) as u32, 1.2).unwrap();
    let u = Region::arc(domain.clone(), (5 * index) % n, 7 + (3 * index) % 20).unwrap();
    let v = Region::arc(domain, (11 * index + 9) % n, 7 + (5 * index) % 20).unwrap();
    let r = mv_bound(&f, &u, &v).unwrap();
    Trial {
        pass: r.holds_beta && r.holds_gamma,
        details: json!({
            "c_plus_union": r.c_plus_union,
            "bound_beta": r.bound_beta,
            "bound_gamma": r.bound_gamma,
        }),
    }
}

fn glue_trial(seed: u64, index: usize) -> Trial {
    let base = GridDomain::torus(&[8, 8]).unwrap();
    let f = random_trig_field(&base, seed, 1 + (index % 3) as u32, 0.8).unwrap();
    let s = ProductGfqi::new(graph_gf(&f).unwrap(), 1).unwrap();
    let cover = triangulation_cover(&GridDomain::torus(&[8]).unwrap(), 4).unwrap();
    let r = glued_upper_bound(&s, &cover).unwrap();
    Trial {
        pass: r.holds,
        details: json!({
            "direct_c_plus": r.direct_c_plus,
            "chained_bound": r.chained_bound,
        }),
    }
}

fn shift_trial(seed: u64, index: usize) -> Trial {
    let domain = GridDomain::torus(&[64]).unwrap();
    let f = random_trig_field(&domain, seed, 1 + (index % 3) as u32, 1.0).unwrap();
    let r = circle_shift_test(&graph_gf(&f).unwrap()).unwrap();
    Trial {
        pass: r.holds,
        details: json!({
            "gamma": r.gamma,
            "sup_pair_gamma": r.sup_pair_gamma,
            "ratio": r.ratio,
        }),
    }
}

fn pullback_trial(seed: u64, index: usize) -> Trial {
    let domain = GridDomain::torus(&[32]).unwrap();
    let f = random_trig_field(&domain, seed, 1 + (index % 4) as u32, 1.0).unwrap();
    let s = graph_gf(&f).unwrap();
    let map = MapSpec::new(domain.clone(), domain, vec![vec![2]], vec![]).unwrap();
    let r = pullback_check(&s, &map).unwrap();
    Trial {
        pass: r.holds_inequality && r.holds_equality,
        details: json!({
            "gamma_source": r.gamma_source,
            "gamma_pulled": r.gamma_pulled,
        }),
    }
}

fn algebra_trial(seed: u64, index: usize) -> Trial {
    let size = SystemSize {
        indices: 1 + index % 3,
        levels: 2 + index % 5,
        max_extra_bars: index % 4,
    };
    let sys = random_system(seed, &size).unwrap();
    if index % 3 == 2 {
        // corrupted copies must be rejected
        let (bad, label) = mutate_system(&sys, seed).unwrap();
        let rejected = bad.validate().is_err();
        return Trial {
            pass: rejected,
            details: json!({ "kind": "mutated", "mutation": label, "rejected": rejected }),
        };
    }
    if let Err(e) = sys.validate() {
        return Trial {
            pass: false,
            details: json!({ "kind": "valid", "error": e.to_string() }),
        };
    }
    for i in 0..sys.n_indices() {
        for j in 0..sys.n_indices() {
            let r = ks_check(&sys, i, j).unwrap();
            if !r.holds || !r.distance_doubles_to_beta {
                return Trial {
                    pass: false,
                    details: json!({
                        "kind": "valid",
                        "pair": [i, j],
                        "beta": r.beta.to_string(),
                        "gamma": r.gamma.to_string(),
                    }),
                };
            }
        }
    }
    Trial {
        pass: true,
        details: json!({ "kind": "valid", "indices": sys.n_indices() }),
    }
}

fn rank_trial(seed: u64, index: usize) -> Trial {
    let levels = [0.0, 0.5, 1.0, 1.5];
    let nv = 8 + index % 10;
    let complex = random_simplicial(seed, nv, 2 * nv, nv / 2, &levels).unwrap();
    let barcode = reduce(&complex).unwrap();
    let values = complex.critical_values();
    for (i, &s) in values.iter().enumerate() {
        for &t in &values[i..] {
            for q in 0..=complex.max_dim() {
                let rank = rank_of(&complex, s, t, q).unwrap();
                let bars = barcode.n_bars_containing(s, t, q);
                if rank != bars {
                    return Trial {
                        pass: false,
                        details: json!({
                            "s": s, "t": t, "degree": q,
                            "rank": rank, "bars": bars,
                        }),
                    };
                }
            }
        }
    }
    Trial {
        pass: true,
        details: json!({ "cells": complex.len() }),
    }
}

fn stability_trial(seed: u64, index: usize) -> Trial {
    let domain = GridDomain::torus(&[16]).unwrap();
    let f = random_trig_field(&domain, seed, 1 + (index % 3) as u32, 1.0).unwrap();
    let h = random_trig_field(&domain, seed ^ 0xabcd, 2, 1.0).unwrap();
    let eps = 0.02 + 0.01 * (index % 4) as f64;
    let g = GridField::new(
        domain.clone(),
        f.values()
            .iter()
            .zip(h.values())
            .map(|(a, b)| a + eps * b)
            .collect(),
    )
    .unwrap();
    let r = stability_gap(&graph_gf(&f).unwrap(), &graph_gf(&g).unwrap()).unwrap();
    Trial {
        pass: r.holds,
        details: json!({
            "sup_distance": r.sup_distance,
            "gap_plus": r.gap_plus,
            "gap_minus": r.gap_minus,
        }),
    }
}

fn duality_trial(seed: u64, index: usize) -> Trial {
    let s = if index.is_multiple_of(2) {
        let domain = GridDomain::torus(&[16]).unwrap();
        let f = random_trig_field(&domain, seed, 2, 1.0).unwrap();
        graph_gf(&f).unwrap()
    } else {
        let base = GridDomain::torus(&[8]).unwrap();
        let sign = if index % 4 == 1 { 1 } else { -1 };
        random_gfqi(&base, seed, sign, 17, 0.5).unwrap()
    };
    let r = verify_duality(&s).unwrap();
    Trial {
        pass: r.holds,
        details: json!({
            "gap_plus": r.gap_plus,
            "gap_minus": r.gap_minus,
        }),
    }
}
