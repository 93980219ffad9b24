//! Drivers for the individual subcommands: parse inputs, run the library
//! checks, assemble an [`Outcome`] with results, failures, and CSV side
//! files.

use std::path::PathBuf;

use clap::Args;
use serde_json::json;

use gfspec::grid::TAU;
use gfspec::spectral::{gamma_pair, spectral_report, verify_ks};
use gfspec::{
    check_direct_reduction, check_inverse_reduction, circle_shift_test, from_json,
    glued_upper_bound, ks_check, mv_bound, pullback_check, shift_gf, triangulation_cover,
    GfqiField, MapSpec, ProductGfqi, Region,
};

use crate::expr;
use crate::input::{
    build_field, grid_summary, parse_arc, parse_base, parse_fiber, parse_winding, FiberSpec,
    InputError, InputResult,
};
use crate::report::{json_f64, write_barcode_csv, write_columns_csv, Outcome};

/// Flags shared by every subcommand.
pub struct Globals {
    pub seed: Option<u64>,
    pub strict: bool,
    pub out_dir: PathBuf,
}

/// A single field given by a base grid, an optional fiber box, and an
/// expression.
#[derive(Args, Debug)]
pub struct FieldArgs {
    /// Base grid: `point`, `s1[:<n>]`, or `t2[:<n>x<m>]`.
    #[arg(long, default_value = "s1:128")]
    pub base: String,
    /// Fiber box: `<k>[:<samples>[:<halfwidth>]]`.
    #[arg(long)]
    pub fiber: Option<String>,
    /// Quadratic signs, one per fiber variable, e.g. `+1,-1`.
    #[arg(long)]
    pub signs: Option<String>,
    /// Field expression over `x1..xd` and `xi1..xik`.
    #[arg(long)]
    pub expr: String,
}

struct BuiltField {
    field: GfqiField,
    inputs: serde_json::Value,
}

fn build(args: &FieldArgs) -> InputResult<BuiltField> {
    let base = parse_base(&args.base)?;
    let fiber: Option<FiberSpec> = args.fiber.as_deref().map(parse_fiber).transpose()?;
    let expr = expr::parse(
        &args.expr,
        base.dim(),
        fiber.map(|f| f.k).unwrap_or(0),
    )
    .map_err(|e| InputError(e.to_string()))?;
    let field = build_field(&base, fiber, args.signs.as_deref(), &expr)?;
    let inputs = json!({
        "base": args.base,
        "fiber": args.fiber,
        "signs": args.signs,
        "expr": args.expr,
        "expr_canonical": expr.pretty(),
    });
    Ok(BuiltField { field, inputs })
}

pub fn spectral(args: &FieldArgs, g: &Globals) -> InputResult<(serde_json::Value, Outcome)> {
    let built = build(args)?;
    let r = spectral_report(&built.field)?;
    let mut out = Outcome {
        grid: grid_summary(&built.field),
        tolerance: Some(if g.strict { 0.0 } else { r.tolerance }),
        ..Outcome::default()
    };
    out.results = json!({
        "c_plus": r.c_plus,
        "c_minus": r.c_minus,
        "gamma": r.gamma,
        "beta": r.beta,
        "degree_offset": r.degree_offset,
        "base_dim": r.base_dim,
        "bars": r.barcode.bars().len(),
    });
    Ok((built.inputs, out))
}

pub fn barcode(args: &FieldArgs, g: &Globals) -> InputResult<(serde_json::Value, Outcome)> {
    let built = build(args)?;
    let r = spectral_report(&built.field)?;
    let mut out = Outcome {
        grid: grid_summary(&built.field),
        tolerance: Some(if g.strict { 0.0 } else { r.tolerance }),
        ..Outcome::default()
    };
    let path = write_barcode_csv(&g.out_dir, "barcode.csv", &r.barcode)?;
    let finite = r.barcode.bars().iter().filter(|b| b.death.is_finite()).count();
    out.results = json!({
        "bars": r.barcode.bars().len(),
        "finite_bars": finite,
        "infinite_bars": r.barcode.bars().len() - finite,
        "c_plus": r.c_plus,
        "c_minus": r.c_minus,
        "gamma": r.gamma,
        "beta": r.beta,
    });
    out.csv_files.push(path);
    Ok((built.inputs, out))
}

pub fn ks(args: &FieldArgs, g: &Globals) -> InputResult<(serde_json::Value, Outcome)> {
    let built = build(args)?;
    let r = verify_ks(&built.field)?;
    let holds = if g.strict { r.beta <= r.gamma } else { r.holds };
    let mut out = Outcome {
        grid: grid_summary(&built.field),
        tolerance: Some(if g.strict { 0.0 } else { r.tolerance }),
        ..Outcome::default()
    };
    out.results = json!({
        "beta": r.beta,
        "gamma": r.gamma,
        "holds": holds,
    });
    out.check(
        holds,
        format!(
            "boundary depth exceeds the invariant gap: beta {} > gamma {} (tolerance {})",
            r.beta,
            r.gamma,
            if g.strict { 0.0 } else { r.tolerance }
        ),
    );
    Ok((built.inputs, out))
}

/// Two fields on a shared product base for the reduction comparisons.
#[derive(Args, Debug)]
pub struct ReduceArgs {
    /// Product base grid, e.g. `t2:6x6`; the leading `--split` axes are
    /// sliced.
    #[arg(long, default_value = "t2:6x6")]
    pub base: String,
    /// Number of leading axes to slice over.
    #[arg(long, default_value_t = 1)]
    pub split: usize,
    /// First field expression.
    #[arg(long)]
    pub expr1: String,
    /// Second field expression (difference partner).
    #[arg(long, default_value = "0")]
    pub expr2: String,
    /// Fiber box shared by both fields.
    #[arg(long)]
    pub fiber: Option<String>,
    /// Quadratic signs shared by both fields.
    #[arg(long)]
    pub signs: Option<String>,
}

struct ReducePair {
    s1: ProductGfqi,
    s2: ProductGfqi,
    inputs: serde_json::Value,
}

fn build_pair(args: &ReduceArgs) -> InputResult<ReducePair> {
    let base = parse_base(&args.base)?;
    let fiber: Option<FiberSpec> = args.fiber.as_deref().map(parse_fiber).transpose()?;
    let k = fiber.map(|f| f.k).unwrap_or(0);
    let e1 = expr::parse(&args.expr1, base.dim(), k).map_err(|e| InputError(e.to_string()))?;
    let e2 = expr::parse(&args.expr2, base.dim(), k).map_err(|e| InputError(e.to_string()))?;
    let f1 = build_field(&base, fiber, args.signs.as_deref(), &e1)?;
    let f2 = build_field(&base, fiber, args.signs.as_deref(), &e2)?;
    let s1 = ProductGfqi::new(f1, args.split)?;
    let s2 = ProductGfqi::new(f2, args.split)?;
    let inputs = json!({
        "base": args.base,
        "split": args.split,
        "expr1": args.expr1,
        "expr2": args.expr2,
        "fiber": args.fiber,
        "signs": args.signs,
        "expr1_canonical": e1.pretty(),
        "expr2_canonical": e2.pretty(),
    });
    Ok(ReducePair { s1, s2, inputs })
}

/// Per-slice invariants of the difference field, as CSV rows
/// `x1, .., xd, c_plus, c_minus, gamma`.
fn slice_profile(pair: &ReducePair) -> InputResult<(Vec<String>, Vec<Vec<f64>>)> {
    let diff = gfspec::gf_difference(pair.s1.field(), pair.s2.field())?;
    let dp = ProductGfqi::new(diff, pair.s1.split_dim())?;
    let mut header: Vec<String> = (1..=dp.split_dim()).map(|i| format!("x{i}")).collect();
    header.extend(["c_plus", "c_minus", "gamma"].map(String::from));
    let mut rows = Vec::new();
    for x in dp.x_grid().vertices() {
        let slice = dp.slice(&x)?;
        let r = spectral_report(&slice)?;
        let mut row: Vec<f64> = x.iter().map(|&i| i as f64).collect();
        row.extend([r.c_plus, r.c_minus, r.gamma]);
        rows.push(row);
    }
    Ok((header, rows))
}

pub fn reduce_direct(args: &ReduceArgs, g: &Globals) -> InputResult<(serde_json::Value, Outcome)> {
    let pair = build_pair(args)?;
    let r = check_direct_reduction(&pair.s1, &pair.s2)?;
    let holds = if g.strict {
        r.margin_plus >= 0.0 && r.margin_minus >= 0.0 && r.margin_gamma >= 0.0
    } else {
        r.holds
    };
    let mut out = Outcome {
        grid: grid_summary(pair.s1.field()),
        tolerance: Some(if g.strict { 0.0 } else { r.tolerance }),
        ..Outcome::default()
    };
    out.results = json!({
        "global_c_plus": r.global_c_plus,
        "global_c_minus": r.global_c_minus,
        "global_gamma": r.global_gamma,
        "sup_slice_c_plus": r.sup_slice_c_plus,
        "inf_slice_c_minus": r.inf_slice_c_minus,
        "sup_slice_gamma": r.sup_slice_gamma,
        "margin_plus": r.margin_plus,
        "margin_minus": r.margin_minus,
        "margin_gamma": r.margin_gamma,
        "holds": holds,
    });
    let (header, rows) = slice_profile(&pair)?;
    let cols: Vec<&str> = header.iter().map(String::as_str).collect();
    out.csv_files
        .push(write_columns_csv(&g.out_dir, "slice_profile.csv", &cols, &rows)?);
    out.check(
        holds,
        format!(
            "a global invariant escapes its slice bound: margins {} {} {}",
            r.margin_plus, r.margin_minus, r.margin_gamma
        ),
    );
    Ok((pair.inputs, out))
}

pub fn reduce_inverse(args: &ReduceArgs, g: &Globals) -> InputResult<(serde_json::Value, Outcome)> {
    let pair = build_pair(args)?;
    let r = check_inverse_reduction(&pair.s1, &pair.s2)?;
    let (holds_d, holds_d1) = if g.strict {
        let with = |k: f64| {
            r.global_c_plus <= r.sup_slice_c_plus + k * r.sup_slice_gamma
                && r.global_c_minus >= r.inf_slice_c_minus - k * r.sup_slice_gamma
        };
        (with(r.d as f64), with(r.d as f64 + 1.0))
    } else {
        (r.holds_k_d, r.holds_k_d_plus_1)
    };
    let mut out = Outcome {
        grid: grid_summary(pair.s1.field()),
        tolerance: Some(if g.strict { 0.0 } else { r.tolerance }),
        ..Outcome::default()
    };
    out.results = json!({
        "d": r.d,
        "global_c_plus": r.global_c_plus,
        "global_c_minus": r.global_c_minus,
        "sup_slice_c_plus": r.sup_slice_c_plus,
        "inf_slice_c_minus": r.inf_slice_c_minus,
        "sup_slice_gamma": r.sup_slice_gamma,
        "holds_k_d": holds_d,
        "holds_k_d_plus_1": holds_d1,
        "ratio": json_f64(r.ratio),
    });
    let (header, rows) = slice_profile(&pair)?;
    let cols: Vec<&str> = header.iter().map(String::as_str).collect();
    out.csv_files
        .push(write_columns_csv(&g.out_dir, "slice_profile.csv", &cols, &rows)?);
    out.check(
        holds_d1,
        format!(
            "global gap exceeds {} slice gaps: c_plus {} vs sup {} + K*{}",
            r.d + 1,
            r.global_c_plus,
            r.sup_slice_c_plus,
            r.sup_slice_gamma
        ),
    );
    Ok((pair.inputs, out))
}

/// Region bounds: either a pair of arcs on a circle base, or a full cover
/// gluing chain over the leading axes of a product base.
#[derive(Args, Debug)]
pub struct MvArgs {
    #[command(flatten)]
    pub field: FieldArgs,
    /// First arc `<start>:<count>` (arc mode, circle bases).
    #[arg(long)]
    pub arc_u: Option<String>,
    /// Second arc `<start>:<count>` (arc mode, circle bases).
    #[arg(long)]
    pub arc_v: Option<String>,
    /// Pieces per covered axis (gluing mode).
    #[arg(long)]
    pub pieces: Option<usize>,
    /// Leading axes covered in gluing mode.
    #[arg(long, default_value_t = 1)]
    pub split: usize,
}

pub fn mv_glue(args: &MvArgs, g: &Globals) -> InputResult<(serde_json::Value, Outcome)> {
    let built = build(&args.field)?;
    let mut inputs = built.inputs;
    match (&args.arc_u, &args.arc_v, args.pieces) {
        (Some(u), Some(v), None) => {
            if built.field.base().dim() != 1 || built.field.fiber().dim() != 0 {
                return Err(InputError(
                    "arc mode needs a plain field on a circle base".into(),
                ));
            }
            let domain = built.field.base().clone();
            let (us, uc) = parse_arc(u)?;
            let (vs, vc) = parse_arc(v)?;
            let ru = Region::arc(domain.clone(), us, uc)?;
            let rv = Region::arc(domain, vs, vc)?;
            let f = built.field.as_grid_field();
            let r = mv_bound(&f, &ru, &rv)?;
            let (hb, hg) = if g.strict {
                (r.c_plus_union <= r.bound_beta, r.c_plus_union <= r.bound_gamma)
            } else {
                (r.holds_beta, r.holds_gamma)
            };
            inputs["arc_u"] = json!(u);
            inputs["arc_v"] = json!(v);
            let mut out = Outcome {
                grid: grid_summary(&built.field),
                tolerance: Some(if g.strict { 0.0 } else { r.tolerance }),
                ..Outcome::default()
            };
            out.results = json!({
                "mode": "arcs",
                "c_plus_u": r.c_plus_u,
                "c_plus_v": r.c_plus_v,
                "c_plus_union": r.c_plus_union,
                "beta_u": r.beta_u,
                "beta_v": r.beta_v,
                "gamma_u": r.gamma_u,
                "gamma_v": r.gamma_v,
                "bound_beta": r.bound_beta,
                "bound_gamma": r.bound_gamma,
                "holds_beta": hb,
                "holds_gamma": hg,
            });
            out.check(hb, format!("union c_plus {} over depth bound {}", r.c_plus_union, r.bound_beta));
            out.check(hg, format!("union c_plus {} over gap bound {}", r.c_plus_union, r.bound_gamma));
            Ok((inputs, out))
        }
        (None, None, Some(pieces)) => {
            let s = ProductGfqi::new(built.field, args.split)?;
            let cover = triangulation_cover(&s.x_grid(), pieces)?;
            cover.validate()?;
            let r = glued_upper_bound(&s, &cover)?;
            let holds = if g.strict {
                r.direct_c_plus <= r.chained_bound && r.steps.iter().all(|st| {
                    st.mv.c_plus_union <= st.mv.bound_beta
                })
            } else {
                r.holds
            };
            inputs["pieces"] = json!(pieces);
            inputs["split"] = json!(args.split);
            let mut out = Outcome {
                grid: grid_summary(s.field()),
                tolerance: Some(if g.strict { 0.0 } else { r.tolerance }),
                ..Outcome::default()
            };
            let steps: Vec<serde_json::Value> = r
                .steps
                .iter()
                .map(|st| {
                    json!({
                        "family": st.family,
                        "c_plus_union": st.mv.c_plus_union,
                        "bound": st.mv.bound_beta,
                        "holds": st.mv.holds_beta,
                    })
                })
                .collect();
            out.results = json!({
                "mode": "glued",
                "families": cover.n_families(),
                "chained_bound": r.chained_bound,
                "direct_c_plus": r.direct_c_plus,
                "steps": steps,
                "holds": holds,
            });
            out.check(
                holds,
                format!(
                    "direct value {} escapes the chained bound {}",
                    r.direct_c_plus, r.chained_bound
                ),
            );
            Ok((inputs, out))
        }
        _ => Err(InputError(
            "give either --arc-u and --arc-v (arc mode) or --pieces (gluing mode)".into(),
        )),
    }
}

/// Pull a field back along a linear torus self-map.
#[derive(Args, Debug)]
pub struct PullArgs {
    #[command(flatten)]
    pub field: FieldArgs,
    /// Winding matrix: rows `;`-separated, entries `,`-separated (e.g. `2`,
    /// `0`, or `1,0;1,1`).
    #[arg(long)]
    pub winding: String,
}

pub fn pullback(args: &PullArgs, g: &Globals) -> InputResult<(serde_json::Value, Outcome)> {
    let built = build(&args.field)?;
    let winding = parse_winding(&args.winding)?;
    let base = built.field.base().clone();
    let map = MapSpec::new(base.clone(), base, winding, vec![])?;
    let r = pullback_check(&built.field, &map)?;
    let (hi, he) = if g.strict {
        (
            r.gamma_pulled <= r.gamma_source,
            r.gamma_pulled == r.gamma_source,
        )
    } else {
        (r.holds_inequality, r.holds_equality)
    };
    let mut inputs = built.inputs;
    inputs["winding"] = json!(args.winding);
    let mut out = Outcome {
        grid: grid_summary(&built.field),
        tolerance: Some(if g.strict { 0.0 } else { r.tolerance }),
        ..Outcome::default()
    };
    out.results = json!({
        "gamma_source": r.gamma_source,
        "gamma_pulled": r.gamma_pulled,
        "winding_nonzero": r.winding_nonzero,
        "holds_inequality": hi,
        "holds_equality": he,
    });
    out.check(
        hi,
        format!(
            "pulled-back gap {} exceeds the source gap {}",
            r.gamma_pulled, r.gamma_source
        ),
    );
    if r.winding_nonzero {
        out.check(
            he,
            format!(
                "nonzero winding should preserve the gap: {} vs {}",
                r.gamma_pulled, r.gamma_source
            ),
        );
    }
    Ok((inputs, out))
}

pub fn shift(args: &FieldArgs, g: &Globals) -> InputResult<(serde_json::Value, Outcome)> {
    let built = build(args)?;
    let r = circle_shift_test(&built.field)?;
    let holds = if g.strict {
        r.sup_pair_gamma >= r.gamma / 3.0
    } else {
        r.holds
    };
    let mut out = Outcome {
        grid: grid_summary(&built.field),
        tolerance: Some(if g.strict { 0.0 } else { r.tolerance }),
        ..Outcome::default()
    };
    // The sweep again, this time keeping every sample for the plot file.
    let n = built.field.base().axes()[0].len;
    let mut rows = Vec::with_capacity(n);
    for k in 0..n {
        let theta = k as f64 * TAU / n as f64;
        let shifted = shift_gf(&built.field, theta)?;
        rows.push(vec![theta, gamma_pair(&built.field, &shifted)?]);
    }
    out.csv_files.push(write_columns_csv(
        &g.out_dir,
        "shift_sweep.csv",
        &["theta", "gamma_pair"],
        &rows,
    )?);
    out.results = json!({
        "gamma": r.gamma,
        "sup_pair_gamma": r.sup_pair_gamma,
        "best_theta": r.best_theta,
        "ratio": r.ratio,
        "holds": holds,
    });
    out.check(
        holds,
        format!(
            "no rotation moved the field by gamma/3: sup {} vs gamma {}",
            r.sup_pair_gamma, r.gamma
        ),
    );
    Ok((built.inputs, out))
}

/// Validate a stored product system and run the exact-arithmetic checks.
#[derive(Args, Debug)]
pub struct AlgebraArgs {
    /// Path to the JSON system document.
    #[arg(long)]
    pub file: PathBuf,
    /// Restrict the depth/gap comparison to one ordered pair `i,j`.
    #[arg(long)]
    pub pair: Option<String>,
}

pub fn algebra(args: &AlgebraArgs, _g: &Globals) -> InputResult<(serde_json::Value, Outcome)> {
    let text = std::fs::read_to_string(&args.file)
        .map_err(|e| InputError(format!("cannot read {:?}: {e}", args.file)))?;
    let sys = from_json(&text)?;
    let inputs = json!({
        "file": args.file.display().to_string(),
        "pair": args.pair,
        "indices": sys.n_indices(),
        "levels": sys.n_levels(),
    });
    let mut out = Outcome {
        // Exact arithmetic: the tolerance really is zero here.
        tolerance: Some(0.0),
        ..Outcome::default()
    };
    if let Err(e) = sys.validate() {
        out.results = json!({ "valid": false, "error": e.to_string() });
        out.fail(format!("system violates a product axiom: {e}"));
        return Ok((inputs, out));
    }
    let pairs: Vec<(usize, usize)> = match &args.pair {
        Some(spec) => {
            let (a, b) = spec
                .split_once(',')
                .ok_or_else(|| InputError(format!("pair spec '{spec}' must be 'i,j'")))?;
            let i = a.trim().parse().map_err(|_| InputError(format!("bad index '{a}'")))?;
            let j = b.trim().parse().map_err(|_| InputError(format!("bad index '{b}'")))?;
            if i >= sys.n_indices() || j >= sys.n_indices() {
                return Err(InputError(format!(
                    "pair {i},{j} out of range for {} indices",
                    sys.n_indices()
                )));
            }
            vec![(i, j)]
        }
        None => {
            let n = sys.n_indices();
            (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).collect()
        }
    };
    let mut rows = Vec::new();
    for (i, j) in pairs {
        let r = ks_check(&sys, i, j)?;
        if !r.holds {
            out.fail(format!(
                "pair ({i},{j}): boundary depth {} exceeds gap {}",
                r.beta, r.gamma
            ));
        }
        if !r.distance_doubles_to_beta {
            out.fail(format!(
                "pair ({i},{j}): distance to the infinite part {} does not double to the depth {}",
                r.distance_to_infinity, r.beta
            ));
        }
        rows.push(json!({
            "i": i,
            "j": j,
            "beta": r.beta.to_string(),
            "gamma": r.gamma.to_string(),
            "distance_to_infinity": r.distance_to_infinity.to_string(),
            "holds": r.holds,
        }));
    }
    out.results = json!({ "valid": true, "pairs": rows });
    Ok((inputs, out))
}
