//! Parsing of command-line grid/fiber/arc specifications and assembly of
//! fields from expressions.
//!
//! Spec formats:
//! - base: `point`, `s1[:<n>]`, `t2[:<n>x<m>]` (default 128 samples per axis)
//! - fiber: `<k>[:<samples>[:<halfwidth>]]` (defaults 129 samples,
//!   halfwidth 4 — wide enough that the clamp bridge and its two-layer
//!   support margin sit outside the unit well of the quadratic)
//! - signs: comma-separated `+1`/`-1`, one per fiber variable (default all +1)
//! - arcs: `<start>:<count>` in vertex indices on a circle base

use gfspec::{Axis, GfqiField, GridDomain, GridField};

use crate::expr::Expr;

/// Input-level error: anything that makes the invocation unusable before a
/// single invariant is computed.  Mapped to exit code 2.
#[derive(Debug)]
pub struct InputError(pub String);

impl std::fmt::Display for InputError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for InputError {}

impl From<gfspec::Error> for InputError {
    fn from(e: gfspec::Error) -> Self {
        InputError(e.to_string())
    }
}

pub type InputResult<T> = Result<T, InputError>;

fn bad(msg: impl Into<String>) -> InputError {
    InputError(msg.into())
}

pub const DEFAULT_BASE_SAMPLES: usize = 128;
pub const DEFAULT_FIBER_SAMPLES: usize = 129;
pub const DEFAULT_FIBER_HALFWIDTH: f64 = 4.0;

/// Parse a base-grid specification.
pub fn parse_base(spec: &str) -> InputResult<GridDomain> {
    let spec = spec.trim();
    if spec == "point" {
        return Ok(GridDomain::point());
    }
    if let Some(rest) = spec.strip_prefix("s1") {
        let n = match rest.strip_prefix(':') {
            None if rest.is_empty() => DEFAULT_BASE_SAMPLES,
            Some(n) => parse_len(n, spec)?,
            _ => return Err(bad(format!("malformed base spec '{spec}'"))),
        };
        return Ok(GridDomain::torus(&[n])?);
    }
    if let Some(rest) = spec.strip_prefix("t2") {
        let (n, m) = match rest.strip_prefix(':') {
            None if rest.is_empty() => (DEFAULT_BASE_SAMPLES, DEFAULT_BASE_SAMPLES),
            Some(pair) => {
                let (a, b) = pair
                    .split_once('x')
                    .ok_or_else(|| bad(format!("base spec '{spec}' needs '<n>x<m>'")))?;
                (parse_len(a, spec)?, parse_len(b, spec)?)
            }
            _ => return Err(bad(format!("malformed base spec '{spec}'"))),
        };
        return Ok(GridDomain::torus(&[n, m])?);
    }
    Err(bad(format!(
        "unknown base spec '{spec}': expected 'point', 's1:<n>' or 't2:<n>x<m>'"
    )))
}

fn parse_len(text: &str, spec: &str) -> InputResult<usize> {
    text.parse()
        .map_err(|_| bad(format!("bad sample count '{text}' in '{spec}'")))
}

/// A fiber-box specification: `k` variables, each sampled on the same box.
#[derive(Clone, Copy, Debug)]
pub struct FiberSpec {
    pub k: usize,
    pub samples: usize,
    pub halfwidth: f64,
}

pub fn parse_fiber(spec: &str) -> InputResult<FiberSpec> {
    let parts: Vec<&str> = spec.trim().split(':').collect();
    if parts.is_empty() || parts.len() > 3 {
        return Err(bad(format!(
            "fiber spec '{spec}' must be '<k>[:<samples>[:<halfwidth>]]'"
        )));
    }
    let k: usize = parts[0]
        .parse()
        .map_err(|_| bad(format!("bad fiber variable count '{}'", parts[0])))?;
    if k == 0 || k > 3 {
        return Err(bad(format!("fiber variable count {k} out of range 1..=3")));
    }
    let samples = match parts.get(1) {
        None => DEFAULT_FIBER_SAMPLES,
        Some(s) => s
            .parse()
            .map_err(|_| bad(format!("bad fiber sample count '{s}'")))?,
    };
    let halfwidth = match parts.get(2) {
        None => DEFAULT_FIBER_HALFWIDTH,
        Some(h) => h
            .parse()
            .ok()
            .filter(|h: &f64| h.is_finite() && *h > 0.0)
            .ok_or_else(|| bad(format!("bad fiber halfwidth '{h}'")))?,
    };
    Ok(FiberSpec { k, samples, halfwidth })
}

pub fn parse_signs(spec: Option<&str>, k: usize) -> InputResult<Vec<i8>> {
    let Some(spec) = spec else {
        return Ok(vec![1; k]);
    };
    let signs: Vec<i8> = spec
        .split(',')
        .map(|s| match s.trim() {
            "+1" | "1" | "+" => Ok(1),
            "-1" | "-" => Ok(-1),
            other => Err(bad(format!("bad sign '{other}': expected +1 or -1"))),
        })
        .collect::<InputResult<_>>()?;
    if signs.len() != k {
        return Err(bad(format!(
            "{} signs given for {k} fiber variables",
            signs.len()
        )));
    }
    Ok(signs)
}

/// Parse `<start>:<count>` into a circle arc.
pub fn parse_arc(spec: &str) -> InputResult<(usize, usize)> {
    let (a, b) = spec
        .split_once(':')
        .ok_or_else(|| bad(format!("arc spec '{spec}' must be '<start>:<count>'")))?;
    let start = a
        .parse()
        .map_err(|_| bad(format!("bad arc start '{a}'")))?;
    let count = b
        .parse()
        .map_err(|_| bad(format!("bad arc count '{b}'")))?;
    Ok((start, count))
}

/// Parse a winding matrix: rows separated by `;`, entries by `,`.
pub fn parse_winding(spec: &str) -> InputResult<Vec<Vec<i64>>> {
    spec.split(';')
        .map(|row| {
            row.split(',')
                .map(|e| {
                    e.trim()
                        .parse()
                        .map_err(|_| bad(format!("bad winding entry '{e}'")))
                })
                .collect()
        })
        .collect()
}

/// Build a field over `base` from an expression, attaching a fiber box when
/// one is declared.  Without a fiber the construction is the plain graph of
/// the sampled base function; with one, the expression is clamped to the
/// quadratic form near the box edge so the support-margin invariant holds by
/// construction.
pub fn build_field(
    base: &GridDomain,
    fiber: Option<FiberSpec>,
    signs_spec: Option<&str>,
    expr: &Expr,
) -> InputResult<GfqiField> {
    match fiber {
        None => {
            if signs_spec.is_some() {
                return Err(bad("--signs requires --fiber"));
            }
            let f = GridField::sample(base.clone(), |x| expr.eval(x, &[]))?;
            Ok(gfspec::graph_gf(&f)?)
        }
        Some(spec) => {
            let signs = parse_signs(signs_spec, spec.k)?;
            let fiber_domain = GridDomain::new(
                (0..spec.k)
                    .map(|_| Axis::box_interval(spec.samples, spec.halfwidth))
                    .collect(),
            )?;
            Ok(gfspec::gfqi::clamp_to_quadratic(
                base.clone(),
                fiber_domain,
                signs,
                2,
                |x, xi| expr.eval(x, xi),
            )?)
        }
    }
}

/// Echo of the grid geometry for the report.
pub fn grid_summary(field: &GfqiField) -> serde_json::Value {
    serde_json::json!({
        "base": field
            .base()
            .axes()
            .iter()
            .map(|a| serde_json::json!({
                "samples": a.len,
                "periodic": a.periodic,
                "spacing": a.spacing,
            }))
            .collect::<Vec<_>>(),
        "fiber": field
            .fiber()
            .axes()
            .iter()
            .map(|a| serde_json::json!({
                "samples": a.len,
                "periodic": a.periodic,
                "spacing": a.spacing,
            }))
            .collect::<Vec<_>>(),
        "signs": field.signs(),
    })
}
