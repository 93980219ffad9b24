//! JSON interchange for product systems (schema "v1"): dimensions and grid
//! explicit, matrices as 0/1 row arrays, critical values as exact decimal
//! strings.

use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::algebra::module::FinitePersistenceModule;
use crate::algebra::system::ProductSystem;
use crate::error::{Error, Result};
use crate::gf2::{BitMat, BitVec};

pub const SCHEMA: &str = "v1";

#[derive(Serialize, Deserialize)]
struct SystemDoc {
    schema: String,
    indices: usize,
    critical_values: Vec<String>,
    modules: Vec<ModuleDoc>,
    units: Vec<UnitDoc>,
    products: Vec<ProductDoc>,
}

#[derive(Serialize, Deserialize)]
struct ModuleDoc {
    i: usize,
    j: usize,
    dims: Vec<usize>,
    steps: Vec<Vec<Vec<u8>>>,
}

#[derive(Serialize, Deserialize)]
struct UnitDoc {
    i: usize,
    j: usize,
    vector: Vec<u8>,
}

#[derive(Serialize, Deserialize)]
struct ProductDoc {
    i: usize,
    j: usize,
    k: usize,
    s: usize,
    t: usize,
    matrix: Vec<Vec<u8>>,
}

/// Render an exact decimal form of a rational, failing when the denominator
/// has prime factors other than 2 and 5.
pub fn decimal_string(v: Rational64) -> Result<String> {
    let negative = v < Rational64::from_integer(0);
    let v = if negative { -v } else { v };
    let int = v.trunc().to_integer();
    let mut frac = v.fract();
    let mut digits = String::new();
    for _ in 0..24 {
        if frac == Rational64::from_integer(0) {
            break;
        }
        frac *= 10;
        let d = frac.trunc().to_integer();
        digits.push(char::from(b'0' + d as u8));
        frac = frac.fract();
    }
    if frac != Rational64::from_integer(0) {
        return Err(Error::Argument(format!(
            "critical value {v} has no finite decimal form"
        )));
    }
    let sign = if negative { "-" } else { "" };
    Ok(if digits.is_empty() {
        format!("{sign}{int}")
    } else {
        format!("{sign}{int}.{digits}")
    })
}

/// Parse an exact decimal string into a rational.
pub fn parse_decimal(s: &str) -> Result<Rational64> {
    let err = || Error::Argument(format!("'{s}' is not a decimal number"));
    let (sign, body) = match s.strip_prefix('-') {
        Some(rest) => (-1i64, rest),
        None => (1i64, s),
    };
    let (int_part, frac_part) = match body.split_once('.') {
        Some((a, b)) => (a, b),
        None => (body, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(err());
    }
    let mut value = if int_part.is_empty() {
        Rational64::from_integer(0)
    } else {
        Rational64::from_integer(int_part.parse::<i64>().map_err(|_| err())?)
    };
    if !frac_part.is_empty() {
        if frac_part.len() > 18 || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
            return Err(err());
        }
        let numer = frac_part.parse::<i64>().map_err(|_| err())?;
        let denom = 10i64.checked_pow(frac_part.len() as u32).ok_or_else(err)?;
        value += Rational64::new(numer, denom);
    }
    Ok(value * sign)
}

fn mat_entries(m: &BitMat) -> Vec<Vec<u8>> {
    (0..m.n_rows())
        .map(|r| (0..m.n_cols()).map(|c| u8::from(m.get(r, c))).collect())
        .collect()
}

fn mat_from_entries(rows: usize, cols: usize, entries: &[Vec<u8>]) -> Result<BitMat> {
    if entries.len() != rows || entries.iter().any(|r| r.len() != cols) {
        return Err(Error::MalformedSystem(format!(
            "matrix shape mismatch: expected {rows}x{cols}"
        )));
    }
    Ok(BitMat::from_entries(rows, cols, entries))
}

/// Serialize a system to the "v1" JSON document.
pub fn to_json(sys: &ProductSystem) -> Result<String> {
    let n = sys.n_indices();
    let m = sys.n_levels();
    let critical_values = sys
        .grid()
        .iter()
        .map(|&v| decimal_string(v))
        .collect::<Result<Vec<_>>>()?;
    let mut modules = Vec::new();
    let mut units = Vec::new();
    let mut products = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let module = sys.module(i, j);
            modules.push(ModuleDoc {
                i,
                j,
                dims: module.dims().to_vec(),
                steps: module.steps().iter().map(mat_entries).collect(),
            });
            let u = sys.unit(i, j);
            units.push(UnitDoc {
                i,
                j,
                vector: (0..u.len()).map(|b| u8::from(u.get(b))).collect(),
            });
            for k in 0..n {
                for s in 0..m {
                    for t in 0..m {
                        products.push(ProductDoc {
                            i,
                            j,
                            k,
                            s,
                            t,
                            matrix: mat_entries(sys.product(i, j, k, s, t)),
                        });
                    }
                }
            }
        }
    }
    let doc = SystemDoc {
        schema: SCHEMA.to_string(),
        indices: n,
        critical_values,
        modules,
        units,
        products,
    };
    serde_json::to_string_pretty(&doc)
        .map_err(|e| Error::Argument(format!("serialization failed: {e}")))
}

/// Parse a "v1" JSON document into a structurally checked system (axioms
/// are not validated here; run `validate` on the result).
pub fn from_json(text: &str) -> Result<ProductSystem> {
    let doc: SystemDoc = serde_json::from_str(text)
        .map_err(|e| Error::MalformedSystem(format!("JSON parse error: {e}")))?;
    if doc.schema != SCHEMA {
        return Err(Error::MalformedSystem(format!(
            "unsupported schema '{}' (expected '{SCHEMA}')",
            doc.schema
        )));
    }
    let n = doc.indices;
    let m = doc.critical_values.len();
    if n == 0 || m == 0 {
        return Err(Error::MalformedSystem("empty index set or grid".into()));
    }
    let grid = doc
        .critical_values
        .iter()
        .map(|s| parse_decimal(s))
        .collect::<Result<Vec<_>>>()?;
    let mut module_slots: Vec<Option<FinitePersistenceModule>> = vec![None; n * n];
    for md in &doc.modules {
        if md.i >= n || md.j >= n {
            return Err(Error::MalformedSystem(format!(
                "module ({},{}) outside the index set",
                md.i, md.j
            )));
        }
        if md.dims.len() != m || md.steps.len() + 1 != m {
            return Err(Error::MalformedSystem(format!(
                "module ({},{}) has wrong level count",
                md.i, md.j
            )));
        }
        let steps = (0..m - 1)
            .map(|l| mat_from_entries(md.dims[l + 1], md.dims[l], &md.steps[l]))
            .collect::<Result<Vec<_>>>()?;
        module_slots[md.i * n + md.j] =
            Some(FinitePersistenceModule::new(grid.clone(), md.dims.clone(), steps)?);
    }
    let modules = module_slots
        .into_iter()
        .enumerate()
        .map(|(idx, slot)| {
            slot.ok_or_else(|| {
                Error::MalformedSystem(format!(
                    "module ({},{}) missing from the document",
                    idx / n,
                    idx % n
                ))
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut unit_slots: Vec<Option<BitVec>> = vec![None; n * n];
    for ud in &doc.units {
        if ud.i >= n || ud.j >= n {
            return Err(Error::MalformedSystem(format!(
                "unit ({},{}) outside the index set",
                ud.i, ud.j
            )));
        }
        let mut v = BitVec::zeros(ud.vector.len());
        for (b, &e) in ud.vector.iter().enumerate() {
            v.set(b, e % 2 == 1);
        }
        unit_slots[ud.i * n + ud.j] = Some(v);
    }
    let units = unit_slots
        .into_iter()
        .enumerate()
        .map(|(idx, slot)| {
            slot.ok_or_else(|| {
                Error::MalformedSystem(format!(
                    "unit ({},{}) missing from the document",
                    idx / n,
                    idx % n
                ))
            })
        })
        .collect::<Result<Vec<_>>>()?;
    // target shapes need ℓ(s+t); recompute it from the parsed grid
    let level_of = |v: Rational64| -> usize {
        let mut idx = 0;
        for (l, g) in grid.iter().enumerate() {
            if *g <= v {
                idx = l;
            }
        }
        idx
    };
    let mut product_slots: Vec<Option<BitMat>> = vec![None; n * n * n * m * m];
    for pd in &doc.products {
        if pd.i >= n || pd.j >= n || pd.k >= n || pd.s >= m || pd.t >= m {
            return Err(Error::MalformedSystem(format!(
                "product ({},{},{}) at levels ({},{}) outside the document ranges",
                pd.i, pd.j, pd.k, pd.s, pd.t
            )));
        }
        let p = level_of(grid[pd.s] + grid[pd.t]);
        let rows = modules[pd.i * n + pd.k].dim_at(p);
        let cols =
            modules[pd.i * n + pd.j].dim_at(pd.s) * modules[pd.j * n + pd.k].dim_at(pd.t);
        let slot = ((pd.i * n + pd.j) * n + pd.k) * m * m + pd.s * m + pd.t;
        product_slots[slot] = Some(mat_from_entries(rows, cols, &pd.matrix)?);
    }
    let mut products: Vec<Vec<BitMat>> = Vec::with_capacity(n * n * n);
    for ijk in 0..n * n * n {
        let mut table = Vec::with_capacity(m * m);
        for st in 0..m * m {
            let slot = ijk * m * m + st;
            table.push(product_slots[slot].clone().ok_or_else(|| {
                Error::MalformedSystem(format!(
                    "product table {} at level pair {} missing from the document",
                    ijk, st
                ))
            })?);
        }
        products.push(table);
    }
    ProductSystem::new(n, grid, modules, units, products)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::generate::{random_system, SystemSize};

    #[test]
    fn decimal_strings_round_trip() {
        for (num, den, s) in [(0, 1, "0"), (7, 10, "0.7"), (11, 10, "1.1"), (-3, 4, "-0.75"), (5, 1, "5")] {
            let v = Rational64::new(num, den);
            assert_eq!(decimal_string(v).unwrap(), s);
            assert_eq!(parse_decimal(s).unwrap(), v);
        }
        assert!(decimal_string(Rational64::new(1, 3)).is_err());
        assert!(parse_decimal("abc").is_err());
        assert!(parse_decimal("").is_err());
    }

    #[test]
    fn system_round_trips_through_json() {
        let sys = random_system(
            9,
            &SystemSize { indices: 2, levels: 4, max_extra_bars: 2 },
        )
        .unwrap();
        let text = to_json(&sys).unwrap();
        let back = from_json(&text).unwrap();
        back.validate().unwrap();
        assert_eq!(to_json(&back).unwrap(), text);
    }

    #[test]
    fn malformed_documents_are_rejected() {
        let sys = random_system(
            5,
            &SystemSize { indices: 1, levels: 2, max_extra_bars: 0 },
        )
        .unwrap();
        let text = to_json(&sys).unwrap();
        let wrong_schema = text.replace("\"v1\"", "\"v2\"");
        assert!(from_json(&wrong_schema).is_err());
        assert!(from_json("{}").is_err());
        assert!(from_json("not json").is_err());
    }
}
