//! Seeded instance builders: trigonometric base fields, bump-supported
//! fields, and random filtered complexes for cross-checking the reduction
//! against the rank oracle.  Every builder is deterministic in its seed.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::complex::{Cell, FilteredComplex};
use crate::error::Result;
use crate::gfqi::{clamp_to_quadratic, GfqiField};
use crate::grid::{Axis, GridDomain, GridField};

/// The double-well field `S(xi) = xi⁴ - 2·xi²` over a point base, bridged to
/// `Q = xi²` near the box edge.  On a 513-sample box of halfwidth 4 the grid
/// hits the critical points exactly: minima -1 at xi = ±1, merge value 0 at
/// the origin.
pub fn quartic_point_field(samples: usize, halfwidth: f64) -> Result<GfqiField> {
    let fiber = GridDomain::new(vec![Axis::box_interval(samples, halfwidth)])?;
    clamp_to_quadratic(GridDomain::point(), fiber, vec![1], 2, |_, xi| {
        let t = xi[0] * xi[0];
        t * t - 2.0 * t
    })
}

/// A random trigonometric polynomial on a torus, harmonics of order at most
/// `max_degree` per axis, rescaled to sup-norm exactly `amplitude`.
pub fn random_trig_field(
    domain: &GridDomain,
    seed: u64,
    max_degree: u32,
    amplitude: f64,
) -> Result<GridField> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = domain.dim();
    let deg = max_degree.clamp(1, 4) as i64;
    // modes: all integer vectors k with |k_i| ≤ deg, excluding k = 0,
    // keeping one representative per ±k pair
    let mut modes: Vec<Vec<i64>> = Vec::new();
    let mut stack = vec![Vec::new()];
    while let Some(m) = stack.pop() {
        if m.len() == d {
            if m.iter().any(|&k| k != 0) && m.iter().find(|&&k| k != 0).map(|&k| k > 0) == Some(true)
            {
                modes.push(m);
            }
            continue;
        }
        for k in -deg..=deg {
            let mut next = m.clone();
            next.push(k);
            stack.push(next);
        }
    }
    modes.sort();
    let coeffs: Vec<(f64, f64)> = modes
        .iter()
        .map(|_| (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let raw = GridField::sample(domain.clone(), |x| {
        let mut v = 0.0;
        for (m, (a, b)) in modes.iter().zip(&coeffs) {
            let phase: f64 = m.iter().zip(x).map(|(&k, &xi)| k as f64 * xi).sum();
            v += a * phase.cos() + b * phase.sin();
        }
        v
    })?;
    let sup = raw.min().abs().max(raw.max().abs()).max(1e-12);
    GridField::new(
        domain.clone(),
        raw.values().iter().map(|v| v * amplitude / sup).collect(),
    )
}

/// A random field with one fiber axis: `S(x; xi) = sign·xi² + bump(xi)·g(x)`
/// where the bump is supported on the inner half of the box (so the margin
/// invariant holds exactly) and `g` is a random trigonometric polynomial
/// with `sup |g| ≤ amplitude`.  For a negative sign the box is deepened
/// until the escape directions cross the deep sublevel threshold.
pub fn random_gfqi(
    base: &GridDomain,
    seed: u64,
    sign: i8,
    samples: usize,
    amplitude: f64,
) -> Result<GfqiField> {
    let g = random_trig_field(base, seed, 3, amplitude)?;
    // deep enough for any composition of two such fields:
    // h² ≥ 2·(1 + 2·amplitude) + 4·amplitude with slack
    let h = (4.0 + 8.0 * amplitude).sqrt().ceil();
    let fiber = GridDomain::new(vec![Axis::box_interval(samples, h)])?;
    let inner = h / 2.0;
    let bump_halfwidth = inner * 0.9;
    let values: Vec<f64> = {
        let mut out = Vec::with_capacity(base.n_vertices() * samples);
        for bidx in base.vertices() {
            let gv = g.value_at(&bidx);
            for fidx in fiber.vertices() {
                let xi = fiber.axes()[0].coordinate(fidx[0]);
                let bump = if xi.abs() < bump_halfwidth {
                    let t = xi / bump_halfwidth;
                    (1.0 - t * t).powi(2)
                } else {
                    0.0
                };
                out.push(f64::from(sign) * xi * xi + bump * gv);
            }
        }
        out
    };
    GfqiField::new(base.clone(), fiber, vec![sign], values, 2)
}

/// A random filtered simplicial complex: `n_vertices` vertices, random edges
/// and triangles on top of them, values drawn from a small set of levels and
/// pushed up to respect monotonicity.  Useful for fuzzing the reduction
/// against the rank oracle; the few distinct levels force many ties.
pub fn random_simplicial(
    seed: u64,
    n_vertices: usize,
    n_edges: usize,
    n_triangles: usize,
    levels: &[f64],
) -> Result<FilteredComplex> {
    assert!(n_vertices >= 2 && !levels.is_empty());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pick = |rng: &mut ChaCha8Rng| levels[rng.gen_range(0..levels.len())];
    let mut cells: Vec<Cell> = Vec::new();
    for _ in 0..n_vertices {
        let value = pick(&mut rng);
        cells.push(Cell { dim: 0, facets: vec![], value, relative: false });
    }
    // edges: sampled pairs, deduplicated
    let mut edge_id = std::collections::HashMap::new();
    let mut guard = 0;
    while edge_id.len() < n_edges && guard < 50 * n_edges {
        guard += 1;
        let a = rng.gen_range(0..n_vertices);
        let b = rng.gen_range(0..n_vertices);
        if a == b {
            continue;
        }
        let key = (a.min(b), a.max(b));
        if edge_id.contains_key(&key) {
            continue;
        }
        let value = pick(&mut rng)
            .max(cells[key.0].value)
            .max(cells[key.1].value);
        edge_id.insert(key, cells.len());
        cells.push(Cell { dim: 1, facets: vec![key.0, key.1], value, relative: false });
    }
    // triangles: random vertex triples whose three edges all exist
    let mut tri_seen = std::collections::HashSet::new();
    let mut guard = 0;
    let mut placed = 0;
    while placed < n_triangles && guard < 200 * (n_triangles + 1) {
        guard += 1;
        let mut v = [
            rng.gen_range(0..n_vertices),
            rng.gen_range(0..n_vertices),
            rng.gen_range(0..n_vertices),
        ];
        v.sort_unstable();
        if v[0] == v[1] || v[1] == v[2] || !tri_seen.insert(v) {
            continue;
        }
        let e = [
            edge_id.get(&(v[0], v[1])),
            edge_id.get(&(v[0], v[2])),
            edge_id.get(&(v[1], v[2])),
        ];
        if let [Some(&e0), Some(&e1), Some(&e2)] = e {
            let value = pick(&mut rng)
                .max(cells[e0].value)
                .max(cells[e1].value)
                .max(cells[e2].value);
            cells.push(Cell { dim: 2, facets: vec![e0, e1, e2], value, relative: false });
            placed += 1;
        }
    }
    FilteredComplex::new(cells)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rank::assert_matches_barcode;
    use crate::reduce::reduce;

    #[test]
    fn quartic_barcode_is_frozen() {
        let f = quartic_point_field(513, 4.0).unwrap();
        assert_eq!(f.q_index(), 0);
        let c = f.relative_filtration().unwrap();
        let bars = reduce(&c).unwrap();
        let summary: Vec<(usize, f64, f64)> =
            bars.bars().iter().map(|b| (b.degree, b.birth, b.death)).collect();
        assert_eq!(
            summary,
            vec![(0, -1.0, 0.0), (0, -1.0, f64::INFINITY)],
            "double well: two minima at -1, merge at 0"
        );
        assert_eq!(bars.boundary_depth(), 1.0);
    }

    #[test]
    fn trig_field_sup_norm_is_calibrated() {
        let d = GridDomain::torus(&[64]).unwrap();
        for seed in 0..10u64 {
            let f = random_trig_field(&d, seed, 4, 1.5).unwrap();
            let sup = f.min().abs().max(f.max().abs());
            assert!((sup - 1.5).abs() < 1e-9, "seed {seed}: sup {sup}");
        }
        // determinism
        let a = random_trig_field(&d, 7, 3, 1.0).unwrap();
        let b = random_trig_field(&d, 7, 3, 1.0).unwrap();
        assert_eq!(a.values(), b.values());
    }

    #[test]
    fn random_gfqi_passes_margin_checks() {
        let base = GridDomain::torus(&[16]).unwrap();
        for seed in 0..5u64 {
            for &sign in &[1i8, -1] {
                let f = random_gfqi(&base, seed, sign, 65, 0.8).unwrap();
                assert!(f.margins()[0] >= 2);
                // the relative filtration must build (deep enough box)
                f.relative_filtration().unwrap();
            }
        }
    }

    #[test]
    fn random_complexes_validate_and_match_rank_oracle() {
        let levels = [0.0, 0.5, 1.0, 1.5, 2.0];
        for seed in 0..25u64 {
            let c = random_simplicial(seed, 10, 18, 6, &levels).unwrap();
            assert_matches_barcode(&c);
        }
    }
}
