//! Barcodes: multisets of bars with degree bookkeeping, boundary depth and
//! the bottleneck distance.
//!
//! A bar `[birth, death)` in degree `q` records a homology class born at
//! `birth` and dying at `death`; `death = +inf` marks classes of the terminal
//! space.  Zero-length bars are never stored.  The bottleneck distance is
//! computed per degree by an optimal matching in which finite bars may be
//! matched to the diagonal at half their length; barcodes whose infinite-bar
//! counts differ in some degree are at distance `+inf`.

/// A single bar.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bar {
    /// Homology degree.
    pub degree: usize,
    /// Birth value (finite).
    pub birth: f64,
    /// Death value; `f64::INFINITY` for essential classes.
    pub death: f64,
}

impl Bar {
    pub fn is_infinite(&self) -> bool {
        self.death == f64::INFINITY
    }

    /// Length `death - birth` (`+inf` for essential bars).
    pub fn length(&self) -> f64 {
        self.death - self.birth
    }
}

/// A barcode: bars sorted by `(degree, birth, death)`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Barcode {
    bars: Vec<Bar>,
}

impl Barcode {
    /// Build from a list of bars; zero-length bars are dropped and the rest
    /// sorted into canonical order.
    pub fn new(mut bars: Vec<Bar>) -> Self {
        bars.retain(|b| b.death > b.birth);
        bars.sort_by(|a, b| {
            a.degree
                .cmp(&b.degree)
                .then(a.birth.partial_cmp(&b.birth).expect("finite births"))
                .then(a.death.partial_cmp(&b.death).expect("ordered deaths"))
        });
        Barcode { bars }
    }

    pub fn bars(&self) -> &[Bar] {
        &self.bars
    }

    pub fn is_empty(&self) -> bool {
        self.bars.is_empty()
    }

    pub fn len(&self) -> usize {
        self.bars.len()
    }

    /// All bars of the given degree.
    pub fn in_degree(&self, degree: usize) -> Vec<Bar> {
        self.bars.iter().copied().filter(|b| b.degree == degree).collect()
    }

    /// Infinite bars of the given degree.
    pub fn infinite_in_degree(&self, degree: usize) -> Vec<Bar> {
        self.bars
            .iter()
            .copied()
            .filter(|b| b.degree == degree && b.is_infinite())
            .collect()
    }

    /// Highest degree carrying a bar.
    pub fn max_degree(&self) -> usize {
        self.bars.iter().map(|b| b.degree).max().unwrap_or(0)
    }

    /// Longest finite bar length; 0 if there is none.
    pub fn boundary_depth(&self) -> f64 {
        self.bars
            .iter()
            .filter(|b| !b.is_infinite())
            .map(|b| b.length())
            .fold(0.0, f64::max)
    }

    /// Number of bars of the given degree alive on the whole interval
    /// `[s, t]`, i.e. with `birth ≤ s` and `death > t`.  This is the rank of
    /// the map induced on degree-`q` homology by the inclusion of sublevel
    /// sets, and is cross-checked against the independent rank oracle.
    pub fn n_bars_containing(&self, s: f64, t: f64, degree: usize) -> usize {
        assert!(s <= t, "interval endpoints out of order");
        self.bars
            .iter()
            .filter(|b| b.degree == degree && b.birth <= s && b.death > t)
            .count()
    }
}

// ---------------------------------------------------------------------------
// bottleneck distance
// ---------------------------------------------------------------------------

/// Bottleneck distance between two barcodes (per degree, then maximum).
pub fn bottleneck_distance(a: &Barcode, b: &Barcode) -> f64 {
    let mut degrees: Vec<usize> = a.bars.iter().chain(&b.bars).map(|x| x.degree).collect();
    degrees.sort_unstable();
    degrees.dedup();
    let mut dist: f64 = 0.0;
    for q in degrees {
        dist = dist.max(bottleneck_in_degree(&a.in_degree(q), &b.in_degree(q)));
        if dist == f64::INFINITY {
            break;
        }
    }
    dist
}

fn bottleneck_in_degree(a: &[Bar], b: &[Bar]) -> f64 {
    let a_inf: Vec<f64> = a.iter().filter(|x| x.is_infinite()).map(|x| x.birth).collect();
    let b_inf: Vec<f64> = b.iter().filter(|x| x.is_infinite()).map(|x| x.birth).collect();
    if a_inf.len() != b_inf.len() {
        return f64::INFINITY;
    }
    // Essential bars must match essential bars; matching sorted births in
    // order minimizes the maximal birth discrepancy.
    let mut ai = a_inf;
    let mut bi = b_inf;
    ai.sort_by(|x, y| x.partial_cmp(y).expect("finite births"));
    bi.sort_by(|x, y| x.partial_cmp(y).expect("finite births"));
    let inf_cost = ai
        .iter()
        .zip(&bi)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);

    let a_fin: Vec<Bar> = a.iter().copied().filter(|x| !x.is_infinite()).collect();
    let b_fin: Vec<Bar> = b.iter().copied().filter(|x| !x.is_infinite()).collect();
    inf_cost.max(finite_bottleneck(&a_fin, &b_fin))
}

fn pair_cost(a: &Bar, b: &Bar) -> f64 {
    (a.birth - b.birth).abs().max((a.death - b.death).abs())
}

fn diagonal_cost(a: &Bar) -> f64 {
    a.length() / 2.0
}

/// Exact bottleneck over finite bars: binary search over the candidate costs
/// with a bipartite-matching feasibility test.
fn finite_bottleneck(a: &[Bar], b: &[Bar]) -> f64 {
    if a.is_empty() && b.is_empty() {
        return 0.0;
    }
    let mut candidates: Vec<f64> = Vec::new();
    for x in a {
        candidates.push(diagonal_cost(x));
        for y in b {
            candidates.push(pair_cost(x, y));
        }
    }
    for y in b {
        candidates.push(diagonal_cost(y));
    }
    candidates.sort_by(|x, y| x.partial_cmp(y).expect("finite costs"));
    candidates.dedup();
    // smallest candidate for which a perfect matching exists
    let mut lo = 0;
    let mut hi = candidates.len() - 1;
    debug_assert!(matching_feasible(a, b, candidates[hi]));
    while lo < hi {
        let mid = (lo + hi) / 2;
        if matching_feasible(a, b, candidates[mid]) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    candidates[lo]
}

/// Perfect-matching feasibility at threshold `lambda`.
///
/// Left vertices: bars of `a`, then one diagonal slot per bar of `b`.
/// Right vertices: bars of `b`, then one diagonal slot per bar of `a`.
/// A bar may use its own diagonal slot when its half-length is within
/// `lambda`; diagonal slots match each other freely.
fn matching_feasible(a: &[Bar], b: &[Bar], lambda: f64) -> bool {
    let n = a.len();
    let m = b.len();
    let total = n + m;
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); total];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            if pair_cost(x, y) <= lambda {
                adj[i].push(j);
            }
        }
        if diagonal_cost(x) <= lambda {
            adj[i].push(m + i);
        }
    }
    for (d, y) in b.iter().enumerate() {
        if diagonal_cost(y) <= lambda {
            adj[n + d].push(d);
        }
        for extra in m..m + n {
            adj[n + d].push(extra);
        }
    }
    // Kuhn's augmenting-path matching.
    let mut matched_right: Vec<Option<usize>> = vec![None; total];
    let mut size = 0;
    for left in 0..total {
        let mut visited = vec![false; total];
        if try_augment(left, &adj, &mut matched_right, &mut visited) {
            size += 1;
        }
    }
    size == total
}

fn try_augment(
    left: usize,
    adj: &[Vec<usize>],
    matched_right: &mut [Option<usize>],
    visited: &mut [bool],
) -> bool {
    for &right in &adj[left] {
        if visited[right] {
            continue;
        }
        visited[right] = true;
        if matched_right[right].is_none()
            || try_augment(matched_right[right].unwrap(), adj, matched_right, visited)
        {
            matched_right[right] = Some(left);
            return true;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bar(degree: usize, birth: f64, death: f64) -> Bar {
        Bar { degree, birth, death }
    }

    #[test]
    fn zero_length_bars_dropped() {
        let bc = Barcode::new(vec![bar(0, 1.0, 1.0), bar(0, 0.0, 2.0)]);
        assert_eq!(bc.len(), 1);
        assert_eq!(bc.bars()[0].length(), 2.0);
    }

    #[test]
    fn boundary_depth_is_longest_finite_bar() {
        let bc = Barcode::new(vec![
            bar(0, -1.0, f64::INFINITY),
            bar(0, -1.0, 0.0),
            bar(1, 0.0, 0.25),
        ]);
        assert_eq!(bc.boundary_depth(), 1.0);
        let essential_only = Barcode::new(vec![bar(0, 0.0, f64::INFINITY)]);
        assert_eq!(essential_only.boundary_depth(), 0.0);
    }

    #[test]
    fn containment_counting() {
        let bc = Barcode::new(vec![bar(0, 0.0, 2.0), bar(0, 1.0, f64::INFINITY)]);
        assert_eq!(bc.n_bars_containing(0.0, 0.0, 0), 1);
        assert_eq!(bc.n_bars_containing(1.0, 1.5, 0), 2);
        assert_eq!(bc.n_bars_containing(1.0, 2.0, 0), 1); // [0,2) dead at 2
        assert_eq!(bc.n_bars_containing(1.0, 2.0, 1), 0);
    }

    #[test]
    fn bottleneck_identical_is_zero() {
        let bc = Barcode::new(vec![bar(0, 0.0, 3.0), bar(1, 1.0, f64::INFINITY)]);
        assert_eq!(bottleneck_distance(&bc, &bc), 0.0);
    }

    #[test]
    fn bottleneck_mismatched_essential_counts_is_infinite() {
        let a = Barcode::new(vec![bar(0, 0.0, f64::INFINITY)]);
        let b = Barcode::new(vec![]);
        assert_eq!(bottleneck_distance(&a, &b), f64::INFINITY);
    }

    #[test]
    fn bottleneck_prefers_diagonal_when_cheaper() {
        // one short bar vs empty: cost = half-length
        let a = Barcode::new(vec![bar(0, 0.0, 1.0)]);
        let b = Barcode::new(vec![]);
        assert_eq!(bottleneck_distance(&a, &b), 0.5);
        // two long bars close together: matching beats two diagonals
        let a = Barcode::new(vec![bar(0, 0.0, 10.0)]);
        let b = Barcode::new(vec![bar(0, 0.5, 10.0)]);
        assert_eq!(bottleneck_distance(&a, &b), 0.5);
    }

    #[test]
    fn bottleneck_hand_checked_mixed_case() {
        let a = Barcode::new(vec![bar(0, 0.0, 4.0), bar(0, 1.0, 2.0)]);
        let b = Barcode::new(vec![bar(0, 0.5, 4.5)]);
        // match (0,4)<->(0.5,4.5) at 0.5, (1,2)->diagonal at 0.5
        assert_eq!(bottleneck_distance(&a, &b), 0.5);
    }

    #[test]
    fn bottleneck_symmetry_and_triangle_on_random_barcodes() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0xb0771e);
        for _ in 0..40 {
            let mut make = |n_ess: usize| {
                let mut bars = Vec::new();
                let n = rng.gen_range(0..5);
                for _ in 0..n {
                    let birth: f64 = rng.gen_range(-2.0..2.0);
                    let len: f64 = rng.gen_range(0.01..3.0);
                    bars.push(bar(0, birth, birth + len));
                }
                for _ in 0..n_ess {
                    bars.push(bar(0, rng.gen_range(-2.0..2.0), f64::INFINITY));
                }
                Barcode::new(bars)
            };
            let x = make(1);
            let y = make(1);
            let z = make(1);
            let dxy = bottleneck_distance(&x, &y);
            let dyx = bottleneck_distance(&y, &x);
            assert!((dxy - dyx).abs() < 1e-12, "symmetry violated");
            let dxz = bottleneck_distance(&x, &z);
            let dyz = bottleneck_distance(&y, &z);
            assert!(dxz <= dxy + dyz + 1e-12, "triangle inequality violated");
            assert_eq!(bottleneck_distance(&x, &x), 0.0);
        }
    }
}
