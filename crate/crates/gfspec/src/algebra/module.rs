//! Finite persistence modules over GF(2) on a shared grid of rational
//! critical values, with exact barcodes, boundary depth, the infinite-part
//! module, and an exact bottleneck/interleaving distance.

use num_rational::Rational64;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::gf2::BitMat;

/// A bar with rational endpoints; `death == None` means the bar never dies.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct RationalBar {
    pub birth: Rational64,
    pub death: Option<Rational64>,
}

impl RationalBar {
    pub fn length(&self) -> Option<Rational64> {
        self.death.map(|d| d - self.birth)
    }
}

/// A persistence module presented by its spaces at finitely many critical
/// values `t_1 < … < t_m` and the step maps between consecutive values.
/// The module is zero below `t_1` and constant (equal to its value at `t_m`)
/// above `t_m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FinitePersistenceModule {
    values: Vec<Rational64>,
    dims: Vec<usize>,
    /// `steps[l]: V_{t_l} -> V_{t_{l+1}}`
    steps: Vec<BitMat>,
}

impl FinitePersistenceModule {
    pub fn new(values: Vec<Rational64>, dims: Vec<usize>, steps: Vec<BitMat>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::MalformedSystem("module needs a critical value".into()));
        }
        if values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::MalformedSystem(
                "critical values must strictly increase".into(),
            ));
        }
        if dims.len() != values.len() || steps.len() + 1 != values.len() {
            return Err(Error::MalformedSystem(format!(
                "expected {} dims and {} step maps, got {} and {}",
                values.len(),
                values.len() - 1,
                dims.len(),
                steps.len()
            )));
        }
        for (l, s) in steps.iter().enumerate() {
            if s.n_cols() != dims[l] || s.n_rows() != dims[l + 1] {
                return Err(Error::MalformedSystem(format!(
                    "step {l} is {}x{}, expected {}x{}",
                    s.n_rows(),
                    s.n_cols(),
                    dims[l + 1],
                    dims[l]
                )));
            }
        }
        Ok(FinitePersistenceModule { values, dims, steps })
    }

    /// The module that is zero everywhere on the given grid.
    pub fn zero(values: Vec<Rational64>) -> Result<Self> {
        let n = values.len();
        let dims = vec![0; n];
        let steps = vec![BitMat::zeros(0, 0); n.saturating_sub(1)];
        FinitePersistenceModule::new(values, dims, steps)
    }

    pub fn values(&self) -> &[Rational64] {
        &self.values
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn steps(&self) -> &[BitMat] {
        &self.steps
    }

    pub fn n_levels(&self) -> usize {
        self.values.len()
    }

    pub fn dim_at(&self, level: usize) -> usize {
        self.dims[level]
    }

    /// Composite restriction map `V_{t_a} -> V_{t_b}` for `a ≤ b`.
    pub fn map(&self, a: usize, b: usize) -> BitMat {
        assert!(a <= b && b < self.values.len(), "bad level pair {a} {b}");
        let mut m = BitMat::identity(self.dims[a]);
        for step in &self.steps[a..b] {
            m = step.mul_mat(&m);
        }
        m
    }

    /// Composite into the top (stable) level.
    pub fn map_to_top(&self, a: usize) -> BitMat {
        self.map(a, self.values.len() - 1)
    }

    /// Exact barcode by rank inclusion–exclusion over the critical grid.
    pub fn barcode(&self) -> Result<Vec<RationalBar>> {
        let m = self.values.len();
        // rank[a][b - a] = rank of V_{t_a} -> V_{t_b}
        let mut rank = vec![Vec::new(); m];
        for (a, row) in rank.iter_mut().enumerate() {
            let mut comp = BitMat::identity(self.dims[a]);
            row.push(self.dims[a]);
            for step in &self.steps[a..] {
                comp = step.mul_mat(&comp);
                row.push(comp.rank());
            }
        }
        let rk = |a: usize, b: usize| rank[a][b - a];
        let mut bars = Vec::new();
        for a in 0..m {
            for b in a + 1..m {
                // bars [t_a, t_b): alive from a through b-1, dead at b
                let mut count = rk(a, b - 1) as i64 - rk(a, b) as i64;
                if a > 0 {
                    count -= rk(a - 1, b - 1) as i64 - rk(a - 1, b) as i64;
                }
                if count < 0 {
                    return Err(Error::InternalInvariant(format!(
                        "negative bar multiplicity at levels ({a}, {b})"
                    )));
                }
                for _ in 0..count {
                    bars.push(RationalBar {
                        birth: self.values[a],
                        death: Some(self.values[b]),
                    });
                }
            }
            let mut inf = rk(a, m - 1) as i64;
            if a > 0 {
                inf -= rk(a - 1, m - 1) as i64;
            }
            if inf < 0 {
                return Err(Error::InternalInvariant(format!(
                    "negative infinite multiplicity at level {a}"
                )));
            }
            for _ in 0..inf {
                bars.push(RationalBar { birth: self.values[a], death: None });
            }
        }
        bars.sort();
        Ok(bars)
    }

    /// Length of the longest finite bar (zero when none exists).
    pub fn boundary_depth(&self) -> Result<Rational64> {
        Ok(self
            .barcode()?
            .iter()
            .filter_map(RationalBar::length)
            .max()
            .unwrap_or_else(Rational64::zero))
    }

    /// The module of images inside the top level: `W_t = Im(V_t -> V_∞)`
    /// with inclusion maps.  Its barcode is exactly the infinite bars of the
    /// input (checked).
    pub fn infinity_module(&self) -> Result<FinitePersistenceModule> {
        let m = self.values.len();
        // basis of Im(map_to_top(a)) for each level, as columns in V_top
        let mut bases: Vec<Vec<crate::gf2::BitVec>> = Vec::with_capacity(m);
        for a in 0..m {
            let to_top = self.map_to_top(a);
            let mut basis: Vec<crate::gf2::BitVec> = Vec::new();
            for c in 0..to_top.n_cols() {
                let cand = to_top.col(c);
                let span = basis_matrix(&basis, self.dims[m - 1]);
                if !cand.is_zero() && !span.col_space_contains(&cand) {
                    basis.push(cand);
                }
            }
            bases.push(basis);
        }
        let dims: Vec<usize> = bases.iter().map(Vec::len).collect();
        let mut steps = Vec::with_capacity(m.saturating_sub(1));
        for l in 0..m.saturating_sub(1) {
            // express basis of W_l in the basis of W_{l+1} (images nest)
            let next = basis_matrix(&bases[l + 1], self.dims[m - 1]);
            let mut step = BitMat::zeros(dims[l + 1], dims[l]);
            for (c, v) in bases[l].iter().enumerate() {
                let x = next.solve(v).ok_or_else(|| {
                    Error::InternalInvariant("image levels failed to nest".into())
                })?;
                for r in x.ones() {
                    step.set(r, c, true);
                }
            }
            steps.push(step);
        }
        let out = FinitePersistenceModule::new(self.values.clone(), dims, steps)?;
        let expect: Vec<RationalBar> = self
            .barcode()?
            .into_iter()
            .filter(|b| b.death.is_none())
            .collect();
        let mut got = out.barcode()?;
        got.sort();
        if got != expect {
            return Err(Error::InternalInvariant(
                "infinite-part barcode does not match the infinite bars".into(),
            ));
        }
        Ok(out)
    }
}

fn basis_matrix(cols: &[crate::gf2::BitVec], rows: usize) -> BitMat {
    let mut m = BitMat::zeros(rows, cols.len());
    for (c, v) in cols.iter().enumerate() {
        for r in v.ones() {
            m.set(r, c, true);
        }
    }
    m
}

/// Exact bottleneck distance between two finite rational barcodes:
/// the smallest radius `r` admitting a matching where matched bars differ by
/// at most `r` at both endpoints and every unmatched bar has half-length
/// ≤ `r`.  Infinite bars must match infinite bars.  `None` when no radius
/// works (mismatched infinite-bar counts cannot be matched at any cost...
/// they can still match each other by birth, so a value always exists unless
/// the infinite multiplicities differ).
pub fn exact_bottleneck(a: &[RationalBar], b: &[RationalBar]) -> Option<Rational64> {
    let inf_a: Vec<Rational64> = a.iter().filter(|x| x.death.is_none()).map(|x| x.birth).collect();
    let inf_b: Vec<Rational64> = b.iter().filter(|x| x.death.is_none()).map(|x| x.birth).collect();
    if inf_a.len() != inf_b.len() {
        return None;
    }
    // Infinite bars: optimal matching of two sorted lists is index-wise.
    let mut infinite_cost = Rational64::zero();
    {
        let mut sa = inf_a;
        let mut sb = inf_b;
        sa.sort();
        sb.sort();
        for (x, y) in sa.iter().zip(&sb) {
            infinite_cost = infinite_cost.max((*x - *y).abs());
        }
    }
    let fin_a: Vec<&RationalBar> = a.iter().filter(|x| x.death.is_some()).collect();
    let fin_b: Vec<&RationalBar> = b.iter().filter(|x| x.death.is_some()).collect();
    let half = Rational64::new(1, 2);
    let mut candidates: Vec<Rational64> = vec![infinite_cost];
    for &x in &fin_a {
        candidates.push(x.length().unwrap() * half);
    }
    for &y in &fin_b {
        candidates.push(y.length().unwrap() * half);
    }
    for &x in &fin_a {
        for &y in &fin_b {
            candidates.push(pair_cost(x, y));
        }
    }
    candidates.sort();
    candidates.dedup();
    candidates
        .into_iter()
        .find(|&r| r >= infinite_cost && finite_matching_feasible(&fin_a, &fin_b, r))
}

fn pair_cost(x: &RationalBar, y: &RationalBar) -> Rational64 {
    let db = (x.birth - y.birth).abs();
    let dd = (x.death.unwrap() - y.death.unwrap()).abs();
    db.max(dd)
}

/// Can every finite bar either be matched within `r` or retired to the
/// diagonal (half-length ≤ r)?  Uses the augmented bipartite graph where
/// each bar also has a diagonal partner vertex on the opposite side, and
/// asks for a perfect matching.
fn finite_matching_feasible(a: &[&RationalBar], b: &[&RationalBar], r: Rational64) -> bool {
    let half = Rational64::new(1, 2);
    let (na, nb) = (a.len(), b.len());
    // left vertices: 0..na = a-bars, na..na+nb = diagonal partners of b-bars
    // right vertices: 0..nb = b-bars, nb..nb+na = diagonal partners of a-bars
    let n_left = na + nb;
    let n_right = nb + na;
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n_left];
    for i in 0..na {
        for (j, &bar_b) in b.iter().enumerate() {
            if pair_cost(a[i], bar_b) <= r {
                adj[i].push(j);
            }
        }
        if a[i].length().unwrap() * half <= r {
            adj[i].push(nb + i);
        }
    }
    for j in 0..nb {
        if b[j].length().unwrap() * half <= r {
            adj[na + j].push(j);
        }
        for i in 0..na {
            adj[na + j].push(nb + i); // diagonal ↔ diagonal is free
        }
    }
    let mut match_a: Vec<Option<usize>> = vec![None; n_left];
    let mut match_b: Vec<Option<usize>> = vec![None; n_right];
    let mut matched = 0;
    for ai in 0..n_left {
        let mut seen = vec![false; n_right];
        if augment(ai, &adj, &mut match_a, &mut match_b, &mut seen) {
            matched += 1;
        }
    }
    matched == n_left
}

fn augment(
    ai: usize,
    adj: &[Vec<usize>],
    match_a: &mut [Option<usize>],
    match_b: &mut [Option<usize>],
    seen: &mut [bool],
) -> bool {
    for &j in &adj[ai] {
        if seen[j] {
            continue;
        }
        seen[j] = true;
        let free = match match_b[j] {
            None => true,
            Some(other) => augment(other, adj, match_a, match_b, seen),
        };
        if free {
            match_b[j] = Some(ai);
            match_a[ai] = Some(j);
            return true;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational64 {
        Rational64::new(n, d)
    }

    fn interval_module(
        values: &[Rational64],
        bars: &[(usize, Option<usize>)],
    ) -> FinitePersistenceModule {
        // direct sum of interval modules given by (birth level, death level)
        let m = values.len();
        let mut dims = vec![0usize; m];
        for (l, dim) in dims.iter_mut().enumerate() {
            for &(b, d) in bars {
                if b <= l && d.is_none_or(|d| l < d) {
                    *dim += 1;
                }
            }
        }
        let mut steps = Vec::new();
        for l in 0..m - 1 {
            let mut step = BitMat::zeros(dims[l + 1], dims[l]);
            let alive = |lev: usize| {
                bars.iter()
                    .enumerate()
                    .filter(|(_, &(b, d))| b <= lev && d.is_none_or(|d| lev < d))
                    .map(|(i, _)| i)
                    .collect::<Vec<_>>()
            };
            let now = alive(l);
            let next = alive(l + 1);
            for (col, bar) in now.iter().enumerate() {
                if let Some(row) = next.iter().position(|b| b == bar) {
                    step.set(row, col, true);
                }
            }
            steps.push(step);
        }
        FinitePersistenceModule::new(values.to_vec(), dims, steps).unwrap()
    }

    #[test]
    fn barcode_of_interval_sum() {
        let values = [q(0, 1), q(3, 10), q(9, 10), q(3, 2)];
        let m = interval_module(&values, &[(0, None), (1, Some(2)), (0, Some(3))]);
        let bars = m.barcode().unwrap();
        assert_eq!(
            bars,
            vec![
                RationalBar { birth: q(0, 1), death: None },
                RationalBar { birth: q(0, 1), death: Some(q(3, 2)) },
                RationalBar { birth: q(3, 10), death: Some(q(9, 10)) },
            ]
        );
        assert_eq!(m.boundary_depth().unwrap(), q(3, 2));
    }

    #[test]
    fn infinity_module_keeps_only_infinite_bars() {
        let values = [q(0, 1), q(3, 10), q(9, 10)];
        let m = interval_module(&values, &[(0, None), (1, Some(2)), (1, None)]);
        let inf = m.infinity_module().unwrap();
        let bars = inf.barcode().unwrap();
        assert_eq!(
            bars,
            vec![
                RationalBar { birth: q(0, 1), death: None },
                RationalBar { birth: q(3, 10), death: None },
            ]
        );
        // idempotent
        let inf2 = inf.infinity_module().unwrap();
        assert_eq!(inf2.barcode().unwrap(), bars);
    }

    #[test]
    fn single_finite_bar_has_zero_infinite_part() {
        let values = [q(0, 1), q(1, 1)];
        let m = interval_module(&values, &[(0, Some(1))]);
        let inf = m.infinity_module().unwrap();
        assert!(inf.barcode().unwrap().is_empty());
        assert_eq!(inf.dims(), &[0, 0]);
    }

    #[test]
    fn bottleneck_betwen_module_and_infinite_part_is_half_beta() {
        let values = [q(0, 1), q(3, 10), q(9, 10), q(3, 2)];
        let m = interval_module(&values, &[(0, None), (1, Some(3)), (1, Some(2))]);
        let inf = m.infinity_module().unwrap();
        let d = exact_bottleneck(&m.barcode().unwrap(), &inf.barcode().unwrap()).unwrap();
        // longest finite bar [0.3, 1.5): half-length 0.6
        assert_eq!(d, q(3, 5));
        assert_eq!(d * 2, m.boundary_depth().unwrap());
    }

    #[test]
    fn bottleneck_matches_shifted_bars() {
        let a = vec![
            RationalBar { birth: q(0, 1), death: None },
            RationalBar { birth: q(0, 1), death: Some(q(1, 1)) },
        ];
        let b = vec![
            RationalBar { birth: q(1, 10), death: None },
            RationalBar { birth: q(0, 1), death: Some(q(6, 5)) },
        ];
        // match bars pairwise: max(1/10, 1/5) = 1/5
        assert_eq!(exact_bottleneck(&a, &b), Some(q(1, 5)));
        // equal infinite counts: the lone finite bar retires at half-length
        let c = vec![RationalBar { birth: q(0, 1), death: None }];
        assert_eq!(exact_bottleneck(&a, &c), Some(q(1, 2)));
        // mismatched infinite counts: no finite radius
        let f = vec![RationalBar { birth: q(0, 1), death: Some(q(1, 1)) }];
        assert_eq!(exact_bottleneck(&a, &f), None);
    }

    #[test]
    fn zero_module_is_well_formed() {
        let z = FinitePersistenceModule::zero(vec![q(0, 1), q(1, 1)]).unwrap();
        assert!(z.barcode().unwrap().is_empty());
        assert_eq!(z.boundary_depth().unwrap(), q(0, 1));
    }
}
