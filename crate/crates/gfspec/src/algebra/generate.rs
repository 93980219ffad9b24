//! Seeded generation of product systems that satisfy every axiom by
//! construction, plus a mutation channel producing corrupted systems that
//! the validator must reject.
//!
//! The construction: each `V^{ij}` is a one-dimensional "core" interval
//! `[c_{ij}, ∞)` plus (off the diagonal) a few short finite bars.  Products
//! multiply cores like scalars, let diagonal cores act on finite bars by
//! restriction, and annihilate everything else.  Consistency requires
//! exactly two things, both enforced here: the core birth levels satisfy
//! the rounded triangle inequality `c_{ik} ≤ ℓ(c_{ij} + c_{jk})`, and every
//! finite bar is shorter than every γ-value its module can be pushed
//! through (which is also what makes `β ≤ γ` hold).  A change of basis by
//! random invertible matrices at every level hides the construction from
//! the validator.

use num_rational::Rational64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::algebra::module::FinitePersistenceModule;
use crate::algebra::system::ProductSystem;
use crate::error::{Error, Result};
use crate::gf2::{BitMat, BitVec};

/// Size bounds for generated systems.
#[derive(Clone, Copy, Debug)]
pub struct SystemSize {
    /// Number of indices (1..=3).
    pub indices: usize,
    /// Number of critical values (2..=6).
    pub levels: usize,
    /// Finite bars attempted per off-diagonal module (0..=3).
    pub max_extra_bars: usize,
}

impl Default for SystemSize {
    fn default() -> Self {
        SystemSize { indices: 2, levels: 4, max_extra_bars: 2 }
    }
}

struct Blueprint {
    n: usize,
    grid: Vec<Rational64>,
    /// Core birth level (grid index) of each `V^{ij}`.
    core_level: Vec<usize>,
    /// Finite bars `(birth level, death level)` of each `V^{ij}`.
    bars: Vec<Vec<(usize, usize)>>,
}

impl Blueprint {
    fn level_of_value(&self, v: Rational64) -> usize {
        let mut idx = 0;
        for (l, g) in self.grid.iter().enumerate() {
            if *g <= v {
                idx = l;
            }
        }
        idx
    }

    fn level_sum(&self, s: usize, t: usize) -> usize {
        self.level_of_value(self.grid[s] + self.grid[t])
    }

    fn core(&self, i: usize, j: usize) -> usize {
        self.core_level[i * self.n + j]
    }

    /// Basis of `V^{ij}` at a level: `None` entries won't occur — the list
    /// holds `Member::Core` first (if the core is born) then the live bars
    /// by position in the bar list.
    fn basis_at(&self, i: usize, j: usize, level: usize) -> Vec<Member> {
        let mut out = Vec::new();
        if level >= self.core(i, j) {
            out.push(Member::Core);
        }
        for (pos, &(b, d)) in self.bars[i * self.n + j].iter().enumerate() {
            if b <= level && level < d {
                out.push(Member::Bar(pos));
            }
        }
        out
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Member {
    Core,
    Bar(usize),
}

/// Deterministically generate a system that passes `validate`.
pub fn random_system(seed: u64, size: &SystemSize) -> Result<ProductSystem> {
    if size.indices == 0 || size.indices > 3 {
        return Err(Error::Argument("index count must be 1..=3".into()));
    }
    if size.levels < 2 || size.levels > 6 {
        return Err(Error::Argument("level count must be 2..=6".into()));
    }
    if size.max_extra_bars > 3 {
        return Err(Error::Argument("at most 3 finite bars per module".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9e3779b97f4a7c15));
    let blueprint = make_blueprint(&mut rng, size);
    let system = assemble(&blueprint)?;
    scramble(system, &mut rng)
}

fn make_blueprint(rng: &mut ChaCha8Rng, size: &SystemSize) -> Blueprint {
    let n = size.indices;
    let m = size.levels;
    // critical values in exact twentieths, t_1 = 0
    let mut grid = vec![Rational64::from_integer(0)];
    let mut acc = Rational64::from_integer(0);
    for _ in 1..m {
        acc += Rational64::new(rng.gen_range(1..=12), 20);
        grid.push(acc);
    }
    // core birth levels with the rounded triangle inequality closed off
    let mut core_level = vec![0usize; n * n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                core_level[i * n + j] = rng.gen_range(0..m);
            }
        }
    }
    let bp = |core_level: &[usize], i: usize, j: usize| core_level[i * n + j];
    loop {
        let mut changed = false;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let via = {
                        let tmp = Blueprint {
                            n,
                            grid: grid.clone(),
                            core_level: core_level.clone(),
                            bars: vec![Vec::new(); n * n],
                        };
                        tmp.level_of_value(
                            grid[bp(&core_level, i, j)] + grid[bp(&core_level, j, k)],
                        )
                    };
                    if via < core_level[i * n + k] {
                        core_level[i * n + k] = via;
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    let mut bars = vec![Vec::new(); n * n];
    {
        let bp_full = Blueprint {
            n,
            grid: grid.clone(),
            core_level: core_level.clone(),
            bars: vec![Vec::new(); n * n],
        };
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                // bars must die within every γ they can be pushed through
                let mut cap = grid[m - 1] + Rational64::from_integer(1);
                for k in 0..n {
                    if k != j {
                        let g = grid[bp_full
                            .level_of_value(grid[bp_full.core(j, k)] + grid[bp_full.core(k, j)])];
                        cap = cap.min(g);
                    }
                    if k != i {
                        let g = grid[bp_full
                            .level_of_value(grid[bp_full.core(i, k)] + grid[bp_full.core(k, i)])];
                        cap = cap.min(g);
                    }
                }
                for _ in 0..size.max_extra_bars {
                    let a = rng.gen_range(0..m - 1);
                    let deaths: Vec<usize> =
                        (a + 1..m).filter(|&d| grid[d] - grid[a] <= cap).collect();
                    if deaths.is_empty() {
                        continue;
                    }
                    let d = deaths[rng.gen_range(0..deaths.len())];
                    bars[i * n + j].push((a, d));
                }
                bars[i * n + j].sort();
            }
        }
    }
    Blueprint { n, grid, core_level, bars }
}

/// Build modules, units, and products in the canonical (unscrambled) basis.
fn assemble(bp: &Blueprint) -> Result<ProductSystem> {
    let n = bp.n;
    let m = bp.grid.len();
    let mut modules = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let dims: Vec<usize> = (0..m).map(|l| bp.basis_at(i, j, l).len()).collect();
            let mut steps = Vec::with_capacity(m - 1);
            for l in 0..m - 1 {
                let now = bp.basis_at(i, j, l);
                let next = bp.basis_at(i, j, l + 1);
                let mut step = BitMat::zeros(next.len(), now.len());
                for (col, member) in now.iter().enumerate() {
                    if let Some(row) = next.iter().position(|x| x == member) {
                        step.set(row, col, true);
                    }
                }
                steps.push(step);
            }
            modules.push(FinitePersistenceModule::new(bp.grid.clone(), dims, steps)?);
        }
    }
    let mut units = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let top = bp.basis_at(i, j, m - 1);
            let core_pos = top
                .iter()
                .position(|&x| x == Member::Core)
                .expect("cores are born by the top level");
            units.push(BitVec::unit(top.len(), core_pos));
        }
    }
    let mut products = Vec::with_capacity(n * n * n);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let mut table = Vec::with_capacity(m * m);
                for s in 0..m {
                    for t in 0..m {
                        let left = bp.basis_at(i, j, s);
                        let right = bp.basis_at(j, k, t);
                        let p = bp.level_sum(s, t);
                        let target = bp.basis_at(i, k, p);
                        let mut mat = BitMat::zeros(target.len(), left.len() * right.len());
                        for (a, ma) in left.iter().enumerate() {
                            for (b, mb) in right.iter().enumerate() {
                                let col = a * right.len() + b;
                                let image = match (ma, mb) {
                                    (Member::Core, Member::Core) => Some(Member::Core),
                                    // a diagonal core is the unit: it acts by
                                    // restriction on finite bars
                                    (Member::Core, Member::Bar(pos)) if i == j => {
                                        Some(Member::Bar(*pos))
                                    }
                                    (Member::Bar(pos), Member::Core) if j == k => {
                                        Some(Member::Bar(*pos))
                                    }
                                    _ => None,
                                };
                                if let Some(member) = image {
                                    if let Some(row) =
                                        target.iter().position(|x| *x == member)
                                    {
                                        mat.set(row, col, true);
                                    }
                                }
                            }
                        }
                        table.push(mat);
                    }
                }
                products.push(table);
            }
        }
    }
    ProductSystem::new(n, bp.grid.clone(), modules, units, products)
}

/// Build the canonical-basis system with the given core birth levels and
/// finite bars (no basis scramble).  `core_level` and `bars` are row-major
/// over index pairs.  Callers are responsible for choosing data that
/// satisfies the axioms; `validate` is the arbiter.
#[cfg(test)]
pub(crate) fn explicit_system(
    grid: Vec<Rational64>,
    core_level: Vec<usize>,
    bars: Vec<Vec<(usize, usize)>>,
) -> Result<ProductSystem> {
    let n = (core_level.len() as f64).sqrt() as usize;
    if n * n != core_level.len() || bars.len() != core_level.len() {
        return Err(Error::Argument("core levels must form a square table".into()));
    }
    assemble(&Blueprint { n, grid, core_level, bars })
}

fn random_invertible(rng: &mut ChaCha8Rng, d: usize) -> BitMat {
    if d == 0 {
        return BitMat::zeros(0, 0);
    }
    loop {
        let mut m = BitMat::zeros(d, d);
        for r in 0..d {
            for c in 0..d {
                m.set(r, c, rng.gen_bool(0.5));
            }
        }
        if m.rank() == d {
            return m;
        }
    }
}

/// Conjugate every level of every module by a random invertible matrix.
/// This is an isomorphism of systems, so validity is preserved exactly.
fn scramble(sys: ProductSystem, rng: &mut ChaCha8Rng) -> Result<ProductSystem> {
    let n = sys.n_indices();
    let m = sys.n_levels();
    let mut g: Vec<Vec<BitMat>> = Vec::with_capacity(n * n);
    let mut g_inv: Vec<Vec<BitMat>> = Vec::with_capacity(n * n);
    for idx in 0..n * n {
        let module = &sys.modules_raw()[idx];
        let mut per_level = Vec::with_capacity(m);
        let mut per_level_inv = Vec::with_capacity(m);
        for l in 0..m {
            let gm = random_invertible(rng, module.dim_at(l));
            per_level_inv.push(gm.inverse().expect("constructed invertible"));
            per_level.push(gm);
        }
        g.push(per_level);
        g_inv.push(per_level_inv);
    }
    let mut modules = Vec::with_capacity(n * n);
    for idx in 0..n * n {
        let module = &sys.modules_raw()[idx];
        let steps: Vec<BitMat> = (0..m - 1)
            .map(|l| g[idx][l + 1].mul_mat(&module.steps()[l]).mul_mat(&g_inv[idx][l]))
            .collect();
        modules.push(FinitePersistenceModule::new(
            module.values().to_vec(),
            module.dims().to_vec(),
            steps,
        )?);
    }
    let units: Vec<BitVec> = (0..n * n)
        .map(|idx| g[idx][m - 1].mul_vec(&sys.units_raw()[idx]))
        .collect();
    let mut products = Vec::with_capacity(n * n * n);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let mut table = Vec::with_capacity(m * m);
                for s in 0..m {
                    for t in 0..m {
                        let mu = sys.product(i, j, k, s, t);
                        let p = sys.level_sum(s, t);
                        let back = g_inv[i * n + j][s].kron(&g_inv[j * n + k][t]);
                        table.push(g[i * n + k][p].mul_mat(&mu.mul_mat(&back)));
                    }
                }
                products.push(table);
            }
        }
    }
    ProductSystem::new(n, sys.grid().to_vec(), modules, units, products)
}

/// Ways a system can be corrupted so that `validate` must reject it.
const MUTATIONS: [&str; 4] = [
    "flip a unit bit",
    "clear a top-level product",
    "break a diagonal restriction",
    "zero a populated product table entry",
];

/// Corrupt a valid system.  Every variant produced here violates at least
/// one axiom, so `validate` is guaranteed to fail on the output.  Returns
/// the mutated system and a description of the applied corruption.
pub fn mutate_system(sys: &ProductSystem, seed: u64) -> Result<(ProductSystem, &'static str)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x2545f4914f6cdd1d) ^ 0x5d);
    let n = sys.n_indices();
    let m = sys.n_levels();
    let top = m - 1;
    let mut modules = sys.modules_raw().to_vec();
    let mut units = sys.units_raw().to_vec();
    let mut products = sys.products_raw().to_vec();
    let variant = loop {
        match rng.gen_range(0..MUTATIONS.len()) {
            // breaks unit coherence (or unitality when i = j)
            0 => {
                let idx = rng.gen_range(0..n * n);
                if units[idx].is_empty() {
                    continue;
                }
                let bit = rng.gen_range(0..units[idx].len());
                let old = units[idx].get(bit);
                units[idx].set(bit, !old);
                break 0;
            }
            // μ(u ⊗ u) can no longer hit the target unit
            1 => {
                let i = rng.gen_range(0..n);
                let j = rng.gen_range(0..n);
                let k = rng.gen_range(0..n);
                let slot = (i * n + j) * n + k;
                let mat = &products[slot][top * m + top];
                if mat.n_rows() == 0 || mat.n_cols() == 0 {
                    continue;
                }
                products[slot][top * m + top] = BitMat::zeros(mat.n_rows(), mat.n_cols());
                break 1;
            }
            // diagonal purity: make one restriction non-invertible
            2 => {
                let i = rng.gen_range(0..n);
                if m < 2 {
                    continue;
                }
                let idx = i * n + i;
                let l = rng.gen_range(0..m - 1);
                let step = &modules[idx].steps()[l];
                if step.n_rows() == 0 {
                    continue;
                }
                let mut steps = modules[idx].steps().to_vec();
                steps[l] = BitMat::zeros(step.n_rows(), step.n_cols());
                modules[idx] = FinitePersistenceModule::new(
                    modules[idx].values().to_vec(),
                    modules[idx].dims().to_vec(),
                    steps,
                )?;
                break 2;
            }
            // erase a product the restriction-morphism condition relies on
            _ => {
                let mut populated = Vec::new();
                for (slot, slot_products) in products.iter().enumerate() {
                    for (st, mat) in slot_products.iter().enumerate() {
                        let (s, t) = (st / m, st % m);
                        if (s, t) != (top, top) && mat.rank() > 0 {
                            populated.push((slot, st));
                        }
                    }
                }
                if populated.is_empty() {
                    continue;
                }
                let (slot, st) = populated[rng.gen_range(0..populated.len())];
                let mat = &products[slot][st];
                products[slot][st] = BitMat::zeros(mat.n_rows(), mat.n_cols());
                break 3;
            }
        }
    };
    let mutated = ProductSystem::new(n, sys.grid().to_vec(), modules, units, products)?;
    Ok((mutated, MUTATIONS[variant]))
}
