//! Systems of persistence modules `V^{ij}` with bilinear products
//! `V^{ij}_s ⊗ V^{jk}_t → V^{ik}_{ℓ(s+t)}` and distinguished units, together
//! with the exhaustive axiom validator and the checks built on top of it:
//! unit levels, the γ invariant, unit-induced interleavings, and the
//! boundary-depth inequality `β ≤ γ` in exact arithmetic.
//!
//! Conventions: all modules share one critical grid starting at 0; the
//! product target level `ℓ(s+t)` is the largest critical value ≤ `s+t`
//! (clamped to the top, where every module has stabilized).

use num_rational::Rational64;

use crate::algebra::module::{exact_bottleneck, FinitePersistenceModule};
use crate::error::{Error, Result};
use crate::gf2::{BitMat, BitVec};

/// A finite system of persistence modules with products and units.
#[derive(Clone, Debug)]
pub struct ProductSystem {
    n: usize,
    grid: Vec<Rational64>,
    /// `modules[i * n + j]` is `V^{ij}`.
    modules: Vec<FinitePersistenceModule>,
    /// `units[i * n + j]` is an element of the top level of `V^{ij}`.
    units: Vec<BitVec>,
    /// `products[(i * n + j) * n + k][s * m + t]` maps
    /// `V^{ij}_{t_s} ⊗ V^{jk}_{t_t}` (tensor basis `a * dim_t + b`) into
    /// `V^{ik}` at level `ℓ(t_s + t_t)`.
    products: Vec<Vec<BitMat>>,
}

impl ProductSystem {
    pub fn new(
        n: usize,
        grid: Vec<Rational64>,
        modules: Vec<FinitePersistenceModule>,
        units: Vec<BitVec>,
        products: Vec<Vec<BitMat>>,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::MalformedSystem("empty index set".into()));
        }
        if grid.first() != Some(&Rational64::from_integer(0)) {
            return Err(Error::MalformedSystem(
                "critical grid must start at 0".into(),
            ));
        }
        if modules.len() != n * n || units.len() != n * n || products.len() != n * n * n {
            return Err(Error::MalformedSystem(format!(
                "expected {}/{}/{} modules/units/product tables, got {}/{}/{}",
                n * n,
                n * n,
                n * n * n,
                modules.len(),
                units.len(),
                products.len()
            )));
        }
        let m = grid.len();
        for (idx, module) in modules.iter().enumerate() {
            if module.values() != grid.as_slice() {
                return Err(Error::MalformedSystem(format!(
                    "module {} does not share the system grid",
                    pair_name(idx, n)
                )));
            }
        }
        for (idx, u) in units.iter().enumerate() {
            if u.len() != modules[idx].dim_at(m - 1) {
                return Err(Error::MalformedSystem(format!(
                    "unit of {} has wrong length",
                    pair_name(idx, n)
                )));
            }
        }
        let sys = ProductSystem { n, grid, modules, units, products };
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for s in 0..m {
                        for t in 0..m {
                            let mat = sys.product(i, j, k, s, t);
                            let rows = sys.module(i, k).dim_at(sys.level_sum(s, t));
                            let cols =
                                sys.module(i, j).dim_at(s) * sys.module(j, k).dim_at(t);
                            if mat.n_rows() != rows || mat.n_cols() != cols {
                                return Err(Error::MalformedSystem(format!(
                                    "product ({i},{j},{k}) at levels ({s},{t}) is \
                                     {}x{}, expected {rows}x{cols}",
                                    mat.n_rows(),
                                    mat.n_cols()
                                )));
                            }
                        }
                    }
                }
            }
        }
        Ok(sys)
    }

    pub fn n_indices(&self) -> usize {
        self.n
    }

    pub fn grid(&self) -> &[Rational64] {
        &self.grid
    }

    pub fn n_levels(&self) -> usize {
        self.grid.len()
    }

    pub fn module(&self, i: usize, j: usize) -> &FinitePersistenceModule {
        &self.modules[i * self.n + j]
    }

    pub fn unit(&self, i: usize, j: usize) -> &BitVec {
        &self.units[i * self.n + j]
    }

    pub fn product(&self, i: usize, j: usize, k: usize, s: usize, t: usize) -> &BitMat {
        &self.products[(i * self.n + j) * self.n + k][s * self.grid.len() + t]
    }

    pub(crate) fn units_raw(&self) -> &[BitVec] {
        &self.units
    }

    pub(crate) fn products_raw(&self) -> &[Vec<BitMat>] {
        &self.products
    }

    pub(crate) fn modules_raw(&self) -> &[FinitePersistenceModule] {
        &self.modules
    }

    /// Index of the largest critical value ≤ the given value (the value must
    /// be ≥ 0 = the first critical value).
    pub fn level_of_value(&self, v: Rational64) -> usize {
        let mut idx = 0;
        for (l, g) in self.grid.iter().enumerate() {
            if *g <= v {
                idx = l;
            }
        }
        idx
    }

    /// Target level of a product from levels `s` and `t`.
    pub fn level_sum(&self, s: usize, t: usize) -> usize {
        self.level_of_value(self.grid[s] + self.grid[t])
    }

    /// The unique preimage at `level` of the diagonal unit `u_{jj}`
    /// (diagonal restriction maps are isomorphisms on valid systems).
    fn diagonal_unit_at(&self, j: usize, level: usize) -> Result<BitVec> {
        self.module(j, j)
            .map_to_top(level)
            .solve(self.unit(j, j))
            .ok_or_else(|| {
                Error::MalformedSystem(format!(
                    "diagonal unit of ({j},{j}) has no preimage at level {level}"
                ))
            })
    }

    /// Matrix of `v ↦ μ(v ⊗ w)` out of `V^{ij}_s`, for a fixed
    /// `w ∈ V^{jk}_t`.
    fn right_mult(&self, i: usize, j: usize, k: usize, s: usize, t: usize, w: &BitVec) -> BitMat {
        let mat = self.product(i, j, k, s, t);
        let d_s = self.module(i, j).dim_at(s);
        let d_t = self.module(j, k).dim_at(t);
        let mut out = BitMat::zeros(mat.n_rows(), d_s);
        for a in 0..d_s {
            let mut col = BitVec::zeros(mat.n_rows());
            for b in w.ones() {
                col.xor_assign(&mat.col(a * d_t + b));
            }
            for r in col.ones() {
                out.set(r, a, true);
            }
        }
        out
    }

    /// Matrix of `v ↦ μ(w ⊗ v)` out of `V^{jk}_t`, for a fixed
    /// `w ∈ V^{ij}_s`.
    fn left_mult(&self, i: usize, j: usize, k: usize, s: usize, t: usize, w: &BitVec) -> BitMat {
        let mat = self.product(i, j, k, s, t);
        let d_t = self.module(j, k).dim_at(t);
        let mut out = BitMat::zeros(mat.n_rows(), d_t);
        for b in 0..d_t {
            let mut col = BitVec::zeros(mat.n_rows());
            for a in w.ones() {
                col.xor_assign(&mat.col(a * d_t + b));
            }
            for r in col.ones() {
                out.set(r, b, true);
            }
        }
        out
    }

    /// Exhaustive axiom check.  The first violated condition is reported
    /// with the indices (and, for element-wise failures, the basis vector)
    /// witnessing it.
    pub fn validate(&self) -> Result<()> {
        self.check_diagonals()?;
        self.check_associativity()?;
        self.check_restriction_morphism()?;
        self.check_unit_action()?;
        self.check_unit_coherence()?;
        self.check_top_isomorphisms()?;
        Ok(())
    }

    /// Condition: diagonal modules have their whole spectrum at 0 and are
    /// unital rings at the top level.
    fn check_diagonals(&self) -> Result<()> {
        let m = self.grid.len();
        let top = m - 1;
        for i in 0..self.n {
            let module = self.module(i, i);
            for (l, step) in module.steps().iter().enumerate() {
                let square = step.n_rows() == step.n_cols();
                if !square || step.rank() != step.n_rows() {
                    return Err(Error::MalformedSystem(format!(
                        "diagonal purity fails: restriction of ({i},{i}) from level \
                         {l} is not an isomorphism"
                    )));
                }
            }
            let u = self.unit(i, i);
            let left = self.left_mult(i, i, i, top, top, u);
            let right = self.right_mult(i, i, i, top, top, u);
            let id = BitMat::identity(module.dim_at(top));
            if left != id {
                return Err(Error::MalformedSystem(format!(
                    "unitality fails: left multiplication by the unit of ({i},{i}) \
                     is not the identity"
                )));
            }
            if right != id {
                return Err(Error::MalformedSystem(format!(
                    "unitality fails: right multiplication by the unit of ({i},{i}) \
                     is not the identity"
                )));
            }
        }
        Ok(())
    }

    /// Condition: the product is associative after pushing both bracketings
    /// to the common level `ℓ(s+t+u)`.
    fn check_associativity(&self) -> Result<()> {
        let m = self.grid.len();
        for i in 0..self.n {
            for j in 0..self.n {
                for k in 0..self.n {
                    for l in 0..self.n {
                        for s in 0..m {
                            for t in 0..m {
                                for u in 0..m {
                                    self.assoc_at(i, j, k, l, s, t, u)?;
                                }
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    #[allow(clippy::too_many_arguments)]
    fn assoc_at(
        &self,
        i: usize,
        j: usize,
        k: usize,
        l: usize,
        s: usize,
        t: usize,
        u: usize,
    ) -> Result<()> {
        let d_u = self.module(k, l).dim_at(u);
        let d_s = self.module(i, j).dim_at(s);
        if d_s * self.module(j, k).dim_at(t) * d_u == 0 {
            return Ok(());
        }
        let q = self.level_of_value(self.grid[s] + self.grid[t] + self.grid[u]);
        // ((a b) c): μ1 at (s, t), then μ2 at (ℓ(s+t), u)
        let p1 = self.level_sum(s, t);
        let mu1 = self.product(i, j, k, s, t);
        let mu2 = self.product(i, k, l, p1, u);
        let lhs_target = self.level_of_value(self.grid[p1] + self.grid[u]);
        let lhs = self
            .module(i, l)
            .map(lhs_target, q)
            .mul_mat(&mu2.mul_mat(&mu1.kron(&BitMat::identity(d_u))));
        // (a (b c)): μ3 at (t, u), then μ4 at (s, ℓ(t+u))
        let p2 = self.level_sum(t, u);
        let mu3 = self.product(j, k, l, t, u);
        let mu4 = self.product(i, j, l, s, p2);
        let rhs_target = self.level_of_value(self.grid[s] + self.grid[p2]);
        let rhs = self
            .module(i, l)
            .map(rhs_target, q)
            .mul_mat(&mu4.mul_mat(&BitMat::identity(d_s).kron(mu3)));
        if lhs != rhs {
            return Err(Error::MalformedSystem(format!(
                "associativity fails for indices ({i},{j},{k},{l}) at levels \
                 ({s},{t},{u})"
            )));
        }
        Ok(())
    }

    /// Condition: the product commutes with the restriction maps in each
    /// tensor factor (checked on adjacent level steps, which generate all
    /// restrictions).
    fn check_restriction_morphism(&self) -> Result<()> {
        let m = self.grid.len();
        for i in 0..self.n {
            for j in 0..self.n {
                for k in 0..self.n {
                    for s in 0..m {
                        for t in 0..m {
                            let mu = self.product(i, j, k, s, t);
                            if s + 1 < m {
                                let p = self.level_sum(s, t);
                                let p_next = self.level_sum(s + 1, t);
                                let lhs = self.module(i, k).map(p, p_next).mul_mat(mu);
                                let step = &self.module(i, j).steps()[s];
                                let d_t = self.module(j, k).dim_at(t);
                                let rhs = self
                                    .product(i, j, k, s + 1, t)
                                    .mul_mat(&step.kron(&BitMat::identity(d_t)));
                                if lhs != rhs {
                                    return Err(Error::MalformedSystem(format!(
                                        "product of ({i},{j},{k}) does not commute \
                                         with restriction in the first factor at \
                                         levels ({s},{t})"
                                    )));
                                }
                            }
                            if t + 1 < m {
                                let p = self.level_sum(s, t);
                                let p_next = self.level_sum(s, t + 1);
                                let lhs = self.module(i, k).map(p, p_next).mul_mat(mu);
                                let step = &self.module(j, k).steps()[t];
                                let d_s = self.module(i, j).dim_at(s);
                                let rhs = self
                                    .product(i, j, k, s, t + 1)
                                    .mul_mat(&BitMat::identity(d_s).kron(step));
                                if lhs != rhs {
                                    return Err(Error::MalformedSystem(format!(
                                        "product of ({i},{j},{k}) does not commute \
                                         with restriction in the second factor at \
                                         levels ({s},{t})"
                                    )));
                                }
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Condition: multiplying by the level-`a` representative of a diagonal
    /// unit is exactly the restriction map by `a`, on both sides.
    fn check_unit_action(&self) -> Result<()> {
        let m = self.grid.len();
        for i in 0..self.n {
            for j in 0..self.n {
                for a in 0..m {
                    let e_right = self.diagonal_unit_at(j, a)?;
                    let e_left = self.diagonal_unit_at(i, a)?;
                    for s in 0..m {
                        let target = self.level_sum(s, a);
                        let restrict = self.module(i, j).map(s, target);
                        let right = self.right_mult(i, j, j, s, a, &e_right);
                        if right != restrict {
                            return Err(Error::MalformedSystem(format!(
                                "unit action fails: right multiplication on ({i},{j}) \
                                 by the ({j},{j}) unit at level {a} is not the \
                                 restriction from level {s}"
                            )));
                        }
                        let left = self.left_mult(i, i, j, a, s, &e_left);
                        if left != restrict {
                            return Err(Error::MalformedSystem(format!(
                                "unit action fails: left multiplication on ({i},{j}) \
                                 by the ({i},{i}) unit at level {a} is not the \
                                 restriction from level {s}"
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Condition: units compose — `μ(u_{ij} ⊗ u_{jk}) = u_{ik}` at the top.
    fn check_unit_coherence(&self) -> Result<()> {
        let top = self.grid.len() - 1;
        for i in 0..self.n {
            for j in 0..self.n {
                for k in 0..self.n {
                    let got = self
                        .right_mult(i, j, k, top, top, self.unit(j, k))
                        .mul_vec(self.unit(i, j));
                    if &got != self.unit(i, k) {
                        return Err(Error::MalformedSystem(format!(
                            "unit coherence fails: u({i},{j})·u({j},{k}) ≠ u({i},{k})"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Condition: at the top level, right multiplication by `u_{jk}` and by
    /// `u_{kj}` are mutually inverse isomorphisms `V^{ij}_∞ ↔ V^{ik}_∞`.
    fn check_top_isomorphisms(&self) -> Result<()> {
        let top = self.grid.len() - 1;
        for i in 0..self.n {
            for j in 0..self.n {
                for k in 0..self.n {
                    let fwd = self.right_mult(i, j, k, top, top, self.unit(j, k));
                    let back = self.right_mult(i, k, j, top, top, self.unit(k, j));
                    let d = self.module(i, j).dim_at(top);
                    if back.mul_mat(&fwd) != BitMat::identity(d) {
                        return Err(Error::MalformedSystem(format!(
                            "top-level multiplication by u({j},{k}) then u({k},{j}) \
                             is not the identity on ({i},{j})"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Smallest critical value at which the unit of `V^{ij}` is present,
    /// i.e. lies in the image of the restriction to the top level.
    pub fn unit_level(&self, i: usize, j: usize) -> Result<Rational64> {
        let module = self.module(i, j);
        let u = self.unit(i, j);
        for (l, value) in self.grid.iter().enumerate() {
            if module.map_to_top(l).col_space_contains(u) {
                return Ok(*value);
            }
        }
        Err(Error::MalformedSystem(format!(
            "unit of ({i},{j}) is not in the image of any level"
        )))
    }

    /// `γ(V^{ij}) = c_{ij} + c_{ji}`.
    pub fn system_gamma(&self, i: usize, j: usize) -> Result<Rational64> {
        Ok(self.unit_level(i, j)? + self.unit_level(j, i)?)
    }
}

fn pair_name(idx: usize, n: usize) -> String {
    format!("({},{})", idx / n, idx % n)
}

/// Certificate that the unit-induced morphisms interleave `V^{ij}` and
/// `V^{ik}`.
#[derive(Clone, Debug)]
pub struct InterleavingCertificate {
    /// The verified shift `c_{jk} + c_{kj}`.
    pub parameter: Rational64,
    pub c_jk: Rational64,
    pub c_kj: Rational64,
}

/// Build the morphisms `· u_{jk}: V^{ij} → V^{ik}` and `· u_{kj}` back, and
/// verify that both composites, pushed to the full shift, equal the
/// restriction by `c_{jk} + c_{kj}`.
pub fn unit_interleaving(
    sys: &ProductSystem,
    i: usize,
    j: usize,
    k: usize,
) -> Result<InterleavingCertificate> {
    let c_jk = sys.unit_level(j, k)?;
    let c_kj = sys.unit_level(k, j)?;
    let l_jk = sys.level_of_value(c_jk);
    let l_kj = sys.level_of_value(c_kj);
    let w_jk = sys
        .module(j, k)
        .map_to_top(l_jk)
        .solve(sys.unit(j, k))
        .ok_or_else(|| {
            Error::MalformedSystem(format!("unit of ({j},{k}) missing at its own level"))
        })?;
    let w_kj = sys
        .module(k, j)
        .map_to_top(l_kj)
        .solve(sys.unit(k, j))
        .ok_or_else(|| {
            Error::MalformedSystem(format!("unit of ({k},{j}) missing at its own level"))
        })?;
    let m = sys.n_levels();
    for s in 0..m {
        // V^{ij}_s → V^{ik}_{ℓ(s + c_jk)} → V^{ij}, pushed to ℓ(s + c_jk + c_kj)
        let p = sys.level_sum(s, l_jk);
        let q = sys.level_of_value(sys.grid()[s] + c_jk + c_kj);
        let phi = sys.right_mult(i, j, k, s, l_jk, &w_jk);
        let psi = sys.right_mult(i, k, j, p, l_kj, &w_kj);
        let pushed = sys
            .module(i, j)
            .map(sys.level_sum(p, l_kj), q)
            .mul_mat(&psi.mul_mat(&phi));
        if pushed != sys.module(i, j).map(s, q) {
            return Err(Error::MalformedSystem(format!(
                "interleaving composite on ({i},{j}) at level {s} is not the \
                 restriction by c({j},{k}) + c({k},{j})"
            )));
        }
        // and the other way around, starting from V^{ik}
        let p2 = sys.level_sum(s, l_kj);
        let phi2 = sys.right_mult(i, k, j, s, l_kj, &w_kj);
        let psi2 = sys.right_mult(i, j, k, p2, l_jk, &w_jk);
        let pushed2 = sys
            .module(i, k)
            .map(sys.level_sum(p2, l_jk), q)
            .mul_mat(&psi2.mul_mat(&phi2));
        if pushed2 != sys.module(i, k).map(s, q) {
            return Err(Error::MalformedSystem(format!(
                "interleaving composite on ({i},{k}) at level {s} is not the \
                 restriction by c({j},{k}) + c({k},{j})"
            )));
        }
    }
    Ok(InterleavingCertificate { parameter: c_jk + c_kj, c_jk, c_kj })
}

/// Result of the exact boundary-depth comparison on one module of a system.
#[derive(Clone, Debug)]
pub struct KsAlgebraReport {
    pub beta: Rational64,
    pub gamma: Rational64,
    /// `β ≤ γ`, compared exactly.
    pub holds: bool,
    /// Interleaving distance to the infinite part.
    pub distance_to_infinity: Rational64,
    /// `2·d_I = β`, compared exactly.
    pub distance_doubles_to_beta: bool,
}

/// Exact check of `β(V^{ij}) ≤ γ(V^{ij})` plus the identity
/// `2·d_I(V, V^∞) = β`.
pub fn ks_check(sys: &ProductSystem, i: usize, j: usize) -> Result<KsAlgebraReport> {
    let module = sys.module(i, j);
    let beta = module.boundary_depth()?;
    let gamma = sys.system_gamma(i, j)?;
    let bars = module.barcode()?;
    let inf_bars = module.infinity_module()?.barcode()?;
    let d = exact_bottleneck(&bars, &inf_bars).ok_or_else(|| {
        Error::InternalInvariant("infinite bars changed under the infinite-part functor".into())
    })?;
    Ok(KsAlgebraReport {
        beta,
        gamma,
        holds: beta <= gamma,
        distance_to_infinity: d,
        distance_doubles_to_beta: d * 2 == beta,
    })
}
