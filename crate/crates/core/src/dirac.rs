//! The k-Dirac operators, monogenic kernels, tableau filtrations and the
//! Cartan test.
//!
//! `D_iΨ = Σ_α ε_α · L_{αi}Ψ` on the nilpotent group and the flat operator
//! `E_iψ = Σ_α ε_α · ∂_{x_{αi}}ψ` on polynomials in `x` alone. The tableau
//! `A^{(i)}` is realized as the monogenic space of weighted degree `i + 1`
//! and `A^{(i)}_j` is the joint kernel of the first `j` fields of a
//! [`BasisOrder`] on it.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::clifford::{build_gamma, GammaRep};
use crate::error::{Error, Result};
use crate::exactnum::{is_zero_vec, Echelon, SparseMat, Vector};
use crate::memo::Memo;
use crate::nilframe::{apply_dy, apply_l, spin_diagonal_matrix, FieldId, Frame};
use crate::wpoly::{binomial_signed, HomBasis, Params, PolySpinor};

/// A subspace of a homogeneous component, given by independent coordinate
/// vectors.
#[derive(Clone, Debug)]
pub struct Subspace {
    ambient: Arc<HomBasis>,
    basis: Vec<Vector>,
}

impl Subspace {
    pub fn new(ambient: Arc<HomBasis>, basis: Vec<Vector>) -> Self {
        Subspace { ambient, basis }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn ambient(&self) -> &Arc<HomBasis> {
        &self.ambient
    }

    pub fn vectors(&self) -> &[Vector] {
        &self.basis
    }

    pub fn polys(&self) -> Vec<PolySpinor> {
        self.basis
            .iter()
            .map(|v| self.ambient.from_coords(v))
            .collect()
    }

    pub fn echelon(&self) -> Echelon {
        let mut e = Echelon::new(self.ambient.len());
        for v in &self.basis {
            e.push_row(crate::exactnum::sparsify(v));
        }
        e
    }
}

/// A permutation of `{1, …, n}`, stored as the images `σ(1), …, σ(n)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n + 1];
        for &v in &images {
            if v == 0 || v > n || seen[v] {
                return Err(Error::Validation(format!(
                    "{images:?} is not a permutation of 1..={n}"
                )));
            }
            seen[v] = true;
        }
        Ok(Permutation(images))
    }

    pub fn identity(n: usize) -> Self {
        Permutation((1..=n).collect())
    }

    pub fn reversal(n: usize) -> Self {
        Permutation((1..=n).rev().collect())
    }

    /// Parses `"2,1,3"`.
    pub fn parse(s: &str) -> Result<Self> {
        let images = s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::Parse(format!("bad permutation entry {t:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(images)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn apply(&self, rho: usize) -> usize {
        self.0[rho - 1]
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(ToString::to_string).collect();
        write!(f, "{}", parts.join(","))
    }
}

/// Ordered basis of the first graded piece: position `p = nJ + ρ ≤ nk` is
/// `e_{J+1} ⊗ ε_{σ(ρ)}`, and positions `nk+1, …, k(n+1)` are `e_i ⊗ ε_{n+1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BasisOrder {
    sigma: Permutation,
    /// `(i, α)` per position.
    entries: Vec<(usize, usize)>,
}

impl BasisOrder {
    pub fn new(params: &Params, sigma: Permutation) -> Result<Self> {
        if sigma.len() != params.n {
            return Err(Error::Validation(format!(
                "permutation {sigma} must have length n = {}",
                params.n
            )));
        }
        let n = params.n;
        let mut entries: Vec<(usize, usize)> = (0..n * params.k)
            .map(|q| (q / n + 1, sigma.apply(q % n + 1)))
            .collect();
        entries.extend((1..=params.k).map(|i| (i, n + 1)));
        Ok(BasisOrder { sigma, entries })
    }

    pub fn preferred(params: &Params) -> Self {
        Self::new(params, Permutation::identity(params.n)).expect("identity has length n")
    }

    pub fn sigma(&self) -> &Permutation {
        &self.sigma
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `(i, α)` at 1-based position `p`.
    pub fn entry(&self, p: usize) -> (usize, usize) {
        self.entries[p - 1]
    }

    /// 1-based position of `e_i ⊗ ε_α`.
    pub fn position(&self, i: usize, alpha: usize) -> usize {
        self.entries
            .iter()
            .position(|&e| e == (i, alpha))
            .expect("valid (i, α)")
            + 1
    }

    /// The right-invariant field at position `p`.
    pub fn field(&self, p: usize) -> FieldId {
        let (i, a) = self.entry(p);
        FieldId::R(a, i)
    }
}

/// Which operator a tableau computation refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Flavor {
    /// `D` on `ℝ[x, y] ⊗ 𝕊` with the right-invariant fields `R_{αi}`.
    Parabolic,
    /// `E` on `ℝ[x] ⊗ 𝕊` with the coordinate fields `∂_{x_{αi}}`.
    Flat,
}

/// `C(nk + d − 1, d) · dim 𝕊`.
pub fn expected_monogenic_dim(p: &Params, d: usize) -> usize {
    let nk = (p.n * p.k) as i64;
    binomial_signed(nk + d as i64 - 1, d as i64) as usize * p.dim_s()
}

/// `C(nk − r + p, p + 1) · dim 𝕊`, the size of the `r`-th filtration step
/// of the `p`-th prolongation.
pub fn expected_filtration_dim(params: &Params, p: usize, r: usize) -> usize {
    let nk = (params.n * params.k) as i64;
    binomial_signed(nk - r as i64 + p as i64, p as i64 + 1) as usize * params.dim_s()
}

type FiltrationKey = (Flavor, usize, Vec<usize>);

/// The k-Dirac engine for fixed `(n, k)`.
#[derive(Debug)]
pub struct KDirac {
    frame: Arc<Frame>,
    gamma: GammaRep,
    flat_bases: Memo<usize, HomBasis>,
    flat_dx: Memo<(usize, usize, usize), SparseMat>,
    op_mats: Memo<(Flavor, usize), SparseMat>,
    kernels: Memo<(Flavor, usize), Subspace>,
    filtrations: Memo<FiltrationKey, Vec<Subspace>>,
}

impl KDirac {
    pub fn new(params: Params) -> Result<Self> {
        let params = Params::new(params.n, params.k)?;
        Ok(KDirac {
            frame: Arc::new(Frame::new(params)),
            gamma: build_gamma(params.m())?,
            flat_bases: Memo::new(),
            flat_dx: Memo::new(),
            op_mats: Memo::new(),
            kernels: Memo::new(),
            filtrations: Memo::new(),
        })
    }

    pub fn params(&self) -> Params {
        self.frame.params()
    }

    pub fn frame(&self) -> &Arc<Frame> {
        &self.frame
    }

    pub fn gamma(&self) -> &GammaRep {
        &self.gamma
    }

    pub fn dim_s(&self) -> usize {
        self.gamma.dim_s()
    }

    fn check_poly(&self, p: &PolySpinor) -> Result<()> {
        if p.params() != self.params() || p.dim_s() != self.dim_s() {
            return Err(Error::Validation(
                "polynomial belongs to different parameters".into(),
            ));
        }
        Ok(())
    }

    /// `(D_1Ψ, …, D_kΨ)`.
    pub fn apply_d(&self, p: &PolySpinor) -> Result<Vec<PolySpinor>> {
        self.check_poly(p)?;
        let params = self.params();
        (1..=params.k)
            .map(|i| {
                let mut acc = PolySpinor::zero(params, self.dim_s());
                for a in 1..=params.m() {
                    acc.add_assign(&apply_l(p, a, i)?.clifford_mul(&self.gamma, a));
                }
                Ok(acc)
            })
            .collect()
    }

    /// `(E_1ψ, …, E_kψ)`.
    pub fn apply_e(&self, p: &PolySpinor) -> Result<Vec<PolySpinor>> {
        self.check_poly(p)?;
        let params = self.params();
        (1..=params.k)
            .map(|i| {
                let mut acc = PolySpinor::zero(params, self.dim_s());
                for a in 1..=params.m() {
                    acc.add_assign(&p.diff_x(a, i)?.clifford_mul(&self.gamma, a));
                }
                Ok(acc)
            })
            .collect()
    }

    pub fn apply(&self, flavor: Flavor, p: &PolySpinor) -> Result<Vec<PolySpinor>> {
        match flavor {
            Flavor::Parabolic => self.apply_d(p),
            Flavor::Flat => self.apply_e(p),
        }
    }

    pub fn basis(&self, flavor: Flavor, d: usize) -> Arc<HomBasis> {
        match flavor {
            Flavor::Parabolic => self.frame.basis(d),
            Flavor::Flat => self
                .flat_bases
                .get_or_try(&d, || {
                    Ok(HomBasis::filtered(self.params(), d, self.dim_s(), |m| {
                        m.is_y_free()
                    }))
                })
                .expect("basis construction is infallible"),
        }
    }

    /// `I ⊗ γ_α` on a basis whose index is `monomial · dim 𝕊 + spin`.
    fn clifford_block(&self, alpha: usize, len: usize) -> SparseMat {
        let ds = self.dim_s();
        let mut triplets = Vec::new();
        for base in (0..len).step_by(ds) {
            for t in 0..ds {
                for (t2, g) in self.gamma.column(alpha, t) {
                    triplets.push((base + t2, base + t, g.clone()));
                }
            }
        }
        SparseMat::from_triplets(len, len, triplets)
    }

    /// Matrix of the field at `(α, i)` for the given flavor, from degree `d`
    /// to `d − 1`: `R_{αi}` or `∂_{x_{αi}}`.
    pub fn field_matrix(
        &self,
        flavor: Flavor,
        alpha: usize,
        i: usize,
        d: usize,
    ) -> Result<Arc<SparseMat>> {
        match flavor {
            Flavor::Parabolic => self.frame.matrix_of(FieldId::R(alpha, i), d),
            Flavor::Flat => self.flat_dx_matrix(alpha, i, d),
        }
    }

    fn flat_dx_matrix(&self, alpha: usize, i: usize, d: usize) -> Result<Arc<SparseMat>> {
        self.params().check_x(alpha, i)?;
        self.flat_dx.get_or_try(&(alpha, i, d), || {
            let src = self.basis(Flavor::Flat, d);
            if d == 0 {
                return Ok(SparseMat::zero(0, src.len()));
            }
            let tgt = self.basis(Flavor::Flat, d - 1);
            spin_diagonal_matrix(&src, &tgt, |f| f.diff_x(alpha, i))
        })
    }

    fn first_order_matrix(
        &self,
        flavor: Flavor,
        alpha: usize,
        i: usize,
        d: usize,
    ) -> Result<Arc<SparseMat>> {
        match flavor {
            Flavor::Parabolic => self.frame.matrix_of(FieldId::L(alpha, i), d),
            Flavor::Flat => self.flat_dx_matrix(alpha, i, d),
        }
    }

    /// The operator from degree `d` to `k` copies of degree `d − 1`, blocks
    /// stacked by `i`.
    pub fn operator_matrix(&self, flavor: Flavor, d: usize) -> Result<Arc<SparseMat>> {
        self.op_mats.get_or_try(&(flavor, d), || {
            let cols = self.basis(flavor, d).len();
            if d == 0 {
                return Ok(SparseMat::zero(0, cols));
            }
            let rows = self.basis(flavor, d - 1).len();
            let params = self.params();
            let cliffords: Vec<SparseMat> = (1..=params.m())
                .map(|a| self.clifford_block(a, rows))
                .collect();
            let mut blocks = Vec::with_capacity(params.k);
            for i in 1..=params.k {
                let mut block = SparseMat::zero(rows, cols);
                for a in 1..=params.m() {
                    block = block
                        .add(&cliffords[a - 1].mul(&*self.first_order_matrix(flavor, a, i, d)?));
                }
                blocks.push(block);
            }
            Ok(SparseMat::vstack(&blocks.iter().collect::<Vec<_>>()))
        })
    }

    /// Homogeneous solutions of degree `d`, each re-checked with the
    /// polynomial operator.
    pub fn kernel(&self, flavor: Flavor, d: usize) -> Result<Arc<Subspace>> {
        self.kernels.get_or_try(&(flavor, d), || {
            let op = self.operator_matrix(flavor, d)?;
            let mut e = Echelon::new(op.cols());
            e.push_matrix(&op);
            let space = Subspace::new(self.basis(flavor, d), e.kernel_basis());
            for (idx, f) in space.polys().iter().enumerate() {
                if self.apply(flavor, f)?.iter().any(|c| !c.is_zero()) {
                    return Err(Error::Invariant(format!(
                        "kernel vector {idx} of degree {d} is not annihilated"
                    )));
                }
            }
            Ok(space)
        })
    }

    pub fn monogenic_basis(&self, d: usize) -> Result<Arc<Subspace>> {
        self.kernel(Flavor::Parabolic, d)
    }

    /// `A^{(i)}_0 ⊃ A^{(i)}_1 ⊃ … ⊃ A^{(i)}_{k(n+1)}`, computed in one
    /// incremental elimination of the operator rows followed by the field
    /// rows in basis order.
    pub fn filtration(
        &self,
        flavor: Flavor,
        i: usize,
        order: &BasisOrder,
    ) -> Result<Arc<Vec<Subspace>>> {
        let key = (flavor, i, order.sigma().images().to_vec());
        self.filtrations.get_or_try(&key, || {
            let d = i + 1;
            let ambient = self.basis(flavor, d);
            let mut e = Echelon::new(ambient.len());
            e.push_matrix(&*self.operator_matrix(flavor, d)?);
            let mut steps = vec![Subspace::new(Arc::clone(&ambient), e.kernel_basis())];
            for p in 1..=order.len() {
                let (fi, a) = order.entry(p);
                e.push_matrix(&*self.field_matrix(flavor, a, fi, d)?);
                steps.push(Subspace::new(Arc::clone(&ambient), e.kernel_basis()));
            }
            Ok(steps)
        })
    }

    pub fn filtration_dims(
        &self,
        flavor: Flavor,
        i: usize,
        order: &BasisOrder,
    ) -> Result<Vec<usize>> {
        Ok(self
            .filtration(flavor, i, order)?
            .iter()
            .map(Subspace::dim)
            .collect())
    }

    /// Checks `0 → A^{(i+1)}_j → A^{(i+1)}_{j−1} → A^{(i)}_{j−1} → 0`, the
    /// middle map being the field at position `j`.
    pub fn verify_ses(
        &self,
        flavor: Flavor,
        i: usize,
        j: usize,
        order: &BasisOrder,
    ) -> Result<SesReport> {
        if j == 0 || j > order.len() {
            return Err(Error::Index(format!("j = {j} outside 1..={}", order.len())));
        }
        let upper = self.filtration(flavor, i + 1, order)?;
        let lower = self.filtration(flavor, i, order)?;
        let (sub, mid, target) = (&upper[j], &upper[j - 1], &lower[j - 1]);
        let (fi, a) = order.entry(j);
        let map = self.field_matrix(flavor, a, fi, i + 2)?;

        let images: Vec<Vector> = mid.vectors().iter().map(|u| map.mul_vec(u)).collect();
        let mut image_ech = Echelon::new(map.rows());
        for v in &images {
            image_ech.push_row(crate::exactnum::sparsify(v));
        }
        let image_rank = image_ech.rank();
        let target_ech = target.echelon();
        let image_in_target = images.iter().all(|v| target_ech.contains(v));
        let mid_ech = mid.echelon();
        let sub_in_kernel = sub
            .vectors()
            .iter()
            .all(|v| mid_ech.contains(v) && is_zero_vec(&map.mul_vec(v)));
        let kernel_dim = mid.dim() - image_rank;
        Ok(SesReport {
            i,
            j,
            dim_sub: sub.dim(),
            dim_mid: mid.dim(),
            dim_target: target.dim(),
            image_rank,
            kernel_dim,
            kernel_equals_sub: sub_in_kernel && kernel_dim == sub.dim(),
            image_in_target,
            surjective: image_in_target && image_rank == target.dim(),
        })
    }

    /// For every `f ∈ A^{(i+1)}_{nr}` in the preferred order, checks
    /// `∂_{y_{st}} f = 0` for all `s ≤ r` and `t > s`.
    pub fn verify_lemma_dy(&self, i: usize, r: usize) -> Result<LemmaDyReport> {
        let params = self.params();
        if r == 0 || r >= params.k {
            return Err(Error::Index(format!(
                "r = {r} outside 1..={}",
                params.k - 1
            )));
        }
        let order = BasisOrder::preferred(&params);
        let step = &self.filtration(Flavor::Parabolic, i + 1, &order)?[params.n * r];
        let mut checked = 0;
        for (idx, f) in step.polys().iter().enumerate() {
            for s in 1..=r {
                for t in s + 1..=params.k {
                    checked += 1;
                    let g = apply_dy(f, s, t)?;
                    if !g.is_zero() {
                        return Ok(LemmaDyReport {
                            i,
                            r,
                            dim: step.dim(),
                            checked,
                            failure: Some(format!(
                                "basis element {idx}: d/dy_{s}{t} gives {} terms",
                                g.num_terms()
                            )),
                        });
                    }
                }
            }
        }
        Ok(LemmaDyReport {
            i,
            r,
            dim: step.dim(),
            checked,
            failure: None,
        })
    }

    /// Both sides of `dim A^{(i+1)} ≤ Σ_{j=0}^{k(n+1)} dim A^{(i)}_j`.
    pub fn cartan_test(
        &self,
        flavor: Flavor,
        i: usize,
        order: &BasisOrder,
    ) -> Result<CartanReport> {
        let dims = self.filtration_dims(flavor, i, order)?;
        let lhs = self.kernel(flavor, i + 2)?.dim();
        let rhs = dims.iter().sum();
        Ok(CartanReport {
            flavor,
            i,
            sigma: order.sigma().clone(),
            lhs,
            rhs,
            characters: dims,
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SesReport {
    pub i: usize,
    pub j: usize,
    /// `dim A^{(i+1)}_j`.
    pub dim_sub: usize,
    /// `dim A^{(i+1)}_{j−1}`.
    pub dim_mid: usize,
    /// `dim A^{(i)}_{j−1}`.
    pub dim_target: usize,
    pub image_rank: usize,
    pub kernel_dim: usize,
    pub kernel_equals_sub: bool,
    /// The field maps step `j − 1` of the higher prolongation into step
    /// `j − 1` of the lower one.
    pub image_in_target: bool,
    pub surjective: bool,
}

impl SesReport {
    pub fn exact(&self) -> bool {
        self.kernel_equals_sub && self.image_in_target && self.surjective
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LemmaDyReport {
    pub i: usize,
    pub r: usize,
    pub dim: usize,
    pub checked: usize,
    pub failure: Option<String>,
}

impl LemmaDyReport {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CartanReport {
    pub flavor: Flavor,
    pub i: usize,
    pub sigma: Permutation,
    /// `dim A^{(i+1)}`.
    pub lhs: usize,
    /// `Σ_j dim A^{(i)}_j`.
    pub rhs: usize,
    pub characters: Vec<usize>,
}

impl CartanReport {
    pub fn bound_holds(&self) -> bool {
        self.lhs <= self.rhs
    }

    pub fn equality(&self) -> bool {
        self.lhs == self.rhs
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::GaussRat;
    use crate::wpoly::{Monomial, Var};

    fn engine(n: usize, k: usize) -> KDirac {
        KDirac::new(Params::new(n, k).unwrap()).unwrap()
    }

    fn spinor(dim: usize, t: usize) -> Vec<GaussRat> {
        let mut s = vec![GaussRat::zero(); dim];
        s[t] = GaussRat::one();
        s
    }

    fn x_times(e: &KDirac, a: usize, i: usize, s: &[GaussRat]) -> PolySpinor {
        PolySpinor::constant(e.params(), s)
            .mul_var(Var::X(a, i))
            .unwrap()
    }

    #[test]
    fn d_of_constant_and_linear() {
        let e = engine(2, 2);
        let s = spinor(2, 0);
        let c = PolySpinor::constant(e.params(), &s);
        assert!(e.apply_d(&c).unwrap().iter().all(PolySpinor::is_zero));
        let d = e.apply_d(&x_times(&e, 1, 1, &s)).unwrap();
        let eps1 = e.gamma().act(1, &s).unwrap();
        assert_eq!(d[0], PolySpinor::constant(e.params(), &eps1));
        assert!(d[1].is_zero());
        assert_eq!(e.apply_e(&x_times(&e, 1, 1, &s)).unwrap(), d);
    }

    #[test]
    fn two_term_monogenic() {
        let e = engine(2, 2);
        let s = spinor(2, 1);
        let g = e.gamma();
        let e31 = g.act(3, &g.act(1, &s).unwrap()).unwrap();
        let psi = x_times(&e, 1, 1, &s).sub(&x_times(&e, 3, 1, &e31));
        assert!(e.apply_d(&psi).unwrap().iter().all(PolySpinor::is_zero));
        assert!(e
            .monogenic_basis(1)
            .unwrap()
            .echelon()
            .contains(&e.frame().basis(1).coords(&psi).unwrap()));
    }

    #[test]
    fn d_and_e_differ_on_y() {
        let e = engine(2, 2);
        let p = e.params();
        let f = PolySpinor::term(p, 2, 0, Monomial::var(&p, Var::Y(1, 2)), GaussRat::one());
        assert_ne!(e.apply_d(&f).unwrap(), e.apply_e(&f).unwrap());
    }

    #[test]
    fn matrix_agrees_with_polynomial_operator() {
        use rand::SeedableRng;
        let e = engine(2, 2);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for d in 1..=3 {
            let b = e.frame().basis(d);
            let tgt = e.frame().basis(d - 1);
            let f = b.random_element(&mut rng);
            let via = e
                .operator_matrix(Flavor::Parabolic, d)
                .unwrap()
                .mul_vec(&b.coords(&f).unwrap());
            let direct: Vector = e
                .apply_d(&f)
                .unwrap()
                .iter()
                .flat_map(|c| tgt.coords(c).unwrap())
                .collect();
            assert_eq!(via, direct);
        }
    }

    #[test]
    fn monogenic_dimensions() {
        let e = engine(2, 2);
        for (d, want) in [(0, 2), (1, 8), (2, 20), (3, 40)] {
            assert_eq!(e.monogenic_basis(d).unwrap().dim(), want);
            assert_eq!(expected_monogenic_dim(&e.params(), d), want);
        }
    }

    #[test]
    fn basis_order_layout() {
        let p = Params::new(3, 2).unwrap();
        let o = BasisOrder::new(&p, Permutation::parse("2,1,3").unwrap()).unwrap();
        assert_eq!(o.len(), 8);
        let got: Vec<_> = (1..=8).map(|q| o.entry(q)).collect();
        assert_eq!(
            got,
            vec![
                (1, 2),
                (1, 1),
                (1, 3),
                (2, 2),
                (2, 1),
                (2, 3),
                (1, 4),
                (2, 4)
            ]
        );
        assert_eq!(o.position(2, 1), 5);
        assert_eq!(o.field(1), FieldId::R(2, 1));
        assert!(BasisOrder::new(&p, Permutation::identity(2)).is_err());
        assert!(Permutation::parse("1,1,2").is_err());
        assert!(Permutation::parse("1,x").is_err());
    }

    #[test]
    fn cartan_characters_degree_zero() {
        let e = engine(2, 2);
        let p = e.params();
        for sigma in [Permutation::identity(2), Permutation::reversal(2)] {
            let o = BasisOrder::new(&p, sigma).unwrap();
            assert_eq!(
                e.filtration_dims(Flavor::Parabolic, 0, &o).unwrap(),
                vec![8, 6, 4, 2, 0, 0, 0]
            );
        }
        let o = BasisOrder::preferred(&p);
        assert_eq!(e.filtration_dims(Flavor::Parabolic, 1, &o).unwrap()[0], 20);
        let c = e.cartan_test(Flavor::Parabolic, 0, &o).unwrap();
        assert_eq!((c.lhs, c.rhs), (20, 20));
    }

    #[test]
    fn ses_degree_one() {
        let e = engine(2, 2);
        let o = BasisOrder::preferred(&e.params());
        let r = e.verify_ses(Flavor::Parabolic, 0, 1, &o).unwrap();
        assert!(r.exact(), "{r:?}");
        assert_eq!(r.dim_sub, expected_filtration_dim(&e.params(), 1, 1));
        for j in 1..=6 {
            assert!(e.verify_ses(Flavor::Parabolic, 0, j, &o).unwrap().exact());
        }
        assert!(e.verify_ses(Flavor::Parabolic, 0, 7, &o).is_err());
    }

    #[test]
    fn lemma_dy_small() {
        let e = engine(2, 2);
        assert!(e.verify_lemma_dy(1, 1).unwrap().passed());
        assert!(e.verify_lemma_dy(0, 1).unwrap().passed());
        assert!(e.verify_lemma_dy(0, 2).is_err());
    }

    #[test]
    fn flat_cartan_is_strict_at_degree_one() {
        let e = engine(2, 2);
        let o = BasisOrder::preferred(&e.params());
        let c = e.cartan_test(Flavor::Flat, 0, &o).unwrap();
        assert!(c.bound_holds());
        assert!(c.lhs < c.rhs, "{c:?}");
    }
}
