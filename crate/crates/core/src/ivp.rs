//! The initial value problem on the slice `x_{n+1,·} = 0, y = 0`: restriction
//! of monogenic spinors, their unique extension from slice data, and the
//! flat compatibility conditions.

use std::sync::Arc;

use rand::Rng;
use serde::Serialize;

use crate::dirac::{Flavor, KDirac, Subspace};
use crate::error::{Error, Result};
use crate::exactnum::{kernel_basis, Factorization, GaussRat, Solution, SparseMat, Vector};
use crate::memo::Memo;
use crate::wpoly::{random_coeff, HomBasis, PolySpinor};

/// A homogeneous spinor-valued polynomial in the slice variables `x_{αi}`,
/// `α ≤ n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SliceFunction(PolySpinor);

impl SliceFunction {
    pub fn new(p: PolySpinor) -> Result<Self> {
        let params = p.params();
        if let Some((_, m, _)) = p.terms().find(|(_, m, _)| !m.on_slice(&params)) {
            return Err(Error::Validation(format!(
                "slice data may not depend on x_(n+1,.) or y (offending term of degree {})",
                m.wdeg()
            )));
        }
        if p.homogeneous_degree().is_none() {
            return Err(Error::Validation("slice data must be homogeneous".into()));
        }
        Ok(SliceFunction(p))
    }

    pub fn poly(&self) -> &PolySpinor {
        &self.0
    }

    pub fn into_poly(self) -> PolySpinor {
        self.0
    }

    /// The degree, or `None` for zero.
    pub fn degree(&self) -> Option<usize> {
        self.0.homogeneous_degree().flatten()
    }
}

/// Substitutes `x_{n+1,i} = 0` and `y_{rs} = 0`.
pub fn restrict(p: &PolySpinor) -> SliceFunction {
    let params = p.params();
    SliceFunction(p.filter_terms(|m| m.on_slice(&params)))
}

struct ExtendData {
    kernel: Arc<Subspace>,
    slice_basis: HomBasis,
    restriction: SparseMat,
    fact: Factorization,
}

/// Extension and restriction for fixed parameters.
pub struct Ivp {
    engine: Arc<KDirac>,
    data: Memo<usize, ExtendData>,
}

impl std::fmt::Debug for Ivp {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Ivp")
            .field("params", &self.engine.params())
            .finish()
    }
}

impl Ivp {
    pub fn new(engine: Arc<KDirac>) -> Self {
        Ivp {
            engine,
            data: Memo::new(),
        }
    }

    pub fn engine(&self) -> &Arc<KDirac> {
        &self.engine
    }

    pub fn slice_basis(&self, d: usize) -> HomBasis {
        let params = self.engine.params();
        HomBasis::filtered(params, d, self.engine.dim_s(), |m| m.on_slice(&params))
    }

    /// Matrix of restriction from a subspace to slice coordinates.
    fn restriction_matrix(&self, space: &Subspace, slice: &HomBasis) -> Result<SparseMat> {
        let cols = space
            .polys()
            .iter()
            .map(|f| slice.coords(restrict(f).poly()))
            .collect::<Result<Vec<Vector>>>()?;
        Ok(SparseMat::from_columns(slice.len(), &cols))
    }

    fn data(&self, d: usize) -> Result<Arc<ExtendData>> {
        self.data.get_or_try(&d, || {
            let kernel = self.engine.monogenic_basis(d)?;
            let slice_basis = self.slice_basis(d);
            let restriction = self.restriction_matrix(&kernel, &slice_basis)?;
            let fact = Factorization::new(&restriction);
            Ok(ExtendData {
                kernel,
                slice_basis,
                restriction,
                fact,
            })
        })
    }

    /// The unique monogenic spinor of degree `d` restricting to `psi`.
    pub fn extend(&self, psi: &SliceFunction, d: usize) -> Result<PolySpinor> {
        let params = self.engine.params();
        if psi.poly().params() != params || psi.poly().dim_s() != self.engine.dim_s() {
            return Err(Error::Validation(
                "slice data belongs to different parameters".into(),
            ));
        }
        if !psi.poly().is_homogeneous_of(d) {
            return Err(Error::Validation(format!(
                "slice data is not homogeneous of degree {d}"
            )));
        }
        let data = self.data(d)?;
        let rhs = data.slice_basis.coords(psi.poly())?;
        let coeffs = match data.fact.solve(&rhs) {
            Solution::Particular(c) => c,
            Solution::Inconsistent => {
                return Err(Error::Invariant(format!(
                    "degree-{d} slice data has no monogenic extension"
                )));
            }
        };
        let ambient = data.kernel.ambient();
        let mut v = vec![GaussRat::zero(); ambient.len()];
        for (c, k) in coeffs.iter().zip(data.kernel.vectors()) {
            if c.is_zero() {
                continue;
            }
            for (x, y) in v.iter_mut().zip(k) {
                if !y.is_zero() {
                    *x += &(c * y);
                }
            }
        }
        let out = ambient.from_coords(&v);
        if self.engine.apply_d(&out)?.iter().any(|c| !c.is_zero()) {
            return Err(Error::Invariant("extension is not monogenic".into()));
        }
        if restrict(&out) != *psi {
            return Err(Error::Invariant(
                "extension does not restrict to the data".into(),
            ));
        }
        Ok(out)
    }

    /// Rank of restriction on the degree-`d` monogenic space.
    pub fn verify_uniqueness(&self, d: usize) -> Result<UniquenessReport> {
        let data = self.data(d)?;
        Ok(UniquenessReport {
            d,
            monogenic_dim: data.kernel.dim(),
            slice_dim: data.slice_basis.len(),
            rank: data.fact.rank(),
            restriction_nnz: data.restriction.nnz(),
        })
    }

    /// Basis of the monogenic spinors of degree `d` that vanish on the slice.
    pub fn restriction_kernel(&self, d: usize) -> Result<Vec<PolySpinor>> {
        let data = self.data(d)?;
        let polys = data.kernel.polys();
        Ok(kernel_basis(&data.restriction)
            .iter()
            .map(|v| {
                v.iter().zip(&polys).filter(|(c, _)| !c.is_zero()).fold(
                    PolySpinor::zero(self.engine.params(), self.engine.dim_s()),
                    |acc, (c, f)| acc.add(&f.scale(c)),
                )
            })
            .collect())
    }

    /// A random element of the degree-`d` monogenic space.
    pub fn random_monogenic<R: Rng>(&self, d: usize, rng: &mut R) -> Result<PolySpinor> {
        let data = self.data(d)?;
        let zero = PolySpinor::zero(self.engine.params(), self.engine.dim_s());
        Ok(data
            .kernel
            .polys()
            .iter()
            .fold(zero, |acc, f| acc.add(&f.scale(&random_coeff(rng)))))
    }

    /// Random slice data with small Gaussian-integer coefficients.
    pub fn random_slice<R: Rng>(&self, d: usize, rng: &mut R) -> SliceFunction {
        SliceFunction(self.slice_basis(d).random_element(rng))
    }

    /// `Ê_iÊ_jψ − Ê_jÊ_iψ` with `Ê_i = Σ_{α≤n} ε_α ∂_{x_{αi}}`, indexed `[i−1][j−1]`.
    pub fn flat_compatibility(&self, psi: &SliceFunction) -> Result<Vec<Vec<PolySpinor>>> {
        let params = self.engine.params();
        let hat = |f: &PolySpinor, i: usize| -> Result<PolySpinor> {
            let mut acc = PolySpinor::zero(params, f.dim_s());
            for a in 1..=params.n {
                acc.add_assign(&f.diff_x(a, i)?.clifford_mul(self.engine.gamma(), a));
            }
            Ok(acc)
        };
        let first = (1..=params.k)
            .map(|i| hat(psi.poly(), i))
            .collect::<Result<Vec<_>>>()?;
        let mut out = Vec::with_capacity(params.k);
        for i in 1..=params.k {
            let mut row = Vec::with_capacity(params.k);
            for j in 1..=params.k {
                row.push(hat(&first[j - 1], i)?.sub(&hat(&first[i - 1], j)?));
            }
            out.push(row);
        }
        Ok(out)
    }

    /// `D ψ = E ψ` for `y`-independent `ψ`.
    pub fn pullback_consistency(&self, psi: &PolySpinor) -> Result<bool> {
        if psi.terms().any(|(_, m, _)| !m.is_y_free()) {
            return Err(Error::Validation(
                "pullback check needs y-independent input".into(),
            ));
        }
        Ok(self.engine.apply_d(psi)? == self.engine.apply_e(psi)?)
    }

    /// Dimension of the image of restriction on the degree-`d` flat kernel.
    pub fn flat_restriction_rank(&self, d: usize) -> Result<FlatImageReport> {
        let kernel = self.engine.kernel(Flavor::Flat, d)?;
        let slice = self.slice_basis(d);
        let m = self.restriction_matrix(&kernel, &slice)?;
        Ok(FlatImageReport {
            d,
            flat_kernel_dim: kernel.dim(),
            slice_dim: slice.len(),
            image_dim: crate::exactnum::rank(&m),
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct UniquenessReport {
    pub d: usize,
    pub monogenic_dim: usize,
    pub slice_dim: usize,
    pub rank: usize,
    pub restriction_nnz: usize,
}

impl UniquenessReport {
    pub fn injective(&self) -> bool {
        self.rank == self.monogenic_dim
    }

    pub fn bijective(&self) -> bool {
        self.injective() && self.rank == self.slice_dim
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FlatImageReport {
    pub d: usize,
    pub flat_kernel_dim: usize,
    pub slice_dim: usize,
    pub image_dim: usize,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wpoly::{Monomial, Params, Var};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ivp() -> Ivp {
        Ivp::new(Arc::new(KDirac::new(Params::new(2, 2).unwrap()).unwrap()))
    }

    fn spinor(t: usize) -> Vec<GaussRat> {
        let mut s = vec![GaussRat::zero(); 2];
        s[t] = GaussRat::one();
        s
    }

    #[test]
    fn restriction_examples() {
        let v = ivp();
        let p = v.engine().params();
        let y = PolySpinor::term(p, 2, 0, Monomial::var(&p, Var::Y(1, 2)), GaussRat::one());
        assert!(restrict(&y).poly().is_zero());
        let x11 = PolySpinor::constant(p, &spinor(0))
            .mul_var(Var::X(1, 1))
            .unwrap();
        assert_eq!(restrict(&x11).poly(), &x11);
        let g = v.engine().gamma();
        let e31 = g.act(3, &g.act(1, &spinor(0)).unwrap()).unwrap();
        let psi = x11.sub(&PolySpinor::constant(p, &e31).mul_var(Var::X(3, 1)).unwrap());
        assert_eq!(restrict(&psi).poly(), &x11);
    }

    #[test]
    fn extend_linear_data() {
        let v = ivp();
        let p = v.engine().params();
        let x11 = PolySpinor::constant(p, &spinor(0))
            .mul_var(Var::X(1, 1))
            .unwrap();
        let out = v
            .extend(&SliceFunction::new(x11.clone()).unwrap(), 1)
            .unwrap();
        let g = v.engine().gamma();
        let e31 = g.act(3, &g.act(1, &spinor(0)).unwrap()).unwrap();
        assert_eq!(
            out,
            x11.sub(&PolySpinor::constant(p, &e31).mul_var(Var::X(3, 1)).unwrap())
        );
        assert_eq!(out.num_terms(), 2);
    }

    #[test]
    fn extend_constant_is_identity() {
        let v = ivp();
        let c = PolySpinor::constant(v.engine().params(), &[GaussRat::from(3), GaussRat::i()]);
        assert_eq!(
            v.extend(&SliceFunction::new(c.clone()).unwrap(), 0)
                .unwrap(),
            c
        );
    }

    #[test]
    fn slice_function_validation() {
        let v = ivp();
        let p = v.engine().params();
        let bad = PolySpinor::constant(p, &spinor(1))
            .mul_var(Var::X(3, 2))
            .unwrap();
        assert!(SliceFunction::new(bad).is_err());
        let x = PolySpinor::constant(p, &spinor(1))
            .mul_var(Var::X(1, 2))
            .unwrap();
        let mixed = x.add(&PolySpinor::constant(p, &spinor(0)));
        assert!(SliceFunction::new(mixed).is_err());
        assert!(v.extend(&SliceFunction::new(x).unwrap(), 2).is_err());
    }

    #[test]
    fn uniqueness_low_degrees() {
        let v = ivp();
        let r0 = v.verify_uniqueness(0).unwrap();
        assert_eq!(r0.rank, 2);
        let r1 = v.verify_uniqueness(1).unwrap();
        assert_eq!((r1.rank, r1.monogenic_dim), (8, 8));
        assert!(r1.bijective());
    }

    #[test]
    fn round_trip_degree_two() {
        let v = ivp();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..10 {
            let psi = v.random_slice(2, &mut rng);
            let ext = v.extend(&psi, 2).unwrap();
            assert_eq!(restrict(&ext), psi);
        }
    }

    #[test]
    fn flat_compatibility_necessity() {
        let v = ivp();
        let p = v.engine().params();
        let c = SliceFunction::new(PolySpinor::constant(p, &spinor(0))).unwrap();
        assert!(v
            .flat_compatibility(&c)
            .unwrap()
            .iter()
            .flatten()
            .all(PolySpinor::is_zero));
        let flat = v.engine().kernel(Flavor::Flat, 2).unwrap();
        for f in flat.polys() {
            let res = v.flat_compatibility(&restrict(&f)).unwrap();
            assert!(res.iter().flatten().all(PolySpinor::is_zero));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let generic = v.random_slice(2, &mut rng);
        assert!(v
            .flat_compatibility(&generic)
            .unwrap()
            .iter()
            .flatten()
            .any(|r| !r.is_zero()));
    }

    #[test]
    fn pullback_examples() {
        let v = ivp();
        let p = v.engine().params();
        let x11 = PolySpinor::constant(p, &spinor(0))
            .mul_var(Var::X(1, 1))
            .unwrap();
        assert!(v.pullback_consistency(&x11).unwrap());
        let y = x11.mul_var(Var::Y(1, 2)).unwrap();
        assert!(v.pullback_consistency(&y).is_err());
    }
}
