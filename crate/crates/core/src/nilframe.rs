//! Left- and right-invariant vector fields on the nilpotent group and their
//! matrices between weighted-homogeneous components.
//!
//! ```text
//! L_{αi} = ∂_{x_{αi}} − ½ Σ_j x_{αj} ∂_{y_{ij}}
//! R_{αi} = ∂_{x_{αi}} + ½ Σ_j x_{αj} ∂_{y_{ij}}
//! ```
//! with `∂_{y_{ii}} = 0` and `∂_{y_{ij}} = −∂_{y_{ji}}`.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactnum::{GaussRat, SparseMat};
use crate::memo::Memo;
use crate::wpoly::{HomBasis, Params, PolySpinor, Var};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FieldId {
    L(usize, usize),
    R(usize, usize),
    /// `∂_{y_{rs}}` with `r < s`.
    Dy(usize, usize),
}

impl FieldId {
    pub fn validate(&self, p: &Params) -> Result<()> {
        match *self {
            FieldId::L(a, i) | FieldId::R(a, i) => p.check_x(a, i),
            FieldId::Dy(r, s) if r < s => p.check_y(r, s),
            FieldId::Dy(r, s) => Err(Error::Index(format!("Dy({r},{s}) must have r < s"))),
        }
    }

    /// How much the field lowers the weighted degree.
    pub fn shift(&self) -> usize {
        match self {
            FieldId::L(..) | FieldId::R(..) => 1,
            FieldId::Dy(..) => 2,
        }
    }

    /// Every field of the frame: all `L`, then all `R`, then all `∂_y`.
    pub fn all(p: &Params) -> Vec<FieldId> {
        let xs: Vec<(usize, usize)> = (1..=p.m())
            .flat_map(|a| (1..=p.k).map(move |i| (a, i)))
            .collect();
        let mut out: Vec<FieldId> = xs.iter().map(|&(a, i)| FieldId::L(a, i)).collect();
        out.extend(xs.iter().map(|&(a, i)| FieldId::R(a, i)));
        out.extend(p.y_pairs().into_iter().map(|(r, s)| FieldId::Dy(r, s)));
        out
    }
}

impl fmt::Display for FieldId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldId::L(a, i) => write!(f, "L{a}{i}"),
            FieldId::R(a, i) => write!(f, "R{a}{i}"),
            FieldId::Dy(r, s) => write!(f, "Dy{r}{s}"),
        }
    }
}

/// `Σ_j x_{αj} ∂_{y_{ij}} P`.
fn twist(p: &PolySpinor, alpha: usize, i: usize) -> PolySpinor {
    let params = p.params();
    let mut out = PolySpinor::zero(params, p.dim_s());
    for j in (1..=params.k).filter(|&j| j != i) {
        out.add_assign(&p.diff_y_unchecked(i, j).mul_var_unchecked(Var::X(alpha, j)));
    }
    out
}

fn half() -> GaussRat {
    GaussRat::ratio(1, 2)
}

pub fn apply_l(p: &PolySpinor, alpha: usize, i: usize) -> Result<PolySpinor> {
    let dx = p.diff_x(alpha, i)?;
    Ok(dx.sub(&twist(p, alpha, i).scale(&half())))
}

pub fn apply_r(p: &PolySpinor, alpha: usize, i: usize) -> Result<PolySpinor> {
    let dx = p.diff_x(alpha, i)?;
    Ok(dx.add(&twist(p, alpha, i).scale(&half())))
}

pub fn apply_dy(p: &PolySpinor, r: usize, s: usize) -> Result<PolySpinor> {
    p.diff_y(r, s)
}

pub fn apply_field(p: &PolySpinor, f: FieldId) -> Result<PolySpinor> {
    f.validate(&p.params())?;
    match f {
        FieldId::L(a, i) => apply_l(p, a, i),
        FieldId::R(a, i) => apply_r(p, a, i),
        FieldId::Dy(r, s) => apply_dy(p, r, s),
    }
}

/// `±∂_{y_{ij}}` as a field with `i < j`, or `None` for `i = j`.
fn dy_signed(i: usize, j: usize) -> Option<(i64, FieldId)> {
    use std::cmp::Ordering;
    match i.cmp(&j) {
        Ordering::Less => Some((1, FieldId::Dy(i, j))),
        Ordering::Greater => Some((-1, FieldId::Dy(j, i))),
        Ordering::Equal => None,
    }
}

/// The bracket `[a, b]` predicted by the structure of the Lie algebra, as a
/// signed combination of fields.
pub fn expected_bracket(a: FieldId, b: FieldId) -> Vec<(i64, FieldId)> {
    match (a, b) {
        (FieldId::L(al, i), FieldId::L(be, j)) if al == be => dy_signed(i, j).into_iter().collect(),
        (FieldId::R(al, i), FieldId::R(be, j)) if al == be => {
            dy_signed(i, j).map(|(c, f)| (-c, f)).into_iter().collect()
        }
        _ => Vec::new(),
    }
}

/// Shared per-parameter state: homogeneous bases and memoized field matrices.
#[derive(Debug)]
pub struct Frame {
    params: Params,
    dim_s: usize,
    bases: Memo<usize, HomBasis>,
    mats: Memo<(FieldId, usize), SparseMat>,
}

impl Frame {
    pub fn new(params: Params) -> Self {
        Frame {
            params,
            dim_s: params.dim_s(),
            bases: Memo::new(),
            mats: Memo::new(),
        }
    }

    pub fn params(&self) -> Params {
        self.params
    }

    pub fn dim_s(&self) -> usize {
        self.dim_s
    }

    pub fn basis(&self, d: usize) -> Arc<HomBasis> {
        let b = self
            .bases
            .get_or_try(&d, || Ok(HomBasis::new(self.params, d, self.dim_s)));
        b.expect("basis construction is infallible")
    }

    /// Dimension of the degree-`d` component, zero for negative degrees.
    pub fn dim(&self, d: isize) -> usize {
        if d < 0 {
            0
        } else {
            self.basis(d as usize).len()
        }
    }

    /// Matrix of `field` from degree `d` to degree `d − shift` (zero rows
    /// when the target degree is negative).
    pub fn matrix_of(&self, field: FieldId, d: usize) -> Result<Arc<SparseMat>> {
        field.validate(&self.params)?;
        self.mats
            .get_or_try(&(field, d), || self.build_matrix(field, d))
    }

    fn build_matrix(&self, field: FieldId, d: usize) -> Result<SparseMat> {
        let src = self.basis(d);
        if d < field.shift() {
            return Ok(SparseMat::zero(0, src.len()));
        }
        let tgt = self.basis(d - field.shift());
        spin_diagonal_matrix(&src, &tgt, |f| apply_field(f, field))
    }

    /// Matrix of `[a, b]` on degree `d` computed by composing field matrices.
    pub fn bracket_matrix(&self, a: FieldId, b: FieldId, d: usize) -> Result<SparseMat> {
        let total = a.shift() + b.shift();
        if d < total {
            return Ok(SparseMat::zero(0, self.dim(d as isize)));
        }
        let ab = self
            .matrix_of(a, d - b.shift())?
            .mul(&*self.matrix_of(b, d)?);
        let ba = self
            .matrix_of(b, d - a.shift())?
            .mul(&*self.matrix_of(a, d)?);
        Ok(ab.sub(&ba))
    }

    fn expected_bracket_matrix(&self, a: FieldId, b: FieldId, d: usize) -> Result<SparseMat> {
        let rows = self.dim(d as isize - (a.shift() + b.shift()) as isize);
        let mut out = SparseMat::zero(rows, self.dim(d as isize));
        if rows == 0 {
            return Ok(out);
        }
        for (c, f) in expected_bracket(a, b) {
            out = out.add(&self.matrix_of(f, d)?.scale(&GaussRat::from(c)));
        }
        Ok(out)
    }
}

/// Matrix of an operator that acts on scalar polynomials and trivially on
/// the spinor index, from `src` to `tgt`.
pub fn spin_diagonal_matrix(
    src: &HomBasis,
    tgt: &HomBasis,
    op: impl Fn(&PolySpinor) -> Result<PolySpinor>,
) -> Result<SparseMat> {
    let ds = src.dim_s();
    let mut triplets = Vec::new();
    for (mi, mono) in src.monomials().iter().enumerate() {
        let scalar = PolySpinor::term(src.params(), 1, 0, mono.clone(), GaussRat::one());
        for (_, m2, c) in op(&scalar)?.terms() {
            let row = tgt.position(m2, 0).ok_or_else(|| {
                Error::Invariant(format!(
                    "image of a degree-{} monomial left the target basis",
                    src.degree()
                ))
            })?;
            for t in 0..ds {
                triplets.push((row + t, mi * ds + t, c.clone()));
            }
        }
    }
    Ok(SparseMat::from_triplets(tgt.len(), src.len(), triplets))
}

/// First basis element on which a bracket identity fails.
#[derive(Clone, Debug, Serialize)]
pub struct BracketFailure {
    pub a: FieldId,
    pub b: FieldId,
    pub basis_index: usize,
    pub expected: String,
    pub actual: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct BracketReport {
    pub degree: usize,
    pub basis_size: usize,
    pub pairs_checked: usize,
    pub failure: Option<BracketFailure>,
}

impl BracketReport {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

/// Checks `[L_{αi}, L_{βj}] = δ_{αβ}∂_{y_{ij}} = −[R_{αi}, R_{βj}]` and the
/// vanishing of every other bracket on the whole degree-`d` basis.
pub fn bracket_report(frame: &Frame, d: usize) -> Result<BracketReport> {
    let fields = FieldId::all(&frame.params());
    let basis = frame.basis(d);
    let mut pairs = 0;
    for &a in &fields {
        for &b in &fields {
            pairs += 1;
            let got = frame.bracket_matrix(a, b, d)?;
            let want = frame.expected_bracket_matrix(a, b, d)?;
            if got != want {
                let diff = got.sub(&want).transpose();
                let col = (0..diff.rows())
                    .find(|&c| !diff.row(c).is_empty())
                    .unwrap_or(0);
                let column = |m: &SparseMat| {
                    let t = m.transpose();
                    let tgt = frame.basis(d - a.shift() - b.shift());
                    tgt.from_coords(&crate::exactnum::densify(t.row(col), tgt.len()))
                };
                return Ok(BracketReport {
                    degree: d,
                    basis_size: basis.len(),
                    pairs_checked: pairs,
                    failure: Some(BracketFailure {
                        a,
                        b,
                        basis_index: col,
                        expected: crate::wpoly::to_json(&column(&want)),
                        actual: crate::wpoly::to_json(&column(&got)),
                    }),
                });
            }
        }
    }
    Ok(BracketReport {
        degree: d,
        basis_size: basis.len(),
        pairs_checked: pairs,
        failure: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rank;
    use crate::wpoly::Monomial;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn p22() -> Params {
        Params::new(2, 2).unwrap()
    }

    fn mono_term(p: Params, v: Var, c: GaussRat) -> PolySpinor {
        PolySpinor::term(p, 2, 0, Monomial::var(&p, v), c)
    }

    #[test]
    fn l_and_r_on_y() {
        let p = p22();
        let y = mono_term(p, Var::Y(1, 2), GaussRat::one());
        assert_eq!(
            apply_l(&y, 1, 1).unwrap(),
            mono_term(p, Var::X(1, 2), GaussRat::ratio(-1, 2))
        );
        assert_eq!(
            apply_r(&y, 1, 1).unwrap(),
            mono_term(p, Var::X(1, 2), GaussRat::ratio(1, 2))
        );
        // second index: ∂_{y_{21}} = −∂_{y_{12}}
        assert_eq!(
            apply_l(&y, 2, 2).unwrap(),
            mono_term(p, Var::X(2, 1), GaussRat::ratio(1, 2))
        );
    }

    #[test]
    fn l_on_linear_and_constant() {
        let p = p22();
        let x = mono_term(p, Var::X(1, 1), GaussRat::one());
        let mut one = vec![GaussRat::zero(); 2];
        one[0] = GaussRat::one();
        assert_eq!(apply_l(&x, 1, 1).unwrap(), PolySpinor::constant(p, &one));
        assert!(apply_r(&x, 2, 1).unwrap().is_zero());
        assert!(apply_l(&PolySpinor::constant(p, &one), 3, 2)
            .unwrap()
            .is_zero());
        assert!(apply_l(&x, 4, 1).is_err());
        assert!(apply_field(&x, FieldId::Dy(2, 1)).is_err());
    }

    #[test]
    fn r_minus_l_is_twice_the_twist() {
        let p = Params::new(2, 3).unwrap();
        let b = HomBasis::new(p, 3, 2);
        let f = b.random_element(&mut ChaCha8Rng::seed_from_u64(3));
        for a in 1..=3 {
            for i in 1..=3 {
                let diff = apply_r(&f, a, i).unwrap().sub(&apply_l(&f, a, i).unwrap());
                assert_eq!(diff, twist(&f, a, i));
            }
        }
    }

    #[test]
    fn dy_at_degree_one_is_zero_map() {
        let frame = Frame::new(p22());
        let m = frame.matrix_of(FieldId::Dy(1, 2), 1).unwrap();
        assert_eq!((m.rows(), m.cols()), (0, 12));
        assert!(m.is_zero());
        let m3 = frame.matrix_of(FieldId::Dy(1, 2), 2).unwrap();
        assert_eq!(rank(&m3), 2);
    }

    #[test]
    fn l11_on_linear_spinors_has_rank_dim_s() {
        let frame = Frame::new(p22());
        let m = frame.matrix_of(FieldId::L(1, 1), 1).unwrap();
        assert_eq!((m.rows(), m.cols()), (2, 12));
        assert_eq!(rank(&m), 2);
    }

    #[test]
    fn matrices_agree_with_operators() {
        let p = Params::new(2, 2).unwrap();
        let frame = Frame::new(p);
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let fields = FieldId::all(&p);
        for trial in 0..100 {
            let d = trial % 5;
            let f = fields[trial % fields.len()];
            let src = frame.basis(d);
            let poly = src.random_element(&mut rng);
            let m = frame.matrix_of(f, d).unwrap();
            let image = apply_field(&poly, f).unwrap();
            let via_matrix = m.mul_vec(&src.coords(&poly).unwrap());
            if d < f.shift() {
                assert!(image.is_zero());
            } else {
                assert_eq!(
                    frame.basis(d - f.shift()).coords(&image).unwrap(),
                    via_matrix,
                    "{f} d={d}"
                );
            }
        }
    }

    #[test]
    fn bracket_examples() {
        let p = p22();
        let frame = Frame::new(p);
        let b = frame.basis(3);
        for idx in 0..b.len() {
            let f = b.basis_poly(idx);
            let l11 = |g: &PolySpinor| apply_l(g, 1, 1).unwrap();
            let l12 = |g: &PolySpinor| apply_l(g, 1, 2).unwrap();
            let l22 = |g: &PolySpinor| apply_l(g, 2, 2).unwrap();
            let r12 = |g: &PolySpinor| apply_r(g, 1, 2).unwrap();
            assert_eq!(l11(&l12(&f)).sub(&l12(&l11(&f))), f.diff_y(1, 2).unwrap());
            assert!(l11(&l22(&f)).sub(&l22(&l11(&f))).is_zero());
            assert!(l11(&r12(&f)).sub(&r12(&l11(&f))).is_zero());
        }
    }

    #[test]
    fn bracket_report_passes_small_cases() {
        for (n, k) in [(2, 2), (2, 3)] {
            let frame = Frame::new(Params::new(n, k).unwrap());
            for d in 0..=3 {
                let r = bracket_report(&frame, d).unwrap();
                assert!(r.passed(), "{r:?}");
            }
        }
    }

    #[test]
    fn expected_bracket_signs() {
        assert_eq!(
            expected_bracket(FieldId::R(1, 2), FieldId::R(1, 1)),
            vec![(1, FieldId::Dy(1, 2))]
        );
        assert_eq!(
            expected_bracket(FieldId::L(1, 2), FieldId::L(1, 1)),
            vec![(-1, FieldId::Dy(1, 2))]
        );
        assert!(expected_bracket(FieldId::L(1, 1), FieldId::R(1, 2)).is_empty());
    }
}
