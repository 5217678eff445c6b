//! The Spencer complex built from the right-invariant coframe.
//!
//! Forms are spanned by the anticommuting generators `ϖ_l` (dual to the field
//! at position `l` of a [`BasisOrder`]) and `e^{rs}`, `r < s`, with
//! polynomial-spinor coefficients. A basis form keeps its `ϖ`-legs sorted by
//! position, followed by its `e`-legs in lexicographic order. The
//! differential acts by
//!
//! ```text
//! δf       = Σ_l ϖ_l ⊗ R_{X_l} f − Σ_{r<s} e^{rs} ⊗ ∂_{y_{rs}} f
//! δϖ_l     = 0
//! δe^{rs}  = −Σ_α ϖ_{(r,α)} ∧ ϖ_{(s,α)}
//! δ(f ω)   = δf ∧ ω + f δω
//! ```
//!
//! where `ϖ_{(r,α)}` is dual to `e_r ⊗ ε_α`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use itertools::Itertools;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::dirac::{BasisOrder, KDirac};
use crate::error::{Error, Result};
use crate::exactnum::{Echelon, GaussRat, SparseMat, Vector};
use crate::nilframe::{apply_field, FieldId};
use crate::wpoly::{HomBasis, Params, PolySpinor};

/// One exterior generator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Gen {
    /// `ϖ_l`, `l` a 1-based position in the basis order.
    Pi(usize),
    /// `e^{rs}` with `r < s`.
    E(usize, usize),
}

impl fmt::Display for Gen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gen::Pi(l) => write!(f, "w{l}"),
            Gen::E(r, s) => write!(f, "e{r}{s}"),
        }
    }
}

/// A wedge of distinct generators in canonical order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct FormBasisElem {
    gens: Vec<Gen>,
}

impl FormBasisElem {
    /// The empty wedge (the 0-form basis element).
    pub fn unit() -> Self {
        FormBasisElem { gens: Vec::new() }
    }

    /// Canonical element from `ϖ` positions and `e` pairs; the sign of the
    /// reordering is returned alongside, `None` if a leg repeats.
    pub fn from_gens(gens: Vec<Gen>) -> Option<(i64, Self)> {
        normalize(gens)
    }

    pub fn gens(&self) -> &[Gen] {
        &self.gens
    }

    /// Number of `ϖ`-legs.
    pub fn a(&self) -> usize {
        self.gens.iter().filter(|g| matches!(g, Gen::Pi(_))).count()
    }

    /// Number of `e`-legs.
    pub fn b(&self) -> usize {
        self.gens.len() - self.a()
    }

    pub fn degree(&self) -> usize {
        self.gens.len()
    }
}

impl fmt::Display for FormBasisElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.gens.is_empty() {
            return write!(f, "1");
        }
        write!(f, "{}", self.gens.iter().join("^"))
    }
}

/// Sorts the generators, tracking the permutation sign.
fn normalize(mut gens: Vec<Gen>) -> Option<(i64, FormBasisElem)> {
    let mut sign = 1;
    for i in 1..gens.len() {
        let mut j = i;
        while j > 0 && gens[j - 1] > gens[j] {
            gens.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
        if j > 0 && gens[j - 1] == gens[j] {
            return None;
        }
    }
    Some((sign, FormBasisElem { gens }))
}

/// A form with polynomial-spinor coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpencerForm {
    params: Params,
    dim_s: usize,
    terms: BTreeMap<FormBasisElem, PolySpinor>,
}

impl SpencerForm {
    pub fn zero(params: Params, dim_s: usize) -> Self {
        SpencerForm {
            params,
            dim_s,
            terms: BTreeMap::new(),
        }
    }

    pub fn term(elem: FormBasisElem, coeff: PolySpinor) -> Self {
        let mut f = Self::zero(coeff.params(), coeff.dim_s());
        f.add_term(elem, coeff);
        f
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&FormBasisElem, &PolySpinor)> {
        self.terms.iter()
    }

    pub fn add_term(&mut self, elem: FormBasisElem, coeff: PolySpinor) {
        if coeff.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(elem) {
            Entry::Vacant(e) => {
                e.insert(coeff);
            }
            Entry::Occupied(mut e) => {
                e.get_mut().add_assign(&coeff);
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    /// Adds `sign · coeff ⊗ (g_1 ∧ … ∧ g_m)` for arbitrarily ordered legs.
    fn add_wedge(&mut self, gens: Vec<Gen>, sign: i64, coeff: &PolySpinor) {
        if let Some((s, elem)) = normalize(gens) {
            self.add_term(elem, coeff.scale(&GaussRat::from(s * sign)));
        }
    }

    pub fn add(&self, other: &SpencerForm) -> SpencerForm {
        let mut out = self.clone();
        for (e, c) in other.terms() {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &SpencerForm) -> SpencerForm {
        self.add(&other.scale(&GaussRat::from(-1)))
    }

    pub fn scale(&self, s: &GaussRat) -> SpencerForm {
        let mut out = Self::zero(self.params, self.dim_s);
        for (e, c) in self.terms() {
            out.add_term(e.clone(), c.scale(s));
        }
        out
    }

    /// `(form degree a + b, weight a + 2b + m)` shared by every term, or an
    /// error when the form mixes them. `None` for the zero form.
    pub fn grading(&self) -> Result<Option<(usize, usize)>> {
        let mut found = None;
        for (e, c) in self.terms() {
            let m = match c.homogeneous_degree() {
                Some(Some(m)) => m,
                _ => {
                    return Err(Error::Validation(format!(
                        "coefficient of {e} is not weighted-homogeneous"
                    )))
                }
            };
            let g = (e.degree(), e.a() + 2 * e.b() + m);
            match found {
                None => found = Some(g),
                Some(h) if h != g => {
                    return Err(Error::Validation(format!(
                        "form mixes gradings {h:?} and {g:?}"
                    )));
                }
                _ => {}
            }
        }
        Ok(found)
    }
}

impl fmt::Display for SpencerForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(e, c)| format!("{e} ⊗ [{} terms]", c.num_terms()))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// A position of the complex `⊕_{a+b=r} Λ^a ∧ Λ^b ⊗ HB(w − a − 2b)`.
#[derive(Clone, Debug)]
pub struct SpencerSpace {
    pub position: usize,
    pub weight: usize,
    blocks: Vec<(FormBasisElem, Arc<HomBasis>, usize)>,
    offsets: HashMap<FormBasisElem, usize>,
    dim: usize,
}

impl SpencerSpace {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coords(&self, f: &SpencerForm) -> Result<Vector> {
        let mut v = vec![GaussRat::zero(); self.dim];
        for (e, c) in f.terms() {
            let &bi = self.offsets.get(e).ok_or_else(|| {
                Error::Validation(format!(
                    "{e} does not belong to position {} weight {}",
                    self.position, self.weight
                ))
            })?;
            let (_, basis, off) = &self.blocks[bi];
            for (k, x) in basis.coords(c)?.into_iter().enumerate() {
                v[off + k] = x;
            }
        }
        Ok(v)
    }

    /// All basis forms `elem ⊗ basis polynomial`, in coordinate order.
    pub fn basis_forms(&self) -> impl Iterator<Item = SpencerForm> + '_ {
        self.blocks.iter().flat_map(|(e, basis, _)| {
            (0..basis.len()).map(move |k| SpencerForm::term(e.clone(), basis.basis_poly(k)))
        })
    }

    /// Blocks `(elem, coefficient basis)`.
    pub fn blocks(&self) -> impl Iterator<Item = (&FormBasisElem, &Arc<HomBasis>)> {
        self.blocks.iter().map(|(e, b, _)| (e, b))
    }
}

/// The complex for fixed parameters and basis order.
#[derive(Debug)]
pub struct SpencerComplex {
    engine: Arc<KDirac>,
    order: BasisOrder,
}

impl SpencerComplex {
    pub fn new(engine: Arc<KDirac>, order: BasisOrder) -> Self {
        SpencerComplex { engine, order }
    }

    pub fn preferred(engine: Arc<KDirac>) -> Self {
        let order = BasisOrder::preferred(&engine.params());
        Self::new(engine, order)
    }

    pub fn params(&self) -> Params {
        self.engine.params()
    }

    pub fn order(&self) -> &BasisOrder {
        &self.order
    }

    /// Number of `ϖ` generators, `k(n+1)`.
    pub fn num_pi(&self) -> usize {
        self.order.len()
    }

    /// `ϖ_{(r,α)}` as a generator.
    pub fn pi(&self, r: usize, alpha: usize) -> Gen {
        Gen::Pi(self.order.position(r, alpha))
    }

    fn check(&self, f: &SpencerForm) -> Result<()> {
        if f.params != self.params() || f.dim_s != self.engine.dim_s() {
            return Err(Error::Validation(
                "form belongs to different parameters".into(),
            ));
        }
        f.grading().map(|_| ())
    }

    /// `δe^{rs}` as a list of `(sign, leg pair)`.
    fn delta_e(&self, r: usize, s: usize) -> Vec<(i64, [Gen; 2])> {
        (1..=self.params().m())
            .map(|a| (-1, [self.pi(r, a), self.pi(s, a)]))
            .collect()
    }

    pub fn delta(&self, f: &SpencerForm) -> Result<SpencerForm> {
        self.check(f)?;
        let params = self.params();
        let mut out = SpencerForm::zero(params, f.dim_s);
        for (elem, coeff) in f.terms() {
            let legs = elem.gens();
            for l in 1..=self.num_pi() {
                let c = apply_field(coeff, self.order.field(l))?;
                if !c.is_zero() {
                    out.add_wedge(
                        std::iter::once(Gen::Pi(l))
                            .chain(legs.iter().copied())
                            .collect(),
                        1,
                        &c,
                    );
                }
            }
            for (r, s) in params.y_pairs() {
                let c = coeff.diff_y(r, s)?;
                if !c.is_zero() {
                    out.add_wedge(
                        std::iter::once(Gen::E(r, s))
                            .chain(legs.iter().copied())
                            .collect(),
                        -1,
                        &c,
                    );
                }
            }
            for (t, g) in legs.iter().enumerate() {
                if let Gen::E(r, s) = *g {
                    let leg_sign = if t % 2 == 0 { 1 } else { -1 };
                    for (sg, pair) in self.delta_e(r, s) {
                        let gens = legs[..t]
                            .iter()
                            .chain(pair.iter())
                            .chain(&legs[t + 1..])
                            .copied()
                            .collect();
                        out.add_wedge(gens, leg_sign * sg, coeff);
                    }
                }
            }
        }
        Ok(out)
    }

    /// `ℒ_X F` for `X = R_{αi}` or `∂_{y_{rs}}`.
    pub fn lie_derivative(&self, f: &SpencerForm, x: FieldId) -> Result<SpencerForm> {
        self.check(f)?;
        x.validate(&self.params())?;
        if let FieldId::L(..) = x {
            return Err(Error::Validation(
                "Lie derivatives are defined for R and Dy fields".into(),
            ));
        }
        let mut out = SpencerForm::zero(self.params(), f.dim_s);
        for (elem, coeff) in f.terms() {
            out.add_term(elem.clone(), apply_field(coeff, x)?);
            let FieldId::R(alpha, i) = x else { continue };
            let legs = elem.gens();
            for (t, g) in legs.iter().enumerate() {
                let Gen::E(r, s) = *g else { continue };
                let mut replace = |leg: Gen, sign: i64| {
                    let gens = legs[..t]
                        .iter()
                        .chain(std::iter::once(&leg))
                        .chain(&legs[t + 1..])
                        .copied()
                        .collect();
                    out.add_wedge(gens, sign, coeff);
                };
                if i == s {
                    replace(self.pi(r, alpha), 1);
                }
                if i == r {
                    replace(self.pi(s, alpha), -1);
                }
            }
        }
        Ok(out)
    }

    /// Contraction with the field at basis position `p`.
    pub fn insertion(&self, f: &SpencerForm, p: usize) -> Result<SpencerForm> {
        self.check(f)?;
        if p == 0 || p > self.num_pi() {
            return Err(Error::Index(format!(
                "position {p} outside 1..={}",
                self.num_pi()
            )));
        }
        let mut out = SpencerForm::zero(self.params(), f.dim_s);
        for (elem, coeff) in f.terms() {
            if let Some(t) = elem.gens().iter().position(|g| *g == Gen::Pi(p)) {
                let mut gens = elem.gens().to_vec();
                gens.remove(t);
                let sign = if t % 2 == 0 { 1 } else { -1 };
                out.add_wedge(gens, sign, coeff);
            }
        }
        Ok(out)
    }

    /// Canonical basis elements with `a` `ϖ`-legs and `b` `e`-legs.
    pub fn basis_elems(&self, a: usize, b: usize) -> Vec<FormBasisElem> {
        let pairs = self.params().y_pairs();
        let pis: Vec<Vec<Gen>> = (1..=self.num_pi()).map(Gen::Pi).combinations(a).collect();
        let es: Vec<Vec<Gen>> = pairs
            .iter()
            .map(|&(r, s)| Gen::E(r, s))
            .combinations(b)
            .collect();
        pis.iter()
            .cartesian_product(es.iter())
            .map(|(p, e)| FormBasisElem {
                gens: p.iter().chain(e).copied().collect(),
            })
            .collect()
    }

    /// The space at `position` and total weight `weight`.
    pub fn space(&self, position: usize, weight: usize) -> SpencerSpace {
        let frame = self.engine.frame();
        let mut blocks = Vec::new();
        let mut offsets = HashMap::new();
        let mut dim = 0;
        for b in 0..=position {
            let a = position - b;
            if a + 2 * b > weight {
                continue;
            }
            let basis = frame.basis(weight - a - 2 * b);
            for e in self.basis_elems(a, b) {
                offsets.insert(e.clone(), blocks.len());
                blocks.push((e, Arc::clone(&basis), dim));
                dim += basis.len();
            }
        }
        SpencerSpace {
            position,
            weight,
            blocks,
            offsets,
            dim,
        }
    }

    /// Matrix of `δ` from `src` to `tgt` (positions `r` and `r + 1`).
    pub fn delta_matrix(&self, src: &SpencerSpace, tgt: &SpencerSpace) -> Result<SparseMat> {
        let mut cols = Vec::with_capacity(src.dim());
        for f in src.basis_forms() {
            cols.push(tgt.coords(&self.delta(&f)?)?);
        }
        Ok(columns_to_matrix(tgt.dim(), &cols))
    }

    /// `δ(δF) = 0` for every basis form with `a` `ϖ`-legs, `b` `e`-legs and
    /// coefficients of degree `m`.
    pub fn verify_delta_squared(&self, a: usize, b: usize, m: usize) -> Result<CheckReport> {
        let basis = self.engine.frame().basis(m);
        let mut checked = 0;
        for e in self.basis_elems(a, b) {
            for k in 0..basis.len() {
                let f = SpencerForm::term(e.clone(), basis.basis_poly(k));
                checked += 1;
                let dd = self.delta(&self.delta(&f)?)?;
                if !dd.is_zero() {
                    return Ok(CheckReport::fail(
                        checked,
                        format!("d^2({e} ⊗ basis {k}) = {dd}"),
                    ));
                }
            }
        }
        Ok(CheckReport::pass(checked))
    }

    /// A random form with `a` `ϖ`-legs, `b` `e`-legs and degree-`m`
    /// coefficients on up to three basis elements.
    pub fn random_form<R: Rng>(&self, a: usize, b: usize, m: usize, rng: &mut R) -> SpencerForm {
        let elems = self.basis_elems(a, b);
        let basis = self.engine.frame().basis(m);
        let mut f = SpencerForm::zero(self.params(), self.engine.dim_s());
        if elems.is_empty() {
            return f;
        }
        for _ in 0..3 {
            let e = elems[rng.gen_range(0..elems.len())].clone();
            f.add_term(e, basis.random_element(rng));
        }
        f
    }

    /// Tri-degrees `(a, b, m)` with `a + b ≥ 1` and `a + 2b + m ≤ 4` that
    /// have at least one basis form; the pool for random sampling.
    fn sample_degrees(&self) -> Vec<(usize, usize, usize)> {
        let ny = self.params().num_y();
        let mut out = Vec::new();
        for a in 0..=3usize.min(self.num_pi()) {
            for b in 0..=2usize.min(ny) {
                for m in 0..=3 {
                    if a + b >= 1 && a + 2 * b + m <= 4 {
                        out.push((a, b, m));
                    }
                }
            }
        }
        out
    }

    /// `ℒ_{R_X} F = i_X δF + δ i_X F` on `samples` random forms, each tested
    /// against every basis field `X`.
    pub fn verify_cartan_formula(&self, samples: usize, seed: u64) -> Result<CheckReport> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let degrees = self.sample_degrees();
        for s in 0..samples {
            let (a, b, m) = degrees[s % degrees.len()];
            let f = self.random_form(a, b, m, &mut rng);
            for p in 1..=self.num_pi() {
                let lhs = self.lie_derivative(&f, self.order.field(p))?;
                let rhs = self
                    .insertion(&self.delta(&f)?, p)?
                    .add(&self.delta(&self.insertion(&f, p)?)?);
                if lhs != rhs {
                    return Ok(CheckReport::fail(
                        s + 1,
                        format!("sample {s} ({a},{b},{m}), X at position {p}"),
                    ));
                }
            }
        }
        Ok(CheckReport::pass(samples))
    }

    /// `ℒ_X δF = δ ℒ_X F` for every `R` field on random forms.
    pub fn verify_lie_commutes(&self, samples: usize, seed: u64) -> Result<CheckReport> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let degrees = self.sample_degrees();
        for s in 0..samples {
            let (a, b, m) = degrees[s % degrees.len()];
            let f = self.random_form(a, b, m, &mut rng);
            for p in 1..=self.num_pi() {
                let x = self.order.field(p);
                let lhs = self.lie_derivative(&self.delta(&f)?, x)?;
                let rhs = self.delta(&self.lie_derivative(&f, x)?)?;
                if lhs != rhs {
                    return Ok(CheckReport::fail(
                        s + 1,
                        format!("sample {s} ({a},{b},{m}), field {x}"),
                    ));
                }
            }
        }
        Ok(CheckReport::pass(samples))
    }

    /// Rank data of `δ` around each requested position at weight `i + 1`.
    /// Position 0 checks injectivity; higher positions check
    /// `rank δ_in + rank δ_out = dim`.
    pub fn verify_exactness(&self, i: usize, positions: &[usize]) -> Result<Vec<ExactnessReport>> {
        let w = i + 1;
        let mut rank_cache: HashMap<usize, usize> = HashMap::new();
        let mut rank_from = |r: usize| -> Result<usize> {
            if let Some(&v) = rank_cache.get(&r) {
                return Ok(v);
            }
            let src = self.space(r, w);
            let tgt = self.space(r + 1, w);
            let v = if src.dim() == 0 || tgt.dim() == 0 {
                0
            } else {
                crate::exactnum::rank(&self.delta_matrix(&src, &tgt)?)
            };
            rank_cache.insert(r, v);
            Ok(v)
        };
        let mut out = Vec::new();
        for &r in positions {
            let dim = self.space(r, w).dim();
            let rank_in = if r == 0 { 0 } else { rank_from(r - 1)? };
            let rank_out = rank_from(r)?;
            out.push(ExactnessReport {
                i,
                position: r,
                dim,
                rank_in,
                rank_out,
                cohomology: dim - rank_in - rank_out,
            });
        }
        Ok(out)
    }

    /// Every coefficient of `δF` is monogenic when the coefficients of `F`
    /// are, checked on all basis forms of the subcomplex at weight `i + 1`.
    pub fn verify_subcomplex_closed(&self, i: usize) -> Result<CheckReport> {
        let w = i + 1;
        let mut checked = 0;
        for r in 0..=w {
            for (a, b) in (0..=r).map(|b| (r - b, b)).filter(|&(a, b)| a + 2 * b <= w) {
                let m = w - a - 2 * b;
                let kernel = self.engine.monogenic_basis(m)?;
                for e in self.basis_elems(a, b) {
                    for g in kernel.polys() {
                        checked += 1;
                        let out = self.delta(&SpencerForm::term(e.clone(), g))?;
                        for (e2, c) in out.terms() {
                            if self.engine.apply_d(c)?.iter().any(|x| !x.is_zero()) {
                                return Ok(CheckReport::fail(
                                    checked,
                                    format!("coefficient of {e2} in d({e} ⊗ f)"),
                                ));
                            }
                        }
                    }
                }
            }
        }
        Ok(CheckReport::pass(checked))
    }

    /// Cohomology dimensions of the subcomplex with monogenic coefficients at
    /// weight `i + 1`, for positions `0..=i+1`.
    pub fn subcomplex_cohomology(&self, i: usize) -> Result<Vec<usize>> {
        let w = i + 1;
        let mut dims = Vec::new();
        let mut ranks = Vec::new();
        for r in 0..=w {
            let tgt = self.space(r + 1, w);
            let mut dim = 0;
            let mut ech = Echelon::new(tgt.dim());
            for (a, b) in (0..=r).map(|b| (r - b, b)).filter(|&(a, b)| a + 2 * b <= w) {
                let kernel = self.engine.monogenic_basis(w - a - 2 * b)?;
                for e in self.basis_elems(a, b) {
                    for g in kernel.polys() {
                        dim += 1;
                        let img = self.delta(&SpencerForm::term(e.clone(), g))?;
                        ech.push_row(crate::exactnum::sparsify(&tgt.coords(&img)?));
                    }
                }
            }
            dims.push(dim);
            ranks.push(ech.rank());
        }
        Ok((0..=w)
            .map(|r| dims[r] - ranks[r] - if r == 0 { 0 } else { ranks[r - 1] })
            .collect())
    }
}

fn columns_to_matrix(rows: usize, cols: &[Vector]) -> SparseMat {
    let triplets = cols.iter().enumerate().flat_map(|(c, v)| {
        v.iter()
            .enumerate()
            .filter(|(_, x)| !x.is_zero())
            .map(move |(r, x)| (r, c, x.clone()))
    });
    SparseMat::from_triplets(rows, cols.len(), triplets.collect::<Vec<_>>())
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckReport {
    pub checked: usize,
    pub failure: Option<String>,
}

impl CheckReport {
    fn pass(checked: usize) -> Self {
        CheckReport {
            checked,
            failure: None,
        }
    }

    fn fail(checked: usize, why: String) -> Self {
        CheckReport {
            checked,
            failure: Some(why),
        }
    }

    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ExactnessReport {
    pub i: usize,
    pub position: usize,
    pub dim: usize,
    pub rank_in: usize,
    pub rank_out: usize,
    pub cohomology: usize,
}

impl ExactnessReport {
    /// Exact in the middle (or injective at position 0).
    pub fn exact(&self) -> bool {
        self.cohomology == 0
    }
}
