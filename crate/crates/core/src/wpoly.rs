//! Weighted-graded polynomials on the affine chart with spinor values.
//!
//! Coordinates are `x_{αi}` (weight 1) for `α ∈ 1..=n+1`, `i ∈ 1..=k` and
//! `y_{rs}` (weight 2) for `1 ≤ r < s ≤ k`. Only `r < s` is stored; `y_{sr}`
//! enters as `−y_{rs}` through the derivative convention `∂_{y_{sr}} = −∂_{y_{rs}}`.

use std::collections::{BTreeMap, HashMap};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::clifford::GammaRep;
use crate::error::{Error, Result};
use crate::exactnum::{GaussRat, Vector};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Params {
    pub n: usize,
    pub k: usize,
}

impl Params {
    pub fn new(n: usize, k: usize) -> Result<Self> {
        if n < 2 || k < 2 {
            return Err(Error::InvalidParams(format!(
                "need n >= 2 and k >= 2, got n = {n}, k = {k}"
            )));
        }
        Ok(Params { n, k })
    }

    /// Dimension `n + 1` of the Clifford space.
    pub fn m(&self) -> usize {
        self.n + 1
    }

    pub fn num_x(&self) -> usize {
        (self.n + 1) * self.k
    }

    pub fn num_y(&self) -> usize {
        self.k * (self.k - 1) / 2
    }

    /// Spinor dimension `2^⌊(n+1)/2⌋`.
    pub fn dim_s(&self) -> usize {
        1 << self.n.div_ceil(2)
    }

    /// Row-major slot of `x_{αi}` (1-based indices).
    pub fn x_index(&self, alpha: usize, i: usize) -> usize {
        debug_assert!((1..=self.n + 1).contains(&alpha) && (1..=self.k).contains(&i));
        (alpha - 1) * self.k + (i - 1)
    }

    /// Slot of `y_{rs}` for `r < s` in the order (1,2),(1,3),…,(k−1,k).
    pub fn y_index(&self, r: usize, s: usize) -> usize {
        debug_assert!(1 <= r && r < s && s <= self.k);
        let before: usize = (1..r).map(|q| self.k - q).sum();
        before + (s - r - 1)
    }

    pub fn y_pairs(&self) -> Vec<(usize, usize)> {
        (1..=self.k)
            .flat_map(|r| (r + 1..=self.k).map(move |s| (r, s)))
            .collect()
    }

    pub(crate) fn check_x(&self, alpha: usize, i: usize) -> Result<()> {
        if alpha == 0 || alpha > self.n + 1 || i == 0 || i > self.k {
            return Err(Error::Index(format!(
                "x_({alpha},{i}) outside 1..={} x 1..={}",
                self.n + 1,
                self.k
            )));
        }
        Ok(())
    }

    pub(crate) fn check_y(&self, r: usize, s: usize) -> Result<()> {
        if r == s {
            return Err(Error::Index(format!("y_({r},{s}) needs r != s")));
        }
        if r == 0 || s == 0 || r > self.k || s > self.k {
            return Err(Error::Index(format!("y_({r},{s}) outside 1..={}", self.k)));
        }
        Ok(())
    }
}

/// A coordinate variable.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Var {
    X(usize, usize),
    /// `y_{rs}` with `r < s`.
    Y(usize, usize),
}

impl Var {
    pub fn weight(&self) -> u32 {
        match self {
            Var::X(..) => 1,
            Var::Y(..) => 2,
        }
    }
}

/// A monomial in the `x` and `y` variables. Ordered by weighted degree, then
/// lexicographically on the `x` exponents (row-major), then on the `y`s.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Monomial {
    wdeg: u32,
    xexp: Vec<u32>,
    yexp: Vec<u32>,
}

impl Monomial {
    pub fn new(xexp: Vec<u32>, yexp: Vec<u32>) -> Self {
        let wdeg = xexp.iter().sum::<u32>() + 2 * yexp.iter().sum::<u32>();
        Monomial { wdeg, xexp, yexp }
    }

    pub fn one(p: &Params) -> Self {
        Monomial {
            wdeg: 0,
            xexp: vec![0; p.num_x()],
            yexp: vec![0; p.num_y()],
        }
    }

    pub fn var(p: &Params, v: Var) -> Self {
        Self::one(p).times(p, v)
    }

    pub fn wdeg(&self) -> u32 {
        self.wdeg
    }

    pub fn xexp(&self) -> &[u32] {
        &self.xexp
    }

    pub fn yexp(&self) -> &[u32] {
        &self.yexp
    }

    pub fn times(&self, p: &Params, v: Var) -> Self {
        let mut m = self.clone();
        match v {
            Var::X(a, i) => m.xexp[p.x_index(a, i)] += 1,
            Var::Y(r, s) => m.yexp[p.y_index(r, s)] += 1,
        }
        m.wdeg += v.weight();
        m
    }

    /// `∂m/∂v = e · m'`, or `None` when `v` does not occur.
    pub fn derivative(&self, p: &Params, v: Var) -> Option<(u32, Monomial)> {
        let (slot, w) = match v {
            Var::X(a, i) => (&self.xexp[p.x_index(a, i)], 1),
            Var::Y(r, s) => (&self.yexp[p.y_index(r, s)], 2),
        };
        let e = *slot;
        if e == 0 {
            return None;
        }
        let mut m = self.clone();
        match v {
            Var::X(a, i) => m.xexp[p.x_index(a, i)] -= 1,
            Var::Y(r, s) => m.yexp[p.y_index(r, s)] -= 1,
        }
        m.wdeg -= w;
        Some((e, m))
    }

    /// True on the initial slice: no `x_{n+1,·}` and no `y`.
    pub fn on_slice(&self, p: &Params) -> bool {
        self.yexp.iter().all(|&e| e == 0)
            && (1..=p.k).all(|i| self.xexp[p.x_index(p.n + 1, i)] == 0)
    }

    pub fn is_y_free(&self) -> bool {
        self.yexp.iter().all(|&e| e == 0)
    }
}

/// All exponent vectors of length `len` summing to `total`.
fn compositions(total: u32, len: usize) -> Vec<Vec<u32>> {
    fn rec(total: u32, len: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if len == 1 {
            cur.push(total);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for e in 0..=total {
            cur.push(e);
            rec(total - e, len - 1, cur, out);
            cur.pop();
        }
    }
    if len == 0 {
        return if total == 0 {
            vec![Vec::new()]
        } else {
            Vec::new()
        };
    }
    let mut out = Vec::new();
    rec(total, len, &mut Vec::with_capacity(len), &mut out);
    out
}

/// The monomials of weighted degree `d`, each once, in canonical order.
pub fn enumerate_monomials(p: &Params, d: usize) -> Vec<Monomial> {
    let d = d as u32;
    let mut out = Vec::new();
    for b in 0..=d / 2 {
        let ys = compositions(b, p.num_y());
        for xe in compositions(d - 2 * b, p.num_x()) {
            for ye in &ys {
                out.push(Monomial::new(xe.clone(), ye.clone()));
            }
        }
    }
    out.sort();
    out
}

/// Closed-form size of the degree-`d` component of `ℝ[x,y]` (without spinors).
pub fn monomial_count(p: &Params, d: usize) -> u128 {
    let (nx, ny) = (p.num_x() as u128, p.num_y() as u128);
    (0..=d / 2)
        .map(|b| {
            let a = (d - 2 * b) as u128;
            binomial(nx + a - 1, a)
                * if ny == 0 {
                    u128::from(b == 0)
                } else {
                    binomial(ny + b as u128 - 1, b as u128)
                }
        })
        .sum()
}

/// `C(n, r)`, zero when `r > n`.
pub fn binomial(n: u128, r: u128) -> u128 {
    if r > n {
        return 0;
    }
    let r = r.min(n - r);
    (0..r).fold(1u128, |acc, i| acc * (n - i) / (i + 1))
}

/// `C(top, r)` for a possibly negative `top`, zero when `top < r`.
pub fn binomial_signed(top: i64, r: i64) -> u128 {
    if r < 0 || top < r {
        0
    } else {
        binomial(top as u128, r as u128)
    }
}

/// An `𝕊`-valued polynomial: one coefficient map per spinor component.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PolySpinor {
    params: Params,
    comps: Vec<BTreeMap<Monomial, GaussRat>>,
}

impl PolySpinor {
    pub fn zero(params: Params, dim_s: usize) -> Self {
        PolySpinor {
            params,
            comps: vec![BTreeMap::new(); dim_s],
        }
    }

    /// The constant polynomial with value `s`.
    pub fn constant(params: Params, s: &[GaussRat]) -> Self {
        let mut p = Self::zero(params, s.len());
        for (t, c) in s.iter().enumerate() {
            p.add_term(t, Monomial::one(&params), c.clone());
        }
        p
    }

    /// `c · m · e_spin`.
    pub fn term(params: Params, dim_s: usize, spin: usize, m: Monomial, c: GaussRat) -> Self {
        let mut p = Self::zero(params, dim_s);
        p.add_term(spin, m, c);
        p
    }

    pub fn params(&self) -> Params {
        self.params
    }

    pub fn dim_s(&self) -> usize {
        self.comps.len()
    }

    pub fn component(&self, spin: usize) -> &BTreeMap<Monomial, GaussRat> {
        &self.comps[spin]
    }

    pub fn add_term(&mut self, spin: usize, m: Monomial, c: GaussRat) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.comps[spin].entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += &c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    /// `(spin, monomial, coefficient)` in canonical order.
    pub fn terms(&self) -> impl Iterator<Item = (usize, &Monomial, &GaussRat)> {
        self.comps
            .iter()
            .enumerate()
            .flat_map(|(t, c)| c.iter().map(move |(m, v)| (t, m, v)))
    }

    pub fn num_terms(&self) -> usize {
        self.comps.iter().map(BTreeMap::len).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(BTreeMap::is_empty)
    }

    /// The common weighted degree of all terms; `None` if mixed. The zero
    /// polynomial is homogeneous of every degree and reports `Some(None)`.
    pub fn homogeneous_degree(&self) -> Option<Option<usize>> {
        let mut deg = None;
        for (_, m, _) in self.terms() {
            match deg {
                None => deg = Some(m.wdeg()),
                Some(d) if d != m.wdeg() => return None,
                _ => {}
            }
        }
        Some(deg.map(|d| d as usize))
    }

    pub fn is_homogeneous_of(&self, d: usize) -> bool {
        self.terms().all(|(_, m, _)| m.wdeg() as usize == d)
    }

    pub fn add(&self, other: &PolySpinor) -> PolySpinor {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    pub fn add_assign(&mut self, other: &PolySpinor) {
        assert_eq!(self.dim_s(), other.dim_s());
        for (t, m, c) in other.terms() {
            self.add_term(t, m.clone(), c.clone());
        }
    }

    pub fn sub(&self, other: &PolySpinor) -> PolySpinor {
        self.add(&other.scale(&GaussRat::from(-1)))
    }

    pub fn scale(&self, s: &GaussRat) -> PolySpinor {
        if s.is_zero() {
            return Self::zero(self.params, self.dim_s());
        }
        PolySpinor {
            params: self.params,
            comps: self
                .comps
                .iter()
                .map(|c| c.iter().map(|(m, v)| (m.clone(), v * s)).collect())
                .collect(),
        }
    }

    pub(crate) fn diff_var(&self, v: Var) -> PolySpinor {
        let p = self.params;
        let mut out = Self::zero(p, self.dim_s());
        for (t, m, c) in self.terms() {
            if let Some((e, dm)) = m.derivative(&p, v) {
                out.add_term(t, dm, c * &GaussRat::from(e as i64));
            }
        }
        out
    }

    /// `∂P/∂x_{αi}`.
    pub fn diff_x(&self, alpha: usize, i: usize) -> Result<PolySpinor> {
        self.params.check_x(alpha, i)?;
        Ok(self.diff_var(Var::X(alpha, i)))
    }

    /// `∂P/∂y_{rs}` with `∂_{y_{sr}} = −∂_{y_{rs}}`; `r = s` is rejected.
    pub fn diff_y(&self, r: usize, s: usize) -> Result<PolySpinor> {
        self.params.check_y(r, s)?;
        Ok(self.diff_y_unchecked(r, s))
    }

    /// Same as [`diff_y`](Self::diff_y) but returns zero for `r = s`.
    pub(crate) fn diff_y_unchecked(&self, r: usize, s: usize) -> PolySpinor {
        use std::cmp::Ordering;
        match r.cmp(&s) {
            Ordering::Less => self.diff_var(Var::Y(r, s)),
            Ordering::Greater => self.diff_var(Var::Y(s, r)).scale(&GaussRat::from(-1)),
            Ordering::Equal => Self::zero(self.params, self.dim_s()),
        }
    }

    /// Multiplication by a coordinate variable.
    pub fn mul_var(&self, v: Var) -> Result<PolySpinor> {
        match v {
            Var::X(a, i) => self.params.check_x(a, i)?,
            Var::Y(r, s) if r < s => self.params.check_y(r, s)?,
            Var::Y(r, s) => return Err(Error::Index(format!("y_({r},{s}) must have r < s"))),
        }
        Ok(self.mul_var_unchecked(v))
    }

    pub(crate) fn mul_var_unchecked(&self, v: Var) -> PolySpinor {
        let p = self.params;
        PolySpinor {
            params: p,
            comps: self
                .comps
                .iter()
                .map(|c| {
                    c.iter()
                        .map(|(m, val)| (m.times(&p, v), val.clone()))
                        .collect()
                })
                .collect(),
        }
    }

    /// Clifford multiplication of the spinor values by `ε_α`.
    pub fn clifford_mul(&self, rep: &GammaRep, alpha: usize) -> PolySpinor {
        assert_eq!(rep.dim_s(), self.dim_s());
        let mut out = Self::zero(self.params, self.dim_s());
        for (t, m, c) in self.terms() {
            for (t2, g) in rep.column(alpha, t) {
                out.add_term(*t2, m.clone(), g * c);
            }
        }
        out
    }

    /// Keeps only the terms whose monomial satisfies `keep`.
    pub fn filter_terms(&self, keep: impl Fn(&Monomial) -> bool) -> PolySpinor {
        PolySpinor {
            params: self.params,
            comps: self
                .comps
                .iter()
                .map(|c| {
                    c.iter()
                        .filter(|(m, _)| keep(m))
                        .map(|(m, v)| (m.clone(), v.clone()))
                        .collect()
                })
                .collect(),
        }
    }
}

/// Ordered basis `(monomial, spinor index)` of a weighted-homogeneous
/// component (or of a subset of its monomials, see [`HomBasis::filtered`]).
#[derive(Clone, Debug)]
pub struct HomBasis {
    params: Params,
    degree: usize,
    dim_s: usize,
    monomials: Vec<Monomial>,
    index: HashMap<Monomial, usize>,
}

impl HomBasis {
    pub fn new(params: Params, degree: usize, dim_s: usize) -> Self {
        Self::from_monomials(params, degree, dim_s, enumerate_monomials(&params, degree))
    }

    /// Degree-`d` basis restricted to monomials accepted by `keep`.
    pub fn filtered(
        params: Params,
        degree: usize,
        dim_s: usize,
        keep: impl Fn(&Monomial) -> bool,
    ) -> Self {
        let monos = enumerate_monomials(&params, degree)
            .into_iter()
            .filter(|m| keep(m))
            .collect();
        Self::from_monomials(params, degree, dim_s, monos)
    }

    fn from_monomials(
        params: Params,
        degree: usize,
        dim_s: usize,
        monomials: Vec<Monomial>,
    ) -> Self {
        let index = monomials
            .iter()
            .enumerate()
            .map(|(i, m)| (m.clone(), i))
            .collect();
        HomBasis {
            params,
            degree,
            dim_s,
            monomials,
            index,
        }
    }

    pub fn params(&self) -> Params {
        self.params
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn dim_s(&self) -> usize {
        self.dim_s
    }

    pub fn len(&self) -> usize {
        self.monomials.len() * self.dim_s
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn monomials(&self) -> &[Monomial] {
        &self.monomials
    }

    /// The `idx`-th basis element as `(monomial, spin)`.
    pub fn element(&self, idx: usize) -> (&Monomial, usize) {
        (&self.monomials[idx / self.dim_s], idx % self.dim_s)
    }

    pub fn position(&self, m: &Monomial, spin: usize) -> Option<usize> {
        self.index.get(m).map(|i| i * self.dim_s + spin)
    }

    pub fn basis_poly(&self, idx: usize) -> PolySpinor {
        let (m, t) = self.element(idx);
        PolySpinor::term(self.params, self.dim_s, t, m.clone(), GaussRat::one())
    }

    /// Coordinates of `p`; fails if `p` has a term outside this basis.
    pub fn coords(&self, p: &PolySpinor) -> Result<Vector> {
        if p.dim_s() != self.dim_s {
            return Err(Error::Validation(format!(
                "spinor dimension {} != {}",
                p.dim_s(),
                self.dim_s
            )));
        }
        let mut v = vec![GaussRat::zero(); self.len()];
        for (t, m, c) in p.terms() {
            let pos = self.position(m, t).ok_or_else(|| {
                Error::Validation(format!(
                    "term of weighted degree {} not in the degree-{} basis",
                    m.wdeg(),
                    self.degree
                ))
            })?;
            v[pos] = c.clone();
        }
        Ok(v)
    }

    pub fn from_coords(&self, v: &[GaussRat]) -> PolySpinor {
        assert_eq!(v.len(), self.len());
        let mut p = PolySpinor::zero(self.params, self.dim_s);
        for (idx, c) in v.iter().enumerate() {
            if !c.is_zero() {
                let (m, t) = self.element(idx);
                p.add_term(t, m.clone(), c.clone());
            }
        }
        p
    }

    /// A random element with small Gaussian-integer coefficients.
    pub fn random_element<R: Rng>(&self, rng: &mut R) -> PolySpinor {
        let v: Vector = (0..self.len()).map(|_| random_coeff(rng)).collect();
        self.from_coords(&v)
    }
}

/// Small random Gaussian integer, zero with probability about one third.
pub fn random_coeff<R: Rng>(rng: &mut R) -> GaussRat {
    if rng.gen_range(0..3) == 0 {
        return GaussRat::zero();
    }
    GaussRat::from_ints(rng.gen_range(-3..=3), rng.gen_range(-2..=2))
}

/// On-disk term format.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermJson {
    pub spin: usize,
    pub xexp: Vec<u32>,
    pub yexp: Vec<u32>,
    pub re: String,
    pub im: String,
}

pub fn to_terms(p: &PolySpinor) -> Vec<TermJson> {
    p.terms()
        .map(|(t, m, c)| TermJson {
            spin: t,
            xexp: m.xexp().to_vec(),
            yexp: m.yexp().to_vec(),
            re: GaussRat::part_string(c.re()),
            im: GaussRat::part_string(c.im()),
        })
        .collect()
}

pub fn from_terms(params: Params, dim_s: usize, terms: &[TermJson]) -> Result<PolySpinor> {
    let mut p = PolySpinor::zero(params, dim_s);
    for (idx, t) in terms.iter().enumerate() {
        if t.spin >= dim_s {
            return Err(Error::Validation(format!(
                "term {idx}: spin {} >= {dim_s}",
                t.spin
            )));
        }
        if t.xexp.len() != params.num_x() || t.yexp.len() != params.num_y() {
            return Err(Error::Validation(format!(
                "term {idx}: expected {} x-exponents and {} y-exponents",
                params.num_x(),
                params.num_y()
            )));
        }
        let c = GaussRat::parse_parts(&t.re, &t.im)
            .map_err(|e| Error::Validation(format!("term {idx}: {e}")))?;
        p.add_term(t.spin, Monomial::new(t.xexp.clone(), t.yexp.clone()), c);
    }
    Ok(p)
}

pub fn to_json(p: &PolySpinor) -> String {
    serde_json::to_string_pretty(&to_terms(p)).expect("terms serialize")
}

pub fn from_json(params: Params, dim_s: usize, s: &str) -> Result<PolySpinor> {
    let terms: Vec<TermJson> = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
    from_terms(params, dim_s, &terms)
}
