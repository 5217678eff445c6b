//! Complex spinors of `(ℝ^m, g)` with `g` positive definite, and Clifford
//! multiplication by the basis vectors `ε_1..ε_m`.
//!
//! Generators are iterated tensor products of Pauli matrices:
//! `γ_{2j-1} = σ3^{⊗(j-1)} ⊗ σ1 ⊗ 1^{⊗(p-j)}`, `γ_{2j} = σ3^{⊗(j-1)} ⊗ σ2 ⊗ 1^{⊗(p-j)}`
//! for `p = ⌊m/2⌋`, and `γ_m = σ3^{⊗p}` when `m` is odd. For even `m` the full
//! (reducible) spinor space is kept.

use crate::error::{Error, Result};
use crate::exactnum::{GaussRat, SparseMat, SparseRow, Vector};

#[derive(Clone, Debug)]
pub struct GammaRep {
    m: usize,
    dim_s: usize,
    gammas: Vec<SparseMat>,
    /// Column view of each generator, `columns[α][t]` is `γ_α e_t`.
    columns: Vec<Vec<SparseRow>>,
}

fn pauli(which: u8) -> SparseMat {
    let g = GaussRat::from_ints;
    let t = match which {
        1 => vec![(0, 1, g(1, 0)), (1, 0, g(1, 0))],
        2 => vec![(0, 1, g(0, -1)), (1, 0, g(0, 1))],
        3 => vec![(0, 0, g(1, 0)), (1, 1, g(-1, 0))],
        _ => unreachable!(),
    };
    SparseMat::from_triplets(2, 2, t)
}

fn kron(a: &SparseMat, b: &SparseMat) -> SparseMat {
    let (br, bc) = (b.rows(), b.cols());
    let triplets = a
        .entries()
        .flat_map(|(i, j, x)| {
            b.entries()
                .map(move |(k, l, y)| (i * br + k, j * bc + l, x * y))
        })
        .collect::<Vec<_>>();
    SparseMat::from_triplets(a.rows() * br, a.cols() * bc, triplets)
}

fn kron_all(factors: &[SparseMat]) -> SparseMat {
    factors
        .iter()
        .fold(SparseMat::identity(1), |acc, f| kron(&acc, f))
}

/// Builds the spinor representation for `m = n + 1 ≥ 3`.
pub fn build_gamma(m: usize) -> Result<GammaRep> {
    if m < 3 {
        return Err(Error::InvalidParams(format!(
            "Clifford dimension m = {m} must be at least 3"
        )));
    }
    let p = m / 2;
    let id2 = SparseMat::identity(2);
    let mut gammas = Vec::with_capacity(m);
    for j in 1..=p {
        for which in [1u8, 2] {
            let mut factors = vec![pauli(3); j - 1];
            factors.push(pauli(which));
            factors.extend(std::iter::repeat_n(id2.clone(), p - j));
            gammas.push(kron_all(&factors));
        }
    }
    if m % 2 == 1 {
        gammas.push(kron_all(&vec![pauli(3); p]));
    }
    let dim_s = 1usize << p;
    let columns = gammas
        .iter()
        .map(|g| g.transpose().row_iter().cloned().collect())
        .collect();
    Ok(GammaRep {
        m,
        dim_s,
        gammas,
        columns,
    })
}

impl GammaRep {
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn dim_s(&self) -> usize {
        self.dim_s
    }

    /// `γ_α` for `α ∈ 1..=m`.
    pub fn gamma(&self, alpha: usize) -> &SparseMat {
        &self.gammas[alpha - 1]
    }

    /// Image of the basis spinor `e_t` under `γ_α`, as sparse `(index, coeff)`.
    pub fn column(&self, alpha: usize, t: usize) -> &SparseRow {
        &self.columns[alpha - 1][t]
    }

    /// Clifford multiplication `ε_α · s`.
    pub fn act(&self, alpha: usize, s: &[GaussRat]) -> Result<Vector> {
        if alpha == 0 || alpha > self.m {
            return Err(Error::Index(format!(
                "generator {alpha} not in 1..={}",
                self.m
            )));
        }
        if s.len() != self.dim_s {
            return Err(Error::Index(format!(
                "spinor length {} != {}",
                s.len(),
                self.dim_s
            )));
        }
        Ok(self.gammas[alpha - 1].mul_vec(s))
    }

    /// Pairs `(α, β)` for which `γ_α γ_β + γ_β γ_α ≠ 2 δ_{αβ} 1`.
    pub fn anticommutator_failures(&self) -> Vec<(usize, usize)> {
        let two = GaussRat::from(2);
        let mut bad = Vec::new();
        for a in 1..=self.m {
            for b in 1..=self.m {
                let ab = self.gamma(a).mul(self.gamma(b));
                let ba = self.gamma(b).mul(self.gamma(a));
                let sum = ab.add(&ba);
                let expected = if a == b {
                    SparseMat::identity(self.dim_s).scale(&two)
                } else {
                    SparseMat::zero(self.dim_s, self.dim_s)
                };
                if sum != expected {
                    bad.push((a, b));
                }
            }
        }
        bad
    }
}
