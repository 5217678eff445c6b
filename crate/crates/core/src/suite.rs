//! Verification suites assembling [`Check`]s for one parameter set.

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use crate::clifford::build_gamma;
use crate::dirac::{
    expected_filtration_dim, expected_monogenic_dim, BasisOrder, Flavor, KDirac, Permutation,
};
use crate::error::{Error, Result};
use crate::ivp::{restrict, Ivp};
use crate::nilframe::bracket_report;
use crate::report::Check;
use crate::spencer::SpencerComplex;
use crate::wpoly::{self, HomBasis, Params, PolySpinor};

/// The suites selectable by name.
pub const SUITES: [&str; 8] = [
    "clifford",
    "brackets",
    "ses",
    "spencer",
    "lemma-dy",
    "flat-compat",
    "pullback",
    "uniqueness",
];

#[derive(Clone, Debug, Serialize)]
pub struct SuiteConfig {
    pub n: usize,
    pub k: usize,
    pub max_degree: usize,
    pub sigma: Vec<usize>,
    pub seed: u64,
}

/// Shared engines for one configuration.
#[derive(Debug)]
pub struct Workbench {
    pub config: SuiteConfig,
    pub engine: Arc<KDirac>,
    pub order: BasisOrder,
    pub ivp: Ivp,
}

impl Workbench {
    pub fn new(config: SuiteConfig) -> Result<Self> {
        let params = Params::new(config.n, config.k)?;
        let sigma = if config.sigma.is_empty() {
            Permutation::identity(params.n)
        } else {
            Permutation::new(config.sigma.clone())?
        };
        let order = BasisOrder::new(&params, sigma)?;
        let engine = Arc::new(KDirac::new(params)?);
        let ivp = Ivp::new(Arc::clone(&engine));
        let config = SuiteConfig {
            sigma: order.sigma().images().to_vec(),
            ..config
        };
        Ok(Workbench {
            config,
            engine,
            order,
            ivp,
        })
    }

    pub fn params(&self) -> Params {
        self.engine.params()
    }

    fn rng(&self, salt: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.config.seed ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15))
    }

    /// Prolongation indices `i` whose upper space `A^{(i+1)}` stays within
    /// the degree limit; always includes `i = 0`.
    fn prolongations(&self) -> std::ops::RangeInclusive<usize> {
        0..=self.config.max_degree.saturating_sub(2)
    }

    pub fn run(&self, suite: &str) -> Result<Vec<Check>> {
        match suite {
            "clifford" => self.clifford(),
            "brackets" => self.brackets(),
            "ses" => self.ses(),
            "spencer" => self.spencer(),
            "lemma-dy" => self.lemma_dy(),
            "flat-compat" => self.flat_compat(),
            "pullback" => self.pullback(),
            "uniqueness" => self.uniqueness(),
            other => Err(Error::Validation(format!("unknown suite {other:?}"))),
        }
    }

    pub fn dims(&self) -> Result<Vec<Check>> {
        let p = self.params();
        (0..=self.config.max_degree)
            .map(|d| {
                let got = self.engine.monogenic_basis(d)?.dim();
                Ok(Check::compare(
                    format!("dims d={d}"),
                    expected_monogenic_dim(&p, d),
                    got,
                ))
            })
            .collect()
    }

    pub fn cartan(&self) -> Result<Vec<Check>> {
        let p = self.params();
        let mut out = Vec::new();
        for i in self.prolongations() {
            let dims = self
                .engine
                .filtration_dims(Flavor::Parabolic, i, &self.order)?;
            let want: Vec<usize> = (0..dims.len())
                .map(|r| expected_filtration_dim(&p, i, r))
                .collect();
            out.push(Check::compare(
                format!("characters i={i} sigma={}", self.order.sigma()),
                want,
                dims,
            ));
            let c = self.engine.cartan_test(Flavor::Parabolic, i, &self.order)?;
            out.push(Check::predicate(
                format!("cartan equality i={i}"),
                c.equality(),
                json!({"lhs": "= rhs"}),
                json!({"lhs": c.lhs, "rhs": c.rhs}),
            ));
        }
        Ok(out)
    }

    fn clifford(&self) -> Result<Vec<Check>> {
        let m = self.params().m();
        let rep = build_gamma(m)?;
        let bad = rep.anticommutator_failures();
        Ok(vec![
            Check::compare(
                format!("clifford dim_s m={m}"),
                1usize << (m / 2),
                rep.dim_s(),
            ),
            Check::compare(
                format!("clifford anticommutation m={m}"),
                Vec::<(usize, usize)>::new(),
                bad,
            ),
        ])
    }

    fn brackets(&self) -> Result<Vec<Check>> {
        (2..=self.config.max_degree.max(2))
            .map(|d| {
                let r = bracket_report(self.engine.frame(), d)?;
                let c = Check::predicate(
                    format!("brackets d={d}"),
                    r.passed(),
                    "all identities hold",
                    json!({"pairs": r.pairs_checked, "basis": r.basis_size}),
                );
                Ok(match r.failure {
                    Some(f) => c.with_witness(f),
                    None => c,
                })
            })
            .collect()
    }

    fn ses(&self) -> Result<Vec<Check>> {
        let mut out = Vec::new();
        for i in self.prolongations() {
            let mut maps_down = Vec::new();
            for j in 1..=self.order.len() {
                let r = self
                    .engine
                    .verify_ses(Flavor::Parabolic, i, j, &self.order)?;
                maps_down.push(r.image_in_target);
                out.push(Check::predicate(
                    format!("ses i={i} j={j}"),
                    r.exact(),
                    json!({"kernel": r.dim_sub, "image": r.dim_target}),
                    json!({"kernel": r.kernel_dim, "image": r.image_rank}),
                ));
            }
            out.push(
                Check::predicate(
                    format!("filtration maps down one prolongation i={i}"),
                    maps_down.iter().all(|&b| b),
                    true,
                    maps_down,
                )
                .with_witness("tested reading: R_j maps A^(i+1)_(j-1) into A^(i)_(j-1)"),
            );
            let c = self.engine.cartan_test(Flavor::Parabolic, i, &self.order)?;
            out.push(Check::compare(
                format!("cartan equality i={i}"),
                c.rhs,
                c.lhs,
            ));
        }
        Ok(out)
    }

    fn lemma_dy(&self) -> Result<Vec<Check>> {
        let mut out = Vec::new();
        for i in self.prolongations() {
            for r in 1..self.params().k {
                let rep = self.engine.verify_lemma_dy(i, r)?;
                let c = Check::predicate(
                    format!("dy vanishing i={i} r={r}"),
                    rep.passed(),
                    "all vanish",
                    json!({"dim": rep.dim, "checked": rep.checked}),
                );
                out.push(match rep.failure {
                    Some(f) => c.with_witness(f),
                    None => c,
                });
            }
        }
        Ok(out)
    }

    fn spencer(&self) -> Result<Vec<Check>> {
        let cx = SpencerComplex::new(Arc::clone(&self.engine), self.order.clone());
        let p = self.params();
        let top_m = self.config.max_degree.min(3);
        let mut out = Vec::new();
        let mut squares = Vec::new();
        for a in 0..=3usize.min(cx.num_pi()) {
            for b in 0..=(3 - a).min(p.num_y()) {
                for m in 0..=top_m {
                    let r = cx.verify_delta_squared(a, b, m)?;
                    if !r.passed() {
                        out.push(
                            Check::predicate(format!("delta^2 ({a},{b},{m})"), false, 0, 1)
                                .with_witness(r.failure),
                        );
                    }
                    squares.push(r.checked);
                }
            }
        }
        out.push(Check::predicate(
            "delta^2 = 0",
            out.is_empty(),
            "zero",
            json!({"forms": squares.iter().sum::<usize>()}),
        ));
        let cf = cx.verify_cartan_formula(50, self.config.seed)?;
        out.push(
            Check::predicate(
                "cartan formula",
                cf.passed(),
                "L = i d + d i",
                json!({"forms": cf.checked}),
            )
            .with_witness(cf.failure),
        );
        let lc = cx.verify_lie_commutes(20, self.config.seed.wrapping_add(1))?;
        out.push(
            Check::predicate(
                "lie derivative commutes with delta",
                lc.passed(),
                true,
                json!({"forms": lc.checked}),
            )
            .with_witness(lc.failure),
        );
        for i in 0..self.config.max_degree.min(3) {
            for r in cx.verify_exactness(i, &[0, 1, 2])? {
                out.push(Check::predicate(
                    format!("exactness i={i} position={}", r.position),
                    r.exact(),
                    json!({"cohomology": 0}),
                    &r,
                ));
            }
            let closed = cx.verify_subcomplex_closed(i)?;
            out.push(
                Check::predicate(
                    format!("monogenic subcomplex closed i={i}"),
                    closed.passed(),
                    true,
                    closed.checked,
                )
                .with_witness(closed.failure),
            );
            out.push(Check::measured(
                format!("monogenic subcomplex cohomology i={i} (measured)"),
                cx.subcomplex_cohomology(i)?,
            ));
        }
        Ok(out)
    }

    fn flat_compat(&self) -> Result<Vec<Check>> {
        let mut out = Vec::new();
        for d in 0..=self.config.max_degree {
            let flat = self.engine.kernel(Flavor::Flat, d)?;
            let mut nonzero = 0;
            for f in flat.polys() {
                let res = self.ivp.flat_compatibility(&restrict(&f))?;
                nonzero += res.iter().flatten().filter(|r| !r.is_zero()).count();
            }
            out.push(Check::compare(
                format!("flat restrictions compatible d={d}"),
                0,
                nonzero,
            ));
            let img = self.ivp.flat_restriction_rank(d)?;
            out.push(Check::measured(
                format!("flat restriction image d={d} (measured)"),
                &img,
            ));
        }
        let mut rng = self.rng(3);
        let d = self.config.max_degree.max(2);
        let psi = self.ivp.random_slice(d, &mut rng);
        let res = self.ivp.flat_compatibility(&psi)?;
        let nonzero = res.iter().flatten().filter(|r| !r.is_zero()).count();
        out.push(Check::predicate(
            format!("generic data violates compatibility d={d}"),
            nonzero > 0,
            "some residual nonzero",
            nonzero,
        ));
        let c = self.engine.cartan_test(Flavor::Flat, 0, &self.order)?;
        out.push(Check::predicate(
            "flat cartan test strict at degree 1",
            c.lhs < c.rhs,
            "lhs < rhs",
            json!({"lhs": c.lhs, "rhs": c.rhs, "characters": c.characters}),
        ));
        Ok(out)
    }

    fn pullback(&self) -> Result<Vec<Check>> {
        let mut rng = self.rng(4);
        let p = self.params();
        let mut failures = Vec::new();
        let samples = 50;
        for s in 0..samples {
            let d = s % 4;
            let basis = HomBasis::filtered(p, d, self.engine.dim_s(), |m| m.is_y_free());
            let psi: PolySpinor = basis.random_element(&mut rng);
            if !self.ivp.pullback_consistency(&psi)? {
                failures.push(s);
            }
        }
        Ok(vec![Check::compare(
            "D equals E on y-free input",
            Vec::<usize>::new(),
            failures,
        )
        .with_witness(json!({"samples": samples}))])
    }

    fn uniqueness(&self) -> Result<Vec<Check>> {
        let mut out = Vec::new();
        for d in 0..=self.config.max_degree {
            let r = self.ivp.verify_uniqueness(d)?;
            let witness = match r.injective() {
                true => None,
                false => self.ivp.restriction_kernel(d)?.first().map(wpoly::to_terms),
            };
            out.push(
                Check::predicate(
                    format!("restriction injective d={d}"),
                    r.bijective(),
                    r.monogenic_dim,
                    &r,
                )
                .with_witness(witness),
            );
            let mut rng = self.rng(100 + d as u64);
            let (mut unextendable, mut mismatched) = (0, 0);
            for _ in 0..10 {
                let psi = self.ivp.random_slice(d, &mut rng);
                match self.ivp.extend(&psi, d) {
                    Ok(f) if restrict(&f) == psi => {}
                    Ok(_) => mismatched += 1,
                    Err(Error::Invariant(_)) => unextendable += 1,
                    Err(e) => return Err(e),
                }
            }
            out.push(Check::compare(
                format!("restrict after extend d={d}"),
                [0, 0],
                [unextendable, mismatched],
            ));
            let mut lost = 0;
            for _ in 0..10 {
                let f = self.ivp.random_monogenic(d, &mut rng)?;
                match self.ivp.extend(&restrict(&f), d) {
                    Ok(g) if g == f => {}
                    Ok(_) | Err(Error::Invariant(_)) => lost += 1,
                    Err(e) => return Err(e),
                }
            }
            out.push(Check::compare(
                format!("extend after restrict d={d}"),
                0,
                lost,
            ));
        }
        Ok(out)
    }
}
