//! Acceptance criteria, one PASS/FAIL line each. Run with
//! `cargo test -p kdirac --test acceptance -- --nocapture` to see the lines.

use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use kdirac::clifford::build_gamma;
use kdirac::exactnum::GaussRat;
use kdirac::ivp::restrict;
use kdirac::nilframe::bracket_report;
use kdirac::wpoly::{HomBasis, Var};
use kdirac::{
    BasisOrder, Flavor, Frame, Ivp, KDirac, Params, Permutation, PolySpinor, SpencerComplex,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome, u64);

fn binom(n: i64, r: i64) -> usize {
    if r < 0 || n < r {
        return 0;
    }
    let mut acc: u128 = 1;
    for t in 0..r as u128 {
        acc = acc * (n as u128 - t) / (t + 1);
    }
    acc as usize
}

fn params(n: usize, k: usize) -> Params {
    Params::new(n, k).unwrap()
}

fn engine(n: usize, k: usize) -> Arc<KDirac> {
    Arc::new(KDirac::new(params(n, k)).unwrap())
}

fn dim_s(n: usize) -> usize {
    1 << n.div_ceil(2)
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

/// `∂_{y_{ij}}` with `∂_{y_{ii}} = 0` and `∂_{y_{ji}} = −∂_{y_{ij}}`.
fn dy(f: &PolySpinor, i: usize, j: usize) -> PolySpinor {
    match i.cmp(&j) {
        std::cmp::Ordering::Less => f.diff_y(i, j).unwrap(),
        std::cmp::Ordering::Greater => f.diff_y(j, i).unwrap().scale(&GaussRat::from(-1)),
        std::cmp::Ordering::Equal => PolySpinor::zero(f.params(), f.dim_s()),
    }
}

/// `∂_{x_{αi}} + sign · ½ Σ_j x_{αj} ∂_{y_{ij}}`; sign −1 gives `L`, +1 gives `R`.
fn invariant_field(f: &PolySpinor, sign: i64, a: usize, i: usize) -> PolySpinor {
    let mut out = f.diff_x(a, i).unwrap();
    let c = GaussRat::ratio(sign, 2);
    for j in 1..=f.params().k {
        if j != i {
            out = out.add(&dy(f, i, j).mul_var(Var::X(a, j)).unwrap().scale(&c));
        }
    }
    out
}

/// `D_i f = Σ_α ε_α · L_{αi} f`, built only from partial derivatives.
fn dirac_oracle(e: &KDirac, f: &PolySpinor, i: usize) -> PolySpinor {
    let mut acc = PolySpinor::zero(f.params(), f.dim_s());
    for a in 1..=f.params().n + 1 {
        acc = acc.add(&invariant_field(f, -1, a, i).clifford_mul(e.gamma(), a));
    }
    acc
}

fn dense_mul(a: &[Vec<GaussRat>], b: &[Vec<GaussRat>]) -> Vec<Vec<GaussRat>> {
    let n = a.len();
    (0..n)
        .map(|r| {
            (0..n)
                .map(|c| (0..n).fold(GaussRat::zero(), |acc, t| &acc + &(&a[r][t] * &b[t][c])))
                .collect()
        })
        .collect()
}

fn c1_clifford() -> Outcome {
    let mut pairs = 0;
    for m in 3..=5 {
        let rep = build_gamma(m).map_err(|e| e.to_string())?;
        let d = 1usize << (m / 2);
        ensure(rep.dim_s() == d, || {
            format!("m={m}: dim S = {}, want {d}", rep.dim_s())
        })?;
        let g: Vec<_> = (1..=m).map(|a| rep.gamma(a).to_dense()).collect();
        for a in 0..m {
            for b in 0..m {
                pairs += 1;
                let ab = dense_mul(&g[a], &g[b]);
                let ba = dense_mul(&g[b], &g[a]);
                for r in 0..d {
                    for c in 0..d {
                        let want = GaussRat::from(if a == b && r == c { 2 } else { 0 });
                        ensure(&ab[r][c] + &ba[r][c] == want, || {
                            format!("m={m}: {{G{}, G{}}}[{r}][{c}]", a + 1, b + 1)
                        })?;
                    }
                }
            }
        }
    }
    Ok(format!("{pairs} generator pairs"))
}

fn c2_brackets() -> Outcome {
    let mut elements = 0;
    for (n, k) in [(2, 2), (3, 2), (2, 3)] {
        let frame = Frame::new(params(n, k));
        for d in 0..=3 {
            let r = bracket_report(&frame, d).map_err(|e| e.to_string())?;
            ensure(r.passed(), || format!("({n},{k}) d={d}: {:?}", r.failure))?;
        }
    }
    let p = params(2, 2);
    let zero = |f: &PolySpinor| PolySpinor::zero(f.params(), f.dim_s());
    for d in 0..=3 {
        let basis = HomBasis::new(p, d, 2);
        for idx in 0..basis.len() {
            let f = basis.basis_poly(idx);
            elements += 1;
            for a in 1..=3 {
                for i in 1..=2 {
                    for b in 1..=3 {
                        for j in 1..=2 {
                            let want = if a == b { dy(&f, i, j) } else { zero(&f) };
                            for (s, t, expect) in [
                                (-1, -1, want.clone()),
                                (1, 1, want.scale(&GaussRat::from(-1))),
                                (-1, 1, zero(&f)),
                            ] {
                                let got = invariant_field(&invariant_field(&f, t, b, j), s, a, i)
                                    .sub(&invariant_field(&invariant_field(&f, s, a, i), t, b, j));
                                ensure(got == expect, || {
                                    format!("d={d} basis {idx}: bracket of ({a}{i}, {b}{j}) signs ({s},{t})")
                                })?;
                            }
                        }
                    }
                    let l = invariant_field(&dy(&f, 1, 2), -1, a, i).sub(&dy(
                        &invariant_field(&f, -1, a, i),
                        1,
                        2,
                    ));
                    ensure(l.is_zero(), || {
                        format!("d={d} basis {idx}: [L{a}{i}, dy12] != 0")
                    })?;
                }
            }
        }
    }
    Ok(format!(
        "three parameter sets, {elements} basis elements re-derived at (2,2)"
    ))
}

fn c3_tableau_dims() -> Outcome {
    for (n, k, a, a1) in [(2, 2, 8, 20), (3, 2, 24, 84)] {
        let e = engine(n, k);
        let nk = (n * k) as i64;
        let ds = dim_s(n);
        ensure(nk as usize * ds == a && binom(nk + 1, 2) * ds == a1, || {
            format!("oracle mismatch at ({n},{k})")
        })?;
        let got = (
            e.monogenic_basis(1).unwrap().dim(),
            e.monogenic_basis(2).unwrap().dim(),
        );
        ensure(got == (a, a1), || {
            format!("({n},{k}): dims {got:?}, want ({a}, {a1})")
        })?;
    }
    Ok("(2,2): 8, 20; (3,2): 24, 84".into())
}

fn characters(n: usize, k: usize) -> Vec<usize> {
    let nk = n * k;
    (0..=k * (n + 1))
        .map(|j| nk.saturating_sub(j) * dim_s(n))
        .collect()
}

fn c4_characters() -> Outcome {
    let cases: [(usize, usize, Vec<usize>); 5] = [
        (2, 2, vec![1, 2]),
        (2, 2, vec![2, 1]),
        (3, 2, vec![1, 2, 3]),
        (3, 2, vec![2, 1, 3]),
        (3, 2, vec![3, 1, 2]),
    ];
    for (n, k, sigma) in cases {
        let e = engine(n, k);
        let order = BasisOrder::new(&e.params(), Permutation::new(sigma.clone()).unwrap()).unwrap();
        let got = e
            .filtration_dims(Flavor::Parabolic, 0, &order)
            .map_err(|e| e.to_string())?;
        let want = characters(n, k);
        ensure(got == want, || {
            format!("({n},{k}) σ={sigma:?}: {got:?}, want {want:?}")
        })?;
    }
    Ok("identity and three nontrivial σ".into())
}

fn c5_induction() -> Outcome {
    let mut steps = 0;
    for (n, k, pmax) in [(2, 2, 3), (3, 2, 2)] {
        let e = engine(n, k);
        let orders = [
            BasisOrder::preferred(&e.params()),
            BasisOrder::new(&e.params(), Permutation::reversal(n)).unwrap(),
        ];
        for order in &orders {
            for p in 0..=pmax {
                let got = e
                    .filtration_dims(Flavor::Parabolic, p, order)
                    .map_err(|e| e.to_string())?;
                let nk = (n * k) as i64;
                let want: Vec<usize> = (0..got.len() as i64)
                    .map(|r| binom(nk - r + p as i64, p as i64 + 1) * dim_s(n))
                    .collect();
                steps += got.len();
                ensure(got == want, || {
                    format!(
                        "({n},{k}) p={p} σ={}: {got:?}, want {want:?}",
                        order.sigma()
                    )
                })?;
            }
        }
    }
    Ok(format!("{steps} filtration steps"))
}

fn c6_ses() -> Outcome {
    let e = engine(2, 2);
    let order = BasisOrder::preferred(&e.params());
    let mut count = 0;
    for i in 0..=3 {
        for j in 1..=order.len() {
            let r = e
                .verify_ses(Flavor::Parabolic, i, j, &order)
                .map_err(|e| e.to_string())?;
            count += 1;
            ensure(r.exact(), || format!("i={i} j={j}: {r:?}"))?;
        }
        let c = e
            .cartan_test(Flavor::Parabolic, i, &order)
            .map_err(|e| e.to_string())?;
        ensure(c.equality(), || {
            format!("Cartan test i={i}: {} vs {}", c.lhs, c.rhs)
        })?;
    }
    Ok(format!(
        "{count} sequences exact, Cartan equality for i ≤ 3"
    ))
}

fn c7_lemma_dy() -> Outcome {
    let e = engine(2, 2);
    let mut checked = 0;
    for i in 0..=2 {
        for r in 1..e.params().k {
            let rep = e.verify_lemma_dy(i, r).map_err(|e| e.to_string())?;
            checked += rep.checked;
            ensure(rep.passed(), || format!("i={i} r={r}: {:?}", rep.failure))?;
        }
    }
    Ok(format!("{checked} derivatives vanish"))
}

fn c8_round_trip() -> Outcome {
    let mut problems = Vec::new();
    for (n, k, dmax) in [(2, 2, 4), (3, 2, 3)] {
        let e = engine(n, k);
        let ivp = Ivp::new(Arc::clone(&e));
        let nk = (n * k) as i64;
        for d in 0..=dmax {
            let want = binom(nk + d as i64 - 1, d as i64) * dim_s(n);
            let u = ivp.verify_uniqueness(d).map_err(|e| e.to_string())?;
            if u.monogenic_dim != want {
                problems.push(format!(
                    "({n},{k}) d={d}: dim {} != {want}",
                    u.monogenic_dim
                ));
            }
            if u.rank != u.monogenic_dim {
                problems.push(format!(
                    "({n},{k}) d={d}: restriction rank {} < {}",
                    u.rank, u.monogenic_dim
                ));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(1000 * n as u64 + d as u64);
            let (mut no_ext, mut not_mono, mut wrong_restr, mut lost) = (0, 0, 0, 0);
            for _ in 0..100 {
                let psi = ivp.random_slice(d, &mut rng);
                match ivp.extend(&psi, d) {
                    Ok(f) => {
                        if (1..=k).any(|i| !dirac_oracle(&e, &f, i).is_zero()) {
                            not_mono += 1;
                        }
                        if restrict(&f) != psi {
                            wrong_restr += 1;
                        }
                    }
                    Err(_) => no_ext += 1,
                }
                let f = ivp
                    .random_monogenic(d, &mut rng)
                    .map_err(|e| e.to_string())?;
                if ivp.extend(&restrict(&f), d).ok() != Some(f) {
                    lost += 1;
                }
            }
            if no_ext + not_mono + wrong_restr + lost > 0 {
                problems.push(format!(
                    "({n},{k}) d={d}: of 100 each, {no_ext} without extension, {not_mono} not monogenic, {wrong_restr} wrong restriction, {lost} not recovered"
                ));
            }
        }
    }
    if problems.is_empty() {
        Ok("bijective, 100 round trips each way per degree".into())
    } else {
        Err(problems.join("; "))
    }
}

fn c9_spencer() -> Outcome {
    let e = engine(2, 2);
    let c = SpencerComplex::preferred(Arc::clone(&e));
    let mut forms = 0;
    for a in 0..=3 {
        for b in 0..=1 {
            if a + b > 3 {
                continue;
            }
            for m in 0..=3 {
                let r = c.verify_delta_squared(a, b, m).map_err(|e| e.to_string())?;
                forms += r.checked;
                ensure(r.passed(), || {
                    format!("δ² at ({a},{b},{m}): {:?}", r.failure)
                })?;
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for s in 0..60 {
        let (a, b, m) = (s % 4, (s / 4) % 2, s % 3);
        let f = c.random_form(a, b, m, &mut rng);
        let dd = c.delta(&c.delta(&f).unwrap()).unwrap();
        ensure(dd.is_zero(), || format!("δ² on random form {s}"))?;
    }
    let cartan = c.verify_cartan_formula(60, 7).map_err(|e| e.to_string())?;
    ensure(cartan.passed() && cartan.checked >= 50, || {
        format!("Cartan formula: {cartan:?}")
    })?;
    for i in 0..=2 {
        for r in c
            .verify_exactness(i, &[0, 1, 2])
            .map_err(|e| e.to_string())?
        {
            ensure(r.exact(), || {
                format!("i={i} position {}: cohomology {}", r.position, r.cohomology)
            })?;
        }
    }
    Ok(format!(
        "δ² on {forms} basis forms, Cartan formula on 60 forms, exact for i ≤ 2"
    ))
}

fn c10_flat() -> Outcome {
    let e = engine(2, 2);
    let p = e.params();
    let ivp = Ivp::new(Arc::clone(&e));
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for s in 0..60 {
        let d = s % 4;
        let f = HomBasis::filtered(p, d, 2, |m| m.is_y_free()).random_element(&mut rng);
        let flat: Vec<PolySpinor> = (1..=2)
            .map(|i| {
                (1..=3).fold(PolySpinor::zero(p, 2), |acc, a| {
                    acc.add(&f.diff_x(a, i).unwrap().clifford_mul(e.gamma(), a))
                })
            })
            .collect();
        let par: Vec<PolySpinor> = (1..=2).map(|i| dirac_oracle(&e, &f, i)).collect();
        ensure(flat == par, || format!("sweep {s}: D != E on y-free input"))?;
        ensure(ivp.pullback_consistency(&f).unwrap(), || {
            format!("sweep {s}: pullback check")
        })?;
    }
    for d in 2..=3 {
        for f in e.kernel(Flavor::Flat, d).unwrap().polys() {
            let res = ivp.flat_compatibility(&restrict(&f)).unwrap();
            ensure(res.iter().flatten().all(PolySpinor::is_zero), || {
                format!("nonzero residual on a flat monogenic of degree {d}")
            })?;
        }
    }
    let mut generic = 0;
    for _ in 0..10 {
        let psi = ivp.random_slice(2, &mut rng);
        if ivp
            .flat_compatibility(&psi)
            .unwrap()
            .iter()
            .flatten()
            .any(|r| !r.is_zero())
        {
            generic += 1;
        }
    }
    ensure(generic > 0, || {
        "no random degree-2 data violates the compatibility system".into()
    })?;
    let c = e
        .cartan_test(Flavor::Flat, 0, &BasisOrder::preferred(&p))
        .unwrap();
    ensure(c.lhs < c.rhs, || {
        format!("flat Cartan test: {} vs {}", c.lhs, c.rhs)
    })?;
    Ok(format!(
        "60 sweeps, {generic}/10 random data incompatible, Cartan {} < {}",
        c.lhs, c.rhs
    ))
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 10] = [
        ("1 Clifford relations", c1_clifford, 1),
        ("2 bracket identities", c2_brackets, 10),
        ("3 tableau dimensions", c3_tableau_dims, 30),
        ("4 Cartan characters", c4_characters, 30),
        ("5 induction formula", c5_induction, 300),
        ("6 short exact sequences", c6_ses, 300),
        ("7 vanishing y-derivatives", c7_lemma_dy, 60),
        ("8 initial value round trip", c8_round_trip, 300),
        ("9 Spencer complex", c9_spencer, 300),
        ("10 flat sanity", c10_flat, 60),
    ];
    let mut failed = Vec::new();
    for (name, run, limit) in criteria {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(_) if elapsed > Duration::from_secs(limit) => {
                Err(format!("took {elapsed:.2?}, limit {limit} s"))
            }
            other => other,
        };
        match &outcome {
            Ok(detail) => println!("PASS  {name} [{elapsed:.2?}] {detail}"),
            Err(why) => {
                println!("FAIL  {name} [{elapsed:.2?}] {why}");
                failed.push(name);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
