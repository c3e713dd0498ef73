mod common;

use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use nctorus::action::{compatibility_check, free_outside_origin, order_of, standard_w, CyclicAction};
use nctorus::arith::{FieldElement, NumberField};
use nctorus::heisenberg::{
    build_geometry, j0, verify_commutation, verify_covariance, verify_inner_compat, verify_unitarity, Grid,
    GridFunction, MetaplecticKind, MetaplecticOp, ModuleGeometry,
};
use nctorus::linalg::{IntMatrix, ScalarMatrix};
use nctorus::orbit::gl2_orbit_equal;
use nctorus::range::{morita_lambda_search, orbifold_range_bounds, range_equal, scale_range, span, torus_range, MoritaOutcome};
use nctorus::skew::{
    all_minors_positive, find_positive_t, pfaffian, pfaffian_matching_sum, IndexTuple, SkewMatrix,
};
use nctorus::so_nn::extension_condition;
use nctorus::{Rational, Scalar};
use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::*;

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn q(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

fn sqrt2() -> Arc<NumberField> {
    NumberField::quadratic(2).unwrap()
}

fn quad(k: &Arc<NumberField>, a: Rational, b: Rational) -> Scalar {
    Scalar::Field(FieldElement::new(k.clone(), vec![a, b]))
}

fn pfaffians() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for trial in 0..200 {
        let n = [2, 4, 6, 8][trial % 4];
        let a = random_int_skew(&mut rng, n, 9);
        let pf = pfaffian(&a).map_err(|e| e.to_string())?;
        let det = a.as_matrix().det().map_err(|e| e.to_string())?;
        ensure(pf.checked_mul(&pf).unwrap() == det, format!("pf² ≠ det at n = {n}"))?;
        ensure(pfaffian_matching_sum(&a).unwrap() == pf, format!("routes disagree at n = {n}"))?;
    }
    Ok("200 matrices".into())
}

fn two_dim_orbifolds() -> Check {
    let theta = SkewMatrix::generic(2);
    for r in [2usize, 3, 4, 6] {
        let act = CyclicAction::new(standard_w(r).unwrap(), theta.clone(), 24).map_err(|e| e.to_string())?;
        let rep = orbifold_range_bounds(&theta, &act).map_err(|e| e.to_string())?;
        let inv = q(1, r as i64);
        let expected = span(&[Scalar::Rational(inv.clone()), Scalar::var(1, 2).scale(&inv)]).unwrap();
        ensure(rep.decided, format!("N = {r} undecided"))?;
        ensure(rep.order == r, format!("order {} for N = {r}", rep.order))?;
        ensure(range_equal(&rep.lower, &expected).unwrap(), format!("N = {r}: got {}", rep.lower))?;
    }
    Ok("N = 2, 3, 4, 6".into())
}

fn flip() -> Check {
    for n in 2..=5 {
        let theta = SkewMatrix::generic(n);
        let w = IntMatrix::identity(n).neg();
        for idx in IndexTuple::all(n) {
            ensure(extension_condition(&w, &idx).unwrap(), format!("n = {n}: {idx} rejected"))?;
        }
        let act = CyclicAction::new(w, theta.clone(), 24).unwrap();
        let rep = orbifold_range_bounds(&theta, &act).map_err(|e| e.to_string())?;
        let half = scale_range(&torus_range(&theta).unwrap(), &Scalar::ratio(1, 2)).unwrap();
        ensure(rep.decided, format!("n = {n} undecided"))?;
        ensure(range_equal(&rep.lower, &half).unwrap(), format!("n = {n}: got {}", rep.lower))?;
    }
    Ok("n = 2..5".into())
}

fn diagonal() -> Check {
    let theta = SkewMatrix::from_upper(4, [((1, 2), Scalar::var(1, 2)), ((3, 4), Scalar::var(3, 4))]).unwrap();
    let w = IntMatrix::block_diag(&standard_w(4).unwrap(), &standard_w(6).unwrap());
    let act = CyclicAction::new(w, theta.clone(), 24).map_err(|e| e.to_string())?;
    let rep = orbifold_range_bounds(&theta, &act).map_err(|e| e.to_string())?;
    ensure(rep.order == 12, format!("order {}", rep.order))?;
    ensure(rep.decided, "undecided")?;
    let t12 = Scalar::var(1, 2);
    let t34 = Scalar::var(3, 4);
    let gens = [Scalar::one(), t12.clone(), t34.clone(), t12.checked_mul(&t34).unwrap()];
    let gens: Vec<Scalar> = gens.iter().map(|g| g.scale(&q(1, 12))).collect();
    ensure(range_equal(&rep.lower, &span(&gens).unwrap()).unwrap(), format!("got {}", rep.lower))?;
    let admitted: Vec<String> = rep.admitted_minors.iter().map(|i| i.to_string()).collect();
    for need in ["1,2", "3,4", "1,2,3,4"] {
        ensure(admitted.iter().any(|a| a == need), format!("{need} not admitted"))?;
    }
    Ok(format!("admitted {}", admitted.join(" / ")))
}

fn compatibility() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut good = 0;
    let mut bad = 0;
    while good < 50 || bad < 50 {
        let a = random_rational(&mut rng);
        let b = random_rational(&mut rng);
        let (w1, w4, cross) = if rng.gen_bool(0.5) {
            (random_sl2(&mut rng), random_sl2(&mut rng), false)
        } else {
            (IntMatrix::identity(2).neg(), IntMatrix::identity(2).neg(), true)
        };
        let mut entries = vec![((1, 2), Scalar::Rational(a)), ((3, 4), Scalar::Rational(b))];
        if cross {
            entries.push(((1, 3), Scalar::Rational(random_rational(&mut rng))));
            entries.push(((2, 4), Scalar::Rational(random_rational(&mut rng))));
        }
        let theta = SkewMatrix::from_upper(4, entries).unwrap();
        let w = IntMatrix::block_diag(&w1, &w4);
        let th = rational_rows(&theta);
        let symplectic = congruence_oracle(&w.to_i64_rows(), &th) == th;
        ensure(symplectic, "generator produced a non-symplectic W")?;
        if good < 50 {
            ensure(compatibility_check(&w, &theta, 1).unwrap(), "symplectic W rejected")?;
            good += 1;
        }
        // perturb one entry of a block, keeping the block shape
        let mut rows = w.to_i64_rows();
        let (i, j) = [(0, 0), (0, 1), (1, 0), (1, 1), (2, 2), (3, 3), (2, 3)][rng.gen_range(0..7)];
        rows[i][j] += rng.gen_range(1..=3);
        let refs: Vec<&[i64]> = rows.iter().map(|r| r.as_slice()).collect();
        let perturbed = IntMatrix::from_i64(&refs);
        if congruence_oracle(&rows, &th) != th && bad < 50 {
            ensure(!compatibility_check(&perturbed, &theta, 1).unwrap(), "perturbed W accepted")?;
            bad += 1;
        }
    }
    Ok("50 symplectic, 50 perturbed".into())
}

fn freeness() -> Check {
    let theta = SkewMatrix::generic(2);
    for r in [2usize, 3, 4, 6] {
        let w = standard_w(r).unwrap();
        let order = order_of(&w, 24).unwrap();
        ensure(order == Some(r), format!("order of W({r}) is {order:?}"))?;
        ensure(CyclicAction::new(w.clone(), theta.clone(), 24).is_ok(), "not symplectic")?;
        let free = free_outside_origin(&w, r).unwrap();
        ensure(free, format!("W({r}) not free"))?;
        ensure(free != box_fixed_vector(&w, r, 5), format!("box oracle disagrees for W({r})"))?;
    }
    for n in 1..=4 {
        let w = IntMatrix::identity(n).neg();
        let free = free_outside_origin(&w, 2).unwrap();
        ensure(free && !box_fixed_vector(&w, 2, 5), format!("flip at n = {n}"))?;
    }
    let w = IntMatrix::diagonal(&[-1, -1, 1]);
    let order = order_of(&w, 24).unwrap().ok_or("diag(−1,−1,1) has no order")?;
    let free = free_outside_origin(&w, order).unwrap();
    ensure(!free && box_fixed_vector(&w, order, 5), "diag(−1,−1,1) should fix e₃")?;
    Ok("orders 2, 3, 4, 6; box oracle agrees".into())
}

fn morita() -> Check {
    let k = sqrt2();
    let alpha = quad(&k, q(0, 1), q(1, 1));
    let bases = [
        span(&[Scalar::one(), alpha.clone()]).unwrap(),
        span(&[Scalar::ratio(1, 2), alpha.scale(&q(1, 3))]).unwrap(),
        span(&[Scalar::one(), quad(&k, q(1, 2), q(1, 2))]).unwrap(),
        span(&[Scalar::ratio(1, 4), quad(&k, q(3, 4), q(5, 4))]).unwrap(),
    ];
    let lambdas = [Scalar::one(), Scalar::ratio(1, 2), Scalar::int(2), alpha.clone(), alpha.scale(&q(1, 2))];
    let mut found = 0;
    for r in &bases {
        for lambda in &lambdas {
            let target = scale_range(r, lambda).unwrap();
            match morita_lambda_search(&target, r, 10).map_err(|e| e.to_string())? {
                MoritaOutcome::Found(l) => {
                    ensure(l.sign().unwrap() > 0, "λ not positive")?;
                    let check = range_equal(&target, &scale_range(r, &l).unwrap()).unwrap();
                    ensure(check, format!("returned λ = {l} fails the recheck"))?;
                    found += 1;
                }
                other => return Err(format!("λ = {lambda} on {r}: {other:?}")),
            }
        }
    }
    for m in 1..=10i64 {
        let rank1 = span(&[Scalar::ratio(1, m)]).unwrap();
        let rank2 = span(&[Scalar::one(), alpha.scale(&q(1, m))]).unwrap();
        let out = morita_lambda_search(&rank2, &rank1, 10).unwrap();
        ensure(out == MoritaOutcome::NotFound, format!("rank mismatch {m}: {out:?}"))?;
    }
    Ok(format!("{found} recovered, 10 rank mismatches"))
}

fn gl2() -> Check {
    let k = sqrt2();
    let cap = 10_000;
    let a = quad(&k, q(-1, 1), q(1, 1));
    ensure(gl2_orbit_equal(&a, &quad(&k, q(1, 1), q(1, 1)), cap).unwrap() == Some(true), "√2−1 vs √2+1")?;
    ensure(gl2_orbit_equal(&a, &quad(&k, q(6, 1), q(1, 1)), cap).unwrap() == Some(true), "√2−1 vs √2+6")?;
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let ds = [2i64, 3, 5, 6, 7];
    for i in 0..20 {
        let field = NumberField::quadratic(ds[i % ds.len()]).unwrap();
        let b = loop {
            let b = rng.gen_range(-4..=4);
            if b != 0 {
                break b;
            }
        };
        let x = quad(&field, random_rational(&mut rng), q(b, rng.gen_range(1..=4)));
        let plus = x.checked_add(&Scalar::one()).unwrap();
        let inv = x.invert().unwrap();
        ensure(gl2_orbit_equal(&x, &plus, cap).unwrap() == Some(true), format!("{x} vs {x}+1"))?;
        ensure(gl2_orbit_equal(&x, &inv, cap).unwrap() == Some(true), format!("{x} vs 1/{x}"))?;
    }
    Ok("2 examples, 20 invariance pairs".into())
}

fn geometry() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let k = sqrt2();
    let mut done = 0;
    while done < 30 {
        let n = rng.gen_range(2..=6);
        let p = rng.gen_range(1..=(n / 2).min(2));
        let mut theta = random_rational_skew(&mut rng, n);
        if done % 3 == 2 {
            let shift = quad(&k, q(0, 1), random_rational(&mut rng));
            theta = SkewMatrix::from_upper(
                n,
                theta.upper_entries().into_iter().map(|(ij, v)| (ij, v.checked_add(&shift).unwrap())),
            )
            .unwrap();
        }
        let k2 = 2 * p;
        let theta11 = SkewMatrix::new(theta.block(0, k2, 0, k2)).unwrap();
        let pf = pfaffian(&theta11).unwrap();
        if pf.is_zero() {
            continue;
        }
        let geom = build_geometry(&theta, p).map_err(|e| format!("n = {n}, p = {p}: {e}"))?;
        let t11 = geom.t11();
        let lhs = t11.transpose().mul(&ScalarMatrix::from_int(&j0(p))).unwrap().mul(t11).unwrap();
        ensure(lhs == theta.block(0, k2, 0, k2), "T11ᵗJ₀T11 ≠ θ₁₁")?;
        let det = t11.det().unwrap();
        ensure(det == pf || det == -&pf, format!("det T11 = {det}, pf = {pf}"))?;
        done += 1;
    }
    Ok("30 matrices".into())
}

fn theta3() -> SkewMatrix {
    SkewMatrix::from_upper(3, [((1, 2), Scalar::ratio(1, 4)), ((1, 3), Scalar::ratio(1, 3)), ((2, 3), Scalar::ratio(1, 5))])
        .unwrap()
}

fn theta2() -> SkewMatrix {
    SkewMatrix::from_upper(2, [((1, 2), Scalar::ratio(1, 4))]).unwrap()
}

fn module_relations() -> Check {
    let mut worst: f64 = 0.0;
    for (theta, qd) in [(theta2(), 0usize), (theta3(), 1)] {
        let geom = build_geometry(&theta, 1).unwrap();
        let grid = Grid::new(1, qd, 8.0, 1.0 / 64.0, 2).unwrap();
        let f = GridFunction::gaussian(grid, &[0.0]);
        for j in 0..theta.n() {
            for k in 0..theta.n() {
                worst = worst.max(verify_commutation(&f, j, k, &geom).map_err(|e| e.to_string())?);
            }
        }
    }
    ensure(worst < 1e-6, format!("residual {worst:.2e}"))?;
    Ok(format!("max residual {worst:.2e}"))
}

fn lattice_box(n: usize) -> Vec<Vec<i64>> {
    (0..3usize.pow(n as u32))
        .map(|mut c| {
            (0..n)
                .map(|_| {
                    let x = (c % 3) as i64 - 1;
                    c /= 3;
                    x
                })
                .collect()
        })
        .collect()
}

fn battery(
    geom: &ModuleGeometry,
    act: &CyclicAction,
    op: &MetaplecticOp,
    grid: Grid,
) -> Result<(f64, f64, f64), String> {
    let center = vec![0.0; grid.p];
    let f = GridFunction::gaussian(grid, &center);
    let g = GridFunction::gaussian(grid, &vec![0.5; grid.p]);
    let ls = lattice_box(geom.n());
    let mut cov: f64 = 0.0;
    for l in &ls {
        cov = cov.max(verify_covariance(&f, act, l, geom, op).map_err(|e| e.to_string())?);
    }
    let unit = verify_unitarity(&f, &g, act, geom, op).map_err(|e| e.to_string())?;
    let inner = verify_inner_compat(&f, &g, act, &ls, geom, op).map_err(|e| e.to_string())?;
    Ok((cov, unit, inner))
}

fn fourier_setup() -> (ModuleGeometry, CyclicAction, MetaplecticOp) {
    let theta = theta2();
    let geom = ModuleGeometry::with_t11(&theta, 1, ScalarMatrix::identity(2).scale(&q(1, 2))).unwrap();
    let act = CyclicAction::new(standard_w(4).unwrap(), theta, 24).unwrap();
    let op = MetaplecticOp::for_action(&act, &geom).unwrap();
    (geom, act, op)
}

fn covariance() -> Check {
    let mut notes = Vec::new();
    for (theta, qd) in [(theta2(), 0usize), (theta3(), 1)] {
        let n = theta.n();
        let geom = build_geometry(&theta, 1).unwrap();
        let act = CyclicAction::new(IntMatrix::identity(n).neg(), theta, 24).unwrap();
        let op = MetaplecticOp::for_action(&act, &geom).map_err(|e| e.to_string())?;
        ensure(op.kind == MetaplecticKind::Parity, "flip is not parity")?;
        let (cov, unit, inner) = battery(&geom, &act, &op, Grid::new(1, qd, 8.0, 1.0 / 64.0, 2).unwrap())?;
        ensure(cov < 1e-6 && unit < 1e-6 && inner < 1e-6, format!("flip n = {n}: {cov:.2e} {unit:.2e} {inner:.2e}"))?;
        notes.push(format!("flip n={n} {:.1e}", cov.max(unit).max(inner)));
    }
    let (geom, act, op) = fourier_setup();
    ensure(op.kind == MetaplecticKind::Fourier, "W(4) is not the Fourier operator")?;
    let (cov, unit, inner) = battery(&geom, &act, &op, Grid::new(1, 0, 8.0, 1.0 / 64.0, 0).unwrap())?;
    ensure(cov < 1e-3 && unit < 1e-3 && inner < 1e-3, format!("Fourier: {cov:.2e} {unit:.2e} {inner:.2e}"))?;
    notes.push(format!("Fourier {:.1e}", cov.max(unit).max(inner)));

    // refinement: residual per step, checked on the halving out of the undersampled regime
    let mut seq = Vec::new();
    for k in 3..=7 {
        let grid = Grid::new(1, 0, 8.0, 1.0 / (1u32 << k) as f64, 0).unwrap();
        let f = GridFunction::gaussian(grid, &[0.0]);
        let mut r: f64 = 0.0;
        for l in lattice_box(2) {
            r = r.max(verify_covariance(&f, &act, &l, &geom, &op).map_err(|e| e.to_string())?);
        }
        seq.push((k, r));
    }
    let line: Vec<String> = seq.iter().map(|(k, r)| format!("h=1/{}:{r:.1e}", 1 << k)).collect();
    println!("    Fourier residual by step: {}", line.join(" "));
    ensure(seq[1].1 * 2.0 <= seq[0].1, format!("halving h=1/8 → 1/16 gave {:.2e} → {:.2e}", seq[0].1, seq[1].1))?;
    notes.push("refinement ok".into());
    Ok(notes.join(", "))
}

fn positive_t() -> Check {
    ensure(find_positive_t(&SkewMatrix::zero(4), 64).unwrap() == Some(1), "θ = 0, n = 4")?;
    let neg = SkewMatrix::from_upper(2, [((1, 2), Scalar::int(-10))]).unwrap();
    ensure(find_positive_t(&neg, 5).unwrap().is_none(), "[[0,−10],[10,0]] found with t_max 5")?;
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..20 {
        let n = [2, 4, 6][rng.gen_range(0..3)];
        let theta = random_rational_skew(&mut rng, n);
        if let Some(t) = find_positive_t(&theta, 64).unwrap() {
            let z = nctorus::skew::standard_z_int(n);
            let rows: Vec<Vec<i64>> = z.to_i64_rows().iter().map(|r| r.iter().map(|x| x * t as i64).collect()).collect();
            let refs: Vec<&[i64]> = rows.iter().map(|r| r.as_slice()).collect();
            let shifted = theta.add_int(&IntMatrix::from_i64(&refs)).unwrap();
            ensure(all_minors_positive(&shifted).unwrap(), format!("t = {t} fails the recheck"))?;
        }
    }
    Ok("examples and 20 rechecks".into())
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Check, u64); 12] = [
        ("pfaffian correctness", pfaffians, 5),
        ("two-dimensional orbifold ranges", two_dim_orbifolds, 1),
        ("flip action ranges", flip, 5),
        ("diagonal four-dimensional example", diagonal, 1),
        ("compatibility relations", compatibility, 2),
        ("freeness and order", freeness, 2),
        ("Morita λ search", morita, 10),
        ("GL(2,Z) orbits", gl2, 2),
        ("geometry exactness", geometry, 2),
        ("module relations", module_relations, 10),
        ("covariance, unitarity, inner products", covariance, 60),
        ("positive t search", positive_t, 1),
    ];
    let mut failed = 0;
    for (i, (name, run, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let took = start.elapsed();
        let outcome = match outcome {
            Ok(msg) if took > Duration::from_secs(*limit) => Err(format!("{msg}; over the {limit} s budget")),
            other => other,
        };
        let (tag, msg) = match &outcome {
            Ok(m) => ("PASS", m),
            Err(m) => ("FAIL", m),
        };
        println!("{tag} {:>2} {name} ({:.2} s): {msg}", i + 1, took.as_secs_f64());
        if outcome.is_err() {
            failed += 1;
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
