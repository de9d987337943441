//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

#[path = "../../core/tests/common/hahn.rs"]
mod hahn;
#[path = "../../core/tests/common/random_eq.rs"]
mod random_eq;
#[path = "../../core/tests/common/window.rs"]
mod window_identity;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use mahler::json::{decode_job, parse_json};
use mahler::parse::parse_rational_function;
use mahler_core::constants::{const_matrix_phi, exp_constant, ConstElem, ConstMatrix};
use mahler_core::fields::{rat, Elem, Field};
use mahler_core::hahn::{coefficient_at, compute_h};
use mahler_core::linalg::Mat;
use mahler_core::newton::{
    build_companion, check_ramification, newton_slopes, ramification_index, MahlerEquation,
    MahlerSystem,
};
use mahler_core::series::{LaurentMatrix, PuiseuxTruncation, RationalFunction, SeriesMatrix};
use mahler_core::solver::{entry_equation, solve_equation, verify_basis};
use mahler_core::window::{
    admissible_pair, admissible_pair_traced, build_ml, check_admissible, extend_p, window_params,
};
use proptest::strategy::Strategy;
use proptest::test_runner::{Config, TestRng, TestRunner};

type Outcome = Result<(), String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Outcome {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, limit: Duration) -> Outcome {
    let t = start.elapsed();
    ensure(t < limit, || format!("took {t:?}, limit {limit:?}"))
}

fn q() -> Field {
    Field::rationals()
}

fn num(f: &Field, n: i64, d: i64) -> Elem {
    f.from_rational(&rat(n, d)).unwrap()
}

fn rf(src: &str, f: &Field) -> RationalFunction {
    parse_rational_function(src, f).unwrap()
}

fn rudin_shapiro() -> MahlerEquation {
    let f = q();
    MahlerEquation::new(2, &f, vec![rf("1", &f), rf("z - 1", &f), rf("-2*z", &f)]).unwrap()
}

fn rs_system() -> MahlerSystem {
    build_companion(&rudin_shapiro())
}

/// `n` cases of `strategy`, from a fixed seed.
fn run_cases<S: Strategy>(
    cases: u32,
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), proptest::test_runner::TestCaseError>,
) -> Outcome {
    let config = Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    };
    let rng = TestRng::deterministic_rng(config.rng_algorithm);
    TestRunner::new_with_rng(config, rng)
        .run(&strategy, test)
        .map_err(|e| e.to_string())
}

/// Mismatches between `t` and the Laurent polynomial `src`, exponents `lo..=order`.
fn mismatches(t: &PuiseuxTruncation, src: &str, lo: i64) -> Vec<String> {
    let f = q();
    let want = rf(src, &f).expand(t.order_num());
    (lo..=t.order_num())
        .filter_map(|k| {
            let got = t.coeff(&rat(k, 1)).unwrap_or_else(|| f.zero());
            let w = want.coeff_num(k);
            (got != w).then(|| format!("z^{k}: computed {got}, reference {w}"))
        })
        .collect()
}

fn c1_window_params() -> Outcome {
    let start = Instant::now();
    let w = window_params(&rs_system()).map_err(|e| e.to_string())?;
    ensure(w.tuple() == (-1, -1, -3, 1), || {
        format!("got {:?}", w.tuple())
    })?;
    within(start, Duration::from_secs(1))
}

/// The 10×10 matrix with 2×2 blocks `B_0`, `B_1` at the given 1-based block positions.
fn block_layout(b0: &[(usize, usize)], b1: &[(usize, usize)]) -> Mat<Elem> {
    let f = q();
    let blocks = [
        Mat::from_ints(&f, &[&[1, 0], &[1, 0]]),
        Mat::from_ints(&f, &[&[-1, 2], &[0, 0]]),
    ];
    Mat::from_fn(&f, 10, 10, |i, j| {
        let at = (i / 2 + 1, j / 2 + 1);
        for (b, places) in blocks.iter().zip([b0, b1]) {
            if places.contains(&at) {
                return b[(i % 2, j % 2)].clone();
            }
        }
        f.zero()
    })
}

fn c2_m_matrices() -> Outcome {
    let sys = rs_system();
    let w = window_params(&sys).map_err(|e| e.to_string())?;
    let m0 = build_ml(&sys, &w, 0).map_err(|e| e.to_string())?;
    ensure(
        m0 == block_layout(&[(2, 3), (4, 4)], &[(3, 3), (5, 4)]),
        || format!("M_0 = {m0:?}"),
    )?;
    let m1 = build_ml(&sys, &w, -1).map_err(|e| e.to_string())?;
    ensure(
        m1 == block_layout(&[(1, 3), (3, 4), (5, 5)], &[(2, 3), (4, 4)]),
        || format!("M_-1 = {m1:?}"),
    )?;
    run_cases(20, window_identity::vectors(2, 3), |c| {
        window_identity::check(&window_identity::rudin_shapiro(), &c)
    })?;
    run_cases(20, window_identity::vectors(2, 8), |c| {
        let sys = window_identity::rational_system();
        let w = window_params(&sys).unwrap();
        let len = (w.mu - w.nu_p + 1) as usize;
        let c: Vec<Vec<i64>> = c
            .into_iter()
            .map(|v| v.into_iter().take(len).collect())
            .collect();
        window_identity::check(&sys, &c)
    })
}

fn c3_algorithm() -> Outcome {
    let start = Instant::now();
    let f = q();
    let sys = rs_system();
    let (pair, trace) = admissible_pair_traced(&sys).map_err(|e| e.to_string())?;
    let e1: Vec<Elem> = [0, 0, 0, 0, 0, 0, 1, 1, 1, 0]
        .iter()
        .map(|x| f.from_int(*x))
        .collect();
    ensure(trace.x[0].vectors() == vec![e1], || {
        format!("X_1 = {:?}", trace.x[0].vectors())
    })?;
    ensure(trace.x.len() >= 2 && trace.x[1].dim() == 2, || {
        "dim X_2 ≠ 2".into()
    })?;
    let theta: Vec<String> = [(0, 0), (0, 1), (1, 0), (1, 1)]
        .iter()
        .map(|&(i, j)| pair.theta_entry(i, j).to_string())
        .collect();
    ensure(theta == ["1", "z^(-1) - 1", "0", "-1/2"], || {
        format!("Θ = {theta:?}")
    })?;
    let pbar: Vec<String> = [(0, 0), (0, 1), (1, 0), (1, 1)]
        .iter()
        .map(|&(i, j)| pair.p_entry(i, j).to_string())
        .collect();
    ensure(
        pbar == [
            "1 + z + O(z^2)",
            "z + O(z^2)",
            "1 + O(z^2)",
            "z^(-1) - 1 + z + O(z^2)",
        ],
        || format!("P̄ = {pbar:?}"),
    )?;

    // the reference pair, entered independently of the algorithm
    let p = SeriesMatrix::new(
        &f,
        2,
        2,
        -1,
        vec![
            Mat::from_ints(&f, &[&[0, 0], &[0, 1]]),
            Mat::from_ints(&f, &[&[1, 0], &[1, -1]]),
            Mat::from_ints(&f, &[&[1, 1], &[0, 1]]),
        ],
    );
    let c = Mat::from_rows(
        &f,
        vec![
            vec![f.one(), f.from_int(-1)],
            vec![f.zero(), num(&f, -1, 2)],
        ],
    )
    .unwrap();
    let theta = LaurentMatrix::new(
        &f,
        2,
        2,
        [(0, c), (-1, Mat::from_ints(&f, &[&[0, 1], &[0, 0]]))],
    );
    let rep = check_admissible(&sys, &p, &theta, 1);
    ensure(rep.ok(), || format!("reference pair rejected: {rep:?}"))?;
    within(start, Duration::from_secs(5))
}

fn c4_extension() -> Outcome {
    let sys = rs_system();
    let pair = extend_p(&admissible_pair(&sys).map_err(|e| e.to_string())?, &sys, 9)
        .map_err(|e| e.to_string())?;
    let reference = [
        [
            "1+z+z^2-z^3+z^4+z^5-z^6+z^7+z^8+z^9",
            "z - 5/2*z^2 + 3/2*z^3 + 5/4*z^4 - 7/4*z^5 + 5/4*z^6 - 1/4*z^7 - 5/8*z^8 + 3/8*z^9",
        ],
        [
            "1+z^2+z^4-z^6+z^7+z^9",
            "1/z - 1 + z - 3/2*z^2 + z^3 + 1/4*z^4 - z^5 + 1/4*z^6 + z^7 - 13/8*z^8 + z^9",
        ],
    ];
    let mut bad = Vec::new();
    for (i, row) in reference.iter().enumerate() {
        for (j, src) in row.iter().enumerate() {
            let t = pair.p_entry(i, j);
            ensure(t.order_num() == 9, || {
                format!("entry ({i},{j}) known through {}", t.order_num())
            })?;
            for m in mismatches(&t, src, -1) {
                bad.push(format!("entry ({},{}) {m}", i + 1, j + 1));
            }
        }
    }
    ensure(bad.is_empty(), || bad.join("; "))
}

/// `C · E` for a constant matrix `C`.
fn left_mul(c: &Mat<Elem>, e: &ConstMatrix, f: &Field) -> ConstMatrix {
    let n = c.rows();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    (0..n).fold(ConstElem::zero(f), |acc, k| {
                        acc.add(&e[k][j].scale(&c[(i, k)]))
                    })
                })
                .collect()
        })
        .collect()
}

fn c5_h_and_constant() -> Outcome {
    let f = q();
    let sys = rs_system();
    let pair = admissible_pair(&sys).map_err(|e| e.to_string())?;
    let h = compute_h(&pair.theta, 2).map_err(|e| e.to_string())?;
    ensure(h[0][1].to_string() == "ξ[(-2)^k1; 1]", || {
        format!("h_12 = {}", h[0][1])
    })?;
    ensure(h[1][0].is_zero(), || format!("h_21 = {}", h[1][0]))?;
    for (i, hii) in [&h[0][0], &h[1][1]].iter().enumerate() {
        ensure(
            coefficient_at(hii, 2, &rat(0, 1)) == f.one()
                && coefficient_at(hii, 2, &rat(-1, 2)).is_zero(),
            || format!("h_{i}{i} = {hii}"),
        )?;
    }
    // Σ_{k≥1} (−2)^k z^{−1/2^k}
    for k in 1..=8u32 {
        let want = f.from_int((-2i64).pow(k));
        let got = coefficient_at(&h[0][1], 2, &rat(-1, 1 << k));
        ensure(got == want, || {
            format!("coefficient of z^(-1/2^{k}) is {got}")
        })?;
    }
    for g in [rat(-3, 4), rat(-1, 1), rat(0, 1), rat(1, 2)] {
        ensure(coefficient_at(&h[0][1], 2, &g).is_zero(), || {
            format!("h_12 has a term at {g}")
        })?;
    }

    let c = Mat::from_rows(
        &f,
        vec![
            vec![f.one(), f.from_int(-1)],
            vec![f.zero(), num(&f, -1, 2)],
        ],
    )
    .unwrap();
    let (k, e) = exp_constant(&c).map_err(|e| e.to_string())?;
    ensure(k.degree() == 1, || format!("e_C needs {k}"))?;
    let e_half = ConstElem::basis(&f, num(&f, -1, 2), 0);
    let want: ConstMatrix = vec![
        vec![
            ConstElem::one(&f),
            e_half
                .scale(&num(&f, 2, 3))
                .sub(&ConstElem::scalar(num(&f, 2, 3))),
        ],
        vec![ConstElem::zero(&f), e_half],
    ];
    ensure(e == want, || format!("e_C = {e:?}"))?;
    ensure(const_matrix_phi(&e) == left_mul(&c, &e, &f), || {
        "φ(e_C) ≠ C e_C".into()
    })?;
    let res = solve_equation(&rudin_shapiro(), 9).map_err(|e| e.to_string())?;
    ensure(res.e_c == want, || "solver's e_C differs".into())
}

fn c6_rotation() -> Outcome {
    let f = q();
    let c = Mat::from_ints(&f, &[&[0, 1], &[-1, 0]]);
    let (k, e) = exp_constant(&c).map_err(|e| e.to_string())?;
    let i = k.generator().ok_or("no generator")?;
    ensure(&i * &i == -&k.one(), || {
        format!("extension {k} is not Q(i)")
    })?;
    let half = k.from_rational(&rat(1, 2)).unwrap();
    let half_i = &half * &i;
    let ei = ConstElem::basis(&k, i.clone(), 0);
    let emi = ConstElem::basis(&k, -&i, 0);
    let diag = ei.add(&emi).scale(&half);
    let want: ConstMatrix = vec![
        vec![diag.clone(), emi.sub(&ei).scale(&half_i)],
        vec![ei.sub(&emi).scale(&half_i), diag],
    ];
    ensure(e == want, || format!("e_C = {e:?}"))?;
    let c = c.embed(&k).map_err(|e| e.to_string())?;
    ensure(const_matrix_phi(&e) == left_mul(&c, &e, &k), || {
        "φ(e_C) ≠ C e_C".into()
    })
}

fn c7_carlitz() -> Outcome {
    let f = Field::fp_function(3, "theta").map_err(|e| e.to_string())?;
    let th = f.generator().ok_or("no θ")?;
    let eq = MahlerEquation::new(
        3,
        &f,
        vec![
            rf("(z^3 - theta)*(z^9 - theta)", &f),
            rf("-(z^3 - theta - 1)*(z^9 - theta)", &f),
            rf("-(z^3 - theta)", &f),
        ],
    )
    .map_err(|e| e.to_string())?;
    let (o, z) = (f.one(), f.zero());
    let res = solve_equation(&eq, 5).map_err(|e| e.to_string())?;
    let pbar = Mat::from_rows(
        &f,
        vec![vec![o.clone(), o.clone()], vec![o.clone(), th.clone()]],
    )
    .unwrap();
    let p = &res.pair.p;
    ensure(p.val() == 0 && p.coeff(0) == pbar, || {
        format!("P̄ = {:?}", p.coeff(0))
    })?;
    let theta = Mat::from_rows(
        &f,
        vec![vec![o.clone(), z.clone()], vec![z.clone(), th.clone()]],
    )
    .unwrap();
    ensure(res.pair.theta == LaurentMatrix::constant(&theta), || {
        "Θ ≠ diag(1, θ)".into()
    })?;
    for i in 0..2 {
        for j in 0..2 {
            let hij = &res.h[i][j];
            let want = if i == j { o.clone() } else { z.clone() };
            ensure(coefficient_at(hij, 3, &rat(0, 1)) == want, || {
                format!("h_{i}{j} = {hij}")
            })?;
            ensure(
                hij.terms().len() <= 1 && hij.terms().keys().all(|k| k.a.is_empty()),
                || format!("h_{i}{j} = {hij}"),
            )?;
        }
    }
    let want: ConstMatrix = vec![
        vec![ConstElem::one(&f), ConstElem::zero(&f)],
        vec![ConstElem::zero(&f), ConstElem::basis(&f, th.clone(), 0)],
    ];
    ensure(res.e_c == want, || format!("e_C = {:?}", res.e_c))?;
    let rep = verify_basis(&eq, &res).map_err(|e| e.to_string())?;
    ensure(
        rep.ok() && rep.verified_order().is_some_and(|o| o >= rat(5, 1)),
        || format!("{rep:?}"),
    )
}

fn c8_entry_equation() -> Outcome {
    let f = q();
    let sys = rs_system();
    let pair = admissible_pair(&sys).map_err(|e| e.to_string())?;
    let eq = entry_equation(&pair, &sys, 0, 1).map_err(|e| e.to_string())?;
    ensure(
        eq.p() == 2 && eq.order() == 4 && eq.coeffs().iter().all(|c| !c.is_zero()),
        || {
            format!(
                "entry equation has order {} with coefficients {:?}",
                eq.order(),
                eq.coeffs()
                    .iter()
                    .map(|c| c.to_string())
                    .collect::<Vec<_>>()
            )
        },
    )?;
    let h = extend_p(&pair, &sys, 30)
        .map_err(|e| e.to_string())?
        .p_entry(0, 1);
    let r = eq.apply(&h);
    ensure(r.vanishes_through(14), || {
        format!("computed equation leaves {r}")
    })?;

    let reference = [
        "-2*z^10-6*z^9-8*z^8-8*z^7-4*z^6+4*z^5+8*z^4+8*z^3+6*z^2+2*z",
        "-z^11-z^9-2*z^8+2*z^7+2*z^5+4*z^4-z^3-z-2",
        "z^13+z^12+z^11+3*z^10+5*z^9+5*z^8-2*z^7-6*z^6-z^5-z^4-3*z^3-z^2-z-1",
        "-z^13-z^12+3*z^11+3*z^10-4*z^7-4*z^6+z^5+z^4+z^3+z^2",
        "-2*z^13-2*z^12+2*z^11+2*z^10",
    ];
    let reference_eq = MahlerEquation::new(2, &f, reference.iter().map(|s| rf(s, &f)).collect())
        .map_err(|e| e.to_string())?;
    let r = reference_eq.apply(&h);
    ensure(r.vanishes_through(14), || {
        format!("reference equation leaves {r}")
    })?;
    // same operator up to a factor in K(z)
    let ratio = reference_eq.coeffs()[0]
        .div(&eq.coeffs()[0])
        .map_err(|e| e.to_string())?;
    ensure(
        reference_eq
            .coeffs()
            .iter()
            .zip(eq.coeffs())
            .all(|(a, b)| *a == ratio.mul(b)),
        || {
            format!("reference equation is not a K(z)-multiple of the computed one (ratio {ratio} on a_0)")
        },
    )
}

fn c9_hahn_suite() -> Outcome {
    let start = Instant::now();
    run_cases(100, hahn::basic(), |b| hahn::check_basic(&b))?;
    run_cases(50, hahn::expr(), |x| hahn::check_expr(&x))?;
    within(start, Duration::from_secs(60))
}

fn c10_end_to_end_suite() -> Outcome {
    let start = Instant::now();
    run_cases(30, random_eq::equation(), |(p, shape)| {
        random_eq::check_equation(p, &shape)
    })?;
    within(start, Duration::from_secs(300))
}

fn c11_negative() -> Outcome {
    let f = q();
    // y(z) + z y(z^4) = 0 has the single slope 1/3
    let eq = MahlerEquation::new(2, &f, vec![rf("1", &f), rf("0", &f), rf("z", &f)])
        .map_err(|e| e.to_string())?;
    let slopes = newton_slopes(&eq);
    ensure(slopes == vec![rat(1, 3)], || format!("slopes {slopes:?}"))?;
    let d = ramification_index(&slopes, 2);
    ensure(d == 3, || format!("d = {d}"))?;
    check_ramification(d, 2, eq.order()).map_err(|e| e.to_string())?;
    let res = solve_equation(&eq, 6).map_err(|e| e.to_string())?;
    ensure(res.d == 3, || format!("solver used d = {}", res.d))?;
    let rep = verify_basis(&eq, &res).map_err(|e| e.to_string())?;
    ensure(rep.ok(), || format!("{rep:?}"))?;

    let job = parse_json(r#"{"p":2,"field":{"kind":"rationals"},"coeffs":["0","1","1"]}"#).unwrap();
    let err = decode_job(&job).err().ok_or("a_0 = 0 accepted")?;
    ensure(
        err.to_string().contains("a_0 = 0") && err.exit_code() == 1,
        || format!("got {err}"),
    )?;
    ensure(
        MahlerEquation::new(2, &f, vec![rf("0", &f), rf("1", &f)]).is_err(),
        || "core accepted a_0 = 0".into(),
    )?;

    let dir = std::env::temp_dir().join(format!("mahler-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let job = dir.join("cubic.json");
    // x^3 - x - 1 is irreducible over Q
    std::fs::write(
        &job,
        r#"{"p":2,"field":{"kind":"rationals"},"coeffs":["1","1","0","-1"],"order":4}"#,
    )
    .map_err(|e| e.to_string())?;
    let out = Command::new(env!("CARGO_BIN_EXE_mahler"))
        .arg("solve")
        .arg("--input")
        .arg(&job)
        .output()
        .map_err(|e| e.to_string())?;
    ensure(out.status.code() == Some(2), || {
        format!(
            "exit {:?}: {}",
            out.status.code(),
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("Rudin-Shapiro window parameters", c1_window_params),
        ("Rudin-Shapiro M-matrices", c2_m_matrices),
        ("Rudin-Shapiro admissible pair", c3_algorithm),
        ("Rudin-Shapiro extension to order 9", c4_extension),
        ("Rudin-Shapiro H and e_C", c5_h_and_constant),
        ("rotation constant over Q(i)", c6_rotation),
        ("Carlitz equation over F_3(theta)", c7_carlitz),
        ("entry equation of the top-right entry", c8_entry_equation),
        ("Hahn series oracle suite", c9_hahn_suite),
        ("random equations end to end", c10_end_to_end_suite),
        ("negative cases", c11_negative),
    ];
    let mut failed = 0;
    for (n, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let t = start.elapsed();
        match outcome {
            Ok(()) => println!("PASS {:>2}. {name} ({t:.2?})", n + 1),
            Err(e) => {
                failed += 1;
                println!("FAIL {:>2}. {name} ({t:.2?}): {e}", n + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
