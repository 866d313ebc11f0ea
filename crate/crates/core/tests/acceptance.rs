//! One line per acceptance criterion.

use std::process::Command;
use std::time::{Duration, Instant};

use num_traits::Zero;
use proptest::test_runner::{Config, TestRunner};

use invh2::catalogue::{lookup, CATALOGUE};
use invh2::cyclotomic::{ctx, CycloNumber};
use invh2::fusion::from_irreps;
use invh2::groups::{abelian_invariants, h2_brute, schur_multiplier, RepData};
use invh2::linalg::{smith_normal_form, IntMatrix};
use invh2::pipeline::{prepare, run, Outcome, Prepared};
use invh2::solver::{CoeffMode, TensorStructure};
use invh2::verify::{assemble, cohomologous, decompose, run_checks, GroupCocycle};

fn test_runner(cases: u32) -> TestRunner {
    TestRunner::new(Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    })
}

fn compute_cli(input: &str, coeff: &str) -> (String, Duration) {
    let t = Instant::now();
    let o = Command::new(env!("CARGO_BIN_EXE_invh2"))
        .args(["compute", input, "--coeff", coeff, "--branch-report"])
        .output()
        .unwrap();
    (String::from_utf8_lossy(&o.stdout).into_owned(), t.elapsed())
}

fn solve(name: &str, mode: CoeffMode) -> (Prepared, Outcome) {
    let p = prepare(lookup(name).unwrap().load().unwrap()).unwrap();
    let o = run(&p, mode).unwrap();
    (p, o)
}

fn both_modes(input: &str, want: &str, limit: Duration) -> Result<String, String> {
    let mut notes = Vec::new();
    for coeff in ["unitary", "invertible"] {
        let (out, t) = compute_cli(input, coeff);
        let line = out
            .lines()
            .find(|l| l.starts_with("result:"))
            .unwrap_or("no result")
            .to_string();
        if !line.contains(&format!("H2 = {want} (")) || t > limit {
            return Err(format!("{coeff}: {line} in {t:.1?}"));
        }
        notes.push(format!("{coeff} {t:.1?}"));
    }
    Ok(format!("{want} ({})", notes.join(", ")))
}

fn criterion_3() -> Result<String, String> {
    let (out, _) = compute_cli("wall32", "unitary");
    if !out.contains("4 candidates, 2 survive") {
        return Err("report does not show 4 candidates with 2 survivors".into());
    }
    let (_, o) = solve("wall32", CoeffMode::Unitary);
    let c = &o.computation;
    let trivial = &c.branches[c.group.classes[c.group.identity].branch];
    let other: Vec<_> = c
        .branches
        .iter()
        .filter(|b| b.dead.is_none() && b.branch.choice != trivial.branch.choice)
        .collect();
    match other.as_slice() {
        [b] if b.classes.len() == 1 => Ok("nontrivial survivor has 1 class".into()),
        _ => Err(format!("{} nontrivial survivors", other.len())),
    }
}

fn criterion_4() -> Result<String, String> {
    for (name, want) in [
        ("k4", "Z/2"),
        ("z2^3", "Z/2 x Z/2 x Z/2"),
        ("z4xz2", "Z/2"),
        ("z6", "trivial group"),
        ("z8", "trivial group"),
    ] {
        let (p, o) = solve(name, CoeffMode::Unitary);
        let g = &p.input.rep_data().unwrap().group;
        let inv = abelian_invariants(g).map_err(|e| e.to_string())?;
        let formula = schur_multiplier(&inv);
        let brute = h2_brute(g, *inv.last().unwrap()).map_err(|e| e.to_string())?;
        let solver = &o.computation.group.presentation;
        if formula != brute || *solver != formula || formula.to_string() != want {
            return Err(format!(
                "{name}: schur {formula}, brute {brute}, solver {solver}"
            ));
        }
    }
    Ok("k4, z2^3, z4xz2, z6, z8 agree".into())
}

fn criterion_5() -> Result<String, String> {
    for name in ["s3", "s4"] {
        for mode in [CoeffMode::Unitary, CoeffMode::Invertible] {
            let (_, o) = solve(name, mode);
            if !o.computation.group.presentation.is_trivial() {
                return Err(format!(
                    "{name} ({mode}): {}",
                    o.computation.group.presentation
                ));
            }
        }
    }
    Ok("s3 and s4 trivial".into())
}

fn criterion_6() -> Result<String, String> {
    let (p, o) = solve("wall32", CoeffMode::Unitary);
    let d = p.input.rep_data().unwrap();
    let omega = o.certificates[1 - o.computation.group.identity]
        .cocycle
        .as_ref()
        .unwrap();
    for (name, r) in run_checks(&d.group, omega) {
        r.map_err(|w| format!("{name} fails at {:?}", w.0))?;
    }
    let one = GroupCocycle::one(&d.group, omega.context());
    if cohomologous(d, &one, omega)
        .map_err(|e| e.to_string())?
        .is_some()
    {
        return Err("1 and Omega are cohomologous".into());
    }
    let square = omega.product(omega, &d.group).map_err(|e| e.to_string())?;
    match cohomologous(d, &one, &square).map_err(|e| e.to_string())? {
        Some(h) => Ok(format!(
            "all checks pass, Omega^2 ~ 1 with witness of {} scalars",
            h.len()
        )),
        None => Err("Omega^2 not cohomologous to 1".into()),
    }
}

fn fourier_round_trip(d: &RepData, runner: &mut TestRunner) -> Result<(), String> {
    let cat = from_irreps(d).map_err(|e| e.to_string())?;
    let id = TensorStructure::identity(&cat);
    let n = id.channels().count();
    let strategy = proptest::collection::vec((0i64..12, 1i64..5), n);
    runner
        .run(&strategy, |vals| {
            let c = ctx(12);
            let channels = id
                .channels()
                .zip(&vals)
                .map(|((&(x, y, z), m), &(k, p))| {
                    let m = if x == cat.unit || y == cat.unit {
                        m.embed(c).unwrap()
                    } else {
                        m.embed(c)
                            .unwrap()
                            .scale(&(&CycloNumber::root(c, k) * &CycloNumber::from_ratio(c, p, 3)))
                    };
                    ((x, y, z), m)
                })
                .collect();
            let j = TensorStructure::new(&cat, channels).unwrap();
            let back = decompose(d, &assemble(d, &j).unwrap()).unwrap();
            for (ch, m) in back {
                let want = j.get(ch).unwrap();
                proptest::prop_assert!(m.embed(want.context()).unwrap() == *want);
            }
            Ok(())
        })
        .map_err(|e| e.to_string())
}

fn criterion_7() -> Result<String, String> {
    for e in CATALOGUE {
        let p = prepare(e.load().map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        if !p.category.pentagon_check().is_empty() {
            return Err(format!("pentagon fails on {}", e.name));
        }
    }
    let mut runner = test_runner(1000);
    runner
        .run(
            &(
                1usize..6,
                1usize..6,
                proptest::collection::vec(-12i64..12, 36),
            ),
            |(r, c, seed)| {
                let a = IntMatrix::from_rows(
                    &(0..r)
                        .map(|i| seed[i * 6..i * 6 + c].to_vec())
                        .collect::<Vec<_>>(),
                );
                let s = smith_normal_form(&a);
                proptest::prop_assert!(s.u.mul(&a).mul(&s.v) == s.s && s.s.is_diagonal());
                let d = s.diagonal();
                let chain = d.windows(2).all(|w| {
                    if w[0].is_zero() {
                        w[1].is_zero()
                    } else {
                        (&w[1] % &w[0]).is_zero()
                    }
                });
                proptest::prop_assert!(chain, "divisibility chain broken: {:?}", d);
                Ok(())
            },
        )
        .map_err(|e| format!("snf: {e}"))?;
    let mut runner = test_runner(100);
    let (g, irreps) = invh2::groups::abelian_group("z2", &[2]).unwrap();
    fourier_round_trip(&RepData::new(g, irreps).unwrap(), &mut runner)?;
    for name in ["k4", "s3"] {
        fourier_round_trip(
            lookup(name).unwrap().load().unwrap().rep_data().unwrap(),
            &mut runner,
        )?;
    }
    let (_, o) = solve("z2^3", CoeffMode::Invertible);
    let c = &o.computation;
    let mut runner = test_runner(100);
    runner
        .run(
            &(0usize..8, proptest::collection::vec((0i64..12, 1i64..5), 8)),
            |(k, g)| {
                let big = ctx(12);
                let mut gauge: Vec<CycloNumber> = g
                    .iter()
                    .map(|&(r, p)| &CycloNumber::root(big, r) * &CycloNumber::from_ratio(big, p, 2))
                    .collect();
                gauge[c.category.unit] = CycloNumber::one(big);
                let rep = c.group.classes[k].representative.embed(big).unwrap();
                proptest::prop_assert_eq!(
                    c.classify(&rep.gauge(&gauge).unwrap()).unwrap(),
                    Some(k)
                );
                Ok(())
            },
        )
        .map_err(|e| format!("gauge orbit: {e}"))?;
    Ok("pentagon, 1000 SNF, 3x100 Fourier round trips, 100 gauge orbits".into())
}

fn criterion_8() -> Result<String, String> {
    let mut counts = Vec::new();
    for e in CATALOGUE {
        let u = solve(e.name, CoeffMode::Unitary)
            .1
            .computation
            .group
            .classes
            .len();
        let i = solve(e.name, CoeffMode::Invertible)
            .1
            .computation
            .group
            .classes
            .len();
        if u > i || ((e.name == "wall32" || e.name == "ty-k4-kp") && u != i) {
            return Err(format!("{}: unitary {u}, invertible {i}", e.name));
        }
        counts.push(format!("{} {u}/{i}", e.name));
    }
    Ok(counts.join(", "))
}

fn main() {
    let criteria: Vec<(&str, Box<dyn Fn() -> Result<String, String>>)> = vec![
        (
            "1 wall32 is Z/2 in both modes within 5 min",
            Box::new(|| both_modes("wall32", "Z/2", Duration::from_secs(300))),
        ),
        (
            "2 ty-k4-kp is trivial in both modes within 1 min",
            Box::new(|| both_modes("ty-k4-kp", "trivial group", Duration::from_secs(60))),
        ),
        ("3 wall branch anatomy", Box::new(criterion_3)),
        (
            "4 solver, Schur formula and brute force agree",
            Box::new(criterion_4),
        ),
        ("5 S3 and S4 are trivial", Box::new(criterion_5)),
        ("6 wall cocycle certification", Box::new(criterion_6)),
        ("7 property suite", Box::new(criterion_7)),
        ("8 unitary count <= invertible count", Box::new(criterion_8)),
    ];
    let mut failed = 0;
    for (name, check) in &criteria {
        match check() {
            Ok(note) => println!("PASS  {name}: {note}"),
            Err(why) => {
                failed += 1;
                println!("FAIL  {name}: {why}");
            }
        }
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
