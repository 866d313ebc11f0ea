use invh2::catalogue::{lookup, CATALOGUE};
use invh2::groups::{abelian_invariants, h2_brute, schur_multiplier};
use invh2::linalg::AbelianGroupPresentation;
use invh2::pipeline::{prepare, run};
use invh2::solver::CoeffMode;

fn h2(name: &str, mode: CoeffMode) -> (AbelianGroupPresentation, usize) {
    let p = prepare(lookup(name).unwrap().load().unwrap()).unwrap();
    let o = run(&p, mode).unwrap();
    for (i, c) in o.computation.group.classes.iter().enumerate() {
        assert!(
            c.representative
                .coherence_defects(&o.computation.category)
                .is_empty(),
            "{name} class {i}"
        );
    }
    (
        o.computation.group.presentation.clone(),
        o.computation.group.classes.len(),
    )
}

#[test]
fn every_catalogue_entry_matches_its_expected_group_in_both_modes() {
    for e in CATALOGUE {
        let Some(want) = e.expected() else { continue };
        for mode in [CoeffMode::Unitary, CoeffMode::Invertible] {
            let (got, n) = h2(e.name, mode);
            assert_eq!(got, want, "{} ({mode})", e.name);
            assert_eq!(Some(n as u64), want.order(), "{} ({mode})", e.name);
        }
    }
}

#[test]
fn solver_agrees_with_schur_formula_and_brute_force_on_abelian_groups() {
    for (name, want) in [
        ("k4", "Z/2"),
        ("z2^3", "Z/2 x Z/2 x Z/2"),
        ("z4xz2", "Z/2"),
        ("z6", "0"),
        ("z8", "0"),
    ] {
        let input = lookup(name).unwrap().load().unwrap();
        let g = &input.rep_data().unwrap().group;
        let inv = abelian_invariants(g).unwrap();
        let formula = schur_multiplier(&inv);
        let brute = h2_brute(g, *inv.last().unwrap()).unwrap();
        let (solver, _) = h2(name, CoeffMode::Unitary);
        assert_eq!(formula, brute, "{name}");
        assert_eq!(solver, formula, "{name}");
        assert_eq!(
            AbelianGroupPresentation::parse(want),
            Some(formula),
            "{name}"
        );
    }
}

#[test]
fn nonabelian_groups_without_invariant_twists() {
    for name in ["s3", "s4", "q8", "d4"] {
        assert!(h2(name, CoeffMode::Unitary).0.is_trivial(), "{name}");
        assert!(h2(name, CoeffMode::Invertible).0.is_trivial(), "{name}");
    }
}

#[test]
fn unitary_classes_never_outnumber_invertible_ones() {
    for e in CATALOGUE {
        let (_, u) = h2(e.name, CoeffMode::Unitary);
        let (_, i) = h2(e.name, CoeffMode::Invertible);
        assert!(u <= i, "{}: {u} > {i}", e.name);
        if e.name == "wall32" || e.name == "ty-k4-kp" {
            assert_eq!(u, i, "{}", e.name);
        }
    }
}
