use invh2::groups::{abelian_group, abelian_invariants, h2_brute, schur_multiplier};

/// Invariant-factor chains `d_1 | d_2 | ... ` with product `n`.
fn chains(n: u64, min: u64) -> Vec<Vec<u64>> {
    if n == 1 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for d in 2..=n {
        if n % d == 0 && d % min == 0 {
            for mut rest in chains(n / d, d) {
                if rest.iter().all(|r| r % d == 0) {
                    rest.insert(0, d);
                    out.push(rest);
                }
            }
        }
    }
    out
}

#[test]
fn schur_formula_matches_brute_force_up_to_order_16() {
    let mut seen = 0;
    for n in 1..=16u64 {
        for inv in chains(n, 1) {
            let (g, _) = abelian_group("a", &inv).unwrap();
            assert_eq!(abelian_invariants(&g).unwrap(), inv);
            let e = *inv.last().unwrap_or(&1);
            let brute = h2_brute(&g, e).unwrap();
            assert_eq!(brute, schur_multiplier(&inv), "invariants {inv:?}");
            seen += 1;
        }
    }
    // number of abelian groups of each order 1..=16 summed
    assert_eq!(seen, 25);
}
