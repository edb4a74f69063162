use forcing_lab::arrays::{search_array, validate_array, PhpArray};
use forcing_lab::bruteforce::{all_total_orders, falling_ratio, max_antichain, merge_exists, EnumerationBudget};
use forcing_lab::trees::tree_size;
use forcing_lab::{Condition, OrderFrame, Universe};
use num_bigint::BigUint;

fn budget() -> EnumerationBudget {
    EnumerationBudget::default()
}

#[test]
fn compatibility_agrees_with_merge_oracle_exhaustively() {
    let u = Universe::full(5).unwrap();
    let conds = u.extensions_up_to(&Condition::empty(), 4);
    let mut disagreements = 0;
    for a in &conds {
        for b in &conds {
            if a.is_compatible(b) != merge_exists(a, b, &budget()).unwrap() {
                disagreements += 1;
            }
        }
    }
    assert_eq!(disagreements, 0);
}

#[test]
fn total_order_counts() {
    for m in 1..=7 {
        let u = Universe::full(m).unwrap();
        for k in 0..=m.min(3) {
            let o: Condition = Condition::new((0..k).rev().collect()).unwrap();
            let count = all_total_orders(m, &o, &budget()).unwrap().len() as u64;
            assert_eq!(count, falling_ratio(m, k), "m = {m}, |o| = {k}");
            assert!(all_total_orders(m, &o, &budget()).unwrap().iter().all(|t| u.extends(t, &o).unwrap()));
        }
    }
}

#[test]
fn antichain_equality_case() {
    for k in 0..=2 {
        for d in 0..=3 {
            for m in k + d..=6 {
                let o = Condition::new((0..k).collect()).unwrap();
                let best = max_antichain(&o, d, m, &budget()).unwrap();
                assert_eq!(BigUint::from(best), tree_size(k, d), "|o| = {k}, d = {d}, m = {m}");
            }
        }
    }
}

/// Every assignment of conditions to cells, checked axiom by axiom.
fn brute_force_exists(u: Universe, base: &Condition, p: usize, h: usize, max_len: usize) -> bool {
    let frame = OrderFrame::new(u);
    let candidates = u.extensions_up_to(base, max_len);
    let cells = p * h;
    let k = candidates.len();
    (0u64..1 << (k * cells)).any(|code| {
        let mut array = PhpArray::empty(base.clone(), p, h);
        for cell in 0..cells {
            for (i, c) in candidates.iter().enumerate() {
                if code >> (cell * k + i) & 1 == 1 {
                    array.cells[cell / h][cell % h].push(c.clone());
                }
            }
        }
        validate_array(&frame, &array).unwrap().passed()
    })
}

#[test]
fn array_search_matches_brute_force() {
    let cases = [
        (2, vec![], 1, 1),
        (2, vec![], 2, 1),
        (2, vec![], 1, 2),
        (2, vec![0], 2, 1),
        (2, vec![0], 1, 2),
        (2, vec![], 3, 1),
        (2, vec![], 1, 3),
    ];
    for (n, base, p, h) in cases {
        let u = Universe::full(n).unwrap();
        let base = Condition::new(base).unwrap();
        let searched = search_array(&OrderFrame::new(u), &base, p, h, 2, &budget()).unwrap();
        assert_eq!(searched.exists(), brute_force_exists(u, &base, p, h, 2), "{n} {base} {p} {h}");
        assert_eq!(searched.exists(), p <= h);
    }
}
