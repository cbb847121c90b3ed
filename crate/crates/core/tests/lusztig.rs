use std::sync::Arc;

use braidseed::lusztig::{
    all_shortest_paths, applicable_moves, apply_move, d_vector, dot_word_mismatches, find_move_path, prec,
    product_param, psi, quiver_sequence, staircase_failures, track_construction, transport, transport_along,
    verify_vanishing, Dominance, Move, MoveKind, ParamVector, PrecOrder, MOVE_SEARCH_LIMIT,
};
use braidseed::rootdata::{is_reduced, DynkinData, Series, WeylElement};
use braidseed::words::{leftmost_for_element, leftmost_subexpression, Word};
use braidseed::Error;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn a(n: usize) -> Arc<DynkinData> {
    DynkinData::new(Series::A, n).unwrap()
}

fn word(rank: usize, letters: &[usize]) -> Word {
    Word::new(&a(rank), letters.to_vec()).unwrap()
}

fn example_word() -> Word {
    word(3, &[3, 2, 1, 2, 3, 1, 3, 2])
}

fn pv(v: &[u64]) -> ParamVector {
    ParamVector(v.to_vec())
}

fn words_of_length(rank: usize, len: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|w| (1..=rank).map(move |c| {
                let mut w = w.clone();
                w.push(c);
                w
            }))
            .collect();
    }
    out
}

/// Every word reachable from `start` by moves.
fn move_class(dynkin: &DynkinData, start: &[usize]) -> Vec<Vec<usize>> {
    let mut seen = vec![start.to_vec()];
    let mut i = 0;
    while i < seen.len() {
        let current = seen[i].clone();
        i += 1;
        for mv in applicable_moves(dynkin, &current) {
            let mut next = current.clone();
            match mv.kind {
                MoveKind::Two => next.swap(mv.position, mv.position + 1),
                MoveKind::Three => {
                    let (x, y) = (next[mv.position - 1], next[mv.position]);
                    next[mv.position - 1] = y;
                    next[mv.position] = x;
                    next[mv.position + 1] = y;
                }
            }
            if !seen.contains(&next) {
                seen.push(next);
            }
        }
    }
    seen
}

#[test]
fn prec_examples() {
    let x = pv(&[0, 1, 0]);
    assert_eq!(prec(&x, &x).unwrap(), PrecOrder::Equal);
    assert_eq!(prec(&x, &pv(&[1, 1, 1])).unwrap(), PrecOrder::Less);
    assert_eq!(prec(&pv(&[1, 1, 1]), &x).unwrap(), PrecOrder::Greater);
    assert_eq!(prec(&pv(&[1, 0]), &pv(&[0, 1])).unwrap(), PrecOrder::Incomparable);
    // A single differing entry is never comparable.
    assert_eq!(prec(&pv(&[0, 0]), &pv(&[0, 1])).unwrap(), PrecOrder::Incomparable);
    assert!(matches!(prec(&x, &pv(&[0])), Err(Error::DimensionMismatch(_))));
}

#[test]
fn psi_examples() {
    let w = word(2, &[1, 2, 1]);
    let three = Move::three(1);
    assert_eq!(psi(&w, three, &pv(&[1, 0, 2])).unwrap(), pv(&[1, 1, 0]));
    assert_eq!(psi(&w, three, &pv(&[0, 5, 0])).unwrap(), pv(&[5, 0, 5]));
    assert_eq!(psi(&w, three, &pv(&[0, 0, 0])).unwrap(), pv(&[0, 0, 0]));
    let back = apply_move(&w, three).unwrap();
    assert_eq!(back.letters(), &[2, 1, 2]);
    assert_eq!(psi(&back, three, &pv(&[1, 1, 0])).unwrap(), pv(&[1, 0, 2]));

    let c = word(3, &[1, 3, 2]);
    assert_eq!(psi(&c, Move::two(0), &pv(&[4, 7, 1])).unwrap(), pv(&[7, 4, 1]));
    assert!(matches!(psi(&c, Move::two(1), &pv(&[0, 0, 0])), Err(Error::Domain(_))));
    assert!(matches!(psi(&c, Move::three(1), &pv(&[0, 0, 0])), Err(Error::Domain(_))));
    assert!(matches!(psi(&c, Move::two(0), &pv(&[0, 0])), Err(Error::DimensionMismatch(_))));
}

#[test]
fn move_paths() {
    let w = word(2, &[1, 2, 1]);
    assert!(find_move_path(&w, &w, MOVE_SEARCH_LIMIT).unwrap().moves.is_empty());
    let path = find_move_path(&w, &word(2, &[2, 1, 2]), MOVE_SEARCH_LIMIT).unwrap();
    assert_eq!(path.moves, vec![Move::three(1)]);
    assert_eq!(serde_json::to_string(&path.moves).unwrap(), r#"[["three",2]]"#);
    let swap = find_move_path(&word(3, &[1, 3]), &word(3, &[3, 1]), MOVE_SEARCH_LIMIT).unwrap();
    assert_eq!(swap.moves, vec![Move::two(0)]);
    assert!(matches!(
        find_move_path(&word(2, &[1, 2]), &word(2, &[2, 1]), MOVE_SEARCH_LIMIT),
        Err(Error::NotEquivalent { .. })
    ));
    assert!(matches!(find_move_path(&word(2, &[1, 2]), &word(2, &[1]), MOVE_SEARCH_LIMIT), Err(Error::NotEquivalent { .. })));
    let long = word(3, &[1, 2, 1, 3, 2, 1]);
    let target = word(3, &[3, 2, 3, 1, 2, 3]);
    assert!(matches!(find_move_path(&long, &target, 3), Err(Error::SearchLimit { limit: 3 })));
    assert!(find_move_path(&long, &target, MOVE_SEARCH_LIMIT).is_ok());
}

#[test]
fn transport_examples() {
    let w = word(2, &[1, 2, 1]);
    let v = word(2, &[2, 1, 2]);
    let x = pv(&[1, 0, 2]);
    assert_eq!(transport(&w, &w, &x).unwrap(), x);
    assert_eq!(transport(&w, &v, &x).unwrap(), pv(&[1, 1, 0]));
    let long = word(3, &[1, 2, 1, 3, 2, 1]);
    let target = word(3, &[3, 2, 3, 1, 2, 3]);
    let y = pv(&[2, 0, 1, 3, 0, 1]);
    let there = transport(&long, &target, &y).unwrap();
    assert_eq!(transport(&target, &long, &there).unwrap(), y);
}

#[test]
fn d_vectors_and_products() {
    let w = example_word();
    assert_eq!(d_vector(&w, 0).unwrap(), ParamVector::unit(8, 0));
    assert_eq!(d_vector(&w, 4).unwrap().support(), vec![0, 4]);
    assert_eq!(d_vector(&w, 7).unwrap().support(), vec![1, 3, 7]);
    assert!(d_vector(&w, 8).is_err());
    let x = pv(&[0, 2, 1]);
    assert_eq!(product_param(&x, &ParamVector::zeros(3)).unwrap(), x);
    assert_eq!(product_param(&pv(&[1, 0]), &pv(&[1, 0])).unwrap(), pv(&[2, 0]));
    assert_eq!(product_param(&pv(&[0, 0, 3]), &pv(&[1, 0, 0])).unwrap(), pv(&[1, 0, 3]));
    assert!(product_param(&x, &pv(&[1])).is_err());
}

#[test]
fn tracking_with_trivial_v_keeps_d_vectors() {
    let w = example_word();
    let sub = leftmost_subexpression(&w, &[]).unwrap();
    let table = track_construction(&w, &sub).unwrap();
    let initial: Vec<ParamVector> = (0..8).map(|k| d_vector(&w, k).unwrap()).collect();
    assert_eq!(table.stages, vec![initial.clone()]);
    assert_eq!(table.final_params, initial);
    assert!(verify_vanishing(&w, &sub).pass);
}

#[test]
fn tracking_single_reflection_in_a2() {
    let w = word(2, &[1, 2, 1, 2]);
    let sub = leftmost_subexpression(&w, &[1]).unwrap();
    let table = track_construction(&w, &sub).unwrap();
    assert_eq!(table.steps.len(), 1);
    let step = &table.steps[0];
    assert_eq!((step.vertex, step.next_same, step.prev_same), (0, 2, None));
    // D_3 · (missing D_0) divided by D_1.
    assert_eq!(step.after, pv(&[0, 0, 1, 0]));
    assert_eq!(step.dominance, Dominance::Confirmed);
}

#[test]
fn tracking_the_example() {
    let w = example_word();
    for sub in [
        leftmost_subexpression(&w, &[3, 2, 3, 1, 2]).unwrap(),
        leftmost_for_element(&w, &WeylElement::from_word(w.dynkin(), &[3, 2, 3, 1, 2]).unwrap()).unwrap(),
    ] {
        let table = track_construction(&w, &sub).unwrap();
        assert_eq!(table.final_labels.len(), 3);
        for params in &table.final_params {
            assert!(params.restrict(&sub.positions).iter().all(|&x| x == 0));
        }
        assert!(staircase_failures(&w, &sub, &table).unwrap().is_empty());
        let report = verify_vanishing(&w, &sub);
        assert!(report.pass && report.final_quiver_empty, "{report:?}");
        assert_eq!(report.dominance[0], table.steps.len());
        let quivers = quiver_sequence(&w, &sub, &table).unwrap();
        assert_eq!(quivers.vertices.len(), 6);
        assert!(quivers.vertices[0].contains(&sub.positions[0]));
        assert!(quivers.vertices.windows(2).all(|pair| pair[1].iter().all(|k| pair[0].contains(k))));
    }
    let sub = leftmost_subexpression(&w, &[3, 2, 3, 1, 2]).unwrap();
    let survivors: Vec<usize> =
        track_construction(&w, &sub).unwrap().final_labels.iter().map(|l| l.position + 1).collect();
    assert_eq!(survivors, vec![1, 2, 3]);
    let json = serde_json::to_value(track_construction(&w, &sub).unwrap()).unwrap();
    assert_eq!(json["final"].as_array().unwrap().len(), 3);
    assert_eq!(json["final"][0]["label"], serde_json::json!(["3", 1]));
}

#[test]
fn vanishing_for_short_a3_words() {
    let d = a(3);
    for len in 1..=5 {
        for letters in words_of_length(3, len) {
            let w = Word::new(&d, letters).unwrap();
            for v in w.demazure().0.lower_interval() {
                let sub = leftmost_for_element(&w, &v).unwrap();
                let report = verify_vanishing(&w, &sub);
                assert!(report.pass, "{:?} {:?}: {report:?}", w.letters(), sub.v_word);
                assert!(report.final_quiver_empty);
                let table = track_construction(&w, &sub).unwrap();
                assert!(staircase_failures(&w, &sub, &table).unwrap().is_empty());
            }
        }
    }
}

#[test]
fn transported_d_vectors_in_a2() {
    let d = a(2);
    let mut checked = 0;
    for len in 0..=4 {
        for letters in words_of_length(2, len) {
            if !is_reduced(&d, &letters).unwrap() {
                continue;
            }
            let w = Word::new(&d, letters).unwrap();
            for v in w.demazure().0.lower_interval() {
                let sub = leftmost_for_element(&w, &v).unwrap();
                assert!(dot_word_mismatches(&w, &sub).unwrap().is_empty());
                checked += 1;
            }
        }
    }
    assert_eq!(checked, 25);
    assert!(matches!(dot_word_mismatches(&word(2, &[1, 1]), &leftmost_subexpression(&word(2, &[1, 1]), &[]).unwrap()), Err(Error::NotReduced { .. })));
}

#[test]
fn shortest_paths_agree_for_reduced_words() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for rank in [2, 3] {
        let d = a(rank);
        for len in 1..=5 {
            for letters in words_of_length(rank, len) {
                if !is_reduced(&d, &letters).unwrap() {
                    continue;
                }
                let w = Word::new(&d, letters.clone()).unwrap();
                for target in move_class(&d, &letters) {
                    let t = Word::new(&d, target).unwrap();
                    let paths = all_shortest_paths(&w, &t, MOVE_SEARCH_LIMIT, usize::MAX).unwrap();
                    let x = ParamVector((0..len).map(|_| rng.gen_range(0..5)).collect());
                    let first = transport_along(&w, &paths[0], &x).unwrap();
                    for p in &paths[1..] {
                        assert_eq!(transport_along(&w, p, &x).unwrap(), first);
                    }
                }
            }
        }
    }
}

#[test]
fn closed_move_walks_act_trivially_on_reduced_words() {
    let d = a(3);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let start = Word::new(&d, d.w0_word().to_vec()).unwrap();
    for _ in 0..200 {
        let mut current = start.clone();
        let x = ParamVector((0..6).map(|_| rng.gen_range(0..4)).collect());
        let mut params = x.clone();
        for _ in 0..rng.gen_range(1..15) {
            let moves = applicable_moves(&d, current.letters());
            let mv = moves[rng.gen_range(0..moves.len())];
            params = psi(&current, mv, &params).unwrap();
            current = apply_move(&current, mv).unwrap();
        }
        assert_eq!(transport(&current, &start, &params).unwrap(), x);
    }
}

#[test]
fn shortest_paths_on_non_reduced_words_are_recorded() {
    // Coherence is only claimed for reduced words; count disagreements here without asserting.
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let d = a(3);
    let (mut compared, mut disagreements) = (0, 0);
    for letters in words_of_length(3, 5) {
        if is_reduced(&d, &letters).unwrap() {
            continue;
        }
        let w = Word::new(&d, letters.clone()).unwrap();
        for target in move_class(&d, &letters) {
            let t = Word::new(&d, target).unwrap();
            let paths = all_shortest_paths(&w, &t, MOVE_SEARCH_LIMIT, 64).unwrap();
            let x = ParamVector((0..5).map(|_| rng.gen_range(0..5)).collect());
            let first = transport_along(&w, &paths[0], &x).unwrap();
            compared += 1;
            if paths[1..].iter().any(|p| transport_along(&w, p, &x).unwrap() != first) {
                disagreements += 1;
            }
        }
    }
    println!("non-reduced A3 words of length 5: {disagreements} disagreements in {compared} comparisons");
    assert!(compared > 0);
}

proptest! {
    #[test]
    fn prec_is_a_strict_partial_order(x in proptest::collection::vec(0u64..3, 4), y in proptest::collection::vec(0u64..3, 4), z in proptest::collection::vec(0u64..3, 4)) {
        let (x, y, z) = (ParamVector(x), ParamVector(y), ParamVector(z));
        prop_assert_ne!(prec(&x, &x).unwrap(), PrecOrder::Less);
        let xy = prec(&x, &y).unwrap();
        let yx = prec(&y, &x).unwrap();
        prop_assert_eq!(xy == PrecOrder::Less, yx == PrecOrder::Greater);
        if xy == PrecOrder::Less && prec(&y, &z).unwrap() == PrecOrder::Less {
            prop_assert_eq!(prec(&x, &z).unwrap(), PrecOrder::Less);
        }
    }

    #[test]
    fn psi_is_an_involution(x in proptest::collection::vec(0u64..20, 3), y in proptest::collection::vec(0u64..20, 2)) {
        let w = word(2, &[1, 2, 1]);
        let x = ParamVector(x);
        let there = psi(&w, Move::three(1), &x).unwrap();
        let back = psi(&apply_move(&w, Move::three(1)).unwrap(), Move::three(1), &there).unwrap();
        prop_assert_eq!(back, x.clone());
        prop_assert_eq!(there.0.iter().sum::<u64>() >= x.0.iter().max().copied().unwrap_or(0), true);
        let c = word(3, &[1, 3]);
        let y = ParamVector(y);
        let swapped = psi(&c, Move::two(0), &y).unwrap();
        prop_assert_eq!(psi(&apply_move(&c, Move::two(0)).unwrap(), Move::two(0), &swapped).unwrap(), y);
    }
}
