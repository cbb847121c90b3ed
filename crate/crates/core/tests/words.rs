use std::sync::Arc;

use braidseed::rootdata::{all_elements, DynkinData, Series, WeylElement};
use braidseed::words::{
    all_reduced_spellings, all_spellings, leftmost_for_element, leftmost_subexpression, DotWord,
    IntervalSide, Subexpression, Word,
};
use braidseed::Error;

fn a(n: usize) -> Arc<DynkinData> {
    DynkinData::new(Series::A, n).unwrap()
}

fn example_word() -> Word {
    Word::new(&a(3), vec![3, 2, 1, 2, 3, 1, 3, 2]).unwrap()
}

fn one_based(v: &[usize]) -> Vec<usize> {
    v.iter().map(|p| p + 1).collect()
}

fn support(v: &[u64]) -> Vec<usize> {
    v.iter().enumerate().filter(|(_, &x)| x != 0).map(|(i, _)| i + 1).collect()
}

/// Every word of length `len` over `1..=rank`.
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

#[test]
fn occurrence_indexing() {
    let w = example_word();
    assert_eq!(w.occurrence(7).unwrap(), (2, 3));
    assert_eq!(w.position(3, 2).unwrap(), 4);
    assert_eq!(w.occurrence(4).unwrap(), (3, 2));
    let single = Word::new(&a(3), vec![2]).unwrap();
    assert_eq!(single.occurrence(0).unwrap(), (2, 1));
    assert!(w.occurrence(8).is_err());
    assert!(w.position(1, 3).is_err());
    for k in 0..w.len() {
        let (c, n) = w.occurrence(k).unwrap();
        assert_eq!(w.position(c, n).unwrap(), k);
    }
}

#[test]
fn neighbours_in_example() {
    let w = example_word();
    // 1-based: 5^+ = 7, 5^- = 1, 5(2)^+ = 8, 5(2)^- = 4.
    assert_eq!(w.next_same(4), Some(6));
    assert_eq!(w.prev_same(4), Some(0));
    assert_eq!(w.next_of_color(4, 2), Some(7));
    assert_eq!(w.prev_of_color(4, 2), Some(3));
    let single = Word::new(&a(3), vec![1, 2, 3]).unwrap();
    assert_eq!(single.next_same(1), None);
    assert_eq!(single.prev_same(1), None);
    assert_eq!(w.last_same(0), 6);
    assert_eq!(w.first_same(6), 0);
}

#[test]
fn leftmost_subexpression_of_example() {
    let w = example_word();
    let sub = leftmost_subexpression(&w, &[3, 2, 3, 1, 2]).unwrap();
    assert_eq!(one_based(&sub.positions), vec![1, 2, 5, 6, 8]);
    assert_eq!(sub.a, vec![1, 1, 2, 1, 2]);
    assert_eq!(sub.b, vec![0, 0, 0, 1, 1]);
    assert_eq!(sub.alpha[5], vec![1, 2, 2]);
    let empty = leftmost_subexpression(&w, &[]).unwrap();
    assert!(empty.positions.is_empty());
    assert!(empty.alpha.iter().all(|row| row.iter().all(|&x| x == 0)));
}

#[test]
fn demazure_of_example_is_longest() {
    let w = example_word();
    assert_eq!(w.demazure().0, WeylElement::longest(w.dynkin()));
}

#[test]
fn unspellable_and_unreduced_patterns() {
    let w = Word::new(&a(3), vec![3, 1]).unwrap();
    match leftmost_subexpression(&w, &[1, 3]) {
        Err(Error::NotSpellable { demazure, .. }) => assert_eq!(demazure.len(), 2),
        other => panic!("unexpected {other:?}"),
    }
    assert!(matches!(leftmost_subexpression(&w, &[1, 1]), Err(Error::NotReduced { .. })));
}

#[test]
fn leftmost_for_element_handles_commuting_letters() {
    let w = Word::new(&a(3), vec![3, 1]).unwrap();
    let v = WeylElement::from_word(w.dynkin(), &[1, 3]).unwrap();
    let sub = leftmost_for_element(&w, &v).unwrap();
    assert_eq!(sub.positions, vec![0, 1]);
    assert_eq!(sub.v_word, vec![3, 1]);
}

#[test]
fn leftmost_for_element_is_lexicographic_minimum() {
    let d = a(3);
    for len in 0..=6 {
        for letters in words_of_length(3, len) {
            let w = Word::new(&d, letters).unwrap();
            for v in w.demazure().0.lower_interval() {
                let all = all_reduced_spellings(&w, &v);
                let sub = leftmost_for_element(&w, &v).unwrap();
                assert_eq!(&sub.positions, &all[0], "{:?} {:?}", w.letters(), v);
            }
        }
    }
}

#[test]
fn fixed_pattern_match_differs_from_global_minimum() {
    let w = example_word();
    let v = WeylElement::from_word(w.dynkin(), &[3, 2, 3, 1, 2]).unwrap();
    let global = leftmost_for_element(&w, &v).unwrap();
    assert_eq!(one_based(&global.positions), vec![1, 2, 3, 5, 8]);
    let fixed = leftmost_subexpression(&w, &[3, 2, 3, 1, 2]).unwrap();
    assert!(global.positions < fixed.positions);
    // (1,2,6,7,8) spells another reduced word of v and is lexicographically larger.
    let spellings = all_reduced_spellings(&w, &v);
    assert!(spellings.contains(&vec![0, 1, 5, 6, 7]));
    assert!(spellings.contains(&fixed.positions));
}

#[test]
fn subexpression_invariants_over_a3_words() {
    let d = a(3);
    for len in 0..=8 {
        for letters in words_of_length(3, len) {
            let w = Word::new(&d, letters).unwrap();
            for v in w.demazure().0.lower_interval() {
                let sub = leftmost_for_element(&w, &v).unwrap();
                assert_eq!(sub.len(), v.length());
                assert_eq!(WeylElement::from_word(&d, &sub.v_word).unwrap(), v);
                for (k, &p) in sub.positions.iter().enumerate() {
                    let (color, n) = w.occurrence(p).unwrap();
                    assert!(sub.a[k] >= 1);
                    assert_eq!(sub.a[k] + sub.b[k], n);
                    assert!(n <= w.count(color));
                }
                for j in 1..=3 {
                    let expected = sub.v_word.iter().filter(|&&c| c == j).count();
                    assert_eq!(sub.alpha(sub.len(), j), expected);
                }
            }
        }
    }
}

#[test]
fn greedy_match_is_minimal() {
    let d = a(3);
    for len in 0..=7 {
        for letters in words_of_length(3, len) {
            let w = Word::new(&d, letters).unwrap();
            for v in w.demazure().0.lower_interval() {
                let pattern = v.reduced_word();
                let Ok(sub) = leftmost_subexpression(&w, &pattern) else {
                    assert!(all_spellings(&w, &pattern).is_empty());
                    continue;
                };
                let all = all_spellings(&w, &pattern);
                assert_eq!(all.iter().min(), Some(&sub.positions));
                // Every spelling is pointwise at or after the greedy one.
                for s in &all {
                    assert!(s.iter().zip(&sub.positions).all(|(x, y)| x >= y));
                }
            }
        }
    }
}

#[test]
fn dot_word_extension() {
    let d3 = a(3);
    let w0 = d3.w0_word().to_vec();
    assert_eq!(DotWord::extend_to_w0(&d3, &w0).unwrap().base(), &w0[..]);
    let d2 = a(2);
    let base = DotWord::extend_to_w0(&d2, &[]).unwrap();
    assert_eq!(base.base(), WeylElement::longest(&d2).reduced_word().as_slice());
    let ex = DotWord::extend_to_w0(&d3, &[3, 2, 3, 1, 2]).unwrap();
    assert_eq!(ex.base().len(), 6);
    assert_eq!(&ex.base()[..5], &[3, 2, 3, 1, 2]);
    assert_eq!(WeylElement::from_word(&d3, ex.base()).unwrap(), WeylElement::longest(&d3));
}

#[test]
fn dot_word_windows() {
    let d3 = a(3);
    let dot = DotWord::extend_to_w0(&d3, &[3, 2, 3, 1, 2]).unwrap();
    let base = dot.base().to_vec();
    assert_eq!(dot.window(6), base);
    let twice = dot.window(12);
    let starred: Vec<usize> = base.iter().map(|&c| 4 - c).collect();
    assert_eq!(&twice[6..], &starred[..]);
    let w0 = WeylElement::longest(&d3);
    let long = dot.window(30);
    for block in long.chunks(6) {
        assert_eq!(WeylElement::from_word(&d3, block).unwrap(), w0);
    }
    let d1 = a(1);
    assert_eq!(DotWord::extend_to_w0(&d1, &[]).unwrap().window(3), vec![1, 1, 1]);
}

#[test]
fn interval_vectors() {
    let w = example_word();
    assert_eq!(support(&w.interval_vector(0, 4, IntervalSide::Right).unwrap()), vec![1, 5]);
    assert_eq!(support(&w.interval_vector(3, 3, IntervalSide::Left).unwrap()), vec![4]);
    assert_eq!(support(&w.interval_vector(0, 7, IntervalSide::Left).unwrap()), vec![1, 5, 7]);
    assert_eq!(support(&w.d_vector(7).unwrap()), vec![2, 4, 8]);
    for k in 0..w.len() {
        let (_, n) = w.occurrence(k).unwrap();
        assert_eq!(support(&w.d_vector(k).unwrap()).len(), n);
    }
    assert!(w.interval_vector(0, 8, IntervalSide::Right).is_err());
}

#[test]
fn subexpression_serializes_one_based() {
    let w = example_word();
    let sub = leftmost_subexpression(&w, &[3, 2, 3, 1, 2]).unwrap();
    let json = serde_json::to_value(&sub).unwrap();
    assert_eq!(json["positions"], serde_json::json!([1, 2, 5, 6, 8]));
    let word_json = serde_json::to_string(&w).unwrap();
    assert_eq!(word_json, r#"{"dynkin":{"series":"A","rank":3},"letters":[3,2,1,2,3,1,3,2]}"#);
    let again = Subexpression::from_positions(&w, sub.positions.clone()).unwrap();
    assert_eq!(again, sub);
}

#[test]
fn all_elements_of_a2() {
    assert_eq!(all_elements(&a(2), 10).unwrap().len(), 6);
    assert!(all_elements(&a(4), 10).is_err());
}
