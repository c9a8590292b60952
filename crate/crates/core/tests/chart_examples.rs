//! Worked chart examples: Gram forms, generator families, the reduced ring,
//! the substitution map and special-fiber invariants.

use orthochart::arith::{Field, PrimeField, Rationals};
use orthochart::groebner::GbOptions;
use orthochart::ideal::{pure_power_free, Ideal};
use orthochart::local_model::{local_model, Chart, Fiber, LocalModel};

fn model(d: usize, l: usize) -> LocalModel<Rationals> {
    local_model(d, l, Rationals).unwrap()
}

fn opts() -> GbOptions {
    GbOptions::default()
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Entry `(i, j)` of `G0 + πG1` as `"0"`, `"1"` or `"pi"`, 1-based.
fn gram_entry(c: &Chart, i: usize, j: usize) -> &'static str {
    let g = c.gram_matrices();
    match (g.g0[i - 1][j - 1], g.g1[i - 1][j - 1]) {
        (0, 0) => "0",
        (1, 0) => "1",
        (0, 1) => "pi",
        other => panic!("unexpected Gram entry {other:?}"),
    }
}

fn antidiagonal(d: usize, l: usize) -> Vec<&'static str> {
    let c = Chart::new(d, l).unwrap();
    (1..=d).map(|i| gram_entry(&c, i, d + 1 - i)).collect()
}

#[test]
fn gram_antidiagonals() {
    assert_eq!(antidiagonal(6, 2), ["1", "1", "pi", "pi", "1", "1"]);
    assert_eq!(antidiagonal(5, 3), ["1", "pi", "pi", "pi", "1"]);
    let c = Chart::new(6, 3).unwrap();
    assert_eq!((gram_entry(&c, 1, 6), gram_entry(&c, 6, 1)), ("1", "1"));
    assert_eq!((gram_entry(&c, 2, 5), gram_entry(&c, 5, 2)), ("pi", "pi"));
    assert_eq!((gram_entry(&c, 3, 3), gram_entry(&c, 4, 4)), ("pi", "1"));
    assert_eq!((gram_entry(&c, 3, 4), gram_entry(&c, 4, 3)), ("0", "0"));
}

#[test]
fn naive_generators_vanish_at_the_origin() {
    for (d, l) in [(6, 2), (5, 3), (6, 3), (5, 2)] {
        let m = model(d, l);
        for g in m.naive_generators() {
            assert_eq!(g.constant_term(), Rationals.from_i64(0), "({d},{l}) {g}");
        }
    }
}

#[test]
fn additional_generators_for_six_two() {
    let m = model(6, 2);
    let ring = m.full_ring();
    assert_eq!(m.trace_a_generator(), ring.parse("x[3][3] + x[4][4] + 2*pi").unwrap());
    let additional = m.additional_ideal();
    let entry = ring.parse("x[3][5]*x[3][2] + x[3][6]*x[3][1] - x[3][4]").unwrap();
    assert!(additional.contains(&entry, &opts()).unwrap());
    let entry = ring.parse("x[3][5]*x[4][2] + x[3][6]*x[4][1] - x[3][3]").unwrap();
    assert!(additional.contains(&entry, &opts()).unwrap());
}

#[test]
fn intermediate_ideal_equals_full_ideal() {
    let m = local_model(6, 2, PrimeField::new(32003).unwrap()).unwrap();
    assert_eq!(m.all_minors().len(), 225);
    assert_eq!(m.a_relation_generators().len(), 4);
    assert_eq!(m.s1_generators().len(), 36);
    let intermediate = m.intermediate_ideal().unwrap();
    let full = m.full_ideal();
    assert!(full.contains_ideal(&intermediate, &opts()).unwrap());
    assert!(intermediate.equals(&full, &opts()).unwrap());
}

#[test]
fn reduced_counts_for_same_parity() {
    for (d, l) in [(6, 2), (6, 4), (8, 4), (5, 3), (7, 3)] {
        let m = model(d, l);
        assert_eq!(m.fiber_ring().nvars(), l * (d - l), "({d},{l})");
        assert_eq!(m.reduced_ring().nvars(), l * (d - l) + 1, "({d},{l})");
        assert_eq!(m.reduced_minors().len(), binomial(l, 2) * binomial(d - l, 2), "({d},{l})");
    }
    let m = model(6, 2);
    assert_eq!(m.reduced_ideal().len(), 7);
    let t = m.reduced_ring().parse("x[3][1]*x[4][6] + x[3][2]*x[4][5] + pi").unwrap();
    assert!(m.reduced_ideal().gens().contains(&t));
}

#[test]
fn substitution_of_the_a_block() {
    let m = model(6, 2);
    let map = m.substitution_map();
    let ring = m.reduced_ring();
    assert_eq!(map["x[3][3]"], ring.parse("x[3][5]*x[4][2] + x[3][6]*x[4][1]").unwrap());
    assert_eq!(map["x[3][4]"], ring.parse("x[3][5]*x[3][2] + x[3][6]*x[3][1]").unwrap());
}

#[test]
fn first_component_of_six_two() {
    let m = model(6, 2);
    let expected = Ideal::parse(m.fiber_ring(), &["x[3][1]", "x[3][2]", "x[3][5]", "x[3][6]"]).unwrap();
    assert!(m.components()[0].ideal.equals(&expected, &opts()).unwrap());
}

#[test]
fn pi_vanishes_on_the_special_fiber() {
    let m = model(6, 2);
    let pi = Ideal::parse(m.reduced_ring(), &["pi"]).unwrap();
    let special = m.specialize(&pi, &Fiber::Special).unwrap();
    assert!(special.gens().iter().all(|g| g.is_zero()));
}

#[test]
fn special_fiber_has_dimension_d_minus_two() {
    assert_eq!(model(6, 2).special_fiber_ideal().krull_dimension(&opts()).unwrap(), 4);
}

#[test]
fn third_component_has_no_pure_power_of_w1() {
    let m = model(6, 2);
    let i3 = &m.components()[2].ideal;
    let gb = i3.groebner(&opts()).unwrap();
    let w1 = m.fiber_ring().vars().index_of("x[4][1]").unwrap();
    assert!(pure_power_free(&gb, w1));
}

#[test]
fn pi_is_regular_over_the_rationals() {
    let m = model(6, 2);
    let pi = m.reduced_ring().var("pi").unwrap();
    assert!(m.reduced_ideal().is_regular_element(&pi, &opts()).unwrap());
}
