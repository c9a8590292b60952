//! Special-fiber components against generators written out directly from
//! the closed-form equations for each parity case.
//!
//! The oracle uses the paired index `d + 1 − a` wherever it names a
//! variable of the chart. The one exception is the even/odd case, where the
//! middle column `n + 1` is paired with itself.

use std::sync::Arc;

use orthochart::arith::{Field, PrimeField, Rationals};
use orthochart::groebner::GbOptions;
use orthochart::ideal::Ideal;
use orthochart::local_model::{local_model, var_name, LocalModel, Parity};
use orthochart::poly::{PolyRing, Polynomial};

struct Oracle<F: Field> {
    ring: Arc<PolyRing<F>>,
    d: usize,
    rows: Vec<usize>,
    cols: Vec<usize>,
    half: F::Elem,
}

impl<F: Field> Oracle<F> {
    fn new(model: &LocalModel<F>, rows: Vec<usize>) -> Self {
        let ring = model.fiber_ring().clone();
        let d = model.chart().d;
        let cols = (1..=d).filter(|c| !rows.contains(c)).collect();
        let field = ring.field().clone();
        let half = field.inv(&field.from_i64(2)).expect("odd characteristic");
        Oracle { ring, d, rows, cols, half }
    }

    fn x(&self, i: usize, j: usize) -> Polynomial<F> {
        self.ring.var(&var_name(i, j)).unwrap_or_else(|_| panic!("x[{i}][{j}] is not a chart variable"))
    }

    fn p(&self, a: usize) -> usize {
        self.d + 1 - a
    }

    /// Column partner: `d + 1 − t`, or `t` itself when that leaves the
    /// column set.
    fn pc(&self, t: usize) -> usize {
        if self.cols.contains(&self.p(t)) {
            self.p(t)
        } else {
            t
        }
    }

    fn prod(&self, a: (usize, usize), b: (usize, usize)) -> Polynomial<F> {
        &self.x(a.0, a.1) * &self.x(b.0, b.1)
    }

    fn half_prod(&self, a: (usize, usize), b: (usize, usize)) -> Polynomial<F> {
        self.prod(a, b).scale(&self.half)
    }

    fn sum(&self, terms: impl IntoIterator<Item = Polynomial<F>>) -> Polynomial<F> {
        terms.into_iter().fold(self.ring.zero(), |acc, t| &acc + &t)
    }

    fn minors(&self) -> Vec<Polynomial<F>> {
        let mut out = Vec::new();
        for (k, &i) in self.rows.iter().enumerate() {
            for &t in &self.rows[k + 1..] {
                for (m, &j) in self.cols.iter().enumerate() {
                    for &s in &self.cols[m + 1..] {
                        out.push(&self.prod((i, j), (t, s)) - &self.prod((i, s), (t, j)));
                    }
                }
            }
        }
        out
    }

    fn ideal(&self, mut gens: Vec<Polynomial<F>>, minors: bool) -> Ideal<F> {
        if minors {
            gens.extend(self.minors());
        }
        Ideal::new(&self.ring, gens).expect("fiber ring")
    }

    fn row(&self, i: usize) -> Ideal<F> {
        self.ideal(self.cols.iter().map(|&j| self.x(i, j)).collect(), false)
    }

    fn col(&self, j: usize) -> Ideal<F> {
        self.ideal(self.rows.iter().map(|&i| self.x(i, j)).collect(), false)
    }
}

/// Closed-form components for a chart, in label order.
fn oracle_components<F: Field>(model: &LocalModel<F>) -> Vec<Ideal<F>> {
    let chart = model.chart();
    let (d, l) = (chart.d, chart.l);
    match chart.parity {
        Parity::EE => {
            let (n, r) = (d / 2, l / 2);
            let o = Oracle::new(model, (n - r + 1..=n + r).collect());
            if r == 1 {
                let (v, w) = (n, n + 1);
                let pairs = |a: usize, b: usize| o.sum((1..n).map(|i| o.prod((a, i), (b, o.p(i)))));
                vec![o.row(v), o.row(w), o.ideal(vec![pairs(v, v), pairs(w, w), pairs(v, w)], true)]
            } else if r == n - 1 {
                let upper = n - r + 1..=n;
                let pairs = |j: usize, s: usize| o.sum(upper.clone().map(|a| o.prod((a, j), (o.p(a), s))));
                vec![o.col(1), o.col(d), o.ideal(vec![pairs(1, 1), pairs(d, d), pairs(1, d)], true)]
            } else {
                let i1 = o.cols.iter().flat_map(|&t| o.cols.iter().map(move |&s| (t, s))).map(|(t, s)| {
                    o.sum((n - r + 1..=n).map(|a| o.prod((o.p(a), o.p(t)), (a, s))))
                });
                let i2 = o.rows.iter().flat_map(|&i| o.rows.iter().map(move |&j| (i, j))).map(|(i, j)| {
                    o.sum((1..=n - r).map(|a| o.prod((i, a), (o.p(j), o.p(a)))))
                });
                vec![o.ideal(i1.collect(), true), o.ideal(i2.collect(), true)]
            }
        }
        Parity::OO => {
            let (n, r) = (d / 2, l / 2);
            let o = Oracle::new(model, (n - r + 1..=n + r + 1).collect());
            if l == d - 2 {
                let pairs = |j: usize, s: usize| {
                    &o.sum((n - r + 1..=n).map(|a| o.prod((a, j), (o.p(a), s)))) + &o.half_prod((n + 1, j), (n + 1, s))
                };
                vec![o.col(1), o.col(d), o.ideal(vec![pairs(1, 1), pairs(d, d), pairs(1, d)], true)]
            } else {
                let i1 = o.cols.iter().flat_map(|&t| o.cols.iter().map(move |&s| (t, s))).map(|(t, s)| {
                    &o.sum((n - r + 1..=n).map(|a| o.prod((o.p(a), o.p(t)), (a, s))))
                        + &o.half_prod((n + 1, o.p(t)), (n + 1, s))
                });
                let i2 = o.rows.iter().flat_map(|&i| o.rows.iter().map(move |&j| (i, j))).map(|(i, j)| {
                    o.sum((1..=n - r).map(|a| o.prod((i, a), (o.p(j), o.p(a)))))
                });
                vec![o.ideal(i1.collect(), true), o.ideal(i2.collect(), true)]
            }
        }
        Parity::OE => {
            let (n, r) = (d / 2, l / 2);
            let rows: Vec<usize> = (n - r + 1..=n).chain(n + 2..=n + r + 1).collect();
            let o = Oracle::new(model, rows);
            let m = n + 1;
            if r == 1 {
                let pairs = |a: usize, b: usize| {
                    &o.sum((1..n).map(|i| o.prod((a, i), (b, o.p(i))))) + &o.half_prod((a, m), (b, m))
                };
                vec![o.row(n), o.row(n + 2), o.ideal(vec![pairs(n, n), pairs(n + 2, n + 2), pairs(n, n + 2)], true)]
            } else {
                let upper = n - r + 1..=n;
                let mut i1: Vec<_> = o
                    .cols
                    .iter()
                    .flat_map(|&t| o.cols.iter().map(move |&s| (t, s)))
                    .map(|(t, s)| o.sum(upper.clone().map(|a| o.prod((o.p(a), o.p(t)), (a, s)))))
                    .collect();
                i1.extend(o.cols.iter().map(|&j| o.sum(upper.clone().map(|a| o.prod((o.p(a), m), (a, j))))));
                let i2 = o.rows.iter().flat_map(|&i| o.rows.iter().map(move |&j| (i, j))).map(|(i, j)| {
                    &o.sum((1..=n - r).map(|a| o.prod((i, a), (o.p(j), o.p(a))))) + &o.half_prod((i, m), (o.p(j), m))
                });
                vec![o.ideal(i1, true), o.ideal(i2.collect(), true)]
            }
        }
        Parity::EO => {
            let (n, r) = (d / 2, l / 2);
            let rows: Vec<usize> = (n - r..=n).chain(n + 2..=n + r + 1).collect();
            let o = Oracle::new(model, rows);
            let m = n + 1;
            let upper = n - r..n;
            let mut i1: Vec<_> = o
                .cols
                .iter()
                .map(|&j| &o.sum(upper.clone().map(|a| o.prod((o.p(a), m), (a, j)))) + &o.half_prod((n, m), (n, j)))
                .collect();
            i1.extend(o.cols.iter().flat_map(|&t| o.cols.iter().map(move |&s| (t, s))).map(|(t, s)| {
                &o.sum(upper.clone().map(|a| o.prod((o.p(a), o.pc(t)), (a, s)))) + &o.half_prod((n, o.pc(t)), (n, s))
            }));
            let lower = 1..n - r;
            let mut i2: Vec<_> = o
                .rows
                .iter()
                .map(|&i| &o.sum(lower.clone().map(|a| o.prod((i, a), (n, o.p(a))))) + &o.half_prod((i, m), (n, m)))
                .collect();
            i2.extend(o.rows.iter().flat_map(|&i| o.rows.iter().filter(|&&j| j != n).map(move |&j| (i, j))).map(
                |(i, j)| {
                    &o.sum(lower.clone().map(|a| o.prod((i, a), (o.p(j), o.p(a))))) + &o.half_prod((i, m), (o.p(j), m))
                },
            ));
            vec![o.ideal(i1, true), o.ideal(i2, true)]
        }
    }
}

fn assert_matches_oracle<F: Field>(d: usize, l: usize, field: F) {
    let model = local_model(d, l, field).expect("valid chart");
    let expected = oracle_components(&model);
    let actual = model.components();
    assert_eq!(actual.len(), expected.len(), "({d},{l}) component count");
    let opts = GbOptions::default();
    for (k, (comp, want)) in actual.iter().zip(&expected).enumerate() {
        assert_eq!(comp.label, format!("I{}", k + 1));
        let witness = comp.ideal.equality_witness(want, &opts).expect("groebner");
        assert!(witness.is_none(), "({d},{l}) {}: {witness:?}", comp.label);
    }
}

fn fp() -> PrimeField {
    PrimeField::new(32003).unwrap()
}

#[test]
fn even_even_single_row_pair() {
    assert_matches_oracle(6, 2, fp());
    assert_matches_oracle(8, 2, fp());
}

#[test]
fn even_even_single_column_pair() {
    assert_matches_oracle(6, 4, fp());
    assert_matches_oracle(8, 6, fp());
}

#[test]
fn even_even_generic() {
    assert_matches_oracle(8, 4, fp());
}

#[test]
fn odd_odd_generic() {
    assert_matches_oracle(7, 3, fp());
    assert_matches_oracle(9, 3, fp());
}

#[test]
fn odd_odd_single_column_pair() {
    assert_matches_oracle(5, 3, fp());
    assert_matches_oracle(7, 5, fp());
}

#[test]
fn odd_even_generic() {
    assert_matches_oracle(7, 4, fp());
}

#[test]
fn odd_even_single_row_pair() {
    assert_matches_oracle(5, 2, fp());
    assert_matches_oracle(7, 2, fp());
}

#[test]
fn even_odd_always_two() {
    assert_matches_oracle(6, 3, fp());
    assert_matches_oracle(8, 3, fp());
    assert_matches_oracle(8, 5, fp());
}

#[test]
fn rational_components_match() {
    assert_matches_oracle(6, 2, Rationals);
    assert_matches_oracle(5, 2, Rationals);
}

#[test]
fn oracle_rows_agree_with_chart() {
    for (d, l, rows) in [
        (6, 2, vec![3, 4]),
        (8, 4, vec![3, 4, 5, 6]),
        (5, 3, vec![2, 3, 4]),
        (5, 2, vec![2, 4]),
        (7, 4, vec![2, 3, 5, 6]),
        (6, 3, vec![2, 3, 5]),
        (8, 5, vec![2, 3, 4, 6, 7]),
    ] {
        let model = local_model(d, l, fp()).unwrap();
        assert_eq!(model.chart().z(), rows.as_slice(), "({d},{l})");
    }
}
