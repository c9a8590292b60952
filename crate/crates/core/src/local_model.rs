//! Chart data and ideals of the orthogonal local model `U_{d,l}` around
//! the worst point.
//!
//! The chart is the `d × d` matrix `X = (x[i][j])` over `O = k[pi]`. The
//! symmetric form is `G0 + pi*G1`; `G1` pairs the rows of the index set `R`
//! (called `Z` for the reduced ring) by an involution `σ`, and `G0` pairs
//! the complementary index set `C` by an involution `τ`. Self-paired
//! indices sit on the diagonal. Every ideal below is written through these
//! pairings, so one code path serves all four parity cases:
//!
//! * the B variables are `x[i][j]` with `i ∈ R`, `j ∈ C`;
//! * the A variables are `x[i][j]` with `i, j ∈ R`;
//! * the remaining variables (rows in `C`) are eliminated by the
//!   substitution map.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::arith::{Field, Rational};
use crate::ideal::Ideal;
use crate::poly::{MonomialOrder, PolyError, PolyRing, Polynomial, VariableTable, PI};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ChartError {
    #[error("invalid chart (d, l) = ({d}, {l}): need d >= 5 and 1 < l < d - 1")]
    InvalidChart { d: usize, l: usize },
    #[error("{0} is only defined for charts where d and l have the same parity")]
    NotApplicable(&'static str),
    #[error("generic fiber needs a nonzero value for pi")]
    InvalidUnit,
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// Parity of `d`, then of `l`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Parity {
    EE,
    OO,
    EO,
    OE,
}

impl Parity {
    pub fn same(self) -> bool {
        matches!(self, Parity::EE | Parity::OO)
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

/// Which fiber over `O` an ideal is taken in.
#[derive(Debug, Clone, PartialEq)]
pub enum Fiber {
    /// Over `k[pi]`, with `pi` kept as a variable.
    Arithmetic,
    /// `pi ↦ 0`.
    Special,
    /// `pi ↦ c` for a nonzero constant `c`.
    Generic(Rational),
}

impl Fiber {
    pub fn name(&self) -> String {
        match self {
            Fiber::Arithmetic => "arithmetic".into(),
            Fiber::Special => "special".into(),
            Fiber::Generic(c) => format!("generic({c})"),
        }
    }
}

/// The pair `(G0, G1)` of 0/1 matrices, 0-indexed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GramPair {
    pub g0: Vec<Vec<u8>>,
    pub g1: Vec<Vec<u8>>,
}

/// Block data of one chart. All indices are 1-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chart {
    pub d: usize,
    pub l: usize,
    pub n: usize,
    pub r: usize,
    pub r_prime: usize,
    pub parity: Parity,
    rows: Vec<usize>,
    cols: Vec<usize>,
    sigma: Vec<usize>,
    tau: Vec<usize>,
    gram: GramPair,
}

impl Chart {
    pub fn new(d: usize, l: usize) -> Result<Chart, ChartError> {
        if d < 5 || l < 2 || l + 2 > d {
            return Err(ChartError::InvalidChart { d, l });
        }
        let n = d / 2;
        let r = l / 2;
        let parity = match (d % 2, l % 2) {
            (0, 0) => Parity::EE,
            (1, 1) => Parity::OO,
            (0, 1) => Parity::EO,
            _ => Parity::OE,
        };
        let r_prime = if l % 2 == 0 { r } else { r + 1 };
        let mut g0 = vec![vec![0u8; d]; d];
        let mut g1 = vec![vec![0u8; d]; d];
        let anti = |i: usize| d + 1 - i;
        let rows: Vec<usize> = match parity {
            Parity::EE | Parity::OO => (n - r + 1..=n - r + l).collect(),
            Parity::OE => (n - r + 1..=n + r + 1).filter(|&i| i != n + 1).collect(),
            Parity::EO => (n - r..=n + r + 1).filter(|&i| i != n + 1).collect(),
        };
        for i in 1..=d {
            if parity == Parity::EO && (i == n || i == n + 1) {
                continue;
            }
            if rows.contains(&i) {
                g1[i - 1][anti(i) - 1] = 1;
            } else {
                g0[i - 1][anti(i) - 1] = 1;
            }
        }
        if parity == Parity::EO {
            g1[n - 1][n - 1] = 1;
            g0[n][n] = 1;
        }
        let cols: Vec<usize> = (1..=d).filter(|i| !rows.contains(i)).collect();
        let partner = |m: &Vec<Vec<u8>>, i: usize| (1..=d).find(|&j| m[i - 1][j - 1] == 1).expect("paired index");
        let mut sigma = vec![0; d + 1];
        let mut tau = vec![0; d + 1];
        for &i in &rows {
            sigma[i] = partner(&g1, i);
        }
        for &c in &cols {
            tau[c] = partner(&g0, c);
        }
        Ok(Chart { d, l, n, r, r_prime, parity, rows, cols, sigma, tau, gram: GramPair { g0, g1 } })
    }

    /// Row index set of the B block (size `l`).
    pub fn z(&self) -> &[usize] {
        &self.rows
    }

    /// Column index set of the B block (size `d - l`).
    pub fn z_complement(&self) -> &[usize] {
        &self.cols
    }

    /// Partner of a row in `Z` under the `G1` pairing.
    pub fn sigma(&self, i: usize) -> usize {
        self.sigma[i]
    }

    /// Partner of an index in the complement of `Z` under the `G0` pairing.
    pub fn tau(&self, c: usize) -> usize {
        self.tau[c]
    }

    pub fn gram_matrices(&self) -> &GramPair {
        &self.gram
    }

    pub fn in_z(&self, i: usize) -> bool {
        self.rows.contains(&i)
    }

    pub fn id(&self) -> String {
        format!("({},{})", self.d, self.l)
    }

    /// Variables that stay in the reduced ring, row-major.
    pub fn b_variables(&self) -> Vec<(usize, usize)> {
        self.rows.iter().flat_map(|&i| self.cols.iter().map(move |&j| (i, j))).collect()
    }

    /// Entries of `X` in rows of `Z` and columns of `Z`.
    pub fn a_variables(&self) -> Vec<(usize, usize)> {
        self.rows.iter().flat_map(|&i| self.rows.iter().map(move |&j| (i, j))).collect()
    }

    /// Entries of `X` in rows outside `Z`.
    pub fn outer_variables(&self) -> Vec<(usize, usize)> {
        self.cols.iter().flat_map(|&i| (1..=self.d).map(move |j| (i, j))).collect()
    }

    /// Number of irreducible components of the special fiber expected from
    /// the shape of the pairings.
    pub fn expected_components(&self) -> usize {
        if self.rows_split() || self.cols_split() {
            3
        } else {
            2
        }
    }

    /// The column-form quadrics factor when `Z` is a single `σ`-pair.
    fn rows_split(&self) -> bool {
        self.rows.len() == 2 && self.rows.iter().all(|&i| self.sigma(i) != i)
    }

    /// The row-form quadrics factor when the complement is a single `τ`-pair.
    fn cols_split(&self) -> bool {
        self.cols.len() == 2 && self.cols.iter().all(|&c| self.tau(c) != c)
    }
}

pub fn var_name(i: usize, j: usize) -> String {
    format!("x[{i}][{j}]")
}

/// One irreducible component of the special fiber.
#[derive(Debug, Clone)]
pub struct Component<F: Field> {
    pub label: String,
    pub ideal: Ideal<F>,
    /// Variable used for the leading-term regularity criterion.
    pub designated: String,
}

/// Polynomial matrices, 1-indexed through accessor closures.
type Mat<F> = Vec<Vec<Polynomial<F>>>;

/// Chart ideals over a fixed coefficient field.
#[derive(Debug, Clone)]
pub struct LocalModel<F: Field> {
    chart: Chart,
    full: Arc<PolyRing<F>>,
    reduced: Arc<PolyRing<F>>,
    fiber: Arc<PolyRing<F>>,
    half: F::Elem,
}

impl<F: Field> LocalModel<F> {
    pub fn new(chart: Chart, field: F) -> Result<Self, ChartError> {
        let outer = chart.outer_variables();
        let a = chart.a_variables();
        let b = chart.b_variables();
        let names = |v: &[(usize, usize)]| v.iter().map(|&(i, j)| var_name(i, j)).collect::<Vec<_>>();
        let mut full_names = names(&outer);
        full_names.extend(names(&a));
        full_names.extend(names(&b));
        full_names.push(PI.to_string());
        let eliminated = outer.len() + a.len();
        let full = PolyRing::new(field.clone(), VariableTable::new(full_names)?, MonomialOrder::Block(eliminated));
        let mut red_names = names(&b);
        let fiber = PolyRing::new(field.clone(), VariableTable::new(red_names.clone())?, MonomialOrder::GrLex);
        red_names.push(PI.to_string());
        let reduced = PolyRing::new(field.clone(), VariableTable::new(red_names)?, MonomialOrder::GrLex);
        let half = field.from_rational(&Rational::new(1, 2).expect("nonzero"))
            .expect("characteristic is not two");
        Ok(LocalModel { chart, full, reduced, fiber, half })
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    /// Ring over all entries of `X` and `pi`: rows outside `Z` first, then
    /// the A block, then the B block, under the block order that
    /// eliminates everything but the B block and `pi`.
    pub fn full_ring(&self) -> &Arc<PolyRing<F>> {
        &self.full
    }

    /// Ring over the B variables and `pi`, graded lex, row-major.
    pub fn reduced_ring(&self) -> &Arc<PolyRing<F>> {
        &self.reduced
    }

    /// Ring over the B variables only.
    pub fn fiber_ring(&self) -> &Arc<PolyRing<F>> {
        &self.fiber
    }

    fn field(&self) -> &F {
        self.full.field()
    }

    /// `x[i][j]` in the full ring.
    pub fn x(&self, i: usize, j: usize) -> Polynomial<F> {
        self.full.var(&var_name(i, j)).expect("chart variable")
    }

    /// `x[i][j]` in the reduced ring (B variables only).
    pub fn b(&self, i: usize, j: usize) -> Polynomial<F> {
        self.reduced.var(&var_name(i, j)).expect("B variable")
    }

    fn pi(&self) -> Polynomial<F> {
        self.full.var(PI).expect("pi")
    }

    fn int(&self, n: i64) -> Polynomial<F> {
        self.full.int(n)
    }

    fn matrix_x(&self) -> Mat<F> {
        let d = self.chart.d;
        (1..=d).map(|i| (1..=d).map(|j| self.x(i, j)).collect()).collect()
    }

    fn matrix_const(&self, m: &[Vec<u8>]) -> Mat<F> {
        m.iter().map(|row| row.iter().map(|&e| self.int(e as i64)).collect()).collect()
    }

    fn mat_mul(a: &Mat<F>, b: &Mat<F>) -> Mat<F> {
        let n = a.len();
        let k = b.len();
        let m = b[0].len();
        (0..n)
            .map(|i| {
                (0..m)
                    .map(|j| {
                        let mut acc = a[0][0].ring().zero();
                        for t in 0..k {
                            if !a[i][t].is_zero() && !b[t][j].is_zero() {
                                acc = &acc + &(&a[i][t] * &b[t][j]);
                            }
                        }
                        acc
                    })
                    .collect()
            })
            .collect()
    }

    fn mat_add(a: &Mat<F>, b: &Mat<F>) -> Mat<F> {
        a.iter().zip(b).map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x + y).collect()).collect()
    }

    fn mat_scale(a: &Mat<F>, c: &Polynomial<F>) -> Mat<F> {
        a.iter().map(|row| row.iter().map(|x| x * c).collect()).collect()
    }

    fn transpose(a: &Mat<F>) -> Mat<F> {
        (0..a[0].len()).map(|j| a.iter().map(|row| row[j].clone()).collect()).collect()
    }

    fn entries(m: Mat<F>) -> Vec<Polynomial<F>> {
        m.into_iter().flatten().collect()
    }

    /// Drops zeros and generators that agree with an earlier one up to a
    /// nonzero scalar, keeping the first occurrence.
    fn normalize(ring: &Arc<PolyRing<F>>, gens: Vec<Polynomial<F>>) -> Ideal<F> {
        let mut seen: Vec<Polynomial<F>> = Vec::new();
        let mut kept = Vec::new();
        for g in gens {
            if g.is_zero() {
                continue;
            }
            let m = g.monic();
            if !seen.contains(&m) {
                seen.push(m);
                kept.push(g);
            }
        }
        Ideal::new(ring, kept).expect("generators live in the ring")
    }

    /// All 2×2 minors of the submatrix of `X` on the given rows and columns.
    fn minors_of(&self, rows: &[usize], cols: &[usize], entry: &dyn Fn(usize, usize) -> Polynomial<F>) -> Vec<Polynomial<F>> {
        let mut out = Vec::new();
        for (p, &i) in rows.iter().enumerate() {
            for &t in &rows[p + 1..] {
                for (q, &j) in cols.iter().enumerate() {
                    for &s in &cols[q + 1..] {
                        out.push(&(&entry(i, j) * &entry(t, s)) - &(&entry(i, s) * &entry(t, j)));
                    }
                }
            }
        }
        out
    }

    /// Entries of `X²`, `∧²X`, `XᵗG0X − 2π(G0 + πG1)X` and
    /// `XᵗG1X + 2(G0 + πG1)X`, in that order, before deduplication.
    pub fn naive_generators(&self) -> Vec<Polynomial<F>> {
        let x = self.matrix_x();
        let xt = Self::transpose(&x);
        let g0 = self.matrix_const(&self.chart.gram.g0);
        let g1 = self.matrix_const(&self.chart.gram.g1);
        let pi = self.pi();
        let form = Self::mat_add(&g0, &Self::mat_scale(&g1, &pi));
        let form_x = Self::mat_mul(&form, &x);
        let all: Vec<usize> = (1..=self.chart.d).collect();
        let mut gens = Self::entries(Self::mat_mul(&x, &x));
        gens.extend(self.minors_of(&all, &all, &|i, j| self.x(i, j)));
        let s0 = Self::mat_mul(&Self::mat_mul(&xt, &g0), &x);
        let two_pi = &self.int(2) * &pi;
        gens.extend(Self::entries(Self::mat_add(&s0, &Self::mat_scale(&form_x, &two_pi.neg()))));
        let s1 = Self::mat_mul(&Self::mat_mul(&xt, &g1), &x);
        gens.extend(Self::entries(Self::mat_add(&s1, &Self::mat_scale(&form_x, &self.int(2)))));
        gens
    }

    pub fn naive_ideal(&self) -> Ideal<F> {
        Self::normalize(&self.full, self.naive_generators())
    }

    fn trace_x(&self) -> Polynomial<F> {
        (1..=self.chart.d).fold(self.full.zero(), |acc, i| &acc + &self.x(i, i))
    }

    /// `Tr(A) + 2π` over the A block.
    fn trace_a(&self) -> Polynomial<F> {
        let t = self.chart.rows.iter().fold(self.full.zero(), |acc, &i| &acc + &self.x(i, i));
        &t + &(&self.int(2) * &self.pi())
    }

    /// `A·G1 − G1·Aᵗ` on the A block.
    fn a_symmetry(&self) -> Vec<Polynomial<F>> {
        let c = &self.chart;
        let mut out = Vec::new();
        for &i in &c.rows {
            for &k in &c.rows {
                out.push(&self.x(i, c.sigma(k)) - &self.x(k, c.sigma(i)));
            }
        }
        out
    }

    /// `M[i][k] = Σ_{c∈C, c>τc} x[i][c]·x[k][τc] + ½ Σ_{c=τc} x[i][c]·x[k][c]`
    /// in any ring carrying the B variables.
    fn m_in(&self, ring: &Arc<PolyRing<F>>, i: usize, k: usize) -> Polynomial<F> {
        let c = &self.chart;
        let v = |a: usize, b: usize| ring.var(&var_name(a, b)).expect("chart variable");
        let mut acc = ring.zero();
        for &col in &c.cols {
            let t = c.tau(col);
            if col > t {
                acc = &acc + &(&v(i, col) * &v(k, t));
            } else if col == t {
                acc = &acc + &(&v(i, col) * &v(k, col)).scale(&self.half);
            }
        }
        acc
    }

    fn m_full(&self, i: usize, k: usize) -> Polynomial<F> {
        self.m_in(&self.full, i, k)
    }

    fn m_reduced(&self, i: usize, k: usize) -> Polynomial<F> {
        self.m_in(&self.reduced, i, k)
    }

    /// Generators of `I^add`. For same parity these are `Tr X`,
    /// `Tr A + 2π`, `A J − J Aᵗ` and `B₂ J B₁ᵗ − A J`. For opposite parity
    /// the last family is `2 B₂ J B₁ᵗ + Q Qᵗ − 2 A G1` restricted to `Z × Z`.
    pub fn additional_ideal(&self) -> Ideal<F> {
        let c = &self.chart;
        let mut gens = vec![self.trace_x(), self.trace_a()];
        gens.extend(self.a_symmetry());
        for &i in &c.rows {
            for &k in &c.rows {
                let rel = &self.m_full(i, k) - &self.x(i, c.sigma(k));
                gens.push(if c.parity.same() { rel } else { &rel * &self.int(2) });
            }
        }
        Self::normalize(&self.full, gens)
    }

    /// The last family of `I^add` for opposite parity written with the
    /// block matrices `H`, `Q` and the antidiagonal `J_{l+1}` on the A block:
    /// `2 H B₂ J B₁ᵗ H + H Q Qᵗ H − 2 H A J_{l+1} H`.
    pub fn block_form_additional(&self) -> Result<Vec<Polynomial<F>>, ChartError> {
        let c = &self.chart;
        if c.parity.same() {
            return Err(ChartError::NotApplicable("the block form with H and Q"));
        }
        let n = c.n;
        let lo = n - c.r_prime + 1;
        let hi = lo + c.l;
        let reflect = |k: usize| lo + hi - k;
        let outer_low: Vec<usize> = (1..lo).collect();
        let mut gens = Vec::new();
        for &i in &c.rows {
            for &k in &c.rows {
                let mut acc = self.full.zero();
                for &a in &outer_low {
                    let high = c.d + 1 - a;
                    acc = &acc + &(&self.x(i, high) * &self.x(k, a)).scale(&self.field().from_i64(2));
                }
                acc = &acc + &(&self.x(i, n + 1) * &self.x(k, n + 1));
                acc = &acc - &self.x(i, reflect(k)).scale(&self.field().from_i64(2));
                gens.push(acc);
            }
        }
        Ok(gens)
    }

    pub fn full_ideal(&self) -> Ideal<F> {
        let mut gens = self.naive_ideal().gens().to_vec();
        gens.extend(self.additional_ideal().gens().iter().cloned());
        Self::normalize(&self.full, gens)
    }

    fn s1_relation(&self) -> Vec<Polynomial<F>> {
        let x = self.matrix_x();
        let xt = Self::transpose(&x);
        let g0 = self.matrix_const(&self.chart.gram.g0);
        let g1 = self.matrix_const(&self.chart.gram.g1);
        let form = Self::mat_add(&g0, &Self::mat_scale(&g1, &self.pi()));
        let form_x = Self::mat_mul(&form, &x);
        let s1 = Self::mat_mul(&Self::mat_mul(&xt, &g1), &x);
        Self::entries(Self::mat_add(&s1, &Self::mat_scale(&form_x, &self.int(2))))
    }

    /// Entries of `XᵗG0X − 2π(G0 + πG1)X`.
    pub fn s0_relation(&self) -> Vec<Polynomial<F>> {
        let x = self.matrix_x();
        let xt = Self::transpose(&x);
        let g0 = self.matrix_const(&self.chart.gram.g0);
        let g1 = self.matrix_const(&self.chart.gram.g1);
        let pi = self.pi();
        let form = Self::mat_add(&g0, &Self::mat_scale(&g1, &pi));
        let form_x = Self::mat_mul(&form, &x);
        let s0 = Self::mat_mul(&Self::mat_mul(&xt, &g0), &x);
        let two_pi = &self.int(2) * &pi;
        Self::entries(Self::mat_add(&s0, &Self::mat_scale(&form_x, &two_pi.neg())))
    }

    pub fn x_squared(&self) -> Vec<Polynomial<F>> {
        let x = self.matrix_x();
        Self::entries(Self::mat_mul(&x, &x))
    }

    pub fn all_minors(&self) -> Vec<Polynomial<F>> {
        let all: Vec<usize> = (1..=self.chart.d).collect();
        self.minors_of(&all, &all, &|i, j| self.x(i, j))
    }

    /// Minors of the B block, in the full ring.
    pub fn b_minors_full(&self) -> Vec<Polynomial<F>> {
        self.minors_of(&self.chart.rows, &self.chart.cols, &|i, j| self.x(i, j))
    }

    pub fn trace_generator(&self) -> Polynomial<F> {
        self.trace_x()
    }

    pub fn trace_a_generator(&self) -> Polynomial<F> {
        self.trace_a()
    }

    pub fn a_symmetry_generators(&self) -> Vec<Polynomial<F>> {
        self.a_symmetry()
    }

    /// `B₂ J B₁ᵗ − A J` entries (same parity).
    pub fn a_relation_generators(&self) -> Vec<Polynomial<F>> {
        let c = &self.chart;
        let mut out = Vec::new();
        for &i in &c.rows {
            for &k in &c.rows {
                out.push(&self.m_full(i, k) - &self.x(i, c.sigma(k)));
            }
        }
        out
    }

    pub fn s1_generators(&self) -> Vec<Polynomial<F>> {
        self.s1_relation()
    }

    /// `I' = (∧²X, Tr X, Tr A + 2π, B₂JB₁ᵗ − AJ, XᵗG1X + 2(G0 + πG1)X)`.
    pub fn intermediate_ideal(&self) -> Result<Ideal<F>, ChartError> {
        if !self.chart.parity.same() {
            return Err(ChartError::NotApplicable("the intermediate ideal"));
        }
        let mut gens = self.all_minors();
        gens.push(self.trace_x());
        gens.push(self.trace_a());
        gens.extend(self.a_relation_generators());
        gens.extend(self.s1_relation());
        Ok(Self::normalize(&self.full, gens))
    }

    /// The linear relations that express every entry in a row outside `Z`
    /// through the B and A blocks:
    /// `x[k][j] + ½ Σ_{a∈Z} x[a][τk]·x[σa][j]`.
    pub fn outer_relations(&self) -> Vec<Polynomial<F>> {
        let c = &self.chart;
        let mut out = Vec::new();
        for &k in &c.cols {
            for j in 1..=c.d {
                let mut sum = self.full.zero();
                for &a in &c.rows {
                    sum = &sum + &(&self.x(a, c.tau(k)) * &self.x(c.sigma(a), j));
                }
                out.push(&self.x(k, j) + &sum.scale(&self.half));
            }
        }
        out
    }

    /// The substitution map `φ` from the full ring to the reduced ring: the
    /// identity on B, `A[i][j] ↦ M[i][σj]` and, for rows outside `Z`,
    /// `x[k][j] ↦ −½ Σ_{a∈Z} x[a][τk]·φ(x[σa][j])`.
    pub fn substitution_map(&self) -> HashMap<String, Polynomial<F>> {
        let c = &self.chart;
        let mut map: HashMap<String, Polynomial<F>> = HashMap::new();
        for (i, j) in c.b_variables() {
            map.insert(var_name(i, j), self.b(i, j));
        }
        for (i, j) in c.a_variables() {
            map.insert(var_name(i, j), self.m_reduced(i, c.sigma(j)));
        }
        let minus_half = self.field().neg(&self.half);
        for &k in &c.cols {
            for j in 1..=c.d {
                let mut sum = self.reduced.zero();
                for &a in &c.rows {
                    let inner = &map[&var_name(c.sigma(a), j)];
                    sum = &sum + &(&self.b(a, c.tau(k)) * inner);
                }
                map.insert(var_name(k, j), sum.scale(&minus_half));
            }
        }
        map.insert(PI.to_string(), self.reduced.var(PI).expect("pi"));
        map
    }

    /// Applies `φ` to a full-ring polynomial.
    pub fn substitute(&self, f: &Polynomial<F>, map: &HashMap<String, Polynomial<F>>) -> Polynomial<F> {
        f.apply_homomorphism(&self.reduced, map).expect("map covers every variable")
    }

    /// B-block minors in the reduced ring.
    pub fn reduced_minors(&self) -> Vec<Polynomial<F>> {
        self.minors_of(&self.chart.rows, &self.chart.cols, &|i, j| self.b(i, j))
    }

    /// The half-trace quadric `t`: the sum over `σ`-pairs of rows and
    /// `τ`-pairs of columns of `x[i][c]·x[σi][τc]`, with weight ½ for a
    /// self-paired index and ¼ when both are self-paired.
    pub fn trace_quadric(&self, ring: &Arc<PolyRing<F>>) -> Polynomial<F> {
        let c = &self.chart;
        let field = ring.field();
        let quarter = field.mul(&self.half, &self.half);
        let mut acc = ring.zero();
        for &i in &c.rows {
            let si = c.sigma(i);
            if si < i {
                continue;
            }
            for &col in &c.cols {
                let tc = c.tau(col);
                if tc < col {
                    continue;
                }
                let term = &ring.var(&var_name(i, col)).expect("B variable") * &ring.var(&var_name(si, tc)).expect("B variable");
                let w = match (si == i, tc == col) {
                    (false, false) => field.one(),
                    (true, true) => quarter.clone(),
                    _ => self.half.clone(),
                };
                acc = &acc + &term.scale(&w);
            }
        }
        acc
    }

    /// `I'' = (∧²(B), t + π)` in the reduced ring.
    pub fn reduced_ideal(&self) -> Ideal<F> {
        let mut gens = self.reduced_minors();
        let pi = self.reduced.var(PI).expect("pi");
        gens.push(&self.trace_quadric(&self.reduced) + &pi);
        Self::normalize(&self.reduced, gens)
    }

    /// The trace `Tr(M·G1)` over `Z`, which equals `2t` modulo the minors.
    pub fn full_trace_quadric(&self) -> Polynomial<F> {
        let c = &self.chart;
        c.rows.iter().fold(self.reduced.zero(), |acc, &i| &acc + &self.m_reduced(i, c.sigma(i)))
    }

    /// Substitutes `pi` and moves the ideal to the fiber ring.
    pub fn specialize(&self, ideal: &Ideal<F>, fiber: &Fiber) -> Result<Ideal<F>, ChartError> {
        let value = match fiber {
            Fiber::Arithmetic => return Ok(ideal.clone()),
            Fiber::Special => self.field().zero(),
            Fiber::Generic(c) => {
                if c.is_zero() {
                    return Err(ChartError::InvalidUnit);
                }
                self.field().from_rational(c).map_err(|_| ChartError::InvalidUnit)?
            }
        };
        let out = ideal.specialize(&[(PI, value)], &self.fiber).map_err(|e| match e {
            crate::ideal::IdealError::Poly(p) => ChartError::Poly(p),
            _ => unreachable!("specialization performs no basis computation"),
        })?;
        Ok(Self::normalize(&self.fiber, out.gens().to_vec()))
    }

    /// `I_s`: the reduced ideal at `pi = 0`.
    pub fn special_fiber_ideal(&self) -> Ideal<F> {
        self.specialize(&self.reduced_ideal(), &Fiber::Special).expect("special fiber")
    }

    fn fb(&self, i: usize, j: usize) -> Polynomial<F> {
        self.fiber.var(&var_name(i, j)).expect("B variable")
    }

    fn fiber_minors(&self) -> Vec<Polynomial<F>> {
        self.minors_of(&self.chart.rows, &self.chart.cols, &|i, j| self.fb(i, j))
    }

    /// Column-form quadrics `P[t][s] = ½ Σ_{a∈Z} x[a][τt]·x[σa][s]`,
    /// written over `σ`-pairs of rows for `t, s` in the complement.
    fn column_quadrics(&self) -> Vec<Polynomial<F>> {
        let c = &self.chart;
        let mut out = Vec::new();
        for &t in &c.cols {
            for &s in &c.cols {
                let mut acc = self.fiber.zero();
                for &a in &c.rows {
                    let sa = c.sigma(a);
                    if sa > a {
                        acc = &acc + &(&self.fb(sa, c.tau(t)) * &self.fb(a, s));
                    } else if sa == a {
                        acc = &acc + &(&self.fb(a, c.tau(t)) * &self.fb(a, s)).scale(&self.half);
                    }
                }
                out.push(acc);
            }
        }
        out
    }

    /// Row-form quadrics `M[i][k]` for `i, k ∈ Z`.
    fn row_quadrics(&self) -> Vec<Polynomial<F>> {
        let c = &self.chart;
        c.rows.iter().flat_map(|&i| c.rows.iter().map(move |&k| self.m_in(&self.fiber, i, k))).collect()
    }

    fn linear_ideal(&self, vars: Vec<(usize, usize)>) -> Ideal<F> {
        Self::normalize(&self.fiber, vars.into_iter().map(|(i, j)| self.fb(i, j)).collect())
    }

    fn quadric_ideal(&self, quadrics: Vec<Polynomial<F>>) -> Ideal<F> {
        let mut gens = quadrics;
        gens.extend(self.fiber_minors());
        Self::normalize(&self.fiber, gens)
    }

    /// Irreducible components of the special fiber, in the fiber ring.
    ///
    /// Generically there are two: the column-form ideal `I1` and the
    /// row-form ideal `I2`. When `Z` is a single pair of rows the column
    /// form factors into the two row ideals, and when the complement is a
    /// single pair of columns the row form factors into the two column
    /// ideals; the surviving quadric ideal is then `I3`.
    pub fn components(&self) -> Vec<Component<F>> {
        let c = &self.chart;
        let first = |exclude_row: Option<usize>, exclude_col: Option<usize>| {
            c.b_variables()
                .into_iter()
                .find(|&(i, j)| Some(i) != exclude_row && Some(j) != exclude_col)
                .map(|(i, j)| var_name(i, j))
                .expect("some B variable survives")
        };
        let col_form = self.quadric_ideal(self.column_quadrics());
        let row_form = self.quadric_ideal(self.row_quadrics());
        if c.rows_split() {
            let (lo, hi) = (c.rows[0], c.rows[1]);
            vec![
                Component {
                    label: "I1".into(),
                    ideal: self.linear_ideal(c.cols.iter().map(|&j| (lo, j)).collect()),
                    designated: first(Some(lo), None),
                },
                Component {
                    label: "I2".into(),
                    ideal: self.linear_ideal(c.cols.iter().map(|&j| (hi, j)).collect()),
                    designated: first(Some(hi), None),
                },
                Component { label: "I3".into(), ideal: row_form, designated: var_name(hi, c.cols[0]) },
            ]
        } else if c.cols_split() {
            let (lo, hi) = (c.cols[0], c.cols[1]);
            vec![
                Component {
                    label: "I1".into(),
                    ideal: self.linear_ideal(c.rows.iter().map(|&i| (i, lo)).collect()),
                    designated: first(None, Some(lo)),
                },
                Component {
                    label: "I2".into(),
                    ideal: self.linear_ideal(c.rows.iter().map(|&i| (i, hi)).collect()),
                    designated: first(None, Some(hi)),
                },
                Component { label: "I3".into(), ideal: col_form, designated: var_name(c.rows[0], lo) },
            ]
        } else {
            let v = var_name(c.rows[0], c.cols[0]);
            vec![
                Component { label: "I1".into(), ideal: col_form, designated: v.clone() },
                Component { label: "I2".into(), ideal: row_form, designated: v },
            ]
        }
    }

    /// Chart serialization; every ideal is taken in the requested fiber,
    /// components always in the special fiber.
    pub fn chart_json(&self, fiber: &Fiber) -> Result<Value, ChartError> {
        let c = &self.chart;
        let pi_value = match fiber {
            Fiber::Arithmetic => None,
            Fiber::Special => Some(self.field().zero()),
            Fiber::Generic(v) => {
                if v.is_zero() {
                    return Err(ChartError::InvalidUnit);
                }
                Some(self.field().from_rational(v).map_err(|_| ChartError::InvalidUnit)?)
            }
        };
        let render = |ideal: &Ideal<F>| -> Vec<String> {
            let pi = ideal.ring().vars().index_of(PI);
            let mut seen = Vec::new();
            let mut out = Vec::new();
            for g in ideal.gens() {
                let h = match (&pi_value, pi) {
                    (Some(v), Some(p)) => g.substitute(&[(p, v.clone())]),
                    _ => g.clone(),
                };
                if h.is_zero() {
                    continue;
                }
                let s = h.to_string();
                if !seen.contains(&s) {
                    seen.push(s.clone());
                    out.push(s);
                }
            }
            out
        };
        let mut variables: Vec<String> = self.full.vars().names().to_vec();
        variables.sort_by_key(|name| parse_index(name));
        if pi_value.is_some() {
            variables.retain(|v| v != PI);
        }
        let intermediate = match self.intermediate_ideal() {
            Ok(i) => json!(render(&i)),
            Err(_) => Value::Null,
        };
        let components: Vec<Value> = self
            .components()
            .iter()
            .map(|comp| {
                json!({
                    "label": comp.label,
                    "designated": comp.designated,
                    "generators": render(&comp.ideal),
                })
            })
            .collect();
        Ok(json!({
            "d": c.d,
            "l": c.l,
            "case": c.parity.to_string(),
            "fiber": fiber.name(),
            "Z": c.rows,
            "Zc": c.cols,
            "variables": variables,
            "reduced_variables": self.reduced.vars().names().iter().filter(|v| pi_value.is_none() || v.as_str() != PI).collect::<Vec<_>>(),
            "ideals": {
                "naive": render(&self.naive_ideal()),
                "add": render(&self.additional_ideal()),
                "full": render(&self.full_ideal()),
                "intermediate": intermediate,
                "reduced": render(&self.reduced_ideal()),
                "components": components,
            }
        }))
    }
}

/// Sort key putting `x[i][j]` in row-major order and `pi` last.
fn parse_index(name: &str) -> (usize, usize) {
    let digits: Vec<usize> = name
        .split(|c: char| !c.is_ascii_digit())
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().expect("digits"))
        .collect();
    match digits.as_slice() {
        [i, j] => (*i, *j),
        _ => (usize::MAX, usize::MAX),
    }
}

/// Builds the chart and its ideals over `field`.
pub fn local_model<F: Field>(d: usize, l: usize, field: F) -> Result<LocalModel<F>, ChartError> {
    LocalModel::new(Chart::new(d, l)?, field)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{PrimeField, Rationals};
    use crate::groebner::GbOptions;

    fn model(d: usize, l: usize) -> LocalModel<Rationals> {
        local_model(d, l, Rationals).unwrap()
    }

    fn opts() -> GbOptions {
        GbOptions::default()
    }

    #[test]
    fn block_index_sets() {
        let c = Chart::new(6, 2).unwrap();
        assert_eq!((c.n, c.r, c.parity), (3, 1, Parity::EE));
        assert_eq!(c.z(), [3, 4]);
        assert_eq!(c.z_complement(), [1, 2, 5, 6]);
        let c = Chart::new(5, 2).unwrap();
        assert_eq!(c.parity, Parity::OE);
        assert_eq!(c.z(), [2, 4]);
        assert_eq!(c.z_complement(), [1, 3, 5]);
        assert_eq!(c.tau(3), 3);
        let c = Chart::new(5, 3).unwrap();
        assert_eq!(c.z(), [2, 3, 4]);
        assert_eq!(c.sigma(3), 3);
        let c = Chart::new(6, 3).unwrap();
        assert_eq!((c.parity, c.r_prime), (Parity::EO, 2));
        assert_eq!(c.z(), [2, 3, 5]);
        assert_eq!(c.z_complement(), [1, 4, 6]);
        assert_eq!((c.sigma(3), c.tau(4)), (3, 4));
    }

    #[test]
    fn invalid_charts_are_rejected() {
        assert_eq!(Chart::new(4, 2), Err(ChartError::InvalidChart { d: 4, l: 2 }));
        assert!(Chart::new(6, 1).is_err());
        assert!(Chart::new(6, 5).is_err());
        assert!(Chart::new(6, 4).is_ok());
    }

    /// `det(G0 + πG1)` by the Leibniz formula, as coefficients in `π`.
    fn gram_determinant(g: &GramPair) -> Vec<i64> {
        let d = g.g0.len();
        let mut total = vec![0i64; d + 1];
        let mut perm: Vec<usize> = (0..d).collect();
        fn visit(k: usize, perm: &mut Vec<usize>, g: &GramPair, total: &mut Vec<i64>) {
            let d = perm.len();
            if k == d {
                let mut poly = vec![1i64];
                for (i, &j) in perm.iter().enumerate() {
                    let (a, b) = (g.g0[i][j] as i64, g.g1[i][j] as i64);
                    let mut next = vec![0i64; poly.len() + 1];
                    for (e, c) in poly.iter().enumerate() {
                        next[e] += c * a;
                        next[e + 1] += c * b;
                    }
                    poly = next;
                }
                let inversions = (0..d).flat_map(|i| (i + 1..d).map(move |j| (i, j))).filter(|&(i, j)| perm[i] > perm[j]).count();
                let sign = if inversions % 2 == 0 { 1 } else { -1 };
                for (e, c) in poly.iter().enumerate() {
                    total[e] += sign * c;
                }
                return;
            }
            for i in k..d {
                perm.swap(k, i);
                visit(k + 1, perm, g, total);
                perm.swap(k, i);
            }
        }
        visit(0, &mut perm, g, &mut total);
        total
    }

    #[test]
    fn gram_pairs_are_symmetric_with_valuation_l() {
        for (d, l) in [(5, 2), (5, 3), (6, 2), (6, 3), (6, 4), (7, 2), (7, 3), (7, 4), (7, 5), (8, 3), (8, 4)] {
            let c = Chart::new(d, l).unwrap();
            let g = c.gram_matrices();
            for i in 0..d {
                for j in 0..d {
                    assert_eq!(g.g0[i][j], g.g0[j][i]);
                    assert_eq!(g.g1[i][j], g.g1[j][i]);
                    assert_eq!(g.g0[i][j] * g.g1[i][j], 0);
                }
            }
            let det = gram_determinant(g);
            let valuation = det.iter().position(|&c| c != 0).unwrap();
            assert_eq!(valuation, l, "({d},{l})");
            assert_eq!(det[l].abs(), 1, "({d},{l})");
            assert!(det[l + 1..].iter().all(|&c| c == 0));
        }
    }

    #[test]
    fn naive_generator_count_and_entry() {
        let m = model(6, 2);
        let gens = m.naive_generators();
        assert_eq!(gens.len(), 36 + 225 + 36 + 36);
        let entry = &gens[36 + 225 + 36];
        assert_eq!(*entry, m.full_ring().parse("2*x[3][1]*x[4][1] + 2*x[6][1]").unwrap());
    }

    #[test]
    fn reduced_ring_and_trace_quadric() {
        let m = model(6, 2);
        let names: Vec<&str> = m.reduced_ring().vars().names().iter().map(|s| s.as_str()).collect();
        assert_eq!(
            names,
            ["x[3][1]", "x[3][2]", "x[3][5]", "x[3][6]", "x[4][1]", "x[4][2]", "x[4][5]", "x[4][6]", "pi"]
        );
        let t = m.trace_quadric(m.reduced_ring());
        assert_eq!(t, m.reduced_ring().parse("x[3][1]*x[4][6] + x[3][2]*x[4][5]").unwrap());
        assert_eq!(m.reduced_ideal().len(), 6 + 1);
    }

    #[test]
    fn substitution_example() {
        let m = model(6, 2);
        let map = m.substitution_map();
        let expected = m.reduced_ring().parse("-1/2*x[3][6]*x[4][1] - 1/2*x[4][6]*x[3][1]").unwrap();
        assert_eq!(map["x[1][1]"], expected);
        assert_eq!(map["x[3][1]"], m.b(3, 1));
        assert_eq!(map.len(), m.full_ring().nvars());
    }

    #[test]
    fn full_trace_is_twice_the_quadric_modulo_minors() {
        for (d, l) in [(6, 2), (5, 2), (5, 3), (6, 3), (7, 4), (8, 4)] {
            let m = model(d, l);
            let minors = Ideal::new(m.reduced_ring(), m.reduced_minors()).unwrap();
            let diff = &m.full_trace_quadric() - &m.trace_quadric(m.reduced_ring()).scale(&Rational::from(2));
            assert!(minors.contains(&diff, &opts()).unwrap(), "({d},{l})");
        }
    }

    #[test]
    fn block_form_matches_for_odd_even_only() {
        let build = |m: &LocalModel<PrimeField>| {
            let mut gens = m.naive_ideal().gens().to_vec();
            gens.push(m.trace_generator());
            gens.push(m.trace_a_generator());
            gens.extend(m.a_symmetry_generators());
            gens.extend(m.block_form_additional().unwrap());
            Ideal::new(m.full_ring(), gens).unwrap()
        };
        let field = PrimeField::new(32003).unwrap();
        let m = local_model(5, 2, field.clone()).unwrap();
        assert!(build(&m).equals(&m.full_ideal(), &opts()).unwrap());
        let m = local_model(6, 3, field.clone()).unwrap();
        let literal = build(&m);
        assert_eq!(m.full_ideal().krull_dimension(&opts()).unwrap(), 5);
        assert_eq!(literal.krull_dimension(&opts()).unwrap(), 4);
        assert!(local_model(6, 2, field).unwrap().block_form_additional().is_err());
    }

    #[test]
    fn intermediate_ideal_needs_same_parity() {
        assert!(model(6, 2).intermediate_ideal().is_ok());
        assert_eq!(model(5, 2).intermediate_ideal().unwrap_err(), ChartError::NotApplicable("the intermediate ideal"));
    }

    #[test]
    fn fibers() {
        let m = model(6, 2);
        let red = m.reduced_ideal();
        assert_eq!(m.specialize(&red, &Fiber::Generic(Rational::zero())).unwrap_err(), ChartError::InvalidUnit);
        let generic = m.specialize(&red, &Fiber::Generic(Rational::one())).unwrap();
        let t = m.trace_quadric(m.fiber_ring());
        assert!(generic.gens().contains(&(&t + &m.fiber_ring().one())));
        let special = m.special_fiber_ideal();
        assert!(special.gens().contains(&t));
        assert_eq!(special.ring().nvars(), 8);
    }

    #[test]
    fn component_shapes() {
        let labels = |d, l| {
            model(d, l).components().iter().map(|c| (c.label.clone(), c.designated.clone())).collect::<Vec<_>>()
        };
        assert_eq!(
            labels(6, 2),
            [("I1".into(), "x[4][1]".into()), ("I2".into(), "x[3][1]".into()), ("I3".into(), "x[4][1]".to_string())]
        );
        assert_eq!(labels(8, 4), [("I1".into(), "x[3][1]".into()), ("I2".to_string(), "x[3][1]".to_string())]);
        let m = model(5, 2);
        let comps = m.components();
        let expect = Ideal::parse(m.fiber_ring(), &["x[2][1]", "x[2][3]", "x[2][5]"]).unwrap();
        assert!(comps[0].ideal.equals(&expect, &opts()).unwrap());
        let expect = Ideal::parse(m.fiber_ring(), &["x[4][1]", "x[4][3]", "x[4][5]"]).unwrap();
        assert!(comps[1].ideal.equals(&expect, &opts()).unwrap());
    }

    #[test]
    fn chart_json_fields() {
        let m = model(6, 2);
        let v = m.chart_json(&Fiber::Special).unwrap();
        assert_eq!(v["case"], "EE");
        assert_eq!(v["Z"], json!([3, 4]));
        assert_eq!(v["variables"].as_array().unwrap().len(), 36);
        assert_eq!(v["variables"][0], "x[1][1]");
        assert_eq!(v["ideals"]["components"].as_array().unwrap().len(), 3);
        assert!(v["ideals"]["reduced"].as_array().unwrap().contains(&json!("x[3][1]*x[4][6] + x[3][2]*x[4][5]")));
        let v = m.chart_json(&Fiber::Arithmetic).unwrap();
        assert_eq!(v["variables"].as_array().unwrap().len(), 37);
        assert!(m.chart_json(&Fiber::Generic(Rational::zero())).is_err());
        assert_eq!(model(5, 2).chart_json(&Fiber::Special).unwrap()["ideals"]["intermediate"], Value::Null);
    }
}
