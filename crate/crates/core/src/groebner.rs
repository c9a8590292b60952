//! Multivariate division, S-polynomials and Buchberger's algorithm.
//!
//! The basis computation keeps a pair queue managed with the product
//! criterion and the Gebauer–Möller update, selects pairs by a configurable
//! strategy, and finishes with minimalization and inter-reduction so the
//! output is the reduced Gröbner basis: monic, auto-reduced and sorted by
//! leading monomial. Reductions of one batch of pairs can run on a rayon
//! pool against a frozen snapshot; insertion into the basis is sequential.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::rngs::SmallRng;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::Field;
use crate::poly::{Monomial, MonomialOrder, PolyError, PolyRing, Polynomial, Term};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GroebnerError {
    #[error("division by the zero polynomial")]
    InvalidDivisor,
    #[error("S-polynomial of the zero polynomial")]
    InvalidInput,
    #[error("budget exhausted after {reductions} reduction steps ({millis} ms)")]
    Timeout { reductions: u64, millis: u64 },
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// Resource limits for one basis computation. `None` means unbounded.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Budget {
    pub max_reductions: Option<u64>,
    pub timeout_ms: Option<u64>,
}

impl Budget {
    pub fn unlimited() -> Self {
        Budget::default()
    }

    pub fn with_timeout(timeout: Duration) -> Self {
        Budget { max_reductions: None, timeout_ms: Some(timeout.as_millis() as u64) }
    }
}

/// Order in which critical pairs are processed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Selection {
    /// Smallest lcm degree first, ties by the monomial order.
    Normal,
    /// Smallest sugar degree first, ties by lcm.
    Sugar,
    /// First in, first out.
    Fifo,
    /// Uniformly random, from a seeded generator.
    Random(u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GbOptions {
    pub selection: Selection,
    pub budget: Budget,
    /// Reduce batches of equal-priority pairs concurrently.
    pub parallel: bool,
}

impl Default for GbOptions {
    fn default() -> Self {
        GbOptions { selection: Selection::Normal, budget: Budget::unlimited(), parallel: false }
    }
}

impl GbOptions {
    pub fn with_selection(selection: Selection) -> Self {
        GbOptions { selection, ..Default::default() }
    }
}

#[derive(Debug, Clone)]
pub struct DivisionResult<F: Field> {
    pub quotients: Vec<Polynomial<F>>,
    pub remainder: Polynomial<F>,
}

fn check_rings<F: Field>(f: &Polynomial<F>, others: &[Polynomial<F>]) -> Result<(), GroebnerError> {
    if others.iter().all(|g| Arc::ptr_eq(g.ring(), f.ring()) || g.ring().same_ring(f.ring())) {
        Ok(())
    } else {
        Err(PolyError::TableMismatch.into())
    }
}

/// Multivariate division with remainder. At each step the first divisor
/// whose leading monomial divides the current leading monomial is used.
pub fn divide<F: Field>(f: &Polynomial<F>, divisors: &[Polynomial<F>]) -> Result<DivisionResult<F>, GroebnerError> {
    check_rings(f, divisors)?;
    if divisors.iter().any(Polynomial::is_zero) {
        return Err(GroebnerError::InvalidDivisor);
    }
    let ring = f.ring();
    let field = ring.field();
    let lc_inv: Vec<F::Elem> =
        divisors.iter().map(|g| field.inv(g.leading_coeff().expect("nonzero")).expect("nonzero")).collect();
    let mut quotients: Vec<Vec<Term<F>>> = vec![Vec::new(); divisors.len()];
    let mut remainder: Vec<Term<F>> = Vec::new();
    let mut p = f.clone();
    while let Some((m, c)) = p.leading_term() {
        let hit = divisors.iter().position(|g| g.leading_monomial().expect("nonzero").divides(m));
        match hit {
            Some(i) => {
                let q = divisors[i].leading_monomial().expect("nonzero").quotient_of(m).expect("divides");
                let qc = field.mul(c, &lc_inv[i]);
                p = p.sub_mul_term(&qc, &q, &divisors[i]);
                quotients[i].push((q, qc));
            }
            None => {
                let mut terms = p.into_terms();
                remainder.push(terms.remove(0));
                p = Polynomial::from_sorted_terms(ring, terms);
            }
        }
    }
    let result = DivisionResult {
        quotients: quotients.into_iter().map(|t| Polynomial::from_terms(ring, t)).collect(),
        remainder: Polynomial::from_sorted_terms(ring, remainder),
    };
    if cfg!(debug_assertions) {
        let mut total = result.remainder.clone();
        for (q, g) in result.quotients.iter().zip(divisors) {
            total = &total + &(q * g);
        }
        debug_assert!(total == *f, "division identity violated");
    }
    Ok(result)
}

/// `(L / LT(f)) * f - (L / LT(g)) * g` where `L` is the lcm of the leading
/// monomials.
pub fn s_polynomial<F: Field>(f: &Polynomial<F>, g: &Polynomial<F>) -> Result<Polynomial<F>, GroebnerError> {
    check_rings(f, std::slice::from_ref(g))?;
    let ((mf, cf), (mg, cg)) = match (f.leading_term(), g.leading_term()) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(GroebnerError::InvalidInput),
    };
    let field = f.field();
    let lcm = mf.lcm(mg);
    let a = f.mul_term(&mf.quotient_of(&lcm).expect("lcm"), &field.inv(cf).expect("nonzero"));
    let b = g.mul_term(&mg.quotient_of(&lcm).expect("lcm"), &field.inv(cg).expect("nonzero"));
    Ok(&a - &b)
}

struct Clock {
    start: Instant,
    budget: Budget,
    reductions: u64,
}

impl Clock {
    fn new(budget: Budget) -> Self {
        Clock { start: Instant::now(), budget, reductions: 0 }
    }

    fn deadline(&self) -> Option<Instant> {
        self.budget.timeout_ms.map(|ms| self.start + Duration::from_millis(ms))
    }

    fn timeout(&self) -> GroebnerError {
        GroebnerError::Timeout { reductions: self.reductions, millis: self.start.elapsed().as_millis() as u64 }
    }

    fn charge(&mut self, steps: u64) -> Result<(), GroebnerError> {
        self.reductions += steps;
        if self.budget.max_reductions.is_some_and(|m| self.reductions > m) {
            return Err(self.timeout());
        }
        if let Some(ms) = self.budget.timeout_ms {
            if self.start.elapsed() > Duration::from_millis(ms) {
                return Err(self.timeout());
            }
        }
        Ok(())
    }
}

/// Heap entry ordering monomials by a fixed monomial order.
struct HeapKey {
    monomial: Monomial,
    order: MonomialOrder,
}

impl PartialEq for HeapKey {
    fn eq(&self, other: &Self) -> bool {
        self.monomial == other.monomial
    }
}

impl Eq for HeapKey {}

impl PartialOrd for HeapKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for HeapKey {
    fn cmp(&self, other: &Self) -> Ordering {
        self.order.compare(&self.monomial, &other.monomial)
    }
}

/// Full reduction of `f` modulo monic `reducers`. Returns the remainder
/// and the number of elementary reduction steps performed, or `None` once
/// the deadline has passed.
///
/// Pending terms live in a coefficient map indexed by a max-heap of their
/// monomials, so one step costs time proportional to the reducer rather
/// than to the remainder.
fn reduce_full<F: Field>(
    f: &Polynomial<F>,
    reducers: &[&Polynomial<F>],
    deadline: Option<Instant>,
) -> Option<(Polynomial<F>, u64)> {
    let ring = f.ring();
    let field = ring.field();
    let order = ring.order();
    let mut steps = 0u64;
    let mut pending: HashMap<Monomial, F::Elem> = HashMap::with_capacity(f.len());
    let mut heap: BinaryHeap<HeapKey> = BinaryHeap::with_capacity(f.len());
    for (m, c) in f.terms() {
        pending.insert(m.clone(), c.clone());
        heap.push(HeapKey { monomial: m.clone(), order });
    }
    let mut done: Vec<Term<F>> = Vec::new();
    while let Some(HeapKey { monomial: m, .. }) = heap.pop() {
        let c = pending.remove(&m).expect("heap and map agree");
        if field.is_zero(&c) {
            continue;
        }
        let Some(g) = reducers.iter().find(|g| g.leading_monomial().expect("nonzero").divides(&m)) else {
            done.push((m, c));
            continue;
        };
        steps += 1;
        if steps % 256 == 0 && deadline.is_some_and(|d| Instant::now() > d) {
            return None;
        }
        let q = g.leading_monomial().expect("nonzero").quotient_of(&m).expect("divides");
        for (gm, gc) in &g.terms()[1..] {
            let pm = gm.mul(&q);
            let pc = field.mul(gc, &c);
            match pending.get_mut(&pm) {
                Some(v) => *v = field.sub(v, &pc),
                None => {
                    pending.insert(pm.clone(), field.neg(&pc));
                    heap.push(HeapKey { monomial: pm, order });
                }
            }
        }
    }
    Some((Polynomial::from_sorted_terms(ring, done), steps))
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Pair {
    key: (u32, u32, u64),
    lcm: Monomial,
    i: usize,
    j: usize,
}

struct PairQueue {
    order: MonomialOrder,
    pairs: Vec<Pair>,
    counter: u64,
}

impl PairQueue {
    fn push(&mut self, i: usize, j: usize, lcm: Monomial, sugar: u32, selection: Selection) {
        self.counter += 1;
        let key = match selection {
            Selection::Normal if self.order == MonomialOrder::Lex => (0, 0, self.counter),
            Selection::Normal => (lcm.degree(), 0, self.counter),
            Selection::Sugar => (sugar, lcm.degree(), self.counter),
            Selection::Fifo | Selection::Random(_) => (0, 0, self.counter),
        };
        self.pairs.push(Pair { key, lcm, i, j });
    }

    /// Removes and returns the next batch: every pair sharing the minimal
    /// primary key (a single pair for FIFO and random selection).
    fn pop_batch(&mut self, selection: Selection, rng: &mut SmallRng, batch: bool) -> Vec<Pair> {
        if self.pairs.is_empty() {
            return Vec::new();
        }
        match selection {
            Selection::Random(_) => {
                let k = rng.gen_range(0..self.pairs.len());
                vec![self.pairs.swap_remove(k)]
            }
            Selection::Fifo => {
                let k = (0..self.pairs.len()).min_by_key(|&k| self.pairs[k].key.2).expect("nonempty");
                vec![self.pairs.swap_remove(k)]
            }
            Selection::Normal | Selection::Sugar => {
                let order = self.order;
                let best = (0..self.pairs.len())
                    .min_by(|&a, &b| {
                        let (pa, pb) = (&self.pairs[a], &self.pairs[b]);
                        (pa.key.0, pa.key.1)
                            .cmp(&(pb.key.0, pb.key.1))
                            .then_with(|| order.compare(&pa.lcm, &pb.lcm))
                            .then_with(|| pa.key.2.cmp(&pb.key.2))
                    })
                    .expect("nonempty");
                if !batch {
                    return vec![self.pairs.swap_remove(best)];
                }
                let primary = (self.pairs[best].key.0, self.pairs[best].key.1);
                let (mut taken, kept): (Vec<Pair>, Vec<Pair>) =
                    std::mem::take(&mut self.pairs).into_iter().partition(|p| (p.key.0, p.key.1) == primary);
                self.pairs = kept;
                taken.sort_by(|a, b| order.compare(&a.lcm, &b.lcm).then_with(|| a.key.2.cmp(&b.key.2)));
                taken
            }
        }
    }
}

struct Builder<F: Field> {
    polys: Vec<Polynomial<F>>,
    sugar: Vec<u32>,
    active: Vec<bool>,
    queue: PairQueue,
    options: GbOptions,
}

impl<F: Field> Builder<F> {
    fn reducers(&self) -> Vec<&Polynomial<F>> {
        self.polys.iter().zip(&self.active).filter(|(_, &a)| a).map(|(p, _)| p).collect()
    }

    fn lm(&self, i: usize) -> &Monomial {
        self.polys[i].leading_monomial().expect("basis elements are nonzero")
    }

    /// Gebauer–Möller update for a new monic element `h`.
    fn insert(&mut self, h: Polynomial<F>, sugar: u32) {
        let hidx = self.polys.len();
        let lm_h = h.leading_monomial().expect("nonzero").clone();
        let candidates: Vec<(usize, Monomial)> = (0..hidx)
            .filter(|&g| self.active[g])
            .map(|g| (g, self.lm(g).lcm(&lm_h)))
            .collect();

        let mut kept: Vec<(usize, Monomial, bool)> = Vec::new();
        for (k, (g, lcm)) in candidates.iter().enumerate() {
            let coprime = lm_h.is_coprime(self.lm(*g));
            let dominated_later = candidates[k + 1..].iter().any(|(_, l2)| l2.divides(lcm));
            let dominated_kept = kept.iter().any(|(_, l2, _)| l2.divides(lcm));
            if coprime || (!dominated_later && !dominated_kept) {
                kept.push((*g, lcm.clone(), coprime));
            }
        }

        let polys = &self.polys;
        let lm = |i: usize| polys[i].leading_monomial().expect("nonzero");
        self.queue.pairs.retain(|p| {
            !(lm_h.divides(&p.lcm)
                && lm(p.i).lcm(&lm_h) != p.lcm
                && lm(p.j).lcm(&lm_h) != p.lcm)
        });

        for (g, lcm, coprime) in kept {
            if coprime {
                continue;
            }
            let s = (self.sugar[g] + lcm.degree() - self.lm(g).degree()).max(sugar + lcm.degree() - lm_h.degree());
            self.queue.push(g, hidx, lcm, s, self.options.selection);
        }

        for g in 0..hidx {
            if self.active[g] && lm_h.divides(self.lm(g)) {
                self.active[g] = false;
            }
        }
        self.polys.push(h);
        self.sugar.push(sugar);
        self.active.push(true);
    }

    fn spoly(&self, p: &Pair) -> (Polynomial<F>, u32) {
        let (f, g) = (&self.polys[p.i], &self.polys[p.j]);
        let s = s_polynomial(f, g).expect("nonzero monic inputs");
        let sugar = (self.sugar[p.i] + p.lcm.degree() - self.lm(p.i).degree())
            .max(self.sugar[p.j] + p.lcm.degree() - self.lm(p.j).degree());
        (s, sugar)
    }
}

/// Computes the reduced Gröbner basis of the ideal generated by `gens`
/// with respect to the order of their common ring.
pub fn buchberger<F: Field>(
    ring: &Arc<PolyRing<F>>,
    gens: &[Polynomial<F>],
    options: GbOptions,
) -> Result<GroebnerBasis<F>, GroebnerError> {
    if gens.iter().any(|g| !g.ring().same_ring(ring)) {
        return Err(PolyError::TableMismatch.into());
    }
    let mut clock = Clock::new(options.budget);
    let mut rng = SmallRng::seed_from_u64(match options.selection {
        Selection::Random(seed) => seed,
        _ => 0,
    });
    let mut builder = Builder {
        polys: Vec::new(),
        sugar: Vec::new(),
        active: Vec::new(),
        queue: PairQueue { order: ring.order(), pairs: Vec::new(), counter: 0 },
        options,
    };

    let mut input: Vec<Polynomial<F>> = gens.iter().filter(|g| !g.is_zero()).map(Polynomial::monic).collect();
    input.sort_by(|a, b| {
        ring.order()
            .compare(a.leading_monomial().expect("nonzero"), b.leading_monomial().expect("nonzero"))
            .then_with(|| a.len().cmp(&b.len()))
    });
    input.dedup();
    for g in input {
        let (r, steps) = reduce_full(&g, &builder.reducers(), clock.deadline()).ok_or_else(|| clock.timeout())?;
        clock.charge(steps + 1)?;
        if !r.is_zero() {
            let sugar = r.total_degree();
            if r.is_constant() {
                return Ok(GroebnerBasis::unit(ring));
            }
            builder.insert(r.monic(), sugar);
        }
    }

    loop {
        let batch = builder.queue.pop_batch(options.selection, &mut rng, options.parallel);
        if batch.is_empty() {
            break;
        }
        let spolys: Vec<(Polynomial<F>, u32)> = batch.iter().map(|p| builder.spoly(p)).collect();
        let deadline = clock.deadline();
        let reduced: Option<Vec<(Polynomial<F>, u32, u64)>> = if options.parallel && spolys.len() > 1 {
            let reducers = builder.reducers();
            spolys
                .par_iter()
                .map(|(s, sugar)| reduce_full(s, &reducers, deadline).map(|(r, steps)| (r, *sugar, steps)))
                .collect()
        } else {
            spolys
                .into_iter()
                .map(|(s, sugar)| reduce_full(&s, &builder.reducers(), deadline).map(|(r, steps)| (r, sugar, steps)))
                .collect()
        };
        let reduced = reduced.ok_or_else(|| clock.timeout())?;
        for (r, sugar, steps) in reduced {
            clock.charge(steps + 1)?;
            if r.is_zero() {
                continue;
            }
            let (r, more) = reduce_full(&r, &builder.reducers(), deadline).ok_or_else(|| clock.timeout())?;
            clock.charge(more)?;
            if r.is_zero() {
                continue;
            }
            if r.is_constant() {
                return Ok(GroebnerBasis::unit(ring));
            }
            builder.insert(r.monic(), sugar);
        }
    }

    let minimal: Vec<Polynomial<F>> =
        builder.polys.into_iter().zip(builder.active).filter(|(_, a)| *a).map(|(p, _)| p).collect();
    GroebnerBasis::interreduce(ring, minimal, &mut clock)
}

/// A reduced Gröbner basis together with its ring and order.
#[derive(Debug, Clone, PartialEq)]
pub struct GroebnerBasis<F: Field> {
    ring: Arc<PolyRing<F>>,
    basis: Vec<Polynomial<F>>,
}

impl<F: Field> GroebnerBasis<F> {
    fn unit(ring: &Arc<PolyRing<F>>) -> Self {
        GroebnerBasis { ring: ring.clone(), basis: vec![ring.one()] }
    }

    /// Inter-reduces a minimal basis (pairwise non-dividing monic leading
    /// monomials) and sorts it.
    fn interreduce(
        ring: &Arc<PolyRing<F>>,
        minimal: Vec<Polynomial<F>>,
        clock: &mut Clock,
    ) -> Result<Self, GroebnerError> {
        let order = ring.order();
        let mut basis: Vec<Polynomial<F>> = Vec::with_capacity(minimal.len());
        for (k, g) in minimal.iter().enumerate() {
            let others: Vec<&Polynomial<F>> =
                minimal.iter().enumerate().filter(|(j, _)| *j != k).map(|(_, p)| p).collect();
            let lead = Polynomial::from_sorted_terms(ring, vec![g.leading_term().expect("nonzero").clone()]);
            let tail = Polynomial::from_sorted_terms(ring, g.terms()[1..].to_vec());
            let (t, steps) = reduce_full(&tail, &others, clock.deadline()).ok_or_else(|| clock.timeout())?;
            clock.charge(steps)?;
            basis.push(&lead + &t);
        }
        basis.sort_by(|a, b| order.compare(a.leading_monomial().expect("nonzero"), b.leading_monomial().expect("nonzero")));
        Ok(GroebnerBasis { ring: ring.clone(), basis })
    }

    pub fn ring(&self) -> &Arc<PolyRing<F>> {
        &self.ring
    }

    pub fn order(&self) -> MonomialOrder {
        self.ring.order()
    }

    pub fn polys(&self) -> &[Polynomial<F>] {
        &self.basis
    }

    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    /// True when the ideal is the whole ring.
    pub fn is_unit(&self) -> bool {
        self.basis.len() == 1 && self.basis[0].is_constant()
    }

    pub fn leading_monomials(&self) -> Vec<&Monomial> {
        self.basis.iter().map(|g| g.leading_monomial().expect("nonzero")).collect()
    }

    pub fn normal_form(&self, f: &Polynomial<F>) -> Result<Polynomial<F>, GroebnerError> {
        check_rings(f, &self.basis)?;
        if !f.ring().same_ring(&self.ring) {
            return Err(PolyError::TableMismatch.into());
        }
        let reducers: Vec<&Polynomial<F>> = self.basis.iter().collect();
        Ok(reduce_full(f, &reducers, None).expect("no deadline").0)
    }

    pub fn contains(&self, f: &Polynomial<F>) -> Result<bool, GroebnerError> {
        Ok(self.normal_form(f)?.is_zero())
    }

    /// Normal form and membership flag.
    pub fn membership(&self, f: &Polynomial<F>) -> Result<(Polynomial<F>, bool), GroebnerError> {
        let nf = self.normal_form(f)?;
        let member = nf.is_zero();
        Ok((nf, member))
    }

    /// Reduces every S-polynomial of the basis and returns the first pair
    /// with a nonzero remainder. Pairs with coprime leading monomials are
    /// included unless `skip_coprime`.
    pub fn first_failing_s_pair(&self, skip_coprime: bool) -> Option<(usize, usize, Polynomial<F>)> {
        let reducers: Vec<&Polynomial<F>> = self.basis.iter().collect();
        let lms = self.leading_monomials();
        for i in 0..self.basis.len() {
            for j in i + 1..self.basis.len() {
                if skip_coprime && lms[i].is_coprime(lms[j]) {
                    continue;
                }
                let s = s_polynomial(&self.basis[i], &self.basis[j]).expect("nonzero basis");
                let r = reduce_full(&s, &reducers, None).expect("no deadline").0;
                if !r.is_zero() {
                    return Some((i, j, r));
                }
            }
        }
        None
    }

    /// Checks the reduced-basis shape: monic, no term of any element
    /// divisible by another element's leading monomial.
    pub fn is_reduced(&self) -> bool {
        let lms = self.leading_monomials();
        self.basis.iter().enumerate().all(|(i, g)| {
            g.is_monic()
                && g.terms().iter().all(|(m, _)| lms.iter().enumerate().all(|(j, l)| j == i || !l.divides(m)))
        })
    }
}
