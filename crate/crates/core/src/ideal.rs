//! Ideals with cached Gröbner bases and the operations derived from them.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use crate::arith::Field;
use crate::groebner::{buchberger, GbOptions, GroebnerBasis, GroebnerError};
use crate::poly::{Monomial, MonomialOrder, PolyError, PolyRing, Polynomial, VariableTable};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum IdealError {
    #[error("the ideal is the whole ring")]
    EmptyVariety,
    #[error(transparent)]
    Groebner(#[from] GroebnerError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

impl IdealError {
    pub fn is_timeout(&self) -> bool {
        matches!(self, IdealError::Groebner(GroebnerError::Timeout { .. }))
    }
}

pub type IdealResult<T> = Result<T, IdealError>;

/// Generator list over a ring, with reduced Gröbner bases cached per order.
pub struct Ideal<F: Field> {
    ring: Arc<PolyRing<F>>,
    gens: Vec<Polynomial<F>>,
    cache: Mutex<HashMap<MonomialOrder, Arc<GroebnerBasis<F>>>>,
}

impl<F: Field> Clone for Ideal<F> {
    fn clone(&self) -> Self {
        Ideal {
            ring: self.ring.clone(),
            gens: self.gens.clone(),
            cache: Mutex::new(self.cache.lock().expect("cache lock").clone()),
        }
    }
}

impl<F: Field> std::fmt::Debug for Ideal<F> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_list().entries(self.gens.iter().map(|g| g.to_string())).finish()
    }
}

/// Moves a polynomial into a ring with the same variable table and a
/// possibly different order.
pub fn reorder<F: Field>(f: &Polynomial<F>, ring: &Arc<PolyRing<F>>) -> Polynomial<F> {
    debug_assert_eq!(f.ring().vars(), ring.vars());
    Polynomial::from_terms(ring, f.terms().to_vec())
}

impl<F: Field> Ideal<F> {
    /// Drops zero generators and repeated generators, keeping the first
    /// occurrence.
    pub fn new(ring: &Arc<PolyRing<F>>, gens: Vec<Polynomial<F>>) -> IdealResult<Self> {
        let mut kept: Vec<Polynomial<F>> = Vec::with_capacity(gens.len());
        for g in gens {
            if !g.ring().same_ring(ring) {
                return Err(PolyError::TableMismatch.into());
            }
            if !g.is_zero() && !kept.contains(&g) {
                kept.push(g);
            }
        }
        Ok(Ideal { ring: ring.clone(), gens: kept, cache: Mutex::new(HashMap::new()) })
    }

    pub fn zero(ring: &Arc<PolyRing<F>>) -> Self {
        Ideal { ring: ring.clone(), gens: Vec::new(), cache: Mutex::new(HashMap::new()) }
    }

    pub fn parse(ring: &Arc<PolyRing<F>>, gens: &[&str]) -> IdealResult<Self> {
        let polys = gens.iter().map(|s| ring.parse(s)).collect::<Result<Vec<_>, _>>()?;
        Ideal::new(ring, polys)
    }

    pub fn ring(&self) -> &Arc<PolyRing<F>> {
        &self.ring
    }

    pub fn gens(&self) -> &[Polynomial<F>] {
        &self.gens
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    /// Sum of two ideals.
    pub fn sum(&self, other: &Ideal<F>) -> IdealResult<Self> {
        Ideal::new(&self.ring, self.gens.iter().chain(other.gens.iter()).cloned().collect())
    }

    pub fn with_generators(&self, extra: impl IntoIterator<Item = Polynomial<F>>) -> IdealResult<Self> {
        Ideal::new(&self.ring, self.gens.iter().cloned().chain(extra).collect())
    }

    /// Reduced Gröbner basis in the ring's own order.
    pub fn groebner(&self, opts: &GbOptions) -> IdealResult<Arc<GroebnerBasis<F>>> {
        self.groebner_in(self.ring.order(), opts)
    }

    /// Reduced Gröbner basis in the given order over the same table.
    pub fn groebner_in(&self, order: MonomialOrder, opts: &GbOptions) -> IdealResult<Arc<GroebnerBasis<F>>> {
        if let Some(gb) = self.cache.lock().expect("cache lock").get(&order) {
            return Ok(gb.clone());
        }
        let ring = if order == self.ring.order() { self.ring.clone() } else { self.ring.with_order(order) };
        let gens: Vec<Polynomial<F>> = self.gens.iter().map(|g| reorder(g, &ring)).collect();
        let gb = Arc::new(buchberger(&ring, &gens, *opts)?);
        self.cache.lock().expect("cache lock").insert(order, gb.clone());
        Ok(gb)
    }

    pub fn contains(&self, f: &Polynomial<F>, opts: &GbOptions) -> IdealResult<bool> {
        Ok(self.groebner(opts)?.contains(f)?)
    }

    /// First generator of `other` outside this ideal, if any.
    pub fn first_non_member(&self, other: &Ideal<F>, opts: &GbOptions) -> IdealResult<Option<Polynomial<F>>> {
        let gb = self.groebner(opts)?;
        for g in &other.gens {
            if !gb.contains(g)? {
                return Ok(Some(g.clone()));
            }
        }
        Ok(None)
    }

    pub fn contains_ideal(&self, other: &Ideal<F>, opts: &GbOptions) -> IdealResult<bool> {
        Ok(self.first_non_member(other, opts)?.is_none())
    }

    pub fn is_unit(&self, opts: &GbOptions) -> IdealResult<bool> {
        Ok(self.groebner(opts)?.is_unit())
    }

    /// Generators of the elimination ideal `I ∩ k[vars \ drop]`, in the ring
    /// over the kept variables (original relative order) with `target_order`.
    pub fn eliminate(&self, drop: &[&str], target_order: MonomialOrder, opts: &GbOptions) -> IdealResult<Ideal<F>> {
        let names = self.ring.vars().names();
        for d in drop {
            if !self.ring.vars().contains(d) {
                return Err(PolyError::UnknownVariable(d.to_string()).into());
            }
        }
        let dropped: Vec<&String> = names.iter().filter(|n| drop.contains(&n.as_str())).collect();
        let kept: Vec<&String> = names.iter().filter(|n| !drop.contains(&n.as_str())).collect();
        let target = self.ring.with_vars(VariableTable::new(kept.iter().map(|s| s.to_string()))?, target_order);
        if dropped.is_empty() {
            let gens = self.gens.iter().map(|g| g.change_ring(&target)).collect::<Result<Vec<_>, _>>()?;
            return Ideal::new(&target, gens);
        }
        let elim_table = VariableTable::new(dropped.iter().chain(kept.iter()).map(|s| s.to_string()))?;
        let elim = self.ring.with_vars(elim_table, MonomialOrder::Block(dropped.len()));
        let gens = self.gens.iter().map(|g| g.change_ring(&elim)).collect::<Result<Vec<_>, _>>()?;
        let gb = buchberger(&elim, &gens, *opts)?;
        let k = dropped.len();
        let survivors = gb
            .polys()
            .iter()
            .filter(|g| g.variables().iter().all(|&v| v >= k))
            .map(|g| g.change_ring(&target))
            .collect::<Result<Vec<_>, _>>()?;
        Ideal::new(&target, survivors)
    }

    /// `I ∩ J` through `t·I + (1 − t)·J`, eliminating the auxiliary `t`.
    /// Elimination always runs under the graded block order, whatever the
    /// ring's own order, so the result generates the intersection but is a
    /// Gröbner basis only for graded orders.
    pub fn intersect(&self, other: &Ideal<F>, opts: &GbOptions) -> IdealResult<Ideal<F>> {
        if !other.ring.same_ring(&self.ring) {
            return Err(PolyError::TableMismatch.into());
        }
        if self.gens.is_empty() || other.gens.is_empty() {
            return Ok(Ideal::zero(&self.ring));
        }
        let names = self.ring.vars().names();
        let mut aux = String::from("_t");
        while self.ring.vars().contains(&aux) {
            aux.push('_');
        }
        let table = VariableTable::new(std::iter::once(aux.clone()).chain(names.iter().cloned()))?;
        let ext = self.ring.with_vars(table, MonomialOrder::Block(1));
        let t = ext.var(&aux)?;
        let one_minus_t = &ext.one() - &t;
        let mut gens = Vec::with_capacity(self.gens.len() + other.gens.len());
        for g in &self.gens {
            gens.push(&t * &g.change_ring(&ext)?);
        }
        for g in &other.gens {
            gens.push(&one_minus_t * &g.change_ring(&ext)?);
        }
        let gb = buchberger(&ext, &gens, *opts)?;
        let survivors = gb
            .polys()
            .iter()
            .filter(|g| !g.involves(0))
            .map(|g| g.change_ring(&self.ring))
            .collect::<Result<Vec<_>, _>>()?;
        Ideal::new(&self.ring, survivors)
    }

    pub fn intersect_all(ideals: &[Ideal<F>], opts: &GbOptions) -> IdealResult<Ideal<F>> {
        let (first, rest) = ideals.split_first().expect("at least one ideal");
        let mut acc = first.clone();
        for j in rest {
            acc = acc.intersect(j, opts)?;
        }
        Ok(acc)
    }

    /// `(I : f) = {g : g·f ∈ I}`, as `(I ∩ (f)) / f`.
    pub fn quotient(&self, f: &Polynomial<F>, opts: &GbOptions) -> IdealResult<Ideal<F>> {
        if f.is_zero() {
            return Err(GroebnerError::InvalidDivisor.into());
        }
        let principal = Ideal::new(&self.ring, vec![f.clone()])?;
        let meet = self.intersect(&principal, opts)?;
        let gens = meet.gens.iter().map(|g| g.exact_div(f)).collect::<Result<Vec<_>, _>>()?;
        Ideal::new(&self.ring, gens)
    }

    /// Equality of ideals by comparing reduced Gröbner bases.
    pub fn equals(&self, other: &Ideal<F>, opts: &GbOptions) -> IdealResult<bool> {
        Ok(self.equality_witness(other, opts)?.is_none())
    }

    /// `None` when the ideals agree; otherwise a basis element of one side
    /// that is not a member of the other, tagged with the side it comes
    /// from (`true` for `self`).
    pub fn equality_witness(&self, other: &Ideal<F>, opts: &GbOptions) -> IdealResult<Option<(bool, Polynomial<F>)>> {
        let a = self.groebner(opts)?;
        let b = other.groebner(opts)?;
        if a.polys() == b.polys() {
            return Ok(None);
        }
        for g in a.polys() {
            if !b.contains(g)? {
                return Ok(Some((true, g.clone())));
            }
        }
        for g in b.polys() {
            if !a.contains(g)? {
                return Ok(Some((false, g.clone())));
            }
        }
        unreachable!("distinct reduced bases generate distinct ideals")
    }

    /// Krull dimension of `ring / I`: the largest set of variables that
    /// contains the support of no leading monomial.
    pub fn krull_dimension(&self, opts: &GbOptions) -> IdealResult<usize> {
        let gb = self.groebner(opts)?;
        if gb.is_unit() {
            return Err(IdealError::EmptyVariety);
        }
        Ok(dimension_from_leading_monomials(self.ring.nvars(), &gb.leading_monomials()))
    }

    /// True iff `f` is a nonzerodivisor modulo `I`.
    pub fn is_regular_element(&self, f: &Polynomial<F>, opts: &GbOptions) -> IdealResult<bool> {
        let q = self.quotient(f, opts)?;
        self.equals(&q, opts)
    }

    /// Substitutes constants for variables and moves the result into the
    /// ring over the remaining variables.
    pub fn specialize(&self, values: &[(&str, F::Elem)], target: &Arc<PolyRing<F>>) -> IdealResult<Ideal<F>> {
        let subs = values
            .iter()
            .map(|(name, v)| {
                self.ring
                    .vars()
                    .index_of(name)
                    .map(|i| (i, v.clone()))
                    .ok_or_else(|| PolyError::UnknownVariable(name.to_string()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let gens = self
            .gens
            .iter()
            .map(|g| g.substitute(&subs).change_ring(target))
            .collect::<Result<Vec<_>, _>>()?;
        Ideal::new(target, gens)
    }
}

/// True iff no basis element has leading monomial `v^m` with `m ≥ 1`.
pub fn pure_power_free<F: Field>(gb: &GroebnerBasis<F>, var: usize) -> bool {
    gb.leading_monomials().iter().all(|m| m.pure_power_variable() != Some(var))
}

fn bitmask(m: &Monomial) -> u128 {
    m.support().fold(0u128, |acc, v| acc | (1u128 << v))
}

/// `n` minus the size of a minimum set of variables meeting every support.
pub fn dimension_from_leading_monomials(nvars: usize, lms: &[&Monomial]) -> usize {
    assert!(nvars <= 128, "dimension search supports at most 128 variables");
    let mut sets: Vec<u128> = lms.iter().map(|m| bitmask(m)).collect();
    sets.sort_by_key(|s| (s.count_ones(), *s));
    sets.dedup();
    let minimal: Vec<u128> =
        sets.iter().enumerate().filter(|(i, s)| !sets[..*i].iter().any(|t| *t & **s == *t)).map(|(_, s)| *s).collect();
    let mut best = nvars;
    min_hitting_set(&minimal, 0, 0, &mut best);
    nvars - best
}

fn min_hitting_set(sets: &[u128], chosen: u128, size: usize, best: &mut usize) {
    let open: Vec<u128> = sets.iter().copied().filter(|s| s & chosen == 0).collect();
    if open.is_empty() {
        *best = (*best).min(size);
        return;
    }
    // Pairwise disjoint open sets each need their own element.
    let mut used = 0u128;
    let mut lower = 0;
    for s in &open {
        if s & used == 0 {
            used |= s;
            lower += 1;
        }
    }
    if size + lower >= *best {
        return;
    }
    let pivot = *open.iter().min_by_key(|s| s.count_ones()).expect("nonempty");
    let mut rest = pivot;
    while rest != 0 {
        let bit = rest & rest.wrapping_neg();
        rest ^= bit;
        min_hitting_set(&open, chosen | bit, size + 1, best);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{PrimeField, Rationals};

    fn ring3() -> Arc<PolyRing<Rationals>> {
        PolyRing::from_names(Rationals, ["x", "y", "z"], MonomialOrder::GrLex).unwrap()
    }

    fn opts() -> GbOptions {
        GbOptions::default()
    }

    #[test]
    fn elimination_examples() {
        let r = ring3();
        let i = Ideal::parse(&r, &["y - x^2", "z - x^3"]).unwrap();
        let e = i.eliminate(&["x"], MonomialOrder::GrLex, &opts()).unwrap();
        assert_eq!(e.ring().vars().names(), &["y", "z"]);
        assert!(e.contains(&e.ring().parse("z^2 - y^3").unwrap(), &opts()).unwrap());
        for g in e.gens() {
            assert!(i.contains(&g.change_ring(&r).unwrap(), &opts()).unwrap());
        }

        let x = Ideal::parse(&r, &["x"]).unwrap();
        let e = x.eliminate(&["y"], MonomialOrder::GrLex, &opts()).unwrap();
        assert_eq!(e.gens().len(), 1);
        assert_eq!(e.gens()[0].to_string(), "x");
        assert!(x.eliminate(&["x"], MonomialOrder::GrLex, &opts()).unwrap().is_empty());
    }

    #[test]
    fn intersection_examples() {
        let r = ring3();
        let x = Ideal::parse(&r, &["x"]).unwrap();
        let y = Ideal::parse(&r, &["y"]).unwrap();
        assert!(x.intersect(&y, &opts()).unwrap().equals(&Ideal::parse(&r, &["x*y"]).unwrap(), &opts()).unwrap());
        assert!(x.intersect(&x, &opts()).unwrap().equals(&x, &opts()).unwrap());
        let a = Ideal::parse(&r, &["x + y"]).unwrap();
        let b = Ideal::parse(&r, &["x - y"]).unwrap();
        let expect = Ideal::parse(&r, &["x^2 - y^2"]).unwrap();
        assert!(a.intersect(&b, &opts()).unwrap().equals(&expect, &opts()).unwrap());
    }

    #[test]
    fn quotient_examples() {
        let r = ring3();
        let x = r.var("x").unwrap();
        let q = Ideal::parse(&r, &["x*y"]).unwrap().quotient(&x, &opts()).unwrap();
        assert!(q.equals(&Ideal::parse(&r, &["y"]).unwrap(), &opts()).unwrap());
        let q = Ideal::parse(&r, &["x"]).unwrap().quotient(&x, &opts()).unwrap();
        assert!(q.is_unit(&opts()).unwrap());
        let q = Ideal::parse(&r, &["x^2", "x*y"]).unwrap().quotient(&x, &opts()).unwrap();
        assert!(q.equals(&Ideal::parse(&r, &["x", "y"]).unwrap(), &opts()).unwrap());
    }

    #[test]
    fn equality_examples() {
        let r = ring3();
        let e = |a: &[&str], b: &[&str]| {
            Ideal::parse(&r, a).unwrap().equals(&Ideal::parse(&r, b).unwrap(), &opts()).unwrap()
        };
        assert!(e(&["x", "y"], &["y", "x"]));
        assert!(!e(&["x"], &["x^2"]));
        assert!(e(&["x + y", "x - y"], &["x", "y"]));
        let w = Ideal::parse(&r, &["x"]).unwrap().equality_witness(&Ideal::parse(&r, &["x^2"]).unwrap(), &opts());
        assert_eq!(w.unwrap().unwrap().1.to_string(), "x");
    }

    #[test]
    fn dimension_examples() {
        let r = ring3();
        assert_eq!(Ideal::zero(&r).krull_dimension(&opts()).unwrap(), 3);
        let r2 = PolyRing::from_names(Rationals, ["x", "y"], MonomialOrder::GrLex).unwrap();
        assert_eq!(Ideal::parse(&r2, &["x*y"]).unwrap().krull_dimension(&opts()).unwrap(), 1);
        assert_eq!(Ideal::parse(&r, &["x*y - 1", "x"]).unwrap().krull_dimension(&opts()), Err(IdealError::EmptyVariety));
        assert_eq!(Ideal::parse(&r, &["x*y", "x*z"]).unwrap().krull_dimension(&opts()).unwrap(), 2);
        assert_eq!(Ideal::parse(&r, &["x", "y^2 - z^3"]).unwrap().krull_dimension(&opts()).unwrap(), 1);
    }

    #[test]
    fn pure_power_examples() {
        let r = PolyRing::from_names(Rationals, ["w1", "w2", "v1", "v2"], MonomialOrder::GrLex).unwrap();
        let i = Ideal::parse(&r, &["w1*v2 - w2*v1"]).unwrap();
        assert!(pure_power_free(&i.groebner(&opts()).unwrap(), 0));
        let j = Ideal::parse(&r, &["w1^2"]).unwrap();
        assert!(!pure_power_free(&j.groebner(&opts()).unwrap(), 0));
    }

    #[test]
    fn regular_element_examples() {
        let r = ring3();
        let i = Ideal::parse(&r, &["x*y"]).unwrap();
        assert!(!i.is_regular_element(&r.var("x").unwrap(), &opts()).unwrap());
        let j = Ideal::parse(&r, &["x"]).unwrap();
        assert!(j.is_regular_element(&r.var("y").unwrap(), &opts()).unwrap());
    }

    #[test]
    fn hitting_set_matches_brute_force() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand::rngs::SmallRng::seed_from_u64(11);
        for _ in 0..200 {
            let n = rng.gen_range(1..9usize);
            let k = rng.gen_range(0..6usize);
            let lms: Vec<Monomial> = (0..k)
                .map(|_| Monomial::new((0..n).map(|_| if rng.gen_bool(0.3) { 1 } else { 0 }).collect()))
                .filter(|m| !m.is_one())
                .collect();
            let refs: Vec<&Monomial> = lms.iter().collect();
            let brute = (0u32..(1 << n))
                .filter(|s| lms.iter().all(|m| m.support().any(|v| s & (1 << v) == 0)))
                .map(|s| s.count_ones() as usize)
                .max()
                .unwrap();
            assert_eq!(dimension_from_leading_monomials(n, &refs), brute);
        }
    }

    #[test]
    fn specialization() {
        let f = PrimeField::new(32003).unwrap();
        let r = PolyRing::from_names(f.clone(), ["a", "b", "pi"], MonomialOrder::GrLex).unwrap();
        let s = PolyRing::from_names(f.clone(), ["a", "b"], MonomialOrder::GrLex).unwrap();
        let i = Ideal::parse(&r, &["a*b + 2*pi", "pi"]).unwrap();
        let sp = i.specialize(&[("pi", f.zero())], &s).unwrap();
        assert_eq!(sp.gens().len(), 1);
        assert_eq!(sp.gens()[0].to_string(), "a*b");
        let gen = i.specialize(&[("pi", f.one())], &s).unwrap();
        assert_eq!(gen.gens()[0].to_string(), "a*b + 2");
    }
}
