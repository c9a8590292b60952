//! Randomized engine property suite shared by the property and acceptance
//! test targets.

use std::sync::Arc;
use std::time::{Duration, Instant};

use orthochart::arith::{Field, PrimeField};
use orthochart::groebner::{buchberger, divide, s_polynomial, GbOptions, Selection};
use orthochart::ideal::Ideal;
use orthochart::poly::{Monomial, MonomialOrder, PolyRing, Polynomial};
use rand::rngs::SmallRng;
use rand::{Rng, SeedableRng};

pub const MAX_VARS: usize = 4;
pub const MAX_DEGREE: u16 = 3;

pub struct PropertySummary {
    pub instances: usize,
    pub failures: Vec<String>,
    pub elapsed: Duration,
}

fn random_poly<F: Field>(ring: &Arc<PolyRing<F>>, rng: &mut SmallRng) -> Polynomial<F> {
    let n = ring.nvars();
    let terms = rng.gen_range(1..=4);
    let mut p = ring.zero();
    for _ in 0..terms {
        let degree = rng.gen_range(0..=MAX_DEGREE);
        let mut exps = vec![0u16; n];
        for _ in 0..degree {
            exps[rng.gen_range(0..n)] += 1;
        }
        let c = ring.field().from_i64(rng.gen_range(-5..=5));
        p = &p + &ring.monomial(Monomial::new(exps), c);
    }
    p
}

fn random_nonzero<F: Field>(ring: &Arc<PolyRing<F>>, rng: &mut SmallRng) -> Polynomial<F> {
    loop {
        let p = random_poly(ring, rng);
        if !p.is_zero() {
            return p;
        }
    }
}

fn random_ring(rng: &mut SmallRng) -> Arc<PolyRing<PrimeField>> {
    let n = rng.gen_range(1..=MAX_VARS);
    let names: Vec<String> = ["x", "y", "z", "w"][..n].iter().map(|s| s.to_string()).collect();
    let order = match rng.gen_range(0..3) {
        0 => MonomialOrder::GrLex,
        1 => MonomialOrder::Lex,
        _ => MonomialOrder::Block(rng.gen_range(1..=n)),
    };
    PolyRing::from_names(PrimeField::new(32003).unwrap(), names, order).unwrap()
}

/// Division identity and remainder normal-form condition.
fn check_division<F: Field>(f: &Polynomial<F>, divisors: &[Polynomial<F>]) -> Result<(), String> {
    let result = divide(f, divisors).map_err(|e| e.to_string())?;
    let mut recombined = result.remainder.clone();
    for (q, g) in result.quotients.iter().zip(divisors) {
        recombined = &recombined + &(q * g);
        if let (Some(lq), Some(lf)) = ((q * g).leading_monomial().cloned(), f.leading_monomial()) {
            if f.ring().order().compare(&lq, lf) == std::cmp::Ordering::Greater {
                return Err(format!("quotient term exceeds leading monomial of {f}"));
            }
        }
    }
    if recombined != *f {
        return Err(format!("division identity fails for {f}"));
    }
    for (m, _) in result.remainder.terms() {
        if divisors.iter().any(|g| g.leading_monomial().is_some_and(|lm| lm.divides(m))) {
            return Err(format!("remainder of {f} has a reducible term"));
        }
    }
    Ok(())
}

fn check_instance(rng: &mut SmallRng) -> Result<(), String> {
    let ring = random_ring(rng);
    let k = rng.gen_range(1..=3);
    let gens: Vec<_> = (0..k).map(|_| random_nonzero(&ring, rng)).collect();
    let opts = GbOptions::default();

    let f = random_poly(&ring, rng);
    check_division(&f, &gens)?;

    let gb = buchberger(&ring, &gens, opts).map_err(|e| e.to_string())?;
    let polys = gb.polys();
    for (i, a) in polys.iter().enumerate() {
        for b in &polys[i + 1..] {
            let s = s_polynomial(a, b).map_err(|e| e.to_string())?;
            let r = divide(&s, polys).map_err(|e| e.to_string())?.remainder;
            if !r.is_zero() {
                return Err(format!("S-pair of {a} and {b} leaves {r}"));
            }
        }
    }
    for g in &gens {
        if !divide(g, polys).map_err(|e| e.to_string())?.remainder.is_zero() {
            return Err(format!("generator {g} does not reduce to zero"));
        }
    }
    if !gb.is_reduced() {
        return Err("basis is not reduced".into());
    }

    let seed = rng.gen();
    for sel in [Selection::Sugar, Selection::Fifo, Selection::Random(seed)] {
        let other = buchberger(&ring, &gens, GbOptions::with_selection(sel)).map_err(|e| e.to_string())?;
        if other.polys() != polys {
            return Err(format!("{sel:?} gives a different reduced basis"));
        }
    }

    let i = Ideal::new(&ring, gens.clone()).unwrap();
    let j = Ideal::new(&ring, (0..rng.gen_range(1..=2)).map(|_| random_nonzero(&ring, rng)).collect()).unwrap();
    let meet = graded(&i.intersect(&j, &opts).map_err(|e| e.to_string())?)?;
    if !graded(&i)?.contains_ideal(&meet, &opts).unwrap() || !graded(&j)?.contains_ideal(&meet, &opts).unwrap() {
        return Err("intersection is not contained in both ideals".into());
    }
    for a in i.gens() {
        for b in j.gens() {
            let product = (a * b).change_ring(meet.ring()).map_err(|e| e.to_string())?;
            if !meet.contains(&product, &opts).unwrap() {
                return Err("product is not contained in the intersection".into());
            }
        }
    }

    let h = random_nonzero(&ring, rng);
    let q = i.quotient(&h, &opts).map_err(|e| e.to_string())?;
    if !graded(&q)?.contains_ideal(&graded(&i)?, &opts).unwrap() {
        return Err("ideal is not contained in its quotient".into());
    }
    for g in q.gens() {
        if !i.contains(&(g * &h), &opts).unwrap() {
            return Err(format!("quotient element {g} times {h} is outside the ideal"));
        }
    }
    Ok(())
}

/// The same ideal over the graded-lex copy of its ring. Membership does not
/// depend on the order, and graded bases of intersections stay small where
/// lex bases can grow out of reach.
fn graded<F: Field>(ideal: &Ideal<F>) -> Result<Ideal<F>, String> {
    let ring = ideal.ring().with_order(MonomialOrder::GrLex);
    let gens = ideal.gens().iter().map(|g| g.change_ring(&ring)).collect::<Result<Vec<_>, _>>();
    Ideal::new(&ring, gens.map_err(|e| e.to_string())?).map_err(|e| e.to_string())
}

/// Runs `count` random instances from a fixed seed.
pub fn property_suite(count: usize, seed: u64) -> PropertySummary {
    let start = Instant::now();
    let mut rng = SmallRng::seed_from_u64(seed);
    let mut failures = Vec::new();
    for n in 0..count {
        if let Err(e) = check_instance(&mut rng) {
            failures.push(format!("instance {n}: {e}"));
        }
    }
    PropertySummary { instances: count, failures, elapsed: start.elapsed() }
}
