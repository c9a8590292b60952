//! Sparse multivariate polynomials over an exact coefficient field.
//!
//! A [`PolyRing`] bundles the coefficient field, the [`VariableTable`] and
//! the active [`MonomialOrder`]; every [`Polynomial`] points at its ring and
//! keeps its terms strictly descending in that order with no zero
//! coefficients. The zero polynomial is the empty term list.

mod monomial;
mod parse;

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

pub use monomial::{Monomial, MonomialOrder};

use crate::arith::{ArithError, Field, Rational};

/// Name of the distinguished uniformizer variable.
pub const PI: &str = "pi";

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PolyError {
    #[error("polynomials live in different rings")]
    TableMismatch,
    #[error("no image given for variable {0}")]
    MissingImage(String),
    #[error("unknown variable {0}")]
    UnknownVariable(String),
    #[error("invalid variable table: {0}")]
    InvalidTable(String),
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("exact division failed")]
    NotDivisible,
    #[error(transparent)]
    Arith(#[from] ArithError),
}

/// Ordered list of variable names. The list order is the variable
/// precedence: earlier names are greater. `pi`, when present, is last.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VariableTable {
    names: Vec<String>,
    index: HashMap<String, usize>,
}

fn valid_name(name: &str) -> bool {
    let mut chars = name.chars();
    let Some(first) = chars.next() else { return false };
    if !(first.is_ascii_alphabetic() || first == '_') {
        return false;
    }
    let rest: String = chars.collect();
    let head_len = rest.find('[').unwrap_or(rest.len());
    if !rest[..head_len].chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
        return false;
    }
    let mut tail = &rest[head_len..];
    while !tail.is_empty() {
        let Some(close) = tail.find(']') else { return false };
        if !tail.starts_with('[') || close < 2 || !tail[1..close].chars().all(|c| c.is_ascii_digit()) {
            return false;
        }
        tail = &tail[close + 1..];
    }
    true
}

impl VariableTable {
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Result<Self, PolyError> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        let mut index = HashMap::with_capacity(names.len());
        for (i, name) in names.iter().enumerate() {
            if !valid_name(name) {
                return Err(PolyError::InvalidTable(format!("bad variable name {name:?}")));
            }
            if index.insert(name.clone(), i).is_some() {
                return Err(PolyError::InvalidTable(format!("duplicate variable {name}")));
            }
        }
        if let Some(&p) = index.get(PI) {
            if p + 1 != names.len() {
                return Err(PolyError::InvalidTable("pi must be the last variable".into()));
            }
        }
        Ok(VariableTable { names, index })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.index.contains_key(name)
    }
}

/// Coefficient field, variable table and monomial order.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyRing<F: Field> {
    field: F,
    vars: Arc<VariableTable>,
    order: MonomialOrder,
}

impl<F: Field> PolyRing<F> {
    pub fn new(field: F, vars: VariableTable, order: MonomialOrder) -> Arc<Self> {
        Arc::new(PolyRing { field, vars: Arc::new(vars), order })
    }

    pub fn from_names<S: Into<String>>(
        field: F,
        names: impl IntoIterator<Item = S>,
        order: MonomialOrder,
    ) -> Result<Arc<Self>, PolyError> {
        Ok(Self::new(field, VariableTable::new(names)?, order))
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn vars(&self) -> &VariableTable {
        &self.vars
    }

    pub fn order(&self) -> MonomialOrder {
        self.order
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    /// Same field and table under a different order.
    pub fn with_order(&self, order: MonomialOrder) -> Arc<Self> {
        Arc::new(PolyRing { field: self.field.clone(), vars: self.vars.clone(), order })
    }

    /// Same field and order over a different table.
    pub fn with_vars(&self, vars: VariableTable, order: MonomialOrder) -> Arc<Self> {
        Arc::new(PolyRing { field: self.field.clone(), vars: Arc::new(vars), order })
    }

    pub fn zero(self: &Arc<Self>) -> Polynomial<F> {
        Polynomial { ring: self.clone(), terms: Vec::new() }
    }

    pub fn constant(self: &Arc<Self>, c: F::Elem) -> Polynomial<F> {
        Polynomial::from_terms(self, vec![(Monomial::one(self.nvars()), c)])
    }

    pub fn one(self: &Arc<Self>) -> Polynomial<F> {
        self.constant(self.field.one())
    }

    pub fn int(self: &Arc<Self>, n: i64) -> Polynomial<F> {
        self.constant(self.field.from_i64(n))
    }

    pub fn var(self: &Arc<Self>, name: &str) -> Result<Polynomial<F>, PolyError> {
        let i = self.vars.index_of(name).ok_or_else(|| PolyError::UnknownVariable(name.to_string()))?;
        Ok(self.var_by_index(i))
    }

    pub fn var_by_index(self: &Arc<Self>, i: usize) -> Polynomial<F> {
        self.monomial(Monomial::variable(self.nvars(), i, 1), self.field.one())
    }

    pub fn monomial(self: &Arc<Self>, m: Monomial, c: F::Elem) -> Polynomial<F> {
        Polynomial::from_terms(self, vec![(m, c)])
    }

    pub fn parse(self: &Arc<Self>, text: &str) -> Result<Polynomial<F>, PolyError> {
        let parsed = parse::parse_polynomial(text)?;
        let mut terms = Vec::with_capacity(parsed.len());
        for (coeff, factors) in parsed {
            let c = self.field.from_rational(&coeff)?;
            let mut exps = vec![0u16; self.nvars()];
            for (name, e) in factors {
                let i = self.vars.index_of(&name).ok_or(PolyError::UnknownVariable(name))?;
                exps[i] += e;
            }
            terms.push((Monomial::new(exps), c));
        }
        Ok(Polynomial::from_terms(self, terms))
    }

    pub fn same_ring(&self, other: &PolyRing<F>) -> bool {
        self.order == other.order && (Arc::ptr_eq(&self.vars, &other.vars) || self.vars == other.vars) && self.field == other.field
    }
}

/// Variable names that occur in a polynomial text, in order of appearance.
pub fn variables_in_text(text: &str) -> Result<Vec<String>, PolyError> {
    let mut seen = Vec::new();
    for (_, factors) in parse::parse_polynomial(text)? {
        for (name, _) in factors {
            if !seen.contains(&name) {
                seen.push(name);
            }
        }
    }
    Ok(seen)
}

pub type Term<F> = (Monomial, <F as Field>::Elem);

#[derive(Clone)]
pub struct Polynomial<F: Field> {
    ring: Arc<PolyRing<F>>,
    terms: Vec<Term<F>>,
}

impl<F: Field> PartialEq for Polynomial<F> {
    fn eq(&self, other: &Self) -> bool {
        self.ring.same_ring(&other.ring) && self.terms == other.terms
    }
}

impl<F: Field> Eq for Polynomial<F> {}

impl<F: Field> Polynomial<F> {
    /// Builds a canonical polynomial from arbitrary terms: sorts, merges
    /// equal monomials and drops zeros.
    pub fn from_terms(ring: &Arc<PolyRing<F>>, mut terms: Vec<Term<F>>) -> Self {
        let order = ring.order;
        let field = &ring.field;
        terms.sort_by(|a, b| order.compare(&b.0, &a.0));
        let mut out: Vec<Term<F>> = Vec::with_capacity(terms.len());
        for (m, c) in terms {
            match out.last_mut() {
                Some(last) if last.0 == m => last.1 = field.add(&last.1, &c),
                _ => {
                    if let Some(last) = out.last() {
                        if field.is_zero(&last.1) {
                            out.pop();
                        }
                    }
                    out.push((m, c));
                }
            }
        }
        if out.last().is_some_and(|t| field.is_zero(&t.1)) {
            out.pop();
        }
        Polynomial { ring: ring.clone(), terms: out }
    }

    /// Wraps terms already strictly sorted with nonzero coefficients.
    pub(crate) fn from_sorted_terms(ring: &Arc<PolyRing<F>>, terms: Vec<Term<F>>) -> Self {
        debug_assert!(terms.windows(2).all(|w| ring.order.compare(&w[0].0, &w[1].0) == Ordering::Greater));
        debug_assert!(terms.iter().all(|t| !ring.field.is_zero(&t.1)));
        Polynomial { ring: ring.clone(), terms }
    }

    pub fn ring(&self) -> &Arc<PolyRing<F>> {
        &self.ring
    }

    pub fn field(&self) -> &F {
        &self.ring.field
    }

    pub fn terms(&self) -> &[Term<F>] {
        &self.terms
    }

    pub fn into_terms(self) -> Vec<Term<F>> {
        self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.iter().all(|(m, _)| m.is_one())
    }

    pub fn leading_term(&self) -> Option<&Term<F>> {
        self.terms.first()
    }

    pub fn leading_monomial(&self) -> Option<&Monomial> {
        self.terms.first().map(|t| &t.0)
    }

    pub fn leading_coeff(&self) -> Option<&F::Elem> {
        self.terms.first().map(|t| &t.1)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.iter().map(|(m, _)| m.degree()).max().unwrap_or(0)
    }

    pub fn is_homogeneous(&self) -> bool {
        self.terms.windows(2).all(|w| w[0].0.degree() == w[1].0.degree())
    }

    /// Indices of variables occurring in some term.
    pub fn variables(&self) -> Vec<usize> {
        let mut used = vec![false; self.ring.nvars()];
        for (m, _) in &self.terms {
            for i in m.support() {
                used[i] = true;
            }
        }
        used.iter().enumerate().filter(|(_, &u)| u).map(|(i, _)| i).collect()
    }

    pub fn involves(&self, var: usize) -> bool {
        self.terms.iter().any(|(m, _)| m.exponent(var) > 0)
    }

    fn check(&self, other: &Self) -> Result<(), PolyError> {
        if Arc::ptr_eq(&self.ring, &other.ring) || self.ring.same_ring(&other.ring) {
            Ok(())
        } else {
            Err(PolyError::TableMismatch)
        }
    }

    /// `self + sign * other`, by merging the sorted term lists.
    fn merge(&self, other: &Self, negate: bool) -> Self {
        let field = &self.ring.field;
        let order = self.ring.order;
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.terms, &other.terms);
        while i < a.len() && j < b.len() {
            match order.compare(&a[i].0, &b[j].0) {
                Ordering::Greater => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Less => {
                    let c = if negate { field.neg(&b[j].1) } else { b[j].1.clone() };
                    out.push((b[j].0.clone(), c));
                    j += 1;
                }
                Ordering::Equal => {
                    let c = if negate { field.sub(&a[i].1, &b[j].1) } else { field.add(&a[i].1, &b[j].1) };
                    if !field.is_zero(&c) {
                        out.push((a[i].0.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend(a[i..].iter().cloned());
        out.extend(b[j..].iter().map(|(m, c)| (m.clone(), if negate { field.neg(c) } else { c.clone() })));
        Polynomial { ring: self.ring.clone(), terms: out }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, PolyError> {
        self.check(other)?;
        Ok(self.merge(other, false))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self, PolyError> {
        self.check(other)?;
        Ok(self.merge(other, true))
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self, PolyError> {
        self.check(other)?;
        Ok(self.mul_unchecked(other))
    }

    fn mul_unchecked(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return self.ring.zero();
        }
        let (small, large) = if self.len() <= other.len() { (self, other) } else { (other, self) };
        let mut acc = self.ring.zero();
        for (m, c) in &small.terms {
            acc = acc.merge(&large.mul_term(m, c), false);
        }
        acc
    }

    pub fn neg(&self) -> Self {
        let field = &self.ring.field;
        Polynomial { ring: self.ring.clone(), terms: self.terms.iter().map(|(m, c)| (m.clone(), field.neg(c))).collect() }
    }

    pub fn scale(&self, c: &F::Elem) -> Self {
        let field = &self.ring.field;
        if field.is_zero(c) {
            return self.ring.zero();
        }
        Polynomial { ring: self.ring.clone(), terms: self.terms.iter().map(|(m, a)| (m.clone(), field.mul(a, c))).collect() }
    }

    /// Multiplies by the term `c * m`; order is preserved since monomial
    /// orders are multiplicative.
    pub fn mul_term(&self, m: &Monomial, c: &F::Elem) -> Self {
        let field = &self.ring.field;
        if field.is_zero(c) {
            return self.ring.zero();
        }
        Polynomial {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(t, a)| (t.mul(m), field.mul(a, c))).collect(),
        }
    }

    /// `self - c * m * g` in one merge pass.
    pub(crate) fn sub_mul_term(&self, c: &F::Elem, m: &Monomial, g: &Self) -> Self {
        let field = &self.ring.field;
        let order = self.ring.order;
        let a = &self.terms;
        let mut out = Vec::with_capacity(a.len() + g.terms.len());
        let mut i = 0;
        for (gm, gc) in &g.terms {
            let pm = gm.mul(m);
            let pc = field.mul(gc, c);
            while i < a.len() && order.compare(&a[i].0, &pm) == Ordering::Greater {
                out.push(a[i].clone());
                i += 1;
            }
            if i < a.len() && a[i].0 == pm {
                let v = field.sub(&a[i].1, &pc);
                if !field.is_zero(&v) {
                    out.push((pm, v));
                }
                i += 1;
            } else {
                out.push((pm, field.neg(&pc)));
            }
        }
        out.extend(a[i..].iter().cloned());
        Polynomial { ring: self.ring.clone(), terms: out }
    }

    /// Scales so the leading coefficient is one.
    pub fn monic(&self) -> Self {
        match self.leading_coeff() {
            None => self.clone(),
            Some(c) if self.ring.field.is_one(c) => self.clone(),
            Some(c) => self.scale(&self.ring.field.inv(c).expect("leading coefficient is nonzero")),
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut result = self.ring.one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul_unchecked(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_unchecked(&base);
            }
        }
        result
    }

    /// Exact division by `divisor`; fails unless the remainder is zero.
    pub fn exact_div(&self, divisor: &Self) -> Result<Self, PolyError> {
        self.check(divisor)?;
        let (lm, lc) = divisor.leading_term().ok_or(ArithError::DivisionByZero)?;
        let field = &self.ring.field;
        let lc_inv = field.inv(lc)?;
        let mut rest = self.clone();
        let mut quotient = Vec::new();
        while let Some((m, c)) = rest.leading_term() {
            let q = lm.quotient_of(m).ok_or(PolyError::NotDivisible)?;
            let qc = field.mul(c, &lc_inv);
            rest = rest.sub_mul_term(&qc, &q, divisor);
            quotient.push((q, qc));
        }
        Ok(Polynomial::from_sorted_terms(&self.ring, quotient))
    }

    /// Ring homomorphism given by images of variables (by name). Variables
    /// that do not occur need no image; constants are fixed.
    pub fn apply_homomorphism(
        &self,
        target: &Arc<PolyRing<F>>,
        images: &HashMap<String, Polynomial<F>>,
    ) -> Result<Polynomial<F>, PolyError> {
        if target.field != self.ring.field {
            return Err(PolyError::TableMismatch);
        }
        let vars = self.variables();
        let mut img: Vec<Option<&Polynomial<F>>> = vec![None; self.ring.nvars()];
        for &v in &vars {
            let name = self.ring.vars.name(v);
            let p = images.get(name).ok_or_else(|| PolyError::MissingImage(name.to_string()))?;
            if !p.ring.same_ring(target) {
                return Err(PolyError::TableMismatch);
            }
            img[v] = Some(p);
        }
        let mut powers: HashMap<(usize, u16), Polynomial<F>> = HashMap::new();
        let mut acc = target.zero();
        for (m, c) in &self.terms {
            let mut t = target.constant(c.clone());
            for v in m.support() {
                let e = m.exponent(v);
                let p = powers.entry((v, e)).or_insert_with(|| img[v].expect("image present").pow(e as u32));
                t = t.mul_unchecked(p);
            }
            acc = acc.merge(&t, false);
        }
        Ok(acc)
    }

    /// The same polynomial over another table, matching variables by name.
    pub fn change_ring(&self, target: &Arc<PolyRing<F>>) -> Result<Polynomial<F>, PolyError> {
        if target.field != self.ring.field {
            return Err(PolyError::TableMismatch);
        }
        let mut map = vec![usize::MAX; self.ring.nvars()];
        for v in self.variables() {
            let name = self.ring.vars.name(v);
            map[v] = target.vars.index_of(name).ok_or_else(|| PolyError::UnknownVariable(name.to_string()))?;
        }
        let n = target.nvars();
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| {
                let mut exps = vec![0u16; n];
                for v in m.support() {
                    exps[map[v]] = m.exponent(v);
                }
                (Monomial::new(exps), c.clone())
            })
            .collect();
        Ok(Polynomial::from_terms(target, terms))
    }

    /// Substitutes constants for the named variables, staying in the same ring.
    pub fn substitute(&self, values: &[(usize, F::Elem)]) -> Polynomial<F> {
        let field = &self.ring.field;
        let terms = self
            .terms
            .iter()
            .filter_map(|(m, c)| {
                let mut exps = m.exponents().to_vec();
                let mut coeff = c.clone();
                for (v, val) in values {
                    let e = exps[*v];
                    if e > 0 {
                        for _ in 0..e {
                            coeff = field.mul(&coeff, val);
                        }
                        exps[*v] = 0;
                    }
                }
                (!field.is_zero(&coeff)).then(|| (Monomial::new(exps), coeff))
            })
            .collect();
        Polynomial::from_terms(&self.ring, terms)
    }

    /// Sets every variable except `pi` to zero. For polynomials without
    /// `pi` this is the constant term.
    pub fn evaluate_at_origin(&self) -> Polynomial<F> {
        let pi = self.ring.vars.index_of(PI);
        let terms = self
            .terms
            .iter()
            .filter(|(m, _)| m.support().all(|v| Some(v) == pi))
            .cloned()
            .collect();
        Polynomial::from_sorted_terms(&self.ring, terms)
    }

    pub fn constant_term(&self) -> F::Elem {
        match self.terms.last() {
            Some((m, c)) if m.is_one() => c.clone(),
            _ => self.ring.field.zero(),
        }
    }

    pub fn is_monic(&self) -> bool {
        self.leading_coeff().is_some_and(|c| self.ring.field.is_one(c))
    }
}

fn write_coeff(f: &mut fmt::Formatter<'_>, c: &Rational, first: bool, has_factors: bool) -> fmt::Result {
    let neg = c.is_negative();
    let abs = c.abs();
    if first {
        if neg {
            write!(f, "-")?;
        }
    } else if neg {
        write!(f, " - ")?;
    } else {
        write!(f, " + ")?;
    }
    if !has_factors {
        write!(f, "{abs}")
    } else if abs.is_one() {
        Ok(())
    } else {
        write!(f, "{abs}*")
    }
}

impl<F: Field> fmt::Display for Polynomial<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            let c = self.ring.field.to_rational(c);
            write_coeff(f, &c, k == 0, !m.is_one())?;
            let mut firstf = true;
            for v in m.support() {
                if !firstf {
                    write!(f, "*")?;
                }
                firstf = false;
                write!(f, "{}", self.ring.vars.name(v))?;
                if m.exponent(v) > 1 {
                    write!(f, "^{}", m.exponent(v))?;
                }
            }
        }
        Ok(())
    }
}

impl<F: Field> fmt::Debug for Polynomial<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Polynomial({self})")
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident, $call:ident) => {
        impl<F: Field> std::ops::$tr<&Polynomial<F>> for &Polynomial<F> {
            type Output = Polynomial<F>;
            /// Panics if the operands live in different rings.
            fn $method(self, rhs: &Polynomial<F>) -> Polynomial<F> {
                self.$call(rhs).expect("operands in the same ring")
            }
        }
        impl<F: Field> std::ops::$tr<Polynomial<F>> for Polynomial<F> {
            type Output = Polynomial<F>;
            fn $method(self, rhs: Polynomial<F>) -> Polynomial<F> {
                self.$call(&rhs).expect("operands in the same ring")
            }
        }
    };
}

binop!(Add, add, try_add);
binop!(Sub, sub, try_sub);
binop!(Mul, mul, try_mul);

impl<F: Field> std::ops::Neg for &Polynomial<F> {
    type Output = Polynomial<F>;
    fn neg(self) -> Polynomial<F> {
        Polynomial::neg(self)
    }
}
