//! Named machine checks of the chart claims, with structured reports.
//!
//! Every check reduces to Gröbner-basis ideal membership, equality,
//! quotient or dimension computations. A check reports `pass`, `fail` with
//! a witness, `timeout` with the exhausted budget, or `not-applicable`.

use std::collections::HashMap;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{Field, PrimeField, Rational, Rationals, DEFAULT_MODULUS};
use crate::groebner::{Budget, GbOptions};
use crate::ideal::{pure_power_free, Ideal, IdealError, IdealResult};
use crate::local_model::{var_name, Chart, ChartError, Component, Fiber, LocalModel, Parity};
use crate::poly::{Polynomial, PI};

/// The seven reduction lemmas, by check name.
pub const LEMMAS: [&str; 7] =
    ["X2-in-Iprime", "antisym", "B1JB2-symmetric", "S0-relation", "trace-in-ideal", "A-relations", "minors-reduce"];

/// Component primality is only probed through the leading-term criterion.
pub const PRIMALITY_NOTE: &str =
    "component primality is not decided; only dimension, incomparability and the leading-term regular-element criterion are checked";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    Timeout,
    NotApplicable,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    pub millis: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChartInfo {
    pub d: usize,
    pub l: usize,
    pub case: Parity,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EngineInfo {
    /// `0` for the rationals.
    pub modulus: u64,
    pub order: String,
    pub budgets: Budget,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub chart: ChartInfo,
    pub checks: Vec<CheckResult>,
    pub engine: EngineInfo,
    pub notes: Vec<String>,
}

impl VerificationReport {
    /// At least one check ran and none failed or timed out.
    pub fn passed(&self) -> bool {
        self.checks.iter().any(|c| c.status == Status::Pass)
            && self.checks.iter().all(|c| matches!(c.status, Status::Pass | Status::NotApplicable))
    }

    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> String {
        to_sorted_json(self)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!(
            "chart ({},{}) {} modulus {}\n",
            self.chart.d, self.chart.l, self.chart.case, self.engine.modulus
        );
        for c in &self.checks {
            out.push_str(&format!("CHECK {}: {}", c.name, status_name(c.status).to_uppercase()));
            if let Some(w) = &c.witness {
                out.push_str(&format!(" ({w})"));
            }
            out.push('\n');
        }
        out
    }
}

pub fn status_name(s: Status) -> &'static str {
    match s {
        Status::Pass => "pass",
        Status::Fail => "fail",
        Status::Timeout => "timeout",
        Status::NotApplicable => "not-applicable",
    }
}

/// Pretty JSON with object keys sorted.
pub fn to_sorted_json<T: Serialize>(value: &T) -> String {
    let v = serde_json::to_value(value).expect("report serializes");
    serde_json::to_string_pretty(&v).expect("value prints")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Aggregate {
    Pass,
    Fail,
    NoChecksRun,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub aggregate: Aggregate,
    /// Charts with a failing check, as `(d,l)`.
    pub failing: Vec<String>,
    /// Charts with a check that ran out of budget.
    pub timed_out: Vec<String>,
    pub reports: Vec<VerificationReport>,
}

impl SuiteReport {
    pub fn to_json(&self) -> String {
        to_sorted_json(self)
    }

    pub fn to_text(&self) -> String {
        let mut out: String = self.reports.iter().map(|r| r.to_text()).collect();
        out.push_str(&format!(
            "aggregate: {}\n",
            match self.aggregate {
                Aggregate::Pass => "pass".to_string(),
                Aggregate::Fail => format!("fail {}", self.failing.join(" ")),
                Aggregate::NoChecksRun => "no checks run".to_string(),
            }
        ));
        if !self.timed_out.is_empty() {
            out.push_str(&format!("timed out: {}\n", self.timed_out.join(" ")));
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifierConfig {
    pub gb: GbOptions,
    /// When false every `millis` field is zero, so reports are byte-stable.
    pub record_timings: bool,
    /// Checks over the full ring of `X` only run for `d` up to this bound.
    pub full_ring_max_d: usize,
}

impl Default for VerifierConfig {
    fn default() -> Self {
        VerifierConfig { gb: GbOptions::default(), record_timings: true, full_ring_max_d: 6 }
    }
}

/// Deliberate corruption of one chart ideal, for mutation tests.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tamper {
    /// Replaces `t + π` in the reduced ideal by `π·t`.
    ReducedTraceTimesPi,
    /// Removes `Tr A + 2π` from the full ideal.
    DropTraceA,
    /// Adds the first B variable to the image of the first A variable
    /// under the substitution map.
    PerturbSubstitution,
    /// Drops the last special-fiber component.
    DropComponent,
    /// Replaces the first component by the ideal of all B variables.
    ShrinkComponent,
}

/// Generator families removed from the lemma ideals.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LemmaMutation {
    /// Both `Tr X` and `Tr A + 2π`.
    DropTraces,
    /// Only `Tr X`.
    DropTraceX,
    DropTraceA,
    /// All `2×2` minors of `X`.
    DropMinors,
    /// Minors of the B block mixing a low and a high column.
    DropMixedMinors,
    /// The relation `XᵗG1X + 2(G0 + πG1)X`.
    DropS1,
    /// All minors of the B block.
    DropBMinors,
}

/// The mutation that each lemma check is expected to be sensitive to.
pub fn documented_mutation(lemma: &str) -> Option<LemmaMutation> {
    Some(match lemma {
        "X2-in-Iprime" => LemmaMutation::DropMinors,
        "antisym" => LemmaMutation::DropMinors,
        "B1JB2-symmetric" => LemmaMutation::DropMixedMinors,
        "S0-relation" => LemmaMutation::DropS1,
        "trace-in-ideal" => LemmaMutation::DropS1,
        "A-relations" => LemmaMutation::DropTraceA,
        "minors-reduce" => LemmaMutation::DropBMinors,
        _ => return None,
    })
}

/// One chart with every ideal a check consumes, possibly tampered.
#[derive(Debug, Clone)]
pub struct ChartData<F: Field> {
    pub model: LocalModel<F>,
    pub full: Ideal<F>,
    pub intermediate: Option<Ideal<F>>,
    pub reduced: Ideal<F>,
    pub substitution: HashMap<String, Polynomial<F>>,
    pub components: Vec<Component<F>>,
    pub tampered: Option<Tamper>,
}

impl<F: Field> ChartData<F> {
    pub fn new(model: LocalModel<F>) -> Self {
        ChartData {
            full: model.full_ideal(),
            intermediate: model.intermediate_ideal().ok(),
            reduced: model.reduced_ideal(),
            substitution: model.substitution_map(),
            components: model.components(),
            model,
            tampered: None,
        }
    }

    pub fn build(d: usize, l: usize, field: F) -> Result<Self, ChartError> {
        Ok(ChartData::new(LocalModel::new(Chart::new(d, l)?, field)?))
    }

    pub fn chart(&self) -> &Chart {
        self.model.chart()
    }

    pub fn tamper(mut self, t: Tamper) -> Self {
        let m = &self.model;
        match t {
            Tamper::ReducedTraceTimesPi => {
                let pi = m.reduced_ring().var(PI).expect("pi");
                let mut gens = m.reduced_minors();
                gens.push(&m.trace_quadric(m.reduced_ring()) * &pi);
                self.reduced = Ideal::new(m.reduced_ring(), gens).expect("reduced ring");
            }
            Tamper::DropTraceA => {
                let ta = m.trace_a_generator();
                let gens = self.full.gens().iter().filter(|g| **g != ta).cloned().collect();
                self.full = Ideal::new(m.full_ring(), gens).expect("full ring");
            }
            Tamper::PerturbSubstitution => {
                let (ai, aj) = m.chart().a_variables()[0];
                let (bi, bj) = m.chart().b_variables()[0];
                let key = var_name(ai, aj);
                let bumped = &self.substitution[&key] + &m.b(bi, bj);
                self.substitution.insert(key, bumped);
            }
            Tamper::DropComponent => {
                self.components.pop();
            }
            Tamper::ShrinkComponent => {
                let gens = m.chart().b_variables().iter().map(|&(i, j)| m.fiber_ring().var(&var_name(i, j)).expect("B variable")).collect();
                self.components[0].ideal = Ideal::new(m.fiber_ring(), gens).expect("fiber ring");
            }
        }
        self.tampered = Some(t);
        self
    }
}

/// Component count from the case table: three for EE with `r = 1` or
/// `r = n − 1`, OO with `l = d − 2` and OE with `l = 2`; two otherwise.
pub fn expected_component_count(chart: &Chart) -> usize {
    let three = match chart.parity {
        Parity::EE => chart.r == 1 || chart.r + 1 == chart.n,
        Parity::OO => chart.l + 2 == chart.d,
        Parity::OE => chart.l == 2,
        Parity::EO => false,
    };
    if three {
        3
    } else {
        2
    }
}

type Outcome = IdealResult<Option<String>>;

fn run_check(name: &str, config: &VerifierConfig, f: impl FnOnce() -> Outcome) -> CheckResult {
    let start = Instant::now();
    let outcome = f();
    let millis = if config.record_timings { start.elapsed().as_millis() as u64 } else { 0 };
    let (status, witness) = match outcome {
        Ok(None) => (Status::Pass, None),
        Ok(Some(w)) => (Status::Fail, Some(w)),
        Err(e) if e.is_timeout() => (Status::Timeout, Some(budget_text(&config.gb.budget))),
        Err(e) => (Status::Fail, Some(e.to_string())),
    };
    CheckResult { name: name.to_string(), status, witness, millis }
}

/// The exhausted budget, without measured amounts so the text is stable.
fn budget_text(budget: &Budget) -> String {
    let mut limits = Vec::new();
    if let Some(steps) = budget.max_reductions {
        limits.push(format!("{steps} reduction steps"));
    }
    if let Some(ms) = budget.timeout_ms {
        limits.push(format!("{ms} ms"));
    }
    format!("budget exhausted: {} per Groebner computation", limits.join(" or "))
}

fn not_applicable(name: &str, why: &str) -> CheckResult {
    CheckResult { name: name.to_string(), status: Status::NotApplicable, witness: Some(why.to_string()), millis: 0 }
}

/// The first target outside the ideal, if any.
fn first_outside<F: Field>(ideal: &Ideal<F>, targets: &[Polynomial<F>], opts: &GbOptions) -> Outcome {
    let gb = ideal.groebner(opts)?;
    for t in targets {
        if !gb.contains(t)? {
            return Ok(Some(format!("not in ideal: {t}")));
        }
    }
    Ok(None)
}

fn ideal_of<F: Field>(model: &LocalModel<F>, families: &[&Vec<Polynomial<F>>]) -> IdealResult<Ideal<F>> {
    Ideal::new(model.full_ring(), families.iter().flat_map(|f| f.iter().cloned()).collect())
}

/// Generator families of the lemma ideals.
struct Families<F: Field> {
    minors: Vec<Polynomial<F>>,
    b_minors: Vec<Polynomial<F>>,
    trace_x: Vec<Polynomial<F>>,
    trace_a: Vec<Polynomial<F>>,
    a_rel: Vec<Polynomial<F>>,
    s1: Vec<Polynomial<F>>,
    outer: Vec<Polynomial<F>>,
}

impl<F: Field> Families<F> {
    fn new(model: &LocalModel<F>, mutation: Option<LemmaMutation>) -> Self {
        let chart = model.chart();
        let mut b_minors = Vec::new();
        let rows = chart.z();
        let cols = chart.z_complement();
        let drop_mixed = mutation == Some(LemmaMutation::DropMixedMinors);
        for (p, &i) in rows.iter().enumerate() {
            for &k in &rows[p + 1..] {
                for (q, &c) in cols.iter().enumerate() {
                    for &e in &cols[q + 1..] {
                        let mixed = (c < chart.tau(c)) != (e < chart.tau(e));
                        if drop_mixed && mixed {
                            continue;
                        }
                        b_minors.push(&(&model.x(i, c) * &model.x(k, e)) - &(&model.x(i, e) * &model.x(k, c)));
                    }
                }
            }
        }
        let mut f = Families {
            minors: model.all_minors(),
            b_minors,
            trace_x: vec![model.trace_generator()],
            trace_a: vec![model.trace_a_generator()],
            a_rel: model.a_relation_generators(),
            s1: model.s1_generators(),
            outer: model.outer_relations(),
        };
        match mutation {
            Some(LemmaMutation::DropTraces) => {
                f.trace_x.clear();
                f.trace_a.clear();
            }
            Some(LemmaMutation::DropTraceX) => f.trace_x.clear(),
            Some(LemmaMutation::DropTraceA) => f.trace_a.clear(),
            Some(LemmaMutation::DropMinors) => f.minors.clear(),
            Some(LemmaMutation::DropS1) => f.s1.clear(),
            Some(LemmaMutation::DropBMinors) => f.b_minors.clear(),
            Some(LemmaMutation::DropMixedMinors) | None => {}
        }
        f
    }

    fn intermediate(&self, model: &LocalModel<F>) -> IdealResult<Ideal<F>> {
        ideal_of(model, &[&self.minors, &self.trace_x, &self.trace_a, &self.a_rel, &self.s1])
    }
}

/// `Aᵗ·G1·Y + 2π·G1·Y` for the rows `Y` of `X` indexed by `Z`.
fn a_relation_targets<F: Field>(model: &LocalModel<F>) -> Vec<Polynomial<F>> {
    let c = model.chart();
    let two_pi = &model.full_ring().int(2) * &model.full_ring().var(PI).expect("pi");
    let mut out = Vec::new();
    for &i in c.z() {
        for j in 1..=c.d {
            let mut acc = &two_pi * &model.x(c.sigma(i), j);
            for &a in c.z() {
                acc = &acc + &(&model.x(a, i) * &model.x(c.sigma(a), j));
            }
            out.push(acc);
        }
    }
    out
}

/// `θ_ij − θ_ji` for `θ = B₁ J B₂ᵗ`.
fn theta_asymmetry<F: Field>(model: &LocalModel<F>) -> Vec<Polynomial<F>> {
    let c = model.chart();
    let theta = |i: usize, k: usize| {
        c.z_complement().iter().filter(|&&col| col < c.tau(col)).fold(model.full_ring().zero(), |acc, &col| {
            &acc + &(&model.x(i, col) * &model.x(k, c.tau(col)))
        })
    };
    let mut out = Vec::new();
    for (p, &i) in c.z().iter().enumerate() {
        for &k in &c.z()[p + 1..] {
            out.push(&theta(i, k) - &theta(k, i));
        }
    }
    out
}

fn lemma_outcome<F: Field>(model: &LocalModel<F>, name: &str, mutation: Option<LemmaMutation>, opts: &GbOptions) -> Outcome {
    let f = Families::new(model, mutation);
    match name {
        "X2-in-Iprime" => first_outside(&f.intermediate(model)?, &model.x_squared(), opts),
        "antisym" => first_outside(&f.intermediate(model)?, &model.a_symmetry_generators(), opts),
        "B1JB2-symmetric" => first_outside(&ideal_of(model, &[&f.b_minors])?, &theta_asymmetry(model), opts),
        "S0-relation" => first_outside(&f.intermediate(model)?, &model.s0_relation(), opts),
        "trace-in-ideal" => {
            let ideal = ideal_of(model, &[&f.minors, &f.trace_a, &f.a_rel, &f.s1])?;
            first_outside(&ideal, &[model.trace_generator()], opts)
        }
        "A-relations" => {
            let ideal = ideal_of(model, &[&f.minors, &f.trace_a, &f.a_rel, &f.outer])?;
            first_outside(&ideal, &a_relation_targets(model), opts)
        }
        "minors-reduce" => {
            let ideal = ideal_of(model, &[&f.outer, &f.b_minors, &f.trace_a, &f.a_rel])?;
            first_outside(&ideal, &model.all_minors(), opts)
        }
        other => Ok(Some(format!("unknown lemma {other}"))),
    }
}

fn check_name(lemma: &str) -> String {
    format!("lemma:{lemma}")
}

/// Runs one lemma check, optionally with a generator family removed.
pub fn verify_lemma<F: Field>(
    data: &ChartData<F>,
    name: &str,
    mutation: Option<LemmaMutation>,
    config: &VerifierConfig,
) -> CheckResult {
    let chart = data.chart();
    let label = check_name(name);
    if !LEMMAS.contains(&name) {
        return CheckResult { name: label, status: Status::Fail, witness: Some(format!("unknown lemma {name}")), millis: 0 };
    }
    if !chart.parity.same() {
        return not_applicable(&label, "stated for charts with d and l of the same parity");
    }
    if chart.d > config.full_ring_max_d {
        return not_applicable(&label, &format!("full-ring checks are limited to d <= {}", config.full_ring_max_d));
    }
    run_check(&label, config, || lemma_outcome(&data.model, name, mutation, &config.gb))
}

/// `I = I'` (same parity), `φ(I) ⊆ I''`, `I'' ⊆ I` and `x − φ(x) ∈ I`.
pub fn verify_reduction<F: Field>(data: &ChartData<F>, config: &VerifierConfig) -> CheckResult {
    let chart = data.chart();
    if chart.d > config.full_ring_max_d {
        return not_applicable("reduction", &format!("full-ring checks are limited to d <= {}", config.full_ring_max_d));
    }
    run_check("reduction", config, || {
        let opts = &config.gb;
        let model = &data.model;
        if let Some(ip) = &data.intermediate {
            if let Some((in_first, g)) = data.full.equality_witness(ip, opts)? {
                let side = if in_first { "in I but not in I'" } else { "in I' but not in I" };
                return Ok(Some(format!("(a) {g} is {side}")));
            }
        }
        let gb_reduced = data.reduced.groebner(opts)?;
        for g in data.full.gens() {
            let image = g.apply_homomorphism(model.reduced_ring(), &data.substitution)?;
            if !gb_reduced.contains(&image)? {
                return Ok(Some(format!("(b) image of {g} is not in the reduced ideal")));
            }
        }
        let gb_full = data.full.groebner(opts)?;
        for g in data.reduced.gens() {
            let lifted = g.change_ring(model.full_ring())?;
            if !gb_full.contains(&lifted)? {
                return Ok(Some(format!("(c) {g} is not in I")));
            }
        }
        for name in model.full_ring().vars().names() {
            let v = model.full_ring().var(name)?;
            let image = data.substitution[name].change_ring(model.full_ring())?;
            let diff = &v - &image;
            if !gb_full.contains(&diff)? {
                return Ok(Some(format!("(d) {diff} is not in I")));
            }
        }
        Ok(None)
    })
}

/// Special and generic fibers of the reduced ideal both have dimension `d − 2`.
pub fn verify_dimensions<F: Field>(data: &ChartData<F>, config: &VerifierConfig) -> CheckResult {
    run_check("dimensions", config, || {
        let model = &data.model;
        let expected = data.chart().d - 2;
        let special = model.specialize(&data.reduced, &Fiber::Special).map_err(chart_to_ideal)?;
        let generic = model.specialize(&data.reduced, &Fiber::Generic(Rational::one())).map_err(chart_to_ideal)?;
        let ds = special.krull_dimension(&config.gb)?;
        let dg = generic.krull_dimension(&config.gb)?;
        if ds == expected && dg == expected {
            Ok(None)
        } else {
            Ok(Some(format!("special {ds}, generic {dg}, expected {expected}")))
        }
    })
}

fn chart_to_ideal(e: ChartError) -> IdealError {
    match e {
        ChartError::Poly(p) => IdealError::Poly(p),
        _ => IdealError::EmptyVariety,
    }
}

/// `π` is a nonzerodivisor modulo the reduced ideal: `(I'' : π) = I''`.
pub fn verify_flatness_proxy<F: Field>(data: &ChartData<F>, config: &VerifierConfig) -> CheckResult {
    run_check("flatness", config, || {
        let pi = data.model.reduced_ring().var(PI)?;
        let q = data.reduced.quotient(&pi, &config.gb)?;
        Ok(data.reduced.first_non_member(&q, &config.gb)?.map(|g| format!("{g} lies in (I'' : pi) but not in I''")))
    })
}

/// Decomposition, count, dimensions, incomparability and the leading-term
/// regular-element criterion for the special-fiber components.
pub fn verify_special_fiber<F: Field>(data: &ChartData<F>, config: &VerifierConfig) -> CheckResult {
    run_check("special-fiber", config, || {
        let opts = &config.gb;
        let model = &data.model;
        let chart = data.chart();
        let comps = &data.components;
        let expected = expected_component_count(chart);
        if comps.len() != expected {
            return Ok(Some(format!("(ii) {} components, expected {expected}", comps.len())));
        }
        let special = model.specialize(&data.reduced, &Fiber::Special).map_err(chart_to_ideal)?;
        let ideals: Vec<Ideal<F>> = comps.iter().map(|c| c.ideal.clone()).collect();
        let meet = Ideal::intersect_all(&ideals, opts)?;
        if let Some((in_first, g)) = special.equality_witness(&meet, opts)? {
            let side = if in_first { "in I_s but not in the intersection" } else { "in the intersection but not in I_s" };
            return Ok(Some(format!("(i) {g} is {side}")));
        }
        let dim = chart.d - 2;
        for c in comps {
            match c.ideal.krull_dimension(opts) {
                Ok(k) if k == dim => {}
                Ok(k) => return Ok(Some(format!("(iii) {} has dimension {k}, expected {dim}", c.label))),
                Err(IdealError::EmptyVariety) => return Ok(Some(format!("(iii) {} is the unit ideal", c.label))),
                Err(e) => return Err(e),
            }
        }
        for a in comps {
            for b in comps {
                if a.label != b.label && b.ideal.contains_ideal(&a.ideal, opts)? {
                    return Ok(Some(format!("(iv) {} is contained in {}", a.label, b.label)));
                }
            }
        }
        for c in comps {
            let gb = c.ideal.groebner(opts)?;
            let v = model.fiber_ring().vars().index_of(&c.designated).ok_or_else(|| {
                IdealError::Poly(crate::poly::PolyError::UnknownVariable(c.designated.clone()))
            })?;
            if !pure_power_free(&gb, v) {
                return Ok(Some(format!("(v) a basis element of {} has a pure power of {}", c.label, c.designated)));
            }
        }
        Ok(None)
    })
}

fn engine_info<F: Field>(data: &ChartData<F>, config: &VerifierConfig) -> EngineInfo {
    EngineInfo {
        modulus: data.model.full_ring().field().tag().modulus(),
        order: format!("full: {}, reduced: grlex", data.model.full_ring().order().name()),
        budgets: config.gb.budget,
    }
}

/// Every applicable check for one chart, sorted by check name.
pub fn verify_chart<F: Field>(data: &ChartData<F>, config: &VerifierConfig) -> VerificationReport {
    let chart = data.chart();
    let mut checks = vec![
        verify_reduction(data, config),
        verify_dimensions(data, config),
        verify_flatness_proxy(data, config),
        verify_special_fiber(data, config),
    ];
    for name in LEMMAS {
        checks.push(verify_lemma(data, name, None, config));
    }
    checks.sort_by(|a, b| a.name.cmp(&b.name));
    VerificationReport {
        chart: ChartInfo { d: chart.d, l: chart.l, case: chart.parity },
        checks,
        engine: engine_info(data, config),
        notes: vec![PRIMALITY_NOTE.to_string()],
    }
}

/// Runs every chart (concurrently) and aggregates; the output order is by
/// `(d, l)` so reports are deterministic.
pub fn run_suite_on<F: Field>(charts: Vec<ChartData<F>>, config: &VerifierConfig) -> SuiteReport {
    let mut reports: Vec<VerificationReport> = charts.par_iter().map(|c| verify_chart(c, config)).collect();
    reports.sort_by_key(|r| (r.chart.d, r.chart.l));
    let id = |r: &VerificationReport| format!("({},{})", r.chart.d, r.chart.l);
    let failing: Vec<String> =
        reports.iter().filter(|r| r.checks.iter().any(|c| c.status == Status::Fail)).map(id).collect();
    let timed_out: Vec<String> =
        reports.iter().filter(|r| r.checks.iter().any(|c| c.status == Status::Timeout)).map(id).collect();
    let aggregate = if reports.iter().all(|r| r.checks.iter().all(|c| c.status == Status::NotApplicable)) {
        Aggregate::NoChecksRun
    } else if reports.iter().all(|r| r.passed()) {
        Aggregate::Pass
    } else {
        Aggregate::Fail
    };
    SuiteReport { aggregate, failing, timed_out, reports }
}

/// Builds and verifies the given charts over `F_p` (`modulus > 0`) or the
/// rationals (`modulus == 0`).
pub fn run_suite(charts: &[(usize, usize)], modulus: u64, config: &VerifierConfig) -> Result<SuiteReport, ChartError> {
    if modulus == 0 {
        let data = charts.iter().map(|&(d, l)| ChartData::build(d, l, Rationals)).collect::<Result<Vec<_>, _>>()?;
        Ok(run_suite_on(data, config))
    } else {
        let field = PrimeField::new(modulus).map_err(|_| ChartError::InvalidChart { d: 0, l: 0 })?;
        let data = charts.iter().map(|&(d, l)| ChartData::build(d, l, field.clone())).collect::<Result<Vec<_>, _>>()?;
        Ok(run_suite_on(data, config))
    }
}

/// The default suite: one chart per parity case.
pub const DEFAULT_SUITE: [(usize, usize); 4] = [(6, 2), (5, 3), (6, 3), (5, 2)];

/// Verifies a chart over `F_p` with the default modulus and over the
/// rationals, and reports a `field-agreement` check that fails when the two
/// runs disagree on any status.
pub fn cross_check(d: usize, l: usize, config: &VerifierConfig) -> Result<(VerificationReport, VerificationReport, CheckResult), ChartError> {
    let modular = verify_chart(&ChartData::build(d, l, PrimeField::new(DEFAULT_MODULUS).expect("prime"))?, config);
    let rational = verify_chart(&ChartData::build(d, l, Rationals)?, config);
    let mut disagreements = Vec::new();
    for (a, b) in modular.checks.iter().zip(&rational.checks) {
        if a.status != b.status {
            disagreements.push(format!(
                "{}: F_p {} ({}) vs Q {} ({})",
                a.name,
                status_name(a.status),
                a.witness.as_deref().unwrap_or("-"),
                status_name(b.status),
                b.witness.as_deref().unwrap_or("-")
            ));
        }
    }
    let agreement = CheckResult {
        name: "field-agreement".into(),
        status: if disagreements.is_empty() { Status::Pass } else { Status::Fail },
        witness: (!disagreements.is_empty()).then(|| disagreements.join("; ")),
        millis: 0,
    };
    Ok((modular, rational, agreement))
}
