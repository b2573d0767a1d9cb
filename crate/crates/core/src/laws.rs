//! Randomized law suites over random terms and probabilities.
//!
//! Every law is an exact rational identity. A run is fully determined by its
//! configuration, so two runs with the same seed report the same thing.

use std::fmt::Write as _;

use num_traits::{One, Zero};
use rand::Rng;
use thiserror::Error;

use crate::algebra::{AlgebraError, ConditionalAlgebra};
use crate::betting;
use crate::event::{Event, WorldSpace};
use crate::prevision::{PrevisionEngine, PrevisionError, RandomQuantity};
use crate::rational::{self, Rational};
use crate::sample::Sampler;
use crate::term::CondTerm;

#[derive(Debug, Error)]
pub enum LawError {
    #[error(transparent)]
    Prevision(#[from] PrevisionError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

#[derive(Debug, Clone)]
pub struct LawConfig {
    pub seed: u64,
    pub cases: usize,
    pub depth: usize,
    /// Fixed world space; when absent each case draws between 1 and 4 worlds.
    pub space: Option<WorldSpace>,
    pub atom_limit: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LawResult {
    pub name: &'static str,
    pub group: &'static str,
    pub checked: usize,
    pub failed: usize,
    pub first_failure: Option<String>,
}

impl LawResult {
    pub fn passed(&self) -> bool {
        self.failed == 0
    }
}

struct Case {
    space: WorldSpace,
    engine: PrevisionEngine,
    layered: PrevisionEngine,
    algebra: ConditionalAlgebra,
    t: CondTerm,
    s: CondTerm,
    r: CondTerm,
    a: Event,
    b: Event,
    c: Event,
}

impl Case {
    fn x(&self, t: &CondTerm) -> Result<RandomQuantity, LawError> {
        Ok(self.engine.random_quantity(t)?)
    }

    /// Previsions under the positive and the layered probability.
    fn p(&self, t: &CondTerm) -> Result<[Rational; 2], LawError> {
        Ok([self.engine.prevision(t)?, self.layered.prevision(t)?])
    }

    fn basic(&self, a: Event, b: Event) -> CondTerm {
        CondTerm::basic(a, b).expect("nonempty antecedent")
    }

    fn describe_terms(&self) -> String {
        format!("n={} t={} s={} r={}", self.space.len(), self.t, self.s, self.r)
    }

    fn describe_events(&self) -> String {
        format!("n={} a={} b={} c={}", self.space.len(), self.a, self.b, self.c)
    }
}

type Check = fn(&Case) -> Result<Option<String>, LawError>;

fn same_x(case: &Case, lhs: &CondTerm, rhs: &CondTerm) -> Result<Option<String>, LawError> {
    let (x, y) = (case.x(lhs)?, case.x(rhs)?);
    Ok((x != y).then(|| format!("X differ for {} vs {} ({})", lhs, rhs, case.describe_terms())))
}

fn same_r(case: &Case, lhs: Rational, rhs: Rational) -> Option<String> {
    (lhs != rhs).then(|| {
        format!("{} != {} ({})", rational::format(&lhs), rational::format(&rhs), case.describe_terms())
    })
}

fn same_p(case: &Case, lhs: [Rational; 2], rhs: [Rational; 2]) -> Option<String> {
    lhs.into_iter().zip(rhs).find_map(|(l, r)| same_r(case, l, r))
}

fn both(r: Rational) -> [Rational; 2] {
    [r.clone(), r]
}

fn add(x: [Rational; 2], y: [Rational; 2]) -> [Rational; 2] {
    let [x0, x1] = x;
    let [y0, y1] = y;
    [x0 + y0, x1 + y1]
}

fn sub(x: [Rational; 2], y: [Rational; 2]) -> [Rational; 2] {
    let [x0, x1] = x;
    let [y0, y1] = y;
    [x0 - y0, x1 - y1]
}

const LAWS: &[(&str, &str, Check)] = &[
    ("boolean", "idempotence", |c| same_x(c, &c.t.clone().and(c.t.clone()), &c.t)),
    ("boolean", "commutativity", |c| same_x(c, &c.t.clone().and(c.s.clone()), &c.s.clone().and(c.t.clone()))),
    ("boolean", "associativity", |c| {
        same_x(c, &c.t.clone().and(c.s.clone().and(c.r.clone())), &c.t.clone().and(c.s.clone()).and(c.r.clone()))
    }),
    ("boolean", "contradiction", |c| {
        let x = c.x(&c.t.clone().and(c.t.clone().not()))?;
        Ok((!x.is_constant(&Rational::zero())).then(|| format!("X(t & ~t) != 0 ({})", c.describe_terms())))
    }),
    ("boolean", "de-morgan", |c| {
        same_x(c, &c.t.clone().and(c.s.clone()).not(), &c.t.clone().not().or(c.s.clone().not()))
    }),
    ("boolean", "distributivity", |c| {
        let lhs = c.t.clone().and(c.s.clone().or(c.r.clone()));
        let rhs = c.t.clone().and(c.s.clone()).or(c.t.clone().and(c.r.clone()));
        same_x(c, &lhs, &rhs)
    }),
    ("boolean", "inclusion-exclusion", |c| {
        let lhs = c.x(&c.t.clone().or(c.s.clone()))?;
        let rhs = c.x(&c.t)?.plus(&c.x(&c.s)?).minus(&c.x(&c.t.clone().and(c.s.clone()))?);
        Ok((lhs != rhs).then(|| format!("X(t v s) != X(t) + X(s) - X(t & s) ({})", c.describe_terms())))
    }),
    ("boolean", "negation", |c| {
        let xt = c.x(&c.t)?;
        if c.x(&c.t.clone().not())? != xt.complement() {
            return Ok(Some(format!("X(~t) != 1 - X(t) ({})", c.describe_terms())));
        }
        same_x(c, &c.t.clone().not().not(), &c.t)
    }),
    ("boolean", "antecedent-widening", |c| {
        let a = c.a.conj(&c.b).expect("same space");
        let wide = c.b.disj(&c.c).expect("same space");
        same_x(c, &c.basic(a, c.b).and(c.basic(a, wide)), &c.basic(a, wide))
    }),
    ("conditional", "self-conditional", |c| {
        let x = c.x(&c.basic(c.b, c.b))?;
        Ok((!x.is_constant(&Rational::one())).then(|| format!("X([b|b]) != 1 ({})", c.describe_events())))
    }),
    ("conditional", "common-antecedent", |c| {
        let ac = c.a.conj(&c.c).expect("same space");
        same_x(c, &c.basic(c.a, c.b).and(c.basic(c.c, c.b)), &c.basic(ac, c.b))
    }),
    ("conditional", "negated-consequent", |c| {
        same_x(c, &c.basic(c.a, c.b).not(), &c.basic(c.a.neg(&c.space).expect("same space"), c.b))
    }),
    ("conditional", "consequent-restriction", |c| {
        same_x(c, &c.basic(c.a.conj(&c.b).expect("same space"), c.b), &c.basic(c.a, c.b))
    }),
    ("conditional", "chaining", |c| {
        // a ≤ b ≤ d with b, d nonempty
        let d = c.b.disj(&c.c).expect("same space");
        let b = c.b;
        let a = c.a.conj(&b).expect("same space");
        if let Some(msg) = same_x(c, &c.basic(a, b).and(c.basic(b, d)), &c.basic(a, d))? {
            return Ok(Some(msg));
        }
        let cp = c.engine.cp();
        let lhs = cp.cond_prob(&a, &d).expect("nonempty");
        let rhs = cp.cond_prob(&a, &b).expect("nonempty") * cp.cond_prob(&b, &d).expect("nonempty");
        Ok(same_r(c, lhs, rhs))
    }),
    ("conditional", "order-widening", |c| {
        let a = c.a.conj(&c.b).expect("same space");
        let narrow = c.basic(a, c.b);
        let wide = c.basic(a, c.b.disj(&c.c).expect("same space"));
        if !c.algebra.leq_term(&wide, &narrow)? {
            return Ok(Some(format!("[a|b v c] not below [a|b] ({})", c.describe_events())));
        }
        same_x(c, &wide.clone().and(narrow), &wide)
    }),
    ("probability", "p-idempotence", |c| Ok(same_p(c, c.p(&c.t)?, c.p(&c.t.clone().and(c.t.clone()))?))),
    ("probability", "p-commutativity", |c| {
        Ok(same_p(c, c.p(&c.t.clone().and(c.s.clone()))?, c.p(&c.s.clone().and(c.t.clone()))?))
    }),
    ("probability", "p-associativity", |c| {
        let lhs = c.p(&c.t.clone().and(c.s.clone().and(c.r.clone())))?;
        let rhs = c.p(&c.t.clone().and(c.s.clone()).and(c.r.clone()))?;
        Ok(same_p(c, lhs, rhs))
    }),
    ("probability", "p-contradiction", |c| {
        Ok(same_p(c, c.p(&c.t.clone().and(c.t.clone().not()))?, both(Rational::zero())))
    }),
    ("probability", "p-de-morgan", |c| {
        let lhs = c.p(&c.t.clone().and(c.s.clone()).not())?;
        let rhs = c.p(&c.t.clone().not().or(c.s.clone().not()))?;
        Ok(same_p(c, lhs, rhs))
    }),
    ("probability", "p-distributivity", |c| {
        let lhs = c.p(&c.t.clone().and(c.s.clone().or(c.r.clone())))?;
        let rhs = c.p(&c.t.clone().and(c.s.clone()).or(c.t.clone().and(c.r.clone())))?;
        Ok(same_p(c, lhs, rhs))
    }),
    ("probability", "p-sure", |c| {
        for t in [c.t.clone(), c.t.clone().or(c.t.clone().not())] {
            if c.x(&t)?.is_constant(&Rational::one()) {
                if let Some(msg) = same_p(c, c.p(&t)?, both(Rational::one())) {
                    return Ok(Some(msg));
                }
            }
        }
        Ok(None)
    }),
    ("probability", "p-impossible", |c| {
        for t in [c.t.clone(), c.t.clone().and(c.t.clone().not())] {
            if c.x(&t)?.is_constant(&Rational::zero()) {
                if let Some(msg) = same_p(c, c.p(&t)?, both(Rational::zero())) {
                    return Ok(Some(msg));
                }
            }
        }
        Ok(None)
    }),
    ("probability", "p-inclusion-exclusion", |c| {
        let lhs = c.p(&c.t.clone().or(c.s.clone()))?;
        let rhs = sub(add(c.p(&c.t)?, c.p(&c.s)?), c.p(&c.t.clone().and(c.s.clone()))?);
        Ok(same_p(c, lhs, rhs))
    }),
    ("probability", "p-negation", |c| {
        Ok(same_p(c, add(c.p(&c.t.clone().not())?, c.p(&c.t)?), both(Rational::one())))
    }),
    ("probability", "unconditional-prevision", |c| {
        let (x, p) = c.engine.evaluate(&c.t)?;
        Ok(same_r(c, c.engine.unconditional_prevision(&x)?, p))
    }),
    ("probability", "unit-range", |c| {
        let ok = [&c.t, &c.s, &c.r].iter().map(|t| c.x(t)).collect::<Result<Vec<_>, _>>()?;
        Ok((!ok.iter().all(RandomQuantity::in_unit_interval)).then(|| format!("value outside [0,1] ({})", c.describe_terms())))
    }),
    ("atoms", "canonical-measure", |c| {
        Ok(same_r(c, c.engine.prevision(&c.t)?, c.algebra.mu_p(&c.t, c.engine.cp())?))
    }),
    ("atoms", "homomorphism", |c| {
        let (x, y) = (c.algebra.atom_set(&c.t)?, c.algebra.atom_set(&c.s)?);
        let ok = c.algebra.atom_set(&c.t.clone().not())? == x.complement()
            && c.algebra.atom_set(&c.t.clone().and(c.s.clone()))? == x.intersection(&y)
            && c.algebra.atom_set(&c.t.clone().or(c.s.clone()))? == x.union(&y);
        Ok((!ok).then(|| format!("atom sets not homomorphic ({})", c.describe_terms())))
    }),
    ("atoms", "order-criterion", |c| {
        let symbolic = c.algebra.leq_term(&c.t, &c.s)?;
        let numeric = c.x(&c.t.clone().and(c.s.clone()))? == c.x(&c.t)?;
        // the numeric criterion holds under every P exactly when the symbolic one does;
        // one sampled P can only refute the symbolic side
        Ok((symbolic && !numeric).then(|| format!("t <= s symbolically but X(t & s) != X(t) ({})", c.describe_terms())))
    }),
    ("betting", "zero-gain", |c| {
        for engine in [&c.engine, &c.layered] {
            let report = betting::bet(engine, &c.t)?;
            if !report.is_fair() {
                return Ok(Some(format!(
                    "gain prevision {} ({})",
                    rational::format(&report.gain_prevision),
                    c.describe_terms()
                )));
            }
        }
        Ok(None)
    }),
];

pub fn run_laws(cfg: &LawConfig) -> Result<Vec<LawResult>, LawError> {
    let mut sampler = Sampler::new(cfg.seed);
    let mut results: Vec<LawResult> = LAWS
        .iter()
        .map(|(group, name, _)| LawResult { name, group, checked: 0, failed: 0, first_failure: None })
        .collect();
    let fixed_algebra = match &cfg.space {
        Some(space) => Some(ConditionalAlgebra::new(space, cfg.atom_limit)?),
        None => None,
    };

    for i in 0..cfg.cases {
        let (space, algebra) = match &fixed_algebra {
            Some(alg) => (alg.space().clone(), alg.clone()),
            None => {
                let n = sampler.rng().gen_range(1..=4);
                let space = WorldSpace::numbered(n).expect("small space");
                let alg = ConditionalAlgebra::new(&space, cfg.atom_limit)?;
                (space, alg)
            }
        };
        let engine = PrevisionEngine::new(sampler.positive_cp(&space));
        let layered = PrevisionEngine::new(sampler.layered_cp(&space, 3));
        let (t, s, r) = (sampler.term(&space, cfg.depth), sampler.term(&space, cfg.depth), sampler.term(&space, cfg.depth));
        let (a, b, c) = (sampler.event(&space), sampler.nonempty_event(&space), sampler.event(&space));
        let case = Case { space, engine, layered, algebra, t, s, r, a, b, c };

        for (result, (_, _, check)) in results.iter_mut().zip(LAWS) {
            result.checked += 1;
            if let Some(msg) = check(&case)? {
                result.failed += 1;
                if result.first_failure.is_none() {
                    result.first_failure = Some(format!("case {i}: {msg}"));
                }
            }
        }
    }
    Ok(results)
}

/// Plain-text report, one line per law plus a summary line.
pub fn render_text(cfg: &LawConfig, results: &[LawResult]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "seed {} cases {} depth {}", cfg.seed, cfg.cases, cfg.depth);
    for r in results {
        let status = if r.passed() { "PASS" } else { "FAIL" };
        let _ = writeln!(out, "{status} {:<12} {:<24} {}/{}", r.group, r.name, r.checked - r.failed, r.checked);
        if let Some(f) = &r.first_failure {
            let _ = writeln!(out, "     first failure: {f}");
        }
    }
    let failed = results.iter().filter(|r| !r.passed()).count();
    let _ = writeln!(out, "{} laws, {} failed", results.len(), failed);
    out
}
