//! Betting reading of a compound conditional.
//!
//! The gambler pays an amount up front and receives `X_t(w)` in world `w`.
//! The bookmaker's balance is `G(w) = paid − X_t(w)`; outside the antecedent
//! disjunction of `t` the bet is called off and `G(w) = 0`. Paying exactly the
//! prevision of `t` is the only amount for which the conditional prevision of
//! `G` vanishes.

use num_traits::Zero;

use crate::event::Event;
use crate::prevision::{PrevisionEngine, PrevisionError, RandomQuantity};
use crate::rational::Rational;
use crate::term::CondTerm;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BetReport {
    pub term: CondTerm,
    pub antecedent: Event,
    pub prevision: Rational,
    pub paid: Rational,
    pub payout: RandomQuantity,
    pub gains: RandomQuantity,
    pub gain_prevision: Rational,
}

impl BetReport {
    /// The bet is fair when the expected balance given the antecedents is zero.
    pub fn is_fair(&self) -> bool {
        self.gain_prevision.is_zero()
    }
}

/// Bet at the coherent price `P*(t)`.
pub fn bet(engine: &PrevisionEngine, t: &CondTerm) -> Result<BetReport, PrevisionError> {
    bet_perturbed(engine, t, &Rational::zero())
}

/// Bet at `P*(t) + epsilon`.
pub fn bet_perturbed(engine: &PrevisionEngine, t: &CondTerm, epsilon: &Rational) -> Result<BetReport, PrevisionError> {
    let (payout, prevision) = engine.evaluate(t)?;
    let space = engine.space();
    let antecedent = t.clone().simplify().antecedent_disjunction(space);
    let paid = &prevision + epsilon;
    let gains: Vec<Rational> = payout
        .values()
        .iter()
        .enumerate()
        .map(|(w, x)| if antecedent.has(w) { &paid - x } else { Rational::zero() })
        .collect();
    let gains = RandomQuantity::new(space, gains);
    let gain_prevision = engine.conditional_prevision(&gains, &antecedent)?;
    Ok(BetReport { term: t.clone(), antecedent, prevision, paid, payout, gains, gain_prevision })
}
