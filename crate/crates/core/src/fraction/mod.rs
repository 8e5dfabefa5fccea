//! Instances as fractions, inference rules, and proofs.

mod proof;
mod rule;

use std::sync::Arc;

use crate::engine::{pushout, SpecMorphism, Specification};
use crate::error::{Error, Result};

pub use proof::{
    check_entailment, run_proof, MatchDirective, ProofOutcome, ProofScript, ProofStep, Verdict,
};
pub use rule::{apply_rule, is_active, InferenceStep, Rule, Templates};
pub(crate) use rule::{is_compound, predicted_fresh_names};

/// A cospan `S --numerator--> S' <--denominator-- S1`, read as an instance
/// `S -> S1` whose denominator is an entailment.
#[derive(Debug, Clone)]
pub struct Fraction {
    pub numerator: SpecMorphism,
    pub denominator: SpecMorphism,
}

impl Fraction {
    pub fn new(numerator: SpecMorphism, denominator: SpecMorphism) -> Result<Self> {
        if *numerator.target != *denominator.target {
            return Err(Error::InvalidMorphism(
                "numerator and denominator must share their target".into(),
            ));
        }
        Ok(Fraction {
            numerator,
            denominator,
        })
    }

    pub fn identity(spec: Arc<Specification>) -> Self {
        let id = SpecMorphism::identity(spec);
        Fraction {
            numerator: id.clone(),
            denominator: id,
        }
    }

    pub fn source(&self) -> &Arc<Specification> {
        &self.numerator.source
    }

    #[allow(clippy::misnamed_getters)]
    pub fn target(&self) -> &Arc<Specification> {
        &self.denominator.source
    }

    pub fn apex(&self) -> &Arc<Specification> {
        &self.numerator.target
    }
}

/// `k2 ∘ k1` for `k1: A -> B` and `k2: B -> C`: the pushout of `k1`'s
/// denominator against `k2`'s numerator.
pub fn compose_fractions(k2: &Fraction, k1: &Fraction) -> Result<Fraction> {
    if **k1.target() != **k2.source() {
        return Err(Error::InvalidMorphism(
            "fractions are not composable".into(),
        ));
    }
    let po = pushout(&k1.denominator, &k2.numerator)?;
    Ok(Fraction {
        numerator: k1.numerator.then(&po.left),
        denominator: k2.denominator.then(&po.right),
    })
}
