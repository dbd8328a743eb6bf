//! Measures on the line and the regulator from viaducts to bar chains.
//!
//! A measure assigns to each interval an element of a module over the
//! translation group, additively under subdivision and equivariantly under
//! translation. Two instances are provided: the volume (valued in the reals
//! with the trivial action) and the universal measure (valued in the
//! polytope group, where an interval maps to its own class).
//!
//! The regulator sends a viaduct with pieces `b_j` and level elements
//! `Φ_{k|j}` to the chain `Σ_j [Φ_{1|j} | … | Φ_{m|j}] ⊗ μ(b_j)`. Since the
//! chain is normalized by merging words, additivity of the measure makes the
//! result literally invariant under viaduct refinement.

use crate::error::Result;
use crate::homology::{BarChain, BarTerm, Coeff, CoeffModule};
use crate::iet::{Iet, Interval};
use crate::polytope::{pt_interval, pt_vol};
use crate::scalar::Scalar;
use crate::spans::{flag_to_viaduct, Viaduct};

/// The two measures used by the engine.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Measure {
    /// Length of the interval, in the reals with trivial action.
    Vol,
    /// The interval's own class in the polytope group.
    Universal,
}

impl Measure {
    pub fn module(&self) -> CoeffModule {
        match self {
            Measure::Vol => CoeffModule::TrivialR,
            Measure::Universal => CoeffModule::Pt,
        }
    }
}

/// Evaluates a measure on an interval.
pub fn measure_eval(measure: Measure, interval: &Interval) -> Result<Coeff> {
    match measure {
        Measure::Vol => Ok(Coeff::R(interval.length())),
        Measure::Universal => Ok(Coeff::Pt(pt_interval(&interval.lo, &interval.hi)?)),
    }
}

/// The regulator of a viaduct: `Σ_j [Φ_{1|j}|…|Φ_{m|j}] ⊗ μ(b_{m|j})`.
pub fn regulator_viaduct(v: &Viaduct, measure: Measure) -> Result<BarChain> {
    let ctx = v.context().clone();
    let m = v.m();
    let mut terms = Vec::with_capacity(v.top().len());
    for (j, piece) in v.top().items() {
        let word: Vec<Scalar> = (1..=m).map(|k| v.level(k)[j].clone()).collect();
        terms.push(BarTerm {
            word,
            coeff: measure_eval(measure, piece)?,
        });
    }
    BarChain::from_terms(&ctx, m, measure.module(), terms)
}

/// The regulator of a flag of interval exchanges: normalize to a viaduct,
/// then apply [`regulator_viaduct`].
pub fn regulator_flag(flags: &[Iet], measure: Measure) -> Result<BarChain> {
    regulator_viaduct(&flag_to_viaduct(flags)?, measure)
}

/// Projects a universal-regulator chain to the volume chain by applying the
/// volume to each coefficient.
pub fn universal_to_vol(chain: &BarChain) -> Result<BarChain> {
    let terms = chain
        .terms()
        .iter()
        .map(|t| {
            let Coeff::Pt(x) = &t.coeff else {
                return Err(crate::error::Error::InvalidElement(
                    "expected polytope coefficients".to_string(),
                ));
            };
            Ok(BarTerm {
                word: t.word.clone(),
                coeff: Coeff::R(pt_vol(x)?),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    BarChain::from_terms(
        chain.context(),
        chain.degree(),
        CoeffModule::TrivialR,
        terms,
    )
}
