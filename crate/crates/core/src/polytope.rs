//! The polytope group of the line, in step-function normal form.
//!
//! A formal sum of half-open intervals, modulo subdivision, is the same thing
//! as a finitely supported integer-valued step function on the reals: the
//! interval `[a, b)` becomes the indicator function with jumps `+1` at `a`
//! and `-1` at `b`. Sums of intervals add pointwise, subdivision relations
//! collapse on the nose, and equality is decidable by comparing sorted jump
//! lists. Jump heights are stored as rationals so that chains over the group
//! ring can scale coefficients; every element built from intervals alone has
//! integer jumps.

use std::sync::Arc;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::rational::Q;
use crate::scalar::{sort_merge_by_value, Scalar, ScalarContext};

/// An element of the polytope group: a finitely supported step function,
/// stored as strictly increasing breakpoints with nonzero jumps summing to 0.
#[derive(Debug, Clone)]
pub struct PtElement {
    ctx: Arc<ScalarContext>,
    steps: Vec<(Scalar, Q)>,
}

impl PartialEq for PtElement {
    fn eq(&self, other: &Self) -> bool {
        self.ctx.id() == other.ctx.id() && self.steps == other.steps
    }
}
impl Eq for PtElement {}

impl PtElement {
    pub fn zero(ctx: &Arc<ScalarContext>) -> Self {
        PtElement {
            ctx: ctx.clone(),
            steps: Vec::new(),
        }
    }

    /// Normalizes a raw jump list: sorts breakpoints, merges duplicates,
    /// drops zero jumps. Fails when the guards cannot order two distinct
    /// breakpoints, or when the jumps do not sum to zero.
    pub fn from_steps(ctx: &Arc<ScalarContext>, steps: Vec<(Scalar, Q)>) -> Result<Self> {
        for (s, _) in &steps {
            if s.context().id() != ctx.id() {
                return Err(Error::ContextMismatch);
            }
        }
        let mut sorted = sort_merge_by_value(steps, |a, b| *a += b)?;
        sorted.retain(|(_, j)| !j.is_zero());
        let total: Q = sorted.iter().map(|(_, j)| j.clone()).sum();
        if !total.is_zero() {
            return Err(Error::InvalidElement(
                "step function jumps do not sum to zero".to_string(),
            ));
        }
        Ok(PtElement {
            ctx: ctx.clone(),
            steps: sorted,
        })
    }

    pub fn context(&self) -> &Arc<ScalarContext> {
        &self.ctx
    }

    pub fn steps(&self) -> &[(Scalar, Q)] {
        &self.steps
    }

    pub fn is_zero(&self) -> bool {
        self.steps.is_empty()
    }
}

/// The indicator of `[a, b)`. Requires `a < b`.
pub fn pt_interval(a: &Scalar, b: &Scalar) -> Result<PtElement> {
    match a.cmp_guarded(b)? {
        std::cmp::Ordering::Less => {}
        _ => return Err(Error::EmptyInterval),
    }
    PtElement::from_steps(
        a.context(),
        vec![
            (a.clone(), Q::from_integer(1.into())),
            (b.clone(), Q::from_integer((-1).into())),
        ],
    )
}

pub fn pt_add(x: &PtElement, y: &PtElement) -> Result<PtElement> {
    if x.ctx.id() != y.ctx.id() {
        return Err(Error::ContextMismatch);
    }
    let mut steps = x.steps.clone();
    steps.extend(y.steps.iter().cloned());
    PtElement::from_steps(&x.ctx, steps)
}

pub fn pt_neg(x: &PtElement) -> PtElement {
    PtElement {
        ctx: x.ctx.clone(),
        steps: x.steps.iter().map(|(s, j)| (s.clone(), -j)).collect(),
    }
}

pub fn pt_scale(r: &Q, x: &PtElement) -> PtElement {
    if r.is_zero() {
        return PtElement::zero(&x.ctx);
    }
    PtElement {
        ctx: x.ctx.clone(),
        steps: x.steps.iter().map(|(s, j)| (s.clone(), j * r)).collect(),
    }
}

/// Translation action: shifts every breakpoint by `t`.
pub fn pt_translate(t: &Scalar, x: &PtElement) -> Result<PtElement> {
    let steps = x
        .steps
        .iter()
        .map(|(s, j)| Ok((s.add(t)?, j.clone())))
        .collect::<Result<Vec<_>>>()?;
    PtElement::from_steps(&x.ctx, steps)
}

/// Total signed length: the integral of the step function. On `[a, b)` this
/// is `b - a`; it is additive and translation-invariant.
pub fn pt_vol(x: &PtElement) -> Result<Scalar> {
    let mut total = Scalar::zero(&x.ctx);
    let mut value = Q::zero();
    for w in x.steps.windows(2) {
        value += &w[0].1;
        let len = w[1].0.sub(&w[0].0)?;
        total = total.add(&len.scale(&value))?;
    }
    Ok(total)
}

/// An element of the group ring of the reals with rational coefficients:
/// a finite formal sum of bracketed points.
#[derive(Debug, Clone)]
pub struct ZRElement {
    ctx: Arc<ScalarContext>,
    terms: Vec<(Scalar, Q)>,
}

impl PartialEq for ZRElement {
    fn eq(&self, other: &Self) -> bool {
        self.ctx.id() == other.ctx.id() && self.terms == other.terms
    }
}
impl Eq for ZRElement {}

impl ZRElement {
    pub fn zero(ctx: &Arc<ScalarContext>) -> Self {
        ZRElement {
            ctx: ctx.clone(),
            terms: Vec::new(),
        }
    }

    /// A single bracket `[r]`.
    pub fn bracket(r: &Scalar) -> Self {
        ZRElement {
            ctx: r.context().clone(),
            terms: vec![(r.clone(), Q::from_integer(1.into()))],
        }
    }

    /// Canonical form: terms sorted by coefficient-vector order (any fixed
    /// total order works; no guards are consulted), zero coefficients
    /// dropped.
    pub fn from_terms(ctx: &Arc<ScalarContext>, terms: Vec<(Scalar, Q)>) -> Result<Self> {
        for (s, _) in &terms {
            if s.context().id() != ctx.id() {
                return Err(Error::ContextMismatch);
            }
        }
        let mut terms = terms;
        terms.sort_by(|a, b| a.0.lex_key().cmp(b.0.lex_key()));
        let mut out: Vec<(Scalar, Q)> = Vec::with_capacity(terms.len());
        for (s, c) in terms {
            match out.last_mut() {
                Some((prev, acc)) if prev == &s => *acc += c,
                _ => out.push((s, c)),
            }
        }
        out.retain(|(_, c)| !c.is_zero());
        Ok(ZRElement {
            ctx: ctx.clone(),
            terms: out,
        })
    }

    pub fn context(&self) -> &Arc<ScalarContext> {
        &self.ctx
    }

    pub fn terms(&self) -> &[(Scalar, Q)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &ZRElement) -> Result<ZRElement> {
        if self.ctx.id() != other.ctx.id() {
            return Err(Error::ContextMismatch);
        }
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        ZRElement::from_terms(&self.ctx, terms)
    }

    pub fn neg(&self) -> ZRElement {
        ZRElement {
            ctx: self.ctx.clone(),
            terms: self.terms.iter().map(|(s, c)| (s.clone(), -c)).collect(),
        }
    }

    pub fn scale(&self, r: &Q) -> ZRElement {
        if r.is_zero() {
            return ZRElement::zero(&self.ctx);
        }
        ZRElement {
            ctx: self.ctx.clone(),
            terms: self.terms.iter().map(|(s, c)| (s.clone(), c * r)).collect(),
        }
    }

    /// Group action: `g · [r] = [g + r]`.
    pub fn translate(&self, g: &Scalar) -> Result<ZRElement> {
        let terms = self
            .terms
            .iter()
            .map(|(s, c)| Ok((s.add(g)?, c.clone())))
            .collect::<Result<Vec<_>>>()?;
        ZRElement::from_terms(&self.ctx, terms)
    }
}

/// Boundary of a polytope element: on generators `[a, b) ↦ [b] - [a]`,
/// which in step form is `-Σ jumpᵢ · [xᵢ]`.
pub fn pt_beta(x: &PtElement) -> ZRElement {
    ZRElement::from_terms(
        &x.ctx,
        x.steps.iter().map(|(s, j)| (s.clone(), -j)).collect(),
    )
    .expect("breakpoints share the element's context")
}

/// Augmentation: the sum of coefficients.
pub fn zr_eps(z: &ZRElement) -> Q {
    z.terms.iter().map(|(_, c)| c.clone()).sum()
}

/// De-bracketing `Σ cᵣ [r] ↦ Σ cᵣ · r`, defined on the kernel of the
/// augmentation (where it is equivariant).
pub fn zr_debracket(z: &ZRElement) -> Result<Scalar> {
    if !zr_eps(z).is_zero() {
        return Err(Error::NotInKernel);
    }
    Ok(zr_debracket_raw(z))
}

/// The raw linear extension of de-bracketing, with no kernel check. Not
/// equivariant off the kernel of the augmentation.
pub fn zr_debracket_raw(z: &ZRElement) -> Scalar {
    let mut acc = Scalar::zero(&z.ctx);
    for (s, c) in &z.terms {
        acc = s.scale(c).add(&acc).expect("single-context element");
    }
    acc
}
