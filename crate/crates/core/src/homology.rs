//! Bar-complex chains for the translation group, with module coefficients.
//!
//! A degree-`p` chain is a rational combination of words `[g₁|…|g_p] ⊗ a`
//! where the `gᵢ` are scalars (group elements of the translation group,
//! written additively) and `a` lives in one of three coefficient modules:
//! the reals with the trivial action, the group ring of the reals with the
//! shift action, or the polytope group with the translation action.
//!
//! The differential is the standard alternating face sum
//!
//! ```text
//! d[g₁|…|g_p]⊗a = [g₂|…|g_p]⊗a
//!               + Σᵢ (-1)ⁱ [g₁|…|gᵢ+gᵢ₊₁|…|g_p]⊗a
//!               + (-1)ᵖ [g₁|…|g_{p-1}]⊗(g_p·a)
//! ```
//!
//! Words may contain the zero scalar; no degeneracy quotient is applied.
//! Chains are normalized by merging terms with equal words, summing the
//! module coefficients, so equality is structural.
//!
//! Homology classes of cycles with trivial real coefficients are extracted
//! into [`WedgeClass`]: elements of `Λᵖ(V) ⊗ V` over the rationals, expanded
//! and canonicalized over the context basis.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::polytope::{pt_translate, zr_debracket, zr_eps, PtElement, ZRElement};
use crate::rational::{format_q, Q};
use crate::scalar::{Scalar, ScalarContext};

/// Which coefficient module a chain lives over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoeffModule {
    /// The reals with the trivial action.
    TrivialR,
    /// The group ring of the reals with the shift action.
    ZR,
    /// The polytope group with the translation action.
    Pt,
}

impl CoeffModule {
    pub fn tag(&self) -> &'static str {
        match self {
            CoeffModule::TrivialR => "R",
            CoeffModule::ZR => "ZR",
            CoeffModule::Pt => "PT",
        }
    }
}

/// A module coefficient.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Coeff {
    R(Scalar),
    ZR(ZRElement),
    Pt(PtElement),
}

impl Coeff {
    pub fn module(&self) -> CoeffModule {
        match self {
            Coeff::R(_) => CoeffModule::TrivialR,
            Coeff::ZR(_) => CoeffModule::ZR,
            Coeff::Pt(_) => CoeffModule::Pt,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Coeff::R(s) => s.is_zero(),
            Coeff::ZR(z) => z.is_zero(),
            Coeff::Pt(x) => x.is_zero(),
        }
    }

    fn add(&self, other: &Coeff) -> Result<Coeff> {
        match (self, other) {
            (Coeff::R(a), Coeff::R(b)) => Ok(Coeff::R(a.add(b)?)),
            (Coeff::ZR(a), Coeff::ZR(b)) => Ok(Coeff::ZR(a.add(b)?)),
            (Coeff::Pt(a), Coeff::Pt(b)) => Ok(Coeff::Pt(crate::polytope::pt_add(a, b)?)),
            _ => Err(Error::InvalidElement(
                "mixed coefficient modules in one chain".to_string(),
            )),
        }
    }

    fn scale(&self, r: &Q) -> Coeff {
        match self {
            Coeff::R(s) => Coeff::R(s.scale(r)),
            Coeff::ZR(z) => Coeff::ZR(z.scale(r)),
            Coeff::Pt(x) => Coeff::Pt(crate::polytope::pt_scale(r, x)),
        }
    }

    /// The group action `g · a`.
    fn act(&self, g: &Scalar) -> Result<Coeff> {
        match self {
            Coeff::R(s) => Ok(Coeff::R(s.clone())),
            Coeff::ZR(z) => Ok(Coeff::ZR(z.translate(g)?)),
            Coeff::Pt(x) => Ok(Coeff::Pt(pt_translate(g, x)?)),
        }
    }
}

/// One normalized term `[g₁|…|g_p] ⊗ a`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BarTerm {
    pub word: Vec<Scalar>,
    pub coeff: Coeff,
}

fn cmp_words(a: &[Scalar], b: &[Scalar]) -> std::cmp::Ordering {
    a.len().cmp(&b.len()).then_with(|| {
        for (x, y) in a.iter().zip(b) {
            let ord = x.lex_key().cmp(y.lex_key());
            if ord != std::cmp::Ordering::Equal {
                return ord;
            }
        }
        std::cmp::Ordering::Equal
    })
}

/// A normalized bar chain of fixed degree over one coefficient module.
#[derive(Debug, Clone)]
pub struct BarChain {
    ctx: Arc<ScalarContext>,
    degree: usize,
    module: CoeffModule,
    terms: Vec<BarTerm>,
}

impl PartialEq for BarChain {
    fn eq(&self, other: &Self) -> bool {
        self.ctx.id() == other.ctx.id()
            && self.degree == other.degree
            && self.module == other.module
            && self.terms == other.terms
    }
}
impl Eq for BarChain {}

impl fmt::Display for BarChain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "[")?;
            for (k, g) in t.word.iter().enumerate() {
                if k > 0 {
                    write!(f, "|")?;
                }
                write!(f, "{g}")?;
            }
            write!(f, "]⊗")?;
            match &t.coeff {
                Coeff::R(s) => write!(f, "({s})")?,
                Coeff::ZR(z) => {
                    write!(f, "(")?;
                    for (j, (s, c)) in z.terms().iter().enumerate() {
                        if j > 0 {
                            write!(f, " + ")?;
                        }
                        write!(f, "{}[{}]", format_q(c), s)?;
                    }
                    write!(f, ")")?;
                }
                Coeff::Pt(x) => write!(f, "(pt:{} steps)", x.steps().len())?,
            }
        }
        Ok(())
    }
}

impl BarChain {
    pub fn zero(ctx: &Arc<ScalarContext>, degree: usize, module: CoeffModule) -> Self {
        BarChain {
            ctx: ctx.clone(),
            degree,
            module,
            terms: Vec::new(),
        }
    }

    /// Normalizes a raw term list: merges equal words, drops zero
    /// coefficients, orders terms canonically.
    pub fn from_terms(
        ctx: &Arc<ScalarContext>,
        degree: usize,
        module: CoeffModule,
        terms: Vec<BarTerm>,
    ) -> Result<Self> {
        let mut terms = terms;
        for t in &terms {
            if t.word.len() != degree {
                return Err(Error::InvalidElement(format!(
                    "word of length {} in a degree-{} chain",
                    t.word.len(),
                    degree
                )));
            }
            if t.coeff.module() != module {
                return Err(Error::InvalidElement(
                    "coefficient from the wrong module".to_string(),
                ));
            }
            for g in &t.word {
                if g.context().id() != ctx.id() {
                    return Err(Error::ContextMismatch);
                }
            }
        }
        terms.sort_by(|a, b| cmp_words(&a.word, &b.word));
        let mut out: Vec<BarTerm> = Vec::with_capacity(terms.len());
        for t in terms {
            match out.last_mut() {
                Some(prev) if cmp_words(&prev.word, &t.word) == std::cmp::Ordering::Equal => {
                    prev.coeff = prev.coeff.add(&t.coeff)?;
                }
                _ => out.push(t),
            }
        }
        out.retain(|t| !t.coeff.is_zero());
        Ok(BarChain {
            ctx: ctx.clone(),
            degree,
            module,
            terms: out,
        })
    }

    pub fn context(&self) -> &Arc<ScalarContext> {
        &self.ctx
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn module(&self) -> CoeffModule {
        self.module
    }

    pub fn terms(&self) -> &[BarTerm] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &BarChain) -> Result<BarChain> {
        if self.degree != other.degree || self.module != other.module {
            return Err(Error::InvalidElement(
                "adding chains of different shape".to_string(),
            ));
        }
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        BarChain::from_terms(&self.ctx, self.degree, self.module, terms)
    }

    pub fn scale(&self, r: &Q) -> BarChain {
        if r.is_zero() {
            return BarChain::zero(&self.ctx, self.degree, self.module);
        }
        BarChain {
            ctx: self.ctx.clone(),
            degree: self.degree,
            module: self.module,
            terms: self
                .terms
                .iter()
                .map(|t| BarTerm {
                    word: t.word.clone(),
                    coeff: t.coeff.scale(r),
                })
                .collect(),
        }
    }

    pub fn neg(&self) -> BarChain {
        self.scale(&-Q::one())
    }
}

/// The `i`-th face of a term, `0 <= i <= p`.
fn face_term(term: &BarTerm, i: usize) -> Result<BarTerm> {
    let p = term.word.len();
    assert!(i <= p, "face index out of range");
    if i == 0 {
        Ok(BarTerm {
            word: term.word[1..].to_vec(),
            coeff: term.coeff.clone(),
        })
    } else if i == p {
        let g = &term.word[p - 1];
        Ok(BarTerm {
            word: term.word[..p - 1].to_vec(),
            coeff: term.coeff.act(g)?,
        })
    } else {
        let mut word = Vec::with_capacity(p - 1);
        word.extend_from_slice(&term.word[..i - 1]);
        word.push(term.word[i - 1].add(&term.word[i])?);
        word.extend_from_slice(&term.word[i + 1..]);
        Ok(BarTerm {
            word,
            coeff: term.coeff.clone(),
        })
    }
}

/// The `i`-th simplicial face of a chain (no sign).
pub fn bar_face(c: &BarChain, i: usize) -> Result<BarChain> {
    if c.degree == 0 {
        return Err(Error::InvalidElement(
            "degree-0 chains have no faces".to_string(),
        ));
    }
    let terms = c
        .terms
        .iter()
        .map(|t| face_term(t, i))
        .collect::<Result<Vec<_>>>()?;
    BarChain::from_terms(&c.ctx, c.degree - 1, c.module, terms)
}

/// The bar differential: the alternating sum of faces.
pub fn bar_diff(c: &BarChain) -> Result<BarChain> {
    if c.degree == 0 {
        return Ok(BarChain::zero(&c.ctx, 0, c.module));
    }
    let mut terms = Vec::new();
    for t in &c.terms {
        for i in 0..=c.degree {
            let mut ft = face_term(t, i)?;
            if i % 2 == 1 {
                ft.coeff = ft.coeff.scale(&-Q::one());
            }
            terms.push(ft);
        }
    }
    BarChain::from_terms(&c.ctx, c.degree - 1, c.module, terms)
}

pub fn is_cycle(c: &BarChain) -> Result<bool> {
    Ok(bar_diff(c)?.is_zero())
}

/// All permutations of `0..n` with signs, in a deterministic order.
pub fn permutations_with_sign(n: usize) -> Vec<(i32, Vec<usize>)> {
    let mut out = Vec::new();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut c = vec![0usize; n];
    let mut sign = 1i32;
    out.push((sign, perm.clone()));
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            sign = -sign;
            out.push((sign, perm.clone()));
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    out
}

/// The signed permutation sum `Σ_σ (-1)^σ [v_{σ(1)}|…|v_{σ(p)}] ⊗ coeff`.
pub fn shuffle_with_coeff(vs: &[Scalar], coeff: Coeff) -> Result<BarChain> {
    let ctx = if let Some(v) = vs.first() {
        v.context().clone()
    } else {
        match &coeff {
            Coeff::R(s) => s.context().clone(),
            Coeff::ZR(z) => z.context().clone(),
            Coeff::Pt(x) => x.context().clone(),
        }
    };
    let module = coeff.module();
    let mut terms = Vec::new();
    for (sign, perm) in permutations_with_sign(vs.len()) {
        let word: Vec<Scalar> = perm.iter().map(|&i| vs[i].clone()).collect();
        terms.push(BarTerm {
            word,
            coeff: coeff.scale(&Q::from_integer(sign.into())),
        });
    }
    BarChain::from_terms(&ctx, vs.len(), module, terms)
}

/// The antisymmetrized cycle `Σ_σ (-1)^σ [v_{σ(1)}|…|v_{σ(p)}] ⊗ 1` with
/// trivial real coefficients.
pub fn shuffle_cycle(vs: &[Scalar]) -> Result<BarChain> {
    let ctx = vs
        .first()
        .map(|v| v.context().clone())
        .ok_or_else(|| Error::InvalidElement("empty shuffle word".to_string()))?;
    shuffle_with_coeff(vs, Coeff::R(Scalar::from_int(&ctx, 1)))
}

/// A canonical element of `Λᵖ(V) ⊗ V`, expanded over the context basis.
///
/// Keys are `(strictly increasing basis indices, coefficient basis index)`,
/// values the rational weights. Alternation, Koszul signs and multilinear
/// expansion are applied on insertion, so equality is structural.
#[derive(Debug, Clone)]
pub struct WedgeClass {
    ctx: Arc<ScalarContext>,
    degree: usize,
    terms: BTreeMap<(Vec<usize>, usize), Q>,
}

impl PartialEq for WedgeClass {
    fn eq(&self, other: &Self) -> bool {
        self.ctx.id() == other.ctx.id() && self.degree == other.degree && self.terms == other.terms
    }
}
impl Eq for WedgeClass {}

impl fmt::Display for WedgeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let names: Vec<&str> = self.ctx.basis().iter().map(|e| e.name.as_str()).collect();
        for (i, ((word, ci), w)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{}·(", format_q(w))?;
            if word.is_empty() {
                write!(f, "1")?;
            } else {
                for (k, b) in word.iter().enumerate() {
                    if k > 0 {
                        write!(f, "∧")?;
                    }
                    write!(f, "{}", names[*b])?;
                }
            }
            write!(f, ")⊗{}", names[*ci])?;
        }
        Ok(())
    }
}

impl WedgeClass {
    pub fn zero(ctx: &Arc<ScalarContext>, degree: usize) -> Self {
        WedgeClass {
            ctx: ctx.clone(),
            degree,
            terms: BTreeMap::new(),
        }
    }

    pub fn context(&self) -> &Arc<ScalarContext> {
        &self.ctx
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn terms(&self) -> &BTreeMap<(Vec<usize>, usize), Q> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn insert(&mut self, word: Vec<usize>, coeff_idx: usize, weight: Q) {
        if weight.is_zero() {
            return;
        }
        let key = (word, coeff_idx);
        let entry = self.terms.entry(key.clone()).or_insert_with(Q::zero);
        *entry += weight;
        if entry.is_zero() {
            self.terms.remove(&key);
        }
    }

    /// Adds `weight · (w₁ ∧ … ∧ w_p) ⊗ coeff`, expanding multilinearly over
    /// the context basis and sorting each expanded word with its Koszul sign.
    pub fn add_wedge_term(&mut self, word: &[Scalar], coeff: &Scalar, weight: &Q) -> Result<()> {
        if word.len() != self.degree {
            return Err(Error::InvalidElement(format!(
                "wedge word of length {} in a degree-{} class",
                word.len(),
                self.degree
            )));
        }
        for w in word {
            if w.context().id() != self.ctx.id() {
                return Err(Error::ContextMismatch);
            }
        }
        if coeff.context().id() != self.ctx.id() {
            return Err(Error::ContextMismatch);
        }
        if weight.is_zero() {
            return Ok(());
        }
        // Multilinear expansion into basis-index words.
        let mut acc: Vec<(Vec<usize>, Q)> = vec![(Vec::new(), weight.clone())];
        for entry in word {
            let mut next = Vec::new();
            for (idxs, w) in &acc {
                for (i, c) in entry.coeffs().iter().enumerate() {
                    if c.is_zero() {
                        continue;
                    }
                    let mut idxs2 = idxs.clone();
                    idxs2.push(i);
                    next.push((idxs2, w * c));
                }
            }
            acc = next;
            if acc.is_empty() {
                return Ok(());
            }
        }
        for (mut idxs, mut w) in acc {
            // Sort with sign; words with a repeated index vanish.
            let mut repeat = false;
            'outer: for i in 1..idxs.len() {
                let mut j = i;
                while j > 0 && idxs[j - 1] >= idxs[j] {
                    if idxs[j - 1] == idxs[j] {
                        repeat = true;
                        break 'outer;
                    }
                    idxs.swap(j - 1, j);
                    w = -w;
                    j -= 1;
                }
            }
            if repeat {
                continue;
            }
            for (ci, cc) in coeff.coeffs().iter().enumerate() {
                if cc.is_zero() {
                    continue;
                }
                self.insert(idxs.clone(), ci, &w * cc);
            }
        }
        Ok(())
    }

    pub fn add(&self, other: &WedgeClass) -> Result<WedgeClass> {
        if self.ctx.id() != other.ctx.id() {
            return Err(Error::ContextMismatch);
        }
        if self.degree != other.degree {
            return Err(Error::InvalidElement(
                "adding wedge classes of different degree".to_string(),
            ));
        }
        let mut out = self.clone();
        for ((word, ci), w) in &other.terms {
            out.insert(word.clone(), *ci, w.clone());
        }
        Ok(out)
    }

    pub fn scale(&self, r: &Q) -> WedgeClass {
        if r.is_zero() {
            return WedgeClass::zero(&self.ctx, self.degree);
        }
        WedgeClass {
            ctx: self.ctx.clone(),
            degree: self.degree,
            terms: self.terms.iter().map(|(k, v)| (k.clone(), v * r)).collect(),
        }
    }

    pub fn neg(&self) -> WedgeClass {
        self.scale(&-Q::one())
    }
}

/// Antisymmetrization `[g₁|…|g_p]⊗a ↦ (g₁∧…∧g_p)⊗a`, termwise, on cycles
/// with trivial real coefficients. Kills boundaries, so it is well defined
/// on homology; on the image of the shuffle map it scales by `p!`.
pub fn class_extract(c: &BarChain) -> Result<WedgeClass> {
    if c.module != CoeffModule::TrivialR {
        return Err(Error::InvalidElement(
            "class extraction needs trivial real coefficients".to_string(),
        ));
    }
    if !is_cycle(c)? {
        return Err(Error::NotACycle);
    }
    let mut out = WedgeClass::zero(&c.ctx, c.degree);
    for t in &c.terms {
        let Coeff::R(s) = &t.coeff else {
            unreachable!()
        };
        out.add_wedge_term(&t.word, s, &Q::one())?;
    }
    Ok(out)
}

/// Termwise coefficient de-bracketing of a chain over the group ring, defined
/// when every coefficient lies in the kernel of the augmentation.
pub fn coeff_debracket(c: &BarChain) -> Result<BarChain> {
    if c.module != CoeffModule::ZR {
        return Err(Error::InvalidElement(
            "coefficient de-bracketing needs group-ring coefficients".to_string(),
        ));
    }
    let terms = c
        .terms
        .iter()
        .map(|t| {
            let Coeff::ZR(z) = &t.coeff else {
                unreachable!()
            };
            if !zr_eps(z).is_zero() {
                return Err(Error::NotInKernel);
            }
            Ok(BarTerm {
                word: t.word.clone(),
                coeff: Coeff::R(zr_debracket(z)?),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    BarChain::from_terms(&c.ctx, c.degree, CoeffModule::TrivialR, terms)
}

pub fn factorial(n: usize) -> Q {
    let mut f = Q::one();
    for k in 2..=n {
        f *= Q::from_integer(k.into());
    }
    f
}

/// The connecting-map pipeline: lift the antisymmetrized word to the group
/// ring with coefficient `[0]`, differentiate, de-bracket the (kernel)
/// coefficients, check the result is a cycle, extract the class, and divide
/// by the number of orderings so the output is comparable term-for-term with
/// [`snake_closed_form`]. The two agree up to one global sign; see
/// [`PIPELINE_SIGN`].
pub fn snake_pipeline(vs: &[Scalar]) -> Result<WedgeClass> {
    let first = vs
        .first()
        .ok_or_else(|| Error::InvalidElement("empty snake input".to_string()))?;
    let ctx = first.context().clone();
    let zero_bracket = ZRElement::bracket(&Scalar::zero(&ctx));
    let lifted = shuffle_with_coeff(vs, Coeff::ZR(zero_bracket))?;
    let differentiated = bar_diff(&lifted)?;
    let debracketed = coeff_debracket(&differentiated)?;
    let class = class_extract(&debracketed)?;
    let n = vs.len() - 1;
    Ok(class.scale(&factorial(n).recip()))
}

/// The sign relating [`snake_pipeline`] to [`snake_closed_form`]:
/// `pipeline = PIPELINE_SIGN · closed_form` for every input. Fixed by the
/// one-element case, where the pipeline yields `-a` and the closed form `a`.
pub const PIPELINE_SIGN: i32 = -1;

/// The closed-form connecting map
/// `v₀ ∧ … ∧ v_n ↦ Σⱼ (-1)ʲ (v₀ ∧ … ∧ v̂ⱼ ∧ … ∧ v_n) ⊗ vⱼ`,
/// with `j` counted from 0 so the first term is positive.
pub fn snake_closed_form(vs: &[Scalar]) -> Result<WedgeClass> {
    let first = vs
        .first()
        .ok_or_else(|| Error::InvalidElement("empty snake input".to_string()))?;
    let ctx = first.context().clone();
    let n = vs.len() - 1;
    let mut out = WedgeClass::zero(&ctx, n);
    for j in 0..vs.len() {
        let word: Vec<Scalar> = vs
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != j)
            .map(|(_, v)| v.clone())
            .collect();
        let sign = if j % 2 == 0 { Q::one() } else { -Q::one() };
        out.add_wedge_term(&word, &vs[j], &sign)?;
    }
    Ok(out)
}
