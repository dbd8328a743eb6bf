//! Rotation torus complexes and their homology classes.
//!
//! Given positive lengths `Φ₀, …, Φ_n` with sum `Φ`, the rotations of
//! `[0, Φ)` by `Φ₁, …, Φ_n` commute, and the corresponding torus complex is
//! assembled from `n!` signed flags, one per ordering of the rotations. The
//! signed sum of their regulator chains is a bar cycle whose class equals
//! the closed-form connecting map applied to `Φ₀ ∧ … ∧ Φ_n`.
//! [`verify_generator`] computes both sides exactly and reports the verdict.
//!
//! Products of generator classes are bookkept in the free graded-commutative
//! algebra on class symbols rather than by stacking transformations; only
//! degrees and Koszul signs matter at that level.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;
use std::time::{Duration, Instant};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::homology::{
    bar_diff, class_extract, factorial, permutations_with_sign, snake_closed_form, BarChain,
    WedgeClass, PIPELINE_SIGN,
};
use crate::iet::Iet;
use crate::rational::Q;
use crate::regulator::{regulator_flag, regulator_viaduct, Measure};
use crate::scalar::{q_span_reduce, Scalar, ScalarContext};
use crate::spans::Viaduct;

/// A tuple of positive lengths `Φ₀, …, Φ_n` defining a torus complex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorSpec {
    lengths: Vec<Scalar>,
}

impl GeneratorSpec {
    pub fn new(lengths: Vec<Scalar>) -> Result<Self> {
        if lengths.is_empty() {
            return Err(Error::InvalidElement(
                "a generator needs at least one length".to_string(),
            ));
        }
        let ctx = lengths[0].context().clone();
        for l in &lengths {
            if l.context().id() != ctx.id() {
                return Err(Error::ContextMismatch);
            }
            if !l.is_positive()? {
                return Err(Error::NonpositiveLength);
            }
        }
        Ok(GeneratorSpec { lengths })
    }

    pub fn lengths(&self) -> &[Scalar] {
        &self.lengths
    }

    /// Homological degree `n` (one less than the number of lengths).
    pub fn degree(&self) -> usize {
        self.lengths.len() - 1
    }

    pub fn context(&self) -> &Arc<ScalarContext> {
        self.lengths[0].context()
    }

    /// Total length `Φ = Φ₀ + … + Φ_n`.
    pub fn total(&self) -> Scalar {
        let mut acc = Scalar::zero(self.context());
        for l in &self.lengths {
            acc = acc.add(l).expect("shared context");
        }
        acc
    }

    /// The generating rotations `ρ_{Φ₁}, …, ρ_{Φ_n}` of `[0, Φ)`.
    pub fn rotations(&self) -> Result<Vec<Iet>> {
        let total = self.total();
        self.lengths[1..]
            .iter()
            .map(|t| Iet::rotation(&total, t))
            .collect()
    }
}

/// The `n!` signed flags of the torus complex: for each permutation `σ`, the
/// sign `(-1)^σ` and the flag whose slot `k` carries the rotation by
/// `Φ_{σ(k)}`. For `n = 0` the single empty flag has sign `+1`.
pub fn generator_flags(spec: &GeneratorSpec) -> Result<Vec<(i32, Vec<Iet>)>> {
    let rotations = spec.rotations()?;
    let n = rotations.len();
    let mut out = Vec::new();
    for (sign, perm) in permutations_with_sign(n) {
        let flag: Vec<Iet> = perm.iter().map(|&i| rotations[i].clone()).collect();
        out.push((sign, flag));
    }
    Ok(out)
}

/// The signed sum of the regulator chains of all torus flags.
pub fn generator_chain(spec: &GeneratorSpec, measure: Measure) -> Result<BarChain> {
    if spec.degree() == 0 {
        let v = Viaduct::trivial(&spec.total())?;
        return regulator_viaduct(&v, measure);
    }
    let ctx = spec.context().clone();
    let mut acc = BarChain::zero(&ctx, spec.degree(), measure.module());
    for (sign, flag) in generator_flags(spec)? {
        let chain = regulator_flag(&flag, measure)?;
        acc = acc.add(&chain.scale(&Q::from_integer(sign.into())))?;
    }
    Ok(acc)
}

/// The homology class of the torus complex under the volume regulator: the
/// signed chain is checked to be a cycle, antisymmetrized, and divided by
/// the number of flags so it is comparable term-for-term with
/// [`expected_class`].
pub fn generator_class(spec: &GeneratorSpec) -> Result<WedgeClass> {
    let chain = generator_chain(spec, Measure::Vol)?;
    if !crate::homology::is_cycle(&chain)? {
        return Err(Error::NotACycle);
    }
    let class = class_extract(&chain)?;
    Ok(class.scale(&factorial(spec.degree()).recip()))
}

/// The closed-form class `Σⱼ (-1)ʲ (Φ₀ ∧ … ∧ Φ̂ⱼ ∧ … ∧ Φ_n) ⊗ Φⱼ`.
pub fn expected_class(spec: &GeneratorSpec) -> Result<WedgeClass> {
    snake_closed_form(&spec.lengths)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    /// Classes agree exactly; the payload records the sign that matched
    /// (`+1` direct, `-1` via the global pipeline sign).
    Equal(i32),
    Unequal,
    Error(String),
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Equal(_) => write!(f, "EQUAL"),
            Verdict::Unequal => write!(f, "UNEQUAL"),
            Verdict::Error(e) => write!(f, "ERROR({e})"),
        }
    }
}

/// Everything needed to audit one generator verification.
#[derive(Debug, Clone)]
pub struct VerificationReport {
    pub lengths: Vec<Scalar>,
    pub cycle_ok: bool,
    pub chain: Option<BarChain>,
    pub computed: Option<WedgeClass>,
    pub expected: Option<WedgeClass>,
    pub verdict: Verdict,
    pub elapsed: Duration,
}

impl VerificationReport {
    pub fn is_equal(&self) -> bool {
        matches!(self.verdict, Verdict::Equal(_))
    }
}

/// Computes the regulator class of the torus complex and compares it with
/// the closed-form class, exactly. Failures are verdicts, not errors.
pub fn verify_generator(spec: &GeneratorSpec) -> VerificationReport {
    let start = Instant::now();
    let mut report = VerificationReport {
        lengths: spec.lengths.to_vec(),
        cycle_ok: false,
        chain: None,
        computed: None,
        expected: None,
        verdict: Verdict::Unequal,
        elapsed: Duration::ZERO,
    };
    let outcome = (|| -> Result<()> {
        let chain = generator_chain(spec, Measure::Vol)?;
        report.cycle_ok = bar_diff(&chain)?.is_zero();
        report.chain = Some(chain);
        if !report.cycle_ok {
            report.verdict = Verdict::Error("signed chain is not a cycle".to_string());
            return Ok(());
        }
        let computed = generator_class(spec)?;
        let expected = expected_class(spec)?;
        report.verdict = if computed == expected {
            Verdict::Equal(1)
        } else if computed == expected.scale(&Q::from_integer(PIPELINE_SIGN.into())) {
            Verdict::Equal(PIPELINE_SIGN)
        } else {
            Verdict::Unequal
        };
        report.computed = Some(computed);
        report.expected = Some(expected);
        Ok(())
    })();
    if let Err(e) = outcome {
        report.verdict = Verdict::Error(e.to_string());
    }
    report.elapsed = start.elapsed();
    report
}

/// A named generator class for product bookkeeping: the wedge word
/// `Φ₀ ∧ … ∧ Φ_n` of homological degree `n`, with its computed class when
/// available.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorClass {
    word: Vec<Scalar>,
    computed: Option<WedgeClass>,
}

impl GeneratorClass {
    pub fn new(word: Vec<Scalar>) -> Result<Self> {
        if word.is_empty() {
            return Err(Error::InvalidElement(
                "empty wedge word; use GeneratorClass::unit".to_string(),
            ));
        }
        Ok(GeneratorClass {
            word,
            computed: None,
        })
    }

    pub fn from_spec(spec: &GeneratorSpec) -> Result<Self> {
        Ok(GeneratorClass {
            word: spec.lengths().to_vec(),
            computed: Some(generator_class(spec)?),
        })
    }

    /// The multiplicative unit (the empty wedge word).
    pub fn unit() -> Self {
        GeneratorClass {
            word: Vec::new(),
            computed: None,
        }
    }

    pub fn word(&self) -> &[Scalar] {
        &self.word
    }

    pub fn computed(&self) -> Option<&WedgeClass> {
        self.computed.as_ref()
    }

    /// Homological degree: one less than the word length; 0 for the unit.
    pub fn degree(&self) -> usize {
        self.word.len().saturating_sub(1)
    }

    /// A class is zero exactly when its lengths are rationally dependent.
    pub fn is_zero(&self) -> Result<bool> {
        if self.word.is_empty() {
            return Ok(false);
        }
        let (basis, _) = q_span_reduce(&self.word)?;
        Ok(basis.len() < self.word.len())
    }

    pub fn symbol(&self) -> Option<ClassSymbol> {
        if self.word.is_empty() {
            return None;
        }
        let name = self
            .word
            .iter()
            .map(|s| s.to_string())
            .collect::<Vec<_>>()
            .join("∧");
        Some(ClassSymbol {
            name,
            degree: self.degree(),
        })
    }
}

/// A graded symbol in the free graded-commutative algebra.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct ClassSymbol {
    pub name: String,
    pub degree: usize,
}

/// A sorted product of symbols. Koszul signs are extracted during
/// normalization; odd-degree squares vanish.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Monomial {
    factors: Vec<ClassSymbol>,
}

impl Monomial {
    pub fn degree(&self) -> usize {
        self.factors.iter().map(|f| f.degree).sum()
    }

    pub fn factors(&self) -> &[ClassSymbol] {
        &self.factors
    }

    /// Sorts the factors, counting Koszul swaps. Returns the sign, or `None`
    /// when an odd-degree symbol repeats.
    fn normalize(mut factors: Vec<ClassSymbol>) -> Option<(Monomial, i32)> {
        let mut sign = 1i32;
        for i in 1..factors.len() {
            let mut j = i;
            while j > 0 && factors[j - 1] > factors[j] {
                if factors[j - 1].degree % 2 == 1 && factors[j].degree % 2 == 1 {
                    sign = -sign;
                }
                factors.swap(j - 1, j);
                j -= 1;
            }
        }
        for w in factors.windows(2) {
            if w[0] == w[1] && w[0].degree % 2 == 1 {
                return None;
            }
        }
        Some((Monomial { factors }, sign))
    }
}

/// An element of the free graded-commutative algebra on class symbols.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlgebraElement {
    terms: BTreeMap<Monomial, Q>,
}

impl AlgebraElement {
    pub fn zero() -> Self {
        AlgebraElement {
            terms: BTreeMap::new(),
        }
    }

    pub fn one() -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(
            Monomial {
                factors: Vec::new(),
            },
            Q::one(),
        );
        AlgebraElement { terms }
    }

    pub fn from_symbols(symbols: Vec<ClassSymbol>) -> Self {
        match Monomial::normalize(symbols) {
            None => AlgebraElement::zero(),
            Some((m, sign)) => {
                let mut terms = BTreeMap::new();
                terms.insert(m, Q::from_integer(sign.into()));
                AlgebraElement { terms }
            }
        }
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, Q> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree when homogeneous.
    pub fn degree(&self) -> Option<usize> {
        let mut degrees = self.terms.keys().map(Monomial::degree);
        let first = degrees.next()?;
        degrees.all(|d| d == first).then_some(first)
    }

    pub fn add(&self, other: &AlgebraElement) -> AlgebraElement {
        let mut terms = self.terms.clone();
        for (m, c) in &other.terms {
            let entry = terms.entry(m.clone()).or_insert_with(Q::zero);
            *entry += c;
            if entry.is_zero() {
                terms.remove(m);
            }
        }
        AlgebraElement { terms }
    }

    pub fn scale(&self, r: &Q) -> AlgebraElement {
        if r.is_zero() {
            return AlgebraElement::zero();
        }
        AlgebraElement {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * r)).collect(),
        }
    }

    pub fn neg(&self) -> AlgebraElement {
        self.scale(&-Q::one())
    }

    pub fn mul(&self, other: &AlgebraElement) -> AlgebraElement {
        let mut out = AlgebraElement::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                let mut factors = m1.factors.clone();
                factors.extend(m2.factors.iter().cloned());
                if let Some((m, sign)) = Monomial::normalize(factors) {
                    let coeff = c1 * c2 * Q::from_integer(sign.into());
                    out = out.add(&AlgebraElement {
                        terms: [(m, coeff)].into_iter().collect(),
                    });
                }
            }
        }
        out
    }
}

/// The product of two generator classes in the free graded-commutative
/// algebra; zero classes multiply to zero.
pub fn class_product(g1: &GeneratorClass, g2: &GeneratorClass) -> Result<AlgebraElement> {
    if g1.is_zero()? || g2.is_zero()? {
        return Ok(AlgebraElement::zero());
    }
    let symbols: Vec<ClassSymbol> = [g1.symbol(), g2.symbol()].into_iter().flatten().collect();
    Ok(AlgebraElement::from_symbols(symbols))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homology::Coeff;
    use crate::rational::{q, qi};

    fn ctx() -> Arc<ScalarContext> {
        ScalarContext::new(vec![
            (
                "u".to_string(),
                (q(1414213562, 1000000000), q(1414213563, 1000000000)),
            ),
            (
                "v".to_string(),
                (q(1732050807, 1000000000), q(1732050808, 1000000000)),
            ),
            (
                "w".to_string(),
                (q(2236067977, 1000000000), q(2236067978, 1000000000)),
            ),
        ])
        .unwrap()
    }

    fn spec(c: &Arc<ScalarContext>, names: &[&str]) -> GeneratorSpec {
        let lengths = names
            .iter()
            .map(|n| {
                if let Ok(r) = crate::rational::parse_q(n) {
                    Scalar::from_rational(c, r)
                } else {
                    Scalar::symbol(c, n).unwrap()
                }
            })
            .collect();
        GeneratorSpec::new(lengths).unwrap()
    }

    #[test]
    fn degree_zero_class_is_volume() {
        let c = ctx();
        let sp = spec(&c, &["u"]);
        let class = generator_class(&sp).unwrap();
        let mut expected = WedgeClass::zero(&c, 0);
        expected
            .add_wedge_term(&[], &Scalar::symbol(&c, "u").unwrap(), &qi(1))
            .unwrap();
        assert_eq!(class, expected);
        assert_eq!(class, expected_class(&sp).unwrap());
    }

    #[test]
    fn single_rotation_flag() {
        let c = ctx();
        let sp = spec(&c, &["1", "u"]);
        let flags = generator_flags(&sp).unwrap();
        assert_eq!(flags.len(), 1);
        assert_eq!(flags[0].0, 1);
        assert_eq!(flags[0].1.len(), 1);
        let u = Scalar::symbol(&c, "u").unwrap();
        let total = Scalar::from_int(&c, 1).add(&u).unwrap();
        assert_eq!(flags[0].1[0], Iet::rotation(&total, &u).unwrap());
    }

    #[test]
    fn flag_counts_are_factorials() {
        let c = ctx();
        assert_eq!(
            generator_flags(&spec(&c, &["1", "u", "v"])).unwrap().len(),
            2
        );
        assert_eq!(
            generator_flags(&spec(&c, &["1", "u", "v", "w"]))
                .unwrap()
                .len(),
            6
        );
    }

    #[test]
    fn degree_one_class_matches_hand_computation() {
        let c = ctx();
        let sp = spec(&c, &["1", "u"]);
        let chain = generator_chain(&sp, Measure::Vol).unwrap();
        // [u]⊗1 + [-1]⊗u
        assert_eq!(chain.terms().len(), 2);
        let class = generator_class(&sp).unwrap();
        let one = Scalar::from_int(&c, 1);
        let u = Scalar::symbol(&c, "u").unwrap();
        let mut expected = WedgeClass::zero(&c, 1);
        expected
            .add_wedge_term(std::slice::from_ref(&u), &one, &qi(1))
            .unwrap();
        expected
            .add_wedge_term(std::slice::from_ref(&one), &u, &qi(-1))
            .unwrap();
        assert_eq!(class, expected);
        assert_eq!(class, expected_class(&sp).unwrap());
    }

    #[test]
    fn degree_two_class_equals_closed_form() {
        let c = ctx();
        let sp = spec(&c, &["1", "u", "v"]);
        let report = verify_generator(&sp);
        assert!(report.cycle_ok);
        assert_eq!(report.verdict, Verdict::Equal(1));
    }

    #[test]
    fn degenerate_lengths_give_zero_classes() {
        let c = ctx();
        let sp = spec(&c, &["2", "3"]);
        let report = verify_generator(&sp);
        assert!(report.is_equal());
        assert!(report.computed.unwrap().is_zero());
        assert!(report.expected.unwrap().is_zero());
    }

    #[test]
    fn nonpositive_length_rejected() {
        let c = ctx();
        let zero = Scalar::zero(&c);
        assert_eq!(
            GeneratorSpec::new(vec![zero]).unwrap_err(),
            Error::NonpositiveLength
        );
    }

    #[test]
    fn torus_edges_compose_to_diagonal() {
        // the two edges ρ_x then ρ_y of the torus square compose to ρ_{x+y}
        let c = ctx();
        let x = Scalar::symbol(&c, "u").unwrap();
        let y = Scalar::symbol(&c, "v").unwrap();
        let z = Scalar::symbol(&c, "w").unwrap();
        let total = x.add(&y).unwrap().add(&z).unwrap();
        let rho_x = Iet::rotation(&total, &x).unwrap();
        let rho_y = Iet::rotation(&total, &y).unwrap();
        let diagonal = Iet::rotation(&total, &x.add(&y).unwrap()).unwrap();
        assert_eq!(rho_x.compose(&rho_y).unwrap(), diagonal);
        assert_eq!(rho_y.compose(&rho_x).unwrap(), diagonal);
    }

    #[test]
    fn generator_rotations_commute() {
        let c = ctx();
        let sp = spec(&c, &["1", "u", "v", "w"]);
        let rotations = sp.rotations().unwrap();
        for a in &rotations {
            for b in &rotations {
                assert_eq!(a.compose(b).unwrap(), b.compose(a).unwrap());
            }
        }
    }

    #[test]
    fn universal_generator_chain_is_cycle_too() {
        let c = ctx();
        let sp = spec(&c, &["1", "u", "v"]);
        let chain = generator_chain(&sp, Measure::Universal).unwrap();
        assert!(bar_diff(&chain).unwrap().is_zero());
        let Coeff::Pt(_) = &chain.terms()[0].coeff else {
            panic!("expected polytope coefficients")
        };
    }

    #[test]
    fn product_unit_and_commutativity() {
        let c = ctx();
        let u = Scalar::symbol(&c, "u").unwrap();
        let v = Scalar::symbol(&c, "v").unwrap();
        let one = Scalar::from_int(&c, 1);
        let g1 = GeneratorClass::new(vec![one.clone(), u.clone()]).unwrap(); // degree 1
        let g2 = GeneratorClass::new(vec![one.clone(), v.clone(), u.clone()]).unwrap(); // degree 2
        let unit = GeneratorClass::unit();
        // unit is the identity
        let gu = class_product(&g1, &unit).unwrap();
        assert_eq!(gu, AlgebraElement::from_symbols(vec![g1.symbol().unwrap()]));
        // graded commutativity: odd*even commutes, odd*odd anticommutes
        let p12 = class_product(&g1, &g2).unwrap();
        let p21 = class_product(&g2, &g1).unwrap();
        assert_eq!(p12, p21); // (-1)^{1·2} = +1
        let g3 = GeneratorClass::new(vec![one.clone(), v.clone()]).unwrap(); // degree 1
        let p13 = class_product(&g1, &g3).unwrap();
        let p31 = class_product(&g3, &g1).unwrap();
        assert_eq!(p13, p31.neg()); // (-1)^{1·1} = -1
                                    // odd square vanishes
        assert!(class_product(&g1, &g1).unwrap().is_zero());
        // degrees add
        assert_eq!(p12.degree(), Some(3));
    }

    #[test]
    fn reordering_generators_flips_the_class_sign() {
        let c = ctx();
        let forward = spec(&c, &["1", "u", "v"]);
        let swapped = spec(&c, &["1", "v", "u"]);
        let a = generator_class(&forward).unwrap();
        let b = generator_class(&swapped).unwrap();
        assert_eq!(a, b.neg());
        assert_eq!(
            expected_class(&forward).unwrap(),
            expected_class(&swapped).unwrap().neg()
        );
    }

    #[test]
    fn random_independent_lengths_verify() {
        use rand::rngs::StdRng;
        use rand::{Rng, SeedableRng};
        let c = ctx();
        let names = ["1", "u", "v", "w"];
        let mut rng = StdRng::seed_from_u64(53);
        for n in 1..=3usize {
            for _ in 0..4 {
                // positive rational multiples of distinct basis symbols stay
                // rationally independent
                let lengths: Vec<Scalar> = names[..=n]
                    .iter()
                    .map(|nm| {
                        let base = if *nm == "1" {
                            Scalar::from_int(&c, 1)
                        } else {
                            Scalar::symbol(&c, nm).unwrap()
                        };
                        base.scale(&q(rng.gen_range(1..=5), rng.gen_range(1..=3)))
                    })
                    .collect();
                let sp = GeneratorSpec::new(lengths).unwrap();
                let report = verify_generator(&sp);
                assert!(report.cycle_ok, "n={n}");
                assert!(report.is_equal(), "n={n}: {:?}", report.verdict);
            }
        }
    }

    #[test]
    fn product_of_dependent_class_is_zero() {
        let c = ctx();
        let two = Scalar::from_int(&c, 2);
        let three = Scalar::from_int(&c, 3);
        let g = GeneratorClass::new(vec![two, three]).unwrap();
        assert!(g.is_zero().unwrap());
        let h = GeneratorClass::new(vec![
            Scalar::from_int(&c, 1),
            Scalar::symbol(&c, "u").unwrap(),
        ])
        .unwrap();
        assert!(class_product(&g, &h).unwrap().is_zero());
    }
}
