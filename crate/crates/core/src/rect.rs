//! Rectangle exchange transformations as componentwise products of interval
//! exchanges.
//!
//! A product of interval exchanges acts on the box `∏ [0, L_d)` coordinate
//! by coordinate. The componentwise form is primary: composition, inversion
//! and evaluation are factorwise. The box form (the product partition into
//! axis-aligned boxes with translation vectors) is derived from it and used
//! as a pointwise oracle and as the serialization format.
//!
//! Tensor classes of generators are bookkept in the same free graded
//! algebra as products of interval-exchange classes; only degrees and
//! Koszul signs matter there.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::generators::{AlgebraElement, ClassSymbol, GeneratorClass};
use crate::iet::{Iet, Interval};
use crate::scalar::{Scalar, ScalarContext};

/// A rectangle exchange transformation in componentwise form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ret {
    factors: Vec<Iet>,
}

/// One axis-aligned box of the product partition with its translation
/// vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RetBox {
    pub lo: Vec<Scalar>,
    pub hi: Vec<Scalar>,
    pub shift: Vec<Scalar>,
}

impl Ret {
    pub fn from_iets(factors: Vec<Iet>) -> Result<Self> {
        let first = factors
            .first()
            .ok_or_else(|| Error::InvalidElement("zero-dimensional exchange".to_string()))?;
        let ctx = first.context().clone();
        for f in &factors {
            if f.context().id() != ctx.id() {
                return Err(Error::ContextMismatch);
            }
        }
        Ok(Ret { factors })
    }

    pub fn dims(&self) -> usize {
        self.factors.len()
    }

    pub fn factors(&self) -> &[Iet] {
        &self.factors
    }

    pub fn context(&self) -> &Arc<ScalarContext> {
        self.factors[0].context()
    }

    pub fn lengths(&self) -> Vec<Scalar> {
        self.factors.iter().map(|f| f.length().clone()).collect()
    }

    pub fn apply(&self, point: &[Scalar]) -> Result<Vec<Scalar>> {
        if point.len() != self.dims() {
            return Err(Error::DimensionMismatch);
        }
        self.factors
            .iter()
            .zip(point)
            .map(|(f, p)| f.apply(p))
            .collect()
    }

    /// `self ∘ other`, factorwise.
    pub fn compose(&self, other: &Ret) -> Result<Ret> {
        if self.dims() != other.dims() {
            return Err(Error::DimensionMismatch);
        }
        let factors = self
            .factors
            .iter()
            .zip(&other.factors)
            .map(|(f, g)| f.compose(g))
            .collect::<Result<Vec<_>>>()?;
        Ret::from_iets(factors)
    }

    pub fn inverse(&self) -> Result<Ret> {
        Ret::from_iets(
            self.factors
                .iter()
                .map(Iet::inverse)
                .collect::<Result<Vec<_>>>()?,
        )
    }

    /// The product partition: every combination of one piece per axis, with
    /// the offsets collected into a translation vector. Boxes are emitted in
    /// lexicographic axis-piece order.
    pub fn boxes(&self) -> Vec<RetBox> {
        let per_axis: Vec<Vec<(Interval, Scalar)>> =
            self.factors.iter().map(|f| f.pieces_with_ends()).collect();
        let mut out = Vec::new();
        let mut idx = vec![0usize; self.dims()];
        loop {
            let mut lo = Vec::with_capacity(self.dims());
            let mut hi = Vec::with_capacity(self.dims());
            let mut shift = Vec::with_capacity(self.dims());
            for (d, pieces) in per_axis.iter().enumerate() {
                let (iv, off) = &pieces[idx[d]];
                lo.push(iv.lo.clone());
                hi.push(iv.hi.clone());
                shift.push(off.clone());
            }
            out.push(RetBox { lo, hi, shift });
            // advance the multi-index
            let mut d = self.dims();
            loop {
                if d == 0 {
                    return out;
                }
                d -= 1;
                idx[d] += 1;
                if idx[d] < per_axis[d].len() {
                    break;
                }
                idx[d] = 0;
            }
        }
    }

    /// Evaluation through the box form: find the box containing the point
    /// and add its translation vector. Agrees with [`Ret::apply`].
    pub fn apply_via_boxes(&self, point: &[Scalar]) -> Result<Vec<Scalar>> {
        if point.len() != self.dims() {
            return Err(Error::DimensionMismatch);
        }
        'boxes: for b in self.boxes() {
            for ((lo, hi), p) in b.lo.iter().zip(&b.hi).zip(point) {
                let iv = Interval {
                    lo: lo.clone(),
                    hi: hi.clone(),
                };
                if !iv.contains(p)? {
                    continue 'boxes;
                }
            }
            return point.iter().zip(&b.shift).map(|(p, s)| p.add(s)).collect();
        }
        Err(Error::OutOfDomain)
    }
}

/// A formal tensor of generator classes across the axes: the total degree
/// adds, and the symbol lives in the same graded algebra as interval
/// exchange classes, so Koszul signs apply in products.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TensorClass {
    pub degree: usize,
    pub element: AlgebraElement,
}

/// Builds the tensor class of one generator class per axis. A zero factor
/// class gives the zero element; a tensor of units is the algebra unit.
pub fn rect_tensor_class(classes: &[GeneratorClass]) -> Result<TensorClass> {
    let mut degree = 0usize;
    let mut names = Vec::with_capacity(classes.len());
    let mut all_unit = true;
    for g in classes {
        if g.is_zero()? {
            return Ok(TensorClass {
                degree: 0,
                element: AlgebraElement::zero(),
            });
        }
        degree += g.degree();
        match g.symbol() {
            Some(sym) => {
                all_unit = false;
                names.push(sym.name);
            }
            None => names.push("1".to_string()),
        }
    }
    let element = if all_unit {
        AlgebraElement::one()
    } else {
        AlgebraElement::from_symbols(vec![ClassSymbol {
            name: names.join("⊗"),
            degree,
        }])
    };
    Ok(TensorClass { degree, element })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qi};
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn ctx() -> Arc<ScalarContext> {
        ScalarContext::new(vec![(
            "u".to_string(),
            (q(1414213562, 1000000000), q(1414213563, 1000000000)),
        )])
        .unwrap()
    }

    fn rand_iet(c: &Arc<ScalarContext>, rng: &mut StdRng) -> Iet {
        let n = rng.gen_range(1..4);
        let lengths: Vec<Scalar> = (0..n)
            .map(|_| Scalar::from_rational(c, q(rng.gen_range(1..5), rng.gen_range(1..4))))
            .collect();
        let mut perm: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            perm.swap(i, rng.gen_range(0..=i));
        }
        Iet::from_lengths_and_permutation(&lengths, &perm).unwrap()
    }

    #[test]
    fn identity_product_is_one_box() {
        let c = ctx();
        let one = Scalar::from_int(&c, 1);
        let r = Ret::from_iets(vec![
            Iet::identity(&one).unwrap(),
            Iet::identity(&one).unwrap(),
        ])
        .unwrap();
        let boxes = r.boxes();
        assert_eq!(boxes.len(), 1);
        assert!(boxes[0].shift.iter().all(Scalar::is_zero));
    }

    #[test]
    fn half_rotation_times_identity() {
        let c = ctx();
        let one = Scalar::from_int(&c, 1);
        let half = Scalar::from_rational(&c, q(1, 2));
        let r = Ret::from_iets(vec![
            Iet::rotation(&one, &half).unwrap(),
            Iet::identity(&one).unwrap(),
        ])
        .unwrap();
        let boxes = r.boxes();
        assert_eq!(boxes.len(), 2);
        assert_eq!(boxes[0].shift[0], half);
        assert_eq!(boxes[0].shift[1], Scalar::zero(&c));
        assert_eq!(boxes[1].shift[0], half.neg());
    }

    #[test]
    fn box_count_is_product_of_piece_counts() {
        let c = ctx();
        let mut rng = StdRng::seed_from_u64(3);
        for _ in 0..10 {
            let f = rand_iet(&c, &mut rng);
            let g = rand_iet(&c, &mut rng);
            let expected = f.pieces().len() * g.pieces().len();
            let r = Ret::from_iets(vec![f, g]).unwrap();
            assert_eq!(r.boxes().len(), expected);
        }
    }

    #[test]
    fn componentwise_and_box_forms_agree() {
        let c = ctx();
        let mut rng = StdRng::seed_from_u64(5);
        for _ in 0..10 {
            let r = Ret::from_iets(vec![rand_iet(&c, &mut rng), rand_iet(&c, &mut rng)]).unwrap();
            let lengths = r.lengths();
            for _ in 0..20 {
                let point: Vec<Scalar> = lengths
                    .iter()
                    .map(|l| l.scale(&q(rng.gen_range(0..7), 7)))
                    .collect();
                assert_eq!(r.apply(&point).unwrap(), r.apply_via_boxes(&point).unwrap());
            }
        }
    }

    #[test]
    fn composition_is_factorwise_homomorphism() {
        let c = ctx();
        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..10 {
            let f1 = rand_iet(&c, &mut rng);
            let g1 = f1.inverse().unwrap();
            let f2 = rand_iet(&c, &mut rng);
            let g2 = f2.inverse().unwrap();
            let r1 = Ret::from_iets(vec![f1.clone(), f2.clone()]).unwrap();
            let r2 = Ret::from_iets(vec![g1.clone(), g2.clone()]).unwrap();
            let composed = r1.compose(&r2).unwrap();
            let expected =
                Ret::from_iets(vec![f1.compose(&g1).unwrap(), f2.compose(&g2).unwrap()]).unwrap();
            assert_eq!(composed, expected);
            // inverse pairs compose to the identity product
            assert!(composed.factors()[0].is_identity());
            assert!(composed.factors()[1].is_identity());
        }
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let c = ctx();
        let one = Scalar::from_int(&c, 1);
        let r1 = Ret::from_iets(vec![Iet::identity(&one).unwrap()]).unwrap();
        let r2 = Ret::from_iets(vec![
            Iet::identity(&one).unwrap(),
            Iet::identity(&one).unwrap(),
        ])
        .unwrap();
        assert_eq!(r1.compose(&r2).unwrap_err(), Error::DimensionMismatch);
        assert_eq!(
            r1.apply(&[one.clone(), one.clone()]).unwrap_err(),
            Error::DimensionMismatch
        );
    }

    #[test]
    fn domain_and_image_boxes_tile_rational_volume() {
        // with rational lengths on both axes, total box volume is the
        // product of the lengths, for the domain and the image alike
        let c = ctx();
        let mut rng = StdRng::seed_from_u64(11);
        for _ in 0..5 {
            let f = rand_iet(&c, &mut rng);
            let g = rand_iet(&c, &mut rng);
            let r = Ret::from_iets(vec![f, g]).unwrap();
            let total: crate::rational::Q = r
                .lengths()
                .iter()
                .map(|l| l.as_rational().unwrap().clone())
                .product();
            let mut domain_sum = crate::rational::Q::from_integer(0.into());
            let mut image_sum = crate::rational::Q::from_integer(0.into());
            for b in r.boxes() {
                let vol: crate::rational::Q = (0..r.dims())
                    .map(|d| {
                        b.hi[d]
                            .sub(&b.lo[d])
                            .unwrap()
                            .as_rational()
                            .unwrap()
                            .clone()
                    })
                    .product();
                domain_sum += vol.clone();
                image_sum += vol;
            }
            assert_eq!(domain_sum, total);
            assert_eq!(image_sum, total);
        }
    }

    #[test]
    fn tensor_class_grading_and_units() {
        let c = ctx();
        let one = Scalar::from_int(&c, 1);
        let u = Scalar::symbol(&c, "u").unwrap();
        let unit = GeneratorClass::unit();
        let t = rect_tensor_class(&[unit.clone(), unit.clone()]).unwrap();
        assert_eq!(t.degree, 0);
        assert_eq!(t.element, AlgebraElement::one());

        let g1 = GeneratorClass::new(vec![one.clone(), u.clone()]).unwrap(); // degree 1
        let t = rect_tensor_class(&[g1.clone(), unit.clone()]).unwrap();
        assert_eq!(t.degree, 1);
        // a rationally dependent factor kills the tensor
        let g2 = GeneratorClass::new(vec![one.clone(), u.clone(), u.scale(&qi(2))]).unwrap();
        assert!(g2.is_zero().unwrap());
        let t = rect_tensor_class(&[g1, g2]).unwrap();
        assert!(t.element.is_zero());
    }

    #[test]
    fn tensor_koszul_sign_in_ambient_algebra() {
        let c = ctx();
        let one = Scalar::from_int(&c, 1);
        let u = Scalar::symbol(&c, "u").unwrap();
        let g = GeneratorClass::new(vec![one.clone(), u.clone()]).unwrap(); // degree 1
        let unit = GeneratorClass::unit();
        // two odd tensor symbols anticommute in the ambient algebra
        let t1 = rect_tensor_class(&[g.clone(), unit.clone()]).unwrap();
        let t2 = rect_tensor_class(&[unit, g]).unwrap();
        assert_eq!(t1.degree, 1);
        assert_eq!(t2.degree, 1);
        let p12 = t1.element.mul(&t2.element);
        let p21 = t2.element.mul(&t1.element);
        assert_eq!(p12, p21.neg());
        // and an odd tensor squares to zero
        assert!(t1.element.mul(&t1.element).is_zero());
    }
}
