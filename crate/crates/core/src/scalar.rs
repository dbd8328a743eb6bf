//! Exact real scalars as rational coefficient vectors over a declared
//! rationally-independent basis.
//!
//! A [`ScalarContext`] fixes an ordered basis of symbols; the first entry is
//! always the rational unit `1` with guard `[1,1]`. A [`Scalar`] is a vector
//! of rational coefficients over that basis. Equality of scalars is equality
//! of coefficient vectors; this is the exactness contract the rest of the
//! engine relies on. Guard intervals enter only when an *ordering* is needed:
//! [`Scalar::cmp_guarded`] decides `<`/`=`/`>` by interval arithmetic and
//! refuses to guess when the guards are too coarse.
//!
//! Rational independence of the basis is asserted by the caller, not checked
//! (it is undecidable in general). A dependent basis can make wedge classes
//! vanish less often than they should, but never produces an incorrect chain.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{format_q, scale_interval, Q};

pub const UNIT_SYMBOL: &str = "1";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasisEntry {
    pub name: String,
    /// Rational guard interval `[lo, hi]` enclosing the symbol's value.
    pub guard: (Q, Q),
}

/// An ordered basis of symbols with guard intervals. Contexts are immutable
/// and shared behind `Arc`; every scalar remembers the context it was born in.
#[derive(Debug)]
pub struct ScalarContext {
    id: u64,
    basis: Vec<BasisEntry>,
}

/// FNV-1a over a canonical rendering, so that re-loading the same context
/// file yields the same id.
fn context_id(basis: &[BasisEntry]) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    let mut eat = |bytes: &[u8]| {
        for &b in bytes {
            h ^= b as u64;
            h = h.wrapping_mul(0x100000001b3);
        }
    };
    for e in basis {
        eat(e.name.as_bytes());
        eat(b";");
        eat(format_q(&e.guard.0).as_bytes());
        eat(b",");
        eat(format_q(&e.guard.1).as_bytes());
        eat(b"|");
    }
    h
}

impl ScalarContext {
    /// Builds a context from `(name, guard)` pairs. The unit entry `("1",
    /// [1,1])` is prepended if absent; if present it must be first and carry
    /// the exact guard `[1,1]`.
    pub fn new(basis: Vec<(String, (Q, Q))>) -> Result<Arc<Self>> {
        let mut entries: Vec<BasisEntry> = Vec::with_capacity(basis.len() + 1);
        let has_unit = basis
            .first()
            .map(|(n, _)| n == UNIT_SYMBOL)
            .unwrap_or(false);
        if !has_unit {
            entries.push(BasisEntry {
                name: UNIT_SYMBOL.to_string(),
                guard: (Q::one(), Q::one()),
            });
        }
        for (name, guard) in basis {
            if guard.0 > guard.1 {
                return Err(Error::InvalidGuard(format!("symbol `{name}` has lo > hi")));
            }
            if name == UNIT_SYMBOL && !(guard.0.is_one() && guard.1.is_one()) {
                return Err(Error::InvalidGuard(
                    "unit symbol must have guard [1,1]".to_string(),
                ));
            }
            entries.push(BasisEntry { name, guard });
        }
        for i in 0..entries.len() {
            for j in i + 1..entries.len() {
                if entries[i].name == entries[j].name {
                    return Err(Error::DuplicateSymbol(entries[i].name.clone()));
                }
            }
        }
        let id = context_id(&entries);
        Ok(Arc::new(ScalarContext { id, basis: entries }))
    }

    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[BasisEntry] {
        &self.basis
    }

    pub fn symbol_index(&self, name: &str) -> Option<usize> {
        self.basis.iter().position(|e| e.name == name)
    }
}

impl PartialEq for ScalarContext {
    fn eq(&self, other: &Self) -> bool {
        self.id == other.id && self.basis == other.basis
    }
}
impl Eq for ScalarContext {}

/// An exact real: a rational coefficient vector over the context basis.
#[derive(Clone)]
pub struct Scalar {
    ctx: Arc<ScalarContext>,
    coeffs: Vec<Q>,
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        self.ctx.id == other.ctx.id && self.coeffs == other.coeffs
    }
}
impl Eq for Scalar {}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Scalar({self})")
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (c, e) in self.coeffs.iter().zip(self.ctx.basis.iter()) {
            if c.is_zero() {
                continue;
            }
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
                first = false;
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let a = c.abs();
            if e.name == UNIT_SYMBOL {
                write!(f, "{}", format_q(&a))?;
            } else if a.is_one() {
                write!(f, "{}", e.name)?;
            } else {
                write!(f, "{}*{}", format_q(&a), e.name)?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl Scalar {
    pub fn zero(ctx: &Arc<ScalarContext>) -> Self {
        Scalar {
            ctx: ctx.clone(),
            coeffs: vec![Q::zero(); ctx.dim()],
        }
    }

    pub fn from_rational(ctx: &Arc<ScalarContext>, r: Q) -> Self {
        let mut s = Self::zero(ctx);
        s.coeffs[0] = r;
        s
    }

    pub fn from_int(ctx: &Arc<ScalarContext>, n: i64) -> Self {
        Self::from_rational(ctx, Q::from_integer(n.into()))
    }

    /// The basis symbol with the given name, as a scalar.
    pub fn symbol(ctx: &Arc<ScalarContext>, name: &str) -> Option<Self> {
        let idx = ctx.symbol_index(name)?;
        let mut s = Self::zero(ctx);
        s.coeffs[idx] = Q::one();
        Some(s)
    }

    pub fn from_coeffs(ctx: &Arc<ScalarContext>, coeffs: Vec<Q>) -> Result<Self> {
        if coeffs.len() != ctx.dim() {
            return Err(Error::InvalidElement(format!(
                "coefficient vector has length {}, context has {} basis elements",
                coeffs.len(),
                ctx.dim()
            )));
        }
        Ok(Scalar {
            ctx: ctx.clone(),
            coeffs,
        })
    }

    pub fn context(&self) -> &Arc<ScalarContext> {
        &self.ctx
    }

    pub fn coeffs(&self) -> &[Q] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Q::is_zero)
    }

    /// `Some(r)` when the value is the rational `r` (only the unit
    /// coefficient is nonzero).
    pub fn as_rational(&self) -> Option<&Q> {
        if self.coeffs[1..].iter().all(Q::is_zero) {
            Some(&self.coeffs[0])
        } else {
            None
        }
    }

    fn check_ctx(&self, other: &Scalar) -> Result<()> {
        if self.ctx.id == other.ctx.id {
            Ok(())
        } else {
            Err(Error::ContextMismatch)
        }
    }

    pub fn add(&self, other: &Scalar) -> Result<Scalar> {
        self.check_ctx(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Scalar {
            ctx: self.ctx.clone(),
            coeffs,
        })
    }

    pub fn neg(&self) -> Scalar {
        Scalar {
            ctx: self.ctx.clone(),
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn sub(&self, other: &Scalar) -> Result<Scalar> {
        self.add(&other.neg())
    }

    pub fn scale(&self, r: &Q) -> Scalar {
        Scalar {
            ctx: self.ctx.clone(),
            coeffs: self.coeffs.iter().map(|c| c * r).collect(),
        }
    }

    /// Guard interval of the value, by exact interval arithmetic over the
    /// basis guards.
    pub fn guard(&self) -> (Q, Q) {
        let mut lo = Q::zero();
        let mut hi = Q::zero();
        for (c, e) in self.coeffs.iter().zip(self.ctx.basis.iter()) {
            if c.is_zero() {
                continue;
            }
            let (l, h) = scale_interval(c, &e.guard.0, &e.guard.1);
            lo += l;
            hi += h;
        }
        (lo, hi)
    }

    /// Decides the order of two scalars. Equal coefficient vectors compare
    /// `Equal`; otherwise the sign of `self - other` is read off the guard
    /// interval, and an interval straddling or touching zero is a
    /// [`Error::Precision`] rather than a guess.
    pub fn cmp_guarded(&self, other: &Scalar) -> Result<Ordering> {
        self.check_ctx(other)?;
        if self.coeffs == other.coeffs {
            return Ok(Ordering::Equal);
        }
        let diff = self.sub(other)?;
        let (lo, hi) = diff.guard();
        if lo.is_positive() {
            Ok(Ordering::Greater)
        } else if hi.is_negative() {
            Ok(Ordering::Less)
        } else {
            Err(Error::Precision(format!(
                "difference guard [{}, {}] contains 0 for distinct values",
                format_q(&lo),
                format_q(&hi)
            )))
        }
    }

    pub fn is_positive(&self) -> Result<bool> {
        let zero = Scalar::zero(&self.ctx);
        Ok(self.cmp_guarded(&zero)? == Ordering::Greater)
    }

    pub fn min(&self, other: &Scalar) -> Result<Scalar> {
        Ok(match self.cmp_guarded(other)? {
            Ordering::Greater => other.clone(),
            _ => self.clone(),
        })
    }

    pub fn max(&self, other: &Scalar) -> Result<Scalar> {
        Ok(match self.cmp_guarded(other)? {
            Ordering::Less => other.clone(),
            _ => self.clone(),
        })
    }

    /// Total-order key: the coefficient vector itself. This orders scalars
    /// lexicographically, which is *not* the numeric order; it is used only
    /// to canonicalize term lists where any fixed total order will do.
    pub fn lex_key(&self) -> &[Q] {
        &self.coeffs
    }
}

/// Sorts scalars (with payloads) into strictly increasing numeric order,
/// merging payloads at equal scalars with `merge`. Fails with
/// [`Error::Precision`] when the guards cannot decide an order.
pub fn sort_merge_by_value<T>(
    items: Vec<(Scalar, T)>,
    mut merge: impl FnMut(&mut T, T),
) -> Result<Vec<(Scalar, T)>> {
    let mut out: Vec<(Scalar, T)> = Vec::with_capacity(items.len());
    for (s, payload) in items {
        // Insertion sort: n is small everywhere this is used.
        let mut action = out.len(); // insert position, or usize::MAX marker via merge_at
        let mut merge_at = None;
        for i in 0..out.len() {
            match s.cmp_guarded(&out[i].0)? {
                Ordering::Less => {
                    action = i;
                    break;
                }
                Ordering::Equal => {
                    merge_at = Some(i);
                    break;
                }
                Ordering::Greater => {}
            }
        }
        match merge_at {
            Some(i) => merge(&mut out[i].1, payload),
            None => out.insert(action, (s, payload)),
        }
    }
    Ok(out)
}

/// Row-reduces the rational span of `vs`: returns a basis of the span (rows
/// of the reduced row echelon form, pivots in basis-index order) and the
/// coordinates of each input in that basis.
pub fn q_span_reduce(vs: &[Scalar]) -> Result<(Vec<Scalar>, Vec<Vec<Q>>)> {
    if vs.is_empty() {
        return Ok((Vec::new(), Vec::new()));
    }
    let ctx = vs[0].context().clone();
    for v in vs {
        if v.context().id() != ctx.id() {
            return Err(Error::ContextMismatch);
        }
    }
    let dim = ctx.dim();
    let mut rows: Vec<Vec<Q>> = vs.iter().map(|v| v.coeffs().to_vec()).collect();
    let mut pivots: Vec<usize> = Vec::new();
    let mut rank = 0usize;
    for col in 0..dim {
        let Some(pivot_row) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, pivot_row);
        let inv = rows[rank][col].recip();
        for x in rows[rank].iter_mut() {
            *x = &*x * &inv;
        }
        for r in 0..rows.len() {
            if r != rank && !rows[r][col].is_zero() {
                let factor = rows[r][col].clone();
                for c in 0..dim {
                    let sub = &factor * &rows[rank][c];
                    rows[r][c] = &rows[r][c] - sub;
                }
            }
        }
        pivots.push(col);
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    let basis: Vec<Scalar> = rows[..rank]
        .iter()
        .map(|row| Scalar {
            ctx: ctx.clone(),
            coeffs: row.clone(),
        })
        .collect();
    // In RREF each pivot column is a unit vector, so the coordinates of any
    // input are its entries at the pivot columns.
    let coords: Vec<Vec<Q>> = vs
        .iter()
        .map(|v| pivots.iter().map(|&p| v.coeffs()[p].clone()).collect())
        .collect();
    Ok((basis, coords))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qi};

    pub(crate) fn test_ctx() -> Arc<ScalarContext> {
        ScalarContext::new(vec![
            ("u".to_string(), (q(141, 100), q(142, 100))),
            ("v".to_string(), (q(173, 100), q(174, 100))),
        ])
        .unwrap()
    }

    #[test]
    fn unit_only_context() {
        let ctx = ScalarContext::new(vec![]).unwrap();
        assert_eq!(ctx.dim(), 1);
        assert_eq!(ctx.basis()[0].name, UNIT_SYMBOL);
    }

    #[test]
    fn declared_basis_keeps_unit_first() {
        let ctx = test_ctx();
        assert_eq!(ctx.dim(), 3);
        assert_eq!(ctx.basis()[0].name, "1");
        assert_eq!(ctx.basis()[1].name, "u");
    }

    #[test]
    fn duplicate_symbol_rejected() {
        let err = ScalarContext::new(vec![
            ("u".to_string(), (qi(1), qi(2))),
            ("u".to_string(), (qi(1), qi(2))),
        ])
        .unwrap_err();
        assert_eq!(err, Error::DuplicateSymbol("u".to_string()));
    }

    #[test]
    fn bad_guard_rejected() {
        let err = ScalarContext::new(vec![("u".to_string(), (qi(2), qi(1)))]).unwrap_err();
        assert!(matches!(err, Error::InvalidGuard(_)));
    }

    #[test]
    fn linear_ops_are_coefficientwise() {
        let ctx = test_ctx();
        let one = Scalar::from_int(&ctx, 1);
        let u = Scalar::symbol(&ctx, "u").unwrap();
        let sum = u.add(&one).unwrap();
        assert_eq!(sum.coeffs()[0], qi(1));
        assert_eq!(sum.coeffs()[1], qi(1));
        assert_eq!(u.neg().coeffs()[1], qi(-1));
        let scaled = sum.scale(&q(3, 2));
        assert_eq!(scaled.coeffs()[0], q(3, 2));
        assert_eq!(scaled.coeffs()[1], q(3, 2));
    }

    #[test]
    fn context_mismatch_detected() {
        let a = Scalar::from_int(&test_ctx(), 1);
        let other = ScalarContext::new(vec![("w".to_string(), (qi(2), qi(3)))]).unwrap();
        let b = Scalar::from_int(&other, 1);
        assert_eq!(a.add(&b).unwrap_err(), Error::ContextMismatch);
    }

    #[test]
    fn cmp_equal_on_identical_vectors() {
        let ctx = test_ctx();
        let u = Scalar::symbol(&ctx, "u").unwrap();
        assert_eq!(u.cmp_guarded(&u).unwrap(), Ordering::Equal);
    }

    #[test]
    fn cmp_orders_via_guards() {
        let ctx = test_ctx();
        let one = Scalar::from_int(&ctx, 1);
        let u = Scalar::symbol(&ctx, "u").unwrap();
        assert_eq!(one.cmp_guarded(&u).unwrap(), Ordering::Less);
        assert_eq!(u.cmp_guarded(&one).unwrap(), Ordering::Greater);
    }

    #[test]
    fn cmp_refuses_straddling_guard() {
        let ctx = test_ctx();
        let u = Scalar::symbol(&ctx, "u").unwrap();
        // 141/100 is the left endpoint of u's guard: the difference guard is
        // [0, 1/100], which touches zero.
        let r = Scalar::from_rational(&ctx, q(141, 100));
        assert!(matches!(u.cmp_guarded(&r), Err(Error::Precision(_))));
    }

    #[test]
    fn span_reduce_rational_multiple() {
        let ctx = test_ctx();
        let u = Scalar::symbol(&ctx, "u").unwrap();
        let two_u = u.scale(&qi(2));
        let (basis, coords) = q_span_reduce(&[u.clone(), two_u]).unwrap();
        assert_eq!(basis.len(), 1);
        assert_eq!(basis[0], u);
        assert_eq!(coords, vec![vec![qi(1)], vec![qi(2)]]);
    }

    #[test]
    fn span_reduce_independent_pair() {
        let ctx = test_ctx();
        let one = Scalar::from_int(&ctx, 1);
        let u = Scalar::symbol(&ctx, "u").unwrap();
        let (basis, coords) = q_span_reduce(&[one.clone(), u.clone()]).unwrap();
        assert_eq!(basis, vec![one, u]);
        assert_eq!(coords, vec![vec![qi(1), qi(0)], vec![qi(0), qi(1)]]);
    }

    #[test]
    fn span_reduce_rank_two_mix() {
        let ctx = test_ctx();
        let one = Scalar::from_int(&ctx, 1);
        let u = Scalar::symbol(&ctx, "u").unwrap();
        let a = one.add(&u).unwrap();
        let b = one.sub(&u).unwrap();
        let (basis, coords) = q_span_reduce(&[a.clone(), b.clone(), u.clone()]).unwrap();
        assert_eq!(basis.len(), 2);
        assert_eq!(
            coords,
            vec![vec![qi(1), qi(1)], vec![qi(1), qi(-1)], vec![qi(0), qi(1)]]
        );
        // coords * basis reproduces each input exactly
        for (v, cs) in [a, b, u].iter().zip(&coords) {
            let mut acc = Scalar::zero(&ctx);
            for (c, bvec) in cs.iter().zip(&basis) {
                acc = acc.add(&bvec.scale(c)).unwrap();
            }
            assert_eq!(&acc, v);
        }
    }

    #[test]
    fn module_axioms_on_random_vectors() {
        use rand::rngs::StdRng;
        use rand::{Rng, SeedableRng};
        let ctx = test_ctx();
        let mut rng = StdRng::seed_from_u64(41);
        let rand_scalar = |rng: &mut StdRng| {
            let coeffs: Vec<Q> = (0..ctx.dim())
                .map(|_| q(rng.gen_range(-9..=9), rng.gen_range(1..=5)))
                .collect();
            Scalar::from_coeffs(&ctx, coeffs).unwrap()
        };
        for _ in 0..50 {
            let a = rand_scalar(&mut rng);
            let b = rand_scalar(&mut rng);
            let c = rand_scalar(&mut rng);
            let r = q(rng.gen_range(-5..=5), rng.gen_range(1..=4));
            let s = q(rng.gen_range(-5..=5), rng.gen_range(1..=4));
            // abelian group
            assert_eq!(a.add(&b).unwrap(), b.add(&a).unwrap());
            assert_eq!(
                a.add(&b).unwrap().add(&c).unwrap(),
                a.add(&b.add(&c).unwrap()).unwrap()
            );
            assert_eq!(a.add(&Scalar::zero(&ctx)).unwrap(), a);
            assert!(a.add(&a.neg()).unwrap().is_zero());
            // rational module
            assert_eq!(a.scale(&r).scale(&s), a.scale(&(&r * &s)));
            assert_eq!(
                a.add(&b).unwrap().scale(&r),
                a.scale(&r).add(&b.scale(&r)).unwrap()
            );
            assert_eq!(a.scale(&(&r + &s)), a.scale(&r).add(&a.scale(&s)).unwrap());
        }
    }

    #[test]
    fn cmp_totally_orders_separated_values() {
        let ctx = test_ctx();
        let one = Scalar::from_int(&ctx, 1);
        let u = Scalar::symbol(&ctx, "u").unwrap();
        let v = Scalar::symbol(&ctx, "v").unwrap();
        let vals = [
            Scalar::zero(&ctx),
            one.clone(),
            u.clone(),
            v.clone(),
            u.add(&v).unwrap(),
            one.scale(&q(5, 2)),
        ];
        for (i, a) in vals.iter().enumerate() {
            for (j, b) in vals.iter().enumerate() {
                let ord = a.cmp_guarded(b).unwrap();
                assert_eq!(ord == Ordering::Equal, i == j);
                assert_eq!(b.cmp_guarded(a).unwrap(), ord.reverse());
            }
        }
    }

    #[test]
    fn sort_merge_orders_and_merges() {
        let ctx = test_ctx();
        let one = Scalar::from_int(&ctx, 1);
        let u = Scalar::symbol(&ctx, "u").unwrap();
        let items = vec![(u.clone(), 1i64), (one.clone(), 2), (u.clone(), 3)];
        let sorted = sort_merge_by_value(items, |a, b| *a += b).unwrap();
        assert_eq!(sorted.len(), 2);
        assert_eq!(sorted[0], (one, 2));
        assert_eq!(sorted[1], (u, 4));
    }

    #[test]
    fn values_are_shareable_across_threads() {
        fn assert_send_sync<T: Send + Sync>() {}
        assert_send_sync::<ScalarContext>();
        assert_send_sync::<Scalar>();
        assert_send_sync::<crate::polytope::PtElement>();
        assert_send_sync::<crate::iet::Iet>();
        assert_send_sync::<crate::homology::BarChain>();
        assert_send_sync::<crate::spans::Viaduct>();
    }
}
