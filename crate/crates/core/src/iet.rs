//! Interval exchange transformations as exact piecewise translations.
//!
//! An [`Iet`] is a bijection of `[0, L)` that translates each piece of a
//! finite half-open partition. The canonical form merges adjacent pieces
//! with equal offsets, so equality of transformations is structural
//! equality. Every comparison of breakpoints goes through the guarded
//! scalar order and is exact.

use std::cmp::Ordering;
use std::sync::Arc;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::rational::Q;
use crate::scalar::{Scalar, ScalarContext};

/// A nondegenerate half-open interval `[lo, hi)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interval {
    pub lo: Scalar,
    pub hi: Scalar,
}

impl Interval {
    pub fn new(lo: Scalar, hi: Scalar) -> Result<Self> {
        match lo.cmp_guarded(&hi)? {
            Ordering::Less => Ok(Interval { lo, hi }),
            _ => Err(Error::EmptyInterval),
        }
    }

    pub fn length(&self) -> Scalar {
        self.hi
            .sub(&self.lo)
            .expect("interval endpoints share a context")
    }

    pub fn translate(&self, t: &Scalar) -> Result<Interval> {
        Ok(Interval {
            lo: self.lo.add(t)?,
            hi: self.hi.add(t)?,
        })
    }

    pub fn contains(&self, p: &Scalar) -> Result<bool> {
        Ok(self.lo.cmp_guarded(p)? != Ordering::Greater
            && p.cmp_guarded(&self.hi)? == Ordering::Less)
    }

    /// Intersection, or `None` when the interiors are disjoint.
    pub fn intersect(&self, other: &Interval) -> Result<Option<Interval>> {
        let lo = self.lo.max(&other.lo)?;
        let hi = self.hi.min(&other.hi)?;
        match lo.cmp_guarded(&hi)? {
            Ordering::Less => Ok(Some(Interval { lo, hi })),
            _ => Ok(None),
        }
    }
}

/// An interval exchange transformation of `[0, L)`. Pieces are stored as
/// `(lo, offset)` with the upper endpoint implied by the next piece (or `L`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Iet {
    length: Scalar,
    pieces: Vec<(Scalar, Scalar)>,
}

impl Iet {
    pub fn identity(length: &Scalar) -> Result<Self> {
        if !length.is_positive()? {
            return Err(Error::NonpositiveLength);
        }
        let zero = Scalar::zero(length.context());
        Ok(Iet {
            length: length.clone(),
            pieces: vec![(zero.clone(), zero)],
        })
    }

    /// Clockwise rotation by `t`: `[0, L-t)` is shifted up by `t` and the
    /// tail `[L-t, L)` wraps down by `t - L`. Requires `0 <= t < L`; callers
    /// reduce modulo `L` first (see [`reduce_mod`]).
    pub fn rotation(length: &Scalar, t: &Scalar) -> Result<Self> {
        if !length.is_positive()? {
            return Err(Error::NonpositiveLength);
        }
        let zero = Scalar::zero(length.context());
        match t.cmp_guarded(&zero)? {
            Ordering::Less => return Err(Error::OutOfRange),
            Ordering::Equal => return Iet::identity(length),
            Ordering::Greater => {}
        }
        if t.cmp_guarded(length)? != Ordering::Less {
            return Err(Error::OutOfRange);
        }
        let cut = length.sub(t)?;
        let wrap = t.sub(length)?;
        Ok(Iet {
            length: length.clone(),
            pieces: vec![(zero, t.clone()), (cut, wrap)],
        })
    }

    /// Builds a transformation from an explicit partition. Validates that
    /// the domain pieces start at 0, that image pieces partition `[0, L)`,
    /// and merges adjacent pieces with equal offsets.
    pub fn from_pieces(length: &Scalar, pieces: Vec<(Scalar, Scalar)>) -> Result<Self> {
        if !length.is_positive()? {
            return Err(Error::NonpositiveLength);
        }
        if pieces.is_empty() {
            return Err(Error::InvalidElement("no pieces".to_string()));
        }
        let ctx = length.context();
        let zero = Scalar::zero(ctx);
        if pieces[0].0 != zero {
            return Err(Error::InvalidElement(
                "first piece must start at 0".to_string(),
            ));
        }
        for w in pieces.windows(2) {
            if w[0].0.cmp_guarded(&w[1].0)? != Ordering::Less {
                return Err(Error::InvalidElement(
                    "piece breakpoints must be strictly increasing".to_string(),
                ));
            }
        }
        if let Some(last) = pieces.last() {
            if last.0.cmp_guarded(length)? != Ordering::Less {
                return Err(Error::InvalidElement(
                    "piece starts past the total length".to_string(),
                ));
            }
        }
        let iet = Iet {
            length: length.clone(),
            pieces,
        }
        .merged();
        iet.validate_image()?;
        Ok(iet)
    }

    /// Classical IET data: piece lengths in domain order and the permutation
    /// `perm` sending domain position to image position.
    pub fn from_lengths_and_permutation(lengths: &[Scalar], perm: &[usize]) -> Result<Self> {
        if lengths.is_empty() || perm.len() != lengths.len() {
            return Err(Error::InvalidElement("bad IET data".to_string()));
        }
        let mut seen = vec![false; perm.len()];
        for &p in perm {
            if p >= perm.len() || seen[p] {
                return Err(Error::InvalidElement("not a permutation".to_string()));
            }
            seen[p] = true;
        }
        let ctx = lengths[0].context().clone();
        for l in lengths {
            if !l.is_positive()? {
                return Err(Error::NonpositiveLength);
            }
        }
        let mut total = Scalar::zero(&ctx);
        let mut domain_starts = Vec::with_capacity(lengths.len());
        for l in lengths {
            domain_starts.push(total.clone());
            total = total.add(l)?;
        }
        // image start of piece i: total length of pieces placed before it
        let mut pieces = Vec::with_capacity(lengths.len());
        for (i, start) in domain_starts.iter().enumerate() {
            let mut img_start = Scalar::zero(&ctx);
            for j in 0..lengths.len() {
                if perm[j] < perm[i] {
                    img_start = img_start.add(&lengths[j])?;
                }
            }
            pieces.push((start.clone(), img_start.sub(start)?));
        }
        Iet::from_pieces(&total, pieces)
    }

    fn merged(mut self) -> Self {
        let mut out: Vec<(Scalar, Scalar)> = Vec::with_capacity(self.pieces.len());
        for (lo, off) in self.pieces.drain(..) {
            match out.last() {
                Some((_, prev)) if *prev == off => {}
                _ => out.push((lo, off)),
            }
        }
        self.pieces = out;
        self
    }

    fn validate_image(&self) -> Result<()> {
        let ctx = self.length.context();
        let zero = Scalar::zero(ctx);
        let mut images: Vec<(Scalar, Scalar)> = Vec::with_capacity(self.pieces.len());
        for (iv, off) in self.pieces_with_ends() {
            images.push((iv.lo.add(&off)?, iv.hi.add(&off)?));
        }
        let mut overlap = false;
        let images = crate::scalar::sort_merge_by_value(images, |_, _| overlap = true)?;
        if overlap {
            return Err(Error::InvalidElement(
                "two image pieces share a left endpoint".to_string(),
            ));
        }
        let mut cursor = zero;
        for (lo, hi) in &images {
            if lo != &cursor {
                return Err(Error::InvalidElement(
                    "image pieces do not tile [0, L)".to_string(),
                ));
            }
            cursor = hi.clone();
        }
        if cursor != self.length {
            return Err(Error::InvalidElement(
                "image pieces do not reach L".to_string(),
            ));
        }
        Ok(())
    }

    pub fn length(&self) -> &Scalar {
        &self.length
    }

    pub fn context(&self) -> &Arc<ScalarContext> {
        self.length.context()
    }

    /// Pieces as `(interval, offset)` with explicit upper endpoints.
    pub fn pieces_with_ends(&self) -> Vec<(Interval, Scalar)> {
        let mut out = Vec::with_capacity(self.pieces.len());
        for (i, (lo, off)) in self.pieces.iter().enumerate() {
            let hi = self
                .pieces
                .get(i + 1)
                .map(|(next, _)| next.clone())
                .unwrap_or_else(|| self.length.clone());
            out.push((Interval { lo: lo.clone(), hi }, off.clone()));
        }
        out
    }

    pub fn pieces(&self) -> &[(Scalar, Scalar)] {
        &self.pieces
    }

    /// Interior breakpoints (piece starts, excluding 0).
    pub fn breakpoints(&self) -> Vec<Scalar> {
        self.pieces
            .iter()
            .skip(1)
            .map(|(lo, _)| lo.clone())
            .collect()
    }

    pub fn is_identity(&self) -> bool {
        self.pieces.len() == 1 && self.pieces[0].1.is_zero()
    }

    /// Offset of the piece containing `p`, for `0 <= p < L`.
    pub fn offset_at(&self, p: &Scalar) -> Result<Scalar> {
        let zero = Scalar::zero(self.length.context());
        if p.cmp_guarded(&zero)? == Ordering::Less || p.cmp_guarded(&self.length)? != Ordering::Less
        {
            return Err(Error::OutOfDomain);
        }
        // Last piece whose start is <= p.
        let mut off = &self.pieces[0].1;
        for (lo, o) in &self.pieces[1..] {
            if lo.cmp_guarded(p)? != Ordering::Greater {
                off = o;
            } else {
                break;
            }
        }
        Ok(off.clone())
    }

    pub fn apply(&self, p: &Scalar) -> Result<Scalar> {
        p.add(&self.offset_at(p)?)
    }

    /// `self ∘ other`: first `other`, then `self`.
    pub fn compose(&self, other: &Iet) -> Result<Iet> {
        if self.length != other.length {
            return Err(Error::LengthMismatch);
        }
        let mut pieces: Vec<(Scalar, Scalar)> = Vec::new();
        for (iv, off) in other.pieces_with_ends() {
            // Split [iv.lo, iv.hi) at the preimages of self's breakpoints.
            let mut cuts = vec![iv.lo.clone()];
            for b in self.breakpoints() {
                let pulled = b.sub(&off)?;
                if iv.lo.cmp_guarded(&pulled)? == Ordering::Less
                    && pulled.cmp_guarded(&iv.hi)? == Ordering::Less
                {
                    cuts.push(pulled);
                }
            }
            let cuts = crate::scalar::sort_merge_by_value(
                cuts.into_iter().map(|c| (c, ())).collect(),
                |_, _| {},
            )?;
            for (lo, _) in cuts {
                let image = lo.add(&off)?;
                let total = off.add(&self.offset_at(&image)?)?;
                pieces.push((lo, total));
            }
        }
        Iet::from_pieces(&self.length, pieces)
    }

    pub fn inverse(&self) -> Result<Iet> {
        let mut pieces: Vec<(Scalar, Scalar)> = Vec::with_capacity(self.pieces.len());
        for (iv, off) in self.pieces_with_ends() {
            pieces.push((iv.lo.add(&off)?, off.neg()));
        }
        let pieces = crate::scalar::sort_merge_by_value(pieces, |_, _| {})?
            .into_iter()
            .collect();
        Iet::from_pieces(&self.length, pieces)
    }

    /// Places `other` after `self` on `[0, L1 + L2)`.
    pub fn stack(&self, other: &Iet) -> Result<Iet> {
        if self.context().id() != other.context().id() {
            return Err(Error::ContextMismatch);
        }
        let total = self.length.add(&other.length)?;
        let mut pieces = self.pieces.clone();
        for (lo, off) in &other.pieces {
            pieces.push((lo.add(&self.length)?, off.clone()));
        }
        Iet::from_pieces(&total, pieces)
    }

    /// Scales breakpoints, offsets and length by a positive rational.
    pub fn rescale(&self, factor: &Q) -> Result<Iet> {
        if factor <= &Q::zero() {
            return Err(Error::NonpositiveFactor);
        }
        let pieces = self
            .pieces
            .iter()
            .map(|(lo, off)| (lo.scale(factor), off.scale(factor)))
            .collect();
        Iet::from_pieces(&self.length.scale(factor), pieces)
    }
}

/// Reduces `t` into `[0, L)` by adding or subtracting `L`. Terminates for
/// any `t` whose guard interval is finite.
pub fn reduce_mod(t: &Scalar, length: &Scalar) -> Result<Scalar> {
    if !length.is_positive()? {
        return Err(Error::NonpositiveLength);
    }
    let zero = Scalar::zero(t.context());
    let mut t = t.clone();
    loop {
        if t.cmp_guarded(&zero)? == Ordering::Less {
            t = t.add(length)?;
        } else if t.cmp_guarded(length)? != Ordering::Less {
            t = t.sub(length)?;
        } else {
            return Ok(t);
        }
    }
}

/// Total length of the domain pieces; equals `L` for any valid IET.
pub fn piece_length_sum(f: &Iet) -> Scalar {
    let ctx = f.context();
    let mut acc = Scalar::zero(ctx);
    for (iv, _) in f.pieces_with_ends() {
        acc = acc.add(&iv.length()).expect("shared context");
    }
    acc
}
