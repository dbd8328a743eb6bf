//! The concrete span calculus of the line: indexed tuples of intervals,
//! morphisms with translation parts, moves, covering sub-maps, DMC-spans and
//! viaducts.
//!
//! The general machinery is specialized all the way down: objects are
//! nondegenerate half-open intervals, the group is the translations, and a
//! cover of an interval is a finite interior-disjoint decomposition into
//! sub-intervals. "Up to unique isomorphism" statements become canonical
//! constructions because a moved piece keeps its index.
//!
//! Empty pieces are excluded from tuples throughout.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::iet::{Iet, Interval};
use crate::scalar::{Scalar, ScalarContext};

/// A finite indexed family of nondegenerate intervals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tuple {
    items: BTreeMap<usize, Interval>,
}

impl Tuple {
    pub fn new(items: BTreeMap<usize, Interval>) -> Self {
        Tuple { items }
    }

    pub fn singleton(interval: Interval) -> Self {
        let mut items = BTreeMap::new();
        items.insert(0, interval);
        Tuple { items }
    }

    /// Indices `0..n` in the order given.
    pub fn from_intervals(intervals: Vec<Interval>) -> Self {
        Tuple {
            items: intervals.into_iter().enumerate().collect(),
        }
    }

    pub fn items(&self) -> &BTreeMap<usize, Interval> {
        &self.items
    }

    pub fn get(&self, idx: usize) -> Option<&Interval> {
        self.items.get(&idx)
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.items.keys().copied()
    }
}

/// A morphism of tuples: an index map, a translation per source piece, and
/// the requirement that the translated sources over each fiber tile the
/// target piece exactly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpanMorphism {
    source: Tuple,
    target: Tuple,
    index_map: BTreeMap<usize, usize>,
    translations: BTreeMap<usize, Scalar>,
}

impl SpanMorphism {
    pub fn new(
        source: Tuple,
        target: Tuple,
        index_map: BTreeMap<usize, usize>,
        translations: BTreeMap<usize, Scalar>,
    ) -> Result<Self> {
        let m = SpanMorphism {
            source,
            target,
            index_map,
            translations,
        };
        m.validate()?;
        Ok(m)
    }

    fn validate(&self) -> Result<()> {
        let src_indices: Vec<usize> = self.source.indices().collect();
        if self.index_map.len() != src_indices.len() || self.translations.len() != src_indices.len()
        {
            return Err(Error::InvalidElement(
                "index map and translations must cover the source".to_string(),
            ));
        }
        for i in &src_indices {
            let j = self
                .index_map
                .get(i)
                .ok_or_else(|| Error::InvalidElement(format!("no image for index {i}")))?;
            if self.target.get(*j).is_none() {
                return Err(Error::InvalidElement(format!(
                    "index {i} maps to missing target {j}"
                )));
            }
            if !self.translations.contains_key(i) {
                return Err(Error::InvalidElement(format!(
                    "no translation for index {i}"
                )));
            }
        }
        // Cover condition: translated fibers tile each target piece.
        for j in self.target.indices() {
            let target_iv = self.target.get(j).unwrap();
            let mut pieces: Vec<(Scalar, Scalar)> = Vec::new();
            for i in &src_indices {
                if self.index_map[i] != j {
                    continue;
                }
                let iv = self.source.get(*i).unwrap();
                let t = &self.translations[i];
                pieces.push((iv.lo.add(t)?, iv.hi.add(t)?));
            }
            if pieces.is_empty() {
                return Err(Error::InvalidElement(format!(
                    "target piece {j} receives no source pieces"
                )));
            }
            let mut overlap = false;
            let pieces = crate::scalar::sort_merge_by_value(pieces, |_, _| overlap = true)?;
            if overlap {
                return Err(Error::InvalidElement(
                    "two pieces share a left endpoint in one fiber".to_string(),
                ));
            }
            let mut cursor = target_iv.lo.clone();
            for (lo, hi) in &pieces {
                if lo != &cursor {
                    return Err(Error::InvalidElement(format!(
                        "fiber over target {j} does not tile it"
                    )));
                }
                cursor = hi.clone();
            }
            if cursor != target_iv.hi {
                return Err(Error::InvalidElement(format!(
                    "fiber over target {j} stops short"
                )));
            }
        }
        Ok(())
    }

    pub fn source(&self) -> &Tuple {
        &self.source
    }

    pub fn target(&self) -> &Tuple {
        &self.target
    }

    pub fn index_map(&self) -> &BTreeMap<usize, usize> {
        &self.index_map
    }

    pub fn translations(&self) -> &BTreeMap<usize, Scalar> {
        &self.translations
    }

    pub fn is_move(&self) -> bool {
        let mut seen = std::collections::BTreeSet::new();
        for (i, j) in &self.index_map {
            if !seen.insert(*j) {
                return false;
            }
            let Some(src) = self.source.get(*i) else {
                return false;
            };
            let Some(tgt) = self.target.get(*j) else {
                return false;
            };
            let t = &self.translations[i];
            let moved_lo = src.lo.add(t).expect("shared context");
            let moved_hi = src.hi.add(t).expect("shared context");
            if moved_lo != tgt.lo || moved_hi != tgt.hi {
                return false;
            }
        }
        seen.len() == self.target.len()
    }

    pub fn is_cover(&self) -> bool {
        self.translations.values().all(|t| t.is_zero())
    }

    /// `self ∘ other` (first `other`, then `self`).
    pub fn compose(&self, other: &SpanMorphism) -> Result<SpanMorphism> {
        if self.source != other.target {
            return Err(Error::IncompatibleShapes(
                "composition endpoints disagree".to_string(),
            ));
        }
        let mut index_map = BTreeMap::new();
        let mut translations = BTreeMap::new();
        for i in other.source.indices() {
            let mid = other.index_map[&i];
            index_map.insert(i, self.index_map[&mid]);
            translations.insert(i, other.translations[&i].add(&self.translations[&mid])?);
        }
        SpanMorphism::new(
            other.source.clone(),
            self.target.clone(),
            index_map,
            translations,
        )
    }

    pub fn identity(tuple: &Tuple) -> Result<SpanMorphism> {
        let index_map = tuple.indices().map(|i| (i, i)).collect();
        let translations = zero_translations(tuple);
        SpanMorphism::new(tuple.clone(), tuple.clone(), index_map, translations)
    }
}

/// Zero translations for every piece; empty for the empty tuple.
fn zero_translations(t: &Tuple) -> BTreeMap<usize, Scalar> {
    match t.items.values().next() {
        None => BTreeMap::new(),
        Some(iv) => {
            let ctx = iv.lo.context().clone();
            t.indices().map(|i| (i, Scalar::zero(&ctx))).collect()
        }
    }
}

/// A morphism acting purely by translations: bijective on indices, each
/// translated source piece equal to its target piece.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Move(SpanMorphism);

impl Move {
    pub fn new(m: SpanMorphism) -> Result<Self> {
        if !m.is_move() {
            return Err(Error::InvalidElement("morphism is not a move".to_string()));
        }
        Ok(Move(m))
    }

    /// The move translating piece `i` by `translations[i]`, with the target
    /// tuple derived from the source: moved pieces keep their indices.
    pub fn from_translations(
        source: &Tuple,
        translations: &BTreeMap<usize, Scalar>,
    ) -> Result<Self> {
        let mut target_items = BTreeMap::new();
        for (i, iv) in source.items() {
            let t = translations
                .get(i)
                .ok_or_else(|| Error::InvalidElement(format!("no translation for index {i}")))?;
            target_items.insert(*i, iv.translate(t)?);
        }
        let index_map = source.indices().map(|i| (i, i)).collect();
        let m = SpanMorphism::new(
            source.clone(),
            Tuple::new(target_items),
            index_map,
            translations.clone(),
        )?;
        Move::new(m)
    }

    pub fn identity(tuple: &Tuple) -> Result<Self> {
        Move::new(SpanMorphism::identity(tuple)?)
    }

    pub fn as_morphism(&self) -> &SpanMorphism {
        &self.0
    }

    pub fn inverse(&self) -> Result<Move> {
        let m = &self.0;
        let mut index_map = BTreeMap::new();
        let mut translations = BTreeMap::new();
        for (i, j) in m.index_map.iter() {
            index_map.insert(*j, *i);
            translations.insert(*j, m.translations[i].neg());
        }
        Move::new(SpanMorphism::new(
            m.target.clone(),
            m.source.clone(),
            index_map,
            translations,
        )?)
    }
}

/// A morphism with trivial group part: a pure assembly of pieces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverMap(SpanMorphism);

impl CoverMap {
    pub fn new(m: SpanMorphism) -> Result<Self> {
        if !m.is_cover() {
            return Err(Error::InvalidElement(
                "morphism has nonzero translations".to_string(),
            ));
        }
        Ok(CoverMap(m))
    }

    /// Zero-translation cover with the given index map.
    pub fn from_index_map(
        source: &Tuple,
        target: &Tuple,
        index_map: BTreeMap<usize, usize>,
    ) -> Result<Self> {
        CoverMap::new(SpanMorphism::new(
            source.clone(),
            target.clone(),
            index_map,
            zero_translations(source),
        )?)
    }

    pub fn identity(tuple: &Tuple) -> Result<Self> {
        CoverMap::new(SpanMorphism::identity(tuple)?)
    }

    pub fn as_morphism(&self) -> &SpanMorphism {
        &self.0
    }

    pub fn source(&self) -> &Tuple {
        self.0.source()
    }

    pub fn target(&self) -> &Tuple {
        self.0.target()
    }

    pub fn index_map(&self) -> &BTreeMap<usize, usize> {
        self.0.index_map()
    }
}

/// Factors a morphism as a move followed by a covering sub-map. The middle
/// tuple holds the translated source pieces under their original indices, so
/// the factorization is canonical and round-trips exactly.
pub fn factor_move_cover(m: &SpanMorphism) -> Result<(Move, CoverMap)> {
    let mv = Move::from_translations(m.source(), m.translations())?;
    let cover =
        CoverMap::from_index_map(mv.as_morphism().target(), m.target(), m.index_map().clone())?;
    Ok((mv, cover))
}

/// A commuting square in the double category: moves across, covers down.
///
/// ```text
///   a --top(move)--> b
///   |                |
/// right(cover)   left(cover)
///   v                v
///   c --bottom(mv)-> d
/// ```
///
/// The law is `left ∘ top == bottom ∘ right` as morphisms `a → d`.
#[derive(Debug, Clone)]
pub struct Square {
    pub top: Move,
    pub left: CoverMap,
    pub right: CoverMap,
    pub bottom: Move,
}

impl Square {
    pub fn verify(&self) -> Result<bool> {
        let via_b = self.left.as_morphism().compose(self.top.as_morphism())?;
        let via_c = self
            .bottom
            .as_morphism()
            .compose(self.right.as_morphism())?;
        Ok(via_b == via_c)
    }
}

/// Completes a covering sub-map followed by a move to a square: the move on
/// the coarse tuple lifts through the cover, each fine piece inheriting the
/// translation of the coarse piece it sits in. Always succeeds.
pub fn complete_cover_then_move(cover: &CoverMap, mv: &Move) -> Result<Square> {
    if cover.target() != mv.as_morphism().source() {
        return Err(Error::IncompatibleShapes(
            "cover target is not the move source".to_string(),
        ));
    }
    let mut lifted_translations = BTreeMap::new();
    for i in cover.source().indices() {
        let coarse = cover.index_map()[&i];
        lifted_translations.insert(i, mv.as_morphism().translations()[&coarse].clone());
    }
    let top = Move::from_translations(cover.source(), &lifted_translations)?;
    let mut left_map = BTreeMap::new();
    for i in cover.source().indices() {
        let coarse = cover.index_map()[&i];
        left_map.insert(i, mv.as_morphism().index_map()[&coarse]);
    }
    let left = CoverMap::from_index_map(
        top.as_morphism().target(),
        mv.as_morphism().target(),
        left_map,
    )?;
    let square = Square {
        top,
        left,
        right: cover.clone(),
        bottom: mv.clone(),
    };
    debug_assert!(square.verify()?);
    Ok(square)
}

/// Completes a move followed by a covering sub-map to a square: the fine
/// move descends to the coarse tuple. This requires the translations to be
/// constant on each cover fiber; otherwise no commuting square exists and
/// the input shapes are incompatible.
pub fn complete_move_then_cover(mv: &Move, cover: &CoverMap) -> Result<Square> {
    if mv.as_morphism().source() != cover.source() {
        return Err(Error::IncompatibleShapes(
            "move and cover must share their source".to_string(),
        ));
    }
    // One translation per coarse piece.
    let mut coarse_translations: BTreeMap<usize, Scalar> = BTreeMap::new();
    for i in cover.source().indices() {
        let j = cover.index_map()[&i];
        let t = &mv.as_morphism().translations()[&i];
        match coarse_translations.get(&j) {
            None => {
                coarse_translations.insert(j, t.clone());
            }
            Some(prev) if prev == t => {}
            Some(_) => {
                return Err(Error::IncompatibleShapes(format!(
                    "translations differ within the fiber over target piece {j}"
                )));
            }
        }
    }
    let bottom = Move::from_translations(cover.target(), &coarse_translations)?;
    // The move keeps indices, so the moved cover reuses the original map.
    let left = CoverMap::from_index_map(
        mv.as_morphism().target(),
        bottom.as_morphism().target(),
        cover.index_map().clone(),
    )?;
    let square = Square {
        top: mv.clone(),
        left,
        right: cover.clone(),
        bottom,
    };
    debug_assert!(square.verify()?);
    Ok(square)
}

/// Common refinement of two covers of the same target tuple: all nonempty
/// pairwise intersections, with the two covers closing the square.
pub fn covers_common_refinement(
    c1: &CoverMap,
    c2: &CoverMap,
) -> Result<(Tuple, CoverMap, CoverMap)> {
    if c1.target() != c2.target() {
        return Err(Error::TargetMismatch);
    }
    let mut pieces: Vec<(Interval, usize, usize)> = Vec::new();
    for j in c1.target().indices() {
        let mut over1: Vec<usize> = c1
            .source()
            .indices()
            .filter(|i| c1.index_map()[i] == j)
            .collect();
        let mut over2: Vec<usize> = c2
            .source()
            .indices()
            .filter(|i| c2.index_map()[i] == j)
            .collect();
        sort_indices_by_lo(c1.source(), &mut over1)?;
        sort_indices_by_lo(c2.source(), &mut over2)?;
        for &i1 in &over1 {
            for &i2 in &over2 {
                let a = c1.source().get(i1).unwrap();
                let b = c2.source().get(i2).unwrap();
                if let Some(meet) = a.intersect(b)? {
                    pieces.push((meet, i1, i2));
                }
            }
        }
    }
    let refinement = Tuple::from_intervals(pieces.iter().map(|(iv, _, _)| iv.clone()).collect());
    let map1 = pieces
        .iter()
        .enumerate()
        .map(|(l, (_, i1, _))| (l, *i1))
        .collect();
    let map2 = pieces
        .iter()
        .enumerate()
        .map(|(l, (_, _, i2))| (l, *i2))
        .collect();
    let r1 = CoverMap::from_index_map(&refinement, c1.source(), map1)?;
    let r2 = CoverMap::from_index_map(&refinement, c2.source(), map2)?;
    Ok((refinement, r1, r2))
}

fn sort_indices_by_lo(tuple: &Tuple, indices: &mut [usize]) -> Result<()> {
    // Insertion sort with the guarded comparison.
    for i in 1..indices.len() {
        let mut j = i;
        while j > 0 {
            let a = &tuple.get(indices[j - 1]).unwrap().lo;
            let b = &tuple.get(indices[j]).unwrap().lo;
            if a.cmp_guarded(b)? == Ordering::Greater {
                indices.swap(j - 1, j);
                j -= 1;
            } else {
                break;
            }
        }
    }
    Ok(())
}

/// A dissection–move–cover span: the normal form of a scissors-groupoid
/// morphism between tuples.
///
/// ```text
/// target_left <~(dissection)~ middle_left <-(move)- middle_right ~(cover)~> target_right
/// ```
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DmcSpan {
    dissection: CoverMap,
    mv: Move,
    cover: CoverMap,
}

impl DmcSpan {
    pub fn new(dissection: CoverMap, mv: Move, cover: CoverMap) -> Result<Self> {
        if mv.as_morphism().target() != dissection.source() {
            return Err(Error::IncompatibleShapes(
                "move target must be the dissection source".to_string(),
            ));
        }
        if mv.as_morphism().source() != cover.source() {
            return Err(Error::IncompatibleShapes(
                "move source must be the cover source".to_string(),
            ));
        }
        Ok(DmcSpan {
            dissection,
            mv,
            cover,
        })
    }

    pub fn dissection(&self) -> &CoverMap {
        &self.dissection
    }

    pub fn mv(&self) -> &Move {
        &self.mv
    }

    pub fn cover(&self) -> &CoverMap {
        &self.cover
    }

    pub fn target_left(&self) -> &Tuple {
        self.dissection.target()
    }

    pub fn target_right(&self) -> &Tuple {
        self.cover.target()
    }

    pub fn middle_left(&self) -> &Tuple {
        self.dissection.source()
    }

    pub fn middle_right(&self) -> &Tuple {
        self.cover.source()
    }

    /// The piecewise data of the represented morphism, read off the middle:
    /// for each middle-right piece (in index order), its location inside the
    /// right target, the translation applied by the move, and the left
    /// target piece the moved copy lands in.
    pub fn segments(&self) -> Vec<DmcSegment> {
        let mut out = Vec::new();
        for (i, iv) in self.middle_right().items() {
            let moved_idx = self.mv.as_morphism().index_map()[i];
            out.push(DmcSegment {
                middle_index: *i,
                right_target: self.cover.index_map()[i],
                piece: iv.clone(),
                translation: self.mv.as_morphism().translations()[i].clone(),
                left_target: self.dissection.index_map()[&moved_idx],
            });
        }
        out
    }
}

/// One piece of the piecewise-translation bijection a DMC-span represents,
/// in right-target coordinates.
#[derive(Debug, Clone)]
pub struct DmcSegment {
    pub middle_index: usize,
    pub right_target: usize,
    pub piece: Interval,
    pub translation: Scalar,
    pub left_target: usize,
}

/// Represents a span of morphisms out of a common source as a DMC-span by
/// factoring both legs and inserting the move with the translation
/// differences.
pub fn span_to_dmc(left: &SpanMorphism, right: &SpanMorphism) -> Result<DmcSpan> {
    if left.source() != right.source() {
        return Err(Error::IncompatibleShapes(
            "legs must share their source tuple".to_string(),
        ));
    }
    let (mv_left, cover_left) = factor_move_cover(left)?;
    let (mv_right, cover_right) = factor_move_cover(right)?;
    // Move from the right middle to the left middle: Φᵢ - Ψᵢ on piece i.
    let mut diff = BTreeMap::new();
    for i in left.source().indices() {
        diff.insert(i, left.translations()[&i].sub(&right.translations()[&i])?);
    }
    let mv = Move::new(SpanMorphism::new(
        mv_right.as_morphism().target().clone(),
        mv_left.as_morphism().target().clone(),
        mv_right
            .as_morphism()
            .target()
            .indices()
            .map(|i| (i, i))
            .collect(),
        diff,
    )?)?;
    DmcSpan::new(cover_left, mv, cover_right)
}

/// The DMC-span of an interval exchange: dissect `[0, L)` into the
/// transformation's pieces, move them by their offsets, and reassemble.
pub fn dmc_from_iet(f: &Iet) -> Result<DmcSpan> {
    let ctx = f.context().clone();
    let pieces = f.pieces_with_ends();
    let apex = Tuple::from_intervals(pieces.iter().map(|(iv, _)| iv.clone()).collect());
    let whole = Tuple::singleton(Interval::new(Scalar::zero(&ctx), f.length().clone())?);
    let index_map: BTreeMap<usize, usize> = apex.indices().map(|i| (i, 0)).collect();
    let translations: BTreeMap<usize, Scalar> = pieces
        .iter()
        .enumerate()
        .map(|(i, (_, off))| (i, off.clone()))
        .collect();
    let left = SpanMorphism::new(apex.clone(), whole.clone(), index_map.clone(), translations)?;
    let zeros: BTreeMap<usize, Scalar> = apex.indices().map(|i| (i, Scalar::zero(&ctx))).collect();
    let right = SpanMorphism::new(apex, whole, index_map, zeros)?;
    span_to_dmc(&left, &right)
}

/// The subdividing middle row witnessing that two DMC-spans represent the
/// same groupoid morphism.
#[derive(Debug, Clone)]
pub struct SubdivisionCertificate {
    /// The subdividing tuple, in right-target coordinates.
    pub sub: Tuple,
    /// The moved copy of `sub`, in left-target coordinates.
    pub moved_sub: Tuple,
    /// The move `sub → moved_sub`.
    pub mv: Move,
    /// `sub ⇢ d1.middle_right` and `sub ⇢ d2.middle_right`.
    pub to_middle_right: (CoverMap, CoverMap),
    /// `moved_sub ⇢ d1.middle_left` and `moved_sub ⇢ d2.middle_left`.
    pub to_middle_left: (CoverMap, CoverMap),
}

impl SubdivisionCertificate {
    /// Checks every face of the certificate diagram componentwise.
    pub fn verify(&self, d1: &DmcSpan, d2: &DmcSpan) -> Result<bool> {
        let (r1, r2) = &self.to_middle_right;
        let (l1, l2) = &self.to_middle_left;
        // move faces: mvᵢ ∘ rᵢ == lᵢ ∘ mv
        let f1 = d1.mv().as_morphism().compose(r1.as_morphism())?;
        let g1 = l1.as_morphism().compose(self.mv.as_morphism())?;
        if f1 != g1 {
            return Ok(false);
        }
        let f2 = d2.mv().as_morphism().compose(r2.as_morphism())?;
        let g2 = l2.as_morphism().compose(self.mv.as_morphism())?;
        if f2 != g2 {
            return Ok(false);
        }
        // left faces: both dissections agree on the moved subdivision
        let dl1 = d1.dissection().as_morphism().compose(l1.as_morphism())?;
        let dl2 = d2.dissection().as_morphism().compose(l2.as_morphism())?;
        if dl1 != dl2 {
            return Ok(false);
        }
        // right faces: both covers agree on the subdivision
        let cr1 = d1.cover().as_morphism().compose(r1.as_morphism())?;
        let cr2 = d2.cover().as_morphism().compose(r2.as_morphism())?;
        Ok(cr1 == cr2)
    }
}

/// Computes a common subdivision of two DMC-spans with the same outer
/// tuples, or reports that they represent different morphisms. Sameness is
/// decided exactly: on each cell of the common refinement of the two middle
/// partitions both spans act by a translation, and the translations and the
/// left-target pieces must agree.
pub fn dmc_common_subdivision(d1: &DmcSpan, d2: &DmcSpan) -> Result<SubdivisionCertificate> {
    if d1.target_left() != d2.target_left() || d1.target_right() != d2.target_right() {
        return Err(Error::TargetMismatch);
    }
    struct Cell {
        interval: Interval,
        translation: Scalar,
        mid_right_1: usize,
        mid_right_2: usize,
        mid_left_1: usize,
        mid_left_2: usize,
    }
    let segs1 = d1.segments();
    let segs2 = d2.segments();
    let mut cells: Vec<Cell> = Vec::new();
    for rt in d1.target_right().indices() {
        for s1 in segs1.iter().filter(|s| s.right_target == rt) {
            for s2 in segs2.iter().filter(|s| s.right_target == rt) {
                let Some(meet) = s1.piece.intersect(&s2.piece)? else {
                    continue;
                };
                if s1.translation != s2.translation || s1.left_target != s2.left_target {
                    return Err(Error::NotSameMorphism(format!(
                        "at {} in right piece {rt}: ({} -> left {}) vs ({} -> left {})",
                        meet.lo, s1.translation, s1.left_target, s2.translation, s2.left_target,
                    )));
                }
                cells.push(Cell {
                    interval: meet,
                    translation: s1.translation.clone(),
                    mid_right_1: s1.middle_index,
                    mid_right_2: s2.middle_index,
                    mid_left_1: d1.mv().as_morphism().index_map()[&s1.middle_index],
                    mid_left_2: d2.mv().as_morphism().index_map()[&s2.middle_index],
                });
            }
        }
    }
    let sub = Tuple::from_intervals(cells.iter().map(|c| c.interval.clone()).collect());
    let translations: BTreeMap<usize, Scalar> = cells
        .iter()
        .enumerate()
        .map(|(l, c)| (l, c.translation.clone()))
        .collect();
    let mv = Move::from_translations(&sub, &translations)?;
    let moved_sub = mv.as_morphism().target().clone();
    let r1 = CoverMap::from_index_map(
        &sub,
        d1.middle_right(),
        cells
            .iter()
            .enumerate()
            .map(|(l, c)| (l, c.mid_right_1))
            .collect(),
    )?;
    let r2 = CoverMap::from_index_map(
        &sub,
        d2.middle_right(),
        cells
            .iter()
            .enumerate()
            .map(|(l, c)| (l, c.mid_right_2))
            .collect(),
    )?;
    let l1 = CoverMap::from_index_map(
        &moved_sub,
        d1.middle_left(),
        cells
            .iter()
            .enumerate()
            .map(|(l, c)| (l, c.mid_left_1))
            .collect(),
    )?;
    let l2 = CoverMap::from_index_map(
        &moved_sub,
        d2.middle_left(),
        cells
            .iter()
            .enumerate()
            .map(|(l, c)| (l, c.mid_left_2))
            .collect(),
    )?;
    Ok(SubdivisionCertificate {
        sub,
        moved_sub,
        mv,
        to_middle_right: (r1, r2),
        to_middle_left: (l1, l2),
    })
}

/// The normal form of a flag of scissors automorphisms: one common piece
/// tuple, per-level translations, and the sub-covers gluing each level back
/// to the underlying tuples.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Viaduct {
    length: Scalar,
    top: Tuple,
    levels: Vec<BTreeMap<usize, Scalar>>,
    bottoms: Vec<Tuple>,
    subcovers: Vec<CoverMap>,
}

impl Viaduct {
    pub fn new(
        length: Scalar,
        top: Tuple,
        levels: Vec<BTreeMap<usize, Scalar>>,
        bottoms: Vec<Tuple>,
        subcovers: Vec<CoverMap>,
    ) -> Result<Self> {
        let v = Viaduct {
            length,
            top,
            levels,
            bottoms,
            subcovers,
        };
        v.validate()?;
        Ok(v)
    }

    /// The length-zero viaduct on `[0, L)`.
    pub fn trivial(length: &Scalar) -> Result<Self> {
        let ctx = length.context();
        let whole = Interval::new(Scalar::zero(ctx), length.clone())?;
        let top = Tuple::singleton(whole);
        let subcover = CoverMap::identity(&top)?;
        Viaduct::new(
            length.clone(),
            top.clone(),
            Vec::new(),
            vec![top],
            vec![subcover],
        )
    }

    fn validate(&self) -> Result<()> {
        let m = self.levels.len();
        if self.bottoms.len() != m + 1 || self.subcovers.len() != m + 1 {
            return Err(Error::InvalidElement(
                "viaduct needs one bottom tuple and sub-cover per level boundary".to_string(),
            ));
        }
        let indices: Vec<usize> = self.top.indices().collect();
        for level in &self.levels {
            if level.len() != indices.len() || !indices.iter().all(|i| level.contains_key(i)) {
                return Err(Error::InvalidElement(
                    "level translations must cover the common index set".to_string(),
                ));
            }
        }
        for k in 0..=m {
            let expected = self.pieces_at_level(k)?;
            if self.subcovers[k].source() != &expected {
                return Err(Error::InvalidElement(format!(
                    "sub-cover at level {k} has the wrong source"
                )));
            }
            if self.subcovers[k].target() != &self.bottoms[k] {
                return Err(Error::InvalidElement(format!(
                    "sub-cover at level {k} has the wrong target"
                )));
            }
        }
        Ok(())
    }

    pub fn m(&self) -> usize {
        self.levels.len()
    }

    pub fn length(&self) -> &Scalar {
        &self.length
    }

    pub fn context(&self) -> &Arc<ScalarContext> {
        self.length.context()
    }

    /// The common piece tuple at the last level (`b_{m|j}`).
    pub fn top(&self) -> &Tuple {
        &self.top
    }

    /// Per-piece group element at level `k`, `1 <= k <= m`.
    pub fn level(&self, k: usize) -> &BTreeMap<usize, Scalar> {
        &self.levels[k - 1]
    }

    pub fn bottoms(&self) -> &[Tuple] {
        &self.bottoms
    }

    pub fn subcovers(&self) -> &[CoverMap] {
        &self.subcovers
    }

    /// Cumulative translation of piece `j` above level `k`:
    /// `Σ_{l > k} Φ_{l|j}` (the offset of the composite `t_{k+1}` there).
    pub fn cumulative_offset(&self, k: usize, j: usize) -> Result<Scalar> {
        let ctx = self.length.context();
        let mut acc = Scalar::zero(ctx);
        for level in &self.levels[k..] {
            acc = acc.add(&level[&j])?;
        }
        Ok(acc)
    }

    /// The tuple `{b_{k|j}}` at level `k`, `0 <= k <= m`: the top pieces
    /// translated by the cumulative group elements above level `k`.
    pub fn pieces_at_level(&self, k: usize) -> Result<Tuple> {
        let mut items = BTreeMap::new();
        for (j, iv) in self.top.items() {
            let shift = self.cumulative_offset(k, *j)?;
            items.insert(*j, iv.translate(&shift)?);
        }
        Ok(Tuple::new(items))
    }
}

/// Normalizes a flag of interval exchanges on `[0, L)` into a viaduct. With
/// `t_k = f_k ∘ … ∘ f_m`, the common pieces are the refinement of all `t_k`
/// partitions and the level-`k` element on a piece is `t_k - t_{k+1}` there.
pub fn flag_to_viaduct(flags: &[Iet]) -> Result<Viaduct> {
    let first = flags
        .first()
        .ok_or_else(|| Error::InvalidElement("empty flag".to_string()))?;
    let length = first.length().clone();
    for f in flags {
        if f.length() != &length {
            return Err(Error::LengthMismatch);
        }
    }
    let ctx = length.context().clone();
    let m = flags.len();
    // composites t_k = f_k ∘ t_{k+1}, stored as composites[k-1]
    let mut composites: Vec<Iet> = vec![flags[m - 1].clone()];
    for k in (0..m - 1).rev() {
        let next = composites.last().unwrap();
        composites.push(flags[k].compose(next)?);
    }
    composites.reverse();
    // breakpoints of every composite, deduplicated
    let mut cuts: Vec<(Scalar, ())> = vec![(Scalar::zero(&ctx), ())];
    for t in &composites {
        for b in t.breakpoints() {
            cuts.push((b, ()));
        }
    }
    let cuts = crate::scalar::sort_merge_by_value(cuts, |_, _| {})?;
    let mut intervals = Vec::with_capacity(cuts.len());
    for (idx, (lo, _)) in cuts.iter().enumerate() {
        let hi = cuts
            .get(idx + 1)
            .map(|(s, _)| s.clone())
            .unwrap_or_else(|| length.clone());
        intervals.push(Interval::new(lo.clone(), hi)?);
    }
    let top = Tuple::from_intervals(intervals);
    // level data: Φ_{k|j} = offset of t_k minus offset of t_{k+1} on piece j
    let mut levels: Vec<BTreeMap<usize, Scalar>> = Vec::with_capacity(m);
    for k in 1..=m {
        let mut level = BTreeMap::new();
        for (j, iv) in top.items() {
            let here = composites[k - 1].offset_at(&iv.lo)?;
            let above = if k < m {
                composites[k].offset_at(&iv.lo)?
            } else {
                Scalar::zero(&ctx)
            };
            level.insert(*j, here.sub(&above)?);
        }
        levels.push(level);
    }
    let whole = Tuple::singleton(Interval::new(Scalar::zero(&ctx), length.clone())?);
    let bottoms: Vec<Tuple> = (0..=m).map(|_| whole.clone()).collect();
    let probe = Viaduct {
        length: length.clone(),
        top: top.clone(),
        levels: levels.clone(),
        bottoms: bottoms.clone(),
        subcovers: Vec::new(),
    };
    let mut subcovers = Vec::with_capacity(m + 1);
    for k in 0..=m {
        let pieces = probe.pieces_at_level(k)?;
        let index_map = pieces.indices().map(|i| (i, 0)).collect();
        subcovers.push(CoverMap::from_index_map(&pieces, &whole, index_map)?);
    }
    Viaduct::new(length, top, levels, bottoms, subcovers)
}

/// Refines a viaduct along a split of its top tuple: each new piece inherits
/// the group elements of the piece it subdivides.
pub fn viaduct_refine(v: &Viaduct, split: &CoverMap) -> Result<Viaduct> {
    if split.target() != v.top() {
        return Err(Error::TargetMismatch);
    }
    let new_top = split.source().clone();
    let mut new_levels = Vec::with_capacity(v.m());
    for k in 1..=v.m() {
        let old = v.level(k);
        let level: BTreeMap<usize, Scalar> = new_top
            .indices()
            .map(|l| (l, old[&split.index_map()[&l]].clone()))
            .collect();
        new_levels.push(level);
    }
    let probe = Viaduct {
        length: v.length().clone(),
        top: new_top.clone(),
        levels: new_levels.clone(),
        bottoms: v.bottoms().to_vec(),
        subcovers: Vec::new(),
    };
    let mut new_subcovers = Vec::with_capacity(v.m() + 1);
    for k in 0..=v.m() {
        let pieces = probe.pieces_at_level(k)?;
        let index_map = new_top
            .indices()
            .map(|l| (l, v.subcovers()[k].index_map()[&split.index_map()[&l]]))
            .collect();
        new_subcovers.push(CoverMap::from_index_map(
            &pieces,
            &v.bottoms()[k],
            index_map,
        )?);
    }
    Viaduct::new(
        v.length().clone(),
        new_top,
        new_levels,
        v.bottoms().to_vec(),
        new_subcovers,
    )
}

/// Splits every piece of a tuple at its midpoint: a convenient nontrivial
/// refinement for well-definedness checks.
pub fn midpoint_split(tuple: &Tuple) -> Result<CoverMap> {
    use crate::rational::q;
    let mut intervals = Vec::new();
    let mut index_map = BTreeMap::new();
    for (j, iv) in tuple.items() {
        let mid = iv.lo.add(&iv.hi.sub(&iv.lo)?.scale(&q(1, 2)))?;
        index_map.insert(intervals.len(), *j);
        intervals.push(Interval::new(iv.lo.clone(), mid.clone())?);
        index_map.insert(intervals.len(), *j);
        intervals.push(Interval::new(mid, iv.hi.clone())?);
    }
    CoverMap::from_index_map(&Tuple::from_intervals(intervals), tuple, index_map)
}
