//! Finitely generated groups and monoids small enough to enumerate balls in.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{domain, refused, Result};

/// Largest ball this module will enumerate.
pub const MAX_BALL: usize = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case", tag = "kind", content = "params"))]
pub enum GroupKind {
    Z,
    Z2,
    Cyclic(u32),
    /// Free monoid on `k` letters (no inverses).
    FreeMonoid(u32),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Element {
    Z(i64),
    Z2(i64, i64),
    Cyclic(u32),
    /// Word in generator indices; acts right-to-left.
    Word(Vec<u32>),
}

impl Element {
    /// Generator index / exponent pairs, leftmost factor first.
    pub fn letters(&self) -> Vec<(usize, i64)> {
        match self {
            Element::Z(k) => vec![(0, *k)],
            Element::Z2(a, b) => vec![(0, *a), (1, *b)],
            Element::Cyclic(k) => vec![(0, *k as i64)],
            Element::Word(w) => w.iter().map(|&g| (g as usize, 1)).collect(),
        }
    }

    pub fn has_negative_exponent(&self) -> bool {
        self.letters().iter().any(|&(_, e)| e < 0)
    }
}

impl core::fmt::Display for Element {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Element::Z(k) => write!(f, "{k}"),
            Element::Z2(a, b) => write!(f, "({a},{b})"),
            Element::Cyclic(k) => write!(f, "{k}"),
            Element::Word(w) if w.is_empty() => write!(f, "e"),
            Element::Word(w) => {
                for g in w {
                    write!(f, "s{g}")?;
                }
                Ok(())
            }
        }
    }
}

/// A group (or monoid) with a fixed finite generating set `S`.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GeneratedGroup {
    kind: GroupKind,
    generators: Vec<String>,
}

impl GeneratedGroup {
    pub fn new(kind: GroupKind) -> Result<Self> {
        let names = match kind {
            GroupKind::Z | GroupKind::Cyclic(_) => vec![String::from("a")],
            GroupKind::Z2 => vec![String::from("a"), String::from("b")],
            GroupKind::FreeMonoid(k) => (0..k).map(|i| format!("s{i}")).collect(),
        };
        Self::with_names(kind, names)
    }

    pub fn with_names(kind: GroupKind, generators: Vec<String>) -> Result<Self> {
        let expected = match kind {
            GroupKind::Z => 1,
            GroupKind::Z2 => 2,
            GroupKind::Cyclic(m) => {
                if m == 0 {
                    return Err(domain!("cyclic group of order 0"));
                }
                1
            }
            GroupKind::FreeMonoid(k) => {
                if k == 0 {
                    return Err(domain!("free monoid needs at least one letter"));
                }
                k as usize
            }
        };
        if generators.len() != expected {
            return Err(domain!("{kind:?} has {expected} generators, {} names given", generators.len()));
        }
        Ok(GeneratedGroup { kind, generators })
    }

    pub fn z() -> Self {
        Self::new(GroupKind::Z).expect("valid")
    }

    pub fn z2() -> Self {
        Self::new(GroupKind::Z2).expect("valid")
    }

    pub fn cyclic(m: u32) -> Result<Self> {
        Self::new(GroupKind::Cyclic(m))
    }

    pub fn free_monoid(k: u32) -> Result<Self> {
        Self::new(GroupKind::FreeMonoid(k))
    }

    pub fn kind(&self) -> GroupKind {
        self.kind
    }

    pub fn generator_names(&self) -> &[String] {
        &self.generators
    }

    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    /// Whether every element has an inverse.
    pub fn is_group(&self) -> bool {
        !matches!(self.kind, GroupKind::FreeMonoid(_))
    }

    pub fn is_abelian(&self) -> bool {
        !matches!(self.kind, GroupKind::FreeMonoid(k) if k > 1)
    }

    pub fn identity(&self) -> Element {
        match self.kind {
            GroupKind::Z => Element::Z(0),
            GroupKind::Z2 => Element::Z2(0, 0),
            GroupKind::Cyclic(_) => Element::Cyclic(0),
            GroupKind::FreeMonoid(_) => Element::Word(Vec::new()),
        }
    }

    pub fn generator(&self, i: usize) -> Element {
        assert!(i < self.rank(), "generator index out of range");
        match self.kind {
            GroupKind::Z => Element::Z(1),
            GroupKind::Z2 if i == 0 => Element::Z2(1, 0),
            GroupKind::Z2 => Element::Z2(0, 1),
            GroupKind::Cyclic(m) => Element::Cyclic(1 % m),
            GroupKind::FreeMonoid(_) => Element::Word(vec![i as u32]),
        }
    }

    /// The generating set `S` as elements.
    pub fn generators(&self) -> Vec<Element> {
        (0..self.rank()).map(|i| self.generator(i)).collect()
    }

    pub fn contains(&self, e: &Element) -> bool {
        match (self.kind, e) {
            (GroupKind::Z, Element::Z(_)) | (GroupKind::Z2, Element::Z2(..)) => true,
            (GroupKind::Cyclic(m), Element::Cyclic(k)) => *k < m,
            (GroupKind::FreeMonoid(n), Element::Word(w)) => w.iter().all(|&g| g < n),
            _ => false,
        }
    }

    fn check(&self, e: &Element) -> Result<()> {
        if self.contains(e) {
            Ok(())
        } else {
            Err(domain!("{e:?} is not an element of {:?}", self.kind))
        }
    }

    pub fn multiply(&self, a: &Element, b: &Element) -> Result<Element> {
        self.check(a)?;
        self.check(b)?;
        Ok(match (a, b) {
            (Element::Z(x), Element::Z(y)) => Element::Z(x + y),
            (Element::Z2(a1, a2), Element::Z2(b1, b2)) => Element::Z2(a1 + b1, a2 + b2),
            (Element::Cyclic(x), Element::Cyclic(y)) => {
                let GroupKind::Cyclic(m) = self.kind else { unreachable!() };
                Element::Cyclic(((*x as u64 + *y as u64) % m as u64) as u32)
            }
            (Element::Word(x), Element::Word(y)) => {
                let mut w = x.clone();
                w.extend_from_slice(y);
                Element::Word(w)
            }
            _ => unreachable!("checked membership"),
        })
    }

    pub fn inverse(&self, a: &Element) -> Option<Element> {
        if !self.contains(a) {
            return None;
        }
        match a {
            Element::Z(x) => Some(Element::Z(-x)),
            Element::Z2(x, y) => Some(Element::Z2(-x, -y)),
            Element::Cyclic(x) => {
                let GroupKind::Cyclic(m) = self.kind else { unreachable!() };
                Some(Element::Cyclic((m - x) % m))
            }
            Element::Word(w) if w.is_empty() => Some(a.clone()),
            Element::Word(_) => None,
        }
    }

    /// `a^k`; negative powers need an inverse.
    pub fn power(&self, a: &Element, k: i64) -> Result<Element> {
        self.check(a)?;
        Ok(match a {
            Element::Z(x) => Element::Z(x * k),
            Element::Z2(x, y) => Element::Z2(x * k, y * k),
            Element::Cyclic(x) => {
                let GroupKind::Cyclic(m) = self.kind else { unreachable!() };
                Element::Cyclic(((*x as i64 * k).rem_euclid(m as i64)) as u32)
            }
            Element::Word(w) => {
                if k < 0 && !w.is_empty() {
                    return Err(domain!("non-trivial monoid word has no inverse"));
                }
                let reps = k.unsigned_abs() as usize;
                Element::Word(w.iter().cloned().cycle().take(w.len() * reps).collect())
            }
        })
    }

    /// Word length with respect to `S ∪ S⁻¹` (or `S` for monoids).
    pub fn word_length(&self, a: &Element) -> usize {
        match (self.kind, a) {
            (_, Element::Z(x)) => x.unsigned_abs() as usize,
            (_, Element::Z2(x, y)) => (x.unsigned_abs() + y.unsigned_abs()) as usize,
            (GroupKind::Cyclic(m), Element::Cyclic(x)) => (*x).min(m - x) as usize,
            (_, Element::Cyclic(x)) => *x as usize,
            (_, Element::Word(w)) => w.len(),
        }
    }

    /// Elements of word length at most `radius`, ordered by length and then
    /// by value. With `nonnegative`, only products of generators (no
    /// inverses) are listed, which is the ball of the acting monoid.
    pub fn ball(&self, radius: usize, nonnegative: bool) -> Result<Vec<Element>> {
        let r = radius as i64;
        let mut out: Vec<Element> = match self.kind {
            GroupKind::Z => {
                let lo = if nonnegative { 0 } else { -r };
                (lo..=r).map(Element::Z).collect()
            }
            GroupKind::Z2 => {
                let lo = if nonnegative { 0 } else { -r };
                let mut v = Vec::new();
                for a in lo..=r {
                    for b in lo..=r {
                        if a.abs() + b.abs() <= r {
                            v.push(Element::Z2(a, b));
                        }
                    }
                }
                v
            }
            GroupKind::Cyclic(m) => (0..m)
                .filter(|&k| if nonnegative { (k as usize) <= radius } else { k.min(m - k) as usize <= radius })
                .map(Element::Cyclic)
                .collect(),
            GroupKind::FreeMonoid(k) => {
                let mut total = 0usize;
                let mut layer = 1usize;
                for _ in 0..=radius {
                    total = total.saturating_add(layer);
                    layer = layer.saturating_mul(k as usize);
                }
                if total > MAX_BALL {
                    return Err(refused!("ball of radius {radius} in free monoid on {k} letters has {total} words"));
                }
                let mut v = vec![Element::Word(Vec::new())];
                let mut frontier: Vec<Vec<u32>> = vec![Vec::new()];
                for _ in 0..radius {
                    let mut next = Vec::new();
                    for w in &frontier {
                        for g in 0..k {
                            let mut u = w.clone();
                            u.push(g);
                            next.push(u);
                        }
                    }
                    v.extend(next.iter().cloned().map(Element::Word));
                    frontier = next;
                }
                v
            }
        };
        if out.len() > MAX_BALL {
            return Err(refused!("ball too large ({} elements)", out.len()));
        }
        out.sort_by(|a, b| self.word_length(a).cmp(&self.word_length(b)).then_with(|| a.cmp(b)));
        Ok(out)
    }
}

/// A homomorphism given by the images of the source generators.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Homomorphism {
    source: GeneratedGroup,
    target: GeneratedGroup,
    images: Vec<Element>,
}

impl Homomorphism {
    /// Checks that every defining relation of the source maps to the identity.
    pub fn new(source: GeneratedGroup, target: GeneratedGroup, images: Vec<Element>) -> Result<Self> {
        if images.len() != source.rank() {
            return Err(domain!("{} generator images for a source of rank {}", images.len(), source.rank()));
        }
        for im in &images {
            target.check(im)?;
        }
        match source.kind() {
            GroupKind::Z2 => {
                let ab = target.multiply(&images[0], &images[1])?;
                let ba = target.multiply(&images[1], &images[0])?;
                if ab != ba {
                    return Err(domain!("images {} and {} do not commute", images[0], images[1]));
                }
            }
            GroupKind::Cyclic(m) => {
                let p = target.power(&images[0], m as i64)?;
                if p != target.identity() {
                    return Err(domain!("image {} does not have order dividing {m}", images[0]));
                }
            }
            GroupKind::Z | GroupKind::FreeMonoid(_) => {}
        }
        Ok(Homomorphism { source, target, images })
    }

    pub fn identity(g: &GeneratedGroup) -> Self {
        Homomorphism { source: g.clone(), target: g.clone(), images: g.generators() }
    }

    pub fn trivial(source: &GeneratedGroup, target: &GeneratedGroup) -> Self {
        Homomorphism { source: source.clone(), target: target.clone(), images: vec![target.identity(); source.rank()] }
    }

    pub fn source(&self) -> &GeneratedGroup {
        &self.source
    }

    pub fn target(&self) -> &GeneratedGroup {
        &self.target
    }

    pub fn images(&self) -> &[Element] {
        &self.images
    }

    pub fn apply(&self, e: &Element) -> Result<Element> {
        self.source.check(e)?;
        let mut acc = self.target.identity();
        for (g, k) in e.letters() {
            let p = self.target.power(&self.images[g], k)?;
            acc = self.target.multiply(&acc, &p)?;
        }
        Ok(acc)
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &Homomorphism) -> Result<Homomorphism> {
        if next.source != self.target {
            return Err(domain!("cannot compose homomorphisms through different groups"));
        }
        let images = self.images.iter().map(|e| next.apply(e)).collect::<Result<Vec<_>>>()?;
        Homomorphism::new(self.source.clone(), next.target.clone(), images)
    }
}

/// Homomorphisms whose generator images lie in the given candidate set;
/// candidate order fixes the output order (lexicographic in the images).
pub fn enumerate_homomorphisms_from(
    source: &GeneratedGroup,
    target: &GeneratedGroup,
    candidates: &[Element],
) -> Result<Vec<Homomorphism>> {
    if source.is_group() && !target.is_group() {
        return Err(refused!("homomorphisms from {:?} into a free monoid are not enumerated", source.kind()));
    }
    let rank = source.rank();
    let total = candidates.len().checked_pow(rank as u32).unwrap_or(usize::MAX);
    if total > MAX_BALL {
        return Err(refused!("{total} candidate generator assignments"));
    }
    let mut out = Vec::new();
    let mut idx = vec![0usize; rank];
    if candidates.is_empty() {
        return Ok(out);
    }
    loop {
        let images = idx.iter().map(|&i| candidates[i].clone()).collect();
        if let Ok(h) = Homomorphism::new(source.clone(), target.clone(), images) {
            out.push(h);
        }
        let mut k = rank;
        loop {
            if k == 0 {
                return Ok(out);
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < candidates.len() {
                break;
            }
            idx[k] = 0;
        }
    }
}

/// All homomorphisms sending the generators of `source` into the radius-`R`
/// ball of `target`.
pub fn enumerate_homomorphisms(
    source: &GeneratedGroup,
    target: &GeneratedGroup,
    radius: usize,
) -> Result<Vec<Homomorphism>> {
    let ball = target.ball(radius, !target.is_group())?;
    enumerate_homomorphisms_from(source, target, &ball)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn z_into_cyclic_five() {
        let homs = enumerate_homomorphisms(&GeneratedGroup::z(), &GeneratedGroup::cyclic(5).unwrap(), 5).unwrap();
        assert_eq!(homs.len(), 5);
    }

    #[test]
    fn z2_into_z_radius_one() {
        let homs = enumerate_homomorphisms(&GeneratedGroup::z2(), &GeneratedGroup::z(), 1).unwrap();
        assert_eq!(homs.len(), 9);
        let trivial = Homomorphism::trivial(&GeneratedGroup::z2(), &GeneratedGroup::z());
        assert!(homs.contains(&trivial));
    }

    #[test]
    fn cyclic_relation_filters() {
        // Z/4 -> Z/6: images k with 4k ≡ 0 mod 6, i.e. k ∈ {0, 3}.
        let homs = enumerate_homomorphisms(&GeneratedGroup::cyclic(4).unwrap(), &GeneratedGroup::cyclic(6).unwrap(), 6)
            .unwrap();
        let imgs: Vec<_> = homs.iter().map(|h| h.images()[0].clone()).collect();
        assert_eq!(imgs, vec![Element::Cyclic(0), Element::Cyclic(3)]);
    }

    #[test]
    fn group_into_monoid_refused() {
        let r = enumerate_homomorphisms(&GeneratedGroup::z(), &GeneratedGroup::free_monoid(2).unwrap(), 1);
        assert!(matches!(r, Err(crate::Error::Refused(_))));
    }

    #[test]
    fn balls_nest_and_contain_identity() {
        for g in [
            GeneratedGroup::z(),
            GeneratedGroup::z2(),
            GeneratedGroup::cyclic(7).unwrap(),
            GeneratedGroup::free_monoid(2).unwrap(),
        ] {
            for nonneg in [false, true] {
                let b0 = g.ball(0, nonneg).unwrap();
                assert_eq!(b0, vec![g.identity()]);
                for r in 0..4 {
                    let small = g.ball(r, nonneg).unwrap();
                    let big = g.ball(r + 1, nonneg).unwrap();
                    assert!(small.iter().all(|e| big.contains(e)));
                }
            }
        }
        assert_eq!(GeneratedGroup::z2().ball(1, false).unwrap().len(), 5);
        assert_eq!(GeneratedGroup::z2().ball(2, true).unwrap().len(), 6);
    }

    #[test]
    fn homomorphism_application_and_composition() {
        let z = GeneratedGroup::z();
        let z2 = GeneratedGroup::z2();
        let rho = Homomorphism::new(z.clone(), z2.clone(), vec![Element::Z2(1, 0)]).unwrap();
        assert_eq!(rho.apply(&Element::Z(-3)).unwrap(), Element::Z2(-3, 0));
        let back = Homomorphism::new(z2.clone(), z.clone(), vec![Element::Z(1), Element::Z(0)]).unwrap();
        let comp = rho.then(&back).unwrap();
        assert_eq!(comp, Homomorphism::identity(&z));
    }

    #[test]
    fn monoid_arithmetic() {
        let m = GeneratedGroup::free_monoid(2).unwrap();
        let w = m.multiply(&m.generator(0), &m.generator(1)).unwrap();
        assert_eq!(w, Element::Word(vec![0, 1]));
        assert!(m.inverse(&w).is_none());
        assert_eq!(m.power(&w, 2).unwrap(), Element::Word(vec![0, 1, 0, 1]));
        assert_eq!(m.ball(2, true).unwrap().len(), 7);
    }
}
