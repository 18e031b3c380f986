//! Affine iterated function systems on the line and the band/gap
//! structure of their finite-generation approximations.
//!
//! A fully disconnected IFS `{φ_j(s) = δ_j (s - γ_j) + γ_j}` with the maps
//! sorted by fixed point generates, at generation `n`, `Mⁿ` disjoint bands
//! inside the hull `[γ_1, γ_M]`. Gaps between consecutive bands are never
//! filled again: every gap of generation `n - 1` reappears with identical
//! endpoints at generation `n`, at index `M·m` (1-based).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Minimal separation between hull images, relative to the hull length.
pub const DISCONNECTION_TOLERANCE: f64 = 1e-12;

/// Minimal band width, relative to the hull length.
pub const WIDTH_FLOOR: f64 = 1e-13;

/// `s ↦ delta·(s − gamma) + gamma`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AffineMap {
    pub delta: f64,
    pub gamma: f64,
}

impl AffineMap {
    pub fn new(delta: f64, gamma: f64) -> Self {
        Self { delta, gamma }
    }

    /// Applying the map to `gamma` returns `gamma` bit for bit.
    #[inline]
    pub fn apply(&self, s: f64) -> f64 {
        self.delta * (s - self.gamma) + self.gamma
    }

    pub fn apply_interval(&self, iv: Interval) -> Interval {
        Interval {
            lo: self.apply(iv.lo),
            hi: self.apply(iv.hi),
        }
    }
}

/// Closed (band) or open (gap) interval with `lo < hi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo < hi && lo.is_finite() && hi.is_finite() {
            Ok(Self { lo, hi })
        } else {
            Err(Error::DegenerateInterval { lo, hi })
        }
    }

    #[inline]
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    #[inline]
    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn unit_map(&self) -> UnitMap {
        UnitMap {
            lo: self.lo,
            hi: self.hi,
        }
    }
}

/// The affine map `ψ(s) = A s + B` sending an interval onto `[-1, 1]`.
///
/// Evaluated from the endpoints rather than from `(A, B)` so that the
/// endpoints land on `∓1` exactly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitMap {
    lo: f64,
    hi: f64,
}

impl UnitMap {
    /// `A = 2/(hi − lo)`.
    pub fn scale(&self) -> f64 {
        2.0 / (self.hi - self.lo)
    }

    /// `B = −(hi + lo)/(hi − lo)`.
    pub fn offset(&self) -> f64 {
        -(self.hi + self.lo) / (self.hi - self.lo)
    }

    /// Half the interval length, `1/A`.
    pub fn half_width(&self) -> f64 {
        0.5 * (self.hi - self.lo)
    }

    #[inline]
    pub fn forward(&self, s: f64) -> f64 {
        ((s - self.lo) - (self.hi - s)) / (self.hi - self.lo)
    }

    #[inline]
    pub fn inverse(&self, x: f64) -> f64 {
        self.lo + 0.5 * (x + 1.0) * (self.hi - self.lo)
    }
}

/// Coefficients `(A, B)` of the map sending `iv` onto `[-1, 1]`.
pub fn affine_to_unit(iv: Interval) -> Result<UnitMap> {
    let iv = Interval::new(iv.lo, iv.hi)?;
    Ok(iv.unit_map())
}

/// A validated, fully disconnected affine IFS, maps sorted by fixed point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IfsSystem {
    maps: Vec<AffineMap>,
}

impl IfsSystem {
    /// Validates and sorts the maps.
    pub fn new(maps: Vec<AffineMap>) -> Result<Self> {
        validate(maps)
    }

    /// The middle-third Cantor set on `[-1, 1]`.
    pub fn ternary_cantor() -> Self {
        Self::new(vec![AffineMap::new(1.0 / 3.0, -1.0), AffineMap::new(1.0 / 3.0, 1.0)]).expect("ternary IFS is valid")
    }

    pub fn maps(&self) -> &[AffineMap] {
        &self.maps
    }

    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }

    /// `[γ_1, γ_M]`.
    pub fn hull(&self) -> Interval {
        Interval {
            lo: self.maps[0].gamma,
            hi: self.maps[self.maps.len() - 1].gamma,
        }
    }

    pub fn generate_bands(&self, generation: usize) -> Result<BandSystem> {
        generate_bands(self, generation)
    }
}

pub fn validate(mut maps: Vec<AffineMap>) -> Result<IfsSystem> {
    if maps.len() < 2 {
        return Err(Error::TooFewMaps(maps.len()));
    }
    for (index, m) in maps.iter().enumerate() {
        if !(m.delta > 0.0 && m.delta < 1.0) || !m.gamma.is_finite() {
            return Err(Error::NotContractive { index, delta: m.delta });
        }
    }
    maps.sort_by(|a, b| a.gamma.total_cmp(&b.gamma));
    for w in maps.windows(2) {
        if w[0].gamma == w[1].gamma {
            return Err(Error::DuplicateFixedPoints(w[0].gamma));
        }
    }
    let hull = Interval {
        lo: maps[0].gamma,
        hi: maps[maps.len() - 1].gamma,
    };
    let separation = DISCONNECTION_TOLERANCE * hull.width();
    for j in 0..maps.len() - 1 {
        let left = maps[j].apply_interval(hull);
        let right = maps[j + 1].apply_interval(hull);
        if right.lo - left.hi < separation {
            return Err(Error::OverlappingImages { left: j, right: j + 1 });
        }
    }
    Ok(IfsSystem { maps })
}

pub fn hull(ifs: &IfsSystem) -> Interval {
    ifs.hull()
}

/// Where a gap of generation `n` comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GapOrigin {
    /// Already a gap at generation `n − 1`, with that (0-based) index.
    Old(usize),
    New,
}

/// Bands `[α_i, β_i]` and gaps `(β_i, α_{i+1})` of one generation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandSystem {
    generation: usize,
    bands: Vec<Interval>,
    gaps: Vec<Interval>,
    genealogy: Vec<GapOrigin>,
}

impl BandSystem {
    /// An arbitrary finite union of disjoint intervals, listed left to right.
    /// Every gap is marked `New`.
    pub fn from_intervals(bands: Vec<Interval>) -> Result<Self> {
        Self::assemble(0, bands, None)
    }

    fn assemble(generation: usize, bands: Vec<Interval>, parents: Option<&[usize]>) -> Result<Self> {
        if bands.is_empty() {
            return Err(Error::UnsortedBands(0));
        }
        for (i, b) in bands.iter().enumerate() {
            Interval::new(b.lo, b.hi)?;
            if i > 0 && bands[i - 1].hi >= b.lo {
                return Err(Error::UnsortedBands(i));
            }
        }
        let gaps: Vec<Interval> = bands
            .windows(2)
            .map(|w| Interval {
                lo: w[0].hi,
                hi: w[1].lo,
            })
            .collect();
        let genealogy = match parents {
            Some(parents) => (0..gaps.len())
                .map(|m| {
                    if parents[m] != parents[m + 1] {
                        GapOrigin::Old(parents[m])
                    } else {
                        GapOrigin::New
                    }
                })
                .collect(),
            None => vec![GapOrigin::New; gaps.len()],
        };
        Ok(Self {
            generation,
            bands,
            gaps,
            genealogy,
        })
    }

    pub fn generation(&self) -> usize {
        self.generation
    }

    pub fn bands(&self) -> &[Interval] {
        &self.bands
    }

    pub fn gaps(&self) -> &[Interval] {
        &self.gaps
    }

    pub fn genealogy(&self) -> &[GapOrigin] {
        &self.genealogy
    }

    pub fn band_count(&self) -> usize {
        self.bands.len()
    }

    pub fn gap_count(&self) -> usize {
        self.gaps.len()
    }

    pub fn hull(&self) -> Interval {
        Interval {
            lo: self.bands[0].lo,
            hi: self.bands[self.bands.len() - 1].hi,
        }
    }

    pub fn total_length(&self) -> f64 {
        self.bands.iter().map(Interval::width).sum()
    }

    /// Index of the band containing `x`, if any.
    pub fn band_containing(&self, x: f64) -> Option<usize> {
        let i = self.bands.partition_point(|b| b.hi < x);
        (i < self.bands.len() && self.bands[i].contains(x)).then_some(i)
    }
}

/// Bands of `Φⁿ(E⁰)` enumerated depth-first over map words in lexicographic
/// order, which is left to right for a fully disconnected system.
pub fn generate_bands(ifs: &IfsSystem, generation: usize) -> Result<BandSystem> {
    let hull = ifs.hull();
    let floor = WIDTH_FLOOR * hull.width();
    let m = ifs.len();

    // Band (j, w) = φ_j(band w); its parent is (j, w minus its last letter).
    let mut bands = vec![hull];
    let mut parents: Vec<usize> = vec![0];
    for level in 1..=generation {
        let prev_count = bands.len();
        let grand_count = prev_count / m;
        let mut next = Vec::with_capacity(prev_count * m);
        let mut next_parents = Vec::with_capacity(prev_count * m);
        for (j, map) in ifs.maps().iter().enumerate() {
            for (k, b) in bands.iter().enumerate() {
                next.push(map.apply_interval(*b));
                next_parents.push(if level == 1 { 0 } else { j * grand_count + parents[k] });
            }
        }
        if let Some(narrow) = next.iter().find(|b| b.width() < floor) {
            return Err(Error::GenerationTooLarge {
                generation,
                width: narrow.width(),
                floor,
            });
        }
        bands = next;
        parents = next_parents;
    }
    let parents = (generation > 0).then_some(parents.as_slice());
    let system = BandSystem::assemble(generation, bands, parents)?;
    debug_assert_eq!(system.bands[0].lo, hull.lo);
    debug_assert_eq!(system.bands[system.bands.len() - 1].hi, hull.hi);
    Ok(system)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ternary_generation_one() {
        let bands = IfsSystem::ternary_cantor().generate_bands(1).unwrap();
        assert_eq!(bands.band_count(), 2);
        assert_eq!(bands.bands()[0].lo, -1.0);
        assert!((bands.bands()[0].hi + 1.0 / 3.0).abs() < 1e-16);
        assert!((bands.bands()[1].lo - 1.0 / 3.0).abs() < 1e-16);
        assert_eq!(bands.genealogy(), &[GapOrigin::New]);
    }

    #[test]
    fn generation_zero_is_the_hull() {
        let ifs = IfsSystem::new(vec![AffineMap::new(0.5, 0.0), AffineMap::new(0.25, 10.0)]).unwrap();
        let b = ifs.generate_bands(0).unwrap();
        assert_eq!(b.bands(), &[Interval { lo: 0.0, hi: 10.0 }]);
        assert!(b.gaps().is_empty());
        assert_eq!(ifs.hull(), Interval { lo: 0.0, hi: 10.0 });
    }

    #[test]
    fn rejects_bad_systems() {
        let overlap = IfsSystem::new(vec![AffineMap::new(0.6, -1.0), AffineMap::new(0.6, 1.0)]);
        assert!(matches!(overlap, Err(Error::OverlappingImages { .. })));
        let touching = IfsSystem::new(vec![AffineMap::new(0.5, -1.0), AffineMap::new(0.5, 1.0)]);
        assert!(matches!(touching, Err(Error::OverlappingImages { .. })));
        let expanding = IfsSystem::new(vec![AffineMap::new(1.2, -1.0), AffineMap::new(0.1, 1.0)]);
        assert!(matches!(expanding, Err(Error::NotContractive { index: 0, .. })));
        let dup = IfsSystem::new(vec![AffineMap::new(0.1, 1.0), AffineMap::new(0.2, 1.0)]);
        assert!(matches!(dup, Err(Error::DuplicateFixedPoints(_))));
        let single = IfsSystem::new(vec![AffineMap::new(0.1, 1.0)]);
        assert!(matches!(single, Err(Error::TooFewMaps(1))));
    }

    #[test]
    fn sorts_maps_by_fixed_point() {
        let ifs = IfsSystem::new(vec![AffineMap::new(0.1, 1.0), AffineMap::new(0.8, -1.0)]).unwrap();
        assert_eq!(ifs.maps()[0].gamma, -1.0);
        assert_eq!(ifs.maps()[1].delta, 0.1);
    }

    #[test]
    fn unit_map_coefficients() {
        let u = affine_to_unit(Interval {
            lo: -1.0 / 3.0,
            hi: 1.0 / 3.0,
        })
        .unwrap();
        assert!((u.scale() - 3.0).abs() < 1e-15);
        assert!(u.offset().abs() < 1e-15);
        let u = affine_to_unit(Interval { lo: 0.0, hi: 2.0 }).unwrap();
        assert_eq!((u.scale(), u.offset()), (1.0, -1.0));
        assert_eq!(u.forward(0.0), -1.0);
        assert_eq!(u.forward(2.0), 1.0);
        assert!(matches!(
            affine_to_unit(Interval { lo: 1.0, hi: 1.0 }),
            Err(Error::DegenerateInterval { .. })
        ));
    }

    #[test]
    fn width_floor_stops_deep_generations() {
        let ifs = IfsSystem::new(vec![AffineMap::new(0.01, -1.0), AffineMap::new(0.01, 1.0)]).unwrap();
        assert!(ifs.generate_bands(6).is_ok());
        assert!(matches!(ifs.generate_bands(7), Err(Error::GenerationTooLarge { .. })));
    }

    #[test]
    fn band_lookup() {
        let b = IfsSystem::ternary_cantor().generate_bands(2).unwrap();
        assert_eq!(b.band_containing(-1.0), Some(0));
        assert_eq!(b.band_containing(0.0), None);
        assert_eq!(b.band_containing(1.0), Some(3));
        assert_eq!(b.band_containing(2.0), None);
    }
}
