use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::heightmap::{build_heightmap, Heightmap};
use crate::geometry::{PointCloud, SegmentedScene};
use crate::{Error, Real, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RealismConfig<T> {
    /// Heightmap cell size, meters.
    pub resolution: T,
    /// A footprint cell counts as supported when the query bottom is within this of the surface.
    pub gap_tol: T,
    /// Decay length of the penetration penalty.
    pub p_scale: T,
    /// Penetration at or beyond this scores zero.
    pub p_max: T,
    /// Radius of the scene crop around the query.
    pub crop_radius: T,
}

impl<T: Real> Default for RealismConfig<T> {
    fn default() -> Self {
        Self { resolution: T::of(0.01), gap_tol: T::of(0.01), p_scale: T::of(0.01), p_max: T::of(0.03), crop_radius: T::of(0.5) }
    }
}

impl<T: Real> RealismConfig<T> {
    pub fn validate(&self) -> Result<()> {
        let positive = [self.resolution, self.gap_tol, self.p_scale, self.p_max, self.crop_radius].iter().all(|v| *v > T::zero());
        if !positive || self.resolution > self.crop_radius {
            return Err(Error::InvalidConfig("realism parameters must be positive with resolution <= crop_radius".into()));
        }
        Ok(())
    }

    /// Longest run of empty cells that occlusion filling may bridge.
    fn fill_cells(&self) -> usize {
        (self.crop_radius / self.resolution).ceil().to_usize().unwrap_or(1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RealismReport<T> {
    pub score: T,
    /// Query bottom minus the highest surface under the footprint; infinite when nothing is underneath.
    pub support_gap: T,
    pub penetration_depth: T,
    pub supported_fraction: T,
}

impl<T: Real> RealismReport<T> {
    /// `key=value` pairs separated by spaces, for log lines.
    pub fn to_kv(&self) -> String {
        let mut s = String::new();
        let _ = write!(
            s,
            "score={} support_gap={} penetration_depth={} supported_fraction={}",
            self.score, self.support_gap, self.penetration_depth, self.supported_fraction
        );
        s
    }
}

/// Cells holding query points, dilated by one cell when the footprint is
/// under three cells across in x or y.
fn footprint<T: Real>(query: &PointCloud<T>, hm: &Heightmap<T>) -> BTreeSet<(usize, usize)> {
    let mut cells: BTreeSet<(usize, usize)> = query.points().iter().filter_map(|p| hm.cell_of(p.x, p.y)).collect();
    if cells.is_empty() {
        return cells;
    }
    let span = |f: fn(&(usize, usize)) -> usize| {
        let (lo, hi) = cells.iter().map(f).fold((usize::MAX, 0), |(lo, hi), v| (lo.min(v), hi.max(v)));
        hi - lo + 1
    };
    if span(|c| c.0) < 3 || span(|c| c.1) < 3 {
        let (nx, ny) = hm.dims();
        let grown: Vec<_> = cells
            .iter()
            .flat_map(|&(i, j)| {
                (-1i64..=1).flat_map(move |di| (-1i64..=1).map(move |dj| (i as i64 + di, j as i64 + dj)))
            })
            .filter(|&(i, j)| i >= 0 && j >= 0 && (i as usize) < nx && (j as usize) < ny)
            .map(|(i, j)| (i as usize, j as usize))
            .collect();
        cells.extend(grown);
    }
    cells
}

/// Footprint cells whose four neighbours are also in the footprint. Cells on
/// the rim may share surface samples with a touching neighbour and are left
/// out of the penetration test.
fn interior(cells: &BTreeSet<(usize, usize)>) -> Vec<(usize, usize)> {
    cells
        .iter()
        .copied()
        .filter(|&(i, j)| {
            i > 0
                && j > 0
                && cells.contains(&(i - 1, j))
                && cells.contains(&(i + 1, j))
                && cells.contains(&(i, j - 1))
                && cells.contains(&(i, j + 1))
        })
        .collect()
}

/// Scores `query` (already at its candidate pose) against a heightmap of
/// the scene without the query.
pub fn score_with_heightmap<T: Real>(query: &PointCloud<T>, hm: &Heightmap<T>, cfg: &RealismConfig<T>) -> Result<RealismReport<T>> {
    let bottom = query.min_z()?;
    let cells = footprint(query, hm);
    let heights: Vec<T> = cells.iter().map(|&(i, j)| hm.height(i, j)).collect();
    let top = heights.iter().fold(T::neg_infinity(), |m, h| m.max(*h));
    if !top.is_finite() {
        return Ok(RealismReport { score: T::zero(), support_gap: T::infinity(), penetration_depth: T::zero(), supported_fraction: T::zero() });
    }
    let supported = heights.iter().filter(|h| h.is_finite() && (bottom - **h).abs() <= cfg.gap_tol).count();
    let supported_fraction = T::of(supported as f64) / T::of(heights.len() as f64);

    let inner = interior(&cells);
    let probe: Vec<(usize, usize)> = if inner.is_empty() { cells.iter().copied().collect() } else { inner };
    let penetration_depth = probe
        .iter()
        .map(|&(i, j)| hm.height(i, j) - bottom)
        .filter(|d| d.is_finite())
        .fold(T::zero(), |m, d| m.max(d));

    let score = if penetration_depth < cfg.p_max { supported_fraction * (-penetration_depth / cfg.p_scale).exp() } else { T::zero() };
    Ok(RealismReport { score: score.max(T::zero()).min(T::one()), support_gap: bottom - top, penetration_depth, supported_fraction })
}

/// Scores `query` against `scene`, which must not contain the query's own points.
pub fn score<T: Real>(query: &PointCloud<T>, scene: &SegmentedScene<T>, cfg: &RealismConfig<T>) -> Result<RealismReport<T>> {
    cfg.validate()?;
    let center = query.centroid()?;
    let hm = build_heightmap(scene, &center, cfg.crop_radius, cfg.resolution)?.fill_occlusion_holes(cfg.fill_cells());
    score_with_heightmap(query, &hm, cfg)
}

/// One hole-filled heightmap of the support scene, shared by every
/// candidate pose of one planning call.
#[derive(Debug, Clone)]
pub struct PreparedRealism<T> {
    heightmap: Heightmap<T>,
    cfg: RealismConfig<T>,
}

impl<T: Real> PreparedRealism<T> {
    /// `support` is the scene without the query. The grid spans its xy
    /// bounds widened by the crop radius.
    pub fn new(support: &SegmentedScene<T>, cfg: RealismConfig<T>) -> Result<Self> {
        cfg.validate()?;
        let r = cfg.crop_radius;
        let bounds = support
            .points()
            .map(|(_, p)| (p.x, p.y))
            .fold(None, |acc: Option<(T, T, T, T)>, (x, y)| {
                Some(acc.map_or((x, y, x, y), |(x0, y0, x1, y1)| (x0.min(x), y0.min(y), x1.max(x), y1.max(y))))
            })
            .unwrap_or((T::zero(), T::zero(), T::zero(), T::zero()));
        let mut hm = Heightmap::empty(bounds.0 - r, bounds.1 - r, bounds.2 + r, bounds.3 + r, cfg.resolution)?;
        for (_, p) in support.points() {
            hm.insert(p);
        }
        Ok(Self { heightmap: hm.fill_occlusion_holes(cfg.fill_cells()), cfg })
    }

    pub fn heightmap(&self) -> &Heightmap<T> {
        &self.heightmap
    }

    pub fn config(&self) -> &RealismConfig<T> {
        &self.cfg
    }

    pub fn score(&self, query: &PointCloud<T>) -> Result<RealismReport<T>> {
        score_with_heightmap(query, &self.heightmap, &self.cfg)
    }
}
