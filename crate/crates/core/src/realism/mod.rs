//! Geometric scene-realism score: is the query supported and free of
//! interpenetration at its candidate pose?

mod heightmap;
mod negative;
mod score;

pub use heightmap::{build_heightmap, Heightmap};
pub use negative::{make_negative, make_negative_with_offset, negative_offset, NEGATIVE_RANGE};
pub use score::{score, score_with_heightmap, PreparedRealism, RealismConfig, RealismReport};
