//! Littlewood-Paley bumps, dyadic shell, modulation and box projections, and
//! the cone atlas.

mod atlas;
mod bumps;
mod projection;

pub use atlas::{build_cone_atlas, default_cone_margin, ConeAtlas};
pub(crate) use atlas::{axis_of, dot};
pub use bumps::{build_bumps, BumpPair, CHI_EDGE, CHI_PLATEAU, ETA_EDGE, ETA_PLATEAU};
pub use projection::{
    box_cells, dyadic_range, max_modulation_shell, modulation_split, ModulationSplit,
    ProjectionSpec, Projector,
};
