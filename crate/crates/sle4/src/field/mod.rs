//! Discrete Gaussian free fields: grids, spectral and factorisation
//! samplers, averages, Green's functions and quantum wedge fields.

pub mod average;
pub mod grid;
pub mod masked;
pub mod spectral;
pub mod transform;
pub mod wedge;

pub use average::{circle_average, semicircle_average, BoundaryEdge};
pub use grid::{BoundaryCondition, DomainShape, FieldSample, GridDomain, MeanConvention};
pub use masked::MaskedGrid;
pub use spectral::{
    conformal_radius, green_apply_dirichlet, green_discrete, green_discrete_diagonal,
    green_halfplane, green_strip, lateral_part, radial_part, sample_dirichlet_gff,
    sample_strip_gff, StripBlock,
};
pub use wedge::{sample_wedge, WedgeField};
