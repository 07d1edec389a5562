//! Shape representations: Fourier-parametrized Jordan curves, their
//! arclength samplings, multi-component shapes, and raster sets.

mod config;
mod curve;
mod raster;
mod sampled;
mod shapes;

pub use config::{recommended_nodes, Component, Placement, SampledComponent, SampledShape, ShapeConfig};
pub use curve::{CurveJet, JordanCurve};
pub use raster::{rasterize, RasterSet};
pub use sampled::{sample_arclength, SampledCurve};
pub use shapes::{make_disk, make_ellipse, make_stripe, random_band_limited};

/// Enclosed area of a curve; an orientation violation is an error.
pub fn enclosed_area(curve: &JordanCurve) -> crate::Result<f64> {
    curve.enclosed_area()
}
