//! Harmonic mappings of the unit disk, their Weierstrass–Enneper lifts to
//! minimal surfaces, and the circle-based reflection that extends a lift to a
//! quasiconformal map of the whole sphere.

pub mod error;
pub mod expr;
pub mod extension;
pub mod grid;
pub mod harmonic;
pub mod hyperbolic;
pub mod jet;
pub mod lift;
pub mod map_spec;
pub mod mesh;
pub mod mobius3;
pub mod quadrature;
pub mod reflection;

pub use error::{Error, Result};
pub use expr::{parse, Expr, ParseError};
pub use extension::{DilatationSample, ExtensionMap, QcBound, QcReport};
pub use grid::GridParams;
pub use harmonic::{ConditionReport, SigmaData};
pub use jet::HoloJet;
pub use lift::{FundamentalForms, SurfaceFrame, Vec3};
pub use map_spec::{DataJets, MapSpec, MapSpecSource, Precomposed, Weierstrass};
pub use mesh::{MeshOutput, MeshVertex, Region};
pub use mobius3::{Mobius3, Point3, Step};
pub use num_complex::Complex64;
pub use reflection::{CircleData, ReflectionData};
