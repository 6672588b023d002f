//! Energies of signals in Riemannian manifolds.
//!
//! A signal is a curve or surface joining two marked sets `A` and `B`; its
//! 1-energy and 2-energy integrate the distance to `A` and its square. This
//! crate discretizes signals as polylines and triangle meshes, computes both
//! energies, checks the upper and lower bounds they satisfy in Euclidean
//! space, spherical shells, Gaussian parameter spaces and configuration
//! spaces, and minimizes the relative ratio variance of graph embeddings.

pub mod configspace;
pub mod energy;
pub mod gaussian;
pub mod geometry;
pub mod graphembed;
pub mod mesh;
pub mod sampling;
pub mod verify;

pub use configspace::{ConfigPath, Configuration};
pub use energy::{EnergyReport, FunctionTable, SignalCurve, SignalRegion};
pub use gaussian::{FisherTensor, G22Comparison, GaussParamPoint, GaussianBoundReport};
pub use geometry::{AmbientPoint, ManifoldSpec};
pub use graphembed::{EmbedOptions, EmbedResult, RatioVector, WeightedGraph};
pub use mesh::{PolylinePath, TriMesh};
