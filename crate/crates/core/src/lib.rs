//! Arbitrary image stylization without a trained network.
//!
//! The core is a parameter-free, order-statistics feature transform that
//! reorders style values so their per-channel ranks align with the content
//! map's ranks. Around it this crate provides the classic feature-level
//! baselines (AdaIN, whitening/coloring, patch swap, random shuffling), a
//! Gram/Style/Content/KL loss suite, a training-free invertible Laplacian
//! pyramid codec standing in for a learned encoder/decoder, and PNG/JPEG
//! image I/O.
//!
//! Everything numeric is generic over the [`Real`] scalar trait (`f32` or
//! `f64`); the `*64` aliases at the crate root are the recommended entry
//! points and what the bundled CLI uses.

pub mod error;
pub mod image_io;
pub mod metrics;
pub mod pyramid;
pub mod scalar;
pub mod tensor;
pub mod transforms;

pub use error::{Error, Result};
pub use image_io::RasterImage;
pub use metrics::{LossReport, LossWeights};
pub use pyramid::Pyramid;
pub use scalar::Real;
pub use tensor::{ChannelMatrix, ChannelStats, FeatureMap, RankIndex};
pub use transforms::TransformMethod;

/// `f64` instantiations, the default precision of the library core.
pub type FeatureMap64 = FeatureMap<f64>;
pub type Pyramid64 = Pyramid<f64>;
pub type TransformMethod64 = TransformMethod<f64>;
pub type LossWeights64 = LossWeights<f64>;
pub type LossReport64 = LossReport<f64>;

/// `f32` instantiations for callers trading precision for memory.
pub type FeatureMap32 = FeatureMap<f32>;
pub type Pyramid32 = Pyramid<f32>;
pub type TransformMethod32 = TransformMethod<f32>;
pub type LossWeights32 = LossWeights<f32>;
pub type LossReport32 = LossReport<f32>;
