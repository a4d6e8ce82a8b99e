use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors produced by tensor construction, transforms, metrics, the
/// pyramid codec, and image I/O.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimensions must all be >= 1, got {channels}x{height}x{width}")]
    EmptyDimensions {
        channels: usize,
        height: usize,
        width: usize,
    },

    #[error("data length {got} does not match channels*height*width = {expected}")]
    DataLength { expected: usize, got: usize },

    #[error("non-finite value at data index {index}")]
    NonFinite { index: usize },

    #[error("channel count mismatch: {left} vs {right}")]
    ChannelMismatch { left: usize, right: usize },

    #[error(
        "spatial size mismatch: {left} vs {right} positions; \
         use style_project_quantile for maps of unequal spatial size"
    )]
    SpatialMismatch { left: usize, right: usize },

    #[error("shape mismatch: {left:?} vs {right:?} (channels, height, width)")]
    ShapeMismatch {
        left: (usize, usize, usize),
        right: (usize, usize, usize),
    },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("patch size {patch} exceeds map size {height}x{width}")]
    PatchTooLarge {
        patch: usize,
        height: usize,
        width: usize,
    },

    #[error("pyramid depth {depth} too large for {height}x{width}: need 2^(depth-1) <= min dimension")]
    DepthTooLarge {
        depth: usize,
        height: usize,
        width: usize,
    },

    #[error("inconsistent pyramid: {0}")]
    InconsistentPyramid(String),

    #[error("eigendecomposition failed: {0}")]
    Eigen(String),

    #[error("{path}: {source}")]
    Image {
        path: String,
        source: image::ImageError,
    },

    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn parameter(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
