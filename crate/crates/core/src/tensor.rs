//! Dense feature-map container and the flatten/sort/permute primitives the
//! transforms and metrics are built from.
//!
//! Layout is channel-major: channel `c` occupies `data[c*V .. (c+1)*V]`
//! where `V = height * width`, row-major within the channel. Per-channel
//! sorting and permutation gathers are therefore contiguous.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::scalar::{count, KahanSum, Real};

/// A C x H x W real-valued feature map.
///
/// Invariants enforced on construction: all dimensions >= 1, data length
/// equals `C*H*W`, every value finite. Negative zeros are canonicalized to
/// positive zero so that ordering, bit-level comparisons, and key-based
/// sorting agree everywhere.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMap<T> {
    channels: usize,
    height: usize,
    width: usize,
    data: Vec<T>,
}

impl<T: Real> FeatureMap<T> {
    pub fn new(channels: usize, height: usize, width: usize, mut data: Vec<T>) -> Result<Self> {
        if channels == 0 || height == 0 || width == 0 {
            return Err(Error::EmptyDimensions {
                channels,
                height,
                width,
            });
        }
        let expected = channels * height * width;
        if data.len() != expected {
            return Err(Error::DataLength {
                expected,
                got: data.len(),
            });
        }
        for (index, v) in data.iter_mut().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFinite { index });
            }
            if *v == T::zero() {
                *v = T::zero(); // -0.0 -> +0.0
            }
        }
        Ok(Self {
            channels,
            height,
            width,
            data,
        })
    }

    /// Constructor for data already known to satisfy the invariants
    /// (permutations or gathers of an existing map's values).
    pub(crate) fn from_validated(
        channels: usize,
        height: usize,
        width: usize,
        data: Vec<T>,
    ) -> Self {
        debug_assert_eq!(data.len(), channels * height * width);
        debug_assert!(data.iter().all(|v| v.is_finite()));
        Self {
            channels,
            height,
            width,
            data,
        }
    }

    /// Builds a map by evaluating `f(channel, y, x)`.
    pub fn from_fn(
        channels: usize,
        height: usize,
        width: usize,
        mut f: impl FnMut(usize, usize, usize) -> T,
    ) -> Result<Self> {
        let mut data = Vec::with_capacity(channels * height * width);
        for c in 0..channels {
            for y in 0..height {
                for x in 0..width {
                    data.push(f(c, y, x));
                }
            }
        }
        Self::new(channels, height, width, data)
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    /// Number of spatial positions per channel, `V = H * W`.
    pub fn spatial_size(&self) -> usize {
        self.height * self.width
    }

    pub fn shape(&self) -> (usize, usize, usize) {
        (self.channels, self.height, self.width)
    }

    /// Channel `c` as a contiguous row-major slice of length `V`.
    pub fn channel(&self, c: usize) -> &[T] {
        let v = self.spatial_size();
        &self.data[c * v..(c + 1) * v]
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn into_data(self) -> Vec<T> {
        self.data
    }

    /// Reshapes to a C x V matrix, row `c` holding channel `c` in row-major
    /// spatial order. Inverse of [`ChannelMatrix::unflatten`].
    pub fn flatten(&self) -> ChannelMatrix<T> {
        ChannelMatrix {
            rows: self.channels,
            cols: self.spatial_size(),
            data: self.data.clone(),
        }
    }

    /// Per-channel ascending stable argsort.
    ///
    /// Returns the rank index (`order[c][r]` = spatial position of the
    /// r-th smallest value in channel `c`) together with the sorted values.
    /// Ties are broken by lower spatial index first.
    pub fn argsort_channels(&self) -> Result<(RankIndex, ChannelMatrix<T>)> {
        let v = self.spatial_size();
        if v > u32::MAX as usize {
            return Err(Error::parameter(
                "spatial_size",
                format!("{v} positions exceed the supported maximum of 2^32 - 1"),
            ));
        }
        let mut order = vec![0u32; self.channels * v];
        let mut sorted = vec![T::zero(); self.channels * v];
        order
            .par_chunks_mut(v)
            .zip(sorted.par_chunks_mut(v))
            .enumerate()
            .for_each(|(c, (order_row, sorted_row))| {
                argsort_into(self.channel(c), order_row, sorted_row);
            });
        Ok((
            RankIndex {
                channels: self.channels,
                spatial: v,
                order,
            },
            ChannelMatrix {
                rows: self.channels,
                cols: v,
                data: sorted,
            },
        ))
    }

    /// Per-channel mean and population standard deviation (divide by `V`).
    pub fn channel_stats(&self) -> Vec<ChannelStats<T>> {
        (0..self.channels)
            .into_par_iter()
            .map(|c| ChannelStats::of(self.channel(c)))
            .collect()
    }
}

/// Sorts `values` into `sorted_row` and writes the source position of each
/// rank into `order_row`. Packs the order key and index into a single
/// `u128` so the sort runs on plain integer keys; the low 32 bits carry the
/// spatial index, which doubles as the stable tie-break.
fn argsort_into<T: Real>(values: &[T], order_row: &mut [u32], sorted_row: &mut [T]) {
    let mut packed: Vec<u128> = values
        .iter()
        .enumerate()
        .map(|(i, v)| (u128::from(v.order_key()) << 32) | i as u128)
        .collect();
    packed.sort_unstable();
    for (r, p) in packed.iter().enumerate() {
        order_row[r] = *p as u32;
        sorted_row[r] = T::from_order_key((p >> 32) as u64);
    }
}

/// Stable ascending argsort of one channel, positions only.
pub(crate) fn argsort_positions<T: Real>(values: &[T]) -> Vec<u32> {
    debug_assert!(values.len() <= u32::MAX as usize);
    let mut packed: Vec<u128> = values
        .iter()
        .enumerate()
        .map(|(i, v)| (u128::from(v.order_key()) << 32) | i as u128)
        .collect();
    packed.sort_unstable();
    packed.into_iter().map(|p| p as u32).collect()
}

/// Sorts a channel's values ascending, without tracking positions.
pub(crate) fn sort_values<T: Real>(values: &[T]) -> Vec<T> {
    let mut keys: Vec<u64> = values.iter().map(|v| v.order_key()).collect();
    keys.sort_unstable();
    keys.into_iter().map(T::from_order_key).collect()
}

/// A dense row-major matrix with `rows` rows of `cols` values. Produced by
/// [`FeatureMap::flatten`] (C x V) and by the Gram computation (C x C).
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Real> ChannelMatrix<T> {
    pub(crate) fn from_raw(rows: usize, cols: usize, data: Vec<T>) -> Self {
        debug_assert_eq!(rows * cols, data.len());
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &[T] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn get(&self, r: usize, c: usize) -> T {
        self.data[r * self.cols + c]
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    /// Rebuilds a feature map of the given spatial shape. Requires
    /// `height * width == cols`.
    pub fn unflatten(self, height: usize, width: usize) -> Result<FeatureMap<T>> {
        if height * width != self.cols {
            return Err(Error::DataLength {
                expected: self.cols,
                got: height * width,
            });
        }
        FeatureMap::new(self.rows, height, width, self.data)
    }
}

/// Per-channel permutation of spatial positions, ascending by value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankIndex {
    channels: usize,
    spatial: usize,
    order: Vec<u32>,
}

impl RankIndex {
    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn spatial_size(&self) -> usize {
        self.spatial
    }

    /// The permutation for channel `c`: element `r` is the spatial position
    /// holding the r-th smallest value.
    pub fn channel_order(&self, c: usize) -> &[u32] {
        &self.order[c * self.spatial..(c + 1) * self.spatial]
    }
}

/// Mean and population standard deviation of one channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelStats<T> {
    pub mean: T,
    pub std_dev: T,
}

impl<T: Real> ChannelStats<T> {
    pub(crate) fn of(values: &[T]) -> Self {
        let n = count::<T>(values.len());
        let mut sum = KahanSum::new();
        for &v in values {
            sum.add(v);
        }
        let mean = sum.value() / n;
        let mut sq = KahanSum::new();
        for &v in values {
            let d = v - mean;
            sq.add(d * d);
        }
        let variance = sq.value() / n;
        ChannelStats {
            mean,
            std_dev: variance.max(T::zero()).sqrt(),
        }
    }
}
