//! Feature-level content/style transforms: the rank-matching style
//! projection plus the baselines it is studied against.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::symmetric_eigen;
use crate::scalar::{count, lit, KahanSum, Real};
use crate::tensor::{argsort_positions, sort_values, FeatureMap};

/// Selects a feature transform and carries its method-specific parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TransformMethod<T> {
    /// Rank matching: style values are placed where content values of the
    /// same per-channel rank sit.
    StyleProjection,
    /// Per-channel affine re-statistics of content to style mean/sigma.
    AdaIn,
    /// Whitening/coloring via covariance eigendecomposition.
    Wct { eigen_floor: T },
    /// Patch-level replacement of content patches by their best style match.
    StyleSwap { patch: usize, stride: usize },
    /// Uniform random permutation of style values.
    RandomShuffle { seed: u64, shared: bool },
    /// Passes the style map through unchanged.
    NoShuffle,
    /// Passes the content map through unchanged.
    Identity,
}

pub const DEFAULT_EIGEN_FLOOR: f64 = 1e-8;
pub const DEFAULT_PATCH: usize = 3;
pub const DEFAULT_STRIDE: usize = 1;

impl<T: Real> TransformMethod<T> {
    pub fn wct_default() -> Self {
        TransformMethod::Wct {
            eigen_floor: lit(DEFAULT_EIGEN_FLOOR),
        }
    }

    pub fn style_swap_default() -> Self {
        TransformMethod::StyleSwap {
            patch: DEFAULT_PATCH,
            stride: DEFAULT_STRIDE,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            TransformMethod::StyleProjection => "style-projection",
            TransformMethod::AdaIn => "adain",
            TransformMethod::Wct { .. } => "wct",
            TransformMethod::StyleSwap { .. } => "style-swap",
            TransformMethod::RandomShuffle { .. } => "random-shuffle",
            TransformMethod::NoShuffle => "no-shuffle",
            TransformMethod::Identity => "identity",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            TransformMethod::Wct { eigen_floor } => {
                if !(eigen_floor > T::zero()) || !eigen_floor.is_finite() {
                    return Err(Error::parameter("eigen_floor", "must be finite and > 0"));
                }
            }
            TransformMethod::StyleSwap { patch, stride } => {
                if patch == 0 || patch % 2 == 0 {
                    return Err(Error::parameter("patch", "must be odd and >= 1"));
                }
                if stride == 0 {
                    return Err(Error::parameter("stride", "must be >= 1"));
                }
            }
            _ => {}
        }
        Ok(())
    }
}

/// Dispatches `method` over a content/style pair.
///
/// Style projection falls back to the quantile variant automatically when
/// the spatial sizes differ, so the dispatcher is total over any pair of
/// same-channel maps.
pub fn apply_method<T: Real>(
    method: TransformMethod<T>,
    content: &FeatureMap<T>,
    style: &FeatureMap<T>,
) -> Result<FeatureMap<T>> {
    method.validate()?;
    match method {
        TransformMethod::StyleProjection => {
            if content.spatial_size() == style.spatial_size() {
                style_project(content, style)
            } else {
                style_project_quantile(content, style)
            }
        }
        TransformMethod::AdaIn => adain_transform(content, style),
        TransformMethod::Wct { eigen_floor } => wct_transform(content, style, eigen_floor),
        TransformMethod::StyleSwap { patch, stride } => style_swap(content, style, patch, stride),
        TransformMethod::RandomShuffle { seed, shared } => Ok(random_shuffle(style, seed, shared)),
        TransformMethod::NoShuffle => Ok(style.clone()),
        TransformMethod::Identity => Ok(content.clone()),
    }
}

fn ensure_channels<T: Real>(content: &FeatureMap<T>, style: &FeatureMap<T>) -> Result<()> {
    if content.channels() != style.channels() {
        return Err(Error::ChannelMismatch {
            left: content.channels(),
            right: style.channels(),
        });
    }
    Ok(())
}

/// Rank-matching transform: per channel, the style value of rank `r` is
/// placed at the spatial position where the content value has rank `r`.
///
/// Output shape equals the content's, and every output channel is a
/// rearrangement of the corresponding style channel. Requires equal
/// channel counts and equal spatial sizes; see
/// [`style_project_quantile`] for maps of unequal size.
pub fn style_project<T: Real>(
    content: &FeatureMap<T>,
    style: &FeatureMap<T>,
) -> Result<FeatureMap<T>> {
    ensure_channels(content, style)?;
    let v = content.spatial_size();
    if v != style.spatial_size() {
        return Err(Error::SpatialMismatch {
            left: v,
            right: style.spatial_size(),
        });
    }
    let mut out = vec![T::zero(); content.channels() * v];
    out.par_chunks_mut(v).enumerate().for_each(|(c, out_row)| {
        let order = argsort_positions(content.channel(c));
        let sorted_style = sort_values(style.channel(c));
        for (r, &pos) in order.iter().enumerate() {
            out_row[pos as usize] = sorted_style[r];
        }
    });
    Ok(FeatureMap::from_validated(
        content.channels(),
        content.height(),
        content.width(),
        out,
    ))
}

/// Rank matching generalized to unequal spatial sizes: the position with
/// content rank `r` (of `V_c`) receives the style channel's empirical
/// quantile at level `r / (V_c - 1)`, linearly interpolated between
/// adjacent sorted style values. Reduces exactly to [`style_project`]
/// when the sizes match. A single-position content channel receives the
/// style channel median.
pub fn style_project_quantile<T: Real>(
    content: &FeatureMap<T>,
    style: &FeatureMap<T>,
) -> Result<FeatureMap<T>> {
    ensure_channels(content, style)?;
    let vc = content.spatial_size();
    let vs = style.spatial_size();
    let mut out = vec![T::zero(); content.channels() * vc];
    out.par_chunks_mut(vc).enumerate().for_each(|(c, out_row)| {
        let order = argsort_positions(content.channel(c));
        let sorted_style = sort_values(style.channel(c));
        if vc == 1 {
            out_row[0] = quantile_at(&sorted_style, lit::<T>(0.5) * count::<T>(vs - 1));
            return;
        }
        let span = count::<T>(vs - 1);
        let denom = count::<T>(vc - 1);
        for (r, &pos) in order.iter().enumerate() {
            // When vc == vs this is exactly r, so the gather is bit-exact.
            let at = count::<T>(r) * span / denom;
            out_row[pos as usize] = quantile_at(&sorted_style, at);
        }
    });
    FeatureMap::new(content.channels(), content.height(), content.width(), out)
}

fn quantile_at<T: Real>(sorted: &[T], pos: T) -> T {
    let last = sorted.len() - 1;
    let lo = pos.floor().to_usize().unwrap_or(0).min(last);
    let hi = (lo + 1).min(last);
    let frac = pos - count::<T>(lo);
    sorted[lo] + frac * (sorted[hi] - sorted[lo])
}

/// Adaptive instance normalization: per channel, an affine map taking the
/// content channel's mean/sigma to the style channel's. A zero-sigma
/// content channel maps to the constant style mean.
pub fn adain_transform<T: Real>(
    content: &FeatureMap<T>,
    style: &FeatureMap<T>,
) -> Result<FeatureMap<T>> {
    ensure_channels(content, style)?;
    let content_stats = content.channel_stats();
    let style_stats = style.channel_stats();
    let v = content.spatial_size();
    let mut out = vec![T::zero(); content.channels() * v];
    out.par_chunks_mut(v).enumerate().for_each(|(c, out_row)| {
        let cs = content_stats[c];
        let ss = style_stats[c];
        if cs.std_dev == T::zero() {
            out_row.fill(ss.mean);
        } else {
            let scale = ss.std_dev / cs.std_dev;
            for (o, &x) in out_row.iter_mut().zip(content.channel(c)) {
                *o = (x - cs.mean) * scale + ss.mean;
            }
        }
    });
    FeatureMap::new(content.channels(), content.height(), content.width(), out)
}

/// The whitening half of [`wct_transform`]: centers the content channels
/// and decorrelates them so the channel covariance becomes the identity
/// (for covariances whose eigenvalues all exceed `eigen_floor`).
pub fn wct_whiten<T: Real>(content: &FeatureMap<T>, eigen_floor: T) -> Result<FeatureMap<T>> {
    if !(eigen_floor > T::zero()) || !eigen_floor.is_finite() {
        return Err(Error::parameter("eigen_floor", "must be finite and > 0"));
    }
    if content.spatial_size() < 2 {
        return Err(Error::parameter(
            "spatial_size",
            "whitening requires at least 2 positions",
        ));
    }
    let (centered, _means) = center_channels(content);
    let cov = covariance(&centered, content.channels(), content.spatial_size());
    let transform = covariance_power(&cov, content.channels(), PowerKind::InverseSqrtFloored(eigen_floor))?;
    let whitened = apply_channel_matrix(&transform, &centered, content.channels(), content.spatial_size());
    FeatureMap::new(
        content.channels(),
        content.height(),
        content.width(),
        whitened,
    )
}

/// Whitening/coloring transform: decorrelates the centered content
/// channels via the eigendecomposition of their covariance (eigenvalues
/// clamped below by `eigen_floor` before the inverse square root), then
/// recolors with the style covariance square root and style means.
pub fn wct_transform<T: Real>(
    content: &FeatureMap<T>,
    style: &FeatureMap<T>,
    eigen_floor: T,
) -> Result<FeatureMap<T>> {
    ensure_channels(content, style)?;
    if !(eigen_floor > T::zero()) || !eigen_floor.is_finite() {
        return Err(Error::parameter("eigen_floor", "must be finite and > 0"));
    }
    if content.spatial_size() < 2 || style.spatial_size() < 2 {
        return Err(Error::parameter(
            "spatial_size",
            "wct requires at least 2 positions in both maps",
        ));
    }
    let channels = content.channels();
    let vc = content.spatial_size();
    let vs = style.spatial_size();

    let (centered_c, _) = center_channels(content);
    let cov_c = covariance(&centered_c, channels, vc);
    let whiten = covariance_power(&cov_c, channels, PowerKind::InverseSqrtFloored(eigen_floor))?;
    let whitened = apply_channel_matrix(&whiten, &centered_c, channels, vc);

    let (centered_s, style_means) = center_channels(style);
    let cov_s = covariance(&centered_s, channels, vs);
    let color = covariance_power(&cov_s, channels, PowerKind::Sqrt)?;
    let mut colored = apply_channel_matrix(&color, &whitened, channels, vc);
    for c in 0..channels {
        let mean = style_means[c];
        for x in &mut colored[c * vc..(c + 1) * vc] {
            *x = *x + mean;
        }
    }
    FeatureMap::new(channels, content.height(), content.width(), colored)
}

enum PowerKind<T> {
    /// lambda -> 1 / sqrt(max(lambda, floor))
    InverseSqrtFloored(T),
    /// lambda -> sqrt(max(lambda, 0))
    Sqrt,
}

/// Centers each channel; returns the centered C x V data and the means.
fn center_channels<T: Real>(m: &FeatureMap<T>) -> (Vec<T>, Vec<T>) {
    let stats = m.channel_stats();
    let v = m.spatial_size();
    let mut centered = Vec::with_capacity(m.channels() * v);
    let mut means = Vec::with_capacity(m.channels());
    for c in 0..m.channels() {
        let mean = stats[c].mean;
        means.push(mean);
        centered.extend(m.channel(c).iter().map(|&x| x - mean));
    }
    (centered, means)
}

/// Population covariance (divide by V) of centered C x V data; row-major
/// C x C, symmetric by construction.
fn covariance<T: Real>(centered: &[T], channels: usize, v: usize) -> Vec<T> {
    let norm = count::<T>(v);
    let mut cov = vec![T::zero(); channels * channels];
    for i in 0..channels {
        for j in i..channels {
            let mut acc = T::zero();
            let (ri, rj) = (&centered[i * v..(i + 1) * v], &centered[j * v..(j + 1) * v]);
            for (a, b) in ri.iter().zip(rj) {
                acc = acc + *a * *b;
            }
            let value = acc / norm;
            cov[i * channels + j] = value;
            cov[j * channels + i] = value;
        }
    }
    cov
}

/// E f(Lambda) E^T for the symmetric covariance `cov`.
fn covariance_power<T: Real>(cov: &[T], n: usize, kind: PowerKind<T>) -> Result<Vec<T>> {
    let (eigenvalues, vectors) = symmetric_eigen(cov, n)?;
    for (k, lambda) in eigenvalues.iter().enumerate() {
        if !lambda.is_finite() {
            return Err(Error::Eigen(format!("non-finite eigenvalue at index {k}")));
        }
    }
    let scaled: Vec<T> = eigenvalues
        .iter()
        .map(|&lambda| match kind {
            PowerKind::InverseSqrtFloored(floor) => lambda.max(floor).sqrt().recip(),
            PowerKind::Sqrt => lambda.max(T::zero()).sqrt(),
        })
        .collect();
    let mut out = vec![T::zero(); n * n];
    for i in 0..n {
        for j in i..n {
            let mut acc = T::zero();
            for k in 0..n {
                acc = acc + vectors[i * n + k] * scaled[k] * vectors[j * n + k];
            }
            out[i * n + j] = acc;
            out[j * n + i] = acc;
        }
    }
    Ok(out)
}

/// (C x C) * (C x V) product.
fn apply_channel_matrix<T: Real>(m: &[T], data: &[T], channels: usize, v: usize) -> Vec<T> {
    let mut out = vec![T::zero(); channels * v];
    out.par_chunks_mut(v).enumerate().for_each(|(i, row)| {
        for k in 0..channels {
            let w = m[i * channels + k];
            if w == T::zero() {
                continue;
            }
            for (o, &x) in row.iter_mut().zip(&data[k * v..(k + 1) * v]) {
                *o = *o + w * x;
            }
        }
    });
    out
}

/// Replaces every content patch (all channels jointly) with the style
/// patch of highest normalized cross-correlation; overlapping
/// replacements are averaged by overlap count.
///
/// Zero-norm patches score correlation 0. Ties are broken first by the
/// smaller patch Euclidean distance, then by the lower style-patch index,
/// so the result is deterministic and an exact style copy of a content
/// patch always wins over a merely proportional one.
pub fn style_swap<T: Real>(
    content: &FeatureMap<T>,
    style: &FeatureMap<T>,
    patch: usize,
    stride: usize,
) -> Result<FeatureMap<T>> {
    ensure_channels(content, style)?;
    if patch == 0 || patch % 2 == 0 {
        return Err(Error::parameter("patch", "must be odd and >= 1"));
    }
    if stride == 0 {
        return Err(Error::parameter("stride", "must be >= 1"));
    }
    for m in [content, style] {
        if patch > m.height() || patch > m.width() {
            return Err(Error::PatchTooLarge {
                patch,
                height: m.height(),
                width: m.width(),
            });
        }
    }

    let channels = content.channels();
    let style_positions = patch_grid(style.height(), patch, stride)
        .into_iter()
        .flat_map(|sy| {
            patch_grid(style.width(), patch, stride)
                .into_iter()
                .map(move |sx| (sy, sx))
        })
        .collect::<Vec<_>>();
    let style_norms: Vec<T> = style_positions
        .iter()
        .map(|&(sy, sx)| patch_squared_norm(style, sy, sx, patch).sqrt())
        .collect();

    let (h, w) = (content.height(), content.width());
    let v = content.spatial_size();
    let mut acc = vec![T::zero(); channels * v];
    let mut hits = vec![T::zero(); v];

    for cy in patch_grid(h, patch, stride) {
        for cx in patch_grid(w, patch, stride) {
            let content_norm = patch_squared_norm(content, cy, cx, patch).sqrt();
            let mut best: Option<(T, T, usize)> = None; // (score, dist2, index)
            for (idx, &(sy, sx)) in style_positions.iter().enumerate() {
                let dot = patch_dot(content, cy, cx, style, sy, sx, patch);
                let denom = content_norm * style_norms[idx];
                let score = if denom == T::zero() {
                    T::zero()
                } else {
                    dot / denom
                };
                let dist2 = content_norm * content_norm + style_norms[idx] * style_norms[idx]
                    - (dot + dot);
                let candidate = (score, dist2, idx);
                let better = match best {
                    None => true,
                    Some((bs, bd, _)) => score > bs || (score == bs && dist2 < bd),
                };
                if better {
                    best = Some(candidate);
                }
            }
            let (_, _, best_idx) = best.expect("at least one style patch");
            let (sy, sx) = style_positions[best_idx];
            for c in 0..channels {
                let style_row = style.channel(c);
                let acc_row = &mut acc[c * v..(c + 1) * v];
                for dy in 0..patch {
                    for dx in 0..patch {
                        let src = style_row[(sy + dy) * style.width() + sx + dx];
                        acc_row[(cy + dy) * w + cx + dx] = acc_row[(cy + dy) * w + cx + dx] + src;
                    }
                }
            }
            for dy in 0..patch {
                for dx in 0..patch {
                    let p = (cy + dy) * w + cx + dx;
                    hits[p] = hits[p] + T::one();
                }
            }
        }
    }

    for c in 0..channels {
        for p in 0..v {
            acc[c * v + p] = acc[c * v + p] / hits[p];
        }
    }
    FeatureMap::new(channels, h, w, acc)
}

/// Patch anchor positions along one axis: multiples of `stride`, with the
/// final anchor clamped so the last rows/columns are always covered.
fn patch_grid(extent: usize, patch: usize, stride: usize) -> Vec<usize> {
    let last = extent - patch;
    let mut grid: Vec<usize> = (0..=last).step_by(stride).collect();
    if *grid.last().expect("non-empty grid") != last {
        grid.push(last);
    }
    grid
}

fn patch_squared_norm<T: Real>(m: &FeatureMap<T>, y: usize, x: usize, patch: usize) -> T {
    let mut acc = T::zero();
    for c in 0..m.channels() {
        let row = m.channel(c);
        for dy in 0..patch {
            for dx in 0..patch {
                let v = row[(y + dy) * m.width() + x + dx];
                acc = acc + v * v;
            }
        }
    }
    acc
}

#[allow(clippy::too_many_arguments)]
fn patch_dot<T: Real>(
    a: &FeatureMap<T>,
    ay: usize,
    ax: usize,
    b: &FeatureMap<T>,
    by: usize,
    bx: usize,
    patch: usize,
) -> T {
    let mut acc = T::zero();
    for c in 0..a.channels() {
        let ra = a.channel(c);
        let rb = b.channel(c);
        for dy in 0..patch {
            for dx in 0..patch {
                acc = acc
                    + ra[(ay + dy) * a.width() + ax + dx] * rb[(by + dy) * b.width() + bx + dx];
            }
        }
    }
    acc
}

/// Uniformly permutes the style values within each channel
/// (`shared = false`), or applies one spatial permutation to every channel
/// (`shared = true`). Deterministic for a fixed seed; channel `c` draws
/// from its own seeded stream so results do not depend on scheduling.
pub fn random_shuffle<T: Real>(style: &FeatureMap<T>, seed: u64, shared: bool) -> FeatureMap<T> {
    let v = style.spatial_size();
    let mut out = vec![T::zero(); style.channels() * v];
    if shared {
        let mut perm: Vec<u32> = (0..v as u32).collect();
        perm.shuffle(&mut channel_rng(seed, 0));
        out.par_chunks_mut(v).enumerate().for_each(|(c, row)| {
            let src = style.channel(c);
            for (o, &p) in row.iter_mut().zip(&perm) {
                *o = src[p as usize];
            }
        });
    } else {
        out.par_chunks_mut(v).enumerate().for_each(|(c, row)| {
            row.copy_from_slice(style.channel(c));
            row.shuffle(&mut channel_rng(seed, c as u64 + 1));
        });
    }
    FeatureMap::from_validated(style.channels(), style.height(), style.width(), out)
}

fn channel_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Per-channel mean/sigma distance between two stat vectors, used by a few
/// transform tests; exposed for reuse by the metrics module tests.
#[cfg(test)]
pub(crate) fn max_abs_diff<T: Real>(a: &FeatureMap<T>, b: &FeatureMap<T>) -> T {
    a.data()
        .iter()
        .zip(b.data())
        .fold(T::zero(), |m, (x, y)| m.max((*x - *y).abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::gram_distance;
    use proptest::prelude::*;

    fn map1(values: &[f64]) -> FeatureMap<f64> {
        FeatureMap::new(1, 1, values.len(), values.to_vec()).unwrap()
    }

    fn random_map(seed: u64, c: usize, h: usize, w: usize) -> FeatureMap<f64> {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        FeatureMap::from_fn(c, h, w, |_, _, _| rng.gen_range(-3.0..3.0)).unwrap()
    }

    /// Brute-force rank matching, independent of the packed-key sort path.
    fn naive_style_project(content: &FeatureMap<f64>, style: &FeatureMap<f64>) -> FeatureMap<f64> {
        let v = content.spatial_size();
        let mut out = vec![0.0; content.channels() * v];
        for c in 0..content.channels() {
            let mut content_idx: Vec<usize> = (0..v).collect();
            content_idx.sort_by(|&a, &b| {
                content.channel(c)[a]
                    .partial_cmp(&content.channel(c)[b])
                    .unwrap()
                    .then(a.cmp(&b))
            });
            let mut style_sorted = style.channel(c).to_vec();
            style_sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
            for (r, &pos) in content_idx.iter().enumerate() {
                out[c * v + pos] = style_sorted[r];
            }
        }
        FeatureMap::new(
            content.channels(),
            content.height(),
            content.width(),
            out,
        )
        .unwrap()
    }

    #[test]
    fn style_project_example() {
        let z = style_project(&map1(&[3.0, 1.0, 2.0]), &map1(&[10.0, 20.0, 30.0])).unwrap();
        assert_eq!(z.channel(0), &[30.0, 10.0, 20.0]);
    }

    #[test]
    fn style_project_self_is_identity_for_distinct_values() {
        let x = map1(&[0.4, -1.5, 2.0, 0.9]);
        let z = style_project(&x, &x).unwrap();
        for (a, b) in z.data().iter().zip(x.data()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn style_project_constant_style() {
        let z = style_project(&map1(&[1.0, 2.0]), &map1(&[5.0, 5.0])).unwrap();
        assert_eq!(z.channel(0), &[5.0, 5.0]);
    }

    #[test]
    fn style_project_rejects_mismatches() {
        let c = map1(&[1.0, 2.0]);
        let s2 = FeatureMap::new(2, 1, 2, vec![1.0; 4]).unwrap();
        assert!(matches!(
            style_project(&c, &s2),
            Err(Error::ChannelMismatch { .. })
        ));
        let s3 = map1(&[1.0, 2.0, 3.0]);
        assert!(matches!(
            style_project(&c, &s3),
            Err(Error::SpatialMismatch { .. })
        ));
    }

    #[test]
    fn quantile_equal_sizes_matches_exact() {
        let c = map1(&[3.0, 1.0, 2.0]);
        let s = map1(&[10.0, 20.0, 30.0]);
        let z = style_project_quantile(&c, &s).unwrap();
        assert_eq!(z.channel(0), &[30.0, 10.0, 20.0]);
    }

    #[test]
    fn quantile_interpolates_endpoints() {
        let c = map1(&[1.0, 2.0]);
        let s = map1(&[0.0, 10.0, 20.0, 30.0]);
        let z = style_project_quantile(&c, &s).unwrap();
        assert_eq!(z.channel(0), &[0.0, 30.0]);
    }

    #[test]
    fn quantile_single_position_takes_median() {
        let c = map1(&[42.0]);
        let s = map1(&[0.0, 10.0, 20.0, 30.0]);
        let z = style_project_quantile(&c, &s).unwrap();
        assert_eq!(z.channel(0), &[15.0]);
    }

    #[test]
    fn quantile_constant_content_emits_quantiles_in_index_order() {
        let c = map1(&[7.0, 7.0, 7.0]);
        let s = map1(&[30.0, 10.0, 20.0]);
        let z = style_project_quantile(&c, &s).unwrap();
        assert_eq!(z.channel(0), &[10.0, 20.0, 30.0]);
    }

    #[test]
    fn adain_example() {
        let z = adain_transform(&map1(&[-1.0, 1.0]), &map1(&[4.0, 6.0])).unwrap();
        assert_eq!(z.channel(0), &[4.0, 6.0]);
    }

    #[test]
    fn adain_self_is_identity() {
        let x = random_map(7, 3, 4, 4);
        let z = adain_transform(&x, &x).unwrap();
        assert!(max_abs_diff(&z, &x) < 1e-12);
    }

    #[test]
    fn adain_constant_content_takes_style_mean() {
        let z = adain_transform(&map1(&[3.0, 3.0]), &map1(&[8.0, 12.0])).unwrap();
        assert_eq!(z.channel(0), &[10.0, 10.0]);
    }

    #[test]
    fn wct_single_channel_reduces_to_adain() {
        let c = map1(&[0.0, 1.0, 2.0, 5.0]);
        let s = map1(&[10.0, 11.0, 14.0, 20.0]);
        let w = wct_transform(&c, &s, 1e-8).unwrap();
        let a = adain_transform(&c, &s).unwrap();
        assert!(max_abs_diff(&w, &a) < 1e-9);
    }

    #[test]
    fn wct_whiten_decorrelates() {
        let m = random_map(11, 4, 8, 8);
        let white = wct_whiten(&m, 1e-8).unwrap();
        // independent covariance check
        let v = white.spatial_size() as f64;
        for i in 0..white.channels() {
            for j in 0..white.channels() {
                let mut acc = 0.0;
                for (a, b) in white.channel(i).iter().zip(white.channel(j)) {
                    acc += a * b;
                }
                let cov = acc / v;
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((cov - expect).abs() < 1e-6, "cov[{i}][{j}] = {cov}");
            }
        }
    }

    #[test]
    fn wct_self_is_identity_when_well_conditioned() {
        let m = random_map(13, 3, 8, 8);
        let z = wct_transform(&m, &m, 1e-8).unwrap();
        assert!(max_abs_diff(&z, &m) < 1e-6);
    }

    #[test]
    fn style_swap_scalar_example() {
        let z = style_swap(&map1(&[1.0, 9.0]), &map1(&[2.0, 8.0]), 1, 1).unwrap();
        assert_eq!(z.channel(0), &[2.0, 8.0]);
    }

    #[test]
    fn style_swap_single_patch() {
        let c = FeatureMap::new(1, 3, 3, (0..9).map(f64::from).collect()).unwrap();
        let s = FeatureMap::new(1, 3, 3, (9..18).map(f64::from).collect()).unwrap();
        let z = style_swap(&c, &s, 3, 1).unwrap();
        assert_eq!(z.data(), s.data());
    }

    #[test]
    fn style_swap_exact_copies_reproduce_content() {
        let c = FeatureMap::new(1, 2, 4, vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0]).unwrap();
        // style holds every content patch (it is the content map itself,
        // plus a scaled variant stacked to its right)
        let mut style_data = Vec::new();
        for y in 0..2 {
            for x in 0..4 {
                style_data.push(c.channel(0)[y * 4 + x]);
            }
        }
        let s = FeatureMap::new(1, 2, 4, style_data).unwrap();
        let z = style_swap(&c, &s, 1, 1).unwrap();
        assert_eq!(z.data(), c.data());
    }

    #[test]
    fn style_swap_validates_parameters() {
        let m = random_map(3, 1, 4, 4);
        assert!(style_swap(&m, &m, 2, 1).is_err());
        assert!(style_swap(&m, &m, 3, 0).is_err());
        assert!(matches!(
            style_swap(&m, &m, 5, 1),
            Err(Error::PatchTooLarge { .. })
        ));
    }

    #[test]
    fn random_shuffle_is_deterministic_and_multiset_preserving() {
        let s = random_map(21, 3, 5, 5);
        let a = random_shuffle(&s, 9, false);
        let b = random_shuffle(&s, 9, false);
        assert_eq!(a, b);
        for c in 0..s.channels() {
            let mut want = s.channel(c).to_vec();
            let mut got = a.channel(c).to_vec();
            want.sort_by(|a, b| a.partial_cmp(b).unwrap());
            got.sort_by(|a, b| a.partial_cmp(b).unwrap());
            assert_eq!(want, got);
        }
        let other_seed = random_shuffle(&s, 10, false);
        assert_ne!(a, other_seed);
    }

    #[test]
    fn shared_shuffle_preserves_gram() {
        let s = random_map(31, 4, 6, 6);
        let z = random_shuffle(&s, 5, true);
        assert!(gram_distance(&s, &z).unwrap() < 1e-9);
    }

    #[test]
    fn apply_method_dispatch() {
        let c = random_map(41, 3, 4, 4);
        let s = random_map(42, 3, 4, 4);
        assert_eq!(
            apply_method(TransformMethod::NoShuffle, &c, &s).unwrap(),
            s
        );
        assert_eq!(apply_method(TransformMethod::Identity, &c, &s).unwrap(), c);
        assert_eq!(
            apply_method(TransformMethod::StyleProjection, &c, &s).unwrap(),
            style_project(&c, &s).unwrap()
        );
        // mismatched sizes route through the quantile variant
        let smaller = random_map(43, 3, 3, 3);
        assert_eq!(
            apply_method(TransformMethod::StyleProjection, &c, &smaller).unwrap(),
            style_project_quantile(&c, &smaller).unwrap()
        );
    }

    proptest! {
        #[test]
        fn sp_matches_naive_and_preserves_multisets(
            seed in 0u64..1000,
            c in 1usize..4,
            h in 1usize..6,
            w in 1usize..6,
        ) {
            let content = random_map(seed, c, h, w);
            let style = random_map(seed.wrapping_add(5000), c, h, w);
            let got = style_project(&content, &style).unwrap();
            let want = naive_style_project(&content, &style);
            for (a, b) in got.data().iter().zip(want.data()) {
                prop_assert_eq!(a.to_bits(), b.to_bits());
            }
            for ch in 0..c {
                let mut sorted_out = got.channel(ch).to_vec();
                let mut sorted_style = style.channel(ch).to_vec();
                sorted_out.sort_by(|a, b| a.partial_cmp(b).unwrap());
                sorted_style.sort_by(|a, b| a.partial_cmp(b).unwrap());
                for (a, b) in sorted_out.iter().zip(&sorted_style) {
                    prop_assert_eq!(a.to_bits(), b.to_bits());
                }
            }
        }

        #[test]
        fn adain_output_stats_match_style(
            seed in 0u64..1000,
            c in 1usize..4,
        ) {
            let content = random_map(seed, c, 6, 6);
            let style = random_map(seed.wrapping_add(9000), c, 6, 6);
            let z = adain_transform(&content, &style).unwrap();
            for (zs, ss) in z.channel_stats().iter().zip(style.channel_stats()) {
                prop_assert!((zs.mean - ss.mean).abs() < 1e-9);
                prop_assert!((zs.std_dev - ss.std_dev).abs() < 1e-9);
            }
            // monotone per channel: ordering of content values is preserved
            for ch in 0..c {
                let x = content.channel(ch);
                let y = z.channel(ch);
                for i in 0..x.len() {
                    for j in 0..x.len() {
                        if x[i] < x[j] {
                            prop_assert!(y[i] <= y[j]);
                        }
                    }
                }
            }
        }
    }
}
