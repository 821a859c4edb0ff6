//! 3x3 convolution, the named gradient kernels, and the mean/median
//! aggregators.
//!
//! Kernels are applied in correlation orientation: the horizontal gradient is
//! positive where the field increases with u. Coefficients are used
//! unnormalized (FD spans two pixels without dividing by two); downstream
//! estimators are invariant to a common positive scale on the gradient pair.

use crate::image::ScalarImage;

/// The four named 3x3 gradient kernel families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GradientKernelKind {
    /// Central finite difference, [-1, 0, 1].
    Fd,
    Sobel,
    Scharr,
    Prewitt,
}

impl GradientKernelKind {
    pub const ALL: [GradientKernelKind; 4] = [
        GradientKernelKind::Fd,
        GradientKernelKind::Sobel,
        GradientKernelKind::Scharr,
        GradientKernelKind::Prewitt,
    ];

    /// Horizontal (d/du) kernel, row-major.
    pub fn horizontal(self) -> [[f64; 3]; 3] {
        match self {
            GradientKernelKind::Fd => [[0.0, 0.0, 0.0], [-1.0, 0.0, 1.0], [0.0, 0.0, 0.0]],
            GradientKernelKind::Sobel => [[-1.0, 0.0, 1.0], [-2.0, 0.0, 2.0], [-1.0, 0.0, 1.0]],
            GradientKernelKind::Scharr => {
                [[-3.0, 0.0, 3.0], [-10.0, 0.0, 10.0], [-3.0, 0.0, 3.0]]
            }
            GradientKernelKind::Prewitt => {
                [[-1.0, 0.0, 1.0], [-1.0, 0.0, 1.0], [-1.0, 0.0, 1.0]]
            }
        }
    }

    /// Vertical (d/dv) kernel: the transpose of the horizontal one.
    pub fn vertical(self) -> [[f64; 3]; 3] {
        transpose(self.horizontal())
    }
}

/// How the eight n_z candidates are reduced to one value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AggregatorKind {
    Mean,
    Median,
}

pub fn transpose(k: [[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let mut t = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            t[i][j] = k[j][i];
        }
    }
    t
}

/// Correlate a 3x3 kernel over the image. An output pixel is valid only if
/// all nine taps are valid and in bounds, so the one-pixel border is always
/// invalid.
pub fn convolve3x3(img: &ScalarImage, kernel: [[f64; 3]; 3]) -> ScalarImage {
    let (w, h) = (img.width(), img.height());
    let mut out = ScalarImage::new(w, h);
    if w < 3 || h < 3 {
        return out;
    }
    // Accumulate nonzero taps only (row-major order preserved), but the
    // validity rule still requires all nine taps valid.
    let mut taps: Vec<(usize, f64)> = Vec::new();
    for (i, row) in kernel.iter().enumerate() {
        for (j, &c) in row.iter().enumerate() {
            if c != 0.0 {
                taps.push((i * w + j, c));
            }
        }
    }
    let (vals, mask) = (img.values(), img.mask());
    for v in 1..h - 1 {
        for u in 1..w - 1 {
            // Linear index of the window's top-left tap.
            let base = (v - 1) * w + (u - 1);
            let ok = mask[base]
                && mask[base + 1]
                && mask[base + 2]
                && mask[base + w]
                && mask[base + w + 1]
                && mask[base + w + 2]
                && mask[base + 2 * w]
                && mask[base + 2 * w + 1]
                && mask[base + 2 * w + 2];
            if ok {
                let mut acc = 0.0;
                for &(off, c) in &taps {
                    acc += c * vals[base + off];
                }
                out.set(u, v, acc);
            }
        }
    }
    out
}

/// Horizontal and vertical gradient estimates sharing one kernel family.
/// Equivalent to two [`convolve3x3`] calls, but the nine-tap validity check
/// is shared between the passes.
pub fn gradient_pair(img: &ScalarImage, kind: GradientKernelKind) -> (ScalarImage, ScalarImage) {
    let (w, h) = (img.width(), img.height());
    let mut out_u = ScalarImage::new(w, h);
    let mut out_v = ScalarImage::new(w, h);
    if w < 3 || h < 3 {
        return (out_u, out_v);
    }
    let mut taps_u: Vec<(usize, f64)> = Vec::new();
    let mut taps_v: Vec<(usize, f64)> = Vec::new();
    let (ku, kv) = (kind.horizontal(), kind.vertical());
    for i in 0..3 {
        for j in 0..3 {
            if ku[i][j] != 0.0 {
                taps_u.push((i * w + j, ku[i][j]));
            }
            if kv[i][j] != 0.0 {
                taps_v.push((i * w + j, kv[i][j]));
            }
        }
    }
    let (vals, mask) = (img.values(), img.mask());
    for v in 1..h - 1 {
        for u in 1..w - 1 {
            let base = (v - 1) * w + (u - 1);
            let ok = mask[base]
                && mask[base + 1]
                && mask[base + 2]
                && mask[base + w]
                && mask[base + w + 1]
                && mask[base + w + 2]
                && mask[base + 2 * w]
                && mask[base + 2 * w + 1]
                && mask[base + 2 * w + 2];
            if ok {
                let mut acc_u = 0.0;
                for &(off, c) in &taps_u {
                    acc_u += c * vals[base + off];
                }
                let mut acc_v = 0.0;
                for &(off, c) in &taps_v {
                    acc_v += c * vals[base + off];
                }
                out_u.set(u, v, acc_u);
                out_v.set(u, v, acc_v);
            }
        }
    }
    (out_u, out_v)
}

/// Reduce candidates to a single value. Empty input is a signal (the caller
/// applies the flat-surface rule), not an error.
pub fn aggregate(candidates: &[f64], kind: AggregatorKind) -> Option<f64> {
    if candidates.is_empty() {
        return None;
    }
    match kind {
        AggregatorKind::Mean => Some(candidates.iter().sum::<f64>() / candidates.len() as f64),
        AggregatorKind::Median => {
            let mut sorted = candidates.to_vec();
            sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let n = sorted.len();
            if n % 2 == 1 {
                Some(sorted[n / 2])
            } else {
                Some(0.5 * (sorted[n / 2 - 1] + sorted[n / 2]))
            }
        }
    }
}
