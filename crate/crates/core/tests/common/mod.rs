#![allow(dead_code)]

use std::f64::consts::PI;

use dequant::{Complex, Frame64, Grid64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_signal(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

pub fn random_grid(rng: &mut ChaCha8Rng, frame: &Frame64) -> Grid64 {
    let values = (0..frame.coeff_count())
        .map(|_| Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    Grid64::from_values(values, frame.num_frames(), frame.channels()).unwrap()
}

pub fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

pub fn dist(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
}

pub fn grid_dist(a: &Grid64, b: &Grid64) -> f64 {
    a.values()
        .iter()
        .zip(b.values())
        .map(|(x, y)| (x - y).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// Gabor system built straight from its definition: atoms
/// `h[n - m a] exp(2 pi i k (n - m a) / M)` of the raw Hann prototype, then
/// made tight by the inverse square root of the frame operator computed as a
/// dense matrix.
pub struct DenseFrame {
    pub rows: usize,
    pub cols: usize,
    /// Analysis matrix, row `m * M + k`, column `n`.
    pub a: Vec<Complex<f64>>,
}

impl DenseFrame {
    pub fn new(window_len: usize, hop: usize, channels: usize, padded_len: usize) -> Self {
        let proto: Vec<f64> = (0..window_len)
            .map(|l| {
                let s = (PI * (l as f64 + 0.5) / window_len as f64).sin();
                s * s
            })
            .collect();
        let frames = padded_len / hop;
        let rows = frames * channels;
        let mut raw = vec![Complex::new(0.0, 0.0); rows * padded_len];
        for m in 0..frames {
            for k in 0..channels {
                for (l, &h) in proto.iter().enumerate() {
                    let n = (m * hop + l) % padded_len;
                    let phase = -2.0 * PI * (k * l) as f64 / channels as f64;
                    raw[(m * channels + k) * padded_len + n] += Complex::from_polar(h, phase);
                }
            }
        }
        // Frame operator S = Re(D^H D), which must come out diagonal.
        let mut s = vec![0.0; padded_len * padded_len];
        for i in 0..padded_len {
            for j in 0..padded_len {
                let mut acc = Complex::new(0.0, 0.0);
                for r in 0..rows {
                    acc += raw[r * padded_len + i].conj() * raw[r * padded_len + j];
                }
                s[i * padded_len + j] = acc.re;
            }
        }
        for i in 0..padded_len {
            for j in 0..padded_len {
                if i != j {
                    assert!(s[i * padded_len + j].abs() < 1e-9, "frame operator not diagonal");
                }
            }
        }
        let mut a = raw;
        for r in 0..rows {
            for n in 0..padded_len {
                a[r * padded_len + n] /= s[n * padded_len + n].sqrt();
            }
        }
        Self {
            rows,
            cols: padded_len,
            a,
        }
    }

    pub fn analysis(&self, x: &[f64]) -> Vec<Complex<f64>> {
        (0..self.rows)
            .map(|r| (0..self.cols).map(|n| self.a[r * self.cols + n] * x[n]).sum())
            .collect()
    }

    /// Real part of `D^H c`.
    pub fn synthesis(&self, c: &[Complex<f64>]) -> Vec<f64> {
        (0..self.cols)
            .map(|n| {
                (0..self.rows)
                    .map(|r| (self.a[r * self.cols + n].conj() * c[r]).re)
                    .sum()
            })
            .collect()
    }

    /// Real matrix of the synthesis map acting on `(re, im)` pairs, `cols x 2 rows`.
    pub fn synthesis_real(&self) -> Vec<f64> {
        let mut b = vec![0.0; self.cols * 2 * self.rows];
        for n in 0..self.cols {
            for r in 0..self.rows {
                let a = self.a[r * self.cols + n];
                // Re(conj(a) (x + iy)) = a.re x + a.im y
                b[n * 2 * self.rows + 2 * r] = a.re;
                b[n * 2 * self.rows + 2 * r + 1] = a.im;
            }
        }
        b
    }
}

pub fn pad(x: &[f64], len: usize) -> Vec<f64> {
    let mut v = x.to_vec();
    v.resize(len, 0.0);
    v
}

/// Projection onto `{c : A* c in [lo, hi]}` by proximal gradient on the dual,
/// using only the dense synthesis matrix (no tightness assumed).
pub fn qp_projection(dense: &DenseFrame, c: &[f64], lo: &[f64], hi: &[f64]) -> Vec<f64> {
    let b = dense.synthesis_real();
    let (p, q) = (dense.cols, 2 * dense.rows);
    let bt = |lam: &[f64]| -> Vec<f64> { (0..q).map(|j| (0..p).map(|i| b[i * q + j] * lam[i]).sum()).collect() };
    let bv = |v: &[f64]| -> Vec<f64> { (0..p).map(|i| (0..q).map(|j| b[i * q + j] * v[j]).sum()).collect() };
    // Lipschitz constant of the dual gradient from power iteration on B B^T.
    let mut v = vec![1.0; p];
    let mut l = 1.0;
    for _ in 0..100 {
        let w = bv(&bt(&v));
        l = norm(&w) / norm(&v);
        v = w;
    }
    let t = 0.5 / l;
    let target = bv(c);
    let mut lam = vec![0.0; p];
    for _ in 0..3000 {
        let g = bv(&bt(&lam));
        for i in 0..p {
            let y = lam[i] - t * (g[i] - target[i]);
            lam[i] = y - t * (y / t).clamp(lo[i], hi[i]);
        }
    }
    let corr = bt(&lam);
    c.iter().zip(&corr).map(|(a, b)| a - b).collect()
}

pub fn to_real(g: &Grid64) -> Vec<f64> {
    g.values().iter().flat_map(|z| [z.re, z.im]).collect()
}

/// Nearest box point by successively refined grid search.
pub fn grid_search_projection(x: &[f64; 3], lo: &[f64; 3], hi: &[f64; 3]) -> [f64; 3] {
    let (mut lo, mut hi) = (*lo, *hi);
    let mut best = [0.0; 3];
    for _ in 0..40 {
        let steps = 10;
        let mut best_d = f64::INFINITY;
        for i in 0..=steps {
            for j in 0..=steps {
                for k in 0..=steps {
                    let p = [
                        lo[0] + (hi[0] - lo[0]) * i as f64 / steps as f64,
                        lo[1] + (hi[1] - lo[1]) * j as f64 / steps as f64,
                        lo[2] + (hi[2] - lo[2]) * k as f64 / steps as f64,
                    ];
                    let d: f64 = (0..3).map(|t| (p[t] - x[t]).powi(2)).sum();
                    if d < best_d {
                        best_d = d;
                        best = p;
                    }
                }
            }
        }
        for t in 0..3 {
            let w = (hi[t] - lo[t]) / 5.0;
            lo[t] = (best[t] - w).max(lo[t]);
            hi[t] = (best[t] + w).min(hi[t]);
        }
    }
    best
}

/// Minimizer of a unimodal `f` on `[a, b]`.
pub fn golden_section(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    while b - a > 1e-10 {
        let x1 = b - ratio * (b - a);
        let x2 = a + ratio * (b - a);
        if f(x1) < f(x2) {
            b = x2;
        } else {
            a = x1;
        }
    }
    0.5 * (a + b)
}
