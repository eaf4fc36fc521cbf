#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ssim_eghs::{Image, QuantizedImage, SsimParams};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random real-valued image in [0, 255].
pub fn random_image(rng: &mut ChaCha8Rng, w: usize, h: usize) -> Image {
    Image::new(
        w,
        h,
        (0..w * h).map(|_| rng.gen_range(0.0..255.0)).collect(),
    )
    .unwrap()
}

/// Smooth blobs plus noise, quantized to 8 bits.
pub fn random_textured(rng: &mut ChaCha8Rng, w: usize, h: usize) -> QuantizedImage {
    let fx = rng.gen_range(0.05..0.4);
    let fy = rng.gen_range(0.05..0.4);
    let base = rng.gen_range(40.0..160.0);
    let amp = rng.gen_range(20.0..80.0);
    let slope = rng.gen_range(-1.5..1.5);
    let data = (0..w * h)
        .map(|i| {
            let (x, y) = ((i % w) as f64, (i / w) as f64);
            let v = base
                + slope * x
                + amp * (fx * x).sin() * (fy * y).cos()
                + rng.gen_range(-12.0..12.0);
            v.round().clamp(0.0, 255.0)
        })
        .collect();
    QuantizedImage::new(w, h, data, 256).unwrap()
}

/// Horizontal ramp with a sinusoidal texture, 8-bit.
pub fn gradient_texture(w: usize, h: usize) -> QuantizedImage {
    let data = (0..w * h)
        .map(|i| {
            let (x, y) = ((i % w) as f64, (i / w) as f64);
            let ramp = 30.0 + 150.0 * x / (w - 1) as f64 + 40.0 * y / (h - 1) as f64;
            let texture =
                18.0 * (0.7 * x).sin() * (0.45 * y).cos() + 6.0 * (1.9 * x + 1.3 * y).sin();
            (ramp + texture).round().clamp(0.0, 255.0)
        })
        .collect();
    QuantizedImage::new(w, h, data, 256).unwrap()
}

fn mirror(i: isize, n: isize) -> usize {
    // Symmetric extension written out by reflection count, independent of the
    // library's loop.
    let period = 2 * n;
    let m = i.rem_euclid(period);
    (if m < n { m } else { period - 1 - m }) as usize
}

/// Naive per-pixel SSIM: explicit 2-D window, no separability, no caching.
pub fn naive_ssim_map(x: &Image, y: &Image, params: &SsimParams) -> Vec<f64> {
    let (w, h) = x.dimensions();
    let k = params.kernel();
    let side = k.side() as isize;
    let r = side / 2;
    let weights = k.weights();
    let (c1, c2) = (params.c1(), params.c2());
    let mut out = Vec::with_capacity(w * h);
    for py in 0..h as isize {
        for px in 0..w as isize {
            let (mut mx, mut my, mut exx, mut eyy, mut exy) = (0.0, 0.0, 0.0, 0.0, 0.0);
            for dy in -r..=r {
                for dx in -r..=r {
                    let wgt = weights[((dy + r) * side + dx + r) as usize];
                    let sx = mirror(px + dx, w as isize);
                    let sy = mirror(py + dy, h as isize);
                    let a = x.get(sx, sy);
                    let b = y.get(sx, sy);
                    mx += wgt * a;
                    my += wgt * b;
                    exx += wgt * a * a;
                    eyy += wgt * b * b;
                    exy += wgt * a * b;
                }
            }
            let vx = exx - mx * mx;
            let vy = eyy - my * my;
            let cxy = exy - mx * my;
            out.push(
                (2.0 * mx * my + c1) * (2.0 * cxy + c2)
                    / ((mx * mx + my * my + c1) * (vx + vy + c2)),
            );
        }
    }
    out
}

pub fn naive_mean(x: &Image, y: &Image, params: &SsimParams) -> f64 {
    let m = naive_ssim_map(x, y, params);
    m.iter().sum::<f64>() / m.len() as f64
}

/// Central finite differences of the mean SSIM, one pixel at a time.
pub fn fd_gradient(x: &Image, y: &Image, params: &SsimParams, h: f64) -> Vec<f64> {
    let base = y.data().to_vec();
    (0..base.len())
        .map(|i| {
            let mut plus = base.clone();
            plus[i] += h;
            let mut minus = base.clone();
            minus[i] -= h;
            let fp =
                ssim_eghs::ssim_map(x, &Image::new(y.width(), y.height(), plus).unwrap(), params)
                    .unwrap()
                    .mean;
            let fm = ssim_eghs::ssim_map(
                x,
                &Image::new(y.width(), y.height(), minus).unwrap(),
                params,
            )
            .unwrap()
            .mean;
            (fp - fm) / (2.0 * h)
        })
        .collect()
}

pub fn rel_l2(a: &[f64], b: &[f64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(p, q)| (p - q).powi(2)).sum();
    let den: f64 = b.iter().map(|q| q * q).sum();
    (num / den).sqrt()
}
