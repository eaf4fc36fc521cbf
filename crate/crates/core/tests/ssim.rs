mod common;

use common::*;
use proptest::prelude::*;
use ssim_eghs::{
    hessian_vector_product, local_stats, ssim_gradient, ssim_map, GradientField, Image, SsimParams,
};

#[test]
fn constant_pair_has_flat_stats() {
    let p = SsimParams::default();
    let c = Image::filled(16, 16, 77.0).unwrap();
    let s = local_stats(&c, &c, &p).unwrap();
    for i in 0..256 {
        assert!((s.mu_x[i] - 77.0).abs() < 1e-10);
        assert!((s.mu_y[i] - 77.0).abs() < 1e-10);
        assert!(s.sigma_x_sq[i].abs() < 1e-9);
        assert!(s.sigma_y_sq[i].abs() < 1e-9);
        assert!(s.sigma_xy[i].abs() < 1e-9);
    }
}

#[test]
fn self_covariance_is_variance() {
    let mut r = rng(1);
    let x = random_image(&mut r, 16, 16);
    let s = local_stats(&x, &x, &SsimParams::default()).unwrap();
    assert_eq!(s.sigma_xy, s.sigma_x_sq);
}

#[test]
fn stats_match_naive_window() {
    let mut r = rng(2);
    let x = random_image(&mut r, 16, 16);
    let y = random_image(&mut r, 16, 16);
    let p = SsimParams::default();
    let map = ssim_map(&x, &y, &p).unwrap();
    let oracle = naive_ssim_map(&x, &y, &p);
    for (a, b) in map.values.iter().zip(&oracle) {
        assert!((a - b).abs() < 1e-10, "{a} vs {b}");
    }
    assert!((map.mean - naive_mean(&x, &y, &p)).abs() < 1e-10);
}

#[test]
fn dark_vs_bright_constant() {
    let p = SsimParams::default();
    let dark = Image::filled(12, 12, 0.0).unwrap();
    let bright = Image::filled(12, 12, 255.0).unwrap();
    let c1 = p.c1();
    let expected = c1 / (255.0 * 255.0 + c1);
    let mean = ssim_map(&dark, &bright, &p).unwrap().mean;
    assert!((mean - expected).abs() < 1e-12, "{mean} vs {expected}");
}

#[test]
fn rejects_mismatched_or_small_images() {
    let p = SsimParams::default();
    let a = Image::filled(16, 16, 0.0).unwrap();
    let b = Image::filled(16, 15, 0.0).unwrap();
    assert!(ssim_map(&a, &b, &p).is_err());
    let tiny = Image::filled(10, 16, 0.0).unwrap();
    assert!(ssim_map(&tiny, &tiny, &p).is_err());
}

#[test]
fn gradient_vanishes_at_identity() {
    let mut r = rng(3);
    let x = random_image(&mut r, 16, 16);
    let g = ssim_gradient(&x, &x, &SsimParams::default()).unwrap();
    assert!(g.max_abs() < 1e-10);
}

#[test]
fn gradient_matches_finite_differences() {
    let p = SsimParams::default();
    let mut r = rng(4);
    for _ in 0..3 {
        let x = random_image(&mut r, 16, 16);
        let y = random_image(&mut r, 16, 16);
        let g = ssim_gradient(&x, &y, &p).unwrap();
        let fd = fd_gradient(&x, &y, &p, 1e-3);
        let err = rel_l2(g.data(), &fd);
        assert!(err < 1e-4, "relative error {err}");
    }
}

#[test]
fn constant_pair_gradient_is_translation_invariant() {
    let p = SsimParams::default();
    let x = Image::filled(32, 32, 40.0).unwrap();
    let y = Image::filled(32, 32, 120.0).unwrap();
    let g = ssim_gradient(&x, &y, &p).unwrap();
    let r = p.kernel().radius();
    let reference = g.data()[16 * 32 + 16];
    assert!(reference != 0.0);
    for py in r..32 - r {
        for px in r..32 - r {
            let v = g.data()[py * 32 + px];
            assert!(
                (v - reference).abs() <= 1e-12 * reference.abs(),
                "{v} vs {reference}"
            );
        }
    }
}

fn random_field(r: &mut rand_chacha::ChaCha8Rng, w: usize, h: usize) -> GradientField {
    use rand::Rng;
    GradientField::new(w, h, (0..w * h).map(|_| r.gen_range(-1.0..1.0)).collect()).unwrap()
}

#[test]
fn hvp_of_zero_direction_is_zero() {
    let mut r = rng(5);
    let x = random_image(&mut r, 16, 16);
    let y = random_image(&mut r, 16, 16);
    let hv = hessian_vector_product(
        &x,
        &y,
        &GradientField::zeros(16, 16),
        &SsimParams::default(),
    )
    .unwrap();
    assert!(hv.is_zero());
}

#[test]
fn hvp_is_symmetric() {
    let p = SsimParams::default();
    let mut r = rng(6);
    for _ in 0..5 {
        let x = random_image(&mut r, 16, 16);
        let y = random_image(&mut r, 16, 16);
        let u = random_field(&mut r, 16, 16);
        let v = random_field(&mut r, 16, 16);
        let uhv = u.dot(hessian_vector_product(&x, &y, &v, &p).unwrap().data());
        let vhu = v.dot(hessian_vector_product(&x, &y, &u, &p).unwrap().data());
        let rel = (uhv - vhu).abs() / uhv.abs().max(vhu.abs());
        assert!(rel < 1e-3, "u.Hv = {uhv}, v.Hu = {vhu}");
    }
}

#[test]
fn hvp_matches_taylor_fit() {
    let p = SsimParams::default();
    let mut r = rng(7);
    for _ in 0..5 {
        let x = random_image(&mut r, 16, 16);
        let y = random_image(&mut r, 16, 16);
        let v = random_field(&mut r, 16, 16);
        let curvature = v.dot(hessian_vector_product(&x, &y, &v, &p).unwrap().data());

        // Second-order coefficient from a symmetric three-point fit.
        let eps = 0.5;
        let f = |t: f64| {
            ssim_map(&x, &y.add_scaled(v.data(), t).unwrap(), &p)
                .unwrap()
                .mean
        };
        let fitted = (f(eps) - 2.0 * f(0.0) + f(-eps)) / (eps * eps);
        let rel = (fitted - curvature).abs() / fitted.abs();
        assert!(rel < 0.05, "fit {fitted} vs v.Hv {curvature}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn self_similarity_is_one(seed in any::<u64>()) {
        let mut r = rng(seed);
        let x = random_image(&mut r, 12, 13);
        let m = ssim_map(&x, &x, &SsimParams::default()).unwrap();
        prop_assert!((m.mean - 1.0).abs() < 1e-12);
        prop_assert!(m.values.iter().all(|v| (v - 1.0).abs() < 1e-12));
    }

    #[test]
    fn map_is_bounded_and_symmetric(seed in any::<u64>(), k in 0.001f64..0.05) {
        let mut r = rng(seed);
        let kernel = ssim_eghs::gaussian_kernel(1.5, 11).unwrap();
        let p = SsimParams::new(k, k, 256, kernel).unwrap();
        let x = random_image(&mut r, 12, 12);
        let y = random_image(&mut r, 12, 12);
        let xy = ssim_map(&x, &y, &p).unwrap();
        let yx = ssim_map(&y, &x, &p).unwrap();
        prop_assert!(xy.values.iter().all(|v| (-1.0..=1.0).contains(v)));
        prop_assert!((xy.mean - yx.mean).abs() < 1e-12);
    }
}
