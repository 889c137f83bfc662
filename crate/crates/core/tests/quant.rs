mod common;

use common::*;
use dequant::quant::{box_of, is_consistent, project_gamma, project_gamma_star, quantize_sample};
use dequant::{quantization_step, quantize, Box64, Frame64, Observation64};
use proptest::prelude::*;
use rand::Rng;

#[test]
fn hand_examples() {
    let q = quantize(&[0.3, 0.0, -0.3, 1.0], 3).unwrap();
    assert_eq!(q.samples(), &[0.375, 0.125, -0.375, 0.875]);
    assert_eq!(quantization_step::<f64>(2).unwrap(), 0.5);
    assert_eq!(quantization_step::<f64>(8).unwrap(), 0.0078125);
    assert!(quantization_step::<f64>(0).is_err());
    assert!(quantize::<f64>(&[], 3).is_err());
    assert!(quantize(&[1.5], 3).is_err());
}

#[test]
fn box_bounds() {
    let q = Observation64::from_levels(vec![0.375, -0.125], 3).unwrap();
    let b = box_of(&q).unwrap();
    assert_eq!(b.lower(), &[0.25, -0.25]);
    assert_eq!(b.upper(), &[0.5, 0.0]);
    assert_eq!(project_gamma(&[0.9, -0.1], &b).unwrap(), vec![0.5, -0.1]);
    assert!(is_consistent(&[0.5, 0.0], &b, 0.0));
    assert!(!is_consistent(&[0.375 + 0.25, -0.125], &b, 0.1));
}

#[test]
fn projection_matches_grid_search() {
    let mut r = rng(10);
    for _ in 0..1000 {
        let lo: [f64; 3] = std::array::from_fn(|_| r.gen_range(-1.0..1.0));
        let hi: [f64; 3] = std::array::from_fn(|t| lo[t] + r.gen_range(0.01..0.5));
        let x: [f64; 3] = std::array::from_fn(|_| r.gen_range(-1.5..1.5));
        let set = Box64::new(lo.to_vec(), hi.to_vec()).unwrap();
        let p = project_gamma(&x, &set).unwrap();
        let oracle = grid_search_projection(&x, &lo, &hi);
        for t in 0..3 {
            assert!((p[t] - oracle[t]).abs() < 1e-6, "{x:?} -> {p:?} vs {oracle:?}");
        }
    }
}

fn toy_box(r: &mut rand_chacha::ChaCha8Rng, n: usize) -> Box64 {
    let x = random_signal(r, n);
    box_of(&quantize(&x, 3).unwrap()).unwrap()
}

#[test]
fn gamma_star_projection_matches_qp_oracle() {
    let mut r = rng(11);
    let frame = Frame64::new(8, 2, 8, 16).unwrap();
    let dense = DenseFrame::new(8, 2, 8, 16);
    for _ in 0..5 {
        let set = toy_box(&mut r, 16);
        let c = random_grid(&mut r, &frame);
        let p = project_gamma_star(&c, &set, &frame).unwrap();
        let oracle = qp_projection(&dense, &to_real(&c), set.lower(), set.upper());
        let err = to_real(&p)
            .iter()
            .zip(&oracle)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(err < 1e-6, "max deviation {err}");
    }
}

#[test]
fn gamma_star_projection_properties() {
    let mut r = rng(12);
    let frame = Frame64::new(16, 4, 32, 50).unwrap();
    for _ in 0..20 {
        let set = toy_box(&mut r, 50);
        let c = random_grid(&mut r, &frame);
        let p = project_gamma_star(&c, &set, &frame).unwrap();
        let x = frame.synthesis(&p).unwrap();
        assert!(is_consistent(&x[..50], &set, 1e-9));
        let pp = project_gamma_star(&p, &set, &frame).unwrap();
        assert!(grid_dist(&p, &pp) < 1e-9);

        let inside = frame
            .analysis(
                &set.lower()
                    .iter()
                    .zip(set.upper())
                    .map(|(a, b)| 0.5 * (a + b))
                    .collect::<Vec<_>>(),
            )
            .unwrap();
        let kept = project_gamma_star(&inside, &set, &frame).unwrap();
        assert!(grid_dist(&inside, &kept) < 1e-10);
    }
}

proptest! {
    #[test]
    fn error_bound_and_idempotency(x in prop::collection::vec(-1.0f64..=1.0, 1..64), w in 2u32..=16) {
        let q = quantize(&x, w).unwrap();
        let delta = q.delta();
        for (a, b) in x.iter().zip(q.samples()) {
            prop_assert!((a - b).abs() <= delta / 2.0);
            prop_assert!(((b / delta) - 0.5).fract() == 0.0);
        }
        let again = quantize(q.samples(), w).unwrap();
        prop_assert_eq!(again.samples(), q.samples());
        prop_assert!(is_consistent(&x, &q.consistency_set(), 0.0));
    }

    #[test]
    fn odd_symmetry(v in -0.999999f64..0.999999, w in 2u32..=16) {
        prop_assume!(v != 0.0);
        let d = quantization_step::<f64>(w).unwrap();
        prop_assert_eq!(quantize_sample(-v, d), -quantize_sample(v, d));
    }

    #[test]
    fn projection_is_nonexpansive(
        x in prop::collection::vec(-2.0f64..2.0, 8),
        y in prop::collection::vec(-2.0f64..2.0, 8),
        levels in prop::collection::vec(-0.99f64..0.99, 8),
    ) {
        let set = box_of(&quantize(&levels, 4).unwrap()).unwrap();
        let (px, py) = (project_gamma(&x, &set).unwrap(), project_gamma(&y, &set).unwrap());
        prop_assert!(dist(&px, &py) <= dist(&x, &y) + 1e-15);
        prop_assert_eq!(project_gamma(&px, &set).unwrap(), px.clone());
    }

    #[test]
    fn gamma_star_lands_in_gamma(seed in any::<u64>()) {
        let mut r = rng(seed);
        let frame = Frame64::new(8, 4, 16, 20).unwrap();
        let set = toy_box(&mut r, 20);
        let c = random_grid(&mut r, &frame);
        let x = frame.synthesis(&project_gamma_star(&c, &set, &frame).unwrap()).unwrap();
        prop_assert!(is_consistent(&x, &set, 1e-9));
    }
}
