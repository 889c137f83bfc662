mod common;

use common::*;
use dequant::{Complex, Frame32, Frame64, Grid64};
use proptest::prelude::*;

const GEOMETRIES: [(usize, usize, usize, usize); 6] = [
    (8, 2, 8, 16),
    (8, 4, 16, 20),
    (6, 3, 12, 18),
    (4, 4, 4, 16),
    (16, 4, 32, 50),
    (10, 5, 10, 35),
];

#[test]
fn matches_dense_atom_matrix() {
    let mut r = rng(1);
    for &(l, a, m, n) in &GEOMETRIES {
        let frame = Frame64::new(l, a, m, n).unwrap();
        let dense = DenseFrame::new(l, a, m, frame.padded_len());
        for _ in 0..3 {
            let x = random_signal(&mut r, n);
            let c = frame.analysis(&x).unwrap();
            let oracle = dense.analysis(&pad(&x, frame.padded_len()));
            let err: f64 = c
                .values()
                .iter()
                .zip(&oracle)
                .map(|(u, v)| (u - v).norm())
                .fold(0.0, f64::max);
            assert!(err < 1e-12, "{l}/{a}/{m}: analysis error {err}");

            let g = random_grid(&mut r, &frame);
            let y = frame.synthesis(&g).unwrap();
            let oracle = dense.synthesis(g.values());
            assert!(dist(&y, &oracle) < 1e-12, "{l}/{a}/{m}: synthesis mismatch");
        }
    }
}

#[test]
fn window_coefficients_are_atom_inner_products() {
    let frame = Frame64::new(8, 2, 8, 16).unwrap();
    let dense = DenseFrame::new(8, 2, 8, 16);
    let x = pad(frame.window(), 16);
    let c = frame.analysis(&x).unwrap();
    for (u, v) in c.values().iter().zip(dense.analysis(&x)) {
        assert!((u - v).norm() < 1e-13);
    }
}

#[test]
fn reference_scale_geometry() {
    let f = Frame64::new(8192, 2048, 16384, 88200).unwrap();
    assert_eq!(f.padded_len(), 90112);
    assert_eq!(f.num_frames(), 44);
    assert_eq!(f.coeff_count(), 44 * 16384);
    assert!(Frame64::new(8, 2, 4, 16).is_err());
}

#[test]
fn operator_norm_is_one() {
    let mut r = rng(2);
    for &(l, a, m, n) in &GEOMETRIES {
        let frame = Frame64::new(l, a, m, n).unwrap();
        let mut x = random_signal(&mut r, frame.padded_len());
        let mut est = 0.0;
        for _ in 0..50 {
            let y = frame.synthesis(&frame.analysis(&x).unwrap()).unwrap();
            est = norm(&y) / norm(&x);
            x = y;
        }
        assert!((est - 1.0).abs() < 1e-8, "power iteration gave {est}");
    }
}

#[test]
fn single_precision_is_tight() {
    let mut r = rng(3);
    let frame = Frame32::new(16, 4, 32, 64).unwrap();
    let x: Vec<f32> = random_signal(&mut r, 64).into_iter().map(|v| v as f32).collect();
    let back = frame.synthesis(&frame.analysis(&x).unwrap()).unwrap();
    let err = x.iter().zip(&back).map(|(a, b)| (a - b).abs()).fold(0.0f32, f32::max);
    assert!(err < 1e-5);
}

#[test]
fn rejects_foreign_grids() {
    let frame = Frame64::new(8, 2, 8, 16).unwrap();
    let other = Grid64::zeros(frame.num_frames() + 1, 8);
    assert!(frame.synthesis(&other).is_err());
    assert!(frame.analysis(&[0.0; 17]).is_err());
}

fn geometry() -> impl Strategy<Value = Frame64> {
    (0..GEOMETRIES.len()).prop_map(|i| {
        let (l, a, m, n) = GEOMETRIES[i];
        Frame64::new(l, a, m, n).unwrap()
    })
}

fn signal(len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, len)
}

proptest! {
    #[test]
    fn parseval_and_reconstruction((frame, x) in geometry().prop_flat_map(|f| { let n = f.padded_len(); (Just(f), signal(n)) })) {
        let c = frame.analysis(&x).unwrap();
        let nx = norm(&x);
        prop_assume!(nx > 1e-6);
        prop_assert!((c.norm() / nx - 1.0).abs() < 1e-10);
        let back = frame.synthesis(&c).unwrap();
        prop_assert!(dist(&back, &x) / nx < 1e-10);
    }

    #[test]
    fn adjointness((frame, x, seed) in geometry().prop_flat_map(|f| { let n = f.padded_len(); (Just(f), signal(n), any::<u64>()) })) {
        let c = random_grid(&mut rng(seed), &frame);
        let lhs = frame.analysis(&x).unwrap().inner(&c);
        let y = frame.synthesis(&c).unwrap();
        let rhs: f64 = x.iter().zip(&y).map(|(a, b)| a * b).sum();
        prop_assert!((lhs - rhs).abs() <= 1e-9 * norm(&x) * c.norm());
    }

    #[test]
    fn linearity((frame, x, y, alpha, beta) in geometry().prop_flat_map(|f| { let n = f.padded_len(); (Just(f), signal(n), signal(n), -3.0f64..3.0, -3.0f64..3.0) })) {
        let combo: Vec<f64> = x.iter().zip(&y).map(|(a, b)| alpha * a + beta * b).collect();
        let lhs = frame.analysis(&combo).unwrap();
        let (cx, cy) = (frame.analysis(&x).unwrap(), frame.analysis(&y).unwrap());
        let rhs: Vec<Complex<f64>> = cx.values().iter().zip(cy.values()).map(|(a, b)| a * alpha + b * beta).collect();
        let err: f64 = lhs.values().iter().zip(&rhs).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        prop_assert!(err < 1e-10);
    }

    #[test]
    fn real_signals_give_hermitian_frames(x in signal(16)) {
        let frame = Frame64::new(8, 2, 8, 16).unwrap();
        let c = frame.analysis(&x).unwrap();
        for m in 0..frame.num_frames() {
            let row = c.frame(m);
            for k in 1..8 {
                prop_assert!((row[k] - row[8 - k].conj()).norm() < 1e-12);
            }
        }
    }
}
