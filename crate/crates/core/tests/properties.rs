//! Property sweeps over random points of the disk.

use awlift_core::extension::reflection_tensors;
use awlift_core::harmonic::{
    condition_report, curvature_density, margin_at, mobius_precompose, s1_along_diameter,
    schwarzian, sigma_at, u_log_gradient, u_value,
};
use awlift_core::lift::{frame_at, fundamental_forms};
use awlift_core::{Complex64, GridParams, MapSpec, Mobius3, Point3, Step, Vec3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn scaled_enneper(r: f64) -> MapSpec {
    MapSpec::harmonic(
        &format!("{r}*z"),
        &format!("{}*z^3/3", r * r * r),
        &format!("{r}*z"),
    )
    .unwrap()
}

fn tilted() -> MapSpec {
    MapSpec::from_json(r#"{"h":"z+0.1*z^2","q":"0.2+0.3*z"}"#).unwrap()
}

fn disk_points(n: usize, radius: f64, seed: u64) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            Complex64::from_polar(
                radius * rng.gen::<f64>().sqrt(),
                rng.gen_range(0.0..std::f64::consts::TAU),
            )
        })
        .collect()
}

#[test]
fn curvature_density_is_nonnegative_and_vanishes_with_q_prime() {
    let tilted = tilted();
    for z in disk_points(200, 0.95, 1) {
        assert!(curvature_density(&tilted, z).unwrap() > 0.0);
    }
    let constant_q = MapSpec::from_json(r#"{"h":"z","q":"0.5"}"#).unwrap();
    for z in disk_points(50, 0.95, 2) {
        assert_eq!(curvature_density(&constant_q, z).unwrap(), 0.0);
    }
}

#[test]
fn margin_is_invariant_under_rotation_of_the_data() {
    // (h, g) -> (e^{iφ} h, e^{-iφ} g) takes q to e^{-iφ} q
    let base = MapSpec::harmonic("0.5*z", "0.125*z^3/3", "0.5*z").unwrap();
    let rotated = MapSpec::harmonic(
        "(0.6+0.8*i)*0.5*z",
        "(0.6-0.8*i)*0.125*z^3/3",
        "(0.6-0.8*i)*0.5*z",
    )
    .unwrap();
    for z in disk_points(200, 0.95, 3) {
        let (a, b) = (
            margin_at(&base, z).unwrap(),
            margin_at(&rotated, z).unwrap(),
        );
        assert!((a.sigma - b.sigma).abs() < 1e-13);
        assert!((a.margin_t - b.margin_t).abs() < 1e-12 * a.margin_t.max(1.0));
    }
}

#[test]
fn precomposition_obeys_the_chain_rule() {
    let spec = scaled_enneper(0.5);
    let (a, theta) = (Complex64::new(0.3, 0.0), 0.0);
    let pre = mobius_precompose(&spec, a, theta).unwrap();
    for z in disk_points(100, 0.9, 4) {
        let rot = Complex64::from_polar(1.0, theta);
        let t = rot * (z + a) / (1.0 + a.conj() * z);
        let dt = rot * (1.0 - a.norm_sqr()) / ((1.0 + a.conj() * z) * (1.0 + a.conj() * z));
        let expected = schwarzian(&spec, t).unwrap() * dt * dt;
        let got = schwarzian(&pre, z).unwrap();
        assert!(
            (got - expected).norm() < 1e-10 * expected.norm().max(1.0),
            "{got} vs {expected}"
        );
    }
}

#[test]
fn precomposition_does_not_increase_sup_t() {
    let grid = GridParams::new(32, 64, 0.99, 1.5).unwrap();
    for r in [0.3, 0.5] {
        let spec = scaled_enneper(r);
        let base = condition_report(&spec, &grid).unwrap().sup_t;
        let pre = mobius_precompose(&spec, Complex64::new(0.2, -0.3), 0.7).unwrap();
        let moved = condition_report(&pre, &grid).unwrap().sup_t;
        assert!(moved <= 2.0 * r * r + 1e-9, "r={r}: {moved} vs {base}");
    }
}

#[test]
fn s1_closed_forms_and_cross_check() {
    let identity = MapSpec::analytic("z").unwrap();
    let atanh = MapSpec::analytic("atanh(z)").unwrap();
    let enneper = MapSpec::harmonic("z", "z^3/3", "z").unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..100 {
        let x: f64 = rng.gen_range(-0.95..0.95);
        assert!(s1_along_diameter(&identity, x).unwrap().s1.abs() < 1e-14);
        let a = s1_along_diameter(&atanh, x).unwrap();
        let closed = 2.0 / ((1.0 - x * x) * (1.0 - x * x));
        assert!((a.s1 - closed).abs() < 1e-10 * closed);
        let e = s1_along_diameter(&enneper, x).unwrap();
        assert!((e.s1 - e.s1_curvature).abs() < 1e-8 * e.s1.abs().max(1.0));
    }
}

#[test]
fn s1_is_bounded_by_the_margin() {
    let specs = [
        scaled_enneper(0.5),
        scaled_enneper(0.6),
        MapSpec::analytic("((1+z)/(1-z))^0.8").unwrap(),
    ];
    for spec in &specs {
        for k in 0..199 {
            let x = -0.99 + 0.01 * k as f64;
            let s1 = s1_along_diameter(spec, x).unwrap().s1;
            let m = margin_at(spec, Complex64::new(x, 0.0)).unwrap();
            assert!(s1 <= m.abs_schwarzian + m.curv_density + 1e-9, "x={x}");
        }
    }
}

#[test]
fn u_log_gradient_matches_finite_differences() {
    let h = 1e-6;
    for spec in [scaled_enneper(0.5), tilted()] {
        for z in disk_points(100, 0.8, 6) {
            let [gx, gy] = u_log_gradient(&spec, z).unwrap();
            let lu = |w: Complex64| u_value(&spec, w).unwrap().ln();
            let fx = (lu(z + h) - lu(z - h)) / (2.0 * h);
            let fy = (lu(z + Complex64::new(0.0, h)) - lu(z - Complex64::new(0.0, h))) / (2.0 * h);
            assert!((gx - fx).abs() < 1e-7 && (gy - fy).abs() < 1e-7, "{z}");
        }
    }
}

#[test]
fn gradient_of_sigma_is_bounded_when_critical_point_is_at_origin() {
    for r in [0.3, 0.5, 0.6] {
        let spec = scaled_enneper(r);
        for z in disk_points(500, 0.999, 7) {
            let g = sigma_at(&spec, z).unwrap().grad_norm();
            assert!(g <= 2.0 * z.norm() / (1.0 - z.norm_sqr()) + 1e-12);
        }
    }
}

#[test]
fn second_fundamental_form_norm_is_root_abs_gauss_curvature() {
    for spec in [scaled_enneper(1.0), tilted()] {
        for z in disk_points(300, 0.9, 8) {
            let ff = fundamental_forms(&spec, z).unwrap();
            let [[a, b], [_, d]] = ff.ii_frame();
            // principal curvatures of a minimal surface are ±k with k² = |K|
            let op_norm = (0.25 * (a - d) * (a - d) + b * b).sqrt() + 0.5 * (a + d).abs();
            let k = ff.gauss_curvature.abs().sqrt();
            assert!(op_norm <= k * (1.0 + 1e-9) + 1e-12);
            assert!((op_norm - k).abs() < 1e-9 * k.max(1.0));
        }
    }
}

#[test]
fn frame_is_orthonormal_and_matches_reflection_tensors() {
    let spec = tilted();
    for z in disk_points(100, 0.9, 9) {
        let f = frame_at(&spec, z).unwrap();
        assert!(f.x_axis.dot(&f.y_axis).abs() < 1e-12);
        assert!((f.normal.norm() - 1.0).abs() < 1e-12);
        let t = reflection_tensors(&spec, z).unwrap();
        let s = sigma_at(&spec, z).unwrap();
        assert!((t.abs_k - (-2.0 * s.sigma).exp() * s.laplacian).abs() < 1e-12 * t.abs_k.max(1.0));
    }
}

#[test]
fn mobius_conformal_factor_matches_finite_differences() {
    let t = Mobius3::identity()
        .then(Step::Translate(Vec3::new(0.3, -0.2, 1.5)))
        .then(Step::Invert {
            center: Vec3::zeros(),
        })
        .then(Step::Dilate(2.0));
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for _ in 0..100 {
        let x = Vec3::new(
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-0.5..0.5),
        );
        let lambda = t.conformal_factor(&x).unwrap();
        let h = 1e-6;
        for e in [Vec3::x(), Vec3::y(), Vec3::z()] {
            let image = |p: Vec3| match t.apply(Point3::Finite(p)) {
                Point3::Finite(v) => v,
                Point3::Infinity => panic!("unexpected pole"),
            };
            let d = (image(x + e * h) - image(x - e * h)) / (2.0 * h);
            assert!((d.norm() - lambda).abs() < 1e-6 * lambda);
        }
    }
}
