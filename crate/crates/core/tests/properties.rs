use hls_core::verifier::{
    constraint_report, dilation_runs, fit_runs, norm_probe, predicted_slope, ConstraintParams, FamilyMember,
};
use hls_core::*;
use proptest::prelude::*;

fn coord() -> impl Strategy<Value = f64> {
    -5.0..5.0f64
}

fn point() -> impl Strategy<Value = GroupPoint> {
    (coord(), coord(), coord()).prop_map(|(u, v, t)| GroupPoint::scalar(u, v, t))
}

fn nonzero_point() -> impl Strategy<Value = GroupPoint> {
    point().prop_filter("off singular slabs", |x| x.u[0].abs() > 1e-3 && x.v[0].abs() > 1e-3 && x.t.abs() > 1e-3)
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

proptest! {
    #[test]
    fn multiplication_is_associative(x in point(), y in point(), z in point(), mu in -3.0..3.0f64) {
        let ctx = GroupContext::new(1, mu).unwrap();
        let l = ctx.multiply(&ctx.multiply(&x, &y).unwrap(), &z).unwrap();
        let r = ctx.multiply(&x, &ctx.multiply(&y, &z).unwrap()).unwrap();
        for (a, b) in l.to_flat().iter().zip(r.to_flat()) {
            prop_assert!(close(*a, b, 1e-12));
        }
    }

    #[test]
    fn difference_inverts_multiplication(x in point(), y in point(), mu in -3.0..3.0f64) {
        let ctx = GroupContext::new(1, mu).unwrap();
        let d = group_difference(&ctx, &x, &y).unwrap();
        let back = ctx.multiply(&d, &y).unwrap();
        for (a, b) in back.to_flat().iter().zip(x.to_flat()) {
            prop_assert!(close(*a, b, 1e-12));
        }
    }

    #[test]
    fn zygmund_dilation_is_automorphism(x in point(), y in point(), d1 in 0.1..10.0f64, d2 in 0.1..10.0f64) {
        let ctx = GroupContext::new(1, 1.0).unwrap();
        let d = DilationSpec::zygmund(d1, d2).unwrap();
        let l = d.apply(&ctx.multiply(&x, &y).unwrap());
        let r = ctx.multiply(&d.apply(&x), &d.apply(&y)).unwrap();
        for (a, b) in l.to_flat().iter().zip(r.to_flat()) {
            prop_assert!(close(*a, b, 1e-12));
        }
    }

    #[test]
    fn kernels_are_even(x in nonzero_point(), alpha in 0.1..0.9f64, beta in 0.1..0.9f64) {
        let v = KernelSpec::V(VParams::symmetric(1, alpha, beta).unwrap());
        prop_assert_eq!(v.eval(&x).unwrap(), v.eval(&x.inverse()).unwrap());
        let swapped = GroupPoint::scalar(x.v[0], x.u[0], x.t);
        prop_assert!(close(v.eval(&x).unwrap(), v.eval(&swapped).unwrap(), 1e-14));
    }

    #[test]
    fn v_homogeneity(x in nonzero_point(), d1 in 0.1..10.0f64, d2 in 0.1..10.0f64) {
        let k = KernelSpec::V(VParams::new(1, 0.4, 0.7, 0.3, Some(0.25)).unwrap());
        let d = DilationSpec::zygmund(d1, d2).unwrap();
        let c = k.homogeneity_factor(&d).unwrap();
        prop_assert!(close(k.eval(&d.apply(&x)).unwrap(), c * k.eval(&x).unwrap(), 1e-12));
    }

    #[test]
    fn sharp_v_below_majorant(x in nonzero_point(), alpha in 0.05..1.0f64, beta in 0.05..0.95f64) {
        let v = VParams::symmetric(1, alpha, beta).unwrap();
        let val = eval_v(&v, &x).unwrap();
        let maj = eval_separable_majorant(1, v.s(), &x).unwrap();
        prop_assert!(val <= maj * (1.0 + 1e-12));
    }

    #[test]
    fn lambda_bound_holds(theta in 0.0..2.0f64, lxy in -8.0..8.0f64, lt in -8.0..8.0f64, ll in -4.6..4.6f64) {
        prop_assert!(check_lambda_bracket_bound(theta, lxy.exp(), lt.exp(), ll.exp()).unwrap());
    }

    #[test]
    fn constraint_report_is_idempotent(alpha in 0.05..1.5f64, beta in 0.05..0.95f64, p in 1.1..4.0f64, q in 4.5..20.0f64) {
        let params = ConstraintParams::V(VParams::symmetric(1, alpha, beta).unwrap());
        let pq = ExponentPair::new(p, q).unwrap();
        prop_assert_eq!(constraint_report(&params, &pq), constraint_report(&params, &pq));
    }

    #[test]
    fn rng_draws_depend_only_on_seed_and_index(seed in any::<u64>(), skip in 0u64..64) {
        let mut a = CounterRng::new(seed);
        for _ in 0..skip {
            a.next_u64();
        }
        prop_assert_eq!(a.next_u64(), CounterRng::new(seed).at(skip));
    }
}

fn small_setup() -> (KernelSpec, GroupContext, GridSpec) {
    (
        KernelSpec::V(VParams::symmetric(1, 0.5, 0.25).unwrap()),
        GroupContext::new(1, 1.0).unwrap(),
        GridSpec::heisenberg(1, 3.0, 5, false).unwrap(),
    )
}

#[test]
fn apply_is_linear_and_monotone() {
    let (k, ctx, grid) = small_setup();
    let f = TestFunction::standard_gaussian(1);
    let g = TestFunction::gaussian(GroupPoint::scalar(0.5, -0.5, 1.0), 0.7, 1.3, 0.9).unwrap();
    let sum = TestFunction::Combination { terms: vec![(2.0, f.clone()), (0.5, g.clone())] };
    let nodes = grid.complement().points().unwrap();
    let iff = apply_fractional(&k, &ctx, &f, &grid, &nodes).unwrap();
    let ig = apply_fractional(&k, &ctx, &g, &grid, &nodes).unwrap();
    let isum = apply_fractional(&k, &ctx, &sum, &grid, &nodes).unwrap();
    for ((a, b), c) in iff.iter().zip(&ig).zip(&isum) {
        assert!(close(2.0 * a + 0.5 * b, *c, 1e-12));
        // f ≤ 2f + g/2 pointwise, so the same holds after the positive operator.
        assert!(*a <= *c);
    }
}

#[test]
fn worker_count_does_not_change_results() {
    let (k, ctx, grid) = small_setup();
    let f = TestFunction::standard_gaussian(1);
    let one = parallel::with_threads(1, || apply_fractional_grid(&k, &ctx, &f, &grid).unwrap());
    let three = parallel::with_threads(3, || apply_fractional_grid(&k, &ctx, &f, &grid).unwrap());
    assert_eq!(one.values(), three.values());
}

#[test]
fn grid_function_round_trips() {
    let (k, ctx, grid) = small_setup();
    let g = apply_fractional_grid(&k, &ctx, &TestFunction::standard_gaussian(1), &grid).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.bin");
    g.save(&path).unwrap();
    let back = GridFunction::load(&path).unwrap();
    assert_eq!(back, g);
    let scaled = GridFunction::new(grid.clone().with_scale(vec![1.0, 2.0, 0.5]).unwrap(), vec![1.0; 125]).unwrap();
    scaled.save(&path).unwrap();
    assert_eq!(GridFunction::load(&path).unwrap(), scaled);
}

#[test]
fn probe_ratio_is_scale_invariant() {
    let (k, ctx, grid) = small_setup();
    let f = TestFunction::standard_gaussian(1);
    let pq = ExponentPair::new(2.0, 8.0).unwrap();
    let family = [FamilyMember::new("f", f.clone()), FamilyMember::new("3f", f.scaled(3.0))];
    let r = norm_probe(&k, &ctx, &family, &pq, &grid).unwrap();
    assert!(close(r.rows[0].ratio, r.rows[1].ratio, 1e-12));
    assert!((r.ratio_spread - 1.0).abs() < 1e-12);
}

#[test]
fn off_line_slope_sign_matches_prediction() {
    let (k, ctx, grid) = small_setup();
    let runs = dilation_runs(&k, &ctx, &TestFunction::standard_gaussian(1), &grid, &[1.0, 2.0, 4.0]).unwrap();
    for (p, q) in [(2.0, 4.0), (2.0, 20.0), (1.5, 3.0)] {
        let pq = ExponentPair::new(p, q).unwrap();
        let fit = fit_runs(&runs, &k, &pq).unwrap();
        let predicted = predicted_slope(1, 0.75, &pq);
        assert_eq!(fit.slope.signum(), predicted.signum(), "({p},{q})");
        assert!((fit.slope - predicted).abs() < 1e-9);
    }
}

#[test]
fn mu_sweep_ratios_are_positive() {
    let (k, _, grid) = small_setup();
    let f = TestFunction::standard_gaussian(1);
    let pq = ExponentPair::new(2.0, 8.0).unwrap();
    let r = verifier::mu_sweep(&k, &f, &pq, &[0.0, 1.0], &grid).unwrap();
    assert!(r.iter().all(|(_, ratio)| ratio.is_finite() && *ratio > 0.0));
}
