use super::*;
use crate::testutil::profile;
use proptest::prelude::*;

fn params(eta: f64) -> ModelParams {
    ModelParams::new(1.5, 0.5, 1, eta).unwrap()
}

#[test]
fn zero_data_stays_zero() {
    let k = profile(1.5, 0.5);
    let grid = SpaceGrid::with_spacing(20.0, 0.5).unwrap();
    let cfg = SolveConfig::new(params(1.0), TimeMesh::uniform(10.0, 20).unwrap(), Field::zeros(grid, 0.0));
    let tr = march(k, &cfg).unwrap();
    assert!(tr.sup_norms.iter().all(|&s| s == 0.0));
    assert!(tr.final_field.values.iter().all(|&v| v == 0.0));
    assert!(tr.verdict.is_global());
    let pr = picard(k, &cfg, 10.0).unwrap();
    assert!(pr.fields.iter().all(|f| f.values.iter().all(|&v| v == 0.0)));
}

#[test]
fn large_data_blows_up_and_is_confirmed() {
    let k = profile(1.5, 0.5);
    let grid = SpaceGrid::with_spacing(30.0, 0.25).unwrap();
    let v0 = Field::indicator(grid, -1.0, 1.0, 2.0).unwrap();
    let cfg = SolveConfig::new(params(1.0), TimeMesh::uniform(3.0, 200).unwrap(), v0);
    let tr = march(k, &cfg).unwrap();
    let Verdict::Blowup { t_star, uncertainty } = tr.verdict else { panic!("{:?}", tr.verdict) };
    assert!(t_star > 0.1 && t_star < 3.0 && uncertainty < 0.15 * t_star);
    // the parabolic infimum grows through the approach to blow-up
    let f = &tr.functional;
    let n = f.len();
    assert!(f[n - 1] > f[n / 2] && f[n / 2] > f[1]);
}

#[test]
fn supercritical_small_data_is_global() {
    let k = profile(1.5, 0.5);
    let grid = SpaceGrid::with_spacing(100.0, 0.5).unwrap();
    let v0 = Field::from_fn(grid, 0.0, |x| 0.01 * k.density(1.0, x.abs())).unwrap();
    let cfg = SolveConfig::new(params(5.0), TimeMesh::uniform(100.0, 100).unwrap(), v0).with_decay_test(1.0, 0.01);
    let tr = march(k, &cfg).unwrap();
    assert!(tr.verdict.is_global(), "{:?}", tr.verdict);
    let ratio = tr.weighted_ratio.as_ref().unwrap();
    assert!(ratio[0] <= 0.01 * (1.0 + 1e-12));
    assert!(tr.max_weighted_ratio().unwrap() < 0.05);
    let late = &tr.sup_norms[50..];
    assert!(late.windows(2).all(|w| w[1] <= w[0]));
}

#[test]
fn decay_hypothesis_is_checked() {
    let k = profile(1.5, 0.5);
    let grid = SpaceGrid::with_spacing(10.0, 0.5).unwrap();
    let v0 = Field::indicator(grid, -1.0, 1.0, 0.01).unwrap();
    let cfg = SolveConfig::new(params(5.0), TimeMesh::uniform(1.0, 4).unwrap(), v0).with_decay_test(1.0, 0.01);
    assert!(matches!(march(k, &cfg), Err(Error::Domain(_))));
}

#[test]
fn linear_picard_takes_one_iteration() {
    let k = profile(1.5, 0.5);
    let grid = SpaceGrid::with_spacing(20.0, 0.5).unwrap();
    let v0 = Field::indicator(grid, -1.0, 1.0, 1.0).unwrap();
    let mut cfg = SolveConfig::new(params(1.0), TimeMesh::uniform(2.0, 8).unwrap(), v0.clone());
    cfg.nonlinear = false;
    let pr = picard(k, &cfg, 2.0).unwrap();
    assert_eq!(pr.iterations, 1);
    let direct = crate::operators::apply_g(k, &v0, 2.0).unwrap().field;
    assert_eq!(pr.fields.last().unwrap().values, direct.values);
}

#[test]
fn picard_matches_march() {
    let k = profile(1.5, 0.5);
    let grid = SpaceGrid::with_spacing(40.0, 0.5).unwrap();
    let v0 = Field::from_fn(grid, 0.0, |x| 0.5 * k.density(1.0, x.abs())).unwrap();
    let mut cfg = SolveConfig::new(params(2.0), TimeMesh::uniform(5.0, 40).unwrap(), v0);
    cfg.refine = false;
    let tr = march(k, &cfg).unwrap();
    let pr = picard(k, &cfg, 5.0).unwrap();
    assert!(pr.iterations > 1);
    let diff = pr.fields.last().unwrap().values.iter().zip(&tr.final_field.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    assert!(diff < 1e-6, "{diff}");
}

#[test]
fn picard_diverges_past_blowup() {
    let k = profile(1.5, 0.5);
    let grid = SpaceGrid::with_spacing(30.0, 0.25).unwrap();
    let v0 = Field::indicator(grid, -1.0, 1.0, 2.0).unwrap();
    let cfg = SolveConfig::new(params(1.0), TimeMesh::uniform(3.0, 100).unwrap(), v0);
    assert!(matches!(picard(k, &cfg, 3.0), Err(Error::NoContraction { .. })));
}

#[test]
fn decay_exponent_estimates() {
    let k = profile(1.5, 0.5);
    let grid = SpaceGrid::with_spacing(200.0, 0.05).unwrap();
    let v0 = Field::delta(grid);
    let a = estimate_eta_star(k, &v0).unwrap();
    assert!((a - 1.0 / 3.0).abs() < 0.05 / 3.0, "{a}");
    let doubled = Field { values: v0.values.iter().map(|v| 2.0 * v).collect(), ..v0.clone() };
    assert!((estimate_eta_star(k, &doubled).unwrap() - a).abs() < 1e-3);

    let g = profile(2.0, 1.0);
    let grid = SpaceGrid::with_spacing(300.0, 0.25).unwrap();
    let a = estimate_eta_star(g, &Field::indicator(grid, -1.0, 1.0, 1.0).unwrap()).unwrap();
    assert!((a - 0.5).abs() < 0.025, "{a}");
    assert!(matches!(estimate_eta_star_with(g, &Field::delta(grid), &[10.0, 20.0]), Err(Error::DegenerateFit(_))));
}

#[test]
fn trace_outputs() {
    let k = profile(1.5, 0.5);
    let grid = SpaceGrid::with_spacing(20.0, 0.5).unwrap();
    let v0 = Field::from_fn(grid, 0.0, |x| 0.01 * k.density(1.0, x.abs())).unwrap();
    let cfg = SolveConfig::new(params(5.0), TimeMesh::uniform(2.0, 4).unwrap(), v0).with_decay_test(1.0, 0.01);
    let tr = march(k, &cfg).unwrap();
    let csv = trace_csv(&tr);
    assert!(csv.starts_with("t,sup_norm,l1,l2,weighted_ratio,F_t\n"));
    assert_eq!(csv.lines().count(), 6);
    let json = verdict_json(&cfg.params, &tr);
    assert_eq!(json["verdict"]["kind"], "global_up_to_horizon");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn larger_data_never_decreases_the_solution(c in 0.05f64..0.5, extra in 0.0f64..0.5) {
        let k = profile(1.5, 0.5);
        let grid = SpaceGrid::with_spacing(20.0, 0.5).unwrap();
        let run = |amp: f64| {
            let v0 = Field::indicator(grid, -1.0, 1.0, amp).unwrap();
            let mut cfg = SolveConfig::new(params(1.0), TimeMesh::uniform(1.0, 10).unwrap(), v0);
            cfg.refine = false;
            march(k, &cfg).unwrap().final_field
        };
        let (lo, hi) = (run(c), run(c + extra));
        for (a, b) in lo.values.iter().zip(&hi.values) {
            prop_assert!(*a <= *b + 1e-15);
        }
    }
}
