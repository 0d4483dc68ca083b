use approx::assert_abs_diff_eq;
use ppt_robust::montecarlo::{sample_hs_density, sample_random_product_separable};
use ppt_robust::operator::{is_ppt_all_cuts, purity, DensityMatrix, PSD_TOL};
use ppt_robust::robustness::*;
use ppt_robust::streams::{random_unit_vector, substream};
use ppt_robust::upb::{by_name, omega_state, UpbSet};
use ppt_robust::witness::{build_witness, compute_lambda_any, witness_value, LambdaResult, SeesawConfig, UpbWitness};
use proptest::prelude::*;

struct Case {
    upb: UpbSet<f64>,
    lam: LambdaResult<f64>,
    uw: UpbWitness<f64>,
    fam: LineFamily<f64>,
}

fn case(name: &str) -> Case {
    let upb = by_name::<f64>(name).unwrap();
    let lam = compute_lambda_any(&upb, &SeesawConfig::default()).unwrap();
    let uw = build_witness(&upb, &lam).unwrap();
    let fam = LineFamily::new(omega_state(&upb).unwrap());
    Case { upb, lam, uw, fam }
}

#[test]
fn line_family_endpoints_and_witness_value() {
    let c = case("tiles");
    assert!(c.fam.member(1.0).unwrap().op().max_abs_diff(c.fam.base().op()) < 1e-15);
    let mixed = DensityMatrix::maximally_mixed(c.upb.structure());
    assert!(c.fam.member(0.0).unwrap().op().max_abs_diff(mixed.op()) < 1e-15);
    assert!(c.fam.member(1.5).is_err());
    let d = 9.0;
    let expected = 1.0 / d - 0.9 * (1.0 / d + c.uw.lambda_omega());
    assert_abs_diff_eq!(witness_value(&c.uw.witness, &c.fam.member(0.9).unwrap()).unwrap(), expected, epsilon = 1e-12);
}

#[test]
fn threshold_identities() {
    for name in ["tiles", "pyramid", "shifts"] {
        let c = case(name);
        let t = entanglement_threshold_upb(&c.uw).unwrap();
        assert!(t.residual < 1e-12, "{name}");
        let d = c.upb.total_dim() as f64;
        assert!(c.uw.lambda_omega() <= 1.0 - 2.0 / d);
        assert!(t.x_star >= 1.0 / (d - 1.0) && t.x_star < 1.0);
        let m = separable_mixing_threshold(&c.uw);
        assert!(m.residual < 1e-12, "{name}");
    }
    assert_abs_diff_eq!(entanglement_threshold(1.0 - 2.0 / 9.0, 9).unwrap(), 1.0 / 8.0, epsilon = 1e-15);
    assert!(entanglement_threshold(1e-12, 9).unwrap() > 1.0 - 1e-10);
    assert!(entanglement_threshold(0.0, 9).is_err());
}

#[test]
fn radius_vanishes_at_both_ends() {
    let c = case("tiles");
    let inputs = RadiusInputs::from_upb(&c.uw);
    let x_star = inputs.x_star().unwrap();
    for mode in [RadiusMode::Tight, RadiusMode::Averaged] {
        assert!(radius_y0(&inputs, x_star + 1e-9, mode).unwrap() < 1e-7);
        assert!(radius_y0(&inputs, 1.0 - 1e-9, mode).unwrap() < 1e-8);
        assert!(radius_y0(&inputs, 0.5 * (x_star + 1.0), mode).unwrap() > 0.0);
        assert!(radius_y0(&inputs, x_star, mode).is_err());
        assert!(radius_y0(&inputs, 1.0, mode).is_err());
    }
}

#[test]
fn modes_agree_for_upb_witnesses() {
    for name in ["tiles", "pyramid", "shifts"] {
        let c = case(name);
        let inputs = RadiusInputs::from_upb(&c.uw);
        for x in interior_grid(inputs.x_star().unwrap(), 25) {
            let tight = radius_y0(&inputs, x, RadiusMode::Tight).unwrap();
            let averaged = radius_y0(&inputs, x, RadiusMode::Averaged).unwrap();
            assert_abs_diff_eq!(tight, averaged, epsilon = 1e-12);
            let closed = upb_purity_branch(c.upb.total_dim(), x).min(upb_witness_branch(
                c.upb.len(),
                c.upb.total_dim(),
                c.uw.lambda,
                x,
            ));
            assert_abs_diff_eq!(tight, closed, epsilon = 1e-12);
        }
    }
}

#[test]
fn branch_crossing() {
    for name in ["tiles", "pyramid", "shifts"] {
        let c = case(name);
        let r = crossing_x0(c.upb.len(), c.upb.total_dim(), c.uw.lambda).unwrap();
        assert!(r.residual < 1e-12, "{name}");
        assert_abs_diff_eq!(r.purity_branch, r.witness_branch, epsilon = 1e-10);
        assert!(r.root > r.x_star && r.root < 1.0);
        assert!(r.formula.is_finite());
    }
}

#[test]
fn crossing_moves_with_lambda() {
    let (n, d) = (5usize, 9usize);
    let mut last_root = 0.0;
    for k in 1..40 {
        let lambda = (n as f64 / d as f64) * k as f64 / 40.0;
        let r = crossing_x0(n, d, lambda).unwrap();
        assert!(r.root < 1.0 && r.root > r.x_star);
        if k > 1 {
            assert!(r.root < last_root, "x0 should fall as λ grows");
        }
        last_root = r.root;
    }
    assert!(crossing_x0(n, d, 0.0).is_err());
    assert!(crossing_x0(n, d, n as f64 / d as f64).is_err());
}

#[test]
fn mixture_decomposition_examples() {
    let c = case("tiles");
    let sigma = sample_hs_density::<f64, _>(c.upb.structure(), &mut substream(4, 0, 0));
    let (tau, dec) = mixture_tau(&c.fam, &sigma, 0.97, 0.0).unwrap();
    assert!(tau.op().max_abs_diff(c.fam.member(0.97).unwrap().op()) < 1e-15);
    assert_abs_diff_eq!(dec.s, 0.03, epsilon = 1e-15);
    assert_eq!(dec.t, 0.0);

    let (x, y) = (0.97, 0.002);
    let (tau, _) = mixture_tau(&c.fam, &sigma, x, y).unwrap();
    let d = 9.0;
    let lo = c.uw.lambda_omega();
    let expected = y * witness_value(&c.uw.witness, &sigma).unwrap() - (1.0 - y) * (x * (1.0 + d * lo) - 1.0) / d;
    assert_abs_diff_eq!(witness_value(&c.uw.witness, &tau).unwrap(), expected, epsilon = 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn decomposition_identity_and_inner_ball(seed in any::<u64>(), x in 0.01f64..0.99, u in 0.0f64..1.0) {
        let upb = by_name::<f64>("tiles").unwrap();
        let fam = LineFamily::new(omega_state(&upb).unwrap());
        let d = 9.0;
        let y = u * 0.999;
        let sigma = sample_hs_density::<f64, _>(upb.structure(), &mut substream(seed, 5, 0));
        let (_, dec) = mixture_tau(&fam, &sigma, x, y).unwrap();
        prop_assert!(dec.residual < 1e-12);
        if y < (1.0 - x) / (d - 1.0 - x) {
            let inner = sigma.mix(&DensityMatrix::maximally_mixed(upb.structure()), dec.t).unwrap();
            prop_assert!(in_gurvits_ball(&inner));
            prop_assert!(is_ppt_all_cuts(&inner, PSD_TOL).unwrap().ppt);
        }
    }
}

#[test]
fn gurvits_ball_examples() {
    let c = case("shifts");
    let s = c.upb.structure();
    let mixed = DensityMatrix::maximally_mixed(s);
    assert!(in_gurvits_ball(&mixed));
    let v = random_unit_vector::<f64, _>(8, &mut substream(1, 1, 1));
    let pure = DensityMatrix::pure(&v, s).unwrap();
    assert!(!in_gurvits_ball(&pure));
    let d: f64 = 8.0;
    let target = 1.0 / (d - 1.0) - 1e-6;
    let p = ((target * d - 1.0) / (d - 1.0)).sqrt();
    let edge = pure.mix(&mixed, p).unwrap();
    assert_abs_diff_eq!(purity(&edge), target, epsilon = 1e-12);
    assert!(in_gurvits_ball(&edge));
    assert!(is_ppt_all_cuts(&edge, PSD_TOL).unwrap().ppt);
}

#[test]
fn membership_examples() {
    let c = case("tiles");
    let s = c.upb.structure();
    let center = c.fam.member(0.97).unwrap();
    let ball = BallCenter::new(center.clone()).unwrap();
    assert!(ball.membership(&center).unwrap().abs() < 1e-12);
    let v = random_unit_vector::<f64, _>(9, &mut substream(2, 2, 2));
    assert_abs_diff_eq!(ball.membership(&DensityMatrix::pure(&v, s).unwrap()).unwrap(), 1.0, epsilon = 1e-10);
    for trial in 0..1000 {
        let mut rng = substream(3, 3, trial);
        let sigma = sample_hs_density::<f64, _>(s, &mut rng);
        let y: f64 = rand::Rng::random(&mut rng);
        let tau = sigma.mix(&center, y).unwrap();
        assert!(ball.membership(&tau).unwrap() <= y + 1e-10, "trial {trial}");
    }
    assert!(BallCenter::new(c.fam.base().clone()).is_err());
}

#[test]
fn mixing_threshold_examples() {
    let c = case("tiles");
    let s = c.upb.structure();
    let lo = c.uw.lambda_omega();
    let mixed = DensityMatrix::maximally_mixed(s);
    assert_abs_diff_eq!(
        ppt_mixing_threshold(&c.uw.witness, lo, &mixed).unwrap(),
        lo / (lo + 1.0 / 9.0),
        epsilon = 1e-12
    );
    let direction = product_mixture(&c.lam.minimizers, s).unwrap();
    assert_abs_diff_eq!(ppt_mixing_threshold(&c.uw.witness, lo, &direction).unwrap(), 1.0, epsilon = 1e-8);

    let omega = c.fam.base();
    assert_abs_diff_eq!(witness_value(&c.uw.witness, &omega.mix(omega, 0.0).unwrap()).unwrap(), -lo, epsilon = 1e-12);
    for trial in 0..200 {
        let sigma = sample_random_product_separable::<f64, _>(s, 3, &mut substream(6, 6, trial)).unwrap();
        let z = 0.99 * ppt_mixing_threshold(&c.uw.witness, lo, &sigma).unwrap();
        let m = sigma.mix(omega, z).unwrap();
        assert!(witness_value(&c.uw.witness, &m).unwrap() < 0.0);
        assert!(is_ppt_all_cuts(&m, PSD_TOL).unwrap().ppt);
    }
}

#[test]
fn maximal_direction_stays_entangled() {
    for name in ["tiles", "pyramid", "shifts"] {
        let c = case(name);
        let direction = c.lam.minimizer.density(c.upb.structure()).unwrap();
        let grid: Vec<f64> = (0..=20).map(|k| 0.999 * k as f64 / 20.0).collect();
        let report = verify_maximal_robustness(&c.fam, 1.0, &c.uw.witness, &direction, &grid).unwrap();
        assert!(report.all_passed, "{name}");
        let x = 0.5 * (1.0 + entanglement_threshold_upb(&c.uw).unwrap().x_star);
        let report = verify_maximal_robustness(&c.fam, x, &c.uw.witness, &direction, &grid).unwrap();
        assert!(report.all_passed, "{name}");
        let last = report.points.last().unwrap();
        let base = witness_value(&c.uw.witness, &c.fam.member(x).unwrap()).unwrap();
        assert_abs_diff_eq!(last.witness_value, (1.0 - 0.999) * base, epsilon = 1e-12);
    }
}

#[test]
fn profile_shape() {
    let c = case("tiles");
    let p = build_profile("tiles", &c.uw, 50).unwrap();
    assert_abs_diff_eq!(p.x_star, 1.0 - c.uw.lambda * 9.0 / 5.0, epsilon = 1e-12);
    assert_abs_diff_eq!(p.mixing_threshold, c.uw.lambda, epsilon = 1e-12);
    let ys: Vec<f64> = p.radius_samples.iter().map(|s| s.y0_tight).collect();
    assert!(ys[0].abs() < 1e-12 && ys[49].abs() < 1e-12);
    let peak = ys.iter().enumerate().fold(0, |b, (i, y)| if *y > ys[b] { i } else { b });
    assert!(ys[..=peak].windows(2).all(|w| w[1] >= w[0]));
    assert!(ys[peak..].windows(2).all(|w| w[1] <= w[0]));
    assert!(build_profile("tiles", &c.uw, 1).is_err());
}
