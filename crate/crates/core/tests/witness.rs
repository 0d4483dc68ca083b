use approx::assert_abs_diff_eq;
use ppt_robust::montecarlo::{sample_hs_density, sample_product_state, sample_random_product_separable};
use ppt_robust::operator::{is_ppt_all_cuts, DensityMatrix, HermitianOperator, PSD_TOL};
use ppt_robust::streams::substream;
use ppt_robust::upb::{by_name, omega_state, UpbSet};
use ppt_robust::witness::{
    build_witness, compute_lambda_any, spectral_split, witness_value, LambdaResult, SeesawConfig, UpbWitness, Witness,
};

struct Case {
    upb: UpbSet<f64>,
    lam: LambdaResult<f64>,
    uw: UpbWitness<f64>,
    omega: DensityMatrix<f64>,
}

fn case(name: &str) -> Case {
    let upb = by_name::<f64>(name).unwrap();
    let lam = compute_lambda_any(&upb, &SeesawConfig::default()).unwrap();
    let uw = build_witness(&upb, &lam).unwrap();
    let omega = omega_state(&upb).unwrap();
    Case { upb, lam, uw, omega }
}

#[test]
fn omega_has_flat_spectrum_and_is_ppt() {
    for name in ["tiles", "pyramid", "shifts"] {
        let c = case(name);
        let (d, n) = (c.upb.total_dim(), c.upb.len());
        let eig = c.omega.op().eigen();
        let nonzero: Vec<_> = eig.values.iter().filter(|v| v.abs() > 1e-10).collect();
        assert_eq!(nonzero.len(), d - n, "{name}");
        for v in nonzero {
            assert_abs_diff_eq!(*v, 1.0 / (d - n) as f64, epsilon = 1e-10);
        }
        let ppt = is_ppt_all_cuts(&c.omega, PSD_TOL).unwrap();
        assert!(ppt.ppt && ppt.min_eigenvalue() >= -1e-9, "{name}");
    }
}

#[test]
fn witness_algebra() {
    for name in ["tiles", "pyramid", "shifts"] {
        let c = case(name);
        let w = &c.uw.witness;
        assert_abs_diff_eq!(w.op().trace(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(w.pos_part_trace - w.neg_part_trace, 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(w.pos_part_trace, c.uw.positive_trace_closed_form(), epsilon = 1e-12);
        assert_abs_diff_eq!(witness_value(w, &c.omega).unwrap(), -c.uw.lambda_omega(), epsilon = 1e-12);
        assert_eq!(w.p_count, c.upb.len());
        assert_eq!(w.n_neg_count, c.upb.total_dim() - c.upb.len());
        let sigma_min = c.lam.minimizer.density(c.upb.structure()).unwrap();
        assert_abs_diff_eq!(witness_value(w, &sigma_min).unwrap(), 0.0, epsilon = 1e-8);
        let mixed = DensityMatrix::maximally_mixed(c.upb.structure());
        assert_abs_diff_eq!(witness_value(w, &mixed).unwrap(), 1.0 / c.upb.total_dim() as f64, epsilon = 1e-12);
    }
}

#[test]
fn spectral_split_reconstructs() {
    let c = case("tiles");
    let split = spectral_split(&c.uw.witness);
    let back = split.positive.combine(1.0, &split.negative, -1.0);
    assert!(back.max_abs_diff(c.uw.witness.op()) < 1e-10);
    assert!(split.positive.min_eigenvalue() > -1e-10);
    assert!(split.negative.min_eigenvalue() > -1e-10);

    let diag = Witness::new(HermitianOperator::from_real_diagonal(&[0.75, 0.75, -0.5])).unwrap();
    assert_abs_diff_eq!(diag.pos_part_trace, 1.5, epsilon = 1e-15);
    assert_abs_diff_eq!(diag.neg_part_trace, 0.5, epsilon = 1e-15);
}

#[test]
fn value_sandwich_on_random_states() {
    for name in ["tiles", "shifts"] {
        let c = case(name);
        let (lo, hi) = c.uw.witness.value_bounds();
        for trial in 0..10_000 {
            let rho = sample_hs_density::<f64, _>(c.upb.structure(), &mut substream(21, 0, trial));
            let v = witness_value(&c.uw.witness, &rho).unwrap();
            assert!(lo - 1e-12 <= v && v <= hi + 1e-12, "{name} trial {trial}: {v}");
        }
    }
}

#[test]
fn witness_is_nonnegative_on_separable_states() {
    for name in ["tiles", "pyramid", "shifts"] {
        let c = case(name);
        for trial in 0..10_000 {
            let mut rng = substream(22, 0, trial);
            let product = sample_product_state::<f64, _>(c.upb.structure(), &mut rng);
            let v = witness_value(&c.uw.witness, &product.density(c.upb.structure()).unwrap()).unwrap();
            assert!(v >= -1e-10, "{name} product trial {trial}: {v}");
            let mixture = sample_random_product_separable::<f64, _>(c.upb.structure(), 4, &mut rng).unwrap();
            assert!(witness_value(&c.uw.witness, &mixture).unwrap() >= -1e-10);
        }
    }
}

#[test]
fn witness_rejects_bad_inputs() {
    let c = case("tiles");
    let qubits = DensityMatrix::maximally_mixed(&ppt_robust::HilbertStructure::bipartite(2, 2).unwrap());
    assert!(witness_value(&c.uw.witness, &qubits).is_err());
    assert!(Witness::new(HermitianOperator::<f64>::identity(3)).is_err());
    assert!(ppt_robust::witness::build_witness_from_lambda(&c.upb, 0.0).is_err());
    assert!(ppt_robust::witness::build_witness_from_lambda(&c.upb, 5.0 / 9.0).is_err());
}
