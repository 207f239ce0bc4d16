//! Property tests over random points of the parameter rectangle.

use std::f64::consts::{FRAC_PI_2, PI};

use proptest::prelude::*;
use qlandscape::analytic::{
    analytic_spectrum, classify, eigenvalue_bounds, proposition_positive_count, DomainLabel, RootEquation,
};
use qlandscape::objective::AdjointCache;
use qlandscape::optimize::{gradient_ascent, AscentOptions};
use qlandscape::verify::random_control;
use qlandscape::SystemConfig;

fn rectangle() -> impl Strategy<Value = (f64, f64)> {
    (1e-3..=PI, 1e-3..=FRAC_PI_2)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn every_point_gets_one_label((phi_w, t) in rectangle()) {
        let label = classify(phi_w, t).unwrap();
        prop_assert!(DomainLabel::ALL.contains(&label));
    }

    #[test]
    fn analytic_counts_follow_propositions((phi_w, t) in rectangle()) {
        let label = classify(phi_w, t).unwrap();
        prop_assume!(label.has_spectrum());
        let cfg = SystemConfig::with_coupling(phi_w, t, 1.0).unwrap();
        let spec = analytic_spectrum(&cfg, 20).unwrap();
        prop_assert_eq!(Some(spec.n_pos_k), proposition_positive_count(label));
        for rec in &spec.records {
            if matches!(rec.equation, RootEquation::Eq1 | RootEquation::Eq2) {
                let (lo, hi) = rec.bracket.unwrap();
                let a = rec.root.unwrap();
                prop_assert!(lo < a && a < hi, "{a} outside ({lo}, {hi})");
                prop_assert_eq!(lo, (rec.index - 1) as f64 * PI / t);
                prop_assert!(rec.residual < 1e-10, "residual {}", rec.residual);
            }
            prop_assert_eq!(rec.mu_k > 0.0, rec.is_positive_k());
            prop_assert!((rec.mu_hess - cfg.hessian_factor() * rec.mu_k).abs() <= 1e-15 * rec.mu_k.abs().max(1.0));
            if let Ok(b) = eigenvalue_bounds(rec) {
                prop_assert!(b.contains(rec.mu_k, 1e-9), "{} not in {:?}", rec.mu_k, b);
            }
        }
    }

    #[test]
    fn objective_at_f0_is_cos_squared((phi_w, t) in rectangle()) {
        let cfg = SystemConfig::with_coupling(phi_w, t, 1.0).unwrap();
        let f0 = cfg.special_control_signal(8).unwrap();
        let j = AdjointCache::new(&cfg, &f0).unwrap().objective();
        prop_assert!((j - (phi_w + t).cos().powi(2)).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn ascent_never_decreases_j((phi_w, t) in rectangle(), seed in 0u64..1000) {
        let cfg = SystemConfig::with_coupling(phi_w, t, 1.0).unwrap();
        let ctrl = random_control(t, 16, 1.0, seed).unwrap();
        let opts = AscentOptions { max_iters: 40, ..AscentOptions::default() };
        let trace = gradient_ascent(&cfg, &ctrl, &opts).unwrap();
        prop_assert!(trace.is_monotone());
        let sup = trace.final_control.amplitudes().iter().zip(ctrl.amplitudes())
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        prop_assert!(sup <= 40.0 * opts.max_update + 1e-9);
    }
}
