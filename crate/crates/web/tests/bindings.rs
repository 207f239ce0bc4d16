use std::f64::consts::{FRAC_PI_2, PI};

use qlandscape::analytic::{classify, DomainLabel};
use qlandscape_web::{j_curves, label_names, landscape_curves, phase_diagram, point_spectrum, spectrum_at};

#[test]
fn label_names_cover_every_label() {
    let names: Vec<String> = serde_json::from_str(&label_names()).unwrap();
    assert_eq!(names.len(), DomainLabel::ALL.len());
    assert_eq!(names[0], DomainLabel::ALL[0].as_str());
}

#[test]
fn phase_diagram_matches_classifier_at_cell_centers() {
    let (nx, ny) = (40, 20);
    let grid = phase_diagram(nx, ny).unwrap();
    assert_eq!(grid.len(), 800);
    for j in 0..ny {
        for i in 0..nx {
            let phi_w = PI * (i as f64 + 0.5) / nx as f64;
            let t = FRAC_PI_2 * (j as f64 + 0.5) / ny as f64;
            let got = DomainLabel::ALL[grid[(j * nx + i) as usize] as usize];
            assert_eq!(got, classify(phi_w, t).unwrap());
        }
    }
    let seen = |l: DomainLabel| grid.iter().any(|&k| DomainLabel::ALL[k as usize] == l);
    for l in [DomainLabel::D1, DomainLabel::D2p, DomainLabel::D3Low] {
        assert!(seen(l), "{l}");
    }
    assert!(phase_diagram(0, 10).is_err());
}

#[test]
fn spectrum_agrees_with_prediction_in_d2() {
    let s = point_spectrum(2.5, 0.7, 400, 5).unwrap();
    assert_eq!(s.label, DomainLabel::D2p);
    assert_eq!(s.numeric_signature, s.predicted_signature);
    assert_eq!(s.numeric.len(), 5);
    for (a, n) in s.analytic.iter().zip(&s.numeric) {
        assert!((a - n).abs() < 1e-2 * a.abs(), "{a} vs {n}");
    }
    let v: serde_json::Value = serde_json::from_str(&spectrum_at(2.5, 0.7, 200, 3).unwrap()).unwrap();
    assert_eq!(v["label"], "D2p");
}

#[test]
fn spectrum_rejects_bad_requests() {
    assert!(spectrum_at(2.5, 0.7, 5000, 5).is_err());
    assert!(spectrum_at(4.0, 0.7, 100, 5).is_err());
}

#[test]
fn curves_show_a_saddle() {
    let c = landscape_curves(1.0, 1.0, 32, 0.5, 21).unwrap();
    assert_eq!(c.steps.len(), 21);
    let (up, down) = (&c.curves[0], &c.curves[1]);
    assert!(up.eigenvalue > 0.0 && down.eigenvalue < 0.0);
    assert!(up.j[0] > c.j_f0 && up.j[20] > c.j_f0);
    assert!(down.j[0] < c.j_f0 && down.j[20] < c.j_f0);
    // the center sample is f₀ itself; neighbours follow the quadratic model
    assert!((up.j[10] - c.j_f0).abs() < 1e-12);
    for curve in [up, down] {
        let s = c.steps[11];
        let rel = (curve.j[11] - curve.quadratic[11]).abs() / (0.5 * curve.eigenvalue * s * s).abs();
        assert!(rel < 0.05, "{rel}");
    }
    let v: serde_json::Value = serde_json::from_str(&j_curves(1.0, 1.0, 16, 0.3, 5).unwrap()).unwrap();
    assert_eq!(v["curves"].as_array().unwrap().len(), 2);
    assert!(j_curves(1.0, 1.0, 2, 0.3, 5).is_err());
}
