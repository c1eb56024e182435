//! Values computed independently of this crate (direct double sums, a separate
//! straightforward lattice implementation) and frozen here.

use eisenzero::approx::LineSeries;
use eisenzero::arithmetic::{gauss_sum, jacobi, moebius};
use eisenzero::series::{self, eval_e0_fourier, eval_e0_lattice, fourier_b, fourier_b_direct};
use eisenzero::zerofinder::{compile_report, refine_zero, AxisGrid, DEFAULT_TOLERANCE};
use eisenzero::{ComplexPoint, TruncationPolicy, Weight};

fn k15() -> Weight {
    Weight::new(15).unwrap()
}

#[test]
fn small_symbols() {
    assert_eq!(jacobi(2, 7).unwrap(), 1);
    assert_eq!(jacobi(-1, 3).unwrap(), -1);
    assert_eq!(jacobi(5, 21).unwrap(), 1);
    assert_eq!(moebius(30).unwrap(), -1);
    assert_eq!(moebius(12).unwrap(), 0);
    let g = gauss_sum(1, 3).unwrap();
    assert!((g.re).abs() < 1e-12 && (g.im - 3f64.sqrt()).abs() < 1e-12);
}

#[test]
fn rotated_coefficients_k15() {
    let p = TruncationPolicy::default();
    let frozen = [
        (1, 2.859_549_533_052_554_4),
        (2, 259.047_060_977_843),
        (3, 3_612.220_472_440_944),
        (4, 23_425.429_774_766_5),
        (5, 99_998.915_949_459_8),
    ];
    for (l, v) in frozen {
        let b = fourier_b(l, k15(), &p).unwrap();
        assert!(
            (b.rotated() / v - 1.0).abs() < 1e-11,
            "b_{l}: {} vs {v}",
            b.rotated()
        );
        assert!(b.rotated() > 0.0);
    }
}

#[test]
fn ladder_ratios_match_direct_sums() {
    let p = TruncationPolicy::default();
    // b_ℓ / b_ℓ₀ from direct summation
    let frozen = [
        (9, 1, 1_595_053.0),
        (18, 2, 1_593_595.0),
        (27, 3, 1_594_324.0),
        (25, 1, 1_220_687_501.0),
        (81, 1, 2_543_029_684_849.0),
        (4, 1, 8192.0),
        (16, 1, 67_108_864.0),
    ];
    for (l, l0, ratio) in frozen {
        let a = fourier_b(l, k15(), &p).unwrap();
        let b = fourier_b(l0, k15(), &p).unwrap();
        let r = (a.ln_abs - b.ln_abs).exp();
        assert!(
            (r / ratio - 1.0).abs() < 1e-10,
            "b_{l}/b_{l0} = {r}, expected {ratio}"
        );
    }
}

#[test]
fn ladder_equals_direct_double_sum() {
    let p = TruncationPolicy::default();
    for k in [15, 17, 21] {
        let k = Weight::new(k).unwrap();
        for l in [4, 9, 12, 18, 25, 8, 50, 75] {
            let a = fourier_b(l, k, &p).unwrap();
            let d = fourier_b_direct(l, k, 1001).unwrap();
            assert!(
                a.relative_difference(&d) < 1e-10,
                "k={} l={l}: {}",
                k.k(),
                a.relative_difference(&d)
            );
        }
    }
}

#[test]
fn e_inf_tends_to_one() {
    let z = ComplexPoint::new(0.0, 10.0).unwrap();
    let e = series::eval_e_inf(z, k15(), &TruncationPolicy::default()).unwrap();
    assert!((e.value - 1.0).norm() < 1e-6);
}

#[test]
fn fourier_agrees_with_lattice() {
    let p = TruncationPolicy::default();
    for (x, y) in [(-0.5, 1.2), (0.0, 0.8), (0.3, 1.0), (-0.2, 2.0)] {
        let z = ComplexPoint::new(x, y).unwrap();
        let f = eval_e0_fourier(z, k15(), &p).unwrap();
        let l = eval_e0_lattice(z, k15(), &p).unwrap();
        assert!(f.certified && l.certified);
        let rel = (f.value - l.value).norm() / l.value.norm();
        assert!(rel < 1e-8, "z = {x}+{y}i: {rel}");
    }
}

#[test]
fn k15_line_zeroes() {
    let report = compile_report(
        k15(),
        &TruncationPolicy::default(),
        &AxisGrid::default(),
        DEFAULT_TOLERANCE,
    )
    .unwrap();
    let y_of = |line: LineSeries| {
        report
            .certificates
            .iter()
            .filter(|c| c.series_id == line.into())
            .map(|c| c.refined_y)
            .collect::<Vec<_>>()
    };
    let e0 = y_of(LineSeries::E0Line);
    let eh = y_of(LineSeries::EHalfLine);
    assert_eq!(e0.len(), 1);
    assert_eq!(eh.len(), 1);
    assert!((e0[0] - 0.687_474_220_406_147_7).abs() < 1e-9);
    assert!((eh[0] - 0.863_070_635_814_801_5).abs() < 1e-9);
    assert!(report.circle_max_deviation < 1e-9);
}

#[test]
fn refinement_reaches_tolerance() {
    let k = Weight::new(101).unwrap();
    let p = TruncationPolicy::default();
    let scan = eisenzero::zerofinder::bracket_zeros(k, LineSeries::EHalfLine, &p).unwrap();
    for c in &scan.certificates {
        let r = refine_zero(c, k, &p, 1e-10).unwrap();
        assert!(r.bracket[1] - r.bracket[0] <= 1e-10 || r.residual <= 1e-9);
        assert!(r.residual < 1e-6);
        assert!(r.bracket[0] >= c.bracket[0] && r.bracket[1] <= c.bracket[1]);
    }
}
