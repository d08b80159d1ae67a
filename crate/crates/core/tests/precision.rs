use nalgebra::DVector;

use simplexgrad::problems::table1;
use simplexgrad::*;

fn to_f32(points: &[DVector<f64>]) -> Vec<DVector<f32>> {
    points.iter().map(|p| p.map(|x| x as f32)).collect()
}

#[test]
fn single_precision_bounds_match_double() {
    let points = table1::points();
    let l = table1::LIPSCHITZ;
    let set64 = SampleSetF64::new(points.clone(), 0).unwrap();
    let set32 = SampleSetF32::new(to_f32(&points), 0).unwrap();
    let pairs = [
        (delta_bound(&set64, l), delta_bound(&set32, l as f32)),
        (
            square_column_bound(&set64, l),
            square_column_bound(&set32, l as f32),
        ),
        (
            radial_bound(&set64, l).unwrap(),
            radial_bound(&set32, l as f32).unwrap(),
        ),
        (
            simplex_bound(&set64, l).unwrap().value,
            simplex_bound(&set32, l as f32).unwrap().value,
        ),
        (
            lmin_bound(&set64, 0.1).unwrap().n_lmin,
            lmin_bound(&set32, 0.1f32).unwrap().n_lmin,
        ),
    ];
    for (a, b) in pairs {
        assert!((a - b as f64).abs() <= 1e-4 * (1.0 + a), "{a} vs {b}");
    }
}

#[test]
fn single_precision_candidate_bound() {
    let anchors = vec![
        DVector::from_vec(vec![0.0f32, 0.0]),
        DVector::from_vec(vec![1.0f32, 0.0]),
    ];
    let ctx = CandidateContextF32::new(anchors, 2.0, 0.1, BoundKind::Radial).unwrap();
    let e = total_bounds::candidate_bound(&ctx, &DVector::from_vec(vec![0.5f32, 0.5])).unwrap();
    assert!(e.is_finite() && e > 0.0);
}
