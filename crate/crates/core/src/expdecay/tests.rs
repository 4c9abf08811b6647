use super::*;

#[test]
fn bound_at_shipped_constants() {
    assert!((approximation_bound(2.0, 10.0, 5.0) - 46.2).abs() < 1e-12);
    // alpha = 3 gives 30.6 by the same formula.
    assert!((approximation_bound(2.0, 10.0, 3.0) - 30.6).abs() < 1e-12);
}

#[test]
fn derived_quantities() {
    let c = StreamConfig::new(3, 8.0, 1024.0);
    let w = 1024.0 / (2f64.powf(1.0 / 8.0) - 1.0);
    assert!((c.log2_w() - w.log2()).abs() < 1e-9);
    assert_eq!(c.ofl_read_limit(), 80);
    assert_eq!(c.verbatim_quota(), 11);
    assert_eq!(amplification_for(0.05), 5);
    assert_eq!(c.amplification, 5);
}

#[test]
fn config_validation() {
    let mut c = StreamConfig::new(2, 8.0, 1024.0);
    c.gamma = 5.0;
    assert!(c.validate().is_err());
    let mut c = StreamConfig::new(2, 8.0, 1024.0);
    c.beta = 2.5;
    assert!(c.validate().is_err());
    assert!(StreamConfig::new(0, 8.0, 1024.0).validate().is_err());
    assert!(StreamConfig::new(1, 0.0, 1024.0).validate().is_err());
}

#[test]
fn k_distinct_points_are_returned_exactly() {
    let pts = vec![Point::from(vec![0.0, 0.0]), Point::from(vec![3.0, 4.0])];
    let r = process_stream(&StreamConfig::new(2, 4.0, 16.0), pts.clone()).unwrap();
    let mut got = r.centers.clone();
    got.sort_by(|a, b| a.coords.partial_cmp(&b.coords).unwrap());
    assert_eq!(got, pts);
    assert_eq!(r.log2_cost, crate::logspace::LOG2_ZERO);
}

#[test]
fn empty_stream_is_rejected() {
    let r = process_stream(&StreamConfig::new(2, 4.0, 16.0), Vec::<Point>::new());
    assert!(matches!(r, Err(Error::Empty(_))));
}
