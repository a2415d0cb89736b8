use krflow_core::explicit::FlowSystem;
use krflow_core::fixtures::m1;
use krflow_core::laws::{generate_flows, run_laws};
use krflow_core::monoid::check_group_mapping;

fn sub_instance(k: usize) -> FlowSystem {
    let m = m1();
    let cert = check_group_mapping(&m).unwrap();
    FlowSystem::on_points(&m, &cert.distinguished_r[..k], 6).unwrap()
}

#[test]
fn two_point_suite_passes() {
    let sys = sub_instance(2);
    let report = run_laws(&sys, 3, usize::MAX).unwrap();
    assert_eq!(report.lattice, 5);
    assert!(report.all_pass(), "{}", report.render_text());
    assert!(report.rows.iter().all(|r| r.checked > 0), "{}", report.render_text());
}

#[test]
fn generation_grows_then_settles() {
    let sys = sub_instance(2);
    let sizes: Vec<usize> = (0..=3).map(|d| generate_flows(&sys, d).len()).collect();
    assert!(sizes.windows(2).all(|w| w[0] <= w[1]), "{sizes:?}");
    // identity plus three letters, all distinct
    assert_eq!(sizes[0], 4);
}
