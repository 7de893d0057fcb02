use std::collections::BTreeMap;

use singlift::hilbert::{decompose_lift, PipelineConfig};
use singlift::rat::qi;

#[test]
fn weight_forty_coefficients() {
    let mut pr = BTreeMap::new();
    pr.insert(1, qi(1));
    let cfg = PipelineConfig::new(2, pr, 3);
    let c = decompose_lift(&cfg).unwrap();
    assert_eq!(
        c.decomposition.render(),
        "-F20 - 4F11 - F02 + 984F30 + 9384F21 + 9384F12 + 984F03 - 2654208F31 - 12607488F22 - 2654208F13"
    );
}
