//! Node polynomials beyond the default acceptance range.

mod common;

use nodal_core::integrand::Mode;
use nodal_core::node_polynomials::node_polynomial;

/// Five and six nodes: slower, run with `--ignored`.
#[test]
#[ignore]
fn node_polynomials_five_and_six() {
    let fixtures = common::ordered_node_polynomials();
    for delta in [5u32, 6] {
        let rec = node_polynomial(delta, Mode::P3).unwrap();
        let ok = rec.ordered == fixtures[delta as usize] && rec.extra_samples_agree;
        println!("stretch delta={delta} [{}]", if ok { "PASS" } else { "FAIL" });
        assert!(ok, "delta={delta}: got {}", rec.ordered);
    }
}
