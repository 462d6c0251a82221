//! Every gate set the loader accepts must survive a serialize → reparse
//! round trip: same header, same labels, matrices equal to well below the
//! unitarity tolerance. Normalization and inverse closure already ran on
//! the first parse, so the second must be a fixed point.

#![no_main]

use evuni::gateset::load_gateset;
use evuni::Limits;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let limits = Limits::default();
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(gs) = load_gateset(text, &limits) else {
        return;
    };
    let back = load_gateset(&gs.to_json(), &limits).expect("accepted gate set must reparse");
    assert_eq!(gs.d(), back.d(), "local dimension changed");
    assert_eq!(gs.n(), back.n(), "gate arity changed");
    assert_eq!(gs.gates().len(), back.gates().len(), "gate count changed");
    for (a, b) in gs.gates().iter().zip(back.gates()) {
        assert_eq!(a.label, b.label, "label changed");
        let drift = a
            .unitary
            .matrix()
            .iter()
            .zip(b.unitary.matrix())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0_f64, f64::max);
        assert!(drift <= 1e-12, "matrix drifted by {drift} on {}", a.label);
    }
});
