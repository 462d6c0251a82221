//! The gate-set loader takes arbitrary user files, so it must reject any
//! input with an error value — never a panic, overflow, or runaway
//! allocation. Resource caps are enforced by the default [`Limits`].

#![no_main]

use evuni::gateset::load_gateset;
use evuni::Limits;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let _ = load_gateset(text, &Limits::default());
    }
});
