#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(b) = duplex_cli::parse_config(text) {
            for key in ["omega-sigma", "phi", "samples", "plot"] {
                let _ = b.number(key);
                let _ = b.count(key);
                let _ = b.switch(key);
            }
            for axis in b.all("axis") {
                let _ = duplex_cli::parse_axis(axis);
            }
        }
    }
});
