#![no_main]

use libfuzzer_sys::fuzz_target;
use trotter_dixmier::norms::NormKind;
use trotter_dixmier::SingularSpectrum;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(kind) = text.parse::<NormKind>() {
        if kind.validate().is_ok() {
            let s = SingularSpectrum::from_unsorted(&[3.0, 1.0, 0.5]);
            let _ = kind.evaluate(&s);
        }
    }
});
