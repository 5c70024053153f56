#![no_main]

use hill_collide::config::OutputFormat;
use hill_collide::envelope::ResultEnvelope;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(env) = ResultEnvelope::from_json(text) {
        for fmt in [OutputFormat::Json, OutputFormat::Pretty] {
            let again = ResultEnvelope::from_json(&env.to_json(fmt)).expect("envelope reloads");
            assert_eq!(again, env);
        }
    }
});
