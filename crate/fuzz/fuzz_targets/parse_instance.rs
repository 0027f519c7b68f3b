#![no_main]

use laminar_secretary::instances::parse_instance;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(m) = parse_instance(text) {
            // anything accepted must be a usable matroid
            let opt = m.offline_opt(&m.element_ids()).unwrap();
            assert!(m.is_independent(opt.as_slice()).unwrap());
            assert_eq!(opt.len(), m.rank());
        }
    }
});
