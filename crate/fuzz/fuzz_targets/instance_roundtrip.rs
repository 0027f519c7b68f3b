#![no_main]

use laminar_secretary::instances::{parse_instance, to_document_string};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(m) = parse_instance(text) else { return };
    let doc = to_document_string(&m);
    let back = parse_instance(&doc).expect("serialized instance must parse");
    assert_eq!(back, m);
    assert_eq!(to_document_string(&back), doc);
});
