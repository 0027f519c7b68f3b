#![no_main]

use laminar_secretary::bound::{parse_rank_list, MaxRank};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(ranks) = parse_rank_list(text) {
        assert!(!ranks.is_empty());
        assert!(ranks.iter().all(|&k| k >= 1));
    }
    if let Ok(r) = text.parse::<MaxRank>() {
        assert_eq!(r.to_string().parse::<MaxRank>().unwrap(), r);
    }
});
