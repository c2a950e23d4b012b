#![no_main]

use atcg_core::io::parse_ratings;
use atcg_core::objectives::SubmodularOracle;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(table) = parse_ratings(data) {
        let f = &table.objective;
        assert_eq!(f.items(), table.item_ids.len());
        assert_eq!(f.users(), table.user_ids.len());
        let all: Vec<usize> = (0..f.items()).collect();
        let v = f.eval(&all);
        assert!(v.is_finite() && v >= 0.0);
    }
});
