#![no_main]

use atcg_core::comm::expected_comm_bound;
use atcg_core::io::{parse_stats, write_stats};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(stats) = parse_stats(data) {
        let mut buf = Vec::new();
        write_stats(&stats, &mut buf).unwrap();
        assert_eq!(parse_stats(buf.as_slice()).unwrap(), stats);
        if stats.horizon() > 1 {
            let b = expected_comm_bound(&stats, 0.5, stats.horizon(), stats.num_partitions()).unwrap();
            assert!(b >= stats.num_partitions() as f64);
        }
    }
});
