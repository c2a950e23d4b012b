#![no_main]

use atcg_core::io::{parse_embeddings, write_embeddings};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(emb) = parse_embeddings(data) {
        assert!(emb.rows().flatten().all(|v| v.is_finite()));
        let mut buf = Vec::new();
        write_embeddings(&emb, &mut buf).unwrap();
        assert_eq!(parse_embeddings(buf.as_slice()).unwrap(), emb);
    }
});
