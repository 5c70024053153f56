#![no_main]

use hill_collide::csvio::{read_trajectory_csv, write_table, TRAJECTORY_HEADER};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(table) = read_trajectory_csv(data) else {
        return;
    };
    let mut buf = Vec::new();
    write_table(&mut buf, &TRAJECTORY_HEADER, &table).expect("in-memory write");
    let again = read_trajectory_csv(buf.as_slice()).expect("written table reads back");
    assert_eq!(again.truncated, table.truncated);
    assert_eq!(again.rows.len(), table.rows.len());
    for (a, b) in again.rows.iter().zip(&table.rows) {
        for (x, y) in a.iter().zip(b) {
            assert!(x.to_bits() == y.to_bits() || (x.is_nan() && y.is_nan()));
        }
    }
});
