// Drive a parameter sweep from a JSON configuration and write CSV.

use nwidth::cli::{parse_config, records_table, run_sweep, write_table, Format};

const CONFIG: &str = r#"{
    "command": "sweep",
    "N": 64,
    "balls": [{"p": "inf", "nu": 1}, {"p": 3, "nu": 1.5}, {"p": 1, "nu": 6}],
    "auto_normalize": true,
    "sweep": {"n": [1, 2, 4, 8, 16], "q": [1.5, 2, 3, 4], "sandwich": true}
}"#;

pub fn run_example() -> nwidth::Result<()> {
    let cfg = parse_config(CONFIG)?;
    let records = run_sweep(&cfg)?;
    assert_eq!(records.len(), 20);
    let mut out = Vec::new();
    write_table(&records_table(&records), Format::Csv, &mut out)
        .map_err(|source| nwidth::Error::Io { path: "<buffer>".into(), source })?;
    print!("{}", String::from_utf8_lossy(&out));
    Ok(())
}

#[allow(dead_code)]
fn main() -> nwidth::Result<()> {
    run_example()
}
