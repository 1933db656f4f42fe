use std::process::Command;

fn neoqec(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_neoqec"))
        .args(args)
        .env_remove("NEOQEC_SEED")
        .output()
        .unwrap()
}

#[test]
fn exit_codes() {
    assert_eq!(neoqec(&["decode", "d=4"]).status.code(), Some(2));
    assert_eq!(neoqec(&["decode", "colour=blue"]).status.code(), Some(2));
    assert_eq!(neoqec(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(neoqec(&["decode", "weights=/nonexistent.neow"]).status.code(), Some(4));
    assert_eq!(neoqec(&["decode", "--config", "/nonexistent.cfg"]).status.code(), Some(4));
    let o = neoqec(&["npu-verify", "cases=100", "inject_fault=preload"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8(o.stdout).unwrap().contains("result=fail"));
}

#[test]
fn sweep_writes_csv_to_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("rows.csv");
    let o = neoqec(&["sweep", "d=3,5", "p=0,0.01", "trials=50", &format!("output={}", out.display())]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], neoqec_cli::stats::CSV_HEADER);
    assert_eq!(lines.len(), 5);
    assert!(lines[1].starts_with("3,0,50,0,"));
}

#[test]
fn gen_data_writes_dataset() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("d.neod");
    let o = neoqec(&["gen-data", "records=7", &format!("output={}", out.display())]);
    assert!(o.status.success());
    let bytes = std::fs::read(out).unwrap();
    assert_eq!(&bytes[..4], b"NEOD");
}
