//! Tables and process helpers shared by the CLI and acceptance test targets.
#![allow(dead_code)]

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

pub fn manifest_dir() -> &'static Path {
    Path::new(env!("CARGO_MANIFEST_DIR"))
}

pub fn fixture_path(name: &str) -> PathBuf {
    manifest_dir().join("tests/fixtures").join(name)
}

pub fn read_fixture(name: &str) -> String {
    fs::read_to_string(fixture_path(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn read_golden(name: &str) -> String {
    let p = manifest_dir().join("tests/golden").join(name);
    fs::read_to_string(&p).unwrap_or_else(|e| panic!("{}: {e}", p.display()))
}

/// Run the binary from the crate root so `tests/fixtures/...` paths resolve.
pub fn run(args: &[&str], stdin: Option<&[u8]>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_bmpa"));
    cmd.args(args).current_dir(manifest_dir());
    cmd.stdin(Stdio::piped()).stdout(Stdio::piped()).stderr(Stdio::piped());
    let mut child = cmd.spawn().expect("spawn bmpa");
    if let Some(bytes) = stdin {
        child.stdin.as_mut().unwrap().write_all(bytes).unwrap();
    }
    drop(child.stdin.take());
    child.wait_with_output().expect("wait for bmpa")
}

pub fn code(out: &Output) -> i32 {
    out.status.code().expect("no exit code")
}

pub fn stdout_str(out: &Output) -> &str {
    std::str::from_utf8(&out.stdout).expect("stdout is utf-8")
}

/// Every golden invocation: (golden file, expected exit code, argv).
pub const GOLDENS: &[(&str, i32, &[&str])] = &[
    ("validate_zn2.json", 0, &["validate", "tests/fixtures/zn2.json"]),
    ("weights_integer3.json", 0, &["weights", "tests/fixtures/integer3.json"]),
    ("weights_free2_even.json", 0, &["weights", "tests/fixtures/free2.json", "--even-only", "A"]),
    ("tpc_zn2.json", 0, &["tpc", "tests/fixtures/zn2.json"]),
    ("tpc_integer3.json", 4, &["tpc", "tests/fixtures/integer3.json"]),
    ("tpc_zero_divisor.json", 3, &["tpc", "tests/fixtures/zero_divisor.json"]),
    ("dims_tl4.json", 0, &["dims", "tests/fixtures/tl4.json"]),
    ("dims_graph_tl4.json", 0, &["dims", "tests/fixtures/tl4.json", "--graph"]),
    ("perturb_scalar_tl4.json", 0, &["perturb", "tests/fixtures/tl4.json", "--scalar", "2.0"]),
    (
        "perturb_weight_tl4.json",
        0,
        &["perturb", "tests/fixtures/tl4.json", "--weight", "tests/fixtures/weights_tl4.json"],
    ),
    ("spherical_tl4.json", 0, &["spherical", "tests/fixtures/tl4.json"]),
    ("fuse_dc_s3.json", 0, &["fuse", "tests/fixtures/dc_s3.json"]),
    ("cable_zn3.json", 0, &["cable", "tests/fixtures/zn3.json", "-k", "3"]),
];

/// The committed example fixtures are the goldens for `example` itself.
pub const EXAMPLES: &[(&str, &[&str])] = &[
    ("zn2.json", &["example", "zn", "--n", "2"]),
    ("zn3.json", &["example", "zn", "--n", "3"]),
    ("integer3.json", &["example", "integer", "--range", "3"]),
    ("free2.json", &["example", "free", "--len", "2"]),
    ("tl4.json", &["example", "tl", "--n", "4"]),
    ("s3.json", &["example", "s3"]),
    ("dc_s3.json", &["example", "dc", "--group", "s3", "--h", "(12)", "--k", "(123)"]),
];

/// System documents that must be canonical-serialization fixpoints.
pub const ROUND_TRIP: &[&str] = &[
    "zn2.json",
    "zn3.json",
    "integer3.json",
    "free2.json",
    "tl4.json",
    "s3.json",
    "dc_s3.json",
    "zero_divisor.json",
    "disagree.json",
];

/// One representative invocation per exit code, 0 through 5.
pub const EXIT_TABLE: &[(i32, &[&str])] = &[
    (0, &["tpc", "tests/fixtures/zn2.json"]),
    (0, &["--help"]),
    (1, &[]),
    (1, &["frobnicate"]),
    (1, &["example", "dc", "--group", "s3", "--h", "nope", "--k", "all"]),
    (2, &["tpc", "tests/fixtures/bad.json"]),
    (2, &["tpc", "tests/fixtures/weights_tl4.json"]),
    (2, &["tpc", "tests/fixtures/does_not_exist.json"]),
    (2, &["spherical", "tests/fixtures/zn2.json"]),
    (2, &["fuse", "tests/fixtures/zn2.json"]),
    (2, &["cable", "tests/fixtures/integer3.json", "-k", "2"]),
    (2, &["perturb", "tests/fixtures/tl4.json", "--scalar", "-1.0"]),
    (3, &["tpc", "tests/fixtures/zero_divisor.json"]),
    (4, &["tpc", "tests/fixtures/integer3.json"]),
    (5, &["tpc", "tests/fixtures/disagree.json"]),
];
