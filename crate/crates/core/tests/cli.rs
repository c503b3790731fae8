use std::fs;

use sparse_ldp::calibration::{min_feasible_support, sweep_support, DesignResult, SweepRow};
use sparse_ldp::cli::{run, EXIT_NEGATIVE, EXIT_OK, EXIT_USAGE};
use sparse_ldp::mechanism::{KernelFamily, TruncatedMechanism, TruncatedParams};
use sparse_ldp::privacy::{worst_case_defect, PureLdpResult, WorstCase};

struct Output {
    code: i32,
    stdout: String,
    stderr: String,
}

fn cli(args: &str) -> Output {
    let argv = std::iter::once("sparse-ldp").chain(args.split_whitespace());
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(argv, &mut out, &mut err);
    Output {
        code,
        stdout: String::from_utf8(out).unwrap(),
        stderr: String::from_utf8(err).unwrap(),
    }
}

fn table_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .skip(1)
        .map(|l| l.split_whitespace().map(str::to_owned).collect())
        .collect()
}

fn assert_table(args: &str, expected: &[[&str; 4]]) {
    let out = cli(args);
    assert_eq!(out.code, EXIT_OK, "{}", out.stderr);
    let rows = table_rows(&out.stdout);
    assert_eq!(rows.len(), expected.len());
    for (row, want) in rows.iter().zip(expected) {
        assert_eq!(row, want);
    }
}

#[test]
fn defect_laplace_example() {
    let out = cli("defect --family laplace --param 0.5 --s 7 --eps 1 --range 3");
    assert_eq!(out.code, EXIT_OK);
    assert_eq!(out.stdout, "delta_star=0.4686\nargmax_h=3\n");
}

#[test]
fn defect_gaussian_example() {
    let out = cli("defect --family gaussian --param 2 --s 3 --eps 1 --range 3");
    assert_eq!(out.code, EXIT_OK);
    assert!(out.stdout.starts_with("delta_star=1.0000\n"), "{}", out.stdout);
}

#[test]
fn defect_per_h_rows() {
    let out = cli("defect --family laplace --param 0.5 --s 7 --eps 1 --range 3 --per-h --format csv");
    assert_eq!(out.code, EXIT_OK);
    let lines: Vec<&str> = out.stdout.lines().collect();
    assert_eq!(lines[0], "h,delta_h,leakage,overlap");
    assert_eq!(lines.len(), 5);
    assert!(lines[1].starts_with("0,0,"));
    for (i, line) in lines[1..].iter().enumerate() {
        let cells: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
        assert_eq!(cells[0], i as f64);
        assert!((cells[1] - cells[2] - cells[3]).abs() < 1e-12);
    }
}

#[test]
fn defect_json_round_trips_full_precision() {
    let out = cli("defect --family gaussian --param 2 --s 13 --eps 1 --range 3 --format json");
    assert_eq!(out.code, EXIT_OK);
    let parsed: WorstCase = serde_json::from_str(&out.stdout).unwrap();
    let params = TruncatedParams::new(KernelFamily::gaussian(2.0).unwrap(), 13, 3, 1.0).unwrap();
    assert_eq!(parsed, worst_case_defect(&params));
}

#[test]
fn even_support_is_usage_error() {
    let out = cli("defect --family laplace --param 0.5 --s 6 --eps 1 --range 3");
    assert_eq!(out.code, EXIT_USAGE);
    assert!(out.stdout.is_empty());
    assert!(out.stderr.contains('6'), "{}", out.stderr);
}

#[test]
fn bad_flags_are_usage_errors() {
    for args in [
        "",
        "defect --family laplace --param 0.5 --s 7 --eps 1",
        "defect --family cauchy --param 0.5 --s 7 --eps 1 --range 3",
        "defect --family laplace --param -1 --s 7 --eps 1 --range 3",
        "defect --family laplace --param 0.5 --s 7 --eps -1 --range 3",
        "defect --family laplace --param 0.5 --s 7 --eps 1 --range 3 --format xml",
        "design --family laplace --param 0.5 --eps 1 --delta 0 --range 3",
        "design --family laplace --param 0.5 --eps 1 --delta 1.5 --range 3",
        "sample --family laplace --param 0.5 --s 7 --x 0",
        "frobnicate",
    ] {
        assert_eq!(cli(args).code, EXIT_USAGE, "args: {args}");
    }
}

#[test]
fn help_and_version_succeed() {
    let help = cli("--help");
    assert_eq!(help.code, EXIT_OK);
    assert!(help.stdout.contains("design"));
    assert_eq!(cli("--version").code, EXIT_OK);
}

#[test]
fn design_laplace_example() {
    let out = cli("design --family laplace --param 0.5 --eps 1 --delta 0.5 --range 3");
    assert_eq!(out.code, EXIT_OK);
    assert!(out.stdout.contains("feasible=true\ns=7\ndelta_star=0.4686\n"), "{}", out.stdout);
}

#[test]
fn design_infeasible_exits_one_with_result() {
    let out = cli("design --family gaussian --param 2 --eps 1 --delta 0.3 --range 3 --s-max 15 --format json");
    assert_eq!(out.code, EXIT_NEGATIVE);
    let parsed: DesignResult = serde_json::from_str(&out.stdout).unwrap();
    assert!(!parsed.feasible);
    assert_eq!(parsed.s_chosen, None);
    assert_eq!(parsed.s_scanned_max, 15);
}

#[test]
fn design_trivial_delta() {
    let out = cli("design --family gaussian --param 2 --eps 1 --delta 1 --range 3 --format csv");
    assert_eq!(out.code, EXIT_OK);
    let line = out.stdout.lines().nth(1).unwrap();
    assert!(line.starts_with("true,1,1,"), "{line}");
}

#[test]
fn design_json_matches_library() {
    let out = cli("design --family laplace --param 0.5 --eps 1 --delta 0.35 --range 3 --format json");
    assert_eq!(out.code, EXIT_OK);
    let parsed: DesignResult = serde_json::from_str(&out.stdout).unwrap();
    let direct = min_feasible_support(KernelFamily::laplace(0.5).unwrap(), 1.0, 0.35, 3, None).unwrap();
    assert_eq!(parsed, direct);
}

#[test]
fn sweep_support_laplace_table_digits() {
    assert_table(
        "sweep support --family laplace --param 0.5 --eps 1 --range 3 --values 3,5,7,9,11,13",
        &[
            ["3", "1.0000", "0.5481", "0.5481"],
            ["5", "0.6696", "0.9104", "1.4094"],
            ["7", "0.4686", "1.1851", "2.4071"],
            ["9", "0.3706", "1.3929", "3.4108"],
            ["11", "0.3179", "1.5475", "4.3362"],
            ["13", "0.2880", "1.6603", "5.1386"],
        ],
    );
}

#[test]
fn sweep_support_gaussian_table_digits() {
    assert_table(
        "sweep support --family gaussian --param 2 --eps 1 --range 3 --values 3,5,7,9,11,13,15",
        &[
            ["3", "1.0000", "0.6383", "0.6383"],
            ["5", "0.6257", "1.0536", "1.6634"],
            ["7", "0.4173", "1.3267", "2.6929"],
            ["9", "0.3468", "1.4744", "3.4283"],
            ["11", "0.3255", "1.5365", "3.8084"],
            ["13", "0.3203", "1.5563", "3.9513"],
            ["15", "0.3193", "1.5611", "3.9906"],
        ],
    );
}

#[test]
fn sweep_param_laplace_table_digits() {
    assert_table(
        "sweep param --family laplace --values 0.2,0.4,0.6,0.8,1.0,1.2 --eps 1 --range 2 --s 7",
        &[
            ["0.2", "0.2402", "1.4996", "3.3254"],
            ["0.4", "0.1954", "1.2872", "2.6959"],
            ["0.6", "0.2466", "1.0870", "2.1390"],
            ["0.8", "0.3811", "0.9061", "1.6695"],
            ["1", "0.4985", "0.7483", "1.2890"],
            ["1.2", "0.5974", "0.6142", "0.9899"],
        ],
    );
}

#[test]
fn sweep_param_gaussian_table_digits() {
    assert_table(
        "sweep param --family gaussian --values 0.8,1.0,1.2,1.5,2.0,2.5,3.0 --eps 1 --range 2 --s 7",
        &[
            ["0.8", "0.6886", "0.5469", "0.6398"],
            ["1", "0.5407", "0.7267", "0.9959"],
            ["1.2", "0.4009", "0.8915", "1.3997"],
            ["1.5", "0.2651", "1.0984", "1.9831"],
            ["2", "0.2012", "1.3267", "2.6929"],
            ["2.5", "0.2301", "1.4551", "3.1140"],
            ["3", "0.2466", "1.5306", "3.3673"],
        ],
    );
}

#[test]
fn sweep_header_and_single_row() {
    let out = cli("sweep support --family laplace --param 0.5 --eps 1 --range 3 --values 7 --format csv");
    assert_eq!(out.code, EXIT_OK);
    let lines: Vec<&str> = out.stdout.lines().collect();
    assert_eq!(lines, ["varied,delta_star,r1,r2", lines[1]]);
    assert!(lines[1].starts_with("7,"));
}

#[test]
fn sweep_empty_list_is_usage_error() {
    assert_eq!(
        cli("sweep support --family laplace --param 0.5 --eps 1 --range 3 --values").code,
        EXIT_USAGE
    );
    assert_eq!(
        cli("sweep param --family gaussian --values , --eps 1 --range 2 --s 7").code,
        EXIT_USAGE
    );
}

#[test]
fn sweep_json_and_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rows.json");
    let args = format!(
        "sweep support --family gaussian --param 2 --eps 1 --range 3 --values 5,9,13 --format json --out {}",
        path.display()
    );
    let out = cli(&args);
    assert_eq!(out.code, EXIT_OK, "{}", out.stderr);
    assert!(out.stdout.is_empty());
    let rows: Vec<SweepRow> = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    let direct = sweep_support(KernelFamily::gaussian(2.0).unwrap(), 1.0, 3, &[5, 9, 13]).unwrap();
    assert_eq!(rows, direct);
}

fn write_spec(dir: &tempfile::TempDir, name: &str, json: &str) -> String {
    let path = dir.path().join(name);
    fs::write(&path, json).unwrap();
    path.display().to_string()
}

#[test]
fn check_pure_examples() {
    let dir = tempfile::tempdir().unwrap();

    let common = write_spec(
        &dir,
        "common.json",
        r#"{"kernel":{"family":"laplace","param":0.7},"inputs":[0,1],"outputs":[0,1],
            "supports":{"0":[0,1],"1":[0,1]}}"#,
    );
    let out = cli(&format!("check-pure {common} --format json"));
    assert_eq!(out.code, EXIT_OK, "{}", out.stderr);
    let parsed: PureLdpResult = serde_json::from_str(&out.stdout).unwrap();
    assert!(parsed.finite);
    assert!((parsed.epsilon_star.unwrap() - 0.7).abs() < 1e-12);

    let single = write_spec(
        &dir,
        "single.json",
        r#"{"kernel":{"family":"gaussian","param":1.0},"inputs":[3],"outputs":[2,3,4],
            "supports":{"3":[2,3,4]}}"#,
    );
    let out = cli(&format!("check-pure {single}"));
    assert_eq!(out.code, EXIT_OK);
    assert!(out.stdout.starts_with("finite=true\nepsilon_star=0.0000\n"), "{}", out.stdout);

    let mismatch = write_spec(
        &dir,
        "mismatch.json",
        r#"{"kernel":{"family":"laplace","param":1.0},"inputs":[0,1],"outputs":[0,1,2],
            "supports":{"0":[0,1],"1":[1,2]}}"#,
    );
    let out = cli(&format!("check-pure {mismatch}"));
    assert_eq!(out.code, EXIT_NEGATIVE);
    assert!(out.stdout.contains("finite=false\nepsilon_star=inf\nwitness="), "{}", out.stdout);
}

#[test]
fn check_pure_rejects_bad_files() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.json").display().to_string();
    assert_eq!(cli(&format!("check-pure {missing}")).code, EXIT_USAGE);

    let garbage = write_spec(&dir, "garbage.json", "{not json");
    assert_eq!(cli(&format!("check-pure {garbage}")).code, EXIT_USAGE);

    let outside = write_spec(
        &dir,
        "outside.json",
        r#"{"kernel":{"family":"laplace","param":1.0},"inputs":[0],"outputs":[0],
            "supports":{"0":[0,5]}}"#,
    );
    let out = cli(&format!("check-pure {outside}"));
    assert_eq!(out.code, EXIT_USAGE);
    assert!(out.stderr.contains('5'), "{}", out.stderr);
}

#[test]
fn sample_point_support() {
    let out = cli("sample --family laplace --param 0.5 --s 1 --x 4 --n 3");
    assert_eq!(out.code, EXIT_OK);
    assert_eq!(out.stdout, "4,4,4\n");
}

#[test]
fn sample_negative_input_and_formats() {
    let out = cli("sample --family gaussian --param 1 --s 5 --x -10 --n 50 --seed 9 --format json");
    assert_eq!(out.code, EXIT_OK);
    let draws: Vec<i64> = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(draws.len(), 50);
    assert!(draws.iter().all(|y| (-12..=-8).contains(y)));
    let direct = sparse_ldp::sample(&TruncatedMechanism::new(KernelFamily::gaussian(1.0).unwrap(), 5).unwrap(), -10, 9, 50)
        .unwrap();
    assert_eq!(draws, direct);
}

#[test]
fn sample_is_byte_identical_per_seed() {
    let args = "sample --family laplace --param 0.3 --s 11 --x 2 --n 500 --seed 42 --format csv";
    let a = cli(args);
    let b = cli(args);
    assert_eq!(a.code, EXIT_OK);
    assert_eq!(a.stdout, b.stdout);
    let c = cli("sample --family laplace --param 0.3 --s 11 --x 2 --n 500 --seed 43 --format csv");
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn sample_histogram_tracks_pmf() {
    let out = cli("sample --family laplace --param 0.5 --s 9 --x 0 --n 1000000 --seed 7 --histogram --format csv");
    assert_eq!(out.code, EXIT_OK);
    let mut total = 0u64;
    let mut worst = 0.0f64;
    for line in out.stdout.lines().skip(1) {
        let cells: Vec<&str> = line.split(',').collect();
        total += cells[1].parse::<u64>().unwrap();
        let freq: f64 = cells[2].parse().unwrap();
        let pmf: f64 = cells[3].parse().unwrap();
        worst = worst.max((freq - pmf).abs());
    }
    assert_eq!(total, 1_000_000);
    assert!(worst < 0.005, "max deviation {worst}");
}
