use std::fs;
use std::path::Path;

use desloc::cli::{
    run_command, CommandResult, EXIT_INPUT, EXIT_NEGATIVE, EXIT_OK, EXIT_RESOURCE, EXIT_USAGE,
};
use desloc::format::parse_generator;
use tempfile::TempDir;

fn run(args: &[&str]) -> CommandResult {
    let mut argv = vec!["desloc"];
    argv.extend_from_slice(args);
    run_command(argv)
}

fn ok(args: &[&str]) -> CommandResult {
    let r = run(args);
    assert_eq!(r.exit_code, EXIT_OK, "{args:?}: {}", r.diagnostics);
    r
}

fn p(dir: &Path, name: &str) -> String {
    dir.join(name).display().to_string()
}

fn fixture() -> TempDir {
    let dir = tempfile::tempdir().unwrap();
    ok(&["fixture", dir.path().to_str().unwrap()]);
    dir
}

fn states(path: &str) -> usize {
    parse_generator(&fs::read_to_string(path).unwrap())
        .unwrap()
        .state_count()
}

#[test]
fn pipeline_reproduces_transfer_line() {
    let dir = fixture();
    let d = dir.path();
    let plant = p(d, "plant.gen");
    ok(&[
        "sync",
        &plant,
        &p(d, "M1.gen"),
        &p(d, "M2.gen"),
        &p(d, "TU.gen"),
    ]);
    assert_eq!(states(&plant), 8);

    let sup = p(d, "sup.gen");
    ok(&["supcon", &sup, &plant, &p(d, "BUF.gen")]);
    assert_eq!(states(&sup), 28);

    let condat = ok(&["condat", &plant, &sup]);
    assert_eq!(condat.stdout_report.lines().count(), 25);
    assert!(condat.stdout_report.contains("\n16\t1,5\n"));

    let rsup = p(d, "rsup.gen");
    ok(&["supreduce", &rsup, &plant, &sup]);
    assert_eq!(states(&rsup), 8);

    let out = p(d, "loc");
    let r = ok(&[
        "localize", &out, &plant, &sup, "--agent", "M1=1,2", "--agent", "M2=3,4", "--agent",
        "TU=5,6,8",
    ]);
    assert!(r
        .stdout_report
        .contains("# event reduction for every agent: yes"));
    assert_eq!(r.output_files.len(), 6);
    let locs: Vec<String> = ["M1", "M2", "TU"]
        .iter()
        .map(|n| p(&d.join("loc"), &format!("{n}.gen")))
        .collect();
    let mut args = vec!["checkeq", &plant, &sup];
    args.extend(locs.iter().map(String::as_str));
    ok(&args);

    let full: Vec<String> = ["M1", "M2", "TU"]
        .iter()
        .map(|n| p(&d.join("loc/full"), &format!("{n}.gen")))
        .collect();
    let mut args = vec!["checkeq", &plant, &sup];
    args.extend(full.iter().map(String::as_str));
    ok(&args);

    let mut args = vec!["event-report", &rsup];
    args.extend(locs.iter().map(String::as_str));
    let report = ok(&args);
    assert_eq!(report.stdout_report.lines().count(), 4);
}

#[test]
fn missing_controller_is_a_negative_verdict() {
    let dir = fixture();
    let d = dir.path();
    let sup = p(d, "sup.gen");
    ok(&["supcon", &sup, &p(d, "TL.gen"), &p(d, "BUF.gen")]);
    let out = p(d, "loc");
    ok(&[
        "localize",
        &out,
        &p(d, "TL.gen"),
        &sup,
        "--agent",
        "M1=1,2",
        "--agent",
        "M2=3,4",
        "--agent",
        "TU=5,6,8",
    ]);
    let r = run(&[
        "checkeq",
        &p(d, "TL.gen"),
        &sup,
        &p(&d.join("loc"), "M1.gen"),
    ]);
    assert_eq!(r.exit_code, EXIT_NEGATIVE);
    assert!(r.stdout_report.contains("differ at"));
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let dir = fixture();
    let d = dir.path();
    let mut texts = Vec::new();
    let sup = p(d, "sup.gen");
    let out = p(d, "loc");
    for _ in 0..2 {
        ok(&["supcon", &sup, &p(d, "TL.gen"), &p(d, "BUF.gen")]);
        let r = ok(&[
            "localize",
            &out,
            &p(d, "TL.gen"),
            &sup,
            "--agent",
            "M1=1,2",
            "--agent",
            "M2=3,4",
            "--agent",
            "TU=5,6,8",
        ]);
        let tu = fs::read_to_string(d.join("loc/TU.gen")).unwrap();
        texts.push((fs::read_to_string(&sup).unwrap(), r.stdout_report, tu));
    }
    assert_eq!(texts[0], texts[1]);
}

#[test]
fn small_operations() {
    let dir = fixture();
    let d = dir.path();
    let m1 = p(d, "M1.gen");
    let looped = p(d, "looped.gen");
    ok(&["selfloop", &looped, &m1, "3,4"]);
    let g = parse_generator(&fs::read_to_string(&looped).unwrap()).unwrap();
    assert_eq!(g.transition_count(), 6);

    let proj = p(d, "proj.gen");
    ok(&["project", &proj, &looped, "--keep", "1,2"]);
    let g = parse_generator(&fs::read_to_string(&proj).unwrap()).unwrap();
    assert_eq!((g.state_count(), g.transition_count()), (2, 2));

    let met = p(d, "met.gen");
    ok(&["meet", &met, &m1, &m1]);
    let trimmed = p(d, "trim.gen");
    ok(&["trim", &trimmed, &met]);
    assert_eq!(states(&trimmed), 2);

    ok(&["nonblocking", &m1]);
    ok(&["oracle-eq", &m1, &trimmed, "--maxlen", "8"]);
    ok(&[
        "checknormal",
        &p(d, "TL.gen"),
        &p(d, "TL.gen"),
        "--observable",
        "1,3,5",
    ]);
}

#[test]
fn blocking_generator_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let g = p(dir.path(), "g.gen");
    fs::write(
        &g,
        "GEN G\nSTATES 2\nINIT 0\nMARKED 0\nEVENTS 1\nTRANS\n0 1 1\nEND\n",
    )
    .unwrap();
    let r = run(&["nonblocking", &g]);
    assert_eq!(r.exit_code, EXIT_NEGATIVE);
    assert!(r.stdout_report.contains("blocking"));
}

#[test]
fn exit_codes_for_errors() {
    assert_eq!(run(&["frobnicate"]).exit_code, EXIT_USAGE);
    assert_eq!(run(&["supcon", "only-one-arg"]).exit_code, EXIT_USAGE);
    assert_eq!(run(&["--help"]).exit_code, EXIT_OK);

    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(
        run(&["trim", &p(d, "o.gen"), &p(d, "missing.gen")]).exit_code,
        EXIT_INPUT
    );

    let dup = p(d, "dup.gen");
    fs::write(
        &dup,
        "GEN X\nSTATES 2\nINIT 0\nEVENTS 1\nTRANS\n0 1 0\n0 1 1\nEND\n",
    )
    .unwrap();
    let r = run(&["trim", &p(d, "o.gen"), &dup]);
    assert_eq!(r.exit_code, EXIT_INPUT);
    assert!(r.diagnostics.contains("line 7"), "{}", r.diagnostics);

    let free = p(d, "free.gen");
    fs::write(&free, "GEN F\nSTATES 1\nINIT 0\nMARKED 0\nEVENTS 1 2 3 4\nTRANS\n0 1 0\n0 2 0\n0 3 0\n0 4 0\nEND\n").unwrap();
    let r = run(&["oracle-eq", &free, &free, "--maxlen", "14"]);
    assert_eq!(r.exit_code, EXIT_RESOURCE, "{}", r.diagnostics);

    let fixture = fixture();
    let f = fixture.path();
    let r = run(&[
        "localize",
        &p(d, "loc"),
        &p(f, "TL.gen"),
        &p(f, "TL.gen"),
        "--agent",
        "M1=1,2",
    ]);
    assert_eq!(r.exit_code, EXIT_INPUT);
    assert!(r.diagnostics.contains("owned by no agent"));
}

#[test]
fn no_temporary_files_left_behind() {
    let dir = fixture();
    let names: Vec<String> = fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    assert!(names.iter().all(|n| !n.ends_with(".tmp")), "{names:?}");
    assert_eq!(names.len(), 7);
}
