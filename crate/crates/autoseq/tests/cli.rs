//! Command-line behavior: formats, exit codes, determinism, certificate
//! round trips through files.

use autoseq::cli::{run, EXIT_NEGATIVE, EXIT_OK, EXIT_USAGE};
use std::path::PathBuf;
use std::sync::atomic::{AtomicU64, Ordering};

fn invoke(args: &[&str]) -> (i32, String, String) {
    let args: Vec<String> = args.iter().map(|s| s.to_string()).collect();
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run(&args, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

static COUNTER: AtomicU64 = AtomicU64::new(0);

fn temp_file(name: &str, contents: &str) -> PathBuf {
    let mut path = std::env::temp_dir();
    path.push(format!(
        "autoseq-test-{}-{}-{name}",
        std::process::id(),
        COUNTER.fetch_add(1, Ordering::Relaxed)
    ));
    std::fs::write(&path, contents).unwrap();
    path
}

fn compile_chi4() -> String {
    let (code, text, _) = invoke(&["compile-char", "--Q", "4", "--index", "1", "--q", "2"]);
    assert_eq!(code, EXIT_OK);
    text
}

#[test]
fn eval_builtin_and_files() {
    let (code, out, _) = invoke(&["eval", "liouville", "12"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out, "W:1/2\n");

    let dfao = temp_file("chi4.dfao", &compile_chi4());
    let (code, out, _) = invoke(&["eval", dfao.to_str().unwrap(), "7"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out, "W:1/2\n");

    let cm = temp_file("f.cm", "cm\ntable-bound 10\ndefault W:0/1\np 2 Z\n");
    let (code, out, _) = invoke(&["eval", cm.to_str().unwrap(), "6"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out, "Z\n");

    let (code, out, _) = invoke(&["eval", "liouville", "12", "--format", "tabular"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out, "n\tvalue\n12\tW:1/2\n");
}

#[test]
fn usage_and_input_errors_exit_2() {
    let (code, _, err) = invoke(&["eval"]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("missing"));

    let (code, _, _) = invoke(&["eval", "/nonexistent/file", "3"]);
    assert_eq!(code, EXIT_USAGE);

    let bad = temp_file("bad.dfao", "q 2\nstates 1\nstart 0\nreading lsd\nt 0 0 0\n");
    let (code, _, err) = invoke(&["eval", bad.to_str().unwrap(), "3"]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("missing"));

    let (code, _, _) = invoke(&["classify", "liouville", "--nonsense", "1"]);
    assert_eq!(code, EXIT_USAGE);

    let (code, _, _) = invoke(&["frobnicate"]);
    assert_eq!(code, EXIT_USAGE);

    // Missing transitions for digit 1.
    let (code, _, _) = invoke(&["compile-char", "--Q", "4", "--index", "7", "--q", "2"]);
    assert_eq!(code, EXIT_USAGE);
}

#[test]
fn classify_round_trip_and_negative_verdicts() {
    let (code, out, _) = invoke(&[
        "classify", "char:4:1", "--q", "2", "--N", "10000", "--Qmax", "100", "--P", "1000",
    ]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("verdict CharacterMatch"));
    assert!(out.contains("character char Q=4 e=[1]"));
    assert!(out.contains("conductor 4"));
    assert!(out.contains("params q=2 N=10000 Qmax=100 P=1000"));

    let (code, out, _) = invoke(&["classify", "liouville", "--q", "2"]);
    assert_eq!(code, EXIT_NEGATIVE);
    assert!(out.contains("verdict NotClassified"));
    assert!(out.contains("rejected Q=1"));

    let (code, out, _) = invoke(&["classify", "char:4:1", "--format", "tabular"]);
    assert_eq!(code, EXIT_OK);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("verdict\tdetail\tq\tN\tQmax\tP"));
    assert!(lines.next().unwrap().starts_with("CharacterMatch\t"));
}

#[test]
fn infer_reports_growth_and_exit_code() {
    let (code, out, _) = invoke(&[
        "infer",
        "liouville",
        "--q",
        "2",
        "--depth",
        "7",
        "--prefix",
        "4096",
    ]);
    assert_eq!(code, EXIT_NEGATIVE);
    assert!(out.contains("closed false"));
    let counts_line = out
        .lines()
        .find(|l| l.starts_with("classes-by-depth"))
        .unwrap();
    let counts: Vec<usize> = counts_line
        .split_whitespace()
        .skip(1)
        .map(|w| w.parse().unwrap())
        .collect();
    for d in 3..=7 {
        assert!(counts[d] > counts[d - 1]);
    }

    let (code, out, _) = invoke(&[
        "infer", "char:3:1", "--q", "2", "--depth", "8", "--prefix", "4096",
    ]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("closed true"));
    assert!(out.contains("candidate validated"));
    assert!(out.contains("dfao-begin"));

    // Precondition L >= q^D is enforced as a usage error.
    let (code, _, _) = invoke(&[
        "infer",
        "liouville",
        "--q",
        "2",
        "--depth",
        "13",
        "--prefix",
        "4096",
    ]);
    assert_eq!(code, EXIT_USAGE);
}

#[test]
fn minimize_reverse_equiv_k0() {
    let chi4 = compile_chi4();
    let dfao = temp_file("chi4.dfao", &chi4);
    let (code, out, _) = invoke(&["minimize", dfao.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out, chi4, "compiled output is already minimal-canonical");

    let msd = temp_file(
        "mod3.msd",
        "q 2\nstates 3\nstart 0\nreading msd\nt 0 0 0\nt 0 1 1\nt 1 0 2\nt 1 1 0\nt 2 0 1\nt 2 1 2\no 0 W:0/1\no 1 Z\no 2 Z\n",
    );
    let (code, converted, _) = invoke(&["reverse", msd.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    assert!(converted.contains("reading lsd"));
    let lsd = temp_file("mod3.lsd", &converted);
    let (code, _, err) = invoke(&["reverse", lsd.to_str().unwrap()]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("msd"));

    let (code, out, _) = invoke(&["equiv", dfao.to_str().unwrap(), dfao.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out, "equivalent\n");
    let (code, out, _) = invoke(&["equiv", dfao.to_str().unwrap(), lsd.to_str().unwrap()]);
    assert_eq!(code, EXIT_NEGATIVE);
    assert!(out.starts_with("different at n = "));
    let witness: u64 = out.trim().rsplit(' ').next().unwrap().parse().unwrap();
    // The witness is genuine: chi4 and the mod-3 indicator differ there.
    let expect_chi4 = match witness % 4 {
        1 => "W:0/1",
        3 => "W:1/2",
        _ => "Z",
    };
    let expect_mod3 = if witness % 3 == 0 { "W:0/1" } else { "Z" };
    assert_ne!(expect_chi4, expect_mod3);

    let (code, out, _) = invoke(&["k0", dfao.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("k0 1"));
}

#[test]
fn demo_certificates_verify_through_files() {
    let (code, out, _) = invoke(&["demo", "key"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("r 83"));
    let cert = temp_file("ra.cert", &out);
    let (code, out, _) = invoke(&["verify-cert", cert.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("cert ra ok"));

    let (code, out, _) = invoke(&["demo", "key2"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("# found primes: 83, 563, 1283"));
    assert!(out.contains("autoseq-cert parity"));
    let cert = temp_file("key2.cert", &out);
    let (code, out, _) = invoke(&["verify-cert", cert.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(
        out.matches(" ok").count(),
        4,
        "ra, uv, hb, parity all verify"
    );

    // Tampering any field fails verification with exit 1.
    let broken = std::fs::read_to_string(cert)
        .unwrap()
        .replace("r 83", "r 91");
    let cert = temp_file("broken.cert", &broken);
    let (code, out, _) = invoke(&["verify-cert", cert.to_str().unwrap()]);
    assert_eq!(code, EXIT_NEGATIVE);
    assert!(out.contains("FAILED"));

    let garbage = temp_file("garbage.cert", "not a certificate\n");
    let (code, _, _) = invoke(&["verify-cert", garbage.to_str().unwrap()]);
    assert_eq!(code, EXIT_USAGE);

    let (code, out, _) = invoke(&["demo", "key1", "char:4:1", "--bound", "2048"]);
    assert_eq!(code, EXIT_OK);
    let cert = temp_file("key1.cert", &out);
    let (code, _, _) = invoke(&["verify-cert", cert.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);

    let f = temp_file(
        "unit7.cm",
        "cm\ntable-bound 100\ndefault W:1/2\np 7 W:0/1\n",
    );
    let (code, out, _) = invoke(&["demo", "zero-prop", f.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("prime 7"));
    let cert = temp_file("zp.cert", &out);
    let (code, _, _) = invoke(&["verify-cert", cert.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);

    // Search exhaustion is a negative verdict, not an error.
    let (code, out, _) = invoke(&["demo", "hb", "--count", "50", "--limit", "2000"]);
    assert_eq!(code, EXIT_NEGATIVE);
    assert!(out.contains("search exhausted"));
}

#[test]
fn reports_are_deterministic() {
    for args in [
        vec!["classify", "char:8:3", "--q", "2", "--seed", "42"],
        vec![
            "infer", "char:3:1", "--q", "2", "--depth", "6", "--prefix", "4096",
        ],
        vec!["sweep", "--q", "2", "--max-states", "2"],
        vec!["demo", "key2"],
    ] {
        let (c1, o1, e1) = invoke(&args);
        let (c2, o2, e2) = invoke(&args);
        assert_eq!(c1, c2);
        assert_eq!(o1, o2, "stdout differs for {args:?}");
        assert_eq!(e1, e2);
    }
}

#[test]
fn sweep_deterministic_across_thread_counts() {
    let bin = env!("CARGO_BIN_EXE_autoseq");
    let run_with = |threads: &str| {
        let output = std::process::Command::new(bin)
            .args(["sweep", "--q", "2", "--max-states", "3"])
            .env("AUTOSEQ_THREADS", threads)
            .output()
            .unwrap();
        assert!(output.status.success());
        output.stdout
    };
    let one = run_with("1");
    assert_eq!(one, run_with("5"));
    assert_eq!(one, run_with("0"));
}

#[test]
fn sweep_small_is_fully_classified() {
    let (code, out, _) = invoke(&["sweep", "--q", "2", "--max-states", "2", "--N", "1000"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("not-classified 0"));

    let (code, out, _) = invoke(&[
        "sweep",
        "--q",
        "2",
        "--max-states",
        "2",
        "--format",
        "tabular",
    ]);
    assert_eq!(code, EXIT_OK);
    assert!(out.starts_with("survivor\tstates\tverdict\tdetail\n"));
}
