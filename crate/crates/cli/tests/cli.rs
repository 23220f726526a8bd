use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name).display().to_string()
}

fn hpp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hpp")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

#[test]
fn suspect_queries() {
    let f = fixture("suspects.hpp");
    let yes = hpp(&["entail", &f, "--query", "suspect1(john) : [1,1]"]);
    assert_eq!((code(&yes), stdout(&yes).as_str()), (0, "ENTAILED h=[1,1]\n"));
    for q in ["suspect2(john) : [1,1]", "suspect3(john) : [1,1]"] {
        let no = hpp(&["entail", &f, "--query", q]);
        assert_eq!((code(&no), stdout(&no).as_str()), (1, "NOT ENTAILED h=[0,1]\n"), "{q}");
    }
}

#[test]
fn inconsistent_programs_exit_one() {
    let two = hpp(&["consistent", &fixture("twofacts.hpp")]);
    assert_eq!((code(&two), stdout(&two).as_str()), (1, "INCONSISTENT witness=a\n"));
    let clash = hpp(&["consistent", &fixture("igc_clash.hpp")]);
    assert_eq!(code(&clash), 1);
    assert!(stdout(&clash).starts_with("INCONSISTENT witness="));
    let q = hpp(&["entail", &fixture("twofacts.hpp"), "--query", "a : [0,1]"]);
    assert_eq!((code(&q), stdout(&q).as_str()), (1, "INCONSISTENT witness=a\n"));
    let ok = hpp(&["consistent", &fixture("pcc_chain.hpp")]);
    assert_eq!((code(&ok), stdout(&ok).as_str()), (0, "CONSISTENT\n"));
}

#[test]
fn errors_exit_two() {
    assert_eq!(code(&hpp(&["lfp", "/no/such/file.hpp"])), 2);
    assert_eq!(code(&hpp(&["frobnicate"])), 2);
    assert_eq!(code(&hpp(&["entail", &fixture("pcc_chain.hpp"), "--query", "r : [1,"])), 2);
    assert_eq!(code(&hpp(&["lfp", &fixture("pcc_chain.hpp"), "--width", "1"])), 2);
    assert_eq!(code(&hpp(&["--atom-cap", "0", "consistent", &fixture("pcc_chain.hpp")])), 2);
    let dir = tempdir();
    let bad = dir.join("bad.hpp");
    std::fs::write(&bad, "p : [0.7, 0.2].").unwrap();
    let o = hpp(&["parse", bad.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(!o.stderr.is_empty());
}

fn tempdir() -> PathBuf {
    let d = std::env::temp_dir().join(format!("hpp-cli-{}-{:?}", std::process::id(), std::thread::current().id()));
    std::fs::create_dir_all(&d).unwrap();
    d
}

#[test]
fn generated_proofs_pass_the_checker() {
    let dir = tempdir();
    let cases = [
        ("pcc_chain.hpp", "r : [1,1]"),
        ("pcc_chain.hpp", "(p &pcc q) : [0.3,0.5]"),
        ("pcc_chain.hpp", "(p &inc q) : [0,0.5]"),
        ("suspects.hpp", "suspect1(john) : [1,1]"),
        ("suspects.hpp", "seen(pic1, id1, john) : [0.4,0.8]"),
    ];
    for (i, (file, q)) in cases.iter().enumerate() {
        let out = dir.join(format!("proof{i}.txt"));
        let o = hpp(&["entail", &fixture(file), "--query", q, "--prove", out.to_str().unwrap()]);
        assert_eq!(code(&o), 0, "{q}: {}", stdout(&o));
        let c = hpp(&["check-proof", &fixture(file), "--proof", out.to_str().unwrap(), "--goal", q]);
        assert_eq!(code(&c), 0, "{q}: {}", stdout(&c));
        assert!(stdout(&c).starts_with("VALID"));
    }
}

#[test]
fn tampered_proof_is_rejected() {
    let dir = tempdir();
    let good = dir.join("good.txt");
    let f = fixture("pcc_chain.hpp");
    assert_eq!(code(&hpp(&["entail", &f, "--query", "r : [1,1]", "--prove", good.to_str().unwrap()])), 0);
    let text = std::fs::read_to_string(&good).unwrap();
    let bad = dir.join("bad.txt");
    std::fs::write(&bad, text.replace("[3/10,1/2]  AComposition", "[1/4,1/2]  AComposition")).unwrap();
    let o = hpp(&["check-proof", &f, "--proof", bad.to_str().unwrap(), "--format", "machine"]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).starts_with("verdict=invalid step=3 "), "{}", stdout(&o));
}

#[test]
fn gwm_instance() {
    let o = hpp(&["gwm", &fixture("gwm4.txt"), "--format", "machine"]);
    assert_eq!(code(&o), 0);
    assert_eq!(
        stdout(&o),
        "feasible=true mode=max goal=inc.c2 optimum=1/5 matching=1-2,3-4 bound=3/20 decision=true\n"
    );
}

#[test]
fn classify_and_lfp() {
    let o = hpp(&["classify", &fixture("pcc_chain.hpp")]);
    assert_eq!(stdout(&o), "k=1 r=2 m=3 a=3 s=1 class=HPP_{1,2}\n");
    let atoms = hpp(&["lfp", &fixture("pcc_chain.hpp"), "--dump"]);
    assert_eq!(
        stdout(&atoms),
        "mode=atoms entries=3 iterations=2 fully_defined=true\np : [2/5,3/5]\nq : [3/10,1/2]\nr : [1,1]\n"
    );
    let table = hpp(&["lfp", &fixture("pcc_chain.hpp"), "--width", "2", "--dump", "--format", "machine"]);
    let s = stdout(&table);
    assert!(s.starts_with("mode=formulas entries=6 "), "{s}");
    assert!(s.contains("formula=\"(p &pcc q)\" value=[3/10,1/2]\n"), "{s}");
}

#[test]
fn parse_echo_reparses() {
    let dir = tempdir();
    let o = hpp(&["parse", &fixture("suspects.hpp")]);
    assert_eq!(code(&o), 0);
    let echo = dir.join("echo.hpp");
    std::fs::write(&echo, stdout(&o)).unwrap();
    let again = hpp(&["parse", echo.to_str().unwrap()]);
    assert_eq!(stdout(&again), stdout(&o));
    let g1 = hpp(&["ground", &fixture("suspects.hpp")]);
    let g2 = hpp(&["ground", echo.to_str().unwrap()]);
    assert_eq!(stdout(&g1), stdout(&g2));
}

#[test]
fn outputs_are_deterministic() {
    let f = fixture("suspects.hpp");
    let runs: Vec<Vec<&str>> = vec![
        vec!["ground", &f, "--format", "machine"],
        vec!["lfp", &f, "--dump", "--format", "machine"],
        vec!["consistent", &f, "--format", "machine"],
        vec!["validate-strategies", "--samples", "100", "--seed", "7", "--format", "machine"],
    ];
    for args in runs {
        let a = hpp(&args);
        let b = hpp(&args);
        assert_eq!(code(&a), 0, "{args:?}");
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn strategy_harness_passes() {
    let o = hpp(&["validate-strategies", "--samples", "200", "--seed", "3", "--format", "machine"]);
    assert_eq!(code(&o), 0);
    let s = stdout(&o);
    assert_eq!(s.lines().count(), 7 * 9);
    assert!(s.lines().all(|l| l.contains(" status=pass ")));
}
