use serde_json::Value;
use std::process::Command;

fn bcvw(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_bcvw")).args(args).output().expect("binary runs");
    (out.status.code().unwrap_or(-1), String::from_utf8(out.stdout).unwrap(), String::from_utf8(out.stderr).unwrap())
}

fn json(args: &[&str]) -> (i32, Value) {
    let (code, out, err) = bcvw(args);
    (code, serde_json::from_str(&out).unwrap_or_else(|e| panic!("{e}: {out} {err}")))
}

#[test]
fn verify_sp4_reports_brauer_parameter() {
    let (code, v) = json(&["verify", "--group", "sp:4", "--k", "2"]);
    assert_eq!(code, 0);
    assert_eq!(v["schema"], 1);
    let case = &v["cases"][0];
    // e^2 = 2n e under the consistent assignment; the printed m is -n
    assert_eq!(case["suites"]["relations"]["derived_constants"]["m0"], "4");
    let disc = case["suites"]["relations"]["paper_discrepancies"].as_array().unwrap();
    let m0 = disc.iter().find(|d| d["id"] == "Brauer parameter m0").unwrap();
    assert!(m0["printed"].as_str().unwrap().contains("-2"));
    assert!(m0["computed"].as_str().unwrap().contains("-4"));
}

#[test]
fn verify_opq_m1() {
    let (code, v) = json(&["verify", "--group", "opq:3,2", "--k", "2"]);
    assert_eq!(code, 0);
    assert_eq!(v["cases"][0]["suites"]["relations"]["derived_constants"]["m1"], "-1");
}

#[test]
fn config_errors_exit_2() {
    for args in [
        vec!["verify", "--group", "sp:x", "--k", "2"],
        vec!["verify", "--group", "spin:5", "--k", "1"],
        vec!["psmap", "--group", "sp:4"],
        vec!["psmap", "--group", "sp:4", "--k", "1", "--nu", "1"],
        vec!["run", "--group", "sp:4", "--k", "1", "--suite", "nope"],
        vec!["psmap", "--group", "sp:4", "--k", "3"],
    ] {
        let (code, _, err) = bcvw(&args);
        assert_eq!(code, 2, "{args:?}: {err}");
    }
}

#[test]
fn psmap_c_pairs() {
    let (code, v) = json(&["psmap", "--group", "sp:4", "--k", "1", "--nu", "3/2,-1"]);
    assert_eq!(code, 0);
    let sides = v["cases"][0]["suites"]["psmap"]["sides"].as_array().unwrap();
    let cs: Vec<&str> = sides.iter().map(|s| s["c"].as_str().unwrap()).collect();
    assert_eq!(cs, ["0", "1"]);
    assert_eq!(sides[0]["lambda"][0], "3/2");
    assert_eq!(sides[1]["lambda"][0], "-1");
    assert_eq!(sides[0]["intertwiner"].as_array().unwrap().len(), 2);

    let (code, v) = json(&["psmap", "--group", "opq:3,2", "--delta", "triv:1"]);
    assert_eq!(code, 0);
    for s in v["cases"][0]["suites"]["psmap"]["sides"].as_array().unwrap() {
        assert_eq!(s["c"], "1/2");
    }
}

#[test]
fn psmap_k0_edge() {
    let (code, v) = json(&["psmap", "--group", "sp:4", "--k", "0", "--side", "mu"]);
    assert_eq!(code, 0);
    let s = &v["cases"][0]["suites"]["psmap"]["sides"][0];
    assert_eq!((s["legs"].as_u64(), s["dim"].as_u64(), s["isomorphic"].as_bool()), (Some(0), Some(1), Some(true)));
}

#[test]
fn unitary_sl2_grid() {
    let (code, v) = json(&["unitary", "--group", "sp:2", "--k", "1", "--grid", "0;i;-i;1;-1;2;-2"]);
    assert_eq!(code, 0);
    let verdicts: Vec<&str> = v["cases"][0]["suites"]["unitary"]["points"].as_array().unwrap().iter().map(|p| p["verdict"].as_str().unwrap()).collect();
    assert_eq!(verdicts, ["UNKNOWN", "UNKNOWN", "UNKNOWN", "NOT_UNITARY", "NOT_UNITARY", "NOT_UNITARY", "NOT_UNITARY"]);
}

#[test]
fn unitary_sp4_imaginary_and_empty_grid() {
    let (code, v) = json(&["unitary", "--group", "sp:4", "--k", "1", "--nu", "i,2i"]);
    assert_eq!(code, 0);
    let p = &v["cases"][0]["suites"]["unitary"]["points"][0];
    assert_eq!(p["verdict"], "UNKNOWN");
    assert_eq!(p["sides"].as_array().unwrap().len(), 2);
    let (code, v) = json(&["unitary", "--group", "sp:4", "--k", "1", "--grid", ""]);
    assert_eq!(code, 0);
    assert!(v["cases"][0]["suites"]["unitary"]["points"].as_array().unwrap().is_empty());
}

#[test]
fn reports_are_byte_identical_and_written_to_out() {
    let dir = std::env::temp_dir().join(format!("bcvw-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let a = dir.join("a.json");
    let b = dir.join("b.json");
    for p in [&a, &b] {
        let (code, out, _) = bcvw(&["run", "--group", "opq:3,2", "--delta", "det:1", "--nu", "1/3,2i", "--out", p.to_str().unwrap()]);
        assert_eq!(code, 0);
        assert!(out.is_empty());
    }
    let (ta, tb) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(ta, tb);
    let v: Value = serde_json::from_slice(&ta).unwrap();
    let suites = v["cases"][0]["suites"].as_object().unwrap();
    assert_eq!(suites.keys().collect::<Vec<_>>(), ["psmap", "relations", "unitary"]);
    assert!(v["cases"][0]["constants_table"].as_array().unwrap().len() == 2);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn config_file_runs_cases_in_order() {
    let dir = std::env::temp_dir().join(format!("bcvw-cfg-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("cases.toml");
    std::fs::write(
        &cfg,
        "[[case]]\ngroup = \"sp:4\"\nk = 1\nnu = \"3/2,-1\"\nsuite = \"psmap\"\n\n[[case]]\ngroup = \"sp:2\"\nk = 1\ngrid = \"1;i\"\nsuite = \"unitary\"\n",
    )
    .unwrap();
    let (code, v) = json(&["run", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code, 0);
    let cases = v["cases"].as_array().unwrap();
    assert_eq!(cases.len(), 2);
    assert_eq!(cases[0]["case"]["group"], "sp:4");
    assert!(cases[0]["suites"].get("psmap").is_some());
    assert_eq!(cases[1]["suites"]["unitary"]["points"][0]["verdict"], "NOT_UNITARY");
    std::fs::write(&cfg, "[[case]]\ngroup = \"sp:4\"\nbogus = true\n").unwrap();
    assert_eq!(bcvw(&["run", "--config", cfg.to_str().unwrap()]).0, 2);
    std::fs::remove_dir_all(&dir).unwrap();
}
