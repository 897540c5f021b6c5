use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sstack")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

/// Value column of a `quantity,value` report.
fn quantity(out: &str, name: &str) -> String {
    out.lines()
        .find_map(|l| l.strip_prefix(&format!("{name},")))
        .unwrap_or_else(|| panic!("no {name} in {out}"))
        .split(',')
        .next()
        .unwrap()
        .to_string()
}

#[test]
fn dim_on_presets() {
    let o = run(&["dim", "--preset", "perm3"]);
    assert!(o.status.success());
    assert_eq!(quantity(&stdout(&o), "sldim"), "7/6");
    assert_eq!(quantity(&stdout(&o), "ldim"), "2");

    let o = run(&["dim", "--preset", "soa-example"]);
    assert_eq!(quantity(&stdout(&o), "sldim"), "3/4");
    assert!(quantity(&stdout(&o), "ldim").parse::<usize>().unwrap() >= 2);

    let o = run(&["dim", "--preset", "threshold-grid:8"]);
    assert_eq!(quantity(&stdout(&o), "sldim"), "0");
}

#[test]
fn dim_writes_tree_and_decimal_column() {
    let dir = tempfile::tempdir().unwrap();
    let tree = dir.path().join("tree.json");
    let o = run(&["dim", "--preset", "perm3", "--decimal", "--gamma", "1/4", "--tree-out", tree.to_str().unwrap()]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.starts_with("quantity,value,value_decimal\n"));
    assert!(out.contains("sldim,7/6,1.166666666667"));
    assert!(out.contains("sndim,"));
    assert!(out.contains("sgdim,"));
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(tree).unwrap()).unwrap();
    assert_eq!(json["weight"], "7/6");
}

#[test]
fn simulate_reproduces_regrets() {
    let script = format!("scripted:{}", data("contexts12.json").display());
    let o = run(&["simulate", "--preset", "soa-example", "--learner", "soa", "--env", &script]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stderr(&o).contains("cumulative_regret=2 "), "{}", stderr(&o));
    assert_eq!(stdout(&o).lines().count(), 3);

    let o = run(&["simulate", "--preset", "soa-example", "--learner", "ssoa", "--env", "adversary"]);
    assert!(stderr(&o).contains("cumulative_regret=3/4 sldim=3/4 within_bound=yes"), "{}", stderr(&o));

    let o = run(&["simulate", "--preset", "perm3", "--learner", "ssoa", "--env", "adversary"]);
    assert!(stderr(&o).contains("cumulative_regret=7/6 sldim=7/6 within_bound=yes"), "{}", stderr(&o));
}

#[test]
fn pac_failure_rates_do_not_rise() {
    let o = run(&["pac", "--preset", "perm3", "--gamma", "1/4", "--m", "0,2,4,8", "--trials", "200", "--seed", "7"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let mut rdr = csv::Reader::from_reader(o.stdout.as_slice());
    let rates: Vec<f64> = rdr
        .records()
        .map(|r| {
            let r = r.unwrap();
            let failures: f64 = r[2].parse().unwrap();
            failures / 200.0
        })
        .collect();
    assert_eq!(rates.len(), 4);
    assert!(rates.windows(2).all(|w| w[1] <= w[0]), "{rates:?}");
}

#[test]
fn same_seed_gives_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let mut contents = Vec::new();
    for i in 0..2 {
        let out = dir.path().join(format!("pac{i}.csv"));
        let trials = dir.path().join(format!("trials{i}.csv"));
        let o = run(&[
            "pac", "--preset", "soa-example", "--m", "1,3", "--trials", "40", "--seed", "11", "--out",
            out.to_str().unwrap(), "--trials-out", trials.to_str().unwrap(),
        ]);
        assert!(o.status.success());
        contents.push((std::fs::read(out).unwrap(), std::fs::read(trials).unwrap()));
    }
    assert_eq!(contents[0], contents[1]);
}

#[test]
fn erm_slope_in_range() {
    let o = run(&[
        "erm", "--preset", "table3a", "--dist", "uniform:2", "--m", "4,16,64,256", "--trials", "500", "--seed", "7",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let err = stderr(&o);
    let slope: f64 = err.trim().strip_prefix("log_log_slope=").unwrap().parse().unwrap();
    assert!((-0.8..=-0.2).contains(&slope), "{slope}");
}

#[test]
fn dl_length_one_target() {
    let target = data("dl_L1.json");
    let o = run(&["dl", "--n", "2", "--K", "2", "--target", target.to_str().unwrap(), "--stream", "exhaustive:100"]);
    assert!(o.status.success());
    let out = stdout(&o);
    let row: Vec<&str> = out.lines().nth(1).unwrap().split(',').collect();
    assert!(row[1].parse::<usize>().unwrap() <= 20);
    assert_eq!(row[2], "20");
    assert_eq!(row[3], "yes");
}

#[test]
fn validate_reports_pairs() {
    let o = run(&["validate", "--preset", "perm3"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().count(), 4);
    // indistinct pairs are a warning, not a failure
    let o = run(&["validate", "--preset", "soa-example"]);
    assert!(o.status.success());
    assert!(stderr(&o).contains("warning"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{not json").unwrap();
    let o = run(&["validate", "--game", bad.to_str().unwrap(), "--class", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));

    assert_eq!(run(&["dim", "--preset", "nope"]).status.code(), Some(2));
    assert_eq!(run(&["dim", "--preset", "perm3", "--max-profiles", "2"]).status.code(), Some(3));
    assert_eq!(run(&["dim", "--preset", "perm4", "--gamma", "1/4", "--max-subset", "1"]).status.code(), Some(3));

    // type 2 is never assigned to context 1 in perm2
    let script = dir.path().join("s.json");
    std::fs::write(&script, r#"{"rounds": [{"context": "1", "type": 0}, {"context": "2", "type": 0}]}"#).unwrap();
    let env = format!("scripted:{}", script.display());
    let o = run(&["simulate", "--preset", "perm2", "--env", &env]);
    assert_eq!(o.status.code(), Some(4));
    assert!(stderr(&o).contains("round 2"), "{}", stderr(&o));
}

#[test]
fn file_inputs_match_preset() {
    let dir = tempfile::tempdir().unwrap();
    let preset: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/presets/perm3.json")).unwrap())
            .unwrap();
    let game = dir.path().join("game.json");
    let class = dir.path().join("class.json");
    std::fs::write(&game, preset["game"].to_string()).unwrap();
    std::fs::write(&class, preset["class"].to_string()).unwrap();
    let o = run(&["dim", "--game", game.to_str().unwrap(), "--class", class.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(quantity(&stdout(&o), "sldim"), "7/6");
}
