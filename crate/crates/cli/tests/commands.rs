use std::io::Cursor;

use clap::Parser;

use misere_cli::commands::{play, run, Cli};
use misere_core::session::NewSession;
use misere_core::simulate::StrategySpec;

fn output(args: &[&str]) -> anyhow::Result<String> {
    let cli = Cli::try_parse_from(std::iter::once("misere").chain(args.iter().copied()))?;
    let mut out = Vec::new();
    run(cli, &mut out)?;
    Ok(String::from_utf8(out)?)
}

#[test]
fn solve_and_exploit() {
    let text = output(&["solve", "path:7"]).unwrap();
    assert!(text.contains("4/7"));
    assert!(text.contains("best moves: 2, 6"));
    let json: serde_json::Value = serde_json::from_str(&output(&["exploit", "star:5", "--json"]).unwrap()).unwrap();
    assert_eq!(json["q"]["fraction"], "17/25");
    assert!(output(&["solve", "edges:1-2,2-2"]).is_err());
}

#[test]
fn tables_csv() {
    let text = output(&["tables", "--n", "24"]).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "n,p_n,q_n,s_n,a_n");
    assert_eq!(lines.len(), 25);
    assert!(lines[24].starts_with("24,"));
    assert!(lines[24].contains("174.58339143224"));
    assert!(output(&["tables", "--n", "5", "--mode", "fancy"]).is_err());
}

#[test]
fn limit_and_checks() {
    let text = output(&["limit", "--n", "500"]).unwrap();
    assert!(text.contains("2a_N = 0.5988890438"));
    let text = output(&["check", "--n", "200"]).unwrap();
    assert!(!text.contains("FAIL"), "{text}");
    assert_eq!(text.matches("[PASS]").count(), 6);
    assert!(text.contains("b_2 computed 1/72 vs published 1/120"));
}

#[test]
fn hyper_modes() {
    let text = output(&["hyper", "--verify"]).unwrap();
    assert!(!text.contains("FAIL"));
    assert_eq!(text.matches("erratum:").count(), 2);
    let json: serde_json::Value = serde_json::from_str(&output(&["hyper", "--case", "n+2,n-1"]).unwrap()).unwrap();
    assert_eq!(json["n_polynomial"], "n^2 + 3n + 2");
    let all: serde_json::Value = serde_json::from_str(&output(&["hyper", "--all"]).unwrap()).unwrap();
    assert_eq!(all.as_array().unwrap().len(), 6);
    assert!(output(&["hyper", "--case", "n+3,1"]).is_err());
    assert!(output(&["hyper"]).is_err());
}

#[test]
fn simulate_and_spider() {
    let text = output(&["simulate", "path:5", "--first", "fixed_second_vertex", "--second", "random", "--trials", "20000", "--seed", "9", "--exact"]).unwrap();
    assert!(text.contains("exact: 8/15"));
    assert!(output(&["simulate", "star:5", "--first", "fixed_second_vertex", "--second", "random"]).is_err());
    let text = output(&["spider", "--legs", "2,2", "--couple"]).unwrap();
    assert!(text.contains("optimal: 2/5"));
    assert!(text.contains("tree solvers agree"));
    assert!(output(&["spider", "--legs", "2,0"]).is_err());
}

#[test]
fn terminal_play() {
    let req = NewSession {
        tree: "path:3".into(),
        engine: StrategySpec::Optimal,
        human_first: true,
        seed: Some(1),
    };
    let mut input = Cursor::new("x\n9\n1\n2\n3\n");
    let mut out = Vec::new();
    play(&req, true, &mut input, &mut out).unwrap();
    let text = String::from_utf8(out).unwrap();
    assert!(text.contains("enter a vertex label"));
    assert!(text.contains("vertex 9 is not live"));
    assert!(text.contains("the mine was"));
}
