use std::path::PathBuf;
use std::process::Command;

use serde_json::{json, Value};
use tgame_cli::run;

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
        .display()
        .to_string()
}

fn tgame(args: &[&str]) -> (i32, String) {
    run(std::iter::once("tgame").chain(args.iter().copied()))
}

fn json_of(args: &[&str]) -> Value {
    let (code, out) = tgame(args);
    assert_eq!(code, 0, "{out}");
    serde_json::from_str(&out).unwrap()
}

#[test]
fn max_eq_on_two_cycle() {
    let g = fixture("two_cycle.json");
    assert_eq!(json_of(&["max-eq", "--game", &g]), json!({"active": ["A", "B"]}));
    assert_eq!(json_of(&["min-eq", "--game", &g]), json!({"active": []}));
}

#[test]
fn all_eq_methods_agree() {
    let g = fixture("fragile.json");
    let core = tgame(&["all-eq", "--method", "core", "--game", &g]);
    let brute = tgame(&["all-eq", "--method", "brute", "--game", &g]);
    assert_eq!(core.0, 0, "{}", core.1);
    assert_eq!(core, brute);
    let v: Value = serde_json::from_str(&core.1).unwrap();
    assert!(v["count"].as_u64().unwrap() >= 1);

    // the two-cycle has exact ties, which the core method refuses
    let (code, out) = tgame(&["all-eq", "--method", "core", "--game", &fixture("two_cycle.json")]);
    assert_eq!(code, 3);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["code"], "IndifferencePresent");
}

#[test]
fn dynamics_from_zeros_is_min_eq() {
    for f in ["two_cycle.json", "fragile.json", "divergence.game.json"] {
        let g = fixture(f);
        let d = json_of(&["dynamics", "--from", "zeros", "--ties", "0", "--game", &g]);
        let m = json_of(&["min-eq", "--game", &g]);
        assert_eq!(d["active"], m["active"], "{f}");
        let d = json_of(&["dynamics", "--from", "ones", "--ties", "1", "--game", &g]);
        assert_eq!(d["active"], json_of(&["max-eq", "--game", &g])["active"], "{f}");
    }
    let g = fixture("fragile.json");
    let d = json_of(&["dynamics", "--from", &fixture("profile.json"), "--trace", "--game", &g]);
    assert_eq!(d["trace"][0], json!(["C", "D"]));
}

#[test]
fn every_command_is_deterministic() {
    let g = fixture("divergence.game.json");
    let lq = fixture("divergence.lq.json");
    let commands: Vec<Vec<&str>> = vec![
        vec!["validate"],
        vec!["transform", "--eta", "3/2"],
        vec!["kcore", "--k", "2"],
        vec!["kcore", "--k", "1", "--on", "H"],
        vec!["kcore", "--k", "1", "--on", "Htilde"],
        vec!["peel", "--on", "G"],
        vec!["peel"],
        vec!["max-eq"],
        vec!["min-eq"],
        vec!["dynamics", "--trace"],
        vec!["all-eq", "--method", "brute"],
        vec!["seeds"],
        vec!["key-player"],
        vec!["key-player", "--metric", "intercentrality", "--lq", &lq],
        vec!["centrality", "--lq", &lq],
        vec!["centrality", "--phi", "1/10", "--a", "1"],
        vec!["cohesive", "--q", "1/2"],
        vec!["cohesive", "--q", "1/3", "--within", "A,B,C"],
        vec!["perturb", "--edge", "A,E,-1"],
        vec!["perturb", "--threshold", "A,-1/2"],
        vec!["export-dot", "--highlight", "max-eq"],
    ];
    for c in commands {
        let mut args = c.clone();
        args.extend(["--game", &g]);
        let first = tgame(&args);
        assert_eq!(first.0, 0, "{c:?}: {}", first.1);
        assert_eq!(first, tgame(&args), "{c:?}");
    }
}

#[test]
fn key_players_from_fixture() {
    let g = fixture("divergence.game.json");
    let lq = fixture("divergence.lq.json");
    let c = json_of(&["key-player", "--game", &g]);
    let i = json_of(&["key-player", "--metric", "intercentrality", "--lq", &lq, "--game", &g]);
    assert_eq!(c["key_players"], json!(["E"]));
    assert_eq!(i["key_players"], json!(["B"]));
    let (code, out) = tgame(&["key-player", "--metric", "intercentrality", "--game", &g]);
    assert_eq!(code, 2);
    assert!(out.contains("InvalidParams"));
}

#[test]
fn centrality_on_two_cycle() {
    let g = fixture("two_cycle.json");
    let r = json_of(&["centrality", "--lq", &fixture("two_cycle.lq.json"), "--game", &g]);
    assert_eq!(r["bonacich"], json!({"A": "2", "B": "2"}));
    assert_eq!(r["intercentrality"], json!({"A": "3", "B": "3"}));
    let (code, out) = tgame(&["centrality", "--phi", "1", "--game", &g]);
    assert_eq!(code, 3);
    assert!(out.contains("Divergent"));
}

#[test]
fn perturb_reports_the_cascade() {
    let g = fixture("two_cycle.json");
    let r = json_of(&["perturb", "--edge", "A,B,-1/100", "--game", &g]);
    assert_eq!(r["affected"], json!(["A", "B"]));
    assert_eq!(r["monotone"], json!(true));
    assert_eq!(r["change"], json!({"kind": "edge", "src": "A", "dst": "B", "delta": "-1/100"}));
    let (code, _) = tgame(&["perturb", "--edge", "A,B,-2", "--game", &g]);
    assert_eq!(code, 2);
}

#[test]
fn input_errors_are_structured() {
    let (code, out) = tgame(&["max-eq", "--game", &fixture("bad.json")]);
    assert_eq!(code, 2);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["code"], "DuplicateId");
    let diags = v["context"]["diagnostics"].as_array().unwrap();
    assert_eq!(diags.len(), 2);
    assert_eq!(diags[0]["line"], json!(5));
    assert_eq!(diags[1]["code"], "DanglingEdge");
    assert_eq!(diags[1]["line"], json!(8));

    let (code, out) = tgame(&["max-eq", "--game", "/nonexistent/game.json"]);
    assert_eq!(code, 2);
    assert!(out.contains("\"Io\""));
    let (code, _) = tgame(&["max-eq"]);
    assert_eq!(code, 2);
    let (code, out) = tgame(&["no-such-command"]);
    assert_eq!(code, 2);
    assert!(out.contains("Usage"));
    let (code, out) = tgame(&["kcore", "--k", "x", "--game", &fixture("two_cycle.json")]);
    assert_eq!(code, 2);
    assert!(out.contains("BadNumber"));
    let (code, _) = tgame(&["--help"]);
    assert_eq!(code, 0);
}

#[test]
fn binary_exit_codes() {
    let exe = env!("CARGO_BIN_EXE_tgame");
    let ok = Command::new(exe).args(["seeds", "--game", &fixture("fragile.json")]).output().unwrap();
    assert!(ok.status.success());
    assert_eq!(String::from_utf8(ok.stdout).unwrap(), tgame(&["seeds", "--game", &fixture("fragile.json")]).1);
    let bad = Command::new(exe).args(["seeds", "--game", &fixture("bad.json")]).output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn transform_shows_the_shadow() {
    let v = json_of(&["transform", "--game", &fixture("fragile.json")]);
    let nodes = v["nodes"].as_array().unwrap();
    assert_eq!(nodes.len(), 6);
    assert_eq!(nodes[5]["id"], "__shadow__");
    // A has a negative threshold, so it links to the shadow with weight 2
    assert!(v["edges"]
        .as_array()
        .unwrap()
        .contains(&json!({"src": "A", "dst": "__shadow__", "weight": "2"})));
}

/// Checks the subset of the Graphviz grammar the exporter may produce:
/// `digraph ID { stmt* }` with node, edge and `node [...]` statements.
fn valid_dot(text: &str) -> Result<(), String> {
    #[derive(Debug, PartialEq)]
    enum Tok {
        Id(String),
        Sym(char),
        Arrow,
    }
    let mut toks = Vec::new();
    let cs: Vec<char> = text.chars().collect();
    let mut i = 0;
    while i < cs.len() {
        let c = cs[i];
        if c.is_whitespace() {
            i += 1;
        } else if c == '"' {
            let mut s = String::new();
            i += 1;
            loop {
                match cs.get(i) {
                    None => return Err("unterminated string".into()),
                    Some('"') => break,
                    Some('\\') => {
                        s.push(*cs.get(i + 1).ok_or("dangling escape")?);
                        i += 2;
                    }
                    Some(&ch) => {
                        s.push(ch);
                        i += 1;
                    }
                }
            }
            i += 1;
            toks.push(Tok::Id(s));
        } else if c == '-' && cs.get(i + 1) == Some(&'>') {
            toks.push(Tok::Arrow);
            i += 2;
        } else if c.is_alphanumeric() || c == '_' || c == '.' {
            let start = i;
            while i < cs.len() && (cs[i].is_alphanumeric() || cs[i] == '_' || cs[i] == '.') {
                i += 1;
            }
            toks.push(Tok::Id(cs[start..i].iter().collect()));
        } else if "{}[]=;,".contains(c) {
            toks.push(Tok::Sym(c));
            i += 1;
        } else {
            return Err(format!("unexpected {c:?}"));
        }
    }
    let mut p = toks.into_iter().peekable();
    let expect = |p: &mut std::iter::Peekable<std::vec::IntoIter<Tok>>, t: Tok| match p.next() {
        Some(x) if x == t => Ok(()),
        other => Err(format!("expected {t:?}, got {other:?}")),
    };
    expect(&mut p, Tok::Id("digraph".into()))?;
    if matches!(p.peek(), Some(Tok::Id(_))) {
        p.next();
    }
    expect(&mut p, Tok::Sym('{'))?;
    loop {
        match p.next() {
            Some(Tok::Sym('}')) => break,
            Some(Tok::Id(_)) => {
                if p.peek() == Some(&Tok::Arrow) {
                    p.next();
                    match p.next() {
                        Some(Tok::Id(_)) => {}
                        other => return Err(format!("edge target expected, got {other:?}")),
                    }
                }
                if p.peek() == Some(&Tok::Sym('[')) {
                    p.next();
                    loop {
                        match p.next() {
                            Some(Tok::Sym(']')) => break,
                            Some(Tok::Id(_)) => {
                                expect(&mut p, Tok::Sym('='))?;
                                match p.next() {
                                    Some(Tok::Id(_)) => {}
                                    other => return Err(format!("attribute value expected, got {other:?}")),
                                }
                                if matches!(p.peek(), Some(Tok::Sym(',' | ';'))) {
                                    p.next();
                                }
                            }
                            other => return Err(format!("attribute expected, got {other:?}")),
                        }
                    }
                }
                if p.peek() == Some(&Tok::Sym(';')) {
                    p.next();
                }
            }
            other => return Err(format!("statement expected, got {other:?}")),
        }
    }
    match p.next() {
        None => Ok(()),
        Some(t) => Err(format!("trailing {t:?}")),
    }
}

#[test]
fn dot_export_parses() {
    assert!(valid_dot("digraph {").is_err());
    assert!(valid_dot("digraph G { a -> ; }").is_err());
    for f in ["two_cycle.json", "fragile.json", "divergence.game.json"] {
        for h in [None, Some("max-eq"), Some("min-eq"), Some("core")] {
            let g = fixture(f);
            let mut args = vec!["export-dot", "--game", &g];
            if let Some(h) = h {
                args.extend(["--highlight", h]);
            }
            let (code, out) = tgame(&args);
            assert_eq!(code, 0);
            valid_dot(&out).unwrap_or_else(|e| panic!("{f} {h:?}: {e}\n{out}"));
        }
    }
    let (_, out) = tgame(&["export-dot", "--highlight", "max-eq", "--game", &fixture("two_cycle.json")]);
    assert_eq!(out.matches("fillcolor=yellow").count(), 2);
}

#[test]
fn cohesive_regions() {
    let g = fixture("fragile.json");
    let v = json_of(&["cohesive", "--q", "1/2", "--within", "C,D,E", "--game", &g]);
    assert_eq!(v["within"], json!(["C", "D", "E"]));
    // C keeps 1/3 of its weight inside {C, D, E}; D and E keep all of theirs
    assert_eq!(v["cohesive"], json!(["D", "E"]));
    let (code, _) = tgame(&["cohesive", "--q", "1", "--game", &g]);
    assert_eq!(code, 2);
}
