//! The JSON game file and its companions (linear-quadratic parameters,
//! action profiles).
//!
//! ```json
//! {
//!   "version": 1,
//!   "nodes": [{"id": "A", "threshold": "1/2"}, {"id": "B", "threshold": "-1"}],
//!   "edges": [{"src": "A", "dst": "B", "weight": "1.98"}],
//!   "metadata": {}
//! }
//! ```
//!
//! Numbers are exact: strings holding `p/q`, integers or decimals, or bare
//! JSON numbers (read from their literal text, never through a float).

use std::collections::{BTreeMap, HashMap};

use serde_json::{json, Map, Value};
use tgame::transform::SHADOW_LABEL;
use tgame::{ActionProfile, LinearQuadraticParams, Network, Rational, ThresholdGame};

use crate::locate::Locator;

pub const FORMAT_VERSION: u64 = 1;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub code: &'static str,
    pub message: String,
    /// Path of the offending value, e.g. `edges[3].weight`.
    pub path: String,
    pub line: Option<usize>,
    pub column: Option<usize>,
}

impl Diagnostic {
    fn new(code: &'static str, path: impl Into<String>, message: impl Into<String>) -> Self {
        Diagnostic {
            code,
            message: message.into(),
            path: path.into(),
            line: None,
            column: None,
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "code": self.code,
            "message": self.message,
            "path": self.path,
            "line": self.line,
            "column": self.column,
        })
    }
}

/// A parsed game file: the game plus whatever metadata it carried.
#[derive(Debug, Clone, PartialEq)]
pub struct GameFile {
    pub game: ThresholdGame,
    pub metadata: Map<String, Value>,
}

fn with_positions(text: &str, mut diags: Vec<Diagnostic>) -> Vec<Diagnostic> {
    let loc = Locator::new(text);
    for d in &mut diags {
        if let Some(p) = loc.find(&d.path) {
            d.line = Some(p.line);
            d.column = Some(p.column);
        }
    }
    diags
}

fn syntax_error(e: &serde_json::Error) -> Diagnostic {
    Diagnostic {
        code: "ParseError",
        message: e.to_string(),
        path: String::new(),
        line: Some(e.line()),
        column: Some(e.column()),
    }
}

/// Reads an exact number from a string or JSON number.
pub fn number(v: &Value) -> Result<Rational, String> {
    match v {
        Value::String(s) => s.parse().map_err(|e| format!("{e}")),
        Value::Number(n) => n.to_string().parse().map_err(|e| format!("{e}")),
        other => Err(format!("expected a number or numeric string, found {other}")),
    }
}

pub fn number_json(r: &Rational) -> Value {
    Value::String(r.to_string())
}

fn field<'a>(obj: &'a Map<String, Value>, key: &str, path: &str, diags: &mut Vec<Diagnostic>) -> Option<&'a Value> {
    let v = obj.get(key);
    if v.is_none() {
        diags.push(Diagnostic::new("MissingField", path, format!("missing field {key:?}")));
    }
    v
}

fn string_field(obj: &Map<String, Value>, key: &str, path: &str, diags: &mut Vec<Diagnostic>) -> Option<String> {
    match field(obj, key, path, diags)? {
        Value::String(s) => Some(s.clone()),
        _ => {
            diags.push(Diagnostic::new("TypeError", format!("{path}.{key}"), format!("{key:?} must be a string")));
            None
        }
    }
}

fn number_field(obj: &Map<String, Value>, key: &str, path: &str, diags: &mut Vec<Diagnostic>) -> Option<Rational> {
    let v = field(obj, key, path, diags)?;
    match number(v) {
        Ok(r) => Some(r),
        Err(e) => {
            diags.push(Diagnostic::new("BadNumber", format!("{path}.{key}"), e));
            None
        }
    }
}

fn array<'a>(root: &'a Map<String, Value>, key: &str, diags: &mut Vec<Diagnostic>) -> &'a [Value] {
    match root.get(key) {
        Some(Value::Array(a)) => a,
        Some(_) => {
            diags.push(Diagnostic::new("TypeError", key, format!("{key:?} must be an array")));
            &[]
        }
        None if key == "edges" => &[],
        None => {
            diags.push(Diagnostic::new("MissingField", "", format!("missing field {key:?}")));
            &[]
        }
    }
}

fn object<'a>(v: &'a Value, path: &str, diags: &mut Vec<Diagnostic>) -> Option<&'a Map<String, Value>> {
    match v {
        Value::Object(o) => Some(o),
        _ => {
            diags.push(Diagnostic::new("TypeError", path, "expected an object"));
            None
        }
    }
}

/// Parses and validates a game file. Every problem found is reported, each
/// with the line and column of the offending value.
pub fn parse_game(text: &str) -> Result<GameFile, Vec<Diagnostic>> {
    let root: Value = serde_json::from_str(text).map_err(|e| vec![syntax_error(&e)])?;
    let mut diags = Vec::new();
    let Some(root) = object(&root, "", &mut diags) else {
        return Err(with_positions(text, diags));
    };
    match root.get("version") {
        Some(Value::Number(n)) if n.as_u64() == Some(FORMAT_VERSION) => {}
        Some(v) => diags.push(Diagnostic::new(
            "UnsupportedVersion",
            "version",
            format!("unsupported version {v}, expected {FORMAT_VERSION}"),
        )),
        None => diags.push(Diagnostic::new("MissingField", "", "missing field \"version\"")),
    }

    let mut ids: HashMap<String, usize> = HashMap::new();
    let mut labels = Vec::new();
    let mut thresholds = Vec::new();
    for (i, node) in array(root, "nodes", &mut diags).iter().enumerate() {
        let path = format!("nodes[{i}]");
        let Some(node) = object(node, &path, &mut diags) else { continue };
        let id = string_field(node, "id", &path, &mut diags);
        let k = number_field(node, "threshold", &path, &mut diags);
        let Some(id) = id else { continue };
        if id == SHADOW_LABEL {
            diags.push(Diagnostic::new(
                "ReservedLabel",
                format!("{path}.id"),
                format!("node id {id:?} is reserved"),
            ));
            continue;
        }
        if ids.contains_key(&id) {
            diags.push(Diagnostic::new(
                "DuplicateId",
                format!("{path}.id"),
                format!("node id {id:?} is declared more than once"),
            ));
            continue;
        }
        ids.insert(id.clone(), labels.len());
        labels.push(id);
        thresholds.push(k.unwrap_or_default());
    }

    let mut b = Network::builder();
    for l in &labels {
        b.agent(l.clone()).expect("ids checked unique");
    }
    let mut seen: HashMap<(usize, usize), usize> = HashMap::new();
    for (e, edge) in array(root, "edges", &mut diags).iter().enumerate() {
        let path = format!("edges[{e}]");
        let Some(edge) = object(edge, &path, &mut diags) else { continue };
        let src = string_field(edge, "src", &path, &mut diags);
        let dst = string_field(edge, "dst", &path, &mut diags);
        let w = number_field(edge, "weight", &path, &mut diags);
        let (Some(src), Some(dst), Some(w)) = (src, dst, w) else { continue };
        let mut endpoint = |key: &str, label: &str| match ids.get(label) {
            Some(&i) => Some(i),
            None => {
                diags.push(Diagnostic::new(
                    "DanglingEdge",
                    format!("{path}.{key}"),
                    format!("edge {src:?} -> {dst:?} refers to undeclared node {label:?}"),
                ));
                None
            }
        };
        let (Some(s), Some(d)) = (endpoint("src", &src), endpoint("dst", &dst)) else { continue };
        if !w.is_positive() {
            diags.push(Diagnostic::new(
                "NonpositiveWeight",
                format!("{path}.weight"),
                format!("edge {src:?} -> {dst:?} has weight {w}, weights must be positive"),
            ));
            continue;
        }
        if s == d {
            diags.push(Diagnostic::new("SelfLoop", &path, format!("self-loop at {src:?}")));
            continue;
        }
        if let Some(first) = seen.insert((s, d), e) {
            diags.push(Diagnostic::new(
                "DuplicateEdge",
                &path,
                format!("edge {src:?} -> {dst:?} already declared at edges[{first}]"),
            ));
            continue;
        }
        b.edge(tgame::AgentId::new(s), tgame::AgentId::new(d), w).expect("edge checked");
    }

    let metadata = match root.get("metadata") {
        None | Some(Value::Null) => Map::new(),
        Some(Value::Object(m)) => m.clone(),
        Some(_) => {
            diags.push(Diagnostic::new("TypeError", "metadata", "\"metadata\" must be an object"));
            Map::new()
        }
    };
    if !diags.is_empty() {
        return Err(with_positions(text, diags));
    }
    let game = ThresholdGame::new(b.build(), thresholds).expect("one threshold per node");
    Ok(GameFile { game, metadata })
}

/// Canonical document: sorted keys, nodes in declaration order, edges by
/// source then target, every number as an exact string.
pub fn game_to_json(game: &ThresholdGame, metadata: &Map<String, Value>) -> Value {
    let net = game.network();
    let nodes: Vec<Value> = net
        .agents()
        .map(|i| json!({"id": net.label(i), "threshold": number_json(game.threshold(i))}))
        .collect();
    json!({
        "version": FORMAT_VERSION,
        "nodes": nodes,
        "edges": edges_json(net),
        "metadata": metadata,
    })
}

pub fn edges_json(net: &Network) -> Vec<Value> {
    let mut edges: Vec<_> = net.edges().collect();
    edges.sort_by_key(|(s, d, _)| (*s, *d));
    edges
        .into_iter()
        .map(|(s, d, w)| json!({"src": net.label(s), "dst": net.label(d), "weight": number_json(w)}))
        .collect()
}

pub fn save_game(file: &GameFile) -> String {
    render(&game_to_json(&file.game, &file.metadata))
}

/// Pretty JSON with a trailing newline. Keys come out sorted because
/// `serde_json::Map` is ordered.
pub fn render(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values always serialise");
    s.push('\n');
    s
}

fn per_agent(root: &Map<String, Value>, key: &str, net: &Network, diags: &mut Vec<Diagnostic>) -> Vec<Rational> {
    let Some(map) = root.get(key) else {
        diags.push(Diagnostic::new("MissingField", "", format!("missing field {key:?}")));
        return Vec::new();
    };
    let Some(map) = object(map, key, diags) else { return Vec::new() };
    for id in map.keys() {
        if net.agent(id).is_err() {
            diags.push(Diagnostic::new("NotFound", format!("{key}.{id}"), format!("unknown agent {id:?}")));
        }
    }
    net.labels()
        .iter()
        .map(|l| match map.get(l) {
            Some(v) => number(v).unwrap_or_else(|e| {
                diags.push(Diagnostic::new("BadNumber", format!("{key}.{l}"), e));
                Rational::zero()
            }),
            None => {
                diags.push(Diagnostic::new("MissingField", key, format!("no {key} value for agent {l:?}")));
                Rational::zero()
            }
        })
        .collect()
}

/// `{"a": {id: num}, "c": {...}, "phi": {...}}` with an entry for every agent.
pub fn parse_lq(text: &str, net: &Network) -> Result<LinearQuadraticParams, Vec<Diagnostic>> {
    let root: Value = serde_json::from_str(text).map_err(|e| vec![syntax_error(&e)])?;
    let mut diags = Vec::new();
    let Some(root) = object(&root, "", &mut diags) else {
        return Err(with_positions(text, diags));
    };
    let a = per_agent(root, "a", net, &mut diags);
    let c = per_agent(root, "c", net, &mut diags);
    let phi = per_agent(root, "phi", net, &mut diags);
    if !diags.is_empty() {
        return Err(with_positions(text, diags));
    }
    LinearQuadraticParams::new(a, c, phi).map_err(|e| vec![Diagnostic::new("InvalidParams", "", e.to_string())])
}

pub fn lq_to_json(lq: &LinearQuadraticParams, net: &Network) -> Value {
    let col = |v: &[Rational]| -> BTreeMap<&str, Value> {
        net.labels().iter().map(|l| l.as_str()).zip(v.iter().map(number_json)).collect()
    };
    json!({"a": col(&lq.a), "c": col(&lq.c), "phi": col(&lq.phi)})
}

/// `{id: 0 | 1}`; agents not mentioned play 0.
pub fn parse_profile(text: &str, net: &Network) -> Result<ActionProfile, Vec<Diagnostic>> {
    let root: Value = serde_json::from_str(text).map_err(|e| vec![syntax_error(&e)])?;
    let mut diags = Vec::new();
    let mut x = ActionProfile::zeros(net.len());
    if let Some(map) = object(&root, "", &mut diags) {
        for (id, v) in map {
            let Ok(i) = net.agent(id) else {
                diags.push(Diagnostic::new("NotFound", id.clone(), format!("unknown agent {id:?}")));
                continue;
            };
            match v.as_u64() {
                Some(0) => x.set(i, false),
                Some(1) => x.set(i, true),
                _ => diags.push(Diagnostic::new("TypeError", id.clone(), "actions must be 0 or 1")),
            }
        }
    }
    if diags.is_empty() {
        Ok(x)
    } else {
        Err(with_positions(text, diags))
    }
}
