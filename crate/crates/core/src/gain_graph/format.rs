use super::{GainGraph, VertexKind};
use crate::cyclic::CyclicGroup;
use crate::{Error, Result};

/// Parses the line-based text format:
///
/// ```text
/// group 6
/// vertex v0 fixed
/// vertex u free
/// edge v0 u 0
/// ```
///
/// `#` starts a comment. The `group` line must come first.
pub fn parse(text: &str) -> Result<GainGraph> {
    let mut graph: Option<GainGraph> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("");
        let tokens: Vec<&str> = content.split_whitespace().collect();
        if tokens.is_empty() {
            continue;
        }
        let err = |message: String| Error::Parse { line, message };
        let g = match (&mut graph, tokens[0]) {
            (None, "group") => {
                if tokens.len() != 2 {
                    return Err(err("expected `group <k>`".into()));
                }
                let k: u32 = tokens[1]
                    .parse()
                    .map_err(|_| err(format!("bad group order {:?}", tokens[1])))?;
                let group = CyclicGroup::new(k).map_err(|e| err(e.to_string()))?;
                graph = Some(GainGraph::new(group));
                continue;
            }
            (None, _) => return Err(err("first line must be `group <k>`".into())),
            (Some(_), "group") => return Err(err("duplicate group line".into())),
            (Some(g), _) => g,
        };
        match tokens[0] {
            "vertex" => {
                if tokens.len() != 3 {
                    return Err(err("expected `vertex <name> <free|fixed>`".into()));
                }
                let kind = match tokens[2] {
                    "free" => VertexKind::Free,
                    "fixed" => VertexKind::Fixed,
                    other => return Err(err(format!("unknown vertex kind {other:?}"))),
                };
                g.add_vertex(tokens[1], kind)
                    .map_err(|e| err(e.to_string()))?;
            }
            "edge" => {
                if tokens.len() != 4 {
                    return Err(err("expected `edge <tail> <head> <gain>`".into()));
                }
                let gain: i64 = tokens[3]
                    .parse()
                    .map_err(|_| err(format!("bad gain {:?}", tokens[3])))?;
                if gain < 0 || gain >= g.k() as i64 {
                    return Err(err(format!(
                        "gain out of range: {gain} not in 0..{}",
                        g.k()
                    )));
                }
                g.add_edge_by_name(tokens[1], tokens[2], gain as u32)
                    .map_err(|e| err(e.to_string()))?;
            }
            other => return Err(err(format!("unknown directive {other:?}"))),
        }
    }
    graph.ok_or(Error::Parse {
        line: 0,
        message: "missing `group <k>` line".into(),
    })
}

pub fn serialize(g: &GainGraph) -> String {
    let mut out = format!("group {}\n", g.k());
    for v in g.vertices() {
        let kind = match v.kind {
            VertexKind::Free => "free",
            VertexKind::Fixed => "fixed",
        };
        out.push_str(&format!("vertex {} {}\n", v.name, kind));
    }
    for e in g.edges() {
        out.push_str(&format!(
            "edge {} {} {}\n",
            g.name(e.tail),
            g.name(e.head),
            e.gain
        ));
    }
    out
}
