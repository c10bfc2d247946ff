//! Instance file formats.
//!
//! Graph files are line based: `#` comments, a `base <id>` header, then one
//! `u v [w]` edge per line. Boundary models use `key=value` lines. Action
//! files declare the space kind and one generator per line. Annulus files
//! give the two prefix lists.

use crate::action::{Action, BoundaryAction, CayleyAction, GraphAction};
use crate::annulus::Annulus;
use crate::boundary::{BoundaryModel, Zeta};
use crate::clopen::ClopenSet;
use crate::error::{Error, Result};
use crate::free::FreeWord;
use crate::graph::MetricGraph;
use crate::rat::Rat;
use std::path::Path;

fn parse_err(file: &str, line: usize, msg: impl ToString) -> Error {
    Error::Parse {
        file: file.to_string(),
        line,
        msg: msg.to_string(),
    }
}

pub fn parse_graph(text: &str, file: &str) -> Result<MetricGraph> {
    let mut base: Option<String> = None;
    let mut edges: Vec<(String, String, u64)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split_whitespace().collect();
        match parts.as_slice() {
            ["base", id] => base = Some(id.to_string()),
            [u, v] => edges.push((u.to_string(), v.to_string(), 1)),
            [u, v, w] => {
                let weight: u64 = w
                    .parse()
                    .map_err(|_| parse_err(file, i + 1, format!("bad weight `{w}`")))?;
                edges.push((u.to_string(), v.to_string(), weight));
            }
            _ => return Err(parse_err(file, i + 1, "expected `base <id>` or `u v [w]`")),
        }
    }
    let base = base.ok_or_else(|| parse_err(file, 0, "missing `base <id>` line"))?;
    MetricGraph::new(&edges, &base)
}

pub fn write_graph(g: &MetricGraph) -> String {
    let mut out = String::new();
    out.push_str(&format!("base {}\n", g.name(g.basepoint())));
    let mut lines = Vec::new();
    for u in g.vertices() {
        for &(v, w) in g.neighbors(u) {
            if u < v {
                if w == 1 {
                    lines.push(format!("{} {}", g.name(u), g.name(v)));
                } else {
                    lines.push(format!("{} {} {}", g.name(u), g.name(v), w));
                }
            }
        }
    }
    lines.sort();
    for l in lines {
        out.push_str(&l);
        out.push('\n');
    }
    out
}

pub fn parse_boundary(text: &str, file: &str) -> Result<BoundaryModel> {
    let mut depth: Option<usize> = None;
    let mut buffer: Option<usize> = None;
    let mut zeta = Zeta::Ln2;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| parse_err(file, i + 1, "expected key=value"))?;
        match k.trim() {
            "alphabet" => {
                if v.trim() != "f2" {
                    return Err(parse_err(file, i + 1, "only alphabet=f2 is supported"));
                }
            }
            "depth" => {
                depth = Some(
                    v.trim()
                        .parse()
                        .map_err(|_| parse_err(file, i + 1, "bad depth"))?,
                )
            }
            "buffer" => {
                buffer = Some(
                    v.trim()
                        .parse()
                        .map_err(|_| parse_err(file, i + 1, "bad buffer"))?,
                )
            }
            "zeta" => {
                let v = v.trim();
                if v == "ln2" {
                    zeta = Zeta::Ln2;
                } else {
                    let (p, q) = v
                        .split_once('/')
                        .ok_or_else(|| parse_err(file, i + 1, "zeta must be ln2 or p/q"))?;
                    let p: i64 = p
                        .parse()
                        .map_err(|_| parse_err(file, i + 1, "bad zeta numerator"))?;
                    let q: i64 = q
                        .parse()
                        .map_err(|_| parse_err(file, i + 1, "bad zeta denominator"))?;
                    if p <= 0 || q <= 0 {
                        return Err(parse_err(file, i + 1, "zeta must be positive"));
                    }
                    zeta = Zeta::Rational(Rat::new(p, q));
                }
            }
            other => return Err(parse_err(file, i + 1, format!("unknown key `{other}`"))),
        }
    }
    let depth = depth.ok_or_else(|| parse_err(file, 0, "missing depth"))?;
    let buffer = buffer.unwrap_or(depth);
    Ok(BoundaryModel::new_f2(depth, buffer)?.with_zeta(zeta))
}

pub fn write_boundary(depth: usize, buffer: usize, zeta: &Zeta) -> String {
    let z = match zeta {
        Zeta::Ln2 => "ln2".to_string(),
        Zeta::Rational(r) => format!("{}/{}", r.numer(), r.denom()),
    };
    format!("alphabet=f2\ndepth={depth}\nbuffer={buffer}\nzeta={z}\n")
}

/// What kind of space an action file declares.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpaceKind {
    Boundary,
    Cayley,
    Torus { side: usize },
    Graph,
}

pub struct ActionSpec {
    pub action: Action,
    pub kind: SpaceKind,
}

/// Action files:
/// ```text
/// space boundary | space cayley | space torus <side> | space graph
/// gen <name> leftmul <word>          # boundary, cayley
/// gen <name> perm <i0>,<i1>,...      # graph spaces, vertex-index order
/// ```
pub fn parse_action_spec(
    text: &str,
    file: &str,
    graph: Option<&MetricGraph>,
) -> Result<ActionSpec> {
    let mut space: Option<String> = None;
    let mut leftmuls: Vec<(String, FreeWord)> = Vec::new();
    let mut perms: Vec<(String, Vec<usize>)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split_whitespace().collect();
        match parts.as_slice() {
            ["space", rest @ ..] => space = Some(rest.join(" ")),
            ["gen", name, "leftmul", word] => {
                leftmuls.push((name.to_string(), FreeWord::parse_f2(word)?));
            }
            ["gen", name, "perm", data] => {
                let mut p = Vec::new();
                for tok in data.split(',') {
                    p.push(
                        tok.trim()
                            .parse::<usize>()
                            .map_err(|_| parse_err(file, i + 1, "bad permutation entry"))?,
                    );
                }
                perms.push((name.to_string(), p));
            }
            _ => return Err(parse_err(file, i + 1, "unrecognized action line")),
        }
    }
    let space = space.ok_or_else(|| parse_err(file, 0, "missing `space` line"))?;
    let mut words = space.split_whitespace();
    let head = words.next().unwrap_or("");
    match head {
        "boundary" => Ok(ActionSpec {
            action: Action::Boundary(BoundaryAction::new(leftmuls)),
            kind: SpaceKind::Boundary,
        }),
        "cayley" => Ok(ActionSpec {
            action: Action::Cayley(CayleyAction::from_gens(leftmuls)),
            kind: SpaceKind::Cayley,
        }),
        "torus" => {
            let side: usize = words
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| parse_err(file, 0, "torus space needs a side length"))?;
            let graph = graph.ok_or_else(|| {
                parse_err(file, 0, "graph actions need the graph file loaded first")
            })?;
            Ok(ActionSpec {
                action: Action::Graph(GraphAction::new(graph, perms)?),
                kind: SpaceKind::Torus { side },
            })
        }
        "graph" => {
            let graph = graph.ok_or_else(|| {
                parse_err(file, 0, "graph actions need the graph file loaded first")
            })?;
            Ok(ActionSpec {
                action: Action::Graph(GraphAction::new(graph, perms)?),
                kind: SpaceKind::Graph,
            })
        }
        other => Err(parse_err(file, 0, format!("unknown space `{other}`"))),
    }
}

pub fn parse_action(text: &str, file: &str, graph: Option<&MetricGraph>) -> Result<Action> {
    Ok(parse_action_spec(text, file, graph)?.action)
}

pub fn write_boundary_action(gens: &[(String, FreeWord)]) -> String {
    let mut out = String::from("space boundary\n");
    for (name, w) in gens {
        out.push_str(&format!("gen {name} leftmul {w}\n"));
    }
    out
}

pub fn write_torus_action(side: usize, gens: &[(String, Vec<usize>)]) -> String {
    let mut out = format!("space torus {side}\n");
    for (name, p) in gens {
        let data: Vec<String> = p.iter().map(|x| x.to_string()).collect();
        out.push_str(&format!("gen {name} perm {}\n", data.join(",")));
    }
    out
}

/// `minus=<prefix list>` and `plus=<prefix list>`, comma separated.
pub fn parse_annulus(text: &str, file: &str) -> Result<Annulus> {
    let mut minus: Option<ClopenSet> = None;
    let mut plus: Option<ClopenSet> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| parse_err(file, i + 1, "expected key=value"))?;
        let mut prefixes = Vec::new();
        for tok in v.split(',') {
            prefixes.push(FreeWord::parse_f2(tok.trim())?);
        }
        let set = ClopenSet::from_prefixes(prefixes);
        match k.trim() {
            "minus" => minus = Some(set),
            "plus" => plus = Some(set),
            other => return Err(parse_err(file, i + 1, format!("unknown key `{other}`"))),
        }
    }
    let minus = minus.ok_or_else(|| parse_err(file, 0, "missing minus"))?;
    let plus = plus.ok_or_else(|| parse_err(file, 0, "missing plus"))?;
    Annulus::new(minus, plus)
}

pub fn read_to_string(path: &Path) -> Result<String> {
    Ok(std::fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graph_roundtrip() {
        let text = "# a triangle\nbase x\nx y\ny z 2\nz x\n";
        let g = parse_graph(text, "t").unwrap();
        assert_eq!(g.vertex_count(), 3);
        assert_eq!(g.distance_by_name("x", "z").unwrap(), 1);
        assert_eq!(g.distance_by_name("y", "z").unwrap(), 2);
        let rendered = write_graph(&g);
        let g2 = parse_graph(&rendered, "t2").unwrap();
        assert_eq!(g2.distance_by_name("y", "z").unwrap(), 2);
        assert_eq!(write_graph(&g2), rendered);
    }

    #[test]
    fn boundary_and_action_files_parse() {
        let m = parse_boundary("alphabet=f2\ndepth=3\nbuffer=7\nzeta=ln2\n", "b").unwrap();
        assert_eq!(m.depth(), 3);
        assert_eq!(m.buffer(), 7);
        let a = parse_action(
            "space boundary\ngen a leftmul a\ngen b leftmul b\n",
            "a",
            None,
        )
        .unwrap();
        assert_eq!(a.generator_count(), 2);
        assert!(parse_boundary("alphabet=f3\ndepth=2", "b").is_err());
    }
}
