//! Input documents: JSON (distance matrix, edge list or generator), a plain
//! CSV square matrix, or generator flags.

use serde_json::Value;

use crate::error::{Error, Result};
use crate::linalg::SymMatrix;
use crate::metric::{
    gen_cycle, gen_discrete, gen_path, gen_random_tree, gen_tree, path_metric, validate_metric,
    Edge, MetricSpace, WeightedGraph,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Auto,
    Json,
    Csv,
}

impl std::str::FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(Format::Auto),
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(Error::Parse(format!("unknown format `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Generator {
    Discrete(usize),
    Cycle(usize),
    /// Edge weights along the path.
    Path(Vec<f64>),
    /// 1-based `(i, j, w)` triples.
    Tree(Vec<(usize, usize, f64)>),
    RandomTree {
        n: usize,
        min: f64,
        max: f64,
        seed: u64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub enum InputKind {
    Matrix(Vec<Vec<f64>>),
    /// 1-based `(i, j, w)` triples.
    EdgeList {
        n: usize,
        edges: Vec<(usize, usize, f64)>,
    },
    Generator(Generator),
}

#[derive(Debug, Clone, PartialEq)]
pub struct InputDocument {
    pub kind: InputKind,
    pub p: Option<f64>,
}

/// The metric space an input describes, plus the graph when there is one.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub label: String,
    pub space: MetricSpace,
    pub graph: Option<WeightedGraph>,
    pub generator: Option<Generator>,
}

pub fn parse_input(text: &str, format: Format) -> Result<InputDocument> {
    let format = match format {
        Format::Auto => {
            if text.trim_start().starts_with('{') {
                Format::Json
            } else {
                Format::Csv
            }
        }
        f => f,
    };
    match format {
        Format::Json => parse_json(text),
        _ => parse_csv(text),
    }
}

fn parse_csv(text: &str) -> Result<InputDocument> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .flexible(true)
        .from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::Parse(e.to_string()))?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        if record.iter().all(|f| f.is_empty()) {
            continue;
        }
        let row = record
            .iter()
            .enumerate()
            .map(|(col, field)| {
                field.parse::<f64>().map_err(|_| {
                    Error::Parse(format!(
                        "line {line}, field {}: `{field}` is not a number",
                        col + 1
                    ))
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push((line, row));
    }
    if rows.is_empty() {
        return Err(Error::Parse("empty input".into()));
    }
    let n = rows.len();
    if let Some((line, row)) = rows.iter().find(|(_, r)| r.len() != n) {
        return Err(Error::Schema(format!(
            "line {line}: expected {n} fields for a {n}×{n} matrix, found {}",
            row.len()
        )));
    }
    Ok(InputDocument {
        kind: InputKind::Matrix(rows.into_iter().map(|(_, r)| r).collect()),
        p: None,
    })
}

fn number(v: &Value, path: &str) -> Result<f64> {
    v.as_f64()
        .ok_or_else(|| Error::Schema(format!("`{path}`: expected a number, found {v}")))
}

fn count(v: &Value, path: &str) -> Result<usize> {
    v.as_u64().map(|x| x as usize).ok_or_else(|| {
        Error::Schema(format!(
            "`{path}`: expected a nonnegative integer, found {v}"
        ))
    })
}

fn array<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>> {
    v.as_array()
        .ok_or_else(|| Error::Schema(format!("`{path}`: expected an array")))
}

fn triples(v: &Value, path: &str) -> Result<Vec<(usize, usize, f64)>> {
    array(v, path)?
        .iter()
        .enumerate()
        .map(|(k, e)| {
            let p = format!("{path}[{k}]");
            let t = array(e, &p)?;
            if t.len() != 3 {
                return Err(Error::Schema(format!(
                    "`{p}`: expected [i, j, w], found {} entries",
                    t.len()
                )));
            }
            let (i, j) = (
                count(&t[0], &format!("{p}[0]"))?,
                count(&t[1], &format!("{p}[1]"))?,
            );
            if i == 0 || j == 0 {
                return Err(Error::Schema(format!("`{p}`: vertex ids are 1-based")));
            }
            Ok((i, j, number(&t[2], &format!("{p}[2]"))?))
        })
        .collect()
}

const GENERATOR_KEYS: [&str; 5] = ["discrete", "cycle", "path", "tree", "random_tree"];

fn parse_json(text: &str) -> Result<InputDocument> {
    let doc: Value = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let obj = doc
        .as_object()
        .ok_or_else(|| Error::Schema("top level must be an object".into()))?;
    let p = obj.get("p").map(|v| number(v, "p")).transpose()?;

    let has_distances = obj.contains_key("distances");
    let has_edges = obj.contains_key("edges");
    let generators: Vec<&str> = GENERATOR_KEYS
        .iter()
        .copied()
        .filter(|k| obj.contains_key(*k))
        .collect();
    let kinds = has_distances as usize + has_edges as usize + generators.len();
    if kinds != 1 {
        return Err(Error::Schema(format!(
            "expected exactly one of `distances`, `edges` or a generator ({}), found {kinds}",
            GENERATOR_KEYS.join(", ")
        )));
    }
    for key in obj.keys() {
        let known = ["n", "p", "distances", "edges"].contains(&key.as_str())
            || GENERATOR_KEYS.contains(&key.as_str());
        if !known {
            return Err(Error::Schema(format!("unknown field `{key}`")));
        }
    }

    let kind = if has_distances {
        let rows = distance_rows(&obj["distances"], obj.get("n"))?;
        InputKind::Matrix(rows)
    } else if has_edges {
        let n = count(
            obj.get("n")
                .ok_or_else(|| Error::Schema("`n` is required with `edges`".into()))?,
            "n",
        )?;
        let edges = triples(&obj["edges"], "edges")?;
        if let Some((k, e)) = edges.iter().enumerate().find(|(_, e)| e.0 > n || e.1 > n) {
            return Err(Error::Schema(format!(
                "`edges[{k}]`: vertex {} exceeds n = {n}",
                e.0.max(e.1)
            )));
        }
        InputKind::EdgeList { n, edges }
    } else {
        let key = generators[0];
        let v = &obj[key];
        InputKind::Generator(match key {
            "discrete" => Generator::Discrete(count(v, key)?),
            "cycle" => Generator::Cycle(count(v, key)?),
            "path" => Generator::Path(
                array(v, key)?
                    .iter()
                    .enumerate()
                    .map(|(k, w)| number(w, &format!("path[{k}]")))
                    .collect::<Result<_>>()?,
            ),
            "tree" => Generator::Tree(triples(v, key)?),
            _ => {
                let field = |name: &str| {
                    v.get(name)
                        .ok_or_else(|| Error::Schema(format!("`random_tree.{name}` is required")))
                };
                Generator::RandomTree {
                    n: count(field("n")?, "random_tree.n")?,
                    min: v
                        .get("min")
                        .map(|x| number(x, "random_tree.min"))
                        .transpose()?
                        .unwrap_or(0.1),
                    max: v
                        .get("max")
                        .map(|x| number(x, "random_tree.max"))
                        .transpose()?
                        .unwrap_or(10.0),
                    seed: v
                        .get("seed")
                        .map(|x| count(x, "random_tree.seed"))
                        .transpose()?
                        .unwrap_or(0) as u64,
                }
            }
        })
    };
    Ok(InputDocument { kind, p })
}

/// Accepts nested rows or a flat row-major list (which then needs `n`).
fn distance_rows(v: &Value, n: Option<&Value>) -> Result<Vec<Vec<f64>>> {
    let items = array(v, "distances")?;
    let nested = items.first().is_some_and(|x| x.is_array());
    let rows: Vec<Vec<f64>> = if nested {
        items
            .iter()
            .enumerate()
            .map(|(i, row)| {
                array(row, &format!("distances[{i}]"))?
                    .iter()
                    .enumerate()
                    .map(|(j, x)| number(x, &format!("distances[{i}][{j}]")))
                    .collect()
            })
            .collect::<Result<_>>()?
    } else {
        let n = match n {
            Some(n) => count(n, "n")?,
            None => {
                return Err(Error::Schema(
                    "`n` is required with a flat `distances` list".into(),
                ))
            }
        };
        if items.len() != n * n {
            return Err(Error::Schema(format!(
                "`distances`: expected {} entries for n = {n}, found {}",
                n * n,
                items.len()
            )));
        }
        let flat: Vec<f64> = items
            .iter()
            .enumerate()
            .map(|(k, x)| number(x, &format!("distances[{k}]")))
            .collect::<Result<_>>()?;
        flat.chunks(n).map(|c| c.to_vec()).collect()
    };
    let m = rows.len();
    if let Some(n) = n {
        let n = count(n, "n")?;
        if n != m {
            return Err(Error::Schema(format!(
                "`n` = {n} but `distances` has {m} rows"
            )));
        }
    }
    if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != m) {
        return Err(Error::Schema(format!(
            "`distances[{i}]`: expected {m} entries, found {}",
            r.len()
        )));
    }
    Ok(rows)
}

fn edges_from_triples(t: &[(usize, usize, f64)]) -> Vec<Edge> {
    t.iter()
        .map(|&(i, j, w)| Edge {
            i: i - 1,
            j: j - 1,
            w,
        })
        .collect()
}

pub fn build_generator(g: &Generator) -> Result<(String, Option<WeightedGraph>, MetricSpace)> {
    let graph = match g {
        Generator::Discrete(n) => return Ok((format!("discrete({n})"), None, gen_discrete(*n)?)),
        Generator::Cycle(n) => gen_cycle(*n)?,
        Generator::Path(w) => gen_path(w.len() + 1, w)?,
        Generator::Tree(t) => gen_tree(edges_from_triples(t))?,
        Generator::RandomTree { n, min, max, seed } => gen_random_tree(*n, (*min, *max), *seed)?,
    };
    let label = match g {
        Generator::Cycle(n) => format!("cycle({n})"),
        Generator::Path(w) => format!("path({})", w.len() + 1),
        Generator::Tree(t) => format!("tree({})", t.len() + 1),
        Generator::RandomTree { n, seed, .. } => format!("random_tree(n={n}, seed={seed})"),
        Generator::Discrete(_) => unreachable!(),
    };
    let space = path_metric(&graph)?;
    Ok((label, Some(graph), space))
}

impl InputDocument {
    /// Builds the metric space (validating it) described by the document.
    pub fn resolve(&self) -> Result<Resolved> {
        match &self.kind {
            InputKind::Matrix(rows) => {
                let space = validate_metric(&SymMatrix::from_rows(rows)?)?;
                Ok(Resolved {
                    label: format!("matrix({})", rows.len()),
                    space,
                    graph: None,
                    generator: None,
                })
            }
            InputKind::EdgeList { n, edges } => {
                let graph = WeightedGraph::new(*n, edges_from_triples(edges))?;
                let space = path_metric(&graph)?;
                Ok(Resolved {
                    label: format!("edges(n={n}, m={})", edges.len()),
                    space,
                    graph: Some(graph),
                    generator: None,
                })
            }
            InputKind::Generator(g) => {
                let (label, graph, space) = build_generator(g)?;
                Ok(Resolved {
                    label,
                    space,
                    graph,
                    generator: Some(g.clone()),
                })
            }
        }
    }
}
