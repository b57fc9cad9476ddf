//! Text and JSON formats for spaces, functions and sets.
//!
//! * edge list: `x y w` per line (whitespace separated, `w` defaults to 1),
//!   `#` starts a comment; vertices are numbered in order of appearance.
//! * point cloud: `id c_1 … c_d mass` per line.
//! * functions: CSV `state,value`, optional header.
//! * sets: state names separated by whitespace or commas.
//! * spaces: JSON with `schema`, `states`, `measure`, `jump` and
//!   `provenance`; jump rows are lists of `[target, probability]`.

use std::fs;
use std::path::Path;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::geometry::NodeSet;
use crate::scalar::Scalar;
use crate::space::{EdgeWeightGraph, KernelGridConfig, Provenance, RandomWalkSpace};

pub const SCHEMA_VERSION: u64 = 1;

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, line)| {
        let line = line.split('#').next().unwrap_or("").trim();
        (!line.is_empty()).then_some((i + 1, line))
    })
}

fn line_error(line: usize, msg: impl std::fmt::Display) -> Error {
    Error::Parse(format!("line {line}: {msg}"))
}

pub fn parse_edge_list<S: Scalar>(text: &str) -> Result<EdgeWeightGraph<S>> {
    let mut g = EdgeWeightGraph::new();
    for (no, line) in content_lines(text) {
        let fields: Vec<&str> = line.split_whitespace().collect();
        let weight = match fields.len() {
            2 => S::one(),
            3 => S::parse_value(fields[2]).map_err(|_| line_error(no, "bad weight"))?,
            _ => return Err(line_error(no, "expected `x y [w]`")),
        };
        g.add_named_edge(fields[0], fields[1], weight);
    }
    if g.vertices.is_empty() {
        return Err(Error::Parse("edge list is empty".into()));
    }
    Ok(g)
}

pub fn read_edge_list<S: Scalar>(path: &Path) -> Result<EdgeWeightGraph<S>> {
    parse_edge_list(&fs::read_to_string(path)?)
}

/// Points of a cloud: names, coordinates and masses.
#[derive(Clone, Debug)]
pub struct PointCloud<S> {
    pub ids: Vec<String>,
    pub coords: Vec<Vec<f64>>,
    pub masses: Vec<S>,
}

pub fn parse_point_cloud<S: Scalar>(text: &str) -> Result<PointCloud<S>> {
    let mut cloud = PointCloud {
        ids: Vec::new(),
        coords: Vec::new(),
        masses: Vec::new(),
    };
    let mut dim = None;
    for (no, line) in content_lines(text) {
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() < 3 {
            return Err(line_error(no, "expected `id c_1 ... c_d mass`"));
        }
        let d = fields.len() - 2;
        if *dim.get_or_insert(d) != d {
            return Err(line_error(no, "inconsistent dimension"));
        }
        let coords = fields[1..=d]
            .iter()
            .map(|c| c.parse::<f64>().map_err(|_| line_error(no, "bad coordinate")))
            .collect::<Result<Vec<_>>>()?;
        let mass = S::parse_value(fields[d + 1]).map_err(|_| line_error(no, "bad mass"))?;
        cloud.ids.push(fields[0].to_string());
        cloud.coords.push(coords);
        cloud.masses.push(mass);
    }
    if cloud.ids.is_empty() {
        return Err(Error::Parse("point cloud is empty".into()));
    }
    Ok(cloud)
}

pub fn read_point_cloud<S: Scalar>(path: &Path) -> Result<PointCloud<S>> {
    parse_point_cloud(&fs::read_to_string(path)?)
}

pub fn read_kernel_grid(path: &Path) -> Result<KernelGridConfig> {
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}

pub fn space_to_json<S: Scalar>(space: &RandomWalkSpace<S>) -> Value {
    let jump: Vec<Value> = space
        .jump()
        .iter()
        .map(|row| {
            Value::Array(
                row.iter()
                    .map(|(y, p)| json!([y, p.to_json()]))
                    .collect(),
            )
        })
        .collect();
    json!({
        "schema": SCHEMA_VERSION,
        "exact": S::EXACT,
        "states": space.states(),
        "measure": space.measure().iter().map(|m| m.to_json()).collect::<Vec<_>>(),
        "jump": jump,
        "provenance": space.provenance(),
    })
}

pub fn space_from_json<S: Scalar>(value: &Value) -> Result<RandomWalkSpace<S>> {
    let schema = value.get("schema").and_then(Value::as_u64);
    if schema != Some(SCHEMA_VERSION) {
        return Err(Error::Parse(format!(
            "unsupported space schema {:?}",
            value.get("schema")
        )));
    }
    let field = |name: &str| {
        value
            .get(name)
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Parse(format!("space JSON needs an array `{name}`")))
    };
    let states = field("states")?
        .iter()
        .map(|s| {
            s.as_str()
                .map(str::to_string)
                .ok_or_else(|| Error::Parse("state names must be strings".into()))
        })
        .collect::<Result<Vec<_>>>()?;
    let measure = field("measure")?
        .iter()
        .map(S::from_json)
        .collect::<Result<Vec<_>>>()?;
    let jump = field("jump")?
        .iter()
        .map(|row| {
            row.as_array()
                .ok_or_else(|| Error::Parse("jump rows must be arrays".into()))?
                .iter()
                .map(|entry| match entry.as_array().map(Vec::as_slice) {
                    Some([y, p]) => {
                        let y = y
                            .as_u64()
                            .ok_or_else(|| Error::Parse("jump target must be an index".into()))?;
                        Ok((y as usize, S::from_json(p)?))
                    }
                    _ => Err(Error::Parse("jump entries are [target, probability]".into())),
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let provenance = match value.get("provenance") {
        Some(p) => serde_json::from_value(p.clone())?,
        None => Provenance::new("json"),
    };
    RandomWalkSpace::from_parts(states, jump, measure, provenance)
}

pub fn read_space<S: Scalar>(path: &Path) -> Result<RandomWalkSpace<S>> {
    let value: Value = serde_json::from_str(&fs::read_to_string(path)?)?;
    space_from_json(&value)
}

pub fn write_space<S: Scalar>(space: &RandomWalkSpace<S>, path: &Path) -> Result<()> {
    fs::write(path, serde_json::to_string_pretty(&space_to_json(space))?)?;
    Ok(())
}

/// Reads `state,value` records; every state must appear exactly once.
pub fn parse_node_function<S: Scalar>(space: &RandomWalkSpace<S>, text: &str) -> Result<Vec<S>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes());
    let mut values: Vec<Option<S>> = vec![None; space.n()];
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Parse(e.to_string()))?;
        if record.len() != 2 {
            return Err(Error::Parse(format!("record {}: expected `state,value`", i + 1)));
        }
        let value = match S::parse_value(&record[1]) {
            Ok(v) => v,
            Err(_) if i == 0 => continue,
            Err(e) => return Err(e),
        };
        let x = space
            .state_index(&record[0])
            .ok_or_else(|| Error::Parse(format!("unknown state `{}`", &record[0])))?;
        if values[x].replace(value).is_some() {
            return Err(Error::Parse(format!("state `{}` given twice", &record[0])));
        }
    }
    values
        .into_iter()
        .enumerate()
        .map(|(x, v)| {
            v.ok_or_else(|| Error::Parse(format!("no value for state `{}`", space.states()[x])))
        })
        .collect()
}

pub fn read_node_function<S: Scalar>(space: &RandomWalkSpace<S>, path: &Path) -> Result<Vec<S>> {
    parse_node_function(space, &fs::read_to_string(path)?)
}

pub fn node_function_csv<S: Scalar>(space: &RandomWalkSpace<S>, u: &[S]) -> Result<String> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer
        .write_record(["state", "value"])
        .map_err(|e| Error::internal(e.to_string()))?;
    for (name, v) in space.states().iter().zip(u) {
        writer
            .write_record([name.as_str(), &v.to_string()])
            .map_err(|e| Error::internal(e.to_string()))?;
    }
    let bytes = writer.into_inner().map_err(|e| Error::internal(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::internal(e.to_string()))
}

pub fn parse_node_set<S>(space: &RandomWalkSpace<S>, text: &str) -> Result<NodeSet>
where
    S: Scalar,
{
    let names: Vec<&str> = content_lines(text)
        .flat_map(|(_, line)| line.split(|c: char| c.is_whitespace() || c == ','))
        .filter(|s| !s.is_empty())
        .collect();
    space.set_from_names(names)
}

pub fn read_node_set<S: Scalar>(space: &RandomWalkSpace<S>, path: &Path) -> Result<NodeSet> {
    parse_node_set(space, &fs::read_to_string(path)?)
}

/// Values in state order as JSON.
pub fn function_json<S: Scalar>(u: &[S]) -> Value {
    Value::Array(u.iter().map(Scalar::to_json).collect())
}

/// Member names of a set as JSON.
pub fn set_json<S: Scalar>(space: &RandomWalkSpace<S>, set: &NodeSet) -> Value {
    json!(set.names(space))
}
