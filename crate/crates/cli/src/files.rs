//! JSON documents: instance files in, front files out.
//!
//! An instance file looks like
//!
//! ```json
//! {"format": "bmfni-v1",
//!  "graph": {"sp": "S(arc(a),P(arc(b),arc(c)))"},
//!  "arcs": {"a": {"u1": 4, "u2": 9, "c": 1}, "b": {"u1": 2, "u2": 3, "c": 1}, "c": {"u1": 5, "u2": 1, "c": 1}},
//!  "budget": 1}
//! ```
//!
//! or uses `"graph": {"edges": [{"id": "a", "tail": "s", "head": "v"}, …], "source": "s", "sink": "t"}`.
//! Arcs are numbered in graph order: first appearance in the expression, or
//! position in the edge list. An optional `"threshold": {"v1", "v2"}` feeds
//! `decide`, and an optional `"knapsack": {"items": [{"p", "w"}, …],
//! "profit", "weight"}` envelope carries a knapsack decision instance.

use std::fmt;

use serde::de::{MapAccess, Visitor};
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use sha2::{Digest, Sha256};

use bmfni::knapsack::{KnapsackDecisionInstance, KnapsackItem};
use bmfni::model::Violation;
use bmfni::sp::{parse_sp_expression_with, Edge, EdgeList, Fold};
use bmfni::{ArcAttrs, Instance, Topology, ValuePair};

use crate::error::{CliError, CliResult};

pub const INSTANCE_FORMAT: &str = "bmfni-v1";
pub const FRONT_FORMAT: &str = "bmfni-front-v1";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub format: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub graph: Option<GraphSpec>,
    #[serde(default, skip_serializing_if = "ArcTable::is_empty")]
    pub arcs: ArcTable,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threshold: Option<PairSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub knapsack: Option<KnapsackSpec>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sp: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edges: Option<Vec<EdgeSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sink: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeSpec {
    pub id: String,
    pub tail: String,
    pub head: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArcSpec {
    pub u1: u64,
    pub u2: u64,
    pub c: u64,
}

/// The `"arcs"` object in document order, duplicates kept so validation can
/// report them.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ArcTable(pub Vec<(String, ArcSpec)>);

impl ArcTable {
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl Serialize for ArcTable {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for (k, v) in &self.0 {
            map.serialize_entry(k, v)?;
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for ArcTable {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = ArcTable;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an object mapping arc ids to {u1, u2, c}")
            }
            fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> Result<ArcTable, A::Error> {
                let mut out = Vec::new();
                while let Some(entry) = map.next_entry::<String, ArcSpec>()? {
                    out.push(entry);
                }
                Ok(ArcTable(out))
            }
        }
        d.deserialize_map(V)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairSpec {
    pub v1: u64,
    pub v2: u64,
}

impl From<ValuePair> for PairSpec {
    fn from(p: ValuePair) -> Self {
        Self { v1: p.v1, v2: p.v2 }
    }
}

impl From<PairSpec> for ValuePair {
    fn from(p: PairSpec) -> Self {
        ValuePair::new(p.v1, p.v2)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KnapsackSpec {
    pub items: Vec<ItemSpec>,
    pub profit: u64,
    pub weight: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ItemSpec {
    pub p: u64,
    pub w: u64,
}

impl From<&KnapsackDecisionInstance> for KnapsackSpec {
    fn from(k: &KnapsackDecisionInstance) -> Self {
        Self {
            items: k.items.iter().map(|i| ItemSpec { p: i.profit, w: i.weight }).collect(),
            profit: k.profit_target,
            weight: k.weight_limit,
        }
    }
}

impl From<&KnapsackSpec> for KnapsackDecisionInstance {
    fn from(k: &KnapsackSpec) -> Self {
        Self {
            items: k
                .items
                .iter()
                .map(|i| KnapsackItem {
                    profit: i.p,
                    weight: i.w,
                })
                .collect(),
            profit_target: k.profit,
            weight_limit: k.weight,
        }
    }
}

impl InstanceFile {
    /// A graph instance with arcs written in arc order.
    pub fn from_instance(instance: &Instance, sp: String) -> Self {
        Self {
            format: INSTANCE_FORMAT.into(),
            graph: Some(GraphSpec {
                sp: Some(sp),
                edges: None,
                source: None,
                sink: None,
            }),
            arcs: ArcTable(
                instance
                    .arcs
                    .iter()
                    .map(|a| {
                        (
                            a.name.clone(),
                            ArcSpec {
                                u1: a.u1,
                                u2: a.u2,
                                c: a.cost,
                            },
                        )
                    })
                    .collect(),
            ),
            budget: Some(instance.budget),
            threshold: None,
            knapsack: None,
        }
    }

    pub fn parse(text: &str, path: &str) -> CliResult<Self> {
        let file: InstanceFile = serde_json::from_str(text).map_err(|e| CliError::json(path, &e))?;
        if file.format != INSTANCE_FORMAT {
            return Err(CliError::input(
                "format",
                format!("{path}: unsupported format {:?}, expected {INSTANCE_FORMAT:?}", file.format),
            ));
        }
        Ok(file)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance files always serialize") + "\n"
    }

    /// SHA-256 of the compact serialization of the parsed document, so the
    /// digest ignores formatting.
    pub fn digest(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("instance files always serialize");
        format!("{:x}", Sha256::digest(bytes))
    }

    pub fn has_graph(&self) -> bool {
        self.graph.is_some()
    }

    /// The interdiction instance, with n-ary compositions binarized per
    /// `fold`.
    pub fn instance(&self, fold: Fold) -> CliResult<Instance> {
        let graph = self
            .graph
            .as_ref()
            .ok_or_else(|| CliError::input("validation", "instance file has no \"graph\""))?;
        let budget = self
            .budget
            .ok_or_else(|| CliError::input("validation", "instance file has no \"budget\""))?;

        let (names, topology, mut violations) = match (&graph.sp, &graph.edges) {
            (Some(expr), None) => {
                if graph.source.is_some() || graph.sink.is_some() {
                    return Err(CliError::input(
                        "validation",
                        "\"source\" and \"sink\" only apply to edge-list graphs",
                    ));
                }
                let parsed = parse_sp_expression_with(expr, fold).map_err(bmfni::Error::from)?;
                (parsed.arc_names, Topology::Tree(parsed.tree), Vec::new())
            }
            (None, Some(edges)) => {
                let (Some(source), Some(sink)) = (&graph.source, &graph.sink) else {
                    return Err(CliError::input("validation", "edge-list graphs need \"source\" and \"sink\""));
                };
                let mut names: Vec<String> = Vec::new();
                let mut violations = Vec::new();
                for e in edges {
                    if names.contains(&e.id) {
                        violations.push(violation(&e.id, "arc appears more than once in graph"));
                    } else {
                        names.push(e.id.clone());
                    }
                }
                let list = EdgeList {
                    edges: edges
                        .iter()
                        .enumerate()
                        .map(|(i, e)| Edge {
                            arc: names.iter().position(|n| *n == e.id).unwrap_or(i),
                            tail: e.tail.clone(),
                            head: e.head.clone(),
                        })
                        .collect(),
                    source: source.clone(),
                    sink: sink.clone(),
                };
                (names, Topology::Edges(list), violations)
            }
            _ => {
                return Err(CliError::input(
                    "validation",
                    "\"graph\" needs exactly one of \"sp\" and \"edges\"",
                ))
            }
        };

        let table = &self.arcs.0;
        let mut arcs = Vec::with_capacity(names.len());
        for name in &names {
            match table.iter().find(|(k, _)| k == name) {
                Some((_, a)) => arcs.push(ArcAttrs::new(name.clone(), a.u1, a.u2, a.c)),
                None => violations.push(violation(name, "no attributes in \"arcs\"")),
            }
        }
        for (i, (k, _)) in table.iter().enumerate() {
            if table[..i].iter().any(|(j, _)| j == k) {
                violations.push(violation(k, "duplicate arc id"));
            } else if !names.contains(k) {
                violations.push(violation(k, "arc missing from graph"));
            }
        }
        if !violations.is_empty() {
            return Err(bmfni::Error::Invalid(violations).into());
        }
        let instance = Instance::new(arcs, topology, budget);
        instance.ensure_valid()?;
        Ok(instance)
    }

    pub fn knapsack_decision(&self) -> Option<KnapsackDecisionInstance> {
        self.knapsack.as_ref().map(KnapsackDecisionInstance::from)
    }
}

fn violation(arc: &str, reason: &str) -> Violation {
    Violation {
        arc: Some(arc.to_string()),
        reason: reason.to_string(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrontFile {
    pub format: String,
    pub solver: String,
    pub parameters: Parameters,
    pub instance_digest: String,
    /// Sorted by `v1` ascending, `v2` descending.
    pub points: Vec<PointSpec>,
    /// Excluded from every comparison and digest.
    pub timing: Timing,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Parameters {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointSpec {
    pub v1: u64,
    pub v2: u64,
    /// Interdicted arc ids in arc order.
    pub strategy: Vec<String>,
    pub cost: u64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Timing {
    pub wall_us: u64,
}

impl FrontFile {
    pub fn new(
        solver: &str,
        parameters: Parameters,
        digest: String,
        instance: &Instance,
        front: &[bmfni::LabeledPoint],
        timing: Timing,
    ) -> Self {
        let mut points: Vec<PointSpec> = front
            .iter()
            .map(|p| PointSpec {
                v1: p.value.v1,
                v2: p.value.v2,
                strategy: p.witness.arcs().map(|a| instance.arcs[a].name.clone()).collect(),
                cost: p.witness.cost(),
            })
            .collect();
        points.sort_by(|a, b| a.v1.cmp(&b.v1).then(b.v2.cmp(&a.v2)));
        Self {
            format: FRONT_FORMAT.into(),
            solver: solver.into(),
            parameters,
            instance_digest: digest,
            points,
            timing,
        }
    }

    pub fn parse(text: &str, path: &str) -> CliResult<Self> {
        let file: FrontFile = serde_json::from_str(text).map_err(|e| CliError::json(path, &e))?;
        if file.format != FRONT_FORMAT {
            return Err(CliError::input(
                "format",
                format!("{path}: unsupported format {:?}, expected {FRONT_FORMAT:?}", file.format),
            ));
        }
        Ok(file)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("front files always serialize") + "\n"
    }

    /// Candidate points with witnesses resolved against `instance`.
    pub fn labeled_points(&self, instance: &Instance) -> CliResult<Vec<bmfni::LabeledPoint>> {
        self.points
            .iter()
            .map(|p| {
                let mut ids = Vec::with_capacity(p.strategy.len());
                for name in &p.strategy {
                    let id = instance
                        .arc_by_name(name)
                        .ok_or_else(|| CliError::input("validation", format!("front names unknown arc {name:?}")))?;
                    if ids.contains(&id) {
                        return Err(CliError::input("validation", format!("front repeats arc {name:?}")));
                    }
                    ids.push(id);
                }
                Ok(bmfni::LabeledPoint::new(
                    ValuePair::new(p.v1, p.v2),
                    instance.strategy_from_arcs(ids),
                ))
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const EXAMPLE: &str = r#"{
        "format": "bmfni-v1",
        "graph": {"sp": "S(arc(a),P(arc(b),arc(c)))"},
        "arcs": {"c": {"u1": 5, "u2": 1, "c": 1}, "a": {"u1": 4, "u2": 9, "c": 1}, "b": {"u1": 2, "u2": 3, "c": 1}},
        "budget": 1
    }"#;

    #[test]
    fn arcs_follow_graph_order() {
        let file = InstanceFile::parse(EXAMPLE, "x").unwrap();
        let inst = file.instance(Fold::Left).unwrap();
        assert_eq!(inst.arc_names(), ["a", "b", "c"]);
        assert_eq!(inst.arcs[2].u1, 5);
    }

    #[test]
    fn digest_ignores_formatting_and_fold() {
        let a = InstanceFile::parse(EXAMPLE, "x").unwrap();
        let compact: String = EXAMPLE.split_whitespace().collect::<Vec<_>>().join("");
        let b = InstanceFile::parse(&compact, "x").unwrap();
        assert_eq!(a.digest(), b.digest());
        assert_eq!(a.digest().len(), 64);
    }

    #[test]
    fn syntax_error_reports_line_and_column() {
        let err = InstanceFile::parse("{\n  \"format\": \"bmfni-v1\",\n  oops\n}", "f.json").unwrap_err();
        assert_eq!(err.code, 2);
        assert_eq!(err.detail["line"], 3);
        assert_eq!(err.detail["column"], 3);
    }

    #[test]
    fn missing_format_and_wrong_format() {
        assert_eq!(InstanceFile::parse("{}", "x").unwrap_err().code, 2);
        let err = InstanceFile::parse(r#"{"format":"v0"}"#, "x").unwrap_err();
        assert_eq!(err.kind, "format");
    }

    #[test]
    fn table_mismatches_are_reported() {
        let text = r#"{"format":"bmfni-v1","graph":{"sp":"P(arc(a),arc(b))"},
            "arcs":{"a":{"u1":1,"u2":1,"c":1},"a":{"u1":1,"u2":1,"c":1},"z":{"u1":1,"u2":1,"c":1}},"budget":1}"#;
        let err = InstanceFile::parse(text, "x").unwrap().instance(Fold::Left).unwrap_err();
        let reasons: Vec<String> = err.detail["violations"]
            .as_array()
            .unwrap()
            .iter()
            .map(|v| format!("{}: {}", v["arc"].as_str().unwrap(), v["reason"].as_str().unwrap()))
            .collect();
        assert_eq!(
            reasons,
            [
                "b: no attributes in \"arcs\"",
                "a: duplicate arc id",
                "z: arc missing from graph"
            ]
        );
    }

    #[test]
    fn edge_list_graphs() {
        let text = r#"{"format":"bmfni-v1",
            "graph":{"edges":[{"id":"x","tail":"s","head":"m"},{"id":"y","tail":"m","head":"t"}],"source":"s","sink":"t"},
            "arcs":{"x":{"u1":3,"u2":1,"c":1},"y":{"u1":2,"u2":5,"c":1}},"budget":0}"#;
        let inst = InstanceFile::parse(text, "x").unwrap().instance(Fold::Left).unwrap();
        assert_eq!(format!("{:?}", inst.tree().unwrap()), "S(0,1)");
    }

    #[test]
    fn round_trip_preserves_documents() {
        let file = InstanceFile::parse(EXAMPLE, "x").unwrap();
        assert_eq!(InstanceFile::parse(&file.to_json(), "y").unwrap(), file);
    }
}
