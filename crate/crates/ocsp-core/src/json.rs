//! On-disk JSON formats.
//!
//! Instances: `{"n":…, "k":…, "predicate":…, "constraints":[[…],…]}` with the
//! predicate either `{"named":"MAS"|"Btwn"}` or
//! `{"k":…, "satisfied_ranks":[…]}` (lexicographic ranks over one-line
//! notation). Coarse predicates are either materialized
//! (`{"k":…, "q":…, "satisfied_base_q":[…]}`, big-endian base-q codes) or
//! derived (`{"coarsen_of":…, "q":…}`). Hypergraphs mirror instance
//! constraints under an `edges` key. Field order never matters; files are
//! UTF-8 with one object per file.
//!
//! All parsers validate semantic invariants after deserializing, so malformed
//! or hostile input yields an error instead of a corrupt value.

use serde::{Deserialize, Serialize};

use crate::coarsen::{CoarsePredicate, Partition};
use crate::error::{Error, Result};
use crate::hypergraph::Hypergraph;
use crate::instance::OcspInstance;
use crate::predicate::OrderingPredicate;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PredicateDto {
    Named { named: String },
    Table { k: usize, satisfied_ranks: Vec<u64> },
}

impl PredicateDto {
    pub fn to_predicate(&self) -> Result<OrderingPredicate> {
        match self {
            PredicateDto::Named { named } => match named.as_str() {
                "MAS" => Ok(OrderingPredicate::mas()),
                "Btwn" => Ok(OrderingPredicate::betweenness()),
                other => Err(Error::InvalidPredicate(format!(
                    "unknown named predicate {other:?} (expected \"MAS\" or \"Btwn\")"
                ))),
            },
            PredicateDto::Table { k, satisfied_ranks } => {
                OrderingPredicate::new(*k, satisfied_ranks.iter().copied())
            }
        }
    }

    pub fn from_predicate(p: &OrderingPredicate) -> Self {
        if *p == OrderingPredicate::mas() {
            PredicateDto::Named {
                named: "MAS".into(),
            }
        } else if *p == OrderingPredicate::betweenness() {
            PredicateDto::Named {
                named: "Btwn".into(),
            }
        } else {
            PredicateDto::Table {
                k: p.arity(),
                satisfied_ranks: p.satisfied_ranks().iter().copied().collect(),
            }
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct InstanceDto {
    n: usize,
    k: usize,
    predicate: PredicateDto,
    constraints: Vec<Vec<usize>>,
}

pub fn parse_instance_json(text: &str) -> Result<OcspInstance> {
    let dto: InstanceDto = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let predicate = dto.predicate.to_predicate()?;
    if predicate.arity() != dto.k {
        return Err(Error::ArityMismatch {
            expected: dto.k,
            found: predicate.arity(),
        });
    }
    OcspInstance::new(dto.n, predicate, dto.constraints)
}

pub fn instance_to_json(instance: &OcspInstance) -> String {
    let dto = InstanceDto {
        n: instance.n(),
        k: instance.arity(),
        predicate: PredicateDto::from_predicate(instance.predicate()),
        constraints: instance.constraints().to_vec(),
    };
    serde_json::to_string_pretty(&dto).expect("instance serializes")
}

pub fn parse_predicate_json(text: &str) -> Result<OrderingPredicate> {
    let dto: PredicateDto = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    dto.to_predicate()
}

pub fn predicate_to_json(predicate: &OrderingPredicate) -> String {
    serde_json::to_string_pretty(&PredicateDto::from_predicate(predicate))
        .expect("predicate serializes")
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
enum CoarsePredicateDto {
    Materialized {
        k: usize,
        q: usize,
        satisfied_base_q: Vec<u64>,
    },
    Derived {
        coarsen_of: PredicateDto,
        q: usize,
    },
}

pub fn parse_coarse_predicate_json(text: &str) -> Result<CoarsePredicate> {
    let dto: CoarsePredicateDto =
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    match dto {
        CoarsePredicateDto::Materialized {
            k,
            q,
            satisfied_base_q,
        } => CoarsePredicate::from_table(k, q, satisfied_base_q),
        CoarsePredicateDto::Derived { coarsen_of, q } => {
            CoarsePredicate::coarsen(&coarsen_of.to_predicate()?, q)
        }
    }
}

pub fn coarse_predicate_to_json(f: &CoarsePredicate) -> String {
    let dto = match f.satisfied_codes() {
        Some(codes) => CoarsePredicateDto::Materialized {
            k: f.k(),
            q: f.q(),
            satisfied_base_q: codes,
        },
        None => CoarsePredicateDto::Derived {
            coarsen_of: PredicateDto::from_predicate(
                f.derived_from()
                    .expect("non-materialized tables are derived"),
            ),
            q: f.q(),
        },
    };
    serde_json::to_string_pretty(&dto).expect("coarse predicate serializes")
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct HypergraphDto {
    n: usize,
    k: usize,
    edges: Vec<Vec<usize>>,
}

pub fn parse_hypergraph_json(text: &str) -> Result<Hypergraph> {
    let dto: HypergraphDto = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    Hypergraph::new(dto.n, dto.k, dto.edges)
}

pub fn hypergraph_to_json(g: &Hypergraph) -> String {
    let dto = HypergraphDto {
        n: g.n(),
        k: g.k(),
        edges: g.edges().to_vec(),
    };
    serde_json::to_string_pretty(&dto).expect("hypergraph serializes")
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct PartitionDto {
    q: usize,
    b: Vec<usize>,
}

pub fn parse_partition_json(text: &str) -> Result<Partition> {
    let dto: PartitionDto = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    Partition::new(dto.q, dto.b)
}

pub fn partition_to_json(b: &Partition) -> String {
    let dto = PartitionDto {
        q: b.q(),
        b: b.labels().to_vec(),
    };
    serde_json::to_string_pretty(&dto).expect("partition serializes")
}
