//! Connectivity through constraint projections.
//!
//! For a CPSS relation set, `G(phi)` is connected iff the projection of
//! `phi` to the variables of every constraint has a connected solution
//! graph. Projections are computed with one satisfiability test per
//! assignment of the constraint variables.

use serde::Serialize;

use crate::classify::classify_set;
use crate::clausal::{to_clausal, SchaeferClass};
use crate::error::{Error, Result};
use crate::formula::Formula;
use crate::graph::solutions;
use crate::relation::{format_bits, Relation, ARITY_MAX};
use crate::sat::sat_schaefer;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Projection {
    pub constraint: usize,
    pub vars: Vec<usize>,
    pub relation: Relation,
}

/// How projections decide satisfiability of `phi` with some variables fixed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Backend {
    Schaefer(SchaeferClass),
    BruteForce,
}

/// The Schaefer class used for CPSS formulas, or `NotCpss`.
pub fn cpss_class(phi: &Formula) -> Result<SchaeferClass> {
    let set: Vec<Relation> = phi.used_relations().into_iter().cloned().collect();
    let c = classify_set(&set)?;
    c.cpss_classes.first().copied().ok_or(Error::NotCpss)
}

pub fn project(phi: &Formula, i: usize) -> Result<Projection> {
    let class = cpss_class(phi)?;
    project_unchecked(phi, i, Backend::Schaefer(class))
}

/// Projection without the CPSS precondition.
pub fn project_unchecked(phi: &Formula, i: usize, backend: Backend) -> Result<Projection> {
    Ok(projections_with(phi, &[i], backend)?.remove(0))
}

enum Oracle {
    Solutions(Vec<u64>),
    Clauses(crate::clausal::ClauseSet),
}

impl Oracle {
    fn new(phi: &Formula, backend: Backend) -> Result<Self> {
        Ok(match backend {
            Backend::BruteForce => Oracle::Solutions(solutions(phi)?),
            Backend::Schaefer(class) => Oracle::Clauses(to_clausal(phi, class)?),
        })
    }

    fn project(&self, n: usize, vars: &[usize]) -> Result<Relation> {
        let k = vars.len();
        if k > ARITY_MAX {
            return Err(Error::ArityTooLarge {
                arity: k,
                max: ARITY_MAX,
            });
        }
        match self {
            Oracle::Solutions(sols) => Relation::from_tuples(
                k,
                sols.iter().map(|&a| {
                    vars.iter()
                        .fold(0u32, |t, &v| t << 1 | (a >> (n - 1 - v) & 1) as u32)
                }),
            ),
            Oracle::Clauses(base) => {
                let mut members = Vec::new();
                for t in 0..1u32 << k {
                    let mut cs = base.clone();
                    for (j, &v) in vars.iter().enumerate() {
                        cs.fix(v, t >> (k - 1 - j) & 1 == 1);
                    }
                    if sat_schaefer(&cs)?.is_some() {
                        members.push(t);
                    }
                }
                Relation::from_tuples(k, members)
            }
        }
    }
}

/// Projection of `phi` onto an arbitrary list of variables, in that order.
pub fn project_onto(phi: &Formula, vars: &[usize], backend: Backend) -> Result<Relation> {
    if vars.is_empty() {
        return Err(Error::Precondition("projection onto no variables".into()));
    }
    if let Some(&v) = vars.iter().find(|&&v| v >= phi.num_vars()) {
        return Err(Error::UnknownVariable(format!("#{v}")));
    }
    Oracle::new(phi, backend)?.project(phi.num_vars(), vars)
}

fn projections_with(phi: &Formula, indices: &[usize], backend: Backend) -> Result<Vec<Projection>> {
    let oracle = Oracle::new(phi, backend)?;
    indices
        .iter()
        .map(|&i| {
            let vars = phi.constraint_vars(i);
            if vars.is_empty() {
                return Err(Error::NoVariables(i));
            }
            let relation = oracle.project(phi.num_vars(), &vars)?;
            Ok(Projection {
                constraint: i,
                vars,
                relation,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProjectionReport {
    pub constraint: usize,
    pub vars: Vec<String>,
    pub relation: Vec<String>,
    pub components: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConnReport {
    pub connected: bool,
    pub method: String,
    pub projections: Vec<ProjectionReport>,
}

fn report(phi: &Formula, projections: Vec<Projection>, method: String) -> ConnReport {
    let projections: Vec<ProjectionReport> = projections
        .into_iter()
        .map(|p| ProjectionReport {
            constraint: p.constraint,
            vars: p.vars.iter().map(|&v| phi.variables()[v].clone()).collect(),
            relation: p
                .relation
                .tuples()
                .map(|t| format_bits(t as u64, p.relation.arity()))
                .collect(),
            components: p.relation.components().len(),
        })
        .collect();
    ConnReport {
        connected: projections.iter().all(|p| p.components <= 1),
        method,
        projections,
    }
}

fn with_vars(phi: &Formula) -> Vec<usize> {
    (0..phi.constraints().len())
        .filter(|&i| !phi.constraint_vars(i).is_empty())
        .collect()
}

/// Decides connectivity of a formula over a CPSS set.
pub fn conn_cpss(phi: &Formula) -> Result<ConnReport> {
    let class = cpss_class(phi)?;
    let ps = projections_with(phi, &with_vars(phi), Backend::Schaefer(class))?;
    Ok(report(phi, ps, format!("cpss ({class})")))
}

/// The projection test for an arbitrary formula. A disconnected projection
/// proves `G(phi)` disconnected; the converse needs a CPSS set.
pub fn conn_by_projections(phi: &Formula, backend: Backend) -> Result<ConnReport> {
    let ps = projections_with(phi, &with_vars(phi), backend)?;
    let method = match backend {
        Backend::Schaefer(c) => format!("projections ({c})"),
        Backend::BruteForce => "projections (brute force)".to_string(),
    };
    Ok(report(phi, ps, method))
}
