//! Command dispatch for the `torlog` binary.

use std::collections::BTreeMap;

use clap::ValueEnum;
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::chern::{chern_pp, residue_chern_check_with};
use crate::cocycle::{check_frame_antisymmetry, check_triple_identity, cocycle_a, theorem_ab};
use crate::equivariant::{recover_weights, EquivariantData};
use crate::model::Model;
use crate::report::{Report, Status, Verdict};
use crate::splitting::{
    compare_with_connection_form, connection_from_splitting, equivariance_verdict, split_cocycle, stats_json,
    SplitOutcome, DEFAULT_WEIGHT_CAP,
};
use crate::transitions::TransitionData;
use crate::Error;

pub const WEIGHT_CAP_VAR: &str = "TORLOG_WEIGHT_CAP";

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Validate,
    Residues,
    Chern,
    Cocycle,
    #[value(name = "theorem-ab")]
    TheoremAb,
    Split,
    Equivariance,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Validate => "validate",
            Command::Residues => "residues",
            Command::Chern => "chern",
            Command::Cocycle => "cocycle",
            Command::TheoremAb => "theorem-ab",
            Command::Split => "split",
            Command::Equivariance => "equivariance",
        }
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("command `{command}` needs a `{block}` block in the model")]
    MissingBlock { command: &'static str, block: &'static str },
    #[error("{WEIGHT_CAP_VAR} must be a non-negative integer, got {0:?}")]
    BadWeightCap(String),
    #[error(transparent)]
    Model(#[from] Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::MissingBlock { .. } | CliError::BadWeightCap(_) => 2,
            CliError::Model(_) => 3,
        }
    }
}

pub fn exit_code(report: &Report) -> i32 {
    match report.status() {
        Status::Pass => 0,
        Status::Fail => 1,
        Status::Undetermined => 4,
    }
}

pub fn weight_cap_from_env() -> Result<usize, CliError> {
    match std::env::var(WEIGHT_CAP_VAR) {
        Err(_) => Ok(DEFAULT_WEIGHT_CAP),
        Ok(raw) => raw.trim().parse().map_err(|_| CliError::BadWeightCap(raw)),
    }
}

fn need_bundle(model: &Model, command: Command) -> Result<&EquivariantData, CliError> {
    model.equivariant.as_ref().ok_or(CliError::MissingBlock {
        command: command.name(),
        block: "bundle",
    })
}

fn need_transitions(model: &Model, command: Command) -> Result<&TransitionData, CliError> {
    model.transitions.as_ref().ok_or(CliError::MissingBlock {
        command: command.name(),
        block: "transitions",
    })
}

pub fn run(command: Command, model: &Model, weight_cap: usize) -> Result<Report, CliError> {
    let mut report = Report::new(command.name());
    if let Some(name) = &model.name {
        report.artifact("model", json!(name));
    }
    if !model.warnings().is_empty() {
        report.artifact("warnings", json!(model.warnings()));
    }
    match command {
        Command::Validate => validate(model, &mut report)?,
        Command::Residues => residues(need_bundle(model, command)?, &mut report)?,
        Command::Chern => chern(need_bundle(model, command)?, &mut report)?,
        Command::Cocycle => {
            let data = need_transitions(model, command)?;
            report.add(data.validate());
            let a = cocycle_a(data)?;
            report.add(check_triple_identity(&a, data));
            report.add(check_frame_antisymmetry(&a, data));
            report.artifact("cocycle_a", a.to_json());
        }
        Command::TheoremAb => {
            let data = need_transitions(model, command)?;
            report.add(data.validate());
            let (a, b, checks) = theorem_ab(data)?;
            report.add(checks);
            report.artifact("cocycle_a", a.to_json());
            report.artifact("cocycle_b", b.to_json());
        }
        Command::Split => split(need_transitions(model, command)?, weight_cap, &mut report)?,
        Command::Equivariance => {
            let data = need_transitions(model, command)?;
            let outcome = equivariance_verdict(data, weight_cap)?;
            report.add(outcome.checks);
            report.artifact("solver", stats_json(outcome.outcome.stats()));
            if let SplitOutcome::Found { cochain, .. } = &outcome.outcome {
                report.artifact("connection", cochain.to_json());
                if let Some(eq) = &model.equivariant {
                    let cmp = compare_with_connection_form(cochain, eq, data)?;
                    report.add(cmp.canonical_gauge);
                    report.add(cmp.matches);
                    report.artifact("twist", json!(cmp.twist));
                }
            }
        }
    }
    Ok(report)
}

fn validate(model: &Model, report: &mut Report) -> Result<(), CliError> {
    report.add(model.validation.to_check_report());
    let fan = &model.fan;
    report.artifact(
        "fan",
        json!({
            "rank": fan.rank(),
            "rays": fan.rays(),
            "cones": fan.cones().len(),
            "maximal_cones": fan.maximal_cones(),
        }),
    );
    if let Some(eq) = &model.equivariant {
        report.add(eq.check_compatibility()?.to_check_report());
    }
    if let Some(data) = &model.transitions {
        report.add(data.validate());
    }
    Ok(())
}

fn residues(eq: &EquivariantData, report: &mut Report) -> Result<(), CliError> {
    let fan = eq.fan();
    let mut table = Map::new();
    for &sigma in fan.maximal_cones() {
        let res = eq.residues(sigma)?;
        let mut per_ray = Map::new();
        for r in &res {
            per_ray.insert(r.ray.to_string(), json!(r.entries));
        }
        table.insert(sigma.to_string(), Value::Object(per_ray));

        let check = format!("roundtrip[{sigma}]");
        match recover_weights(fan, sigma, &res) {
            Ok(ms) if ms.weights == eq.weights(sigma)? => {
                report.push(Verdict::pass(check, "weights recovered from residues"))
            }
            Ok(ms) => report.push(Verdict::fail(check, format!("recovered {:?}", ms.weights))),
            Err(Error::Underdetermined(why)) => report.push(Verdict::undetermined(check, why)),
            Err(e) => return Err(e.into()),
        }
    }
    report.artifact("residues", Value::Object(table));
    let weights: BTreeMap<String, _> = eq
        .multisets()
        .iter()
        .map(|(id, ms)| (id.to_string(), ms.weights.clone()))
        .collect();
    report.artifact("weights", json!(weights));
    Ok(())
}

fn chern(eq: &EquivariantData, report: &mut Report) -> Result<(), CliError> {
    let classes = chern_pp(eq)?;
    report.add(classes.to_check_report());
    let mut checks = Vec::new();
    let mut bad = Vec::new();
    for &sigma in eq.fan().maximal_cones() {
        for &rho in eq.fan().cone(sigma)?.rays() {
            let c = residue_chern_check_with(eq, &classes, sigma, rho)?;
            if !c.passed {
                bad.push(format!("({sigma},{rho})"));
            }
            checks.push(c);
        }
    }
    report.push(if bad.is_empty() {
        Verdict::pass("residue_chern", format!("c_i(v_rho) matches the residue on {} pairs", checks.len()))
    } else {
        Verdict::fail("residue_chern", format!("mismatch at {}", bad.join(", ")))
    });
    let mut table = Map::new();
    for class in &classes.classes {
        table.insert(format!("c{}", class.degree), json!(class.pieces));
    }
    report.artifact("chern", Value::Object(table));
    report.artifact("residue_chern", json!(checks));
    Ok(())
}

fn split(data: &TransitionData, weight_cap: usize, report: &mut Report) -> Result<(), CliError> {
    report.add(data.validate());
    let a = cocycle_a(data)?;
    let outcome = split_cocycle(&a, data, weight_cap)?;
    report.artifact("solver", stats_json(outcome.stats()));
    match &outcome {
        SplitOutcome::Found { cochain, .. } => {
            report.push(Verdict::pass("split", "splitting found"));
            report.artifact("splitting", cochain.to_json());
            match connection_from_splitting(cochain, data) {
                Ok(forms) => report.add(forms.gauge),
                Err(e) => report.push(Verdict::fail("gauge_law", e.to_string())),
            }
        }
        SplitOutcome::NotFound { stats } => report.push(Verdict::undetermined(
            "split",
            format!(
                "no splitting found within graded search space ({} weights, closure rounds {}/{})",
                stats.weights, stats.closure_rounds, stats.weight_cap
            ),
        )),
    }
    Ok(())
}
