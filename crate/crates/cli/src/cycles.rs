use std::fs;
use std::io::Write;

use anyhow::{bail, Result};
use mcqf_core::cycles::{
    best_cycle_combination, CycleCombination, CycleSearch, CycleSearchSettings,
};
use mcqf_core::mcqf::Overheads;
use mcqf_core::net::Network;
use mcqf_core::traffic::FlowSet;
use serde::Serialize;

use crate::args::{CyclesArgs, GroupArgs};
use crate::inputs::{group_settings, load, write_json};
use crate::Infeasible;

#[derive(Serialize)]
pub struct CyclesOutput {
    pub best: [u64; 3],
    pub score: f64,
    pub scheduled: usize,
    pub evaluated: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub combinations: Option<Vec<CycleCombination>>,
}

pub fn settings(groups: &GroupArgs, seed: u64) -> Result<CycleSearchSettings> {
    let g = group_settings(groups, 3)?;
    let arr = |v: &[f64]| [v[0], v[1], v[2]];
    Ok(CycleSearchSettings {
        queues: [g.queues[0], g.queues[1], g.queues[2]],
        shares: arr(&g.shares),
        xi: Overheads::default(),
        mapping: groups.mapping,
        splits: arr(&g.splits),
        seed,
    })
}

pub fn search(
    net: &Network,
    flows: &FlowSet,
    groups: &GroupArgs,
    seed: u64,
) -> Result<CycleSearch> {
    if groups
        .queues
        .as_deref()
        .is_some_and(|q| q.split(',').count() != 3)
    {
        bail!(Infeasible("cycle search needs three queue groups".into()));
    }
    Ok(best_cycle_combination(
        net,
        flows,
        &settings(groups, seed)?,
    )?)
}

pub fn run(args: &CyclesArgs) -> Result<()> {
    let inputs = load(&args.input)?;
    let found = search(&inputs.net, &inputs.flows, &args.groups, args.input.seed)?;
    let out = CyclesOutput {
        best: found.best.cycles,
        score: found.best.score,
        scheduled: found.best.scheduled,
        evaluated: found.combinations.len(),
        combinations: args.list.then(|| found.combinations.clone()),
    };
    writeln!(
        std::io::stdout().lock(),
        "{}",
        serde_json::to_string_pretty(&out)?
    )?;
    if let Some(dir) = &args.out {
        fs::create_dir_all(dir)?;
        write_json(&dir.join("cycles.json"), &out)?;
    }
    Ok(())
}
