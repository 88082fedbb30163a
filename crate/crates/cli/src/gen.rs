use std::fs;
use std::io::Write;

use anyhow::Result;

use crate::args::GenArgs;
use crate::inputs::{load, write_json};

/// Writes `topology.json` and `flows.json` into the output directory.
pub fn run(args: &GenArgs) -> Result<()> {
    let inputs = load(&args.input)?;
    fs::create_dir_all(&args.out)?;
    let topo = args.out.join("topology.json");
    let flows = args.out.join("flows.json");
    write_json(&topo, &inputs.net.to_file())?;
    write_json(&flows, &inputs.flows.to_file())?;
    let mut out = std::io::stdout().lock();
    writeln!(out, "{}", topo.display())?;
    writeln!(out, "{}", flows.display())?;
    Ok(())
}
