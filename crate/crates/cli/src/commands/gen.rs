//! `gen`: hierarchy tables written as `family/N.json` and `family/N.txt`.

use crate::config::{Command, RunConfig};
use crate::output::{write_atomic, write_json};
use crate::Failure;
use anyhow::anyhow;
use hierarchylab_core::hierarchy::{build_table, Family};
use serde_json::json;

pub fn run(cfg: &RunConfig) -> Result<String, Failure> {
    let family = Family::from_name(&cfg.family).ok_or_else(|| {
        let known: Vec<&str> = Family::ALL.iter().map(|f| f.name()).collect();
        Failure::usage(anyhow!("unknown family `{}` (expected one of {})", cfg.family, known.join(", ")))
    })?;
    let table = build_table(family, cfg.n).map_err(|e| {
        let check = e.check_name().unwrap_or("symbolic algebra").to_string();
        Failure::of(Command::Gen, anyhow!("{family} N = {}: check `{check}` failed: {e}", cfg.n, family = family.name()))
    })?;
    let dir = cfg.out_dir().join(family.name());
    let doc = json!({ "config": cfg.to_json(), "table": table.to_json() });
    let json_path = dir.join(format!("{}.json", cfg.n));
    write_json(&json_path, &doc).map_err(|e| Failure::of(Command::Gen, e))?;
    let text = format!("# config: {}\n{}", serde_json::to_string(&cfg.to_json()).expect("json"), table.to_text());
    let text_path = dir.join(format!("{}.txt", cfg.n));
    write_atomic(&text_path, text.as_bytes()).map_err(|e| Failure::of(Command::Gen, e))?;
    Ok(format!("wrote {} and {}", json_path.display(), text_path.display()))
}
