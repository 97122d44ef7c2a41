//! The `analyze-structure` subcommand: ad-hoc inspection of a two-layer
//! window given explicit node lists.

use std::path::PathBuf;

use anyhow::Result;
use clap::Args;
use num_traits::ToPrimitive;
use serde_json::json;

use capgen_core::structure::{
    classify, is_balanced, is_closed_under_intersection, is_regular, max_common_successors,
    nx_profile, StructureClass,
};
use capgen_core::twolayer::{selection_weights_exact, TwoLayerView};
use capgen_core::SubsetId;

use crate::usage;

#[derive(Args)]
pub struct AnalyzeArgs {
    /// Ground-set size.
    #[arg(long)]
    n: u8,
    /// Upper-layer nodes, comma separated. A node is written as its element
    /// digits ("123" = {1,2,3}) or dot-separated labels ("1.3.12") for
    /// ground sets beyond 9 elements.
    #[arg(long)]
    upper: String,
    /// Lower-layer nodes, same syntax; may be empty.
    #[arg(long, default_value = "")]
    lower: String,
    /// Report path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_node(n: u8, text: &str) -> Result<SubsetId> {
    let elements: Vec<u8> = if text.contains('.') {
        text.split('.')
            .map(|part| part.parse::<u8>().map_err(|_| usage(format!("bad element {part:?}"))))
            .collect::<Result<_>>()?
    } else {
        text.chars()
            .map(|ch| {
                ch.to_digit(10)
                    .map(|d| d as u8)
                    .ok_or_else(|| usage(format!("bad element {ch:?} in node {text:?}")))
            })
            .collect::<Result<_>>()?
    };
    SubsetId::from_elements(n, &elements).map_err(|e| usage(e.to_string()))
}

fn parse_nodes(n: u8, text: &str) -> Result<Vec<SubsetId>> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse_node(n, s))
        .collect()
}

fn class_json(class: &StructureClass) -> serde_json::Value {
    match class {
        StructureClass::NotClosed { witness } => json!({
            "kind": "not_closed",
            "witness": [witness.0.to_string(), witness.1.to_string()],
        }),
        StructureClass::SingleUpper => json!({ "kind": "single_upper" }),
        StructureClass::CoatomFamily { doubly_covered } => json!({
            "kind": "coatom_family",
            "doubly_covered": doubly_covered,
        }),
        StructureClass::CommonCore { core } => json!({
            "kind": "common_core",
            "core": core.to_string(),
        }),
    }
}

pub fn run(args: AnalyzeArgs) -> Result<()> {
    let upper = parse_nodes(args.n, &args.upper)?;
    let lower = parse_nodes(args.n, &args.lower)?;
    if upper.is_empty() {
        return Err(usage("--upper must name at least one node"));
    }
    let view = TwoLayerView::from_layers(args.n, upper, lower)
        .map_err(|e| usage(e.to_string()))?;

    let profiles: Vec<serde_json::Value> = view
        .upper_nodes()
        .into_iter()
        .map(|x| {
            let p = nx_profile(&view, x).expect("node from the view");
            json!({ "node": x.to_string(), "counts": p.counts() })
        })
        .collect();

    let weights = selection_weights_exact(&view)?;
    let selection: Vec<serde_json::Value> = weights
        .candidates()
        .iter()
        .zip(weights.probabilities())
        .map(|(node, p)| {
            json!({
                "node": node.to_string(),
                "probability": p.to_f64(),
                "exact": p.to_string(),
            })
        })
        .collect();

    let class = classify(&view)?;
    let report = json!({
        "command": "analyze-structure",
        "n": args.n,
        "upper": view.upper_nodes().iter().map(ToString::to_string).collect::<Vec<_>>(),
        "lower": view.lower_nodes().iter().map(ToString::to_string).collect::<Vec<_>>(),
        "h": view.upper_len(),
        "k": view.lower_len(),
        "isolated": view.isolated_nodes().iter().map(ToString::to_string).collect::<Vec<_>>(),
        "profiles": profiles,
        "regular": is_regular(&view),
        "balanced": is_balanced(&view),
        "closed_under_intersection": is_closed_under_intersection(&view),
        "max_common_successors": max_common_successors(&view),
        "class": class_json(&class),
        "selection": selection,
    });
    let text = serde_json::to_string_pretty(&report)?;
    match args.out {
        Some(path) => std::fs::write(path, text)?,
        None => println!("{text}"),
    }
    Ok(())
}
