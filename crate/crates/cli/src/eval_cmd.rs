//! The `eval` subcommand: KL divergence against the exact marginals when a
//! rank table is available, centroid with squared error, and the
//! distribution-symmetry report. Emitted as a JSON report whose metric rows
//! carry (metric, subset mask, value, threshold, pass).

use std::path::PathBuf;

use anyhow::Result;
use clap::{Args, ValueEnum};
use serde_json::json;

use capgen_core::eval::{
    empirical_centroid, exact_centroid, exact_marginal_cdf, histogram, histogram_from_cdf,
    kl_divergence, symmetry_report, CentroidReport,
};
use capgen_core::exact::{RankTable, MAX_TABLE_N};
use capgen_core::subset::proper_node_masks;
use capgen_core::SubsetId;

use crate::{io, usage};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Reference {
    /// Exact tables when n ≤ 5, symmetry checks only above.
    Auto,
    /// Require the exact reference (error when out of range).
    Exact,
    /// Skip the exact comparison even when available.
    Symmetry,
}

#[derive(Args)]
pub struct EvalArgs {
    /// Capacity file produced by `generate` (.csv or .jsonl).
    input: PathBuf,
    /// Histogram bins for the KL comparison.
    #[arg(long, default_value_t = 50)]
    bins: usize,
    /// Pass threshold for the symmetry KS distances.
    #[arg(long, default_value_t = 0.02)]
    threshold: f64,
    #[arg(long, value_enum, default_value_t = Reference::Auto)]
    reference: Reference,
    /// Report path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

pub fn run(args: EvalArgs) -> Result<()> {
    if args.bins < 2 {
        return Err(usage("--bins must be at least 2"));
    }
    let samples = io::read_capacities(&args.input)?;
    let n = samples[0].n();

    let use_exact = match args.reference {
        Reference::Auto => n <= MAX_TABLE_N,
        Reference::Exact => {
            if n > MAX_TABLE_N {
                return Err(usage(format!(
                    "exact reference requires n ≤ {MAX_TABLE_N}, input has n={n}"
                )));
            }
            true
        }
        Reference::Symmetry => false,
    };

    let mut metrics: Vec<serde_json::Value> = Vec::new();
    let mut centroid_section = json!(null);

    if use_exact {
        let table = RankTable::new(n)?;
        for mask in proper_node_masks(n) {
            let node = SubsetId::new(n, mask)?;
            let reference =
                histogram_from_cdf(args.bins, |alpha| exact_marginal_cdf(&table, node, alpha))?;
            let observed = histogram(&samples, node, args.bins)?;
            let kl = kl_divergence(&reference, &observed)?;
            metrics.push(json!({
                "metric": "kl_vs_exact",
                "subset": mask,
                "value": kl,
                "threshold": null,
                "pass": null,
            }));
        }
        let exact: CentroidReport<f64> = exact_centroid(&table);
        let estimate = empirical_centroid(&samples, Some(&exact))?;
        let squared_error = estimate.squared_error().expect("reference given");
        metrics.push(json!({
            "metric": "centroid_squared_error",
            "subset": null,
            "value": squared_error,
            "threshold": null,
            "pass": null,
        }));
        centroid_section = json!({
            "estimated": estimate.coordinates(),
            "exact": exact.coordinates(),
            "squared_error": squared_error,
        });
    } else {
        let estimate = empirical_centroid(&samples, None)?;
        centroid_section = json!({
            "estimated": estimate.coordinates(),
            "exact": null,
            "squared_error": null,
        });
    }

    let symmetry = symmetry_report(&samples, args.threshold)?;
    for class in &symmetry.classes {
        metrics.push(json!({
            "metric": "ks_same_cardinality_max",
            "cardinality": class.cardinality,
            "subset": class.witness.map(|(a, _)| a.mask()),
            "paired_subset": class.witness.map(|(_, b)| b.mask()),
            "value": class.max_ks,
            "threshold": symmetry.threshold,
            "pass": class.pass,
        }));
    }
    for entry in &symmetry.conjugacy {
        metrics.push(json!({
            "metric": "ks_conjugate",
            "subset": entry.subset.mask(),
            "paired_subset": entry.subset.complement().mask(),
            "value": entry.ks,
            "threshold": symmetry.threshold,
            "pass": entry.pass,
        }));
    }

    let report = json!({
        "command": "eval",
        "config": {
            "input": args.input.display().to_string(),
            "bins": args.bins,
            "threshold": args.threshold,
            "reference": if use_exact { "exact" } else { "symmetry" },
        },
        "n": n,
        "sample_count": samples.len(),
        "symmetry_pass": symmetry.pass,
        "metrics": metrics,
        "centroid": centroid_section,
    });
    let text = serde_json::to_string_pretty(&report)?;
    match args.out {
        Some(path) => std::fs::write(path, text)?,
        None => println!("{text}"),
    }
    Ok(())
}
