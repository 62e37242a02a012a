//! Every built-in metric evaluated on the same pair of sequences.
//!
//! `cargo run --example distances -- "0,1,2,3" "0,2,2"`

use regrobust::metric::{build_metric, evaluate, MetricKind};
use regrobust::rational::parse_sequence;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let v = parse_sequence(args.first().map_or("0,1,2,3", String::as_str))?;
    let w = parse_sequence(args.get(1).map_or("0,5/2,2,3", String::as_str))?;
    let kinds = ["hamming", "threshold_hamming:1", "manhattan", "last_letter", "edit", "edit:2,1", "dtw"];
    for name in kinds {
        let kind: MetricKind = name.parse()?;
        let raa = build_metric(&kind);
        // `null` means the metric is undefined for the pair, e.g. different lengths.
        let d = evaluate(&raa, &v, &w);
        println!("{name:>20}: {}", serde_json::to_string(&d)?);
    }
    Ok(())
}
