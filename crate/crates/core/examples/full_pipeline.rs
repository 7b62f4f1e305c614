//! Every stage from synthetic corpus to energy report, written to a
//! directory (first argument, default `pipeline_out`).

use std::path::PathBuf;

use rdclass::pipeline::{cmd_pipeline, PipelineConfig};

fn main() -> rdclass::Result<()> {
    let out = PathBuf::from(
        std::env::args()
            .nth(1)
            .unwrap_or_else(|| "pipeline_out".into()),
    );
    let cfg = PipelineConfig {
        windows_per_class: 40,
        nodes_per_class: 20,
        ..PipelineConfig::default()
    };
    cmd_pipeline(&cfg, &out)?;
    print!(
        "{}",
        std::fs::read_to_string(out.join("accuracy.csv")).unwrap_or_default()
    );
    println!("outputs written to {}", out.display());
    Ok(())
}
