//! The command layer on a small synthetic dataset: generate it, cache
//! features, then retrieve, correlate and compare batches. Outputs land in
//! a temporary directory.

use texplain::commands::{cmd_batchsim, cmd_correlate, cmd_features, cmd_retrieve, cmd_synth, RunConfig};

fn main() -> texplain::Result<()> {
    let root = std::env::temp_dir().join("texplain-end-to-end");
    let _ = std::fs::remove_dir_all(&root);

    let mut synth = RunConfig { out_dir: root.join("data"), seed: 9, ..RunConfig::default() };
    synth.synth.classes = 6;
    synth.synth.samples_per_class = 12;
    synth.synth.texture_samples = 10;
    synth.synth.size = 64;
    let manifest = cmd_synth(&synth)?;
    println!("generated {} samples", manifest.sample_count());

    let cfg = RunConfig {
        manifest: Some(root.join("data/manifest.toml")),
        out_dir: root.join("run"),
        k: 5,
        ..RunConfig::default()
    };
    let s = cmd_features(&cfg)?;
    println!("features: {} computed, {} up to date", s.computed, s.skipped);
    let s = cmd_features(&cfg)?;
    println!("again:    {} computed, {} up to date", s.computed, s.skipped);

    let montage = cmd_retrieve(&cfg, "batch_05")?;
    let hits: Vec<_> = montage.neighbors.iter().map(|n| n.image.sample_id.as_str()).collect();
    println!("textures closest to batch_05: {hits:?}");

    print!("{}", cmd_correlate(&cfg)?.ranked_table(5));
    let m = cmd_batchsim(&cfg)?;
    println!("batch similarity over {} classes; outputs in {}", m.len(), cfg.out_dir.display());
    Ok(())
}
