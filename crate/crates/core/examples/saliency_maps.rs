//! Saliency of a synthetic texture under the stand-in encoder: per-stage
//! statistic maps, the fused map, and the location each stage's feature comes from.

use texplain::saliency::{combined_map, extract_feature, smoe_statistic};
use texplain::synth::{gen_texture, standin_encoder, TextureKind, TextureSpec};

fn main() -> texplain::Result<()> {
    let img = gen_texture(&TextureSpec::new(TextureKind::Dotted, 128, 128, 7))?;
    let set = standin_encoder(&img, "dotted_demo", "dotted")?;

    for stage in 1..=5 {
        let map = smoe_statistic(set.stage(stage)?, stage)?;
        let f = extract_feature(&set, stage)?;
        let src = f.source().expect("extracted features carry their source");
        let max = map.values().iter().cloned().fold(f64::MIN, f64::max);
        println!(
            "stage {stage}: map {:?}, peak {max:.4} at ({}, {}), feature length {}",
            map.shape(),
            src.row,
            src.col,
            f.len()
        );
    }

    let fused = combined_map(&set, &[0.2; 5])?;
    let out = std::env::temp_dir().join("texplain-saliency.pgm");
    fused.to_image().save_pgm(&out)?;
    println!("fused map {:?} written to {}", fused.shape(), out.display());
    Ok(())
}
