//! Which textures track a quality score? Materials are planted so that
//! dotted and checkered patches grow with the score and blotchy and constant
//! patches shrink with it.

use texplain::correlation::SignConvention;
use texplain::pipeline::{analyze, extract_features};
use texplain::synth::{gen_material_dataset, gen_texture_dataset, MaterialSpec, TextureDatasetSpec, TextureKind};

use TextureKind::*;

fn main() -> texplain::Result<()> {
    let seed = 1;
    let materials = MaterialSpec::planted(&[Dotted, Checkered], &[Blotchy, Constant], &[Striped, Noise], 8, 40, seed);
    let textures = TextureDatasetSpec { kinds: TextureKind::ALL.to_vec(), samples_per_class: 20, size: 128, seed };
    let data = gen_material_dataset(&materials)?.merge(gen_texture_dataset(&textures)?)?;
    let features = extract_features(&data.encode()?, 5)?;

    let analysis = analyze(&data.manifest, &features, SignConvention::Similarity)?;
    print!("{}", analysis.report.ranked_table(6));

    // the distance convention reverses every sign
    let flipped = analyze(&data.manifest, &features, SignConvention::Distance)?;
    let top = &flipped.report.entries[0];
    println!("under distances the top texture is {} ({:+.3})", top.texture_id, top.s);
    Ok(())
}
