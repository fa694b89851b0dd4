//! Material classes from two score regimes, compared by their texture profiles.

use texplain::correlation::SignConvention;
use texplain::pipeline::{analyze, extract_features};
use texplain::synth::{gen_material_dataset, gen_texture_dataset, MaterialSpec, TextureDatasetSpec, TextureKind};

use TextureKind::*;

fn main() -> texplain::Result<()> {
    let seed = 2;
    let materials =
        MaterialSpec::two_regimes(&[Dotted, Checkered], &[Blotchy, Constant], &[Striped, Noise], 8, 40, seed);
    let textures = TextureDatasetSpec { kinds: TextureKind::ALL.to_vec(), samples_per_class: 20, size: 128, seed };
    let data = gen_material_dataset(&materials)?.merge(gen_texture_dataset(&textures)?)?;
    let features = extract_features(&data.encode()?, 5)?;
    let analysis = analyze(&data.manifest, &features, SignConvention::Similarity)?;
    let m = analysis.batch_similarity(SignConvention::Similarity)?;

    print!("{:>9}", "");
    for id in m.class_ids() {
        print!("{id:>9}");
    }
    println!();
    for (i, id) in m.class_ids().iter().enumerate() {
        print!("{id:>9}");
        for j in 0..m.len() {
            print!("{:>9.3}", m.get(i, j));
        }
        println!();
    }
    Ok(())
}
