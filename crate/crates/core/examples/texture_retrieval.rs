//! Nearest-neighbor retrieval over texture features: query with one image,
//! then with a whole class.

use texplain::pipeline::extract_features;
use texplain::synth::{gen_texture_dataset, TextureDatasetSpec, TextureKind};

fn main() -> texplain::Result<()> {
    let spec = TextureDatasetSpec { kinds: TextureKind::ALL.to_vec(), samples_per_class: 8, size: 64, seed: 4 };
    let data = gen_texture_dataset(&spec)?;
    let features = extract_features(&data.encode()?, 5)?;
    let index = features.texture_index(&data.manifest)?;
    println!("indexed {} textures of length {}", index.len(), index.dim());

    let query = features.get("checkered_003").expect("generated above");
    for n in index.knn(query, 5)?.neighbors {
        println!("  {:>14}  {:<10} {:.4}", n.sample_id, n.class_id, n.distance);
    }

    let class: Vec<_> = ["striped_000", "striped_001", "striped_002"]
        .iter()
        .filter_map(|id| features.get(id).cloned())
        .collect();
    println!("closest to three striped samples on average:");
    for n in index.rank_by_class(&class, 5)?.neighbors {
        println!("  {:>14}  {:<10} {:.4}", n.sample_id, n.class_id, n.distance);
    }
    Ok(())
}
