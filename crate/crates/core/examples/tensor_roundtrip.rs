//! Write an activation tensor in the exchange format, read it back, and show
//! what a damaged file looks like to the reader.

use texplain::exchange::{read_tensor, read_tensor_file, write_tensor_file, Tensor};

fn main() -> texplain::Result<()> {
    let dir = std::env::temp_dir().join("texplain-tensor-example");
    std::fs::create_dir_all(&dir).map_err(|e| texplain::Error::io(&dir, e))?;
    let path = dir.join("sample.z1.txa");

    let data: Vec<f32> = (0..2 * 3 * 4).map(|i| (i as f32).sqrt()).collect();
    let t = Tensor::new(vec![2, 3, 4], data)?;
    write_tensor_file(&t, &path)?;
    let back = read_tensor_file(&path)?;
    println!("wrote and read {:?}, bit-identical: {}", back.shape(), back.bit_eq(&t));

    let bytes = std::fs::read(&path).map_err(|e| texplain::Error::io(&path, e))?;
    for (what, damaged) in [
        ("truncated payload", bytes[..bytes.len() - 2].to_vec()),
        ("wrong magic", [b"TXB1".as_slice(), &bytes[4..]].concat()),
    ] {
        println!("{what}: {}", read_tensor(damaged.as_slice()).unwrap_err());
    }
    Ok(())
}
