//! The file surface shared with the activation exporter: tensor bytes built
//! by hand the way a `struct.pack` writer would, manifests in the documented
//! TOML schema, and the on-disk activation layout.

use std::fmt::Write as _;

use texplain::exchange::{
    activation_path, read_tensor, read_tensor_file, write_tensor, write_tensor_file, ActivationSet,
    DatasetManifest, Role, Tensor,
};
use texplain::saliency::extract_feature;
use texplain::Error;

/// `b"TXA1" + pack("<II", 1, ndim) + pack("<%dI" % ndim, *shape) + data.astype("<f4").tobytes()`
fn exporter_bytes(shape: &[u32], data: &[f32]) -> Vec<u8> {
    let mut b = b"TXA1".to_vec();
    b.extend(1u32.to_le_bytes());
    b.extend((shape.len() as u32).to_le_bytes());
    for e in shape {
        b.extend(e.to_le_bytes());
    }
    for v in data {
        b.extend(v.to_le_bytes());
    }
    b
}

#[test]
fn hand_packed_bytes_parse_and_reserialize_identically() {
    let data: Vec<f32> = (0..24).map(|i| i as f32 * 0.5 - 3.0).collect();
    let bytes = exporter_bytes(&[2, 3, 4], &data);
    let t = read_tensor(bytes.as_slice()).unwrap();
    assert_eq!(t.shape(), &[2, 3, 4]);
    assert_eq!(t.data(), data.as_slice());
    let mut out = Vec::new();
    write_tensor(&t, &mut out).unwrap();
    assert_eq!(out, bytes);
}

#[test]
fn header_is_twelve_bytes_plus_extents() {
    let t = Tensor::new(vec![1], vec![1.0]).unwrap();
    let mut out = Vec::new();
    write_tensor(&t, &mut out).unwrap();
    assert_eq!(out, [b"TXA1".as_slice(), &[1, 0, 0, 0], &[1, 0, 0, 0], &[1, 0, 0, 0], &[0, 0, 0x80, 0x3f]].concat());
}

#[test]
fn error_classes_for_damaged_files() {
    let good = exporter_bytes(&[2, 2], &[1.0, 2.0, 3.0, 4.0]);
    let mut magic = good.clone();
    magic[3] = b'2';
    assert!(matches!(read_tensor(magic.as_slice()), Err(Error::Format(_))));
    let mut version = good.clone();
    version[4] = 2;
    assert!(matches!(read_tensor(version.as_slice()), Err(Error::Format(_))));
    assert!(matches!(read_tensor(&good[..good.len() - 1]), Err(Error::Corruption(_))));
    assert!(matches!(read_tensor(&good[..10]), Err(Error::Corruption(_))));
    let huge = exporter_bytes(&[u32::MAX, u32::MAX, u32::MAX, u32::MAX], &[]);
    assert!(matches!(read_tensor(huge.as_slice()), Err(Error::Corruption(_))));
    let five_dims = exporter_bytes(&[1, 1, 1, 1, 1], &[0.0]);
    assert!(matches!(read_tensor(five_dims.as_slice()), Err(Error::Corruption(_))));
    match read_tensor(exporter_bytes(&[3], &[0.0, f32::INFINITY, 1.0]).as_slice()) {
        Err(Error::Validation(m)) => assert!(m.contains('1'), "{m}"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn file_errors_name_the_path() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.z1.txa");
    std::fs::write(&path, b"TXA1\x01\x00").unwrap();
    let err = read_tensor_file(&path).unwrap_err();
    assert!(matches!(err, Error::Corruption(_)));
    assert!(err.to_string().contains("broken.z1.txa"), "{err}");
    let missing = read_tensor_file(&dir.path().join("absent.txa")).unwrap_err();
    assert!(matches!(missing, Error::Io { .. }));
}

const EXPORTED_MANIFEST: &str = r#"
[preprocessing]
resize = [384, 384]
crop = [352, 352]
crop_mode = "center"
mean = [0.485, 0.456, 0.406]
std = [0.229, 0.224, 0.225]

[[texture_classes]]
id = "striped"
samples = ["striped/striped_0002", "striped/striped_0001"]

[[sem_classes]]
id = "lot_b"
cps = 1520.5
samples = ["lot_b/img_01", "lot_b/img_00"]

[[texture_classes]]
id = "dotted"
samples = ["dotted/dotted_0001"]

[[sem_classes]]
id = "lot_a"
cps = 1410.0
samples = ["lot_a/img_00"]
"#;

#[test]
fn exported_manifest_is_canonicalized() {
    let m = DatasetManifest::from_toml_str(EXPORTED_MANIFEST).unwrap();
    let sem: Vec<_> = m.sem_classes().iter().map(|c| c.id.as_str()).collect();
    let tex: Vec<_> = m.texture_classes().iter().map(|c| c.id.as_str()).collect();
    assert_eq!(sem, ["lot_a", "lot_b"]);
    assert_eq!(tex, ["dotted", "striped"]);
    assert_eq!(m.sem_classes()[1].samples, ["lot_b/img_00", "lot_b/img_01"]);
    assert_eq!(m.find_sample("striped/striped_0001"), Some(("striped", Role::Interpretable)));
    assert_eq!(m.find_sample("lot_a/img_00"), Some(("lot_a", Role::Target)));
    let pre = m.preprocessing().unwrap();
    assert_eq!(pre["crop_mode"].as_str(), Some("center"));

    let again = DatasetManifest::from_toml_str(&m.to_toml_string()).unwrap();
    assert_eq!(again, m);
}

#[test]
fn manifest_schema_errors_name_the_entity() {
    let missing_cps = "[[sem_classes]]\nid = \"lot_q\"\nsamples = [\"q0\"]\n";
    match DatasetManifest::from_toml_str(missing_cps) {
        Err(Error::Schema(m)) => assert!(m.contains("lot_q"), "{m}"),
        other => panic!("{other:?}"),
    }
    let dup = "[[texture_classes]]\nid = \"a\"\nsamples = [\"x\"]\n[[texture_classes]]\nid = \"b\"\nsamples = [\"x\"]\n";
    match DatasetManifest::from_toml_str(dup) {
        Err(Error::Schema(m)) => assert!(m.contains("\"x\""), "{m}"),
        other => panic!("{other:?}"),
    }
    let empty = "[[texture_classes]]\nid = \"hollow\"\nsamples = []\n";
    match DatasetManifest::from_toml_str(empty) {
        Err(Error::Schema(m)) => assert!(m.contains("hollow"), "{m}"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn full_scale_target_manifest_is_accepted() {
    // 30 lots sharing 69,894 samples as evenly as possible
    let total = 69_894;
    let mut text = String::new();
    for lot in 0..30 {
        let n = total / 30 + usize::from(lot < total % 30);
        let _ = writeln!(text, "[[sem_classes]]\nid = \"lot_{lot:02}\"\ncps = {}\nsamples = [", 1000 + 7 * lot);
        for i in 0..n {
            let _ = writeln!(text, "\"lot_{lot:02}/{i:05}\",");
        }
        text.push_str("]\n");
    }
    let m = DatasetManifest::from_toml_str(&text).unwrap();
    assert_eq!(m.sem_classes().len(), 30);
    assert_eq!(m.sample_count(), total);
}

#[test]
fn activation_layout_round_trips_reference_geometry() {
    // stage shapes of a residual backbone at 352 x 352 input
    let shapes = [[64, 88, 88], [256, 88, 88], [512, 44, 44], [1024, 22, 22], [2048, 11, 11]];
    let dir = tempfile::tempdir().unwrap();
    let stages = shapes.map(|[c, h, w]| {
        let data = (0..c * h * w).map(|i| ((i * 7919) % 1000) as f32 / 1000.0).collect();
        Tensor::new(vec![c, h, w], data).unwrap()
    });
    let set = ActivationSet::new("dotted/dotted_0001", "dotted", stages).unwrap();
    set.save(dir.path()).unwrap();
    assert!(dir.path().join("dotted/dotted_0001.z5.txa").is_file());
    assert_eq!(
        activation_path(dir.path(), "dotted/dotted_0001", 3),
        dir.path().join("dotted/dotted_0001.z3.txa")
    );
    let back = ActivationSet::load(dir.path(), "dotted/dotted_0001", "dotted").unwrap();
    for (a, b) in set.stages().iter().zip(back.stages()) {
        assert!(a.bit_eq(b));
    }
    assert_eq!(extract_feature(&back, 5).unwrap().len(), 2048);
}

#[test]
fn increasing_extents_are_rejected() {
    let t = |h: usize| Tensor::new(vec![2, h, h], vec![0.5; 2 * h * h]).unwrap();
    let err = ActivationSet::new("s", "c", [t(4), t(4), t(2), t(4), t(1)]).unwrap_err();
    assert!(matches!(err, Error::Validation(_)), "{err:?}");
}

#[test]
fn rewriting_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let t = Tensor::new(vec![3, 2], vec![0.1, -0.0, 1e-40, 3.4e38, -7.25, 0.0]).unwrap();
    let (a, b) = (dir.path().join("a.txa"), dir.path().join("b.txa"));
    write_tensor_file(&t, &a).unwrap();
    write_tensor_file(&read_tensor_file(&a).unwrap(), &b).unwrap();
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}
