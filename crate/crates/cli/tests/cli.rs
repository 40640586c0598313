use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rsgt::io::{read_image, write_metaimage, write_png_gray, BitDepth};
use rsgt::{NormalizationPolicy, ScalarImage, TransformDocument, VoxelData};

fn rsgt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rsgt"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn ct_volume(dir: &Path) -> PathBuf {
    let hu: Vec<i16> = (0..10 * 9 * 4).map(|i| ((i * 131) % 4600) as i16 - 1300).collect();
    let img = ScalarImage::new(&[10, 9, 4], VoxelData::Int16(hu)).unwrap();
    let p = dir.join("ct.mha");
    write_metaimage(&img, &p).unwrap();
    p
}

fn mask(dir: &Path, name: &str, bits: &[u8]) -> PathBuf {
    let img = ScalarImage::new(&[bits.len(), 1], VoxelData::Uint8(bits.to_vec())).unwrap();
    let p = dir.join(name);
    write_metaimage(&img, &p).unwrap();
    p
}

#[test]
fn dice_self_comparison() {
    let dir = tempfile::tempdir().unwrap();
    let m = mask(dir.path(), "m.mha", &[0, 1, 1, 0, 3]);
    let out = rsgt(&["dice", s(&m), s(&m)]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&out.stdout), "1.0000\n");

    let other = mask(dir.path(), "o.mha", &[0, 1, 0, 1, 0]);
    let out = rsgt(&["dice", s(&m), s(&other)]);
    assert_eq!(String::from_utf8_lossy(&out.stdout), "0.4000\n");
}

#[test]
fn sample_is_deterministic() {
    let args = ["sample", "--seed", "7", "--n", "4", "--fmin", "0.2", "--fmax", "1.6"];
    let a = rsgt(&args);
    let b = rsgt(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let doc = TransformDocument::parse(&String::from_utf8(a.stdout).unwrap()).unwrap();
    assert_eq!(doc.spec.unwrap().seed, 7);
    assert!(a.stderr.is_empty());
}

#[test]
fn omitted_seed_is_reported() {
    let out = rsgt(&["sample"]);
    assert!(out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    let seed: u64 = err.trim().strip_prefix("seed: ").unwrap().parse().unwrap();
    let doc = TransformDocument::parse(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(doc.spec.unwrap().seed, seed);
}

#[test]
fn curve_spans_unit_interval() {
    let dir = tempfile::tempdir().unwrap();
    let doc = dir.path().join("t.json");
    assert!(rsgt(&["sample", "--seed", "3", "-o", s(&doc)]).status.success());
    let out = rsgt(&["curve", "-t", s(&doc)]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,y"));
    let ys: Vec<f64> = lines.map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert_eq!(ys.len(), 4096);
    assert_eq!(ys.iter().cloned().fold(f64::INFINITY, f64::min), 0.0);
    assert_eq!(ys.iter().cloned().fold(f64::NEG_INFINITY, f64::max), 1.0);

    let csv = dir.path().join("c.csv");
    assert!(rsgt(&["curve", "-t", s(&doc), "--size", "3", "-o", s(&csv)]).status.success());
    assert_eq!(fs::read_to_string(csv).unwrap().lines().count(), 4);
}

#[test]
fn exit_codes() {
    assert_eq!(rsgt(&[]).status.code(), Some(1));
    assert_eq!(rsgt(&["frobnicate"]).status.code(), Some(1));
    let out = rsgt(&["sample", "--bogus"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
    assert_eq!(rsgt(&["--help"]).status.code(), Some(0));
    assert_eq!(rsgt(&["sample", "--fmin", "2", "--fmax", "1"]).status.code(), Some(2));
    assert_eq!(rsgt(&["dice", "/nonexistent.mha", "/nonexistent.mha"]).status.code(), Some(2));
}

#[test]
fn bad_document_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let doc = dir.path().join("bad.json");
    fs::write(&doc, r#"{"frequencies":[1],"amplitudes":[1,2],"phases":[0]}"#).unwrap();
    let out = rsgt(&["curve", "-t", s(&doc)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("amplitudes"));
}

#[test]
fn rule_breaking_document_warns_but_runs() {
    let dir = tempfile::tempdir().unwrap();
    let doc = dir.path().join("w.json");
    fs::write(&doc, r#"{"frequencies":[1],"amplitudes":[3],"phases":[0]}"#).unwrap();
    let out = rsgt(&["curve", "-t", s(&doc), "--size", "8"]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning"));
}

#[test]
fn sidecar_reproduces_augmented_output() {
    let dir = tempfile::tempdir().unwrap();
    let ct = ct_volume(dir.path());
    let out_dir = dir.path().join("aug");
    let out = rsgt(&[
        "augment", "--modality", "ct", "--seed", "11", "--count", "2", "--invert", "every-other",
        "-o", s(&out_dir), s(&ct),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for k in 0..2 {
        let img = out_dir.join(format!("ct_aug{k:04}.mha"));
        let doc = out_dir.join(format!("ct_aug{k:04}.json"));
        let parsed = TransformDocument::parse(&fs::read_to_string(&doc).unwrap()).unwrap();
        assert_eq!(parsed.pipeline.as_ref().unwrap().inverted, k == 1);
        let again = dir.path().join(format!("again{k}.mha"));
        assert!(rsgt(&["apply", "-t", s(&doc), s(&ct), s(&again)]).status.success());
        assert_eq!(fs::read(&img).unwrap(), fs::read(&again).unwrap());
        let v = read_image(&img).unwrap();
        assert!(v.to_f64_vec().iter().all(|x| (0.0..=1.0).contains(x)));
    }
}

#[test]
fn draws_do_not_depend_on_batch_composition() {
    let dir = tempfile::tempdir().unwrap();
    let ct = ct_volume(dir.path());
    let full = dir.path().join("full");
    let single = dir.path().join("single");
    let base = ["augment", "--modality", "ct", "--seed", "5", "--invert", "random"];
    let mut a = base.to_vec();
    a.extend(["--count", "6", "-o", s(&full), s(&ct)]);
    let mut b = base.to_vec();
    b.extend(["--first-index", "4", "-o", s(&single), s(&ct)]);
    assert!(rsgt(&a).status.success());
    assert!(rsgt(&b).status.success());
    for ext in ["mha", "json"] {
        let name = format!("ct_aug0004.{ext}");
        assert_eq!(fs::read(full.join(&name)).unwrap(), fs::read(single.join(&name)).unwrap());
    }
}

#[test]
fn thread_cap_does_not_change_output() {
    let dir = tempfile::tempdir().unwrap();
    let ct = ct_volume(dir.path());
    let run = |threads: &str, out: &Path| {
        let st = Command::new(env!("CARGO_BIN_EXE_rsgt"))
            .env("RSGT_THREADS", threads)
            .args(["augment", "--modality", "ct", "--seed", "9", "--count", "3", "-o", s(out), s(&ct)])
            .status()
            .unwrap();
        assert!(st.success());
    };
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    run("1", &a);
    run("3", &b);
    for k in 0..3 {
        let name = format!("ct_aug{k:04}.mha");
        assert_eq!(fs::read(a.join(&name)).unwrap(), fs::read(b.join(&name)).unwrap());
    }
}

#[test]
fn identity_transform_equals_normalization() {
    let dir = tempfile::tempdir().unwrap();
    let ct = ct_volume(dir.path());
    let out_dir = dir.path().join("id");
    let out = rsgt(&["augment", "--modality", "ct", "--seed", "1", "--identity-transform", "-o", s(&out_dir), s(&ct)]);
    assert!(out.status.success());
    assert!(!out_dir.join("ct_aug0000.json").exists());
    let norm = dir.path().join("norm.mha");
    assert!(rsgt(&["normalize", "--modality", "ct", s(&ct), s(&norm)]).status.success());
    let a = read_image(out_dir.join("ct_aug0000.mha")).unwrap().to_f64_vec();
    let b = read_image(&norm).unwrap().to_f64_vec();
    assert!(a.iter().zip(&b).all(|(x, y)| (x - y).abs() <= 1e-7));
}

#[test]
fn normalize_invert_apply_chain() {
    let dir = tempfile::tempdir().unwrap();
    let vals: Vec<f32> = (0..400).map(|i| (i as f32 * 3.7).sin() * 500.0 + 600.0).collect();
    let mr = dir.path().join("mr.mhd");
    write_metaimage(&ScalarImage::from_f32(&[20, 20], vals).unwrap(), &mr).unwrap();

    let norm = dir.path().join("n.mha");
    assert!(rsgt(&["normalize", "--modality", "mr", s(&mr), s(&norm)]).status.success());
    let n = read_image(&norm).unwrap();
    let expected = NormalizationPolicy::mr().apply(&read_image(&mr).unwrap()).unwrap();
    assert_eq!(n, expected);

    let inv = dir.path().join("i.mha");
    assert!(rsgt(&["invert", s(&norm), s(&inv)]).status.success());
    let i = read_image(&inv).unwrap();
    for (a, b) in n.to_f64_vec().iter().zip(i.to_f64_vec()) {
        assert_eq!(b, (1.0 - *a as f32) as f64);
    }

    // invert refuses raw intensities
    assert_eq!(rsgt(&["invert", s(&mr), s(&inv)]).status.code(), Some(2));

    let doc = dir.path().join("t.json");
    assert!(rsgt(&["sample", "--seed", "2", "-o", s(&doc)]).status.success());
    let outp = dir.path().join("t.mha");
    assert!(rsgt(&["apply", "-t", s(&doc), s(&norm), s(&outp)]).status.success());
    // apply without a pipeline block needs normalized input
    assert_eq!(rsgt(&["apply", "-t", s(&doc), s(&mr), s(&outp)]).status.code(), Some(2));
}

#[test]
fn custom_ct_window_accepts_negative_bounds() {
    let dir = tempfile::tempdir().unwrap();
    let ct = ct_volume(dir.path());
    let out = dir.path().join("w.mha");
    let st = rsgt(&["normalize", "--modality", "ct", "--lo", "-200", "--hi", "400", s(&ct), s(&out)]);
    assert!(st.status.success(), "{}", String::from_utf8_lossy(&st.stderr));
    let expected = rsgt::normalize_fixed_window(&read_image(&ct).unwrap(), -200.0, 400.0).unwrap();
    assert_eq!(read_image(&out).unwrap(), expected);
}

#[test]
fn png_inputs_produce_png_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let vals: Vec<u16> = (0..64 * 32).map(|i| (i * 37 % 4000) as u16).collect();
    let png = dir.path().join("slice.png");
    write_png_gray(&ScalarImage::new(&[64, 32], VoxelData::Uint16(vals)).unwrap(), &png, BitDepth::Sixteen).unwrap();
    let out_dir = dir.path().join("o");
    let out = rsgt(&["augment", "--modality", "mr", "--seed", "4", "-o", s(&out_dir), s(&png)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let img = read_image(out_dir.join("slice_aug0000.png")).unwrap();
    assert_eq!(img.dims(), &[64, 32]);
}

#[test]
fn constant_mr_volume_fails_cleanly() {
    let dir = tempfile::tempdir().unwrap();
    let flat = dir.path().join("flat.mha");
    write_metaimage(&ScalarImage::from_f32(&[4, 4], vec![3.0; 16]).unwrap(), &flat).unwrap();
    let out = rsgt(&["augment", "--modality", "mr", "--seed", "1", "-o", s(&dir.path().join("x")), s(&flat)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("degenerate image"));
}

#[test]
fn in_process_run_matches_binary() {
    let code = rsgt_cli::run(["rsgt", "sample", "--seed", "1", "--n", "0"]);
    assert_eq!(code, rsgt_cli::EXIT_DATA);
    assert_eq!(rsgt_cli::run(["rsgt", "nope"]), rsgt_cli::EXIT_USAGE);
}
