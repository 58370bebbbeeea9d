use std::ffi::{CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use graded_fca_ffi::*;

const HEALTH_CSV: &str = ",S1,S2,S3,S4\nP1,1,0.1,0.3,0\nP2,0.3,0.8,0.5,0\nP3,0.3,1,0.7,0.5\nP4,0.1,0.1,1,1\n";

fn manifest_dir() -> &'static Path {
    Path::new(env!("CARGO_MANIFEST_DIR"))
}

fn last_error() -> String {
    let msg = fca_last_error_message();
    assert!(!msg.is_null());
    unsafe { CStr::from_ptr(msg) }.to_string_lossy().into_owned()
}

fn mv_handle() -> *mut FcaMvContext {
    let text = CString::new(HEALTH_CSV).unwrap();
    let mut mv = ptr::null_mut();
    assert_eq!(unsafe { fca_mv_parse_csv(text.as_ptr(), &mut mv) }, FcaStatus::Ok);
    mv
}

fn intent(lattice: *const FcaLattice, index: usize) -> Vec<usize> {
    let mut buf = [0usize; 8];
    let mut len = 0;
    let status = unsafe { fca_lattice_concept_intent(lattice, index, buf.as_mut_ptr(), buf.len(), &mut len) };
    assert_eq!(status, FcaStatus::Ok);
    buf[..len].to_vec()
}

#[test]
fn threshold_and_lattice_match_the_sample() {
    let mv = mv_handle();
    let mut ctx = ptr::null_mut();
    unsafe {
        assert_eq!(fca_mv_threshold(mv, 0.5, &mut ctx), FcaStatus::Ok);
        assert_eq!(fca_context_object_count(ctx), 4);
        assert_eq!(fca_context_attribute_count(ctx), 4);

        let mut lattice = ptr::null_mut();
        assert_eq!(fca_lattice_build(ctx, &mut lattice), FcaStatus::Ok);
        assert_eq!(fca_lattice_concept_count(lattice), 7);
        let intents: Vec<Vec<usize>> = (0..7).map(|i| intent(lattice, i)).collect();
        assert_eq!(intents, vec![vec![], vec![2], vec![2, 3], vec![1, 2], vec![1, 2, 3], vec![0], vec![0, 1, 2, 3]]);
        assert_eq!(intent(lattice, fca_lattice_top(lattice)), Vec::<usize>::new());
        assert_eq!(intent(lattice, fca_lattice_bottom(lattice)), vec![0, 1, 2, 3]);

        let covers = fca_lattice_cover_count(lattice);
        assert!(covers >= 6);
        for i in 0..covers {
            let (mut lo, mut up) = (0, 0);
            assert_eq!(fca_lattice_cover(lattice, i, &mut lo, &mut up), FcaStatus::Ok);
            let (a, b) = (intent(lattice, lo), intent(lattice, up));
            assert!(b.iter().all(|x| a.contains(x)) && a.len() > b.len());
        }
        let (mut lo, mut up) = (0, 0);
        assert_eq!(fca_lattice_cover(lattice, covers, &mut lo, &mut up), FcaStatus::OutOfRange);

        fca_lattice_free(lattice);
        fca_context_free(ctx);
        fca_mv_free(mv);
    }
}

#[test]
fn small_buffers_report_the_needed_length() {
    let mv = mv_handle();
    let mut ctx = ptr::null_mut();
    unsafe {
        fca_mv_threshold(mv, 0.5, &mut ctx);
        let mut lattice = ptr::null_mut();
        fca_lattice_build(ctx, &mut lattice);
        let bottom = fca_lattice_bottom(lattice);
        let mut buf = [0usize; 2];
        let mut len = 0;
        let status = fca_lattice_concept_intent(lattice, bottom, buf.as_mut_ptr(), buf.len(), &mut len);
        assert_eq!(status, FcaStatus::BufferTooSmall);
        assert_eq!(len, 4);
        let status = fca_lattice_concept_extent(lattice, bottom, buf.as_mut_ptr(), buf.len(), &mut len);
        assert_eq!(status, FcaStatus::Ok);
        assert_eq!(len, 0);
        fca_lattice_free(lattice);
        fca_context_free(ctx);
        fca_mv_free(mv);
    }
}

#[test]
fn closure_of_s2_adds_s3() {
    let mv = mv_handle();
    let mut ctx = ptr::null_mut();
    unsafe {
        fca_mv_threshold(mv, 0.5, &mut ctx);
        let input = [1usize];
        let mut out = [0usize; 4];
        let mut len = 0;
        let status = fca_closure_intent(ctx, input.as_ptr(), 1, out.as_mut_ptr(), 4, &mut len);
        assert_eq!(status, FcaStatus::Ok);
        assert_eq!(&out[..len], &[1, 2]);
        let bad = [9usize];
        let status = fca_closure_intent(ctx, bad.as_ptr(), 1, out.as_mut_ptr(), 4, &mut len);
        assert_eq!(status, FcaStatus::OutOfRange);
        fca_context_free(ctx);
        fca_mv_free(mv);
    }
}

#[test]
fn cxt_round_trips_through_the_abi() {
    let text = "B\n\n2\n2\n\no1\no2\na1\na2\nX.\n.X\n";
    let source = CString::new(text).unwrap();
    let mut ctx = ptr::null_mut();
    unsafe {
        assert_eq!(fca_context_parse_cxt(source.as_ptr(), &mut ctx), FcaStatus::Ok);
        let mut out = ptr::null_mut();
        assert_eq!(fca_context_to_cxt(ctx, &mut out), FcaStatus::Ok);
        assert_eq!(CStr::from_ptr(out).to_str().unwrap(), text);
        fca_string_free(out);
        fca_context_free(ctx);
    }
}

#[test]
fn graded_json_matches_the_cli_document() {
    let mv = mv_handle();
    let mut out = ptr::null_mut();
    unsafe {
        assert_eq!(fca_graded_json(mv, 0.5, &mut out), FcaStatus::Ok);
        let doc: serde_json::Value = serde_json::from_str(CStr::from_ptr(out).to_str().unwrap()).unwrap();
        assert_eq!(doc["concepts"].as_array().unwrap().len(), 7);
        assert_eq!(doc["chain"], serde_json::json!([1.0, 4.0]));
        fca_string_free(out);
        assert_eq!(fca_graded_json(mv, 2.0, &mut out), FcaStatus::OutOfRange);
        assert!(last_error().contains("2"));
        fca_mv_free(mv);
    }
}

#[test]
fn scaling_iteration_certifies_the_origin() {
    let seed = [4.0, 4.0];
    let mut fixed = [f64::NAN; 2];
    let (mut steps, mut bound) = (0usize, 0.0f64);
    unsafe {
        let status = fca_iterate_scaling(0.1, seed.as_ptr(), 2, 1e-9, 10_000, fixed.as_mut_ptr(), &mut steps, &mut bound);
        assert_eq!(status, FcaStatus::Ok);
        assert_eq!(steps, 11);
        assert!(bound <= 1e-9);
        assert!(fixed.iter().all(|x| x.abs() <= bound));

        let status = fca_iterate_scaling(1.0, seed.as_ptr(), 2, 1e-9, 10, fixed.as_mut_ptr(), &mut steps, &mut bound);
        assert_eq!(status, FcaStatus::Numeric);
        let status = fca_iterate_scaling(0.9, seed.as_ptr(), 2, 1e-9, 3, fixed.as_mut_ptr(), &mut steps, &mut bound);
        assert_eq!(status, FcaStatus::NotConverged);
    }
}

#[test]
fn bad_input_sets_status_and_message() {
    let mut ctx = ptr::null_mut();
    let broken = CString::new("B\n\n1\n1\n\ng\nm\n?\n").unwrap();
    unsafe {
        assert_eq!(fca_context_parse_cxt(ptr::null(), &mut ctx), FcaStatus::NullPointer);
        assert_eq!(fca_context_parse_cxt(broken.as_ptr(), &mut ctx), FcaStatus::Parse);
        assert!(last_error().contains("line 8"));
        let invalid = b"B\n\xff\n\0";
        assert_eq!(fca_context_parse_cxt(invalid.as_ptr().cast(), &mut ctx), FcaStatus::InvalidUtf8);
        assert!(ctx.is_null());
        fca_context_free(ptr::null_mut());
        fca_string_free(ptr::null_mut());
    }
}

#[test]
fn header_declares_every_entry_point() {
    let header = std::fs::read_to_string(manifest_dir().join("include/graded_fca.h")).unwrap();
    for name in [
        "fca_last_error_message",
        "fca_string_free",
        "fca_context_parse_cxt",
        "fca_context_free",
        "fca_context_to_cxt",
        "fca_mv_parse_csv",
        "fca_mv_threshold",
        "fca_graded_json",
        "fca_lattice_build",
        "fca_lattice_concept_intent",
        "fca_lattice_cover",
        "fca_closure_intent",
        "fca_iterate_scaling",
        "FCA_STATUS_NOT_CONVERGED",
        "typedef struct FcaLattice FcaLattice",
    ] {
        assert!(header.contains(name), "header lacks {name}");
    }
}

fn target_dir() -> PathBuf {
    // target/<profile>/deps/<test binary>
    std::env::current_exe().unwrap().parent().unwrap().parent().unwrap().to_path_buf()
}

#[test]
fn c_program_links_against_the_static_library() {
    let lib = target_dir().join("libgraded_fca_ffi.a");
    let Ok(cc) = which_cc() else {
        eprintln!("no C compiler found; skipping");
        return;
    };
    if !lib.exists() {
        eprintln!("{} not built; skipping", lib.display());
        return;
    }
    let out_dir = Path::new(env!("CARGO_TARGET_TMPDIR"));
    let source = out_dir.join("smoke.c");
    let binary = out_dir.join("smoke");
    std::fs::write(
        &source,
        r#"#include <stdio.h>
#include "graded_fca.h"
int main(void) {
    const char *csv = ",S1,S2,S3,S4\nP1,1,0.1,0.3,0\nP2,0.3,0.8,0.5,0\nP3,0.3,1,0.7,0.5\nP4,0.1,0.1,1,1\n";
    FcaMvContext *mv = NULL;
    FcaContext *ctx = NULL;
    FcaLattice *lattice = NULL;
    if (fca_mv_parse_csv(csv, &mv) != FCA_STATUS_OK) return 1;
    if (fca_mv_threshold(mv, 0.5, &ctx) != FCA_STATUS_OK) return 2;
    if (fca_lattice_build(ctx, &lattice) != FCA_STATUS_OK) return 3;
    printf("%zu\n", fca_lattice_concept_count(lattice));
    fca_lattice_free(lattice);
    fca_context_free(ctx);
    fca_mv_free(mv);
    return 0;
}
"#,
    )
    .unwrap();
    let status = Command::new(&cc)
        .arg(&source)
        .arg("-I")
        .arg(manifest_dir().join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&binary)
        .status()
        .unwrap();
    assert!(status.success());
    let run = Command::new(&binary).output().unwrap();
    assert!(run.status.success());
    assert_eq!(String::from_utf8_lossy(&run.stdout).trim(), "7");
}

fn which_cc() -> Result<String, ()> {
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    match Command::new(&cc).arg("--version").output() {
        Ok(o) if o.status.success() => Ok(cc),
        _ => Err(()),
    }
}
