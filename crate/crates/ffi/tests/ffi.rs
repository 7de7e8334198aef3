use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::ptr;

use gda_ffi::*;

const QUATERNION: &str = "ambient_rank = 2\ngamma_e = [[1, 0], [0, 1]]\ncommutation = [[\"1\", \"-1\"], [\"-1\", \"1\"]]\n[field]\nkind = \"gf\"\np = 13\n";

const IDENTITY: &str = r#"{"entries": [[[{"degree": [0, 0], "coeff": "1"}], []], [[], [{"degree": [0, 0], "coeff": "1"}]]]}"#;

const SINGULAR: &str = r#"{"entries": [[[{"degree": [0, 0], "coeff": "1"}], []], [[{"degree": [0, 0], "coeff": "1"}], []]]}"#;

fn load(spec: &str) -> (GdaStatus, *mut GdaAlgebra) {
    let c = CString::new(spec).unwrap();
    let mut h = ptr::null_mut();
    let st = unsafe { gda_algebra_from_toml(c.as_ptr(), &mut h) };
    (st, h)
}

fn take(out: *mut std::ffi::c_char) -> serde_json::Value {
    let s = unsafe { CStr::from_ptr(out) }.to_str().unwrap().to_string();
    unsafe { gda_string_free(out) };
    serde_json::from_str(&s).unwrap()
}

fn last_error() -> String {
    let p = gda_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn describe_and_sk() {
    let (st, h) = load(QUATERNION);
    assert_eq!(st, GdaStatus::Ok);
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { gda_algebra_describe(h, &mut out) }, GdaStatus::Ok);
    let v = take(out);
    assert_eq!((v["s"].as_u64(), v["e"].as_u64()), (Some(2), Some(2)));
    assert_eq!(unsafe { gda_sk(h, 2, 1, 0, &mut out) }, GdaStatus::Ok);
    let v = take(out);
    assert_eq!(v["sk_h"]["order"], 2);
    assert_eq!(v["agrees"], true);
    unsafe { gda_algebra_free(h) };
}

#[test]
fn matrix_calls() {
    let (_, h) = load(QUATERNION);
    let id = CString::new(IDENTITY).unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(
        unsafe { gda_bruhat(h, id.as_ptr(), &mut out) },
        GdaStatus::Ok
    );
    let v = take(out);
    assert_eq!(v["perm"], serde_json::json!([0, 1]));
    assert_eq!(v["certificate"], serde_json::json!([]));
    assert_eq!(unsafe { gda_det(h, id.as_ptr(), &mut out) }, GdaStatus::Ok);
    let v = take(out);
    assert_eq!(v["in_kernel"], true);
    assert_eq!(unsafe { gda_nrd(h, id.as_ptr(), &mut out) }, GdaStatus::Ok);
    assert_eq!(take(out)["in_sh1"], true);
    let sing = CString::new(SINGULAR).unwrap();
    assert_eq!(
        unsafe { gda_bruhat(h, sing.as_ptr(), &mut out) },
        GdaStatus::Singular
    );
    assert!(last_error().starts_with("Singular"));
    unsafe { gda_algebra_free(h) };
}

#[test]
fn error_codes() {
    let (st, h) = load("ambient_rank = 1\ngamma_e = [[1]]\n[field]\nkind = \"gf\"\np = 12\n");
    assert_eq!(st, GdaStatus::InvalidInput);
    assert!(h.is_null());
    assert!(last_error().contains("line 3"));
    let mut h = ptr::null_mut();
    assert_eq!(
        unsafe { gda_algebra_from_toml(ptr::null(), &mut h) },
        GdaStatus::NullPointer
    );
    let mut out = ptr::null_mut();
    assert_eq!(
        unsafe { gda_sk(ptr::null(), 2, 0, 0, &mut out) },
        GdaStatus::NullPointer
    );
    let (_, h) = load("ambient_rank = 1\ngamma_e = [[1]]\n[field]\nkind = \"gf\"\np = 2\n");
    assert_eq!(
        unsafe { gda_sk(h, 2, 0, 0, &mut out) },
        GdaStatus::ExceptionalF2
    );
    unsafe { gda_algebra_free(h) };
    unsafe { gda_algebra_free(ptr::null_mut()) };
    unsafe { gda_string_free(ptr::null_mut()) };
    let v = unsafe { CStr::from_ptr(gda_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_declares_exports() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let header = std::fs::read_to_string(dir.join("include/gda.h")).unwrap();
    for f in [
        "gda_algebra_from_toml",
        "gda_algebra_free",
        "gda_algebra_describe",
        "gda_bruhat",
        "gda_det",
        "gda_nrd",
        "gda_sk",
        "gda_string_free",
        "gda_last_error_message",
        "gda_version",
        "typedef struct GdaAlgebra GdaAlgebra",
        "GDA_STATUS_SINGULAR = 4",
    ] {
        assert!(header.contains(f), "{f} missing from header");
    }
}

/// Compiles and runs a C program against the header and static library
/// when a C compiler is available.
#[test]
fn c_program_links() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let target = dir.join("../../target").join(if cfg!(debug_assertions) {
        "debug"
    } else {
        "release"
    });
    let lib = target.join("deps/libgda_ffi.a");
    if !lib.exists()
        || std::process::Command::new("cc")
            .arg("--version")
            .output()
            .is_err()
    {
        eprintln!("skipping: no static library or C compiler");
        return;
    }
    let tmp = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    let exe = tmp.join("c_smoke");
    let status = std::process::Command::new("cc")
        .arg(dir.join("tests/c_smoke.c"))
        .arg("-I")
        .arg(dir.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success());
    let out = std::process::Command::new(&exe).output().unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["sk_h"]["order"], 2);
}
