use std::ffi::{CStr, CString};
use std::ptr;

use proxrank2_ffi::*;

fn take_string(p: *mut std::ffi::c_char) -> String {
    let s = unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_owned();
    unsafe { prx2_string_free(p) };
    s
}

fn family(tag: &str, depth: u32) -> *mut Prx2Spec {
    let tag = CString::new(tag).unwrap();
    let mut spec = ptr::null_mut();
    assert_eq!(unsafe { prx2_spec_family(tag.as_ptr(), depth, &mut spec) }, Prx2Status::Ok);
    spec
}

#[test]
fn spec_lifecycle() {
    let spec = family("prop55", 4);
    let mut depth = 0;
    assert_eq!(unsafe { prx2_spec_depth(spec, &mut depth) }, Prx2Status::Ok);
    assert_eq!(depth, 4);
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { prx2_circuit_length(spec, 3, &mut s) }, Prx2Status::Ok);
    assert_eq!(take_string(s), "31");
    assert_eq!(unsafe { prx2_spec_to_json(spec, &mut s) }, Prx2Status::Ok);
    let json = CString::new(take_string(s)).unwrap();
    let mut again = ptr::null_mut();
    assert_eq!(unsafe { prx2_spec_from_json(json.as_ptr(), &mut again) }, Prx2Status::Ok);
    unsafe {
        prx2_spec_free(again);
        prx2_spec_free(spec);
    }
}

#[test]
fn errors_carry_messages() {
    let spec = family("prop55", 2);
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { prx2_circuit_length(spec, 9, &mut s) }, Prx2Status::LevelOutOfRange);
    let msg = unsafe { CStr::from_ptr(prx2_last_error()) }.to_str().unwrap();
    assert!(msg.contains('9'), "{msg}");
    let mut depth = 0;
    assert_eq!(unsafe { prx2_spec_depth(spec, &mut depth) }, Prx2Status::Ok);
    assert!(prx2_last_error().is_null());
    assert_eq!(unsafe { prx2_spec_depth(ptr::null(), &mut depth) }, Prx2Status::NullPointer);
    let bad = CString::new("{").unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { prx2_spec_from_json(bad.as_ptr(), &mut out) }, Prx2Status::InvalidInput);
    let tag = CString::new("nosuch").unwrap();
    assert_eq!(unsafe { prx2_spec_family(tag.as_ptr(), 0, &mut out) }, Prx2Status::InvalidInput);
    unsafe { prx2_spec_free(spec) };
}

#[test]
fn gaps_through_buffer() {
    let spec = family("prop55", 3);
    let mut buf = [0u64; 8];
    let mut len = 0;
    let st = unsafe { prx2_gap_set(spec, 2, 1, 1, 1, 10, 1 << 20, buf.as_mut_ptr(), buf.len(), &mut len) };
    assert_eq!(st, Prx2Status::Ok);
    assert_eq!(&buf[..len], &[3]);
    let st = unsafe { prx2_gap_set(spec, 4, 1, 0, 0, 60, 1 << 20, buf.as_mut_ptr(), 0, &mut len) };
    assert_eq!(st, Prx2Status::BufferTooSmall);
    assert!(len > 0);
    // A cap below l_4 switches to the compressed route, which must agree.
    let mut wide = [0u64; 64];
    let mut narrow = [0u64; 64];
    let (mut a, mut b) = (0, 0);
    assert_eq!(unsafe { prx2_gap_set(spec, 4, 1, 0, 0, 60, 1 << 20, wide.as_mut_ptr(), 64, &mut a) }, Prx2Status::Ok);
    assert_eq!(unsafe { prx2_gap_set(spec, 4, 1, 0, 0, 60, 4, narrow.as_mut_ptr(), 64, &mut b) }, Prx2Status::Ok);
    assert_eq!(&wide[..a], &narrow[..b]);
    unsafe { prx2_spec_free(spec) };
}

#[test]
fn ergodicity_verdict() {
    let spec = family("prop55", 8);
    let mut v = Prx2Verdict::Undetermined;
    let mut json = ptr::null_mut();
    assert_eq!(unsafe { prx2_classify_ergodicity(spec, 8, &mut v, &mut json) }, Prx2Status::Ok);
    assert_eq!(v, Prx2Verdict::TwoErgodic);
    assert!(take_string(json).contains("TwoErgodic"));
    unsafe { prx2_spec_free(spec) };
}

#[test]
fn diagram_round_trip_and_vershik() {
    let spec = family("prop55", 3);
    let mut d = ptr::null_mut();
    assert_eq!(unsafe { prx2_diagram_from_spec(spec, 4, &mut d) }, Prx2Status::Ok);
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { prx2_diagram_export(d, Prx2Format::Dot, &mut s) }, Prx2Status::Ok);
    assert!(take_string(s).starts_with("digraph"));
    assert_eq!(unsafe { prx2_diagram_export(d, Prx2Format::Json, &mut s) }, Prx2Status::Ok);
    let json = CString::new(take_string(s)).unwrap();
    let mut d2 = ptr::null_mut();
    assert_eq!(unsafe { prx2_diagram_from_json(json.as_ptr(), &mut d2) }, Prx2Status::Ok);
    let mut back = ptr::null_mut();
    assert_eq!(unsafe { prx2_diagram_to_spec(d2, &mut back) }, Prx2Status::Ok);
    let mut depth = 0;
    unsafe { prx2_spec_depth(back, &mut depth) };
    assert_eq!(depth, 3);

    let (mut end, mut ords) = (1usize, [1u64, 1, 1, 1]);
    let l4 = 127;
    for _ in 1..l4 {
        assert_eq!(unsafe { prx2_vershik_successor(d, &mut end, ords.as_mut_ptr(), 4) }, Prx2Status::Ok);
    }
    assert_eq!(ords[3], 7);
    assert_eq!(unsafe { prx2_vershik_successor(d, &mut end, ords.as_mut_ptr(), 4) }, Prx2Status::TruncatedMaximal);
    unsafe {
        prx2_spec_free(back);
        prx2_diagram_free(d2);
        prx2_diagram_free(d);
        prx2_spec_free(spec);
    }
}

#[test]
fn header_is_generated_and_compiles() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR"));
    let header = dir.join("include").join("proxrank2.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for name in ["prx2_spec_family", "prx2_vershik_successor", "Prx2Status", "PRX2_STATUS_TRUNCATED_MAXIMAL", "typedef struct Prx2Spec Prx2Spec"] {
        assert!(text.contains(name), "header lacks {name}");
    }
    let probe = std::env::temp_dir().join("proxrank2_header_probe.c");
    std::fs::write(&probe, "#include \"proxrank2.h\"\nint main(void) { return PRX2_STATUS_OK; }\n").unwrap();
    let status = std::process::Command::new("cc")
        .args(["-fsyntax-only", "-std=c99", "-I"])
        .arg(dir.join("include"))
        .arg(&probe)
        .status();
    if let Ok(status) = status {
        assert!(status.success(), "header does not compile as C99");
    }
}
