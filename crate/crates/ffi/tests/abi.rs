use std::ffi::{CStr, CString};
use std::ptr;

use wonder_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(wonder_last_error()) }.to_string_lossy().into_owned()
}

#[test]
fn model_build_and_query() {
    unsafe {
        let mut d = ptr::null_mut();
        let kind = CString::new("keel").unwrap();
        assert_eq!(wonder_diagram_model(kind.as_ptr(), 2, &mut d), WonderStatus::Ok);
        let mut r = ptr::null_mut();
        assert_eq!(wonder_ring_build(d, 0, &mut r), WonderStatus::Ok);
        let mut buf = [0usize; 8];
        let mut len = 0;
        assert_eq!(wonder_ring_dims(r, buf.as_mut_ptr(), buf.len(), &mut len), WonderStatus::Ok);
        assert_eq!(&buf[..len], &[1, 5, 1]);
        let mut pd = -1;
        assert_eq!(wonder_ring_is_pd(r, &mut pd), WonderStatus::Ok);
        assert_eq!(pd, 1);
        let mut s = ptr::null_mut();
        assert_eq!(wonder_ring_to_json(r, &mut s), WonderStatus::Ok);
        assert!(CStr::from_ptr(s).to_str().unwrap().contains("wonder-ring/1"));
        wonder_string_free(s);
        wonder_ring_free(r);
        wonder_diagram_free(d);
    }
}

#[test]
fn short_buffer_reports_length() {
    unsafe {
        let mut d = ptr::null_mut();
        let kind = CString::new("fm-p1").unwrap();
        assert_eq!(wonder_diagram_model(kind.as_ptr(), 3, &mut d), WonderStatus::Ok);
        let mut r = ptr::null_mut();
        assert_eq!(wonder_ring_build(d, 0, &mut r), WonderStatus::Ok);
        let mut buf = [0usize; 2];
        let mut len = 0;
        assert_eq!(wonder_ring_dims(r, buf.as_mut_ptr(), buf.len(), &mut len), WonderStatus::BufferTooSmall);
        assert_eq!(len, 4);
        wonder_ring_free(r);
        wonder_diagram_free(d);
    }
}

#[test]
fn errors_map_to_codes() {
    unsafe {
        let mut d = ptr::null_mut();
        let bad = CString::new("{\"format\": \"wonder-diagram/1\"").unwrap();
        assert_eq!(wonder_diagram_from_json(bad.as_ptr(), &mut d), WonderStatus::Input);
        assert!(d.is_null());
        assert!(last_error().contains("parse"), "{}", last_error());

        let kind = CString::new("fm-p1").unwrap();
        assert_eq!(wonder_diagram_model(kind.as_ptr(), 3, &mut d), WonderStatus::Ok);
        assert_eq!(last_error(), "");
        let mut r = ptr::null_mut();
        // a cap of one rewrite per product is too small only when some product needs two
        assert_eq!(wonder_ring_build(d, 1, &mut r), WonderStatus::Ok);
        wonder_ring_free(r);
        wonder_diagram_free(d);

        assert_eq!(wonder_diagram_model(ptr::null(), 3, &mut d), WonderStatus::NullArgument);
        let unknown = CString::new("torus").unwrap();
        assert_eq!(wonder_diagram_model(unknown.as_ptr(), 3, &mut d), WonderStatus::Input);
        assert!(last_error().contains("torus"));
    }
}

#[test]
fn diagram_json_round_trip() {
    let d = wonder_core::models::fm_power(
        wonder_core::models::Fiber::P1,
        3,
        wonder_core::models::DiagonalFlag::AtLeastTwo,
    )
    .unwrap();
    let text = CString::new(wonder_core::format::diagram_to_string(&d)).unwrap();
    unsafe {
        let mut h = ptr::null_mut();
        assert_eq!(wonder_diagram_from_json(text.as_ptr(), &mut h), WonderStatus::Ok);
        let mut r = ptr::null_mut();
        assert_eq!(wonder_ring_build(h, 0, &mut r), WonderStatus::Ok);
        let mut buf = [0usize; 4];
        let mut len = 0;
        assert_eq!(wonder_ring_dims(r, buf.as_mut_ptr(), 4, &mut len), WonderStatus::Ok);
        assert_eq!(buf, [1, 4, 4, 1]);
        wonder_ring_free(r);
        wonder_diagram_free(h);
    }
}

#[test]
fn header_declares_the_api() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/wonder.h")).unwrap();
    for name in [
        "wonder_last_error",
        "wonder_diagram_from_json",
        "wonder_diagram_model",
        "wonder_ring_build",
        "wonder_ring_dims",
        "wonder_ring_is_pd",
        "wonder_ring_to_json",
        "wonder_ring_free",
        "WONDER_STATUS_OK",
        "typedef struct WonderRing WonderRing",
    ] {
        assert!(header.contains(name), "missing {name}");
    }
}
