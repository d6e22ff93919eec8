//! Golden serialization tests: the SurfaceData JSON layout (field order and
//! 17-significant-digit formatting) is a stable interface.

use assocfam::catalog::make_surface;
use assocfam::report::to_json;
use assocfam::surface::extract_point;

#[test]
fn surface_data_json_slice_golden() {
    let imm = make_surface("slice-product", &Default::default()).unwrap();
    let e = extract_point(&imm, 0.25, -0.125).unwrap();
    assert_eq!(to_json(&e.data), include_str!("golden/surface_data_slice.json"));
}

#[test]
fn surface_data_json_nil3_golden() {
    let imm = make_surface("nil3-vertical-plane", &Default::default()).unwrap();
    let e = extract_point(&imm, 0.3, 0.1).unwrap();
    assert_eq!(to_json(&e.data), include_str!("golden/surface_data_nil3.json"));
}

#[test]
fn surface_data_field_order_is_documented_layout() {
    let imm = make_surface("slice-product", &Default::default()).unwrap();
    let e = extract_point(&imm, 0.0, 0.0).unwrap();
    let json = to_json(&e.data);
    let order = [
        "\"g\"", "\"jmat\"", "\"nu\"", "\"eps3\"", "\"a\"", "\"t\"", "\"f\"", "\"h\"",
        "\"k\"", "\"aa\"", "\"nabla_a\"", "\"nabla_t\"", "\"df\"", "\"dh\"", "\"delta_aa\"",
    ];
    let mut last = 0;
    for key in order {
        let pos = json[last..].find(key).unwrap_or_else(|| panic!("{key} out of order"));
        last += pos;
    }
}
