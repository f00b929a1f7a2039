use khf_core::basepoint::x_action;
use khf_core::spectral::{leray_pages, twin_arrows_check};
use khf_core::theories::load_plugin;
use khf_core::{build_complex, Error};

fn asset() -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/assets/twin_arrows_hopf.toml")
}

#[test]
fn diagonal_face_is_nonzero_but_d2_vanishes() {
    let spec = load_plugin(asset()).unwrap();
    assert!(!spec.faces[0].matrix.is_zero());
    let d = spec.diagram.clone().unwrap();
    let cc = build_complex(&d, &spec).unwrap();
    let ss = leray_pages(&cc.complex, 4).unwrap();
    let plain = build_complex(&d, &khf_core::TheorySpec::khovanov()).unwrap();
    // the face jumps two filtration levels, so page 2 is Khovanov homology
    assert_eq!(ss.pages[2].dims, plain.complex.homology().unwrap().dims);
    assert_eq!(ss.stabilized_at, Some(2));
}

#[test]
fn nonzero_d2_face_loses_the_section_and_the_twin_arrows() {
    let text = "diagram = \"X(4,1,3,2) X(2,3,1,4)\"\nrelation = \"X^2\"\n\
[[face]]\nsource = \"00\"\ntarget = \"11\"\nrows = [\"0000\", \"0100\", \"0000\", \"0000\"]\n";
    let spec = khf_core::theories::parse_plugin(text).unwrap();
    let d = spec.diagram.clone().unwrap();
    let cc = build_complex(&d, &spec).unwrap();
    let ss = leray_pages(&cc.complex, 4).unwrap();
    let totals: Vec<usize> = ss.pages.iter().map(|p| p.total()).collect();
    assert_eq!(totals, vec![12, 12, 4, 2]);
    // only edge 4 carries a basepoint action, and ν is no longer a chain map
    for p in 1..=3 {
        assert!(matches!(x_action(&cc, p), Err(Error::NotChainMap(_))), "edge {p}");
    }
    let r = twin_arrows_check(&cc, 4, 4).unwrap();
    assert!(!r.section_is_chain_map);
    assert!(r.pages[..3].iter().all(|p| p.pass));
    assert!(!r.pages[3].pass && !r.pass);
}

#[test]
fn twin_arrows_at_supported_basepoints() {
    let spec = load_plugin(asset()).unwrap();
    let d = spec.diagram.clone().unwrap();
    let cc = build_complex(&d, &spec).unwrap();
    for &p in d.basepoints() {
        let rep = twin_arrows_check(&cc, p, 4).unwrap();
        assert!(rep.pass && rep.section_is_chain_map, "basepoint {p}: {rep:?}");
        assert!(rep.pages.len() >= 3);
    }
}

#[test]
fn unsupported_basepoint_is_not_a_chain_map() {
    let spec = load_plugin(asset()).unwrap();
    let d = spec.diagram.clone().unwrap();
    let cc = build_complex(&d, &spec).unwrap();
    assert!(matches!(x_action(&cc, 3), Err(Error::NotChainMap(_))));
}
