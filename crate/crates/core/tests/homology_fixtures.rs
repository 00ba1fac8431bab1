//! Fixture homology against hand-entered groups.

use polytopo::cohomology::{homology_of, ChainComplex, Group, HomologyGroups, Ring};
use polytopo::complex::SimplicialComplex;
use polytopo::fixtures;

fn g(rank: usize, torsion: &[u64]) -> Group {
    Group { rank, torsion: torsion.to_vec() }
}

/// Integral homology of each fixture, entered by hand.
fn integral_oracle(name: &str) -> Vec<Group> {
    match name {
        "circle" => vec![g(1, &[]), g(1, &[])],
        "s2" => vec![g(1, &[]), g(0, &[]), g(1, &[])],
        "s3" => vec![g(1, &[]), g(0, &[]), g(0, &[]), g(1, &[])],
        "torus" => vec![g(1, &[]), g(2, &[]), g(1, &[])],
        "rp2" => vec![g(1, &[]), g(0, &[2]), g(0, &[])],
        "klein" => vec![g(1, &[]), g(1, &[2]), g(0, &[])],
        "l31" => vec![g(1, &[]), g(0, &[3]), g(0, &[]), g(1, &[])],
        "rp4" => vec![g(1, &[]), g(0, &[2]), g(0, &[]), g(0, &[2]), g(0, &[])],
        "rp2xrp2" => vec![g(1, &[]), g(0, &[2, 2]), g(0, &[2]), g(0, &[2]), g(0, &[])],
        _ => unreachable!(),
    }
}

/// Mod-p Betti numbers entered by hand.
fn modp_oracle(name: &str, p: u64) -> Vec<usize> {
    match (name, p) {
        ("circle", _) => vec![1, 1],
        ("s2", _) => vec![1, 0, 1],
        ("s3", _) => vec![1, 0, 0, 1],
        ("torus", _) => vec![1, 2, 1],
        ("rp2", 2) => vec![1, 1, 1],
        ("rp2", _) => vec![1, 0, 0],
        ("klein", 2) => vec![1, 2, 1],
        ("klein", _) => vec![1, 1, 0],
        ("l31", 3) => vec![1, 1, 1, 1],
        ("l31", _) => vec![1, 0, 0, 1],
        _ => unreachable!(),
    }
}

const MAIN: [&str; 6] = ["circle", "s2", "torus", "rp2", "klein", "l31"];

#[test]
fn integral_groups_match_hand_oracle() {
    for name in MAIN.iter().chain(&["s3", "rp4", "rp2xrp2"]) {
        let k = fixtures::by_name(name).unwrap();
        let h = homology_of(&k, Ring::Z);
        assert_eq!(h.groups, integral_oracle(name), "{name}");
    }
}

#[test]
fn prime_field_groups_match_hand_oracle() {
    for name in MAIN.iter().chain(&["s3"]) {
        let k = fixtures::by_name(name).unwrap();
        for p in [2, 3, 5] {
            let h = homology_of(&k, Ring::Zp(p));
            assert_eq!(h.betti(), modp_oracle(name, p), "{name} mod {p}");
            assert!(h.groups.iter().all(|g| g.torsion.is_empty()));
        }
    }
}

#[test]
fn universal_coefficients_hold() {
    for name in fixtures::NAMES {
        let k = fixtures::by_name(name).unwrap();
        let hz = homology_of(&k, Ring::Z);
        for p in [2, 3, 5] {
            let hp = homology_of(&k, Ring::Zp(p));
            assert_eq!(hp.betti(), hz.universal_coefficient_dims(p).unwrap(), "{name} mod {p}");
        }
    }
}

#[test]
fn display_strings() {
    let h = homology_of(&fixtures::rp2(), Ring::Zp(2));
    assert_eq!(h.describe(), vec!["Z2", "Z2", "Z2"]);
    let h = homology_of(&fixtures::klein_bottle(), Ring::Z);
    assert_eq!(h.describe(), vec!["Z", "Z + Z2", "0"]);
}

#[test]
fn subdivision_preserves_homology() {
    for name in ["circle", "s2", "s3", "torus", "rp2", "klein", "l31"] {
        let k = fixtures::by_name(name).unwrap();
        let bs = k.barycentric_subdivision().complex;
        for ring in [Ring::Z, Ring::Zp(2), Ring::Zp(3)] {
            assert_eq!(homology_of(&k, ring), homology_of(&bs, ring), "{name} over {ring}");
        }
    }
}

#[test]
fn boundary_squares_to_zero_on_fixtures() {
    for name in fixtures::NAMES {
        ChainComplex::of(&fixtures::by_name(name).unwrap()).check_d_squared().unwrap();
    }
}

#[test]
fn relative_disk_mod_rim() {
    let disk = fixtures::hexagon_disk();
    let rim = fixtures::hexagon_rim();
    let cc = ChainComplex::relative(&disk, &rim).unwrap();
    let h = polytopo::cohomology::homology(&cc, Ring::Z);
    assert_eq!(h.describe(), vec!["0", "0", "Z"]);
    // A subcomplex with a vertex outside the disk is rejected.
    let stray =
        SimplicialComplex::from_facets(vec![polytopo::rational::RationalPoint::from_ints(&[9, 9])], &[]).unwrap();
    assert!(ChainComplex::relative(&disk, &stray).is_err());
}

#[test]
fn euler_characteristic_agrees_with_f_vector() {
    for name in fixtures::NAMES {
        let k = fixtures::by_name(name).unwrap();
        let h: HomologyGroups = homology_of(&k, Ring::Zp(2));
        assert_eq!(h.euler_characteristic(), k.euler_characteristic(), "{name}");
    }
}
