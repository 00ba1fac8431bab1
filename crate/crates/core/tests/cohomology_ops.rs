//! Cup products, Bocksteins and pullbacks at the class level.

use polytopo::cohomology::{
    bockstein, bockstein_with_lift, cohomology_of, cup, is_cocycle, pullback, Cochain, CohomologyBasis, Ring,
};
use polytopo::complex::{SimplicialComplex, SimplicialMap};
use polytopo::fixtures;
use polytopo::limits::Limits;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn basis(k: &SimplicialComplex, ring: Ring) -> Vec<CohomologyBasis> {
    cohomology_of(k, ring, &Limits::default()).unwrap()
}

#[test]
fn generators_are_cocycles_and_coordinates_are_unit_vectors() {
    for name in ["circle", "s2", "torus", "rp2", "klein"] {
        let k = fixtures::by_name(name).unwrap();
        for ring in [Ring::Z, Ring::Zp(2), Ring::Zp(3)] {
            for h in basis(&k, ring) {
                for (i, g) in h.generators.iter().enumerate() {
                    assert!(is_cocycle(&k, g).unwrap(), "{name} {ring}");
                    let mut e = vec![0; h.generators.len()];
                    e[i] = 1;
                    assert_eq!(h.coordinates(g).unwrap(), e, "{name} {ring} degree {}", h.degree);
                }
            }
        }
    }
}

#[test]
fn cohomology_groups_follow_universal_coefficients() {
    let k = fixtures::klein_bottle();
    let h = basis(&k, Ring::Z);
    assert_eq!(h[1].group.describe(Ring::Z), "Z");
    assert_eq!(h[2].group.describe(Ring::Z), "Z2");
    let k = fixtures::rp2();
    let h = basis(&k, Ring::Z);
    assert_eq!(h.iter().map(|b| b.group.describe(Ring::Z)).collect::<Vec<_>>(), vec!["Z", "0", "Z2"]);
}

#[test]
fn torus_cup_products() {
    let k = fixtures::torus();
    let h = basis(&k, Ring::Z);
    assert_eq!(h[1].generators.len(), 2);
    let (a, b) = (&h[1].generators[0], &h[1].generators[1]);
    let ab = h[2].coordinates(&cup(&k, a, b).unwrap()).unwrap();
    assert_eq!(ab.len(), 1);
    assert_eq!(ab[0].abs(), 1);
    assert_eq!(h[2].coordinates(&cup(&k, a, a).unwrap()).unwrap(), vec![0]);
    assert_eq!(h[2].coordinates(&cup(&k, b, b).unwrap()).unwrap(), vec![0]);
    let ba = h[2].coordinates(&cup(&k, b, a).unwrap()).unwrap();
    assert_eq!(ba[0], -ab[0]);
}

#[test]
fn rp2_cup_square_is_nonzero() {
    let k = fixtures::rp2();
    let h = basis(&k, Ring::Zp(2));
    let x = &h[1].generators[0];
    assert_eq!(h[2].coordinates(&cup(&k, x, x).unwrap()).unwrap(), vec![1]);
}

#[test]
fn unit_is_neutral() {
    for name in ["torus", "rp2", "l31"] {
        let k = fixtures::by_name(name).unwrap();
        let h = basis(&k, Ring::Zp(3));
        let one = Cochain::unit(&k, Ring::Zp(3));
        for b in &h {
            for g in &b.generators {
                assert_eq!(cup(&k, &one, g).unwrap(), *g);
            }
        }
    }
}

#[test]
fn graded_commutativity_on_classes() {
    for (name, ring) in [("torus", Ring::Z), ("klein", Ring::Zp(2)), ("l31", Ring::Zp(3)), ("rp2xrp2", Ring::Zp(2))] {
        let k = fixtures::by_name(name).unwrap();
        let h = basis(&k, ring);
        for i in 0..h.len() {
            for j in 0..h.len() - i {
                for a in &h[i].generators {
                    for b in &h[j].generators {
                        let ab = cup(&k, a, b).unwrap();
                        let ba = cup(&k, b, a).unwrap();
                        let sign = if (i * j) % 2 == 0 { 1 } else { -1 };
                        assert!(h[i + j].same_class(&ab, &ba.scale(sign)).unwrap(), "{name} {i} {j}");
                    }
                }
            }
        }
    }
}

#[test]
fn cup_products_are_independent_of_vertex_order() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for (name, ring) in [("torus", Ring::Z), ("rp2", Ring::Zp(2)), ("l31", Ring::Zp(3))] {
        let k = fixtures::by_name(name).unwrap();
        let h = basis(&k, ring);
        for _ in 0..2 {
            let mut perm: Vec<usize> = (0..k.count(0)).collect();
            perm.shuffle(&mut rng);
            let (k2, there) = k.relabeled(&perm).unwrap();
            let mut inv = vec![0; perm.len()];
            for (i, &p) in perm.iter().enumerate() {
                inv[p] = i;
            }
            let back = SimplicialMap::new(&k2, &k, inv).unwrap();
            for a in &h[1].generators {
                for b in &h[1].generators {
                    let a2 = pullback(&back, &k2, &k, a).unwrap();
                    let b2 = pullback(&back, &k2, &k, b).unwrap();
                    let prod = pullback(&there, &k, &k2, &cup(&k2, &a2, &b2).unwrap()).unwrap();
                    assert!(h[2].same_class(&prod, &cup(&k, a, b).unwrap()).unwrap(), "{name}");
                }
            }
        }
    }
}

#[test]
fn bockstein_on_rp2_is_the_cup_square() {
    let k = fixtures::rp2();
    let h = basis(&k, Ring::Zp(2));
    let x = &h[1].generators[0];
    let bx = bockstein(&k, x).unwrap();
    assert!(is_cocycle(&k, &bx).unwrap());
    assert!(h[2].same_class(&bx, &cup(&k, x, x).unwrap()).unwrap());
    assert_eq!(h[2].coordinates(&bx).unwrap(), vec![1]);
}

#[test]
fn bockstein_class_does_not_depend_on_the_lift() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for (name, p) in [("rp2", 2), ("klein", 2), ("l31", 3), ("torus", 3)] {
        let k = fixtures::by_name(name).unwrap();
        let h = basis(&k, Ring::Zp(p));
        for d in 0..h.len() - 1 {
            for c in &h[d].generators {
                let b1 = bockstein(&k, c).unwrap();
                let shifted: Vec<i64> = c.values.iter().map(|&v| v + p as i64 * rng.gen_range(-3..=3)).collect();
                let b2 = bockstein_with_lift(&k, c, &Cochain::new(d, Ring::Z, shifted), p).unwrap();
                assert!(h[d + 1].same_class(&b1, &b2).unwrap(), "{name} degree {d}");
            }
        }
    }
}

#[test]
fn bockstein_squares_to_zero() {
    for (name, p) in [("rp2", 2), ("klein", 2), ("l31", 3), ("rp4", 2), ("torus", 5)] {
        let k = fixtures::by_name(name).unwrap();
        let h = basis(&k, Ring::Zp(p));
        for d in 0..h.len().saturating_sub(2) {
            for c in &h[d].generators {
                let bb = bockstein(&k, &bockstein(&k, c).unwrap()).unwrap();
                assert!(h[d + 2].is_coboundary(&bb).unwrap(), "{name} degree {d}");
            }
        }
    }
}

#[test]
fn lens_space_bockstein_is_nonzero() {
    let k = fixtures::lens_space_3_1();
    let h = basis(&k, Ring::Zp(3));
    assert_eq!(h[1].generators.len(), 1);
    let v = &h[1].generators[0];
    let u = bockstein(&k, v).unwrap();
    let coords = h[2].coordinates(&u).unwrap();
    assert_eq!(coords.len(), 1);
    assert_ne!(coords[0], 0);
}

#[test]
fn torus_bocksteins_vanish() {
    let k = fixtures::torus();
    for p in [2, 3, 5] {
        let h = basis(&k, Ring::Zp(p));
        for d in 0..2 {
            for c in &h[d].generators {
                assert!(h[d + 1].is_coboundary(&bockstein(&k, c).unwrap()).unwrap());
            }
        }
    }
}

#[test]
fn pullback_along_projection_is_injective_on_h1() {
    let (k, p1, p2) = fixtures::rp2_squared();
    let base = fixtures::rp2();
    let hb = basis(&base, Ring::Zp(2));
    let h = basis(&k, Ring::Zp(2));
    let x = &hb[1].generators[0];
    let a = pullback(&p1, &k, &base, x).unwrap();
    let b = pullback(&p2, &k, &base, x).unwrap();
    let ca = h[1].coordinates(&a).unwrap();
    let cb = h[1].coordinates(&b).unwrap();
    assert!(ca.iter().any(|&v| v != 0));
    assert!(cb.iter().any(|&v| v != 0));
    assert_ne!(ca, cb);
}
