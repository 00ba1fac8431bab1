//! Cochain-level squares checked against their axioms.

use polytopo::cohomology::{bockstein, cohomology_of, cup, pullback, Cochain, CohomologyBasis, Ring};
use polytopo::complex::SimplicialComplex;
use polytopo::fixtures;
use polytopo::limits::Limits;
use polytopo::steenrod::{algebra::cartan_expand, apply, sq, SteenrodElement};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const Z2: Ring = Ring::Zp(2);

fn basis(k: &SimplicialComplex) -> Vec<CohomologyBasis> {
    cohomology_of(k, Z2, &Limits::default()).unwrap()
}

fn zero_or_class(h: &[CohomologyBasis], c: &Cochain) -> Vec<i64> {
    match h.get(c.degree) {
        Some(b) => b.coordinates(c).unwrap(),
        None => {
            assert!(c.values.is_empty());
            Vec::new()
        }
    }
}

fn is_zero_class(h: &[CohomologyBasis], c: &Cochain) -> bool {
    zero_or_class(h, c).iter().all(|&x| x == 0)
}

const MOD2_FIXTURES: [&str; 8] = ["circle", "s2", "torus", "rp2", "klein", "l31", "rp4", "rp2xrp2"];

#[test]
fn sq0_is_identity_and_top_square_is_cup_square() {
    for name in MOD2_FIXTURES {
        let k = fixtures::by_name(name).unwrap();
        let h = basis(&k);
        for b in &h {
            for c in &b.generators {
                assert!(b.same_class(&sq(&k, 0, c).unwrap(), c).unwrap(), "{name}");
                let top = sq(&k, c.degree, c).unwrap();
                let square = cup(&k, c, c).unwrap();
                if let Some(hb) = h.get(2 * c.degree) {
                    assert!(hb.same_class(&top, &square).unwrap(), "{name}");
                }
                let beyond = sq(&k, c.degree + 1, c).unwrap();
                assert!(beyond.is_zero(), "{name}");
            }
        }
    }
}

#[test]
fn sq1_is_the_bockstein() {
    for name in MOD2_FIXTURES {
        let k = fixtures::by_name(name).unwrap();
        let h = basis(&k);
        for b in &h {
            for c in &b.generators {
                let s = sq(&k, 1, c).unwrap();
                let beta = bockstein(&k, c).unwrap();
                assert_eq!(zero_or_class(&h, &s), zero_or_class(&h, &beta), "{name} degree {}", c.degree);
            }
        }
    }
}

#[test]
fn rp2_square_of_generator() {
    let k = fixtures::rp2();
    let h = basis(&k);
    let x = &h[1].generators[0];
    assert_eq!(h[2].coordinates(&sq(&k, 1, x).unwrap()).unwrap(), vec![1]);
}

#[test]
fn rp4_squares_of_x_squared() {
    let k = fixtures::rp4();
    let h = basis(&k);
    let x = &h[1].generators[0];
    let x2 = cup(&k, x, x).unwrap();
    let x4 = cup(&k, &x2, &x2).unwrap();
    assert_eq!(h[4].coordinates(&x4).unwrap(), vec![1]);
    assert!(h[3].is_coboundary(&sq(&k, 1, &x2).unwrap()).unwrap());
    assert!(h[4].same_class(&sq(&k, 2, &x2).unwrap(), &x4).unwrap());
    // Sq^1 x^3 = x^4 since C(3,1) is odd.
    let x3 = cup(&k, &x2, x).unwrap();
    assert!(h[4].same_class(&sq(&k, 1, &x3).unwrap(), &x4).unwrap());
}

#[test]
fn cartan_formula_on_rp2_squared() {
    let (k, p1, p2) = fixtures::rp2_squared();
    let base = fixtures::rp2();
    let hb = basis(&base);
    let h = basis(&k);
    let x = &hb[1].generators[0];
    let x2 = cup(&base, x, x).unwrap();
    let mut classes = Vec::new();
    for f in [&p1, &p2] {
        classes.push(pullback(f, &k, &base, x).unwrap());
        classes.push(pullback(f, &k, &base, &x2).unwrap());
    }
    for u in &classes {
        for v in &classes {
            let uv = cup(&k, u, v).unwrap();
            let (du, dv) = (u.degree as u32, v.degree as u32);
            for kk in 0..=du + dv {
                let lhs = sq(&k, kk as usize, &uv).unwrap();
                let mut rhs = Cochain::new(lhs.degree, Z2, vec![0; lhs.values.len()]);
                for (i, j) in cartan_expand(kk, du, dv) {
                    let term = cup(&k, &sq(&k, i as usize, u).unwrap(), &sq(&k, j as usize, v).unwrap()).unwrap();
                    rhs = rhs.add(&term).unwrap();
                }
                let diff = lhs.sub(&rhs).unwrap();
                assert!(is_zero_class(&h, &diff), "Sq^{kk} of a degree ({du},{dv}) product");
            }
        }
    }
    // The mixed product x1 x2 is a nonzero class.
    let (a, b) = (&classes[0], &classes[2]);
    assert!(!is_zero_class(&h, &cup(&k, a, b).unwrap()));
}

#[test]
fn naturality_under_projection() {
    let (k, p1, _) = fixtures::rp2_squared();
    let base = fixtures::rp2();
    let hb = basis(&base);
    let h = basis(&k);
    for b in &hb {
        for c in &b.generators {
            for i in 0..=2 {
                let up = sq(&k, i, &pullback(&p1, &k, &base, c).unwrap()).unwrap();
                let down = sq(&base, i, c).unwrap();
                if down.degree > base.dim() {
                    assert!(is_zero_class(&h, &up));
                    continue;
                }
                let pulled = pullback(&p1, &k, &base, &down).unwrap();
                assert!(is_zero_class(&h, &up.sub(&pulled).unwrap()));
            }
        }
    }
}

#[test]
fn adem_relations_hold_on_cochains() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let rp4 = fixtures::rp4();
    let (prod, _, _) = fixtures::rp2_squared();
    for k in [rp4, prod] {
        let h = basis(&k);
        let mut classes = Vec::new();
        for b in &h {
            classes.extend(b.generators.iter().cloned());
        }
        for _ in 0..20 {
            let bb = rng.gen_range(1..=3u32);
            let a = rng.gen_range(1..2 * bb);
            let c = &classes[rng.gen_range(0..classes.len())];
            let word = SteenrodElement::sq(&[a, bb]);
            let lhs = apply(&k, &word, c).unwrap();
            let rhs = apply(&k, &word.reduce(), c).unwrap();
            let lhs_zero = lhs.iter().all(|x| is_zero_class(&h, x));
            if rhs.is_empty() {
                assert!(lhs_zero, "Sq^{a} Sq^{bb}");
                continue;
            }
            assert_eq!(lhs.len(), 1);
            assert_eq!(rhs.len(), 1);
            assert!(is_zero_class(&h, &lhs[0].sub(&rhs[0]).unwrap()), "Sq^{a} Sq^{bb} on degree {}", c.degree);
        }
    }
}

#[test]
fn non_cocycles_are_rejected() {
    let k = fixtures::rp2();
    let e = Cochain::indicator(&k, &polytopo::fixtures::simplex(&[0, 1]), Z2).unwrap();
    assert!(matches!(sq(&k, 1, &e), Err(polytopo::Error::NotACocycle)));
}
