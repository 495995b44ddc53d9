use num_bigint::BigInt;
use num_traits::One;
use proptest::prelude::*;

use p2sheaf::chern::{pairing, rel_euler};
use p2sheaf::exceptional::{enumerate_exceptionals, epsilon, is_above_dlp, Dyadic};
use p2sheaf::gaeta::{decompose_betti, gaeta_resolution};
use p2sheaf::rational::{int, rat};
use p2sheaf::{ChernCharacter, Rational};

/// Integral characters `(r, c1, c1^2/2 - c2)`.
fn character() -> impl Strategy<Value = ChernCharacter> {
    (1i64..=8, -20i64..=20, -5i64..=60).prop_map(|(r, c1, c2)| ChernCharacter::new(int(r), int(c1), rat(c1 * c1, 2) - int(c2)))
}

/// Characters of any rank, including torsion and negative ranks.
fn any_character() -> impl Strategy<Value = ChernCharacter> {
    (-6i64..=6, -30i64..=30, -60i64..=60, 1i64..=4)
        .prop_map(|(r, c1, c2, den)| ChernCharacter::new(int(r), rat(c1, den), rat(c2, 2 * den)))
}

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, max_global_rejects: 100_000, ..ProptestConfig::default() }
}

proptest! {
    #![proptest_config(config(1000))]

    #[test]
    fn pairing_is_symmetric(a in any_character(), b in any_character()) {
        prop_assert_eq!(pairing(&a, &b), pairing(&b, &a));
    }

    #[test]
    fn serre_duality(a in any_character(), b in any_character()) {
        // chi(a, b) = chi(b, a (x) K)
        prop_assert_eq!(a.rel_euler(&b), b.rel_euler(&a.twist(-3)));
    }

    #[test]
    fn log_and_character_forms_agree(a in character(), b in character()) {
        let (u, v) = (a.to_log().unwrap(), b.to_log().unwrap());
        prop_assert_eq!(rel_euler(&u, &v), a.rel_euler(&b));
        prop_assert_eq!(u.euler(), a.euler());
    }
}

proptest! {
    #![proptest_config(config(500))]

    #[test]
    fn betti_additivity(c in character()) {
        let xi = c.to_log().unwrap();
        prop_assume!(is_above_dlp(&xi));
        let z = decompose_betti(&xi).unwrap();
        let mut sum = z.block_b.betti();
        for (&(pos, tw), &m) in &z.block_a_shape.betti().entries {
            sum.add(pos, tw, m);
        }
        prop_assert_eq!(sum, z.total_shape.betti());
        let p = z.parts;
        prop_assert!(p.n1 >= 0 && p.n2 >= 0 && p.j1 >= 0 && p.j2 >= 0);
    }

    #[test]
    fn resolutions_conserve_character(c in character()) {
        let xi = c.to_log().unwrap();
        prop_assume!(is_above_dlp(&xi));
        let g = gaeta_resolution(&xi).unwrap();
        prop_assert_eq!(&g.character, &c);
        prop_assert!(g.is_minimal());
        let z = decompose_betti(&xi).unwrap();
        prop_assert_eq!(&z.total_shape.character, &c);
    }
}

#[test]
fn enumerated_exceptionals_are_exceptional_and_ordered() {
    let es = enumerate_exceptionals(1000, &int(-3), &int(3));
    assert!(es.len() > 40);
    for e in &es {
        let r = Rational::from_integer(e.rank.clone());
        assert_eq!(e.discriminant, rat(1, 2) * (Rational::one() - Rational::one() / (&r * &r)), "{}", e.slope);
        assert_eq!(epsilon(e.dyadic_address), *e);
    }
    let mut by_address = es.clone();
    by_address.sort_by_key(|e| e.dyadic_address);
    for w in by_address.windows(2) {
        assert!(w[0].slope < w[1].slope, "{} !< {}", w[0].slope, w[1].slope);
    }
    assert!(es.iter().all(|e| e.rank <= BigInt::from(1000)));
}

proptest! {
    #![proptest_config(config(200))]

    #[test]
    fn epsilon_symmetries(p in -200i128..200, q in 0u32..7, n in -5i64..5) {
        let a = Dyadic::new(p, q);
        let e = epsilon(a);
        prop_assert_eq!(epsilon(a.neg()).slope, -e.slope.clone());
        prop_assert_eq!(epsilon(a.shift(n)).slope, &e.slope + Rational::from_integer(BigInt::from(n)));
        prop_assert_eq!(&epsilon(a.neg()).rank, &e.rank);
    }
}
