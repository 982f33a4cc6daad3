//! Randomized invariants of the iteration formulas, the Morse bookkeeping
//! and the file formats.

mod support;

use geoindex::config::{load_config, serialize_config, OutputOptions};
use geoindex::interval::{int, Interval};
use geoindex::iteration::{bott_constant, index_at, mean_index, nullity_at};
use geoindex::jump::{find_common_jump, validate_certificate};
use geoindex::morse::{avg_chi, chi_average, critical_module_dim, morse_counts, sufficient_m_max};
use geoindex::Error;
use num_rational::BigRational;
use proptest::prelude::*;
use support::*;

proptest! {
    #[test]
    fn first_iterate_reproduces_the_record((_n, g) in any_record(6, false, false)) {
        prop_assert_eq!(index_at(&g, 1).unwrap(), g.initial_index);
        prop_assert_eq!(nullity_at(&g, 1).unwrap(), g.initial_nullity as i64);
    }

    #[test]
    fn nullity_is_never_negative((_n, g) in any_record(5, false, false), m in 1i64..200) {
        prop_assert!(nullity_at(&g, m).unwrap() >= 0);
    }

    #[test]
    fn bumpy_iterates_keep_parity((_n, g) in any_record(6, true, false), p in 1i64..=50) {
        let step = index_at(&g, p + 2).unwrap() - index_at(&g, p).unwrap();
        prop_assert_eq!(step.rem_euclid(2), 0);
    }

    #[test]
    fn index_grows_by_at_least_i_minus_half_height((_n, g) in any_record(6, false, true), m in 1i64..300) {
        let step = index_at(&g, m + 1).unwrap() - index_at(&g, m).unwrap();
        let floor = 2 * g.initial_index - g.elliptic_height() as i64;
        prop_assert!(2 * step >= floor && floor >= 0, "step {} below (2i - e)/2 = {}/2", step, floor);
    }

    #[test]
    fn iterates_stay_within_the_bott_constant((_n, g) in any_record(5, false, false), m in 1i64..2000) {
        let c = int(bott_constant(&g));
        let dev = &Interval::from_int(index_at(&g, m).unwrap()) - &mean_index(&g).scale_int(m);
        prop_assert!(dev.abs_sup() <= c);
    }

    #[test]
    fn euler_characteristic_has_period_two((_n, g) in any_record(5, true, false), half in 1i64..40) {
        prop_assert_eq!(chi_average(&g, 2 * half).unwrap(), avg_chi(&g).unwrap());
    }

    #[test]
    fn morse_counts_match_enumeration(cfg in bumpy_configuration(5, 4), q_lo in 0i64..10, width in 0i64..30) {
        let q_hi = q_lo + width;
        let m_max = 60;
        match morse_counts(&cfg, q_lo, q_hi, m_max) {
            Ok(w) => {
                for q in q_lo..=q_hi {
                    let mut brute = 0u64;
                    for g in &cfg.geodesics {
                        for m in 1..=m_max {
                            brute += critical_module_dim(g, m, q).unwrap() as u64;
                        }
                    }
                    prop_assert_eq!(w.get(q), brute, "degree {}", q);
                }
            }
            Err(Error::Range(_)) => {
                prop_assert!(sufficient_m_max(&cfg, q_hi).map_or(true, |m| m > m_max))
            }
            Err(e) => prop_assert!(false, "unexpected error {}", e),
        }
    }

    #[test]
    fn configurations_round_trip(cfg in bumpy_configuration(5, 4)) {
        let text = serialize_config(&cfg, &OutputOptions::default());
        let back = load_config(&text).unwrap();
        prop_assert_eq!(&back.config, &cfg);
        prop_assert_eq!(serialize_config(&back.config, &back.output), text);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn found_certificates_validate((n, g) in any_record(4, true, false)) {
        let cfg = geoindex::morse::SphereConfiguration::bumpy(n, vec![g]).unwrap();
        let delta: BigRational = geoindex::interval::rat(1, 8);
        match find_common_jump(&cfg, None, &delta, 60, 400) {
            Ok(cert) => validate_certificate(&cfg, &cert).unwrap(),
            Err(Error::NotFound(_) | Error::Precondition(_) | Error::Precision(_)) => {}
            Err(e) => prop_assert!(false, "unexpected error {}", e),
        }
    }
}
