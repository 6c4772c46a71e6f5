//! The p-domain kernel as actually computed: `T = (m - 2)(m - 1 + c)` for
//! `m >= 3`, an empty space for `m <= 2`, and `a2 = 2 - 2c`.

use approx::assert_relative_eq;
use tycz_core::bergman::{Bergman, BergmanOptions};
use tycz_core::geometry::curvature_report;
use tycz_core::potentials::{pdomain_c, pdomain_potential, Point, Potential};
use tycz_core::Error;

#[test]
fn distortion_is_m_minus_two_times_m_minus_one_plus_c() {
    for p in [0.5, 2.0, 3.0] {
        let pot = Potential::Reinhardt(pdomain_potential(p).unwrap());
        let mut eng = Bergman::new(&pot, BergmanOptions::default());
        for (x1, u) in [(0.0, 0.0), (0.3, 0.3)] {
            let x2 = u * (1.0f64 - x1).powf(p);
            let c = pdomain_c(p, x1, x2);
            for m in 3..=6u32 {
                let mf = m as f64;
                let t = eng.distortion(m, &Point::X(x1, x2)).unwrap().value;
                assert_relative_eq!(t, (mf - 2.0) * (mf - 1.0 + c), max_relative = 1e-9);
            }
            for m in 1..=2 {
                assert_eq!(eng.distortion(m, &Point::X(x1, x2)).unwrap_err(), Error::EmptySpace);
            }
        }
    }
}

#[test]
fn curvature_coefficients_match_the_kernel() {
    for p in [0.5, 2.0, 3.0] {
        let pot = Potential::Reinhardt(pdomain_potential(p).unwrap());
        for (x1, u) in [(0.0, 0.0), (0.3, 0.3), (0.1, 0.5), (0.5, 0.25)] {
            let x2 = u * (1.0f64 - x1).powf(p);
            let c = pdomain_c(p, x1, x2);
            let rep = curvature_report(&pot, &Point::X(x1, x2)).unwrap();
            assert_relative_eq!(rep.a1, c - 3.0, max_relative = 1e-9);
            assert_relative_eq!(rep.a2, 2.0 - 2.0 * c, epsilon = 1e-9, max_relative = 1e-9);
        }
    }
}
