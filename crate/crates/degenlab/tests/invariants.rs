//! Randomized invariant checks over the public API.

use degenlab::analytic::{Barrier, INV_E};
use degenlab::geometry::{graded_mesh, radial_graded_mesh};
use degenlab::solver::{positivity_check, solve};
use degenlab::weights::PowerWeight;
use degenlab::{Domain, ProblemSpec, Source};
use proptest::prelude::*;

proptest! {
    #[test]
    fn graded_mesh_is_monotone_and_hits_endpoints(
        n in (3usize..200).prop_map(|k| 2 * k),
        gamma in 1.0f64..8.0,
        a in -2.0f64..0.0,
        len in 0.1f64..3.0,
    ) {
        let dom = Domain::interval(a, a + len).unwrap();
        let mesh = graded_mesh(&dom, n, gamma).unwrap();
        let nodes = mesh.nodes();
        prop_assert_eq!(nodes.len(), n + 1);
        prop_assert_eq!(nodes[0], a);
        prop_assert_eq!(nodes[n], a + len);
        prop_assert!(nodes.windows(2).all(|w| w[0] < w[1]));
        // grading is symmetric about the midpoint
        for i in 0..=n {
            let mirrored = (a + len) - nodes[n - i];
            prop_assert!((nodes[i] - a - mirrored).abs() <= 1e-12 * len);
        }
    }

    #[test]
    fn radial_mesh_is_monotone(
        n in 16usize..300,
        gamma in 1.0f64..8.0,
        radius in 0.1f64..3.0,
    ) {
        let dom = Domain::ball(2, radius).unwrap();
        let mesh = radial_graded_mesh(&dom, n, gamma).unwrap();
        let nodes = mesh.nodes();
        prop_assert_eq!(nodes[0], 0.0);
        prop_assert_eq!(nodes[n], radius);
        prop_assert!(nodes.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn weight_reciprocal_product_is_one(beta in -3.0f64..0.99, d in 1e-6f64..1.0) {
        let w = PowerWeight::new(beta).unwrap();
        if beta > -1.0 {
            // d^beta * d^{-beta} = 1 whenever both are admissible weights
            let wr = PowerWeight::new(-beta).unwrap();
            let prod = w.eval(d).unwrap() * wr.eval(d).unwrap();
            prop_assert!((prod - 1.0).abs() <= 1e-12);
        }
        prop_assert!(w.eval(d).unwrap() > 0.0);
        prop_assert_eq!(w.in_a2(), beta > -1.0);
    }

    #[test]
    fn distance_is_bounded_by_inradius(
        x in -1.5f64..1.5,
        y in -1.5f64..1.5,
    ) {
        for dom in [
            Domain::interval(0.0, 1.0).unwrap(),
            Domain::ball(2, 1.0).unwrap(),
            Domain::rectangle(1.0, 1.0).unwrap(),
        ] {
            let p: Vec<f64> = match dom.dimension() {
                1 => vec![x],
                _ => vec![x, y],
            };
            if let Ok(d) = dom.distance(&p) {
                prop_assert!(d >= 0.0);
                prop_assert!(d <= dom.inradius() + 1e-12);
            }
        }
    }

    #[test]
    fn gradient_of_distance_has_unit_norm(x in 0.01f64..0.49) {
        let dom = Domain::ball(2, 1.0).unwrap();
        let g = dom.grad_distance(&[x, 0.3]).unwrap();
        let norm: f64 = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        prop_assert!((norm - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn barrier_is_positive_and_eta_zero_image_is_algebraic(
        beta in -3.0f64..0.99,
        eta in -2.0f64..2.0,
        d in 1e-6f64..0.36,
        lap in -5.0f64..5.0,
    ) {
        let b = Barrier::new(eta, beta, INV_E).unwrap();
        prop_assert!(b.eval(d).unwrap() > 0.0);
        let b0 = Barrier::new(0.0, beta, INV_E).unwrap();
        prop_assert_eq!(b0.l_beta(d, lap).unwrap(), -(1.0 - beta) * lap);
    }

    #[test]
    fn small_solves_are_nonnegative_and_bounded(
        beta in -1.5f64..0.9,
        k in 4usize..7,
    ) {
        let spec = ProblemSpec::new(
            Domain::interval(0.0, 1.0).unwrap(),
            PowerWeight::new(beta).unwrap(),
            Source::One,
            1 << k,
        );
        let sol = solve(&spec).unwrap();
        prop_assert!(positivity_check(&sol.field));
        // sup u <= sup of the 1-D closed form at the midpoint
        let cap = 0.5f64.powf(1.0 - beta) / (2.0 * (1.0 - beta));
        prop_assert!(sol.field.max_abs() <= cap * (1.0 + 1e-6));
    }
}
