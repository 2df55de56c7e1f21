//! Property tests of the algebraic invariants.

use num_complex::Complex64 as C64;
use proptest::prelude::*;
use sqzcav::dynamics::Liouvillian;
use sqzcav::model::{enhanced_couplings, noise_params, pump_amplitude, squeezed_frequency, squeezing_param, Frame, ModelParams};
use sqzcav::operators::{unvectorize, vectorize, DensityMatrix, HilbertDims};
use sqzcav::CMatrix;

fn random_state(dims: HilbertDims, entries: &[(f64, f64)]) -> DensityMatrix {
    let n = dims.dim();
    let a = CMatrix::from_fn(n, n, |i, j| {
        let (re, im) = entries[(i * n + j) % entries.len()];
        C64::new(re + 0.01 * i as f64, im - 0.02 * j as f64)
    });
    let m = &a * a.adjoint() + CMatrix::identity(n, n) * C64::new(1e-3, 0.0);
    let tr = m.trace();
    DensityMatrix::new(dims, m / tr).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn parameter_identities(r in 0.0f64..2.0, dc in 0.1f64..20.0, g0 in 0.0f64..10.0) {
        let op = pump_amplitude(dc, r).unwrap();
        if op < dc {
            let back = squeezing_param(dc, op).unwrap();
            prop_assert!((back - r).abs() < 1e-12 * (1.0 + r));
            let ws = squeezed_frequency(dc, op).unwrap();
            prop_assert!((ws * ws + op * op - dc * dc).abs() < 1e-10 * dc * dc);
        }
        let (gs, gsp) = enhanced_couplings(g0, r);
        prop_assert!((gs * gs - gsp * gsp - g0 * g0).abs() < 1e-10 * (1.0 + g0 * g0 * r.cosh().powi(2)));
        let noise = noise_params(r);
        let m = noise.correlation;
        prop_assert!((m * m - noise.thermal * (noise.thermal + 1.0)).abs() < 1e-10 * (1.0 + m * m));
    }

    #[test]
    fn vectorization_round_trip(entries in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 8..40)) {
        let dims = HilbertDims::new(3).unwrap();
        let rho = random_state(dims, &entries);
        prop_assert_eq!(unvectorize(dims, &vectorize(&rho)).unwrap(), rho);
    }

    #[test]
    fn generator_is_trace_and_hermiticity_preserving(
        r in 0.0f64..1.2,
        g0 in 0.0f64..5.0,
        gamma in 0.0f64..2.0,
        squeezed in any::<bool>(),
        entries in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 8..40),
    ) {
        let dims = HilbertDims::new(4).unwrap();
        let frame = if squeezed { Frame::Squeezed } else { Frame::Lab };
        let p = ModelParams::from_squeezing(0.5, r).unwrap().with_g0(g0).unwrap().with_gamma(gamma).unwrap().with_frame(frame);
        let l = Liouvillian::for_model(&p, dims).unwrap();
        let rho = random_state(dims, &entries);
        let out = l.apply(rho.matrix()).unwrap();
        let scale = 1.0 + 10.0 * (g0 + r.cosh() * r.cosh());
        prop_assert!(out.trace().norm() < 1e-10 * scale);
        let defect = (&out - out.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        prop_assert!(defect < 1e-10 * scale);
    }
}
