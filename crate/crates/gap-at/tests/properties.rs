use gap_at::*;
use proptest::prelude::*;

fn unit(v: Vec<f64>) -> Vec<f64> {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.into_iter().map(|x| x / n).collect()
}

/// Unit literal vectors summing to `-v0`: the `T'_{-x}` formulas with
/// orthonormal `w = e_0`, `u = e_1` in `R^3 ⊕ v0`.
fn exact_triple(k: u32) -> [Vec<f64>; 3] {
    let s = (-(k as f64)).exp2();
    let x = 1.0 - s;
    let alpha = 2.0 * (s * (1.0 - s)).sqrt();
    let beta = (1.0 - x * x).sqrt();
    let rho = rho_coeff(x).unwrap();
    let g = beta * (1.0 - rho * rho).sqrt();
    [vec![-alpha / 2.0, g, 0.0, -x], vec![-alpha / 2.0, -g, 0.0, -x], vec![alpha, 0.0, 0.0, -(1.0 - 2.0 * x)]]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn shifted_witness_is_consistent(
        k in 1u32..26,
        noise in prop::collection::vec(-1.0f64..1.0, 12),
        scale in 0.0f64..0.02,
        eps in 0.01f64..0.5,
    ) {
        let exact = exact_triple(k);
        let sum: Vec<f64> = (0..4).map(|j| exact.iter().map(|p| p[j]).sum()).collect();
        prop_assert!(sum[..3].iter().all(|x| x.abs() < 1e-12) && (sum[3] + 1.0).abs() < 1e-12);
        let centers: Vec<Vec<f64>> = (0..3)
            .map(|i| exact[i].iter().zip(&noise[4 * i..4 * i + 4]).map(|(a, b)| a + scale * b).collect())
            .collect();
        let slots = std::array::from_fn(|i| SlotInput::Point { center: &centers[i], sign: 1.0, id: i });
        let w = triple_witness([&exact[0], &exact[1], &exact[2]], slots, eps);
        // D is a distribution on the 1-in-3 patterns with value 1.
        prop_assert!(w.base.iter().all(|&p| p >= -1e-15));
        prop_assert!(((w.base[1] + w.base[2] + w.base[4]) - 1.0).abs() < 1e-12);
        // D' reproduces the moments of the normalized centers.
        let c: Vec<Vec<f64>> = centers.iter().cloned().map(unit).collect();
        for i in 0..3 {
            let m: f64 = (0..8).map(|s| w.shifted[s] * pattern(s)[i]).sum();
            prop_assert!((m - c[i][3]).abs() < 1e-12);
            for j in i + 1..3 {
                let m: f64 = (0..8).map(|s| w.shifted[s] * pattern(s)[i] * pattern(s)[j]).sum();
                let ip: f64 = c[i].iter().zip(&c[j]).map(|(a, b)| a * b).sum();
                prop_assert!((m - ip).abs() < 1e-12);
            }
        }
        prop_assert!(w.moment_residual <= 1e-9);
        prop_assert!(w.norm_error <= 1e-12);
        if w.shift_budget <= eps / 100.0 {
            prop_assert!(w.is_valid(eps), "{:?}", w);
        }
    }

    #[test]
    fn rho_is_even_and_bounded(x in -0.999f64..0.999) {
        let r = rho_coeff(x).unwrap();
        prop_assert_eq!(r, rho_coeff(-x).unwrap());
        prop_assert!((0.0..=1.0).contains(&r));
    }
}
