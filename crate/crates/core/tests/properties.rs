//! Property tests: inequalities and identities that must hold on every
//! random instance. Instances are built from a proptest-chosen seed.

use hsdp_core::bounds::*;
use hsdp_core::divergence::{d_max, f_divergence, hs_classical, hs_divergence, trace_distance, FGenerator, QUAD_TOL};
use hsdp_core::matrix::{eig_hermitian, ComplexMatrix, HermitianOperator, C64};
use hsdp_core::privacy::{compose_homogeneous, dasgupta_bound, re_ldp_bound};
use hsdp_core::random::{ginibre, random_density, random_density_rank, random_distribution, trial_rng};
use hsdp_core::DensityOperator;
use proptest::prelude::*;

fn pair(seed: u64, d: usize) -> (DensityOperator, DensityOperator) {
    let mut rng = trial_rng(seed, 0);
    let r1 = if seed % 3 == 0 { 1 } else { d };
    (random_density_rank(d, r1, &mut rng), random_density(d, &mut rng))
}

fn commuting(seed: u64, d: usize) -> (Vec<f64>, Vec<f64>) {
    let mut rng = trial_rng(seed, 1);
    (random_distribution(d, &mut rng), random_distribution(d, &mut rng))
}

fn random_hermitian(seed: u64, d: usize) -> HermitianOperator {
    let g = ginibre(d, d, &mut trial_rng(seed, 2));
    HermitianOperator::new(&g + &g.adjoint()).unwrap()
}

fn power_trace(h: &ComplexMatrix, k: usize) -> f64 {
    let mut p = ComplexMatrix::identity(h.rows());
    for _ in 0..k {
        p = &p * h;
    }
    p.trace().re
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    // Power sums Σλᵏ = Tr[Hᵏ], k = 1..d, pin down the whole spectrum.
    #[test]
    fn eigenvalues_match_power_sums(seed in any::<u64>(), d in 1usize..=4) {
        let h = random_hermitian(seed, d);
        let spec = eig_hermitian(&h).unwrap();
        for k in 1..=d {
            let sum: f64 = spec.eigenvalues.iter().map(|l| l.powi(k as i32)).sum();
            let tr = power_trace(h.matrix(), k);
            prop_assert!((sum - tr).abs() <= 1e-10 * (1.0 + tr.abs()), "k={k}: {sum} vs {tr}");
        }
        for j in 0..d {
            let v = spec.eigenvector(j);
            let hv = h.matrix().mul_vec(&v);
            let res: f64 = hv.iter().zip(&v).map(|(a, b)| (a - b * spec.eigenvalues[j]).norm_sqr()).sum::<f64>().sqrt();
            prop_assert!(res < 1e-9);
        }
        prop_assert!(spec.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn hs_is_bounded_monotone_and_convex(seed in any::<u64>(), d in 2usize..=4, g in 1.0f64..6.0, h in 0.01f64..3.0) {
        let (rho, sigma) = pair(seed, d);
        let e = |x: f64| hs_divergence(&rho, &sigma, x).unwrap();
        let (e0, e1, e2) = (e(g), e(g + h), e(g + 2.0 * h));
        prop_assert!((0.0..=1.0 + 1e-12).contains(&e0));
        prop_assert!(e1 <= e0 + 1e-12);
        prop_assert!(e1 <= 0.5 * (e0 + e2) + 1e-12);
        prop_assert!((e(1.0) - trace_distance(&rho, &sigma).unwrap()).abs() < 1e-12);
    }

    // Tr[M(ρ − γσ)] ≤ E_γ(ρ‖σ) for 0 ≤ M ≤ I.
    #[test]
    fn hs_dominates_every_test_operator(seed in any::<u64>(), d in 2usize..=4, g in 1.0f64..5.0) {
        let (rho, sigma) = pair(seed, d);
        let m = random_hermitian(seed ^ 7, d).map_spectrum(|l| 1.0 / (1.0 + (-l).exp())).unwrap();
        let lhs = m.matrix().trace_product_re(rho.matrix()) - g * m.matrix().trace_product_re(sigma.matrix());
        prop_assert!(lhs <= hs_divergence(&rho, &sigma, g).unwrap() + 1e-9);
    }

    #[test]
    fn commuting_pairs_match_classical(seed in any::<u64>(), d in 2usize..=5, g in 1.0f64..5.0) {
        let (p, q) = commuting(seed, d);
        let quantum = hs_divergence(&DensityOperator::diag(&p).unwrap(), &DensityOperator::diag(&q).unwrap(), g).unwrap();
        prop_assert!((quantum - hs_classical(&p, &q, g).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn hs_relation_holds(seed in any::<u64>(), d in 2usize..=4, gp in 1.0f64..4.0, extra in 0.0f64..4.0) {
        let (rho, sigma) = pair(seed, d);
        let g = gp + extra;
        let sym = hs_divergence(&rho, &sigma, g).unwrap().max(hs_divergence(&sigma, &rho, g).unwrap()).min(1.0);
        let lhs = hs_divergence(&rho, &sigma, gp).unwrap();
        prop_assert!(lhs <= hs_gamma_relation(g, gp, sym).unwrap() + 1e-10);
    }

    #[test]
    fn zeroing_and_dmax_bounds_hold(seed in any::<u64>(), d in 2usize..=4, gp in 1.0f64..3.0, extra in 0.0f64..6.0) {
        let (rho, sigma) = pair(seed, d);
        let g = gp + extra;
        let lmin = eig_hermitian(sigma.op()).unwrap().eigenvalues[0].clamp(0.0, 1.0);
        let e = hs_divergence(&rho, &sigma, gp).unwrap().min(1.0);
        if zeroing_criterion(g, gp, lmin, e).unwrap() {
            prop_assert!(hs_divergence(&rho, &sigma, g).unwrap() < 1e-9);
        }
        if lmin > 1e-6 {
            let eg = hs_divergence(&rho, &sigma, g).unwrap();
            prop_assert!(d_max(&rho, &sigma).unwrap() <= dmax_upper_from_hs(g, eg, lmin).unwrap() + 1e-8);
        }
    }

    #[test]
    fn convexity_chord_dominates(seed in any::<u64>(), d in 2usize..=4, g1 in 1.0f64..3.0, w in 0.0f64..1.0, span in 0.1f64..4.0) {
        let (rho, sigma) = pair(seed, d);
        let g2 = g1 + span;
        let g = g1 + w * span;
        let e = |x: f64| hs_divergence(&rho, &sigma, x).unwrap().min(1.0);
        prop_assert!(e(g) <= hs_convexity_bound(g, g1, g2, e(g1), e(g2)).unwrap() + 1e-12);
    }

    #[test]
    fn sdpi_shape(g in 1.0f64..10.0, gp in 1.0f64..10.0, delta in 0.0f64..=1.0, t1 in 0.0f64..=1.0, t2 in 0.0f64..=1.0) {
        let (lo, hi) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
        let f = |t| nonlinear_sdpi(SdpiParams::new(g, gp, delta, t).unwrap()).unwrap();
        prop_assert!(f(lo) <= f(hi) + 1e-15);
        let lin = linear_sdpi(g, gp, delta).unwrap();
        prop_assert!(f(hi) <= lin * hi + 1e-12);
        if g >= gp {
            prop_assert!((f(1.0) - lin).abs() < 1e-12);
        }
    }

    #[test]
    fn kink_identity(g in 1.5f64..10.0, frac in 0.01f64..0.99, delta in 0.001f64..0.999) {
        let gp = 1.0 + frac * (g - 1.0);
        let ts = (gp - 1.0) / (g - 1.0);
        let affine = ((g + 2.0 * delta - 1.0) * ts - (gp - 1.0) * (1.0 - delta)) / (g + 1.0);
        prop_assert!((affine - delta * ts).abs() < 1e-12);
        let v = nonlinear_sdpi(SdpiParams::new(g, gp, delta, ts).unwrap()).unwrap();
        prop_assert!((v - delta * ts).abs() < 1e-12);
    }

    #[test]
    fn hitting_invariants(g in 1.5f64..10.0, frac in 0.01f64..0.99, delta in 0.001f64..0.999, t in 0.0f64..=1.0) {
        let gp = 1.0 + frac * (g - 1.0);
        let hp = hitting_params(g, gp, delta).unwrap();
        prop_assert!((hp.offset() - 0.5 * (gp - 1.0)).abs() < 1e-12);
        prop_assert!(hp.t_star > 0.0 && hp.t_star < 1.0);
        let k = k_star(&hp, t).unwrap();
        prop_assert!(phi_k(&hp, t, k) <= hp.t_star);
        if k >= 1 {
            prop_assert!(phi_k(&hp, t, k - 1) > hp.t_star);
        }
        let mut prev = f64::INFINITY;
        for n in 1..=25 {
            let v = g_n(&hp, t, n).unwrap();
            prop_assert!(v <= prev + 1e-15);
            prev = v;
        }
    }

    #[test]
    fn mixing_times_nonincreasing_in_beta(g in 1.5f64..12.0, frac in 0.05f64..0.95, delta in 0.01f64..0.9, b1 in 0.001f64..0.999, b2 in 0.001f64..0.999) {
        let gp = 1.0 + frac * (g - 1.0);
        let (lo, hi) = if b1 <= b2 { (b1, b2) } else { (b2, b1) };
        prop_assert!(mixing_time_nonlinear(g, gp, hi).unwrap() <= mixing_time_nonlinear(g, gp, lo).unwrap());
        let lin = |b| mixing_time_linear(g, gp, 0.0, b).unwrap().steps().unwrap();
        prop_assert!(lin(hi) <= lin(lo));
        prop_assert!(mixing_time_delta(g, gp, delta, hi).unwrap() <= mixing_time_delta(g, gp, delta, lo).unwrap());
    }

    #[test]
    fn homogeneous_composition_monotone(eps in 0.05f64..4.0, f1 in 0.01f64..=1.0, f2 in 0.01f64..=1.0, n in 1u32..10) {
        let (lo, hi) = if f1 <= f2 { (f1 * eps, f2 * eps) } else { (f2 * eps, f1 * eps) };
        let d = |n, e| compose_homogeneous(eps, n, e).unwrap().delta_out;
        prop_assert!(d(n + 1, lo) <= d(n, lo) + 1e-15);
        prop_assert!(d(n, hi) <= d(n, lo) + 1e-15);
    }

    #[test]
    fn re_ldp_below_prior_bound(eps in 0.5f64..3.0, delta in 0.01f64..0.3, lambda in 0.02f64..0.5, tau in 0.0f64..=1.0) {
        prop_assert!(re_ldp_bound(eps, delta, tau, lambda).unwrap() < dasgupta_bound(eps, delta, tau, lambda).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    // Commuting witnesses: every hypothesis scalar of the general reverse
    // Pinsker bound is measured from the pair itself.
    #[test]
    fn reverse_pinsker_dominates_measured_kl(seed in any::<u64>(), d in 2usize..=4, g1 in 1.0f64..3.0, g2 in 1.0f64..3.0) {
        let (mut p, mut q) = commuting(seed, d);
        // keep supports full so both D_max values are finite
        for x in p.iter_mut().chain(q.iter_mut()) {
            *x = 0.9 * *x + 0.1 / d as f64;
        }
        let (rho, sigma) = (DensityOperator::diag(&p).unwrap(), DensityOperator::diag(&q).unwrap());
        let d1 = hs_divergence(&rho, &sigma, g1).unwrap();
        let d2 = hs_divergence(&sigma, &rho, g2).unwrap();
        let tau = trace_distance(&rho, &sigma).unwrap();
        let a = d_max(&rho, &sigma).unwrap().max(g1.ln());
        let b = d_max(&sigma, &rho).unwrap().max(g2.ln());
        for gen in [FGenerator::kl(), FGenerator::chi2(), FGenerator::total_variation()] {
            let bound = reverse_pinsker_general(&gen, g1, g2, d1, d2, tau, a, b).unwrap();
            let value = f_divergence(&rho, &sigma, &gen, QUAD_TOL).unwrap();
            prop_assert!(value <= bound + QUAD_TOL + 1e-7, "{}: {value} > {bound}", gen.name());
        }
    }
}

#[test]
fn complex_hermitian_eigen_oracle() {
    // [[2, i], [-i, 2]] has eigenvalues 1 and 3
    let m = ComplexMatrix::from_vec(2, 2, vec![C64::new(2.0, 0.0), C64::new(0.0, 1.0), C64::new(0.0, -1.0), C64::new(2.0, 0.0)]).unwrap();
    let spec = eig_hermitian(&HermitianOperator::new(m).unwrap()).unwrap();
    assert!((spec.eigenvalues[0] - 1.0).abs() < 1e-14 && (spec.eigenvalues[1] - 3.0).abs() < 1e-14);
}
