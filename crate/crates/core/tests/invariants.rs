use std::f64::consts::PI;

use nsdecay_core::besov::besov_norm;
use nsdecay_core::decay::fit_decay;
use nsdecay_core::dyadic::delta_j;
use nsdecay_core::field2d::random::{random_band_limited, random_field, random_vector, rng_from_seed};
use nsdecay_core::field2d::{divergence, gradient_part, heat_semigroup, leray_project};
use nsdecay_core::paraproduct::bony_reconstruct;
use nsdecay_core::pressure::solve_pressure;
use nsdecay_core::{build_family, BesovSpec, Field2D, Grid2D, TransitionProfile};
use proptest::prelude::*;

fn grid_strategy() -> impl Strategy<Value = Grid2D> {
    (prop::sample::select(vec![16usize, 32, 64]), 1.0f64..20.0).prop_map(|(n, s)| Grid2D::new(n, 2.0 * PI * s).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn blocks_reassemble_the_field(g in grid_strategy(), seed in any::<u64>()) {
        let fam = build_family(&g, TransitionProfile::default()).unwrap();
        let mut rng = rng_from_seed(seed);
        let f = random_field(&g, &mut rng, |_| 1.0);
        let mut acc = Field2D::constant(&g, f.mean());
        for j in fam.indices() {
            acc = acc.add(&delta_j(&f, j, &fam).unwrap()).unwrap();
        }
        prop_assert!(acc.sub(&f).unwrap().norm_l2() <= 1e-12 * f.norm_l2());
    }

    #[test]
    fn leray_and_gradient_parts_split_orthogonally(g in grid_strategy(), seed in any::<u64>()) {
        let mut rng = rng_from_seed(seed);
        let v = random_vector(&g, &mut rng, (g.n() / 3) as i64);
        let p = leray_project(&v);
        let q = gradient_part(&v);
        prop_assert!(p.add(&q).unwrap().sub(&v).unwrap().norm_l2() <= 1e-13 * v.norm_l2());
        prop_assert!(p.inner(&q).unwrap().abs() <= 1e-12 * v.norm_l2().powi(2));
        prop_assert!(leray_project(&p).sub(&p).unwrap().norm_l2() <= 1e-13 * v.norm_l2());
        prop_assert!(divergence(&p).norm_l2() <= 1e-12 * g.k_nyquist() * v.norm_l2());
    }

    #[test]
    fn heat_semigroup_composes(g in grid_strategy(), seed in any::<u64>(), s in 0.0f64..3.0, t in 0.0f64..3.0) {
        let mut rng = rng_from_seed(seed);
        let f = random_field(&g, &mut rng, |k| (-k * k / 8.0).exp());
        let two = heat_semigroup(&heat_semigroup(&f, s).unwrap(), t).unwrap();
        let one = heat_semigroup(&f, s + t).unwrap();
        prop_assert!(two.sub(&one).unwrap().norm_l2() <= 1e-13 * f.norm_l2());
        prop_assert!(one.norm_l2() <= f.norm_l2());
    }

    #[test]
    fn besov_norm_is_a_norm(g in grid_strategy(), seed in any::<u64>(), s in -1.0f64..2.0, p in 1.0f64..6.0) {
        let fam = build_family(&g, TransitionProfile::default()).unwrap();
        let mut rng = rng_from_seed(seed);
        let a = random_field(&g, &mut rng, |k| (-k * k).exp());
        let b = random_field(&g, &mut rng, |k| (-k * k).exp());
        let spec = BesovSpec::new(s, p, 1.0).unwrap();
        let (na, nb) = (besov_norm(&a, spec, &fam).unwrap(), besov_norm(&b, spec, &fam).unwrap());
        let nab = besov_norm(&a.add(&b).unwrap(), spec, &fam).unwrap();
        prop_assert!(nab <= (na + nb) * (1.0 + 1e-12));
        prop_assert!(na >= 0.0);
    }

    #[test]
    fn bony_decomposition_reconstructs(g in grid_strategy(), seed in any::<u64>()) {
        let fam = build_family(&g, TransitionProfile::default()).unwrap();
        let mut rng = rng_from_seed(seed);
        let cut = (g.n() / 4) as i64;
        let a = random_band_limited(&g, &mut rng, cut);
        let b = random_band_limited(&g, &mut rng, cut);
        prop_assert!(bony_reconstruct(&a, &b, &fam).unwrap() <= 1e-9);
    }

    #[test]
    fn pressure_contraction_tracks_sup_a(seed in any::<u64>(), target in 0.01f64..0.45) {
        let g = Grid2D::new(32, 8.0 * PI).unwrap();
        let mut rng = rng_from_seed(seed);
        let raw = random_field(&g, &mut rng, |k| (-k * k).exp());
        let a = raw.scale(target / raw.max_abs());
        let f = random_vector(&g, &mut rng, 10);
        let rep = solve_pressure(&a, &f, 1e-10, 200).unwrap();
        for q in &rep.contraction_estimates {
            prop_assert!(*q <= rep.sup_a + 0.05, "ratio {} with sup|a| = {}", q, rep.sup_a);
        }
        prop_assert!(rep.final_residual <= 1e-10);
    }

    #[test]
    fn fit_recovers_power_laws(exp in 0.0f64..3.0, pref in 0.01f64..100.0) {
        let series: Vec<(f64, f64)> = (0..40).map(|i| {
            let t = 10f64.powf(2.0 * i as f64 / 39.0);
            (t, pref * (1.0 + t).powf(-exp))
        }).collect();
        let fit = fit_decay(&series, (1.0, 100.0), 100.0).unwrap();
        prop_assert!((fit.exponent - exp).abs() <= 1e-10);
        prop_assert!((fit.prefactor / pref - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn resampling_preserves_the_field(seed in any::<u64>()) {
        let g = Grid2D::new(16, 10.0).unwrap();
        let fine = Grid2D::new(64, 10.0).unwrap();
        let mut rng = rng_from_seed(seed);
        let f = random_band_limited(&g, &mut rng, 7);
        let up = f.resample(&fine).unwrap();
        prop_assert!((up.norm_l2() - f.norm_l2()).abs() <= 1e-12 * f.norm_l2());
        let fp = f.physical();
        let upp = up.physical();
        for iy in 0..16 {
            for ix in 0..16 {
                prop_assert!((fp[iy * 16 + ix] - upp[4 * iy * 64 + 4 * ix]).abs() <= 1e-12);
            }
        }
    }
}
