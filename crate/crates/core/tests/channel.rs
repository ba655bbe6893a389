mod common;

use std::f64::consts::PI;

use approx::assert_relative_eq;
use nfbm::channel::{
    antenna_positions, los_channel, nlos_channel, two_ray_channel, ArraySpec, SceneConfig,
    SPEED_OF_LIGHT,
};
use nfbm::C64;
use proptest::prelude::*;

/// Element lateral coordinate, computed from scratch.
fn lateral(n: usize, count: usize, spacing: f64) -> f64 {
    (n as f64 - (count as f64 - 1.0) / 2.0) * spacing
}

fn oracle_los(scene: &SceneConfig, nr: usize, nt: usize) -> C64 {
    let lambda = SPEED_OF_LIGHT / scene.carrier_frequency;
    let yt = lateral(nt, scene.tx_array.num_elements, scene.tx_array.element_spacing);
    let yr = lateral(nr, scene.rx_array.num_elements, scene.rx_array.element_spacing);
    let r = (scene.distance.powi(2) + (yr - yt).powi(2)).sqrt();
    let alpha =
        (scene.tx_array.element_gain * scene.rx_array.element_gain).sqrt() * lambda / (4.0 * PI * r);
    C64::from_polar(alpha, -2.0 * PI * r / lambda)
}

fn oracle_nlos(scene: &SceneConfig, nr: usize, nt: usize) -> C64 {
    let lambda = SPEED_OF_LIGHT / scene.carrier_frequency;
    let yt = lateral(nt, scene.tx_array.num_elements, scene.tx_array.element_spacing);
    let yr = lateral(nr, scene.rx_array.num_elements, scene.rx_array.element_spacing);
    let (sx, sy) = (scene.scatterer_offset_axial, scene.scatterer_offset_lateral);
    let r1 = (sx.powi(2) + (sy - yt).powi(2)).sqrt();
    let r2 = ((scene.distance - sx).powi(2) + (sy - yr).powi(2)).sqrt();
    let r = r1 + r2;
    let beta = scene.reflection_coefficient
        * (scene.tx_array.element_gain * scene.rx_array.element_gain).sqrt()
        * lambda
        / (4.0 * PI * r);
    beta * C64::from_polar(1.0, -2.0 * PI * r / lambda)
}

fn scene_2x2() -> SceneConfig {
    SceneConfig {
        carrier_frequency: 28e9,
        tx_array: ArraySpec::new(2, 0.004, 2.0).unwrap(),
        rx_array: ArraySpec::new(2, 0.006, 1.5).unwrap(),
        distance: 0.7,
        scatterer_offset_axial: 0.3,
        scatterer_offset_lateral: 0.2,
        reflection_coefficient: C64::new(0.4, -0.3),
    }
}

#[test]
fn los_2x2_matches_scalar_oracle() {
    let scene = scene_2x2();
    let h = los_channel(&scene).unwrap();
    for nr in 0..2 {
        for nt in 0..2 {
            let expected = oracle_los(&scene, nr, nt);
            let got = h.entries[(nr, nt)];
            assert!((got - expected).norm() <= 1e-12 * expected.norm(), "({nr},{nt})");
        }
    }
}

#[test]
fn nlos_2x2_matches_scalar_oracle() {
    let scene = scene_2x2();
    let h = nlos_channel(&scene).unwrap();
    for nr in 0..2 {
        for nt in 0..2 {
            let expected = oracle_nlos(&scene, nr, nt);
            let got = h.entries[(nr, nt)];
            assert!((got - expected).norm() <= 1e-12 * expected.norm(), "({nr},{nt})");
        }
    }
}

#[test]
fn reversed_link_is_transpose() {
    let scene = common::square_scene(4, 0.3);
    let forward = two_ray_channel(&scene).unwrap();
    // the reversed link sees the scatterer from the other plane
    let reversed = SceneConfig {
        scatterer_offset_axial: scene.distance - scene.scatterer_offset_axial,
        ..scene.clone()
    };
    let backward = two_ray_channel(&reversed).unwrap();
    let diff = (&backward.entries - forward.entries.transpose()).norm();
    assert!(diff <= 1e-12 * forward.entries.norm(), "{diff}");
}

#[test]
fn antenna_positions_are_centered_and_spaced() {
    let a = ArraySpec::new(5, 0.01, 1.0).unwrap();
    let p = antenna_positions(&a, 3.0);
    assert_eq!(p.len(), 5);
    assert!(p.iter().all(|q| q[0] == 3.0 && q[2] == 0.0));
    let sum: f64 = p.iter().map(|q| q[1]).sum();
    assert!(sum.abs() < 1e-15);
    for w in p.windows(2) {
        assert_relative_eq!(w[1][1] - w[0][1], 0.01, epsilon = 1e-15);
    }
}

fn arb_scene() -> impl Strategy<Value = SceneConfig> {
    (
        1usize..6,
        1usize..6,
        1e9f64..1e11,
        0.05f64..5.0,
        0.1f64..0.9,
        -1.0f64..1.0,
        0.0f64..1.0,
        0.0f64..(2.0 * PI),
    )
        .prop_map(|(nt, nr, freq, distance, ax, lat, gmag, gphase)| {
            let lambda = SPEED_OF_LIGHT / freq;
            SceneConfig {
                carrier_frequency: freq,
                tx_array: ArraySpec::new(nt, lambda / 2.0, 1.0).unwrap(),
                rx_array: ArraySpec::new(nr, lambda * 0.7, 2.0).unwrap(),
                distance,
                scatterer_offset_axial: ax * distance,
                scatterer_offset_lateral: lat * distance,
                reflection_coefficient: C64::from_polar(gmag, gphase),
            }
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn los_magnitude_and_phase(scene in arb_scene()) {
        let h = los_channel(&scene).unwrap();
        let lambda = scene.wavelength();
        let tx = scene.tx_positions();
        let rx = scene.rx_positions();
        let g = (scene.tx_array.element_gain * scene.rx_array.element_gain).sqrt();
        for (i, pr) in rx.iter().enumerate() {
            for (j, pt) in tx.iter().enumerate() {
                let r = ((pr[0] - pt[0]).powi(2) + (pr[1] - pt[1]).powi(2)).sqrt();
                let z = h.entries[(i, j)];
                let amp = g * lambda / (4.0 * PI * r);
                prop_assert!((z.norm() - amp).abs() <= 1e-13 * amp);
                // phase equals −2π r / λ modulo 2π
                let expected = C64::from_polar(1.0, -2.0 * PI * r / lambda);
                prop_assert!((z / z.norm() - expected).norm() < 1e-6);
            }
        }
    }

    #[test]
    fn zero_reflection_is_los_only(scene in arb_scene()) {
        let scene = SceneConfig { reflection_coefficient: C64::new(0.0, 0.0), ..scene };
        prop_assert_eq!(two_ray_channel(&scene).unwrap().entries, los_channel(&scene).unwrap().entries);
    }

    #[test]
    fn doubling_geometry_halves_los_amplitude(scene in arb_scene()) {
        let doubled = SceneConfig {
            tx_array: ArraySpec { element_spacing: 2.0 * scene.tx_array.element_spacing, ..scene.tx_array.clone() },
            rx_array: ArraySpec { element_spacing: 2.0 * scene.rx_array.element_spacing, ..scene.rx_array.clone() },
            distance: 2.0 * scene.distance,
            scatterer_offset_axial: 2.0 * scene.scatterer_offset_axial,
            scatterer_offset_lateral: 2.0 * scene.scatterer_offset_lateral,
            ..scene.clone()
        };
        let a = los_channel(&scene).unwrap();
        let b = los_channel(&doubled).unwrap();
        for (x, y) in a.entries.iter().zip(b.entries.iter()) {
            prop_assert!((y.norm() - 0.5 * x.norm()).abs() <= 1e-13 * x.norm());
        }
    }
}
