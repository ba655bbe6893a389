//! Near-field two-ray channel between two parallel uniform linear arrays.
//!
//! Geometry: the transmit array lies in the plane `x = 0`, the receive array
//! in the plane `x = distance`, both extending along `y` and centered on the
//! boresight axis. Every entry of the channel uses the exact element-to-element
//! (or element-to-scatterer-to-element) path length, so the spherical
//! wavefront is captured without any Fresnel or planar approximation.

use std::f64::consts::PI;

use crate::{CMatrix, Error, Result, C64};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

pub type Point3 = [f64; 3];

pub fn wavelength(carrier_frequency: f64) -> f64 {
    SPEED_OF_LIGHT / carrier_frequency
}

/// A uniform linear array.
#[derive(Debug, Clone, PartialEq)]
pub struct ArraySpec {
    pub num_elements: usize,
    /// Element spacing in meters.
    pub element_spacing: f64,
    /// Linear power gain of each element.
    pub element_gain: f64,
}

impl ArraySpec {
    pub fn new(num_elements: usize, element_spacing: f64, element_gain: f64) -> Result<Self> {
        let spec = ArraySpec {
            num_elements,
            element_spacing,
            element_gain,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Isotropic elements spaced half a wavelength apart at `carrier_frequency`.
    pub fn half_wavelength(num_elements: usize, carrier_frequency: f64) -> Self {
        ArraySpec {
            num_elements,
            element_spacing: wavelength(carrier_frequency) / 2.0,
            element_gain: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_elements == 0 {
            return Err(Error::InvalidArray("num_elements must be at least 1".into()));
        }
        if !(self.element_spacing > 0.0 && self.element_spacing.is_finite()) {
            return Err(Error::InvalidArray(format!(
                "element_spacing must be positive, got {}",
                self.element_spacing
            )));
        }
        if !(self.element_gain > 0.0 && self.element_gain.is_finite()) {
            return Err(Error::InvalidArray(format!(
                "element_gain must be positive, got {}",
                self.element_gain
            )));
        }
        Ok(())
    }

    /// Distance between the two outermost elements.
    pub fn aperture(&self) -> f64 {
        (self.num_elements - 1) as f64 * self.element_spacing
    }
}

/// Element coordinates `(axial, lateral, 0)` of an array whose plane sits at
/// `plane_offset` along boresight.
pub fn antenna_positions(array: &ArraySpec, plane_offset: f64) -> Vec<Point3> {
    let center = (array.num_elements as f64 - 1.0) / 2.0;
    (0..array.num_elements)
        .map(|n| [plane_offset, (n as f64 - center) * array.element_spacing, 0.0])
        .collect()
}

fn dist(a: &Point3, b: &Point3) -> f64 {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    let dz = a[2] - b[2];
    (dx * dx + dy * dy + dz * dz).sqrt()
}

/// Physical scenario of a single link with one point scatterer.
#[derive(Debug, Clone, PartialEq)]
pub struct SceneConfig {
    pub carrier_frequency: f64,
    pub tx_array: ArraySpec,
    pub rx_array: ArraySpec,
    /// Boresight separation of the two array planes, meters.
    pub distance: f64,
    /// Scatterer position along boresight, measured from the transmit plane.
    pub scatterer_offset_axial: f64,
    /// Scatterer offset perpendicular to boresight.
    pub scatterer_offset_lateral: f64,
    pub reflection_coefficient: C64,
}

impl SceneConfig {
    /// Default reflection coefficient (real, 20 dB of reflection loss).
    pub const DEFAULT_REFLECTION: f64 = 0.1;
    /// Default scatterer position as fractions of the link distance (axial, lateral).
    pub const DEFAULT_SCATTERER: (f64, f64) = (0.5, 0.5);

    /// Scene with the scatterer at its default position (midway along
    /// boresight, offset laterally by half the distance) and the default
    /// reflection coefficient.
    pub fn with_default_scatterer(
        carrier_frequency: f64,
        tx_array: ArraySpec,
        rx_array: ArraySpec,
        distance: f64,
    ) -> Self {
        SceneConfig {
            carrier_frequency,
            tx_array,
            rx_array,
            distance,
            scatterer_offset_axial: Self::DEFAULT_SCATTERER.0 * distance,
            scatterer_offset_lateral: Self::DEFAULT_SCATTERER.1 * distance,
            reflection_coefficient: C64::new(Self::DEFAULT_REFLECTION, 0.0),
        }
    }

    /// Same scene at a different link distance, with the scatterer moved to
    /// the default position for that distance.
    pub fn at_distance(&self, distance: f64) -> Self {
        SceneConfig {
            distance,
            scatterer_offset_axial: Self::DEFAULT_SCATTERER.0 * distance,
            scatterer_offset_lateral: Self::DEFAULT_SCATTERER.1 * distance,
            ..self.clone()
        }
    }

    pub fn wavelength(&self) -> f64 {
        wavelength(self.carrier_frequency)
    }

    pub fn validate(&self) -> Result<()> {
        self.tx_array.validate()?;
        self.rx_array.validate()?;
        if !(self.carrier_frequency > 0.0 && self.carrier_frequency.is_finite()) {
            return Err(Error::InvalidScene(format!(
                "carrier_frequency must be positive, got {}",
                self.carrier_frequency
            )));
        }
        if !(self.distance > 0.0 && self.distance.is_finite()) {
            return Err(Error::InvalidScene(format!(
                "distance must be positive, got {}",
                self.distance
            )));
        }
        if !(self.scatterer_offset_axial > 0.0 && self.scatterer_offset_axial < self.distance) {
            return Err(Error::InvalidScene(format!(
                "scatterer_offset_axial must lie strictly between 0 and {}, got {}",
                self.distance, self.scatterer_offset_axial
            )));
        }
        if !self.scatterer_offset_lateral.is_finite() {
            return Err(Error::InvalidScene("scatterer_offset_lateral must be finite".into()));
        }
        let gamma = self.reflection_coefficient;
        if !(gamma.re.is_finite() && gamma.im.is_finite()) || gamma.norm() > 1.0 {
            return Err(Error::InvalidScene(format!(
                "reflection_coefficient must satisfy |Γ| <= 1, got {gamma}"
            )));
        }
        Ok(())
    }

    pub fn tx_positions(&self) -> Vec<Point3> {
        antenna_positions(&self.tx_array, 0.0)
    }

    pub fn rx_positions(&self) -> Vec<Point3> {
        antenna_positions(&self.rx_array, self.distance)
    }

    pub fn scatterer_position(&self) -> Point3 {
        [self.scatterer_offset_axial, self.scatterer_offset_lateral, 0.0]
    }

    /// Aperture of the larger of the two arrays.
    pub fn aperture(&self) -> f64 {
        self.tx_array.aperture().max(self.rx_array.aperture())
    }

    pub fn fraunhofer_distance(&self) -> f64 {
        fraunhofer_distance(self.aperture(), self.wavelength())
    }

    fn amplitude_scale(&self) -> f64 {
        (self.tx_array.element_gain * self.rx_array.element_gain).sqrt() * self.wavelength()
            / (4.0 * PI)
    }

    pub fn los_channel(&self) -> Result<ChannelMatrix> {
        los_channel(self)
    }

    pub fn nlos_channel(&self) -> Result<ChannelMatrix> {
        nlos_channel(self)
    }

    pub fn two_ray_channel(&self) -> Result<ChannelMatrix> {
        two_ray_channel(self)
    }
}

/// Free-space path term `scale / r · exp(-j 2π r / λ)`.
fn path_term(scale: C64, r: f64, lambda: f64) -> C64 {
    let phase = -2.0 * PI * (r / lambda).fract();
    scale / r * C64::from_polar(1.0, phase)
}

/// An `N_r × N_t` channel together with the scene that produced it.
#[derive(Debug, Clone)]
pub struct ChannelMatrix {
    pub entries: CMatrix,
    pub scene: SceneConfig,
}

impl ChannelMatrix {
    pub fn num_rx(&self) -> usize {
        self.entries.nrows()
    }

    pub fn num_tx(&self) -> usize {
        self.entries.ncols()
    }

    pub fn frobenius_norm_squared(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Rescaled copy with `||H||_F^2 = N_t · N_r`, i.e. unit average gain per
    /// antenna pair. Used by the normalized SNR convention.
    pub fn normalized(&self) -> ChannelMatrix {
        let energy = self.frobenius_norm_squared();
        let target = (self.num_rx() * self.num_tx()) as f64;
        let factor = if energy > 0.0 { (target / energy).sqrt() } else { 1.0 };
        ChannelMatrix {
            entries: self.entries.scale(factor),
            scene: self.scene.clone(),
        }
    }
}

/// Line-of-sight component: `α · exp(-j 2π r / λ)` with `α = √(G_t G_r) λ / (4π r)`.
pub fn los_channel(scene: &SceneConfig) -> Result<ChannelMatrix> {
    scene.validate()?;
    let lambda = scene.wavelength();
    let scale = C64::new(scene.amplitude_scale(), 0.0);
    let tx = scene.tx_positions();
    let rx = scene.rx_positions();
    let mut entries = CMatrix::zeros(rx.len(), tx.len());
    for (i, pr) in rx.iter().enumerate() {
        for (j, pt) in tx.iter().enumerate() {
            let r = dist(pr, pt);
            if r == 0.0 {
                return Err(Error::CoincidentElements {
                    what: "transmit and receive elements",
                });
            }
            entries[(i, j)] = path_term(scale, r, lambda);
        }
    }
    Ok(ChannelMatrix {
        entries,
        scene: scene.clone(),
    })
}

/// Single-bounce component via the point scatterer: `β · exp(-j 2π r̃ / λ)` with
/// `r̃` the two-hop path length and `β = Γ √(G_t G_r) λ / (4π r̃)`.
pub fn nlos_channel(scene: &SceneConfig) -> Result<ChannelMatrix> {
    scene.validate()?;
    let lambda = scene.wavelength();
    let scale = scene.reflection_coefficient * scene.amplitude_scale();
    let scatterer = scene.scatterer_position();
    let tx_hops = scene
        .tx_positions()
        .iter()
        .map(|p| dist(p, &scatterer))
        .collect::<Vec<_>>();
    let rx_hops = scene
        .rx_positions()
        .iter()
        .map(|p| dist(p, &scatterer))
        .collect::<Vec<_>>();
    if tx_hops.iter().chain(&rx_hops).any(|&r| r == 0.0) {
        return Err(Error::CoincidentElements {
            what: "scatterer and an array element",
        });
    }
    let entries = CMatrix::from_fn(rx_hops.len(), tx_hops.len(), |i, j| {
        path_term(scale, tx_hops[j] + rx_hops[i], lambda)
    });
    Ok(ChannelMatrix {
        entries,
        scene: scene.clone(),
    })
}

/// `H = H_LoS + H_NLoS`.
pub fn two_ray_channel(scene: &SceneConfig) -> Result<ChannelMatrix> {
    let los = los_channel(scene)?;
    let nlos = nlos_channel(scene)?;
    Ok(ChannelMatrix {
        entries: los.entries + nlos.entries,
        scene: los.scene,
    })
}

/// Boundary of the radiating near field, `2 D^2 / λ`.
pub fn fraunhofer_distance(aperture: f64, wavelength: f64) -> f64 {
    2.0 * aperture * aperture / wavelength
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn single(freq: f64) -> ArraySpec {
        ArraySpec::half_wavelength(1, freq)
    }

    #[test]
    fn positions_single_and_pair() {
        let one = antenna_positions(&single(30e9), 0.0);
        assert_eq!(one, vec![[0.0, 0.0, 0.0]]);
        let two = antenna_positions(&ArraySpec::new(2, 0.005, 1.0).unwrap(), 0.0);
        assert_eq!(two, vec![[0.0, -0.0025, 0.0], [0.0, 0.0025, 0.0]]);
    }

    #[test]
    fn aperture_of_256_element_array() {
        let a = ArraySpec::half_wavelength(256, 30e9);
        let expected = 255.0 * SPEED_OF_LIGHT / 30e9 / 2.0;
        assert_relative_eq!(a.aperture(), expected, max_relative = 1e-15);
        assert_relative_eq!(a.aperture(), 1.274118, epsilon = 1e-6);
    }

    #[test]
    fn fraunhofer_examples() {
        assert_relative_eq!(fraunhofer_distance(1.0, 0.01), 200.0);
        let a = ArraySpec::half_wavelength(256, 30e9);
        let d = fraunhofer_distance(a.aperture(), wavelength(30e9));
        assert!((d - 324.900).abs() < 1e-3, "{d}");
        assert!(fraunhofer_distance(1.0, 0.02) < fraunhofer_distance(1.0, 0.01));
    }

    #[test]
    fn single_element_los_amplitude() {
        // λ = 0.01 m
        let freq = SPEED_OF_LIGHT / 0.01;
        let mut scene = SceneConfig::with_default_scatterer(freq, single(freq), single(freq), 1.0);
        scene.reflection_coefficient = C64::new(0.0, 0.0);
        let h = los_channel(&scene).unwrap();
        let expected = 0.01 / (4.0 * PI);
        assert_relative_eq!(h.entries[(0, 0)].norm(), expected, max_relative = 1e-12);
        assert_relative_eq!(expected, 7.9577e-4, epsilon = 1e-8);
        // r / λ = 100 is integral, so the entry is real and positive
        let z = h.entries[(0, 0)];
        assert!(z.re > 0.0);
        assert!(z.im.abs() < 1e-12 * z.re);
    }

    #[test]
    fn nlos_zero_reflection_is_zero() {
        let freq = 30e9;
        let arr = ArraySpec::half_wavelength(4, freq);
        let mut scene = SceneConfig::with_default_scatterer(freq, arr.clone(), arr, 2.0);
        scene.reflection_coefficient = C64::new(0.0, 0.0);
        let h = nlos_channel(&scene).unwrap();
        assert!(h.entries.iter().all(|z| *z == C64::new(0.0, 0.0)));
        let total = two_ray_channel(&scene).unwrap();
        let los = los_channel(&scene).unwrap();
        assert_eq!(total.entries, los.entries);
    }

    #[test]
    fn nlos_boresight_midpoint() {
        let freq = SPEED_OF_LIGHT / 0.01;
        let mut scene = SceneConfig::with_default_scatterer(freq, single(freq), single(freq), 2.0);
        scene.scatterer_offset_lateral = 0.0;
        scene.reflection_coefficient = C64::new(0.5, 0.0);
        let h = nlos_channel(&scene).unwrap();
        // r̃ = 2 m
        assert_relative_eq!(
            h.entries[(0, 0)].norm(),
            0.5 * 0.01 / (8.0 * PI),
            max_relative = 1e-12
        );
    }

    #[test]
    fn one_by_one_is_scalar_sum() {
        let freq = 30e9;
        let scene = SceneConfig::with_default_scatterer(freq, single(freq), single(freq), 3.0);
        let los = los_channel(&scene).unwrap().entries[(0, 0)];
        let nlos = nlos_channel(&scene).unwrap().entries[(0, 0)];
        let total = two_ray_channel(&scene).unwrap().entries[(0, 0)];
        assert_eq!(total, los + nlos);
    }

    #[test]
    fn scatterer_on_receive_element_is_rejected() {
        let freq = 30e9;
        let mut scene = SceneConfig::with_default_scatterer(freq, single(freq), single(freq), 2.0);
        scene.scatterer_offset_lateral = 0.0;
        scene.scatterer_offset_axial = 2.0;
        assert!(matches!(nlos_channel(&scene), Err(Error::InvalidScene(_))));
    }

    #[test]
    fn invalid_scene_rejected() {
        let freq = 30e9;
        let arr = single(freq);
        let mut scene = SceneConfig::with_default_scatterer(freq, arr.clone(), arr, 2.0);
        scene.reflection_coefficient = C64::new(1.5, 0.0);
        assert!(scene.validate().is_err());
        scene.reflection_coefficient = C64::new(0.5, 0.0);
        scene.distance = -1.0;
        assert!(scene.validate().is_err());
        assert!(ArraySpec::new(0, 0.005, 1.0).is_err());
        assert!(ArraySpec::new(4, 0.0, 1.0).is_err());
        assert!(ArraySpec::new(4, 0.005, 0.0).is_err());
    }

    #[test]
    fn normalized_energy() {
        let freq = 30e9;
        let arr = ArraySpec::half_wavelength(8, freq);
        let scene = SceneConfig::with_default_scatterer(freq, arr.clone(), arr, 0.5);
        let h = two_ray_channel(&scene).unwrap().normalized();
        assert_relative_eq!(h.frobenius_norm_squared(), 64.0, max_relative = 1e-12);
    }
}
