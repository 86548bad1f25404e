//! Mission region, synthetic wind fields and the RF intensity ground truth.
//!
//! Everything here is immutable once built. Fields live on a regular lattice
//! anchored at the lower-left corner of the region and are sampled by
//! bilinear interpolation.

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Point, Polygon, Rect};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Distances below this are clamped before evaluating free-space path loss.
pub const PATH_LOSS_MIN_DISTANCE: f64 = 1.0;

/// Bounded planar region with polygonal no-fly holes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub bounds: Rect,
    #[serde(default)]
    pub obstacles: Vec<Polygon>,
}

impl Region {
    pub fn new(bounds: Rect, obstacles: Vec<Polygon>) -> Result<Self> {
        let region = Self { bounds, obstacles };
        region.validate()?;
        Ok(region)
    }

    pub fn validate(&self) -> Result<()> {
        Rect::new(self.bounds.min, self.bounds.max)?;
        for (k, poly) in self.obstacles.iter().enumerate() {
            Polygon::new(poly.vertices.clone())?;
            if !poly.vertices.iter().all(|&v| self.bounds.contains(v)) {
                return Err(Error::Config(format!("obstacle {k} is not inside the region bounds")));
            }
        }
        Ok(())
    }

    /// Inside the bounds and outside every obstacle.
    pub fn is_free(&self, p: Point) -> bool {
        self.bounds.contains(p) && !self.obstacles.iter().any(|o| o.contains(p))
    }

    /// Collision predicate for straight segments.
    pub fn segment_free(&self, p: Point, q: Point) -> bool {
        if !self.is_free(p) || !self.is_free(q) {
            return false;
        }
        !self
            .obstacles
            .iter()
            .any(|o| o.edges().any(|(a, b)| crate::geometry::segments_intersect(p, q, a, b)))
    }

    /// Nearest free point to `p` (up to a small outward nudge off obstacle
    /// boundaries) together with the displacement magnitude.
    pub fn project(&self, p: Point) -> (Point, f64) {
        let clamped = self.bounds.clamp(p);
        if self.is_free(clamped) {
            return (clamped, p.dist(clamped));
        }
        let mut best: Option<Point> = None;
        for obstacle in self.obstacles.iter().filter(|o| o.contains(clamped)) {
            let n = obstacle.vertices.len();
            let ccw = obstacle.signed_area() > 0.0;
            let (edge, foot) = (0..n)
                .map(|i| {
                    let (a, b) = obstacle.edge(i);
                    (i, crate::geometry::closest_point_on_segment(clamped, a, b))
                })
                .min_by(|u, v| u.1.dist(clamped).total_cmp(&v.1.dist(clamped)))
                .expect("polygon has edges");
            let (a, b) = obstacle.edge(edge);
            let d = b - a;
            let len = d.norm();
            let outward = if ccw { Point::new(d.y, -d.x) } else { Point::new(-d.y, d.x) } * (1.0 / len);
            let mut eps = 1e-6;
            while eps <= 10.0 {
                let q = self.bounds.clamp(foot + outward * eps);
                if self.is_free(q) {
                    best = Some(q);
                    break;
                }
                eps *= 10.0;
            }
            if best.is_some() {
                break;
            }
        }
        let q = best.unwrap_or(clamped);
        (q, p.dist(q))
    }

    pub fn diameter(&self) -> f64 {
        self.bounds.diagonal()
    }
}

/// Regular lattice anchored at `origin` with `nx` × `ny` nodes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Lattice {
    pub origin: Point,
    pub spacing: f64,
    pub nx: usize,
    pub ny: usize,
}

impl Lattice {
    /// Smallest lattice with the given spacing whose nodes cover `rect`.
    pub fn covering(rect: &Rect, spacing: f64) -> Result<Self> {
        if !(spacing > 0.0 && spacing.is_finite()) {
            return Err(Error::Config(format!("lattice spacing must be positive, got {spacing}")));
        }
        let nx = (rect.width() / spacing - 1e-9).ceil().max(1.0) as usize + 1;
        let ny = (rect.height() / spacing - 1e-9).ceil().max(1.0) as usize + 1;
        Ok(Self { origin: rect.min, spacing, nx, ny })
    }

    pub fn node(&self, i: usize, j: usize) -> Point {
        Point::new(
            self.origin.x + i as f64 * self.spacing,
            self.origin.y + j as f64 * self.spacing,
        )
    }

    fn index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Cell lower-left indices and in-cell fractions for `p`.
    fn locate(&self, p: Point) -> Result<(usize, usize, f64, f64)> {
        let fx = (p.x - self.origin.x) / self.spacing;
        let fy = (p.y - self.origin.y) / self.spacing;
        let tol = 1e-9;
        let max_x = (self.nx - 1) as f64;
        let max_y = (self.ny - 1) as f64;
        if !(fx >= -tol && fx <= max_x + tol && fy >= -tol && fy <= max_y + tol) {
            return Err(Error::Domain(format!(
                "point ({}, {}) is outside the field coverage",
                p.x, p.y
            )));
        }
        let fx = fx.clamp(0.0, max_x);
        let fy = fy.clamp(0.0, max_y);
        let i = (fx.floor() as usize).min(self.nx - 2);
        let j = (fy.floor() as usize).min(self.ny - 2);
        Ok((i, j, fx - i as f64, fy - j as f64))
    }

    fn bilinear(&self, values: &[f64], p: Point) -> Result<f64> {
        let (i, j, tx, ty) = self.locate(p)?;
        let v00 = values[self.index(i, j)];
        let v10 = values[self.index(i + 1, j)];
        let v01 = values[self.index(i, j + 1)];
        let v11 = values[self.index(i + 1, j + 1)];
        Ok((1.0 - ty) * ((1.0 - tx) * v00 + tx * v10) + ty * ((1.0 - tx) * v01 + tx * v11))
    }
}

/// Gridded 2-D wind vectors (m/s).
#[derive(Debug, Clone, PartialEq)]
pub struct WindField {
    pub lattice: Lattice,
    u: Vec<f64>,
    v: Vec<f64>,
}

impl WindField {
    pub fn from_fn(lattice: Lattice, f: impl Fn(Point) -> Point) -> Result<Self> {
        let mut u = vec![0.0; lattice.len()];
        let mut v = vec![0.0; lattice.len()];
        for j in 0..lattice.ny {
            for i in 0..lattice.nx {
                let w = f(lattice.node(i, j));
                if !w.is_finite() {
                    return Err(Error::Config("wind vector is not finite".into()));
                }
                let k = lattice.index(i, j);
                u[k] = w.x;
                v[k] = w.y;
            }
        }
        Ok(Self { lattice, u, v })
    }

    /// Bilinearly interpolated wind at `p`.
    pub fn wind_at(&self, p: Point) -> Result<Point> {
        Ok(Point::new(self.lattice.bilinear(&self.u, p)?, self.lattice.bilinear(&self.v, p)?))
    }

    /// Stored vector at lattice node `(i, j)`.
    pub fn node_value(&self, i: usize, j: usize) -> Point {
        let k = self.lattice.index(i, j);
        Point::new(self.u[k], self.v[k])
    }

    /// Largest node speed; bilinear interpolation never exceeds it.
    pub fn max_speed(&self) -> f64 {
        self.u.iter().zip(&self.v).map(|(a, b)| a.hypot(*b)).fold(0.0, f64::max)
    }
}

/// Unit vector the wind blows toward, for a compass bearing it blows from
/// (degrees clockwise from north).
fn toward_from_bearing(from_deg: f64) -> Point {
    let rad = from_deg.to_radians();
    Point::new(-rad.sin(), -rad.cos())
}

/// Analytic or seeded wind field recipe.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum WindSpec {
    /// Constant wind blowing from compass bearing `from_deg`.
    Uniform { speed: f64, from_deg: f64 },
    /// Rankine vortex (counter-clockwise for positive `max_speed`).
    Vortex { center: Point, max_speed: f64, core_radius: f64 },
    /// Fixed direction, speed varying linearly from the south edge to the north edge.
    Shear { speed_south: f64, speed_north: f64, from_deg: f64 },
    /// Mean wind plus a smooth seeded Gaussian perturbation on each component.
    SeededSmoothNoise {
        mean_speed: f64,
        from_deg: f64,
        amplitude: f64,
        correlation_length: f64,
        seed: u64,
    },
}

impl WindSpec {
    /// Parses a standalone wind table, e.g. `kind = "uniform"` plus parameters.
    pub fn from_toml_str(s: &str) -> Result<Self> {
        toml::from_str(s).map_err(|e| Error::Config(format!("wind spec: {e}")))
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            WindSpec::Uniform { .. } => "uniform",
            WindSpec::Vortex { .. } => "vortex",
            WindSpec::Shear { .. } => "shear",
            WindSpec::SeededSmoothNoise { .. } => "seeded-smooth-noise",
        }
    }
}

/// Builds a wind field covering `region` with the given node spacing.
pub fn make_wind(spec: &WindSpec, region: &Region, spacing: f64) -> Result<WindField> {
    let lattice = Lattice::covering(&region.bounds, spacing)?;
    match *spec {
        WindSpec::Uniform { speed, from_deg } => {
            let w = toward_from_bearing(from_deg) * speed;
            WindField::from_fn(lattice, |_| w)
        }
        WindSpec::Vortex { center, max_speed, core_radius } => {
            if !(core_radius > 0.0) {
                return Err(Error::Config("vortex core_radius must be positive".into()));
            }
            WindField::from_fn(lattice, |p| {
                let d = p - center;
                let r = d.norm();
                if r == 0.0 {
                    return Point::default();
                }
                let speed = if r <= core_radius {
                    max_speed * r / core_radius
                } else {
                    max_speed * core_radius / r
                };
                Point::new(-d.y, d.x) * (speed / r)
            })
        }
        WindSpec::Shear { speed_south, speed_north, from_deg } => {
            let dir = toward_from_bearing(from_deg);
            let b = region.bounds;
            WindField::from_fn(lattice, |p| {
                let t = ((p.y - b.min.y) / b.height()).clamp(0.0, 1.0);
                dir * (speed_south + (speed_north - speed_south) * t)
            })
        }
        WindSpec::SeededSmoothNoise { mean_speed, from_deg, amplitude, correlation_length, seed } => {
            let mean = toward_from_bearing(from_deg) * mean_speed;
            let nu = smooth_gaussian_field(&lattice, correlation_length, seed)?;
            let nv = smooth_gaussian_field(&lattice, correlation_length, seed ^ 0x9E37_79B9_7F4A_7C15)?;
            let u = nu.iter().map(|n| mean.x + amplitude * n).collect();
            let v = nv.iter().map(|n| mean.y + amplitude * n).collect();
            Ok(WindField { lattice, u, v })
        }
    }
}

/// Unit-variance stationary Gaussian random field on `lattice`, obtained by
/// smoothing seeded white noise with a separable Gaussian kernel. The
/// resulting correlation decays as `exp(-d^2 / (2 L^2))` with `L = correlation_length`.
pub fn smooth_gaussian_field(lattice: &Lattice, correlation_length: f64, seed: u64) -> Result<Vec<f64>> {
    if !(correlation_length > 0.0) {
        return Err(Error::Config("correlation length must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sigma_cells = correlation_length / std::f64::consts::SQRT_2 / lattice.spacing;
    let pad = (3.0 * sigma_cells).ceil() as usize;
    let weights: Vec<f64> = {
        let raw: Vec<f64> = (0..=2 * pad)
            .map(|k| {
                let d = k as f64 - pad as f64;
                if sigma_cells > 0.0 {
                    (-0.5 * d * d / (sigma_cells * sigma_cells)).exp()
                } else {
                    f64::from(u8::from(k == pad))
                }
            })
            .collect();
        let norm = raw.iter().map(|w| w * w).sum::<f64>().sqrt();
        raw.into_iter().map(|w| w / norm).collect()
    };

    let wx = lattice.nx + 2 * pad;
    let wy = lattice.ny + 2 * pad;
    let noise: Vec<f64> = (0..wx * wy).map(|_| StandardNormal.sample(&mut rng)).collect();

    // separable pass along x, then along y
    let mut along_x = vec![0.0; lattice.nx * wy];
    for j in 0..wy {
        for i in 0..lattice.nx {
            along_x[j * lattice.nx + i] =
                weights.iter().enumerate().map(|(k, w)| w * noise[j * wx + i + k]).sum();
        }
    }
    let mut out = vec![0.0; lattice.len()];
    for j in 0..lattice.ny {
        for i in 0..lattice.nx {
            out[j * lattice.nx + i] = weights
                .iter()
                .enumerate()
                .map(|(k, w)| w * along_x[(j + k) * lattice.nx + i])
                .sum();
        }
    }
    Ok(out)
}

/// Free-space path loss in dB, `-10 log10(G λ² / (4π d)²)`, with `d`
/// clamped below at [`PATH_LOSS_MIN_DISTANCE`].
pub fn path_loss_db(d: f64, wavelength: f64, gain: f64) -> f64 {
    let d = d.max(PATH_LOSS_MIN_DISTANCE);
    let ratio = gain * wavelength * wavelength / ((4.0 * PI * d) * (4.0 * PI * d));
    -10.0 * ratio.log10()
}

/// Omni-directional transmitter with lognormal shadowing parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RfSource {
    pub position: Point,
    pub tx_power_dbm: f64,
    pub frequency_hz: f64,
    pub gain_tx_dbi: f64,
    pub gain_rx_dbi: f64,
    pub shadowing_sigma_db: f64,
    pub shadowing_length_m: f64,
    pub seed: u64,
}

impl RfSource {
    pub fn validate(&self) -> Result<()> {
        if !(self.frequency_hz > 0.0) {
            return Err(Error::Config("rf frequency must be positive".into()));
        }
        if !(self.shadowing_sigma_db >= 0.0) {
            return Err(Error::Config("shadowing sigma must be non-negative".into()));
        }
        if !(self.shadowing_length_m > 0.0) {
            return Err(Error::Config("shadowing length must be positive".into()));
        }
        Ok(())
    }

    pub fn wavelength(&self) -> f64 {
        SPEED_OF_LIGHT / self.frequency_hz
    }
}

/// Shadowing offsets in dB on a lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct ShadowField {
    pub lattice: Lattice,
    pub seed: u64,
    values: Vec<f64>,
}

impl ShadowField {
    pub fn generate(lattice: Lattice, src: &RfSource) -> Result<Self> {
        src.validate()?;
        let values = if src.shadowing_sigma_db == 0.0 {
            vec![0.0; lattice.len()]
        } else {
            smooth_gaussian_field(&lattice, src.shadowing_length_m, src.seed)?
                .into_iter()
                .map(|z| z * src.shadowing_sigma_db)
                .collect()
        };
        Ok(Self { lattice, seed: src.seed, values })
    }

    pub fn offset_at(&self, p: Point) -> Result<f64> {
        self.lattice.bilinear(&self.values, p)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Received power in dBm at `p`: transmit power plus antenna gains minus
/// free-space loss plus the interpolated shadowing offset.
pub fn rf_truth(p: Point, src: &RfSource, shadow: &ShadowField) -> Result<f64> {
    let loss = path_loss_db(p.dist(src.position), src.wavelength(), 1.0);
    Ok(src.tx_power_dbm + src.gain_tx_dbi + src.gain_rx_dbi - loss + shadow.offset_at(p)?)
}

/// Complete environment the mission flies in.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub region: Region,
    pub wind: WindField,
    pub source: RfSource,
    pub shadow: ShadowField,
}

impl Scenario {
    pub fn build(region: Region, wind: &WindSpec, field_spacing: f64, source: RfSource) -> Result<Self> {
        region.validate()?;
        let wind = make_wind(wind, &region, field_spacing)?;
        let shadow = ShadowField::generate(wind.lattice, &source)?;
        Ok(Self { region, wind, source, shadow })
    }

    /// Received power at `p`. Outside the region (a UAV may overshoot the
    /// boundary while turning) the shadowing of the nearest boundary point is used.
    pub fn truth(&self, p: Point) -> Result<f64> {
        let loss = path_loss_db(p.dist(self.source.position), self.source.wavelength(), 1.0);
        let s = &self.source;
        Ok(s.tx_power_dbm + s.gain_tx_dbi + s.gain_rx_dbi - loss + self.shadow.offset_at(self.region.bounds.clamp(p))?)
    }
}
