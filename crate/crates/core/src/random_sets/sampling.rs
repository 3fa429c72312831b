use std::f64::consts::PI;

use rand::distr::Open01;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use statrs::function::gamma::gamma;

use super::seed::SeedSpec;
use crate::{Error, Result};

/// Whether interval families shift the ellipsoid so every coordinate is
/// nonnegative (`Y_i = X_i + a_i`).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Shift {
    None,
    ToPositive,
}

/// Axis-aligned ellipsoid `sum_i x_i^2 / a_i^2 <= 1` in `R^n`, `n = a.len()`.
#[derive(Clone, Debug, PartialEq)]
pub struct EllipsoidFamilySpec {
    semi_axes: Vec<f64>,
    shift: Shift,
}

impl EllipsoidFamilySpec {
    pub fn new(semi_axes: Vec<f64>, shift: Shift) -> Result<Self> {
        if semi_axes.is_empty() {
            return Err(Error::InvalidFamily("ellipsoid needs dimension >= 1".into()));
        }
        if semi_axes.iter().any(|a| !(a.is_finite() && *a > 0.0)) {
            return Err(Error::InvalidFamily("semi-axes must be positive and finite".into()));
        }
        Ok(Self { semi_axes, shift })
    }

    pub fn dim(&self) -> usize {
        self.semi_axes.len()
    }

    pub fn semi_axes(&self) -> &[f64] {
        &self.semi_axes
    }

    pub fn shift(&self) -> Shift {
        self.shift
    }

    /// Checks `a_i <= sqrt(n)` for all `i`, the cap under which
    /// `(1/n^2) sum_i Var(Y_i) <= 1/(n+2)`.
    pub fn check_sqrt_n_cap(&self) -> Result<()> {
        let cap = (self.dim() as f64).sqrt();
        match self.semi_axes.iter().position(|&a| a > cap) {
            None => Ok(()),
            Some(i) => Err(Error::InvalidFamily(format!(
                "semi-axis a_{} = {} exceeds sqrt(n) = {cap}",
                i + 1,
                self.semi_axes[i]
            ))),
        }
    }

    /// `Var(X_i) = a_i^2 / (n + 2)` for the uniform law on the ellipsoid.
    pub fn coordinate_variances(&self) -> Vec<f64> {
        let n = self.dim() as f64;
        self.semi_axes.iter().map(|a| a * a / (n + 2.0)).collect()
    }

    /// The constant uniform density `Gamma(n/2 + 1) / (pi^(n/2) prod_i a_i)`.
    pub fn density(&self) -> f64 {
        let n = self.dim() as f64;
        gamma(n / 2.0 + 1.0) / (PI.powf(n / 2.0) * self.semi_axes.iter().product::<f64>())
    }
}

/// One uniform point of the ellipsoid with semi-axes `axes`, centered at 0:
/// a standard normal vector projected to the unit sphere, pushed to radius
/// `U^(1/n)` and stretched along each axis.
pub(crate) fn draw_ellipsoid_point<R: Rng + ?Sized>(rng: &mut R, axes: &[f64], out: &mut [f64]) {
    let n = axes.len();
    let norm = loop {
        out.iter_mut().for_each(|x| *x = StandardNormal.sample(rng));
        let norm = out.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.0 {
            break norm;
        }
    };
    let u: f64 = rng.sample(Open01);
    let radius = u.powf(1.0 / n as f64);
    for (x, a) in out.iter_mut().zip(axes) {
        *x = a * (radius * (*x / norm));
    }
}

/// `count` points uniform in the centered ellipsoid of `spec`, drawn
/// sequentially from `seed`'s stream.
pub fn sample_ellipsoid_uniform(spec: &EllipsoidFamilySpec, count: usize, seed: SeedSpec) -> Result<Vec<Vec<f64>>> {
    if count == 0 {
        return Err(Error::InsufficientSamples {
            what: "points",
            needed: 1,
            got: 0,
        });
    }
    let mut rng = seed.rng();
    Ok((0..count)
        .map(|_| {
            let mut p = vec![0.0; spec.dim()];
            draw_ellipsoid_point(&mut rng, &spec.semi_axes, &mut p);
            p
        })
        .collect())
}

/// Pairs `(xi, eta)` uniform on `{(x - c1)^2/a^2 + (y - c2)^2/b^2 <= 1}`.
/// The coordinates are uncorrelated but not independent.
pub fn sample_ellipse_pair(
    a: f64,
    b: f64,
    center: (f64, f64),
    count: usize,
    seed: SeedSpec,
) -> Result<Vec<(f64, f64)>> {
    let spec = EllipsoidFamilySpec::new(vec![a, b], Shift::None)?;
    if !(center.0.is_finite() && center.1.is_finite()) {
        return Err(Error::NonFinite("ellipse center"));
    }
    let mut rng = seed.rng();
    let mut p = [0.0; 2];
    Ok((0..count)
        .map(|_| {
            draw_ellipsoid_point(&mut rng, spec.semi_axes(), &mut p);
            (center.0 + p[0], center.1 + p[1])
        })
        .collect())
}

/// Fraction of `count` points uniform in the bounding box `prod [-a_i, a_i]`
/// that land inside the ellipsoid. Its expectation is the volume ratio
/// `1 / (density * 2^n)`, e.g. `pi/4` for an ellipse.
pub fn ellipsoid_box_hit_rate(spec: &EllipsoidFamilySpec, count: usize, seed: SeedSpec) -> f64 {
    let mut rng = seed.rng();
    let hits = (0..count)
        .filter(|_| {
            spec.semi_axes
                .iter()
                .map(|&a| {
                    let x: f64 = rng.random_range(-a..a);
                    (x / a) * (x / a)
                })
                .sum::<f64>()
                <= 1.0
        })
        .count();
    hits as f64 / count as f64
}
