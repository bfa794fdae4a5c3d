//! Deterministic sample points on the configured hypersurface.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{GeometryError, Result};
use crate::field::Point;
use crate::hypersurface::Hypersurface;

use super::config::{SamplingConfig, SamplingMode};

/// Largest `|F|` accepted for a retracted sample.
pub const ON_SURFACE_TOL: f64 = 1e-10;

fn place(surface: Option<&Hypersurface>, p: Point) -> Result<Point> {
    let Some(surface) = surface else {
        return Ok(p);
    };
    let q = surface.retract(&p)?;
    let residual = surface.value(&q).abs();
    if residual < ON_SURFACE_TOL {
        Ok(q)
    } else {
        Err(GeometryError::RetractionFailed(residual))
    }
}

/// Sample points of dimension `dim`. Random-box mode draws each coordinate
/// uniformly from `[-w, w]` with a `ChaCha8Rng` seeded by `sampling.seed`,
/// then retracts onto `surface`; explicit-points mode retracts the given
/// points.
pub fn sample_points(
    sampling: &SamplingConfig,
    dim: usize,
    surface: Option<&Hypersurface>,
) -> Result<Vec<Point>> {
    match sampling.mode {
        SamplingMode::ExplicitPoints => sampling
            .points
            .iter()
            .map(|c| place(surface, Point::new(c.clone())?))
            .collect(),
        SamplingMode::RandomBox => {
            let mut rng = ChaCha8Rng::seed_from_u64(sampling.seed);
            let w = sampling.box_half_width;
            (0..sampling.count)
                .map(|_| {
                    let coords: Vec<f64> = (0..dim).map(|_| rng.random_range(-w..=w)).collect();
                    place(surface, Point::new(coords)?)
                })
                .collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expression;

    fn hyperplane() -> Hypersurface {
        Hypersurface::new(parse_expression("x1 - y3", 3).unwrap()).unwrap()
    }

    #[test]
    fn seeded_sampling_is_deterministic_and_on_surface() {
        let cfg = SamplingConfig {
            seed: 42,
            ..SamplingConfig::default()
        };
        let surf = hyperplane();
        let a = sample_points(&cfg, 7, Some(&surf)).unwrap();
        let b = sample_points(&cfg, 7, Some(&surf)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 100);
        for p in &a {
            assert!((p.as_slice()[0] - p.as_slice()[5]).abs() < 1e-10);
        }
    }

    #[test]
    fn explicit_points_on_surface_are_unchanged() {
        let coords = vec![0.3, -0.2, 0.5, 0.7, 0.1, 0.3, -0.4];
        let cfg = SamplingConfig {
            mode: SamplingMode::ExplicitPoints,
            points: vec![coords.clone()],
            ..SamplingConfig::default()
        };
        let pts = sample_points(&cfg, 7, Some(&hyperplane())).unwrap();
        assert_eq!(pts[0].as_slice(), coords.as_slice());
    }
}
