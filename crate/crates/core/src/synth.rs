//! Labeled 2-D synthetic datasets for smoke tests and demos.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::preprocess::RawDataset;

const SIGMA: f64 = 0.04;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    /// Two isotropic blobs 0.5 apart per axis (about 17 sigma).
    TwoGaussians,
    /// Four isotropic blobs on a 2x2 grid.
    GridBlobs,
}

impl std::str::FromStr for Shape {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "two-gaussians" => Ok(Shape::TwoGaussians),
            "grid-blobs" => Ok(Shape::GridBlobs),
            _ => Err(format!("unknown shape '{s}'; expected 'two-gaussians' or 'grid-blobs'")),
        }
    }
}

impl Shape {
    fn centers(self) -> &'static [[f64; 2]] {
        match self {
            Shape::TwoGaussians => &[[0.25, 0.25], [0.75, 0.75]],
            Shape::GridBlobs => &[[0.2, 0.2], [0.2, 0.8], [0.8, 0.2], [0.8, 0.8]],
        }
    }
}

/// `n` points split as evenly as possible across the shape's blobs (earlier
/// blobs take the remainder), grouped by blob, labeled `0..k`.
pub fn generate_synthetic(shape: Shape, n: usize, seed: u64) -> Result<RawDataset> {
    if n < 4 {
        return Err(Error::Config(format!("synthetic datasets need n >= 4, got {n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, SIGMA).expect("valid sigma");
    let centers = shape.centers();
    let k = centers.len();
    let mut rows = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for (b, c) in centers.iter().enumerate() {
        let size = n / k + usize::from(b < n % k);
        for _ in 0..size {
            rows.push(vec![c[0] + noise.sample(&mut rng), c[1] + noise.sample(&mut rng)]);
            labels.push(b.to_string());
        }
    }
    Ok(RawDataset::new(rows, Some(labels))?.with_feature_names(vec!["x".into(), "y".into()]))
}
