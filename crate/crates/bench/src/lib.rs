//! Fixtures shared by the benchmarks.

use mcmullen_core::{generators, ConvexBody, TargetSet, Vector};

/// Bodies the kernel benchmarks run against, by name.
pub fn bodies() -> Vec<(&'static str, ConvexBody)> {
    vec![
        ("disk", generators::disk()),
        ("square", generators::square()),
        ("ngon-16", generators::regular_ngon(16).expect("16-gon")),
        ("cube", generators::cube().expect("cube")),
        (
            "random-3-20",
            generators::random_polytope(3, 20, 1).expect("random polytope"),
        ),
    ]
}

/// Six points spread over the body's bounding region.
pub fn point_cloud(dim: usize) -> Vec<Vector> {
    (0..6)
        .map(|i| Vector::from_fn(dim, |k, _| ((i * 7 + k * 3) % 11) as f64 / 5.0 - 1.0))
        .collect()
}

pub fn circle() -> TargetSet {
    generators::circle(200)
}
