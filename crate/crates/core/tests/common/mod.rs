#![allow(dead_code)]

use polyflow::oracle::{integrate_observe, ForcedSystem};
use polyflow::Polygon;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_polygon(rng: &mut ChaCha8Rng, n: usize, p: usize) -> Polygon {
    let coords = (0..n * p).map(|_| rng.gen_range(-1.0..1.0)).collect();
    Polygon::from_flat(n, p, coords).unwrap()
}

/// The irregular pentagon used by the damped-flow scenarios.
pub fn pentagon() -> Polygon {
    Polygon::from_vertices(&[[1.0, 0.1], [0.2, 0.9], [-0.8, 0.6], [-0.7, -0.5], [0.4, -0.8]]).unwrap()
}

/// `-4^m sin^{2m}(pi k / n)`, written out independently of the library.
pub fn lambda(n: usize, m: u32, k: usize) -> f64 {
    let s = (std::f64::consts::PI * k as f64 / n as f64).sin();
    -(4.0 * s * s).powi(m as i32)
}

/// Largest sup-norm gap between an RK4 run and `closed(t)`, compared every
/// `every` steps and at the end.
pub fn rk4_gap(
    sys: &ForcedSystem,
    x0: &Polygon,
    v0: &Polygon,
    t_end: f64,
    dt: f64,
    every: usize,
    closed: impl Fn(f64) -> Polygon,
) -> f64 {
    let steps = ((t_end.abs() / dt) - 1e-9).ceil() as usize;
    let mut i = 0usize;
    let mut worst: f64 = 0.0;
    integrate_observe(sys, x0, v0, t_end, dt, |t, x, _| {
        if i % every == 0 || i == steps {
            worst = worst.max(x.sup_distance(&closed(t))?);
        }
        i += 1;
        Ok(())
    })
    .unwrap();
    worst
}
