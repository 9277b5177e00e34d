//! Rough timing of the dense generalized eigensolve at the grid sizes the
//! knot spectrum uses. Run with `cargo run --release --example eigen_probe`.

use nalgebra::{DMatrix, DVector};
use std::f64::consts::TAU;
use std::time::Instant;
use torusphase::numerics::{generalized_eigs, EigenProblem};

fn main() {
    for n in [256usize, 512, 1024, 2048] {
        let h = TAU / n as f64;
        let mut k = DMatrix::zeros(n, n);
        for i in 0..n {
            k[(i, i)] = 2.0 / (h * h);
            k[(i, (i + 1) % n)] = -1.0 / (h * h);
            k[((i + 1) % n, i)] = -1.0 / (h * h);
        }
        let mass = DVector::from_element(n, 2.0);
        let prob = EigenProblem::new(k, mass, TAU).unwrap();
        let t0 = Instant::now();
        let pairs = generalized_eigs(&prob, 5).unwrap();
        let dt = t0.elapsed();
        println!(
            "n = {n:5}: {:*>8.2?}  E = {:?}",
            dt,
            pairs.iter().map(|p| p.value).collect::<Vec<_>>()
        );
    }
}
