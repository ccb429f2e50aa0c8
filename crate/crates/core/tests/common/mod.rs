#![allow(dead_code)]

use nalgebra::{Matrix3, SymmetricEigen};
use probarith::Mat3;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn to_na(m: &Mat3<f64>) -> Matrix3<f64> {
    Matrix3::from_fn(|i, j| m[i][j])
}

pub fn from_na(m: &Matrix3<f64>) -> Mat3<f64> {
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = m[(i, j)];
        }
    }
    out
}

/// Eigenvalues via nalgebra, ascending.
pub fn eigenvalues(m: &Mat3<f64>) -> [f64; 3] {
    let e = SymmetricEigen::new(to_na(m));
    let mut v = [e.eigenvalues[0], e.eigenvalues[1], e.eigenvalues[2]];
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v
}

/// Random SPD matrix `Q·diag(λ)·Qᵀ` with `λ` log-uniform in `[scale, scale·max_cond]`.
pub fn random_spd(rng: &mut StdRng, scale: f64, max_cond: f64) -> Mat3<f64> {
    let a = Matrix3::from_fn(|_, _| rng.gen_range(-1.0..1.0));
    let q = a.qr().q();
    let lambdas = [0, 1, 2].map(|_| scale * max_cond.powf(rng.gen_range(0.0..1.0)));
    let d = Matrix3::from_diagonal(&nalgebra::Vector3::from(lambdas));
    let m = q * d * q.transpose();
    let m = (m + m.transpose()) * 0.5;
    from_na(&m)
}

pub fn max_abs_diff(a: &Mat3<f64>, b: &Mat3<f64>) -> f64 {
    let mut d: f64 = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            d = d.max((a[i][j] - b[i][j]).abs());
        }
    }
    d
}

pub fn max_abs(m: &Mat3<f64>) -> f64 {
    m.iter().flatten().fold(0.0f64, |a, x| a.max(x.abs()))
}

pub fn vec_max_diff(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub fn norm(v: &[f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}
