#![allow(dead_code)]

use blockade::perturb::{g2_tilde_derivs, simplex_exp, simplex_integrate, ExpSum};
use blockade::{DriveSpec, SystemParams, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Drive from the appendix table for the bichromatic fast-blockade figure.
pub fn bichromatic_reference() -> DriveSpec {
    DriveSpec::bichromatic((0.005, 0.005), (-0.0192947, -0.0282437), 2.83667).unwrap()
}

/// Drive optimized for a flat minimum.
pub fn flat_reference() -> DriveSpec {
    DriveSpec::bichromatic((0.005, 0.005), (0.0165539, -0.0364786), 1.4571).unwrap()
}

pub fn monochromatic_reference() -> DriveSpec {
    DriveSpec::monochromatic(0.005, -0.03953).unwrap()
}

/// Gauss–Legendre nodes and weights on `[-1, 1]` (Newton on `P_n`).
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-15 {
                break;
            }
        }
        x[i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    (x, w)
}

struct Rule {
    x: Vec<f64>,
    w: Vec<f64>,
    panels: usize,
}

impl Rule {
    fn nested(&self, rates: &[C64], upper: f64) -> C64 {
        let Some((&a, rest)) = rates.split_first() else {
            return c(1.0, 0.0);
        };
        let h = upper / self.panels as f64;
        let mut sum = c(0.0, 0.0);
        for p in 0..self.panels {
            let lo = p as f64 * h;
            for (xi, wi) in self.x.iter().zip(&self.w) {
                let s = lo + 0.5 * h * (xi + 1.0);
                sum += 0.5 * h * wi * (a * s).exp() * self.nested(rest, s);
            }
        }
        sum
    }
}

/// `∫_{0<t_k<…<t_1<t} exp(Σ a_j t_j)` by nested composite Gauss–Legendre,
/// doubling the panel count until two estimates agree to 1e-13.
pub fn simplex_quadrature(rates: &[C64], t: f64) -> C64 {
    let (x, w) = gauss_legendre(16);
    let mut rule = Rule { x, w, panels: 1 };
    let mut prev = rule.nested(rates, t);
    loop {
        rule.panels *= 2;
        let next = rule.nested(rates, t);
        if (next - prev).norm() <= 1e-13 * next.norm().max(1e-300) || rule.panels >= 8 {
            return next;
        }
        prev = next;
    }
}

/// Random simplex integrand; a quarter of the draws contain a vanishing or
/// nearly vanishing rate so that divided-difference nodes coincide.
pub fn random_simplex_instance(rng: &mut ChaCha8Rng) -> (Vec<C64>, f64) {
    let k = rng.random_range(1..=4);
    let mut rates: Vec<C64> = (0..k)
        .map(|_| c(rng.random_range(-0.5..0.2), rng.random_range(-1.0..1.0)))
        .collect();
    if rng.random_bool(0.25) {
        let j = rng.random_range(0..k);
        rates[j] = if rng.random_bool(0.5) {
            c(0.0, 0.0)
        } else {
            c(1e-9, -2e-9)
        };
    }
    (rates, rng.random_range(0.5..6.0))
}

/// Largest relative error of both simplex routes against quadrature.
pub fn simplex_oracle_error(instances: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..instances {
        let (rates, t) = random_simplex_instance(&mut rng);
        let reference = simplex_quadrature(&rates, t);
        let dd = simplex_exp(&rates, c(0.0, 0.0), t);
        let factors: Vec<ExpSum> = rates.iter().map(|&a| ExpSum::exp(a)).collect();
        let iterated = simplex_integrate(&factors).eval(t);
        let scale = reference.norm();
        worst = worst
            .max((dd - reference).norm() / scale)
            .max((iterated - reference).norm() / scale);
    }
    worst
}

/// Random weak-drive configuration in the regime the analytic model covers.
pub fn random_configuration(rng: &mut ChaCha8Rng) -> (SystemParams, DriveSpec, f64, usize) {
    let p = SystemParams::new(rng.random_range(0.1..0.4), rng.random_range(0.0..0.05)).unwrap();
    let d = DriveSpec::bichromatic(
        (rng.random_range(0.001..0.01), rng.random_range(0.001..0.01)),
        (rng.random_range(-0.3..0.3), rng.random_range(-0.3..0.3)),
        rng.random_range(0.0..std::f64::consts::TAU),
    )
    .unwrap();
    let t = rng.random_range(1.0..8.0) * p.period();
    (p, d, t, rng.random_range(1..=3))
}

/// Largest relative error of the analytic time derivatives of `g̃²` against
/// central differences with step `1e-4 T`: the first derivative from values,
/// the second from analytic first derivatives.
pub fn derivative_fd_error(draws: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..draws {
        let (p, d, t, k) = random_configuration(&mut rng);
        let h = 1e-4 * p.period();
        let (_, d1, d2) = g2_tilde_derivs(&p, &d, t, k).unwrap();
        let (gp, d1p, _) = g2_tilde_derivs(&p, &d, t + h, k).unwrap();
        let (gm, d1m, _) = g2_tilde_derivs(&p, &d, t - h, k).unwrap();
        let fd1 = (gp - gm) / (2.0 * h);
        let fd2 = (d1p - d1m) / (2.0 * h);
        worst = worst
            .max((d1 - fd1).abs() / (d1.abs() + 1e-12))
            .max((d2 - fd2).abs() / (d2.abs() + 1e-12));
    }
    worst
}

/// Coherent amplitude of a linear damped cavity driven by `ε e^{−iΔt}`.
pub fn coherent_amplitude(eps: f64, delta: f64, kappa: f64, t: f64) -> C64 {
    let z = c(kappa / 2.0, -delta);
    c(0.0, -eps) * (c(0.0, -delta * t).exp() - (-kappa * t / 2.0f64).exp()) / z
}
