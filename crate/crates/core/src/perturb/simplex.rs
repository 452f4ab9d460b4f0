//! Integrals of exponentials over the time-ordered simplex
//! `0 < t_k < … < t_1 < t`.
//!
//! Two routes are provided. The production route uses the identity
//!
//! ```text
//! ∫ exp(Σ a_j t_j) = e^{x t}[0, b_1, …, b_k],   b_m = a_1 + … + a_m,
//! ```
//!
//! (a divided difference of `x ↦ e^{x t}`), evaluated by a clustered Newton
//! table that stays accurate when nodes coincide. The second route integrates
//! [`ExpSum`]s one variable at a time and serves as an independent check.

use crate::C64;

use super::expsum::ExpSum;

/// Nodes closer than this (after scaling by `t`) share a Taylor cluster.
const CLUSTER_RADIUS: f64 = 0.5;
const TAYLOR_TERMS: usize = 48;

/// Divided difference of `exp` at the nodes `w` (any order, repeats allowed).
pub fn exp_divided_difference(w: &[C64]) -> C64 {
    let n = w.len();
    assert!(n > 0, "divided difference needs at least one node");
    if n == 1 {
        return w[0].exp();
    }

    // single-linkage clusters, then lay them out contiguously
    let mut label: Vec<usize> = (0..n).collect();
    for i in 0..n {
        for j in i + 1..n {
            if (w[i] - w[j]).norm() < CLUSTER_RADIUS {
                let (a, b) = (label[i], label[j]);
                if a != b {
                    label.iter_mut().filter(|l| **l == b).for_each(|l| *l = a);
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| (label[i], i));
    let z: Vec<C64> = order.iter().map(|&i| w[i]).collect();
    let cl: Vec<usize> = order.iter().map(|&i| label[i]).collect();

    // table[i·n + m] = exp[z_i, …, z_{i+m}]
    let mut table = vec![C64::new(0.0, 0.0); n * n];
    for m in 0..n {
        for i in 0..n - m {
            let j = i + m;
            table[i * n + m] = if cl[i] == cl[j] {
                clustered(&z[i..=j])
            } else {
                (table[(i + 1) * n + m - 1] - table[i * n + m - 1]) / (z[j] - z[i])
            };
        }
    }
    table[n - 1]
}

/// Taylor expansion about the centroid: `e^c Σ_{p≥0} h_p(u)/(p+m)!` with
/// `u = z − c` and `h_p` the complete homogeneous symmetric polynomials.
fn clustered(z: &[C64]) -> C64 {
    let m = z.len() - 1;
    let c = z.iter().sum::<C64>() / z.len() as f64;
    // |h_p| ≤ C(p+m, m) r^p, so r^P/P! below 1e-18 bounds the dropped tail
    let r = z.iter().map(|&x| (x - c).norm()).fold(0.0, f64::max);
    let mut terms = 1;
    let mut bound = 1.0;
    while terms < TAYLOR_TERMS && bound > 1e-18 {
        bound *= r / terms as f64;
        terms += 1;
    }
    let mut h = [C64::new(0.0, 0.0); TAYLOR_TERMS];
    h[0] = C64::new(1.0, 0.0);
    for &node in z {
        let u = node - c;
        for p in 1..terms {
            let prev = h[p - 1];
            h[p] += u * prev;
        }
    }
    let mut inv_fact = 1.0;
    for k in 2..=m {
        inv_fact /= k as f64;
    }
    let mut acc = C64::new(0.0, 0.0);
    for (p, hp) in h[..terms].iter().enumerate() {
        acc += hp * inv_fact;
        inv_fact /= (p + m + 1) as f64;
    }
    c.exp() * acc
}

/// `e^{x t}[z_0, …, z_k] = t^k · exp[t z_0, …, t z_k]`.
fn scaled_dd(z: &[C64], t: f64) -> C64 {
    let w: Vec<C64> = z.iter().map(|&x| x * t).collect();
    exp_divided_difference(&w) * t.powi(z.len() as i32 - 1)
}

fn nodes(rates: &[C64]) -> Vec<C64> {
    let mut z = Vec::with_capacity(rates.len() + 1);
    let mut b = C64::new(0.0, 0.0);
    z.push(b);
    for &a in rates {
        b += a;
        z.push(b);
    }
    z
}

/// `e^{shift·t} ∫_{0<t_k<…<t_1<t} exp(Σ_j rates[j]·t_{j+1})`.
pub fn simplex_exp(rates: &[C64], shift: C64, t: f64) -> C64 {
    (shift * t).exp() * scaled_dd(&nodes(rates), t)
}

/// [`simplex_exp`] together with its first and second derivatives in `t`.
pub fn simplex_exp_derivs(rates: &[C64], shift: C64, t: f64) -> [C64; 3] {
    let z = nodes(rates);
    let k = rates.len();
    let zero = C64::new(0.0, 0.0);
    let e = scaled_dd(&z, t);
    // d/dt drops the node at 0; d²/dt² follows from Leibniz on x·e^{xt}
    let (e1, e2) = match k {
        0 => (zero, zero),
        1 => {
            let d1 = scaled_dd(&z[1..], t);
            (d1, z[1] * d1)
        }
        _ => {
            let d1 = scaled_dd(&z[1..], t);
            (d1, z[1] * d1 + scaled_dd(&z[2..], t))
        }
    };
    let g = (shift * t).exp();
    [
        g * e,
        g * (shift * e + e1),
        g * (shift * shift * e + 2.0 * shift * e1 + e2),
    ]
}

/// Iterated closed-form route: `∫ Π_j factors[j](t_{j+1})` over the simplex,
/// returned as a function of the upper limit `t`.
pub fn simplex_integrate(factors: &[ExpSum]) -> ExpSum {
    let mut g = ExpSum::constant(C64::new(1.0, 0.0));
    for f in factors.iter().rev() {
        g = (f * &g).integrate();
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn constant_over_triangle() {
        let z = c(0.0, 0.0);
        for t in [0.0, 0.3, 4.0] {
            assert!((simplex_exp(&[z, z], z, t) - c(t * t / 2.0, 0.0)).norm() < 1e-14);
            let f =
                simplex_integrate(&[ExpSum::constant(c(1.0, 0.0)), ExpSum::constant(c(1.0, 0.0))]);
            assert!((f.eval(t) - c(t * t / 2.0, 0.0)).norm() < 1e-13);
        }
    }

    #[test]
    fn single_exponential_in_either_slot() {
        let a = c(0.7, -1.3);
        let z = c(0.0, 0.0);
        for t in [0.01, 1.0, 3.0] {
            let e = (a * t).exp();
            let inner = (e - 1.0 - a * t) / (a * a);
            let outer = (e * (a * t - 1.0) + 1.0) / (a * a);
            for (rates, want) in [([z, a], inner), ([a, z], outer)] {
                let tol = 1e-12 * want.norm();
                assert!((simplex_exp(&rates, z, t) - want).norm() < tol);
                let f = simplex_integrate(&rates.map(ExpSum::exp));
                assert!((f.eval(t) - want).norm() < tol);
            }
        }
    }

    #[test]
    fn repeated_nodes() {
        // k+1 equal nodes: e^w / k!
        let w = c(1.2, 30.0);
        let got = exp_divided_difference(&[w; 5]);
        assert!((got - w.exp() / 24.0).norm() < 1e-15 * w.exp().norm());
    }

    #[test]
    fn two_far_nodes() {
        let (a, b) = (c(0.1, 40.0), c(-0.2, -35.0));
        let want = (b.exp() - a.exp()) / (b - a);
        assert!((exp_divided_difference(&[a, b]) - want).norm() < 1e-16);
    }

    #[test]
    fn nearly_coincident_nodes_are_stable() {
        // exp[0, ε] = (e^ε − 1)/ε, computed from its series to avoid cancellation
        let eps = c(1e-9, 2e-9);
        let want = c(1.0, 0.0) + eps / 2.0 + eps * eps / 6.0;
        assert!((exp_divided_difference(&[c(0.0, 0.0), eps]) - want).norm() < 1e-16);
    }

    #[test]
    fn chained_cluster_matches_iterated_route() {
        // nodes linked pairwise below the cluster radius but spread over ~1.4
        let rates = [c(0.35, 0.1), c(0.3, -0.2), c(0.4, 0.0), c(0.3, 0.2)];
        let f = simplex_integrate(&rates.map(ExpSum::exp));
        let t = 1.0;
        let got = simplex_exp(&rates, c(0.0, 0.0), t);
        assert!((got - f.eval(t)).norm() < 1e-13 * f.eval(t).norm());
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let rates = [c(0.1, 1.0), c(0.05, -2.0), c(-0.1, 1.0), c(0.0, 0.5)];
        let shift = c(-0.04, 0.0);
        for k in 0..=4 {
            let r = &rates[..k];
            let t = 2.3;
            let h = 1e-4;
            let [f, d1, d2] = simplex_exp_derivs(r, shift, t);
            assert!((f - simplex_exp(r, shift, t)).norm() < 1e-15);
            let fp = simplex_exp(r, shift, t + h);
            let fm = simplex_exp(r, shift, t - h);
            let fd1 = (fp - fm) / (2.0 * h);
            let fd2 = (fp - 2.0 * f + fm) / (h * h);
            assert!((d1 - fd1).norm() < 1e-7 * (1.0 + d1.norm()), "k={k}");
            assert!((d2 - fd2).norm() < 1e-5 * (1.0 + d2.norm()), "k={k}");
        }
    }
}
