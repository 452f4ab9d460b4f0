use crate::error::{BlockadeError, Result};
use crate::model::{DriveSpec, SystemParams};
use crate::C64;

use super::expsum::ExpSum;
use super::kernels::{SignTable, PAIRS};
use super::simplex::{simplex_exp_derivs, simplex_integrate};

pub const MAX_ORDER: usize = 5;
/// Raw probabilities below this are reported in a warning before clamping.
pub const NEGATIVE_WARN: f64 = -1e-12;
/// `p₁` below which `g̃²` is undefined.
pub const P1_FLOOR: f64 = 1e-16;
/// Rounding floor of an occupation relative to the summed magnitude of its
/// terms (about 450 ulp).
pub const NOISE_RELATIVE: f64 = 1e-13;

/// How the simplex integrals are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Route {
    /// Divided differences of `e^{xt}` (fast, robust to coincident rates).
    #[default]
    DividedDifference,
    /// Variable-by-variable closed-form integration of exponential sums.
    Iterated,
}

/// Value and first two time derivatives.
pub type Jet = [f64; 3];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Occupations {
    /// Raw `p₁` jet (before clamping).
    pub p1: Jet,
    pub p2: Jet,
    /// Values below these are indistinguishable from cancellation error.
    pub p1_noise: f64,
    pub p2_noise: f64,
}

impl Occupations {
    pub fn p1(&self) -> f64 {
        clamp_probability(self.p1[0], "p1")
    }

    pub fn p2(&self) -> f64 {
        clamp_probability(self.p2[0], "p2")
    }

    pub fn g2_tilde(&self) -> Result<f64> {
        Ok(self.g2_tilde_derivs()?.0)
    }

    /// `g̃² = 2p₂/(p₁+2p₂)²` and its first two time derivatives. `p₂` is
    /// floored at its rounding noise so that drives which cancel
    /// destructively cannot report a spuriously small `g̃²`.
    pub fn g2_tilde_derivs(&self) -> Result<(f64, f64, f64)> {
        let p1 = self.p1();
        if p1 < P1_FLOOR {
            return Err(BlockadeError::Undefined(
                "single-photon occupation below 1e-16",
            ));
        }
        if p1 < self.p1_noise {
            return Err(BlockadeError::Undefined(
                "single-photon occupation lost to cancellation",
            ));
        }
        let p2 = self.p2().max(self.p2_noise);
        let [_, p1d, p1dd] = self.p1;
        let [_, p2d, p2dd] = self.p2;
        let s = p1 + 2.0 * p2;
        let sd = p1d + 2.0 * p2d;
        let sdd = p1dd + 2.0 * p2dd;
        let (s2, s3, s4) = (s * s, s * s * s, s * s * s * s);
        let g = 2.0 * p2 / s2;
        let gd = 2.0 * p2d / s2 - 4.0 * p2 * sd / s3;
        let gdd =
            2.0 * p2dd / s2 - 8.0 * p2d * sd / s3 - 4.0 * p2 * sdd / s3 + 12.0 * p2 * sd * sd / s4;
        Ok((g, gd, gdd))
    }
}

fn clamp_probability(raw: f64, what: &str) -> f64 {
    if raw < NEGATIVE_WARN {
        log::warn!("{what} = {raw:.3e} is negative beyond roundoff; clamped to 0");
    }
    raw.max(0.0)
}

/// One simplex integrand `coeff · exp(Σ rates_j t_j)` before the drive is
/// attached; rates are `base_j + iω_m q_j`.
#[derive(Debug, Clone)]
struct Monomial {
    coeff: f64,
    q: [i32; 4],
}

#[derive(Debug, Clone)]
struct Component {
    /// `true` where the time slot carries `ζ*`.
    conj: [bool; 4],
    base: [C64; 4],
    monomials: Vec<Monomial>,
}

/// Leading-order perturbative photon occupations for a fixed system and
/// Taylor depth `K`. Mechanical damping is not part of the analytic model.
#[derive(Debug, Clone)]
pub struct PerturbativeModel {
    params: SystemParams,
    order: usize,
    route: Route,
    signs: SignTable,
    components: Vec<Component>,
}

impl PerturbativeModel {
    pub fn new(p: &SystemParams, order: usize) -> Result<Self> {
        Self::with_signs(p, order, SignTable::corrected())
    }

    pub fn with_signs(p: &SystemParams, order: usize, signs: SignTable) -> Result<Self> {
        p.validate()?;
        if !(1..=MAX_ORDER).contains(&order) {
            return Err(BlockadeError::InvalidParameter {
                field: "taylor_order".into(),
                value: order as f64,
                reason: "must lie in 1..=5",
            });
        }
        if p.gamma > 0.0 {
            log::debug!(
                "analytic occupations ignore mechanical damping (gamma = {})",
                p.gamma
            );
        }
        let mut model = Self {
            params: *p,
            order,
            route: Route::default(),
            signs,
            components: Vec::new(),
        };
        model.components = model.build_components();
        Ok(model)
    }

    pub fn with_route(mut self, route: Route) -> Self {
        self.route = route;
        self
    }

    pub fn params(&self) -> &SystemParams {
        &self.params
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Size of the first neglected Taylor term, `(g₀/ω_m)^{2(K+1)}`.
    pub fn truncation_error(&self) -> f64 {
        self.params.lambda().powi(2 * (self.order as i32 + 1))
    }

    /// Logs a warning when the neglected Taylor term exceeds `tolerance`.
    pub fn check_truncation(&self, tolerance: f64) -> bool {
        let err = self.truncation_error();
        if err > tolerance {
            log::warn!(
                "Taylor depth {} leaves a term of size {err:.2e} (> {tolerance:.1e}); raise the order",
                self.order
            );
            false
        } else {
            true
        }
    }

    fn build_components(&self) -> Vec<Component> {
        let p = &self.params;
        let lam2 = p.lambda() * p.lambda();
        let chi = p.kerr();
        let patterns = [
            [true, true, false, false],
            [true, false, true, false],
            [false, true, true, false],
        ];
        let mut out = Vec::with_capacity(3);
        for (i, conj) in patterns.into_iter().enumerate() {
            let mut base = [C64::new(p.kappa / 2.0, 0.0); 4];
            for (row, &(j, k)) in PAIRS.iter().enumerate() {
                let s = (self.signs.s1[row][i] * self.signs.s2[row][i]) as f64;
                let comp = C64::new(0.0, -s * chi);
                base[j - 1] += comp;
                base[k - 1] -= comp;
            }
            let mut monomials: Vec<Monomial> = Vec::new();
            for n in 0..=self.order {
                for alpha in multi_indices(6, n) {
                    let mut coeff = lam2.powi(n as i32);
                    let mut q = [0i32; 4];
                    for (row, &a) in alpha.iter().enumerate() {
                        if a == 0 {
                            continue;
                        }
                        coeff *= (self.signs.s1[row][i] as f64).powi(a as i32) / factorial(a);
                        let (j, k) = PAIRS[row];
                        let s2 = self.signs.s2[row][i] as i32 * a as i32;
                        q[j - 1] += s2;
                        q[k - 1] -= s2;
                    }
                    match monomials.iter_mut().find(|m| m.q == q) {
                        Some(m) => m.coeff += coeff,
                        None => monomials.push(Monomial { coeff, q }),
                    }
                }
            }
            monomials.retain(|m| m.coeff != 0.0);
            out.push(Component {
                conj,
                base,
                monomials,
            });
        }
        out
    }

    /// Raw (unclamped) `p₁` jet at time `t` (natural units).
    pub fn p1_jet(&self, d: &DriveSpec, t: f64) -> Jet {
        self.p1_with_noise(d, t).0
    }

    fn p1_with_noise(&self, d: &DriveSpec, t: f64) -> (Jet, f64) {
        let p = &self.params;
        let lam2 = p.lambda() * p.lambda();
        let chi = p.kerr();
        let shift = C64::new(-p.kappa, 0.0);
        let mut acc = Accumulator::new(self.route, t);
        for n in 0..=self.order {
            let w = lam2.powi(n as i32) / factorial(n);
            let nw = n as f64 * p.omega_m;
            for tj in &d.tones {
                for tl in &d.tones {
                    let c = tj.coefficient() * tl.coefficient().conj() * w;
                    let a1 = C64::new(p.kappa / 2.0, nw - chi - tj.detuning);
                    let a2 = C64::new(p.kappa / 2.0, -nw + chi + tl.detuning);
                    acc.add(c, &[a1, a2], shift);
                }
            }
        }
        acc.finish(2.0 * (-lam2).exp())
    }

    /// Raw (unclamped) `p₂` jet at time `t` (natural units).
    pub fn p2_jet(&self, d: &DriveSpec, t: f64) -> Jet {
        self.p2_with_noise(d, t).0
    }

    fn p2_with_noise(&self, d: &DriveSpec, t: f64) -> (Jet, f64) {
        let p = &self.params;
        let lam2 = p.lambda() * p.lambda();
        let shift = C64::new(-2.0 * p.kappa, 0.0);
        let tones: Vec<(C64, f64)> = d
            .tones
            .iter()
            .map(|t| (t.coefficient(), t.detuning))
            .collect();
        let nt = tones.len();
        let mut acc = Accumulator::new(self.route, t);
        if nt == 0 {
            return acc.finish(0.0);
        }
        for comp in &self.components {
            for tuple in 0..nt.pow(4) {
                let mut c = C64::new(1.0, 0.0);
                let mut drive_rate = [C64::new(0.0, 0.0); 4];
                let mut idx = tuple;
                for slot in 0..4 {
                    let (coef, det) = tones[idx % nt];
                    idx /= nt;
                    if comp.conj[slot] {
                        c *= coef.conj();
                        drive_rate[slot] = C64::new(0.0, det);
                    } else {
                        c *= coef;
                        drive_rate[slot] = C64::new(0.0, -det);
                    }
                }
                for m in &comp.monomials {
                    let rates: [C64; 4] = std::array::from_fn(|j| {
                        comp.base[j] + drive_rate[j] + C64::new(0.0, m.q[j] as f64 * p.omega_m)
                    });
                    acc.add(c * m.coeff, &rates, shift);
                }
            }
        }
        acc.finish(4.0 * (-2.0 * lam2).exp())
    }

    pub fn occupations(&self, d: &DriveSpec, t: f64) -> Occupations {
        let (p1, p1_noise) = self.p1_with_noise(d, t);
        let (p2, p2_noise) = self.p2_with_noise(d, t);
        Occupations {
            p1,
            p2,
            p1_noise,
            p2_noise,
        }
    }

    pub fn p1(&self, d: &DriveSpec, t: f64) -> f64 {
        clamp_probability(self.p1_jet(d, t)[0], "p1")
    }

    pub fn p2(&self, d: &DriveSpec, t: f64) -> f64 {
        clamp_probability(self.p2_jet(d, t)[0], "p2")
    }

    pub fn g2_tilde(&self, d: &DriveSpec, t: f64) -> Result<f64> {
        self.occupations(d, t).g2_tilde()
    }

    pub fn g2_tilde_derivs(&self, d: &DriveSpec, t: f64) -> Result<(f64, f64, f64)> {
        self.occupations(d, t).g2_tilde_derivs()
    }
}

/// Sums simplex integrals along the chosen route and returns
/// `scale · Re(Σ)` with derivatives.
struct Accumulator {
    route: Route,
    t: f64,
    sum: [C64; 3],
    magnitude: f64,
    expsum: ExpSum,
}

impl Accumulator {
    fn new(route: Route, t: f64) -> Self {
        Self {
            route,
            t,
            sum: [C64::new(0.0, 0.0); 3],
            magnitude: 0.0,
            expsum: ExpSum::zero(),
        }
    }

    fn add(&mut self, coeff: C64, rates: &[C64], shift: C64) {
        match self.route {
            Route::DividedDifference => {
                let j = simplex_exp_derivs(rates, shift, self.t);
                self.magnitude += (coeff * j[0]).norm();
                for (s, v) in self.sum.iter_mut().zip(j) {
                    *s += coeff * v;
                }
            }
            Route::Iterated => {
                let factors: Vec<ExpSum> = rates.iter().map(|&r| ExpSum::exp(r)).collect();
                let f = simplex_integrate(&factors).shift_rate(shift).scale(coeff);
                self.magnitude += f.eval(self.t).norm();
                self.expsum = &self.expsum + &f;
            }
        }
    }

    fn finish(self, scale: f64) -> (Jet, f64) {
        let sum = match self.route {
            Route::DividedDifference => self.sum,
            Route::Iterated => {
                let f = self.expsum.real_part();
                let d1 = f.derivative();
                let d2 = d1.derivative();
                [f.eval(self.t), d1.eval(self.t), d2.eval(self.t)]
            }
        };
        (
            sum.map(|v| scale * v.re),
            scale * NOISE_RELATIVE * self.magnitude,
        )
    }
}

fn factorial(n: usize) -> f64 {
    (2..=n).map(|k| k as f64).product()
}

/// All `α ∈ ℕ^vars` with `|α| = degree`.
fn multi_indices(vars: usize, degree: usize) -> Vec<Vec<usize>> {
    if vars == 1 {
        return vec![vec![degree]];
    }
    let mut out = Vec::new();
    for first in 0..=degree {
        for mut rest in multi_indices(vars - 1, degree - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// `p₁(t)` at Taylor depth `order`; `t` in natural units.
pub fn p1_analytic(p: &SystemParams, d: &DriveSpec, t: f64, order: usize) -> Result<f64> {
    d.validate()?;
    Ok(PerturbativeModel::new(p, order)?.p1(d, t))
}

/// `p₂(t)` at Taylor depth `order`; `t` in natural units.
pub fn p2_analytic(p: &SystemParams, d: &DriveSpec, t: f64, order: usize) -> Result<f64> {
    d.validate()?;
    Ok(PerturbativeModel::new(p, order)?.p2(d, t))
}

pub fn g2_tilde(p: &SystemParams, d: &DriveSpec, t: f64, order: usize) -> Result<f64> {
    d.validate()?;
    PerturbativeModel::new(p, order)?.g2_tilde(d, t)
}

pub fn g2_tilde_derivs(
    p: &SystemParams,
    d: &DriveSpec,
    t: f64,
    order: usize,
) -> Result<(f64, f64, f64)> {
    d.validate()?;
    PerturbativeModel::new(p, order)?.g2_tilde_derivs(d, t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn multi_index_counts() {
        assert_eq!(multi_indices(6, 0).len(), 1);
        assert_eq!(multi_indices(6, 1).len(), 6);
        assert_eq!(multi_indices(6, 2).len(), 21);
        assert!(multi_indices(4, 3)
            .iter()
            .all(|a| a.iter().sum::<usize>() == 3));
    }

    #[test]
    fn order_is_validated() {
        let p = SystemParams::baseline();
        assert!(PerturbativeModel::new(&p, 0).is_err());
        assert!(PerturbativeModel::new(&p, 6).is_err());
        assert!(PerturbativeModel::new(&p, 5).is_ok());
    }

    #[test]
    fn truncation_warning_threshold() {
        let m = PerturbativeModel::new(&SystemParams::new(0.3, 0.0).unwrap(), 1).unwrap();
        assert!((m.truncation_error() - 0.3f64.powi(4)).abs() < 1e-15);
        assert!(m.check_truncation(1e-2));
        assert!(!m.check_truncation(1e-3));
    }

    #[test]
    fn free_cavity_resonant_drive() {
        let p = SystemParams::new(0.0, 0.0).unwrap();
        let eps = 1e-3;
        let d = DriveSpec::monochromatic(eps, 0.0).unwrap();
        let m = PerturbativeModel::new(&p, 1).unwrap();
        for t in [0.5, 3.0, 10.0] {
            let occ = m.occupations(&d, t);
            let x = eps * t;
            assert!((occ.p1[0] - x * x).abs() < 1e-14 * x * x);
            assert!((occ.p2[0] - x.powi(4) / 2.0).abs() < 1e-12 * x.powi(4));
            assert!((occ.p1[1] - 2.0 * eps * eps * t).abs() < 1e-12 * eps * eps * t);
            assert!((occ.p1[2] - 2.0 * eps * eps).abs() < 1e-10 * eps * eps);
        }
    }

    #[test]
    fn occupations_clamp_and_g2_undefined() {
        let occ = Occupations {
            p1: [-1e-20, 0.0, 0.0],
            p2: [-1e-30, 0.0, 0.0],
            p1_noise: 0.0,
            p2_noise: 0.0,
        };
        assert_eq!(occ.p1(), 0.0);
        assert!(matches!(occ.g2_tilde(), Err(BlockadeError::Undefined(_))));
    }
}
