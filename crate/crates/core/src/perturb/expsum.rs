//! Exponential sums `f(t) = Σ c · t^p · e^{r t}` with exact calculus.

use std::ops::{Add, Mul, Neg, Sub};

use crate::C64;

/// Rates smaller than this are integrated through a truncated power series
/// instead of the closed form, which would cancel catastrophically.
pub const SMALL_RATE: f64 = 1e-7;
const SMALL_RATE_TERMS: u32 = 4;
const DROP_RELATIVE: f64 = 1e-18;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Term {
    pub coeff: C64,
    pub power: u32,
    pub rate: C64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ExpSum {
    terms: Vec<Term>,
}

impl ExpSum {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: C64) -> Self {
        Self::term(c, 0, C64::new(0.0, 0.0))
    }

    /// `e^{r t}`.
    pub fn exp(rate: C64) -> Self {
        Self::term(C64::new(1.0, 0.0), 0, rate)
    }

    pub fn term(coeff: C64, power: u32, rate: C64) -> Self {
        Self::from_terms(vec![Term { coeff, power, rate }])
    }

    pub fn from_terms(terms: Vec<Term>) -> Self {
        let mut s = Self { terms };
        s.normalize();
        s
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Merges equal `(power, rate)` pairs and drops negligible coefficients.
    fn normalize(&mut self) {
        self.terms.sort_by(|a, b| {
            (a.power, a.rate.re, a.rate.im)
                .partial_cmp(&(b.power, b.rate.re, b.rate.im))
                .expect("rates must not be NaN")
        });
        let mut merged: Vec<Term> = Vec::with_capacity(self.terms.len());
        for t in self.terms.drain(..) {
            match merged.last_mut() {
                Some(last) if last.power == t.power && last.rate == t.rate => last.coeff += t.coeff,
                _ => merged.push(t),
            }
        }
        let scale = merged.iter().map(|t| t.coeff.norm()).fold(0.0, f64::max);
        merged.retain(|t| t.coeff.norm() > DROP_RELATIVE * scale && t.coeff != C64::new(0.0, 0.0));
        self.terms = merged;
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::from_terms(
            self.terms
                .iter()
                .map(|t| Term {
                    coeff: t.coeff * s,
                    ..*t
                })
                .collect(),
        )
    }

    /// `f(t) · e^{r t}`.
    pub fn shift_rate(&self, r: C64) -> Self {
        Self::from_terms(
            self.terms
                .iter()
                .map(|t| Term {
                    rate: t.rate + r,
                    ..*t
                })
                .collect(),
        )
    }

    pub fn derivative(&self) -> Self {
        let mut out = Vec::with_capacity(2 * self.terms.len());
        for t in &self.terms {
            out.push(Term {
                coeff: t.coeff * t.rate,
                ..*t
            });
            if t.power > 0 {
                out.push(Term {
                    coeff: t.coeff * t.power as f64,
                    power: t.power - 1,
                    rate: t.rate,
                });
            }
        }
        Self::from_terms(out)
    }

    /// `F(t) = ∫₀ᵗ f(s) ds`.
    pub fn integrate(&self) -> Self {
        let mut out = Vec::new();
        for t in &self.terms {
            integrate_term(t, &mut out);
        }
        Self::from_terms(out)
    }

    /// `Re f(t)` for real `t`, written as an exponential sum.
    pub fn real_part(&self) -> Self {
        let half = C64::new(0.5, 0.0);
        Self::from_terms(
            self.terms
                .iter()
                .flat_map(|t| {
                    [
                        Term {
                            coeff: t.coeff * half,
                            ..*t
                        },
                        Term {
                            coeff: t.coeff.conj() * half,
                            power: t.power,
                            rate: t.rate.conj(),
                        },
                    ]
                })
                .collect(),
        )
    }

    /// Evaluates with compensated summation.
    pub fn eval(&self, t: f64) -> C64 {
        let mut re = Neumaier::default();
        let mut im = Neumaier::default();
        for term in &self.terms {
            let v = term.coeff * t.powi(term.power as i32) * (term.rate * t).exp();
            re.add(v.re);
            im.add(v.im);
        }
        C64::new(re.sum(), im.sum())
    }
}

/// Appends `∫₀ᵗ c s^p e^{r s} ds` to `out`.
fn integrate_term(t: &Term, out: &mut Vec<Term>) {
    let (c, p, r) = (t.coeff, t.power, t.rate);
    let zero = C64::new(0.0, 0.0);
    if r == zero {
        out.push(Term {
            coeff: c / (p + 1) as f64,
            power: p + 1,
            rate: zero,
        });
        return;
    }
    if r.norm() < SMALL_RATE {
        // e^{rs} = Σ_m (rs)^m/m!, integrated term by term
        let mut rm = C64::new(1.0, 0.0);
        let mut fact = 1.0;
        for m in 0..SMALL_RATE_TERMS {
            if m > 0 {
                rm *= r;
                fact *= m as f64;
            }
            out.push(Term {
                coeff: c * rm / fact / (p + m + 1) as f64,
                power: p + m + 1,
                rate: zero,
            });
        }
        return;
    }
    // ∫₀ᵗ s^p e^{rs} ds = e^{rt} Σ_j (−1)^j p!/(p−j)! t^{p−j}/r^{j+1} − (−1)^p p!/r^{p+1}
    let mut falling = 1.0;
    let mut rpow = r;
    for j in 0..=p {
        if j > 0 {
            falling *= (p - j + 1) as f64;
            rpow *= r;
        }
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        out.push(Term {
            coeff: c * sign * falling / rpow,
            power: p - j,
            rate: r,
        });
    }
    let sign = if p % 2 == 0 { 1.0 } else { -1.0 };
    out.push(Term {
        coeff: -c * sign * falling / rpow,
        power: 0,
        rate: zero,
    });
}

#[derive(Debug, Default, Clone, Copy)]
struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn sum(&self) -> f64 {
        self.sum + self.comp
    }
}

impl Add for &ExpSum {
    type Output = ExpSum;
    fn add(self, rhs: &ExpSum) -> ExpSum {
        ExpSum::from_terms(self.terms.iter().chain(&rhs.terms).copied().collect())
    }
}

impl Sub for &ExpSum {
    type Output = ExpSum;
    fn sub(self, rhs: &ExpSum) -> ExpSum {
        self + &(-rhs)
    }
}

impl Neg for &ExpSum {
    type Output = ExpSum;
    fn neg(self) -> ExpSum {
        self.scale(C64::new(-1.0, 0.0))
    }
}

impl Mul for &ExpSum {
    type Output = ExpSum;
    fn mul(self, rhs: &ExpSum) -> ExpSum {
        let mut out = Vec::with_capacity(self.terms.len() * rhs.terms.len());
        for a in &self.terms {
            for b in &rhs.terms {
                out.push(Term {
                    coeff: a.coeff * b.coeff,
                    power: a.power + b.power,
                    rate: a.rate + b.rate,
                });
            }
        }
        ExpSum::from_terms(out)
    }
}
