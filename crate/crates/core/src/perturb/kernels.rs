use crate::model::SystemParams;
use crate::C64;

/// Ordered pairs `(j, k)`, `1 ≤ j < k ≤ 4`, in the row order of the sign table.
pub const PAIRS: [(usize, usize); 6] = [(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)];

/// Signs `s^{(l,i)}_{jk}` of the two-photon components. `s1` multiplies the
/// pair exponential, `s2` sets the direction of its phonon phase; indexed as
/// `[pair][i]` with `i` the component (0-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SignTable {
    pub s1: [[i8; 3]; 6],
    pub s2: [[i8; 3]; 6],
}

impl SignTable {
    /// Signs as derived from the displacement-operator algebra; these agree
    /// with the exact simulator.
    pub const fn corrected() -> Self {
        Self {
            s1: Self::S1,
            s2: [
                [1, -1, 1],
                [-1, 1, 1],
                [-1, -1, -1],
                [-1, 1, 1],
                [-1, -1, -1],
                [-1, -1, -1],
            ],
        }
    }

    /// The table exactly as printed in the source appendix. Its `s2` entries for
    /// pairs (1,4) and (2,3) in the second and third components are exchanged
    /// relative to [`SignTable::corrected`], which overestimates `p₂` by orders
    /// of magnitude; kept for comparison only.
    pub const fn as_published() -> Self {
        Self {
            s1: Self::S1,
            s2: [
                [1, -1, 1],
                [-1, 1, 1],
                [-1, 1, 1],
                [-1, -1, -1],
                [-1, -1, -1],
                [-1, -1, -1],
            ],
        }
    }

    const S1: [[i8; 3]; 6] = [
        [-1, 1, 1],
        [1, -1, 1],
        [1, 1, -1],
        [1, 1, -1],
        [1, -1, 1],
        [-1, 1, 1],
    ];

    /// `Σ_{j<k} s^{(1,i)}_{jk}` for each component.
    pub fn s1_column_sums(&self) -> [i32; 3] {
        let mut out = [0; 3];
        for row in &self.s1 {
            for (o, s) in out.iter_mut().zip(row) {
                *o += *s as i32;
            }
        }
        out
    }
}

impl Default for SignTable {
    fn default() -> Self {
        Self::corrected()
    }
}

/// Free-evolution kernels of the displaced frame.
#[derive(Debug, Clone, Copy)]
pub struct Kernels {
    pub lambda: f64,
    pub omega_m: f64,
}

impl Kernels {
    pub fn new(p: &SystemParams) -> Self {
        Self {
            lambda: p.lambda(),
            omega_m: p.omega_m,
        }
    }

    /// `f₁(t) = λ(e^{iω_m t} − 1)`; complex-valued.
    pub fn f1(&self, t: f64) -> C64 {
        self.lambda * (C64::new(0.0, self.omega_m * t).exp() - 1.0)
    }

    /// `f₂(t) = λ²(ω_m t − sin ω_m t)`.
    pub fn f2(&self, t: f64) -> f64 {
        let x = self.omega_m * t;
        self.lambda * self.lambda * (x - x.sin())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn s1_columns_sum_to_two() {
        assert_eq!(SignTable::corrected().s1_column_sums(), [2, 2, 2]);
        assert_eq!(SignTable::as_published().s1_column_sums(), [2, 2, 2]);
    }

    #[test]
    fn published_table_differs_in_two_rows() {
        let (a, b) = (SignTable::corrected(), SignTable::as_published());
        let differing: Vec<(usize, usize)> = (0..6)
            .flat_map(|p| (0..3).map(move |i| (p, i)))
            .filter(|&(p, i)| a.s2[p][i] != b.s2[p][i])
            .map(|(p, i)| (PAIRS[p].0 * 10 + PAIRS[p].1, i))
            .collect();
        assert_eq!(differing, vec![(14, 1), (14, 2), (23, 1), (23, 2)]);
    }

    #[test]
    fn kernel_properties() {
        let k = Kernels::new(&SystemParams::baseline());
        assert_eq!(k.f1(0.0), C64::new(0.0, 0.0));
        assert_eq!(k.f2(0.0), 0.0);
        let mut last = 0.0;
        for n in 1..500 {
            let t = n as f64 * 0.05;
            assert!(k.f1(t).norm() <= 2.0 * k.lambda + 1e-15);
            let f2 = k.f2(t);
            assert!(f2 >= last);
            last = f2;
        }
    }
}
