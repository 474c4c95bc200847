//! Generalized normalized hafnians of `k × n × n` complex tensors, the
//! classical hafnian, the slice-wise upper bound on `|gnhaf|`, and a
//! brute-force evaluator for the ordered weak partition inequality.
//!
//! Diagonal entries `z_{ℓ,r,r}` are stored but never read: every sum ranges
//! over distinct index pairs.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Upper limit on the number of product terms in exhaustive sums.
pub const TERM_CAP: u128 = 10_000_000;

/// Largest ground set accepted by [`partition_sum_oracle`].
pub const PARTITION_MAX_N: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub struct HafnianTensor {
    k: usize,
    n: usize,
    entries: Vec<Complex64>,
}

impl HafnianTensor {
    /// `entries` in slice-major order: index `(ℓ·n + r)·n + s`.
    pub fn new(k: usize, n: usize, entries: Vec<Complex64>) -> Result<Self> {
        if n < 2 || k == 0 || k > n / 2 {
            return Err(Error::InvalidTensor(format!(
                "need n >= 2 and 1 <= k <= n/2, got k = {k}, n = {n}"
            )));
        }
        if entries.len() != k * n * n {
            return Err(Error::InvalidTensor(format!(
                "expected {} entries, got {}",
                k * n * n,
                entries.len()
            )));
        }
        if let Some(z) = entries.iter().find(|z| !z.is_finite()) {
            return Err(Error::InvalidTensor(format!("entry {z} is not finite")));
        }
        Ok(Self { k, n, entries })
    }

    pub fn from_fn(
        k: usize,
        n: usize,
        mut f: impl FnMut(usize, usize, usize) -> Complex64,
    ) -> Result<Self> {
        let mut entries = Vec::with_capacity(k * n * n);
        for l in 0..k {
            for r in 0..n {
                for s in 0..n {
                    entries.push(f(l, r, s));
                }
            }
        }
        Self::new(k, n, entries)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, l: usize, r: usize, s: usize) -> Complex64 {
        self.entries[(l * self.n + r) * self.n + s]
    }

    /// Replaces each `z_{ℓ,r,s}` by `½(z_{ℓ,r,s} + z_{ℓ,s,r})`.
    pub fn symmetrized(&self) -> Self {
        let (k, n) = (self.k, self.n);
        Self::from_fn(k, n, |l, r, s| 0.5 * (self.get(l, r, s) + self.get(l, s, r)))
            .expect("same shape")
    }

    /// Multiplies slice `l` by `factor`.
    pub fn scale_slice(&self, l: usize, factor: Complex64) -> Self {
        let mut out = self.clone();
        let n2 = self.n * self.n;
        for z in &mut out.entries[l * n2..(l + 1) * n2] {
            *z *= factor;
        }
        out
    }
}

fn falling_factorial(n: usize, len: usize) -> u128 {
    (0..len).map(|i| (n - i) as u128).product()
}

/// `gnhaf(Z) = ((n−2k)!/n!) Σ_{r injective} Π_ℓ z_{ℓ, r(2ℓ−1), r(2ℓ)}`.
pub fn gnhaf(z: &HafnianTensor) -> Result<Complex64> {
    let (k, n) = (z.k, z.n);
    let count = falling_factorial(n, 2 * k);
    if count > TERM_CAP {
        return Err(Error::EnumerationTooLarge {
            count,
            cap: TERM_CAP,
        });
    }

    fn walk(z: &HafnianTensor, level: usize, prefix: Complex64, used: &mut [bool]) -> Complex64 {
        if level == z.k {
            return prefix;
        }
        let n = z.n;
        let mut acc = Complex64::new(0.0, 0.0);
        for r in 0..n {
            if used[r] {
                continue;
            }
            used[r] = true;
            for s in 0..n {
                if used[s] {
                    continue;
                }
                used[s] = true;
                acc += walk(z, level + 1, prefix * z.get(level, r, s), used);
                used[s] = false;
            }
            used[r] = false;
        }
        acc
    }

    let mut used = vec![false; n];
    let total = walk(z, 0, Complex64::new(1.0, 0.0), &mut used);
    Ok(total / count as f64)
}

/// Hafnian of an even-order matrix: the sum over perfect matchings of
/// products of matched entries. A non-symmetric input is read through its
/// symmetric part `½(z_{r,s} + z_{s,r})`.
pub fn haf(matrix: &[Vec<Complex64>]) -> Result<Complex64> {
    let n = matrix.len();
    if n % 2 == 1 {
        return Err(Error::InvalidTensor(format!("hafnian needs even order, got {n}")));
    }
    if let Some(row) = matrix.iter().position(|row| row.len() != n) {
        return Err(Error::InvalidTensor(format!(
            "row {} has {} entries, expected {n}",
            row + 1,
            matrix[row].len()
        )));
    }
    let matchings: u128 = (1..n).step_by(2).map(|i| i as u128).product();
    if matchings > TERM_CAP {
        return Err(Error::EnumerationTooLarge {
            count: matchings,
            cap: TERM_CAP,
        });
    }
    let sym = |r: usize, s: usize| 0.5 * (matrix[r][s] + matrix[s][r]);

    fn expand(n: usize, free: &mut [bool], sym: &dyn Fn(usize, usize) -> Complex64) -> Complex64 {
        let Some(i) = free.iter().position(|&f| f) else {
            return Complex64::new(1.0, 0.0);
        };
        free[i] = false;
        let mut acc = Complex64::new(0.0, 0.0);
        for j in i + 1..n {
            if !free[j] {
                continue;
            }
            free[j] = false;
            acc += sym(i, j) * expand(n, free, sym);
            free[j] = true;
        }
        free[i] = true;
        acc
    }

    let mut free = vec![true; n];
    Ok(expand(n, &mut free, &sym))
}

/// The two slice-wise bounds on `|gnhaf(Z)|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GnhafBound {
    /// Product over slices of the RMS of the symmetrized off-diagonal entries.
    pub rhs_sym: f64,
    /// Same without symmetrization.
    pub rhs_plain: f64,
}

pub fn gnhaf_bound(z: &HafnianTensor) -> GnhafBound {
    let n = z.n;
    let pairs = (n * (n - 1)) as f64;
    let mut rhs_sym = 1.0;
    let mut rhs_plain = 1.0;
    for l in 0..z.k {
        let mut sym_sq = 0.0;
        let mut plain_sq = 0.0;
        for r in 0..n {
            for s in 0..n {
                if r == s {
                    continue;
                }
                let a = z.get(l, r, s);
                sym_sq += (0.5 * (a + z.get(l, s, r))).norm_sqr();
                plain_sq += a.norm_sqr();
            }
        }
        rhs_sym *= (sym_sq / pairs).sqrt();
        rhs_plain *= (plain_sq / pairs).sqrt();
    }
    GnhafBound { rhs_sym, rhs_plain }
}

/// Weak composition `w` of `n` together with set functions `g_ℓ` on the
/// `w_ℓ`-element subsets of `{1, …, n}`.
///
/// Subsets are bit masks: bit `i` stands for element `i + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct PartitionInstance {
    n: usize,
    w: Vec<usize>,
    g: Vec<Vec<Complex64>>,
}

impl PartitionInstance {
    /// `g[ℓ]` has length `2^n` and is indexed by subset mask; only masks with
    /// `w[ℓ]` bits are read.
    pub fn new(n: usize, w: Vec<usize>, g: Vec<Vec<Complex64>>) -> Result<Self> {
        if n == 0 || n > PARTITION_MAX_N {
            return Err(Error::Precondition(format!(
                "partition oracle supports 1 <= n <= {PARTITION_MAX_N}, got {n}"
            )));
        }
        if w.is_empty() || w.iter().sum::<usize>() != n {
            return Err(Error::Precondition(format!(
                "{w:?} is not a weak composition of {n}"
            )));
        }
        if g.len() != w.len() || g.iter().any(|gl| gl.len() != 1 << n) {
            return Err(Error::Precondition(format!(
                "need {} set functions with {} mask slots each",
                w.len(),
                1 << n
            )));
        }
        Ok(Self { n, w, g })
    }

    pub fn from_fn(
        n: usize,
        w: Vec<usize>,
        mut f: impl FnMut(usize, u32) -> Complex64,
    ) -> Result<Self> {
        let g = (0..w.len())
            .map(|l| {
                (0..1u32 << n)
                    .map(|mask| {
                        if mask.count_ones() as usize == w[l] {
                            f(l, mask)
                        } else {
                            Complex64::new(0.0, 0.0)
                        }
                    })
                    .collect()
            })
            .collect();
        Self::new(n, w, g)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn composition(&self) -> &[usize] {
        &self.w
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PartitionSides {
    pub lhs: f64,
    pub rhs: f64,
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

fn binomial(n: usize, k: usize) -> f64 {
    factorial(n) / (factorial(k) * factorial(n - k))
}

/// Both sides of the ordered weak partition inequality:
/// `lhs = |Σ_W Π_ℓ g_ℓ(W_ℓ)|` over all ordered weak partitions of type `w`,
/// `rhs = (n!/w!) Π_ℓ (mean over |S| = w_ℓ of |g_ℓ(S)|²)^{1/2}`.
pub fn partition_sum_oracle(inst: &PartitionInstance) -> Result<PartitionSides> {
    fn walk(inst: &PartitionInstance, level: usize, remaining: u32, prefix: Complex64) -> Complex64 {
        if level == inst.w.len() {
            return prefix;
        }
        let size = inst.w[level];
        let mut acc = Complex64::new(0.0, 0.0);
        // every submask of `remaining`, including the empty one
        let mut sub = remaining;
        loop {
            if sub.count_ones() as usize == size {
                let g = inst.g[level][sub as usize];
                acc += walk(inst, level + 1, remaining & !sub, prefix * g);
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & remaining;
        }
        acc
    }

    let n = inst.n;
    let full = (1u32 << n) - 1;
    let lhs = walk(inst, 0, full, Complex64::new(1.0, 0.0)).norm();

    let multinomial = factorial(n) / inst.w.iter().map(|&wl| factorial(wl)).product::<f64>();
    let mut rhs = multinomial;
    for (l, &wl) in inst.w.iter().enumerate() {
        let sum_sq: f64 = (0..=full)
            .filter(|m| m.count_ones() as usize == wl)
            .map(|m| inst.g[l][m as usize].norm_sqr())
            .sum();
        rhs *= (sum_sq / binomial(n, wl)).sqrt();
    }
    Ok(PartitionSides { lhs, rhs })
}
