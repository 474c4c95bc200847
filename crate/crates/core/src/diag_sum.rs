//! Random diagonal sums `S_n = Σ_j X_{j,π(j)}` of a matrix with independent
//! entries, where `π` is a uniform permutation independent of the matrix.
//!
//! Two exact routes to the law of `S_n` are provided: direct averaging over
//! all `n!` diagonals ([`exact_distribution`]) and the pairing decomposition
//! that groups rows two at a time into pair mixtures
//! ([`pairing_decomposition`]). They share no code beyond convolution and
//! mixing, so each serves as an oracle for the other.
//!
//! Indices in this module are 0-based. Error messages report 1-based indices.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dist::{
    AtomicDistribution, Distribution, Kind, LatticeDistribution, Measure, Mixer, ATOM_MERGE_TOL,
};
use crate::error::{Error, PairIndex, Result};

/// Default upper limit on `n` for `n!`-term enumerations.
pub const DEFAULT_ENUM_CAP: usize = 9;

/// Environment variable overriding [`DEFAULT_ENUM_CAP`].
pub const ENUM_CAP_ENV: &str = "DIAGSUM_ENUM_CAP";

/// Enumeration cap, honouring `DIAGSUM_ENUM_CAP` when it parses.
pub fn enum_cap() -> usize {
    std::env::var(ENUM_CAP_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_ENUM_CAP)
}

/// An `n × n` grid of independent entry distributions `Q_{j,r}`, all of one
/// kind.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixModel {
    n: usize,
    kind: Kind,
    entries: Vec<Distribution>,
}

impl MatrixModel {
    pub fn new(rows: Vec<Vec<Distribution>>) -> Result<Self> {
        let n = rows.len();
        if n < 2 {
            return Err(Error::InvalidModel(format!("n = {n}, need n >= 2")));
        }
        let kind = rows[0]
            .first()
            .map(Distribution::kind)
            .ok_or_else(|| Error::InvalidModel("row 1 is empty".into()))?;
        let mut entries = Vec::with_capacity(n * n);
        for (j, row) in rows.into_iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidModel(format!(
                    "row {} has {} entries, expected {n}",
                    j + 1,
                    row.len()
                )));
            }
            for (r, d) in row.into_iter().enumerate() {
                if d.kind() != kind {
                    return Err(Error::InvalidModel(format!(
                        "entry ({},{}) is {}-valued but the model is {kind}-valued",
                        j + 1,
                        r + 1,
                        d.kind()
                    )));
                }
                entries.push(d);
            }
        }
        Ok(Self { n, kind, entries })
    }

    /// Integer-valued model with `Q_{j,r} = Be(p_{j,r})`.
    pub fn bernoulli(p: &[Vec<f64>]) -> Result<Self> {
        let rows = p
            .iter()
            .map(|row| {
                row.iter()
                    .map(|&q| LatticeDistribution::bernoulli(q).map(Distribution::from))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(rows)
    }

    /// Integer-valued model of point masses.
    pub fn integer_constants(c: &[Vec<i64>]) -> Result<Self> {
        Self::new(
            c.iter()
                .map(|row| {
                    row.iter()
                        .map(|&x| LatticeDistribution::point(x).into())
                        .collect()
                })
                .collect(),
        )
    }

    /// Real-valued model of point masses.
    pub fn real_constants(c: &[Vec<f64>]) -> Result<Self> {
        Self::new(
            c.iter()
                .map(|row| {
                    row.iter()
                        .map(|&x| AtomicDistribution::point(x).into())
                        .collect()
                })
                .collect(),
        )
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `⌊n/2⌋`.
    pub fn m(&self) -> usize {
        self.n / 2
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn entry(&self, j: usize, r: usize) -> &Distribution {
        &self.entries[j * self.n + r]
    }

    /// Rows of the grid.
    pub fn rows(&self) -> impl Iterator<Item = &[Distribution]> {
        self.entries.chunks(self.n)
    }

    /// Success probabilities when every entry is supported on `{0, 1}`.
    pub fn bernoulli_probabilities(&self) -> Option<Vec<Vec<f64>>> {
        self.rows()
            .map(|row| {
                row.iter()
                    .map(|d| {
                        let d = d.as_lattice()?;
                        if d.offset() < 0 || d.max_support() > 1 {
                            return None;
                        }
                        Some(d.mass_at(1))
                    })
                    .collect()
            })
            .collect()
    }

    /// Model whose row `j` is row `perm(j)` of `self`.
    pub fn permute_rows(&self, perm: &Permutation) -> Result<Self> {
        self.check_perm(perm)?;
        let rows = (0..self.n)
            .map(|j| self.rows().nth(perm.image(j)).unwrap().to_vec())
            .collect();
        Self::new(rows)
    }

    /// Model whose column `r` is column `perm(r)` of `self`.
    pub fn permute_columns(&self, perm: &Permutation) -> Result<Self> {
        self.check_perm(perm)?;
        let rows = self
            .rows()
            .map(|row| (0..self.n).map(|r| row[perm.image(r)].clone()).collect())
            .collect();
        Self::new(rows)
    }

    fn check_perm(&self, perm: &Permutation) -> Result<()> {
        if perm.len() != self.n {
            return Err(Error::InvalidPermutation(format!(
                "length {} does not match n = {}",
                perm.len(),
                self.n
            )));
        }
        Ok(())
    }

    fn lattice_grid(&self) -> Vec<LatticeDistribution> {
        self.entries
            .iter()
            .map(|d| d.as_lattice().cloned().expect("homogeneous grid"))
            .collect()
    }

    fn atomic_grid(&self) -> Vec<AtomicDistribution> {
        self.entries
            .iter()
            .map(|d| d.as_atomic().cloned().expect("homogeneous grid"))
            .collect()
    }
}

/// Bijection on `{0, …, n−1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Self {
            images: (0..n).collect(),
        }
    }

    /// From 0-based images.
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            if i >= n || std::mem::replace(&mut seen[i], true) {
                return Err(Error::InvalidPermutation(format!(
                    "{:?} is not a bijection on 0..{n}",
                    images
                )));
            }
        }
        Ok(Self { images })
    }

    /// From 1-based images, as written in model files and on the command line.
    pub fn from_one_based(images: &[usize]) -> Result<Self> {
        let zero: Option<Vec<usize>> = images.iter().map(|&i| i.checked_sub(1)).collect();
        match zero {
            Some(v) => Self::new(v),
            None => Err(Error::InvalidPermutation(format!(
                "{images:?} contains 0; images are 1-based"
            ))),
        }
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn image(&self, i: usize) -> usize {
        self.images[i]
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn to_one_based(&self) -> Vec<usize> {
        self.images.iter().map(|i| i + 1).collect()
    }

    /// All `n!` permutations in lexicographic order.
    pub fn all(n: usize) -> Vec<Permutation> {
        let mut cur: Vec<usize> = (0..n).collect();
        let mut out = vec![Self {
            images: cur.clone(),
        }];
        while next_permutation(&mut cur) {
            out.push(Self {
                images: cur.clone(),
            });
        }
        out
    }

    /// Uniform permutation by Fisher–Yates.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut images: Vec<usize> = (0..n).collect();
        fisher_yates(&mut images, rng);
        Self { images }
    }
}

fn next_permutation(v: &mut [usize]) -> bool {
    let n = v.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

fn fisher_yates<T, R: Rng + ?Sized>(v: &mut [T], rng: &mut R) {
    for i in (1..v.len()).rev() {
        let j = rng.gen_range(0..=i);
        v.swap(i, j);
    }
}

fn mix_half<D: Measure>(a: &D, b: &D) -> D {
    let mut mixer = D::mixer();
    mixer.add(0.5, a);
    mixer.add(0.5, b);
    mixer.finish()
}

fn check_pair(model: &MatrixModel, j: usize, k: usize, r: usize, s: usize) -> Result<()> {
    let n = model.n;
    if j == k || r == s || j >= n || k >= n || r >= n || s >= n {
        return Err(Error::Precondition(format!(
            "pair indices {} must satisfy j != k, r != s within 1..={n}",
            PairIndex {
                j: j + 1,
                k: k + 1,
                r: r + 1,
                s: s + 1
            }
        )));
    }
    Ok(())
}

/// `R(j,k,r,s) = ½(Q_{j,r} * Q_{k,s} + Q_{k,r} * Q_{j,s})`.
pub fn pair_mixture(
    model: &MatrixModel,
    j: usize,
    k: usize,
    r: usize,
    s: usize,
) -> Result<Distribution> {
    check_pair(model, j, k, r, s)?;
    Ok(pair_mixture_unchecked(model, j, k, r, s))
}

pub(crate) fn pair_mixture_unchecked(
    model: &MatrixModel,
    j: usize,
    k: usize,
    r: usize,
    s: usize,
) -> Distribution {
    let q = |a: usize, b: usize| model.entry(a, b);
    match (q(j, r), q(k, s), q(k, r), q(j, s)) {
        (
            Distribution::Lattice(jr),
            Distribution::Lattice(ks),
            Distribution::Lattice(kr),
            Distribution::Lattice(js),
        ) => mix_half(&jr.convolve(ks), &kr.convolve(js)).into(),
        (
            Distribution::Atomic(jr),
            Distribution::Atomic(ks),
            Distribution::Atomic(kr),
            Distribution::Atomic(js),
        ) => mix_half(&jr.convolve(ks), &kr.convolve(js)).into(),
        _ => unreachable!("model grids are homogeneous"),
    }
}

fn check_cap(n: usize, cap: usize) -> Result<()> {
    if n > cap {
        return Err(Error::CapacityExceeded { n, cap });
    }
    Ok(())
}

/// Law of `S_n`, averaging the `n`-fold convolutions along all `n!`
/// diagonals. Uses [`enum_cap`] as the size limit.
pub fn exact_distribution(model: &MatrixModel) -> Result<Distribution> {
    exact_distribution_capped(model, enum_cap())
}

pub fn exact_distribution_capped(model: &MatrixModel, cap: usize) -> Result<Distribution> {
    check_cap(model.n, cap)?;
    Ok(match model.kind {
        Kind::Integer => diagonal_average(&model.lattice_grid(), model.n).into(),
        Kind::Real => diagonal_average(&model.atomic_grid(), model.n).into(),
    })
}

/// Depth-first walk over permutations, sharing prefix convolutions.
fn diagonal_average<D: Measure>(grid: &[D], n: usize) -> D {
    fn walk<D: Measure>(
        grid: &[D],
        n: usize,
        row: usize,
        prefix: &D,
        used: &mut [bool],
        mixer: &mut D::Mixer,
    ) {
        if row == n {
            mixer.add(1.0, prefix);
            return;
        }
        for col in 0..n {
            if used[col] {
                continue;
            }
            used[col] = true;
            let next = prefix.conv(&grid[row * n + col]);
            walk(grid, n, row + 1, &next, used, mixer);
            used[col] = false;
        }
    }

    let mut mixer = D::mixer();
    let mut used = vec![false; n];
    walk(grid, n, 0, &D::unit(), &mut used, &mut mixer);
    mixer.finish()
}

/// Law of `S_n` through pair mixtures: rows `φ(2ℓ−1), φ(2ℓ)` are merged
/// into `R(φ(2ℓ−1), φ(2ℓ), r(2ℓ−1), r(2ℓ))` and, for odd `n`, the last row
/// `φ(n)` contributes one plain factor.
pub fn pairing_decomposition(model: &MatrixModel, phi: &Permutation) -> Result<Distribution> {
    pairing_decomposition_capped(model, phi, enum_cap())
}

pub fn pairing_decomposition_capped(
    model: &MatrixModel,
    phi: &Permutation,
    cap: usize,
) -> Result<Distribution> {
    check_cap(model.n, cap)?;
    model.check_perm(phi)?;
    Ok(match model.kind {
        Kind::Integer => paired_average(&model.lattice_grid(), model.n, phi.images()).into(),
        Kind::Real => paired_average(&model.atomic_grid(), model.n, phi.images()).into(),
    })
}

fn paired_average<D: Measure>(grid: &[D], n: usize, phi: &[usize]) -> D {
    let m = n / 2;
    let q = |j: usize, r: usize| &grid[j * n + r];

    // pairs[ℓ][r * n + s] = R(φ(2ℓ), φ(2ℓ+1), r, s) in 0-based positions
    let pairs: Vec<Vec<Option<D>>> = (0..m)
        .map(|l| {
            let (j, k) = (phi[2 * l], phi[2 * l + 1]);
            (0..n * n)
                .map(|idx| {
                    let (r, s) = (idx / n, idx % n);
                    (r != s).then(|| mix_half(&q(j, r).conv(q(k, s)), &q(k, r).conv(q(j, s))))
                })
                .collect()
        })
        .collect();

    struct Ctx<'a, D: Measure> {
        grid: &'a [D],
        pairs: &'a [Vec<Option<D>>],
        n: usize,
        m: usize,
        last_row: usize,
    }

    fn walk<D: Measure>(
        ctx: &Ctx<'_, D>,
        level: usize,
        prefix: &D,
        used: &mut [bool],
        mixer: &mut D::Mixer,
    ) {
        let n = ctx.n;
        if level == ctx.m {
            if n % 2 == 1 {
                let col = used.iter().position(|&u| !u).expect("one free column");
                mixer.add(1.0, &prefix.conv(&ctx.grid[ctx.last_row * n + col]));
            } else {
                mixer.add(1.0, prefix);
            }
            return;
        }
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
                let factor = ctx.pairs[level][r * n + s].as_ref().expect("r != s");
                walk(ctx, level + 1, &prefix.conv(factor), used, mixer);
                used[s] = false;
            }
            used[r] = false;
        }
    }

    let ctx = Ctx {
        grid,
        pairs: &pairs,
        n,
        m,
        last_row: phi[n - 1],
    };
    let mut mixer = D::mixer();
    let mut used = vec![false; n];
    walk(&ctx, 0, &D::unit(), &mut used, &mut mixer);
    mixer.finish()
}

/// Monte-Carlo estimate of the law of `S_n`.
///
/// Each replicate draws `π` by Fisher–Yates and one value from every
/// `Q_{j,π(j)}` by inverse CDF, all from a `ChaCha8Rng` seeded with
/// `seed_from_u64(seed)`, so results are reproducible across platforms.
pub fn sample(model: &MatrixModel, seed: u64, count: usize) -> Result<AtomicDistribution> {
    if count == 0 {
        return Err(Error::Precondition("sample count must be at least 1".into()));
    }
    let n = model.n;
    let tables: Vec<Vec<(f64, f64)>> = model
        .entries
        .iter()
        .map(|d| {
            let mut cum = 0.0;
            d.points()
                .into_iter()
                .map(|(x, m)| {
                    cum += m;
                    (x, cum)
                })
                .collect()
        })
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut perm: Vec<usize> = (0..n).collect();
    let mut values = Vec::with_capacity(count);
    for _ in 0..count {
        fisher_yates(&mut perm, &mut rng);
        let mut total = 0.0;
        for (j, &col) in perm.iter().enumerate() {
            let table = &tables[j * n + col];
            let u: f64 = rng.gen();
            let hit = table
                .iter()
                .find(|&&(_, c)| u < c)
                .unwrap_or(&table[table.len() - 1]);
            total += hit.0;
        }
        values.push(total);
    }

    values.sort_by(f64::total_cmp);
    let mut atoms: Vec<(f64, f64)> = Vec::new();
    let mut anchor = f64::NEG_INFINITY;
    let mut counts: Vec<usize> = Vec::new();
    for x in values {
        if x - anchor <= ATOM_MERGE_TOL {
            *counts.last_mut().unwrap() += 1;
        } else {
            anchor = x;
            atoms.push((x, 0.0));
            counts.push(1);
        }
    }
    for (a, c) in atoms.iter_mut().zip(counts) {
        a.1 = c as f64 / count as f64;
    }
    Ok(AtomicDistribution::from_raw(atoms))
}
