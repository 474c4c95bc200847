//! Finitely supported distributions on the integers and on the reals.
//!
//! [`LatticeDistribution`] stores a dense mass array starting at an integer
//! offset; [`AtomicDistribution`] stores sorted `(location, mass)` atoms.
//! Both are canonical after construction: no zero masses at the ends of the
//! lattice array, no two atoms within [`ATOM_MERGE_TOL`] of each other, and
//! total mass equal to one within [`NORMALIZATION_TOL`].
//!
//! Every value is immutable; all operations return fresh distributions.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Allowed deviation of the total mass from one.
pub const NORMALIZATION_TOL: f64 = 1e-12;

/// Atoms whose locations differ by at most this much are coalesced.
///
/// Real-valued models should not rely on distinct atoms closer than this.
pub const ATOM_MERGE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Integer,
    Real,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Kind::Integer => f.write_str("integer"),
            Kind::Real => f.write_str("real"),
        }
    }
}

fn check_t(t: f64) -> Result<()> {
    if t.is_nan() || t < 0.0 {
        return Err(Error::Domain {
            name: "t",
            value: t,
            domain: "[0, inf)",
        });
    }
    Ok(())
}

fn check_mass(m: f64) -> Result<()> {
    if !m.is_finite() || m < 0.0 {
        return Err(Error::InvalidDistribution(format!(
            "mass {m} is negative or not finite"
        )));
    }
    Ok(())
}

fn check_total(total: f64) -> Result<()> {
    if (total - 1.0).abs() > NORMALIZATION_TOL {
        return Err(Error::InvalidDistribution(format!(
            "masses sum to {total}, expected 1"
        )));
    }
    Ok(())
}

/// Probability distribution on `offset, offset + 1, ..., offset + len - 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeDistribution {
    offset: i64,
    masses: Vec<f64>,
}

impl LatticeDistribution {
    /// Validates and trims a mass array starting at `offset`.
    pub fn new(offset: i64, masses: Vec<f64>) -> Result<Self> {
        let mut total = 0.0;
        for &m in &masses {
            check_mass(m)?;
            total += m;
        }
        check_total(total)?;
        Ok(Self::from_raw(offset, masses))
    }

    /// Trims zero masses at both ends. Callers guarantee nonnegativity.
    pub(crate) fn from_raw(offset: i64, mut masses: Vec<f64>) -> Self {
        let last = masses.iter().rposition(|&m| m > 0.0).map_or(0, |i| i + 1);
        masses.truncate(last);
        let first = masses.iter().position(|&m| m > 0.0).unwrap_or(0);
        masses.drain(..first);
        if masses.is_empty() {
            // only reachable through underflow; fall back to a point mass
            masses.push(1.0);
        }
        Self {
            offset: offset + first as i64,
            masses,
        }
    }

    pub fn point(k: i64) -> Self {
        Self {
            offset: k,
            masses: vec![1.0],
        }
    }

    /// `(1 - p) δ_0 + p δ_1`; `p ∈ {0, 1}` yields a point mass.
    pub fn bernoulli(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Domain {
                name: "p",
                value: p,
                domain: "[0, 1]",
            });
        }
        Ok(Self::from_raw(0, vec![1.0 - p, p]))
    }

    pub fn offset(&self) -> i64 {
        self.offset
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    /// Largest support point.
    pub fn max_support(&self) -> i64 {
        self.offset + self.masses.len() as i64 - 1
    }

    pub fn mass_at(&self, k: i64) -> f64 {
        if k < self.offset {
            return 0.0;
        }
        self.masses
            .get((k - self.offset) as usize)
            .copied()
            .unwrap_or(0.0)
    }

    pub fn is_point_mass(&self) -> bool {
        self.masses.len() == 1
    }

    pub fn mean(&self) -> f64 {
        self.iter().map(|(k, m)| k as f64 * m).sum()
    }

    pub fn variance(&self) -> f64 {
        let mu = self.mean();
        self.iter().map(|(k, m)| (k as f64 - mu).powi(2) * m).sum()
    }

    /// `(support point, mass)` pairs in increasing order.
    pub fn iter(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.masses
            .iter()
            .enumerate()
            .map(move |(i, &m)| (self.offset + i as i64, m))
    }

    pub fn convolve(&self, other: &Self) -> Self {
        let mut out = vec![0.0; self.masses.len() + other.masses.len() - 1];
        for (i, &a) in self.masses.iter().enumerate() {
            for (j, &b) in other.masses.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::from_raw(self.offset + other.offset, out)
    }

    /// Distribution of `Y + h`, i.e. `δ_h * self`.
    pub fn shift(&self, h: i64) -> Self {
        Self {
            offset: self.offset + h,
            masses: self.masses.clone(),
        }
    }

    /// Total variation distance `½ Σ_k |a({k}) − b({k})|`.
    pub fn tv_distance(&self, other: &Self) -> f64 {
        let lo = self.offset.min(other.offset);
        let hi = self.max_support().max(other.max_support());
        let l1: f64 = (lo..=hi)
            .map(|k| (self.mass_at(k) - other.mass_at(k)).abs())
            .sum();
        (0.5 * l1).min(1.0)
    }

    /// Total variation distance between the distribution and its unit shift.
    pub fn smoothness(&self) -> f64 {
        let len = self.masses.len();
        let mut l1 = 0.0;
        for i in 0..=len {
            let cur = if i < len { self.masses[i] } else { 0.0 };
            let prev = if i > 0 { self.masses[i - 1] } else { 0.0 };
            l1 += (cur - prev).abs();
        }
        (0.5 * l1).min(1.0)
    }

    /// Lévy concentration `sup_x P([x, x + t])`.
    ///
    /// A closed window of length `t` holds at most `⌊t⌋ + 1` consecutive
    /// integers, so this is a sliding-window maximum.
    pub fn concentration(&self, t: f64) -> Result<f64> {
        check_t(t)?;
        let width = (t + ATOM_MERGE_TOL).floor();
        let len = self.masses.len();
        if width >= (len - 1) as f64 {
            return Ok(self.masses.iter().sum::<f64>().min(1.0));
        }
        let width = width as usize + 1;
        let mut window: f64 = self.masses[..width].iter().sum();
        let mut best = window;
        for i in width..len {
            window += self.masses[i] - self.masses[i - width];
            best = best.max(window);
        }
        Ok(best.min(1.0))
    }

    /// Weighted mixture; weights are normalized by their sum.
    pub fn mixture(components: &[(f64, &Self)]) -> Result<Self> {
        let mut mixer = LatticeMixer::default();
        for &(w, d) in components {
            if !w.is_finite() || w < 0.0 {
                return Err(Error::InvalidDistribution(format!(
                    "mixture weight {w} is negative or not finite"
                )));
            }
            mixer.add(w, d);
        }
        if mixer.total <= 0.0 {
            return Err(Error::InvalidDistribution(
                "mixture weights sum to zero".into(),
            ));
        }
        Ok(mixer.finish())
    }

    pub fn to_atomic(&self) -> AtomicDistribution {
        AtomicDistribution {
            atoms: self
                .iter()
                .filter(|&(_, m)| m > 0.0)
                .map(|(k, m)| (k as f64, m))
                .collect(),
        }
    }
}

/// Probability distribution with finitely many atoms on the real line.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomicDistribution {
    atoms: Vec<(f64, f64)>,
}

impl AtomicDistribution {
    /// Sorts, coalesces near-coincident atoms, drops zero masses and checks
    /// normalization.
    pub fn new(atoms: Vec<(f64, f64)>) -> Result<Self> {
        let mut total = 0.0;
        for &(x, m) in &atoms {
            if !x.is_finite() {
                return Err(Error::InvalidDistribution(format!(
                    "atom location {x} is not finite"
                )));
            }
            check_mass(m)?;
            total += m;
        }
        check_total(total)?;
        Ok(Self::from_raw(atoms))
    }

    pub(crate) fn from_raw(mut atoms: Vec<(f64, f64)>) -> Self {
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(atoms.len());
        let mut anchor = f64::NEG_INFINITY;
        for (x, m) in atoms {
            if m <= 0.0 {
                continue;
            }
            match merged.last_mut() {
                Some(last) if x - anchor <= ATOM_MERGE_TOL => last.1 += m,
                _ => {
                    anchor = x;
                    merged.push((x, m));
                }
            }
        }
        if merged.is_empty() {
            merged.push((0.0, 1.0));
        }
        Self { atoms: merged }
    }

    pub fn point(x: f64) -> Self {
        Self {
            atoms: vec![(x, 1.0)],
        }
    }

    /// `(location, mass)` pairs sorted by location.
    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn min_support(&self) -> f64 {
        self.atoms[0].0
    }

    pub fn max_support(&self) -> f64 {
        self.atoms[self.atoms.len() - 1].0
    }

    pub fn mean(&self) -> f64 {
        self.atoms.iter().map(|&(x, m)| x * m).sum()
    }

    pub fn variance(&self) -> f64 {
        let mu = self.mean();
        self.atoms.iter().map(|&(x, m)| (x - mu).powi(2) * m).sum()
    }

    pub fn convolve(&self, other: &Self) -> Self {
        let mut out = Vec::with_capacity(self.atoms.len() * other.atoms.len());
        for &(x, p) in &self.atoms {
            for &(y, q) in &other.atoms {
                out.push((x + y, p * q));
            }
        }
        Self::from_raw(out)
    }

    /// Total variation distance; atoms within [`ATOM_MERGE_TOL`] are matched.
    pub fn tv_distance(&self, other: &Self) -> f64 {
        let (a, b) = (&self.atoms, &other.atoms);
        let (mut i, mut j) = (0, 0);
        let mut l1 = 0.0;
        while i < a.len() || j < b.len() {
            let ord = match (a.get(i), b.get(j)) {
                (Some(x), Some(y)) if (x.0 - y.0).abs() <= ATOM_MERGE_TOL => Ordering::Equal,
                (Some(x), Some(y)) => x.0.total_cmp(&y.0),
                (Some(_), None) => Ordering::Less,
                _ => Ordering::Greater,
            };
            match ord {
                Ordering::Equal => {
                    l1 += (a[i].1 - b[j].1).abs();
                    i += 1;
                    j += 1;
                }
                Ordering::Less => {
                    l1 += a[i].1;
                    i += 1;
                }
                Ordering::Greater => {
                    l1 += b[j].1;
                    j += 1;
                }
            }
        }
        (0.5 * l1).min(1.0)
    }

    /// Lévy concentration `sup_x P([x, x + t])` over closed windows.
    ///
    /// The supremum is attained with the window's left end on an atom, so a
    /// two-pointer sweep over the sorted atoms suffices.
    pub fn concentration(&self, t: f64) -> Result<f64> {
        check_t(t)?;
        let atoms = &self.atoms;
        let mut best: f64 = 0.0;
        let mut window = 0.0;
        let mut hi = 0;
        for lo in 0..atoms.len() {
            let right = atoms[lo].0 + t + ATOM_MERGE_TOL;
            while hi < atoms.len() && atoms[hi].0 <= right {
                window += atoms[hi].1;
                hi += 1;
            }
            best = best.max(window);
            window -= atoms[lo].1;
        }
        Ok(best.min(1.0))
    }

    pub fn mixture(components: &[(f64, &Self)]) -> Result<Self> {
        let mut mixer = AtomicMixer::default();
        for &(w, d) in components {
            if !w.is_finite() || w < 0.0 {
                return Err(Error::InvalidDistribution(format!(
                    "mixture weight {w} is negative or not finite"
                )));
            }
            mixer.add(w, d);
        }
        if mixer.total <= 0.0 {
            return Err(Error::InvalidDistribution(
                "mixture weights sum to zero".into(),
            ));
        }
        Ok(mixer.finish())
    }

    /// Converts to a lattice distribution when every atom sits on an integer
    /// (within `1e-9`).
    pub fn to_lattice(&self) -> Option<LatticeDistribution> {
        let mut points = Vec::with_capacity(self.atoms.len());
        for &(x, m) in &self.atoms {
            let k = x.round();
            if (x - k).abs() > 1e-9 || k.abs() > 9.0e15 {
                return None;
            }
            points.push((k as i64, m));
        }
        let lo = points.first()?.0;
        let hi = points.last()?.0;
        let mut masses = vec![0.0; (hi - lo + 1) as usize];
        for (k, m) in points {
            masses[(k - lo) as usize] += m;
        }
        Some(LatticeDistribution::from_raw(lo, masses))
    }
}

/// Either kind of finitely supported distribution.
#[derive(Debug, Clone, PartialEq)]
pub enum Distribution {
    Lattice(LatticeDistribution),
    Atomic(AtomicDistribution),
}

impl From<LatticeDistribution> for Distribution {
    fn from(d: LatticeDistribution) -> Self {
        Distribution::Lattice(d)
    }
}

impl From<AtomicDistribution> for Distribution {
    fn from(d: AtomicDistribution) -> Self {
        Distribution::Atomic(d)
    }
}

impl Distribution {
    pub fn kind(&self) -> Kind {
        match self {
            Distribution::Lattice(_) => Kind::Integer,
            Distribution::Atomic(_) => Kind::Real,
        }
    }

    pub fn as_lattice(&self) -> Option<&LatticeDistribution> {
        match self {
            Distribution::Lattice(d) => Some(d),
            Distribution::Atomic(_) => None,
        }
    }

    pub fn as_atomic(&self) -> Option<&AtomicDistribution> {
        match self {
            Distribution::Atomic(d) => Some(d),
            Distribution::Lattice(_) => None,
        }
    }

    pub fn to_atomic(&self) -> AtomicDistribution {
        match self {
            Distribution::Lattice(d) => d.to_atomic(),
            Distribution::Atomic(d) => d.clone(),
        }
    }

    pub fn convolve(&self, other: &Self) -> Result<Self> {
        match (self, other) {
            (Distribution::Lattice(a), Distribution::Lattice(b)) => Ok(a.convolve(b).into()),
            (Distribution::Atomic(a), Distribution::Atomic(b)) => Ok(a.convolve(b).into()),
            _ => Err(Error::KindMismatch {
                left: self.kind(),
                right: other.kind(),
            }),
        }
    }

    pub fn concentration(&self, t: f64) -> Result<f64> {
        match self {
            Distribution::Lattice(d) => d.concentration(t),
            Distribution::Atomic(d) => d.concentration(t),
        }
    }

    pub fn mean(&self) -> f64 {
        match self {
            Distribution::Lattice(d) => d.mean(),
            Distribution::Atomic(d) => d.mean(),
        }
    }

    pub fn variance(&self) -> f64 {
        match self {
            Distribution::Lattice(d) => d.variance(),
            Distribution::Atomic(d) => d.variance(),
        }
    }

    /// `(location, mass)` pairs in increasing order of location.
    pub fn points(&self) -> Vec<(f64, f64)> {
        self.to_atomic().atoms
    }
}

/// Total variation distance between distributions of either kind.
pub fn tv_distance(a: &Distribution, b: &Distribution) -> f64 {
    match (a, b) {
        (Distribution::Lattice(x), Distribution::Lattice(y)) => x.tv_distance(y),
        _ => a.to_atomic().tv_distance(&b.to_atomic()),
    }
}

/// Shared interface for the enumeration engines in `diag_sum`.
pub(crate) trait Measure: Clone {
    type Mixer: Mixer<Self>;
    fn unit() -> Self;
    fn conv(&self, other: &Self) -> Self;
    fn mixer() -> Self::Mixer;
}

pub(crate) trait Mixer<D> {
    fn add(&mut self, weight: f64, d: &D);
    fn finish(self) -> D;
}

impl Measure for LatticeDistribution {
    type Mixer = LatticeMixer;
    fn unit() -> Self {
        Self::point(0)
    }
    fn conv(&self, other: &Self) -> Self {
        self.convolve(other)
    }
    fn mixer() -> LatticeMixer {
        LatticeMixer::default()
    }
}

impl Measure for AtomicDistribution {
    type Mixer = AtomicMixer;
    fn unit() -> Self {
        Self::point(0.0)
    }
    fn conv(&self, other: &Self) -> Self {
        self.convolve(other)
    }
    fn mixer() -> AtomicMixer {
        AtomicMixer::default()
    }
}

/// Dense accumulator over the running support hull.
#[derive(Debug, Default)]
pub(crate) struct LatticeMixer {
    lo: i64,
    sums: Vec<f64>,
    total: f64,
}

impl Mixer<LatticeDistribution> for LatticeMixer {
    fn add(&mut self, weight: f64, d: &LatticeDistribution) {
        if self.sums.is_empty() {
            self.lo = d.offset;
        }
        if d.offset < self.lo {
            let grow = (self.lo - d.offset) as usize;
            self.sums.splice(0..0, std::iter::repeat_n(0.0, grow));
            self.lo = d.offset;
        }
        let start = (d.offset - self.lo) as usize;
        let end = start + d.masses.len();
        if end > self.sums.len() {
            self.sums.resize(end, 0.0);
        }
        for (slot, &m) in self.sums[start..end].iter_mut().zip(&d.masses) {
            *slot += weight * m;
        }
        self.total += weight;
    }

    fn finish(self) -> LatticeDistribution {
        let total = self.total;
        let masses = self.sums.into_iter().map(|s| s / total).collect();
        LatticeDistribution::from_raw(self.lo, masses)
    }
}

/// Atom list accumulator, compacted whenever it grows large.
#[derive(Debug, Default)]
pub(crate) struct AtomicMixer {
    atoms: Vec<(f64, f64)>,
    total: f64,
}

const COMPACT_THRESHOLD: usize = 1 << 20;

impl Mixer<AtomicDistribution> for AtomicMixer {
    fn add(&mut self, weight: f64, d: &AtomicDistribution) {
        self.atoms
            .extend(d.atoms.iter().map(|&(x, m)| (x, weight * m)));
        self.total += weight;
        if self.atoms.len() > COMPACT_THRESHOLD {
            let atoms = std::mem::take(&mut self.atoms);
            self.atoms = AtomicDistribution::from_raw(atoms).atoms;
        }
    }

    fn finish(self) -> AtomicDistribution {
        let total = self.total;
        let mut d = AtomicDistribution::from_raw(self.atoms);
        for a in &mut d.atoms {
            a.1 /= total;
        }
        d
    }
}
