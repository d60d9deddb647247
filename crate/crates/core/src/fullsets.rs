//! Partial vectors over `Z/p`, full sets and fixed-parameter checks of the
//! statement that every finite coloring of a product of such spaces has a
//! monochromatic product of full sets.
//!
//! `(Z/p)^{n:l}` is the set of partial functions `[n] → Z/p` defined on at
//! least `n - l` coordinates. A set `L` of them is full when some total `h`
//! and `a ⊆ [n]` with `|a| = n - l` give, for each `r ∈ Z/p`, a set
//! `a ⊆ a_r ⊆ [n]` with `(r + h)↾a_r ∈ L`.
//!
//! The coloring space of a multi-factor instance is `∏_i (Z/p_i)^{n_i:l_i}`,
//! with each factor over its own modulus.

use std::collections::HashSet;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FullSetError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("need 0 <= l <= n, got l = {l}, n = {n}")]
    BadParameters { n: usize, l: usize },
    #[error("at most {max} coordinates are supported, got {n}")]
    TooManyCoordinates { n: usize, max: usize },
    #[error("cannot parse {text:?}: {message}")]
    Parse { text: String, message: String },
    #[error("need at least one color")]
    NoColors,
    #[error("{colors}^{elements} colorings exceed the cap of {cap}")]
    CapExceeded { colors: usize, elements: usize, cap: u128 },
    #[error("thread pool: {0}")]
    Pool(String),
}

/// Largest supported `n`; domains are `u32` bitmasks.
pub const MAX_COORDINATES: usize = 20;

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// A partial function `[n] → Z/p`; `entries[i]` is the value at `i + 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PartialVector {
    p: u8,
    entries: Vec<Option<u8>>,
}

impl PartialVector {
    pub fn new(p: u8, entries: Vec<Option<u8>>) -> Result<Self, FullSetError> {
        if !is_prime(p as u64) {
            return Err(FullSetError::NotPrime(p as u64));
        }
        if let Some(v) = entries.iter().flatten().find(|&&v| v >= p) {
            return Err(FullSetError::Parse {
                text: format!("{entries:?}"),
                message: format!("value {v} is not below {p}"),
            });
        }
        Ok(PartialVector { p, entries })
    }

    pub fn total(p: u8, values: &[u8]) -> Result<Self, FullSetError> {
        Self::new(p, values.iter().map(|&v| Some(v)).collect())
    }

    /// Text form: one character per coordinate, `·` where undefined.
    pub fn parse(text: &str, p: u8) -> Result<Self, FullSetError> {
        let entries = text
            .chars()
            .map(|ch| match ch {
                '·' | '.' => Ok(None),
                _ => ch
                    .to_digit(36)
                    .map(|v| Some(v as u8))
                    .ok_or_else(|| FullSetError::Parse {
                        text: text.into(),
                        message: format!("unexpected character {ch:?}"),
                    }),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(p, entries)
    }

    pub fn p(&self) -> u8 {
        self.p
    }

    pub fn n(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[Option<u8>] {
        &self.entries
    }

    /// Bit `i` set iff coordinate `i + 1` is defined.
    pub fn dom_mask(&self) -> u32 {
        self.entries
            .iter()
            .enumerate()
            .filter(|(_, e)| e.is_some())
            .fold(0, |m, (i, _)| m | 1 << i)
    }

    pub fn dom(&self) -> Vec<usize> {
        (0..self.n()).filter(|&i| self.entries[i].is_some()).map(|i| i + 1).collect()
    }

    /// `(r + h)↾mask` for a total `h`.
    pub fn shifted_restriction(p: u8, h: &[u8], r: u8, mask: u32) -> Self {
        PartialVector {
            p,
            entries: h
                .iter()
                .enumerate()
                .map(|(i, &v)| (mask >> i & 1 == 1).then(|| (v + r) % p))
                .collect(),
        }
    }

    fn sort_key(&self) -> (u32, Vec<u8>) {
        (self.dom_mask(), self.entries.iter().flatten().copied().collect())
    }
}

impl fmt::Display for PartialVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.entries {
            match e {
                Some(v) => write!(f, "{}", char::from_digit(*v as u32, 36).expect("p < 36 in text form"))?,
                None => f.write_str("·")?,
            }
        }
        Ok(())
    }
}

fn validate(n: usize, l: usize, p: u8) -> Result<(), FullSetError> {
    if !is_prime(p as u64) {
        return Err(FullSetError::NotPrime(p as u64));
    }
    if l > n {
        return Err(FullSetError::BadParameters { n, l });
    }
    if n > MAX_COORDINATES {
        return Err(FullSetError::TooManyCoordinates {
            n,
            max: MAX_COORDINATES,
        });
    }
    Ok(())
}

/// Totals `[n] → Z/p` in lexicographic order (first coordinate most
/// significant).
fn totals(n: usize, p: u8) -> impl Iterator<Item = Vec<u8>> {
    let count = (p as u64).pow(n as u32);
    (0..count).map(move |mut x| {
        let mut v = vec![0u8; n];
        for slot in v.iter_mut().rev() {
            *slot = (x % p as u64) as u8;
            x /= p as u64;
        }
        v
    })
}

/// `(Z/p)^{n:l}` ordered by domain bitmask, then values.
pub fn enumerate_space(n: usize, l: usize, p: u8) -> Result<Vec<PartialVector>, FullSetError> {
    validate(n, l, p)?;
    let mut out = Vec::new();
    for mask in 0u32..(1 << n) {
        let size = mask.count_ones() as usize;
        if size + l < n {
            continue;
        }
        for vals in totals(size, p) {
            let mut it = vals.into_iter();
            let entries = (0..n).map(|i| (mask >> i & 1 == 1).then(|| it.next().unwrap())).collect();
            out.push(PartialVector { p, entries });
        }
    }
    debug_assert!(out.windows(2).all(|w| w[0].sort_key() < w[1].sort_key()));
    Ok(out)
}

/// Witness of fullness. Coordinates are 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FullnessCertificate {
    pub h: Vec<u8>,
    pub a: Vec<usize>,
    /// `a_r` for `r = 0, ..., p - 1`.
    pub a_r: Vec<Vec<usize>>,
}

fn mask_of(coords: &[usize]) -> u32 {
    coords.iter().fold(0, |m, &c| m | 1 << (c - 1))
}

fn coords_of(mask: u32, n: usize) -> Vec<usize> {
    (0..n).filter(|&i| mask >> i & 1 == 1).map(|i| i + 1).collect()
}

impl FullnessCertificate {
    /// Direct membership checks against `set`.
    pub fn validate(&self, set: &[PartialVector], n: usize, l: usize, p: u8) -> bool {
        let members: HashSet<&PartialVector> = set.iter().collect();
        let a = mask_of(&self.a);
        self.h.len() == n
            && self.a.len() + l == n
            && self.a_r.len() == p as usize
            && self.a_r.iter().enumerate().all(|(r, ar)| {
                let m = mask_of(ar);
                m & a == a && members.contains(&PartialVector::shifted_restriction(p, &self.h, r as u8, m))
            })
    }
}

/// Masks `b` with `a ⊆ b ⊆ [n]`, ascending.
fn supersets(a: u32, n: usize) -> impl Iterator<Item = u32> {
    (0u32..(1 << n)).filter(move |b| b & a == a)
}

fn masks_of_size(n: usize, k: usize) -> impl Iterator<Item = u32> {
    (0u32..(1 << n)).filter(move |m| m.count_ones() as usize == k)
}

/// The first certificate in (h, a, a_r) search order, if `set` is full.
pub fn is_full(
    set: &[PartialVector],
    n: usize,
    l: usize,
    p: u8,
) -> Result<Option<FullnessCertificate>, FullSetError> {
    validate(n, l, p)?;
    let members: HashSet<&PartialVector> = set.iter().collect();
    for h in totals(n, p) {
        for a in masks_of_size(n, n - l) {
            let mut chosen = Vec::with_capacity(p as usize);
            for r in 0..p {
                match supersets(a, n).find(|&b| members.contains(&PartialVector::shifted_restriction(p, &h, r, b))) {
                    Some(b) => chosen.push(b),
                    None => break,
                }
            }
            if chosen.len() == p as usize {
                let cert = FullnessCertificate {
                    h,
                    a: coords_of(a, n),
                    a_r: chosen.into_iter().map(|b| coords_of(b, n)).collect(),
                };
                debug_assert!(cert.validate(set, n, l, p));
                return Ok(Some(cert));
            }
        }
    }
    Ok(None)
}

/// One factor `(Z/p)^{n:l}` of a product instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Factor {
    pub p: u8,
    pub l: usize,
    pub n: usize,
}

/// Every inclusion-minimal shape of full set: `{(r + h)↾a_r : r ∈ Z/p}`,
/// as sorted indices into `space`, deduplicated. A set is full iff it
/// contains one of these, so monochromatic full sets exist iff
/// monochromatic basic ones do.
pub fn basic_full_sets(space: &[PartialVector], f: Factor) -> Vec<Vec<usize>> {
    let index: std::collections::HashMap<&PartialVector, usize> =
        space.iter().enumerate().map(|(i, v)| (v, i)).collect();
    let mut out: HashSet<Vec<usize>> = HashSet::new();
    for h in totals(f.n, f.p) {
        for a in masks_of_size(f.n, f.n - f.l) {
            let sups: Vec<u32> = supersets(a, f.n).collect();
            let mut pick = vec![0usize; f.p as usize];
            'odometer: loop {
                let mut members: Vec<usize> = pick
                    .iter()
                    .enumerate()
                    .map(|(r, &k)| index[&PartialVector::shifted_restriction(f.p, &h, r as u8, sups[k])])
                    .collect();
                members.sort_unstable();
                members.dedup();
                out.insert(members);
                for slot in pick.iter_mut().rev() {
                    *slot += 1;
                    if *slot < sups.len() {
                        continue 'odometer;
                    }
                    *slot = 0;
                }
                break;
            }
        }
    }
    let mut out: Vec<Vec<usize>> = out.into_iter().collect();
    out.sort();
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FsVerdict {
    Holds,
    Counterexample,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FsReport {
    pub factors: Vec<Factor>,
    pub colors: usize,
    /// Size of the product space.
    pub elements: usize,
    pub colorings_checked: u128,
    pub verdict: FsVerdict,
    /// Least failing coloring: entry `i` is the color of product element
    /// `i`, elements ordered lexicographically by factor index tuples.
    pub counterexample: Option<Vec<usize>>,
}

/// Precomputed factor spaces and basic full sets.
#[derive(Debug, Clone)]
pub struct FsInstance {
    pub factors: Vec<Factor>,
    pub spaces: Vec<Vec<PartialVector>>,
    pub basics: Vec<Vec<Vec<usize>>>,
    strides: Vec<usize>,
    pub elements: usize,
}

impl FsInstance {
    pub fn new(factors: &[Factor]) -> Result<Self, FullSetError> {
        if factors.is_empty() {
            return Err(FullSetError::BadParameters { n: 0, l: 0 });
        }
        let spaces = factors
            .iter()
            .map(|f| enumerate_space(f.n, f.l, f.p))
            .collect::<Result<Vec<_>, _>>()?;
        let basics = spaces.iter().zip(factors).map(|(s, &f)| basic_full_sets(s, f)).collect();
        let mut strides = vec![1; factors.len()];
        for i in (0..factors.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * spaces[i + 1].len();
        }
        let elements = spaces.iter().map(Vec::len).product();
        Ok(FsInstance {
            factors: factors.to_vec(),
            spaces,
            basics,
            strides,
            elements,
        })
    }

    /// Index of the product element with factor indices `idx`.
    pub fn element(&self, idx: &[usize]) -> usize {
        idx.iter().zip(&self.strides).map(|(i, s)| i * s).sum()
    }

    /// Indices of basic full sets, one per factor, whose product is
    /// monochromatic under `coloring`, if any.
    pub fn monochromatic_choice(&self, coloring: &[usize]) -> Option<Vec<usize>> {
        let mut choice = Vec::with_capacity(self.factors.len());
        self.choose(coloring, &mut choice).then_some(choice)
    }

    fn choose(&self, coloring: &[usize], choice: &mut Vec<usize>) -> bool {
        let depth = choice.len();
        if depth == self.factors.len() {
            return self.product_is_monochromatic(coloring, choice);
        }
        for b in 0..self.basics[depth].len() {
            choice.push(b);
            if self.choose(coloring, choice) {
                return true;
            }
            choice.pop();
        }
        false
    }

    fn product_is_monochromatic(&self, coloring: &[usize], choice: &[usize]) -> bool {
        let sets: Vec<&Vec<usize>> = choice.iter().enumerate().map(|(i, &b)| &self.basics[i][b]).collect();
        let mut pos = vec![0usize; sets.len()];
        let mut color = None;
        'odometer: loop {
            let idx: Vec<usize> = pos.iter().zip(&sets).map(|(&k, s)| s[k]).collect();
            let c = coloring[self.element(&idx)];
            if *color.get_or_insert(c) != c {
                return false;
            }
            for slot in (0..sets.len()).rev() {
                pos[slot] += 1;
                if pos[slot] < sets[slot].len() {
                    continue 'odometer;
                }
                pos[slot] = 0;
            }
            return true;
        }
    }
}

fn coloring_from_index(mut x: u128, colors: usize, elements: usize) -> Vec<usize> {
    (0..elements)
        .map(|_| {
            let c = (x % colors as u128) as usize;
            x /= colors as u128;
            c
        })
        .collect()
}

/// Sweeps every `colors`-coloring of the product space in ascending base-`c`
/// order (entry 0 least significant).
pub fn fs_instance_check(
    factors: &[Factor],
    colors: usize,
    cap: u128,
    workers: usize,
) -> Result<FsReport, FullSetError> {
    if colors == 0 {
        return Err(FullSetError::NoColors);
    }
    let inst = FsInstance::new(factors)?;
    let elements = inst.elements;
    let total = (colors as u128).checked_pow(elements as u32).filter(|&t| t <= cap);
    let Some(total) = total else {
        return Err(FullSetError::CapExceeded { colors, elements, cap });
    };
    let fails = |x: u128| inst.monochromatic_choice(&coloring_from_index(x, colors, elements)).is_none();
    let failure = if workers > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| FullSetError::Pool(e.to_string()))?;
        let total = u64::try_from(total).expect("cap keeps the sweep within u64");
        pool.install(|| (0..total).into_par_iter().find_first(|&x| fails(x as u128)))
            .map(|x| x as u128)
    } else {
        (0..total).find(|&x| fails(x))
    };
    Ok(FsReport {
        factors: factors.to_vec(),
        colors,
        elements,
        colorings_checked: total,
        verdict: if failure.is_some() {
            FsVerdict::Counterexample
        } else {
            FsVerdict::Holds
        },
        counterexample: failure.map(|x| coloring_from_index(x, colors, elements)),
    })
}
