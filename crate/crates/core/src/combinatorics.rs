//! Subsets of `[n]`, simplicial complexes, square-free monomial ideals and the
//! Stanley-Reisner correspondence between them.
//!
//! Vertices and variables are 0-based internally; `Display` and the 1-based
//! constructors follow the usual `{1, ..., n}` convention.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Hard cap on the number of variables. Every engine loop enumerates the
/// `2^n` square-free degrees.
pub const MAX_VARS: usize = 24;

/// A subset of `[n]` encoded as a bit mask.
///
/// Ordered by cardinality first and then by the numeric encoding, which is the
/// canonical order used for generators and facets.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VarSet(u32);

impl VarSet {
    pub const EMPTY: VarSet = VarSet(0);

    pub const fn from_bits(bits: u32) -> Self {
        VarSet(bits)
    }

    pub const fn bits(self) -> u32 {
        self.0
    }

    pub fn full(n: usize) -> Self {
        debug_assert!(n <= MAX_VARS);
        VarSet(((1u64 << n) - 1) as u32)
    }

    /// The set `{i}` for a 0-based index.
    pub fn singleton(i: usize) -> Self {
        debug_assert!(i < MAX_VARS);
        VarSet(1 << i)
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(indices: I) -> Self {
        indices.into_iter().fold(VarSet::EMPTY, |acc, i| acc.with(i))
    }

    /// Builds a set from 1-based indices, checking them against `n`.
    pub fn from_one_based(indices: &[usize], n: usize) -> Result<Self> {
        let mut set = VarSet::EMPTY;
        for &i in indices {
            if i == 0 || i > n {
                return Err(Error::IndexOutOfRange { index: i, n });
            }
            set = set.with(i - 1);
        }
        Ok(set)
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, i: usize) -> bool {
        i < 32 && self.0 & (1 << i) != 0
    }

    pub fn is_subset(self, other: VarSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn union(self, other: VarSet) -> VarSet {
        VarSet(self.0 | other.0)
    }

    pub fn intersection(self, other: VarSet) -> VarSet {
        VarSet(self.0 & other.0)
    }

    pub fn difference(self, other: VarSet) -> VarSet {
        VarSet(self.0 & !other.0)
    }

    pub fn with(self, i: usize) -> VarSet {
        VarSet(self.0 | (1 << i))
    }

    pub fn without(self, i: usize) -> VarSet {
        VarSet(self.0 & !(1 << i))
    }

    /// True when every element is below `n`.
    pub fn fits(self, n: usize) -> bool {
        self.is_subset(VarSet::full(n))
    }

    /// Elements in increasing order (0-based).
    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let i = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(i)
            }
        })
    }

    pub fn to_one_based(self) -> Vec<usize> {
        self.iter().map(|i| i + 1).collect()
    }

    /// All subsets of `self`, in increasing numeric order.
    pub fn subsets(self) -> impl Iterator<Item = VarSet> {
        let mask = self.0;
        let mut next = Some(0u32);
        std::iter::from_fn(move || {
            let cur = next?;
            next = if cur == mask {
                None
            } else {
                Some((cur.wrapping_sub(mask)) & mask)
            };
            Some(VarSet(cur))
        })
    }
}

impl Ord for VarSet {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len().cmp(&other.len()).then(self.0.cmp(&other.0))
    }
}

impl PartialOrd for VarSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for VarSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for VarSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, i) in self.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", i + 1)?;
        }
        write!(f, "}}")
    }
}

/// All subsets of `[n]` in increasing numeric order.
pub fn all_subsets(n: usize) -> impl Iterator<Item = VarSet> {
    (0..(1u64 << n)).map(|b| VarSet(b as u32))
}

/// Keeps the inclusion-minimal sets, deduplicated and canonically sorted.
pub fn keep_minimal(sets: &[VarSet]) -> Vec<VarSet> {
    let mut sorted = sets.to_vec();
    sorted.sort();
    sorted.dedup();
    let mut out: Vec<VarSet> = Vec::with_capacity(sorted.len());
    // Sorted by cardinality, so a subset is always seen before its supersets.
    for s in sorted {
        if !out.iter().any(|t| t.is_subset(s)) {
            out.push(s);
        }
    }
    out
}

/// Keeps the inclusion-maximal sets, deduplicated and canonically sorted.
pub fn keep_maximal(sets: &[VarSet]) -> Vec<VarSet> {
    let mut sorted = sets.to_vec();
    sorted.sort();
    sorted.dedup();
    let mut out: Vec<VarSet> = Vec::with_capacity(sorted.len());
    for s in sorted.into_iter().rev() {
        if !out.iter().any(|t| s.is_subset(*t)) {
            out.push(s);
        }
    }
    out.sort();
    out
}

fn check_n(n: usize) -> Result<()> {
    if n > MAX_VARS {
        Err(Error::TooManyVariables(n))
    } else {
        Ok(())
    }
}

fn check_fits(set: VarSet, n: usize) -> Result<()> {
    match set.iter().find(|&i| i >= n) {
        Some(i) => Err(Error::IndexOutOfRange { index: i + 1, n }),
        None => Ok(()),
    }
}

/// Dense bitmap over all `2^n` subsets.
struct SubsetBitmap {
    words: Vec<u64>,
}

impl SubsetBitmap {
    fn new(n: usize) -> Self {
        let len = (1usize << n).div_ceil(64);
        SubsetBitmap { words: vec![0; len] }
    }

    fn get(&self, s: VarSet) -> bool {
        let b = s.bits() as usize;
        self.words[b / 64] & (1 << (b % 64)) != 0
    }

    fn set(&mut self, s: VarSet) {
        let b = s.bits() as usize;
        self.words[b / 64] |= 1 << (b % 64);
    }
}

/// A simplicial complex on the vertex set `[n]`, stored by its facets.
///
/// The void complex (no faces at all) has an empty facet list and is distinct
/// from `{∅}`, whose single facet is the empty set.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct SimplicialComplex {
    n: usize,
    facets: Vec<VarSet>,
}

impl SimplicialComplex {
    /// Builds the complex generated by `faces`; non-maximal entries are dropped.
    pub fn new<I: IntoIterator<Item = VarSet>>(n: usize, faces: I) -> Result<Self> {
        check_n(n)?;
        let faces: Vec<VarSet> = faces.into_iter().collect();
        for &f in &faces {
            check_fits(f, n)?;
        }
        Ok(SimplicialComplex {
            n,
            facets: keep_maximal(&faces),
        })
    }

    pub fn from_one_based(n: usize, facets: &[Vec<usize>]) -> Result<Self> {
        check_n(n)?;
        let sets = facets
            .iter()
            .map(|f| VarSet::from_one_based(f, n))
            .collect::<Result<Vec<_>>>()?;
        Self::new(n, sets)
    }

    pub fn void(n: usize) -> Result<Self> {
        Self::new(n, [])
    }

    /// The complex `{∅}`.
    pub fn empty_face(n: usize) -> Result<Self> {
        Self::new(n, [VarSet::EMPTY])
    }

    /// The full simplex on `vertices`.
    pub fn simplex(n: usize, vertices: VarSet) -> Result<Self> {
        Self::new(n, [vertices])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn facets(&self) -> &[VarSet] {
        &self.facets
    }

    pub fn is_void(&self) -> bool {
        self.facets.is_empty()
    }

    /// `None` for the void complex, whose dimension is `-∞`.
    pub fn dim(&self) -> Option<isize> {
        self.facets.iter().map(|f| f.len() as isize - 1).max()
    }

    pub fn is_face(&self, s: VarSet) -> bool {
        self.facets.iter().any(|f| s.is_subset(*f))
    }

    fn face_bitmap(&self) -> SubsetBitmap {
        let mut bm = SubsetBitmap::new(self.n);
        for f in &self.facets {
            for s in f.subsets() {
                bm.set(s);
            }
        }
        bm
    }

    /// All faces in canonical order.
    pub fn faces(&self) -> Vec<VarSet> {
        let bm = self.face_bitmap();
        let mut out: Vec<VarSet> = all_subsets(self.n).filter(|s| bm.get(*s)).collect();
        out.sort();
        out
    }

    /// Face counts `|F_i|` for `i = -1, ..., dim`; entry `k` holds `|F_{k-1}|`.
    pub fn f_vector(&self) -> Vec<u64> {
        let Some(dim) = self.dim() else {
            return Vec::new();
        };
        let mut counts = vec![0u64; (dim + 2) as usize];
        let bm = self.face_bitmap();
        for s in all_subsets(self.n) {
            if bm.get(s) {
                counts[s.len()] += 1;
            }
        }
        counts
    }

    pub fn union(&self, other: &SimplicialComplex) -> Result<SimplicialComplex> {
        if self.n != other.n {
            return Err(Error::MismatchedN(self.n, other.n));
        }
        let all: Vec<VarSet> = self.facets.iter().chain(&other.facets).copied().collect();
        SimplicialComplex::new(self.n, all)
    }

    pub fn intersection(&self, other: &SimplicialComplex) -> Result<SimplicialComplex> {
        if self.n != other.n {
            return Err(Error::MismatchedN(self.n, other.n));
        }
        let mut meets = Vec::with_capacity(self.facets.len() * other.facets.len());
        for a in &self.facets {
            for b in &other.facets {
                meets.push(a.intersection(*b));
            }
        }
        SimplicialComplex::new(self.n, meets)
    }
}

/// A square-free monomial ideal of `K[x_1, ..., x_n]`, stored by the supports
/// of its minimal generators in canonical order.
///
/// The zero ideal has no generators; the unit ideal is the single generator
/// `∅`.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct SquareFreeIdeal {
    n: usize,
    gens: Vec<VarSet>,
}

impl SquareFreeIdeal {
    /// Builds the ideal generated by `gens`; redundant generators are dropped.
    pub fn new<I: IntoIterator<Item = VarSet>>(n: usize, gens: I) -> Result<Self> {
        check_n(n)?;
        let gens: Vec<VarSet> = gens.into_iter().collect();
        for &g in &gens {
            check_fits(g, n)?;
        }
        Ok(SquareFreeIdeal {
            n,
            gens: keep_minimal(&gens),
        })
    }

    pub fn from_one_based(n: usize, gens: &[Vec<usize>]) -> Result<Self> {
        check_n(n)?;
        let sets = gens
            .iter()
            .map(|g| VarSet::from_one_based(g, n))
            .collect::<Result<Vec<_>>>()?;
        Self::new(n, sets)
    }

    pub fn zero(n: usize) -> Result<Self> {
        Self::new(n, [])
    }

    pub fn unit(n: usize) -> Result<Self> {
        Self::new(n, [VarSet::EMPTY])
    }

    /// The homogeneous maximal ideal `(x_1, ..., x_n)`.
    pub fn maximal(n: usize) -> Result<Self> {
        Self::new(n, (0..n).map(VarSet::singleton))
    }

    /// The prime generated by the variables in `vars`.
    pub fn prime(n: usize, vars: VarSet) -> Result<Self> {
        Self::new(n, vars.iter().map(VarSet::singleton))
    }

    /// The principal ideal generated by `x^support`.
    pub fn principal(n: usize, support: VarSet) -> Result<Self> {
        Self::new(n, [support])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn generators(&self) -> &[VarSet] {
        &self.gens
    }

    pub fn num_generators(&self) -> usize {
        self.gens.len()
    }

    pub fn is_zero(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn is_proper(&self) -> bool {
        !self.gens.iter().any(|g| g.is_empty())
    }

    pub fn ensure_proper(&self) -> Result<()> {
        if self.is_proper() {
            Ok(())
        } else {
            Err(Error::NotProper)
        }
    }

    /// Whether `x^support` lies in the ideal.
    pub fn contains_monomial(&self, support: VarSet) -> bool {
        self.gens.iter().any(|g| g.is_subset(support))
    }

    pub fn is_subideal_of(&self, other: &SquareFreeIdeal) -> bool {
        self.gens.iter().all(|g| other.contains_monomial(*g))
    }

    pub fn sum(&self, other: &SquareFreeIdeal) -> Result<SquareFreeIdeal> {
        ideal_sum(self, other)
    }

    pub fn intersection(&self, other: &SquareFreeIdeal) -> Result<SquareFreeIdeal> {
        ideal_intersection(self, other)
    }

    /// Krull dimension of `S/I`, the largest facet cardinality of its complex.
    pub fn quotient_dim(&self) -> Result<usize> {
        let cx = complex_of_ideal(self)?;
        Ok(cx.facets().iter().map(|f| f.len()).max().unwrap_or(0))
    }

    /// Height of the ideal, `n - dim(S/I)`.
    pub fn height(&self) -> Result<usize> {
        Ok(self.n - self.quotient_dim()?)
    }
}

/// Face counts of `cx`, indexed from dimension `-1`.
pub fn f_vector(cx: &SimplicialComplex) -> Vec<u64> {
    cx.f_vector()
}

/// The ideal generated by the minimal non-faces of `cx`.
pub fn stanley_reisner_ideal(cx: &SimplicialComplex) -> SquareFreeIdeal {
    let bm = cx.face_bitmap();
    let gens: Vec<VarSet> = all_subsets(cx.n)
        .filter(|s| !bm.get(*s) && s.iter().all(|i| bm.get(s.without(i))))
        .collect();
    let mut gens = gens;
    gens.sort();
    SquareFreeIdeal { n: cx.n, gens }
}

/// The complex whose faces are the supports of monomials outside `ideal`.
pub fn complex_of_ideal(ideal: &SquareFreeIdeal) -> Result<SimplicialComplex> {
    ideal.ensure_proper()?;
    let n = ideal.n;
    let mut nonface = SubsetBitmap::new(n);
    for s in all_subsets(n) {
        if ideal.gens.contains(&s) || s.iter().any(|i| nonface.get(s.without(i))) {
            nonface.set(s);
        }
    }
    let facets: Vec<VarSet> = all_subsets(n)
        .filter(|s| !nonface.get(*s))
        .filter(|s| (0..n).all(|i| s.contains(i) || nonface.get(s.with(i))))
        .collect();
    SimplicialComplex::new(n, facets)
}

/// Minimal primes of `ideal`, each given by the set of variables generating it.
///
/// These are the complements of the facets of the associated complex.
pub fn minimal_primes(ideal: &SquareFreeIdeal) -> Result<Vec<VarSet>> {
    let cx = complex_of_ideal(ideal)?;
    let full = VarSet::full(ideal.n);
    let mut primes: Vec<VarSet> = cx.facets().iter().map(|f| full.difference(*f)).collect();
    primes.sort();
    Ok(primes)
}

pub fn ideal_sum(a: &SquareFreeIdeal, b: &SquareFreeIdeal) -> Result<SquareFreeIdeal> {
    if a.n != b.n {
        return Err(Error::MismatchedN(a.n, b.n));
    }
    SquareFreeIdeal::new(a.n, a.gens.iter().chain(&b.gens).copied())
}

/// Intersection of square-free monomial ideals: pairwise lcms, re-minimized.
pub fn ideal_intersection(a: &SquareFreeIdeal, b: &SquareFreeIdeal) -> Result<SquareFreeIdeal> {
    if a.n != b.n {
        return Err(Error::MismatchedN(a.n, b.n));
    }
    let mut lcms = Vec::with_capacity(a.gens.len() * b.gens.len());
    for x in &a.gens {
        for y in &b.gens {
            lcms.push(x.union(*y));
        }
    }
    SquareFreeIdeal::new(a.n, lcms)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vs(one_based: &[usize]) -> VarSet {
        VarSet::from_one_based(one_based, 24).unwrap()
    }

    fn example_complex() -> SimplicialComplex {
        SimplicialComplex::from_one_based(5, &[vec![1, 2], vec![1, 5], vec![3, 4, 5]]).unwrap()
    }

    /// Faces by brute force: every subset contained in some listed facet.
    fn brute_faces(n: usize, facets: &[VarSet]) -> Vec<VarSet> {
        all_subsets(n)
            .filter(|s| facets.iter().any(|f| s.is_subset(*f)))
            .collect()
    }

    #[test]
    fn varset_basics() {
        let s = vs(&[1, 3]);
        assert_eq!(s.len(), 2);
        assert!(s.contains(0) && s.contains(2) && !s.contains(1));
        assert_eq!(s.to_one_based(), vec![1, 3]);
        assert_eq!(format!("{s}"), "{1,3}");
        assert_eq!(s.subsets().count(), 4);
        assert_eq!(VarSet::full(3).subsets().count(), 8);
        assert!(VarSet::from_one_based(&[4], 3).is_err());
        assert!(vs(&[2]) < vs(&[1, 2]));
        assert!(vs(&[1, 2]) < vs(&[1, 3]));
    }

    #[test]
    fn f_vector_examples() {
        let simplex = SimplicialComplex::simplex(3, VarSet::full(3)).unwrap();
        assert_eq!(f_vector(&simplex), vec![1, 3, 3, 1]);
        assert_eq!(f_vector(&SimplicialComplex::empty_face(3).unwrap()), vec![1]);
        assert_eq!(f_vector(&SimplicialComplex::void(3).unwrap()), Vec::<u64>::new());

        let cx = example_complex();
        let mut counts = vec![0u64; 4];
        for s in brute_faces(5, cx.facets()) {
            counts[s.len()] += 1;
        }
        assert_eq!(counts, vec![1, 5, 5, 1]);
        assert_eq!(f_vector(&cx), counts);
    }

    #[test]
    fn stanley_reisner_examples() {
        let points = SimplicialComplex::from_one_based(2, &[vec![1], vec![2]]).unwrap();
        assert_eq!(stanley_reisner_ideal(&points).generators(), &[vs(&[1, 2])]);

        let cx = example_complex();
        let mut expected = vec![vs(&[1, 3]), vs(&[1, 4]), vs(&[2, 3]), vs(&[2, 4]), vs(&[2, 5])];
        expected.sort();
        // brute force: minimal non-faces
        let faces = brute_faces(5, cx.facets());
        let brute: Vec<VarSet> = all_subsets(5)
            .filter(|s| !faces.contains(s) && s.iter().all(|i| faces.contains(&s.without(i))))
            .collect();
        let mut brute = brute;
        brute.sort();
        assert_eq!(brute, expected);
        assert_eq!(stanley_reisner_ideal(&cx).generators(), expected.as_slice());

        let full = SimplicialComplex::simplex(4, VarSet::full(4)).unwrap();
        assert!(stanley_reisner_ideal(&full).is_zero());

        let void = SimplicialComplex::void(3).unwrap();
        assert!(!stanley_reisner_ideal(&void).is_proper());
        let point = SimplicialComplex::empty_face(3).unwrap();
        assert_eq!(stanley_reisner_ideal(&point), SquareFreeIdeal::maximal(3).unwrap());
    }

    #[test]
    fn complex_of_ideal_examples() {
        let m = SquareFreeIdeal::maximal(2).unwrap();
        assert_eq!(complex_of_ideal(&m).unwrap(), SimplicialComplex::empty_face(2).unwrap());

        let i = SquareFreeIdeal::from_one_based(2, &[vec![1, 2]]).unwrap();
        assert_eq!(complex_of_ideal(&i).unwrap().facets(), &[vs(&[1]), vs(&[2])]);

        let ex = SquareFreeIdeal::from_one_based(
            5,
            &[vec![1, 3], vec![1, 4], vec![2, 3], vec![2, 4], vec![2, 5]],
        )
        .unwrap();
        assert_eq!(complex_of_ideal(&ex).unwrap(), example_complex());

        assert_eq!(
            complex_of_ideal(&SquareFreeIdeal::unit(2).unwrap()),
            Err(Error::NotProper)
        );
    }

    #[test]
    fn minimal_primes_examples() {
        let i = SquareFreeIdeal::from_one_based(2, &[vec![1, 2]]).unwrap();
        assert_eq!(minimal_primes(&i).unwrap(), vec![vs(&[1]), vs(&[2])]);

        let ex = stanley_reisner_ideal(&example_complex());
        let mut expected = vec![vs(&[3, 4, 5]), vs(&[2, 3, 4]), vs(&[1, 2])];
        expected.sort();
        assert_eq!(minimal_primes(&ex).unwrap(), expected);

        assert_eq!(
            minimal_primes(&SquareFreeIdeal::zero(3).unwrap()).unwrap(),
            vec![VarSet::EMPTY]
        );
        assert!(minimal_primes(&SquareFreeIdeal::unit(3).unwrap()).is_err());
    }

    #[test]
    fn sum_and_intersection() {
        let x1 = SquareFreeIdeal::from_one_based(2, &[vec![1]]).unwrap();
        let x2 = SquareFreeIdeal::from_one_based(2, &[vec![2]]).unwrap();
        assert_eq!(ideal_sum(&x1, &x2).unwrap().generators(), &[vs(&[1]), vs(&[2])]);
        assert_eq!(ideal_intersection(&x1, &x2).unwrap().generators(), &[vs(&[1, 2])]);
        let other = SquareFreeIdeal::zero(3).unwrap();
        assert_eq!(ideal_sum(&x1, &other), Err(Error::MismatchedN(2, 3)));
    }

    #[test]
    fn minimization_and_order() {
        let i = SquareFreeIdeal::from_one_based(3, &[vec![1, 2], vec![1], vec![3], vec![2, 3]])
            .unwrap();
        assert_eq!(i.generators(), &[vs(&[1]), vs(&[3])]);
        let cx = SimplicialComplex::from_one_based(3, &[vec![1], vec![1, 2], vec![3]]).unwrap();
        assert_eq!(cx.facets(), &[vs(&[3]), vs(&[1, 2])]);
    }

    #[test]
    fn dims_and_heights() {
        let ex = stanley_reisner_ideal(&example_complex());
        assert_eq!(ex.quotient_dim().unwrap(), 3);
        assert_eq!(ex.height().unwrap(), 2);
        assert_eq!(SquareFreeIdeal::maximal(4).unwrap().height().unwrap(), 4);
        assert_eq!(SquareFreeIdeal::zero(4).unwrap().quotient_dim().unwrap(), 4);
        assert_eq!(example_complex().dim(), Some(2));
        assert_eq!(SimplicialComplex::void(2).unwrap().dim(), None);
    }

    #[test]
    fn rejects_oversized_n() {
        assert_eq!(
            SquareFreeIdeal::zero(25),
            Err(Error::TooManyVariables(25))
        );
    }
}
