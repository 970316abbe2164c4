//! Brute-force local cohomology on a finite window of `Z^n` degrees.
//!
//! Every degree `β ∈ [-B, B]^n` gets its own Čech complex, assembled from
//! explicit graded pieces and multiplication maps. Nothing here goes through
//! [`crate::sqmod`]; the point is to have an independent second opinion.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use crate::combinatorics::{SquareFreeIdeal, VarSet};
use crate::error::{Error, Result};
use crate::linalg::{cohomology_data, cohomology_dim, induced_map, ChainMapSlot, ExactMatrix, Field};
use crate::sqmod::ModuleSkeleton;

pub const MAX_WINDOW_VARS: usize = 6;
pub const MAX_WINDOW_BOUND: i32 = 3;
/// Generator lists longer than this are refused (the complex has `2^ℓ` terms).
pub const MAX_WINDOW_GENERATORS: usize = 12;

pub type Degree = Vec<i32>;

/// `{i : β_i < 0}`.
pub fn negative_set(beta: &[i32]) -> VarSet {
    VarSet::from_indices((0..beta.len()).filter(|&i| beta[i] < 0))
}

/// All degrees of `[-b, b]^n` in lexicographic order.
pub fn window_degrees(n: usize, b: i32) -> Vec<Degree> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|d| {
                (-b..=b).map(move |v| {
                    let mut e = d.clone();
                    e.push(v);
                    e
                })
            })
            .collect();
    }
    out
}

fn check_window(n: usize, b: i32) -> Result<()> {
    if n > MAX_WINDOW_VARS || !(0..=MAX_WINDOW_BOUND).contains(&b) {
        return Err(Error::SizeCap(format!(
            "window oracle needs n <= {MAX_WINDOW_VARS} and 0 <= B <= {MAX_WINDOW_BOUND}, got n = {n}, B = {b}"
        )));
    }
    Ok(())
}

/// A `Z^n`-graded module restricted to the window `[-B, B]^n`: a vector space
/// per degree and the maps `x_i : M_β → M_{β+e_i}` whenever both ends lie in
/// the window.
#[derive(Clone, Debug)]
pub struct WindowModule<K: Field> {
    n: usize,
    bound: i32,
    field: K,
    dims: BTreeMap<Degree, usize>,
    mult: HashMap<(Degree, usize), ExactMatrix<K>>,
}

impl<K: Field> WindowModule<K> {
    /// The polynomial ring: the monomial `x^β` spans the piece at `β ≥ 0`.
    pub fn polynomial_ring(field: &K, n: usize, bound: i32) -> Result<Self> {
        check_window(n, bound)?;
        let mut dims = BTreeMap::new();
        let mut mult = HashMap::new();
        for beta in window_degrees(n, bound) {
            let d = usize::from(beta.iter().all(|&v| v >= 0));
            for i in 0..n {
                if beta[i] < bound {
                    mult.insert((beta.clone(), i), ExactMatrix::identity(field, d));
                }
            }
            dims.insert(beta, d);
        }
        Ok(WindowModule {
            n,
            bound,
            field: field.clone(),
            dims,
            mult,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn bound(&self) -> i32 {
        self.bound
    }

    pub fn dim(&self, beta: &[i32]) -> usize {
        self.dims.get(beta).copied().unwrap_or(0)
    }

    pub fn dims(&self) -> &BTreeMap<Degree, usize> {
        &self.dims
    }

    /// Multiplication by `x_i` out of degree `β`.
    pub fn mult(&self, beta: &[i32], i: usize) -> &ExactMatrix<K> {
        &self.mult[&(beta.to_vec(), i)]
    }

    /// Sum of the pieces at the square-free negative degrees `-F`; this is
    /// the length when the module is 1-determined.
    pub fn square_free_length(&self) -> usize {
        VarSet::full(self.n).subsets().map(|f| self.dim(&corner(self.n, f))).sum()
    }

    /// Composite of multiplications raising `from` to `to` one unit at a time,
    /// in increasing variable order.
    fn raise(&self, from: &[i32], to: &[i32]) -> ExactMatrix<K> {
        let mut cur = from.to_vec();
        let mut acc = ExactMatrix::identity(&self.field, self.dim(from));
        for i in 0..self.n {
            while cur[i] < to[i] {
                acc = self.mult(&cur, i).mul(&acc);
                cur[i] += 1;
            }
        }
        acc
    }
}

/// The degree `-F` as a vector.
pub fn corner(n: usize, f: VarSet) -> Degree {
    (0..n).map(|i| if f.contains(i) { -1 } else { 0 }).collect()
}

/// Degree at which the localization `M_{x^G}` is read off at `β`: inverted
/// coordinates that are negative move up to 0.
fn lift(beta: &[i32], g: VarSet) -> Degree {
    beta.iter()
        .enumerate()
        .map(|(i, &v)| if g.contains(i) { v.max(0) } else { v })
        .collect()
}

/// One term `(M_{x^{G_T}})_β` of the Čech complex at a fixed degree.
struct Term {
    mask: u32,
    at: Degree,
    offset: usize,
    dim: usize,
}

/// The Čech complex of a window module at one degree, for generators with
/// supports `gens`.
struct DegreeComplex<'a, K: Field> {
    m: &'a WindowModule<K>,
    gens: &'a [VarSet],
    beta: Degree,
}

impl<'a, K: Field> DegreeComplex<'a, K> {
    fn covered(&self, mask: u32) -> VarSet {
        (0..self.gens.len())
            .filter(|k| mask >> k & 1 == 1)
            .fold(VarSet::EMPTY, |acc, k| acc.union(self.gens[k]))
    }

    fn terms(&self, t: usize) -> (Vec<Term>, usize) {
        let mut out = Vec::new();
        let mut total = 0;
        for mask in 0u32..(1 << self.gens.len()) {
            if mask.count_ones() as usize != t {
                continue;
            }
            let at = lift(&self.beta, self.covered(mask));
            let dim = self.m.dim(&at);
            if dim > 0 {
                out.push(Term {
                    mask,
                    at,
                    offset: total,
                    dim,
                });
                total += dim;
            }
        }
        (out, total)
    }

    /// Differential from slot `t` to slot `t + 1`; empty slots at the ends.
    fn differential(&self, t: isize) -> ExactMatrix<K> {
        let k = &self.m.field;
        let (src, cols) = if t < 0 { (Vec::new(), 0) } else { self.terms(t as usize) };
        let (tgt, rows) = self.terms((t + 1) as usize);
        let mut d = ExactMatrix::zeros(k, rows, cols);
        for s in &src {
            for tt in &tgt {
                if s.mask & tt.mask != s.mask {
                    continue;
                }
                let g = (tt.mask ^ s.mask).trailing_zeros();
                let below = (s.mask & ((1 << g) - 1)).count_ones();
                let sign = if below % 2 == 0 { k.one() } else { k.neg(&k.one()) };
                let block = self.m.raise(&s.at, &tt.at);
                for r in 0..tt.dim {
                    for c in 0..s.dim {
                        let v = block.get(r, c);
                        if !k.is_zero(v) {
                            d.set(tt.offset + r, s.offset + c, k.mul(&sign, v));
                        }
                    }
                }
            }
        }
        d
    }

    /// The map of slot `t` induced by `x_i : β → β + e_i`.
    fn chain_map(&self, other: &DegreeComplex<'_, K>, i: usize, t: isize) -> ExactMatrix<K> {
        let k = &self.m.field;
        if t < 0 {
            return ExactMatrix::zeros(k, 0, 0);
        }
        let (src, cols) = self.terms(t as usize);
        let (tgt, rows) = other.terms(t as usize);
        let mut f = ExactMatrix::zeros(k, rows, cols);
        for s in &src {
            let Some(tt) = tgt.iter().find(|tt| tt.mask == s.mask) else {
                continue;
            };
            let block = if s.at == tt.at {
                ExactMatrix::identity(k, s.dim)
            } else {
                debug_assert_eq!(s.at[i] + 1, tt.at[i]);
                self.m.mult(&s.at, i).clone()
            };
            for r in 0..tt.dim {
                for c in 0..s.dim {
                    f.set(tt.offset + r, s.offset + c, block.get(r, c).clone());
                }
            }
        }
        f
    }
}

fn check_gens(gens: &[VarSet]) -> Result<()> {
    if gens.len() > MAX_WINDOW_GENERATORS {
        return Err(Error::SizeCap(format!(
            "window oracle takes at most {MAX_WINDOW_GENERATORS} generators, got {}",
            gens.len()
        )));
    }
    Ok(())
}

/// `H^j` of the Čech complex of `m` on generators `gens`, degree by degree,
/// with the induced multiplication maps.
pub fn window_cech<K: Field>(m: &WindowModule<K>, gens: &[VarSet], j: usize) -> Result<WindowModule<K>> {
    check_gens(gens)?;
    let j = j as isize;
    let mut data = HashMap::new();
    let mut dims = BTreeMap::new();
    for beta in window_degrees(m.n, m.bound) {
        let cx = DegreeComplex {
            m,
            gens,
            beta: beta.clone(),
        };
        let h = cohomology_data(&cx.differential(j - 1), &cx.differential(j))?;
        dims.insert(beta.clone(), h.dim);
        data.insert(beta, h);
    }
    let mut mult = HashMap::new();
    for beta in window_degrees(m.n, m.bound) {
        for i in 0..m.n {
            if beta[i] >= m.bound {
                continue;
            }
            let mut up = beta.clone();
            up[i] += 1;
            let src = DegreeComplex {
                m,
                gens,
                beta: beta.clone(),
            };
            let tgt = DegreeComplex {
                m,
                gens,
                beta: up.clone(),
            };
            let prev = src.chain_map(&tgt, i, j - 1);
            let cur = src.chain_map(&tgt, i, j);
            let next = src.chain_map(&tgt, i, j + 1);
            let slot = ChainMapSlot {
                prev: Some(&prev),
                cur: &cur,
                next: Some(&next),
            };
            let map = induced_map(&slot, &data[&beta], &data[&up])?;
            mult.insert((beta.clone(), i), map);
        }
    }
    Ok(WindowModule {
        n: m.n,
        bound: m.bound,
        field: m.field.clone(),
        dims,
        mult,
    })
}

/// Dimensions of `H^j_I(S)` at every window degree, from ranks only.
pub fn window_cohomology_dims<K: Field>(
    ideal: &SquareFreeIdeal,
    j: usize,
    bound: i32,
    field: &K,
) -> Result<BTreeMap<Degree, usize>> {
    let s = WindowModule::polynomial_ring(field, ideal.n(), bound)?;
    let gens = ideal.generators();
    check_gens(gens)?;
    let j = j as isize;
    let mut out = BTreeMap::new();
    for beta in window_degrees(s.n, bound) {
        let cx = DegreeComplex {
            m: &s,
            gens,
            beta: beta.clone(),
        };
        out.insert(beta, cohomology_dim(&cx.differential(j - 1), &cx.differential(j))?);
    }
    Ok(out)
}

/// `H^{i_s}_{I_s} ⋯ H^{i_1}_{I_1}(S)` on the window, innermost step first.
/// Each stage must be 1-determined for the localizations to be read off
/// correctly, so every intermediate module is checked before it is used.
pub fn window_iterated<K: Field>(
    steps: &[(SquareFreeIdeal, usize)],
    bound: i32,
    field: &K,
) -> Result<std::result::Result<WindowModule<K>, OracleViolation>> {
    let n = steps.first().map_or(0, |(i, _)| i.n());
    if let Some((i, _)) = steps.iter().find(|(i, _)| i.n() != n) {
        return Err(Error::MismatchedN(n, i.n()));
    }
    let mut m = WindowModule::polynomial_ring(field, n, bound)?;
    for (ideal, j) in steps {
        if let Err(v) = check_one_determined(&m) {
            return Ok(Err(v));
        }
        m = window_cech(&m, ideal.generators(), *j)?;
    }
    Ok(Ok(m))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OracleViolation {
    /// Two degrees with the same negative set carry different dimensions.
    NotDetermined {
        first: Degree,
        second: Degree,
        dims: (usize, usize),
    },
    /// A multiplication map between degrees with the same negative set is
    /// not an isomorphism.
    NotBijective { degree: Degree, var: usize },
    /// The skeleton predicts a different dimension than the window shows.
    SkeletonMismatch {
        degree: Degree,
        window: usize,
        skeleton: usize,
    },
}

impl fmt::Display for OracleViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OracleViolation::NotDetermined { first, second, dims } => write!(
                f,
                "degrees {first:?} and {second:?} share a negative set but have dimensions {} and {}",
                dims.0, dims.1
            ),
            OracleViolation::NotBijective { degree, var } => {
                write!(f, "x_{} out of degree {degree:?} is not bijective", var + 1)
            }
            OracleViolation::SkeletonMismatch {
                degree,
                window,
                skeleton,
            } => write!(f, "degree {degree:?}: window dimension {window}, skeleton predicts {skeleton}"),
        }
    }
}

/// Dimensions depend only on the negative set, and `x_i` is bijective between
/// degrees that share it.
pub fn check_one_determined<K: Field>(m: &WindowModule<K>) -> std::result::Result<(), OracleViolation> {
    let mut seen: HashMap<VarSet, (Degree, usize)> = HashMap::new();
    for (beta, &d) in &m.dims {
        let neg = negative_set(beta);
        match seen.get(&neg) {
            Some((first, d0)) if *d0 != d => {
                return Err(OracleViolation::NotDetermined {
                    first: first.clone(),
                    second: beta.clone(),
                    dims: (*d0, d),
                })
            }
            Some(_) => {}
            None => {
                seen.insert(neg, (beta.clone(), d));
            }
        }
    }
    for ((beta, i), map) in &m.mult {
        if beta[*i] == -1 {
            continue;
        }
        if map.rank() != m.dim(beta) {
            return Err(OracleViolation::NotBijective {
                degree: beta.clone(),
                var: *i,
            });
        }
    }
    Ok(())
}

/// Every window degree `β` carries exactly `skeleton.dim(neg(β))`.
pub fn compare_with_skeleton<K: Field>(
    window: &BTreeMap<Degree, usize>,
    skeleton: &ModuleSkeleton<K>,
) -> std::result::Result<(), OracleViolation> {
    for (beta, &d) in window {
        let predicted = skeleton.dim(negative_set(beta));
        if predicted != d {
            return Err(OracleViolation::SkeletonMismatch {
                degree: beta.clone(),
                window: d,
                skeleton: predicted,
            });
        }
    }
    Ok(())
}

/// Window check of `H^j_I(S)`: 1-determined on the window and equal to the
/// skeleton engine's prediction at every degree.
pub fn one_determined_check<K: Field>(
    ideal: &SquareFreeIdeal,
    j: usize,
    bound: i32,
    field: &K,
) -> Result<std::result::Result<(), OracleViolation>> {
    let s = WindowModule::polynomial_ring(field, ideal.n(), bound)?;
    let h = window_cech(&s, ideal.generators(), j)?;
    if let Err(v) = check_one_determined(&h) {
        return Ok(Err(v));
    }
    let unit = ModuleSkeleton::unit(field, ideal.n())?;
    let skeleton = crate::sqmod::cech_cohomology(&unit, ideal, j)?;
    Ok(compare_with_skeleton(h.dims(), &skeleton))
}

/// Iterated version of [`one_determined_check`] for a chain of steps.
pub fn iterated_check<K: Field>(
    steps: &[(SquareFreeIdeal, usize)],
    bound: i32,
    field: &K,
) -> Result<std::result::Result<(), OracleViolation>> {
    let h = match window_iterated(steps, bound, field)? {
        Ok(h) => h,
        Err(v) => return Ok(Err(v)),
    };
    if let Err(v) = check_one_determined(&h) {
        return Ok(Err(v));
    }
    let mut skeleton = ModuleSkeleton::unit(field, h.n())?;
    for (ideal, j) in steps {
        skeleton = crate::sqmod::cech_cohomology(&skeleton, ideal, *j)?;
    }
    Ok(compare_with_skeleton(h.dims(), &skeleton))
}

/// Every square-free monomial ideal of `k[x_1..x_n]` with at most `max_gens`
/// minimal generators, the zero and unit ideals included.
pub fn all_ideals(n: usize, max_gens: usize) -> Result<Vec<SquareFreeIdeal>> {
    fn grow(
        n: usize,
        pool: &[VarSet],
        start: usize,
        cur: &mut Vec<VarSet>,
        max: usize,
        out: &mut Vec<SquareFreeIdeal>,
    ) -> Result<()> {
        out.push(SquareFreeIdeal::new(n, cur.iter().copied())?);
        if cur.len() == max {
            return Ok(());
        }
        for k in start..pool.len() {
            let s = pool[k];
            if cur.iter().any(|c| c.is_subset(s) || s.is_subset(*c)) {
                continue;
            }
            cur.push(s);
            grow(n, pool, k + 1, cur, max, out)?;
            cur.pop();
        }
        Ok(())
    }
    check_window(n, 0)?;
    let pool: Vec<VarSet> = crate::combinatorics::all_subsets(n).collect();
    let mut out = Vec::new();
    grow(n, &pool, 0, &mut Vec::new(), max_gens, &mut out)?;
    Ok(out)
}

/// A failed window comparison, with enough context to rerun it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SweepFailure {
    pub ideal: SquareFreeIdeal,
    /// Čech degrees of the steps, innermost first; the second step, when
    /// present, is the maximal ideal.
    pub degrees: Vec<usize>,
    pub violation: OracleViolation,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SweepReport {
    pub single_checks: usize,
    pub iterated_checks: usize,
    pub failures: Vec<SweepFailure>,
}

impl SweepReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Exhaustive window comparison: `H^j_I(S)` for every ideal with `n <= n_max`
/// and at most `max_gens` generators and every `j <= j_max`, then
/// `H^i_m H^j_I(S)` for `n <= iterated_n_max`.
pub fn exhaustive_sweep<K: Field>(
    n_max: usize,
    max_gens: usize,
    j_max: usize,
    iterated_n_max: usize,
    bound: i32,
    field: &K,
) -> Result<SweepReport> {
    let mut report = SweepReport::default();
    for n in 1..=n_max {
        let m = SquareFreeIdeal::maximal(n)?;
        for ideal in all_ideals(n, max_gens)? {
            for j in 0..=j_max {
                report.single_checks += 1;
                if let Err(violation) = one_determined_check(&ideal, j, bound, field)? {
                    report.failures.push(SweepFailure {
                        ideal: ideal.clone(),
                        degrees: vec![j],
                        violation,
                    });
                }
                if n > iterated_n_max || j > n {
                    continue;
                }
                for i in 0..=n {
                    report.iterated_checks += 1;
                    let steps = [(ideal.clone(), j), (m.clone(), i)];
                    if let Err(violation) = iterated_check(&steps, bound, field)? {
                        report.failures.push(SweepFailure {
                            ideal: ideal.clone(),
                            degrees: vec![j, i],
                            violation,
                        });
                    }
                }
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Rationals;

    #[test]
    fn window_enumeration() {
        assert_eq!(window_degrees(2, 1).len(), 9);
        assert_eq!(window_degrees(0, 2), vec![Vec::<i32>::new()]);
        assert_eq!(negative_set(&[-1, 0, -2]), VarSet::from_indices([0, 2]));
        assert!(WindowModule::polynomial_ring(&Rationals, 7, 2).unwrap_err().is_size_cap());
        assert!(WindowModule::polynomial_ring(&Rationals, 2, 4).unwrap_err().is_size_cap());
    }

    #[test]
    fn raise_composes_identities_on_the_ring() {
        let s = WindowModule::polynomial_ring(&Rationals, 2, 2).unwrap();
        assert_eq!(s.raise(&[0, 0], &[2, 1]), ExactMatrix::identity(&Rationals, 1));
        assert_eq!(s.square_free_length(), 1);
    }

    #[test]
    fn ideal_enumeration_counts() {
        // Antichains in the Boolean lattice, minus those with too many members.
        assert_eq!(all_ideals(1, 4).unwrap().len(), 3);
        assert_eq!(all_ideals(2, 4).unwrap().len(), 6);
        assert_eq!(all_ideals(3, 8).unwrap().len(), 20);
    }
}
