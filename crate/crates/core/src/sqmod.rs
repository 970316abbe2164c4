//! Straight modules stored by their pieces at square-free negative degrees.
//!
//! A skeleton keeps `dim_F`, the dimension of the piece in multidegree `-F`,
//! and for `i` in `F` the map `drop(F, i)` given by multiplication by `x_i`
//! from degree `-F` to `-F + e_i` (the piece indexed by `F \ {i}`).

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use crate::combinatorics::{VarSet, SquareFreeIdeal, MAX_VARS};
use crate::error::{Error, Result};
use crate::linalg::{cohomology_data, CohomologyData, ExactMatrix, Field, SparseMatrix};
use crate::par;

/// Largest number of generators allowed to be active at a single degree.
pub const MAX_ACTIVE_GENERATORS: usize = 24;

/// Largest number of matrix entries in the two differentials around one
/// degree of a Čech complex with multiplication maps.
pub const MAX_DENSE_ENTRIES: usize = 1 << 24;

/// Largest number of candidate degrees a single Čech computation may visit.
pub const MAX_DEGREES: u64 = 1 << 20;

/// Largest generator support handled by [`unit_cech_dims`]; the work grows
/// like `3^k` in the support size `k`.
pub const MAX_NERVE_VARS: usize = 16;

#[derive(Clone, Debug)]
pub struct ModuleSkeleton<K: Field> {
    n: usize,
    field: K,
    dims: BTreeMap<VarSet, usize>,
    drops: BTreeMap<(VarSet, usize), ExactMatrix<K>>,
}

/// A failure of `drop(F\i, j) drop(F, i) = drop(F\j, i) drop(F, j)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Violation {
    pub face: VarSet,
    pub i: usize,
    pub j: usize,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "drop maps at F = {} do not commute for x_{} and x_{}",
            self.face,
            self.i + 1,
            self.j + 1
        )
    }
}

fn check_n(n: usize) -> Result<()> {
    if n > MAX_VARS {
        return Err(Error::TooManyVariables(n));
    }
    Ok(())
}

impl<K: Field> ModuleSkeleton<K> {
    pub fn zero(field: &K, n: usize) -> Result<Self> {
        check_n(n)?;
        Ok(ModuleSkeleton {
            n,
            field: field.clone(),
            dims: BTreeMap::new(),
            drops: BTreeMap::new(),
        })
    }

    /// The skeleton of the polynomial ring itself.
    pub fn unit(field: &K, n: usize) -> Result<Self> {
        let mut m = Self::zero(field, n)?;
        m.dims.insert(VarSet::EMPTY, 1);
        Ok(m)
    }

    /// Assembles a skeleton from raw data. Shapes are checked, commutativity
    /// is not (see [`ModuleSkeleton::validate`]).
    pub fn from_parts(
        field: &K,
        n: usize,
        dims: BTreeMap<VarSet, usize>,
        drops: BTreeMap<(VarSet, usize), ExactMatrix<K>>,
    ) -> Result<Self> {
        check_n(n)?;
        let dims: BTreeMap<VarSet, usize> = dims.into_iter().filter(|&(_, d)| d > 0).collect();
        for f in dims.keys() {
            if !f.fits(n) {
                return Err(Error::Shape(format!("degree {f} does not fit n = {n}")));
            }
        }
        let m = ModuleSkeleton {
            n,
            field: field.clone(),
            dims,
            drops: BTreeMap::new(),
        };
        let mut out = m.clone();
        for ((f, i), mat) in drops {
            if !f.contains(i) {
                return Err(Error::Shape(format!("x_{} is not in {f}", i + 1)));
            }
            let want = (m.dim(f.without(i)), m.dim(f));
            if mat.shape() != want {
                return Err(Error::Shape(format!(
                    "drop({f}, {}) is {}x{}, expected {}x{}",
                    i + 1,
                    mat.rows(),
                    mat.cols(),
                    want.0,
                    want.1
                )));
            }
            if want.0 > 0 && want.1 > 0 {
                out.drops.insert((f, i), mat);
            }
        }
        Ok(out)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn field(&self) -> &K {
        &self.field
    }

    pub fn dim(&self, f: VarSet) -> usize {
        self.dims.get(&f).copied().unwrap_or(0)
    }

    /// Nonzero entries of the dimension table; absent degrees have dimension 0.
    pub fn graded_dims(&self) -> &BTreeMap<VarSet, usize> {
        &self.dims
    }

    pub fn support(&self) -> impl Iterator<Item = VarSet> + '_ {
        self.dims.keys().copied()
    }

    pub fn is_zero(&self) -> bool {
        self.dims.is_empty()
    }

    pub fn length(&self) -> usize {
        self.dims.values().sum()
    }

    /// Multiplication by `x_i` from the piece at `F` to the piece at `F \ {i}`.
    pub fn drop_map(&self, f: VarSet, i: usize) -> ExactMatrix<K> {
        assert!(f.contains(i), "x_{} is not in {f}", i + 1);
        match self.drops.get(&(f, i)) {
            Some(m) => m.clone(),
            None => ExactMatrix::zeros(&self.field, self.dim(f.without(i)), self.dim(f)),
        }
    }

    /// Composite of drops from `from` down to `to` (which must be a subset).
    pub fn transition(&self, from: VarSet, to: VarSet) -> ExactMatrix<K> {
        assert!(to.is_subset(from), "{to} is not contained in {from}");
        let (src, tgt) = (self.dim(from), self.dim(to));
        if src == 0 || tgt == 0 {
            return ExactMatrix::zeros(&self.field, tgt, src);
        }
        let mut cur = ExactMatrix::identity(&self.field, src);
        let mut set = from;
        for i in from.difference(to).iter() {
            if self.dim(set.without(i)) == 0 {
                return ExactMatrix::zeros(&self.field, tgt, src);
            }
            cur = self.drop_map(set, i).mul(&cur);
            set = set.without(i);
        }
        cur
    }

    /// The skeleton of the localization at `x^G`.
    pub fn localize(&self, g: VarSet) -> Self {
        let mut dims = BTreeMap::new();
        for (&a, &d) in &self.dims {
            if !a.intersection(g).is_empty() {
                continue;
            }
            for b in g.subsets() {
                dims.insert(a.union(b), d);
            }
        }
        let mut drops = BTreeMap::new();
        for &f in dims.keys() {
            for i in f.iter() {
                if !dims.contains_key(&f.without(i)) {
                    continue;
                }
                let m = if g.contains(i) {
                    ExactMatrix::identity(&self.field, dims[&f])
                } else {
                    self.drop_map(f.difference(g), i)
                };
                drops.insert((f, i), m);
            }
        }
        ModuleSkeleton {
            n: self.n,
            field: self.field.clone(),
            dims,
            drops,
        }
    }

    /// Checks the commutativity of every square of drop maps.
    pub fn validate(&self) -> std::result::Result<(), Violation> {
        for &f in self.dims.keys() {
            let elems: Vec<usize> = f.iter().collect();
            for (a, &i) in elems.iter().enumerate() {
                for &j in &elems[a + 1..] {
                    let bottom = f.without(i).without(j);
                    if self.dim(bottom) == 0 {
                        continue;
                    }
                    let via_i = self.drop_map(f.without(i), j).mul(&self.drop_map(f, i));
                    let via_j = self.drop_map(f.without(j), i).mul(&self.drop_map(f, j));
                    if via_i != via_j {
                        return Err(Violation { face: f, i, j });
                    }
                }
            }
        }
        Ok(())
    }
}

fn sign<K: Field>(field: &K, mask: u64, pos: usize) -> K::Elem {
    if (mask & ((1u64 << pos) - 1)).count_ones().is_multiple_of(2) {
        field.one()
    } else {
        field.neg(&field.one())
    }
}

/// Generators that matter at degree `F`: those whose trace on `F` is minimal,
/// keeping the smallest index among equal traces. `None` when some trace is
/// empty, in which case the Čech complex at `F` is contractible.
fn active_generators(gens: &[VarSet], f: VarSet) -> Option<Vec<usize>> {
    let traces: Vec<VarSet> = gens.iter().map(|g| g.intersection(f)).collect();
    if traces.iter().any(|t| t.is_empty()) {
        return None;
    }
    let active = (0..gens.len())
        .filter(|&k| {
            (0..gens.len()).all(|o| {
                o == k || !traces[o].is_subset(traces[k]) || (traces[o] == traces[k] && o > k)
            })
        })
        .collect();
    Some(active)
}

/// One summand `M_{F \ G_T}` of the Čech complex at a fixed degree.
#[derive(Clone, Debug)]
struct Component {
    mask: u64,
    set: VarSet,
    offset: usize,
    dim: usize,
}

#[derive(Clone, Debug, Default)]
struct Slot {
    comps: Vec<Component>,
    index: HashMap<u64, usize>,
    total: usize,
}

impl Slot {
    fn get(&self, mask: u64) -> Option<&Component> {
        self.index.get(&mask).map(|&c| &self.comps[c])
    }
}

/// The Čech complex of a skeleton at degree `F` on a chosen list of generators.
struct LocalComplex<'a, K: Field> {
    m: &'a ModuleSkeleton<K>,
    f: VarSet,
    /// Traces `g_k ∩ F`, indexed by local position.
    traces: Vec<VarSet>,
    cache: HashMap<(VarSet, VarSet), ExactMatrix<K>>,
}

impl<'a, K: Field> LocalComplex<'a, K> {
    fn new(m: &'a ModuleSkeleton<K>, gens: &[VarSet], active: &[usize], f: VarSet) -> Result<Self> {
        if active.len() > MAX_ACTIVE_GENERATORS {
            return Err(Error::SizeCap(format!(
                "{} generators are active at degree {f}; the limit is {MAX_ACTIVE_GENERATORS}",
                active.len()
            )));
        }
        Ok(LocalComplex {
            m,
            f,
            traces: active.iter().map(|&k| gens[k].intersection(f)).collect(),
            cache: HashMap::new(),
        })
    }

    fn set_of(&self, mask: u64) -> VarSet {
        let mut covered = VarSet::EMPTY;
        let mut rest = mask;
        while rest != 0 {
            let p = rest.trailing_zeros() as usize;
            covered = covered.union(self.traces[p]);
            rest &= rest - 1;
        }
        self.f.difference(covered)
    }

    fn slot(&self, t: usize) -> Slot {
        let a = self.traces.len();
        let mut slot = Slot::default();
        if t > a {
            return slot;
        }
        for mask in masks_of_weight(a, t) {
            let set = self.set_of(mask);
            let dim = self.m.dim(set);
            if dim == 0 {
                continue;
            }
            slot.index.insert(mask, slot.comps.len());
            slot.comps.push(Component {
                mask,
                set,
                offset: slot.total,
                dim,
            });
            slot.total += dim;
        }
        slot
    }

    fn transition(&mut self, from: VarSet, to: VarSet) -> ExactMatrix<K> {
        if from == to {
            return ExactMatrix::identity(&self.m.field, self.m.dim(from));
        }
        if let Some(t) = self.cache.get(&(from, to)) {
            return t.clone();
        }
        let t = self.m.transition(from, to);
        self.cache.insert((from, to), t.clone());
        t
    }

    /// The differential from `src` (slot t) to `tgt` (slot t + 1).
    fn differential(&mut self, src: &Slot, tgt: &Slot) -> ExactMatrix<K> {
        let field = self.m.field.clone();
        let mut d = ExactMatrix::zeros(&field, tgt.total, src.total);
        for c in &src.comps {
            for p in 0..self.traces.len() {
                let bit = 1u64 << p;
                if c.mask & bit != 0 {
                    continue;
                }
                let Some(t) = tgt.get(c.mask | bit) else {
                    continue;
                };
                let block = self.transition(c.set, t.set);
                let s = sign(&field, c.mask, p);
                for r in 0..t.dim {
                    for col in 0..c.dim {
                        let v = block.get(r, col);
                        if !field.is_zero(v) {
                            d.set(t.offset + r, c.offset + col, field.mul(&s, v));
                        }
                    }
                }
            }
        }
        d
    }

    /// The same differential, column-sparse.
    fn sparse_differential(&mut self, src: &Slot, tgt: &Slot) -> SparseMatrix<K> {
        let field = self.m.field.clone();
        let mut d = SparseMatrix::new(&field, tgt.total);
        for c in &src.comps {
            let mut cols: Vec<Vec<(usize, K::Elem)>> = vec![Vec::new(); c.dim];
            for p in 0..self.traces.len() {
                let bit = 1u64 << p;
                if c.mask & bit != 0 {
                    continue;
                }
                let Some(t) = tgt.get(c.mask | bit) else {
                    continue;
                };
                let block = self.transition(c.set, t.set);
                let s = sign(&field, c.mask, p);
                for (col, entries) in cols.iter_mut().enumerate() {
                    for r in 0..t.dim {
                        let v = block.get(r, col);
                        if !field.is_zero(v) {
                            entries.push((t.offset + r, field.mul(&s, v)));
                        }
                    }
                }
            }
            for entries in cols {
                d.push_column(entries);
            }
        }
        d
    }
}

/// All `a`-bit masks with exactly `t` bits set, in increasing numeric order.
fn masks_of_weight(a: usize, t: usize) -> impl Iterator<Item = u64> {
    let limit = 1u64 << a;
    let first = if t == 0 { 0 } else { (1u64 << t) - 1 };
    let mut next = Some(first);
    std::iter::from_fn(move || {
        let cur = next?;
        if cur >= limit || (t > a) {
            next = None;
            return None;
        }
        next = if cur == 0 {
            None
        } else {
            // Gosper's hack.
            let c = cur & cur.wrapping_neg();
            let r = cur + c;
            Some((((r ^ cur) >> 2) / c) | r)
        };
        Some(cur)
    })
}

/// Cohomology at one degree together with the data needed to induce drops.
struct DegreeData<K: Field> {
    active: Vec<usize>,
    slot: Slot,
    coh: CohomologyData<K>,
}

/// Degrees where some Čech summand can be nonzero.
fn candidate_degrees<K: Field>(m: &ModuleSkeleton<K>, gens: &[VarSet]) -> Result<Vec<VarSet>> {
    let all = gens.iter().fold(VarSet::EMPTY, |acc, g| acc.union(*g));
    let mut count = 0u64;
    for a in m.support() {
        count += 1u64 << all.difference(a).len();
        if count > MAX_DEGREES {
            return Err(Error::SizeCap(format!(
                "more than {MAX_DEGREES} candidate degrees in a Čech computation"
            )));
        }
    }
    let mut out: Vec<VarSet> = Vec::new();
    for a in m.support() {
        for b in all.difference(a).subsets() {
            let f = a.union(b);
            if gens.iter().all(|g| !g.intersection(f).is_empty()) {
                out.push(f);
            }
        }
    }
    out.sort();
    out.dedup();
    Ok(out)
}

fn degree_data<K: Field>(
    m: &ModuleSkeleton<K>,
    gens: &[VarSet],
    f: VarSet,
    j: usize,
) -> Result<Option<DegreeData<K>>> {
    let Some(active) = active_generators(gens, f) else {
        return Ok(None);
    };
    let mut lc = LocalComplex::new(m, gens, &active, f)?;
    let cur = lc.slot(j);
    if cur.total == 0 {
        return Ok(None);
    }
    let prev = if j == 0 { Slot::default() } else { lc.slot(j - 1) };
    let next = lc.slot(j + 1);
    let entries = (prev.total + next.total).saturating_mul(cur.total);
    if entries > MAX_DENSE_ENTRIES {
        return Err(Error::SizeCap(format!(
            "the Čech differentials at degree {f} have {entries} entries; at most {MAX_DENSE_ENTRIES} are allowed"
        )));
    }
    let d_in = lc.differential(&prev, &cur);
    let d_out = lc.differential(&cur, &next);
    let coh = cohomology_data(&d_in, &d_out).map_err(|e| internal(e, f))?;
    if coh.dim == 0 {
        return Ok(None);
    }
    Ok(Some(DegreeData { active, slot: cur, coh }))
}

fn internal(e: Error, f: VarSet) -> Error {
    panic!("internal error in the Čech complex at degree {f}: {e}")
}

/// Matrix of `x_i` from the cohomology at `F` to the cohomology at `F \ {i}`.
///
/// A representative cycle on the active generators at `F` is lifted to the
/// complex on the union of both active sets (a chain-level section of the
/// projection away from generators redundant at `F`), pushed along `x_i`,
/// then projected onto the active generators at `F \ {i}`.
fn induced_drop<K: Field>(
    m: &ModuleSkeleton<K>,
    gens: &[VarSet],
    f: VarSet,
    i: usize,
    src: &DegreeData<K>,
    tgt: &DegreeData<K>,
) -> Result<ExactMatrix<K>> {
    let field = m.field();
    let g = f.without(i);
    let mut union: Vec<usize> = src.active.iter().chain(&tgt.active).copied().collect();
    union.sort_unstable();
    union.dedup();
    let pos = |k: usize| union.binary_search(&k).expect("generator in union");
    let to_union = |mask: u64, active: &[usize]| -> u64 {
        let mut out = 0u64;
        let mut rest = mask;
        while rest != 0 {
            let p = rest.trailing_zeros() as usize;
            out |= 1u64 << pos(active[p]);
            rest &= rest - 1;
        }
        out
    };
    let mut lc = LocalComplex::new(m, gens, &union, f)?;

    // Redundant generators at F and a dominating active generator for each.
    let traces_f: Vec<VarSet> = union.iter().map(|&k| gens[k].intersection(f)).collect();
    let redundant: Vec<(usize, usize)> = union
        .iter()
        .enumerate()
        .filter(|(_, k)| src.active.binary_search(k).is_err())
        .map(|(p, _)| {
            let k0 = src
                .active
                .iter()
                .map(|&k| pos(k))
                .find(|&q| traces_f[q].is_subset(traces_f[p]))
                .expect("every generator is dominated by an active one");
            (p, k0)
        })
        .collect();

    let tgt_mask: u64 = tgt.active.iter().fold(0, |acc, &k| acc | 1u64 << pos(k));
    let tgt_index: HashMap<u64, &Component> = tgt
        .slot
        .comps
        .iter()
        .map(|c| (to_union(c.mask, &tgt.active), c))
        .collect();

    let mut pushed = ExactMatrix::zeros(field, tgt.slot.total, src.coh.dim);
    for col in 0..src.coh.dim {
        let rep = src.coh.reps.column(col);
        let mut x: BTreeMap<u64, (VarSet, Vec<K::Elem>)> = src
            .slot
            .comps
            .iter()
            .map(|c| {
                let v = rep[c.offset..c.offset + c.dim].to_vec();
                (to_union(c.mask, &src.active), (c.set, v))
            })
            .collect();

        for &(r, k0) in &redundant {
            let rbit = 1u64 << r;
            let mut y: BTreeMap<u64, (VarSet, Vec<K::Elem>)> = BTreeMap::new();
            for (&mask, (set, v)) in &x {
                let up = mask | rbit;
                let up_set = lc.set_of(up);
                if m.dim(up_set) == 0 {
                    continue;
                }
                let s = sign(field, mask, r);
                let img = lc.transition(*set, up_set).mul_vec(v);
                let entry = y
                    .entry(up)
                    .or_insert_with(|| (up_set, vec![field.zero(); img.len()]));
                for (e, w) in entry.1.iter_mut().zip(&img) {
                    *e = field.add(e, &field.mul(&s, w));
                }
            }
            let kbit = 1u64 << k0;
            for (mask, (set, v)) in y {
                if mask & kbit == 0 {
                    continue;
                }
                let w = mask & !kbit;
                let s = sign(field, w, k0);
                let entry = x.entry(w).or_insert_with(|| (set, vec![field.zero(); v.len()]));
                for (e, val) in entry.1.iter_mut().zip(&v) {
                    *e = field.sub(e, &field.mul(&s, val));
                }
            }
        }

        for (mask, (set, v)) in &x {
            if mask & !tgt_mask != 0 {
                continue;
            }
            let Some(c) = tgt_index.get(mask) else {
                continue;
            };
            let img = if set.contains(i) {
                m.drop_map(*set, i).mul_vec(v)
            } else {
                v.clone()
            };
            debug_assert_eq!(c.set, set.intersection(g));
            for (r, e) in img.into_iter().enumerate() {
                pushed.set(c.offset + r, col, e);
            }
        }
    }
    Ok(tgt.coh.projector.mul(&pushed))
}

/// `H^j_I(M)` for the ideal generated by `gens` (not necessarily minimal).
pub fn cech_cohomology_gens<K: Field>(
    m: &ModuleSkeleton<K>,
    gens: &[VarSet],
    j: usize,
) -> Result<ModuleSkeleton<K>> {
    if gens.is_empty() {
        return if j == 0 { Ok(m.clone()) } else { ModuleSkeleton::zero(m.field(), m.n) };
    }
    if gens.iter().any(|g| g.is_empty()) {
        return ModuleSkeleton::zero(m.field(), m.n);
    }
    let degrees = candidate_degrees(m, gens)?;
    let data = par::try_map(&degrees, |&f| degree_data(m, gens, f, j).map(|d| (f, d)))?;
    let data: BTreeMap<VarSet, DegreeData<K>> =
        data.into_iter().filter_map(|(f, d)| d.map(|d| (f, d))).collect();

    let pairs: Vec<(VarSet, usize)> = data
        .keys()
        .flat_map(|&f| f.iter().map(move |i| (f, i)))
        .filter(|(f, i)| data.contains_key(&f.without(*i)))
        .collect();
    let drops = par::try_map(&pairs, |&(f, i)| {
        induced_drop(m, gens, f, i, &data[&f], &data[&f.without(i)]).map(|d| ((f, i), d))
    })?;

    Ok(ModuleSkeleton {
        n: m.n,
        field: m.field.clone(),
        dims: data.iter().map(|(&f, d)| (f, d.coh.dim)).collect(),
        drops: drops.into_iter().filter(|(_, d)| !d.is_zero()).collect(),
    })
}

/// `H^j_I(M)` with its induced multiplication maps.
pub fn cech_cohomology<K: Field>(
    m: &ModuleSkeleton<K>,
    ideal: &SquareFreeIdeal,
    j: usize,
) -> Result<ModuleSkeleton<K>> {
    if ideal.n() != m.n {
        return Err(Error::MismatchedN(m.n, ideal.n()));
    }
    let support = ideal.generators().iter().fold(VarSet::EMPTY, |acc, g| acc.union(*g));
    if is_unit(m) && !ideal.is_zero() && support.len() <= MAX_NERVE_VARS {
        return unit_cech_cohomology(&m.field, m.n, ideal.generators(), j);
    }
    cech_cohomology_gens(m, ideal.generators(), j)
}

/// Dimensions of `H^j_I(M)` at every degree and every `j`, from ranks only.
/// Entry `j` of the result is the nonzero part of the dimension table.
pub fn cech_dims_gens<K: Field>(
    m: &ModuleSkeleton<K>,
    gens: &[VarSet],
) -> Result<Vec<BTreeMap<VarSet, usize>>> {
    if gens.is_empty() {
        return Ok(vec![m.graded_dims().clone()]);
    }
    let mut out = vec![BTreeMap::new(); gens.len() + 1];
    if gens.iter().any(|g| g.is_empty()) {
        return Ok(out);
    }
    let degrees = candidate_degrees(m, gens)?;
    let per_degree = par::try_map(&degrees, |&f| -> Result<Vec<usize>> {
        let Some(active) = active_generators(gens, f) else {
            return Ok(Vec::new());
        };
        let mut lc = LocalComplex::new(m, gens, &active, f)?;
        let slots: Vec<Slot> = (0..=active.len()).map(|t| lc.slot(t)).collect();
        let ranks: Vec<usize> = (0..active.len())
            .map(|t| {
                if slots[t].total == 0 || slots[t + 1].total == 0 {
                    0
                } else {
                    lc.sparse_differential(&slots[t], &slots[t + 1]).rank()
                }
            })
            .collect();
        Ok((0..=active.len())
            .map(|t| {
                let before = if t == 0 { 0 } else { ranks[t - 1] };
                let after = ranks.get(t).copied().unwrap_or(0);
                slots[t].total - before - after
            })
            .collect())
    })?;
    for (f, dims) in degrees.iter().zip(per_degree) {
        for (t, d) in dims.into_iter().enumerate() {
            if d > 0 {
                out[t].insert(*f, d);
            }
        }
    }
    Ok(out)
}

pub fn cech_dims<K: Field>(
    m: &ModuleSkeleton<K>,
    ideal: &SquareFreeIdeal,
) -> Result<Vec<BTreeMap<VarSet, usize>>> {
    if ideal.n() != m.n {
        return Err(Error::MismatchedN(m.n, ideal.n()));
    }
    cech_dims_gens(m, ideal.generators())
}

/// Lengths of `H^j_I(M)` for `j = 0, 1, ...`.
/// Dimensions of `H^j_I(S)` for the unit module without building Čech
/// complexes over generator subsets.
///
/// At degree `-F` the Čech complex of `S` consists of the generator subsets
/// whose traces cover `F`. Its cohomology in degree `t` is the reduced
/// cohomology in degree `t - 2` of the simplicial complex of non-covering
/// subsets, and by the nerve lemma that complex is homotopy equivalent to
/// `N_F = {W ⊆ F : some generator misses W}`, which has at most `2^|F|` faces.
pub fn unit_cech_dims<K: Field>(field: &K, n: usize, gens: &[VarSet]) -> Result<Vec<BTreeMap<VarSet, usize>>> {
    check_n(n)?;
    if gens.is_empty() {
        return Ok(vec![[(VarSet::EMPTY, 1)].into()]);
    }
    let mut out = vec![BTreeMap::new(); gens.len() + 1];
    if gens.iter().any(|g| g.is_empty()) {
        return Ok(out);
    }
    let all = nerve_support(gens)?;
    let degrees: Vec<VarSet> = all
        .subsets()
        .filter(|f| gens.iter().all(|g| !g.intersection(*f).is_empty()))
        .collect();
    let per_degree = par::map(&degrees, |&f| {
        let traces: Vec<VarSet> = gens.iter().map(|g| g.intersection(f)).collect();
        Nerve::new(f, &traces).cohomology_dims(field)
    });
    for (f, dims) in degrees.iter().zip(per_degree) {
        // Reduced degree d sits in Čech degree d + 2.
        for (d, h) in dims.into_iter().enumerate() {
            if h > 0 {
                out[d + 1].insert(*f, h);
            }
        }
    }
    Ok(out)
}

/// The complex `N_F`, faces grouped by size (the empty face has size 0).
struct Nerve {
    f: VarSet,
    faces: Vec<Vec<VarSet>>,
    index: Vec<HashMap<VarSet, usize>>,
}

impl Nerve {
    fn new(f: VarSet, traces: &[VarSet]) -> Self {
        let mut faces: Vec<Vec<VarSet>> = vec![Vec::new(); f.len() + 1];
        for w in f.subsets() {
            if w.is_empty() || traces.iter().any(|r| r.intersection(w).is_empty()) {
                faces[w.len()].push(w);
            }
        }
        while faces.last().is_some_and(|l| l.is_empty()) {
            faces.pop();
        }
        let index = faces
            .iter()
            .map(|fs| fs.iter().enumerate().map(|(i, w)| (*w, i)).collect())
            .collect();
        Nerve { f, faces, index }
    }

    fn count(&self, s: usize) -> usize {
        self.faces.get(s).map_or(0, Vec::len)
    }

    /// Coboundary from faces of size `s` to faces of size `s + 1`, by columns.
    fn coboundary_columns<K: Field>(&self, field: &K, s: usize) -> Vec<Vec<(usize, K::Elem)>> {
        let Some(targets) = self.index.get(s + 1) else {
            return vec![Vec::new(); self.count(s)];
        };
        self.faces[s]
            .iter()
            .map(|w| {
                self.f
                    .difference(*w)
                    .iter()
                    .filter_map(|v| {
                        let row = *targets.get(&w.with(v))?;
                        let below = w.iter().filter(|&u| u < v).count();
                        let sign = if below % 2 == 0 { field.one() } else { field.neg(&field.one()) };
                        Some((row, sign))
                    })
                    .collect()
            })
            .collect()
    }

    fn coboundary<K: Field>(&self, field: &K, s: usize) -> ExactMatrix<K> {
        let mut d = ExactMatrix::zeros(field, self.count(s + 1), self.count(s));
        for (c, col) in self.coboundary_columns(field, s).into_iter().enumerate() {
            for (r, e) in col {
                d.set(r, c, e);
            }
        }
        d
    }

    /// Reduced cohomology, indexed by `d + 1` for `d = -1, 0, …`.
    fn cohomology_dims<K: Field>(&self, field: &K) -> Vec<usize> {
        let ranks: Vec<usize> = (0..self.faces.len())
            .map(|s| {
                let mut d = SparseMatrix::new(field, self.count(s + 1));
                for col in self.coboundary_columns(field, s) {
                    d.push_column(col);
                }
                d.rank()
            })
            .collect();
        (0..self.faces.len())
            .map(|s| self.count(s) - ranks[s] - if s == 0 { 0 } else { ranks[s - 1] })
            .collect()
    }

    /// Cohomology data at faces of size `s`.
    fn cohomology<K: Field>(&self, field: &K, s: usize) -> CohomologyData<K> {
        let d_in = if s == 0 {
            ExactMatrix::zeros(field, self.count(0), 0)
        } else {
            self.coboundary(field, s - 1)
        };
        cohomology_data(&d_in, &self.coboundary(field, s)).expect("the coboundary squares to zero")
    }
}

/// `H^j_I(S)` with its multiplication maps, through the nerves `N_F`.
///
/// Multiplication by `x_i` from degree `-F` to `-(F \ {i})` enlarges the
/// family of covering subsets, which on the nerve side is restriction of
/// cochains from `N_F` to its induced subcomplex `N_{F \ {i}}`.
pub fn unit_cech_cohomology<K: Field>(field: &K, n: usize, gens: &[VarSet], j: usize) -> Result<ModuleSkeleton<K>> {
    if gens.is_empty() {
        return if j == 0 { ModuleSkeleton::unit(field, n) } else { ModuleSkeleton::zero(field, n) };
    }
    check_n(n)?;
    if j == 0 || gens.iter().any(|g| g.is_empty()) {
        return ModuleSkeleton::zero(field, n);
    }
    let all = nerve_support(gens)?;
    let s = j - 1;
    let degrees: Vec<VarSet> = all
        .subsets()
        .filter(|f| f.len() >= s && gens.iter().all(|g| !g.intersection(*f).is_empty()))
        .collect();
    let data = par::map(&degrees, |&f| {
        let traces: Vec<VarSet> = gens.iter().map(|g| g.intersection(f)).collect();
        let nerve = Nerve::new(f, &traces);
        let coh = nerve.cohomology(field, s);
        (f, (nerve, coh))
    });
    let data: BTreeMap<VarSet, (Nerve, CohomologyData<K>)> =
        data.into_iter().filter(|(_, (_, c))| c.dim > 0).collect();

    let pairs: Vec<(VarSet, usize)> = data
        .keys()
        .flat_map(|&f| f.iter().map(move |i| (f, i)))
        .filter(|(f, i)| data.contains_key(&f.without(*i)))
        .collect();
    let drops = par::map(&pairs, |&(f, i)| {
        let (src, src_coh) = &data[&f];
        let (tgt, tgt_coh) = &data[&f.without(i)];
        let mut restrict = ExactMatrix::zeros(field, tgt.count(s), src.count(s));
        for (c, w) in src.faces[s].iter().enumerate() {
            if let Some(&r) = tgt.index[s].get(w) {
                restrict.set(r, c, field.one());
            }
        }
        ((f, i), tgt_coh.projector.mul(&restrict.mul(&src_coh.reps)))
    });

    Ok(ModuleSkeleton {
        n,
        field: field.clone(),
        dims: data.iter().map(|(&f, (_, c))| (f, c.dim)).collect(),
        drops: drops.into_iter().filter(|(_, d)| !d.is_zero()).collect(),
    })
}

fn nerve_support(gens: &[VarSet]) -> Result<VarSet> {
    let all = gens.iter().fold(VarSet::EMPTY, |acc, g| acc.union(*g));
    if all.len() > MAX_NERVE_VARS {
        return Err(Error::SizeCap(format!(
            "generators involve {} variables; the nerve path handles at most {MAX_NERVE_VARS}",
            all.len()
        )));
    }
    Ok(all)
}

/// Whether `m` is the skeleton of `S` itself.
fn is_unit<K: Field>(m: &ModuleSkeleton<K>) -> bool {
    m.dims.len() == 1 && m.dims.get(&VarSet::EMPTY) == Some(&1)
}

/// Total dimension of `H^j_I(M)` for every `j`; the unit module takes the
/// nerve shortcut of [`unit_cech_dims`].
pub fn cech_lengths<K: Field>(m: &ModuleSkeleton<K>, ideal: &SquareFreeIdeal) -> Result<Vec<usize>> {
    let support = ideal.generators().iter().fold(VarSet::EMPTY, |acc, g| acc.union(*g));
    let dims = if is_unit(m) && !ideal.is_zero() && support.len() <= MAX_NERVE_VARS {
        unit_cech_dims(&m.field, m.n, ideal.generators())?
    } else {
        cech_dims(m, ideal)?
    };
    Ok(dims
        .iter()
        .map(|d| d.values().sum())
        .collect())
}

/// An iterated local cohomology functor, innermost first. The first degree
/// `i_1` stands for cohomological degree `n - i_1`; later ones are used as is.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CohomologySpec {
    steps: Vec<(SquareFreeIdeal, usize)>,
}

impl CohomologySpec {
    pub fn new(steps: Vec<(SquareFreeIdeal, usize)>) -> Result<Self> {
        if let Some((first, _)) = steps.first() {
            for (ideal, _) in &steps {
                if ideal.n() != first.n() {
                    return Err(Error::MismatchedN(first.n(), ideal.n()));
                }
            }
        } else {
            return Err(Error::Shape("a cohomology spec needs at least one step".into()));
        }
        Ok(CohomologySpec { steps })
    }

    pub fn steps(&self) -> &[(SquareFreeIdeal, usize)] {
        &self.steps
    }

    pub fn n(&self) -> usize {
        self.steps[0].0.n()
    }

    /// Cohomological degrees actually applied, or `None` if the first index
    /// exceeds `n` (the module is then zero).
    fn degrees(&self) -> Option<Vec<usize>> {
        let n = self.n();
        let first = n.checked_sub(self.steps[0].1)?;
        Some(
            std::iter::once(first)
                .chain(self.steps[1..].iter().map(|(_, j)| *j))
                .collect(),
        )
    }
}

pub fn iterated_cohomology<K: Field>(spec: &CohomologySpec, field: &K) -> Result<ModuleSkeleton<K>> {
    let n = spec.n();
    let Some(degrees) = spec.degrees() else {
        return ModuleSkeleton::zero(field, n);
    };
    let mut m = ModuleSkeleton::unit(field, n)?;
    for ((ideal, _), j) in spec.steps.iter().zip(degrees) {
        if m.is_zero() {
            break;
        }
        m = cech_cohomology(&m, ideal, j)?;
    }
    Ok(m)
}

/// Length of the iterated module. The last step needs no drop maps, so it
/// runs on ranks alone.
pub fn iterated_length<K: Field>(spec: &CohomologySpec, field: &K) -> Result<usize> {
    let n = spec.n();
    let Some(degrees) = spec.degrees() else {
        return Ok(0);
    };
    let mut m = ModuleSkeleton::unit(field, n)?;
    let last = spec.steps.len() - 1;
    for (s, ((ideal, _), j)) in spec.steps.iter().zip(degrees).enumerate() {
        if m.is_zero() {
            return Ok(0);
        }
        if s == last {
            return Ok(cech_lengths(&m, ideal)?.get(j).copied().unwrap_or(0));
        }
        m = cech_cohomology(&m, ideal, j)?;
    }
    unreachable!("the loop returns at the last step")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Rationals;

    #[test]
    fn weight_masks() {
        let v: Vec<u64> = masks_of_weight(4, 2).collect();
        assert_eq!(v, vec![0b0011, 0b0101, 0b0110, 0b1001, 0b1010, 0b1100]);
        assert_eq!(masks_of_weight(3, 0).collect::<Vec<_>>(), vec![0]);
        assert_eq!(masks_of_weight(3, 3).collect::<Vec<_>>(), vec![0b111]);
        assert_eq!(masks_of_weight(2, 3).count(), 0);
        assert_eq!(masks_of_weight(0, 0).collect::<Vec<_>>(), vec![0]);
    }

    #[test]
    fn active_generators_pick_minimal_traces() {
        let gens = [VarSet::from_indices([0, 1]), VarSet::from_indices([1, 2]), VarSet::from_indices([0])];
        let f = VarSet::from_indices([0, 1, 2]);
        assert_eq!(active_generators(&gens, f), Some(vec![1, 2]));
        assert_eq!(active_generators(&gens, VarSet::from_indices([1])), None);
        // Equal traces keep the first index.
        let f = VarSet::from_indices([0]);
        assert_eq!(active_generators(&gens[..1], f), Some(vec![0]));
        let dup = [VarSet::from_indices([0, 1]), VarSet::from_indices([0, 2])];
        assert_eq!(active_generators(&dup, f), Some(vec![0]));
    }

    #[test]
    fn unit_and_localization() {
        let s = ModuleSkeleton::unit(&Rationals, 2).unwrap();
        assert_eq!(s.length(), 1);
        assert_eq!(s.dim(VarSet::EMPTY), 1);
        let loc = s.localize(VarSet::full(2));
        assert_eq!(loc.length(), 4);
        assert!(loc.validate().is_ok());
        assert_eq!(s.localize(VarSet::EMPTY).graded_dims(), s.graded_dims());
    }
}
