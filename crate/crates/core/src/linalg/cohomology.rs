use super::field::Field;
use super::matrix::ExactMatrix;
use crate::error::{Error, Result};

/// Cohomology of `C^{j-1} --d_in--> C^j --d_out--> C^{j+1}` at the middle slot.
///
/// `reps` has one column per cohomology class (cycles lifting a basis of
/// ker/im). `projector` sends a cycle to its coordinates in that basis.
#[derive(Clone, Debug)]
pub struct CohomologyData<K: Field> {
    pub dim: usize,
    pub reps: ExactMatrix<K>,
    pub projector: ExactMatrix<K>,
    pub d_in: ExactMatrix<K>,
    pub d_out: ExactMatrix<K>,
}

impl<K: Field> CohomologyData<K> {
    /// Dimension of the middle term `C^j`.
    pub fn ambient(&self) -> usize {
        self.reps.rows()
    }

    /// Coordinates of a cycle, given as a column vector.
    pub fn classify(&self, cycle: &[K::Elem]) -> Vec<K::Elem> {
        self.projector.mul_vec(cycle)
    }
}

fn check_shapes<K: Field>(d_in: &ExactMatrix<K>, d_out: &ExactMatrix<K>) -> Result<()> {
    if d_in.rows() != d_out.cols() {
        return Err(Error::Shape(format!(
            "d_in is {}x{} but d_out is {}x{}",
            d_in.rows(),
            d_in.cols(),
            d_out.rows(),
            d_out.cols()
        )));
    }
    Ok(())
}

/// Dimension of the middle cohomology, from ranks alone.
pub fn cohomology_dim<K: Field>(d_in: &ExactMatrix<K>, d_out: &ExactMatrix<K>) -> Result<usize> {
    check_shapes(d_in, d_out)?;
    Ok(d_in.rows() - d_in.rank() - d_out.rank())
}

pub fn cohomology_data<K: Field>(d_in: &ExactMatrix<K>, d_out: &ExactMatrix<K>) -> Result<CohomologyData<K>> {
    check_shapes(d_in, d_out)?;
    if !d_out.mul(d_in).is_zero() {
        return Err(Error::NotAComplex);
    }
    let boundaries = d_in.select_columns(&d_in.independent_columns());
    let cycles = d_out.kernel_basis();
    let r = boundaries.cols();

    // Pivot columns of [B | Z] past the boundary block pick cycles that are
    // independent modulo the image.
    let chosen: Vec<usize> = boundaries
        .hstack(&cycles)
        .independent_columns()
        .into_iter()
        .filter(|&p| p >= r)
        .map(|p| p - r)
        .collect();
    let reps = cycles.select_columns(&chosen);
    let h = reps.cols();

    let w = boundaries.hstack(&reps);
    let left = w.left_inverse().expect("[B | R] has full column rank by construction");
    let rows: Vec<usize> = (r..r + h).collect();
    let projector = left.select_rows(&rows);

    Ok(CohomologyData {
        dim: h,
        reps,
        projector,
        d_in: d_in.clone(),
        d_out: d_out.clone(),
    })
}

/// Components of a chain map around slot `j`: `prev` on `C^{j-1}`, `cur` on
/// `C^j`, `next` on `C^{j+1}`. Missing neighbours skip that commutation check.
pub struct ChainMapSlot<'a, K: Field> {
    pub prev: Option<&'a ExactMatrix<K>>,
    pub cur: &'a ExactMatrix<K>,
    pub next: Option<&'a ExactMatrix<K>>,
}

/// Matrix of the map induced on cohomology, in the representative bases of
/// `src` and `tgt`.
pub fn induced_map<K: Field>(
    f: &ChainMapSlot<'_, K>,
    src: &CohomologyData<K>,
    tgt: &CohomologyData<K>,
) -> Result<ExactMatrix<K>> {
    if f.cur.shape() != (tgt.ambient(), src.ambient()) {
        return Err(Error::Shape(format!(
            "chain map is {}x{}, expected {}x{}",
            f.cur.rows(),
            f.cur.cols(),
            tgt.ambient(),
            src.ambient()
        )));
    }
    if let Some(prev) = f.prev {
        let shape = (tgt.d_in.cols(), src.d_in.cols());
        if prev.shape() != shape {
            return Err(Error::Shape("previous component has the wrong shape".into()));
        }
        if f.cur.mul(&src.d_in) != tgt.d_in.mul(prev) {
            return Err(Error::NonCommuting);
        }
    }
    if let Some(next) = f.next {
        let shape = (tgt.d_out.rows(), src.d_out.rows());
        if next.shape() != shape {
            return Err(Error::Shape("next component has the wrong shape".into()));
        }
        if tgt.d_out.mul(f.cur) != next.mul(&src.d_out) {
            return Err(Error::NonCommuting);
        }
    }
    Ok(tgt.projector.mul(&f.cur.mul(&src.reps)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::field::{PrimeField, Rationals};

    fn q(rows: &[Vec<i64>]) -> ExactMatrix<Rationals> {
        ExactMatrix::from_i64_rows(&Rationals, rows)
    }

    #[test]
    fn zero_maps_give_full_space() {
        let k = Rationals;
        let d_in = ExactMatrix::zeros(&k, 3, 2);
        let d_out = ExactMatrix::zeros(&k, 4, 3);
        let h = cohomology_data(&d_in, &d_out).unwrap();
        assert_eq!(h.dim, 3);
        assert_eq!(h.projector.mul(&h.reps), ExactMatrix::identity(&k, 3));
    }

    #[test]
    fn exact_sequence_is_acyclic() {
        // k --(1,1)--> k^2 --(1,-1)--> k
        let d_in = q(&[vec![1], vec![1]]);
        let d_out = q(&[vec![1, -1]]);
        assert_eq!(cohomology_data(&d_in, &d_out).unwrap().dim, 0);
    }

    #[test]
    fn circle_top_cohomology() {
        // Reduced cochains of the triangle boundary: vertices {1,2,3}, edges 12, 13, 23.
        let d0 = q(&[vec![-1, 1, 0], vec![-1, 0, 1], vec![0, -1, 1]]);
        let zero_out = ExactMatrix::zeros(&Rationals, 0, 3);
        let h1 = cohomology_data(&d0, &zero_out).unwrap();
        assert_eq!(h1.dim, 1);
        let aug = q(&[vec![1], vec![1], vec![1]]);
        assert_eq!(cohomology_data(&aug, &d0).unwrap().dim, 0);
    }

    #[test]
    fn rejects_non_complex() {
        let d_in = q(&[vec![1]]);
        let d_out = q(&[vec![1]]);
        assert_eq!(cohomology_data(&d_in, &d_out).unwrap_err(), Error::NotAComplex);
    }

    #[test]
    fn identity_and_zero_chain_maps() {
        let f2 = PrimeField::new(2).unwrap();
        let d_in = ExactMatrix::zeros(&f2, 2, 1);
        let d_out = ExactMatrix::zeros(&f2, 1, 2);
        let h = cohomology_data(&d_in, &d_out).unwrap();
        let id = ExactMatrix::identity(&f2, 2);
        let slot = ChainMapSlot { prev: None, cur: &id, next: None };
        assert_eq!(induced_map(&slot, &h, &h).unwrap(), ExactMatrix::identity(&f2, 2));
        let z = ExactMatrix::zeros(&f2, 2, 2);
        let slot = ChainMapSlot { prev: None, cur: &z, next: None };
        assert!(induced_map(&slot, &h, &h).unwrap().is_zero());
    }

    #[test]
    fn detects_non_commuting_map() {
        let d = q(&[vec![1], vec![0]]);
        let out = ExactMatrix::zeros(&Rationals, 0, 2);
        let h = cohomology_data(&d, &out).unwrap();
        let swap = q(&[vec![0, 1], vec![1, 0]]);
        let one = q(&[vec![1]]);
        let slot = ChainMapSlot { prev: Some(&one), cur: &swap, next: None };
        assert_eq!(induced_map(&slot, &h, &h).unwrap_err(), Error::NonCommuting);
    }
}
