//! Coboundary matrices over graded bases and exact cohomology dimensions.

use crate::diagram::{enumerate_basis, Diagram, EnumLimits, Flavor, Parity};
use crate::differential::delta;
use crate::error::{Error, Result};
use crate::ratmat::RationalMatrix;
use std::collections::BTreeMap;

/// Cohomology of one bidegree: `dim_cohomology = dim_space - rank_out - rank_in`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CohomologyReport {
    pub m: usize,
    pub parity: Parity,
    pub flavor: Flavor,
    pub order: i64,
    pub degree: i64,
    pub dim_space: usize,
    pub rank_in: usize,
    pub rank_out: usize,
    pub dim_cohomology: usize,
}

/// The matrix of the coboundary from `basis_d` to `basis_d_plus_1`: column
/// `j` holds the expansion of `delta(basis_d[j])`.
pub fn delta_matrix(basis_d: &[Diagram], basis_d_plus_1: &[Diagram]) -> Result<RationalMatrix> {
    let index: BTreeMap<&Diagram, usize> = basis_d_plus_1
        .iter()
        .enumerate()
        .map(|(i, d)| (d, i))
        .collect();
    let mut matrix = RationalMatrix::new(basis_d_plus_1.len(), basis_d.len());
    for (j, d) in basis_d.iter().enumerate() {
        let image = delta(d);
        for (img, coeff) in image.terms() {
            let Some(&i) = index.get(img) else {
                return Err(Error::BasisMismatch(format!(
                    "contraction image not in target basis:\n{}",
                    img.to_text()
                )));
            };
            matrix.set(i, j, coeff.clone());
        }
    }
    Ok(matrix)
}

/// Exact cohomology dimension at one bidegree, via ranks of the adjacent
/// coboundary matrices.
pub fn cohomology(
    m: usize,
    parity: Parity,
    flavor: Flavor,
    order: i64,
    degree: i64,
    limits: EnumLimits,
) -> Result<CohomologyReport> {
    let below = if degree > 0 {
        enumerate_basis(m, parity, flavor, order, degree - 1, limits)?
    } else {
        Vec::new()
    };
    let here = enumerate_basis(m, parity, flavor, order, degree, limits)?;
    let above = enumerate_basis(m, parity, flavor, order, degree + 1, limits)?;

    let d_in = delta_matrix(&below, &here)?;
    let d_out = delta_matrix(&here, &above)?;
    let rank_in = d_in.rank();
    let rank_out = d_out.rank();
    let dim_space = here.len();
    Ok(CohomologyReport {
        m,
        parity,
        flavor,
        order,
        degree,
        dim_space,
        rank_in,
        rank_out,
        dim_cohomology: dim_space - rank_out - rank_in,
    })
}

impl CohomologyReport {
    /// One-line tab-separated rendering.
    pub fn tsv(&self) -> String {
        format!(
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            self.m,
            self.parity,
            self.flavor,
            self.order,
            self.degree,
            self.dim_space,
            self.rank_in,
            self.rank_out,
            self.dim_cohomology
        )
    }

    pub fn tsv_header() -> &'static str {
        "m\tparity\tflavor\torder\tdegree\tdim\trank_in\trank_out\tcohomology"
    }
}
