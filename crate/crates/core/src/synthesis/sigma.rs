use faer::Mat;

use super::VarianceProfile;
use crate::error::{Error, Result};
use crate::lattice::Region;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RankStructure {
    /// A single outer product `vec(Σ_r)·vec(Σ_s)ᵀ`.
    Rank1,
    /// `vec(Σ_r,in)·vec(Σ_s,in)ᵀ + vec(Σ_r,out)·vec(Σ_s,out)ᵀ`: no coupling
    /// between propagating and evanescent modes.
    InOutSum,
}

/// Amplitude matrix `Σ` (`n_r × n_s`) that scales the white angular
/// coefficients entry by entry.
///
/// `Σ[i, j] = σ_r(i)·σ_s(j)`, so the power of entry `(i, j)` is
/// `σ²_r(i)·σ²_s(j)`: the variances decouple into a receive and a source
/// factor.
#[derive(Debug, Clone, PartialEq)]
pub struct CoupledSigma {
    matrix: Mat<f64>,
    structure: RankStructure,
    row_regions: Vec<Region>,
    col_regions: Vec<Region>,
}

impl CoupledSigma {
    pub fn matrix(&self) -> &Mat<f64> {
        &self.matrix
    }

    pub fn structure(&self) -> RankStructure {
        self.structure
    }

    pub fn row_regions(&self) -> &[Region] {
        &self.row_regions
    }

    pub fn col_regions(&self) -> &[Region] {
        &self.col_regions
    }

    pub fn nrows(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.matrix.ncols()
    }
}

/// Receive/source coupling without cross-region terms.
///
/// Entries linking an Inner mode on one side to an Outer mode on the other
/// are exactly zero. When neither side has Outer power the result is the
/// plain rank-one product.
pub fn couple_sigma(sr: &VarianceProfile, ss: &VarianceProfile) -> Result<CoupledSigma> {
    check_policy(sr, ss)?;
    let ar = sr.amplitudes();
    let as_ = ss.amplitudes();
    let (rr, rs) = (sr.regions(), ss.regions());
    let matrix = Mat::from_fn(ar.len(), as_.len(), |i, j| {
        if rr[i] == rs[j] {
            ar[i] * as_[j]
        } else {
            0.0
        }
    });
    let outer_power = |p: &VarianceProfile| {
        p.variances()
            .iter()
            .zip(p.regions())
            .any(|(v, r)| *r == Region::Outer && *v > 0.0)
    };
    let structure = if outer_power(sr) && outer_power(ss) {
        RankStructure::InOutSum
    } else {
        RankStructure::Rank1
    };
    Ok(CoupledSigma {
        matrix,
        structure,
        row_regions: rr.to_vec(),
        col_regions: rs.to_vec(),
    })
}

/// Full outer product `vec(Σ_r)·vec(Σ_s)ᵀ`, cross-region terms included.
pub fn couple_sigma_full(sr: &VarianceProfile, ss: &VarianceProfile) -> Result<CoupledSigma> {
    check_policy(sr, ss)?;
    let ar = sr.amplitudes();
    let as_ = ss.amplitudes();
    Ok(CoupledSigma {
        matrix: Mat::from_fn(ar.len(), as_.len(), |i, j| ar[i] * as_[j]),
        structure: RankStructure::Rank1,
        row_regions: sr.regions().to_vec(),
        col_regions: ss.regions().to_vec(),
    })
}

fn check_policy(sr: &VarianceProfile, ss: &VarianceProfile) -> Result<()> {
    if sr.is_empty() || ss.is_empty() {
        return Err(Error::Empty("variance profile"));
    }
    // Both sides must truncate the annulus with the same noise floor.
    let (a, b) = (sr.kz_max(), ss.kz_max());
    if (a - b).abs() > 1e-12 * a.max(b).max(1.0) {
        return Err(Error::DimensionMismatch(format!(
            "receive and source supports use different kz_max ({a} vs {b} rad/m)"
        )));
    }
    Ok(())
}
