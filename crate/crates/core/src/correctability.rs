//! Rank-based erasure correctability and the tripartition dimension bound.

use serde::Serialize;

use crate::code::StabilizerCode;
use crate::error::{Error, Result};
use crate::gf2::BinaryMatrix;
use crate::region::Region;

/// Caches the check matrix and its rank for repeated correctability queries.
#[derive(Clone, Debug)]
pub struct RankCriterion {
    n: usize,
    h: BinaryMatrix,
    rank: usize,
}

impl RankCriterion {
    pub fn new(code: &StabilizerCode) -> Self {
        let h = code.check_matrix();
        let rank = h.rank();
        Self { n: code.n(), h, rank }
    }

    fn rank_on(&self, region: &Region) -> usize {
        let cols: Vec<usize> = region.iter().flat_map(|q| [q, self.n + q]).collect();
        self.h.select_columns(&cols).expect("region checked against n").rank()
    }

    /// `2|E| <= rank(H) + rank(H_E) - rank(H_Ē)`.
    pub fn is_correctable(&self, erasure: &Region) -> Result<bool> {
        erasure.check_within(self.n)?;
        let lhs = 2 * erasure.len();
        let rhs = self.rank + self.rank_on(erasure);
        let outside = self.rank_on(&erasure.complement(self.n));
        Ok(lhs + outside <= rhs)
    }
}

/// Erasure correctability via the rank inequality.
pub fn dz_correctable(code: &StabilizerCode, erasure: &Region) -> Result<bool> {
    RankCriterion::new(code).is_correctable(erasure)
}

/// `A ⊔ B ⊔ C = [n]` with `A`, `B` correctable, certifying `k <= |C|`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TripartitionWitness {
    pub a: Region,
    pub b: Region,
    pub c: Region,
    pub k_bound: usize,
}

/// Builds the witness for disjoint correctable `A` and `B`, checking `k <= |C|`.
pub fn dimension_bound_from_tripartition(
    code: &StabilizerCode,
    a: &Region,
    b: &Region,
) -> Result<TripartitionWitness> {
    let n = code.n();
    a.check_within(n)?;
    b.check_within(n)?;
    if !a.is_disjoint(b) {
        return Err(Error::Precondition("regions A and B overlap".into()));
    }
    let criterion = RankCriterion::new(code);
    if !criterion.is_correctable(a)? {
        return Err(Error::Precondition("region A is not correctable".into()));
    }
    if !criterion.is_correctable(b)? {
        return Err(Error::Precondition("region B is not correctable".into()));
    }
    let c = a.union(b).complement(n);
    let k = n - criterion.rank;
    if k > c.len() {
        return Err(Error::Inconsistency(format!("k = {k} exceeds |C| = {}", c.len())));
    }
    Ok(TripartitionWitness { a: a.clone(), b: b.clone(), k_bound: c.len(), c })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::{is_correctable_oracle, make_family, parse_code, Family};

    #[test]
    fn examples() {
        let steane = make_family(Family::Steane, 0).unwrap();
        assert!(dz_correctable(&steane, &Region::empty()).unwrap());
        assert!(dz_correctable(&steane, &Region::from([0, 1])).unwrap());
        let rep = parse_code("ZZI\nIZZ").unwrap();
        assert!(!dz_correctable(&rep, &Region::from([0])).unwrap());
        assert!(!is_correctable_oracle(&rep, &Region::from([0])).unwrap());
    }

    #[test]
    fn tripartition_examples() {
        let steane = make_family(Family::Steane, 0).unwrap();
        let w = dimension_bound_from_tripartition(&steane, &Region::from([0, 1]), &Region::from([2, 3])).unwrap();
        assert_eq!(w.k_bound, 3);
        assert_eq!(w.c, Region::from([4, 5, 6]));
        let w = dimension_bound_from_tripartition(&steane, &Region::empty(), &Region::empty()).unwrap();
        assert_eq!(w.k_bound, 7);
        let rep = parse_code("ZZI\nIZZ").unwrap();
        match dimension_bound_from_tripartition(&rep, &Region::from([0]), &Region::empty()) {
            Err(Error::Precondition(msg)) => assert!(msg.contains('A')),
            other => panic!("{other:?}"),
        }
        match dimension_bound_from_tripartition(&rep, &Region::empty(), &Region::from([2])) {
            Err(Error::Precondition(msg)) => assert!(msg.contains('B')),
            other => panic!("{other:?}"),
        }
        assert!(dimension_bound_from_tripartition(&steane, &Region::from([0]), &Region::from([0])).is_err());
    }

    #[test]
    fn agrees_with_oracle_on_all_regions_small_codes() {
        for (f, s) in [
            (Family::Repetition, 4),
            (Family::FiveQubit, 0),
            (Family::Steane, 0),
            (Family::Surface, 2),
            (Family::Toric, 2),
        ] {
            let code = make_family(f, s).unwrap();
            let crit = RankCriterion::new(&code);
            for mask in 0u64..(1 << code.n()) {
                let e = Region::from_mask(mask);
                assert_eq!(
                    crit.is_correctable(&e).unwrap(),
                    is_correctable_oracle(&code, &e).unwrap(),
                    "{f:?} {e:?}"
                );
            }
        }
    }

    #[test]
    fn monotone_under_subsets() {
        let code = make_family(Family::Surface, 3).unwrap();
        let crit = RankCriterion::new(&code);
        let mut state = 0x9e3779b97f4a7c15u64;
        for _ in 0..300 {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            let e = Region::from_mask(state & ((1 << 13) - 1));
            if crit.is_correctable(&e).unwrap() {
                let sub: Region = e.iter().filter(|q| (state >> (q + 20)) & 1 == 1).collect();
                assert!(crit.is_correctable(&sub).unwrap());
            }
        }
    }
}
