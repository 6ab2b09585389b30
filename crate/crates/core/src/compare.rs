//! Isometry-class verdicts from invariants.
//!
//! Indefinite lattices are never searched: two even lattices with equal
//! signature and isomorphic discriminant forms are declared isometric only
//! when the uniqueness criterion holds.

use crate::discriminant::{discriminant_form, fqf_isomorphic, FqfVerdict};
use crate::enumerate::{definite_isometric, uniqueness_criterion, IsometryVerdict};
use crate::error::Result;
use crate::lattice::{Invariants, Lattice};
use num_traits::Signed;
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassVerdict {
    Isometric,
    /// Invariants agree but the uniqueness criterion fails.
    InvariantsMatch,
    Different,
    Inconclusive,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassComparison {
    pub verdict: ClassVerdict,
    pub reason: String,
    pub left: Invariants,
    pub right: Invariants,
}

impl ClassComparison {
    pub fn isometric(&self) -> bool {
        self.verdict == ClassVerdict::Isometric
    }
}

pub fn compare_classes(a: &Lattice, b: &Lattice) -> Result<ClassComparison> {
    let (ia, ib) = (a.invariants(), b.invariants());
    let done = |v: ClassVerdict, r: &str| {
        Ok(ClassComparison { verdict: v, reason: r.to_string(), left: ia.clone(), right: ib.clone() })
    };
    if a.rank() != b.rank() {
        return done(ClassVerdict::Different, "ranks differ");
    }
    if ia.signature != ib.signature {
        return done(ClassVerdict::Different, "signatures differ");
    }
    if ia.det.abs() != ib.det.abs() {
        return done(ClassVerdict::Different, "determinants differ");
    }
    if ia.even != ib.even {
        return done(ClassVerdict::Different, "parity differs");
    }
    if !ia.even {
        return done(ClassVerdict::Inconclusive, "odd lattices are not compared");
    }
    let (qa, qb) = (discriminant_form(a)?, discriminant_form(b)?);
    match fqf_isomorphic(&qa, &qb) {
        FqfVerdict::NotIsomorphic { reason } => {
            return done(ClassVerdict::Different, &format!("discriminant forms differ: {reason}"))
        }
        FqfVerdict::Inconclusive { reason } => return done(ClassVerdict::Inconclusive, &reason),
        FqfVerdict::Isomorphic { .. } => {}
    }
    if a.definiteness().is_some() {
        return match definite_isometric(a, b)? {
            IsometryVerdict::Isometric { .. } => done(ClassVerdict::Isometric, "explicit isometry found"),
            IsometryVerdict::NotIsometric { reason } => done(ClassVerdict::Different, &reason),
            IsometryVerdict::Inconclusive { reason } => {
                done(ClassVerdict::InvariantsMatch, &format!("definite search: {reason}"))
            }
        };
    }
    if uniqueness_criterion(a) {
        done(ClassVerdict::Isometric, "same signature and discriminant form, uniqueness criterion holds")
    } else {
        done(ClassVerdict::InvariantsMatch, "uniqueness criterion fails, isometry undecided")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atlas::{nikulin, rank1, u};

    #[test]
    fn swapped_rank_one_summands() {
        // <4> + <-2> and <2> + <-4> are both U-free, definite-free and of length 2
        let a = rank1(4).direct_sum(&rank1(-2)).direct_sum(&u());
        let b = rank1(2).direct_sum(&rank1(-4)).direct_sum(&u());
        assert!(compare_classes(&a, &b).unwrap().isometric());
        let c = u().direct_sum(&nikulin());
        let d = u().direct_sum(&crate::atlas::e8().scaled(2));
        assert_eq!(compare_classes(&c, &d).unwrap().verdict, ClassVerdict::Different);
    }
}
