use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::lattices::wlattice::DivisorProfile;

/// Which hypothesis of the polygon lemma failed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Hypothesis {
    /// Profiles weakly decreasing.
    Decreasing,
    /// Σ_i l_i^n = 0.
    ZeroSum,
    /// l^0 = 0.
    StartsAtZero,
    /// |l_i^{n+1} − l_i^n| ≤ C.
    BoundedStep,
    /// A gap l_i − l_{i+1} ≥ C forbids the partial sum P(i) from increasing.
    GapBarrier,
    /// All profiles have the same rank.
    Rank,
}

impl fmt::Display for Hypothesis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Hypothesis::Decreasing => "i",
            Hypothesis::ZeroSum => "ii",
            Hypothesis::StartsAtZero => "iii",
            Hypothesis::BoundedStep => "iv",
            Hypothesis::GapBarrier => "v",
            Hypothesis::Rank => "rank",
        };
        write!(f, "{s}")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PolygonVerdict {
    /// All hypotheses hold; the bound C′ = (3/2)·C·(r−1) and whether every
    /// |l_i^n| respects it.
    Ok { bound: BigRational, respected: bool },
    Violation { step: usize, index: usize, hypothesis: Hypothesis },
}

/// Checks the hypotheses of the polygon lemma stepwise on l^0, l^1, …
/// Indices in violations are 1-based; `step` is the n of the later profile.
pub fn polygon_sequence_check(l: &[DivisorProfile], c: &BigRational) -> PolygonVerdict {
    let viol = |step, index, hypothesis| PolygonVerdict::Violation { step, index, hypothesis };
    let r = l.first().map_or(0, |x| x.rank());
    for (n, prof) in l.iter().enumerate() {
        if prof.rank() != r {
            return viol(n, 0, Hypothesis::Rank);
        }
        if let Some(i) = prof.values().windows(2).position(|w| w[0] < w[1]) {
            return viol(n, i + 1, Hypothesis::Decreasing);
        }
        if prof.sum() != 0 {
            return viol(n, 0, Hypothesis::ZeroSum);
        }
    }
    if let Some(first) = l.first() {
        if let Some(i) = first.values().iter().position(|x| *x != 0) {
            return viol(0, i + 1, Hypothesis::StartsAtZero);
        }
    }
    let big = |x: i64| BigRational::from_integer(BigInt::from(x));
    for n in 0..l.len().saturating_sub(1) {
        let (a, b) = (l[n].values(), l[n + 1].values());
        for i in 0..r {
            if big((b[i] - a[i]).abs()) > *c {
                return viol(n + 1, i + 1, Hypothesis::BoundedStep);
            }
        }
        let (mut pa, mut pb) = (0i64, 0i64);
        for i in 0..r.saturating_sub(1) {
            pa += a[i];
            pb += b[i];
            if big(a[i] - a[i + 1]) >= *c && pb > pa {
                return viol(n + 1, i + 1, Hypothesis::GapBarrier);
            }
        }
    }
    let bound = BigRational::new(BigInt::from(3), BigInt::from(2)) * c * big(r.saturating_sub(1) as i64);
    let respected = l.iter().all(|p| big(p.max_abs()) <= bound);
    PolygonVerdict::Ok { bound, respected }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn prof(v: &[i64]) -> DivisorProfile {
        DivisorProfile::from_sorted(v.to_vec()).unwrap()
    }
    fn one() -> BigRational {
        BigRational::from_integer(BigInt::from(1))
    }

    #[test]
    fn zero_sequences() {
        let seq = vec![prof(&[0, 0, 0]); 5];
        match polygon_sequence_check(&seq, &BigRational::new(5.into(), 3.into())) {
            PolygonVerdict::Ok { bound, respected } => {
                assert!(respected);
                assert_eq!(bound, BigRational::from_integer(5.into()));
            }
            v => panic!("{v:?}"),
        }
    }

    #[test]
    fn linear_drift_violates_gap_barrier() {
        let seq: Vec<_> = (0..4).map(|n| prof(&[n, -n])).collect();
        assert_eq!(
            polygon_sequence_check(&seq, &one()),
            PolygonVerdict::Violation { step: 2, index: 1, hypothesis: Hypothesis::GapBarrier }
        );
    }

    #[test]
    fn other_hypotheses() {
        let c = one();
        let v = polygon_sequence_check(&[prof(&[1, -1])], &c);
        assert!(matches!(v, PolygonVerdict::Violation { hypothesis: Hypothesis::StartsAtZero, .. }));
        let v = polygon_sequence_check(&[prof(&[0, 0]), prof(&[2, -2])], &c);
        assert!(matches!(v, PolygonVerdict::Violation { hypothesis: Hypothesis::BoundedStep, .. }));
        let v = polygon_sequence_check(&[prof(&[0, 0]), prof(&[1, 0])], &c);
        assert!(matches!(v, PolygonVerdict::Violation { hypothesis: Hypothesis::ZeroSum, .. }));
        let bad = DivisorProfile::new(vec![0, 0]);
        let unsorted = DivisorProfile::from_sorted(vec![-1, 1]);
        assert!(unsorted.is_err());
        assert!(matches!(polygon_sequence_check(&[bad], &c), PolygonVerdict::Ok { .. }));
    }

    /// Every rank-2 sequence of length ≤ 6 with C = 1 that satisfies the
    /// hypotheses stays within 3/2.
    #[test]
    fn exhaustive_rank_two() {
        let c = one();
        let bound = BigRational::new(3.into(), 2.into());
        let mut checked = 0usize;
        let mut stack: Vec<Vec<i64>> = vec![vec![0]];
        while let Some(seq) = stack.pop() {
            let profs: Vec<_> = seq.iter().map(|x| prof(&[*x, -*x])).collect();
            if let PolygonVerdict::Ok { bound: b, respected } = polygon_sequence_check(&profs, &c) {
                assert_eq!(b, bound);
                assert!(respected, "{seq:?}");
                checked += 1;
                if seq.len() < 6 {
                    let last = *seq.last().unwrap();
                    for d in -1..=1 {
                        let mut s = seq.clone();
                        s.push(last + d);
                        if last + d >= 0 {
                            stack.push(s);
                        }
                    }
                }
            }
        }
        assert!(checked > 6);
    }

    /// All 9^5 step patterns (Δl_1, Δl_2) ∈ {−1,0,1}² from l^0 = 0; the
    /// checker filters the hypotheses and the bound must hold on survivors.
    #[test]
    fn exhaustive_unpruned() {
        let c = one();
        let mut survivors = 0;
        for code in 0..9usize.pow(5) {
            let mut seq = vec![prof(&[0, 0])];
            let (mut a, mut b) = (0i64, 0i64);
            let mut k = code;
            let mut sorted = true;
            for _ in 0..5 {
                a += (k % 3) as i64 - 1;
                b += ((k / 3) % 3) as i64 - 1;
                k /= 9;
                match DivisorProfile::from_sorted(vec![a, b]) {
                    Ok(p) => seq.push(p),
                    Err(_) => sorted = false,
                }
            }
            if !sorted {
                continue;
            }
            if let PolygonVerdict::Ok { respected, .. } = polygon_sequence_check(&seq, &c) {
                assert!(respected, "{seq:?}");
                survivors += 1;
            }
        }
        assert!(survivors > 1);
    }
}
