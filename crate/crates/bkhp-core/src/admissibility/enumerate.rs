use num_bigint::BigInt;
use num_rational::BigRational;

use crate::lattices::{polygon_sequence_check, DivisorProfile, PolygonVerdict};

/// The polygon-lemma hypotheses evaluated directly on raw integer vectors:
/// i) each l^n weakly decreasing, ii) Σ_i l_i^n = 0, iii) l^0 = 0,
/// iv) |l_i^{n+1} − l_i^n| ≤ C, v) l_i^n − l_{i+1}^n ≥ C forces
/// P_i(n+1) ≤ P_i(n) for the partial sums P_i = l_1 + ⋯ + l_i.
pub fn polygon_conditions_direct(seq: &[Vec<i64>], c: &BigRational) -> bool {
    let big = |x: i64| BigRational::from_integer(BigInt::from(x));
    let sorted = seq.iter().all(|v| v.windows(2).all(|w| w[0] >= w[1]));
    let balanced = seq.iter().all(|v| v.iter().sum::<i64>() == 0);
    let starts = seq.first().is_none_or(|v| v.iter().all(|x| *x == 0));
    let steps = seq.windows(2).all(|w| w[0].iter().zip(&w[1]).all(|(a, b)| big((b - a).abs()) <= *c));
    let barrier = seq.windows(2).all(|w| {
        (1..w[0].len()).all(|i| {
            let gap = w[0][i - 1] - w[0][i];
            let pa: i64 = w[0][..i].iter().sum();
            let pb: i64 = w[1][..i].iter().sum();
            big(gap) < *c || pb <= pa
        })
    });
    sorted && balanced && starts && steps && barrier
}

/// Summary of an exhaustive enumeration.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PolygonSweep {
    pub cases: u64,
    /// Sequences satisfying i)–v).
    pub satisfying: u64,
    /// Cases where the stepwise checker and the direct evaluation differ.
    pub disagreements: u64,
    /// Satisfying sequences with some |l_i^n| above the bound.
    pub bound_violations: u64,
    pub max_abs_satisfying: i64,
}

/// Enumerates every sequence l^0, …, l^{L−1} in Z^r with 1 ≤ L ≤ max_len,
/// l^0 ∈ [−1, 1]^r and integer steps of size at most C per coordinate, and
/// compares the stepwise checker with the direct evaluation.
pub fn enumerate_polygon_sequences(r: usize, c: i64, max_len: usize) -> PolygonSweep {
    let cr = BigRational::from_integer(BigInt::from(c));
    let mut out = PolygonSweep::default();
    let starts = grid(r, 1);
    let steps = grid(r, c);
    let mut seq: Vec<Vec<i64>> = Vec::with_capacity(max_len);
    for s in &starts {
        seq.push(s.clone());
        walk(&mut seq, &steps, max_len, &cr, &mut out);
        seq.pop();
    }
    out
}

fn grid(r: usize, m: i64) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::new()];
    for _ in 0..r {
        out = out
            .into_iter()
            .flat_map(|v| {
                (-m..=m).map(move |x| {
                    let mut w = v.clone();
                    w.push(x);
                    w
                })
            })
            .collect();
    }
    out
}

fn walk(seq: &mut Vec<Vec<i64>>, steps: &[Vec<i64>], max_len: usize, c: &BigRational, out: &mut PolygonSweep) {
    visit(seq, c, out);
    if seq.len() == max_len {
        return;
    }
    for d in steps {
        let last = seq.last().expect("nonempty");
        let next: Vec<i64> = last.iter().zip(d).map(|(a, b)| a + b).collect();
        seq.push(next);
        walk(seq, steps, max_len, c, out);
        seq.pop();
    }
}

fn visit(seq: &[Vec<i64>], c: &BigRational, out: &mut PolygonSweep) {
    out.cases += 1;
    let direct = polygon_conditions_direct(seq, c);
    let profiles: Option<Vec<DivisorProfile>> = seq.iter().map(|v| DivisorProfile::from_sorted(v.clone()).ok()).collect();
    let checker = match profiles {
        Some(p) => match polygon_sequence_check(&p, c) {
            PolygonVerdict::Ok { bound, respected } => Some((bound, respected)),
            PolygonVerdict::Violation { .. } => None,
        },
        None => None,
    };
    if direct != checker.is_some() {
        out.disagreements += 1;
    }
    if let Some((bound, respected)) = checker.filter(|_| direct) {
        out.satisfying += 1;
        let m = seq.iter().flatten().map(|x| x.abs()).max().unwrap_or(0);
        out.max_abs_satisfying = out.max_abs_satisfying.max(m);
        if !respected || BigRational::from_integer(BigInt::from(m)) > bound {
            out.bound_violations += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_sweep_agrees() {
        let s = enumerate_polygon_sequences(2, 1, 4);
        assert_eq!(s.cases, 9 * (1 + 9 + 81 + 729));
        assert_eq!(s.disagreements, 0);
        assert_eq!(s.bound_violations, 0);
        assert!(s.satisfying > 0);
    }

    #[test]
    fn direct_conditions_examples() {
        let one = BigRational::from_integer(BigInt::from(1));
        assert!(polygon_conditions_direct(&[vec![0, 0], vec![1, -1], vec![1, -1]], &one));
        assert!(!polygon_conditions_direct(&[vec![0, 0], vec![1, -1], vec![2, -2]], &one));
        assert!(!polygon_conditions_direct(&[vec![1, -1]], &one));
        assert!(!polygon_conditions_direct(&[vec![0, 0], vec![-1, 1]], &one));
    }
}
