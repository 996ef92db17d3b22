//! Phase-one simplex over exact rationals with Bland's rule.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub(crate) enum Phase1 {
    /// A nonnegative solution of `A x = b`.
    Feasible(Vec<BigRational>),
    /// `y` with `yᵀA ≤ 0` and `yᵀb = 1`.
    Infeasible(Vec<BigRational>),
}

/// Decides `A x = b, x ≥ 0` for a dense `m × n` matrix.
pub(crate) fn phase1(a: &[Vec<BigRational>], b: &[BigRational], n: usize) -> Phase1 {
    let m = a.len();
    let width = n + m;
    let mut flip = vec![false; m];
    let mut t: Vec<Vec<BigRational>> = Vec::with_capacity(m);
    let mut rhs: Vec<BigRational> = Vec::with_capacity(m);
    for i in 0..m {
        flip[i] = b[i].is_negative();
        let sign = if flip[i] { -BigRational::one() } else { BigRational::one() };
        let mut row: Vec<BigRational> = a[i].iter().map(|v| v * &sign).collect();
        row.resize(width, BigRational::zero());
        row[n + i] = BigRational::one();
        t.push(row);
        rhs.push(&b[i] * &sign);
    }
    let mut basis: Vec<usize> = (n..width).collect();
    // Reduced costs of the phase-one objective `sum of artificials`.
    let mut d: Vec<BigRational> = (0..width)
        .map(|j| if j < n { -t.iter().map(|r| r[j].clone()).sum::<BigRational>() } else { BigRational::zero() })
        .collect();
    let mut obj: BigRational = rhs.iter().sum();

    while let Some(enter) = (0..width).find(|&j| d[j].is_negative()) {
        let mut leave: Option<usize> = None;
        for i in 0..m {
            if !t[i][enter].is_positive() {
                continue;
            }
            let better = match leave {
                None => true,
                Some(l) => {
                    let lhs = &rhs[i] * &t[l][enter];
                    let rhs_l = &rhs[l] * &t[i][enter];
                    lhs < rhs_l || (lhs == rhs_l && basis[i] < basis[l])
                }
            };
            if better {
                leave = Some(i);
            }
        }
        let Some(l) = leave else {
            // Unbounded below is impossible for a sum of nonnegative variables.
            unreachable!("phase-one objective is bounded");
        };
        let piv = t[l][enter].clone();
        for v in t[l].iter_mut() {
            *v /= &piv;
        }
        rhs[l] /= &piv;
        let prow = t[l].clone();
        let prhs = rhs[l].clone();
        for i in 0..m {
            if i == l || t[i][enter].is_zero() {
                continue;
            }
            let f = t[i][enter].clone();
            for (v, p) in t[i].iter_mut().zip(&prow) {
                if !p.is_zero() {
                    *v -= &f * p;
                }
            }
            rhs[i] -= &f * &prhs;
        }
        let f = d[enter].clone();
        for (v, p) in d.iter_mut().zip(&prow) {
            if !p.is_zero() {
                *v -= &f * p;
            }
        }
        obj += &f * &prhs;
        basis[l] = enter;
    }

    if obj.is_zero() {
        let mut x = vec![BigRational::zero(); n];
        for (i, &j) in basis.iter().enumerate() {
            if j < n {
                x[j] = rhs[i].clone();
            }
        }
        Phase1::Feasible(x)
    } else {
        let y = (0..m)
            .map(|k| {
                let dual = BigRational::one() - &d[n + k];
                let dual = if flip[k] { -dual } else { dual };
                dual / &obj
            })
            .collect();
        Phase1::Infeasible(y)
    }
}
