//! Exact symbolic identities: angular-momentum algebra, canonical
//! commutators, and the product rule for `(rᵢ∂ⱼ)(r_k∂_l)`.

use serde::Serialize;

use crate::symop::{Monomial, Scalar, SymOp};
use crate::Axis;

/// Exact comparison of two canonical forms; `mismatched_terms` counts the
/// terms of their difference.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SymbolicCheck {
    pub group: &'static str,
    pub lhs: String,
    pub rhs: String,
    pub mismatched_terms: usize,
    pub pass: bool,
}

fn compare(group: &'static str, lhs_label: String, lhs: &SymOp, rhs: &SymOp) -> SymbolicCheck {
    let mismatched_terms = (lhs - rhs).len();
    SymbolicCheck { group, lhs: lhs_label, rhs: rhs.to_string(), mismatched_terms, pass: mismatched_terms == 0 }
}

fn ihbar() -> Scalar {
    &Scalar::i() * &Scalar::hbar()
}

/// `[Lᵢ, Lⱼ] = iħL_k` for the cyclic triples, `[rᵢ, pⱼ] = iħδᵢⱼ` for all nine
/// pairs, and `(rᵢ∂ⱼ)(r_k∂_l) = rᵢ δⱼₖ ∂_l + rᵢr_k ∂ⱼ∂_l` for all 81 index
/// choices.
pub fn symbolic_suite() -> Vec<SymbolicCheck> {
    let mut out = Vec::new();
    for i in Axis::ALL {
        let (j, k) = i.cyclic_successors();
        let lhs = SymOp::commutator(&SymOp::angular_momentum(i), &SymOp::angular_momentum(j));
        let rhs = SymOp::angular_momentum(k).scale(&ihbar());
        out.push(compare("angular_momentum", format!("[L{i}, L{j}]"), &lhs, &rhs));
    }
    for i in Axis::ALL {
        for j in Axis::ALL {
            let lhs = SymOp::commutator(&SymOp::coord(i), &SymOp::momentum(j));
            let rhs = if i == j { SymOp::scalar(ihbar()) } else { SymOp::zero() };
            out.push(compare("canonical", format!("[{i}, p{j}]"), &lhs, &rhs));
        }
    }
    for i in Axis::ALL {
        for j in Axis::ALL {
            for k in Axis::ALL {
                for l in Axis::ALL {
                    let a = &SymOp::coord(i) * &SymOp::deriv(j);
                    let b = &SymOp::coord(k) * &SymOp::deriv(l);
                    let mut quadratic = Monomial::IDENTITY;
                    quadratic.coord[i.index()] += 1;
                    quadratic.coord[k.index()] += 1;
                    quadratic.deriv[j.index()] += 1;
                    quadratic.deriv[l.index()] += 1;
                    let mut rhs = SymOp::monomial(quadratic);
                    if j == k {
                        rhs = &rhs + &(&SymOp::coord(i) * &SymOp::deriv(l));
                    }
                    out.push(compare("product_rule", format!("({i}∂{j})({k}∂{l})"), &(&a * &b), &rhs));
                }
            }
        }
    }
    out
}
