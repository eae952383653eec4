//! Operators on V^{⊗k}: Casimir pieces Omega_ij, swaps, the trivial projector and xi-legs.
//!
//! Legs are numbered 1..k with leg 1 the most significant tensor factor.
//! Composition is ordinary matrix product, so `a.mul(&b)` applies `b` first.

use crate::exactlin::{kernel_basis, vec_dot, ExactMatrix, GaussRat};
use crate::liealg::LieAlgebraData;
use std::collections::BTreeSet;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TensorError {
    #[error("bad leg index {leg} for k = {k}")]
    BadLeg { leg: usize, k: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TensorSpace {
    pub dim_v: usize,
    pub k: usize,
}

impl TensorSpace {
    pub fn new(dim_v: usize, k: usize) -> Self {
        TensorSpace { dim_v, k }
    }
    pub fn total_dim(&self) -> usize {
        self.dim_v.pow(self.k as u32)
    }
    fn check(&self, leg: usize) -> Result<(), TensorError> {
        if leg == 0 || leg > self.k {
            Err(TensorError::BadLeg { leg, k: self.k })
        } else {
            Ok(())
        }
    }
    fn check_pair(&self, i: usize, j: usize) -> Result<(), TensorError> {
        self.check(i)?;
        self.check(j)?;
        if i >= j {
            return Err(TensorError::BadLeg { leg: j, k: self.k });
        }
        Ok(())
    }
    /// Multi-index digits of a flat index, leg 1 first.
    pub fn digits(&self, mut idx: usize) -> Vec<usize> {
        let mut d = vec![0; self.k];
        for slot in d.iter_mut().rev() {
            *slot = idx % self.dim_v;
            idx /= self.dim_v;
        }
        d
    }
    pub fn flat(&self, digits: &[usize]) -> usize {
        digits.iter().fold(0, |acc, &x| acc * self.dim_v + x)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LegOperator {
    pub matrix: ExactMatrix,
    pub legs: BTreeSet<usize>,
    pub label: String,
}

/// Place an operator on V into leg `leg`.
pub fn embed_single(space: TensorSpace, op: &ExactMatrix, leg: usize) -> Result<ExactMatrix, TensorError> {
    space.check(leg)?;
    let before = ExactMatrix::identity(space.dim_v.pow(leg as u32 - 1));
    let after = ExactMatrix::identity(space.dim_v.pow((space.k - leg) as u32));
    Ok(before.kron(op).kron(&after))
}

/// Place an operator on V⊗V into legs (i, j), with its first factor on leg i.
pub fn embed_pair(space: TensorSpace, op: &ExactMatrix, i: usize, j: usize) -> Result<ExactMatrix, TensorError> {
    space.check_pair(i, j)?;
    let d = space.dim_v;
    let n = space.total_dim();
    let mut out = ExactMatrix::zeros(n, n);
    for col in 0..n {
        let digits = space.digits(col);
        let src = digits[i - 1] * d + digits[j - 1];
        // op column `src` gives the image of e_a ⊗ e_b
        for r in 0..d * d {
            let v = op.get(r, src);
            if v.is_zero() {
                continue;
            }
            let mut nd = digits.clone();
            nd[i - 1] = r / d;
            nd[j - 1] = r % d;
            out.add_at(space.flat(&nd), col, &v);
        }
    }
    Ok(out)
}

pub fn swap_on_vv(dim_v: usize) -> ExactMatrix {
    let mut s = ExactMatrix::zeros(dim_v * dim_v, dim_v * dim_v);
    for a in 0..dim_v {
        for b in 0..dim_v {
            s.set(b * dim_v + a, a * dim_v + b, GaussRat::one());
        }
    }
    s
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum OmegaPart {
    Full,
    K,
    P,
}

impl OmegaPart {
    fn tag(self) -> &'static str {
        match self {
            OmegaPart::Full => "Omega",
            OmegaPart::K => "Omega_k",
            OmegaPart::P => "Omega_p",
        }
    }
}

/// Sum of b ⊗ b* over the chosen part of the basis, on V⊗V.
pub fn omega_on_vv(data: &LieAlgebraData, part: OmegaPart) -> ExactMatrix {
    let d = data.dim_v;
    let mut acc = ExactMatrix::zeros(d * d, d * d);
    let mut add = |bs: &[ExactMatrix], ds: &[ExactMatrix]| {
        for (b, bd) in bs.iter().zip(ds) {
            acc = acc.add(&b.kron(bd));
        }
    };
    if part != OmegaPart::P {
        add(&data.basis_k, &data.duals_k);
    }
    if part != OmegaPart::K {
        add(&data.basis_p, &data.duals_p);
    }
    acc
}

/// Projector onto the g-invariant line of V⊗V along the sum of the other isotypic pieces.
///
/// Built from the invariant vectors of the diagonal action and of its transpose, so it
/// never looks at Omega.
pub fn trivial_projector_on_vv(data: &LieAlgebraData) -> ExactMatrix {
    let d = data.dim_v;
    let id = ExactMatrix::identity(d);
    let basis = data.basis();
    let dd = d * d;
    let mut stacked = ExactMatrix::zeros(basis.len() * dd, dd);
    let mut stacked_t = ExactMatrix::zeros(basis.len() * dd, dd);
    for (o, b) in basis.iter().enumerate() {
        let act = b.kron(&id).add(&id.kron(b));
        for (i, j, v) in act.entries() {
            stacked.set(o * dd + i, j, v.clone());
            stacked_t.set(o * dd + j, i, v.clone());
        }
    }
    let w = kernel_basis(&stacked);
    let u = kernel_basis(&stacked_t);
    assert!(w.len() == 1 && u.len() == 1, "V⊗V must contain exactly one trivial line");
    let w = &w[0];
    let u = &u[0];
    // plain bilinear pairing u^T w, so undo the conjugation vec_dot applies on the left
    let uc: Vec<GaussRat> = u.iter().map(|x| x.conj()).collect();
    let s = vec_dot(&uc, w);
    let s_inv = s.inv().expect("invariant vector and covector pair nontrivially");
    let mut pr = ExactMatrix::zeros(dd, dd);
    for (i, wi) in w.iter().enumerate() {
        if wi.is_zero() {
            continue;
        }
        for (j, uj) in u.iter().enumerate() {
            if !uj.is_zero() {
                pr.set(i, j, wi * uj * &s_inv);
            }
        }
    }
    pr
}

pub fn build_swap(space: TensorSpace, i: usize, j: usize) -> Result<LegOperator, TensorError> {
    Ok(LegOperator {
        matrix: embed_pair(space, &swap_on_vv(space.dim_v), i, j)?,
        legs: [i, j].into_iter().collect(),
        label: format!("swap({i},{j})"),
    })
}

/// Trivial projector on legs (i, i+1).
pub fn build_trivial_projector(space: TensorSpace, data: &LieAlgebraData, i: usize) -> Result<LegOperator, TensorError> {
    build_trivial_projector_pair(space, data, i, i + 1)
}

pub fn build_trivial_projector_pair(space: TensorSpace, data: &LieAlgebraData, i: usize, j: usize) -> Result<LegOperator, TensorError> {
    Ok(LegOperator {
        matrix: embed_pair(space, &trivial_projector_on_vv(data), i, j)?,
        legs: [i, j].into_iter().collect(),
        label: format!("pr({i},{j})"),
    })
}

pub fn build_omega(space: TensorSpace, data: &LieAlgebraData, i: usize, j: usize, part: OmegaPart) -> Result<LegOperator, TensorError> {
    Ok(LegOperator {
        matrix: embed_pair(space, &omega_on_vv(data, part), i, j)?,
        legs: [i, j].into_iter().collect(),
        label: format!("{}({i},{j})", part.tag()),
    })
}

pub fn build_xi_leg(space: TensorSpace, data: &LieAlgebraData, i: usize) -> Result<LegOperator, TensorError> {
    Ok(LegOperator {
        matrix: embed_single(space, &data.xi, i)?,
        legs: [i].into_iter().collect(),
        label: format!("xi({i})"),
    })
}

/// Gram matrix of the defining invariant form on V (J for Sp, diag(I_p,-I_q) for O(p,q)).
pub fn v_form(data: &LieAlgebraData) -> ExactMatrix {
    let d = data.dim_v;
    if data.spec.family == "sp" {
        let n = d / 2;
        let mut m = ExactMatrix::zeros(d, d);
        for i in 0..n {
            m.set(i, n + i, GaussRat::one());
            m.set(n + i, i, GaussRat::int(-1));
        }
        m
    } else {
        data.xi.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liealg::{build_algebra, GroupSpec};
    use crate::exactlin::rank;
    use proptest::prelude::*;

    fn product_vector(space: TensorSpace, parts: &[Vec<i64>]) -> Vec<GaussRat> {
        let mut v = vec![GaussRat::one()];
        for p in parts {
            let mut nv = Vec::with_capacity(v.len() * space.dim_v);
            for a in &v {
                for b in p {
                    nv.push(a * &GaussRat::int(*b));
                }
            }
            v = nv;
        }
        v
    }

    #[test]
    fn swap_basics() {
        let sp = TensorSpace::new(3, 3);
        let s = build_swap(sp, 1, 2).unwrap().matrix;
        assert_eq!(s.mul(&s), ExactMatrix::identity(27));
        let (u, v, w) = (vec![1, 2, 0], vec![0, 1, 3], vec![5, 0, 1]);
        let x = product_vector(sp, &[u.clone(), v.clone(), w.clone()]);
        assert_eq!(s.mul_vec(&x), product_vector(sp, &[v, u, w]));
        assert!(build_swap(sp, 2, 2).is_err());
        assert!(build_swap(sp, 0, 2).is_err());
        assert!(build_swap(sp, 1, 4).is_err());
    }

    #[test]
    fn omega_decomposes() {
        for spec in [GroupSpec::sp(2), GroupSpec::opq(3, 2), GroupSpec::sp(1)] {
            let data = build_algebra(&spec).unwrap();
            let s2 = TensorSpace::new(data.dim_v, 2);
            let om = build_omega(s2, &data, 1, 2, OmegaPart::Full).unwrap().matrix;
            let ok = build_omega(s2, &data, 1, 2, OmegaPart::K).unwrap().matrix;
            let op = build_omega(s2, &data, 1, 2, OmegaPart::P).unwrap().matrix;
            assert_eq!(om, ok.add(&op));
            let sw = build_swap(s2, 1, 2).unwrap().matrix;
            let pr = build_trivial_projector(s2, &data, 1).unwrap().matrix;
            assert_eq!(om, sw.add(&pr.scale(&data.m0)), "{spec}");
            assert_eq!(pr.mul(&pr), pr);
            assert_eq!(rank(&pr), 1);
        }
        let sp4 = build_algebra(&GroupSpec::sp(2)).unwrap();
        assert_eq!(sp4.m0, GaussRat::int(-4));
        let o = build_algebra(&GroupSpec::opq(3, 2)).unwrap();
        assert_eq!(o.m0, GaussRat::int(-5));
    }

    #[test]
    fn projector_properties() {
        for spec in [GroupSpec::sp(2), GroupSpec::opq(3, 2)] {
            let data = build_algebra(&spec).unwrap();
            let d = data.dim_v;
            let pr = trivial_projector_on_vv(&data);
            let id = ExactMatrix::identity(d);
            for b in data.basis() {
                assert!(b.kron(&id).add(&id.kron(&b)).mul(&pr).is_zero());
            }
            let sw = swap_on_vv(d);
            let sigma = if spec.family == "sp" { -1 } else { 1 };
            assert_eq!(pr.mul(&sw), pr.scale(&GaussRat::int(sigma)));
            assert_eq!(sw.mul(&pr), pr.scale(&GaussRat::int(sigma)));
            let g = v_form(&data);
            let g2 = g.kron(&g);
            assert_eq!(pr.adjoint().mul(&g2), g2.mul(&pr));
        }
    }

    #[test]
    fn swap_conjugates_omega() {
        let data = build_algebra(&GroupSpec::sp(1)).unwrap();
        let s3 = TensorSpace::new(2, 3);
        let sw = build_swap(s3, 1, 2).unwrap().matrix;
        let o13 = build_omega(s3, &data, 1, 3, OmegaPart::Full).unwrap().matrix;
        let o23 = build_omega(s3, &data, 2, 3, OmegaPart::Full).unwrap().matrix;
        assert_eq!(sw.mul(&o13).mul(&sw), o23);
    }

    #[test]
    fn xi_legs() {
        let data = build_algebra(&GroupSpec::sp(2)).unwrap();
        let s3 = TensorSpace::new(4, 3);
        let x1 = build_xi_leg(s3, &data, 1).unwrap().matrix;
        let x2 = build_xi_leg(s3, &data, 2).unwrap().matrix;
        let x3 = build_xi_leg(s3, &data, 3).unwrap().matrix;
        assert_eq!(x3.mul(&x3), ExactMatrix::identity(64));
        let o12 = build_omega(s3, &data, 1, 2, OmegaPart::Full).unwrap().matrix;
        assert_eq!(x3.mul(&o12), o12.mul(&x3));
        let ok = build_omega(s3, &data, 1, 2, OmegaPart::K).unwrap().matrix;
        let op = build_omega(s3, &data, 1, 2, OmegaPart::P).unwrap().matrix;
        let x12 = x1.mul(&x2);
        assert_eq!(x12.mul(&ok).mul(&x12), ok);
        assert_eq!(x12.mul(&op).mul(&x12), op);
        // a single xi-leg fixes the k-part and negates the p-part
        assert_eq!(x2.mul(&ok).mul(&x2), ok);
        assert_eq!(x2.mul(&op).mul(&x2), op.neg());
        assert!(build_xi_leg(s3, &data, 4).is_err());
    }

    proptest! {
        #[test]
        fn embedded_operators_act_on_their_legs(a in proptest::collection::vec(-3i64..4, 2),
                                                b in proptest::collection::vec(-3i64..4, 2),
                                                c in proptest::collection::vec(-3i64..4, 2)) {
            let data = build_algebra(&GroupSpec::sp(1)).unwrap();
            let s3 = TensorSpace::new(2, 3);
            let x2 = build_xi_leg(s3, &data, 2).unwrap().matrix;
            let xb = data.xi.mul_vec(&b.iter().map(|&t| GaussRat::int(t)).collect::<Vec<_>>());
            let lhs = x2.mul_vec(&product_vector(s3, &[a.clone(), b.clone(), c.clone()]));
            // build the expected product with complex middle factor
            let mut want = Vec::new();
            for ai in &a { for bi in &xb { for ci in &c {
                want.push(GaussRat::int(*ai) * bi * GaussRat::int(*ci));
            }}}
            prop_assert_eq!(lhs, want);
            let s13 = build_swap(s3, 1, 3).unwrap().matrix;
            prop_assert_eq!(s13.mul_vec(&product_vector(s3, &[a.clone(), b.clone(), c.clone()])), product_vector(s3, &[c, b, a]));
        }
    }
}
