//! Invariant Hermitian forms on model spaces: the induced form, an exact solver for all
//! invariant forms, radicals and Langlands quotients, and the one-sided non-unitarity test.

use crate::exactlin::{hermitian_signature, kernel_basis, rank, vec_dot, ExactMatrix, ExactVector, GaussRat, Signature, SubspaceCoords};
use crate::psmodel::{ModelError, ModelSpace, Ordering, PsSpec, Side};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FormError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("form is not invariant under {0}")]
    NotInvariantForm(String),
    #[error("generator {0} does not descend to the quotient")]
    DoesNotDescend(String),
}

/// A Hermitian Gram matrix on the model's working basis: <x, y> = x^H gram y.
#[derive(Clone, Debug)]
pub struct HermForm {
    pub gram: ExactMatrix,
    /// <cyclic, cyclic>
    pub normalization: GaussRat,
}

impl HermForm {
    pub fn new(gram: ExactMatrix, cyclic: usize) -> Self {
        let normalization = if gram.rows() > cyclic { gram.get(cyclic, cyclic) } else { GaussRat::zero() };
        HermForm { gram, normalization }
    }
    pub fn signature(&self) -> Signature {
        hermitian_signature(&self.gram).expect("gram is Hermitian")
    }
    pub fn radical(&self) -> Vec<ExactVector> {
        kernel_basis(&self.gram)
    }
    pub fn is_positive_definite(&self) -> bool {
        let s = self.signature();
        s.n_minus == 0 && s.n_zero == 0
    }
    pub fn is_indefinite(&self) -> bool {
        let s = self.signature();
        s.n_plus > 0 && s.n_minus > 0
    }
}

/// Generators paired with the matrix of their star image.
///
/// t, theta and e are self-adjoint; z~ = (z - w0 z w0)/2 is skew.
pub fn star_pairs(model: &ModelSpace) -> Vec<(String, ExactMatrix, ExactMatrix)> {
    let l = model.legs();
    let dim = model.dim();
    let mut out = Vec::new();
    for (name, g) in &model.gens {
        if name.starts_with('t') || name.starts_with('e') {
            // t and theta are involutions, so w* = w^{-1} = w
            out.push((name.clone(), g.clone(), g.clone()));
        }
    }
    let w0 = (1..=l).fold(ExactMatrix::identity(dim), |acc, j| acc.mul(&model.gens[&format!("theta{j}")]));
    let half = GaussRat::frac(1, 2);
    for i in 1..=l {
        let z = &model.gens[&format!("z{i}")];
        let zt = z.sub(&w0.mul(z).mul(&w0)).scale(&half);
        out.push((format!("ztilde{i}"), zt.clone(), zt.neg()));
    }
    out
}

/// Gram of the working basis under the standard dot product on each leg, with <1, 1> = 1.
pub fn induced_form(model: &ModelSpace) -> HermForm {
    let b = &model.labeled_basis;
    let n = b.len();
    let mut g = ExactMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            g.set(i, j, vec_dot(&b[i], &b[j]));
        }
    }
    HermForm::new(g, model.cyclic)
}

/// (generator, pi(g)^H G = G pi(g*)) for every generator.
pub fn check_star_invariance(model: &ModelSpace, form: &HermForm) -> Vec<(String, bool)> {
    star_pairs(model).into_iter().map(|(name, g, gs)| (name, g.adjoint().mul(&form.gram) == form.gram.mul(&gs))).collect()
}

/// Hermitian matrices spanning the real form space: E_ii, E_ij + E_ji, i(E_ij - E_ji).
fn hermitian_basis(n: usize) -> Vec<ExactMatrix> {
    let mut out = Vec::new();
    for i in 0..n {
        for j in i..n {
            if i == j {
                out.push(ExactMatrix::unit(n, i + 1, j + 1));
            } else {
                let mut a = ExactMatrix::unit(n, i + 1, j + 1);
                a.set(j, i, GaussRat::one());
                out.push(a);
                let mut b = ExactMatrix::zeros(n, n);
                b.set(i, j, GaussRat::i());
                b.set(j, i, -GaussRat::i());
                out.push(b);
            }
        }
    }
    out
}

/// Real basis of all Hermitian G with pi(g)^H G = G pi(g*) for every generator.
pub fn solve_invariant_form(model: &ModelSpace) -> Vec<HermForm> {
    let n = model.dim();
    let basis = hermitian_basis(n);
    let pairs = star_pairs(model);
    // one column per Hermitian basis element; rows are real and imaginary parts of all residual entries
    let rows_per = pairs.len() * n * n;
    let mut m = ExactMatrix::zeros(2 * rows_per, basis.len());
    for (col, e) in basis.iter().enumerate() {
        let mut off = 0;
        for (_, g, gs) in &pairs {
            let r = g.adjoint().mul(e).sub(&e.mul(gs));
            for (i, j, v) in r.entries() {
                let idx = off + i * n + j;
                m.set(idx, col, GaussRat::from_rat(v.re.clone()));
                m.set(rows_per + idx, col, GaussRat::from_rat(v.im.clone()));
            }
            off += n * n;
        }
    }
    kernel_basis(&m)
        .into_iter()
        .map(|x| {
            let mut g = ExactMatrix::zeros(n, n);
            for (c, e) in x.iter().zip(&basis) {
                if !c.is_zero() {
                    g.add_scaled(e, c);
                }
            }
            let c = g.get(model.cyclic, model.cyclic);
            if let Some(inv) = c.inv() {
                g = g.scale(&inv);
            }
            HermForm::new(g, model.cyclic)
        })
        .collect()
}

/// Quotient of a model by the radical of an invariant form.
#[derive(Clone, Debug)]
pub struct Quotient {
    pub dim: usize,
    pub radical_dim: usize,
    pub form: HermForm,
    /// Generator matrices on the chosen complement, in model generator order.
    pub gens: Vec<(String, ExactMatrix)>,
}

pub fn langlands_quotient(model: &ModelSpace, form: &HermForm) -> Result<Quotient, FormError> {
    for (name, ok) in check_star_invariance(model, form) {
        if !ok {
            return Err(FormError::NotInvariantForm(name));
        }
    }
    let n = model.dim();
    let rad = form.radical();
    // complement: greedily add unit vectors independent of the radical
    let mut all = rad.clone();
    let mut comp = Vec::new();
    for i in 0..n {
        let e = ExactMatrix::identity(n).column(i);
        let mut trial = all.clone();
        trial.push(e.clone());
        if rank(&ExactMatrix::from_columns(n, &trial)) == trial.len() {
            all = trial;
            comp.push(i);
        }
    }
    let full = SubspaceCoords::new(n, &all).map_err(ModelError::from)?;
    let r = rad.len();
    let mut gens = Vec::new();
    for (name, g) in &model.gens {
        // radical must map into radical
        for v in &rad {
            let c = full.coords(&g.mul_vec(v)).expect("full basis");
            if c[r..].iter().any(|x| !x.is_zero()) {
                return Err(FormError::DoesNotDescend(name.clone()));
            }
        }
        let q = comp.len();
        let mut m = ExactMatrix::zeros(q, q);
        for (a, &i) in comp.iter().enumerate() {
            let c = full.coords(&g.column(i)).expect("full basis");
            for b in 0..q {
                m.set(b, a, c[r + b].clone());
            }
        }
        gens.push((name.clone(), m));
    }
    let q = comp.len();
    let gram = form.gram.select(&comp, &comp);
    let qform = HermForm { normalization: form.normalization.clone(), gram };
    debug_assert_eq!(rank(&qform.gram), q);
    Ok(Quotient { dim: q, radical_dim: r, form: qform, gens })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    #[serde(rename = "NOT_UNITARY")]
    NotUnitary,
    #[serde(rename = "UNKNOWN")]
    Unknown,
}

#[derive(Clone, Debug, Serialize)]
pub struct SideVerdict {
    pub side: Side,
    pub legs: usize,
    pub form_space_dim: usize,
    /// (n_plus, n_minus, n_zero) of the quotient form, when the invariant form is unique up to scale.
    pub quotient_signature: Option<(usize, usize, usize)>,
    /// Gram matrices of the solved forms, as strings, for audit.
    pub grams: Vec<Vec<Vec<String>>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct UnitarityReport {
    pub verdict: Verdict,
    pub sides: Vec<SideVerdict>,
}

fn gram_strings(g: &ExactMatrix) -> Vec<Vec<String>> {
    g.to_dense().iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect()
}

/// NOT_UNITARY if either side carries an invariant form, unique up to scale, whose quotient is indefinite.
///
/// With a solution space of dimension at least two, some combination is almost always
/// indefinite, so such sides never produce a verdict.
pub fn nonunitary_test(spec: &PsSpec) -> Result<UnitarityReport, FormError> {
    let mut sides = Vec::new();
    let mut verdict = Verdict::Unknown;
    for side in [Side::Mu, Side::Mubar] {
        let mut s = spec.clone();
        s.side = side;
        if s.legs() == 0 {
            continue;
        }
        let model = ModelSpace::build(&s, Ordering::KLeft)?;
        let forms = solve_invariant_form(&model);
        let mut sig = None;
        if forms.len() == 1 {
            let q = langlands_quotient(&model, &forms[0])?;
            let qs = q.form.signature();
            if q.form.is_indefinite() {
                verdict = Verdict::NotUnitary;
            }
            sig = Some((qs.n_plus, qs.n_minus, qs.n_zero));
        }
        sides.push(SideVerdict { side, legs: s.legs(), form_space_dim: forms.len(), quotient_signature: sig, grams: forms.iter().map(|f| gram_strings(&f.gram)).collect() });
    }
    Ok(UnitarityReport { verdict, sides })
}

/// Kind of invariant-form space at one nu for the rank-one symplectic model.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum FormKind {
    /// No nonzero invariant form.
    Zero,
    /// Some invariant form is positive definite.
    PositiveDefinite,
    /// Invariant forms exist but none found positive definite.
    Other,
}

/// Does the solution space contain a positive-definite form? Exact for one-dimensional spaces;
/// for larger ones every basis element and the sum are tried.
pub fn classify_forms(forms: &[HermForm]) -> FormKind {
    if forms.is_empty() {
        return FormKind::Zero;
    }
    let mut candidates: Vec<ExactMatrix> = Vec::new();
    for f in forms {
        candidates.push(f.gram.clone());
        candidates.push(f.gram.neg());
    }
    let sum = forms.iter().skip(1).fold(forms[0].gram.clone(), |a, f| a.add(&f.gram));
    candidates.push(sum.clone());
    candidates.push(sum.neg());
    if candidates.iter().any(|g| HermForm::new(g.clone(), 0).is_positive_definite()) {
        FormKind::PositiveDefinite
    } else {
        FormKind::Other
    }
}

/// Rank-one symplectic model (n = 1, k = 1) at each nu of a Q(i) grid.
pub fn sl2_grid(values: &[GaussRat]) -> Result<Vec<(GaussRat, FormKind)>, FormError> {
    let mut out = Vec::new();
    for nu in values {
        let spec = PsSpec::new(crate::liealg::GroupSpec::sp(1), 1, vec![nu.clone()], Side::Mu);
        let model = ModelSpace::build(&spec, Ordering::KLeft)?;
        out.push((nu.clone(), classify_forms(&solve_invariant_form(&model))));
    }
    Ok(out)
}

/// re, im in {-2, -3/2, ..., 2}.
pub fn sl2_default_grid() -> Vec<GaussRat> {
    let steps: Vec<i64> = (-4..=4).collect();
    let mut v = Vec::new();
    for &a in &steps {
        for &b in &steps {
            v.push(GaussRat::complex(crate::exactlin::rat(a, 2), crate::exactlin::rat(b, 2)));
        }
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liealg::{build_algebra, GroupSpec};
    use crate::psmodel::AAction;
    use crate::tensorops::trivial_projector_on_vv;

    fn g(re: i64, im: i64) -> GaussRat {
        GaussRat::complex(crate::exactlin::rat(re, 1), crate::exactlin::rat(im, 1))
    }

    fn sl2(nu: GaussRat) -> ModelSpace {
        ModelSpace::build(&PsSpec::new(GroupSpec::sp(1), 1, vec![nu], Side::Mu), Ordering::KLeft).unwrap()
    }

    #[test]
    fn induced_form_examples() {
        let m = ModelSpace::build(&PsSpec::new(GroupSpec::sp(2), 1, vec![g(1, 0), g(2, 0)], Side::Mu), Ordering::KLeft).unwrap();
        let f = induced_form(&m);
        assert_eq!(f.gram, ExactMatrix::scalar(2, &g(2, 0)));
        assert!(f.gram.is_hermitian());
        for spec in [GroupSpec::sp(2), GroupSpec::opq(3, 2)] {
            let pr = trivial_projector_on_vv(&build_algebra(&spec).unwrap());
            assert_eq!(pr.adjoint(), pr);
        }
    }

    #[test]
    fn k_and_p_adjointness_under_dot_product() {
        for spec in [GroupSpec::sp(2), GroupSpec::opq(3, 2)] {
            let d = build_algebra(&spec).unwrap();
            for b in &d.basis_k {
                assert_eq!(b.adjoint(), b.neg(), "{spec}");
            }
            for b in &d.basis_p {
                assert_eq!(b.adjoint(), *b, "{spec}");
            }
        }
    }

    #[test]
    fn star_checks_on_sl2() {
        let m = sl2(g(0, 1));
        assert!(check_star_invariance(&m, &induced_form(&m)).iter().all(|(_, ok)| *ok));
        let m = sl2(g(2, 0));
        let rep = check_star_invariance(&m, &induced_form(&m));
        for (name, ok) in rep {
            assert_eq!(ok, !name.starts_with("ztilde"), "{name}");
        }
    }

    #[test]
    fn solver_examples() {
        let forms = solve_invariant_form(&sl2(g(0, 1)));
        assert_eq!(classify_forms(&forms), FormKind::PositiveDefinite);
        assert!(solve_invariant_form(&sl2(g(1, 1))).is_empty());
        assert!(!solve_invariant_form(&sl2(g(0, 0))).is_empty());
        let forms = solve_invariant_form(&sl2(g(2, 0)));
        assert_eq!(forms.len(), 1);
        assert!(forms[0].is_indefinite());
    }

    #[test]
    fn quotients() {
        let m = sl2(g(0, 1));
        let f = induced_form(&m);
        assert_eq!(langlands_quotient(&m, &f).unwrap().dim, 2);
        let zero = HermForm::new(ExactMatrix::zeros(2, 2), m.cyclic);
        let q = langlands_quotient(&m, &zero).unwrap();
        assert_eq!((q.dim, q.radical_dim), (0, 2));
        let bad = sl2(g(2, 0));
        assert!(matches!(langlands_quotient(&bad, &induced_form(&bad)), Err(FormError::NotInvariantForm(_))));
        // at nu = 0 there is a rank-one invariant form; its quotient is one-dimensional
        let m0 = sl2(g(0, 0));
        let forms = solve_invariant_form(&m0);
        let rank_one: Vec<_> = forms.iter().filter(|f| rank(&f.gram) == 1).collect();
        assert!(!rank_one.is_empty() || forms.len() > 1);
        let pick = rank_one.first().map(|f| (*f).clone()).unwrap_or_else(|| HermForm::new(forms[0].gram.add(&forms[1].gram), m0.cyclic));
        let q = langlands_quotient(&m0, &pick).unwrap();
        let s = pick.signature();
        let qs = q.form.signature();
        assert_eq!((s.n_plus, s.n_minus, s.n_zero), (qs.n_plus, qs.n_minus, qs.n_zero + q.radical_dim));
    }

    #[test]
    fn verdicts() {
        let v = |nu: GaussRat| nonunitary_test(&PsSpec::new(GroupSpec::sp(1), 1, vec![nu], Side::Mu)).unwrap().verdict;
        assert_eq!(v(g(3, 0)), Verdict::NotUnitary);
        assert_eq!(v(g(0, 1)), Verdict::Unknown);
        assert_eq!(v(g(0, 0)), Verdict::Unknown);
    }

    #[test]
    fn sl2_equivalence_on_grid() {
        for (nu, kind) in sl2_grid(&sl2_default_grid()).unwrap() {
            let re0 = nu.re == crate::exactlin::rat(0, 1);
            assert_eq!(kind == FormKind::PositiveDefinite, re0, "nu = {nu}: {kind:?}");
        }
    }

    #[test]
    fn literal_a_action_moves_unitary_axis() {
        let mut spec = PsSpec::new(GroupSpec::sp(1), 1, vec![g(0, 1)], Side::Mu);
        spec.a_action = AAction::Nu;
        let m = ModelSpace::build(&spec, Ordering::KLeft).unwrap();
        assert_eq!(classify_forms(&solve_invariant_form(&m)), FormKind::Zero);
        // lambda = nu + rho with rho = 1, so the literal action puts the unitary axis at re(nu) = -1
        spec.nu = vec![g(-1, 1)];
        let m = ModelSpace::build(&spec, Ordering::KLeft).unwrap();
        assert_eq!(classify_forms(&solve_invariant_form(&m)), FormKind::PositiveDefinite);
    }
}
