//! The type B/C VW-algebra: a formal relation list and a checker that evaluates it on
//! any assignment of exact matrices to the generators.
//!
//! Generator symbols: `t{i}` for t_{i,i+1}, `e{i}` for e_{i,i+1}, `z{i}`, `theta{j}`.

use crate::exactlin::{solve_linear, ExactMatrix, GaussRat};
use crate::liealg::{build_algebra, GroupSpec, LieAlgebraData, LieError};
use crate::tensorops::{build_omega, build_swap, build_trivial_projector, build_xi_leg, swap_on_vv, trivial_projector_on_vv, OmegaPart, TensorError, TensorSpace};
use serde::Serialize;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum BcvwError {
    #[error(transparent)]
    Lie(#[from] LieError),
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error("theta_k z_k + z_k theta_k is not in span(Id, theta_k)")]
    NotScalarPlusTheta,
    #[error("missing generator {0}")]
    MissingGenerator(String),
}

/// Which family of relations a relation belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum RelationFamily {
    Brauer,
    Vw,
    TypeBc,
    Quotient,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Status {
    Pass,
    Fail,
    /// Precondition for the relation not met (for example e is zero so no constant is defined).
    Skipped,
}

type EvalFn = Box<dyn Fn(&Assignment, &DerivedConstants) -> Outcome + Send + Sync>;

/// Result of evaluating one relation.
pub struct Outcome {
    pub status: Status,
    pub note: String,
}

impl Outcome {
    fn zero(residual: ExactMatrix) -> Self {
        let ok = residual.is_zero();
        Outcome { status: if ok { Status::Pass } else { Status::Fail }, note: if ok { String::new() } else { format!("{} nonzero residual entries", residual.nnz()) } }
    }
    fn eq(a: ExactMatrix, b: ExactMatrix) -> Self {
        Self::zero(a.sub(&b))
    }
}

pub struct Relation {
    pub id: String,
    pub latex: String,
    pub family: RelationFamily,
    /// False for literal readings kept only for the discrepancy report.
    pub normative: bool,
    eval: EvalFn,
}

/// The relation list for rank k, in symbolic form with evaluators.
pub struct Presentation {
    pub k: usize,
    pub relations: Vec<Relation>,
}

/// Matrices for the generators on a common space, plus the operators a K-commutation check needs.
#[derive(Clone, Debug)]
pub struct Assignment {
    pub k: usize,
    pub dim: usize,
    pub gens: BTreeMap<String, ExactMatrix>,
    /// Diagonal action of a k-basis, if available; used for the K-commutation check.
    pub k_action: Vec<ExactMatrix>,
}

impl Assignment {
    pub fn get(&self, name: &str) -> &ExactMatrix {
        self.gens.get(name).unwrap_or_else(|| panic!("generator {name} missing"))
    }
    pub fn t(&self, i: usize) -> &ExactMatrix {
        self.get(&format!("t{i}"))
    }
    pub fn e(&self, i: usize) -> &ExactMatrix {
        self.get(&format!("e{i}"))
    }
    pub fn z(&self, i: usize) -> &ExactMatrix {
        self.get(&format!("z{i}"))
    }
    pub fn theta(&self, j: usize) -> &ExactMatrix {
        self.get(&format!("theta{j}"))
    }
    pub fn id(&self) -> ExactMatrix {
        ExactMatrix::identity(self.dim)
    }
    pub fn validate(&self) -> Result<(), BcvwError> {
        for i in 1..self.k {
            for s in [format!("t{i}"), format!("e{i}")] {
                if !self.gens.contains_key(&s) {
                    return Err(BcvwError::MissingGenerator(s));
                }
            }
        }
        for i in 1..=self.k {
            for s in [format!("z{i}"), format!("theta{i}")] {
                if !self.gens.contains_key(&s) {
                    return Err(BcvwError::MissingGenerator(s));
                }
            }
        }
        Ok(())
    }
}

/// Constants read off from operator identities.
#[derive(Clone, Debug, Default, Serialize)]
pub struct DerivedConstants {
    #[serde(serialize_with = "ser_opt")]
    pub m0: Option<GaussRat>,
    #[serde(serialize_with = "ser_opt")]
    pub m1: Option<GaussRat>,
    /// e theta_1 theta_2 = u e
    #[serde(serialize_with = "ser_opt")]
    pub theta_pair: Option<GaussRat>,
    #[serde(serialize_with = "ser_opt")]
    pub w1: Option<GaussRat>,
    #[serde(serialize_with = "ser_opt")]
    pub w2: Option<GaussRat>,
    /// theta_k z_k + z_k theta_k = a Id + b theta_k
    #[serde(serialize_with = "ser_opt")]
    pub a: Option<GaussRat>,
    #[serde(serialize_with = "ser_opt")]
    pub b: Option<GaussRat>,
}

pub fn ser_opt<S: serde::Serializer>(v: &Option<GaussRat>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(x) => s.serialize_str(&x.to_string()),
        None => s.serialize_none(),
    }
}

pub fn ser_rat<S: serde::Serializer>(v: &GaussRat, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

#[derive(Clone, Debug, Serialize)]
pub struct RelationEntry {
    pub relation_id: String,
    pub latex_form: String,
    pub family: RelationFamily,
    pub normative: bool,
    pub status: Status,
    pub residual_zero: bool,
    pub note: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct RelationReport {
    pub entries: Vec<RelationEntry>,
    pub derived_constants: DerivedConstants,
    /// Every generator commutes with the diagonal k-action (None if no k-action was supplied).
    pub k_commutation: Option<bool>,
}

impl RelationReport {
    /// All normative relations pass (skips count as passes).
    pub fn normative_ok(&self) -> bool {
        self.entries.iter().filter(|e| e.normative).all(|e| e.status != Status::Fail)
    }
    pub fn failures(&self) -> Vec<&RelationEntry> {
        self.entries.iter().filter(|e| e.status == Status::Fail).collect()
    }
    pub fn entry(&self, id: &str) -> Option<&RelationEntry> {
        self.entries.iter().find(|e| e.relation_id == id)
    }
}

fn rel(id: String, latex: String, family: RelationFamily, normative: bool, eval: EvalFn) -> Relation {
    Relation { id, latex, family, normative, eval }
}

/// Scalar s with a = s b, if b is nonzero.
fn ratio(a: &ExactMatrix, b: &ExactMatrix) -> Option<GaussRat> {
    if b.is_zero() {
        None
    } else {
        a.proportionality(b)
    }
}

pub fn derive_constants(a: &Assignment) -> DerivedConstants {
    let mut d = DerivedConstants::default();
    let k = a.k;
    if k == 0 {
        return d;
    }
    if k >= 2 {
        let e = a.e(1);
        d.m0 = ratio(&e.mul(e), e);
        d.m1 = ratio(&e.mul(a.theta(1)).mul(e), e);
        d.theta_pair = ratio(&e.mul(&a.theta(1).mul(a.theta(2))), e);
        d.w1 = ratio(&e.mul(a.z(1)).mul(e), e);
        d.w2 = ratio(&e.mul(&a.z(1).mul(a.z(1))).mul(e), e);
    }
    if let Some((x, y)) = anticommutator_coords(a) {
        d.a = Some(x);
        d.b = Some(y);
    }
    d
}

fn anticommutator_coords(a: &Assignment) -> Option<(GaussRat, GaussRat)> {
    let k = a.k;
    let th = a.theta(k);
    let ac = th.anticommutator(a.z(k));
    let id = a.id();
    let basis = ExactMatrix::from_columns(a.dim * a.dim, &[id.vectorize(), th.vectorize()]);
    let sol = solve_linear(&basis, &ac.vectorize()).ok()?;
    Some((sol[0].clone(), sol[1].clone()))
}

impl Presentation {
    /// Relations of the Brauer algebra, the VW-algebra and the type B/C extension, for rank k.
    ///
    /// Literal readings whose index ranges are too wide are kept as non-normative entries.
    pub fn type_bc(k: usize) -> Self {
        use RelationFamily::*;
        let mut r: Vec<Relation> = Vec::new();
        // symmetric group and hyperoctahedral group
        for i in 1..k {
            r.push(rel(format!("S.t{i}^2"), "t_{i,i+1}^2 = 1".into(), Brauer, true, Box::new(move |a, _| Outcome::eq(a.t(i).mul(a.t(i)), a.id()))));
            if i + 1 < k {
                r.push(rel(
                    format!("S.braid{i}"),
                    "t_{i,i+1}t_{i+1,i+2}t_{i,i+1} = t_{i+1,i+2}t_{i,i+1}t_{i+1,i+2}".into(),
                    Brauer,
                    true,
                    Box::new(move |a, _| Outcome::eq(a.t(i).mul(a.t(i + 1)).mul(a.t(i)), a.t(i + 1).mul(a.t(i)).mul(a.t(i + 1)))),
                ));
            }
            for j in i + 2..k {
                r.push(rel(format!("S.far{i},{j}"), "[t_{i,i+1}, t_{j,j+1}] = 0, |i-j|>1".into(), Brauer, true, Box::new(move |a, _| Outcome::zero(a.t(i).commutator(a.t(j))))));
            }
        }
        for i in 1..k {
            r.push(rel(format!("B.e{i}^2"), "e_{i,i+1}^2 = m_0 e_{i,i+1}".into(), Brauer, true, Box::new(move |a, d| proportional(&a.e(i).mul(a.e(i)), a.e(i), d.m0.as_ref()))));
            r.push(rel(
                format!("B.te{i}"),
                "t_{i,i+1}e_{i,i+1} = e_{i,i+1}t_{i,i+1} = e_{i,i+1}".into(),
                Brauer,
                true,
                Box::new(move |a, _| both(Outcome::eq(a.t(i).mul(a.e(i)), a.e(i).clone()), Outcome::eq(a.e(i).mul(a.t(i)), a.e(i).clone()))),
            ));
            if i + 1 < k {
                r.push(rel(
                    format!("B.conj{i}"),
                    "t_{i,i+1}t_{i+1,i+2}e_{i,i+1}t_{i+1,i+2}t_{i,i+1} = e_{i+1,i+2}".into(),
                    Brauer,
                    true,
                    Box::new(move |a, _| Outcome::eq(a.t(i).mul(a.t(i + 1)).mul(a.e(i)).mul(a.t(i + 1)).mul(a.t(i)), a.e(i + 1).clone())),
                ));
            }
            for j in 1..k {
                if j == i || j == i + 1 {
                    continue;
                }
                let far = i.abs_diff(j) > 1;
                r.push(rel(
                    format!("B.te_comm{i},{j}"),
                    if far { "[t_{i,i+1}, e_{j,j+1}] = 0, |i-j|>1" } else { "[t_{i,i+1}, e_{j,j+1}] = 0, j != i,i+1 (printed range)" }.into(),
                    Brauer,
                    far,
                    Box::new(move |a, _| Outcome::zero(a.t(i).commutator(a.e(j)))),
                ));
            }
        }
        // VW
        for i in 1..k {
            r.push(rel(
                format!("V.tz{i}"),
                "t_{i,i+1}z_i - z_{i+1}t_{i,i+1} = 1 + e_{i,i+1}".into(),
                Vw,
                true,
                Box::new(move |a, _| Outcome::eq(a.t(i).mul(a.z(i)).sub(&a.z(i + 1).mul(a.t(i))), a.id().add(a.e(i)))),
            ));
            r.push(rel(
                format!("V.ez{i}"),
                "e_{i,i+1}(z_i+z_{i+1}) = 0 = (z_i+z_{i+1})e_{i,i+1}".into(),
                Vw,
                true,
                Box::new(move |a, _| {
                    let s = a.z(i).add(a.z(i + 1));
                    both(Outcome::zero(a.e(i).mul(&s)), Outcome::zero(s.mul(a.e(i))))
                }),
            ));
            for j in 1..=k {
                if j == i || j == i + 1 {
                    continue;
                }
                r.push(rel(format!("V.tz_comm{i},{j}"), "[t_{i,i+1}, z_j] = 0, j != i,i+1".into(), Vw, true, Box::new(move |a, _| Outcome::zero(a.t(i).commutator(a.z(j))))));
                r.push(rel(format!("V.ez_comm{i},{j}"), "[e_{i,i+1}, z_j] = 0, j != i,i+1".into(), Vw, true, Box::new(move |a, _| Outcome::zero(a.e(i).commutator(a.z(j))))));
            }
        }
        for i in 1..=k {
            for j in i + 1..=k {
                r.push(rel(format!("V.zz{i},{j}"), "[z_i, z_j] = 0".into(), Vw, true, Box::new(move |a, _| Outcome::zero(a.z(i).commutator(a.z(j))))));
            }
        }
        if k >= 2 {
            r.push(rel("V.w1".into(), "e_{12}z_1 e_{12} = w_1 e_{12}".into(), Vw, true, Box::new(|a, d| proportional(&a.e(1).mul(a.z(1)).mul(a.e(1)), a.e(1), d.w1.as_ref()))));
            r.push(rel(
                "V.w2".into(),
                "e_{12}z_1^2 e_{12} = w_2 e_{12}".into(),
                Vw,
                true,
                Box::new(|a, d| proportional(&a.e(1).mul(&a.z(1).mul(a.z(1))).mul(a.e(1)), a.e(1), d.w2.as_ref())),
            ));
        }
        // hyperoctahedral part
        for j in 1..=k {
            r.push(rel(format!("C.theta{j}^2"), "theta_j^2 = 1".into(), TypeBc, true, Box::new(move |a, _| Outcome::eq(a.theta(j).mul(a.theta(j)), a.id()))));
            for l in j + 1..=k {
                r.push(rel(format!("C.thth{j},{l}"), "[theta_j, theta_l] = 0".into(), TypeBc, true, Box::new(move |a, _| Outcome::zero(a.theta(j).commutator(a.theta(l))))));
            }
        }
        for i in 1..k {
            r.push(rel(
                format!("C.tth{i}"),
                "t_{i,i+1} theta_i t_{i,i+1} = theta_{i+1}".into(),
                TypeBc,
                true,
                Box::new(move |a, _| Outcome::eq(a.t(i).mul(a.theta(i)).mul(a.t(i)), a.theta(i + 1).clone())),
            ));
            for j in 1..=k {
                if j != i && j != i + 1 {
                    r.push(rel(format!("C.tth_comm{i},{j}"), "[t_{i,i+1}, theta_j] = 0, j != i,i+1".into(), TypeBc, true, Box::new(move |a, _| Outcome::zero(a.t(i).commutator(a.theta(j))))));
                }
            }
        }
        if k >= 2 {
            r.push(rel(
                "C.order4".into(),
                "(t_{k-1,k} theta_k)^4 = 1".into(),
                TypeBc,
                true,
                Box::new(move |a, _| Outcome::eq(a.t(k - 1).mul(a.theta(k)).pow(4), a.id())),
            ));
        }
        for i in 1..k {
            for j in 1..=k {
                let far = j != i && j != i + 1;
                r.push(rel(
                    format!("C.eth_comm{i},{j}"),
                    if far { "[e_{i,i+1}, theta_j] = 0, j != i,i+1" } else { "[e_{i,i+1}, theta_j] = 0 for all j (printed range)" }.into(),
                    TypeBc,
                    far,
                    Box::new(move |a, _| Outcome::zero(a.e(i).commutator(a.theta(j)))),
                ));
            }
            r.push(rel(
                format!("C.ethth{i}"),
                "e_{i,i+1}theta_i theta_{i+1} = u e_{i,i+1} = theta_i theta_{i+1} e_{i,i+1}, u = ±1".into(),
                TypeBc,
                true,
                Box::new(move |a, d| {
                    let tt = a.theta(i).mul(a.theta(i + 1));
                    let unit = d.theta_pair.as_ref().map(|u| *u == GaussRat::one() || *u == -GaussRat::one()).unwrap_or(false);
                    let o = both(proportional(&a.e(i).mul(&tt), a.e(i), d.theta_pair.as_ref()), proportional(&tt.mul(a.e(i)), a.e(i), d.theta_pair.as_ref()));
                    if o.status == Status::Pass && !unit {
                        Outcome { status: Status::Fail, note: "scalar is not ±1".into() }
                    } else {
                        o
                    }
                }),
            ));
            r.push(rel(
                format!("C.ethth{i}.printed"),
                "e_{i,i+1}theta_i theta_{i+1} = e_{i,i+1} = theta_i theta_{i+1} e_{i,i+1}".into(),
                TypeBc,
                false,
                Box::new(move |a, _| {
                    let tt = a.theta(i).mul(a.theta(i + 1));
                    both(Outcome::eq(a.e(i).mul(&tt), a.e(i).clone()), Outcome::eq(tt.mul(a.e(i)), a.e(i).clone()))
                }),
            ));
            r.push(rel(
                format!("C.ethe{i}"),
                "e_{i,i+1}theta_i e_{i,i+1} = m_1 e_{i,i+1}".into(),
                TypeBc,
                true,
                Box::new(move |a, d| proportional(&a.e(i).mul(a.theta(i)).mul(a.e(i)), a.e(i), d.m1.as_ref())),
            ));
        }
        for l in 1..=k {
            for j in 1..=k {
                if l == j {
                    continue;
                }
                // theta_l commutes with z_j when leg l is outside z_j's legs
                let disjoint = l > j;
                r.push(rel(
                    format!("C.thz_comm{l},{j}"),
                    if disjoint { "[theta_l, z_j] = 0, l > j" } else { "[theta_n, z_j] = 0 for j != k (printed range)" }.into(),
                    TypeBc,
                    disjoint,
                    Box::new(move |a, _| Outcome::zero(a.theta(l).commutator(a.z(j)))),
                ));
            }
        }
        Presentation { k, relations: r }
    }

    /// The relation list left after quotienting by e and by the anticommutator ideal.
    pub fn quotient(k: usize) -> Self {
        use RelationFamily::*;
        let full = Self::type_bc(k);
        let mut r: Vec<Relation> = full
            .relations
            .into_iter()
            .filter(|x| x.normative && (x.id.starts_with("S.") || x.id.starts_with("V.zz") || x.id.starts_with("V.tz_comm") || x.id.starts_with("C.theta") || x.id.starts_with("C.thth") || x.id.starts_with("C.tth") || x.id.starts_with("C.order") || x.id.starts_with("C.thz")))
            .collect();
        for i in 1..k {
            r.push(rel(
                format!("Q.tz{i}"),
                "t_{i,i+1}z_i - z_{i+1}t_{i,i+1} = 1".into(),
                Quotient,
                true,
                Box::new(move |a, _| Outcome::eq(a.t(i).mul(a.z(i)).sub(&a.z(i + 1).mul(a.t(i))), a.id())),
            ));
        }
        for i in 1..k {
            r.push(rel(format!("Q.e{i}=0"), "e_{i,i+1} = 0".into(), Quotient, true, Box::new(move |a, _| Outcome::zero(a.e(i).clone()))));
        }
        if k == 0 {
            return Presentation { k, relations: r };
        }
        r.push(rel(
            "Q.anticomm".into(),
            "theta_k z_k + z_k theta_k - 2c + 2r theta_k = 0".into(),
            Quotient,
            true,
            Box::new(move |a, d| match (&d.a, &d.b) {
                (Some(x), Some(y)) => {
                    let th = a.theta(k);
                    let lhs = th.anticommutator(a.z(k));
                    // c = a/2 and r = b/2
                    Outcome::eq(lhs, a.id().scale(x).add(&th.scale(y)))
                }
                _ => Outcome { status: Status::Fail, note: "anticommutator not in span(Id, theta_k)".into() },
            }),
        ));
        Presentation { k, relations: r }
    }
}

fn both(a: Outcome, b: Outcome) -> Outcome {
    match (a.status, b.status) {
        (Status::Pass, Status::Pass) => a,
        (Status::Pass, _) => b,
        _ => a,
    }
}

fn proportional(lhs: &ExactMatrix, e: &ExactMatrix, c: Option<&GaussRat>) -> Outcome {
    if e.is_zero() {
        return Outcome { status: if lhs.is_zero() { Status::Skipped } else { Status::Fail }, note: "e acts by zero; constant undefined".into() };
    }
    match c {
        Some(c) => Outcome::eq(lhs.clone(), e.scale(c)),
        None => Outcome { status: Status::Fail, note: "not proportional to e".into() },
    }
}

pub fn check_relations(p: &Presentation, a: &Assignment) -> RelationReport {
    let derived = derive_constants(a);
    let entries = p
        .relations
        .iter()
        .map(|r| {
            let out = (r.eval)(a, &derived);
            RelationEntry {
                relation_id: r.id.clone(),
                latex_form: r.latex.clone(),
                family: r.family,
                normative: r.normative,
                residual_zero: out.status != Status::Fail,
                status: out.status,
                note: out.note,
            }
        })
        .collect();
    let k_commutation = if a.k_action.is_empty() {
        None
    } else {
        Some(a.gens.values().all(|g| a.k_action.iter().all(|b| g.commutator(b).is_zero())))
    };
    RelationReport { entries, derived_constants: derived, k_commutation }
}

/// (rShift, cHecke) from theta_k z_k + z_k theta_k = A + B theta_k: r = B/2, c = A/2.
pub fn derive_quotient_constants(report: &RelationReport) -> Result<(GaussRat, GaussRat), BcvwError> {
    match (&report.derived_constants.a, &report.derived_constants.b) {
        (Some(a), Some(b)) => {
            let half = GaussRat::frac(1, 2);
            Ok((b * &half, a * &half))
        }
        _ => Err(BcvwError::NotScalarPlusTheta),
    }
}

/// Verify the reduced relation list; the e-generators must already act by zero.
pub fn check_quotient_presentation(a: &Assignment) -> RelationReport {
    check_relations(&Presentation::quotient(a.k), a)
}

/// Scalars fixing the assignment t -> sigma swap, z_i -> alpha Σ_{j<i} Omega_ji + beta, e -> gamma pr.
#[derive(Clone, Debug, Serialize)]
pub struct Normalization {
    /// pr swap = sigma pr
    #[serde(serialize_with = "ser_rat")]
    pub sigma: GaussRat,
    #[serde(serialize_with = "ser_rat")]
    pub alpha: GaussRat,
    #[serde(serialize_with = "ser_rat")]
    pub beta: GaussRat,
    #[serde(serialize_with = "ser_rat")]
    pub gamma: GaussRat,
}

/// How generators are mapped to operators.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Convention {
    /// t -> swap, z_i -> Σ Omega_ji, e -> m pr with the printed m.
    Literal,
    /// Scalars solved so every relation holds (see [`consistent_normalization`]).
    Consistent,
}

/// The printed Brauer parameter: -n for Sp, floor((p+q)/2) for O(p,q).
pub fn printed_m0(spec: &GroupSpec) -> GaussRat {
    if spec.family == "sp" {
        GaussRat::int(-(spec.params[0] as i64 / 2))
    } else {
        GaussRat::int(((spec.params[0] + spec.params[1]) / 2) as i64)
    }
}

/// The printed m1: 0 for Sp, p-q for O(p,q).
pub fn printed_m1(spec: &GroupSpec) -> GaussRat {
    if spec.family == "sp" {
        GaussRat::zero()
    } else {
        GaussRat::int(spec.params[0] as i64 - spec.params[1] as i64)
    }
}

/// Scalars forced by t e = e, t z_i - z_{i+1} t = 1 + e and e(z_i + z_{i+1}) = 0.
///
/// With Omega_12 = swap + m0 pr and pr swap = sigma pr:
/// t = sigma swap, alpha = -sigma, gamma = sigma m0, beta = sigma (sigma + m0) / 2.
pub fn consistent_normalization(data: &LieAlgebraData, convention: Convention) -> Normalization {
    match convention {
        Convention::Literal => Normalization { sigma: GaussRat::one(), alpha: GaussRat::one(), beta: GaussRat::zero(), gamma: printed_m0(&data.spec) },
        Convention::Consistent => {
            let d = data.dim_v;
            let pr = trivial_projector_on_vv(data);
            let sigma = pr.mul(&swap_on_vv(d)).proportionality(&pr).expect("pr swap is a multiple of pr");
            let alpha = -sigma.clone();
            let gamma = &sigma * &data.m0;
            let beta = &sigma * &(&sigma + &data.m0) * &GaussRat::frac(1, 2);
            Normalization { sigma, alpha, beta, gamma }
        }
    }
}

/// The assignment on V^{⊗k} (no leg 0).
pub fn standard_assignment(data: &LieAlgebraData, k: usize, convention: Convention) -> Result<Assignment, BcvwError> {
    let space = TensorSpace::new(data.dim_v, k);
    let norm = consistent_normalization(data, convention);
    let dim = space.total_dim();
    let mut gens = BTreeMap::new();
    for i in 1..k {
        let sw = build_swap(space, i, i + 1)?.matrix;
        let t = if convention == Convention::Literal { sw } else { sw.scale(&norm.sigma) };
        gens.insert(format!("t{i}"), t);
        gens.insert(format!("e{i}"), build_trivial_projector(space, data, i)?.matrix.scale(&norm.gamma));
    }
    let mut omegas: BTreeMap<(usize, usize), ExactMatrix> = BTreeMap::new();
    for j in 1..=k {
        for i in 1..j {
            omegas.insert((i, j), build_omega(space, data, i, j, OmegaPart::Full)?.matrix);
        }
    }
    for i in 1..=k {
        let mut z = ExactMatrix::scalar(dim, &norm.beta);
        for j in 1..i {
            z.add_scaled(&omegas[&(j, i)], &norm.alpha);
        }
        gens.insert(format!("z{i}"), z);
        gens.insert(format!("theta{i}"), build_xi_leg(space, data, i)?.matrix);
    }
    let mut k_action = Vec::new();
    for b in &data.basis_k {
        let mut acc = ExactMatrix::zeros(dim, dim);
        for leg in 1..=k {
            acc = acc.add(&crate::tensorops::embed_single(space, b, leg)?);
        }
        k_action.push(acc);
    }
    Ok(Assignment { k, dim, gens, k_action })
}

/// A place where a printed statement and the computation disagree, or where only a corrected reading holds.
#[derive(Clone, Debug, Serialize)]
pub struct Discrepancy {
    pub id: String,
    pub printed: String,
    pub computed: String,
    /// Does the printed statement hold literally?
    pub literal_holds: bool,
    /// Does the artifact rely on the corrected reading?
    pub normative: bool,
}

/// Compare printed constants, printed matrices and literal relation ranges with the computation.
pub fn printed_discrepancies(spec: &GroupSpec, k: usize) -> Result<Vec<Discrepancy>, BcvwError> {
    let data = build_algebra(spec)?;
    let rf = spec.real_form()?;
    let mut out = Vec::new();
    for (label, m) in rf.printed_root_vectors() {
        let member = rf.contains(&m);
        let corrected = rf.root_vectors().into_iter().find(|(r, _)| format!("n[{r}]") == label).map(|(_, x)| x);
        let theta_ok = label.starts_with("nhat[") && {
            let base = label.replacen("nhat[", "n[", 1);
            rf.root_vectors().into_iter().find(|(r, _)| format!("n[{r}]") == base).map(|(_, x)| data.theta(&x) == m).unwrap_or(false)
        };
        let matches_corrected = corrected.as_ref().map(|c| *c == m);
        let literal_holds = member && (label.starts_with("nhat[") && theta_ok || matches_corrected.unwrap_or(!label.starts_with("nhat[")));
        if !literal_holds {
            out.push(Discrepancy {
                id: format!("matrix {label}"),
                printed: format!("{m}"),
                computed: match (&corrected, label.starts_with("nhat[")) {
                    (Some(c), _) => format!("{c}"),
                    (None, true) => "theta(n) used instead".into(),
                    _ => if member { "in the algebra but inconsistent with the formula".into() } else { "not in the Lie algebra; not used".into() },
                },
                literal_holds,
                normative: false,
            });
        }
    }
    let pm0 = printed_m0(spec);
    let consistent = consistent_normalization(&data, Convention::Consistent);
    out.push(Discrepancy {
        id: "Brauer parameter m0".into(),
        printed: format!("Omega_12 = s_12 + {pm0} pr"),
        computed: format!("Omega_12 = s_12 + {} pr; e^2 = {} e under the consistent assignment", data.m0, consistent.gamma),
        literal_holds: data.m0 == pm0,
        normative: false,
    });
    if k >= 2 {
        let lit = standard_assignment(&data, k, Convention::Literal)?;
        let rep = check_relations(&Presentation::type_bc(k), &lit);
        for e in rep.entries.iter().filter(|e| e.normative && e.status == Status::Fail) {
            out.push(Discrepancy {
                id: format!("literal assignment: {}", e.relation_id),
                printed: e.latex_form.clone(),
                computed: format!("fails with t = swap, z = Σ Omega, e = {pm0} pr ({})", e.note),
                literal_holds: false,
                normative: false,
            });
        }
        let cons = standard_assignment(&data, k, Convention::Consistent)?;
        let rep = check_relations(&Presentation::type_bc(k), &cons);
        for e in rep.entries.iter().filter(|e| !e.normative) {
            out.push(Discrepancy {
                id: format!("range: {}", e.relation_id),
                printed: e.latex_form.clone(),
                computed: format!("{:?} on V^(x){k}", e.status),
                literal_holds: e.status != Status::Fail,
                normative: false,
            });
        }
        let pm1 = printed_m1(spec);
        if let Some(m1) = &rep.derived_constants.m1 {
            out.push(Discrepancy {
                id: "cyclotomic parameter m1".into(),
                printed: format!("{pm1}"),
                computed: format!("{m1}"),
                literal_holds: *m1 == pm1,
                normative: false,
            });
        }
    }
    Ok(out)
}
