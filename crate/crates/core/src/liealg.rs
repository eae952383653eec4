//! The real forms sp(2n,R) and so(p,q) with explicit restricted-root bases.
//!
//! Each family implements [`RealForm`]; families are looked up by name in
//! [`family_registry`], so the CLI and config files select them at runtime.

use crate::exactlin::{inverse, kernel_basis, solve_linear, ExactMatrix, ExactVector, GaussRat, SubspaceCoords};
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LieError {
    #[error("invalid group spec: {0}")]
    SpecInvalid(String),
    #[error("invariant form is degenerate on the chosen basis")]
    FormDegenerate,
    #[error("cannot calibrate: Omega_12 is not a combination of swap and the trivial projector")]
    NoCalibration,
    #[error("matrix is not in the Lie algebra")]
    NotInAlgebra,
    #[error("unknown character {0:?}")]
    UnknownCharacter(String),
}

/// Group data as parsed from text such as `sp:4` or `opq:3,2`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupSpec {
    /// Registry name of the family, `sp` or `opq`.
    pub family: String,
    /// Numeric parameters: `[2n]` for sp, `[p, q]` for opq.
    pub params: Vec<usize>,
}

impl GroupSpec {
    pub fn sp(n: usize) -> Self {
        GroupSpec { family: "sp".into(), params: vec![2 * n] }
    }
    pub fn opq(p: usize, q: usize) -> Self {
        GroupSpec { family: "opq".into(), params: vec![p, q] }
    }
    pub fn real_form(&self) -> Result<Box<dyn RealForm>, LieError> {
        let reg = family_registry();
        let ctor = reg
            .get(self.family.as_str())
            .ok_or_else(|| LieError::SpecInvalid(format!("unknown family {:?}", self.family)))?;
        ctor(&self.params)
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ps: Vec<String> = self.params.iter().map(|p| p.to_string()).collect();
        write!(f, "{}:{}", self.family, ps.join(","))
    }
}

impl FromStr for GroupSpec {
    type Err = LieError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (fam, rest) = s.trim().split_once(':').ok_or_else(|| LieError::SpecInvalid(s.to_string()))?;
        let params: Result<Vec<usize>, _> = rest.split(',').map(|x| x.trim().parse::<usize>()).collect();
        let params = params.map_err(|_| LieError::SpecInvalid(s.to_string()))?;
        let spec = GroupSpec { family: fam.trim().to_string(), params };
        spec.real_form()?;
        Ok(spec)
    }
}

/// Positive restricted root labels.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RestrictedRoot {
    /// eps_i - eps_j with i < j
    Diff(usize, usize),
    /// eps_i + eps_j with i < j
    Sum(usize, usize),
    /// eps_i, with a copy index for the multiplicity p-q of so(p,q)
    Short(usize, usize),
}

impl RestrictedRoot {
    /// Coefficients on eps_1..eps_r, doubled for the Sp short family.
    pub fn weight(&self, rank: usize, short_scale: i64) -> Vec<i64> {
        let mut w = vec![0; rank];
        match *self {
            RestrictedRoot::Diff(i, j) => {
                w[i - 1] = 1;
                w[j - 1] = -1;
            }
            RestrictedRoot::Sum(i, j) => {
                w[i - 1] = 1;
                w[j - 1] = 1;
            }
            RestrictedRoot::Short(i, _) => w[i - 1] = short_scale,
        }
        w
    }
}

impl fmt::Display for RestrictedRoot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            RestrictedRoot::Diff(i, j) => write!(f, "e{i}-e{j}"),
            RestrictedRoot::Sum(i, j) => write!(f, "e{i}+e{j}"),
            RestrictedRoot::Short(i, 0) => write!(f, "e{i}"),
            RestrictedRoot::Short(i, l) => write!(f, "e{i}^{l}"),
        }
    }
}

/// One-dimensional characters of K, tagged per family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
pub enum Sign1 {
    Triv,
    Det,
}

impl fmt::Display for Sign1 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign1::Triv => "triv",
            Sign1::Det => "det",
        })
    }
}

/// A character of K: one factor for Sp (K = U(n)), two for O(p) x O(q).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct KChar {
    pub first: Sign1,
    pub second: Option<Sign1>,
}

impl KChar {
    pub fn single(s: Sign1) -> Self {
        KChar { first: s, second: None }
    }
    pub fn pair(a: Sign1, b: Sign1) -> Self {
        KChar { first: a, second: Some(b) }
    }
}

impl fmt::Display for KChar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.second {
            None => write!(f, "{}", self.first),
            Some(s) => write!(f, "{}⊗{}", self.first, s),
        }
    }
}

/// Change of basis between the standard basis e and the f-basis of V.
#[derive(Clone, Debug)]
pub struct FBasis {
    /// Coordinates in the f-basis of a vector given in the e-basis.
    pub to_f: ExactMatrix,
    /// Columns are the f-basis vectors written in the e-basis.
    pub from_f: ExactMatrix,
    pub labels: Vec<String>,
}

impl FBasis {
    /// f_i (plus = true) or f_i' as a vector in the e-basis; `i` is 1-based.
    pub fn vector(&self, i: usize, plus: bool) -> ExactVector {
        let r = self.rank();
        self.from_f.column(if plus { i - 1 } else { r + i - 1 })
    }
    pub fn rank(&self) -> usize {
        self.labels.iter().filter(|l| l.starts_with('f') && !l.ends_with('\'')).count()
    }
}

/// Generators of the finite group M, acting on V.
#[derive(Clone, Debug)]
pub struct MGroupData {
    /// Sign generators; the i-th acts by -1 on f_i and f_i'.
    pub sign_gens: Vec<ExactMatrix>,
    /// Reflections in the compact O(p-q) factor (empty for Sp).
    pub compact_reflections: Vec<ExactMatrix>,
    /// Lie algebra generators of the connected part of the compact factor.
    pub compact_lie: Vec<ExactMatrix>,
}

/// A family of real forms together with its explicit root-vector conventions.
pub trait RealForm: Send + Sync {
    fn name(&self) -> &'static str;
    fn spec(&self) -> GroupSpec;
    /// Size of the defining module V.
    fn dim_v(&self) -> usize;
    /// Rank n of the complex algebra (sp_2n or so_2n+1).
    fn rank(&self) -> usize;
    /// Real rank, the dimension of the split Cartan a.
    fn real_rank(&self) -> usize;
    /// The element whose conjugation is the Cartan involution.
    fn xi(&self) -> ExactMatrix;
    /// Positive restricted root vectors, in the corrected form used everywhere.
    fn root_vectors(&self) -> Vec<(RestrictedRoot, ExactMatrix)>;
    /// Root vectors exactly as printed in the source tables, for discrepancy reports.
    fn printed_root_vectors(&self) -> Vec<(String, ExactMatrix)>;
    fn a_basis(&self) -> Vec<ExactMatrix>;
    /// Basis of the centralizer of a in k.
    fn m_basis(&self) -> Vec<ExactMatrix>;
    fn f_basis(&self) -> FBasis;
    fn m_group(&self) -> MGroupData;
    /// Factor multiplying eps_i in the eigenvalue of ad(a) on the short root vectors.
    fn short_root_scale(&self) -> i64;
    /// Differential of a K-character at an element of k.
    fn dmu(&self, mu: KChar, b: &ExactMatrix) -> Result<GaussRat, LieError>;
    /// Characters allowed as mu for this family.
    fn characters(&self) -> Vec<KChar>;
    /// Lie algebra membership test.
    fn contains(&self, x: &ExactMatrix) -> bool;
}

pub type FamilyCtor = fn(&[usize]) -> Result<Box<dyn RealForm>, LieError>;

/// Families by registry name.
pub fn family_registry() -> BTreeMap<&'static str, FamilyCtor> {
    let mut m: BTreeMap<&'static str, FamilyCtor> = BTreeMap::new();
    m.insert("sp", Symplectic::boxed);
    m.insert("opq", OddOrthogonal::boxed);
    m
}

fn e(n: usize, r: usize, c: usize) -> ExactMatrix {
    ExactMatrix::unit(n, r, c)
}

fn lincomb(n: usize, terms: &[(i64, usize, usize)]) -> ExactMatrix {
    let mut m = ExactMatrix::zeros(n, n);
    for &(s, r, c) in terms {
        m.add_at(r - 1, c - 1, &GaussRat::int(s));
    }
    m
}

/// Sp(2n,R) with J = [[0, I],[-I, 0]].
#[derive(Clone, Debug)]
pub struct Symplectic {
    pub n: usize,
}

impl Symplectic {
    fn boxed(params: &[usize]) -> Result<Box<dyn RealForm>, LieError> {
        match params {
            [d] if *d >= 2 && d % 2 == 0 => Ok(Box::new(Symplectic { n: d / 2 })),
            _ => Err(LieError::SpecInvalid(format!("sp needs one even size >= 2, got {params:?}"))),
        }
    }
    fn j(&self) -> ExactMatrix {
        let n = self.n;
        let mut m = ExactMatrix::zeros(2 * n, 2 * n);
        for i in 0..n {
            m.set(i, n + i, GaussRat::one());
            m.set(n + i, i, GaussRat::int(-1));
        }
        m
    }
}

impl RealForm for Symplectic {
    fn name(&self) -> &'static str {
        "sp"
    }
    fn spec(&self) -> GroupSpec {
        GroupSpec::sp(self.n)
    }
    fn dim_v(&self) -> usize {
        2 * self.n
    }
    fn rank(&self) -> usize {
        self.n
    }
    fn real_rank(&self) -> usize {
        self.n
    }
    fn xi(&self) -> ExactMatrix {
        let n = self.n;
        let mut m = ExactMatrix::zeros(2 * n, 2 * n);
        for i in 0..n {
            m.set(i, n + i, GaussRat::i());
            m.set(n + i, i, -GaussRat::i());
        }
        m
    }
    fn root_vectors(&self) -> Vec<(RestrictedRoot, ExactMatrix)> {
        let n = self.n;
        let d = 2 * n;
        let mut out = Vec::new();
        for i in 1..=n {
            for j in i + 1..=n {
                out.push((
                    RestrictedRoot::Diff(i, j),
                    lincomb(d, &[(1, i, j), (1, i, n + j), (-1, j, i), (1, j, n + i), (1, n + i, j), (1, n + i, n + j), (1, n + j, i), (-1, n + j, n + i)]),
                ));
            }
        }
        for i in 1..=n {
            for j in i + 1..=n {
                out.push((
                    RestrictedRoot::Sum(i, j),
                    lincomb(d, &[(-1, i, j), (1, i, n + j), (-1, j, i), (1, j, n + i), (-1, n + i, j), (1, n + i, n + j), (-1, n + j, i), (1, n + j, n + i)]),
                ));
            }
        }
        for i in 1..=n {
            out.push((RestrictedRoot::Short(i, 0), lincomb(d, &[(1, i, i), (-1, i, n + i), (1, n + i, i), (-1, n + i, n + i)])));
        }
        out
    }
    fn printed_root_vectors(&self) -> Vec<(String, ExactMatrix)> {
        let n = self.n;
        let d = 2 * n;
        let mut out = Vec::new();
        for (root, m) in self.root_vectors() {
            out.push((format!("n[{root}]"), m));
        }
        for i in 1..=n {
            for j in i + 1..=n {
                out.push((
                    format!("nhat[e{i}-e{j}]"),
                    lincomb(d, &[(-1, i, j), (1, i, n + j), (1, j, i), (1, j, n + i), (1, n + i, j), (-1, n + i, n + j), (1, n + j, i), (1, n + j, n + i)]),
                ));
                out.push((
                    format!("nhat[e{i}+e{j}]"),
                    lincomb(d, &[(1, i, j), (1, i, n + j), (1, j, i), (1, j, n + i), (-1, n + i, j), (-1, n + i, n + j), (-1, n + j, i), (-1, n + j, n + i)]),
                ));
            }
            out.push((format!("nhat[e{i}]"), lincomb(d, &[(-1, i, i), (-1, i, n + i), (1, n + i, i), (1, n + i, n + i)])));
            // printed with column n+1 instead of n+i
            out.push((format!("a[e{i}]"), lincomb(d, &[(1, i, n + 1), (1, n + i, i)])));
        }
        if n == 2 {
            // the displayed 4x4 example for eps_2
            out.push(("display n[e2]".into(), ExactMatrix::from_ints(&[&[0, 0, 0, 0], &[0, 1, 0, 1], &[0, 0, 0, 0], &[0, -1, 0, -1]])));
        }
        out
    }
    fn a_basis(&self) -> Vec<ExactMatrix> {
        let n = self.n;
        (1..=n).map(|i| e(2 * n, i, n + i).add(&e(2 * n, n + i, i))).collect()
    }
    fn m_basis(&self) -> Vec<ExactMatrix> {
        Vec::new()
    }
    fn f_basis(&self) -> FBasis {
        let n = self.n;
        let mut cols = Vec::new();
        let mut labels = Vec::new();
        for (sign, tag) in [(1, ""), (-1, "'")] {
            for i in 1..=n {
                let mut v = vec![GaussRat::zero(); 2 * n];
                v[i - 1] = GaussRat::one();
                v[n + i - 1] = GaussRat::int(sign);
                cols.push(v);
                labels.push(format!("f{i}{tag}"));
            }
        }
        let from_f = ExactMatrix::from_columns(2 * n, &cols);
        let to_f = inverse(&from_f).expect("f-basis is a basis");
        FBasis { to_f, from_f, labels }
    }
    fn m_group(&self) -> MGroupData {
        let n = self.n;
        let sign_gens = (1..=n)
            .map(|i| {
                let mut d = vec![GaussRat::one(); 2 * n];
                d[i - 1] = GaussRat::int(-1);
                d[n + i - 1] = GaussRat::int(-1);
                ExactMatrix::diag(&d)
            })
            .collect();
        MGroupData { sign_gens, compact_reflections: Vec::new(), compact_lie: Vec::new() }
    }
    fn short_root_scale(&self) -> i64 {
        2
    }
    fn dmu(&self, mu: KChar, b: &ExactMatrix) -> Result<GaussRat, LieError> {
        if mu.second.is_some() {
            return Err(LieError::UnknownCharacter(mu.to_string()));
        }
        match mu.first {
            Sign1::Triv => Ok(GaussRat::zero()),
            Sign1::Det => {
                // b = [[A, B], [-B, A]] corresponds to A - iB in gl_n
                let n = self.n;
                let mut acc = GaussRat::zero();
                for i in 0..n {
                    acc += &b.get(i, i);
                    acc -= &(GaussRat::i() * b.get(i, n + i));
                }
                Ok(acc)
            }
        }
    }
    fn characters(&self) -> Vec<KChar> {
        vec![KChar::single(Sign1::Triv), KChar::single(Sign1::Det)]
    }
    fn contains(&self, x: &ExactMatrix) -> bool {
        let j = self.j();
        x.transpose().mul(&j).add(&j.mul(x)).is_zero()
    }
}

/// O(p,q) with form diag(I_p, -I_q), p + q odd.
#[derive(Clone, Debug)]
pub struct OddOrthogonal {
    pub p: usize,
    pub q: usize,
}

impl OddOrthogonal {
    fn boxed(params: &[usize]) -> Result<Box<dyn RealForm>, LieError> {
        match params {
            [p, q] if p >= q && *q >= 1 && (p + q) % 2 == 1 => Ok(Box::new(OddOrthogonal { p: *p, q: *q })),
            _ => Err(LieError::SpecInvalid(format!("opq needs p >= q >= 1 with p+q odd, got {params:?}"))),
        }
    }
    fn ipq(&self) -> ExactMatrix {
        let d: Vec<GaussRat> = (0..self.p + self.q).map(|i| GaussRat::int(if i < self.p { 1 } else { -1 })).collect();
        ExactMatrix::diag(&d)
    }
}

impl RealForm for OddOrthogonal {
    fn name(&self) -> &'static str {
        "opq"
    }
    fn spec(&self) -> GroupSpec {
        GroupSpec::opq(self.p, self.q)
    }
    fn dim_v(&self) -> usize {
        self.p + self.q
    }
    fn rank(&self) -> usize {
        (self.p + self.q - 1) / 2
    }
    fn real_rank(&self) -> usize {
        self.q
    }
    fn xi(&self) -> ExactMatrix {
        self.ipq()
    }
    fn root_vectors(&self) -> Vec<(RestrictedRoot, ExactMatrix)> {
        let (p, q) = (self.p, self.q);
        let d = p + q;
        let mut out = Vec::new();
        for i in 1..=q {
            for j in i + 1..=q {
                let (a, b, c, dd) = (p - j + 1, p - i + 1, p + i, p + j);
                // signs of (a,c) and (b,dd) differ from the printed table, which is not in so(p,q)
                out.push((
                    RestrictedRoot::Diff(i, j),
                    lincomb(d, &[(1, a, b), (-1, a, c), (-1, b, a), (-1, b, dd), (-1, c, a), (-1, c, dd), (-1, dd, b), (1, dd, c)]),
                ));
            }
        }
        for i in 1..=q {
            for j in i + 1..=q {
                let (a, b, c, dd) = (p - j + 1, p - i + 1, p + i, p + j);
                out.push((
                    RestrictedRoot::Sum(i, j),
                    lincomb(d, &[(1, a, b), (-1, a, c), (-1, b, a), (1, b, dd), (-1, c, a), (1, c, dd), (1, dd, b), (-1, dd, c)]),
                ));
            }
        }
        for i in 1..=q {
            for l in 1..=p - q {
                out.push((RestrictedRoot::Short(i, l), lincomb(d, &[(1, l, p - i + 1), (-1, l, p + i), (-1, p - i + 1, l), (-1, p + i, l)])));
            }
        }
        out
    }
    fn printed_root_vectors(&self) -> Vec<(String, ExactMatrix)> {
        let (p, q) = (self.p, self.q);
        let d = p + q;
        let mut out = Vec::new();
        for i in 1..=q {
            for j in i + 1..=q {
                let (a, b, c, dd) = (p - j + 1, p - i + 1, p + i, p + j);
                out.push((
                    format!("n[e{i}-e{j}]"),
                    lincomb(d, &[(1, a, b), (1, a, c), (-1, b, a), (1, b, dd), (-1, c, a), (-1, c, dd), (-1, dd, b), (1, dd, c)]),
                ));
                out.push((
                    format!("n[e{i}+e{j}]"),
                    lincomb(d, &[(1, a, b), (-1, a, c), (-1, b, a), (1, b, dd), (-1, c, a), (1, c, dd), (1, dd, b), (-1, dd, c)]),
                ));
                out.push((
                    format!("nhat[e{i}-e{j}]"),
                    lincomb(d, &[(1, a, b), (-1, a, c), (-1, b, a), (-1, b, dd), (1, c, a), (-1, c, dd), (1, dd, b), (1, dd, c)]),
                ));
                // printed under the label n[e_i+e_j] a second time
                out.push((
                    format!("second n[e{i}+e{j}]"),
                    lincomb(d, &[(1, a, b), (1, a, c), (-1, b, a), (-1, b, dd), (1, c, a), (1, c, dd), (-1, dd, b), (-1, dd, c)]),
                ));
            }
            for l in 1..=p - q {
                out.push((format!("n[e{i}^{l}]"), lincomb(d, &[(1, l, p - i + 1), (-1, l, p + i), (-1, p - i + 1, l), (-1, p + i, l)])));
            }
        }
        out
    }
    fn a_basis(&self) -> Vec<ExactMatrix> {
        let (p, q) = (self.p, self.q);
        (1..=q).map(|i| e(p + q, p - i + 1, p + i).add(&e(p + q, p + i, p - i + 1))).collect()
    }
    fn m_basis(&self) -> Vec<ExactMatrix> {
        let d = self.p + self.q;
        let r = self.p - self.q;
        let mut out = Vec::new();
        for x in 1..=r {
            for y in x + 1..=r {
                out.push(e(d, x, y).sub(&e(d, y, x)));
            }
        }
        out
    }
    fn f_basis(&self) -> FBasis {
        let (p, q) = (self.p, self.q);
        let d = p + q;
        let mut cols = Vec::new();
        let mut labels = Vec::new();
        for (sign, tag) in [(1, ""), (-1, "'")] {
            for i in 1..=q {
                let mut v = vec![GaussRat::zero(); d];
                v[p - i] = GaussRat::one();
                v[p + i - 1] = GaussRat::int(sign);
                cols.push(v);
                labels.push(format!("f{i}{tag}"));
            }
        }
        for l in 1..=p - q {
            let mut v = vec![GaussRat::zero(); d];
            v[l - 1] = GaussRat::one();
            cols.push(v);
            labels.push(format!("e{l}"));
        }
        let from_f = ExactMatrix::from_columns(d, &cols);
        let to_f = inverse(&from_f).expect("f-basis is a basis");
        FBasis { to_f, from_f, labels }
    }
    fn m_group(&self) -> MGroupData {
        let (p, q) = (self.p, self.q);
        let d = p + q;
        let sign_gens = (1..=q)
            .map(|i| {
                let mut v = vec![GaussRat::one(); d];
                v[p - i] = GaussRat::int(-1);
                v[p + i - 1] = GaussRat::int(-1);
                ExactMatrix::diag(&v)
            })
            .collect();
        let compact_reflections = (1..=p - q)
            .map(|l| {
                let mut v = vec![GaussRat::one(); d];
                v[l - 1] = GaussRat::int(-1);
                ExactMatrix::diag(&v)
            })
            .collect();
        MGroupData { sign_gens, compact_reflections, compact_lie: self.m_basis() }
    }
    fn short_root_scale(&self) -> i64 {
        1
    }
    fn dmu(&self, mu: KChar, _b: &ExactMatrix) -> Result<GaussRat, LieError> {
        // characters of O(p) x O(q) are trivial on the identity component
        match mu.second {
            Some(_) => Ok(GaussRat::zero()),
            None => Err(LieError::UnknownCharacter(mu.to_string())),
        }
    }
    fn characters(&self) -> Vec<KChar> {
        let mut v = Vec::new();
        for a in [Sign1::Triv, Sign1::Det] {
            for b in [Sign1::Triv, Sign1::Det] {
                v.push(KChar::pair(a, b));
            }
        }
        v
    }
    fn contains(&self, x: &ExactMatrix) -> bool {
        let g = self.ipq();
        x.transpose().mul(&g).add(&g.mul(x)).is_zero()
    }
}

/// Everything downstream modules need about g, k, p and the Iwasawa pieces.
#[derive(Clone, Debug)]
pub struct LieAlgebraData {
    pub spec: GroupSpec,
    pub dim_v: usize,
    pub rank: usize,
    pub real_rank: usize,
    pub basis_k: Vec<ExactMatrix>,
    pub basis_p: Vec<ExactMatrix>,
    pub labels_k: Vec<String>,
    pub labels_p: Vec<String>,
    pub xi: ExactMatrix,
    /// Gram of kappa * tr(XY) on basis_k followed by basis_p.
    pub form_gram: ExactMatrix,
    pub kappa: GaussRat,
    pub a_basis: Vec<ExactMatrix>,
    pub n_plus: Vec<(RestrictedRoot, ExactMatrix)>,
    pub n_minus: Vec<(RestrictedRoot, ExactMatrix)>,
    pub m_basis: Vec<ExactMatrix>,
    pub duals_k: Vec<ExactMatrix>,
    pub duals_p: Vec<ExactMatrix>,
    /// Coefficient of the trivial projector in Omega_12 = swap + m0 pr, after calibration.
    pub m0: GaussRat,
}

impl LieAlgebraData {
    pub fn basis(&self) -> Vec<ExactMatrix> {
        self.basis_k.iter().chain(self.basis_p.iter()).cloned().collect()
    }
    pub fn duals(&self) -> Vec<ExactMatrix> {
        self.duals_k.iter().chain(self.duals_p.iter()).cloned().collect()
    }
    pub fn dim(&self) -> usize {
        self.basis_k.len() + self.basis_p.len()
    }
    pub fn theta(&self, x: &ExactMatrix) -> ExactMatrix {
        self.xi.mul(x).mul(&self.xi)
    }
    pub fn form(&self, x: &ExactMatrix, y: &ExactMatrix) -> GaussRat {
        &self.kappa * &x.mul(y).trace()
    }
    /// Casimir of k on V, sum of b b* over the k-basis.
    pub fn casimir_k(&self) -> ExactMatrix {
        let mut c = ExactMatrix::zeros(self.dim_v, self.dim_v);
        for (b, d) in self.basis_k.iter().zip(&self.duals_k) {
            c = c.add(&b.mul(d));
        }
        c
    }
    pub fn casimir(&self) -> ExactMatrix {
        let mut c = self.casimir_k();
        for (b, d) in self.basis_p.iter().zip(&self.duals_p) {
            c = c.add(&b.mul(d));
        }
        c
    }
    /// Replace the k and p bases, recomputing duals with the current kappa.
    pub fn with_bases(&self, basis_k: Vec<ExactMatrix>, basis_p: Vec<ExactMatrix>) -> Result<Self, LieError> {
        let mut out = self.clone();
        out.basis_k = basis_k;
        out.basis_p = basis_p;
        out.labels_k = (0..out.basis_k.len()).map(|i| format!("k{i}")).collect();
        out.labels_p = (0..out.basis_p.len()).map(|i| format!("p{i}")).collect();
        out.refresh_duals()?;
        Ok(out)
    }
    fn refresh_duals(&mut self) -> Result<(), LieError> {
        let basis = self.basis();
        let n = basis.len();
        let mut g = ExactMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                g.set(i, j, self.form(&basis[i], &basis[j]));
            }
        }
        let gi = inverse(&g).map_err(|_| LieError::FormDegenerate)?;
        let duals = dual_combinations(&basis, &gi);
        let nk = self.basis_k.len();
        self.duals_k = duals[..nk].to_vec();
        self.duals_p = duals[nk..].to_vec();
        self.form_gram = g;
        Ok(())
    }
}

fn dual_combinations(basis: &[ExactMatrix], gram_inv: &ExactMatrix) -> Vec<ExactMatrix> {
    let n = basis.len();
    let d = basis[0].rows();
    (0..n)
        .map(|j| {
            let mut acc = ExactMatrix::zeros(d, d);
            for i in 0..n {
                let c = gram_inv.get(i, j);
                if !c.is_zero() {
                    acc.add_scaled(&basis[i], &c);
                }
            }
            acc
        })
        .collect()
}

/// Build g with the fixed bases, duals and calibrated form normalization.
pub fn build_algebra(spec: &GroupSpec) -> Result<LieAlgebraData, LieError> {
    let rf = spec.real_form()?;
    let xi = rf.xi();
    let theta = |x: &ExactMatrix| xi.mul(x).mul(&xi);
    let n_plus = rf.root_vectors();
    let n_minus: Vec<(RestrictedRoot, ExactMatrix)> = n_plus.iter().map(|(r, m)| (*r, theta(m))).collect();
    let m_basis = rf.m_basis();
    let a_basis = rf.a_basis();
    let mut basis_k = Vec::new();
    let mut labels_k = Vec::new();
    let mut basis_p = Vec::new();
    let mut labels_p = Vec::new();
    for ((r, n), (_, nh)) in n_plus.iter().zip(&n_minus) {
        basis_k.push(n.add(nh));
        labels_k.push(format!("k[{r}]"));
        basis_p.push(n.sub(nh));
        labels_p.push(format!("p[{r}]"));
    }
    for (i, m) in m_basis.iter().enumerate() {
        basis_k.push(m.clone());
        labels_k.push(format!("m{}", i + 1));
    }
    for (i, a) in a_basis.iter().enumerate() {
        basis_p.push(a.clone());
        labels_p.push(format!("a[e{}]", i + 1));
    }
    let mut data = LieAlgebraData {
        spec: spec.clone(),
        dim_v: rf.dim_v(),
        rank: rf.rank(),
        real_rank: rf.real_rank(),
        basis_k,
        basis_p,
        labels_k,
        labels_p,
        xi,
        form_gram: ExactMatrix::zeros(0, 0),
        kappa: GaussRat::one(),
        a_basis,
        n_plus,
        n_minus,
        m_basis,
        duals_k: Vec::new(),
        duals_p: Vec::new(),
        m0: GaussRat::zero(),
    };
    data.refresh_duals()?;
    let (kappa, m0) = calibrate_kappa(&data)?;
    data.kappa = kappa;
    data.m0 = m0;
    data.refresh_duals()?;
    Ok(data)
}

/// Dual basis under kappa * tr(XY).
pub fn dual_basis(data: &LieAlgebraData) -> Result<Vec<ExactMatrix>, LieError> {
    let gi = inverse(&data.form_gram).map_err(|_| LieError::FormDegenerate)?;
    Ok(dual_combinations(&data.basis(), &gi))
}

/// The unique kappa making the swap coefficient of Omega_12 equal to 1; returns (kappa, m0).
pub fn calibrate_kappa(data: &LieAlgebraData) -> Result<(GaussRat, GaussRat), LieError> {
    let omega = crate::tensorops::omega_on_vv(data, crate::tensorops::OmegaPart::Full);
    let swap = crate::tensorops::swap_on_vv(data.dim_v);
    let pr = crate::tensorops::trivial_projector_on_vv(data);
    let a = ExactMatrix::from_columns(omega.rows() * omega.cols(), &[swap.vectorize(), pr.vectorize()]);
    let sol = solve_linear(&a, &omega.vectorize()).map_err(|_| LieError::NoCalibration)?;
    if sol[0].is_zero() {
        return Err(LieError::NoCalibration);
    }
    // Omega scales like 1/kappa, so the calibrated kappa is the current kappa times the swap coefficient
    let kappa = &data.kappa * &sol[0];
    let m0 = &sol[1] / &sol[0];
    Ok((kappa, m0))
}

/// Split x into k, a and n+ components.
pub fn iwasawa_decompose(data: &LieAlgebraData, x: &ExactMatrix) -> Result<(ExactMatrix, ExactMatrix, ExactMatrix), LieError> {
    let coords = iwasawa_coords(data, x)?;
    let nk = data.basis_k.len();
    let na = data.a_basis.len();
    let d = data.dim_v;
    let mut xk = ExactMatrix::zeros(d, d);
    let mut xa = ExactMatrix::zeros(d, d);
    let mut xn = ExactMatrix::zeros(d, d);
    for (i, c) in coords.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        if i < nk {
            xk.add_scaled(&data.basis_k[i], c);
        } else if i < nk + na {
            xa.add_scaled(&data.a_basis[i - nk], c);
        } else {
            xn.add_scaled(&data.n_plus[i - nk - na].1, c);
        }
    }
    Ok((xk, xa, xn))
}

/// Coordinates of x against basis_k, then a_basis, then n_plus.
pub fn iwasawa_coords(data: &LieAlgebraData, x: &ExactMatrix) -> Result<ExactVector, LieError> {
    let vecs: Vec<ExactVector> = data
        .basis_k
        .iter()
        .chain(data.a_basis.iter())
        .chain(data.n_plus.iter().map(|(_, m)| m))
        .map(|m| m.vectorize())
        .collect();
    let sc = SubspaceCoords::new(data.dim_v * data.dim_v, &vecs).map_err(|_| LieError::FormDegenerate)?;
    sc.coords(&x.vectorize()).ok_or(LieError::NotInAlgebra)
}

/// Differential of the K-character `mu` at b in k.
pub fn dmu(spec: &GroupSpec, mu: KChar, b: &ExactMatrix) -> Result<GaussRat, LieError> {
    spec.real_form()?.dmu(mu, b)
}

/// Is span(basis) closed under brackets?
pub fn bracket_closed(data: &LieAlgebraData) -> bool {
    let basis = data.basis();
    let vecs: Vec<ExactVector> = basis.iter().map(|m| m.vectorize()).collect();
    let Ok(sc) = SubspaceCoords::new(data.dim_v * data.dim_v, &vecs) else { return false };
    for i in 0..basis.len() {
        for j in i + 1..basis.len() {
            if sc.coords(&basis[i].commutator(&basis[j]).vectorize()).is_none() {
                return false;
            }
        }
    }
    true
}

/// The joint null space of a family of matrices, used for fixed vectors.
pub fn joint_kernel(ops: &[ExactMatrix], dim: usize) -> Vec<ExactVector> {
    let mut stacked = ExactMatrix::zeros(ops.len() * dim, dim);
    for (o, op) in ops.iter().enumerate() {
        for (i, j, v) in op.entries() {
            stacked.set(o * dim + i, j, v.clone());
        }
    }
    kernel_basis(&stacked)
}
