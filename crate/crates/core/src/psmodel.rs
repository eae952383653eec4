//! Finite model of the functor image of a minimal principal series: the M-invariants of
//! (character) ⊗ V^{⊗L}, with every VW generator realized on it, including the leg-0 terms.

use crate::bcvw::{check_relations, consistent_normalization, derive_quotient_constants, Assignment, BcvwError, Convention, Normalization, Presentation, RelationReport};
use crate::exactlin::{inverse, kernel_basis, rank, ExactMatrix, ExactVector, GaussRat, LinAlgError, SubspaceCoords};
use crate::heckealg::{principal_series, HeckeModule, HeckeParams};
use crate::liealg::{build_algebra, iwasawa_coords, iwasawa_decompose, GroupSpec, KChar, LieAlgebraData, LieError, RealForm, Sign1};
use crate::tensorops::{build_omega, build_swap, build_trivial_projector, build_xi_leg, embed_single, OmegaPart, TensorError, TensorSpace};
use crate::wbgroup::{enumerate_group, GroupError, SignedPerm, SimpleReflection};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error(transparent)]
    Lie(#[from] LieError),
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error(transparent)]
    Linear(#[from] LinAlgError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Relations(#[from] BcvwError),
    #[error("invariant space has dimension {found}, expected {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("generator {0} does not preserve the invariant subspace")]
    SubspaceNotPreserved(String),
    #[error("intertwiner fails for generator {generator} on basis vector {column}")]
    IntertwinerFails { generator: String, column: usize },
    #[error("cyclic vector is not an eigenvector of eps_{0}")]
    CyclicNotEigen(usize),
    #[error("subspace is not invariant under {0}")]
    NotInvariant(String),
    #[error("k = {k} out of range 0..={max}")]
    BadK { k: usize, max: usize },
    #[error("nu has length {found}, expected {expected}")]
    BadNu { expected: usize, found: usize },
    #[error("bad model config: {0}")]
    Config(String),
}

/// Which functor: the mu side has k legs, the mubar side has (real rank - k).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Mu,
    Mubar,
}

impl FromStr for Side {
    type Err = ModelError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "mu" => Ok(Side::Mu),
            "mubar" => Ok(Side::Mubar),
            _ => Err(ModelError::Config(format!("side must be mu or mubar, got {s}"))),
        }
    }
}

/// Where the substituted k-part sits relative to (b*)_l in Omega_{0l}.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Ordering {
    /// S(b) ∘ (b*)_l
    KLeft,
    /// (b*)_l ∘ S(b)
    KRight,
}

#[derive(Clone, Debug)]
pub struct PsSpec {
    pub group: GroupSpec,
    /// Index k of the M-character delta^k.
    pub k: usize,
    /// Character of the compact O(p-q) factor of M (ignored for Sp).
    pub delta_compact: Sign1,
    pub nu: Vec<GaussRat>,
    pub side: Side,
    /// How a acts on the cyclic vector.
    pub a_action: AAction,
}

/// Character by which a acts on the cyclic vector of the induced module.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AAction {
    /// a acts by nu.
    Nu,
    /// a acts by nu - rho (normalized induction).
    Rho,
}

/// Text form of a model spec, as read from a config file.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PsSpecConfig {
    pub group: String,
    pub k: usize,
    #[serde(default)]
    pub delta: Option<String>,
    pub nu: Vec<String>,
    #[serde(default = "default_side")]
    pub side: String,
    #[serde(default)]
    pub a_action: Option<AAction>,
}

fn default_side() -> String {
    "mu".into()
}

impl PsSpec {
    pub fn new(group: GroupSpec, k: usize, nu: Vec<GaussRat>, side: Side) -> Self {
        PsSpec { group, k, delta_compact: Sign1::Triv, nu, side, a_action: AAction::Rho }
    }

    pub fn from_config(c: &PsSpecConfig) -> Result<Self, ModelError> {
        let group: GroupSpec = c.group.parse()?;
        let delta_compact = match c.delta.as_deref() {
            None | Some("triv") => Sign1::Triv,
            Some("det") => Sign1::Det,
            Some(x) => return Err(ModelError::Config(format!("delta must be triv or det, got {x}"))),
        };
        let nu = c.nu.iter().map(|s| s.parse::<GaussRat>()).collect::<Result<Vec<_>, _>>()?;
        let spec = PsSpec { group, k: c.k, delta_compact, nu, side: c.side.parse()?, a_action: c.a_action.unwrap_or(AAction::Rho) };
        spec.validate()?;
        Ok(spec)
    }

    pub fn real_rank(&self) -> usize {
        self.group.real_form().map(|r| r.real_rank()).unwrap_or(0)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let r = self.group.real_form()?.real_rank();
        if self.k > r {
            return Err(ModelError::BadK { k: self.k, max: r });
        }
        if self.nu.len() != r {
            return Err(ModelError::BadNu { expected: r, found: self.nu.len() });
        }
        Ok(())
    }

    /// Number of tensor legs.
    pub fn legs(&self) -> usize {
        match self.side {
            Side::Mu => self.k,
            Side::Mubar => self.real_rank() - self.k,
        }
    }

    /// The K-character whose isotypic part the functor extracts.
    pub fn mu(&self) -> KChar {
        let sp = self.group.family == "sp";
        match (sp, self.side, self.delta_compact) {
            (true, Side::Mu, _) => KChar::single(Sign1::Triv),
            (true, Side::Mubar, _) => KChar::single(Sign1::Det),
            (false, Side::Mu, Sign1::Triv) => KChar::pair(Sign1::Triv, Sign1::Det),
            (false, Side::Mubar, Sign1::Triv) => KChar::pair(Sign1::Triv, Sign1::Triv),
            (false, Side::Mu, Sign1::Det) => KChar::pair(Sign1::Det, Sign1::Triv),
            (false, Side::Mubar, Sign1::Det) => KChar::pair(Sign1::Det, Sign1::Det),
        }
    }

    /// delta on the i-th sign generator of M (1-based).
    ///
    /// Sp: -1 on the first k generators. O(p,q): +1 on the first k and -1 on the rest, which
    /// is the convention under which the mu side sits on f_1..f_k.
    pub fn delta_on_sign_gen(&self, i: usize) -> i64 {
        let first = i <= self.k;
        match (self.group.family == "sp", first) {
            (true, true) | (false, false) => -1,
            _ => 1,
        }
    }
}

/// Value of a K-character on a diagonal element of M.
pub fn k_char_on_m(spec: &GroupSpec, mu: KChar, g: &ExactMatrix) -> GaussRat {
    let block = |lo: usize, hi: usize| {
        let mut acc = GaussRat::one();
        for i in lo..hi {
            acc = acc * g.get(i, i);
        }
        acc
    };
    let pick = |s: Sign1, v: GaussRat| if s == Sign1::Det { v } else { GaussRat::one() };
    if spec.family == "sp" {
        // diagonal elements of M sit in U(n) as their top-left block
        let n = spec.params[0] / 2;
        pick(mu.first, block(0, n))
    } else {
        let (p, q) = (spec.params[0], spec.params[1]);
        let a = pick(mu.first, block(0, p));
        let b = pick(mu.second.unwrap_or(Sign1::Triv), block(p, p + q));
        a * b
    }
}

/// The model space with its bases and generator matrices.
#[derive(Clone, Debug)]
pub struct ModelSpace {
    pub spec: PsSpec,
    pub data: LieAlgebraData,
    pub mu: KChar,
    pub ordering: Ordering,
    pub norm: Normalization,
    pub ambient: TensorSpace,
    /// f-indices carried by the legs, in order.
    pub leg_indices: Vec<usize>,
    /// Joint fixed space of M with the character twist, from a kernel computation.
    pub invariant_basis: Vec<ExactVector>,
    /// f-orbit vectors, indexed like `enumerate_group(L)`; this is the working basis.
    pub labeled_basis: Vec<ExactVector>,
    pub group_order: Vec<SignedPerm>,
    /// Position of f_{a_1} ⊗ … ⊗ f_{a_L} in the working basis.
    pub cyclic: usize,
    coords: SubspaceCoords,
    /// Generator matrices in the working basis.
    pub gens: BTreeMap<String, ExactMatrix>,
}

/// Omega_{0l} and its parts built by leg-0 substitution on the ambient space.
pub fn omega_leg0(data: &LieAlgebraData, spec: &PsSpec, rf: &dyn RealForm, space: TensorSpace, l: usize, part: OmegaPart, ordering: Ordering) -> Result<ExactMatrix, ModelError> {
    let dim = space.total_dim();
    let mu = spec.mu();
    let nk = data.basis_k.len();
    let (bs, ds): (Vec<&ExactMatrix>, Vec<&ExactMatrix>) = match part {
        OmegaPart::K => (data.basis_k.iter().collect(), data.duals_k.iter().collect()),
        OmegaPart::P => (data.basis_p.iter().collect(), data.duals_p.iter().collect()),
        OmegaPart::Full => (data.basis_k.iter().chain(&data.basis_p).collect(), data.duals_k.iter().chain(&data.duals_p).collect()),
    };
    let mut acc = ExactMatrix::zeros(dim, dim);
    for (b, bd) in bs.into_iter().zip(ds) {
        let s = leg0_substitute(data, spec, rf, space, b, &mu, nk)?;
        let dual = embed_single(space, bd, l)?;
        let term = match ordering {
            Ordering::KLeft => s.mul(&dual),
            Ordering::KRight => dual.mul(&s),
        };
        acc = acc.add(&term);
    }
    Ok(acc)
}

/// The operator replacing (b)_0: nu(b_A) + dmu(b_K) - Σ_{legs} (b_K)_leg; the n-part drops out.
pub fn leg0_substitute(data: &LieAlgebraData, spec: &PsSpec, rf: &dyn RealForm, space: TensorSpace, b: &ExactMatrix, mu: &KChar, nk: usize) -> Result<ExactMatrix, ModelError> {
    let (bk, _, _) = iwasawa_decompose(data, b)?;
    let coords = iwasawa_coords(data, b)?;
    let mut scalar = rf.dmu(*mu, &bk)?;
    for (i, nu) in effective_nu(data, spec).iter().enumerate() {
        scalar += &(nu * &coords[nk + i]);
    }
    let mut s = ExactMatrix::scalar(space.total_dim(), &scalar);
    for leg in 1..=space.k {
        s = s.sub(&embed_single(space, &bk, leg)?);
    }
    Ok(s)
}

/// rho on the a-basis: half the trace of ad(a_i) on n.
pub fn rho(data: &LieAlgebraData) -> Vec<GaussRat> {
    data.a_basis
        .iter()
        .map(|a| {
            let mut acc = GaussRat::zero();
            for (_, n) in &data.n_plus {
                acc += &a.commutator(n).proportionality(n).expect("root vector is an ad(a) eigenvector");
            }
            acc * GaussRat::frac(1, 2)
        })
        .collect()
}

/// The character by which a acts on the cyclic vector.
pub fn effective_nu(data: &LieAlgebraData, spec: &PsSpec) -> Vec<GaussRat> {
    match spec.a_action {
        AAction::Nu => spec.nu.clone(),
        AAction::Rho => spec.nu.iter().zip(rho(data)).map(|(n, r)| n - &r).collect(),
    }
}

fn vstack(blocks: &[ExactMatrix], cols: usize) -> ExactMatrix {
    let rows: usize = blocks.iter().map(|b| b.rows()).sum();
    let mut out = ExactMatrix::zeros(rows, cols);
    let mut off = 0;
    for b in blocks {
        for (r, c, v) in b.entries() {
            out.set(off + r, c, v.clone());
        }
        off += b.rows();
    }
    out
}

fn tensor_power(g: &ExactMatrix, l: usize) -> ExactMatrix {
    let mut acc = ExactMatrix::identity(1);
    for _ in 0..l {
        acc = acc.kron(g);
    }
    acc
}

fn factorial(n: usize) -> usize {
    (1..=n).product()
}

/// Joint fixed vectors of M twisted by delta·mu, and the f-indices the legs must carry.
pub fn enumerate_m_invariants(spec: &PsSpec) -> Result<(Vec<ExactVector>, Vec<usize>), ModelError> {
    spec.validate()?;
    let rf = spec.group.real_form()?;
    let mu = spec.mu();
    let l = spec.legs();
    let dim_v = rf.dim_v();
    let space = TensorSpace::new(dim_v, l);
    let total = space.total_dim();
    let mg = rf.m_group();
    let mut blocks = Vec::new();
    let mut leg_indices = Vec::new();
    for (i, g) in mg.sign_gens.iter().enumerate() {
        let chi = GaussRat::int(spec.delta_on_sign_gen(i + 1)) * k_char_on_m(&spec.group, mu, g);
        if chi == GaussRat::int(-1) {
            leg_indices.push(i + 1);
        }
        blocks.push(tensor_power(g, l).sub(&ExactMatrix::scalar(total, &chi)));
    }
    let delta_compact = GaussRat::int(if spec.delta_compact == Sign1::Det { -1 } else { 1 });
    for g in &mg.compact_reflections {
        let chi = &delta_compact * &k_char_on_m(&spec.group, mu, g);
        blocks.push(tensor_power(g, l).sub(&ExactMatrix::scalar(total, &chi)));
    }
    for x in &mg.compact_lie {
        let mut acc = ExactMatrix::scalar(total, &-rf.dmu(mu, x)?);
        for leg in 1..=l {
            acc = acc.add(&embed_single(space, x, leg)?);
        }
        blocks.push(acc);
    }
    let basis = if blocks.is_empty() { (0..total).map(|i| ExactMatrix::identity(total).column(i)).collect() } else { kernel_basis(&vstack(&blocks, total)) };
    let expected = factorial(l) << l;
    if basis.len() != expected || leg_indices.len() != l {
        return Err(ModelError::DimensionMismatch { expected, found: basis.len() });
    }
    Ok((basis, leg_indices))
}

/// f-orbit vector for w: leg |w(j)| carries f_{a_j}, or f'_{a_j} when w(j) < 0. The W(B_L) generators
/// then act on labels by left multiplication.
fn labeled_vector(rf: &dyn RealForm, space: TensorSpace, legs: &[usize], w: &SignedPerm) -> ExactVector {
    let fb = rf.f_basis();
    let mut content = vec![Vec::new(); space.k];
    for j in 0..space.k {
        content[w.perm[j] - 1] = fb.vector(legs[j], w.signs[j] > 0);
    }
    let mut v = vec![GaussRat::one()];
    for f in &content {
        let mut nv = Vec::with_capacity(v.len() * f.len());
        for a in &v {
            for b in f {
                nv.push(a * b);
            }
        }
        v = nv;
    }
    v
}

impl ModelSpace {
    pub fn build(spec: &PsSpec, ordering: Ordering) -> Result<Self, ModelError> {
        let (invariant_basis, leg_indices) = enumerate_m_invariants(spec)?;
        let rf = spec.group.real_form()?;
        let data = build_algebra(&spec.group)?;
        let l = spec.legs();
        let space = TensorSpace::new(data.dim_v, l);
        let group_order = enumerate_group(l)?;
        let labeled_basis: Vec<ExactVector> = group_order.iter().map(|w| labeled_vector(rf.as_ref(), space, &leg_indices, w)).collect();
        let coords = SubspaceCoords::new(space.total_dim(), &labeled_basis)?;
        for v in &invariant_basis {
            if coords.coords(v).is_none() {
                return Err(ModelError::DimensionMismatch { expected: labeled_basis.len(), found: invariant_basis.len() });
            }
        }
        let cyclic = group_order.iter().position(|w| *w == SignedPerm::identity(l)).unwrap_or(0);
        let norm = consistent_normalization(&data, Convention::Consistent);
        let mut model = ModelSpace {
            spec: spec.clone(),
            mu: spec.mu(),
            data,
            ordering,
            norm,
            ambient: space,
            leg_indices,
            invariant_basis,
            labeled_basis,
            group_order,
            cyclic,
            coords,
            gens: BTreeMap::new(),
        };
        for (name, op) in model.ambient_generators(rf.as_ref())? {
            let m = model.coords.restrict(&op).ok_or_else(|| ModelError::SubspaceNotPreserved(name.clone()))?;
            model.gens.insert(name, m);
        }
        Ok(model)
    }

    pub fn legs(&self) -> usize {
        self.ambient.k
    }

    pub fn dim(&self) -> usize {
        self.labeled_basis.len()
    }

    fn ambient_generators(&self, rf: &dyn RealForm) -> Result<Vec<(String, ExactMatrix)>, ModelError> {
        let space = self.ambient;
        let l = space.k;
        let data = &self.data;
        let n = &self.norm;
        let mut out = Vec::new();
        for i in 1..l {
            out.push((format!("t{i}"), build_swap(space, i, i + 1)?.matrix.scale(&n.sigma)));
            out.push((format!("e{i}"), build_trivial_projector(space, data, i)?.matrix.scale(&n.gamma)));
        }
        for i in 1..=l {
            let mut z = omega_leg0(data, &self.spec, rf, space, i, OmegaPart::Full, self.ordering)?;
            for j in 1..i {
                z = z.add(&build_omega(space, data, j, i, OmegaPart::Full)?.matrix);
            }
            z = z.scale(&n.alpha).add(&ExactMatrix::scalar(space.total_dim(), &n.beta));
            out.push((format!("z{i}"), z));
            out.push((format!("theta{i}"), build_xi_leg(space, data, i)?.matrix));
        }
        Ok(out)
    }

    /// Restrict an ambient operator to the model, in the working basis.
    pub fn restrict(&self, op: &ExactMatrix) -> Option<ExactMatrix> {
        self.coords.restrict(op)
    }

    pub fn coords_of(&self, v: &[GaussRat]) -> Option<ExactVector> {
        self.coords.coords(v)
    }

    pub fn assignment(&self) -> Assignment {
        Assignment { k: self.legs(), dim: self.dim(), gens: self.gens.clone(), k_action: Vec::new() }
    }

    pub fn check_relations(&self) -> RelationReport {
        check_relations(&Presentation::type_bc(self.legs()), &self.assignment())
    }

    pub fn cyclic_vector(&self) -> ExactVector {
        let mut v = vec![GaussRat::zero(); self.dim()];
        v[self.cyclic] = GaussRat::one();
        v
    }

    /// Omega_{0l} (or a part) restricted to the model.
    pub fn omega0(&self, l: usize, part: OmegaPart) -> Result<ExactMatrix, ModelError> {
        let rf = self.spec.group.real_form()?;
        let op = omega_leg0(&self.data, &self.spec, rf.as_ref(), self.ambient, l, part, self.ordering)?;
        self.restrict(&op).ok_or_else(|| ModelError::SubspaceNotPreserved(format!("Omega_0{l}")))
    }

    /// nu restricted to the legs.
    pub fn nu_on_legs(&self) -> Vec<GaussRat> {
        self.leg_indices.iter().map(|&a| self.spec.nu[a - 1].clone()).collect()
    }

    /// Σ_b dmu(b_K) (b*)_l on the model: the extra term a nontrivial dmu adds to Omega_{0l}.
    pub fn dmu_term(&self, l: usize) -> Result<ExactMatrix, ModelError> {
        let rf = self.spec.group.real_form()?;
        let dim = self.ambient.total_dim();
        let mut acc = ExactMatrix::zeros(dim, dim);
        for (b, bd) in self.data.basis().iter().zip(self.data.duals()) {
            let (bk, _, _) = iwasawa_decompose(&self.data, b)?;
            let c = rf.dmu(self.mu, &bk)?;
            if !c.is_zero() {
                acc.add_scaled(&embed_single(self.ambient, &bd, l)?, &c);
            }
        }
        self.restrict(&acc).ok_or_else(|| ModelError::SubspaceNotPreserved("dmu term".into()))
    }

    fn cyclic_formula(&self, printed: bool) -> Result<bool, ModelError> {
        let l_tot = self.legs();
        let nu: Vec<GaussRat> = {
            let eff = effective_nu(&self.data, &self.spec);
            self.leg_indices.iter().map(|&a| eff[a - 1].clone()).collect()
        };
        let cyc = self.cyclic_vector();
        for l in 1..=l_tot {
            let lhs = self.omega0(l, OmegaPart::Full)?.mul_vec(&cyc);
            // printed: one id per other leg; computed: one id per f-index below a_l
            let shift = if printed { l_tot - 1 } else { self.leg_indices[l - 1] - 1 };
            let mut op = ExactMatrix::scalar(self.dim(), &(&nu[l - 1] - &GaussRat::int(shift as i64))).add(&self.dmu_term(l)?);
            for t in 1..l {
                let sw = self.restrict(&build_swap(self.ambient, t, l)?.matrix).ok_or_else(|| ModelError::SubspaceNotPreserved(format!("s{t}{l}")))?;
                op = op.sub(&sw);
            }
            if op.mul_vec(&cyc) != lhs {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Omega_{0l} on the cyclic vector is nu_l - (a_l - 1) - Σ_{t<l} s_{tl} plus the dmu term, for every l.
    pub fn cyclic_formula_holds(&self) -> Result<bool, ModelError> {
        self.cyclic_formula(false)
    }

    /// The printed variant: nu_l - Σ_{t<l}(s_{tl} + 1) - Σ_{t>l} 1.
    pub fn printed_cyclic_formula_holds(&self) -> Result<bool, ModelError> {
        self.cyclic_formula(true)
    }

    /// The image of a signed permutation, built from a reduced word in t_i and theta_L.
    pub fn group_element(&self, w: &SignedPerm) -> ExactMatrix {
        let l = self.legs();
        let mut m = ExactMatrix::identity(self.dim());
        for s in w.reduced_word() {
            let g = match s {
                SimpleReflection::S(i) => &self.gens[&format!("t{i}")],
                SimpleReflection::Theta => &self.gens[&format!("theta{l}")],
            };
            m = m.mul(g);
        }
        m
    }

    /// The pi(w_0)-antisymmetric part of z_i equals alpha Omega^p_{0i}, for each i.
    pub fn drinfeld_parts_match(&self) -> Result<bool, ModelError> {
        let l = self.legs();
        let w0 = (1..=l).fold(ExactMatrix::identity(self.dim()), |acc, j| acc.mul(&self.gens[&format!("theta{j}")]));
        let half = GaussRat::frac(1, 2);
        for i in 1..=l {
            let z = &self.gens[&format!("z{i}")];
            let zt = z.sub(&w0.mul(z).mul(&w0)).scale(&half);
            if zt != self.omega0(i, OmegaPart::P)?.scale(&self.norm.alpha) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// theta_L z_L + z_L theta_L = 2 theta_L (alpha Σ_{i<L} Omega^k_{iL} + beta), legs i from 0.
    pub fn anticommutator_matches_k_part(&self) -> Result<bool, ModelError> {
        let l = self.legs();
        if l == 0 {
            return Ok(true);
        }
        let th = &self.gens[&format!("theta{l}")];
        let z = &self.gens[&format!("z{l}")];
        let mut k_sum = self.omega0(l, OmegaPart::K)?;
        for i in 1..l {
            let op = build_omega(self.ambient, &self.data, i, l, OmegaPart::K)?.matrix;
            k_sum = k_sum.add(&self.restrict(&op).ok_or_else(|| ModelError::SubspaceNotPreserved("Omega_k".into()))?);
        }
        let rhs = th.mul(&k_sum.scale(&self.norm.alpha).add(&ExactMatrix::scalar(self.dim(), &self.norm.beta))).scale(&GaussRat::int(2));
        Ok(th.anticommutator(z) == rhs)
    }
}

/// Constants read off the model and the Hecke comparison.
#[derive(Clone, Debug, Serialize)]
pub struct HeckeMatch {
    #[serde(serialize_with = "crate::bcvw::ser_rat")]
    pub r_shift: GaussRat,
    #[serde(serialize_with = "crate::bcvw::ser_rat")]
    pub c_hecke: GaussRat,
    #[serde(serialize_with = "ser_vec")]
    pub lambda: Vec<GaussRat>,
    /// Maps the model's working basis to the principal series basis {w·1}.
    #[serde(skip)]
    pub intertwiner: ExactMatrix,
}

fn ser_vec<S: serde::Serializer>(v: &[GaussRat], s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for x in v {
        seq.serialize_element(&x.to_string())?;
    }
    seq.end()
}

/// Derive (r, c), read lambda off the cyclic vector, and intertwine with X(lambda) for H_L(c).
pub fn hecke_isomorphism_check(model: &ModelSpace) -> Result<(HeckeMatch, HeckeModule), ModelError> {
    let l = model.legs();
    if l == 0 {
        // empty tensor: the one-dimensional module of the trivial algebra
        let id = ExactMatrix::identity(1);
        let module = HeckeModule { k: 0, basis: vec![SignedPerm::identity(0)], s: Vec::new(), theta: Vec::new(), eps: Vec::new() };
        return Ok((HeckeMatch { r_shift: GaussRat::zero(), c_hecke: GaussRat::zero(), lambda: Vec::new(), intertwiner: id }, module));
    }
    let report = model.check_relations();
    let (r, c) = derive_quotient_constants(&report)?;
    let dim = model.dim();
    let eps: Vec<ExactMatrix> = (1..=l).map(|i| model.gens[&format!("z{i}")].sub(&ExactMatrix::scalar(dim, &r))).collect();
    let cyc = model.cyclic_vector();
    let mut lambda = Vec::new();
    for (i, e) in eps.iter().enumerate() {
        let img = e.mul_vec(&cyc);
        let val = img[model.cyclic].clone();
        if img != cyc.iter().map(|x| x * &val).collect::<Vec<_>>() {
            return Err(ModelError::CyclicNotEigen(i + 1));
        }
        lambda.push(val);
    }
    let p = HeckeParams::new(l, c.clone());
    let ps = principal_series(&p, &lambda);
    // columns: pi(w) cyclic in model coordinates, ordered like the principal series basis
    let cols: Vec<ExactVector> = ps.basis.iter().map(|w| model.group_element(w).mul_vec(&cyc)).collect();
    let pmat = ExactMatrix::from_columns(dim, &cols);
    let t = inverse(&pmat)?;
    let mut pairs: Vec<(String, &ExactMatrix, &ExactMatrix)> = Vec::new();
    for i in 1..l {
        pairs.push((format!("t{i}"), &model.gens[&format!("t{i}")], &ps.s[i - 1]));
    }
    for j in 1..=l {
        pairs.push((format!("theta{j}"), &model.gens[&format!("theta{j}")], &ps.theta[j - 1]));
        pairs.push((format!("eps{j}"), &eps[j - 1], &ps.eps[j - 1]));
    }
    for (name, m, h) in pairs {
        let diff = t.mul(m).sub(&h.mul(&t));
        let first = diff.entries().next().map(|(_, col, _)| col);
        if let Some(col) = first {
            return Err(ModelError::IntertwinerFails { generator: name, column: col });
        }
    }
    Ok((HeckeMatch { r_shift: r, c_hecke: c, lambda, intertwiner: t }, ps))
}

/// Outcome of building the model with one ordering of the leg-0 substitution.
#[derive(Clone, Debug, Serialize)]
pub struct OrderingOutcome {
    pub ordering: Ordering,
    pub subspace_preserved: bool,
    pub relations_ok: bool,
    pub cyclic_formula: bool,
    pub hecke_isomorphism: bool,
    pub note: String,
}

/// Run both orderings; exactly one is expected to pass everything.
pub fn compare_orderings(spec: &PsSpec) -> Vec<OrderingOutcome> {
    [Ordering::KLeft, Ordering::KRight]
        .into_iter()
        .map(|ordering| match ModelSpace::build(spec, ordering) {
            Err(e) => OrderingOutcome { ordering, subspace_preserved: false, relations_ok: false, cyclic_formula: false, hecke_isomorphism: false, note: e.to_string() },
            Ok(m) => {
                let rel = m.check_relations().normative_ok();
                let cyc = m.cyclic_formula_holds().unwrap_or(false);
                let iso = hecke_isomorphism_check(&m);
                OrderingOutcome {
                    ordering,
                    subspace_preserved: true,
                    relations_ok: rel,
                    cyclic_formula: cyc,
                    hecke_isomorphism: iso.is_ok(),
                    note: iso.err().map(|e| e.to_string()).unwrap_or_default(),
                }
            }
        })
        .collect()
}

/// 2 xi (Σ dmu(b) b* - C^k) on V, and its coordinates (A', B') in span(Id, xi) if it lies there.
pub fn q_mu_operator(data: &LieAlgebraData, rf: &dyn RealForm, mu: KChar) -> Result<(ExactMatrix, Option<(GaussRat, GaussRat)>), ModelError> {
    let d = data.dim_v;
    let mut acc = ExactMatrix::zeros(d, d);
    for (b, bd) in data.basis_k.iter().zip(&data.duals_k) {
        acc.add_scaled(bd, &rf.dmu(mu, b)?);
    }
    let q = data.xi.mul(&acc.sub(&data.casimir_k())).scale(&GaussRat::int(2));
    let basis = ExactMatrix::from_columns(d * d, &[ExactMatrix::identity(d).vectorize(), data.xi.vectorize()]);
    let coords = crate::exactlin::solve_linear(&basis, &q.vectorize()).ok().map(|v| (v[0].clone(), v[1].clone()));
    Ok((q, coords))
}

/// Generator matrices restricted to an invariant subspace of the model.
#[derive(Clone, Debug)]
pub struct SubModel {
    pub dim: usize,
    pub quotient_dim: usize,
    pub gens: BTreeMap<String, ExactMatrix>,
}

/// Restrict every generator to span(sub) (vectors in model coordinates).
pub fn functor_on_submodule(model: &ModelSpace, sub: &[ExactVector]) -> Result<SubModel, ModelError> {
    if sub.is_empty() {
        return Ok(SubModel { dim: 0, quotient_dim: model.dim(), gens: model.gens.keys().map(|k| (k.clone(), ExactMatrix::zeros(0, 0))).collect() });
    }
    let m = ExactMatrix::from_columns(model.dim(), sub);
    if rank(&m) != sub.len() {
        return Err(ModelError::Linear(LinAlgError::Singular));
    }
    let sc = SubspaceCoords::new(model.dim(), sub)?;
    let mut gens = BTreeMap::new();
    for (name, g) in &model.gens {
        gens.insert(name.clone(), sc.restrict(g).ok_or_else(|| ModelError::NotInvariant(name.clone()))?);
    }
    Ok(SubModel { dim: sub.len(), quotient_dim: model.dim() - sub.len(), gens })
}
