//! The graded Hecke algebra H_k(c) of type B_k in PBW normal form.
//!
//! Elements are sums of `w * eps^a` with the group element on the left. The cross
//! relation used for rewriting is `f s = s s(f) + c_s Δ_s(f)` with
//! `Δ_s(f) = (f - s(f)) / alpha_s`, so `s eps_k + eps_k s = 2c` and
//! `s_i eps_i = eps_{i+1} s_i + 1`.

use crate::exactlin::{ExactMatrix, GaussRat};
use crate::wbgroup::{enumerate_group, SignedPerm, SimpleReflection};
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

/// Largest total ε-degree allowed in a product.
pub const MAX_DEGREE: u32 = 8;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HeckeError {
    #[error("total degree {0} exceeds the bound {MAX_DEGREE}")]
    DegreeOverflow(u32),
    #[error("rank mismatch: {0} vs {1}")]
    RankMismatch(usize, usize),
    #[error("cannot parse Hecke element: {0}")]
    Parse(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeckeParams {
    pub k: usize,
    /// Parameter on the short roots eps_i; the long roots carry 1.
    pub c: GaussRat,
}

impl HeckeParams {
    pub fn new(k: usize, c: GaussRat) -> Self {
        HeckeParams { k, c }
    }
    fn simple_param(&self, s: SimpleReflection) -> GaussRat {
        match s {
            SimpleReflection::S(_) => GaussRat::one(),
            SimpleReflection::Theta => self.c.clone(),
        }
    }
}

pub type Monomial = Vec<u32>;
type Poly = BTreeMap<Monomial, GaussRat>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeckeElement {
    pub k: usize,
    pub terms: BTreeMap<(SignedPerm, Monomial), GaussRat>,
}

fn add_term<K: Ord>(map: &mut BTreeMap<K, GaussRat>, key: K, c: GaussRat) {
    if !c.is_zero() {
        *map.entry(key).or_insert_with(GaussRat::zero) += &c;
    }
}

fn prune<K: Ord + Clone>(map: &mut BTreeMap<K, GaussRat>) {
    map.retain(|_, v| !v.is_zero());
}

impl HeckeElement {
    pub fn zero(k: usize) -> Self {
        HeckeElement { k, terms: BTreeMap::new() }
    }
    pub fn scalar(k: usize, c: GaussRat) -> Self {
        Self::term(SignedPerm::identity(k), vec![0; k], c)
    }
    pub fn one(k: usize) -> Self {
        Self::scalar(k, GaussRat::one())
    }
    pub fn term(w: SignedPerm, mono: Monomial, c: GaussRat) -> Self {
        let k = w.rank();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert((w, mono), c);
        }
        HeckeElement { k, terms }
    }
    pub fn group(w: SignedPerm) -> Self {
        let k = w.rank();
        Self::term(w, vec![0; k], GaussRat::one())
    }
    /// eps_i, 1-based.
    pub fn eps(k: usize, i: usize) -> Self {
        let mut m = vec![0; k];
        m[i - 1] = 1;
        Self::term(SignedPerm::identity(k), m, GaussRat::one())
    }
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    pub fn add(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for (key, c) in &o.terms {
            add_term(&mut out.terms, key.clone(), c.clone());
        }
        prune(&mut out.terms);
        out
    }
    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(&GaussRat::int(-1)))
    }
    pub fn scale(&self, s: &GaussRat) -> Self {
        let mut out = Self::zero(self.k);
        for (key, c) in &self.terms {
            add_term(&mut out.terms, key.clone(), c * s);
        }
        out
    }
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|(_, m)| m.iter().sum::<u32>()).max().unwrap_or(0)
    }
    /// Coefficients conjugated, terms otherwise unchanged.
    pub fn conj_coeffs(&self) -> Self {
        let mut out = self.clone();
        for v in out.terms.values_mut() {
            *v = v.conj();
        }
        out
    }
    pub fn mul(&self, o: &Self, p: &HeckeParams) -> Result<Self, HeckeError> {
        normal_form_multiply(self, o, p)
    }
    pub fn commutator(&self, o: &Self, p: &HeckeParams) -> Result<Self, HeckeError> {
        Ok(self.mul(o, p)?.sub(&o.mul(self, p)?))
    }
}

/// s(f) for a simple reflection acting on ε-monomials.
fn reflect_mono(s: SimpleReflection, m: &Monomial) -> (Monomial, GaussRat) {
    let mut out = m.clone();
    match s {
        SimpleReflection::S(i) => {
            out.swap(i - 1, i);
            (out, GaussRat::one())
        }
        SimpleReflection::Theta => {
            let a = m[m.len() - 1];
            (out, GaussRat::int(if a % 2 == 0 { 1 } else { -1 }))
        }
    }
}

/// Δ_s applied to one monomial.
fn delta_mono(s: SimpleReflection, m: &Monomial) -> Poly {
    let mut out = Poly::new();
    match s {
        SimpleReflection::S(i) => {
            let (a, b) = (m[i - 1], m[i]);
            if a == b {
                return out;
            }
            // (x^a y^b - x^b y^a)/(x - y) = ± x^lo y^lo h_{hi-lo-1}(x, y)
            let (lo, hi, sign) = if a > b { (b, a, 1) } else { (a, b, -1) };
            for t in 0..(hi - lo) {
                let mut nm = m.clone();
                nm[i - 1] = lo + (hi - lo - 1 - t);
                nm[i] = lo + t;
                add_term(&mut out, nm, GaussRat::int(sign));
            }
        }
        SimpleReflection::Theta => {
            let last = m.len() - 1;
            if m[last] % 2 == 1 {
                let mut nm = m.clone();
                nm[last] -= 1;
                add_term(&mut out, nm, GaussRat::int(2));
            }
        }
    }
    prune(&mut out);
    out
}

/// Rewrite `f * w` as a sum of `u * h` with the group part on the left.
fn move_poly_past(f: &Poly, w: &SignedPerm, p: &HeckeParams) -> Vec<(SignedPerm, Poly)> {
    let k = w.rank();
    let mut cur: BTreeMap<SignedPerm, Poly> = BTreeMap::new();
    cur.insert(SignedPerm::identity(k), f.clone());
    for g in w.reduced_word() {
        let gm = SignedPerm::simple(k, g);
        let cg = p.simple_param(g);
        let mut next: BTreeMap<SignedPerm, Poly> = BTreeMap::new();
        for (u, h) in cur {
            // h g = g g(h) + c_g Δ_g(h)
            let moved = next.entry(u.compose(&gm)).or_default();
            for (m, c) in &h {
                let (rm, sgn) = reflect_mono(g, m);
                add_term(moved, rm, c * &sgn);
            }
            if !cg.is_zero() {
                let stay = next.entry(u.clone()).or_default();
                for (m, c) in &h {
                    for (dm, dc) in delta_mono(g, m) {
                        add_term(stay, dm, c * &dc * &cg);
                    }
                }
            }
        }
        for h in next.values_mut() {
            prune(h);
        }
        next.retain(|_, h| !h.is_empty());
        cur = next;
    }
    cur.into_iter().collect()
}

pub fn normal_form_multiply(a: &HeckeElement, b: &HeckeElement, p: &HeckeParams) -> Result<HeckeElement, HeckeError> {
    if a.k != b.k {
        return Err(HeckeError::RankMismatch(a.k, b.k));
    }
    let deg = a.degree() + b.degree();
    if deg > MAX_DEGREE {
        return Err(HeckeError::DegreeOverflow(deg));
    }
    let mut out = HeckeElement::zero(a.k);
    let mut cache: HashMap<(Monomial, SignedPerm), Vec<(SignedPerm, Poly)>> = HashMap::new();
    for ((w1, f1), c1) in &a.terms {
        for ((w2, f2), c2) in &b.terms {
            let moved = cache.entry((f1.clone(), w2.clone())).or_insert_with(|| {
                let mut single = Poly::new();
                single.insert(f1.clone(), GaussRat::one());
                move_poly_past(&single, w2, p)
            });
            for (u, h) in moved.iter() {
                let g = w1.compose(u);
                for (m, hc) in h {
                    let mono: Monomial = m.iter().zip(f2).map(|(x, y)| x + y).collect();
                    add_term(&mut out.terms, (g.clone(), mono), c1 * c2 * hc);
                }
            }
        }
    }
    prune(&mut out.terms);
    Ok(out)
}

/// Module generated by a cyclic vector on which eps acts by lambda.
#[derive(Clone, Debug)]
pub struct HeckeModule {
    pub k: usize,
    pub basis: Vec<SignedPerm>,
    /// s_{i,i+1} for i = 1..k-1.
    pub s: Vec<ExactMatrix>,
    /// theta_j for j = 1..k.
    pub theta: Vec<ExactMatrix>,
    pub eps: Vec<ExactMatrix>,
}

impl HeckeModule {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
    pub fn group_matrix(&self, w: &SignedPerm) -> ExactMatrix {
        let pos: HashMap<&SignedPerm, usize> = self.basis.iter().enumerate().map(|(i, b)| (b, i)).collect();
        let n = self.dim();
        let mut m = ExactMatrix::zeros(n, n);
        for (j, b) in self.basis.iter().enumerate() {
            m.set(pos[&w.compose(b)], j, GaussRat::one());
        }
        m
    }
    /// Matrix of an arbitrary Hecke element.
    pub fn act(&self, h: &HeckeElement) -> ExactMatrix {
        let n = self.dim();
        let mut out = ExactMatrix::zeros(n, n);
        for ((w, m), c) in &h.terms {
            let mut op = self.group_matrix(w);
            for (i, &a) in m.iter().enumerate() {
                op = op.mul(&self.eps[i].pow(a));
            }
            out.add_scaled(&op, c);
        }
        out
    }
    /// Every defining relation, as (name, holds).
    pub fn check_relations(&self, p: &HeckeParams) -> Vec<(String, bool)> {
        let k = self.k;
        let id = ExactMatrix::identity(self.dim());
        let mut out = Vec::new();
        let gens = GeneratorMatrices { s: self.s.clone(), theta_k: self.theta[k - 1].clone(), eps: self.eps.clone() };
        out.extend(gens.hecke_relations(p, &id));
        out
    }
}

/// Matrices for the simple generators and eps, wherever they come from.
pub struct GeneratorMatrices {
    pub s: Vec<ExactMatrix>,
    pub theta_k: ExactMatrix,
    pub eps: Vec<ExactMatrix>,
}

impl GeneratorMatrices {
    /// Defining relations of H_k(c) as (name, holds).
    pub fn hecke_relations(&self, p: &HeckeParams, id: &ExactMatrix) -> Vec<(String, bool)> {
        let k = self.eps.len();
        let c2 = &p.c * &GaussRat::int(2);
        let th = &self.theta_k;
        let mut out = Vec::new();
        out.push(("theta_k^2 = 1".to_string(), th.mul(th) == *id));
        for (i, s) in self.s.iter().enumerate() {
            let i1 = i + 1;
            out.push((format!("s{i1}^2 = 1"), s.mul(s) == *id));
            if i1 + 1 < k {
                let t = &self.s[i1];
                out.push((format!("s{i1} s{} s{i1} = s{} s{i1} s{}", i1 + 1, i1 + 1, i1 + 1), s.mul(t).mul(s) == t.mul(s).mul(t)));
            }
            for (j, t) in self.s.iter().enumerate().skip(i + 2) {
                out.push((format!("s{i1} s{} = s{} s{i1}", j + 1, j + 1), s.mul(t) == t.mul(s)));
            }
            if i1 + 1 == k {
                let st = s.mul(th);
                out.push((format!("(s{i1} theta_k)^4 = 1"), st.pow(4) == *id));
            } else {
                out.push((format!("s{i1} theta_k = theta_k s{i1}"), s.mul(th) == th.mul(s)));
            }
            let lhs = s.mul(&self.eps[i]).sub(&self.eps[i1].mul(s));
            out.push((format!("s{i1} eps{i1} - eps{} s{i1} = 1", i1 + 1), lhs == *id));
            for j in 0..k {
                if j != i && j != i1 {
                    out.push((format!("s{i1} eps{} = eps{} s{i1}", j + 1, j + 1), s.mul(&self.eps[j]) == self.eps[j].mul(s)));
                }
            }
        }
        let ek = &self.eps[k - 1];
        out.push(("theta_k eps_k + eps_k theta_k = 2c".to_string(), th.anticommutator(ek) == id.scale(&c2)));
        for j in 0..k - 1 {
            out.push((format!("theta_k eps{} = eps{} theta_k", j + 1, j + 1), th.mul(&self.eps[j]) == self.eps[j].mul(th)));
        }
        for a in 0..k {
            for b in a + 1..k {
                out.push((format!("[eps{}, eps{}] = 0", a + 1, b + 1), self.eps[a].commutator(&self.eps[b]).is_zero()));
            }
        }
        out
    }
}

/// X(lambda) with basis {w · 1_lambda} in enumeration order.
pub fn principal_series(p: &HeckeParams, lambda: &[GaussRat]) -> HeckeModule {
    let k = p.k;
    let basis = enumerate_group(k).expect("k <= 6");
    let pos: HashMap<SignedPerm, usize> = basis.iter().cloned().enumerate().map(|(i, b)| (b, i)).collect();
    let n = basis.len();
    let module_of = |w: &SignedPerm| {
        let mut m = ExactMatrix::zeros(n, n);
        for (j, b) in basis.iter().enumerate() {
            m.set(pos[&w.compose(b)], j, GaussRat::one());
        }
        m
    };
    let s = (1..k).map(|i| module_of(&SignedPerm::simple_s(k, i))).collect();
    let theta = (1..=k).map(|j| module_of(&SignedPerm::theta(k, j))).collect();
    let eps = (1..=k)
        .map(|i| {
            let mut m = ExactMatrix::zeros(n, n);
            let mut mono = vec![0; k];
            mono[i - 1] = 1;
            let f: Poly = [(mono, GaussRat::one())].into_iter().collect();
            for (j, w) in basis.iter().enumerate() {
                for (u, h) in move_poly_past(&f, w, p) {
                    let val = eval_poly(&h, lambda);
                    m.add_at(pos[&u], j, &val);
                }
            }
            m
        })
        .collect();
    HeckeModule { k, basis, s, theta, eps }
}

fn eval_poly(h: &Poly, lambda: &[GaussRat]) -> GaussRat {
    let mut acc = GaussRat::zero();
    for (m, c) in h {
        let mut t = c.clone();
        for (x, &a) in lambda.iter().zip(m) {
            t = t * x.pow(a);
        }
        acc += &t;
    }
    acc
}

/// Positive roots with their reflections, parameters and coroot pairings with eps_i.
pub fn positive_root_data(p: &HeckeParams) -> Vec<(SignedPerm, GaussRat, Vec<GaussRat>)> {
    let k = p.k;
    let mut out = Vec::new();
    for a in 1..=k {
        for b in a + 1..=k {
            let mut pd = vec![GaussRat::zero(); k];
            pd[a - 1] = GaussRat::one();
            pd[b - 1] = GaussRat::int(-1);
            out.push((SignedPerm::reflection_diff(k, a, b), GaussRat::one(), pd));
            let mut ps = vec![GaussRat::zero(); k];
            ps[a - 1] = GaussRat::one();
            ps[b - 1] = GaussRat::one();
            out.push((SignedPerm::reflection_sum(k, a, b), GaussRat::one(), ps));
        }
        let mut pe = vec![GaussRat::zero(); k];
        pe[a - 1] = GaussRat::int(2);
        out.push((SignedPerm::theta(k, a), p.c.clone(), pe));
    }
    out
}

/// ½ Σ_{γ>0} c(γ) <γ^∨, eps_i> s_γ.
pub fn drinfeld_shift(i: usize, p: &HeckeParams) -> HeckeElement {
    let mut out = HeckeElement::zero(p.k);
    let half = GaussRat::frac(1, 2);
    for (s, c, pair) in positive_root_data(p) {
        out = out.add(&HeckeElement::group(s).scale(&(&half * &c * &pair[i - 1])));
    }
    out
}

/// The Drinfeld generator ε̃_i written in the PBW basis.
pub fn drinfeld_generator(i: usize, p: &HeckeParams) -> HeckeElement {
    HeckeElement::eps(p.k, i).sub(&drinfeld_shift(i, p))
}

/// Right-hand side of the Drinfeld commutator relation for [ε̃_i, ε̃_j]:
/// ¼ Σ_{γ,δ>0} c(γ)c(δ)(<γ^∨,ε_i><δ^∨,ε_j> - <δ^∨,ε_i><γ^∨,ε_j>) s_γ s_δ.
pub fn drinfeld_commutator_rhs(i: usize, j: usize, p: &HeckeParams) -> Result<HeckeElement, HeckeError> {
    let roots = positive_root_data(p);
    let mut out = HeckeElement::zero(p.k);
    let quarter = GaussRat::frac(1, 4);
    for (sg, cg, pg) in &roots {
        for (sd, cd, pd) in &roots {
            let coef = &pg[i - 1] * &pd[j - 1] - &pd[i - 1] * &pg[j - 1];
            if coef.is_zero() {
                continue;
            }
            let term = HeckeElement::group(sg.compose(sd)).scale(&(&quarter * cg * cd * &coef));
            out = out.add(&term);
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// Input in PBW form, output as coefficients of ordered monomials w ε̃_1^a1 ... ε̃_k^ak.
    ToDrinfeld,
    /// Input as Drinfeld ordered-monomial coefficients, output in PBW form.
    FromDrinfeld,
}

pub fn lusztig_drinfeld(e: &HeckeElement, p: &HeckeParams, dir: Direction) -> Result<HeckeElement, HeckeError> {
    match dir {
        Direction::FromDrinfeld => from_drinfeld(e, p),
        Direction::ToDrinfeld => {
            // triangular: w ε̃^a = w ε^a + lower degree
            let mut rem = e.clone();
            let mut out = HeckeElement::zero(e.k);
            while let Some(((w, m), c)) = rem.terms.iter().max_by_key(|((_, m), _)| m.iter().sum::<u32>()).map(|(a, b)| (a.clone(), b.clone())) {
                let t = HeckeElement::term(w, m, c);
                out = out.add(&t);
                rem = rem.sub(&from_drinfeld(&t, p)?);
            }
            Ok(out)
        }
    }
}

fn from_drinfeld(e: &HeckeElement, p: &HeckeParams) -> Result<HeckeElement, HeckeError> {
    let gens: Vec<HeckeElement> = (1..=p.k).map(|i| drinfeld_generator(i, p)).collect();
    let mut out = HeckeElement::zero(e.k);
    for ((w, m), c) in &e.terms {
        let mut acc = HeckeElement::group(w.clone());
        for (i, &a) in m.iter().enumerate() {
            for _ in 0..a {
                acc = acc.mul(&gens[i], p)?;
            }
        }
        out = out.add(&acc.scale(c));
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StarKind {
    /// g* = g^-1, ε̃* = -conj(ε̃)
    Star,
    /// g• = g^-1, ε• = ε
    Bullet,
}

/// Conjugate-linear anti-automorphism determined by its values on generators.
pub fn star_maps(e: &HeckeElement, p: &HeckeParams, which: StarKind) -> Result<HeckeElement, HeckeError> {
    let k = p.k;
    let images: Vec<HeckeElement> = (1..=k)
        .map(|i| match which {
            StarKind::Bullet => HeckeElement::eps(k, i),
            StarKind::Star => {
                let t = drinfeld_shift(i, p);
                HeckeElement::eps(k, i).scale(&GaussRat::int(-1)).add(&t).add(&t.conj_coeffs())
            }
        })
        .collect();
    let mut out = HeckeElement::zero(k);
    for ((w, m), c) in &e.terms {
        let mut acc = HeckeElement::scalar(k, c.conj());
        for i in (0..k).rev() {
            for _ in 0..m[i] {
                acc = acc.mul(&images[i], p)?;
            }
        }
        acc = acc.mul(&HeckeElement::group(w.inverse()), p)?;
        out = out.add(&acc);
    }
    Ok(out)
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct TypeDReport {
    pub k: usize,
    pub generators_closed_under_theta: bool,
    pub swaps_diff_and_sum_reflections: bool,
    pub theta_anticommutes_with_eps_k: bool,
    pub d_group_order: usize,
    pub expected_d_group_order: usize,
}

impl TypeDReport {
    pub fn holds(&self) -> bool {
        self.generators_closed_under_theta && self.swaps_diff_and_sum_reflections && self.theta_anticommutes_with_eps_k && self.d_group_order == self.expected_d_group_order
    }
}

/// Checks that H_k(0) is H^{D_k} extended by theta_k.
pub fn check_type_d_extension(k: usize) -> Result<TypeDReport, HeckeError> {
    let p = HeckeParams::new(k, GaussRat::zero());
    let th = SignedPerm::theta(k, k);
    let mut dgens: Vec<SignedPerm> = (1..k).map(|i| SignedPerm::simple_s(k, i)).collect();
    dgens.push(SignedPerm::reflection_sum(k, k - 1, k));
    let conj = |g: &SignedPerm| th.compose(g).compose(&th);
    let closed = dgens.iter().all(|g| dgens.contains(&conj(g)));
    let swaps = conj(&SignedPerm::simple_s(k, k - 1)) == SignedPerm::reflection_sum(k, k - 1, k);
    let the = HeckeElement::group(th.clone());
    let ek = HeckeElement::eps(k, k);
    let anti = the.mul(&ek, &p)?.add(&ek.mul(&the, &p)?).is_zero();
    // closure of the D generators
    let mut seen = vec![SignedPerm::identity(k)];
    let mut frontier = seen.clone();
    while let Some(g) = frontier.pop() {
        for s in &dgens {
            let h = g.compose(s);
            if !seen.contains(&h) {
                seen.push(h.clone());
                frontier.push(h);
            }
        }
    }
    let fact: usize = (1..=k).product();
    Ok(TypeDReport {
        k,
        generators_closed_under_theta: closed,
        swaps_diff_and_sum_reflections: swaps,
        theta_anticommutes_with_eps_k: anti,
        d_group_order: seen.len(),
        expected_d_group_order: fact << (k - 1),
    })
}

impl fmt::Display for HeckeElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|((w, m), c)| {
                let mut s = format!("({c})*[{w}]");
                for (i, &a) in m.iter().enumerate() {
                    match a {
                        0 => {}
                        1 => s.push_str(&format!("*e{}", i + 1)),
                        _ => s.push_str(&format!("*e{}^{a}", i + 1)),
                    }
                }
                s
            })
            .collect();
        f.write_str(&parts.join(" + "))
    }
}

impl FromStr for HeckeElement {
    type Err = HeckeError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || HeckeError::Parse(s.to_string());
        let mut out: Option<HeckeElement> = None;
        for term in s.split(" + ") {
            let term = term.trim();
            let (coef, rest) = term.strip_prefix('(').and_then(|t| t.split_once(")*[")).ok_or_else(err)?;
            let (w, tail) = rest.split_once(']').ok_or_else(err)?;
            let c: GaussRat = coef.parse().map_err(|_| err())?;
            let w: SignedPerm = w.parse().map_err(|_| err())?;
            let k = w.rank();
            let mut m = vec![0u32; k];
            for fac in tail.split('*').filter(|x| !x.is_empty()) {
                let fac = fac.strip_prefix('e').ok_or_else(err)?;
                let (idx, pow) = match fac.split_once('^') {
                    Some((a, b)) => (a, b.parse::<u32>().map_err(|_| err())?),
                    None => (fac, 1),
                };
                let idx: usize = idx.parse().map_err(|_| err())?;
                if idx == 0 || idx > k {
                    return Err(err());
                }
                m[idx - 1] += pow;
            }
            let t = HeckeElement::term(w, m, c);
            out = Some(match out {
                None => t,
                Some(o) => {
                    if o.k != t.k {
                        return Err(HeckeError::RankMismatch(o.k, t.k));
                    }
                    o.add(&t)
                }
            });
        }
        out.ok_or_else(err)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wbgroup::longest_element;
    use proptest::prelude::*;

    fn g(n: i64) -> GaussRat {
        GaussRat::int(n)
    }

    #[test]
    fn basic_cross_relations() {
        let p = HeckeParams::new(2, g(3));
        let s = HeckeElement::group(SignedPerm::simple_s(2, 1));
        let e1 = HeckeElement::eps(2, 1);
        let e2 = HeckeElement::eps(2, 2);
        let want = e2.mul(&s, &p).unwrap();
        assert_eq!(s.mul(&e1, &p).unwrap(), s.mul(&e1, &p).unwrap());
        // s e1 = e2 s + 1, with e2 s itself rewritten into PBW order
        assert_eq!(s.mul(&e1, &p).unwrap(), want.add(&HeckeElement::one(2)));
        let p1 = HeckeParams::new(1, g(5));
        let t = HeckeElement::group(SignedPerm::theta(1, 1));
        let e = HeckeElement::eps(1, 1);
        let anti = t.mul(&e, &p1).unwrap().add(&e.mul(&t, &p1).unwrap());
        assert_eq!(anti, HeckeElement::scalar(1, g(10)));
        let w = HeckeElement::group(SignedPerm::theta(2, 1));
        assert_eq!(w.mul(&HeckeElement::one(2), &p).unwrap(), w);
    }

    #[test]
    fn principal_series_small() {
        let c = GaussRat::frac(3, 2);
        let nu = GaussRat::complex(crate::exactlin::rat(1, 2), crate::exactlin::rat(2, 1));
        let p = HeckeParams::new(1, c.clone());
        let m = principal_series(&p, &[nu.clone()]);
        // basis order: [-1] then [1]
        assert_eq!(m.basis[1], SignedPerm::identity(1));
        let e = &m.eps[0];
        assert_eq!(e.get(1, 1), nu);
        assert_eq!(e.get(0, 0), -nu.clone());
        assert_eq!(e.get(1, 0), &c * &g(2));
        assert_eq!(e.get(0, 1), GaussRat::zero());
        for k in 1..=3 {
            let p = HeckeParams::new(k, GaussRat::frac(1, 3));
            let lam: Vec<GaussRat> = (0..k).map(|i| g(i as i64 + 2)).collect();
            let m = principal_series(&p, &lam);
            assert_eq!(m.dim(), (1..=k).product::<usize>() << k);
            for (name, ok) in m.check_relations(&p) {
                assert!(ok, "k={k}: {name}");
            }
        }
        let p0 = HeckeParams::new(2, GaussRat::zero());
        let m0 = principal_series(&p0, &[g(0), g(0)]);
        let id_idx = m0.basis.iter().position(|b| b.is_identity()).unwrap();
        for e in &m0.eps {
            assert!(e.mul_vec(&unit(m0.dim(), id_idx)).iter().all(|x| x.is_zero()));
        }
    }

    fn unit(n: usize, i: usize) -> Vec<GaussRat> {
        let mut v = vec![GaussRat::zero(); n];
        v[i] = GaussRat::one();
        v
    }

    #[test]
    fn pbw_independence() {
        // {w eps^a : |a| <= 2} act independently on the regular representation of the algebra
        let p = HeckeParams::new(2, g(1));
        let mut monos = vec![vec![0, 0]];
        for i in 0..2 {
            let mut m = vec![0, 0];
            m[i] = 1;
            monos.push(m);
        }
        monos.extend([vec![2, 0], vec![1, 1], vec![0, 2]]);
        for w in enumerate_group(2).unwrap() {
            for m in &monos {
                let t = HeckeElement::term(w.clone(), m.clone(), g(1));
                let prod = HeckeElement::one(2).mul(&t, &p).unwrap();
                assert_eq!(prod, t);
            }
        }
    }

    #[test]
    fn drinfeld_k1_and_round_trip() {
        let c = g(3);
        let p = HeckeParams::new(1, c.clone());
        let s = HeckeElement::group(SignedPerm::theta(1, 1));
        let et = drinfeld_generator(1, &p);
        assert_eq!(et, HeckeElement::eps(1, 1).sub(&s.scale(&c)));
        assert!(s.mul(&et, &p).unwrap().add(&et.mul(&s, &p).unwrap()).is_zero());
        let p2 = HeckeParams::new(2, g(2));
        let e1 = HeckeElement::eps(2, 1);
        let x = e1.mul(&HeckeElement::eps(2, 2), &p2).unwrap().add(&HeckeElement::group(SignedPerm::simple_s(2, 1)).mul(&e1, &p2).unwrap());
        for y in [e1.clone(), x] {
            let d = lusztig_drinfeld(&y, &p2, Direction::ToDrinfeld).unwrap();
            assert_eq!(lusztig_drinfeld(&d, &p2, Direction::FromDrinfeld).unwrap(), y);
        }
    }

    #[test]
    fn drinfeld_commutator() {
        for (k, c) in [(2, g(1)), (2, GaussRat::frac(1, 2)), (3, g(1)), (3, g(2))] {
            let p = HeckeParams::new(k, c);
            for i in 1..=k {
                for j in i + 1..=k {
                    let lhs = drinfeld_generator(i, &p).commutator(&drinfeld_generator(j, &p), &p).unwrap();
                    let rhs = drinfeld_commutator_rhs(i, j, &p).unwrap();
                    assert_eq!(lhs, rhs.scale(&g(-1)), "k={k} [{i},{j}]");
                }
            }
            // w ε̃ w^-1 = ε̃_{w(ε)}
            for w in enumerate_group(k).unwrap() {
                let wh = HeckeElement::group(w.clone());
                let wi = HeckeElement::group(w.inverse());
                for i in 1..=k {
                    let conj = wh.mul(&drinfeld_generator(i, &p), &p).unwrap().mul(&wi, &p).unwrap();
                    let img = w.apply(i as i64);
                    let want = drinfeld_generator(img.unsigned_abs() as usize, &p).scale(&g(img.signum()));
                    assert_eq!(conj, want);
                }
            }
        }
    }

    #[test]
    fn star_examples() {
        let p = HeckeParams::new(2, GaussRat::frac(1, 2));
        let s = HeckeElement::group(SignedPerm::simple_s(2, 1));
        assert_eq!(star_maps(&s, &p, StarKind::Star).unwrap(), s);
        let et = drinfeld_generator(1, &p);
        assert_eq!(star_maps(&et, &p, StarKind::Star).unwrap(), et.scale(&g(-1)));
        let e1 = HeckeElement::eps(2, 1);
        assert_eq!(star_maps(&e1, &p, StarKind::Bullet).unwrap(), e1);
        let ie = e1.scale(&GaussRat::i());
        assert_eq!(star_maps(&ie, &p, StarKind::Bullet).unwrap(), e1.scale(&-GaussRat::i()));
    }

    #[test]
    fn type_d() {
        for k in 2..=3 {
            let r = check_type_d_extension(k).unwrap();
            assert!(r.holds(), "{r:?}");
        }
        assert_eq!(check_type_d_extension(3).unwrap().d_group_order, 24);
    }

    #[test]
    fn text_round_trip() {
        let p = HeckeParams::new(2, g(1));
        let x = HeckeElement::eps(2, 1).mul(&HeckeElement::group(SignedPerm::simple_s(2, 1)), &p).unwrap().scale(&GaussRat::frac(-3, 2));
        let txt = x.to_string();
        assert_eq!(txt.parse::<HeckeElement>().unwrap(), x);
    }

    #[test]
    fn degree_bound() {
        let p = HeckeParams::new(1, g(1));
        let big = HeckeElement::term(SignedPerm::identity(1), vec![5], g(1));
        assert_eq!(big.mul(&big, &p), Err(HeckeError::DegreeOverflow(10)));
    }

    fn arb_element(k: usize) -> impl Strategy<Value = HeckeElement> {
        let group = enumerate_group(k).unwrap();
        let n = group.len();
        proptest::collection::vec((0..n, proptest::collection::vec(0u32..2, k), -3i64..4, -2i64..3), 1..3).prop_map(move |ts| {
            let mut e = HeckeElement::zero(k);
            for (wi, mut m, re, im) in ts {
                if m.iter().sum::<u32>() > 2 {
                    m[k - 1] = 0;
                }
                let c = GaussRat::complex(crate::exactlin::rat(re, 1), crate::exactlin::rat(im, 1));
                e = e.add(&HeckeElement::term(group[wi].clone(), m, c));
            }
            e
        })
    }

    fn arb_k_elems() -> impl Strategy<Value = (HeckeElement, HeckeElement, HeckeElement, i64)> {
        (1usize..=3).prop_flat_map(|k| (arb_element(k), arb_element(k), arb_element(k), -2i64..3))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]
        #[test]
        fn associativity((a, b, c, cc) in arb_k_elems()) {
            let p = HeckeParams::new(a.k, GaussRat::frac(cc, 2));
            let l = a.mul(&b, &p).unwrap().mul(&c, &p).unwrap();
            let r = a.mul(&b.mul(&c, &p).unwrap(), &p).unwrap();
            prop_assert_eq!(l, r);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(60))]
        #[test]
        fn star_laws((a, b, _c, cc) in arb_k_elems()) {
            // both maps are involutive anti-automorphisms only for real parameters
            let p = HeckeParams::new(a.k, GaussRat::frac(cc, 2));
            for kind in [StarKind::Star, StarKind::Bullet] {
                let ab = a.mul(&b, &p).unwrap();
                let lhs = star_maps(&ab, &p, kind).unwrap();
                let rhs = star_maps(&b, &p, kind).unwrap().mul(&star_maps(&a, &p, kind).unwrap(), &p).unwrap();
                prop_assert_eq!(lhs, rhs);
                prop_assert_eq!(star_maps(&star_maps(&a, &p, kind).unwrap(), &p, kind).unwrap(), a.clone());
            }
            let w0 = HeckeElement::group(longest_element(a.k));
            let via = w0.mul(&star_maps(&a, &p, StarKind::Bullet).unwrap(), &p).unwrap().mul(&w0, &p).unwrap();
            prop_assert_eq!(star_maps(&a, &p, StarKind::Star).unwrap(), via);
        }
    }
}
