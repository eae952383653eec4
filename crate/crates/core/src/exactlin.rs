//! Exact scalars in Q(i) and sparse exact matrices over them.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;
use thiserror::Error;

pub type Rat = BigRational;
pub type ExactVector = Vec<GaussRat>;

/// Errors raised by the linear algebra layer.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinAlgError {
    /// The right-hand side is not in the column space.
    #[error("linear system has no solution")]
    NoSolution,
    /// A matrix expected to be Hermitian is not.
    #[error("matrix is not Hermitian")]
    NotHermitian,
    /// Shapes do not line up.
    #[error("dimension mismatch: {0}")]
    Shape(String),
    /// Square matrix without an inverse.
    #[error("matrix is singular")]
    Singular,
    /// Text could not be parsed.
    #[error("cannot parse {kind} from {text:?}")]
    Parse { kind: &'static str, text: String },
}

pub fn rat(n: i64, d: i64) -> Rat {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn fmt_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn parse_rat(s: &str) -> Option<Rat> {
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        Some(BigRational::new(n, d))
    } else {
        let n: BigInt = s.parse().ok()?;
        Some(BigRational::from_integer(n))
    }
}

/// A Gaussian rational `re + im*i`.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct GaussRat {
    pub re: Rat,
    pub im: Rat,
}

impl GaussRat {
    pub fn new(re: Rat, im: Rat) -> Self {
        GaussRat { re, im }
    }
    pub fn zero() -> Self {
        GaussRat { re: Rat::zero(), im: Rat::zero() }
    }
    pub fn one() -> Self {
        Self::int(1)
    }
    pub fn i() -> Self {
        GaussRat { re: Rat::zero(), im: Rat::one() }
    }
    pub fn int(n: i64) -> Self {
        GaussRat { re: rat(n, 1), im: Rat::zero() }
    }
    pub fn frac(n: i64, d: i64) -> Self {
        GaussRat { re: rat(n, d), im: Rat::zero() }
    }
    pub fn complex(a: Rat, b: Rat) -> Self {
        GaussRat { re: a, im: b }
    }
    pub fn from_rat(r: Rat) -> Self {
        GaussRat { re: r, im: Rat::zero() }
    }
    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }
    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }
    pub fn conj(&self) -> Self {
        GaussRat { re: self.re.clone(), im: -self.im.clone() }
    }
    /// |x|^2 as a rational.
    pub fn norm_sqr(&self) -> Rat {
        &self.re * &self.re + &self.im * &self.im
    }
    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = self.norm_sqr();
        Some(GaussRat { re: &self.re / &n, im: -(&self.im / &n) })
    }
    pub fn abs_re_im_sum(&self) -> Rat {
        self.re.abs() + self.im.abs()
    }
    pub fn pow(&self, e: u32) -> Self {
        let mut acc = GaussRat::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }
}

impl fmt::Display for GaussRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut out = String::new();
        if !self.re.is_zero() {
            out.push_str(&fmt_rat(&self.re));
        }
        if !self.im.is_zero() {
            let neg = self.im.is_negative();
            let mag = self.im.abs();
            if neg {
                out.push('-');
            } else if !out.is_empty() {
                out.push('+');
            }
            if mag.is_one() {
                out.push('i');
            } else {
                out.push_str(&fmt_rat(&mag));
                out.push_str("*i");
            }
        }
        write!(f, "{out}")
    }
}

impl FromStr for GaussRat {
    type Err = LinAlgError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || LinAlgError::Parse { kind: "scalar", text: s.to_string() };
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if t.is_empty() {
            return Err(err());
        }
        // split into signed terms at + or - that are not leading
        let mut terms: Vec<String> = Vec::new();
        let mut cur = String::new();
        for (idx, ch) in t.chars().enumerate() {
            if (ch == '+' || ch == '-') && idx > 0 {
                terms.push(cur.clone());
                cur.clear();
            }
            cur.push(ch);
        }
        terms.push(cur);
        let mut acc = GaussRat::zero();
        for term in terms {
            let (sign, body) = match term.strip_prefix('-') {
                Some(b) => (-1, b.to_string()),
                None => (1, term.strip_prefix('+').unwrap_or(&term).to_string()),
            };
            if body.is_empty() {
                return Err(err());
            }
            let sgn = rat(sign, 1);
            if body == "i" {
                acc.im += sgn;
            } else if let Some(coef) = body.strip_suffix("*i").or_else(|| body.strip_suffix('i')) {
                // "2*i" canonical, "2i" accepted
                acc.im += sgn * parse_rat(coef).ok_or_else(err)?;
            } else {
                acc.re += sgn * parse_rat(&body).ok_or_else(err)?;
            }
        }
        Ok(acc)
    }
}

macro_rules! gauss_binop {
    ($tr:ident, $m:ident, $body:expr) => {
        impl<'a, 'b> $tr<&'b GaussRat> for &'a GaussRat {
            type Output = GaussRat;
            fn $m(self, o: &'b GaussRat) -> GaussRat {
                let f: fn(&GaussRat, &GaussRat) -> GaussRat = $body;
                f(self, o)
            }
        }
        impl $tr<GaussRat> for GaussRat {
            type Output = GaussRat;
            fn $m(self, o: GaussRat) -> GaussRat {
                (&self).$m(&o)
            }
        }
        impl<'b> $tr<&'b GaussRat> for GaussRat {
            type Output = GaussRat;
            fn $m(self, o: &'b GaussRat) -> GaussRat {
                (&self).$m(o)
            }
        }
        impl<'a> $tr<GaussRat> for &'a GaussRat {
            type Output = GaussRat;
            fn $m(self, o: GaussRat) -> GaussRat {
                self.$m(&o)
            }
        }
    };
}

gauss_binop!(Add, add, |a, b| GaussRat { re: &a.re + &b.re, im: &a.im + &b.im });
gauss_binop!(Sub, sub, |a, b| GaussRat { re: &a.re - &b.re, im: &a.im - &b.im });
gauss_binop!(Mul, mul, |a, b| {
    if a.im.is_zero() && b.im.is_zero() {
        return GaussRat { re: &a.re * &b.re, im: Rat::zero() };
    }
    GaussRat { re: &a.re * &b.re - &a.im * &b.im, im: &a.re * &b.im + &a.im * &b.re }
});
gauss_binop!(Div, div, |a, b| a * &b.inv().expect("division by zero in Q(i)"));

impl Neg for GaussRat {
    type Output = GaussRat;
    fn neg(self) -> GaussRat {
        GaussRat { re: -self.re, im: -self.im }
    }
}
impl<'a> Neg for &'a GaussRat {
    type Output = GaussRat;
    fn neg(self) -> GaussRat {
        GaussRat { re: -self.re.clone(), im: -self.im.clone() }
    }
}
impl AddAssign<&GaussRat> for GaussRat {
    fn add_assign(&mut self, o: &GaussRat) {
        self.re += &o.re;
        self.im += &o.im;
    }
}
impl SubAssign<&GaussRat> for GaussRat {
    fn sub_assign(&mut self, o: &GaussRat) {
        self.re -= &o.re;
        self.im -= &o.im;
    }
}
impl From<i64> for GaussRat {
    fn from(n: i64) -> Self {
        GaussRat::int(n)
    }
}

pub fn vec_is_zero(v: &[GaussRat]) -> bool {
    v.iter().all(|x| x.is_zero())
}

pub fn vec_scale(v: &[GaussRat], s: &GaussRat) -> ExactVector {
    v.iter().map(|x| x * s).collect()
}

pub fn vec_sub(a: &[GaussRat], b: &[GaussRat]) -> ExactVector {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn vec_add(a: &[GaussRat], b: &[GaussRat]) -> ExactVector {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

/// Hermitian dot product `sum conj(a_i) b_i`.
pub fn vec_dot(a: &[GaussRat], b: &[GaussRat]) -> GaussRat {
    let mut acc = GaussRat::zero();
    for (x, y) in a.iter().zip(b) {
        if !x.is_zero() && !y.is_zero() {
            acc += &(x.conj() * y);
        }
    }
    acc
}

/// Sparse matrix stored row by row; zero entries are never stored.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ExactMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BTreeMap<usize, GaussRat>>,
}

impl ExactMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ExactMatrix { rows, cols, data: vec![BTreeMap::new(); rows] }
    }
    pub fn identity(n: usize) -> Self {
        Self::scalar(n, &GaussRat::one())
    }
    pub fn scalar(n: usize, s: &GaussRat) -> Self {
        let mut m = Self::zeros(n, n);
        if !s.is_zero() {
            for i in 0..n {
                m.data[i].insert(i, s.clone());
            }
        }
        m
    }
    pub fn from_dense(rows: Vec<Vec<GaussRat>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut m = Self::zeros(r, c);
        for (i, row) in rows.into_iter().enumerate() {
            assert_eq!(row.len(), c, "ragged rows");
            for (j, v) in row.into_iter().enumerate() {
                m.set(i, j, v);
            }
        }
        m
    }
    pub fn from_ints(rows: &[&[i64]]) -> Self {
        Self::from_dense(rows.iter().map(|r| r.iter().map(|&x| GaussRat::int(x)).collect()).collect())
    }
    /// Single entry matrix unit with 1-based indices.
    pub fn unit(n: usize, r: usize, c: usize) -> Self {
        let mut m = Self::zeros(n, n);
        m.set(r - 1, c - 1, GaussRat::one());
        m
    }
    pub fn diag(d: &[GaussRat]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (i, v) in d.iter().enumerate() {
            m.set(i, i, v.clone());
        }
        m
    }
    pub fn from_columns(rows: usize, cols: &[ExactVector]) -> Self {
        let mut m = Self::zeros(rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            assert_eq!(c.len(), rows);
            for (i, v) in c.iter().enumerate() {
                if !v.is_zero() {
                    m.data[i].insert(j, v.clone());
                }
            }
        }
        m
    }
    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }
    pub fn nnz(&self) -> usize {
        self.data.iter().map(|r| r.len()).sum()
    }
    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|r| r.is_empty())
    }
    pub fn get(&self, r: usize, c: usize) -> GaussRat {
        self.data[r].get(&c).cloned().unwrap_or_default()
    }
    pub fn row(&self, r: usize) -> &BTreeMap<usize, GaussRat> {
        &self.data[r]
    }
    pub fn set(&mut self, r: usize, c: usize, v: GaussRat) {
        assert!(r < self.rows && c < self.cols, "index out of range");
        if v.is_zero() {
            self.data[r].remove(&c);
        } else {
            self.data[r].insert(c, v);
        }
    }
    pub fn add_at(&mut self, r: usize, c: usize, v: &GaussRat) {
        if v.is_zero() {
            return;
        }
        let row = &mut self.data[r];
        match row.get_mut(&c) {
            Some(x) => {
                *x += v;
                if x.is_zero() {
                    row.remove(&c);
                }
            }
            None => {
                row.insert(c, v.clone());
            }
        }
    }
    /// Iterate over stored entries in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &GaussRat)> {
        self.data.iter().enumerate().flat_map(|(i, r)| r.iter().map(move |(j, v)| (i, *j, v)))
    }
    pub fn column(&self, j: usize) -> ExactVector {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }
    pub fn to_dense(&self) -> Vec<Vec<GaussRat>> {
        (0..self.rows).map(|i| (0..self.cols).map(|j| self.get(i, j)).collect()).collect()
    }

    fn check_same_shape(&self, o: &Self) {
        assert!(self.rows == o.rows && self.cols == o.cols, "shape mismatch");
    }
    pub fn add(&self, o: &Self) -> Self {
        self.check_same_shape(o);
        let mut m = self.clone();
        for (i, j, v) in o.entries() {
            m.add_at(i, j, v);
        }
        m
    }
    pub fn sub(&self, o: &Self) -> Self {
        self.check_same_shape(o);
        let mut m = self.clone();
        for (i, j, v) in o.entries() {
            m.add_at(i, j, &-v);
        }
        m
    }
    pub fn add_scaled(&mut self, o: &Self, s: &GaussRat) {
        self.check_same_shape(o);
        if s.is_zero() {
            return;
        }
        for (i, j, v) in o.entries() {
            let t = v * s;
            self.add_at(i, j, &t);
        }
    }
    pub fn neg(&self) -> Self {
        self.scale(&GaussRat::int(-1))
    }
    pub fn scale(&self, s: &GaussRat) -> Self {
        if s.is_zero() {
            return Self::zeros(self.rows, self.cols);
        }
        let mut m = self.clone();
        for row in m.data.iter_mut() {
            for v in row.values_mut() {
                *v = &*v * s;
            }
        }
        m
    }
    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.cols, o.rows, "product shape mismatch");
        let mut out = Self::zeros(self.rows, o.cols);
        for (i, row) in self.data.iter().enumerate() {
            let mut acc: BTreeMap<usize, GaussRat> = BTreeMap::new();
            for (k, a) in row {
                for (j, b) in &o.data[*k] {
                    let t = a * b;
                    match acc.get_mut(j) {
                        Some(x) => *x += &t,
                        None => {
                            acc.insert(*j, t);
                        }
                    }
                }
            }
            acc.retain(|_, v| !v.is_zero());
            out.data[i] = acc;
        }
        out
    }
    pub fn mul_vec(&self, v: &[GaussRat]) -> ExactVector {
        assert_eq!(self.cols, v.len());
        self.data
            .iter()
            .map(|row| {
                let mut acc = GaussRat::zero();
                for (j, a) in row {
                    if !v[*j].is_zero() {
                        acc += &(a * &v[*j]);
                    }
                }
                acc
            })
            .collect()
    }
    pub fn transpose(&self) -> Self {
        let mut m = Self::zeros(self.cols, self.rows);
        for (i, j, v) in self.entries() {
            m.data[j].insert(i, v.clone());
        }
        m
    }
    pub fn conj(&self) -> Self {
        let mut m = self.clone();
        for row in m.data.iter_mut() {
            for v in row.values_mut() {
                *v = v.conj();
            }
        }
        m
    }
    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let mut m = Self::zeros(self.cols, self.rows);
        for (i, j, v) in self.entries() {
            m.data[j].insert(i, v.conj());
        }
        m
    }
    pub fn trace(&self) -> GaussRat {
        let mut acc = GaussRat::zero();
        for i in 0..self.rows.min(self.cols) {
            if let Some(v) = self.data[i].get(&i) {
                acc += v;
            }
        }
        acc
    }
    pub fn kron(&self, o: &Self) -> Self {
        let mut m = Self::zeros(self.rows * o.rows, self.cols * o.cols);
        for (i, j, a) in self.entries() {
            for (k, l, b) in o.entries() {
                m.data[i * o.rows + k].insert(j * o.cols + l, a * b);
            }
        }
        m
    }
    /// `self * o - o * self`.
    pub fn commutator(&self, o: &Self) -> Self {
        self.mul(o).sub(&o.mul(self))
    }
    /// `self * o + o * self`.
    pub fn anticommutator(&self, o: &Self) -> Self {
        self.mul(o).add(&o.mul(self))
    }
    pub fn is_hermitian(&self) -> bool {
        self.is_square() && *self == self.adjoint()
    }
    /// Restrict to the listed rows and columns.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Self {
        let cpos: BTreeMap<usize, usize> = cols.iter().enumerate().map(|(a, &b)| (b, a)).collect();
        let mut m = Self::zeros(rows.len(), cols.len());
        for (ni, &r) in rows.iter().enumerate() {
            for (c, v) in &self.data[r] {
                if let Some(&nc) = cpos.get(c) {
                    m.data[ni].insert(nc, v.clone());
                }
            }
        }
        m
    }
    /// If `self = s * o` for a scalar `s`, return it. Zero matrices give `Some(0)` only when `o` is zero too.
    pub fn proportionality(&self, o: &Self) -> Option<GaussRat> {
        if o.is_zero() {
            return if self.is_zero() { Some(GaussRat::zero()) } else { None };
        }
        let (i, j, v) = o.entries().next().unwrap();
        let s = self.get(i, j) / v;
        if *self == o.scale(&s) {
            Some(s)
        } else {
            None
        }
    }
    /// Flatten row-major into a vector.
    pub fn vectorize(&self) -> ExactVector {
        let mut v = vec![GaussRat::zero(); self.rows * self.cols];
        for (i, j, x) in self.entries() {
            v[i * self.cols + j] = x.clone();
        }
        v
    }
    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::identity(self.rows);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }
}

impl fmt::Display for ExactMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j).to_string()).collect::<Vec<_>>().join(","))
            .collect();
        write!(f, "{}", rows.join(";"))
    }
}

impl FromStr for ExactMatrix {
    type Err = LinAlgError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let rows: Result<Vec<Vec<GaussRat>>, _> =
            s.split(';').map(|r| r.split(',').map(|x| x.parse::<GaussRat>()).collect()).collect();
        let rows = rows?;
        let c = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != c) {
            return Err(LinAlgError::Parse { kind: "matrix", text: s.to_string() });
        }
        Ok(ExactMatrix::from_dense(rows))
    }
}

/// Reduced row echelon form with leftmost-column, topmost-row pivoting.
#[derive(Clone, Debug)]
pub struct Rref {
    pub rows: Vec<BTreeMap<usize, GaussRat>>,
    pub pivots: Vec<usize>,
    pub cols: usize,
}

fn row_axpy(target: &mut BTreeMap<usize, GaussRat>, src: &BTreeMap<usize, GaussRat>, f: &GaussRat) {
    for (j, v) in src {
        let t = v * f;
        match target.get_mut(j) {
            Some(x) => {
                *x -= &t;
                if x.is_zero() {
                    target.remove(j);
                }
            }
            None => {
                target.insert(*j, -t);
            }
        }
    }
}

pub fn rref(m: &ExactMatrix) -> Rref {
    let mut rows: Vec<BTreeMap<usize, GaussRat>> = m.data.clone();
    let mut pivots = Vec::new();
    let mut prow = 0;
    for col in 0..m.cols {
        if prow == rows.len() {
            break;
        }
        let Some(r) = (prow..rows.len()).find(|&r| rows[r].contains_key(&col)) else {
            continue;
        };
        rows.swap(prow, r);
        let inv = rows[prow][&col].inv().unwrap();
        for v in rows[prow].values_mut() {
            *v = &*v * &inv;
        }
        let pivot_row = rows[prow].clone();
        for (r2, row) in rows.iter_mut().enumerate() {
            if r2 == prow {
                continue;
            }
            if let Some(f) = row.get(&col).cloned() {
                row_axpy(row, &pivot_row, &f);
            }
        }
        pivots.push(col);
        prow += 1;
    }
    rows.truncate(pivots.len());
    Rref { rows, pivots, cols: m.cols }
}

pub fn rank(m: &ExactMatrix) -> usize {
    rref(m).pivots.len()
}

/// Basis of the null space; one vector per free column, with a 1 in that column.
pub fn kernel_basis(m: &ExactMatrix) -> Vec<ExactVector> {
    let r = rref(m);
    let pivset: BTreeMap<usize, usize> = r.pivots.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    let mut out = Vec::new();
    for f in 0..m.cols {
        if pivset.contains_key(&f) {
            continue;
        }
        let mut v = vec![GaussRat::zero(); m.cols];
        v[f] = GaussRat::one();
        for (i, &pc) in r.pivots.iter().enumerate() {
            if let Some(x) = r.rows[i].get(&f) {
                v[pc] = -x;
            }
        }
        out.push(v);
    }
    out
}

/// Solve `a x = b`, free variables set to zero.
pub fn solve_linear(a: &ExactMatrix, b: &[GaussRat]) -> Result<ExactVector, LinAlgError> {
    if b.len() != a.rows {
        return Err(LinAlgError::Shape(format!("rhs length {} vs {} rows", b.len(), a.rows)));
    }
    let mut aug = ExactMatrix::zeros(a.rows, a.cols + 1);
    for (i, j, v) in a.entries() {
        aug.data[i].insert(j, v.clone());
    }
    for (i, v) in b.iter().enumerate() {
        aug.set(i, a.cols, v.clone());
    }
    let r = rref(&aug);
    if r.pivots.last() == Some(&a.cols) {
        return Err(LinAlgError::NoSolution);
    }
    let mut x = vec![GaussRat::zero(); a.cols];
    for (i, &pc) in r.pivots.iter().enumerate() {
        if let Some(v) = r.rows[i].get(&a.cols) {
            x[pc] = v.clone();
        }
    }
    Ok(x)
}

pub fn inverse(a: &ExactMatrix) -> Result<ExactMatrix, LinAlgError> {
    if !a.is_square() {
        return Err(LinAlgError::Shape("inverse of non-square matrix".into()));
    }
    let n = a.rows;
    let mut aug = ExactMatrix::zeros(n, 2 * n);
    for (i, j, v) in a.entries() {
        aug.data[i].insert(j, v.clone());
    }
    for i in 0..n {
        aug.data[i].insert(n + i, GaussRat::one());
    }
    if n == 0 {
        return Ok(ExactMatrix::zeros(0, 0));
    }
    let r = rref(&aug);
    if r.pivots.len() < n || r.pivots[n - 1] >= n {
        return Err(LinAlgError::Singular);
    }
    let mut inv = ExactMatrix::zeros(n, n);
    for (i, row) in r.rows.iter().enumerate() {
        for (j, v) in row.range(n..) {
            inv.data[i].insert(j - n, v.clone());
        }
    }
    Ok(inv)
}

/// Coordinates with respect to a linearly independent family of column vectors.
#[derive(Clone, Debug)]
pub struct SubspaceCoords {
    basis: ExactMatrix,
    pivot_rows: Vec<usize>,
    left_inv: ExactMatrix,
}

impl SubspaceCoords {
    pub fn new(dim: usize, vectors: &[ExactVector]) -> Result<Self, LinAlgError> {
        let basis = ExactMatrix::from_columns(dim, vectors);
        let r = rref(&basis.transpose());
        if r.pivots.len() != vectors.len() {
            return Err(LinAlgError::Singular);
        }
        let pivot_rows = r.pivots.clone();
        let all: Vec<usize> = (0..vectors.len()).collect();
        let square = basis.select(&pivot_rows, &all);
        let left_inv = inverse(&square)?;
        Ok(SubspaceCoords { basis, pivot_rows, left_inv })
    }
    pub fn dim(&self) -> usize {
        self.basis.cols
    }
    pub fn basis(&self) -> &ExactMatrix {
        &self.basis
    }
    /// Coordinates of `v`, or `None` if `v` is outside the span.
    pub fn coords(&self, v: &[GaussRat]) -> Option<ExactVector> {
        let sub: ExactVector = self.pivot_rows.iter().map(|&r| v[r].clone()).collect();
        let c = self.left_inv.mul_vec(&sub);
        if self.basis.mul_vec(&c) == v {
            Some(c)
        } else {
            None
        }
    }
    /// Matrix of `op` restricted to the span, or `None` if the span is not preserved.
    pub fn restrict(&self, op: &ExactMatrix) -> Option<ExactMatrix> {
        let image = op.mul(&self.basis);
        let sub = image.select(&self.pivot_rows, &(0..image.cols).collect::<Vec<_>>());
        let m = self.left_inv.mul(&sub);
        if self.basis.mul(&m) == image {
            Some(m)
        } else {
            None
        }
    }
}

/// Result of Hermitian congruence diagonalization: `p^H g p = diag(d)`.
#[derive(Clone, Debug)]
pub struct Congruence {
    pub diag: Vec<Rat>,
    pub p: ExactMatrix,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub struct Signature {
    pub n_plus: usize,
    pub n_minus: usize,
    pub n_zero: usize,
}

impl Signature {
    pub fn is_definite(&self) -> bool {
        self.n_zero == 0 && (self.n_plus == 0 || self.n_minus == 0)
    }
    pub fn is_indefinite(&self) -> bool {
        self.n_plus > 0 && self.n_minus > 0
    }
}

pub fn congruence_diagonalize(g: &ExactMatrix) -> Result<Congruence, LinAlgError> {
    if !g.is_hermitian() {
        return Err(LinAlgError::NotHermitian);
    }
    let n = g.rows;
    let mut a = g.to_dense();
    let mut p = ExactMatrix::identity(n).to_dense();
    // e_j <- e_j + alpha e_l applied as a congruence
    let col_op = |a: &mut Vec<Vec<GaussRat>>, p: &mut Vec<Vec<GaussRat>>, j: usize, l: usize, alpha: &GaussRat| {
        for row in a.iter_mut() {
            let t = &row[l] * alpha;
            row[j] += &t;
        }
        let ca = alpha.conj();
        let lrow = a[l].clone();
        for (x, y) in a[j].iter_mut().zip(lrow.iter()) {
            *x += &(y * &ca);
        }
        for row in p.iter_mut() {
            let t = &row[l] * alpha;
            row[j] += &t;
        }
    };
    let swap = |a: &mut Vec<Vec<GaussRat>>, p: &mut Vec<Vec<GaussRat>>, i: usize, j: usize| {
        if i == j {
            return;
        }
        a.swap(i, j);
        for row in a.iter_mut() {
            row.swap(i, j);
        }
        for row in p.iter_mut() {
            row.swap(i, j);
        }
    };
    for i in 0..n {
        let mut piv = (i..n).find(|&j| !a[j][j].is_zero());
        if piv.is_none() {
            let pair = (i..n).flat_map(|j| (i..n).map(move |l| (j, l))).find(|&(j, l)| !a[j][l].is_zero());
            let Some((j, l)) = pair else { break };
            let alpha = a[j][l].conj();
            col_op(&mut a, &mut p, j, l, &alpha);
            piv = Some(j);
        }
        let j = piv.unwrap();
        swap(&mut a, &mut p, i, j);
        let d = a[i][i].clone();
        for r in i + 1..n {
            if a[i][r].is_zero() {
                continue;
            }
            let beta = -(&a[i][r] / &d);
            col_op(&mut a, &mut p, r, i, &beta);
        }
    }
    let diag: Vec<Rat> = (0..n)
        .map(|i| {
            debug_assert!(a[i][i].is_real());
            a[i][i].re.clone()
        })
        .collect();
    Ok(Congruence { diag, p: ExactMatrix::from_dense(p) })
}

pub fn hermitian_signature(g: &ExactMatrix) -> Result<Signature, LinAlgError> {
    let c = congruence_diagonalize(g)?;
    let mut s = Signature { n_plus: 0, n_minus: 0, n_zero: 0 };
    for d in &c.diag {
        if d.is_positive() {
            s.n_plus += 1;
        } else if d.is_negative() {
            s.n_minus += 1;
        } else {
            s.n_zero += 1;
        }
    }
    Ok(s)
}
