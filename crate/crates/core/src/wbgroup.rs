//! The hyperoctahedral group W(B_k) as signed permutations.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("rank {0} too large to enumerate (max 6)")]
    TooLarge(usize),
    #[error("cannot parse signed permutation {0:?}")]
    Parse(String),
}

/// `w(i) = signs[i] * perm[i]` in one-line notation (1-based images).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SignedPerm {
    pub perm: Vec<usize>,
    pub signs: Vec<i8>,
}

/// Simple reflections: `S(i)` swaps i and i+1, `Theta` flips the last coordinate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SimpleReflection {
    S(usize),
    Theta,
}

impl SignedPerm {
    pub fn identity(k: usize) -> Self {
        SignedPerm { perm: (1..=k).collect(), signs: vec![1; k] }
    }
    pub fn rank(&self) -> usize {
        self.perm.len()
    }
    /// Transposition of i and i+1.
    pub fn simple_s(k: usize, i: usize) -> Self {
        let mut g = Self::identity(k);
        g.perm.swap(i - 1, i);
        g
    }
    /// Sign flip of coordinate j.
    pub fn theta(k: usize, j: usize) -> Self {
        let mut g = Self::identity(k);
        g.signs[j - 1] = -1;
        g
    }
    pub fn simple(k: usize, r: SimpleReflection) -> Self {
        match r {
            SimpleReflection::S(i) => Self::simple_s(k, i),
            SimpleReflection::Theta => Self::theta(k, k),
        }
    }
    /// Reflection in eps_a - eps_b.
    pub fn reflection_diff(k: usize, a: usize, b: usize) -> Self {
        let mut g = Self::identity(k);
        g.perm.swap(a - 1, b - 1);
        g
    }
    /// Reflection in eps_a + eps_b: eps_a -> -eps_b, eps_b -> -eps_a.
    pub fn reflection_sum(k: usize, a: usize, b: usize) -> Self {
        let mut g = Self::reflection_diff(k, a, b);
        g.signs[a - 1] = -1;
        g.signs[b - 1] = -1;
        g
    }
    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.rank())
    }
    /// Image of the signed index `idx` (may be negative).
    pub fn apply(&self, idx: i64) -> i64 {
        let i = idx.unsigned_abs() as usize;
        let img = self.signs[i - 1] as i64 * self.perm[i - 1] as i64;
        if idx < 0 {
            -img
        } else {
            img
        }
    }
    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Self) -> Self {
        let k = self.rank();
        let mut perm = vec![0; k];
        let mut signs = vec![1; k];
        for i in 1..=k {
            let img = self.apply(other.apply(i as i64));
            perm[i - 1] = img.unsigned_abs() as usize;
            signs[i - 1] = img.signum() as i8;
        }
        SignedPerm { perm, signs }
    }
    pub fn inverse(&self) -> Self {
        let k = self.rank();
        let mut perm = vec![0; k];
        let mut signs = vec![1; k];
        for i in 0..k {
            perm[self.perm[i] - 1] = i + 1;
            signs[self.perm[i] - 1] = self.signs[i];
        }
        SignedPerm { perm, signs }
    }
    /// Action on a weight given by coefficients on eps_1..eps_k.
    pub fn act_on_weight(&self, w: &[i64]) -> Vec<i64> {
        let mut out = vec![0; w.len()];
        for (i, &c) in w.iter().enumerate() {
            let img = self.apply(i as i64 + 1);
            out[img.unsigned_abs() as usize - 1] += c * img.signum();
        }
        out
    }
    /// Number of positive roots sent to negative roots.
    pub fn length(&self) -> usize {
        positive_roots(self.rank()).iter().filter(|r| !is_positive(&self.act_on_weight(r))).count()
    }
    /// A reduced word `g_1 g_2 ... g_m` with `self = g_1 ∘ ... ∘ g_m`.
    pub fn reduced_word(&self) -> Vec<SimpleReflection> {
        let k = self.rank();
        let mut w = self.clone();
        let mut word = Vec::new();
        while !w.is_identity() {
            let l = w.length();
            let gens = (1..k).map(SimpleReflection::S).chain(std::iter::once(SimpleReflection::Theta));
            for s in gens {
                let ws = w.compose(&Self::simple(k, s));
                if ws.length() < l {
                    word.push(s);
                    w = ws;
                    break;
                }
            }
        }
        word.reverse();
        word
    }
}

/// Signed index of `g(eps_idx)`.
pub fn act_on_epsilon(g: &SignedPerm, idx: usize) -> i64 {
    g.apply(idx as i64)
}

/// Positive roots eps_i, eps_i - eps_j, eps_i + eps_j (i < j) as coefficient vectors.
pub fn positive_roots(k: usize) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    for i in 0..k {
        let mut r = vec![0; k];
        r[i] = 1;
        out.push(r);
        for j in i + 1..k {
            let mut d = vec![0; k];
            d[i] = 1;
            d[j] = -1;
            out.push(d);
            let mut s = vec![0; k];
            s[i] = 1;
            s[j] = 1;
            out.push(s);
        }
    }
    out
}

fn is_positive(w: &[i64]) -> bool {
    w.iter().find(|&&c| c != 0).is_some_and(|&c| c > 0)
}

/// All k!·2^k elements, ordered by permutation word and then by sign vector.
pub fn enumerate_group(k: usize) -> Result<Vec<SignedPerm>, GroupError> {
    if k > 6 {
        return Err(GroupError::TooLarge(k));
    }
    let mut perms = Vec::new();
    permutations(&mut (1..=k).collect::<Vec<_>>(), 0, &mut perms);
    perms.sort();
    let mut out = Vec::with_capacity(perms.len() << k);
    for p in perms {
        // -1 < +1 in lexicographic order of the sign vector
        for mask in 0..1usize << k {
            let signs = (0..k).map(|i| if mask >> (k - 1 - i) & 1 == 1 { 1 } else { -1 }).collect();
            out.push(SignedPerm { perm: p.clone(), signs });
        }
    }
    Ok(out)
}

fn permutations(v: &mut Vec<usize>, start: usize, out: &mut Vec<Vec<usize>>) {
    if start == v.len() {
        out.push(v.clone());
        return;
    }
    for i in start..v.len() {
        v.swap(start, i);
        permutations(v, start + 1, out);
        v.swap(start, i);
    }
}

/// theta_1 ... theta_k.
pub fn longest_element(k: usize) -> SignedPerm {
    SignedPerm { perm: (1..=k).collect(), signs: vec![-1; k] }
}

impl fmt::Display for SignedPerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.perm.iter().zip(&self.signs).map(|(p, s)| (*p as i64 * *s as i64).to_string()).collect();
        f.write_str(&parts.join(","))
    }
}

impl FromStr for SignedPerm {
    type Err = GroupError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || GroupError::Parse(s.to_string());
        let vals: Vec<i64> = s.split(',').map(|x| x.trim().parse::<i64>()).collect::<Result<_, _>>().map_err(|_| err())?;
        let k = vals.len();
        let perm: Vec<usize> = vals.iter().map(|v| v.unsigned_abs() as usize).collect();
        let mut seen = vec![false; k + 1];
        for &p in &perm {
            if p == 0 || p > k || seen[p] {
                return Err(err());
            }
            seen[p] = true;
        }
        let signs = vals.iter().map(|v| v.signum() as i8).collect();
        Ok(SignedPerm { perm, signs })
    }
}

/// Left-regular representation matrix of g on the enumerated basis: column j holds g * basis[j].
pub fn regular_matrix(g: &SignedPerm, basis: &[SignedPerm]) -> Vec<usize> {
    let pos: std::collections::HashMap<&SignedPerm, usize> = basis.iter().enumerate().map(|(i, b)| (b, i)).collect();
    basis.iter().map(|b| pos[&g.compose(b)]).collect()
}
