//! The index set W of weight vectors, its equivalence classes under the
//! deformation direction h, and the Dwork-case combinatorial profiles.
//!
//! W consists of vectors (w_1, ..., w_n) with 0 <= w_i < t and
//! sum w_i = 0 mod t, where t = gcd(d, q-1); |W| = t^{n-1}. Two vectors are
//! equivalent when they differ by an integer multiple of h mod t; with
//! gcd(h_i) = 1 every class has exactly t members and contains a member with
//! some zero coordinate.

use crate::error::{Error, Result};
use num_integer::Integer;
use num_rational::Ratio;

pub type Ratio64 = Ratio<i64>;

/// A weight vector in W for modulus t.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WeightVector {
    pub w: Vec<u32>,
    pub t: u32,
}

impl WeightVector {
    pub fn has_zero_coordinate(&self) -> bool {
        self.w.contains(&0)
    }

    pub fn all_nonzero(&self) -> bool {
        self.w.iter().all(|&x| x != 0)
    }

    /// Coordinate-wise negation mod t.
    pub fn negated(&self) -> WeightVector {
        WeightVector {
            w: self.w.iter().map(|&x| (self.t - x) % self.t).collect(),
            t: self.t,
        }
    }
}

/// One equivalence class of W under ~_h.
#[derive(Clone, Debug)]
pub struct WClass {
    /// Members in lexicographic order.
    pub members: Vec<WeightVector>,
    /// Index into `members` of the canonical (lex-smallest) representative.
    pub rep: usize,
    /// Index of the lex-smallest member with some zero coordinate.
    pub zero_rep: usize,
}

impl WClass {
    pub fn representative(&self) -> &WeightVector {
        &self.members[self.rep]
    }
    pub fn zero_representative(&self) -> &WeightVector {
        &self.members[self.zero_rep]
    }
    pub fn zero_members(&self) -> impl Iterator<Item = &WeightVector> {
        self.members.iter().filter(|m| m.has_zero_coordinate())
    }
}

/// W together with its partition into ~_h classes.
#[derive(Clone, Debug)]
pub struct WClassDecomposition {
    pub t: u32,
    pub all: Vec<WeightVector>,
    pub classes: Vec<WClass>,
}

/// All of W for (n, t), in lexicographic order; |W| = t^{n-1}.
pub fn build_w_set(n: u32, t: u32) -> Vec<WeightVector> {
    assert!(n >= 2 && t >= 1);
    let count = (t as u64).pow(n - 1);
    let mut out = Vec::with_capacity(count as usize);
    let mut prefix = vec![0u32; (n - 1) as usize];
    loop {
        let sum: u64 = prefix.iter().map(|&x| x as u64).sum();
        let last = ((t as u64 - sum % t as u64) % t as u64) as u32;
        let mut w = prefix.clone();
        w.push(last);
        out.push(WeightVector { w, t });
        // lexicographic odometer: last prefix coordinate moves fastest
        let mut pos = prefix.len();
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            prefix[pos] += 1;
            if prefix[pos] < t {
                break;
            }
            prefix[pos] = 0;
            if pos == 0 {
                return out;
            }
        }
    }
}

fn vec_index(w: &[u32], t: u32) -> u64 {
    let mut idx = 0u64;
    for &x in w {
        idx = idx * t as u64 + x as u64;
    }
    idx
}

/// Partition W into ~_h classes. Requires gcd(h_1, ..., h_n) = 1.
pub fn partition_classes(wset: &[WeightVector], h: &[u32], t: u32) -> Result<WClassDecomposition> {
    let g = h.iter().fold(0u64, |acc, &x| acc.gcd(&(x as u64)));
    if g != 1 {
        return Err(Error::HNotCoprime(g));
    }
    if t == 0 {
        return Err(Error::Internal("t must be positive".into()));
    }
    let mut index_of = std::collections::HashMap::new();
    for (i, w) in wset.iter().enumerate() {
        index_of.insert(vec_index(&w.w, t), i);
    }
    let mut assigned = vec![false; wset.len()];
    let mut classes = Vec::new();
    for (start, w0) in wset.iter().enumerate() {
        if assigned[start] {
            continue;
        }
        let mut member_ids = Vec::new();
        for m in 0..t {
            let shifted: Vec<u32> =
                w0.w.iter()
                    .zip(h)
                    .map(|(&wi, &hi)| ((wi as u64 + m as u64 * hi as u64) % t as u64) as u32)
                    .collect();
            let id = *index_of
                .get(&vec_index(&shifted, t))
                .ok_or_else(|| Error::Internal("orbit left W".into()))?;
            if !member_ids.contains(&id) {
                member_ids.push(id);
            }
        }
        if member_ids.len() != t as usize {
            return Err(Error::Internal(format!(
                "class size {} != t = {t}; gcd(h) = 1 should force full orbits",
                member_ids.len()
            )));
        }
        for &id in &member_ids {
            assigned[id] = true;
        }
        let mut members: Vec<WeightVector> =
            member_ids.iter().map(|&id| wset[id].clone()).collect();
        members.sort();
        let zero_rep = members
            .iter()
            .position(|m| m.has_zero_coordinate())
            .ok_or_else(|| Error::Internal("class without zero-coordinate member".into()))?;
        classes.push(WClass {
            members,
            rep: 0,
            zero_rep,
        });
    }
    Ok(WClassDecomposition {
        t,
        all: wset.to_vec(),
        classes,
    })
}

/// Dwork-case profile of a weight vector: multiplicities n_k, the missing and
/// present residues S_w and S_w^c, and the parameter lists A_w, B_w.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DworkProfile {
    pub n_k: Vec<u32>,
    pub s_missing: Vec<u32>,
    pub s_present: Vec<u32>,
    pub a_list: Vec<Ratio64>,
    pub b_list: Vec<Ratio64>,
}

/// Profile of w in the Dwork setting h = (1,...,1), d = n, t = gcd(n, q-1).
///
/// A_w = [(t-k)/t : k in S_w] ++ [b/n : 0 <= b <= n-1, b not = 0 mod n/t],
/// B_w = [(t-k)/t repeated n_k - 1 times : k in S_w^c]; both lists have
/// n - |S_w^c| entries. The entry (t-0)/t = 1 is kept as the rational 1.
pub fn dwork_profile(w: &WeightVector, n: u32, t: u32) -> Result<DworkProfile> {
    if t == 0 || n % t != 0 {
        return Err(Error::DworkProfileInvalid(t, n));
    }
    let mut n_k = vec![0u32; t as usize];
    for &wi in &w.w {
        n_k[wi as usize] += 1;
    }
    let s_missing: Vec<u32> = (0..t).filter(|&k| n_k[k as usize] == 0).collect();
    let s_present: Vec<u32> = (0..t).filter(|&k| n_k[k as usize] > 0).collect();
    let mut a_list = Vec::new();
    for &k in &s_missing {
        a_list.push(Ratio64::new((t - k) as i64, t as i64));
    }
    let step = (n / t) as i64;
    for b in 0..n as i64 {
        if b % step != 0 {
            a_list.push(Ratio64::new(b, n as i64));
        }
    }
    let mut b_list = Vec::new();
    for &k in &s_present {
        for _ in 1..n_k[k as usize] {
            b_list.push(Ratio64::new((t - k) as i64, t as i64));
        }
    }
    let expected = (n as usize) - s_present.len();
    if a_list.len() != expected || b_list.len() != expected {
        return Err(Error::ListLengthMismatch(a_list.len(), b_list.len()));
    }
    Ok(DworkProfile {
        n_k,
        s_missing,
        s_present,
        a_list,
        b_list,
    })
}
