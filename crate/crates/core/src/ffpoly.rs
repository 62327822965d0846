//! Sparse multivariate polynomials over F_p in a `t`-block and a `z`-block.
//!
//! A polynomial lives in an [`Ambient`] `(p, k, n)`: `k` variables `t_1..t_k`
//! followed by `n` variables `z_1..z_n`. Terms are kept sorted by the
//! lexicographic order on the concatenated exponent vector `(t, z)` and no
//! stored coefficient is zero, so structural equality is polynomial equality.
//!
//! Arithmetic operators (`&a + &b`, `&a * &b`, ...) panic on ambient mismatch;
//! the `checked_*` methods report it as [`Error::AmbientMismatch`].

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::field::{FieldElement, PrimeField};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Ambient {
    field: PrimeField,
    k: usize,
    n: usize,
}

impl Ambient {
    pub fn new(p: u64, k: usize, n: usize) -> Result<Self> {
        Ok(Self {
            field: PrimeField::new(p)?,
            k,
            n,
        })
    }

    pub fn with_field(field: PrimeField, k: usize, n: usize) -> Self {
        Self { field, k, n }
    }

    pub fn p(&self) -> u64 {
        self.field.p()
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Same field and z-block, no t-variables.
    pub fn z_only(&self) -> Self {
        Self { k: 0, ..*self }
    }

    fn nvars(&self) -> usize {
        self.k + self.n
    }

    fn index(&self, var: Var) -> Result<usize> {
        match var {
            Var::T(i) if i < self.k => Ok(i),
            Var::Z(s) if s < self.n => Ok(self.k + s),
            _ => Err(Error::UnknownVariable(format!("{var} in {self}"))),
        }
    }
}

impl fmt::Display for Ambient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}[t; {}][z; {}]", self.p(), self.k, self.n)
    }
}

/// A variable of the ambient ring, 0-based within its block.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Var {
    T(usize),
    Z(usize),
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::T(i) => write!(f, "t{}", i + 1),
            Var::Z(s) => write!(f, "z{}", s + 1),
        }
    }
}

/// Exponent vector `(t_1..t_k, z_1..z_n)`; the block split is owned by the ambient.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn new(t: &[u32], z: &[u32]) -> Self {
        let mut v = Vec::with_capacity(t.len() + z.len());
        v.extend_from_slice(t);
        v.extend_from_slice(z);
        Self(v)
    }

    pub fn one(nvars: usize) -> Self {
        Self(vec![0; nvars])
    }

    pub fn exps(&self) -> &[u32] {
        &self.0
    }

    fn times(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparsePoly {
    amb: Ambient,
    terms: Vec<(Monomial, FieldElement)>,
}

impl SparsePoly {
    pub fn zero(amb: Ambient) -> Self {
        Self {
            amb,
            terms: Vec::new(),
        }
    }

    pub fn constant(amb: Ambient, c: FieldElement) -> Self {
        let c = amb.field.reduce(c);
        let terms = if c == 0 {
            Vec::new()
        } else {
            vec![(Monomial::one(amb.nvars()), c)]
        };
        Self { amb, terms }
    }

    pub fn one(amb: Ambient) -> Self {
        Self::constant(amb, 1)
    }

    pub fn var(amb: Ambient, var: Var) -> Result<Self> {
        let idx = amb.index(var)?;
        let mut m = Monomial::one(amb.nvars());
        m.0[idx] = 1;
        Ok(Self {
            amb,
            terms: vec![(m, 1)],
        })
    }

    /// `c_t + Σ a_i t_i + Σ b_s z_s`; coefficients given as signed integers.
    pub fn linear(amb: Ambient, constant: i64, t: &[(usize, i64)], z: &[(usize, i64)]) -> Result<Self> {
        let f = amb.field;
        let mut out = Self::constant(amb, f.from_i64(constant));
        for &(i, c) in t {
            out = &out + &Self::var(amb, Var::T(i))?.scale(f.from_i64(c));
        }
        for &(s, c) in z {
            out = &out + &Self::var(amb, Var::Z(s))?.scale(f.from_i64(c));
        }
        Ok(out)
    }

    /// Builds a polynomial from arbitrary terms, merging duplicates and pruning zeros.
    pub fn from_terms<I>(amb: Ambient, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Monomial, FieldElement)>,
    {
        let mut map: BTreeMap<Monomial, FieldElement> = BTreeMap::new();
        for (m, c) in terms {
            if m.0.len() != amb.nvars() {
                return Err(Error::LengthMismatch {
                    expected: amb.nvars(),
                    got: m.0.len(),
                });
            }
            let e = map.entry(m).or_insert(0);
            *e = amb.field.add(*e, amb.field.reduce(c));
        }
        Ok(Self {
            amb,
            terms: map.into_iter().filter(|(_, c)| *c != 0).collect(),
        })
    }

    fn from_map(amb: Ambient, map: HashMap<Monomial, FieldElement>) -> Self {
        let mut terms: Vec<_> = map.into_iter().filter(|(_, c)| *c != 0).collect();
        terms.sort_unstable_by(|a, b| a.0.cmp(&b.0));
        Self { amb, terms }
    }

    pub fn ambient(&self) -> Ambient {
        self.amb
    }

    pub fn field(&self) -> PrimeField {
        self.amb.field
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], &[u32], FieldElement)> + '_ {
        let k = self.amb.k;
        self.terms.iter().map(move |(m, c)| (&m.0[..k], &m.0[k..], *c))
    }

    /// Coefficient of the monomial with the given exponents.
    pub fn coefficient(&self, t: &[u32], z: &[u32]) -> FieldElement {
        let m = Monomial::new(t, z);
        self.terms
            .binary_search_by(|(x, _)| x.cmp(&m))
            .map(|i| self.terms[i].1)
            .unwrap_or(0)
    }

    pub fn degree_in(&self, var: Var) -> Result<u32> {
        let idx = self.amb.index(var)?;
        Ok(self.terms.iter().map(|(m, _)| m.0[idx]).max().unwrap_or(0))
    }

    pub fn total_degree(&self) -> u32 {
        self.terms
            .iter()
            .map(|(m, _)| m.0.iter().sum::<u32>())
            .max()
            .unwrap_or(0)
    }

    fn same_ambient(&self, other: &Self) -> Result<()> {
        if self.amb != other.amb {
            return Err(Error::AmbientMismatch(self.amb.to_string(), other.amb.to_string()));
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.same_ambient(other)?;
        let f = self.amb.field;
        // Merge of two sorted lists.
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() && j < other.terms.len() {
            let (ma, ca) = &self.terms[i];
            let (mb, cb) = &other.terms[j];
            match ma.cmp(mb) {
                std::cmp::Ordering::Less => {
                    out.push((ma.clone(), *ca));
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push((mb.clone(), *cb));
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let c = f.add(*ca, *cb);
                    if c != 0 {
                        out.push((ma.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.terms[i..]);
        out.extend_from_slice(&other.terms[j..]);
        Ok(Self {
            amb: self.amb,
            terms: out,
        })
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.checked_add(&other.neg_poly())
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.same_ambient(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero(self.amb));
        }
        let f = self.amb.field;
        let mut map: HashMap<Monomial, FieldElement> =
            HashMap::with_capacity(self.terms.len().max(other.terms.len()) * 2);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let e = map.entry(ma.times(mb)).or_insert(0);
                *e = f.add(*e, f.mul(*ca, *cb));
            }
        }
        Ok(Self::from_map(self.amb, map))
    }

    fn neg_poly(&self) -> Self {
        let f = self.amb.field;
        Self {
            amb: self.amb,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), f.neg(*c))).collect(),
        }
    }

    pub fn scale(&self, c: FieldElement) -> Self {
        let f = self.amb.field;
        let c = f.reduce(c);
        if c == 0 {
            return Self::zero(self.amb);
        }
        Self {
            amb: self.amb,
            terms: self.terms.iter().map(|(m, x)| (m.clone(), f.mul(*x, c))).collect(),
        }
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut acc = Self::one(self.amb);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Formal partial derivative; exponent factors are reduced mod p.
    pub fn partial_derivative(&self, var: Var) -> Result<Self> {
        let idx = self.amb.index(var)?;
        let f = self.amb.field;
        let mut terms = Vec::with_capacity(self.terms.len());
        for (m, c) in &self.terms {
            let e = m.0[idx];
            let c = f.mul(*c, f.reduce(e as u64));
            if c != 0 {
                let mut m = m.clone();
                m.0[idx] -= 1;
                terms.push((m, c));
            }
        }
        // Lowering one exponent can reorder terms.
        terms.sort_unstable_by(|a, b| a.0.cmp(&b.0));
        Ok(Self {
            amb: self.amb,
            terms,
        })
    }

    /// The polynomial `a(t + q, z)`.
    pub fn shift_t(&self, q: &[FieldElement]) -> Result<Self> {
        if q.len() != self.amb.k {
            return Err(Error::LengthMismatch {
                expected: self.amb.k,
                got: q.len(),
            });
        }
        let f = self.amb.field;
        let q: Vec<_> = q.iter().map(|&x| f.reduce(x)).collect();
        let mut binom = BinomialRows::new(f);
        let mut cur = self.clone();
        for (i, &qi) in q.iter().enumerate() {
            if qi == 0 {
                continue;
            }
            let mut map: HashMap<Monomial, FieldElement> = HashMap::with_capacity(cur.terms.len() * 2);
            for (m, c) in &cur.terms {
                let e = m.0[i];
                let row = binom.row(e);
                // (t + q)^e = Σ_j C(e, j) q^(e-j) t^j
                let mut qpow = 1;
                for j in (0..=e).rev() {
                    let coeff = f.mul(f.mul(*c, row[j as usize]), qpow);
                    if coeff != 0 {
                        let mut mm = m.clone();
                        mm.0[i] = j;
                        let slot = map.entry(mm).or_insert(0);
                        *slot = f.add(*slot, coeff);
                    }
                    qpow = f.mul(qpow, qi);
                }
            }
            cur = Self::from_map(self.amb, map);
        }
        Ok(cur)
    }

    /// Coefficient of `Π t_i^{e_i}`, as a polynomial in `z` alone (ambient `k = 0`).
    pub fn coeff_t(&self, e: &[u32]) -> Result<Self> {
        let k = self.amb.k;
        if e.len() != k {
            return Err(Error::LengthMismatch {
                expected: k,
                got: e.len(),
            });
        }
        let terms = self
            .terms
            .iter()
            .filter(|(m, _)| &m.0[..k] == e)
            .map(|(m, c)| (Monomial(m.0[k..].to_vec()), *c))
            .collect();
        Ok(Self {
            amb: self.amb.z_only(),
            terms,
        })
    }

    /// Value at a full assignment of the t- and z-blocks.
    pub fn eval(&self, t: &[FieldElement], z: &[FieldElement]) -> Result<FieldElement> {
        if t.len() != self.amb.k || z.len() != self.amb.n {
            return Err(Error::Parse(format!(
                "incomplete assignment: need {} t-values and {} z-values, got {} and {}",
                self.amb.k,
                self.amb.n,
                t.len(),
                z.len()
            )));
        }
        let f = self.amb.field;
        let point: Vec<FieldElement> = t.iter().chain(z).map(|&x| f.reduce(x)).collect();
        let mut acc = 0;
        for (m, c) in &self.terms {
            let mut v = *c;
            for (x, &e) in point.iter().zip(&m.0) {
                if e > 0 {
                    v = f.mul(v, f.pow(*x, e as u64));
                }
            }
            acc = f.add(acc, v);
        }
        Ok(acc)
    }

    /// Substitutes `z = x`, leaving a polynomial in `t` alone (ambient `n = 0`).
    pub fn eval_z(&self, x: &[FieldElement]) -> Result<Self> {
        let (k, n) = (self.amb.k, self.amb.n);
        if x.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                got: x.len(),
            });
        }
        let f = self.amb.field;
        let mut map: HashMap<Monomial, FieldElement> = HashMap::new();
        for (m, c) in &self.terms {
            let mut v = *c;
            for (s, &e) in m.0[k..].iter().enumerate() {
                if e > 0 {
                    v = f.mul(v, f.pow(x[s], e as u64));
                }
            }
            if v != 0 {
                let slot = map.entry(Monomial(m.0[..k].to_vec())).or_insert(0);
                *slot = f.add(*slot, v);
            }
        }
        Ok(Self::from_map(Ambient { n: 0, ..self.amb }, map))
    }

    /// Re-embeds a polynomial without t-variables into an ambient with `k` of them.
    pub fn lift_t(&self, k: usize) -> Result<Self> {
        if self.amb.k != 0 {
            return Err(Error::AmbientMismatch(self.amb.to_string(), "a z-only ring".into()));
        }
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| (Monomial::new(&vec![0; k], &m.0), *c))
            .collect();
        Ok(Self {
            amb: Ambient { k, ..self.amb },
            terms,
        })
    }

    /// Splits by total z-degree; the parts sum back to `self`.
    pub fn z_homogeneous_parts(&self) -> BTreeMap<u32, SparsePoly> {
        let k = self.amb.k;
        let mut parts: BTreeMap<u32, Vec<(Monomial, FieldElement)>> = BTreeMap::new();
        for (m, c) in &self.terms {
            let d: u32 = m.0[k..].iter().sum();
            parts.entry(d).or_default().push((m.clone(), *c));
        }
        parts
            .into_iter()
            .map(|(d, terms)| (d, Self { amb: self.amb, terms }))
            .collect()
    }
}

/// Coefficient of `Π t_i^{target_i}` in `Π factors`, as a polynomial in `z`.
///
/// Partial products are pruned as they are formed: a monomial survives only if
/// its t-exponents have not overshot the target and can still reach it with
/// the t-degrees of the factors not yet multiplied in.
pub fn coeff_t_of_product(factors: &[SparsePoly], target: &[u32]) -> Result<SparsePoly> {
    let Some(first) = factors.first() else {
        return Err(Error::Parse("empty product".into()));
    };
    let amb = first.amb;
    let k = amb.k;
    if target.len() != k {
        return Err(Error::LengthMismatch {
            expected: k,
            got: target.len(),
        });
    }
    for fac in factors {
        first.same_ambient(fac)?;
    }
    let f = amb.field;
    // remaining[j][i]: t_i-degree still available from factors j..
    let mut remaining = vec![vec![0u32; k]; factors.len() + 1];
    for j in (0..factors.len()).rev() {
        for i in 0..k {
            let d = factors[j].degree_in(Var::T(i))?;
            remaining[j][i] = remaining[j + 1][i] + d;
        }
    }
    if (0..k).any(|i| remaining[0][i] < target[i]) {
        return Ok(SparsePoly::zero(amb.z_only()));
    }
    let mut acc: Vec<(Monomial, FieldElement)> = vec![(Monomial::one(amb.nvars()), 1)];
    for (j, fac) in factors.iter().enumerate() {
        let rest = &remaining[j + 1];
        let mut map: HashMap<Monomial, FieldElement> = HashMap::with_capacity(acc.len() * 2);
        for (ma, ca) in &acc {
            for (mb, cb) in &fac.terms {
                let ok = (0..k).all(|i| {
                    let e = ma.0[i] + mb.0[i];
                    e <= target[i] && e + rest[i] >= target[i]
                });
                if !ok {
                    continue;
                }
                let slot = map.entry(ma.times(mb)).or_insert(0);
                *slot = f.add(*slot, f.mul(*ca, *cb));
            }
        }
        acc = map.into_iter().filter(|(_, c)| *c != 0).collect();
        if acc.is_empty() {
            break;
        }
    }
    let mut terms: Vec<_> = acc
        .into_iter()
        .filter(|(m, _)| &m.0[..k] == target)
        .map(|(m, c)| (Monomial(m.0[k..].to_vec()), c))
        .collect();
    terms.sort_unstable_by(|a, b| a.0.cmp(&b.0));
    Ok(SparsePoly {
        amb: amb.z_only(),
        terms,
    })
}

/// Rows of Pascal's triangle mod p, built additively so no inverses are needed.
struct BinomialRows {
    field: PrimeField,
    rows: Vec<Vec<FieldElement>>,
}

impl BinomialRows {
    fn new(field: PrimeField) -> Self {
        Self {
            field,
            rows: vec![vec![1]],
        }
    }

    fn row(&mut self, e: u32) -> &[FieldElement] {
        while self.rows.len() <= e as usize {
            let prev = self.rows.last().expect("seeded");
            let mut next = Vec::with_capacity(prev.len() + 1);
            next.push(1);
            for w in prev.windows(2) {
                next.push(self.field.add(w[0], w[1]));
            }
            next.push(1);
            self.rows.push(next);
        }
        &self.rows[e as usize]
    }
}

impl Add for &SparsePoly {
    type Output = SparsePoly;
    fn add(self, rhs: &SparsePoly) -> SparsePoly {
        self.checked_add(rhs).expect("ambient mismatch in +")
    }
}

impl Sub for &SparsePoly {
    type Output = SparsePoly;
    fn sub(self, rhs: &SparsePoly) -> SparsePoly {
        self.checked_sub(rhs).expect("ambient mismatch in -")
    }
}

impl Mul for &SparsePoly {
    type Output = SparsePoly;
    fn mul(self, rhs: &SparsePoly) -> SparsePoly {
        self.checked_mul(rhs).expect("ambient mismatch in *")
    }
}

impl Neg for &SparsePoly {
    type Output = SparsePoly;
    fn neg(self) -> SparsePoly {
        self.neg_poly()
    }
}

impl fmt::Display for SparsePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let k = self.amb.k;
        for (idx, (m, c)) in self.terms.iter().enumerate() {
            if idx > 0 {
                write!(f, " + ")?;
            }
            let mut factors = Vec::new();
            for (v, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let name = if v < k {
                    format!("t{}", v + 1)
                } else {
                    format!("z{}", v - k + 1)
                };
                factors.push(if e == 1 { name } else { format!("{name}^{e}") });
            }
            match (factors.is_empty(), *c) {
                (true, c) => write!(f, "{c}")?,
                (false, 1) => write!(f, "{}", factors.join("*"))?,
                (false, c) => write!(f, "{c}*{}", factors.join("*"))?,
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    c: u64,
    t: Vec<u32>,
    z: Vec<u32>,
}

#[derive(Serialize, Deserialize)]
struct PolyJson {
    p: u64,
    k: usize,
    n: usize,
    terms: Vec<TermJson>,
}

impl Serialize for SparsePoly {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        let k = self.amb.k;
        PolyJson {
            p: self.amb.p(),
            k,
            n: self.amb.n,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| TermJson {
                    c: *c,
                    t: m.0[..k].to_vec(),
                    z: m.0[k..].to_vec(),
                })
                .collect(),
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for SparsePoly {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = PolyJson::deserialize(de)?;
        let amb = Ambient::new(raw.p, raw.k, raw.n).map_err(D::Error::custom)?;
        let mut terms = Vec::with_capacity(raw.terms.len());
        for t in raw.terms {
            if t.t.len() != raw.k || t.z.len() != raw.n {
                return Err(D::Error::custom("term exponent lengths do not match (k, n)"));
            }
            if t.c >= raw.p {
                return Err(D::Error::custom(format!("coefficient {} not reduced mod {}", t.c, raw.p)));
            }
            terms.push((Monomial::new(&t.t, &t.z), t.c));
        }
        SparsePoly::from_terms(amb, terms).map_err(D::Error::custom)
    }
}
