//! Weight spaces of tensor products of irreducible sl2-modules over F_p.
//!
//! `L_m` has basis `v, f v, .., f^m v`. A basis vector of `L_{m_1} ⊗ .. ⊗ L_{m_n}`
//! is labelled by a [`MultiIndex`] `J = (j_1, .., j_n)` with `j_s <= m_s`; the
//! weight subspace of weight `|m| - 2k` is spanned by the `J` with `|J| = k`.
//! A [`WeightVector`] attaches a polynomial coefficient to each such label.
//!
//! All slot indices in this module are 0-based.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::ffpoly::{Ambient, SparsePoly, Var};
use crate::field::{FieldElement, PrimeField};

/// Highest weights `m = (m_1, .., m_n)` together with the lowering count `k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HighestWeights {
    m: Vec<u32>,
    k: u32,
}

impl HighestWeights {
    pub fn new(m: Vec<u32>, k: u32) -> Result<Self> {
        if m.is_empty() {
            return Err(Error::InvalidSpec("need at least one tensor factor".into()));
        }
        // Degenerate factors L_0 are not supported.
        if m.contains(&0) {
            return Err(Error::InvalidSpec(format!("highest weights must be >= 1, got {m:?}")));
        }
        let total: u32 = m.iter().sum();
        if k > total {
            return Err(Error::InvalidSpec(format!("k = {k} exceeds |m| = {total}")));
        }
        Ok(Self { m, k })
    }

    pub fn m(&self) -> &[u32] {
        &self.m
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn n(&self) -> usize {
        self.m.len()
    }

    pub fn total(&self) -> u32 {
        self.m.iter().sum()
    }

    pub fn with_k(&self, k: u32) -> Result<Self> {
        Self::new(self.m.clone(), k)
    }

    pub fn basis(&self) -> Vec<MultiIndex> {
        basis(&self.m, self.k as i64)
    }

    /// h-eigenvalue `|m| - 2k` of the weight space.
    pub fn weight(&self) -> i64 {
        self.total() as i64 - 2 * self.k as i64
    }
}

/// A label `J` of the basis vector `f^{j_1} v ⊗ .. ⊗ f^{j_n} v`.
///
/// Ordered so that iteration runs in basis order: descending lexicographic,
/// e.g. `(2,0), (1,1), (0,2)` and, for `k = 1`, slot order `(1,0,0), (0,1,0), ..`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiIndex(pub Vec<u32>);

impl MultiIndex {
    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    fn bumped(&self, s: usize, up: bool) -> MultiIndex {
        let mut v = self.0.clone();
        if up {
            v[s] += 1;
        } else {
            v[s] -= 1;
        }
        MultiIndex(v)
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.cmp(&self.0)
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// All `J` with `|J| = k` and `j_s <= m_s`, in basis order. Empty when `k` is out of range.
pub fn basis(m: &[u32], k: i64) -> Vec<MultiIndex> {
    fn rec(m: &[u32], left: u32, cur: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
        let s = cur.len();
        if s == m.len() {
            if left == 0 {
                out.push(MultiIndex(cur.clone()));
            }
            return;
        }
        let cap_rest: u32 = m[s + 1..].iter().sum();
        for j in (0..=m[s].min(left)).rev() {
            if left - j > cap_rest {
                continue;
            }
            cur.push(j);
            rec(m, left - j, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k < 0 || k > m.iter().map(|&x| x as i64).sum::<i64>() {
        return out;
    }
    rec(m, k as u32, &mut Vec::with_capacity(m.len()), &mut out);
    out
}

// Single-slot actions on f^j v in L_{m}.

fn e_coeff(m: u32, j: u32) -> i64 {
    // e f^j v = j (m - j + 1) f^{j-1} v
    j as i64 * (m as i64 - j as i64 + 1)
}

fn h_coeff(m: u32, j: u32) -> i64 {
    m as i64 - 2 * j as i64
}

/// `e . f_J v` as a list of `(J', integer coefficient)`.
pub fn e_on_basis(m: &[u32], j: &MultiIndex) -> Vec<(MultiIndex, i64)> {
    (0..m.len())
        .filter(|&s| j.0[s] > 0)
        .map(|s| (j.bumped(s, false), e_coeff(m[s], j.0[s])))
        .collect()
}

/// `f . f_J v`; terms past the bottom of a factor are dropped.
pub fn f_on_basis(m: &[u32], j: &MultiIndex) -> Vec<(MultiIndex, i64)> {
    (0..m.len())
        .filter(|&s| j.0[s] < m[s])
        .map(|s| (j.bumped(s, true), 1))
        .collect()
}

/// `Ω^{(a,b)} . f_J v` with `Ω = e⊗f + f⊗e + ½ h⊗h` in slots `a`, `b`.
pub fn casimir_on_basis(
    field: PrimeField,
    m: &[u32],
    a: usize,
    b: usize,
    j: &MultiIndex,
) -> Vec<(MultiIndex, FieldElement)> {
    assert!(a != b && a < m.len() && b < m.len(), "bad slot pair ({a}, {b})");
    let half = field.inv(2).expect("p > 2");
    let mut out = Vec::with_capacity(3);
    let (ja, jb) = (j.0[a], j.0[b]);
    // e in slot a, f in slot b
    if ja > 0 && jb < m[b] {
        let c = field.from_i64(e_coeff(m[a], ja));
        out.push((j.bumped(a, false).bumped(b, true), c));
    }
    // f in slot a, e in slot b
    if jb > 0 && ja < m[a] {
        let c = field.from_i64(e_coeff(m[b], jb));
        out.push((j.bumped(a, true).bumped(b, false), c));
    }
    let hh = field.from_i64(h_coeff(m[a], ja) * h_coeff(m[b], jb));
    out.push((j.clone(), field.mul(hh, half)));
    out.retain(|(_, c)| *c != 0);
    out
}

/// `Σ_J I_J(z) f_J v` in the weight space `(m, k)`, coefficients in a common ring.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightVector {
    weights: HighestWeights,
    amb: Ambient,
    coords: BTreeMap<MultiIndex, SparsePoly>,
}

impl WeightVector {
    pub fn zero(weights: HighestWeights, amb: Ambient) -> Result<Self> {
        if amb.n() != weights.n() {
            return Err(Error::AmbientMismatch(
                amb.to_string(),
                format!("{} tensor factors", weights.n()),
            ));
        }
        Ok(Self {
            weights,
            amb,
            coords: BTreeMap::new(),
        })
    }

    pub fn from_coords<I>(weights: HighestWeights, amb: Ambient, coords: I) -> Result<Self>
    where
        I: IntoIterator<Item = (MultiIndex, SparsePoly)>,
    {
        let mut w = Self::zero(weights, amb)?;
        for (j, poly) in coords {
            w.add_to(j, &poly)?;
        }
        Ok(w)
    }

    fn validate_index(&self, j: &MultiIndex) -> Result<()> {
        let ok = j.0.len() == self.weights.n()
            && j.degree() == self.weights.k
            && j.0.iter().zip(&self.weights.m).all(|(a, b)| a <= b);
        if ok {
            Ok(())
        } else {
            Err(Error::BadMultiIndex(j.0.clone()))
        }
    }

    /// Adds `poly` to coordinate `J`.
    pub fn add_to(&mut self, j: MultiIndex, poly: &SparsePoly) -> Result<()> {
        self.validate_index(&j)?;
        if poly.ambient() != self.amb {
            return Err(Error::AmbientMismatch(poly.ambient().to_string(), self.amb.to_string()));
        }
        let sum = match self.coords.get(&j) {
            Some(old) => old + poly,
            None => poly.clone(),
        };
        if sum.is_zero() {
            self.coords.remove(&j);
        } else {
            self.coords.insert(j, sum);
        }
        Ok(())
    }

    pub fn weights(&self) -> &HighestWeights {
        &self.weights
    }

    pub fn ambient(&self) -> Ambient {
        self.amb
    }

    pub fn field(&self) -> PrimeField {
        self.amb.field()
    }

    pub fn is_zero(&self) -> bool {
        self.coords.is_empty()
    }

    /// Coordinate `I_J`; zero when `J` carries no term.
    pub fn coord(&self, j: &MultiIndex) -> SparsePoly {
        self.coords
            .get(j)
            .cloned()
            .unwrap_or_else(|| SparsePoly::zero(self.amb))
    }

    /// Nonzero coordinates in basis order.
    pub fn nonzero(&self) -> impl Iterator<Item = (&MultiIndex, &SparsePoly)> {
        self.coords.iter()
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        if self.weights != other.weights || self.amb != other.amb {
            return Err(Error::AmbientMismatch(
                format!("{:?} over {}", self.weights, self.amb),
                format!("{:?} over {}", other.weights, other.amb),
            ));
        }
        let mut out = self.clone();
        for (j, poly) in &other.coords {
            out.add_to(j.clone(), poly)?;
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.checked_add(&other.scale(self.field().neg(1)))
    }

    pub fn scale(&self, c: FieldElement) -> Self {
        self.map_coords(|poly| poly.scale(c))
    }

    /// Multiplies every coordinate by the same polynomial.
    pub fn mul_poly(&self, g: &SparsePoly) -> Result<Self> {
        if g.ambient() != self.amb {
            return Err(Error::AmbientMismatch(g.ambient().to_string(), self.amb.to_string()));
        }
        Ok(self.map_coords(|poly| poly * g))
    }

    pub fn map_coords(&self, mut f: impl FnMut(&SparsePoly) -> SparsePoly) -> Self {
        let coords = self
            .coords
            .iter()
            .map(|(j, poly)| (j.clone(), f(poly)))
            .filter(|(_, poly)| !poly.is_zero())
            .collect();
        Self {
            weights: self.weights.clone(),
            amb: self.amb,
            coords,
        }
    }

    fn image<F>(&self, target_k: u32, on_basis: F) -> Result<Self>
    where
        F: Fn(&MultiIndex) -> Vec<(MultiIndex, FieldElement)>,
    {
        let mut out = Self::zero(self.weights.with_k(target_k)?, self.amb)?;
        for (j, poly) in &self.coords {
            for (j2, c) in on_basis(j) {
                out.add_to(j2, &poly.scale(c))?;
            }
        }
        Ok(out)
    }

    /// Diagonal action of `e`; lands in the weight space with `k - 1`.
    pub fn act_e(&self) -> Result<Self> {
        if self.weights.k == 0 {
            return Err(Error::Precondition("e lowers k; the input already has k = 0".into()));
        }
        let f = self.field();
        let m = self.weights.m.clone();
        self.image(self.weights.k - 1, |j| {
            e_on_basis(&m, j).into_iter().map(|(j2, c)| (j2, f.from_i64(c))).collect()
        })
    }

    /// Diagonal action of `f`; lands in the weight space with `k + 1`.
    pub fn act_f(&self) -> Result<Self> {
        if self.weights.k >= self.weights.total() {
            return Err(Error::Precondition("f raises k past |m|".into()));
        }
        let f = self.field();
        let m = self.weights.m.clone();
        self.image(self.weights.k + 1, |j| {
            f_on_basis(&m, j).into_iter().map(|(j2, c)| (j2, f.from_i64(c))).collect()
        })
    }

    pub fn act_h(&self) -> Self {
        self.scale(self.field().from_i64(self.weights.weight()))
    }

    /// `Ω^{(a,b)}` acting in slots `a != b` (order irrelevant, Ω is symmetric).
    pub fn casimir(&self, a: usize, b: usize) -> Result<Self> {
        let n = self.weights.n();
        if a == b || a >= n || b >= n {
            return Err(Error::Precondition(format!("slot pair ({a}, {b}) invalid for n = {n}")));
        }
        let f = self.field();
        let m = self.weights.m.clone();
        self.image(self.weights.k, |j| casimir_on_basis(f, &m, a, b, j))
    }

    /// `Σ_s z_s e^{(s)}`: lowers `k` by one and raises the z-degree by one.
    pub fn ze_apply(&self) -> Result<Self> {
        if self.weights.k == 0 {
            return Err(Error::Precondition("ze lowers k; the input already has k = 0".into()));
        }
        let f = self.field();
        let mut out = Self::zero(self.weights.with_k(self.weights.k - 1)?, self.amb)?;
        let zs: Vec<SparsePoly> = (0..self.weights.n())
            .map(|s| SparsePoly::var(self.amb, Var::Z(s)))
            .collect::<Result<_>>()?;
        for (j, poly) in &self.coords {
            let shifted: Vec<_> = (0..self.weights.n()).collect();
            for s in shifted.into_iter().filter(|&s| j.0[s] > 0) {
                let c = f.from_i64(e_coeff(self.weights.m[s], j.0[s]));
                out.add_to(j.bumped(s, false), &(&zs[s] * poly).scale(c))?;
            }
        }
        Ok(out)
    }

    /// `(ze)^ℓ`; once `k` reaches zero any further application gives zero.
    pub fn ze_power(&self, ell: u32) -> Result<Option<Self>> {
        let mut cur = self.clone();
        for _ in 0..ell {
            if cur.weights.k == 0 {
                return Ok(None);
            }
            cur = cur.ze_apply()?;
        }
        Ok(Some(cur))
    }
}

/// Membership in the conformal-block subspace: `e w = 0` and `(ze)^ℓ w = 0`.
pub fn conformal_block_test(w: &WeightVector, ell: u32) -> Result<bool> {
    if ell == 0 {
        return Err(Error::Precondition("ℓ must be positive".into()));
    }
    if w.weights().k() > 0 && !w.act_e()?.is_zero() {
        return Ok(false);
    }
    Ok(match w.ze_power(ell)? {
        None => true,
        Some(img) => img.is_zero(),
    })
}

#[derive(Serialize, Deserialize)]
struct CoordJson {
    #[serde(rename = "J")]
    j: Vec<u32>,
    poly: SparsePoly,
}

#[derive(Serialize, Deserialize)]
struct WeightVectorJson {
    m: Vec<u32>,
    k: u32,
    coords: Vec<CoordJson>,
}

impl Serialize for WeightVector {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        WeightVectorJson {
            m: self.weights.m.clone(),
            k: self.weights.k,
            coords: self
                .weights
                .basis()
                .into_iter()
                .map(|j| CoordJson {
                    poly: self.coord(&j),
                    j: j.0,
                })
                .collect(),
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for WeightVector {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = WeightVectorJson::deserialize(de)?;
        let weights = HighestWeights::new(raw.m, raw.k).map_err(D::Error::custom)?;
        let amb = raw
            .coords
            .first()
            .map(|c| c.poly.ambient())
            .ok_or_else(|| D::Error::custom("weight vector without coordinates"))?;
        WeightVector::from_coords(weights, amb, raw.coords.into_iter().map(|c| (MultiIndex(c.j), c.poly)))
            .map_err(D::Error::custom)
    }
}

/// A dense matrix over F_p, used for operators at a fixed point `z`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FpMatrix {
    field: PrimeField,
    rows: usize,
    cols: usize,
    data: Vec<FieldElement>,
}

impl FpMatrix {
    pub fn zeros(field: PrimeField, rows: usize, cols: usize) -> Self {
        Self {
            field,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> FieldElement {
        self.data[r * self.cols + c]
    }

    fn add_at(&mut self, r: usize, c: usize, v: FieldElement) {
        let slot = &mut self.data[r * self.cols + c];
        *slot = self.field.add(*slot, v);
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "shape mismatch");
        let f = self.field;
        let mut out = Self::zeros(f, self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a == 0 {
                    continue;
                }
                for c in 0..other.cols {
                    out.add_at(r, c, f.mul(a, other.get(k, c)));
                }
            }
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch");
        let f = self.field;
        Self {
            field: f,
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| f.sub(*a, *b)).collect(),
        }
    }

    pub fn scale(&self, c: FieldElement) -> Self {
        let f = self.field;
        Self {
            data: self.data.iter().map(|&x| f.mul(x, c)).collect(),
            ..self.clone()
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.sub(&other.scale(self.field.neg(1)))
    }

    pub fn commutator(&self, other: &Self) -> Self {
        self.mul(other).sub(&other.mul(self))
    }

    /// Matrix of a basis-level operator from weight space `k_from` to `k_to`.
    fn from_action<F>(field: PrimeField, m: &[u32], k_from: i64, k_to: i64, action: F) -> Self
    where
        F: Fn(&MultiIndex) -> Vec<(MultiIndex, FieldElement)>,
    {
        let src = basis(m, k_from);
        let dst = basis(m, k_to);
        let pos: BTreeMap<&MultiIndex, usize> = dst.iter().enumerate().map(|(i, j)| (j, i)).collect();
        let mut out = Self::zeros(field, dst.len(), src.len());
        for (c, j) in src.iter().enumerate() {
            for (j2, v) in action(j) {
                if let Some(&r) = pos.get(&j2) {
                    out.add_at(r, c, v);
                }
            }
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Generator {
    E,
    F,
    H,
}

/// Diagonal action `x ⊗ 1 ⊗ .. + .. + 1 ⊗ .. ⊗ x` from weight space `k` to its image.
pub fn diagonal_matrix(field: PrimeField, m: &[u32], k: i64, x: Generator) -> FpMatrix {
    match x {
        Generator::E => FpMatrix::from_action(field, m, k, k - 1, |j| {
            e_on_basis(m, j).into_iter().map(|(j2, c)| (j2, field.from_i64(c))).collect()
        }),
        Generator::F => FpMatrix::from_action(field, m, k, k + 1, |j| {
            f_on_basis(m, j).into_iter().map(|(j2, c)| (j2, field.from_i64(c))).collect()
        }),
        Generator::H => {
            let w: i64 = m.iter().map(|&x| x as i64).sum::<i64>() - 2 * k;
            FpMatrix::from_action(field, m, k, k, |j| vec![(j.clone(), field.from_i64(w))])
        }
    }
}

pub fn casimir_matrix(field: PrimeField, m: &[u32], k: i64, a: usize, b: usize) -> FpMatrix {
    FpMatrix::from_action(field, m, k, k, |j| casimir_on_basis(field, m, a, b, j))
}

pub(crate) fn check_distinct(field: PrimeField, z: &[FieldElement]) -> Result<Vec<FieldElement>> {
    let z: Vec<_> = z.iter().map(|&x| field.reduce(x)).collect();
    let mut sorted = z.clone();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != z.len() {
        return Err(Error::CoincidentPoints(z));
    }
    Ok(z)
}

/// Gaudin Hamiltonian `H_i(z) = Σ_{j≠i} Ω^{(i,j)} / (z_i - z_j)` on weight space `k`.
pub fn gaudin_matrix(field: PrimeField, m: &[u32], k: i64, i: usize, z: &[FieldElement]) -> Result<FpMatrix> {
    if z.len() != m.len() {
        return Err(Error::LengthMismatch {
            expected: m.len(),
            got: z.len(),
        });
    }
    if i >= m.len() {
        return Err(Error::Precondition(format!("slot {i} out of range")));
    }
    let z = check_distinct(field, z)?;
    let dim = basis(m, k).len();
    let mut out = FpMatrix::zeros(field, dim, dim);
    for j in (0..m.len()).filter(|&j| j != i) {
        let inv = field.inv(field.sub(z[i], z[j])).expect("distinct");
        out = out.add(&casimir_matrix(field, m, k, i, j).scale(inv));
    }
    Ok(out)
}
