//! Master polynomials, weight-function products and their Taylor coefficients.
//!
//! The solution for `(p, κ, m, k, q, l)` is the vector of coefficients of
//! `Π t_i^{l_i p - 1}` in `Φ(t + q, z) W_J(t + q, z)`. Since the factor
//! `Π_{a<b} (z_a - z_b)^{M_ab}` of `Φ` does not involve `t`, solutions are kept
//! in factored form: that prefactor times a reduced vector computed without it.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ffpoly::{coeff_t_of_product, Ambient, SparsePoly};
use crate::field::{FieldElement, PrimeField};
use crate::sl2rep::{HighestWeights, MultiIndex, WeightVector};

/// A nonzero rational `num / den`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Kappa {
    pub num: i64,
    pub den: i64,
}

impl Kappa {
    pub fn new(num: i64, den: i64) -> Result<Self> {
        if num == 0 || den == 0 {
            return Err(Error::InvalidSpec(format!("κ = {num}/{den} must be a nonzero rational")));
        }
        Ok(Self { num, den })
    }
}

impl FromStr for Kappa {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parse = |x: &str| {
            x.trim()
                .parse::<i64>()
                .map_err(|_| Error::Parse(format!("bad κ '{s}', expected a/b")))
        };
        match s.split_once('/') {
            Some((a, b)) => Kappa::new(parse(a)?, parse(b)?),
            None => Kappa::new(parse(s)?, 1),
        }
    }
}

impl fmt::Display for Kappa {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

/// Input data of one construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProblemSpec {
    field: PrimeField,
    kappa: Kappa,
    weights: HighestWeights,
    q: Vec<FieldElement>,
    l: Vec<u32>,
}

impl ProblemSpec {
    /// `q` is reduced mod p; congruent shifts give identical solutions.
    pub fn new(p: u64, kappa: Kappa, m: Vec<u32>, k: u32, q: &[i64], l: &[u32]) -> Result<Self> {
        let field = PrimeField::new(p)?;
        if kappa.num.rem_euclid(p as i64) == 0 {
            return Err(Error::InvalidSpec(format!("p = {p} divides the numerator of κ = {kappa}")));
        }
        let weights = HighestWeights::new(m, k)?;
        if weights.k() == 0 {
            return Err(Error::InvalidSpec("k must be at least 1".into()));
        }
        for (what, len) in [("q", q.len()), ("l", l.len())] {
            if len != k as usize {
                return Err(Error::InvalidSpec(format!("{what} has length {len}, expected k = {k}")));
            }
        }
        if l.contains(&0) {
            return Err(Error::InvalidSpec("every l_i must be positive".into()));
        }
        Ok(Self {
            field,
            kappa,
            weights,
            q: q.iter().map(|&x| field.from_i64(x)).collect(),
            l: l.to_vec(),
        })
    }

    /// Same data with another `q` and `l`.
    pub fn with_cycle(&self, q: &[i64], l: &[u32]) -> Result<Self> {
        Self::new(
            self.p(),
            self.kappa,
            self.weights.m().to_vec(),
            self.weights.k(),
            q,
            l,
        )
    }

    pub fn p(&self) -> u64 {
        self.field.p()
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn kappa(&self) -> Kappa {
        self.kappa
    }

    pub fn weights(&self) -> &HighestWeights {
        &self.weights
    }

    pub fn m(&self) -> &[u32] {
        self.weights.m()
    }

    pub fn n(&self) -> usize {
        self.weights.n()
    }

    pub fn k(&self) -> usize {
        self.weights.k() as usize
    }

    pub fn q(&self) -> &[FieldElement] {
        &self.q
    }

    pub fn l(&self) -> &[u32] {
        &self.l
    }

    /// Ring of the solution coordinates: `F_p[z_1..z_n]`.
    pub fn z_ambient(&self) -> Ambient {
        Ambient::with_field(self.field, 0, self.n())
    }

    /// Ring of master polynomials: `F_p[t_1..t_k, z_1..z_n]`.
    pub fn tz_ambient(&self) -> Ambient {
        Ambient::with_field(self.field, self.k(), self.n())
    }

    /// The image of `c / κ` in F_p.
    fn over_kappa(&self, c: i64) -> FieldElement {
        self.field
            .ratio(c * self.kappa.den, self.kappa.num)
            .expect("p does not divide the numerator of κ")
    }
}

/// Positive integer exponents `M_s`, `M_ij` (pairs `i < j` in lexicographic order), `M0` and `K`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExponentData {
    pub ms: Vec<u64>,
    pub mij: Vec<u64>,
    pub m0: u64,
    pub kinv: u64,
}

/// Position of the pair `(i, j)`, `i < j < n`, in lexicographic pair order.
pub fn pair_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * (2 * n - i - 1) / 2 + (j - i - 1)
}

impl ExponentData {
    pub fn mij(&self, i: usize, j: usize) -> u64 {
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        self.mij[pair_index(self.ms.len(), a, b)]
    }

    /// `K` as a field element.
    pub fn k_elem(&self, field: PrimeField) -> FieldElement {
        field.reduce(self.kinv)
    }
}

fn residue_targets(spec: &ProblemSpec) -> ExponentData {
    let m = spec.m();
    let n = m.len();
    let mut mij = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            let c = spec.over_kappa(m[i] as i64 * m[j] as i64);
            mij.push(spec.field.mul(c, spec.field.inv(2).expect("p > 2")));
        }
    }
    ExponentData {
        ms: m.iter().map(|&x| spec.over_kappa(-(x as i64))).collect(),
        mij,
        m0: spec.over_kappa(2),
        kinv: spec.over_kappa(1),
    }
}

/// Least positive representatives of the exponent congruences (`p` for the zero class),
/// or `custom` after checking it against those congruences.
pub fn exponent_data(spec: &ProblemSpec, custom: Option<&ExponentData>) -> Result<ExponentData> {
    let target = residue_targets(spec);
    let p = spec.p();
    let Some(c) = custom else {
        let lift = |r: u64| if r == 0 { p } else { r };
        return Ok(ExponentData {
            ms: target.ms.iter().map(|&r| lift(r)).collect(),
            mij: target.mij.iter().map(|&r| lift(r)).collect(),
            m0: lift(target.m0),
            kinv: lift(target.kinv),
        });
    };
    if c.ms.len() != target.ms.len() {
        return Err(Error::BadExponents(format!("expected {} values of M_s", target.ms.len())));
    }
    if c.mij.len() != target.mij.len() {
        return Err(Error::BadExponents(format!("expected {} values of M_ij", target.mij.len())));
    }
    let groups = [
        ("M_s", &c.ms, &target.ms),
        ("M_ij", &c.mij, &target.mij),
        ("M0", &vec![c.m0], &vec![target.m0]),
        ("K", &vec![c.kinv], &vec![target.kinv]),
    ];
    for (name, got, want) in groups {
        for (idx, (&g, &w)) in got.iter().zip(want.iter()).enumerate() {
            if g == 0 {
                return Err(Error::BadExponents(format!("{name}[{idx}] must be positive")));
            }
            if g % p != w {
                return Err(Error::BadExponents(format!(
                    "{name}[{idx}] = {g} is not congruent to {w} mod {p}"
                )));
            }
        }
    }
    Ok(c.clone())
}

/// Record of everything needed to rebuild a solution.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub p: u64,
    pub kappa: String,
    pub m: Vec<u32>,
    pub k: u32,
    pub q: Vec<u64>,
    pub l: Vec<u32>,
    pub exponents: ExponentData,
}

impl Provenance {
    pub fn new(spec: &ProblemSpec, exps: &ExponentData) -> Self {
        Self {
            p: spec.p(),
            kappa: spec.kappa.to_string(),
            m: spec.m().to_vec(),
            k: spec.weights.k(),
            q: spec.q.clone(),
            l: spec.l.clone(),
            exponents: exps.clone(),
        }
    }

    /// Rebuilds the spec and re-validates the recorded exponents.
    pub fn spec(&self) -> Result<(ProblemSpec, ExponentData)> {
        let q: Vec<i64> = self.q.iter().map(|&x| x as i64).collect();
        let spec = ProblemSpec::new(self.p, self.kappa.parse()?, self.m.clone(), self.k, &q, &self.l)?;
        let exps = exponent_data(&spec, Some(&self.exponents))?;
        Ok((spec, exps))
    }
}

/// Distinct maps `σ: {0..k} → slots` with `|σ^{-1}(s)| = j_s`, in lexicographic order.
pub fn assignments(j: &MultiIndex) -> Vec<Vec<usize>> {
    fn rec(left: &mut Vec<u32>, cur: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for s in 0..left.len() {
            if left[s] > 0 {
                left[s] -= 1;
                cur.push(s);
                rec(left, cur, k, out);
                cur.pop();
                left[s] += 1;
            }
        }
    }
    let k = j.degree() as usize;
    let mut out = Vec::new();
    rec(&mut j.0.clone(), &mut Vec::with_capacity(k), k, &mut out);
    out
}

/// Where the z-block of the linear factors comes from.
#[derive(Clone, Copy)]
enum ZBlock<'a> {
    Symbolic,
    At(&'a [FieldElement]),
}

/// Factors `(t_i + q_i - t_j - q_j)^{M0}` and `(t_i + q_i - z_s)^{M_s - [σ(i) = s]}`.
fn t_factors(
    spec: &ProblemSpec,
    exps: &ExponentData,
    amb: Ambient,
    sigma: Option<&[usize]>,
    q: &[FieldElement],
    z: ZBlock<'_>,
) -> Result<Vec<SparsePoly>> {
    let f = spec.field;
    let k = spec.k();
    let mut out = Vec::new();
    for i in 0..k {
        for j in i + 1..k {
            let c = f.signed(f.sub(q[i], q[j]));
            out.push(SparsePoly::linear(amb, c, &[(i, 1), (j, -1)], &[])?.pow(exps.m0));
        }
    }
    for i in 0..k {
        for s in 0..spec.n() {
            let lowered = sigma.is_some_and(|sg| sg[i] == s);
            let e = exps.ms[s] - u64::from(lowered);
            if e == 0 {
                continue;
            }
            let qi = f.signed(q[i]);
            let lin = match z {
                ZBlock::Symbolic => SparsePoly::linear(amb, qi, &[(i, 1)], &[(s, -1)])?,
                ZBlock::At(x) => SparsePoly::linear(amb, qi - f.signed(x[s]), &[(i, 1)], &[])?,
            };
            out.push(lin.pow(e));
        }
    }
    Ok(out)
}

/// `Π_{a<b} (z_a - z_b)^{M_ab}`.
pub fn z_prefactor(spec: &ProblemSpec, exps: &ExponentData, amb: Ambient) -> Result<SparsePoly> {
    let mut acc = SparsePoly::one(amb);
    for a in 0..spec.n() {
        for b in a + 1..spec.n() {
            let lin = SparsePoly::linear(amb, 0, &[], &[(a, 1), (b, -1)])?;
            acc = &acc * &lin.pow(exps.mij(a, b));
        }
    }
    Ok(acc)
}

fn product(amb: Ambient, factors: &[SparsePoly]) -> SparsePoly {
    factors.iter().fold(SparsePoly::one(amb), |acc, f| &acc * f)
}

fn require_positive_ms(exps: &ExponentData) -> Result<()> {
    if exps.ms.contains(&0) {
        return Err(Error::Precondition("every M_s must be at least 1".into()));
    }
    Ok(())
}

fn require_index(spec: &ProblemSpec, j: &MultiIndex) -> Result<()> {
    if !spec.weights.basis().contains(j) {
        return Err(Error::BadMultiIndex(j.0.clone()));
    }
    Ok(())
}

/// The master polynomial `Φ` in `F_p[t, z]`.
pub fn master_polynomial(spec: &ProblemSpec, exps: &ExponentData) -> Result<SparsePoly> {
    let amb = spec.tz_ambient();
    let zero = vec![0; spec.k()];
    let ts = t_factors(spec, exps, amb, None, &zero, ZBlock::Symbolic)?;
    Ok(&product(amb, &ts) * &z_prefactor(spec, exps, amb)?)
}

/// `Φ · W_J` as a polynomial: the sum over assignments `σ` of `Φ` with each
/// `(t_i - z_{σ(i)})` exponent lowered by one.
pub fn master_times_weight(spec: &ProblemSpec, exps: &ExponentData, j: &MultiIndex) -> Result<SparsePoly> {
    require_positive_ms(exps)?;
    require_index(spec, j)?;
    let amb = spec.tz_ambient();
    let zero = vec![0; spec.k()];
    let mut acc = SparsePoly::zero(amb);
    for sigma in assignments(j) {
        let ts = t_factors(spec, exps, amb, Some(&sigma), &zero, ZBlock::Symbolic)?;
        acc = &acc + &product(amb, &ts);
    }
    Ok(&acc * &z_prefactor(spec, exps, amb)?)
}

/// `Φ · W_J` with `z = x` substituted, as a polynomial in `t` alone.
pub fn master_times_weight_at(
    spec: &ProblemSpec,
    exps: &ExponentData,
    j: &MultiIndex,
    x: &[FieldElement],
) -> Result<SparsePoly> {
    require_positive_ms(exps)?;
    require_index(spec, j)?;
    if x.len() != spec.n() {
        return Err(Error::LengthMismatch {
            expected: spec.n(),
            got: x.len(),
        });
    }
    let amb = Ambient::with_field(spec.field, spec.k(), 0);
    let zero = vec![0; spec.k()];
    let mut acc = SparsePoly::zero(amb);
    for sigma in assignments(j) {
        let ts = t_factors(spec, exps, amb, Some(&sigma), &zero, ZBlock::At(x))?;
        acc = &acc + &product(amb, &ts);
    }
    let pre = z_prefactor(spec, exps, spec.z_ambient())?.eval(&[], x)?;
    Ok(acc.scale(pre))
}

/// A weight vector written as `Π_{a<b} (z_a - z_b)^{e_ab}` times `reduced`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactoredSolution {
    /// Exponents `e_ab` in lexicographic pair order.
    pub prefactor: Vec<u64>,
    pub reduced: WeightVector,
}

impl FactoredSolution {
    pub fn prefactor_poly(&self) -> Result<SparsePoly> {
        let amb = self.reduced.ambient();
        let n = amb.n();
        let mut acc = SparsePoly::one(amb);
        for a in 0..n {
            for b in a + 1..n {
                let lin = SparsePoly::linear(amb, 0, &[], &[(a, 1), (b, -1)])?;
                acc = &acc * &lin.pow(self.prefactor[pair_index(n, a, b)]);
            }
        }
        Ok(acc)
    }

    pub fn expand(&self) -> Result<WeightVector> {
        self.reduced.mul_poly(&self.prefactor_poly()?)
    }

    /// Splits `reduced` by z-degree; the prefactor is homogeneous, so these are
    /// exactly the homogeneous components of the expanded vector.
    pub fn homogeneous_components(&self) -> Vec<FactoredSolution> {
        homogeneous_components(&self.reduced)
            .into_iter()
            .map(|reduced| FactoredSolution {
                prefactor: self.prefactor.clone(),
                reduced,
            })
            .collect()
    }
}

/// The Taylor-coefficient solution in factored form; `reduced` holds the
/// coefficients of `Π t_i^{l_i p - 1}` in `Φ(t + q, z) W_J(t + q, z) / Π (z_a - z_b)^{M_ab}`.
pub fn taylor_solution_factored(spec: &ProblemSpec, exps: &ExponentData) -> Result<FactoredSolution> {
    require_positive_ms(exps)?;
    let amb = spec.tz_ambient();
    let target: Vec<u32> = spec.l.iter().map(|&l| l * spec.p() as u32 - 1).collect();
    let basis = spec.weights.basis();
    let coords: Vec<(MultiIndex, SparsePoly)> = basis
        .into_par_iter()
        .map(|j| {
            let mut acc = SparsePoly::zero(spec.z_ambient());
            for sigma in assignments(&j) {
                let ts = t_factors(spec, exps, amb, Some(&sigma), &spec.q, ZBlock::Symbolic)?;
                acc = &acc + &coeff_t_of_product(&ts, &target)?;
            }
            Ok((j, acc))
        })
        .collect::<Result<_>>()?;
    let reduced = WeightVector::from_coords(spec.weights.clone(), spec.z_ambient(), coords)?;
    Ok(FactoredSolution {
        prefactor: exps.mij.clone(),
        reduced,
    })
}

/// `I^{(l_1 p - 1, .., l_k p - 1)}(z, q)` fully expanded.
pub fn taylor_solution(spec: &ProblemSpec, exps: &ExponentData) -> Result<WeightVector> {
    taylor_solution_factored(spec, exps)?.expand()
}

/// Components of `w` of each total z-degree, in increasing degree; zero components are omitted.
pub fn homogeneous_components(w: &WeightVector) -> Vec<WeightVector> {
    let mut degrees = std::collections::BTreeSet::new();
    for (_, poly) in w.nonzero() {
        degrees.extend(poly.z_homogeneous_parts().into_keys());
    }
    degrees
        .into_iter()
        .map(|d| {
            w.map_coords(|poly| {
                poly.z_homogeneous_parts()
                    .remove(&d)
                    .unwrap_or_else(|| SparsePoly::zero(poly.ambient()))
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(p: u64, kappa: &str, m: &[u32], k: u32, q: &[i64], l: &[u32]) -> ProblemSpec {
        ProblemSpec::new(p, kappa.parse().unwrap(), m.to_vec(), k, q, l).unwrap()
    }

    fn mi(v: &[u32]) -> MultiIndex {
        MultiIndex(v.to_vec())
    }

    #[test]
    fn weight_product_uses_no_inverses() {
        let s = spec(5, "6", &[1, 2, 1], 2, &[1, 3], &[1, 1]);
        let e = exponent_data(&s, None).unwrap();
        let before = crate::field::tests::inversions();
        for j in s.weights().basis() {
            assert!(!master_times_weight(&s, &e, &j).unwrap().is_zero());
        }
        assert_eq!(crate::field::tests::inversions(), before);
    }

    #[test]
    fn kappa_parsing() {
        assert_eq!("4/1".parse::<Kappa>().unwrap(), Kappa { num: 4, den: 1 });
        assert_eq!("-3".parse::<Kappa>().unwrap(), Kappa { num: -3, den: 1 });
        assert!("0/2".parse::<Kappa>().is_err());
        assert!("x".parse::<Kappa>().is_err());
    }

    #[test]
    fn spec_validation() {
        assert!(ProblemSpec::new(3, Kappa::new(3, 1).unwrap(), vec![1, 1], 1, &[0], &[1]).is_err());
        assert!(ProblemSpec::new(5, Kappa::new(3, 1).unwrap(), vec![1, 1], 1, &[0, 0], &[1]).is_err());
        assert!(ProblemSpec::new(5, Kappa::new(3, 1).unwrap(), vec![1, 1], 1, &[0], &[0]).is_err());
        let s = spec(5, "3/1", &[1, 1], 1, &[-1], &[1]);
        assert_eq!(s.q(), &[4]);
    }

    #[test]
    fn exponent_examples() {
        let e = exponent_data(&spec(3, "4", &[1; 5], 2, &[0, 0], &[1, 1]), None).unwrap();
        assert_eq!(e.ms, vec![2; 5]);
        assert_eq!(e.mij, vec![2; 10]);
        assert_eq!(e.m0, 2);

        let e = exponent_data(&spec(3, "2", &[1, 1, 1], 1, &[0], &[1]), None).unwrap();
        assert_eq!((e.ms.clone(), e.mij.clone()), (vec![1; 3], vec![1; 3]));

        let e = exponent_data(&spec(3, "4", &[2, 2], 2, &[0, 0], &[1, 1]), None).unwrap();
        assert_eq!((e.ms.clone(), e.mij.clone(), e.m0), (vec![1, 1], vec![2], 2));
    }

    #[test]
    fn zero_class_lifts_to_p() {
        // m_1 m_2 / (2κ) = 3/2 ≡ 0 mod 3
        let e = exponent_data(&spec(3, "1", &[1, 3], 1, &[0], &[1]), None).unwrap();
        assert_eq!(e.mij, vec![3]);
    }

    #[test]
    fn exponent_override() {
        let s = spec(5, "2", &[1, 1, 1], 1, &[0], &[1]);
        let mut e = exponent_data(&s, None).unwrap();
        // M_ab ≡ 1/4 ≡ 4 mod 5; 9 = (p+1)^2/4 is another representative
        e.mij = vec![9; 3];
        assert_eq!(exponent_data(&s, Some(&e)).unwrap().mij, vec![9; 3]);
        e.mij[1] = 8;
        assert!(matches!(exponent_data(&s, Some(&e)), Err(Error::BadExponents(_))));
        e.mij[1] = 9;
        e.m0 = 0;
        assert!(exponent_data(&s, Some(&e)).is_err());
    }

    #[test]
    fn pair_indices_are_lexicographic() {
        let mut seen = vec![];
        for i in 0..5 {
            for j in i + 1..5 {
                seen.push(pair_index(5, i, j));
            }
        }
        assert_eq!(seen, (0..10).collect::<Vec<_>>());
    }

    #[test]
    fn assignment_counts() {
        assert_eq!(assignments(&mi(&[1, 1])), vec![vec![0, 1], vec![1, 0]]);
        assert_eq!(assignments(&mi(&[2, 0])), vec![vec![0, 0]]);
        assert_eq!(assignments(&mi(&[2, 1, 1])).len(), 12);
    }

    #[test]
    fn master_polynomial_small() {
        let s = spec(3, "2", &[1, 1, 1], 1, &[0], &[1]);
        let e = exponent_data(&s, None).unwrap();
        let phi = master_polynomial(&s, &e).unwrap();
        let amb = s.tz_ambient();
        let mut expect = SparsePoly::one(amb);
        for (a, b) in [(0, 1), (0, 2), (1, 2)] {
            expect = &expect * &SparsePoly::linear(amb, 0, &[], &[(a, 1), (b, -1)]).unwrap();
        }
        for s in 0..3 {
            expect = &expect * &SparsePoly::linear(amb, 0, &[(0, 1)], &[(s, -1)]).unwrap();
        }
        assert_eq!(phi, expect);
        assert_eq!(phi.degree_in(crate::ffpoly::Var::T(0)).unwrap(), 3);
    }

    #[test]
    fn weight_product_for_two_twos() {
        let s = spec(3, "4", &[2, 2], 2, &[0, 0], &[1, 1]);
        let e = exponent_data(&s, None).unwrap();
        let amb = s.tz_ambient();
        let lin = |c: &[(usize, i64)], z: &[(usize, i64)]| SparsePoly::linear(amb, 0, c, z).unwrap();
        let pre = &lin(&[], &[(0, 1), (1, -1)]).pow(2) * &lin(&[(0, 1), (1, -1)], &[]).pow(2);
        let bracket = &(&lin(&[(0, 1)], &[(1, -1)]) * &lin(&[(1, 1)], &[(0, -1)]))
            + &(&lin(&[(0, 1)], &[(0, -1)]) * &lin(&[(1, 1)], &[(1, -1)]));
        assert_eq!(master_times_weight(&s, &e, &mi(&[1, 1])).unwrap(), &pre * &bracket);
        assert!(master_times_weight(&s, &e, &mi(&[2, 1])).is_err());
    }

    #[test]
    fn two_twos_at_three() {
        let s = spec(3, "4", &[2, 2], 2, &[0, 0], &[1, 1]);
        let e = exponent_data(&s, None).unwrap();
        let w = taylor_solution(&s, &e).unwrap();
        let amb = s.z_ambient();
        let d2 = SparsePoly::linear(amb, 0, &[], &[(0, 1), (1, -1)]).unwrap().pow(2);
        assert_eq!(w.coord(&mi(&[2, 0])), d2);
        assert_eq!(w.coord(&mi(&[1, 1])), -&d2);
        assert_eq!(w.coord(&mi(&[0, 2])), d2);
    }

    #[test]
    fn vandermonde_at_three() {
        let s = spec(3, "2", &[1, 1, 1], 1, &[0], &[1]);
        let e = exponent_data(&s, None).unwrap();
        let w = taylor_solution(&s, &e).unwrap();
        let pre = z_prefactor(&s, &e, s.z_ambient()).unwrap();
        for j in s.weights().basis() {
            assert_eq!(w.coord(&j), pre);
        }
    }

    #[test]
    fn taylor_matches_literal_expansion() {
        // Shift by q, expand completely, read off the coefficient: the slow definition.
        let s = spec(5, "3", &[1, 2, 1], 2, &[1, 3], &[1, 2]);
        let e = exponent_data(&s, None).unwrap();
        let fast = taylor_solution(&s, &e).unwrap();
        let target: Vec<u32> = s.l().iter().map(|&l| l * 5 - 1).collect();
        for j in s.weights().basis() {
            let full = master_times_weight(&s, &e, &j).unwrap();
            let slow = full.shift_t(s.q()).unwrap().coeff_t(&target).unwrap();
            assert_eq!(fast.coord(&j), slow, "J = {j:?}");
        }
    }

    #[test]
    fn weight_product_at_point_matches_substitution() {
        let s = spec(7, "4", &[2, 2], 2, &[0, 0], &[1, 1]);
        let e = exponent_data(&s, None).unwrap();
        let j = mi(&[1, 1]);
        let sym = master_times_weight(&s, &e, &j).unwrap();
        let at = master_times_weight_at(&s, &e, &j, &[2, 5]).unwrap();
        assert_eq!(sym.eval_z(&[2, 5]).unwrap(), at);
    }

    #[test]
    fn components_sum_back() {
        // A shift by q only moves solutions once their z-degree reaches p.
        let s = spec(3, "2", &[1; 8], 1, &[1], &[1]);
        let e = exponent_data(&s, None).unwrap();
        let w = taylor_solution_factored(&s, &e).unwrap().reduced;
        let parts = homogeneous_components(&w);
        assert!(parts.len() > 1);
        let sum = parts.iter().skip(1).fold(parts[0].clone(), |acc, c| acc.checked_add(c).unwrap());
        assert_eq!(sum, w);
        assert!(homogeneous_components(&WeightVector::zero(w.weights().clone(), w.ambient()).unwrap()).is_empty());
    }

    #[test]
    fn provenance_round_trip() {
        let s = spec(7, "4/3", &[2, 1], 2, &[1, 2], &[1, 1]);
        let e = exponent_data(&s, None).unwrap();
        let prov = Provenance::new(&s, &e);
        let json = serde_json::to_string(&prov).unwrap();
        let back: Provenance = serde_json::from_str(&json).unwrap();
        assert_eq!(back.spec().unwrap(), (s, e));
    }
}
