//! Point sums on superelliptic curves and on a skew double cover of the plane.
//!
//! For a rational function `h` the integral over a curve is the sum of `h(P)`
//! over the affine points where `h` is defined. The functions used here vanish
//! at the points at infinity, so those are never enumerated.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::construct::{exponent_data, taylor_solution_factored, Kappa, ProblemSpec};
use crate::error::{Error, Result};
use crate::field::{FieldElement, PrimeField};
use crate::sl2rep::{check_distinct, MultiIndex, WeightVector};
use crate::verify::{CheckReport, Witness};

/// `y^d = Π_s (t - x_s)^{e_s}` over F_p.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurveSpec {
    field: PrimeField,
    d: u32,
    x: Vec<FieldElement>,
    e: Vec<u32>,
}

impl CurveSpec {
    pub fn new(p: u64, d: u32, x: &[FieldElement], e: &[u32]) -> Result<Self> {
        let field = PrimeField::new(p)?;
        if x.is_empty() {
            return Err(Error::InvalidSpec("a curve needs at least one branch point".into()));
        }
        if x.len() != e.len() {
            return Err(Error::LengthMismatch {
                expected: x.len(),
                got: e.len(),
            });
        }
        if d < 2 || e.contains(&0) {
            return Err(Error::InvalidSpec("need d ≥ 2 and multiplicities ≥ 1".into()));
        }
        let x = check_distinct(field, x)?;
        Ok(Self {
            field,
            d,
            x,
            e: e.to_vec(),
        })
    }

    pub fn branch_points(&self) -> &[FieldElement] {
        &self.x
    }

    fn rhs(&self, t: FieldElement) -> FieldElement {
        let f = self.field;
        self.x
            .iter()
            .zip(&self.e)
            .fold(1, |acc, (&xs, &es)| f.mul(acc, f.pow(f.sub(t, xs), es as u64)))
    }

    /// All affine solutions `(t, y)`, ordered by `t` then `y`.
    pub fn affine_points(&self) -> Vec<(FieldElement, FieldElement)> {
        let f = self.field;
        let mut out = Vec::new();
        for t in 0..f.p() {
            let v = self.rhs(t);
            for y in 0..f.p() {
                if f.pow(y, self.d as u64) == v {
                    out.push((t, y));
                }
            }
        }
        out
    }
}

/// `Σ' 1/(t - x_j)` over the affine points of the curve with `t ≠ x_j` (`j` is 0-based).
pub fn curve_integral(c: &CurveSpec, j: usize) -> Result<FieldElement> {
    let f = c.field;
    let xj = *c
        .x
        .get(j)
        .ok_or_else(|| Error::Precondition(format!("no branch point with index {}", j + 1)))?;
    Ok(c.affine_points()
        .into_iter()
        .filter(|&(t, _)| t != xj)
        .fold(0, |acc, (t, _)| f.add(acc, f.inv(f.sub(t, xj)).expect("t ≠ x_j"))))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CurveKind {
    /// `y^2 = (t - x_1)(t - x_2)(t - x_3)`
    Elliptic,
    /// `y^2 = (t - x_1)(t - x_2)(t - x_3)(t - x_4)`
    Quartic,
    /// `y^3 = (t - x_1)(t - x_2)(t - x_3)`
    Cubic3,
    /// `y^3 = (t - x_1)(t - x_2)(t - x_3)^2`
    Genus2,
}

impl CurveKind {
    pub const ALL: [CurveKind; 4] = [CurveKind::Elliptic, CurveKind::Quartic, CurveKind::Cubic3, CurveKind::Genus2];

    pub fn name(self) -> &'static str {
        match self {
            CurveKind::Elliptic => "elliptic",
            CurveKind::Quartic => "quartic",
            CurveKind::Cubic3 => "cubic3",
            CurveKind::Genus2 => "genus2",
        }
    }

    pub fn n(self) -> usize {
        if self == CurveKind::Quartic {
            4
        } else {
            3
        }
    }

    fn curve(self, p: u64, x: &[FieldElement]) -> Result<CurveSpec> {
        match self {
            CurveKind::Elliptic => CurveSpec::new(p, 2, x, &[1, 1, 1]),
            CurveKind::Quartic => CurveSpec::new(p, 2, x, &[1, 1, 1, 1]),
            CurveKind::Cubic3 => CurveSpec::new(p, 3, x, &[1, 1, 1]),
            CurveKind::Genus2 => CurveSpec::new(p, 3, x, &[1, 1, 2]),
        }
    }

    /// `(κ, m)` of each KZ solution whose coefficients enter the point sum.
    fn solutions(self) -> Vec<(&'static str, Vec<u32>)> {
        match self {
            CurveKind::Elliptic => vec![("2", vec![1, 1, 1])],
            CurveKind::Quartic => vec![("2", vec![1, 1, 1, 1])],
            CurveKind::Cubic3 => vec![("3", vec![2, 2, 2])],
            CurveKind::Genus2 => vec![("3", vec![1, 1, 2]), ("3", vec![2, 2, 1])],
        }
    }

    /// Structural hypotheses (`3 | p - 1` for the cubic covers) and the minimum
    /// prime below which the point-sum identity is known to break.
    fn gate(self, p: u64, enforce_min: bool) -> Result<()> {
        match self {
            CurveKind::Elliptic | CurveKind::Quartic => {
                if enforce_min && p < 5 {
                    return Err(Error::Precondition(format!("{} curves need p ≥ 5", self.name())));
                }
            }
            CurveKind::Cubic3 | CurveKind::Genus2 => {
                if (p - 1) % 3 != 0 {
                    return Err(Error::Precondition(format!("{} curves need 3 | p - 1", self.name())));
                }
            }
        }
        Ok(())
    }
}

impl fmt::Display for CurveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CurveKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CurveKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown curve kind '{s}'")))
    }
}

/// The reduced `k = 1`, `q = 0`, `l = 1` coefficient vector: the coefficient of `t^{p-1}`
/// in `Π_s (t - z_s)^{M_s} / (t - z_j)`, without the `Π (z_a - z_b)^{M_ab}` factor.
fn reduced_solution(p: u64, kappa: &str, m: &[u32], k: u32) -> Result<WeightVector> {
    let zeros = vec![0; k as usize];
    let ones = vec![1; k as usize];
    let spec = ProblemSpec::new(p, kappa.parse::<Kappa>()?, m.to_vec(), k, &zeros, &ones)?;
    let exps = exponent_data(&spec, None)?;
    Ok(taylor_solution_factored(&spec, &exps)?.reduced)
}

/// Values of one point-sum identity at a tuple.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CurveValues {
    pub x: Vec<FieldElement>,
    pub integrals: Vec<FieldElement>,
    pub expected: Vec<FieldElement>,
}

/// `∫ 1/(t - x_j) = -(sum of the j-th coefficients)` for one curve kind at one prime,
/// with the coefficient polynomials computed once.
pub struct CurveChecker {
    kind: CurveKind,
    field: PrimeField,
    coefficients: Vec<WeightVector>,
}

impl CurveChecker {
    pub fn new(kind: CurveKind, p: u64) -> Result<Self> {
        Self::build(kind, p, true)
    }

    /// Skips the minimum-prime gate, for looking at the excluded small cases.
    pub fn without_min_prime(kind: CurveKind, p: u64) -> Result<Self> {
        Self::build(kind, p, false)
    }

    fn build(kind: CurveKind, p: u64, enforce_min: bool) -> Result<Self> {
        let field = PrimeField::new(p)?;
        kind.gate(p, enforce_min)?;
        let coefficients = kind
            .solutions()
            .into_iter()
            .map(|(kappa, m)| reduced_solution(p, kappa, &m, 1))
            .collect::<Result<_>>()?;
        Ok(Self {
            kind,
            field,
            coefficients,
        })
    }

    pub fn kind(&self) -> CurveKind {
        self.kind
    }

    pub fn values(&self, x: &[FieldElement]) -> Result<CurveValues> {
        let f = self.field;
        let n = self.kind.n();
        if x.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                got: x.len(),
            });
        }
        let curve = self.kind.curve(f.p(), x)?;
        let x = curve.branch_points().to_vec();
        let mut integrals = Vec::with_capacity(n);
        let mut expected = Vec::with_capacity(n);
        for j in 0..n {
            integrals.push(curve_integral(&curve, j)?);
            let mut unit = vec![0; n];
            unit[j] = 1;
            let idx = MultiIndex(unit);
            let mut sum = 0;
            for c in &self.coefficients {
                sum = f.add(sum, c.coord(&idx).eval(&[], &x)?);
            }
            expected.push(f.neg(sum));
        }
        Ok(CurveValues { x, integrals, expected })
    }

    pub fn check(&self, x: &[FieldElement]) -> Result<CheckReport> {
        let v = self.values(x)?;
        let name = self.kind.name();
        Ok(match (0..v.integrals.len()).find(|&j| v.integrals[j] != v.expected[j]) {
            None => CheckReport::pass(name),
            Some(j) => CheckReport::fail(
                name,
                Witness {
                    equation: format!("j = {}, x = {:?}", j + 1, v.x),
                    coordinate: None,
                    residual: None,
                    detail: Some(format!("point sum {}, coefficient side {}", v.integrals[j], v.expected[j])),
                },
            ),
        })
    }
}

pub fn check_curve_theorem(kind: CurveKind, p: u64, x: &[FieldElement]) -> Result<CheckReport> {
    CurveChecker::new(kind, p)?.check(x)
}

/// `y^2 = (t_1 - t_2) Π_{i,s} (t_i - x_s)` with two branch values `x_1 ≠ x_2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurfaceSpec {
    field: PrimeField,
    x: [FieldElement; 2],
}

impl SurfaceSpec {
    pub fn new(p: u64, x1: FieldElement, x2: FieldElement) -> Result<Self> {
        let field = PrimeField::new(p)?;
        let x = check_distinct(field, &[x1, x2])?;
        Ok(Self { field, x: [x[0], x[1]] })
    }

    fn rhs(&self, t1: FieldElement, t2: FieldElement) -> FieldElement {
        let f = self.field;
        let mut v = f.sub(t1, t2);
        for t in [t1, t2] {
            for xs in self.x {
                v = f.mul(v, f.sub(t, xs));
            }
        }
        v
    }

    /// All affine solutions `(t_1, t_2, y)`.
    pub fn affine_points(&self) -> Vec<(FieldElement, FieldElement, FieldElement)> {
        let f = self.field;
        let mut out = Vec::new();
        for t1 in 0..f.p() {
            for t2 in 0..f.p() {
                let v = self.rhs(t1, t2);
                for y in 0..f.p() {
                    if f.mul(y, y) == v {
                        out.push((t1, t2, y));
                    }
                }
            }
        }
        out
    }
}

/// `Σ' (t_1 - t_2) / ((t_1 - x_a)(t_2 - x_b))` over affine points where the function is defined.
pub fn surface_integral(s: &SurfaceSpec, a: usize, b: usize) -> FieldElement {
    let f = s.field;
    let (xa, xb) = (s.x[a], s.x[b]);
    s.affine_points()
        .into_iter()
        .filter(|&(t1, t2, _)| t1 != xa && t2 != xb)
        .fold(0, |acc, (t1, t2, _)| {
            let den = f.mul(f.sub(t1, xa), f.sub(t2, xb));
            f.add(acc, f.mul(f.sub(t1, t2), f.inv(den).expect("defined")))
        })
}

/// `c_J(x_1, x_2)` against the surface integrals of `(t_1 - t_2) W_J`, where `c_J` are the
/// reduced coefficients of the `κ = 4`, `m = (2, 2)`, `k = 2` solution.
pub struct SurfaceChecker {
    field: PrimeField,
    coefficients: WeightVector,
}

impl SurfaceChecker {
    /// Requires `p ≡ 3 mod 4` and `p ≥ 7`.
    pub fn new(p: u64) -> Result<Self> {
        Self::build(p, true)
    }

    /// Keeps `p ≡ 3 mod 4` but allows `p = 3`.
    pub fn without_min_prime(p: u64) -> Result<Self> {
        Self::build(p, false)
    }

    fn build(p: u64, enforce_min: bool) -> Result<Self> {
        let field = PrimeField::new(p)?;
        if p % 4 != 3 {
            return Err(Error::Precondition("the surface identity needs p ≡ 3 mod 4".into()));
        }
        if enforce_min && p < 7 {
            return Err(Error::Precondition("the surface identity needs p ≥ 7".into()));
        }
        Ok(Self {
            field,
            coefficients: reduced_solution(p, "4", &[2, 2], 2)?,
        })
    }

    /// Integral sides and coefficient sides for `J = (2,0), (1,1), (0,2)`.
    pub fn values(&self, x1: FieldElement, x2: FieldElement) -> Result<CurveValues> {
        let f = self.field;
        let s = SurfaceSpec::new(f.p(), x1, x2)?;
        let integrals = vec![
            surface_integral(&s, 0, 0),
            f.add(surface_integral(&s, 0, 1), surface_integral(&s, 1, 0)),
            surface_integral(&s, 1, 1),
        ];
        let x = s.x.to_vec();
        let expected = [[2, 0], [1, 1], [0, 2]]
            .iter()
            .map(|j| self.coefficients.coord(&MultiIndex(j.to_vec())).eval(&[], &x))
            .collect::<Result<_>>()?;
        Ok(CurveValues { x, integrals, expected })
    }

    pub fn check(&self, x1: FieldElement, x2: FieldElement) -> Result<CheckReport> {
        let v = self.values(x1, x2)?;
        let labels = ["(2,0)", "(1,1)", "(0,2)"];
        Ok(match (0..3).find(|&j| v.integrals[j] != v.expected[j]) {
            None => CheckReport::pass("surface"),
            Some(j) => CheckReport::fail(
                "surface",
                Witness {
                    equation: format!("J = {}, x = {:?}", labels[j], v.x),
                    coordinate: None,
                    residual: None,
                    detail: Some(format!("point sum {}, coefficient {}", v.integrals[j], v.expected[j])),
                },
            ),
        })
    }
}

pub fn check_surface_theorem(p: u64, x1: FieldElement, x2: FieldElement) -> Result<CheckReport> {
    SurfaceChecker::new(p)?.check(x1, x2)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Number of `y` with `y^d = a`, from the multiplicative group structure.
    fn roots_count(f: PrimeField, d: u64, a: FieldElement) -> usize {
        if a == 0 {
            return 1;
        }
        let g = gcd(d, f.p() - 1);
        if f.pow(a, (f.p() - 1) / g) == 1 {
            g as usize
        } else {
            0
        }
    }

    fn gcd(a: u64, b: u64) -> u64 {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }

    #[test]
    fn points_at_three() {
        let c = CurveSpec::new(3, 2, &[0, 1, 2], &[1, 1, 1]).unwrap();
        assert_eq!(c.affine_points(), vec![(0, 0), (1, 0), (2, 0)]);
        assert_eq!(curve_integral(&c, 0).unwrap(), 0);
        assert!(CurveSpec::new(3, 2, &[], &[]).is_err());
        assert!(CurveSpec::new(5, 2, &[1, 6], &[1, 1]).is_err());
    }

    #[test]
    fn point_counts_match_character_count() {
        for (p, d, e) in [(7u64, 2u32, vec![1u32, 1, 1]), (13, 3, vec![1, 1, 2]), (11, 2, vec![1, 1, 1, 1])] {
            let f = PrimeField::new(p).unwrap();
            let x: Vec<u64> = (0..e.len() as u64).map(|i| (3 * i + 1) % p).collect();
            let c = CurveSpec::new(p, d, &x, &e).unwrap();
            let expected: usize = (0..p).map(|t| roots_count(f, d as u64, c.rhs(t))).sum();
            assert_eq!(c.affine_points().len(), expected);
        }
    }

    #[test]
    fn elliptic_at_three_is_anomalous() {
        assert!(CurveChecker::new(CurveKind::Elliptic, 3).is_err());
        let c = CurveChecker::without_min_prime(CurveKind::Elliptic, 3).unwrap();
        let v = c.values(&[0, 1, 2]).unwrap();
        assert_eq!(v.integrals[0], 0);
        assert_eq!(v.expected[0], 2);
    }

    #[test]
    fn theorems_small() {
        assert!(check_curve_theorem(CurveKind::Elliptic, 7, &[0, 1, 3]).unwrap().passed);
        assert!(check_curve_theorem(CurveKind::Quartic, 7, &[0, 1, 3, 5]).unwrap().passed);
        assert!(check_curve_theorem(CurveKind::Cubic3, 7, &[0, 2, 3]).unwrap().passed);
        assert!(check_curve_theorem(CurveKind::Genus2, 7, &[4, 2, 3]).unwrap().passed);
        assert!(check_curve_theorem(CurveKind::Cubic3, 5, &[0, 2, 3]).is_err());
    }

    #[test]
    fn surface_small() {
        assert!(check_surface_theorem(7, 0, 1).unwrap().passed);
        assert!(check_surface_theorem(5, 0, 1).is_err());
        let v = SurfaceChecker::without_min_prime(3).unwrap().values(0, 1).unwrap();
        assert_eq!((v.integrals[0], v.expected[0]), (0, 1));
    }

    #[test]
    fn kind_names_round_trip() {
        for k in CurveKind::ALL {
            assert_eq!(k.name().parse::<CurveKind>().unwrap(), k);
        }
        assert!("surface".parse::<CurveKind>().is_err());
    }
}
