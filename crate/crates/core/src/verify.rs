//! Exact checkers for the identities satisfied by candidate solutions.
//!
//! Rational identities are multiplied through by their denominators and
//! compared as polynomials. Unmet hypotheses are returned as errors; a check
//! that runs and fails is a report with `passed == false` and a witness.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::construct::{ExponentData, FactoredSolution, ProblemSpec};
use crate::error::{Error, Result};
use crate::ffpoly::{Ambient, SparsePoly, Var};
use crate::field::{FieldElement, PrimeField};
use crate::sl2rep::{self, diagonal_matrix, gaudin_matrix, FpMatrix, Generator, HighestWeights, MultiIndex, WeightVector};

/// Where a check failed: the equation, and when relevant the coordinate and the nonzero residual.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub equation: String,
    #[serde(rename = "J", skip_serializing_if = "Option::is_none", default)]
    pub coordinate: Option<Vec<u32>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub residual: Option<SparsePoly>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub detail: Option<String>,
}

impl Witness {
    fn equation(equation: impl Into<String>) -> Self {
        Self {
            equation: equation.into(),
            coordinate: None,
            residual: None,
            detail: None,
        }
    }

    /// Witness from the first nonzero coordinate of a residual vector.
    fn from_residual(equation: impl Into<String>, residual: &WeightVector) -> Option<Self> {
        residual.nonzero().next().map(|(j, poly)| Self {
            coordinate: Some(j.0.clone()),
            residual: Some(poly.clone()),
            ..Self::equation(equation)
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<Witness>,
}

impl CheckReport {
    pub fn pass(name: &str) -> Self {
        Self {
            name: name.into(),
            passed: true,
            witness: None,
        }
    }

    pub fn fail(name: &str, witness: Witness) -> Self {
        Self {
            name: name.into(),
            passed: false,
            witness: Some(witness),
        }
    }

    fn from_witness(name: &str, witness: Option<Witness>) -> Self {
        match witness {
            Some(w) => Self::fail(name, w),
            None => Self::pass(name),
        }
    }

    /// First failure among `parts`, reported under `name`.
    pub fn all(name: &str, parts: impl IntoIterator<Item = CheckReport>) -> Self {
        for part in parts {
            if let Some(w) = part.witness {
                let equation = format!("{}: {}", part.name, w.equation);
                return Self::fail(name, Witness { equation, ..w });
            }
        }
        Self::pass(name)
    }
}

fn z_diff(amb: Ambient, i: usize, j: usize) -> Result<SparsePoly> {
    SparsePoly::linear(amb, 0, &[], &[(i, 1), (j, -1)])
}

/// `Π_{r≠i, r∉skip} (z_i - z_r)`.
fn cleared_denominator(amb: Ambient, i: usize, skip: Option<usize>) -> Result<SparsePoly> {
    let mut acc = SparsePoly::one(amb);
    for r in (0..amb.n()).filter(|&r| r != i && Some(r) != skip) {
        acc = &acc * &z_diff(amb, i, r)?;
    }
    Ok(acc)
}

fn require_ambient(w: &WeightVector, spec: &ProblemSpec) -> Result<()> {
    if w.field() != spec.field() || w.weights().m() != spec.m() {
        return Err(Error::AmbientMismatch(
            format!("{:?} over F_{}", w.weights(), w.field().p()),
            format!("m = {:?} over F_{}", spec.m(), spec.p()),
        ));
    }
    Ok(())
}

/// `K Σ_{j≠i} Π_{r≠i,j} (z_i - z_r) Ω^{(i,j)} w`.
fn kz_right_side(w: &WeightVector, i: usize, kinv: FieldElement) -> Result<WeightVector> {
    let amb = w.ambient();
    let mut acc = WeightVector::zero(w.weights().clone(), amb)?;
    for j in (0..amb.n()).filter(|&j| j != i) {
        let term = w.casimir(i, j)?.mul_poly(&cleared_denominator(amb, i, Some(j))?)?;
        acc = acc.checked_add(&term)?;
    }
    Ok(acc.scale(kinv))
}

fn kz_report(name: &str, n: usize, residual: impl Fn(usize) -> Result<WeightVector> + Sync) -> Result<CheckReport> {
    let residuals: Vec<WeightVector> = (0..n).into_par_iter().map(&residual).collect::<Result<_>>()?;
    let witness = residuals
        .iter()
        .enumerate()
        .find_map(|(i, r)| Witness::from_residual(format!("i = {}", i + 1), r));
    Ok(CheckReport::from_witness(name, witness))
}

/// The KZ system, one cleared identity per `i`:
/// `Π_{j≠i}(z_i - z_j) ∂_i w = K Σ_{j≠i} Π_{r≠i,j}(z_i - z_r) Ω^{(i,j)} w`.
pub fn check_kz(w: &WeightVector, spec: &ProblemSpec) -> Result<CheckReport> {
    require_ambient(w, spec)?;
    let kinv = spec.field().ratio(spec.kappa().den, spec.kappa().num).expect("valid spec");
    let amb = w.ambient();
    kz_report("kz", amb.n(), |i| {
        let d = cleared_denominator(amb, i, None)?;
        let lhs = w.map_coords(|poly| &d * &poly.partial_derivative(Var::Z(i)).expect("z-variable"));
        lhs.checked_sub(&kz_right_side(w, i, kinv)?)
    })
}

/// The KZ system for `P u` with `P = Π_{a<b} (z_a - z_b)^{e_ab}`, checked on `u`:
/// `D_i ∂_i u + Σ_{j≠i} e_ij C_ij u = K Σ_{j≠i} C_ij Ω^{(i,j)} u`.
/// Since `P` is not a zero divisor this is equivalent to [`check_kz`] on the expansion.
pub fn check_kz_factored(sol: &FactoredSolution, spec: &ProblemSpec) -> Result<CheckReport> {
    let u = &sol.reduced;
    require_ambient(u, spec)?;
    let f = spec.field();
    let kinv = f.ratio(spec.kappa().den, spec.kappa().num).expect("valid spec");
    let amb = u.ambient();
    let n = amb.n();
    kz_report("kz", n, |i| {
        let mut gauge = SparsePoly::zero(amb);
        for j in (0..n).filter(|&j| j != i) {
            let (a, b) = if i < j { (i, j) } else { (j, i) };
            let e = f.reduce(sol.prefactor[crate::construct::pair_index(n, a, b)]);
            gauge = &gauge + &cleared_denominator(amb, i, Some(j))?.scale(e);
        }
        let d = cleared_denominator(amb, i, None)?;
        let lhs = u.map_coords(|poly| &(&d * &poly.partial_derivative(Var::Z(i)).expect("z-variable")) + &(&gauge * poly));
        lhs.checked_sub(&kz_right_side(u, i, kinv)?)
    })
}

/// `e w = 0`. Multiplying by a scalar polynomial commutes with `e`, so for a
/// factored solution pass its reduced part.
pub fn check_singular(w: &WeightVector) -> Result<CheckReport> {
    if w.weights().k() == 0 {
        return Ok(CheckReport::pass("singular"));
    }
    let img = w.act_e()?;
    Ok(CheckReport::from_witness("singular", Witness::from_residual("e w = 0", &img)))
}

/// The relations `Σ_s (j_s + 1)(m_s - j_s) I_{J+1_s} = 0` for every `J` with `|J| = k - 1`,
/// computed directly from the coordinates.
pub fn singular_relations(w: &WeightVector) -> Vec<(MultiIndex, SparsePoly)> {
    let m = w.weights().m();
    let k = w.weights().k() as i64;
    let f = w.field();
    sl2rep::basis(m, k - 1)
        .into_iter()
        .map(|j| {
            let mut acc = SparsePoly::zero(w.ambient());
            for s in 0..m.len() {
                if j.0[s] < m[s] {
                    let mut up = j.0.clone();
                    up[s] += 1;
                    let c = (j.0[s] as i64 + 1) * (m[s] as i64 - j.0[s] as i64);
                    acc = &acc + &w.coord(&MultiIndex(up)).scale(f.from_i64(c));
                }
            }
            (j, acc)
        })
        .collect()
}

fn sum_ms(exps: &ExponentData, field: PrimeField) -> FieldElement {
    exps.ms.iter().fold(0, |acc, &x| field.add(acc, field.reduce(x)))
}

/// `Σ_s z_s M_s I_s = 0` for `k = 1`, valid when `Σ M_s ≡ -1`.
pub fn check_resonance_linear(w: &WeightVector, exps: &ExponentData) -> Result<CheckReport> {
    let f = w.field();
    if w.weights().k() != 1 {
        return Err(Error::Precondition("the linear resonance relation needs k = 1".into()));
    }
    if exps.ms.len() != w.weights().n() {
        return Err(Error::LengthMismatch {
            expected: w.weights().n(),
            got: exps.ms.len(),
        });
    }
    if sum_ms(exps, f) != f.neg(1) {
        return Err(Error::Precondition(format!(
            "Σ M_s ≡ {} mod {}, need -1",
            sum_ms(exps, f),
            f.p()
        )));
    }
    let amb = w.ambient();
    let mut acc = SparsePoly::zero(amb);
    for (s, j) in w.weights().basis().iter().enumerate() {
        let z = SparsePoly::var(amb, Var::Z(s))?;
        acc = &acc + &(&z * &w.coord(j)).scale(f.reduce(exps.ms[s]));
    }
    let witness = (!acc.is_zero()).then(|| Witness {
        residual: Some(acc),
        ..Witness::equation("Σ z_s M_s I_s = 0")
    });
    Ok(CheckReport::from_witness("resonance-linear", witness))
}

/// Whether `(ℓ - 1) K - Σ M_s - (k - 1) M0 ≡ 1 mod p`.
pub fn resonance_condition(field: PrimeField, exps: &ExponentData, k: u32, ell: u32) -> bool {
    let f = field;
    let lhs = f.sub(
        f.sub(
            f.mul(f.reduce(ell as u64 + f.p() - 1), f.reduce(exps.kinv)),
            sum_ms(exps, f),
        ),
        f.mul(f.reduce(k as u64 + f.p() - 1), f.reduce(exps.m0)),
    );
    lhs == 1
}

/// The least `ℓ` in `1..=p` satisfying the resonance condition, if any.
pub fn resonance_ell(field: PrimeField, exps: &ExponentData, k: u32) -> Option<u32> {
    (1..=field.p() as u32).find(|&ell| resonance_condition(field, exps, k, ell))
}

/// `(ze)^ℓ w = 0` under the resonance condition. Commutes with scalar prefactors.
pub fn check_ze_resonance(w: &WeightVector, exps: &ExponentData, ell: u32) -> Result<CheckReport> {
    if ell == 0 {
        return Err(Error::Precondition("ℓ must be positive".into()));
    }
    let k = w.weights().k();
    if !resonance_condition(w.field(), exps, k, ell) {
        return Err(Error::Precondition(format!(
            "(ℓ-1)K - ΣM_s - (k-1)M0 ≢ 1 mod {} for ℓ = {ell}, k = {k}",
            w.field().p()
        )));
    }
    let witness = match w.ze_power(ell)? {
        None => None,
        Some(img) => Witness::from_residual(format!("(ze)^{ell} w = 0"), &img),
    };
    Ok(CheckReport::from_witness("resonance-ze", witness))
}

fn matrix_witness(equation: String, mat: &FpMatrix) -> Option<Witness> {
    if mat.is_zero() {
        return None;
    }
    let (r, c) = (0..mat.rows())
        .flat_map(|r| (0..mat.cols()).map(move |c| (r, c)))
        .find(|&(r, c)| mat.get(r, c) != 0)
        .expect("nonzero");
    Some(Witness {
        detail: Some(format!("entry ({r}, {c}) = {}", mat.get(r, c))),
        ..Witness::equation(equation)
    })
}

/// Gaudin Hamiltonians at `z` commute with each other and with the diagonal `e`, `f`, `h`.
pub fn check_flatness(field: PrimeField, weights: &HighestWeights, z: &[FieldElement]) -> Result<CheckReport> {
    let m = weights.m();
    let k = weights.k() as i64;
    let n = m.len();
    let at = |kk: i64| -> Result<Vec<FpMatrix>> { (0..n).map(|i| gaudin_matrix(field, m, kk, i, z)).collect() };
    let (lower, mid, upper) = (at(k - 1)?, at(k)?, at(k + 1)?);
    for i in 0..n {
        for j in i + 1..n {
            let c = mid[i].commutator(&mid[j]);
            if let Some(w) = matrix_witness(format!("[H_{}, H_{}] = 0", i + 1, j + 1), &c) {
                return Ok(CheckReport::fail("flatness", w));
            }
        }
    }
    let e = diagonal_matrix(field, m, k, Generator::E);
    let f = diagonal_matrix(field, m, k, Generator::F);
    let h = diagonal_matrix(field, m, k, Generator::H);
    for i in 0..n {
        let checks = [
            ("e", lower[i].mul(&e).sub(&e.mul(&mid[i]))),
            ("f", upper[i].mul(&f).sub(&f.mul(&mid[i]))),
            ("h", mid[i].commutator(&h)),
        ];
        for (x, c) in checks {
            if let Some(w) = matrix_witness(format!("[H_{}, {x}] = 0", i + 1), &c) {
                return Ok(CheckReport::fail("flatness", w));
            }
        }
    }
    Ok(CheckReport::pass("flatness"))
}

/// `Φ` with the `(t - z_s)` exponent lowered by one when `lower = Some(s)`; `k = 1`.
fn master_k1(spec: &ProblemSpec, exps: &ExponentData, lower: Option<usize>) -> Result<SparsePoly> {
    let amb = spec.tz_ambient();
    let mut acc = crate::construct::z_prefactor(spec, exps, amb)?;
    for s in 0..spec.n() {
        let e = exps.ms[s] - u64::from(lower == Some(s));
        acc = &acc * &SparsePoly::linear(amb, 0, &[(0, 1)], &[(s, -1)])?.pow(e);
    }
    Ok(acc)
}

/// The three one-variable identities behind the `k = 1` results, with `Φ` built
/// from `exps` and the coefficients `-m_s/κ` taken from `spec`:
///
/// * `∂_t Φ = Σ_s (-m_s/κ) Φ/(t - z_s)`;
/// * for each `i`, `D_i ∂_i(Φ V) - K Σ_{j≠i} C_ij Ω^{(i,j)}(Φ V) = D_i ∂_t(Φ W^i)` with
///   `Φ V = (Φ/(t - z_s))_s` and `Φ W^i = -Φ/(t - z_i)` in coordinate `i`;
/// * `∂_t(t Φ) = (1 - Σ m_s/κ) Φ - Σ_s z_s (m_s/κ) Φ/(t - z_s)`.
pub fn check_cohomology_k1(spec: &ProblemSpec, exps: &ExponentData) -> Result<CheckReport> {
    if spec.k() != 1 {
        return Err(Error::Precondition("these identities are stated for k = 1".into()));
    }
    if exps.ms.contains(&0) {
        return Err(Error::Precondition("every M_s must be at least 1".into()));
    }
    let f = spec.field();
    let n = spec.n();
    let amb = spec.tz_ambient();
    let kinv = f.ratio(spec.kappa().den, spec.kappa().num).expect("valid spec");
    let coef: Vec<FieldElement> = spec.m().iter().map(|&m| f.neg(f.mul(f.reduce(m as u64), kinv))).collect();
    let phi = master_k1(spec, exps, None)?;
    let phi_s: Vec<SparsePoly> = (0..n).map(|s| master_k1(spec, exps, Some(s))).collect::<Result<_>>()?;
    let t = SparsePoly::var(amb, Var::T(0))?;

    let mut rhs = SparsePoly::zero(amb);
    for s in 0..n {
        rhs = &rhs + &phi_s[s].scale(coef[s]);
    }
    let lhs = phi.partial_derivative(Var::T(0))?;
    let a = residual_report("derivative", "∂_t Φ = Σ c_s Φ/(t - z_s)", &lhs - &rhs);

    let weights = spec.weights().clone();
    let phi_v = WeightVector::from_coords(weights.clone(), amb, weights.basis().into_iter().zip(phi_s.iter().cloned()))?;
    let b_parts: Vec<CheckReport> = (0..n)
        .into_par_iter()
        .map(|i| -> Result<CheckReport> {
            let d = cleared_denominator(amb, i, None)?;
            let left = phi_v
                .map_coords(|poly| &d * &poly.partial_derivative(Var::Z(i)).expect("z-variable"))
                .checked_sub(&kz_right_side(&phi_v, i, kinv)?)?;
            let slot = weights.basis()[i].clone();
            let right = WeightVector::from_coords(
                weights.clone(),
                amb,
                [(slot, &d * &(-&phi_s[i]).partial_derivative(Var::T(0))?)],
            )?;
            let name = format!("kz-form i = {}", i + 1);
            Ok(CheckReport::from_witness(
                &name,
                Witness::from_residual("cleared KZ operator on Φ V = D_i ∂_t(Φ W^i)", &left.checked_sub(&right)?),
            ))
        })
        .collect::<Result<_>>()?;
    let b = CheckReport::all("kz-form", b_parts);

    let lhs = (&t * &phi).partial_derivative(Var::T(0))?;
    let total = coef.iter().fold(1, |acc, &c| f.add(acc, c));
    let mut rhs = phi.scale(total);
    for s in 0..n {
        let z = SparsePoly::var(amb, Var::Z(s))?;
        rhs = &rhs + &(&z * &phi_s[s]).scale(coef[s]);
    }
    let c = residual_report("resonance-form", "∂_t(t Φ) = (1 + Σ c_s) Φ + Σ z_s c_s Φ/(t - z_s)", &lhs - &rhs);

    Ok(CheckReport::all("cohomology-k1", [a, b, c]))
}

fn residual_report(name: &str, equation: &str, residual: SparsePoly) -> CheckReport {
    if residual.is_zero() {
        CheckReport::pass(name)
    } else {
        CheckReport::fail(
            name,
            Witness {
                residual: Some(residual),
                ..Witness::equation(equation)
            },
        )
    }
}
