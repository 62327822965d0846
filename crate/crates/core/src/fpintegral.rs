//! Sums of polynomials over `F_p^k` and their relation to Taylor solutions.

use rayon::prelude::*;
use serde::Serialize;

use crate::construct::{exponent_data, master_times_weight_at, taylor_solution_factored, ExponentData, FactoredSolution, ProblemSpec};
use crate::error::{Error, Result};
use crate::ffpoly::SparsePoly;
use crate::field::{FieldElement, PrimeField};
use crate::sl2rep::{check_distinct, MultiIndex};
use crate::verify::{CheckReport, Witness};

/// `Σ_{t ∈ F_p} t^i`: `-1` when `i ≥ 1` and `(p - 1) | i`, otherwise `0` (so `0` for `i = 0`).
pub fn power_sum(field: PrimeField, i: u64) -> FieldElement {
    if i >= 1 && i % (field.p() - 1) == 0 {
        field.neg(1)
    } else {
        0
    }
}

fn require_t_only(f: &SparsePoly) -> Result<()> {
    for (_, z, _) in f.terms() {
        if let Some(s) = z.iter().position(|&e| e > 0) {
            return Err(Error::UnevaluatedZ(s + 1));
        }
    }
    Ok(())
}

/// All points of `F_p^k` in lexicographic order.
pub fn grid(p: u64, k: usize) -> impl Iterator<Item = Vec<FieldElement>> {
    let total = (p as usize).pow(k as u32);
    (0..total).map(move |mut idx| {
        let mut pt = vec![0; k];
        for slot in pt.iter_mut().rev() {
            *slot = (idx % p as usize) as u64;
            idx /= p as usize;
        }
        pt
    })
}

/// `Σ_{t ∈ F_p^k} F(t)` by evaluating at every grid point.
pub fn integrate_grid(f: &SparsePoly) -> Result<FieldElement> {
    require_t_only(f)?;
    let amb = f.ambient();
    let field = amb.field();
    let zeros = vec![0; amb.n()];
    let values: Vec<FieldElement> = grid(amb.p(), amb.k())
        .collect::<Vec<_>>()
        .par_iter()
        .map(|t| f.eval(t, &zeros))
        .collect::<Result<_>>()?;
    Ok(values.into_iter().fold(0, |acc, v| field.add(acc, v)))
}

/// `Σ_{t ∈ F_p^k} F(t)` term by term, each monomial contributing `c Π_i power_sum(e_i)`.
pub fn integrate_fpk(f: &SparsePoly) -> Result<FieldElement> {
    require_t_only(f)?;
    let field = f.field();
    let mut acc = 0;
    for (t, _, c) in f.terms() {
        let v = t.iter().fold(c, |v, &e| field.mul(v, power_sum(field, e as u64)));
        acc = field.add(acc, v);
    }
    Ok(acc)
}

/// Upper bound on `deg_{t_i}` of `Φ W_J`: `M0 (k - 1) + Σ M_s - 1`.
pub fn weight_product_degree(spec: &ProblemSpec, exps: &ExponentData) -> u64 {
    exps.m0 * (spec.k() as u64 - 1) + exps.ms.iter().sum::<u64>() - 1
}

fn integral_preconditions(spec: &ProblemSpec, exps: &ExponentData, x: &[FieldElement]) -> Result<Vec<FieldElement>> {
    if spec.l().iter().any(|&l| l != 1) {
        return Err(Error::Precondition("the grid identity is stated for l = (1, .., 1)".into()));
    }
    if x.len() != spec.n() {
        return Err(Error::LengthMismatch {
            expected: spec.n(),
            got: x.len(),
        });
    }
    let x = check_distinct(spec.field(), x)?;
    let deg = weight_product_degree(spec, exps);
    let bound = 2 * spec.p() - 2;
    if deg >= bound {
        return Err(Error::Inapplicable(format!("deg_t F = {deg} is not below 2p - 2 = {bound}")));
    }
    Ok(x)
}

/// `I^{(p-1, .., p-1)}(x, q) = (-1)^k Σ_{t ∈ F_p^k} Φ(t, x) W(t, x)` coordinatewise, for a
/// solution already computed from `(spec, exps)`.
pub fn check_integral_theorem_with(
    sol: &FactoredSolution,
    spec: &ProblemSpec,
    exps: &ExponentData,
    x: &[FieldElement],
) -> Result<CheckReport> {
    let x = integral_preconditions(spec, exps, x)?;
    let field = spec.field();
    let pre = sol.prefactor_poly()?.eval(&[], &x)?;
    let sign = if spec.k() % 2 == 0 { 1 } else { field.neg(1) };
    for j in spec.weights().basis() {
        let lhs = field.mul(pre, sol.reduced.coord(&j).eval(&[], &x)?);
        let integrand = master_times_weight_at(spec, exps, &j, &x)?;
        let rhs = field.mul(sign, integrate_fpk(&integrand)?);
        if lhs != rhs {
            return Ok(CheckReport::fail(
                "integral",
                Witness {
                    equation: format!("x = {x:?}"),
                    coordinate: Some(j.0),
                    residual: None,
                    detail: Some(format!("Taylor side {lhs}, grid side {rhs}")),
                },
            ));
        }
    }
    Ok(CheckReport::pass("integral"))
}

pub fn check_integral_theorem(spec: &ProblemSpec, exps: &ExponentData, x: &[FieldElement]) -> Result<CheckReport> {
    integral_preconditions(spec, exps, x)?;
    let sol = taylor_solution_factored(spec, exps)?;
    check_integral_theorem_with(&sol, spec, exps, x)
}

/// Smallest generator of `F_p^×`.
pub fn primitive_root(field: PrimeField) -> FieldElement {
    let p = field.p();
    let mut primes = Vec::new();
    let mut r = p - 1;
    let mut d = 2;
    while d * d <= r {
        if r % d == 0 {
            primes.push(d);
            while r % d == 0 {
                r /= d;
            }
        }
        d += 1;
    }
    if r > 1 {
        primes.push(r);
    }
    (2..p)
        .find(|&g| primes.iter().all(|&q| field.pow(g, (p - 1) / q) != 1))
        .unwrap_or(1)
}

/// Data of the even-κ setting: `κ = 2κ'`, `m_s = 2m'_s`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GammaSetting {
    pub kappa_half: u64,
    pub m_half: Vec<u64>,
    /// `(p - 1) / κ'`
    pub power: u64,
}

/// Checks the hypotheses `κ = 2κ'` with `κ'` even, all `m_s` even, `κ' | p - 1` with odd
/// quotient, and `k ≥ 2` (needed for the pairing of cells by a transposition).
pub fn gamma_setting(spec: &ProblemSpec) -> Result<GammaSetting> {
    let kappa = spec.kappa();
    let bad = |why: &str| Err(Error::Precondition(why.to_string()));
    if kappa.num % kappa.den != 0 || kappa.num / kappa.den <= 0 {
        return bad("κ must be a positive integer");
    }
    let kappa = (kappa.num / kappa.den) as u64;
    if kappa % 4 != 0 {
        return bad("κ = 2κ' with κ' even is required");
    }
    let kh = kappa / 2;
    if spec.m().iter().any(|&m| m % 2 != 0) {
        return bad("every m_s must be even");
    }
    let p = spec.p();
    if (p - 1) % kh != 0 || ((p - 1) / kh) % 2 == 0 {
        return bad("κ' must divide p - 1 with odd quotient");
    }
    if spec.k() < 2 {
        return bad("k ≥ 2 is required");
    }
    Ok(GammaSetting {
        kappa_half: kh,
        m_half: spec.m().iter().map(|&m| m as u64 / 2).collect(),
        power: (p - 1) / kh,
    })
}

/// Exponents `M_s = m'_s (p - 1)/κ'`, `M0 = p - (p - 1)/κ'` and least residues for `M_ij`.
pub fn gamma_exponents(spec: &ProblemSpec) -> Result<ExponentData> {
    let g = gamma_setting(spec)?;
    let mut exps = exponent_data(spec, None)?;
    exps.ms = g.m_half.iter().map(|&m| m * g.power).collect();
    exps.m0 = spec.p() - g.power;
    exponent_data(spec, Some(&exps))
}

/// `φ(t, x) = Π_{i<j} (t_i - t_j)^{κ'-1} Π_{i,s} (t_i - x_s)^{m'_s}` at a point.
fn phi_at(field: PrimeField, g: &GammaSetting, t: &[FieldElement], x: &[FieldElement]) -> FieldElement {
    let mut v = 1;
    for i in 0..t.len() {
        for j in i + 1..t.len() {
            v = field.mul(v, field.pow(field.sub(t[i], t[j]), g.kappa_half - 1));
        }
        for (s, &xs) in x.iter().enumerate() {
            v = field.mul(v, field.pow(field.sub(t[i], xs), g.m_half[s]));
        }
    }
    v
}

/// The cells `γ_0, .., γ_{κ'}` of `F_p^k`: `γ_0` is `{φ = 0}`, and for `ℓ ≥ 1`
/// `γ_ℓ = {φ^{(p-1)/κ'} = a^{ℓ (p-1)/κ'}}` with `a` the smallest generator.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GammaPartition {
    pub generator: FieldElement,
    pub cells: Vec<Vec<Vec<FieldElement>>>,
}

pub fn gamma_partition(spec: &ProblemSpec, x: &[FieldElement]) -> Result<GammaPartition> {
    let g = gamma_setting(spec)?;
    let field = spec.field();
    if x.len() != spec.n() {
        return Err(Error::LengthMismatch {
            expected: spec.n(),
            got: x.len(),
        });
    }
    let x = check_distinct(field, x)?;
    let a = primitive_root(field);
    let roots: Vec<FieldElement> = (1..=g.kappa_half).map(|l| field.pow(a, l * g.power)).collect();
    let mut cells = vec![Vec::new(); g.kappa_half as usize + 1];
    for t in grid(field.p(), spec.k()) {
        let v = phi_at(field, &g, &t, &x);
        let cell = if v == 0 {
            0
        } else {
            let u = field.pow(v, g.power);
            1 + roots.iter().position(|&r| r == u).expect("u is a κ'-th root of unity")
        };
        cells[cell].push(t);
    }
    Ok(GammaPartition { generator: a, cells })
}

fn permutations(k: usize) -> Vec<(Vec<usize>, bool)> {
    fn rec(cur: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<(Vec<usize>, bool)>) {
        if cur.len() == used.len() {
            let inversions = (0..cur.len())
                .flat_map(|i| (i + 1..cur.len()).map(move |j| (i, j)))
                .filter(|&(i, j)| cur[i] > cur[j])
                .count();
            out.push((cur.clone(), inversions % 2 == 0));
            return;
        }
        for v in 0..used.len() {
            if !used[v] {
                used[v] = true;
                cur.push(v);
                rec(cur, used, out);
                cur.pop();
                used[v] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; k], &mut out);
    out
}

impl GammaPartition {
    fn cell_of(&self, t: &[FieldElement]) -> usize {
        self.cells
            .iter()
            .position(|c| c.iter().any(|pt| pt.as_slice() == t))
            .expect("cells cover the grid")
    }

    /// Even permutations of the t-coordinates fix every cell; every permutation maps cells onto cells.
    pub fn check_symmetry(&self) -> CheckReport {
        let k = self.cells.iter().flatten().next().map_or(0, |t| t.len());
        for (perm, even) in permutations(k) {
            for (l, cell) in self.cells.iter().enumerate() {
                let images: std::collections::BTreeSet<usize> = cell
                    .iter()
                    .map(|t| {
                        let moved: Vec<_> = perm.iter().map(|&i| t[i]).collect();
                        self.cell_of(&moved)
                    })
                    .collect();
                let fixed = images.len() <= 1 && images.iter().all(|&c| c == l);
                if images.len() > 1 || (even && !fixed) {
                    return CheckReport::fail(
                        "gamma-symmetry",
                        Witness {
                            equation: format!("permutation {perm:?} on cell {l}"),
                            coordinate: None,
                            residual: None,
                            detail: Some(format!("image cells {images:?}")),
                        },
                    );
                }
            }
        }
        CheckReport::pass("gamma-symmetry")
    }
}

/// `W_J(t, x) Π_{i<j} (t_i - t_j)` at a point where no `t_i` meets an `x_s`.
fn weight_times_vandermonde(field: PrimeField, j: &MultiIndex, t: &[FieldElement], x: &[FieldElement]) -> FieldElement {
    let mut w = 0;
    for sigma in crate::construct::assignments(j) {
        let mut term = 1;
        for (i, &s) in sigma.iter().enumerate() {
            term = field.mul(term, field.inv(field.sub(t[i], x[s])).expect("t off the branch points"));
        }
        w = field.add(w, term);
    }
    for a in 0..t.len() {
        for b in a + 1..t.len() {
            w = field.mul(w, field.sub(t[a], t[b]));
        }
    }
    w
}

/// `∫_{F_p^k} Φ W_J = P(x) Σ_{ℓ=1}^{κ'/2} 2 a^{ℓ(p-1)/κ'} ∫_{γ_ℓ} W_J Π(t_i - t_j)` for every `J`,
/// the left side summed directly over the grid.
pub fn check_gamma_decomposition(spec: &ProblemSpec, x: &[FieldElement]) -> Result<CheckReport> {
    let g = gamma_setting(spec)?;
    let exps = gamma_exponents(spec)?;
    let part = gamma_partition(spec, x)?;
    let field = spec.field();
    let x = check_distinct(field, x)?;
    let pre = crate::construct::z_prefactor(spec, &exps, spec.z_ambient())?.eval(&[], &x)?;
    for j in spec.weights().basis() {
        let direct = integrate_grid(&master_times_weight_at(spec, &exps, &j, &x)?)?;
        let mut acc = 0;
        for l in 1..=g.kappa_half / 2 {
            let cell_sum = part.cells[l as usize]
                .iter()
                .fold(0, |s, t| field.add(s, weight_times_vandermonde(field, &j, t, &x)));
            let coeff = field.mul(2, field.pow(part.generator, l * g.power));
            acc = field.add(acc, field.mul(coeff, cell_sum));
        }
        let rhs = field.mul(pre, acc);
        if direct != rhs {
            return Ok(CheckReport::fail(
                "gamma-decomposition",
                Witness {
                    equation: format!("x = {x:?}"),
                    coordinate: Some(j.0),
                    residual: None,
                    detail: Some(format!("grid sum {direct}, cell sum {rhs}")),
                },
            ));
        }
    }
    Ok(CheckReport::pass("gamma-decomposition"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::Kappa;
    use crate::ffpoly::{Ambient, Monomial};

    fn f(p: u64) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    fn spec(p: u64, kappa: &str, m: &[u32], k: u32) -> ProblemSpec {
        let k_us = k as usize;
        ProblemSpec::new(p, kappa.parse::<Kappa>().unwrap(), m.to_vec(), k, &vec![0; k_us], &vec![1; k_us]).unwrap()
    }

    #[test]
    fn power_sums() {
        assert_eq!(power_sum(f(5), 4), 4);
        assert_eq!(power_sum(f(5), 2), 0);
        assert_eq!(power_sum(f(5), 0), 0);
        assert_eq!(power_sum(f(5), 8), 4);
    }

    #[test]
    fn integrals_of_monomials() {
        let amb = Ambient::new(7, 2, 0).unwrap();
        let one = SparsePoly::one(amb);
        assert_eq!(integrate_fpk(&one).unwrap(), 0);
        let t = SparsePoly::from_terms(amb, [(Monomial::new(&[6, 6], &[]), 1)]).unwrap();
        assert_eq!(integrate_fpk(&t).unwrap(), 1);
        assert_eq!(integrate_grid(&t).unwrap(), 1);
        let amb1 = Ambient::new(7, 1, 0).unwrap();
        let t1 = SparsePoly::from_terms(amb1, [(Monomial::new(&[6], &[]), 1)]).unwrap();
        assert_eq!(integrate_fpk(&t1).unwrap(), 6);
    }

    #[test]
    fn rejects_unevaluated_z() {
        let amb = Ambient::new(5, 1, 2).unwrap();
        let z = SparsePoly::var(amb, crate::ffpoly::Var::Z(1)).unwrap();
        assert!(matches!(integrate_fpk(&z), Err(Error::UnevaluatedZ(2))));
        assert!(matches!(integrate_grid(&z), Err(Error::UnevaluatedZ(2))));
    }

    #[test]
    fn primitive_roots() {
        assert_eq!(primitive_root(f(3)), 2);
        assert_eq!(primitive_root(f(5)), 2);
        assert_eq!(primitive_root(f(7)), 3);
        assert_eq!(primitive_root(f(13)), 2);
        assert_eq!(primitive_root(f(23)), 5);
    }

    #[test]
    fn integral_theorem_small() {
        let s = spec(5, "2", &[1, 1, 1], 1);
        let e = exponent_data(&s, None).unwrap();
        assert_eq!(weight_product_degree(&s, &e), 5);
        assert!(check_integral_theorem(&s, &e, &[0, 1, 3]).unwrap().passed);
        assert!(matches!(check_integral_theorem(&s, &e, &[0, 1, 1]), Err(Error::CoincidentPoints(_))));
    }

    #[test]
    fn integral_theorem_degree_gate() {
        // M_s = M0 = 2 for κ = 4 at p = 3: degree 2 + 6 - 1 = 7 ≥ 4
        let s = spec(3, "4", &[1, 1, 1], 2);
        let e = exponent_data(&s, None).unwrap();
        assert!(matches!(check_integral_theorem(&s, &e, &[0, 1, 2]), Err(Error::Inapplicable(_))));
    }

    #[test]
    fn gamma_cells() {
        let s = spec(7, "4", &[2, 2], 2);
        let e = gamma_exponents(&s).unwrap();
        assert_eq!((e.ms.clone(), e.m0), (vec![3, 3], 4));
        let part = gamma_partition(&s, &[1, 4]).unwrap();
        assert_eq!(part.generator, 3);
        assert_eq!(part.cells.iter().map(Vec::len).sum::<usize>(), 49);
        assert!(part.check_symmetry().passed);
        assert!(check_gamma_decomposition(&s, &[1, 4]).unwrap().passed);
    }

    #[test]
    fn gamma_hypotheses() {
        assert!(gamma_setting(&spec(7, "4", &[2, 1], 2)).is_err());
        assert!(gamma_setting(&spec(5, "4", &[2, 2], 2)).is_err());
        assert!(gamma_setting(&spec(7, "6", &[2, 2], 2)).is_err());
        assert!(gamma_setting(&spec(7, "4", &[2, 2], 1)).is_err());
    }
}
