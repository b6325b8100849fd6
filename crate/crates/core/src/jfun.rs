//! Descendant Gromov–Witten invariants of the twistor space and
//! J-function coefficients of the twistor space and of `ℂPᴺ`.
//!
//! Invariants are computed in a 16-dimensional model ring with basis
//! `α^k·Y`, `k = 0..3`, `Y ∈ {1, y, ŷ, V}` where `V = Vol_M`, `y` and `ŷ` are a
//! dual pair of classes pulled back from `M` (`∫_M y ŷ = 1`, `yŷ = V`), and
//! `α⁴ = −8χ·αV`. The recursion combines the string equation, the divisor
//! equation for `α` and the topological recursion relation, and is
//! well-founded on `(d, ψ-power)`.

use std::collections::HashMap;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::cohmodel::{CohomClass, SpaceId, SpaceModel};
use crate::exactcore::{factorial, int, ExactMatrix, Rational};
use crate::mzv::{sym_sum, SymSumIndex};
use crate::{Error, Result};

const DIM: usize = 16;
/// Complex degrees of `1, y, ŷ, V`.
const Y_DEG: [i64; 4] = [0, 1, 2, 3];
const ALPHA: usize = 1;
const TOP: usize = 3 + 4 * 3;

/// The `M`-factor of an insertion `α^k·Y`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Fiber {
    One,
    Y,
    YDual,
    Vol,
}

impl Fiber {
    fn index(self) -> usize {
        match self {
            Fiber::One => 0,
            Fiber::Y => 1,
            Fiber::YDual => 2,
            Fiber::Vol => 3,
        }
    }
}

/// Insertion `α^k·Y` with `k ≤ 3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Insertion {
    pub k: u8,
    pub fiber: Fiber,
}

impl Insertion {
    pub fn alpha(k: u8) -> Self {
        Insertion { k, fiber: Fiber::One }
    }

    pub fn alpha_vol(k: u8) -> Self {
        Insertion { k, fiber: Fiber::Vol }
    }

    fn index(self) -> usize {
        self.k as usize + 4 * self.fiber.index()
    }

    /// Complex degree.
    pub fn degree(self) -> i64 {
        self.k as i64 + Y_DEG[self.fiber.index()]
    }
}

/// One- or two-point descendant invariant `⟨ψ^a γ⟩_d` or `⟨ψ^a γ, β⟩_d`; the
/// ψ-power `a` is forced by the degree axiom.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct DescendantKey {
    pub d: u32,
    pub first: Insertion,
    pub second: Option<Insertion>,
}

impl DescendantKey {
    pub fn one(d: u32, first: Insertion) -> Self {
        DescendantKey { d, first, second: None }
    }

    pub fn two(d: u32, first: Insertion, second: Insertion) -> Self {
        DescendantKey {
            d,
            first,
            second: Some(second),
        }
    }

    /// ψ-power from `a + Σ deg = 2d + 3 + n` (complex dimension 6, `c₁·A = 2`).
    pub fn psi_power(&self) -> i64 {
        match self.second {
            None => 2 * self.d as i64 + 4 - self.first.degree(),
            Some(b) => 2 * self.d as i64 + 5 - self.first.degree() - b.degree(),
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = |i: Insertion| i.k <= 3;
        if ok(self.first) && self.second.is_none_or(ok) {
            Ok(())
        } else {
            Err(Error::UnreachableKey(format!("{self:?}: α-power above 3")))
        }
    }
}

/// Internal memo key: degree, first basis index, optional second index.
type Key = (u32, usize, Option<usize>);

/// How a stored value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Rule {
    Seed,
    Vanishing,
    String,
    Divisor,
    TopologicalRecursion,
}

#[derive(Debug, Clone)]
pub struct Derivation {
    pub rule: Rule,
    pub deps: Vec<(u32, usize, Option<usize>)>,
}

/// Memoised recursion engine at a fixed rational value of `χ`.
#[derive(Debug, Clone)]
pub struct DescendantTable {
    chi: Rational,
    /// `prod[i][j]` as sparse `(k, c)` pairs.
    prod: Vec<Vec<Vec<(usize, Rational)>>>,
    gram_inv: ExactMatrix<Rational>,
    memo: HashMap<Key, Rational>,
    derivations: HashMap<Key, Derivation>,
    depth: usize,
}

fn degree_of(i: usize) -> i64 {
    (i % 4) as i64 + Y_DEG[i / 4]
}

impl DescendantTable {
    pub fn new(chi: Rational) -> Self {
        let mut prod = vec![vec![Vec::new(); DIM]; DIM];
        for i in 0..DIM {
            for j in 0..DIM {
                let k = i % 4 + j % 4;
                let y = match (i / 4, j / 4) {
                    (0, y) | (y, 0) => Some(y),
                    (1, 2) | (2, 1) => Some(3),
                    _ => None,
                };
                prod[i][j] = match y {
                    None => Vec::new(),
                    Some(y) if k <= 3 => vec![(k + 4 * y, int(1))],
                    Some(0) => vec![(k - 3 + 12, &chi * int(-8))],
                    Some(_) => Vec::new(),
                };
            }
        }
        let mut t = DescendantTable {
            chi,
            prod,
            gram_inv: ExactMatrix::zeros(DIM, DIM),
            memo: HashMap::new(),
            derivations: HashMap::new(),
            depth: 0,
        };
        let mut g = ExactMatrix::zeros(DIM, DIM);
        for i in 0..DIM {
            for j in 0..DIM {
                g.set(i, j, t.integral(&t.prod[i][j]));
            }
        }
        let mut inv = ExactMatrix::zeros(DIM, DIM);
        for c in 0..DIM {
            let mut e = vec![int(0); DIM];
            e[c] = int(1);
            let col = g.solve_linear(&e).expect("nondegenerate pairing");
            for (r, v) in col.into_iter().enumerate() {
                inv.set(r, c, v);
            }
        }
        t.gram_inv = inv;
        t
    }

    pub fn chi(&self) -> &Rational {
        &self.chi
    }

    /// `∫_Z` of a sparse class: only `α³V` integrates, to 8.
    fn integral(&self, v: &[(usize, Rational)]) -> Rational {
        v.iter()
            .filter(|(k, _)| *k == TOP)
            .fold(Rational::zero(), |acc, (_, c)| acc + c * int(8))
    }

    fn times(&self, v: &[(usize, Rational)], j: usize) -> Vec<(usize, Rational)> {
        let mut out: Vec<(usize, Rational)> = Vec::new();
        for (i, c) in v {
            for (k, p) in &self.prod[*i][j] {
                match out.iter_mut().find(|(kk, _)| kk == k) {
                    Some(e) => e.1 += c * p,
                    None => out.push((*k, c * p)),
                }
            }
        }
        out.retain(|(_, c)| !c.is_zero());
        out
    }

    /// Evaluates a descendant invariant.
    pub fn invariant(&mut self, key: &DescendantKey) -> Result<Rational> {
        key.validate()?;
        let i = key.first.index();
        Ok(match key.second {
            None => self.one_point(key.d, i)?,
            Some(b) => self.two_point(key.d, i, b.index())?,
        })
    }

    pub fn derivation(&self, key: &DescendantKey) -> Option<&Derivation> {
        let k = (key.d, key.first.index(), key.second.map(Insertion::index));
        self.derivations.get(&k)
    }

    pub fn len(&self) -> usize {
        self.memo.len()
    }

    pub fn is_empty(&self) -> bool {
        self.memo.is_empty()
    }

    fn store(&mut self, key: Key, v: Rational, rule: Rule, deps: Vec<Key>) -> Rational {
        self.memo.insert(key, v.clone());
        self.derivations.insert(key, Derivation { rule, deps });
        v
    }

    fn enter(&mut self, key: Key) -> Result<()> {
        self.depth += 1;
        if self.depth > 100_000 {
            return Err(Error::UnreachableKey(format!("{key:?}: recursion did not terminate")));
        }
        Ok(())
    }

    /// `⟨γ, β⟩₁` for basis elements, the only nonzero primary two-point invariants.
    fn seed_two(&self, g: usize, b: usize) -> Rational {
        let (kg, yg, kb, yb) = (g % 4, g / 4, b % 4, b / 4);
        let pair = matches!((kg, kb), (1, 3) | (3, 1));
        let dual = matches!((yg, yb), (0, 3) | (3, 0) | (1, 2) | (2, 1));
        if pair && dual {
            int(16)
        } else {
            int(0)
        }
    }

    fn one_point(&mut self, d: u32, g: usize) -> Result<Rational> {
        let key = (d, g, None);
        if let Some(v) = self.memo.get(&key) {
            return Ok(v.clone());
        }
        let a = 2 * d as i64 + 4 - degree_of(g);
        if a < 0 || d == 0 {
            return Ok(self.store(key, int(0), Rule::Vanishing, vec![]));
        }
        if a == 0 {
            let v = if d == 1 && g == TOP { int(8) } else { int(0) };
            let rule = if v.is_zero() { Rule::Vanishing } else { Rule::Seed };
            return Ok(self.store(key, v, rule, vec![]));
        }
        self.enter(key)?;
        // ⟨ψ^aγ, α⟩_d = ⟨ψ^{a−1}(γα)⟩_d + 2d⟨ψ^aγ⟩_d
        let with_alpha = self.two_point(d, g, ALPHA)?;
        let mut deps = vec![(d, g, Some(ALPHA))];
        let mut lower = int(0);
        for (k, c) in self.prod[g][ALPHA].clone() {
            lower += c * self.one_point(d, k)?;
            deps.push((d, k, None));
        }
        self.depth -= 1;
        let v = (with_alpha - lower) / int(2 * d as i64);
        Ok(self.store(key, v, Rule::Divisor, deps))
    }

    fn two_point(&mut self, d: u32, g: usize, b: usize) -> Result<Rational> {
        let key = (d, g, Some(b));
        if let Some(v) = self.memo.get(&key) {
            return Ok(v.clone());
        }
        let a = 2 * d as i64 + 5 - degree_of(g) - degree_of(b);
        if a < 0 || d == 0 {
            return Ok(self.store(key, int(0), Rule::Vanishing, vec![]));
        }
        if a == 0 {
            let v = if d == 1 { self.seed_two(g, b) } else { int(0) };
            let rule = if v.is_zero() { Rule::Vanishing } else { Rule::Seed };
            return Ok(self.store(key, v, rule, vec![]));
        }
        self.enter(key)?;
        if b == 0 {
            // String equation: ⟨ψ^aγ, 1⟩_d = ⟨ψ^{a−1}γ⟩_d
            let v = self.one_point_lowered(d, g, a - 1)?;
            self.depth -= 1;
            return Ok(self.store(key, v, Rule::String, vec![(d, g, None)]));
        }
        // TRR with the ψ on γ and the other points β, α; divisor equation for α:
        // 2d⟨ψ^aγ,β⟩_d = Σ⟨ψ^{a−1}γ,e_m⟩_d g^{mn}∫e_nβα
        //              + Σ⟨ψ^{a−1}γ,e_m⟩_{d−1} g^{mn}·2⟨e_n,β⟩₁ − ⟨ψ^{a−1}(γα),β⟩_d
        let ba = self.prod[b][ALPHA].clone();
        let mut w0 = vec![int(0); DIM];
        let mut w1 = vec![int(0); DIM];
        for n in 0..DIM {
            let c0 = self.integral(&self.times(&ba, n));
            let c1 = self.seed_two(n, b) * int(2);
            if c0.is_zero() && c1.is_zero() {
                continue;
            }
            for m in 0..DIM {
                let gmn = self.gram_inv.get(m, n);
                if gmn.is_zero() {
                    continue;
                }
                w0[m] += gmn * &c0;
                w1[m] += gmn * &c1;
            }
        }
        let mut deps = Vec::new();
        let mut total = int(0);
        for m in 0..DIM {
            if !w0[m].is_zero() {
                total += &w0[m] * self.two_point_lowered(d, g, m, a - 1)?;
                deps.push((d, g, Some(m)));
            }
            if !w1[m].is_zero() && d >= 2 {
                total += &w1[m] * self.two_point_lowered(d - 1, g, m, a - 1)?;
                deps.push((d - 1, g, Some(m)));
            }
        }
        for (k, c) in self.prod[g][ALPHA].clone() {
            total -= c * self.two_point_lowered(d, k, b, a - 1)?;
            deps.push((d, k, Some(b)));
        }
        self.depth -= 1;
        let v = total / int(2 * d as i64);
        Ok(self.store(key, v, Rule::TopologicalRecursion, deps))
    }

    /// One-point invariant whose ψ-power must equal `a` (zero otherwise).
    fn one_point_lowered(&mut self, d: u32, g: usize, a: i64) -> Result<Rational> {
        if 2 * d as i64 + 4 - degree_of(g) != a {
            return Ok(int(0));
        }
        self.one_point(d, g)
    }

    /// Two-point invariant whose ψ-power must equal `a` (zero otherwise).
    fn two_point_lowered(&mut self, d: u32, g: usize, b: usize, a: i64) -> Result<Rational> {
        if 2 * d as i64 + 5 - degree_of(g) - degree_of(b) != a {
            return Ok(int(0));
        }
        self.two_point(d, g, b)
    }
}

/// Descendant invariant at `χ = 1`; for the `χ`-bearing families this is the
/// coefficient of `χ`.
pub fn desc_invariant(key: &DescendantKey) -> Result<Rational> {
    DescendantTable::new(int(1)).invariant(key)
}

/// Value of a printed closed form: `value·χ` if `chi_flag`, else `value`.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosedFormValue {
    pub value: Rational,
    pub chi_flag: bool,
}

fn s(d: u64, comp: &[u32]) -> Rational {
    sym_sum(d, &SymSumIndex::new(comp))
}

fn inv_dfact2(d: u64) -> Rational {
    let f = factorial(d);
    Rational::new(num_bigint::BigInt::one(), &f * &f)
}

/// The eight one-point families `⟨ψ^{2d+1−k} α^k Vol_M⟩_d` and
/// `⟨ψ^{2d+4−k} α^k⟩_d` in closed form through weak symmetric sums.
pub fn desc_closed_form(key: &DescendantKey) -> Result<ClosedFormValue> {
    let outside = || Error::Unsupported(format!("{key:?} is not one of the closed-form families"));
    if key.second.is_some() || key.d == 0 || key.first.k > 3 {
        return Err(outside());
    }
    let d = key.d as u64;
    let pre = inv_dfact2(d);
    let combo = |terms: &[(i64, &[u32])]| -> Rational {
        terms.iter().fold(int(0), |acc, (c, comp)| acc + int(*c) * s(d, comp))
    };
    let (value, chi_flag) = match (key.first.fiber, key.first.k) {
        (Fiber::Vol, 3) => (int(8), false),
        (Fiber::Vol, 2) => (combo(&[(-8, &[1])]), false),
        (Fiber::Vol, 1) => (combo(&[(8, &[1, 1])]), false),
        (Fiber::Vol, 0) => (combo(&[(-8, &[1, 1, 1])]), false),
        (Fiber::One, 3) => (combo(&[(-8, &[2, 1]), (64, &[1, 1, 1])]), true),
        (Fiber::One, 2) => (combo(&[(8, &[1, 2, 1]), (16, &[2, 1, 1]), (-64, &[1, 1, 1, 1])]), true),
        (Fiber::One, 1) => (
            combo(&[
                (4, &[2, 2, 1]),
                (-24, &[2, 1, 1, 1]),
                (-16, &[1, 2, 1, 1]),
                (-8, &[1, 1, 2, 1]),
                (64, &[1, 1, 1, 1, 1]),
            ]),
            true,
        ),
        (Fiber::One, 0) => (
            combo(&[
                (-8, &[2, 2, 1, 1]),
                (-4, &[2, 1, 2, 1]),
                (-4, &[1, 2, 2, 1]),
                (8, &[1, 1, 1, 2, 1]),
                (16, &[1, 1, 2, 1, 1]),
                (24, &[1, 2, 1, 1, 1]),
                (32, &[2, 1, 1, 1, 1]),
                (-64, &[1, 1, 1, 1, 1, 1]),
            ]),
            true,
        ),
        _ => return Err(outside()),
    };
    Ok(ClosedFormValue {
        value: value * pre,
        chi_flag,
    })
}

/// All eight closed-form keys at degree `d`.
pub fn closed_form_keys(d: u32) -> Vec<DescendantKey> {
    (0..4u8)
        .map(|k| DescendantKey::one(d, Insertion::alpha_vol(k)))
        .chain((0..4u8).map(|k| DescendantKey::one(d, Insertion::alpha(k))))
        .collect()
}

/// Coefficient `J_{rn}` of the J-function with `e^{c₁ log t}` stripped.
#[derive(Debug, Clone, PartialEq)]
pub struct JCoefficient {
    pub space: SpaceId,
    pub n: u64,
    pub raw: CohomClass<Rational>,
    pub normalized: CohomClass<Rational>,
}

/// J-function coefficient of index `n` (the coefficient of `t^{rn}`).
pub fn j_coeff(space: SpaceId, n: u64) -> Result<JCoefficient> {
    match space {
        SpaceId::Cpn(big_n) => Ok(cpn_j_coeff(big_n, n)),
        SpaceId::Twistor => twistor_j_coeff(n, &int(1), &mut DescendantTable::new(int(1))),
    }
}

fn normalize(raw: CohomClass<Rational>, space: SpaceId, n: u64) -> JCoefficient {
    let p = raw.coeffs[0].clone();
    let normalized = raw.scale(&(Rational::one() / p));
    JCoefficient {
        space,
        n,
        raw,
        normalized,
    }
}

/// `Π_{k=1..n} (h + k)^{−(N+1)}` in `Q[h]/(h^{N+1})`.
fn cpn_j_coeff(big_n: u32, n: u64) -> JCoefficient {
    let model = SpaceModel::cpn(big_n);
    let dim = model.dim();
    let mut acc = model.unit::<Rational>();
    for k in 1..=n {
        // (h + k)^{−1} = Σ_j (−1)^j h^j / k^{j+1}
        let kk = int(k as i64);
        let mut inv = vec![int(0); dim];
        let mut c = Rational::one() / &kk;
        for slot in inv.iter_mut() {
            *slot = c.clone();
            c = -c / &kk;
        }
        let inv = CohomClass::from_rationals(&inv);
        for _ in 0..=big_n {
            acc = model.mul(&acc, &inv);
        }
    }
    normalize(acc, SpaceId::Cpn(big_n), n)
}

/// Twistor J-coefficient assembled from descendants at a given `χ`, expressed
/// in the basis `(1, α, α², α³, χ, αχ, α²χ, α³χ)` with `χ = τ*χ`.
pub fn twistor_j_coeff(d: u64, chi: &Rational, table: &mut DescendantTable) -> Result<JCoefficient> {
    if d == 0 {
        let raw = SpaceModel::twistor().unit::<Rational>();
        return Ok(normalize(raw, SpaceId::Twistor, 0));
    }
    assert_eq!(table.chi(), chi, "table built for a different χ");
    assert!(!chi.is_zero(), "χ must be nonzero to change basis");
    let dd = d as u32;
    let eighth = Rational::new(1.into(), 8.into());
    // Coefficients on (α^a, α^a V), a = 0..3.
    let mut alpha_part = vec![int(0); 4];
    let mut vol_part = vec![int(0); 4];
    for a in 0..4u8 {
        // Dual of α^a is α^{3−a}V/8.
        let v = table.invariant(&DescendantKey::one(dd, Insertion::alpha(a)))?;
        vol_part[3 - a as usize] += &v * &eighth;
        // Dual of α^aV is α^{3−a}/8, plus χV for a = 0.
        let w = table.invariant(&DescendantKey::one(dd, Insertion::alpha_vol(a)))?;
        alpha_part[3 - a as usize] += &w * &eighth;
        if a == 0 {
            vol_part[0] += &w * chi;
        }
    }
    // Classes with a y-factor have vanishing one-point descendants.
    for k in 0..4u8 {
        for fiber in [Fiber::Y, Fiber::YDual] {
            let v = table.invariant(&DescendantKey::one(dd, Insertion { k, fiber }))?;
            if !v.is_zero() {
                return Err(Error::UnreachableKey(format!(
                    "nonzero y-class descendant at d = {d}, k = {k}"
                )));
            }
        }
    }
    // α^a V = α^a τ*χ / χ.
    let coeffs: Vec<Rational> = alpha_part
        .into_iter()
        .chain(vol_part.into_iter().map(|v| v / chi))
        .collect();
    Ok(normalize(CohomClass::from_rationals(&coeffs), SpaceId::Twistor, d))
}

/// Normalised twistor J-coefficient written directly through weak sums `S_d`.
pub fn twistor_j_formula(d: u64) -> CohomClass<Rational> {
    let sd = |comp: &[u32]| s(d, comp);
    let h = int(1) / int(2);
    let c = vec![
        int(1),
        -sd(&[1]),
        sd(&[1, 1]),
        -sd(&[1, 1, 1]),
        -sd(&[2, 1]),
        -(int(8) * sd(&[1, 1, 1, 1]) - sd(&[1, 2, 1]) - int(2) * sd(&[2, 1, 1])),
        -(int(3) * sd(&[2, 1, 1, 1]) + int(2) * sd(&[1, 2, 1, 1]) + sd(&[1, 1, 2, 1])
            - &h * sd(&[2, 2, 1])
            - int(8) * sd(&[1, 1, 1, 1, 1])),
        -(sd(&[2, 2, 1, 1]) + &h * sd(&[2, 1, 2, 1]) + &h * sd(&[1, 2, 2, 1])
            - sd(&[1, 1, 1, 2, 1])
            - int(2) * sd(&[1, 1, 2, 1, 1])
            - int(3) * sd(&[1, 2, 1, 1, 1])
            - int(4) * sd(&[2, 1, 1, 1, 1])
            + int(8) * sd(&[1, 1, 1, 1, 1, 1])),
    ];
    CohomClass::from_rationals(&c)
}

/// Coefficient of `t^{rn}` in the quantum period `⟨J(t), pt⟩`.
pub fn quantum_period(space: SpaceId, n: u64) -> Rational {
    let f = Rational::from_integer(factorial(n));
    let e = match space {
        SpaceId::Cpn(big_n) => big_n + 1,
        SpaceId::Twistor => 2,
    };
    Rational::one() / num_traits::pow(f, e as usize)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactcore::rat;

    #[test]
    fn seeds_and_examples() {
        let v = |k: DescendantKey| desc_invariant(&k).unwrap();
        assert_eq!(v(DescendantKey::one(1, Insertion::alpha_vol(3))), int(8));
        assert_eq!(v(DescendantKey::one(2, Insertion::alpha_vol(3))), int(8) / int(4));
        assert_eq!(v(DescendantKey::one(2, Insertion::alpha_vol(2))), int(-3));
        assert_eq!(v(DescendantKey::one(1, Insertion::alpha(3))), int(56));
        for k in 0..4 {
            for fiber in [Fiber::Y, Fiber::YDual] {
                assert_eq!(v(DescendantKey::one(3, Insertion { k, fiber })), int(0));
            }
        }
        assert_eq!(
            v(DescendantKey::two(1, Insertion::alpha_vol(3), Insertion::alpha(1))),
            int(16)
        );
    }

    #[test]
    fn closed_forms_match_recursion_small_d() {
        for chi in [int(1), int(-2), int(-13)] {
            let mut t = DescendantTable::new(chi.clone());
            for d in 1..=4 {
                for key in closed_form_keys(d) {
                    let cf = desc_closed_form(&key).unwrap();
                    let expect = if cf.chi_flag { cf.value * &chi } else { cf.value };
                    assert_eq!(t.invariant(&key).unwrap(), expect, "{key:?} at χ = {chi}");
                }
            }
        }
        let k = DescendantKey::one(3, Insertion::alpha_vol(2));
        assert_eq!(desc_closed_form(&k).unwrap().value, rat(-11, 27));
        let k = DescendantKey::one(4, Insertion::alpha_vol(3));
        assert_eq!(desc_closed_form(&k).unwrap().value, rat(8, 576));
    }

    #[test]
    fn derivations_are_recorded() {
        let mut t = DescendantTable::new(int(1));
        let key = DescendantKey::one(2, Insertion::alpha(1));
        t.invariant(&key).unwrap();
        let der = t.derivation(&key).unwrap();
        assert_eq!(der.rule, Rule::Divisor);
        for dep in &der.deps {
            assert!(t.memo.contains_key(dep));
        }
    }

    #[test]
    fn twistor_j_at_degree_one() {
        let j = j_coeff(SpaceId::Twistor, 1).unwrap();
        let expect = vec![
            int(1),
            int(-1),
            int(1),
            int(-1),
            int(-1),
            int(-5),
            rat(5, 2),
            int(0),
        ];
        assert_eq!(j.normalized.coeffs, expect);
        assert_eq!(twistor_j_formula(1).coeffs, expect);
        assert_eq!(j.raw.coeffs[0], int(1));
        assert_eq!(j_coeff(SpaceId::Twistor, 0).unwrap().normalized.coeffs[0], int(1));
    }

    #[test]
    fn cpn_coefficients() {
        let j = j_coeff(SpaceId::Cpn(1), 1).unwrap();
        assert_eq!(j.raw.coeffs, vec![int(1), int(-2)]);
        assert_eq!(quantum_period(SpaceId::Twistor, 3), rat(1, 36));
        assert_eq!(quantum_period(SpaceId::Cpn(2), 2), rat(1, 8));
        assert_eq!(quantum_period(SpaceId::Cpn(5), 0), int(1));
    }

    #[test]
    fn assembled_j_matches_formula_for_every_chi() {
        for chi in [int(1), int(-2), int(-13)] {
            let mut t = DescendantTable::new(chi.clone());
            for d in 1..=6 {
                let j = twistor_j_coeff(d, &chi, &mut t).unwrap();
                assert_eq!(j.normalized, twistor_j_formula(d), "d = {d}, χ = {chi}");
                assert_eq!(j.raw.coeffs[0], quantum_period(SpaceId::Twistor, d));
            }
        }
    }

    #[test]
    fn two_point_ladders() {
        let mut t = DescendantTable::new(int(1));
        for d in 1..=7u32 {
            let f = inv_dfact2(d as u64);
            let av = Insertion::alpha_vol(1);
            let vol = Insertion::alpha_vol(3);
            assert_eq!(t.invariant(&DescendantKey::two(d, av, Insertion::alpha(2))).unwrap(), int(8) * &f);
            assert_eq!(
                t.invariant(&DescendantKey::two(d, av, Insertion::alpha(3))).unwrap(),
                int(16 * d as i64) * &f
            );
            if d >= 2 {
                assert_eq!(t.invariant(&DescendantKey::two(d, vol, Insertion::alpha(2))).unwrap(), int(0));
                assert_eq!(t.invariant(&DescendantKey::two(d, vol, Insertion::alpha(3))).unwrap(), int(0));
            }
        }
    }

    #[test]
    fn cpn_normalized_is_loop_euler_class() {
        for big_n in 1..=4 {
            let model = SpaceModel::cpn(big_n);
            for n in 0..=6 {
                let j = j_coeff(SpaceId::Cpn(big_n), n).unwrap();
                assert_eq!(j.normalized, model.loop_euler_class(n));
                assert_eq!(j.raw.coeffs[0], quantum_period(SpaceId::Cpn(big_n), n));
            }
        }
    }
}
