//! Apéry-limit checks of Gamma Conjecture 1: the sequences `R_{i,n}`, the
//! polynomials `hᵢ`, limit estimates and verdict tables.
//!
//! `R_{i,n}` is the degree-`2i` part of `e^{c₁ log n} Ĵ_n` minus
//! `hᵢ(R_{1,n}, …, R_{i−1,n})`, where `Ĵ_n` is the normalised J-coefficient.
//! Three routes are available: symbolic in partial zeta symbols (with
//! `log n = 0`, which only affects `R₁`), exact at a given `n`, and `BigReal`
//! for large `n`.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::cohmodel::{CohomClass, Scalar, SpaceId, SpaceModel};
use crate::exactcore::{factorial, int, rat, BigReal, Rational};
use crate::jfun::j_coeff;
use crate::mzv::{stuffle_expand, MzvCombination, MzvIndex, SumKind, SymSumIndex, ZetaScan};

/// Weight-`i` part of `exp(x₁ + … + x_{i−1})`, with `x_j` of weight `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct HPolynomial {
    pub i: u32,
    /// Exponent vector `(e₁, …, e_{i−1})` to coefficient `Π 1/e_j!`.
    pub terms: BTreeMap<Vec<u32>, Rational>,
}

pub fn h_poly(i: u32) -> HPolynomial {
    let mut terms = BTreeMap::new();
    if i >= 2 {
        let mut e = vec![0u32; i as usize - 1];
        collect_partitions(i, 1, &mut e, &mut terms);
    }
    HPolynomial { i, terms }
}

/// Enumerates `Σ j·e_j = rest` with parts `j ≥ min_part`, `j < i`.
fn collect_partitions(rest: u32, min_part: u32, e: &mut Vec<u32>, out: &mut BTreeMap<Vec<u32>, Rational>) {
    if rest == 0 {
        let c = e
            .iter()
            .fold(Rational::one(), |acc, &k| acc / Rational::from_integer(factorial(k as u64)));
        out.insert(e.clone(), c);
        return;
    }
    for j in min_part..=(e.len() as u32).min(rest) {
        e[j as usize - 1] += 1;
        collect_partitions(rest - j, j, e, out);
        e[j as usize - 1] -= 1;
    }
}

impl HPolynomial {
    /// Evaluates on classes `xs[j−1] = x_j` with the ring product of `model`.
    pub fn eval<S: Scalar>(&self, model: &SpaceModel, xs: &[CohomClass<S>]) -> CohomClass<S> {
        let mut acc = CohomClass::zero(model.dim());
        for (e, c) in &self.terms {
            let mut m = model.unit::<S>();
            for (j, &k) in e.iter().enumerate() {
                for _ in 0..k {
                    m = model.mul(&m, &xs[j]);
                }
            }
            acc = acc.add(&m.scale(c));
        }
        acc
    }
}

impl fmt::Display for HPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.terms.iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &k)| k > 0)
                .map(|(j, &k)| if k == 1 { format!("x{}", j + 1) } else { format!("x{}^{k}", j + 1) })
                .collect();
            if c.is_one() {
                write!(f, "{}", mono.join("*"))?;
            } else {
                write!(f, "{c}*{}", mono.join("*"))?;
            }
        }
        Ok(())
    }
}

/// `R₀, …, R_top` from a normalised coefficient `x̂` and an optional `log n`.
pub fn r_classes<S: Scalar>(model: &SpaceModel, xhat: &CohomClass<S>, log_n: Option<&S>) -> Vec<CohomClass<S>> {
    let x = match log_n {
        Some(l) => {
            let c1: CohomClass<S> = CohomClass::from_rationals(&model.c1).scale_by(l);
            model.mul(&model.exp(&c1), xhat)
        }
        None => xhat.clone(),
    };
    let top = model.top_degree() / 2;
    let mut rs: Vec<CohomClass<S>> = vec![CohomClass::zero(model.dim())];
    for i in 1..=top {
        let xi = model.component(&x, 2 * i);
        let h = h_poly(i).eval(model, &rs[1..]);
        rs.push(xi.sub(&h));
    }
    rs
}

/// `Ĵ` with every coefficient a combination of partial zeta symbols.
pub fn normalized_j_symbolic(space: SpaceId) -> CohomClass<MzvCombination> {
    let model = SpaceModel::new(space);
    match space {
        SpaceId::Cpn(_) => {
            let zetas: Vec<MzvCombination> = (1..=model.top_degree() / 2).map(|m| MzvCombination::zeta(&[m])).collect();
            model.loop_euler_class_from(&zetas)
        }
        SpaceId::Twistor => twistor_j_symbolic(),
    }
}

/// The twistor `Ĵ` with each weak sum `S(k)` rewritten through strict symbols.
fn twistor_j_symbolic() -> CohomClass<MzvCombination> {
    let s = |comp: &[u32]| stuffle_expand(&SymSumIndex::new(comp));
    let c = |x: i64, comp: &[u32]| s(comp).scale(&int(x));
    let half = |x: i64, comp: &[u32]| s(comp).scale(&rat(x, 2));
    let coeffs = vec![
        MzvCombination::one(),
        c(-1, &[1]),
        c(1, &[1, 1]),
        c(-1, &[1, 1, 1]),
        c(-1, &[2, 1]),
        c(-8, &[1, 1, 1, 1]).add(&s(&[1, 2, 1])).add(&c(2, &[2, 1, 1])),
        c(-3, &[2, 1, 1, 1])
            .add(&c(-2, &[1, 2, 1, 1]))
            .add(&c(-1, &[1, 1, 2, 1]))
            .add(&half(1, &[2, 2, 1]))
            .add(&c(8, &[1, 1, 1, 1, 1])),
        c(-1, &[2, 2, 1, 1])
            .add(&half(-1, &[2, 1, 2, 1]))
            .add(&half(-1, &[1, 2, 2, 1]))
            .add(&s(&[1, 1, 1, 2, 1]))
            .add(&c(2, &[1, 1, 2, 1, 1]))
            .add(&c(3, &[1, 2, 1, 1, 1]))
            .add(&c(4, &[2, 1, 1, 1, 1]))
            .add(&c(-8, &[1, 1, 1, 1, 1, 1])),
    ];
    CohomClass { coeffs }
}

/// Symbolic `R_{i,n}` with `log n = 0`; exact for `i ≥ 2`, and `R₁` is off by
/// `c₁ log n`.
pub fn r_symbolic(space: SpaceId) -> Vec<CohomClass<MzvCombination>> {
    let model = SpaceModel::new(space);
    r_classes(&model, &normalized_j_symbolic(space), None)
}

/// Exact `R_{i,n}` at `log n = 0` from the J-coefficient itself.
pub fn r_exact(space: SpaceId, n: u64) -> Vec<CohomClass<Rational>> {
    let model = SpaceModel::new(space);
    let j = j_coeff(space, n).expect("J coefficient");
    r_classes(&model, &j.normalized, None)
}

/// `R_{i,n}` in `BigReal` at each `n` of an increasing schedule, with
/// `log n` included. Partial zeta symbols are accumulated by one shared scan.
pub fn r_numeric(space: SpaceId, ns: &[u64], crossover: u64, prec: u32) -> Vec<Vec<CohomClass<BigReal>>> {
    assert!(ns.windows(2).all(|w| w[0] < w[1]), "schedule must be increasing");
    let model = SpaceModel::new(space);
    let sym = normalized_j_symbolic(space);
    let comps: Vec<Vec<u32>> = sym
        .coeffs
        .iter()
        .flat_map(|c| c.indices())
        .map(|k| k.0)
        .collect();
    let mut scan = ZetaScan::new(SumKind::Strict, &comps, crossover, prec);
    let mut out = Vec::new();
    for &n in ns {
        scan.advance_to(n);
        let xhat = CohomClass {
            coeffs: sym.coeffs.iter().map(|c| eval_combination(c, &scan, prec)).collect(),
        };
        let l = BigReal::from_i64(n as i64, prec).ln();
        out.push(r_classes(&model, &xhat, Some(&l)));
    }
    out
}

fn eval_combination(c: &MzvCombination, scan: &ZetaScan, prec: u32) -> BigReal {
    c.terms().fold(BigReal::from_i64(0, prec), |acc, (k, v)| {
        let x = if k.0.is_empty() {
            BigReal::from_i64(1, prec)
        } else {
            scan.value(&k.0)
        };
        &acc + &x.mul_rat(v)
    })
}

/// `log Γ` split by degree: the limit of `R_{i,n}`.
pub fn r_targets(space: SpaceId, prec: u32) -> Vec<CohomClass<BigReal>> {
    let model = SpaceModel::new(space);
    let lg = model.log_gamma_class(prec);
    (0..=model.top_degree() / 2).map(|i| model.component(&lg, 2 * i)).collect()
}

/// Allowed deviation for one coefficient at sample size `n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Tolerance {
    Absolute { bound: f64 },
    /// `c·ln(n)^w / n^s`
    Scaled { c: f64, w: u32, s: u32 },
}

impl Tolerance {
    pub fn at(&self, n: u64, prec: u32) -> BigReal {
        match self {
            Tolerance::Absolute { bound } => BigReal::from_f64(*bound, prec),
            Tolerance::Scaled { c, w, s } => {
                let nn = BigReal::from_i64(n as i64, prec);
                let num = &BigReal::from_f64(*c, prec) * &nn.ln().powi(*w as i64);
                num / nn.powi(*s as i64)
            }
        }
    }
}

impl fmt::Display for Tolerance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tolerance::Absolute { bound } => write!(f, "{bound:e}"),
            Tolerance::Scaled { c, w: 0, s } => write!(f, "{c}/n^{s}"),
            Tolerance::Scaled { c, w: 1, s } => write!(f, "{c}·ln(n)/n^{s}"),
            Tolerance::Scaled { c, w, s } => write!(f, "{c}·ln(n)^{w}/n^{s}"),
        }
    }
}

/// Tolerance policy per `(space, i)`; `scale` is the constant `c`.
pub fn default_tolerance(space: SpaceId, i: u32, scale: f64) -> Tolerance {
    match (space, i) {
        (SpaceId::Twistor, 1 | 2) => Tolerance::Absolute { bound: 1e-4 },
        (SpaceId::Twistor, 3 | 4) => Tolerance::Scaled { c: scale, w: 1, s: 2 },
        (SpaceId::Twistor, _) => Tolerance::Scaled { c: scale, w: 2, s: 2 },
        (SpaceId::Cpn(_), _) => Tolerance::Absolute { bound: 1e-3 },
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Extrapolation {
    None,
    Richardson,
}

/// Samples of one coefficient of `R_{i,n}` along a schedule.
#[derive(Debug, Clone)]
pub struct LimitSequence {
    pub i: u32,
    pub label: String,
    pub ns: Vec<u64>,
    pub values: Vec<BigReal>,
    pub target: BigReal,
    pub method: Extrapolation,
}

impl LimitSequence {
    /// Last sample, or one step of `1/n` elimination on the last two.
    pub fn estimate(&self) -> BigReal {
        let k = self.values.len();
        match self.method {
            Extrapolation::Richardson if k >= 2 => {
                let (n1, n2) = (self.ns[k - 2] as i64, self.ns[k - 1] as i64);
                let (v1, v2) = (&self.values[k - 2], &self.values[k - 1]);
                let num = &v2.mul_rat(&int(n2)) - &v1.mul_rat(&int(n1));
                num.mul_rat(&rat(1, n2 - n1))
            }
            _ => self.values[k - 1].clone(),
        }
    }
}

/// One verdict line of a limit report.
#[derive(Debug, Clone, Serialize)]
pub struct LimitRow {
    pub i: u32,
    pub coefficient: String,
    pub n: u64,
    pub estimate: String,
    pub target: String,
    pub deviation: String,
    pub tolerance: String,
    pub tolerance_value: String,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct LimitReport {
    pub space: String,
    pub method: Extrapolation,
    pub rows: Vec<LimitRow>,
    pub notes: Vec<String>,
}

impl LimitReport {
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }
}

/// Verdict table for every nonzero coefficient of `R_{i,n}`, `1 ≤ i ≤ i_max`.
pub fn limit_report(
    space: SpaceId,
    i_max: u32,
    schedule: &[u64],
    method: Extrapolation,
    tolerance_scale: f64,
    crossover: u64,
    prec: u32,
) -> LimitReport {
    let model = SpaceModel::new(space);
    let seqs = limit_sequences(space, i_max, schedule, method, crossover, prec);
    let n = *schedule.last().expect("nonempty schedule");
    let rows = seqs
        .iter()
        .map(|s| {
            let est = s.estimate();
            let dev = est.dist(&s.target);
            let tol = default_tolerance(space, s.i, tolerance_scale);
            let tv = tol.at(n, prec);
            LimitRow {
                i: s.i,
                coefficient: s.label.clone(),
                n,
                estimate: est.to_sci_string(20),
                target: s.target.to_sci_string(20),
                deviation: dev.to_sci_string(6),
                tolerance: tol.to_string(),
                tolerance_value: tv.to_sci_string(6),
                pass: dev <= tv,
            }
        })
        .collect();
    let mut notes = Vec::new();
    if space == SpaceId::Twistor && i_max >= 5 {
        notes.push("R5 target uses -(7/5)·zeta(5) for the α²χ coefficient, i.e. -24·zeta(5)·ch5".into());
    }
    let _ = model;
    LimitReport {
        space: space.to_string(),
        method,
        rows,
        notes,
    }
}

/// Sequences for the coefficients whose target or samples are nonzero.
pub fn limit_sequences(
    space: SpaceId,
    i_max: u32,
    schedule: &[u64],
    method: Extrapolation,
    crossover: u64,
    prec: u32,
) -> Vec<LimitSequence> {
    let model = SpaceModel::new(space);
    let samples = r_numeric(space, schedule, crossover, prec);
    let targets = r_targets(space, prec);
    let sym = r_symbolic(space);
    let mut out = Vec::new();
    for i in 1..=i_max.min(model.top_degree() / 2) {
        for (b, basis) in model.basis.iter().enumerate() {
            if basis.degree != 2 * i {
                continue;
            }
            let target = targets[i as usize].coeffs[b].clone();
            if target.is_zero() && sym[i as usize].coeffs[b].is_zero() && i > 1 {
                continue;
            }
            out.push(LimitSequence {
                i,
                label: basis.label.clone(),
                ns: schedule.to_vec(),
                values: samples.iter().map(|r| r[i as usize].coeffs[b].clone()).collect(),
                target,
                method,
            });
        }
    }
    out
}

/// An exact finite-`n` identity for one coefficient of `R_{i,n}`.
#[derive(Debug, Clone)]
pub struct RIdentity {
    pub name: &'static str,
    pub i: u32,
    pub coefficient: usize,
    pub expected: MzvCombination,
}

fn zc(terms: &[(Rational, &[u32])]) -> MzvCombination {
    let mut c = MzvCombination::zero();
    for (v, s) in terms {
        c.add_term(MzvIndex::new(s), v.clone());
    }
    c
}

/// The simplification chain for the twistor space, one identity per
/// coefficient; basis index `a + 4b` is `α^a χ^b`.
pub fn twistor_r_identities() -> Vec<RIdentity> {
    let h = |x: i64| rat(x, 2);
    vec![
        RIdentity { name: "R1 alpha = -zeta_n(1)", i: 1, coefficient: 1, expected: zc(&[(int(-1), &[1])]) },
        RIdentity { name: "R2 alpha^2 = zeta_n(2)/2", i: 2, coefficient: 2, expected: zc(&[(h(1), &[2])]) },
        RIdentity { name: "R3 alpha^3 = -zeta_n(3)/3", i: 3, coefficient: 3, expected: zc(&[(rat(-1, 3), &[3])]) },
        RIdentity {
            name: "R3 chi = -(zeta_n(3) + zeta_n(2,1))",
            i: 3,
            coefficient: 4,
            expected: zc(&[(int(-1), &[3]), (int(-1), &[2, 1])]),
        },
        RIdentity {
            name: "R4 alpha chi = zeta_n(2,2) + zeta_n(3,1)",
            i: 4,
            coefficient: 5,
            expected: zc(&[(int(1), &[2, 2]), (int(1), &[3, 1])]),
        },
        RIdentity {
            name: "R5 alpha^2 chi",
            i: 5,
            coefficient: 6,
            expected: zc(&[
                (h(1), &[2, 2, 1]),
                (h(-1), &[2, 3]),
                (int(-1), &[3, 2]),
                (h(-1), &[4, 1]),
                (rat(-9, 10), &[5]),
            ]),
        },
        RIdentity {
            name: "R6 alpha^3 chi",
            i: 6,
            coefficient: 7,
            expected: zc(&[
                (rat(7, 6), &[6]),
                (h(1), &[3, 3]),
                (h(1), &[4, 2]),
                (h(-1), &[2, 2, 2]),
                (h(-1), &[2, 3, 1]),
                (h(-1), &[3, 2, 1]),
            ]),
        },
    ]
}

/// Outcome of an identity check.
#[derive(Debug, Clone, Serialize)]
pub struct IdentityCheck {
    pub name: String,
    /// Equal as combinations of partial zeta symbols.
    pub symbolic: bool,
    /// Equal at every `n ≤ n_max`, evaluated exactly from the J-coefficients.
    pub exact_up_to: u64,
    pub holds: bool,
}

pub fn check_twistor_identities(n_max: u64) -> Vec<IdentityCheck> {
    let sym = r_symbolic(SpaceId::Twistor);
    let exact: Vec<Vec<CohomClass<Rational>>> = (1..=n_max).map(|n| r_exact(SpaceId::Twistor, n)).collect();
    twistor_r_identities()
        .into_iter()
        .map(|id| {
            let got = &sym[id.i as usize].coeffs[id.coefficient];
            // R₁ misses c₁ log n in the exact route as well, so both agree.
            let symbolic = got.sub(&id.expected).is_zero();
            let holds = exact
                .iter()
                .enumerate()
                .all(|(k, r)| r[id.i as usize].coeffs[id.coefficient] == id.expected.evaluate(k as u64 + 1));
            IdentityCheck {
                name: id.name.to_string(),
                symbolic,
                exact_up_to: n_max,
                holds,
            }
        })
        .collect()
}

/// Coefficientwise comparison of `e^{c₁ ln n}·Ê_n` with `Γ` for `ℂPᴺ`, where
/// `Ê_n` is the normalised inverse loop-space Euler class.
#[derive(Debug, Clone, Serialize)]
pub struct DirectLimitRow {
    pub coefficient: String,
    pub value: String,
    pub target: String,
    pub deviation: String,
    pub pass: bool,
}

pub fn direct_limit(space: SpaceId, n: u64, bound: f64, crossover: u64, prec: u32) -> Vec<DirectLimitRow> {
    let model = SpaceModel::new(space);
    let e = model.loop_euler_class_numeric(n, crossover, prec);
    let l = BigReal::from_i64(n as i64, prec).ln();
    let c1: CohomClass<BigReal> = CohomClass::from_rationals(&model.c1).scale_by(&l);
    let v = model.mul(&model.exp(&c1), &e);
    let g = model.gamma_class(prec);
    let tol = BigReal::from_f64(bound, prec);
    model
        .basis
        .iter()
        .enumerate()
        .map(|(k, b)| {
            let dev = v.coeffs[k].dist(&g.coeffs[k]);
            DirectLimitRow {
                coefficient: b.label.clone(),
                value: v.coeffs[k].to_sci_string(15),
                target: g.coeffs[k].to_sci_string(15),
                deviation: dev.to_sci_string(6),
                pass: dev <= tol,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mzv::{euler_gamma, zeta_value};
    use crate::jfun::twistor_j_formula;

    #[test]
    fn h_table() {
        assert!(h_poly(0).terms.is_empty());
        assert!(h_poly(1).terms.is_empty());
        assert_eq!(h_poly(2).to_string(), "1/2*x1^2");
        let h4 = h_poly(4);
        assert_eq!(h4.terms.len(), 4);
        assert_eq!(h4.terms[&vec![4, 0, 0]], rat(1, 24));
        assert_eq!(h4.terms[&vec![2, 1, 0]], rat(1, 2));
        assert_eq!(h4.terms[&vec![0, 2, 0]], rat(1, 2));
        assert_eq!(h4.terms[&vec![1, 0, 1]], int(1));
        // Number of partitions of i into parts < i.
        let p = [0usize, 0, 1, 2, 4, 6, 10];
        for i in 2..=6u32 {
            assert_eq!(h_poly(i).terms.len(), p[i as usize], "i = {i}");
        }
    }

    #[test]
    fn r_is_log_of_normalized_j() {
        let model = SpaceModel::twistor();
        for n in [1u64, 2, 7] {
            let j = j_coeff(SpaceId::Twistor, n).unwrap().normalized;
            let lg = model.log(&j);
            let rs = r_exact(SpaceId::Twistor, n);
            let sum = rs.iter().fold(CohomClass::zero(8), |a, r| a.add(r));
            assert_eq!(sum, lg);
        }
    }

    #[test]
    fn twistor_chain_holds_exactly() {
        for c in check_twistor_identities(12) {
            assert!(c.symbolic && c.holds, "{c:?}");
        }
    }

    #[test]
    fn symbolic_j_matches_formula() {
        let sym = normalized_j_symbolic(SpaceId::Twistor);
        for d in 1..=6 {
            let f = twistor_j_formula(d);
            for k in 0..8 {
                assert_eq!(sym.coeffs[k].evaluate(d), f.coeffs[k]);
            }
        }
    }

    #[test]
    fn numeric_r1_and_r2_small_schedule() {
        let prec = 30;
        let rs = r_numeric(SpaceId::Twistor, &[1000, 4000], 500, prec);
        let g = euler_gamma(prec);
        // log n − H_n + γ ≈ −1/(2n)
        let r1 = &rs[1][1].coeffs[1];
        let dev = (r1 + &g).to_f64();
        assert!((dev + 1.0 / 8000.0).abs() < 1e-7, "{dev}");
        let r2 = &rs[1][2].coeffs[2];
        let z2 = zeta_value(2, prec).mul_rat(&rat(1, 2));
        assert!(r2.dist(&z2).to_f64() < 1.0 / 4000.0);
    }

    #[test]
    fn richardson_removes_one_over_n() {
        let prec = 30;
        let s = LimitSequence {
            i: 1,
            label: "x".into(),
            ns: vec![100, 200],
            values: vec![
                BigReal::from_rational(&(int(2) + rat(3, 100)), prec),
                BigReal::from_rational(&(int(2) + rat(3, 200)), prec),
            ],
            target: BigReal::from_i64(2, prec),
            method: Extrapolation::Richardson,
        };
        assert!(s.estimate().dist(&s.target).to_f64() < 1e-25);
    }

    #[test]
    fn cpn_targets_and_direct_limit() {
        for rows in [direct_limit(SpaceId::Cpn(2), 20000, 1e-3, 500, 30)] {
            assert!(rows.iter().all(|r| r.pass), "{rows:?}");
        }
        let rs = r_symbolic(SpaceId::Cpn(3));
        // R_i = (−1)^i (i−1)! ζ_n(i) ch_i, ch_i = 4 h^i / i!
        assert_eq!(rs[2].coeffs[2], MzvCombination::zeta(&[2]).scale(&int(2)));
        assert_eq!(rs[3].coeffs[3], MzvCombination::zeta(&[3]).scale(&rat(-4, 3)));
    }
}
