//! Finite models of the cohomology rings of `ℂPᴺ` and of the twistor space
//! `Z`, their quantum multiplication by `c₁`, the Gamma class and the
//! normalised inverse loop-space Euler class.
//!
//! The twistor model only covers the subring generated by `α = c₁(Z)` and
//! `χ = τ*χ`, with basis `(1, α, α², α³, χ, αχ, α²χ, α³χ)`, relations
//! `α⁴ = −8αχ`, `χ² = 0` and top pairing `∫α³χ = 8`.

use std::fmt::{self, Debug};
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::exactcore::{factorial, int, rat, BigReal, ExactMatrix, Rational};
use crate::mzv::{self, MzvCombination, MzvIndex};
use crate::{Error, Result};

/// Coefficient ring for cohomology classes.
pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
{
    fn scale(&self, r: &Rational) -> Self;
    fn from_rational(r: &Rational) -> Self;
}

impl Scalar for Rational {
    fn scale(&self, r: &Rational) -> Self {
        self * r
    }
    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }
}

impl Scalar for BigReal {
    fn scale(&self, r: &Rational) -> Self {
        self.mul_rat(r)
    }
    fn from_rational(r: &Rational) -> Self {
        BigReal::from_rational(r, BigReal::EXACT)
    }
}

impl Scalar for MzvCombination {
    fn scale(&self, r: &Rational) -> Self {
        MzvCombination::scale(self, r)
    }
    fn from_rational(r: &Rational) -> Self {
        MzvCombination::constant(r.clone())
    }
}

impl Zero for MzvCombination {
    fn zero() -> Self {
        MzvCombination::zero()
    }
    fn is_zero(&self) -> bool {
        MzvCombination::is_zero(self)
    }
}

impl One for MzvCombination {
    fn one() -> Self {
        MzvCombination::one()
    }
}

impl Add for MzvCombination {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        MzvCombination::add(&self, &o)
    }
}

impl Sub for MzvCombination {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        MzvCombination::sub(&self, &o)
    }
}

impl Mul for MzvCombination {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        MzvCombination::mul(&self, &o)
    }
}

impl Neg for MzvCombination {
    type Output = Self;
    fn neg(self) -> Self {
        MzvCombination::scale(&self, &-Rational::one())
    }
}

/// Which space a model describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum SpaceId {
    Cpn(u32),
    Twistor,
}

impl SpaceId {
    /// Accepts `twistor` or `cpn:N` with `N ≥ 1`.
    pub fn parse(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase();
        if t == "twistor" || t == "z" {
            return Ok(SpaceId::Twistor);
        }
        if let Some(n) = t.strip_prefix("cpn:").or_else(|| t.strip_prefix("cp")) {
            if let Ok(n) = n.parse::<u32>() {
                if n >= 1 {
                    return Ok(SpaceId::Cpn(n));
                }
            }
        }
        Err(Error::UnknownSpace(s.to_string()))
    }
}

impl fmt::Display for SpaceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpaceId::Cpn(n) => write!(f, "cpn:{n}"),
            SpaceId::Twistor => write!(f, "twistor"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BasisElement {
    pub label: String,
    /// Real cohomological degree.
    pub degree: u32,
}

/// Cohomology class as a coefficient vector in a model's basis.
#[derive(Debug, Clone, PartialEq)]
pub struct CohomClass<S> {
    pub coeffs: Vec<S>,
}

impl<S: Scalar> CohomClass<S> {
    pub fn zero(dim: usize) -> Self {
        CohomClass {
            coeffs: vec![S::zero(); dim],
        }
    }

    pub fn basis(dim: usize, i: usize) -> Self {
        let mut c = Self::zero(dim);
        c.coeffs[i] = S::one();
        c
    }

    pub fn from_rationals(v: &[Rational]) -> Self {
        CohomClass {
            coeffs: v.iter().map(S::from_rational).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn add(&self, o: &Self) -> Self {
        CohomClass {
            coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a.clone() + b.clone()).collect(),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        CohomClass {
            coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a.clone() - b.clone()).collect(),
        }
    }

    pub fn scale(&self, r: &Rational) -> Self {
        CohomClass {
            coeffs: self.coeffs.iter().map(|a| a.scale(r)).collect(),
        }
    }

    pub fn scale_by(&self, s: &S) -> Self {
        CohomClass {
            coeffs: self.coeffs.iter().map(|a| a.clone() * s.clone()).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> CohomClass<T> {
        CohomClass {
            coeffs: self.coeffs.iter().map(f).collect(),
        }
    }
}

/// Which summand of the quantum `c₁⋆` action to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BlockId {
    /// All of `H*(ℂPᴺ)`.
    Full,
    /// Twistor summand spanned by `y, αy, α²y, α³y` with `deg_ℝ y = m`.
    YBlock { m: u32 },
    /// Twistor summand spanned by `1, …, α³, Vol_M, …, α³Vol_M`.
    Main,
}

impl BlockId {
    /// Accepts `full`, `main`, `y` (with `m = 2`) or `y:m`.
    pub fn parse(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase();
        match t.as_str() {
            "full" => return Ok(BlockId::Full),
            "main" => return Ok(BlockId::Main),
            "y" => return Ok(BlockId::YBlock { m: 2 }),
            _ => {}
        }
        if let Some(m) = t.strip_prefix("y:") {
            if let Ok(m) = m.parse() {
                return Ok(BlockId::YBlock { m });
            }
        }
        Err(Error::Parse(format!("unknown block `{s}` (expected full, main, y or y:m)")))
    }
}

impl fmt::Display for BlockId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BlockId::Full => write!(f, "full"),
            BlockId::YBlock { m } => write!(f, "y:{m}"),
            BlockId::Main => write!(f, "main"),
        }
    }
}

/// A summand of quantum multiplication by `c₁` with its grading operator.
#[derive(Debug, Clone)]
pub struct QuantumBlock {
    pub id: BlockId,
    pub labels: Vec<String>,
    /// Column `j` is `c₁ ⋆ e_j`.
    pub c1_star: ExactMatrix<Rational>,
    /// Diagonal of the grading operator `μ`.
    pub mu: Vec<Rational>,
}

impl QuantumBlock {
    pub fn mu_matrix(&self) -> ExactMatrix<Rational> {
        let mut m = ExactMatrix::zeros(self.mu.len(), self.mu.len());
        for (i, v) in self.mu.iter().enumerate() {
            m.set(i, i, v.clone());
        }
        m
    }
}

/// Finite model of a cohomology ring with its characteristic classes.
#[derive(Debug, Clone)]
pub struct SpaceModel {
    pub id: SpaceId,
    pub basis: Vec<BasisElement>,
    /// `prod[i][j]` lists `(k, c)` with `e_i·e_j = Σ c·e_k`.
    prod: Vec<Vec<Vec<(usize, Rational)>>>,
    /// Top-degree functional `∫`.
    pub pairing: Vec<Rational>,
    /// `ch_1, …, ch_top` as rational coefficient vectors.
    pub chern_character: Vec<Vec<Rational>>,
    pub c1: Vec<Rational>,
    pub fano_index: u32,
    pub peak_constant: Rational,
}

/// Builds the model named `twistor` or `cpn:N`.
pub fn space_model(name: &str) -> Result<SpaceModel> {
    Ok(SpaceModel::new(SpaceId::parse(name)?))
}

fn sup(n: u32) -> String {
    const D: [char; 10] = ['⁰', '¹', '²', '³', '⁴', '⁵', '⁶', '⁷', '⁸', '⁹'];
    if n == 1 {
        return String::new();
    }
    n.to_string().chars().map(|c| D[c.to_digit(10).unwrap() as usize]).collect()
}

impl SpaceModel {
    pub fn new(id: SpaceId) -> Self {
        match id {
            SpaceId::Cpn(n) => Self::cpn(n),
            SpaceId::Twistor => Self::twistor(),
        }
    }

    pub fn cpn(n: u32) -> Self {
        assert!(n >= 1, "ℂPᴺ needs N >= 1");
        let dim = n as usize + 1;
        let basis = (0..=n)
            .map(|k| BasisElement {
                label: if k == 0 { "1".into() } else { format!("h{}", sup(k)) },
                degree: 2 * k,
            })
            .collect();
        let prod = (0..dim)
            .map(|i| {
                (0..dim)
                    .map(|j| if i + j < dim { vec![(i + j, int(1))] } else { Vec::new() })
                    .collect()
            })
            .collect();
        let mut pairing = vec![int(0); dim];
        pairing[dim - 1] = int(1);
        let np1 = int(n as i64 + 1);
        let chern_character = (1..dim)
            .map(|k| {
                let mut v = vec![int(0); dim];
                v[k] = &np1 / Rational::from_integer(factorial(k as u64));
                v
            })
            .collect::<Vec<_>>();
        SpaceModel {
            id: SpaceId::Cpn(n),
            basis,
            prod,
            pairing,
            c1: chern_character[0].clone(),
            chern_character,
            fano_index: n + 1,
            peak_constant: int(1),
        }
    }

    pub fn twistor() -> Self {
        let dim = 8;
        // Index i = a + 4b stands for α^a χ^b.
        let basis = (0..dim)
            .map(|i| {
                let (a, b) = (i % 4, i / 4);
                let label = match (a, b) {
                    (0, 0) => "1".to_string(),
                    (_, 0) => format!("α{}", sup(a as u32)),
                    (0, _) => "χ".to_string(),
                    _ => format!("α{}χ", sup(a as u32)),
                };
                BasisElement {
                    label,
                    degree: 2 * a as u32 + 6 * b as u32,
                }
            })
            .collect();
        let mut prod = vec![vec![Vec::new(); dim]; dim];
        for i in 0..dim {
            for j in 0..dim {
                let (a, b) = (i % 4 + j % 4, i / 4 + j / 4);
                prod[i][j] = match (b, a) {
                    (0, a) if a <= 3 => vec![(a, int(1))],
                    // α⁴ = −8αχ, so α^a = −8α^{a−3}χ for a = 4, 5, 6
                    (0, a) => vec![(a - 3 + 4, int(-8))],
                    (1, a) if a <= 3 => vec![(a + 4, int(1))],
                    _ => Vec::new(),
                };
            }
        }
        let mut pairing = vec![int(0); dim];
        pairing[7] = int(8);
        let v = |entries: &[(usize, Rational)]| {
            let mut x = vec![int(0); dim];
            for (k, c) in entries {
                x[*k] = c.clone();
            }
            x
        };
        let chern_character = vec![
            v(&[(1, int(1))]),
            v(&[(2, rat(1, 2))]),
            v(&[(3, rat(1, 6)), (4, int(1))]),
            v(&[(5, rat(1, 6))]),
            v(&[(6, rat(7, 120))]),
            v(&[(7, rat(7, 720))]),
        ];
        SpaceModel {
            id: SpaceId::Twistor,
            basis,
            prod,
            pairing,
            c1: chern_character[0].clone(),
            chern_character,
            fano_index: 2,
            peak_constant: int(1),
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Real dimension of the space, i.e. the top cohomological degree.
    pub fn top_degree(&self) -> u32 {
        self.basis.iter().map(|b| b.degree).max().unwrap_or(0)
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.basis.iter().position(|b| b.label == label)
    }

    /// Structure constants `e_i·e_j` as a dense vector.
    pub fn product_of_basis(&self, i: usize, j: usize) -> Vec<Rational> {
        let mut v = vec![int(0); self.dim()];
        for (k, c) in &self.prod[i][j] {
            v[*k] += c;
        }
        v
    }

    pub fn unit<S: Scalar>(&self) -> CohomClass<S> {
        CohomClass::basis(self.dim(), 0)
    }

    pub fn class<S: Scalar>(&self, v: &[Rational]) -> CohomClass<S> {
        CohomClass::from_rationals(v)
    }

    pub fn mul<S: Scalar>(&self, a: &CohomClass<S>, b: &CohomClass<S>) -> CohomClass<S> {
        let mut out = CohomClass::<S>::zero(self.dim());
        for (i, x) in a.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.coeffs.iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                for (k, c) in &self.prod[i][j] {
                    let t = (x.clone() * y.clone()).scale(c);
                    out.coeffs[*k] = out.coeffs[*k].clone() + t;
                }
            }
        }
        out
    }

    /// Ring exponential of a nilpotent class (zero constant term).
    pub fn exp<S: Scalar>(&self, x: &CohomClass<S>) -> CohomClass<S> {
        debug_assert!(x.coeffs[0].is_zero(), "exp needs a nilpotent argument");
        let mut acc = self.unit::<S>();
        let mut pw = self.unit::<S>();
        for k in 1..=self.dim() {
            pw = self.mul(&pw, x).scale(&rat(1, k as i64));
            if pw.is_zero() {
                break;
            }
            acc = acc.add(&pw);
        }
        acc
    }

    /// Ring logarithm of a class with constant term 1.
    pub fn log<S: Scalar>(&self, x: &CohomClass<S>) -> CohomClass<S> {
        let n = x.sub(&self.unit());
        debug_assert!(n.coeffs[0].is_zero(), "log needs constant term 1");
        let mut acc = CohomClass::zero(self.dim());
        let mut pw = self.unit::<S>();
        for k in 1..=self.dim() as i64 {
            pw = self.mul(&pw, &n);
            if pw.is_zero() {
                break;
            }
            let sign = if k % 2 == 1 { 1 } else { -1 };
            acc = acc.add(&pw.scale(&rat(sign, k)));
        }
        acc
    }

    /// `∫ x` against the top-degree functional.
    pub fn integrate<S: Scalar>(&self, x: &CohomClass<S>) -> S {
        x.coeffs
            .iter()
            .zip(&self.pairing)
            .filter(|(_, p)| !p.is_zero())
            .fold(S::zero(), |acc, (c, p)| acc + c.scale(p))
    }

    /// Pairing with the point class, which picks the degree-0 coefficient.
    pub fn pt_pairing<S: Scalar>(&self, x: &CohomClass<S>) -> S {
        x.coeffs[0].clone()
    }

    /// The part of `x` in real degree `deg`.
    pub fn component<S: Scalar>(&self, x: &CohomClass<S>, deg: u32) -> CohomClass<S> {
        CohomClass {
            coeffs: x
                .coeffs
                .iter()
                .zip(&self.basis)
                .map(|(c, b)| if b.degree == deg { c.clone() } else { S::zero() })
                .collect(),
        }
    }

    pub fn ch<S: Scalar>(&self, k: usize) -> CohomClass<S> {
        match self.chern_character.get(k.wrapping_sub(1)) {
            Some(v) => CohomClass::from_rationals(v),
            None => CohomClass::zero(self.dim()),
        }
    }

    /// Quantum multiplication by `c₁` on a summand, with `q` and the Euler
    /// number `χ` substituted.
    pub fn quantum_block(&self, block: BlockId, q: &Rational, chi: &Rational) -> Result<QuantumBlock> {
        let invalid = || Error::InvalidBlock {
            space: self.id.to_string(),
            block: block.to_string(),
        };
        match (self.id, block) {
            (SpaceId::Cpn(n), BlockId::Full) => {
                let d = n as usize + 1;
                let np1 = int(n as i64 + 1);
                let mut m = ExactMatrix::zeros(d, d);
                for k in 0..d - 1 {
                    m.set(k + 1, k, np1.clone());
                }
                m.set(0, d - 1, &np1 * q);
                let half = rat(n as i64, 2);
                Ok(QuantumBlock {
                    id: block,
                    labels: self.basis.iter().map(|b| b.label.clone()).collect(),
                    c1_star: m,
                    mu: (0..d).map(|k| int(k as i64) - &half).collect(),
                })
            }
            (SpaceId::Twistor, BlockId::YBlock { m }) => {
                let q4 = q * int(4);
                let z = int(0);
                let o = int(1);
                let rows = vec![
                    vec![z.clone(), q4.clone(), z.clone(), z.clone()],
                    vec![o.clone(), z.clone(), z.clone(), z.clone()],
                    vec![z.clone(), o.clone(), z.clone(), q4],
                    vec![z.clone(), z.clone(), o, z],
                ];
                let shift = rat(m as i64 - 6, 2);
                Ok(QuantumBlock {
                    id: block,
                    labels: ["y", "αy", "α²y", "α³y"].iter().map(|s| s.to_string()).collect(),
                    c1_star: ExactMatrix::from_rows(rows),
                    mu: (0..4).map(|j| &shift + int(j)).collect(),
                })
            }
            (SpaceId::Twistor, BlockId::Main) => {
                let q4 = q * int(4);
                let mut m = ExactMatrix::zeros(8, 8);
                for base in [0, 4] {
                    m.set(base, base + 1, q4.clone());
                    m.set(base + 1, base, int(1));
                    m.set(base + 2, base + 1, int(1));
                    m.set(base + 2, base + 3, q4.clone());
                    m.set(base + 3, base + 2, int(1));
                }
                // α ⋆ α³ picks up the classical α⁴ = −8χ·αVol_M.
                m.set(5, 3, chi * int(-8));
                Ok(QuantumBlock {
                    id: block,
                    labels: ["1", "α", "α²", "α³", "Vol_M", "αVol_M", "α²Vol_M", "α³Vol_M"]
                        .iter()
                        .map(|s| s.to_string())
                        .collect(),
                    c1_star: m,
                    mu: [-3, -2, -1, 0, 0, 1, 2, 3].iter().map(|&k| int(k)).collect(),
                })
            }
            _ => Err(invalid()),
        }
    }

    /// Gamma class `exp(−γ·ch₁ + Σ_{k≥2} (−1)^k (k−1)! ζ(k) ch_k)` at `prec` digits.
    pub fn gamma_class(&self, prec: u32) -> CohomClass<BigReal> {
        let mut x = self.ch::<BigReal>(1).scale_by(&-mzv::euler_gamma(prec));
        for k in 2..=self.chern_character.len() {
            let sign = if k % 2 == 0 { 1 } else { -1 };
            let c = Rational::from_integer(factorial(k as u64 - 1) * BigInt::from(sign));
            let z = mzv::zeta_value(k as u32, prec).mul_rat(&c);
            x = x.add(&self.ch::<BigReal>(k).scale_by(&z));
        }
        self.exp(&x).map(|c| c.with_prec(prec))
    }

    /// `log Γ`, the exponent of [`SpaceModel::gamma_class`].
    pub fn log_gamma_class(&self, prec: u32) -> CohomClass<BigReal> {
        self.log(&self.gamma_class(prec))
    }

    /// `exp(Σ_m (−1)^m (m−1)! z_m ch_m)` where `zetas[m−1]` stands for `ζ_n(m)`.
    pub fn loop_euler_class_from<S: Scalar>(&self, zetas: &[S]) -> CohomClass<S> {
        let mut x = CohomClass::zero(self.dim());
        for (m, z) in zetas.iter().enumerate().map(|(i, z)| (i + 1, z)) {
            if m > self.chern_character.len() {
                break;
            }
            let sign = if m % 2 == 0 { 1 } else { -1 };
            let c = Rational::from_integer(factorial(m as u64 - 1) * BigInt::from(sign));
            x = x.add(&self.ch::<S>(m).scale_by(&z.scale(&c)));
        }
        self.exp(&x)
    }

    /// Normalised inverse `S¹`-equivariant Euler class of the `n`-th loop
    /// space approximation, exactly.
    pub fn loop_euler_class(&self, n: u64) -> CohomClass<Rational> {
        let zetas: Vec<Rational> = (1..=self.chern_character.len() as u32)
            .map(|m| mzv::zeta_partial(n, &MzvIndex::new(&[m])))
            .collect();
        self.loop_euler_class_from(&zetas)
    }

    /// Same as [`SpaceModel::loop_euler_class`] but with `ζ_n(m)` accumulated in
    /// `BigReal` past the crossover, for large `n`.
    pub fn loop_euler_class_numeric(&self, n: u64, crossover: u64, prec: u32) -> CohomClass<BigReal> {
        let comps: Vec<Vec<u32>> = (1..=self.chern_character.len() as u32).map(|m| vec![m]).collect();
        let mut scan = mzv::ZetaScan::new(mzv::SumKind::Strict, &comps, crossover, prec);
        scan.advance_to(n);
        let zetas: Vec<BigReal> = comps.iter().map(|c| scan.value(c)).collect();
        self.loop_euler_class_from(&zetas)
    }

    /// Human-readable rendering, e.g. `1 - 2*h`.
    pub fn format<S: Scalar + fmt::Display>(&self, x: &CohomClass<S>) -> String {
        let parts: Vec<String> = x
            .coeffs
            .iter()
            .zip(&self.basis)
            .filter(|(c, _)| !c.is_zero())
            .map(|(c, b)| if b.degree == 0 { format!("{c}") } else { format!("({c})*{}", b.label) })
            .collect();
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn twistor_relations() {
        let z = SpaceModel::twistor();
        let a = z.class::<Rational>(&q(&[0, 1, 0, 0, 0, 0, 0, 0]));
        let a3 = z.class::<Rational>(&q(&[0, 0, 0, 1, 0, 0, 0, 0]));
        let chi = z.class::<Rational>(&q(&[0, 0, 0, 0, 1, 0, 0, 0]));
        assert_eq!(z.mul(&a, &a3).coeffs, q(&[0, 0, 0, 0, 0, -8, 0, 0]));
        assert!(z.mul(&chi, &chi).is_zero());
        assert_eq!(z.integrate(&z.mul(&a3, &chi)), int(8));
        assert_eq!(z.top_degree(), 12);
        let cp2 = SpaceModel::cpn(2);
        let h = cp2.class::<Rational>(&q(&[0, 1, 0]));
        let h2 = cp2.class::<Rational>(&q(&[0, 0, 1]));
        assert!(cp2.mul(&h, &h2).is_zero());
    }

    #[test]
    fn tables_are_commutative_and_associative() {
        for m in [SpaceModel::twistor(), SpaceModel::cpn(1), SpaceModel::cpn(4)] {
            let n = m.dim();
            for i in 0..n {
                for j in 0..n {
                    assert_eq!(m.product_of_basis(i, j), m.product_of_basis(j, i));
                    for k in 0..n {
                        let (ei, ej, ek) = (
                            CohomClass::<Rational>::basis(n, i),
                            CohomClass::basis(n, j),
                            CohomClass::basis(n, k),
                        );
                        let l = m.mul(&m.mul(&ei, &ej), &ek);
                        let r = m.mul(&ei, &m.mul(&ej, &ek));
                        assert_eq!(l, r);
                        // Degree additivity.
                        for (idx, c) in l.coeffs.iter().enumerate() {
                            if !c.is_zero() {
                                let deg = m.basis[i].degree + m.basis[j].degree + m.basis[k].degree;
                                assert_eq!(m.basis[idx].degree, deg);
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn quantum_blocks() {
        let z = SpaceModel::twistor();
        let y = z.quantum_block(BlockId::YBlock { m: 2 }, &int(1), &int(1)).unwrap();
        assert_eq!(
            y.c1_star.to_rows(),
            vec![q(&[0, 4, 0, 0]), q(&[1, 0, 0, 0]), q(&[0, 1, 0, 4]), q(&[0, 0, 1, 0])]
        );
        assert_eq!(y.mu, vec![int(-2), int(-1), int(0), int(1)]);
        let cp1 = SpaceModel::cpn(1).quantum_block(BlockId::Full, &int(1), &int(0)).unwrap();
        assert_eq!(cp1.c1_star.to_rows(), vec![q(&[0, 2]), q(&[2, 0])]);
        assert_eq!(cp1.mu, vec![rat(-1, 2), rat(1, 2)]);
        assert!(matches!(
            z.quantum_block(BlockId::Full, &int(1), &int(1)),
            Err(Error::InvalidBlock { .. })
        ));
        assert!(SpaceModel::cpn(2).quantum_block(BlockId::Main, &int(1), &int(1)).is_err());
    }

    #[test]
    fn main_block_satisfies_quantum_relation() {
        let z = SpaceModel::twistor();
        for qq in [int(1), int(2), rat(1, 3)] {
            for chi in [int(1), int(-2), int(-13)] {
                let b = z.quantum_block(BlockId::Main, &qq, &chi).unwrap();
                let m = &b.c1_star;
                let one = q(&[1, 0, 0, 0, 0, 0, 0, 0]);
                let m4 = m.pow(4).mul_vec(&one);
                let a2 = m.pow(2).mul_vec(&one);
                let mut expect = vec![int(0); 8];
                expect[5] = &chi * int(-8);
                for i in 0..8 {
                    expect[i] += &qq * int(8) * &a2[i] - &qq * &qq * int(16) * &one[i];
                }
                assert_eq!(m4, expect);
                let quartic = crate::exactcore::Poly::new(vec![&qq * &qq * int(16), int(0), &qq * int(-8), int(0), int(1)]);
                assert_eq!(m.charpoly(), &quartic * &quartic);
            }
        }
    }

    #[test]
    fn gamma_class_examples() {
        let p = 40;
        let g = mzv::euler_gamma(p);
        let z2 = mzv::zeta_value(2, p);
        let z3 = mzv::zeta_value(3, p);
        let cp1 = SpaceModel::cpn(1).gamma_class(p);
        assert!(cp1.coeffs[0].dist(&BigReal::from_i64(1, p)).to_f64() < 1e-35);
        assert!(cp1.coeffs[1].dist(&g.mul_rat(&int(-2))).to_f64() < 1e-35);
        let cp2 = SpaceModel::cpn(2).gamma_class(p);
        let expect = &(&g * &g).mul_rat(&rat(9, 2)) + &z2.mul_rat(&rat(3, 2));
        assert!(cp2.coeffs[2].dist(&expect).to_f64() < 1e-35);
        let tw = SpaceModel::twistor().gamma_class(p);
        assert!(tw.coeffs[4].dist(&z3.mul_rat(&int(-2))).to_f64() < 1e-35);
    }

    #[test]
    fn loop_euler_class_matches_chern_root_product() {
        let cp1 = SpaceModel::cpn(1);
        assert_eq!(cp1.loop_euler_class(2).coeffs, vec![int(1), int(-3)]);
        assert_eq!(cp1.loop_euler_class(1).coeffs, vec![int(1), int(-2)]);
        for n_space in 1..=4u32 {
            let m = SpaceModel::cpn(n_space);
            let h = m.class::<Rational>(&{
                let mut v = vec![int(0); m.dim()];
                v[1] = int(1);
                v
            });
            for n in 1..=12u64 {
                // Π_k (1 + h/k)^{−(N+1)}
                let mut prod = m.unit::<Rational>();
                for k in 1..=n {
                    let f = m.unit::<Rational>().add(&h.scale(&rat(1, k as i64)));
                    let inv = m.exp(&m.log(&f).scale(&int(-1)));
                    for _ in 0..=n_space {
                        prod = m.mul(&prod, &inv);
                    }
                }
                let l = m.loop_euler_class(n);
                assert_eq!(l, prod);
                let hn = mzv::harmonic(n);
                assert_eq!(l.coeffs[1], -hn * int(n_space as i64 + 1));
            }
        }
    }

    #[test]
    fn parses_names() {
        assert_eq!(SpaceId::parse("cpn:3").unwrap(), SpaceId::Cpn(3));
        assert_eq!(SpaceId::parse("twistor").unwrap(), SpaceId::Twistor);
        assert!(matches!(space_model("cpn:0"), Err(Error::UnknownSpace(_))));
        assert!(space_model("k3").is_err());
        assert_eq!(BlockId::parse("y:4").unwrap(), BlockId::YBlock { m: 4 });
    }
}
