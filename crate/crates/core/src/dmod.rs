//! Formal connections `∇ = d/du + A(u)` over `Q(u)`: exponential twists,
//! cyclic vectors, associated operators in `∂ = u·d/du`, irregularity numbers,
//! splitting by the eigenvalues of the leading polar matrix, and
//! unramified-exponential-type verdicts.
//!
//! Pole orders refer to `∇`; the operator `D = u∇` has pole order one less.

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cohmodel::{BlockId, SpaceId, SpaceModel};
use crate::exactcore::{int, parse_rational_function, rat_to_string, ExactMatrix, Rational, RationalFunction, Valuation};
use crate::{Error, Result};

type RF = RationalFunction;
type Mat = ExactMatrix<RF>;
type QMat = ExactMatrix<Rational>;

/// Where a connection came from, for reports.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Provenance {
    pub space: String,
    pub block: String,
    pub q: String,
    pub chi: Option<String>,
    pub mu: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FormalConnection {
    pub a: Mat,
    pub provenance: Option<Provenance>,
}

fn rf(c: &Rational) -> RF {
    RF::constant(c.clone())
}

fn u_pow(k: i64, c: &Rational) -> RF {
    RF::monomial(k, c.clone())
}

impl FormalConnection {
    pub fn new(a: Mat) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::Unsupported("connection matrix must be square".into()));
        }
        Ok(FormalConnection { a, provenance: None })
    }

    /// `A = μ/u + C/u²` with `μ` diagonal.
    pub fn from_polar(mu: &[Rational], c: &QMat) -> Self {
        let n = mu.len();
        let mut a = Mat::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let mut e = u_pow(-2, c.get(i, j));
                if i == j {
                    e = e + u_pow(-1, &mu[i]);
                }
                a.set(i, j, e);
            }
        }
        FormalConnection { a, provenance: None }
    }

    /// Quantum connection `d/du + μ/u + (c₁⋆)/u²` of a block.
    pub fn quantum(space: SpaceId, block: BlockId, q: &Rational, chi: &Rational) -> Result<Self> {
        let model = SpaceModel::new(space);
        let qb = model.quantum_block(block, q, chi)?;
        let mut c = Self::from_polar(&qb.mu, &qb.c1_star);
        c.provenance = Some(Provenance {
            space: space.to_string(),
            block: block.to_string(),
            q: rat_to_string(q),
            chi: (block == BlockId::Main).then(|| rat_to_string(chi)),
            mu: qb.mu.iter().map(rat_to_string).collect(),
        });
        Ok(c)
    }

    pub fn dim(&self) -> usize {
        self.a.rows()
    }

    /// `p = −min ν(A_ij)`, or 0 for a holomorphic `A`.
    pub fn pole_order(&self) -> i64 {
        let mut p = 0;
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                if let Valuation::Finite(v) = self.a.get(i, j).valuation() {
                    p = p.max(-v);
                }
            }
        }
        p
    }

    /// `(u^p A)|_{u=0}`.
    pub fn leading_matrix(&self) -> QMat {
        let p = self.pole_order();
        let n = self.dim();
        let mut m = QMat::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m.set(i, j, self.a.get(i, j).laurent_coeff(-p));
            }
        }
        m
    }

    /// Tensoring with `𝓔^{w/u}`: `A ↦ A − (w/u²)·Id`.
    pub fn twist(&self, w: &Rational) -> Self {
        self.shift_diagonal(&u_pow(-2, &-w))
    }

    /// Tensoring with `d/du − c/u`: `A ↦ A − (c/u)·Id`.
    pub fn twist_regular(&self, c: &Rational) -> Self {
        self.shift_diagonal(&u_pow(-1, &-c))
    }

    fn shift_diagonal(&self, s: &RF) -> Self {
        let mut a = self.a.clone();
        for i in 0..self.dim() {
            let v = a.get(i, i) + s;
            a.set(i, i, v);
        }
        FormalConnection {
            a,
            provenance: self.provenance.clone(),
        }
    }

    /// Gauge change by a constant invertible matrix: `A ↦ G⁻¹AG`.
    pub fn conjugate(&self, g: &QMat) -> Result<Self> {
        let gi = invert(g)?;
        let to_rf = |m: &QMat| m.map(rf);
        Ok(FormalConnection {
            a: to_rf(&gi).mul(&self.a).mul(&to_rf(g)),
            provenance: self.provenance.clone(),
        })
    }

    /// Block direct sum.
    pub fn direct_sum(&self, other: &Self) -> Self {
        let (n, m) = (self.dim(), other.dim());
        let mut a = Mat::zeros(n + m, n + m);
        for i in 0..n {
            for j in 0..n {
                a.set(i, j, self.a.get(i, j).clone());
            }
        }
        for i in 0..m {
            for j in 0..m {
                a.set(n + i, n + j, other.a.get(i, j).clone());
            }
        }
        FormalConnection { a, provenance: None }
    }

    /// `D v = u·v′ + u·A·v`.
    pub fn apply_d(&self, v: &[RF]) -> Vec<RF> {
        let u = RF::u();
        let av = self.a.mul_vec(v);
        v.iter().zip(av).map(|(x, y)| &u * &(x.derivative() + y)).collect()
    }

    /// `[e, De, …, Dᵏe]` as columns.
    pub fn krylov(&self, e: &[RF], k: usize) -> Vec<Vec<RF>> {
        let mut out = vec![e.to_vec()];
        for _ in 0..k {
            let next = self.apply_d(out.last().unwrap());
            out.push(next);
        }
        out
    }

    /// Rank of `[e, De, …, D^{n−1}e]` over `Q(u)`.
    pub fn d_krylov_rank(&self, e: &[RF]) -> usize {
        let cols = self.krylov(e, self.dim() - 1);
        if full_rank_at_some_point(&cols) {
            return self.dim();
        }
        Mat::from_cols(&cols).rank()
    }
}

/// Full rank after substituting a few values of `u` implies full rank over
/// `Q(u)`; the converse can fail, so callers fall back to the exact rank.
fn full_rank_at_some_point(cols: &[Vec<RF>]) -> bool {
    let n = cols.len();
    [int(2), int(3), Rational::new(5.into(), 7.into())].iter().any(|x| {
        let vals: Option<Vec<Vec<Rational>>> = cols.iter().map(|c| c.iter().map(|f| f.eval(x)).collect()).collect();
        vals.is_some_and(|v| v.len() == v.first().map_or(0, Vec::len) && QMat::from_cols(&v).rank() == n)
    })
}

fn invert(g: &QMat) -> Result<QMat> {
    let n = g.rows();
    let mut cols = Vec::with_capacity(n);
    for c in 0..n {
        let mut e = vec![Rational::zero(); n];
        e[c] = Rational::one();
        cols.push(g.solve_linear(&e).ok_or(Error::Singular)?);
    }
    Ok(QMat::from_cols(&cols))
}

/// Rank of `[e, Ce, …, C^{n−1}e]` over `Q` for a constant matrix `C`.
pub fn constant_krylov_rank(c: &QMat, e: &[Rational]) -> usize {
    let mut cols = vec![e.to_vec()];
    for _ in 1..c.rows() {
        let next = c.mul_vec(cols.last().unwrap());
        cols.push(next);
    }
    QMat::from_cols(&cols).rank()
}

/// Monic `L = ∂ⁿ + a_{n−1}∂^{n−1} + … + a₀`, `∂ = u·d/du`; `coeffs[i] = a_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiffOperator {
    pub coeffs: Vec<RF>,
}

impl DiffOperator {
    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    /// Parses `dK:expr; …` terms; the result is divided by its leading coefficient.
    pub fn parse(src: &str) -> Result<Self> {
        let mut terms: Vec<(usize, RF)> = Vec::new();
        for part in src.split(';').map(str::trim).filter(|s| !s.is_empty()) {
            let (k, e) = part
                .split_once(':')
                .ok_or_else(|| Error::Parse(format!("operator term `{part}` lacks `:`")))?;
            let k = k
                .trim()
                .strip_prefix('d')
                .and_then(|s| s.parse::<usize>().ok())
                .ok_or_else(|| Error::Parse(format!("bad derivative order in `{part}`")))?;
            terms.push((k, parse_rational_function(e)?));
        }
        let n = terms
            .iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, _)| *k)
            .max()
            .ok_or_else(|| Error::Parse("operator has no nonzero term".into()))?;
        if n == 0 {
            return Err(Error::Parse("operator must have positive order".into()));
        }
        let mut c = vec![RF::zero(); n + 1];
        for (k, v) in terms {
            c[k] = &c[k] + &v;
        }
        let lead = c[n].clone();
        Ok(DiffOperator {
            coeffs: c[..n].iter().map(|x| x / &lead).collect(),
        })
    }

    /// `Irr(L) = max(0, maxᵢ −ν(aᵢ))`.
    pub fn irregularity(&self) -> u64 {
        irregularity(self)
    }

    pub fn coeff_strings(&self) -> Vec<String> {
        self.coeffs.iter().map(|c| c.to_string()).collect()
    }
}

impl std::fmt::Display for DiffOperator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "d{}", self.order())?;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if !c.is_zero() {
                write!(f, " + ({c})*d{k}")?;
            }
        }
        Ok(())
    }
}

pub fn irregularity(l: &DiffOperator) -> u64 {
    l.coeffs
        .iter()
        .filter_map(|c| c.valuation().finite())
        .map(|v| -v)
        .max()
        .unwrap_or(0)
        .max(0) as u64
}

/// Candidate cyclic vectors: basis vectors, all-ones, then `random` seeded
/// vectors with entries in `−3..=3`.
pub fn default_candidates(n: usize, seed: u64, random: usize) -> Vec<Vec<Rational>> {
    let mut out = Vec::with_capacity(n + 1 + random);
    for i in 0..n {
        let mut e = vec![Rational::zero(); n];
        e[i] = Rational::one();
        out.push(e);
    }
    out.push(vec![Rational::one(); n]);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    while out.len() < n + 1 + random {
        let v: Vec<Rational> = (0..n).map(|_| int(rng.gen_range(-3..=3))).collect();
        if v.iter().any(|x| !x.is_zero()) {
            out.push(v);
        }
    }
    out
}

pub const RANDOM_CANDIDATES: usize = 20;

/// First candidate whose `D`-Krylov matrix has full rank.
pub fn cyclic_vector(conn: &FormalConnection, candidates: &[Vec<Rational>]) -> Result<Vec<Rational>> {
    let n = conn.dim();
    let mut best = 0;
    for c in candidates {
        let e: Vec<RF> = c.iter().map(rf).collect();
        let r = conn.d_krylov_rank(&e);
        if r == n {
            return Ok(c.clone());
        }
        best = best.max(r);
    }
    Err(Error::NoCyclicVector {
        tried: candidates.len(),
        best_rank: best,
        dim: n,
    })
}

/// The first `k` cyclic vectors among the candidates.
pub fn cyclic_vectors(conn: &FormalConnection, candidates: &[Vec<Rational>], k: usize) -> Vec<Vec<Rational>> {
    let n = conn.dim();
    candidates
        .iter()
        .filter(|c| conn.d_krylov_rank(&c.iter().map(rf).collect::<Vec<_>>()) == n)
        .take(k)
        .cloned()
        .collect()
}

/// Solves `Dⁿe + Σ aᵢ Dⁱe = 0` for the `aᵢ`.
pub fn associated_operator(conn: &FormalConnection, e: &[Rational]) -> Result<DiffOperator> {
    let n = conn.dim();
    let e: Vec<RF> = e.iter().map(rf).collect();
    let mut cols = conn.krylov(&e, n);
    let last = cols.pop().unwrap();
    let k = Mat::from_cols(&cols);
    let rhs: Vec<RF> = last.into_iter().map(|x| -x).collect();
    let coeffs = k.solve_linear(&rhs).ok_or(Error::Singular)?;
    Ok(DiffOperator { coeffs })
}

/// Irregularity through the first cyclic vector among the default candidates.
pub fn connection_irregularity(conn: &FormalConnection, seed: u64) -> Result<(u64, Vec<Rational>, DiffOperator)> {
    let cands = default_candidates(conn.dim(), seed, RANDOM_CANDIDATES);
    let e = cyclic_vector(conn, &cands)?;
    let l = associated_operator(conn, &e)?;
    Ok((l.irregularity(), e, l))
}

/// Eigen-data of the leading polar matrix.
#[derive(Debug, Clone, Serialize)]
pub struct LeadingDecomposition {
    pub pole_order: i64,
    #[serde(serialize_with = "ser_qmat")]
    pub leading: QMat,
    #[serde(serialize_with = "ser_rats")]
    pub eigenvalues: Vec<Rational>,
    pub multiplicities: Vec<usize>,
    /// Irregularity after the twist that removes each eigenvalue.
    pub twisted_irregularity: Vec<u64>,
    /// For each eigenvalue `w`, whether `Λ_j − w` is invertible on every other group.
    pub shifted_invertible: Vec<bool>,
}

fn ser_rats<S: serde::Serializer>(v: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(rat_to_string))
}

fn ser_qmat<S: serde::Serializer>(m: &QMat, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(m.to_rows().iter().map(|r| r.iter().map(rat_to_string).collect::<Vec<_>>()))
}

/// Exact eigenvalues with algebraic multiplicities; fails on irrational spectra.
pub fn exact_spectrum(m: &QMat) -> Result<Vec<(Rational, usize)>> {
    let ev = m.rational_eigenvalues();
    let total: usize = ev.iter().map(|(_, k)| k).sum();
    if total != m.rows() {
        return Err(Error::Unsupported(format!(
            "characteristic polynomial {} does not split over Q",
            m.charpoly()
        )));
    }
    Ok(ev)
}

/// Basis of generalised eigenvectors grouped by eigenvalue, as columns of `P`.
fn spectral_basis(m: &QMat, spectrum: &[(Rational, usize)]) -> Result<(QMat, Vec<usize>)> {
    let n = m.rows();
    let mut cols = Vec::new();
    let mut sizes = Vec::new();
    for (w, k) in spectrum {
        let shifted = m.sub(&QMat::identity(n).scale(w));
        let ker = shifted.pow(*k as u32).nullspace();
        if ker.len() != *k {
            return Err(Error::Unsupported("generalised eigenspace has wrong dimension".into()));
        }
        sizes.push(ker.len());
        cols.extend(ker);
    }
    Ok((QMat::from_cols(&cols), sizes))
}

/// Result of [`leading_split`].
#[derive(Debug, Clone)]
pub struct LeadingSplit {
    /// Constant change of basis putting `Λ₀` in block form.
    pub p: QMat,
    /// `T_1, …, T_K` of `T(u) = P·(Id + Σ T_k u^k)`.
    pub t: Vec<QMat>,
    /// Eigenvalue and size of each block, in order.
    pub blocks: Vec<(Rational, usize)>,
    /// `u²·A′` coefficients `B′_0, …, B′_K`, block diagonal.
    pub b: Vec<QMat>,
    /// Conjugated connection `A′ = T⁻¹(AT + T′)`, exact.
    pub conjugated: Mat,
    pub truncation: usize,
}

impl LeadingSplit {
    fn block_of(&self, i: usize) -> usize {
        let mut acc = 0;
        for (b, (_, s)) in self.blocks.iter().enumerate() {
            acc += s;
            if i < acc {
                return b;
            }
        }
        unreachable!()
    }

    /// Minimum `u`-adic valuation over the off-diagonal blocks of `A′`
    /// (`None` if they vanish identically).
    pub fn off_diagonal_valuation(&self) -> Option<i64> {
        let n = self.conjugated.rows();
        let mut best: Option<i64> = None;
        for i in 0..n {
            for j in 0..n {
                if self.block_of(i) == self.block_of(j) {
                    continue;
                }
                if let Valuation::Finite(v) = self.conjugated.get(i, j).valuation() {
                    best = Some(best.map_or(v, |b| b.min(v)));
                }
            }
        }
        best
    }

    /// Leading matrix `B′_0` restricted to block `b`.
    pub fn block_leading(&self, b: usize) -> QMat {
        let start: usize = self.blocks[..b].iter().map(|(_, s)| s).sum();
        let size = self.blocks[b].1;
        let mut m = QMat::zeros(size, size);
        for i in 0..size {
            for j in 0..size {
                m.set(i, j, self.b[0].get(start + i, start + j).clone());
            }
        }
        m
    }
}

/// Gauge transformation splitting a pole-order-2 connection by the eigenvalue
/// groups of `Λ₀`, to order `K`: off-diagonal blocks of `A′` have valuation
/// at least `K − 1`.
pub fn leading_split(conn: &FormalConnection, k_max: usize) -> Result<LeadingSplit> {
    let p = conn.pole_order();
    if p != 2 {
        return Err(Error::Unsupported(format!("leading_split needs pole order 2, got {p}")));
    }
    let n = conn.dim();
    let lam = conn.leading_matrix();
    let spectrum = exact_spectrum(&lam)?;
    if spectrum.len() < 2 {
        return Err(Error::SpectralOverlap);
    }
    let (pm, sizes) = spectral_basis(&lam, &spectrum)?;
    let pinv = invert(&pm)?;
    let blocks: Vec<(Rational, usize)> = spectrum.iter().map(|(w, _)| w.clone()).zip(sizes.iter().copied()).collect();
    let ranges: Vec<(usize, usize)> = sizes
        .iter()
        .scan(0, |s, &k| {
            let r = (*s, *s + k);
            *s += k;
            Some(r)
        })
        .collect();
    // B_k = P⁻¹ [u^{k−2}]A P
    let bk: Vec<QMat> = (0..=k_max)
        .map(|k| {
            let mut m = QMat::zeros(n, n);
            for i in 0..n {
                for j in 0..n {
                    m.set(i, j, conn.a.get(i, j).laurent_coeff(k as i64 - 2));
                }
            }
            pinv.mul(&m).mul(&pm)
        })
        .collect();
    let lam0 = bk[0].clone();
    let mut t: Vec<QMat> = vec![QMat::identity(n)];
    let mut bp: Vec<QMat> = vec![lam0.clone()];
    for k in 1..=k_max {
        // R_k = B_k + Σ_{j=1}^{k−1} B_{k−j}T_j − Σ_{i=1}^{k−1} T_i B′_{k−i} + (k−1)T_{k−1}
        let mut r = bk[k].clone();
        for j in 1..k {
            r = r.add(&bk[k - j].mul(&t[j]));
            r = r.sub(&t[j].mul(&bp[k - j]));
        }
        if k >= 2 {
            r = r.add(&t[k - 1].scale(&int(k as i64 - 1)));
        }
        let mut tk = QMat::zeros(n, n);
        let mut bk_new = QMat::zeros(n, n);
        for (bi, &(i0, i1)) in ranges.iter().enumerate() {
            for (bj, &(j0, j1)) in ranges.iter().enumerate() {
                if bi == bj {
                    for i in i0..i1 {
                        for j in j0..j1 {
                            bk_new.set(i, j, r.get(i, j).clone());
                        }
                    }
                    continue;
                }
                // Λ_ii X − X Λ_jj = −R_ij
                let x = solve_sylvester(&lam0, (i0, i1), (j0, j1), &r)?;
                for i in i0..i1 {
                    for j in j0..j1 {
                        tk.set(i, j, x[(i - i0) * (j1 - j0) + (j - j0)].clone());
                    }
                }
            }
        }
        t.push(tk);
        bp.push(bk_new);
    }
    // Independent exact check: A′ = T⁻¹(AT + T′) with T = P(Id + Σ T_k u^k).
    let mut tu = Mat::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let mut e = RF::zero();
            for (k, tk) in t.iter().enumerate() {
                let c = tk.get(i, j);
                if !c.is_zero() {
                    e = e + u_pow(k as i64, c);
                }
            }
            tu.set(i, j, e);
        }
    }
    let ttot = pm.map(rf).mul(&tu);
    let ttot_d = ttot.map(|x| x.derivative());
    let rhs = conn.a.mul(&ttot).add(&ttot_d);
    let mut cols = Vec::with_capacity(n);
    for c in 0..n {
        cols.push(ttot.solve_linear(&rhs.col(c)).ok_or(Error::Singular)?);
    }
    let conjugated = Mat::from_cols(&cols);
    Ok(LeadingSplit {
        p: pm,
        t: t[1..].to_vec(),
        blocks,
        b: bp,
        conjugated,
        truncation: k_max,
    })
}

fn solve_sylvester(lam: &QMat, (i0, i1): (usize, usize), (j0, j1): (usize, usize), r: &QMat) -> Result<Vec<Rational>> {
    let (a, b) = (i1 - i0, j1 - j0);
    let m = a * b;
    let mut sys = QMat::zeros(m, m);
    let mut rhs = vec![Rational::zero(); m];
    let idx = |i: usize, j: usize| i * b + j;
    for i in 0..a {
        for j in 0..b {
            let row = idx(i, j);
            rhs[row] = -r.get(i0 + i, j0 + j).clone();
            // (Λ_ii X)_{ij} = Σ_l Λ[i0+i][i0+l] X_{lj}
            for l in 0..a {
                let v = sys.get(row, idx(l, j)) + lam.get(i0 + i, i0 + l);
                sys.set(row, idx(l, j), v);
            }
            // (X Λ_jj)_{ij} = Σ_l X_{il} Λ[j0+l][j0+j]
            for l in 0..b {
                let v = sys.get(row, idx(i, l)) - lam.get(j0 + l, j0 + j);
                sys.set(row, idx(i, l), v);
            }
        }
    }
    sys.solve_linear(&rhs).ok_or(Error::SpectralOverlap)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    RegularSingular,
    UnramifiedExponentialType,
    Inconclusive,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::RegularSingular => "regular singular",
            Verdict::UnramifiedExponentialType => "unramified exponential type",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

/// Operator data for one twist.
#[derive(Debug, Clone, Serialize)]
pub struct OperatorReport {
    /// Twist parameter `w` of `𝓔^{w/u}` (`"0"` for none).
    pub twist: String,
    pub cyclic_vector: Vec<String>,
    pub d_krylov_rank: usize,
    pub constant_krylov_rank: Option<usize>,
    pub coefficients: Vec<String>,
    pub irregularity: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExpTypeReport {
    pub provenance: Option<Provenance>,
    pub dim: usize,
    pub pole_order: i64,
    pub d_form_pole_order: i64,
    pub irregularity: u64,
    /// `(p − 1)·n`, the maximum attained iff `Λ₀` is invertible.
    pub max_irregularity: u64,
    pub leading_invertible: bool,
    pub decomposition: Option<LeadingDecomposition>,
    pub untwisted: OperatorReport,
    pub twisted: Vec<OperatorReport>,
    pub split_truncation: Option<usize>,
    pub split_off_diagonal_valuation: Option<i64>,
    pub verdict: Verdict,
}

fn operator_report(conn: &FormalConnection, twist: &Rational, seed: u64) -> Result<OperatorReport> {
    let (irr, e, l) = connection_irregularity(conn, seed)?;
    let erf: Vec<RF> = e.iter().map(rf).collect();
    Ok(OperatorReport {
        twist: rat_to_string(twist),
        cyclic_vector: e.iter().map(rat_to_string).collect(),
        d_krylov_rank: conn.d_krylov_rank(&erf),
        constant_krylov_rank: (conn.pole_order() == 2).then(|| constant_krylov_rank(&conn.leading_matrix(), &e)),
        coefficients: l.coeff_strings(),
        irregularity: irr,
    })
}

/// Classifies a connection with pole order at most 2.
pub fn exp_type_report(conn: &FormalConnection, seed: u64) -> Result<ExpTypeReport> {
    const SPLIT_ORDER: usize = 4;
    let p = conn.pole_order();
    if p >= 3 {
        return Err(Error::Unsupported(format!("pole order {p} (only p <= 2 is handled)")));
    }
    let n = conn.dim();
    let untwisted = operator_report(conn, &Rational::zero(), seed)?;
    let max_irregularity = ((p - 1).max(0) as u64) * n as u64;
    if p <= 1 {
        let verdict = if untwisted.irregularity == 0 {
            Verdict::RegularSingular
        } else {
            Verdict::Inconclusive
        };
        return Ok(ExpTypeReport {
            provenance: conn.provenance.clone(),
            dim: n,
            pole_order: p,
            d_form_pole_order: (p - 1).max(0),
            irregularity: untwisted.irregularity,
            max_irregularity,
            leading_invertible: false,
            decomposition: None,
            untwisted,
            twisted: Vec::new(),
            split_truncation: None,
            split_off_diagonal_valuation: None,
            verdict,
        });
    }
    let lam = conn.leading_matrix();
    let spectrum = exact_spectrum(&lam)?;
    let leading_invertible = spectrum.iter().all(|(w, _)| !w.is_zero());
    let mut twisted = Vec::new();
    for (w, _) in &spectrum {
        twisted.push(operator_report(&conn.twist(w), w, seed)?);
    }
    let split = if spectrum.len() >= 2 { Some(leading_split(conn, SPLIT_ORDER)?) } else { None };
    let mut shifted_invertible = Vec::new();
    for (j, (w, _)) in spectrum.iter().enumerate() {
        let ok = match &split {
            Some(s) => (0..s.blocks.len()).filter(|&b| b != j).all(|b| {
                let m = s.block_leading(b);
                let sz = m.rows();
                m.sub(&QMat::identity(sz).scale(w)).rank() == sz
            }),
            None => false,
        };
        shifted_invertible.push(ok);
    }
    let mults: Vec<usize> = spectrum.iter().map(|(_, k)| *k).collect();
    let certified = spectrum.len() >= 2
        && (0..spectrum.len()).all(|j| {
            let others: usize = mults.iter().enumerate().filter(|(i, _)| *i != j).map(|(_, k)| k).sum();
            twisted[j].irregularity == others as u64 && shifted_invertible[j]
        });
    let decomposition = LeadingDecomposition {
        pole_order: p,
        leading: lam,
        eigenvalues: spectrum.iter().map(|(w, _)| w.clone()).collect(),
        multiplicities: mults,
        twisted_irregularity: twisted.iter().map(|t| t.irregularity).collect(),
        shifted_invertible,
    };
    Ok(ExpTypeReport {
        provenance: conn.provenance.clone(),
        dim: n,
        pole_order: p,
        d_form_pole_order: p - 1,
        irregularity: untwisted.irregularity,
        max_irregularity,
        leading_invertible,
        decomposition: Some(decomposition),
        untwisted,
        twisted,
        split_truncation: split.as_ref().map(|s| s.truncation),
        split_off_diagonal_valuation: split.as_ref().and_then(|s| s.off_diagonal_valuation()),
        verdict: if certified {
            Verdict::UnramifiedExponentialType
        } else {
            Verdict::Inconclusive
        },
    })
}

/// The y-block connection with the scalar `(m−6)/2` residue removed.
pub fn y_block_connection(m: u32, q: &Rational) -> Result<FormalConnection> {
    let c = FormalConnection::quantum(SpaceId::Twistor, BlockId::YBlock { m }, q, &int(1))?;
    Ok(c.twist_regular(&Rational::new((m as i64 - 6).into(), 2.into())))
}

/// The 8-dimensional main block connection at a sample `χ`.
pub fn main_block_connection(q: &Rational, chi: &Rational) -> Result<FormalConnection> {
    FormalConnection::quantum(SpaceId::Twistor, BlockId::Main, q, chi)
}

/// A random invertible integer matrix with entries in `−3..=3`.
pub fn random_invertible(n: usize, rng: &mut ChaCha8Rng) -> QMat {
    loop {
        let rows: Vec<Vec<Rational>> = (0..n)
            .map(|_| (0..n).map(|_| int(rng.gen_range(-3..=3))).collect())
            .collect();
        let m = QMat::from_rows(rows);
        if m.rank() == n {
            return m;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactcore::rat;

    fn op(src: &str) -> DiffOperator {
        DiffOperator::parse(src).unwrap()
    }

    fn y() -> FormalConnection {
        y_block_connection(2, &int(1)).unwrap()
    }

    #[test]
    fn textbook_irregularity() {
        assert_eq!(op("d2:1; d1:u^-2; d0:u^3").irregularity(), 2);
        assert_eq!(op("d1:1; d0:3").irregularity(), 0);
        assert_eq!(op("d2:2; d1:4/u").coeffs[1], RF::monomial(-1, int(2)));
        assert!(DiffOperator::parse("x2:1").is_err());
        assert!(DiffOperator::parse("d0:1").is_err());
    }

    #[test]
    fn y_block_operator_matches() {
        let c = y();
        let e = vec![int(1), int(0), int(0), int(0)];
        let l = associated_operator(&c, &e).unwrap();
        let expect = op("d4:1; d2:-8/u^2; d1:16/u^2; d0:16/u^4-16/u^2");
        assert_eq!(l, expect);
        assert_eq!(l.irregularity(), 4);
        let lt = associated_operator(&c.twist(&int(-2)), &e).unwrap();
        let expect = op("d4:1; d3:-8/u; d2:16/u^2+12/u; d1:-(32/u^2+8/u); d0:2/u+12/u^2");
        assert_eq!(lt, expect);
        assert_eq!(lt.irregularity(), 2);
    }

    #[test]
    fn twist_group_law_and_spectrum() {
        let c = y();
        assert_eq!(c.twist(&int(0)), c);
        assert_eq!(c.twist(&rat(3, 7)).twist(&rat(-3, 7)), c);
        let lam = c.twist(&int(-2)).leading_matrix();
        assert_eq!(exact_spectrum(&lam).unwrap(), vec![(int(0), 2), (int(4), 2)]);
    }

    #[test]
    fn one_dim_regular() {
        let mut a = Mat::zeros(1, 1);
        a.set(0, 0, RF::monomial(-1, int(5)));
        let c = FormalConnection::new(a).unwrap();
        let l = associated_operator(&c, &[int(1)]).unwrap();
        // De = 5e, so the relation is De − 5e = 0.
        assert_eq!(l.coeffs, vec![RF::constant(int(-5))]);
        let r = exp_type_report(&c, 1).unwrap();
        assert_eq!(r.verdict, Verdict::RegularSingular);
    }

    #[test]
    fn main_block_cyclicity() {
        let c = main_block_connection(&int(1), &int(1)).unwrap();
        let e: Vec<Rational> = (0..8).map(|i| int((i == 0) as i64)).collect();
        let erf: Vec<RF> = e.iter().map(rf).collect();
        assert_eq!(c.d_krylov_rank(&erf), 8);
        assert_eq!(constant_krylov_rank(&c.leading_matrix(), &e), 8);
        // Classical multiplication by α (q = 0): 1, α, …, α⁶ span 7 dimensions.
        let classical = main_block_connection(&int(0), &int(1)).unwrap();
        let qb = SpaceModel::twistor().quantum_block(BlockId::Main, &int(0), &int(1)).unwrap();
        assert_eq!(constant_krylov_rank(&qb.c1_star, &e), 7);
        assert_eq!(classical.pole_order(), 2);
    }

    #[test]
    fn main_block_report_all_chi() {
        for chi in [int(1), int(-2), int(-13)] {
            let r = exp_type_report(&main_block_connection(&int(1), &chi).unwrap(), 3).unwrap();
            assert_eq!(r.irregularity, 8);
            assert_eq!(r.decomposition.as_ref().unwrap().twisted_irregularity, vec![4, 4]);
            assert_eq!(r.verdict, Verdict::UnramifiedExponentialType);
        }
    }

    #[test]
    fn split_y_block() {
        let s = leading_split(&y(), 6).unwrap();
        assert!(s.off_diagonal_valuation().map_or(true, |v| v >= 5), "{:?}", s.off_diagonal_valuation());
        let scalar = FormalConnection::from_polar(&[int(0), int(0)], &QMat::identity(2).scale(&int(3)));
        assert!(matches!(leading_split(&scalar, 3), Err(Error::SpectralOverlap)));
        // Block-diagonal input: no correction needed.
        let d = FormalConnection::from_polar(&[int(1), int(2)], &QMat::from_rows(vec![vec![int(2), int(0)], vec![int(0), int(-2)]]));
        let s = leading_split(&d, 3).unwrap();
        assert!(s.t.iter().all(|t| t.is_zero()));
    }

    #[test]
    fn y_block_report() {
        let r = exp_type_report(&y(), 7).unwrap();
        assert_eq!(r.irregularity, 4);
        assert_eq!(r.max_irregularity, 4);
        assert_eq!(r.decomposition.as_ref().unwrap().twisted_irregularity, vec![2, 2]);
        assert_eq!(r.verdict, Verdict::UnramifiedExponentialType);
    }
}
