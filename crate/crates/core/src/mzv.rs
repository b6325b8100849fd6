//! Partial multiple zeta values `ζ_d(s₁,…,s_k)` (strict sums over
//! `d ≥ n₁ > … > n_k ≥ 1`), weak symmetric sums `S_d(n₁,…,n_i)` (over
//! `d ≥ k₁ ≥ … ≥ k_i ≥ 1`), their quasi-shuffle algebra, and numeric limits.

use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Mutex;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::exactcore::{bernoulli, factorial, BigReal, Rational};
use crate::{Error, Result};

/// Composition `(s₁,…,s_k)` indexing a strict (multiple zeta) sum.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct MzvIndex(pub Vec<u32>);

/// Composition `(n₁,…,n_i)` indexing a weak symmetric sum.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct SymSumIndex(pub Vec<u32>);

fn parse_composition(s: &str) -> Result<Vec<u32>> {
    let s = s.trim();
    let s = s.strip_prefix('(').and_then(|t| t.strip_suffix(')')).unwrap_or(s);
    let mut out = Vec::new();
    if s.trim().is_empty() {
        return Ok(out);
    }
    for part in s.split(',') {
        let part = part.trim();
        let bad = || Error::Parse(format!("bad composition entry `{part}`"));
        // `{a}^j` repeats `a` j times.
        if let Some(rest) = part.strip_prefix('{') {
            let (a, j) = rest.split_once("}^").ok_or_else(bad)?;
            let a: u32 = a.trim().parse().map_err(|_| bad())?;
            let j: usize = j.trim().parse().map_err(|_| bad())?;
            if a == 0 {
                return Err(bad());
            }
            out.extend(std::iter::repeat_n(a, j));
        } else {
            let a: u32 = part.parse().map_err(|_| bad())?;
            if a == 0 {
                return Err(bad());
            }
            out.push(a);
        }
    }
    Ok(out)
}

impl MzvIndex {
    pub fn new(s: &[u32]) -> Self {
        assert!(s.iter().all(|&x| x >= 1), "composition entries must be positive");
        MzvIndex(s.to_vec())
    }

    pub fn empty() -> Self {
        MzvIndex(Vec::new())
    }

    /// Parses `2,1`, `(3,2)` or shorthand such as `{1}^3,2`.
    pub fn parse(s: &str) -> Result<Self> {
        parse_composition(s).map(MzvIndex)
    }

    pub fn depth(&self) -> usize {
        self.0.len()
    }

    pub fn weight(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_convergent(&self) -> bool {
        self.0.first().is_none_or(|&s| s >= 2)
    }
}

impl SymSumIndex {
    pub fn new(s: &[u32]) -> Self {
        assert!(s.iter().all(|&x| x >= 1), "composition entries must be positive");
        SymSumIndex(s.to_vec())
    }

    pub fn parse(s: &str) -> Result<Self> {
        parse_composition(s).map(SymSumIndex)
    }

    pub fn depth(&self) -> usize {
        self.0.len()
    }

    pub fn weight(&self) -> u32 {
        self.0.iter().sum()
    }
}

fn fmt_comp(f: &mut fmt::Formatter<'_>, name: &str, c: &[u32]) -> fmt::Result {
    let parts: Vec<String> = c.iter().map(u32::to_string).collect();
    write!(f, "{name}({})", parts.join(","))
}

impl fmt::Display for MzvIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_comp(f, "ζ", &self.0)
    }
}

impl fmt::Display for SymSumIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_comp(f, "S", &self.0)
    }
}

/// `d^(−s)` exactly.
fn inv_pow(d: u64, s: u32) -> Rational {
    Rational::new(BigInt::one(), num_traits::pow(BigInt::from(d), s as usize))
}

/// `ζ_d(idx)` exactly. Empty index gives 1; `d < depth` gives 0.
pub fn zeta_partial(d: u64, idx: &MzvIndex) -> Rational {
    let s = &idx.0;
    let k = s.len();
    // z[j] = ζ_m(s_j,…,s_k) for the current m; z[k] = 1.
    let mut z = vec![Rational::zero(); k + 1];
    z[k] = Rational::one();
    for m in 1..=d {
        // Strict: the suffix must be the value at m − 1, so go front to back.
        for j in 0..k {
            if z[j + 1].is_zero() {
                continue;
            }
            let t = inv_pow(m, s[j]) * &z[j + 1];
            z[j] += t;
        }
    }
    z.swap_remove(0)
}

/// `S_d(idx)` exactly. `d = 0` with nonempty index gives 0.
pub fn sym_sum(d: u64, idx: &SymSumIndex) -> Rational {
    let s = &idx.0;
    let k = s.len();
    let mut z = vec![Rational::zero(); k + 1];
    z[k] = Rational::one();
    for m in 1..=d {
        // Weak: the suffix may use k_{j+1} = m, so update back to front.
        for j in (0..k).rev() {
            let t = inv_pow(m, s[j]) * &z[j + 1];
            z[j] += t;
        }
    }
    z.swap_remove(0)
}

/// Finite `Q`-linear combination of multiple zeta symbols, valid at every
/// truncation level `d`. The empty index is the unit.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct MzvCombination {
    terms: BTreeMap<MzvIndex, Rational>,
}

impl MzvCombination {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::term(MzvIndex::empty(), Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::term(MzvIndex::empty(), c)
    }

    pub fn term(idx: MzvIndex, c: Rational) -> Self {
        let mut m = Self::zero();
        m.add_term(idx, c);
        m
    }

    pub fn zeta(s: &[u32]) -> Self {
        Self::term(MzvIndex::new(s), Rational::one())
    }

    pub fn add_term(&mut self, idx: MzvIndex, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(idx) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MzvIndex, &Rational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.is_zero()
    }

    pub fn coeff(&self, idx: &MzvIndex) -> Rational {
        self.terms.get(idx).cloned().unwrap_or_else(Rational::zero)
    }

    /// Coefficient of the unit (empty index).
    pub fn constant_term(&self) -> Rational {
        self.coeff(&MzvIndex::empty())
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for (k, v) in &o.terms {
            out.add_term(k.clone(), v.clone());
        }
        out
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(&-Rational::one()))
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        MzvCombination {
            terms: self.terms.iter().map(|(k, v)| (k.clone(), v * c)).collect(),
        }
    }

    /// Quasi-shuffle product, see [`stuffle_product`].
    pub fn mul(&self, o: &Self) -> Self {
        stuffle_product(self, o)
    }

    /// Exact value at truncation `d`.
    pub fn evaluate(&self, d: u64) -> Rational {
        self.terms
            .iter()
            .map(|(k, v)| v * zeta_partial(d, k))
            .fold(Rational::zero(), |a, b| a + b)
    }

    /// Every index, for feeding a [`ZetaScan`].
    pub fn indices(&self) -> Vec<MzvIndex> {
        self.terms.keys().cloned().collect()
    }

    /// Value with each symbol looked up by `f`.
    pub fn evaluate_with<T>(&self, f: impl Fn(&MzvIndex) -> T) -> T
    where
        T: Clone + std::ops::Add<Output = T> + std::ops::Mul<Output = T> + Zero,
        T: From<Rational>,
    {
        self.terms
            .iter()
            .fold(T::zero(), |acc, (k, v)| acc + T::from(v.clone()) * f(k))
    }

    /// Numeric value of the full (non-truncated) combination. Fails on a
    /// divergent symbol.
    pub fn limit_value(&self, d_max: u64, crossover: u64, prec: u32) -> Result<BigReal> {
        let mut acc = BigReal::from_i64(0, prec);
        for (k, v) in &self.terms {
            let z = zeta_limit_with(k, d_max, crossover, prec)?;
            acc = &acc + &z.estimate().mul_rat(v);
        }
        Ok(acc)
    }
}

impl fmt::Display for MzvCombination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, v) in &self.terms {
            let neg = v < &Rational::zero();
            let a = if neg { -v } else { v.clone() };
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            match (k.depth() == 0, a.is_one()) {
                (true, _) => write!(f, "{a}")?,
                (false, true) => write!(f, "{k}")?,
                (false, false) => write!(f, "{a}*{k}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for MzvCombination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MzvCombination({self})")
    }
}

/// Rewrites `S(idx)` as a sum of strict symbols: each way of merging runs of
/// consecutive entries into blocks contributes `ζ(block sums)`.
pub fn stuffle_expand(idx: &SymSumIndex) -> MzvCombination {
    let s = &idx.0;
    let k = s.len();
    if k == 0 {
        return MzvCombination::one();
    }
    let mut out = MzvCombination::zero();
    // Bit j set: entries j and j+1 share a block.
    for mask in 0u64..(1u64 << (k - 1)) {
        let mut comp = vec![s[0]];
        for j in 1..k {
            if mask >> (j - 1) & 1 == 1 {
                *comp.last_mut().unwrap() += s[j];
            } else {
                comp.push(s[j]);
            }
        }
        out.add_term(MzvIndex(comp), Rational::one());
    }
    out
}

fn stuffle_words(a: &[u32], b: &[u32], memo: &mut HashMap<(Vec<u32>, Vec<u32>), MzvCombination>) -> MzvCombination {
    if a.is_empty() {
        return MzvCombination::term(MzvIndex(b.to_vec()), Rational::one());
    }
    if b.is_empty() {
        return MzvCombination::term(MzvIndex(a.to_vec()), Rational::one());
    }
    let key = (a.to_vec(), b.to_vec());
    if let Some(v) = memo.get(&key) {
        return v.clone();
    }
    let prepend = |x: u32, c: MzvCombination| {
        let mut out = MzvCombination::zero();
        for (k, v) in c.terms {
            let mut w = vec![x];
            w.extend(k.0);
            out.add_term(MzvIndex(w), v);
        }
        out
    };
    // (a,A)*(b,B) = (a, A*(b,B)) + (b, (a,A)*B) + (a+b, A*B)
    let t1 = prepend(a[0], stuffle_words(&a[1..], b, memo));
    let t2 = prepend(b[0], stuffle_words(a, &b[1..], memo));
    let t3 = prepend(a[0] + b[0], stuffle_words(&a[1..], &b[1..], memo));
    let r = t1.add(&t2).add(&t3);
    memo.insert(key, r.clone());
    r
}

/// Quasi-shuffle (stuffle) product; equals the pointwise product of the
/// truncated sums at every `d`.
pub fn stuffle_product(x: &MzvCombination, y: &MzvCombination) -> MzvCombination {
    let mut memo = HashMap::new();
    let mut out = MzvCombination::zero();
    for (ka, va) in &x.terms {
        for (kb, vb) in &y.terms {
            let c = va * vb;
            for (k, v) in stuffle_words(&ka.0, &kb.0, &mut memo).terms {
                out.add_term(k, v * &c);
            }
        }
    }
    out
}

/// Strict (multiple zeta) or weak (symmetric) nested sums.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SumKind {
    Strict,
    Weak,
}

#[derive(Clone, Debug)]
enum Cell {
    Exact(Rational),
    Float(BigReal),
}

/// Incremental table of nested sums for a fixed set of compositions, advanced
/// in `d`. Values stay exact up to the crossover and continue as `BigReal`
/// beyond it. Every suffix of every requested composition is tracked, and
/// shared suffixes are computed once.
#[derive(Clone, Debug)]
pub struct ZetaScan {
    kind: SumKind,
    /// All suffixes, sorted by length; `keys[0]` is the empty composition.
    keys: Vec<Vec<u32>>,
    /// For each key, the position of its tail (key without its first entry).
    tail: Vec<usize>,
    pos: HashMap<Vec<u32>, usize>,
    cells: Vec<Cell>,
    float: bool,
    d: u64,
    crossover: u64,
    prec: u32,
}

impl ZetaScan {
    pub fn new(kind: SumKind, comps: &[Vec<u32>], crossover: u64, prec: u32) -> Self {
        let mut keys: Vec<Vec<u32>> = vec![Vec::new()];
        for c in comps {
            for j in 0..c.len() {
                keys.push(c[j..].to_vec());
            }
        }
        keys.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
        keys.dedup();
        let pos: HashMap<Vec<u32>, usize> = keys.iter().cloned().enumerate().map(|(i, k)| (k, i)).collect();
        let tail = keys
            .iter()
            .map(|k| if k.is_empty() { 0 } else { pos[&k[1..]] })
            .collect();
        let cells = keys
            .iter()
            .map(|k| Cell::Exact(if k.is_empty() { Rational::one() } else { Rational::zero() }))
            .collect();
        ZetaScan {
            kind,
            keys,
            tail,
            pos,
            cells,
            float: false,
            d: 0,
            crossover,
            prec,
        }
    }

    pub fn d(&self) -> u64 {
        self.d
    }

    pub fn kind(&self) -> SumKind {
        self.kind
    }

    pub fn is_exact(&self) -> bool {
        self.d <= self.crossover
    }

    fn to_float(&mut self) {
        let prec = self.prec;
        for c in &mut self.cells {
            if let Cell::Exact(r) = c {
                *c = Cell::Float(BigReal::from_rational(r, prec));
            }
        }
    }

    /// Advances the table to truncation level `d` (no-op if already past it).
    pub fn advance_to(&mut self, d: u64) {
        while self.d < d {
            let m = self.d + 1;
            if m > self.crossover && !self.float {
                self.to_float();
                self.float = true;
            }
            self.step(m);
            self.d = m;
        }
    }

    fn step(&mut self, m: u64) {
        let n = self.keys.len();
        // Strict sums read tails at m − 1: update long keys first.
        // Weak sums read tails at m: update short keys first.
        let order: Box<dyn Iterator<Item = usize>> = match self.kind {
            SumKind::Strict => Box::new((1..n).rev()),
            SumKind::Weak => Box::new(1..n),
        };
        let exact = m <= self.crossover;
        let max_s = self.keys.iter().filter_map(|k| k.first()).copied().max().unwrap_or(1);
        if exact {
            let pows: Vec<Rational> = (0..=max_s).map(|s| inv_pow(m, s)).collect();
            for i in order {
                let s = self.keys[i][0] as usize;
                let t = match &self.cells[self.tail[i]] {
                    Cell::Exact(r) => r,
                    Cell::Float(_) => unreachable!(),
                };
                if t.is_zero() {
                    continue;
                }
                let add = &pows[s] * t;
                if let Cell::Exact(r) = &mut self.cells[i] {
                    *r += add;
                }
            }
        } else {
            let inv = BigReal::from_i64(m as i64, self.prec).recip();
            let mut pows = vec![BigReal::from_i64(1, self.prec)];
            for s in 1..=max_s as usize {
                let p = &pows[s - 1] * &inv;
                pows.push(p);
            }
            for i in order {
                let s = self.keys[i][0] as usize;
                let t = match &self.cells[self.tail[i]] {
                    Cell::Float(x) => x,
                    Cell::Exact(_) => unreachable!(),
                };
                if t.is_zero() {
                    continue;
                }
                let add = &pows[s] * t;
                if let Cell::Float(x) = &mut self.cells[i] {
                    *x = &*x + &add;
                }
            }
        }
    }

    /// Exact value at the current level, if still in exact mode.
    pub fn exact(&self, comp: &[u32]) -> Option<Rational> {
        match &self.cells[self.index_of(comp)] {
            Cell::Exact(r) => Some(r.clone()),
            Cell::Float(_) => None,
        }
    }

    /// Numeric value at the current level.
    pub fn value(&self, comp: &[u32]) -> BigReal {
        match &self.cells[self.index_of(comp)] {
            Cell::Exact(r) => BigReal::from_rational(r, self.prec),
            Cell::Float(x) => x.clone(),
        }
    }

    fn index_of(&self, comp: &[u32]) -> usize {
        *self
            .pos
            .get(comp)
            .unwrap_or_else(|| panic!("composition {comp:?} is not tracked by this scan"))
    }
}

/// Partial value plus a one-sided tail bound: the limit lies in
/// `[partial, partial + tail]`. For depth 1 the value is the full `ζ(k)` and
/// the bracket is empty.
#[derive(Clone, Debug)]
pub struct ZetaLimit {
    pub index: MzvIndex,
    pub d_max: u64,
    pub partial: BigReal,
    pub tail: BigReal,
}

impl ZetaLimit {
    pub fn lower(&self) -> BigReal {
        self.partial.clone()
    }

    pub fn upper(&self) -> BigReal {
        &self.partial + &self.tail
    }

    /// Midpoint of the bracket.
    pub fn estimate(&self) -> BigReal {
        &self.partial + &self.tail.ldexp(-1)
    }

    /// True if the brackets of `self` and `other` intersect.
    pub fn overlaps(&self, other: &ZetaLimit) -> bool {
        self.lower() <= other.upper() && other.lower() <= self.upper()
    }
}

/// Tail bound `k·(1 + ln d)^k / ((s₁ − 1)·d^(s₁−1))`.
pub fn tail_bound(idx: &MzvIndex, d: u64, prec: u32) -> BigReal {
    let k = idx.depth() as i64;
    let s1 = idx.0[0] as i64;
    let dd = BigReal::from_i64(d as i64, prec);
    let l = &BigReal::from_i64(1, prec) + &dd.ln();
    let num = &l.powi(k) * &BigReal::from_i64(k, prec);
    let den = &dd.powi(s1 - 1) * &BigReal::from_i64(s1 - 1, prec);
    num / den
}

pub fn zeta_limit(idx: &MzvIndex, d_max: u64) -> Result<ZetaLimit> {
    zeta_limit_with(idx, d_max, crate::config::DEFAULT_CROSSOVER, crate::exactcore::DEFAULT_PRECISION)
}

pub fn zeta_limit_with(idx: &MzvIndex, d_max: u64, crossover: u64, prec: u32) -> Result<ZetaLimit> {
    if !idx.is_convergent() {
        return Err(Error::DivergentIndex(idx.0.clone()));
    }
    let zero = BigReal::from_i64(0, prec);
    match idx.depth() {
        0 => Ok(ZetaLimit {
            index: idx.clone(),
            d_max,
            partial: BigReal::from_i64(1, prec),
            tail: zero,
        }),
        1 => Ok(ZetaLimit {
            index: idx.clone(),
            d_max,
            partial: zeta_value(idx.0[0], prec),
            tail: zero,
        }),
        _ => {
            let mut scan = ZetaScan::new(SumKind::Strict, &[idx.0.clone()], crossover, prec);
            scan.advance_to(d_max);
            Ok(ZetaLimit {
                index: idx.clone(),
                d_max,
                partial: scan.value(&idx.0),
                tail: tail_bound(idx, d_max.max(1), prec),
            })
        }
    }
}

static ZETA_CACHE: Mutex<Vec<((u32, u32), BigReal)>> = Mutex::new(Vec::new());
static GAMMA_CACHE: Mutex<Vec<(u32, BigReal)>> = Mutex::new(Vec::new());

/// Cutoff for the Euler–Maclaurin sums at `prec` digits.
fn em_cutoff(prec: u32) -> u64 {
    let bits = (prec as f64 * std::f64::consts::LOG2_10).ceil() as u64;
    bits / 8 + 10
}

/// `ζ(s)` for `s ≥ 2` to full precision by Euler–Maclaurin summation.
pub fn zeta_value(s: u32, prec: u32) -> BigReal {
    assert!(s >= 2, "zeta_value needs s >= 2");
    if let Some((_, v)) = ZETA_CACHE.lock().unwrap().iter().find(|(k, _)| *k == (s, prec)) {
        return v.clone();
    }
    let wp = prec + 10;
    let n = em_cutoff(wp);
    let big_n = BigReal::from_i64(n as i64, wp);
    let mut acc = BigReal::from_i64(0, wp);
    for m in 1..n {
        acc = &acc + &BigReal::from_i64(m as i64, wp).powi(-(s as i64));
    }
    let n_s = big_n.powi(-(s as i64));
    // N^{1−s}/(s−1) + N^{−s}/2
    acc = &acc + &(&(&n_s * &big_n) / &BigReal::from_i64(s as i64 - 1, wp));
    acc = &acc + &n_s.ldexp(-1);
    let tol = BigReal::from_i64(1, wp).ldexp(-((wp as f64 * 3.33) as i64 + 8));
    let inv_n2 = (&big_n * &big_n).recip();
    // Rising product s(s+1)…(s+2j−2) and N^{−s−2j+1}.
    let mut rising = Rational::from_integer(BigInt::from(s));
    let mut pw = &n_s / &big_n;
    let mut prev: Option<BigReal> = None;
    for j in 1..400u64 {
        let c = bernoulli(2 * j as usize) * &rising / Rational::from_integer(factorial(2 * j));
        let term = pw.mul_rat(&c);
        let mag = term.abs();
        if let Some(p) = &prev {
            if mag > *p {
                break;
            }
        }
        acc = &acc + &term;
        if mag < tol {
            break;
        }
        prev = Some(mag);
        rising *= Rational::from_integer(BigInt::from((s as u64 + 2 * j - 1) * (s as u64 + 2 * j)));
        pw = &pw * &inv_n2;
    }
    let v = acc.with_prec(prec);
    ZETA_CACHE.lock().unwrap().push(((s, prec), v.clone()));
    v
}

/// Euler's constant `γ` by Euler–Maclaurin on the harmonic numbers.
pub fn euler_gamma(prec: u32) -> BigReal {
    if let Some((_, v)) = GAMMA_CACHE.lock().unwrap().iter().find(|(k, _)| *k == prec) {
        return v.clone();
    }
    let wp = prec + 10;
    let n = em_cutoff(wp) as i64;
    let h: Rational = (1..=n).map(|k| Rational::new(1.into(), k.into())).sum();
    let big_n = BigReal::from_i64(n, wp);
    // γ = H_N − ln N − 1/(2N) + Σ B_{2j}/(2j·N^{2j})
    let mut acc = &BigReal::from_rational(&h, wp) - &big_n.ln();
    acc = &acc - &big_n.recip().ldexp(-1);
    let tol = BigReal::from_i64(1, wp).ldexp(-((wp as f64 * 3.33) as i64 + 8));
    let inv_n2 = (&big_n * &big_n).recip();
    let mut pw = inv_n2.clone();
    let mut prev: Option<BigReal> = None;
    for j in 1..400u64 {
        let c = bernoulli(2 * j as usize) / Rational::from_integer(BigInt::from(2 * j));
        let term = pw.mul_rat(&c);
        let mag = term.abs();
        if let Some(p) = &prev {
            if mag > *p {
                break;
            }
        }
        acc = &acc + &term;
        if mag < tol {
            break;
        }
        prev = Some(mag);
        pw = &pw * &inv_n2;
    }
    let v = acc.with_prec(prec);
    GAMMA_CACHE.lock().unwrap().push((prec, v.clone()));
    v
}

/// Harmonic number `H_n` exactly.
pub fn harmonic(n: u64) -> Rational {
    zeta_partial(n, &MzvIndex::new(&[1]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactcore::{int, rat};

    /// Brute-force oracle over all tuples in `1..=d`.
    fn brute(d: u64, s: &[u32], strict: bool) -> Rational {
        fn rec(d: u64, s: &[u32], strict: bool, upper: u64) -> Rational {
            if s.is_empty() {
                return Rational::one();
            }
            let mut acc = Rational::zero();
            for n in 1..=upper.min(d) {
                let next = if strict { n - 1 } else { n };
                acc += inv_pow(n, s[0]) * rec(d, &s[1..], strict, next);
            }
            acc
        }
        rec(d, s, strict, d)
    }

    #[test]
    fn partial_values() {
        assert_eq!(zeta_partial(3, &MzvIndex::new(&[2, 1])), rat(5, 12));
        assert_eq!(zeta_partial(7, &MzvIndex::empty()), int(1));
        assert_eq!(zeta_partial(2, &MzvIndex::new(&[1])), rat(3, 2));
        assert_eq!(zeta_partial(1, &MzvIndex::new(&[2, 1])), int(0));
        assert_eq!(sym_sum(2, &SymSumIndex::new(&[1, 1])), rat(7, 4));
        assert_eq!(sym_sum(1, &SymSumIndex::new(&[3, 1, 2])), int(1));
        assert_eq!(sym_sum(0, &SymSumIndex::new(&[1])), int(0));
        for s in [&[2u32, 1, 3][..], &[1, 1, 1], &[3, 2]] {
            for d in 0..7 {
                assert_eq!(zeta_partial(d, &MzvIndex::new(s)), brute(d, s, true));
                assert_eq!(sym_sum(d, &SymSumIndex::new(s)), brute(d, s, false));
            }
        }
    }

    #[test]
    fn expansions() {
        assert_eq!(
            stuffle_expand(&SymSumIndex::new(&[1, 1])),
            MzvCombination::zeta(&[1, 1]).add(&MzvCombination::zeta(&[2]))
        );
        assert_eq!(
            stuffle_expand(&SymSumIndex::new(&[2, 1])),
            MzvCombination::zeta(&[2, 1]).add(&MzvCombination::zeta(&[3]))
        );
        assert_eq!(stuffle_expand(&SymSumIndex::new(&[4])), MzvCombination::zeta(&[4]));
    }

    #[test]
    fn products() {
        let z1 = MzvCombination::zeta(&[1]);
        let expect = MzvCombination::zeta(&[1, 1]).scale(&int(2)).add(&MzvCombination::zeta(&[2]));
        assert_eq!(stuffle_product(&z1, &z1), expect);
        let z2 = MzvCombination::zeta(&[2]);
        assert_eq!(stuffle_product(&z2, &MzvCombination::one()), z2);
        let p = stuffle_product(&z2, &z1);
        let expect = MzvCombination::zeta(&[2, 1])
            .add(&MzvCombination::zeta(&[1, 2]))
            .add(&MzvCombination::zeta(&[3]));
        assert_eq!(p, expect);
        for d in 1..=15 {
            assert_eq!(p.evaluate(d), z2.evaluate(d) * z1.evaluate(d));
        }
    }

    #[test]
    fn parses_compositions() {
        assert_eq!(MzvIndex::parse("2,1").unwrap(), MzvIndex::new(&[2, 1]));
        assert_eq!(SymSumIndex::parse("{1}^3,2").unwrap(), SymSumIndex::new(&[1, 1, 1, 2]));
        assert_eq!(MzvIndex::parse("()").unwrap(), MzvIndex::empty());
        assert!(MzvIndex::parse("2,0").is_err());
        assert!(MzvIndex::parse("a").is_err());
    }

    #[test]
    fn scan_matches_direct_and_crosses_over() {
        let comps = vec![vec![2, 1], vec![1, 1, 2], vec![3]];
        let mut strict = ZetaScan::new(SumKind::Strict, &comps, 10, 40);
        let mut weak = ZetaScan::new(SumKind::Weak, &comps, 10, 40);
        strict.advance_to(10);
        weak.advance_to(10);
        for c in &comps {
            assert_eq!(strict.exact(c).unwrap(), zeta_partial(10, &MzvIndex(c.clone())));
            assert_eq!(weak.exact(c).unwrap(), sym_sum(10, &SymSumIndex(c.clone())));
        }
        strict.advance_to(25);
        weak.advance_to(25);
        assert!(strict.exact(&[2, 1]).is_none());
        for c in &comps {
            let z = BigReal::from_rational(&zeta_partial(25, &MzvIndex(c.clone())), 40);
            assert!(strict.value(c).dist(&z).to_f64() < 1e-35);
            let s = BigReal::from_rational(&sym_sum(25, &SymSumIndex(c.clone())), 40);
            assert!(weak.value(c).dist(&s).to_f64() < 1e-35);
        }
    }

    #[test]
    fn full_zeta_values() {
        let pi = BigReal::pi(60);
        let z2 = &(&pi * &pi) / &BigReal::from_i64(6, 60);
        assert!(zeta_value(2, 50).dist(&z2).to_f64() < 1e-45);
        let pi4 = pi.powi(4);
        let z4 = &pi4 / &BigReal::from_i64(90, 60);
        assert!(zeta_value(4, 50).dist(&z4).to_f64() < 1e-45);
        let z3 = BigReal::parse("1.2020569031595942853997381615114499907649862923404988817922", 60).unwrap();
        assert!(zeta_value(3, 50).dist(&z3).to_f64() < 1e-45);
        let g = BigReal::parse("0.5772156649015328606065120900824024310421593359399235988057", 60).unwrap();
        assert!(euler_gamma(50).dist(&g).to_f64() < 1e-45);
    }

    #[test]
    fn divergent_index_rejected() {
        assert!(matches!(zeta_limit(&MzvIndex::new(&[1, 2]), 10), Err(Error::DivergentIndex(_))));
    }
}
