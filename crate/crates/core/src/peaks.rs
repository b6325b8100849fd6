//! Laplace's method for hypergeometric-type power series
//! `F(x) = Σ_n Π Γ(α_r n + a_r) / Π Γ(β_r n + b_r) · xⁿ`: peak location,
//! head/tail masses outside a shrinking window, the superpolynomial-peaking
//! defect and comparison with the Stokes asymptotic.

use std::fmt;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::exactcore::{int, rat_to_f64, BigReal, Rational};
use crate::mzv::{SumKind, ZetaScan};
use crate::{Error, Result};

/// Number of consecutive negligible terms that ends a summation.
const TAIL_RUN: usize = 200;

#[derive(Debug, Clone, PartialEq)]
pub struct PeakSeriesParams {
    pub alphas: Vec<Rational>,
    pub a: Vec<Rational>,
    pub betas: Vec<Rational>,
    pub b: Vec<Rational>,
    /// `Σβ − Σα`
    pub kappa: Rational,
    /// `Π α^α · Π β^{−β}`
    pub h: BigReal,
    /// `Σa − Σb + κ/2`
    pub theta: Rational,
    pub prec: u32,
}

pub fn series_params(
    alphas: &[Rational],
    a: &[Rational],
    betas: &[Rational],
    b: &[Rational],
    prec: u32,
) -> Result<PeakSeriesParams> {
    let bad = |m: String| Err(Error::InvalidSeries(m));
    if alphas.len() != a.len() || betas.len() != b.len() {
        return bad("each scale needs exactly one shift".into());
    }
    if alphas.iter().chain(betas).any(|x| *x <= int(0)) {
        return bad("scales must be positive".into());
    }
    if a.iter().chain(b).any(|x| *x <= int(0)) {
        return bad("shifts must be positive".into());
    }
    let sum = |v: &[Rational]| v.iter().fold(Rational::zero(), |s, x| s + x);
    let kappa = sum(betas) - sum(alphas);
    if kappa < int(1) {
        return bad(format!("kappa = {kappa} < 1"));
    }
    let theta = sum(a) - sum(b) + &kappa / int(2);
    let xlogx = |r: &Rational| {
        let x = BigReal::from_rational(r, prec);
        &x * &x.ln()
    };
    let ln_h = alphas
        .iter()
        .map(xlogx)
        .fold(BigReal::from_i64(0, prec), |s, t| &s + &t)
        - betas.iter().map(xlogx).fold(BigReal::from_i64(0, prec), |s, t| &s + &t);
    Ok(PeakSeriesParams {
        alphas: alphas.to_vec(),
        a: a.to_vec(),
        betas: betas.to_vec(),
        b: b.to_vec(),
        kappa,
        h: ln_h.exp(),
        theta,
        prec,
    })
}

impl PeakSeriesParams {
    /// `1/n!²`, the twistor quantum period.
    pub fn twistor_period(prec: u32) -> Self {
        series_params(&[], &[], &[int(1), int(1)], &[int(1), int(1)], prec).expect("valid")
    }

    /// `1/n!^{N+1}`, the `ℂPᴺ` quantum period.
    pub fn cpn_period(n: u32, prec: u32) -> Self {
        let ones = vec![int(1); n as usize + 1];
        series_params(&[], &[], &ones, &ones, prec).expect("valid")
    }

    /// Peak estimator `f(x) = (hx)^{1/κ}`.
    pub fn peak(&self, x: &BigReal) -> BigReal {
        (&self.h * x).ln().mul_rat(&(Rational::one() / &self.kappa)).exp()
    }

    fn ln_coeff(&self, n: u64) -> BigReal {
        let p = self.prec;
        let lg = |s: &Rational, sh: &Rational| BigReal::from_rational(&(s * int(n as i64) + sh), p).ln_gamma();
        let up = self
            .alphas
            .iter()
            .zip(&self.a)
            .fold(BigReal::from_i64(0, p), |acc, (s, sh)| &acc + &lg(s, sh));
        let down = self
            .betas
            .iter()
            .zip(&self.b)
            .fold(BigReal::from_i64(0, p), |acc, (s, sh)| &acc + &lg(s, sh));
        up - down
    }

    /// Terms `a_n xⁿ` scaled by `e^{−max}`, summed until past the peak every
    /// term in a run of 200 is below `10^{−(P+10)}` of the running sum.
    pub fn terms(&self, x: &BigReal) -> SeriesTerms {
        let p = self.prec;
        let lnx = x.ln();
        let cut = BigReal::from_i64(p as i64 + 10, p) * BigReal::from_i64(10, p).ln();
        let mut logs: Vec<BigReal> = Vec::new();
        let mut max: Option<BigReal> = None;
        let mut run = 0usize;
        let peak = self.peak(x).to_f64();
        for n in 0u64.. {
            let l = &self.ln_coeff(n) + &lnx.mul_rat(&int(n as i64));
            if max.as_ref().map_or(true, |m| l > *m) {
                max = Some(l.clone());
            }
            let m = max.as_ref().unwrap();
            let small = &(m - &l) > &cut;
            logs.push(l);
            if small && (n as f64) > peak {
                run += 1;
                if run >= TAIL_RUN {
                    break;
                }
            } else {
                run = 0;
            }
        }
        let max = max.unwrap();
        let weights: Vec<BigReal> = logs.iter().map(|l| (l - &max).exp()).collect();
        let total = weights.iter().fold(BigReal::from_i64(0, p), |s, w| &s + w);
        SeriesTerms {
            ln_scale: max,
            weights,
            total,
            prec: p,
        }
    }
}

/// Scaled terms `w_n = a_n xⁿ e^{−ln_scale}`; `F(x) = total·e^{ln_scale}`.
#[derive(Debug, Clone)]
pub struct SeriesTerms {
    pub ln_scale: BigReal,
    pub weights: Vec<BigReal>,
    pub total: BigReal,
    prec: u32,
}

impl SeriesTerms {
    pub fn ln_sum(&self) -> BigReal {
        &self.total.ln() + &self.ln_scale
    }

    /// `Σ_{lo ≤ n ≤ hi} w_n / total` (hi clipped to the computed range).
    pub fn mass(&self, lo: u64, hi: u64) -> BigReal {
        let zero = BigReal::from_i64(0, self.prec);
        if lo as usize >= self.weights.len() || lo > hi {
            return zero;
        }
        let hi = (hi as usize).min(self.weights.len() - 1);
        let s = self.weights[lo as usize..=hi].iter().fold(zero, |s, w| &s + w);
        s / self.total.clone()
    }
}

/// `N± = ⌊(1 ± ε) f(x)⌋` with `ε = x^{−ν}`.
#[derive(Debug, Clone)]
pub struct TailWindow {
    pub x: BigReal,
    pub nu: Rational,
    pub eps: BigReal,
    pub n_minus: u64,
    pub n_plus: u64,
}

impl TailWindow {
    pub fn new(params: &PeakSeriesParams, x: &BigReal, nu: &Rational) -> Self {
        let p = params.prec;
        let eps = if nu.is_zero() {
            BigReal::from_i64(1, p)
        } else {
            x.ln().mul_rat(&-nu).exp()
        };
        let f = params.peak(x);
        let one = BigReal::from_i64(1, p);
        let lo = &(&one - &eps) * &f;
        let hi = &(&one + &eps) * &f;
        let floor = |v: &BigReal| {
            let k = v.floor();
            u64::try_from(k).unwrap_or(0)
        };
        TailWindow {
            x: x.clone(),
            nu: nu.clone(),
            eps,
            n_minus: floor(&lo),
            n_plus: floor(&hi),
        }
    }
}

/// Head mass `n ≤ N₋`, window mass `N₋ < n < N₊` and tail mass `n ≥ N₊`,
/// each relative to `F(x)`.
#[derive(Debug, Clone)]
pub struct TailRatios {
    pub window: TailWindow,
    pub head: BigReal,
    pub middle: BigReal,
    pub tail: BigReal,
}

pub fn tail_ratios(params: &PeakSeriesParams, x: &BigReal, nu: &Rational) -> TailRatios {
    let terms = params.terms(x);
    tail_ratios_from(&terms, params, x, nu)
}

fn tail_ratios_from(terms: &SeriesTerms, params: &PeakSeriesParams, x: &BigReal, nu: &Rational) -> TailRatios {
    let w = TailWindow::new(params, x, nu);
    let head = terms.mass(0, w.n_minus);
    let tail = terms.mass(w.n_plus, u64::MAX);
    let middle = if w.n_plus > w.n_minus + 1 {
        terms.mass(w.n_minus + 1, w.n_plus - 1)
    } else {
        BigReal::from_i64(0, params.prec)
    };
    TailRatios {
        window: w,
        head,
        middle,
        tail,
    }
}

/// Subpolynomially increasing weights `b_n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum ScalingSequence {
    Constant,
    Harmonic,
    /// Weak nested sum `S_n(k₁, …)`.
    SymSum(Vec<u32>),
    /// `ln(1 + n)^j`
    LogPower(u32),
}

impl ScalingSequence {
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Parse(format!("unknown scaling sequence `{s}`"));
        match s {
            "1" | "one" | "constant" => return Ok(ScalingSequence::Constant),
            "h" | "harmonic" => return Ok(ScalingSequence::Harmonic),
            _ => {}
        }
        if let Some(rest) = s.strip_prefix("symsum:") {
            let comp: Vec<u32> = rest
                .split(',')
                .map(|t| t.trim().parse::<u32>().map_err(|_| bad()))
                .collect::<Result<_>>()?;
            if comp.is_empty() || comp.contains(&0) {
                return Err(bad());
            }
            return Ok(ScalingSequence::SymSum(comp));
        }
        if let Some(rest) = s.strip_prefix("logpow:") {
            return rest.trim().parse().map(ScalingSequence::LogPower).map_err(|_| bad());
        }
        Err(bad())
    }

    /// A constant `B` with `b_n ≤ B·n` for all `n ≥ 1`.
    pub fn bound(&self) -> Rational {
        let pow = |m: u32| int((m as i64).pow(m));
        match self {
            ScalingSequence::Constant | ScalingSequence::Harmonic => int(1),
            // S_n ≤ H_n^m ≤ (1 + ln n)^m ≤ m^m·n
            ScalingSequence::SymSum(c) => pow(c.len() as u32),
            // ln(1+n) ≤ j·n^{1/j}
            ScalingSequence::LogPower(j) => pow((*j).max(1)),
        }
    }

    /// `b_0, …, b_{n_max}`.
    pub fn values(&self, n_max: u64, prec: u32) -> Vec<BigReal> {
        let mut out = Vec::with_capacity(n_max as usize + 1);
        match self {
            ScalingSequence::Constant => out.resize(n_max as usize + 1, BigReal::from_i64(1, prec)),
            ScalingSequence::Harmonic => {
                let mut h = BigReal::from_i64(0, prec);
                out.push(h.clone());
                for n in 1..=n_max {
                    h = &h + &BigReal::from_i64(n as i64, prec).recip().with_prec(prec);
                    out.push(h.clone());
                }
            }
            ScalingSequence::SymSum(c) => {
                let mut scan = ZetaScan::new(SumKind::Weak, &[c.clone()], 0, prec);
                for n in 0..=n_max {
                    scan.advance_to(n);
                    out.push(scan.value(c));
                }
            }
            ScalingSequence::LogPower(j) => {
                for n in 0..=n_max {
                    out.push(BigReal::from_i64(n as i64 + 1, prec).ln().powi(*j as i64));
                }
            }
        }
        out
    }
}

impl fmt::Display for ScalingSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScalingSequence::Constant => write!(f, "constant"),
            ScalingSequence::Harmonic => write!(f, "harmonic"),
            ScalingSequence::SymSum(c) => {
                let s: Vec<String> = c.iter().map(|k| k.to_string()).collect();
                write!(f, "symsum:{}", s.join(","))
            }
            ScalingSequence::LogPower(j) => write!(f, "logpow:{j}"),
        }
    }
}

/// `|Σ_{n≥1} a_n b_n ln(n)^k xⁿ − ln(f(x))^k Σ_{n≥1} a_n b_n xⁿ| / F(x)`.
pub fn peaking_defect(params: &PeakSeriesParams, x: &BigReal, b_seq: &ScalingSequence, k: u32) -> BigReal {
    let terms = params.terms(x);
    peaking_defect_from(&terms, params, x, b_seq, k)
}

fn peaking_defect_from(
    terms: &SeriesTerms,
    params: &PeakSeriesParams,
    x: &BigReal,
    b_seq: &ScalingSequence,
    k: u32,
) -> BigReal {
    let p = params.prec;
    let n_max = terms.weights.len() as u64 - 1;
    let bs = b_seq.values(n_max, p);
    let zero = BigReal::from_i64(0, p);
    let mut g0 = zero.clone();
    let mut gk = zero.clone();
    for n in 1..=n_max as usize {
        let wb = &terms.weights[n] * &bs[n];
        // ln(n)^0 is taken as exactly 1 so the k = 0 defect cancels exactly.
        let lnk = if k == 0 { wb.clone() } else { &wb * &BigReal::from_i64(n as i64, p).ln().powi(k as i64) };
        gk = &gk + &lnk;
        g0 = &g0 + &wb;
    }
    let lf = if k == 0 { BigReal::from_i64(1, p) } else { params.peak(x).ln().powi(k as i64) };
    (&gk - &(&lf * &g0)).abs() / terms.total.clone()
}

/// `F(x)` over `(2π)^{(1−κ)/2} κ^{−1/2} x^{(θ+1/2)/κ} exp(κ x^{1/κ})`, for
/// unit scales `α_r = β_r = 1`.
pub fn stokes_ratio(params: &PeakSeriesParams, x: &BigReal) -> Result<BigReal> {
    let terms = params.terms(x);
    stokes_ratio_from(&terms, params, x)
}

fn stokes_ratio_from(terms: &SeriesTerms, params: &PeakSeriesParams, x: &BigReal) -> Result<BigReal> {
    if params.alphas.iter().chain(&params.betas).any(|s| !s.is_one()) {
        return Err(Error::Unsupported(
            "the Stokes form needs every scale alpha_r, beta_r equal to 1".into(),
        ));
    }
    let p = params.prec;
    let k = &params.kappa;
    let lnx = x.ln();
    let two_pi = BigReal::pi(p).mul_rat(&int(2));
    let half = Rational::new(1.into(), 2.into());
    let ln_asym = two_pi.ln().mul_rat(&((Rational::one() - k) / int(2)))
        - BigReal::from_rational(k, p).ln().mul_rat(&half)
        + lnx.mul_rat(&((&params.theta + &half) / k))
        + lnx.mul_rat(&(Rational::one() / k)).exp().mul_rat(k);
    Ok((terms.ln_sum() - ln_asym).exp())
}

/// Least-squares fit of `ln(−ln r) = ln a + β ln x`, returning `(a, β)`.
/// Descriptive only.
pub fn decay_rate_fit(xs: &[f64], ratios: &[f64]) -> Option<(f64, f64)> {
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(ratios)
        .filter(|(_, r)| **r > 0.0 && **r < 1.0)
        .map(|(x, r)| (x.ln(), (-r.ln()).ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let (mx, my) = (sx / n, sy / n);
    let sxx: f64 = pts.iter().map(|(x, _)| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let beta = sxy / sxx;
    Some(((my - beta * mx).exp(), beta))
}

/// One row of a scan: every diagnostic at one `x`.
#[derive(Debug, Clone, Serialize)]
pub struct PeakScanRow {
    pub x: f64,
    pub n_minus: u64,
    pub n_plus: u64,
    pub head: f64,
    pub tail: f64,
    pub defect: f64,
    pub stokes: Option<f64>,
}

/// Evaluates head/tail ratios, the defect and (when defined) the Stokes ratio
/// at each `x`, sharing the summed terms.
pub fn scan(params: &PeakSeriesParams, xs: &[BigReal], nu: &Rational, b_seq: &ScalingSequence, k: u32) -> Vec<PeakScanRow> {
    xs.iter()
        .map(|x| {
            let terms = params.terms(x);
            let t = tail_ratios_from(&terms, params, x, nu);
            PeakScanRow {
                x: x.to_f64(),
                n_minus: t.window.n_minus,
                n_plus: t.window.n_plus,
                head: t.head.to_f64(),
                tail: t.tail.to_f64(),
                defect: peaking_defect_from(&terms, params, x, b_seq, k).to_f64(),
                stokes: stokes_ratio_from(&terms, params, x).ok().map(|r| r.to_f64()),
            }
        })
        .collect()
}

/// CSV with header `x,head,tail,defect,stokes`.
pub fn scan_csv(rows: &[PeakScanRow]) -> String {
    let mut s = String::from("x,head,tail,defect,stokes\n");
    for r in rows {
        let st = r.stokes.map(|v| format!("{v:.12e}")).unwrap_or_default();
        s.push_str(&format!("{:e},{:.6e},{:.6e},{:.6e},{st}\n", r.x, r.head, r.tail, r.defect));
    }
    s
}

/// `ν` as a float, for reports.
pub fn nu_f64(nu: &Rational) -> f64 {
    rat_to_f64(nu)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactcore::rat;

    const P: u32 = 30;

    fn x(v: i64) -> BigReal {
        BigReal::from_i64(v, P)
    }

    #[test]
    fn parameters() {
        let q = PeakSeriesParams::twistor_period(P);
        assert_eq!(q.kappa, int(2));
        assert_eq!(q.theta, int(-1));
        assert!(q.h.dist(&x(1)).to_f64() < 1e-25);
        let c = PeakSeriesParams::cpn_period(3, P);
        assert_eq!(c.kappa, int(4));
        let e = series_params(&[int(1)], &[int(1)], &[int(1)], &[int(1)], P);
        assert!(matches!(e, Err(Error::InvalidSeries(_))));
        let h = series_params(&[int(2)], &[int(1)], &[int(3), int(1)], &[int(1), int(1)], P).unwrap();
        // 2²·3⁻³
        assert!((h.h.to_f64() - 4.0 / 27.0).abs() < 1e-14);
    }

    #[test]
    fn exponential_series_matches_stokes() {
        let p = series_params(&[], &[], &[int(1)], &[int(1)], P).unwrap();
        assert_eq!(p.theta, rat(-1, 2));
        let r = stokes_ratio(&p, &x(1000)).unwrap();
        assert!((r.to_f64() - 1.0).abs() < 1e-3, "{r}");
    }

    #[test]
    fn bessel_oracle() {
        // Σ xⁿ/n!² = I₀(2√x) ~ e^{2√x}/(2√π x^{1/4})·(1 + 1/(16√x) + …)
        let p = PeakSeriesParams::twistor_period(P);
        let xv = 10_000.0f64;
        let r = stokes_ratio(&p, &x(10_000)).unwrap().to_f64();
        let corr = 1.0 + 1.0 / (16.0 * xv.sqrt());
        assert!((r - corr).abs() < 1e-5, "{r}");
        let bad = series_params(&[], &[], &[int(2)], &[int(1)], P).unwrap();
        assert!(matches!(stokes_ratio(&bad, &x(100)), Err(Error::Unsupported(_))));
    }

    #[test]
    fn masses_partition_unity() {
        let p = PeakSeriesParams::twistor_period(P);
        for xv in [100, 5000] {
            let t = tail_ratios(&p, &x(xv), &rat(2, 5));
            let sum = &(&t.head + &t.middle) + &t.tail;
            assert!(sum.dist(&x(1)).to_f64() < 1e-20);
            assert!(t.window.n_minus <= t.window.n_plus);
        }
        let t = tail_ratios(&p, &x(400), &int(0));
        assert_eq!(t.window.n_minus, 0);
        let terms = p.terms(&x(400));
        assert!(t.head.dist(&(terms.weights[0].clone() / terms.total.clone())).to_f64() < 1e-25);
    }

    #[test]
    fn defect_vanishes_at_k_zero() {
        let p = PeakSeriesParams::twistor_period(P);
        for b in [ScalingSequence::Constant, ScalingSequence::Harmonic, ScalingSequence::LogPower(2)] {
            assert!(peaking_defect(&p, &x(2000), &b, 0).is_zero());
        }
        let d1 = peaking_defect(&p, &x(1000), &ScalingSequence::Harmonic, 1).to_f64();
        let d2 = peaking_defect(&p, &x(10000), &ScalingSequence::Harmonic, 1).to_f64();
        assert!(d2 < d1, "{d1} {d2}");
    }

    #[test]
    fn scaling_sequences() {
        for s in ["constant", "harmonic", "symsum:1,1", "logpow:2"] {
            let seq = ScalingSequence::parse(s).unwrap();
            assert_eq!(seq.to_string(), s);
            let v = seq.values(300, 20);
            let b = BigReal::from_rational(&seq.bound(), 20);
            for n in 1..300usize {
                assert!(v[n + 1] >= v[n]);
                assert!(v[n] <= b.mul_rat(&int(n as i64)));
            }
        }
        assert!(ScalingSequence::parse("symsum:").is_err());
        let v = ScalingSequence::SymSum(vec![1, 1]).values(3, 20);
        // S_3(1,1) = Σ_{3≥k1≥k2} 1/(k1 k2) = 1 + 1/2 + 1/4 + 1/3 + 1/6 + 1/9
        assert!((v[3].to_f64() - (1.0 + 0.5 + 0.25 + 1.0 / 3.0 + 1.0 / 6.0 + 1.0 / 9.0)).abs() < 1e-15);
    }

    #[test]
    fn rate_fit_recovers_exponent() {
        let xs = [10.0, 100.0, 1000.0];
        let rs: Vec<f64> = xs.iter().map(|x: &f64| (-0.5 * x.powf(0.3)).exp()).collect();
        let (a, b) = decay_rate_fit(&xs, &rs).unwrap();
        assert!((a - 0.5).abs() < 1e-9 && (b - 0.3).abs() < 1e-9);
    }
}
