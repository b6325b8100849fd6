//! The end-to-end verification suite: nine criteria, each a list of checked
//! rows. Every row names the statement it checks in its `anchor`.

use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cohmodel::{BlockId, SpaceId, SpaceModel};
use crate::config::RunConfig;
use crate::dmod::{
    associated_operator, connection_irregularity, cyclic_vectors, default_candidates, exp_type_report, irregularity,
    main_block_connection, random_invertible, y_block_connection, DiffOperator, FormalConnection, Verdict,
    RANDOM_CANDIDATES,
};
use crate::exactcore::{factorial, int, rat, rat_to_f64, BigReal, Poly, Rational};
use crate::gammalimit::{check_twistor_identities, direct_limit, h_poly, limit_report, Extrapolation};
use crate::jfun::{closed_form_keys, desc_closed_form, twistor_j_coeff, twistor_j_formula, DescendantKey, DescendantTable, Insertion};
use crate::mzv::{
    stuffle_expand, stuffle_product, sym_sum, zeta_limit_with, zeta_partial, MzvCombination, MzvIndex, SumKind,
    SymSumIndex, ZetaScan,
};
use crate::peaks::{scan, PeakSeriesParams, ScalingSequence};

/// One checked statement.
#[derive(Debug, Clone, Serialize)]
pub struct CheckRow {
    pub name: String,
    pub anchor: String,
    pub pass: bool,
    pub detail: String,
    /// Set when the row fails and the failure is a documented gap.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub known_gap: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CriterionReport {
    pub id: u32,
    pub title: String,
    pub pass: bool,
    pub rows: Vec<CheckRow>,
    #[serde(skip)]
    pub elapsed: Duration,
}

impl CriterionReport {
    /// Failing rows that are not documented gaps.
    pub fn unexpected_failures(&self) -> impl Iterator<Item = &CheckRow> {
        self.rows.iter().filter(|r| !r.pass && r.known_gap.is_none())
    }
}

/// Rows whose failure is understood and recorded: `(criterion, row name, reason)`.
pub const KNOWN_GAPS: &[(u32, &str, &str)] = &[
    (
        5,
        "R3 χ",
        "the partial sum zeta_n(2,1) converges like (ln n)/n; one Richardson step leaves a ln 2/n residue, \
         far above the ln(n)/n^2 tolerance",
    ),
    (
        7,
        "head ratio < 1e-3 at x = 1e4",
        "the window eps*f(x) = x^(1/2 - nu) is narrower than the peak width x^(1/4) for nu = 2/5",
    ),
    (
        7,
        "tail ratio < 1e-3 at x = 1e4",
        "the window eps*f(x) = x^(1/2 - nu) is narrower than the peak width x^(1/4) for nu = 2/5",
    ),
    (7, "head ratio strictly decreasing", "the head mass grows towards 1/2 as the window shrinks relative to the peak"),
    (7, "tail ratio strictly decreasing", "the tail mass grows towards 1/2 as the window shrinks relative to the peak"),
];

pub const CRITERIA: [u32; 9] = [1, 2, 3, 4, 5, 6, 7, 8, 9];

pub fn title(id: u32) -> &'static str {
    match id {
        1 => "descendant closed forms agree with the recursion",
        2 => "twistor J-coefficients from descendants",
        3 => "projective space J-coefficients are loop-space Euler classes",
        4 => "multiple zeta value algebra and identities",
        5 => "Apéry limits of the twistor J-function",
        6 => "direct Gamma limit for CP2 and CP3",
        7 => "peaking of the twistor quantum period",
        8 => "irregularity and exponential type of the quantum connection",
        9 => "structural tables and quantum relations",
        _ => "unknown criterion",
    }
}

/// Criteria relevant to one space: `cpn:N` selects the projective checks,
/// `twistor` everything else.
pub fn criteria_for(space: Option<SpaceId>) -> Vec<u32> {
    match space {
        None => CRITERIA.to_vec(),
        Some(SpaceId::Cpn(_)) => vec![3, 6],
        Some(SpaceId::Twistor) => vec![1, 2, 4, 5, 7, 8, 9],
    }
}

pub fn run(id: u32, cfg: &RunConfig) -> CriterionReport {
    let start = Instant::now();
    let mut rows = match id {
        1 => closed_forms(cfg),
        2 => twistor_j(cfg),
        3 => cpn_identity(),
        4 => mzv_algebra(cfg),
        5 => apery_limits(cfg),
        6 => cpn_direct_limit(cfg),
        7 => peaking(cfg),
        8 => dmodule(cfg),
        9 => structural(cfg),
        _ => vec![row(&format!("criterion {id}"), "none", false, "no such criterion".into())],
    };
    for r in &mut rows {
        if !r.pass {
            r.known_gap = KNOWN_GAPS
                .iter()
                .find(|(c, name, _)| *c == id && *name == r.name)
                .map(|(_, _, why)| why.to_string());
        }
    }
    CriterionReport {
        id,
        title: title(id).to_string(),
        pass: rows.iter().all(|r| r.pass),
        rows,
        elapsed: start.elapsed(),
    }
}

/// Runs the given criteria in order.
pub fn verify_all(cfg: &RunConfig, ids: &[u32]) -> Vec<CriterionReport> {
    ids.iter().map(|&id| run(id, cfg)).collect()
}

fn row(name: &str, anchor: &str, pass: bool, detail: String) -> CheckRow {
    CheckRow {
        name: name.to_string(),
        anchor: anchor.to_string(),
        pass,
        detail,
        known_gap: None,
    }
}

fn inv_dfact2(d: u64) -> Rational {
    let f = factorial(d);
    Rational::new(BigInt::one(), &f * &f)
}

fn closed_forms(cfg: &RunConfig) -> Vec<CheckRow> {
    let mut rows = Vec::new();
    for chi in &cfg.chi_samples {
        let mut t = DescendantTable::new(chi.clone());
        let mut total = 0;
        let mut bad = Vec::new();
        for d in 1..=8 {
            for key in closed_form_keys(d) {
                total += 1;
                let got = t.invariant(&key);
                let cf = desc_closed_form(&key);
                let ok = match (&got, &cf) {
                    (Ok(g), Ok(c)) => *g == if c.chi_flag { &c.value * chi } else { c.value.clone() },
                    _ => false,
                };
                if !ok {
                    bad.push(format!("d={d} {:?}", key.first));
                }
            }
        }
        rows.push(row(
            &format!("eight families, d ≤ 8, χ = {chi}"),
            "descendant closed forms through weak symmetric sums",
            bad.is_empty(),
            format!("{} of {total} agree{}", total - bad.len(), mismatch_suffix(&bad)),
        ));
    }
    let mut t = DescendantTable::new(int(1));
    let mut bad = Vec::new();
    // Vol_Z = α³Vol_M / ∫α³Vol_M, with Vol_M = τ*χ at χ = 1.
    let top = SpaceModel::twistor().pairing[7].clone();
    for d in 1..=10u32 {
        let key = DescendantKey::one(d, Insertion::alpha_vol(3));
        let v = t.invariant(&key);
        let f = inv_dfact2(d as u64);
        match v {
            Ok(v) if v == int(8) * &f && &v / &top == f => {}
            Ok(v) => bad.push(format!("d={d}: {v}")),
            Err(e) => bad.push(format!("d={d}: {e}")),
        }
    }
    rows.push(row(
        "α³Vol_M = 8/d!² and Vol_Z = 1/d!², d ≤ 10",
        "point-class descendants of the twistor space",
        bad.is_empty(),
        format!("checked d = 1..10{}", mismatch_suffix(&bad)),
    ));
    rows
}

fn mismatch_suffix(bad: &[String]) -> String {
    if bad.is_empty() {
        String::new()
    } else {
        format!("; mismatches: {}", bad.join(", "))
    }
}

fn twistor_j(cfg: &RunConfig) -> Vec<CheckRow> {
    let model = SpaceModel::twistor();
    let mut rows = Vec::new();
    for chi in &cfg.chi_samples {
        let mut t = DescendantTable::new(chi.clone());
        let mut bad = Vec::new();
        let mut bad_pt = Vec::new();
        for d in 1..=8 {
            match twistor_j_coeff(d, chi, &mut t) {
                Ok(j) => {
                    if j.normalized != twistor_j_formula(d) {
                        bad.push(format!("d={d}"));
                    }
                    if model.pt_pairing(&j.raw) != inv_dfact2(d) {
                        bad_pt.push(format!("d={d}"));
                    }
                }
                Err(e) => bad.push(format!("d={d}: {e}")),
            }
        }
        rows.push(row(
            &format!("assembly = weak-sum formula, d ≤ 8, χ = {chi}"),
            "twistor J-function through weak symmetric sums",
            bad.is_empty(),
            format!("d = 1..8{}", mismatch_suffix(&bad)),
        ));
        rows.push(row(
            &format!("pt pairing = 1/d!², d ≤ 8, χ = {chi}"),
            "twistor quantum period",
            bad_pt.is_empty(),
            format!("d = 1..8{}", mismatch_suffix(&bad_pt)),
        ));
    }
    rows
}

fn cpn_identity() -> Vec<CheckRow> {
    (1..=6u32)
        .map(|big_n| {
            let model = SpaceModel::cpn(big_n);
            let bad: Vec<String> = (0..=25u64)
                .filter(|&n| {
                    crate::jfun::j_coeff(SpaceId::Cpn(big_n), n)
                        .map(|j| j.normalized != model.loop_euler_class(n))
                        .unwrap_or(true)
                })
                .map(|n| format!("n={n}"))
                .collect();
            row(
                &format!("CP{big_n}, n ≤ 25"),
                "normalized J-coefficient = inverse loop-space Euler class",
                bad.is_empty(),
                format!("n = 0..25{}", mismatch_suffix(&bad)),
            )
        })
        .collect()
}

/// All compositions of `w` into positive parts.
fn compositions(w: u32) -> Vec<Vec<u32>> {
    if w == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for first in 1..=w {
        for mut rest in compositions(w - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn mzv_algebra(cfg: &RunConfig) -> Vec<CheckRow> {
    let mut rows = Vec::new();
    let all: Vec<Vec<u32>> = (1..=5).flat_map(compositions).collect();

    let mut bad = Vec::new();
    for c in &all {
        let idx = SymSumIndex::new(c);
        let e = stuffle_expand(&idx);
        for d in 1..=15 {
            if sym_sum(d, &idx) != e.evaluate(d) {
                bad.push(format!("S({c:?}) at d={d}"));
            }
        }
    }
    rows.push(row(
        "stuffle expansion, weight ≤ 5, d ≤ 15",
        "weak sums as combinations of strict sums",
        bad.is_empty(),
        format!("{} compositions{}", all.len(), mismatch_suffix(&bad)),
    ));

    let mut bad = Vec::new();
    let mut pairs = 0;
    for x in &all {
        for y in &all {
            if x.iter().sum::<u32>() + y.iter().sum::<u32>() > 5 {
                continue;
            }
            pairs += 1;
            let p = stuffle_product(&MzvCombination::zeta(x), &MzvCombination::zeta(y));
            for d in 1..=15 {
                let lhs = p.evaluate(d);
                let rhs = zeta_partial(d, &MzvIndex::new(x)) * zeta_partial(d, &MzvIndex::new(y));
                if lhs != rhs {
                    bad.push(format!("{x:?}*{y:?} at d={d}"));
                }
            }
        }
    }
    rows.push(row(
        "stuffle product, total weight ≤ 5, d ≤ 15",
        "quasi-shuffle product of partial zeta values",
        bad.is_empty(),
        format!("{pairs} pairs{}", mismatch_suffix(&bad)),
    ));

    let n = 10_000u64;
    let prec = cfg.precision;
    let families: [(&str, &str, Vec<(i64, Vec<u32>)>); 3] = [
        ("ζ(2,1) = ζ(3)", "Euler's identity", vec![(1, vec![2, 1]), (-1, vec![3])]),
        (
            "ζ(2,3) + ζ(3,2) + ζ(4,1) = ζ(5)",
            "weight-5 sum theorem",
            vec![(1, vec![2, 3]), (1, vec![3, 2]), (1, vec![4, 1]), (-1, vec![5])],
        ),
        (
            "ζ(3,3) + ζ(4,2) = ζ(2,2,2) + ζ(2,3,1) + ζ(3,2,1)",
            "weight-6 cyclic sum identity",
            vec![(1, vec![3, 3]), (1, vec![4, 2]), (-1, vec![2, 2, 2]), (-1, vec![2, 3, 1]), (-1, vec![3, 2, 1])],
        ),
    ];
    let comps: Vec<Vec<u32>> = families.iter().flat_map(|f| f.2.iter().map(|t| t.1.clone())).collect();
    let mut scan = ZetaScan::new(SumKind::Strict, &comps, cfg.crossover, prec);
    scan.advance_to(n);
    let ln = (n as f64).ln();
    let scale = rat_to_f64(&cfg.tolerance_scale);
    let tol = scale * ln * ln / n as f64;
    for (name, anchor, terms) in &families {
        let v = terms.iter().fold(BigReal::from_i64(0, prec), |acc, (c, comp)| {
            &acc + &scan.value(comp).mul_rat(&int(*c))
        });
        let dev = v.abs().to_f64();
        rows.push(row(
            &format!("{name} at n = 10⁴"),
            anchor,
            dev <= tol,
            format!("|difference| = {dev:.3e}, tolerance {scale}·ln(n)²/n = {tol:.3e}"),
        ));
    }

    for (name, a, b) in [("ζ(2,1) vs ζ(3)", vec![2, 1], vec![3]), ("ζ(3,2) vs ζ(2,2,1)", vec![3, 2], vec![2, 2, 1])] {
        let la = zeta_limit_with(&MzvIndex::new(&a), n, cfg.crossover, prec);
        let lb = zeta_limit_with(&MzvIndex::new(&b), n, cfg.crossover, prec);
        let (pass, detail) = match (la, lb) {
            (Ok(x), Ok(y)) => (
                x.overlaps(&y),
                format!(
                    "[{}, {}] and [{}, {}]",
                    x.lower().to_sci_string(10),
                    x.upper().to_sci_string(10),
                    y.lower().to_sci_string(10),
                    y.upper().to_sci_string(10)
                ),
            ),
            (Err(e), _) | (_, Err(e)) => (false, e.to_string()),
        };
        rows.push(row(&format!("{name} brackets overlap at d = 10⁴"), "limit brackets of zeta values", pass, detail));
    }
    rows
}

fn apery_limits(cfg: &RunConfig) -> Vec<CheckRow> {
    let prec = cfg.precision;
    let scale = rat_to_f64(&cfg.tolerance_scale);
    let schedule = [50_000u64, 100_000];
    let rich = limit_report(SpaceId::Twistor, 6, &schedule, Extrapolation::Richardson, scale, cfg.crossover, prec);
    let raw = limit_report(SpaceId::Twistor, 6, &schedule[1..], Extrapolation::None, scale, cfg.crossover, prec);
    let mut rows: Vec<CheckRow> = rich
        .rows
        .iter()
        .zip(&raw.rows)
        .map(|(r, plain)| {
            row(
                &format!("R{} {}", r.i, r.coefficient),
                &format!("Apéry limit of R_{} against log Γ", r.i),
                r.pass,
                format!(
                    "richardson deviation {} (raw at n = 10⁵: {}), tolerance {} = {}",
                    r.deviation, plain.deviation, r.tolerance, r.tolerance_value
                ),
            )
        })
        .collect();
    for c in check_twistor_identities(50) {
        rows.push(row(
            &c.name,
            "finite-n reduction of R_i to multiple zeta values",
            c.symbolic && c.holds,
            format!("symbolic: {}, exact for n ≤ {}: {}", c.symbolic, c.exact_up_to, c.holds),
        ));
    }
    rows
}

fn cpn_direct_limit(cfg: &RunConfig) -> Vec<CheckRow> {
    let mut rows = Vec::new();
    for big_n in [2u32, 3] {
        for r in direct_limit(SpaceId::Cpn(big_n), 100_000, 1e-3, cfg.crossover, cfg.precision) {
            rows.push(row(
                &format!("CP{big_n} {}", r.coefficient),
                "e^{c1 ln n} times the loop-space Euler class tends to Γ",
                r.pass,
                format!("value {} target {} deviation {}", r.value, r.target, r.deviation),
            ));
        }
    }
    rows
}

/// Hankel expansion of `I₀(z)·√(2πz)·e^{−z}`, the ratio the Stokes form
/// should reproduce for `Σ xⁿ/n!² = I₀(2√x)`.
fn bessel_i0_ratio(x: f64) -> f64 {
    let z = 2.0 * x.sqrt();
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..8 {
        let k = k as f64;
        term *= (2.0 * k - 1.0).powi(2) / (8.0 * z * k);
        sum += term;
    }
    sum
}

fn peaking(cfg: &RunConfig) -> Vec<CheckRow> {
    let prec = cfg.precision;
    let params = PeakSeriesParams::twistor_period(prec);
    let xs: Vec<BigReal> = [1_000i64, 10_000, 100_000].iter().map(|&x| BigReal::from_i64(x, prec)).collect();
    let scan_rows = scan(&params, &xs, &cfg.nu, &ScalingSequence::Harmonic, 1);
    let heads: Vec<f64> = scan_rows.iter().map(|r| r.head).collect();
    let tails: Vec<f64> = scan_rows.iter().map(|r| r.tail).collect();
    let defects: Vec<f64> = scan_rows.iter().map(|r| r.defect).collect();
    let decreasing = |v: &[f64]| v.windows(2).all(|w| w[1] < w[0]);
    let show = |v: &[f64]| v.iter().map(|x| format!("{x:.3e}")).collect::<Vec<_>>().join(", ");
    let anchor = "Laplace concentration of a power series";
    let mut rows = vec![
        row(
            "head ratio < 1e-3 at x = 1e4",
            anchor,
            heads[1] < 1e-3,
            format!("head {:.3e} with ν = {}", heads[1], cfg.nu),
        ),
        row(
            "tail ratio < 1e-3 at x = 1e4",
            anchor,
            tails[1] < 1e-3,
            format!("tail {:.3e} with ν = {}", tails[1], cfg.nu),
        ),
        row(
            "head ratio strictly decreasing",
            anchor,
            decreasing(&heads),
            format!("x = 1e3, 1e4, 1e5: {}", show(&heads)),
        ),
        row(
            "tail ratio strictly decreasing",
            anchor,
            decreasing(&tails),
            format!("x = 1e3, 1e4, 1e5: {}", show(&tails)),
        ),
        row(
            "peaking defect (b = H_n, k = 1) decreasing",
            "logarithmic weights concentrate at the peak",
            decreasing(&defects),
            format!("x = 1e3, 1e4, 1e5: {}", show(&defects)),
        ),
    ];
    let x6 = BigReal::from_i64(1_000_000, prec);
    let stokes = scan(&params, &[x6], &cfg.nu, &ScalingSequence::Constant, 0)[0].stokes;
    let oracle = bessel_i0_ratio(1e6);
    match stokes {
        Some(s) => {
            rows.push(row(
                "Stokes ratio within 2% of 1 at x = 1e6",
                "exponential asymptotics of the quantum period",
                (s - 1.0).abs() <= 0.02,
                format!("ratio {s:.8}"),
            ));
            rows.push(row(
                "Stokes ratio matches the Bessel I0 expansion at x = 1e6",
                "quantum period is I0(2√x)",
                (s - oracle).abs() <= 1e-8,
                format!("ratio {s:.10}, Hankel expansion {oracle:.10}"),
            ));
        }
        None => rows.push(row(
            "Stokes ratio within 2% of 1 at x = 1e6",
            "exponential asymptotics of the quantum period",
            false,
            "ratio undefined".into(),
        )),
    }
    rows
}

fn dmodule(cfg: &RunConfig) -> Vec<CheckRow> {
    let mut rows = Vec::new();
    let q = &cfg.q;
    let seed = cfg.seed;
    let anchor = "irregularity of the quantum connection";
    let parse = |s: &str| DiffOperator::parse(s).expect("printed operator parses");

    // The printed operators are stated at q = 1.
    let y = match y_block_connection(2, &int(1)) {
        Ok(c) => c,
        Err(e) => return vec![row("y-block connection", anchor, false, e.to_string())],
    };
    let e0 = vec![int(1), int(0), int(0), int(0)];
    let printed_l = parse("d4:1; d2:-8/u^2; d1:16/u^2; d0:16/u^4-16/u^2");
    let printed_lt = parse("d4:1; d3:-8/u; d2:16/u^2+12/u; d1:-(32/u^2+8/u); d0:2/u+12/u^2");
    let l = associated_operator(&y, &e0);
    let lt = associated_operator(&y.twist(&int(-2)), &e0);
    match (&l, &lt) {
        (Ok(l), Ok(lt)) => {
            rows.push(row(
                "y-block operator L equals the printed operator",
                "cyclic vector y for the y-block",
                *l == printed_l,
                format!("L = {l}"),
            ));
            rows.push(row("Irr(L) = 4", anchor, l.irregularity() == 4, format!("Irr = {}", l.irregularity())));
            rows.push(row(
                "twisted operator L′ equals the printed operator",
                "y-block twisted by exp(-2/u)",
                *lt == printed_lt,
                format!("L′ = {lt}"),
            ));
            rows.push(row("Irr(L′) = 2", anchor, lt.irregularity() == 2, format!("Irr = {}", lt.irregularity())));
        }
        (Err(e), _) | (_, Err(e)) => rows.push(row("y-block operators", anchor, false, e.to_string())),
    }
    let textbook = parse("d2:1; d1:u^-2; d0:u^3");
    rows.push(row(
        "Irr(∂² + u⁻²∂ + u³) = 2",
        "Newton polygon slope of a scalar operator",
        irregularity(&textbook) == 2,
        format!("Irr = {}", irregularity(&textbook)),
    ));

    match exp_type_report(&y, seed) {
        Ok(r) => rows.push(row(
            "y-block verdict",
            "unramified exponential type",
            r.verdict == Verdict::UnramifiedExponentialType,
            format!("{}; Irr {}", r.verdict, r.irregularity),
        )),
        Err(e) => rows.push(row("y-block verdict", "unramified exponential type", false, e.to_string())),
    }

    let reports = cfg.map_samples(cfg.chi_samples.clone(), |chi| {
        let r = main_block_connection(q, &chi).and_then(|c| exp_type_report(&c, seed));
        (chi, r)
    });
    for (chi, r) in reports {
        match r {
            Ok(r) => {
                let tw: Vec<u64> = r.twisted.iter().map(|t| t.irregularity).collect();
                rows.push(row(
                    &format!("main block χ = {chi}: Irr 8, twisted Irr 4"),
                    anchor,
                    r.irregularity == 8 && tw == vec![4, 4],
                    format!("Irr {}, twisted {:?}", r.irregularity, tw),
                ));
                rows.push(row(
                    &format!("main block χ = {chi} verdict"),
                    "unramified exponential type",
                    r.verdict == Verdict::UnramifiedExponentialType,
                    r.verdict.to_string(),
                ));
            }
            Err(e) => rows.push(row(&format!("main block χ = {chi}"), anchor, false, e.to_string())),
        }
    }

    let main = main_block_connection(q, &int(1));
    for (name, conn, expect) in [("y-block", Ok(y.clone()), 4u64), ("main block χ = 1", main, 8)] {
        let conn = match conn {
            Ok(c) => c,
            Err(e) => {
                rows.push(row(name, anchor, false, e.to_string()));
                continue;
            }
        };
        rows.push(cyclic_vector_invariance(name, &conn, expect, seed));
        rows.push(basis_change_invariance(name, &conn, expect, seed));
    }

    let sum = y.direct_sum(&y.twist(&int(-2)));
    let (pass, detail) = match connection_irregularity(&sum, seed) {
        Ok((irr, _, _)) => (irr == 6, format!("Irr(y ⊕ y·exp(-2/u)) = {irr}, expected 4 + 2")),
        Err(e) => (false, e.to_string()),
    };
    rows.push(row("Irr additive under direct sums", anchor, pass, detail));
    rows
}

fn cyclic_vector_invariance(name: &str, conn: &FormalConnection, expect: u64, seed: u64) -> CheckRow {
    let cands = default_candidates(conn.dim(), seed, RANDOM_CANDIDATES);
    let mut cands_rev = cands.clone();
    // Random candidates first, so the chosen vectors are not all basis vectors.
    cands_rev.rotate_left(conn.dim() + 1);
    let es = cyclic_vectors(conn, &cands_rev, 3);
    let irrs: Vec<u64> = es
        .iter()
        .filter_map(|e| associated_operator(conn, e).ok().map(|l| l.irregularity()))
        .collect();
    row(
        &format!("{name}: Irr independent of the cyclic vector"),
        anchor_invariance(),
        irrs.len() >= 3 && irrs.iter().all(|&i| i == expect),
        format!("{} cyclic vectors, Irr {:?}", es.len(), irrs),
    )
}

fn basis_change_invariance(name: &str, conn: &FormalConnection, expect: u64, seed: u64) -> CheckRow {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9);
    let mut irrs = Vec::new();
    for _ in 0..3 {
        let g = random_invertible(conn.dim(), &mut rng);
        if let Ok((irr, _, _)) = conn.conjugate(&g).and_then(|c| connection_irregularity(&c, seed)) {
            irrs.push(irr);
        }
    }
    row(
        &format!("{name}: Irr invariant under constant basis changes"),
        anchor_invariance(),
        irrs.len() == 3 && irrs.iter().all(|&i| i == expect),
        format!("Irr {irrs:?}"),
    )
}

fn anchor_invariance() -> &'static str {
    "irregularity is a gauge invariant"
}

/// `h_i` as printed, `(exponents, numerator, denominator)`.
fn printed_h(i: u32) -> Vec<(Vec<u32>, i64, i64)> {
    let e = |v: &[u32]| {
        let mut x = vec![0u32; i as usize - 1];
        x[..v.len()].copy_from_slice(v);
        x
    };
    match i {
        2 => vec![(e(&[2]), 1, 2)],
        3 => vec![(e(&[3]), 1, 6), (e(&[1, 1]), 1, 1)],
        4 => vec![(e(&[4]), 1, 24), (e(&[2, 1]), 1, 2), (e(&[0, 2]), 1, 2), (e(&[1, 0, 1]), 1, 1)],
        5 => vec![
            (e(&[5]), 1, 120),
            (e(&[3, 1]), 1, 6),
            (e(&[1, 2]), 1, 2),
            (e(&[2, 0, 1]), 1, 2),
            (e(&[1, 0, 0, 1]), 1, 1),
            (e(&[0, 1, 1]), 1, 1),
        ],
        6 => vec![
            (e(&[6]), 1, 720),
            (e(&[4, 1]), 1, 24),
            (e(&[2, 2]), 1, 4),
            (e(&[0, 3]), 1, 6),
            (e(&[3, 0, 1]), 1, 6),
            (e(&[2, 0, 0, 1]), 1, 2),
            (e(&[1, 0, 0, 0, 1]), 1, 1),
            (e(&[0, 0, 2]), 1, 2),
            (e(&[1, 1, 1]), 1, 1),
            (e(&[0, 1, 0, 1]), 1, 1),
        ],
        _ => Vec::new(),
    }
}

fn structural(cfg: &RunConfig) -> Vec<CheckRow> {
    let mut rows = Vec::new();
    let mut bad = Vec::new();
    for i in 0..=6u32 {
        let h = h_poly(i);
        let expect: std::collections::BTreeMap<Vec<u32>, Rational> =
            printed_h(i).into_iter().map(|(e, p, q)| (e, rat(p, q))).collect();
        if h.terms != expect {
            bad.push(format!("h_{i} = {h}"));
        }
    }
    rows.push(row(
        "h_i table, i ≤ 6",
        "Gamma class degree components as polynomials in lower ones",
        bad.is_empty(),
        format!("h_0 .. h_6{}", mismatch_suffix(&bad)),
    ));

    let model = SpaceModel::twistor();
    for q in [int(1), int(2), rat(1, 3)] {
        let quartic = Poly::new(vec![&q * &q * int(16), int(0), &q * int(-8), int(0), int(1)]);
        let y = model.quantum_block(BlockId::YBlock { m: 2 }, &q, &int(1));
        let (pass, detail) = match y {
            Ok(b) => {
                let p = b.c1_star.charpoly();
                (p == quartic, format!("{p}"))
            }
            Err(e) => (false, e.to_string()),
        };
        rows.push(row(&format!("y-block charpoly, q = {q}"), "λ⁴ − 8qλ² + 16q²", pass, detail));
        for chi in &cfg.chi_samples {
            let (pass, detail) = match model.quantum_block(BlockId::Main, &q, chi) {
                Ok(b) => {
                    let p = b.c1_star.charpoly();
                    (p == &quartic * &quartic, format!("{p}"))
                }
                Err(e) => (false, e.to_string()),
            };
            rows.push(row(
                &format!("main block charpoly, q = {q}, χ = {chi}"),
                "(λ⁴ − 8qλ² + 16q²)²",
                pass,
                detail,
            ));
            rows.push(quantum_relation(&model, &q, chi));
        }
    }
    rows
}

/// `α^{⋆4} = −8αχ + 8qα^{⋆2} − 16q²` on the main block, as classes.
fn quantum_relation(model: &SpaceModel, q: &Rational, chi: &Rational) -> CheckRow {
    let name = format!("α⋆⁴ relation, q = {q}, χ = {chi}");
    let anchor = "quantum relation of the twistor space";
    let b = match model.quantum_block(BlockId::Main, q, chi) {
        Ok(b) => b,
        Err(e) => return row(&name, anchor, false, e.to_string()),
    };
    let m = &b.c1_star;
    let mut one = vec![Rational::zero(); 8];
    one[0] = Rational::one();
    let a2 = m.mul_vec(&m.mul_vec(&one));
    let a4 = m.mul_vec(&m.mul_vec(&a2));
    // τ*χ = χ·Vol_M, so αχ sits at αVol_M with coefficient χ.
    let rhs: Vec<Rational> = (0..8)
        .map(|k| {
            let mut v = &a2[k] * q * int(8) - &one[k] * q * q * int(16);
            if k == 5 {
                v -= chi * int(8);
            }
            v
        })
        .collect();
    row(&name, anchor, a4 == rhs, format!("α⋆⁴ = {:?}", a4.iter().map(|x| x.to_string()).collect::<Vec<_>>()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compositions_count() {
        for w in 1..=6u32 {
            assert_eq!(compositions(w).len(), 1 << (w - 1));
        }
    }

    #[test]
    fn hankel_oracle_is_near_one() {
        let r = bessel_i0_ratio(1e6);
        assert!((r - 1.0 - 1.0 / 16000.0).abs() < 1e-7);
    }

    #[test]
    fn fast_criteria_pass() {
        let cfg = RunConfig::default();
        for id in [3, 9] {
            let r = run(id, &cfg);
            assert!(r.pass, "{r:#?}");
        }
    }

    #[test]
    fn unknown_criterion_fails() {
        assert!(!run(42, &RunConfig::default()).pass);
    }
}
