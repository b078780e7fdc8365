//! Acceptance run. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails. Built with `harness = false` so the
//! lines reach stdout under a plain `cargo test`.

use std::sync::OnceLock;
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use orbicount::arith::{primes_up_to, Rational};
use orbicount::constants::{
    blowup_constant_paper, leading_constant, normalized_product, p1_campana_constant, riemann_zeta,
};
use orbicount::enumerate::naive::naive_counts;
use orbicount::enumerate::{count_series, enumerate_p1, CountSeries, Counts, EnumConfig, Mode};
use orbicount::fitting::{fit_counts, fit_series, FitModel, Window};
use orbicount::geometry::{
    global_height, global_height_closed, is_campana, is_darmon, local_height_exponent, multiplicities,
    relevant_primes, BlowupPoint, Bound, Point, ProjectivePoint,
};
use orbicount::localfactors::{
    closed_form_factor, decay_exponent, denef_factor, normalized_factor, shell_sum_oracle, LocalFactorInput,
    OracleConfig,
};
use orbicount::orbifold::{ModelKind, OrbifoldModel, PlaceSet};

type Check = Result<Outcome, String>;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Check {
    Ok(Outcome { pass, detail })
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn rel(x: f64, reference: f64) -> f64 {
    (x - reference).abs() / reference.abs()
}

/// `k` integer bounds spaced geometrically from `lo` to `hi`, both included.
fn geometric(lo: f64, hi: f64, k: usize) -> Vec<Bound> {
    let mut out: Vec<u64> = (0..k)
        .map(|i| (lo * (hi / lo).powf(i as f64 / (k - 1) as f64)).round() as u64)
        .collect();
    out.dedup();
    out.into_iter().map(Bound::from_integer).collect()
}

fn at(series: &CountSeries, bound: u64) -> &orbicount::enumerate::CountRecord {
    series
        .records
        .iter()
        .find(|r| r.bound == Bound::from_integer(bound))
        .expect("bound is on the grid")
}

fn p1(m: u32) -> OrbifoldModel {
    OrbifoldModel::projective_space(1, m).unwrap()
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, f64) {
    let t = Instant::now();
    let v = f();
    (v, t.elapsed().as_secs_f64())
}

fn target(secs: f64, limit: f64) -> String {
    let verdict = if secs < limit { "met" } else { "missed" };
    format!("runtime {secs:.2} s, target < {limit} s {verdict}")
}

/// ℙ¹ with `m = 2` on a grid up to 10⁶, for `S = {∞}` and `S = {∞, 2}`.
struct DarmonRun {
    plain: CountSeries,
    with_two: CountSeries,
    secs: f64,
}

fn darmon_run() -> Result<&'static DarmonRun, String> {
    static RUN: OnceLock<Result<DarmonRun, String>> = OnceLock::new();
    RUN.get_or_init(|| {
        let grid = geometric(100.0, 1e6, 41);
        let config = EnumConfig::default();
        let t = Instant::now();
        let plain = count_series(&p1(2), &PlaceSet::archimedean(), &grid, &config).map_err(err)?;
        let secs = t.elapsed().as_secs_f64();
        let with_two = count_series(&p1(2), &PlaceSet::new([2]).map_err(err)?, &grid, &config).map_err(err)?;
        Ok(DarmonRun { plain, with_two, secs })
    })
    .as_ref()
    .map_err(Clone::clone)
}

fn schanuel() -> Check {
    let bound = Bound::from_integer(100_000);
    let (n, secs) = timed(|| enumerate_p1(1, &PlaceSet::archimedean(), &bound, Mode::Rational));
    let n = n.map_err(err)? as f64;
    let ratio = n / 1e10;
    let expect = 2.0 / riemann_zeta(2.0).map_err(err)?;
    let d = rel(ratio, expect);
    outcome(
        d <= 0.02,
        format!(
            "N(1e5)/B^2 = {ratio:.6} vs 2/zeta(2) = {expect:.6}, rel {d:.2e} (tol 2e-2); {}",
            target(secs, 5.0)
        ),
    )
}

fn darmon_p1() -> Check {
    let run = darmon_run()?;
    let n = at(&run.plain, 1_000_000).n_darmon as f64;
    let ratio = n / 1e9;
    let expect = 2.0 / riemann_zeta(2.0).map_err(err)?;
    let d = rel(ratio, expect);
    outcome(
        d <= 0.05,
        format!(
            "N(1e6)/B^1.5 = {ratio:.6} vs {expect:.6}, rel {d:.2e} (tol 5e-2); {}",
            target(run.secs, 30.0)
        ),
    )
}

fn s_factor_effect() -> Check {
    let run = darmon_run()?;
    let expect = (1.0 - 2f64.powf(-1.5)) / (1.0 - 2f64.powf(-0.5) + 0.5 - 2f64.powf(-1.5));
    let point = at(&run.with_two, 1_000_000).n_darmon as f64 / at(&run.plain, 1_000_000).n_darmon as f64;
    let window = Some(Window::top_decades(1e6));
    let fit = |s: &CountSeries| fit_series(s, Mode::Darmon, window, FitModel::Leading).map(|f| f.coefficient);
    let fitted = fit(&run.with_two).map_err(err)? / fit(&run.plain).map_err(err)?;
    let (d1, d2) = (rel(point, expect), rel(fitted, expect));
    outcome(
        d1 <= 0.05 && d2 <= 0.05,
        format!(
            "ratio at B=1e6 {point:.5}, over [1e4,1e6] {fitted:.5}, expected {expect:.5}; rel {d1:.2e}, {d2:.2e} (tol 5e-2)"
        ),
    )
}

fn campana_p1() -> Check {
    let run = darmon_run()?;
    let constant = p1_campana_constant(2, &PlaceSet::archimedean(), 1_000_000).map_err(err)?.value;
    let point = at(&run.plain, 1_000_000).n_campana as f64 / 1e9;
    // The next term is of order B^{4/3}, which the leading-only ratio still
    // carries at 10⁶; the two-term fit removes it.
    let two_term = fit_series(
        &run.plain,
        Mode::Campana,
        Some(Window::top_decades(1e6)),
        FitModel::WithPowerSecondary { delta: 1.0 / 6.0 },
    )
    .map_err(err)?;
    let (d1, d2) = (rel(point, constant), rel(two_term.coefficient, constant));
    let mut lost = Vec::new();
    for r in &run.plain.records {
        if r.bound.to_f64() >= 100.0 && r.n_campana <= r.n_darmon {
            lost.push(r.bound.text().to_string());
        }
    }
    outcome(
        d1 <= 0.05 && d2 <= 0.05 && lost.is_empty(),
        format!(
            "constant {constant:.5}; N(1e6)/B^1.5 = {point:.5} (rel {d1:.2e}), two-term fit {:.5} (rel {d2:.2e}), tol 5e-2; \
             Campana > Darmon at {}/{} grid points B >= 100{}",
            two_term.coefficient,
            run.plain.records.len() - lost.len(),
            run.plain.records.len(),
            if lost.is_empty() { String::new() } else { format!(" (fails at {})", lost.join(",")) }
        ),
    )
}

fn oracle_models() -> Vec<OrbifoldModel> {
    let mut models = Vec::new();
    for n in 1..=2 {
        for m in 1..=3 {
            models.push(OrbifoldModel::projective_space(n, m).unwrap());
        }
    }
    for m1 in 1..=3 {
        for m2 in 1..=3 {
            models.push(OrbifoldModel::blowup_p2(m1, m2).unwrap());
        }
    }
    models
}

fn local_oracles() -> Check {
    let t = Instant::now();
    let config = OracleConfig { depth: 60, tolerance: 1e-10 };
    let (mut cases, mut bad) = (0, Vec::new());
    let (mut worst_bound, mut worst_diff) = (0f64, 0f64);
    for model in oracle_models() {
        let a = model.a_invariant().to_f64().unwrap();
        for p in [2, 3, 5, 7] {
            for s in [a + 0.25, a + 1.0] {
                for in_s in [false, true] {
                    let input = LocalFactorInput { model: &model, p, s, in_s };
                    let closed = closed_form_factor(&input).map_err(err)?;
                    let denef = denef_factor(&input).map_err(err)?;
                    let oracle = shell_sum_oracle(&input, &config).map_err(err)?;
                    cases += 1;
                    worst_bound = worst_bound.max(oracle.bound);
                    worst_diff = worst_diff.max((closed - oracle.value).abs());
                    if !(oracle.bound <= 1e-10 && oracle.contains(closed) && oracle.contains(denef)) {
                        bad.push(format!("{:?} p={p} s={s} in_s={in_s}", model.kind));
                    }
                }
            }
        }
    }
    let secs = t.elapsed().as_secs_f64();
    outcome(
        bad.is_empty() && secs < 1.0,
        format!(
            "{cases} cases, max |closed - oracle| {worst_diff:.1e}, max truncation bound {worst_bound:.1e} (limit 1e-10), \
             {} outside bound+rounding; {secs:.3} s (limit 1 s){}",
            bad.len(),
            if bad.is_empty() { String::new() } else { format!("; first: {}", bad[0]) }
        ),
    )
}

fn blowup_adjudication() -> Check {
    let model = OrbifoldModel::blowup_p2(1, 1).unwrap();
    let ((series, secs), assembled, paper) = {
        let run = timed(|| count_series(&model, &PlaceSet::archimedean(), &geometric(1e3, 1e5, 1001), &EnumConfig::default()));
        let assembled = leading_constant(&model, &PlaceSet::archimedean(), 1_000_000).map_err(err)?.coefficient;
        let paper = blowup_constant_paper(1, 1, 1_000_000).map_err(err)?.value;
        (run, assembled, paper)
    };
    let series = series.map_err(err)?;
    let window = Some(Window { lo: 1e3, hi: 1e5 });
    let fit = fit_series(&series, Mode::Darmon, window, FitModel::WithLogSecondary).map_err(err)?;
    let leading = fit_series(&series, Mode::Darmon, window, FitModel::Leading).map_err(err)?;
    let kappa = fit.coefficient;
    let (d_asm, d_pap) = (rel(kappa, assembled), rel(kappa, paper));
    let (ok_asm, ok_pap) = (d_asm <= 0.15, d_pap <= 0.15);
    let winner = match (ok_asm, ok_pap) {
        (true, false) => "residue-assembled constant",
        (false, true) => "reference product formula",
        (true, true) => "ambiguous, both agree",
        (false, false) => "neither",
    };
    outcome(
        ok_asm != ok_pap,
        format!(
            "kappa = {kappa:.5} (two-term B log B + B fit, {} points; leading-only gives {:.5}); \
             assembled {assembled:.5} rel {d_asm:.3}, reference formula {paper:.5} rel {d_pap:.3} (tol 0.15); winner: {winner}; {}",
            fit.points_used,
            leading.coefficient,
            target(secs, 60.0)
        ),
    )
}

fn counts_of(series: &CountSeries) -> Vec<Counts> {
    series
        .records
        .iter()
        .map(|r| Counts {
            rational: r.n_rational,
            campana: r.n_campana,
            darmon: r.n_darmon,
        })
        .collect()
}

fn small_counts() -> Check {
    let ten = Bound::from_integer(10);
    let archimedean = PlaceSet::archimedean();
    let naive = |m| naive_counts(&p1(m), &archimedean, std::slice::from_ref(&ten)).map(|c| c[0]);
    let (n1, n2) = (naive(1).map_err(err)?, naive(2).map_err(err)?);
    let sieved = [
        enumerate_p1(1, &archimedean, &ten, Mode::Rational).map_err(err)?,
        enumerate_p1(2, &archimedean, &ten, Mode::Darmon).map_err(err)?,
        enumerate_p1(2, &archimedean, &ten, Mode::Campana).map_err(err)?,
    ];
    let naive_values = [n1.rational, n2.darmon, n2.campana];
    let exact = naive_values == [127, 45, 55] && sieved == naive_values;

    // Every bound where a count can change: heights on ℙⁿ are integers, and
    // on the blow-up a half-step grid up to 200.
    let places = [PlaceSet::archimedean(), PlaceSet::new([2]).unwrap(), PlaceSet::new([2, 3]).unwrap()];
    let integers = |hi: u64| (1..=hi).map(Bound::from_integer).collect::<Vec<_>>();
    let halves: Vec<Bound> = (2..=400u64)
        .map(|k| Bound::from_rational(BigRational::new(BigInt::from(k), BigInt::from(2))))
        .collect();
    let mut matrix: Vec<(OrbifoldModel, Vec<Bound>)> = Vec::new();
    for m in 1..=3 {
        matrix.push((p1(m), integers(200)));
        matrix.push((OrbifoldModel::projective_space(2, m).unwrap(), integers(30)));
    }
    for m1 in 1..=3 {
        for m2 in 1..=3 {
            matrix.push((OrbifoldModel::blowup_p2(m1, m2).unwrap(), halves.clone()));
        }
    }
    let (mut cases, mut bad) = (0, Vec::new());
    for (model, grid) in &matrix {
        for s in &places {
            let naive = naive_counts(model, s, grid).map_err(err)?;
            let sieved = counts_of(&count_series(model, s, grid, &EnumConfig::default()).map_err(err)?);
            cases += 1;
            if naive != sieved {
                bad.push(format!("{:?} S={s}", model.kind));
            }
        }
    }
    outcome(
        exact && bad.is_empty(),
        format!(
            "N(10): rational {} / Darmon {} / Campana {} by the naive oracle (expected 127/45/55), sieved {:?}; \
             sieved = naive on {}/{cases} (model, S) grids: P1 every B <= 200, P2 every B <= 30, blow-up every B in ½Z up to 200{}",
            naive_values[0],
            naive_values[1],
            naive_values[2],
            sieved,
            cases - bad.len(),
            if bad.is_empty() { String::new() } else { format!("; mismatches: {}", bad.join(", ")) }
        ),
    )
}

fn random_rational(rng: &mut ChaCha8Rng) -> Rational {
    let n: i64 = rng.gen_range(-1_000_000..=1_000_000);
    let mut d: i64 = rng.gen_range(1..=50);
    for p in [2i64, 3, 5, 7] {
        d *= p.pow(rng.gen_range(0..=4));
    }
    Rational::new(n, d).unwrap()
}

fn random_model(rng: &mut ChaCha8Rng) -> OrbifoldModel {
    if rng.gen_bool(0.5) {
        OrbifoldModel::projective_space(rng.gen_range(1..=3), rng.gen_range(1..=3)).unwrap()
    } else {
        OrbifoldModel::blowup_p2(rng.gen_range(1..=3), rng.gen_range(1..=3)).unwrap()
    }
}

/// Checks one random point; returns a description of the first violation.
fn point_invariants(rng: &mut ChaCha8Rng, model: &OrbifoldModel) -> Result<Option<String>, String> {
    let xs: Vec<Rational> = (0..3).map(|_| random_rational(rng)).collect();
    let point = match model.kind {
        ModelKind::ProjectiveSpace { n } => {
            Point::Projective(ProjectivePoint::from_affine(&xs[..n as usize]).map_err(err)?)
        }
        _ => Point::Blowup(BlowupPoint::from_affine(xs[0].clone(), xs[1].clone())),
    };
    let mut primes = relevant_primes(&point).map_err(err)?;
    primes.extend([2, 3, 5, 7, 11]);
    for p in primes {
        let n = multiplicities(&point, model, p).map_err(err)?;
        let pairing = model
            .components
            .iter()
            .zip(n.as_slice())
            .fold(BigRational::zero(), |acc, (c, &k)| acc + &c.lambda * BigRational::from_integer(k.into()));
        if local_height_exponent(&point, model, p).map_err(err)? != pairing {
            return Ok(Some(format!("height exponent at p={p} for {point:?}")));
        }
    }
    let h = global_height(&point, model).map_err(err)?;
    if h.exact_cmp(&global_height_closed(&point, model).map_err(err)?).is_ne() {
        return Ok(Some(format!("closed-form height for {point:?}")));
    }
    let sets = [PlaceSet::archimedean(), PlaceSet::new([2]).unwrap(), PlaceSet::new([2, 3, 5]).unwrap()];
    let mut previous = (false, false);
    for (i, s) in sets.iter().enumerate() {
        let (d, c) = (is_darmon(&point, model, s).map_err(err)?, is_campana(&point, model, s).map_err(err)?);
        // The sets are nested, so enlarging S may only add points.
        if d && !c || i > 0 && (previous.0 && !d || previous.1 && !c) {
            return Ok(Some(format!("Darmon/Campana inclusion for {point:?} S={s}")));
        }
        previous = (d, c);
    }
    // Rescaled homogeneous coordinates give the same point and height.
    let scaled = match &point {
        Point::Projective(pp) => {
            let k = random_rational(rng);
            if k.is_zero() {
                return Ok(None);
            }
            let coords: Vec<Rational> = pp.coords().iter().map(|c| &Rational::from_integer(c.clone()) * &k).collect();
            Point::Projective(ProjectivePoint::from_rationals(&coords).map_err(err)?)
        }
        Point::Blowup(bp) => {
            let k = BigInt::from(rng.gen_range(1i64..1000) * if rng.gen_bool(0.5) { 1 } else { -1 });
            let [x0, x1, x2] = bp.triple().clone();
            Point::Blowup(BlowupPoint::from_triple(&k * x0, &k * x1, &k * x2).map_err(err)?)
        }
    };
    if scaled != point || global_height(&scaled, model).map_err(err)?.exact_cmp(&h).is_ne() {
        return Ok(Some(format!("scaling invariance for {point:?}")));
    }
    Ok(None)
}

fn invariant_suites() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut failures = Vec::new();
    const POINTS: usize = 10_000;
    for _ in 0..POINTS {
        let model = random_model(&mut rng);
        if let Some(f) = point_invariants(&mut rng, &model)? {
            failures.push(f);
        }
    }

    let mut invariants_exact = true;
    for n in 1..=4u32 {
        for m in 1..=3u32 {
            let model = OrbifoldModel::projective_space(n, m).unwrap();
            let a = BigRational::from_integer(n.into()) + BigRational::new(1.into(), m.into());
            invariants_exact &= model.a_invariant() == a && model.b_invariant() == 1;
        }
    }
    for m1 in 1..=3 {
        for m2 in 1..=3 {
            let model = OrbifoldModel::blowup_p2(m1, m2).unwrap();
            invariants_exact &= model.a_invariant() == BigRational::from_integer(1.into()) && model.b_invariant() == 2;
        }
    }
    if !invariants_exact {
        failures.push("a/b invariants".into());
    }

    let primes = primes_up_to(10_000);
    for model in oracle_models() {
        let a = model.a_invariant().to_f64().unwrap();
        let c = 2.0 * model.components.len() as f64;
        for s in [a, a + 0.5] {
            let delta = decay_exponent(&model, s).map_err(err)? - 1e-9;
            for &p in &primes {
                let f = normalized_factor(&model, p, s).map_err(err)?;
                if (f - 1.0).abs() > c * (p as f64).powf(-1.0 - delta) {
                    failures.push(format!("decay {:?} p={p} s={s}", model.kind));
                    break;
                }
            }
        }
    }

    let determinism = [
        (p1(2), PlaceSet::new([3]).unwrap(), geometric(10.0, 1e5, 9)),
        (OrbifoldModel::blowup_p2(2, 1).unwrap(), PlaceSet::new([2]).unwrap(), geometric(10.0, 1e4, 7)),
    ];
    for (model, s, grid) in &determinism {
        let run = |w| count_series(model, s, grid, &EnumConfig::with_workers(w)).map_err(err);
        let one = run(1)?;
        if run(2)? != one || run(8)? != one {
            failures.push(format!("worker-count dependence {:?}", model.kind));
        }
    }
    let constant = |threads: usize| -> Result<(u64, u64), String> {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().map_err(err)?;
        pool.install(|| {
            let model = OrbifoldModel::blowup_p2(2, 1).unwrap();
            let c = leading_constant(&model, &PlaceSet::new([3]).unwrap(), 200_000).map_err(err)?;
            Ok((c.total.to_bits(), c.truncated_product.value.to_bits()))
        })
    };
    let one = constant(1)?;
    if constant(2)? != one || constant(8)? != one {
        failures.push("thread-count dependence of constants".into());
    }

    // The fitting layer recovers its own model exactly.
    let data: Vec<(f64, f64)> = (0..8)
        .map(|i| 10f64.powf(2.0 + 0.5 * i as f64))
        .map(|b| (b, 0.7 * b * b.ln()))
        .collect();
    let f = fit_counts(&data, 1.0, 2, None, FitModel::Leading).map_err(err)?;
    if rel(f.coefficient, 0.7) > 1e-12 {
        failures.push("fit on exact data".into());
    }

    outcome(
        failures.is_empty(),
        format!(
            "{POINTS} random points (height identity, closed vs place heights, Darmon in Campana, monotone in S, scaling); \
             a/b exact; decay for p <= 1e4; workers 1/2/8 identical; {} failures{}",
            failures.len(),
            failures.first().map_or(String::new(), |f| format!("; first: {f}"))
        ),
    )
}

fn regularized_product() -> Check {
    let product = normalized_product(&p1(1), 2.0, 1_000_000).map_err(err)?;
    let expect = 1.0 / riemann_zeta(2.0).map_err(err)?;
    let diff = (product.value - expect).abs();
    outcome(
        product.contains(expect),
        format!(
            "truncated product {:.12} vs 1/zeta(2) = {expect:.12}, |diff| {diff:.2e} <= tail bound {:.2e}: {}",
            product.value,
            product.tail_bound,
            product.contains(expect)
        ),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Check); 9] = [
        ("Schanuel on P1", schanuel),
        ("Darmon count on P1, m=2", darmon_p1),
        ("S-factor effect, S={inf,2}", s_factor_effect),
        ("Campana count on P1, m=2", campana_p1),
        ("local-factor oracles", local_oracles),
        ("blow-up adjudication", blowup_adjudication),
        ("exact small counts", small_counts),
        ("invariant suites", invariant_suites),
        ("regularized product", regularized_product),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let (result, secs) = timed(check);
        let (pass, detail) = match result {
            Ok(o) => (o.pass, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if !pass {
            failed += 1;
        }
        println!("{} [{}] {name}: {detail} [{secs:.2} s]", if pass { "PASS" } else { "FAIL" }, i + 1);
    }
    println!("acceptance: {}/{} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
