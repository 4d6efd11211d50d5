use std::path::{Path, PathBuf};

use rmflab_core::arith::cache::{load_sieve, save_sieve, CACHE_ENV};
use rmflab_core::arith::DEFAULT_SIEVE_CAP;
use rmflab_core::energy::{
    count_fourth_moment_with_budget, epsilon_report, CountingSet, MomentInputs, DEFAULT_PAIR_BUDGET,
};
use rmflab_core::experiments::{
    make_poly_scales, make_short_scales, poly_scale_sums, poly_sieve_requirement, run_clt_experiment,
    run_short_fluctuation, run_slow_variation, slow_scales, verify_count_at_scales, CltOptions,
    FluctuationReport, HSpec, PolyEngine, ShortScales, SlowVariationParams,
};
use rmflab_core::seed::trial_seed;
use rmflab_core::stats::{gaussian_max_prob, std_normal_cdf, CovarianceMatrix};
use rmflab_core::{ArithSet, EquationKind, FactorSieve, PolySpec, RmfModel, TopPrimeConstraint, Twist};
use serde_json::{json, Value};

use crate::args::{
    CltCmd, CountCmd, FluctPolyCmd, FluctShortCmd, GaussmaxCmd, OutputArgs, RunArgs, ShortFamilyArgs, SieveArgs,
    SieveCmd, SlowvarCmd, VerifyScalesCmd,
};
use crate::config::Config;
use crate::error::CliError;
use crate::output::{fmt_f64, json_text, quantiles_json, summary, RunRecord, Table};

const DEFAULT_SEED: u64 = 1;
const DEFAULT_TRIALS: u64 = 1000;
const DEFAULT_X: f64 = 10_000.0;

/// What a command produced: the primary text (CSV or JSON) and the
/// summary document.
pub struct Output {
    pub primary: String,
    pub summary: Value,
    pub out: Option<PathBuf>,
    pub summary_path: Option<PathBuf>,
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn to_json<T: serde::Serialize>(v: &T) -> Result<Value, CliError> {
    serde_json::to_value(v).map_err(|e| CliError::Runtime(format!("cannot encode report: {e}")))
}

struct Run {
    model: RmfModel,
    twist: Twist,
    seed: u64,
    trials: u64,
}

impl Run {
    fn resolve(cfg: &Config, a: &RunArgs) -> Result<Self, CliError> {
        let model = cfg.get(a.model, "model", RmfModel::Rademacher)?;
        let twist = cfg.get(a.twist, "twist", model.default_twist())?;
        twist.check_model(model)?;
        let trials = cfg.get(a.trials, "trials", DEFAULT_TRIALS)?;
        if trials == 0 {
            return Err(usage("--trials must be at least 1"));
        }
        Ok(Self {
            model,
            twist,
            seed: cfg.get(a.seed, "seed", DEFAULT_SEED)?,
            trials,
        })
    }

    fn record(&self, r: &mut RunRecord) {
        r.push("model", self.model);
        r.push("twist", self.twist);
        r.push("seed", self.seed);
        r.push("trials", self.trials);
    }
}

fn finish(cfg: &Config, o: &OutputArgs, primary: String, summary: Value) -> Result<Output, CliError> {
    Ok(Output {
        primary,
        summary,
        out: cfg.opt(o.out.clone(), "out")?,
        summary_path: cfg.opt(o.summary.clone(), "summary")?,
    })
}

/// Finishes a command whose primary output is its summary.
fn finish_json(cfg: &Config, o: &OutputArgs, summary: Value) -> Result<Output, CliError> {
    finish(cfg, o, json_text(&summary), summary)
}

fn cache_path(flag: Option<PathBuf>) -> Option<PathBuf> {
    flag.or_else(|| std::env::var_os(CACHE_ENV).filter(|p| !p.is_empty()).map(PathBuf::from))
}

/// A sieve covering `limit`, from the cache when it is large enough;
/// a freshly built one is written back.
fn obtain_sieve(limit: u64, cache: Option<&Path>) -> Result<(FactorSieve, &'static str), CliError> {
    if let Some(path) = cache {
        if path.exists() {
            if let Ok(s) = load_sieve(path, DEFAULT_SIEVE_CAP) {
                if s.limit() >= limit {
                    return Ok((s, "cache"));
                }
            }
        }
        let s = FactorSieve::with_cap(limit, DEFAULT_SIEVE_CAP)?;
        save_sieve(&s, path)?;
        return Ok((s, "built"));
    }
    Ok((FactorSieve::with_cap(limit, DEFAULT_SIEVE_CAP)?, "built"))
}

fn sieve_for(cfg: &Config, a: &SieveArgs, needed: u64, r: &mut RunRecord) -> Result<FactorSieve, CliError> {
    let limit = cfg.get(a.sieve_limit, "sieve-limit", needed)?;
    if limit < 2 {
        return Err(usage("--sieve-limit must be at least 2"));
    }
    r.push("sieve-limit", limit);
    Ok(obtain_sieve(limit, cache_path(None).as_deref())?.0)
}

fn seed_column(seed: u64, i: usize) -> String {
    trial_seed(seed, i as u64).to_string()
}

pub fn sieve(cfg: &Config, cmd: SieveCmd) -> Result<Output, CliError> {
    let limit = cfg
        .opt(cmd.sieve.sieve_limit, "sieve-limit")?
        .ok_or_else(|| usage("sieve needs --sieve-limit"))?;
    if limit < 2 {
        return Err(usage("--sieve-limit must be at least 2"));
    }
    let cache = cache_path(cfg.opt(cmd.cache, "cache")?);
    let (s, source) = obtain_sieve(limit, cache.as_deref())?;
    let mut r = RunRecord::new("sieve");
    r.push("sieve-limit", limit);
    let result = json!({
        "requested": limit,
        "limit": s.limit(),
        "primes": s.primes().len(),
        "largest_prime": s.primes().last().copied(),
        "cache": cache.map(|p| p.display().to_string()),
        "source": source,
    });
    finish_json(cfg, &cmd.output, summary(&r, result))
}

pub fn count(cfg: &Config, cmd: CountCmd) -> Result<Output, CliError> {
    let (sets, set_all) = if !cmd.set.is_empty() || cmd.set_all.is_some() {
        (cmd.set, cmd.set_all)
    } else {
        (cfg.list(Vec::new(), "set")?, cfg.opt(None, "set-all")?)
    };
    let sets: [ArithSet; 4] = match (set_all, sets.len()) {
        (Some(s), 0) => [s.clone(), s.clone(), s.clone(), s],
        (None, 4) => sets.try_into().expect("length checked"),
        _ => return Err(usage("count takes four --set values or a single --set-all")),
    };
    let model = cfg.get(cmd.model, "model", RmfModel::Rademacher)?;
    let kind = cfg.get(cmd.eq, "eq", EquationKind::for_model(model))?;
    let constraint = cfg.get(cmd.constraint, "constraint", TopPrimeConstraint::None)?;
    let budget = cfg.get(cmd.budget, "budget", DEFAULT_PAIR_BUDGET)?;

    let mut r = RunRecord::new("count");
    for s in &sets {
        r.push("set", s);
    }
    r.push("eq", kind);
    r.push("constraint", constraint);
    r.push("budget", budget);
    let needed = sets
        .iter()
        .map(|s| s.sieve_requirement())
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .max()
        .unwrap_or(2);
    let sieve = sieve_for(cfg, &cmd.sieve, needed, &mut r)?;
    let refs = [&sets[0], &sets[1], &sets[2], &sets[3]];
    let tally = count_fourth_moment_with_budget(&sieve, refs, kind, constraint, budget)?;

    let mut distinct: Vec<&ArithSet> = Vec::new();
    for s in &sets {
        if !distinct.contains(&s) {
            distinct.push(s);
        }
    }
    let counting = distinct
        .iter()
        .map(|s| CountingSet::from_set(&sieve, s))
        .collect::<Result<Vec<_>, _>>()?;
    let inputs = MomentInputs {
        sets: &counting,
        kind,
        budget,
    };
    let (epsilons, epsilon_error) = match epsilon_report(&inputs) {
        Ok(e) => (to_json(&e)?, Value::Null),
        Err(e) => (Value::Null, Value::String(e.to_string())),
    };
    let mut result = to_json(&tally)?;
    let obj = result.as_object_mut().expect("tally is an object");
    obj.insert("eq".into(), json!(kind.to_string()));
    obj.insert("constraint".into(), json!(constraint.to_string()));
    obj.insert("set_sizes".into(), json!(counting.iter().map(|c| c.len()).collect::<Vec<_>>()));
    obj.insert("epsilons".into(), epsilons);
    obj.insert("epsilon_error".into(), epsilon_error);
    finish_json(cfg, &cmd.output, summary(&r, result))
}

pub fn clt(cfg: &Config, cmd: CltCmd) -> Result<Output, CliError> {
    let run = Run::resolve(cfg, &cmd.run)?;
    let mut sets: Vec<ArithSet> = cfg.list(cmd.set, "set")?;
    if sets.is_empty() {
        return Err(usage("clt needs at least one --set"));
    }
    if run.model == RmfModel::Rademacher {
        // The Rademacher function vanishes off the squarefree integers.
        sets = sets.into_iter().map(ArithSet::squarefree).collect();
    }
    let budget = cfg.get(cmd.budget, "budget", DEFAULT_PAIR_BUDGET)?;
    let mut r = RunRecord::new("clt");
    run.record(&mut r);
    for s in &sets {
        r.push("set", s);
    }
    r.push("budget", budget);
    let needed = sets
        .iter()
        .map(|s| s.sieve_requirement())
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .max()
        .unwrap_or(2);
    let sieve = sieve_for(cfg, &cmd.sieve, needed, &mut r)?;
    let opts = CltOptions {
        budget,
        ..CltOptions::default()
    };
    let rep = run_clt_experiment(run.model, &sieve, &sets, run.twist, run.trials, run.seed, &opts)?;

    let m = sets.len();
    let mut cols = vec!["trial".to_string(), "seed".to_string()];
    cols.extend((1..=m).map(|i| format!("S_{i}")));
    if m > 1 {
        cols.push("combined".into());
    }
    let mut table = Table::new(cols);
    for (i, row) in rep.samples.iter().enumerate() {
        let mut line = vec![i.to_string(), seed_column(run.seed, i)];
        line.extend(row.iter().map(|&v| fmt_f64(v)));
        if m > 1 {
            line.push(fmt_f64(row.iter().sum::<f64>() / (m as f64).sqrt()));
        }
        table.rows.push(line);
    }
    let result = json!({
        "sets": to_json(&rep.sets)?,
        "combined": to_json(&rep.combined)?,
        "diagnostics": to_json(&rep.diagnostics)?,
    });
    finish(cfg, &cmd.output, table.render(&r), summary(&r, result))
}

fn fluctuation_json(f: &FluctuationReport) -> Value {
    json!({
        "k": f.k,
        "scales": f.scales,
        "set_sizes": f.set_sizes,
        "trials": f.trials,
        "mean_max": f.mean_max,
        "std_error_max": f.std_error_max,
        "max_quantiles": quantiles_json(&f.max_signed),
        "lil_normalizer": f.lil_normalizer,
        "scale_normalizer": f.scale_normalizer,
        "exceedance": f.exceedance.iter().map(|e| json!({
            "theta": e.theta,
            "threshold": e.threshold,
            "fraction": e.fraction,
        })).collect::<Vec<_>>(),
    })
}

pub fn fluct_poly(cfg: &Config, cmd: FluctPolyCmd) -> Result<Output, CliError> {
    let run = Run::resolve(cfg, &cmd.run)?;
    let poly = cfg.get(cmd.poly, "poly", PolySpec::new(vec![0, 1, 1])?)?;
    let x = cfg.get(cmd.x, "X", DEFAULT_X)?;
    let eps0 = cfg.get(cmd.eps0, "eps0", 0.5)?;
    let k = cfg.opt(cmd.k, "k")?;
    let mut r = RunRecord::new("fluct-poly");
    run.record(&mut r);
    r.push("poly", &poly);
    r.push("X", x);
    r.push("eps0", eps0);
    if let Some(k) = k {
        r.push("k", k);
    }
    let scales = make_poly_scales(x, eps0, k)?;
    let n_max = *scales.scales.last().expect("scales are nonempty");
    let splits = poly.linear_factors().is_some();
    let linear_need = poly_sieve_requirement(&poly, n_max)?;
    let needed = if splits {
        linear_need
    } else {
        ArithSet::poly_image(poly.clone(), n_max).sieve_requirement()?
    };
    let sieve = sieve_for(cfg, &cmd.sieve, needed, &mut r)?;
    // Chosen from the requested limit, never from a larger cached table.
    let engine = if splits && cfg.get(cmd.sieve.sieve_limit, "sieve-limit", needed)? >= linear_need {
        PolyEngine::LinearSplit
    } else {
        PolyEngine::Prepared
    };
    let sums = poly_scale_sums(
        run.model,
        &sieve,
        &poly,
        &scales.scales,
        run.twist,
        run.trials,
        run.seed,
        engine,
    )?;
    let rep = FluctuationReport::from_sums(
        scales.scales.clone(),
        sums.sizes,
        sums.sums,
        x.ln().ln().max(0.0).sqrt(),
    );

    let mut cols = vec!["trial".to_string(), "seed".to_string()];
    cols.extend(scales.scales.iter().map(|n| format!("S_{n}")));
    cols.extend(["max".to_string(), "max_abs".to_string()]);
    let mut table = Table::new(cols);
    for (i, row) in rep.sums.iter().enumerate() {
        let mut line = vec![i.to_string(), seed_column(run.seed, i)];
        line.extend(row.iter().map(|&v| fmt_f64(v)));
        line.push(fmt_f64(rep.max_signed[i]));
        line.push(fmt_f64(rep.max_abs[i]));
        table.rows.push(line);
    }
    let result = json!({
        "scales": to_json(&scales)?,
        "engine": to_json(&sums.engine)?,
        "fluctuation": fluctuation_json(&rep),
    });
    finish(cfg, &cmd.output, table.render(&r), summary(&r, result))
}

fn short_family(cfg: &Config, a: &ShortFamilyArgs, r: &mut RunRecord) -> Result<ShortScales, CliError> {
    let x = cfg.get(a.x, "X", DEFAULT_X)?;
    if !(x >= 1.0 && x.fract() == 0.0 && x <= u64::MAX as f64) {
        return Err(usage(format!("--X must be a positive integer for short intervals, got {x}")));
    }
    let hspec = cfg.get(a.hspec, "hspec", HSpec::PowerLaw { alpha: 0.75 })?;
    let delta = cfg.get(a.delta, "delta", 1.5)?;
    let eps0 = cfg.get(a.eps0, "eps0", 0.5)?;
    let eps = cfg.get(a.eps, "eps", 0.5)?;
    let k = cfg.opt(a.k, "k")?;
    r.push("X", x as u64);
    r.push("hspec", hspec);
    r.push("delta", delta);
    r.push("eps0", eps0);
    r.push("eps", eps);
    if let Some(k) = k {
        r.push("k", k);
    }
    Ok(make_short_scales(x as u64, hspec, delta, eps0, eps, k)?)
}

pub fn fluct_short(cfg: &Config, cmd: FluctShortCmd) -> Result<Output, CliError> {
    let run = Run::resolve(cfg, &cmd.run)?;
    let mut r = RunRecord::new("fluct-short");
    run.record(&mut r);
    let scales = short_family(cfg, &cmd.family, &mut r)?;
    let sieve = sieve_for(cfg, &cmd.sieve, scales.max_n(), &mut r)?;
    let rep = run_short_fluctuation(run.model, &sieve, &scales, run.twist, run.trials, run.seed)?;

    let primes: Vec<u64> = scales.scales.iter().map(|s| s.prime).collect();
    let mut cols = vec!["trial".to_string(), "seed".to_string()];
    for part in ["pruned", "smooth", "omega"] {
        cols.extend(primes.iter().map(|l| format!("{part}_l{l}")));
    }
    cols.extend(["max".to_string(), "good".to_string()]);
    let mut table = Table::new(cols);
    for i in 0..rep.fluctuation.sums.len() {
        let mut line = vec![i.to_string(), seed_column(run.seed, i)];
        for row in [&rep.fluctuation.sums[i], &rep.smooth[i], &rep.omega_excess[i]] {
            line.extend(row.iter().map(|&v| fmt_f64(v)));
        }
        line.push(fmt_f64(rep.fluctuation.max_signed[i]));
        line.push(rep.good_counts[i].to_string());
        table.rows.push(line);
    }
    let result = json!({
        "scales": to_json(&rep.scales)?,
        "parts": to_json(&rep.parts)?,
        "fluctuation": fluctuation_json(&rep.fluctuation),
        "good_threshold": rep.good_threshold,
        "good_fraction": rep.good_fraction,
    });
    finish(cfg, &cmd.output, table.render(&r), summary(&r, result))
}

pub fn slowvar(cfg: &Config, cmd: SlowvarCmd) -> Result<Output, CliError> {
    let run = Run::resolve(cfg, &cmd.run)?;
    let poly = cfg.get(cmd.poly, "poly", PolySpec::new(vec![0, 1, 1])?)?;
    let d = SlowVariationParams::default();
    let params = SlowVariationParams {
        c: cfg.get(cmd.c, "c", d.c)?,
        l_max: cfg.get(cmd.l_max, "l-max", d.l_max)?,
        grid: cfg.get(cmd.grid, "grid", d.grid)?,
        log_power: cfg.get(cmd.log_power, "log-power", d.log_power)?,
    };
    let mut r = RunRecord::new("slowvar");
    run.record(&mut r);
    r.push("poly", &poly);
    r.push("c", params.c);
    r.push("l-max", params.l_max);
    r.push("grid", params.grid);
    r.push("log-power", params.log_power);
    if !(params.c > 0.0 && params.c < 1.0) || params.l_max == 0 {
        return Err(usage("slowvar needs 0 < c < 1 and l-max >= 1"));
    }
    let n_max = *slow_scales(params.c, params.l_max).last().expect("l_max >= 1");
    let needed = ArithSet::poly_image(poly.clone(), n_max).sieve_requirement()?;
    let sieve = sieve_for(cfg, &cmd.sieve, needed, &mut r)?;
    let rep = run_slow_variation(run.model, &sieve, &poly, &params, run.twist, run.trials, run.seed)?;

    let mut cols = vec!["trial".to_string(), "seed".to_string()];
    cols.extend(rep.gaps.iter().map(|g| format!("max_inc_l{}", g.l)));
    let mut table = Table::new(cols);
    for i in 0..run.trials as usize {
        let mut line = vec![i.to_string(), seed_column(run.seed, i)];
        line.extend(rep.gaps.iter().map(|g| fmt_f64(g.max_increment[i])));
        table.rows.push(line);
    }
    let gaps = rep
        .gaps
        .iter()
        .map(|g| {
            let mut v = to_json(g)?;
            let obj = v.as_object_mut().expect("gap is an object");
            obj.remove("max_increment");
            obj.remove("grid");
            obj.insert("grid_points".into(), json!(g.grid.len()));
            Ok(v)
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let result = json!({ "params": to_json(&rep.params)?, "gaps": gaps });
    finish(cfg, &cmd.output, table.render(&r), summary(&r, result))
}

pub fn gaussmax(cfg: &Config, cmd: GaussmaxCmd) -> Result<Output, CliError> {
    let k = cfg.get(cmd.k, "k", 16usize)?;
    let t = cfg.get(cmd.t, "t", 1.0)?;
    let rho = cfg.get(cmd.rho, "rho", 0.0)?;
    let seed = cfg.get(cmd.seed, "seed", DEFAULT_SEED)?;
    let trials = cfg.get(cmd.trials, "trials", DEFAULT_TRIALS)?;
    if k == 0 || trials == 0 {
        return Err(usage("--k and --trials must be at least 1"));
    }
    let mut r = RunRecord::new("gaussmax");
    r.push("k", k);
    r.push("t", t);
    r.push("rho", rho);
    r.push("seed", seed);
    r.push("trials", trials);
    let mut cov = vec![rho; k * k];
    for i in 0..k {
        cov[i * k + i] = 1.0;
    }
    let cov = CovarianceMatrix::new(k, cov)?;
    let rep = gaussian_max_prob(&cov, t, trials, seed)?;
    let mut result = to_json(&rep)?;
    let reference = if rho == 0.0 {
        json!(std_normal_cdf(t).powi(k as i32))
    } else {
        Value::Null
    };
    result
        .as_object_mut()
        .expect("report is an object")
        .insert("independent_reference".into(), reference);
    finish_json(cfg, &cmd.output, summary(&r, result))
}

pub fn verify_scales(cfg: &Config, cmd: VerifyScalesCmd) -> Result<Output, CliError> {
    let mut r = RunRecord::new("verify-scales");
    let scales = short_family(cfg, &cmd.family, &mut r)?;
    let kinds = match cfg.opt(cmd.eq, "eq")? {
        Some(k) => {
            r.push("eq", k);
            vec![k]
        }
        None => vec![EquationKind::SquareProduct, EquationKind::RatioMatch],
    };
    let primes: Vec<u64> = scales.scales.iter().map(|s| s.prime).collect();
    let pairs: Vec<(u64, u64)> = match (cfg.opt(cmd.l1, "l1")?, cfg.opt(cmd.l2, "l2")?) {
        (Some(a), Some(b)) => {
            r.push("l1", a);
            r.push("l2", b);
            vec![(a, b)]
        }
        (None, None) => primes.iter().flat_map(|&a| primes.iter().map(move |&b| (a, b))).collect(),
        _ => return Err(usage("give both --l1 and --l2, or neither")),
    };
    let sieve = sieve_for(cfg, &cmd.sieve, scales.max_n(), &mut r)?;
    let mut table = Table::new(
        ["l1", "l2", "eq", "constraint", "total", "trivial", "nontrivial", "budget_ratio"]
            .map(String::from)
            .to_vec(),
    );
    let mut rows = Vec::new();
    for &kind in &kinds {
        for &(l1, l2) in &pairs {
            let c = verify_count_at_scales(&sieve, &scales, l1, l2, kind)?;
            table.rows.push(vec![
                l1.to_string(),
                l2.to_string(),
                kind.to_string(),
                c.constraint.to_string(),
                c.tally.total.to_string(),
                c.tally.trivial.to_string(),
                c.tally.nontrivial.to_string(),
                fmt_f64(c.budget_ratio),
            ]);
            rows.push(to_json(&c)?);
        }
    }
    let result = json!({ "scales": to_json(&scales)?, "counts": rows });
    finish(cfg, &cmd.output, table.render(&r), summary(&r, result))
}
