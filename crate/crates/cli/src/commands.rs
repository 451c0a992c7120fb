use std::fs;
use std::path::Path;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde_json::json;

use gareg::datagen::{sim_knot_data, sim_subset_data, KnotMean, KnotSimSpec, SubsetSimSpec};
use gareg::ga::{run_observed, BinaryOperators, GenerationStats, Individual, KnotOperators, Objective, Operators};
use gareg::island::run_islands_observed;
use gareg::objective::{KnotObjectiveContext, SubsetObjectiveContext};
use gareg::oracle::{exhaustive_knot_search, exhaustive_subset_search, SUBSET_SEARCH_MAX_P};
use gareg::rng::{stream_rng, Stream};
use gareg::{
    Basis, BinaryChromosome, DesignMatrix, GaConfig, GlmFamily, IcKind, IslandConfig, KnotChromosome, KnotMode, RunTrace,
    SplineSpec,
};

use crate::args::{BasisArg, EngineArgs, FamilyArg, IcArg, KnotsArgs, MethodArg, SimKind, SimulateArgs, SubsetArgs};
use crate::data::{read_table, write_csv};
use crate::error::CliError;
use crate::exec::Threaded;
use crate::report::{write_trace, Best, ConfigEcho, Mode, OracleReport, RunReport};

const FIT_GRID_POINTS: usize = 500;

/// Construction errors on user data are data errors, not infeasibility.
fn data_err(e: gareg::Error) -> CliError {
    match e {
        gareg::Error::InvalidConfig(m) => CliError::Usage(m),
        gareg::Error::InfeasibleProblem(_) => CliError::from(e),
        other => CliError::Data(other.to_string()),
    }
}

pub fn resolve_seed(seed: Option<u64>) -> u64 {
    seed.unwrap_or_else(|| SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_nanos() as u64))
}

fn ic_kind(ic: IcArg) -> IcKind {
    match ic {
        IcArg::Bic => IcKind::Bic,
        IcArg::Aic => IcKind::Aic,
        IcArg::Aicc => IcKind::Aicc,
    }
}

fn ic_name(ic: IcKind) -> &'static str {
    match ic {
        IcKind::Bic => "BIC",
        IcKind::Aic => "AIC",
        IcKind::Aicc => "AICc",
    }
}

fn prepare_out(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))
}

fn search<O, F>(ops: &O, objective: &F, ga: &GaConfig, engine: &EngineArgs) -> Result<RunTrace<O::Chromosome>, CliError>
where
    O: Operators + Sync,
    O::Chromosome: Send + Sync,
    F: Objective<O::Chromosome> + Sync,
{
    let monitor = engine.monitor;
    let mut report = move |s: &GenerationStats| {
        if monitor {
            eprintln!("generation {} best {} accepted {}", s.generation, s.best_fitness, s.accepted);
        }
    };
    let trace = match engine.method {
        MethodArg::Single => {
            let mut obs = |s: &GenerationStats, _: &[Individual<O::Chromosome>]| report(s);
            run_observed(ops, objective, ga, &mut obs)?
        }
        MethodArg::Island => {
            let isl = IslandConfig {
                n_islands: engine.islands,
                island_pop: ga.pop_size,
                migration_interval: engine.migration_interval,
                max_mig: engine.max_mig,
                migrants_per_event: engine.migrants,
            };
            run_islands_observed(ops, objective, ga, &isl, &Threaded { workers: engine.workers }, &mut report)?
        }
    };
    if !trace.best.fitness.is_finite() {
        return Err(CliError::Infeasible("no configuration with a finite score was found".into()));
    }
    Ok(trace)
}

pub fn knots(args: &KnotsArgs) -> Result<(), CliError> {
    let started = Instant::now();
    let seed = resolve_seed(args.engine.seed);
    let table = read_table(&args.input)?;
    let x = table.column(&args.x_col)?.to_vec();
    let y = table.column(&args.y_col)?.to_vec();

    let basis = match args.basis {
        BasisArg::Ppolys => Basis::TruncatedPower,
        BasisArg::Ns => Basis::NaturalCubic,
        BasisArg::Bs => Basis::BSpline,
    };
    if basis == Basis::NaturalCubic && args.degree.is_some() {
        log::warn!("--degree is ignored for ns (natural cubic splines are always cubic)");
    }
    let boundary = KnotObjectiveContext::boundary(&x);
    let spec = SplineSpec::new(basis, args.degree.unwrap_or(3), !args.no_intercept, boundary).map_err(data_err)?;
    let ic = ic_kind(args.ic);
    let ctx = KnotObjectiveContext::new(x, y, spec, ic, args.min_dist).map_err(data_err)?;
    let (mode, ctx) = match args.fixed_knots {
        Some(m) => (KnotMode::Fixed(m), ctx.with_m_max(None)),
        None => {
            let cap = args.m_max.unwrap_or_else(|| ctx.fp.effective_m_max());
            (KnotMode::Varying, ctx.with_m_max(Some(cap)))
        }
    };

    let ga = GaConfig {
        pop_size: args.pop_size,
        p_crossover: args.p_crossover,
        p_mutation: args.p_mutation,
        max_gen: args.max_gen,
        stall_limit: args.stall,
        restart_cap: args.engine.restart_cap,
        step_retries: args.step_retries,
        seed,
        ..GaConfig::default()
    };
    let ops = KnotOperators::new(ctx.fp.clone(), mode, &ga);
    let trace = search(&ops, &ctx, &ga, &args.engine)?;
    let best = &trace.best;
    let fit = ctx.fit(&best.chromosome)?;

    let oracle = if args.oracle {
        let range = match mode {
            KnotMode::Fixed(m) => m..=m,
            KnotMode::Varying => 0..=ctx.fp.effective_m_max(),
        };
        let r = exhaustive_knot_search(&ctx, range)?;
        Some(OracleReport {
            best_score: r.best_score,
            best_configurations: r.best_configurations.iter().map(one_based_knots).collect(),
            evaluated_count: r.evaluated_count,
            ga_attains_optimum: best.fitness == r.best_score,
        })
    } else {
        None
    };

    let out = &args.engine.out;
    prepare_out(out)?;
    let lo = boundary.0;
    let step = (boundary.1 - boundary.0) / (FIT_GRID_POINTS - 1) as f64;
    let grid: Vec<f64> =
        (0..FIT_GRID_POINTS).map(|i| if i + 1 == FIT_GRID_POINTS { boundary.1 } else { lo + step * i as f64 }).collect();
    let fitted_obs = fit.predict(&ctx.spec, &ctx.x)?;
    let fitted_grid = fit.predict(&ctx.spec, &grid)?;
    let observed = ctx.x.iter().zip(&ctx.y).zip(&fitted_obs).map(|((x, y), f)| {
        vec![x.to_string(), y.to_string(), f.to_string(), "observed".to_string()]
    });
    let curve = grid.iter().zip(&fitted_grid).map(|(x, f)| vec![x.to_string(), String::new(), f.to_string(), "grid".to_string()]);
    write_csv(&out.join("fit.csv"), &["x", "y", "fitted", "source"], observed.chain(curve))?;

    let mut echo = args.clone();
    echo.engine = args.engine.echo(seed);
    let report = RunReport {
        mode: Mode::Knots,
        seed,
        best: Best::Knots {
            knot_indices: one_based_knots(&best.chromosome),
            knot_values: best.chromosome.knot_values(&ctx.grid.values),
            rss: fit.fit.rss_or_deviance,
            free_params: fit.fit.free_params,
            coefficients: fit.fit.coefficients.clone(),
        },
        best_fitness: best.fitness,
        ic_kind: ic_name(ic).into(),
        generations: trace.generations,
        wall_time_secs: args.engine.report_time.then(|| started.elapsed().as_secs_f64()),
        oracle,
        config: ConfigEcho::Knots(echo),
    };
    write_trace(out, &trace.best_fitness, &trace.accepted)?;
    report.write(out)
}

fn one_based_knots(c: &KnotChromosome) -> Vec<usize> {
    c.tau().iter().map(|i| i + 1).collect()
}

fn one_based_bits(z: &BinaryChromosome) -> Vec<usize> {
    z.selected().iter().map(|i| i + 1).collect()
}

pub fn subset(args: &SubsetArgs) -> Result<(), CliError> {
    let started = Instant::now();
    let seed = resolve_seed(args.engine.seed);
    let table = read_table(&args.input)?;
    let y = table.column(&args.y_col)?.to_vec();
    let names: Vec<String> = table.headers.iter().filter(|h| **h != args.y_col).cloned().collect();
    if names.is_empty() {
        return Err(CliError::Data("no predictor columns besides the response".into()));
    }
    let cols: Vec<Vec<f64>> = names.iter().map(|n| table.column(n).map(<[f64]>::to_vec)).collect::<Result<_, _>>()?;
    let x = DesignMatrix::from_columns(&cols).map_err(data_err)?;
    let family = match args.family {
        FamilyArg::Gaussian => GlmFamily::GaussianIdentity,
        FamilyArg::Binomial => GlmFamily::BinomialLogit,
        FamilyArg::Poisson => GlmFamily::PoissonLog,
    };
    let ctx = SubsetObjectiveContext::new(y, x, family, true).map_err(data_err)?;
    let p = ctx.p();
    if args.oracle && p > SUBSET_SEARCH_MAX_P {
        return Err(CliError::Usage(format!("--oracle supports at most {SUBSET_SEARCH_MAX_P} predictors, data has {p}")));
    }

    let ga = GaConfig {
        pop_size: args.pop_size,
        p_crossover: args.p_crossover,
        p_mutation: args.p_mutation,
        max_gen: args.max_gen,
        stall_limit: args.stall,
        restart_cap: args.engine.restart_cap,
        step_retries: args.step_retries,
        seed,
        ..GaConfig::default()
    };
    let ops = BinaryOperators { p, p_mutation: args.p_mutation };
    let trace = search(&ops, &ctx, &ga, &args.engine)?;
    let best = &trace.best;
    let fit = ctx.refit(&best.chromosome)?;

    let oracle = if args.oracle {
        let r = exhaustive_subset_search(&ctx)?;
        Some(OracleReport {
            best_score: r.best_score,
            best_configurations: r.best_configurations.iter().map(one_based_bits).collect(),
            evaluated_count: r.evaluated_count,
            ga_attains_optimum: best.fitness == r.best_score,
        })
    } else {
        None
    };

    let out = &args.engine.out;
    prepare_out(out)?;
    let selected = best.chromosome.selected();
    let mut echo = args.clone();
    echo.engine = args.engine.echo(seed);
    let report = RunReport {
        mode: Mode::Subset,
        seed,
        best: Best::Subset {
            selected: one_based_bits(&best.chromosome),
            selected_names: selected.iter().map(|&j| names[j].clone()).collect(),
            intercept: fit.coefficients.first().copied(),
            coefficients: fit.coefficients.iter().skip(1).copied().collect(),
            deviance: fit.rss_or_deviance,
        },
        best_fitness: best.fitness,
        ic_kind: "BIC".into(),
        generations: trace.generations,
        wall_time_secs: args.engine.report_time.then(|| started.elapsed().as_secs_f64()),
        oracle,
        config: ConfigEcho::Subset(echo),
    };
    write_trace(out, &trace.best_fitness, &trace.accepted)?;
    report.write(out)
}

pub fn simulate(args: &SimulateArgs) -> Result<(), CliError> {
    let seed = resolve_seed(args.seed);
    let mut rng = stream_rng(seed, Stream::Data);
    prepare_out(&args.out)?;
    let truth = match args.kind {
        SimKind::Subset => {
            let spec = SubsetSimSpec {
                n: args.n.unwrap_or(100),
                p: args.p,
                s0: args.s0,
                sigma: args.sigma.unwrap_or(1.5),
                magnitudes_range: (args.mag_lo, args.mag_hi),
                rho: args.rho,
            };
            let sim = sim_subset_data(&spec, &mut rng).map_err(data_err)?;
            let mut headers = vec!["y".to_string()];
            headers.extend((1..=spec.p).map(|j| format!("x{j}")));
            let rows = (0..spec.n).map(|i| {
                let mut row = vec![sim.y[i].to_string()];
                row.extend((0..spec.p).map(|j| sim.x.get(i, j).to_string()));
                row
            });
            let header_refs: Vec<&str> = headers.iter().map(String::as_str).collect();
            write_csv(&args.out.join("data.csv"), &header_refs, rows)?;
            json!({
                "kind": "subset",
                "seed": seed,
                "n": spec.n,
                "p": spec.p,
                "s0": spec.s0,
                "sigma": spec.sigma,
                "rho": spec.rho,
                "beta_true": sim.beta_true,
                "true_idx": sim.true_idx.iter().map(|i| i + 1).collect::<Vec<_>>(),
            })
        }
        SimKind::Knots => {
            let n = args.n.unwrap_or(200);
            let sigma = args.sigma.unwrap_or(1.0);
            let spec = if args.smooth {
                KnotSimSpec { n, x_range: (1.0, n as f64), mean: KnotMean::Smooth, sigma }
            } else {
                let nf = n as f64;
                let breaks = args.breaks.clone().unwrap_or_else(|| vec![(0.35 * nf).round(), (0.7 * nf).round()]);
                let slopes = args.slopes.clone().unwrap_or_else(|| {
                    (0..=breaks.len()).map(|k| if k % 2 == 0 { 0.5 } else { -0.5 }).collect()
                });
                KnotSimSpec::piecewise(n, args.intercept, slopes, breaks, sigma)
            };
            let sim = sim_knot_data(&spec, &mut rng).map_err(data_err)?;
            let rows = sim.x.iter().zip(&sim.y).map(|(x, y)| vec![x.to_string(), y.to_string()]);
            write_csv(&args.out.join("data.csv"), &["x", "y"], rows)?;
            let (slopes, intercept) = match &spec.mean {
                KnotMean::PiecewiseLinear { slopes, intercept, .. } => (Some(slopes.clone()), Some(*intercept)),
                KnotMean::Smooth => (None, None),
            };
            json!({
                "kind": "knots",
                "seed": seed,
                "n": n,
                "sigma": sigma,
                "smooth": args.smooth,
                "breaks": sim.breaks,
                "slopes": slopes,
                "intercept": intercept,
            })
        }
    };
    let text = serde_json::to_string_pretty(&truth).map_err(|e| CliError::Io(e.to_string()))? + "\n";
    fs::write(args.out.join("truth.json"), text)?;
    Ok(())
}
