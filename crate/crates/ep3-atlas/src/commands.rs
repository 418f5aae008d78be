//! Subcommand implementations: thin, deterministic wrappers over the core
//! analysis modules that render CSV/JSON artifacts.

use std::fmt::Write as _;

use ep3_core::linalg::{self, Spectrum};
use ep3_core::models::FamilyDef;
use ep3_core::tracking::{self, LoopPath, LoopSpec};
use ep3_core::{epfind, jordan, puiseux, Complex64, CoreError};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::families;
use crate::output;
use crate::{ClassifyArgs, CliError, FindEpArgs, FitArgs, JordanArgs, LoopArgs, SheetArgs};

// ---------------------------------------------------------------------------
// flag parsing

fn parse_floats(flag: &str, text: &str) -> Result<Vec<f64>, CliError> {
    text.split(',')
        .map(|tok| {
            tok.trim()
                .parse::<f64>()
                .map_err(|_| CliError::usage(format!("--{flag}: '{tok}' is not a number")))
        })
        .collect()
}

/// `re,im` or just `re`.
fn parse_complex(flag: &str, text: &str) -> Result<Complex64, CliError> {
    let parts = parse_floats(flag, text)?;
    match parts.as_slice() {
        [re] => Ok(Complex64::new(*re, 0.0)),
        [re, im] => Ok(Complex64::new(*re, *im)),
        _ => Err(CliError::usage(format!("--{flag}: expected 're' or 're,im'"))),
    }
}

fn resolve_family(args: &crate::FamilyArgs) -> Result<FamilyDef, CliError> {
    families::resolve(&args.family, args.gamma, args.v)
}

fn one_param(family: &FamilyDef) -> Result<(), CliError> {
    if family.nparams() != 1 {
        return Err(CliError::usage(
            "this subcommand needs a one-complex-parameter family",
        ));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// classify / jordan

/// Detect the EP at `center` and build its normalized chain.
fn chain_at_center(
    family: &FamilyDef,
    center: Complex64,
) -> Result<(ep3_core::ComplexMatrix, jordan::JordanChain), CliError> {
    let m = family.evaluate(&[center])?;
    let records = jordan::detect_ep(&m, linalg::CLUSTER_TOL_DEFAULT)?;
    let record = records
        .iter()
        .find(|r| r.is_ep())
        .ok_or(CliError::Computation(CoreError::InvalidInput(
            "no exceptional point at the configured center",
        )))?;
    let chain = jordan::chain_at_ep(&m, record.algebraic_multiplicity)?;
    Ok((m, chain))
}

fn class_json(class: &puiseux::PuiseuxClass) -> Value {
    match class {
        puiseux::PuiseuxClass::ThirdRoot { lambda1, branches } => json!({
            "kind": "ThirdRoot",
            "lambda1": output::complex(*lambda1),
            "branches": output::complex_list(branches),
        }),
        puiseux::PuiseuxClass::SquareRootPlusTaylor {
            sqrt_coeff,
            taylor_coeff,
            taylor_vector_correction,
        } => json!({
            "kind": "SquareRootPlusTaylor",
            "sqrt_coeff": output::complex(*sqrt_coeff),
            "taylor_coeff": output::complex(*taylor_coeff),
            "taylor_vector_correction": output::vector(taylor_vector_correction),
        }),
        puiseux::PuiseuxClass::SquareRoot { lambda1 } => json!({
            "kind": "SquareRoot",
            "lambda1": output::complex(*lambda1),
        }),
        puiseux::PuiseuxClass::TaylorOnly => json!({ "kind": "TaylorOnly" }),
        puiseux::PuiseuxClass::DegenerateOther => json!({ "kind": "DegenerateOther" }),
    }
}

pub fn cmd_classify(args: &ClassifyArgs) -> Result<(), CliError> {
    let family = resolve_family(&args.family)?;
    one_param(&family)?;
    let center = parse_complex("center", &args.center)?;
    let (m, chain) = chain_at_center(&family, center)?;
    let h1 = family.derivative_at_zero()?;
    let tol = args.tol.unwrap_or_else(|| puiseux::scalar_tol(&h1, &chain));
    let class = match chain.length() {
        3 => puiseux::classify_ep3(&m, &chain, &h1, tol)?,
        2 => puiseux::classify_ep2(&chain, &h1, tol)?,
        n => {
            return Err(CliError::Computation(CoreError::AmbiguousStructure {
                algebraic: n,
                geometric: 1,
            }))
        }
    };
    let report = json!({
        "command": "classify",
        "family": families::family_name(&family),
        "center": output::complex(center),
        "lambda0": output::complex(chain.lambda0),
        "kind": class.kind_name(),
        "class": class_json(&class),
        "scalar_tol": tol,
        "chain": output::chain_json(&chain),
    });
    output::emit_json(&args.out, &report)?;
    Ok(())
}

pub fn cmd_jordan(args: &JordanArgs) -> Result<(), CliError> {
    let family = resolve_family(&args.family)?;
    one_param(&family)?;
    let center = parse_complex("center", &args.center)?;
    let (_, chain) = chain_at_center(&family, center)?;
    let report = json!({
        "command": "jordan",
        "family": families::family_name(&family),
        "center": output::complex(center),
        "chain": output::chain_json(&chain),
    });
    output::emit_json(&args.out, &report)?;
    Ok(())
}

// ---------------------------------------------------------------------------
// sheet

/// Assignment of `current` value slots to `reference` slots minimizing the
/// total eigenvalue motion: exhaustive over permutations for n <= 6,
/// greedy beyond. Returns `order` with `order[slot] = current index`.
fn continuation_order(reference: &[Complex64], current: &[Complex64]) -> Vec<usize> {
    let n = reference.len();
    if n <= 6 {
        let mut best: Option<(f64, Vec<usize>)> = None;
        let mut perm: Vec<usize> = (0..n).collect();
        heap_permutations(&mut perm, n, &mut |p| {
            let cost: f64 = (0..n).map(|s| (current[p[s]] - reference[s]).norm()).sum();
            if best.as_ref().map_or(true, |(c, _)| cost < *c) {
                best = Some((cost, p.to_vec()));
            }
        });
        best.expect("n >= 1").1
    } else {
        let mut taken = vec![false; n];
        (0..n)
            .map(|s| {
                let (j, _) = current
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| !taken[*j])
                    .map(|(j, &z)| (j, (z - reference[s]).norm()))
                    .min_by(|a, b| a.1.partial_cmp(&b.1).expect("finite distances"))
                    .expect("one free slot per step");
                taken[j] = true;
                j
            })
            .collect()
    }
}

fn heap_permutations(items: &mut Vec<usize>, k: usize, visit: &mut impl FnMut(&[usize])) {
    if k <= 1 {
        visit(items);
        return;
    }
    for i in 0..k {
        heap_permutations(items, k - 1, visit);
        if k % 2 == 0 {
            items.swap(i, k - 1);
        } else {
            items.swap(0, k - 1);
        }
    }
}

fn thread_pool() -> Result<rayon::ThreadPool, CliError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(text) = std::env::var("EP3_ATLAS_THREADS") {
        let threads: usize = text
            .parse()
            .ok()
            .filter(|&t| t >= 1)
            .ok_or_else(|| CliError::usage("EP3_ATLAS_THREADS must be a positive integer"))?;
        builder = builder.num_threads(threads);
    }
    builder
        .build()
        .map_err(|e| CliError::usage(format!("cannot build thread pool: {e}")))
}

pub fn cmd_sheet(args: &SheetArgs) -> Result<(), CliError> {
    let family = resolve_family(&args.family)?;
    one_param(&family)?;
    let grid = parse_floats("grid", &args.grid)?;
    let [nx, ny] = match grid.as_slice() {
        [nx, ny] if *nx >= 1.0 && *ny >= 1.0 && nx.fract() == 0.0 && ny.fract() == 0.0 => {
            [*nx as usize, *ny as usize]
        }
        _ => return Err(CliError::usage("--grid: expected 'nx,ny' positive integers")),
    };
    let bounds = parse_floats("bounds", &args.bounds)?;
    let [re_min, re_max, im_min, im_max] = match bounds.as_slice() {
        [a, b, c, d] if a < b && c < d => [*a, *b, *c, *d],
        _ => {
            return Err(CliError::usage(
                "--bounds: expected 're_min,re_max,im_min,im_max' with min < max",
            ))
        }
    };

    // row-major over the grid: outer loop im, inner loop re
    let step = |lo: f64, hi: f64, count: usize, i: usize| {
        if count == 1 {
            lo
        } else {
            lo + (hi - lo) * i as f64 / (count - 1) as f64
        }
    };
    let points: Vec<Complex64> = (0..ny)
        .flat_map(|iy| {
            (0..nx).map(move |ix| {
                Complex64::new(step(re_min, re_max, nx, ix), step(im_min, im_max, ny, iy))
            })
        })
        .collect();

    // the per-point diagonalizations are independent; continuation labeling
    // below is sequential
    let spectra: Vec<Result<Spectrum, CoreError>> = thread_pool()?.install(|| {
        points
            .par_iter()
            .map(|&z| {
                let m = family.evaluate(&[z])?;
                linalg::eig(&m, linalg::CLUSTER_TOL_DEFAULT)
            })
            .collect()
    });
    let spectra = spectra.into_iter().collect::<Result<Vec<_>, _>>()?;

    // branch labels globally consistent by row-major continuation: each
    // point matches against its left neighbor, each row start against the
    // row above
    let n = family.dim();
    let mut labeled: Vec<Vec<Complex64>> = Vec::with_capacity(points.len());
    for (idx, spectrum) in spectra.iter().enumerate() {
        let ordered = if idx == 0 {
            spectrum.values.clone()
        } else {
            let reference = if idx % nx == 0 { &labeled[idx - nx] } else { &labeled[idx - 1] };
            let order = continuation_order(reference, &spectrum.values);
            order.iter().map(|&j| spectrum.values[j]).collect()
        };
        labeled.push(ordered);
    }

    let mut csv = String::from("re_z,im_z,branch,re_lambda,im_lambda,defect\n");
    for (idx, values) in labeled.iter().enumerate() {
        let z = points[idx];
        let defect = u8::from(spectra[idx].defect_flags.iter().any(|&d| d));
        for (branch, lambda) in values.iter().enumerate() {
            writeln!(csv, "{},{},{branch},{},{},{defect}", z.re, z.im, lambda.re, lambda.im)
                .expect("string writes are infallible");
        }
    }
    std::fs::write(format!("{}.csv", args.out), csv)?;
    debug_assert_eq!(labeled.len(), nx * ny);
    let _ = n;
    Ok(())
}

// ---------------------------------------------------------------------------
// loop

pub fn cmd_loop(args: &LoopArgs) -> Result<(), CliError> {
    let family = resolve_family(&args.family)?;
    let center = parse_complex("center", &args.center)?;
    let path = match family.nparams() {
        1 => LoopPath::ComplexCircle { center, radius: args.radius },
        2 => {
            if center.norm() != 0.0 {
                return Err(CliError::usage(
                    "two-real-parameter loops are centered at the origin; drop --center",
                ));
            }
            LoopPath::RealEllipse { radius: args.radius }
        }
        _ => return Err(CliError::usage("unsupported parameter count for loops")),
    };
    let spec = LoopSpec {
        path,
        steps_per_cycle: args.steps,
        cycles: args.cycles,
        reversed: args.reversed,
    };
    let report = tracking::track_loop(&family, &spec)?;
    let summary = tracking::monodromy_summary(&report);
    let crossings = tracking::detect_self_crossings(&report);

    let mut csv = String::from("cycle,step,phi,branch,re_lambda,im_lambda\n");
    for (i, sample) in report.samples.iter().enumerate() {
        let cycle = i / args.steps;
        let step = i % args.steps;
        for (branch, lambda) in sample.values.iter().enumerate() {
            writeln!(csv, "{cycle},{step},{},{branch},{},{}", sample.phi, lambda.re, lambda.im)
                .expect("string writes are infallible");
        }
    }
    std::fs::write(format!("{}.csv", args.out), csv)?;

    let path_json = match path {
        LoopPath::ComplexCircle { center, radius } => json!({
            "type": "complex-circle",
            "center": output::complex(center),
            "radius": radius,
        }),
        LoopPath::RealEllipse { radius } => json!({
            "type": "real-ellipse",
            "radius": radius,
        }),
    };
    let summary_json = json!({
        "command": "loop",
        "family": families::family_name(&family),
        "path": path_json,
        "steps_per_cycle": args.steps,
        "cycles": args.cycles,
        "reversed": args.reversed,
        "branch_count": report.branch_count,
        "permutation": report.permutations[0],
        "permutations": report.permutations,
        "signs": report.signs,
        "cycles_to_return": report.cycles_to_return,
        "phases": report.phases,
        "accumulated_phases": report.accumulated_phases,
        "cycle_structure": summary.cycle_structure,
        "orbits": summary.orbits,
        "phase_per_orbit": summary.phase_per_orbit,
        "crossings": Value::Array(
            crossings
                .iter()
                .map(|c| json!({
                    "branch": c.branch,
                    "phi1": c.phi1,
                    "phi2": c.phi2,
                    "point": output::complex(c.point),
                }))
                .collect(),
        ),
    });
    std::fs::write(format!("{}_summary.json", args.out), output::render(&summary_json))?;
    Ok(())
}

// ---------------------------------------------------------------------------
// fit

pub fn cmd_fit(args: &FitArgs) -> Result<(), CliError> {
    let family = resolve_family(&args.family)?;
    one_param(&family)?;
    let lambda0 = parse_complex("lambda0", &args.lambda0)?;
    let mut radii = parse_floats("radii", &args.radii)?;
    radii.sort_by(|a, b| b.partial_cmp(a).expect("finite radii"));
    radii.dedup();
    let fits = puiseux::fit_exponents(&family, lambda0, &radii, args.steps)?;
    let report = json!({
        "command": "fit",
        "family": families::family_name(&family),
        "lambda0": output::complex(lambda0),
        "radii": radii,
        "steps_per_circle": args.steps,
        "groups": Value::Array(
            fits.iter()
                .map(|g| json!({
                    "branch_count": g.branch_count,
                    "slope": output::finite_or_null(g.slope),
                    "below_floor": g.below_floor,
                    "mean_moduli": g.mean_moduli,
                }))
                .collect(),
        ),
    });
    output::emit_json(&args.out, &report)?;
    Ok(())
}

// ---------------------------------------------------------------------------
// find-ep

fn parse_guess(text: &str, nparams: usize) -> Result<Vec<Complex64>, CliError> {
    let parts = parse_floats("guess", text)?;
    if parts.len() == nparams {
        Ok(parts.iter().map(|&re| Complex64::new(re, 0.0)).collect())
    } else if parts.len() == 2 * nparams {
        Ok(parts.chunks(2).map(|p| Complex64::new(p[0], p[1])).collect())
    } else {
        Err(CliError::usage(format!(
            "--guess: expected {nparams} floats (real parameters) or {} floats (re,im pairs)",
            2 * nparams
        )))
    }
}

pub fn cmd_find_ep(args: &FindEpArgs) -> Result<(), CliError> {
    let family = resolve_family(&args.family)?;
    let nparams = family.nparams();
    let guess_params = match &args.guess {
        Some(text) => parse_guess(text, nparams)?,
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
            (0..nparams)
                .map(|_| Complex64::new(rng.gen_range(-0.2..0.2), rng.gen_range(-0.2..0.2)))
                .collect()
        }
    };
    let guess_lambda = parse_complex("guess-lambda", &args.guess_lambda)?;
    let problem = epfind::EpSearchProblem {
        family: family.clone(),
        order: args.order,
        guess_lambda,
        guess_params: guess_params.clone(),
    };
    let result = epfind::find_ep(&problem, args.tol, args.max_iter)?;
    let report = json!({
        "command": "find-ep",
        "family": families::family_name(&family),
        "order": args.order,
        "guess_lambda": output::complex(guess_lambda),
        "guess_params": output::complex_list(&guess_params),
        "lambda0": output::complex(result.lambda0),
        "params": output::complex_list(&result.params),
        "residual": result.residual,
        "verified_order": result.verified_order,
    });
    output::emit_json(&args.out, &report)?;
    Ok(())
}
