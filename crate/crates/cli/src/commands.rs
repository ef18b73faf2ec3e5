use std::collections::BTreeMap;
use std::io::Read;

use serde_json::{json, Value};
use tropfan::chow::{chow_presentation, chow_presentation_with, chow_ranks, poincare_verdict_with, Coefficients};
use tropfan::corpus;
use tropfan::criteria;
use tropfan::format::{read_matroid, read_tfan, to_document, write_document, TfanFile};
use tropfan::matroid::{bergman_fan, Matroid};
use tropfan::modification::{modify, recognize_along};
use tropfan::plfun::{divisor, PLFunction};
use tropfan::polyfan::{stellar_subdivision, unimodular_refinement, IsoSearch};
use tropfan::quasilinear::{read_certificate, recognize_with_budget, verify_certificate, write_certificate, Verdict};
use tropfan::tropcycle::{
    check_balancing, find_weighted_isomorphism, irreducibility, local_profile, minkowski_basis, product_weighted,
    refine_weights, star_weighted, WeightedFan,
};

use crate::report::{ints, matrix, show, weight, yes_no, CliError, Context, Output};
use crate::{CheckCommand, Cli, Coeff, Command, ComputeCommand, FanInput};

type Result<T> = std::result::Result<T, CliError>;

fn read_source(path: &str) -> Result<String> {
    let mut text = String::new();
    if path == "-" {
        std::io::stdin()
            .read_to_string(&mut text)
            .map_err(|source| CliError::Io { path: "<stdin>".into(), source })?;
    } else {
        text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.into(), source })?;
    }
    Ok(text)
}

fn load(path: &str) -> Result<TfanFile> {
    read_tfan(&read_source(path)?).context(path)
}

fn load_input(input: &FanInput) -> Result<TfanFile> {
    match (&input.fan_flag, &input.fan) {
        (Some(p), None) | (None, Some(p)) => load(p),
        (Some(_), Some(_)) => Err(CliError::Usage("give the fan either with --fan or as an argument, not both".into())),
        (None, None) => Err(CliError::Usage("no fan given (use --fan PATH, or - for standard input)".into())),
    }
}

fn named_pl<'a>(file: &'a TfanFile, name: &str) -> Result<&'a PLFunction> {
    file.pl(name).ok_or_else(|| {
        let known: Vec<&str> = file.pl_functions.iter().map(|(n, _)| n.as_str()).collect();
        CliError::Usage(format!("no function named {name:?} in the fan document (known: {known:?})"))
    })
}

fn coefficients(c: Option<Coeff>) -> Option<Coefficients> {
    c.map(|c| match c {
        Coeff::Z => Coefficients::Integers,
        Coeff::Q => Coefficients::Rationals,
    })
}

fn fan_output(command: &str, wf: &WeightedFan, pl: &[(String, PLFunction)], metadata: BTreeMap<String, String>) -> Output {
    let doc = to_document(wf, pl, &metadata);
    let text = write_document(&doc);
    let report = json!({ "fan": serde_json::to_value(&doc).expect("documents serialize") });
    Output::new(command, report, vec![]).with_document(text)
}

pub fn run(cli: &Cli) -> Result<Output> {
    match &cli.command {
        Command::Check { what } => check(what),
        Command::Compute { what } => compute(what),
        Command::Modify { input, pl } => {
            let file = load_input(input)?;
            let phi = named_pl(&file, pl)?;
            let m = modify(&file.fan, phi)?;
            let mut metadata = BTreeMap::new();
            metadata.insert("modified_along".into(), pl.clone());
            if let Some(r) = m.vertical_ray {
                metadata.insert("vertical_ray".into(), r.to_string());
            }
            Ok(fan_output("modify", &m.fan, &[], metadata))
        }
        Command::RecognizeModification { input, direction } => {
            let file = load_input(input)?;
            if *direction >= file.fan.fan().rays().len() {
                return Err(tropfan::Error::RayIndexOutOfRange(*direction).into());
            }
            Ok(match recognize_along(&file.fan, *direction) {
                None => Output::new(
                    "recognize-modification",
                    json!({ "modification": false, "direction": direction }),
                    vec![format!("not a modification with ray {direction} vertical")],
                ),
                Some(w) => {
                    let base = to_document(&w.base, &[("phi".to_string(), w.phi.clone())], &BTreeMap::new());
                    let f = w.base.fan();
                    let ord = weight(f, &w.divisor().ord);
                    let summary = vec![
                        format!("modification with ray {direction} vertical"),
                        format!("base: {} rays, {} maximal cones", f.rays().len(), f.maximal_cones().len()),
                        format!("divisor: {} cones of nonzero order", w.divisor().ord.values().len()),
                    ];
                    Output::new(
                        "recognize-modification",
                        json!({
                            "modification": true,
                            "direction": direction,
                            "change": matrix(&w.change),
                            "exact": w.exact,
                            "base": serde_json::to_value(&base).expect("documents serialize"),
                            "divisor": ord,
                        }),
                        summary,
                    )
                }
            })
        }
        Command::Bergman { uniform, matroid } => {
            let m = match (uniform, matroid) {
                (Some(u), None) => Matroid::uniform(u[0], u[1])?,
                (None, Some(p)) => read_matroid(&read_source(p)?).context(p)?,
                _ => return Err(CliError::Usage("give exactly one of --uniform R N or --matroid PATH".into())),
            };
            let b = bergman_fan(&m)?;
            let mut metadata = BTreeMap::new();
            metadata.insert("matroid".into(), format!("rank {} on {} elements", m.rank(), m.ground_size()));
            Ok(fan_output("bergman", &b, &[], metadata))
        }
        Command::Quasilinear { input, budget, cert } => {
            let file = load_input(input)?;
            let verdict = recognize_with_budget(&file.fan, *budget);
            let summary = match &verdict {
                Verdict::Quasilinear { certificate } => {
                    vec![format!("quasilinear (certificate depth {})", certificate.depth())]
                }
                Verdict::NotQuasilinear { reason, .. } => vec![format!("not quasilinear: {reason}")],
                Verdict::Inconclusive { reason } => vec![format!("inconclusive: {reason}")],
            };
            if let (Some(path), Some(c)) = (cert, verdict.certificate()) {
                std::fs::write(path, write_certificate(c)).map_err(|source| CliError::Io { path: path.clone(), source })?;
            }
            let mut report = serde_json::to_value(&verdict).expect("verdicts serialize");
            if let Some(c) = verdict.certificate() {
                report["depth"] = json!(c.depth());
            }
            Ok(Output::new("quasilinear", report, summary))
        }
        Command::VerifyCert { input, cert } => {
            let file = load_input(input)?;
            let certificate = read_certificate(&read_source(cert)?).context(cert)?;
            let r = verify_certificate(&file.fan, &certificate)?;
            let summary = vec![yes_no(r.accepted, "certificate accepted", "certificate rejected")];
            Ok(Output::new("verify-cert", serde_json::to_value(&r).expect("reports serialize"), summary))
        }
        Command::Isomorphic { fans, budget } => {
            let (a, b) = (load(&fans[0])?, load(&fans[1])?);
            let (report, summary) = match find_weighted_isomorphism(&a.fan, &b.fan, *budget) {
                IsoSearch::Found(iso) => (
                    json!({ "isomorphic": true, "matrix": matrix(&iso.matrix), "ray_map": iso.ray_map }),
                    "isomorphic".to_string(),
                ),
                IsoSearch::None => (json!({ "isomorphic": false }), "not isomorphic".to_string()),
                IsoSearch::BudgetExceeded => (json!({ "isomorphic": null }), "inconclusive: budget exceeded".to_string()),
            };
            Ok(Output::new("isomorphic", report, vec![summary]))
        }
        Command::Examples { name, verify_all } => examples(name.as_deref(), *verify_all),
    }
}

fn check(what: &CheckCommand) -> Result<Output> {
    match what {
        CheckCommand::Balance(input) => {
            let file = load_input(input)?;
            let r = check_balancing(&file.fan);
            let f = file.fan.fan();
            let violations: Vec<Value> =
                r.violations.iter().map(|(c, v)| json!({ "cone": f.cone(*c).rays(), "defect": ints(v) })).collect();
            let mut summary = vec![yes_no(r.balanced, "balanced", "not balanced")];
            for (c, v) in &r.violations {
                summary.push(format!("  cone {:?}: defect {}", f.cone(*c).rays(), show(v)));
            }
            Ok(Output::new("check balance", json!({ "balanced": r.balanced, "violations": violations }), summary))
        }
        CheckCommand::Reduced(input) => {
            let file = load_input(input)?;
            let reduced = file.fan.is_reduced();
            Ok(Output::new(
                "check reduced",
                json!({ "reduced": reduced, "weights": ints(&file.fan.weight_list()) }),
                vec![yes_no(reduced, "reduced", "not reduced")],
            ))
        }
        CheckCommand::Irreducible(input) => {
            let file = load_input(input)?;
            let r = irreducibility(&file.fan)?;
            let d = file.fan.dim();
            let summary =
                vec![format!("rank M{d} = {}, {}", r.rank, yes_no(r.irreducible, "irreducible", "not irreducible"))];
            let fundamental = r.fundamental.as_ref().map(|w| weight(file.fan.fan(), w));
            Ok(Output::new(
                "check irreducible",
                json!({
                    "irreducible": r.irreducible,
                    "rank": r.rank,
                    "fundamental": fundamental,
                    "is_fundamental": r.is_fundamental,
                }),
                summary,
            ))
        }
        CheckCommand::Local(input) => {
            let file = load_input(input)?;
            let p = local_profile(&file.fan)?;
            let f = file.fan.fan();
            let stars: Vec<Value> =
                p.stars.iter().map(|s| json!({ "cone": f.cone(s.cone).rays(), "rank": s.rank })).collect();
            let mut summary = vec![yes_no(p.locally_irreducible, "locally irreducible", "not locally irreducible")];
            for s in p.stars.iter().filter(|s| !s.irreducible) {
                summary.push(format!("  star at {:?} has top Minkowski rank {}", f.cone(s.cone).rays(), s.rank));
            }
            Ok(Output::new(
                "check local",
                json!({ "locally_irreducible": p.locally_irreducible, "reduced": p.reduced, "stars": stars }),
                summary,
            ))
        }
        CheckCommand::Poincare { input, star, coeff } => {
            let file = load_input(input)?;
            let r = poincare_verdict_with(&file.fan, *star, coefficients(*coeff))?;
            let mut summary = Vec::new();
            if !r.simplicial {
                summary.push("not simplicial: refine first".to_string());
            } else {
                let label = if *star { "star-Poincaré" } else { "Poincaré" };
                summary.push(yes_no(r.passed(), label, &format!("not {label}")));
                for d in &r.degrees {
                    summary.push(format!(
                        "  k={}: A^k rank {}, M rank {}, cap rank {}{}",
                        d.degree,
                        d.chow_rank,
                        d.minkowski_rank,
                        d.cap_rank,
                        if d.bijective { "" } else { ", fails" }
                    ));
                }
                for s in r.stars.iter().flatten().filter(|s| !s.poincare) {
                    let degree = s.first_failure.map_or("?".to_string(), |k| k.to_string());
                    summary.push(format!("  star at {:?} fails in degree {degree}", s.cone));
                }
            }
            let mut report = serde_json::to_value(&r).expect("reports serialize");
            report["passed"] = json!(r.passed());
            Ok(Output::new("check poincare", report, summary))
        }
    }
}

fn compute(what: &ComputeCommand) -> Result<Output> {
    match what {
        ComputeCommand::Minkowski { input, k } => {
            let file = load_input(input)?;
            let f = file.fan.fan();
            if *k > f.dim() {
                return Err(CliError::Usage(format!("k = {k} exceeds the dimension {}", f.dim())));
            }
            let m = minkowski_basis(f, *k);
            let basis: Vec<Value> = m.basis().iter().map(|w| weight(f, w)).collect();
            Ok(Output::new(
                "compute minkowski",
                json!({ "k": k, "rank": m.rank(), "basis": basis }),
                vec![format!("rank M{k} = {}", m.rank())],
            ))
        }
        ComputeCommand::Chow { input, coeff } => {
            let file = load_input(input)?;
            let f = file.fan.fan();
            let cp = match coefficients(*coeff) {
                Some(c) => chow_presentation_with(f, c)?,
                None => chow_presentation(f)?,
            };
            let ranks = chow_ranks(&cp);
            let summary = ranks
                .iter()
                .map(|r| {
                    let torsion = if r.torsion.is_empty() { String::new() } else { format!(", torsion {}", show(&r.torsion)) };
                    format!("A^{}: rank {}{torsion}", r.degree, r.rank)
                })
                .collect();
            Ok(Output::new(
                "compute chow",
                json!({ "coefficients": cp.coefficients, "generators": cp.n_vars(), "ranks": ranks }),
                summary,
            ))
        }
        ComputeCommand::Divisor { input, pl } => {
            let file = load_input(input)?;
            let phi = named_pl(&file, pl)?;
            let d = divisor(&file.fan, phi);
            let f = file.fan.fan();
            let effective = d.ord.values().values().all(|v| v.sign() != num_bigint::Sign::Minus);
            let mut summary = vec![if d.is_trivial() {
                "trivial divisor".to_string()
            } else {
                yes_no(effective, "effective divisor", "divisor with negative orders")
            }];
            for (&c, v) in d.ord.values() {
                summary.push(format!("  ord on {:?} = {v}", f.cone(c).rays()));
            }
            Ok(Output::new(
                "compute divisor",
                json!({ "ord": weight(f, &d.ord), "effective": effective, "trivial": d.is_trivial() }),
                summary,
            ))
        }
        ComputeCommand::Star { input, cone } => {
            let file = load_input(input)?;
            let mut rays = cone.clone();
            rays.sort_unstable();
            let sigma = file.fan.fan().index_of(&rays).ok_or(tropfan::Error::ConeNotInFan(rays.clone()))?;
            let (star, _) = star_weighted(&file.fan, sigma)?;
            let mut metadata = BTreeMap::new();
            metadata.insert("star_at".into(), format!("{rays:?}"));
            Ok(fan_output("compute star", &star, &[], metadata))
        }
        ComputeCommand::Product { fans } => {
            let (a, b) = (load(&fans[0])?, load(&fans[1])?);
            Ok(fan_output("compute product", &product_weighted(&a.fan, &b.fan), &[], BTreeMap::new()))
        }
        ComputeCommand::Refine { input, point } => {
            let file = load_input(input)?;
            let f = file.fan.fan();
            let refined = match point {
                Some(p) => stellar_subdivision(f, &p.iter().map(|&x| x.into()).collect::<Vec<_>>())?,
                None => unimodular_refinement(f),
            };
            let wf = refine_weights(&file.fan, &refined)?;
            Ok(fan_output("compute refine", &wf, &[], BTreeMap::new()))
        }
    }
}

fn examples(name: Option<&str>, verify_all: bool) -> Result<Output> {
    if verify_all {
        let results = criteria::run_all();
        let ok = results.iter().all(|r| r.passed && r.within_limit());
        let summary = results.iter().map(|r| r.line()).chain(results.iter().flat_map(|r| r.failures.clone())).collect();
        // timings vary between runs, so they stay out of the report
        let report: Vec<Value> = results
            .iter()
            .map(|r| json!({ "id": r.id, "title": r.title, "passed": r.passed, "checks": r.checks, "failures": r.failures }))
            .collect();
        let mut out = Output::new("examples", json!({ "criteria": report, "passed": ok }), summary);
        out.status = if ok { 0 } else { 3 };
        return Ok(out);
    }
    if let Some(name) = name {
        let e = corpus::by_name(name).ok_or_else(|| {
            CliError::Usage(format!("no example named {name:?}; known examples: {}", corpus::names().join(", ")))
        })?;
        let mut metadata = BTreeMap::new();
        metadata.insert("name".into(), e.name.to_string());
        metadata.insert("description".into(), e.description.to_string());
        return Ok(fan_output("examples", &e.fan, &e.pl_functions, metadata));
    }
    let entries = corpus::corpus();
    let summary = entries.iter().map(|e| format!("{:<22} {}", e.name, e.description)).collect();
    let report: Vec<Value> = entries
        .iter()
        .map(|e| json!({ "name": e.name, "description": e.description, "quasilinear": e.quasilinear }))
        .collect();
    Ok(Output::new("examples", json!({ "examples": report }), summary))
}

