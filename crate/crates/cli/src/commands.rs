use std::path::Path;

use orbit_designs::construct::{classify_orbit, construct_global_design, ClassificationResult, UnitarySource};
use orbit_designs::design::{
    check_design, check_design_in, polynomial_average_check, polynomial_average_check_in, DesignReport,
};
use orbit_designs::group::{enumerate_closure, orbit_points, FiniteMatrixGroup, OrthogonalAction};
use orbit_designs::io::read_group_file;
use orbit_designs::linalg::RealVector;
use orbit_designs::repdec::{decompose, Decomposition};
use orbit_designs::schur::{
    component_table, default_tolerance, sample_scalars, verify_schur_d, verify_schur_real, verify_trace_formula,
    OrthogonalityReport, TraceReport,
};
use orbit_designs::{Error, Result};
use serde::Serialize;
use serde_json::Value;

use crate::output::{emit, json, points_csv};
use crate::{Command, Common, Format, Verdict};

const ORACLE_TRIALS: usize = 100;
const TRACE_SAMPLES: usize = 5;

pub fn run(cmd: Command) -> Result<Verdict> {
    match cmd {
        Command::Analyze { common } => analyze(&common),
        Command::Verify {
            common,
            vector,
            normalize,
        } => verify(&common, &vector, normalize),
        Command::Construct { common } => construct(&common),
        Command::SchurCheck { common } => schur_check(&common),
        Command::Export {
            common,
            vector,
            normalize,
        } => export(&common, &vector, normalize),
    }
}

struct Loaded {
    group: FiniteMatrixGroup,
    tol: f64,
}

fn load(common: &Common) -> Result<Loaded> {
    let mut gens = read_group_file(&common.group)?;
    if let Some(t) = common.tol {
        if t.is_nan() || t <= 0.0 {
            return Err(Error::Invalid(format!("--tol must be positive, got {t}")));
        }
        gens.tol = t;
    }
    if common.max_order == 0 {
        return Err(Error::Invalid("--max-order must be at least 1".into()));
    }
    let mut group = enumerate_closure(&gens, common.max_order)?;
    if common.regular {
        group = group.regular_representation();
    }
    log::info!("group of order {} acting on R^{}", group.order(), group.dim());
    Ok(Loaded { group, tol: gens.tol })
}

fn parse_vector(arg: &str, normalize: bool, dim: usize) -> Result<RealVector> {
    let text = if arg.trim_start().starts_with('[') {
        arg.to_string()
    } else {
        std::fs::read_to_string(Path::new(arg))?
    };
    let value: Value = serde_json::from_str(&text)?;
    let entries = match &value {
        Value::Array(_) => value.clone(),
        Value::Object(map) => map
            .get("vector")
            .cloned()
            .ok_or_else(|| Error::Parse("expected an array or an object with a \"vector\" field".into()))?,
        _ => return Err(Error::Parse("expected a JSON array of numbers".into())),
    };
    let xs: Vec<f64> = serde_json::from_value(entries)?;
    if xs.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: xs.len(),
        });
    }
    let v = RealVector::from_vec(xs);
    if normalize {
        let n = v.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::Invalid(format!("cannot normalize a vector of norm {n}")));
        }
        return Ok(v / n);
    }
    Ok(v)
}

fn targets(common: &Common, dec: &Decomposition) -> Result<Option<Vec<usize>>> {
    match &common.components {
        None => Ok(None),
        Some(list) => {
            for &i in list {
                dec.component(i)?;
            }
            Ok(Some(list.clone()))
        }
    }
}

#[derive(Serialize)]
struct ComponentSummary {
    index: usize,
    #[serde(rename = "D")]
    d: String,
    n: usize,
    m: usize,
    dim: usize,
}

fn summaries(dec: &Decomposition) -> Vec<ComponentSummary> {
    dec.components()
        .iter()
        .enumerate()
        .map(|(index, c)| ComponentSummary {
            index,
            d: c.fs_tag().symbol().into(),
            n: c.n(),
            m: c.m(),
            dim: c.dim_real(),
        })
        .collect()
}

#[derive(Serialize)]
struct AnalyzeReport {
    dim: usize,
    group_order: usize,
    seed: u64,
    trivial_multiplicity: usize,
    components: Vec<ComponentSummary>,
}

fn analyze(common: &Common) -> Result<Verdict> {
    let l = load(common)?;
    let dec = decompose(&l.group, common.seed)?;
    let report = AnalyzeReport {
        dim: l.group.dim(),
        group_order: l.group.order(),
        seed: common.seed,
        trivial_multiplicity: dec.trivial_multiplicity(),
        components: summaries(&dec),
    };
    let text = match common.format {
        Format::Json => json(&report)?,
        Format::Csv => {
            let mut s = String::from("index,D,n,m,dim\n");
            for c in &report.components {
                s.push_str(&format!("{},{},{},{},{}\n", c.index, c.d, c.n, c.m, c.dim));
            }
            s
        }
    };
    emit(&text, common.output.as_deref())?;
    Ok(Verdict::Pass)
}

#[derive(Serialize)]
struct VerifyReport {
    dim: usize,
    group_order: usize,
    /// Component indices spanning the target space; `null` means the whole space.
    target_components: Option<Vec<usize>>,
    target_dim: usize,
    design: DesignReport,
    polynomial_discrepancy: f64,
    classification: ClassificationResult,
    classification_pass: bool,
    is_2_design: bool,
}

fn verify(common: &Common, arg: &str, normalize: bool) -> Result<Verdict> {
    let l = load(common)?;
    let v = parse_vector(arg, normalize, l.group.dim())?;
    let dec = decompose(&l.group, common.seed)?;
    let chosen = targets(common, &dec)?;
    let (design, poly, classification, classification_pass, target_dim) = match &chosen {
        Some(t) => {
            let basis = dec.subspace_basis(t)?;
            let design = check_design_in(&l.group, &basis, &v, l.tol)?;
            let poly = polynomial_average_check_in(&l.group, &basis, &v, ORACLE_TRIALS, common.seed)?;
            let cls = classify_orbit(&dec, t, &v, l.tol)?;
            let pass = cls.overall_pass;
            (design, poly, cls, pass, basis.ncols())
        }
        None => {
            let design = check_design(&l.group, &v, l.tol)?;
            let poly = polynomial_average_check(&l.group, &v, ORACLE_TRIALS, common.seed)?;
            let cls = classify_orbit(&dec, &dec.nontrivial_indices(), &v, l.tol)?;
            // a space with a fixed vector carries no 2-design orbit at all
            let pass = cls.overall_pass && dec.trivial_multiplicity() == 0;
            (design, poly, cls, pass, l.group.dim())
        }
    };
    if classification_pass != design.is_2_design {
        log::warn!("structural classification and moment test disagree");
    }
    let report = VerifyReport {
        dim: l.group.dim(),
        group_order: l.group.order(),
        target_components: chosen,
        target_dim,
        is_2_design: design.is_2_design,
        design,
        polynomial_discrepancy: poly,
        classification,
        classification_pass,
    };
    let text = match common.format {
        Format::Json => json(&report)?,
        Format::Csv => format!(
            "is_2_design,first_moment_norm,second_moment_deviation,polynomial_discrepancy,classification_pass\n{},{},{},{},{}\n",
            report.is_2_design,
            report.design.first_moment_norm,
            report.design.second_moment_deviation,
            report.polynomial_discrepancy,
            report.classification_pass
        ),
    };
    emit(&text, common.output.as_deref())?;
    Ok(if report.is_2_design {
        Verdict::Pass
    } else {
        Verdict::Fail
    })
}

#[derive(Serialize)]
struct Verification {
    is_2_design: bool,
    first_moment_norm: f64,
    second_moment_deviation: f64,
    stamp: String,
}

#[derive(Serialize)]
struct ConstructReport {
    dim: usize,
    group_order: usize,
    seed: u64,
    components: Vec<usize>,
    weights: Vec<f64>,
    vector: Vec<f64>,
    orbit_size: usize,
    orbit: Vec<Vec<f64>>,
    verification: Verification,
}

/// Per-component seed so that components get independent unitaries.
fn component_seed(seed: u64, index: usize) -> u64 {
    seed.wrapping_add((index as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

fn construct(common: &Common) -> Result<Verdict> {
    let l = load(common)?;
    let dec = decompose(&l.group, common.seed)?;
    let chosen = targets(common, &dec)?.unwrap_or_else(|| dec.nontrivial_indices());
    let selection: Vec<_> = chosen
        .iter()
        .map(|&i| (i, UnitarySource::Seed(component_seed(common.seed, i))))
        .collect();
    let gd = construct_global_design(&dec, &selection)?;
    let rep = check_design_in(&l.group, &gd.target_basis, &gd.vector, l.tol)?;
    let points = orbit_points(&l.group, &gd.vector, l.tol)?;
    let stamp = format!("2-design: {}", if rep.is_2_design { "pass" } else { "fail" });
    match common.format {
        Format::Json => {
            let report = ConstructReport {
                dim: l.group.dim(),
                group_order: l.group.order(),
                seed: common.seed,
                components: gd.components.clone(),
                weights: gd.weights.clone(),
                vector: gd.vector.iter().copied().collect(),
                orbit_size: points.len(),
                orbit: points.iter().map(|p| p.iter().copied().collect()).collect(),
                verification: Verification {
                    is_2_design: rep.is_2_design,
                    first_moment_norm: rep.first_moment_norm,
                    second_moment_deviation: rep.second_moment_deviation,
                    stamp,
                },
            };
            emit(&json(&report)?, common.output.as_deref())?;
        }
        Format::Csv => {
            emit(&points_csv(&points, l.group.dim()), common.output.as_deref())?;
            let v: Vec<f64> = gd.vector.iter().copied().collect();
            eprintln!("vector: {}", serde_json::to_string(&v)?);
            eprintln!("{stamp}");
        }
    }
    Ok(if rep.is_2_design { Verdict::Pass } else { Verdict::Fail })
}

#[derive(Serialize)]
struct SchurComponent {
    index: usize,
    #[serde(rename = "D")]
    d: String,
    n: usize,
    m: usize,
    schur_real: OrthogonalityReport,
    schur_d: OrthogonalityReport,
    trace: TraceReport,
    pass: bool,
}

#[derive(Serialize)]
struct SchurReport {
    group_order: usize,
    tol: f64,
    components: Vec<SchurComponent>,
    pass: bool,
}

fn schur_check(common: &Common) -> Result<Verdict> {
    let l = load(common)?;
    let dec = decompose(&l.group, common.seed)?;
    let tol = common.tol.unwrap_or_else(|| default_tolerance(l.group.order()));
    let mut components = Vec::new();
    for (index, c) in dec.components().iter().enumerate() {
        let table = component_table(c);
        let lambdas = sample_scalars(c.fs_tag(), TRACE_SAMPLES, component_seed(common.seed, index));
        let schur_real = verify_schur_real(&table, tol);
        let schur_d = verify_schur_d(&table, tol);
        let trace = verify_trace_formula(&l.group, c, &lambdas, tol)?;
        let pass = schur_real.pass && schur_d.pass && trace.pass;
        components.push(SchurComponent {
            index,
            d: c.fs_tag().symbol().into(),
            n: c.n(),
            m: c.m(),
            schur_real,
            schur_d,
            trace,
            pass,
        });
    }
    let pass = components.iter().all(|c| c.pass);
    let report = SchurReport {
        group_order: l.group.order(),
        tol,
        components,
        pass,
    };
    let text = match common.format {
        Format::Json => json(&report)?,
        Format::Csv => {
            let mut s = String::from("index,D,n,m,schur_real_residual,schur_d_residual,trace_residual,pass\n");
            for c in &report.components {
                s.push_str(&format!(
                    "{},{},{},{},{},{},{},{}\n",
                    c.index,
                    c.d,
                    c.n,
                    c.m,
                    c.schur_real.max_residual,
                    c.schur_d.max_residual,
                    c.trace.trace_residual,
                    c.pass
                ));
            }
            s
        }
    };
    emit(&text, common.output.as_deref())?;
    Ok(if pass { Verdict::Pass } else { Verdict::Fail })
}

#[derive(Serialize)]
struct ExportReport {
    dim: usize,
    orbit_size: usize,
    points: Vec<Vec<f64>>,
}

fn export(common: &Common, arg: &str, normalize: bool) -> Result<Verdict> {
    let l = load(common)?;
    let v = parse_vector(arg, normalize, l.group.dim())?;
    let points = orbit_points(&l.group, &v, l.tol)?;
    let text = match common.format {
        Format::Json => json(&ExportReport {
            dim: l.group.dim(),
            orbit_size: points.len(),
            points: points.iter().map(|p| p.iter().copied().collect()).collect(),
        })?,
        Format::Csv => points_csv(&points, l.group.dim()),
    };
    emit(&text, common.output.as_deref())?;
    Ok(Verdict::Pass)
}
