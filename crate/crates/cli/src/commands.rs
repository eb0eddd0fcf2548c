use std::path::Path;

use nalgebra::DMatrix;
use serde_json::{json, Value};
use twistor_core::fibers::{self, FiberContext, GroupTriple};
use twistor_core::periods::{self, Triangle, Vertex};
use twistor_core::repio::{self, matrix_to_json};
use twistor_core::reps::{self, RELATION_TOL};
use twistor_core::scalar::{parse_rational, parse_real};
use twistor_core::selftest::{self, SelftestConfig};
use twistor_core::sigforms::{self, AlgebraClass};
use twistor_core::{AlgebraParams, Error, Rational, Scalar, ScalarMode, StructureTable};

use crate::output::{emit, render};
use crate::{Cli, Command, Format, ParamArgs, RunConfig};

/// Largest `n` for which classes are counted by pairwise intertwiner tests.
const MAX_COUNTED_N: usize = 4;
const QUADRIC_POINTS: usize = 8;

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            code: 1,
            message: message.into(),
        }
    }

    pub fn validation(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        Self {
            code: if e.is_numerical() { 3 } else { 2 },
            message: e.to_string(),
        }
    }
}

type CliResult<T> = Result<T, CliError>;

pub fn run(cli: &Cli) -> CliResult<u8> {
    let cfg = &cli.config;
    if !(cfg.tol > 0.0 && cfg.tol.is_finite()) {
        return Err(CliError::usage(format!("--tol must be a positive number, got {}", cfg.tol)));
    }
    match &cli.command {
        Command::Classify { params, n } => classify(cfg, params, *n),
        Command::Rep { params, n, k, faithful } => rep(cfg, params, *n, *k, *faithful),
        Command::Triangle { path } => triangle(cfg, path),
        Command::Fiber { params, n, k, witness_out } => fiber(cfg, params, *n, *k, witness_out.as_deref()),
        Command::Selftest => selftest_cmd(cfg),
    }
}

fn parse_exact(p: &ParamArgs) -> CliResult<AlgebraParams<Rational>> {
    let one = |name: &str, s: &str| {
        parse_rational(s).map_err(|e| CliError::usage(format!("{name}: {e} (exact mode needs rational input)")))
    };
    Ok(AlgebraParams::new(one("alpha", &p.alpha)?, one("beta", &p.beta)?, one("gamma", &p.gamma)?))
}

fn parse_float(p: &ParamArgs) -> CliResult<AlgebraParams<f64>> {
    let one = |name: &str, s: &str| parse_real(s).map_err(|e| CliError::usage(format!("{name}: {e}")));
    Ok(AlgebraParams::new(one("alpha", &p.alpha)?, one("beta", &p.beta)?, one("gamma", &p.gamma)?))
}

/// Parameters for numerical commands; exact input is accepted and rounded.
fn float_params(cfg: &RunConfig, p: &ParamArgs) -> CliResult<AlgebraParams<f64>> {
    match cfg.scalar_mode(ScalarMode::Float) {
        ScalarMode::Exact => Ok(parse_exact(p)?.to_f64()),
        ScalarMode::Float => parse_float(p),
    }
}

fn classification_value<S: Scalar>(p: AlgebraParams<S>, tol: f64) -> Value {
    let table = StructureTable::new(p.clone());
    let mut v = serde_json::to_value(sigforms::classification_report(&table, tol)).expect("report serialises");
    let obj = v.as_object_mut().expect("report is an object");
    obj.insert("center_dim".into(), json!(table.center_basis(tol).len()));
    obj.insert("c_squared".into(), (-p.det_q()).to_json());
    v
}

fn classify(cfg: &RunConfig, params: &ParamArgs, n: Option<usize>) -> CliResult<u8> {
    let mode = cfg.scalar_mode(ScalarMode::Float);
    let (mut report, pf) = match mode {
        ScalarMode::Exact => {
            let p = parse_exact(params)?;
            let pf = p.to_f64();
            (classification_value(p, cfg.tol), pf)
        }
        ScalarMode::Float => {
            let p = parse_float(params)?;
            (classification_value(p.clone(), cfg.tol), p)
        }
    };
    let obj = report.as_object_mut().expect("object");
    obj.insert("mode".into(), json!(mode));
    if let Some(n) = n {
        if n == 0 {
            return Err(CliError::usage("--n must be positive"));
        }
        let class = sigforms::classify(&pf, cfg.tol).class;
        let counts = if !class.is_quaternionic() {
            json!({"n": n, "classes": 0, "method": "none: no quaternion subalgebra"})
        } else if n <= MAX_COUNTED_N {
            let table = StructureTable::new(pf);
            let c = reps::count_classes(&table, n, cfg.seed, cfg.tol)?;
            json!({
                "n": n,
                "classes": c.classes,
                "non_faithful": c.non_faithful,
                "multiplicities": c.multiplicities,
                "method": "intertwiner",
            })
        } else {
            json!({
                "n": n,
                "classes": class.representation_classes(n),
                "multiplicities": reps::admissible_multiplicities(class, n),
                "method": "formula",
            })
        };
        obj.insert("representations".into(), counts);
    }
    emit(cfg, &render(&report, cfg.format))?;
    Ok(0)
}

fn rep(cfg: &RunConfig, params: &ParamArgs, n: usize, k: Option<usize>, faithful: bool) -> CliResult<u8> {
    if n == 0 {
        return Err(CliError::usage("--n must be positive"));
    }
    let p = float_params(cfg, params)?;
    let table = StructureTable::new(p);
    let rep = if faithful {
        reps::build_faithful(&table, n, cfg.tol)?
    } else {
        let class = sigforms::classify(table.params(), cfg.tol).class;
        if let Some(k) = k {
            let allowed = reps::admissible_multiplicities(class, n);
            if class.is_quaternionic() && !allowed.contains(&k) {
                return Err(CliError::validation(format!(
                    "k = {k} is not admissible for {class} parameters at n = {n}; allowed: {allowed:?}"
                )));
            }
        }
        reps::build(&table, n, k, cfg.tol)?
    };
    let text = match cfg.format {
        Format::Json => render(&repio::rep_to_json(&rep), Format::Json),
        Format::Text => repio::rep_to_text(&rep),
    };
    emit(cfg, &text)?;
    Ok(0)
}

fn params_value(p: &AlgebraParams<f64>) -> Value {
    json!({"alpha": p.alpha, "beta": p.beta, "gamma": p.gamma})
}

fn error_value(e: &Error) -> Value {
    json!({"defined": false, "reason": e.to_string()})
}

fn triangle(cfg: &RunConfig, path: &Path) -> CliResult<u8> {
    let tol = cfg.tol;
    let rep = repio::read_rep(path)?;
    let check = rep.verify_relations(tol.max(RELATION_TOL));
    let max_residual = check.max_residual();
    check.into_result()?;
    let tri = Triangle::from_rep(&rep, tol.max(RELATION_TOL))?;
    let t = tri.t_invariant();
    let classification = sigforms::classify(&t, tol);
    let representation = match reps::classify_rep(&rep, tol) {
        Ok(rc) => json!({"k": rc.k, "faithful": rc.faithful, "image_dim": rc.image_dim}),
        Err(e) => error_value(&e),
    };
    let degeneracy = periods::degeneracy_test(&tri, tol)?;
    let quadric = if classification.class.is_quaternionic() {
        let s = periods::quadric_classify_and_sample(&tri, QUADRIC_POINTS, cfg.seed, tol);
        json!({"kind": s.kind, "points": s.points, "max_square_residual": s.max_square_residual})
    } else {
        json!({"kind": periods::QuadricKind::from_signature(classification.sig_q)})
    };
    let angles: Vec<Value> = Vertex::ALL
        .iter()
        .map(|&v| match periods::vertex_angle(&tri, v, tol) {
            Ok(a) => serde_json::to_value(a).expect("serialises"),
            Err(e) => {
                let mut val = error_value(&e);
                val["vertex"] = json!(v);
                val
            }
        })
        .collect();
    let report = json!({
        "n": tri.n(),
        "t_invariant": params_value(&t),
        "max_relation_residual": max_residual,
        "class": classification.class,
        "sigQ": classification.sig_q,
        "near_degenerate": classification.near_degenerate,
        "representation": representation,
        "degenerate": degeneracy.degenerate,
        "image_dim": degeneracy.image_dim,
        "quadric": quadric,
        "vertex_angles": angles,
    });
    emit(cfg, &render(&report, cfg.format))?;
    Ok(0)
}

fn triple_value(triple: &GroupTriple) -> Value {
    let [g1, g2, g3] = triple.factors();
    let [i1, i2, i3] = triple.context();
    json!({
        "n": i1.n(),
        "g1": matrix_to_json(g1),
        "g2": matrix_to_json(g2),
        "g3": matrix_to_json(g3),
        "I1": matrix_to_json(i1.matrix()),
        "I2": matrix_to_json(i2.matrix()),
        "I3": matrix_to_json(i3.matrix()),
    })
}

fn fiber(cfg: &RunConfig, params: &ParamArgs, n: usize, k: usize, witness_out: Option<&Path>) -> CliResult<u8> {
    let tol = cfg.tol;
    if n == 0 {
        return Err(CliError::usage("--n must be positive"));
    }
    if k > n {
        return Err(CliError::validation(format!("k = {k} exceeds n = {n}")));
    }
    let p = float_params(cfg, params)?;
    let class = sigforms::classify(&p, tol).class;
    if class != AlgebraClass::Spherical {
        return Err(CliError::validation(format!(
            "fiber components are described for spherical parameters; these are {class}"
        )));
    }
    let ctx = FiberContext::new(&p, n, tol)?;
    let (kind, triple) = if 0 < k && k < n {
        ("nondegenerate witness", fibers::nondegenerate_witness(&p, n, k, cfg.seed, None, tol)?.triple)
    } else {
        let so3 = ctx.so3_triple(tol)?;
        if fibers::certify_component(&so3, tol)?.k == k {
            ("SO(3) type", so3)
        } else {
            let d = 4 * n;
            let id = nalgebra_identity(d);
            ("trivial", GroupTriple::new([id.clone(), id.clone(), id], ctx.vertices().clone(), tol)?)
        }
    };
    let member_tol = tol.max(fibers::MEMBERSHIP_TOL);
    let tri = fibers::tau(&triple, member_tol)?;
    let t = tri.t_invariant();
    let dev = [t.alpha - p.alpha, t.beta - p.beta, t.gamma - p.gamma]
        .iter()
        .fold(0.0f64, |m, x| m.max(x.abs()));
    let certificate = fibers::certify_component(&triple, tol)?;
    let component = fibers::component_report(&p, n, k, tol)?;
    let product = triple.product();
    let report = json!({
        "params": params_value(&p),
        "n": n,
        "k": k,
        "kind": kind,
        "product_in_GH": triple.product_in_gh(member_tol)?,
        "factors_in_GH": triple.factors_in_gh(member_tol)?,
        "product_minus_id": reps::op_norm(&(&product - nalgebra_identity(4 * n))),
        "tau": {
            "t_invariant": params_value(&t),
            "t_invariant_deviation": dev,
            "degenerate": periods::degeneracy_test(&tri, tol)?.degenerate,
        },
        "certificate": {"k": certificate.k, "faithful": certificate.faithful},
        "component": component,
    });
    if let Some(path) = witness_out {
        std::fs::write(path, render(&triple_value(&triple), Format::Json))
            .map_err(|e| CliError::validation(format!("cannot write {}: {e}", path.display())))?;
    }
    if certificate.k != k {
        return Err(CliError {
            code: 3,
            message: format!("constructed triple lies in component k = {}, expected {k}", certificate.k),
        });
    }
    emit(cfg, &render(&report, cfg.format))?;
    Ok(0)
}

fn nalgebra_identity(d: usize) -> DMatrix<f64> {
    DMatrix::identity(d, d)
}

fn selftest_cmd(cfg: &RunConfig) -> CliResult<u8> {
    let config = SelftestConfig {
        tol: cfg.tol,
        seed: cfg.seed,
        mode: cfg.scalar_mode(ScalarMode::Exact),
    };
    let report = selftest::run_all(&config);
    let text = match cfg.format {
        Format::Json => render(&serde_json::to_value(&report).expect("serialises"), Format::Json),
        Format::Text => {
            let mut s = String::new();
            for c in &report.checks {
                let status = match (c.passed, c.tolerance_related) {
                    (true, _) => "PASS",
                    (false, true) => "FAIL (tolerance)",
                    (false, false) => "FAIL",
                };
                s.push_str(&format!("{:>2} {:<24} {status:<16} {:>9.1} ms  {}\n", c.id, c.name, c.millis, c.detail));
            }
            s.push_str(&format!("total {:.1} ms\n", report.millis));
            s
        }
    };
    emit(cfg, &text)?;
    Ok(if report.passed {
        0
    } else if report.logic_failures() > 0 {
        2
    } else {
        3
    })
}
