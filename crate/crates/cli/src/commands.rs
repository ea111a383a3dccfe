use rand::rngs::StdRng;
use rand::SeedableRng;
use semifb::adapters::{
    ad_forward_grad_counted, ad_reverse_grad_counted, expectations_fb, expectations_npass,
    second_order_expectation, ExpectationReport,
};
use semifb::algebra::laws::semiring_laws;
use semifb::algebra::{
    check_structure_constants, dispatch, format_f64, OpCount, OpCounters, RandomElem, SemiringKind,
    SemiringVisitor, Tolerance, ValueCodec,
};
use semifb::engine::{forward, forward_backward, free_forward, CheckpointPolicy};
use semifb::graph::ComputationGraph;
use semifb::par::Execution;
use semifb::semialgebra::{bc_semialgebra, semialgebra_from_semiring, tensor_product};
use serde_json::{json, Map, Value};

use crate::input::{self, Loaded};
use crate::output::{real, value_json};
use crate::{read_text, Cli, CliError, Command, Mode, Route};

pub struct Outcome {
    pub out: Map<String, Value>,
    pub ok: bool,
}

fn kind(cli: &Cli) -> Result<SemiringKind, CliError> {
    Ok(cli.semiring.parse()?)
}

fn policy(cli: &Cli) -> Result<CheckpointPolicy, CliError> {
    cli.checkpoint
        .parse()
        .map_err(|e| CliError::Parse(format!("--checkpoint: {e}")))
}

fn execution(cli: &Cli) -> Execution {
    if cli.sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    }
}

fn ops_json(c: OpCount) -> Value {
    json!({ "adds": c.adds, "muls": c.muls })
}

fn parse_all<S: ValueCodec>(s: &S, xi: &[String]) -> Result<Vec<S::Elem>, CliError> {
    xi.iter()
        .enumerate()
        .map(|(i, t)| {
            s.parse_value(t)
                .map_err(|e| CliError::Parse(format!("xi[{i}]: {e}")))
        })
        .collect()
}

pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    if cli.command == Command::Validate {
        return validate(cli);
    }
    let loaded = input::parse(&read_text(cli.input.as_ref())?)?;
    if let Some(path) = &cli.emit_graph {
        let text =
            serde_json::to_string_pretty(&loaded.graph_doc()).expect("graph documents serialize");
        std::fs::write(path, text + "\n")
            .map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
    }
    let mut out = Map::new();
    out.insert("input".into(), json!(loaded.kind));
    let counters = OpCounters::new();
    match cli.command {
        Command::Forward => {
            let k = kind(cli)?;
            out.insert("semiring".into(), json!(k.to_string()));
            let run = ForwardRun {
                g: &loaded.graph,
                xi: loaded.xi()?,
                policy: policy(cli)?,
            };
            let (sum, sinks) = dispatch(&k, &counters, run)??;
            out.insert("sink_sum".into(), value_json(&sum));
            out.insert("sinks".into(), sinks_json(sinks));
        }
        Command::FreeForward => {
            let r = free_forward(&loaded.graph)?;
            out.insert("polynomial".into(), json!(r.sink_sum().to_string()));
            let sinks = loaded
                .graph
                .sinks()
                .iter()
                .filter_map(|&v| r.node(v).map(|p| (v.0, p.to_string())))
                .collect();
            out.insert("sinks".into(), sinks_json(sinks));
            out.insert("legend".into(), json!(loaded.legend));
        }
        Command::Fb => {
            let k = kind(cli)?;
            out.insert("semiring".into(), json!(k.to_string()));
            let psi = match &cli.features {
                None => vec![1.0; loaded.graph.sources().len()],
                Some(p) => {
                    let f =
                        input::parse_features(&read_text(Some(p))?, loaded.graph.sources().len())?;
                    f.into_iter()
                        .next()
                        .map(|(_, v)| v)
                        .ok_or_else(|| CliError::Parse("features: empty".into()))?
                }
            };
            let run = FbRun {
                g: &loaded.graph,
                xi: loaded.xi()?,
                psi: &psi,
                policy: policy(cli)?,
            };
            let fb = dispatch(&k, &counters, run)??;
            for (key, v) in fb {
                out.insert(key.into(), v);
            }
        }
        Command::Expect => {
            let (names, feats) = features(cli, &loaded)?;
            let xi = loaded.xi_real()?;
            let r = match cli.route {
                Route::Fb => expectations_fb(&loaded.graph, &xi, &feats, policy(cli)?)?,
                Route::Npass => {
                    expectations_npass(&loaded.graph, &xi, &feats, policy(cli)?, execution(cli))?
                }
            };
            expectation_output(&mut out, &names, &r);
            if cli.telemetry {
                out.insert("telemetry".into(), ops_json(r.ops));
                return Ok(Outcome { out, ok: true });
            }
        }
        Command::SecondOrder => {
            let (names, feats) = features(cli, &loaded)?;
            let [phi, psi] = feats.as_slice() else {
                return Err(CliError::Parse(format!(
                    "features: second-order needs exactly two features, found {}",
                    feats.len()
                )));
            };
            let xi = loaded.xi_real()?;
            let v = second_order_expectation(&loaded.graph, &xi, phi, psi, policy(cli)?)?;
            out.insert("features".into(), json!(names));
            out.insert("value".into(), real(v));
        }
        Command::Grad => {
            let Some(tape) = &loaded.tape else {
                return Err(CliError::Parse(format!(
                    "grad needs a `tape` input, found `{}`",
                    loaded.kind
                )));
            };
            let tape = match &cli.point {
                None => tape.clone(),
                Some(p) if p.len() == tape.num_inputs() => {
                    let t = tape.at(p.clone());
                    t.validate()?;
                    t
                }
                Some(p) => {
                    return Err(CliError::Parse(format!(
                        "--point: expected {} coordinates, found {}",
                        tape.num_inputs(),
                        p.len()
                    )))
                }
            };
            let (value, grad) = match cli.mode {
                Mode::Reverse => ad_reverse_grad_counted(&tape, &counters)?,
                Mode::Forward => {
                    let mut value = f64::NAN;
                    let mut grad = Vec::with_capacity(tape.num_inputs());
                    for k in 0..tape.num_inputs() {
                        let (v, d) = ad_forward_grad_counted(&tape, k, &counters)?;
                        value = v;
                        grad.push(d);
                    }
                    if grad.is_empty() {
                        value = *forward(
                            &tape.graph,
                            &semifb::algebra::Real,
                            &tape.values(),
                            policy(cli)?,
                        )?
                        .sink_sum();
                    }
                    (value, grad)
                }
            };
            out.insert(
                "point".into(),
                Value::Array(tape.point.iter().map(|&x| real(x)).collect()),
            );
            out.insert("value".into(), real(value));
            out.insert(
                "gradient".into(),
                Value::Array(grad.into_iter().map(real).collect()),
            );
        }
        Command::Validate => unreachable!(),
    }
    if cli.telemetry {
        out.insert("telemetry".into(), ops_json(counters.snapshot()));
    }
    Ok(Outcome { out, ok: true })
}

fn sinks_json(sinks: Vec<(u32, String)>) -> Value {
    Value::Array(
        sinks
            .into_iter()
            .map(|(id, v)| json!({ "node": id, "value": value_json(&v) }))
            .collect(),
    )
}

fn features(cli: &Cli, loaded: &Loaded) -> Result<(Vec<String>, Vec<Vec<f64>>), CliError> {
    let Some(path) = &cli.features else {
        return Err(CliError::Parse("--features FILE is required".into()));
    };
    if cli.semiring != "real" {
        return Err(CliError::Parse(format!(
            "--semiring: expectations run over real weights, not `{}`",
            cli.semiring
        )));
    }
    let f = input::parse_features(&read_text(Some(path))?, loaded.graph.sources().len())?;
    Ok(f.into_iter().unzip())
}

fn expectation_output(out: &mut Map<String, Value>, names: &[String], r: &ExpectationReport) {
    out.insert("z".into(), real(r.z));
    let mut feats = Map::new();
    for (name, &num) in names.iter().zip(&r.numerators) {
        feats.insert(
            name.clone(),
            json!({ "numerator": real(num), "expectation": real(num / r.z) }),
        );
    }
    out.insert("features".into(), Value::Object(feats));
}

struct ForwardRun<'a> {
    g: &'a ComputationGraph,
    xi: &'a [String],
    policy: CheckpointPolicy,
}

impl SemiringVisitor for ForwardRun<'_> {
    type Output = Result<(String, Vec<(u32, String)>), CliError>;

    fn visit<S>(self, s: S) -> Self::Output
    where
        S: RandomElem + ValueCodec + Clone + 'static,
    {
        let xi = parse_all(&s, self.xi)?;
        let r = forward(self.g, &s, &xi, self.policy)?;
        let sinks = self
            .g
            .sinks()
            .iter()
            .filter_map(|&v| r.node(v).map(|x| (v.0, s.format_value(x))))
            .collect();
        Ok((s.format_value(r.sink_sum()), sinks))
    }
}

/// Source values that parse as `A ⊗ BC¹` pairs are used as given; a scalar
/// `x` becomes `(x; x·ψ)`.
struct FbRun<'a> {
    g: &'a ComputationGraph,
    xi: &'a [String],
    psi: &'a [f64],
    policy: CheckpointPolicy,
}

impl SemiringVisitor for FbRun<'_> {
    type Output = Result<Vec<(&'static str, Value)>, CliError>;

    fn visit<S>(self, s: S) -> Self::Output
    where
        S: RandomElem + ValueCodec + Clone + 'static,
    {
        let a = semialgebra_from_semiring(s.clone())?;
        let full = tensor_product(&a, &bc_semialgebra(s.clone(), 1)?)?;
        let xi = self
            .xi
            .iter()
            .zip(self.psi)
            .enumerate()
            .map(|(i, (t, &psi))| {
                if let Ok(v) = full.parse_value(t) {
                    return Ok(v);
                }
                let x = s
                    .parse_value(t)
                    .map_err(|e| CliError::Parse(format!("xi[{i}]: {e}")))?;
                let psi = s.parse_value(&format_f64(psi))?;
                let p1 = s.mul(&x, &psi);
                Ok(full.from_dense(vec![x, p1]))
            })
            .collect::<Result<Vec<_>, CliError>>()?;
        let r = forward_backward(self.g, &a, &xi, self.policy)?;
        let scalar = |t| s.format_value(&a.coefficient(t, 0));
        let beta = self
            .g
            .sources()
            .iter()
            .map(|v| value_json(&scalar(&r.beta[v.index()])))
            .collect();
        Ok(vec![
            ("sink_sum", value_json(&scalar(r.alpha0.sink_sum()))),
            ("combined", value_json(&full.format_value(&r.combined))),
            ("beta", Value::Array(beta)),
        ])
    }
}

struct LawRun {
    cases: usize,
    tol: Tolerance,
    seed: u64,
}

impl SemiringVisitor for LawRun {
    type Output = semifb::algebra::laws::LawReport;

    fn visit<S>(self, s: S) -> Self::Output
    where
        S: RandomElem + ValueCodec + Clone + 'static,
    {
        let mut rng = StdRng::seed_from_u64(self.seed);
        semiring_laws(&s, self.cases, self.tol, &mut rng)
    }
}

fn validate(cli: &Cli) -> Result<Outcome, CliError> {
    let k = kind(cli)?;
    let mut out = Map::new();
    out.insert("semiring".into(), json!(k.to_string()));
    if let Some(path) = &cli.input {
        let loaded = input::parse(&read_text(Some(path))?)?;
        out.insert(
            "input".into(),
            json!({
                "kind": loaded.kind,
                "nodes": loaded.graph.num_nodes(),
                "arcs": loaded.graph.num_arcs(),
                "sources": loaded.graph.sources().len(),
                "sinks": loaded.graph.sinks().len(),
            }),
        );
    }
    let tol = cli.tolerance.map(Tolerance::uniform).unwrap_or_default();
    let counters = OpCounters::new();
    let report = dispatch(
        &k,
        &counters,
        LawRun {
            cases: cli.cases,
            tol,
            seed: cli.seed,
        },
    )?;
    let mut laws = Map::new();
    for o in &report.outcomes {
        let mut entry = json!({ "passed": o.passed(), "cases": o.cases, "failures": o.failures });
        if let Some(c) = &o.counterexample {
            entry["counterexample"] = json!(c);
        }
        laws.insert(o.law.to_string(), entry);
    }
    out.insert("laws".into(), Value::Object(laws));
    let structure = match check_structure_constants(&k) {
        Ok(true) => json!("pass"),
        Ok(false) => json!("not applicable"),
        Err(e) => json!(format!("FAIL: {e}")),
    };
    let structure_ok = !matches!(&structure, Value::String(s) if s.starts_with("FAIL"));
    out.insert("structure_constants".into(), structure);
    let ok = report.passed() && structure_ok;
    out.insert("passed".into(), json!(ok));
    if cli.telemetry {
        out.insert("telemetry".into(), ops_json(counters.snapshot()));
    }
    Ok(Outcome { out, ok })
}
