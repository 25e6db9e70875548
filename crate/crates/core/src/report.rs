//! Running a parsed problem end to end and rendering what comes out.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::logic::{enumerate_models, Formula, Interpretation};
use crate::possibilistic::Profile;
use crate::semantic::{merge_semantic, models_to_formula};
use crate::syntactic::{merge_syntactic, MergeTrace};
use crate::syntax::Problem;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Semantic,
    Syntactic,
    /// Both computations, failing when their model sets differ.
    Both,
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "semantic" => Ok(Method::Semantic),
            "syntactic" => Ok(Method::Syntactic),
            "both" => Ok(Method::Both),
            _ => Err(format!("unknown method `{s}`")),
        }
    }
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Semantic => "semantic",
            Method::Syntactic => "syntactic",
            Method::Both => "both",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    /// One bitstring per line, ascending.
    Models,
    Formula,
    Json,
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "models" => Ok(OutputFormat::Models),
            "formula" => Ok(OutputFormat::Formula),
            "json" => Ok(OutputFormat::Json),
            _ => Err(format!("unknown output format `{s}`")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MergeResult {
    pub method: Method,
    pub models: BTreeSet<Interpretation>,
    pub formula: Formula,
    /// Present whenever the syntactic computation ran.
    pub trace: Option<MergeTrace>,
}

impl MergeResult {
    pub fn is_consistent(&self) -> bool {
        !self.models.is_empty()
    }
}

/// Merges the problem's profile under its constraint with `method`.
pub fn merge_problem(problem: &Problem, method: Method) -> Result<MergeResult> {
    let Problem {
        vocabulary: v,
        profile: e,
        constraint: mu,
    } = problem;
    match method {
        Method::Semantic => {
            let models = merge_semantic(e, mu, v)?;
            let formula = models_to_formula(&models, v);
            Ok(MergeResult {
                method,
                models,
                formula,
                trace: None,
            })
        }
        Method::Syntactic | Method::Both => {
            let (formula, trace) = merge_syntactic(e, mu, v)?;
            let models = enumerate_models(&formula, v)?;
            if method == Method::Both {
                let semantic = merge_semantic(e, mu, v)?;
                if semantic != models {
                    return Err(Error::MethodsDisagree {
                        semantic: bitstrings(&semantic).join(" "),
                        syntactic: bitstrings(&models).join(" "),
                    });
                }
            }
            Ok(MergeResult {
                method,
                models,
                formula,
                trace: Some(trace),
            })
        }
    }
}

fn bitstrings(models: &BTreeSet<Interpretation>) -> Vec<String> {
    models.iter().map(Interpretation::bitstring).collect()
}

#[derive(Serialize)]
struct JsonResult<'a> {
    method: &'static str,
    vocabulary: Vec<&'a str>,
    models: Vec<String>,
    formula: String,
    trace: Option<JsonTrace>,
}

#[derive(Serialize)]
struct JsonTrace {
    iterations: Vec<JsonIteration>,
}

#[derive(Serialize)]
struct JsonIteration {
    inc: String,
    pairs: Vec<JsonPair>,
    maxc: Option<usize>,
}

#[derive(Serialize)]
struct JsonPair {
    phi: String,
    remaining: Vec<String>,
    inc_s: String,
    #[serde(rename = "I")]
    candidates: Vec<usize>,
    mcs: Vec<Vec<usize>>,
    cardm: Vec<Vec<usize>>,
    maxcs: Option<usize>,
}

fn one_based(xs: &[usize]) -> Vec<usize> {
    xs.iter().map(|i| i + 1).collect()
}

fn json_trace(trace: &MergeTrace, profile: &Profile) -> JsonTrace {
    JsonTrace {
        iterations: trace
            .iterations
            .iter()
            .map(|it| JsonIteration {
                inc: it.inc.to_string(),
                maxc: it.maxc,
                pairs: it
                    .pairs
                    .iter()
                    .map(|p| JsonPair {
                        phi: p.constraint.to_string(),
                        remaining: p.remaining.iter().map(|&j| profile.label(j)).collect(),
                        inc_s: p.inc.to_string(),
                        candidates: one_based(&p.candidates),
                        mcs: p.mcs.iter().map(|s| one_based(s)).collect(),
                        cardm: p.cardm.iter().map(|s| one_based(s)).collect(),
                        maxcs: p.maxcs,
                    })
                    .collect(),
            })
            .collect(),
    }
}

/// Human-readable trace. Bases are referred to by label.
pub fn render_trace(trace: &MergeTrace, profile: &Profile) -> String {
    let names = |xs: &[usize]| -> String {
        let items: Vec<String> = xs.iter().map(|&j| profile.label(j)).collect();
        format!("{{{}}}", items.join(", "))
    };
    let family = |f: &[Vec<usize>]| -> String {
        let items: Vec<String> = f.iter().map(|s| names(s)).collect();
        format!("{{{}}}", items.join(", "))
    };
    let size = |m: Option<usize>| m.map_or_else(|| "-inf".to_string(), |n| n.to_string());

    let mut out = String::new();
    for (k, it) in trace.iterations.iter().enumerate() {
        let _ = writeln!(
            out,
            "iteration {}: inc {} maxc {}",
            k + 1,
            it.inc,
            size(it.maxc)
        );
        for p in &it.pairs {
            let _ = writeln!(out, "  phi: {}", p.constraint);
            let _ = writeln!(out, "    remaining {} inc {}", names(&p.remaining), p.inc);
            let _ = writeln!(out, "    I {} mcs {}", names(&p.candidates), family(&p.mcs));
            let _ = writeln!(
                out,
                "    cardm {} maxcs {}",
                family(&p.cardm),
                size(p.maxcs)
            );
        }
    }
    let _ = writeln!(out, "result: {}", trace.result);
    out
}

/// Renders `result` for `problem`. With `trace` set, the text formats are
/// preceded by the human-readable trace; JSON always carries it when present.
pub fn render_result(
    problem: &Problem,
    result: &MergeResult,
    format: OutputFormat,
    trace: bool,
) -> String {
    let mut out = String::new();
    if trace && format != OutputFormat::Json {
        if let Some(t) = &result.trace {
            out.push_str(&render_trace(t, &problem.profile));
        }
    }
    match format {
        OutputFormat::Models => {
            for m in &result.models {
                out.push_str(&m.bitstring());
                out.push('\n');
            }
        }
        OutputFormat::Formula => {
            let _ = writeln!(out, "{}", result.formula);
        }
        OutputFormat::Json => {
            let doc = JsonResult {
                method: result.method.name(),
                vocabulary: problem
                    .vocabulary
                    .atoms()
                    .iter()
                    .map(|a| a.name())
                    .collect(),
                models: bitstrings(&result.models),
                formula: result.formula.to_string(),
                trace: result
                    .trace
                    .as_ref()
                    .map(|t| json_trace(t, &problem.profile)),
            };
            out.push_str(&serde_json::to_string_pretty(&doc).expect("plain data serializes"));
            out.push('\n');
        }
    }
    out
}
