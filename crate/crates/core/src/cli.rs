//! Command-line front end: case parsing, the suite registry and JSON reports.

use crate::bcvw::{check_quotient_presentation, check_relations, printed_discrepancies, standard_assignment, BcvwError, Convention, Presentation, RelationReport};
use crate::exactlin::{ExactMatrix, GaussRat, LinAlgError};
use crate::hermforms::{nonunitary_test, FormError};
use crate::liealg::{build_algebra, GroupSpec, LieError, Sign1};
use crate::psmodel::{compare_orderings, hecke_isomorphism_check, AAction, HeckeMatch, ModelError, ModelSpace, Ordering, PsSpec, Side};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

pub const SCHEMA_VERSION: u64 = 1;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Lie(#[from] LieError),
    #[error(transparent)]
    Linear(#[from] LinAlgError),
    #[error(transparent)]
    Relations(#[from] BcvwError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Form(#[from] FormError),
}

impl CliError {
    /// Config problems exit with 2, everything else that escapes a suite with 1.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Lie(LieError::SpecInvalid(_)) => 2,
            _ => 1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SideSelection {
    Mu,
    Mubar,
    Both,
}

impl SideSelection {
    pub fn sides(self) -> Vec<Side> {
        match self {
            SideSelection::Mu => vec![Side::Mu],
            SideSelection::Mubar => vec![Side::Mubar],
            SideSelection::Both => vec![Side::Mu, Side::Mubar],
        }
    }
}

impl FromStr for SideSelection {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "mu" => Ok(SideSelection::Mu),
            "mubar" => Ok(SideSelection::Mubar),
            "both" => Ok(SideSelection::Both),
            x => Err(CliError::Config(format!("side must be mu, mubar or both, got {x:?}"))),
        }
    }
}

impl fmt::Display for SideSelection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SideSelection::Mu => "mu",
            SideSelection::Mubar => "mubar",
            SideSelection::Both => "both",
        })
    }
}

/// One case in text form, exactly as given on the command line or in a config block.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CaseText {
    pub group: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    /// "1", "triv:1" or "det:1".
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<String>,
    /// Comma separated, e.g. "3/2,-1".
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub side: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub suite: Option<String>,
    /// Semicolon separated nu vectors for the unitary suite; "" is the empty grid.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<String>,
    /// "rho" (default) or "nu".
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a_action: Option<AAction>,
}

impl CaseText {
    /// Flag form, parseable back by the binary.
    pub fn to_flags(&self) -> Vec<String> {
        let mut v = vec!["--group".to_string(), self.group.clone()];
        let mut push = |flag: &str, val: Option<String>| {
            if let Some(x) = val {
                v.push(flag.to_string());
                v.push(x);
            }
        };
        push("--k", self.k.map(|k| k.to_string()));
        push("--delta", self.delta.clone());
        push("--nu", self.nu.clone());
        push("--side", self.side.clone());
        push("--suite", self.suite.clone());
        push("--grid", self.grid.clone());
        push("--a-action", self.a_action.map(|a| match a {
            AAction::Nu => "nu".to_string(),
            AAction::Rho => "rho".to_string(),
        }));
        v
    }
}

/// Config file: one `[[case]]` block per case.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(default)]
    pub case: Vec<CaseText>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }
    pub fn to_text(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}

/// A validated case.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub text: CaseText,
    pub group: GroupSpec,
    pub k: usize,
    pub delta_compact: Sign1,
    pub nu: Vec<GaussRat>,
    pub sides: SideSelection,
    pub grid: Vec<Vec<GaussRat>>,
    pub a_action: AAction,
    pub rank: usize,
}

fn parse_nu(s: &str) -> Result<Vec<GaussRat>, CliError> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(|x| x.trim().parse::<GaussRat>().map_err(|e| CliError::Config(format!("bad nu entry {x:?}: {e}")))).collect()
}

/// Generic default: distinct entries, no integrality, so nothing reducible sneaks in.
fn default_nu(rank: usize) -> Vec<GaussRat> {
    (1..=rank as i64).map(|j| GaussRat::complex(crate::exactlin::rat(2 * j + 1, 3), crate::exactlin::rat(j, 5))).collect()
}

impl RunConfig {
    pub fn from_text(text: &CaseText) -> Result<Self, CliError> {
        let group: GroupSpec = text.group.parse().map_err(|e: LieError| CliError::Config(e.to_string()))?;
        let rank = group.real_form().map_err(|e| CliError::Config(e.to_string()))?.real_rank();
        let (delta_compact, delta_k) = match text.delta.as_deref() {
            None => (Sign1::Triv, None),
            Some(d) => {
                let (tag, num) = match d.split_once(':') {
                    Some((t, n)) => (Some(t.trim()), n.trim()),
                    None => (None, d.trim()),
                };
                let compact = match tag {
                    None | Some("triv") => Sign1::Triv,
                    Some("det") if group.family == "opq" => Sign1::Det,
                    Some(t) => return Err(CliError::Config(format!("bad delta tag {t:?} for {}", text.group))),
                };
                let k = num.parse::<usize>().map_err(|_| CliError::Config(format!("bad delta index {num:?}")))?;
                (compact, Some(k))
            }
        };
        let k = match (text.k, delta_k) {
            (Some(a), Some(b)) if a != b => return Err(CliError::Config(format!("--k {a} disagrees with delta index {b}"))),
            (Some(a), _) | (None, Some(a)) => a,
            (None, None) => return Err(CliError::Config("one of --k or --delta is required".into())),
        };
        let nu = match &text.nu {
            Some(s) => parse_nu(s)?,
            None => default_nu(rank),
        };
        if nu.len() != rank {
            return Err(CliError::Config(format!("nu has {} entries, the real rank is {rank}", nu.len())));
        }
        let sides = match &text.side {
            Some(s) => s.parse()?,
            None => SideSelection::Both,
        };
        let grid = match &text.grid {
            None => vec![nu.clone()],
            Some(g) if g.trim().is_empty() => Vec::new(),
            Some(g) => g.split(';').map(parse_nu).collect::<Result<Vec<_>, _>>()?,
        };
        if let Some(bad) = grid.iter().find(|v| v.len() != rank) {
            return Err(CliError::Config(format!("grid point has {} entries, the real rank is {rank}", bad.len())));
        }
        Ok(RunConfig { text: text.clone(), group, k, delta_compact, nu, sides, grid, a_action: text.a_action.unwrap_or(AAction::Rho), rank })
    }

    /// Model spaces need k <= real rank; the tensor-space relation suite does not.
    pub fn has_models(&self) -> bool {
        self.k <= self.rank
    }

    fn require_models(&self) -> Result<(), CliError> {
        if self.has_models() {
            Ok(())
        } else {
            Err(CliError::Config(format!("k = {} exceeds the real rank {}", self.k, self.rank)))
        }
    }

    pub fn ps_spec(&self, nu: &[GaussRat], side: Side) -> PsSpec {
        let mut s = PsSpec::new(self.group.clone(), self.k, nu.to_vec(), side);
        s.delta_compact = self.delta_compact;
        s.a_action = self.a_action;
        s
    }

    pub fn case_json(&self) -> Value {
        json!({
            "group": self.text.group,
            "k": self.k,
            "delta": format!("{}:{}", match self.delta_compact { Sign1::Triv => "triv", Sign1::Det => "det" }, self.k),
            "nu": self.nu.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
            "side": self.sides.to_string(),
            "a_action": match self.a_action { AAction::Nu => "nu", AAction::Rho => "rho" },
        })
    }
}

/// Result of one suite on one case.
#[derive(Clone, Debug)]
pub struct SuiteResult {
    pub passed: bool,
    pub body: Value,
}

/// A verification suite selectable with `--suite`.
pub trait Suite: Sync {
    fn name(&self) -> &'static str;
    /// Can a failure of this suite fail the process?
    fn gating(&self) -> bool {
        true
    }
    fn run(&self, cfg: &RunConfig) -> Result<SuiteResult, CliError>;
}

pub struct RelationsSuite;
pub struct PsmapSuite;
pub struct UnitarySuite;

pub fn suite_registry() -> Vec<Box<dyn Suite>> {
    vec![Box::new(RelationsSuite), Box::new(PsmapSuite), Box::new(UnitarySuite)]
}

/// Resolve a `--suite` value to registry entries, "all" meaning every suite in registry order.
pub fn select_suites(name: &str) -> Result<Vec<Box<dyn Suite>>, CliError> {
    let reg = suite_registry();
    if name == "all" {
        return Ok(reg);
    }
    let known: Vec<&str> = reg.iter().map(|s| s.name()).collect::<Vec<_>>();
    let msg = format!("unknown suite {name:?}; expected one of {} or all", known.join(", "));
    reg.into_iter().find(|s| s.name() == name).map(|s| vec![s]).ok_or(CliError::Config(msg))
}

fn rstr(x: &GaussRat) -> String {
    x.to_string()
}

fn matrix_strings(m: &ExactMatrix) -> Vec<Vec<String>> {
    m.to_dense().iter().map(|r| r.iter().map(rstr).collect()).collect()
}

fn side_name(s: Side) -> &'static str {
    match s {
        Side::Mu => "mu",
        Side::Mubar => "mubar",
    }
}

fn relation_json(space: &str, dim: usize, rep: &RelationReport) -> Value {
    let mut v = serde_json::to_value(rep).expect("report serializes");
    v["space"] = json!(space);
    v["dim"] = json!(dim);
    v["normative_ok"] = json!(rep.normative_ok());
    v
}

impl Suite for RelationsSuite {
    fn name(&self) -> &'static str {
        "relations"
    }
    fn run(&self, cfg: &RunConfig) -> Result<SuiteResult, CliError> {
        let data = build_algebra(&cfg.group)?;
        let a = standard_assignment(&data, cfg.k, Convention::Consistent)?;
        let tensor = check_relations(&Presentation::type_bc(cfg.k), &a);
        let mut passed = tensor.normative_ok();
        let mut relations = vec![relation_json(&format!("V^(x){}", cfg.k), a.dim, &tensor)];
        let model_sides = if cfg.has_models() { cfg.sides.sides() } else { Vec::new() };
        for side in model_sides {
            let spec = cfg.ps_spec(&cfg.nu, side);
            let model = ModelSpace::build(&spec, Ordering::KLeft)?;
            let rep = model.check_relations();
            let quo = check_quotient_presentation(&model.assignment());
            passed &= rep.normative_ok() && quo.normative_ok();
            relations.push(relation_json(&format!("model {}", side_name(side)), model.dim(), &rep));
            relations.push(relation_json(&format!("model {} quotient", side_name(side)), model.dim(), &quo));
        }
        let disc = printed_discrepancies(&cfg.group, cfg.k)?;
        Ok(SuiteResult {
            passed,
            body: json!({
                "relations": relations,
                "derived_constants": serde_json::to_value(&tensor.derived_constants).expect("serializes"),
                "paper_discrepancies": serde_json::to_value(&disc).expect("serializes"),
            }),
        })
    }
}

fn side_psmap(cfg: &RunConfig, side: Side) -> Result<(bool, Value), CliError> {
    let spec = cfg.ps_spec(&cfg.nu, side);
    let model = ModelSpace::build(&spec, Ordering::KLeft)?;
    let orderings = if model.legs() > 0 { serde_json::to_value(compare_orderings(&spec)).expect("serializes") } else { json!([]) };
    let mut v = json!({
        "side": side_name(side),
        "legs": model.legs(),
        "dim": model.dim(),
        "nu_on_legs": model.nu_on_legs().iter().map(rstr).collect::<Vec<_>>(),
        "orderings": orderings,
    });
    if model.legs() > 0 {
        v["cyclic_formula"] = json!(model.cyclic_formula_holds()?);
        v["printed_cyclic_formula"] = json!(model.printed_cyclic_formula_holds()?);
    }
    match hecke_isomorphism_check(&model) {
        Ok((m, _)) => {
            v["isomorphic"] = json!(true);
            v["r"] = json!(rstr(&m.r_shift));
            v["c"] = json!(rstr(&m.c_hecke));
            v["lambda"] = json!(m.lambda.iter().map(rstr).collect::<Vec<_>>());
            v["intertwiner"] = json!(matrix_strings(&m.intertwiner));
            Ok((true, v))
        }
        Err(e) => {
            v["isomorphic"] = json!(false);
            v["error"] = json!(e.to_string());
            Ok((false, v))
        }
    }
}

impl Suite for PsmapSuite {
    fn name(&self) -> &'static str {
        "psmap"
    }
    fn run(&self, cfg: &RunConfig) -> Result<SuiteResult, CliError> {
        cfg.require_models()?;
        let mut passed = true;
        let mut sides = Vec::new();
        for side in cfg.sides.sides() {
            let (ok, v) = side_psmap(cfg, side)?;
            passed &= ok;
            sides.push(v);
        }
        Ok(SuiteResult { passed, body: json!({ "sides": sides }) })
    }
}

impl Suite for UnitarySuite {
    fn name(&self) -> &'static str {
        "unitary"
    }
    fn gating(&self) -> bool {
        false
    }
    fn run(&self, cfg: &RunConfig) -> Result<SuiteResult, CliError> {
        cfg.require_models()?;
        // grid points are independent; collect in index order whatever order they finish in
        let results: Vec<Result<Value, CliError>> = std::thread::scope(|s| {
            let handles: Vec<_> = cfg
                .grid
                .iter()
                .map(|nu| {
                    s.spawn(move || -> Result<Value, CliError> {
                        let rep = nonunitary_test(&cfg.ps_spec(nu, Side::Mu))?;
                        let mut v = serde_json::to_value(&rep).expect("serializes");
                        v["nu"] = json!(nu.iter().map(rstr).collect::<Vec<_>>());
                        Ok(v)
                    })
                })
                .collect();
            handles.into_iter().map(|h| h.join().expect("grid worker panicked")).collect()
        });
        let points = results.into_iter().collect::<Result<Vec<_>, _>>()?;
        Ok(SuiteResult { passed: true, body: json!({ "points": points }) })
    }
}

/// One row of the constants comparison.
#[derive(Clone, Debug, Serialize)]
pub struct ConstantsRow {
    pub side: &'static str,
    pub character: String,
    pub legs: usize,
    /// (r, c) as listed in the constants table.
    pub table_r: String,
    pub table_c: String,
    /// Hecke parameter announced for the correspondence in the introduction (Sp only).
    pub intro_c: Option<String>,
    pub derived_r: Option<String>,
    pub derived_c: Option<String>,
    pub c_matches_table: Option<bool>,
    pub c_abs_matches_table: Option<bool>,
    pub c_matches_intro: Option<bool>,
    pub note: String,
}

fn table_values(group: &GroupSpec, side: Side) -> (GaussRat, GaussRat, Option<GaussRat>) {
    let p = &group.params;
    if group.family == "sp" {
        let n = (p[0] / 2) as i64;
        match side {
            Side::Mu => (GaussRat::int(0), GaussRat::int(-n), Some(GaussRat::int(0))),
            Side::Mubar => (GaussRat::int(1), GaussRat::int(-n), Some(GaussRat::int(1))),
        }
    } else {
        let (pp, qq) = (p[0] as i64, p[1] as i64);
        (GaussRat::frac(pp + qq, 2), GaussRat::frac(pp - qq, 2), None)
    }
}

/// Table values next to (r, c) derived from the models at the case's nu.
pub fn constants_table(cfg: &RunConfig) -> Result<Vec<ConstantsRow>, CliError> {
    let mut rows = Vec::new();
    if !cfg.has_models() {
        return Ok(rows);
    }
    for side in [Side::Mu, Side::Mubar] {
        let spec = cfg.ps_spec(&cfg.nu, side);
        let (tr, tc, intro) = table_values(&cfg.group, side);
        let legs = spec.legs();
        let derived: Option<HeckeMatch> = if legs == 0 {
            None
        } else {
            let model = ModelSpace::build(&spec, Ordering::KLeft)?;
            hecke_isomorphism_check(&model).ok().map(|(m, _)| m)
        };
        let (dr, dc) = match &derived {
            Some(m) => (Some(m.r_shift.clone()), Some(m.c_hecke.clone())),
            None => (None, None),
        };
        let note = match (&dc, legs) {
            (_, 0) => "no legs on this side; nothing to derive".to_string(),
            (None, _) => "derivation failed; see psmap suite".to_string(),
            (Some(c), _) if *c == tc => "derived c agrees with the table".to_string(),
            (Some(c), _) if *c == -&tc => "derived c agrees with the table up to sign".to_string(),
            (Some(c), _) if Some(c) == intro.as_ref() => "derived c agrees with the introduction, not the table".to_string(),
            _ => "derived c disagrees with the table".to_string(),
        };
        rows.push(ConstantsRow {
            side: side_name(side),
            character: spec.mu().to_string(),
            legs,
            table_r: rstr(&tr),
            table_c: rstr(&tc),
            intro_c: intro.as_ref().map(rstr),
            derived_r: dr.as_ref().map(rstr),
            derived_c: dc.as_ref().map(rstr),
            c_matches_table: dc.as_ref().map(|c| *c == tc),
            c_abs_matches_table: dc.as_ref().map(|c| *c == tc || *c == -&tc),
            c_matches_intro: match (&dc, &intro) {
                (Some(c), Some(i)) => Some(c == i),
                _ => None,
            },
            note,
        });
    }
    Ok(rows)
}

/// Full report for one case: every selected suite plus the constants table.
pub fn run_case(cfg: &RunConfig, suites: &[Box<dyn Suite>]) -> Result<(bool, Value), CliError> {
    let mut ok = true;
    let mut out = BTreeMap::new();
    for s in suites {
        let r = s.run(cfg)?;
        if s.gating() {
            ok &= r.passed;
        }
        let mut body = r.body;
        body["passed"] = json!(r.passed);
        out.insert(s.name(), body);
    }
    let table = serde_json::to_value(constants_table(cfg)?).expect("serializes");
    Ok((ok, json!({ "case": cfg.case_json(), "suites": out, "constants_table": table, "ok": ok })))
}

/// Report for a list of cases, in case order.
pub fn run_cases(cases: &[(RunConfig, Vec<Box<dyn Suite>>)]) -> Result<(bool, Value), CliError> {
    let mut ok = true;
    let mut reports = Vec::new();
    for (cfg, suites) in cases {
        let (o, v) = run_case(cfg, suites)?;
        ok &= o;
        reports.push(v);
    }
    Ok((ok, json!({ "schema": SCHEMA_VERSION, "cases": reports, "ok": ok })))
}

/// Canonical text of a report: sorted keys (serde_json's default map), two-space indent, trailing newline.
pub fn render(report: &Value) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("json renders");
    s.push('\n');
    s
}
