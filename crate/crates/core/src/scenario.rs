//! Scenario files and the adjoint → current → evolution → κ pipeline.
//!
//! A scenario is a list of `key = value` lines; `#` starts a comment.
//!
//! ```text
//! name       = kdvkdv_all
//! anchor     = KdV-KdV system: κ5, κ6, κ7, κ8 and κ_s
//! operator   = kdvkdv                  # catalogue name or operator text
//! grid       = 256 / 80                # points per axis / box length
//! k_max      = 3.7                     # optional mode cutoff
//! initial    = gaussian(c=-1, w=1.5); gaussian(c=2, w=1, a=0.5)
//! random     = count=6, max_mode=3, seed=7, real=1, paired=0
//! times      = linspace(0.1, 0.9, 9)   # or a comma list
//! s          = 1.0                     # time-reflection centre
//! window     = 0, inf                  # times the solution may be sampled at
//! cap        = 1e6                     # amplification cap
//! seed       = 0
//! partner_initial = gaussian(c=1, w=1)  # optional second solution feeding Q
//! partner_random  = count=4, seed=9
//! conserved  = kdvkdv.V5 @1e-10, kdvkdv.V7 @1e-8
//! controls   = heat.time_reflection @1e-2
//! ```
//!
//! `initial` holds one profile per entry of `(u, u_t, …)`: `zero`,
//! `gaussian(c, w, a, ai, p)` or `bump(c, r, a, ai)`. Vector parameters are
//! colon separated (`c=0.5:0:-1`). A `conserved` entry passes when its drift
//! is at most the tolerance; a `controls` entry passes when its drift is at
//! least the tolerance.
//!
//! With a `partner_*` key the characteristic is built from that second
//! solution `v`, giving the polarized functional `∫X⁰(Q[v], u)`.

use std::sync::Arc;

use serde::Serialize;

use crate::adjoint::{classify_adjointness, factorize, AdjointFactorization, SolverConfig};
use crate::current::{adjoint_characteristic, concomitant_flux, KappaFunctional};
use crate::error::{Error, Result};
use crate::linalg::c;
use crate::opcore::Operator;
use crate::operators::resolve;
use crate::spectral::{
    kappa_series, FieldSource, InitialData, KappaSeries, ModeSystem, Profile, RandomModes,
    SpectralSolution, TorusGrid, DEFAULT_AMPLIFICATION_CAP,
};
use crate::symmetry::{lookup_with_center, verify_symmetry, Generator, VerifyConfig};

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub spec: String,
    pub tolerance: f64,
    /// Controls must drift by at least the tolerance.
    pub control: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub anchor: String,
    pub operator: String,
    pub points: Vec<usize>,
    pub lengths: Vec<f64>,
    pub k_max: Option<f64>,
    pub initial: InitialData,
    pub partner: Option<InitialData>,
    pub times: Vec<f64>,
    pub s: f64,
    pub window: (f64, f64),
    pub cap: f64,
    pub seed: u64,
    pub checks: Vec<Check>,
}

fn parse_err(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        column,
        message: message.into(),
    }
}

fn parse_f64(s: &str) -> Option<f64> {
    match s.trim() {
        "inf" | "+inf" => Some(f64::INFINITY),
        "-inf" => Some(f64::NEG_INFINITY),
        t => t.parse().ok(),
    }
}

fn parse_vec(s: &str) -> Option<Vec<f64>> {
    s.split(':').map(parse_f64).collect()
}

/// `name(k=v, …)` with vector values allowed.
fn parse_call(s: &str) -> Option<(String, Vec<(String, String)>)> {
    let s = s.trim();
    let Some(open) = s.find('(') else {
        return Some((s.to_string(), Vec::new()));
    };
    let inner = s[open + 1..].strip_suffix(')')?;
    let mut kv = Vec::new();
    for part in inner.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (k, v) = part.split_once('=')?;
        kv.push((k.trim().to_string(), v.trim().to_string()));
    }
    Some((s[..open].trim().to_string(), kv))
}

fn get<'a>(kv: &'a [(String, String)], key: &str) -> Option<&'a str> {
    kv.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
}

fn parse_profile(s: &str, dim: usize) -> Option<Profile> {
    let (name, kv) = parse_call(s)?;
    let num = |key: &str, default: f64| get(&kv, key).map_or(Some(default), parse_f64);
    let vector = |key: &str| -> Option<Vec<f64>> {
        match get(&kv, key) {
            None => Some(vec![0.0; dim]),
            Some(v) => {
                let v = parse_vec(v)?;
                if v.len() == 1 {
                    Some(vec![v[0]; dim])
                } else if v.len() == dim {
                    Some(v)
                } else {
                    None
                }
            }
        }
    };
    let amplitude = c(num("a", 1.0)?, num("ai", 0.0)?);
    match name.as_str() {
        "zero" => Some(Profile::Zero),
        "gaussian" => Some(Profile::Gaussian {
            center: vector("c")?,
            width: num("w", 1.0)?,
            amplitude,
            momentum: vector("p")?,
        }),
        "bump" => Some(Profile::Bump {
            center: vector("c")?,
            radius: num("r", 1.0)?,
            amplitude,
        }),
        _ => None,
    }
}

fn parse_times(s: &str) -> Option<Vec<f64>> {
    let s = s.trim();
    if let Some(rest) = s.strip_prefix("linspace(") {
        let args: Vec<f64> = rest.strip_suffix(')')?.split(',').map(parse_f64).collect::<Option<_>>()?;
        let [a, b, n] = args[..] else { return None };
        let n = n as usize;
        if n < 2 {
            return None;
        }
        return Some((0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect());
    }
    s.split(',').map(parse_f64).collect()
}

fn parse_checks(s: &str, control: bool) -> Option<Vec<Check>> {
    let mut out = Vec::new();
    let mut depth = 0;
    let mut start = 0;
    let bytes: Vec<char> = s.chars().collect();
    let mut pieces = Vec::new();
    for (i, ch) in bytes.iter().enumerate() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                pieces.push(bytes[start..i].iter().collect::<String>());
                start = i + 1;
            }
            _ => {}
        }
    }
    pieces.push(bytes[start..].iter().collect::<String>());
    for p in pieces.iter().map(|p| p.trim()).filter(|p| !p.is_empty()) {
        let (spec, tol) = match p.rsplit_once('@') {
            Some((a, b)) => (a.trim(), parse_f64(b)?),
            None => (p, if control { 1e-2 } else { 1e-8 }),
        };
        out.push(Check {
            spec: spec.to_string(),
            tolerance: tol,
            control,
        });
    }
    Some(out)
}

impl Scenario {
    pub fn parse(src: &str) -> Result<Scenario> {
        let mut fields: Vec<(usize, usize, String, String)> = Vec::new();
        for (ln, raw) in src.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("");
            if line.trim().is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                let col = raw.len() - raw.trim_start().len() + 1;
                return Err(parse_err(ln + 1, col, "expected `key = value`"));
            };
            let col = k.len() + 2 + (v.len() - v.trim_start().len());
            fields.push((ln + 1, col, k.trim().to_string(), v.trim().to_string()));
        }
        let find = |key: &str| fields.iter().find(|f| f.2 == key);
        let require = |key: &str| {
            find(key).ok_or_else(|| parse_err(1, 1, format!("missing required key `{key}`")))
        };

        let name = find("name").map_or_else(|| "scenario".to_string(), |f| f.3.clone());
        let anchor = find("anchor").map_or_else(String::new, |f| f.3.clone());
        let operator = require("operator")?.3.clone();

        let g = require("grid")?;
        let (pts, len) = g
            .3
            .split_once('/')
            .ok_or_else(|| parse_err(g.0, g.1, "grid is `points / length`"))?;
        let points: Vec<usize> = pts
            .split('x')
            .map(|p| p.trim().parse().ok())
            .collect::<Option<_>>()
            .ok_or_else(|| parse_err(g.0, g.1, "bad point counts"))?;
        let mut lengths = parse_vec(len.trim()).ok_or_else(|| parse_err(g.0, g.1, "bad box length"))?;
        if lengths.len() == 1 {
            lengths = vec![lengths[0]; points.len()];
        }
        let dim = points.len();

        let num = |key: &str, default: f64| -> Result<f64> {
            match find(key) {
                None => Ok(default),
                Some(f) => parse_f64(&f.3).ok_or_else(|| parse_err(f.0, f.1, format!("bad number for `{key}`"))),
            }
        };
        let k_max = find("k_max").map(|_| num("k_max", 0.0)).transpose()?;
        let s = num("s", 0.0)?;
        let cap = num("cap", DEFAULT_AMPLIFICATION_CAP)?;
        let seed = num("seed", 0.0)? as u64;

        let profiles_for = |key: &str| -> Result<Option<Vec<Profile>>> {
            match find(key) {
                None => Ok(None),
                Some(f) => f
                    .3
                    .split(';')
                    .map(|p| parse_profile(p, dim))
                    .collect::<Option<_>>()
                    .map(Some)
                    .ok_or_else(|| parse_err(f.0, f.1, "bad initial profile")),
            }
        };
        let random_for = |key: &str| -> Result<Option<RandomModes>> {
            let Some(f) = find(key) else { return Ok(None) };
            let (_, kv) = parse_call(&format!("r({})", f.3))
                .ok_or_else(|| parse_err(f.0, f.1, "bad random-mode spec"))?;
            let n = |k: &str, d: f64| get(&kv, k).and_then(parse_f64).unwrap_or(d);
            Ok(Some(RandomModes {
                count: n("count", 4.0) as usize,
                max_mode: n("max_mode", 2.0) as i64,
                seed: n("seed", seed as f64) as u64,
                real: n("real", 0.0) != 0.0,
                paired: n("paired", 0.0) != 0.0,
                entries: n("entries", 0.0) as usize,
            }))
        };
        let initial = InitialData {
            profiles: profiles_for("initial")?.unwrap_or_default(),
            random: random_for("random")?,
        };
        let partner_profiles = profiles_for("partner_initial")?;
        let partner_random = random_for("partner_random")?;
        let partner = (partner_profiles.is_some() || partner_random.is_some()).then(|| InitialData {
            profiles: partner_profiles.unwrap_or_default(),
            random: partner_random,
        });

        let tf = require("times")?;
        let times = parse_times(&tf.3).ok_or_else(|| parse_err(tf.0, tf.1, "bad time list"))?;
        let window = match find("window") {
            None => (f64::NEG_INFINITY, f64::INFINITY),
            Some(f) => {
                let v: Vec<f64> = f
                    .3
                    .split(',')
                    .map(parse_f64)
                    .collect::<Option<_>>()
                    .filter(|v: &Vec<f64>| v.len() == 2)
                    .ok_or_else(|| parse_err(f.0, f.1, "window is `lo, hi`"))?;
                (v[0], v[1])
            }
        };
        let mut checks = Vec::new();
        for (key, control) in [("conserved", false), ("controls", true)] {
            if let Some(f) = find(key) {
                checks.extend(
                    parse_checks(&f.3, control).ok_or_else(|| parse_err(f.0, f.1, "bad check list"))?,
                );
            }
        }
        if checks.is_empty() {
            return Err(parse_err(1, 1, "no `conserved` or `controls` entries"));
        }
        // validate the operator text early so its position is reported
        if let Err(e) = resolve(&operator) {
            let f = find("operator").unwrap();
            return Err(match e {
                Error::Parse { line, column, message } => parse_err(
                    f.0 + line - 1,
                    if line == 1 { f.1 + column - 1 } else { column },
                    message,
                ),
                other => other,
            });
        }
        Ok(Scenario {
            name,
            anchor,
            operator,
            points,
            lengths,
            k_max,
            initial,
            partner,
            times,
            s,
            window,
            cap,
            seed,
            checks,
        })
    }
}

/// One κ run.
#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub symmetry: String,
    pub control: bool,
    pub drift: f64,
    pub tolerance: f64,
    pub pass: bool,
    /// Relative `L[Γu]` residual on plane waves, for symmetry generators.
    pub symmetry_residual: Option<f64>,
    /// Whether `L[w] = 0` holds symbolically, for kernel shifts.
    pub kernel_exact: Option<bool>,
    #[serde(skip)]
    pub series: KappaSeries,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub scenario: String,
    pub anchor: String,
    pub operator: String,
    pub adjointness: String,
    pub parity: String,
    pub seed: u64,
    pub checks: Vec<CheckResult>,
    pub pass: bool,
}

/// `{scenario, symmetry, drift, pass}` records, one per check.
#[derive(Clone, Debug, Serialize)]
pub struct SummaryRecord {
    pub scenario: String,
    pub symmetry: String,
    pub drift: f64,
    pub pass: bool,
}

impl RunReport {
    pub fn summary(&self) -> Vec<SummaryRecord> {
        self.checks
            .iter()
            .map(|c| SummaryRecord {
                scenario: self.scenario.clone(),
                symmetry: c.symmetry.clone(),
                drift: c.drift,
                pass: c.pass,
            })
            .collect()
    }

    pub fn summary_json(&self) -> String {
        serde_json::to_string_pretty(&self.summary()).expect("summary serializes")
    }
}

/// Operator, factorization and solution shared by the checks of a scenario.
pub struct Pipeline {
    pub operator: Operator,
    pub factorization: AdjointFactorization,
    pub solution: Arc<SpectralSolution>,
    /// Second solution the characteristic is built from, when polarizing.
    pub partner: Option<Arc<SpectralSolution>>,
    pub s: f64,
    pub seed: u64,
}

impl Pipeline {
    pub fn new(
        operator: Operator,
        grid: TorusGrid,
        initial: &InitialData,
        s: f64,
        window: (f64, f64),
        cap: f64,
        seed: u64,
    ) -> Result<Self> {
        let factorization = factorize(
            &operator,
            &SolverConfig {
                seed,
                ..Default::default()
            },
        )?;
        let system = Arc::new(ModeSystem::new(&operator, grid.clone())?.with_cap(cap));
        let state = initial.state(&grid, system.form.state_size(), 0.0)?;
        let solution = Arc::new(SpectralSolution::new(system, state).with_window(window.0, window.1));
        Ok(Pipeline {
            operator,
            factorization,
            solution,
            partner: None,
            s,
            seed,
        })
    }

    /// Builds `Q` from a second solution with the given data.
    pub fn with_partner(mut self, initial: &InitialData) -> Result<Self> {
        let system = self.solution.system.clone();
        let state = initial.state(&system.grid, system.form.state_size(), 0.0)?;
        let (lo, hi) = self.solution.window;
        self.partner = Some(Arc::new(SpectralSolution::new(system, state).with_window(lo, hi)));
        Ok(self)
    }

    pub fn generator(&self, spec: &str) -> Result<Generator> {
        let (rows, _) = self.operator.shape();
        lookup_with_center(spec, self.operator.nvars(), rows, self.s)
    }

    pub fn functional(&self, generator: Generator) -> Result<KappaFunctional> {
        let flux = concomitant_flux(&self.operator)?;
        let ch = adjoint_characteristic(&self.factorization, generator, self.s);
        let u: Arc<dyn FieldSource> = self.solution.clone();
        Ok(match &self.partner {
            None => KappaFunctional::new(&flux, &ch, u),
            Some(v) => KappaFunctional::polarized(&flux, &ch, v.clone(), u),
        })
    }

    pub fn kappa(&self, spec: &str, times: &[f64]) -> Result<KappaSeries> {
        kappa_series(&self.functional(self.generator(spec)?)?, times)
    }
}

pub fn run(sc: &Scenario) -> Result<RunReport> {
    let operator = resolve(&sc.operator)?;
    let adjointness = classify_adjointness(&operator)?;
    let grid = TorusGrid::new(sc.points.clone(), sc.lengths.clone(), sc.k_max)?;
    let pipe = Pipeline::new(
        operator.clone(),
        grid,
        &sc.initial,
        sc.s,
        sc.window,
        sc.cap,
        sc.seed,
    )?;
    let pipe = match &sc.partner {
        None => pipe,
        Some(p) => pipe.with_partner(p)?,
    };
    let mut checks = Vec::new();
    for check in &sc.checks {
        let generator = pipe.generator(&check.spec)?;
        let (symmetry_residual, kernel_exact) = match &generator {
            Generator::Symmetry(g) => {
                let cfg = VerifyConfig::for_operator(&operator, sc.seed)?;
                (Some(verify_symmetry(&operator, g, &cfg)?.relative), None)
            }
            Generator::Kernel(k) => (None, Some(k.is_kernel_element(&operator)?)),
        };
        let series = kappa_series(&pipe.functional(generator)?, &sc.times)?;
        let pass = if check.control {
            series.drift >= check.tolerance
        } else {
            series.drift <= check.tolerance
        };
        checks.push(CheckResult {
            symmetry: check.spec.clone(),
            control: check.control,
            drift: series.drift,
            tolerance: check.tolerance,
            pass,
            symmetry_residual,
            kernel_exact,
            series,
        });
    }
    Ok(RunReport {
        scenario: sc.name.clone(),
        anchor: sc.anchor.clone(),
        operator: sc.operator.clone(),
        adjointness: adjointness.to_string(),
        parity: pipe.factorization.pair.mask_label(),
        seed: sc.seed,
        pass: checks.iter().all(|c| c.pass),
        checks,
    })
}
