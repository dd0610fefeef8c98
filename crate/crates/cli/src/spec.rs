//! Run-spec files: TOML in, a validated [`RunSpec`] out.
//!
//! ```toml
//! command = "probe"          # optional, must match the command line
//! resolution = 64            # optional, --resolution wins
//! params = [[2, 3.0], [3, 2.0]]
//!
//! [[sweep]]                  # t from..to in `steps` equal steps
//! n = 2
//! t = [1.5, 3.0]
//! steps = 4
//!
//! [[corpus]]
//! bump = "core"
//! epsilons = [0.1, 0.05, 0.025, 0.0125]
//! seed = 7                   # optional: jitter each amplitude by up to ±jitter
//! jitter = 0.05
//!
//! [output]
//! path = "runs/probe"        # --out wins
//! format = "csv"
//! ```

use std::fmt;
use std::ops::Range;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use gnslab_core::quad::MIN_RESOLUTION;
use gnslab_core::{derive_params, BumpShape, ParamSet, DEFAULT_RESOLUTION};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use toml::Spanned;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Command {
    Constants,
    Deficit,
    Identity,
    Distance,
    Probe,
    Lemmas,
    Alpha,
}

impl Command {
    pub const ALL: [Command; 7] = [
        Command::Constants,
        Command::Deficit,
        Command::Identity,
        Command::Distance,
        Command::Probe,
        Command::Lemmas,
        Command::Alpha,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Constants => "constants",
            Command::Deficit => "deficit",
            Command::Identity => "identity",
            Command::Distance => "distance",
            Command::Probe => "probe",
            Command::Lemmas => "lemmas",
            Command::Alpha => "alpha",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Command {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| format!("unknown command `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// One perturbation recipe: a bump shape at a list of amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct Recipe {
    pub bump: BumpShape,
    pub epsilons: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSpec {
    pub command: Command,
    pub params: Vec<ParamSet>,
    /// Empty means the command's default corpus.
    pub corpus: Vec<Recipe>,
    pub resolution: usize,
    pub out_dir: PathBuf,
    pub format: Format,
}

/// A validation failure pointing into the spec file.
#[derive(Debug, Clone, PartialEq)]
pub struct SpecError {
    pub file: String,
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for SpecError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}: {}", self.file, self.line, self.column, self.message)
    }
}

impl std::error::Error for SpecError {}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    command: Option<Spanned<String>>,
    resolution: Option<Spanned<i64>>,
    #[serde(default)]
    params: Vec<Spanned<(i64, f64)>>,
    #[serde(default)]
    sweep: Vec<Spanned<RawSweep>>,
    #[serde(default)]
    corpus: Vec<Spanned<RawRecipe>>,
    output: Option<RawOutput>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    n: i64,
    t: (f64, f64),
    steps: Spanned<i64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRecipe {
    bump: Spanned<String>,
    epsilons: Spanned<Vec<f64>>,
    seed: Option<u64>,
    jitter: Option<Spanned<f64>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    path: Option<String>,
    format: Option<Spanned<String>>,
}

/// Overrides taken from the command line.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub out_dir: Option<PathBuf>,
    pub resolution: Option<usize>,
}

struct Locator<'a> {
    file: &'a str,
    text: &'a str,
}

impl Locator<'_> {
    fn error(&self, span: Range<usize>, message: impl Into<String>) -> SpecError {
        let start = span.start.min(self.text.len());
        let before = &self.text[..start];
        let line = before.matches('\n').count() + 1;
        let column = start - before.rfind('\n').map_or(0, |i| i + 1) + 1;
        SpecError {
            file: self.file.to_string(),
            line,
            column,
            message: message.into(),
        }
    }
}

/// Reads and validates a spec file.
pub fn load(path: &Path, command: Command, overrides: &Overrides) -> Result<RunSpec, SpecError> {
    let file = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|e| SpecError {
        file: file.clone(),
        line: 0,
        column: 0,
        message: format!("cannot read spec: {e}"),
    })?;
    parse(&text, &file, command, overrides)
}

/// Validates spec text; `file` only labels error messages.
pub fn parse(text: &str, file: &str, command: Command, overrides: &Overrides) -> Result<RunSpec, SpecError> {
    let loc = Locator { file, text };
    let raw: RawSpec = toml::from_str(text).map_err(|e| {
        let span = e.span().unwrap_or(0..0);
        loc.error(span, e.message().to_string())
    })?;

    if let Some(c) = &raw.command {
        let named: Command = c.get_ref().parse().map_err(|m| loc.error(c.span(), m))?;
        if named != command {
            return Err(loc.error(
                c.span(),
                format!("spec is for `{named}` but `{command}` was requested"),
            ));
        }
    }

    let resolution = match (overrides.resolution, &raw.resolution) {
        (Some(r), _) if r < MIN_RESOLUTION => {
            return Err(SpecError {
                file: "--resolution".into(),
                line: 0,
                column: 0,
                message: format!("resolution {r} is below the minimum {MIN_RESOLUTION}"),
            })
        }
        (Some(r), _) => r,
        (None, Some(r)) => {
            let v = *r.get_ref();
            if v < MIN_RESOLUTION as i64 {
                return Err(loc.error(r.span(), format!("resolution {v} is below the minimum {MIN_RESOLUTION}")));
            }
            v as usize
        }
        (None, None) => DEFAULT_RESOLUTION,
    };

    let mut params = Vec::new();
    for pair in &raw.params {
        let (n, t) = *pair.get_ref();
        params.push(admissible(&loc, pair.span(), n, t)?);
    }
    for sweep in &raw.sweep {
        let s = sweep.get_ref();
        let steps = *s.steps.get_ref();
        if steps < 1 {
            return Err(loc.error(s.steps.span(), "steps must be at least 1"));
        }
        for i in 0..=steps {
            let t = s.t.0 + (s.t.1 - s.t.0) * i as f64 / steps as f64;
            params.push(admissible(&loc, sweep.span(), s.n, t)?);
        }
    }
    if params.is_empty() {
        return Err(loc.error(0..0, "no parameter sets: give `params` or at least one [[sweep]]"));
    }

    let mut corpus = Vec::new();
    for recipe in &raw.corpus {
        corpus.push(recipe_from(&loc, recipe.get_ref())?);
    }

    let format = match raw.output.as_ref().and_then(|o| o.format.as_ref()) {
        None => Format::Csv,
        Some(f) => match f.get_ref().as_str() {
            "csv" | "CSV" => Format::Csv,
            "json" | "JSON" => Format::Json,
            other => return Err(loc.error(f.span(), format!("unknown format `{other}` (expected csv or json)"))),
        },
    };
    let out_dir = overrides
        .out_dir
        .clone()
        .or_else(|| raw.output.as_ref().and_then(|o| o.path.clone()).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("gnslab-out"));

    Ok(RunSpec {
        command,
        params,
        corpus,
        resolution,
        out_dir,
        format,
    })
}

fn admissible(loc: &Locator, span: Range<usize>, n: i64, t: f64) -> Result<ParamSet, SpecError> {
    let n32 = u32::try_from(n).map_err(|_| loc.error(span.clone(), format!("dimension n = {n} is out of range")))?;
    derive_params(n32, t).map_err(|e| loc.error(span, format!("inadmissible (n, t) = ({n}, {t}): {e}")))
}

fn recipe_from(loc: &Locator, raw: &RawRecipe) -> Result<Recipe, SpecError> {
    let bump: BumpShape = raw
        .bump
        .get_ref()
        .parse()
        .map_err(|e| loc.error(raw.bump.span(), format!("{e}")))?;
    let mut epsilons = raw.epsilons.get_ref().clone();
    if epsilons.is_empty() {
        return Err(loc.error(raw.epsilons.span(), "epsilons must not be empty"));
    }
    if let Some(e) = epsilons.iter().find(|e| !(e.is_finite() && **e > 0.0)) {
        return Err(loc.error(raw.epsilons.span(), format!("amplitude {e} must be positive and finite")));
    }
    if let Some(j) = &raw.jitter {
        let jitter = *j.get_ref();
        if !(0.0..1.0).contains(&jitter) {
            return Err(loc.error(j.span(), format!("jitter {jitter} must lie in [0, 1)")));
        }
        let Some(seed) = raw.seed else {
            return Err(loc.error(j.span(), "jitter needs a `seed`"));
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for e in &mut epsilons {
            *e *= 1.0 + jitter * rng.random_range(-1.0..=1.0);
        }
    }
    Ok(Recipe { bump, epsilons })
}
