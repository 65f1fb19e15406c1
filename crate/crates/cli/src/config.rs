//! Run documents: TOML with sections `[run]`, `[lattice]`, `[coupling]`,
//! `[syndrome]`, `[mc]`, `[output]`. Unknown keys are rejected.

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::Deserialize;
use surface_fidelity::exact_engine::{
    DUAL_SITE_BUDGET, QUBIT_BUDGET, SECTOR_PLAQUETTE_BUDGET, TRANSFER_WIDTH_BUDGET,
};
use surface_fidelity::mc_engine::{BurnIn, Estimator, McConfig};
use surface_fidelity::noise_model::{CouplingConfig, DistributionSpec};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Exact,
    Tm,
    Mc,
    Scan,
    Predict,
    Validate,
}

impl Command {
    pub fn parse(name: &str) -> Option<Self> {
        Some(match name {
            "exact" => Self::Exact,
            "tm" => Self::Tm,
            "mc" => Self::Mc,
            "scan" => Self::Scan,
            "predict" => Self::Predict,
            "validate" => Self::Validate,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Exact => "exact",
            Self::Tm => "tm",
            Self::Mc => "mc",
            Self::Scan => "scan",
            Self::Predict => "predict",
            Self::Validate => "validate",
        }
    }
}

/// Which exact engines the `exact` command runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EngineChoice {
    /// Every engine whose budget admits the lattice.
    Auto,
    QubitBrute,
    DualBrute,
    TransferMatrix,
    SectorSums,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budgets {
    pub qubits: usize,
    pub dual_sites: usize,
    pub transfer_width: usize,
    pub sector_plaquettes: usize,
}

/// Parameter varied along a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParameter {
    H,
    J,
    H1,
    H2,
    /// Sets `h1` and `h2` together.
    H12,
    Dilution,
    Q,
}

#[derive(Debug, Clone, PartialEq)]
pub enum CouplingSource {
    Distribution(DistributionSpec),
    /// Explicit couplings read from a coupling file.
    File(CouplingConfig),
}

#[derive(Debug, Clone, PartialEq)]
pub struct CouplingPlan {
    pub source: CouplingSource,
    pub draws: usize,
    pub field_overrides: Vec<(usize, f64)>,
    pub pair_overrides: Vec<(usize, usize, f64)>,
    pub sweep: Option<(SweepParameter, Vec<f64>)>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SyndromeSpec {
    Empty,
    Coords(Vec<(usize, usize)>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Option<Command>,
    pub seed: Option<u64>,
    pub engine: EngineChoice,
    pub budgets: Budgets,
    pub tolerance: f64,
    /// `validate` also runs the two-value convention experiment.
    pub adjudicate: bool,
    pub distances: Vec<usize>,
    pub coupling: CouplingPlan,
    pub syndrome: SyndromeSpec,
    pub mc: McConfig,
    pub out_dir: Option<PathBuf>,
    /// Canonical form of the document, hashed into artifact headers.
    pub canonical: String,
}

impl RunConfig {
    /// Whether running `command` draws random numbers.
    pub fn is_stochastic(&self, command: Command) -> bool {
        let random_couplings = matches!(
            self.coupling.source,
            CouplingSource::Distribution(spec) if !matches!(spec, DistributionSpec::Homogeneous { .. })
        );
        match command {
            Command::Mc | Command::Scan => true,
            Command::Validate => self.adjudicate || random_couplings,
            Command::Exact | Command::Tm => random_couplings,
            Command::Predict => false,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Document {
    #[serde(default)]
    run: RunSection,
    #[serde(default)]
    lattice: LatticeSection,
    #[serde(default)]
    coupling: CouplingSection,
    #[serde(default)]
    syndrome: SyndromeSection,
    #[serde(default)]
    mc: McSection,
    #[serde(default)]
    output: OutputSection,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RunSection {
    command: Option<String>,
    seed: Option<u64>,
    engine: Option<String>,
    tolerance: Option<f64>,
    adjudicate: Option<bool>,
    qubit_budget: Option<usize>,
    dual_site_budget: Option<usize>,
    transfer_width_budget: Option<usize>,
    sector_budget: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct LatticeSection {
    distances: Vec<usize>,
}

impl Default for LatticeSection {
    fn default() -> Self {
        Self { distances: vec![3] }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct CouplingSection {
    distribution: Option<String>,
    h: Option<f64>,
    h_im: Option<f64>,
    j: Option<f64>,
    j_im: Option<f64>,
    h1: Option<f64>,
    h2: Option<f64>,
    dilution: Option<f64>,
    q: Option<f64>,
    draws: Option<usize>,
    file: Option<PathBuf>,
    fields: Option<Vec<(usize, f64)>>,
    pairs: Option<Vec<(usize, usize, f64)>>,
    scan_parameter: Option<String>,
    scan_values: Option<Vec<f64>>,
    /// `[start, stop, step]`, stop included.
    scan_range: Option<[f64; 3]>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct SyndromeSection {
    plaquettes: Option<PlaquetteList>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum PlaquetteList {
    Keyword(String),
    Coords(Vec<(usize, usize)>),
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct McSection {
    sweeps: Option<usize>,
    burn_in: Option<usize>,
    chains: Option<usize>,
    thinning: Option<usize>,
    estimator: Option<String>,
    ti_steps: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct OutputSection {
    dir: Option<PathBuf>,
}

/// 1-based line of `key` inside `[section]`, falling back to the section
/// header and then to line 1.
fn locate(text: &str, section: &str, key: &str) -> usize {
    let mut current = String::new();
    let mut header = None;
    for (i, line) in text.lines().enumerate() {
        let t = line.trim();
        if let Some(name) = t.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
            current = name.trim().to_string();
            if current == section {
                header = Some(i + 1);
            }
            continue;
        }
        if current == section {
            if let Some(rest) = t.strip_prefix(key) {
                if rest.trim_start().starts_with('=') {
                    return i + 1;
                }
            }
        }
    }
    header.unwrap_or(1)
}

fn line_of_offset(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

struct Ctx<'a> {
    text: &'a str,
}

impl Ctx<'_> {
    fn err(&self, section: &str, key: &str, message: impl Into<String>) -> CliError {
        CliError::Config { line: locate(self.text, section, key), message: message.into() }
    }
}

/// Parses and validates a run document. `base` resolves relative file paths.
pub fn parse_config(text: &str, base: &Path) -> Result<RunConfig, CliError> {
    let doc: Document = toml::from_str(text).map_err(|e| {
        let line = e.span().map_or(1, |s| line_of_offset(text, s.start));
        CliError::Config { line, message: e.message().trim().to_string() }
    })?;
    let canonical = toml::to_string(&toml::from_str::<toml::Table>(text).map_err(|e| CliError::Config {
        line: e.span().map_or(1, |s| line_of_offset(text, s.start)),
        message: e.message().trim().to_string(),
    })?)
    .map_err(|e| CliError::Config { line: 1, message: e.to_string() })?;
    let cx = Ctx { text };

    let command = match &doc.run.command {
        None => None,
        Some(name) => Some(Command::parse(name).ok_or_else(|| cx.err("run", "command", format!("unknown command `{name}`")))?),
    };
    let engine = match doc.run.engine.as_deref().unwrap_or("auto") {
        "auto" => EngineChoice::Auto,
        "qubit_brute" => EngineChoice::QubitBrute,
        "dual_brute" => EngineChoice::DualBrute,
        "transfer_matrix" => EngineChoice::TransferMatrix,
        "sector_sums" => EngineChoice::SectorSums,
        other => return Err(cx.err("run", "engine", format!("unknown engine `{other}`"))),
    };
    let tolerance = doc.run.tolerance.unwrap_or(1e-10);
    if !(tolerance > 0.0 && tolerance.is_finite()) {
        return Err(cx.err("run", "tolerance", "tolerance must be positive"));
    }
    let budgets = Budgets {
        qubits: doc.run.qubit_budget.unwrap_or(QUBIT_BUDGET),
        dual_sites: doc.run.dual_site_budget.unwrap_or(DUAL_SITE_BUDGET),
        transfer_width: doc.run.transfer_width_budget.unwrap_or(TRANSFER_WIDTH_BUDGET),
        sector_plaquettes: doc.run.sector_budget.unwrap_or(SECTOR_PLAQUETTE_BUDGET),
    };

    let distances = doc.lattice.distances.clone();
    if distances.is_empty() {
        return Err(cx.err("lattice", "distances", "at least one distance is required"));
    }
    if let Some(d) = distances.iter().find(|&&d| d < 2) {
        return Err(cx.err("lattice", "distances", format!("distance {d} is below 2")));
    }

    let coupling = parse_coupling(&doc.coupling, &cx, base, &distances)?;

    let syndrome = match &doc.syndrome.plaquettes {
        None => SyndromeSpec::Empty,
        Some(PlaquetteList::Keyword(k)) if k == "empty" => SyndromeSpec::Empty,
        Some(PlaquetteList::Keyword(k)) => {
            return Err(cx.err("syndrome", "plaquettes", format!("expected \"empty\" or a coordinate list, got `{k}`")))
        }
        Some(PlaquetteList::Coords(c)) => SyndromeSpec::Coords(c.clone()),
    };

    let defaults = McConfig::default();
    let estimator = match doc.mc.estimator.as_deref().unwrap_or("sector_flag") {
        "sector_flag" => Estimator::SectorFlag,
        "boundary_flip_ti" => Estimator::BoundaryFlipTi,
        other => return Err(cx.err("mc", "estimator", format!("unknown estimator `{other}`"))),
    };
    let mc = McConfig {
        sweeps: doc.mc.sweeps.unwrap_or(defaults.sweeps),
        burn_in: doc.mc.burn_in.map_or(BurnIn::Pilot, BurnIn::Fixed),
        chains: doc.mc.chains.unwrap_or(defaults.chains),
        seed: doc.run.seed.unwrap_or(0),
        thinning: doc.mc.thinning.unwrap_or(defaults.thinning),
        estimator,
        ti_steps: doc.mc.ti_steps.unwrap_or(defaults.ti_steps),
    };
    mc.validate().map_err(|e| cx.err("mc", "sweeps", e.to_string()))?;

    let out_dir = doc.output.dir.clone().map(|d| if d.is_absolute() { d } else { base.join(d) });

    Ok(RunConfig {
        command,
        seed: doc.run.seed,
        engine,
        budgets,
        tolerance,
        adjudicate: doc.run.adjudicate.unwrap_or(false),
        distances,
        coupling,
        syndrome,
        mc,
        out_dir,
        canonical,
    })
}

fn parse_coupling(s: &CouplingSection, cx: &Ctx, base: &Path, distances: &[usize]) -> Result<CouplingPlan, CliError> {
    let sec = "coupling";
    let name = s.distribution.as_deref().unwrap_or("homogeneous");
    let need = |v: Option<f64>, key: &str| v.ok_or_else(|| cx.err(sec, key, format!("`{key}` is required for {name}")));
    // Keys that the chosen distribution does not read are errors, not silently ignored.
    let allowed: &[&str] = match name {
        "homogeneous" => &["h", "h_im", "j", "j_im"],
        "two_value" => &["h1", "h2"],
        "diluted" => &["h", "dilution"],
        "signed_random" => &["h", "q"],
        "file" => &[],
        other => return Err(cx.err(sec, "distribution", format!("unknown distribution `{other}`"))),
    };
    let present = [
        ("h", s.h.is_some()),
        ("h_im", s.h_im.is_some()),
        ("j", s.j.is_some()),
        ("j_im", s.j_im.is_some()),
        ("h1", s.h1.is_some()),
        ("h2", s.h2.is_some()),
        ("dilution", s.dilution.is_some()),
        ("q", s.q.is_some()),
    ];
    if let Some((key, _)) = present.iter().find(|(k, p)| *p && !allowed.contains(k)) {
        return Err(cx.err(sec, key, format!("`{key}` is not used by distribution {name}")));
    }
    let source = match name {
        "homogeneous" => CouplingSource::Distribution(DistributionSpec::Homogeneous {
            h: Complex64::new(s.h.unwrap_or(0.0), s.h_im.unwrap_or(0.0)),
            j: Complex64::new(s.j.unwrap_or(0.0), s.j_im.unwrap_or(0.0)),
        }),
        "two_value" => CouplingSource::Distribution(DistributionSpec::TwoValue { h1: need(s.h1, "h1")?, h2: need(s.h2, "h2")? }),
        "diluted" => CouplingSource::Distribution(DistributionSpec::Diluted {
            h: need(s.h, "h")?,
            dilution: need(s.dilution, "dilution")?,
        }),
        "signed_random" => CouplingSource::Distribution(DistributionSpec::SignedRandom { h: need(s.h, "h")?, q: need(s.q, "q")? }),
        _ => {
            let file = s.file.as_ref().ok_or_else(|| cx.err(sec, "distribution", "distribution file needs `file`"))?;
            let path = if file.is_absolute() { file.clone() } else { base.join(file) };
            let text = std::fs::read_to_string(&path)
                .map_err(|e| cx.err(sec, "file", format!("cannot read {}: {e}", path.display())))?;
            let config = CouplingConfig::from_text(&text).map_err(|e| cx.err(sec, "file", e.to_string()))?;
            if distances.iter().any(|&d| d != config.distance()) {
                return Err(cx.err(sec, "file", format!("coupling file is for distance {}", config.distance())));
            }
            CouplingSource::File(config)
        }
    };
    if s.file.is_some() && name != "file" {
        return Err(cx.err(sec, "file", "`file` requires distribution = \"file\""));
    }
    if let CouplingSource::Distribution(spec) = &source {
        spec.validate().map_err(|e| cx.err(sec, "distribution", e.to_string()))?;
    }
    let draws = s.draws.unwrap_or(1);
    if draws == 0 {
        return Err(cx.err(sec, "draws", "draws must be at least 1"));
    }
    let random = matches!(&source, CouplingSource::Distribution(spec) if !matches!(spec, DistributionSpec::Homogeneous { .. }));
    if draws > 1 && !random {
        return Err(cx.err(sec, "draws", "draws > 1 needs a random distribution"));
    }

    let sweep = match (&s.scan_parameter, &s.scan_values, &s.scan_range) {
        (None, None, None) => None,
        (None, _, _) => return Err(cx.err(sec, "scan_parameter", "a sweep needs `scan_parameter`")),
        (Some(_), Some(_), Some(_)) => {
            return Err(cx.err(sec, "scan_range", "give `scan_values` or `scan_range`, not both"))
        }
        (Some(_), None, None) => return Err(cx.err(sec, "scan_parameter", "a sweep needs `scan_values` or `scan_range`")),
        (Some(p), values, range) => {
            let param = match (p.as_str(), name) {
                ("h", "homogeneous" | "diluted" | "signed_random") => SweepParameter::H,
                ("j", "homogeneous") => SweepParameter::J,
                ("h1", "two_value") => SweepParameter::H1,
                ("h2", "two_value") => SweepParameter::H2,
                ("h12", "two_value") => SweepParameter::H12,
                ("dilution", "diluted") => SweepParameter::Dilution,
                ("q", "signed_random") => SweepParameter::Q,
                _ => {
                    return Err(cx.err(sec, "scan_parameter", format!("`{p}` cannot be swept for distribution {name}")))
                }
            };
            let values = match (values, range) {
                (Some(v), _) => v.clone(),
                (None, Some([start, stop, step])) => {
                    if step.is_nan() || *step <= 0.0 || stop < start {
                        return Err(cx.err(sec, "scan_range", "scan_range needs start <= stop and step > 0"));
                    }
                    let n = ((stop - start) / step + 1e-9).floor() as usize;
                    // Rounded to 12 digits so 0.15 + 7*0.01 prints as 0.22.
                    (0..=n).map(|k| ((start + step * k as f64) * 1e12).round() / 1e12).collect()
                }
                (None, None) => unreachable!(),
            };
            if values.is_empty() || values.iter().any(|v| !v.is_finite()) {
                return Err(cx.err(sec, "scan_values", "sweep values must be finite and non-empty"));
            }
            Some((param, values))
        }
    };

    Ok(CouplingPlan {
        source,
        draws,
        field_overrides: s.fields.clone().unwrap_or_default(),
        pair_overrides: s.pairs.clone().unwrap_or_default(),
        sweep,
    })
}

/// Distribution at sweep value `x`.
pub fn swept(spec: DistributionSpec, param: SweepParameter, x: f64) -> DistributionSpec {
    use DistributionSpec as D;
    use SweepParameter as P;
    match (spec, param) {
        (D::Homogeneous { h, j }, P::H) => D::Homogeneous { h: Complex64::new(x, h.im), j },
        (D::Homogeneous { h, j }, P::J) => D::Homogeneous { h, j: Complex64::new(x, j.im) },
        (D::TwoValue { h2, .. }, P::H1) => D::TwoValue { h1: x, h2 },
        (D::TwoValue { h1, .. }, P::H2) => D::TwoValue { h1, h2: x },
        (D::TwoValue { .. }, P::H12) => D::TwoValue { h1: x, h2: x },
        (D::Diluted { dilution, .. }, P::H) => D::Diluted { h: x, dilution },
        (D::Diluted { h, .. }, P::Dilution) => D::Diluted { h, dilution: x },
        (D::SignedRandom { q, .. }, P::H) => D::SignedRandom { h: x, q },
        (D::SignedRandom { h, .. }, P::Q) => D::SignedRandom { h, q: x },
        (other, _) => other,
    }
}
