//! Config loading, field checkpoints, trajectory directories and report files.

use std::fs;
use std::io::{Read, Write};
use std::ops::Range;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use toml::Spanned;

use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::grid::{make_grid, PeriodicGrid};
use crate::mfg::SolverConfig;
use crate::model::{Coupling, CouplingMode, Hamiltonian, MFGProblem, Profile};
use crate::semigroup::Trajectory;

pub const FIELD_MAGIC: &[u8; 4] = b"FMFG";
pub const FIELD_VERSION: u32 = 1;
const HEADER_LEN: usize = 4 + 4 + 4 + 4 + 8 + 8;

pub const CODE_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    d: Spanned<usize>,
    n: Spanned<usize>,
    s: Spanned<f64>,
    #[serde(default)]
    sigma: Option<Spanned<f64>>,
    #[serde(rename = "T")]
    horizon: Spanned<f64>,
    #[serde(rename = "Nt", default)]
    nt: Option<Spanned<usize>>,
    gamma: Spanned<f64>,
    c_field: Spanned<Profile>,
    kernel: Spanned<KernelSection>,
    #[serde(default)]
    coupling_mode: Option<Spanned<String>>,
    m0: Spanned<Profile>,
    #[serde(rename = "uT")]
    u_t: Spanned<Profile>,
    #[serde(default)]
    solver: Option<Spanned<SolverConfig>>,
    #[serde(default)]
    seed: u64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct KernelSection {
    kappa: f64,
    #[serde(default = "unit")]
    amplitude: f64,
}

fn unit() -> f64 {
    1.0
}

/// A validated experiment description.
#[derive(Clone, Debug)]
pub struct LoadedConfig {
    pub problem: MFGProblem,
    pub solver: SolverConfig,
    pub seed: u64,
    /// Hex SHA-256 of the config file bytes.
    pub config_hash: String,
    pub path: PathBuf,
}

fn line_of(text: &str, span: &Range<usize>) -> usize {
    text[..span.start.min(text.len())].matches('\n').count() + 1
}

/// Parses and validates a TOML experiment config.
///
/// An unreadable file is `Error::Io`. Every other failure is `Error::Config`
/// with the 1-based line of the offending key; assumption violations keep the
/// assumption's name.
pub fn load_config(path: impl AsRef<Path>) -> Result<LoadedConfig> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    parse_config(&text, path)
}

/// [`load_config`] on an in-memory document; `path` is only used in messages.
pub fn parse_config(text: &str, path: &Path) -> Result<LoadedConfig> {
    let fail = |span: &Range<usize>, msg: String| Error::Config {
        path: path.to_path_buf(),
        message: format!("line {}: {msg}", line_of(text, span)),
    };
    let raw: RawConfig = toml::from_str(text).map_err(|e| {
        let msg = e.message().to_string();
        match e.span() {
            Some(span) => fail(&span, msg),
            None => Error::Config { path: path.to_path_buf(), message: msg },
        }
    })?;

    let grid = make_grid(*raw.d.get_ref(), *raw.n.get_ref()).map_err(|e| fail(&raw.n.span(), e.to_string()))?;
    let s = *raw.s.get_ref();
    if !(s > 0.0 && s < 1.0) {
        return Err(fail(&raw.s.span(), format!("assumption s ∈ (0,1) violated: s = {s}")));
    }
    let sigma = raw.sigma.as_ref().map_or(0.0, |v| *v.get_ref());
    if !(sigma >= 0.0 && sigma.is_finite()) {
        let span = raw.sigma.as_ref().unwrap().span();
        return Err(fail(&span, format!("sigma must be nonnegative, got {sigma}")));
    }
    let horizon = *raw.horizon.get_ref();
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(fail(&raw.horizon.span(), format!("T must be positive, got {horizon}")));
    }

    let sample = |p: &Spanned<Profile>| p.get_ref().sample(&grid).map_err(|e| fail(&p.span(), e.to_string()));
    let c = sample(&raw.c_field)?;
    let ham = Hamiltonian::new(*raw.gamma.get_ref(), c).map_err(|e| {
        let span = match &e {
            Error::Assumption { assumption, .. } if assumption.contains('γ') => raw.gamma.span(),
            _ => raw.c_field.span(),
        };
        fail(&span, e.to_string())
    })?;

    let mode = match &raw.coupling_mode {
        Some(m) => m.get_ref().parse::<CouplingMode>().map_err(|e| fail(&m.span(), e.to_string()))?,
        None => CouplingMode::default(),
    };
    let kernel = raw.kernel.get_ref();
    let coupling =
        Coupling::gaussian(&grid, kernel.kappa, kernel.amplitude, mode).map_err(|e| fail(&raw.kernel.span(), e.to_string()))?;

    let m0 = sample(&raw.m0)?;
    let u_t = sample(&raw.u_t)?;
    crate::model::problem::check_initial_density(&m0).map_err(|e| fail(&raw.m0.span(), e.to_string()))?;
    let problem = MFGProblem::new(s, sigma, horizon, ham, coupling, m0, u_t).map_err(|e| fail(&raw.s.span(), e.to_string()))?;

    let mut solver = raw.solver.as_ref().map(|v| *v.get_ref()).unwrap_or_default();
    if let Some(nt) = &raw.nt {
        solver.nt = *nt.get_ref();
    }
    solver.validate().map_err(|e| {
        let span = match (&raw.nt, &raw.solver) {
            (Some(nt), _) if e.to_string().contains("nt") => nt.span(),
            (_, Some(sv)) => sv.span(),
            (Some(nt), None) => nt.span(),
            (None, None) => 0..0,
        };
        fail(&span, e.to_string())
    })?;

    Ok(LoadedConfig {
        problem,
        solver,
        seed: raw.seed,
        config_hash: sha256_hex(text.as_bytes()),
        path: path.to_path_buf(),
    })
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Header of a field checkpoint.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FieldHeader {
    pub dim: usize,
    pub n: usize,
    pub s: f64,
    pub time: f64,
}

pub fn write_field<W: Write>(w: &mut W, f: &SpectralField, s: f64, time: f64) -> Result<()> {
    let g = f.grid();
    let mut buf = Vec::with_capacity(HEADER_LEN + 8 * g.len());
    buf.extend_from_slice(FIELD_MAGIC);
    buf.extend_from_slice(&FIELD_VERSION.to_le_bytes());
    buf.extend_from_slice(&(g.dim() as u32).to_le_bytes());
    buf.extend_from_slice(&(g.n() as u32).to_le_bytes());
    buf.extend_from_slice(&s.to_le_bytes());
    buf.extend_from_slice(&time.to_le_bytes());
    for v in f.values() {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    w.write_all(&buf)?;
    Ok(())
}

fn take<'a>(bytes: &'a [u8], at: &mut usize, len: usize) -> Result<&'a [u8]> {
    let end = *at + len;
    if end > bytes.len() {
        return Err(Error::Format(format!("unexpected EOF at byte {} (need {end})", bytes.len())));
    }
    let out = &bytes[*at..end];
    *at = end;
    Ok(out)
}

pub fn read_field<R: Read>(r: &mut R) -> Result<(FieldHeader, SpectralField)> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    let mut at = 0;
    if take(&bytes, &mut at, 4)? != FIELD_MAGIC {
        return Err(Error::Format("bad magic (expected FMFG)".into()));
    }
    let u32_at = |at: &mut usize| -> Result<u32> { Ok(u32::from_le_bytes(take(&bytes, at, 4)?.try_into().unwrap())) };
    let f64_at = |at: &mut usize| -> Result<f64> { Ok(f64::from_le_bytes(take(&bytes, at, 8)?.try_into().unwrap())) };
    let version = u32_at(&mut at)?;
    if version != FIELD_VERSION {
        return Err(Error::Format(format!("unsupported version {version} (expected {FIELD_VERSION})")));
    }
    let dim = u32_at(&mut at)? as usize;
    let n = u32_at(&mut at)? as usize;
    let s = f64_at(&mut at)?;
    let time = f64_at(&mut at)?;
    let grid = PeriodicGrid::new(dim, n).map_err(|e| Error::Format(format!("bad header: {e}")))?;
    let values = (0..grid.len()).map(|_| f64_at(&mut at)).collect::<Result<Vec<_>>>()?;
    if at != bytes.len() {
        return Err(Error::Format(format!("{} trailing bytes after payload", bytes.len() - at)));
    }
    let field = SpectralField::from_values(&grid, values)?;
    Ok((FieldHeader { dim, n, s, time }, field))
}

pub fn save_field(f: &SpectralField, s: f64, time: f64, path: impl AsRef<Path>) -> Result<()> {
    let mut file = fs::File::create(path)?;
    write_field(&mut file, f, s, time)
}

pub fn load_field(path: impl AsRef<Path>) -> Result<(FieldHeader, SpectralField)> {
    read_field(&mut fs::File::open(path)?)
}

/// Loads a field and checks it lives on `grid`.
pub fn load_field_on(path: impl AsRef<Path>, grid: &PeriodicGrid) -> Result<(FieldHeader, SpectralField)> {
    let (h, f) = load_field(path)?;
    if h.dim != grid.dim() || h.n != grid.n() {
        return Err(Error::Format(format!(
            "dimension mismatch: file has d={} n={}, expected d={} n={}",
            h.dim,
            h.n,
            grid.dim(),
            grid.n()
        )));
    }
    Ok((h, f))
}

/// Sidecar of a trajectory directory.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryManifest {
    #[serde(rename = "T")]
    pub horizon: f64,
    #[serde(rename = "Nt")]
    pub nt: usize,
    pub s: f64,
    pub sigma: f64,
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<Provenance>,
}

fn step_name(i: usize) -> String {
    format!("step_{i:05}.fmfg")
}

/// Writes one checkpoint per time level plus `manifest.json`.
pub fn save_trajectory(traj: &Trajectory, dir: impl AsRef<Path>, manifest: &TrajectoryManifest) -> Result<()> {
    let dir = dir.as_ref();
    if manifest.nt != traj.nt() || manifest.horizon != traj.horizon() {
        return Err(Error::invalid("trajectory manifest disagrees with the trajectory"));
    }
    fs::create_dir_all(dir)?;
    for (i, f) in traj.fields().iter().enumerate() {
        save_field(f, manifest.s, traj.time(i), dir.join(step_name(i)))?;
    }
    write_json(dir.join("manifest.json"), manifest)
}

pub fn load_trajectory(dir: impl AsRef<Path>) -> Result<(TrajectoryManifest, Trajectory)> {
    let dir = dir.as_ref();
    let manifest: TrajectoryManifest = serde_json::from_slice(&fs::read(dir.join("manifest.json"))?)?;
    let mut fields = Vec::with_capacity(manifest.nt + 1);
    for i in 0..=manifest.nt {
        let (_, f) = load_field(dir.join(step_name(i)))?;
        fields.push(f);
    }
    Ok((manifest.clone(), Trajectory::new(manifest.horizon, fields)?))
}

/// Reproducibility stamp carried by every emitted artifact.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub seed: u64,
    pub config_hash: String,
    pub code_version: String,
}

impl Provenance {
    pub fn new(seed: u64, config_hash: impl Into<String>) -> Self {
        Self { seed, config_hash: config_hash.into(), code_version: CODE_VERSION.to_string() }
    }

    fn csv_preamble(&self) -> String {
        format!("# seed={} config_hash={} code_version={}\n", self.seed, self.config_hash, self.code_version)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Solve,
    Sweep,
    Picard,
    Uniqueness,
    Verify,
    Semigroup,
}

/// Run record written as `manifest.json` in the output directory.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentManifest {
    pub command: Command,
    pub config_path: PathBuf,
    pub output_dir: PathBuf,
    pub seed: u64,
    /// Seconds since the Unix epoch. The only field that differs between
    /// repeated runs.
    pub created_at: u64,
    pub code_version: String,
    pub config_hash: String,
    pub pass: bool,
}

/// Pretty JSON with a trailing newline.
pub fn write_json<T: Serialize>(path: impl AsRef<Path>, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

/// JSON report wrapping `body` with the provenance stamp.
pub fn write_report<T: Serialize>(path: impl AsRef<Path>, prov: &Provenance, body: &T) -> Result<()> {
    #[derive(Serialize)]
    struct Stamped<'a, T> {
        #[serde(flatten)]
        provenance: &'a Provenance,
        report: &'a T,
    }
    write_json(path, &Stamped { provenance: prov, report: body })
}

/// CSV with a `# seed=… config_hash=… code_version=…` comment line first.
pub fn write_csv(path: impl AsRef<Path>, prov: &Provenance, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut out = prov.csv_preamble().into_bytes();
    {
        let mut w = csv::Writer::from_writer(&mut out);
        w.write_record(header)?;
        for row in rows {
            w.write_record(row)?;
        }
        w.flush()?;
    }
    fs::write(path, out)?;
    Ok(())
}

/// Shortest round-trip decimal for CSV cells.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:?}")
}
