//! Flat `key = value` run configuration with dotted key paths.
//!
//! Blank lines and lines starting with `#` are ignored. Every key is
//! optional; see `docs/config.md` for the key reference and defaults.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use serde::Serialize;

use crate::conditions::ConditionParams;
use crate::dynamics::IntegratorConfig;
use crate::error::{Error, Result};
use crate::fields::{
    generate_initial, to_elsasser, ElsasserState, FluidParams, InitialDataSpec, InitialKind,
    NormName, TargetNorm,
};
use crate::spectral::Grid;

/// Every accepted run key, in canonical order.
pub const RUN_KEYS: &[&str] = &[
    "grid.n",
    "params.re",
    "params.rm",
    "params.s",
    "params.kappa",
    "params.lambda_ratio",
    "initial.kind",
    "initial.amplitude",
    "initial.seed",
    "initial.k0",
    "initial.target_norm",
    "initial.magnetic_ratio",
    "initial.magnetic_perturbation",
    "integrator.dt",
    "integrator.t_end",
    "integrator.cfl_safety",
    "integrator.blowup_threshold",
    "integrator.monitor_every",
    "conditions.epsilon0",
    "conditions.c0",
    "output.directory",
    "output.formats",
    "verify.checks",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Csv,
    Checkpoint,
    Json,
}

impl OutputFormat {
    pub fn name(&self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Checkpoint => "checkpoint",
            OutputFormat::Json => "json",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        match s {
            "csv" => Some(OutputFormat::Csv),
            "checkpoint" => Some(OutputFormat::Checkpoint),
            "json" => Some(OutputFormat::Json),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OutputConfig {
    pub directory: PathBuf,
    pub formats: Vec<OutputFormat>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VerifyCheck {
    Heat,
    AprioriThm1,
    AprioriThm2,
    Energy,
    Scaling,
    Convergence,
}

impl VerifyCheck {
    pub const ALL: [VerifyCheck; 6] = [
        VerifyCheck::Heat,
        VerifyCheck::AprioriThm1,
        VerifyCheck::AprioriThm2,
        VerifyCheck::Energy,
        VerifyCheck::Scaling,
        VerifyCheck::Convergence,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            VerifyCheck::Heat => "heat",
            VerifyCheck::AprioriThm1 => "apriori_thm1",
            VerifyCheck::AprioriThm2 => "apriori_thm2",
            VerifyCheck::Energy => "energy",
            VerifyCheck::Scaling => "scaling",
            VerifyCheck::Convergence => "convergence",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.name() == s)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub grid: Grid,
    pub params: FluidParams,
    pub initial: InitialDataSpec,
    pub integrator: IntegratorConfig,
    pub conditions: ConditionParams,
    pub output: OutputConfig,
    pub verify: Vec<VerifyCheck>,
}

impl Default for RunConfig {
    fn default() -> Self {
        parse_config("").expect("defaults are valid")
    }
}

impl RunConfig {
    /// Initial Elsasser state: the generated `(u, B)` with `B` scaled by
    /// `√S`.
    pub fn initial_state(&self) -> Result<ElsasserState> {
        let prim = generate_initial(&self.initial, self.grid)?;
        to_elsasser(&prim.absorb_coupling(&self.params))
    }

    /// All keys with their effective values, one `key = value` per line in
    /// canonical order. Parsing the result yields an equal config.
    pub fn canonical_text(&self) -> String {
        let mut out = String::new();
        let mut put = |k: &str, v: String| {
            let _ = writeln!(out, "{k} = {v}");
        };
        put("grid.n", self.grid.n().to_string());
        put("params.re", self.params.re().to_string());
        put("params.rm", self.params.rm().to_string());
        put("params.s", self.params.s_coupling().to_string());
        put("initial.kind", self.initial.kind.name().into());
        put("initial.amplitude", self.initial.amplitude.to_string());
        put("initial.seed", self.initial.seed.to_string());
        put("initial.k0", self.initial.k0.to_string());
        put(
            "initial.target_norm",
            match &self.initial.target_norm {
                Some(t) => format!("{}:{}", t.norm.name(), t.value),
                None => "none".into(),
            },
        );
        put(
            "initial.magnetic_ratio",
            self.initial.magnetic_ratio.to_string(),
        );
        put(
            "initial.magnetic_perturbation",
            self.initial.magnetic_perturbation.to_string(),
        );
        put("integrator.dt", self.integrator.dt.to_string());
        put("integrator.t_end", self.integrator.t_end.to_string());
        put(
            "integrator.cfl_safety",
            self.integrator.cfl_safety.to_string(),
        );
        put(
            "integrator.blowup_threshold",
            self.integrator.blowup_threshold.to_string(),
        );
        put(
            "integrator.monitor_every",
            self.integrator.monitor_every.to_string(),
        );
        put("conditions.epsilon0", self.conditions.epsilon0.to_string());
        put("conditions.c0", self.conditions.c0.to_string());
        put(
            "output.directory",
            self.output.directory.display().to_string(),
        );
        put(
            "output.formats",
            join(self.output.formats.iter().map(|f| f.name())),
        );
        put("verify.checks", join(self.verify.iter().map(|c| c.name())));
        out
    }

    /// 64-bit FNV-1a hash of [`canonical_text`](Self::canonical_text), in hex.
    pub fn digest(&self) -> String {
        format!("{:016x}", fnv1a(self.canonical_text().as_bytes()))
    }
}

fn join<'a>(items: impl Iterator<Item = &'a str>) -> String {
    items.collect::<Vec<_>>().join(",")
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Splits text into `(key, value)` entries in file order. Duplicate keys
/// and lines without `=` are errors.
pub fn parse_entries(text: &str) -> Result<Vec<(String, String)>> {
    let mut entries: Vec<(String, String)> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(Error::config(
                format!("line {}", lineno + 1),
                format!("expected `key = value`, got `{line}`"),
            ));
        };
        let key = k.trim().to_string();
        if key.is_empty() {
            return Err(Error::config(format!("line {}", lineno + 1), "empty key"));
        }
        if entries.iter().any(|(existing, _)| *existing == key) {
            return Err(Error::config(key, "duplicate key"));
        }
        entries.push((key, v.trim().to_string()));
    }
    Ok(entries)
}

/// Parses and validates a run configuration.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let entries = parse_entries(text)?;
    for (k, _) in &entries {
        if !RUN_KEYS.contains(&k.as_str()) {
            return Err(Error::config(k.clone(), "unknown key"));
        }
    }
    config_from_entries(&entries.into_iter().collect())
}

pub(crate) fn config_from_entries(map: &BTreeMap<String, String>) -> Result<RunConfig> {
    let r = Reader { map };

    let n: usize = r.get("grid.n", 32)?;
    let grid = Grid::new(n)
        .map_err(|_| Error::config("grid.n", format!("n must be a power of two >= 8, got {n}")))?;

    let params = read_params(&r)?;
    let initial = read_initial(&r, grid)?;
    let integrator = read_integrator(&r)?;

    let epsilon0: f64 = r.get("conditions.epsilon0", 0.01)?;
    r.ensure(
        epsilon0 > 0.0 && epsilon0 < 0.5,
        "conditions.epsilon0",
        format!("epsilon0 must be in (0, 0.5), got {epsilon0}"),
    )?;
    let c0: f64 = r.get("conditions.c0", 1.0)?;
    r.ensure(
        c0 > 0.0 && c0.is_finite(),
        "conditions.c0",
        format!("c0 must be > 0, got {c0}"),
    )?;

    let directory = PathBuf::from(r.raw("output.directory").unwrap_or("out"));
    let formats = r.list("output.formats", "csv,checkpoint,json", OutputFormat::parse)?;
    let verify = r.list(
        "verify.checks",
        "heat,apriori_thm1,apriori_thm2,energy",
        VerifyCheck::parse,
    )?;

    Ok(RunConfig {
        grid,
        params,
        initial,
        integrator,
        conditions: ConditionParams { epsilon0, c0 },
        output: OutputConfig { directory, formats },
        verify,
    })
}

fn read_params(r: &Reader) -> Result<FluidParams> {
    let s: f64 = r.get("params.s", 1.0)?;
    r.ensure(
        s >= 0.0 && s.is_finite(),
        "params.s",
        format!("s must be >= 0, got {s}"),
    )?;
    let diffusive = r.raw("params.kappa").is_some() || r.raw("params.lambda_ratio").is_some();
    if diffusive {
        for key in ["params.re", "params.rm"] {
            if r.raw(key).is_some() {
                return Err(Error::config(
                    key,
                    "cannot be combined with params.kappa / params.lambda_ratio",
                ));
            }
        }
        let kappa: f64 = r.get("params.kappa", 1.0)?;
        r.ensure(
            kappa > 0.0 && kappa.is_finite(),
            "params.kappa",
            format!("kappa must be > 0, got {kappa}"),
        )?;
        let ratio: f64 = r.get("params.lambda_ratio", 0.0)?;
        r.ensure(
            ratio.abs() < 1.0,
            "params.lambda_ratio",
            format!("lambda_ratio must be in (-1, 1), got {ratio}"),
        )?;
        return FluidParams::from_diffusivities(kappa, ratio * kappa, s)
            .map_err(|e| Error::config("params.kappa", e.to_string()));
    }
    let re: f64 = r.get("params.re", 100.0)?;
    r.ensure(
        re > 0.0 && re.is_finite(),
        "params.re",
        format!("re must be > 0, got {re}"),
    )?;
    let rm: f64 = r.get("params.rm", 100.0)?;
    r.ensure(
        rm > 0.0 && rm.is_finite(),
        "params.rm",
        format!("rm must be > 0, got {rm}"),
    )?;
    FluidParams::new(re, rm, s).map_err(|e| Error::config("params.re", e.to_string()))
}

fn read_initial(r: &Reader, grid: Grid) -> Result<InitialDataSpec> {
    let kind_text = r.raw("initial.kind").unwrap_or("taylor-green");
    let kind = InitialKind::parse(kind_text).ok_or_else(|| {
        Error::config(
            "initial.kind",
            format!("expected taylor-green, single-mode or random-solenoidal, got `{kind_text}`"),
        )
    })?;
    let amplitude: f64 = r.get("initial.amplitude", 1.0)?;
    r.ensure(
        amplitude.is_finite(),
        "initial.amplitude",
        format!("amplitude must be finite, got {amplitude}"),
    )?;
    let seed: u64 = r.get("initial.seed", 0)?;
    let k0: u32 = r.get("initial.k0", 1)?;
    let kk = k0 as i64;
    r.ensure(
        k0 >= 1 && grid.is_resolved([kk, kk, kk]),
        "initial.k0",
        format!(
            "k0 must be in 1..={} for n={}, got {k0}",
            grid.n() / 3,
            grid.n()
        ),
    )?;
    let target_norm = match r.raw("initial.target_norm") {
        None | Some("none") => None,
        Some(text) => Some(parse_target(text)?),
    };
    let magnetic_ratio: f64 = r.get("initial.magnetic_ratio", 0.0)?;
    r.ensure(
        magnetic_ratio.is_finite(),
        "initial.magnetic_ratio",
        "magnetic_ratio must be finite",
    )?;
    let magnetic_perturbation: f64 = r.get("initial.magnetic_perturbation", 0.0)?;
    r.ensure(
        magnetic_perturbation.is_finite(),
        "initial.magnetic_perturbation",
        "magnetic_perturbation must be finite",
    )?;
    let spec = InitialDataSpec {
        kind,
        amplitude,
        seed,
        k0,
        target_norm,
        magnetic_ratio,
        magnetic_perturbation,
    };
    spec.validate(grid)
        .map_err(|e| Error::config("initial", e.to_string()))?;
    Ok(spec)
}

fn parse_target(text: &str) -> Result<TargetNorm> {
    const KEY: &str = "initial.target_norm";
    let bad = || {
        Error::config(
            KEY,
            format!("expected `l2:<v>`, `l3:<v>` or `h12:<v>`, got `{text}`"),
        )
    };
    let (name, value) = text.split_once(':').ok_or_else(bad)?;
    let norm = NormName::parse(name.trim()).ok_or_else(bad)?;
    let value: f64 = value.trim().parse().map_err(|_| bad())?;
    if !(value >= 0.0 && value.is_finite()) {
        return Err(Error::config(
            KEY,
            format!("target value must be >= 0, got {value}"),
        ));
    }
    Ok(TargetNorm { norm, value })
}

fn read_integrator(r: &Reader) -> Result<IntegratorConfig> {
    let d = IntegratorConfig::default();
    let dt: f64 = r.get("integrator.dt", d.dt)?;
    r.ensure(
        dt > 0.0 && dt.is_finite(),
        "integrator.dt",
        format!("dt must be > 0, got {dt}"),
    )?;
    let t_end: f64 = r.get("integrator.t_end", d.t_end)?;
    r.ensure(
        t_end >= 0.0 && t_end.is_finite(),
        "integrator.t_end",
        format!("t_end must be >= 0, got {t_end}"),
    )?;
    let cfl_safety: f64 = r.get("integrator.cfl_safety", d.cfl_safety)?;
    r.ensure(
        cfl_safety > 0.0 && cfl_safety <= 1.0,
        "integrator.cfl_safety",
        format!("cfl_safety must be in (0, 1], got {cfl_safety}"),
    )?;
    let blowup_threshold: f64 = r.get("integrator.blowup_threshold", d.blowup_threshold)?;
    r.ensure(
        blowup_threshold > 0.0,
        "integrator.blowup_threshold",
        format!("blowup_threshold must be > 0, got {blowup_threshold}"),
    )?;
    let monitor_every: usize = r.get("integrator.monitor_every", d.monitor_every)?;
    r.ensure(
        monitor_every >= 1,
        "integrator.monitor_every",
        "monitor_every must be >= 1",
    )?;
    Ok(IntegratorConfig {
        dt,
        t_end,
        cfl_safety,
        blowup_threshold,
        monitor_every,
    })
}

struct Reader<'a> {
    map: &'a BTreeMap<String, String>,
}

impl Reader<'_> {
    fn raw(&self, key: &str) -> Option<&str> {
        self.map.get(key).map(String::as_str)
    }

    fn get<T: FromStr>(&self, key: &str, default: T) -> Result<T> {
        match self.raw(key) {
            None => Ok(default),
            Some(text) => text.parse().map_err(|_| {
                Error::config(
                    key,
                    format!("cannot parse `{text}` as {}", short_type::<T>()),
                )
            }),
        }
    }

    fn list<T>(
        &self,
        key: &str,
        default: &str,
        parse: impl Fn(&str) -> Option<T>,
    ) -> Result<Vec<T>> {
        let text = self.raw(key).unwrap_or(default);
        text.split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|item| {
                parse(item).ok_or_else(|| Error::config(key, format!("unknown entry `{item}`")))
            })
            .collect()
    }

    fn ensure(&self, ok: bool, key: &str, message: impl Into<String>) -> Result<()> {
        if ok {
            Ok(())
        } else {
            Err(Error::config(key, message))
        }
    }
}

fn short_type<T>() -> &'static str {
    let name = std::any::type_name::<T>();
    match name {
        "f64" => "a number",
        "usize" | "u64" | "u32" => "a non-negative integer",
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn key_of(err: Error) -> String {
        match err {
            Error::Config { key, .. } => key,
            other => panic!("expected a config error, got {other}"),
        }
    }

    #[test]
    fn empty_config_uses_defaults() {
        let c = parse_config("# nothing\n\n").unwrap();
        assert_eq!(c.conditions.epsilon0, 0.01);
        assert_eq!(c.conditions.c0, 1.0);
        assert_eq!(c.integrator.cfl_safety, 0.5);
        assert_eq!(c.grid.n(), 32);
        assert_eq!(c.params.re(), 100.0);
    }

    #[test]
    fn rejects_non_power_of_two() {
        let err = parse_config("grid.n = 24").unwrap_err();
        assert!(err.to_string().contains("grid.n"));
        assert!(err.to_string().contains("power of two"));
    }

    #[test]
    fn rejects_zero_reynolds() {
        let err = parse_config("params.re = 0").unwrap_err();
        assert!(err.to_string().contains("re must be > 0"));
        assert_eq!(key_of(err), "params.re");
    }

    #[test]
    fn rejects_unknown_and_duplicate_keys() {
        assert_eq!(key_of(parse_config("grid.m = 8").unwrap_err()), "grid.m");
        assert_eq!(
            key_of(parse_config("grid.n = 8\ngrid.n = 16").unwrap_err()),
            "grid.n"
        );
    }

    #[test]
    fn rejects_unparseable_values() {
        let err = parse_config("integrator.dt = fast").unwrap_err();
        assert!(err.to_string().contains("`fast`"));
        assert_eq!(key_of(err), "integrator.dt");
        assert_eq!(key_of(parse_config("grid.n").unwrap_err()), "line 1");
    }

    #[test]
    fn rejects_mixed_parameterizations() {
        let err = parse_config("params.re = 2\nparams.kappa = 1").unwrap_err();
        assert_eq!(key_of(err), "params.re");
    }

    #[test]
    fn diffusivity_form() {
        let c = parse_config("params.kappa = 2\nparams.lambda_ratio = 0.1").unwrap();
        assert!((c.params.kappa() - 2.0).abs() < 1e-12);
        assert!((c.params.lambda() - 0.2).abs() < 1e-12);
    }

    #[test]
    fn canonical_text_round_trips() {
        let text = "grid.n = 16\nparams.re = 3.5\ninitial.kind = random-solenoidal\n\
                    initial.seed = 7\ninitial.k0 = 2\ninitial.target_norm = h12:0.25\n\
                    output.formats = csv\nverify.checks = heat,scaling";
        let c = parse_config(text).unwrap();
        let again = parse_config(&c.canonical_text()).unwrap();
        assert_eq!(c, again);
        assert_eq!(c.digest(), again.digest());
        assert_ne!(c.digest(), RunConfig::default().digest());
    }

    #[test]
    fn rejects_bad_target_and_k0() {
        assert_eq!(
            key_of(parse_config("initial.target_norm = l4:1").unwrap_err()),
            "initial.target_norm"
        );
        assert_eq!(
            key_of(parse_config("grid.n = 8\ninitial.k0 = 3").unwrap_err()),
            "initial.k0"
        );
    }
}
