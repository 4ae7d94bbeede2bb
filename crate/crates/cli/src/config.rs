//! Line-oriented `key = value` configuration with `[section]` headers.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use resonance_core::numerics::Tolerances;
use resonance_core::scattering::PiecewisePotential;
use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
#[error("{}", match .line { Some(l) => format!("line {l}: {message}"), None => message.clone() })]
pub struct ConfigError {
    pub line: Option<usize>,
    pub message: String,
}

impl ConfigError {
    pub fn at(line: usize, message: impl Into<String>) -> Self {
        Self { line: Some(line), message: message.into() }
    }

    pub fn general(message: impl Into<String>) -> Self {
        Self { line: None, message: message.into() }
    }
}

#[derive(Debug, Clone, PartialEq)]
struct Entry {
    value: String,
    line: usize,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Section {
    header_line: usize,
    entries: BTreeMap<String, Entry>,
}

/// Parsed file: sections by name, keys by name. Keys before any header land in the
/// unnamed section `""`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigFile {
    sections: BTreeMap<String, Section>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut sections: BTreeMap<String, Section> = BTreeMap::new();
        let mut current = String::new();
        for (index, raw) in text.lines().enumerate() {
            let line_no = index + 1;
            let line = strip_comment(raw).trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| ConfigError::at(line_no, format!("unterminated section header `{line}`")))?
                    .trim()
                    .to_ascii_lowercase();
                if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-') {
                    return Err(ConfigError::at(line_no, format!("invalid section name `{name}`")));
                }
                if sections.contains_key(&name) {
                    return Err(ConfigError::at(line_no, format!("section [{name}] appears twice")));
                }
                sections.insert(name.clone(), Section { header_line: line_no, entries: BTreeMap::new() });
                current = name;
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| ConfigError::at(line_no, format!("expected `key = value`, found `{line}`")))?;
            let key = key.trim().to_ascii_lowercase();
            if key.is_empty() {
                return Err(ConfigError::at(line_no, "missing key before `=`"));
            }
            let section = sections.entry(current.clone()).or_default();
            if section.entries.contains_key(&key) {
                return Err(ConfigError::at(line_no, format!("key `{key}` repeated in [{current}]")));
            }
            section.entries.insert(key, Entry { value: value.trim().to_string(), line: line_no });
        }
        Ok(Self { sections })
    }

    pub fn has_section(&self, name: &str) -> bool {
        self.sections.contains_key(name)
    }

    /// Fails on sections or keys outside `allowed`, a list of `(section, keys)`.
    pub fn check_known(&self, allowed: &[(&str, &[&str])]) -> Result<(), ConfigError> {
        for (name, section) in &self.sections {
            let Some((_, keys)) = allowed.iter().find(|(s, _)| s == name) else {
                let line = section.entries.values().map(|e| e.line).min().unwrap_or(section.header_line);
                let shown = if name.is_empty() { "(top level)".to_string() } else { format!("[{name}]") };
                return Err(ConfigError::at(line.max(section.header_line), format!("unexpected section {shown}")));
            };
            for (key, entry) in &section.entries {
                if !keys.contains(&key.as_str()) {
                    return Err(ConfigError::at(entry.line, format!("unknown key `{key}` in [{name}]")));
                }
            }
        }
        Ok(())
    }

    fn entry(&self, section: &str, key: &str) -> Option<&Entry> {
        self.sections.get(section).and_then(|s| s.entries.get(key))
    }

    pub fn line_of(&self, section: &str, key: &str) -> Option<usize> {
        self.entry(section, key).map(|e| e.line)
    }

    pub fn string(&self, section: &str, key: &str) -> Option<&str> {
        self.entry(section, key).map(|e| e.value.as_str())
    }

    pub fn f64(&self, section: &str, key: &str) -> Result<Option<f64>, ConfigError> {
        self.entry(section, key).map(|e| parse_f64(&e.value, e.line)).transpose()
    }

    pub fn usize(&self, section: &str, key: &str) -> Result<Option<usize>, ConfigError> {
        self.entry(section, key)
            .map(|e| {
                e.value
                    .parse::<usize>()
                    .map_err(|_| ConfigError::at(e.line, format!("`{key}` must be a non-negative integer, got `{}`", e.value)))
            })
            .transpose()
    }

    pub fn f64_list(&self, section: &str, key: &str) -> Result<Option<Vec<f64>>, ConfigError> {
        self.entry(section, key)
            .map(|e| {
                e.value
                    .split(',')
                    .map(|s| s.trim())
                    .filter(|s| !s.is_empty())
                    .map(|s| parse_f64(s, e.line))
                    .collect::<Result<Vec<_>, _>>()
            })
            .transpose()
    }

    pub fn f64_or(&self, section: &str, key: &str, default: f64) -> Result<f64, ConfigError> {
        Ok(self.f64(section, key)?.unwrap_or(default))
    }

    pub fn usize_or(&self, section: &str, key: &str, default: usize) -> Result<usize, ConfigError> {
        Ok(self.usize(section, key)?.unwrap_or(default))
    }

    /// A value that must be strictly positive, with the line of the offending entry on failure.
    pub fn positive_or(&self, section: &str, key: &str, default: f64) -> Result<f64, ConfigError> {
        let v = self.f64_or(section, key, default)?;
        if !(v > 0.0) {
            return Err(self.error_at(section, key, format!("`{key}` must be positive, got {v}")));
        }
        Ok(v)
    }

    pub fn error_at(&self, section: &str, key: &str, message: impl Into<String>) -> ConfigError {
        match self.line_of(section, key).or_else(|| self.sections.get(section).map(|s| s.header_line)) {
            Some(line) => ConfigError::at(line, message),
            None => ConfigError::general(message),
        }
    }
}

fn strip_comment(line: &str) -> &str {
    match line.find(['#', ';']) {
        Some(i) => &line[..i],
        None => line,
    }
}

fn parse_f64(text: &str, line: usize) -> Result<f64, ConfigError> {
    match text.trim().parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(ConfigError::at(line, format!("expected a finite number, got `{}`", text.trim()))),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Format {
    Csv,
    Json,
    Svg,
}

impl Format {
    pub fn parse_list(text: &str) -> Result<Vec<Format>, String> {
        let mut out = Vec::new();
        for item in text.split(',').map(|s| s.trim().to_ascii_lowercase()).filter(|s| !s.is_empty()) {
            let f = match item.as_str() {
                "csv" => Format::Csv,
                "json" => Format::Json,
                "svg" => Format::Svg,
                other => return Err(format!("unknown output format `{other}` (expected csv, json or svg)")),
            };
            if !out.contains(&f) {
                out.push(f);
            }
        }
        if out.is_empty() {
            return Err("no output formats selected".to_string());
        }
        out.sort();
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub variable: String,
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl Sweep {
    pub fn values(&self) -> Vec<f64> {
        (0..self.points)
            .map(|i| self.min + (self.max - self.min) * i as f64 / (self.points - 1) as f64)
            .collect()
    }
}

/// Options given on the command line that take precedence over the file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub formats: Option<String>,
    pub tol_root: Option<f64>,
    pub tol_quad: Option<f64>,
    pub max_iter: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub file: ConfigFile,
    pub potential: Option<PiecewisePotential>,
    pub sweep: Option<Sweep>,
    pub tolerances: Tolerances,
    pub output_dir: PathBuf,
    pub formats: Vec<Format>,
}

const POTENTIAL_KEYS: &[&str] = &["preset", "breakpoints", "values", "shape", "strength", "width"];
const SWEEP_KEYS: &[&str] = &["variable", "min", "max", "points"];
const TOLERANCE_KEYS: &[&str] = &["root", "step", "quad", "eig", "max_iter"];
const OUTPUT_KEYS: &[&str] = &["directory", "formats"];

impl RunConfig {
    /// Parses and validates a file for a subcommand whose own section is `section`
    /// with the given keys. Relative output directories resolve against `base`.
    pub fn build(
        text: &str,
        section: (&str, &[&str]),
        base: &Path,
        overrides: &Overrides,
    ) -> Result<Self, ConfigError> {
        let file = ConfigFile::parse(text)?;
        file.check_known(&[
            ("potential", POTENTIAL_KEYS),
            ("sweep", SWEEP_KEYS),
            ("tolerances", TOLERANCE_KEYS),
            ("output", OUTPUT_KEYS),
            section,
        ])?;
        let potential = if file.has_section("potential") { Some(parse_potential(&file)?) } else { None };
        let sweep = if file.has_section("sweep") { Some(parse_sweep(&file)?) } else { None };

        let mut tolerances = Tolerances::default();
        tolerances.root_tol = file.f64_or("tolerances", "root", tolerances.root_tol)?;
        tolerances.step_tol = file.f64_or("tolerances", "step", tolerances.step_tol)?;
        tolerances.quad_tol = file.f64_or("tolerances", "quad", tolerances.quad_tol)?;
        tolerances.eig_tol = file.f64_or("tolerances", "eig", tolerances.eig_tol)?;
        tolerances.max_iter = file.usize_or("tolerances", "max_iter", tolerances.max_iter)?;
        if let Some(t) = overrides.tol_root {
            tolerances.root_tol = t;
        }
        if let Some(t) = overrides.tol_quad {
            tolerances.quad_tol = t;
        }
        if let Some(m) = overrides.max_iter {
            tolerances.max_iter = m;
        }
        tolerances.validate().map_err(|e| file.error_at("tolerances", "root", e.to_string()))?;

        let output_dir = match (&overrides.out, file.string("output", "directory")) {
            (Some(dir), _) => dir.clone(),
            (None, Some(dir)) => base.join(dir),
            (None, None) => base.join("out"),
        };
        let formats = match (&overrides.formats, file.string("output", "formats")) {
            (Some(list), _) => Format::parse_list(list).map_err(ConfigError::general)?,
            (None, Some(list)) => Format::parse_list(list).map_err(|m| file.error_at("output", "formats", m))?,
            (None, None) => vec![Format::Csv, Format::Json, Format::Svg],
        };
        Ok(Self { file, potential, sweep, tolerances, output_dir, formats })
    }

    pub fn potential(&self) -> Result<&PiecewisePotential, ConfigError> {
        self.potential.as_ref().ok_or_else(|| ConfigError::general("missing [potential] section"))
    }

    /// The sweep, checked to run over `variable`, or the fallback range.
    pub fn sweep_or(&self, variable: &str, fallback: Sweep) -> Result<Sweep, ConfigError> {
        match &self.sweep {
            Some(s) if s.variable != variable => Err(self.file.error_at(
                "sweep",
                "variable",
                format!("this subcommand sweeps `{variable}`, not `{}`", s.variable),
            )),
            Some(s) => Ok(s.clone()),
            None => Ok(fallback),
        }
    }
}

fn parse_potential(file: &ConfigFile) -> Result<PiecewisePotential, ConfigError> {
    let s = "potential";
    let styles = [
        file.string(s, "preset").is_some(),
        file.string(s, "breakpoints").is_some() || file.string(s, "values").is_some(),
        file.string(s, "shape").is_some(),
    ];
    if styles.iter().filter(|b| **b).count() != 1 {
        return Err(file.error_at(s, "preset", "[potential] needs exactly one of `preset`, `breakpoints`/`values` or `shape`"));
    }
    if let Some(name) = file.string(s, "preset") {
        return match name.to_ascii_lowercase().as_str() {
            "fig5_well" => Ok(PiecewisePotential::fig5_well()),
            "free" => Ok(PiecewisePotential::free()),
            other => Err(file.error_at(s, "preset", format!("unknown preset `{other}` (known: fig5_well, free)"))),
        };
    }
    if let Some(shape) = file.string(s, "shape") {
        let strength = file.f64(s, "strength")?.ok_or_else(|| file.error_at(s, "shape", "`shape` needs `strength`"))?;
        let width = file.f64(s, "width")?.ok_or_else(|| file.error_at(s, "shape", "`shape` needs `width`"))?;
        let built = match shape.to_ascii_lowercase().as_str() {
            "well" => PiecewisePotential::square_well(strength, width),
            "barrier" => PiecewisePotential::square_barrier(strength, width),
            other => return Err(file.error_at(s, "shape", format!("unknown shape `{other}` (known: well, barrier)"))),
        };
        return built.map_err(|e| file.error_at(s, "shape", e.to_string()));
    }
    let breakpoints = file
        .f64_list(s, "breakpoints")?
        .ok_or_else(|| file.error_at(s, "values", "`values` needs `breakpoints`"))?;
    let values = file.f64_list(s, "values")?.ok_or_else(|| file.error_at(s, "breakpoints", "`breakpoints` needs `values`"))?;
    PiecewisePotential::new(breakpoints, values).map_err(|e| file.error_at(s, "breakpoints", e.to_string()))
}

fn parse_sweep(file: &ConfigFile) -> Result<Sweep, ConfigError> {
    let s = "sweep";
    let variable = file
        .string(s, "variable")
        .ok_or_else(|| file.error_at(s, "variable", "[sweep] needs `variable`"))?
        .to_ascii_lowercase();
    let min = file.f64(s, "min")?.ok_or_else(|| file.error_at(s, "min", "[sweep] needs `min`"))?;
    let max = file.f64(s, "max")?.ok_or_else(|| file.error_at(s, "max", "[sweep] needs `max`"))?;
    let points = file.usize(s, "points")?.ok_or_else(|| file.error_at(s, "points", "[sweep] needs `points`"))?;
    if points < 2 {
        return Err(file.error_at(s, "points", format!("sweep needs at least 2 points, got {points}")));
    }
    if !(max > min) {
        return Err(file.error_at(s, "max", format!("sweep max {max} must exceed min {min}")));
    }
    Ok(Sweep { variable, min, max, points })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_sections_and_comments() {
        let text = "# top\n[potential]\npreset = fig5_well ; trailing\n\n[sweep]\nvariable = energy\nmin = 1\nmax = 2\npoints = 3\n";
        let f = ConfigFile::parse(text).unwrap();
        assert_eq!(f.string("potential", "preset"), Some("fig5_well"));
        assert_eq!(f.usize("sweep", "points").unwrap(), Some(3));
        assert_eq!(f.line_of("sweep", "max"), Some(8));
    }

    #[test]
    fn errors_carry_line_numbers() {
        let e = ConfigFile::parse("[a]\nx = 1\nbroken line\n").unwrap_err();
        assert_eq!(e.line, Some(3));
        let e = ConfigFile::parse("[a]\nx = 1\nx = 2\n").unwrap_err();
        assert_eq!(e.line, Some(3));
        let f = ConfigFile::parse("[a]\nx = one\n").unwrap();
        assert_eq!(f.f64("a", "x").unwrap_err().line, Some(2));
    }

    #[test]
    fn run_config_validates() {
        let base = Path::new("/tmp");
        let section: (&str, &[&str]) = ("scatter", &[]);
        let ok = "[potential]\npreset = fig5_well\n[sweep]\nvariable = energy\nmin = 1\nmax = 2\npoints = 5\n";
        let c = RunConfig::build(ok, section, base, &Overrides::default()).unwrap();
        assert_eq!(c.sweep.unwrap().values().len(), 5);
        assert_eq!(c.formats, vec![Format::Csv, Format::Json, Format::Svg]);

        let one_point = ok.replace("points = 5", "points = 1");
        assert_eq!(RunConfig::build(&one_point, section, base, &Overrides::default()).unwrap_err().line, Some(7));
        let bad_preset = ok.replace("fig5_well", "nowhere");
        assert_eq!(RunConfig::build(&bad_preset, section, base, &Overrides::default()).unwrap_err().line, Some(2));
        let stray = format!("{ok}[extra]\nkey = 1\n");
        assert!(RunConfig::build(&stray, section, base, &Overrides::default()).is_err());
    }

    #[test]
    fn formats_are_sorted_and_deduplicated() {
        assert_eq!(Format::parse_list("svg, csv,svg").unwrap(), vec![Format::Csv, Format::Svg]);
        assert!(Format::parse_list("pdf").is_err());
    }
}
