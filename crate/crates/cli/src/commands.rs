//! One function per subcommand: configuration in, artifacts out.

use std::io;

use num_complex::Complex64;
use resonance_core::cscaling::{
    build_scaled_hamiltonian, classify_spectrum, regional_spectrum, theta_trajectory, CScalingError,
    ClassifyOptions, EigenSolver, EnergyRegion, ScalablePotential, ScaledGrid, TrajectoryOptions,
};
use resonance_core::darboux::{darboux_potential, seed_real_zeros, spectrum_report, DarbouxError, SpectrumOrigin};
use resonance_core::decay::{survival_amplitude, fock_omega, DecayError, FbwNormalization, FockDistribution, SurvivalMethod};
use resonance_core::gamow::{build_gamow_state, GamowError};
use resonance_core::oscillator::{fbw, spectral_energy, steady_state, OscillatorError, OscillatorParams};
use resonance_core::scattering::{
    fbw_rms, fbw_superposition, find_poles, solve_scattering, spacing_ratios, KRegion, PiecewisePotential, Pole,
    PoleKind, PoleSearch, PoleSet, ScatteringError,
};
use serde_json::json;
use thiserror::Error;

use crate::config::{ConfigError, RunConfig, Sweep};
use crate::output::{Artifacts, Cell, Plot, SeriesStyle, Table};

#[derive(Debug, Error)]
pub enum AppError {
    #[error("configuration error: {0}")]
    Config(#[from] ConfigError),
    #[error("computation failed: {0}")]
    Compute(String),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
}

impl AppError {
    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::Config(_) => 2,
            AppError::Compute(_) | AppError::Io(_) => 3,
        }
    }
}

macro_rules! compute_errors {
    ($($t:ty),*) => {$(
        impl From<$t> for AppError {
            fn from(e: $t) -> Self {
                AppError::Compute(e.to_string())
            }
        }
    )*};
}
compute_errors!(OscillatorError, DecayError, ScatteringError, GamowError, DarbouxError, CScalingError);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subcommand {
    Oscillator,
    Decay,
    Scatter,
    Poles,
    FbwFit,
    Cscale,
    Darboux,
}

impl Subcommand {
    pub const ALL: [Subcommand; 7] = [
        Subcommand::Oscillator,
        Subcommand::Decay,
        Subcommand::Scatter,
        Subcommand::Poles,
        Subcommand::FbwFit,
        Subcommand::Cscale,
        Subcommand::Darboux,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Subcommand::Oscillator => "oscillator",
            Subcommand::Decay => "decay",
            Subcommand::Scatter => "scatter",
            Subcommand::Poles => "poles",
            Subcommand::FbwFit => "fbw-fit",
            Subcommand::Cscale => "cscale",
            Subcommand::Darboux => "darboux",
        }
    }

    /// The subcommand's own config section and its keys.
    pub fn section(&self) -> (&'static str, &'static [&'static str]) {
        match self {
            Subcommand::Oscillator => ("oscillator", &["mass", "natural_freq", "force_amplitude", "dampings"]),
            Subcommand::Decay => ("decay", &["center", "widths", "normalization", "spectrum_points"]),
            Subcommand::Scatter => ("scatter", &[]),
            Subcommand::Poles => ("poles", REGION_KEYS),
            Subcommand::FbwFit => ("fbw", &["terms", "rms_points", "re_min", "re_max", "im_min", "im_max", "grid"]),
            Subcommand::Cscale => (
                "cscale",
                &[
                    "margin",
                    "points",
                    "thetas",
                    "resonance",
                    "re_min",
                    "re_max",
                    "im_min",
                    "im_max",
                    "refine_levels",
                    "stability_tol",
                    "lattice_x",
                    "lattice_y",
                ],
            ),
            Subcommand::Darboux => ("darboux", &["resonance", "x_min", "x_max", "points", "samples"]),
        }
    }

    pub fn run(&self, cfg: &RunConfig) -> Result<Artifacts, AppError> {
        let mut a = match self {
            Subcommand::Oscillator => oscillator(cfg),
            Subcommand::Decay => decay(cfg),
            Subcommand::Scatter => scatter(cfg),
            Subcommand::Poles => poles(cfg),
            Subcommand::FbwFit => fbw_fit(cfg),
            Subcommand::Cscale => cscale(cfg),
            Subcommand::Darboux => darboux(cfg),
        }?;
        a.note("subcommand", self.name());
        Ok(a)
    }
}

const REGION_KEYS: &[&str] = &["re_min", "re_max", "im_min", "im_max", "grid"];

fn points(xs: &[f64], ys: &[f64]) -> Vec<(f64, f64)> {
    xs.iter().copied().zip(ys.iter().copied()).collect()
}

fn oscillator(cfg: &RunConfig) -> Result<Artifacts, AppError> {
    let f = &cfg.file;
    let s = "oscillator";
    let mass = f.positive_or(s, "mass", 1.0)?;
    let w0 = f.positive_or(s, "natural_freq", 1.0)?;
    let force = f.f64_or(s, "force_amplitude", 1.0)?;
    let dampings = f.f64_list(s, "dampings")?.unwrap_or_else(|| vec![0.05, 0.1, 0.2, 0.4]);
    if dampings.is_empty() || dampings.iter().any(|g| !(*g > 0.0)) {
        return Err(f.error_at(s, "dampings", "`dampings` must list positive values").into());
    }
    let sweep = cfg.sweep_or("frequency", Sweep { variable: "frequency".into(), min: 0.0, max: 2.0 * w0, points: 401 })?;
    if sweep.min < 0.0 {
        return Err(f.error_at("sweep", "min", "frequencies must be non-negative").into());
    }

    let mut table = Table::new("oscillator", &["damping", "frequency", "spectral_energy", "phase", "fbw_overlay"]);
    let mut energy_plot = Plot::new("oscillator_energy", "Stored energy versus driving frequency", "w", "E(w)");
    let mut phase_plot = Plot::new("oscillator_phase", "Phase lag versus driving frequency", "w", "phase");
    let ws = sweep.values();
    for &gamma in &dampings {
        let p = OscillatorParams::new(mass, w0, gamma, force, 0.0)?;
        let peak = spectral_energy(&p, w0)?;
        let mut energy = Vec::with_capacity(ws.len());
        let mut phase = Vec::with_capacity(ws.len());
        let mut overlay = Vec::with_capacity(ws.len());
        for &w in &ws {
            let e = spectral_energy(&p, w)?;
            let ph = steady_state(&p, w)?.phase;
            let o = peak * fbw(w, w0, gamma);
            table.push(vec![gamma.into(), w.into(), e.into(), ph.into(), o.into()]);
            energy.push(e);
            phase.push(ph);
            overlay.push(o);
        }
        energy_plot = energy_plot
            .with(&format!("gamma = {gamma}"), points(&ws, &energy), SeriesStyle::Line)
            .with(&format!("FBW, gamma = {gamma}"), points(&ws, &overlay), SeriesStyle::Dashed);
        phase_plot = phase_plot.with(&format!("gamma = {gamma}"), points(&ws, &phase), SeriesStyle::Line);
    }
    let mut a = Artifacts { tables: vec![table], plots: vec![energy_plot, phase_plot], ..Default::default() };
    a.note_number("natural_freq", w0);
    a.note_numbers("dampings", &dampings);
    Ok(a)
}

fn decay(cfg: &RunConfig) -> Result<Artifacts, AppError> {
    let f = &cfg.file;
    let s = "decay";
    let center = f.f64_or(s, "center", 10.0)?;
    let widths = f.f64_list(s, "widths")?.unwrap_or_else(|| vec![0.25, 0.5, 1.0]);
    if widths.is_empty() || widths.iter().any(|w| !(*w > 0.0)) {
        return Err(f.error_at(s, "widths", "`widths` must list positive values").into());
    }
    let normalization = match f.string(s, "normalization").unwrap_or("squared") {
        "squared" => FbwNormalization::Squared,
        "unit_area" => FbwNormalization::UnitArea,
        other => {
            return Err(f
                .error_at(s, "normalization", format!("unknown normalization `{other}` (squared or unit_area)"))
                .into())
        }
    };
    let spectrum_points = f.usize_or(s, "spectrum_points", 401)?;
    if spectrum_points < 2 {
        return Err(f.error_at(s, "spectrum_points", "`spectrum_points` must be at least 2").into());
    }
    let narrowest = widths.iter().copied().fold(f64::INFINITY, f64::min);
    let sweep = cfg.sweep_or("time", Sweep { variable: "time".into(), min: 0.0, max: 8.0 / narrowest, points: 161 })?;
    if sweep.min < 0.0 {
        return Err(f.error_at("sweep", "min", "times must be non-negative").into());
    }

    let mut survival = Table::new(
        "survival",
        &["width", "time", "numeric_re", "numeric_im", "closed_re", "closed_im", "survival_probability", "relative_error"],
    );
    let mut spectrum = Table::new("spectrum", &["width", "energy", "omega"]);
    let mut survival_plot = Plot::new("decay_survival", "Survival probability |T(t)|^2", "t", "|T(t)|^2 / |T(0)|^2");
    let mut error_plot = Plot::new("decay_error", "Numeric versus closed-form survival amplitude", "t", "log10 relative error");
    let mut spectrum_plot = Plot::new("decay_spectrum", "Energy distribution", "E", "omega(E)");
    let ts = sweep.values();
    let reach = 10.0 * widths.iter().copied().fold(0.0, f64::max);
    for &width in &widths {
        let d = FockDistribution::new(center, width, normalization)?;
        let initial = survival_amplitude(&d, 0.0, SurvivalMethod::ClosedForm, &cfg.tolerances)?.norm_sqr();
        let mut prob = Vec::new();
        let mut closed_prob = Vec::new();
        let mut err = Vec::new();
        for &t in &ts {
            let num = survival_amplitude(&d, t, SurvivalMethod::Numeric, &cfg.tolerances)?;
            let closed = survival_amplitude(&d, t, SurvivalMethod::ClosedForm, &cfg.tolerances)?;
            let rel = (num - closed).norm() / closed.norm();
            survival.push(vec![
                width.into(),
                t.into(),
                num.re.into(),
                num.im.into(),
                closed.re.into(),
                closed.im.into(),
                (num.norm_sqr() / initial).into(),
                rel.into(),
            ]);
            prob.push(num.norm_sqr() / initial);
            closed_prob.push(closed.norm_sqr() / initial);
            err.push(rel.max(1e-300).log10());
        }
        let energies: Vec<f64> = (0..spectrum_points)
            .map(|i| center - reach + 2.0 * reach * i as f64 / (spectrum_points - 1) as f64)
            .collect();
        let omega: Vec<f64> = energies.iter().map(|&e| fock_omega(&d, e)).collect();
        for (e, o) in energies.iter().zip(&omega) {
            spectrum.push(vec![width.into(), (*e).into(), (*o).into()]);
        }
        survival_plot = survival_plot
            .with(&format!("Gamma = {width}"), points(&ts, &prob), SeriesStyle::Line)
            .with(&format!("exp(-Gamma t), Gamma = {width}"), points(&ts, &closed_prob), SeriesStyle::Dashed);
        error_plot = error_plot.with(&format!("Gamma = {width}"), points(&ts, &err), SeriesStyle::Line);
        spectrum_plot = spectrum_plot.with(&format!("Gamma = {width}"), points(&energies, &omega), SeriesStyle::Line);
    }
    let mut a = Artifacts {
        tables: vec![survival, spectrum],
        plots: vec![survival_plot, error_plot, spectrum_plot],
        ..Default::default()
    };
    a.note_number("center", center);
    a.note_numbers("widths", &widths);
    Ok(a)
}

fn scatter(cfg: &RunConfig) -> Result<Artifacts, AppError> {
    let v = cfg.potential()?;
    let top = (0.1 * v.max_abs_value()).max(10.0);
    let sweep = cfg.sweep_or("energy", Sweep { variable: "energy".into(), min: 0.01, max: top, points: 1000 })?;
    if !(sweep.min > 0.0) {
        return Err(cfg.file.error_at("sweep", "min", "scattering energies must be positive").into());
    }
    let mut table = Table::new("transmission", &["energy", "transmission", "reflection"]);
    let es = sweep.values();
    let mut ts = Vec::with_capacity(es.len());
    for &e in &es {
        let sol = solve_scattering(v, Complex64::new(e.sqrt(), 0.0))?;
        table.push(vec![e.into(), sol.transmission().into(), sol.reflection().into()]);
        ts.push(sol.transmission());
    }
    let plot = Plot::new("transmission", "Transmission coefficient", "E", "T(E)").with("T(E)", points(&es, &ts), SeriesStyle::Line);
    let worst = table
        .rows
        .iter()
        .map(|r| match (&r[1], &r[2]) {
            (Cell::Num(t), Cell::Num(l)) => (t + l - 1.0).abs(),
            _ => 0.0,
        })
        .fold(0.0, f64::max);
    let mut a = Artifacts { tables: vec![table], plots: vec![plot], ..Default::default() };
    a.note_number("max_unitarity_defect", worst);
    Ok(a)
}

fn region_from(cfg: &RunConfig, section: &str, v: &PiecewisePotential) -> Result<(KRegion, PoleSearch), AppError> {
    let f = &cfg.file;
    let d = KRegion::default_for(v);
    let re = (f.f64_or(section, "re_min", d.re.0)?, f.f64_or(section, "re_max", d.re.1)?);
    let im = (f.f64_or(section, "im_min", d.im.0)?, f.f64_or(section, "im_max", d.im.1)?);
    let region = KRegion::new(re, im).map_err(|e| f.error_at(section, "re_min", e.to_string()))?;
    let mut search = PoleSearch { tol: cfg.tolerances, ..PoleSearch::default() };
    let grid = f.usize_or(section, "grid", search.nx)?;
    if grid < 4 {
        return Err(f.error_at(section, "grid", "`grid` must be at least 4").into());
    }
    search.nx = grid;
    search.ny = grid;
    Ok((region, search))
}

fn pole_search(cfg: &RunConfig, section: &str, v: &PiecewisePotential) -> Result<PoleSet, AppError> {
    let (region, search) = region_from(cfg, section, v)?;
    Ok(find_poles(v, &region, &search)?)
}

fn poles(cfg: &RunConfig) -> Result<Artifacts, AppError> {
    let v = cfg.potential()?;
    let set = pole_search(cfg, "poles", v)?;
    let mut table = Table::new("poles", &["re_k", "im_k", "re_eps", "im_eps", "kind", "residual"]);
    let mut plot = Plot::new("poles_k_plane", "Poles in the complex k plane", "Re k", "Im k");
    for kind in [PoleKind::Bound, PoleKind::Antibound, PoleKind::Resonance] {
        let pts: Vec<(f64, f64)> = set.of_kind(kind).map(|p| (p.k.re, p.k.im)).collect();
        if !pts.is_empty() {
            plot = plot.with(kind.as_str(), pts, SeriesStyle::Markers);
        }
    }
    for p in &set.poles {
        table.push(vec![
            p.k.re.into(),
            p.k.im.into(),
            p.epsilon.re.into(),
            p.epsilon.im.into(),
            p.kind.as_str().into(),
            p.residual.into(),
        ]);
    }
    if set.poles.is_empty() {
        log::warn!("no poles in the search region");
    }
    let mut a = Artifacts { tables: vec![table], plots: vec![plot], ..Default::default() };
    for kind in [PoleKind::Bound, PoleKind::Antibound, PoleKind::Resonance] {
        a.note(&format!("{}_count", kind.as_str()), set.of_kind(kind).count());
    }
    a.note("skipped_seeds", set.skipped_seeds);
    a.note("overlaps", set.overlaps.len());
    Ok(a)
}

fn resonances(set: &PoleSet) -> Vec<Pole> {
    let mut r: Vec<Pole> = set.of_kind(PoleKind::Resonance).copied().collect();
    r.sort_by(|a, b| a.energy().total_cmp(&b.energy()));
    r
}

fn fbw_fit(cfg: &RunConfig) -> Result<Artifacts, AppError> {
    let v = cfg.potential()?;
    let f = &cfg.file;
    let terms = f.usize_or("fbw", "terms", 5)?;
    if terms == 0 {
        return Err(f.error_at("fbw", "terms", "`terms` must be at least 1").into());
    }
    let rms_points = f.usize_or("fbw", "rms_points", 2000)?;
    if rms_points < 2 {
        return Err(f.error_at("fbw", "rms_points", "`rms_points` must be at least 2").into());
    }
    let set = pole_search(cfg, "fbw", v)?;
    let res = resonances(&set);
    if res.len() < terms {
        return Err(AppError::Compute(format!("found {} resonances, {terms} requested", res.len())));
    }
    let used = &res[..terms];
    let first = used[0];
    let last = used[terms - 1];
    let window = ((first.energy() - 2.0 * first.width()).max(1e-3), last.energy() + 2.0 * last.width());
    let sweep = cfg.sweep_or("energy", Sweep { variable: "energy".into(), min: window.0, max: window.1, points: 1000 })?;
    if !(sweep.min > 0.0) {
        return Err(f.error_at("sweep", "min", "scattering energies must be positive").into());
    }

    let mut fit = Table::new("fbw_fit", &["energy", "transmission", "omega"]);
    let es = sweep.values();
    let mut ts = Vec::with_capacity(es.len());
    let mut om = Vec::with_capacity(es.len());
    for &e in &es {
        let t = solve_scattering(v, Complex64::new(e.sqrt(), 0.0))?.transmission();
        let o = fbw_superposition(used, e)?;
        fit.push(vec![e.into(), t.into(), o.into()]);
        ts.push(t);
        om.push(o);
    }
    let mut rms = Table::new("fbw_rms", &["terms", "rms"]);
    let mut rms_values = Vec::with_capacity(terms);
    for n in 1..=terms {
        let r = fbw_rms(v, &used[..n], window, rms_points)?;
        rms.push(vec![n.into(), r.into()]);
        rms_values.push(r);
    }
    let mut lines = Table::new("resonances", &["index", "energy", "width", "spacing_ratio"]);
    let ratios = spacing_ratios(used)?;
    for (i, p) in used.iter().enumerate() {
        let ratio = ratios.get(i).map_or(f64::NAN, |r| r.ratio);
        lines.push(vec![(i + 1).into(), p.energy().into(), p.width().into(), ratio.into()]);
    }
    let plot = Plot::new("fbw_fit", "Transmission and FBW superposition", "E", "T(E)")
        .with("T(E)", points(&es, &ts), SeriesStyle::Line)
        .with(&format!("omega_{terms}(E)"), points(&es, &om), SeriesStyle::Dashed);
    let ns: Vec<f64> = (1..=terms).map(|n| n as f64).collect();
    let rms_plot = Plot::new("fbw_rms", "RMS of T - omega_N over the window", "N", "RMS")
        .with("RMS", points(&ns, &rms_values), SeriesStyle::Line);
    let mut a = Artifacts { tables: vec![fit, rms, lines], plots: vec![plot, rms_plot], ..Default::default() };
    a.note_numbers("window", &[window.0, window.1]);
    a.note("rms_strictly_decreasing", rms_values.windows(2).all(|w| w[1] < w[0]));
    Ok(a)
}

fn cscale(cfg: &RunConfig) -> Result<Artifacts, AppError> {
    let v = cfg.potential()?;
    let f = &cfg.file;
    let s = "cscale";
    let margin = f.positive_or(s, "margin", 15.0)?;
    let thetas = f.f64_list(s, "thetas")?.unwrap_or_else(|| vec![0.15, 0.2, 0.25, 0.3, 0.35]);
    let index = f.usize_or(s, "resonance", 1)?;
    let refine_levels = f.usize_or(s, "refine_levels", 2)? as u32;
    let stability_tol = f.positive_or(s, "stability_tol", 1e-4)?;
    let nx = f.usize_or(s, "lattice_x", 24)?;
    let ny = f.usize_or(s, "lattice_y", 6)?;
    if index == 0 {
        return Err(f.error_at(s, "resonance", "`resonance` counts from 1").into());
    }
    if nx < 2 || ny < 2 {
        return Err(f.error_at(s, "lattice_x", "lattice needs at least 2 seeds per direction").into());
    }

    let set = find_poles(v, &KRegion::default_for(v), &PoleSearch { tol: cfg.tolerances, ..PoleSearch::default() })?;
    let res = resonances(&set);
    let pole = *res
        .get(index - 1)
        .ok_or_else(|| AppError::Compute(format!("resonance {index} requested, {} found", res.len())))?;
    let eps = pole.epsilon;
    let half = 3.0 * pole.width() + 1.0;
    let target = EnergyRegion::new(
        (f.f64_or(s, "re_min", eps.re - half)?, f.f64_or(s, "re_max", eps.re + half)?),
        (f.f64_or(s, "im_min", 2.0 * eps.im - 1.0)?, f.f64_or(s, "im_max", 0.2)?),
    )
    .map_err(|e| f.error_at(s, "re_min", e.to_string()))?;
    // Default spacing resolves the fastest local oscillation with k·h ≈ 0.04; the cell
    // count is rounded up to a multiple of 1000 so round-valued breakpoints land on nodes.
    let k_max = (v.max_abs_value() + eps.re.abs()).sqrt().max(1.0);
    let cells = (2.0 * (v.cutoff() + margin) * k_max / 0.04).ceil() as usize;
    let auto = cells.div_ceil(1000) * 1000 - 1;
    let n = f.usize_or(s, "points", auto)?;
    let template = ScaledGrid::for_potential(v, margin, n, thetas.first().copied().unwrap_or(0.2))
        .map_err(|e| f.error_at(s, "points", e.to_string()))?;
    let opts = TrajectoryOptions { stability_tol, solver: EigenSolver::Lattice { nx, ny }, refine_levels };
    let pv = ScalablePotential::Piecewise(v);
    let traj = theta_trajectory(pv, &template, &thetas, &target, &opts)?;

    let mut trajectory = Table::new("trajectory", &["theta", "re_eps", "im_eps"]);
    for p in &traj.points {
        trajectory.push(vec![p.theta.into(), p.eigenvalue.re.into(), p.eigenvalue.im.into()]);
    }
    let grid = template.with_theta(traj.stabilization_theta);
    let h = build_scaled_hamiltonian(pv, &grid)?;
    let bounds: Vec<f64> = set.of_kind(PoleKind::Bound).map(|p| p.energy()).collect();
    let spectrum = classify_spectrum(
        regional_spectrum(&h, traj.stabilization_theta, &target, nx, ny),
        &bounds,
        &ClassifyOptions::default(),
    );
    let mut eigen = Table::new("scaled_spectrum", &["re_eps", "im_eps", "label"]);
    for (e, l) in spectrum.eigenvalues.iter().zip(&spectrum.labels) {
        eigen.push(vec![e.re.into(), e.im.into(), l.as_str().into()]);
    }
    let plot = Plot::new("cscale_plane", "Scaled eigenvalues in the energy plane", "Re E", "Im E")
        .with("trajectory", traj.points.iter().map(|p| (p.eigenvalue.re, p.eigenvalue.im)).collect(), SeriesStyle::Line)
        .with(
            &format!("spectrum at theta = {}", traj.stabilization_theta),
            spectrum.eigenvalues.iter().map(|e| (e.re, e.im)).collect(),
            SeriesStyle::Markers,
        )
        .with("pole finder", vec![(eps.re, eps.im)], SeriesStyle::Markers);
    let mut a = Artifacts { tables: vec![trajectory, eigen], plots: vec![plot], ..Default::default() };
    a.note_numbers("resonance", &[traj.resonance.re, traj.resonance.im]);
    a.note_numbers("pole_epsilon", &[eps.re, eps.im]);
    a.note_number("deviation_from_pole", (traj.resonance - eps).norm());
    a.note_number("stabilization_theta", traj.stabilization_theta);
    a.note_number("drift", traj.drift);
    a.note_number("grid_estimate", traj.grid_estimate);
    Ok(a)
}

fn darboux(cfg: &RunConfig) -> Result<Artifacts, AppError> {
    let v = cfg.potential()?;
    let f = &cfg.file;
    let s = "darboux";
    let index = f.usize_or(s, "resonance", 0)?;
    let reach = v.cutoff() + 30.0;
    let x_min = f.f64_or(s, "x_min", -reach)?;
    let x_max = f.f64_or(s, "x_max", reach)?;
    let n = f.usize_or(s, "points", 801)?;
    let samples = f.usize_or(s, "samples", 200)?;
    if !(x_max > x_min) || n < 2 || samples < 2 {
        return Err(f.error_at(s, "x_max", "need x_max > x_min and at least 2 points and samples").into());
    }
    let set = find_poles(v, &KRegion::default_for(v), &PoleSearch { tol: cfg.tolerances, ..PoleSearch::default() })?;
    let res = resonances(&set);
    let seed = if index == 0 {
        res.iter()
            .filter_map(|p| build_gamow_state(v, p, 1e-8).ok())
            .find(|g| seed_real_zeros(g, 1e-8).is_empty())
            .ok_or_else(|| AppError::Compute("no resonance with a nodeless Gamow state".into()))?
    } else {
        let p = res
            .get(index - 1)
            .ok_or_else(|| AppError::Compute(format!("resonance {index} requested, {} found", res.len())))?;
        build_gamow_state(v, p, 1e-8)?
    };
    let deformed = darboux_potential(&seed, x_min, x_max, n)?;
    let mut potential = Table::new("darboux_potential", &["x", "base", "re_v", "im_v"]);
    for p in &deformed.samples {
        potential.push(vec![p.x.into(), v.value_at(p.x).into(), p.re.into(), p.im.into()]);
    }
    let bounds: Vec<f64> = set.of_kind(PoleKind::Bound).map(|p| p.energy()).collect();
    let report = spectrum_report(&bounds, &seed, samples, &cfg.tolerances)?;
    let mut spectrum = Table::new("darboux_spectrum", &["re_energy", "im_energy", "origin", "residual", "tail_fraction"]);
    for e in &report.entries {
        let origin = match e.origin {
            SpectrumOrigin::BaseBound => "base_bound",
            SpectrumOrigin::Seed => "seed",
        };
        spectrum.push(vec![
            e.energy.re.into(),
            e.energy.im.into(),
            origin.into(),
            e.residual.into(),
            e.tail_fraction.into(),
        ]);
    }
    let xs: Vec<f64> = deformed.samples.iter().map(|p| p.x).collect();
    let plot = Plot::new("darboux_potential", "Deformed potential", "x", "V(x)")
        .with("Re V~", deformed.samples.iter().map(|p| (p.x, p.re)).collect(), SeriesStyle::Line)
        .with("Im V~", deformed.samples.iter().map(|p| (p.x, p.im)).collect(), SeriesStyle::Line)
        .with("V", xs.iter().map(|&x| (x, v.value_at(x))).collect(), SeriesStyle::Dashed);
    let edge = [x_min, x_max]
        .iter()
        .map(|&x| deformed.value_at(x).map(|w| (w - v.value_at(x)).norm()))
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .fold(0.0, f64::max);
    let mut a = Artifacts { tables: vec![potential, spectrum], plots: vec![plot], ..Default::default() };
    a.note_numbers("seed_energy", &[seed.energy().re, seed.energy().im]);
    a.note_number("edge_deviation", edge);
    a.note("orthogonal", json!(report.orthogonal));
    a.note(
        "note",
        "transformed eigenfunctions are not mutually orthogonal; the seed level is complex",
    );
    Ok(a)
}
