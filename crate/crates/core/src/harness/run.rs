//! Runs a configured scenario and summarizes it.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::config::{BathPreparation, Scenario, ScenarioKind};
use super::fit::{fit_decoherence_time, fit_relaxation_time, DecayFit, FitOptions, RelaxationFit};
use super::limit::{detect_weak_limit, WeakLimitReport};
use super::report::{FitQuality, FitReport, TimeValue, TIME_UNITS};
use super::series::TimeSeries;
use crate::eid::{spin_bath_scenario, BlochAngles, SpinBath, SpinBathParams};
use crate::error::{Error, Result};
use crate::sid::{
    energy_expectation, expectation_sid, EnergyGrid, KernelFamily, SidScenario, VanHoveObservable,
};

/// Column sets per scenario kind.
pub const SID_COLUMNS: &str = "t,expectation,offdiag_contrib,energy";
pub const EID_COLUMNS: &str =
    "t,rho_00_re,rho_00_im,rho_01_re,rho_01_im,rho_10_re,rho_10_im,rho_11_re,rho_11_im,purity,offdiag_modulus";

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub series: TimeSeries,
    pub report: FitReport,
    pub weak_limit: WeakLimitReport,
}

impl RunOutput {
    /// Writes `series.csv` and `summary.json` into `dir`, creating it.
    pub fn write(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir)?;
        self.series.write_csv(dir.join("series.csv"))?;
        std::fs::write(dir.join("summary.json"), self.report.to_json())?;
        Ok(())
    }
}

/// Which channels of a series carry what, for fitting.
pub struct ChannelRoles<'a> {
    pub coherence: &'a str,
    /// Relaxation channel and its equilibrium value (`None`: the channel is
    /// already a distance).
    pub relaxation: (&'a str, Option<f64>),
    pub monitored: Vec<&'a str>,
}

/// Dispatches on the scenario kind. Deterministic for a fixed config and seed.
pub fn run_scenario(s: &Scenario) -> Result<RunOutput> {
    s.validate()?;
    match s.kind {
        ScenarioKind::SidKernel => run_sid(s),
        ScenarioKind::EidSpinBath => run_spin_bath(s),
        ScenarioKind::MasterEqToy => run_toy(s),
    }
}

fn resolve_kernel(s: &Scenario, k: &KernelFamily) -> KernelFamily {
    match k {
        KernelFamily::Table { path } => KernelFamily::Table {
            path: s.resolve(path).to_string_lossy().into_owned(),
        },
        other => other.clone(),
    }
}

pub fn build_sid(s: &Scenario) -> Result<SidScenario> {
    let c = &s.sid;
    let grid = EnergyGrid::uniform(c.grid.lo, c.grid.hi, c.grid.n)?;
    SidScenario::build(
        grid,
        &c.state_diag,
        &resolve_kernel(s, &c.state_kernel),
        &c.observable_diag,
        &resolve_kernel(s, &c.observable_kernel),
    )
}

fn run_sid(s: &Scenario) -> Result<RunOutput> {
    let sc = build_sid(s)?;
    let times = s.times.sample_times();
    let h = VanHoveObservable::hamiltonian(&sc.grid);
    let mut value = Vec::with_capacity(times.len());
    let mut off = Vec::with_capacity(times.len());
    let mut energy = Vec::with_capacity(times.len());
    let mut worst_imag: f64 = 0.0;
    for &t in &times {
        let e = sc.expectation(t)?;
        worst_imag = worst_imag.max(e.imag_residue);
        value.push(e.value);
        off.push(e.offdiagonal.re);
        energy.push(expectation_sid(&sc.state, &h, &sc.grid, t)?.value);
    }
    let mut series = TimeSeries::new(times)?;
    series.push_channel("expectation", value)?;
    series.push_channel("offdiag_contrib", off)?;
    series.push_channel("energy", energy)?;

    let recurrence = sc.grid.recurrence_time();
    let limit = sc.limit()?;
    let e0 = energy_expectation(&sc.state, &sc.grid)?;
    let mut out = summarize(
        s,
        series,
        Some(recurrence),
        ChannelRoles {
            coherence: "offdiag_contrib",
            relaxation: ("energy", Some(e0)),
            monitored: vec!["expectation"],
        },
    )?;
    out.report.equilibrium_value = Some(limit);
    if let Some((_, tail)) = out.weak_limit.equilibrium.first() {
        if (tail - limit).abs() > s.analysis.epsilon {
            out.report.flags.push(format!(
                "tail mean {tail} differs from the diagonal limit {limit} by more than epsilon"
            ));
        }
    }
    if worst_imag > 1e-10 {
        out.report
            .flags
            .push(format!("imaginary residue up to {worst_imag:e}"));
    }
    Ok(out)
}

pub fn build_spin_bath(s: &Scenario) -> Result<SpinBath> {
    let c = &s.spin_bath;
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
    let couplings = match &c.couplings {
        Some(g) => g.clone(),
        None => (0..c.n_spins)
            .map(|_| rng.random_range(c.coupling_min..c.coupling_max))
            .collect(),
    };
    let n = couplings.len();
    let angles = match c.bath {
        BathPreparation::Plus => vec![BlochAngles::PLUS; n],
        BathPreparation::Up => vec![BlochAngles::UP; n],
        BathPreparation::Random => (0..n)
            .map(|_| BlochAngles {
                theta: rng.random_range(0.0..std::f64::consts::PI),
                phi: rng.random_range(0.0..std::f64::consts::TAU),
            })
            .collect(),
    };
    let [a, b] = c.qubit.amplitudes();
    let mut params = SpinBathParams::new(couplings, (a, b), angles);
    params.max_spins = c.max_spins;
    spin_bath_scenario(params)
}

fn run_spin_bath(s: &Scenario) -> Result<RunOutput> {
    let bath = build_spin_bath(s)?;
    let times = s.times.sample_times();
    let names = [
        "rho_00_re",
        "rho_00_im",
        "rho_01_re",
        "rho_01_im",
        "rho_10_re",
        "rho_10_im",
        "rho_11_re",
        "rho_11_im",
    ];
    let mut cols: Vec<Vec<f64>> = vec![Vec::with_capacity(times.len()); names.len() + 2];
    for &t in &times {
        let r = bath.reduced_state(t);
        let m = r.matrix();
        // Row-major entries 00, 01, 10, 11.
        for (k, z) in [m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]]
            .iter()
            .enumerate()
        {
            cols[2 * k].push(z.re);
            cols[2 * k + 1].push(z.im);
        }
        cols[8].push(r.density().purity());
        cols[9].push(m[(0, 1)].norm());
    }
    let mut series = TimeSeries::new(times)?;
    let mut it = cols.into_iter();
    for name in names.iter().chain(&["purity", "offdiag_modulus"]) {
        series.push_channel(name, it.next().unwrap())?;
    }
    let t_max = s.times.t_max;
    let recurrence = bath.recurrence_time(t_max);
    let p0 = series.require("rho_00_re")?[0];
    let mut out = summarize(
        s,
        series,
        Some(recurrence),
        ChannelRoles {
            coherence: "offdiag_modulus",
            relaxation: ("rho_00_re", Some(p0)),
            monitored: vec!["offdiag_modulus"],
        },
    )?;
    if recurrence >= t_max {
        out.report
            .flags
            .push("no revival seen before t_max; recurrence window set to t_max".to_string());
    }
    Ok(out)
}

fn run_toy(s: &Scenario) -> Result<RunOutput> {
    let toy = &s.toy;
    let times = s.times.sample_times();
    let rho0 = toy.initial_state().matrix().clone();
    let d = toy.dim();
    let mut pops: Vec<Vec<f64>> = vec![Vec::with_capacity(times.len()); d];
    let mut coh = Vec::with_capacity(times.len());
    let mut dist = Vec::with_capacity(times.len());
    for &t in &times {
        let rho = toy.state_at(&rho0, t);
        for (i, p) in pops.iter_mut().enumerate() {
            p.push(rho[(i, i)].re);
        }
        let (c, dd) = toy.channels(&rho);
        coh.push(c);
        dist.push(dd);
    }
    let mut series = TimeSeries::new(times)?;
    for (i, p) in pops.into_iter().enumerate() {
        series.push_channel(&format!("pop_{i}"), p)?;
    }
    series.push_channel("coherence_norm", coh)?;
    series.push_channel("diag_distance", dist)?;
    let mut out = summarize(
        s,
        series,
        None,
        ChannelRoles {
            coherence: "coherence_norm",
            relaxation: ("diag_distance", None),
            monitored: vec!["pop_0"],
        },
    )?;
    out.report
        .flags
        .push("dissipative generator: no recurrence".to_string());
    Ok(out)
}

/// Fits `t_D`, `t_R` and the weak limit on a series.
pub fn summarize(
    s: &Scenario,
    series: TimeSeries,
    recurrence: Option<f64>,
    roles: ChannelRoles<'_>,
) -> Result<RunOutput> {
    let opts = FitOptions {
        floor: s.analysis.fit_floor,
        recurrence_window: recurrence,
    };
    let mut flags = Vec::new();
    if let Some(w) = recurrence {
        if s.times.t_max > w {
            flags.push(format!(
                "samples beyond the recurrence window {w:.4} are excluded from fits and limits"
            ));
        }
    }
    let td: Option<DecayFit> = match fit_decoherence_time(&series, roles.coherence, &opts) {
        Ok(f) => Some(f),
        Err(Error::NoFit(m)) => {
            flags.push(format!("t_D: {m}"));
            None
        }
        Err(e) => return Err(e),
    };
    let (tr, tr_r2) =
        match fit_relaxation_time(&series, roles.relaxation.0, roles.relaxation.1, &opts) {
            Ok(RelaxationFit::Fitted(f)) => (TimeValue::Value(f.time), Some(f.r2)),
            Ok(RelaxationFit::NotApplicable) => {
                flags.push(format!(
                    "t_R: `{}` is constant, no dissipation",
                    roles.relaxation.0
                ));
                (TimeValue::NotApplicable, None)
            }
            Err(Error::NoFit(m)) => {
                flags.push(format!("t_R: {m}"));
                (TimeValue::Missing, None)
            }
            Err(e) => return Err(e),
        };
    let weak_limit = detect_weak_limit(&series, &roles.monitored, s.analysis.epsilon, recurrence)?;
    flags.extend(
        weak_limit
            .flags
            .iter()
            .filter(|f| !f.contains("recurrence window"))
            .map(|f| format!("weak limit: {f}")),
    );
    let report = FitReport {
        scenario: s.label(),
        kind: s.kind.as_str().to_string(),
        t_d: td.map_or(TimeValue::Missing, |f| TimeValue::Value(f.time)),
        t_r: tr,
        units: TIME_UNITS.to_string(),
        equilibrium_value: weak_limit.equilibrium.first().map(|(_, v)| *v),
        fit_r2: FitQuality {
            t_d: td.map(|f| f.r2),
            t_r: tr_r2,
        },
        decay_exponent: td.map(|f| f.exponent),
        recurrence_window: recurrence,
        weak_limit_time: weak_limit.t_star,
        flags,
    };
    Ok(RunOutput {
        series,
        report,
        weak_limit,
    })
}

/// Fits a CSV series with no config at hand, choosing channels by name.
pub fn fit_series(series: &TimeSeries, scenario: &str) -> Result<FitReport> {
    let has = |c: &str| series.channel(c).is_some();
    let roles = if has("offdiag_modulus") {
        ChannelRoles {
            coherence: "offdiag_modulus",
            relaxation: ("rho_00_re", Some(series.require("rho_00_re")?[0])),
            monitored: vec!["offdiag_modulus"],
        }
    } else if has("coherence_norm") {
        ChannelRoles {
            coherence: "coherence_norm",
            relaxation: ("diag_distance", None),
            monitored: vec!["pop_0"],
        }
    } else if has("offdiag_contrib") {
        ChannelRoles {
            coherence: "offdiag_contrib",
            relaxation: ("energy", Some(series.require("energy")?[0])),
            monitored: vec!["expectation"],
        }
    } else {
        return Err(Error::invalid(format!(
            "unrecognized column set; expected one of `{SID_COLUMNS}`, `{EID_COLUMNS}` or the toy columns"
        )));
    };
    let t = series.t();
    let fake = Scenario {
        name: Some(scenario.to_string()),
        kind: if has("offdiag_modulus") {
            ScenarioKind::EidSpinBath
        } else if has("coherence_norm") {
            ScenarioKind::MasterEqToy
        } else {
            ScenarioKind::SidKernel
        },
        seed: 0,
        times: super::config::Times {
            t_max: t[t.len() - 1],
            samples: Some(t.len()),
            dt: None,
        },
        tolerances: Default::default(),
        analysis: Default::default(),
        sid: Default::default(),
        spin_bath: Default::default(),
        toy: Default::default(),
        base_dir: None,
    };
    let mut out = summarize(&fake, series.clone(), None, roles)?;
    out.report
        .flags
        .push("fitted from a bare series: recurrence window unknown".to_string());
    Ok(out.report)
}
