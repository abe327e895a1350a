use std::path::Path;

use anyhow::{bail, Context, Result};
use rayon::prelude::*;

use rmd_core::config::{DynamicsModel, InitialState, RunConfig};
use rmd_core::dressing::{gamma1, DressedProfile};
use rmd_core::lindblad::{
    evolve_effective_pair, evolve_master_equation_with, evolve_three_level_pair, pair_projectors, DensityState, MeOptions,
    PairPopulations, DEFAULT_DENSE_CAP,
};
use rmd_core::meanfield_nh::DEFAULT_STATE_CAP;
use rmd_core::pair_potential::eigencurves_with;
use rmd_core::squeezing::{optimize_tau, run_echo, scan_scaling, Dissipation, EchoProtocol, Method, Scheme, TauSearch};
use rmd_core::validation::{run_suite, Status};
use rmd_core::Error;

use crate::output::{num, opt, Table};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    Potential,
    Dressed,
    Dynamics,
    Squeeze,
    Scan,
    Validate,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Potential => "potential",
            Command::Dressed => "dressed",
            Command::Dynamics => "dynamics",
            Command::Squeeze => "squeeze",
            Command::Scan => "scan",
            Command::Validate => "validate",
        }
    }
}

pub struct Outcome {
    pub summary: String,
    pub exit_code: i32,
}

fn ok(summary: String) -> Result<Outcome> {
    Ok(Outcome { summary, exit_code: 0 })
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

fn config_name(cfg: &RunConfig) -> &str {
    cfg.name.as_deref().unwrap_or("custom")
}

fn scheme_label(s: Scheme) -> &'static str {
    match s {
        Scheme::Rmd => "rmd",
        Scheme::Srd => "srd",
    }
}

pub fn run(cmd: Command, cfg: Option<&RunConfig>, out_dir: &Path) -> Result<Outcome> {
    if cmd == Command::Validate {
        return validate(out_dir);
    }
    let cfg = cfg.context("this command needs --config or --preset")?;
    let path = out_dir.join(&cfg.output.path);
    let (table, summary) = match cmd {
        Command::Potential => potential(cfg)?,
        Command::Dressed => dressed(cfg)?,
        Command::Dynamics => dynamics(cfg)?,
        Command::Squeeze => squeeze(cfg)?,
        Command::Scan => scan(cfg)?,
        Command::Validate => unreachable!(),
    };
    table.write(&path)?;
    ok(format!("{summary} -> {}", path.display()))
}

fn potential(cfg: &RunConfig) -> Result<(Table, String)> {
    let f = cfg.units.factor();
    let grid = cfg.grid()?;
    let curves = eigencurves_with(&grid, &cfg.mw()?, &cfg.coeffs()?, cfg.potential.branch.into())?;
    let bare = cfg.bare_potential()?;
    let pot = cfg.potential()?;
    let mut t = Table::new("potential", config_name(cfg), &["r", "e_lowest", "e_middle", "e_highest", "u_bare", "u"]);
    t.comment(format!("branch_of_interest={} min_neighbor_overlap={}", curves.branch_of_interest, num(curves.min_neighbor_overlap)));
    for i in 0..grid.len() {
        t.push(vec![
            num(grid[i]),
            num(curves.branches[0][i] / f),
            num(curves.branches[1][i] / f),
            num(curves.branches[2][i] / f),
            num(bare.curve[i] / f),
            num(pot.curve[i] / f),
        ]);
    }
    let s = format!("potential: Rc = {:.6}, U(Rc) = {:.6}, {} rows", pot.r_min, pot.u_min / f, grid.len());
    Ok((t, s))
}

fn dressed(cfg: &RunConfig) -> Result<(Table, String)> {
    let f = cfg.units.factor();
    let p = cfg.params()?;
    let pot = cfg.potential()?;
    let v0 = rmd_core::dressing::v0(&p)?;
    let g1 = gamma1(&p)?;
    let prof = DressedProfile::from_potential(&pot, &p)?;
    let mut t = Table::new(
        "dressed",
        config_name(cfg),
        &["r", "u", "delta2", "v_over_v0", "v_full_over_v0", "gamma2_over_gamma1", "coherence"],
    );
    for i in 0..prof.r_grid.len() {
        let ratio = if g1 > 0.0 { prof.gamma2[i] / g1 } else { f64::NAN };
        t.push(vec![
            num(prof.r_grid[i]),
            num(prof.u[i] / f),
            num(prof.delta2[i] / f),
            num(prof.v[i] / v0),
            opt(prof.v_full[i].map(|v| v / v0)),
            num(ratio),
            num(prof.coherence[i]),
        ]);
    }
    let v_rc = rmd_core::dressing::dressed_potential(pot.u_min, &p)? / v0;
    Ok((t, format!("dressed: V(Rc)/V0 = {v_rc:.6}, Δ2(Rc) = {:.6}", (pot.u_min + 2.0 * p.delta) / f)))
}

fn dynamics(cfg: &RunConfig) -> Result<(Table, String)> {
    let dy = cfg.dynamics.as_ref().context("config has no `dynamics` section")?;
    let p = cfg.params()?;
    let v0 = cfg.v0_abs()?;
    let times: Vec<f64> = linspace(0.0, dy.t_max / v0, dy.samples);
    match dy.model {
        DynamicsModel::Chain => {
            let model = cfg.chain_model()?;
            let n = model.n_sites;
            let initial = match dy.initial {
                InitialState::AllDown => DensityState::all_down(n),
                InitialState::Equator => DensityState::equator(n),
            };
            let opts = MeOptions { projectors: if n == 2 { pair_projectors() } else { Vec::new() }, ..Default::default() };
            let s = evolve_master_equation_with(&model, &initial, &times, &opts)?;
            if !s.all_checks_ok() {
                bail!("density-matrix invariants violated during evolution");
            }
            let mut header = vec!["t", "V0t", "jx", "jy", "jz", "jz_var"];
            let labels: Vec<String> = s.populations.iter().map(|(l, _)| format!("pop_{l}")).collect();
            header.extend(labels.iter().map(String::as_str));
            let mut t = Table::new("dynamics", config_name(cfg), &header);
            for i in 0..times.len() {
                let mut row = vec![num(times[i]), num(times[i] * v0), num(s.jx[i]), num(s.jy[i]), num(s.jz[i]), num(s.jz_var[i])];
                row.extend(s.populations.iter().map(|(_, v)| num(v[i])));
                t.push(row);
            }
            Ok((t, format!("dynamics: chain N = {n}, {} samples, state checks ok", times.len())))
        }
        DynamicsModel::Pair => {
            let u12 = match dy.u12 {
                Some(u) => u,
                None => cfg.potential()?.u_min,
            };
            let three = evolve_three_level_pair(&p, u12, &DensityState::basis(9, 0), &times)?;
            let eff = evolve_effective_pair(&p, u12, &DensityState::basis(4, 0), &times)?;
            let labels = [PairPopulations::GROUND, PairPopulations::SYMMETRIC, PairPopulations::DOUBLE];
            let mut t = Table::new(
                "dynamics",
                config_name(cfg),
                &["t", "V0t", "three_pop_00", "three_pop_01s", "three_pop_11", "eff_pop_00", "eff_pop_01s", "eff_pop_11"],
            );
            let mut worst: f64 = 0.0;
            for i in 0..times.len() {
                let mut row = vec![num(times[i]), num(times[i] * v0)];
                let a: Vec<f64> = labels.iter().map(|l| three.population(l).map_or(f64::NAN, |v| v[i])).collect();
                let b: Vec<f64> = labels.iter().map(|l| eff.population(l).map_or(f64::NAN, |v| v[i])).collect();
                for (x, y) in a.iter().zip(&b) {
                    worst = worst.max((x - y).abs());
                }
                row.extend(a.iter().map(|&x| num(x)));
                row.extend(b.iter().map(|&x| num(x)));
                t.push(row);
            }
            if !(three.all_checks_ok() && eff.all_checks_ok()) {
                bail!("density-matrix invariants violated during evolution");
            }
            Ok((t, format!("dynamics: pair models, sup |Δpopulation| = {worst:.6}")))
        }
    }
}

fn xi2_or_empty(r: rmd_core::Result<rmd_core::SqueezingResult>) -> Result<f64> {
    match r {
        Ok(r) => Ok(r.xi2),
        Err(Error::ContrastLoss) => Ok(f64::NAN),
        Err(e) => Err(e.into()),
    }
}

fn squeeze(cfg: &RunConfig) -> Result<(Table, String)> {
    let model = cfg.chain_model()?;
    let p = cfg.params()?;
    let v0 = cfg.v0_abs()?;
    let n = model.n_sites;
    let scheme: Scheme = cfg.protocol.scheme.into();
    let ratio = cfg.chain.lattice_ratio;
    let [lo, hi] = cfg.protocol.tau_range;
    let grid = linspace(lo, hi, cfg.protocol.samples);
    let nh_method = if n <= DEFAULT_STATE_CAP { Method::ConditionalNh } else { Method::Analytic };
    let with_me = n <= DEFAULT_DENSE_CAP;

    let rows: Vec<Vec<String>> = grid
        .par_iter()
        .map(|&x| -> Result<Vec<String>> {
            let tau = x / v0;
            let echo = |m: Method, d: Dissipation| xi2_or_empty(run_echo(&EchoProtocol::new(tau, scheme, m, ratio).with_dissipation(d), &model));
            let me = if with_me { num(echo(Method::ExactMe, Dissipation::Full)?) } else { String::new() };
            Ok(vec![
                num(x),
                me,
                num(echo(nh_method, Dissipation::Full)?),
                num(echo(nh_method, Dissipation::NoTwoBody)?),
                num(echo(Method::Analytic, Dissipation::Coherent)?),
            ])
        })
        .collect::<Result<_>>()?;

    let mut t = Table::new("squeeze", config_name(cfg), &["V0tau", "xi2_me", "xi2_nh", "xi2_nh_no_tbd", "xi2_coherent"]);
    t.comment(format!("N={n} Rc_over_a={} scheme={} nh_method={}", num(ratio), scheme_label(scheme), if nh_method == Method::Analytic { "analytic" } else { "conditional_nh" }));
    if p.g > 0.0 {
        t.comment(format!("t_half_pi={}", num(EchoProtocol::half_pi_duration(p.g))));
    }
    for r in rows {
        t.push(r);
    }
    let protocol = EchoProtocol::new(0.0, scheme, cfg.protocol.method.into(), ratio).with_dissipation(cfg.protocol.dissipation.into());
    let best = optimize_tau(&protocol, &model, (lo / v0, hi / v0))?;
    let s = if best.is_sentinel() {
        "squeeze: no squeezing in window (xi2 > 1 throughout)".to_string()
    } else {
        format!("squeeze: xi2_min = {:.6} at V0tau = {:.6}", best.xi2_min, best.tau_min * v0)
    };
    Ok((t, s))
}

fn scan(cfg: &RunConfig) -> Result<(Table, String)> {
    let sc = cfg.scan.as_ref().context("config has no `scan` section")?;
    let f = cfg.units.factor();
    let setup = cfg.setup()?;
    let schemes: Vec<Scheme> = sc.schemes.iter().map(|&s| s.into()).collect();
    let rows = scan_scaling(&setup, &schemes, &sc.lattice_ratios, &sc.n_list, &sc.gamma_list, (sc.tau_range[0], sc.tau_range[1]), &TauSearch::default())?;
    let mut t = Table::new("scan", config_name(cfg), &["scheme", "Rc_over_a", "N", "gamma", "xi2_min", "V0tau_min"]);
    for r in &rows {
        t.push(vec![
            scheme_label(r.scheme).to_string(),
            num(r.lattice_ratio),
            r.n_sites.to_string(),
            num(r.gamma / f),
            num(r.xi2_min),
            num(r.v0_tau_min),
        ]);
    }
    let best = rows.iter().map(|r| r.xi2_min).fold(f64::INFINITY, f64::min);
    Ok((t, format!("scan: {} rows, best xi2_min = {best:.6}", rows.len())))
}

fn validate(out_dir: &Path) -> Result<Outcome> {
    let checks = run_suite()?;
    let mut t = Table::new("validate", "presets", &["check", "status", "detail"]);
    let mut failed = 0;
    for c in &checks {
        let status = match c.status {
            Status::Pass => "PASS",
            Status::Fail => {
                failed += 1;
                "FAIL"
            }
            Status::KnownDeviation => "KNOWN-DEVIATION",
        };
        println!("{status} {}: {}", c.name, c.detail);
        t.push(vec![c.name.to_string(), status.to_string(), c.detail.clone()]);
    }
    let path = out_dir.join("validate.csv");
    t.write(&path)?;
    Ok(Outcome {
        summary: format!("validate: {} checks, {failed} failed -> {}", checks.len(), path.display()),
        exit_code: if failed > 0 { 2 } else { 0 },
    })
}
