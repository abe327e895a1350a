//! Self-check suite behind the `validate` command: oracle equivalences and
//! figure-level tolerances evaluated on the shipped presets.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::preset;
use crate::dressing::{coherence, coherence_soft_core, delta2, dressed_potential, full_dressed_potential, gamma1, gamma2, v0, DressingParams};
use crate::error::Result;
use crate::lindblad::{
    evolve_effective_pair, evolve_master_equation, evolve_three_level_pair, DensityState, PairPopulations, SpinChainModel,
};
use crate::meanfield_nh::{analytic_moments, MeanFieldRates, PhaseTable};
use crate::squeezing::{conditional_echo_moments, optimize_tau, run_echo, scan_scaling, Dissipation, EchoProtocol, Method, Scheme, TauSearch};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    /// Documented gap between the stated target and the model; reported, not counted.
    KnownDeviation,
}

#[derive(Clone, Debug)]
pub struct Check {
    pub name: &'static str,
    pub status: Status,
    pub detail: String,
}

impl Check {
    fn new(name: &'static str, ok: bool, detail: String) -> Self {
        Self { name, status: if ok { Status::Pass } else { Status::Fail }, detail }
    }

    fn deviation(name: &'static str, ok: bool, detail: String) -> Self {
        Self { name, status: if ok { Status::Pass } else { Status::KnownDeviation }, detail }
    }
}

fn within(x: f64, target: f64, tol: f64) -> bool {
    (x - target).abs() <= tol
}

fn squeezing_checks(out: &mut Vec<Check>) -> Result<()> {
    let cfg = preset("fig3")?;
    let setup = cfg.setup()?;
    let v0 = cfg.v0_abs()?;
    let gamma = cfg.params()?.gamma;
    let range = (cfg.protocol.tau_range[0] / v0, cfg.protocol.tau_range[1] / v0);

    let a = setup.chain(Scheme::Rmd, 10, 1.0, gamma)?;
    let diss = optimize_tau(&EchoProtocol::new(0.0, Scheme::Rmd, Method::ConditionalNh, 1.0), &a, range)?;
    out.push(Check::new(
        "fig3a_dissipative",
        within(diss.xi2_min, 0.60, 0.05) && within(diss.tau_min * v0, 0.17, 0.03),
        format!("xi2_min = {:.4} (0.60 ± 0.05), V0tau_min = {:.4} (0.17 ± 0.03)", diss.xi2_min, diss.tau_min * v0),
    ));
    let coh = optimize_tau(
        &EchoProtocol::new(0.0, Scheme::Rmd, Method::Analytic, 1.0).with_dissipation(Dissipation::Coherent),
        &a,
        range,
    )?;
    out.push(Check::new("fig3a_coherent", within(coh.xi2_min, 0.58, 0.03), format!("xi2_min = {:.4} (0.58 ± 0.03)", coh.xi2_min)));

    let b = setup.chain(Scheme::Rmd, 10, 3.0, gamma)?;
    let diss_b = optimize_tau(&EchoProtocol::new(0.0, Scheme::Rmd, Method::ConditionalNh, 3.0), &b, range)?;
    out.push(Check::new("fig3b_dissipative", within(diss_b.xi2_min, 0.83, 0.05), format!("xi2_min = {:.4} (0.83 ± 0.05)", diss_b.xi2_min)));

    let coh_b = optimize_tau(
        &EchoProtocol::new(0.0, Scheme::Rmd, Method::Analytic, 3.0).with_dissipation(Dissipation::Coherent),
        &b,
        range,
    )?;
    out.push(Check::new(
        "sign_cancellation",
        coh_b.xi2_min > coh.xi2_min,
        format!("coherent xi2_min: Rc=3a {:.4} > Rc=a {:.4}", coh_b.xi2_min, coh.xi2_min),
    ));

    let small = setup.chain(Scheme::Rmd, 8, 1.0, gamma)?;
    let opt = optimize_tau(&EchoProtocol::new(0.0, Scheme::Rmd, Method::Analytic, 1.0), &small, range)?;
    let mut worst: f64 = 0.0;
    for i in 1..=6 {
        let tau = opt.tau_min * 2.0 * i as f64 / 6.0;
        let vals: Vec<f64> = [Method::ExactMe, Method::ConditionalNh, Method::Analytic]
            .iter()
            .map(|&m| run_echo(&EchoProtocol::new(tau, Scheme::Rmd, m, 1.0), &small).map(|r| r.xi2))
            .collect::<Result<_>>()?;
        worst = worst.max((vals[0] - vals[1]).abs()).max((vals[0] - vals[2]).abs()).max((vals[1] - vals[2]).abs());
    }
    out.push(Check::new("method_agreement_n8", worst <= 0.05, format!("max |Δxi2| = {worst:.4} (≤ 0.05)")));
    Ok(())
}

fn random_couplings(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let mut v = vec![0.0; n * n];
    for j in 0..n {
        for k in (j + 1)..n {
            let x = rng.gen_range(-1.5..1.5);
            v[j * n + k] = x;
            v[k * n + j] = x;
        }
    }
    v
}

fn oracle_checks(out: &mut Vec<Check>) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    for trial in 0..20 {
        let n = 2 + trial % 9;
        let v = random_couplings(&mut rng, n);
        let tau = rng.gen_range(0.1..3.0);
        let model = SpinChainModel::new(n, 1.0, v.clone(), 0.0, vec![0.0; n * n], 0.0, vec![0.0; n])?;
        let closed = analytic_moments(&PhaseTable::from_couplings(n, &v, tau), n);
        let brute = conditional_echo_moments(&model, tau, &MeanFieldRates::default())?;
        worst = worst.max(closed.max_abs_diff(&brute));
    }
    out.push(Check::new("oracle_equivalence", worst <= 1e-10, format!("max moment deviation = {worst:.2e} (≤ 1e-10)")));

    let mut worst_c: f64 = 0.0;
    for _ in 0..10_000 {
        let omega: f64 = rng.gen_range(0.1..3.0);
        let delta: f64 = rng.gen_range(2.0..20.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let gamma: f64 = rng.gen_range(1e-3..0.5);
        let u: f64 = rng.gen_range(-60.0..60.0);
        let p = DressingParams::dressing(omega, delta, gamma)?;
        let d2 = u + 2.0 * delta;
        let v = omega.powi(4) / (8.0 * delta.powi(3)) * d2 * u / (d2 * d2 + gamma * gamma);
        let g1 = omega * omega * gamma / (4.0 * delta * delta);
        let g2 = omega.powi(4) * gamma / (2.0 * delta * delta * (d2 * d2 + gamma * gamma));
        let want = v / (2.0 * g1 + g2);
        let got = coherence(u, &p)?;
        if want != 0.0 {
            worst_c = worst_c.max(((got - want) / want).abs());
        }
    }
    out.push(Check::new("coherence_identity", worst_c <= 1e-12, format!("max relative deviation = {worst_c:.2e} (≤ 1e-12)")));
    Ok(())
}

fn dressing_checks(out: &mut Vec<Check>) -> Result<()> {
    let cfg = preset("fig1")?;
    let p = cfg.params()?;
    let pot = cfg.potential()?;
    let u_rc = pot.u_min;
    let enh = dressed_potential(u_rc, &p)? / v0(&p)?;
    let tbd = (2.0 * gamma1(&p)? + gamma2(u_rc, &p)?) / (2.0 * gamma1(&p)?);
    out.push(Check::new(
        "enhancement_at_rc",
        enh.abs() >= 5.0 && tbd <= 2.0,
        format!("|V(Rc)/V0| = {:.3} (≥ 5), (2γ1+γ2)/2γ1 = {tbd:.3} (≤ 2)", enh.abs()),
    ));

    let unit = DressingParams::dressing(1.0, 10.0, 0.01)?;
    let cs = coherence_soft_core(&unit)?;
    let mut ratios = Vec::new();
    for d2 in [1.0, -1.0] {
        let u = d2 - 2.0 * unit.delta;
        let r: f64 = coherence(u, &unit)? / cs;
        ratios.push(r.abs());
    }
    let ok = ratios.iter().all(|r| within(*r, 10.0, 0.1));
    out.push(Check::deviation(
        "coherence_enhancement_ratio",
        ok,
        format!("|C_m/C_s| = {:.3} at Δ2 = +Ω, {:.3} at Δ2 = −Ω (target 10 ± 1%)", ratios[0], ratios[1]),
    ));

    let v0_abs = v0(&p)?.abs();
    let mut worst: f64 = 0.0;
    for &u in &pot.curve {
        if delta2(u, &p).abs() >= 2.0 * p.omega {
            let full = full_dressed_potential(u, &p)?;
            worst = worst.max((full - dressed_potential(u, &p)?).abs() / v0_abs);
        }
    }
    out.push(Check::new("perturbative_vs_full", worst <= 0.15, format!("max |V_full − V|/V0 = {worst:.4} (≤ 0.15) where |Δ2| ≥ 2Ω")));
    Ok(())
}

fn open_system_checks(out: &mut Vec<Check>) -> Result<()> {
    let cfg = preset("figS2")?;
    let p = cfg.params()?;
    let u12 = cfg.dynamics.as_ref().and_then(|d| d.u12).unwrap_or(21.0);
    let v0_abs = v0(&p)?.abs();
    let t_max = cfg.dynamics.as_ref().map_or(10.0, |d| d.t_max) / v0_abs;
    let times: Vec<f64> = (0..=100).map(|i| t_max * i as f64 / 100.0).collect();
    let three = evolve_three_level_pair(&p, u12, &DensityState::basis(9, 0), &times)?;
    let eff = evolve_effective_pair(&p, u12, &DensityState::basis(4, 0), &times)?;
    let mut worst: f64 = 0.0;
    for label in [PairPopulations::GROUND, PairPopulations::SYMMETRIC, PairPopulations::DOUBLE] {
        if let (Some(a), Some(b)) = (three.population(label), eff.population(label)) {
            for (x, y) in a.iter().zip(b) {
                worst = worst.max((x - y).abs());
            }
        }
    }
    out.push(Check::new(
        "effective_pair_model",
        worst <= 0.02 && three.all_checks_ok() && eff.all_checks_ok(),
        format!("sup |Δpopulation| = {worst:.4} (≤ 0.02)"),
    ));

    let fig2 = preset("fig2")?;
    let setup = fig2.setup()?;
    let fp = fig2.params()?;
    let model = setup.chain(Scheme::Rmd, 4, 1.0, fp.gamma)?.with_drive(fp.g);
    let v0_2 = fig2.v0_abs()?;
    let times: Vec<f64> = (0..=20).map(|i| i as f64 / v0_2).collect();
    let s = evolve_master_equation(&model, &DensityState::equator(4), &times)?;
    out.push(Check::new("density_state_invariants", s.all_checks_ok(), format!("{} output times checked", s.checks.len())));

    let g1: f64 = 0.3;
    let single = SpinChainModel::new(1, 1.0, vec![0.0], g1, vec![0.0], 0.0, vec![0.0])?;
    let times = [0.0f64, 1.0, 3.0, 7.0];
    let s = evolve_master_equation(&single, &DensityState::equator(1), &times)?;
    let mut worst_rel: f64 = 0.0;
    for (t, jx) in times.iter().zip(&s.jx) {
        let want = 0.5 * (-g1 * t / 2.0).exp();
        worst_rel = worst_rel.max(((jx - want) / want).abs());
    }
    out.push(Check::new("pure_dephasing_law", worst_rel <= 1e-6, format!("max relative deviation = {worst_rel:.2e} (≤ 1e-6)")));
    Ok(())
}

fn scaling_checks(out: &mut Vec<Check>) -> Result<()> {
    let cfg = preset("fig4")?;
    let setup = cfg.setup()?;
    let range = (1e-3, 2.0);
    let search = TauSearch::default();
    let rows = scan_scaling(&setup, &[Scheme::Rmd], &[1.0], &[10, 50, 100, 150, 200], &[0.005], range, &search)?;
    let ok = rows.iter().all(|r| r.xi2_min < 1.0 && r.v0_tau_min > 0.0 && r.v0_tau_min < 0.17);
    let worst = rows.iter().map(|r| r.xi2_min).fold(0.0f64, f64::max);
    out.push(Check::new("rmd_robust_to_n200", ok, format!("max xi2_min = {worst:.4} (< 1) with V0tau_min < 0.17")));

    let ns = [50, 100, 150];
    let rmd = scan_scaling(&setup, &[Scheme::Rmd], &[2.0], &ns, &[0.005], range, &search)?;
    let srd = scan_scaling(&setup, &[Scheme::Srd], &[2.0], &ns, &[0.005], range, &search)?;
    let ok = rmd.iter().zip(&srd).all(|(a, b)| a.xi2_min < b.xi2_min);
    out.push(Check::new(
        "rmd_beats_srd_rc2a",
        ok,
        rmd.iter().zip(&srd).map(|(a, b)| format!("N={}: {:.3} < {:.3}", a.n_sites, a.xi2_min, b.xi2_min)).collect::<Vec<_>>().join(", "),
    ));

    let srd3 = scan_scaling(&setup, &[Scheme::Srd], &[3.0], &[10, 20, 29], &[0.005], range, &search)?;
    let best = srd3.iter().map(|r| r.xi2_min).fold(f64::INFINITY, f64::min);
    out.push(Check::deviation(
        "srd_rc3a_below_half",
        srd3.iter().all(|r| r.xi2_min < 0.5),
        format!("SRD Rc=3a, N<30: best xi2_min = {best:.4} (target < 0.5)"),
    ));
    Ok(())
}

/// Runs every check; errors inside a group abort the suite.
pub fn run_suite() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    oracle_checks(&mut out)?;
    dressing_checks(&mut out)?;
    squeezing_checks(&mut out)?;
    open_system_checks(&mut out)?;
    scaling_checks(&mut out)?;
    Ok(out)
}
