use num_complex::Complex;
use optoswap::experiments::{
    cooling_summary, fock_transfer, kitten_estimate, kitten_fidelity, kitten_optimum, odd_cat, KittenSetting,
};
use optoswap::gaussian::{cooling_surface, propagate, protocol_map_for_mu, tolerance_width, GaussianState, ProtocolMap};
use optoswap::heating::{absorption_heating, HeatingParams};
use optoswap::linalg::Mat4;
use optoswap::oracle::{
    fock_protocol_oracle, mc_covariance, number_amplitudes, pure_density, squeezed_number_state, trace_distance,
    FockSimConfig, McConfig,
};
use optoswap::params::{derive_quantities, DerivedQuantities, ParamsFile};
use optoswap::phasespace::{analytic_wigner, transfer_to_mechanics, wigner_grid, GridSpec, StateSpec};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::config::ConfigFile;
use crate::output::{num, wigner_csv, Csv, Metadata, Writer};
use crate::CliError;

pub struct Context {
    pub config: ConfigFile,
    pub grid: GridSpec<f64>,
    pub seed: u64,
    pub writer: Writer,
}

fn grid_json(g: &GridSpec<f64>) -> serde_json::Value {
    json!({ "r_max": g.r_max, "n_points": g.n_points })
}

pub fn table1(ctx: &mut Context) -> Result<(), CliError> {
    let sweep = &ctx.config.sweep;
    if sweep.temperatures_k.is_empty() {
        return Err(CliError::Config("sweep.temperatures_k must not be empty".into()));
    }
    let mut rows = Vec::new();
    let mut params = Vec::new();
    for &t in &sweep.temperatures_k {
        let p = ctx.config.params.apply(t)?;
        params.push(ParamsFile::from_params(&p));
        rows.push(cooling_summary(&p)?);
    }
    let coldest = sweep.temperatures_k.iter().copied().fold(f64::INFINITY, f64::min);
    let p = ctx.config.params.apply(coldest)?;
    let d = derive_quantities(&p)?;
    let out = fock_transfer(&d, p.eta_l, sweep.n_initial, 1, ctx.grid)?;
    let report = json!({
        "experiment": "table1",
        "convention": optoswap::CONVENTION,
        "generator": format!("optoswap {}", env!("CARGO_PKG_VERSION")),
        "parameters": params,
        "rows": rows,
        "single_quantum_transfer": {
            "temperature_k": p.temperature,
            "n_initial": sweep.n_initial,
            "target_n": 1,
            "mu": [1.0, 1.0, 1.0],
            "grid": grid_json(&ctx.grid),
            "fidelity": out.fidelity,
            "wigner_min": out.negativity.min_value,
            "boundary_chi": out.fourier.boundary_max,
            "aliasing_risk": out.fourier.aliasing_risk,
        },
    });
    ctx.writer.json("table1.json", &report)
}

pub fn cool_surface(ctx: &mut Context) -> Result<(), CliError> {
    let sweep = &ctx.config.sweep;
    let gammas = sweep.gamma_ratio.values("sweep.gamma_ratio")?;
    let baths = sweep.n_bath.values("sweep.n_bath")?;
    let eta_l = ctx.config.params.eta_l.unwrap_or(1.0);
    let cells = cooling_surface(&gammas, &baths, eta_l)?;
    let mut csv = Csv::new(&["gamma_over_omega", "n_bath", "n_final", "cooling_bound"]);
    for c in &cells {
        csv.row(&[num(c.gamma), num(c.n_bath), num(c.n_final), num(c.cooling_bound)]);
    }
    let meta = Metadata {
        experiment: "cool-surface",
        parameters: json!({
            "mu": [1.0, 1.0, 1.0],
            "eta_l": eta_l,
            "gamma_over_omega": sweep.gamma_ratio,
            "n_bath": sweep.n_bath,
            "order": "gamma-major",
        }),
        seed: None,
    };
    ctx.writer.csv("cool_surface", &csv, &meta)
}

pub fn fock_transfer_cmd(ctx: &mut Context) -> Result<(), CliError> {
    let sweep = ctx.config.sweep.clone();
    if sweep.fock_n.is_empty() || sweep.q_m.is_empty() {
        return Err(CliError::Config("sweep.fock_n and sweep.q_m must not be empty".into()));
    }
    let eta_l = ctx.config.params.eta_l.unwrap_or(1.0);
    let grid = ctx.grid;
    let cells: Vec<(usize, usize, f64)> = sweep
        .fock_n
        .iter()
        .flat_map(|&n| sweep.q_m.iter().enumerate().map(move |(i, &q)| (n, i, q)))
        .collect();
    for &(_, _, q) in &cells {
        if !(q > 0.5) {
            return Err(CliError::Config(format!("sweep.q_m: Q_M must exceed 0.5, got {q}")));
        }
    }
    let results = cells
        .par_iter()
        .map(|&(n, _, q)| {
            let d = DerivedQuantities::from_damping_ratio(1.0 / q, sweep.transfer_n_bath)?;
            fock_transfer(&d, eta_l, sweep.n_initial, n, grid)
        })
        .collect::<optoswap::Result<Vec<_>>>()?;

    let mut summary = Csv::new(&[
        "n",
        "q_m",
        "infidelity",
        "quadrature_error",
        "wigner_min",
        "integrated_negativity",
        "boundary_chi",
    ]);
    for (&(n, i, q), out) in cells.iter().zip(&results) {
        let meta = Metadata {
            experiment: "fock-transfer",
            parameters: json!({
                "target_n": n,
                "q_m": q,
                "n_bath": sweep.transfer_n_bath,
                "n_initial": sweep.n_initial,
                "eta_l": eta_l,
                "mu": [1.0, 1.0, 1.0],
                "grid": grid_json(&grid),
                "aliasing_risk": out.fourier.aliasing_risk,
            }),
            seed: None,
        };
        ctx.writer.csv(&format!("wigner_n{n}_q{i}"), &wigner_csv(&out.wigner), &meta)?;
        summary.row(&[
            n.to_string(),
            num(q),
            num(out.fidelity.infidelity),
            num(out.fidelity.quadrature_error_estimate),
            num(out.negativity.min_value),
            num(out.negativity.integrated),
            num(out.fourier.boundary_max),
        ]);
    }
    let meta = Metadata {
        experiment: "fock-transfer",
        parameters: json!({
            "n_bath": sweep.transfer_n_bath,
            "n_initial": sweep.n_initial,
            "eta_l": eta_l,
            "grid": grid_json(&grid),
            "wigner_files": "wigner_n<n>_q<index into q_m>.csv",
        }),
        seed: None,
    };
    ctx.writer.csv("fock_transfer", &summary, &meta)
}

pub fn kitten(ctx: &mut Context) -> Result<(), CliError> {
    let sweep = ctx.config.sweep.clone();
    let xis = sweep.xi.values("sweep.xi")?;
    let grid = ctx.grid;
    let settings = [
        ("decoherence_free", KittenSetting::decoherence_free()),
        (
            "damped",
            KittenSetting::damped(sweep.kitten_gamma_ratio, sweep.kitten_n_bath, sweep.n_initial)?,
        ),
    ];
    let mut alphas = Vec::new();
    for &a2 in &sweep.alpha_sq {
        if !(a2 > 0.0 && a2.is_finite()) {
            return Err(CliError::Config(format!("sweep.alpha_sq entries must be positive, got {a2}")));
        }
        alphas.push(Complex::new(a2.sqrt(), 0.0));
        alphas.push(Complex::new(0.0, a2.sqrt()));
    }
    let targets = alphas
        .par_iter()
        .map(|&a| analytic_wigner(&odd_cat(a), grid))
        .collect::<optoswap::Result<Vec<_>>>()?;

    let mut cells: Vec<(usize, usize, f64)> = Vec::new();
    for s in 0..settings.len() {
        for a in 0..alphas.len() {
            cells.extend(xis.iter().map(|&xi| (s, a, xi)));
        }
    }
    let values = cells
        .par_iter()
        .map(|&(s, a, xi)| kitten_fidelity(&settings[s].1, xi, &targets[a]).map(|f| f.infidelity))
        .collect::<optoswap::Result<Vec<_>>>()?;

    let header = ["setting", "alpha_re", "alpha_im", "alpha_sq", "xi", "infidelity", "xi_estimate"];
    let mut csv = Csv::new(&header);
    for (&(s, a, xi), inf) in cells.iter().zip(&values) {
        let al = alphas[a];
        csv.row(&[
            settings[s].0.to_string(),
            num(al.re),
            num(al.im),
            num(al.norm_sqr()),
            num(xi),
            num(*inf),
            num(kitten_estimate(al)),
        ]);
    }
    let params = json!({
        "mu": "(1, exp(-xi), 1)",
        "light_input": "fock(1)",
        "target": "odd cat",
        "decoherence_free": { "gamma_over_omega": 0.0, "mechanics_in": "vacuum" },
        "damped": {
            "gamma_over_omega": sweep.kitten_gamma_ratio,
            "n_bath": sweep.kitten_n_bath,
            "n_initial": sweep.n_initial,
        },
        "xi": sweep.xi,
        "grid": grid_json(&grid),
    });
    let meta = Metadata {
        experiment: "kitten",
        parameters: params.clone(),
        seed: None,
    };
    ctx.writer.csv("kitten", &csv, &meta)?;

    let opt_cells: Vec<(usize, usize)> = (0..settings.len())
        .flat_map(|s| (0..alphas.len()).map(move |a| (s, a)))
        .collect();
    // Imaginary amplitudes want positive squeezing, so search a symmetric interval.
    let bound = sweep.xi.min.abs().max(sweep.xi.max.abs());
    let optima = opt_cells
        .par_iter()
        .map(|&(s, a)| kitten_optimum(&settings[s].1, alphas[a], grid, -bound, bound))
        .collect::<optoswap::Result<Vec<_>>>()?;
    let mut csv = Csv::new(&["setting", "alpha_re", "alpha_im", "alpha_sq", "xi_opt", "infidelity_opt", "xi_estimate"]);
    for (&(s, a), o) in opt_cells.iter().zip(&optima) {
        let al = alphas[a];
        csv.row(&[
            settings[s].0.to_string(),
            num(al.re),
            num(al.im),
            num(al.norm_sqr()),
            num(o.xi),
            num(o.infidelity),
            num(o.xi_estimate),
        ]);
    }
    let mut params = params;
    params["search_interval"] = json!([-bound, bound]);
    let meta = Metadata {
        experiment: "kitten-optimum",
        parameters: params,
        seed: None,
    };
    ctx.writer.csv("kitten_optimum", &csv, &meta)
}

pub fn tolerance(ctx: &mut Context) -> Result<(), CliError> {
    let sweep = &ctx.config.sweep;
    let eps = sweep.epsilon.values("sweep.epsilon")?;
    let eta_l = ctx.config.params.eta_l.unwrap_or(1.0);
    let cells: Vec<(f64, f64)> = sweep
        .tolerance_n_bath
        .iter()
        .flat_map(|&nb| eps.iter().map(move |&e| (nb, e)))
        .collect();
    let widths = cells
        .par_iter()
        .map(|&(nb, e)| tolerance_width(e, eta_l, nb))
        .collect::<optoswap::Result<Vec<_>>>()?;
    let mut csv = Csv::new(&[
        "n_bath",
        "epsilon",
        "q_m",
        "mu_at_min",
        "n_min",
        "mu_low",
        "mu_high",
        "width_numeric",
        "width_analytic",
        "width_ratio",
        "dn_over_n",
    ]);
    for (&(nb, e), w) in cells.iter().zip(&widths) {
        let q = DerivedQuantities::from_epsilon(e, nb)?.q_m.unwrap_or(f64::INFINITY);
        csv.row(&[
            num(nb),
            num(e),
            num(q),
            num(w.mu_at_min),
            num(w.n_min),
            num(w.mu_low),
            num(w.mu_high),
            num(w.width_numeric),
            num(w.width_analytic),
            num(w.width_numeric / w.width_analytic),
            num(w.dn_over_n),
        ]);
    }
    let meta = Metadata {
        experiment: "tolerance",
        parameters: json!({ "eta_l": eta_l, "epsilon": sweep.epsilon, "n_bath": sweep.tolerance_n_bath, "mu": "(m, m, m)" }),
        seed: None,
    };
    ctx.writer.csv("tolerance", &csv, &meta)
}

pub fn heating(ctx: &mut Context) -> Result<(), CliError> {
    let sweep = &ctx.config.sweep;
    let mut hp = HeatingParams::sin_microstring(sweep.finesse, sweep.n_photons);
    if let Some(f) = ctx.config.params.omega_m_hz {
        hp.omega_m = std::f64::consts::TAU * f;
    }
    let report = absorption_heating(&hp)?;
    let mut baths = Vec::new();
    for &t in &sweep.temperatures_k {
        let d = derive_quantities(&ctx.config.params.apply(t)?)?;
        baths.push(json!({
            "temperature_k": t,
            "n_bath": d.n_bath,
            "relative_rise": report.delta_n_bath / d.n_bath,
        }));
    }
    let value = json!({
        "experiment": "heating",
        "convention": optoswap::CONVENTION,
        "generator": format!("optoswap {}", env!("CARGO_PKG_VERSION")),
        "parameters": hp,
        "report": report,
        "delta_n_bath_per_finesse_photon": report.delta_n_bath / (hp.finesse * hp.n_photons),
        "thermal_rate_unit": "rad/s",
        "baths": baths,
    });
    ctx.writer.json("heating.json", &value)
}

#[derive(Serialize)]
struct Check {
    name: &'static str,
    value: f64,
    threshold: f64,
    pass: bool,
}

fn below(name: &'static str, value: f64, threshold: f64) -> Check {
    Check {
        name,
        value,
        threshold,
        pass: value < threshold,
    }
}

/// Compares the oracles with the closed-form pipeline; returns whether every
/// check passed.
pub fn verify(ctx: &mut Context) -> Result<bool, CliError> {
    let sweep = &ctx.config.sweep;
    let mc = McConfig {
        n_samples: sweep.mc_samples,
        seed: ctx.seed,
        batch: (sweep.mc_samples / 100).max(2),
    };
    let mut checks = Vec::new();

    let p = ctx.config.params.apply(4.0)?;
    let d = derive_quantities(&p)?;
    let pm = protocol_map_for_mu([1.0; 3], &d, p.eta_l)?;
    let input = GaussianState::thermal_mechanics(d.n_bath);
    let exact = propagate(&input, &pm)?;
    let est = mc_covariance(&pm, &input.cov, &mc)?;
    checks.push(below("mc_protocol_max_z", est.max_z_score(&exact.cov), 5.0));
    checks.push(below(
        "mc_protocol_occupancy_z",
        (est.mech_occupancy - exact.mechanics().occupancy()).abs() / est.mech_occupancy_std_err,
        5.0,
    ));

    let thermal = Mat4::diagonal([21.0, 21.0, 1.0, 1.0]);
    let swap = ProtocolMap::ideal_swap();
    let swapped = propagate(&GaussianState { mean: [0.0; 4], cov: thermal }, &swap)?;
    let est = mc_covariance(&swap, &thermal, &mc)?;
    checks.push(below("mc_ideal_swap_max_z", est.max_z_score(&swapped.cov), 5.0));

    let small = GridSpec {
        r_max: ctx.grid.r_max,
        n_points: ctx.grid.n_points.min(128),
    };
    let fock = |chi: [f64; 3], light: StateSpec<f64>| {
        fock_protocol_oracle(&FockSimConfig {
            grid: small,
            ..FockSimConfig::new(chi, StateSpec::vacuum(), light)
        })
    };
    let one = fock([-1.0; 3], StateSpec::Fock(1))?;
    let target = pure_density(&number_amplitudes(&StateSpec::Fock(1), 32)?);
    checks.push(below("fock_swap_trace_distance", trace_distance(&one.rho_m, &target)?, 1e-6));

    let vac = fock([-1.0; 3], StateSpec::vacuum())?;
    checks.push(below("fock_vacuum_infidelity", 1.0 - vac.rho_m[(0, 0)].re, 1e-8));

    let mu2 = 0.1f64.exp();
    let sq = fock([-1.0 / mu2, -mu2, -1.0 / mu2], StateSpec::Fock(1))?;
    let sq_target = pure_density(&squeezed_number_state(1, -0.1, 32)?);
    checks.push(below("squeezed_swap_trace_distance", trace_distance(&sq.rho_m, &sq_target)?, 1e-4));

    let lossless = DerivedQuantities::from_epsilon(0.0, 0.0)?;
    let cat = StateSpec::Cat {
        alpha: Complex::new(0.8, 0.3),
        parity: optoswap::phasespace::Parity::Odd,
    };
    for (name, mu, chi) in [
        ("cat_swap_wigner_sup", [1.0, 1.0, 1.0], [-1.0; 3]),
        ("cat_squeezed_swap_wigner_sup", [1.0, mu2, 1.0], [-1.0 / mu2, -mu2, -1.0 / mu2]),
    ] {
        let pm = protocol_map_for_mu(mu, &lossless, 1.0)?;
        let cf = transfer_to_mechanics(&StateSpec::vacuum(), &cat, &pm)?;
        let (w, _) = wigner_grid(&cf, small)?;
        let o = fock(chi, cat.clone())?;
        checks.push(below(name, w.sup_distance(&o.wigner)?, 1e-4));
    }

    let pass = checks.iter().all(|c| c.pass);
    let report = json!({
        "experiment": "verify",
        "convention": optoswap::CONVENTION,
        "generator": format!("optoswap {}", env!("CARGO_PKG_VERSION")),
        "seed": ctx.seed,
        "monte_carlo": mc,
        "fock_dims": 32,
        "grid": grid_json(&small),
        "checks": checks,
        "pass": pass,
    });
    ctx.writer.json("verify.json", &report)?;
    for c in &checks {
        println!("{} {}: {:.3e} (threshold {:.1e})", if c.pass { "PASS" } else { "FAIL" }, c.name, c.value, c.threshold);
    }
    Ok(pass)
}
