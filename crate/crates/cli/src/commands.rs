use rayon::prelude::*;
use serde_json::Value;
use tfmetro_core::metrology::{crb, Regime};
use tfmetro_core::superres::{
    design_from_sphere, efficiency_bounds, efficiency_factor, gamma_modes, gram_schmidt, optimal_povm,
    superres_fisher_with, time_limited_design, time_limited_design_with, FreeEntries, MeasurementDesign, Psf,
    SuperresOptions, TwoPulseModel,
};
use tfmetro_core::{
    build_basis, io::basis_to_json, lambda0_curve, plunge_index, Error, HermiteGaussMode, ProlateBasis,
    SlepianParams,
};

use crate::config::{Command, RunConfig};
use crate::error::{CliError, Result};
use crate::output::{Cell, Payload, Table};

pub fn run_command(cfg: &RunConfig) -> Result<Payload> {
    match cfg.command {
        Command::Spectrum => spectrum(cfg).map(Payload::Table),
        Command::Fig1 => fig1(cfg).map(Payload::Table),
        Command::Lambda0 => lambda0(cfg).map(Payload::Table),
        Command::Superres => superres(cfg).map(Payload::Table),
        Command::Basis => basis(cfg),
    }
}

fn params(cfg: &RunConfig, c: f64) -> Result<SlepianParams> {
    Ok(SlepianParams::new(c, cfg.t)?)
}

/// Explicit `n_max`/`quad_order` when configured, otherwise `default`.
fn configured_basis(
    cfg: &RunConfig,
    p: SlepianParams,
    default: impl FnOnce() -> tfmetro_core::Result<ProlateBasis>,
) -> Result<ProlateBasis> {
    Ok(match (cfg.n_max, cfg.quad_order) {
        (Some(n), Some(q)) => build_basis(p, n, q)?,
        (Some(n), None) => ProlateBasis::new(p, n)?,
        (None, Some(q)) => build_basis(p, plunge_index(p.c()) + 4, q)?,
        (None, None) => default()?,
    })
}

/// `⌈2c/π⌉ + 10` eigenvalues, or as many as lie above the numerical floor.
fn spectrum_basis(p: SlepianParams) -> tfmetro_core::Result<ProlateBasis> {
    match ProlateBasis::new(p, plunge_index(p.c()) + 10) {
        Err(Error::InsufficientSpectrum { available, .. }) if available > 0 => ProlateBasis::new(p, available - 1),
        other => other,
    }
}

fn spectrum(cfg: &RunConfig) -> Result<Table> {
    let bases: Vec<ProlateBasis> = cfg
        .c
        .par_iter()
        .map(|&c| {
            let p = params(cfg, c)?;
            configured_basis(cfg, p, || spectrum_basis(p))
        })
        .collect::<Result<_>>()?;
    let mut t = Table::new(vec!["c", "n", "lambda", "plunge_index"]);
    for b in &bases {
        let c = b.params().c();
        for (n, &l) in b.lambdas().iter().enumerate() {
            t.push(vec![c.into(), n.into(), l.into(), plunge_index(c).into()]);
        }
    }
    Ok(t)
}

fn lambda0(cfg: &RunConfig) -> Result<Table> {
    let mut t = Table::new(vec!["c", "lambda0"]);
    if cfg.n_max.is_none() && cfg.quad_order.is_none() {
        for (c, l) in lambda0_curve(&cfg.c)? {
            t.push(vec![c.into(), l.into()]);
        }
        return Ok(t);
    }
    let rows: Vec<(f64, f64)> = cfg
        .c
        .par_iter()
        .map(|&c| {
            let p = params(cfg, c)?;
            let b = configured_basis(cfg, p, || ProlateBasis::new(p, 0))?;
            Ok((c, b.lambda(0)))
        })
        .collect::<Result<_>>()?;
    for (c, l) in rows {
        t.push(vec![c.into(), l.into()]);
    }
    Ok(t)
}

/// `ψ₂(c, t)` and `ψ₂ᴴᴳ(c, t)` on a symmetric grid, with the sup distance per c.
fn fig1(cfg: &RunConfig) -> Result<Table> {
    let grid: Vec<f64> = (0..cfg.points)
        .map(|k| -cfg.t_max + 2.0 * cfg.t_max * k as f64 / (cfg.points - 1) as f64)
        .collect();
    let blocks: Vec<(f64, Vec<(f64, f64)>, f64)> = cfg
        .c
        .par_iter()
        .map(|&c| {
            let p = params(cfg, c)?;
            let b = configured_basis(cfg, p, || ProlateBasis::new(p, 2))?;
            let hg = HermiteGaussMode::new(2, c)?;
            let values: Vec<(f64, f64)> = grid
                .iter()
                .map(|&t| Ok((b.eval_psi(2, t)?, hg.eval(t))))
                .collect::<tfmetro_core::Result<_>>()?;
            let sup = values.iter().map(|(a, h)| (a - h).abs()).fold(0.0, f64::max);
            Ok((c, values, sup))
        })
        .collect::<Result<_>>()?;
    let mut t = Table::new(vec!["c", "t", "psi2", "psi2_hg", "sup_distance"]);
    for (c, values, sup) in blocks {
        for (&x, (a, h)) in grid.iter().zip(values) {
            t.push(vec![c.into(), x.into(), a.into(), h.into(), sup.into()]);
        }
    }
    Ok(t)
}

fn basis(cfg: &RunConfig) -> Result<Payload> {
    let p = params(cfg, cfg.c[0])?;
    let b = configured_basis(cfg, p, || ProlateBasis::extendable_family(p))?;
    match cfg.format {
        crate::config::Format::Json => {
            let doc: Value = serde_json::from_str(&basis_to_json(&b)?).map_err(|e| CliError::Output(e.to_string()))?;
            Ok(Payload::Document(doc))
        }
        crate::config::Format::Csv => {
            let mut t = Table::new(vec!["c", "n", "lambda", "extendable"]);
            for (n, &l) in b.lambdas().iter().enumerate() {
                let ext = if b.is_extendable(n) { "yes" } else { "no" };
                t.push(vec![p.c().into(), n.into(), l.into(), ext.into()]);
            }
            Ok(Payload::Table(t))
        }
    }
}

pub const SUPERRES_COLUMNS: [&str; 19] = [
    "c",
    "tau",
    "tau0",
    "nu",
    "regime",
    "sigma",
    "A",
    "bound_phi2",
    "bound_lambda0",
    "F_tautau",
    "F_tau0tau0",
    "F_nunu",
    "F_tau_tau0",
    "F_tau_nu",
    "F_tau0_nu",
    "crb_tau",
    "crb_tau_joint",
    "n_basis",
    "captured_energy",
];

pub fn design(cfg: &RunConfig) -> Result<MeasurementDesign> {
    let [r1, phi1, r2, phi2] = cfg.design;
    let free = FreeEntries {
        c03: cfg.design_c03,
        c13: cfg.design_c13,
        c2: cfg.design_c2,
    };
    let d = design_from_sphere(r1, phi1, r2, phi2, free)?;
    d.check_validity().map_err(|e| CliError::Config(format!("design: {e}")))?;
    Ok(d)
}

fn superres(cfg: &RunConfig) -> Result<Table> {
    let d = design(cfg)?;
    let blocks: Vec<Vec<Vec<Cell>>> = cfg.c.par_iter().map(|&c| superres_rows(cfg, &d, c)).collect::<Result<_>>()?;
    let mut t = Table::new(SUPERRES_COLUMNS.to_vec());
    for row in blocks.into_iter().flatten() {
        t.push(row);
    }
    Ok(t)
}

fn superres_rows(cfg: &RunConfig, d: &MeasurementDesign, c: f64) -> Result<Vec<Vec<Cell>>> {
    let p = params(cfg, c)?;
    let b = configured_basis(cfg, p, || ProlateBasis::extendable_family(p))?;
    let psf = match cfg.sigma {
        Some(s) => Psf::gaussian(s)?,
        None => Psf::gaussian_for(p, cfg.kappa)?,
    };
    let sigma = psf.width();
    let taus = cfg.tau.clone().unwrap_or_else(|| vec![sigma]);
    let centered = TwoPulseModel::new(psf.clone(), sigma, cfg.tau0, cfg.nu)?;
    let dbasis = gram_schmidt(&gamma_modes(&centered, &b, 3)?)?;
    let povm = optimal_povm(d, &dbasis)?;
    let (bound_phi2, bound_lambda0) = efficiency_bounds(&dbasis, &b)?;
    let captured: f64 = dbasis.gamma()[0].iter().map(|x| x * x).sum();
    let cut = plunge_index(c);
    let mut rows = Vec::new();
    for &tau in &taus {
        let model = TwoPulseModel::new(psf.clone(), tau, cfg.tau0, cfg.nu)?;
        for &regime in &cfg.regime {
            let a = match regime {
                Regime::Ideal => efficiency_factor(d)?,
                Regime::Limited => efficiency_factor(&time_limited_design(d, &dbasis, &b)?)?,
                Regime::Truncated => {
                    let damping: Vec<f64> = (0..dbasis.dim()).map(|n| if n <= cut { 1.0 } else { 0.0 }).collect();
                    efficiency_factor(&time_limited_design_with(d, &dbasis, &damping)?)?
                }
            };
            let mut opts = SuperresOptions {
                regime,
                tau_floor: cfg.tau_floor,
                ..Default::default()
            };
            opts.fisher.p_floor = cfg.p_floor;
            if let Some(h) = cfg.fisher_step {
                let theta = model.theta();
                opts.fisher.steps = Some(theta.iter().map(|x| h * (1.0 + x.abs())).collect());
            }
            let f = superres_fisher_with(&model, &povm, &b, &opts)?;
            let ftt = f.get(0, 0);
            let crb_tau = (ftt > 0.0).then(|| 1.0 / ftt.sqrt());
            let crb_joint = match crb(&f) {
                Ok(v) => Some(v[0]),
                Err(Error::SingularFisher { .. }) => None,
                Err(e) => return Err(e.into()),
            };
            rows.push(vec![
                c.into(),
                tau.into(),
                cfg.tau0.into(),
                cfg.nu.into(),
                Cell::Text(regime.to_string()),
                sigma.into(),
                a.into(),
                bound_phi2.into(),
                bound_lambda0.into(),
                ftt.into(),
                f.get(1, 1).into(),
                f.get(2, 2).into(),
                f.get(0, 1).into(),
                f.get(0, 2).into(),
                f.get(1, 2).into(),
                crb_tau.into(),
                crb_joint.into(),
                b.extendable_len().into(),
                captured.into(),
            ]);
        }
    }
    Ok(rows)
}
