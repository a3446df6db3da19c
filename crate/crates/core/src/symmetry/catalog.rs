//! Named symmetries and kernel shifts, addressed as `family.name(key=value)`.

use super::kernel::{KernelShift, Poly};
use super::op::{const_term, weighted_term, DiffTerm, Factor, SymmetryOp};
use crate::dirac::{levi_civita, GammaRep, ETA};
use crate::error::{Error, Result};
use crate::linalg::{r, real_mat, Mat, I, ONE};
use crate::opcore::MultiIndex;
use crate::operators::{param, split_call};

#[derive(Clone, Debug, PartialEq)]
pub enum Generator {
    Symmetry(SymmetryOp),
    Kernel(KernelShift),
}

impl Generator {
    pub fn name(&self) -> &str {
        match self {
            Generator::Symmetry(g) => &g.name,
            Generator::Kernel(k) => &k.name,
        }
    }

    pub fn is_position_weighted(&self) -> bool {
        match self {
            Generator::Symmetry(g) => g.is_position_weighted(),
            Generator::Kernel(k) => k.is_position_weighted(),
        }
    }
}

pub const ENTRIES: &[(&str, &str)] = &[
    ("any.identity", "Γ = I"),
    ("heat.Dx", "spatial translation ∂_x"),
    ("heat.time_reflection(s)", "u ↦ u(x, s−t); not a symmetry of the heat equation"),
    ("wave.Dt", "time translation ∂_t"),
    ("wave.Dx", "spatial translation ∂_x"),
    ("wave.time_reflection(s)", "u ↦ u(x, s−t)"),
    ("kdvkdv.V1", "∂_x"),
    ("kdvkdv.V2", "∂_t"),
    ("kdvkdv.V3", "kernel shift (1, 0)"),
    ("kdvkdv.V4", "kernel shift (0, 1)"),
    ("kdvkdv.V5", "scaling (u, v) ↦ (u, v)"),
    ("kdvkdv.V6", "swap (u, v) ↦ (v, u)"),
    ("kdvkdv.V7", "kernel shift (−x, t)"),
    ("kdvkdv.V7alt", "kernel shift (t, −x)"),
    ("kdvkdv.V8", "kernel shift (−t, x)"),
    ("kdvkdv.V8alt", "kernel shift (x, −t)"),
    ("kdvkdv.Gamma_s(s)", "(u, v) ↦ (−u(x, s−t), v(x, s−t))"),
    ("dirac.P0 .. dirac.P3", "translations ∂_μ"),
    ("dirac.L1 .. dirac.L3", "angular momentum ε_ijk x_j p_k + Σ_i/2"),
    ("dirac.J(mu,nu)", "Lorentz generator i(x_μ D_ν − x_ν D_μ) + (i/4)[γ̃_μ, γ̃_ν]"),
    ("dirac.Gamma0 .. dirac.Gamma3 (s)", "γ₄ γ_μ θ̂_μ"),
    ("dirac.Gamma4(s)", "i γ₄ θ̂"),
    ("dirac.Gamma5", "i γ₂ ĉ"),
    ("dirac.Gamma6", "i Γ₅"),
    ("dirac.CPT(s)", "Γ₄ Γ₅"),
    ("dirac.Gamma0_bare(s)", "γ₀ θ̂₀; not a symmetry"),
];

fn reflect(nvars: usize, slots: &[usize], s: f64) -> Factor {
    let mut mask = vec![false; nvars];
    for &k in slots {
        mask[k] = true;
    }
    Factor::Reflect { mask, s }
}

fn derivative(nvars: usize, slot: usize, m: usize, name: String) -> SymmetryOp {
    SymmetryOp::new(
        name,
        vec![Factor::Diff(vec![const_term(
            nvars,
            ONE,
            Mat::identity(m, m),
            MultiIndex::unit(nvars, slot),
        )])],
    )
}

/// Resolves `family.name(params)` for an operator with `nvars` variables and
/// `m` components.
pub fn lookup(spec: &str, nvars: usize, m: usize) -> Result<Generator> {
    lookup_with_center(spec, nvars, m, 0.0)
}

/// As [`lookup`], with `default_s` used when the entry has no `s` parameter.
pub fn lookup_with_center(spec: &str, nvars: usize, m: usize, default_s: f64) -> Result<Generator> {
    let (full, params) = split_call(spec)?;
    let (family, name) = full
        .split_once('.')
        .ok_or_else(|| Error::Catalog(spec.to_string()))?;
    let s = param(&params, "s", default_s);
    let label = spec.trim().to_string();
    let sym = |factors: Vec<Factor>| Ok(Generator::Symmetry(SymmetryOp::new(label.clone(), factors)));
    if name == "identity" {
        return sym(Vec::new());
    }
    match (family, name) {
        ("heat" | "wave", "time_reflection") => sym(vec![reflect(nvars, &[0], s)]),
        ("heat" | "wave", d) if d.starts_with('D') => {
            let slot = match d {
                "Dt" => 0,
                "Dx" => 1,
                "Dy" => 2,
                "Dz" => 3,
                _ => return Err(Error::Catalog(spec.to_string())),
            };
            if slot >= nvars {
                return Err(Error::Catalog(spec.to_string()));
            }
            Ok(Generator::Symmetry(derivative(nvars, slot, m, label)))
        }
        ("kdvkdv", _) => kdv_entry(name, s, label),
        ("dirac", _) => dirac_entry(name, &params, s, label),
        _ => Err(Error::Catalog(spec.to_string())),
    }
}

fn kdv_entry(name: &str, s: f64, label: String) -> Result<Generator> {
    let x = |c: f64| Poly::variable(2, 1, r(c));
    let t = |c: f64| Poly::variable(2, 0, r(c));
    let one = Poly::constant(2, ONE);
    let kernel = |comps: Vec<Poly>| Ok(Generator::Kernel(KernelShift::new(label.clone(), comps)));
    match name {
        "V1" => Ok(Generator::Symmetry(derivative(2, 1, 2, label))),
        "V2" => Ok(Generator::Symmetry(derivative(2, 0, 2, label))),
        "V3" => kernel(vec![one, Poly::zero()]),
        "V4" => kernel(vec![Poly::zero(), one]),
        "V5" => Ok(Generator::Symmetry(SymmetryOp::new(label, Vec::new()))),
        "V6" => Ok(Generator::Symmetry(SymmetryOp::matrix(
            label,
            real_mat(&[&[0.0, 1.0], &[1.0, 0.0]]),
        ))),
        "V7" => kernel(vec![x(-1.0), t(1.0)]),
        "V7alt" => kernel(vec![t(1.0), x(-1.0)]),
        "V8" => kernel(vec![t(-1.0), x(1.0)]),
        "V8alt" => kernel(vec![x(1.0), t(-1.0)]),
        "Gamma_s" => Ok(Generator::Symmetry(SymmetryOp::new(
            label,
            vec![
                Factor::Matrix(real_mat(&[&[-1.0, 0.0], &[0.0, 1.0]])),
                reflect(2, &[0], s),
            ],
        ))),
        _ => Err(Error::Catalog(format!("kdvkdv.{name}"))),
    }
}

/// `ε_ijk x_j p_k + ½Σ_i` with `p_k = −i D_k`.
pub fn angular_momentum(rep: &GammaRep, i: usize, name: String) -> SymmetryOp {
    let id = Mat::identity(4, 4);
    let mut terms: Vec<DiffTerm> = Vec::new();
    for j in 1..4 {
        for k in 1..4 {
            let e = levi_civita(i, j, k);
            if e != 0.0 {
                terms.push(weighted_term(4, j, -I * e, id.clone(), MultiIndex::unit(4, k)));
            }
        }
    }
    terms.push(const_term(4, r(0.5), rep.spin(i), MultiIndex::zero(4)));
    SymmetryOp::new(name, vec![Factor::Diff(terms)])
}

/// `i(x_μ D_ν − x_ν D_μ) + (i/4)[γ̃_μ, γ̃_ν]` with lowered indices, where
/// `γ̃ = (γ⁰, −γʲ)` since the operator is written with `−γʲD_j`.
pub fn lorentz_generator(rep: &GammaRep, mu: usize, nu: usize, name: String) -> SymmetryOp {
    let id = Mat::identity(4, 4);
    let tilde = |a: usize| if a == 0 { rep.lower(0) } else { -rep.lower(a) };
    let gm = tilde(mu);
    let gn = tilde(nu);
    let spin = (&gm * &gn - &gn * &gm) * (I * 0.25);
    let terms = vec![
        weighted_term(4, mu, I * ETA[mu], id.clone(), MultiIndex::unit(4, nu)),
        weighted_term(4, nu, -I * ETA[nu], id, MultiIndex::unit(4, mu)),
        const_term(4, ONE, spin, MultiIndex::zero(4)),
    ];
    SymmetryOp::new(name, vec![Factor::Diff(terms)])
}

/// The discrete generators `Γ₀ … Γ₆` with time reflections centred at `s`.
pub fn discrete_generator(rep: &GammaRep, a: usize, s: f64) -> SymmetryOp {
    let g4 = &rep.gamma4;
    let name = format!("Gamma{a}");
    match a {
        0..=3 => SymmetryOp::new(
            name,
            vec![Factor::Matrix(g4 * rep.lower(a)), reflect(4, &[a], s)],
        ),
        4 => SymmetryOp::new(
            name,
            vec![Factor::Matrix(g4 * I), reflect(4, &[0, 1, 2, 3], s)],
        ),
        5 => SymmetryOp::new(name, vec![Factor::Matrix(rep.lower(2) * I), Factor::Conjugate]),
        6 => SymmetryOp::new(name, vec![Factor::Matrix(-rep.lower(2)), Factor::Conjugate]),
        _ => panic!("discrete generators are indexed 0..=6"),
    }
}

pub fn cpt(rep: &GammaRep, s: f64) -> SymmetryOp {
    let mut g = discrete_generator(rep, 4, s).then_apply(&discrete_generator(rep, 5, s));
    g.name = "CPT".into();
    g
}

fn dirac_entry(name: &str, params: &[(String, f64)], s: f64, label: String) -> Result<Generator> {
    let rep = GammaRep::dirac();
    let mut g = match name {
        "P0" | "P1" | "P2" | "P3" => derivative(4, name[1..].parse().unwrap(), 4, label.clone()),
        "L1" | "L2" | "L3" => angular_momentum(&rep, name[1..].parse().unwrap(), label.clone()),
        "J" => {
            let mu = param(params, "mu", -1.0);
            let nu = param(params, "nu", -1.0);
            let ok = |v: f64| (0.0..=3.0).contains(&v) && v.fract() == 0.0;
            if !ok(mu) || !ok(nu) || mu == nu {
                return Err(Error::Catalog(format!("dirac.J needs distinct mu, nu in 0..3: {label}")));
            }
            lorentz_generator(&rep, mu as usize, nu as usize, label.clone())
        }
        "Gamma0" | "Gamma1" | "Gamma2" | "Gamma3" | "Gamma4" | "Gamma5" | "Gamma6" => {
            discrete_generator(&rep, name[5..].parse().unwrap(), s)
        }
        "CPT" => cpt(&rep, s),
        "Gamma0_bare" => SymmetryOp::new(
            label.clone(),
            vec![Factor::Matrix(rep.lower(0)), reflect(4, &[0], s)],
        ),
        _ => return Err(Error::Catalog(format!("dirac.{name}"))),
    };
    g.name = label;
    Ok(Generator::Symmetry(g))
}

