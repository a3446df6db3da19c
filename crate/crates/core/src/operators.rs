//! Named operators used throughout the examples and checks.

use crate::dirac::GammaRep;
use crate::error::{Error, Result};
use crate::linalg::{r, Mat, I, ONE};
use crate::opcore::{parse_operator, MultiIndex, Operator};

fn unit(nvars: usize, slot: usize, power: u32) -> Vec<u32> {
    let mut e = vec![0; nvars];
    e[slot] = power;
    e
}

fn laplacian(nvars: usize) -> Operator {
    let mut l = Operator::zero(nvars, 1, 1);
    for slot in 1..nvars {
        l = l
            .add(&Operator::scalar(nvars, ONE, &unit(nvars, slot, 2)))
            .expect("same shape");
    }
    l
}

/// `D_t − Δ` in `n` space dimensions.
pub fn heat(space_dims: usize) -> Operator {
    let nvars = space_dims + 1;
    Operator::scalar(nvars, ONE, &unit(nvars, 0, 1))
        .sub(&laplacian(nvars))
        .expect("same shape")
}

/// `□ = D_t² − Δ`.
pub fn wave(space_dims: usize) -> Operator {
    let nvars = space_dims + 1;
    Operator::scalar(nvars, ONE, &unit(nvars, 0, 2))
        .sub(&laplacian(nvars))
        .expect("same shape")
}

/// `[[D_t, D_x³ + D_x], [D_x³ + D_x, D_t]]`.
pub fn kdv_kdv() -> Operator {
    let dt = Operator::scalar(2, ONE, &[1, 0]);
    let k = Operator::scalar(2, ONE, &[0, 3])
        .add(&Operator::scalar(2, ONE, &[0, 1]))
        .expect("same shape");
    Operator::from_entries(&[vec![dt.clone(), k.clone()], vec![k, dt]]).expect("2x2 grid")
}

/// `[[D_t + D_x³, D_t D_x], [0, D_t + D_x³]]`.
pub fn jordan_2x2() -> Operator {
    let id = Mat::identity(2, 2);
    let n = Mat::from_row_slice(2, 2, &[r(0.0), r(1.0), r(0.0), r(0.0)]);
    Operator::from_terms(
        2,
        2,
        2,
        [
            (MultiIndex::new(vec![1, 0]), id.clone()),
            (MultiIndex::new(vec![0, 3]), id),
            (MultiIndex::new(vec![1, 1]), n),
        ],
    )
    .expect("consistent shapes")
}

/// Linearised Navier–Stokes on `(u¹, u², u³, p)`:
/// `u_t + ∇p − νΔu = 0`, `∇·u = 0`.
pub fn navier_stokes(nu: f64) -> Operator {
    let nvars = 4;
    let zero = Operator::zero(nvars, 1, 1);
    let diag = Operator::scalar(nvars, ONE, &unit(nvars, 0, 1))
        .sub(&laplacian(nvars).scale(r(nu)))
        .expect("same shape");
    let d = |slot| Operator::scalar(nvars, ONE, &unit(nvars, slot, 1));
    let mut rows = Vec::new();
    for i in 0..3 {
        let mut row = vec![zero.clone(); 4];
        row[i] = diag.clone();
        row[3] = d(i + 1);
        rows.push(row);
    }
    rows.push(vec![d(1), d(2), d(3), zero]);
    Operator::from_entries(&rows).expect("4x4 grid")
}

/// `i∂̸ − m` with `∂̸ = γ⁰D_t − γ^j D_j` in the Dirac representation.
pub fn dirac(mass: f64) -> Operator {
    dirac_with(&GammaRep::dirac(), mass)
}

pub fn dirac_with(rep: &GammaRep, mass: f64) -> Operator {
    let mut terms = vec![
        (MultiIndex::new(vec![1, 0, 0, 0]), &rep.gamma[0] * I),
        (MultiIndex::zero(4), Mat::identity(4, 4) * r(-mass)),
    ];
    for j in 1..4 {
        terms.push((MultiIndex::unit(4, j), &rep.gamma[j] * (-I)));
    }
    Operator::from_terms(4, 4, 4, terms).expect("4x4 terms")
}

/// Parses `name(k=v, …)` into a name and parameter list.
pub fn split_call(spec: &str) -> Result<(String, Vec<(String, f64)>)> {
    let spec = spec.trim();
    let Some(open) = spec.find('(') else {
        return Ok((spec.to_string(), Vec::new()));
    };
    if !spec.ends_with(')') {
        return Err(Error::Invalid(format!("unbalanced parameters in `{spec}`")));
    }
    let name = spec[..open].trim().to_string();
    let inner = &spec[open + 1..spec.len() - 1];
    let mut params = Vec::new();
    for part in inner.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| Error::Invalid(format!("expected key=value in `{part}`")))?;
        let v: f64 = v
            .trim()
            .parse()
            .map_err(|_| Error::Invalid(format!("bad number in `{part}`")))?;
        params.push((k.trim().to_string(), v));
    }
    Ok((name, params))
}

pub fn param(params: &[(String, f64)], key: &str, default: f64) -> f64 {
    params
        .iter()
        .find(|(k, _)| k == key)
        .map_or(default, |(_, v)| *v)
}

pub const OPERATOR_NAMES: &[&str] = &[
    "heat1d", "heat3d", "wave1d", "wave3d", "kdvkdv", "jordan2x2", "ns(nu=…)", "dirac(m=…)",
];

/// Resolves a catalogue name such as `dirac(m=1)`; anything containing `[`
/// is parsed as operator text.
pub fn resolve(spec: &str) -> Result<Operator> {
    if spec.contains('[') {
        return parse_operator(spec);
    }
    let (name, params) = split_call(spec)?;
    Ok(match name.as_str() {
        "heat1d" => heat(1),
        "heat2d" => heat(2),
        "heat3d" => heat(3),
        "wave1d" => wave(1),
        "wave2d" => wave(2),
        "wave3d" => wave(3),
        "kdvkdv" => kdv_kdv(),
        "jordan2x2" => jordan_2x2(),
        "ns" => navier_stokes(param(&params, "nu", 1.0)),
        "dirac" => dirac(param(&params, "m", 1.0)),
        _ => return Err(Error::Catalog(spec.to_string())),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::opcore::to_dsl;

    #[test]
    fn kdv_kdv_matches_matrix_form() {
        let l = kdv_kdv();
        let dt = Operator::scalar(2, ONE, &[1, 0]);
        let k = Operator::scalar(2, ONE, &[0, 3])
            .add(&Operator::scalar(2, ONE, &[0, 1]))
            .unwrap();
        assert_eq!(l.entry(0, 0), dt);
        assert_eq!(l.entry(1, 1), dt);
        assert_eq!(l.entry(0, 1), k);
        assert_eq!(l.entry(1, 0), k);
        // assembled from its matrix terms
        let swap = Mat::from_row_slice(2, 2, &[r(0.0), r(1.0), r(1.0), r(0.0)]);
        let from_terms = Operator::from_terms(
            2,
            2,
            2,
            [
                (MultiIndex::new(vec![1, 0]), Mat::identity(2, 2)),
                (MultiIndex::new(vec![0, 3]), swap.clone()),
                (MultiIndex::new(vec![0, 1]), swap),
            ],
        )
        .unwrap();
        assert_eq!(l, from_terms);
    }

    #[test]
    fn navier_stokes_coefficients_are_symmetric() {
        for (_, m) in navier_stokes(0.3).terms() {
            assert_eq!(m, &m.transpose());
        }
    }

    #[test]
    fn dirac_zero_wavevector_symbol_is_mass() {
        let s = dirac(1.5).symbol_real(&[0.0; 4]);
        assert_eq!(s, Mat::identity(4, 4) * r(-1.5));
    }

    #[test]
    fn dirac_symbol_convention() {
        let rep = GammaRep::dirac();
        let k = [0.3, -1.1, 0.4, 2.0];
        let s = dirac(1.0).symbol_real(&k);
        // iγ⁰(iω) − iγʲ(ik_j) − m
        let mut expect = &rep.gamma[0] * r(-k[0]) - Mat::identity(4, 4);
        for j in 1..4 {
            expect += &rep.gamma[j] * r(k[j]);
        }
        assert!(crate::linalg::approx_eq(&s, &expect, 1e-15));
    }

    #[test]
    fn resolve_names_and_text() {
        assert_eq!(resolve("kdvkdv").unwrap(), kdv_kdv());
        assert_eq!(resolve(&to_dsl(&heat(1))).unwrap(), heat(1));
        assert!(matches!(resolve("nope"), Err(Error::Catalog(_))));
        let (n, p) = split_call("ns(nu=0.5)").unwrap();
        assert_eq!(n, "ns");
        assert_eq!(param(&p, "nu", 1.0), 0.5);
    }
}
