//! Exact log-partition functions from the norms, closed forms for the spherical ensemble,
//! and the conversion between planar and spherical normalisations.

use std::f64::consts::{LN_2, PI};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::measure::RadialMeasure;
use crate::norms::{all_log_norms, log_norms, ChargedEnsemble, EnsembleParams, Kind, LogNorm};
use crate::numerics::compensated_sum;
use crate::specfun::{log_barnes_g, log_factorial, log_gamma};

/// Where the particles live: the plane with the pulled-back weight, or the sphere itself.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Geometry {
    Plane,
    Sphere,
}

/// A log-partition function together with the data that produced it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FreeEnergy {
    /// Label of the background measure.
    pub measure: String,
    pub params: EnsembleParams,
    pub log_z: f64,
    pub geometry: Geometry,
    /// The planar value `log_z` was derived from; equal to `log_z` in the plane.
    pub log_z_plane: f64,
    /// The norms summed into `log_z_plane`, when requested.
    pub per_norm_breakdown: Option<Vec<LogNorm>>,
}

impl FreeEnergy {
    /// The same free energy in planar normalisation, restoring the stored planar value.
    pub fn to_plane_geometry(&self) -> FreeEnergy {
        FreeEnergy {
            log_z: self.log_z_plane,
            geometry: Geometry::Plane,
            ..self.clone()
        }
    }
}

/// `log Z_sphere − log Z_plane`: `N(N−1)·log 2` for determinantal gases and `2N²·log 2` for
/// Pfaffian ones.
pub fn sphere_offset(params: &EnsembleParams) -> f64 {
    let n = params.n_particles as f64;
    match params.kind {
        Kind::Determinantal => n * (n - 1.0) * LN_2,
        Kind::Pfaffian => 2.0 * n * n * LN_2,
    }
}

/// `log Z` from the terms `log h_j` (determinantal) or `log 2 + log h_{2j+1}` (Pfaffian),
/// summed in ascending index order with compensation.
pub fn log_z_from_norms(params: &EnsembleParams, norms: &[LogNorm]) -> Result<f64> {
    let n = params.n_particles;
    let terms: Vec<f64> = match params.kind {
        Kind::Determinantal => {
            if norms.len() != n || norms.iter().enumerate().any(|(i, h)| h.j != i) {
                return Err(Error::InvalidParameter(format!(
                    "expected norms 0..{n} in order for a determinantal gas"
                )));
            }
            norms.iter().map(|h| h.log_value).collect()
        }
        Kind::Pfaffian => {
            if norms.len() != n || norms.iter().enumerate().any(|(i, h)| h.j != 2 * i + 1) {
                return Err(Error::InvalidParameter(format!(
                    "expected the {n} odd norms in order for a Pfaffian gas"
                )));
            }
            norms.iter().map(|h| LN_2 + h.log_value).collect()
        }
    };
    Ok(compensated_sum(std::iter::once(log_factorial(n as u64)).chain(terms)))
}

/// `log Z_N` in planar normalisation, summing numerically evaluated norms.
///
/// Norms are evaluated in parallel and reduced in a fixed order, so the result does not
/// depend on the thread count.
pub fn log_z_exact<M: RadialMeasure>(ens: &ChargedEnsemble<M>, keep_breakdown: bool) -> Result<FreeEnergy> {
    let params = ens.params();
    let norms = match params.kind {
        Kind::Determinantal => all_log_norms(ens)?,
        Kind::Pfaffian => log_norms(ens, (0..params.n_particles).map(|k| 2 * k + 1))?,
    };
    let log_z = log_z_from_norms(&params, &norms)?;
    Ok(FreeEnergy {
        measure: ens.measure().label(),
        params,
        log_z,
        geometry: Geometry::Plane,
        log_z_plane: log_z,
        per_norm_breakdown: keep_breakdown.then_some(norms),
    })
}

/// Planar `log Z_N` of the induced spherical ensemble in terms of Γ and Barnes G.
pub fn log_z_spherical_closed_form(params: &EnsembleParams) -> Result<f64> {
    let nn = params.n_particles as f64;
    let (alpha, c) = (params.alpha, params.c);
    let n = params.total_charge();
    let lg = log_barnes_g;
    let terms = match params.kind {
        Kind::Determinantal => vec![
            log_factorial(params.n_particles as u64),
            -nn * log_gamma(n)?,
            lg(nn + c + 1.0)?,
            -lg(c + 1.0)?,
            lg(nn + alpha + 1.0)?,
            -lg(alpha + 1.0)?,
        ],
        Kind::Pfaffian => vec![
            log_factorial(params.n_particles as u64),
            nn * (2.0 * (nn + alpha + c) + 1.0) * LN_2,
            -nn * PI.ln(),
            -nn * log_gamma(2.0 * n)?,
            lg(nn + c + 1.0)?,
            -lg(c + 1.0)?,
            lg(nn + c + 1.5)?,
            -lg(c + 1.5)?,
            lg(nn + alpha + 1.0)?,
            -lg(alpha + 1.0)?,
            lg(nn + alpha + 1.5)?,
            -lg(alpha + 1.5)?,
        ],
    };
    Ok(compensated_sum(terms))
}

/// Converts a planar free energy to the spherical normalisation.
pub fn to_sphere_geometry(fe: &FreeEnergy) -> Result<FreeEnergy> {
    if fe.geometry != Geometry::Plane {
        return Err(Error::GeometryMismatch(
            "free energy is already in spherical normalisation",
        ));
    }
    Ok(FreeEnergy {
        log_z: fe.log_z_plane + sphere_offset(&fe.params),
        geometry: Geometry::Sphere,
        ..fe.clone()
    })
}
