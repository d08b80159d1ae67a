//! Aggregate of every bound for one sample set, as emitted by the CLI.

use serde::Serialize;

use crate::geometry::ComplementPartition;
use crate::noise_bounds::lmin_bound;
use crate::truncation_bounds::{sample_circumsphere, truncation_report};
use crate::{Result, SampleSet, Scalar};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub n_u: usize,
    pub ref_index: usize,
    pub lipschitz: f64,
    pub delta_noise: f64,
    pub t_delta: f64,
    pub t_column: f64,
    pub t_radial: f64,
    pub t_min_vertex_radial: f64,
    pub t_min_vertex_column: f64,
    pub t_simplex: f64,
    pub n_conditioning: f64,
    pub n_lmin: f64,
    pub e_c: f64,
    pub l_min: f64,
    pub argmin_partition: ComplementPartition,
    pub circumradius: f64,
    /// Largest distance from the reference point to another sample point.
    pub sample_radius: f64,
    pub inv_norm: f64,
    pub orthogonal_columns: bool,
}

impl BoundReport {
    pub fn compute<T: Scalar>(set: &SampleSet<T>, lipschitz: T, delta_noise: T) -> Result<Self> {
        let t = truncation_report(set, lipschitz)?;
        let noise = lmin_bound(set, delta_noise)?;
        let f = |x: T| x.to_f64_lossy();
        Ok(Self {
            n_u: set.dim(),
            ref_index: set.ref_index(),
            lipschitz: f(lipschitz),
            delta_noise: f(delta_noise),
            t_delta: t.t_delta,
            t_column: t.t_column,
            t_radial: t.t_radial,
            t_min_vertex_radial: t.t_min_vertex_radial,
            t_min_vertex_column: t.t_min_vertex_column,
            t_simplex: t.t_simplex,
            n_conditioning: f(noise.n_conditioning),
            n_lmin: f(noise.n_lmin),
            e_c: t.t_column + f(noise.n_lmin),
            l_min: f(noise.l_min),
            argmin_partition: noise.argmin_partition,
            circumradius: f(sample_circumsphere(set)?.radius),
            sample_radius: f(set.delta()),
            inv_norm: f(set.inv_norm()),
            orthogonal_columns: t.orthogonal_columns,
        })
    }

    /// `(name, value)` pairs in display order.
    pub fn rows(&self) -> Vec<(&'static str, f64)> {
        vec![
            ("T_d", self.t_delta),
            ("T_c", self.t_column),
            ("T_r", self.t_radial),
            ("T_rv", self.t_min_vertex_radial),
            ("T_cv", self.t_min_vertex_column),
            ("T_s", self.t_simplex),
            ("N_c", self.n_conditioning),
            ("N_l", self.n_lmin),
            ("E_c", self.e_c),
            ("l_min", self.l_min),
            ("r", self.circumradius),
            ("Delta", self.sample_radius),
            ("|U^-1|", self.inv_norm),
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DVector;

    #[test]
    fn example1_report() {
        let v = |x: &[f64]| DVector::from_row_slice(x);
        let set = SampleSet::new(vec![v(&[0.5, 0.0]), v(&[0.0, 1.0]), v(&[1.0, 0.0])], 0).unwrap();
        let r = BoundReport::compute(&set, 5.3, 0.0).unwrap();
        assert!((r.t_delta - 10.72).abs() < 5e-3);
        assert!((r.t_column - 7.73).abs() < 5e-3);
        assert!((r.t_radial - 4.19).abs() < 5e-3);
        assert_eq!(r.n_lmin, 0.0);
        assert_eq!(r.e_c, r.t_column);
        assert_eq!(r.rows().len(), 13);
    }
}
