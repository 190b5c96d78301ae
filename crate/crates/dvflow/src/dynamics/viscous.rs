use super::ViscositySpec;
use crate::dec_ops::{codifferential_1, codifferential_2, Dec};

/// Viscous force on dual 1-cochains.
pub fn viscous_force(dec: &Dec, v: &[f64], spec: &ViscositySpec) -> Vec<f64> {
    let n = dec.mesh.n_faces;
    match spec {
        ViscositySpec::None => vec![0.0; n],
        ViscositySpec::Newtonian { nu, .. } => {
            let mut f: Vec<f64> = codifferential_2(dec, &dec.curl(v)).into_iter().map(|x| -nu * x).collect();
            dilatational(dec, v, spec.dilatational(), &mut f);
            f
        }
        ViscositySpec::Anisotropic { nu_k, nu_dil } => {
            let w = dec.curl(v);
            let mw: Vec<f64> = (0..w.len()).map(|k| nu_k[k] * dec.stars.m2[k] * w[k]).collect();
            let mut f: Vec<f64> = dec.m1_inv(&dec.curl_t(&mw)).into_iter().map(|x| -x).collect();
            dilatational(dec, v, *nu_dil, &mut f);
            f
        }
        ViscositySpec::Smagorinsky { cs } => {
            let c = &dec.mesh;
            let w = dec.curl(v);
            let mw: Vec<f64> = (0..w.len())
                .map(|k| {
                    let l = (c.dual_face_area[k] / c.lowdim_measure[k]).sqrt();
                    (cs * l).powi(2) * (w[k].abs() / l) * dec.stars.m2[k] * w[k]
                })
                .collect();
            dec.m1_inv(&dec.curl_t(&mw)).into_iter().map(|x| -x).collect()
        }
    }
}

fn dilatational(dec: &Dec, v: &[f64], nu_dil: f64, f: &mut [f64]) {
    if nu_dil == 0.0 {
        return;
    }
    let g = dec.grad(&codifferential_1(dec, v));
    super::axpy(f, -nu_dil, &g);
}
