use super::Dec;

/// δ₁v = −M0⁻¹ DIV M1 v, the M0/M1 adjoint of GRAD.
pub fn codifferential_1(dec: &Dec, v: &[f64]) -> Vec<f64> {
    let f = dec.m1(v);
    dec.div(&f).iter().zip(&dec.stars.m0).map(|(x, m)| -x / m).collect()
}

/// δ₂w = M1⁻¹ CURLᵀ M2 w, the M1/M2 adjoint of CURL.
pub fn codifferential_2(dec: &Dec, w: &[f64]) -> Vec<f64> {
    let mw: Vec<f64> = w.iter().zip(&dec.stars.m2).map(|(a, b)| a * b).collect();
    dec.m1_inv(&dec.curl_t(&mw))
}

/// Hodge-de Rham Laplacian on dual 1-cochains, GRAD δ₁ + δ₂ CURL.
pub fn hodge_laplacian(dec: &Dec, v: &[f64]) -> Vec<f64> {
    let a = dec.grad(&codifferential_1(dec, v));
    let b = codifferential_2(dec, &dec.curl(v));
    a.iter().zip(&b).map(|(x, y)| x + y).collect()
}
