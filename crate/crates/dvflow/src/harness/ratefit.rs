use super::{HarnessError, R2_MIN};
use serde::{Deserialize, Serialize};

/// Least-squares slope of log(error) against log(h).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub levels: Vec<(f64, f64)>,
    pub slope: f64,
    pub r_squared: f64,
    /// The slope, or None when r² < R2_MIN and the sweep is flagged.
    pub observed_order: Option<f64>,
    pub pair_orders: Vec<f64>,
}

impl RateFit {
    pub fn new(mut levels: Vec<(f64, f64)>) -> Result<Self, HarnessError> {
        if levels.len() < 3 {
            return Err(HarnessError::Fit(format!("{} levels; at least 3 are required", levels.len())));
        }
        if let Some(&(h, e)) = levels.iter().find(|(h, e)| !(*h > 0.0 && *e > 0.0 && h.is_finite() && e.is_finite())) {
            return Err(HarnessError::Fit(format!("level (h = {h:e}, error = {e:e}) is not positive")));
        }
        levels.sort_by(|a, b| b.0.total_cmp(&a.0));
        let xs: Vec<f64> = levels.iter().map(|l| l.0.ln()).collect();
        let ys: Vec<f64> = levels.iter().map(|l| l.1.ln()).collect();
        let n = xs.len() as f64;
        let mx = xs.iter().sum::<f64>() / n;
        let my = ys.iter().sum::<f64>() / n;
        let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
        let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
        if sxx == 0.0 {
            return Err(HarnessError::Fit("all levels share one h".into()));
        }
        let slope = sxy / sxx;
        let r_squared = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
        let pair_orders = levels.windows(2).map(|w| (w[0].1 / w[1].1).ln() / (w[0].0 / w[1].0).ln()).collect();
        Ok(RateFit {
            levels,
            slope,
            r_squared,
            observed_order: (r_squared >= R2_MIN).then_some(slope),
            pair_orders,
        })
    }
}
