use serde::Serialize;

use crate::error::{Error, Result};

/// Default floor below which distances are treated as roundoff.
pub const DEFAULT_FLOOR: f64 = 1e-11;

/// Least-squares line through `(ln T, ln d)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FitResult {
    pub slope: f64,
    /// Natural log of the fitted prefactor.
    pub intercept: f64,
    pub r_squared: f64,
    pub points_used: usize,
    pub points_discarded_below_floor: usize,
}

/// Fits `d ≈ e^{intercept} T^{slope}` on points with `d ≥ floor`.
pub fn fit_power_law(ts: &[f64], distances: &[f64], floor: f64) -> Result<FitResult> {
    if ts.len() != distances.len() {
        return Err(Error::arg("fit: T and distance lists differ in length"));
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = ts
        .iter()
        .zip(distances)
        .filter(|(_, &d)| d >= floor && d > 0.0)
        .map(|(&t, &d)| (t.ln(), d.ln()))
        .unzip();
    let used = xs.len();
    if used < 3 {
        return Err(Error::arg(format!(
            "fit needs at least 3 points above the floor {floor:e}, got {used}"
        )));
    }
    let n = used as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(Error::arg("fit: all T values coincide"));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| {
            let r = y - (intercept + slope * x);
            r * r
        })
        .sum();
    let r_squared = if syy == 0.0 { 1.0 } else { 1.0 - ss_res / syy };
    Ok(FitResult {
        slope,
        intercept,
        r_squared,
        points_used: used,
        points_discarded_below_floor: ts.len() - used,
    })
}

/// `points` logarithmically spaced values from `start` to `stop` inclusive.
pub fn log_space(start: f64, stop: f64, points: usize) -> Vec<f64> {
    if points == 1 {
        return vec![start];
    }
    let (a, b) = (start.ln(), stop.ln());
    (0..points)
        .map(|i| {
            if i == points - 1 {
                stop
            } else {
                (a + (b - a) * i as f64 / (points - 1) as f64).exp()
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law() {
        let ts = log_space(0.05, 0.5, 10);
        let ds: Vec<f64> = ts.iter().map(|t| t.powi(3)).collect();
        let fit = fit_power_law(&ts, &ds, DEFAULT_FLOOR).unwrap();
        assert!((fit.slope - 3.0).abs() < 1e-12);
        assert!(fit.intercept.abs() < 1e-11);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
        assert_eq!(fit.points_used, 10);
    }

    #[test]
    fn floor_filtering() {
        let ts = log_space(0.01, 1.0, 6);
        let mut ds: Vec<f64> = ts.iter().map(|t| 2.0 * t * t).collect();
        ds[0] = 1e-14;
        ds[1] = 0.0;
        let fit = fit_power_law(&ts, &ds, DEFAULT_FLOOR).unwrap();
        assert_eq!(fit.points_discarded_below_floor, 2);
        assert!((fit.slope - 2.0).abs() < 1e-12);
        assert!((fit.intercept - 2f64.ln()).abs() < 1e-12);

        let tiny = vec![1e-13; 6];
        assert!(fit_power_law(&ts, &tiny, DEFAULT_FLOOR).is_err());
    }

    #[test]
    fn log_space_endpoints() {
        let g = log_space(0.05, 0.5, 10);
        assert_eq!(g.len(), 10);
        assert!((g[0] - 0.05).abs() < 1e-17);
        assert_eq!(g[9], 0.5);
        assert!(g.windows(2).all(|w| w[1] > w[0]));
    }
}
