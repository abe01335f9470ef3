use serde::Serialize;

use crate::error::{Error, Result};

/// Largest relative change along the curve, between `step` and `step / 2`,
/// above which a step is rejected.
pub const HALVING_TOLERANCE: f64 = 1e-3;

/// Two-or-more-group susceptible/infected model.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SiParams {
    pub sizes: Vec<f64>,
    /// Pairwise per-second contact rates between groups.
    pub beta: Vec<Vec<f64>>,
    pub initial: Vec<f64>,
}

impl SiParams {
    pub fn validate(&self) -> Result<()> {
        let g = self.sizes.len();
        if g == 0 || self.initial.len() != g || self.beta.len() != g || self.beta.iter().any(|r| r.len() != g) {
            return Err(Error::InvalidArgument("group sizes, initial values and beta must share one dimension".into()));
        }
        for (i, row) in self.beta.iter().enumerate() {
            for (j, b) in row.iter().enumerate() {
                if !(*b >= 0.0) || (b - self.beta[j][i]).abs() > 1e-12 * b.abs().max(1e-300) {
                    return Err(Error::InvalidArgument(format!("beta must be symmetric and non-negative, entry ({i}, {j}) is {b}")));
                }
            }
        }
        for (m, i0) in self.sizes.iter().zip(&self.initial) {
            if !(*m >= 0.0) || !(*i0 >= 0.0 && i0 <= m) {
                return Err(Error::InvalidArgument(format!("need 0 <= I(0) <= M per group, got I(0) = {i0}, M = {m}")));
            }
        }
        Ok(())
    }

    pub fn total(&self) -> f64 {
        self.sizes.iter().sum()
    }

    fn rate(&self, i: &[f64], out: &mut [f64]) {
        for g in 0..i.len() {
            let pressure: f64 = self.beta[g].iter().zip(i).map(|(b, ih)| b * ih).sum();
            out[g] = pressure * (self.sizes[g] - i[g]);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EpidemicCurve {
    pub times: Vec<f64>,
    /// Total infected at each time.
    pub infected: Vec<f64>,
    /// Infected per group, `groups[g][k]`; empty when not tracked.
    pub groups: Vec<Vec<f64>>,
}

impl EpidemicCurve {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("t_s,infected\n");
        for (t, i) in self.times.iter().zip(&self.infected) {
            s.push_str(&format!("{t},{i}\n"));
        }
        s
    }

    /// Linear interpolation of the total at `t`.
    pub fn at(&self, t: f64) -> f64 {
        let k = self.times.partition_point(|x| *x <= t);
        if k == 0 {
            return self.infected[0];
        }
        if k >= self.times.len() {
            return *self.infected.last().expect("non-empty curve");
        }
        let (t0, t1) = (self.times[k - 1], self.times[k]);
        let (i0, i1) = (self.infected[k - 1], self.infected[k]);
        i0 + (i1 - i0) * (t - t0) / (t1 - t0)
    }
}

/// Solution plus whether any step overshot and had to be clamped.
fn integrate(params: &SiParams, horizon: f64, step: f64) -> (EpidemicCurve, bool) {
    let g = params.sizes.len();
    let mut i = params.initial.clone();
    let mut times = vec![0.0];
    let mut groups: Vec<Vec<f64>> = i.iter().map(|v| vec![*v]).collect();
    let (mut k1, mut k2, mut k3, mut k4) = (vec![0.0; g], vec![0.0; g], vec![0.0; g], vec![0.0; g]);
    let mut tmp = vec![0.0; g];
    let mut t = 0.0;
    let mut clamped = false;
    let n = (horizon / step * (1.0 - 1e-12)).ceil().max(1.0) as usize;
    for k in 1..=n {
        let h = (k as f64 * step).min(horizon) - t;
        params.rate(&i, &mut k1);
        for x in 0..g {
            tmp[x] = i[x] + 0.5 * h * k1[x];
        }
        params.rate(&tmp, &mut k2);
        for x in 0..g {
            tmp[x] = i[x] + 0.5 * h * k2[x];
        }
        params.rate(&tmp, &mut k3);
        for x in 0..g {
            tmp[x] = i[x] + h * k3[x];
        }
        params.rate(&tmp, &mut k4);
        for x in 0..g {
            let next = i[x] + h / 6.0 * (k1[x] + 2.0 * k2[x] + 2.0 * k3[x] + k4[x]);
            // susceptibles are M - I, so I stays in [I, M]
            let slack = 1e-9 * params.sizes[x].max(1.0);
            if next < i[x] - slack || next > params.sizes[x] + slack {
                clamped = true;
            }
            i[x] = next.clamp(i[x], params.sizes[x]);
            groups[x].push(i[x]);
        }
        t += h;
        times.push(t);
    }
    let infected = (0..times.len()).map(|k| groups.iter().map(|v| v[k]).sum()).collect();
    (EpidemicCurve { times, infected, groups }, clamped)
}

/// Fixed-step fourth-order Runge-Kutta solution on `0, step, ..., horizon`,
/// checked against a run at half the step at every coarse time. A step
/// that overshoots the admissible range is rejected outright.
pub fn si_solve(params: &SiParams, horizon: f64, step: f64) -> Result<EpidemicCurve> {
    params.validate()?;
    if !(step > 0.0) || !(horizon > 0.0) {
        return Err(Error::InvalidArgument(format!("need positive horizon and step, got {horizon} and {step}")));
    }
    let (coarse, clamped) = integrate(params, horizon, step);
    if clamped {
        return Err(Error::StepTooCoarse { step, relative_change: f64::INFINITY });
    }
    let (fine, _) = integrate(params, horizon, 0.5 * step);
    let mut change: f64 = 0.0;
    for (k, a) in coarse.infected.iter().enumerate() {
        let t = coarse.times[k];
        let b = fine.at(t);
        change = change.max((a - b).abs() / b.abs().max(f64::MIN_POSITIVE));
    }
    if change >= HALVING_TOLERANCE {
        return Err(Error::StepTooCoarse { step, relative_change: change });
    }
    Ok(coarse)
}

/// Closed-form single-group solution started from one infected node.
pub fn logistic(m: f64, beta: f64, t: f64) -> f64 {
    m / (1.0 + (m - 1.0) * (-beta * m * t).exp())
}
