use serde::Serialize;

/// Empirical distribution: distinct sorted values with the fraction of
/// samples at or below each.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct Ecdf {
    pub values: Vec<f64>,
    pub cdf: Vec<f64>,
}

impl Ecdf {
    pub fn new(samples: &[f64]) -> Self {
        let mut v: Vec<f64> = samples.iter().copied().filter(|x| !x.is_nan()).collect();
        v.sort_by(f64::total_cmp);
        let n = v.len() as f64;
        let mut values = Vec::new();
        let mut cdf = Vec::new();
        for (i, x) in v.iter().enumerate() {
            if i + 1 < v.len() && v[i + 1] == *x {
                continue;
            }
            values.push(*x);
            cdf.push((i + 1) as f64 / n);
        }
        Ecdf { values, cdf }
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `F(x)`, right-continuous.
    pub fn eval(&self, x: f64) -> f64 {
        match self.values.partition_point(|v| *v <= x) {
            0 => 0.0,
            i => self.cdf[i - 1],
        }
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("value,cdf\n");
        for (v, c) in self.values.iter().zip(&self.cdf) {
            s.push_str(&format!("{v},{c}\n"));
        }
        s
    }
}
