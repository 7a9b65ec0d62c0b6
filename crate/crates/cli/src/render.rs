//! Aligned text tables. Numbers print with 9 significant digits.

use qcorr_core::correlations::ClassicalityVerdict;
use qcorr_core::linalg::CMatrix;

pub fn sig9(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    // exponent after rounding, so 0.9999999999 counts as magnitude 0
    let scientific = format!("{x:.8e}");
    let magnitude: i32 = scientific.split('e').nth(1).and_then(|e| e.parse().ok()).unwrap_or(0);
    if (-4..9).contains(&magnitude) {
        format!("{:.*}", (8 - magnitude).max(0) as usize, x)
    } else {
        scientific
    }
}

#[derive(Default)]
pub struct Table {
    rows: Vec<(String, String)>,
}

impl Table {
    pub fn text(&mut self, label: &str, value: impl Into<String>) -> &mut Self {
        self.rows.push((label.to_string(), value.into()));
        self
    }

    pub fn num(&mut self, label: &str, value: f64) -> &mut Self {
        self.text(label, sig9(value))
    }

    pub fn verdict(&mut self, label: &str, v: &ClassicalityVerdict) -> &mut Self {
        let answer = if v.is_classical { "yes" } else { "no" };
        self.text(label, format!("{answer} (disturbance {})", sig9(v.max_disturbance)))
    }

    pub fn render(&self) -> String {
        let width = self.rows.iter().map(|(l, _)| l.chars().count()).max().unwrap_or(0);
        self.rows
            .iter()
            .map(|(l, v)| format!("{l:<width$}  {v}\n"))
            .collect()
    }
}

pub fn complex(re: f64, im: f64) -> String {
    if im == 0.0 {
        sig9(re)
    } else if re == 0.0 {
        format!("{}i", sig9(im))
    } else {
        format!("{}{}{}i", sig9(re), if im < 0.0 { "-" } else { "+" }, sig9(im.abs()))
    }
}

pub fn matrix(m: &CMatrix) -> String {
    let cells: Vec<Vec<String>> = m
        .row_iter()
        .map(|row| row.iter().map(|z| complex(z.re, z.im)).collect())
        .collect();
    let width = cells.iter().flatten().map(|c| c.len()).max().unwrap_or(0);
    cells
        .iter()
        .map(|row| {
            let line: Vec<String> = row.iter().map(|c| format!("{c:>width$}")).collect();
            format!("{}\n", line.join("  "))
        })
        .collect()
}
