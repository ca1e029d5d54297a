//! Plot-ready CSV output.

/// Column header of sweep and round reports. The first six columns are the
/// documented report; `tol` and `handover` record the solver tolerances.
pub const REPORT_HEADER: &str = "epsilon,completeness,mean_loss,stderr,seed,converged,tol,handover";

pub const TRIALS_HEADER: &str = "trial,weak_value,seed";

/// `x` with 9 significant digits, shortest form.
pub fn g9(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { "0".into() } else { x.to_string() };
    }
    let exp = x.abs().log10().floor() as i32;
    if (-5..9).contains(&exp) {
        let decimals = (8 - exp).max(0) as usize;
        let s = format!("{x:.decimals$}");
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        let s = format!("{x:.8e}");
        let (mantissa, e) = s.split_once('e').expect("scientific format");
        let mantissa = mantissa.trim_end_matches('0').trim_end_matches('.');
        format!("{mantissa}e{e}")
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReportRow {
    pub epsilon: f64,
    pub completeness: f64,
    pub mean_loss: f64,
    pub stderr: f64,
    pub seed: u64,
    pub converged: bool,
    pub tol: f64,
    pub handover: f64,
}

impl ReportRow {
    pub fn line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            g9(self.epsilon),
            g9(self.completeness),
            g9(self.mean_loss),
            g9(self.stderr),
            self.seed,
            self.converged,
            g9(self.tol),
            g9(self.handover)
        )
    }
}

pub fn report(rows: &[ReportRow]) -> String {
    let mut s = String::from(REPORT_HEADER);
    s.push('\n');
    for r in rows {
        s.push_str(&r.line());
        s.push('\n');
    }
    s
}
