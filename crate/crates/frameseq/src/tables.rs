//! CSV tables. Column sets are fixed; see `frameseq --help`.

use serde::Serialize;

use crate::Failure;

pub fn to_csv<R: Serialize>(rows: impl IntoIterator<Item = R>) -> Result<String, Failure> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| Failure::Usage(format!("csv: {e}")))?;
    }
    let bytes = w.into_inner().map_err(|e| Failure::Usage(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhiRow {
    pub xi: f64,
    pub phi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenRow {
    pub k: usize,
    pub eigenvalue: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrendRow {
    pub window: usize,
    pub a_est: f64,
    pub b_est: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityRow {
    pub x: f64,
    pub density: usize,
    pub g: f64,
    pub product: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverRow {
    pub eps: f64,
    pub alpha: f64,
    pub measure_sum: f64,
    pub intervals: usize,
    pub depth: u32,
    pub full_circle: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerdictRow {
    pub spacing: f64,
    pub classification: String,
    pub expected: String,
    pub a_est: Option<f64>,
    pub b_est: Option<f64>,
    pub inf_nonzero: f64,
    pub sup: f64,
    pub zero_fraction: f64,
}

pub const COLUMNS: &str = "\
CSV tables written with --out DIR ('.' decimal separator, header row first):
  periodize.csv      xi,phi
  gram.csv           k,eigenvalue
  classify.csv       window,a_est,b_est
  density.csv        x,density,g,product
  hausdorff.csv      eps,alpha,measure_sum,intervals,depth,full_circle
  gallery.csv        spacing,classification,expected,a_est,b_est,inf_nonzero,sup,zero_fraction
  verify.csv         n,m,norm_sq,weighted_energy,f_measure,f_measure_ratio,e_energy,e_energy_ratio";

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_and_decimal_point() {
        let s = to_csv([PhiRow { xi: 0.5, phi: 1.25 }, PhiRow { xi: 0.75, phi: 2.0 }]).unwrap();
        assert_eq!(s, "xi,phi\n0.5,1.25\n0.75,2.0\n");
        let c =
            to_csv([CoverRow { eps: 0.125, alpha: 0.5, measure_sum: 1.0, intervals: 1, depth: 0, full_circle: true }])
                .unwrap();
        assert!(c.starts_with("eps,alpha,measure_sum,intervals,depth,full_circle\n"));
    }
}
