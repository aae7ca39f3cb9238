//! Deterministic table output. Column orders are fixed, floats are
//! printed with 12 significant digits, line endings are LF, and every
//! file embeds the config string, its hash, and the units convention —
//! identical configs produce byte-identical files.

use crate::analysis::{PeriodRun, ScanRow};
use crate::anharmonic::StrengthScanRow;
use sha2::{Digest, Sha256};
use std::fmt::Write as _;

pub const UNITS_LINE: &str = "hbar=m=omega=1, lengths in a0, energies in hbar*omega";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl OutputFormat {
    pub fn extension(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }
}

/// 12 significant digits, scientific; the fixed wire format.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    format!("{x:.11e}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

fn json_opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_else(|| "null".into())
}

/// Run identity embedded in every output file.
#[derive(Debug, Clone)]
pub struct Meta {
    pub config: String,
    pub version: String,
}

impl Meta {
    pub fn new(config: String) -> Self {
        Self {
            config,
            version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }

    pub fn config_hash(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update(self.config.as_bytes());
        let digest = hasher.finalize();
        digest[..6].iter().map(|b| format!("{b:02x}")).collect()
    }

    fn csv_header(&self) -> String {
        format!(
            "# lll-ed v{}\n# config: {}\n# config_hash: {}\n# units: {}\n",
            self.version,
            self.config,
            self.config_hash(),
            UNITS_LINE
        )
    }

    fn json_object(&self) -> String {
        format!(
            "{{\"version\":{},\"config\":{},\"config_hash\":{},\"units\":{}}}",
            json_str(&self.version),
            json_str(&self.config),
            json_str(&self.config_hash()),
            json_str(UNITS_LINE)
        )
    }
}

fn json_str(s: &str) -> String {
    serde_json::to_string(s).expect("string encodes")
}

fn occupations_json(occ: &[f64]) -> String {
    let mut s = String::from("[");
    for (i, &v) in occ.iter().enumerate() {
        if i > 0 {
            s.push(',');
        }
        s.push_str(&fmt_f64(v));
    }
    s.push(']');
    s
}

/// scan table: statistics,N,L,dL,dim,E0,S1,lnL_minus_S1,dS1,S2,occupations_json
pub fn scan_table(rows: &[ScanRow], meta: &Meta, format: OutputFormat) -> String {
    match format {
        OutputFormat::Csv => {
            let mut out = meta.csv_header();
            out.push_str("statistics,N,L,dL,dim,E0,S1,lnL_minus_S1,dS1,S2,occupations_json\n");
            for r in rows {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{},{},{},{},{},\"{}\"",
                    r.statistics,
                    r.n,
                    r.l,
                    r.delta_l,
                    r.dim,
                    fmt_f64(r.e0),
                    fmt_f64(r.s1),
                    fmt_opt(r.ln_l_minus_s1),
                    fmt_f64(r.delta_s1),
                    fmt_opt(r.s2),
                    occupations_json(&r.occupations)
                );
            }
            out
        }
        OutputFormat::Json => {
            let mut items = Vec::with_capacity(rows.len());
            for r in rows {
                items.push(format!(
                    "{{\"statistics\":{},\"N\":{},\"L\":{},\"dL\":{},\"dim\":{},\"E0\":{},\"S1\":{},\"lnL_minus_S1\":{},\"dS1\":{},\"S2\":{},\"occupations\":{}}}",
                    json_str(&r.statistics),
                    r.n,
                    r.l,
                    r.delta_l,
                    r.dim,
                    fmt_f64(r.e0),
                    fmt_f64(r.s1),
                    json_opt(r.ln_l_minus_s1),
                    fmt_f64(r.delta_s1),
                    json_opt(r.s2),
                    occupations_json(&r.occupations)
                ));
            }
            format!(
                "{{\"meta\":{},\"rows\":[{}]}}\n",
                meta.json_object(),
                items.join(",")
            )
        }
    }
}

/// Scan sidecar: detected extrema, oscillation periods, stable momenta.
pub struct ScanAnnotations {
    pub maxima_ln_l_minus_s1: Vec<usize>,
    pub minima_entropy: Vec<usize>,
    pub periods_entropy: Vec<PeriodRun>,
    pub stable_momenta: Vec<usize>,
    /// Series the minima/periods were computed on: "S1" or "dS1".
    pub entropy_series: &'static str,
}

pub fn scan_sidecar(ann: &ScanAnnotations, meta: &Meta) -> String {
    let ints = |v: &[usize]| {
        let inner: Vec<String> = v.iter().map(|x| x.to_string()).collect();
        format!("[{}]", inner.join(","))
    };
    let periods: Vec<String> = ann
        .periods_entropy
        .iter()
        .map(|p| {
            format!(
                "{{\"l_start\":{},\"l_end\":{},\"period\":{}}}",
                p.l_start, p.l_end, p.period
            )
        })
        .collect();
    format!(
        "{{\"meta\":{},\"entropy_series\":{},\"maxima_lnL_minus_S1\":{},\"minima_entropy\":{},\"periods_entropy\":[{}],\"stable_L\":{}}}\n",
        meta.json_object(),
        json_str(ann.entropy_series),
        ints(&ann.maxima_ln_l_minus_s1),
        ints(&ann.minima_entropy),
        periods.join(","),
        ints(&ann.stable_momenta)
    )
}

/// special table: N,L,S1,prediction,overlap
pub struct SpecialRow {
    pub n: usize,
    pub l: usize,
    pub s1: f64,
    pub prediction: Option<f64>,
    pub overlap: Option<f64>,
    pub occupations: Vec<f64>,
    pub delta_s1: f64,
}

pub fn special_table(rows: &[SpecialRow], meta: &Meta, format: OutputFormat) -> String {
    match format {
        OutputFormat::Csv => {
            let mut out = meta.csv_header();
            out.push_str("N,L,S1,prediction,overlap\n");
            for r in rows {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{}",
                    r.n,
                    r.l,
                    fmt_f64(r.s1),
                    fmt_opt(r.prediction),
                    fmt_opt(r.overlap)
                );
            }
            out
        }
        OutputFormat::Json => {
            let items: Vec<String> = rows
                .iter()
                .map(|r| {
                    format!(
                        "{{\"N\":{},\"L\":{},\"S1\":{},\"prediction\":{},\"overlap\":{}}}",
                        r.n,
                        r.l,
                        fmt_f64(r.s1),
                        json_opt(r.prediction),
                        json_opt(r.overlap)
                    )
                })
                .collect();
            format!(
                "{{\"meta\":{},\"rows\":[{}]}}\n",
                meta.json_object(),
                items.join(",")
            )
        }
    }
}

/// Special-run sidecar: occupation profiles (for eigenvalue-distribution
/// figures) and the edge-reconstruction verdict when applicable.
pub fn special_sidecar(
    rows: &[SpecialRow],
    transition: Option<&crate::analysis::EdgeTransition>,
    meta: &Meta,
) -> String {
    let items: Vec<String> = rows
        .iter()
        .map(|r| {
            format!(
                "{{\"N\":{},\"L\":{},\"dS1\":{},\"occupations\":{}}}",
                r.n,
                r.l,
                fmt_f64(r.delta_s1),
                occupations_json(&r.occupations)
            )
        })
        .collect();
    let trans = match transition {
        Some(t) => format!(
            "{{\"N\":{},\"class_before\":{},\"class_after\":{},\"dS1_jumped\":{}}}",
            t.n,
            json_str(&format!("{:?}", t.class_before)),
            json_str(&format!("{:?}", t.class_after)),
            t.delta_s1_jumped
        ),
        None => "null".into(),
    };
    format!(
        "{{\"meta\":{},\"rows\":[{}],\"edge_transition\":{}}}\n",
        meta.json_object(),
        items.join(","),
        trans
    )
}

/// anharmonic table: N,L,lambda,U0,E0,S1,S2
pub fn anharmonic_table(rows: &[StrengthScanRow], meta: &Meta, format: OutputFormat) -> String {
    match format {
        OutputFormat::Csv => {
            let mut out = meta.csv_header();
            out.push_str("N,L,lambda,U0,E0,S1,S2\n");
            for r in rows {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{},{}",
                    r.n,
                    r.l,
                    fmt_f64(r.lambda),
                    fmt_f64(r.u0),
                    fmt_f64(r.e0),
                    fmt_f64(r.s1),
                    fmt_opt(r.s2)
                );
            }
            out
        }
        OutputFormat::Json => {
            let items: Vec<String> = rows
                .iter()
                .map(|r| {
                    format!(
                        "{{\"N\":{},\"L\":{},\"lambda\":{},\"U0\":{},\"E0\":{},\"S1\":{},\"S2\":{}}}",
                        r.n,
                        r.l,
                        fmt_f64(r.lambda),
                        fmt_f64(r.u0),
                        fmt_f64(r.e0),
                        fmt_f64(r.s1),
                        json_opt(r.s2)
                    )
                })
                .collect();
            format!(
                "{{\"meta\":{},\"rows\":[{}]}}\n",
                meta.json_object(),
                items.join(",")
            )
        }
    }
}

/// orbitals table: l,epsilon
pub fn orbitals_table(energies: &[(usize, f64)], meta: &Meta, format: OutputFormat) -> String {
    match format {
        OutputFormat::Csv => {
            let mut out = meta.csv_header();
            out.push_str("l,epsilon\n");
            for &(l, e) in energies {
                let _ = writeln!(out, "{},{}", l, fmt_f64(e));
            }
            out
        }
        OutputFormat::Json => {
            let items: Vec<String> = energies
                .iter()
                .map(|&(l, e)| format!("{{\"l\":{},\"epsilon\":{}}}", l, fmt_f64(e)))
                .collect();
            format!(
                "{{\"meta\":{},\"rows\":[{}]}}\n",
                meta.json_object(),
                items.join(",")
            )
        }
    }
}

/// trial table: N,k,Nbar,L,dim,E0,overlap
pub struct TrialRow {
    pub n: usize,
    pub k: usize,
    pub n_bar: usize,
    pub l: usize,
    pub dim: usize,
    pub e0: f64,
    pub overlap: f64,
}

pub fn trial_table(rows: &[TrialRow], meta: &Meta, format: OutputFormat) -> String {
    match format {
        OutputFormat::Csv => {
            let mut out = meta.csv_header();
            out.push_str("N,k,Nbar,L,dim,E0,overlap\n");
            for r in rows {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{},{}",
                    r.n,
                    r.k,
                    r.n_bar,
                    r.l,
                    r.dim,
                    fmt_f64(r.e0),
                    fmt_f64(r.overlap)
                );
            }
            out
        }
        OutputFormat::Json => {
            let items: Vec<String> = rows
                .iter()
                .map(|r| {
                    format!(
                        "{{\"N\":{},\"k\":{},\"Nbar\":{},\"L\":{},\"dim\":{},\"E0\":{},\"overlap\":{}}}",
                        r.n, r.k, r.n_bar, r.l, r.dim,
                        fmt_f64(r.e0),
                        fmt_f64(r.overlap)
                    )
                })
                .collect();
            format!(
                "{{\"meta\":{},\"rows\":[{}]}}\n",
                meta.json_object(),
                items.join(",")
            )
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format_is_fixed_width_sigdigits() {
        assert_eq!(fmt_f64(1.0), "1.00000000000e0");
        assert_eq!(fmt_f64(0.4505612088663047), "4.50561208866e-1");
        assert_eq!(fmt_f64(-0.05), "-5.00000000000e-2");
    }

    #[test]
    fn meta_hash_is_stable() {
        let m = Meta::new("scan --stat boson --N 2".into());
        assert_eq!(m.config_hash(), m.config_hash());
        assert_eq!(m.config_hash().len(), 12);
    }

    #[test]
    fn csv_quotes_embedded_json() {
        let rows = vec![ScanRow {
            statistics: "boson".into(),
            n: 2,
            l: 1,
            delta_l: 1,
            dim: 1,
            e0: 2.0,
            s1: 0.5,
            ln_l_minus_s1: Some(-0.5),
            delta_s1: -0.19,
            s2: None,
            occupations: vec![1.0, 1.0],
            degenerate: false,
        }];
        let meta = Meta::new("test".into());
        let csv = scan_table(&rows, &meta, OutputFormat::Csv);
        let data_line = csv.lines().last().unwrap();
        assert!(data_line.ends_with("\"[1.00000000000e0,1.00000000000e0]\""));
        assert!(data_line.contains(",,"), "absent S2 is an empty field");
        let json = scan_table(&rows, &meta, OutputFormat::Json);
        assert!(json.contains("\"S2\":null"));
        serde_json::from_str::<serde_json::Value>(&json).expect("valid json");
    }
}
