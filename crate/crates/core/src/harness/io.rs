//! JSON instance files and reports.
//!
//! Matrices are nested arrays of `[re, im]` pairs, row-major. Reports keep a
//! fixed field order so two runs can be diffed byte for byte.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::certificate::{certify, Certificate, ConditionI, Instance, Reason};
use crate::decomposition::DecompositionDims;
use crate::error::{Error, Result};
use crate::hamiltonian::{certify_hamiltonian, HamiltonianInstance};
use crate::matrix::{c, Matrix};
use crate::tolerance::{ToleranceConfig, Verdict};

pub type JsonMatrix = Vec<Vec<[f64; 2]>>;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InstanceKind {
    #[default]
    General,
    Hamiltonian,
}

/// Per-field tolerance overrides; absent fields keep the caller's base value.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceOverride {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rank_coeff: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subspace_eq_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub borderline_factor: Option<f64>,
}

impl ToleranceOverride {
    pub fn apply(&self, base: ToleranceConfig) -> Result<ToleranceConfig> {
        ToleranceConfig::new(
            self.rank_coeff.unwrap_or(base.rank_coeff),
            self.subspace_eq_tol.unwrap_or(base.subspace_eq_tol),
            self.borderline_factor.unwrap_or(base.borderline_factor),
        )
    }
}

impl From<ToleranceConfig> for ToleranceOverride {
    fn from(t: ToleranceConfig) -> Self {
        Self {
            rank_coeff: Some(t.rank_coeff),
            subspace_eq_tol: Some(t.subspace_eq_tol),
            borderline_factor: Some(t.borderline_factor),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub n: usize,
    pub p: usize,
    #[serde(rename = "A")]
    pub a: JsonMatrix,
    #[serde(rename = "B")]
    pub b: JsonMatrix,
    #[serde(rename = "C")]
    pub c: JsonMatrix,
    #[serde(rename = "D", default, skip_serializing_if = "Option::is_none")]
    pub d: Option<JsonMatrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<ToleranceOverride>,
    #[serde(default)]
    pub kind: InstanceKind,
}

pub fn to_json_matrix(m: &Matrix) -> JsonMatrix {
    m.row_iter()
        .map(|row| row.iter().map(|z| [z.re, z.im]).collect())
        .collect()
}

pub fn from_json_matrix(field: &str, data: &JsonMatrix, rows: usize, cols: usize) -> Result<Matrix> {
    let shape = |message: String| Error::Shape {
        field: field.to_string(),
        message,
    };
    if data.len() != rows {
        return Err(shape(format!("expected {rows} rows, got {}", data.len())));
    }
    for (i, row) in data.iter().enumerate() {
        if row.len() != cols {
            return Err(shape(format!("row {i} has {} entries, expected {cols}", row.len())));
        }
    }
    Ok(Matrix::from_fn(rows, cols, |i, j| {
        let [re, im] = data[i][j];
        c(re, im)
    }))
}

impl InstanceFile {
    pub fn from_instance(inst: &Instance) -> Self {
        Self {
            n: inst.n(),
            p: inst.p(),
            a: to_json_matrix(inst.a()),
            b: to_json_matrix(inst.b()),
            c: to_json_matrix(inst.c()),
            d: Some(to_json_matrix(inst.d())),
            tol: Some((*inst.tol()).into()),
            kind: InstanceKind::General,
        }
    }

    pub fn from_hamiltonian(inst: &HamiltonianInstance) -> Self {
        Self {
            n: inst.n(),
            p: inst.n(),
            a: to_json_matrix(inst.a()),
            b: to_json_matrix(inst.b()),
            c: to_json_matrix(inst.c()),
            d: None,
            tol: Some((*inst.tol()).into()),
            kind: InstanceKind::Hamiltonian,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance files always serialize")
    }
}

/// How a file's tolerances combine with the caller's.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LoadOptions {
    /// Defaults, typically [`ToleranceConfig::from_env`].
    pub base_tol: ToleranceConfig,
    /// Command-line `rank_coeff`; beats the file's value.
    pub rank_coeff: Option<f64>,
    /// Replace `B`, `C` by their Hermitian parts for Hamiltonian files.
    pub symmetrize: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LoadedInstance {
    General(Instance),
    Hamiltonian(HamiltonianInstance),
}

impl LoadedInstance {
    pub fn kind(&self) -> InstanceKind {
        match self {
            LoadedInstance::General(_) => InstanceKind::General,
            LoadedInstance::Hamiltonian(_) => InstanceKind::Hamiltonian,
        }
    }

    pub fn certify(&self) -> Certificate {
        match self {
            LoadedInstance::General(inst) => certify(inst),
            LoadedInstance::Hamiltonian(inst) => certify_hamiltonian(inst),
        }
    }

    pub fn to_file(&self) -> InstanceFile {
        match self {
            LoadedInstance::General(inst) => InstanceFile::from_instance(inst),
            LoadedInstance::Hamiltonian(inst) => InstanceFile::from_hamiltonian(inst),
        }
    }
}

pub fn parse_instance_file(text: &str) -> Result<InstanceFile> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| Error::Parse {
        path: e.path().to_string(),
        message: e.inner().to_string(),
    })
}

/// Parses and validates an instance; tolerance precedence is
/// `base_tol` < file `tol` < `rank_coeff`.
pub fn load_instance(text: &str, opts: &LoadOptions) -> Result<LoadedInstance> {
    let file = parse_instance_file(text)?;
    let mut tol = file.tol.unwrap_or_default().apply(opts.base_tol)?;
    if let Some(rc) = opts.rank_coeff {
        tol = ToleranceOverride {
            rank_coeff: Some(rc),
            ..Default::default()
        }
        .apply(tol)?;
    }
    let (n, p) = (file.n, file.p);
    let a = from_json_matrix("A", &file.a, n, n)?;
    let b = from_json_matrix("B", &file.b, n, p)?;
    let cm = from_json_matrix("C", &file.c, p, n)?;
    match file.kind {
        InstanceKind::General => {
            let d = file.d.as_ref().ok_or_else(|| Error::Shape {
                field: "D".into(),
                message: "missing; required for general instances".into(),
            })?;
            let d = from_json_matrix("D", d, p, p)?;
            Ok(LoadedInstance::General(Instance::new(a, b, cm, d, tol)?))
        }
        InstanceKind::Hamiltonian => {
            if file.d.is_some() {
                return Err(Error::Shape {
                    field: "D".into(),
                    message: "hamiltonian instances omit D (it is -A^H)".into(),
                });
            }
            if p != n {
                return Err(Error::Shape {
                    field: "p".into(),
                    message: format!("hamiltonian instances need p = n, got p = {p}, n = {n}"),
                });
            }
            let h = if opts.symmetrize {
                HamiltonianInstance::symmetrized(a, b, cm, tol)?
            } else {
                HamiltonianInstance::new(a, b, cm, tol)?
            };
            Ok(LoadedInstance::Hamiltonian(h))
        }
    }
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

/// Serializable summary of a certificate. Non-finite numbers become `null`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub verdict: Verdict,
    pub reason: Reason,
    pub cond_i: Option<ConditionI>,
    pub reduced_shape: Option<[usize; 2]>,
    pub reduced_sigma_min: Option<f64>,
    pub oracle_sigma_min: Option<f64>,
    pub agreement: bool,
    pub dims: Option<DecompositionDims>,
    pub zero_residual: Option<f64>,
    pub umv_residual: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub range_identity_residual: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<[f64; 2]>>,
}

impl From<&Certificate> for Report {
    fn from(cert: &Certificate) -> Self {
        Self {
            verdict: cert.verdict,
            reason: cert.reason,
            cond_i: cert.cond_i.map(|ci| ConditionI {
                holds: ci.holds,
                sigma_min: ci.sigma_min.and_then(finite),
            }),
            reduced_shape: cert.reduced_shape().map(|(r, k)| [r, k]),
            reduced_sigma_min: cert.reduced_sigma_min.and_then(finite),
            oracle_sigma_min: cert.oracle.sigma_min.and_then(finite),
            agreement: cert.agreement,
            dims: cert.dims,
            zero_residual: cert.zero_residual.and_then(finite),
            umv_residual: cert.umv_residual.and_then(finite),
            range_identity_residual: cert.range_identity_residual.and_then(finite),
            witness: cert
                .witness
                .as_ref()
                .map(|w| w.iter().map(|z| [z.re, z.im]).collect()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReportFormat {
    #[default]
    Json,
    Text,
}

impl std::str::FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "text" => Ok(ReportFormat::Text),
            other => Err(format!("unknown format {other:?} (expected json or text)")),
        }
    }
}

fn opt(x: Option<f64>) -> String {
    x.map_or_else(|| "-".to_string(), |v| format!("{v:.6e}"))
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports always serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| Error::Parse {
            path: e.path().to_string(),
            message: e.inner().to_string(),
        })
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "verdict            {}", self.verdict);
        let _ = writeln!(s, "reason             {}", self.reason);
        let _ = writeln!(s, "agreement          {}", self.agreement);
        let _ = writeln!(s, "oracle sigma_min   {}", opt(self.oracle_sigma_min));
        match self.cond_i {
            Some(ci) => {
                let _ = writeln!(s, "cond_i             holds={} sigma_min={}", ci.holds, opt(ci.sigma_min));
            }
            None => {
                let _ = writeln!(s, "cond_i             -");
            }
        }
        match self.reduced_shape {
            Some([r, k]) => {
                let _ = writeln!(s, "reduced            {r}x{k} sigma_min={}", opt(self.reduced_sigma_min));
            }
            None => {
                let _ = writeln!(s, "reduced            -");
            }
        }
        if let Some(d) = self.dims {
            let _ = writeln!(
                s,
                "dims               X1={} X2={} X3={} Y1={} Y2={} Y3={} RA_perp={} RB_perp={} R_int={}",
                d.X1, d.X2, d.X3, d.Y1, d.Y2, d.Y3, d.RA_perp, d.RB_perp, d.R_int
            );
        }
        let _ = writeln!(s, "zero_residual      {}", opt(self.zero_residual));
        let _ = writeln!(s, "umv_residual       {}", opt(self.umv_residual));
        if self.range_identity_residual.is_some() {
            let _ = writeln!(s, "range_identity     {}", opt(self.range_identity_residual));
        }
        if let Some(w) = &self.witness {
            let entries: Vec<String> = w.iter().map(|[re, im]| format!("{re:+.4e}{im:+.4e}i")).collect();
            let _ = writeln!(s, "witness            [{}]", entries.join(", "));
        }
        s
    }

    pub fn render(&self, format: ReportFormat) -> String {
        match format {
            ReportFormat::Json => self.to_json(),
            ReportFormat::Text => self.to_text(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const F2_INVERTIBLE: &str = r#"{
        "n": 2, "p": 1,
        "A": [[[1,0],[0,0]],[[0,0],[1,0]]],
        "B": [[[1,0]],[[0,0]]],
        "C": [[[0,0],[0,0]]],
        "D": [[[1,0]]]
    }"#;

    #[test]
    fn f2_file_is_invertible() {
        let inst = load_instance(F2_INVERTIBLE, &LoadOptions::default()).unwrap();
        let report = Report::from(&inst.certify());
        assert_eq!(report.verdict, Verdict::Invertible);
        assert!(report.agreement);
        assert!(report.witness.is_none());
    }

    #[test]
    fn malformed_json_names_the_field() {
        let text = r#"{"n": 2, "p": 1, "A": [[[1,0],[0,"x"]]]}"#;
        match parse_instance_file(text) {
            Err(Error::Parse { path, .. }) => assert_eq!(path, "A[0][1][1]"),
            other => panic!("expected parse error, got {other:?}"),
        }
        match parse_instance_file(r#"{"n": 2, "p": 1, "A": [], "B": [], "C": [], "tol": {"rank": 1}}"#) {
            Err(Error::Parse { path, .. }) => assert_eq!(path, "tol.rank"),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn shape_errors_name_the_matrix() {
        let text = F2_INVERTIBLE.replace(r#""D": [[[1,0]]]"#, r#""D": [[[1,0],[2,0]]]"#);
        match load_instance(&text, &LoadOptions::default()) {
            Err(Error::Shape { field, .. }) => assert_eq!(field, "D"),
            other => panic!("expected shape error, got {other:?}"),
        }
    }

    #[test]
    fn tolerance_precedence() {
        let text = F2_INVERTIBLE.replace(r#""n": 2,"#, r#""n": 2, "tol": {"rank_coeff": 3.0},"#);
        let base = ToleranceConfig::new(2.0, 1e-9, 50.0).unwrap();
        let opts = LoadOptions {
            base_tol: base,
            ..Default::default()
        };
        let LoadedInstance::General(inst) = load_instance(&text, &opts).unwrap() else {
            panic!("general expected")
        };
        assert_eq!(inst.tol().rank_coeff, 3.0);
        assert_eq!(inst.tol().borderline_factor, 50.0);
        let opts = LoadOptions {
            rank_coeff: Some(7.0),
            ..opts
        };
        let LoadedInstance::General(inst) = load_instance(&text, &opts).unwrap() else {
            panic!("general expected")
        };
        assert_eq!(inst.tol().rank_coeff, 7.0);
    }

    #[test]
    fn hamiltonian_files() {
        let text = r#"{"n": 2, "p": 2, "kind": "hamiltonian",
            "A": [[[1,0],[0,0]],[[0,0],[0,0]]],
            "B": [[[0,0],[0,0]],[[0,0],[1,0]]],
            "C": [[[0.5,0],[1,1]],[[1,-1],[2,0]]]}"#;
        let inst = load_instance(text, &LoadOptions::default()).unwrap();
        assert_eq!(inst.kind(), InstanceKind::Hamiltonian);
        assert_eq!(inst.certify().verdict, Verdict::Invertible);

        let skewed = text.replace("[[1,-1],[2,0]]", "[[1,-1.5],[2,0]]");
        assert!(matches!(
            load_instance(&skewed, &LoadOptions::default()),
            Err(Error::NotHermitian { which: "C", .. })
        ));
        let opts = LoadOptions {
            symmetrize: true,
            ..Default::default()
        };
        assert!(load_instance(&skewed, &opts).is_ok());

        let with_d = text.replace(r#""kind": "hamiltonian","#, r#""kind": "hamiltonian", "D": [],"#);
        assert!(matches!(
            load_instance(&with_d, &LoadOptions::default()),
            Err(Error::Shape { .. })
        ));
    }

    #[test]
    fn report_round_trips() {
        let text = F2_INVERTIBLE.replace(r#""C": [[[0,0],[0,0]]]"#, r#""C": [[[1,0],[5,0]]]"#);
        let inst = load_instance(&text, &LoadOptions::default()).unwrap();
        let report = Report::from(&inst.certify());
        assert_eq!(report.verdict, Verdict::Singular);
        assert!(report.witness.is_some());
        let json = report.to_json();
        let back = Report::from_json(&json).unwrap();
        assert_eq!(back, report);
        assert_eq!(back.to_json(), json);
        assert!(report.to_text().contains("verdict            Singular"));
    }

    #[test]
    fn instance_file_round_trips() {
        let inst = load_instance(F2_INVERTIBLE, &LoadOptions::default()).unwrap();
        let json = inst.to_file().to_json();
        let again = load_instance(&json, &LoadOptions::default()).unwrap();
        assert_eq!(again, inst);
    }
}
