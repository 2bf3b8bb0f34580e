//! File formats shared by the library and the command-line tools.
//!
//! Graphs travel as edge-list CSV (`src,dst,weight` header) with a JSON
//! sidecar recording the vertex count and directedness; signals as
//! headerless CSV with one row per vertex; everything else (spectra,
//! filters, sampling sets, PSDs, VAR models, learner diagnostics) as
//! small JSON documents. CSV floats are written with 17 significant
//! digits so a round trip reproduces every bit.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use ndarray::{Array1, Array2, ArrayView1, ArrayView2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filters::{ChebyshevCoefficients, GraphFilter};
use crate::graph::{Edge, Graph, Gso};
use crate::inverse::SamplingSet;
use crate::spectral::SpectralDecomposition;
use crate::stochastic::PsdEstimate;
use crate::timevertex::{VarCoefficients, VarModel};

fn io_err(path: &Path, source: std::io::Error) -> Error {
    Error::Io { path: path.display().to_string(), source }
}

fn malformed(path: &Path, line: usize, what: impl Into<String>) -> Error {
    Error::Malformed { path: path.display().to_string(), line, what: what.into() }
}

fn read_to_string(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| io_err(path, e))
}

fn write_string(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| io_err(path, e))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| malformed(path, 0, e.to_string()))?;
    text.push('\n');
    write_string(path, &text)
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| malformed(path, e.line(), e.to_string()))
}

/// 17 significant digits: the shortest width that survives a text round
/// trip for every f64.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn parse_f64(path: &Path, line: usize, field: &str) -> Result<f64> {
    field
        .trim()
        .parse::<f64>()
        .map_err(|_| malformed(path, line, format!("expected a number, got {field:?}")))
}

fn parse_usize(path: &Path, line: usize, field: &str) -> Result<usize> {
    field
        .trim()
        .parse::<usize>()
        .map_err(|_| malformed(path, line, format!("expected a vertex id, got {field:?}")))
}

/// The JSON sidecar accompanying an edge-list CSV.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GraphSidecar {
    pub n: usize,
    pub directed: bool,
}

/// The sidecar path for an edge list: same stem, `.json` extension.
pub fn sidecar_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("json")
}

/// Writes a graph as `src,dst,weight` CSV plus its JSON sidecar.
pub fn write_graph(csv_path: &Path, g: &Graph) -> Result<()> {
    let mut text = String::from("src,dst,weight\n");
    for e in g.edges() {
        text.push_str(&format!("{},{},{}\n", e.src, e.dst, fmt_f64(e.weight)));
    }
    write_string(csv_path, &text)?;
    write_json(&sidecar_path(csv_path), &GraphSidecar { n: g.n_vertices(), directed: g.is_directed() })
}

/// Reads an edge-list CSV and its sidecar back into a graph. Structural
/// validation (ranges, duplicates, weight conflicts) happens in the graph
/// constructor.
pub fn read_graph(csv_path: &Path) -> Result<Graph> {
    let sidecar: GraphSidecar = read_json(&sidecar_path(csv_path))?;
    let text = read_to_string(csv_path)?;
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header.trim() == "src,dst,weight" => {}
        Some((_, header)) => {
            return Err(malformed(csv_path, 1, format!("expected header src,dst,weight, got {header:?}")))
        }
        None => return Err(malformed(csv_path, 1, "empty edge list file")),
    }
    let mut edges = Vec::new();
    for (idx, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 3 {
            return Err(malformed(csv_path, idx + 1, format!("expected 3 fields, got {}", fields.len())));
        }
        let src = parse_usize(csv_path, idx + 1, fields[0])?;
        let dst = parse_usize(csv_path, idx + 1, fields[1])?;
        let weight = parse_f64(csv_path, idx + 1, fields[2])?;
        edges.push(Edge::new(src, dst, weight));
    }
    Graph::new(sidecar.n, edges, sidecar.directed)
}

/// Writes a matrix as headerless CSV, one row per vertex.
pub fn write_signal_matrix(path: &Path, xs: &ArrayView2<f64>) -> Result<()> {
    let mut text = String::new();
    for row in xs.rows() {
        let fields: Vec<String> = row.iter().map(|&v| fmt_f64(v)).collect();
        text.push_str(&fields.join(","));
        text.push('\n');
    }
    write_string(path, &text)
}

/// Reads a headerless numeric CSV into a matrix; every row must have the
/// same number of columns.
pub fn read_signal_matrix(path: &Path) -> Result<Array2<f64>> {
    let text = read_to_string(path)?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let row: Result<Vec<f64>> =
            line.split(',').map(|f| parse_f64(path, idx + 1, f)).collect();
        let row = row?;
        if let Some(first) = rows.first() {
            if row.len() != first.len() {
                return Err(malformed(
                    path,
                    idx + 1,
                    format!("row has {} columns, expected {}", row.len(), first.len()),
                ));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(malformed(path, 1, "no data rows"));
    }
    let n = rows.len();
    let m = rows[0].len();
    Ok(Array2::from_shape_fn((n, m), |(i, j)| rows[i][j]))
}

/// Writes a single signal as a one-column CSV.
pub fn write_signal_vector(path: &Path, x: &ArrayView1<f64>) -> Result<()> {
    let mat = x.to_owned().insert_axis(ndarray::Axis(1));
    write_signal_matrix(path, &mat.view())
}

/// Reads a one-column signal CSV.
pub fn read_signal_vector(path: &Path) -> Result<Array1<f64>> {
    let m = read_signal_matrix(path)?;
    if m.ncols() != 1 {
        return Err(malformed(
            path,
            1,
            format!("expected a single column, got {}", m.ncols()),
        ));
    }
    Ok(m.column(0).to_owned())
}

/// Writes sparse vertex labels as `vertex,label` CSV.
pub fn write_labels(path: &Path, labels: &[(usize, f64)]) -> Result<()> {
    let mut text = String::from("vertex,label\n");
    for &(v, l) in labels {
        text.push_str(&format!("{v},{}\n", fmt_f64(l)));
    }
    write_string(path, &text)
}

/// Reads a `vertex,label` CSV into (vertex, label) pairs in file order.
pub fn read_labels(path: &Path) -> Result<Vec<(usize, f64)>> {
    let text = read_to_string(path)?;
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header.trim() == "vertex,label" => {}
        Some((_, header)) => {
            return Err(malformed(path, 1, format!("expected header vertex,label, got {header:?}")))
        }
        None => return Err(malformed(path, 1, "empty labels file")),
    }
    let mut out = Vec::new();
    for (idx, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 2 {
            return Err(malformed(path, idx + 1, format!("expected 2 fields, got {}", fields.len())));
        }
        out.push((
            parse_usize(path, idx + 1, fields[0])?,
            parse_f64(path, idx + 1, fields[1])?,
        ));
    }
    Ok(out)
}

/// Spectrum export: eigenvalues and optional transform coefficients as
/// `[re, im]` pairs, plus the frequency ordering (eigenvalue indices
/// sorted by increasing variation).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectrumDocument {
    pub eigenvalues: Vec<[f64; 2]>,
    pub ordering: Vec<usize>,
    pub coefficients: Vec<[f64; 2]>,
}

impl SpectrumDocument {
    pub fn new(
        d: &SpectralDecomposition,
        coefficients: &[num_complex::Complex64],
    ) -> Self {
        SpectrumDocument {
            eigenvalues: d.eigenvalues().iter().map(|z| [z.re, z.im]).collect(),
            ordering: d.ordering().to_vec(),
            coefficients: coefficients.iter().map(|z| [z.re, z.im]).collect(),
        }
    }
}

pub fn write_spectrum(path: &Path, doc: &SpectrumDocument) -> Result<()> {
    write_json(path, doc)
}

pub fn read_spectrum(path: &Path) -> Result<SpectrumDocument> {
    read_json(path)
}

/// Serialized filter: `form` is one of `taps`, `response`, `rational`, or
/// `chebyshev`; `interval` accompanies the Chebyshev form only (those
/// coefficients are meaningless without the interval they were fitted
/// on). Response filters drop their operator binding on disk and are
/// rebound on load.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FilterDocument {
    pub form: String,
    pub coefficients: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub interval: Option<[f64; 2]>,
}

impl FilterDocument {
    pub fn from_filter(f: &GraphFilter) -> Self {
        let coefficients = match f {
            GraphFilter::Taps { coefficients } => coefficients.clone(),
            GraphFilter::Response { values, .. } => values.clone(),
            GraphFilter::Rational { denominator } => denominator.clone(),
        };
        FilterDocument { form: f.form_name().to_string(), coefficients, interval: None }
    }

    pub fn from_chebyshev(c: &ChebyshevCoefficients) -> Self {
        FilterDocument {
            form: "chebyshev".to_string(),
            coefficients: c.coefficients.clone(),
            interval: Some([c.interval.0, c.interval.1]),
        }
    }

    /// Rebuilds the in-memory filter. Response filters need the
    /// decomposition they will run against; Chebyshev documents are not
    /// [`GraphFilter`]s, load them with [`FilterDocument::into_chebyshev`].
    pub fn into_filter(&self, d: Option<&SpectralDecomposition>) -> Result<GraphFilter> {
        match self.form.as_str() {
            "taps" => GraphFilter::taps(self.coefficients.clone()),
            "rational" => GraphFilter::rational(self.coefficients.clone()),
            "response" => {
                let d = d.ok_or_else(|| {
                    Error::invalid("loading a response filter needs the target decomposition")
                })?;
                GraphFilter::response(self.coefficients.clone(), d)
            }
            "chebyshev" => Err(Error::invalid(
                "chebyshev documents hold interval coefficients, not a graph filter; load with into_chebyshev",
            )),
            other => Err(Error::invalid(format!("unknown filter form {other:?}"))),
        }
    }

    pub fn into_chebyshev(&self) -> Result<ChebyshevCoefficients> {
        if self.form != "chebyshev" {
            return Err(Error::invalid(format!(
                "filter form is {:?}, not chebyshev",
                self.form
            )));
        }
        let interval = self
            .interval
            .ok_or_else(|| Error::invalid("chebyshev document is missing its interval"))?;
        Ok(ChebyshevCoefficients {
            coefficients: self.coefficients.clone(),
            interval: (interval[0], interval[1]),
        })
    }
}

pub fn write_filter(path: &Path, doc: &FilterDocument) -> Result<()> {
    write_json(path, doc)
}

pub fn read_filter(path: &Path) -> Result<FilterDocument> {
    read_json(path)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct SamplingDocument {
    n: usize,
    indices: Vec<usize>,
}

pub fn write_sampling_set(path: &Path, m: &SamplingSet) -> Result<()> {
    write_json(path, &SamplingDocument { n: m.n(), indices: m.indices().to_vec() })
}

pub fn read_sampling_set(path: &Path) -> Result<SamplingSet> {
    let doc: SamplingDocument = read_json(path)?;
    SamplingSet::new(doc.n, doc.indices)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct PsdDocument {
    eigenvalue_index_psd: Vec<f64>,
    samples: usize,
}

pub fn write_psd(path: &Path, psd: &PsdEstimate) -> Result<()> {
    write_json(
        path,
        &PsdDocument {
            eigenvalue_index_psd: psd.values().to_vec(),
            samples: psd.sample_count(),
        },
    )
}

/// Reads a PSD document. The operator binding is not stored on disk, so
/// the result checks against decompositions by length only.
pub fn read_psd(path: &Path) -> Result<PsdEstimate> {
    let doc: PsdDocument = read_json(path)?;
    PsdEstimate::with_sample_count(doc.eigenvalue_index_psd, doc.samples)
}

/// Serialized VAR model. Graph-filter models store the tap grid and the
/// fingerprint of the operator they were fitted on; structural models
/// store their coefficient matrices row by row.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VarDocument {
    pub mode: String,
    pub order: usize,
    pub n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gso_fingerprint: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub taps: Option<Vec<Vec<f64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub matrices: Option<Vec<Vec<Vec<f64>>>>,
}

fn matrix_to_rows(m: &Array2<f64>) -> Vec<Vec<f64>> {
    m.rows().into_iter().map(|r| r.to_vec()).collect()
}

fn rows_to_matrix(path: &Path, rows: &[Vec<f64>], what: &str) -> Result<Array2<f64>> {
    if rows.is_empty() {
        return Err(malformed(path, 0, format!("{what} has no rows")));
    }
    let cols = rows[0].len();
    if rows.iter().any(|r| r.len() != cols) {
        return Err(malformed(path, 0, format!("{what} rows have differing lengths")));
    }
    Ok(Array2::from_shape_fn((rows.len(), cols), |(i, j)| rows[i][j]))
}

impl VarDocument {
    pub fn from_model(m: &VarModel) -> Self {
        match m.coefficients() {
            VarCoefficients::GraphTaps { taps } => VarDocument {
                mode: m.mode_name().to_string(),
                order: m.order(),
                n: m.n(),
                gso_fingerprint: m.gso_fingerprint(),
                taps: Some(matrix_to_rows(taps)),
                matrices: None,
            },
            VarCoefficients::Structural { matrices } => VarDocument {
                mode: m.mode_name().to_string(),
                order: m.order(),
                n: m.n(),
                gso_fingerprint: None,
                taps: None,
                matrices: Some(matrices.iter().map(matrix_to_rows).collect()),
            },
        }
    }
}

pub fn write_var_model(path: &Path, m: &VarModel) -> Result<()> {
    write_json(path, &VarDocument::from_model(m))
}

/// Loads a VAR model. Graph-filter models need the operator they were
/// fitted on (verified against the stored fingerprint); structural
/// models load standalone.
pub fn read_var_model(path: &Path, s: Option<&Gso>) -> Result<VarModel> {
    let doc: VarDocument = read_json(path)?;
    match doc.mode.as_str() {
        "graph-var" => {
            let s = s.ok_or_else(|| {
                Error::invalid("loading a graph-var model needs its shift operator")
            })?;
            let taps = doc
                .taps
                .as_deref()
                .ok_or_else(|| malformed(path, 0, "graph-var document is missing taps"))?;
            if let Some(expected) = doc.gso_fingerprint {
                if expected != s.fingerprint() {
                    return Err(Error::FingerprintMismatch {
                        expected,
                        found: s.fingerprint(),
                    });
                }
            }
            VarModel::graph_var(rows_to_matrix(path, taps, "tap grid")?, s)
        }
        "structural-var" => {
            let rows = doc.matrices.as_deref().ok_or_else(|| {
                malformed(path, 0, "structural-var document is missing matrices")
            })?;
            let matrices: Result<Vec<Array2<f64>>> = rows
                .iter()
                .map(|m| rows_to_matrix(path, m, "coefficient matrix"))
                .collect();
            VarModel::structural(matrices?)
        }
        other => Err(malformed(path, 0, format!("unknown var mode {other:?}"))),
    }
}

/// Learner diagnostics: objective trace plus named scalar residuals,
/// keys sorted for reproducible bytes.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DiagnosticsDocument {
    pub objective_trace: Vec<f64>,
    pub diagnostics: BTreeMap<String, f64>,
}

impl DiagnosticsDocument {
    pub fn new(trace: &[f64], pairs: &[(String, f64)]) -> Self {
        DiagnosticsDocument {
            objective_trace: trace.to_vec(),
            diagnostics: pairs.iter().cloned().collect(),
        }
    }
}

pub fn write_diagnostics(path: &Path, doc: &DiagnosticsDocument) -> Result<()> {
    write_json(path, doc)
}

pub fn read_diagnostics(path: &Path) -> Result<DiagnosticsDocument> {
    read_json(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::GsoVariant;
    use crate::spectral::decompose;
    use ndarray::array;
    use tempfile::TempDir;

    fn dir() -> TempDir {
        TempDir::new().unwrap()
    }

    #[test]
    fn graphs_survive_the_round_trip() {
        let d = dir();
        let path = d.path().join("g.csv");
        let g = Graph::new(
            4,
            vec![Edge::new(0, 1, 0.5), Edge::new(2, 3, -1.25), Edge::new(1, 2, 1.0 / 3.0)],
            false,
        )
        .unwrap();
        write_graph(&path, &g).unwrap();
        let back = read_graph(&path).unwrap();
        assert_eq!(back.n_vertices(), 4);
        assert!(!back.is_directed());
        assert_eq!(back.edges().len(), 3);
        for (a, b) in back.edges().iter().zip(g.edges()) {
            assert_eq!((a.src, a.dst), (b.src, b.dst));
            assert_eq!(a.weight, b.weight, "weights must round-trip bit-exactly");
        }

        let directed = Graph::directed_cycle(5).unwrap();
        let path2 = d.path().join("c.csv");
        write_graph(&path2, &directed).unwrap();
        let cycle = read_graph(&path2).unwrap();
        assert!(Gso::from_graph(&cycle, GsoVariant::Adjacency).unwrap().is_directed_cycle());
    }

    #[test]
    fn edge_list_rejects_malformed_content() {
        let d = dir();
        let path = d.path().join("g.csv");
        fs::write(&path, "src,dst,weight\n0,1,1.0\n").unwrap();
        // missing sidecar
        assert!(matches!(read_graph(&path), Err(Error::Io { .. })));
        fs::write(sidecar_path(&path), "{\"n\": 3, \"directed\": false}").unwrap();
        assert!(read_graph(&path).is_ok());

        fs::write(&path, "source,target,w\n0,1,1.0\n").unwrap();
        assert!(matches!(read_graph(&path), Err(Error::Malformed { line: 1, .. })));

        fs::write(&path, "src,dst,weight\n0,1\n").unwrap();
        assert!(matches!(read_graph(&path), Err(Error::Malformed { line: 2, .. })));

        fs::write(&path, "src,dst,weight\n0,x,1.0\n").unwrap();
        assert!(matches!(read_graph(&path), Err(Error::Malformed { line: 2, .. })));

        // structurally bad edges are the graph constructor's call
        fs::write(&path, "src,dst,weight\n0,7,1.0\n").unwrap();
        assert!(matches!(read_graph(&path), Err(Error::VertexOutOfRange { .. })));
    }

    #[test]
    fn signal_matrices_round_trip_bit_exactly() {
        let d = dir();
        let path = d.path().join("x.csv");
        let x = array![
            [1.0 / 3.0, -0.125, 1e-300],
            [f64::MAX, 2.5e-17, 0.1],
        ];
        write_signal_matrix(&path, &x.view()).unwrap();
        let back = read_signal_matrix(&path).unwrap();
        assert_eq!(back, x);

        let v = array![0.25, -1.5, 0.0];
        let vpath = d.path().join("v.csv");
        write_signal_vector(&vpath, &v.view()).unwrap();
        assert_eq!(read_signal_vector(&vpath).unwrap(), v);
        assert!(read_signal_vector(&path).is_err(), "matrix is not a vector");
    }

    #[test]
    fn ragged_or_empty_signal_files_error() {
        let d = dir();
        let path = d.path().join("x.csv");
        fs::write(&path, "1.0,2.0\n3.0\n").unwrap();
        assert!(matches!(read_signal_matrix(&path), Err(Error::Malformed { line: 2, .. })));
        fs::write(&path, "").unwrap();
        assert!(read_signal_matrix(&path).is_err());
    }

    #[test]
    fn labels_round_trip() {
        let d = dir();
        let path = d.path().join("y.csv");
        let labels = vec![(0, 1.0), (3, -1.0), (7, 0.5)];
        write_labels(&path, &labels).unwrap();
        assert_eq!(read_labels(&path).unwrap(), labels);
        fs::write(&path, "vertex,label\n1;2\n").unwrap();
        assert!(read_labels(&path).is_err());
    }

    #[test]
    fn sampling_sets_round_trip_and_validate() {
        let d = dir();
        let path = d.path().join("m.json");
        let m = SamplingSet::new(8, vec![1, 4, 6]).unwrap();
        write_sampling_set(&path, &m).unwrap();
        let back = read_sampling_set(&path).unwrap();
        assert_eq!(back.n(), 8);
        assert_eq!(back.indices(), &[1, 4, 6]);
        fs::write(&path, "{\"n\": 4, \"indices\": [9]}").unwrap();
        assert!(read_sampling_set(&path).is_err());
    }

    #[test]
    fn psd_documents_keep_the_sample_count() {
        let d = dir();
        let path = d.path().join("psd.json");
        let g = Graph::new(3, vec![Edge::new(0, 1, 1.0), Edge::new(1, 2, 1.0)], false).unwrap();
        let s = Gso::from_graph(&g, GsoVariant::CombinatorialLaplacian).unwrap();
        let dec = decompose(&s).unwrap();
        let xs = crate::stochastic::synthesize_stationary(
            &dec,
            &PsdEstimate::new(vec![1.0, 0.5, 0.25]).unwrap(),
            64,
            7,
        )
        .unwrap();
        let est = crate::stochastic::periodogram(&dec, &xs).unwrap();
        write_psd(&path, &est).unwrap();
        let back = read_psd(&path).unwrap();
        assert_eq!(back.sample_count(), 64);
        assert_eq!(back.values(), est.values());
    }

    #[test]
    fn filter_documents_cover_all_forms() {
        let d = dir();
        let path = d.path().join("f.json");

        let taps = GraphFilter::taps(vec![0.0, 1.0, -0.5]).unwrap();
        write_filter(&path, &FilterDocument::from_filter(&taps)).unwrap();
        let doc = read_filter(&path).unwrap();
        assert_eq!(doc.form, "taps");
        match doc.into_filter(None).unwrap() {
            GraphFilter::Taps { coefficients } => assert_eq!(coefficients, vec![0.0, 1.0, -0.5]),
            other => panic!("wrong form: {other:?}"),
        }

        let rational = GraphFilter::rational(vec![1.0, 0.3]).unwrap();
        let rd = FilterDocument::from_filter(&rational);
        assert_eq!(rd.form, "rational");
        assert!(rd.into_filter(None).is_ok());

        let g = Graph::new(3, vec![Edge::new(0, 1, 1.0), Edge::new(1, 2, 1.0)], false).unwrap();
        let s = Gso::from_graph(&g, GsoVariant::CombinatorialLaplacian).unwrap();
        let dec = decompose(&s).unwrap();
        let response = GraphFilter::response(vec![1.0, 0.5, 0.25], &dec).unwrap();
        let rdoc = FilterDocument::from_filter(&response);
        assert!(rdoc.into_filter(None).is_err(), "response needs a decomposition");
        match rdoc.into_filter(Some(&dec)).unwrap() {
            GraphFilter::Response { values, .. } => assert_eq!(values, vec![1.0, 0.5, 0.25]),
            other => panic!("wrong form: {other:?}"),
        }

        let cheb = crate::filters::chebyshev_fit(|x| (-x).exp(), 5, (0.0, 4.0)).unwrap();
        let cdoc = FilterDocument::from_chebyshev(&cheb);
        write_filter(&path, &cdoc).unwrap();
        let cback = read_filter(&path).unwrap().into_chebyshev().unwrap();
        assert_eq!(cback.coefficients, cheb.coefficients);
        assert_eq!(cback.interval, (0.0, 4.0));
        assert!(read_filter(&path).unwrap().into_filter(None).is_err());

        let bogus = FilterDocument {
            form: "warped".to_string(),
            coefficients: vec![1.0],
            interval: None,
        };
        assert!(bogus.into_filter(None).is_err());
        assert!(bogus.into_chebyshev().is_err());
    }

    #[test]
    fn var_documents_round_trip_both_modes() {
        let d = dir();
        let g = Graph::new(3, vec![Edge::new(0, 1, 1.0), Edge::new(1, 2, 0.5)], false).unwrap();
        let s = Gso::from_graph(&g, GsoVariant::Adjacency).unwrap();
        let model = VarModel::graph_var(array![[0.4, 0.1], [0.0, -0.2]], &s).unwrap();
        let path = d.path().join("m.json");
        write_var_model(&path, &model).unwrap();
        assert!(read_var_model(&path, None).is_err(), "graph-var needs its operator");
        let back = read_var_model(&path, Some(&s)).unwrap();
        assert_eq!(back.order(), 2);
        match back.coefficients() {
            VarCoefficients::GraphTaps { taps } => {
                assert_eq!(taps, &array![[0.4, 0.1], [0.0, -0.2]]);
            }
            other => panic!("wrong mode: {other:?}"),
        }
        let other_g = Graph::new(3, vec![Edge::new(0, 2, 1.0)], false).unwrap();
        let other_s = Gso::from_graph(&other_g, GsoVariant::Adjacency).unwrap();
        assert!(matches!(
            read_var_model(&path, Some(&other_s)),
            Err(Error::FingerprintMismatch { .. })
        ));

        let a0 = array![[0.0, 0.3], [0.1, 0.0]];
        let a1 = array![[0.2, 0.0], [0.0, 0.2]];
        let structural = VarModel::structural(vec![a0.clone(), a1.clone()]).unwrap();
        write_var_model(&path, &structural).unwrap();
        let back = read_var_model(&path, None).unwrap();
        match back.coefficients() {
            VarCoefficients::Structural { matrices } => {
                assert_eq!(matrices[0], a0);
                assert_eq!(matrices[1], a1);
            }
            other => panic!("wrong mode: {other:?}"),
        }
    }

    #[test]
    fn spectrum_and_diagnostics_documents_round_trip() {
        let d = dir();
        let g = Graph::directed_cycle(4).unwrap();
        let s = Gso::from_graph(&g, GsoVariant::Adjacency).unwrap();
        let dec = decompose(&s).unwrap();
        let coef = dec.gft(&array![1.0, 0.0, 0.0, 0.0].view()).unwrap();
        let path = d.path().join("spectrum.json");
        write_spectrum(&path, &SpectrumDocument::new(&dec, coef.as_slice().unwrap())).unwrap();
        let back = read_spectrum(&path).unwrap();
        assert_eq!(back.eigenvalues.len(), 4);
        assert_eq!(back.coefficients.len(), 4);
        assert_eq!(back.ordering.len(), 4);

        let diag = DiagnosticsDocument::new(
            &[3.0, 2.0, 1.5],
            &[("residual".to_string(), 0.25), ("cond".to_string(), 10.0)],
        );
        let dpath = d.path().join("diag.json");
        write_diagnostics(&dpath, &diag).unwrap();
        let dback = read_diagnostics(&dpath).unwrap();
        assert_eq!(dback.objective_trace, vec![3.0, 2.0, 1.5]);
        assert_eq!(dback.diagnostics["residual"], 0.25);
    }

    #[test]
    fn seventeen_digits_reproduce_every_float() {
        for &v in &[1.0 / 3.0, 0.1, -2.5e-300, 1.7976931348623157e308, 5e-324, 0.0] {
            let text = fmt_f64(v);
            let back: f64 = text.parse().unwrap();
            assert_eq!(back, v, "{text} did not round-trip");
        }
    }
}
