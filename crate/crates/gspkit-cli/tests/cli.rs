//! Behavior tests for the gspkit binary: the documented example runs,
//! metadata bookkeeping, thread-cap handling, and the error contract.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use ndarray::{array, Array1, Array2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use gspkit::inverse::{select_sampling_set, BandlimitedModel};
use gspkit::spectral::decompose;
use gspkit::stochastic::PsdEstimate;
use gspkit::{Edge, Graph, Gso, GsoVariant};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_gspkit"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn assert_ok(out: &Output) {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

/// Parses one numeric column out of a headerless or headered CSV.
fn column(csv: &str, index: usize) -> Vec<f64> {
    csv.lines()
        .filter_map(|line| {
            let fields: Vec<&str> = line.split(',').collect();
            fields.get(index).and_then(|f| f.trim().parse::<f64>().ok())
        })
        .collect()
}

fn write_k3(dir: &Path) -> PathBuf {
    let g = Graph::new(
        3,
        vec![Edge::new(0, 1, 1.0), Edge::new(0, 2, 1.0), Edge::new(1, 2, 1.0)],
        false,
    )
    .unwrap();
    let path = dir.join("k3.csv");
    gspkit::io::write_graph(&path, &g).unwrap();
    path
}

#[test]
fn k3_spectrum_lists_the_complete_graph_eigenvalues() {
    let tmp = tempfile::tempdir().unwrap();
    let k3 = write_k3(tmp.path());
    let out_dir = tmp.path().join("out");
    let out = run(&[
        "spectrum", "--graph", k3.to_str().unwrap(), "--variant", "laplacian",
        "--out-dir", out_dir.to_str().unwrap(), "--quiet",
    ]);
    assert_ok(&out);

    let mut eig = column(&read(&out_dir.join("eigenvalues.csv")), 1);
    eig.sort_by(f64::total_cmp);
    assert_eq!(eig.len(), 3);
    assert!(eig[0].abs() <= 1e-12);
    assert!((eig[1] - 3.0).abs() <= 1e-12);
    assert!((eig[2] - 3.0).abs() <= 1e-12);

    // the run metadata names the command, inputs, and seed
    let meta: serde_json::Value =
        serde_json::from_str(&read(&out_dir.join("metadata.json"))).unwrap();
    assert_eq!(meta["command"], "spectrum");
    assert_eq!(meta["seed"], 0);
    assert_eq!(meta["parameters"]["variant"], "laplacian");
    assert!(meta["inputs"]["graph"].as_str().unwrap().ends_with("k3.csv"));
    assert!(meta["wall_time_seconds"].as_f64().unwrap() >= 0.0);
}

#[test]
fn cycle_taps_delay_the_impulse() {
    let tmp = tempfile::tempdir().unwrap();
    let cycle = tmp.path().join("cycle4.csv");
    gspkit::io::write_graph(&cycle, &Graph::directed_cycle(4).unwrap()).unwrap();
    let e0 = tmp.path().join("e0.csv");
    gspkit::io::write_signal_vector(&e0, &array![1.0, 0.0, 0.0, 0.0].view()).unwrap();
    let out_dir = tmp.path().join("out");
    let out = run(&[
        "filter", "--graph", cycle.to_str().unwrap(), "--taps", "0,1",
        "--signal", e0.to_str().unwrap(),
        "--out-dir", out_dir.to_str().unwrap(), "--quiet",
    ]);
    assert_ok(&out);
    let y = column(&read(&out_dir.join("filtered.csv")), 0);
    assert_eq!(y, vec![0.0, 1.0, 0.0, 0.0]);

    let filter: serde_json::Value =
        serde_json::from_str(&read(&out_dir.join("filter.json"))).unwrap();
    assert_eq!(filter["form"], "taps");
}

#[test]
fn bandlimited_interpolation_reports_negligible_error() {
    let tmp = tempfile::tempdir().unwrap();
    let graph_path = tmp.path().join("path8.csv");
    let edges = (0..7).map(|i| Edge::new(i, i + 1, 1.0 + 0.2 * i as f64)).collect();
    let g = Graph::new(8, edges, false).unwrap();
    gspkit::io::write_graph(&graph_path, &g).unwrap();

    // a strictly bandlimited target with bandwidth 3
    let l = Gso::from_graph(&g, GsoVariant::CombinatorialLaplacian).unwrap();
    let d = decompose(&l).unwrap();
    let b = BandlimitedModel::new(&d, 3).unwrap();
    let x = b.synthesize(&array![1.0, -0.5, 0.25].view()).unwrap();
    let signal = tmp.path().join("x.csv");
    gspkit::io::write_signal_vector(&signal, &x.view()).unwrap();
    let (set, _) = select_sampling_set(&b, 4).unwrap();
    let samples = tmp.path().join("samples.json");
    gspkit::io::write_sampling_set(&samples, &set).unwrap();

    let out_dir = tmp.path().join("out");
    let out = run(&[
        "interpolate", "--graph", graph_path.to_str().unwrap(), "--variant", "laplacian",
        "--mode", "bandlimited", "--k", "3",
        "--samples", samples.to_str().unwrap(), "--signal", signal.to_str().unwrap(),
        "--out-dir", out_dir.to_str().unwrap(), "--quiet",
    ]);
    assert_ok(&out);
    let meta: serde_json::Value =
        serde_json::from_str(&read(&out_dir.join("metadata.json"))).unwrap();
    let err = meta["results"]["reconstruction_error"].as_f64().unwrap();
    assert!(err <= 1e-8, "reconstruction error {err:.3e} above 1e-8");

    let y = column(&read(&out_dir.join("interpolated.csv")), 0);
    for (a, b) in y.iter().zip(x.iter()) {
        assert!((a - b).abs() <= 1e-8);
    }
}

#[test]
fn correlation_sweep_finds_the_planted_edges() {
    let tmp = tempfile::tempdir().unwrap();
    let k3 = write_k3(tmp.path());
    let psd = tmp.path().join("psd.json");
    gspkit::io::write_psd(&psd, &PsdEstimate::new(vec![1.0, 0.5, 0.25]).unwrap()).unwrap();

    let synth_dir = tmp.path().join("synth");
    assert_ok(&run(&[
        "synth", "--graph", k3.to_str().unwrap(), "--variant", "laplacian",
        "--psd", psd.to_str().unwrap(), "--m", "300", "--seed", "9",
        "--out-dir", synth_dir.to_str().unwrap(), "--quiet",
    ]));

    let learn_dir = tmp.path().join("learn");
    let signals = synth_dir.join("signals.csv");
    assert_ok(&run(&[
        "learn", "--mode", "corr", "--signals", signals.to_str().unwrap(),
        "--threshold", "0.2", "--sweep", "--truth", k3.to_str().unwrap(),
        "--out-dir", learn_dir.to_str().unwrap(), "--quiet",
    ]));
    let meta: serde_json::Value =
        serde_json::from_str(&read(&learn_dir.join("metadata.json"))).unwrap();
    let best = meta["results"]["best_f1"].as_f64().unwrap();
    assert!(best >= 0.8, "sweep best F1 {best:.3} below 0.8");
    let sweep = read(&learn_dir.join("sweep.csv"));
    assert!(sweep.starts_with("threshold,f1\n"));
}

#[test]
fn thread_cap_does_not_change_the_synthesized_bytes() {
    let tmp = tempfile::tempdir().unwrap();
    let k3 = write_k3(tmp.path());
    let psd = tmp.path().join("psd.json");
    gspkit::io::write_psd(&psd, &PsdEstimate::new(vec![1.0, 0.5, 0.25]).unwrap()).unwrap();

    let mut outputs = Vec::new();
    for (dir, threads) in [("free", None), ("capped", Some("1"))] {
        let out_dir = tmp.path().join(dir);
        let mut c = bin();
        c.args([
            "synth", "--graph", k3.to_str().unwrap(), "--variant", "laplacian",
            "--psd", psd.to_str().unwrap(), "--m", "64", "--seed", "3",
            "--out-dir", out_dir.to_str().unwrap(), "--quiet",
        ]);
        match threads {
            Some(t) => {
                c.env("GSPKIT_THREADS", t);
            }
            None => {
                c.env_remove("GSPKIT_THREADS");
            }
        }
        let out = c.output().unwrap();
        assert_ok(&out);
        outputs.push(std::fs::read(out_dir.join("signals.csv")).unwrap());
    }
    assert!(outputs[0] == outputs[1], "thread cap changed the output bytes");
}

#[test]
fn invalid_thread_cap_is_a_usage_error() {
    let tmp = tempfile::tempdir().unwrap();
    let k3 = write_k3(tmp.path());
    let out = bin()
        .args([
            "spectrum", "--graph", k3.to_str().unwrap(),
            "--out-dir", tmp.path().join("out").to_str().unwrap(),
        ])
        .env("GSPKIT_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error[usage]:"));
}

#[test]
fn usage_errors_exit_2() {
    let tmp = tempfile::tempdir().unwrap();
    let out_dir = tmp.path().join("out");

    // input that does not exist
    let missing = run(&[
        "spectrum", "--graph", tmp.path().join("nope.csv").to_str().unwrap(),
        "--out-dir", out_dir.to_str().unwrap(),
    ]);
    assert_eq!(missing.status.code(), Some(2));
    let msg = String::from_utf8_lossy(&missing.stderr);
    assert!(msg.starts_with("error[usage]:"), "got: {msg}");
    assert_eq!(msg.trim_end().lines().count(), 1);

    // flags the command does not define (argument parsing itself)
    let unknown = run(&["spectrum", "--bogus"]);
    assert_eq!(unknown.status.code(), Some(2));

    // a mode missing its required companion flag
    let k3 = write_k3(tmp.path());
    let sig = tmp.path().join("x.csv");
    gspkit::io::write_signal_vector(&sig, &array![1.0, 0.0, 0.0].view()).unwrap();
    let samples = tmp.path().join("s.json");
    std::fs::write(&samples, "{\"n\":3,\"indices\":[0,2]}\n").unwrap();
    let no_k = run(&[
        "interpolate", "--graph", k3.to_str().unwrap(), "--mode", "bandlimited",
        "--samples", samples.to_str().unwrap(), "--signal", sig.to_str().unwrap(),
        "--out-dir", out_dir.to_str().unwrap(),
    ]);
    assert_eq!(no_k.status.code(), Some(2));
}

#[test]
fn data_errors_exit_3() {
    let tmp = tempfile::tempdir().unwrap();
    let out_dir = tmp.path().join("out");

    // wrong edge-list header
    let bad = tmp.path().join("bad.csv");
    std::fs::write(&bad, "from,to,w\n0,1,1.0\n").unwrap();
    std::fs::write(tmp.path().join("bad.json"), "{\"n\":2,\"directed\":false}\n").unwrap();
    let header = run(&[
        "spectrum", "--graph", bad.to_str().unwrap(),
        "--out-dir", out_dir.to_str().unwrap(),
    ]);
    assert_eq!(header.status.code(), Some(3));
    let msg = String::from_utf8_lossy(&header.stderr);
    assert!(msg.starts_with("error[data]:"), "got: {msg}");

    // ragged signal matrix
    let k3 = write_k3(tmp.path());
    let ragged = tmp.path().join("ragged.csv");
    std::fs::write(&ragged, "1.0,2.0\n3.0\n4.0,5.0\n").unwrap();
    let rows = run(&[
        "psd", "--graph", k3.to_str().unwrap(), "--signals", ragged.to_str().unwrap(),
        "--out-dir", out_dir.to_str().unwrap(),
    ]);
    assert_eq!(rows.status.code(), Some(3));

    // signal length that does not match the graph
    let sig5 = tmp.path().join("x5.csv");
    gspkit::io::write_signal_vector(&sig5, &Array1::<f64>::ones(5).view()).unwrap();
    let mismatch = run(&[
        "filter", "--graph", k3.to_str().unwrap(), "--taps", "0,1",
        "--signal", sig5.to_str().unwrap(),
        "--out-dir", out_dir.to_str().unwrap(),
    ]);
    assert_eq!(mismatch.status.code(), Some(3));
}

#[test]
fn numerical_errors_exit_4() {
    let tmp = tempfile::tempdir().unwrap();
    let k3 = write_k3(tmp.path());
    let sig = tmp.path().join("x.csv");
    gspkit::io::write_signal_vector(&sig, &array![1.0, 0.0, 0.0].view()).unwrap();

    // K3 Laplacian has eigenvalue 3, so I - S/3 cannot be inverted
    let out = run(&[
        "filter", "--graph", k3.to_str().unwrap(), "--variant", "laplacian",
        "--signal", sig.to_str().unwrap(), "--denominator", "1,-0.3333333333333333",
        "--out-dir", tmp.path().join("out").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(4));
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.starts_with("error[numerical]:"), "got: {msg}");
}

#[test]
fn seeded_reruns_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let k3 = write_k3(tmp.path());
    let psd = tmp.path().join("psd.json");
    gspkit::io::write_psd(&psd, &PsdEstimate::new(vec![2.0, 1.0, 0.5]).unwrap()).unwrap();
    let mut bytes = Vec::new();
    for dir in ["a", "b"] {
        let out_dir = tmp.path().join(dir);
        assert_ok(&run(&[
            "synth", "--graph", k3.to_str().unwrap(), "--variant", "laplacian",
            "--psd", psd.to_str().unwrap(), "--m", "100", "--seed", "17",
            "--out-dir", out_dir.to_str().unwrap(), "--quiet",
        ]));
        bytes.push(std::fs::read(out_dir.join("signals.csv")).unwrap());
    }
    assert!(bytes[0] == bytes[1]);

    // a different seed actually changes the draw
    let other = tmp.path().join("c");
    assert_ok(&run(&[
        "synth", "--graph", k3.to_str().unwrap(), "--variant", "laplacian",
        "--psd", psd.to_str().unwrap(), "--m", "100", "--seed", "18",
        "--out-dir", other.to_str().unwrap(), "--quiet",
    ]));
    let changed = std::fs::read(other.join("signals.csv")).unwrap();
    assert!(changed != bytes[0], "seed had no effect on the synthesis");
}

#[test]
fn synthesis_feeds_back_into_a_matching_psd() {
    let tmp = tempfile::tempdir().unwrap();
    // weighted path: distinct eigenvalues keep each bin identifiable
    let graph_path = tmp.path().join("path5.csv");
    let edges = (0..4).map(|i| Edge::new(i, i + 1, 1.0 + 0.3 * i as f64)).collect();
    gspkit::io::write_graph(&graph_path, &Graph::new(5, edges, false).unwrap()).unwrap();
    let planted = vec![2.0, 1.2, 0.8, 0.5, 0.3];
    let psd_path = tmp.path().join("psd.json");
    gspkit::io::write_psd(&psd_path, &PsdEstimate::new(planted.clone()).unwrap()).unwrap();

    let synth_dir = tmp.path().join("synth");
    assert_ok(&run(&[
        "synth", "--graph", graph_path.to_str().unwrap(), "--variant", "laplacian",
        "--psd", psd_path.to_str().unwrap(), "--m", "8000", "--seed", "29",
        "--out-dir", synth_dir.to_str().unwrap(), "--quiet",
    ]));
    let psd_dir = tmp.path().join("psd_out");
    assert_ok(&run(&[
        "psd", "--graph", graph_path.to_str().unwrap(), "--variant", "laplacian",
        "--signals", synth_dir.join("signals.csv").to_str().unwrap(),
        "--out-dir", psd_dir.to_str().unwrap(), "--quiet",
    ]));
    let est = gspkit::io::read_psd(&psd_dir.join("psd.json")).unwrap();
    assert_eq!(est.sample_count(), 8000);
    for (e, p) in est.values().iter().zip(planted.iter()) {
        assert!((e - p).abs() / p <= 0.15, "estimated {e:.3} vs planted {p:.3}");
    }
}

#[test]
fn ssl_splits_the_two_cluster_graph() {
    let tmp = tempfile::tempdir().unwrap();
    // two triangles joined by one weak edge
    let mut edges = vec![
        Edge::new(0, 1, 1.0),
        Edge::new(0, 2, 1.0),
        Edge::new(1, 2, 1.0),
        Edge::new(3, 4, 1.0),
        Edge::new(3, 5, 1.0),
        Edge::new(4, 5, 1.0),
    ];
    edges.push(Edge::new(2, 3, 0.05));
    let graph_path = tmp.path().join("clusters.csv");
    gspkit::io::write_graph(&graph_path, &Graph::new(6, edges, false).unwrap()).unwrap();
    let labels = tmp.path().join("labels.csv");
    gspkit::io::write_labels(&labels, &[(0, 1.0), (5, -1.0)]).unwrap();

    let out_dir = tmp.path().join("out");
    assert_ok(&run(&[
        "ssl", "--graph", graph_path.to_str().unwrap(), "--variant", "laplacian",
        "--labels", labels.to_str().unwrap(), "--alpha", "0.5",
        "--out-dir", out_dir.to_str().unwrap(), "--quiet",
    ]));
    let classes = column(&read(&out_dir.join("classes.csv")), 0);
    assert_eq!(classes[..3], [1.0, 1.0, 1.0]);
    assert_eq!(classes[3..], [-1.0, -1.0, -1.0]);
}

#[test]
fn var_fit_then_predict_round_trips_through_files() {
    let tmp = tempfile::tempdir().unwrap();
    let k3 = write_k3(tmp.path());
    // generate states on K3's normalized adjacency so the process is stable
    let g = Graph::new(
        3,
        vec![Edge::new(0, 1, 1.0), Edge::new(0, 2, 1.0), Edge::new(1, 2, 1.0)],
        false,
    )
    .unwrap();
    let s = Gso::from_graph(&g, GsoVariant::Adjacency).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    let mut x = Array2::<f64>::zeros((3, 60));
    for i in 0..3 {
        x[[i, 0]] = rng.random_range(-1.0..1.0);
    }
    for t in 1..60 {
        let prev = x.column(t - 1).to_owned();
        let shifted = s.matrix().dot(&prev);
        for i in 0..3 {
            x[[i, t]] = 0.4 * prev[i] + 0.2 * shifted[i];
        }
    }
    let signals = tmp.path().join("xs.csv");
    gspkit::io::write_signal_matrix(&signals, &x.view()).unwrap();

    let fit_dir = tmp.path().join("fit");
    assert_ok(&run(&[
        "var", "--mode", "fit-graph", "--signals", signals.to_str().unwrap(),
        "--graph", k3.to_str().unwrap(), "--p", "1", "--l", "1",
        "--out-dir", fit_dir.to_str().unwrap(), "--quiet",
    ]));
    let model: serde_json::Value =
        serde_json::from_str(&read(&fit_dir.join("model.json"))).unwrap();
    assert_eq!(model["mode"], "graph-var");
    let taps = model["taps"][0].as_array().unwrap();
    assert!((taps[0].as_f64().unwrap() - 0.4).abs() <= 1e-8);
    assert!((taps[1].as_f64().unwrap() - 0.2).abs() <= 1e-8);

    // predicting from the trajectory's tail reproduces the generator
    let hist = tmp.path().join("hist.csv");
    gspkit::io::write_signal_matrix(&hist, &x.slice(ndarray::s![.., 58..59])).unwrap();
    let predict_dir = tmp.path().join("predict");
    assert_ok(&run(&[
        "var", "--mode", "predict", "--model", fit_dir.join("model.json").to_str().unwrap(),
        "--graph", k3.to_str().unwrap(), "--history", hist.to_str().unwrap(),
        "--out-dir", predict_dir.to_str().unwrap(), "--quiet",
    ]));
    let predicted = column(&read(&predict_dir.join("prediction.csv")), 0);
    for (p, actual) in predicted.iter().zip(x.column(59).iter()) {
        assert!((p - actual).abs() <= 1e-8, "prediction {p} vs generator {actual}");
    }

    // the stored fingerprint guards against refitting on the wrong graph
    let other = tmp.path().join("path3.csv");
    gspkit::io::write_graph(
        &other,
        &Graph::new(3, vec![Edge::new(0, 1, 1.0), Edge::new(1, 2, 1.0)], false).unwrap(),
    )
    .unwrap();
    let wrong = run(&[
        "var", "--mode", "predict", "--model", fit_dir.join("model.json").to_str().unwrap(),
        "--graph", other.to_str().unwrap(), "--history", hist.to_str().unwrap(),
        "--out-dir", tmp.path().join("wrong").to_str().unwrap(), "--quiet",
    ]);
    assert_eq!(wrong.status.code(), Some(3), "fingerprint mismatch should be a data error");
}
