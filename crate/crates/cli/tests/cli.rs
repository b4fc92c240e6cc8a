use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};
use tempfile::TempDir;

const SYSTEMS: [&str; 5] = ["R1", "E1", "A1", "A2", "A3"];
const TOPICS: [&str; 6] = ["rockets", "gardening", "jazz", "chess", "baking", "sailing"];

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_podassess"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn podassess")
}

fn ok(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "podassess {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn fails(args: &[&str]) -> String {
    let out = run(args);
    assert!(!out.status.success(), "podassess {args:?} unexpectedly succeeded");
    String::from_utf8(out.stderr).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn transcript(i: usize) -> String {
    let t = TOPICS[i];
    format!(
        "Episode {i} opens with a long story about {t} and why the host loves {t}. \
         A guest explains the history of {t} in detail for listeners. Bye."
    )
}

fn excerpt(i: usize) -> String {
    let t = TOPICS[i];
    format!(
        "Episode {i} opens with a long story about {t} and why the host loves {t}. \
         A guest explains the history of {t} in detail for listeners."
    )
}

fn description(i: usize) -> String {
    format!("A friendly chat on {} with a guest expert.", TOPICS[i])
}

fn summary(i: usize, system: &str) -> (String, &'static str) {
    let t = TOPICS[i];
    match system {
        "R1" => (description(i), "G"),
        "E1" => (excerpt(i), if i.is_multiple_of(2) { "F" } else { "B" }),
        "A1" => (description(i), "E"),
        "A2" => (
            format!("The host and a guest chat about {t}."),
            if i.is_multiple_of(2) { "G" } else { "F" },
        ),
        _ => (format!("Talk show number {i}."), "B"),
    }
}

/// Six episodes by five systems: R1 is the reference, E1 an extractive
/// excerpt of the transcript, A1 a verbatim copy of the reference.
fn fixture_corpus(dir: &Path) {
    let mut episodes = String::new();
    let mut records = String::new();
    for i in 0..TOPICS.len() {
        let ep = json!({
            "episode_id": format!("ep{i}"),
            "transcript": transcript(i),
            "creator_description": description(i),
        });
        episodes.push_str(&format!("{ep}\n"));
    }
    for sys in SYSTEMS {
        for i in 0..TOPICS.len() {
            let (text, grade) = summary(i, sys);
            let rec = json!({
                "episode_id": format!("ep{i}"),
                "system_id": sys,
                "summary_text": text,
                "grade": grade,
            });
            records.push_str(&format!("{rec}\n"));
        }
    }
    fs::create_dir_all(dir).unwrap();
    fs::write(dir.join("episodes.jsonl"), episodes).unwrap();
    fs::write(dir.join("records.jsonl"), records).unwrap();
}

struct Env {
    tmp: TempDir,
    corpus: PathBuf,
}

impl Env {
    fn new() -> Env {
        let tmp = TempDir::new().unwrap();
        let corpus = tmp.path().join("corpus");
        fixture_corpus(&corpus);
        Env { tmp, corpus }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.tmp.path().join(name)
    }

    fn metric(&self, metric: &str) -> PathBuf {
        let out = self.path(&format!("{metric}.jsonl"));
        ok(&[
            "metric",
            "--corpus",
            p(&self.corpus),
            "--metric",
            metric,
            "--out",
            p(&out),
        ]);
        out
    }
}

fn jsonl(path: &Path) -> Vec<Value> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}

fn scores_of(rows: &[Value], system: &str) -> Vec<f64> {
    rows.iter()
        .filter(|r| r["system_id"] == system)
        .map(|r| r["score"].as_f64().unwrap())
        .collect()
}

fn write_scores(path: &Path, scorer: &str, scores: &[(&str, &str, f64)]) {
    let body: String = scores
        .iter()
        .map(|(e, s, v)| {
            format!(
                "{}\n",
                json!({"episode_id": e, "system_id": s, "scorer_id": scorer, "score": v})
            )
        })
        .collect();
    fs::write(path, body).unwrap();
}

#[test]
fn reference_copy_scores_one_and_reference_is_excluded() {
    let env = Env::new();
    let rows = jsonl(&env.metric("rouge_l_ref"));
    assert_eq!(rows.len(), 4 * TOPICS.len());
    assert!(scores_of(&rows, "R1").is_empty());
    let copy = scores_of(&rows, "A1");
    assert_eq!(copy, vec![1.0; TOPICS.len()]);
    assert!(rows.iter().all(|r| r["scorer_id"] == "rouge_l_ref"));
}

#[test]
fn include_reference_scores_reference_row() {
    let env = Env::new();
    let out = env.path("with_ref.jsonl");
    ok(&[
        "metric",
        "--corpus",
        p(&env.corpus),
        "--metric",
        "rouge_l_ref",
        "--include-reference",
        "--out",
        p(&out),
    ]);
    assert_eq!(scores_of(&jsonl(&out), "R1"), vec![1.0; TOPICS.len()]);
}

#[test]
fn document_overlap_favours_extractive_excerpts() {
    let env = Env::new();
    let rows = jsonl(&env.metric("rouge_l_doc"));
    assert_eq!(rows.len(), SYSTEMS.len() * TOPICS.len());
    let extractive = scores_of(&rows, "E1");
    assert!(extractive.iter().all(|&v| v > 0.9), "{extractive:?}");
    for sys in ["A1", "A2", "A3"] {
        for (a, e) in scores_of(&rows, sys).iter().zip(&extractive) {
            assert!(a < e);
        }
    }
}

#[test]
fn rouge_n_scorer_id_carries_order() {
    let env = Env::new();
    let rows = jsonl(&env.metric("rouge_n_ref"));
    assert!(rows.iter().all(|r| r["scorer_id"] == "rouge_2_ref"));
}

#[test]
fn triple_metric_requires_triples_file() {
    let env = Env::new();
    let out = env.path("t.jsonl");
    let err = fails(&[
        "metric",
        "--corpus",
        p(&env.corpus),
        "--metric",
        "triple_f1_ref",
        "--out",
        p(&out),
    ]);
    assert!(err.contains("--triples"), "{err}");
    assert!(!out.exists());
    let missing = env.path("no_triples.jsonl");
    fails(&[
        "metric",
        "--corpus",
        p(&env.corpus),
        "--metric",
        "triple_f1_ref",
        "--triples",
        p(&missing),
        "--out",
        p(&out),
    ]);
    assert!(!out.exists());
}

#[test]
fn triple_metric_scores_from_triple_file() {
    let env = Env::new();
    let triples = env.path("triples.jsonl");
    let mut body = String::new();
    for (i, t) in TOPICS.iter().enumerate() {
        let ep = format!("ep{i}");
        body.push_str(&format!(
            "{}\n",
            json!({"episode_id": ep, "subject": "guest", "relation": "discusses", "object": t, "source": "reference"})
        ));
        for sys in ["E1", "A1", "A2", "A3"] {
            let object = if sys == "A3" { "weather" } else { t };
            body.push_str(&format!(
                "{}\n",
                json!({"episode_id": ep, "system_id": sys, "subject": "guest", "relation": "discusses", "object": object, "source": "summary"})
            ));
        }
    }
    fs::write(&triples, body).unwrap();
    let out = env.path("triple.jsonl");
    ok(&[
        "metric",
        "--corpus",
        p(&env.corpus),
        "--metric",
        "triple_f1_ref",
        "--triples",
        p(&triples),
        "--out",
        p(&out),
    ]);
    let rows = jsonl(&out);
    assert_eq!(scores_of(&rows, "A1"), vec![1.0; TOPICS.len()]);
    assert_eq!(scores_of(&rows, "A3"), vec![0.0; TOPICS.len()]);
}

#[test]
fn self_correlation_is_one_at_every_level() {
    let env = Env::new();
    let scores = env.metric("rouge_l_ref");
    let reports = env.path("self.jsonl");
    ok(&[
        "correlate",
        "--corpus",
        p(&env.corpus),
        "--x",
        p(&scores),
        "--y",
        p(&scores),
        "--levels",
        "system,summary,all_examples",
        "--out",
        p(&reports),
    ]);
    let rows = jsonl(&reports);
    assert_eq!(rows.len(), 3);
    for r in &rows {
        let v = r["value"].as_f64().unwrap();
        assert!((v - 1.0).abs() < 1e-12, "{r}");
    }
}

#[test]
fn correlate_against_human_with_inc_exc() {
    let env = Env::new();
    let scores = env.metric("rouge_l_ref");
    let reports = env.path("human.jsonl");
    let table = ok(&[
        "correlate",
        "--corpus",
        p(&env.corpus),
        "--x",
        p(&scores),
        "--inc-exc",
        "--out",
        p(&reports),
    ]);
    let rows = jsonl(&reports);
    assert_eq!(rows.len(), 4);
    let labels: Vec<&str> = rows.iter().map(|r| r["system_filter"].as_str().unwrap()).collect();
    assert_eq!(labels, ["inc", "inc", "exc", "exc"]);
    assert!(rows.iter().all(|r| r["metric"] == "rouge_l_ref"));
    assert_eq!(rows[0]["n_used"], 4);
    assert_eq!(rows[2]["n_used"], 3);
    assert!(
        table.starts_with("| Method | System-level Inc. | System-level Exc. |"),
        "{table}"
    );
}

#[test]
fn correlation_with_constant_scores_is_reported_undefined() {
    let env = Env::new();
    let flat = env.path("flat.jsonl");
    let rows: Vec<(String, &str)> = (0..TOPICS.len())
        .flat_map(|i| ["E1", "A1", "A2", "A3"].map(|s| (format!("ep{i}"), s)))
        .collect();
    let scores: Vec<(&str, &str, f64)> = rows.iter().map(|(e, s)| (e.as_str(), *s, 0.5)).collect();
    write_scores(&flat, "flat", &scores);
    let reports = env.path("undef.jsonl");
    ok(&[
        "correlate",
        "--corpus",
        p(&env.corpus),
        "--x",
        p(&flat),
        "--out",
        p(&reports),
    ]);
    for r in jsonl(&reports) {
        assert!(r["value"].is_null());
        assert!(r["note"].is_string());
    }
}

#[test]
fn correlate_rejects_misaligned_scores() {
    let env = Env::new();
    let partial = env.path("partial.jsonl");
    write_scores(&partial, "p", &[("ep0", "A1", 0.1), ("ep0", "A2", 0.2)]);
    let err = fails(&["correlate", "--corpus", p(&env.corpus), "--x", p(&partial)]);
    assert!(err.contains("missing") || err.contains("incomplete"), "{err}");
}

#[test]
fn unknown_filter_system_fails() {
    let env = Env::new();
    let scores = env.metric("rouge_l_ref");
    let err = fails(&[
        "correlate",
        "--corpus",
        p(&env.corpus),
        "--x",
        p(&scores),
        "--filter-systems",
        "Z9",
    ]);
    assert!(err.contains("Z9"), "{err}");
}

#[test]
fn reruns_are_byte_identical() {
    let env = Env::new();
    let a = env.metric("rouge_l_ref");
    let first = fs::read(&a).unwrap();
    let b = env.metric("rouge_l_ref");
    assert_eq!(first, fs::read(&b).unwrap());

    let reports = |name: &str| {
        let out = env.path(name);
        ok(&[
            "correlate",
            "--corpus",
            p(&env.corpus),
            "--x",
            p(&a),
            "--inc-exc",
            "--out",
            p(&out),
        ]);
        fs::read(out).unwrap()
    };
    assert_eq!(reports("r1.jsonl"), reports("r2.jsonl"));
}

#[test]
fn kfold_plans_are_deterministic_per_repeat() {
    let env = Env::new();
    let plan_dir = |name: &str| {
        let dir = env.path(name);
        ok(&[
            "splits",
            "--corpus",
            p(&env.corpus),
            "--protocol",
            "all-shuffled",
            "--k",
            "5",
            "--repeats",
            "5",
            "--seed",
            "7",
            "--out",
            p(&dir),
        ]);
        dir
    };
    let (a, b) = (plan_dir("plans_a"), plan_dir("plans_b"));
    let mut names: Vec<String> = fs::read_dir(&a)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert_eq!(
        names,
        [
            "kfold_seed10.json",
            "kfold_seed11.json",
            "kfold_seed7.json",
            "kfold_seed8.json",
            "kfold_seed9.json"
        ]
    );
    for n in &names {
        assert_eq!(fs::read(a.join(n)).unwrap(), fs::read(b.join(n)).unwrap());
    }
    let plan: Value = serde_json::from_slice(&fs::read(a.join("kfold_seed7.json")).unwrap()).unwrap();
    assert_eq!(plan["protocol"], "all_shuffled_kfold");
    assert_eq!(plan["folds"].as_array().unwrap().len(), 5);
}

#[test]
fn holdout_plans() {
    let env = Env::new();
    let dir = env.path("holdout");
    ok(&[
        "splits",
        "--corpus",
        p(&env.corpus),
        "--protocol",
        "holdout-system",
        "--system",
        "A2",
        "--out",
        p(&dir),
    ]);
    let plan: Value = serde_json::from_slice(&fs::read(dir.join("holdout_system_A2_seed0.json")).unwrap()).unwrap();
    let folds = plan["folds"].as_array().unwrap();
    assert_eq!(folds.len(), 1);
    let test = folds[0]["test"].as_array().unwrap();
    assert_eq!(test.len(), TOPICS.len());
    assert!(test.iter().all(|k| k["system_id"] == "A2"));
    for part in ["train", "valid"] {
        assert!(folds[0][part]
            .as_array()
            .unwrap()
            .iter()
            .all(|k| k["system_id"] != "A2"));
    }

    ok(&[
        "splits",
        "--corpus",
        p(&env.corpus),
        "--protocol",
        "holdout-document",
        "--episodes",
        "ep1,ep4",
        "--out",
        p(&dir),
    ]);
    let plan: Value = serde_json::from_slice(&fs::read(dir.join("holdout_document_seed0.json")).unwrap()).unwrap();
    let fold = &plan["folds"][0];
    assert!(fold["test"]
        .as_array()
        .unwrap()
        .iter()
        .all(|k| k["episode_id"] == "ep1" || k["episode_id"] == "ep4"));
    for part in ["train", "valid"] {
        assert!(fold[part]
            .as_array()
            .unwrap()
            .iter()
            .all(|k| k["episode_id"] != "ep1" && k["episode_id"] != "ep4"));
    }

    let err = fails(&[
        "splits",
        "--corpus",
        p(&env.corpus),
        "--protocol",
        "holdout-system",
        "--system",
        "Q1",
        "--out",
        p(&dir),
    ]);
    assert!(err.contains("Q1"), "{err}");
}

fn description_scores(env: &Env, n: usize) -> PathBuf {
    let path = env.path("desc_scores.jsonl");
    let ids: Vec<String> = (0..n).map(|i| format!("d{i:02}")).collect();
    let rows: Vec<(&str, &str, f64)> = ids
        .iter()
        .enumerate()
        .map(|(i, e)| (e.as_str(), "description", ((i * 7) % n) as f64 / n as f64))
        .collect();
    write_scores(&path, "cnn", &rows);
    path
}

#[test]
fn select_full_size_returns_score_order() {
    let env = Env::new();
    let scores = description_scores(&env, 10);
    let out = env.path("sel.jsonl");
    ok(&[
        "select",
        "--scores",
        p(&scores),
        "--k",
        "10",
        "--mode",
        "top",
        "--out",
        p(&out),
    ]);
    let rows = jsonl(&out);
    assert_eq!(rows.len(), 10);
    let values: Vec<f64> = rows.iter().map(|r| r["score"].as_f64().unwrap()).collect();
    assert!(values.windows(2).all(|w| w[0] >= w[1]));
    assert_eq!(rows[0]["rank"], 1);

    let bottom = env.path("bottom.jsonl");
    ok(&[
        "select",
        "--scores",
        p(&scores),
        "--k",
        "3",
        "--mode",
        "bottom",
        "--out",
        p(&bottom),
    ]);
    let low: Vec<f64> = jsonl(&bottom).iter().map(|r| r["score"].as_f64().unwrap()).collect();
    assert_eq!(low, vec![0.0, 0.1, 0.2]);

    fails(&[
        "select",
        "--scores",
        p(&scores),
        "--k",
        "11",
        "--out",
        p(&env.path("x.jsonl")),
    ]);
}

#[test]
fn brass_filter_drops_short_descriptions_with_reason() {
    let env = Env::new();
    let scores = description_scores(&env, 4);
    let brass = env.path("brass.jsonl");
    let long_a = "A weekly show about the history of jazz records and the people who made them.";
    let long_b = "Interviews with chess grandmasters about their favourite openings and endgames.";
    let rows = [
        json!({"episode_id": "d00", "description": "Ten chars.", "show_description": "A show."}),
        json!({"episode_id": "d01", "description": long_a, "show_description": long_a}),
        json!({"episode_id": "d02", "description": long_b, "siblings": [long_b]}),
        json!({"episode_id": "d03", "description": long_a, "show_description": long_b}),
    ];
    assert_eq!("Ten chars.".chars().count(), 10);
    fs::write(&brass, rows.iter().map(|r| format!("{r}\n")).collect::<String>()).unwrap();
    let out = env.path("brass_sel.jsonl");
    ok(&["select", "--scores", p(&scores), "--brass", p(&brass), "--out", p(&out)]);

    let decisions = jsonl(&env.path("brass_sel.jsonl.filter.jsonl"));
    let reason = |ep: &str| {
        let d = decisions.iter().find(|d| d["episode_id"] == ep).unwrap();
        (d["keep"].as_bool().unwrap(), d["reason"].as_str().map(String::from))
    };
    assert_eq!(reason("d00"), (false, Some("too short".into())));
    assert_eq!(reason("d01"), (false, Some("similar to show".into())));
    assert_eq!(reason("d02"), (false, Some("similar to other".into())));
    assert_eq!(reason("d03"), (true, None));

    let kept = jsonl(&out);
    assert_eq!(kept.len(), 1);
    assert_eq!(kept[0]["episode_id"], "d03");
}

#[test]
fn ensemble_of_identical_members_has_zero_std() {
    let env = Env::new();
    let member = env.metric("rouge_l_ref");
    let copy = env.path("copy.jsonl");
    fs::copy(&member, &copy).unwrap();
    let out = env.path("ens.jsonl");
    let bins = env.path("bins.json");
    ok(&[
        "ensemble",
        "--corpus",
        p(&env.corpus),
        "--members",
        p(&member),
        p(&copy),
        "--targets",
        "human",
        "--bins",
        "2",
        "--bins-out",
        p(&bins),
        "--out",
        p(&out),
    ]);
    let rows = jsonl(&out);
    let stds: Vec<&Value> = rows.iter().filter(|r| r["scorer_id"] == "ensemble_std").collect();
    assert_eq!(stds.len(), 4 * TOPICS.len());
    assert!(stds.iter().all(|r| r["score"] == 0.0));
    let binned: Value = serde_json::from_slice(&fs::read(&bins).unwrap()).unwrap();
    assert_eq!(binned.as_array().unwrap().len(), 1);
}

#[test]
fn report_tables_and_plot_data() {
    let env = Env::new();
    let scores = env.metric("rouge_l_ref");
    let reports = env.path("rep.jsonl");
    ok(&[
        "correlate",
        "--corpus",
        p(&env.corpus),
        "--x",
        p(&scores),
        "--inc-exc",
        "--out",
        p(&reports),
    ]);
    let csv = env.path("rep.csv");
    let table = ok(&["report", "--reports", p(&reports), "--csv", p(&csv)]);
    assert!(table.contains("| rouge_l_ref |"), "{table}");
    let csv_text = fs::read_to_string(&csv).unwrap();
    assert_eq!(csv_text.lines().count(), 5);

    let scatter = env.path("scatter.csv");
    ok(&[
        "report",
        "--corpus",
        p(&env.corpus),
        "--scatter",
        p(&scores),
        "--scatter-out",
        p(&scatter),
    ]);
    let lines: Vec<String> = fs::read_to_string(&scatter)
        .unwrap()
        .lines()
        .map(String::from)
        .collect();
    assert_eq!(lines[0], "system_id,kind,metric_mean,human_mean");
    assert_eq!(lines.len(), 5);
    assert!(lines.iter().any(|l| l.starts_with("A1,abstractive,1,3")), "{lines:?}");
}

#[test]
fn cumulative_density_over_four_files() {
    let env = Env::new();
    let mut files = Vec::new();
    for i in 0..4 {
        let path = env.path(&format!("s{i}.jsonl"));
        write_scores(
            &path,
            "m",
            &[("a", "x", 3.0 - i as f64), ("b", "x", 1.5), ("c", "x", 0.25 * i as f64)],
        );
        files.push(path);
    }
    let out = env.path("cdf.csv");
    let mut args = vec!["report", "--cdf"];
    args.extend(files.iter().map(|f| p(f)));
    args.extend(["--cdf-out", p(&out)]);
    ok(&args);
    let text = fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "s0,s1,s2,s3");
    assert_eq!(lines.len(), 4);
    for col in 0..4 {
        let values: Vec<f64> = lines[1..]
            .iter()
            .map(|l| l.split(',').nth(col).unwrap().parse().unwrap())
            .collect();
        assert!(values.windows(2).all(|w| w[0] <= w[1]));
    }
}

#[test]
fn empty_report_list_fails() {
    fails(&["report"]);
    let tmp = TempDir::new().unwrap();
    let empty = tmp.path().join("empty.jsonl");
    fs::write(&empty, "").unwrap();
    fails(&["report", "--reports", p(&empty)]);
}

#[test]
fn stats_reports_lengths_and_grades() {
    let env = Env::new();
    let text = ok(&["stats", "--corpus", p(&env.corpus)]);
    let v: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["n_episodes"], 6);
    assert_eq!(v["n_systems"], 5);
    assert_eq!(v["n_records"], 30);
    assert_eq!(v["grades_reference"]["good"], 6);
    assert_eq!(v["grades_reference"]["fractions"]["G"], 1.0);
    assert_eq!(v["grades_all"]["total"], 30);
    assert!(v["lengths"]["transcript_words"]["mean"].as_f64().unwrap() > 20.0);
}

#[test]
fn missing_corpus_fails_without_output() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("scores.jsonl");
    let err = fails(&[
        "metric",
        "--corpus",
        p(&tmp.path().join("nowhere")),
        "--metric",
        "rouge_l_ref",
        "--out",
        p(&out),
    ]);
    assert!(err.starts_with("error:"), "{err}");
    assert!(!out.exists());
    assert_eq!(fs::read_dir(tmp.path()).unwrap().count(), 0);
}

#[test]
fn strict_mode_rejects_incomplete_grid() {
    let env = Env::new();
    let records = env.corpus.join("records.jsonl");
    let text = fs::read_to_string(&records).unwrap();
    let trimmed: String = text.lines().skip(1).map(|l| format!("{l}\n")).collect();
    fs::write(&records, trimmed).unwrap();
    ok(&["stats", "--corpus", p(&env.corpus)]);
    let err = fails(&["stats", "--corpus", p(&env.corpus), "--strict"]);
    assert!(err.contains("missing"), "{err}");
}

#[test]
fn import_released_layout() {
    let tmp = TempDir::new().unwrap();
    let released = tmp.path().join("released.jsonl");
    let mut body = String::new();
    for i in 0..2 {
        for (sys, summary, grade) in [("R1", description(i), "G"), ("A1", "Some summary.".to_string(), "B")] {
            body.push_str(&format!(
                "{}\n",
                json!({
                    "episode_id": format!("ep{i}"),
                    "system_id": sys,
                    "transcript": transcript(i),
                    "summary": summary,
                    "score": grade,
                    "attributes": [1, 0, 1, 0, 1, 0, 1, 0],
                })
            ));
        }
    }
    fs::write(&released, body).unwrap();
    let dir = tmp.path().join("imported");
    ok(&["import", "--released", p(&released), "--out", p(&dir)]);
    let text = ok(&["stats", "--corpus", p(&dir), "--strict"]);
    let v: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["n_records"], 4);
    let episodes = jsonl(&dir.join("episodes.jsonl"));
    assert_eq!(episodes[0]["creator_description"], description(0));
}
