//! The analysis commands and their output writers. Every file written
//! here starts with (CSV) or contains (JSON) the tool version and the
//! canonical config hash, so results are traceable to their settings.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use serde_json::{json, Map, Value};
use vest_core::evaluate::select_embedding_dimension;
use vest_core::experiment::window_importance;
use vest_core::importance::{summary_group, transform_group};
use vest_core::pipeline::{fit_selection, generate_features, Method};
use vest_core::series::repeated_holdout;
use vest_core::summary::SummaryId;
use vest_core::synthetic::synthetic_corpus;
use vest_core::transform::{TransformContext, TransformId};
use vest_core::{embed, run_experiment, sample_size_study};

use crate::config::{sha256_hex, Resolved};
use crate::GenerateArgs;

const VERSION: &str = env!("CARGO_PKG_VERSION");

fn meta_line(hash: &str) -> String {
    format!("# vest {VERSION} config {hash}\n")
}

fn write_csv_file(path: &Path, hash: &str, body: &str) -> Result<()> {
    fs::write(path, format!("{}{body}", meta_line(hash)))
        .with_context(|| format!("writing {}", path.display()))
}

fn write_json_file(path: &Path, hash: &str, mut payload: Value) -> Result<()> {
    let obj = payload.as_object_mut().expect("payload is an object");
    obj.insert("tool_version".into(), json!(VERSION));
    obj.insert("config_hash".into(), json!(hash));
    let text = serde_json::to_string_pretty(&payload)?;
    fs::write(path, format!("{text}\n")).with_context(|| format!("writing {}", path.display()))
}

pub fn features(r: Resolved) -> Result<()> {
    let hash = r.config_hash();
    let corpus = r.load_corpus()?;
    fs::create_dir_all(&r.out)?;
    for series in &corpus {
        let window = &repeated_holdout(series.len(), 1, r.train_frac, r.test_frac)?[0];
        let p = select_embedding_dimension(series, window, r.p_min, r.p_max)?;
        let ds = embed(series, p)?;
        let ctx = TransformContext::fit(&series.values()[window.full_train()], series.frequency());
        let matrix = generate_features(&ds, &ctx)?;
        eprintln!(
            "[vest] {}: pre-selection matrix {} rows x {} columns (p = {p})",
            series.name(),
            matrix.n_rows(),
            matrix.n_cols()
        );
        let model = fit_selection(
            &matrix.slice_by_target(window.full_train()),
            &r.selection_config(),
        )?;

        let mut csv = Vec::new();
        matrix.write_csv(&mut csv)?;
        write_csv_file(
            &r.out.join(format!("features-{}.csv", series.name())),
            &hash,
            std::str::from_utf8(&csv)?,
        )?;
        let model_value: Value = serde_json::from_str(&model.to_json())?;
        write_json_file(
            &r.out.join(format!("selection-{}.json", series.name())),
            &hash,
            json!({
                "series": series.name(),
                "dimension": p,
                "kept": model.kept_columns.len(),
                "dropped": model.drop_log.len(),
                "model": model_value,
            }),
        )?;
    }
    Ok(())
}

pub fn experiment(r: Resolved) -> Result<()> {
    let hash = r.config_hash();
    let corpus = r.load_corpus()?;
    let report = run_experiment(&corpus, &r.experiment_config())?;
    fs::create_dir_all(&r.out)?;

    let mut csv = Vec::new();
    report.write_csv(&mut csv)?;
    write_csv_file(&r.out.join("mase.csv"), &hash, std::str::from_utf8(&csv)?)?;

    let mut mean_mase = Map::new();
    for &m in &report.methods {
        mean_mase.insert(m.id().into(), json!(report.overall_mean_mase(m)));
    }
    let ranks: Vec<Value> = report
        .average_ranks()?
        .into_iter()
        .map(|(m, mean, sd)| json!({ "method": m.id(), "mean": mean, "sd": sd }))
        .collect();
    let mut payload = json!({
        "methods": report.methods.iter().map(|m| m.id()).collect::<Vec<_>>(),
        "series": report.series_names,
        "repetitions": r.repetitions,
        "mean_mase": Value::Object(mean_mase),
        "average_rank": ranks,
    });

    if report.methods.contains(&Method::Ar) && report.methods.len() > 1 {
        let rope = (-2.5, 2.5);
        let mut pct = Map::new();
        for (m, diffs) in report.percentage_differences(Method::Ar)? {
            let mean = diffs.iter().sum::<f64>() / diffs.len() as f64;
            pct.insert(m.id().into(), json!(mean));
        }
        let mut bayes = Map::new();
        for (m, b) in report.bayes_comparisons(Method::Ar, rope, 100_000, r.seed)? {
            bayes.insert(
                m.id().into(),
                json!({ "p_left": b.p_left, "p_rope": b.p_rope, "p_right": b.p_right }),
            );
        }
        let obj = payload.as_object_mut().expect("object");
        obj.insert("benchmark".into(), json!("AR"));
        obj.insert("rope_percent".into(), json!([rope.0, rope.1]));
        obj.insert("mean_percentage_difference".into(), Value::Object(pct));
        obj.insert("bayes_vs_benchmark".into(), Value::Object(bayes));
    }
    write_json_file(&r.out.join("report.json"), &hash, payload)?;
    eprintln!(
        "[vest] experiment: {} series, {} methods, {} repetitions -> {}",
        corpus.len(),
        report.methods.len(),
        r.repetitions,
        r.out.display()
    );
    Ok(())
}

/// Pooled per-feature totals: (score sum, rank sum, sample count).
type Pool = BTreeMap<String, (f64, f64, usize)>;

fn pool_csv<'a>(
    pool: impl Iterator<Item = (&'a str, &'a (f64, f64, usize))>,
    label: &str,
) -> String {
    let mut rows: Vec<(String, f64, f64, usize)> = pool
        .map(|(name, &(score, rank, n))| (name.to_string(), score / n as f64, rank / n as f64, n))
        .collect();
    rows.sort_by(|a, b| a.2.partial_cmp(&b.2).unwrap().then_with(|| a.0.cmp(&b.0)));
    let mut out = format!("{label},mean_score,mean_rank,count\n");
    for (name, score, rank, n) in rows {
        out.push_str(&format!("{name},{score},{rank},{n}\n"));
    }
    out
}

pub fn importance(r: Resolved) -> Result<()> {
    let hash = r.config_hash();
    let corpus = r.load_corpus()?;
    let cfg = r.experiment_config();
    let mut features: Pool = BTreeMap::new();
    for (i, series) in corpus.iter().enumerate() {
        let window = &repeated_holdout(series.len(), 1, r.train_frac, r.test_frac)?[0];
        let report = window_importance(series, window, &cfg, r.seed.wrapping_add(i as u64))?;
        for ((name, score), rank) in report.names.iter().zip(&report.scores).zip(&report.ranks) {
            let e = features.entry(name.clone()).or_insert((0.0, 0.0, 0));
            e.0 += score;
            e.1 += rank;
            e.2 += 1;
        }
    }

    // group pools keyed by representation and by summary, in catalog order
    let mut by_transform: Pool = BTreeMap::new();
    let mut by_summary: Pool = BTreeMap::new();
    for (name, &(score, rank, n)) in &features {
        let t = by_transform
            .entry(transform_group(name).to_string())
            .or_insert((0.0, 0.0, 0));
        t.0 += score;
        t.1 += rank;
        t.2 += n;
        if let Some(s) = summary_group(name) {
            let e = by_summary.entry(s.to_string()).or_insert((0.0, 0.0, 0));
            e.0 += score;
            e.1 += rank;
            e.2 += n;
        }
    }
    let transform_order: Vec<String> = TransformId::ALL
        .iter()
        .map(|t| t.id().to_string())
        .chain(std::iter::once("LAG".to_string()))
        .collect();
    let ordered_transforms = transform_order
        .iter()
        .filter_map(|g| by_transform.get_key_value(g.as_str()))
        .map(|(k, v)| (k.as_str(), v));
    let ordered_summaries = SummaryId::ALL
        .iter()
        .filter_map(|s| by_summary.get_key_value(s.id()))
        .map(|(k, v)| (k.as_str(), v));

    fs::create_dir_all(&r.out)?;
    write_csv_file(
        &r.out.join("importance.csv"),
        &hash,
        &pool_csv(features.iter().map(|(k, v)| (k.as_str(), v)), "feature"),
    )?;
    write_csv_file(
        &r.out.join("importance_by_transform.csv"),
        &hash,
        &pool_csv(ordered_transforms, "representation"),
    )?;
    write_csv_file(
        &r.out.join("importance_by_summary.csv"),
        &hash,
        &pool_csv(ordered_summaries, "summary"),
    )?;
    eprintln!(
        "[vest] importance: {} features pooled over {} series -> {}",
        features.len(),
        corpus.len(),
        r.out.display()
    );
    Ok(())
}

pub fn sample_size(r: Resolved) -> Result<()> {
    let hash = r.config_hash();
    let corpus = r.load_corpus()?;
    let study = sample_size_study(&corpus, &r.sizes, &r.experiment_config())?;
    for name in &study.excluded_series {
        eprintln!("[vest] sample-size: excluded {name}: shorter than the largest grid size");
    }
    fs::create_dir_all(&r.out)?;
    let mut csv = Vec::new();
    study.write_csv(&mut csv)?;
    write_csv_file(&r.out.join("ranks.csv"), &hash, std::str::from_utf8(&csv)?)?;
    write_json_file(
        &r.out.join("study.json"),
        &hash,
        json!({
            "sizes": study.sizes,
            "methods": study.methods.iter().map(|m| m.id()).collect::<Vec<_>>(),
            "excluded_series": study.excluded_series,
        }),
    )?;
    eprintln!(
        "[vest] sample-size: {} sizes, {} methods -> {}",
        study.sizes.len(),
        study.methods.len(),
        r.out.display()
    );
    Ok(())
}

pub fn generate(args: &GenerateArgs) -> Result<()> {
    let canonical = format!(
        "command=generate\nlength={}\nseed={}\nseries={}\n",
        args.length, args.seed, args.series
    );
    let hash = sha256_hex(&canonical);
    let corpus = synthetic_corpus(args.series, args.length, args.seed);
    fs::create_dir_all(&args.out)?;
    for series in &corpus {
        let mut body = String::with_capacity(series.len() * 20);
        for v in series.values() {
            body.push_str(&format!("{v}\n"));
        }
        write_csv_file(
            &args.out.join(format!("{}.csv", series.name())),
            &hash,
            &body,
        )?;
    }
    eprintln!(
        "[vest] generate: wrote {} series of length {} to {}",
        corpus.len(),
        args.length,
        args.out.display()
    );
    Ok(())
}
