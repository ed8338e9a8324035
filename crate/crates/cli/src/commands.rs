//! Subcommand bodies. Each writes its human-readable output to `out`.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use ddrank_core::data::toy::{prototype_images, toy_dataset, ToyConfig};
use ddrank_core::data::{
    generate_noise_set, load_artifact, load_dataset, save_artifact, save_dataset,
    select_random_subset,
};
use ddrank_core::metrics::{compute_ars, sweep_weights, to_percent, MetricResult};
use ddrank_core::orchestrator::{
    ars_accuracies, lrs_accuracies, rank_methods, self_comparison, BaselineCache, LeaderboardEntry,
    RankKey,
};
use ddrank_core::train::{AccuracyMode, LrSchedule, OptimizerSpec};
use ddrank_core::{
    AgentModelSpec, AugChain, Dataset, DistilledArtifact, EvalConfig, EvalPlan, Evaluator,
    LabelMode, LabelPayload, LossKind, MetricWeights, RunLog, RunRecord,
};

use crate::error::CliError;
use crate::manifest::RunManifest;
use crate::render::{
    render_grid, render_leaderboard, robustness_grid, sweep_grid, BoardRow, Format, SweepRow,
};

fn emit(out: &mut dyn Write, text: &str) -> Result<(), CliError> {
    out.write_all(text.as_bytes())
        .map_err(|e| CliError::io("<stdout>", e))
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

fn file_stem(s: &str) -> String {
    s.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '-' || c == '.' {
                c
            } else {
                '_'
            }
        })
        .collect()
}

fn open_cache(m: &RunManifest) -> Result<Arc<BaselineCache>, CliError> {
    Ok(Arc::new(match &m.cache_dir {
        Some(d) => BaselineCache::at_dir(d)?,
        None => BaselineCache::in_memory(),
    }))
}

fn model_specs(m: &RunManifest, d: &Dataset) -> Result<Vec<AgentModelSpec>, CliError> {
    m.models
        .iter()
        .map(|id| Ok(AgentModelSpec::from_id(id, d.item_shape(), d.classes())?))
        .collect()
}

fn plan_for(m: &RunManifest, artifact: &DistilledArtifact) -> EvalPlan {
    EvalPlan {
        seeds: m.seeds.clone(),
        lr_grid: m.lr_grid.clone(),
        jobs: m.jobs,
        ..EvalPlan::for_artifact(artifact)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalKind {
    Lrs,
    Ars,
}

/// Runs `eval-lrs` or `eval-ars` for every artifact × model in the manifest.
pub fn eval(
    m: &RunManifest,
    kind: EvalKind,
    format: Format,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let dataset = load_dataset(&m.dataset)?;
    let specs = model_specs(m, &dataset)?;
    let cache = open_cache(m)?;
    let log = Arc::new(RunLog::open(m.runs_path()));
    let mut by_model: BTreeMap<(String, usize), Vec<LeaderboardEntry>> = BTreeMap::new();
    for path in &m.artifacts {
        let artifact = load_artifact(path)?;
        let ev =
            Evaluator::new(&dataset, plan_for(m, &artifact), cache.clone())?.with_log(log.clone());
        for spec in &specs {
            let name = format!(
                "{}-{}-ipc{}",
                file_stem(&artifact.method_id),
                file_stem(&spec.id()),
                artifact.ipc
            );
            let entry = match kind {
                EvalKind::Lrs => {
                    let r = ev.eval_lrs(&artifact, spec, m.weights)?;
                    let json = serde_json::to_string_pretty(&r).expect("report serializes");
                    write_file(
                        &m.output_dir
                            .join("reports")
                            .join(format!("lrs-{name}.json")),
                        &json,
                    )?;
                    LeaderboardEntry::from_reports(Some(&r), None)?
                }
                EvalKind::Ars => {
                    let r = ev.eval_ars(&artifact, spec, m.weights)?;
                    let json = serde_json::to_string_pretty(&r).expect("report serializes");
                    write_file(
                        &m.output_dir
                            .join("reports")
                            .join(format!("ars-{name}.json")),
                        &json,
                    )?;
                    LeaderboardEntry::from_reports(None, Some(&r))?
                }
            };
            by_model
                .entry((spec.id(), artifact.ipc))
                .or_default()
                .push(entry);
        }
    }
    let key = match kind {
        EvalKind::Lrs => RankKey::Lrs,
        EvalKind::Ars => RankKey::Ars,
    };
    let mut rows = Vec::new();
    for ((model, _), entries) in &by_model {
        rows.extend(
            rank_methods(entries, key)?
                .iter()
                .map(|r| BoardRow::from_ranked(r, model)),
        );
    }
    emit(out, &render_leaderboard(&rows, format)?)
}

/// Records of one (dataset, model, ipc, method) cell.
type Groups<'a> = BTreeMap<(String, String, usize), BTreeMap<String, Vec<&'a RunRecord>>>;

fn group_records(records: &[RunRecord]) -> Groups<'_> {
    let mut g: Groups<'_> = BTreeMap::new();
    for r in records {
        g.entry((r.dataset_id.clone(), r.model_id.clone(), r.ipc))
            .or_default()
            .entry(r.method_id.clone())
            .or_default()
            .push(r);
    }
    g
}

fn load_records(m: &RunManifest) -> Result<Vec<RunRecord>, CliError> {
    let path = m.runs_path();
    if !path.exists() {
        return Ok(Vec::new());
    }
    Ok(RunLog::open(path).records()?)
}

/// Scores one method's records; `None` when neither metric has a full set of seeds.
fn entry_from_records(
    dataset: &str,
    ipc: usize,
    method: &str,
    recs: &[&RunRecord],
    seeds: &[u64],
    w: MetricWeights,
) -> Result<Option<LeaderboardEntry>, CliError> {
    let owned: Vec<RunRecord> = recs.iter().map(|r| (*r).clone()).collect();
    let lrs = lrs_accuracies(&owned, seeds)
        .ok()
        .map(|acc| MetricResult::compute(&acc, None, w))
        .transpose()?;
    let quad = ars_accuracies(&owned, seeds).ok();
    let ars = quad.as_ref().map(|q| compute_ars(q, w.gamma)).transpose()?;
    if lrs.is_none() && ars.is_none() {
        return Ok(None);
    }
    Ok(Some(LeaderboardEntry {
        method_id: method.to_string(),
        dataset_id: dataset.to_string(),
        ipc,
        weights: w,
        hlr: lrs.map(|l| l.hlr),
        ior: lrs.map(|l| l.ior).or(quad.map(|q| to_percent(q.ior_aug()))),
        lrs: lrs.map(|l| l.lrs),
        ars,
    }))
}

/// Leaderboard rows recomputed from the run log, ranked within each
/// (dataset, model, ipc) group. Methods without a full set of records for
/// `key` are reported in the second list.
pub fn leaderboard_from_records(
    records: &[RunRecord],
    seeds: &[u64],
    w: MetricWeights,
    key: RankKey,
) -> Result<(Vec<BoardRow>, Vec<String>), CliError> {
    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    for ((dataset, model, ipc), methods) in group_records(records) {
        let mut entries = Vec::new();
        for (method, recs) in &methods {
            match entry_from_records(&dataset, ipc, method, recs, seeds, w)? {
                Some(e) if e.score(key).is_some() => entries.push(e),
                _ => skipped.push(format!("{method} ({dataset}, {model}, ipc {ipc})")),
            }
        }
        rows.extend(
            rank_methods(&entries, key)?
                .iter()
                .map(|r| BoardRow::from_ranked(r, &model)),
        );
    }
    Ok((rows, skipped))
}

/// `rank`: recomputes the leaderboard from the run log and saves csv and markdown copies.
pub fn rank(
    m: &RunManifest,
    key: RankKey,
    format: Format,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<(), CliError> {
    let records = load_records(m)?;
    let (rows, skipped) = leaderboard_from_records(&records, &m.seeds, m.weights, key)?;
    for s in skipped {
        emit(
            err,
            &format!("skipping {s}: incomplete records for the requested score\n"),
        )?;
    }
    write_file(
        &m.output_dir.join("leaderboard.csv"),
        &render_leaderboard(&rows, Format::Csv)?,
    )?;
    write_file(
        &m.output_dir.join("leaderboard.md"),
        &render_leaderboard(&rows, Format::Markdown)?,
    )?;
    emit(out, &render_leaderboard(&rows, format)?)
}

/// `sweep`: LRS over the manifest's λ values for every logged method.
pub fn sweep(m: &RunManifest, format: Format, out: &mut dyn Write) -> Result<(), CliError> {
    let records = load_records(m)?;
    for ((dataset, model, ipc), methods) in group_records(&records) {
        let mut rows = Vec::new();
        for (method, recs) in &methods {
            let owned: Vec<RunRecord> = recs.iter().map(|r| (*r).clone()).collect();
            let Ok(acc) = lrs_accuracies(&owned, &m.seeds) else {
                continue;
            };
            let values = sweep_weights(acc.hlr()?, acc.ior()?, &m.lambdas)?;
            rows.push(SweepRow {
                method: method.clone(),
                lrs: values.into_iter().map(|(_, v)| v).collect(),
            });
        }
        if rows.is_empty() {
            continue;
        }
        if format != Format::Csv {
            emit(out, &format!("LRS↑ on {dataset}, {model}, ipc {ipc}\n"))?;
        }
        emit(out, &render_grid(&sweep_grid(&m.lambdas, &rows)?, format))?;
    }
    Ok(())
}

/// `robustness`: LRS of each artifact across the manifest's models.
pub fn robustness(m: &RunManifest, format: Format, out: &mut dyn Write) -> Result<(), CliError> {
    let dataset = load_dataset(&m.dataset)?;
    let specs = model_specs(m, &dataset)?;
    let cache = open_cache(m)?;
    let log = Arc::new(RunLog::open(m.runs_path()));
    let mut grids = Vec::new();
    for path in &m.artifacts {
        let artifact = load_artifact(path)?;
        let ev =
            Evaluator::new(&dataset, plan_for(m, &artifact), cache.clone())?.with_log(log.clone());
        let g = ev.robustness_matrix(&artifact, &specs, m.weights);
        let json = serde_json::to_string_pretty(&g).expect("grid serializes");
        write_file(
            &m.output_dir.join("reports").join(format!(
                "robustness-{}.json",
                file_stem(&artifact.method_id)
            )),
            &json,
        )?;
        grids.push(g);
    }
    emit(out, &render_grid(&robustness_grid(&grids), format))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaselineKind {
    Random,
    Noise,
}

#[derive(Debug, Clone)]
pub struct BaselineArgs {
    pub kind: BaselineKind,
    pub ipc: usize,
    pub seed: u64,
    pub out: PathBuf,
    /// Artifact whose recipe the baseline inherits; defaults to the manifest's first.
    pub like: Option<PathBuf>,
    pub self_check: bool,
}

/// `baseline`: writes a random-subset or noise artifact, optionally with a
/// random-vs-random neutrality check.
pub fn baseline(m: &RunManifest, a: &BaselineArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let dataset = load_dataset(&m.dataset)?;
    let like = a.like.as_ref().or(m.artifacts.first()).ok_or_else(|| {
        CliError::Validation("baseline needs an artifact to copy the recipe from".into())
    })?;
    let recipe = load_artifact(like)?.recipe.with_seeds(&m.seeds);
    let artifact = match a.kind {
        BaselineKind::Random => {
            select_random_subset(&dataset.train, a.ipc, a.seed, recipe.clone())?
        }
        BaselineKind::Noise => generate_noise_set(
            dataset.classes(),
            a.ipc,
            dataset.item_shape(),
            a.seed,
            recipe.clone(),
        )?,
    };
    save_artifact(&artifact, &a.out)?;
    emit(
        out,
        &format!(
            "wrote {} ({} images) to {}\n",
            artifact.method_id,
            artifact.images.len(),
            a.out.display()
        ),
    )?;
    if a.self_check {
        let spec = model_specs(m, &dataset)?.remove(0);
        let sc = self_comparison(&dataset, &spec, &recipe.as_hard(), a.ipc, &m.seeds)?;
        emit(
            out,
            &format!(
                "random vs random IOR: {:.2} ± {:.2} pp over {} seeds ({})\n",
                sc.mean,
                sc.std_err,
                sc.ior.len(),
                if sc.is_neutral(2.0) {
                    "neutral"
                } else {
                    "NOT neutral"
                }
            ),
        )?;
    }
    Ok(())
}

/// `report`: re-renders a saved leaderboard csv.
pub fn report(input: &Path, format: Format, out: &mut dyn Write) -> Result<(), CliError> {
    let text = fs::read_to_string(input).map_err(|e| CliError::io(input, e))?;
    let rows = crate::render::parse_leaderboard_csv(&text)?;
    emit(out, &render_leaderboard(&rows, format)?)
}

#[derive(Debug, Clone)]
pub struct ToyArgs {
    pub out: PathBuf,
    pub seed: u64,
    pub size: usize,
    pub train_per_class: usize,
    pub test_per_class: usize,
    pub ipc: usize,
    pub epochs: usize,
}

impl Default for ToyArgs {
    fn default() -> Self {
        let c = ToyConfig::default();
        Self {
            out: PathBuf::from("toy"),
            seed: c.seed,
            size: c.size,
            train_per_class: c.train_per_class,
            test_per_class: c.test_per_class,
            ipc: 10,
            epochs: 15,
        }
    }
}

pub fn toy_recipe(epochs: usize) -> EvalConfig {
    EvalConfig {
        epochs,
        batch_size: 32,
        optimizer: OptimizerSpec::Sgd {
            momentum: 0.9,
            weight_decay: 5e-4,
        },
        base_lr: 0.03,
        lr_schedule: LrSchedule::Cosine,
        loss: LossKind::Ce,
        temperature: None,
        augmentation: AugChain::parse(&["flip", "resized_crop:0.5:1"]).expect("valid chain"),
        label_mode: LabelMode::Hard,
        teacher: None,
        seeds: vec![0, 1, 2, 3, 4],
        lr_grid: None,
        accuracy_mode: AccuracyMode::FinalEpoch,
    }
}

/// `toy`: a synthetic dataset, two prototype-based artifacts and a manifest for them.
pub fn toy(a: &ToyArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let cfg = ToyConfig {
        seed: a.seed,
        size: a.size,
        train_per_class: a.train_per_class,
        test_per_class: a.test_per_class,
        ..ToyConfig::default()
    };
    let dataset = toy_dataset(&cfg)?;
    save_dataset(&dataset, &a.out.join("dataset"))?;
    let recipe = toy_recipe(a.epochs);
    let mut names = Vec::new();
    for (name, noise) in [("prototypes", 0.3f32), ("noisy-prototypes", 1.5)] {
        let p = prototype_images(&dataset.train, a.ipc, noise, a.seed)?;
        let art = DistilledArtifact::new(
            name,
            p.images,
            LabelPayload::Hard(p.labels),
            a.ipc,
            recipe.clone(),
        )?;
        save_artifact(&art, &a.out.join("artifacts").join(name))?;
        names.push(format!("\"artifacts/{name}\""));
    }
    let manifest = format!(
        "schema = 1\n\
         dataset = \"dataset\"\n\
         artifacts = [{}]\n\
         models = [\"tiny-desk-cnn@w8\"]\n\
         output_dir = \"out\"\n\
         seeds = [0, 1, 2, 3, 4]\n\
         lr_grid = [0.01, 0.03, 0.1]\n\
         \n\
         [weights]\n\
         lambda = 0.5\n\
         gamma = 0.5\n",
        names.join(", ")
    );
    let path = a.out.join("manifest.toml");
    write_file(&path, &manifest)?;
    emit(
        out,
        &format!("wrote {} with dataset {}\n", path.display(), dataset.id),
    )
}
