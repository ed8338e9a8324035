//! The LRS and ARS evaluation pipelines.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::augment::ZcaWhitener;
use crate::data::baseline::{select_random_subset, RANDOM_METHOD_ID};
use crate::data::{
    Dataset, DistilledArtifact, LabelPayload, RunLog, RunRecord, SettingTag, RECORD_SCHEMA,
};
use crate::error::{Error, Result};
use crate::metrics::{
    compute_ars, compute_lrs, sweep_weights, to_percent, AccuracyQuad, AccuracyRecord,
    MetricResult, MetricWeights,
};
use crate::orchestrator::cache::{ArmFamily, BaselineCache, CacheKey, SeedRun};
use crate::train::config::digest;
use crate::train::{
    search_grid, teacher_soft_labels, train_agent, AgentModelSpec, EvalConfig, LabelMode, LrTrial,
    Model, TeacherSpec, TrainContext,
};

/// Seed reserved for learning-rate search, kept apart from reporting seeds.
pub const LR_SEARCH_SEED: u64 = 0x005e_ed1a;

pub const REAL_METHOD_ID: &str = "real";

/// Everything about an evaluation that is not the artifact or the model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalPlan {
    /// Recipe for the syn-hard and real-hard arms.
    pub hard_recipe: EvalConfig,
    /// Reporting seeds shared by every arm.
    pub seeds: Vec<u64>,
    pub search_seeds: Vec<u64>,
    /// Overrides each recipe's own grid when set.
    pub lr_grid: Option<Vec<f64>>,
    /// Worker threads for independent seeds.
    pub jobs: usize,
}

impl EvalPlan {
    /// The artifact's own recipe, switched to hard labels, and its seeds.
    pub fn for_artifact(artifact: &DistilledArtifact) -> Self {
        Self {
            hard_recipe: artifact.recipe.as_hard(),
            seeds: artifact.recipe.seeds.clone(),
            search_seeds: vec![LR_SEARCH_SEED],
            lr_grid: None,
            jobs: 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.hard_recipe.validate()?;
        if self.hard_recipe.label_mode != LabelMode::Hard {
            return Err(Error::Validation(
                "the hard recipe must use hard labels".into(),
            ));
        }
        if self.seeds.is_empty() || self.search_seeds.is_empty() {
            return Err(Error::Validation(
                "plan needs reporting and search seeds".into(),
            ));
        }
        let mut s = self.seeds.clone();
        s.sort_unstable();
        s.dedup();
        if s.len() != self.seeds.len() {
            return Err(Error::Validation("plan seeds must be distinct".into()));
        }
        if self.jobs == 0 {
            return Err(Error::Validation("jobs must be >= 1".into()));
        }
        Ok(())
    }

    fn grid(&self, recipe: &EvalConfig) -> Vec<f64> {
        self.lr_grid
            .clone()
            .unwrap_or_else(|| recipe.lr_grid_or_default())
    }
}

/// Outcome of one setting across all seeds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArmResult {
    pub setting: SettingTag,
    pub lr: f64,
    pub config_hash: String,
    /// Recipe digest without the learning rate; equal across paired arms.
    pub pairing_hash: String,
    /// Empty for arms trained at the declared rate.
    pub lr_trials: Vec<LrTrial>,
    /// Sorted by seed.
    pub records: Vec<RunRecord>,
}

impl ArmResult {
    pub fn mean_accuracy(&self) -> f64 {
        self.records.iter().map(|r| r.test_accuracy).sum::<f64>() / self.records.len() as f64
    }
}

fn mean_of(records: &[RunRecord], setting: SettingTag, seeds: &[u64]) -> Result<f64> {
    let mut rows: Vec<&RunRecord> = records.iter().filter(|r| r.setting == setting).collect();
    rows.sort_by_key(|r| r.seed);
    let got: Vec<u64> = rows.iter().map(|r| r.seed).collect();
    let mut want = seeds.to_vec();
    want.sort_unstable();
    if got != want {
        return Err(Error::Precondition(format!(
            "setting {setting} has seeds {got:?}, expected {want:?}"
        )));
    }
    Ok(rows.iter().map(|r| r.test_accuracy).sum::<f64>() / rows.len() as f64)
}

/// Seed-averaged accuracies of the four LRS settings.
pub fn lrs_accuracies(records: &[RunRecord], seeds: &[u64]) -> Result<AccuracyRecord> {
    AccuracyRecord::new(
        mean_of(records, SettingTag::RealHard, seeds)?,
        mean_of(records, SettingTag::SynHard, seeds)?,
        mean_of(records, SettingTag::SynAny, seeds)?,
        mean_of(records, SettingTag::RdmAny, seeds)?,
    )
}

/// Seed-averaged accuracies of the four ARS settings.
pub fn ars_accuracies(records: &[RunRecord], seeds: &[u64]) -> Result<AccuracyQuad> {
    AccuracyQuad::new(
        mean_of(records, SettingTag::SynAug, seeds)?,
        mean_of(records, SettingTag::RdmAug, seeds)?,
        mean_of(records, SettingTag::SynNaug, seeds)?,
        mean_of(records, SettingTag::RdmNaug, seeds)?,
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LRSReport {
    pub method_id: String,
    pub dataset_id: String,
    pub model_id: String,
    pub ipc: usize,
    pub seeds: Vec<u64>,
    /// syn-hard, real-hard, syn-any, rdm-any.
    pub arms: Vec<ArmResult>,
    pub accuracies: AccuracyRecord,
    pub metrics: MetricResult,
}

impl LRSReport {
    pub fn arm(&self, setting: SettingTag) -> Option<&ArmResult> {
        self.arms.iter().find(|a| a.setting == setting)
    }

    pub fn records(&self) -> Vec<RunRecord> {
        self.arms
            .iter()
            .flat_map(|a| a.records.iter().cloned())
            .collect()
    }

    /// Scores under other weights, without retraining.
    pub fn metrics_at(&self, weights: MetricWeights) -> Result<MetricResult> {
        MetricResult::compute(&self.accuracies, None, weights)
    }

    /// LRS for each λ.
    pub fn sweep(&self, lambdas: &[f64]) -> Result<Vec<(f64, f64)>> {
        sweep_weights(self.accuracies.hlr()?, self.accuracies.ior()?, lambdas)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ARSReport {
    pub method_id: String,
    pub dataset_id: String,
    pub model_id: String,
    pub ipc: usize,
    pub seeds: Vec<u64>,
    /// syn-aug, rdm-aug, syn-naug, rdm-naug.
    pub arms: Vec<ArmResult>,
    pub accuracies: AccuracyQuad,
    pub weights: MetricWeights,
    /// Percentage points.
    pub ior_aug: f64,
    pub ior_naug: f64,
    pub ars: f64,
}

impl ARSReport {
    pub fn arm(&self, setting: SettingTag) -> Option<&ArmResult> {
        self.arms.iter().find(|a| a.setting == setting)
    }

    pub fn records(&self) -> Vec<RunRecord> {
        self.arms
            .iter()
            .flat_map(|a| a.records.iter().cloned())
            .collect()
    }

    pub fn ars_at(&self, gamma: f64) -> Result<f64> {
        compute_ars(&self.accuracies, gamma)
    }
}

/// Where an arm's training images come from.
enum ArmData<'a> {
    Fixed {
        artifact: &'a DistilledArtifact,
        source: String,
    },
    /// A fresh stratified draw of `ipc` per class for every seed.
    Random { ipc: usize },
}

struct Arm<'a> {
    setting: SettingTag,
    family: ArmFamily,
    recipe: EvalConfig,
    search: bool,
    data: ArmData<'a>,
}

/// Content fingerprint of an artifact's images and labels.
pub fn artifact_fingerprint(artifact: &DistilledArtifact) -> String {
    let mut h = Sha256::new();
    h.update(artifact.method_id.as_bytes());
    for v in artifact.images.images.shape() {
        h.update((*v as u64).to_le_bytes());
    }
    for v in artifact.images.images.data() {
        h.update(v.to_le_bytes());
    }
    match &artifact.labels {
        LabelPayload::Hard(l) => l.iter().for_each(|v| h.update((*v as u64).to_le_bytes())),
        LabelPayload::FixedSoft(p) => p.data().iter().for_each(|v| h.update(v.to_le_bytes())),
        LabelPayload::Teacher {
            classes,
            temperature,
            ..
        } => {
            h.update(temperature.to_le_bytes());
            classes
                .iter()
                .for_each(|v| h.update((*v as u64).to_le_bytes()));
        }
    }
    h.update([artifact.zca_space as u8]);
    format!(
        "{}#{}",
        artifact.method_id,
        &hex::encode(h.finalize())[..16]
    )
}

/// Runs arms against one real dataset, sharing teachers, whiteners and the cache.
pub struct Evaluator<'d> {
    pub dataset: &'d Dataset,
    pub plan: EvalPlan,
    cache: Arc<BaselineCache>,
    log: Option<Arc<RunLog>>,
    teachers: Mutex<HashMap<TeacherSpec, Arc<Model>>>,
    whiteners: Mutex<HashMap<u64, Arc<ZcaWhitener>>>,
    pool: rayon::ThreadPool,
    real: DistilledArtifact,
}

impl<'d> Evaluator<'d> {
    pub fn new(dataset: &'d Dataset, plan: EvalPlan, cache: Arc<BaselineCache>) -> Result<Self> {
        plan.validate()?;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(plan.jobs)
            .build()
            .map_err(|e| {
                Error::Precondition(format!("cannot start {} worker(s): {e}", plan.jobs))
            })?;
        let real = DistilledArtifact {
            method_id: REAL_METHOD_ID.into(),
            images: dataset.train.images.clone(),
            labels: LabelPayload::Hard(dataset.train.labels.clone()),
            ipc: dataset.train.class_counts().into_iter().max().unwrap_or(0),
            recipe: plan.hard_recipe.clone(),
            zca_space: false,
        };
        Ok(Self {
            dataset,
            plan,
            cache,
            log: None,
            teachers: Mutex::new(HashMap::new()),
            whiteners: Mutex::new(HashMap::new()),
            pool,
            real,
        })
    }

    /// Appends every arm's records to `log` as soon as the arm completes.
    pub fn with_log(mut self, log: Arc<RunLog>) -> Self {
        self.log = Some(log);
        self
    }

    pub fn cache(&self) -> &Arc<BaselineCache> {
        &self.cache
    }

    fn model_spec_for_teacher(&self, spec: &TeacherSpec) -> Result<AgentModelSpec> {
        AgentModelSpec::parse(
            &spec.architecture,
            Some(spec.width),
            self.dataset.item_shape(),
            self.dataset.classes(),
        )
    }

    /// Loads the teacher's checkpoint, or trains it on the real training
    /// split under the hard recipe at its declared rate.
    pub fn teacher(&self, spec: &TeacherSpec) -> Result<Arc<Model>> {
        if let Some(t) = self.teachers.lock().expect("teacher lock").get(spec) {
            return Ok(t.clone());
        }
        let mspec = self.model_spec_for_teacher(spec)?;
        let model = match &spec.checkpoint {
            Some(path) => Model::load_checkpoint(mspec, std::path::Path::new(path))?,
            None => {
                let saved = self.cache.dir().map(|d| {
                    let v = serde_json::json!({
                        "dataset": self.dataset.id,
                        "teacher": spec,
                        "recipe": self.plan.hard_recipe,
                    });
                    d.join("teachers")
                        .join(format!("{}.ddrk", &digest(&v)[..32]))
                });
                match saved.as_ref().filter(|p| p.exists()) {
                    Some(p) => Model::load_checkpoint(mspec, p)?,
                    None => {
                        let ctx = self.context(&self.plan.hard_recipe)?;
                        let mut out = train_agent(
                            &self.real,
                            &self.dataset.test,
                            &mspec,
                            &self.plan.hard_recipe,
                            spec.seed,
                            &ctx,
                        )?
                        .model;
                        self.cache.count_training();
                        if let Some(p) = saved {
                            if let Some(parent) = p.parent() {
                                std::fs::create_dir_all(parent)
                                    .map_err(|e| Error::io(parent, e))?;
                            }
                            out.save_checkpoint(&p)?;
                        }
                        out
                    }
                }
            }
        };
        let model = Arc::new(model);
        self.teachers
            .lock()
            .expect("teacher lock")
            .entry(spec.clone())
            .or_insert(model.clone());
        Ok(model)
    }

    fn whitener(&self, epsilon: f64) -> Result<Arc<ZcaWhitener>> {
        let mut map = self.whiteners.lock().expect("zca lock");
        if let Some(w) = map.get(&epsilon.to_bits()) {
            return Ok(w.clone());
        }
        let w = Arc::new(ZcaWhitener::fit(
            &self.dataset.train.images.images,
            epsilon,
        )?);
        map.insert(epsilon.to_bits(), w.clone());
        Ok(w)
    }

    fn context(&self, recipe: &EvalConfig) -> Result<TrainContext> {
        let teacher = match (&recipe.teacher, recipe.label_mode) {
            (Some(t), LabelMode::Teacher) => Some(self.teacher(t)?),
            _ => None,
        };
        let zca = recipe
            .augmentation
            .zca_epsilon()
            .map(|e| self.whitener(e))
            .transpose()?;
        Ok(TrainContext { teacher, zca })
    }

    /// Random subset for `seed`, labeled the way `recipe` expects.
    fn random_artifact(
        &self,
        ipc: usize,
        seed: u64,
        recipe: &EvalConfig,
    ) -> Result<DistilledArtifact> {
        let mut a = select_random_subset(&self.dataset.train, ipc, seed, recipe.clone())?;
        match recipe.label_mode {
            LabelMode::Hard => {}
            LabelMode::FixedSoft => {
                let spec = recipe.teacher.as_ref().ok_or_else(|| {
                    Error::Validation(
                        "a fixed-soft recipe must name the teacher that labels random subsets"
                            .into(),
                    )
                })?;
                let t = self.teacher(spec)?;
                a.labels = LabelPayload::FixedSoft(teacher_soft_labels(&t, &a.images.images, 1.0)?);
            }
            LabelMode::Teacher => {
                let classes = a.labels.hard_labels();
                a.labels = LabelPayload::Teacher {
                    teacher: recipe
                        .teacher
                        .clone()
                        .expect("validated recipe has a teacher"),
                    temperature: recipe.temperature.unwrap_or(1.0),
                    classes,
                };
            }
        }
        Ok(a)
    }

    fn arm_hash(&self, arm: &Arm<'_>) -> String {
        let mut v = serde_json::to_value(&arm.recipe).expect("recipe serializes");
        let obj = v.as_object_mut().expect("recipe is an object");
        obj.remove("seeds");
        if arm.search {
            obj.remove("base_lr");
            obj.remove("lr_grid");
            obj.insert(
                "search".into(),
                serde_json::json!({ "grid": self.plan.grid(&arm.recipe), "seeds": self.plan.search_seeds }),
            );
        }
        if arm
            .recipe
            .teacher
            .as_ref()
            .is_some_and(|t| t.checkpoint.is_none())
        {
            obj.insert(
                "teacher_recipe".into(),
                serde_json::to_value(&self.plan.hard_recipe).unwrap(),
            );
        }
        digest(&v)
    }

    fn run_one(
        &self,
        arm: &Arm<'_>,
        model: &AgentModelSpec,
        recipe: &EvalConfig,
        seed: u64,
        ctx: &TrainContext,
    ) -> Result<f64> {
        let out = match &arm.data {
            ArmData::Fixed { artifact, .. } => {
                train_agent(artifact, &self.dataset.test, model, recipe, seed, ctx)?
            }
            ArmData::Random { ipc } => {
                let a = self.random_artifact(*ipc, seed, recipe)?;
                train_agent(&a, &self.dataset.test, model, recipe, seed, ctx)?
            }
        };
        self.cache.count_training();
        Ok(out.accuracy)
    }

    fn run_arm(
        &self,
        arm: Arm<'_>,
        method_id: &str,
        ipc: usize,
        model: &AgentModelSpec,
    ) -> Result<ArmResult> {
        let setting = arm.setting;
        self.run_arm_inner(&arm, method_id, ipc, model)
            .map_err(|e| Error::ArmFailed {
                setting: setting.to_string(),
                source: Box::new(e),
            })
    }

    fn run_arm_inner(
        &self,
        arm: &Arm<'_>,
        method_id: &str,
        ipc: usize,
        model: &AgentModelSpec,
    ) -> Result<ArmResult> {
        arm.recipe.validate()?;
        let key = CacheKey {
            dataset_id: self.dataset.id.clone(),
            model_id: model.id(),
            source: match &arm.data {
                ArmData::Fixed { source, .. } => source.clone(),
                ArmData::Random { .. } => RANDOM_METHOD_ID.into(),
            },
            family: arm.family,
            ipc: match &arm.data {
                ArmData::Random { ipc } => *ipc,
                ArmData::Fixed { artifact, .. } => artifact.ipc,
            },
            recipe_hash: self.arm_hash(arm),
        };
        let ctx = self.context(&arm.recipe)?;
        let cached = self.cache.get(&key)?.unwrap_or_default();
        let (lr, trials) = match (arm.search, cached.lr) {
            (false, _) => (arm.recipe.base_lr, Vec::new()),
            (true, Some(lr)) => (lr, cached.lr_trials.clone()),
            (true, None) => {
                let grid = self.plan.grid(&arm.recipe);
                let found = search_grid(&grid, &self.plan.search_seeds, |lr, s| {
                    self.run_one(arm, model, &arm.recipe.with_lr(lr), s, &ctx)
                })?;
                let lr = self
                    .cache
                    .put_lr(&key, found.best_lr, found.trials.clone())?;
                (lr, found.trials)
            }
        };
        let recipe = arm.recipe.with_lr(lr);
        let config_hash = recipe.config_hash()?;
        let pairing_hash = recipe.pairing_hash()?;
        let missing: Vec<u64> = self
            .plan
            .seeds
            .iter()
            .copied()
            .filter(|s| !cached.runs.contains_key(s))
            .collect();
        let fresh: Vec<Result<(u64, SeedRun)>> = self.pool.install(|| {
            missing
                .par_iter()
                .map(|&seed| {
                    let t = Instant::now();
                    let accuracy = self.run_one(arm, model, &recipe, seed, &ctx)?;
                    Ok((
                        seed,
                        SeedRun {
                            accuracy,
                            wall_time: t.elapsed().as_secs_f64(),
                        },
                    ))
                })
                .collect()
        });
        let mut runs = cached.runs.clone();
        for r in fresh {
            let (seed, run) = r?;
            runs.insert(seed, self.cache.put_run(&key, seed, run)?);
        }
        let mut seeds = self.plan.seeds.clone();
        seeds.sort_unstable();
        let records: Vec<RunRecord> = seeds
            .iter()
            .map(|s| {
                let run = runs[s];
                RunRecord {
                    schema: RECORD_SCHEMA,
                    method_id: method_id.to_string(),
                    dataset_id: self.dataset.id.clone(),
                    model_id: model.id(),
                    ipc,
                    setting: arm.setting,
                    seed: *s,
                    test_accuracy: run.accuracy,
                    lr,
                    config_hash: config_hash.clone(),
                    wall_time: run.wall_time,
                }
            })
            .collect();
        if let Some(log) = &self.log {
            log.append_all(&records)?;
        }
        Ok(ArmResult {
            setting: arm.setting,
            lr,
            config_hash,
            pairing_hash,
            lr_trials: trials,
            records,
        })
    }

    fn check_artifact(&self, artifact: &DistilledArtifact, model: &AgentModelSpec) -> Result<()> {
        artifact.validate()?;
        model.validate()?;
        if artifact.images.item_shape() != self.dataset.item_shape()
            || artifact.classes() != self.dataset.classes()
        {
            return Err(Error::Validation(format!(
                "artifact {} ({:?}, {} classes) does not match dataset {} ({:?}, {} classes)",
                artifact.method_id,
                artifact.images.item_shape(),
                artifact.classes(),
                self.dataset.id,
                self.dataset.item_shape(),
                self.dataset.classes()
            )));
        }
        Ok(())
    }

    fn syn_arm<'a>(
        &self,
        setting: SettingTag,
        artifact: &'a DistilledArtifact,
        recipe: EvalConfig,
        search: bool,
    ) -> Arm<'a> {
        Arm {
            setting,
            family: ArmFamily::Syn,
            recipe,
            search,
            data: ArmData::Fixed {
                artifact,
                source: artifact_fingerprint(artifact),
            },
        }
    }

    /// Trains the four LRS arms and scores them.
    pub fn eval_lrs(
        &self,
        artifact: &DistilledArtifact,
        model: &AgentModelSpec,
        weights: MetricWeights,
    ) -> Result<LRSReport> {
        self.check_artifact(artifact, model)?;
        let seeds = &self.plan.seeds;
        let declared = artifact.recipe.with_seeds(seeds);
        let hard = self.plan.hard_recipe.with_seeds(seeds);
        let arms = vec![
            self.syn_arm(SettingTag::SynHard, artifact, hard.clone(), true),
            Arm {
                setting: SettingTag::RealHard,
                family: ArmFamily::Real,
                recipe: hard,
                search: true,
                data: ArmData::Fixed {
                    artifact: &self.real,
                    source: REAL_METHOD_ID.into(),
                },
            },
            self.syn_arm(SettingTag::SynAny, artifact, declared.clone(), false),
            Arm {
                setting: SettingTag::RdmAny,
                family: ArmFamily::Rdm,
                recipe: declared,
                search: true,
                data: ArmData::Random { ipc: artifact.ipc },
            },
        ];
        let results = arms
            .into_iter()
            .map(|a| self.run_arm(a, &artifact.method_id, artifact.ipc, model))
            .collect::<Result<Vec<_>>>()?;
        check_pairing(&results[2], &results[3])?;
        let all: Vec<RunRecord> = results.iter().flat_map(|a| a.records.clone()).collect();
        let accuracies = lrs_accuracies(&all, seeds)?;
        let metrics = MetricResult::compute(&accuracies, None, weights)?;
        Ok(LRSReport {
            method_id: artifact.method_id.clone(),
            dataset_id: self.dataset.id.clone(),
            model_id: model.id(),
            ipc: artifact.ipc,
            seeds: seeds.clone(),
            arms: results,
            accuracies,
            metrics,
        })
    }

    /// Trains synthetic and random data with and without the declared chain.
    pub fn eval_ars(
        &self,
        artifact: &DistilledArtifact,
        model: &AgentModelSpec,
        weights: MetricWeights,
    ) -> Result<ARSReport> {
        self.check_artifact(artifact, model)?;
        let seeds = &self.plan.seeds;
        let aug = artifact.recipe.with_seeds(seeds);
        let naug = aug.without_augmentation();
        let arms = vec![
            self.syn_arm(SettingTag::SynAug, artifact, aug.clone(), false),
            Arm {
                setting: SettingTag::RdmAug,
                family: ArmFamily::Rdm,
                recipe: aug,
                search: true,
                data: ArmData::Random { ipc: artifact.ipc },
            },
            self.syn_arm(SettingTag::SynNaug, artifact, naug.clone(), false),
            Arm {
                setting: SettingTag::RdmNaug,
                family: ArmFamily::Rdm,
                recipe: naug,
                search: true,
                data: ArmData::Random { ipc: artifact.ipc },
            },
        ];
        let results = arms
            .into_iter()
            .map(|a| self.run_arm(a, &artifact.method_id, artifact.ipc, model))
            .collect::<Result<Vec<_>>>()?;
        check_pairing(&results[0], &results[1])?;
        check_pairing(&results[2], &results[3])?;
        let all: Vec<RunRecord> = results.iter().flat_map(|a| a.records.clone()).collect();
        let accuracies = ars_accuracies(&all, seeds)?;
        let ars = compute_ars(&accuracies, weights.gamma)?;
        Ok(ARSReport {
            method_id: artifact.method_id.clone(),
            dataset_id: self.dataset.id.clone(),
            model_id: model.id(),
            ipc: artifact.ipc,
            seeds: seeds.clone(),
            arms: results,
            ior_aug: to_percent(accuracies.ior_aug()),
            ior_naug: to_percent(accuracies.ior_naug()),
            accuracies,
            weights,
            ars,
        })
    }
}

/// Synthetic and random arms must differ only in their data and learning rate.
fn check_pairing(syn: &ArmResult, rdm: &ArmResult) -> Result<()> {
    let seeds = |a: &ArmResult| a.records.iter().map(|r| r.seed).collect::<Vec<_>>();
    if seeds(syn) != seeds(rdm) {
        return Err(Error::Precondition(format!(
            "{} and {} ran on different seeds",
            syn.setting, rdm.setting
        )));
    }
    if syn.pairing_hash != rdm.pairing_hash {
        return Err(Error::Precondition(format!(
            "{} and {} were trained under different recipes",
            syn.setting, rdm.setting
        )));
    }
    Ok(())
}

/// Convenience wrapper: one-off evaluation with the artifact's own plan and a
/// memory-only cache.
pub fn eval_lrs(
    artifact: &DistilledArtifact,
    dataset: &Dataset,
    model: &AgentModelSpec,
    weights: MetricWeights,
) -> Result<LRSReport> {
    let cache = Arc::new(BaselineCache::in_memory());
    Evaluator::new(dataset, EvalPlan::for_artifact(artifact), cache)?
        .eval_lrs(artifact, model, weights)
}

pub fn eval_ars(
    artifact: &DistilledArtifact,
    dataset: &Dataset,
    model: &AgentModelSpec,
    weights: MetricWeights,
) -> Result<ARSReport> {
    let cache = Arc::new(BaselineCache::in_memory());
    Evaluator::new(dataset, EvalPlan::for_artifact(artifact), cache)?
        .eval_ars(artifact, model, weights)
}

/// LRS from four injected seed-averaged accuracies, as fractions.
pub fn lrs_from_accuracies(
    real_hard: f64,
    syn_hard: f64,
    syn_any: f64,
    rdm_any: f64,
    lambda: f64,
) -> Result<f64> {
    let r = AccuracyRecord::new(real_hard, syn_hard, syn_any, rdm_any)?;
    compute_lrs(r.hlr()?, r.ior()?, lambda)
}

/// Random-vs-random comparison: per seed, two independent stratified
/// subsets are trained under `recipe` and their accuracy difference recorded.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelfComparison {
    /// Percentage points, one per seed.
    pub ior: Vec<f64>,
    pub mean: f64,
    pub std_err: f64,
}

impl SelfComparison {
    /// True when the mean lies within `k` standard errors of zero.
    pub fn is_neutral(&self, k: f64) -> bool {
        self.mean.abs() <= k * self.std_err
    }
}

pub fn self_comparison(
    dataset: &Dataset,
    model: &AgentModelSpec,
    recipe: &EvalConfig,
    ipc: usize,
    seeds: &[u64],
) -> Result<SelfComparison> {
    if seeds.len() < 2 {
        return Err(Error::Precondition(
            "self-comparison needs at least two seeds".into(),
        ));
    }
    recipe.validate()?;
    if recipe.label_mode != LabelMode::Hard {
        return Err(Error::Validation(
            "self-comparison runs hard-label recipes only".into(),
        ));
    }
    let mut ior = Vec::with_capacity(seeds.len());
    for &s in seeds {
        let draw = |tag: &str| {
            select_random_subset(
                &dataset.train,
                ipc,
                crate::rng::derive(s, &[crate::rng::tag(tag)]),
                recipe.clone(),
            )
        };
        let (a, b) = (draw("self-a")?, draw("self-b")?);
        let ctx = TrainContext::default();
        let acc_a = train_agent(&a, &dataset.test, model, recipe, s, &ctx)?.accuracy;
        let acc_b = train_agent(&b, &dataset.test, model, recipe, s, &ctx)?.accuracy;
        ior.push(to_percent(acc_a - acc_b));
    }
    let n = ior.len() as f64;
    let mean = ior.iter().sum::<f64>() / n;
    let var = ior.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Ok(SelfComparison {
        mean,
        std_err: (var / n).sqrt(),
        ior,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::round1;

    #[test]
    fn injected_accuracies_give_hand_computed_scores() {
        let r = AccuracyRecord::new(0.847, 0.320, 0.624, 0.500).unwrap();
        let m = MetricResult::compute(&r, None, MetricWeights::default()).unwrap();
        assert_eq!(
            (round1(m.hlr), round1(m.ior), round1(m.lrs)),
            (52.7, 12.4, 19.1)
        );
    }

    #[test]
    fn records_missing_a_seed_are_rejected() {
        let mut recs = Vec::new();
        for setting in [
            SettingTag::SynHard,
            SettingTag::RealHard,
            SettingTag::SynAny,
            SettingTag::RdmAny,
        ] {
            for seed in [0, 1] {
                let mut r = crate::data::record::tests::record(seed, 0.5);
                r.setting = setting;
                recs.push(r);
            }
        }
        assert!(lrs_accuracies(&recs, &[0, 1]).is_ok());
        recs.pop();
        assert!(lrs_accuracies(&recs, &[0, 1]).is_err());
    }
}
