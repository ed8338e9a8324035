mod common;

use std::sync::Arc;

use ddrank_core::metrics::{round1, MetricResult};
use ddrank_core::orchestrator::{ars_accuracies, lrs_accuracies, BaselineCache};
use ddrank_core::train::teacher_soft_labels;
use ddrank_core::{
    AugChain, Dataset, DistilledArtifact, EvalConfig, EvalPlan, Evaluator, LabelMode, LabelPayload,
    LossKind, MetricWeights, RunLog, SettingTag, TeacherSpec,
};

fn plan(artifact: &DistilledArtifact) -> EvalPlan {
    EvalPlan {
        lr_grid: Some(vec![0.01, 0.03]),
        ..EvalPlan::for_artifact(artifact)
    }
}

fn evaluator<'d>(
    d: &'d Dataset,
    art: &DistilledArtifact,
    cache: Arc<BaselineCache>,
) -> Evaluator<'d> {
    Evaluator::new(d, plan(art), cache).unwrap()
}

#[test]
fn baselines_are_trained_once_per_key() {
    let d = common::small_dataset();
    let spec = common::tiny_spec(&d);
    let a = common::proto_artifact(&d, 2, common::recipe(2));
    let mut b = common::proto_artifact(&d, 2, common::recipe(2));
    b.method_id = "other".into();
    b.images.images.data_mut()[0] += 1.0;
    let ev = evaluator(&d, &a, Arc::new(BaselineCache::in_memory()));

    let ra = ev.eval_lrs(&a, &spec, MetricWeights::default()).unwrap();
    // Searched arms: 2 grid points + 2 seeds; declared arm: 2 seeds.
    assert_eq!(ev.cache().trainings(), 4 + 4 + 2 + 4);

    let before = ev.cache().trainings();
    let again = ev.eval_lrs(&a, &spec, MetricWeights::default()).unwrap();
    assert_eq!(ev.cache().trainings(), before);
    assert_eq!(ra.accuracies, again.accuracies);

    let rb = ev.eval_lrs(&b, &spec, MetricWeights::default()).unwrap();
    assert_eq!(ev.cache().trainings(), before + 4 + 2);
    for s in [SettingTag::RealHard, SettingTag::RdmAny] {
        let acc = |r: &ddrank_core::LRSReport| {
            r.arm(s)
                .unwrap()
                .records
                .iter()
                .map(|x| x.test_accuracy)
                .collect::<Vec<_>>()
        };
        assert_eq!(acc(&ra), acc(&rb));
    }
}

#[test]
fn ars_reuses_the_lrs_arms_it_shares() {
    let d = common::small_dataset();
    let spec = common::tiny_spec(&d);
    let a = common::proto_artifact(&d, 2, common::recipe(2));
    let ev = evaluator(&d, &a, Arc::new(BaselineCache::in_memory()));
    let lrs = ev.eval_lrs(&a, &spec, MetricWeights::default()).unwrap();
    let before = ev.cache().trainings();
    let ars = ev.eval_ars(&a, &spec, MetricWeights::default()).unwrap();
    // Only the two augmentation-free arms are new.
    assert_eq!(ev.cache().trainings(), before + 2 + 4);
    assert_eq!(ars.accuracies.syn_aug, lrs.accuracies.syn_any);
    assert_eq!(ars.accuracies.rdm_aug, lrs.accuracies.rdm_any);
}

#[test]
fn scores_recompute_exactly_from_records() {
    let d = common::small_dataset();
    let spec = common::tiny_spec(&d);
    let a = common::proto_artifact(&d, 2, common::recipe(2));
    let dir = tempfile::tempdir().unwrap();
    let log = Arc::new(RunLog::open(dir.path().join("runs.jsonl")));
    let ev = evaluator(&d, &a, Arc::new(BaselineCache::in_memory())).with_log(log.clone());
    let w = MetricWeights::new(0.3, 0.7).unwrap();
    let lrs = ev.eval_lrs(&a, &spec, w).unwrap();
    let ars = ev.eval_ars(&a, &spec, w).unwrap();

    let records = log.records().unwrap();
    assert_eq!(records.len(), 8 * 2);
    let rec = lrs_accuracies(&records, &[0, 1]).unwrap();
    assert_eq!(MetricResult::compute(&rec, None, w).unwrap(), lrs.metrics);
    let quad = ars_accuracies(&records, &[0, 1]).unwrap();
    assert_eq!(quad, ars.accuracies);
    assert_eq!(ars.ars_at(0.7).unwrap(), ars.ars);

    let syn = lrs.arm(SettingTag::SynAny).unwrap();
    let rdm = lrs.arm(SettingTag::RdmAny).unwrap();
    assert_eq!(syn.pairing_hash, rdm.pairing_hash);
    assert_eq!(syn.lr, a.recipe.base_lr);
    assert_eq!(rdm.lr_trials.len(), 2);
}

#[test]
fn identity_chain_makes_aug_and_naug_arms_agree() {
    let d = common::small_dataset();
    let spec = common::tiny_spec(&d);
    let mut r = common::recipe(2);
    r.augmentation = AugChain::identity();
    let a = common::proto_artifact(&d, 2, r);
    let ev = evaluator(&d, &a, Arc::new(BaselineCache::in_memory()));
    let ars = ev.eval_ars(&a, &spec, MetricWeights::default()).unwrap();
    assert_eq!(ars.accuracies.syn_aug, ars.accuracies.syn_naug);
    assert_eq!(ars.accuracies.rdm_aug, ars.accuracies.rdm_naug);
    assert_eq!(ars.ior_aug, ars.ior_naug);
}

#[test]
fn disk_cache_survives_and_matches_a_fresh_run() {
    let d = common::small_dataset();
    let spec = common::tiny_spec(&d);
    let a = common::proto_artifact(&d, 2, common::recipe(2));
    let dir = tempfile::tempdir().unwrap();

    let first = evaluator(&d, &a, Arc::new(BaselineCache::at_dir(dir.path()).unwrap()));
    let r1 = first.eval_lrs(&a, &spec, MetricWeights::default()).unwrap();

    let reopened = evaluator(&d, &a, Arc::new(BaselineCache::at_dir(dir.path()).unwrap()));
    let r2 = reopened
        .eval_lrs(&a, &spec, MetricWeights::default())
        .unwrap();
    assert_eq!(reopened.cache().trainings(), 0);
    assert_eq!(r1.accuracies, r2.accuracies);

    let forced = evaluator(&d, &a, Arc::new(BaselineCache::in_memory()));
    let r3 = forced
        .eval_lrs(&a, &spec, MetricWeights::default())
        .unwrap();
    assert_eq!(r1.accuracies, r3.accuracies);
}

#[test]
fn failing_arm_is_named() {
    let d = common::small_dataset();
    let spec = common::tiny_spec(&d);
    let a = common::proto_artifact(&d, 2, common::recipe(2));
    let p = EvalPlan {
        lr_grid: Some(vec![1e12]),
        ..EvalPlan::for_artifact(&a)
    };
    let ev = Evaluator::new(&d, p, Arc::new(BaselineCache::in_memory())).unwrap();
    let err = ev
        .eval_lrs(&a, &spec, MetricWeights::default())
        .unwrap_err();
    assert!(err.is_training_failure());
    assert!(err.to_string().contains("syn-hard"), "{err}");
}

#[test]
fn mismatched_artifact_is_rejected() {
    let d = common::small_dataset();
    let spec = common::tiny_spec(&d);
    let a = common::proto_artifact(&d, 2, common::recipe(2));
    let other = ddrank_core::data::toy::toy_dataset(&Default::default()).unwrap();
    let ev = evaluator(&other, &a, Arc::new(BaselineCache::in_memory()));
    assert!(ev.eval_lrs(&a, &spec, MetricWeights::default()).is_err());
}

#[test]
fn soft_label_artifact_runs_against_teacher_labeled_random_subsets() {
    let d = common::small_dataset();
    let spec = common::tiny_spec(&d);
    let teacher = TeacherSpec {
        architecture: "tiny-desk-cnn".into(),
        width: 8,
        checkpoint: None,
        seed: 0,
    };
    let soft = EvalConfig {
        loss: LossKind::Sce,
        label_mode: LabelMode::FixedSoft,
        teacher: Some(teacher.clone()),
        ..common::recipe(2)
    };
    let mut a = common::proto_artifact(&d, 2, common::recipe(2));
    let ev = evaluator(&d, &a, Arc::new(BaselineCache::in_memory()));
    let t = ev.teacher(&teacher).unwrap();
    assert_eq!(ev.cache().trainings(), 1);
    a.labels = LabelPayload::FixedSoft(teacher_soft_labels(&t, &a.images.images, 1.0).unwrap());
    a.recipe = soft;
    a.validate().unwrap();
    let r = ev.eval_lrs(&a, &spec, MetricWeights::default()).unwrap();
    assert!((0.0..=100.0).contains(&r.metrics.lrs));
    assert!(Arc::ptr_eq(&t, &ev.teacher(&teacher).unwrap()));
}

#[test]
fn robustness_grid_reports_holes_and_spread() {
    let d = common::small_dataset();
    let a = common::proto_artifact(&d, 2, common::recipe(2));
    let ev = evaluator(&d, &a, Arc::new(BaselineCache::in_memory()));
    let good = common::tiny_spec(&d);
    let narrow = good.with_width(4);
    let broken = good.with_width(0);
    let grid = ev.robustness_matrix(&a, &[good, narrow, broken], MetricWeights::default());
    assert_eq!(grid.cells.len(), 3);
    assert_eq!(grid.holes(), 1);
    let lrs: Vec<f64> = grid
        .cells
        .iter()
        .filter_map(|c| c.metrics.map(|m| m.lrs))
        .collect();
    let spread = grid.lrs_spread.unwrap();
    assert!((spread - (lrs[0] - lrs[1]).abs()).abs() < 1e-12);
    assert!(round1(spread) >= 0.0);
}
