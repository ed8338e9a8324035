//! Datasets, label payloads, candidate artifacts, baselines and run records.

pub mod artifact_io;
pub mod baseline;
pub mod container;
pub mod dataset;
pub mod record;
pub mod toy;

pub use artifact_io::{
    artifact_meta_path, load_artifact, load_dataset, save_artifact, save_dataset,
};
pub use baseline::{generate_noise_set, random_subset_indices, select_random_subset};
pub use dataset::{Dataset, DistilledArtifact, ImageSet, LabelPayload, LabeledSet, Normalization};
pub use record::{load_run_records, save_run_record, RunLog, RunRecord, SettingTag, RECORD_SCHEMA};
