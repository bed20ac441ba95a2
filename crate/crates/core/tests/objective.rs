//! The hyperparameter-search objective against known-signal and null-signal
//! synthetic cohorts.

use sigmode_core::math::SeededRng;
use sigmode_core::pipeline::{
    build_sequences, preprocess, synth_generate, PreprocessConfig, SequenceSpec, SynthConfig,
    TrainProtocol,
};
use sigmode_core::tune::{validation_auc, HyperParams, ObjectiveContext};
use sigmode_core::vmd::VmdConfig;

fn synth_dataset(rows: usize, separation: f64, seed: u64) -> sigmode_core::pipeline::Dataset {
    let cfg = SynthConfig {
        rows,
        separation,
        seed,
        ..Default::default()
    };
    let table = synth_generate(&cfg).unwrap();
    let (clean, stats) = preprocess(&table, &PreprocessConfig::default()).unwrap();
    let grouping = cfg.grouping();
    build_sequences(
        &clean,
        SequenceSpec {
            grouping: &grouping,
            label_column: "label",
            categories: None,
            stats,
        },
    )
    .unwrap()
}

fn protocol(seed: u64) -> TrainProtocol {
    TrainProtocol {
        folds: 4,
        seed,
        ..Default::default()
    }
}

#[test]
fn separable_data_scores_high() {
    let data = synth_dataset(320, 3.0, 21);
    let vmd_cfg = VmdConfig::default();
    let columns = vec!["hormonal_metabolic_c1".to_string()];
    let protocol = protocol(21);
    let ctx = ObjectiveContext {
        data: &data,
        vmd_columns: &columns,
        vmd_config: &vmd_cfg,
        protocol: &protocol,
        search_epoch_cap: 25,
    };
    let (score, diag) = validation_auc(&HyperParams::default(), &ctx);
    assert!(diag.is_none(), "{diag:?}");
    assert!(score >= 0.95, "score {score}");
}

#[test]
fn shuffled_labels_score_near_chance() {
    let vmd_cfg = VmdConfig::default();
    let columns: Vec<String> = Vec::new();
    for seed in 0..5u64 {
        // Big enough that one validation fold estimates AUC with std well
        // under the 0.1 band.
        let mut data = synth_dataset(480, 2.5, 100 + seed);
        // Shuffling labels severs every feature-label association.
        let mut rng = SeededRng::new(seed);
        rng.shuffle(&mut data.labels);
        let protocol = TrainProtocol {
            folds: 4,
            epoch_cap: 40,
            seed,
            ..Default::default()
        };
        let ctx = ObjectiveContext {
            data: &data,
            vmd_columns: &columns,
            vmd_config: &vmd_cfg,
            protocol: &protocol,
            search_epoch_cap: 12,
        };
        let (score, _) = validation_auc(&HyperParams::default(), &ctx);
        assert!((score - 0.5).abs() <= 0.1, "seed {seed}: score {score}");
    }
}

#[test]
fn identical_candidates_score_identically() {
    let data = synth_dataset(160, 2.0, 33);
    let vmd_cfg = VmdConfig::default();
    let columns = vec!["imaging_c1".to_string()];
    let protocol = protocol(33);
    let ctx = ObjectiveContext {
        data: &data,
        vmd_columns: &columns,
        vmd_config: &vmd_cfg,
        protocol: &protocol,
        search_epoch_cap: 8,
    };
    let hp = HyperParams {
        hidden_size: 8,
        num_heads: 2,
        vmd_modes: 2,
        dropout: 0.2,
    };
    let (a, _) = validation_auc(&hp, &ctx);
    let (b, _) = validation_auc(&hp, &ctx);
    assert_eq!(a, b);
}

#[test]
fn impossible_candidate_scores_zero_with_diagnostic() {
    let data = synth_dataset(120, 2.0, 44);
    let vmd_cfg = VmdConfig::default();
    let columns: Vec<String> = Vec::new();
    let protocol = protocol(44);
    let ctx = ObjectiveContext {
        data: &data,
        vmd_columns: &columns,
        vmd_config: &vmd_cfg,
        protocol: &protocol,
        search_epoch_cap: 5,
    };
    // 2 * hidden_size = 18 is not divisible by 4 heads.
    let hp = HyperParams {
        hidden_size: 9,
        num_heads: 4,
        vmd_modes: 1,
        dropout: 0.0,
    };
    let (score, diag) = validation_auc(&hp, &ctx);
    assert_eq!(score, 0.0);
    assert!(diag.is_some());
}
