use std::collections::HashSet;

use hashgrover::experiments::{
    early_stop_table, entropy_profile, noise_sweep, probability_evolution, run_experiment, standard_instances,
    Experiment, ExperimentOptions, NoiseSweepConfig,
};
use hashgrover::grover::analytic_success_probability;
use hashgrover::sim::NoiseScope;

#[test]
fn standard_instances_have_requested_counts() {
    let insts = standard_instances(&[1, 2, 3, 4, 5, 6]).unwrap();
    for (m, inst) in (1..=6).zip(&insts) {
        assert_eq!(inst.m(), m);
    }
}

#[test]
fn empirical_first_hit_within_three_sigma_of_exact() {
    let insts = standard_instances(&[4]).unwrap();
    let rows = early_stop_table(&insts, 4000, 5).unwrap();
    assert_eq!(rows.len(), 6);
    for r in rows {
        assert!((r.mean_samples - r.expected_samples).abs() <= 3.0 * r.samples_sigma, "{r:?}");
        assert!((r.success_probability - r.analytic_probability).abs() < 1e-9);
    }
}

#[test]
fn evolution_messages_sum_to_one() {
    let inst = standard_instances(&[3]).unwrap().remove(0);
    let e = probability_evolution(&inst, 4).unwrap();
    for k in 0..=4 {
        let total: f64 = e.messages.iter().filter(|r| r.step == k).map(|r| r.probability).sum();
        assert!((total - 1.0).abs() < 1e-9);
    }
    assert_eq!(e.messages.iter().map(|r| r.message).collect::<HashSet<_>>().len(), 256);
}

#[test]
fn entropy_probes_are_within_bounds() {
    let inst = standard_instances(&[1]).unwrap().remove(0);
    let p = entropy_profile(&inst, 3, 0).unwrap();
    assert!(p.scan.is_empty());
    for r in &p.steps {
        assert!((0.0..=8.0).contains(&r.mid_entropy));
        assert!((0.0..=4.0).contains(&r.post_entropy));
    }
    // One preimage: at most two Schmidt terms across the message cut.
    assert!(p.steps.iter().all(|r| r.post_entropy <= 1.0 + 1e-9));
}

#[test]
fn noise_is_seed_reproducible() {
    let inst = standard_instances(&[2]).unwrap().remove(0);
    let cfg = NoiseSweepConfig { probabilities: vec![2e-5], trajectories: 3, scope: NoiseScope::AllQubits, seed: 8 };
    let a = noise_sweep(&inst, &cfg).unwrap();
    assert_eq!(a, noise_sweep(&inst, &cfg).unwrap());
    let zero = NoiseSweepConfig { probabilities: vec![0.0], trajectories: 2, ..cfg };
    let z = noise_sweep(&inst, &zero).unwrap();
    assert!((z[0].success - analytic_success_probability(256, 2, 8)).abs() < 1e-9);
    assert!(noise_sweep(&inst, &NoiseSweepConfig { probabilities: vec![1.5], ..zero }).is_err());
}

#[test]
fn experiment_output_files() {
    let dir = tempfile::tempdir().unwrap();
    let opts = ExperimentOptions { max_steps: Some(2), ..Default::default() };
    let res = run_experiment(Experiment::ProbabilityEvolution, 3, &opts).unwrap();
    let files = res.write(dir.path()).unwrap();
    let names: Vec<_> = files.iter().map(|p| p.file_name().unwrap().to_string_lossy().into_owned()).collect();
    assert_eq!(
        names,
        ["probability-evolution.csv", "probability-evolution_steps.csv", "probability-evolution.json"]
    );
    let header = std::fs::read_to_string(&files[1]).unwrap();
    assert!(header.starts_with("m,iv,digest,step,preimage_probability,analytic_probability,is_peak\n"));
}
