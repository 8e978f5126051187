// scratch: criterion-6 budget sweep (not part of the artifact)
use zqvae_core::channel::{DecoderSpec, EncoderSpec};
use zqvae_core::data::{gen_synthetic_quantum, Side, Split};
use zqvae_core::losses::LossKind;
use zqvae_core::metrics::{latent_volume, map_side, pairwise_fidelity_pcc};
use zqvae_core::objective::{ObjectiveMode, ObjectiveSpec};
use zqvae_core::optim::{train, TrainConfig, TrainData};

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let (ma, mb) = (mean(a), mean(b));
    let (mut c, mut va, mut vb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        c += (x - ma) * (y - mb);
        va += (x - ma) * (x - ma);
        vb += (y - mb) * (y - mb);
    }
    c / (va.sqrt() * vb.sqrt())
}

fn main() {
    let t0 = std::time::Instant::now();
    let mut ds = gen_synthetic_quantum::<f64>(270, 42).unwrap();
    ds.split = Some(Split { train: (0..200).collect(), test: (200..270).collect() });
    let train_pts = ds.side_points(Side::Train).unwrap();
    let test_pts = ds.side_points(Side::Test).unwrap();
    let enc = EncoderSpec::new(2, 1, 1, 3).unwrap();
    let dec = DecoderSpec::new(2, 1, 1, 3).unwrap();
    let betas = [0.0, 0.1, 0.2, 0.3, 0.5, 1.0, 1.5, 2.0];
    // (epochs, patience, maxfun, rho_begin)
    let configs = [(4usize, 4usize, 300usize, 0.5), (1, 1, 1000, 1.5), (8, 4, 250, 0.5)];
    for (ep, pat, mf, rb) in configs {
        println!("=== epochs {ep} patience {pat} maxfun {mf} rho_begin {rb} ===");
        let mut vol_means = vec![];
        let mut pcc_means = vec![];
        for &beta in &betas {
            let spec = ObjectiveSpec::new(
                LossKind::Fidelity,
                LossKind::Jsd,
                beta,
                ObjectiveMode::Instance,
            )
            .unwrap();
            let cfg = TrainConfig {
                epochs: ep,
                patience: pat,
                seeds: (1..=8).collect(),
                rho_begin: rb,
                rho_end: 1e-4,
                max_fun_per_epoch: mf,
            };
            let results = train(&enc, &dec, &spec, TrainData::Instance(&train_pts), &cfg).unwrap();
            let mut vols = vec![];
            let mut pccs = vec![];
            let mut objs = vec![];
            for r in &results {
                let (lat, _) = map_side(&enc, &dec, &r.params, &ds, Side::Test).unwrap();
                vols.push(latent_volume(&lat).unwrap());
                pccs.push(pairwise_fidelity_pcc(&test_pts, &lat).unwrap());
                objs.push(r.trace.best_objective / 200.0);
            }
            vol_means.push(mean(&vols));
            pcc_means.push(mean(&pccs));
            println!(
                "  beta={beta}: Vol={:.4} PCC={:.4} vols {:?} pccs {:?} obj/pt {:?} ({}s)",
                mean(&vols),
                mean(&pccs),
                vols.iter().map(|v| (v * 1e3).round() / 1e3).collect::<Vec<_>>(),
                pccs.iter().map(|v| (v * 1e3).round() / 1e3).collect::<Vec<_>>(),
                objs.iter().map(|v| (v * 1e4).round() / 1e4).collect::<Vec<_>>(),
                t0.elapsed().as_secs()
            );
        }
        let corr = pearson(&vol_means, &pcc_means);
        let pk = vol_means
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .unwrap()
            .0;
        println!(
            "  corr {corr:.4} peak idx {pk} rise {} fall {} seq {:?}",
            vol_means[pk] > vol_means[0] + 1e-9,
            vol_means[pk] > vol_means[7] + 1e-9,
            vol_means.iter().map(|v| (v * 1e3).round() / 1e3).collect::<Vec<_>>()
        );
    }
}
