//! One pipeline per subcommand. Each computes everything first and only then
//! hands finished files to the writer.

use serde::Serialize;
use xtalk_core::analysis::{self, SweepTarget};
use xtalk_core::dataset::{iris_binary, Dataset};
use xtalk_core::defense::{canary_check, containment_compare, ContainmentProbe};
use xtalk_core::dynamics::victim_channel;
use xtalk_core::protocols::{self, coin_flip_p1, xor_delta_max, xor_probs, ScenarioTiming};
use xtalk_core::tomo::{chi_from_choi, kraus_from_chi};
use xtalk_core::{Channel, Record};

use crate::config::RunConfig;
use crate::output::{matrix_pairs, num, Writer};
use crate::svg::{self, Grid, Metric, PlotKind, Series};
use crate::{load_dataset, CliError, Command};

type Out = Result<(), CliError>;

pub fn dispatch(cmd: Command, cfg: &RunConfig, w: &mut Writer) -> Out {
    match cmd {
        Command::Scan => scan(cfg, w),
        Command::Qpt => qpt(cfg, w),
        Command::Fit => fit(cfg, w),
        Command::Coin => coin(cfg, w),
        Command::Xor => xor(cfg, w),
        Command::Sqqnn => sqqnn(cfg, w),
        Command::Sweep => sweep(cfg, w),
        Command::Detuning => detuning(cfg, w),
        Command::Detect => detect(cfg, w),
        Command::Contain => contain(cfg, w),
    }
}

fn channel(cfg: &RunConfig) -> Result<Channel, CliError> {
    Ok(victim_channel(&cfg.attack())?)
}

fn dataset(cfg: &RunConfig) -> Result<Dataset<f64>, CliError> {
    match &cfg.protocol.dataset {
        Some(p) => load_dataset(std::path::Path::new(p)),
        None => Ok(iris_binary()),
    }
}

fn lambdas_rad(cfg: &RunConfig) -> Vec<(f64, f64)> {
    cfg.protocol.lambda_grid_deg.degrees().into_iter().map(|d| (d, d.to_radians())).collect()
}

fn record_rows(records: &[Record]) -> Vec<Vec<String>> {
    let opt = |x: Option<f64>| x.map_or_else(String::new, num);
    records
        .iter()
        .map(|r| {
            vec![
                r.config_id.clone(),
                r.swept_name.clone(),
                num(r.swept_value),
                opt(r.theta),
                opt(r.loss),
                r.converged.to_string(),
            ]
        })
        .collect()
}

const RECORD_HEADER: [&str; 6] = ["config_id", "swept_name", "swept_value", "theta", "loss", "converged"];

fn scan(cfg: &RunConfig, w: &mut Writer) -> Out {
    let a = &cfg.analysis;
    let rows = analysis::coupling_scan(&a.scan_couplings, &a.scan_shapes, &cfg.attack())?;
    let csv = rows
        .iter()
        .map(|r| vec![r.coupling.to_string(), r.shape.name().to_string(), num(r.influence_norm)])
        .collect();
    w.csv("scan.csv", &["coupling", "shape", "influence_norm"], csv);
    if cfg.output.emit_svg {
        let values = a
            .scan_couplings
            .iter()
            .map(|c| {
                a.scan_shapes
                    .iter()
                    .map(|s| rows.iter().find(|r| r.coupling == *c && r.shape == *s).map_or(f64::NAN, |r| r.influence_norm))
                    .collect()
            })
            .collect();
        let grid = Grid {
            x_labels: a.scan_shapes.iter().map(|s| s.name().to_string()).collect(),
            y_labels: a.scan_couplings.iter().map(|c| c.to_string()).collect(),
            values,
        };
        w.svg("scan.svg", svg::heatmap("Influence norm", "q0 pulse shape", "coupling", &grid));
    }
    Ok(())
}

#[derive(Serialize)]
struct QptResult {
    choi: Vec<Vec<[f64; 2]>>,
    chi: Vec<Vec<[f64; 2]>>,
    kraus: Vec<Vec<Vec<[f64; 2]>>>,
    clip_magnitude: f64,
    trace_preservation_error: f64,
}

fn qpt(cfg: &RunConfig, w: &mut Writer) -> Out {
    let ch = channel(cfg)?;
    let chi = chi_from_choi(&ch);
    let kraus = kraus_from_chi(&chi)?;
    w.json(
        "qpt.json",
        QptResult {
            choi: matrix_pairs(ch.choi()),
            chi: matrix_pairs(chi.matrix()),
            kraus: kraus.ops().iter().map(matrix_pairs).collect(),
            clip_magnitude: ch.clip_magnitude(),
            trace_preservation_error: ch.trace_preservation_error(),
        },
    );
    Ok(())
}

#[derive(Serialize)]
struct FitJson {
    theta: f64,
    loss: f64,
    iso: Vec<Vec<[f64; 2]>>,
    iterations: usize,
    converged: bool,
}

fn fit(cfg: &RunConfig, w: &mut Writer) -> Out {
    let f = analysis::characterize(&cfg.attack())?;
    w.json(
        "fit.json",
        FitJson {
            theta: f.theta,
            loss: f.loss,
            iso: matrix_pairs(&f.iso),
            iterations: f.iterations,
            converged: f.converged,
        },
    );
    Ok(())
}

fn coin(cfg: &RunConfig, w: &mut Writer) -> Out {
    let timing = cfg.protocol.timing;
    let ch = channel(cfg)?;
    let mut rows = Vec::new();
    let mut ideal = Vec::new();
    let mut hit = Vec::new();
    for (deg, rad) in lambdas_rad(cfg) {
        let p_ideal = coin_flip_p1(rad, ScenarioTiming::NoAttack, None)?;
        let p_hit = coin_flip_p1(rad, timing, Some(&ch))?;
        rows.push(vec![num(deg), num(p_ideal), num(p_hit)]);
        ideal.push((deg, p_ideal));
        hit.push((deg, p_hit));
    }
    w.csv("coin.csv", &["lambda_deg", "p1_ideal", "p1_attacked"], rows);
    if cfg.output.emit_svg {
        let series = [
            Series {
                label: "ideal".into(),
                points: ideal,
            },
            Series {
                label: timing.name().into(),
                points: hit,
            },
        ];
        w.svg("coin.svg", svg::line_chart("Coin flip", "lambda (deg)", "P(1)", &series));
    }
    Ok(())
}

#[derive(Serialize)]
struct XorRow {
    x1: u8,
    x2: u8,
    expected: u8,
    p0: f64,
    p1: f64,
}

#[derive(Serialize)]
struct XorTiming {
    timing: ScenarioTiming,
    delta_max: f64,
    table: Vec<XorRow>,
}

fn xor(cfg: &RunConfig, w: &mut Writer) -> Out {
    let ch = channel(cfg)?;
    let mut out = Vec::new();
    for timing in ScenarioTiming::ALL {
        let chan = (timing != ScenarioTiming::NoAttack).then_some(&ch);
        let mut table = Vec::new();
        for (x1, x2) in [(0u8, 0u8), (0, 1), (1, 0), (1, 1)] {
            let (p0, p1) = xor_probs(x1, x2, timing, chan)?;
            table.push(XorRow {
                x1,
                x2,
                expected: x1 ^ x2,
                p0,
                p1,
            });
        }
        out.push(XorTiming {
            timing,
            delta_max: xor_delta_max(timing, chan)?,
            table,
        });
    }
    w.json("xor.json", out);
    Ok(())
}

#[derive(Serialize)]
struct SqqnnJson {
    train_size: usize,
    test_size: usize,
    coefficients: Vec<f64>,
    accuracy_no_attack: f64,
    accuracy_attacker_first: f64,
    accuracy_victim_first: f64,
    grid_amplitudes: Vec<f64>,
    /// Attacker-first accuracy, rows A0, columns A1.
    grid_accuracy: Vec<Vec<f64>>,
}

fn sqqnn(cfg: &RunConfig, w: &mut Writer) -> Out {
    let p = &cfg.protocol;
    let data = dataset(cfg)?;
    let (train, test) = protocols::split_dataset(&data, p.test_fraction, p.split_seed)?;
    let model = protocols::sqqnn_train(&train.features, &train.labels, p.sqqnn_degree, p.sqqnn_epsilon)?;
    let acc = |t: ScenarioTiming, ch: Option<&Channel>| protocols::sqqnn_accuracy(&model, &test.features, &test.labels, t, ch);
    let ch = channel(cfg)?;
    let clean = acc(ScenarioTiming::NoAttack, None)?;
    let af = acc(ScenarioTiming::AttackerFirst, Some(&ch))?;
    let vf = acc(ScenarioTiming::VictimFirst, Some(&ch))?;

    let amps = p.accuracy_grid.clone();
    let mut grid = Vec::new();
    for &a0 in &amps {
        let mut row = Vec::new();
        for &a1 in &amps {
            let mut attack = cfg.attack();
            attack.pulse_q0.amplitude = a0;
            attack.pulse_q1.amplitude = a1;
            let c = victim_channel(&attack)?;
            row.push(acc(ScenarioTiming::AttackerFirst, Some(&c))?);
        }
        grid.push(row);
    }
    if cfg.output.emit_svg {
        let labels: Vec<String> = amps.iter().map(|a| format!("{a}")).collect();
        let g = Grid {
            x_labels: labels.clone(),
            y_labels: labels,
            values: grid.clone(),
        };
        w.svg("sqqnn.svg", svg::heatmap("Attacker-first accuracy", "A1", "A0", &g));
    }
    w.json(
        "sqqnn.json",
        SqqnnJson {
            train_size: train.len(),
            test_size: test.len(),
            coefficients: model.coefficients.clone(),
            accuracy_no_attack: clean,
            accuracy_attacker_first: af,
            accuracy_victim_first: vf,
            grid_amplitudes: amps,
            grid_accuracy: grid,
        },
    );
    Ok(())
}

fn sweep_targets(cfg: &RunConfig) -> Vec<SweepTarget> {
    match cfg.analysis.sweep_target {
        Some(t) => vec![t],
        None => vec![SweepTarget::Catalyst, SweepTarget::Driver],
    }
}

fn sweep(cfg: &RunConfig, w: &mut Writer) -> Out {
    let base = cfg.attack();
    let mut records = Vec::new();
    for t in sweep_targets(cfg) {
        records.extend(analysis::amplitude_sweep(t, &cfg.analysis.amplitude_grid, &base)?);
    }
    w.csv("sweep.csv", &RECORD_HEADER, record_rows(&records));
    if cfg.output.emit_svg {
        w.svg("sweep_theta.svg", svg::render_records(&records, PlotKind::Line, Metric::Theta, "Fitted angle vs amplitude"));
        w.svg("sweep_loss.svg", svg::render_records(&records, PlotKind::Line, Metric::Loss, "Fit loss vs amplitude"));
    }
    Ok(())
}

fn detuning(cfg: &RunConfig, w: &mut Writer) -> Out {
    let base = cfg.attack();
    let deltas = cfg.analysis.detuning_grid.values();
    let mut records = Vec::new();
    let mut summary = Vec::new();
    for &shape in &cfg.analysis.detuning_shapes {
        let rep = analysis::detuning_variance(shape, &deltas, &base)?;
        summary.push(vec![shape.name().to_string(), num(rep.var_theta), num(rep.var_loss)]);
        records.extend(rep.records);
    }
    w.csv("detuning.csv", &RECORD_HEADER, record_rows(&records));
    w.csv("detuning_summary.csv", &["shape", "var_theta", "var_loss"], summary);
    if cfg.output.emit_svg {
        w.svg("detuning_loss.svg", svg::render_records(&records, PlotKind::Line, Metric::Loss, "Fit loss vs detuning"));
    }
    Ok(())
}

fn detect(cfg: &RunConfig, w: &mut Writer) -> Out {
    let d = &cfg.defense;
    let ch = channel(cfg)?;
    let rep = canary_check(d.shots, d.seed, d.threshold, Some(&ch), cfg.protocol.timing)?;
    w.json("detect.json", rep);
    Ok(())
}

fn contain(cfg: &RunConfig, w: &mut Writer) -> Out {
    let ch = channel(cfg)?;
    let lambdas: Vec<f64> = lambdas_rad(cfg).into_iter().map(|(_, r)| r).collect();
    let coin = containment_compare(&ch, &ContainmentProbe::Coin { lambdas: &lambdas })?;
    let p = &cfg.protocol;
    let data = dataset(cfg)?;
    let (train, test) = protocols::split_dataset(&data, p.test_fraction, p.split_seed)?;
    let model = protocols::sqqnn_train(&train.features, &train.labels, p.sqqnn_degree, p.sqqnn_epsilon)?;
    let sq = containment_compare(
        &ch,
        &ContainmentProbe::Sqqnn {
            model: &model,
            features: &test.features,
            labels: &test.labels,
        },
    )?;
    w.json("contain.json", [coin, sq]);
    Ok(())
}
