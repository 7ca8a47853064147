//! Figure data: one wide CSV, a gnuplot script and a manifest per figure.

use std::f64::consts::LOG2_E;
use std::time::SystemTime;

use gtr_fading::models::{self, PhaseDistribution};
use gtr_fading::perf::{self, Modulation};
use gtr_fading::specfun::gamma_upper_zero;
use serde_json::json;

use super::capacity::loss;
use super::Point;
use crate::args::{Asymptote, FigureArgs, Scale, SweepSpec, SweepVar};
use crate::error::{CliError, CliResult};
use crate::output::{sha256_hex, write_file, Body, Cell, Emission, OutputFile, Table};

pub const FIGURE_IDS: &[&str] = &["1a", "1", "3", "4", "5", "6", "7", "8"];

pub const TRUNCATION_SET: &[f64] = &[1.0, 0.5, 0.2, 0.1];
pub const ETA_SET: &[f64] = &[0.0, 2.0, 5.0, 10.0];

type Curve<'a> = (String, Box<dyn Fn(f64) -> CliResult<f64> + 'a>);

struct Figure<'a> {
    title: &'static str,
    x_label: &'static str,
    y_label: &'static str,
    sweep: SweepSpec,
    log_x: bool,
    log_y: bool,
    curves: Vec<Curve<'a>>,
}

fn point(k: f64, delta: f64, snr_db: f64) -> Point {
    Point {
        k,
        delta,
        gamma_bar: 10f64.powf(snr_db / 10.0),
        n0: 1.0,
        phase: PhaseDistribution::Uniform,
        branches: 1,
        r_norm: 1.0,
        gamma_norm: 1.0,
    }
}

fn cdf_curve<'a>(name: String, base: Point) -> Curve<'a> {
    (
        name,
        Box::new(move |x| {
            let m = base.model()?;
            Ok(models::envelope_cdf(m.radius_from_normalized(x), &m)?.value)
        }),
    )
}

fn sep_curve<'a>(name: String, base: Point) -> Curve<'a> {
    (
        name,
        Box::new(move |x| {
            let p = base.with(SweepVar::SnrDb, x)?;
            Ok(perf::sep(Modulation::Mqam { m: 16 }, &p.link()?)?.value)
        }),
    )
}

fn capacity_curve<'a>(name: String, base: Point) -> Curve<'a> {
    (
        name,
        Box::new(move |x| Ok(perf::capacity_ora(&base.with(SweepVar::SnrDb, x)?.link()?)?.value)),
    )
}

fn asymptote_curve<'a>(name: String, kind: Asymptote, base: Point) -> Curve<'a> {
    (
        name,
        Box::new(move |x| super::capacity::asymptote(kind, &base.with(SweepVar::SnrDb, x)?)),
    )
}

fn envelope_references<'a>(k_inf: f64) -> Vec<Curve<'a>> {
    vec![
        cdf_curve("rayleigh".into(), point(0.0, 0.0, 0.0)),
        cdf_curve("rician_K10".into(), point(10.0, 0.0, 0.0)),
        cdf_curve("two_ray".into(), point(k_inf, 1.0, 0.0)),
    ]
}

fn build<'a>(id: &str, k_inf: f64, n: usize) -> CliResult<Figure<'a>> {
    let sweep = |var, a, b, scale| SweepSpec::new(var, a, b, n, scale);
    let fig = match id {
        "1a" => {
            let mut curves = envelope_references(k_inf);
            for &p in TRUNCATION_SET {
                let mut b = point(k_inf, 1.0, 0.0);
                b.phase = PhaseDistribution::TruncatedUniform { p, phi: 0.0 };
                curves.push(cdf_curve(format!("p_{p}"), b));
            }
            Figure {
                title: "Truncated-phase envelope cdf",
                x_label: "r / sqrt(P_r)",
                y_label: "cdf",
                sweep: sweep(SweepVar::RNorm, 1e-2, 3.0, Scale::Log)?,
                log_x: true,
                log_y: true,
                curves,
            }
        }
        "1" => {
            let mut curves = envelope_references(k_inf);
            for &eta in ETA_SET {
                let mut b = point(k_inf, 1.0, 0.0);
                b.phase = PhaseDistribution::VonMises { eta, centered_at_pi: true };
                curves.push(cdf_curve(format!("eta_{eta}"), b));
            }
            Figure {
                title: "Von Mises-phase envelope cdf",
                x_label: "r / sqrt(P_r)",
                y_label: "cdf",
                sweep: sweep(SweepVar::RNorm, 1e-2, 3.0, Scale::Log)?,
                log_x: true,
                log_y: true,
                curves,
            }
        }
        "3" => {
            let mut curves = Vec::new();
            for &d in &[0.15, 1.0] {
                for &k in &[1.0, 10.0, 100.0] {
                    curves.push(sep_curve(format!("K{k}_delta{d}"), point(k, d, 0.0)));
                }
            }
            Figure {
                title: "16-QAM symbol error probability, single branch",
                x_label: "average SNR (dB)",
                y_label: "SEP",
                sweep: sweep(SweepVar::SnrDb, 0.0, 40.0, Scale::Linear)?,
                log_x: false,
                log_y: true,
                curves,
            }
        }
        "4" => {
            let mut curves = Vec::new();
            for &d in &[0.15, 1.0] {
                for &l in &[1usize, 2, 4] {
                    let mut b = point(10.0, d, 0.0);
                    b.branches = l;
                    curves.push(sep_curve(format!("L{l}_delta{d}"), b));
                }
            }
            Figure {
                title: "16-QAM symbol error probability with MRC, K = 10",
                x_label: "average SNR per branch (dB)",
                y_label: "SEP",
                sweep: sweep(SweepVar::SnrDb, 0.0, 30.0, Scale::Linear)?,
                log_x: false,
                log_y: true,
                curves,
            }
        }
        "5" => {
            let mut curves = Vec::new();
            for &d in &[0.15, 1.0] {
                for &l in &[1usize, 2, 4] {
                    let mut b = point(10.0, d, 0.0);
                    b.branches = l;
                    curves.push(capacity_curve(format!("L{l}_delta{d}"), b));
                }
            }
            Figure {
                title: "Ergodic capacity with MRC, K = 10",
                x_label: "average SNR per branch (dB)",
                y_label: "capacity (bit/s/Hz)",
                sweep: sweep(SweepVar::SnrDb, -10.0, 30.0, Scale::Linear)?,
                log_x: false,
                log_y: false,
                curves,
            }
        }
        "6" => {
            let mut curves = vec![capacity_curve("rayleigh".into(), point(0.0, 0.0, 0.0))];
            for &(k, d) in &[(10.0, 0.0), (10.0, 1.0), (100.0, 0.5), (100.0, 1.0)] {
                curves.push(capacity_curve(format!("K{k}_delta{d}"), point(k, d, 0.0)));
            }
            curves.push(asymptote_curve("asym_low".into(), Asymptote::Low, point(0.0, 0.0, 0.0)));
            Figure {
                title: "Low-SNR capacity",
                x_label: "average SNR (dB)",
                y_label: "capacity (bit/s/Hz)",
                sweep: sweep(SweepVar::SnrDb, -30.0, 0.0, Scale::Linear)?,
                log_x: false,
                log_y: true,
                curves,
            }
        }
        "7" => {
            let mut curves = Vec::new();
            for &d in &[0.0, 0.15, 0.5, 1.0] {
                let b = point(10.0, d, 0.0);
                curves.push(capacity_curve(format!("K10_delta{d}"), b));
                curves.push(asymptote_curve(format!("asym_K10_delta{d}"), Asymptote::Gtr, b));
            }
            Figure {
                title: "High-SNR capacity, K = 10",
                x_label: "average SNR (dB)",
                y_label: "capacity (bit/s/Hz)",
                sweep: sweep(SweepVar::SnrDb, 0.0, 40.0, Scale::Linear)?,
                log_x: false,
                log_y: false,
                curves,
            }
        }
        "8" => {
            let mut curves: Vec<Curve> = Vec::new();
            for &d in &[0.15, 0.5, 0.9, 1.0] {
                curves.push((
                    format!("exact_delta{d}"),
                    Box::new(move |x| Ok(loss(10f64.powf(x / 10.0), d)?.value)),
                ));
                curves.push((
                    format!("approx_delta{d}"),
                    Box::new(move |x| {
                        let k = 10f64.powf(x / 10.0);
                        let j = perf::j_integral_hankel(k, d)?;
                        Ok(LOG2_E * (gamma_upper_zero(k)? - perf::log_balance(d) - j))
                    }),
                ));
                curves.push((format!("kinf_delta{d}"), Box::new(move |_| Ok(-LOG2_E * perf::log_balance(d)))));
            }
            Figure {
                title: "High-SNR capacity loss against Rician fading",
                x_label: "K (dB)",
                y_label: "capacity loss (bit/s/Hz)",
                sweep: sweep(SweepVar::KDb, 0.0, 40.0, Scale::Linear)?,
                log_x: false,
                log_y: false,
                curves,
            }
        }
        other => {
            return Err(CliError::invalid(format!(
                "unknown figure '{other}'; expected one of {}",
                FIGURE_IDS.join(", ")
            )))
        }
    };
    Ok(fig)
}

fn gnuplot(fig: &Figure, id: &str, csv: &str, columns: usize) -> String {
    let mut s = String::new();
    s.push_str("set datafile separator ','\n");
    s.push_str("set key autotitle columnhead\n");
    s.push_str(&format!("set terminal pngcairo size 900,650\nset output 'fig_{id}.png'\n"));
    s.push_str(&format!("set title '{}'\n", fig.title));
    s.push_str(&format!("set xlabel '{}'\nset ylabel '{}'\n", fig.x_label, fig.y_label));
    if fig.log_x {
        s.push_str("set logscale x\n");
    }
    if fig.log_y {
        s.push_str("set logscale y\n");
    }
    s.push_str("set grid\n");
    s.push_str(&format!(
        "plot for [i=2:{columns}] '{csv}' using 1:i with lines title columnheader(i)\n"
    ));
    s
}

pub fn run(a: FigureArgs) -> CliResult<()> {
    let started = SystemTime::now();
    if !(a.k_inf > 0.0 && a.k_inf.is_finite()) {
        return Err(CliError::invalid(format!("k-inf must be finite and > 0, got {}", a.k_inf)));
    }
    let fig = build(&a.id, a.k_inf, a.points)?;
    let mut cols = vec![fig.sweep.variable.name().to_string()];
    cols.extend(fig.curves.iter().map(|(n, _)| n.clone()));
    let mut table = Table::new(cols);
    for x in fig.sweep.values() {
        let mut row = vec![Cell::Num(x)];
        for (_, f) in &fig.curves {
            row.push(Cell::Num(f(x)?));
        }
        table.push(row);
    }
    table.check_finite()?;

    std::fs::create_dir_all(&a.out_dir)
        .map_err(|e| CliError::io(&format!("cannot create {}", a.out_dir.display()), e))?;
    let csv_name = format!("fig_{}.csv", a.id);
    let gp_name = format!("fig_{}.gp", a.id);
    let csv = table.to_csv();
    let gp = gnuplot(&fig, &a.id, &csv_name, table.columns.len());
    let mut outputs = Vec::new();
    for (name, body) in [(&csv_name, &csv), (&gp_name, &gp)] {
        let path = a.out_dir.join(name);
        write_file(&path, body.as_bytes())?;
        outputs.push(OutputFile {
            path: path.display().to_string(),
            sha256: sha256_hex(body.as_bytes()),
        });
    }
    let digest = sha256_hex(
        outputs
            .iter()
            .map(|o| o.sha256.as_str())
            .collect::<Vec<_>>()
            .join("")
            .as_bytes(),
    );
    let em = Emission {
        command: format!("figure {}", a.id),
        parameters: json!({
            "id": a.id,
            "k_inf": a.k_inf,
            "points": a.points,
            "sweep": fig.sweep,
            "curves": table.columns[1..],
        }),
        seed: None,
        started,
        body: Body::Table(Table::default()),
    };
    let manifest = em.manifest(digest, outputs);
    let mut bytes = serde_json::to_vec_pretty(&manifest).expect("serializable manifest");
    bytes.push(b'\n');
    write_file(&a.out_dir.join(format!("fig_{}.manifest.json", a.id)), &bytes)?;
    Ok(())
}
