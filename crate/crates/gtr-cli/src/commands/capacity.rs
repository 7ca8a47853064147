use std::f64::consts::LOG2_E;
use std::time::SystemTime;

use gtr_fading::models::{Method, Statistic};
use gtr_fading::perf::{self, AsymptoticRegime};
use serde_json::json;

use super::{columns, points, reject_sweep_vars, stat_cells, sweep_json, Point};
use crate::args::{Asymptote, CapacityArgs, SweepVar};
use crate::error::{CliError, CliResult};
use crate::output::{Body, Cell, Emission, Table};

pub fn asymptote(kind: Asymptote, p: &Point) -> CliResult<f64> {
    let regime = match kind {
        Asymptote::Low => return Ok(perf::capacity_low_snr(&p.link()?)),
        Asymptote::Rice => AsymptoticRegime::RiceExact,
        Asymptote::Gtr => AsymptoticRegime::GtrExact,
        Asymptote::GtrApprox => AsymptoticRegime::GtrLargeKDelta,
        Asymptote::GtrDelta1 => AsymptoticRegime::GtrDeltaOne,
    };
    if p.branches != 1 {
        return Err(CliError::invalid("high-SNR asymptotes need branches = 1"));
    }
    Ok(perf::capacity_high_snr(&p.model()?, regime)?.at(p.gamma_bar))
}

/// High-SNR capacity loss against Rician fading with the same `K`.
pub fn loss(k: f64, delta: f64) -> CliResult<Statistic> {
    let value = perf::capacity_loss(k, delta)?;
    let error_estimate = if delta == 0.0 {
        0.0
    } else {
        LOG2_E * perf::j_integral(k, delta)?.error_estimate
    };
    Ok(Statistic {
        value,
        method: if delta == 0.0 { Method::ClosedForm } else { Method::Quadrature },
        error_estimate,
    })
}

pub fn run(a: CapacityArgs) -> CliResult<()> {
    let started = SystemTime::now();
    let sweep = a.sweep.as_ref();
    let base = Point::from_args(&a.model)?;
    let mut asym = a.asymptote.clone();
    asym.dedup();
    let table = if a.loss {
        reject_sweep_vars(sweep, &[SweepVar::KDb, SweepVar::Delta], "capacity --loss")?;
        if !asym.is_empty() {
            return Err(CliError::invalid("--loss does not combine with --asymptote"));
        }
        let mut t = Table::new(columns(sweep, &["value", "method", "error_estimate"]));
        for (x, p) in points(base, sweep)? {
            t.push(stat_cells(x, loss(p.k, p.delta)?));
        }
        t
    } else {
        reject_sweep_vars(
            sweep,
            &[SweepVar::SnrDb, SweepVar::KDb, SweepVar::Delta, SweepVar::P, SweepVar::Eta],
            "capacity",
        )?;
        let mut cols = vec!["value", "method", "error_estimate"];
        cols.extend(asym.iter().map(|k| k.column()));
        let mut t = Table::new(columns(sweep, &cols));
        for (x, p) in points(base, sweep)? {
            let mut row = stat_cells(x, perf::capacity_ora(&p.link()?)?);
            for &k in &asym {
                row.push(Cell::Num(asymptote(k, &p)?));
            }
            t.push(row);
        }
        t
    };
    let mut params = base.to_json();
    let obj = params.as_object_mut().unwrap();
    obj.insert("loss".into(), json!(a.loss));
    obj.insert("asymptote".into(), json!(asym));
    obj.insert("sweep".into(), sweep_json(sweep));
    crate::output::emit(
        Emission {
            command: "capacity".into(),
            parameters: params,
            seed: None,
            started,
            body: Body::Table(table),
        },
        a.output.format,
        a.output.out.as_deref(),
    )
}
