use std::time::SystemTime;

use gtr_fading::models::{self, MobilityConfig, Statistic};
use serde_json::json;

use super::{columns, points, reject_sweep_vars, stat_cells, sweep_json, Point};
use crate::args::{Quantity, StatsArgs, SweepVar};
use crate::error::{CliError, CliResult};
use crate::output::{Body, Emission, Table};

pub fn evaluate(q: Quantity, p: &Point, s: f64, order: u32, fd: f64) -> CliResult<Statistic> {
    let model = p.model()?;
    let r = || model.radius_from_normalized(p.r_norm);
    let mobility = || MobilityConfig::new(fd);
    Ok(match q {
        Quantity::Pdf => models::envelope_pdf(r(), &model)?,
        Quantity::Cdf => models::envelope_cdf(r(), &model)?,
        Quantity::SnrPdf => models::snr_pdf(p.gamma_norm * model.gamma_bar(), &model)?,
        Quantity::Mgf => models::mgf(s, &model)?,
        Quantity::Moment => models::moment(order, &model)?,
        Quantity::Aof => models::amount_of_fading(&model)?,
        Quantity::Lcr => models::level_crossing_rate(r(), &model, &mobility()?)?,
        Quantity::Aod => models::average_outage_duration(r(), &model, &mobility()?)?,
        Quantity::MeanSnr => models::mean_snr(&model)?,
    })
}

fn allowed_sweeps(q: Quantity) -> Vec<SweepVar> {
    let mut v = vec![SweepVar::SnrDb, SweepVar::KDb, SweepVar::Delta, SweepVar::P, SweepVar::Eta];
    match q {
        Quantity::Pdf | Quantity::Cdf | Quantity::Lcr | Quantity::Aod => v.push(SweepVar::RNorm),
        Quantity::SnrPdf => v.push(SweepVar::GammaNorm),
        _ => {}
    }
    v
}

pub fn run(a: StatsArgs) -> CliResult<()> {
    let started = SystemTime::now();
    let sweep = a.sweep.as_ref();
    let q = a.quantity;
    let qname = serde_json::to_value(q).unwrap();
    reject_sweep_vars(sweep, &allowed_sweeps(q), &format!("stats --quantity {}", qname.as_str().unwrap()))?;
    let mut base = Point::from_args(&a.model)?;
    if base.branches != 1 {
        return Err(CliError::invalid("stats: branches must be 1; diversity applies to sep, capacity and mc"));
    }
    base.r_norm = a.r_norm;
    base.gamma_norm = a.gamma_norm;
    let mut table = Table::new(columns(sweep, &["value", "method", "error_estimate"]));
    for (x, p) in points(base, sweep)? {
        table.push(stat_cells(x, evaluate(q, &p, a.s, a.order, a.fd)?));
    }
    let mut params = base.to_json();
    let obj = params.as_object_mut().unwrap();
    obj.insert("quantity".into(), qname);
    match q {
        Quantity::Pdf | Quantity::Cdf => {
            obj.insert("r_norm".into(), json!(a.r_norm));
        }
        Quantity::Lcr | Quantity::Aod => {
            obj.insert("r_norm".into(), json!(a.r_norm));
            obj.insert("fd".into(), json!(a.fd));
        }
        Quantity::SnrPdf => {
            obj.insert("gamma_norm".into(), json!(a.gamma_norm));
        }
        Quantity::Mgf => {
            obj.insert("s".into(), json!(a.s));
        }
        Quantity::Moment => {
            obj.insert("order".into(), json!(a.order));
        }
        _ => {}
    }
    obj.insert("sweep".into(), sweep_json(sweep));
    crate::output::emit(
        Emission {
            command: "stats".into(),
            parameters: params,
            seed: None,
            started,
            body: Body::Table(table),
        },
        a.output.format,
        a.output.out.as_deref(),
    )
}
