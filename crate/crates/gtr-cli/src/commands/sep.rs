use std::time::SystemTime;

use gtr_fading::perf::{self, Modulation};
use serde_json::json;

use super::{columns, points, reject_sweep_vars, stat_cells, sweep_json, Point};
use crate::args::{SepArgs, SweepVar};
use crate::error::CliResult;
use crate::output::{Body, Emission, Table};

pub fn run(a: SepArgs) -> CliResult<()> {
    let started = SystemTime::now();
    let sweep = a.sweep.as_ref();
    reject_sweep_vars(
        sweep,
        &[SweepVar::SnrDb, SweepVar::KDb, SweepVar::Delta, SweepVar::P, SweepVar::Eta],
        "sep",
    )?;
    let modulation = Modulation::from_name(&a.modulation, a.order)?;
    let base = Point::from_args(&a.model)?;
    let mut table = Table::new(columns(sweep, &["value", "method", "error_estimate"]));
    for (x, p) in points(base, sweep)? {
        table.push(stat_cells(x, perf::sep(modulation, &p.link()?)?));
    }
    let mut params = base.to_json();
    let obj = params.as_object_mut().unwrap();
    obj.insert("modulation".into(), json!(modulation.name()));
    obj.insert("order".into(), json!(modulation.order()));
    obj.insert("sweep".into(), sweep_json(sweep));
    crate::output::emit(
        Emission {
            command: "sep".into(),
            parameters: params,
            seed: None,
            started,
            body: Body::Table(table),
        },
        a.output.format,
        a.output.out.as_deref(),
    )
}
