use std::time::SystemTime;

use gtr_fading::mcsim::{self, McEstimate, SimConfig};
use gtr_fading::models;
use gtr_fading::perf::{self, Modulation};
use serde_json::{json, Map, Value};

use super::Point;
use crate::args::{McArgs, McCommand, DEFAULT_SEED};
use crate::error::{CliError, CliResult};
use crate::output::{Body, Emission};

fn estimate_fields(m: &mut Map<String, Value>, est: McEstimate, analytic: f64) {
    m.insert("n".into(), json!(est.n));
    m.insert("estimate".into(), json!(est.estimate));
    m.insert("std_error".into(), json!(est.std_error));
    m.insert("analytic".into(), json!(analytic));
    m.insert("z_score".into(), json!(est.z_score(analytic)));
}

pub fn run(cmd: McCommand) -> CliResult<()> {
    let started = SystemTime::now();
    let common: &McArgs = match &cmd {
        McCommand::Envelope { common, .. } | McCommand::Sep { common, .. } | McCommand::Capacity { common } => common,
    };
    let seed = common.seed.unwrap_or(DEFAULT_SEED);
    let cfg = SimConfig::new(common.samples, seed, common.workers)?;
    let point = Point::from_args(&common.model)?;
    let mut params = point.to_json();
    let obj = params.as_object_mut().unwrap();
    obj.insert("samples".into(), json!(cfg.n_samples));
    obj.insert("workers".into(), json!(cfg.workers));

    let mut report = Map::new();
    let kind = match &cmd {
        McCommand::Envelope { ks_grid, .. } => {
            if point.branches != 1 {
                return Err(CliError::invalid("mc envelope: branches must be 1"));
            }
            let model = point.model()?;
            let summary = mcsim::sample_envelope(&model, &cfg)?;
            let n = summary.n as f64;
            let power = summary.raw_moments[0];
            let var = (summary.raw_moments[2] - power * power).max(0.0);
            let est = McEstimate {
                estimate: power,
                std_error: (var / n).sqrt(),
                n: summary.n,
            };
            let analytic = models::mean_snr(&model)?.value * model.n0();
            estimate_fields(&mut report, est, analytic);
            report.insert("quantity".into(), json!("mean_power"));
            let ks = mcsim::ks_distance(
                &summary,
                |r| Ok(models::envelope_cdf(r, &model)?.value),
                *ks_grid,
            )?;
            report.insert("ks_distance".into(), json!(ks));
            report.insert("ks_grid".into(), json!(ks_grid));
            report.insert("envelope_mean".into(), json!(summary.mean));
            report.insert("envelope_variance".into(), json!(summary.variance));
            obj.insert("ks_grid".into(), json!(ks_grid));
            "envelope"
        }
        McCommand::Sep { modulation, order, .. } => {
            let modulation = Modulation::from_name(modulation, *order)?;
            let link = point.link()?;
            let analytic = perf::sep(modulation, &link)?.value;
            let est = mcsim::mc_sep(modulation, &link, &cfg)?;
            estimate_fields(&mut report, est, analytic);
            report.insert("quantity".into(), json!("sep"));
            report.insert("modulation".into(), json!(modulation.to_string()));
            obj.insert("modulation".into(), json!(modulation.name()));
            obj.insert("order".into(), json!(modulation.order()));
            "sep"
        }
        McCommand::Capacity { .. } => {
            let link = point.link()?;
            let analytic = perf::capacity_ora(&link)?.value;
            let est = mcsim::mc_capacity(&link, &cfg)?;
            estimate_fields(&mut report, est, analytic);
            report.insert("quantity".into(), json!("capacity"));
            "capacity"
        }
    };
    report.insert("kind".into(), json!(kind));
    report.insert("seed".into(), json!(seed));
    let out = common.out.clone();
    crate::output::emit(
        Emission {
            command: format!("mc {kind}"),
            parameters: params,
            seed: Some(seed),
            started,
            body: Body::Report(report),
        },
        crate::args::Format::Json,
        out.as_deref(),
    )
}
