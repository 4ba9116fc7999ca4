//! Raw sample and tree dumps.

use ppdepth_core::branching::{grow_tree, DEFAULT_VERTEX_CAP};
use ppdepth_core::generators::sample_sample;
use ppdepth_core::io::{write_sample, write_tree};

use super::Context;
use crate::error::Result;
use crate::record::Report;

pub(super) fn run(ctx: &Context<'_>) -> Result<Report> {
    let cfg = ctx.config;
    let mut sink = ctx.sink();
    let mut files = Vec::new();
    for &n in &cfg.n_grid {
        let dumps = ctx.replicates(|rep| {
            let mut rng = ctx.stream(&[n as u64], rep);
            let s = sample_sample(n, &cfg.count, &cfg.disp, &mut rng)?;
            let mut buf = Vec::new();
            write_sample(&s, &mut buf)?;
            Ok((s.s_n(), buf))
        })?;
        for (rep, (s_n, buf)) in dumps.into_iter().enumerate() {
            sink.push(&[("n", n as f64)], Some(rep as u64), "s_n", s_n as f64, None);
            files.push((format!("{}_n{n}_r{rep}.ndjson", cfg.name), buf));
        }
    }
    if let Some(depth) = cfg.generations {
        let trees = ctx.replicates(|rep| {
            let mut rng = ctx.stream(&[u64::MAX - 1, depth as u64], rep);
            let t = grow_tree(&cfg.count, &cfg.disp, depth, &mut rng, DEFAULT_VERTEX_CAP)?;
            let mut buf = Vec::new();
            write_tree(&t, &mut buf)?;
            Ok((t.len(), buf))
        })?;
        for (rep, (len, buf)) in trees.into_iter().enumerate() {
            sink.push(&[], Some(rep as u64), "tree_vertices", len as f64, None);
            files.push((format!("{}_tree_r{rep}.jsonl", cfg.name), buf));
        }
    }
    Ok(Report {
        records: sink.records,
        checks: Vec::new(),
        files,
    })
}

#[cfg(test)]
mod tests {
    use crate::config::ExperimentConfig;
    use ppdepth_core::io::{read_sample, read_tree};

    #[test]
    fn dumps_read_back() {
        let c = ExperimentConfig::from_json(
            r#"{"name":"sim","experiment":"simulate","count":{"kind":"shifted_poisson","lambda":1.5},
                "disp":{"kind":"gaussian","mean":[0,0],"variance":[1,1]},
                "n_grid":[5],"replicates":2,"generations":3,"seed":2}"#,
        )
        .unwrap();
        let rep = crate::experiments::run(&c, 1).unwrap();
        assert_eq!(rep.files.len(), 4);
        let s = read_sample::<f64, _>(&rep.files[0].1[..]).unwrap();
        assert_eq!(s.n(), 5);
        assert_eq!(s.s_n() as f64, rep.records[0].value);
        let t = read_tree::<f64, _>(&rep.files[2].1[..]).unwrap();
        assert_eq!(t.len() as f64, rep.records[2].value);
    }
}
