use std::path::PathBuf;

use edgecoh::config::{Config, TimeGrid};
use edgecoh::models::ChainModel;
use edgecoh::sweep::{run_sweep, SweepPlan};

fn recipes() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../recipes")
}

#[test]
fn shipped_recipes_load() {
    for name in ["fig1c", "fig1d", "fig1e", "fig2", "fig3", "figS1", "figS2"] {
        let c = Config::load(&recipes().join(format!("{name}.json"))).unwrap_or_else(|e| panic!("{name}: {e}"));
        for p in SweepPlan::from_config(&c) {
            p.validate().unwrap_or_else(|e| panic!("{name}: {e}"));
        }
    }
}

#[test]
fn summary_identical_across_worker_counts() {
    let c = Config::load(&recipes().join("fig3.json")).unwrap();
    let mut plan = SweepPlan::from_config(&c).remove(0);
    plan.model = ChainModel::zxz(8, 1.0, 1.0, 0.05, 0.05);
    plan.run.times = TimeGrid { t_min: 0.1, t_max: 1e6, points: 120 };
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for workers in [1, 4] {
        plan.output = Some(dir.path().join(format!("w{workers}")));
        run_sweep(&plan, workers).unwrap();
        outputs.push(std::fs::read(dir.path().join(format!("w{workers}/summary.csv"))).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    let text = String::from_utf8(outputs.remove(0)).unwrap();
    assert_eq!(text.lines().count(), plan.grid.len() + 1);
}

#[test]
fn pole_point_does_not_abort() {
    let mut plan = SweepPlan::from_config(&Config::load(&recipes().join("fig3.json")).unwrap()).remove(0);
    plan.model = ChainModel::zxz(6, 1.0, 1.0, 0.05, 0.05);
    plan.axis = "L".into();
    plan.grid = vec![6.0, 5.0, 8.0];
    plan.output = None;
    plan.run.times = TimeGrid { t_min: 0.1, t_max: 10.0, points: 10 };
    let r = run_sweep(&plan, 2).unwrap();
    assert!(r.records[0].error.is_none() && r.records[2].error.is_none());
    assert!(r.records[1].error.as_deref().unwrap().contains('5'));
}

#[test]
fn schema_lists_every_config_key() {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../schema/config.schema.json");
    let schema: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    let keys = |v: &serde_json::Value| {
        let mut k: Vec<String> = v.as_object().unwrap().keys().cloned().collect();
        k.sort();
        k
    };
    let mut c = Config::load(&recipes().join("fig1e.json")).unwrap();
    c.sweep = vec![edgecoh::config::Scan { axis: "L".into(), grid: vec![8.0], name: Some("size".into()) }];
    let v = serde_json::to_value(&c).unwrap();
    assert_eq!(keys(&v), keys(&schema["properties"]));
    for block in ["run", "output"] {
        assert_eq!(keys(&v[block]), keys(&schema["$defs"][block]["properties"]), "{block}");
    }
    assert_eq!(keys(&v["run"]["times"]), keys(&schema["$defs"]["run"]["properties"]["times"]["properties"]));
    assert_eq!(keys(&v["sweep"][0]), keys(&schema["$defs"]["scan"]["properties"]));
    let mut model = keys(&v["model"]);
    model.push("options".into());
    model.sort();
    assert_eq!(model, keys(&schema["$defs"]["model"]["properties"]));
}
