//! Keeps the committed model files in lockstep with the built-in
//! constructors. If these fail after an intentional change, refresh the
//! files with `cargo test -p vmdp --test bundled_files -- --ignored`.

use std::path::PathBuf;

use vmdp::VmdpModel;

fn models_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../models")
}

fn bundled() -> [(&'static str, VmdpModel); 2] {
    [
        ("counterexample.json", VmdpModel::counterexample()),
        ("deterministic.json", VmdpModel::deterministic_variant()),
    ]
}

#[test]
fn committed_model_files_match_the_builtins() {
    for (name, model) in bundled() {
        let path = models_dir().join(name);
        let text = std::fs::read_to_string(&path)
            .unwrap_or_else(|e| panic!("{} must be committed: {e}", path.display()));
        assert_eq!(text, model.to_json_string(), "{name} drifted from its builtin");
        let reloaded = VmdpModel::from_path(&path).unwrap();
        assert_eq!(reloaded, model, "{name} must round-trip to the builtin");
        assert!(reloaded.validate().is_ok());
    }
}

#[test]
#[ignore = "writes the committed model files; run explicitly after changing the builtins"]
fn regenerate_committed_model_files() {
    std::fs::create_dir_all(models_dir()).unwrap();
    for (name, model) in bundled() {
        model.save_to_path(models_dir().join(name)).unwrap();
    }
}
