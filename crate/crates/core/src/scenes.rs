//! Built-in scene registry and scene lookup.
//!
//! Built-ins are ordinary scene files compiled into the library; the
//! annotated sources double as format examples
//! (`pathline scenes --show S1`).

use std::path::{Path, PathBuf};

use crate::fields::TwoPhaseScene;
use crate::scenelang::compile_str;
use crate::{Error, Result};

/// Environment variable with extra directories searched for scene files.
pub const SCENE_PATH_VAR: &str = "PATHLINE_SCENE_PATH";

#[derive(Debug, Clone, Copy)]
pub struct BuiltinScene {
    pub name: &'static str,
    pub summary: &'static str,
    pub source: &'static str,
}

macro_rules! builtin_scene {
    ($name:literal, $summary:literal) => {
        BuiltinScene {
            name: $name,
            summary: $summary,
            source: include_str!(concat!("../scenes/", $name, ".scene")),
        }
    };
}

pub const BUILTINS: &[BuiltinScene] = &[
    builtin_scene!("S0", "uniform flow, no interface in the path"),
    builtin_scene!("S1", "moving plane, phase change at t = 1.25"),
    builtin_scene!("S2", "expanding circle, radial flow"),
    builtin_scene!("S3", "rotating ellipse, grazing everywhere"),
    builtin_scene!("S4-noslip", "defect: tangential velocity jump"),
    builtin_scene!("S4-transmission", "defect: mass flux jump"),
    builtin_scene!("S4-transversality", "defect: opposite relative normal speeds"),
    builtin_scene!("S4-growth", "defect: superlinear growth"),
    builtin_scene!("S5", "expanding sphere in three dimensions"),
];

/// Names of the scenes that satisfy every interface condition.
pub const VALID_BUILTINS: &[&str] = &["S0", "S1", "S2", "S3", "S5"];

pub fn builtin_source(name: &str) -> Option<&'static str> {
    BUILTINS.iter().find(|s| s.name == name).map(|s| s.source)
}

/// Compiles a built-in scene by name.
pub fn builtin(name: &str) -> Result<TwoPhaseScene> {
    let src = builtin_source(name).ok_or_else(|| {
        let known: Vec<&str> = BUILTINS.iter().map(|s| s.name).collect();
        Error::InvalidInput(format!("unknown built-in scene `{name}` (known: {})", known.join(", ")))
    })?;
    compile_str(src)
}

/// Resolves `builtin:NAME`, a path, a file name found on
/// `PATHLINE_SCENE_PATH`, or a bare built-in name, and returns the scene
/// source.
pub fn load_source(spec: &str) -> Result<String> {
    if let Some(name) = spec.strip_prefix("builtin:") {
        return builtin_source(name)
            .map(str::to_string)
            .ok_or_else(|| Error::InvalidInput(format!("unknown built-in scene `{name}`")));
    }
    match find_scene_file(spec) {
        Some(path) => Ok(std::fs::read_to_string(path)?),
        None => builtin_source(spec)
            .map(str::to_string)
            .ok_or_else(|| Error::Io(format!("scene file `{spec}` not found"))),
    }
}

/// Loads and compiles a scene from a `--scene` argument.
pub fn resolve(spec: &str) -> Result<TwoPhaseScene> {
    compile_str(&load_source(spec)?)
}

fn find_scene_file(spec: &str) -> Option<PathBuf> {
    let direct = Path::new(spec);
    if direct.is_file() {
        return Some(direct.to_path_buf());
    }
    let dirs = std::env::var_os(SCENE_PATH_VAR)?;
    std::env::split_paths(&dirs).find_map(|dir| {
        [dir.join(spec), dir.join(format!("{spec}.scene"))].into_iter().find(|p| p.is_file())
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_builtins_compile() {
        for s in BUILTINS {
            let scene = builtin(s.name).unwrap_or_else(|e| panic!("{}: {e}", s.name));
            assert_eq!(scene.name, s.name);
        }
        assert_eq!(builtin("S5").unwrap().dim(), 3);
        assert!(builtin("S9").is_err());
    }

    #[test]
    fn resolves_files_and_builtins() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("plane.scene");
        std::fs::write(&path, builtin_source("S1").unwrap()).unwrap();
        assert_eq!(resolve(path.to_str().unwrap()).unwrap().name, "S1");
        assert_eq!(resolve("builtin:S2").unwrap().name, "S2");
        assert!(matches!(resolve("no/such/file.scene"), Err(Error::Io(_))));
    }
}
