//! Interface-condition reports for every built-in scene.
//!
//! cargo run --example validate_scene

use pathline::fields::{validate_scene, ValidationGrid};
use pathline::scenes::{builtin, BUILTINS};

fn main() -> pathline::Result<()> {
    for s in BUILTINS {
        let report = validate_scene(&builtin(s.name)?, &ValidationGrid::default());
        println!("{report}\n");
    }
    Ok(())
}
