//! Rewrites the bundled preset presentation files from their programmatic
//! definitions. Run after changing a preset:
//!
//!     cargo run -p susyva --example regenerate_presets

use susyva::modealg::{preset_presentation, PresetKind};

fn main() {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/presets");
    let files = [
        ("ns", preset_presentation(PresetKind::NeveuSchwarz, 1, true)),
        ("w1c", preset_presentation(PresetKind::WAlgebra, 1, true)),
        ("w2c", preset_presentation(PresetKind::WAlgebra, 2, true)),
        ("w3", preset_presentation(PresetKind::WAlgebra, 3, false)),
    ];
    for (name, pres) in files {
        let pres = pres.expect("preset construction");
        let path = format!("{dir}/{name}.json");
        std::fs::write(&path, pres.to_json()).expect("write preset file");
        println!("wrote {path}");
    }
}
