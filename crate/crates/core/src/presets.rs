//! Named game + class instances. Most ship as JSON data files; the
//! threshold grid is generated for any resolution (`threshold-grid:<r>`).

use crate::error::{Error, Result};
use crate::game::{GameSpec, StackelbergGame};
use crate::hypothesis::{grid_threshold_class, ClassSpec, HypothesisClass};
use serde::{Deserialize, Serialize};

const SHIPPED: &[(&str, &str)] = &[
    ("perm2", include_str!("../presets/perm2.json")),
    ("perm3", include_str!("../presets/perm3.json")),
    ("perm4", include_str!("../presets/perm4.json")),
    ("perm5", include_str!("../presets/perm5.json")),
    ("soa-example", include_str!("../presets/soa-example.json")),
    ("table3a", include_str!("../presets/table3a.json")),
    ("greedy-gap", include_str!("../presets/greedy-gap.json")),
];

#[derive(Debug, Clone, PartialEq)]
pub struct Preset {
    pub name: String,
    pub game: StackelbergGame,
    pub class: HypothesisClass,
}

#[derive(Serialize, Deserialize)]
struct PresetFile {
    game: GameSpec,
    class: ClassSpec,
}

impl Preset {
    pub fn from_json(name: &str, text: &str) -> Result<Self> {
        let file: PresetFile = serde_json::from_str(text).map_err(|e| Error::Parse(format!("{name}: {e}")))?;
        let game = StackelbergGame::from_spec(file.game)?;
        let class = HypothesisClass::new(file.class.contexts, file.class.num_types, file.class.hypotheses)?;
        class.check_compatible(&game)?;
        Ok(Self { name: name.to_string(), game, class })
    }

    pub fn to_json(&self) -> String {
        let class = ClassSpec {
            contexts: self.class.contexts().to_vec(),
            num_types: self.class.num_types(),
            hypotheses: self.class.hypotheses().to_vec(),
        };
        let file = PresetFile { game: self.game.to_spec(), class };
        serde_json::to_string_pretty(&file).expect("preset serializes")
    }
}

/// Names of the data-file presets (the grid is listed separately).
pub fn shipped_names() -> Vec<&'static str> {
    SHIPPED.iter().map(|(n, _)| *n).collect()
}

pub fn load_preset(name: &str) -> Result<Preset> {
    if let Some(r) = name.strip_prefix("threshold-grid:") {
        let r: usize = r.parse().map_err(|_| Error::Parse(format!("bad grid resolution in `{name}`")))?;
        let (class, game) = grid_threshold_class(r)?;
        return Ok(Preset { name: name.to_string(), game, class });
    }
    let (_, text) = SHIPPED
        .iter()
        .find(|(n, _)| *n == name)
        .ok_or_else(|| Error::InvalidInput(format!("unknown preset `{name}`")))?;
    Preset::from_json(name, text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypothesis::{permutation_class, permutation_game, soa_example_class};

    #[test]
    fn every_preset_round_trips() {
        let mut names: Vec<String> = shipped_names().into_iter().map(String::from).collect();
        names.push("threshold-grid:4".into());
        for name in names {
            let p = load_preset(&name).unwrap();
            let back = Preset::from_json(&name, &p.to_json()).unwrap();
            assert_eq!(back, p, "{name}");
        }
    }

    #[test]
    fn data_files_match_constructors() {
        for n in 2..=5 {
            let p = load_preset(&format!("perm{n}")).unwrap();
            assert_eq!(p.game, permutation_game(n).unwrap());
            assert_eq!(p.class, permutation_class(n).unwrap());
        }
        let (c, g) = soa_example_class();
        let p = load_preset("soa-example").unwrap();
        assert_eq!((p.class, p.game), (c, g));
    }

    #[test]
    fn unknown_names_fail() {
        assert!(load_preset("perm9").is_err());
        assert!(load_preset("threshold-grid:x").is_err());
    }
}
