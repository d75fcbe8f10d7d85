//! Writes the reference inputs as JSON files into the directory given as the first argument.

use std::path::PathBuf;

use palinverse::fixtures::{reference_pairs, reference_update};
use palinverse::io::{pair_to_string, system_to_string};
use palinverse::numerics::from_real_rows;
use palinverse::system::{PalindromicSystem, SymmetryClass};

fn main() -> std::io::Result<()> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "data".into()));
    std::fs::create_dir_all(&dir)?;
    for class in SymmetryClass::ALL {
        let (x, t) = reference_pairs(class);
        std::fs::write(dir.join(format!("pairs_{}.json", class.tag())), pair_to_string(&x, Some(&t)))?;
        let case = reference_update(class);
        std::fs::write(dir.join(format!("system_{}.json", class.tag())), system_to_string(&case.system))?;
    }
    let scalar = PalindromicSystem::new(SymmetryClass::T_ANTI, from_real_rows(&[&[1.0]]), from_real_rows(&[&[0.0]]))
        .expect("valid scalar system");
    std::fs::write(dir.join("scalar_ta.json"), system_to_string(&scalar))?;
    Ok(())
}
