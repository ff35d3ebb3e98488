//! Writes every fixture set into a temporary directory and checks the
//! recorded expectations against fresh measurements.

use polyrig::fixtures::{self, FIXTURE_NAMES};
use polyrig::DEFAULT_TOL;

fn main() -> polyrig::Result<()> {
    let root = std::env::temp_dir().join("polyrig-fixtures");
    for name in FIXTURE_NAMES {
        let dir = root.join(name);
        let set = fixtures::generate(name)?;
        let written = set.write(&dir)?;
        let failures = fixtures::revalidate(&dir, DEFAULT_TOL)?;
        println!(
            "{name:<18} {} files, {} expectations, {} failures",
            written.len(),
            set.expected.len(),
            failures.len()
        );
    }
    println!("written under {}", root.display());
    Ok(())
}
