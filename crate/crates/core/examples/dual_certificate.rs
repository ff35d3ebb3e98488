//! The Izmestiev matrix as a dual certificate for the reconstruction program.

use polyrig::fixtures;
use polyrig::reconstruct::dual_certificate;

fn main() -> polyrig::Result<()> {
    for p in fixtures::random_corpus(6, 7) {
        let c = dual_certificate(&p)?;
        println!(
            "d = {} n = {:>2}: primal {:.9}  dual {:.9}  gap {:.1e}  mu {}  psd {}",
            p.dim(),
            p.vertex_count(),
            c.primal,
            c.dual,
            c.gap,
            c.mu,
            c.psd
        );
    }
    Ok(())
}
