//! Whether the origin is interior to each vertex cone of an embedding.

use polyrig::expansion::GraphEmbedding;
use polyrig::fixtures;
use polyrig::fixtures::shapes;
use polyrig::rigidity::cone_condition;

fn main() {
    let cube = cone_condition(&GraphEmbedding::skeleton(&shapes::cube()));
    println!("cube skeleton: all hold = {}", cube.all_hold());
    let (_, path, _) = fixtures::cube_path();
    let r = cone_condition(&path);
    println!("cube on a great circle: failing vertices {:?}", r.failing());
    for (i, m) in r.margins.iter().enumerate() {
        println!("  vertex {i}: margin {m:+.3e}");
    }
}
