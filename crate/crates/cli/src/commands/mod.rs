pub mod flow;
pub mod gen;
pub mod scatter;

use hierarchylab_numerics::C64;
use serde_json::{json, Value};

pub(crate) fn cjson(c: C64) -> Value {
    json!({ "re": c.re + 0.0, "im": c.im + 0.0 })
}
