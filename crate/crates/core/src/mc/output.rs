use serde_json::{json, Value};

use super::MomentEstimate;

/// Seventeen significant digits, scientific notation.
pub fn format_real(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn estimates_to_csv(rows: &[(String, MomentEstimate)]) -> String {
    let mut out = String::from("key,mean,sd,se\n");
    for (key, e) in rows {
        out.push_str(&format!("{key},{},{},{}\n", format_real(e.mean), format_real(e.sd), format_real(e.se)));
    }
    out
}

/// `{plan, rows: [{key, mean, sd, se}]}`.
pub fn estimates_to_json(plan: Value, rows: &[(String, MomentEstimate)]) -> Value {
    let rows: Vec<Value> = rows
        .iter()
        .map(|(key, e)| {
            json!({
                "key": key,
                "mean": format_real(e.mean),
                "sd": format_real(e.sd),
                "se": format_real(e.se),
            })
        })
        .collect();
    json!({ "plan": plan, "rows": rows })
}
