//! `MIN:MAX:STEP` and `MIN:MAX:COUNT` grid strings.

use mfadcca_core::{QGrid, ScaleGrid};

fn three_fields(raw: &str, what: &str) -> Result<[String; 3], String> {
    let parts: Vec<&str> = raw.trim().split(':').map(str::trim).collect();
    match parts.as_slice() {
        [a, b, c] => Ok([a.to_string(), b.to_string(), c.to_string()]),
        _ => Err(format!("{what} {raw:?}: expected three fields separated by ':'")),
    }
}

/// `MIN:MAX:STEP`, e.g. `-10:10:0.5`.
pub fn parse_q_grid(raw: &str) -> Result<QGrid, String> {
    let [a, b, c] = three_fields(raw, "q grid")?;
    let num = |s: &str| s.parse::<f64>().map_err(|_| format!("q grid {raw:?}: {s:?} is not a number"));
    QGrid::range(num(&a)?, num(&b)?, num(&c)?).map_err(|e| format!("q grid {raw:?}: {e}"))
}

/// `MIN:MAX:COUNT` log-spaced integer scales, e.g. `20:167:100`.
pub fn parse_scale_grid(raw: &str) -> Result<ScaleGrid, String> {
    let [a, b, c] = three_fields(raw, "scale grid")?;
    let int =
        |s: &str| s.parse::<usize>().map_err(|_| format!("scale grid {raw:?}: {s:?} is not a non-negative integer"));
    ScaleGrid::log_spaced(int(&a)?, int(&b)?, int(&c)?).map_err(|e| format!("scale grid {raw:?}: {e}"))
}
