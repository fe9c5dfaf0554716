//! Fixed significant-digit float formatting for the text artifacts.
//! Normalized scientific notation keeps output bytes deterministic and
//! round-trippable through `str::parse::<f64>`.

/// 9 significant digits (CSV columns).
pub(crate) fn sig9(v: f64) -> String {
    if v == 0.0 {
        "0".to_string()
    } else {
        format!("{v:.8e}")
    }
}

/// 12 significant digits (model files).
pub(crate) fn sig12(v: f64) -> String {
    if v == 0.0 {
        "0".to_string()
    } else {
        format!("{v:.11e}")
    }
}
