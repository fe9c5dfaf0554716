//! Minimal attribute extraction for SVG parse-back checks.

/// Numeric value of `attr="..."` in one element line.
pub fn svg_attr(line: &str, attr: &str) -> Option<f64> {
    let needle = format!("{attr}=\"");
    let start = line.find(&needle)? + needle.len();
    let end = start + line[start..].find('"')?;
    line[start..end].parse().ok()
}

/// Lines containing the given element prefix, e.g. `<circle class="pt"`.
pub fn svg_elements<'a>(svg: &'a str, prefix: &str) -> Vec<&'a str> {
    svg.lines().filter(|l| l.contains(prefix)).collect()
}
