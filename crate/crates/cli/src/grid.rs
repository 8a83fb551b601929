//! Threshold grid notation: `start:step:stop` or a comma-separated list.

/// Expands a grid. `stop` may be the keyword `max`, which resolves to
/// `max_value`. The grid has `round((stop - start) / step) + 1` points, so
/// the end point is kept whenever it lies within half a step of the grid.
pub fn parse_grid(spec: &str, max_value: f64) -> Result<Vec<f64>, String> {
    let num = |s: &str| -> Result<f64, String> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("max") {
            return Ok(max_value);
        }
        s.parse::<f64>()
            .map_err(|_| format!("'{s}' is not a number"))
    };
    let parts: Vec<&str> = spec.split(':').collect();
    let out = match parts.as_slice() {
        [start, step, stop] => {
            let (start, step, stop) = (num(start)?, num(step)?, num(stop)?);
            if !step.is_finite() || step <= 0.0 {
                return Err(format!("grid step must be positive, got {step}"));
            }
            if !start.is_finite() || !stop.is_finite() || stop < start {
                return Err(format!(
                    "grid needs finite start <= stop, got {start}:{stop}"
                ));
            }
            let n = ((stop - start) / step).round() as usize;
            (0..=n).map(|i| start + i as f64 * step).collect()
        }
        [list] => list.split(',').map(num).collect::<Result<Vec<_>, _>>()?,
        _ => return Err(format!("cannot parse threshold grid '{spec}'")),
    };
    if out.is_empty() {
        return Err("empty threshold grid".into());
    }
    Ok(out)
}
