use std::str::FromStr;

/// Pass limits for `verify` and `oracle`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thresholds {
    pub rigidity: f64,
    pub com: f64,
    pub parallel: f64,
    pub control_sum: f64,
    pub gap: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            rigidity: 1e-9,
            com: 1e-8,
            parallel: 1e-6,
            control_sum: 1e-12,
            gap: 1e-2,
        }
    }
}

/// Either one number applied to every limit, or `key=value` pairs separated
/// by commas, e.g. `rigidity=1e-10,gap=0.005`.
impl FromStr for Thresholds {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parse = |v: &str| -> Result<f64, String> {
            let x: f64 = v
                .trim()
                .parse()
                .map_err(|_| format!("not a number: {v:?}"))?;
            if x.is_nan() || x < 0.0 {
                return Err(format!("threshold must be non-negative, got {v}"));
            }
            Ok(x)
        };
        if !s.contains('=') {
            let x = parse(s)?;
            return Ok(Self {
                rigidity: x,
                com: x,
                parallel: x,
                control_sum: x,
                gap: x,
            });
        }
        let mut out = Self::default();
        for item in s.split(',') {
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| format!("expected key=value, got {item:?}"))?;
            let slot = match key.trim() {
                "rigidity" => &mut out.rigidity,
                "com" => &mut out.com,
                "parallel" => &mut out.parallel,
                "control_sum" => &mut out.control_sum,
                "gap" => &mut out.gap,
                other => return Err(format!("unknown threshold {other:?}")),
            };
            *slot = parse(value)?;
        }
        Ok(out)
    }
}
