//! Run configuration: a flat key-value file with `[section]` headers.
//!
//! Every experiment knob lives under a fixed `section.key` name; command
//! line flags override config keys, and a `RunConfig` round-trips through
//! the text format losslessly. Unknown keys are rejected with the
//! offending name.

use crate::{Error, Result};

macro_rules! config_fields {
    ($(($section:literal, $key:literal, $field:ident, $ty:ty)),+ $(,)?) => {
        /// All experiment knobs, each optional until validation.
        #[derive(Debug, Clone, Default, PartialEq)]
        pub struct RunConfig {
            $(pub $field: Option<$ty>,)+
        }

        impl RunConfig {
            /// Sets one `section.key` from its text form.
            pub fn set(&mut self, section: &str, key: &str, value: &str) -> Result<()> {
                match (section, key) {
                    $(($section, $key) => {
                        let parsed = value.parse::<$ty>().map_err(|_| {
                            Error::InvalidConfig(format!(
                                "bad value `{value}` for {section}.{key}"
                            ))
                        })?;
                        self.$field = Some(parsed);
                        Ok(())
                    })+
                    _ => Err(Error::InvalidConfig(format!(
                        "unknown config key `{section}.{key}`"
                    ))),
                }
            }

            /// All set fields as (section, key, value) text triples, in
            /// declaration order.
            pub fn entries(&self) -> Vec<(&'static str, &'static str, String)> {
                let mut out = Vec::new();
                $(if let Some(v) = &self.$field {
                    out.push(($section, $key, v.to_string()));
                })+
                out
            }

            /// Fields set in `other` override those in `self`.
            pub fn merged_with(mut self, other: &RunConfig) -> RunConfig {
                $(if other.$field.is_some() {
                    self.$field = other.$field.clone();
                })+
                self
            }
        }
    };
}

config_fields![
    ("model", "alpha", alpha, f64),
    ("model", "beta", beta, f64),
    ("model", "gamma", gamma, f64),
    ("model", "tau", tau, f64),
    ("model", "t_ulc", t_ulc, f64),
    ("model", "potential", potential, String),
    ("forcing", "model", forcing_model, String),
    ("forcing", "period", period, f64),
    ("forcing", "amplitude", amplitude, f64),
    ("forcing", "phase", phase, f64),
    ("forcing", "scale", forcing_scale, f64),
    ("integrator", "h", h, f64),
    ("integrator", "gsr_interval", gsr_interval, f64),
    ("integrator", "noise_b", noise_b, f64),
    ("run", "seed", seed, u64),
    ("run", "threads", threads, usize),
    ("run", "out", out, String),
    ("run", "overlay", overlay, String),
    ("experiment", "from", from, f64),
    ("experiment", "to", to, f64),
    ("experiment", "dt", dt, f64),
    ("experiment", "x0", x0, f64),
    ("experiment", "y0", y0, f64),
    ("experiment", "t0", t0, f64),
    ("experiment", "t_end", t_end, f64),
    ("experiment", "t_section", t_section, f64),
    ("experiment", "t_total", t_total, f64),
    ("experiment", "transient", transient, f64),
    ("experiment", "horizon", horizon, f64),
    ("experiment", "stride", stride, f64),
    ("experiment", "d_t", d_t, f64),
    ("experiment", "grid", grid, String),
    ("experiment", "x_range", x_range, String),
    ("experiment", "y_range", y_range, String),
    ("experiment", "random_ics", random_ics, usize),
    ("experiment", "frames", frames, usize),
    ("experiment", "t0_step", t0_step, f64),
    ("experiment", "gap", gap, f64),
    ("experiment", "at_prerun", at_prerun, f64),
    ("experiment", "x_axis", x_axis, String),
    ("experiment", "y_axis", y_axis, String),
    ("experiment", "paths", paths, usize),
    ("experiment", "tangent", tangent, bool),
    ("experiment", "svg", svg, bool),
    ("experiment", "figure", figure, String),
];

impl RunConfig {
    /// Parses the sectioned key-value text format. `#` and `;` start
    /// comments; later duplicates win.
    pub fn from_config_str(text: &str) -> Result<RunConfig> {
        let mut cfg = RunConfig::default();
        let mut section = String::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = match raw.find(['#', ';']) {
                Some(pos) => &raw[..pos],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
                section = name.trim().to_string();
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::InvalidConfig(format!(
                    "config line {}: expected `key = value`, got `{line}`",
                    lineno + 1
                )));
            };
            cfg.set(&section, key.trim(), value.trim())?;
        }
        Ok(cfg)
    }

    pub fn from_file(path: &std::path::Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path)?;
        Self::from_config_str(&text)
    }

    /// Canonical text form; `from_config_str` of this is lossless.
    pub fn to_config_string(&self) -> String {
        let mut out = String::new();
        let mut current = "";
        for (section, key, value) in self.entries() {
            if section != current {
                if !out.is_empty() {
                    out.push('\n');
                }
                out.push_str(&format!("[{section}]\n"));
                current = section;
            }
            out.push_str(&format!("{key} = {value}\n"));
        }
        out
    }
}

/// Collects missing required fields into one diagnostic naming each.
#[derive(Default)]
pub struct Required {
    missing: Vec<String>,
}

impl Required {
    pub fn new(_cfg: &RunConfig) -> Self {
        Self::default()
    }

    pub fn f64(&mut self, field: Option<f64>, name: &str) -> f64 {
        match field {
            Some(v) => v,
            None => {
                self.missing.push(name.to_string());
                f64::NAN
            }
        }
    }

    pub fn string(&mut self, field: &Option<String>, name: &str) -> String {
        match field {
            Some(v) => v.clone(),
            None => {
                self.missing.push(name.to_string());
                String::new()
            }
        }
    }


    pub fn finish(self) -> Result<()> {
        if self.missing.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidConfig(format!(
                "missing required fields: {}",
                self.missing.join(", ")
            )))
        }
    }
}

/// Parses `a:b` range syntax.
pub fn parse_range(text: &str, what: &str) -> Result<(f64, f64)> {
    let Some((a, b)) = text.split_once(':') else {
        return Err(Error::InvalidConfig(format!("{what} must be `lo:hi`, got `{text}`")));
    };
    let lo = a
        .trim()
        .parse::<f64>()
        .map_err(|_| Error::InvalidConfig(format!("{what}: bad number `{a}`")))?;
    let hi = b
        .trim()
        .parse::<f64>()
        .map_err(|_| Error::InvalidConfig(format!("{what}: bad number `{b}`")))?;
    Ok((lo, hi))
}

/// Parses `NXxNY` grid syntax, e.g. `7x7` or `201x121`.
pub fn parse_grid_shape(text: &str, what: &str) -> Result<(usize, usize)> {
    let Some((a, b)) = text.split_once(['x', 'X']) else {
        return Err(Error::InvalidConfig(format!("{what} must be `NXxNY`, got `{text}`")));
    };
    let nx = a
        .trim()
        .parse::<usize>()
        .map_err(|_| Error::InvalidConfig(format!("{what}: bad count `{a}`")))?;
    let ny = b
        .trim()
        .parse::<usize>()
        .map_err(|_| Error::InvalidConfig(format!("{what}: bad count `{b}`")))?;
    Ok((nx, ny))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_lossless() {
        let cfg = RunConfig {
            alpha: Some(11.11),
            beta: Some(0.25),
            gamma: Some(0.75),
            tau: Some(35.09),
            forcing_model: Some("insol".into()),
            h: Some(0.05),
            seed: Some(42),
            out: Some("out/run.csv".into()),
            tangent: Some(true),
            ..RunConfig::default()
        };
        let text = cfg.to_config_string();
        let parsed = RunConfig::from_config_str(&text).unwrap();
        assert_eq!(parsed, cfg);
        assert_eq!(parsed.to_config_string(), text);
    }

    #[test]
    fn unknown_key_is_named() {
        let err = RunConfig::from_config_str("[model]\nalpa = 1\n").unwrap_err();
        assert!(err.to_string().contains("model.alpa"), "{err}");
    }

    #[test]
    fn bad_value_is_named() {
        let err = RunConfig::from_config_str("[model]\nalpha = eleven\n").unwrap_err();
        assert!(err.to_string().contains("model.alpha"), "{err}");
    }

    #[test]
    fn comments_and_blanks_ignored() {
        let cfg = RunConfig::from_config_str(
            "# heading\n\n[model]\nalpha = 1.0 # inline\n; another\n[run]\nseed = 7\n",
        )
        .unwrap();
        assert_eq!(cfg.alpha, Some(1.0));
        assert_eq!(cfg.seed, Some(7));
    }

    #[test]
    fn merge_prefers_overrides() {
        let base = RunConfig::from_config_str("[model]\nalpha = 1\nbeta = 2\n").unwrap();
        let over = RunConfig::from_config_str("[model]\nbeta = 3\n").unwrap();
        let merged = base.merged_with(&over);
        assert_eq!(merged.alpha, Some(1.0));
        assert_eq!(merged.beta, Some(3.0));
    }

    #[test]
    fn range_and_grid_parsers() {
        assert_eq!(parse_range("-1.5:1.5", "x").unwrap(), (-1.5, 1.5));
        assert_eq!(parse_grid_shape("201x121", "grid").unwrap(), (201, 121));
        assert!(parse_range("oops", "x").is_err());
        assert!(parse_grid_shape("7", "grid").is_err());
    }
}
