//! Provenance stamping of artifacts: every file carries the config hash,
//! the seed and the tool version, so identical configurations reproduce
//! identical bytes and artifacts stay traceable to their inputs.

/// Provenance header embedded in every artifact.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct Provenance {
    /// FNV-1a 64 hash of the canonical config text, hex.
    pub config_hash: String,
    pub seed: u64,
    pub version: String,
    pub tool: String,
}

impl Provenance {
    pub fn new(canonical_config: &str, seed: u64) -> Self {
        Self {
            config_hash: format!("{:016x}", fnv1a64(canonical_config.as_bytes())),
            seed,
            version: env!("CARGO_PKG_VERSION").to_string(),
            tool: env!("CARGO_PKG_NAME").to_string(),
        }
    }

    /// The `# {...}` comment line prepended to CSV artifacts.
    pub fn csv_header(&self) -> String {
        format!("# {}\n", serde_json::to_string(self).expect("provenance serializes"))
    }

    /// Inserts a provenance comment after the opening `<svg>` tag.
    pub fn stamp_svg(&self, svg: &str) -> String {
        let comment = format!(
            "<!-- {} -->\n",
            serde_json::to_string(self).expect("provenance serializes")
        );
        match svg.find('\n') {
            Some(pos) => format!("{}{}{}", &svg[..pos + 1], comment, &svg[pos + 1..]),
            None => format!("{comment}{svg}"),
        }
    }
}

/// FNV-1a 64-bit hash.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf29ce484222325;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x100000001b3);
    }
    hash
}
