//! External forcing models.
//!
//! The astronomical forcing is the incoming solar radiation anomaly at 65°N
//! on the day of the summer solstice, written as a 35-term harmonic series
//!
//! ```text
//! F(t) = Σᵢ [ sᵢ sin(ωᵢ t) + cᵢ cos(ωᵢ t) ]        i = 1..35
//! ```
//!
//! with angular velocities in rad/kyr and coefficients in W/m². The first
//! 15 terms belong to the obliquity band, the remaining 20 to precession.
//! The long-term mean (494.2447 W/m²) is already removed, so the series is
//! an anomaly with near-zero mean. Pure sinusoids and zero forcing are
//! provided for controlled experiments.

use crate::{Error, Result};

/// One harmonic of the insolation series.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct HarmonicTerm {
    /// Angular velocity \[rad/kyr\].
    pub omega: f64,
    /// Sine coefficient \[W/m²\].
    pub s: f64,
    /// Cosine coefficient \[W/m²\].
    pub c: f64,
}

impl HarmonicTerm {
    pub const fn new(omega: f64, s: f64, c: f64) -> Self {
        Self { omega, s, c }
    }

    /// Amplitude a = √(s² + c²).
    pub fn amplitude(&self) -> f64 {
        self.s.hypot(self.c)
    }

    /// Period T = 2π/ω \[kyr\].
    pub fn period(&self) -> f64 {
        std::f64::consts::TAU / self.omega
    }
}

/// Number of obliquity rows at the head of the insolation table.
pub const OBLIQUITY_TERMS: usize = 15;

/// Insolation model coefficients: 15 obliquity rows followed by 20
/// precession rows, full printed precision.
pub const INSOLATION_TABLE: [HarmonicTerm; 35] = [
    HarmonicTerm::new(0.153249478547167, -11.2287376815124, 3.51682075211241),
    HarmonicTerm::new(0.158148666238883, -3.82499371467540, -0.761851750263805),
    HarmonicTerm::new(0.117190147169570, 2.28814805956066, 1.80233702684623),
    HarmonicTerm::new(0.155061775112933, -1.29770081956440, -0.635152963728496),
    HarmonicTerm::new(0.217333905941751, 0.380973541305497, -1.46301711999210),
    HarmonicTerm::new(0.150162587421217, 1.54904176353302, -0.0883941912769817),
    HarmonicTerm::new(0.211709630908568, -0.810768209286259, -0.577980646565494),
    HarmonicTerm::new(0.156336369673117, -0.918358442095885, 0.196083726889428),
    HarmonicTerm::new(0.148350290855451, 0.256895610735773, -0.524697312305024),
    HarmonicTerm::new(0.206924898030688, -0.335783913402678, -0.0194792150128644),
    HarmonicTerm::new(0.212525165090383, 0.267659228540196, 0.128915417116900),
    HarmonicTerm::new(0.229992875969202, 0.0696189733188958, 0.0746231714061285),
    HarmonicTerm::new(0.306498957094334, 0.0247349748169616, 0.0140464395340974),
    HarmonicTerm::new(0.311398144786051, 0.0138353727621181, 0.0304736668840422),
    HarmonicTerm::new(0.004899187691716, -0.160479848721994, 0.0594077968934257),
    HarmonicTerm::new(0.264933601588513, -15.5490493322904, -9.70406287110532),
    HarmonicTerm::new(0.280151350350945, 15.4319556361701, 4.75247271131525),
    HarmonicTerm::new(0.331110950251899, 9.0992249352734, -10.6115244887390),
    HarmonicTerm::new(0.328024059125949, -7.87065384013669, 6.61544246063503),
    HarmonicTerm::new(0.326211762560183, 0.813786144754451, -4.52641408099246),
    HarmonicTerm::new(0.269742342439881, 0.0690448504314857, -3.31639260969558),
    HarmonicTerm::new(0.332923246817665, 1.44050770785967, 1.06339286050120),
    HarmonicTerm::new(0.371638925683567, 0.925324276580528, -1.02066758672154),
    HarmonicTerm::new(0.275366617473065, 0.997628846513796, -0.362906496840039),
    HarmonicTerm::new(0.323124871434233, -0.378637986107629, 0.527217891742183),
    HarmonicTerm::new(0.259396912994958, 0.339477750517033, -0.560509461538342),
    HarmonicTerm::new(0.324937167999999, -0.576082669762308, 1.18669572739338),
    HarmonicTerm::new(0.334197841377850, 0.346906064369828, -0.648189701487285),
    HarmonicTerm::new(0.274551083291250, -0.441772417569753, 0.289576210423804),
    HarmonicTerm::new(0.418183080135680, -0.0184884064645011, 0.109632390175297),
    HarmonicTerm::new(0.111684123041346, -0.428006728186239, 0.357006342316690),
    HarmonicTerm::new(0.433400828898112, -0.0049199219454561, -0.106148873639336),
    HarmonicTerm::new(0.126901871803777, 0.257509918217341, -0.377639794223366),
    HarmonicTerm::new(0.336010137943616, -0.421809264016129, 0.324327509437558),
    HarmonicTerm::new(0.177861471704732, -0.161827722328271, -0.362683869407858),
];

/// Angular velocity of the dominant obliquity harmonic ε₁ \[rad/kyr\]
/// (period 41.0 kyr).
pub const OMEGA_EPSILON_1: f64 = INSOLATION_TABLE[0].omega;

/// Amplitude of the dominant obliquity harmonic ε₁ \[W/m²\], ≈ 11.77.
pub fn a_epsilon_1() -> f64 {
    INSOLATION_TABLE[0].amplitude()
}

/// Default sample count for [`ForcingModel::rms_amplitude`].
pub const DEFAULT_RMS_SAMPLES: usize = 10_000;

/// Expected header of a coefficient CSV file.
pub const CSV_HEADER: &str = "omega_rad_per_kyr,s_W_per_m2,c_W_per_m2";

/// The kind of forcing signal.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub enum ForcingKind {
    /// F(t) = 0.
    Zero,
    /// F(t) = amplitude · sin(2π (t − phase) / period).
    Sinusoid {
        amplitude: f64,
        /// Period \[kyr\], > 0.
        period: f64,
        /// Phase offset \[kyr\].
        phase: f64,
    },
    /// Harmonic series Σ [sᵢ sin(ωᵢ t) + cᵢ cos(ωᵢ t)].
    Series(Vec<HarmonicTerm>),
}

/// A scalar forcing model with a dimensionless multiplier applied on top.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ForcingModel {
    pub kind: ForcingKind,
    /// Dimensionless multiplier applied to every evaluation.
    pub scale: f64,
}

impl ForcingModel {
    pub fn zero() -> Self {
        Self { kind: ForcingKind::Zero, scale: 1.0 }
    }

    pub fn sinusoid(amplitude: f64, period: f64, phase: f64) -> Self {
        Self {
            kind: ForcingKind::Sinusoid { amplitude, period, phase },
            scale: 1.0,
        }
    }

    /// The 41-kyr unit sinusoid used in the periodic-forcing experiments.
    pub fn sine_41() -> Self {
        Self::sinusoid(1.0, 41.0, 0.0)
    }

    /// The 35-term insolation anomaly in W/m².
    pub fn insolation() -> Self {
        Self {
            kind: ForcingKind::Series(INSOLATION_TABLE.to_vec()),
            scale: 1.0,
        }
    }

    /// The insolation anomaly scaled by a_ε₁ ≈ 11.77 W/m² to work
    /// dimensionless. This is the forcing used by all astronomically
    /// forced experiments.
    pub fn insolation_dimensionless() -> Self {
        Self {
            kind: ForcingKind::Series(INSOLATION_TABLE.to_vec()),
            scale: 1.0 / a_epsilon_1(),
        }
    }

    /// A custom harmonic series (must be nonempty).
    pub fn series(terms: Vec<HarmonicTerm>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::InvalidConfig("harmonic series must be nonempty".into()));
        }
        Ok(Self { kind: ForcingKind::Series(terms), scale: 1.0 })
    }

    pub fn with_scale(mut self, scale: f64) -> Self {
        self.scale = scale;
        self
    }

    /// Checks the model invariants: positive frequencies and periods,
    /// finite coefficients.
    pub fn validate(&self) -> Result<()> {
        match &self.kind {
            ForcingKind::Zero => {}
            ForcingKind::Sinusoid { amplitude, period, phase } => {
                if !(*period > 0.0) {
                    return Err(Error::InvalidConfig(format!(
                        "sinusoid period must be > 0, got {period}"
                    )));
                }
                if !amplitude.is_finite() || !phase.is_finite() {
                    return Err(Error::InvalidConfig("sinusoid parameters must be finite".into()));
                }
            }
            ForcingKind::Series(terms) => {
                if terms.is_empty() {
                    return Err(Error::InvalidConfig("harmonic series must be nonempty".into()));
                }
                for (i, t) in terms.iter().enumerate() {
                    if !(t.omega > 0.0) {
                        return Err(Error::InvalidConfig(format!(
                            "series row {i}: omega must be > 0, got {}",
                            t.omega
                        )));
                    }
                    if !t.s.is_finite() || !t.c.is_finite() {
                        return Err(Error::InvalidConfig(format!("series row {i}: nonfinite coefficient")));
                    }
                }
            }
        }
        if !self.scale.is_finite() {
            return Err(Error::InvalidConfig("forcing scale must be finite".into()));
        }
        Ok(())
    }

    /// Evaluates F(t) by direct summation. Total for any finite t.
    pub fn eval(&self, t: f64) -> f64 {
        let raw = match &self.kind {
            ForcingKind::Zero => 0.0,
            ForcingKind::Sinusoid { amplitude, period, phase } => {
                amplitude * (std::f64::consts::TAU * (t - phase) / period).sin()
            }
            ForcingKind::Series(terms) => terms
                .iter()
                .map(|h| {
                    let (sin, cos) = (h.omega * t).sin_cos();
                    h.s * sin + h.c * cos
                })
                .sum(),
        };
        self.scale * raw
    }

    /// Discrete root-mean-square of `eval` over `samples` midpoint-sampled
    /// points in [t0, t1].
    pub fn rms_amplitude(&self, window: (f64, f64), samples: usize) -> Result<f64> {
        let (t0, t1) = window;
        if !(t1 > t0) {
            return Err(Error::InvalidConfig(format!(
                "rms window must satisfy t1 > t0, got [{t0}, {t1}]"
            )));
        }
        if samples < 2 {
            return Err(Error::InvalidConfig(format!(
                "rms needs at least 2 samples, got {samples}"
            )));
        }
        let dt = (t1 - t0) / samples as f64;
        let sum_sq: f64 = (0..samples)
            .map(|k| {
                let f = self.eval(t0 + (k as f64 + 0.5) * dt);
                f * f
            })
            .sum();
        Ok((sum_sq / samples as f64).sqrt())
    }

    /// Spectrum rows (period Tᵢ, power aᵢ²) sorted by descending power.
    /// Only defined for the series variant.
    pub fn spectrum_table(&self) -> Result<Vec<SpectrumRow>> {
        let ForcingKind::Series(terms) = &self.kind else {
            return Err(Error::InvalidConfig(
                "spectrum_table requires a harmonic-series forcing".into(),
            ));
        };
        let mut rows: Vec<SpectrumRow> = terms
            .iter()
            .map(|h| SpectrumRow {
                period: h.period(),
                power: h.s * h.s + h.c * h.c,
            })
            .collect();
        rows.sort_by(|a, b| b.power.total_cmp(&a.power));
        Ok(rows)
    }

    /// Loads a coefficient table from CSV text with header
    /// `omega_rad_per_kyr,s_W_per_m2,c_W_per_m2` and exactly 35 data rows,
    /// obliquity rows first.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::InvalidConfig("empty coefficient CSV".into()))?;
        if header.trim() != CSV_HEADER {
            return Err(Error::InvalidConfig(format!(
                "coefficient CSV header must be `{CSV_HEADER}`, got `{}`",
                header.trim()
            )));
        }
        let mut terms = Vec::new();
        for (i, line) in lines.enumerate() {
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != 3 {
                return Err(Error::InvalidConfig(format!(
                    "coefficient CSV row {}: expected 3 fields, got {}",
                    i + 1,
                    fields.len()
                )));
            }
            let parse = |s: &str, what: &str| -> Result<f64> {
                s.parse::<f64>().map_err(|_| {
                    Error::InvalidConfig(format!("coefficient CSV row {}: bad {what} `{s}`", i + 1))
                })
            };
            terms.push(HarmonicTerm::new(
                parse(fields[0], "omega")?,
                parse(fields[1], "s")?,
                parse(fields[2], "c")?,
            ));
        }
        if terms.len() != 35 {
            return Err(Error::InvalidConfig(format!(
                "coefficient CSV must carry 35 data rows, got {}",
                terms.len()
            )));
        }
        let model = Self { kind: ForcingKind::Series(terms), scale: 1.0 };
        model.validate()?;
        Ok(model)
    }

    /// Renders the series coefficients as CSV (inverse of [`ForcingModel::from_csv`]).
    pub fn to_csv(&self) -> Result<String> {
        let ForcingKind::Series(terms) = &self.kind else {
            return Err(Error::InvalidConfig("to_csv requires a harmonic-series forcing".into()));
        };
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for h in terms {
            // Shortest round-trip formatting: parsing gives back the same bits.
            out.push_str(&format!("{},{},{}\n", h.omega, h.s, h.c));
        }
        Ok(out)
    }
}

/// One row of the spectrum decomposition.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SpectrumRow {
    /// Period Tᵢ = 2π/ωᵢ \[kyr\].
    pub period: f64,
    /// Power aᵢ² = sᵢ² + cᵢ² \[W²/m⁴\].
    pub power: f64,
}
