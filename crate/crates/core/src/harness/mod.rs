//! Experiment harness: configuration, verification suites, reports and CSV
//! profiles.

mod config;
mod suites;

use std::fmt::Write as _;
use std::path::Path;

pub use config::{
    load_config, parse_config, AffineMax, AffinePath, BodyPair, ConnectivityCase,
    ExperimentConfig, FunctionPair, FunctionRef, ResidualCase, RooftopPair, ShiftCheck, Weights,
};
pub use suites::{build_profile, resolve_function, run_geodesic, run_suite};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Suite {
    GeodesicExamples,
    CapacityConvexity,
    EnergyAffinity,
    GeometricMean,
    WeightedCapacity,
    BrunnMinkowski,
    RooftopEquality,
    ResidualIdempotency,
    Connectivity,
}

impl Suite {
    pub const ALL: [Suite; 9] = [
        Suite::GeodesicExamples,
        Suite::CapacityConvexity,
        Suite::EnergyAffinity,
        Suite::GeometricMean,
        Suite::WeightedCapacity,
        Suite::BrunnMinkowski,
        Suite::RooftopEquality,
        Suite::ResidualIdempotency,
        Suite::Connectivity,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::GeodesicExamples => "geodesic-examples",
            Suite::CapacityConvexity => "capacity-convexity",
            Suite::EnergyAffinity => "energy-affinity",
            Suite::GeometricMean => "geometric-mean",
            Suite::WeightedCapacity => "weighted-capacity",
            Suite::BrunnMinkowski => "brunn-minkowski",
            Suite::RooftopEquality => "rooftop-equality",
            Suite::ResidualIdempotency => "residual-idempotency",
            Suite::Connectivity => "connectivity",
        }
    }
}

impl std::fmt::Display for Suite {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .iter()
            .copied()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::UnknownSuite(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cmp {
    AtMost,
    Above,
}

/// One pass/fail measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    pub limit: f64,
    pub cmp: Cmp,
    pub passed: bool,
    pub note: String,
}

impl Check {
    pub fn at_most(name: impl Into<String>, measured: f64, limit: f64) -> Self {
        Check {
            name: name.into(),
            measured,
            limit,
            cmp: Cmp::AtMost,
            passed: measured <= limit,
            note: String::new(),
        }
    }

    pub fn above(name: impl Into<String>, measured: f64, limit: f64) -> Self {
        Check {
            name: name.into(),
            measured,
            limit,
            cmp: Cmp::Above,
            passed: measured > limit,
            note: String::new(),
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = note.into();
        self
    }

    pub fn require(mut self, ok: bool) -> Self {
        self.passed &= ok;
        self
    }

    pub fn line(&self) -> String {
        let op = match self.cmp {
            Cmp::AtMost => "<=",
            Cmp::Above => ">",
        };
        let mut s = format!(
            "[{}] {}: {:.6e} {} {:.6e}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.measured,
            op,
            self.limit
        );
        if !self.note.is_empty() {
            let _ = write!(s, " ({})", self.note);
        }
        s
    }
}

/// Per-`t` values along one geodesic. Columns that do not apply are NaN.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileRow {
    pub t: f64,
    pub m_t: f64,
    pub capacity: f64,
    pub capacity_bound: f64,
    pub energy: f64,
    pub energy_chord: f64,
    pub volume: f64,
    pub volume_bound: f64,
    pub sandwich_lower: f64,
    pub sandwich_upper: f64,
    pub gap0: f64,
    pub gap1: f64,
}

pub const PROFILE_HEADER: [&str; 12] = [
    "t",
    "m_t",
    "capacity",
    "capacity_bound",
    "energy",
    "energy_chord",
    "volume",
    "volume_bound",
    "sandwich_lower",
    "sandwich_upper",
    "gap0",
    "gap1",
];

#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    pub label: String,
    pub rows: Vec<ProfileRow>,
}

fn fmt17(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else {
        format!("{x:.16e}")
    }
}

/// Writes a profile as CSV with 17 significant digits and LF line endings.
pub fn emit_csv(profile: &Profile, path: &Path) -> Result<()> {
    if profile.rows.is_empty() {
        return Err(Error::Empty(format!("profile `{}`", profile.label)));
    }
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let io = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(PROFILE_HEADER).map_err(io)?;
    for r in &profile.rows {
        let fields = [
            r.t,
            r.m_t,
            r.capacity,
            r.capacity_bound,
            r.energy,
            r.energy_chord,
            r.volume,
            r.volume_bound,
            r.sandwich_lower,
            r.sandwich_upper,
            r.gap0,
            r.gap1,
        ];
        w.write_record(fields.iter().map(|&x| fmt17(x))).map_err(io)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub suite: Suite,
    pub checks: Vec<Check>,
    pub profiles: Vec<Profile>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn render(&self) -> String {
        let mut s = format!(
            "== {} ({}) ==\n",
            self.suite,
            if self.passed() { "pass" } else { "FAIL" }
        );
        for c in &self.checks {
            s.push_str(&c.line());
            s.push('\n');
        }
        s
    }

    /// Writes the profiles of this report into `dir`.
    pub fn write_profiles(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        for p in &self.profiles {
            emit_csv(p, &dir.join(format!("{}-{}.csv", self.suite, p.label)))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(t: f64) -> ProfileRow {
        ProfileRow {
            t,
            m_t: -1.0,
            capacity: 1.0 / (1.0 + t),
            capacity_bound: 1.0 - t / 2.0,
            energy: -1.0 + t / 2.0,
            energy_chord: -1.0 + t / 2.0,
            volume: f64::NAN,
            volume_bound: f64::NAN,
            sandwich_lower: 0.0,
            sandwich_upper: 0.0,
            gap0: t / 2.0,
            gap1: (1.0 - t) / 2.0,
        }
    }

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!(matches!("nope".parse::<Suite>(), Err(Error::UnknownSuite(_))));
    }

    #[test]
    fn csv_format() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("p.csv");
        let p = Profile { label: "x".into(), rows: vec![row(0.5)] };
        emit_csv(&p, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(!text.contains('\r'));
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], PROFILE_HEADER.join(","));
        let fields: Vec<&str> = lines[1].split(',').collect();
        assert_eq!(fields[0], "5.0000000000000000e-1");
        assert_eq!(fields[6], "nan");
        let back: f64 = fields[2].parse().unwrap();
        assert_eq!(back, 1.0 / 1.5);
    }

    #[test]
    fn empty_profile_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let p = Profile { label: "x".into(), rows: vec![] };
        assert!(emit_csv(&p, &dir.path().join("p.csv")).is_err());
    }
}
