//! Finite weighted sums of point masses on the sphere, and their text format.
//!
//! ```text
//! # n=2
//! 1,0,0,0,0,0,0,0,0.5
//! 0,1,0,0,0,0,0,0,0.5
//! ```
//!
//! One atom per line: the `4n` ambient coordinates followed by the weight.
//! An optional `# blocks=<R>` line marks the atoms as `R` independent random
//! discretizations of one underlying measure (see [`DiscreteMeasure::blocks`]).
//! Other `#` lines and blank lines are ignored.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quat::SpherePoint;

/// Points further than this from the unit sphere are reported on load.
pub const RENORMALIZE_WARN: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub point: SpherePoint,
    pub weight: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscreteMeasure {
    name: String,
    n: usize,
    atoms: Vec<Atom>,
    blocks: usize,
}

impl DiscreteMeasure {
    pub fn new(name: impl Into<String>, atoms: Vec<Atom>) -> Result<Self> {
        let first = atoms.first().ok_or_else(|| Error::InvalidMeasure("a measure needs at least one atom".into()))?;
        let n = first.point.n();
        if n < 2 {
            return Err(Error::InvalidDimension(n));
        }
        for (i, a) in atoms.iter().enumerate() {
            if a.point.n() != n {
                return Err(Error::InvalidMeasure(format!("atom {i} lives in H^{} but atom 0 in H^{n}", a.point.n())));
            }
            if !a.weight.is_finite() {
                return Err(Error::InvalidMeasure(format!("atom {i} has weight {}", a.weight)));
            }
        }
        Ok(Self { name: name.into(), n, atoms, blocks: 1 })
    }

    /// Equal weights `1/N` on `points`.
    pub fn uniform_weights(name: impl Into<String>, points: Vec<SpherePoint>) -> Result<Self> {
        let w = 1.0 / points.len().max(1) as f64;
        Self::new(name, points.into_iter().map(|point| Atom { point, weight: w }).collect())
    }

    /// Number of independent sample blocks the atoms form.
    ///
    /// With `R = 1` (the default) the atoms are the measure itself. With
    /// `R > 1` the atoms are split into `R` consecutive blocks of equal size,
    /// each an independent unbiased random discretization of one underlying
    /// measure scaled by `1/R`; spectral estimates then target that
    /// underlying measure. `N` i.i.d. samples with weights `1/N` are `N`
    /// blocks.
    pub fn blocks(&self) -> usize {
        self.blocks
    }

    pub fn with_blocks(mut self, blocks: usize) -> Result<Self> {
        if blocks == 0 || !self.atoms.len().is_multiple_of(blocks) {
            return Err(Error::InvalidMeasure(format!(
                "{} atoms cannot be split into {blocks} equal blocks",
                self.atoms.len()
            )));
        }
        self.blocks = blocks;
        Ok(self)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn total_variation(&self) -> f64 {
        self.atoms.iter().map(|a| a.weight.abs()).sum()
    }

    pub fn is_nonnegative(&self) -> bool {
        self.atoms.iter().all(|a| a.weight >= 0.0)
    }

    pub fn sum_sq_weights(&self) -> f64 {
        self.atoms.iter().map(|a| a.weight * a.weight).sum()
    }

    /// `alpha * self`.
    pub fn scaled(&self, alpha: f64) -> Self {
        let atoms = self.atoms.iter().map(|a| Atom { point: a.point.clone(), weight: alpha * a.weight }).collect();
        Self { name: self.name.clone(), n: self.n, atoms, blocks: self.blocks }
    }

    /// `self + other`, as the union of both atom lists. The sum is taken
    /// literally, with a single block.
    pub fn plus(&self, other: &Self) -> Result<Self> {
        let mut atoms = self.atoms.clone();
        atoms.extend_from_slice(&other.atoms);
        Self::new(format!("{}+{}", self.name, other.name), atoms)
    }

    /// Serializes to the text format.
    pub fn to_text(&self) -> String {
        let mut out = format!("# n={}\n", self.n);
        if self.blocks > 1 {
            writeln!(out, "# blocks={}", self.blocks).expect("writing to a String");
        }
        for a in &self.atoms {
            for c in a.point.to_real() {
                write!(out, "{c},").expect("writing to a String");
            }
            writeln!(out, "{}", a.weight).expect("writing to a String");
        }
        out
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_text())?;
        Ok(())
    }

    /// Parses the text format. Returns the measure and the number of atoms
    /// whose norm was off by more than [`RENORMALIZE_WARN`] before
    /// renormalization.
    pub fn parse(name: impl Into<String>, text: &str) -> Result<(Self, usize)> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
        let n = loop {
            match lines.next() {
                None => return Err(Error::Parse { line: 1, msg: "missing header `# n=<n>`".into() }),
                Some((_, "")) => continue,
                Some((line, l)) => {
                    let n = l
                        .strip_prefix('#')
                        .map(str::trim)
                        .and_then(|h| h.strip_prefix("n="))
                        .and_then(|v| v.trim().parse::<usize>().ok())
                        .ok_or_else(|| Error::Parse { line, msg: format!("expected header `# n=<n>`, found `{l}`") })?;
                    if n < 2 {
                        return Err(Error::Parse { line, msg: format!("need n >= 2, got {n}") });
                    }
                    break n;
                }
            }
        };

        let mut atoms = Vec::new();
        let mut renormalized = 0;
        let mut blocks = 1;
        for (line, l) in lines {
            if let Some(v) = l.strip_prefix('#').map(str::trim).and_then(|c| c.strip_prefix("blocks=")) {
                blocks = v
                    .trim()
                    .parse::<usize>()
                    .map_err(|e| Error::Parse { line, msg: format!("bad block count: {e}") })?;
                continue;
            }
            if l.is_empty() || l.starts_with('#') {
                continue;
            }
            let vals = l
                .split(',')
                .map(|f| f.trim().parse::<f64>())
                .collect::<std::result::Result<Vec<f64>, _>>()
                .map_err(|e| Error::Parse { line, msg: format!("bad number: {e}") })?;
            if vals.len() != 4 * n + 1 {
                return Err(Error::Parse {
                    line,
                    msg: format!("expected {} fields (4n coordinates and a weight), found {}", 4 * n + 1, vals.len()),
                });
            }
            if vals.iter().any(|v| !v.is_finite()) {
                return Err(Error::Parse { line, msg: "non-finite value".into() });
            }
            let coords = &vals[..4 * n];
            let norm = coords.iter().map(|c| c * c).sum::<f64>().sqrt();
            if (norm - 1.0).abs() > RENORMALIZE_WARN {
                renormalized += 1;
            }
            let point = SpherePoint::from_real(coords).map_err(|e| Error::Parse { line, msg: e.to_string() })?;
            atoms.push(Atom { point, weight: vals[4 * n] });
        }
        if atoms.is_empty() {
            return Err(Error::Parse { line: text.lines().count().max(1), msg: "no atoms".into() });
        }
        let mu =
            Self::new(name, atoms)?.with_blocks(blocks).map_err(|e| Error::Parse { line: 1, msg: e.to_string() })?;
        Ok((mu, renormalized))
    }

    pub fn load(path: &Path) -> Result<(Self, usize)> {
        let text = fs::read_to_string(path)?;
        let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        Self::parse(name, &text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quat::sample_sphere;

    #[test]
    fn text_round_trip() {
        let pts = sample_sphere(2, 5, 3).unwrap();
        let mu = DiscreteMeasure::uniform_weights("u", pts).unwrap().with_blocks(5).unwrap();
        let (back, renorm) = DiscreteMeasure::parse("u", &mu.to_text()).unwrap();
        assert_eq!(renorm, 0);
        assert_eq!(back, mu);
    }

    #[test]
    fn renormalizes_and_counts() {
        let text = "# n=2\n2,0,0,0,0,0,0,0,1\n\n# comment\n0,0,0,0,1,0,0,0,0.5\n";
        let (mu, renorm) = DiscreteMeasure::parse("m", text).unwrap();
        assert_eq!(renorm, 1);
        assert_eq!(mu.len(), 2);
        assert_eq!(mu.atoms()[0].point, SpherePoint::basis(2, 0));
    }

    #[test]
    fn reports_line_numbers() {
        let err = DiscreteMeasure::parse("m", "# n=2\n1,0,0,0,0,0,0,0,1\n1,0,0\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");
        let err = DiscreteMeasure::parse("m", "# n=2\n1,0,0,0,0,0,x,0,1\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
        let err = DiscreteMeasure::parse("m", "n=2\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
        let err = DiscreteMeasure::parse("m", "# n=2\n0,0,0,0,0,0,0,0,1\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
        assert!(DiscreteMeasure::parse("m", "# n=2\n").is_err());
        assert!(DiscreteMeasure::parse("m", "# n=2\n# blocks=2\n1,0,0,0,0,0,0,0,1\n").is_err());
    }

    #[test]
    fn rejects_mixed_dimensions() {
        let atoms = vec![
            Atom { point: SpherePoint::basis(2, 0), weight: 1.0 },
            Atom { point: SpherePoint::basis(3, 0), weight: 1.0 },
        ];
        assert!(DiscreteMeasure::new("bad", atoms).is_err());
        assert!(DiscreteMeasure::new("empty", vec![]).is_err());
    }
}
