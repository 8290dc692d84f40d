//! Vortex configurations: source points of the two components with
//! multiplicities, and the `component x y multiplicity` text format.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

/// One Dirac source `4π m δ_p` in component `component` (0 or 1).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Vortex {
    pub point: [f64; 2],
    pub component: usize,
    pub multiplicity: u32,
}

/// A distinct location together with its local multiplicities `(ν₁, ν₂)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Site {
    pub point: [f64; 2],
    pub nu: [u32; 2],
}

/// Points closer than this (relative to the domain scale) are treated as
/// coincident.
const MERGE_TOL: f64 = 1e-12;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct VortexSet {
    vortices: Vec<Vortex>,
}

impl VortexSet {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Builds a set, merging coincident points within a component.
    pub fn new(vortices: impl IntoIterator<Item = Vortex>) -> Result<Self> {
        let mut set = VortexSet::default();
        for v in vortices {
            set.push(v, |a, b| ((a[0] - b[0]).hypot(a[1] - b[1])) <= MERGE_TOL)?;
        }
        Ok(set)
    }

    /// Builds a set of points on the torus of side lengths `lengths`: points
    /// are reduced into the fundamental cell before merging.
    pub fn on_torus(vortices: impl IntoIterator<Item = Vortex>, lengths: [f64; 2]) -> Result<Self> {
        let wrap = |p: [f64; 2]| [p[0].rem_euclid(lengths[0]), p[1].rem_euclid(lengths[1])];
        let tol = MERGE_TOL * lengths[0].max(lengths[1]);
        let same = |a: [f64; 2], b: [f64; 2]| {
            let f = |d: f64, l: f64| ((d + 0.5 * l).rem_euclid(l) - 0.5 * l).abs();
            f(a[0] - b[0], lengths[0]).hypot(f(a[1] - b[1], lengths[1])) <= tol
        };
        let mut set = VortexSet::default();
        for mut v in vortices {
            v.point = wrap(v.point);
            set.push(v, same)?;
        }
        Ok(set)
    }

    /// One vortex of multiplicity 1 in each component at the same point.
    pub fn shared(point: [f64; 2], nu: [u32; 2]) -> Self {
        let vortices = (0..2)
            .filter(|&c| nu[c] > 0)
            .map(|c| Vortex { point, component: c, multiplicity: nu[c] })
            .collect();
        VortexSet { vortices }
    }

    fn push(&mut self, v: Vortex, same: impl Fn([f64; 2], [f64; 2]) -> bool) -> Result<()> {
        if v.component > 1 {
            return Err(Error::InvalidArgument(format!("component index {} not in {{0, 1}}", v.component)));
        }
        if v.multiplicity == 0 {
            return Err(Error::InvalidArgument("vortex multiplicity must be at least 1".into()));
        }
        if !(v.point[0].is_finite() && v.point[1].is_finite()) {
            return Err(Error::InvalidArgument("vortex coordinates must be finite".into()));
        }
        match self
            .vortices
            .iter_mut()
            .find(|w| w.component == v.component && same(w.point, v.point))
        {
            Some(w) => w.multiplicity += v.multiplicity,
            None => self.vortices.push(v),
        }
        Ok(())
    }

    pub fn vortices(&self) -> &[Vortex] {
        &self.vortices
    }

    pub fn is_empty(&self) -> bool {
        self.vortices.is_empty()
    }

    /// Total multiplicities `(N₁, N₂)`.
    pub fn totals(&self) -> [u32; 2] {
        let mut n = [0, 0];
        for v in &self.vortices {
            n[v.component] += v.multiplicity;
        }
        n
    }

    /// Distinct locations with local multiplicities, in first-seen order.
    pub fn sites(&self) -> Vec<Site> {
        let mut sites: Vec<Site> = Vec::new();
        for v in &self.vortices {
            match sites.iter_mut().find(|s| s.point == v.point) {
                Some(s) => s.nu[v.component] += v.multiplicity,
                None => {
                    let mut nu = [0, 0];
                    nu[v.component] = v.multiplicity;
                    sites.push(Site { point: v.point, nu });
                }
            }
        }
        sites
    }

    /// Same configuration with all multiplicities multiplied by `k`.
    pub fn scaled(&self, k: u32) -> Self {
        VortexSet {
            vortices: self
                .vortices
                .iter()
                .map(|v| Vortex { multiplicity: v.multiplicity * k, ..*v })
                .collect(),
        }
    }

    /// Exchanges the roles of the two components.
    pub fn swapped(&self) -> Self {
        VortexSet {
            vortices: self.vortices.iter().map(|v| Vortex { component: 1 - v.component, ..*v }).collect(),
        }
    }

    /// Parses the `component x y multiplicity` format. Components are
    /// written 1 or 2; `#` starts a comment.
    pub fn parse(text: &str, origin: &str) -> Result<Vec<Vortex>> {
        let mut out = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| Error::Parse { path: origin.to_string(), line: lineno + 1, msg };
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 4 {
                return Err(err(format!("expected `component x y multiplicity`, got {} fields", fields.len())));
            }
            let component: usize = fields[0].parse().map_err(|_| err(format!("bad component `{}`", fields[0])))?;
            if !(1..=2).contains(&component) {
                return Err(err(format!("component must be 1 or 2, got {component}")));
            }
            let x: f64 = fields[1].parse().map_err(|_| err(format!("bad coordinate `{}`", fields[1])))?;
            let y: f64 = fields[2].parse().map_err(|_| err(format!("bad coordinate `{}`", fields[2])))?;
            let multiplicity: u32 = fields[3].parse().map_err(|_| err(format!("bad multiplicity `{}`", fields[3])))?;
            if multiplicity == 0 {
                return Err(err("multiplicity must be at least 1".into()));
            }
            out.push(Vortex { point: [x, y], component: component - 1, multiplicity });
        }
        Ok(out)
    }

    pub fn read(path: &Path) -> Result<Vec<Vortex>> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn to_text(&self) -> String {
        let mut s = String::from("# component x y multiplicity\n");
        for v in &self.vortices {
            s.push_str(&format!("{} {:?} {:?} {}\n", v.component + 1, v.point[0], v.point[1], v.multiplicity));
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn totals_and_sites() {
        let set = VortexSet::new([
            Vortex { point: [0.5, 0.5], component: 0, multiplicity: 1 },
            Vortex { point: [0.5, 0.5], component: 1, multiplicity: 1 },
            Vortex { point: [0.5, 0.5], component: 0, multiplicity: 1 },
            Vortex { point: [0.1, 0.2], component: 1, multiplicity: 3 },
        ])
        .unwrap();
        assert_eq!(set.totals(), [2, 4]);
        let sites = set.sites();
        assert_eq!(sites.len(), 2);
        assert_eq!(sites[0].nu, [2, 1]);
        assert_eq!(sites[1].nu, [0, 3]);
    }

    #[test]
    fn torus_reduction_merges_lattice_translates() {
        let set = VortexSet::on_torus(
            [
                Vortex { point: [0.25, 0.5], component: 0, multiplicity: 1 },
                Vortex { point: [1.25, -0.5], component: 0, multiplicity: 2 },
            ],
            [1.0, 1.0],
        )
        .unwrap();
        assert_eq!(set.vortices().len(), 1);
        assert_eq!(set.totals(), [3, 0]);
    }

    #[test]
    fn parse_with_comments() {
        let text = "# header\n1 0.5 0.5 1\n\n2 0.5 0.5 2  # trailing\n";
        let v = VortexSet::parse(text, "v.txt").unwrap();
        assert_eq!(v.len(), 2);
        assert_eq!(v[1].component, 1);
        assert_eq!(v[1].multiplicity, 2);
    }

    #[test]
    fn malformed_lines_report_position() {
        let err = VortexSet::parse("1 0.5 0.5 1\n3 0 0 1\n", "v.txt").unwrap_err();
        assert!(err.to_string().starts_with("v.txt:2:"), "{err}");
        assert!(VortexSet::parse("1 0.5 1\n", "v").is_err());
        assert!(VortexSet::parse("1 a 0.5 1\n", "v").is_err());
        assert!(VortexSet::parse("1 0 0.5 0\n", "v").is_err());
    }

    #[test]
    fn text_round_trip() {
        let set = VortexSet::new([
            Vortex { point: [0.1, 0.7], component: 0, multiplicity: 2 },
            Vortex { point: [0.3, 0.3], component: 1, multiplicity: 1 },
        ])
        .unwrap();
        let back = VortexSet::new(VortexSet::parse(&set.to_text(), "t").unwrap()).unwrap();
        assert_eq!(back, set);
    }
}
