//! Experiment configuration, read from TOML.
//!
//! ```toml
//! seed = 24301
//! tolerance_profile = "analytic"   # or "mesh"
//!
//! [cone]
//! model = "sphere"                 # sphere | quotient | kahler | mesh | icosphere
//! m = 4
//! # quotient:  group = "antipodal"  or  group = { order = 3, weights = [1, 1] }
//! # kahler:    n = 2, order = 3, weights = [1, 1]   (omit order for flat ℂⁿ)
//! # mesh:      path = "surface.off"
//! # icosphere: level = 3
//! # eigen_table = "table.json"     # precomputed function spectrum
//! n_eigs = 16
//!
//! [spectrum]
//! window = [0.0, 3.0]
//!
//! [frequency]
//! radii = { min = 0.0625, max = 16.0, per_octave = 4 }
//! kind = "one_form"                # or "function"
//! terms = [{ type = "IV", rate = 1.0, coefficient = 1.0, index = 0 }]
//! # corpus_index = 7               # take the field from the seeded corpus instead
//!
//! [oracle]
//! circle_modes = 6
//! icosphere_levels = [3, 4]
//! ```

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use conharm::cross_section::{CrossSection, EigenTable, GroupAction};
use conharm::frequency::ToleranceProfile;
use conharm::mesh::TriMesh;
use conharm::spectra::KahlerCone;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub tolerance_profile: ToleranceProfile,
    pub out_dir: Option<PathBuf>,
    pub cone: ConeConfig,
    pub spectrum: SpectrumConfig,
    pub frequency: FrequencyConfig,
    pub oracle: OracleConfig,
    pub verify: VerifyConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            seed: conharm::corpus::DEFAULT_SEED,
            tolerance_profile: ToleranceProfile::Analytic,
            out_dir: None,
            cone: ConeConfig::default(),
            spectrum: SpectrumConfig::default(),
            frequency: FrequencyConfig::default(),
            oracle: OracleConfig::default(),
            verify: VerifyConfig::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GroupSpec {
    Named(String),
    Cyclic { order: u32, weights: Vec<u32> },
}

impl GroupSpec {
    fn action(&self) -> Result<GroupAction> {
        Ok(match self {
            GroupSpec::Named(s) if s == "antipodal" => GroupAction::Antipodal,
            GroupSpec::Named(s) if s == "trivial" => GroupAction::Trivial,
            GroupSpec::Named(s) => bail!("unknown group '{s}' (expected antipodal, trivial or {{ order, weights }})"),
            GroupSpec::Cyclic { order, weights } => GroupAction::CyclicDiagonal {
                order: *order,
                weights: weights.clone(),
            },
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConeModel {
    Sphere,
    Quotient,
    Kahler,
    Mesh,
    Icosphere,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConeConfig {
    pub model: ConeModel,
    pub m: Option<usize>,
    pub group: Option<GroupSpec>,
    pub n: Option<usize>,
    pub order: Option<u32>,
    pub weights: Option<Vec<u32>>,
    pub path: Option<PathBuf>,
    pub level: Option<u32>,
    pub eigen_table: Option<PathBuf>,
    pub n_eigs: usize,
}

impl Default for ConeConfig {
    fn default() -> Self {
        Self {
            model: ConeModel::Sphere,
            m: Some(4),
            group: None,
            n: None,
            order: None,
            weights: None,
            path: None,
            level: None,
            eigen_table: None,
            n_eigs: 16,
        }
    }
}

impl ConeConfig {
    pub fn kahler(&self) -> Result<Option<KahlerCone>> {
        if self.model != ConeModel::Kahler {
            return Ok(None);
        }
        let n = self.n.context("kahler cone needs n")?;
        Ok(Some(match self.order {
            None | Some(1) => KahlerCone::Flat { n },
            Some(order) => KahlerCone::Quotient {
                order,
                weights: self.weights.clone().unwrap_or_else(|| vec![1; n]),
            },
        }))
    }

    /// Builds the cross-section; relative paths resolve against `base`.
    pub fn cross_section(&self, base: &Path) -> Result<CrossSection> {
        let m = || self.m.context("cone.m is required for this model");
        Ok(match self.model {
            ConeModel::Sphere => CrossSection::round_sphere(m()?)?,
            ConeModel::Quotient => {
                let g = self.group.as_ref().context("quotient cone needs a group")?;
                CrossSection::sphere_quotient(m()?, g.action()?)?
            }
            ConeModel::Kahler => self.kahler()?.expect("kahler model").cross_section()?,
            ConeModel::Mesh => {
                let path = base.join(self.path.as_ref().context("mesh cone needs a path")?);
                let text = std::fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
                let mesh = TriMesh::parse_off(&text)?;
                let id = path.file_stem().map_or("mesh".into(), |s| s.to_string_lossy().into_owned());
                CrossSection::from_mesh(id, mesh)?
            }
            ConeModel::Icosphere => {
                let level = self.level.context("icosphere cone needs a level")?;
                if level > 6 {
                    bail!("icosphere level {level} is above the supported 6");
                }
                CrossSection::from_mesh(format!("icosphere-{level}"), TriMesh::icosphere(level))?
            }
        })
    }

    /// A precomputed function table, validated on load.
    pub fn external_table(&self, base: &Path, section: &CrossSection) -> Result<Option<EigenTable>> {
        let Some(p) = &self.eigen_table else {
            return Ok(None);
        };
        let path = base.join(p);
        let text = std::fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
        let table = EigenTable::from_json(&text).with_context(|| format!("validating eigendata {}", path.display()))?;
        if table.dim_link != section.dim_link {
            bail!(
                "eigendata {} is for dim X = {}, cone has dim X = {}",
                path.display(),
                table.dim_link,
                section.dim_link
            );
        }
        Ok(Some(table))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpectrumConfig {
    pub window: [f64; 2],
    pub oneform: bool,
}

impl Default for SpectrumConfig {
    fn default() -> Self {
        Self {
            window: [0.0, 3.0],
            oneform: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RadiusGrid {
    pub min: f64,
    pub max: f64,
    pub per_octave: u32,
}

impl RadiusGrid {
    pub fn radii(&self) -> Result<Vec<f64>> {
        if !(self.min > 0.0 && self.max > self.min && self.per_octave > 0) {
            bail!("radius grid needs 0 < min < max and per_octave > 0");
        }
        let steps = ((self.max / self.min).log2() * f64::from(self.per_octave)).round() as i64;
        Ok((0..=steps)
            .map(|k| self.min * 2f64.powf(k as f64 / f64::from(self.per_octave)))
            .collect())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermSpec {
    /// "function" or a 1-form type I..VI.
    #[serde(rename = "type")]
    pub type_name: String,
    pub rate: f64,
    #[serde(default = "one")]
    pub coefficient: f64,
    pub eigenvalue: Option<f64>,
    #[serde(default)]
    pub index: usize,
}

fn one() -> f64 {
    1.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldKindSpec {
    Function,
    OneForm,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FrequencyConfig {
    pub radii: RadiusGrid,
    pub kind: FieldKindSpec,
    pub terms: Vec<TermSpec>,
    pub corpus_index: Option<usize>,
    pub decay_k_max: u32,
    pub delta: f64,
    pub d_bar: Option<f64>,
}

impl Default for FrequencyConfig {
    fn default() -> Self {
        Self {
            radii: RadiusGrid {
                min: 0.0625,
                max: 16.0,
                per_octave: 4,
            },
            kind: FieldKindSpec::OneForm,
            terms: vec![TermSpec {
                type_name: "I".into(),
                rate: 1.0,
                coefficient: 1.0,
                eigenvalue: None,
                index: 0,
            }],
            corpus_index: None,
            decay_k_max: 10,
            delta: 0.5,
            d_bar: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OracleConfig {
    pub circle_modes: usize,
    pub icosphere_levels: Vec<u32>,
    pub n_eigs: usize,
    pub ode: bool,
    pub fd: bool,
    /// Write FD grids (binary + JSON sidecar) next to the reports.
    pub dump_grids: bool,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            circle_modes: 6,
            icosphere_levels: vec![3, 4],
            n_eigs: 9,
            ode: true,
            fd: true,
            dump_grids: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyConfig {
    /// Threshold for the diagnostic monotonicity rerun reported alongside
    /// the acceptance suite; the suite itself always uses its own tolerances.
    pub tolerance: f64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self { tolerance: 1e-9 }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).context("parsing config")?;
        cfg.check()?;
        Ok(cfg)
    }

    pub fn check(&self) -> Result<()> {
        let [lo, hi] = self.spectrum.window;
        if !(lo.is_finite() && hi.is_finite()) || lo > hi {
            bail!("spectrum window [{lo}, {hi}) is not an interval");
        }
        if !(self.verify.tolerance >= 0.0) {
            bail!("verify tolerance must be nonnegative");
        }
        if !(self.frequency.delta > 0.0 && self.frequency.delta < 1.0) {
            bail!("frequency.delta must lie in (0, 1)");
        }
        Ok(())
    }

    /// sha256 of the effective configuration, in canonical JSON.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("config serialises");
        let digest = Sha256::digest(canonical.as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip_and_hash_is_stable() {
        let c = ExperimentConfig::default();
        let text = toml::to_string(&c).unwrap();
        let back = ExperimentConfig::from_toml(&text).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.hash(), c.hash());
        assert_eq!(c.hash().len(), 64);
    }

    #[test]
    fn quotient_group_forms() {
        let c = ExperimentConfig::from_toml(
            "[cone]\nmodel = \"quotient\"\nm = 4\ngroup = { order = 3, weights = [1, 1] }\n",
        )
        .unwrap();
        let s = c.cone.cross_section(Path::new(".")).unwrap();
        assert_eq!(s.id, "S3/Z3(1,1)");
        let c = ExperimentConfig::from_toml("[cone]\nmodel = \"quotient\"\nm = 4\ngroup = \"antipodal\"\n").unwrap();
        assert_eq!(c.cone.cross_section(Path::new(".")).unwrap().id, "S3/Z2");
    }

    #[test]
    fn bad_configs_rejected() {
        assert!(ExperimentConfig::from_toml("bogus = 1\n").is_err());
        assert!(ExperimentConfig::from_toml("[spectrum]\nwindow = [2.0, 1.0]\n").is_err());
        let r = RadiusGrid {
            min: 1.0,
            max: 4.0,
            per_octave: 2,
        };
        assert_eq!(r.radii().unwrap().len(), 5);
    }
}
