//! Domain types for the building project, property-merge semantics,
//! geometric derivation, and validation.

mod project_file;
mod tables;

pub use project_file::{load_project, load_project_from_str, parse_project, to_project_text};
pub use tables::{load_climate, load_climate_from_str, load_material_db, load_material_db_from_str};

use std::collections::HashMap;

use thiserror::Error;

use crate::sampling::UncertainInput;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {msg}")]
    Syntax { path: String, line: usize, msg: String },
    #[error("{path}: schema violation: {msg}")]
    Schema { path: String, msg: String },
    #[error("project violates invariants:\n{0}")]
    Invalid(ValidationReport),
    #[error("duplicate material name '{name}' at {path}:{line}")]
    DuplicateMaterial {
        name: String,
        path: String,
        line: usize,
    },
    #[error("unresolved material references: {}", .0.join("; "))]
    UnresolvedMaterials(Vec<String>),
}

/// One row of the material database.
#[derive(Debug, Clone, PartialEq)]
pub struct MaterialRecord {
    pub name: String,
    pub thickness: Option<f64>,
    pub conductivity: Option<f64>,
    /// Thermal resistance in m²K/W; derived as thickness/conductivity when
    /// the row gives only those two.
    pub rsi: f64,
    /// Fraction of the mean used as standard deviation.
    pub std_fraction: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GlazingSpec {
    /// Thermal transmittance, W/(m²·K).
    pub u_value: f64,
    /// Solar heat gain coefficient.
    pub shgc: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Orientation {
    North,
    South,
    East,
    West,
}

pub const ORIENTATIONS: [Orientation; 4] = [
    Orientation::North,
    Orientation::South,
    Orientation::East,
    Orientation::West,
];

/// Window-to-wall ratio per facade orientation.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Wwr {
    pub north: f64,
    pub south: f64,
    pub east: f64,
    pub west: f64,
}

impl Wwr {
    pub fn get(&self, o: Orientation) -> f64 {
        match o {
            Orientation::North => self.north,
            Orientation::South => self.south,
            Orientation::East => self.east,
            Orientation::West => self.west,
        }
    }
}

/// Per-orientation overrides a design option applies on top of the project
/// geometry's WWR.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct WwrOverride {
    pub north: Option<f64>,
    pub south: Option<f64>,
    pub east: Option<f64>,
    pub west: Option<f64>,
}

impl WwrOverride {
    pub fn resolve(&self, base: Wwr) -> Wwr {
        Wwr {
            north: self.north.unwrap_or(base.north),
            south: self.south.unwrap_or(base.south),
            east: self.east.unwrap_or(base.east),
            west: self.west.unwrap_or(base.west),
        }
    }

    fn entries(&self) -> [(Orientation, Option<f64>); 4] {
        [
            (Orientation::North, self.north),
            (Orientation::South, self.south),
            (Orientation::East, self.east),
            (Orientation::West, self.west),
        ]
    }
}

/// Rectangular multi-story massing. `length` is the east-west extent (the
/// north and south facades), `width` the north-south extent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BuildingGeometry {
    pub length: f64,
    pub width: f64,
    pub stories: u32,
    pub story_height: f64,
    pub wwr: Wwr,
}

/// Envelope areas derived from the geometry, m².
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvelopeAreas {
    pub gross_floor: f64,
    pub roof: f64,
    pub ground_floor: f64,
    /// Opaque wall area per orientation, [`ORIENTATIONS`] order.
    pub opaque: [f64; 4],
    /// Glazing area per orientation, [`ORIENTATIONS`] order.
    pub glazing: [f64; 4],
}

impl EnvelopeAreas {
    pub fn total_glazing(&self) -> f64 {
        self.glazing.iter().sum()
    }
}

/// Internal loads and air change rates shared by every design option.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemLoads {
    pub equipment_per_area: f64,
    pub lighting_per_area: f64,
    pub people_per_area: f64,
    pub infiltration_per_area: f64,
    pub ventilation_per_area: f64,
    pub ventilation_per_person: f64,
    /// Average schedule multiplier applied to internal gains.
    pub operation_fraction: f64,
    /// Multiplier on the infiltration flow (mean 1.0), the occupant
    /// window-opening stand-in.
    pub infiltration_schedule_factor: f64,
    /// Sensible+latent gain per person, W.
    pub people_gain_w: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HvacSettings {
    pub heating_setpoint: f64,
    pub cooling_setpoint: f64,
}

/// A project property that is either an explicit value or a reference into
/// the material database (resolved by the merge step). `+`-separated
/// references name layers whose RSI values are summed.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MaterialProperty {
    pub value: Option<f64>,
    pub reference: Option<String>,
    /// Dispersion attached when the value was filled from the database.
    pub std_fraction: Option<f64>,
}

impl MaterialProperty {
    pub fn of(value: f64) -> Self {
        MaterialProperty {
            value: Some(value),
            reference: None,
            std_fraction: None,
        }
    }
}

/// One candidate building design.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignOption {
    pub id: u32,
    pub name: String,
    pub wall_rsi: MaterialProperty,
    pub floor_rsi: MaterialProperty,
    pub roof_rsi: MaterialProperty,
    pub glazing_u: MaterialProperty,
    pub glazing_shgc: Option<f64>,
    pub wwr: WwrOverride,
    pub hvac: HvacSettings,
    /// Inert key/value pairs (`meta_*` keys) carried through untouched.
    pub metadata: Vec<(String, String)>,
}

impl DesignOption {
    /// Glazing spec once the U-value is resolved and the SHGC present.
    pub fn glazing(&self) -> Option<GlazingSpec> {
        Some(GlazingSpec {
            u_value: self.glazing_u.value?,
            shgc: self.glazing_shgc?,
        })
    }
}

/// Monthly climate row: outdoor mean temperature, month length, and mean
/// solar irradiance on each facade orientation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonthRow {
    pub month: u32,
    pub t_out: f64,
    pub hours: f64,
    pub irradiance: [f64; 4],
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClimateTable {
    pub months: Vec<MonthRow>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CampaignSettings {
    pub n_samples: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FileRefs {
    pub materials: String,
    pub climate: String,
}

/// The full project description.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectConfig {
    pub geometry: BuildingGeometry,
    pub loads: SystemLoads,
    pub hvac: HvacSettings,
    pub hvac_metadata: Vec<(String, String)>,
    pub options: Vec<DesignOption>,
    pub uncertain_inputs: Vec<UncertainInput>,
    pub campaign: CampaignSettings,
    pub files: FileRefs,
}

/// Field names an uncertain input may target. The first four are per-option
/// properties; the rest live on the shared [`SystemLoads`].
pub const UNCERTAIN_TARGETS: &[&str] = &[
    "wall_rsi",
    "floor_rsi",
    "roof_rsi",
    "glazing_u",
    "glazing_shgc",
    "equipment_per_area",
    "lighting_per_area",
    "people_per_area",
    "infiltration_per_area",
    "ventilation_per_area",
    "ventilation_per_person",
    "infiltration_schedule_factor",
    "operation_fraction",
];

/// Envelope areas from the geometry.
///
/// Per orientation: facade = facade_length · stories · story_height,
/// glazing = facade · wwr, opaque = facade − glazing.
pub fn derive_areas(g: &BuildingGeometry) -> EnvelopeAreas {
    let stories = f64::from(g.stories);
    let footprint = g.length * g.width;
    let mut opaque = [0.0; 4];
    let mut glazing = [0.0; 4];
    for (i, o) in ORIENTATIONS.iter().enumerate() {
        let facade_len = match o {
            Orientation::North | Orientation::South => g.length,
            Orientation::East | Orientation::West => g.width,
        };
        let facade = facade_len * stories * g.story_height;
        glazing[i] = facade * g.wwr.get(*o);
        opaque[i] = facade - glazing[i];
    }
    EnvelopeAreas {
        gross_floor: footprint * stories,
        roof: footprint,
        ground_floor: footprint,
        opaque,
        glazing,
    }
}

/// One itemized validation failure.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub path: String,
    pub rule: String,
    pub actual: String,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {} (actual {})", self.path, self.rule, self.actual)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

impl std::fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for v in &self.violations {
            writeln!(f, "  {v}")?;
        }
        Ok(())
    }
}

/// Check every type invariant and cross-reference; an empty report means the
/// project is sound.
pub fn validate(project: &ProjectConfig) -> ValidationReport {
    let mut out = Vec::new();
    let mut push = |path: &str, rule: &str, actual: String| {
        out.push(Violation {
            path: path.to_string(),
            rule: rule.to_string(),
            actual,
        })
    };

    let g = &project.geometry;
    if !(g.length > 0.0) {
        push("geometry.length", "length > 0 (BuildingGeometry)", g.length.to_string());
    }
    if !(g.width > 0.0) {
        push("geometry.width", "width > 0 (BuildingGeometry)", g.width.to_string());
    }
    if g.stories < 1 {
        push("geometry.stories", "stories >= 1 (BuildingGeometry)", g.stories.to_string());
    }
    if !(g.story_height > 0.0) {
        push(
            "geometry.story_height",
            "story_height > 0 (BuildingGeometry)",
            g.story_height.to_string(),
        );
    }
    for o in ORIENTATIONS {
        let w = g.wwr.get(o);
        if !(0.0..=1.0).contains(&w) {
            push(
                &format!("geometry.wwr.{o:?}"),
                "wwr in [0, 1] (BuildingGeometry)",
                w.to_string(),
            );
        }
    }

    let l = &project.loads;
    let nonneg: [(&str, f64); 7] = [
        ("loads.equipment_per_area", l.equipment_per_area),
        ("loads.lighting_per_area", l.lighting_per_area),
        ("loads.people_per_area", l.people_per_area),
        ("loads.infiltration_per_area", l.infiltration_per_area),
        ("loads.ventilation_per_area", l.ventilation_per_area),
        ("loads.ventilation_per_person", l.ventilation_per_person),
        ("loads.people_gain_w", l.people_gain_w),
    ];
    for (path, v) in nonneg {
        if !(v >= 0.0) {
            push(path, ">= 0 (SystemLoads)", v.to_string());
        }
    }
    if !(l.operation_fraction > 0.0 && l.operation_fraction <= 1.0) {
        push(
            "loads.operation_fraction",
            "operation_fraction in (0, 1] (SystemLoads)",
            l.operation_fraction.to_string(),
        );
    }
    if !(l.infiltration_schedule_factor > 0.0) {
        push(
            "loads.infiltration_schedule_factor",
            "infiltration_schedule_factor > 0 (SystemLoads)",
            l.infiltration_schedule_factor.to_string(),
        );
    }

    if !(project.hvac.heating_setpoint < project.hvac.cooling_setpoint) {
        push(
            "hvac",
            "heating_setpoint < cooling_setpoint (HvacSettings)",
            format!(
                "heating {} vs cooling {}",
                project.hvac.heating_setpoint, project.hvac.cooling_setpoint
            ),
        );
    }

    if project.options.is_empty() {
        push("options", "at least one design option (ProjectConfig)", "0".into());
    }
    let mut seen_ids: HashMap<u32, usize> = HashMap::new();
    for (i, opt) in project.options.iter().enumerate() {
        let base = format!("options[{}]", opt.id);
        if let Some(first) = seen_ids.insert(opt.id, i) {
            push(
                &base,
                "option id unique within project (DesignOption)",
                format!("also used by options[{first}]"),
            );
        }
        for (field, prop) in [
            ("wall_rsi", &opt.wall_rsi),
            ("floor_rsi", &opt.floor_rsi),
            ("roof_rsi", &opt.roof_rsi),
        ] {
            match prop.value {
                Some(v) if !(v > 0.0) => push(
                    &format!("{base}.{field}"),
                    "RSI > 0 (DesignOption)",
                    v.to_string(),
                ),
                None if prop.reference.is_none() => push(
                    &format!("{base}.{field}"),
                    "value or material reference required (DesignOption)",
                    "absent".into(),
                ),
                _ => {}
            }
        }
        match opt.glazing_u.value {
            Some(u) if !(u > 0.0) => push(
                &format!("{base}.glazing.u_value"),
                "u_value > 0 (GlazingSpec)",
                u.to_string(),
            ),
            None if opt.glazing_u.reference.is_none() => push(
                &format!("{base}.glazing.u_value"),
                "value or material reference required (GlazingSpec)",
                "absent".into(),
            ),
            _ => {}
        }
        match opt.glazing_shgc {
            Some(s) if !(s > 0.0 && s <= 1.0) => push(
                &format!("{base}.glazing.shgc"),
                "0 < shgc <= 1 (GlazingSpec)",
                s.to_string(),
            ),
            None => push(
                &format!("{base}.glazing.shgc"),
                "shgc required (GlazingSpec)",
                "absent".into(),
            ),
            _ => {}
        }
        for (o, w) in opt.wwr.entries() {
            if let Some(w) = w {
                if !(0.0..=1.0).contains(&w) {
                    push(
                        &format!("{base}.wwr.{o:?}"),
                        "wwr in [0, 1] (DesignOption)",
                        w.to_string(),
                    );
                }
            }
        }
        if !(opt.hvac.heating_setpoint < opt.hvac.cooling_setpoint) {
            push(
                &format!("{base}.hvac"),
                "heating_setpoint < cooling_setpoint (HvacSettings)",
                format!(
                    "heating {} vs cooling {}",
                    opt.hvac.heating_setpoint, opt.hvac.cooling_setpoint
                ),
            );
        }
    }

    if project.campaign.n_samples < 2 {
        push(
            "campaign.samples",
            "N >= 2 (ProjectConfig)",
            project.campaign.n_samples.to_string(),
        );
    }

    let mut ids: Vec<u32> = Vec::new();
    for input in &project.uncertain_inputs {
        let base = format!("uncertain[{}]", input.id);
        ids.push(input.id);
        if !UNCERTAIN_TARGETS.contains(&input.target.as_str()) {
            push(
                &format!("{base}.target"),
                "target resolves to an existing field (UncertainInput)",
                format!("dangling reference '{}'", input.target),
            );
        }
        if let Err(e) = input.check() {
            push(&base, "distribution parameters valid (UncertainInput)", e.to_string());
        }
    }
    ids.sort_unstable();
    let contiguous: Vec<u32> = (1..=project.uncertain_inputs.len() as u32).collect();
    if !project.uncertain_inputs.is_empty() && ids != contiguous {
        push(
            "uncertain",
            "ids form the contiguous index 1..k (UncertainInput)",
            format!("{ids:?}"),
        );
    }

    ValidationReport { violations: out }
}

enum RsiMapping {
    Direct,
    /// U-value from an assembly resistance: u = 1/rsi.
    Reciprocal,
}

fn resolve_property(
    prop: &mut MaterialProperty,
    field: &str,
    option_id: u32,
    index: &HashMap<&str, &MaterialRecord>,
    mapping: RsiMapping,
    unresolved: &mut Vec<String>,
) {
    if prop.value.is_some() {
        return; // project values take precedence over the database
    }
    let Some(reference) = prop.reference.clone() else {
        unresolved.push(format!(
            "option {option_id}: {field} has neither a value nor a material reference"
        ));
        return;
    };
    let mut rsi_total = 0.0;
    let mut var_weighted = 0.0;
    let mut missing = Vec::new();
    for layer in reference.split('+').map(str::trim) {
        match index.get(layer) {
            Some(rec) => {
                rsi_total += rec.rsi;
                var_weighted += (rec.std_fraction * rec.rsi).powi(2);
            }
            None => missing.push(format!("'{layer}' (option {option_id}, {field})")),
        }
    }
    if !missing.is_empty() {
        unresolved.extend(missing);
        return;
    }
    let std_fraction = if rsi_total > 0.0 {
        var_weighted.sqrt() / rsi_total
    } else {
        0.0
    };
    prop.value = Some(match mapping {
        RsiMapping::Direct => rsi_total,
        RsiMapping::Reciprocal => 1.0 / rsi_total,
    });
    prop.std_fraction = Some(std_fraction);
}

/// Fill every unresolved design-option property from the material database
/// by exact, case-sensitive name match. Project values take precedence.
pub fn merge_material_properties(
    project: &ProjectConfig,
    db: &[MaterialRecord],
) -> Result<ProjectConfig, ModelError> {
    let index: HashMap<&str, &MaterialRecord> =
        db.iter().map(|r| (r.name.as_str(), r)).collect();
    let mut merged = project.clone();
    let mut unresolved = Vec::new();
    for opt in &mut merged.options {
        resolve_property(
            &mut opt.wall_rsi,
            "wall_rsi",
            opt.id,
            &index,
            RsiMapping::Direct,
            &mut unresolved,
        );
        resolve_property(
            &mut opt.floor_rsi,
            "floor_rsi",
            opt.id,
            &index,
            RsiMapping::Direct,
            &mut unresolved,
        );
        resolve_property(
            &mut opt.roof_rsi,
            "roof_rsi",
            opt.id,
            &index,
            RsiMapping::Direct,
            &mut unresolved,
        );
        resolve_property(
            &mut opt.glazing_u,
            "glazing_u",
            opt.id,
            &index,
            RsiMapping::Reciprocal,
            &mut unresolved,
        );
    }
    if unresolved.is_empty() {
        Ok(merged)
    } else {
        Err(ModelError::UnresolvedMaterials(unresolved))
    }
}

#[cfg(test)]
mod tests;
