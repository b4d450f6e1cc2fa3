//! Instance data model, JSON document, naming grammar and generators.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::sync::LazyLock;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use regex::Regex;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::geometry::CoordinateAxes;

/// Default per-photo processing time in seconds (the weighted recipe's mean).
pub const DEFAULT_LAMBDA: f64 = 26.72;
/// Default photo size in megabytes.
pub const DEFAULT_MU: f64 = 5.0;
/// Default link capacity in megabytes per second.
pub const DEFAULT_CAPACITY: f64 = 10.0;
/// Standard deviation of the weighted recipe's normal draws, in seconds.
pub const DEFAULT_WEIGHT_STDDEV: f64 = 5.0;
/// Smallest processing time a weighted draw is clamped to.
pub const MIN_LAMBDA: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeoPoint {
    pub lng: f64,
    pub lat: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Photo {
    pub id: String,
    #[serde(flatten)]
    pub location: GeoPoint,
    /// Processing time in seconds.
    pub lambda: f64,
    /// Size in megabytes.
    pub mu: f64,
    /// Id of the single drone storing the photo.
    pub stored_on: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Drone {
    pub id: String,
    /// Whether the drone can run a 3D reconstruction workload.
    pub capable: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkLink {
    pub a: String,
    pub b: String,
    /// Megabytes per second, shared by both directions.
    pub capacity: f64,
}

/// Maximum allowed transmission time per active demand.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Deadline {
    Seconds(f64),
    Unbounded,
}

impl Deadline {
    pub fn is_bounded(self) -> bool {
        matches!(self, Deadline::Seconds(_))
    }

    pub fn seconds(self) -> Option<f64> {
        match self {
            Deadline::Seconds(s) => Some(s),
            Deadline::Unbounded => None,
        }
    }

    /// Parses `inf` (any case) or a non-negative number of seconds.
    pub fn parse(text: &str) -> Result<Self> {
        let t = text.trim();
        if t.eq_ignore_ascii_case("inf") || t.eq_ignore_ascii_case("infinity") {
            return Ok(Deadline::Unbounded);
        }
        match t.parse::<f64>() {
            Ok(v) if v.is_finite() && v >= 0.0 => Ok(Deadline::Seconds(v)),
            Ok(v) if v == f64::INFINITY => Ok(Deadline::Unbounded),
            _ => Err(Error::instance("t_hat", format!("expected seconds or \"inf\", got `{text}`"))),
        }
    }
}

impl fmt::Display for Deadline {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Deadline::Seconds(s) => write!(f, "{s}"),
            Deadline::Unbounded => f.write_str("inf"),
        }
    }
}

impl Serialize for Deadline {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Deadline::Seconds(v) => s.serialize_f64(*v),
            Deadline::Unbounded => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Deadline {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(Deadline::Seconds(v)),
            Raw::Text(t) if t == "inf" => Ok(Deadline::Unbounded),
            Raw::Text(t) => Err(serde::de::Error::custom(format!(
                "expected a number or \"inf\", got \"{t}\""
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Instance {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub photos: Vec<Photo>,
    pub drones: Vec<Drone>,
    pub links: Vec<NetworkLink>,
    /// Minimum number of capable drones per sub-region.
    pub sigma: usize,
    pub t_hat: Deadline,
}

/// Parses and validates an instance document.
pub fn parse_instance(text: &str) -> Result<Instance> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let inst: Instance = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        Error::instance(path, e.into_inner().to_string())
    })?;
    inst.validate()?;
    Ok(inst)
}

/// Serialises an instance as a pretty-printed JSON document with a trailing newline.
pub fn write_instance(inst: &Instance) -> String {
    let mut out = serde_json::to_string_pretty(inst).expect("instance serialisation is infallible");
    out.push('\n');
    out
}

impl Instance {
    pub fn validate(&self) -> Result<()> {
        if self.photos.is_empty() {
            return Err(Error::instance("photos", "at least one photo is required"));
        }
        let mut drone_ids = HashSet::new();
        for (i, d) in self.drones.iter().enumerate() {
            if !drone_ids.insert(d.id.as_str()) {
                return Err(Error::instance(format!("drones[{i}].id"), format!("duplicate drone id `{}`", d.id)));
            }
        }
        if !self.drones.iter().any(|d| d.capable) {
            return Err(Error::instance("drones", "at least one capable drone is required"));
        }
        let mut photo_ids = HashSet::new();
        for (i, p) in self.photos.iter().enumerate() {
            let at = |field: &str| format!("photos[{i}].{field}");
            if !photo_ids.insert(p.id.as_str()) {
                return Err(Error::instance(at("id"), format!("duplicate photo id `{}`", p.id)));
            }
            if !p.location.lng.is_finite() {
                return Err(Error::instance(at("lng"), "must be finite"));
            }
            if !p.location.lat.is_finite() {
                return Err(Error::instance(at("lat"), "must be finite"));
            }
            if !(p.lambda > 0.0 && p.lambda.is_finite()) {
                return Err(Error::instance(at("lambda"), "must be positive"));
            }
            if !(p.mu > 0.0 && p.mu.is_finite()) {
                return Err(Error::instance(at("mu"), "must be positive"));
            }
            if !drone_ids.contains(p.stored_on.as_str()) {
                return Err(Error::instance(at("stored_on"), format!("unknown drone `{}`", p.stored_on)));
            }
        }
        let index: HashMap<&str, usize> =
            self.drones.iter().enumerate().map(|(i, d)| (d.id.as_str(), i)).collect();
        let mut uf = UnionFind::new(self.drones.len());
        for (i, l) in self.links.iter().enumerate() {
            let at = |field: &str| format!("links[{i}].{field}");
            let a = *index
                .get(l.a.as_str())
                .ok_or_else(|| Error::instance(at("a"), format!("unknown drone `{}`", l.a)))?;
            let b = *index
                .get(l.b.as_str())
                .ok_or_else(|| Error::instance(at("b"), format!("unknown drone `{}`", l.b)))?;
            if a == b {
                return Err(Error::instance(at("b"), "link endpoints must differ"));
            }
            if !(l.capacity > 0.0) {
                return Err(Error::instance(at("capacity"), "must be positive"));
            }
            uf.union(a, b);
        }
        if self.links.len() + 1 != self.drones.len() || uf.components() != 1 {
            return Err(Error::instance("links", "network is not a tree"));
        }
        let m = self.m();
        if self.sigma == 0 {
            return Err(Error::instance("sigma", "must be at least 1"));
        }
        if self.sigma > m {
            return Err(Error::instance(
                "sigma",
                format!("sigma exceeds capable drones ({} > {m})", self.sigma),
            ));
        }
        if let Deadline::Seconds(s) = self.t_hat {
            if !(s > 0.0 && s.is_finite()) {
                return Err(Error::instance("t_hat", "must be positive or \"inf\""));
            }
        }
        Ok(())
    }

    /// Number of capable drones, which is also the number of sub-regions.
    pub fn m(&self) -> usize {
        self.drones.iter().filter(|d| d.capable).count()
    }

    /// Indices of the capable drones in document order.
    pub fn capable_drones(&self) -> Vec<usize> {
        self.drones
            .iter()
            .enumerate()
            .filter(|(_, d)| d.capable)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn drone_index(&self, id: &str) -> Option<usize> {
        self.drones.iter().position(|d| d.id == id)
    }

    pub fn photo_index(&self, id: &str) -> Option<usize> {
        self.photos.iter().position(|p| p.id == id)
    }

    /// Storing drone index per photo. Panics on a dangling id (validated instances have none).
    pub fn storage(&self) -> Vec<usize> {
        let index: HashMap<&str, usize> =
            self.drones.iter().enumerate().map(|(i, d)| (d.id.as_str(), i)).collect();
        self.photos.iter().map(|p| index[p.stored_on.as_str()]).collect()
    }

    pub fn with_sigma(&self, sigma: usize) -> Instance {
        Instance { sigma, ..self.clone() }
    }

    pub fn with_t_hat(&self, t_hat: Deadline) -> Instance {
        Instance { t_hat, ..self.clone() }
    }

    pub fn total_lambda(&self) -> f64 {
        self.photos.iter().map(|p| p.lambda).sum()
    }
}

struct UnionFind {
    parent: Vec<usize>,
    count: usize,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect(), count: n }
    }

    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        let mut x = x;
        while self.parent[x] != r {
            let next = self.parent[x];
            self.parent[x] = r;
            x = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra] = rb;
            self.count -= 1;
        }
    }

    fn components(&self) -> usize {
        self.count
    }
}

/// Parsed form of an instance name `{u|w}-P{photos}D{drones}%D{percent}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NameSpec {
    pub weighted: bool,
    pub photos: usize,
    pub drones: usize,
    pub capable_pct: usize,
    /// `floor(drones * capable_pct / 100)`.
    pub capable_count: usize,
}

static NAME_RE: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"^([uw])-P(\d+)D(\d+)%D(\d+)$").expect("valid regex"));

pub fn parse_instance_name(name: &str) -> Result<NameSpec> {
    let caps = NAME_RE
        .captures(name.trim())
        .ok_or_else(|| Error::InstanceName(name.to_string()))?;
    let num = |i: usize| -> Result<usize> {
        caps[i].parse().map_err(|_| Error::InstanceName(name.to_string()))
    };
    let (photos, drones, capable_pct) = (num(2)?, num(3)?, num(4)?);
    if capable_pct > 100 {
        return Err(Error::InstanceName(name.to_string()));
    }
    Ok(NameSpec {
        weighted: &caps[1] == "w",
        photos,
        drones,
        capable_pct,
        capable_count: drones * capable_pct / 100,
    })
}

impl NameSpec {
    pub fn name(&self) -> String {
        format!(
            "{}-P{}D{}%D{}",
            if self.weighted { "w" } else { "u" },
            self.photos,
            self.drones,
            self.capable_pct
        )
    }

    /// Grid shape `(rows, cols)` with `rows >= cols` and `rows * cols == photos`,
    /// as close to square as the photo count allows.
    pub fn grid_shape(&self) -> (usize, usize) {
        let n = self.photos.max(1);
        let mut cols = (n as f64).sqrt() as usize;
        while cols > 1 && !n.is_multiple_of(cols) {
            cols -= 1;
        }
        (n / cols.max(1), cols.max(1))
    }
}

/// How photos are distributed over the drones' memories.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StoragePolicy {
    /// Contiguous boustrophedon segments of the grid, one per drone.
    #[default]
    Sweep,
    /// Uniformly random storing drone per photo.
    Random,
}

impl std::str::FromStr for StoragePolicy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sweep" => Ok(StoragePolicy::Sweep),
            "random" => Ok(StoragePolicy::Random),
            other => Err(Error::Generator(format!("unknown storage policy `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub rows: usize,
    pub cols: usize,
    pub spacing: f64,
    pub drones: usize,
    pub capable_count: usize,
    pub capacity: f64,
    pub storage: StoragePolicy,
    pub lambda: f64,
    pub mu: f64,
    pub sigma: usize,
    pub t_hat: Deadline,
    pub seed: u64,
    pub name: Option<String>,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            rows: 2,
            cols: 2,
            spacing: 1.0,
            drones: 2,
            capable_count: 2,
            capacity: DEFAULT_CAPACITY,
            storage: StoragePolicy::Sweep,
            lambda: DEFAULT_LAMBDA,
            mu: DEFAULT_MU,
            sigma: 1,
            t_hat: Deadline::Unbounded,
            seed: 0,
            name: None,
        }
    }
}

impl GridSpec {
    /// Spec for a named benchmark family, e.g. `u-P200D5%D90`.
    pub fn from_name(name: &str, seed: u64) -> Result<GridSpec> {
        let ns = parse_instance_name(name)?;
        let (rows, cols) = ns.grid_shape();
        Ok(GridSpec {
            rows,
            cols,
            drones: ns.drones,
            capable_count: ns.capable_count,
            seed,
            name: Some(ns.name()),
            ..GridSpec::default()
        })
    }
}

/// Places photos on a `rows x cols` grid (column `j` at longitude `j * spacing`,
/// row `i` at latitude `i * spacing`), numbering them column by column.
///
/// The first `capable_count` drones are capable; the tree is drawn from a
/// uniformly random Prüfer sequence.
pub fn generate_grid_instance(spec: &GridSpec) -> Result<Instance> {
    if spec.rows == 0 || spec.cols == 0 {
        return Err(Error::Generator("grid needs at least one row and one column".into()));
    }
    if spec.drones == 0 || spec.capable_count == 0 || spec.capable_count > spec.drones {
        return Err(Error::Generator(format!(
            "need 1 <= capable_count ({}) <= drones ({})",
            spec.capable_count, spec.drones
        )));
    }
    if !(spec.spacing > 0.0 && spec.capacity > 0.0 && spec.lambda > 0.0 && spec.mu > 0.0) {
        return Err(Error::Generator("spacing, capacity, lambda and mu must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let drones: Vec<Drone> = (0..spec.drones)
        .map(|i| Drone { id: format!("d{}", i + 1), capable: i < spec.capable_count })
        .collect();

    let n = spec.rows * spec.cols;
    let cells: Vec<(usize, usize)> =
        (0..spec.cols).flat_map(|c| (0..spec.rows).map(move |r| (c, r))).collect();
    let storage: Vec<usize> = match spec.storage {
        StoragePolicy::Sweep => {
            // snake order: even columns bottom-up, odd columns top-down
            let mut order: Vec<usize> = Vec::with_capacity(n);
            for c in 0..spec.cols {
                let col: Vec<usize> = (0..spec.rows).map(|r| c * spec.rows + r).collect();
                if c % 2 == 0 {
                    order.extend(col);
                } else {
                    order.extend(col.into_iter().rev());
                }
            }
            let mut owner = vec![0; n];
            let (base, extra) = (n / spec.drones, n % spec.drones);
            let mut pos = 0;
            for d in 0..spec.drones {
                let len = base + usize::from(d < extra);
                for &k in &order[pos..pos + len] {
                    owner[k] = d;
                }
                pos += len;
            }
            owner
        }
        StoragePolicy::Random => (0..n).map(|_| rng.random_range(0..spec.drones)).collect(),
    };
    let photos = cells
        .iter()
        .enumerate()
        .map(|(k, &(c, r))| Photo {
            id: format!("p{}", k + 1),
            location: GeoPoint { lng: c as f64 * spec.spacing, lat: r as f64 * spec.spacing },
            lambda: spec.lambda,
            mu: spec.mu,
            stored_on: drones[storage[k]].id.clone(),
        })
        .collect();
    let links = random_tree(spec.drones, &mut rng)
        .into_iter()
        .map(|(a, b)| NetworkLink {
            a: drones[a].id.clone(),
            b: drones[b].id.clone(),
            capacity: spec.capacity,
        })
        .collect();
    let inst = Instance {
        name: spec.name.clone(),
        photos,
        drones,
        links,
        sigma: spec.sigma,
        t_hat: spec.t_hat,
    };
    inst.validate().map_err(|e| Error::Generator(e.to_string()))?;
    Ok(inst)
}

/// Edges of a uniformly random labelled tree on `n` nodes (Prüfer decoding).
pub fn random_tree<R: Rng>(n: usize, rng: &mut R) -> Vec<(usize, usize)> {
    match n {
        0 | 1 => Vec::new(),
        2 => vec![(0, 1)],
        _ => {
            let seq: Vec<usize> = (0..n - 2).map(|_| rng.random_range(0..n)).collect();
            let mut degree = vec![1usize; n];
            for &s in &seq {
                degree[s] += 1;
            }
            let mut edges = Vec::with_capacity(n - 1);
            for &s in &seq {
                let leaf = (0..n).find(|&v| degree[v] == 1).expect("a leaf always exists");
                edges.push((leaf.min(s), leaf.max(s)));
                degree[leaf] -= 1;
                degree[s] -= 1;
            }
            let rest: Vec<usize> = (0..n).filter(|&v| degree[v] == 1).collect();
            edges.push((rest[0], rest[1]));
            edges
        }
    }
}

/// Turns an unweighted instance into a weighted one: `ceil(|P| * 0.1)` random
/// 3x3 blocks of adjacent photos each get one `Normal(mean, stddev)` draw as
/// their processing time.
///
/// Blocks are disjoint whenever an aligned 3x3 tiling of the grid has room for
/// all of them; otherwise distinct, possibly overlapping, blocks are used.
pub fn apply_weighted_recipe(inst: &Instance, mean: f64, stddev: f64, seed: u64) -> Result<Instance> {
    let normal = Normal::new(mean, stddev)
        .map_err(|e| Error::Generator(format!("invalid normal distribution: {e}")))?;
    let axes = CoordinateAxes::build(&inst.photos)?;
    let (nc, nl) = (axes.lngs.len(), axes.lats.len());
    let mut at: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
    for (k, p) in inst.photos.iter().enumerate() {
        at.entry(axes.position(&p.location)?).or_default().push(k);
    }
    let candidates: Vec<(usize, usize)> = (0..nc.saturating_sub(2))
        .flat_map(|c| (0..nl.saturating_sub(2)).map(move |l| (c, l)))
        .filter(|&(c, l)| (0..3).all(|dc| (0..3).all(|dl| at.contains_key(&(c + dc, l + dl)))))
        .collect();
    let required = (inst.photos.len() as f64 * 0.1).ceil() as usize;
    if candidates.len() < required {
        return Err(Error::Generator(format!(
            "grid hosts {} 3x3 blocks, {required} required",
            candidates.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut offsets: Vec<(usize, usize)> = (0..3).flat_map(|a| (0..3).map(move |b| (a, b))).collect();
    offsets.shuffle(&mut rng);
    let mut chosen = None;
    for (ox, oy) in offsets {
        let mut tiling: Vec<(usize, usize)> =
            candidates.iter().copied().filter(|&(c, l)| c % 3 == ox && l % 3 == oy).collect();
        if tiling.len() >= required {
            tiling.shuffle(&mut rng);
            tiling.truncate(required);
            chosen = Some(tiling);
            break;
        }
    }
    let blocks = chosen.unwrap_or_else(|| {
        let mut all = candidates.clone();
        all.shuffle(&mut rng);
        all.truncate(required);
        all
    });

    let mut out = inst.clone();
    for (c, l) in blocks {
        let value = normal.sample(&mut rng).max(MIN_LAMBDA);
        for dc in 0..3 {
            for dl in 0..3 {
                for &k in &at[&(c + dc, l + dl)] {
                    out.photos[k].lambda = value;
                }
            }
        }
    }
    if let Some(name) = &out.name {
        if let Some(rest) = name.strip_prefix("u-") {
            out.name = Some(format!("w-{rest}"));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::t4;

    #[test]
    fn t4_document_parses() {
        let inst = parse_instance(&write_instance(&t4())).unwrap();
        assert_eq!(inst.photos.len(), 4);
        assert_eq!(inst.drones.len(), 2);
        assert_eq!(inst.links.len(), 1);
        assert_eq!(inst, t4());
    }

    #[test]
    fn two_links_between_two_drones_is_not_a_tree() {
        let mut inst = t4();
        inst.links.push(inst.links[0].clone());
        let err = parse_instance(&write_instance(&inst)).unwrap_err();
        assert!(err.to_string().contains("network is not a tree"), "{err}");
    }

    #[test]
    fn sigma_above_capable_count_is_rejected() {
        let err = parse_instance(&write_instance(&t4().with_sigma(3))).unwrap_err();
        assert!(err.to_string().contains("sigma exceeds capable drones"), "{err}");
    }

    #[test]
    fn schema_errors_carry_the_field_path() {
        let doc = write_instance(&t4()).replacen("\"lambda\": 1.0", "\"lambda\": \"x\"", 1);
        let err = parse_instance(&doc).unwrap_err();
        assert!(err.to_string().contains("photos[0].lambda"), "{err}");

        let mut inst = t4();
        inst.photos[2].stored_on = "d9".into();
        let err = parse_instance(&write_instance(&inst)).unwrap_err();
        assert!(err.to_string().contains("photos[2].stored_on"), "{err}");
    }

    #[test]
    fn unbounded_deadline_is_the_inf_sentinel() {
        let doc = write_instance(&t4());
        assert!(doc.contains("\"t_hat\": \"inf\""));
        let bounded = write_instance(&t4().with_t_hat(Deadline::Seconds(2.5)));
        assert!(bounded.contains("\"t_hat\": 2.5"));
        assert_eq!(write_instance(&t4()), write_instance(&t4()));
    }

    #[test]
    fn instance_names() {
        let a = parse_instance_name("u-P200D5%D90").unwrap();
        assert_eq!((a.weighted, a.photos, a.drones, a.capable_count), (false, 200, 5, 4));
        let b = parse_instance_name("w-P400D10%D50").unwrap();
        assert_eq!((b.weighted, b.photos, b.drones, b.capable_count), (true, 400, 10, 5));
        assert_eq!(parse_instance_name("u-P200D7%D70").unwrap().capable_count, 4);
        assert_eq!(b.name(), "w-P400D10%D50");
        assert!(parse_instance_name("x-P200D7%D70").is_err());
        assert!(parse_instance_name("u-P200D7D70").is_err());
        assert_eq!(a.grid_shape(), (20, 10));
        assert_eq!(b.grid_shape(), (20, 20));
    }

    #[test]
    fn grid_generator_places_photos_column_by_column() {
        let inst = generate_grid_instance(&GridSpec { lambda: 1.0, mu: 1.0, capacity: 1.0, seed: 7, ..GridSpec::default() })
            .unwrap();
        let locs: Vec<(f64, f64)> = inst.photos.iter().map(|p| (p.location.lng, p.location.lat)).collect();
        assert_eq!(locs, vec![(0.0, 0.0), (0.0, 1.0), (1.0, 0.0), (1.0, 1.0)]);
        let owners: Vec<&str> = inst.photos.iter().map(|p| p.stored_on.as_str()).collect();
        assert_eq!(owners, vec!["d1", "d1", "d2", "d2"]);

        let big = generate_grid_instance(&GridSpec { rows: 20, cols: 10, drones: 5, capable_count: 4, ..GridSpec::default() })
            .unwrap();
        let axes = CoordinateAxes::build(&big.photos).unwrap();
        assert_eq!((big.photos.len(), axes.lngs.len(), axes.lats.len()), (200, 10, 20));
    }

    #[test]
    fn generator_is_deterministic_per_seed() {
        let spec = GridSpec { rows: 5, cols: 4, drones: 7, capable_count: 3, storage: StoragePolicy::Random, seed: 11, ..GridSpec::default() };
        assert_eq!(generate_grid_instance(&spec).unwrap(), generate_grid_instance(&spec).unwrap());
        let other = generate_grid_instance(&GridSpec { seed: 12, ..spec.clone() }).unwrap();
        assert_ne!(generate_grid_instance(&spec).unwrap(), other);
    }

    #[test]
    fn weighted_recipe_single_block() {
        let inst = generate_grid_instance(&GridSpec { rows: 3, cols: 3, ..GridSpec::default() }).unwrap();
        let w = apply_weighted_recipe(&inst, 30.1, 0.0, 5).unwrap();
        assert!(w.photos.iter().all(|p| p.lambda == 30.1));
    }

    #[test]
    fn weighted_recipe_on_200_photos_draws_20_groups() {
        let inst = generate_grid_instance(&GridSpec::from_name("u-P200D5%D90", 3).unwrap()).unwrap();
        let w = apply_weighted_recipe(&inst, DEFAULT_LAMBDA, DEFAULT_WEIGHT_STDDEV, 9).unwrap();
        let changed = inst.photos.iter().zip(&w.photos).filter(|(a, b)| a.lambda != b.lambda).count();
        assert!(changed > 0 && changed <= 180, "{changed}");
        assert_eq!(w.name.as_deref(), Some("w-P200D5%D90"));
    }

    #[test]
    fn weighted_recipe_rejects_small_grids() {
        let inst = generate_grid_instance(&GridSpec { rows: 2, cols: 5, ..GridSpec::default() }).unwrap();
        assert!(apply_weighted_recipe(&inst, 26.72, 5.0, 1).is_err());
    }
}
