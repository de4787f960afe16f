//! Comparison baselines and the comparison tables built from them.
//!
//! The dedicated-cache baseline is the Maddah-Ali–Niesen scheme with one user
//! per cache. The multi-access baseline of Serbetci–Parrinello–Elia is
//! reported structurally only (users, cache fraction, subpacketization);
//! its rate expression is not reproduced.

use std::fmt;
use std::fmt::Write as _;
use std::str::FromStr;

use num_bigint::BigUint;
use num_integer::binomial;
use serde::Serialize;

use crate::caps::Caps;
use crate::constructions::ConstructionSpec;
use crate::design::{crd_profile_with_caps, Resolution};
use crate::error::{Error, Result};
use crate::rational::{decimal, decimal_big, exact, int, ratio, Rational};
use crate::scheme::{DesignParams, SchemeMetrics};

/// One operating point of the Maddah-Ali–Niesen scheme.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManPoint {
    pub users: u64,
    pub cache_fraction: Rational,
    pub rate: Rational,
    pub per_user_rate: Rational,
    pub gain: u64,
    pub subpacketization: BigUint,
}

/// `K` users each with a dedicated cache holding `M/N` of every file.
/// Requires `t = K·M/N` to be an integer in `1..=K`.
pub fn man_point(users: u64, cache_fraction: Rational) -> Result<ManPoint> {
    let t = cache_fraction * users as i128;
    if users == 0 || !t.is_integer() || *t.numer() < 1 || *t.numer() > users as i128 {
        return Err(Error::NonIntegerCacheRedundancy(format!(
            "K={users}, M/N={} gives K·M/N={}",
            exact(&cache_fraction),
            exact(&t)
        )));
    }
    let t = *t.numer();
    let k = users as i128;
    let rate = (int(1) - cache_fraction) * k / (1 + t);
    Ok(ManPoint {
        users,
        cache_fraction,
        per_user_rate: rate / k,
        rate,
        gain: 1 + t as u64,
        subpacketization: binomial(BigUint::from(users), BigUint::from(t as u64)),
    })
}

/// Structural parameters of the multi-access scheme in the `K·M/N = 2` regime.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpeStructural {
    pub users: u64,
    pub z: u64,
    pub cache_fraction: Rational,
    pub user_fraction: Rational,
    pub subpacketization: u64,
}

/// `K = b` users on `b` caches, each reaching `z` cyclically consecutive
/// caches; subpacketization `K(K−2z+2)/4`.
pub fn spe_structural(caches: u64, z: u64) -> Result<SpeStructural> {
    let fail = || Error::NonIntegerSubpacketization {
        users: caches,
        z: z as usize,
    };
    if z == 0 || caches == 0 || 2 * z > caches + 1 {
        return Err(fail());
    }
    let numer = caches * (caches + 2 - 2 * z);
    if !numer.is_multiple_of(4) {
        return Err(fail());
    }
    let k = caches as i128;
    Ok(SpeStructural {
        users: caches,
        z,
        cache_fraction: ratio(2, k),
        user_fraction: ratio(2 * z as i128, k),
        subpacketization: numer / 4,
    })
}

/// Proposed-scheme figures for `res` at `z`, computed from the design itself.
pub fn table_row(res: &Resolution, z: usize) -> Result<SchemeMetrics> {
    table_row_with_caps(res, z, &Caps::default())
}

pub fn table_row_with_caps(res: &Resolution, z: usize, caps: &Caps) -> Result<SchemeMetrics> {
    let profile = crd_profile_with_caps(res, caps)?;
    SchemeMetrics::new(&DesignParams::of(res), &profile, z)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SchemeKind {
    Proposed,
    Man,
    Spe,
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SchemeKind::Proposed => "proposed",
            SchemeKind::Man => "MaN",
            SchemeKind::Spe => "SPE",
        })
    }
}

/// One scheme's column in a comparison; absent cells are not defined for
/// that scheme.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Row {
    pub design: String,
    pub scheme: SchemeKind,
    pub z: Option<u64>,
    pub caches: Option<u64>,
    pub users: Option<u64>,
    pub subpacketization: Option<BigUint>,
    pub cache_fraction: Option<Rational>,
    pub user_fraction: Option<Rational>,
    pub rate: Option<Rational>,
    pub per_user_rate: Option<Rational>,
    pub gain: Option<u64>,
    pub note: String,
}

impl Row {
    fn empty(design: &str, scheme: SchemeKind) -> Self {
        Row {
            design: design.to_string(),
            scheme,
            z: None,
            caches: None,
            users: None,
            subpacketization: None,
            cache_fraction: None,
            user_fraction: None,
            rate: None,
            per_user_rate: None,
            gain: None,
            note: String::new(),
        }
    }

    pub fn proposed(design: &str, m: &SchemeMetrics) -> Self {
        Row {
            z: Some(m.z as u64),
            caches: Some(m.caches),
            users: Some(m.users),
            subpacketization: Some(BigUint::from(m.subpacketization)),
            cache_fraction: Some(m.cache_fraction),
            user_fraction: Some(m.user_fraction),
            rate: Some(m.rate),
            per_user_rate: Some(m.per_user_rate),
            gain: Some(m.gain),
            ..Row::empty(design, SchemeKind::Proposed)
        }
    }

    pub fn man(design: &str, p: &ManPoint) -> Self {
        Row {
            z: Some(1),
            caches: Some(p.users),
            users: Some(p.users),
            subpacketization: Some(p.subpacketization.clone()),
            cache_fraction: Some(p.cache_fraction),
            user_fraction: Some(p.cache_fraction),
            rate: Some(p.rate),
            per_user_rate: Some(p.per_user_rate),
            gain: Some(p.gain),
            ..Row::empty(design, SchemeKind::Man)
        }
    }

    pub fn spe(design: &str, s: &SpeStructural) -> Self {
        Row {
            z: Some(s.z),
            caches: Some(s.users),
            users: Some(s.users),
            subpacketization: Some(BigUint::from(s.subpacketization)),
            cache_fraction: Some(s.cache_fraction),
            user_fraction: Some(s.user_fraction),
            note: "rate not computed".into(),
            ..Row::empty(design, SchemeKind::Spe)
        }
    }

    /// A row whose scheme is undefined for this design; the error goes in the note.
    pub fn failed(design: &str, scheme: SchemeKind, err: &Error) -> Self {
        Row {
            note: err.to_string(),
            ..Row::empty(design, scheme)
        }
    }

    pub fn is_failed(&self) -> bool {
        self.users.is_none()
    }
}

/// Fixed CSV header shared by tables and analysis output.
pub const TABLE_CSV_HEADER: &str = "table,design,scheme,z,caches,users,subpacketization,\
cache_fraction,cache_fraction_dec,user_fraction,user_fraction_dec,rate,rate_dec,\
per_user_rate,per_user_rate_dec,gain,note";

fn opt<T: ToString>(value: &Option<T>) -> String {
    value.as_ref().map_or_else(String::new, T::to_string)
}

fn opt_exact(value: &Option<Rational>) -> String {
    value.as_ref().map_or_else(String::new, exact)
}

fn opt_dec(value: &Option<Rational>) -> String {
    value.as_ref().map_or_else(String::new, decimal)
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn row_csv(table: &str, r: &Row) -> String {
    [
        table.to_string(),
        r.design.clone(),
        r.scheme.to_string(),
        opt(&r.z),
        opt(&r.caches),
        opt(&r.users),
        opt(&r.subpacketization),
        opt_exact(&r.cache_fraction),
        opt_dec(&r.cache_fraction),
        opt_exact(&r.user_fraction),
        opt_dec(&r.user_fraction),
        opt_exact(&r.rate),
        opt_dec(&r.rate),
        opt_exact(&r.per_user_rate),
        opt_dec(&r.per_user_rate),
        opt(&r.gain),
        r.note.clone(),
    ]
    .iter()
    .map(|f| csv_field(f))
    .collect::<Vec<_>>()
    .join(",")
}

/// Renders rows as CSV under [`TABLE_CSV_HEADER`].
pub fn rows_csv(table: &str, rows: &[Row]) -> String {
    let mut out = String::from(TABLE_CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&row_csv(table, r));
        out.push('\n');
    }
    out
}

/// Renders rows as an aligned grid: one column per scheme, one line per quantity.
pub fn rows_text(title: &str, rows: &[Row]) -> String {
    let labels = [
        "Design",
        "Scheme",
        "Caches a user accesses (z)",
        "Caches (b)",
        "Users (K)",
        "Subpacketization (F)",
        "Cache fraction (M/N)",
        "User fraction (M'/N)",
        "Rate (R)",
        "Rate per user (R/K)",
        "Gain (g)",
        "Note",
    ];
    let cell = |v: String| if v.is_empty() { "-".to_string() } else { v };
    let columns: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.design.clone(),
                r.scheme.to_string(),
                cell(opt(&r.z)),
                cell(opt(&r.caches)),
                cell(opt(&r.users)),
                cell(opt(&r.subpacketization)),
                cell(opt_exact(&r.cache_fraction)),
                cell(opt_exact(&r.user_fraction)),
                cell(opt_exact(&r.rate)),
                cell(opt_exact(&r.per_user_rate)),
                cell(opt(&r.gain)),
                r.note.clone(),
            ]
        })
        .collect();
    let label_width = labels.iter().map(|l| l.len()).max().unwrap_or(0);
    let widths: Vec<usize> = columns
        .iter()
        .map(|c| c.iter().map(|s| s.chars().count()).max().unwrap_or(0))
        .collect();
    let mut out = format!("{title}\n");
    for (i, label) in labels.iter().enumerate() {
        if i == labels.len() - 1 && columns.iter().all(|c| c[i].is_empty()) {
            continue;
        }
        let mut line = format!("{label:<label_width$}");
        for (c, w) in columns.iter().zip(&widths) {
            let _ = write!(line, " | {:<w$}", c[i]);
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out
}

/// Comparison tables, numbered I to IX.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum TableId {
    /// Affine planes, `z = 2`, against MaN.
    I,
    /// Affine planes, `z = 2`, against SPE.
    II,
    /// Affine geometry hyperplanes, `z = 2`, against MaN.
    III,
    /// Hadamard designs, `z = 2`, against MaN.
    IV,
    /// Two small designs beating MaN on every axis.
    V,
    /// Two small designs against SPE.
    VI,
    /// Affine planes, `z = 1`, against MaN.
    VII,
    /// The 27-point cube design across `z = 1..3`.
    VIII,
    /// The 16-point hypercube design across `z = 1..4`.
    IX,
}

impl TableId {
    pub const ALL: [TableId; 9] = [
        TableId::I,
        TableId::II,
        TableId::III,
        TableId::IV,
        TableId::V,
        TableId::VI,
        TableId::VII,
        TableId::VIII,
        TableId::IX,
    ];

    fn title(self) -> &'static str {
        match self {
            TableId::I => "Affine planes (z=2) vs MaN",
            TableId::II => "Affine planes (z=2) vs SPE",
            TableId::III => "Affine geometry hyperplanes (z=2) vs MaN",
            TableId::IV => "Hadamard designs (z=2) vs MaN",
            TableId::V => "Small CRDs vs MaN",
            TableId::VI => "Small CRDs vs SPE",
            TableId::VII => "Affine planes (z=1) vs MaN",
            TableId::VIII => "27-point design for z=1..3",
            TableId::IX => "16-point design for z=1..4",
        }
    }
}

impl fmt::Display for TableId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl FromStr for TableId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let upper = s.trim().to_ascii_uppercase();
        TableId::ALL
            .into_iter()
            .enumerate()
            .find(|(i, t)| t.to_string() == upper || (i + 1).to_string() == upper)
            .map(|(_, t)| t)
            .ok_or_else(|| Error::InvalidSpec {
                spec: s.to_string(),
                reason: "table id must be I..IX or 1..9".into(),
            })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Table {
    pub id: TableId,
    pub title: String,
    pub rows: Vec<Row>,
}

impl Table {
    pub fn to_text(&self) -> String {
        rows_text(&format!("Table {}: {}", self.id, self.title), &self.rows)
    }

    pub fn to_csv(&self) -> String {
        rows_csv(&self.id.to_string(), &self.rows)
    }

    /// CSV rows without the header, for concatenating several tables.
    pub fn csv_body(&self) -> String {
        self.rows
            .iter()
            .map(|r| row_csv(&self.id.to_string(), r) + "\n")
            .collect()
    }
}

/// Parameter sets used by the family tables.
pub const AFFINE_ORDERS: [u64; 7] = [2, 3, 4, 5, 7, 8, 9];
pub const AG_PARAMS: [(u64, u32); 3] = [(2, 3), (3, 3), (2, 4)];
pub const HADAMARD_PARAMS: [usize; 3] = [1, 2, 3];

fn proposed_row(spec: ConstructionSpec, z: usize, caps: &Caps) -> Result<(Resolution, Row)> {
    let res = spec.build_with_caps(caps)?;
    let metrics = table_row_with_caps(&res, z, caps)?;
    let row = Row::proposed(&spec.to_string(), &metrics);
    Ok((res, row))
}

fn man_row(label: &str, res: &Resolution) -> Row {
    let fraction = ratio(res.k() as i128, res.v() as i128);
    match man_point(res.b() as u64, fraction) {
        Ok(p) => Row::man(label, &p),
        Err(e) => Row::failed(label, SchemeKind::Man, &e),
    }
}

fn spe_row(label: &str, caches: u64, z: u64) -> Row {
    match spe_structural(caches, z) {
        Ok(s) => Row::spe(label, &s),
        Err(e) => Row::failed(label, SchemeKind::Spe, &e),
    }
}

fn man_vs_proposed(specs: &[ConstructionSpec], z: usize, caps: &Caps) -> Result<Vec<Row>> {
    let mut rows = Vec::new();
    for &spec in specs {
        let (res, proposed) = proposed_row(spec, z, caps)?;
        rows.push(man_row(&spec.to_string(), &res));
        rows.push(proposed);
    }
    Ok(rows)
}

/// Generates table `id` with its default parameter sets.
pub fn generate_table(id: TableId, caps: &Caps) -> Result<Table> {
    let affine: Vec<_> = AFFINE_ORDERS
        .iter()
        .map(|&n| ConstructionSpec::AffinePlane { n })
        .collect();
    let example = |id| ConstructionSpec::CatalogExample { id };
    let rows = match id {
        TableId::I => man_vs_proposed(&affine, 2, caps)?,
        TableId::VII => man_vs_proposed(&affine, 1, caps)?,
        TableId::III => {
            let specs: Vec<_> = AG_PARAMS
                .iter()
                .map(|&(q, m)| ConstructionSpec::AffineGeometry { q, m })
                .collect();
            man_vs_proposed(&specs, 2, caps)?
        }
        TableId::IV => {
            let specs: Vec<_> = HADAMARD_PARAMS
                .iter()
                .map(|&m| ConstructionSpec::Hadamard { m })
                .collect();
            man_vs_proposed(&specs, 2, caps)?
        }
        TableId::II => {
            let mut rows = Vec::new();
            for spec in &affine {
                let (res, proposed) = proposed_row(*spec, 2, caps)?;
                let mut spe = spe_row(&spec.to_string(), res.b() as u64, 2);
                if !spe.is_failed() {
                    spe.note = "rate not computed; gain between 3 and 4".into();
                }
                rows.push(spe);
                rows.push(proposed);
            }
            rows
        }
        TableId::V => {
            let mut rows = man_vs_proposed(&[example(3)], 2, caps)?;
            rows.extend(man_vs_proposed(&[example(4)], 3, caps)?);
            rows
        }
        TableId::VI => {
            let mut rows = Vec::new();
            for id in [7, 4] {
                let (res, proposed) = proposed_row(example(id), 2, caps)?;
                rows.push(spe_row(&example(id).to_string(), res.b() as u64, 2));
                rows.push(proposed);
            }
            rows
        }
        TableId::VIII => (1..=3)
            .map(|z| proposed_row(example(8), z, caps).map(|(_, r)| r))
            .collect::<Result<_>>()?,
        TableId::IX => (1..=4)
            .map(|z| proposed_row(example(9), z, caps).map(|(_, r)| r))
            .collect::<Result<_>>()?,
    };
    Ok(Table {
        id,
        title: id.title().to_string(),
        rows,
    })
}

/// Proposed scheme of one design next to its baselines.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Analysis {
    pub design: String,
    pub params: DesignParams,
    pub rows: Vec<Row>,
}

/// Proposed, MaN (same caches and cache fraction) and SPE (same caches and
/// `z`) rows. A proposed-scheme failure is an error; baseline failures are
/// recorded in their row.
pub fn analyze(label: &str, res: &Resolution, z: usize, caps: &Caps) -> Result<Analysis> {
    let metrics = table_row_with_caps(res, z, caps)?;
    Ok(Analysis {
        design: label.to_string(),
        params: DesignParams::of(res),
        rows: vec![
            Row::proposed(label, &metrics),
            man_row(label, res),
            spe_row(label, res.b() as u64, z as u64),
        ],
    })
}

impl Analysis {
    pub fn to_json(&self) -> serde_json::Value {
        let rows: Vec<_> = self.rows.iter().map(row_json).collect();
        serde_json::json!({
            "design": self.design,
            "params": self.params,
            "rows": rows,
        })
    }
}

/// JSON object for a row; rationals as exact strings, big integers as decimal strings.
pub fn row_json(r: &Row) -> serde_json::Value {
    let rat = |v: &Option<Rational>| v.as_ref().map(exact);
    serde_json::json!({
        "design": r.design,
        "scheme": r.scheme,
        "z": r.z,
        "caches": r.caches,
        "users": r.users,
        "subpacketization": r.subpacketization.as_ref().map(BigUint::to_string),
        "cache_fraction": rat(&r.cache_fraction),
        "user_fraction": rat(&r.user_fraction),
        "rate": rat(&r.rate),
        "per_user_rate": rat(&r.per_user_rate),
        "gain": r.gain,
        "note": r.note,
    })
}

/// Design families a sweep can range over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepFamily {
    /// Affine planes of order `n`.
    Affine,
    /// Affine geometry hyperplanes over `GF(q)` with fixed dimension `m`.
    AffineGeometry { m: u32 },
    /// Hadamard designs of order `4m`.
    Hadamard,
}

impl SweepFamily {
    fn spec(self, param: u64) -> ConstructionSpec {
        match self {
            SweepFamily::Affine => ConstructionSpec::AffinePlane { n: param },
            SweepFamily::AffineGeometry { m } => ConstructionSpec::AffineGeometry { q: param, m },
            SweepFamily::Hadamard => ConstructionSpec::Hadamard { m: param as usize },
        }
    }

    fn name(self) -> &'static str {
        match self {
            SweepFamily::Affine => "affine",
            SweepFamily::AffineGeometry { .. } => "ag",
            SweepFamily::Hadamard => "hadamard",
        }
    }
}

impl FromStr for SweepFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let invalid = |reason: &str| Error::InvalidSpec {
            spec: s.to_string(),
            reason: reason.to_string(),
        };
        match s.trim() {
            "affine" => Ok(SweepFamily::Affine),
            "hadamard" => Ok(SweepFamily::Hadamard),
            other => {
                let m = other
                    .strip_prefix("ag:m=")
                    .ok_or_else(|| invalid("family must be affine, hadamard or ag:m=<m>"))?;
                let m = m.parse().map_err(|_| invalid("m must be an integer"))?;
                Ok(SweepFamily::AffineGeometry { m })
            }
        }
    }
}

/// One parameter value of a sweep. `error` is set (and the figures left
/// empty) when the parameter does not give a design.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepRow {
    pub family: &'static str,
    pub param: u64,
    pub z: usize,
    pub error: Option<String>,
    pub proposed: Option<SchemeMetrics>,
    pub man: Option<ManPoint>,
}

pub const SWEEP_CSV_HEADER: &str =
    "family,param,z,status,caches,cache_fraction,cache_fraction_dec,\
proposed_users,proposed_subpacketization,proposed_rate,proposed_rate_dec,\
proposed_per_user_rate,proposed_per_user_rate_dec,man_users,man_subpacketization,\
man_subpacketization_dec,man_rate,man_rate_dec,man_per_user_rate,man_per_user_rate_dec,note";

/// Evaluates the proposed scheme and its MaN counterpart for each parameter.
pub fn sweep(family: SweepFamily, params: &[u64], z: usize, caps: &Caps) -> Vec<SweepRow> {
    params
        .iter()
        .map(|&param| {
            let mut row = SweepRow {
                family: family.name(),
                param,
                z,
                error: None,
                proposed: None,
                man: None,
            };
            let outcome = family.spec(param).build_with_caps(caps).and_then(|res| {
                let metrics = table_row_with_caps(&res, z, caps)?;
                let man = man_point(res.b() as u64, ratio(res.k() as i128, res.v() as i128));
                Ok((metrics, man))
            });
            match outcome {
                Ok((metrics, man)) => {
                    row.proposed = Some(metrics);
                    match man {
                        Ok(p) => row.man = Some(p),
                        Err(e) => row.error = Some(e.to_string()),
                    }
                }
                Err(e) => row.error = Some(e.to_string()),
            }
            row
        })
        .collect()
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(SWEEP_CSV_HEADER);
    out.push('\n');
    for r in rows {
        let status = if r.proposed.is_none() {
            "skipped"
        } else if r.error.is_some() {
            "partial"
        } else {
            "ok"
        };
        let p = r.proposed.as_ref();
        let m = r.man.as_ref();
        let ex = |v: Option<Rational>| v.as_ref().map_or_else(String::new, exact);
        let dec = |v: Option<Rational>| v.as_ref().map_or_else(String::new, decimal);
        let fields = [
            r.family.to_string(),
            r.param.to_string(),
            r.z.to_string(),
            status.to_string(),
            p.map_or_else(String::new, |p| p.caches.to_string()),
            ex(p.map(|p| p.cache_fraction)),
            dec(p.map(|p| p.cache_fraction)),
            p.map_or_else(String::new, |p| p.users.to_string()),
            p.map_or_else(String::new, |p| p.subpacketization.to_string()),
            ex(p.map(|p| p.rate)),
            dec(p.map(|p| p.rate)),
            ex(p.map(|p| p.per_user_rate)),
            dec(p.map(|p| p.per_user_rate)),
            m.map_or_else(String::new, |m| m.users.to_string()),
            m.map_or_else(String::new, |m| m.subpacketization.to_string()),
            m.map_or_else(String::new, |m| decimal_big(&m.subpacketization)),
            ex(m.map(|m| m.rate)),
            dec(m.map(|m| m.rate)),
            ex(m.map(|m| m.per_user_rate)),
            dec(m.map(|m| m.per_user_rate)),
            r.error.clone().unwrap_or_default(),
        ];
        let line: Vec<String> = fields.iter().map(|f| csv_field(f)).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}
