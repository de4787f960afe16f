//! Multi-access coded caching built from cross resolvable designs.
//!
//! Each block of a resolvable design is a cache; a user connects to `z`
//! caches taken from `z` distinct parallel classes. The crate builds the
//! designs, computes their cross intersection numbers, generates the XOR
//! delivery schedule, simulates it on real bytes, and compares the resulting
//! rate, gain and subpacketization against the dedicated-cache baseline.

pub mod baselines;
pub mod caps;
pub mod constructions;
pub mod design;
pub mod error;
pub mod field;
pub mod hadamard;
pub mod rational;
pub mod scheme;
pub mod simulator;

pub use baselines::{
    analyze, generate_table, man_point, spe_structural, sweep, table_row, Analysis, ManPoint, Row,
    SchemeKind, SpeStructural, SweepFamily, SweepRow, Table, TableId,
};
pub use caps::Caps;
pub use constructions::{
    affine_geometry_bibd, affine_plane, catalog_example, hadamard_crd, ConstructionParams,
    ConstructionSpec,
};
pub use design::{
    crd_profile, cross_intersection_number, users_per_cache_subfile, users_per_subfile, CrdProfile,
    Design, DesignFile, Resolution,
};
pub use error::{Error, Result};
pub use rational::Rational;
pub use scheme::{
    build_delivery_schedule, coding_gain, enumerate_users, per_user_rate_ratio, place, rate,
    subpacketization_identity, user_memory_fraction, CodedTransmission, DeliverySchedule,
    DesignParams, SchemeInstance, SchemeMetrics, User,
};
pub use simulator::{
    decode_user, encode, make_file_store, verify_all, FileStore, SimulationReport, UserOutcome,
};
