//! Runtime limits. Every cap can be overridden by a CLI flag or by the
//! matching `MOVOID_*` environment variable (flags win).

/// Enumeration and search limits.
#[derive(Debug, Clone)]
pub struct Config {
    /// Maximum field order built by [`crate::gf::Field::new`].
    pub max_field_order: u64,
    /// Maximum number of projective points enumerated per space.
    pub max_points: u64,
    /// Maximum number of generators enumerated per polar space.
    pub max_generators: u64,
    /// Identity checks summing over all ambient points refuse to run when
    /// theta_n exceeds this.
    pub max_identity_points: u64,
    /// Node budget for the backtracking search.
    pub node_budget: u64,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            max_field_order: 1 << 20,
            max_points: 1_000_000,
            max_generators: 1_000_000,
            max_identity_points: 1_000_000,
            node_budget: 1_000_000_000,
        }
    }
}

impl Config {
    /// Defaults overlaid with any `MOVOID_*` environment variables.
    pub fn from_env() -> Self {
        let mut cfg = Config::default();
        let read = |name: &str| std::env::var(name).ok().and_then(|v| v.parse::<u64>().ok());
        if let Some(v) = read("MOVOID_MAX_FIELD_ORDER") {
            cfg.max_field_order = v;
        }
        if let Some(v) = read("MOVOID_MAX_POINTS") {
            cfg.max_points = v;
        }
        if let Some(v) = read("MOVOID_MAX_GENERATORS") {
            cfg.max_generators = v;
        }
        if let Some(v) = read("MOVOID_MAX_IDENTITY_POINTS") {
            cfg.max_identity_points = v;
        }
        if let Some(v) = read("MOVOID_NODE_BUDGET") {
            cfg.node_budget = v;
        }
        cfg
    }
}
