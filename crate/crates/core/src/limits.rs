//! Size guards. Defaults can be overridden through environment variables.

#[derive(Clone, Debug)]
pub struct Limits {
    pub max_polytope_points: usize,
    pub max_polytope_dim: usize,
    pub max_bruteforce_simplices: usize,
    pub max_bruteforce_nodes: u64,
    pub max_integral_generator_cells: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_polytope_points: 64,
            max_polytope_dim: 6,
            max_bruteforce_simplices: 30,
            max_bruteforce_nodes: 50_000_000,
            max_integral_generator_cells: 400,
        }
    }
}

impl Limits {
    /// Reads `POLYTOPO_MAX_POINTS`, `POLYTOPO_MAX_DIM`, `POLYTOPO_MAX_BRUTEFORCE`,
    /// `POLYTOPO_MAX_BRUTEFORCE_NODES` and `POLYTOPO_MAX_GENERATOR_CELLS`.
    pub fn from_env() -> Self {
        let mut l = Limits::default();
        let read = |name: &str| std::env::var(name).ok().and_then(|v| v.trim().parse::<u64>().ok());
        if let Some(v) = read("POLYTOPO_MAX_POINTS") {
            l.max_polytope_points = v as usize;
        }
        if let Some(v) = read("POLYTOPO_MAX_DIM") {
            l.max_polytope_dim = v as usize;
        }
        if let Some(v) = read("POLYTOPO_MAX_BRUTEFORCE") {
            l.max_bruteforce_simplices = v as usize;
        }
        if let Some(v) = read("POLYTOPO_MAX_BRUTEFORCE_NODES") {
            l.max_bruteforce_nodes = v;
        }
        if let Some(v) = read("POLYTOPO_MAX_GENERATOR_CELLS") {
            l.max_integral_generator_cells = v as usize;
        }
        l
    }
}
