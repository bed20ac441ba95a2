//! Particle swarm search over a box of mixed continuous/integer dimensions,
//! maximizing a caller-supplied objective. Integer and divisor-constrained
//! dimensions are relaxed: particles move in continuous space and positions
//! are decoded only at evaluation time.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math::SeededRng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum DimKind {
    Continuous,
    /// Rounded half-away-from-zero at evaluation time.
    Integer,
    /// Snapped to the nearest divisor of twice the decoded value of the named
    /// integer dimension (i.e. the model width for a searched hidden size).
    WidthDivisor { of: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dimension {
    pub name: String,
    #[serde(flatten)]
    pub kind: DimKind,
    pub lower: f64,
    pub upper: f64,
}

impl Dimension {
    pub fn continuous(name: &str, lower: f64, upper: f64) -> Self {
        Dimension {
            name: name.into(),
            kind: DimKind::Continuous,
            lower,
            upper,
        }
    }

    pub fn integer(name: &str, lower: f64, upper: f64) -> Self {
        Dimension {
            name: name.into(),
            kind: DimKind::Integer,
            lower,
            upper,
        }
    }

    pub fn width_divisor(name: &str, of: &str, lower: f64, upper: f64) -> Self {
        Dimension {
            name: name.into(),
            kind: DimKind::WidthDivisor { of: of.into() },
            lower,
            upper,
        }
    }

    fn range(&self) -> f64 {
        self.upper - self.lower
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchSpace {
    pub dims: Vec<Dimension>,
}

impl SearchSpace {
    pub fn new(dims: Vec<Dimension>) -> Result<Self> {
        let space = SearchSpace { dims };
        space.validate()?;
        Ok(space)
    }

    pub fn len(&self) -> usize {
        self.dims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dims.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        if self.dims.is_empty() {
            return Err(Error::config("search space has no dimensions"));
        }
        for d in &self.dims {
            if !(d.lower < d.upper) {
                return Err(Error::config(format!(
                    "dimension '{}' has empty range [{}, {}]",
                    d.name, d.lower, d.upper
                )));
            }
            match &d.kind {
                DimKind::Integer => {
                    if d.lower.fract() != 0.0 || d.upper.fract() != 0.0 {
                        return Err(Error::config(format!(
                            "integer dimension '{}' needs integral bounds",
                            d.name
                        )));
                    }
                }
                DimKind::WidthDivisor { of } => {
                    let referenced = self.dims.iter().find(|o| &o.name == of);
                    match referenced {
                        Some(o) if matches!(o.kind, DimKind::Integer) => {}
                        Some(_) => {
                            return Err(Error::config(format!(
                                "dimension '{}' must reference an integer dimension, '{of}' is not",
                                d.name
                            )))
                        }
                        None => {
                            return Err(Error::config(format!(
                                "dimension '{}' references unknown dimension '{of}'",
                                d.name
                            )))
                        }
                    }
                }
                DimKind::Continuous => {}
            }
        }
        Ok(())
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.dims.iter().position(|d| d.name == name)
    }

    /// Decodes a raw position: continuous dims pass through, integer dims
    /// round half-away-from-zero, divisor dims snap to the nearest divisor of
    /// the referenced width that lies inside their bounds.
    pub fn decode(&self, pos: &[f64]) -> Vec<f64> {
        debug_assert_eq!(pos.len(), self.dims.len());
        let mut out = vec![0.0; pos.len()];
        // Integer/continuous first; divisor dims depend on them.
        for (i, d) in self.dims.iter().enumerate() {
            out[i] = match d.kind {
                DimKind::Continuous => pos[i],
                DimKind::Integer | DimKind::WidthDivisor { .. } => pos[i].round(),
            };
        }
        for (i, d) in self.dims.iter().enumerate() {
            if let DimKind::WidthDivisor { of } = &d.kind {
                let j = self.index_of(of).expect("validated");
                let width = 2.0 * out[j];
                out[i] = nearest_divisor(width as u64, pos[i], d.lower, d.upper);
            }
        }
        out
    }
}

fn nearest_divisor(width: u64, target: f64, lower: f64, upper: f64) -> f64 {
    let mut divisors: Vec<u64> = (1..=width).filter(|d| width.is_multiple_of(*d)).collect();
    let bounded: Vec<u64> = divisors
        .iter()
        .copied()
        .filter(|&d| (d as f64) >= lower && (d as f64) <= upper)
        .collect();
    if !bounded.is_empty() {
        divisors = bounded;
    }
    divisors
        .into_iter()
        .min_by(|&a, &b| {
            let da = (a as f64 - target).abs();
            let db = (b as f64 - target).abs();
            da.partial_cmp(&db).unwrap().then(a.cmp(&b))
        })
        .unwrap_or(1) as f64
}

/// Free-function form of [`SearchSpace::decode`].
pub fn decode_position(pos: &[f64], space: &SearchSpace) -> Vec<f64> {
    space.decode(pos)
}

#[derive(Debug, Clone)]
pub struct Particle {
    pub position: Vec<f64>,
    pub velocity: Vec<f64>,
    pub best_position: Vec<f64>,
    pub best_score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PsoConfig {
    pub swarm_size: usize,
    pub iterations: usize,
    pub inertia: f64,
    pub cognitive: f64,
    pub social: f64,
    /// Velocity magnitude cap as a fraction of each dimension's range.
    pub velocity_clamp: f64,
    pub seed: u64,
}

impl Default for PsoConfig {
    fn default() -> Self {
        PsoConfig {
            swarm_size: 10,
            iterations: 10,
            inertia: 0.729,
            cognitive: 1.494,
            social: 1.494,
            velocity_clamp: 0.2,
            seed: 0,
        }
    }
}

impl PsoConfig {
    fn validate(&self) -> Result<()> {
        if self.swarm_size < 2 {
            return Err(Error::config("swarm_size must be at least 2"));
        }
        if self.iterations < 1 {
            return Err(Error::config("iterations must be at least 1"));
        }
        if self.inertia < 0.0 || self.cognitive < 0.0 || self.social < 0.0 {
            return Err(Error::config("PSO coefficients must be non-negative"));
        }
        if !(self.velocity_clamp > 0.0) {
            return Err(Error::config("velocity_clamp must be positive"));
        }
        Ok(())
    }
}

/// One objective evaluation, as written to the search trace.
#[derive(Debug, Clone, Serialize)]
pub struct EvalRecord {
    pub iteration: usize,
    pub particle: usize,
    pub decoded: Vec<f64>,
    pub score: f64,
}

#[derive(Debug, Clone)]
pub struct SwarmResult {
    /// Decoded best position.
    pub best_position: Vec<f64>,
    pub best_score: f64,
    /// Best score after each iteration; non-decreasing.
    pub history: Vec<f64>,
    pub evaluations: usize,
    pub trace: Vec<EvalRecord>,
    pub warnings: Vec<String>,
}

pub struct Swarm {
    pub space: SearchSpace,
    pub cfg: PsoConfig,
    pub particles: Vec<Particle>,
    rng: SeededRng,
}

impl Swarm {
    /// Random initialization: positions uniform in the box, velocities
    /// uniform within the clamp.
    pub fn new(space: SearchSpace, cfg: PsoConfig) -> Result<Self> {
        cfg.validate()?;
        space.validate()?;
        let mut rng = SeededRng::new(cfg.seed);
        let particles = (0..cfg.swarm_size)
            .map(|_| {
                let position: Vec<f64> = space
                    .dims
                    .iter()
                    .map(|d| rng.uniform(d.lower, d.upper).expect("validated range"))
                    .collect();
                let velocity: Vec<f64> = space
                    .dims
                    .iter()
                    .map(|d| {
                        let vmax = cfg.velocity_clamp * d.range();
                        rng.uniform(-vmax, vmax).expect("positive clamp")
                    })
                    .collect();
                Particle {
                    best_position: position.clone(),
                    position,
                    velocity,
                    best_score: f64::NEG_INFINITY,
                }
            })
            .collect();
        Ok(Swarm {
            space,
            cfg,
            particles,
            rng,
        })
    }

    /// Runs the evaluate / update-bests / move loop for the configured
    /// number of iterations. `threads` parallelizes objective evaluations
    /// within an iteration; results are identical for any thread count.
    pub fn run<F>(mut self, objective: F, threads: usize) -> SwarmResult
    where
        F: Fn(&[f64]) -> f64 + Sync,
    {
        let dims = self.space.len();
        let mut best_raw: Vec<f64> = self.particles[0].position.clone();
        let mut best_score = f64::NEG_INFINITY;
        let mut history = Vec::with_capacity(self.cfg.iterations);
        let mut trace = Vec::with_capacity(self.cfg.iterations * self.cfg.swarm_size);
        let mut warnings = Vec::new();
        let mut evaluations = 0;

        for iteration in 1..=self.cfg.iterations {
            let decoded: Vec<Vec<f64>> = self
                .particles
                .iter()
                .map(|p| self.space.decode(&p.position))
                .collect();
            let scores =
                crate::util::parallel_map_indexed(decoded.len(), threads, |i| objective(&decoded[i]));
            evaluations += scores.len();

            for (i, (p, mut score)) in self.particles.iter_mut().zip(scores).enumerate() {
                if !score.is_finite() {
                    warnings.push(format!(
                        "iteration {iteration}, particle {i}: non-finite objective ({score}), scored as -inf"
                    ));
                    score = f64::NEG_INFINITY;
                }
                trace.push(EvalRecord {
                    iteration,
                    particle: i,
                    decoded: decoded[i].clone(),
                    score,
                });
                if score > p.best_score {
                    p.best_score = score;
                    p.best_position = p.position.clone();
                }
                if score > best_score {
                    best_score = score;
                    best_raw = p.position.clone();
                }
            }
            history.push(best_score);

            for p in &mut self.particles {
                for d in 0..dims {
                    let r1 = self.rng.next_f64();
                    let r2 = self.rng.next_f64();
                    let dim = &self.space.dims[d];
                    let vmax = self.cfg.velocity_clamp * dim.range();
                    let v = self.cfg.inertia * p.velocity[d]
                        + self.cfg.cognitive * r1 * (p.best_position[d] - p.position[d])
                        + self.cfg.social * r2 * (best_raw[d] - p.position[d]);
                    p.velocity[d] = v.clamp(-vmax, vmax);
                    p.position[d] = (p.position[d] + p.velocity[d]).clamp(dim.lower, dim.upper);
                }
            }
        }

        SwarmResult {
            best_position: self.space.decode(&best_raw),
            best_score,
            history,
            evaluations,
            trace,
            warnings,
        }
    }
}

/// Initializes a random swarm and maximizes `objective` over `space`.
pub fn optimize<F>(objective: F, space: &SearchSpace, cfg: &PsoConfig) -> Result<SwarmResult>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    Ok(Swarm::new(space.clone(), cfg.clone())?.run(objective, 1))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn box_space(dims: usize, lo: f64, hi: f64) -> SearchSpace {
        SearchSpace::new(
            (0..dims)
                .map(|i| Dimension::continuous(&format!("x{i}"), lo, hi))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn pure_drift_with_unit_inertia() {
        let space = box_space(2, -1000.0, 1000.0);
        let cfg = PsoConfig {
            swarm_size: 2,
            iterations: 4,
            inertia: 1.0,
            cognitive: 0.0,
            social: 0.0,
            ..Default::default()
        };
        let mut swarm = Swarm::new(space, cfg).unwrap();
        for (i, p) in swarm.particles.iter_mut().enumerate() {
            p.position = vec![10.0 * i as f64, -5.0];
            p.velocity = vec![0.5, 0.25];
            p.best_position = p.position.clone();
        }
        let starts: Vec<Vec<f64>> = swarm.particles.iter().map(|p| p.position.clone()).collect();
        let result = swarm.run(|_| 0.0, 1);
        // With c1 = c2 = 0 and w = 1 the final evaluated position is the
        // start plus (iterations - 1) velocity steps.
        let last_rows: Vec<&EvalRecord> =
            result.trace.iter().filter(|r| r.iteration == 4).collect();
        for (i, row) in last_rows.iter().enumerate() {
            assert_eq!(row.decoded[0], starts[i][0] + 3.0 * 0.5);
            assert_eq!(row.decoded[1], starts[i][1] + 3.0 * 0.25);
        }
    }

    #[test]
    fn velocities_decay_geometrically_without_attraction() {
        // With c1 = c2 = 0 the velocity update is v <- w * v and it runs
        // before each move, so the position evaluated at iteration n is
        // x0 + sum_{k=1..n-1} v0 * w^k, exactly.
        let space = box_space(1, -1000.0, 1000.0);
        let cfg = PsoConfig {
            swarm_size: 2,
            iterations: 6,
            inertia: 0.5,
            cognitive: 0.0,
            social: 0.0,
            ..Default::default()
        };
        let mut swarm = Swarm::new(space, cfg).unwrap();
        let v0 = [3.0, -1.0];
        for (p, &v) in swarm.particles.iter_mut().zip(&v0) {
            p.velocity = vec![v];
        }
        let x0: Vec<f64> = swarm.particles.iter().map(|p| p.position[0]).collect();
        let result = swarm.run(|_| 0.0, 1);
        for (i, row) in result.trace.iter().filter(|r| r.iteration == 6).enumerate() {
            let drift: f64 = (1..=5).map(|k| v0[i] * 0.5f64.powi(k)).sum();
            assert_eq!(row.decoded[0], x0[i] + drift);
        }
    }

    #[test]
    fn maximizes_negative_sphere() {
        let space = box_space(5, -5.0, 5.0);
        let mut successes = 0;
        for seed in 0..10 {
            let cfg = PsoConfig {
                swarm_size: 20,
                iterations: 100,
                seed,
                ..Default::default()
            };
            let result = optimize(
                |x| -x.iter().map(|v| v * v).sum::<f64>(),
                &space,
                &cfg,
            )
            .unwrap();
            for w in result.history.windows(2) {
                assert!(w[1] >= w[0], "history must be non-decreasing");
            }
            assert_eq!(result.evaluations, 20 * 100);
            if result.best_score > -1e-3 {
                successes += 1;
            }
        }
        assert!(successes >= 8, "only {successes}/10 seeds converged");
    }

    #[test]
    fn one_dimensional_parabola_optimum() {
        let space = box_space(1, 0.0, 5.0);
        let cfg = PsoConfig {
            swarm_size: 10,
            iterations: 60,
            seed: 3,
            ..Default::default()
        };
        let result = optimize(|x| -(x[0] - 2.0) * (x[0] - 2.0), &space, &cfg).unwrap();
        assert!((result.best_position[0] - 2.0).abs() < 0.05);
    }

    #[test]
    fn decode_rounding_rules() {
        let space = SearchSpace::new(vec![
            Dimension::integer("hidden_size", 8.0, 128.0),
            Dimension::width_divisor("num_heads", "hidden_size", 1.0, 8.0),
            Dimension::integer("vmd_modes", 1.0, 8.0),
            Dimension::continuous("dropout", 0.0, 0.5),
        ])
        .unwrap();
        let decoded = space.decode(&[64.4, 2.6, 3.2, 0.25]);
        assert_eq!(decoded, vec![64.0, 2.0, 3.0, 0.25]);

        // Exactly integral positions pass through unchanged.
        let decoded = space.decode(&[32.0, 4.0, 5.0, 0.1]);
        assert_eq!(decoded, vec![32.0, 4.0, 5.0, 0.1]);

        // Half-away-from-zero rounding.
        let decoded = space.decode(&[32.5, 1.0, 2.5, 0.0]);
        assert_eq!(decoded[0], 33.0);
        assert_eq!(decoded[2], 3.0);
    }

    #[test]
    fn divisor_snap_respects_width() {
        let space = SearchSpace::new(vec![
            Dimension::integer("hidden_size", 8.0, 128.0),
            Dimension::width_divisor("num_heads", "hidden_size", 1.0, 8.0),
        ])
        .unwrap();
        // width 2*9 = 18; divisors within [1,8]: 1,2,3,6. 4.9 snaps to 6.
        let decoded = space.decode(&[9.2, 4.9]);
        assert_eq!(decoded, vec![9.0, 6.0]);
    }

    #[test]
    fn all_trace_rows_respect_constraints() {
        let space = SearchSpace::new(vec![
            Dimension::integer("hidden_size", 4.0, 32.0),
            Dimension::width_divisor("num_heads", "hidden_size", 1.0, 8.0),
            Dimension::continuous("dropout", 0.0, 0.5),
        ])
        .unwrap();
        let cfg = PsoConfig {
            swarm_size: 6,
            iterations: 12,
            seed: 11,
            ..Default::default()
        };
        let result = optimize(|x| -x[2], &space, &cfg).unwrap();
        assert_eq!(result.trace.len(), 6 * 12);
        for row in &result.trace {
            let h = row.decoded[0];
            let heads = row.decoded[1];
            assert_eq!(h, h.round());
            assert!((4.0..=32.0).contains(&h));
            assert!((1.0..=8.0).contains(&heads));
            assert_eq!((2.0 * h) as u64 % heads as u64, 0, "heads must divide width");
            assert!((0.0..=0.5).contains(&row.decoded[2]));
        }
    }

    #[test]
    fn non_finite_objective_is_warned_and_ignored() {
        let space = box_space(1, -1.0, 1.0);
        let cfg = PsoConfig {
            swarm_size: 4,
            iterations: 5,
            seed: 2,
            ..Default::default()
        };
        let result = optimize(
            |x| if x[0] < 0.0 { f64::NAN } else { x[0] },
            &space,
            &cfg,
        )
        .unwrap();
        assert!(!result.warnings.is_empty());
        assert!(result.best_score.is_finite());
    }

    #[test]
    fn identical_seeds_produce_identical_results() {
        let space = box_space(3, -2.0, 2.0);
        let cfg = PsoConfig {
            swarm_size: 5,
            iterations: 10,
            seed: 42,
            ..Default::default()
        };
        let f = |x: &[f64]| -x.iter().map(|v| v * v).sum::<f64>();
        let a = optimize(f, &space, &cfg).unwrap();
        let b = optimize(f, &space, &cfg).unwrap();
        assert_eq!(a.best_position, b.best_position);
        assert_eq!(a.best_score, b.best_score);
        assert_eq!(a.history, b.history);
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let space = box_space(1, 0.0, 1.0);
        let cfg = PsoConfig {
            swarm_size: 1,
            ..Default::default()
        };
        assert!(Swarm::new(space.clone(), cfg).is_err());

        assert!(SearchSpace::new(vec![Dimension::integer("a", 0.5, 2.0)]).is_err());
        assert!(SearchSpace::new(vec![Dimension::continuous("a", 1.0, 1.0)]).is_err());
        assert!(SearchSpace::new(vec![Dimension::width_divisor("h", "missing", 1.0, 4.0)]).is_err());
    }
}
