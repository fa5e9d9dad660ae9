//! The randomized q-monomial detector.
//!
//! One iteration: sample a replacement plan (fresh bits `c_ijl`), a nonzero
//! vector `v_il` of `Z_2^k` per shared y-variable, and a uniform field point
//! per z-variable; then evaluate the reconstructed circuit over `F[Z_2^k]`
//! with each occurrence terminal bound to `sum_l c_ijl (v_il + v0)` and each
//! z-terminal bound to its field scalar. Non-multilinear y-products square
//! some `(v + v0)` away to zero and dependent vector sets annihilate, so the
//! value can only be nonzero when a degree-k q-monomial exists: a `yes` is
//! never wrong. In the other direction one iteration succeeds with
//! probability at least `0.28^k * 0.28 * 1/2`, so a loop budget of
//! `(1/0.28)^k` iterations gives a single run a success floor of
//! `(1/8)(1 - 1/e)`, and independent restarts amplify it.
//!
//! Iterations are mutually independent: each draws its randomness from a
//! stream derived from (master seed, restart, iteration), so reports are
//! identical whatever the thread count, and the reported hit is the minimal
//! iteration index that succeeded.

use crate::circuit::{Circuit, EvalDomain};
use crate::gf2d::{field_for_degree, FieldError, FieldParams};
use crate::group_algebra::{random_nonzero_vector, GroupAlgebraElement, MAX_GROUP_RANK};
use crate::reconstruct::{reconstruct, ReconstructError, ReconstructedCircuit};
use crate::transform::{sample_plan, ReplacementPlan};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::time::Instant;
use thiserror::Error;

/// Lower bound on the success probability of one full run (one loop budget)
/// when a degree-k q-monomial exists; slightly under `(1/8)(1 - 1/e)`.
pub const SUCCESS_FLOOR: f64 = 0.0787;

pub const DEFAULT_MAX_K: u32 = 16;

#[derive(Debug, Error, PartialEq)]
pub enum DetectError {
    #[error("q must be at least 2, got {0}")]
    InvalidQ(u32),
    #[error("k must be at least 1")]
    InvalidK,
    #[error("k = {k} exceeds the configured cap {max_k} (memory grows as 2^k)")]
    KOverCap { k: u32, max_k: u32 },
    #[error("loop budget and restarts must be at least 1")]
    EmptyBudget,
    #[error("confidence target must be in (0, 1], got {0}")]
    BadConfidence(f64),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Reconstruct(#[from] ReconstructError),
}

#[derive(Debug, Clone, Serialize)]
pub struct DetectConfig {
    pub q: u32,
    pub k: u32,
    /// Iterations per run; defaults to `ceil((1/0.28)^k)`.
    pub loop_budget: u64,
    /// Independent repetitions of the whole run.
    pub restarts: u64,
    pub seed: u64,
    /// Safety cap on k (group-algebra elements hold `2^k` coefficients).
    pub max_k: u32,
    /// Worker threads; `None` uses the global thread pool.
    #[serde(skip)]
    pub jobs: Option<usize>,
}

impl DetectConfig {
    pub fn new(q: u32, k: u32, seed: u64) -> DetectConfig {
        DetectConfig {
            q,
            k,
            loop_budget: default_loop_budget(k),
            restarts: 1,
            seed,
            max_k: DEFAULT_MAX_K,
            jobs: None,
        }
    }

    fn validate(&self) -> Result<(), DetectError> {
        if self.q < 2 {
            return Err(DetectError::InvalidQ(self.q));
        }
        if self.k == 0 {
            return Err(DetectError::InvalidK);
        }
        if self.k > self.max_k || self.k > MAX_GROUP_RANK {
            return Err(DetectError::KOverCap {
                k: self.k,
                max_k: self.max_k.min(MAX_GROUP_RANK),
            });
        }
        if self.loop_budget == 0 || self.restarts == 0 {
            return Err(DetectError::EmptyBudget);
        }
        Ok(())
    }
}

/// `ceil((1/0.28)^k)` iterations per run.
pub fn default_loop_budget(k: u32) -> u64 {
    (1.0f64 / 0.28).powi(k as i32).ceil() as u64
}

/// Restarts needed to push the miss probability of repeated runs below
/// `target_failure_prob`, using the `SUCCESS_FLOOR` per-run bound.
pub fn restarts_for_confidence(target_failure_prob: f64) -> Result<u64, DetectError> {
    if !(target_failure_prob > 0.0 && target_failure_prob <= 1.0) {
        return Err(DetectError::BadConfidence(target_failure_prob));
    }
    if target_failure_prob >= 1.0 {
        return Ok(1);
    }
    let n = (target_failure_prob.ln() / (1.0 - SUCCESS_FLOOR).ln()).ceil() as u64;
    Ok(n.max(1))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Decision {
    Yes,
    No,
}

/// Outcome of a detector run. With a fixed seed and config the report is
/// identical regardless of thread count; `iterations_executed` counts the
/// iterations a sequential execution would perform (all of them for a `no`,
/// everything up to and including the first hit for a `yes`).
#[derive(Debug, Clone, Serialize)]
pub struct DetectReport {
    pub decision: Decision,
    pub iterations_executed: u64,
    /// Iteration index within the hitting restart, 0-based.
    pub first_hit_iteration: Option<u64>,
    /// Which restart hit, 0-based.
    pub restart_index: Option<u64>,
    pub field_degree: u32,
    /// Seconds.
    pub wall_time: f64,
}

struct GroupAlgebraDomain;

impl EvalDomain for GroupAlgebraDomain {
    type Value = GroupAlgebraElement;
    fn add(&self, a: &GroupAlgebraElement, b: &GroupAlgebraElement) -> GroupAlgebraElement {
        a.add(b)
    }
    fn mul(&self, a: &GroupAlgebraElement, b: &GroupAlgebraElement) -> GroupAlgebraElement {
        a.mul(b)
    }
}

/// Variable slots of `C'` resolved once per run.
struct Prepared<'a> {
    rc: &'a ReconstructedCircuit,
    field: FieldParams,
    q: u32,
    k: u32,
    /// (circuit variable index, occurrence group index) in canonical order.
    occurrence_slots: Vec<(usize, usize)>,
    z_slots: Vec<usize>,
}

impl<'a> Prepared<'a> {
    fn new(rc: &'a ReconstructedCircuit, q: u32, k: u32) -> Result<Prepared<'a>, DetectError> {
        let field = field_for_degree(k)?;
        let mut occurrence_slots = Vec::with_capacity(rc.occurrence_count());
        for (gix, group) in rc.x_occurrences.iter().enumerate() {
            for occ in &group.occurrences {
                let vix = rc
                    .circuit
                    .var_index(occ)
                    .expect("occurrence declared in C'");
                occurrence_slots.push((vix, gix));
            }
        }
        let z_slots = rc
            .z_vars
            .iter()
            .map(|z| rc.circuit.var_index(&z.name).expect("z declared in C'"))
            .collect();
        Ok(Prepared {
            rc,
            field,
            q,
            k,
            occurrence_slots,
            z_slots,
        })
    }

    /// One loop iteration. Sampling order is fixed: plan bits (occurrence
    /// rows in canonical order, ell-minor), then one nonzero vector per
    /// (original variable, ell), then one field point per z-variable.
    fn iterate(&self, rng: &mut ChaCha8Rng) -> bool {
        let plan = sample_plan(self.rc, self.q, rng).expect("q validated");
        let groups = self.rc.x_occurrences.len();
        let per_var = (self.q - 1) as usize;
        let mut vectors = Vec::with_capacity(groups * per_var);
        for _ in 0..groups * per_var {
            vectors.push(random_nonzero_vector(self.k, rng));
        }

        let zero = GroupAlgebraElement::zero(self.field, self.k);
        let mut values: Vec<GroupAlgebraElement> = vec![zero; self.rc.circuit.variables().len()];

        let mut slot = 0usize;
        for (gix, plan_group) in plan.groups().iter().enumerate() {
            for row in &plan_group.rows {
                let (vix, slot_gix) = self.occurrence_slots[slot];
                debug_assert_eq!(gix, slot_gix);
                slot += 1;
                let value = &mut values[vix];
                for (ell, &bit) in row.iter().enumerate() {
                    if bit {
                        let v = vectors[gix * per_var + ell];
                        value.add_assign(&GroupAlgebraElement::from_vector_plus_v0(self.field, v));
                    }
                }
            }
        }
        for &vix in &self.z_slots {
            let point = self.field.random_element(rng);
            values[vix] = GroupAlgebraElement::identity(self.field, self.k).scale(point);
        }

        let result = self
            .rc
            .circuit
            .evaluate_indexed(&GroupAlgebraDomain, &values);
        !result.is_zero()
    }
}

fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Stable per-iteration stream: mixing is explicit, so results do not depend
/// on the platform or on any hasher implementation.
fn iteration_seed(master: u64, restart: u64, iteration: u64) -> u64 {
    splitmix64(splitmix64(splitmix64(master) ^ restart) ^ iteration)
}

/// One iteration against an already reconstructed circuit, with caller-
/// provided randomness. Exposed for probability measurements.
pub fn run_iteration(
    rc: &ReconstructedCircuit,
    cfg: &DetectConfig,
    rng: &mut ChaCha8Rng,
) -> Result<bool, DetectError> {
    cfg.validate()?;
    let prepared = Prepared::new(rc, cfg.q, cfg.k)?;
    Ok(prepared.iterate(rng))
}

/// Full detector: reconstruct once, then `restarts x loop_budget` independent
/// iterations, answering `yes` at the first nonzero evaluation.
///
/// Precondition on honest answers (not checked here; see the oracle): the
/// circuit has no q-monomial of degree *below* k. `decision = No` can still
/// be trusted unconditionally -- the algorithm never produces a false `yes`.
pub fn run(c: &Circuit, cfg: &DetectConfig) -> Result<DetectReport, DetectError> {
    cfg.validate()?;
    let rc = reconstruct(c)?;
    run_reconstructed(&rc, cfg)
}

/// [`run`] for a circuit that has already been reconstructed.
pub fn run_reconstructed(
    rc: &ReconstructedCircuit,
    cfg: &DetectConfig,
) -> Result<DetectReport, DetectError> {
    cfg.validate()?;
    let prepared = Prepared::new(rc, cfg.q, cfg.k)?;
    let start = Instant::now();
    let total = cfg.restarts * cfg.loop_budget;

    let search = || {
        (0..total).into_par_iter().find_first(|&i| {
            let restart = i / cfg.loop_budget;
            let iteration = i % cfg.loop_budget;
            let mut rng = ChaCha8Rng::seed_from_u64(iteration_seed(cfg.seed, restart, iteration));
            prepared.iterate(&mut rng)
        })
    };
    let hit = match cfg.jobs {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .expect("thread pool")
            .install(search),
        None => search(),
    };

    let wall_time = start.elapsed().as_secs_f64();
    Ok(match hit {
        Some(i) => DetectReport {
            decision: Decision::Yes,
            iterations_executed: i + 1,
            first_hit_iteration: Some(i % cfg.loop_budget),
            restart_index: Some(i / cfg.loop_budget),
            field_degree: prepared.field.degree(),
            wall_time,
        },
        None => DetectReport {
            decision: Decision::No,
            iterations_executed: total,
            first_hit_iteration: None,
            restart_index: None,
            field_degree: prepared.field.degree(),
            wall_time,
        },
    })
}

/// Runs enough restarts that a `no` answer is wrong with probability at most
/// `target_failure_prob` whenever a degree-k q-monomial exists.
pub fn decision_with_confidence(
    c: &Circuit,
    cfg: &DetectConfig,
    target_failure_prob: f64,
) -> Result<DetectReport, DetectError> {
    let mut amplified = cfg.clone();
    amplified.restarts = restarts_for_confidence(target_failure_prob)?;
    run(c, &amplified)
}

/// Samples the plan the given iteration would use; for debugging dumps.
pub fn plan_for_iteration(
    rc: &ReconstructedCircuit,
    cfg: &DetectConfig,
    restart: u64,
    iteration: u64,
) -> Result<ReplacementPlan, DetectError> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(iteration_seed(cfg.seed, restart, iteration));
    Ok(sample_plan(rc, cfg.q, &mut rng).expect("q validated"))
}
