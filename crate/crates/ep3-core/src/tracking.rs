//! Continuation of eigenvalues and c-normalized eigenvectors along closed
//! parameter loops, with monodromy permutation, geometric-phase and
//! self-crossing extraction.
//!
//! Branch matching between consecutive samples is exhaustive over all
//! assignments (dimension is capped at 6), with adaptive step bisection
//! where the assignment is not clearly separated from the runner-up.

use alloc::vec;
use alloc::vec::Vec;

// f64 math methods come from the trait when building without std
#[cfg_attr(feature = "std", allow(unused_imports))]
use num_traits::Float as _;
use num_complex::Complex64;

use crate::error::CoreError;
use crate::linalg::{self, c_dot, ComplexVector};
use crate::models::FamilyDef;

/// Dimension cap for loop tracking (exhaustive assignment is n!).
pub const TRACK_MAX_DIM: usize = 6;
/// Maximum bisection depth for ambiguous matching steps.
const MAX_REFINE_DEPTH: usize = 12;
/// Consecutive samples allowed to carry no usable eigenvector.
const MAX_ABSENT_RUN: usize = 2;

/// Closed path in parameter space, traversed counterclockwise in `phi`.
#[derive(Debug, Clone, Copy)]
pub enum LoopPath {
    /// One complex parameter: `z(phi) = center + radius e^{i phi}`.
    ComplexCircle { center: Complex64, radius: f64 },
    /// Two real parameters: `(a, b) = radius (cos phi, sin phi)`.
    RealEllipse { radius: f64 },
}

/// A loop to track: path, resolution, and the number of parameter cycles.
#[derive(Debug, Clone, Copy)]
pub struct LoopSpec {
    pub path: LoopPath,
    /// Samples per parameter cycle; must be even and at least 64.
    pub steps_per_cycle: usize,
    pub cycles: usize,
    /// Traverse the loop clockwise instead.
    pub reversed: bool,
}

impl LoopSpec {
    pub fn validate(&self) -> Result<(), CoreError> {
        let radius = match self.path {
            LoopPath::ComplexCircle { radius, .. } => radius,
            LoopPath::RealEllipse { radius } => radius,
        };
        if !(radius > 0.0) {
            return Err(CoreError::InvalidInput("loop radius must be positive"));
        }
        if self.steps_per_cycle < 64 || self.steps_per_cycle % 2 != 0 {
            return Err(CoreError::InvalidInput("steps_per_cycle must be even and >= 64"));
        }
        if self.cycles < 1 {
            return Err(CoreError::InvalidInput("cycles must be >= 1"));
        }
        Ok(())
    }
}

/// One tracked sample: eigenvalues (and vectors where usable) in trajectory
/// order.
#[derive(Debug, Clone)]
pub struct LoopSample {
    pub phi: f64,
    pub values: Vec<Complex64>,
    /// `None` where the eigenvector was near-self-orthogonal and its
    /// c-normalization would amplify noise.
    pub vectors: Vec<Option<ComplexVector>>,
}

/// Result of tracking a closed loop.
#[derive(Debug, Clone)]
pub struct LoopReport {
    pub branch_count: usize,
    pub samples: Vec<LoopSample>,
    /// Per cycle boundary `k`: cumulative permutation after `k+1` cycles;
    /// `permutations[k][j]` is the initial branch slot whose eigenvalue
    /// trajectory `j` occupies at sample `(k+1) * steps_per_cycle`.
    pub permutations: Vec<Vec<usize>>,
    /// Per cycle boundary: cumulative endpoint overlap factor per trajectory
    /// (complex, magnitude near 1 for c-normalized branches).
    pub overlaps: Vec<Vec<Complex64>>,
    /// Per cycle boundary: cumulative +-1 sign factors per trajectory.
    pub signs: Vec<Vec<f64>>,
    /// Smallest m with permutation^m = identity and all orbit sign products
    /// equal to +1.
    pub cycles_to_return: usize,
    /// Per branch: phase in (-pi, pi] accumulated when the branch first
    /// returns to its own slot (after its orbit period).
    pub phases: Vec<f64>,
    /// Per cycle boundary and branch: discrete parallel-transport phase
    /// accumulated step by step from the start, plus the loop-closure
    /// overlap argument against the matched initial vector (which carries
    /// the topological sign the step increments cannot see).
    pub accumulated_phases: Vec<Vec<f64>>,
}

/// A self-intersection of a branch trajectory in the complex plane.
#[derive(Debug, Clone)]
pub struct Crossing {
    pub branch: usize,
    pub phi1: f64,
    pub phi2: f64,
    pub point: Complex64,
}

/// Monodromy digest: disjoint-cycle structure and the geometric phase of
/// each orbit over one full orbit period.
#[derive(Debug, Clone)]
pub struct MonodromySummary {
    pub cycle_structure: Vec<usize>,
    pub phase_per_orbit: Vec<f64>,
    /// Branch labels per orbit, parallel to `cycle_structure`.
    pub orbits: Vec<Vec<usize>>,
}

struct TrackState {
    phi: f64,
    values: Vec<Complex64>,
    /// Last usable vector per trajectory (sign-aligned), plus the count of
    /// consecutive absent samples since.
    vectors: Vec<(Option<ComplexVector>, usize)>,
    acc_phase: Vec<f64>,
}

fn path_matrix(
    family: &FamilyDef,
    path: &LoopPath,
    phi: f64,
) -> Result<crate::linalg::ComplexMatrix, CoreError> {
    match path {
        LoopPath::ComplexCircle { center, radius } => {
            if family.nparams() != 1 {
                return Err(CoreError::InvalidInput(
                    "complex-circle loops need a one-parameter family",
                ));
            }
            family.evaluate_one(center + Complex64::from_polar(*radius, phi))
        }
        LoopPath::RealEllipse { radius } => {
            if family.nparams() != 2 {
                return Err(CoreError::InvalidInput(
                    "real-ellipse loops need a two-parameter family",
                ));
            }
            let (s, c) = phi.sin_cos();
            family.evaluate(&[
                Complex64::new(radius * c, 0.0),
                Complex64::new(radius * s, 0.0),
            ])
        }
    }
}

fn sample_spectrum(
    family: &FamilyDef,
    path: &LoopPath,
    phi: f64,
    step: usize,
) -> Result<(Vec<Complex64>, Vec<Option<ComplexVector>>, f64), CoreError> {
    let m = path_matrix(family, path, phi)?;
    let spectrum = linalg::eig(&m, linalg::CLUSTER_TOL_DEFAULT)?;
    let scale = 1.0 + m.norm();
    if spectrum.any_defective() || spectrum.min_pairwise_gap() < 1e-9 * scale {
        return Err(CoreError::EpOnPath { step, phi });
    }
    let vectors = spectrum
        .vectors
        .iter()
        .map(|slot| {
            slot.as_ref().and_then(|ev| {
                if ev.self_orthogonal {
                    None
                } else {
                    Some(ev.vector.clone())
                }
            })
        })
        .collect();
    Ok((spectrum.values, vectors, scale))
}

/// All permutations of `0..n` in a deterministic order.
fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut items: Vec<usize> = (0..n).collect();
    heap_permute(&mut items, n, &mut out);
    out
}

fn heap_permute(items: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
    if k == 1 {
        out.push(items.clone());
        return;
    }
    for i in 0..k {
        heap_permute(items, k - 1, out);
        if k % 2 == 0 {
            items.swap(i, k - 1);
        } else {
            items.swap(0, k - 1);
        }
    }
}

/// Best and second-best assignments of `prev[j] -> next[perm[j]]` under
/// total |delta lambda|.
fn best_assignment(
    prev: &[Complex64],
    next: &[Complex64],
    perms: &[Vec<usize>],
) -> (Vec<usize>, f64, f64) {
    let mut best: Option<(usize, f64)> = None;
    let mut second = f64::INFINITY;
    for (pi, perm) in perms.iter().enumerate() {
        let cost: f64 = prev
            .iter()
            .enumerate()
            .map(|(j, &v)| (next[perm[j]] - v).norm())
            .sum();
        match best {
            None => best = Some((pi, cost)),
            Some((_, bcost)) if cost < bcost => {
                second = bcost;
                best = Some((pi, cost));
            }
            Some(_) => second = second.min(cost),
        }
    }
    let (pi, cost) = best.expect("at least one permutation");
    (perms[pi].clone(), cost, second)
}

/// Advance the tracking state from `state.phi` to `phi_target`, bisecting
/// the step while the assignment is ambiguous.
fn advance(
    family: &FamilyDef,
    path: &LoopPath,
    state: &mut TrackState,
    phi_target: f64,
    step: usize,
    perms: &[Vec<usize>],
    depth: usize,
) -> Result<(), CoreError> {
    let (values, vectors, _) = sample_spectrum(family, path, phi_target, step)?;
    let n = state.values.len();
    let (perm, best_cost, second_cost) = best_assignment(&state.values, &values, perms);
    if n > 1 && second_cost - best_cost < 2.0 * best_cost {
        if depth >= MAX_REFINE_DEPTH {
            return Err(CoreError::MatchingAmbiguous { phi: phi_target });
        }
        let mid = 0.5 * (state.phi + phi_target);
        advance(family, path, state, mid, step, perms, depth + 1)?;
        return advance(family, path, state, phi_target, step, perms, depth + 1);
    }
    // reorder into trajectory slots and align vector signs by the c-product
    let mut new_values = vec![Complex64::new(0.0, 0.0); n];
    let mut new_vectors: Vec<Option<ComplexVector>> = vec![None; n];
    for j in 0..n {
        new_values[j] = values[perm[j]];
        new_vectors[j] = vectors[perm[j]].clone();
    }
    for j in 0..n {
        match (&state.vectors[j].0, &mut new_vectors[j]) {
            (Some(prev_v), Some(next_v)) => {
                let overlap = c_dot(prev_v, next_v).expect("tracked dimensions agree");
                // smooth transport increment in the continuity gauge; this
                // is second order in the step for c-normalized branches
                // (u^T du = 0), so the sum stays near zero and the
                // topological phase enters through the loop closure term
                // recorded at cycle boundaries
                let aligned = if overlap.re < 0.0 {
                    state.acc_phase[j] += (-overlap).arg();
                    next_v.scale(Complex64::new(-1.0, 0.0))
                } else {
                    state.acc_phase[j] += overlap.arg();
                    next_v.clone()
                };
                state.vectors[j] = (Some(aligned.clone()), 0);
                *next_v = aligned;
            }
            (Some(_), None) => {
                let run = state.vectors[j].1 + 1;
                if run > MAX_ABSENT_RUN {
                    return Err(CoreError::MatchingAmbiguous { phi: phi_target });
                }
                state.vectors[j].1 = run;
            }
            (None, Some(next_v)) => {
                state.vectors[j] = (Some(next_v.clone()), 0);
            }
            (None, None) => {}
        }
    }
    state.phi = phi_target;
    state.values = new_values;
    Ok(())
}

/// Track eigenvalue/eigenvector branches around the loop and extract the
/// monodromy data.
pub fn track_loop(family: &FamilyDef, spec: &LoopSpec) -> Result<LoopReport, CoreError> {
    spec.validate()?;
    let n = family.dim();
    if n > TRACK_MAX_DIM {
        return Err(CoreError::InvalidInput("loop tracking is limited to dimension 6"));
    }
    let perms = permutations(n);
    let orientation = if spec.reversed { -1.0 } else { 1.0 };
    let dphi = orientation * core::f64::consts::TAU / spec.steps_per_cycle as f64;
    let total_steps = spec.steps_per_cycle * spec.cycles;

    let (values0, vectors0, _) = sample_spectrum(family, &spec.path, 0.0, 0)?;
    let initial_vectors = vectors0.clone();
    let mut state = TrackState {
        phi: 0.0,
        values: values0.clone(),
        vectors: vectors0.iter().cloned().map(|v| (v, 0)).collect(),
        acc_phase: vec![0.0; n],
    };
    let mut samples = Vec::with_capacity(total_steps + 1);
    samples.push(LoopSample { phi: 0.0, values: values0.clone(), vectors: vectors0 });

    let mut permutations_per_cycle = Vec::with_capacity(spec.cycles);
    let mut overlaps_per_cycle = Vec::with_capacity(spec.cycles);
    let mut signs_per_cycle = Vec::with_capacity(spec.cycles);
    let mut acc_phase_per_cycle = Vec::with_capacity(spec.cycles);

    for k in 1..=total_steps {
        let phi = dphi * k as f64;
        advance(family, &spec.path, &mut state, phi, k, &perms, 0)?;
        samples.push(LoopSample {
            phi,
            values: state.values.clone(),
            vectors: state.vectors.iter().map(|(v, run)| {
                if *run == 0 { v.clone() } else { None }
            }).collect(),
        });

        if k % spec.steps_per_cycle == 0 {
            // cumulative monodromy against sample 0 (same parameter point)
            let (perm, _, _) = best_assignment(&state.values, &values0, &perms);
            let mut overlaps = vec![Complex64::new(1.0, 0.0); n];
            let mut signs = vec![1.0_f64; n];
            let mut acc = state.acc_phase.clone();
            for j in 0..n {
                if let (Some(cur), Some(init)) =
                    (&state.vectors[j].0, &initial_vectors[perm[j]])
                {
                    // cur = rho * init for matched c-normalized branches,
                    // so the c-product reads off rho directly
                    let o = c_dot(cur, init).expect("tracked dimensions agree");
                    overlaps[j] = o;
                    signs[j] = if o.re >= 0.0 { 1.0 } else { -1.0 };
                    // the discrete transport sum is blind to the topological
                    // sign (increments are second order), so the loop
                    // closure overlap supplies it here
                    acc[j] += o.arg();
                }
            }
            permutations_per_cycle.push(perm);
            overlaps_per_cycle.push(overlaps);
            signs_per_cycle.push(signs);
            acc_phase_per_cycle.push(acc);
        }
    }

    let first_perm = &permutations_per_cycle[0];
    let first_overlap = &overlaps_per_cycle[0];
    let orbits = permutation_cycles(first_perm);
    let phases = branch_return_phases(first_perm, first_overlap, &orbits);
    let cycles_to_return = formal_cycles_to_return(&orbits, &phases);

    Ok(LoopReport {
        branch_count: n,
        samples,
        permutations: permutations_per_cycle,
        overlaps: overlaps_per_cycle,
        signs: signs_per_cycle,
        cycles_to_return,
        phases,
        accumulated_phases: acc_phase_per_cycle,
    })
}

/// Disjoint cycles of a permutation, each starting at its smallest member,
/// listed in order of that member.
pub fn permutation_cycles(perm: &[usize]) -> Vec<Vec<usize>> {
    let n = perm.len();
    let mut seen = vec![false; n];
    let mut cycles = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut cycle = vec![start];
        seen[start] = true;
        let mut cur = perm[start];
        while cur != start {
            seen[cur] = true;
            cycle.push(cur);
            cur = perm[cur];
        }
        cycles.push(cycle);
    }
    cycles
}

/// Phase accumulated by each branch when it first returns to its own slot:
/// the argument of the product of single-cycle overlap factors along its
/// orbit, in (-pi, pi].
fn branch_return_phases(
    perm: &[usize],
    overlaps: &[Complex64],
    orbits: &[Vec<usize>],
) -> Vec<f64> {
    let mut phases = vec![0.0; perm.len()];
    for orbit in orbits {
        let mut factor = Complex64::new(1.0, 0.0);
        for &j in orbit {
            factor *= overlaps[j];
        }
        let phase = factor.arg();
        for &j in orbit {
            phases[j] = phase;
        }
    }
    phases
}

fn formal_cycles_to_return(orbits: &[Vec<usize>], phases: &[f64]) -> usize {
    let mut result = 1usize;
    for orbit in orbits {
        let phase = phases[orbit[0]];
        // orbit phase is 0 or pi up to noise; pi doubles the period
        let period = if phase.abs() > core::f64::consts::FRAC_PI_2 {
            2 * orbit.len()
        } else {
            orbit.len()
        };
        result = lcm(result, period);
    }
    result
}

fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Decompose the first-cycle monodromy of a report.
pub fn monodromy_summary(report: &LoopReport) -> MonodromySummary {
    let perm = &report.permutations[0];
    let orbits = permutation_cycles(perm);
    let cycle_structure: Vec<usize> = orbits.iter().map(|o| o.len()).collect();
    let phase_per_orbit = orbits.iter().map(|o| report.phases[o[0]]).collect();
    MonodromySummary { cycle_structure, phase_per_orbit, orbits }
}

/// All transversal self-intersections of each branch trajectory polyline in
/// the complex plane (adjacent segments excluded).
pub fn detect_self_crossings(report: &LoopReport) -> Vec<Crossing> {
    let mut crossings = Vec::new();
    let steps = report.samples.len();
    for branch in 0..report.branch_count {
        let points: Vec<Complex64> =
            report.samples.iter().map(|s| s.values[branch]).collect();
        for i in 0..steps.saturating_sub(1) {
            for j in (i + 2)..steps.saturating_sub(1) {
                if let Some((t, point)) =
                    segment_intersection(points[i], points[i + 1], points[j], points[j + 1])
                {
                    let phi1 = report.samples[i].phi
                        + t * (report.samples[i + 1].phi - report.samples[i].phi);
                    crossings.push(Crossing {
                        branch,
                        phi1,
                        phi2: report.samples[j].phi,
                        point,
                    });
                }
            }
        }
    }
    crossings
}

/// Transversal intersection of segments `p1 p2` and `p3 p4`. Each segment
/// is treated as half-open (start included, end excluded), so a crossing
/// that falls exactly on a shared polyline vertex is counted once, on the
/// segment that starts there. Returns the parameter along the first
/// segment and the crossing point.
fn segment_intersection(
    p1: Complex64,
    p2: Complex64,
    p3: Complex64,
    p4: Complex64,
) -> Option<(f64, Complex64)> {
    let d1 = p2 - p1;
    let d2 = p4 - p3;
    let denom = d1.re * d2.im - d1.im * d2.re;
    let scale = d1.norm() * d2.norm();
    if denom.abs() <= 1e-12 * scale.max(1e-300) {
        return None; // parallel or degenerate
    }
    let rhs = p3 - p1;
    let t = (rhs.re * d2.im - rhs.im * d2.re) / denom;
    let s = (rhs.re * d1.im - rhs.im * d1.re) / denom;
    let eps = 1e-9;
    if t > -eps && t < 1.0 - eps && s > -eps && s < 1.0 - eps {
        Some((t, p1 + d1 * t))
    } else {
        None
    }
}
