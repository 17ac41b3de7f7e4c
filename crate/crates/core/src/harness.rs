//! End-to-end roundtrip runs: generate a YES instance, solve it, reduce,
//! color, audit, extract, compare.

use std::fmt::{self, Write as _};
use std::str::FromStr;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bcoloring::{check_b_coloring, Coloring};
use crate::circori::{gen_yes_instance, solve_circori_brute, CircOriInstance};
use crate::decomposition::{pd_from_order, pd_width, LinearOrder, PathDecomposition};
use crate::graph::Orientation;
use crate::reduction::{
    audit_coloring_unchecked, build_instance, build_pd_for_h, extract_orientation, forward_witness, AuditReport,
    ReducedInstance,
};

/// Deliberate corruption of the forward witness, to check that the pipeline
/// notices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Perturb {
    /// Third superstar leaf takes the color of the first.
    RepeatLeaf,
    /// First pad vertex of the first source vertex takes its center's color.
    RecolorPad,
    /// Swaps the colors of the first `q` vertex of the first edge and the
    /// first vertex of its `Z` set; stays proper, loses a b-vertex.
    SwapQz,
}

impl Perturb {
    pub const ALL: [Perturb; 3] = [Perturb::RepeatLeaf, Perturb::RecolorPad, Perturb::SwapQz];

    pub fn name(self) -> &'static str {
        match self {
            Perturb::RepeatLeaf => "repeat-leaf",
            Perturb::RecolorPad => "recolor-pad",
            Perturb::SwapQz => "swap-qz",
        }
    }

    pub fn apply(self, red: &ReducedInstance, c: &mut Coloring) {
        match self {
            Perturb::RepeatLeaf => {
                let leaves = red.superstar_leaves();
                c.set(leaves[2], c.get(leaves[0]).unwrap());
            }
            Perturb::RecolorPad => {
                let v = red.source().graph().vertices().next().unwrap();
                let center = red.orig(v).unwrap();
                if let Some(&p) = red.pads(v).first() {
                    c.set(p, c.get(center).unwrap());
                }
            }
            Perturb::SwapQz => {
                let gd = &red.gadgets()[0];
                let (q, z) = (gd.q[0], gd.z[0]);
                let (cq, cz) = (c.get(q).unwrap(), c.get(z).unwrap());
                c.set(q, cz);
                c.set(z, cq);
            }
        }
    }
}

impl fmt::Display for Perturb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Perturb {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Perturb::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| format!("unknown perturbation '{s}' (expected one of repeat-leaf, recolor-pad, swap-qz)"))
    }
}

/// Size parameters for a roundtrip run. Every trial draws its own vertex
/// count in `3..=n_max` and cycle count in `1..=cycles_max`; each cycle
/// carries flow at most `wmax / cycles`, so no edge weight exceeds `wmax`.
/// Draws with more than `m_max` edges are redrawn.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RoundtripParams {
    pub seed: u64,
    pub trials: usize,
    pub n_max: usize,
    pub m_max: usize,
    pub wmax: u64,
    pub cycles_max: usize,
    pub perturb: Option<Perturb>,
    #[serde(skip)]
    pub timings: bool,
}

impl Default for RoundtripParams {
    fn default() -> Self {
        RoundtripParams {
            seed: 42,
            trials: 100,
            n_max: 8,
            m_max: 14,
            wmax: 4,
            cycles_max: 3,
            perturb: None,
            timings: false,
        }
    }
}

impl RoundtripParams {
    /// Command line that reruns trial `index` alone.
    pub fn repro_command(&self, index: usize) -> String {
        let mut cmd = format!(
            "bcolab roundtrip --seed {} --trials 1 --n {} --m {} --wmax {} --cycles {}",
            self.seed.wrapping_add(index as u64),
            self.n_max,
            self.m_max,
            self.wmax,
            self.cycles_max
        );
        if let Some(p) = self.perturb {
            write!(cmd, " --perturb {p}").unwrap();
        }
        cmd
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StageOutcome {
    pub stage: &'static str,
    pub ok: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialRecord {
    pub index: usize,
    pub seed: u64,
    pub n: usize,
    pub m: usize,
    pub total_weight: u64,
    pub source_width: usize,
    pub k: u32,
    pub h_vertices: usize,
    /// Whether the solver found a circulating orientation.
    pub answer: bool,
    pub stages: Vec<StageOutcome>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub audit: Option<AuditReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub width_increment: Option<usize>,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub repro: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings_ms: Option<Vec<(&'static str, f64)>>,
}

impl TrialRecord {
    pub fn first_failure(&self) -> Option<&StageOutcome> {
        self.stages.iter().find(|s| !s.ok)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub trials: usize,
    pub passed: usize,
    pub failed: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_width_increment: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub params: RoundtripParams,
    pub trials: Vec<TrialRecord>,
    pub summary: Summary,
}

impl RunReport {
    pub fn passed(&self) -> bool {
        self.summary.failed == 0
    }

    /// Human-readable summary: one line per failed trial, then totals.
    pub fn summary_text(&self) -> String {
        let mut out = String::new();
        for t in self.trials.iter().filter(|t| !t.passed) {
            let why = t
                .first_failure()
                .map(|s| format!("{}: {}", s.stage, s.detail.as_deref().unwrap_or("failed")))
                .unwrap_or_default();
            writeln!(out, "FAIL trial {} (seed {}): {why}", t.index, t.seed).unwrap();
            if let Some(a) = &t.audit {
                for f in a.failures() {
                    writeln!(out, "  audit {f}").unwrap();
                }
            }
            if let Some(r) = &t.repro {
                writeln!(out, "  repro: {r}").unwrap();
            }
        }
        let s = &self.summary;
        write!(out, "roundtrip: {}/{} passed", s.passed, s.trials).unwrap();
        if let Some(w) = s.max_width_increment {
            write!(out, ", max width increment {w}").unwrap();
        }
        out.push('\n');
        out
    }
}

const TRIAL_DRAWS: usize = 1000;

/// Generated YES instance for one trial, honoring the size parameters.
/// `None` when no draw fits, e.g. for `m_max < 3`.
pub fn trial_instance(params: &RoundtripParams, trial_seed: u64) -> Option<(CircOriInstance, Orientation)> {
    let mut rng = ChaCha8Rng::seed_from_u64(trial_seed);
    for _ in 0..TRIAL_DRAWS {
        let n = rng.gen_range(3..=params.n_max.max(3));
        let cycles = rng.gen_range(1..=params.cycles_max.max(1));
        let per_cycle = (params.wmax / cycles as u64).max(1);
        if let Ok((inst, o)) = gen_yes_instance(rng.gen(), n, cycles, per_cycle) {
            if inst.graph().edge_count() <= params.m_max {
                return Some((inst, o));
            }
        }
    }
    None
}

struct Stages {
    list: Vec<StageOutcome>,
    timings: Vec<(&'static str, f64)>,
    clock: Instant,
}

impl Stages {
    fn new() -> Self {
        Stages { list: Vec::new(), timings: Vec::new(), clock: Instant::now() }
    }

    fn record(&mut self, stage: &'static str, result: Result<(), String>) -> bool {
        let now = Instant::now();
        self.timings.push((stage, (now - self.clock).as_secs_f64() * 1e3));
        self.clock = now;
        let ok = result.is_ok();
        self.list.push(StageOutcome { stage, ok, detail: result.err() });
        ok
    }
}

/// Source decomposition used to measure the width increment: the
/// vertex-separation decomposition of the ascending vertex order.
fn source_pd(inst: &CircOriInstance) -> PathDecomposition {
    let g = inst.graph();
    let order = LinearOrder::new(g, g.vertices().collect()).expect("all vertices");
    pd_from_order(g, &order)
}

pub fn run_trial(params: &RoundtripParams, index: usize) -> TrialRecord {
    let seed = params.seed.wrapping_add(index as u64);
    let mut rec = TrialRecord {
        index,
        seed,
        n: 0,
        m: 0,
        total_weight: 0,
        source_width: 0,
        k: 0,
        h_vertices: 0,
        answer: false,
        stages: Vec::new(),
        audit: None,
        width_increment: None,
        passed: false,
        repro: None,
        timings_ms: None,
    };
    let mut st = Stages::new();
    match trial_instance(params, seed) {
        Some((inst, planted)) => {
            let pd_g = source_pd(&inst);
            rec.n = inst.graph().vertex_count();
            rec.m = inst.graph().edge_count();
            rec.total_weight = inst.total_weight();
            rec.source_width = pd_width(&pd_g).unwrap_or(0);
            run_stages(params, &inst, &planted, &pd_g, &mut rec, &mut st);
        }
        None => {
            st.record("generate", Err(format!("no instance within size limits after {TRIAL_DRAWS} draws")));
        }
    }
    rec.passed = st.list.iter().all(|s| s.ok);
    rec.stages = st.list;
    if params.timings {
        rec.timings_ms = Some(st.timings);
    }
    if !rec.passed {
        rec.repro = Some(params.repro_command(index));
    }
    rec
}

fn run_stages(
    params: &RoundtripParams,
    inst: &CircOriInstance,
    planted: &Orientation,
    pd_g: &PathDecomposition,
    rec: &mut TrialRecord,
    st: &mut Stages,
) {
    let planted_ok = inst.is_circulating(planted).map_err(|e| e.to_string()).and_then(|ok| {
        if ok {
            Ok(())
        } else {
            Err("planted orientation is not circulating".into())
        }
    });
    if !st.record("generate", planted_ok) {
        return;
    }

    let solved = match solve_circori_brute(inst) {
        Ok(Some(o)) => o,
        Ok(None) => {
            st.record("solve", Err("solver found no circulating orientation".into()));
            return;
        }
        Err(e) => {
            st.record("solve", Err(e.to_string()));
            return;
        }
    };
    rec.answer = true;
    st.record("solve", Ok(()));

    let red = match build_instance(inst) {
        Ok(r) => r,
        Err(e) => {
            st.record("build", Err(e.to_string()));
            return;
        }
    };
    rec.k = red.k();
    rec.h_vertices = red.h().vertex_count();
    if !st.record("build", red.check_structure().map_err(|e| e.to_string())) {
        return;
    }

    match build_pd_for_h(&red, pd_g) {
        Ok((_, report)) => {
            rec.width_increment = Some(report.increment());
            let bound = if report.increment() <= 6 {
                Ok(())
            } else {
                Err(format!("width grew by {}", report.increment()))
            };
            st.record("decomposition", bound);
        }
        Err(e) => {
            st.record("decomposition", Err(e.to_string()));
        }
    }

    let mut c = match forward_witness(&red, &solved) {
        Ok(c) => c,
        Err(e) => {
            st.record("forward", Err(e.to_string()));
            return;
        }
    };
    st.record("forward", Ok(()));
    if let Some(p) = params.perturb {
        p.apply(&red, &mut c);
    }

    let verdict = check_b_coloring(red.target(), &c);
    st.record("b-coloring", verdict.clone().map_err(|d| d.to_string()));

    // The unchecked audit still runs on a broken coloring so the record shows
    // which structural property went wrong.
    if c.check_total(red.h(), red.k()).is_ok() {
        let audit = audit_coloring_unchecked(&red, &c);
        let res = if audit.passed() {
            Ok(())
        } else {
            Err(format!("{} violation(s)", audit.failures().len()))
        };
        rec.audit = Some(audit);
        st.record("audit", res);
    }
    if verdict.is_err() {
        return;
    }

    match extract_orientation(&red, &c) {
        Ok(back) => {
            st.record("extract", Ok(()));
            let diff = solved.arcs().filter(|a| back.arc(a.edge()) != Some(*a)).count();
            let eq = if diff == 0 { Ok(()) } else { Err(format!("{diff} edge(s) differ")) };
            st.record("equality", eq);
        }
        Err(e) => {
            st.record("extract", Err(e.to_string()));
        }
    }
}

pub fn run_roundtrip(params: &RoundtripParams) -> RunReport {
    let trials: Vec<TrialRecord> = (0..params.trials).map(|i| run_trial(params, i)).collect();
    let passed = trials.iter().filter(|t| t.passed).count();
    let summary = Summary {
        trials: trials.len(),
        passed,
        failed: trials.len() - passed,
        max_width_increment: trials.iter().filter_map(|t| t.width_increment).max(),
    };
    RunReport { params: params.clone(), trials, summary }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(trials: usize) -> RoundtripParams {
        RoundtripParams { trials, n_max: 5, m_max: 8, ..Default::default() }
    }

    #[test]
    fn zero_trials_pass() {
        let report = run_roundtrip(&small(0));
        assert!(report.passed());
        assert_eq!(report.summary.trials, 0);
        assert_eq!(report.summary.max_width_increment, None);
    }

    #[test]
    fn clean_run_passes() {
        let report = run_roundtrip(&small(5));
        assert!(report.passed(), "{}", report.summary_text());
        for t in &report.trials {
            assert!(t.n >= 3 && t.n <= 5 && t.m <= 8);
            assert!(inst_weights_ok(t.seed, &small(1)));
            assert!(t.repro.is_none());
        }
        assert!(report.summary.max_width_increment.unwrap() <= 6);
    }

    fn inst_weights_ok(seed: u64, p: &RoundtripParams) -> bool {
        let (inst, _) = trial_instance(p, seed).unwrap();
        let ok = inst.weighted_edges().all(|(_, w)| w <= p.wmax);
        ok
    }

    #[test]
    fn impossible_sizes_fail_cleanly() {
        let report = run_roundtrip(&RoundtripParams { m_max: 2, ..small(1) });
        assert!(!report.passed());
        assert_eq!(report.trials[0].stages[0].stage, "generate");
    }

    #[test]
    fn perturbations_are_caught() {
        for p in Perturb::ALL {
            let params = RoundtripParams { perturb: Some(p), ..small(3) };
            let report = run_roundtrip(&params);
            assert_eq!(report.summary.failed, 3, "{p}");
            let t = &report.trials[0];
            assert!(t.repro.as_deref().unwrap().contains(&format!("--perturb {p}")));
            assert!(t.stages.iter().any(|s| s.stage == "b-coloring" && !s.ok));
        }
    }

    #[test]
    fn repeat_leaf_fails_audit() {
        let params = RoundtripParams { perturb: Some(Perturb::RepeatLeaf), ..small(1) };
        let t = &run_roundtrip(&params).trials[0];
        let audit = t.audit.as_ref().unwrap();
        assert!(!audit.superstar_leaves_distinct.passed());
    }

    #[test]
    fn deterministic() {
        assert_eq!(run_roundtrip(&small(4)), run_roundtrip(&small(4)));
        let one = run_roundtrip(&RoundtripParams { seed: 45, ..small(1) });
        assert_eq!(one.trials[0].seed, run_roundtrip(&small(4)).trials[3].seed);
    }

    #[test]
    fn perturb_names_parse() {
        for p in Perturb::ALL {
            assert_eq!(p.name().parse::<Perturb>(), Ok(p));
        }
        assert!("nope".parse::<Perturb>().is_err());
    }
}
