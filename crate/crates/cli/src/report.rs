use std::fmt::Write as _;
use std::time::{SystemTime, UNIX_EPOCH};

use ghz_bqt::bqt::{BranchLeaf, CorrectionTable, EprInput, LeafKey, Sign};
use ghz_bqt::ghz::SwapOutcome;
use ghz_bqt::parties::{Cooperation, Session, Transcript};
use ghz_bqt::verify::{CheckResult, VerifyConfig, VerifySummary};
use serde::Serialize;

pub const LEAF_REPORT_SCHEMA: &str = "bqt.leaf-report/1";
pub const SESSION_REPORT_SCHEMA: &str = "bqt.session-report/1";
pub const SWAP_TABLE_SCHEMA: &str = "bqt.swap-table/1";
pub const VERIFY_SUMMARY_SCHEMA: &str = "bqt.verify-summary/1";

pub const FIDELITY_FLOOR: f64 = 1.0 - 1e-10;

/// Seconds since the Unix epoch. Not covered by the determinism guarantee.
pub fn timestamp() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0, |d| d.as_secs())
}

/// `[re0, im0, re1, im1]`.
pub fn amplitudes(e: &EprInput<f64>) -> [f64; 4] {
    [e.c0.re, e.c0.im, e.c1.re, e.c1.im]
}

#[derive(Serialize)]
pub struct Inputs {
    pub alpha: [f64; 4],
    pub beta: [f64; 4],
}

impl Inputs {
    pub fn new(alpha: &EprInput<f64>, beta: &EprInput<f64>) -> Self {
        Inputs {
            alpha: amplitudes(alpha),
            beta: amplitudes(beta),
        }
    }
}

#[derive(Serialize)]
pub struct Outcomes {
    pub a1: u8,
    #[serde(rename = "A2")]
    pub a2: Sign,
    pub b3: u8,
    #[serde(rename = "B2")]
    pub b2: Sign,
    #[serde(rename = "A1")]
    pub a1_x: Sign,
    #[serde(rename = "B1")]
    pub b1_x: Sign,
}

impl From<LeafKey> for Outcomes {
    fn from(k: LeafKey) -> Self {
        Outcomes {
            a1: k.step3.a1,
            a2: k.step3.alice_x,
            b3: k.step3.b3,
            b2: k.step3.bob_x,
            a1_x: k.step4.alice,
            b1_x: k.step4.bob,
        }
    }
}

#[derive(Serialize)]
pub struct LeafEntry {
    pub index: usize,
    pub outcomes: Outcomes,
    pub probability: f64,
    pub bob_ops: String,
    pub alice_ops: String,
    pub fidelity_alice_to_bob: f64,
    pub fidelity_bob_to_alice: f64,
}

#[derive(Serialize)]
pub struct LeafReport {
    pub schema: &'static str,
    pub timestamp: u64,
    pub config: Inputs,
    pub leaves: Vec<LeafEntry>,
    pub probability_sum: f64,
    pub min_fidelity: f64,
    pub passed: bool,
}

impl LeafReport {
    pub fn new(
        alpha: &EprInput<f64>,
        beta: &EprInput<f64>,
        leaves: &[BranchLeaf<f64>],
        table: &CorrectionTable,
    ) -> Self {
        let entries: Vec<LeafEntry> = leaves
            .iter()
            .map(|l| {
                let rule = table.rule(&l.key);
                LeafEntry {
                    index: l.key.index(),
                    outcomes: l.key.into(),
                    probability: l.probability,
                    bob_ops: rule.bob_ops.to_string(),
                    alice_ops: rule.alice_ops.to_string(),
                    fidelity_alice_to_bob: l.fidelity_to_bob,
                    fidelity_bob_to_alice: l.fidelity_to_alice,
                }
            })
            .collect();
        let probability_sum: f64 = leaves.iter().map(|l| l.probability).sum();
        let min_fidelity = leaves
            .iter()
            .map(|l| l.fidelity_to_bob.min(l.fidelity_to_alice))
            .fold(1.0, f64::min);
        LeafReport {
            schema: LEAF_REPORT_SCHEMA,
            timestamp: timestamp(),
            config: Inputs::new(alpha, beta),
            passed: leaves.len() == LeafKey::COUNT
                && (probability_sum - 1.0).abs() <= 1e-12
                && min_fidelity >= FIDELITY_FLOOR,
            leaves: entries,
            probability_sum,
            min_fidelity,
        }
    }

    pub fn text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "a1 A2 b3 B2 A1 B1  p         bob  alice  F(A->B)        F(B->A)"
        );
        for l in &self.leaves {
            let o = &l.outcomes;
            let _ = writeln!(
                s,
                "{}  {}  {}  {}  {}  {}   {:.6}  {}   {}     {:.12} {:.12}",
                o.a1,
                o.a2,
                o.b3,
                o.b2,
                o.a1_x,
                o.b1_x,
                l.probability,
                l.bob_ops,
                l.alice_ops,
                l.fidelity_alice_to_bob,
                l.fidelity_bob_to_alice
            );
        }
        let _ = writeln!(
            s,
            "{} leaves, sum p = {:.15}, min fidelity {:.12}: {}",
            self.leaves.len(),
            self.probability_sum,
            self.min_fidelity,
            verdict(self.passed)
        );
        s
    }
}

#[derive(Serialize)]
pub struct SessionConfig {
    pub alpha: [f64; 4],
    pub beta: [f64; 4],
    pub seed: u64,
    pub trials: usize,
    pub cooperation: Cooperation,
}

#[derive(Serialize)]
pub struct TrialEntry {
    pub trial: usize,
    pub seed: u64,
    pub leaf: usize,
    pub outcomes: Outcomes,
    pub fidelity_alice_to_bob: f64,
    pub fidelity_bob_to_alice: f64,
    pub expected_alice_to_bob: f64,
    pub expected_bob_to_alice: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub transcript: Option<Transcript>,
}

#[derive(Serialize)]
pub struct Deviation {
    /// Largest `|f − 1/64| / σ` over the 64 leaves.
    pub max_sigma: f64,
    pub chi_square: f64,
    pub degrees_of_freedom: usize,
    pub within_4_sigma: bool,
}

#[derive(Serialize)]
pub struct SessionReport {
    pub schema: &'static str,
    pub timestamp: u64,
    pub config: SessionConfig,
    pub trials: Vec<TrialEntry>,
    pub histogram: Vec<usize>,
    pub deviation: Deviation,
    pub min_fidelity_alice_to_bob: f64,
    pub min_fidelity_bob_to_alice: f64,
    pub mean_fidelity_alice_to_bob: f64,
    pub mean_fidelity_bob_to_alice: f64,
    pub expected_alice_to_bob: f64,
    pub expected_bob_to_alice: f64,
    pub passed: bool,
}

impl SessionReport {
    pub fn new(config: SessionConfig, sessions: Vec<(u64, Session)>, transcripts: bool) -> Self {
        let n = sessions.len().max(1) as f64;
        let mut histogram = vec![0usize; LeafKey::COUNT];
        for (_, s) in &sessions {
            histogram[s.leaf.index()] += 1;
        }
        let p = 1.0 / LeafKey::COUNT as f64;
        let sigma = (p * (1.0 - p) / n).sqrt();
        let max_sigma = histogram
            .iter()
            .map(|&c| (c as f64 / n - p).abs() / sigma)
            .fold(0.0, f64::max);
        let chi_square = histogram
            .iter()
            .map(|&c| (c as f64 - n * p).powi(2) / (n * p))
            .sum();
        let fold = |f: fn(&Session) -> f64| {
            let min = sessions.iter().map(|(_, s)| f(s)).fold(1.0, f64::min);
            let mean = sessions.iter().map(|(_, s)| f(s)).sum::<f64>() / n;
            (min, mean)
        };
        let (min_ab, mean_ab) = fold(|s| s.fidelity_alice_to_bob);
        let (min_ba, mean_ba) = fold(|s| s.fidelity_bob_to_alice);
        let (exp_ab, exp_ba) = sessions.first().map_or((1.0, 1.0), |(_, s)| {
            (s.expected_alice_to_bob, s.expected_bob_to_alice)
        });
        // Only directions promised to be perfect must reach the floor.
        let passed = sessions.iter().all(|(_, s)| {
            (s.expected_alice_to_bob < FIDELITY_FLOOR || s.fidelity_alice_to_bob >= FIDELITY_FLOOR)
                && (s.expected_bob_to_alice < FIDELITY_FLOOR
                    || s.fidelity_bob_to_alice >= FIDELITY_FLOOR)
        });
        let trials = sessions
            .into_iter()
            .enumerate()
            .map(|(i, (seed, s))| TrialEntry {
                trial: i,
                seed,
                leaf: s.leaf.index(),
                outcomes: s.leaf.into(),
                fidelity_alice_to_bob: s.fidelity_alice_to_bob,
                fidelity_bob_to_alice: s.fidelity_bob_to_alice,
                expected_alice_to_bob: s.expected_alice_to_bob,
                expected_bob_to_alice: s.expected_bob_to_alice,
                transcript: transcripts.then_some(s.transcript),
            })
            .collect();
        SessionReport {
            schema: SESSION_REPORT_SCHEMA,
            timestamp: timestamp(),
            config,
            trials,
            histogram,
            deviation: Deviation {
                max_sigma,
                chi_square,
                degrees_of_freedom: LeafKey::COUNT - 1,
                within_4_sigma: max_sigma <= 4.0,
            },
            min_fidelity_alice_to_bob: min_ab,
            min_fidelity_bob_to_alice: min_ba,
            mean_fidelity_alice_to_bob: mean_ab,
            mean_fidelity_bob_to_alice: mean_ba,
            expected_alice_to_bob: exp_ab,
            expected_bob_to_alice: exp_ba,
            passed,
        }
    }

    pub fn text(&self) -> String {
        let mut s = String::new();
        let c = &self.config;
        let _ = writeln!(
            s,
            "{} trials from seed {}, cooperation {}",
            c.trials, c.seed, c.cooperation
        );
        let _ = writeln!(
            s,
            "Alice -> Bob: min {:.12}, mean {:.12}, expected {:.12}",
            self.min_fidelity_alice_to_bob,
            self.mean_fidelity_alice_to_bob,
            self.expected_alice_to_bob
        );
        let _ = writeln!(
            s,
            "Bob -> Alice: min {:.12}, mean {:.12}, expected {:.12}",
            self.min_fidelity_bob_to_alice,
            self.mean_fidelity_bob_to_alice,
            self.expected_bob_to_alice
        );
        let d = &self.deviation;
        let _ = writeln!(
            s,
            "leaf frequencies: max deviation {:.2} sigma, chi-square {:.1} ({} dof)",
            d.max_sigma, d.chi_square, d.degrees_of_freedom
        );
        let _ = writeln!(s, "{}", verdict(self.passed));
        s
    }
}

#[derive(Serialize)]
pub struct SwapEntry {
    pub outcome: usize,
    pub probability: f64,
    /// GHZ index the remainder on (2,4,6) equals up to phase.
    pub remainder: Option<usize>,
}

#[derive(Serialize)]
pub struct SwapTable {
    pub schema: &'static str,
    pub timestamp: u64,
    pub i: usize,
    pub j: usize,
    pub outcomes: Vec<SwapEntry>,
    pub probability_sum: f64,
    pub passed: bool,
}

impl SwapTable {
    pub fn new(i: usize, j: usize, outcomes: &[SwapOutcome<f64>]) -> Self {
        let probability_sum = outcomes.iter().map(|o| o.probability).sum::<f64>();
        SwapTable {
            schema: SWAP_TABLE_SCHEMA,
            timestamp: timestamp(),
            i,
            j,
            passed: outcomes.len() == 4
                && outcomes
                    .iter()
                    .all(|o| (o.probability - 0.25).abs() <= 1e-12 && o.matched.is_some()),
            outcomes: outcomes
                .iter()
                .map(|o| SwapEntry {
                    outcome: o.outcome.get(),
                    probability: o.probability,
                    remainder: o.matched.map(|m| m.get()),
                })
                .collect(),
            probability_sum,
        }
    }

    pub fn text(&self) -> String {
        let mut s = format!(
            "|Psi{}> (1,2,3) x |Psi{}> (4,5,6), measure (1,3,5)\n",
            self.i, self.j
        );
        s.push_str("outcome  p       remainder on (2,4,6)\n");
        for o in &self.outcomes {
            let r = o.remainder.map_or("none".to_owned(), |r| format!("Psi{r}"));
            let _ = writeln!(s, "{:<8} {:.6}  {r}", o.outcome, o.probability);
        }
        let _ = writeln!(
            s,
            "sum p = {:.15}: {}",
            self.probability_sum,
            verdict(self.passed)
        );
        s
    }
}

#[derive(Serialize)]
pub struct VerifyReport {
    pub schema: &'static str,
    pub timestamp: u64,
    pub config: VerifyConfig,
    /// `builtin` or the path of the table that was checked.
    pub table: String,
    pub checks: Vec<CheckResult>,
    pub passed: bool,
}

impl VerifyReport {
    pub fn new(summary: VerifySummary, table: String) -> Self {
        VerifyReport {
            schema: VERIFY_SUMMARY_SCHEMA,
            timestamp: timestamp(),
            config: summary.config,
            table,
            checks: summary.checks,
            passed: summary.passed,
        }
    }

    pub fn text(&self) -> String {
        let mut s = String::new();
        for c in &self.checks {
            let _ = writeln!(
                s,
                "[{}] {}. {} ({:.2}s): {}",
                verdict(c.passed),
                c.id,
                c.name,
                c.elapsed.as_secs_f64(),
                c.detail
            );
        }
        let n = self.checks.iter().filter(|c| c.passed).count();
        let _ = writeln!(
            s,
            "{n}/{} checks passed: {}",
            self.checks.len(),
            verdict(self.passed)
        );
        s
    }
}

pub fn verdict(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}
