use super::TraceTriple;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BowditchConfig {
    pub depth: usize,
    /// Escape bound; must exceed 2.
    pub bound: f64,
    /// Slack on the `|trace| ≥ 2` test.
    pub tolerance: f64,
}

impl Default for BowditchConfig {
    fn default() -> Self {
        BowditchConfig {
            depth: 12,
            bound: 2.001,
            tolerance: 1e-9,
        }
    }
}

impl BowditchConfig {
    /// Adapts the search to a group with a simple curve of real length
    /// `length`: the escape bound drops below that curve's trace and the
    /// depth grows enough to run the Dehn twist chains around it.
    pub fn for_shortest(&self, length: f64) -> BowditchConfig {
        let trace = 2.0 * (0.5 * length).cosh();
        let mut out = *self;
        if trace < self.bound {
            out.bound = (0.5 * (2.0 + trace)).max(2.0 + 1e-12);
            out.depth = self.depth + (8.0 / length).ceil().min(4096.0) as usize;
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BowditchReport {
    pub verdict: Verdict,
    pub depth: usize,
    /// Smallest simple-curve trace modulus seen.
    pub min_modulus: f64,
    /// Minimum modulus of the newly created traces on each level that were
    /// still being expanded.
    pub level_minima: Vec<f64>,
    /// Branches left unescaped at the depth limit.
    pub open_branches: usize,
}

struct Branch {
    left: Complex64,
    right: Complex64,
    old: Complex64,
}

/// Breadth-first escape search over the Farey tree.
///
/// A branch across the edge with traces `(a, b)` whose new vertex is
/// `d = ab − old` has escaped once `|a|, |b| ≥ bound` and
/// `|d| ≥ max(|a|, |b|)`: every trace beyond it then grows by a factor at
/// least `bound − 1`. The search fails on any simple trace of modulus below
/// `2 − tolerance`, passes when every branch escapes within `depth` levels,
/// and is inconclusive otherwise.
pub fn bowditch_check(t: &TraceTriple, config: &BowditchConfig) -> BowditchReport {
    let floor = 2.0 - config.tolerance;
    let (x, y, z) = (t.x, t.y, t.z);
    let mut min_modulus = x.norm().min(y.norm()).min(z.norm());
    let mut report = BowditchReport {
        verdict: Verdict::Fail,
        depth: config.depth,
        min_modulus,
        level_minima: Vec::new(),
        open_branches: 0,
    };
    if min_modulus < floor {
        return report;
    }
    let mut frontier = vec![
        Branch { left: x, right: y, old: z },
        Branch { left: y, right: z, old: x },
        Branch { left: x, right: z, old: y },
    ];
    for _ in 0..config.depth {
        let mut next = Vec::new();
        let mut level_min = f64::INFINITY;
        for br in frontier {
            let new = br.left * br.right - br.old;
            let (ml, mr, mn) = (br.left.norm(), br.right.norm(), new.norm());
            min_modulus = min_modulus.min(mn);
            level_min = level_min.min(mn);
            if mn < floor || !mn.is_finite() {
                report.min_modulus = min_modulus;
                report.level_minima.push(level_min);
                return report;
            }
            if ml >= config.bound && mr >= config.bound && mn >= ml.max(mr) {
                continue;
            }
            next.push(Branch { left: br.left, right: new, old: br.right });
            next.push(Branch { left: new, right: br.right, old: br.left });
        }
        if level_min.is_finite() {
            report.level_minima.push(level_min);
        }
        frontier = next;
        if frontier.is_empty() {
            break;
        }
    }
    report.min_modulus = min_modulus;
    report.open_branches = frontier.len();
    report.verdict = if frontier.is_empty() {
        Verdict::Pass
    } else {
        Verdict::Inconclusive
    };
    report
}
