use crate::interval::Interval;

/// Running per-expert coverage and length used by the naive γ selector.
#[derive(Debug, Clone, PartialEq)]
pub struct NaiveSelectorState {
    warmup: usize,
    warmup_expert: usize,
    steps: usize,
    covered: Vec<usize>,
    length_sums: Vec<f64>,
}

impl NaiveSelectorState {
    /// `warmup_expert` is used for the first `warmup` steps.
    pub fn new(k: usize, warmup: usize, warmup_expert: usize) -> Self {
        assert!(warmup_expert < k);
        Self {
            warmup,
            warmup_expert,
            steps: 0,
            covered: vec![0; k],
            length_sums: vec![0.0; k],
        }
    }

    pub fn record(&mut self, intervals: &[Interval], y: f64) {
        for (k, iv) in intervals.iter().enumerate() {
            self.covered[k] += usize::from(iv.contains(y));
            self.length_sums[k] += iv.length();
        }
        self.steps += 1;
    }

    pub fn coverages(&self) -> Vec<f64> {
        self.covered.iter().map(|c| *c as f64 / self.steps as f64).collect()
    }

    pub fn mean_lengths(&self) -> Vec<f64> {
        self.length_sums.iter().map(|l| l / self.steps as f64).collect()
    }

    pub fn steps(&self) -> usize {
        self.steps
    }
}

/// Expert to follow at the next step.
pub fn naive_select(state: &NaiveSelectorState, alpha: f64) -> usize {
    if state.steps < state.warmup.max(1) {
        return state.warmup_expert;
    }
    select_from(&state.coverages(), &state.mean_lengths(), alpha)
}

/// Shortest among the experts with running coverage `>= 1 - α`; if none, the
/// one whose coverage is closest to `1 - α`. Ties go to the lowest index.
pub fn select_from(coverages: &[f64], mean_lengths: &[f64], alpha: f64) -> usize {
    let target = 1.0 - alpha;
    let mut best: Option<(usize, f64)> = None;
    for (k, (c, l)) in coverages.iter().zip(mean_lengths).enumerate() {
        if *c >= target && best.is_none_or(|(_, bl)| *l < bl) {
            best = Some((k, *l));
        }
    }
    if let Some((k, _)) = best {
        return k;
    }
    let mut best = (0, f64::INFINITY);
    for (k, c) in coverages.iter().enumerate() {
        let gap = (target - c).abs();
        if gap < best.1 {
            best = (k, gap);
        }
    }
    best.0
}
