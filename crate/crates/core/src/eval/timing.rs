use std::collections::BTreeMap;
use std::time::Instant;

/// Runs `f` and returns its value with the elapsed monotonic wall time in seconds.
pub fn time_stage<T>(_label: &str, f: impl FnOnce() -> T) -> (T, f64) {
    let start = Instant::now();
    let value = f();
    (value, start.elapsed().as_secs_f64())
}

/// Seconds per named stage; repeated stages accumulate.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct StageTimings {
    stages: BTreeMap<String, f64>,
}

impl StageTimings {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn time<T>(&mut self, label: &str, f: impl FnOnce() -> T) -> T {
        let (value, secs) = time_stage(label, f);
        self.add(label, secs);
        value
    }

    pub fn add(&mut self, label: &str, seconds: f64) {
        *self.stages.entry(label.to_owned()).or_insert(0.0) += seconds;
    }

    pub fn merge(&mut self, other: &StageTimings) {
        for (label, secs) in &other.stages {
            self.add(label, *secs);
        }
    }

    pub fn get(&self, label: &str) -> Option<f64> {
        self.stages.get(label).copied()
    }

    pub fn total(&self) -> f64 {
        self.stages.values().sum()
    }

    pub fn stages(&self) -> &BTreeMap<String, f64> {
        &self.stages
    }

    pub fn into_map(self) -> BTreeMap<String, f64> {
        self.stages
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn noop_is_fast_and_passes_value_through() {
        let (v, secs) = time_stage("noop", || 42);
        assert_eq!(v, 42);
        assert!((0.0..0.1).contains(&secs));
    }

    #[test]
    fn stages_accumulate() {
        let mut t = StageTimings::new();
        t.add("a", 1.0);
        t.add("a", 0.5);
        t.add("b", 2.0);
        assert_eq!(t.get("a"), Some(1.5));
        assert_eq!(t.total(), 3.5);
    }
}
