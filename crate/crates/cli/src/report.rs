//! Suite reports: one line per check with the tolerance actually used, plus
//! an optional serialized counterexample for the first failure.

#[derive(Clone, Debug)]
pub struct CheckLine {
    pub name: String,
    pub defect: f64,
    pub bound: f64,
    /// Whether the check demanded bit-exact equality (bound 0).
    pub exact: bool,
    pub pass: bool,
}

#[derive(Clone, Debug)]
pub struct CounterExample {
    pub check: String,
    /// Form-file JSON of the offending input.
    pub json: String,
}

#[derive(Clone, Debug, Default)]
pub struct SuiteReport {
    pub suite: String,
    pub lines: Vec<CheckLine>,
    pub counterexample: Option<CounterExample>,
}

impl SuiteReport {
    pub fn new(suite: impl Into<String>) -> Self {
        SuiteReport {
            suite: suite.into(),
            ..Default::default()
        }
    }

    /// Record an exact check: passes iff the defect is exactly zero.
    pub fn exact(&mut self, name: impl Into<String>, defect: f64) -> bool {
        let pass = defect == 0.0;
        self.lines.push(CheckLine {
            name: name.into(),
            defect,
            bound: 0.0,
            exact: true,
            pass,
        });
        pass
    }

    /// Record a tolerance check.
    pub fn bounded(&mut self, name: impl Into<String>, defect: f64, bound: f64) -> bool {
        let pass = defect <= bound;
        self.lines.push(CheckLine {
            name: name.into(),
            defect,
            bound,
            exact: false,
            pass,
        });
        pass
    }

    /// Record an already-decided check (for structural assertions like
    /// "kernel is nonempty").
    pub fn status(&mut self, name: impl Into<String>, pass: bool) -> bool {
        self.lines.push(CheckLine {
            name: name.into(),
            defect: if pass { 0.0 } else { 1.0 },
            bound: 0.0,
            exact: false,
            pass,
        });
        pass
    }

    pub fn attach_counterexample(&mut self, check: impl Into<String>, json: String) {
        if self.counterexample.is_none() {
            self.counterexample = Some(CounterExample {
                check: check.into(),
                json,
            });
        }
    }

    pub fn pass(&self) -> bool {
        self.lines.iter().all(|l| l.pass)
    }

    pub fn merge(&mut self, other: SuiteReport) {
        self.lines.extend(other.lines);
        if self.counterexample.is_none() {
            self.counterexample = other.counterexample;
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("check,defect,bound,mode,pass\n");
        for l in &self.lines {
            out.push_str(&format!(
                "{},{:e},{:e},{},{}\n",
                l.name,
                l.defect,
                l.bound,
                if l.exact { "exact" } else { "tolerance" },
                if l.pass { "pass" } else { "fail" }
            ));
        }
        out
    }

    pub fn summary(&self) -> String {
        let mut out = String::new();
        for l in &self.lines {
            let verdict = if l.pass { "ok" } else { "FAIL" };
            if l.exact {
                out.push_str(&format!(
                    "  [{verdict}] {} (exact, defect {:e})\n",
                    l.name, l.defect
                ));
            } else {
                out.push_str(&format!(
                    "  [{verdict}] {} (defect {:e} <= {:e})\n",
                    l.name, l.defect, l.bound
                ));
            }
        }
        let total = self.lines.len();
        let passed = self.lines.iter().filter(|l| l.pass).count();
        out.push_str(&format!(
            "suite {}: {}/{} checks passed\n",
            self.suite, passed, total
        ));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_checks_require_zero_defect() {
        let mut r = SuiteReport::new("sample");
        assert!(r.exact("good", 0.0));
        assert!(!r.exact("bad", 1e-30));
        assert!(!r.pass());
        let csv = r.to_csv();
        assert!(csv.contains("good,0e0,0e0,exact,pass"));
        assert!(csv.contains("bad"));
    }

    #[test]
    fn first_counterexample_wins() {
        let mut r = SuiteReport::new("sample");
        r.attach_counterexample("a", "{}".into());
        r.attach_counterexample("b", "{}".into());
        assert_eq!(r.counterexample.unwrap().check, "a");
    }
}
