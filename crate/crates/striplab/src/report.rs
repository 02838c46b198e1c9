//! Claim table assembled by the experiment drivers.
//!
//! Each checked statement becomes one row: an identifier, the reference
//! value it is held against, the computed value, the tolerance, and a
//! pass/fail flag. Failed solves surface as failed rows, never panics, so
//! a report always renders.

/// One checked statement.
#[derive(Clone, Debug)]
pub struct Claim {
    pub id: String,
    pub reference: String,
    pub computed: String,
    pub tolerance: String,
    pub pass: bool,
}

/// Full run output: claims plus reproducibility metadata.
#[derive(Clone, Debug)]
pub struct Report {
    pub experiment: String,
    pub claims: Vec<Claim>,
    pub metadata: Vec<(String, String)>,
}

impl Report {
    pub fn new(experiment: &str) -> Report {
        Report { experiment: experiment.to_string(), claims: Vec::new(), metadata: Vec::new() }
    }

    /// Add a claim row; identifiers must be unique within a report.
    pub fn claim(
        &mut self,
        id: &str,
        reference: impl Into<String>,
        computed: impl Into<String>,
        tolerance: impl Into<String>,
        pass: bool,
    ) {
        assert!(
            self.claims.iter().all(|c| c.id != id),
            "duplicate claim id `{id}`"
        );
        self.claims.push(Claim {
            id: id.to_string(),
            reference: reference.into(),
            computed: computed.into(),
            tolerance: tolerance.into(),
            pass,
        });
    }

    /// Record a solver failure as a failed claim.
    pub fn failed_claim(&mut self, id: &str, reference: impl Into<String>, error: &crate::error::Error) {
        self.claim(id, reference, format!("error: {error}"), "-", false);
    }

    pub fn meta(&mut self, key: &str, value: impl Into<String>) {
        self.metadata.push((key.to_string(), value.into()));
    }

    pub fn all_pass(&self) -> bool {
        self.claims.iter().all(|c| c.pass)
    }

    pub fn passed(&self) -> usize {
        self.claims.iter().filter(|c| c.pass).count()
    }

    /// Fixed-width text rendering; deterministic for identical runs.
    pub fn render(&self) -> String {
        let headers = ["claim", "reference", "computed", "tolerance", "status"];
        let mut widths: Vec<usize> = headers.iter().map(|h| h.len()).collect();
        for c in &self.claims {
            widths[0] = widths[0].max(c.id.len());
            widths[1] = widths[1].max(c.reference.len());
            widths[2] = widths[2].max(c.computed.len());
            widths[3] = widths[3].max(c.tolerance.len());
        }
        let mut out = String::new();
        out.push_str(&format!("experiment: {}\n\n", self.experiment));
        let row = |cols: [&str; 5], widths: &[usize]| -> String {
            format!(
                "{:<w0$}  {:<w1$}  {:<w2$}  {:<w3$}  {}\n",
                cols[0],
                cols[1],
                cols[2],
                cols[3],
                cols[4],
                w0 = widths[0],
                w1 = widths[1],
                w2 = widths[2],
                w3 = widths[3],
            )
        };
        out.push_str(&row(headers, &widths));
        let total: usize = widths.iter().sum::<usize>() + 8 + 6;
        out.push_str(&"-".repeat(total));
        out.push('\n');
        for c in &self.claims {
            out.push_str(&row(
                [&c.id, &c.reference, &c.computed, &c.tolerance, if c.pass { "pass" } else { "FAIL" }],
                &widths,
            ));
        }
        out.push('\n');
        out.push_str(&format!("{} of {} claims pass\n", self.passed(), self.claims.len()));
        if !self.metadata.is_empty() {
            out.push('\n');
            for (k, v) in &self.metadata {
                out.push_str(&format!("{k}: {v}\n"));
            }
        }
        out
    }
}
