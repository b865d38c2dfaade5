use std::io::{self, Write};

use crate::governor::GovernorDecision;
use crate::mas::MasCase;

/// Per-sample record of a closed-loop run.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SimulationTrace {
    pub t: Vec<f64>,
    pub r: Vec<f64>,
    pub v: Vec<f64>,
    pub y_tr: Vec<f64>,
    pub y_st: Vec<Vec<f64>>,
    pub kappa_tr: Vec<f64>,
    pub kappa_st: Vec<f64>,
    pub kappa_star: Vec<f64>,
    pub mas_case: Vec<Option<MasCase>>,
    pub feasible: Vec<bool>,
    /// Plant state at each sample, before the update.
    pub x: Vec<Vec<f64>>,
}

impl SimulationTrace {
    pub fn with_capacity(n: usize) -> Self {
        Self {
            t: Vec::with_capacity(n),
            r: Vec::with_capacity(n),
            v: Vec::with_capacity(n),
            y_tr: Vec::with_capacity(n),
            y_st: Vec::with_capacity(n),
            kappa_tr: Vec::with_capacity(n),
            kappa_st: Vec::with_capacity(n),
            kappa_star: Vec::with_capacity(n),
            mas_case: Vec::with_capacity(n),
            feasible: Vec::with_capacity(n),
            x: Vec::with_capacity(n),
        }
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub(crate) fn push(
        &mut self,
        t: f64,
        r: f64,
        x: &[f64],
        y_tr: f64,
        y_st: Vec<f64>,
        d: &GovernorDecision,
    ) {
        self.t.push(t);
        self.r.push(r);
        self.v.push(d.v);
        self.y_tr.push(y_tr);
        self.y_st.push(y_st);
        self.kappa_tr.push(d.kappa_tr);
        self.kappa_st.push(d.kappa_st);
        self.kappa_star.push(d.kappa_star);
        self.mas_case.push(d.mas_case);
        self.feasible.push(d.feasible);
        self.x.push(x.to_vec());
    }

    /// Number of constrained outputs recorded per sample.
    pub fn constrained_outputs(&self) -> usize {
        self.y_st.first().map_or(0, Vec::len)
    }

    /// CSV with header
    /// `t,r,v,y_tr,y_st_1..y_st_p,kappa_tr,kappa_st,kappa_star,mas_case,feasible`.
    /// `mas_case` is 1-4, 0 for `r = 0`, or empty; `feasible` is 1 or 0.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        let p = self.constrained_outputs();
        let mut header = String::from("t,r,v,y_tr");
        for i in 1..=p {
            header.push_str(&format!(",y_st_{i}"));
        }
        header.push_str(",kappa_tr,kappa_st,kappa_star,mas_case,feasible");
        writeln!(out, "{header}")?;
        for k in 0..self.len() {
            write!(
                out,
                "{:?},{:?},{:?},{:?}",
                self.t[k], self.r[k], self.v[k], self.y_tr[k]
            )?;
            for y in &self.y_st[k] {
                write!(out, ",{y:?}")?;
            }
            let case = self.mas_case[k].map_or(String::new(), |c| c.code().to_string());
            writeln!(
                out,
                ",{:?},{:?},{:?},{},{}",
                self.kappa_tr[k],
                self.kappa_st[k],
                self.kappa_star[k],
                case,
                u8::from(self.feasible[k])
            )?;
        }
        Ok(())
    }
}
