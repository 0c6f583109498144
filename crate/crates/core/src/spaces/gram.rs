use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::Result;

/// Matrix of inner products `entries[m][n] = <e_m, e_n>` of a listed basis.
#[derive(Clone, Debug, PartialEq)]
pub struct GramMatrix {
    pub entries: DMatrix<Complex64>,
    pub basis_labels: Vec<String>,
}

impl GramMatrix {
    pub fn new(entries: DMatrix<Complex64>, basis_labels: Vec<String>) -> Self {
        debug_assert_eq!(entries.nrows(), basis_labels.len());
        GramMatrix { entries, basis_labels }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn get(&self, m: usize, n: usize) -> Complex64 {
        self.entries[(m, n)]
    }

    pub fn hermitian_defect(&self) -> f64 {
        (&self.entries - self.entries.adjoint())
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max)
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let h = (&self.entries + self.entries.adjoint()) * Complex64::new(0.5, 0.0);
        let mut ev: Vec<f64> = SymmetricEigen::new(h).eigenvalues.iter().copied().collect();
        ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
        ev
    }

    /// Hermitian to `1e-12` relative and smallest eigenvalue at least
    /// `-1e-9` times the largest.
    pub fn is_hermitian_psd(&self) -> bool {
        let scale = self.entries.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if self.hermitian_defect() > 1e-12 * scale.max(1.0) {
            return false;
        }
        let ev = self.eigenvalues();
        match (ev.first(), ev.last()) {
            (Some(lo), Some(hi)) => *lo >= -1e-9 * hi.abs(),
            _ => true,
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.entries[(i, i)].re).collect()
    }

    /// Row-major CSV with `re,im` pairs in each cell, preceded by `#` lines.
    pub fn write_csv<W: std::io::Write>(&self, out: W, header: &[String]) -> Result<()> {
        let mut out = out;
        for line in header {
            writeln!(out, "# {line}")?;
        }
        let mut w = csv::WriterBuilder::new().from_writer(out);
        let mut head = vec!["row".to_string()];
        head.extend(self.basis_labels.iter().cloned());
        w.write_record(&head).map_err(csv_err)?;
        for i in 0..self.dim() {
            let mut rec = vec![self.basis_labels[i].clone()];
            for j in 0..self.dim() {
                let c = self.entries[(i, j)];
                rec.push(format!("{:e},{:e}", c.re, c.im));
            }
            w.write_record(&rec).map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }
}

pub(crate) fn csv_err(e: csv::Error) -> crate::error::LabError {
    crate::error::LabError::Io(e.to_string())
}

impl Serialize for GramMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<[f64; 2]>> = (0..self.dim())
            .map(|i| {
                (0..self.dim())
                    .map(|j| [self.entries[(i, j)].re, self.entries[(i, j)].im])
                    .collect()
            })
            .collect();
        let mut st = s.serialize_struct("GramMatrix", 2)?;
        st.serialize_field("basis_labels", &self.basis_labels)?;
        st.serialize_field("entries", &rows)?;
        st.end()
    }
}
