//! Observed data sets: an `l × k` sample matrix whose columns are variables
//! of the global universe.

use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::query::{Query, Universe, VarId};

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    columns: Vec<VarId>,
    /// Column-major storage, one vector per column.
    data: Vec<Vec<f64>>,
    rows: usize,
}

impl Dataset {
    /// Builds a dataset from column vectors.
    pub fn from_columns(columns: Vec<VarId>, data: Vec<Vec<f64>>) -> Result<Self> {
        if columns.len() != data.len() {
            return Err(Error::InvalidSize(format!(
                "{} column ids for {} data columns",
                columns.len(),
                data.len()
            )));
        }
        let mut seen = columns.clone();
        seen.sort_unstable();
        if let Some(w) = seen.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateColumn(w[0]));
        }
        let rows = data.first().map_or(0, Vec::len);
        if rows == 0 {
            return Err(Error::EmptyBody);
        }
        if let Some(bad) = data.iter().find(|c| c.len() != rows) {
            return Err(Error::InvalidSize(format!("column of length {} in a {rows}-row dataset", bad.len())));
        }
        Ok(Dataset { columns, data, rows })
    }

    /// Builds a dataset from row vectors.
    pub fn from_rows(columns: Vec<VarId>, rows: &[Vec<f64>]) -> Result<Self> {
        let k = columns.len();
        let mut data = vec![Vec::with_capacity(rows.len()); k];
        for (r, row) in rows.iter().enumerate() {
            if row.len() != k {
                return Err(Error::RaggedRow { row: r, found: row.len(), expected: k });
            }
            for (c, &v) in row.iter().enumerate() {
                data[c].push(v);
            }
        }
        Self::from_columns(columns, data)
    }

    /// Number of samples `l`.
    pub fn n_rows(&self) -> usize {
        self.rows
    }

    /// Number of columns `k`.
    pub fn n_cols(&self) -> usize {
        self.columns.len()
    }

    pub fn columns(&self) -> &[VarId] {
        &self.columns
    }

    pub fn position(&self, id: VarId) -> Option<usize> {
        self.columns.iter().position(|&c| c == id)
    }

    pub fn column(&self, id: VarId) -> Result<&[f64]> {
        self.position(id).map(|p| self.data[p].as_slice()).ok_or(Error::MissingVariable(id))
    }

    pub fn column_at(&self, pos: usize) -> &[f64] {
        &self.data[pos]
    }

    pub fn contains_all(&self, ids: &[VarId]) -> Result<()> {
        match ids.iter().find(|&&id| self.position(id).is_none()) {
            Some(&id) => Err(Error::MissingVariable(id)),
            None => Ok(()),
        }
    }

    /// Restriction to the query's variables, in the query's canonical member order.
    pub fn project(&self, q: &Query) -> Result<Dataset> {
        let members = q.members();
        self.contains_all(&members)?;
        let data = members.iter().map(|&id| self.column(id).map(<[f64]>::to_vec)).collect::<Result<_>>()?;
        Ok(Dataset { columns: members, data, rows: self.rows })
    }

    /// Parses CSV whose header row holds integer variable ids, or names
    /// resolvable through `universe`.
    pub fn read_csv<R: Read>(reader: R, universe: Option<&Universe>) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).flexible(true).from_reader(reader);
        let header = rdr.headers()?.clone();
        let columns = header
            .iter()
            .map(|h| {
                let h = h.trim();
                h.parse::<VarId>()
                    .ok()
                    .or_else(|| universe.and_then(|u| u.resolve(h)))
                    .ok_or_else(|| Error::UnknownName(h.to_string()))
            })
            .collect::<Result<Vec<_>>>()?;
        let k = columns.len();
        let mut data = vec![Vec::new(); k];
        for (row, record) in rdr.records().enumerate() {
            let record = record?;
            if record.len() != k {
                return Err(Error::RaggedRow { row, found: record.len(), expected: k });
            }
            for (col, cell) in record.iter().enumerate() {
                let v = cell
                    .trim()
                    .parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| Error::NonNumericCell { row, col, value: cell.to_string() })?;
                data[col].push(v);
            }
        }
        Self::from_columns(columns, data)
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(self.columns.iter().map(|c| c.to_string()))?;
        let mut buf = Vec::with_capacity(self.n_cols());
        for r in 0..self.rows {
            buf.clear();
            buf.extend(self.data.iter().map(|c| c[r].to_string()));
            w.write_record(&buf)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Reads a CSV dataset from disk.
pub fn load_dataset(path: impl AsRef<Path>, universe: Option<&Universe>) -> Result<Dataset> {
    let file = std::fs::File::open(path)?;
    Dataset::read_csv(std::io::BufReader::new(file), universe)
}
