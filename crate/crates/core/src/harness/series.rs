//! Sampled time series and their CSV form.
//!
//! CSV files have a header `t,<channel>,...` followed by one row per sample.
//! Numbers are written with Rust's shortest round-trip formatting, so a
//! written series reads back bit-identical and reruns are byte-identical.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    t: Vec<f64>,
    channels: Vec<(String, Vec<f64>)>,
}

impl TimeSeries {
    pub fn new(t: Vec<f64>) -> Result<Self> {
        if t.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::invalid("sample times must be strictly increasing"));
        }
        if t.iter().any(|x| !x.is_finite()) {
            return Err(Error::invalid("sample times must be finite"));
        }
        Ok(Self {
            t,
            channels: Vec::new(),
        })
    }

    pub fn push_channel(&mut self, name: &str, values: Vec<f64>) -> Result<()> {
        if values.len() != self.t.len() {
            return Err(Error::DimensionMismatch {
                expected: self.t.len(),
                found: values.len(),
            });
        }
        if name == "t" || name.contains(',') || self.channel(name).is_some() {
            return Err(Error::invalid(format!(
                "bad or duplicate channel name `{name}`"
            )));
        }
        self.channels.push((name.to_string(), values));
        Ok(())
    }

    pub fn t(&self) -> &[f64] {
        &self.t
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn channel(&self, name: &str) -> Option<&[f64]> {
        self.channels
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v.as_slice())
    }

    pub fn channel_names(&self) -> impl Iterator<Item = &str> {
        self.channels.iter().map(|(n, _)| n.as_str())
    }

    pub fn require(&self, name: &str) -> Result<&[f64]> {
        self.channel(name)
            .ok_or_else(|| Error::invalid(format!("series has no `{name}` channel")))
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("t");
        for (n, _) in &self.channels {
            out.push(',');
            out.push_str(n);
        }
        out.push('\n');
        for i in 0..self.t.len() {
            write!(out, "{}", self.t[i]).unwrap();
            for (_, v) in &self.channels {
                write!(out, ",{}", v[i]).unwrap();
            }
            out.push('\n');
        }
        out
    }

    pub fn parse_csv(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'));
        let (_, header) = lines.next().ok_or_else(|| Error::Parse {
            line: 1,
            message: "empty series file".into(),
        })?;
        let names: Vec<&str> = header.split(',').map(str::trim).collect();
        if names.first() != Some(&"t") {
            return Err(Error::Parse {
                line: 1,
                message: "first column must be `t`".into(),
            });
        }
        let mut cols: Vec<Vec<f64>> = vec![Vec::new(); names.len()];
        for (idx, line) in lines {
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != names.len() {
                return Err(Error::Parse {
                    line: idx + 1,
                    message: format!("expected {} fields, found {}", names.len(), fields.len()),
                });
            }
            for (c, f) in cols.iter_mut().zip(fields) {
                c.push(f.trim().parse().map_err(|e| Error::Parse {
                    line: idx + 1,
                    message: format!("`{}`: {e}", f.trim()),
                })?);
            }
        }
        let mut it = cols.into_iter();
        let mut series = Self::new(it.next().unwrap())?;
        for (name, values) in names[1..].iter().zip(it) {
            series.push_channel(name, values)?;
        }
        Ok(series)
    }

    pub fn read_csv(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse_csv(&std::fs::read_to_string(path)?)
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_csv())?;
        Ok(())
    }
}
