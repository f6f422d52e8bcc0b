use std::io::{Read, Write};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{dim, Result, SidError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Channel {
    pub name: String,
    pub samples: Vec<f64>,
}

/// Uniformly sampled multichannel record with input (`u*`) and output (`y*`) channels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignalRecord {
    pub ts: f64,
    pub time: Vec<f64>,
    pub inputs: Vec<Channel>,
    pub outputs: Vec<Channel>,
}

impl SignalRecord {
    /// Builds a record starting at `t = 0`; channels are named `u1..`, `y1..`.
    pub fn new(ts: f64, inputs: Vec<Vec<f64>>, outputs: Vec<Vec<f64>>) -> Result<Self> {
        if !(ts > 0.0) {
            return Err(SidError::SamplingPeriod(ts));
        }
        let len = inputs
            .iter()
            .chain(outputs.iter())
            .map(Vec::len)
            .next()
            .unwrap_or(0);
        if inputs.iter().chain(outputs.iter()).any(|c| c.len() != len) {
            return dim("all channels must have equal length");
        }
        let name = |p: &str, i: usize| format!("{p}{}", i + 1);
        Ok(Self {
            ts,
            time: (0..len).map(|k| k as f64 * ts).collect(),
            inputs: inputs
                .into_iter()
                .enumerate()
                .map(|(i, samples)| Channel { name: name("u", i), samples })
                .collect(),
            outputs: outputs
                .into_iter()
                .enumerate()
                .map(|(i, samples)| Channel { name: name("y", i), samples })
                .collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.time.len()
    }

    pub fn is_empty(&self) -> bool {
        self.time.is_empty()
    }

    pub fn output(&self, i: usize) -> &[f64] {
        &self.outputs[i].samples
    }

    pub fn input(&self, i: usize) -> &[f64] {
        &self.inputs[i].samples
    }

    /// Inputs as a `channels × samples` matrix.
    pub fn input_matrix(&self) -> DMatrix<f64> {
        channels_to_matrix(&self.inputs, self.len())
    }

    /// Outputs as a `channels × samples` matrix.
    pub fn output_matrix(&self) -> DMatrix<f64> {
        channels_to_matrix(&self.outputs, self.len())
    }

    /// Same record with every output multiplied by `k`.
    pub fn scale_outputs(&self, k: f64) -> Self {
        let mut out = self.clone();
        for ch in &mut out.outputs {
            ch.samples.iter_mut().for_each(|v| *v *= k);
        }
        out
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        let mut header = vec!["t".to_string()];
        header.extend(self.inputs.iter().map(|c| c.name.clone()));
        header.extend(self.outputs.iter().map(|c| c.name.clone()));
        wr.write_record(&header)?;
        for k in 0..self.len() {
            let mut row = vec![self.time[k].to_string()];
            row.extend(self.inputs.iter().map(|c| c.samples[k].to_string()));
            row.extend(self.outputs.iter().map(|c| c.samples[k].to_string()));
            wr.write_record(&row)?;
        }
        wr.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        let mut rd = csv::Reader::from_reader(r);
        let header: Vec<String> = rd.headers()?.iter().map(|s| s.trim().to_string()).collect();
        if header.first().map(String::as_str) != Some("t") {
            return Err(SidError::Config("signal CSV must start with a `t` column".into()));
        }
        let mut cols: Vec<Vec<f64>> = vec![Vec::new(); header.len()];
        for rec in rd.records() {
            let rec = rec?;
            if rec.len() != header.len() {
                return dim("CSV row width differs from header");
            }
            for (j, field) in rec.iter().enumerate() {
                let v: f64 = field.trim().parse().map_err(|_| {
                    SidError::Config(format!("bad number `{field}` in column {}", header[j]))
                })?;
                cols[j].push(v);
            }
        }
        let time = cols[0].clone();
        if time.len() < 2 {
            return Err(SidError::InsufficientData("signal needs at least two samples".into()));
        }
        let ts = time[1] - time[0];
        if !(ts > 0.0) {
            return Err(SidError::SamplingPeriod(ts));
        }
        for w in time.windows(2) {
            if ((w[1] - w[0]) - ts).abs() > 1e-6 * ts.max(1.0) {
                return Err(SidError::Config("time stamps are not uniformly spaced".into()));
            }
        }
        let mut inputs = Vec::new();
        let mut outputs = Vec::new();
        for (name, samples) in header.iter().zip(cols).skip(1) {
            let ch = Channel { name: name.clone(), samples };
            match name.chars().next() {
                Some('u') => inputs.push(ch),
                Some('y') => outputs.push(ch),
                _ => return Err(SidError::Config(format!("unknown channel `{name}`"))),
            }
        }
        Ok(Self { ts, time, inputs, outputs })
    }
}

fn channels_to_matrix(chs: &[Channel], len: usize) -> DMatrix<f64> {
    DMatrix::from_fn(chs.len(), len, |i, k| chs[i].samples[k])
}
