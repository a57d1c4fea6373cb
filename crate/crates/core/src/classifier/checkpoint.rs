//! Binary checkpoint format (all integers and floats little-endian):
//!
//! ```text
//! magic       8 bytes  "TRIAGECK"
//! version     u32
//! input_dim   u64, hidden1 u64, hidden2 u64, classes u64
//! dropout     f64
//! seed        u64
//! class order u32 length + UTF-8 "low,medium,high,critical"
//! W1 b1 W2 b2 W3 b3 as f64 arrays
//! ```

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::{Dense, MlpModel, HIDDEN1, HIDDEN2, NUM_CLASSES};
use crate::corpus::PriorityLevel;
use crate::error::{Error, Result};

const MAGIC: &[u8; 8] = b"TRIAGECK";
const VERSION: u32 = 1;

fn class_order() -> String {
    PriorityLevel::ALL.map(|l| l.as_str()).join(",")
}

pub fn write_checkpoint(model: &MlpModel, mut w: impl Write) -> std::io::Result<()> {
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    for n in [
        model.input_dim,
        model.hidden1.outputs,
        model.hidden2.outputs,
        model.output.outputs,
    ] {
        w.write_all(&(n as u64).to_le_bytes())?;
    }
    w.write_all(&model.dropout_rate.to_le_bytes())?;
    w.write_all(&model.seed.to_le_bytes())?;
    let order = class_order();
    w.write_all(&(order.len() as u32).to_le_bytes())?;
    w.write_all(order.as_bytes())?;
    for buffer in model.parameters() {
        for v in buffer {
            w.write_all(&v.to_le_bytes())?;
        }
    }
    w.flush()
}

pub fn save_checkpoint(model: &MlpModel, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_checkpoint(model, BufWriter::new(file)).map_err(|e| Error::io(path, e))
}

struct Cursor<'a> {
    bytes: &'a [u8],
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize, what: &str) -> Result<&'a [u8]> {
        if self.bytes.len() < n {
            return Err(Error::Checkpoint(format!("truncated while reading {what}")));
        }
        let (head, tail) = self.bytes.split_at(n);
        self.bytes = tail;
        Ok(head)
    }

    fn u32(&mut self, what: &str) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4, what)?.try_into().unwrap()))
    }

    fn u64(&mut self, what: &str) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8, what)?.try_into().unwrap()))
    }

    fn f64(&mut self, what: &str) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8, what)?.try_into().unwrap()))
    }

    fn f64s(&mut self, n: usize, what: &str) -> Result<Vec<f64>> {
        let bytes = self.take(
            n.checked_mul(8)
                .ok_or_else(|| Error::Checkpoint("size overflow".into()))?,
            what,
        )?;
        Ok(bytes
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect())
    }

    fn dense(&mut self, inputs: usize, outputs: usize, name: &str) -> Result<Dense> {
        Ok(Dense {
            inputs,
            outputs,
            weights: self.f64s(inputs * outputs, name)?,
            bias: self.f64s(outputs, name)?,
        })
    }
}

/// Parses a checkpoint, rejecting unknown versions, foreign layer widths,
/// a different class order, truncation and trailing bytes.
pub fn read_checkpoint(mut r: impl Read) -> Result<MlpModel> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)
        .map_err(|e| Error::Checkpoint(format!("read failed: {e}")))?;
    let mut c = Cursor { bytes: &bytes };

    if c.take(8, "magic")? != MAGIC {
        return Err(Error::Checkpoint("bad magic".into()));
    }
    let version = c.u32("version")?;
    if version != VERSION {
        return Err(Error::Checkpoint(format!("unsupported version {version}")));
    }
    let input_dim = c.u64("input_dim")? as usize;
    let widths = [c.u64("hidden1")?, c.u64("hidden2")?, c.u64("classes")?].map(|v| v as usize);
    if widths != [HIDDEN1, HIDDEN2, NUM_CLASSES] {
        return Err(Error::Checkpoint(format!(
            "layer widths {widths:?} differ from {:?}",
            [HIDDEN1, HIDDEN2, NUM_CLASSES]
        )));
    }
    if input_dim == 0 {
        return Err(Error::Checkpoint("input dimension is zero".into()));
    }
    let dropout_rate = c.f64("dropout")?;
    if !(0.0..1.0).contains(&dropout_rate) {
        return Err(Error::Checkpoint(format!("dropout rate {dropout_rate} out of range")));
    }
    let seed = c.u64("seed")?;
    let order_len = c.u32("class order")? as usize;
    let order = c.take(order_len, "class order")?;
    if order != class_order().as_bytes() {
        return Err(Error::Checkpoint(format!(
            "class order `{}` differs from `{}`",
            String::from_utf8_lossy(order),
            class_order()
        )));
    }

    let hidden1 = c.dense(input_dim, HIDDEN1, "hidden layer 1")?;
    let hidden2 = c.dense(HIDDEN1, HIDDEN2, "hidden layer 2")?;
    let output = c.dense(HIDDEN2, NUM_CLASSES, "output layer")?;
    if !c.bytes.is_empty() {
        return Err(Error::Checkpoint(format!("{} trailing bytes", c.bytes.len())));
    }
    let model = MlpModel {
        input_dim,
        dropout_rate,
        seed,
        hidden1,
        hidden2,
        output,
    };
    if !model.is_finite() {
        return Err(Error::Checkpoint("non-finite parameters".into()));
    }
    Ok(model)
}

pub fn load_checkpoint(path: impl AsRef<Path>) -> Result<MlpModel> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_checkpoint(BufReader::new(file))
}

/// Like [`load_checkpoint`], but also requires a specific input dimension.
pub fn load_checkpoint_expecting(path: impl AsRef<Path>, input_dim: usize) -> Result<MlpModel> {
    let model = load_checkpoint(path)?;
    if model.input_dim != input_dim {
        return Err(Error::DimensionMismatch {
            expected: input_dim,
            found: model.input_dim,
        });
    }
    Ok(model)
}
