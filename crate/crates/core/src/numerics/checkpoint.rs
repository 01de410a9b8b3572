//! Binary checkpoints: `CONNCKPT`, u32 version, u32 header length, a JSON
//! header (config plus tensor names and shapes), then every tensor as
//! little-endian `f32`.

use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::params::Parameters;
use super::tensor::Tensor;
use crate::error::{Error, Result};

const MAGIC: &[u8; 8] = b"CONNCKPT";
const VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct TensorMeta {
    name: String,
    shape: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct Header {
    config: serde_json::Value,
    tensors: Vec<TensorMeta>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub config: serde_json::Value,
    pub tensors: Vec<(String, Tensor)>,
}

impl Checkpoint {
    pub fn from_params<P: Parameters>(config: serde_json::Value, params: &P) -> Checkpoint {
        Checkpoint {
            config,
            tensors: params
                .named_params()
                .into_iter()
                .map(|(n, t)| (n, t.clone()))
                .collect(),
        }
    }

    /// Copies stored values into `params`, which must have exactly the same
    /// tensor names and shapes.
    pub fn load_into<P: Parameters>(&self, params: &mut P) -> Result<()> {
        let expected: Vec<(String, Vec<usize>)> = params
            .named_params()
            .into_iter()
            .map(|(n, t)| (n, t.shape().to_vec()))
            .collect();
        if expected.len() != self.tensors.len() {
            return Err(Error::Shape(format!(
                "checkpoint holds {} tensors, model has {}",
                self.tensors.len(),
                expected.len()
            )));
        }
        for ((name, shape), (cname, t)) in expected.iter().zip(&self.tensors) {
            if name != cname || shape.as_slice() != t.shape() {
                return Err(Error::Shape(format!(
                    "checkpoint tensor {cname} {:?} does not match model tensor {name} {shape:?}",
                    t.shape()
                )));
            }
        }
        for (dst, (_, src)) in params.params_mut().into_iter().zip(&self.tensors) {
            dst.data_mut().copy_from_slice(src.data());
        }
        Ok(())
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let header = Header {
            config: self.config.clone(),
            tensors: self
                .tensors
                .iter()
                .map(|(n, t)| TensorMeta { name: n.clone(), shape: t.shape().to_vec() })
                .collect(),
        };
        let json = serde_json::to_vec(&header).map_err(std::io::Error::other)?;
        w.write_all(MAGIC)?;
        w.write_all(&VERSION.to_le_bytes())?;
        w.write_all(&(json.len() as u32).to_le_bytes())?;
        w.write_all(&json)?;
        let mut buf = Vec::new();
        for (_, t) in &self.tensors {
            buf.clear();
            for v in t.data() {
                buf.extend_from_slice(&(*v as f32).to_le_bytes());
            }
            w.write_all(&buf)?;
        }
        w.flush()
    }

    pub fn read_from<R: Read>(mut r: R, path: &Path) -> Result<Checkpoint> {
        let io = |e| Error::io(path, e);
        let bad = |msg: &str| Error::Parse {
            path: path.to_path_buf(),
            line: 0,
            msg: msg.to_string(),
        };
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic).map_err(io)?;
        if &magic != MAGIC {
            return Err(bad("not a checkpoint file"));
        }
        let mut word = [0u8; 4];
        r.read_exact(&mut word).map_err(io)?;
        let version = u32::from_le_bytes(word);
        if version != VERSION {
            return Err(bad(&format!("unsupported checkpoint version {version}")));
        }
        r.read_exact(&mut word).map_err(io)?;
        let mut json = vec![0u8; u32::from_le_bytes(word) as usize];
        r.read_exact(&mut json).map_err(io)?;
        let header: Header = serde_json::from_slice(&json).map_err(|e| bad(&e.to_string()))?;
        let mut tensors = Vec::with_capacity(header.tensors.len());
        for meta in header.tensors {
            let n: usize = meta.shape.iter().product();
            let mut raw = vec![0u8; 4 * n];
            r.read_exact(&mut raw).map_err(io)?;
            let data = raw
                .chunks_exact(4)
                .map(|b| f64::from(f32::from_le_bytes([b[0], b[1], b[2], b[3]])))
                .collect();
            tensors.push((meta.name, Tensor::from_vec(&meta.shape, data)?));
        }
        Ok(Checkpoint { config: header.config, tensors })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_to(std::io::BufWriter::new(f)).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Checkpoint> {
        let f = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read_from(std::io::BufReader::new(f), path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::linear::Linear;
    use crate::numerics::rng::rng_from;

    #[test]
    fn round_trip_and_shape_check() {
        let l = Linear::init(3, 2, &mut rng_from(1));
        let ck = Checkpoint::from_params(serde_json::json!({"hidden": 2}), &l);
        let mut buf = Vec::new();
        ck.write_to(&mut buf).unwrap();
        let back = Checkpoint::read_from(buf.as_slice(), Path::new("m.ckpt")).unwrap();
        assert_eq!(back.config["hidden"], 2);
        let mut target = Linear::zeros(3, 2);
        back.load_into(&mut target).unwrap();
        for (a, b) in target.flatten().iter().zip(l.flatten()) {
            assert_eq!(*a, b as f32 as f64);
        }
        let mut wrong = Linear::zeros(4, 2);
        assert!(matches!(back.load_into(&mut wrong), Err(Error::Shape(_))));
        assert!(Checkpoint::read_from(&b"NOTACKPT"[..], Path::new("x")).is_err());
    }
}
