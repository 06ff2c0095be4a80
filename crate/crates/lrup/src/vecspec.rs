//! Command-line descriptions of the vectors `b` and `c`.

use std::fs::File;
use std::io::BufReader;
use std::path::PathBuf;
use std::str::FromStr;

use lrup_core::C64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::mm::read_vector;

/// `e:<i>` (zero-based unit vector), `ones`, `random[:<seed>]` (standard
/// normal entries) or a path to a Matrix Market `n x 1` file.
#[derive(Debug, Clone, PartialEq)]
pub enum VectorSpec {
    Unit(usize),
    Ones,
    Random(Option<u64>),
    File(PathBuf),
}

impl FromStr for VectorSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "ones" {
            return Ok(VectorSpec::Ones);
        }
        if s == "random" {
            return Ok(VectorSpec::Random(None));
        }
        if let Some(seed) = s.strip_prefix("random:") {
            let seed = seed.parse().map_err(|_| Error::Usage(format!("bad seed in '{s}'")))?;
            return Ok(VectorSpec::Random(Some(seed)));
        }
        if let Some(i) = s.strip_prefix("e:") {
            let i = i.parse().map_err(|_| Error::Usage(format!("bad index in '{s}'")))?;
            return Ok(VectorSpec::Unit(i));
        }
        if s.is_empty() {
            return Err(Error::Usage("empty vector spec".into()));
        }
        Ok(VectorSpec::File(PathBuf::from(s)))
    }
}

impl VectorSpec {
    /// Builds the vector; `seed` is used by `random` without its own seed.
    pub fn materialize(&self, n: usize, seed: u64) -> Result<Vec<C64>> {
        let zero = C64::new(0.0, 0.0);
        match self {
            VectorSpec::Unit(i) => {
                if *i >= n {
                    return Err(Error::Usage(format!("unit vector index {i} out of range for n = {n}")));
                }
                let mut v = vec![zero; n];
                v[*i] = C64::new(1.0, 0.0);
                Ok(v)
            }
            VectorSpec::Ones => Ok(vec![C64::new(1.0, 0.0); n]),
            VectorSpec::Random(s) => Ok(random_normal(n, s.unwrap_or(seed)).into_iter().map(|x| C64::new(x, 0.0)).collect()),
            VectorSpec::File(path) => {
                let file = File::open(path).map_err(|e| Error::io(path, e))?;
                let v = read_vector(BufReader::new(file))?;
                if v.len() != n {
                    return Err(Error::Usage(format!("{}: vector has length {}, matrix has n = {n}", path.display(), v.len())));
                }
                Ok(v)
            }
        }
    }
}

/// `c` is either its own vector or `+b` / `-b`.
#[derive(Debug, Clone, PartialEq)]
pub enum CSpec {
    SameAsB(f64),
    Vector(VectorSpec),
}

impl FromStr for CSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "b" | "+b" => Ok(CSpec::SameAsB(1.0)),
            "-b" => Ok(CSpec::SameAsB(-1.0)),
            other => Ok(CSpec::Vector(other.parse()?)),
        }
    }
}

/// Standard normal samples from a seeded ChaCha8 stream.
pub fn random_normal(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| StandardNormal.sample(&mut rng)).collect()
}

/// Random vector of unit Euclidean norm.
pub fn random_unit(n: usize, seed: u64) -> Vec<f64> {
    let v = random_normal(n, seed);
    let nv = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.into_iter().map(|x| x / nv).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_specs() {
        assert_eq!("e:3".parse::<VectorSpec>().unwrap(), VectorSpec::Unit(3));
        assert_eq!("ones".parse::<VectorSpec>().unwrap(), VectorSpec::Ones);
        assert_eq!("random".parse::<VectorSpec>().unwrap(), VectorSpec::Random(None));
        assert_eq!("random:7".parse::<VectorSpec>().unwrap(), VectorSpec::Random(Some(7)));
        assert!("random:x".parse::<VectorSpec>().is_err());
        assert!(matches!("b.mtx".parse::<VectorSpec>().unwrap(), VectorSpec::File(_)));
        assert_eq!("-b".parse::<CSpec>().unwrap(), CSpec::SameAsB(-1.0));
        assert_eq!("e:0".parse::<CSpec>().unwrap(), CSpec::Vector(VectorSpec::Unit(0)));
    }

    #[test]
    fn materialize() {
        let e = VectorSpec::Unit(1).materialize(3, 0).unwrap();
        assert_eq!(e[1], C64::new(1.0, 0.0));
        assert!(VectorSpec::Unit(3).materialize(3, 0).is_err());
        let r1 = VectorSpec::Random(None).materialize(5, 11).unwrap();
        let r2 = VectorSpec::Random(Some(11)).materialize(5, 99).unwrap();
        assert_eq!(r1, r2);
        let u = random_unit(10, 4);
        assert!((u.iter().map(|x| x * x).sum::<f64>() - 1.0).abs() < 1e-14);
    }
}
