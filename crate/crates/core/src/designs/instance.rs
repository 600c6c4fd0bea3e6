use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::de::Error as _;
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::DesignError;

/// The six design families with printed definitions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DesignFamily {
    /// Packing array PA(N,k,v).
    Pa,
    /// Symmetric weighing matrix W(n,w).
    SymmW,
    /// Skew weighing matrix W(n,w).
    SkewW,
    /// Balanced ternary design BTD(V,B;p1,p2,R;K,L).
    Btd,
    /// Florentine rectangle FR(r,n).
    Fr,
    /// Equidistant permutation array EPA(n,d,m).
    Epa,
}

impl DesignFamily {
    pub const ALL: [DesignFamily; 6] = [
        DesignFamily::Pa,
        DesignFamily::SymmW,
        DesignFamily::SkewW,
        DesignFamily::Btd,
        DesignFamily::Fr,
        DesignFamily::Epa,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            DesignFamily::Pa => "PA",
            DesignFamily::SymmW => "SymmW",
            DesignFamily::SkewW => "SkewW",
            DesignFamily::Btd => "BTD",
            DesignFamily::Fr => "FR",
            DesignFamily::Epa => "EPA",
        }
    }

    /// Parameter names in their conventional positional order.
    pub fn param_names(self) -> &'static [&'static str] {
        match self {
            DesignFamily::Pa => &["N", "k", "v"],
            DesignFamily::SymmW | DesignFamily::SkewW => &["n", "w"],
            DesignFamily::Btd => &["V", "B", "p1", "p2", "R", "K", "L"],
            DesignFamily::Fr => &["r", "n"],
            DesignFamily::Epa => &["n", "d", "m"],
        }
    }
}

impl fmt::Display for DesignFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for DesignFamily {
    type Err = DesignError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        DesignFamily::ALL
            .into_iter()
            .find(|f| f.tag().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| DesignError::UnknownFamily(s.to_string()))
    }
}

impl Serialize for DesignFamily {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.tag())
    }
}

impl<'de> Deserialize<'de> for DesignFamily {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(D::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PaParams {
    /// N
    pub rows: usize,
    /// k
    pub cols: usize,
    /// v
    pub symbols: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct WeighingParams {
    /// n
    pub order: usize,
    /// w
    pub weight: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BtdParams {
    /// V, the number of elements (matrix rows).
    pub elements: usize,
    /// B, the number of blocks (matrix columns).
    pub blocks: usize,
    /// p1, blocks in which an element appears once.
    pub singles: usize,
    /// p2, blocks in which an element appears twice.
    pub doubles: usize,
    /// R = p1 + 2 p2.
    pub replication: usize,
    /// K, block cardinality counted with multiplicity.
    pub block_size: usize,
    /// L, the required sum of products for each pair of elements.
    pub pair_index: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FrParams {
    /// r
    pub rows: usize,
    /// n
    pub symbols: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct EpaParams {
    /// n, the permutation length.
    pub length: usize,
    /// d, the required pairwise Hamming distance.
    pub distance: usize,
    /// m, the number of permutations.
    pub rows: usize,
}

/// A design family together with validated parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InstanceSpec {
    Pa(PaParams),
    SymmW(WeighingParams),
    SkewW(WeighingParams),
    Btd(BtdParams),
    Fr(FrParams),
    Epa(EpaParams),
}

impl InstanceSpec {
    pub fn family(&self) -> DesignFamily {
        match self {
            InstanceSpec::Pa(_) => DesignFamily::Pa,
            InstanceSpec::SymmW(_) => DesignFamily::SymmW,
            InstanceSpec::SkewW(_) => DesignFamily::SkewW,
            InstanceSpec::Btd(_) => DesignFamily::Btd,
            InstanceSpec::Fr(_) => DesignFamily::Fr,
            InstanceSpec::Epa(_) => DesignFamily::Epa,
        }
    }

    /// Named parameters in the family's conventional order.
    pub fn params(&self) -> Vec<(&'static str, usize)> {
        let values: Vec<usize> = match *self {
            InstanceSpec::Pa(p) => vec![p.rows, p.cols, p.symbols],
            InstanceSpec::SymmW(p) | InstanceSpec::SkewW(p) => vec![p.order, p.weight],
            InstanceSpec::Btd(p) => vec![
                p.elements,
                p.blocks,
                p.singles,
                p.doubles,
                p.replication,
                p.block_size,
                p.pair_index,
            ],
            InstanceSpec::Fr(p) => vec![p.rows, p.symbols],
            InstanceSpec::Epa(p) => vec![p.length, p.distance, p.rows],
        };
        self.family()
            .param_names()
            .iter()
            .copied()
            .zip(values)
            .collect()
    }

    /// Shape `(rows, cols)` of a design for this instance.
    pub fn shape(&self) -> (usize, usize) {
        match *self {
            InstanceSpec::Pa(p) => (p.rows, p.cols),
            InstanceSpec::SymmW(p) | InstanceSpec::SkewW(p) => (p.order, p.order),
            InstanceSpec::Btd(p) => (p.elements, p.blocks),
            InstanceSpec::Fr(p) => (p.rows, p.symbols),
            InstanceSpec::Epa(p) => (p.rows, p.length),
        }
    }

    /// Builds and validates an instance from named parameters. Every name
    /// the family expects must be present exactly once and no others.
    pub fn from_params<'a, I>(family: DesignFamily, params: I) -> Result<Self, DesignError>
    where
        I: IntoIterator<Item = (&'a str, i64)>,
    {
        let mut map: BTreeMap<&str, i64> = BTreeMap::new();
        for (name, value) in params {
            if !family.param_names().contains(&name) {
                return Err(DesignError::Instance(format!(
                    "{family} has no parameter `{name}` (expected {})",
                    family.param_names().join(",")
                )));
            }
            if map.insert(name, value).is_some() {
                return Err(DesignError::Instance(format!("parameter `{name}` given twice")));
            }
        }
        let mut values = Vec::with_capacity(family.param_names().len());
        for &name in family.param_names() {
            let v = *map.get(name).ok_or_else(|| {
                DesignError::Instance(format!("{family} is missing parameter `{name}`"))
            })?;
            let zero_ok = matches!(name, "d" | "p1" | "p2");
            if v < 0 || (v == 0 && !zero_ok) {
                return Err(DesignError::Instance(format!(
                    "parameter `{name}` must be {} but is {v}",
                    if zero_ok { ">= 0" } else { ">= 1" }
                )));
            }
            values.push(v as usize);
        }
        let spec = match family {
            DesignFamily::Pa => InstanceSpec::Pa(PaParams {
                rows: values[0],
                cols: values[1],
                symbols: values[2],
            }),
            DesignFamily::SymmW | DesignFamily::SkewW => {
                let p = WeighingParams {
                    order: values[0],
                    weight: values[1],
                };
                if p.weight > p.order {
                    return Err(DesignError::Instance(format!(
                        "weight w={} exceeds order n={}",
                        p.weight, p.order
                    )));
                }
                if family == DesignFamily::SymmW {
                    InstanceSpec::SymmW(p)
                } else {
                    InstanceSpec::SkewW(p)
                }
            }
            DesignFamily::Btd => {
                let p = BtdParams {
                    elements: values[0],
                    blocks: values[1],
                    singles: values[2],
                    doubles: values[3],
                    replication: values[4],
                    block_size: values[5],
                    pair_index: values[6],
                };
                if p.replication != p.singles + 2 * p.doubles {
                    return Err(DesignError::Instance(format!(
                        "R={} but p1 + 2*p2 = {}",
                        p.replication,
                        p.singles + 2 * p.doubles
                    )));
                }
                if p.elements * p.replication != p.blocks * p.block_size {
                    return Err(DesignError::Instance(format!(
                        "V*R = {} but B*K = {}",
                        p.elements * p.replication,
                        p.blocks * p.block_size
                    )));
                }
                InstanceSpec::Btd(p)
            }
            DesignFamily::Fr => {
                let p = FrParams {
                    rows: values[0],
                    symbols: values[1],
                };
                if p.rows > p.symbols {
                    return Err(DesignError::Instance(format!(
                        "r={} exceeds n={}",
                        p.rows, p.symbols
                    )));
                }
                InstanceSpec::Fr(p)
            }
            DesignFamily::Epa => {
                let p = EpaParams {
                    length: values[0],
                    distance: values[1],
                    rows: values[2],
                };
                if p.distance > p.length {
                    return Err(DesignError::Instance(format!(
                        "d={} exceeds n={}",
                        p.distance, p.length
                    )));
                }
                InstanceSpec::Epa(p)
            }
        };
        Ok(spec)
    }

    /// Parses a `name=value` list such as `n=12,d=8,m=21`.
    pub fn parse_assignments(family: DesignFamily, text: &str) -> Result<Self, DesignError> {
        let mut pairs = Vec::new();
        for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (name, value) = item.split_once('=').ok_or_else(|| {
                DesignError::Instance(format!("expected name=value, got `{item}`"))
            })?;
            let value: i64 = value.trim().parse().map_err(|_| {
                DesignError::Instance(format!("parameter `{}` is not an integer", name.trim()))
            })?;
            pairs.push((name.trim(), value));
        }
        Self::from_params(family, pairs)
    }
}

impl fmt::Display for InstanceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let params: Vec<String> = self
            .params()
            .into_iter()
            .map(|(n, v)| format!("{n}={v}"))
            .collect();
        write!(f, "{}({})", self.family(), params.join(","))
    }
}

/// Serializes the parameters as an object in conventional order.
pub(crate) struct OrderedParams<'a>(pub &'a InstanceSpec);

impl Serialize for OrderedParams<'_> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let params = self.0.params();
        let mut map = serializer.serialize_map(Some(params.len()))?;
        for (name, value) in params {
            map.serialize_entry(name, &value)?;
        }
        map.end()
    }
}

impl Serialize for InstanceSpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(2))?;
        map.serialize_entry("family", &self.family())?;
        map.serialize_entry("params", &OrderedParams(self))?;
        map.end()
    }
}

impl<'de> Deserialize<'de> for InstanceSpec {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let m = InstanceManifest::deserialize(deserializer)?;
        m.instance().map_err(D::Error::custom)
    }
}

/// One entry of an instance manifest:
/// `{"family": "EPA", "params": {"n": 12, "d": 8, "m": 21}, "seeds": 4}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceManifest {
    pub family: DesignFamily,
    pub params: BTreeMap<String, i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seeds: Option<u64>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum OneOrMany {
    One(InstanceManifest),
    Many(Vec<InstanceManifest>),
}

impl InstanceManifest {
    pub fn instance(&self) -> Result<InstanceSpec, DesignError> {
        InstanceSpec::from_params(
            self.family,
            self.params.iter().map(|(k, v)| (k.as_str(), *v)),
        )
    }

    /// Parses a manifest document holding either one entry or an array.
    pub fn parse_list(text: &str) -> Result<Vec<InstanceManifest>, DesignError> {
        let parsed: OneOrMany = serde_json::from_str(text).map_err(|e| DesignError::Parse {
            line: e.line(),
            message: e.to_string(),
        })?;
        Ok(match parsed {
            OneOrMany::One(m) => vec![m],
            OneOrMany::Many(v) => v,
        })
    }
}
