//! Merges the config file with command-line flags (flags win).

use crate::Params;
use dskg::io::parse_config;
use dskg::Error;
use serde_json::{Map, Value};
use std::collections::BTreeMap;
use std::path::PathBuf;
use std::str::FromStr;

const KEYS: [&str; 19] = [
    "M", "n", "t", "x", "x0", "t0", "p", "q", "s", "rho", "a", "tol", "points", "threads", "out",
    "seed", "preset", "suite", "config",
];

#[derive(Clone, Debug, Default)]
pub struct Settings {
    pub m: Option<f64>,
    pub n: Option<usize>,
    pub t: Option<f64>,
    pub x: Option<Vec<f64>>,
    pub x0: Option<f64>,
    pub t0: Option<f64>,
    pub p: Option<f64>,
    pub q: Option<f64>,
    pub s: Option<f64>,
    pub rho: Option<f64>,
    pub a: Option<f64>,
    pub tol: Option<f64>,
    pub points: Option<usize>,
    pub threads: Option<usize>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub preset: Option<String>,
    pub suite: Option<String>,
}

fn parse<T: FromStr>(map: &BTreeMap<String, String>, key: &str) -> Result<Option<T>, Error> {
    map.get(key)
        .map(|v| {
            v.parse::<T>()
                .map_err(|_| Error::Validation(format!("config key `{key}`: cannot parse `{v}`")))
        })
        .transpose()
}

fn parse_list(map: &BTreeMap<String, String>, key: &str) -> Result<Option<Vec<f64>>, Error> {
    map.get(key)
        .map(|v| {
            v.split(',')
                .map(|s| {
                    s.trim().parse::<f64>().map_err(|_| {
                        Error::Validation(format!("config key `{key}`: cannot parse `{s}`"))
                    })
                })
                .collect()
        })
        .transpose()
}

impl Settings {
    pub fn from_config_text(text: &str) -> Result<Self, Error> {
        let map = parse_config(text)?;
        if let Some(k) = map.keys().find(|k| !KEYS.contains(&k.as_str())) {
            return Err(Error::Validation(format!("unknown config key `{k}`")));
        }
        Ok(Settings {
            m: parse(&map, "M")?,
            n: parse(&map, "n")?,
            t: parse(&map, "t")?,
            x: parse_list(&map, "x")?,
            x0: parse(&map, "x0")?,
            t0: parse(&map, "t0")?,
            p: parse(&map, "p")?,
            q: parse(&map, "q")?,
            s: parse(&map, "s")?,
            rho: parse(&map, "rho")?,
            a: parse(&map, "a")?,
            tol: parse(&map, "tol")?,
            points: parse(&map, "points")?,
            threads: parse(&map, "threads")?,
            out: map.get("out").map(PathBuf::from),
            seed: parse(&map, "seed")?,
            preset: map.get("preset").cloned(),
            suite: map.get("suite").cloned(),
        })
    }

    /// Config file (if any) overlaid with the flags.
    pub fn resolve(p: &Params) -> Result<Self, Error> {
        let base = match &p.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| {
                    Error::Validation(format!("cannot read config {}: {e}", path.display()))
                })?;
                Settings::from_config_text(&text)?
            }
            None => Settings::default(),
        };
        Ok(Settings {
            m: p.m.or(base.m),
            n: p.n.or(base.n),
            t: p.t.or(base.t),
            x: p.x.clone().or(base.x),
            x0: p.x0.or(base.x0),
            t0: p.t0.or(base.t0),
            p: p.p.or(base.p),
            q: p.q.or(base.q),
            s: p.s.or(base.s),
            rho: p.rho.or(base.rho),
            a: p.a.or(base.a),
            tol: p.tol.or(base.tol),
            points: p.points.or(base.points),
            threads: p.threads.or(base.threads),
            out: p.out.clone().or(base.out),
            seed: p.seed.or(base.seed),
            preset: p.preset.clone().or(base.preset),
            suite: p.suite.clone().or(base.suite),
        })
    }

    /// The parameters that affect results, for the manifest and its hash.
    /// Output location and thread count are left out.
    pub fn to_json(&self) -> Value {
        let mut m = Map::new();
        let mut put = |k: &str, v: Option<Value>| {
            if let Some(v) = v {
                m.insert(k.to_string(), v);
            }
        };
        put("M", self.m.map(Value::from));
        put("n", self.n.map(Value::from));
        put("t", self.t.map(Value::from));
        put("x", self.x.clone().map(Value::from));
        put("x0", self.x0.map(Value::from));
        put("t0", self.t0.map(Value::from));
        put("p", self.p.map(Value::from));
        put("q", self.q.map(Value::from));
        put("s", self.s.map(Value::from));
        put("rho", self.rho.map(Value::from));
        put("a", self.a.map(Value::from));
        put("tol", self.tol.map(Value::from));
        put("points", self.points.map(Value::from));
        put("seed", self.seed.map(Value::from));
        put("preset", self.preset.clone().map(Value::from));
        put("suite", self.suite.clone().map(Value::from));
        Value::Object(m)
    }
}

/// Required value or a validation error naming the flag.
pub fn need<T: Clone>(v: &Option<T>, flag: &str) -> Result<T, Error> {
    v.clone()
        .ok_or_else(|| Error::Validation(format!("missing required --{flag}")))
}
