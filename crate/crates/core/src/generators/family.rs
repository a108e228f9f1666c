use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::generators::{
    frobenius_coeffs, mock_f_coeffs, mock_nu_coeffs, mock_omega_coeffs, partition_coeffs, NuMethod,
};
use crate::series::{eta_quotient, TruncatedSeries};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum FamilyKind {
    Partition,
    /// k-colored generalized Frobenius partitions `c phi_k`.
    Frobenius {
        k: u32,
    },
    MockF,
    MockOmega,
    MockNu,
    /// `prod eta(delta tau)^r` given as `(delta, r)` pairs.
    EtaQuotient {
        factors: Vec<(i64, i64)>,
    },
}

/// One coefficient family with its eta-power offset `b` and level.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FamilySpec {
    pub kind: FamilyKind,
    /// Exponent offset in units of 1/24.
    pub b: i64,
    /// Level `N` entering `gcd(d, 6 N m) = 1`.
    pub level: u64,
}

impl FamilySpec {
    pub fn partition() -> Self {
        FamilySpec {
            kind: FamilyKind::Partition,
            b: -1,
            level: 1,
        }
    }

    /// Level is `k` for odd `k` and `2k` for even `k`.
    pub fn frobenius(k: u32) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidParameter("k must be at least 1".into()));
        }
        let level = if k % 2 == 1 { k as u64 } else { 2 * k as u64 };
        Ok(FamilySpec {
            kind: FamilyKind::Frobenius { k },
            b: -(k as i64),
            level,
        })
    }

    // The mock families use gcd(d, 24m) = 1, i.e. level 4.
    pub fn mock_f() -> Self {
        FamilySpec {
            kind: FamilyKind::MockF,
            b: -1,
            level: 4,
        }
    }

    pub fn mock_omega() -> Self {
        FamilySpec {
            kind: FamilyKind::MockOmega,
            b: 16,
            level: 4,
        }
    }

    pub fn mock_nu() -> Self {
        FamilySpec {
            kind: FamilyKind::MockNu,
            b: 0,
            level: 4,
        }
    }

    pub fn eta_quotient(factors: Vec<(i64, i64)>, level: u64) -> Result<Self> {
        if let Some(&(d, _)) = factors.iter().find(|(d, _)| *d <= 0) {
            return Err(Error::InvalidParameter(format!(
                "eta factor delta must be positive, got {d}"
            )));
        }
        if level == 0 {
            return Err(Error::InvalidParameter("level must be positive".into()));
        }
        let b = factors.iter().map(|(d, r)| d * r).sum();
        Ok(FamilySpec {
            kind: FamilyKind::EtaQuotient { factors },
            b,
            level,
        })
    }

    pub fn is_mock(&self) -> bool {
        matches!(
            self.kind,
            FamilyKind::MockF | FamilyKind::MockOmega | FamilyKind::MockNu
        )
    }

    /// Coefficients `a(0..=trunc)`, exact or mod `modulus`.
    pub fn generate(&self, trunc: usize, modulus: Option<u32>) -> Result<TruncatedSeries> {
        match &self.kind {
            FamilyKind::Partition => Ok(partition_coeffs(trunc, modulus)),
            FamilyKind::Frobenius { k } => frobenius_coeffs(*k, trunc, modulus),
            FamilyKind::MockF => Ok(mock_f_coeffs(trunc, modulus)),
            FamilyKind::MockOmega => Ok(mock_omega_coeffs(trunc, modulus)),
            FamilyKind::MockNu => mock_nu_coeffs(trunc, modulus, NuMethod::Defining),
            FamilyKind::EtaQuotient { factors } => eta_quotient(factors, trunc, modulus),
        }
    }

    /// Short kind tag used in cache headers and file names.
    pub fn kind_name(&self) -> &'static str {
        match self.kind {
            FamilyKind::Partition => "partition",
            FamilyKind::Frobenius { .. } => "cphi",
            FamilyKind::MockF => "mock_f",
            FamilyKind::MockOmega => "mock_omega",
            FamilyKind::MockNu => "mock_nu",
            FamilyKind::EtaQuotient { .. } => "eta",
        }
    }

    pub fn params_json(&self) -> Value {
        match &self.kind {
            FamilyKind::Frobenius { k } => json!({ "k": k }),
            FamilyKind::EtaQuotient { factors } => json!({
                "factors": factors.iter().map(|(d, r)| json!([d, r])).collect::<Vec<_>>(),
                "level": self.level,
            }),
            _ => json!({}),
        }
    }

    pub fn from_kind_and_params(kind: &str, params: &Value) -> Result<Self> {
        let bad = |why: &str| Error::FamilySyntax(format!("{kind} {params}"), why.to_string());
        match kind {
            "partition" => Ok(Self::partition()),
            "mock_f" => Ok(Self::mock_f()),
            "mock_omega" => Ok(Self::mock_omega()),
            "mock_nu" => Ok(Self::mock_nu()),
            "cphi" => {
                let k = params["k"].as_u64().ok_or_else(|| bad("missing k"))?;
                Self::frobenius(u32::try_from(k).map_err(|_| bad("k too large"))?)
            }
            "eta" => {
                let level = params["level"]
                    .as_u64()
                    .ok_or_else(|| bad("missing level"))?;
                let factors = params["factors"]
                    .as_array()
                    .ok_or_else(|| bad("missing factors"))?
                    .iter()
                    .map(|pair| match pair.as_array().map(Vec::as_slice) {
                        Some([d, r]) => d
                            .as_i64()
                            .zip(r.as_i64())
                            .ok_or_else(|| bad("factor entries must be integers")),
                        _ => Err(bad("factor must be a [delta, r] pair")),
                    })
                    .collect::<Result<Vec<_>>>()?;
                Self::eta_quotient(factors, level)
            }
            _ => Err(bad("unknown family kind")),
        }
    }

    /// File-name-safe parameter slug.
    pub fn params_slug(&self) -> String {
        match &self.kind {
            FamilyKind::Frobenius { k } => format!("k{k}"),
            FamilyKind::EtaQuotient { factors } => {
                let parts: Vec<String> = factors.iter().map(|(d, r)| format!("{d}^{r}")).collect();
                format!("{}_N{}", parts.join("_"), self.level)
            }
            _ => "std".to_string(),
        }
    }
}

/// Selector grammar: `p`, `cphi:<k>`, `mock:f`, `mock:omega`, `mock:nu`,
/// `eta:<d1^r1,d2^r2,...>@N=<level>`.
impl FromStr for FamilySpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let err = |why: &str| Error::FamilySyntax(s.to_string(), why.to_string());
        match s {
            "p" => return Ok(Self::partition()),
            "mock:f" => return Ok(Self::mock_f()),
            "mock:omega" => return Ok(Self::mock_omega()),
            "mock:nu" => return Ok(Self::mock_nu()),
            _ => {}
        }
        if let Some(k) = s.strip_prefix("cphi:") {
            let k: u32 = k.parse().map_err(|_| err("k must be a positive integer"))?;
            return Self::frobenius(k);
        }
        if let Some(rest) = s.strip_prefix("eta:") {
            let (body, level) = rest
                .split_once("@N=")
                .ok_or_else(|| err("expected @N=<level>"))?;
            let level: u64 = level.parse().map_err(|_| err("bad level"))?;
            let mut factors = Vec::new();
            for part in body.split(',').filter(|p| !p.is_empty()) {
                let (d, r) = part
                    .split_once('^')
                    .ok_or_else(|| err("factor must look like delta^r"))?;
                let d: i64 = d.trim().parse().map_err(|_| err("bad delta"))?;
                let r: i64 = r.trim().parse().map_err(|_| err("bad exponent"))?;
                factors.push((d, r));
            }
            return Self::eta_quotient(factors, level);
        }
        Err(err("unknown family"))
    }
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            FamilyKind::Partition => write!(f, "p"),
            FamilyKind::Frobenius { k } => write!(f, "cphi:{k}"),
            FamilyKind::MockF => write!(f, "mock:f"),
            FamilyKind::MockOmega => write!(f, "mock:omega"),
            FamilyKind::MockNu => write!(f, "mock:nu"),
            FamilyKind::EtaQuotient { factors } => {
                let parts: Vec<String> = factors.iter().map(|(d, r)| format!("{d}^{r}")).collect();
                write!(f, "eta:{}@N={}", parts.join(","), self.level)
            }
        }
    }
}

impl Serialize for FamilySpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for FamilySpec {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
