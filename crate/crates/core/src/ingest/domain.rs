//! Pay-level domain (pld) and public suffix (tld) extraction.

use std::path::Path;
use std::str::FromStr;
use std::sync::OnceLock;

use publicsuffix::{IcannList, Psl};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

static BUNDLED_PSL: &str = include_str!("../../data/public_suffix_list.dat");

/// The pld/tld pair of a page URL. `flagged` marks degenerate hosts (IP
/// literals, hosts without a known public suffix) for which the pld is the
/// full host and the tld is empty.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DomainParts {
    pub pld: String,
    pub tld: String,
    pub flagged: bool,
}

impl DomainParts {
    fn degenerate(host: &str) -> Self {
        DomainParts {
            pld: host.to_string(),
            tld: String::new(),
            flagged: true,
        }
    }
}

/// Registrable-domain lookup backed by a public-suffix list snapshot (ICANN
/// section), or by the last-two-labels heuristic when no snapshot is present.
#[derive(Clone, Debug)]
pub struct SuffixList {
    list: Option<IcannList>,
    version: String,
}

impl SuffixList {
    /// The snapshot compiled into the crate.
    pub fn bundled() -> &'static SuffixList {
        static LIST: OnceLock<SuffixList> = OnceLock::new();
        LIST.get_or_init(|| {
            SuffixList::from_snapshot(BUNDLED_PSL, "bundled")
                .expect("bundled public suffix list is valid")
        })
    }

    pub fn from_snapshot(text: &str, version: &str) -> Result<Self> {
        let list = IcannList::from_str(text)
            .map_err(|e| Error::Invalid(format!("public suffix list: {e}")))?;
        Ok(SuffixList {
            list: Some(list),
            version: version.to_string(),
        })
    }

    /// Load a snapshot file; when it is missing fall back to the heuristic.
    pub fn load(path: &Path) -> Result<Self> {
        match std::fs::read_to_string(path) {
            Ok(text) => Self::from_snapshot(&text, &path.display().to_string()),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
                log::warn!(
                    "public suffix snapshot {} not found; using the last-two-labels heuristic, \
                     pld/tld values will differ from snapshot-based results",
                    path.display()
                );
                Ok(Self::heuristic())
            }
            Err(e) => Err(Error::io(path, e)),
        }
    }

    pub fn heuristic() -> Self {
        SuffixList {
            list: None,
            version: "heuristic:last-two-labels".into(),
        }
    }

    pub fn version(&self) -> &str {
        &self.version
    }

    /// Split a host name into pld and tld.
    pub fn split_host(&self, host: &str) -> DomainParts {
        let host = host.trim_end_matches('.').to_ascii_lowercase();
        if host.parse::<std::net::IpAddr>().is_ok() || host.starts_with('[') {
            return DomainParts::degenerate(&host);
        }
        let Some(list) = &self.list else {
            let labels: Vec<&str> = host.split('.').collect();
            if labels.len() < 2 {
                return DomainParts::degenerate(&host);
            }
            return DomainParts {
                pld: labels[labels.len() - 2..].join("."),
                tld: format!(".{}", labels[labels.len() - 1]),
                flagged: false,
            };
        };
        let suffix = match list.suffix(host.as_bytes()) {
            Some(s) if s.is_known() => String::from_utf8_lossy(s.as_bytes()).into_owned(),
            _ => return DomainParts::degenerate(&host),
        };
        match list.domain(host.as_bytes()) {
            Some(d) => DomainParts {
                pld: String::from_utf8_lossy(d.as_bytes()).into_owned(),
                tld: format!(".{suffix}"),
                flagged: false,
            },
            // the host is itself a public suffix
            None => DomainParts {
                pld: host.clone(),
                tld: format!(".{suffix}"),
                flagged: true,
            },
        }
    }

    pub fn extract(&self, url: &str) -> Result<DomainParts> {
        let parsed =
            url::Url::parse(url).map_err(|e| Error::Invalid(format!("url <{url}>: {e}")))?;
        match parsed.host() {
            Some(url::Host::Domain(d)) => Ok(self.split_host(d)),
            Some(url::Host::Ipv4(ip)) => Ok(DomainParts::degenerate(&ip.to_string())),
            Some(url::Host::Ipv6(ip)) => Ok(DomainParts::degenerate(&ip.to_string())),
            None => Err(Error::Invalid(format!("url <{url}> has no host"))),
        }
    }
}

/// Extract `(pld, tld)` from a page URL using the bundled snapshot.
pub fn extract_pld_tld(url: &str) -> Result<DomainParts> {
    SuffixList::bundled().extract(url)
}
