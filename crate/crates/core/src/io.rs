//! JSON formats: k-graphs, hosts, packing certificates and profiles.
//!
//! Every writer emits pretty-printed JSON with a trailing newline; readers
//! accept any key order and whitespace, so re-writing a file read back
//! gives identical bytes.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::graph::{Host, KGraph};
use crate::host::{BlowupHost, HostSpec};
use crate::packing::Packing;
use crate::realisation::StructuralProfile;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphDoc {
    pub k: usize,
    pub vertices: Vec<String>,
    pub edges: Vec<Vec<String>>,
}

impl GraphDoc {
    pub fn from_graph(g: &KGraph) -> Self {
        GraphDoc {
            k: g.k(),
            vertices: g.names().to_vec(),
            edges: g
                .edges()
                .iter()
                .map(|e| e.iter().map(|&v| g.name(v).to_string()).collect())
                .collect(),
        }
    }

    pub fn to_graph(&self) -> Result<KGraph> {
        KGraph::new(self.k, self.vertices.clone(), self.edges.clone())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlowupDoc {
    pub template: GraphDoc,
    pub sizes: Vec<usize>,
}

/// A host file: an explicit k-graph, a complete k-partite graph given by
/// its class sizes, or a blow-up of a template.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum HostDoc {
    Graph(GraphDoc),
    Complete { complete: Vec<usize> },
    Blowup { blowup: BlowupDoc },
}

impl HostDoc {
    pub fn from_host(h: &HostSpec) -> Self {
        match h {
            HostSpec::Graph(g) => HostDoc::Graph(GraphDoc::from_graph(g)),
            HostSpec::Blowup(b) if b.is_complete() => HostDoc::Complete {
                complete: b.sizes().to_vec(),
            },
            HostSpec::Blowup(b) => HostDoc::Blowup {
                blowup: BlowupDoc {
                    template: GraphDoc::from_graph(b.template()),
                    sizes: b.sizes().to_vec(),
                },
            },
        }
    }

    pub fn to_host(&self) -> Result<HostSpec> {
        Ok(match self {
            HostDoc::Graph(g) => HostSpec::Graph(g.to_graph()?),
            HostDoc::Complete { complete } => {
                if complete.len() < 2 {
                    return domain("a complete host needs at least 2 classes");
                }
                HostSpec::Blowup(BlowupHost::complete(complete)?)
            }
            HostDoc::Blowup { blowup } => {
                HostSpec::Blowup(BlowupHost::new(blowup.template.to_graph()?, blowup.sizes.clone())?)
            }
        })
    }
}

/// A pattern given inline or as a path relative to the certificate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GraphRef {
    Inline(GraphDoc),
    File(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum HostRef {
    Inline(HostDoc),
    File(String),
}

/// Packing certificate; each copy maps pattern vertex names to host
/// vertex names.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateDoc {
    pub pattern: GraphRef,
    pub host: HostRef,
    pub copies: Vec<BTreeMap<String, String>>,
}

impl CertificateDoc {
    pub fn from_packing(m: &Packing) -> Self {
        let copies = m
            .copies
            .iter()
            .map(|c| {
                c.iter()
                    .enumerate()
                    .map(|(u, &v)| (m.pattern.name(u).to_string(), m.host.vertex_name(v)))
                    .collect()
            })
            .collect();
        CertificateDoc {
            pattern: GraphRef::Inline(GraphDoc::from_graph(&m.pattern)),
            host: HostRef::Inline(HostDoc::from_host(&m.host)),
            copies,
        }
    }

    /// Resolves file references against `base` and name maps against the
    /// graphs.
    pub fn to_packing(&self, base: &Path) -> Result<Packing> {
        let pattern = match &self.pattern {
            GraphRef::Inline(g) => g.to_graph()?,
            GraphRef::File(p) => load_graph(&base.join(p))?,
        };
        let host = match &self.host {
            HostRef::Inline(h) => h.to_host()?,
            HostRef::File(p) => load_host(&base.join(p))?,
        };
        let mut copies = Vec::with_capacity(self.copies.len());
        for (i, c) in self.copies.iter().enumerate() {
            if c.len() != pattern.n() {
                return domain(format!("copy {i} names {} vertices, the pattern has {}", c.len(), pattern.n()));
            }
            let mut map = vec![0; pattern.n()];
            for (u, v) in c {
                let Some(pu) = pattern.vertex(u) else {
                    return domain(format!("copy {i}: unknown pattern vertex {u:?}"));
                };
                let Some(hv) = host.vertex_by_name(v) else {
                    return domain(format!("copy {i}: unknown host vertex {v:?}"));
                };
                map[pu] = hv;
            }
            copies.push(map);
        }
        Ok(Packing::new(pattern, host, copies))
    }
}

fn ratio(r: num_rational::Ratio<u64>) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RealisationDoc {
    pub classes: Vec<Vec<String>>,
    pub sizes: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProfileDoc {
    pub k: usize,
    pub b: usize,
    pub sigma_set: Vec<u64>,
    pub diff_set: Vec<u64>,
    /// `null` when undefined.
    pub gcd: Option<u64>,
    pub sigma: String,
    pub tau: String,
    #[serde(rename = "type")]
    pub kind: String,
    /// Unordered realisations.
    pub realisations: usize,
    pub ordered_realisations: u64,
    pub min_cover: Vec<String>,
    pub realisation_classes: Vec<RealisationDoc>,
}

impl ProfileDoc {
    pub fn new(g: &KGraph, p: &StructuralProfile, reps: &[crate::Realisation]) -> Self {
        let names = |vs: &[usize]| vs.iter().map(|&v| g.name(v).to_string()).collect::<Vec<_>>();
        ProfileDoc {
            k: p.k,
            b: p.b,
            sigma_set: p.sigma_set.clone(),
            diff_set: p.diff_set.clone(),
            gcd: p.gcd,
            sigma: ratio(p.sigma),
            tau: ratio(p.tau),
            kind: p.kind.to_string(),
            realisations: p.unordered_count,
            ordered_realisations: p.realisation_count,
            min_cover: names(&p.min_cover),
            realisation_classes: reps
                .iter()
                .map(|r| RealisationDoc {
                    classes: r.classes.iter().map(|c| names(c)).collect(),
                    sizes: r.sizes(),
                })
                .collect(),
        }
    }
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    std::fs::write(path, to_json(value)?)?;
    Ok(())
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

pub fn parse_graph(text: &str) -> Result<KGraph> {
    serde_json::from_str::<GraphDoc>(text)?.to_graph()
}

pub fn graph_to_json(g: &KGraph) -> Result<String> {
    to_json(&GraphDoc::from_graph(g))
}

pub fn load_graph(path: &Path) -> Result<KGraph> {
    read_json::<GraphDoc>(path)?.to_graph()
}

pub fn parse_host(text: &str) -> Result<HostSpec> {
    serde_json::from_str::<HostDoc>(text)?.to_host()
}

pub fn load_host(path: &Path) -> Result<HostSpec> {
    read_json::<HostDoc>(path)?.to_host()
}

pub fn certificate_to_json(m: &Packing) -> Result<String> {
    to_json(&CertificateDoc::from_packing(m))
}

pub fn load_certificate(path: &Path) -> Result<Packing> {
    let doc: CertificateDoc = read_json(path)?;
    let base: PathBuf = path.parent().map(Path::to_path_buf).unwrap_or_default();
    doc.to_packing(&base)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graph_round_trip() {
        let text = "{\"k\":3,\"edges\":[[\"c\",\"a\",\"b\"],[\"a\",\"c\",\"d\"]],\"vertices\":[\"a\",\"b\",\"c\",\"d\"]}";
        let g = parse_graph(text).unwrap();
        let out = graph_to_json(&g).unwrap();
        assert!(out.ends_with('\n'));
        assert_eq!(parse_graph(&out).unwrap(), g);
        assert_eq!(graph_to_json(&parse_graph(&out).unwrap()).unwrap(), out);
    }

    #[test]
    fn host_forms() {
        let h = parse_host("{\"complete\":[2,3,4]}").unwrap();
        assert_eq!(h.vertex_count(), 9);
        let back = to_json(&HostDoc::from_host(&h)).unwrap();
        assert_eq!(parse_host(&back).unwrap(), h);
        assert!(parse_host("{\"complete\":[2]}").is_err());
    }

    #[test]
    fn certificate_round_trip() {
        let edge = KGraph::from_indices(2, 2, vec![vec![0, 1]]).unwrap();
        let host = HostSpec::Blowup(BlowupHost::complete(&[2, 2]).unwrap());
        let m = Packing::new(edge, host, vec![vec![0, 2], vec![1, 3]]);
        let text = certificate_to_json(&m).unwrap();
        let doc: CertificateDoc = serde_json::from_str(&text).unwrap();
        let back = doc.to_packing(Path::new(".")).unwrap();
        assert_eq!(back, m);
        assert!(back.verify().perfect);
    }
}
