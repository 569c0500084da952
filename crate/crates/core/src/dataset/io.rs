use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{DatasetSplit, LabeledDataset, LabeledInstance, Page, PageIndex, Provenance, Task};
use crate::error::{Error, Result};
use crate::ingest::NodeRecord;

/// First line of a dataset file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DatasetHeader {
    pub provenance: Provenance,
    pub classes: Vec<String>,
    /// Whether the instances carry a train/test assignment.
    pub split: bool,
    /// Page sidecar file name, relative to the dataset file.
    pub pages: String,
}

#[derive(Serialize, Deserialize)]
struct InstanceLine {
    label: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    part: Option<Part>,
    page: String,
    index: usize,
    node: NodeRecord,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Part {
    Train,
    Test,
}

/// Contents of a dataset file. Unsplit datasets keep everything in `train`.
#[derive(Clone, Debug)]
pub struct DatasetFile {
    pub header: DatasetHeader,
    pub train: Vec<LabeledInstance>,
    pub test: Vec<LabeledInstance>,
}

impl DatasetFile {
    pub fn from_dataset(ds: &LabeledDataset, provenance: Provenance) -> DatasetFile {
        DatasetFile {
            header: DatasetHeader {
                provenance,
                classes: ds.class_names(),
                split: false,
                pages: String::new(),
            },
            train: ds.instances().cloned().collect(),
            test: Vec::new(),
        }
    }

    pub fn from_split(split: &DatasetSplit) -> DatasetFile {
        DatasetFile {
            header: DatasetHeader {
                provenance: split.provenance.clone(),
                classes: split.classes(),
                split: true,
                pages: String::new(),
            },
            train: split.train.clone(),
            test: split.test.clone(),
        }
    }

    pub fn task(&self) -> &Task {
        &self.header.provenance.task
    }

    /// All instances grouped by class.
    pub fn to_dataset(&self) -> LabeledDataset {
        let mut classes: BTreeMap<String, Vec<LabeledInstance>> =
            self.header.classes.iter().map(|c| (c.clone(), Vec::new())).collect();
        for i in self.train.iter().chain(&self.test) {
            classes.entry(i.label.clone()).or_default().push(i.clone());
        }
        LabeledDataset {
            task: self.task().clone(),
            classes,
            cap: self.header.provenance.cap,
        }
    }

    pub fn to_split(&self) -> Result<DatasetSplit> {
        if !self.header.split {
            return Err(Error::Dataset(
                "dataset file has no train/test assignment; run the split first".into(),
            ));
        }
        Ok(DatasetSplit {
            train: self.train.clone(),
            test: self.test.clone(),
            provenance: self.header.provenance.clone(),
        })
    }
}

/// Sidecar path for a dataset file: `x.jsonl` gives `x.pages.jsonl`.
fn pages_path(path: &Path) -> PathBuf {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("dataset");
    path.with_file_name(format!("{stem}.pages.jsonl"))
}

/// Write the dataset as JSONL (header line, then one line per instance) plus
/// a page sidecar holding every page referenced.
pub fn write_dataset(path: &Path, file: &DatasetFile) -> Result<()> {
    let sidecar = pages_path(path);
    let mut header = file.header.clone();
    header.pages = sidecar
        .file_name()
        .and_then(|s| s.to_str())
        .unwrap_or_default()
        .to_string();

    let mut out = BufWriter::new(File::create(path).map_err(|e| Error::io(path, e))?);
    serde_json::to_writer(&mut out, &header)?;
    out.write_all(b"\n")?;
    let mut pages: BTreeMap<&str, &Arc<Page>> = BTreeMap::new();
    let parts = file
        .train
        .iter()
        .map(|i| (i, Part::Train))
        .chain(file.test.iter().map(|i| (i, Part::Test)));
    for (inst, part) in parts {
        pages.insert(&inst.page().url, inst.page());
        let line = InstanceLine {
            label: inst.label.clone(),
            part: header.split.then_some(part),
            page: inst.page().url.clone(),
            index: inst.index,
            node: inst.node().clone(),
        };
        serde_json::to_writer(&mut out, &line)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;

    let mut side = BufWriter::new(File::create(&sidecar).map_err(|e| Error::io(&sidecar, e))?);
    for page in pages.values() {
        serde_json::to_writer(&mut side, page.as_ref())?;
        side.write_all(b"\n")?;
    }
    side.flush()?;
    Ok(())
}

fn read_lines(path: &Path) -> Result<impl Iterator<Item = (u64, String)>> {
    let reader = BufReader::new(File::open(path).map_err(|e| Error::io(path, e))?);
    let lines: Vec<(u64, String)> = reader
        .lines()
        .enumerate()
        .map(|(i, l)| l.map(|l| (i as u64 + 1, l)))
        .collect::<std::io::Result<_>>()
        .map_err(|e| Error::io(path, e))?;
    Ok(lines.into_iter().filter(|(_, l)| !l.trim().is_empty()))
}

pub fn read_dataset(path: &Path) -> Result<DatasetFile> {
    let mut lines = read_lines(path)?;
    let (_, first) = lines
        .next()
        .ok_or_else(|| Error::Dataset(format!("{}: empty dataset file", path.display())))?;
    let header: DatasetHeader = serde_json::from_str(&first).map_err(|e| Error::Parse {
        line: 1,
        message: format!("dataset header: {e}"),
    })?;
    let sidecar = path.with_file_name(&header.pages);
    let mut pages = Vec::new();
    for (n, l) in read_lines(&sidecar)? {
        pages.push(serde_json::from_str::<Page>(&l).map_err(|e| Error::Parse {
            line: n,
            message: format!("{}: {e}", sidecar.display()),
        })?);
    }
    let index = PageIndex::from_pages(pages);

    let known: BTreeSet<&str> = header.classes.iter().map(String::as_str).collect();
    let mut train = Vec::new();
    let mut test = Vec::new();
    for (n, l) in lines {
        let line: InstanceLine = serde_json::from_str(&l).map_err(|e| Error::Parse {
            line: n,
            message: e.to_string(),
        })?;
        if !known.contains(line.label.as_str()) {
            return Err(Error::Parse {
                line: n,
                message: format!("label {:?} not among the header classes", line.label),
            });
        }
        let page = index.get(&line.page).ok_or_else(|| Error::Parse {
            line: n,
            message: format!("page {} missing from {}", line.page, sidecar.display()),
        })?;
        if page.nodes.get(line.index) != Some(&line.node) {
            return Err(Error::Parse {
                line: n,
                message: format!("node does not match page {} at index {}", line.page, line.index),
            });
        }
        let inst = LabeledInstance::new(page.clone(), line.index, line.label)?;
        match line.part {
            Some(Part::Test) => test.push(inst),
            _ => train.push(inst),
        }
    }
    Ok(DatasetFile {
        header,
        train,
        test,
    })
}
