//! On-disk workspace: the graph as a canonical N-Triples pair plus a marker
//! recording that the inferred half is a complete closure.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use codo_core::schema::{extract_schema, SchemaExtraction};
use codo_core::serialization::{parse_ntriples_scoped, serialize_split, BlankScope, ParseMode};
use codo_core::{Graph, Origin};

const ASSERTED: &str = "asserted.nt";
const INFERRED: &str = "inferred.nt";
const MARKER: &str = "materialized";

#[derive(Debug)]
pub struct Workspace {
    dir: PathBuf,
    pub graph: Graph,
    materialized: bool,
}

impl Workspace {
    /// Opens the workspace at `dir`; a missing directory is an empty
    /// workspace.
    pub fn open(dir: &Path) -> Result<Self> {
        let mut graph = Graph::new();
        // One scope: blank nodes may be shared between the two files.
        let mut scope = BlankScope::new();
        for (name, origin) in [(ASSERTED, Origin::Asserted), (INFERRED, Origin::Inferred)] {
            let path = dir.join(name);
            if !path.exists() {
                continue;
            }
            let text =
                fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
            parse_ntriples_scoped(&text, &mut graph, ParseMode::Strict, origin, &mut scope)
                .with_context(|| format!("parsing {}", path.display()))?;
        }
        let materialized = dir.join(MARKER).exists();
        Ok(Workspace {
            dir: dir.to_owned(),
            graph,
            materialized,
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn is_materialized(&self) -> bool {
        self.materialized
    }

    /// Call before any change to the asserted graph.
    pub fn invalidate(&mut self) {
        self.materialized = false;
    }

    pub fn set_materialized(&mut self) {
        self.materialized = true;
    }

    pub fn axioms(&self) -> Result<SchemaExtraction> {
        extract_schema(&self.graph).context("extracting schema axioms from the workspace graph")
    }

    pub fn save(&self) -> Result<()> {
        fs::create_dir_all(&self.dir)
            .with_context(|| format!("creating {}", self.dir.display()))?;
        let (asserted, inferred) = serialize_split(&self.graph);
        write_atomic(&self.dir.join(ASSERTED), &asserted)?;
        write_atomic(&self.dir.join(INFERRED), &inferred)?;
        let marker = self.dir.join(MARKER);
        if self.materialized {
            fs::write(&marker, "")?;
        } else if marker.exists() {
            fs::remove_file(&marker)?;
        }
        Ok(())
    }
}

fn write_atomic(path: &Path, text: &str) -> Result<()> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, text).with_context(|| format!("writing {}", tmp.display()))?;
    fs::rename(&tmp, path).with_context(|| format!("replacing {}", path.display()))
}
