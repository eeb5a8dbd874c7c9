use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use eigenroots::rootfinder::RootCloud;
use rug::Float;

/// Writes through a temporary file in the target directory and renames it
/// into place, so readers never see a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path
        .parent()
        .filter(|d| !d.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.flush()?;
    tmp.persist(path)
        .with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

/// CSV rows rendered in memory, then written atomically.
pub struct Table {
    writer: csv::Writer<Vec<u8>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Result<Self> {
        let mut writer = csv::WriterBuilder::new()
            .flexible(true)
            .from_writer(Vec::new());
        writer.write_record(header)?;
        Ok(Table { writer })
    }

    pub fn row<I, S>(&mut self, fields: I) -> Result<()>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        self.writer.write_record(fields)?;
        Ok(())
    }

    pub fn save(self, path: &Path) -> Result<()> {
        let bytes = self
            .writer
            .into_inner()
            .map_err(|e| anyhow::anyhow!("{}", e.error()))?;
        write_atomic(path, &bytes)
    }
}

/// Decimal with enough digits to round-trip the value at its precision.
pub fn float(x: &Float) -> String {
    x.to_string()
}

pub fn f64_field(x: f64) -> String {
    format!("{x:e}")
}

pub const ROOT_HEADER: [&str; 6] = ["n", "index", "re", "im", "abs", "err_radius"];
pub const SCALED_HEADER: [&str; 7] = ["n", "index", "re", "im", "abs", "err_radius", "scaled"];

/// Root CSV rows for one cloud; `scaled` appends the marker column.
pub fn push_cloud(table: &mut Table, n: usize, cloud: &RootCloud, scaled: bool) -> Result<()> {
    for (i, r) in cloud.roots.iter().enumerate() {
        let mut fields = vec![
            n.to_string(),
            i.to_string(),
            float(&r.value.re),
            float(&r.value.im),
            float(&r.value.abs()),
            f64_field(r.err_radius),
        ];
        if scaled {
            fields.push("1".into());
        }
        table.row(fields)?;
    }
    Ok(())
}

pub fn out_path(out: &Path, stem: &str, suffix: &str) -> PathBuf {
    out.join(format!("{stem}-{suffix}"))
}
