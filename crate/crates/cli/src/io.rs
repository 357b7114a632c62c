use std::fs;
use std::io::{self, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use tempfile::NamedTempFile;

/// A file path or the standard stream selected by `-`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Target {
    Std,
    File(PathBuf),
}

impl Target {
    pub fn from_path(p: PathBuf) -> Self {
        if p.as_os_str() == "-" {
            Target::Std
        } else {
            Target::File(p)
        }
    }

    pub fn check_readable(&self) -> Result<()> {
        if let Target::File(p) = self {
            fs::File::open(p).with_context(|| format!("cannot read {}", p.display()))?;
        }
        Ok(())
    }

    pub fn check_writable(&self) -> Result<()> {
        if let Target::File(p) = self {
            if p.is_dir() {
                bail!("{} is a directory", p.display());
            }
            let dir = parent_dir(p);
            if !dir.is_dir() {
                bail!(
                    "cannot write {}: directory {} does not exist",
                    p.display(),
                    dir.display()
                );
            }
        }
        Ok(())
    }

    pub fn is_std(&self) -> bool {
        matches!(self, Target::Std)
    }

    pub fn read_to_string(&self) -> Result<String> {
        let mut text = String::new();
        match self {
            Target::Std => {
                io::stdin()
                    .read_to_string(&mut text)
                    .context("reading stdin")?;
            }
            Target::File(p) => {
                text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            }
        }
        Ok(text)
    }

    /// Streams output through `write`. Files are written to a temporary
    /// sibling and renamed into place, so a failed run leaves no partial file.
    pub fn write_with<F>(&self, write: F) -> Result<()>
    where
        F: FnOnce(&mut dyn Write) -> io::Result<()>,
    {
        match self {
            Target::Std => {
                let stdout = io::stdout();
                let mut lock = BufWriter::new(stdout.lock());
                write(&mut lock).context("writing stdout")?;
                lock.flush().context("writing stdout")?;
            }
            Target::File(p) => {
                let tmp = NamedTempFile::new_in(parent_dir(p))
                    .with_context(|| format!("cannot write {}", p.display()))?;
                let mut out = BufWriter::new(tmp);
                write(&mut out).with_context(|| format!("writing {}", p.display()))?;
                let tmp = out.into_inner().map_err(|e| e.into_error())?;
                tmp.persist(p)
                    .with_context(|| format!("cannot write {}", p.display()))?;
            }
        }
        Ok(())
    }
}

fn parent_dir(p: &Path) -> &Path {
    match p.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    }
}
