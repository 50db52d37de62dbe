//! On-disk cache of built triangles, one JSON file per maximum exponent.
//!
//! A cached file is reused only when it was written by the same tool version.
//! Files from other versions are rebuilt and replaced. Files that fail
//! validation are reported, never repaired.

use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::sieve::SieveConfig;
use crate::triangle::{
    build_triangle, export_triangle, import_triangle, Format, Triangle, TOOL_VERSION,
};

pub const CACHE_ENV: &str = "OMEGA_TRIANGLE_CACHE";

/// `$OMEGA_TRIANGLE_CACHE`, else `$XDG_CACHE_HOME/omega-triangle`, else
/// `$HOME/.cache/omega-triangle`.
pub fn default_cache_dir() -> Option<PathBuf> {
    if let Some(dir) = std::env::var_os(CACHE_ENV).filter(|v| !v.is_empty()) {
        return Some(PathBuf::from(dir));
    }
    if let Some(dir) = std::env::var_os("XDG_CACHE_HOME").filter(|v| !v.is_empty()) {
        return Some(PathBuf::from(dir).join("omega-triangle"));
    }
    std::env::var_os("HOME").map(|h| PathBuf::from(h).join(".cache").join("omega-triangle"))
}

pub fn cache_path(dir: &Path, max_exponent: u32) -> PathBuf {
    dir.join(format!("triangle-2pow{max_exponent}.json"))
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Reads a cached triangle. `Ok(None)` when absent or written by another version.
pub fn load(dir: &Path, max_exponent: u32) -> Result<Option<Triangle>> {
    let path = cache_path(dir, max_exponent);
    let text = match fs::read_to_string(&path) {
        Ok(text) => text,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
        Err(e) => return Err(io_err(&path)(e)),
    };
    let t = import_triangle(&text, Format::Json)?;
    if t.meta().tool_version != TOOL_VERSION {
        return Ok(None);
    }
    if t.max_exponent() != max_exponent {
        return Err(Error::parse(
            1,
            format!(
                "{} holds rows up to 2^{}, expected 2^{max_exponent}",
                path.display(),
                t.max_exponent()
            ),
        ));
    }
    Ok(Some(t))
}

pub fn store(dir: &Path, t: &Triangle) -> Result<PathBuf> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let path = cache_path(dir, t.max_exponent());
    let tmp = path.with_extension(format!("json.tmp{}", std::process::id()));
    fs::write(&tmp, export_triangle(t, Format::Json)).map_err(io_err(&tmp))?;
    fs::rename(&tmp, &path).map_err(io_err(&path))?;
    Ok(path)
}

/// Cached triangle when valid and current, otherwise a fresh build that is
/// then written to the cache.
pub fn load_or_build(
    max_exponent: u32,
    config: &SieveConfig,
    dir: Option<&Path>,
) -> Result<Triangle> {
    let Some(dir) = dir else {
        return build_triangle(max_exponent, config);
    };
    if let Some(t) = load(dir, max_exponent)? {
        return Ok(t);
    }
    let t = build_triangle(max_exponent, config)?;
    store(dir, &t)?;
    Ok(t)
}
