//! On-disk cache of product tables.
//!
//! One text file per `(k, n, mode)`:
//!
//! ```text
//! fpdim-product-table 1
//! k 2 n 4 mode quantum
//! 0 0 0 0 1
//! 1 1 2 0 1
//! ...
//! end 17
//! ```
//!
//! Each record is `λ μ ν d N` for one nonzero `N^{ν,d}_{λμ}` with `λ` not
//! after `μ` in basis order; partitions use the comma-separated form. The
//! loader rechecks every record against the box and the degree rule, so a
//! damaged file is reported instead of silently producing wrong tables.

use std::collections::BTreeMap;
use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::partition::{GrContext, Partition};
use crate::quantum::{build_table_shared, ProductMode, ProductTable, QuantumExpansion};

const MAGIC: &str = "fpdim-product-table";
const FORMAT_VERSION: u32 = 1;

/// Environment variable overriding the cache directory.
pub const CACHE_DIR_ENV: &str = "FPDIM_CACHE_DIR";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableCache {
    dir: PathBuf,
}

impl TableCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        TableCache { dir: dir.into() }
    }

    /// `$FPDIM_CACHE_DIR`, else `fpdim/` under the platform data directory.
    pub fn default_dir() -> Option<PathBuf> {
        match std::env::var_os(CACHE_DIR_ENV) {
            Some(dir) if !dir.is_empty() => Some(PathBuf::from(dir)),
            _ => dirs::data_dir().map(|d| d.join("fpdim")),
        }
    }

    pub fn from_env() -> Option<Self> {
        Self::default_dir().map(Self::new)
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path_for(&self, k: usize, n: usize, mode: ProductMode) -> PathBuf {
        self.dir.join(format!("gr-{k}-{n}-{}.tbl", mode.as_str()))
    }

    /// The cached table, `None` if there is no file.
    pub fn load(&self, ctx: &GrContext, mode: ProductMode) -> Result<Option<ProductTable>> {
        let path = self.path_for(ctx.k(), ctx.n(), mode);
        let file = match fs::File::open(&path) {
            Ok(f) => f,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(e.into()),
        };
        parse_table(BufReader::new(file), ctx, mode)
            .map(Some)
            .map_err(|e| match e {
                Error::Cache(msg) => Error::Cache(format!("{}: {msg}", path.display())),
                other => other,
            })
    }

    /// Writes through a temporary file and a rename so readers never see a
    /// partial table.
    pub fn store(&self, table: &ProductTable) -> Result<PathBuf> {
        fs::create_dir_all(&self.dir)?;
        let ctx = table.ctx();
        let path = self.path_for(ctx.k(), ctx.n(), table.mode());
        let tmp = path.with_extension(format!("tmp{}", std::process::id()));
        {
            let mut out = BufWriter::new(fs::File::create(&tmp)?);
            write_table(&mut out, table)?;
            out.flush()?;
        }
        fs::rename(&tmp, &path)?;
        Ok(path)
    }

    pub fn get_or_build(&self, ctx: &GrContext, mode: ProductMode) -> Result<ProductTable> {
        if let Some(table) = self.load(ctx, mode)? {
            return Ok(table);
        }
        let table = build_table_shared(Arc::new(ctx.clone()), mode)?;
        self.store(&table)?;
        Ok(table)
    }
}

/// Builds the table, going through `cache` when one is given.
pub fn table_with_cache(
    ctx: &GrContext,
    mode: ProductMode,
    cache: Option<&TableCache>,
) -> Result<ProductTable> {
    match cache {
        Some(cache) => cache.get_or_build(ctx, mode),
        None => build_table_shared(Arc::new(ctx.clone()), mode),
    }
}

pub fn write_table(out: &mut impl Write, table: &ProductTable) -> Result<()> {
    let ctx = table.ctx();
    writeln!(out, "{MAGIC} {FORMAT_VERSION}")?;
    writeln!(
        out,
        "k {} n {} mode {}",
        ctx.k(),
        ctx.n(),
        table.mode().as_str()
    )?;
    let basis = ctx.basis();
    let mut records = 0usize;
    for i in 0..basis.len() {
        for j in i..basis.len() {
            for (nu, d, c) in table.get(i, j).terms() {
                writeln!(out, "{} {} {} {d} {c}", basis[i], basis[j], nu)?;
                records += 1;
            }
        }
    }
    writeln!(out, "end {records}")?;
    Ok(())
}

fn bad(line: usize, msg: impl std::fmt::Display) -> Error {
    Error::Cache(format!("line {line}: {msg}"))
}

pub fn parse_table(
    input: impl BufRead,
    ctx: &GrContext,
    mode: ProductMode,
) -> Result<ProductTable> {
    let mut lines = input.lines().enumerate().map(|(i, l)| (i + 1, l));
    let mut next = |what: &str| -> Result<(usize, String)> {
        match lines.next() {
            Some((no, line)) => Ok((no, line?)),
            None => Err(Error::Cache(format!("truncated file, expected {what}"))),
        }
    };
    let (no, header) = next("header")?;
    if header != format!("{MAGIC} {FORMAT_VERSION}") {
        return Err(bad(no, format!("unsupported header {header:?}")));
    }
    let (no, shape) = next("shape line")?;
    let expected = format!("k {} n {} mode {}", ctx.k(), ctx.n(), mode.as_str());
    if shape != expected {
        return Err(bad(no, format!("expected {expected:?}, found {shape:?}")));
    }
    let rank = ctx.rank();
    let n = ctx.n();
    let mut entries: Vec<BTreeMap<(usize, Partition), u64>> =
        vec![BTreeMap::new(); rank * (rank + 1) / 2];
    let mut records = 0usize;
    loop {
        let (no, line) = next("end marker")?;
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.first() == Some(&"end") {
            let count: usize = fields
                .get(1)
                .and_then(|c| c.parse().ok())
                .ok_or_else(|| bad(no, "malformed end marker"))?;
            if count != records {
                return Err(bad(
                    no,
                    format!("end marker says {count} records, read {records}"),
                ));
            }
            break;
        }
        let [l, m, v, d, c] = fields[..] else {
            return Err(bad(no, "expected five fields"));
        };
        let parse_part = |s: &str| -> Result<(Partition, usize)> {
            let p: Partition = s.parse().map_err(|e| bad(no, e))?;
            let idx = ctx
                .index_of(&p)
                .ok_or_else(|| bad(no, format!("{p} outside the box")))?;
            Ok((p, idx))
        };
        let (lambda, i) = parse_part(l)?;
        let (mu, j) = parse_part(m)?;
        let (nu, _) = parse_part(v)?;
        let d: usize = d.parse().map_err(|e| bad(no, e))?;
        let c: u64 = c.parse().map_err(|e| bad(no, e))?;
        if i > j {
            return Err(bad(no, "pair out of order"));
        }
        if c == 0 {
            return Err(bad(no, "zero coefficient stored"));
        }
        if lambda.weight() + mu.weight() != nu.weight() + d * n {
            return Err(bad(no, "degree mismatch"));
        }
        if mode == ProductMode::ClassicalTruncated && d != 0 {
            return Err(bad(no, "quantum term in a classical table"));
        }
        let slot = i * rank - i * (i + 1) / 2 + j;
        if entries[slot].insert((d, nu), c).is_some() {
            return Err(bad(no, "duplicate record"));
        }
        records += 1;
    }
    let entries = entries
        .into_iter()
        .map(QuantumExpansion::from_terms)
        .collect();
    ProductTable::from_entries(Arc::new(ctx.clone()), mode, entries)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::build_table;

    fn serialized(table: &ProductTable) -> String {
        let mut buf = Vec::new();
        write_table(&mut buf, table).unwrap();
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn round_trip() {
        for mode in [ProductMode::Quantum, ProductMode::ClassicalTruncated] {
            let ctx = GrContext::new(2, 5).unwrap();
            let table = build_table(&ctx, mode).unwrap();
            let text = serialized(&table);
            let back = parse_table(text.as_bytes(), &ctx, mode).unwrap();
            for i in 0..ctx.rank() {
                for j in 0..ctx.rank() {
                    assert_eq!(table.get(i, j), back.get(i, j));
                }
            }
        }
    }

    #[test]
    fn format_is_stable() {
        let ctx = GrContext::new(1, 2).unwrap();
        let table = build_table(&ctx, ProductMode::Quantum).unwrap();
        assert_eq!(
            serialized(&table),
            "fpdim-product-table 1\nk 1 n 2 mode quantum\n0 0 0 0 1\n0 1 1 0 1\n1 1 0 1 1\nend 3\n"
        );
    }

    #[test]
    fn rejects_damaged_files() {
        let ctx = GrContext::new(1, 2).unwrap();
        let table = build_table(&ctx, ProductMode::Quantum).unwrap();
        let good = serialized(&table);
        let cases = [
            good.replace("fpdim-product-table 1", "fpdim-product-table 9"),
            good.replace("k 1 n 2", "k 1 n 3"),
            good.replace("1 1 0 1 1", "1 1 0 0 1"),
            good.replace("1 1 0 1 1", "1 1 0 1 0"),
            good.replace("1 1 0 1 1", "1 1 2 1 1"),
            good.replace("0 1 1 0 1", "1 0 1 0 1"),
            good.replace("end 3", "end 4"),
            good.replace("end 3\n", ""),
        ];
        for text in cases {
            assert!(
                matches!(
                    parse_table(text.as_bytes(), &ctx, ProductMode::Quantum),
                    Err(Error::Cache(_))
                ),
                "accepted:\n{text}"
            );
        }
        assert!(parse_table(good.as_bytes(), &ctx, ProductMode::ClassicalTruncated).is_err());
    }

    #[test]
    fn get_or_build_writes_then_reads() {
        let dir = tempfile::tempdir().unwrap();
        let cache = TableCache::new(dir.path());
        let ctx = GrContext::new(2, 4).unwrap();
        assert!(cache.load(&ctx, ProductMode::Quantum).unwrap().is_none());
        let built = cache.get_or_build(&ctx, ProductMode::Quantum).unwrap();
        let path = cache.path_for(2, 4, ProductMode::Quantum);
        assert!(path.exists());
        let loaded = cache.load(&ctx, ProductMode::Quantum).unwrap().unwrap();
        assert_eq!(built.nonzero_constants(), loaded.nonzero_constants());
        fs::write(&path, "garbage\n").unwrap();
        assert!(matches!(
            cache.get_or_build(&ctx, ProductMode::Quantum),
            Err(Error::Cache(_))
        ));
    }
}
