//! Parts catalog persistence: one CSV file per part kind in a directory.
//!
//! ```text
//! inductors.csv  name,l_H,r_ohm,i_max_A,p_max_W
//! zeners.csv     name,v_z_V,i_zsm_A,t_surge_s
//! diodes.csv     name,v_f_V,i_max_A,v_r_V,r_d_ohm
//! ```
//!
//! Lines starting with `#` are comments. Values are SI base units with `.` as
//! the decimal separator.

use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use inductolink_core::model::{Catalog, FreewheelDiodePart, InductorPart, ZenerPart};
use serde::Deserialize;

pub const INDUCTORS_FILE: &str = "inductors.csv";
pub const ZENERS_FILE: &str = "zeners.csv";
pub const DIODES_FILE: &str = "diodes.csv";

pub const INDUCTORS_HEADER: [&str; 5] = ["name", "l_H", "r_ohm", "i_max_A", "p_max_W"];
pub const ZENERS_HEADER: [&str; 4] = ["name", "v_z_V", "i_zsm_A", "t_surge_s"];
pub const DIODES_HEADER: [&str; 5] = ["name", "v_f_V", "i_max_A", "v_r_V", "r_d_ohm"];

#[derive(Debug, thiserror::Error)]
pub enum CatalogError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{file}: header must be `{expected}`, found `{found}`")]
    Header {
        file: String,
        expected: String,
        found: String,
    },
    #[error("{file}:{line}: {message}")]
    Parse {
        file: String,
        line: u64,
        message: String,
    },
    #[error("{file}:{line}: {source}")]
    Invalid {
        file: String,
        line: u64,
        #[source]
        source: inductolink_core::Error,
    },
    #[error("{file}:{line}: duplicate part name `{name}`")]
    Duplicate {
        file: String,
        line: u64,
        name: String,
    },
}

#[derive(Deserialize)]
#[allow(non_snake_case)]
struct InductorRow {
    name: String,
    l_H: f64,
    r_ohm: f64,
    i_max_A: f64,
    p_max_W: f64,
}

#[derive(Deserialize)]
#[allow(non_snake_case)]
struct ZenerRow {
    name: String,
    v_z_V: f64,
    i_zsm_A: f64,
    t_surge_s: f64,
}

#[derive(Deserialize)]
#[allow(non_snake_case)]
struct DiodeRow {
    name: String,
    v_f_V: f64,
    i_max_A: f64,
    v_r_V: f64,
    r_d_ohm: f64,
}

/// Parses one catalog file. `build` turns a row into a part; `name_of` is used
/// for duplicate detection.
fn parse_rows<R, Row, Part>(
    reader: R,
    file: &str,
    header: &[&str],
    build: impl Fn(Row) -> inductolink_core::Result<Part>,
    name_of: impl Fn(&Part) -> &str,
) -> Result<Vec<Part>, CatalogError>
where
    R: Read,
    Row: for<'de> Deserialize<'de>,
{
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(reader);
    let parse_err = |line: u64, message: String| CatalogError::Parse {
        file: file.to_string(),
        line,
        message,
    };

    let found = rdr
        .headers()
        .map_err(|e| parse_err(e.position().map_or(1, |p| p.line()), e.to_string()))?
        .clone();
    if found.iter().ne(header.iter().copied()) {
        return Err(CatalogError::Header {
            file: file.to_string(),
            expected: header.join(","),
            found: found.iter().collect::<Vec<_>>().join(","),
        });
    }

    let mut parts: Vec<Part> = Vec::new();
    for record in rdr.records() {
        let record =
            record.map_err(|e| parse_err(e.position().map_or(0, |p| p.line()), e.to_string()))?;
        let line = record.position().map_or(0, |p| p.line());
        let row: Row = record
            .deserialize(Some(&found))
            .map_err(|e| parse_err(line, e.to_string()))?;
        let part = build(row).map_err(|source| CatalogError::Invalid {
            file: file.to_string(),
            line,
            source,
        })?;
        if parts.iter().any(|p| name_of(p) == name_of(&part)) {
            return Err(CatalogError::Duplicate {
                file: file.to_string(),
                line,
                name: name_of(&part).to_string(),
            });
        }
        parts.push(part);
    }
    Ok(parts)
}

pub fn parse_inductors(reader: impl Read, file: &str) -> Result<Vec<InductorPart>, CatalogError> {
    parse_rows(
        reader,
        file,
        &INDUCTORS_HEADER,
        |r: InductorRow| InductorPart::new(r.name, r.l_H, r.r_ohm, r.i_max_A, r.p_max_W),
        InductorPart::name,
    )
}

pub fn parse_zeners(reader: impl Read, file: &str) -> Result<Vec<ZenerPart>, CatalogError> {
    parse_rows(
        reader,
        file,
        &ZENERS_HEADER,
        |r: ZenerRow| ZenerPart::new(r.name, r.v_z_V, r.i_zsm_A, r.t_surge_s),
        ZenerPart::name,
    )
}

pub fn parse_diodes(
    reader: impl Read,
    file: &str,
) -> Result<Vec<FreewheelDiodePart>, CatalogError> {
    parse_rows(
        reader,
        file,
        &DIODES_HEADER,
        |r: DiodeRow| FreewheelDiodePart::new(r.name, r.v_f_V, r.i_max_A, r.v_r_V, r.r_d_ohm),
        FreewheelDiodePart::name,
    )
}

fn open(dir: &Path, name: &str) -> Result<fs::File, CatalogError> {
    let path = dir.join(name);
    fs::File::open(&path).map_err(|source| CatalogError::Io { path, source })
}

/// Loads `inductors.csv`, `zeners.csv` and `diodes.csv` from `dir`.
pub fn load_catalog(dir: impl AsRef<Path>) -> Result<Catalog, CatalogError> {
    let dir = dir.as_ref();
    let display = |f: &str| dir.join(f).display().to_string();
    let inductors = parse_inductors(open(dir, INDUCTORS_FILE)?, &display(INDUCTORS_FILE))?;
    let zeners = parse_zeners(open(dir, ZENERS_FILE)?, &display(ZENERS_FILE))?;
    let diodes = parse_diodes(open(dir, DIODES_FILE)?, &display(DIODES_FILE))?;
    Ok(Catalog::new(inductors, zeners, diodes).expect("names checked per file"))
}

/// The catalog shipped with the crate: the reference coupler inductor,
/// 1N5335B and SBR20A200CTB, plus synthetic `SYN-*` entries.
pub fn bundled_catalog() -> Catalog {
    let inductors = parse_inductors(
        include_str!("../catalog/inductors.csv").as_bytes(),
        INDUCTORS_FILE,
    );
    let zeners = parse_zeners(
        include_str!("../catalog/zeners.csv").as_bytes(),
        ZENERS_FILE,
    );
    let diodes = parse_diodes(
        include_str!("../catalog/diodes.csv").as_bytes(),
        DIODES_FILE,
    );
    Catalog::new(
        inductors.expect("bundled inductors parse"),
        zeners.expect("bundled zeners parse"),
        diodes.expect("bundled diodes parse"),
    )
    .expect("bundled names are unique")
}

fn csv_err(e: csv::Error) -> std::io::Error {
    std::io::Error::other(e)
}

pub fn write_inductors(w: impl Write, parts: &[InductorPart]) -> std::io::Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(INDUCTORS_HEADER).map_err(csv_err)?;
    for p in parts {
        wtr.write_record([
            p.name().to_string(),
            p.l().to_string(),
            p.r().to_string(),
            p.i_max().to_string(),
            p.p_max().to_string(),
        ])
        .map_err(csv_err)?;
    }
    wtr.flush()
}

pub fn write_zeners(w: impl Write, parts: &[ZenerPart]) -> std::io::Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(ZENERS_HEADER).map_err(csv_err)?;
    for p in parts {
        wtr.write_record([
            p.name().to_string(),
            p.v_z().to_string(),
            p.i_zsm().to_string(),
            p.t_surge().to_string(),
        ])
        .map_err(csv_err)?;
    }
    wtr.flush()
}

pub fn write_diodes(w: impl Write, parts: &[FreewheelDiodePart]) -> std::io::Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(DIODES_HEADER).map_err(csv_err)?;
    for p in parts {
        wtr.write_record([
            p.name().to_string(),
            p.v_f().to_string(),
            p.i_max().to_string(),
            p.v_r().to_string(),
            p.r_d().to_string(),
        ])
        .map_err(csv_err)?;
    }
    wtr.flush()
}

/// Writes the three catalog files into `dir`, creating it if needed.
pub fn save_catalog(dir: impl AsRef<Path>, catalog: &Catalog) -> std::io::Result<()> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir)?;
    write_inductors(
        fs::File::create(dir.join(INDUCTORS_FILE))?,
        catalog.inductors(),
    )?;
    write_zeners(fs::File::create(dir.join(ZENERS_FILE))?, catalog.zeners())?;
    write_diodes(fs::File::create(dir.join(DIODES_FILE))?, catalog.diodes())?;
    Ok(())
}
