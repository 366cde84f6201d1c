//! TSPLIB subset: `EUC_2D` coordinates and `EXPLICIT` / `FULL_MATRIX` weights.

use std::fmt::Write as _;

use thiserror::Error;

use crate::instance::{Instance, InstanceError, Point, Weight};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TsplibError {
    #[error("line {line}: unknown keyword {keyword:?}")]
    UnknownKeyword { line: usize, keyword: String },
    #[error("missing {0}")]
    Missing(&'static str),
    #[error("line {line}: invalid {field} value {value:?}")]
    InvalidValue {
        line: usize,
        field: &'static str,
        value: String,
    },
    #[error("unsupported TYPE {0:?} (only TSP)")]
    UnsupportedType(String),
    #[error("unsupported EDGE_WEIGHT_TYPE {0:?} (supported: EUC_2D, EXPLICIT)")]
    UnsupportedWeightType(String),
    #[error("unsupported EDGE_WEIGHT_FORMAT {0:?} (supported: FULL_MATRIX)")]
    UnsupportedWeightFormat(String),
    #[error("{section} holds {found} entries, DIMENSION requires {expected}")]
    DimensionMismatch {
        section: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("node {0} listed more than once or out of range")]
    BadNodeId(usize),
    #[error(transparent)]
    Instance(#[from] InstanceError),
}

const HEADER_KEYS: [&str; 6] = [
    "NAME",
    "TYPE",
    "COMMENT",
    "DIMENSION",
    "EDGE_WEIGHT_TYPE",
    "EDGE_WEIGHT_FORMAT",
];

#[derive(Default)]
struct Header {
    name: Option<String>,
    kind: Option<String>,
    dimension: Option<usize>,
    weight_type: Option<String>,
    weight_format: Option<String>,
}

/// Numeric tokens of a data section, tagged with their line numbers.
fn section_tokens<'a>(
    lines: &mut std::iter::Peekable<impl Iterator<Item = (usize, &'a str)>>,
) -> Vec<(usize, &'a str)> {
    let mut tokens = Vec::new();
    while let Some(&(line_no, line)) = lines.peek() {
        let first = line.split_whitespace().next();
        if first.is_some_and(|t| t.starts_with(|c: char| c.is_ascii_alphabetic())) {
            break;
        }
        tokens.extend(line.split_whitespace().map(|t| (line_no, t)));
        lines.next();
    }
    tokens
}

pub fn parse_tsplib(text: &str) -> Result<Instance, TsplibError> {
    let mut header = Header::default();
    let mut coords: Option<Vec<(usize, &str)>> = None;
    let mut matrix: Option<Vec<(usize, &str)>> = None;

    let mut lines = text.lines().enumerate().map(|(k, l)| (k + 1, l)).peekable();
    while let Some((line_no, raw)) = lines.next() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = match line.split_once(':') {
            Some((k, v)) => (k.trim(), Some(v.trim())),
            None => (line, None),
        };
        match (key, value) {
            ("EOF", _) => break,
            ("NODE_COORD_SECTION", _) => coords = Some(section_tokens(&mut lines)),
            ("EDGE_WEIGHT_SECTION", _) => matrix = Some(section_tokens(&mut lines)),
            (k, Some(v)) if HEADER_KEYS.contains(&k) => match k {
                "NAME" => header.name = Some(v.to_string()),
                "TYPE" => header.kind = Some(v.to_string()),
                "COMMENT" => {}
                "DIMENSION" => {
                    header.dimension = Some(v.parse().map_err(|_| TsplibError::InvalidValue {
                        line: line_no,
                        field: "DIMENSION",
                        value: v.to_string(),
                    })?)
                }
                "EDGE_WEIGHT_TYPE" => header.weight_type = Some(v.to_string()),
                _ => header.weight_format = Some(v.to_string()),
            },
            (k, _) => {
                return Err(TsplibError::UnknownKeyword {
                    line: line_no,
                    keyword: k.to_string(),
                })
            }
        }
    }

    let kind = header.kind.ok_or(TsplibError::Missing("TYPE"))?;
    if kind != "TSP" {
        return Err(TsplibError::UnsupportedType(kind));
    }
    let n = header.dimension.ok_or(TsplibError::Missing("DIMENSION"))?;
    let name = header.name.unwrap_or_default();
    let weight_type = header
        .weight_type
        .ok_or(TsplibError::Missing("EDGE_WEIGHT_TYPE"))?;
    match weight_type.as_str() {
        "EUC_2D" => {
            let tokens = coords.ok_or(TsplibError::Missing("NODE_COORD_SECTION"))?;
            if tokens.len() != 3 * n {
                return Err(TsplibError::DimensionMismatch {
                    section: "NODE_COORD_SECTION",
                    expected: n,
                    found: tokens.len() / 3,
                });
            }
            let mut points: Vec<Option<Point>> = vec![None; n];
            for node in tokens.chunks(3) {
                let id: usize = parse_token(node[0], "node id")?;
                let x: f64 = parse_token(node[1], "x coordinate")?;
                let y: f64 = parse_token(node[2], "y coordinate")?;
                let slot = id
                    .checked_sub(1)
                    .and_then(|k| points.get_mut(k))
                    .filter(|p| p.is_none())
                    .ok_or(TsplibError::BadNodeId(id))?;
                *slot = Some(Point::new(x, y));
            }
            let points = points.into_iter().map(|p| p.expect("all ids seen")).collect();
            Ok(Instance::from_points(name, points)?)
        }
        "EXPLICIT" => {
            let format = header
                .weight_format
                .ok_or(TsplibError::Missing("EDGE_WEIGHT_FORMAT"))?;
            if format != "FULL_MATRIX" {
                return Err(TsplibError::UnsupportedWeightFormat(format));
            }
            let tokens = matrix.ok_or(TsplibError::Missing("EDGE_WEIGHT_SECTION"))?;
            if tokens.len() != n * n {
                return Err(TsplibError::DimensionMismatch {
                    section: "EDGE_WEIGHT_SECTION",
                    expected: n * n,
                    found: tokens.len(),
                });
            }
            let values = tokens
                .into_iter()
                .map(|t| parse_token::<Weight>(t, "edge weight"))
                .collect::<Result<Vec<_>, _>>()?;
            let rows: Vec<Vec<Weight>> = values.chunks(n.max(1)).map(<[Weight]>::to_vec).collect();
            if n < crate::instance::MIN_VERTICES {
                return Err(InstanceError::TooSmall(n).into());
            }
            Ok(Instance::from_matrix(name, &rows)?)
        }
        _ => Err(TsplibError::UnsupportedWeightType(weight_type)),
    }
}

fn parse_token<T: std::str::FromStr>(
    (line, token): (usize, &str),
    field: &'static str,
) -> Result<T, TsplibError> {
    token.parse().map_err(|_| TsplibError::InvalidValue {
        line,
        field,
        value: token.to_string(),
    })
}

/// `EXPLICIT` / `FULL_MATRIX` text. Absent arcs are written as `beta`, so they
/// read back as ordinary arcs.
pub fn emit_tsplib(inst: &Instance) -> String {
    let n = inst.n();
    let mut out = String::new();
    writeln!(out, "NAME: {}", inst.name()).unwrap();
    writeln!(out, "TYPE: TSP").unwrap();
    if inst.has_absent_arcs() {
        writeln!(out, "COMMENT: absent arcs written as beta = {}", inst.beta()).unwrap();
    }
    writeln!(out, "DIMENSION: {n}").unwrap();
    writeln!(out, "EDGE_WEIGHT_TYPE: EXPLICIT").unwrap();
    writeln!(out, "EDGE_WEIGHT_FORMAT: FULL_MATRIX").unwrap();
    writeln!(out, "EDGE_WEIGHT_SECTION").unwrap();
    for i in 0..n {
        let row: Vec<String> = (0..n)
            .map(|j| if i == j { 0 } else { inst.weight(i, j) }.to_string())
            .collect();
        writeln!(out, "{}", row.join(" ")).unwrap();
    }
    writeln!(out, "EOF").unwrap();
    out
}

/// `EUC_2D` text for instances built from coordinates.
pub fn emit_tsplib_coords(inst: &Instance) -> Option<String> {
    let points = inst.points()?;
    let mut out = String::new();
    writeln!(out, "NAME: {}", inst.name()).unwrap();
    writeln!(out, "TYPE: TSP").unwrap();
    writeln!(out, "DIMENSION: {}", inst.n()).unwrap();
    writeln!(out, "EDGE_WEIGHT_TYPE: EUC_2D").unwrap();
    writeln!(out, "NODE_COORD_SECTION").unwrap();
    for (k, p) in points.iter().enumerate() {
        writeln!(out, "{} {} {}", k + 1, p.x, p.y).unwrap();
    }
    writeln!(out, "EOF").unwrap();
    Some(out)
}
