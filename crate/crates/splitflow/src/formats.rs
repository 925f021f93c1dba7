//! Text formats: scheme files and trajectory CSV.
//!
//! A scheme file starts with `# dim=<N> order=<p> label=<text>` followed by
//! one factor per line, `coord re im`, in application order. Blank lines and
//! further `#` lines are ignored.

use std::io::{BufRead, BufReader, Read, Write};

use splitflow_core::{Complex64, Factor, Scheme, Trajectory};

use crate::error::{Error, Result};

/// Scientific notation with 17 significant digits, enough to round-trip any
/// `f64`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_scheme<W: Write>(s: &Scheme, mut out: W) -> Result<()> {
    writeln!(
        out,
        "# dim={} order={} label={}",
        s.dim(),
        s.declared_order(),
        s.label()
    )?;
    for f in s.factors() {
        writeln!(
            out,
            "{} {} {}",
            f.coord,
            fmt_f64(f.coeff.re),
            fmt_f64(f.coeff.im)
        )?;
    }
    Ok(())
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn parse_header(line: usize, text: &str) -> Result<(usize, u32, String)> {
    let body = text
        .strip_prefix('#')
        .ok_or_else(|| parse_err(line, "expected `# dim=<N> order=<p> label=<text>`"))?
        .trim();
    let (mut dim, mut order, mut label) = (None, None, None);
    let mut rest = body;
    while !rest.is_empty() {
        let (key, after) = rest
            .split_once('=')
            .ok_or_else(|| parse_err(line, format!("malformed header field `{rest}`")))?;
        let key = key.trim();
        if key == "label" {
            // the label runs to the end of the line
            label = Some(after.trim().to_string());
            break;
        }
        let (value, next) = after.split_once(char::is_whitespace).unwrap_or((after, ""));
        match key {
            "dim" => {
                dim = Some(
                    value
                        .parse()
                        .map_err(|_| parse_err(line, format!("bad dim `{value}`")))?,
                )
            }
            "order" => {
                order = Some(
                    value
                        .parse()
                        .map_err(|_| parse_err(line, format!("bad order `{value}`")))?,
                )
            }
            other => return Err(parse_err(line, format!("unknown header field `{other}`"))),
        }
        rest = next.trim_start();
    }
    Ok((
        dim.ok_or_else(|| parse_err(line, "header lacks dim"))?,
        order.ok_or_else(|| parse_err(line, "header lacks order"))?,
        label.unwrap_or_default(),
    ))
}

fn parse_f64(line: usize, s: &str) -> Result<f64> {
    s.parse()
        .map_err(|_| parse_err(line, format!("bad number `{s}`")))
}

/// Reads a scheme file. The factor list is taken as written; call
/// [`Scheme::validate`] to check that it is merged and consistent.
pub fn read_scheme<R: Read>(input: R) -> Result<Scheme> {
    let mut header = None;
    let mut factors = Vec::new();
    for (idx, line) in BufReader::new(input).lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let text = line.trim();
        if text.is_empty() {
            continue;
        }
        if header.is_none() {
            header = Some(parse_header(line_no, text)?);
            continue;
        }
        if text.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = text.split_whitespace().collect();
        let [coord, re, im] = fields[..] else {
            return Err(parse_err(
                line_no,
                format!("expected `coord re im`, got {} fields", fields.len()),
            ));
        };
        let coord = coord
            .parse()
            .map_err(|_| parse_err(line_no, format!("bad coordinate `{coord}`")))?;
        let coeff = Complex64::new(parse_f64(line_no, re)?, parse_f64(line_no, im)?);
        factors.push(Factor::new(coord, coeff));
    }
    let (dim, order, label) = header.ok_or_else(|| parse_err(1, "empty scheme file"))?;
    Ok(Scheme::new(dim, factors, order, label)?)
}

/// Writes `t,u1,...,uN` rows, one per recorded grid point.
pub fn write_trajectory_csv<W: Write>(traj: &Trajectory, out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    let dim = traj.dim();
    let mut header = vec!["t".to_string()];
    header.extend((1..=dim).map(|i| format!("u{i}")));
    w.write_record(&header)?;
    for (t, u) in traj.times.iter().zip(&traj.states) {
        let mut row = vec![fmt_f64(*t)];
        row.extend(u.iter().map(|&x| fmt_f64(x)));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a trajectory CSV back into `(times, states)`.
pub fn read_trajectory_csv<R: Read>(input: R) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers()?.clone();
    let dim = header.len().saturating_sub(1);
    if header.get(0) != Some("t") || (1..=dim).any(|i| header.get(i) != Some(&format!("u{i}")[..]))
    {
        return Err(parse_err(1, "expected header `t,u1,...,uN`"));
    }
    let mut times = Vec::new();
    let mut states = Vec::new();
    for (idx, rec) in r.records().enumerate() {
        let rec = rec?;
        let line = idx + 2;
        let vals = rec
            .iter()
            .map(|f| parse_f64(line, f))
            .collect::<Result<Vec<f64>>>()?;
        times.push(vals[0]);
        states.push(vals[1..].to_vec());
    }
    Ok((times, states))
}
