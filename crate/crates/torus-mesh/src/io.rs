//! Plain-text interchange format for periodic meshes ("pmesh").
//!
//! ```text
//! # comment lines and blank lines are ignored
//! pmesh <V> <F> [exact]
//! <x> <y> <z>                  -- V vertex lines, decimal or p/q rationals
//! <i> <j> <k>  <w_ij> <w_jk> <w_ki>   -- F face lines; each w is 3 ints
//! ```
//!
//! With the `exact` flag every coordinate must be a rational `p/q` (or a
//! bare integer); the mesh then carries exact coordinates alongside the
//! floats.  Floats are written with 17 significant digits, so a
//! save/load round trip is bit-exact.  Loading always runs the full
//! structural validation.

use std::io::{BufRead, Write};

use num::rational::Rational64;

use crate::{Face, MeshError, TorusMesh};

fn parse_err(line: usize, msg: impl Into<String>) -> MeshError {
    MeshError::Parse {
        line,
        msg: msg.into(),
    }
}

fn parse_coord(tok: &str, line: usize, exact: bool) -> Result<(f64, Rational64), MeshError> {
    if let Some((p, q)) = tok.split_once('/') {
        let p: i64 = p
            .parse()
            .map_err(|_| parse_err(line, format!("bad rational numerator '{p}'")))?;
        let q: i64 = q
            .parse()
            .map_err(|_| parse_err(line, format!("bad rational denominator '{q}'")))?;
        if q == 0 {
            return Err(parse_err(line, "rational with zero denominator"));
        }
        let r = Rational64::new(p, q);
        Ok((*r.numer() as f64 / *r.denom() as f64, r))
    } else if let Ok(i) = tok.parse::<i64>() {
        Ok((i as f64, Rational64::from_integer(i)))
    } else if exact {
        Err(parse_err(
            line,
            format!("exact mesh requires rational coordinates, got '{tok}'"),
        ))
    } else {
        let f: f64 = tok
            .parse()
            .map_err(|_| parse_err(line, format!("bad coordinate '{tok}'")))?;
        Ok((f, Rational64::from_integer(0)))
    }
}

/// Load and validate a pmesh stream.
pub fn load_pmesh(reader: impl BufRead) -> Result<TorusMesh, MeshError> {
    // Non-empty payload lines with 1-based line numbers, comments stripped.
    let mut rows: Vec<(usize, Vec<String>)> = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let body = line.split('#').next().unwrap_or("");
        let toks: Vec<String> = body.split_whitespace().map(str::to_string).collect();
        if !toks.is_empty() {
            rows.push((i + 1, toks));
        }
    }
    let mut rows = rows.into_iter();

    let (hline, header) = rows
        .next()
        .ok_or_else(|| parse_err(0, "empty file, expected 'pmesh <V> <F>' header"))?;
    if header[0] != "pmesh" || header.len() < 3 || header.len() > 4 {
        return Err(parse_err(hline, "expected header 'pmesh <V> <F> [exact]'"));
    }
    let nv: usize = header[1]
        .parse()
        .map_err(|_| parse_err(hline, "bad vertex count"))?;
    let nf: usize = header[2]
        .parse()
        .map_err(|_| parse_err(hline, "bad face count"))?;
    let exact = match header.get(3).map(String::as_str) {
        None => false,
        Some("exact") => true,
        Some(other) => return Err(parse_err(hline, format!("unknown header flag '{other}'"))),
    };

    let mut mesh = TorusMesh {
        vertices: Vec::with_capacity(nv),
        faces: Vec::with_capacity(nf),
        exact: exact.then(|| Vec::with_capacity(nv)),
    };
    for _ in 0..nv {
        let (ln, toks) = rows
            .next()
            .ok_or_else(|| parse_err(0, format!("expected {nv} vertex lines")))?;
        if toks.len() != 3 {
            return Err(parse_err(ln, "vertex line needs exactly 3 coordinates"));
        }
        let mut pos = [0.0f64; 3];
        let mut rat = [Rational64::from_integer(0); 3];
        for a in 0..3 {
            let (f, r) = parse_coord(&toks[a], ln, exact)?;
            pos[a] = f;
            rat[a] = r;
        }
        mesh.vertices.push(pos);
        if let Some(ex) = mesh.exact.as_mut() {
            ex.push(rat);
        }
    }
    for _ in 0..nf {
        let (ln, toks) = rows
            .next()
            .ok_or_else(|| parse_err(0, format!("expected {nf} face lines")))?;
        if toks.len() != 12 {
            return Err(parse_err(
                ln,
                "face line needs 3 indices and 3 wrap vectors (12 numbers)",
            ));
        }
        let mut nums = [0i64; 12];
        for (a, t) in toks.iter().enumerate() {
            nums[a] = t
                .parse()
                .map_err(|_| parse_err(ln, format!("bad integer '{t}'")))?;
        }
        let idx = |x: i64| -> Result<usize, MeshError> {
            usize::try_from(x).map_err(|_| parse_err(ln, format!("negative vertex index {x}")))
        };
        mesh.faces.push(Face {
            v: [idx(nums[0])?, idx(nums[1])?, idx(nums[2])?],
            wrap: [
                [nums[3], nums[4], nums[5]],
                [nums[6], nums[7], nums[8]],
                [nums[9], nums[10], nums[11]],
            ],
        });
    }
    if let Some((ln, _)) = rows.next() {
        return Err(parse_err(ln, "trailing content after the declared faces"));
    }
    mesh.validate()?;
    Ok(mesh)
}

/// Write a mesh in pmesh format (see the module docs).  Exact meshes are
/// written as rationals and flagged `exact`; floats are written with 17
/// significant digits for bit-exact round trips.
pub fn save_pmesh(mesh: &TorusMesh, mut w: impl Write) -> std::io::Result<()> {
    match &mesh.exact {
        Some(exact) => {
            writeln!(w, "pmesh {} {} exact", mesh.vertices.len(), mesh.faces.len())?;
            for q in exact {
                writeln!(
                    w,
                    "{}/{} {}/{} {}/{}",
                    q[0].numer(),
                    q[0].denom(),
                    q[1].numer(),
                    q[1].denom(),
                    q[2].numer(),
                    q[2].denom()
                )?;
            }
        }
        None => {
            writeln!(w, "pmesh {} {}", mesh.vertices.len(), mesh.faces.len())?;
            for p in &mesh.vertices {
                writeln!(w, "{:.17e} {:.17e} {:.17e}", p[0], p[1], p[2])?;
            }
        }
    }
    for f in &mesh.faces {
        writeln!(
            w,
            "{} {} {}  {} {} {}  {} {} {}  {} {} {}",
            f.v[0],
            f.v[1],
            f.v[2],
            f.wrap[0][0],
            f.wrap[0][1],
            f.wrap[0][2],
            f.wrap[1][0],
            f.wrap[1][1],
            f.wrap[1][2],
            f.wrap[2][0],
            f.wrap[2][1],
            f.wrap[2][2]
        )?;
    }
    Ok(())
}

impl TorusMesh {
    /// See [`save_pmesh`].
    pub fn save_pmesh(&self, w: impl Write) -> std::io::Result<()> {
        save_pmesh(self, w)
    }
}
