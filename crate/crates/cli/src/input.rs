//! Readers for the problem, constraint, clique and graph files.

use std::path::Path;

use regsos::poly::Polynomial;
use regsos::poly::{parse_polynomial, parse_polynomial_sections};

use crate::args::{Kind, ProblemArgs};
use crate::error::{CliError, CliResult};

/// A problem as read from disk, before any relaxation is built.
#[derive(Clone, Debug)]
pub struct Problem {
    pub kind: Kind,
    pub f: Polynomial,
    pub g: Vec<Polynomial>,
    pub order: Option<u32>,
    /// 0-indexed variable sets.
    pub cliques: Option<Vec<Vec<usize>>>,
}

/// A simple undirected graph on vertices `0..n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
}

pub fn read_text(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|source| CliError::Read { path: path.to_path_buf(), source })
}

pub fn read_polynomial(path: &Path) -> CliResult<Polynomial> {
    parse_polynomial(&read_text(path)?).map_err(|source| CliError::Parse { path: path.to_path_buf(), source })
}

pub fn read_constraints(path: &Path) -> CliResult<Vec<Polynomial>> {
    parse_polynomial_sections(&read_text(path)?).map_err(|source| CliError::Parse { path: path.to_path_buf(), source })
}

pub fn read_problem(args: &ProblemArgs) -> CliResult<Problem> {
    let f = read_polynomial(&args.poly)?;
    let g = match &args.constraints {
        Some(p) => read_constraints(p)?,
        None => Vec::new(),
    };
    match args.kind {
        Kind::Unconstrained | Kind::Homogeneous if !g.is_empty() => {
            return Err(CliError::Input(format!("--kind {:?} takes no constraints", args.kind).to_lowercase()));
        }
        Kind::Constrained if g.is_empty() => {
            return Err(CliError::Input("--kind constrained needs --constraints".into()));
        }
        _ => {}
    }
    for (i, gi) in g.iter().enumerate() {
        if gi.nvars() != f.nvars() {
            return Err(CliError::Input(format!(
                "constraint {} has {} variables, the objective has {}",
                i + 1,
                gi.nvars(),
                f.nvars()
            )));
        }
    }
    let cliques = match (&args.cliques, args.kind) {
        (Some(p), Kind::Sparse) => Some(parse_cliques(&read_text(p)?, f.nvars()).map_err(|e| at(p, e))?),
        (Some(_), _) => return Err(CliError::Input("--cliques only applies to --kind sparse".into())),
        (None, _) => None,
    };
    Ok(Problem { kind: args.kind, f, g, order: args.order, cliques })
}

fn at(path: &Path, e: CliError) -> CliError {
    match e {
        CliError::Input(m) => CliError::Input(format!("{}: {m}", path.display())),
        e => e,
    }
}

/// Lines that are neither blank nor comments, with 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn parse_index(tok: &str, line: usize, n: usize) -> CliResult<usize> {
    let v: usize =
        tok.parse().map_err(|_| CliError::Input(format!("line {line}: expected a vertex index, found {tok:?}")))?;
    if v == 0 || v > n {
        return Err(CliError::Input(format!("line {line}: index {v} outside 1..={n}")));
    }
    Ok(v - 1)
}

/// One clique per line, 1-indexed variables.
pub fn parse_cliques(text: &str, n: usize) -> CliResult<Vec<Vec<usize>>> {
    let mut out = Vec::new();
    for (line, l) in content_lines(text) {
        let mut c = l.split_whitespace().map(|t| parse_index(t, line, n)).collect::<CliResult<Vec<_>>>()?;
        c.sort_unstable();
        c.dedup();
        out.push(c);
    }
    if out.is_empty() {
        return Err(CliError::Input("clique file lists no cliques".into()));
    }
    Ok(out)
}

/// First line `n`, then `u v` per line, 1-indexed.
pub fn parse_graph(text: &str) -> CliResult<Graph> {
    let mut lines = content_lines(text);
    let (line, first) = lines.next().ok_or_else(|| CliError::Input("graph file is empty".into()))?;
    let n: usize = first
        .parse()
        .map_err(|_| CliError::Input(format!("line {line}: expected the vertex count, found {first:?}")))?;
    if n == 0 {
        return Err(CliError::Input(format!("line {line}: graph has no vertices")));
    }
    let mut edges = Vec::new();
    for (line, l) in lines {
        let toks: Vec<&str> = l.split_whitespace().collect();
        if toks.len() != 2 {
            return Err(CliError::Input(format!("line {line}: expected `u v`, found {l:?}")));
        }
        edges.push((parse_index(toks[0], line, n)?, parse_index(toks[1], line, n)?));
    }
    Ok(Graph { n, edges })
}

pub fn read_graph(path: &Path) -> CliResult<Graph> {
    parse_graph(&read_text(path)?).map_err(|e| at(path, e))
}
