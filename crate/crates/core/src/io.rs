//! Line-oriented text formats for groups with irreps, skeletal categories,
//! tensor structures and group cocycles.
//!
//! `#` starts a comment; blank lines are ignored. Matrix entries use the
//! cyclotomic literal syntax and are separated by whitespace.

use std::collections::HashMap;
use std::fmt::Write as _;

use num_integer::Integer;
use thiserror::Error;

use crate::cyclotomic::{make_context, CycloContext, CycloError, CycloNumber};
use crate::fusion::{FusionError, Quad, SkeletalCategory};
use crate::groups::{
    parse_cycles, FiniteGroup, FusionTable, GroupError, Irrep, DEFAULT_CLOSURE_BOUND,
};
use crate::linalg::{split_entries, ExactMatrix};
use crate::solver::{SolverError, TensorStructure};
use crate::verify::{GroupCocycle, VerifyError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IoError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("unexpected end of input: {0}")]
    Eof(String),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Fusion(#[from] FusionError),
    #[error(transparent)]
    Cyclo(#[from] CycloError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Verify(#[from] VerifyError),
}

/// Non-empty lines with comments removed, paired with 1-based line numbers.
pub(crate) struct Lines<'a> {
    items: Vec<(usize, &'a str)>,
    pos: usize,
}

impl<'a> Lines<'a> {
    pub(crate) fn new(text: &'a str) -> Self {
        let items = text
            .lines()
            .enumerate()
            .filter_map(|(i, l)| {
                let l = l.split('#').next().unwrap_or("").trim();
                (!l.is_empty()).then_some((i + 1, l))
            })
            .collect();
        Lines { items, pos: 0 }
    }

    pub(crate) fn peek(&self) -> Option<(usize, &'a str)> {
        self.items.get(self.pos).copied()
    }

    pub(crate) fn next_line(&mut self, what: &str) -> Result<(usize, &'a str), IoError> {
        let l = self.peek().ok_or_else(|| IoError::Eof(what.to_string()))?;
        self.pos += 1;
        Ok(l)
    }

    pub(crate) fn is_done(&self) -> bool {
        self.pos >= self.items.len()
    }
}

pub(crate) fn syntax(line: usize, msg: impl Into<String>) -> IoError {
    IoError::Syntax {
        line,
        msg: msg.into(),
    }
}

/// `keyword a=1 b=2` into its keyword, positional words and key-value pairs.
pub(crate) fn header(line: &str) -> (&str, Vec<&str>, HashMap<&str, &str>) {
    let mut words = line.split_whitespace();
    let kw = words.next().unwrap_or("");
    let mut pos = Vec::new();
    let mut kv = HashMap::new();
    for w in words {
        match w.split_once('=') {
            Some((k, v)) => {
                kv.insert(k, v);
            }
            None => pos.push(w),
        }
    }
    (kw, pos, kv)
}

fn number<T: std::str::FromStr>(line: usize, s: Option<&&str>, what: &str) -> Result<T, IoError> {
    s.ok_or_else(|| syntax(line, format!("missing {what}")))?
        .parse()
        .map_err(|_| syntax(line, format!("bad {what}")))
}

pub(crate) fn read_matrix(
    lines: &mut Lines,
    ctx: &'static CycloContext,
    rows: usize,
    cols: usize,
) -> Result<ExactMatrix, IoError> {
    let mut m = ExactMatrix::zeros(ctx, rows, cols);
    for i in 0..rows {
        let (ln, l) = lines.next_line("matrix row")?;
        let entries = split_entries(l);
        if entries.len() != cols {
            return Err(syntax(
                ln,
                format!("expected {cols} entries, found {}", entries.len()),
            ));
        }
        for (j, e) in entries.iter().enumerate() {
            m[(i, j)] = CycloNumber::parse(ctx, e).map_err(|err| syntax(ln, err.to_string()))?;
        }
    }
    Ok(m)
}

pub(crate) fn write_matrix(out: &mut String, m: &ExactMatrix) {
    for i in 0..m.rows() {
        let row: Vec<String> = m.row(i).iter().map(ToString::to_string).collect();
        let _ = writeln!(out, "{}", row.join(" "));
    }
}

/// A group with an optional list of irreps, as read from a group file.
#[derive(Debug, Clone)]
pub struct GroupFile {
    pub group: FiniteGroup,
    pub irreps: Vec<Irrep>,
}

/// Reads `group name=.. [order=n]` followed by table rows (when `order` is
/// given) and a `generators` section, then any number of `irrep` blocks.
/// All irreps are embedded into the least common conductor.
pub fn parse_group_file(text: &str) -> Result<GroupFile, IoError> {
    let mut lines = Lines::new(text);
    let (ln, l) = lines.next_line("group header")?;
    let (kw, _, kv) = header(l);
    if kw != "group" {
        return Err(syntax(ln, "expected `group`"));
    }
    let name = kv.get("name").copied().unwrap_or("group").to_string();
    let order: Option<usize> = kv
        .get("order")
        .map(|_| number(ln, kv.get("order"), "order"))
        .transpose()?;
    let mut table = Vec::new();
    if let Some(n) = order {
        let (tl, t) = lines.next_line("table")?;
        if t != "table" {
            return Err(syntax(tl, "expected `table`"));
        }
        for _ in 0..n {
            let (rl, r) = lines.next_line("table row")?;
            let row = r
                .split_whitespace()
                .map(|x| {
                    x.parse::<usize>()
                        .map_err(|_| syntax(rl, "bad table entry"))
                })
                .collect::<Result<Vec<_>, _>>()?;
            table.push(row);
        }
    }
    let (gl, g) = lines.next_line("generators")?;
    if g != "generators" {
        return Err(syntax(gl, "expected `generators`"));
    }
    let mut gens: Vec<(usize, String, String)> = Vec::new();
    while let Some((l, s)) = lines.peek() {
        if s.starts_with("irrep ") {
            break;
        }
        lines.pos += 1;
        let (n, v) = s
            .split_once('=')
            .ok_or_else(|| syntax(l, "expected `name = value`"))?;
        gens.push((l, n.trim().to_string(), v.trim().to_string()));
    }
    let group = if order.is_some() {
        let named = gens
            .iter()
            .map(|(l, n, v)| {
                Ok((
                    n.clone(),
                    v.parse::<usize>()
                        .map_err(|_| syntax(*l, "bad generator index"))?,
                ))
            })
            .collect::<Result<Vec<_>, IoError>>()?;
        FiniteGroup::from_table(&name, table, named)?
    } else {
        let perms = gens
            .iter()
            .map(|(l, n, v)| {
                Ok((
                    n.clone(),
                    parse_cycles(v).map_err(|e| syntax(*l, e.to_string()))?,
                ))
            })
            .collect::<Result<Vec<_>, IoError>>()?;
        FiniteGroup::from_permutations(&name, &perms, DEFAULT_CLOSURE_BOUND)?
    };

    let mut raw = Vec::new();
    while !lines.is_done() {
        let (il, h) = lines.next_line("irrep")?;
        let (kw, pos, kv) = header(h);
        if kw != "irrep" || pos.len() != 1 {
            return Err(syntax(il, "expected `irrep <label> dim=<d> conductor=<N>`"));
        }
        let dim: usize = number(il, kv.get("dim"), "dim")?;
        let conductor: u32 = number(il, kv.get("conductor"), "conductor")?;
        let ctx = make_context(conductor)?;
        let mut mats = Vec::new();
        for (gname, _) in group.generators() {
            let (ml, m) = lines.next_line("generator matrix")?;
            let (head, inline) = match m.split_once('=') {
                Some((h, v)) => (h.trim(), Some(v.trim())),
                None => (m, None),
            };
            if head != gname {
                return Err(syntax(ml, format!("expected generator `{gname}`")));
            }
            let mat = match inline {
                Some(v) if dim == 1 => ExactMatrix::scalar(
                    CycloNumber::parse(ctx, v).map_err(|e| syntax(ml, e.to_string()))?,
                ),
                Some(_) => return Err(syntax(ml, "inline value only allowed in dimension 1")),
                None => read_matrix(&mut lines, ctx, dim, dim)?,
            };
            mats.push(mat);
        }
        raw.push((il, pos[0].to_string(), conductor, mats));
    }
    let conductor = raw.iter().fold(1u32, |acc, r| acc.lcm(&r.2));
    let ctx = make_context(conductor)?;
    let irreps = raw
        .into_iter()
        .map(|(il, label, _, mats)| {
            let mats = mats
                .iter()
                .map(|m| m.embed(ctx).map_err(|e| syntax(il, e.to_string())))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Irrep::from_generators(&group, &label, ctx, &mats)?)
        })
        .collect::<Result<Vec<_>, IoError>>()?;
    Ok(GroupFile { group, irreps })
}

/// Table form of a group plus its irreps on the generators.
pub fn write_group_file(group: &FiniteGroup, irreps: &[Irrep]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "group name={} order={}", group.name(), group.order());
    out.push_str("table\n");
    for row in group.table_rows() {
        let row: Vec<String> = row.iter().map(ToString::to_string).collect();
        let _ = writeln!(out, "{}", row.join(" "));
    }
    out.push_str("generators\n");
    for (n, g) in group.generators() {
        let _ = writeln!(out, "{n} = {g}");
    }
    for r in irreps {
        let _ = writeln!(
            out,
            "\nirrep {} dim={} conductor={}",
            r.label,
            r.dim(),
            r.context().conductor()
        );
        for (n, g) in group.generators() {
            let m = r.matrix(*g);
            if r.dim() == 1 {
                let _ = writeln!(out, "{n} = {}", m[(0, 0)]);
            } else {
                let _ = writeln!(out, "{n}");
                write_matrix(&mut out, m);
            }
        }
    }
    out
}

/// Reads `skeletal name=.. conductor=N`, a `fusion` section with `labels`,
/// `unit` and `x y z n` lines, and an `assoc` section of `F x y z w` blocks.
/// One-by-one blocks may be written inline as `F x y z w = value`.
pub fn parse_skeletal_file(text: &str) -> Result<SkeletalCategory, IoError> {
    let mut lines = Lines::new(text);
    let (ln, l) = lines.next_line("skeletal header")?;
    let (kw, _, kv) = header(l);
    if kw != "skeletal" {
        return Err(syntax(ln, "expected `skeletal`"));
    }
    let name = kv.get("name").copied().unwrap_or("skeletal").to_string();
    let ctx = make_context(number(ln, kv.get("conductor"), "conductor")?)?;
    let (fl, f) = lines.next_line("fusion")?;
    if f != "fusion" {
        return Err(syntax(fl, "expected `fusion`"));
    }
    let (ll, labels_line) = lines.next_line("labels")?;
    let labels: Vec<String> = match labels_line.strip_prefix("labels ") {
        Some(rest) => rest.split_whitespace().map(String::from).collect(),
        None => return Err(syntax(ll, "expected `labels ...`")),
    };
    let index: HashMap<&str, usize> = labels
        .iter()
        .enumerate()
        .map(|(i, s)| (s.as_str(), i))
        .collect();
    let lookup = |line: usize, s: &str| {
        index
            .get(s)
            .copied()
            .ok_or_else(|| syntax(line, format!("unknown label `{s}`")))
    };
    let (ul, unit_line) = lines.next_line("unit")?;
    let unit = match unit_line.strip_prefix("unit ") {
        Some(u) => lookup(ul, u.trim())?,
        None => return Err(syntax(ul, "expected `unit <label>`")),
    };
    let k = labels.len();
    let mut mult = vec![0u32; k * k * k];
    loop {
        let (nl, s) = lines.next_line("assoc")?;
        if s == "assoc" {
            break;
        }
        let w: Vec<&str> = s.split_whitespace().collect();
        if w.len() != 4 {
            return Err(syntax(nl, "expected `x y z n`"));
        }
        let (x, y, z) = (lookup(nl, w[0])?, lookup(nl, w[1])?, lookup(nl, w[2])?);
        mult[(x * k + y) * k + z] = w[3].parse().map_err(|_| syntax(nl, "bad multiplicity"))?;
    }
    let fusion = FusionTable::new(labels.clone(), Vec::new(), mult);
    let mut fmap: HashMap<Quad, ExactMatrix> = HashMap::new();
    while !lines.is_done() {
        let (bl, s) = lines.next_line("F block")?;
        let (head, inline) = match s.split_once('=') {
            Some((h, v)) => (h.trim(), Some(v.trim())),
            None => (s, None),
        };
        let w: Vec<&str> = head.split_whitespace().collect();
        if w.len() != 5 || w[0] != "F" {
            return Err(syntax(bl, "expected `F x y z w`"));
        }
        let q = (
            lookup(bl, w[1])?,
            lookup(bl, w[2])?,
            lookup(bl, w[3])?,
            lookup(bl, w[4])?,
        );
        let size: usize = (0..k)
            .map(|u| (fusion.get(q.0, q.1, u) * fusion.get(u, q.2, q.3)) as usize)
            .sum();
        let m = match inline {
            Some(v) if size == 1 => ExactMatrix::scalar(
                CycloNumber::parse(ctx, v).map_err(|e| syntax(bl, e.to_string()))?,
            ),
            Some(_) => return Err(syntax(bl, "inline value needs a 1x1 block")),
            None => read_matrix(&mut lines, ctx, size, size)?,
        };
        if fmap.insert(q, m).is_some() {
            return Err(syntax(bl, "duplicate F block"));
        }
    }
    Ok(SkeletalCategory::new(&name, fusion, unit, ctx, fmap)?)
}

pub fn write_skeletal_file(cat: &SkeletalCategory) -> String {
    let mut out = String::new();
    let l = cat.labels();
    let _ = writeln!(
        out,
        "skeletal name={} conductor={}",
        cat.name,
        cat.context().conductor()
    );
    out.push_str("fusion\n");
    let _ = writeln!(out, "labels {}", l.join(" "));
    let _ = writeln!(out, "unit {}", l[cat.unit]);
    let k = cat.rank();
    for x in 0..k {
        for y in 0..k {
            for z in 0..k {
                let n = cat.n(x, y, z);
                if n > 0 {
                    let _ = writeln!(out, "{} {} {} {n}", l[x], l[y], l[z]);
                }
            }
        }
    }
    out.push_str("assoc\n");
    for ((x, y, z, w), m) in cat.f_matrices() {
        if m.rows() == 1 {
            let _ = writeln!(out, "F {} {} {} {} = {}", l[x], l[y], l[z], l[w], m[(0, 0)]);
        } else {
            let _ = writeln!(out, "F {} {} {} {}", l[x], l[y], l[z], l[w]);
            write_matrix(&mut out, m);
        }
    }
    out
}

/// `tensor input=<name> conductor=N`, then `J x y z = v` for scalar channels
/// and `J x y z` followed by matrix rows otherwise. Unit channels are omitted.
pub fn write_tensor_file(cat: &SkeletalCategory, j: &TensorStructure) -> String {
    let mut out = String::new();
    let l = cat.labels();
    let _ = writeln!(
        out,
        "tensor input={} conductor={}",
        cat.name,
        j.context().conductor()
    );
    for (&(x, y, z), m) in j.channels() {
        if x == cat.unit || y == cat.unit {
            continue;
        }
        if m.rows() == 1 {
            let _ = writeln!(out, "J {} {} {} = {}", l[x], l[y], l[z], m[(0, 0)]);
        } else {
            let _ = writeln!(out, "J {} {} {}", l[x], l[y], l[z]);
            write_matrix(&mut out, m);
        }
    }
    out
}

pub fn parse_tensor_file(text: &str, cat: &SkeletalCategory) -> Result<TensorStructure, IoError> {
    let mut lines = Lines::new(text);
    let (ln, l) = lines.next_line("tensor header")?;
    let (kw, _, kv) = header(l);
    if kw != "tensor" {
        return Err(syntax(ln, "expected `tensor`"));
    }
    let n: u32 = number(ln, kv.get("conductor"), "conductor")?;
    let ctx = make_context(n.lcm(&cat.context().conductor()))?;
    let labels = cat.labels();
    let lookup = |line: usize, s: &str| {
        labels
            .iter()
            .position(|x| x == s)
            .ok_or_else(|| syntax(line, format!("unknown label `{s}`")))
    };
    let mut channels: std::collections::BTreeMap<_, _> = TensorStructure::identity(cat)
        .embed(ctx)?
        .channels()
        .map(|(c, m)| (*c, m.clone()))
        .collect();
    let mut seen = std::collections::HashSet::new();
    while !lines.is_done() {
        let (bl, s) = lines.next_line("J block")?;
        let (head, inline) = match s.split_once('=') {
            Some((h, v)) => (h.trim(), Some(v.trim())),
            None => (s, None),
        };
        let w: Vec<&str> = head.split_whitespace().collect();
        if w.len() != 4 || w[0] != "J" {
            return Err(syntax(bl, "expected `J x y z`"));
        }
        let c = (lookup(bl, w[1])?, lookup(bl, w[2])?, lookup(bl, w[3])?);
        let size = cat.n(c.0, c.1, c.2);
        if size == 0 || c.0 == cat.unit || c.1 == cat.unit {
            return Err(syntax(bl, "not a free fusion channel"));
        }
        let m = match inline {
            Some(v) if size == 1 => ExactMatrix::scalar(
                CycloNumber::parse(ctx, v).map_err(|e| syntax(bl, e.to_string()))?,
            ),
            Some(_) => return Err(syntax(bl, "inline value needs a 1x1 block")),
            None => read_matrix(&mut lines, ctx, size, size)?,
        };
        if !seen.insert(c) {
            return Err(syntax(bl, "duplicate channel"));
        }
        channels.insert(c, m);
    }
    Ok(TensorStructure::new(cat, channels)?)
}

/// `cocycle group=<name> conductor=N`, then `g h value` for every nonzero coefficient.
pub fn write_cocycle_file(omega: &GroupCocycle) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "cocycle group={} conductor={}",
        omega.group,
        omega.context().conductor()
    );
    for (g, h, v) in omega.support() {
        let _ = writeln!(out, "{g} {h} {v}");
    }
    out
}

/// Reads a cocycle over `group`; the header's group name must match.
pub fn parse_cocycle_file(text: &str, group: &FiniteGroup) -> Result<GroupCocycle, IoError> {
    let mut lines = Lines::new(text);
    let (ln, l) = lines.next_line("cocycle header")?;
    let (kw, _, kv) = header(l);
    if kw != "cocycle" {
        return Err(syntax(ln, "expected `cocycle`"));
    }
    if let Some(name) = kv.get("group") {
        if *name != group.name() {
            return Err(syntax(
                ln,
                format!("cocycle is over `{name}`, not `{}`", group.name()),
            ));
        }
    }
    let ctx = make_context(
        kv.get("conductor")
            .map_or(Ok(1), |_| number(ln, kv.get("conductor"), "conductor"))?,
    )?;
    let n = group.order();
    let mut values = vec![CycloNumber::zero(ctx); n * n];
    while !lines.is_done() {
        let (el, s) = lines.next_line("coefficient")?;
        let w = split_entries(s);
        if w.len() != 3 {
            return Err(syntax(el, "expected `g h value`"));
        }
        let g: usize = w[0].parse().map_err(|_| syntax(el, "bad element index"))?;
        let h: usize = w[1].parse().map_err(|_| syntax(el, "bad element index"))?;
        if g >= n || h >= n {
            return Err(syntax(
                el,
                format!("element index out of range for order {n}"),
            ));
        }
        values[g * n + h] = CycloNumber::parse(ctx, w[2]).map_err(|e| syntax(el, e.to_string()))?;
    }
    Ok(GroupCocycle::new(group, ctx, values)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    const TINY: &str = "\
# Z/2 by table
group name=z2 order=2
table
0 1
1 0
generators
a = 1

irrep triv dim=1 conductor=2
a = 1
irrep sgn dim=1 conductor=2
a = -1
";

    #[test]
    fn group_file_round_trip() {
        let g = parse_group_file(TINY).unwrap();
        assert_eq!(g.group.order(), 2);
        assert_eq!(g.irreps.len(), 2);
        let text = write_group_file(&g.group, &g.irreps);
        let again = parse_group_file(&text).unwrap();
        assert_eq!(write_group_file(&again.group, &again.irreps), text);
    }

    #[test]
    fn group_file_errors_carry_line_numbers() {
        let bad = TINY.replace("a = -1", "a = c(3,1)");
        assert!(matches!(
            parse_group_file(&bad),
            Err(IoError::Syntax { line: 12, .. })
        ));
        let bad = TINY.replace("generators", "gens");
        assert!(matches!(
            parse_group_file(&bad),
            Err(IoError::Syntax { line: 6, .. })
        ));
        assert!(matches!(
            parse_group_file("group name=x\ngenerators\na = (0 1\n"),
            Err(IoError::Syntax { line: 3, .. })
        ));
    }

    #[test]
    fn mixed_conductors_are_embedded() {
        let text = "group name=z4\ngenerators\na = (0 1 2 3)\nirrep t dim=1 conductor=1\na = 1\nirrep i dim=1 conductor=4\na = c(4,1)\n";
        let g = parse_group_file(text).unwrap();
        assert!(g.irreps.iter().all(|r| r.context().conductor() == 4));
    }
}
