//! Stabilizer and classical linear codes: representation, file formats,
//! standard families, logical operators, and the brute-force oracles
//! (distance, erasure correctability, cleaning) used to check everything else.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::{symplectic_product, BinaryMatrix, BitVector, RowSpace, SymplecticVector};
use crate::region::Region;

/// A stabilizer code given by a (possibly overcomplete) list of commuting generators.
#[derive(Clone, PartialEq, Eq)]
pub struct StabilizerCode {
    n: usize,
    generators: Vec<SymplecticVector>,
    name: String,
}

impl fmt::Debug for StabilizerCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("StabilizerCode")
            .field("name", &self.name)
            .field("n", &self.n)
            .field("generators", &self.generators)
            .finish()
    }
}

impl StabilizerCode {
    /// Validates lengths and pairwise commutation.
    pub fn new(name: impl Into<String>, n: usize, generators: Vec<SymplecticVector>) -> Result<Self> {
        for (i, g) in generators.iter().enumerate() {
            if g.n() != n {
                return Err(Error::Input(format!("generator {i} acts on {} qubits, expected {n}", g.n())));
            }
        }
        for j in 0..generators.len() {
            for i in 0..j {
                if symplectic_product(&generators[i], &generators[j])? {
                    return Err(Error::Input(format!("generators {i} and {j} anticommute")));
                }
            }
        }
        Ok(Self { n, generators, name: name.into() })
    }

    pub fn from_pauli_strings(name: &str, paulis: &[&str]) -> Result<Self> {
        let gens = paulis.iter().map(|p| SymplecticVector::parse_pauli(p)).collect::<Result<Vec<_>>>()?;
        let n = gens.first().map_or(0, SymplecticVector::n);
        Self::new(name, n, gens)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of generators as listed (not deduplicated).
    pub fn m(&self) -> usize {
        self.generators.len()
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn generators(&self) -> &[SymplecticVector] {
        &self.generators
    }

    /// The `m x 2n` symplectic check matrix, columns `x_0..x_{n-1} z_0..z_{n-1}`.
    pub fn check_matrix(&self) -> BinaryMatrix {
        let rows: Vec<BitVector> = self.generators.iter().map(SymplecticVector::to_row).collect();
        BinaryMatrix::from_rows(2 * self.n, &rows).expect("generator rows have length 2n")
    }

    pub fn rank(&self) -> usize {
        self.check_matrix().rank()
    }

    /// Number of logical qubits, `n - rank(H)`.
    pub fn k(&self) -> usize {
        self.n - self.rank()
    }

    /// Columns of the check matrix belonging to the qubits of `region`, ascending.
    pub fn region_columns(&self, region: &Region) -> Vec<usize> {
        region.iter().chain(region.iter().map(|q| self.n + q)).collect()
    }

    /// Matrix `C` with `C v = 0` iff the Pauli `v` commutes with every generator.
    pub(crate) fn commutation_matrix(&self) -> BinaryMatrix {
        let n = self.n;
        let mut c = BinaryMatrix::zeros(self.generators.len(), 2 * n);
        for (r, g) in self.generators.iter().enumerate() {
            for i in g.z_part().ones() {
                c.set(r, i, true);
            }
            for i in g.x_part().ones() {
                c.set(r, n + i, true);
            }
        }
        c
    }

    pub fn stabilizer_space(&self) -> RowSpace {
        RowSpace::from_matrix(&self.check_matrix())
    }

    /// Serializes to the `qecc v1` text format.
    pub fn to_text(&self) -> String {
        let mut out = format!("qecc v1 n={}\n", self.n);
        if !self.name.is_empty() {
            out.push_str(&format!("# name: {}\n", self.name));
        }
        for g in &self.generators {
            out.push_str(&g.to_pauli_string());
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let file = CodeJson {
            n: self.n,
            generators: self.generators.iter().map(SymplecticVector::to_pauli_string).collect(),
            name: (!self.name.is_empty()).then(|| self.name.clone()),
        };
        serde_json::to_string(&file).expect("plain struct serializes")
    }
}

#[derive(Serialize, Deserialize)]
struct CodeJson {
    n: usize,
    generators: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
}

fn parse_header(line: &str, magic: &str, lineno: usize) -> Result<usize> {
    let mut parts = line.split_whitespace();
    if parts.next() != Some(magic) {
        return Err(Error::parse(lineno, format!("expected `{magic}` header")));
    }
    if parts.next() != Some("v1") {
        return Err(Error::parse(lineno, "unsupported format version"));
    }
    let n = parts
        .next()
        .and_then(|p| p.strip_prefix("n="))
        .ok_or_else(|| Error::parse(lineno, "header is missing n=<count>"))?;
    n.parse::<usize>().map_err(|_| Error::parse(lineno, format!("bad qubit count {n:?}")))
}

/// Parses a code from either the `qecc v1` text format or its JSON form.
///
/// The header line is optional in the text format; without it `n` is taken
/// from the first generator. Errors carry the 1-based line number.
pub fn parse_code(text: &str) -> Result<StabilizerCode> {
    if text.trim_start().starts_with('{') {
        return parse_code_json(text);
    }
    let mut n: Option<usize> = None;
    let mut name = String::new();
    let mut gens: Vec<(usize, SymplecticVector)> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let trimmed = raw.trim();
        if let Some(comment) = trimmed.strip_prefix('#') {
            if let Some(v) = comment.trim().strip_prefix("name:") {
                name = v.trim().to_string();
            }
            continue;
        }
        let line = trimmed.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if line.starts_with("qecc") {
            if n.is_some() || !gens.is_empty() {
                return Err(Error::parse(lineno, "header must precede generators"));
            }
            n = Some(parse_header(line, "qecc", lineno)?);
            continue;
        }
        let g = SymplecticVector::parse_pauli(line).map_err(|e| Error::parse(lineno, e.to_string()))?;
        let expected = *n.get_or_insert(g.n());
        if g.n() != expected {
            return Err(Error::parse(
                lineno,
                format!("generator has length {}, expected {expected}", g.n()),
            ));
        }
        for (prev_line, prev) in &gens {
            if symplectic_product(prev, &g)? {
                return Err(Error::parse(
                    lineno,
                    format!("generator anticommutes with generator on line {prev_line}"),
                ));
            }
        }
        gens.push((lineno, g));
    }
    let n = match n {
        Some(n) => n,
        None => return Err(Error::parse(text.lines().count().max(1), "no header or generators found")),
    };
    StabilizerCode::new(name, n, gens.into_iter().map(|(_, g)| g).collect())
        .map_err(|e| Error::parse(1, e.to_string()))
}

fn parse_code_json(text: &str) -> Result<StabilizerCode> {
    let file: CodeJson = serde_json::from_str(text).map_err(|e| Error::parse(e.line(), e.to_string()))?;
    let mut gens: Vec<SymplecticVector> = Vec::with_capacity(file.generators.len());
    for (i, s) in file.generators.iter().enumerate() {
        let g = SymplecticVector::parse_pauli(s).map_err(|e| Error::parse(1, format!("generator {i}: {e}")))?;
        if g.n() != file.n {
            return Err(Error::parse(1, format!("generator {i} has length {}, expected {}", g.n(), file.n)));
        }
        for (j, prev) in gens.iter().enumerate() {
            if symplectic_product(prev, &g)? {
                return Err(Error::parse(1, format!("generator {i} anticommutes with generator {j}")));
            }
        }
        gens.push(g);
    }
    StabilizerCode::new(file.name.unwrap_or_default(), file.n, gens)
}

/// A classical linear code given by its parity checks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassicalCode {
    n: usize,
    parity_checks: BinaryMatrix,
}

impl ClassicalCode {
    pub fn new(parity_checks: BinaryMatrix) -> Self {
        Self { n: parity_checks.cols(), parity_checks }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn parity_checks(&self) -> &BinaryMatrix {
        &self.parity_checks
    }

    pub fn k(&self) -> usize {
        self.n - self.parity_checks.rank()
    }

    /// The connectivity graph's edge rule applied to parity checks: bits are
    /// adjacent when some check involves both.
    pub fn check_supports(&self) -> Vec<Vec<usize>> {
        (0..self.parity_checks.rows()).map(|r| self.parity_checks.row(r).ones().collect()).collect()
    }

    /// An erased bit set is recoverable iff no nonzero codeword is supported inside it.
    pub fn is_correctable(&self, region: &Region) -> Result<bool> {
        region.check_within(self.n)?;
        let sub = self.parity_checks.select_columns(region.members())?;
        Ok(sub.rank() == region.len())
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("cecc v1 n={}\n", self.n);
        for r in 0..self.parity_checks.rows() {
            let row: String =
                (0..self.n).map(|c| if self.parity_checks.get(r, c) { '1' } else { '0' }).collect();
            out.push_str(&row);
            out.push('\n');
        }
        out
    }
}

/// Parses the `cecc v1` classical code format.
pub fn parse_classical(text: &str) -> Result<ClassicalCode> {
    let mut n: Option<usize> = None;
    let mut rows = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if line.starts_with("cecc") {
            n = Some(parse_header(line, "cecc", lineno)?);
            continue;
        }
        let v = BitVector::parse(line).map_err(|e| Error::parse(lineno, e.to_string()))?;
        let expected = *n.get_or_insert(v.len());
        if v.len() != expected {
            return Err(Error::parse(lineno, format!("row has length {}, expected {expected}", v.len())));
        }
        rows.push(v);
    }
    let n = n.ok_or_else(|| Error::parse(1, "empty classical code file"))?;
    Ok(ClassicalCode::new(BinaryMatrix::from_rows(n, &rows)?))
}

/// Built-in code families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    Repetition,
    FiveQubit,
    Steane,
    Surface,
    Toric,
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "repetition" | "rep" => Ok(Family::Repetition),
            "five_qubit" | "five" | "perfect" => Ok(Family::FiveQubit),
            "steane" => Ok(Family::Steane),
            "surface" | "planar" => Ok(Family::Surface),
            "toric" => Ok(Family::Toric),
            other => Err(Error::Input(format!("unknown code family {other:?}"))),
        }
    }
}

impl Family {
    pub fn min_size(self) -> usize {
        match self {
            Family::Repetition | Family::Surface | Family::Toric => 2,
            Family::FiveQubit | Family::Steane => 0,
        }
    }
}

fn pauli_from_support(n: usize, support: &[usize], pauli: char) -> SymplecticVector {
    let mut s = vec!['I'; n];
    for &q in support {
        s[q] = pauli;
    }
    SymplecticVector::parse_pauli(&s.into_iter().collect::<String>()).expect("valid Pauli characters")
}

/// Qubit positions of the planar surface code on a `(2L-1) x (2L-1)` doubled
/// grid: qubits sit where `r + c` is even.
pub fn surface_qubit_positions(l: usize) -> Vec<(usize, usize)> {
    let side = 2 * l - 1;
    (0..side).flat_map(|r| (0..side).map(move |c| (r, c))).filter(|(r, c)| (r + c) % 2 == 0).collect()
}

fn surface_code(l: usize) -> Result<StabilizerCode> {
    let side = 2 * l - 1;
    let positions = surface_qubit_positions(l);
    let index = |r: usize, c: usize| positions.binary_search(&(r, c)).ok();
    let n = positions.len();
    let mut gens = Vec::new();
    // X checks at (even, odd) sites, then Z checks at (odd, even) sites.
    for (pauli, r_parity) in [('X', 0), ('Z', 1)] {
        for r in (r_parity..side).step_by(2) {
            for c in ((1 - r_parity)..side).step_by(2) {
                let mut support = Vec::new();
                let (r, c) = (r as isize, c as isize);
                for (dr, dc) in [(-1, 0), (0, -1), (0, 1), (1, 0)] {
                    let (rr, cc) = (r + dr, c + dc);
                    if rr >= 0 && cc >= 0 {
                        if let Some(q) = index(rr as usize, cc as usize) {
                            support.push(q);
                        }
                    }
                }
                support.sort_unstable();
                gens.push(pauli_from_support(n, &support, pauli));
            }
        }
    }
    StabilizerCode::new(format!("surface-L{l}"), n, gens)
}

fn toric_code(l: usize) -> Result<StabilizerCode> {
    let n = 2 * l * l;
    let h = |i: usize, j: usize| (i % l) * l + (j % l);
    let v = |i: usize, j: usize| l * l + (i % l) * l + (j % l);
    let mut gens = Vec::new();
    for i in 0..l {
        for j in 0..l {
            let mut star = vec![h(i, j), h(i, j + l - 1), v(i, j), v(i + l - 1, j)];
            star.sort_unstable();
            gens.push(pauli_from_support(n, &star, 'X'));
        }
    }
    for i in 0..l {
        for j in 0..l {
            let mut plaquette = vec![h(i, j), h(i + 1, j), v(i, j), v(i, j + 1)];
            plaquette.sort_unstable();
            gens.push(pauli_from_support(n, &plaquette, 'Z'));
        }
    }
    StabilizerCode::new(format!("toric-L{l}"), n, gens)
}

/// Constructs a member of a built-in family.
///
/// `size` is the length for repetition codes and the lattice side `L` for
/// surface and toric codes; the five-qubit and Steane codes ignore it.
/// Surface codes use the planar patch with `L^2 + (L-1)^2` qubits; toric codes
/// keep all `2L^2` checks, so their generator list is overcomplete.
pub fn make_family(family: Family, size: usize) -> Result<StabilizerCode> {
    if size < family.min_size() {
        return Err(Error::Input(format!(
            "{family:?} code needs size >= {}, got {size}",
            family.min_size()
        )));
    }
    match family {
        Family::Repetition => {
            let gens = (0..size - 1).map(|i| pauli_from_support(size, &[i, i + 1], 'Z')).collect();
            StabilizerCode::new(format!("repetition-{size}"), size, gens)
        }
        Family::FiveQubit => {
            StabilizerCode::from_pauli_strings("five-qubit", &["XZZXI", "IXZZX", "XIXZZ", "ZXIXZ"])
        }
        Family::Steane => StabilizerCode::from_pauli_strings(
            "steane",
            &["IIIXXXX", "IXXIIXX", "XIXIXIX", "IIIZZZZ", "IZZIIZZ", "ZIZIZIZ"],
        ),
        Family::Surface => surface_code(size),
        Family::Toric => toric_code(size),
    }
}

/// Representatives of a basis of `N(S) / S`.
#[derive(Clone, Debug)]
pub struct LogicalBasis {
    pub representatives: Vec<SymplecticVector>,
}

/// Basis of the normalizer `N(S)` (Paulis commuting with every generator).
pub fn normalizer_basis(code: &StabilizerCode) -> Vec<SymplecticVector> {
    code.commutation_matrix().nullspace().iter().map(SymplecticVector::from_row).collect()
}

/// Extends the stabilizer row space by normalizer elements until it spans
/// `N(S)`; the added elements form the logical basis (`2k` of them).
pub fn logical_basis(code: &StabilizerCode) -> LogicalBasis {
    let mut space = code.stabilizer_space();
    let representatives = normalizer_basis(code).into_iter().filter(|l| space.insert(&l.to_row())).collect();
    LogicalBasis { representatives }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BruteDistance {
    /// Minimum weight of a nontrivial logical, with a witness.
    Exact { d: usize, witness: SymplecticVector },
    /// No nontrivial logical of weight `<= cap` exists.
    ExceedsCap { cap: usize },
}

impl BruteDistance {
    pub fn exact(&self) -> Option<usize> {
        match self {
            BruteDistance::Exact { d, .. } => Some(*d),
            BruteDistance::ExceedsCap { .. } => None,
        }
    }

    /// A valid lower bound on the distance.
    pub fn lower_bound(&self) -> usize {
        match self {
            BruteDistance::Exact { d, .. } => *d,
            BruteDistance::ExceedsCap { cap } => cap + 1,
        }
    }
}

/// Packed view of a code for the enumeration inner loop.
struct SyndromeTable {
    /// `table[q][p]` = syndrome of Pauli `p` (0=X, 1=Y, 2=Z) on qubit `q`.
    table: Vec<[Vec<u64>; 3]>,
}

impl SyndromeTable {
    fn new(code: &StabilizerCode) -> Self {
        let m = code.m();
        let words = m.div_ceil(64).max(1);
        let table = (0..code.n())
            .map(|q| {
                let mut entry: [Vec<u64>; 3] = [vec![0; words], vec![0; words], vec![0; words]];
                for (r, g) in code.generators().iter().enumerate() {
                    let (gx, gz) = (g.x_part().get(q), g.z_part().get(q));
                    // X anticommutes with Z/Y parts, Z with X/Y parts.
                    let flips = [gz, gx ^ gz, gx];
                    for (p, &f) in flips.iter().enumerate() {
                        if f {
                            entry[p][r / 64] |= 1 << (r % 64);
                        }
                    }
                }
                entry
            })
            .collect();
        Self { table }
    }
}

struct Search<'a> {
    n: usize,
    table: &'a SyndromeTable,
    stabilizers: &'a RowSpace,
    support: Vec<usize>,
    paulis: Vec<usize>,
}

impl Search<'_> {
    fn candidate(&self) -> SymplecticVector {
        let mut s = vec!['I'; self.n];
        for (&q, &p) in self.support.iter().zip(&self.paulis) {
            s[q] = ['X', 'Y', 'Z'][p];
        }
        SymplecticVector::parse_pauli(&s.into_iter().collect::<String>()).expect("valid")
    }

    /// Depth-first over supports in lexicographic order with `remaining` more qubits to place.
    fn dfs(&mut self, start: usize, remaining: usize, syndrome: &mut Vec<u64>) -> Option<SymplecticVector> {
        if remaining == 0 {
            if syndrome.iter().all(|&w| w == 0) {
                let cand = self.candidate();
                if !self.stabilizers.contains(&cand.to_row()) {
                    return Some(cand);
                }
            }
            return None;
        }
        for q in start..=self.n - remaining {
            self.support.push(q);
            for p in 0..3 {
                self.paulis.push(p);
                for (s, t) in syndrome.iter_mut().zip(&self.table.table[q][p]) {
                    *s ^= t;
                }
                let found = self.dfs(q + 1, remaining - 1, syndrome);
                for (s, t) in syndrome.iter_mut().zip(&self.table.table[q][p]) {
                    *s ^= t;
                }
                self.paulis.pop();
                if found.is_some() {
                    self.support.pop();
                    return found;
                }
            }
            self.support.pop();
        }
        None
    }
}

/// Minimum-weight nontrivial logical by enumeration over increasing weight.
///
/// The witness is the lexicographically first minimum-weight logical (ordered
/// by support, then Pauli labels X < Y < Z), independent of thread count.
pub fn brute_distance(code: &StabilizerCode, weight_cap: usize) -> BruteDistance {
    let n = code.n();
    if code.k() == 0 {
        return BruteDistance::ExceedsCap { cap: weight_cap };
    }
    let table = SyndromeTable::new(code);
    let stabilizers = code.stabilizer_space();
    for w in 1..=weight_cap.min(n) {
        let found = (0..=n - w).into_par_iter().find_map_first(|first| {
            let mut search = Search {
                n,
                table: &table,
                stabilizers: &stabilizers,
                support: vec![first],
                paulis: Vec::with_capacity(w),
            };
            for p in 0..3 {
                let mut syndrome = table.table[first][p].clone();
                search.paulis.push(p);
                let found = search.dfs(first + 1, w - 1, &mut syndrome);
                search.paulis.pop();
                if found.is_some() {
                    return found;
                }
            }
            None
        });
        if let Some(witness) = found {
            return BruteDistance::Exact { d: w, witness };
        }
    }
    BruteDistance::ExceedsCap { cap: weight_cap }
}

/// Paulis supported inside `region` that commute with every generator,
/// embedded back into all `n` qubits.
fn normalizer_inside(code: &StabilizerCode, region: &Region) -> Vec<SymplecticVector> {
    let n = code.n();
    let u = region.len();
    // Unknowns: x_q for q in U, then z_q for q in U.
    let mut system = BinaryMatrix::zeros(code.m(), 2 * u);
    for (r, g) in code.generators().iter().enumerate() {
        for (j, q) in region.iter().enumerate() {
            system.set(r, j, g.z_part().get(q));
            system.set(r, u + j, g.x_part().get(q));
        }
    }
    system
        .nullspace()
        .into_iter()
        .map(|v| {
            let mut x = BitVector::zeros(n);
            let mut z = BitVector::zeros(n);
            for (j, q) in region.iter().enumerate() {
                x.set(q, v.get(j));
                z.set(q, v.get(u + j));
            }
            SymplecticVector::from_parts(x, z).expect("equal lengths")
        })
        .collect()
}

/// Nontrivial logical operator supported inside `region`, if one exists.
pub fn logical_inside(code: &StabilizerCode, region: &Region) -> Result<Option<SymplecticVector>> {
    region.check_within(code.n())?;
    let stabilizers = code.stabilizer_space();
    Ok(normalizer_inside(code, region).into_iter().find(|l| !stabilizers.contains(&l.to_row())))
}

/// Erasure correctability by the algebraic characterization: every element of
/// `N(S)` supported in the region is a stabilizer.
pub fn is_correctable_oracle(code: &StabilizerCode, region: &Region) -> Result<bool> {
    Ok(logical_inside(code, region)?.is_none())
}

#[derive(Clone, Debug)]
pub struct CleanedLogical {
    pub original: SymplecticVector,
    pub cleaned: SymplecticVector,
    /// Generators multiplied in; each overlaps the region.
    pub generators_used: Vec<usize>,
}

#[derive(Clone, Debug)]
pub enum CleaningReport {
    /// A nontrivial logical lives entirely inside the region.
    LogicalInside { witness: SymplecticVector },
    /// Every logical basis class has a representative avoiding the region.
    Cleaned { representatives: Vec<CleanedLogical> },
}

impl CleaningReport {
    pub fn branch(&self) -> u8 {
        match self {
            CleaningReport::LogicalInside { .. } => 1,
            CleaningReport::Cleaned { .. } => 2,
        }
    }
}

/// Attempts to clean every logical basis representative off `region`; if any
/// cannot be cleaned, finds a logical supported inside the region instead.
pub fn verify_cleaning_lemma(code: &StabilizerCode, region: &Region) -> Result<CleaningReport> {
    region.check_within(code.n())?;
    let basis = logical_basis(code);
    if basis.representatives.is_empty() {
        return Err(Error::Precondition("code has no logical qubits (k = 0)".into()));
    }
    let cols = code.region_columns(region);
    let restricted = code.check_matrix().select_columns(&cols)?;
    let space = RowSpace::from_matrix(&restricted);
    let mut cleaned = Vec::with_capacity(basis.representatives.len());
    for rep in &basis.representatives {
        let target = BitVector::from_bits(cols.iter().map(|&c| rep.to_row().get(c)));
        let Some(used) = space.express(&target) else {
            return match logical_inside(code, region)? {
                Some(witness) => Ok(CleaningReport::LogicalInside { witness }),
                None => Err(Error::Inconsistency(format!(
                    "logical {rep:?} cannot be cleaned off {:?} yet no logical lies inside",
                    region.members()
                ))),
            };
        };
        let mut op = rep.clone();
        for &g in &used {
            op.mul_assign(&code.generators()[g]);
        }
        cleaned.push(CleanedLogical { original: rep.clone(), cleaned: op, generators_used: used });
    }
    Ok(CleaningReport::Cleaned { representatives: cleaned })
}
