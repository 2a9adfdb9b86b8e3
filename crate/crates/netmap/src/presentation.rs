//! Presentation data for a NET map: an integer matrix whose columns span
//! the sublattice, a translation term inside it, and four directed arcs
//! joining sublattice points to the marked preimage points.
//!
//! Text format (line oriented, `#` starts a comment):
//!
//! ```text
//! matrix: a c b d        # columns lambda1 = (a, c), lambda2 = (b, d)
//! translation: x y
//! arc: x1 y1 -> x2 y2    # exactly four, initial -> terminal
//! ```

use crate::error::{Error, Result};
use crate::lattice::{a_coords_with, ElementaryDivisors, Lattice};
use crate::matrix::{snf2, IntMatrix2, Snf};
use std::fmt;

#[derive(Copy, Clone, PartialEq, Eq, Debug)]
pub struct Arc {
    pub initial: (i64, i64),
    pub terminal: (i64, i64),
}

#[derive(Clone, Debug)]
pub struct NetMapPresentation {
    matrix: IntMatrix2,
    translation: (i64, i64),
    arcs: [Arc; 4],
    snf: Snf,
}

impl PartialEq for NetMapPresentation {
    fn eq(&self, other: &Self) -> bool {
        self.matrix == other.matrix
            && self.translation == other.translation
            && self.arcs == other.arcs
    }
}
impl Eq for NetMapPresentation {}

impl NetMapPresentation {
    pub fn new(matrix: IntMatrix2, translation: (i64, i64), arcs: [Arc; 4]) -> Result<Self> {
        let det = matrix.det();
        if det <= 0 {
            return Err(Error::Orientation(det));
        }
        let snf = snf2(&matrix)?;
        let lattice = Lattice::new(matrix)?;
        if lattice.contains(translation).is_none() {
            return Err(Error::InvalidTranslation);
        }
        let div = ElementaryDivisors { m: snf.d.a, n: snf.d.d };
        // the four initial points must hit the four classes of L/2L
        let mut initial_classes = Vec::new();
        for arc in &arcs {
            if lattice.contains(arc.initial).is_none() {
                return Err(Error::InvalidPresentation(format!(
                    "arc initial point ({}, {}) is not in the sublattice",
                    arc.initial.0, arc.initial.1
                )));
            }
            initial_classes.push(a_coords_with(&snf, arc.initial));
        }
        initial_classes.sort();
        initial_classes.dedup();
        if initial_classes.len() != 4 {
            return Err(Error::InvalidPresentation(
                "arc initial points do not represent the four classes of L/2L".into(),
            ));
        }
        // the four terminal points must have pairwise distinct +- classes
        let terminals: Vec<_> = arcs.iter().map(|a| a_coords_with(&snf, a.terminal)).collect();
        for i in 0..4 {
            for j in i + 1..4 {
                if terminals[i] == terminals[j] || terminals[i] == div.neg(terminals[j]) {
                    return Err(Error::NotHurwitzStructureSet(format!(
                        "arc terminals {} and {} share a +- class",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        Ok(NetMapPresentation { matrix, translation, arcs, snf })
    }

    /// Euclidean presentation for divisors (m, n): diagonal matrix, zero
    /// translation, trivial arcs at the four corner classes.
    pub fn euclidean(m: i64, n: i64) -> Result<Self> {
        let div = ElementaryDivisors::new(m, n)?;
        if div.degree() < 2 {
            return Err(Error::DegreeTooSmall);
        }
        let corners = [(0, 0), (m, 0), (0, n), (m, n)];
        let arcs = corners.map(|c| Arc { initial: c, terminal: c });
        NetMapPresentation::new(IntMatrix2::new(m, 0, 0, n), (0, 0), arcs)
    }

    pub fn matrix(&self) -> IntMatrix2 {
        self.matrix
    }

    pub fn translation(&self) -> (i64, i64) {
        self.translation
    }

    pub fn arcs(&self) -> &[Arc; 4] {
        &self.arcs
    }

    pub fn snf(&self) -> &Snf {
        &self.snf
    }

    pub fn lattice(&self) -> Lattice {
        Lattice::new(self.matrix).expect("validated at construction")
    }

    pub fn divisors(&self) -> ElementaryDivisors {
        ElementaryDivisors { m: self.snf.d.a, n: self.snf.d.d }
    }

    pub fn degree(&self) -> i64 {
        self.matrix.det()
    }

    /// Coordinates (b1, b2) of the translation term in the lattice basis.
    pub fn translation_coords(&self) -> (i64, i64) {
        self.lattice().contains(self.translation).expect("validated at construction")
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut matrix = None;
        let mut translation = None;
        let mut arcs: Vec<Arc> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let lineno = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, rest) = line.split_once(':').ok_or_else(|| Error::Parse {
                line: lineno,
                message: "expected `key: values`".into(),
            })?;
            let nums = |s: &str| -> Result<Vec<i64>> {
                s.split_whitespace()
                    .map(|t| {
                        t.parse::<i64>().map_err(|_| Error::Parse {
                            line: lineno,
                            message: format!("invalid integer `{t}`"),
                        })
                    })
                    .collect()
            };
            match key.trim() {
                "matrix" => {
                    let v = nums(rest)?;
                    if v.len() != 4 {
                        return Err(Error::Parse { line: lineno, message: "matrix needs 4 integers".into() });
                    }
                    matrix = Some(IntMatrix2::from_columns((v[0], v[1]), (v[2], v[3])));
                }
                "translation" => {
                    let v = nums(rest)?;
                    if v.len() != 2 {
                        return Err(Error::Parse { line: lineno, message: "translation needs 2 integers".into() });
                    }
                    translation = Some((v[0], v[1]));
                }
                "arc" => {
                    let (from, to) = rest.split_once("->").ok_or_else(|| Error::Parse {
                        line: lineno,
                        message: "arc needs `x1 y1 -> x2 y2`".into(),
                    })?;
                    let f = nums(from)?;
                    let t = nums(to)?;
                    if f.len() != 2 || t.len() != 2 {
                        return Err(Error::Parse { line: lineno, message: "arc endpoints need 2 integers each".into() });
                    }
                    arcs.push(Arc { initial: (f[0], f[1]), terminal: (t[0], t[1]) });
                }
                other => {
                    return Err(Error::Parse { line: lineno, message: format!("unknown key `{other}`") });
                }
            }
        }
        let matrix = matrix.ok_or(Error::Parse { line: 0, message: "missing matrix line".into() })?;
        let translation = translation.ok_or(Error::Parse { line: 0, message: "missing translation line".into() })?;
        if arcs.len() != 4 {
            return Err(Error::Parse { line: 0, message: format!("expected 4 arcs, found {}", arcs.len()) });
        }
        NetMapPresentation::new(matrix, translation, [arcs[0], arcs[1], arcs[2], arcs[3]])
    }

    pub fn serialize(&self) -> String {
        let ((a, c), (b, d)) = self.matrix.columns();
        let mut out = format!("matrix: {a} {c} {b} {d}\ntranslation: {} {}\n", self.translation.0, self.translation.1);
        for arc in &self.arcs {
            out.push_str(&format!(
                "arc: {} {} -> {} {}\n",
                arc.initial.0, arc.initial.1, arc.terminal.0, arc.terminal.1
            ));
        }
        out
    }
}

impl fmt::Display for NetMapPresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.serialize())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const SEC7: &str = "\
# degree-6 fixture
matrix: 6 0 0 1
translation: 0 0
arc: 0 0 -> 1 0
arc: 6 0 -> 2 0
arc: 0 1 -> 1 1
arc: 6 1 -> 2 1
";

    #[test]
    fn parse_degree_six() {
        let p = NetMapPresentation::parse(SEC7).unwrap();
        assert_eq!(p.degree(), 6);
        assert_eq!(p.divisors(), ElementaryDivisors { m: 6, n: 1 });
    }

    #[test]
    fn parse_degree_ten() {
        let text = "\
matrix: 2 -1 0 5
translation: 0 0
arc: 0 0 -> 0 0
arc: 2 -1 -> 2 0
arc: 0 5 -> 0 5
arc: 2 4 -> 2 3
";
        let p = NetMapPresentation::parse(text).unwrap();
        assert_eq!(p.degree(), 10);
    }

    #[test]
    fn translation_outside_lattice_rejected() {
        let text = "\
matrix: 2 -1 0 5
translation: 1 0
arc: 0 0 -> 0 0
arc: 2 -1 -> 2 0
arc: 0 5 -> 0 5
arc: 2 4 -> 2 3
";
        assert!(matches!(NetMapPresentation::parse(text), Err(Error::InvalidTranslation)));
    }

    #[test]
    fn colliding_terminals_rejected() {
        let text = "\
matrix: 6 0 0 1
translation: 0 0
arc: 0 0 -> 1 0
arc: 6 0 -> 11 0
arc: 0 1 -> 1 1
arc: 6 1 -> 2 1
";
        // 11 = -1 mod 12, same +- class as 1
        assert!(matches!(NetMapPresentation::parse(text), Err(Error::NotHurwitzStructureSet(_))));
    }

    #[test]
    fn serialize_round_trip() {
        let p = NetMapPresentation::parse(SEC7).unwrap();
        let q = NetMapPresentation::parse(&p.serialize()).unwrap();
        assert_eq!(p, q);
        assert_eq!(p.serialize(), q.serialize());
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let err = NetMapPresentation::parse("matrix: 1 2 x 4\n").unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 1),
            other => panic!("unexpected error {other:?}"),
        }
    }
}
