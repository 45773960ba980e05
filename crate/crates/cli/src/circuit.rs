//! Line-oriented circuit description files.
//!
//! ```text
//! # NS gate on one photon
//! modes 3
//! input fock 1 1 0
//! gen3 0 1 2 t1=0.3927 t2=1.1437 t3=0.3927
//! detect 1=1 2=0
//! ```

use std::collections::BTreeSet;
use std::fmt;

use loqc_core::multiport::{ElementKind, ElementSpec, ModeTransform};
use loqc_core::{Complex, DetectionPattern, Encoding, FockState, OutcomeBranch};
use thiserror::Error;

/// A diagnostic tied to a 1-based line and column.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq)]
pub enum InputSpec {
    Fock(Vec<u32>),
    /// Logical amplitudes on the leading `2q` modes, plus extra photons elsewhere.
    DualRail {
        amplitudes: Vec<Complex>,
        ancilla: Vec<(usize, u32)>,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub enum Element {
    BeamSplitter {
        i: usize,
        j: usize,
        eta: f64,
    },
    /// `η = cos²θ`, θ in degrees.
    BeamSplitterDegrees {
        i: usize,
        j: usize,
        theta: f64,
    },
    PhaseShifter {
        mode: usize,
        delta: f64,
    },
    General3 {
        modes: [usize; 3],
        t1: f64,
        t2: f64,
        t3: f64,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Branch {
    pub pattern: Vec<(usize, u32)>,
    pub correction: Option<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CircuitFile {
    pub modes: usize,
    pub input: Option<InputSpec>,
    pub elements: Vec<Element>,
    pub branches: Vec<Branch>,
}

/// Corrections that a `detect ... correct <name>` line may name. They act on the modes
/// left after measurement, in increasing order.
pub const CORRECTIONS: [&str; 3] = ["identity", "swap", "flip"];

#[derive(Clone, Copy)]
struct Token<'a> {
    text: &'a str,
    column: usize,
}

fn tokenize(line: &str) -> Vec<Token<'_>> {
    let body = line.split('#').next().unwrap_or("");
    let mut out = Vec::new();
    let mut start: Option<(usize, usize)> = None;
    for (col, (byte, ch)) in body.char_indices().enumerate() {
        match (ch.is_whitespace(), start) {
            (false, None) => start = Some((byte, col + 1)),
            (true, Some((b, c))) => {
                out.push(Token {
                    text: &body[b..byte],
                    column: c,
                });
                start = None;
            }
            _ => {}
        }
    }
    if let Some((b, c)) = start {
        out.push(Token {
            text: &body[b..],
            column: c,
        });
    }
    out
}

struct LineParser<'a> {
    line: usize,
    tokens: Vec<Token<'a>>,
    pos: usize,
    end_column: usize,
}

impl<'a> LineParser<'a> {
    fn err_at(&self, column: usize, message: impl Into<String>) -> ParseError {
        ParseError {
            line: self.line,
            column,
            message: message.into(),
        }
    }

    fn next(&mut self, what: &str) -> Result<Token<'a>, ParseError> {
        let t = self
            .tokens
            .get(self.pos)
            .copied()
            .ok_or_else(|| self.err_at(self.end_column, format!("expected {what}")))?;
        self.pos += 1;
        Ok(t)
    }

    fn peek(&self) -> Option<Token<'a>> {
        self.tokens.get(self.pos).copied()
    }

    fn done(&self) -> Result<(), ParseError> {
        match self.peek() {
            Some(t) => Err(self.err_at(t.column, format!("unexpected `{}`", t.text))),
            None => Ok(()),
        }
    }

    fn mode(&mut self, modes: usize) -> Result<usize, ParseError> {
        let t = self.next("a mode index")?;
        self.check_mode(t, t.text, modes)
    }

    fn check_mode(&self, t: Token<'_>, text: &str, modes: usize) -> Result<usize, ParseError> {
        let m: usize = text
            .parse()
            .map_err(|_| self.err_at(t.column, format!("`{text}` is not a mode index")))?;
        if m >= modes {
            return Err(self.err_at(t.column, format!("mode {m} out of range for {modes} modes")));
        }
        Ok(m)
    }

    fn count(&self, t: Token<'_>, text: &str) -> Result<u32, ParseError> {
        text.parse()
            .map_err(|_| self.err_at(t.column, format!("`{text}` is not a photon count")))
    }

    fn real(&self, t: Token<'_>, text: &str) -> Result<f64, ParseError> {
        match text.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => Err(self.err_at(t.column, format!("`{text}` is not a finite number"))),
        }
    }

    fn keyed(&mut self, key: &str) -> Result<f64, ParseError> {
        let t = self.next(&format!("{key}=<value>"))?;
        match t.text.split_once('=') {
            Some((k, v)) if k == key => self.real(t, v),
            _ => Err(self.err_at(
                t.column,
                format!("expected {key}=<value>, found `{}`", t.text),
            )),
        }
    }

    /// `m=c` pairs until the end of the line or `stop`.
    fn pairs(&mut self, modes: usize, stop: &str) -> Result<Vec<(usize, u32)>, ParseError> {
        let mut out: Vec<(usize, u32)> = Vec::new();
        while let Some(t) = self.peek() {
            if t.text == stop {
                break;
            }
            self.pos += 1;
            let (m, c) = t.text.split_once('=').ok_or_else(|| {
                self.err_at(t.column, format!("expected mode=count, found `{}`", t.text))
            })?;
            let m = self.check_mode(t, m, modes)?;
            if out.iter().any(|p| p.0 == m) {
                return Err(self.err_at(t.column, format!("mode {m} listed twice")));
            }
            out.push((m, self.count(t, c)?));
        }
        Ok(out)
    }
}

pub fn parse_circuit(text: &str) -> Result<CircuitFile, ParseError> {
    let mut modes: Option<usize> = None;
    let mut input = None;
    let mut elements = Vec::new();
    let mut branches = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let tokens = tokenize(raw);
        if tokens.is_empty() {
            continue;
        }
        let mut p = LineParser {
            line: idx + 1,
            end_column: raw.split('#').next().unwrap_or("").chars().count() + 1,
            tokens,
            pos: 0,
        };
        let head = p.next("a keyword")?;
        if head.text == "modes" {
            if modes.is_some() {
                return Err(p.err_at(head.column, "duplicate `modes` declaration"));
            }
            let t = p.next("a mode count")?;
            let n: usize = t.text.parse().ok().filter(|&n| n > 0).ok_or_else(|| {
                p.err_at(
                    t.column,
                    format!("`{}` is not a positive mode count", t.text),
                )
            })?;
            p.done()?;
            modes = Some(n);
            continue;
        }
        let n = modes.ok_or_else(|| p.err_at(head.column, "missing modes declaration"))?;
        match head.text {
            "input" => {
                if input.is_some() {
                    return Err(p.err_at(head.column, "duplicate `input` declaration"));
                }
                input = Some(parse_input(&mut p, n)?);
            }
            "bs" => {
                let (i, j) = (p.mode(n)?, p.mode(n)?);
                if i == j {
                    return Err(p.err_at(head.column, "beam splitter needs two distinct modes"));
                }
                let t = p.next("eta=<value> or theta=<degrees>")?;
                let element = match t.text.split_once('=') {
                    Some(("eta", v)) => {
                        let eta = p.real(t, v)?;
                        if !(0.0..=1.0).contains(&eta) {
                            return Err(p.err_at(t.column, format!("eta {eta} outside [0, 1]")));
                        }
                        Element::BeamSplitter { i, j, eta }
                    }
                    Some(("theta", v)) => Element::BeamSplitterDegrees {
                        i,
                        j,
                        theta: p.real(t, v)?,
                    },
                    _ => {
                        return Err(p.err_at(
                            t.column,
                            format!(
                                "expected eta=<value> or theta=<degrees>, found `{}`",
                                t.text
                            ),
                        ))
                    }
                };
                p.done()?;
                elements.push(element);
            }
            "ps" => {
                let mode = p.mode(n)?;
                let delta = p.keyed("delta")?;
                p.done()?;
                elements.push(Element::PhaseShifter { mode, delta });
            }
            "gen3" => {
                let m = [p.mode(n)?, p.mode(n)?, p.mode(n)?];
                if m[0] == m[1] || m[1] == m[2] || m[0] == m[2] {
                    return Err(p.err_at(head.column, "gen3 needs three distinct modes"));
                }
                let (t1, t2, t3) = (p.keyed("t1")?, p.keyed("t2")?, p.keyed("t3")?);
                p.done()?;
                elements.push(Element::General3 {
                    modes: m,
                    t1,
                    t2,
                    t3,
                });
            }
            "detect" => {
                let pattern = p.pairs(n, "correct")?;
                if pattern.is_empty() {
                    return Err(p.err_at(p.end_column, "expected at least one mode=count"));
                }
                let correction = match p.peek() {
                    Some(_) => {
                        p.next("correct")?;
                        let t = p.next("a correction name")?;
                        if !CORRECTIONS.contains(&t.text) {
                            return Err(p.err_at(
                                t.column,
                                format!(
                                    "unknown correction `{}`; expected one of {}",
                                    t.text,
                                    CORRECTIONS.join(", ")
                                ),
                            ));
                        }
                        p.done()?;
                        Some(t.text.to_string())
                    }
                    None => None,
                };
                branches.push(Branch {
                    pattern,
                    correction,
                });
            }
            other => return Err(p.err_at(head.column, format!("unknown statement `{other}`"))),
        }
    }

    let modes = modes.ok_or(ParseError {
        line: 1,
        column: 1,
        message: "missing modes declaration".into(),
    })?;
    Ok(CircuitFile {
        modes,
        input,
        elements,
        branches,
    })
}

fn parse_input(p: &mut LineParser<'_>, modes: usize) -> Result<InputSpec, ParseError> {
    let kind = p.next("`fock` or `dualrail`")?;
    match kind.text {
        "fock" => {
            let mut counts = Vec::new();
            while let Some(t) = p.peek() {
                p.pos += 1;
                counts.push(p.count(t, t.text)?);
            }
            if counts.len() != modes {
                return Err(p.err_at(
                    kind.column,
                    format!("fock input lists {} modes, expected {modes}", counts.len()),
                ));
            }
            Ok(InputSpec::Fock(counts))
        }
        "dualrail" => {
            let mut amplitudes = Vec::new();
            while let Some(t) = p.peek() {
                if t.text == "with" {
                    break;
                }
                p.pos += 1;
                let z: Complex = t.text.parse().map_err(|_| {
                    p.err_at(t.column, format!("`{}` is not a complex amplitude", t.text))
                })?;
                if !(z.re.is_finite() && z.im.is_finite()) {
                    return Err(p.err_at(t.column, format!("`{}` is not finite", t.text)));
                }
                amplitudes.push(z);
            }
            let len = amplitudes.len();
            if len < 2 || !len.is_power_of_two() {
                return Err(p.err_at(
                    kind.column,
                    format!("dual-rail input needs 2^q amplitudes, found {len}"),
                ));
            }
            let qubits = len.trailing_zeros() as usize;
            if 2 * qubits > modes {
                return Err(p.err_at(
                    kind.column,
                    format!(
                        "{qubits} dual-rail qubits need {} modes, only {modes} declared",
                        2 * qubits
                    ),
                ));
            }
            let mut ancilla = Vec::new();
            if p.peek().is_some() {
                p.next("with")?;
                let start = p.pos;
                ancilla = p.pairs(modes, "")?;
                for (k, (m, _)) in ancilla.iter().enumerate() {
                    if *m < 2 * qubits {
                        let col = p.tokens[start + k].column;
                        return Err(
                            p.err_at(col, format!("mode {m} is used by the dual-rail qubits"))
                        );
                    }
                }
            }
            Ok(InputSpec::DualRail {
                amplitudes,
                ancilla,
            })
        }
        other => Err(p.err_at(kind.column, format!("unknown input kind `{other}`"))),
    }
}

fn write_pairs(f: &mut fmt::Formatter<'_>, pairs: &[(usize, u32)]) -> fmt::Result {
    for (m, c) in pairs {
        write!(f, " {m}={c}")?;
    }
    Ok(())
}

fn complex_token(z: &Complex) -> String {
    if z.im == 0.0 {
        format!("{:?}", z.re)
    } else {
        format!(
            "{:?}{}{:?}i",
            z.re,
            if z.im.is_sign_negative() { "-" } else { "+" },
            z.im.abs()
        )
    }
}

/// Canonical text; parsing it yields an equal `CircuitFile`.
impl fmt::Display for CircuitFile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "modes {}", self.modes)?;
        match &self.input {
            Some(InputSpec::Fock(c)) => {
                let parts: Vec<String> = c.iter().map(u32::to_string).collect();
                writeln!(f, "input fock {}", parts.join(" "))?;
            }
            Some(InputSpec::DualRail {
                amplitudes,
                ancilla,
            }) => {
                let parts: Vec<String> = amplitudes.iter().map(complex_token).collect();
                write!(f, "input dualrail {}", parts.join(" "))?;
                if !ancilla.is_empty() {
                    write!(f, " with")?;
                    write_pairs(f, ancilla)?;
                }
                writeln!(f)?;
            }
            None => {}
        }
        for e in &self.elements {
            match e {
                Element::BeamSplitter { i, j, eta } => writeln!(f, "bs {i} {j} eta={eta:?}")?,
                Element::BeamSplitterDegrees { i, j, theta } => {
                    writeln!(f, "bs {i} {j} theta={theta:?}")?
                }
                Element::PhaseShifter { mode, delta } => writeln!(f, "ps {mode} delta={delta:?}")?,
                Element::General3 { modes, t1, t2, t3 } => writeln!(
                    f,
                    "gen3 {} {} {} t1={t1:?} t2={t2:?} t3={t3:?}",
                    modes[0], modes[1], modes[2]
                )?,
            }
        }
        for b in &self.branches {
            write!(f, "detect")?;
            write_pairs(f, &b.pattern)?;
            if let Some(c) = &b.correction {
                write!(f, " correct {c}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

impl CircuitFile {
    pub fn input_state(&self) -> loqc_core::Result<FockState> {
        match &self.input {
            None => Ok(FockState::vacuum(self.modes)),
            Some(InputSpec::Fock(c)) => Ok(FockState::basis(c.clone())),
            Some(InputSpec::DualRail {
                amplitudes,
                ancilla,
            }) => {
                let qubits = amplitudes.len().trailing_zeros() as usize;
                let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                if norm < 1e-12 {
                    return Err(loqc_core::Error::ZeroNorm);
                }
                let amps: Vec<Complex> = amplitudes.iter().map(|z| z / norm).collect();
                let encoded = Encoding::dual_rail(qubits).encode(&amps)?;
                let mut rest = vec![0u32; self.modes - 2 * qubits];
                for (m, c) in ancilla {
                    rest[m - 2 * qubits] = *c;
                }
                Ok(encoded.tensor(&FockState::basis(rest)))
            }
        }
    }

    pub fn element_specs(&self) -> loqc_core::Result<Vec<ElementSpec>> {
        self.elements
            .iter()
            .map(|e| match e {
                Element::BeamSplitter { i, j, eta } => ElementSpec::beam_splitter(*eta, *i, *j),
                Element::BeamSplitterDegrees { i, j, theta } => {
                    let c = theta.to_radians().cos();
                    ElementSpec::beam_splitter((c * c).clamp(0.0, 1.0), *i, *j)
                }
                Element::PhaseShifter { mode, delta } => {
                    Ok(ElementSpec::phase_shifter(*delta, *mode))
                }
                Element::General3 { modes, t1, t2, t3 } => ElementSpec::new(
                    ElementKind::General3 {
                        theta1: *t1,
                        theta2: *t2,
                        theta3: *t3,
                    },
                    modes.to_vec(),
                ),
            })
            .collect()
    }

    pub fn outcome_branches(&self) -> loqc_core::Result<Vec<OutcomeBranch>> {
        self.branches
            .iter()
            .map(|b| {
                let pattern = DetectionPattern::new(b.pattern.iter().copied())?;
                let left = self.modes - b.pattern.len();
                Ok(match b.correction.as_deref() {
                    None => OutcomeBranch::new(pattern),
                    Some(name) => {
                        OutcomeBranch::with_correction(pattern, named_correction(name, left)?)
                    }
                })
            })
            .collect()
    }

    /// Modes named by any `detect` line, ascending.
    pub fn detected_modes(&self) -> Vec<usize> {
        let set: BTreeSet<usize> = self
            .branches
            .iter()
            .flat_map(|b| b.pattern.iter().map(|p| p.0))
            .collect();
        set.into_iter().collect()
    }
}

/// Transform on the `left` unmeasured modes for a named correction.
pub fn named_correction(name: &str, left: usize) -> loqc_core::Result<ModeTransform> {
    let zero = Complex::new(0.0, 0.0);
    let one = Complex::new(1.0, 0.0);
    let mut rows: Vec<Vec<Complex>> = (0..left)
        .map(|i| (0..left).map(|j| if i == j { one } else { zero }).collect())
        .collect();
    match name {
        "identity" => {}
        "flip" if left >= 1 => rows[0][0] = -one,
        "swap" if left >= 2 => {
            rows[0][0] = zero;
            rows[1][1] = zero;
            rows[0][1] = one;
            rows[1][0] = one;
        }
        "flip" | "swap" => {
            return Err(loqc_core::Error::InvalidCircuit(format!(
                "correction `{name}` needs more unmeasured modes than {left}"
            )))
        }
        _ => {
            return Err(loqc_core::Error::InvalidCircuit(format!(
                "unknown correction `{name}`"
            )))
        }
    }
    ModeTransform::from_rows(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    const NS: &str = "\
# NS gate
modes 3
input fock 2 1 0
gen3 0 1 2 t1=0.39269908169872414 t2=1.1437177404024204 t3=0.39269908169872414
detect 1=1 2=0
";

    #[test]
    fn parses_ns_file() {
        let c = parse_circuit(NS).unwrap();
        assert_eq!(c.modes, 3);
        assert_eq!(c.input, Some(InputSpec::Fock(vec![2, 1, 0])));
        assert_eq!(c.elements.len(), 1);
        assert_eq!(c.branches[0].pattern, vec![(1, 1), (2, 0)]);
    }

    #[test]
    fn round_trips() {
        let c = parse_circuit(NS).unwrap();
        assert_eq!(parse_circuit(&c.to_string()).unwrap(), c);
        let d = parse_circuit(
            "modes 6\ninput dualrail 0.5 0.5i -0.5 0.5-0.25i with 4=1\nbs 0 1 theta=30\nps 3 delta=-1.5\ndetect 4=1 5=0 correct swap\n",
        )
        .unwrap();
        assert_eq!(parse_circuit(&d.to_string()).unwrap(), d);
    }

    #[test]
    fn empty_file() {
        let e = parse_circuit("").unwrap_err();
        assert_eq!(e.message, "missing modes declaration");
        let e = parse_circuit("# nothing\n\n").unwrap_err();
        assert_eq!(e.message, "missing modes declaration");
        let e = parse_circuit("bs 0 1 eta=0.5\nmodes 2\n").unwrap_err();
        assert_eq!(
            (e.line, e.message.as_str()),
            (1, "missing modes declaration")
        );
    }

    #[test]
    fn range_error_is_positioned() {
        let e = parse_circuit("modes 3\nbs 0 7 eta=0.5\n").unwrap_err();
        assert_eq!((e.line, e.column), (2, 6));
        assert!(e.message.contains("out of range"));
    }

    #[test]
    fn other_diagnostics() {
        let cases = [
            ("modes 2\nmodes 3\n", 2, 1, "duplicate"),
            ("modes 2\nbs 0 1 eta=1.5\n", 2, 8, "outside"),
            ("modes 2\nbs 0 1\n", 2, 7, "expected"),
            ("modes 2\nfoo 1\n", 2, 1, "unknown statement"),
            ("modes 2\ninput fock 1\n", 2, 7, "expected 2"),
            ("modes 3\ngen3 0 1 1 t1=0 t2=0 t3=0\n", 2, 1, "distinct"),
            ("modes 2\ndetect 0=1 0=0\n", 2, 12, "twice"),
            (
                "modes 2\ndetect 0=1 correct fix\n",
                2,
                20,
                "unknown correction",
            ),
            ("modes 2\nps 0 delta=nan\n", 2, 6, "finite"),
            ("modes x\n", 1, 7, "positive"),
            ("modes 2\ninput dualrail 1 0 0\n", 2, 7, "2^q"),
            ("modes 2\nps 0 delta=1 extra\n", 2, 14, "unexpected"),
        ];
        for (text, line, column, msg) in cases {
            let e = parse_circuit(text).unwrap_err();
            assert_eq!((e.line, e.column), (line, column), "{text:?}: {e}");
            assert!(e.message.contains(msg), "{text:?}: {e}");
        }
    }

    #[test]
    fn comments_and_blank_lines() {
        let c = parse_circuit("  # header\nmodes 2 # two\n\nbs 0 1 eta=0.5#inline\n").unwrap();
        assert_eq!(
            c.elements,
            vec![Element::BeamSplitter {
                i: 0,
                j: 1,
                eta: 0.5
            }]
        );
    }

    #[test]
    fn theta_is_degrees() {
        let c = parse_circuit("modes 2\nbs 0 1 theta=60\n").unwrap();
        let specs = c.element_specs().unwrap();
        match specs[0].kind {
            ElementKind::BeamSplitter { eta } => assert!((eta - 0.25).abs() < 1e-12),
            _ => panic!("expected a beam splitter"),
        }
    }

    #[test]
    fn dual_rail_input_with_ancilla() {
        let c = parse_circuit("modes 5\ninput dualrail 0 1 with 4=1\n").unwrap();
        let s = c.input_state().unwrap();
        assert!((s.amplitude_of(&[0, 1, 0, 0, 1]).re - 1.0).abs() < 1e-12);
        let e = parse_circuit("modes 5\ninput dualrail 0 1 0 0 with 1=1\n").unwrap_err();
        assert!(e.message.contains("dual-rail qubits"));
    }

    #[test]
    fn corrections() {
        let s = named_correction("swap", 2).unwrap();
        assert_eq!(s.entry(0, 1), Complex::new(1.0, 0.0));
        assert!(named_correction("swap", 1).is_err());
        assert!(named_correction("flip", 0).is_err());
    }
}
