//! Reader for the line-oriented circuit format.
//!
//! ```text
//! // comment
//! qreg q[3];
//! h q[0];
//! cx q[0],q[1];
//! cp(-pi/2^3) q[1],q[2];
//! ry(1.910633236249019) q[2];
//! ```
//!
//! Statements end with `;`. The register declaration must come first and
//! appear once. Angles are decimal literals, `[-]pi/<int>` or
//! `[-]pi/2^<int>`.

use crate::numerics::Angle;

use super::{Circuit, Gate, GateKind, QuantumError, Qubit, Result};

struct Statement {
    line: usize,
    text: String,
}

fn statements(text: &str) -> Result<Vec<Statement>> {
    let mut out = Vec::new();
    let mut buf = String::new();
    let mut start = 0;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let code = raw.split_once("//").map_or(raw, |(c, _)| c);
        for ch in code.chars() {
            if ch == ';' {
                out.push(Statement {
                    line: start,
                    text: buf.trim().to_string(),
                });
                buf.clear();
            } else {
                if buf.trim().is_empty() && !ch.is_whitespace() {
                    start = line;
                }
                buf.push(ch);
            }
        }
        buf.push(' ');
    }
    if !buf.trim().is_empty() {
        return Err(QuantumError::Syntax {
            line: start,
            msg: "missing `;`".into(),
        });
    }
    Ok(out)
}

fn syntax(line: usize, msg: impl Into<String>) -> QuantumError {
    QuantumError::Syntax {
        line,
        msg: msg.into(),
    }
}

/// `q[<int>]`
fn qubit_ref(line: usize, s: &str) -> Result<Qubit> {
    let inner = s
        .trim()
        .strip_prefix("q[")
        .and_then(|r| r.strip_suffix(']'))
        .ok_or_else(|| syntax(line, format!("expected `q[<index>]`, found `{}`", s.trim())))?;
    let inner = inner.trim();
    if inner.is_empty() || !inner.bytes().all(|b| b.is_ascii_digit()) {
        return Err(syntax(line, format!("bad qubit index `{inner}`")));
    }
    inner
        .parse()
        .map_err(|_| syntax(line, format!("qubit index `{inner}` too large")))
}

fn register(st: &Statement) -> Result<u32> {
    let rest = st
        .text
        .strip_prefix("qreg")
        .filter(|r| r.starts_with(char::is_whitespace))
        .ok_or_else(|| syntax(st.line, "expected `qreg q[<n>];` before any gate"))?;
    let n = qubit_ref(st.line, rest)?;
    if n == 0 {
        return Err(syntax(st.line, "register must hold at least one qubit"));
    }
    Ok(n)
}

fn gate(st: &Statement) -> Result<Gate> {
    let line = st.line;
    let text = st.text.as_str();
    let name_end = text
        .find(|c: char| !(c.is_ascii_alphanumeric() || c == '_'))
        .unwrap_or(text.len());
    let (name, mut rest) = text.split_at(name_end);
    if name.is_empty() {
        return Err(syntax(line, format!("expected a gate name, found `{text}`")));
    }
    let mut angle = None;
    if let Some(r) = rest.trim_start().strip_prefix('(') {
        let (arg, after) = r
            .split_once(')')
            .ok_or_else(|| syntax(line, "unclosed `(`"))?;
        let a: Angle = arg
            .trim()
            .parse()
            .map_err(|_| syntax(line, format!("bad angle `{}`", arg.trim())))?;
        angle = Some(a);
        rest = after;
    }
    let kind = match (name, angle) {
        ("h", None) => GateKind::H,
        ("x", None) => GateKind::X,
        ("z", None) => GateKind::Z,
        ("cx", None) => GateKind::CX,
        ("ccx", None) => GateKind::CCX,
        ("ry", Some(a)) => GateKind::RY(a),
        ("rz", Some(a)) => GateKind::RZ(a),
        ("p", Some(a)) => GateKind::P(a),
        ("cp", Some(a)) => GateKind::CP(a),
        ("h" | "x" | "z" | "cx" | "ccx", Some(_)) => {
            return Err(syntax(line, format!("`{name}` takes no angle")))
        }
        ("ry" | "rz" | "p" | "cp", None) => {
            return Err(syntax(line, format!("`{name}` needs an angle")))
        }
        _ => {
            return Err(QuantumError::UnknownGate {
                line,
                name: name.to_string(),
            })
        }
    };
    if !rest.starts_with(char::is_whitespace) {
        return Err(syntax(line, "expected whitespace before the qubit list"));
    }
    let qubits = rest
        .split(',')
        .map(|s| qubit_ref(line, s))
        .collect::<Result<Vec<_>>>()?;
    Gate::new(kind, qubits).map_err(|e| QuantumError::AtLine {
        line,
        source: Box::new(e),
    })
}

pub fn parse_circuit(text: &str) -> Result<Circuit> {
    let stmts = statements(text)?;
    let mut iter = stmts.iter().filter(|s| !s.text.is_empty());
    let first = iter
        .next()
        .ok_or_else(|| syntax(1, "empty circuit file; expected `qreg q[<n>];`"))?;
    let n = register(first)?;
    let mut c = Circuit::new(n);
    for st in iter {
        if st.text.starts_with("qreg") {
            return Err(syntax(st.line, "only one register may be declared"));
        }
        let g = gate(st)?;
        c.push(g).map_err(|e| QuantumError::AtLine {
            line: st.line,
            source: Box::new(e),
        })?;
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn maps_statements_to_gates() {
        let c = parse_circuit("qreg q[2]; h q[0]; cx q[0],q[1];").unwrap();
        assert_eq!(c.n(), 2);
        assert_eq!(c.gates(), &[Gate::h(0), Gate::cx(0, 1)]);
    }

    #[test]
    fn angles_and_comments() {
        let text = "// header\nqreg q[3];\n\nry(1.910633236249019) q[0]; // tail\ncp(-pi/2^3) q[1], q[2];\np(pi/4) q[2];\n";
        let c = parse_circuit(text).unwrap();
        assert_eq!(
            c.gates()[0],
            Gate::ry(Angle::Decimal("1.910633236249019".into()), 0)
        );
        assert_eq!(c.gates()[1], Gate::cp(Angle::minus_pi_over(8), 1, 2));
        assert_eq!(c.gates()[2], Gate::p(Angle::pi_over(4), 2));
    }

    #[test]
    fn reports_line_numbers() {
        let err = parse_circuit("qreg q[2];\nh q[0];\nfoo q[1];\n").unwrap_err();
        assert_eq!(
            err,
            QuantumError::UnknownGate {
                line: 3,
                name: "foo".into()
            }
        );
        let err = parse_circuit("qreg q[2];\n\nh q[2];").unwrap_err();
        assert!(matches!(err, QuantumError::AtLine { line: 3, .. }), "{err:?}");
        assert!(err.to_string().contains("out of range"));
        let err = parse_circuit("qreg q[2];\nh q[0]\n").unwrap_err();
        assert!(matches!(err, QuantumError::Syntax { line: 2, .. }), "{err:?}");
    }

    #[test]
    fn rejects_malformed_input() {
        for bad in [
            "",
            "h q[0];",
            "qreg q[0];",
            "qreg q[2]; qreg q[3];",
            "qreg q[2]; ry q[0];",
            "qreg q[2]; h(pi/2) q[0];",
            "qreg q[2]; ry(2*pi) q[0];",
            "qreg q[2]; cx q[0];",
            "qreg q[2]; cx q[1],q[1];",
            "qreg q[2]; h r[0];",
            "qreg q[2]; h q[-1];",
            "qreg q[2]; hq[0];",
            "qreg q[2]; ry(pi/4 q[0];",
            "OPENQASM 2.0; qreg q[2];",
        ] {
            assert!(parse_circuit(bad).is_err(), "{bad:?}");
        }
    }
}
