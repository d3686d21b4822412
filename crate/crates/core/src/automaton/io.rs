//! DOT and JSON renderings.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{AutomatonError, SymbolicAutomaton, Transition};
use crate::predicate::to_dnf;
use crate::syntax::parse_predicate;

#[derive(Serialize, Deserialize)]
struct JsonEdge {
    src: usize,
    guard: String,
    dst: usize,
}

#[derive(Serialize, Deserialize)]
struct JsonAutomaton {
    variables: Vec<String>,
    locations: usize,
    initial: Vec<usize>,
    #[serde(rename = "final")]
    finals: Vec<usize>,
    transitions: Vec<JsonEdge>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    epsilon: Vec<(usize, usize)>,
}

impl SymbolicAutomaton {
    /// Graphviz rendering. Initial locations are drawn bold, final ones
    /// with a double circle.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph automaton {\n  rankdir=LR;\n");
        for q in 0..self.num_locations {
            let shape = if self.finals.contains(&q) { "doublecircle" } else { "circle" };
            let style = if self.initial.contains(&q) { ", style=bold" } else { "" };
            writeln!(s, "  q{q} [shape={shape}{style}];").unwrap();
        }
        for t in &self.transitions {
            let label = t.guard.to_string().replace('"', "\\\"");
            writeln!(s, "  q{} -> q{} [label=\"{label}\"];", t.src, t.dst).unwrap();
        }
        for (a, b) in &self.epsilon {
            writeln!(s, "  q{a} -> q{b} [label=\"eps\", style=dashed];").unwrap();
        }
        s.push_str("}\n");
        s
    }

    pub fn to_json(&self) -> String {
        let j = JsonAutomaton {
            variables: self.variables.clone(),
            locations: self.num_locations,
            initial: self.initial.iter().copied().collect(),
            finals: self.finals.iter().copied().collect(),
            transitions: self
                .transitions
                .iter()
                .map(|t| JsonEdge { src: t.src, guard: t.guard.to_string(), dst: t.dst })
                .collect(),
            epsilon: self.epsilon.clone(),
        };
        serde_json::to_string_pretty(&j).expect("plain data serializes")
    }

    pub fn from_json(src: &str) -> Result<SymbolicAutomaton, AutomatonError> {
        let j: JsonAutomaton = serde_json::from_str(src)?;
        let n = j.locations;
        let check = |q: usize| {
            if q < n {
                Ok(q)
            } else {
                Err(AutomatonError::Invalid(format!("location {q} out of range (0..{n})")))
            }
        };
        let mut a = SymbolicAutomaton::new(j.variables, n);
        for q in j.initial {
            a.initial.insert(check(q)?);
        }
        for q in j.finals {
            a.finals.insert(check(q)?);
        }
        for e in j.transitions {
            let mut guard = to_dnf(&parse_predicate(&e.guard)?);
            guard.wedge_minimal = guard.check_wedge_minimal();
            for v in guard.variables() {
                if !a.variables.contains(&v) {
                    return Err(AutomatonError::Invalid(format!("guard uses undeclared variable `{v}`")));
                }
            }
            a.transitions.push(Transition { src: check(e.src)?, guard, dst: check(e.dst)? });
        }
        for (s, d) in j.epsilon {
            a.epsilon.push((check(s)?, check(d)?));
        }
        Ok(a)
    }
}

#[cfg(test)]
mod test {
    use super::*;
    use crate::automaton::test::g;

    fn sample() -> SymbolicAutomaton {
        let mut a = SymbolicAutomaton::new(vec!["x".into(), "y".into()], 3);
        a.initial.insert(0);
        a.finals.insert(2);
        a.add_transition(0, g("true"), 0);
        a.add_transition(0, g("x <= 3 && !(y < 6)"), 1);
        a.add_transition(1, g("x <= 3 && !(y < 6)"), 2);
        a.add_transition(2, g("true"), 2);
        a
    }

    #[test]
    fn json_roundtrip() {
        let a = sample();
        let b = SymbolicAutomaton::from_json(&a.to_json()).unwrap();
        assert_eq!(a, b);
        assert!(b.transitions[1].guard.wedge_minimal);
    }

    #[test]
    fn json_errors() {
        let bad = r#"{"variables":["x"],"locations":1,"initial":[3],"final":[],"transitions":[]}"#;
        assert!(matches!(SymbolicAutomaton::from_json(bad), Err(AutomatonError::Invalid(_))));
        let bad = r#"{"variables":["x"],"locations":1,"initial":[0],"final":[],"transitions":[{"src":0,"dst":0,"guard":"z <= 1"}]}"#;
        assert!(matches!(SymbolicAutomaton::from_json(bad), Err(AutomatonError::Invalid(_))));
        assert!(matches!(SymbolicAutomaton::from_json("{"), Err(AutomatonError::Json(_))));
    }

    #[test]
    fn dot_shape() {
        let d = sample().to_dot();
        assert_eq!(d.matches("->").count(), 4);
        assert!(d.contains("q0 [shape=circle, style=bold]"));
        assert!(d.contains("q2 [shape=doublecircle]"));
    }
}
