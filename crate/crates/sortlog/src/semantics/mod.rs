//! Model semantics: the bounded three-valued evaluator over full structures
//! and the exact two-valued evaluator over finite Henkin structures.

mod engine;
pub mod full;
pub mod henkin;

use std::fmt;

/// Three-valued evaluation verdict. `True` and `False` are final: no larger
/// budget can overturn them. `Unknown` means a bound was exhausted before
/// the search could decide.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    True,
    False,
    Unknown,
}

impl Verdict {
    pub fn negate(self) -> Verdict {
        match self {
            Verdict::True => Verdict::False,
            Verdict::False => Verdict::True,
            Verdict::Unknown => Verdict::Unknown,
        }
    }

    /// Kleene disjunction.
    pub fn or(self, other: Verdict) -> Verdict {
        match (self, other) {
            (Verdict::True, _) | (_, Verdict::True) => Verdict::True,
            (Verdict::False, Verdict::False) => Verdict::False,
            _ => Verdict::Unknown,
        }
    }

    /// Kleene conjunction.
    pub fn and(self, other: Verdict) -> Verdict {
        match (self, other) {
            (Verdict::False, _) | (_, Verdict::False) => Verdict::False,
            (Verdict::True, Verdict::True) => Verdict::True,
            _ => Verdict::Unknown,
        }
    }

    pub fn from_bool(b: bool) -> Verdict {
        if b {
            Verdict::True
        } else {
            Verdict::False
        }
    }

    pub fn definite(self) -> Option<bool> {
        match self {
            Verdict::True => Some(true),
            Verdict::False => Some(false),
            Verdict::Unknown => None,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Verdict::True => "True",
            Verdict::False => "False",
            Verdict::Unknown => "Unknown",
        };
        f.write_str(name)
    }
}

#[cfg(test)]
mod tests {
    use super::Verdict::{self, *};

    #[test]
    fn kleene_tables() {
        assert_eq!(True.negate(), False);
        assert_eq!(Unknown.negate(), Unknown);
        assert_eq!(True.or(Unknown), True);
        assert_eq!(False.or(Unknown), Unknown);
        assert_eq!(False.and(Unknown), False);
        assert_eq!(True.and(Unknown), Unknown);
        for v in [True, False, Unknown] {
            for w in [True, False, Unknown] {
                // De Morgan duality ties and/or through negation.
                assert_eq!(v.and(w), v.negate().or(w.negate()).negate());
            }
        }
    }

    #[test]
    fn verdicts_display() {
        assert_eq!(Verdict::True.to_string(), "True");
        assert_eq!(Verdict::Unknown.to_string(), "Unknown");
    }
}
