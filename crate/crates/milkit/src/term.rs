use std::fmt;

/// A ground first-order term: symbol constant, integer, list, or compound.
///
/// The derived `Ord` gives every term a fixed canonical position, which the
/// engine relies on for deterministic iteration everywhere (all observable
/// orders are sorted, never hash order).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GroundTerm {
    Sym(String),
    Int(i64),
    List(Vec<GroundTerm>),
    Compound(String, Vec<GroundTerm>),
}

impl GroundTerm {
    pub fn sym(s: impl Into<String>) -> Self {
        GroundTerm::Sym(s.into())
    }

    pub fn int(i: i64) -> Self {
        GroundTerm::Int(i)
    }

    pub fn list(items: Vec<GroundTerm>) -> Self {
        GroundTerm::List(items)
    }

    pub fn compound(functor: impl Into<String>, args: Vec<GroundTerm>) -> Self {
        GroundTerm::Compound(functor.into(), args)
    }

    /// For list terms, the elements; `None` otherwise.
    pub fn as_list(&self) -> Option<&[GroundTerm]> {
        match self {
            GroundTerm::List(items) => Some(items),
            _ => None,
        }
    }

    pub fn as_int(&self) -> Option<i64> {
        match self {
            GroundTerm::Int(i) => Some(*i),
            _ => None,
        }
    }

    pub fn as_sym(&self) -> Option<&str> {
        match self {
            GroundTerm::Sym(s) => Some(s),
            _ => None,
        }
    }

    /// All terms reachable from `self`, including `self` (pre-order).
    pub fn subterms(&self) -> Vec<&GroundTerm> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(t) = stack.pop() {
            out.push(t);
            match t {
                GroundTerm::List(items) => stack.extend(items.iter()),
                GroundTerm::Compound(_, args) => stack.extend(args.iter()),
                _ => {}
            }
        }
        out
    }
}

impl fmt::Display for GroundTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroundTerm::Sym(s) => write!(f, "{s}"),
            GroundTerm::Int(i) => write!(f, "{i}"),
            GroundTerm::List(items) => {
                write!(f, "[")?;
                for (i, t) in items.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{t}")?;
                }
                write!(f, "]")
            }
            GroundTerm::Compound(functor, args) => {
                write!(f, "{functor}(")?;
                for (i, t) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{t}")?;
                }
                write!(f, ")")
            }
        }
    }
}

/// A ground atom: predicate name applied to ground terms.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroundAtom {
    pub pred: String,
    pub args: Vec<GroundTerm>,
}

impl GroundAtom {
    pub fn new(pred: impl Into<String>, args: Vec<GroundTerm>) -> Self {
        GroundAtom {
            pred: pred.into(),
            args,
        }
    }

    pub fn arity(&self) -> usize {
        self.args.len()
    }
}

impl fmt::Display for GroundAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.args.is_empty() {
            return write!(f, "{}", self.pred);
        }
        write!(f, "{}(", self.pred)?;
        for (i, t) in self.args.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{t}")?;
        }
        write!(f, ")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_symbols_and_ints() {
        assert_eq!(GroundTerm::sym("abc").to_string(), "abc");
        assert_eq!(GroundTerm::int(-7).to_string(), "-7");
        assert_eq!(GroundTerm::int(0).to_string(), "0");
    }

    #[test]
    fn display_lists() {
        assert_eq!(GroundTerm::list(vec![]).to_string(), "[]");
        let t = GroundTerm::list(vec![
            GroundTerm::sym("c"),
            GroundTerm::sym("a"),
            GroundTerm::sym("b"),
        ]);
        assert_eq!(t.to_string(), "[c,a,b]");
        let nested = GroundTerm::list(vec![t.clone(), GroundTerm::list(vec![])]);
        assert_eq!(nested.to_string(), "[[c,a,b],[]]");
    }

    #[test]
    fn display_compounds() {
        let load = GroundTerm::compound("load", vec![GroundTerm::sym("circ"), GroundTerm::int(1)]);
        let car = GroundTerm::compound(
            "car",
            vec![
                GroundTerm::sym("rect"),
                GroundTerm::sym("short"),
                GroundTerm::sym("none"),
                GroundTerm::int(2),
                load,
            ],
        );
        assert_eq!(car.to_string(), "car(rect,short,none,2,load(circ,1))");
    }

    #[test]
    fn display_atoms() {
        let a = GroundAtom::new(
            "remove",
            vec![
                GroundTerm::list(vec![GroundTerm::sym("c"), GroundTerm::sym("a")]),
                GroundTerm::list(vec![GroundTerm::sym("a")]),
            ],
        );
        assert_eq!(a.to_string(), "remove([c,a],[a])");
        let u = GroundAtom::new("firstA", vec![GroundTerm::list(vec![GroundTerm::sym("a")])]);
        assert_eq!(u.to_string(), "firstA([a])");
    }

    #[test]
    fn ordering_is_total_and_stable() {
        let mut v = vec![
            GroundTerm::list(vec![GroundTerm::sym("a")]),
            GroundTerm::int(3),
            GroundTerm::sym("z"),
            GroundTerm::sym("a"),
            GroundTerm::compound("f", vec![GroundTerm::int(1)]),
        ];
        v.sort();
        let shown: Vec<String> = v.iter().map(|t| t.to_string()).collect();
        // Variant order: Sym < Int < List < Compound; within a variant, payload order.
        assert_eq!(shown, vec!["a", "z", "3", "[a]", "f(1)"]);
    }

    #[test]
    fn subterms_reach_nested_structure() {
        let t = GroundTerm::compound(
            "place",
            vec![
                GroundTerm::int(2),
                GroundTerm::compound("cup", vec![GroundTerm::sym("up"), GroundTerm::sym("empty")]),
            ],
        );
        let subs = t.subterms();
        assert!(subs.contains(&&GroundTerm::sym("up")));
        assert!(subs.contains(&&GroundTerm::int(2)));
        assert!(subs.contains(&&t));
        assert_eq!(subs.len(), 5);
    }
}
