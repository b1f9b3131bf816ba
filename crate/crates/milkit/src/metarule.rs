use std::collections::BTreeSet;
use std::fmt;

use crate::error::{MilError, Result};
use crate::parse::Scanner;

/// A binary body atom's predicate position: either a reference back to the
/// head slot (self-recursion, as in the tail-recursive template) or a named
/// higher-order slot of its own.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SlotRef {
    Head,
    Slot(String),
}

/// A second-order rule template: binary head, body of binary and unary atoms
/// over higher-order slots, plus ordering constraints `(head, body-slot)`
/// restricting which predicate symbols may fill the constrained slots.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MetaRule {
    pub id: String,
    pub head_slot: String,
    pub head_vars: (String, String),
    /// Ordered binary body atoms: (slot, first var, second var).
    pub body_binary: Vec<(SlotRef, String, String)>,
    /// Unary body atoms: (slot, var).
    pub body_unary: Vec<(String, String)>,
    /// Names of body slots constrained to lie strictly below the head in the
    /// predicate order.
    pub ord: BTreeSet<String>,
}

impl MetaRule {
    /// Assignable slots in canonical order: head, then binary body slots in
    /// body order (head references excluded), then unary slots.
    /// Meta-substitution assignments are vectors aligned with this order.
    pub fn slots(&self) -> Vec<&str> {
        let mut out = vec![self.head_slot.as_str()];
        for (slot, _, _) in &self.body_binary {
            if let SlotRef::Slot(name) = slot {
                out.push(name.as_str());
            }
        }
        for (slot, _) in &self.body_unary {
            out.push(slot.as_str());
        }
        out
    }

    pub fn slot_index(&self, name: &str) -> Option<usize> {
        self.slots().iter().position(|s| *s == name)
    }

    /// Number of assignable (non-head-reference) binary body slots.
    pub fn n_free_binary(&self) -> usize {
        self.body_binary
            .iter()
            .filter(|(s, _, _)| matches!(s, SlotRef::Slot(_)))
            .count()
    }

    /// Shape checks: binary head with distinct variables; at least one binary
    /// body atom; head and unary variables all occur in binary body atoms;
    /// slot identifiers distinct; ordering constraints reference declared
    /// binary body slots under the head slot.
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: &str| {
            Err(MilError::InvalidMetaRule {
                id: self.id.clone(),
                msg: msg.to_string(),
            })
        };
        if self.head_vars.0 == self.head_vars.1 {
            return fail("head variables must be distinct");
        }
        if self.body_binary.is_empty() {
            return fail("body must contain at least one binary atom");
        }
        let mut binary_vars: BTreeSet<&str> = BTreeSet::new();
        for (_, a, b) in &self.body_binary {
            binary_vars.insert(a);
            binary_vars.insert(b);
        }
        for v in [&self.head_vars.0, &self.head_vars.1] {
            if !binary_vars.contains(v.as_str()) {
                return fail(&format!("head variable `{v}` must occur in a binary body atom"));
            }
        }
        for (_, v) in &self.body_unary {
            if !binary_vars.contains(v.as_str()) {
                return fail(&format!("unary body variable `{v}` must occur in a binary body atom"));
            }
        }
        let mut seen: BTreeSet<&str> = BTreeSet::new();
        seen.insert(self.head_slot.as_str());
        let mut head_refs = 0usize;
        for (slot, _, _) in &self.body_binary {
            match slot {
                SlotRef::Head => head_refs += 1,
                SlotRef::Slot(name) => {
                    if !seen.insert(name.as_str()) {
                        return fail(&format!("slot `{name}` declared more than once"));
                    }
                }
            }
        }
        if head_refs > 1 {
            return fail("at most one body atom may reference the head slot");
        }
        for (slot, _) in &self.body_unary {
            if !seen.insert(slot.as_str()) {
                return fail(&format!("slot `{slot}` declared more than once"));
            }
        }
        let binary_slot_names: BTreeSet<&str> = self
            .body_binary
            .iter()
            .filter_map(|(s, _, _)| match s {
                SlotRef::Slot(name) => Some(name.as_str()),
                SlotRef::Head => None,
            })
            .collect();
        for name in &self.ord {
            if !binary_slot_names.contains(name.as_str()) {
                return fail(&format!(
                    "ordering constraint references `{name}`, which is not a binary body slot"
                ));
            }
        }
        Ok(())
    }

    /// True iff the binary body atoms can be arranged into a chain
    /// z0 → z1 → … → zk of distinct variables with head (z0, zk), and every
    /// unary body variable lies on the chain.
    pub fn is_forward_chained(&self) -> bool {
        let k = self.body_binary.len();
        if k == 0 {
            return false;
        }
        let mut order: Vec<usize> = (0..k).collect();
        let mut found = false;
        permute(&mut order, 0, &mut |perm| {
            if !found && self.chain_ok(perm) {
                found = true;
            }
        });
        found
    }

    fn chain_ok(&self, perm: &[usize]) -> bool {
        let mut chain_vars: Vec<&str> = vec![self.head_vars.0.as_str()];
        let mut current = self.head_vars.0.as_str();
        for &i in perm {
            let (_, a, b) = &self.body_binary[i];
            if a != current {
                return false;
            }
            current = b.as_str();
            chain_vars.push(current);
        }
        if current != self.head_vars.1 {
            return false;
        }
        let distinct: BTreeSet<&str> = chain_vars.iter().copied().collect();
        if distinct.len() != chain_vars.len() {
            return false;
        }
        self.body_unary.iter().all(|(_, v)| distinct.contains(v.as_str()))
    }
}

fn permute(items: &mut Vec<usize>, at: usize, visit: &mut impl FnMut(&[usize])) {
    if at == items.len() {
        visit(items);
        return;
    }
    for i in at..items.len() {
        items.swap(at, i);
        permute(items, at + 1, visit);
        items.swap(at, i);
    }
}

impl fmt::Display for MetaRule {
    /// Inline declaration form, reparsable via [`parse_inline`]:
    /// `chain: P(x,y) :- Q(x,z), R(z,y) | ord(P,Q), ord(P,R)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: {}({},{}) :- ",
            self.id, self.head_slot, self.head_vars.0, self.head_vars.1
        )?;
        let mut first = true;
        for (slot, a, b) in &self.body_binary {
            if !first {
                write!(f, ", ")?;
            }
            first = false;
            let name = match slot {
                SlotRef::Head => self.head_slot.as_str(),
                SlotRef::Slot(n) => n.as_str(),
            };
            write!(f, "{name}({a},{b})")?;
        }
        for (slot, v) in &self.body_unary {
            if !first {
                write!(f, ", ")?;
            }
            first = false;
            write!(f, "{slot}({v})")?;
        }
        if !self.ord.is_empty() {
            write!(f, " | ")?;
            for (i, name) in self.ord.iter().enumerate() {
                if i > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "ord({},{})", self.head_slot, name)?;
            }
        }
        Ok(())
    }
}

/// Parse the inline body of a meta-rule declaration (the text after
/// `#metarule <id>:` and before the final dot).
pub fn parse_inline(id: &str, text: &str, line_no: usize) -> Result<MetaRule> {
    let mut sc = Scanner::new(text, line_no);
    let head_slot = sc.upper_ident()?;
    sc.expect('(')?;
    let hx = sc.lower_ident()?;
    sc.expect(',')?;
    let hy = sc.lower_ident()?;
    sc.expect(')')?;
    sc.expect_str(":-")?;

    let mut body_binary = Vec::new();
    let mut body_unary = Vec::new();
    loop {
        let slot_name = sc.upper_ident()?;
        sc.expect('(')?;
        let v1 = sc.lower_ident()?;
        if sc.eat(',') {
            let v2 = sc.lower_ident()?;
            sc.expect(')')?;
            let slot = if slot_name == head_slot {
                SlotRef::Head
            } else {
                SlotRef::Slot(slot_name)
            };
            body_binary.push((slot, v1, v2));
        } else {
            sc.expect(')')?;
            if slot_name == head_slot {
                return Err(sc.err("unary body atom cannot reference the binary head slot"));
            }
            body_unary.push((slot_name, v1));
        }
        if !sc.eat(',') {
            break;
        }
    }

    let mut ord = BTreeSet::new();
    if sc.eat('|') {
        loop {
            let kw = sc.lower_ident()?;
            if kw != "ord" {
                return Err(sc.err("expected `ord(...)` constraint"));
            }
            sc.expect('(')?;
            let first = sc.upper_ident()?;
            sc.expect(',')?;
            let second = sc.upper_ident()?;
            sc.expect(')')?;
            if first != head_slot {
                return Err(sc.err("ordering constraints relate the head slot to a body slot"));
            }
            if second == head_slot {
                return Err(sc.err("ordering constraint cannot target the head slot itself"));
            }
            ord.insert(second);
            if !sc.eat(',') {
                break;
            }
        }
    }
    sc.expect_end()?;

    let rule = MetaRule {
        id: id.to_string(),
        head_slot,
        head_vars: (hx, hy),
        body_binary,
        body_unary,
        ord,
    };
    rule.validate()?;
    Ok(rule)
}

fn lib_rule(id: &str, text: &str) -> MetaRule {
    parse_inline(id, text, 0).expect("library meta-rule is well-formed")
}

/// The built-in template library, in canonical declaration order. Each rule
/// carries its default ordering constraints.
pub fn library() -> Vec<MetaRule> {
    vec![
        lib_rule("precon", "P(x,y) :- Q(x), R(x,y) | ord(P,R)"),
        lib_rule("postcon", "P(x,y) :- Q(x,y), R(y) | ord(P,Q)"),
        lib_rule("chain", "P(x,y) :- Q(x,z), R(z,y) | ord(P,Q), ord(P,R)"),
        lib_rule("tailrec", "P(x,y) :- Q(x,z), P(z,y) | ord(P,Q)"),
        lib_rule("base", "P(x,y) :- Q(x,y)"),
    ]
}

pub fn library_rule(id: &str) -> Option<MetaRule> {
    library().into_iter().find(|r| r.id == id)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn library_shapes() {
        let lib = library();
        let ids: Vec<&str> = lib.iter().map(|r| r.id.as_str()).collect();
        assert_eq!(ids, vec!["precon", "postcon", "chain", "tailrec", "base"]);
        for r in &lib {
            r.validate().unwrap();
        }
        let chain = library_rule("chain").unwrap();
        assert_eq!(chain.ord.iter().collect::<Vec<_>>(), vec!["Q", "R"]);
        assert_eq!(chain.n_free_binary(), 2);
        let tailrec = library_rule("tailrec").unwrap();
        assert_eq!(tailrec.ord.iter().collect::<Vec<_>>(), vec!["Q"]);
        assert_eq!(tailrec.n_free_binary(), 1);
        assert!(matches!(tailrec.body_binary[1].0, SlotRef::Head));
        let precon = library_rule("precon").unwrap();
        assert_eq!(precon.ord.iter().collect::<Vec<_>>(), vec!["R"]);
        assert_eq!(precon.body_unary.len(), 1);
        let postcon = library_rule("postcon").unwrap();
        assert_eq!(postcon.ord.iter().collect::<Vec<_>>(), vec!["Q"]);
        let base = library_rule("base").unwrap();
        assert!(base.ord.is_empty());
        assert!(library_rule("nope").is_none());
    }

    #[test]
    fn all_library_rules_are_forward_chained() {
        for r in library() {
            assert!(r.is_forward_chained(), "{} should be forward-chained", r.id);
        }
    }

    #[test]
    fn flipped_body_is_not_forward_chained() {
        let r = parse_inline("flip", "P(x,y) :- Q(y,x)", 1).unwrap();
        assert!(!r.is_forward_chained());
    }

    #[test]
    fn chain_detection_ignores_body_listing_order() {
        let r = parse_inline("rev", "P(x,y) :- R(z,y), Q(x,z)", 1).unwrap();
        assert!(r.is_forward_chained());
    }

    #[test]
    fn repeated_chain_variable_is_not_forward_chained() {
        // x → y → x revisits x: not a chain of distinct variables.
        let r = parse_inline("loop", "P(x,y) :- Q(x,z), R(z,x), S(x,y)", 1).unwrap();
        assert!(!r.is_forward_chained());
    }

    #[test]
    fn side_branch_is_not_forward_chained() {
        // R(x,u) cannot lie on any single chain from x to y.
        let r = parse_inline("off", "P(x,y) :- Q(x,y), R(x,u), S(u)", 1).unwrap();
        assert!(!r.is_forward_chained());
    }

    #[test]
    fn slots_are_canonically_ordered() {
        let chain = library_rule("chain").unwrap();
        assert_eq!(chain.slots(), vec!["P", "Q", "R"]);
        let tailrec = library_rule("tailrec").unwrap();
        assert_eq!(tailrec.slots(), vec!["P", "Q"]);
        let precon = library_rule("precon").unwrap();
        assert_eq!(precon.slots(), vec!["P", "R", "Q"]);
        assert_eq!(precon.slot_index("Q"), Some(2));
    }

    #[test]
    fn display_round_trips() {
        for r in library() {
            let shown = r.to_string();
            let (id, rest) = shown.split_once(": ").unwrap();
            let reparsed = parse_inline(id, rest, 1).unwrap();
            assert_eq!(reparsed, r, "round trip failed for {shown}");
        }
        let custom = parse_inline("tri", "P(x,y) :- Q(x,z), R(z,w), S(w,y), T(z) | ord(P,S)", 1)
            .unwrap();
        let shown = custom.to_string();
        let (id, rest) = shown.split_once(": ").unwrap();
        assert_eq!(parse_inline(id, rest, 1).unwrap(), custom);
        assert!(custom.is_forward_chained());
    }

    #[test]
    fn validation_rejects_malformed_templates() {
        // Head variable y does not occur in the body.
        assert!(parse_inline("bad", "P(x,y) :- Q(x,x)", 1).is_err());
        // Identical head variables.
        assert!(parse_inline("bad", "P(x,x) :- Q(x,x)", 1).is_err());
        // Duplicate slot identifier.
        assert!(parse_inline("bad", "P(x,y) :- Q(x,z), Q(z,y)", 1).is_err());
        // Unary variable not in any binary atom.
        assert!(parse_inline("bad", "P(x,y) :- Q(x,y), R(w)", 1).is_err());
        // No binary atom at all.
        assert!(parse_inline("bad", "P(x,y) :- Q(x)", 1).is_err());
        // Ordering constraint on an unknown slot.
        assert!(parse_inline("bad", "P(x,y) :- Q(x,y) | ord(P,R)", 1).is_err());
        // Ordering constraint on a unary slot.
        assert!(parse_inline("bad", "P(x,y) :- Q(x,y), R(y) | ord(P,R)", 1).is_err());
        // Ordering constraint not anchored at the head.
        assert!(parse_inline("bad", "P(x,y) :- Q(x,z), R(z,y) | ord(Q,R)", 1).is_err());
        // Self-targeting ordering constraint.
        assert!(parse_inline("bad", "P(x,y) :- Q(x,z), P(z,y) | ord(P,P)", 1).is_err());
        // Two head references.
        assert!(parse_inline("bad", "P(x,y) :- P(x,z), P(z,y)", 1).is_err());
        // Unary head reference.
        assert!(parse_inline("bad", "P(x,y) :- Q(x,y), P(y)", 1).is_err());
    }

    #[test]
    fn parse_errors_reject_garbage() {
        assert!(parse_inline("bad", "P(x,y) : - Q(x,y)", 1).is_err());
        assert!(parse_inline("bad", "p(x,y) :- Q(x,y)", 1).is_err());
        assert!(parse_inline("bad", "P(X,y) :- Q(X,y)", 1).is_err());
        assert!(parse_inline("bad", "P(x,y) :- Q(x,y) extra", 1).is_err());
        assert!(parse_inline("bad", "P(x,y) :- Q(x,y,z)", 1).is_err());
    }
}
