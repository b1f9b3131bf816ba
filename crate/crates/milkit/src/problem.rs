use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use crate::bk::builtin_arity;
use crate::error::{MilError, Result};
use crate::metarule::{self, MetaRule};
use crate::parse::Scanner;
use crate::term::{GroundAtom, GroundTerm};

/// The role a predicate symbol plays in a learning problem.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PredKind {
    /// Target predicate appearing in examples.
    Example,
    /// Invented predicate `p<i>` (1-based); never occurs in input problems.
    Skolem(usize),
    BkBinary,
    BkUnary,
}

/// Internal name of the i-th invented predicate (1-based).
pub fn skolem_name(i: usize) -> String {
    format!("p{i}")
}

/// Does `name` match the reserved invented-predicate pattern `p<digits>`?
pub fn is_skolem_name(name: &str) -> Option<usize> {
    let rest = name.strip_prefix('p')?;
    if rest.is_empty() || !rest.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    rest.parse::<usize>().ok().filter(|&i| i >= 1)
}

/// The predicate symbols of a problem, grouped by kind, each list sorted.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Signature {
    pub example_preds: Vec<String>,
    pub bk_binary: Vec<String>,
    pub bk_unary: Vec<String>,
}

impl Signature {
    pub fn kind_of(&self, name: &str) -> Option<PredKind> {
        if self.example_preds.iter().any(|p| p == name) {
            return Some(PredKind::Example);
        }
        if self.bk_binary.iter().any(|p| p == name) {
            return Some(PredKind::BkBinary);
        }
        if self.bk_unary.iter().any(|p| p == name) {
            return Some(PredKind::BkUnary);
        }
        is_skolem_name(name).map(PredKind::Skolem)
    }
}

/// A complete learning problem: background facts and builtins, positive and
/// negative examples, meta-rule templates, and search-mode declarations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MilProblem {
    pub facts_binary: BTreeMap<String, BTreeSet<(GroundTerm, GroundTerm)>>,
    pub facts_unary: BTreeMap<String, BTreeSet<GroundTerm>>,
    /// Declared builtin predicate names (resolved against the registry).
    pub builtins: BTreeSet<String>,
    pub pos: BTreeSet<(String, GroundTerm, GroundTerm)>,
    pub neg: BTreeSet<(String, GroundTerm, GroundTerm)>,
    /// Declaration order; candidate enumeration follows it.
    pub metarules: Vec<MetaRule>,
    pub max_skolems: usize,
    pub functional: bool,
}

pub const DEFAULT_MAX_SKOLEMS: usize = 3;

impl Default for MilProblem {
    fn default() -> Self {
        MilProblem {
            facts_binary: BTreeMap::new(),
            facts_unary: BTreeMap::new(),
            builtins: BTreeSet::new(),
            pos: BTreeSet::new(),
            neg: BTreeSet::new(),
            metarules: Vec::new(),
            max_skolems: DEFAULT_MAX_SKOLEMS,
            functional: false,
        }
    }
}

impl MilProblem {
    /// Predicate symbols by kind. Builtin arity comes from the registry.
    pub fn signature(&self) -> Signature {
        let mut example_preds: BTreeSet<&str> = BTreeSet::new();
        for (p, _, _) in self.pos.iter().chain(self.neg.iter()) {
            example_preds.insert(p);
        }
        let mut bk_binary: BTreeSet<&str> =
            self.facts_binary.keys().map(String::as_str).collect();
        let mut bk_unary: BTreeSet<&str> = self.facts_unary.keys().map(String::as_str).collect();
        for b in &self.builtins {
            match builtin_arity(b) {
                Some(2) => {
                    bk_binary.insert(b);
                }
                Some(1) => {
                    bk_unary.insert(b);
                }
                _ => {}
            }
        }
        Signature {
            example_preds: example_preds.into_iter().map(String::from).collect(),
            bk_binary: bk_binary.into_iter().map(String::from).collect(),
            bk_unary: bk_unary.into_iter().map(String::from).collect(),
        }
    }

    /// Every term occurring as an example or fact argument (top level).
    pub fn surface_terms(&self) -> BTreeSet<GroundTerm> {
        let mut out = BTreeSet::new();
        for (_, x, y) in self.pos.iter().chain(self.neg.iter()) {
            out.insert(x.clone());
            out.insert(y.clone());
        }
        for pairs in self.facts_binary.values() {
            for (x, y) in pairs {
                out.insert(x.clone());
                out.insert(y.clone());
            }
        }
        for terms in self.facts_unary.values() {
            for t in terms {
                out.insert(t.clone());
            }
        }
        out
    }

    pub fn metarule(&self, id: &str) -> Option<&MetaRule> {
        self.metarules.iter().find(|r| r.id == id)
    }
}

fn check_reserved(pred: &str, line: usize) -> Result<()> {
    if is_skolem_name(pred).is_some() {
        return Err(MilError::Parse {
            line,
            msg: format!("predicate name `{pred}` is reserved for invented predicates"),
        });
    }
    Ok(())
}

/// Parse a problem file. Line-oriented; `%` starts a comment; every
/// declaration ends with a dot.
pub fn parse_problem(text: &str) -> Result<MilProblem> {
    let mut p = MilProblem::default();
    let mut skolems_seen = false;
    let mut neg_lines: BTreeMap<(String, GroundTerm, GroundTerm), usize> = BTreeMap::new();
    let mut fact_arity: BTreeMap<String, (usize, usize)> = BTreeMap::new(); // pred -> (arity, line)

    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw_line.find('%') {
            Some(i) => &raw_line[..i],
            None => raw_line,
        };
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let body = line.strip_suffix('.').ok_or_else(|| MilError::Parse {
            line: line_no,
            msg: format!("declaration must end with a dot (in `{line}`)"),
        })?;
        let mut sc = Scanner::new(body, line_no);
        if sc.eat('#') {
            let directive = sc.lower_ident()?;
            match directive.as_str() {
                "metarule" => {
                    let id = sc.lower_ident()?;
                    let rule = if sc.eat(':') {
                        metarule::parse_inline(&id, &sc.rest(), line_no)?
                    } else {
                        sc.expect_end()?;
                        metarule::library_rule(&id).ok_or_else(|| MilError::UnknownRuleId(id.clone()))?
                    };
                    if p.metarules.iter().any(|r| r.id == rule.id) {
                        return Err(MilError::DuplicateMetaRule(rule.id));
                    }
                    p.metarules.push(rule);
                }
                "builtin" => {
                    let name = sc.lower_ident()?;
                    sc.expect('/')?;
                    let arity = sc.integer()?;
                    sc.expect_end()?;
                    if !(1..=2).contains(&arity) || builtin_arity(&name) != Some(arity as usize) {
                        return Err(MilError::UnknownBuiltin(format!("{name}/{arity}")));
                    }
                    p.builtins.insert(name);
                }
                "skolems" => {
                    let k = sc.integer()?;
                    sc.expect_end()?;
                    if k < 0 {
                        return Err(sc.err("skolem count cannot be negative"));
                    }
                    if skolems_seen {
                        return Err(sc.err("duplicate #skolems directive"));
                    }
                    skolems_seen = true;
                    p.max_skolems = k as usize;
                }
                "functional" => {
                    sc.expect_end()?;
                    p.functional = true;
                }
                other => {
                    return Err(MilError::Parse {
                        line: line_no,
                        msg: format!("unknown directive `#{other}`"),
                    });
                }
            }
            continue;
        }
        let keyword = sc.lower_ident()?;
        let atom = sc.ground_atom()?;
        sc.expect_end()?;
        match keyword.as_str() {
            "fact" => {
                check_reserved(&atom.pred, line_no)?;
                if let Some(&(arity, first_line)) = fact_arity.get(&atom.pred) {
                    if arity != atom.arity() {
                        return Err(MilError::Parse {
                            line: line_no,
                            msg: format!(
                                "predicate `{}` used with arity {} here but {} at line {}",
                                atom.pred,
                                atom.arity(),
                                arity,
                                first_line
                            ),
                        });
                    }
                } else {
                    fact_arity.insert(atom.pred.clone(), (atom.arity(), line_no));
                }
                match atom.arity() {
                    1 => {
                        p.facts_unary
                            .entry(atom.pred)
                            .or_default()
                            .insert(atom.args.into_iter().next().unwrap());
                    }
                    2 => {
                        let mut it = atom.args.into_iter();
                        let x = it.next().unwrap();
                        let y = it.next().unwrap();
                        p.facts_binary.entry(atom.pred).or_default().insert((x, y));
                    }
                    n => {
                        return Err(MilError::Parse {
                            line: line_no,
                            msg: format!("facts must be unary or binary, got arity {n}"),
                        });
                    }
                }
            }
            "pos" | "neg" => {
                check_reserved(&atom.pred, line_no)?;
                if atom.arity() != 2 {
                    return Err(MilError::NonBinaryExample(atom.to_string()));
                }
                let mut it = atom.args.into_iter();
                let tuple = (atom.pred, it.next().unwrap(), it.next().unwrap());
                if keyword == "pos" {
                    p.pos.insert(tuple);
                } else {
                    neg_lines.entry(tuple.clone()).or_insert(line_no);
                    p.neg.insert(tuple);
                }
            }
            other => {
                return Err(MilError::Parse {
                    line: line_no,
                    msg: format!("unknown declaration `{other}`"),
                });
            }
        }
    }

    if p.pos.is_empty() {
        return Err(MilError::NoPositiveExamples);
    }
    for tuple in &p.neg {
        if p.pos.contains(tuple) {
            let line = neg_lines.get(tuple).copied().unwrap_or(0);
            return Err(MilError::Parse {
                line,
                msg: format!(
                    "`{}({},{})` is declared both positive and negative",
                    tuple.0, tuple.1, tuple.2
                ),
            });
        }
    }
    for name in &p.builtins {
        if p.facts_binary.contains_key(name) || p.facts_unary.contains_key(name) {
            return Err(MilError::Parse {
                line: 0,
                msg: format!("`{name}` is declared both as a builtin and as an explicit fact predicate"),
            });
        }
    }
    let sig = p.signature();
    for e in &sig.example_preds {
        if sig.bk_binary.contains(e) || sig.bk_unary.contains(e) {
            return Err(MilError::Parse {
                line: 0,
                msg: format!("example predicate `{e}` clashes with a background predicate"),
            });
        }
    }
    Ok(p)
}

/// Render a problem back to DSL text; `parse_problem` accepts the output and
/// yields a structurally equal problem.
pub fn print_problem(p: &MilProblem) -> String {
    let mut out = String::new();
    for rule in &p.metarules {
        match metarule::library_rule(&rule.id) {
            Some(lib) if lib == *rule => {
                let _ = writeln!(out, "#metarule {}.", rule.id);
            }
            _ => {
                let _ = writeln!(out, "#metarule {rule}.");
            }
        }
    }
    for b in &p.builtins {
        let arity = builtin_arity(b).unwrap_or(2);
        let _ = writeln!(out, "#builtin {b}/{arity}.");
    }
    let _ = writeln!(out, "#skolems {}.", p.max_skolems);
    if p.functional {
        let _ = writeln!(out, "#functional.");
    }
    let mut facts: Vec<GroundAtom> = Vec::new();
    for (pred, pairs) in &p.facts_binary {
        for (x, y) in pairs {
            facts.push(GroundAtom::new(pred.clone(), vec![x.clone(), y.clone()]));
        }
    }
    for (pred, terms) in &p.facts_unary {
        for t in terms {
            facts.push(GroundAtom::new(pred.clone(), vec![t.clone()]));
        }
    }
    facts.sort();
    for a in facts {
        let _ = writeln!(out, "fact {a}.");
    }
    for (pred, x, y) in &p.pos {
        let _ = writeln!(out, "pos {pred}({x},{y}).");
    }
    for (pred, x, y) in &p.neg {
        let _ = writeln!(out, "neg {pred}({x},{y}).");
    }
    out
}

/// The four-fact family problem used throughout the worked examples: two
/// meta-rules, three positive examples, one negative.
#[cfg(test)]
pub fn family_problem() -> MilProblem {
    parse_problem(
        "#metarule base.\n\
         #metarule chain.\n\
         #skolems 1.\n\
         fact m(ann,bob).\n\
         fact f(john,bob).\n\
         fact m(sue,ann).\n\
         fact f(tim,ann).\n\
         pos a(sue,bob).\n\
         pos a(tim,bob).\n\
         pos a(john,bob).\n\
         neg a(bob,tim).\n",
    )
    .unwrap()
}
