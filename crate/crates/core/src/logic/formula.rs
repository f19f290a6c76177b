//! Sentences over `⟨V ∪ E, ∈⟩` with derived macros, and their s-expression
//! text form.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// First-order formula. Variables range over vertices and edges alike; the
/// macro nodes expand into the core connectives.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Formula {
    True,
    False,
    Eq(String, String),
    /// `x ∈ y`: `x` is a vertex belonging to the edge `y`.
    In(String, String),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Exists(String, Box<Formula>),
    Forall(String, Box<Formula>),
    /// `v(x) ≡ ∀y ¬(y ∈ x)`.
    IsVertex(String),
    /// `e(x) ≡ ∃y (y ∈ x)`.
    IsEdge(String),
    /// `|x| = k`: exactly `k` members.
    Size(String, usize),
    /// `x ∼ y ≡ ∃e (x ∈ e ∧ y ∈ e)`.
    Adj(String, String),
    /// `x` and `y` lie together in at least `m` distinct edges of size `k`.
    AdjCount {
        x: String,
        y: String,
        m: usize,
        k: usize,
    },
    /// Exactly `k` distinct ∈-neighbours, on either side.
    Deg(String, usize),
}

pub fn var(name: &str) -> String {
    name.to_string()
}

impl Formula {
    pub fn is_in(x: &str, y: &str) -> Formula {
        Formula::In(var(x), var(y))
    }

    pub fn eq(x: &str, y: &str) -> Formula {
        Formula::Eq(var(x), var(y))
    }

    pub fn ne(x: &str, y: &str) -> Formula {
        Formula::eq(x, y).not()
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(self) -> Formula {
        Formula::Not(Box::new(self))
    }

    pub fn implies(self, other: Formula) -> Formula {
        Formula::Implies(Box::new(self), Box::new(other))
    }

    pub fn exists(x: &str, body: Formula) -> Formula {
        Formula::Exists(var(x), Box::new(body))
    }

    pub fn forall(x: &str, body: Formula) -> Formula {
        Formula::Forall(var(x), Box::new(body))
    }

    /// `∃x1 ∃x2 ... body`.
    pub fn exists_all(xs: &[&str], body: Formula) -> Formula {
        xs.iter().rev().fold(body, |f, x| Formula::exists(x, f))
    }

    /// `∀x1 ∀x2 ... body`.
    pub fn forall_all(xs: &[&str], body: Formula) -> Formula {
        xs.iter().rev().fold(body, |f, x| Formula::forall(x, f))
    }

    /// Every variable name appearing in the formula, bound or free.
    pub fn variables(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Eq(a, b) | Formula::In(a, b) | Formula::Adj(a, b) => {
                out.insert(a.clone());
                out.insert(b.clone());
            }
            Formula::AdjCount { x, y, .. } => {
                out.insert(x.clone());
                out.insert(y.clone());
            }
            Formula::IsVertex(a) | Formula::IsEdge(a) | Formula::Size(a, _) | Formula::Deg(a, _) => {
                out.insert(a.clone());
            }
            Formula::Not(f) => f.collect_vars(out),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().for_each(|f| f.collect_vars(out)),
            Formula::Implies(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Formula::Exists(x, f) | Formula::Forall(x, f) => {
                out.insert(x.clone());
                f.collect_vars(out);
            }
        }
    }

    /// Free variables, in name order.
    pub fn free_variables(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        let mut note = |x: &String, bound: &Vec<String>| {
            if !bound.contains(x) {
                out.insert(x.clone());
            }
        };
        match self {
            Formula::True | Formula::False => {}
            Formula::Eq(a, b) | Formula::In(a, b) | Formula::Adj(a, b) => {
                note(a, bound);
                note(b, bound);
            }
            Formula::AdjCount { x, y, .. } => {
                note(x, bound);
                note(y, bound);
            }
            Formula::IsVertex(a) | Formula::IsEdge(a) | Formula::Size(a, _) | Formula::Deg(a, _) => {
                note(a, bound)
            }
            Formula::Not(f) => f.collect_free(bound, out),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().for_each(|f| f.collect_free(bound, out)),
            Formula::Implies(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::Exists(x, f) | Formula::Forall(x, f) => {
                bound.push(x.clone());
                f.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    pub fn is_sentence(&self) -> bool {
        self.free_variables().is_empty()
    }

    /// Equivalent formula using only the core connectives. Macro expansions
    /// introduce fresh variables that do not clash with existing names.
    pub fn expand(&self) -> Formula {
        let taken = self.variables();
        let mut fresh = Fresh { taken, next: 0 };
        self.expand_with(&mut fresh)
    }

    fn expand_with(&self, fresh: &mut Fresh) -> Formula {
        match self {
            Formula::True | Formula::False | Formula::Eq(..) | Formula::In(..) => self.clone(),
            Formula::Not(f) => f.expand_with(fresh).not(),
            Formula::And(fs) => Formula::And(fs.iter().map(|f| f.expand_with(fresh)).collect()),
            Formula::Or(fs) => Formula::Or(fs.iter().map(|f| f.expand_with(fresh)).collect()),
            Formula::Implies(a, b) => a.expand_with(fresh).implies(b.expand_with(fresh)),
            Formula::Exists(x, f) => Formula::Exists(x.clone(), Box::new(f.expand_with(fresh))),
            Formula::Forall(x, f) => Formula::Forall(x.clone(), Box::new(f.expand_with(fresh))),
            Formula::IsVertex(x) => {
                let y = fresh.take();
                Formula::forall(&y, Formula::is_in(&y, x).not())
            }
            Formula::IsEdge(x) => {
                let y = fresh.take();
                Formula::exists(&y, Formula::is_in(&y, x))
            }
            Formula::Size(x, k) => exactly(fresh, *k, |y| Formula::is_in(y, x)),
            Formula::Deg(x, k) => exactly(fresh, *k, |y| {
                Formula::Or(vec![Formula::is_in(x, y), Formula::is_in(y, x)])
            }),
            Formula::Adj(x, y) => {
                let e = fresh.take();
                Formula::exists(&e, Formula::And(vec![Formula::is_in(x, &e), Formula::is_in(y, &e)]))
            }
            Formula::AdjCount { x, y, m, k } => {
                let names: Vec<String> = (0..*m).map(|_| fresh.take()).collect();
                let mut body = Formula::True;
                for i in (0..*m).rev() {
                    let e = &names[i];
                    let mut parts = vec![Formula::is_in(x, e), Formula::is_in(y, e)];
                    parts.extend(names[..i].iter().map(|p| Formula::ne(e, p)));
                    parts.push(Formula::Size(e.clone(), *k).expand_with(fresh));
                    parts.push(body);
                    body = Formula::exists(e, Formula::And(parts));
                }
                body
            }
        }
    }

    /// Maximal quantifier nesting of the expanded formula.
    pub fn quantifier_depth(&self) -> usize {
        fn depth(f: &Formula) -> usize {
            match f {
                Formula::True | Formula::False | Formula::Eq(..) | Formula::In(..) => 0,
                Formula::Not(f) => depth(f),
                Formula::And(fs) | Formula::Or(fs) => fs.iter().map(depth).max().unwrap_or(0),
                Formula::Implies(a, b) => depth(a).max(depth(b)),
                Formula::Exists(_, f) | Formula::Forall(_, f) => 1 + depth(f),
                _ => unreachable!("expanded formula has no macros"),
            }
        }
        depth(&self.expand())
    }

    /// Closes the formula existentially over its free variables.
    pub fn close_existentially(self) -> Formula {
        let free: Vec<String> = self.free_variables().into_iter().collect();
        free.iter().rev().fold(self, |f, x| Formula::Exists(x.clone(), Box::new(f)))
    }

    pub fn to_sexpr(&self) -> String {
        self.to_string()
    }
}

struct Fresh {
    taken: BTreeSet<String>,
    next: usize,
}

impl Fresh {
    fn take(&mut self) -> String {
        loop {
            let name = format!("_{}", self.next);
            self.next += 1;
            if !self.taken.contains(&name) {
                return name;
            }
        }
    }
}

/// Exactly `k` distinct `y` with `rel(y)`, as nested guarded existentials
/// closed by a universal.
fn exactly(fresh: &mut Fresh, k: usize, rel: impl Fn(&str) -> Formula) -> Formula {
    let ys: Vec<String> = (0..k).map(|_| fresh.take()).collect();
    let u = fresh.take();
    let others: Vec<Formula> = ys.iter().map(|y| Formula::eq(&u, y)).collect();
    let mut body = Formula::forall(&u, rel(&u).implies(Formula::Or(others)));
    for i in (0..k).rev() {
        let y = &ys[i];
        let mut parts = vec![rel(y)];
        parts.extend(ys[..i].iter().map(|p| Formula::ne(y, p)));
        parts.push(body);
        body = Formula::exists(y, Formula::And(parts));
    }
    body
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |f: &mut fmt::Formatter<'_>, head: &str, items: &[Formula]| {
            write!(f, "({head}")?;
            for x in items {
                write!(f, " {x}")?;
            }
            write!(f, ")")
        };
        match self {
            Formula::True => write!(f, "true"),
            Formula::False => write!(f, "false"),
            Formula::Eq(a, b) => write!(f, "(eq {a} {b})"),
            Formula::In(a, b) => write!(f, "(in {a} {b})"),
            Formula::Not(x) => write!(f, "(not {x})"),
            Formula::And(xs) => list(f, "and", xs),
            Formula::Or(xs) => list(f, "or", xs),
            Formula::Implies(a, b) => write!(f, "(implies {a} {b})"),
            Formula::Exists(x, b) => write!(f, "(exists {x} {b})"),
            Formula::Forall(x, b) => write!(f, "(forall {x} {b})"),
            Formula::IsVertex(x) => write!(f, "(v {x})"),
            Formula::IsEdge(x) => write!(f, "(e {x})"),
            Formula::Size(x, k) => write!(f, "(size {x} {k})"),
            Formula::Adj(x, y) => write!(f, "(adj {x} {y})"),
            Formula::AdjCount { x, y, m, k } => write!(f, "(adj {x} {y} {m} {k})"),
            Formula::Deg(x, k) => write!(f, "(deg {x} {k})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Sexp {
    Atom(String, usize),
    List(Vec<Sexp>, usize),
}

impl Sexp {
    fn offset(&self) -> usize {
        match self {
            Sexp::Atom(_, o) | Sexp::List(_, o) => *o,
        }
    }
}

fn tokenize(text: &str) -> Result<Sexp> {
    let mut stack: Vec<(Vec<Sexp>, usize)> = Vec::new();
    let mut done: Option<Sexp> = None;
    let bytes: Vec<(usize, char)> = text.char_indices().collect();
    let mut i = 0;
    while i < bytes.len() {
        let (pos, c) = bytes[i];
        if c == ';' {
            while i < bytes.len() && bytes[i].1 != '\n' {
                i += 1;
            }
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if done.is_some() {
            return Err(Error::parse(format!("offset {pos}"), "trailing input after formula"));
        }
        let item = match c {
            '(' => {
                stack.push((Vec::new(), pos));
                i += 1;
                continue;
            }
            ')' => {
                let (items, start) = stack
                    .pop()
                    .ok_or_else(|| Error::parse(format!("offset {pos}"), "unbalanced ')'"))?;
                i += 1;
                Sexp::List(items, start)
            }
            _ => {
                let start = i;
                while i < bytes.len() && !bytes[i].1.is_whitespace() && !"();".contains(bytes[i].1) {
                    i += 1;
                }
                let word: String = bytes[start..i].iter().map(|p| p.1).collect();
                Sexp::Atom(word, pos)
            }
        };
        match stack.last_mut() {
            Some((items, _)) => items.push(item),
            None => done = Some(item),
        }
    }
    if let Some((_, start)) = stack.last() {
        return Err(Error::parse(format!("offset {start}"), "unclosed '('"));
    }
    done.ok_or_else(|| Error::parse("offset 0", "empty input"))
}

fn is_identifier(word: &str) -> bool {
    let mut chars = word.chars();
    chars.next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
        && !matches!(word, "true" | "false")
}

fn build(s: &Sexp) -> Result<Formula> {
    let at = |o: usize| format!("offset {o}");
    match s {
        Sexp::Atom(w, o) => match w.as_str() {
            "true" => Ok(Formula::True),
            "false" => Ok(Formula::False),
            _ => Err(Error::parse(at(*o), format!("expected a formula, found `{w}`"))),
        },
        Sexp::List(items, o) => {
            let (head, args) = match items.split_first() {
                Some((Sexp::Atom(h, _), rest)) => (h.as_str(), rest),
                _ => return Err(Error::parse(at(*o), "expected an operator name")),
            };
            let ident = |i: usize| -> Result<String> {
                match args.get(i) {
                    Some(Sexp::Atom(w, _)) if is_identifier(w) => Ok(w.clone()),
                    Some(other) => Err(Error::parse(at(other.offset()), "expected a variable name")),
                    None => Err(Error::parse(at(*o), format!("`{head}` is missing an argument"))),
                }
            };
            let number = |i: usize| -> Result<usize> {
                match args.get(i) {
                    Some(Sexp::Atom(w, wo)) => w
                        .parse()
                        .map_err(|_| Error::parse(at(*wo), format!("expected a count, found `{w}`"))),
                    Some(other) => Err(Error::parse(at(other.offset()), "expected a count")),
                    None => Err(Error::parse(at(*o), format!("`{head}` is missing an argument"))),
                }
            };
            let arity = |n: usize| -> Result<()> {
                if args.len() == n {
                    Ok(())
                } else {
                    Err(Error::parse(
                        at(*o),
                        format!("`{head}` takes {n} arguments, found {}", args.len()),
                    ))
                }
            };
            match head {
                "eq" | "in" => {
                    arity(2)?;
                    let (a, b) = (ident(0)?, ident(1)?);
                    Ok(if head == "eq" { Formula::Eq(a, b) } else { Formula::In(a, b) })
                }
                "not" => {
                    arity(1)?;
                    Ok(build(&args[0])?.not())
                }
                "and" => Ok(Formula::And(args.iter().map(build).collect::<Result<_>>()?)),
                "or" => Ok(Formula::Or(args.iter().map(build).collect::<Result<_>>()?)),
                "implies" => {
                    arity(2)?;
                    Ok(build(&args[0])?.implies(build(&args[1])?))
                }
                "exists" | "forall" => {
                    arity(2)?;
                    let vars = match &args[0] {
                        Sexp::Atom(..) => vec![ident(0)?],
                        Sexp::List(vs, vo) if !vs.is_empty() => vs
                            .iter()
                            .map(|v| match v {
                                Sexp::Atom(w, _) if is_identifier(w) => Ok(w.clone()),
                                other => Err(Error::parse(at(other.offset()), "expected a variable name")),
                            })
                            .collect::<Result<Vec<_>>>()
                            .map_err(|e| match e {
                                Error::Parse { .. } => e,
                                _ => Error::parse(at(*vo), "bad variable list"),
                            })?,
                        Sexp::List(_, vo) => return Err(Error::parse(at(*vo), "empty variable list")),
                    };
                    let body = build(&args[1])?;
                    Ok(vars.iter().rev().fold(body, |f, x| {
                        if head == "exists" {
                            Formula::Exists(x.clone(), Box::new(f))
                        } else {
                            Formula::Forall(x.clone(), Box::new(f))
                        }
                    }))
                }
                "v" => {
                    arity(1)?;
                    Ok(Formula::IsVertex(ident(0)?))
                }
                "e" => {
                    arity(1)?;
                    Ok(Formula::IsEdge(ident(0)?))
                }
                "size" => {
                    arity(2)?;
                    Ok(Formula::Size(ident(0)?, number(1)?))
                }
                "deg" => {
                    arity(2)?;
                    Ok(Formula::Deg(ident(0)?, number(1)?))
                }
                "adj" => match args.len() {
                    2 => Ok(Formula::Adj(ident(0)?, ident(1)?)),
                    4 => Ok(Formula::AdjCount {
                        x: ident(0)?,
                        y: ident(1)?,
                        m: number(2)?,
                        k: number(3)?,
                    }),
                    n => Err(Error::parse(at(*o), format!("`adj` takes 2 or 4 arguments, found {n}"))),
                },
                other => Err(Error::parse(at(*o), format!("unknown operator `{other}`"))),
            }
        }
    }
}

/// Parses the s-expression form written by [`Formula::to_sexpr`]. `;` starts
/// a comment; `(exists (x y) f)` abbreviates nested quantifiers.
pub fn parse_formula(text: &str) -> Result<Formula> {
    build(&tokenize(text)?)
}
