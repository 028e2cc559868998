//! Statement and expression forms of method and script bodies, plus the
//! runtime value type.

use std::collections::BTreeMap;
use std::fmt;
use std::rc::Rc;

/// Expressions. The language is deliberately small: every interesting
/// behaviour flows through `Send`, whose resolution is the whole point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    /// `self` — the current receiver.
    SelfRef,
    /// A method or script parameter by name.
    ParamRef(String),
    /// `field name` — read a field of the current receiver.
    FieldRef(String),
    /// `new C(args...)` — instantiate, binding args to fields positionally.
    New { class: String, args: Vec<Expr> },
    IntLiteral(i64),
    StringLiteral(String),
    /// `recv.selector(args...)` — the dispatch site.
    Send { receiver: Box<Expr>, selector: String, args: Vec<Expr> },
}

/// Statements, executed in order; `Return` ends the current activation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Stmt {
    Expr(Expr),
    Return(Expr),
    /// `fail Name;` — abort the whole evaluation with a user failure.
    Fail(String),
}

/// Runtime values. Instances are immutable after construction and shared
/// by reference, so aliasing in scripts behaves like any object language.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Value {
    Instance { class: String, fields: Rc<BTreeMap<String, Value>> },
    Int(i64),
    Str(String),
}

impl Value {
    pub fn instance(class: impl Into<String>, fields: BTreeMap<String, Value>) -> Value {
        Value::Instance { class: class.into(), fields: Rc::new(fields) }
    }

    /// The class dispatch starts from for this value. Literals behave as
    /// plain `Object` instances so that `Object` extensions apply to them;
    /// a world that uses literals must declare `Object`.
    pub fn class_name(&self) -> &str {
        match self {
            Value::Instance { class, .. } => class,
            Value::Int(_) | Value::Str(_) => "Object",
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Instance { class, fields } => {
                write!(f, "{class}(")?;
                for (i, (name, value)) in fields.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{name}={value}")?;
                }
                write!(f, ")")
            }
            Value::Int(n) => write!(f, "{n}"),
            Value::Str(s) => write!(f, "{s:?}"),
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::SelfRef => write!(f, "self"),
            Expr::ParamRef(name) => write!(f, "{name}"),
            Expr::FieldRef(name) => write!(f, "field {name}"),
            Expr::New { class, args } => {
                write!(f, "new {class}(")?;
                write_args(f, args)?;
                write!(f, ")")
            }
            Expr::IntLiteral(n) => write!(f, "{n}"),
            Expr::StringLiteral(s) => write!(f, "{s:?}"),
            Expr::Send { receiver, selector, args } => {
                write!(f, "{receiver}.{selector}(")?;
                write_args(f, args)?;
                write!(f, ")")
            }
        }
    }
}

fn write_args(f: &mut fmt::Formatter<'_>, args: &[Expr]) -> fmt::Result {
    for (i, arg) in args.iter().enumerate() {
        if i > 0 {
            write!(f, ", ")?;
        }
        write!(f, "{arg}")?;
    }
    Ok(())
}

impl fmt::Display for Stmt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Stmt::Expr(e) => write!(f, "{e};"),
            Stmt::Return(e) => write!(f, "return {e};"),
            Stmt::Fail(name) => write!(f, "fail {name};"),
        }
    }
}

/// Shorthand constructors used heavily by tests and generated worlds.
pub mod build {
    use super::*;

    pub fn send(receiver: Expr, selector: &str, args: Vec<Expr>) -> Expr {
        Expr::Send { receiver: Box::new(receiver), selector: selector.into(), args }
    }

    pub fn self_send(selector: &str, args: Vec<Expr>) -> Expr {
        send(Expr::SelfRef, selector, args)
    }

    pub fn new(class: &str, args: Vec<Expr>) -> Expr {
        Expr::New { class: class.into(), args }
    }

    pub fn param(name: &str) -> Expr {
        Expr::ParamRef(name.into())
    }

    pub fn field(name: &str) -> Expr {
        Expr::FieldRef(name.into())
    }

    pub fn str(value: &str) -> Expr {
        Expr::StringLiteral(value.into())
    }

    pub fn int(value: i64) -> Expr {
        Expr::IntLiteral(value)
    }

    pub fn ret(e: Expr) -> Stmt {
        Stmt::Return(e)
    }

    pub fn expr(e: Expr) -> Stmt {
        Stmt::Expr(e)
    }

    pub fn fail(name: &str) -> Stmt {
        Stmt::Fail(name.into())
    }
}

#[cfg(test)]
mod tests {
    use super::build::*;
    use super::*;

    #[test]
    fn statement_rendering_is_source_like() {
        let s = ret(send(param("target"), "redefined", vec![]));
        assert_eq!(s.to_string(), "return target.redefined();");
        let s = expr(send(str("adding"), "log", vec![]));
        assert_eq!(s.to_string(), "\"adding\".log();");
        assert_eq!(fail("IllegalWrite").to_string(), "fail IllegalWrite;");
        let s = expr(send(
            new("ReadOnlyDecorator", vec![new("List", vec![])]),
            "at",
            vec![int(3)],
        ));
        assert_eq!(s.to_string(), "new ReadOnlyDecorator(new List()).at(3);");
        assert_eq!(expr(self_send("redefined", vec![])).to_string(), "self.redefined();");
        assert_eq!(expr(field("decoree")).to_string(), "field decoree;");
    }

    #[test]
    fn literal_values_dispatch_as_object_instances() {
        assert_eq!(Value::Int(3).class_name(), "Object");
        assert_eq!(Value::Str("x".into()).class_name(), "Object");
    }
}
