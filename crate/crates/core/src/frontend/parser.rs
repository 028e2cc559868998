//! Recursive-descent parser for the world DSL.
//!
//! Syntax errors abort at the first offense; a syntactically well-formed
//! input is then built into a [`World`] and checked — duplicate
//! declarations and every [`validate_world`] diagnostic come back as
//! positioned resolution diagnostics. A world is only returned when there
//! are no diagnostics at all.

use std::collections::HashSet;
use std::fmt;

use crate::interp::ast::{Expr, Stmt};
use crate::model::{
    validate_world, ClassDef, ExtensionRef, MethodDef, MethodId, PackageDef, ScriptDef, ScriptId,
    Signature, SourceLoc, World, WorldBuilder,
};

use super::lexer::{lex, Tok, Token};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParseDiagnosticKind {
    Syntax,
    Resolution,
}

impl fmt::Display for ParseDiagnosticKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseDiagnosticKind::Syntax => write!(f, "syntax"),
            ParseDiagnosticKind::Resolution => write!(f, "resolution"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseDiagnostic {
    pub line: u32,
    pub column: u32,
    pub kind: ParseDiagnosticKind,
    pub message: String,
}

impl ParseDiagnostic {
    fn syntax(loc: SourceLoc, message: String) -> Self {
        ParseDiagnostic {
            line: loc.line,
            column: loc.col,
            kind: ParseDiagnosticKind::Syntax,
            message,
        }
    }

    fn resolution(loc: SourceLoc, message: String) -> Self {
        ParseDiagnostic {
            line: loc.line,
            column: loc.col,
            kind: ParseDiagnosticKind::Resolution,
            message,
        }
    }
}

impl fmt::Display for ParseDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {} error: {}", self.line, self.column, self.kind, self.message)
    }
}

/// Parses DSL source into a validated world.
pub fn parse_world(source: &str) -> Result<World, Vec<ParseDiagnostic>> {
    let tokens = match lex(source) {
        Ok(tokens) => tokens,
        Err(e) => return Err(vec![ParseDiagnostic::syntax(e.loc, e.message)]),
    };
    let mut parser = Parser { tokens, pos: 0, builder: WorldBuilder::default() };
    if let Err(d) = parser.parse_packages() {
        return Err(vec![d]);
    }

    let mut diagnostics = parser.duplicate_decl_diagnostics();
    let world = parser.builder.build();
    let report = validate_world(&world);
    for d in report.diagnostics {
        diagnostics.push(ParseDiagnostic::resolution(
            d.loc,
            format!("{}: {}", d.entity, d.message),
        ));
    }
    if diagnostics.is_empty() {
        Ok(world)
    } else {
        diagnostics.sort_by_key(|d| (d.line, d.column));
        Err(diagnostics)
    }
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    builder: WorldBuilder,
}

type PResult<T> = Result<T, ParseDiagnostic>;

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn next(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn at(&self, tok: &Tok) -> bool {
        &self.peek().tok == tok
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.at(tok) {
            self.next();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: Tok) -> PResult<Token> {
        if self.at(&tok) {
            Ok(self.next())
        } else {
            let found = self.peek();
            Err(ParseDiagnostic::syntax(
                found.loc,
                format!("expected {tok}, found {}", found.tok),
            ))
        }
    }

    fn expect_ident(&mut self, what: &str) -> PResult<(String, SourceLoc)> {
        let t = self.peek().clone();
        match t.tok {
            Tok::Ident(name) => {
                self.next();
                Ok((name, t.loc))
            }
            other => Err(ParseDiagnostic::syntax(
                t.loc,
                format!("expected {what} name, found {other}"),
            )),
        }
    }

    fn parse_packages(&mut self) -> PResult<()> {
        while !self.at(&Tok::Eof) {
            self.parse_package()?;
        }
        Ok(())
    }

    fn parse_package(&mut self) -> PResult<()> {
        let kw = self.expect(Tok::Package)?;
        let (name, _) = self.expect_ident("package")?;
        self.expect(Tok::LBrace)?;
        let imports = self.parse_imports_opt()?;
        self.builder.push_package(PackageDef {
            name: name.clone(),
            package_imports: imports,
            classes: Default::default(),
            extensions: Default::default(),
            scripts: Default::default(),
            loc: kw.loc,
        });
        loop {
            let t = self.peek().clone();
            match t.tok {
                Tok::Class => self.parse_class(&name)?,
                Tok::Extension => self.parse_extension(&name)?,
                Tok::Script => self.parse_script(&name)?,
                Tok::RBrace => {
                    self.next();
                    return Ok(());
                }
                other => {
                    return Err(ParseDiagnostic::syntax(
                        t.loc,
                        format!("expected `class`, `extension`, `script` or `}}`, found {other}"),
                    ))
                }
            }
        }
    }

    fn parse_imports_opt(&mut self) -> PResult<Vec<ExtensionRef>> {
        if !self.eat(&Tok::Imports) {
            return Ok(vec![]);
        }
        let mut list = vec![self.parse_ext_ref()?];
        while self.eat(&Tok::Comma) {
            list.push(self.parse_ext_ref()?);
        }
        self.expect(Tok::Semi)?;
        Ok(list)
    }

    // `P.global` parses fine here; validation rejects the reserved name
    // with a proper diagnostic.
    fn parse_ext_ref(&mut self) -> PResult<ExtensionRef> {
        let (package, _) = self.expect_ident("package")?;
        self.expect(Tok::Dot)?;
        let (name, _) = self.expect_ident("extension")?;
        Ok(ExtensionRef::user(package, name))
    }

    fn parse_class(&mut self, package: &str) -> PResult<()> {
        let kw = self.expect(Tok::Class)?;
        let (name, _) = self.expect_ident("class")?;
        let superclass = if self.eat(&Tok::Extends) {
            Some(self.expect_ident("superclass")?.0)
        } else {
            None
        };
        let mut fields = Vec::new();
        if self.eat(&Tok::LParen) {
            if !self.at(&Tok::RParen) {
                fields.push(self.expect_ident("field")?.0);
                while self.eat(&Tok::Comma) {
                    fields.push(self.expect_ident("field")?.0);
                }
            }
            self.expect(Tok::RParen)?;
        }
        self.expect(Tok::LBrace)?;
        let class_imports = self.parse_imports_opt()?;
        self.builder.push_class(ClassDef {
            name: name.clone(),
            package: package.to_string(),
            superclass,
            fields,
            class_imports,
            loc: kw.loc,
        });
        // regular methods: `method sel/2(a, b) { ... }`
        while !self.eat(&Tok::RBrace) {
            let kw = self.expect(Tok::Method)?;
            let (sig, params, imports, body) = self.parse_method_tail()?;
            self.builder.push_method(MethodDef {
                id: MethodId::new(&name, sig, ExtensionRef::Global),
                params,
                body,
                method_imports: imports,
                loc: kw.loc,
            });
        }
        Ok(())
    }

    fn parse_extension(&mut self, package: &str) -> PResult<()> {
        let kw = self.expect(Tok::Extension)?;
        let (name, _) = self.expect_ident("extension")?;
        let ext = ExtensionRef::user(package, &name);
        self.expect(Tok::LBrace)?;
        self.builder.push_extension(ext.clone(), kw.loc);
        // extension methods name their target: `method C.sel/2(a, b) { ... }`
        while !self.eat(&Tok::RBrace) {
            let kw = self.expect(Tok::Method)?;
            let (target, _) = self.expect_ident("target class")?;
            self.expect(Tok::Dot)?;
            let (sig, params, imports, body) = self.parse_method_tail()?;
            self.builder.push_method(MethodDef {
                id: MethodId::new(&target, sig, ext.clone()),
                params,
                body,
                method_imports: imports,
                loc: kw.loc,
            });
        }
        Ok(())
    }

    fn parse_method_tail(
        &mut self,
    ) -> PResult<(Signature, Vec<String>, Vec<ExtensionRef>, Vec<Stmt>)> {
        let (selector, _) = self.expect_ident("selector")?;
        self.expect(Tok::Slash)?;
        let arity = self.expect_int()?;
        self.expect(Tok::LParen)?;
        let mut params = Vec::new();
        if !self.at(&Tok::RParen) {
            params.push(self.expect_ident("parameter")?.0);
            while self.eat(&Tok::Comma) {
                params.push(self.expect_ident("parameter")?.0);
            }
        }
        self.expect(Tok::RParen)?;
        self.expect(Tok::LBrace)?;
        let imports = self.parse_imports_opt()?;
        let mut body = Vec::new();
        while !self.eat(&Tok::RBrace) {
            body.push(self.parse_stmt()?);
        }
        Ok((Signature::new(selector, arity as usize), params, imports, body))
    }

    fn expect_int(&mut self) -> PResult<i64> {
        let t = self.peek().clone();
        match t.tok {
            Tok::Int(n) => {
                self.next();
                Ok(n)
            }
            other => {
                Err(ParseDiagnostic::syntax(t.loc, format!("expected arity, found {other}")))
            }
        }
    }

    fn parse_script(&mut self, package: &str) -> PResult<()> {
        let kw = self.expect(Tok::Script)?;
        let (name, _) = self.expect_ident("script")?;
        self.expect(Tok::LBrace)?;
        let imports = self.parse_imports_opt()?;
        let mut body = Vec::new();
        while !self.eat(&Tok::RBrace) {
            body.push(self.parse_stmt()?);
        }
        self.builder.push_script(ScriptDef {
            id: ScriptId::new(package, name),
            imports,
            body,
            loc: kw.loc,
        });
        Ok(())
    }

    fn parse_stmt(&mut self) -> PResult<Stmt> {
        let t = self.peek().clone();
        match t.tok {
            Tok::Return => {
                self.next();
                let e = self.parse_expr()?;
                self.expect(Tok::Semi)?;
                Ok(Stmt::Return(e))
            }
            Tok::Fail => {
                self.next();
                let (tag, _) = self.expect_ident("failure tag")?;
                self.expect(Tok::Semi)?;
                Ok(Stmt::Fail(tag))
            }
            _ => {
                let e = self.parse_expr()?;
                self.expect(Tok::Semi)?;
                Ok(Stmt::Expr(e))
            }
        }
    }

    fn parse_expr(&mut self) -> PResult<Expr> {
        let mut expr = self.parse_primary()?;
        while self.at(&Tok::Dot) {
            self.next();
            let (selector, _) = self.expect_ident("selector")?;
            self.expect(Tok::LParen)?;
            let args = self.parse_args()?;
            self.expect(Tok::RParen)?;
            expr = Expr::Send { receiver: Box::new(expr), selector, args };
        }
        Ok(expr)
    }

    fn parse_args(&mut self) -> PResult<Vec<Expr>> {
        let mut args = Vec::new();
        if !self.at(&Tok::RParen) {
            args.push(self.parse_expr()?);
            while self.eat(&Tok::Comma) {
                args.push(self.parse_expr()?);
            }
        }
        Ok(args)
    }

    fn parse_primary(&mut self) -> PResult<Expr> {
        let t = self.next();
        match t.tok {
            Tok::SelfKw => Ok(Expr::SelfRef),
            Tok::New => {
                let (class, _) = self.expect_ident("class")?;
                self.expect(Tok::LParen)?;
                let args = self.parse_args()?;
                self.expect(Tok::RParen)?;
                Ok(Expr::New { class, args })
            }
            Tok::Field => {
                let (name, _) = self.expect_ident("field")?;
                Ok(Expr::FieldRef(name))
            }
            Tok::Int(n) => Ok(Expr::IntLiteral(n)),
            Tok::Str(s) => Ok(Expr::StringLiteral(s)),
            Tok::Ident(name) => Ok(Expr::ParamRef(name)),
            other => Err(ParseDiagnostic::syntax(
                t.loc,
                format!("expected an expression, found {other}"),
            )),
        }
    }

    /// Duplicate *declarations* collapse when the builder indexes them, so
    /// they are detected here where the full declaration list is visible.
    fn duplicate_decl_diagnostics(&self) -> Vec<ParseDiagnostic> {
        let mut out = Vec::new();
        let b = &self.builder;
        let mut seen: HashSet<String> = HashSet::new();
        for p in b.packages() {
            if !seen.insert(p.name.clone()) {
                out.push(ParseDiagnostic::resolution(
                    p.loc,
                    format!("package `{}` declared twice", p.name),
                ));
            }
        }
        let mut seen: HashSet<String> = HashSet::new();
        for c in b.classes() {
            if !seen.insert(c.name.clone()) {
                out.push(ParseDiagnostic::resolution(
                    c.loc,
                    format!("class `{}` declared twice (class names are global)", c.name),
                ));
            }
        }
        let mut seen: HashSet<ExtensionRef> = HashSet::new();
        for (ext, loc) in b.extension_decls() {
            if !seen.insert(ext.clone()) {
                out.push(ParseDiagnostic::resolution(
                    *loc,
                    format!("extension `{ext}` declared twice"),
                ));
            }
        }
        let mut seen: HashSet<ScriptId> = HashSet::new();
        for s in b.scripts() {
            if !seen.insert(s.id.clone()) {
                out.push(ParseDiagnostic::resolution(
                    s.loc,
                    format!("script `{}` declared twice", s.id),
                ));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smallest_world_parses() {
        let world = parse_world("package P { class Object { } }").unwrap();
        assert_eq!(world.packages().count(), 1);
        assert_eq!(world.classes().count(), 1);
        assert_eq!(world.extensions().filter(|e| !e.ref_.is_global()).count(), 0);
    }

    #[test]
    fn unterminated_class_reports_eof_position() {
        let errs = parse_world("package P {\nclass X {").unwrap_err();
        assert_eq!(errs.len(), 1);
        assert_eq!(errs[0].kind, ParseDiagnosticKind::Syntax);
        assert_eq!((errs[0].line, errs[0].column), (2, 10));
    }

    #[test]
    fn dangling_superclass_is_a_resolution_diagnostic() {
        let errs = parse_world("package P { class A extends Ghost { } }").unwrap_err();
        assert_eq!(errs.len(), 1);
        assert_eq!(errs[0].kind, ParseDiagnosticKind::Resolution);
        assert!(errs[0].message.contains("Ghost"), "{}", errs[0].message);
        assert_eq!(errs[0].line, 1);
    }

    #[test]
    fn duplicate_class_across_packages_is_reported() {
        let errs =
            parse_world("package P { class A { } }\npackage Q { class A { } }").unwrap_err();
        assert_eq!(errs.len(), 1);
        assert!(errs[0].message.contains("declared twice"));
        assert_eq!(errs[0].line, 2);
    }

    #[test]
    fn arity_disagreement_surfaces_with_location() {
        let errs = parse_world("package P { class A { method m/2(x) { } } }").unwrap_err();
        assert_eq!(errs.len(), 1);
        assert_eq!(errs[0].kind, ParseDiagnosticKind::Resolution);
        assert!(errs[0].message.contains("parameter"), "{}", errs[0].message);
    }

    #[test]
    fn full_feature_parse_round() {
        let src = r#"
package Core { class Object { } }
package P {
    imports Q.E;
    class A extends Object (x, y) {
        imports Q.E;
        method m/1(p) {
            imports Q.E;
            self.n(field x, p, 3, "s");
            return new A(1, 2);
        }
        method n/4(a, b, c, d) { }
    }
}
package Q {
    extension E { method A.m/1(p) { fail Nope; } }
    script go { new A(1, 2).m(7); }
}
"#;
        let world = parse_world(src).unwrap();
        assert_eq!(world.methods().count(), 3);
        let a = world.class("A").unwrap();
        assert_eq!(a.fields, vec!["x", "y"]);
        assert_eq!(a.class_imports, vec![ExtensionRef::user("Q", "E")]);
        let script = world.script(&ScriptId::new("Q", "go")).unwrap();
        assert_eq!(script.body.len(), 1);
    }

    #[test]
    fn importing_global_is_rejected() {
        let errs =
            parse_world("package P { imports P.global; class A { } }").unwrap_err();
        assert_eq!(errs.len(), 1);
        assert!(errs[0].message.contains("reserved") || errs[0].message.contains("global"));
    }
}
