//! Tree-walking evaluator. Its job is not computation — bodies are
//! side-effect-free — but maintaining the call stack the lookup strategies
//! read, and recording every dynamic dispatch so strategy differences
//! become observable data.

pub mod ast;

use std::collections::BTreeMap;
use std::fmt;

use crate::lookup::{
    ActivationStrategy, ActiveExtensions, Frame, LookupEngine, ResolvedMethod,
    SelectionStrategy, StrategyConfig,
};
use crate::model::{ImportConfig, MethodDef, ScriptId, Signature, World};

use ast::{Expr, Stmt, Value};

/// One dynamic dispatch, as observed by the evaluator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DispatchRecord {
    /// 1-based position in the trace.
    pub step: usize,
    pub receiver_class: String,
    pub selector: Signature,
    /// The frame that sent the message (newest frame at dispatch time).
    pub sender_frame: Frame,
    pub active_extensions: ActiveExtensions,
    pub resolved: Option<ResolvedMethod>,
    /// Full stack at dispatch time, oldest first; lets a reader re-run the
    /// lookup that produced `resolved`.
    pub stack: Vec<Frame>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EvalError {
    MessageNotUnderstood {
        receiver_class: String,
        selector: Signature,
        active_extensions: ActiveExtensions,
    },
    DepthExceeded {
        limit: usize,
    },
    UserFailure {
        tag: String,
    },
    /// A literal was used in a world that does not declare `Object`.
    LiteralClassMissing,
    /// Defensive: a body referenced something validation would have
    /// rejected (unknown parameter, field, class, or a bad `new` arity).
    InvalidReference {
        message: String,
    },
}

impl EvalError {
    pub fn kind(&self) -> &'static str {
        match self {
            EvalError::MessageNotUnderstood { .. } => "MessageNotUnderstood",
            EvalError::DepthExceeded { .. } => "DepthExceeded",
            EvalError::UserFailure { .. } => "UserFailure",
            EvalError::LiteralClassMissing => "LiteralClassMissing",
            EvalError::InvalidReference { .. } => "InvalidReference",
        }
    }
}

impl fmt::Display for EvalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvalError::MessageNotUnderstood { receiver_class, selector, active_extensions } => {
                write!(
                    f,
                    "{receiver_class} does not understand {selector} under {active_extensions}"
                )
            }
            EvalError::DepthExceeded { limit } => {
                write!(f, "call stack exceeded the depth limit of {limit}")
            }
            EvalError::UserFailure { tag } => write!(f, "failure raised: {tag}"),
            EvalError::LiteralClassMissing => {
                write!(f, "a literal was used but no class named Object exists")
            }
            EvalError::InvalidReference { message } => write!(f, "{message}"),
        }
    }
}

impl std::error::Error for EvalError {}

/// Error plus where the evaluator was when it happened.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EvalFailure {
    pub error: EvalError,
    /// Stack at failure time, oldest first.
    pub stack: Vec<Frame>,
}

/// Everything one evaluation produced: the script's value (absent on error
/// or when the script ends on a non-expression), the dispatch trace up to
/// the end or the failure, and the failure if any.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EvalOutcome {
    pub result: Option<Value>,
    pub dispatches: Vec<DispatchRecord>,
    pub error: Option<EvalFailure>,
}

impl EvalOutcome {
    pub fn is_ok(&self) -> bool {
        self.error.is_none()
    }

    pub fn last_dispatch(&self) -> Option<&DispatchRecord> {
        self.dispatches.last()
    }

    /// Final resolution of the trace — the usual single fact strategy
    /// comparisons care about.
    pub fn final_resolution(&self) -> Option<&ResolvedMethod> {
        self.last_dispatch().and_then(|d| d.resolved.as_ref())
    }
}

/// Runs a script under one strategy configuration.
pub fn evaluate(world: &World, script: &ScriptId, cfg: StrategyConfig) -> EvalOutcome {
    let Some(def) = world.script(script) else {
        return EvalOutcome {
            result: None,
            dispatches: vec![],
            error: Some(EvalFailure {
                error: EvalError::InvalidReference {
                    message: format!("script `{script}` does not exist"),
                },
                stack: vec![],
            }),
        };
    };
    let mut ev = Evaluator {
        engine: LookupEngine::new(world, cfg),
        stack: Vec::new(),
        dispatches: Vec::new(),
    };
    let body = def.body.clone();
    let run = ev.push_frame(Frame::Script(script.clone())).and_then(|()| {
        let flow = ev.eval_body(&body, &Env::script())?;
        ev.pop_frame();
        Ok(match flow {
            Flow::Returned(v) => Some(v),
            Flow::Completed(last) => last,
        })
    });
    match run {
        Ok(result) => EvalOutcome { result, dispatches: ev.dispatches, error: None },
        Err(error) => EvalOutcome {
            result: None,
            dispatches: ev.dispatches,
            error: Some(EvalFailure { error, stack: ev.stack }),
        },
    }
}

/// Runs a script under all six strategy pairs, in a fixed order
/// (activations outer, selections inner). Cells are independent: one
/// cell's failure never affects another.
pub fn evaluate_matrix(
    world: &World,
    script: &ScriptId,
    imports: ImportConfig,
) -> Vec<((ActivationStrategy, SelectionStrategy), EvalOutcome)> {
    let mut out = Vec::with_capacity(6);
    for activation in ActivationStrategy::ALL {
        for selection in SelectionStrategy::ALL {
            let cfg = StrategyConfig {
                activation,
                selection,
                imports,
                ..StrategyConfig::default()
            };
            out.push(((activation, selection), evaluate(world, script, cfg)));
        }
    }
    out
}

/// How a statement sequence ended.
enum Flow {
    /// Ran to the end; carries the value of the last expression statement.
    Completed(Option<Value>),
    Returned(Value),
}

/// Binding context of the body being evaluated.
struct Env {
    self_value: Option<Value>,
    params: Vec<(String, Value)>,
}

impl Env {
    fn script() -> Env {
        Env { self_value: None, params: Vec::new() }
    }

    fn method(self_value: Value, params: Vec<(String, Value)>) -> Env {
        Env { self_value: Some(self_value), params }
    }

    fn param(&self, name: &str) -> Option<&Value> {
        self.params.iter().find(|(n, _)| n == name).map(|(_, v)| v)
    }
}

struct Evaluator<'w> {
    engine: LookupEngine<'w>,
    stack: Vec<Frame>,
    dispatches: Vec<DispatchRecord>,
}

impl<'w> Evaluator<'w> {
    fn world(&self) -> &'w World {
        self.engine.world()
    }

    fn push_frame(&mut self, frame: Frame) -> Result<(), EvalError> {
        if self.stack.len() + 1 > self.engine.config().max_depth {
            return Err(EvalError::DepthExceeded { limit: self.engine.config().max_depth });
        }
        self.stack.push(frame);
        Ok(())
    }

    fn pop_frame(&mut self) {
        self.stack.pop();
    }

    fn eval_body(&mut self, body: &[Stmt], env: &Env) -> Result<Flow, EvalError> {
        let mut last = None;
        for stmt in body {
            match stmt {
                Stmt::Expr(e) => last = Some(self.eval_expr(e, env)?),
                Stmt::Return(e) => return Ok(Flow::Returned(self.eval_expr(e, env)?)),
                Stmt::Fail(tag) => {
                    return Err(EvalError::UserFailure { tag: tag.clone() });
                }
            }
        }
        Ok(Flow::Completed(last))
    }

    fn eval_expr(&mut self, expr: &Expr, env: &Env) -> Result<Value, EvalError> {
        match expr {
            Expr::SelfRef => env.self_value.clone().ok_or_else(|| EvalError::InvalidReference {
                message: "`self` used outside a method".into(),
            }),
            Expr::ParamRef(name) => {
                env.param(name).cloned().ok_or_else(|| EvalError::InvalidReference {
                    message: format!("`{name}` is not a parameter"),
                })
            }
            Expr::FieldRef(name) => {
                let Some(Value::Instance { fields, .. }) = &env.self_value else {
                    return Err(EvalError::InvalidReference {
                        message: format!("`field {name}` has no instance to read"),
                    });
                };
                fields.get(name).cloned().ok_or_else(|| EvalError::InvalidReference {
                    message: format!("`{name}` is not a field of the receiver"),
                })
            }
            Expr::New { class, args } => self.eval_new(class, args, env),
            Expr::IntLiteral(n) => {
                self.require_literal_class()?;
                Ok(Value::Int(*n))
            }
            Expr::StringLiteral(s) => {
                self.require_literal_class()?;
                Ok(Value::Str(s.clone()))
            }
            Expr::Send { receiver, selector, args } => {
                let recv = self.eval_expr(receiver, env)?;
                let mut arg_values = Vec::with_capacity(args.len());
                for arg in args {
                    arg_values.push(self.eval_expr(arg, env)?);
                }
                self.send(recv, selector, arg_values)
            }
        }
    }

    fn require_literal_class(&self) -> Result<(), EvalError> {
        if self.world().class("Object").is_none() {
            return Err(EvalError::LiteralClassMissing);
        }
        Ok(())
    }

    fn eval_new(&mut self, class: &str, args: &[Expr], env: &Env) -> Result<Value, EvalError> {
        let Some(def) = self.world().class(class) else {
            return Err(EvalError::InvalidReference {
                message: format!("`new {class}` names an undeclared class"),
            });
        };
        let field_names = def.fields.clone();
        if args.len() != field_names.len() {
            return Err(EvalError::InvalidReference {
                message: format!(
                    "`new {class}` takes {} argument(s), got {}",
                    field_names.len(),
                    args.len()
                ),
            });
        }
        let mut fields = BTreeMap::new();
        for (name, arg) in field_names.iter().zip(args) {
            fields.insert(name.clone(), self.eval_expr(arg, env)?);
        }
        Ok(Value::instance(class, fields))
    }

    fn send(
        &mut self,
        receiver: Value,
        selector: &str,
        args: Vec<Value>,
    ) -> Result<Value, EvalError> {
        let sig = Signature::new(selector, args.len());
        if matches!(receiver, Value::Int(_) | Value::Str(_)) {
            self.require_literal_class()?;
        }
        let receiver_class = receiver.class_name().to_string();
        let exts = self.engine.active_extensions(&self.stack);
        let resolved = self.engine.select(&receiver_class, &sig, &exts);
        let sender = self.stack.last().cloned().expect("dispatch with empty stack");
        self.dispatches.push(DispatchRecord {
            step: self.dispatches.len() + 1,
            receiver_class: receiver_class.clone(),
            selector: sig.clone(),
            sender_frame: sender,
            active_extensions: exts.clone(),
            resolved: resolved.clone(),
            stack: self.stack.clone(),
        });
        let Some(resolved) = resolved else {
            return Err(EvalError::MessageNotUnderstood {
                receiver_class,
                selector: sig,
                active_extensions: exts,
            });
        };
        let Some(def) = self.world().method_by_id(&resolved.method) else {
            return Err(EvalError::InvalidReference {
                message: format!("resolved method `{}` has no definition", resolved.method),
            });
        };
        let def = def.clone();
        self.call(&def, receiver, args)
    }

    fn call(
        &mut self,
        def: &MethodDef,
        receiver: Value,
        args: Vec<Value>,
    ) -> Result<Value, EvalError> {
        if args.len() != def.params.len() {
            return Err(EvalError::InvalidReference {
                message: format!(
                    "`{}` takes {} argument(s), got {}",
                    def.id,
                    def.params.len(),
                    args.len()
                ),
            });
        }
        let params = def.params.iter().cloned().zip(args).collect();
        let env = Env::method(receiver.clone(), params);
        self.push_frame(Frame::Method(def.id.clone()))?;
        let flow = self.eval_body(&def.body, &env)?;
        self.pop_frame();
        Ok(match flow {
            Flow::Returned(v) => v,
            // a body that never executes `return` answers the receiver
            Flow::Completed(_) => receiver,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ExtensionRef;
    use ast::build::*;

    fn ext(p: &str, e: &str) -> ExtensionRef {
        ExtensionRef::user(p, e)
    }

    fn sig(name: &str, arity: usize) -> Signature {
        Signature::new(name, arity)
    }

    /// A caller in P2 (importing E2) invokes C1 methods directly and via a
    /// self-send; E2 redefines C1.redefined.
    fn rebinding_world() -> World {
        World::builder()
            .class("Object", "P1", None)
            .class("C1", "P1", Some("Object"))
            .class("C2", "P2", Some("Object"))
            .package("P2", vec![ext("P2", "E2")])
            .extension("P2", "E2")
            .method("C1", sig("redefined", 0), ExtensionRef::Global, vec![], vec![ret(str("P1"))], vec![])
            .method(
                "C1",
                sig("selfSend", 0),
                ExtensionRef::Global,
                vec![],
                vec![ret(self_send("redefined", vec![]))],
                vec![],
            )
            .method(
                "C2",
                sig("sendRedefinedTo", 1),
                ExtensionRef::Global,
                vec!["target".into()],
                vec![ret(send(param("target"), "redefined", vec![]))],
                vec![],
            )
            .method(
                "C2",
                sig("sendSelfSendTo", 1),
                ExtensionRef::Global,
                vec!["target".into()],
                vec![ret(send(param("target"), "selfSend", vec![]))],
                vec![],
            )
            .method("C1", sig("redefined", 0), ext("P2", "E2"), vec![], vec![ret(str("P2"))], vec![])
            .script(
                "P4",
                "direct",
                vec![],
                vec![expr(send(new("C2", vec![]), "sendRedefinedTo", vec![new("C1", vec![])]))],
            )
            .script(
                "P4",
                "indirect",
                vec![],
                vec![expr(send(new("C2", vec![]), "sendSelfSendTo", vec![new("C1", vec![])]))],
            )
            .build()
    }

    fn run(world: &World, script: &str, a: ActivationStrategy, s: SelectionStrategy) -> EvalOutcome {
        evaluate(world, &ScriptId::new("P4", script), StrategyConfig::new(a, s))
    }

    fn final_str(outcome: &EvalOutcome) -> String {
        match &outcome.result {
            Some(Value::Str(s)) => s.clone(),
            other => panic!("expected string result, got {other:?}"),
        }
    }

    #[test]
    fn local_rebinding_reaches_indirect_sends() {
        let world = rebinding_world();
        use ActivationStrategy::*;
        use SelectionStrategy::ExtensionsFirst;
        // the caller's import rebinds the direct send under every strategy
        for a in [BottomUpLocalRebinding, TopDownLocalRebinding, Lexical] {
            assert_eq!(final_str(&run(&world, "direct", a, ExtensionsFirst)), "P2");
        }
        // the indirect send (through C1.selfSend) only sees the import
        // under local rebinding; lexically the sender has no imports
        assert_eq!(
            final_str(&run(&world, "indirect", BottomUpLocalRebinding, ExtensionsFirst)),
            "P2"
        );
        assert_eq!(
            final_str(&run(&world, "indirect", TopDownLocalRebinding, ExtensionsFirst)),
            "P2"
        );
        assert_eq!(final_str(&run(&world, "indirect", Lexical, ExtensionsFirst)), "P1");
    }

    #[test]
    fn dispatch_records_carry_reconstructible_stacks() {
        let world = rebinding_world();
        let outcome = run(
            &world,
            "indirect",
            ActivationStrategy::BottomUpLocalRebinding,
            SelectionStrategy::ExtensionsFirst,
        );
        assert!(outcome.is_ok());
        assert_eq!(outcome.dispatches.len(), 3);
        let cfg = StrategyConfig::new(
            ActivationStrategy::BottomUpLocalRebinding,
            SelectionStrategy::ExtensionsFirst,
        );
        for d in &outcome.dispatches {
            assert_eq!(d.stack.last(), Some(&d.sender_frame));
            let replayed =
                crate::lookup::lookup(&world, &d.receiver_class, &d.selector, &d.stack, &cfg);
            assert_eq!(replayed, d.resolved, "step {}", d.step);
        }
        // the final dispatch is the rebound one
        let last = outcome.last_dispatch().unwrap();
        assert_eq!(last.selector, sig("redefined", 0));
        assert_eq!(last.resolved.as_ref().unwrap().extension, ext("P2", "E2"));
    }

    #[test]
    fn matrix_runs_all_six_cells_independently() {
        let world = rebinding_world();
        let cells =
            evaluate_matrix(&world, &ScriptId::new("P4", "indirect"), ImportConfig::default());
        assert_eq!(cells.len(), 6);
        for ((a, s), outcome) in &cells {
            assert!(outcome.is_ok(), "{a}/{s}");
            let expected = match a {
                ActivationStrategy::Lexical => "P1",
                _ => "P2",
            };
            assert_eq!(final_str(outcome), expected, "{a}/{s}");
        }
    }

    #[test]
    fn missing_method_reports_message_not_understood() {
        let world = World::builder()
            .class("A", "P", None)
            .script("P4", "main", vec![], vec![expr(send(new("A", vec![]), "nope", vec![]))])
            .build();
        let outcome = run(
            &world,
            "main",
            ActivationStrategy::Lexical,
            SelectionStrategy::HierarchyFirst,
        );
        let failure = outcome.error.as_ref().unwrap();
        assert!(matches!(failure.error, EvalError::MessageNotUnderstood { .. }));
        // the failed dispatch is still the last trace entry
        assert_eq!(outcome.dispatches.len(), 1);
        assert!(outcome.dispatches[0].resolved.is_none());
        assert!(outcome.result.is_none());
    }

    #[test]
    fn unbounded_recursion_hits_the_depth_limit() {
        let world = World::builder()
            .class("A", "P", None)
            .method(
                "A",
                sig("loop", 0),
                ExtensionRef::Global,
                vec![],
                vec![ret(self_send("loop", vec![]))],
                vec![],
            )
            .script("P4", "main", vec![], vec![expr(send(new("A", vec![]), "loop", vec![]))])
            .build();
        let cfg = StrategyConfig { max_depth: 16, ..StrategyConfig::default() };
        let outcome = evaluate(&world, &ScriptId::new("P4", "main"), cfg);
        assert!(matches!(
            outcome.error.as_ref().unwrap().error,
            EvalError::DepthExceeded { limit: 16 }
        ));
    }

    #[test]
    fn fail_statement_aborts_with_user_failure() {
        let world = World::builder()
            .class("A", "P", None)
            .method(
                "A",
                sig("deny", 0),
                ExtensionRef::Global,
                vec![],
                vec![fail("IllegalWrite")],
                vec![],
            )
            .script("P4", "main", vec![], vec![expr(send(new("A", vec![]), "deny", vec![]))])
            .build();
        let outcome = run(
            &world,
            "main",
            ActivationStrategy::Lexical,
            SelectionStrategy::HierarchyFirst,
        );
        let failure = outcome.error.as_ref().unwrap();
        assert_eq!(
            failure.error,
            EvalError::UserFailure { tag: "IllegalWrite".into() }
        );
        // the failing method's frame is still on the recorded stack
        assert_eq!(failure.stack.len(), 2);
    }

    #[test]
    fn method_without_return_answers_self() {
        let world = World::builder()
            .class("A", "P", None)
            .method("A", sig("noop", 0), ExtensionRef::Global, vec![], vec![], vec![])
            .script(
                "P4",
                "main",
                vec![],
                vec![expr(send(new("A", vec![]), "noop", vec![]))],
            )
            .build();
        let outcome = run(
            &world,
            "main",
            ActivationStrategy::Lexical,
            SelectionStrategy::HierarchyFirst,
        );
        assert!(outcome.is_ok());
        match outcome.result.unwrap() {
            Value::Instance { class, .. } => assert_eq!(class, "A"),
            other => panic!("expected instance, got {other:?}"),
        }
    }

    #[test]
    fn literals_require_an_object_class() {
        let world = World::builder()
            .class("A", "P", None)
            .script("P4", "main", vec![], vec![expr(int(42))])
            .build();
        let outcome = run(
            &world,
            "main",
            ActivationStrategy::Lexical,
            SelectionStrategy::HierarchyFirst,
        );
        assert_eq!(outcome.error.unwrap().error, EvalError::LiteralClassMissing);

        let world = World::builder()
            .class("Object", "P", None)
            .script("P4", "main", vec![], vec![expr(int(42))])
            .build();
        let outcome = run(
            &world,
            "main",
            ActivationStrategy::Lexical,
            SelectionStrategy::HierarchyFirst,
        );
        assert_eq!(outcome.result, Some(Value::Int(42)));
    }

    #[test]
    fn extension_methods_can_target_literals_via_object() {
        // the decorator pattern's `"adding".log()` shape in miniature
        let world = World::builder()
            .class("Object", "Core", None)
            .extension("LogPkg", "Log")
            .method(
                "Object",
                sig("log", 0),
                ext("LogPkg", "Log"),
                vec![],
                vec![ret(str("logged"))],
                vec![],
            )
            .script("P4", "main", vec![ext("LogPkg", "Log")], vec![expr(send(str("x"), "log", vec![]))])
            .build();
        let outcome = run(
            &world,
            "main",
            ActivationStrategy::Lexical,
            SelectionStrategy::ExtensionsFirst,
        );
        assert_eq!(outcome.result, Some(Value::Str("logged".into())));
    }
}
