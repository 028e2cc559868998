//! Two-step method lookup: an activation strategy turns the call stack into
//! a priority-ordered extension sequence, a selection strategy turns that
//! sequence plus the receiver's hierarchy into a method.
//!
//! All functions here are pure over an immutable [`World`]; the optional
//! memo cache in [`LookupEngine`] never changes a result, only the cost.

use std::collections::HashMap;
use std::fmt;
use std::sync::Mutex;

use crate::model::{
    ancestors, effective_imports, ExtensionRef, ImportConfig, MethodId, ScriptId, Signature,
    World,
};

/// One call-stack entry, identified by the method or script whose body is
/// executing. Knowing the definition site is enough: imports hang off it.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Frame {
    Method(MethodId),
    Script(ScriptId),
}

impl Frame {
    /// Effective imports of this frame's definition site. Frames whose
    /// origin no longer resolves contribute nothing.
    pub fn imports(&self, world: &World, cfg: ImportConfig) -> Vec<ExtensionRef> {
        match self {
            Frame::Method(id) => world
                .method_by_id(id)
                .map(|def| effective_imports(world, def.into(), cfg))
                .unwrap_or_default(),
            Frame::Script(id) => world
                .script(id)
                .map(|def| effective_imports(world, def.into(), cfg))
                .unwrap_or_default(),
        }
    }
}

impl fmt::Display for Frame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Frame::Method(id) => write!(f, "{id}"),
            Frame::Script(id) => write!(f, "{id}"),
        }
    }
}

/// Oldest frame first; the last element is the sender of the message being
/// looked up. Empty only before the first dispatch of an evaluation.
pub type CallStack = [Frame];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ActivationStrategy {
    BottomUpLocalRebinding,
    TopDownLocalRebinding,
    Lexical,
}

impl ActivationStrategy {
    pub const ALL: [ActivationStrategy; 3] = [
        ActivationStrategy::BottomUpLocalRebinding,
        ActivationStrategy::TopDownLocalRebinding,
        ActivationStrategy::Lexical,
    ];
}

impl fmt::Display for ActivationStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ActivationStrategy::BottomUpLocalRebinding => "lr-up",
            ActivationStrategy::TopDownLocalRebinding => "lr-down",
            ActivationStrategy::Lexical => "lexical",
        };
        write!(f, "{s}")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SelectionStrategy {
    ExtensionsFirst,
    HierarchyFirst,
}

impl SelectionStrategy {
    pub const ALL: [SelectionStrategy; 2] =
        [SelectionStrategy::ExtensionsFirst, SelectionStrategy::HierarchyFirst];
}

impl fmt::Display for SelectionStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SelectionStrategy::ExtensionsFirst => "ext-first",
            SelectionStrategy::HierarchyFirst => "hrc-first",
        };
        write!(f, "{s}")
    }
}

/// Everything a dispatch needs beyond the world and the stack.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StrategyConfig {
    pub activation: ActivationStrategy,
    pub selection: SelectionStrategy,
    pub imports: ImportConfig,
    pub cache_enabled: bool,
    /// Call-stack depth limit; the body language permits unbounded
    /// recursion.
    pub max_depth: usize,
}

impl StrategyConfig {
    pub fn new(activation: ActivationStrategy, selection: SelectionStrategy) -> Self {
        StrategyConfig { activation, selection, ..Self::default() }
    }
}

impl Default for StrategyConfig {
    fn default() -> Self {
        StrategyConfig {
            activation: ActivationStrategy::Lexical,
            selection: SelectionStrategy::HierarchyFirst,
            imports: ImportConfig::default(),
            cache_enabled: true,
            max_depth: 1024,
        }
    }
}

/// Priority-ordered extension sequence consulted by a lookup. Always ends
/// with the global extension, which appears exactly once.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ActiveExtensions(Vec<ExtensionRef>);

impl ActiveExtensions {
    /// Builds the sequence from priority-ordered user imports: first
    /// occurrence wins, global is forced to the end.
    pub fn from_imports<I>(imports: I) -> Self
    where
        I: IntoIterator<Item = ExtensionRef>,
    {
        let mut list: Vec<ExtensionRef> = Vec::new();
        for ext in imports {
            if !ext.is_global() && !list.contains(&ext) {
                list.push(ext);
            }
        }
        list.push(ExtensionRef::Global);
        ActiveExtensions(list)
    }

    pub fn global_only() -> Self {
        ActiveExtensions(vec![ExtensionRef::Global])
    }

    pub fn as_slice(&self) -> &[ExtensionRef] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = &ExtensionRef> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false // the global element is always present
    }

    /// 1-based position of an extension in the sequence.
    pub fn index_of(&self, ext: &ExtensionRef) -> Option<usize> {
        self.0.iter().position(|e| e == ext).map(|i| i + 1)
    }

    pub fn get(&self, index_1based: usize) -> Option<&ExtensionRef> {
        self.0.get(index_1based.wrapping_sub(1))
    }
}

impl fmt::Display for ActiveExtensions {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<")?;
        for (i, ext) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{ext}")?;
        }
        write!(f, ">")
    }
}

/// Bottom-up local rebinding: oldest frames contribute first, so the
/// original caller's imports take priority over everything called on its
/// behalf.
pub fn active_exts_bottom_up(
    world: &World,
    stack: &CallStack,
    cfg: ImportConfig,
) -> ActiveExtensions {
    ActiveExtensions::from_imports(stack.iter().flat_map(|f| f.imports(world, cfg)))
}

/// Top-down local rebinding: newest frames contribute first, so the most
/// recent sender wins.
pub fn active_exts_top_down(
    world: &World,
    stack: &CallStack,
    cfg: ImportConfig,
) -> ActiveExtensions {
    ActiveExtensions::from_imports(stack.iter().rev().flat_map(|f| f.imports(world, cfg)))
}

/// Lexical activation: only the immediate sender's imports are active;
/// deeper frames are invisible.
pub fn active_exts_lexical(
    world: &World,
    stack: &CallStack,
    cfg: ImportConfig,
) -> ActiveExtensions {
    match stack.last() {
        Some(frame) => ActiveExtensions::from_imports(frame.imports(world, cfg)),
        None => ActiveExtensions::global_only(),
    }
}

/// Dispatches on the activation strategy.
pub fn active_extensions(
    world: &World,
    stack: &CallStack,
    activation: ActivationStrategy,
    cfg: ImportConfig,
) -> ActiveExtensions {
    match activation {
        ActivationStrategy::BottomUpLocalRebinding => active_exts_bottom_up(world, stack, cfg),
        ActivationStrategy::TopDownLocalRebinding => active_exts_top_down(world, stack, cfg),
        ActivationStrategy::Lexical => active_exts_lexical(world, stack, cfg),
    }
}

/// A successful lookup: where the method was found.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ResolvedMethod {
    /// Class whose row defines the method (receiver class or an ancestor).
    pub class: String,
    pub extension: ExtensionRef,
    pub method: MethodId,
}

impl ResolvedMethod {
    fn new(class: &str, sig: &Signature, ext: &ExtensionRef) -> Self {
        ResolvedMethod {
            class: class.to_string(),
            extension: ext.clone(),
            method: MethodId::new(class, sig.clone(), ext.clone()),
        }
    }
}

/// First extension in `exts` order defining (class, sig); does not ascend
/// the hierarchy.
pub fn lookup_in_class(
    world: &World,
    class: &str,
    sig: &Signature,
    exts: &[ExtensionRef],
) -> Option<ResolvedMethod> {
    exts.iter()
        .find(|ext| world.method(class, sig, ext).is_some())
        .map(|ext| ResolvedMethod::new(class, sig, ext))
}

/// First class on the receiver's chain (receiver first, then ancestors)
/// where `ext` defines sig; does not consult other extensions.
pub fn lookup_in_extension(
    world: &World,
    class: &str,
    sig: &Signature,
    ext: &ExtensionRef,
) -> Option<ResolvedMethod> {
    if world.method(class, sig, ext).is_some() {
        return Some(ResolvedMethod::new(class, sig, ext));
    }
    for anc in ancestors(world, class).unwrap_or_default() {
        if world.method(&anc, sig, ext).is_some() {
            return Some(ResolvedMethod::new(&anc, sig, ext));
        }
    }
    None
}

/// Extensions-first selection: for each class from the receiver upward,
/// scan the active extensions before moving to the superclass.
pub fn select_extensions_first(
    world: &World,
    class: &str,
    sig: &Signature,
    exts: &[ExtensionRef],
) -> Option<ResolvedMethod> {
    if let Some(hit) = lookup_in_class(world, class, sig, exts) {
        return Some(hit);
    }
    for anc in ancestors(world, class).unwrap_or_default() {
        if let Some(hit) = lookup_in_class(world, &anc, sig, exts) {
            return Some(hit);
        }
    }
    None
}

/// Hierarchy-first selection: for each active extension in order, scan the
/// receiver's whole chain before moving to the next extension.
pub fn select_hierarchy_first(
    world: &World,
    class: &str,
    sig: &Signature,
    exts: &[ExtensionRef],
) -> Option<ResolvedMethod> {
    exts.iter().find_map(|ext| lookup_in_extension(world, class, sig, ext))
}

/// Applies the configured selection strategy to an already-computed
/// activation.
pub fn select(
    world: &World,
    class: &str,
    sig: &Signature,
    exts: &ActiveExtensions,
    selection: SelectionStrategy,
) -> Option<ResolvedMethod> {
    match selection {
        SelectionStrategy::ExtensionsFirst => {
            select_extensions_first(world, class, sig, exts.as_slice())
        }
        SelectionStrategy::HierarchyFirst => {
            select_hierarchy_first(world, class, sig, exts.as_slice())
        }
    }
}

/// The composed lookup: activation over the stack, then selection over the
/// hierarchy. `None` means the message is not understood.
pub fn lookup(
    world: &World,
    receiver_class: &str,
    sig: &Signature,
    stack: &CallStack,
    cfg: &StrategyConfig,
) -> Option<ResolvedMethod> {
    let exts = active_extensions(world, stack, cfg.activation, cfg.imports);
    select(world, receiver_class, sig, &exts, cfg.selection)
}

type CacheKey = (String, Signature, ActiveExtensions);

/// Lookup front-end with an optional memo cache.
///
/// The cache key is the computed activation value, not the stack: two
/// different stacks that activate the same extension sequence share an
/// entry, which is sound because lookup factors through the activation.
pub struct LookupEngine<'w> {
    world: &'w World,
    cfg: StrategyConfig,
    cache: Mutex<HashMap<CacheKey, Option<ResolvedMethod>>>,
}

impl<'w> LookupEngine<'w> {
    pub fn new(world: &'w World, cfg: StrategyConfig) -> Self {
        LookupEngine { world, cfg, cache: Mutex::new(HashMap::new()) }
    }

    pub fn world(&self) -> &'w World {
        self.world
    }

    pub fn config(&self) -> &StrategyConfig {
        &self.cfg
    }

    pub fn active_extensions(&self, stack: &CallStack) -> ActiveExtensions {
        active_extensions(self.world, stack, self.cfg.activation, self.cfg.imports)
    }

    /// Selection step, memoized when the config enables the cache.
    pub fn select(
        &self,
        class: &str,
        sig: &Signature,
        exts: &ActiveExtensions,
    ) -> Option<ResolvedMethod> {
        if !self.cfg.cache_enabled {
            return select(self.world, class, sig, exts, self.cfg.selection);
        }
        let key = (class.to_string(), sig.clone(), exts.clone());
        if let Some(hit) = self.cache.lock().unwrap().get(&key) {
            return hit.clone();
        }
        let result = select(self.world, class, sig, exts, self.cfg.selection);
        self.cache.lock().unwrap().insert(key, result.clone());
        result
    }

    pub fn lookup(&self, class: &str, sig: &Signature, stack: &CallStack) -> Option<ResolvedMethod> {
        let exts = self.active_extensions(stack);
        self.select(class, sig, &exts)
    }

    /// Number of memoized (class, signature, activation) entries.
    pub fn cache_len(&self) -> usize {
        self.cache.lock().unwrap().len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Signature;

    fn ext(p: &str, e: &str) -> ExtensionRef {
        ExtensionRef::user(p, e)
    }

    /// Object ← A ← B with A.foo in e1, B.foo in e2.
    fn selection_world() -> World {
        World::builder()
            .class("Object", "Core", None)
            .class("A", "Core", Some("Object"))
            .class("B", "Core", Some("A"))
            .extension("P1", "e1")
            .extension("P2", "e2")
            .method("A", Signature::new("foo", 0), ext("P1", "e1"), vec![], vec![], vec![])
            .method("B", Signature::new("foo", 0), ext("P2", "e2"), vec![], vec![], vec![])
            .build()
    }

    fn foo() -> Signature {
        Signature::new("foo", 0)
    }

    fn e1e2() -> ActiveExtensions {
        ActiveExtensions::from_imports([ext("P1", "e1"), ext("P2", "e2")])
    }

    #[test]
    fn active_extensions_end_with_single_global() {
        let exts = ActiveExtensions::from_imports([
            ext("P1", "e1"),
            ExtensionRef::Global,
            ext("P1", "e1"),
            ext("P2", "e2"),
        ]);
        assert_eq!(
            exts.as_slice(),
            &[ext("P1", "e1"), ext("P2", "e2"), ExtensionRef::Global]
        );
        assert_eq!(exts.index_of(&ExtensionRef::Global), Some(3));
        assert_eq!(exts.to_string(), "<P1.e1, P2.e2, global>");
    }

    #[test]
    fn empty_stack_activates_global_only() {
        let world = selection_world();
        let cfg = ImportConfig::default();
        for strategy in ActivationStrategy::ALL {
            let exts = active_extensions(&world, &[], strategy, cfg);
            assert_eq!(exts.as_slice(), &[ExtensionRef::Global]);
        }
    }

    #[test]
    fn lookup_in_class_takes_first_defining_extension() {
        let world = selection_world();
        assert_eq!(lookup_in_class(&world, "B", &foo(), e1e2().as_slice()),
            Some(ResolvedMethod::new("B", &foo(), &ext("P2", "e2"))));
        assert_eq!(lookup_in_class(&world, "B", &foo(), &[]), None);
        assert_eq!(lookup_in_class(&world, "Object", &foo(), e1e2().as_slice()), None);
    }

    #[test]
    fn lookup_in_extension_walks_the_chain() {
        let world = selection_world();
        assert_eq!(
            lookup_in_extension(&world, "B", &foo(), &ext("P1", "e1")),
            Some(ResolvedMethod::new("A", &foo(), &ext("P1", "e1")))
        );
        assert_eq!(lookup_in_extension(&world, "Object", &foo(), &ext("P1", "e1")), None);
    }

    #[test]
    fn selection_strategies_diverge_on_the_cross_pattern() {
        let world = selection_world();
        let exts = e1e2();
        let by_ext = select_extensions_first(&world, "B", &foo(), exts.as_slice()).unwrap();
        assert_eq!((by_ext.class.as_str(), &by_ext.extension), ("B", &ext("P2", "e2")));
        let by_hrc = select_hierarchy_first(&world, "B", &foo(), exts.as_slice()).unwrap();
        assert_eq!((by_hrc.class.as_str(), &by_hrc.extension), ("A", &ext("P1", "e1")));
    }

    #[test]
    fn selection_strategies_have_equal_domains() {
        let world = selection_world();
        let exts = e1e2();
        for class in ["Object", "A", "B"] {
            for sig in [foo(), Signature::new("bar", 0)] {
                let a = select_extensions_first(&world, class, &sig, exts.as_slice());
                let b = select_hierarchy_first(&world, class, &sig, exts.as_slice());
                assert_eq!(a.is_some(), b.is_some(), "{class} {sig}");
            }
        }
    }

    #[test]
    fn cached_engine_agrees_with_pure_lookup() {
        let world = selection_world();
        for selection in SelectionStrategy::ALL {
            let cfg = StrategyConfig {
                selection,
                cache_enabled: true,
                ..StrategyConfig::default()
            };
            let engine = LookupEngine::new(&world, cfg);
            let exts = e1e2();
            for class in ["Object", "A", "B"] {
                let pure = select(&world, class, &foo(), &exts, selection);
                assert_eq!(engine.select(class, &foo(), &exts), pure);
                // second call hits the cache
                assert_eq!(engine.select(class, &foo(), &exts), pure);
            }
            assert_eq!(engine.cache_len(), 3);
        }
    }
}
