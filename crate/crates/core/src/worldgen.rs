//! Seeded generators for random worlds, call stacks and override-space
//! probes. Everything is a pure function of the seed, so failures
//! reproduce exactly.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::analysis::MessageContext;
use crate::interp::ast::{build, Stmt};
use crate::lookup::{ActiveExtensions, Frame};
use crate::model::{
    descendants, ClassDef, ExtensionRef, MethodDef, PackageDef, ScriptDef, Signature, World,
};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

const SELECTORS: [&str; 4] = ["m0", "m1", "m2", "m3"];

fn random_imports(rng: &mut impl Rng, pool: &[ExtensionRef]) -> Vec<ExtensionRef> {
    if pool.is_empty() {
        return vec![];
    }
    let n = rng.gen_range(0..=3);
    (0..n).map(|_| pool.choose(rng).unwrap().clone()).collect()
}

/// A body statement for a method on `SELECTORS[index]`. Sends only go to
/// strictly smaller selectors, so every call chain terminates well inside
/// the depth limit.
fn random_method_stmt(
    rng: &mut impl Rng,
    classes: &[String],
    index: usize,
) -> Option<Stmt> {
    let callee = (index > 0).then(|| SELECTORS[rng.gen_range(0..index)]);
    match (rng.gen_range(0..5), callee) {
        (0, _) | (_, None) => {
            if rng.gen_bool(0.5) {
                None
            } else {
                Some(build::ret(build::str("r")))
            }
        }
        (1, _) => Some(build::ret(build::str("r"))),
        (2, Some(sel)) => Some(build::expr(build::self_send(sel, vec![]))),
        (3, Some(sel)) => Some(build::ret(build::self_send(sel, vec![]))),
        (_, Some(sel)) => {
            let class = classes.choose(rng).unwrap();
            Some(build::expr(build::send(build::new(class, vec![]), sel, vec![])))
        }
    }
}

fn random_script_stmt(rng: &mut impl Rng, classes: &[String]) -> Stmt {
    let selector = *SELECTORS.choose(rng).unwrap();
    if rng.gen_bool(0.75) {
        let class = classes.choose(rng).unwrap();
        build::expr(build::send(build::new(class, vec![]), selector, vec![]))
    } else {
        build::expr(build::send(build::str("s"), selector, vec![]))
    }
}

/// A random valid world: up to 8 classes over up to 3 packages (class 0
/// is always `Object`, so literals dispatch), up to 5 extensions, arity-0
/// methods scattered over the class × extension grid, import lists at
/// every level (repetitions deliberate), and at least one script.
pub fn random_world(rng: &mut impl Rng) -> World {
    let package_names: Vec<String> =
        (0..rng.gen_range(1..=3)).map(|i| format!("P{i}")).collect();
    let class_names: Vec<String> = (0..rng.gen_range(1..=8))
        .map(|i| if i == 0 { "Object".to_string() } else { format!("C{i}") })
        .collect();
    let ext_refs: Vec<ExtensionRef> = (0..rng.gen_range(0..=5))
        .map(|i| ExtensionRef::user(package_names.choose(rng).unwrap(), &format!("e{i}")))
        .collect();

    let mut builder = World::builder();
    for name in &package_names {
        let imports = random_imports(rng, &ext_refs);
        builder = builder.package(name, imports);
    }
    for (k, name) in class_names.iter().enumerate() {
        let superclass = if k > 0 && rng.gen_bool(0.75) {
            Some(class_names[rng.gen_range(0..k)].clone())
        } else {
            None
        };
        let package = package_names.choose(rng).unwrap().clone();
        let imports = random_imports(rng, &ext_refs);
        builder =
            builder.class_full(name, &package, superclass.as_deref(), vec![], imports);
    }
    for ext in &ext_refs {
        builder = builder.extension(ext.package().unwrap(), ext.name());
    }

    let mut slots = vec![ExtensionRef::Global];
    slots.extend(ext_refs.iter().cloned());
    for class in &class_names {
        for (index, selector) in SELECTORS.iter().enumerate() {
            if rng.gen_bool(0.4) {
                let ext = slots.choose(rng).unwrap().clone();
                let body = random_method_stmt(rng, &class_names, index).into_iter().collect();
                let imports = random_imports(rng, &ext_refs);
                builder = builder.method(
                    class,
                    Signature::new(*selector, 0),
                    ext,
                    vec![],
                    body,
                    imports,
                );
            }
        }
    }
    for s in 0..rng.gen_range(1..=2) {
        let package = package_names.choose(rng).unwrap().clone();
        let imports = random_imports(rng, &ext_refs);
        let body = (0..rng.gen_range(1..=2))
            .map(|_| random_script_stmt(rng, &class_names))
            .collect();
        builder = builder.script(&package, &format!("s{s}"), imports, body);
    }
    builder.build()
}

/// A stack of 1..=`max_len` frames drawn (with repetition) from the
/// world's methods and scripts; empty when the world has neither.
pub fn random_stack(rng: &mut impl Rng, world: &World, max_len: usize) -> Vec<Frame> {
    let mut frames: Vec<Frame> =
        world.methods().map(|m| Frame::Method(m.id.clone())).collect();
    frames.extend(world.scripts().map(|s| Frame::Script(s.id.clone())));
    if frames.is_empty() {
        return vec![];
    }
    let len = rng.gen_range(1..=max_len.max(1));
    (0..len).map(|_| frames.choose(rng).unwrap().clone()).collect()
}

/// The same world with every import list (package, class, method, script)
/// emptied, leaving only the implicit global activation.
pub fn strip_imports(world: &World) -> World {
    let mut builder = World::builder();
    for def in world.packages() {
        builder.push_package(PackageDef {
            package_imports: vec![],
            classes: Default::default(),
            extensions: Default::default(),
            scripts: Default::default(),
            ..def.clone()
        });
    }
    for def in world.classes() {
        builder.push_class(ClassDef { class_imports: vec![], ..def.clone() });
    }
    for def in world.extensions() {
        if !def.ref_.is_global() {
            builder.push_extension(def.ref_.clone(), def.loc);
        }
    }
    for def in world.methods() {
        builder.push_method(MethodDef { method_imports: vec![], ..def.clone() });
    }
    for def in world.scripts() {
        builder.push_script(ScriptDef { imports: vec![], ..def.clone() });
    }
    builder.build()
}

/// A world holding exactly one method — `probe/0` at a random class and
/// extension of a connected hierarchy — plus a message context whose
/// activation includes the defining extension and whose receiver reaches
/// it. Base resolution is guaranteed for both selection strategies, so
/// the pair feeds the override-space oracle directly.
pub fn random_clean_aos_world(rng: &mut impl Rng) -> (World, MessageContext) {
    let class_names: Vec<String> =
        (0..rng.gen_range(2..=8)).map(|i| format!("C{i}")).collect();
    let ext_refs: Vec<ExtensionRef> =
        (0..rng.gen_range(0..=5)).map(|i| ExtensionRef::user("P1", &format!("e{i}"))).collect();

    let mut builder = World::builder();
    for (k, name) in class_names.iter().enumerate() {
        let superclass =
            if k > 0 { Some(class_names[rng.gen_range(0..k)].clone()) } else { None };
        builder = builder.class(name, "P0", superclass.as_deref());
    }
    for ext in &ext_refs {
        builder = builder.extension("P1", ext.name());
    }

    let def_class = class_names.choose(rng).unwrap().clone();
    let mut slots = vec![ExtensionRef::Global];
    slots.extend(ext_refs.iter().cloned());
    let def_ext = slots.choose(rng).unwrap().clone();
    let sig = Signature::new("probe", 0);
    let world =
        builder.method(&def_class, sig.clone(), def_ext.clone(), vec![], vec![], vec![]).build();

    let mut active: Vec<ExtensionRef> = ext_refs
        .iter()
        .filter(|e| **e == def_ext || rng.gen_bool(0.8))
        .cloned()
        .collect();
    active.shuffle(rng);
    let exts = ActiveExtensions::from_imports(active);

    let mut receivers: Vec<String> =
        descendants(&world, &def_class).unwrap().into_iter().collect();
    receivers.push(def_class);
    let receiver = receivers.choose(rng).unwrap().clone();
    (world, MessageContext::new(&receiver, sig, exts))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lookup::{select, SelectionStrategy};
    use crate::model::validate_world;

    #[test]
    fn generation_is_deterministic_in_the_seed() {
        let world_a = random_world(&mut rng(42));
        let world_b = random_world(&mut rng(42));
        assert_eq!(world_a, world_b);
        let stack_a = random_stack(&mut rng(7), &world_a, 6);
        let stack_b = random_stack(&mut rng(7), &world_b, 6);
        assert_eq!(stack_a, stack_b);
    }

    #[test]
    fn generated_worlds_validate() {
        for seed in 0..60 {
            let world = random_world(&mut rng(seed));
            let report = validate_world(&world);
            assert!(report.is_ok(), "seed {seed}: {:?}", report.diagnostics);
        }
    }

    #[test]
    fn stripped_worlds_have_no_imports_but_the_same_entities() {
        for seed in 0..20 {
            let world = random_world(&mut rng(seed));
            let bare = strip_imports(&world);
            assert!(bare.packages().all(|p| p.package_imports.is_empty()));
            assert!(bare.classes().all(|c| c.class_imports.is_empty()));
            assert!(bare.methods().all(|m| m.method_imports.is_empty()));
            assert!(bare.scripts().all(|s| s.imports.is_empty()));
            assert_eq!(world.methods().count(), bare.methods().count());
            assert_eq!(world.classes().count(), bare.classes().count());
        }
    }

    #[test]
    fn clean_aos_worlds_resolve_their_probe_both_ways() {
        for seed in 0..60 {
            let (world, mess) = random_clean_aos_world(&mut rng(seed));
            assert_eq!(world.methods().count(), 1, "seed {seed}");
            for selection in SelectionStrategy::ALL {
                let hit = select(
                    &world,
                    &mess.receiver_class,
                    &mess.signature,
                    &mess.active_extensions,
                    selection,
                );
                assert!(hit.is_some(), "seed {seed}, {selection}");
            }
        }
    }

    #[test]
    fn stacks_draw_from_real_frames() {
        let world = random_world(&mut rng(3));
        for seed in 0..20 {
            for frame in random_stack(&mut rng(seed), &world, 6) {
                match frame {
                    Frame::Method(id) => assert!(world.method_by_id(&id).is_some()),
                    Frame::Script(id) => assert!(world.script(&id).is_some()),
                }
            }
        }
    }
}
