//! How much of a world lives in extensions: four ratios over methods,
//! classes, and packages.

use std::collections::BTreeSet;

use crate::model::{ExtensionRef, World};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WorldStats {
    /// Methods defined in a user extension, over all methods.
    pub extension_method_fraction: f64,
    /// Classes targeted by at least one extension method, over all classes.
    pub extended_class_fraction: f64,
    /// Packages whose extensions define at least one method, over all packages.
    pub packages_defining_extensions_fraction: f64,
    /// Packages containing at least one extended class, over all packages.
    pub packages_with_extended_classes_fraction: f64,
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

pub fn world_stats(world: &World) -> WorldStats {
    let mut ext_methods = 0usize;
    let mut extended_classes = BTreeSet::new();
    let mut defining_packages = BTreeSet::new();
    for def in world.methods() {
        if let ExtensionRef::User { package, .. } = &def.id.extension {
            ext_methods += 1;
            extended_classes.insert(def.id.class.as_str());
            defining_packages.insert(package.as_str());
        }
    }
    let hosting_packages: BTreeSet<&str> = extended_classes
        .iter()
        .filter_map(|c| world.class(c).map(|def| def.package.as_str()))
        .collect();
    let package_count = world.packages().count();
    WorldStats {
        extension_method_fraction: ratio(ext_methods, world.methods().count()),
        extended_class_fraction: ratio(extended_classes.len(), world.classes().count()),
        packages_defining_extensions_fraction: ratio(defining_packages.len(), package_count),
        packages_with_extended_classes_fraction: ratio(hosting_packages.len(), package_count),
    }
}
