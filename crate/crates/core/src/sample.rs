//! A small HIV-in-blood-plasma model used by examples and tests.
//!
//! ```text
//! HIV in blood plasma
//! ├── HIV
//! │   └── Capsid
//! │       ├── RNA
//! │       └── Reverse Transcriptase
//! └── Blood plasma
//! ```

use alloc::vec;

use crate::foraging::build_skeleton;
use crate::geom::Vec3;
use crate::graph::StoryGraph;
use crate::model::{Instance, StructuralModel, StructureType};

pub const CAPSID_DESCRIPTION: &str = "The capsid is a conical shell assembled from capsid protein. \
     The capsid protein forms a structure protecting the RNA.";

pub fn hiv_types() -> alloc::vec::Vec<StructureType> {
    vec![
        StructureType::new("hiv-plasma", "HIV in blood plasma"),
        StructureType::new("hiv", "HIV").with_parent("hiv-plasma"),
        StructureType::new("plasma", "Blood plasma").with_parent("hiv-plasma"),
        StructureType::new("capsid", "Capsid")
            .with_parent("hiv")
            .with_description(CAPSID_DESCRIPTION),
        StructureType::new("rna", "RNA").with_parent("capsid"),
        StructureType::new("rt", "Reverse Transcriptase")
            .with_parent("capsid")
            .with_alt_name("1HYS"),
    ]
}

pub fn hiv_instances() -> alloc::vec::Vec<Instance> {
    vec![
        Instance::new("hiv-1", "hiv", Vec3::new(0.0, 0.0, 0.0), 60.0),
        Instance::new("rna-1", "rna", Vec3::new(-8.0, 5.0, 0.0), 6.0),
        Instance::new("rna-2", "rna", Vec3::new(8.0, -5.0, 2.0), 6.0),
        Instance::new("rt-1", "rt", Vec3::new(0.0, 12.0, 6.0), 3.0),
        Instance::new("rt-2", "rt", Vec3::new(3.0, -14.0, -4.0), 3.0),
        Instance::new("plasma-1", "plasma", Vec3::new(150.0, 0.0, 0.0), 20.0),
        Instance::new("plasma-2", "plasma", Vec3::new(-140.0, 30.0, 10.0), 20.0),
        Instance::new("plasma-3", "plasma", Vec3::new(0.0, -150.0, -20.0), 20.0),
    ]
}

pub fn hiv_model() -> StructuralModel {
    StructuralModel::new(hiv_types(), hiv_instances()).expect("sample model is valid")
}

/// Skeleton of [`hiv_model`] with its local descriptions, nothing foraged.
pub fn hiv_skeleton() -> StoryGraph {
    build_skeleton(&hiv_model())
}
