//! Named covers built from the compiled-in ray sets.

use crate::algebra::ratio;
use crate::rays::{
    build_18ray, build_24cell_rays, build_hexagon_rays, build_peres24, hexagon_pairs, inscribed_tesseracts,
};
use crate::spin::{generate_gks, hexagon_directions, Spin};
use crate::structures::{build_gks_cover, build_ks_cover, CoverStructure, Group};

/// Names accepted by [`builtin_cover`].
pub const BUILTIN_COVERS: [&str; 7] = [
    "rays18-ks",
    "rays18-gks",
    "24cell-ks",
    "24cell-gks",
    "peres24-ks",
    "hexagon-gks",
    "spin-half-3-2",
];

/// POVM grouping of the 18-ray tetrads, each group weighted 1/3.
pub fn rays18_povm_grouping() -> Vec<Group> {
    vec![
        Group::names(&["T1", "T5", "T7"]),
        Group::names(&["T2", "T4", "T8"]),
        Group::names(&["T3", "T6", "T9"]),
    ]
}

/// Any two opposite-direction pairs of the hexagon, weight 1/2.
pub fn hexagon_grouping() -> Vec<Group> {
    let [a, b, c] = hexagon_pairs();
    vec![
        Group::Ids([a.clone(), b.clone()].concat()),
        Group::Ids([a, c.clone()].concat()),
        Group::Ids([b, c].concat()),
    ]
}

pub fn tesseract_grouping() -> Vec<Group> {
    inscribed_tesseracts().into_iter().map(Group::Ids).collect()
}

pub fn rays18_gks() -> CoverStructure {
    build_gks_cover(&build_18ray(), &rays18_povm_grouping(), &ratio(1, 3)).expect("18-ray POVMs are complete")
}

pub fn cell24_gks() -> CoverStructure {
    build_gks_cover(&build_24cell_rays(), &tesseract_grouping(), &ratio(1, 2)).expect("tesseract POVMs are complete")
}

pub fn hexagon_gks() -> CoverStructure {
    build_gks_cover(&build_hexagon_rays(), &hexagon_grouping(), &ratio(1, 2)).expect("hexagon POVMs are complete")
}

pub fn builtin_cover(name: &str) -> Option<CoverStructure> {
    Some(match name {
        "rays18-ks" => build_ks_cover(&build_18ray()),
        "rays18-gks" => rays18_gks(),
        "24cell-ks" => build_ks_cover(&build_24cell_rays()),
        "24cell-gks" => cell24_gks(),
        "peres24-ks" => build_ks_cover(&build_peres24()),
        "hexagon-gks" => hexagon_gks(),
        "spin-half-3-2" => generate_gks(Spin::half(), &hexagon_directions(), 2).expect("hexagon diameters are valid"),
        _ => return None,
    })
}
