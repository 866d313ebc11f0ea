//! Built-in inputs: the two case studies plus small oracle groups.

use crate::fusion::SkeletalCategory;
use crate::groups::{abelian_group, RepData};
use crate::io::{parse_group_file, parse_skeletal_file, IoError};
use crate::linalg::AbelianGroupPresentation;

/// A loaded input: concrete group data, or a skeletal category.
#[derive(Debug, Clone)]
pub enum Input {
    Concrete(Box<RepData>),
    Skeletal(Box<SkeletalCategory>),
}

impl Input {
    pub fn name(&self) -> &str {
        match self {
            Input::Concrete(d) => d.group.name(),
            Input::Skeletal(c) => &c.name,
        }
    }

    pub fn rep_data(&self) -> Option<&RepData> {
        match self {
            Input::Concrete(d) => Some(d),
            Input::Skeletal(_) => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Concrete,
    Skeletal,
}

#[derive(Debug, Clone, Copy)]
enum Source {
    GroupFile(&'static str),
    Abelian(&'static [u64]),
    SkeletalFile(&'static str),
}

#[derive(Debug, Clone, Copy)]
pub struct CatalogueEntry {
    pub name: &'static str,
    pub kind: Kind,
    source: Source,
    expected: Option<&'static str>,
    /// Where the expected value comes from.
    pub provenance: &'static str,
}

impl CatalogueEntry {
    pub fn expected(&self) -> Option<AbelianGroupPresentation> {
        self.expected
            .map(|s| AbelianGroupPresentation::parse(s).expect("catalogue expectation parses"))
    }

    pub fn load(&self) -> Result<Input, IoError> {
        Ok(match self.source {
            Source::GroupFile(text) => {
                let f = parse_group_file(text)?;
                Input::Concrete(Box::new(RepData::new(f.group, f.irreps)?))
            }
            Source::Abelian(factors) => {
                let (g, irreps) = abelian_group(self.name, factors)?;
                Input::Concrete(Box::new(RepData::new(g, irreps)?))
            }
            Source::SkeletalFile(text) => Input::Skeletal(Box::new(parse_skeletal_file(text)?)),
        })
    }

    /// Raw file text for file-backed entries.
    pub fn text(&self) -> Option<&'static str> {
        match self.source {
            Source::GroupFile(t) | Source::SkeletalFile(t) => Some(t),
            Source::Abelian(_) => None,
        }
    }
}

const fn group(
    name: &'static str,
    text: &'static str,
    expected: Option<&'static str>,
    provenance: &'static str,
) -> CatalogueEntry {
    CatalogueEntry {
        name,
        kind: Kind::Concrete,
        source: Source::GroupFile(text),
        expected,
        provenance,
    }
}

const fn abelian(
    name: &'static str,
    factors: &'static [u64],
    expected: &'static str,
) -> CatalogueEntry {
    CatalogueEntry {
        name,
        kind: Kind::Concrete,
        source: Source::Abelian(factors),
        expected: Some(expected),
        provenance: "Schur multiplier of the dual group, (+)_{i<j} Z/gcd(n_i, n_j)",
    }
}

pub const CATALOGUE: &[CatalogueEntry] = &[
    group(
        "wall32",
        include_str!("../catalogue/wall32.txt"),
        Some("Z/2"),
        "Wall group case study: unitary and invertible invariant cohomology are both Z/2",
    ),
    CatalogueEntry {
        name: "ty-k4-kp",
        kind: Kind::Skeletal,
        source: Source::SkeletalFile(include_str!("../catalogue/ty-k4-kp.txt")),
        expected: Some("trivial group"),
        provenance:
            "Kac-Paljutkin case study: invariant cohomology of the TY category over K4 is trivial",
    },
    group(
        "s3",
        include_str!("../catalogue/s3.txt"),
        Some("trivial group"),
        "symmetric groups have trivial invariant cohomology",
    ),
    group(
        "s4",
        include_str!("../catalogue/s4.txt"),
        Some("trivial group"),
        "symmetric groups have trivial invariant cohomology",
    ),
    abelian("k4", &[2, 2], "Z/2"),
    abelian("z2^3", &[2, 2, 2], "Z/2 x Z/2 x Z/2"),
    abelian("z4xz2", &[2, 4], "Z/2"),
    abelian("z6", &[6], "trivial group"),
    abelian("z8", &[8], "trivial group"),
    group(
        "q8",
        include_str!("../catalogue/q8.txt"),
        None,
        "no reference value",
    ),
    group(
        "d4",
        include_str!("../catalogue/d4.txt"),
        None,
        "no reference value",
    ),
];

pub fn lookup(name: &str) -> Option<&'static CatalogueEntry> {
    CATALOGUE.iter().find(|e| e.name == name)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cyclotomic::{ctx, CycloNumber};
    use crate::fusion::{from_irreps, ty_category, Bicharacter};
    use crate::groups::FiniteGroup;
    use num_rational::BigRational;

    #[test]
    fn every_entry_loads() {
        for e in CATALOGUE {
            let input = e.load().unwrap_or_else(|err| panic!("{}: {err}", e.name));
            assert_eq!(input.name(), e.name);
            let _ = e.expected();
        }
    }

    #[test]
    fn wall_group_shape() {
        let Input::Concrete(d) = lookup("wall32").unwrap().load().unwrap() else {
            panic!()
        };
        assert_eq!(d.group.order(), 32);
        assert_eq!(d.irreps.len(), 11);
        let (p2, p4) = (d.index_of("pi2").unwrap(), d.index_of("pi4").unwrap());
        assert_eq!(d.fusion.get(p2, p4, p4), 2);
        assert_eq!(d.fusion.get(p4, p4, p2), 2);
        let stab: Vec<&str> = (0..8)
            .filter(|&c| d.fusion.get(c, p2, p2) == 1)
            .map(|c| d.fusion.labels[c].as_str())
            .collect();
        assert_eq!(stab, ["chi000", "chi001", "chi100", "chi101"]);
    }

    #[test]
    fn ty_file_matches_construction() {
        let table = (0..4).map(|a| (0..4).map(|b| a ^ b).collect()).collect();
        let k4 =
            FiniteGroup::from_table("k4", table, vec![("s".into(), 1), ("t".into(), 2)]).unwrap();
        let c = ctx(2);
        let chi = |a: usize, b: usize| {
            if ((a & b & 1) + ((a & b) >> 1 & 1)) % 2 == 1 {
                -1
            } else {
                1
            }
        };
        let values = (0..4)
            .map(|a| {
                (0..4)
                    .map(|b| CycloNumber::from_int(c, chi(a, b)))
                    .collect()
            })
            .collect();
        let labels = ["e", "s", "t", "st"].map(String::from).to_vec();
        let bichar = Bicharacter::new(k4, labels, values).unwrap();
        let built =
            ty_category("ty-k4-kp", &bichar, &BigRational::new(1.into(), 2.into())).unwrap();
        let Input::Skeletal(file) = lookup("ty-k4-kp").unwrap().load().unwrap() else {
            panic!()
        };
        assert_eq!(*file, built);
    }

    #[test]
    fn small_groups_have_coherent_f_symbols() {
        for name in ["s3", "q8", "d4", "k4"] {
            let input = lookup(name).unwrap().load().unwrap();
            let cat = from_irreps(input.rep_data().unwrap()).unwrap();
            assert!(cat.pentagon_check().is_empty(), "{name}");
        }
    }
}
