//! Families of cross resolvable designs and the hand-built catalog.
//!
//! Points of `GF(q)^m` are numbered by reading the coordinate vector as a
//! base-`q` integer, most significant coordinate first, with each coordinate
//! taking its canonical field index.

use std::fmt;
use std::str::FromStr;

use crate::caps::Caps;
use crate::design::{Design, Resolution};
use crate::error::{Error, Result};
use crate::field::{FieldElement, GaloisField};
use crate::hadamard::hadamard_for;

/// Lines of the affine plane over GF(n).
///
/// Class 0 holds the lines `x = c`; class `1 + s` holds the lines
/// `y = s·x + c` for slope `s` in field order. Within a class, `c` runs in
/// field order.
pub fn affine_plane(n: u64) -> Result<Resolution> {
    affine_plane_with_caps(n, &Caps::default())
}

pub fn affine_plane_with_caps(n: u64, caps: &Caps) -> Result<Resolution> {
    let field = GaloisField::new(n)?;
    caps.check_points(n.saturating_mul(n))?;
    let q = n as usize;
    let point = |x: FieldElement, y: FieldElement| x.index() * q + y.index();
    let mut blocks = Vec::with_capacity(q * (q + 1));
    for c in field.elements() {
        blocks.push(field.elements().map(|y| point(c, y)).collect());
    }
    for slope in field.elements() {
        for c in field.elements() {
            blocks.push(
                field
                    .elements()
                    .map(|x| point(x, field.add(field.mul(slope, x), c)))
                    .collect(),
            );
        }
    }
    let classes = (0..=q).map(|c| (c * q..(c + 1) * q).collect()).collect();
    Resolution::from_zero_based(Design::from_zero_based(q * q, blocks)?, classes)
}

/// Hyperplanes of `AG(m, q)`, one parallel class per direction.
///
/// Directions are the nonzero functionals `a` whose first nonzero coordinate
/// is 1, in canonical order; the class of `a` lists `{x : a·x = c}` for `c`
/// in field order.
pub fn affine_geometry_bibd(q: u64, m: u32) -> Result<Resolution> {
    affine_geometry_bibd_with_caps(q, m, &Caps::default())
}

pub fn affine_geometry_bibd_with_caps(q: u64, m: u32, caps: &Caps) -> Result<Resolution> {
    let field = GaloisField::new(q)?;
    if m < 2 {
        return Err(Error::InvalidSpec {
            spec: format!("ag:q={q},m={m}"),
            reason: "dimension m must be at least 2".into(),
        });
    }
    let v = q.checked_pow(m).unwrap_or(u64::MAX);
    caps.check_points(v)?;
    let (qs, ms, v) = (q as usize, m as usize, v as usize);
    let coords = |index: usize| -> Vec<FieldElement> {
        let mut x = index;
        let mut out = vec![FieldElement::ZERO; ms];
        for slot in out.iter_mut().rev() {
            *slot = FieldElement((x % qs) as u64);
            x /= qs;
        }
        out
    };
    let points: Vec<Vec<FieldElement>> = (0..v).map(coords).collect();
    let mut blocks = Vec::new();
    let mut classes = Vec::new();
    for a in 1..v {
        let functional = coords(a);
        let lead = functional.iter().find(|c| **c != FieldElement::ZERO);
        if lead != Some(&FieldElement::ONE) {
            continue;
        }
        let mut class_blocks = vec![Vec::new(); qs];
        for (index, x) in points.iter().enumerate() {
            let value = functional
                .iter()
                .zip(x)
                .fold(FieldElement::ZERO, |acc, (&ai, &xi)| {
                    field.add(acc, field.mul(ai, xi))
                });
            class_blocks[value.index()].push(index);
        }
        let start = blocks.len();
        blocks.extend(class_blocks);
        classes.push((start..start + qs).collect());
    }
    Resolution::from_zero_based(Design::from_zero_based(v, blocks)?, classes)
}

/// Design from a normalized Hadamard matrix of order `4m`.
///
/// Each row other than the all-ones row gives one parallel class: the
/// columns holding +1 followed by the columns holding -1.
pub fn hadamard_crd(m: usize) -> Result<Resolution> {
    let h = hadamard_for(m)?;
    let mut blocks = Vec::new();
    for row in &h.rows()[1..] {
        blocks.push(positions(row, 1));
        blocks.push(positions(row, -1));
    }
    let classes = (0..blocks.len() / 2)
        .map(|c| vec![2 * c, 2 * c + 1])
        .collect();
    Resolution::from_zero_based(Design::from_zero_based(h.order(), blocks)?, classes)
}

fn positions(row: &[i8], sign: i8) -> Vec<usize> {
    row.iter()
        .enumerate()
        .filter(|(_, &x)| x == sign)
        .map(|(i, _)| i)
        .collect()
}

/// The nine catalog designs, with fixed block and class order.
///
/// Design 8 has `(v, b, r, k) = (27, 9, 3, 9)` with `mu_2 = 3, mu_3 = 1`;
/// it is realized on `{0,1,2}^3` where block
/// `(i, c)` holds the points whose `i`-th coordinate equals `c`.
pub fn catalog_example(id: usize) -> Result<Resolution> {
    let (v, blocks, classes): (usize, Vec<Vec<usize>>, Vec<Vec<usize>>) = match id {
        1 => (
            4,
            vec![
                vec![1, 2],
                vec![1, 3],
                vec![1, 4],
                vec![2, 3],
                vec![2, 4],
                vec![3, 4],
            ],
            vec![vec![1, 6], vec![2, 5], vec![3, 4]],
        ),
        2 => (
            6,
            vec![vec![1, 2, 3], vec![4, 5, 6], vec![1, 4, 5], vec![2, 3, 6]],
            vec![vec![1, 2], vec![3, 4]],
        ),
        3 => (
            9,
            vec![
                vec![1, 2, 3],
                vec![4, 5, 6],
                vec![7, 8, 9],
                vec![1, 4, 7],
                vec![2, 5, 8],
                vec![3, 6, 9],
            ],
            vec![vec![1, 2, 3], vec![4, 5, 6]],
        ),
        4 => (
            8,
            vec![
                vec![1, 2, 3, 4],
                vec![5, 6, 7, 8],
                vec![1, 2, 5, 6],
                vec![3, 4, 7, 8],
                vec![1, 3, 5, 7],
                vec![2, 4, 6, 8],
            ],
            vec![vec![1, 2], vec![3, 4], vec![5, 6]],
        ),
        5 => (
            12,
            vec![
                vec![1, 2, 3, 4, 5, 6],
                vec![7, 8, 9, 10, 11, 12],
                vec![1, 2, 3, 7, 8, 9],
                vec![4, 5, 6, 10, 11, 12],
            ],
            vec![vec![1, 2], vec![3, 4]],
        ),
        6 => (
            9,
            vec![
                vec![1, 2, 3],
                vec![4, 5, 6],
                vec![7, 8, 9],
                vec![1, 4, 7],
                vec![2, 5, 8],
                vec![3, 6, 9],
                vec![1, 5, 9],
                vec![2, 6, 7],
                vec![3, 4, 8],
                vec![1, 6, 8],
                vec![2, 4, 9],
                vec![3, 5, 7],
            ],
            vec![
                vec![1, 2, 3],
                vec![4, 5, 6],
                vec![7, 8, 9],
                vec![10, 11, 12],
            ],
        ),
        7 => (
            8,
            vec![
                vec![1, 2, 3, 4],
                vec![5, 6, 7, 8],
                vec![1, 2, 5, 6],
                vec![1, 3, 5, 7],
                vec![2, 4, 6, 8],
                vec![3, 4, 7, 8],
                vec![1, 4, 5, 8],
                vec![2, 3, 6, 7],
            ],
            // third class is printed as {{2,4,6,8},{1,3,5,7}}
            vec![vec![1, 2], vec![3, 6], vec![5, 4], vec![7, 8]],
        ),
        8 => {
            let mut blocks = Vec::new();
            for axis in 0..3u32 {
                for value in 0..3 {
                    blocks.push(
                        (0..27usize)
                            .filter(|&p| (p / 3usize.pow(2 - axis)) % 3 == value)
                            .map(|p| p + 1)
                            .collect(),
                    );
                }
            }
            (
                27,
                blocks,
                vec![vec![1, 2, 3], vec![4, 5, 6], vec![7, 8, 9]],
            )
        }
        9 => {
            let halves = |stride: usize| -> [Vec<usize>; 2] {
                let lower = (1..=16)
                    .filter(|p| ((p - 1) / stride).is_multiple_of(2))
                    .collect();
                let upper = (1..=16).filter(|p| ((p - 1) / stride) % 2 == 1).collect();
                [lower, upper]
            };
            let blocks = [8, 4, 2, 1].into_iter().flat_map(halves).collect();
            (
                16,
                blocks,
                vec![vec![1, 2], vec![3, 4], vec![5, 6], vec![7, 8]],
            )
        }
        other => return Err(Error::UnknownExample(other)),
    };
    Resolution::new(Design::new(v, &blocks)?, &classes)
}

/// Family parameters predicted for a construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstructionParams {
    pub v: usize,
    pub b: usize,
    pub r: usize,
    pub k: usize,
    pub mu2: usize,
}

/// A construction request, written as e.g. `affine:n=3`, `ag:q=2,m=3`,
/// `hadamard:m=2` or `example:4`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstructionSpec {
    AffinePlane { n: u64 },
    AffineGeometry { q: u64, m: u32 },
    Hadamard { m: usize },
    CatalogExample { id: usize },
}

impl ConstructionSpec {
    pub fn build(&self) -> Result<Resolution> {
        self.build_with_caps(&Caps::default())
    }

    pub fn build_with_caps(&self, caps: &Caps) -> Result<Resolution> {
        let res = match *self {
            ConstructionSpec::AffinePlane { n } => affine_plane_with_caps(n, caps)?,
            ConstructionSpec::AffineGeometry { q, m } => {
                affine_geometry_bibd_with_caps(q, m, caps)?
            }
            ConstructionSpec::Hadamard { m } => hadamard_crd(m)?,
            ConstructionSpec::CatalogExample { id } => catalog_example(id)?,
        };
        caps.check_points(res.v() as u64)?;
        Ok(res)
    }

    /// Closed-form `(v, b, r, k, mu_2)` of the family; `None` for catalog
    /// examples.
    pub fn predicted(&self) -> Option<ConstructionParams> {
        match *self {
            ConstructionSpec::AffinePlane { n } => {
                let n = n as usize;
                Some(ConstructionParams {
                    v: n * n,
                    b: n * (n + 1),
                    r: n + 1,
                    k: n,
                    mu2: 1,
                })
            }
            ConstructionSpec::AffineGeometry { q, m } => {
                let q = q as usize;
                let qm = q.pow(m);
                Some(ConstructionParams {
                    v: qm,
                    b: q * (qm - 1) / (q - 1),
                    r: (qm - 1) / (q - 1),
                    k: q.pow(m - 1),
                    mu2: q.pow(m - 2),
                })
            }
            ConstructionSpec::Hadamard { m } => Some(ConstructionParams {
                v: 4 * m,
                b: 2 * (4 * m - 1),
                r: 4 * m - 1,
                k: 2 * m,
                mu2: m,
            }),
            ConstructionSpec::CatalogExample { .. } => None,
        }
    }
}

impl fmt::Display for ConstructionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConstructionSpec::AffinePlane { n } => write!(f, "affine:n={n}"),
            ConstructionSpec::AffineGeometry { q, m } => write!(f, "ag:q={q},m={m}"),
            ConstructionSpec::Hadamard { m } => write!(f, "hadamard:m={m}"),
            ConstructionSpec::CatalogExample { id } => write!(f, "example:{id}"),
        }
    }
}

impl FromStr for ConstructionSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let invalid = |reason: &str| Error::InvalidSpec {
            spec: s.to_string(),
            reason: reason.to_string(),
        };
        let (family, args) = s
            .trim()
            .split_once(':')
            .ok_or_else(|| invalid("expected <family>:<arguments>"))?;
        let mut n = None;
        let mut q = None;
        let mut m = None;
        if family == "example" {
            let id = args
                .trim()
                .parse()
                .map_err(|_| invalid("example id must be an integer"))?;
            return Ok(ConstructionSpec::CatalogExample { id });
        }
        for part in args.split(',') {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| invalid("arguments are key=value pairs"))?;
            let value: u64 = value
                .trim()
                .parse()
                .map_err(|_| invalid("argument values must be integers"))?;
            let slot = match key.trim() {
                "n" => &mut n,
                "q" => &mut q,
                "m" => &mut m,
                _ => return Err(invalid("unknown argument")),
            };
            *slot = Some(value);
        }
        match (family, n, q, m) {
            ("affine", Some(n), None, None) => Ok(ConstructionSpec::AffinePlane { n }),
            ("ag", None, Some(q), Some(m)) => Ok(ConstructionSpec::AffineGeometry {
                q,
                m: u32::try_from(m).map_err(|_| invalid("m too large"))?,
            }),
            ("hadamard", None, None, Some(m)) => Ok(ConstructionSpec::Hadamard { m: m as usize }),
            ("affine" | "ag" | "hadamard", ..) => Err(invalid("wrong arguments for family")),
            _ => Err(invalid("unknown family")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::design::crd_profile;

    fn shape(res: &Resolution) -> (usize, usize, usize, usize) {
        (res.v(), res.b(), res.r(), res.k())
    }

    #[test]
    fn affine_plane_matches_catalog_examples() {
        // n = 2 and n = 3 reproduce the classes of Examples 1 and 6 exactly
        let two = affine_plane(2).unwrap();
        let one = catalog_example(1).unwrap();
        let classes_as_sets = |res: &Resolution| -> Vec<Vec<Vec<usize>>> {
            res.classes()
                .iter()
                .map(|c| {
                    let mut blocks: Vec<_> =
                        c.iter().map(|&j| res.design().block(j).to_vec()).collect();
                    blocks.sort();
                    blocks
                })
                .collect()
        };
        assert_eq!(classes_as_sets(&two), classes_as_sets(&one));
        let three = affine_plane(3).unwrap();
        assert_eq!(three.to_file(), catalog_example(6).unwrap().to_file());
    }

    #[test]
    fn affine_plane_four() {
        let res = affine_plane(4).unwrap();
        assert_eq!(shape(&res), (16, 20, 5, 4));
        let profile = crd_profile(&res).unwrap();
        assert_eq!(profile.mu.into_iter().collect::<Vec<_>>(), vec![(2, 1)]);
    }

    #[test]
    fn affine_plane_rejects_composite() {
        assert_eq!(affine_plane(6).unwrap_err(), Error::NotAPrimePower(6));
    }

    #[test]
    fn affine_geometry_shapes() {
        let res = affine_geometry_bibd(3, 2).unwrap();
        assert_eq!(shape(&res), (9, 12, 4, 3));
        let res = affine_geometry_bibd(2, 3).unwrap();
        assert_eq!(shape(&res), (8, 14, 7, 4));
        assert_eq!(crd_profile(&res).unwrap().mu(2), Some(2));
        assert!(matches!(
            affine_geometry_bibd_with_caps(
                3,
                4,
                &Caps {
                    max_points: 50,
                    ..Caps::default()
                }
            ),
            Err(Error::SizeCapExceeded { .. })
        ));
        assert!(affine_geometry_bibd(2, 1).is_err());
        assert_eq!(
            affine_geometry_bibd(10, 2).unwrap_err(),
            Error::NotAPrimePower(10)
        );
    }

    #[test]
    fn hadamard_shapes() {
        assert_eq!(shape(&hadamard_crd(1).unwrap()), (4, 6, 3, 2));
        assert_eq!(shape(&hadamard_crd(2).unwrap()), (8, 14, 7, 4));
        let three = hadamard_crd(3).unwrap();
        assert_eq!(shape(&three), (12, 22, 11, 6));
        assert_eq!(crd_profile(&three).unwrap().mu(2), Some(3));
    }

    #[test]
    fn catalog_shapes() {
        let expected = [
            (1, (4, 6, 3, 2)),
            (2, (6, 4, 2, 3)),
            (3, (9, 6, 2, 3)),
            (4, (8, 6, 3, 4)),
            (5, (12, 4, 2, 6)),
            (6, (9, 12, 4, 3)),
            (7, (8, 8, 4, 4)),
            (8, (27, 9, 3, 9)),
            (9, (16, 8, 4, 8)),
        ];
        for (id, dims) in expected {
            assert_eq!(shape(&catalog_example(id).unwrap()), dims, "example {id}");
        }
        assert_eq!(catalog_example(10).unwrap_err(), Error::UnknownExample(10));
        assert_eq!(catalog_example(0).unwrap_err(), Error::UnknownExample(0));
    }

    #[test]
    fn example_nine_blocks_are_printed_ones() {
        let file = catalog_example(9).unwrap().to_file();
        assert_eq!(file.blocks[0], (1..=8).collect::<Vec<_>>());
        assert_eq!(file.blocks[3], vec![5, 6, 7, 8, 13, 14, 15, 16]);
        assert_eq!(file.blocks[4], vec![1, 2, 5, 6, 9, 10, 13, 14]);
        assert_eq!(file.blocks[7], vec![2, 4, 6, 8, 10, 12, 14, 16]);
    }

    #[test]
    fn spec_strings() {
        assert_eq!(
            "affine:n=3".parse::<ConstructionSpec>().unwrap(),
            ConstructionSpec::AffinePlane { n: 3 }
        );
        assert_eq!(
            "ag:q=2,m=3".parse::<ConstructionSpec>().unwrap(),
            ConstructionSpec::AffineGeometry { q: 2, m: 3 }
        );
        assert_eq!(
            "hadamard:m=2".parse::<ConstructionSpec>().unwrap(),
            ConstructionSpec::Hadamard { m: 2 }
        );
        assert_eq!(
            "example:4".parse::<ConstructionSpec>().unwrap(),
            ConstructionSpec::CatalogExample { id: 4 }
        );
        for bad in [
            "affine",
            "affine:q=3",
            "ag:q=2",
            "foo:n=1",
            "example:x",
            "affine:n=x",
        ] {
            assert!(bad.parse::<ConstructionSpec>().is_err(), "{bad}");
        }
        for spec in ["affine:n=3", "ag:q=2,m=3", "hadamard:m=2", "example:4"] {
            assert_eq!(spec.parse::<ConstructionSpec>().unwrap().to_string(), spec);
        }
    }
}
