use std::fmt;

use crate::error::{Error, Result};
use crate::grid::LNeighborhood;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NeighborhoodFamily {
    /// `S_E = {1..k_E}`, `S_N = {1..k_N}`.
    Contiguous { ke: usize, kn: usize },
    /// `S_E = {p, 2p, .., east_size * p}`, `S_N = {p_north, .., north_size * p_north}`.
    Periodic {
        p: usize,
        p_north: usize,
        east_size: usize,
        north_size: usize,
    },
    /// `S_E = {ie, je}`, `S_N = {i_n, jn}`.
    Sparse2 {
        ie: usize,
        je: usize,
        i_n: usize,
        jn: usize,
    },
}

impl NeighborhoodFamily {
    pub fn validate(&self) -> Result<()> {
        let fail = |why: String| Err(Error::FamilyOutOfRange(why));
        match *self {
            NeighborhoodFamily::Contiguous { ke, kn } => {
                if ke < 2 || kn < 2 {
                    return fail(format!("contiguous needs k_E, k_N >= 2, got {ke}, {kn}"));
                }
            }
            NeighborhoodFamily::Periodic {
                p,
                p_north,
                east_size,
                north_size,
            } => {
                if p < 1 || p_north < 1 {
                    return fail("periods must be positive".into());
                }
                if east_size < 2 || north_size < 2 {
                    return fail(format!(
                        "periodic needs |S_E|, |S_N| >= 2, got {east_size}, {north_size}"
                    ));
                }
            }
            NeighborhoodFamily::Sparse2 { ie, je, i_n, jn } => {
                if !(0 < ie && ie + 1 < je) || !(0 < i_n && i_n + 1 < jn) {
                    return fail(format!(
                        "sparse2 needs 0 < i < j-1 on both axes, got E=({ie},{je}) N=({i_n},{jn})"
                    ));
                }
                if je == 2 * ie || jn == 2 * i_n {
                    return fail(format!(
                        "sparse2 needs j != 2i on both axes, got E=({ie},{je}) N=({i_n},{jn})"
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn neighborhood(&self) -> Result<LNeighborhood> {
        self.validate()?;
        let (north, east): (Vec<usize>, Vec<usize>) = match *self {
            NeighborhoodFamily::Contiguous { ke, kn } => ((1..=kn).collect(), (1..=ke).collect()),
            NeighborhoodFamily::Periodic {
                p,
                p_north,
                east_size,
                north_size,
            } => (
                (1..=north_size).map(|k| k * p_north).collect(),
                (1..=east_size).map(|k| k * p).collect(),
            ),
            NeighborhoodFamily::Sparse2 { ie, je, i_n, jn } => (vec![i_n, jn], vec![ie, je]),
        };
        LNeighborhood::new(&north, &east)
    }

    /// The same family with the roles of north and east exchanged.
    pub fn transposed(&self) -> NeighborhoodFamily {
        match *self {
            NeighborhoodFamily::Contiguous { ke, kn } => NeighborhoodFamily::Contiguous { ke: kn, kn: ke },
            NeighborhoodFamily::Periodic {
                p,
                p_north,
                east_size,
                north_size,
            } => NeighborhoodFamily::Periodic {
                p: p_north,
                p_north: p,
                east_size: north_size,
                north_size: east_size,
            },
            NeighborhoodFamily::Sparse2 { ie, je, i_n, jn } => NeighborhoodFamily::Sparse2 {
                ie: i_n,
                je: jn,
                i_n: ie,
                jn: je,
            },
        }
    }

    /// Parses `contiguous KE KN`, `periodic P PN SE SN` or `sparse2 IE JE IN JN`.
    pub fn parse_words(words: &[&str]) -> std::result::Result<NeighborhoodFamily, String> {
        let nums: Vec<usize> = words
            .iter()
            .skip(1)
            .map(|w| {
                w.parse::<usize>()
                    .map_err(|_| format!("bad family parameter {w:?}"))
            })
            .collect::<std::result::Result<_, _>>()?;
        let fam = match (words.first().copied(), nums.as_slice()) {
            (Some("contiguous"), &[ke, kn]) => NeighborhoodFamily::Contiguous { ke, kn },
            (Some("periodic"), &[p, p_north, east_size, north_size]) => NeighborhoodFamily::Periodic {
                p,
                p_north,
                east_size,
                north_size,
            },
            (Some("sparse2"), &[ie, je, i_n, jn]) => NeighborhoodFamily::Sparse2 { ie, je, i_n, jn },
            _ => return Err(format!("unrecognized family {:?}", words.join(" "))),
        };
        Ok(fam)
    }
}

impl fmt::Display for NeighborhoodFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NeighborhoodFamily::Contiguous { ke, kn } => write!(f, "contiguous {ke} {kn}"),
            NeighborhoodFamily::Periodic {
                p,
                p_north,
                east_size,
                north_size,
            } => write!(f, "periodic {p} {p_north} {east_size} {north_size}"),
            NeighborhoodFamily::Sparse2 { ie, je, i_n, jn } => write!(f, "sparse2 {ie} {je} {i_n} {jn}"),
        }
    }
}

/// Vertical wire shape for a contiguous family: `a` frozen columns, the
/// signal `b` columns to their left, `c` controlling the signal width.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WireParams {
    pub a: usize,
    pub b: usize,
    pub c: usize,
}

/// Wire parameters, computed with the larger of the two sizes taken as `k_E`.
pub fn wire_params(ke: usize, kn: usize) -> Result<WireParams> {
    if ke < 2 || kn < 2 {
        return Err(Error::FamilyOutOfRange(format!(
            "wire parameters need k_E, k_N >= 2, got {ke}, {kn}"
        )));
    }
    let (ke, kn) = if ke >= kn { (ke, kn) } else { (kn, ke) };
    let a = (ke + kn) / 2;
    let b = ke - a;
    let c = if (ke + kn) % 2 == 0 { b + 1 } else { b };
    Ok(WireParams { a, b, c })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wire_parameter_values() {
        assert_eq!(wire_params(2, 2).unwrap(), WireParams { a: 2, b: 0, c: 1 });
        assert_eq!(wire_params(3, 2).unwrap(), WireParams { a: 2, b: 1, c: 1 });
        assert_eq!(wire_params(4, 3).unwrap(), WireParams { a: 3, b: 1, c: 1 });
        assert_eq!(wire_params(2, 3).unwrap(), wire_params(3, 2).unwrap());
        assert!(wire_params(1, 3).is_err());
    }

    #[test]
    fn family_validation() {
        let ok = |f: NeighborhoodFamily| f.validate().is_ok();
        assert!(ok(NeighborhoodFamily::Sparse2 {
            ie: 1,
            je: 3,
            i_n: 1,
            jn: 3
        }));
        assert!(!ok(NeighborhoodFamily::Sparse2 {
            ie: 1,
            je: 2,
            i_n: 1,
            jn: 3
        }));
        assert!(!ok(NeighborhoodFamily::Sparse2 {
            ie: 2,
            je: 4,
            i_n: 1,
            jn: 3
        }));
        assert!(!ok(NeighborhoodFamily::Contiguous { ke: 1, kn: 3 }));
        let per = NeighborhoodFamily::Periodic {
            p: 2,
            p_north: 3,
            east_size: 2,
            north_size: 2,
        };
        let nb = per.neighborhood().unwrap();
        assert_eq!(nb.east(), &[2, 4]);
        assert_eq!(nb.north(), &[3, 6]);
        assert_eq!(
            NeighborhoodFamily::parse_words(&["sparse2", "1", "3", "1", "3"]).unwrap(),
            NeighborhoodFamily::Sparse2 {
                ie: 1,
                je: 3,
                i_n: 1,
                jn: 3
            }
        );
        assert_eq!(per.to_string(), "periodic 2 3 2 2");
    }
}
