use crate::error::{Error, Result};
use crate::localcolor::{Color, UNCOLORED};
use crate::runtime::LocalGraph;

/// Stateless 64-bit mix of a global id (splitmix64 finalizer).
///
/// Every rank evaluates it locally, so tie-breaks agree without messages.
#[inline]
pub fn gid_rand(gid: u64) -> u64 {
    let mut z = gid.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// What the loser rule looks at for one endpoint.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VertexKey {
    pub gid: u64,
    pub degree: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Loser {
    First,
    Second,
}

/// Picks the endpoint to uncolor: the lower global degree (when enabled),
/// else the higher `gid_rand`, else the higher gid.
pub fn choose_loser(a: VertexKey, b: VertexKey, recolor_degrees: bool) -> Result<Loser> {
    if a.gid == b.gid {
        return Err(Error::SameVertex {
            gid: a.gid as usize,
        });
    }
    if recolor_degrees && a.degree != b.degree {
        return Ok(if a.degree < b.degree {
            Loser::First
        } else {
            Loser::Second
        });
    }
    let (ra, rb) = (gid_rand(a.gid), gid_rand(b.gid));
    if ra != rb {
        return Ok(if ra > rb { Loser::First } else { Loser::Second });
    }
    Ok(if a.gid > b.gid {
        Loser::First
    } else {
        Loser::Second
    })
}

/// Uncolors one endpoint of a monochromatic pair and returns 1, or returns 0
/// when the colors differ or either endpoint is uncolored.
///
/// `degrees` is only read when `recolor_degrees` is set.
pub fn check_conflicts(
    v: usize,
    u: usize,
    colors: &mut [Color],
    gids: &[usize],
    degrees: &[u64],
    recolor_degrees: bool,
) -> Result<u64> {
    let cv = colors[v];
    if cv == UNCOLORED || cv != colors[u] {
        return Ok(0);
    }
    let key = |x: usize| VertexKey {
        gid: gids[x] as u64,
        degree: if recolor_degrees { degrees[x] } else { 0 },
    };
    match choose_loser(key(v), key(u), recolor_degrees)? {
        Loser::First => colors[v] = UNCOLORED,
        Loser::Second => colors[u] = UNCOLORED,
    }
    Ok(1)
}

/// Distance-1 detection over ghost edges.
///
/// Each first-layer ghost is compared with its owned neighbors, stopping
/// early once the ghost is uncolored. The returned value counts resolved
/// pairs and serves as a termination signal.
pub fn detect_conflicts_d1(
    lg: &LocalGraph,
    colors: &mut [Color],
    degrees: &[u64],
    recolor_degrees: bool,
) -> Result<u64> {
    let mut conflicts = 0;
    for g in lg.first_layer_ghosts() {
        for &u in lg.csr().neighbors(g) {
            if !lg.is_owned(u) {
                continue;
            }
            conflicts += check_conflicts(g, u, colors, lg.gids(), degrees, recolor_degrees)?;
            if colors[g] == UNCOLORED {
                break;
            }
        }
    }
    Ok(conflicts)
}

/// Distance-2 detection over the owned two-hop boundary.
///
/// Requires a two-layer local graph. With `partial` only vertices joined by
/// a 2-path are compared; otherwise direct neighbors are compared as well.
pub fn detect_conflicts_d2(
    lg: &LocalGraph,
    colors: &mut [Color],
    degrees: &[u64],
    recolor_degrees: bool,
    partial: bool,
) -> Result<u64> {
    if lg.ghost_layers() < 2 {
        return Err(Error::Config(
            "distance-2 detection needs a second ghost layer".into(),
        ));
    }
    let g = lg.csr();
    let gids = lg.gids();
    let mut conflicts = 0;
    'vertices: for &v in lg.boundary_d2() {
        for &u in g.neighbors(v) {
            if !partial {
                conflicts += check_conflicts(v, u, colors, gids, degrees, recolor_degrees)?;
                if colors[v] == UNCOLORED {
                    continue 'vertices;
                }
            }
            for &x in g.neighbors(u) {
                if x == v {
                    continue;
                }
                conflicts += check_conflicts(v, x, colors, gids, degrees, recolor_degrees)?;
                if colors[v] == UNCOLORED {
                    continue 'vertices;
                }
            }
        }
    }
    Ok(conflicts)
}
