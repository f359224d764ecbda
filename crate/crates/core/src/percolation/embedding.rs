//! The Galton–Watson embedding into nested half-planes.
//!
//! Every node lives in its own canonical chart, in which its stick is
//! `l_L(o, 0)` and its half-plane is the right half-plane `H₀`. Children are
//! found in a fresh restricted realization along `[L/4, L/2]` of the
//! positive axis and recorded in the parent's chart together with the chart
//! map. World coordinates are never formed, so the depth is unbounded.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_6, PI};

use thiserror::Error;

use crate::geometry::{
    dist, make_stick, Frame, HPoint, HalfPlane, HitTriple, Stick, EPS_GEO,
};
use crate::process::{axis_hits, PhiLaw, ProcessError, TripleBox};
use crate::rng::{mix, role, stream};

pub const MIN_EMBEDDING_LENGTH: f64 = 20.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EmbeddingError {
    #[error("embedding requires L >= {MIN_EMBEDDING_LENGTH}, got {0}")]
    LengthTooSmall(f64),
    #[error("half-plane check failed at depth {depth}: {detail}")]
    GeometryCheck { depth: u32, detail: String },
    #[error(transparent)]
    Process(#[from] ProcessError),
}

/// The upper (`+1`) and lower (`−1`) search boxes.
pub fn search_boxes(length: f64) -> [TripleBox; 2] {
    let (q, h) = (length / 4.0, length / 2.0);
    [
        TripleBox {
            rho: (q, h),
            phi: (FRAC_PI_6, FRAC_PI_3),
            r: (q, h),
        },
        TripleBox {
            rho: (q, h),
            phi: (PI - FRAC_PI_3, PI - FRAC_PI_6),
            r: (-h, -q),
        },
    ]
}

/// A child found by one search, in the parent's canonical chart.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChildStick {
    pub side: i8,
    pub triple: HitTriple,
    pub stick: Stick,
    /// Chart of the child: origin at its centre, heading along the half of
    /// the stick away from the crossing point.
    pub frame: Frame,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmbeddingNode {
    pub parent: Option<usize>,
    pub depth: u32,
    pub side: i8,
    pub triple: HitTriple,
    pub stick: Stick,
    pub frame: Frame,
    pub(crate) key: u64,
}

/// Smallest margins seen across the checks of a tree.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CheckSummary {
    pub children_checked: usize,
    /// `min(π/2 − θ₂)` over children (mirrored for `−1` children).
    pub min_outer_margin: f64,
    /// `min θ₁` over children (mirrored for `−1` children).
    pub min_inner_angle: f64,
    /// Smallest separation between sibling half-planes' ideal arcs.
    pub min_sibling_gap: f64,
}

impl Default for CheckSummary {
    fn default() -> Self {
        CheckSummary {
            children_checked: 0,
            min_outer_margin: f64::INFINITY,
            min_inner_angle: f64::INFINITY,
            min_sibling_gap: f64::INFINITY,
        }
    }
}

impl CheckSummary {
    fn merge(&mut self, o: &CheckSummary) {
        self.children_checked += o.children_checked;
        self.min_outer_margin = self.min_outer_margin.min(o.min_outer_margin);
        self.min_inner_angle = self.min_inner_angle.min(o.min_inner_angle);
        self.min_sibling_gap = self.min_sibling_gap.min(o.min_sibling_gap);
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingTree {
    pub nodes: Vec<EmbeddingNode>,
    pub generations: Vec<Vec<usize>>,
    pub max_depth: u32,
    pub survival_depth: u32,
    pub checks: CheckSummary,
    /// Trial outcomes per side: (`+1` searches, `+1` found, `−1` searches, `−1` found).
    pub trials: [usize; 4],
}

impl EmbeddingTree {
    pub fn survived(&self) -> bool {
        self.survival_depth >= self.max_depth
    }

    pub fn generation_sizes(&self) -> Vec<usize> {
        self.generations.iter().map(|g| g.len()).collect()
    }
}

/// How the tree is rooted.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EmbeddingStart {
    /// The root is `l_L(o, 0)` with half-plane `H₀`.
    Stick,
    /// Start from the segment `l[o, (δL, 0)]`: an auxiliary stick crossing it
    /// at angle at most `max_angle`, centred at least `L/4` ahead and lying
    /// in `H₀`, becomes the root.
    Segment { delta: f64, max_angle: f64 },
}

fn child_frame(center: HPoint, crossing: HPoint) -> Frame {
    let (_, to_cross) = Frame::new(center, 0.0).local(&crossing);
    Frame::new(center, to_cross + PI)
}

fn tie_break(a: &HitTriple, b: &HitTriple) -> std::cmp::Ordering {
    a.rho_prime
        .total_cmp(&b.rho_prime)
        .then(a.varphi.total_cmp(&b.varphi))
        .then(a.r.total_cmp(&b.r))
}

/// Lemma checks for a child in its parent's chart.
fn check_child(c: &ChildStick, length: f64, depth: u32) -> Result<CheckSummary, EmbeddingError> {
    let fail = |detail: String| EmbeddingError::GeometryCheck { depth, detail };
    let h0 = HalfPlane::facing(&Frame::CANONICAL, 0.0);
    let slack = 4.0 * (-length / 4.0).exp();
    let s = c.side as f64;

    let ends = c.stick.endpoints();
    for e in [ends.a, ends.b] {
        if e.rho() * e.theta().cos() < -EPS_GEO && e.rho() > EPS_GEO {
            return Err(fail(format!("stick endpoint {e:?} outside H0")));
        }
    }

    // ideal endpoints of the perpendicular through the centre
    let e_lo = c.frame.ideal_endpoint(-s * FRAC_PI_2).diff(crate::geometry::Angle::ZERO) * s;
    let e_hi = c.frame.ideal_endpoint(s * FRAC_PI_2).diff(crate::geometry::Angle::ZERO) * s;
    let (theta1, theta2) = (e_lo.min(e_hi), e_lo.max(e_hi));
    if !(theta1 > 0.0 && theta2 < FRAC_PI_2) {
        return Err(fail(format!(
            "perpendicular endpoints ({theta1}, {theta2}) leave the quadrant"
        )));
    }
    if FRAC_PI_2 - theta2 < FRAC_PI_6 - slack {
        return Err(fail(format!(
            "outer margin {} below pi/6 - 4exp(-L/4)",
            FRAC_PI_2 - theta2
        )));
    }

    // the same endpoints seen from the crossing point
    let at_p = Frame::new(HPoint::new(c.triple.rho_prime, 0.0), 0.0);
    for e in [c.frame.ideal_endpoint(FRAC_PI_2), c.frame.ideal_endpoint(-FRAC_PI_2)] {
        let beta = at_p.ideal_direction(e) * s;
        if beta < FRAC_PI_6 - slack || beta > FRAC_PI_3 + slack {
            return Err(fail(format!("angle {beta} at the crossing point out of range")));
        }
    }

    let h = HalfPlane::facing(&c.frame, 0.0);
    if !h0.contains(&h) {
        return Err(fail("child half-plane not inside H0".into()));
    }

    // the chart maps the stick onto l_L(o, 0)
    for (e, x) in [(ends.a, 1.0), (ends.b, -1.0)] {
        let q = c.frame.to_canonical(&e);
        let target = HPoint::new(length / 2.0, 0.0);
        let other = HPoint::new(length / 2.0, PI);
        let d = dist(&q, &target).min(dist(&q, &other));
        if d > 1e-9 + 1e-13 * (length / 2.0).sinh() {
            return Err(fail(format!("chart does not carry endpoint {x} onto the axis ({d})")));
        }
    }
    Ok(CheckSummary {
        children_checked: 1,
        min_outer_margin: FRAC_PI_2 - theta2,
        min_inner_angle: theta1,
        min_sibling_gap: f64::INFINITY,
    })
}

/// Searches a fresh restricted realization along `[L/4, L/2]` of the axis
/// of a node's canonical chart for the two children. Returns the children
/// found (sorted `+1` first) and the check summary.
pub fn gw_embed_children(
    node_key: u64,
    lambda: f64,
    length: f64,
    depth: u32,
) -> Result<(Vec<ChildStick>, CheckSummary), EmbeddingError> {
    if length < MIN_EMBEDDING_LENGTH {
        return Err(EmbeddingError::LengthTooSmall(length));
    }
    let mut rng = stream(node_key, &[]);
    let boxes = search_boxes(length);
    let hits = axis_hits(
        &mut rng,
        lambda,
        length,
        length / 4.0,
        length / 2.0,
        PhiLaw::Sine,
        f64::INFINITY,
    )?;
    let mut out = Vec::new();
    for (k, side) in [(0usize, 1i8), (1, -1)] {
        let best = hits
            .iter()
            .filter(|h| boxes[k].contains(h.triple.rho_prime, h.triple.varphi, h.triple.r))
            .min_by(|a, b| tie_break(&a.triple, &b.triple));
        if let Some(h) = best {
            let crossing = HPoint::new(h.triple.rho_prime, 0.0);
            out.push(ChildStick {
                side,
                triple: h.triple,
                stick: h.stick,
                frame: child_frame(h.stick.center(), crossing),
            });
        }
    }
    let mut summary = CheckSummary::default();
    for c in &out {
        summary.merge(&check_child(c, length, depth)?);
    }
    if out.len() == 2 {
        let a = HalfPlane::facing(&out[0].frame, 0.0);
        let b = HalfPlane::facing(&out[1].frame, 0.0);
        if !a.disjoint(&b) {
            return Err(EmbeddingError::GeometryCheck {
                depth,
                detail: "sibling half-planes intersect".into(),
            });
        }
        summary.min_sibling_gap = a.separation(&b);
    }
    Ok((out, summary))
}

/// Auxiliary root for the segment start.
fn find_seed_stick(
    key: u64,
    lambda: f64,
    length: f64,
    delta: f64,
    max_angle: f64,
) -> Result<Option<ChildStick>, EmbeddingError> {
    let mut rng = stream(key, &[]);
    let hits = axis_hits(
        &mut rng,
        lambda,
        length,
        0.0,
        delta * length,
        PhiLaw::Sine,
        f64::INFINITY,
    )?;
    let h0 = HalfPlane::facing(&Frame::CANONICAL, 0.0);
    let mut ok: Vec<_> = hits
        .into_iter()
        .filter(|h| {
            let t = h.triple;
            let small = t.varphi <= max_angle || t.varphi >= PI - max_angle;
            let ahead = if t.varphi <= FRAC_PI_2 {
                t.r >= length / 4.0
            } else {
                t.r <= -length / 4.0
            };
            small && ahead
        })
        .filter_map(|h| {
            let e = h.stick.endpoints();
            if !(h0.contains_point(&e.a) && h0.contains_point(&e.b)) {
                return None;
            }
            let frame = child_frame(h.stick.center(), HPoint::new(h.triple.rho_prime, 0.0));
            h0.contains(&HalfPlane::facing(&frame, 0.0)).then_some(ChildStick {
                side: 0,
                triple: h.triple,
                stick: h.stick,
                frame,
            })
        })
        .collect();
    ok.sort_by(|a, b| tie_break(&a.triple, &b.triple));
    Ok(ok.into_iter().next())
}

/// Grows the embedding tree to `max_depth` generations.
pub fn gw_embedding_simulate(
    lambda: f64,
    length: f64,
    max_depth: u32,
    seed: u64,
    start: EmbeddingStart,
) -> Result<EmbeddingTree, EmbeddingError> {
    if length < MIN_EMBEDDING_LENGTH {
        return Err(EmbeddingError::LengthTooSmall(length));
    }
    let root_key = mix(seed, &[role::EMBEDDING]);
    let root = match start {
        EmbeddingStart::Stick => Some(EmbeddingNode {
            parent: None,
            depth: 0,
            side: 0,
            triple: HitTriple {
                rho_prime: 0.0,
                varphi: 0.0,
                r: 0.0,
            },
            stick: make_stick(HPoint::ORIGIN, 0.0, length).expect("valid root"),
            frame: Frame::CANONICAL,
            key: root_key,
        }),
        EmbeddingStart::Segment { delta, max_angle } => {
            find_seed_stick(mix(root_key, &[0]), lambda, length, delta, max_angle)?.map(|c| {
                EmbeddingNode {
                    parent: None,
                    depth: 0,
                    side: 0,
                    triple: c.triple,
                    stick: c.stick,
                    frame: c.frame,
                    key: root_key,
                }
            })
        }
    };
    let mut tree = EmbeddingTree {
        nodes: Vec::new(),
        generations: Vec::new(),
        max_depth,
        survival_depth: 0,
        checks: CheckSummary::default(),
        trials: [0; 4],
    };
    let Some(root) = root else {
        return Ok(tree);
    };
    tree.nodes.push(root);
    tree.generations.push(vec![0]);
    for depth in 0..max_depth {
        let mut next = Vec::new();
        for &i in &tree.generations[depth as usize] {
            let key = tree.nodes[i].key;
            let (children, summary) = gw_embed_children(key, lambda, length, depth + 1)?;
            tree.checks.merge(&summary);
            tree.trials[0] += 1;
            tree.trials[2] += 1;
            for c in children {
                if c.side > 0 {
                    tree.trials[1] += 1;
                } else {
                    tree.trials[3] += 1;
                }
                next.push(tree.nodes.len());
                tree.nodes.push(EmbeddingNode {
                    parent: Some(i),
                    depth: depth + 1,
                    side: c.side,
                    triple: c.triple,
                    stick: c.stick,
                    frame: c.frame,
                    key: mix(key, &[c.side as u64]),
                });
            }
        }
        if next.is_empty() {
            break;
        }
        tree.generations.push(next);
        tree.survival_depth = depth + 1;
    }
    Ok(tree)
}

/// Extinction probability of a Galton–Watson process with offspring
/// `Bin(2, q)` within `depth` generations, by iterating the generating
/// function from 0.
pub fn gw_extinction_by_depth(q: f64, depth: u32) -> f64 {
    let mut s = 0.0;
    for _ in 0..depth {
        let t = 1.0 - q + q * s;
        s = t * t;
    }
    s
}

/// Ultimate extinction probability for offspring `Bin(2, q)`: the smallest
/// root of `s = (1 − q + q s)²`.
pub fn gw_extinction_probability(q: f64) -> f64 {
    if 2.0 * q <= 1.0 {
        return 1.0;
    }
    let p = 1.0 - q;
    (p / q).powi(2)
}
