//! Finite groupoids given by explicit composition tables.
//!
//! Arrows compose in diagram order: `compose(a, b)` is "a followed by b",
//! defined exactly when `dst(a) == src(b)`. The table-level audit reports
//! every axiom violation with a concrete witness, which is what the
//! model-mutation diagnostics build on.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

/// One arrow of a finite groupoid.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Arrow {
    pub id: String,
    pub src: String,
    pub dst: String,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub identity: bool,
}

/// A violation of the groupoid axioms in a composition table.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GroupoidDefect {
    #[error("duplicate id {0:?}")]
    DuplicateId(String),
    #[error("arrow {arrow:?} references unknown object {object:?}")]
    UnknownObject { arrow: String, object: String },
    #[error("table references unknown arrow {0:?}")]
    UnknownArrow(String),
    #[error("object {0:?} has no identity arrow")]
    MissingIdentity(String),
    #[error("object {object:?} has more than one identity ({first:?}, {second:?})")]
    ExtraIdentity {
        object: String,
        first: String,
        second: String,
    },
    #[error("identity arrow {0:?} is not an endomorphism")]
    IdentityEndpoints(String),
    #[error("composable pair ({a:?}, {b:?}) missing from the table")]
    MissingComposite { a: String, b: String },
    #[error("pair ({a:?}, {b:?}) is in the table but not composable")]
    NotComposable { a: String, b: String },
    #[error("composite of {a:?} then {b:?} has wrong endpoints (got {got:?})")]
    CompositeEndpoints { a: String, b: String, got: String },
    #[error("identity is not neutral: {a:?} then {b:?} gave {got:?}")]
    IdentityNotNeutral { a: String, b: String, got: String },
    #[error("associativity fails on ({a:?}, {b:?}, {c:?})")]
    NotAssociative { a: String, b: String, c: String },
    #[error("arrow {0:?} has no inverse entry")]
    MissingInverse(String),
    #[error("inverse of {arrow:?} is {inverse:?}, which has wrong endpoints")]
    InverseEndpoints { arrow: String, inverse: String },
    #[error("{arrow:?} composed with claimed inverse {inverse:?} is not an identity")]
    InverseNotInverse { arrow: String, inverse: String },
}

#[derive(Deserialize)]
struct RawGroupoid {
    objects: Vec<String>,
    arrows: Vec<Arrow>,
    compose: Vec<(String, String, String)>,
    inverses: BTreeMap<String, String>,
}

/// A finite groupoid with validated tables.
#[derive(Clone, PartialEq, Eq, Deserialize)]
#[serde(try_from = "RawGroupoid")]
pub struct FiniteGroupoid {
    objects: Vec<String>,
    arrows: Vec<Arrow>,
    compose: BTreeMap<(String, String), String>,
    inverses: BTreeMap<String, String>,
    #[serde(skip)]
    index: HashMap<String, usize>,
}

impl TryFrom<RawGroupoid> for FiniteGroupoid {
    type Error = GroupoidDefect;
    fn try_from(raw: RawGroupoid) -> Result<Self, GroupoidDefect> {
        let compose = raw
            .compose
            .into_iter()
            .map(|(a, b, c)| ((a, b), c))
            .collect();
        FiniteGroupoid::new(raw.objects, raw.arrows, compose, raw.inverses)
    }
}

impl Serialize for FiniteGroupoid {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("FiniteGroupoid", 4)?;
        st.serialize_field("objects", &self.objects)?;
        st.serialize_field("arrows", &self.arrows)?;
        let triples: Vec<(&String, &String, &String)> = self
            .compose
            .iter()
            .map(|((a, b), c)| (a, b, c))
            .collect();
        st.serialize_field("compose", &triples)?;
        st.serialize_field("inverses", &self.inverses)?;
        st.end()
    }
}

impl fmt::Debug for FiniteGroupoid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "FiniteGroupoid({} objects, {} arrows)",
            self.objects.len(),
            self.arrows.len()
        )
    }
}

impl FiniteGroupoid {
    /// Validates the tables; the first defect found is returned as the error.
    pub fn new(
        mut objects: Vec<String>,
        mut arrows: Vec<Arrow>,
        compose: BTreeMap<(String, String), String>,
        inverses: BTreeMap<String, String>,
    ) -> Result<Self, GroupoidDefect> {
        objects.sort();
        arrows.sort_by(|a, b| a.id.cmp(&b.id));
        let index = arrows
            .iter()
            .enumerate()
            .map(|(i, a)| (a.id.clone(), i))
            .collect();
        let g = FiniteGroupoid {
            objects,
            arrows,
            compose,
            inverses,
            index,
        };
        match g.audit().into_iter().next() {
            Some(defect) => Err(defect),
            None => Ok(g),
        }
    }

    /// Builds without any validation (for audit demonstrations on broken
    /// tables). `audit` still works on the result.
    pub fn new_unchecked(
        objects: Vec<String>,
        arrows: Vec<Arrow>,
        compose: BTreeMap<(String, String), String>,
        inverses: BTreeMap<String, String>,
    ) -> Self {
        let index = arrows
            .iter()
            .enumerate()
            .map(|(i, a)| (a.id.clone(), i))
            .collect();
        FiniteGroupoid {
            objects,
            arrows,
            compose,
            inverses,
            index,
        }
    }

    /// Full axiom audit; all defects found, with witnesses.
    pub fn audit(&self) -> Vec<GroupoidDefect> {
        let mut out = Vec::new();
        // Id uniqueness.
        for (i, o) in self.objects.iter().enumerate() {
            if self.objects[..i].contains(o) {
                out.push(GroupoidDefect::DuplicateId(o.clone()));
            }
        }
        for (i, a) in self.arrows.iter().enumerate() {
            if self.arrows[..i].iter().any(|b| b.id == a.id) {
                out.push(GroupoidDefect::DuplicateId(a.id.clone()));
            }
            for obj in [&a.src, &a.dst] {
                if !self.objects.contains(obj) {
                    out.push(GroupoidDefect::UnknownObject {
                        arrow: a.id.clone(),
                        object: obj.clone(),
                    });
                }
            }
        }
        if !out.is_empty() {
            // Endpoint data is unreliable; later checks would cascade.
            return out;
        }
        // Identities: exactly one per object, endomorphic.
        for a in &self.arrows {
            if a.identity && a.src != a.dst {
                out.push(GroupoidDefect::IdentityEndpoints(a.id.clone()));
            }
        }
        for o in &self.objects {
            let ids: Vec<&Arrow> = self
                .arrows
                .iter()
                .filter(|a| a.identity && a.src == *o)
                .collect();
            match ids.len() {
                0 => out.push(GroupoidDefect::MissingIdentity(o.clone())),
                1 => {}
                _ => out.push(GroupoidDefect::ExtraIdentity {
                    object: o.clone(),
                    first: ids[0].id.clone(),
                    second: ids[1].id.clone(),
                }),
            }
        }
        // Composition table: exact domain, correct endpoints.
        for ((a, b), c) in &self.compose {
            let (aa, bb) = match (self.arrow(a), self.arrow(b)) {
                (Some(x), Some(y)) => (x, y),
                _ => {
                    let missing = if self.arrow(a).is_none() { a } else { b };
                    out.push(GroupoidDefect::UnknownArrow(missing.clone()));
                    continue;
                }
            };
            let cc = match self.arrow(c) {
                Some(x) => x,
                None => {
                    out.push(GroupoidDefect::UnknownArrow(c.clone()));
                    continue;
                }
            };
            if aa.dst != bb.src {
                out.push(GroupoidDefect::NotComposable {
                    a: a.clone(),
                    b: b.clone(),
                });
            } else if cc.src != aa.src || cc.dst != bb.dst {
                out.push(GroupoidDefect::CompositeEndpoints {
                    a: a.clone(),
                    b: b.clone(),
                    got: c.clone(),
                });
            }
        }
        for a in &self.arrows {
            for b in &self.arrows {
                if a.dst == b.src && !self.compose.contains_key(&(a.id.clone(), b.id.clone())) {
                    out.push(GroupoidDefect::MissingComposite {
                        a: a.id.clone(),
                        b: b.id.clone(),
                    });
                }
            }
        }
        if !out.is_empty() {
            return out;
        }
        // Identities neutral.
        for a in &self.arrows {
            let id_src = self.identity_of(&a.src).expect("identity exists");
            let id_dst = self.identity_of(&a.dst).expect("identity exists");
            let left = self.compose(&id_src, &a.id).expect("composable");
            if left != a.id {
                out.push(GroupoidDefect::IdentityNotNeutral {
                    a: id_src.clone(),
                    b: a.id.clone(),
                    got: left,
                });
            }
            let right = self.compose(&a.id, &id_dst).expect("composable");
            if right != a.id {
                out.push(GroupoidDefect::IdentityNotNeutral {
                    a: a.id.clone(),
                    b: id_dst,
                    got: right,
                });
            }
        }
        // Associativity on all composable triples.
        for a in &self.arrows {
            for b in &self.arrows {
                if a.dst != b.src {
                    continue;
                }
                for c in &self.arrows {
                    if b.dst != c.src {
                        continue;
                    }
                    let ab = self.compose(&a.id, &b.id).expect("composable");
                    let bc = self.compose(&b.id, &c.id).expect("composable");
                    let left = self.compose(&ab, &c.id);
                    let right = self.compose(&a.id, &bc);
                    if left != right || left.is_none() {
                        out.push(GroupoidDefect::NotAssociative {
                            a: a.id.clone(),
                            b: b.id.clone(),
                            c: c.id.clone(),
                        });
                    }
                }
            }
        }
        // Inverses.
        for a in &self.arrows {
            let inv = match self.inverses.get(&a.id) {
                None => {
                    out.push(GroupoidDefect::MissingInverse(a.id.clone()));
                    continue;
                }
                Some(i) => i.clone(),
            };
            let ia = match self.arrow(&inv) {
                None => {
                    out.push(GroupoidDefect::UnknownArrow(inv));
                    continue;
                }
                Some(x) => x,
            };
            if ia.src != a.dst || ia.dst != a.src {
                out.push(GroupoidDefect::InverseEndpoints {
                    arrow: a.id.clone(),
                    inverse: inv,
                });
                continue;
            }
            let fwd = self.compose(&a.id, &inv).expect("composable");
            let bwd = self.compose(&inv, &a.id).expect("composable");
            let ok = self.is_identity(&fwd) && self.is_identity(&bwd);
            if !ok {
                out.push(GroupoidDefect::InverseNotInverse {
                    arrow: a.id.clone(),
                    inverse: inv,
                });
            }
        }
        out
    }

    pub fn objects(&self) -> &[String] {
        &self.objects
    }

    pub fn arrows(&self) -> &[Arrow] {
        &self.arrows
    }

    pub fn arrow(&self, id: &str) -> Option<&Arrow> {
        self.index.get(id).map(|&i| &self.arrows[i])
    }

    pub fn is_identity(&self, id: &str) -> bool {
        self.arrow(id).is_some_and(|a| a.identity)
    }

    pub fn identity_of(&self, object: &str) -> Option<String> {
        self.arrows
            .iter()
            .find(|a| a.identity && a.src == object)
            .map(|a| a.id.clone())
    }

    /// `a` followed by `b`.
    pub fn compose(&self, a: &str, b: &str) -> Option<String> {
        self.compose.get(&(a.to_string(), b.to_string())).cloned()
    }

    pub fn inverse(&self, a: &str) -> Option<String> {
        self.inverses.get(a).cloned()
    }

    /// Arrows leaving `x`, in id order.
    pub fn star(&self, x: &str) -> Vec<&Arrow> {
        self.arrows.iter().filter(|a| a.src == x).collect()
    }

    pub fn hom(&self, x: &str, y: &str) -> Vec<&Arrow> {
        self.arrows
            .iter()
            .filter(|a| a.src == x && a.dst == y)
            .collect()
    }

    /// The vertex group at `x`, as the list of its arrow ids.
    pub fn vertex_group(&self, x: &str) -> Vec<String> {
        self.hom(x, x).iter().map(|a| a.id.clone()).collect()
    }

    /// Order of an arrow in its vertex group (endomorphisms only).
    pub fn element_order(&self, a: &str) -> Option<usize> {
        let arr = self.arrow(a)?;
        if arr.src != arr.dst {
            return None;
        }
        let mut cur = a.to_string();
        for k in 1..=self.arrows.len() {
            if self.is_identity(&cur) {
                return Some(k);
            }
            cur = self.compose(&cur, a)?;
        }
        None
    }

    /// A groupoid is an equivalence relation exactly when there is at most
    /// one arrow between any ordered pair of objects.
    pub fn is_equivalence_relation(&self) -> bool {
        for x in &self.objects {
            for y in &self.objects {
                if self.hom(x, y).len() > 1 {
                    return false;
                }
            }
        }
        true
    }

    /// Objects reachable from `x` through arrows.
    pub fn component_of(&self, x: &str) -> Vec<String> {
        let mut seen = vec![x.to_string()];
        let mut stack = vec![x.to_string()];
        while let Some(cur) = stack.pop() {
            for a in &self.arrows {
                for (s, d) in [(&a.src, &a.dst), (&a.dst, &a.src)] {
                    if s == &cur && !seen.contains(d) {
                        seen.push(d.clone());
                        stack.push(d.clone());
                    }
                }
            }
        }
        seen.sort();
        seen
    }

    /// The cyclic group of order `n` as a one-object groupoid. Arrows are
    /// named `r0` (identity), `r1`, ..., `r{n-1}`, with `rk` = rotation by k.
    pub fn cyclic_group(n: usize) -> FiniteGroupoid {
        assert!(n >= 1);
        let obj = "*".to_string();
        let arrows: Vec<Arrow> = (0..n)
            .map(|k| Arrow {
                id: format!("r{k}"),
                src: obj.clone(),
                dst: obj.clone(),
                identity: k == 0,
            })
            .collect();
        let mut compose = BTreeMap::new();
        let mut inverses = BTreeMap::new();
        for i in 0..n {
            for j in 0..n {
                compose.insert(
                    (format!("r{i}"), format!("r{j}")),
                    format!("r{}", (i + j) % n),
                );
            }
            inverses.insert(format!("r{i}"), format!("r{}", (n - i) % n));
        }
        FiniteGroupoid::new(vec![obj], arrows, compose, inverses).expect("cyclic tables are sound")
    }

    /// The pair groupoid on the given objects: exactly one arrow `x->y` for
    /// every ordered pair, named `p:{x}:{y}`.
    pub fn pair_groupoid(objects: &[&str]) -> FiniteGroupoid {
        let arrow_id = |x: &str, y: &str| format!("p:{x}:{y}");
        let arrows: Vec<Arrow> = objects
            .iter()
            .flat_map(|x| {
                objects.iter().map(move |y| Arrow {
                    id: arrow_id(x, y),
                    src: x.to_string(),
                    dst: y.to_string(),
                    identity: x == y,
                })
            })
            .collect();
        let mut compose = BTreeMap::new();
        let mut inverses = BTreeMap::new();
        for x in objects {
            for y in objects {
                inverses.insert(arrow_id(x, y), arrow_id(y, x));
                for z in objects {
                    compose.insert((arrow_id(x, y), arrow_id(y, z)), arrow_id(x, z));
                }
            }
        }
        FiniteGroupoid::new(
            objects.iter().map(|s| s.to_string()).collect(),
            arrows,
            compose,
            inverses,
        )
        .expect("pair tables are sound")
    }
}

/// A wide, totally disconnected normal subgroupoid, the data a groupoid can
/// be quotiented by without collapsing objects.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalSubgroupoid {
    members: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum NormalityError {
    #[error("unknown arrow {0:?}")]
    UnknownArrow(String),
    #[error("member {0:?} is not an endomorphism (subgroupoid must be totally disconnected)")]
    NotTotallyDisconnected(String),
    #[error("identity of object {0:?} is missing (subgroupoid must be wide)")]
    NotWide(String),
    #[error("members {a:?} then {b:?} compose to {got:?}, outside the subgroupoid")]
    NotClosed { a: String, b: String, got: String },
    #[error("inverse {inverse:?} of member {member:?} is outside the subgroupoid")]
    NotClosedUnderInverse { member: String, inverse: String },
    #[error("conjugate of member {member:?} along {along:?} is {got:?}, outside the subgroupoid")]
    NotNormal {
        member: String,
        along: String,
        got: String,
    },
}

impl NormalSubgroupoid {
    /// Validates `members` as a wide, totally disconnected, conjugation-
    /// closed subgroupoid of `g`.
    pub fn new(g: &FiniteGroupoid, mut members: Vec<String>) -> Result<Self, NormalityError> {
        members.sort();
        members.dedup();
        for m in &members {
            let arr = g
                .arrow(m)
                .ok_or_else(|| NormalityError::UnknownArrow(m.clone()))?;
            if arr.src != arr.dst {
                return Err(NormalityError::NotTotallyDisconnected(m.clone()));
            }
        }
        for o in g.objects() {
            let id = g.identity_of(o).expect("validated groupoid");
            if !members.contains(&id) {
                return Err(NormalityError::NotWide(o.clone()));
            }
        }
        for a in &members {
            for b in &members {
                if let Some(c) = g.compose(a, b) {
                    if !members.contains(&c) {
                        return Err(NormalityError::NotClosed {
                            a: a.clone(),
                            b: b.clone(),
                            got: c,
                        });
                    }
                }
            }
            let inv = g.inverse(a).expect("validated groupoid");
            if !members.contains(&inv) {
                return Err(NormalityError::NotClosedUnderInverse {
                    member: a.clone(),
                    inverse: inv,
                });
            }
        }
        // Conjugation: for n at x and any arrow a: x -> y, the composite
        // a^{-1} then n then a must be a member.
        for n in &members {
            let base = &g.arrow(n).expect("checked").src;
            for a in g.arrows() {
                if &a.src != base {
                    continue;
                }
                let ainv = g.inverse(&a.id).expect("validated groupoid");
                let half = g.compose(&ainv, n).expect("composable");
                let conj = g.compose(&half, &a.id).expect("composable");
                if !members.contains(&conj) {
                    return Err(NormalityError::NotNormal {
                        member: n.clone(),
                        along: a.id.clone(),
                        got: conj,
                    });
                }
            }
        }
        Ok(NormalSubgroupoid { members })
    }

    pub fn members(&self) -> &[String] {
        &self.members
    }

    pub fn contains(&self, id: &str) -> bool {
        self.members.contains(&id.to_string())
    }
}

/// The quotient groupoid and its projection. Cosets are named after their
/// lexicographically smallest member.
pub fn quotient(g: &FiniteGroupoid, n: &NormalSubgroupoid) -> (FiniteGroupoid, GroupoidMorphism) {
    // Union-find over arrow indices: a ~ m.a.m' for members m, m'.
    let ids: Vec<String> = g.arrows().iter().map(|a| a.id.clone()).collect();
    let pos: HashMap<String, usize> = ids
        .iter()
        .enumerate()
        .map(|(i, v)| (v.clone(), i))
        .collect();
    let mut parent: Vec<usize> = (0..ids.len()).collect();
    fn find(parent: &mut Vec<usize>, i: usize) -> usize {
        if parent[i] != i {
            let root = find(parent, parent[i]);
            parent[i] = root;
        }
        parent[i]
    }
    let union = |parent: &mut Vec<usize>, a: usize, b: usize| {
        let (ra, rb) = (find(parent, a), find(parent, b));
        if ra != rb {
            parent[ra.max(rb)] = ra.min(rb);
        }
    };
    for a in g.arrows() {
        for m in n.members() {
            if let Some(left) = g.compose(m, &a.id) {
                union(&mut parent, pos[&a.id], pos[&left]);
            }
            if let Some(right) = g.compose(&a.id, m) {
                union(&mut parent, pos[&a.id], pos[&right]);
            }
        }
    }
    // Representative = smallest id in the class (ids are sorted, and union
    // keeps the smaller index as root).
    let rep = |parent: &mut Vec<usize>, id: &String| ids[find(parent, pos[id])].clone();
    let mut class_arrows: Vec<Arrow> = Vec::new();
    let mut arrow_map = BTreeMap::new();
    for a in g.arrows() {
        let r = rep(&mut parent, &a.id);
        arrow_map.insert(a.id.clone(), r.clone());
        if !class_arrows.iter().any(|c| c.id == r) {
            class_arrows.push(Arrow {
                id: r.clone(),
                src: a.src.clone(),
                dst: a.dst.clone(),
                identity: false,
            });
        }
    }
    // A coset is the identity of its object exactly when it contains the
    // original identity arrow there.
    for c in &mut class_arrows {
        c.identity = g.objects().iter().any(|o| {
            let id = g.identity_of(o).expect("validated groupoid");
            arrow_map[&id] == c.id
        });
    }
    let mut compose = BTreeMap::new();
    let mut inverses = BTreeMap::new();
    for a in g.arrows() {
        for b in g.arrows() {
            if let Some(c) = g.compose(&a.id, &b.id) {
                compose.insert(
                    (arrow_map[&a.id].clone(), arrow_map[&b.id].clone()),
                    arrow_map[&c].clone(),
                );
            }
        }
        inverses.insert(
            arrow_map[&a.id].clone(),
            arrow_map[&g.inverse(&a.id).expect("validated")].clone(),
        );
    }
    let q = FiniteGroupoid::new(g.objects().to_vec(), class_arrows, compose, inverses)
        .expect("quotient by a normal subgroupoid is a groupoid");
    let object_map = g
        .objects()
        .iter()
        .map(|o| (o.clone(), o.clone()))
        .collect();
    let morphism = GroupoidMorphism {
        object_map,
        arrow_map,
    };
    (q, morphism)
}

/// A functor between finite groupoids, given by explicit maps.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupoidMorphism {
    pub object_map: BTreeMap<String, String>,
    pub arrow_map: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MorphismDefect {
    #[error("no image for object {0:?}")]
    ObjectNotMapped(String),
    #[error("no image for arrow {0:?}")]
    ArrowNotMapped(String),
    #[error("image {0:?} does not exist in the target")]
    UnknownImage(String),
    #[error("arrow {arrow:?} maps to {image:?}, endpoints disagree with the object map")]
    EndpointMismatch { arrow: String, image: String },
    #[error("identity {0:?} does not map to an identity")]
    IdentityNotPreserved(String),
    #[error("composition not preserved on ({a:?}, {b:?})")]
    CompositionNotPreserved { a: String, b: String },
}

impl GroupoidMorphism {
    /// Checks functoriality from `src` to `dst`; all defects reported.
    pub fn audit(&self, src: &FiniteGroupoid, dst: &FiniteGroupoid) -> Vec<MorphismDefect> {
        let mut out = Vec::new();
        for o in src.objects() {
            match self.object_map.get(o) {
                None => out.push(MorphismDefect::ObjectNotMapped(o.clone())),
                Some(im) if !dst.objects().contains(im) => {
                    out.push(MorphismDefect::UnknownImage(im.clone()))
                }
                _ => {}
            }
        }
        for a in src.arrows() {
            let im = match self.arrow_map.get(&a.id) {
                None => {
                    out.push(MorphismDefect::ArrowNotMapped(a.id.clone()));
                    continue;
                }
                Some(i) => i,
            };
            let ia = match dst.arrow(im) {
                None => {
                    out.push(MorphismDefect::UnknownImage(im.clone()));
                    continue;
                }
                Some(x) => x,
            };
            let (src_im, dst_im) = match (self.object_map.get(&a.src), self.object_map.get(&a.dst))
            {
                (Some(s), Some(d)) => (s, d),
                _ => continue, // already reported
            };
            if &ia.src != src_im || &ia.dst != dst_im {
                out.push(MorphismDefect::EndpointMismatch {
                    arrow: a.id.clone(),
                    image: im.clone(),
                });
            }
            if a.identity && !ia.identity {
                out.push(MorphismDefect::IdentityNotPreserved(a.id.clone()));
            }
        }
        if !out.is_empty() {
            return out;
        }
        for a in src.arrows() {
            for b in src.arrows() {
                if let Some(c) = src.compose(&a.id, &b.id) {
                    let lhs = dst.compose(&self.arrow_map[&a.id], &self.arrow_map[&b.id]);
                    let rhs = Some(self.arrow_map[&c].clone());
                    if lhs != rhs {
                        out.push(MorphismDefect::CompositionNotPreserved {
                            a: a.id.clone(),
                            b: b.id.clone(),
                        });
                    }
                }
            }
        }
        out
    }

    pub fn apply_object(&self, o: &str) -> Option<&String> {
        self.object_map.get(o)
    }

    pub fn apply_arrow(&self, a: &str) -> Option<&String> {
        self.arrow_map.get(a)
    }
}
