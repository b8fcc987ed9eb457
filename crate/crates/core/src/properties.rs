//! Closure tests and the structural relation classes.
//!
//! Bijunctive, Horn, dual Horn, affine, IHSB- and IHSB+ are decided by
//! closure under MAJ, AND, OR, x^y^z, x&(y|z) and x|(y&z) respectively.
//! Since tuples are bit-encoded, a coordinate-wise operation is a single
//! bitwise expression on the encodings.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::relation::{ArgPattern, Identification, Relation, Slot};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ClosureOp {
    Maj,
    And,
    Or,
    Xor3,
    XAndOr,
    XOrAnd,
}

impl ClosureOp {
    pub const ALL: [ClosureOp; 6] = [
        ClosureOp::Maj,
        ClosureOp::And,
        ClosureOp::Or,
        ClosureOp::Xor3,
        ClosureOp::XAndOr,
        ClosureOp::XOrAnd,
    ];

    pub fn arity(self) -> usize {
        match self {
            ClosureOp::And | ClosureOp::Or => 2,
            _ => 3,
        }
    }

    /// Coordinate-wise application; `z` is ignored by the binary operations.
    pub fn apply(self, x: u32, y: u32, z: u32) -> u32 {
        match self {
            ClosureOp::Maj => (x & y) | (y & z) | (x & z),
            ClosureOp::And => x & y,
            ClosureOp::Or => x | y,
            ClosureOp::Xor3 => x ^ y ^ z,
            ClosureOp::XAndOr => x & (y | z),
            ClosureOp::XOrAnd => x | (y & z),
        }
    }
}

/// Arguments from `r` whose image under `op` falls outside `r`, if any.
pub fn closure_witness(r: &Relation, op: ClosureOp) -> Option<Vec<u32>> {
    if is_closed(r, op) {
        None
    } else {
        search_witness(r, op)
    }
}

fn search_witness(r: &Relation, op: ClosureOp) -> Option<Vec<u32>> {
    let ts: Vec<u32> = r.tuples().collect();
    let n = ts.len();
    match op {
        ClosureOp::And | ClosureOp::Or => {
            for i in 0..n {
                for j in i + 1..n {
                    if !r.contains(op.apply(ts[i], ts[j], 0)) {
                        return Some(vec![ts[i], ts[j]]);
                    }
                }
            }
        }
        ClosureOp::Maj | ClosureOp::Xor3 => {
            // symmetric in all three arguments; equal arguments map into r
            for i in 0..n {
                for j in i + 1..n {
                    for k in j + 1..n {
                        if !r.contains(op.apply(ts[i], ts[j], ts[k])) {
                            return Some(vec![ts[i], ts[j], ts[k]]);
                        }
                    }
                }
            }
        }
        ClosureOp::XAndOr | ClosureOp::XOrAnd => {
            // symmetric in the last two arguments
            for &x in &ts {
                for j in 0..n {
                    for k in j..n {
                        if !r.contains(op.apply(x, ts[j], ts[k])) {
                            return Some(vec![x, ts[j], ts[k]]);
                        }
                    }
                }
            }
        }
    }
    None
}

/// Decides closure without searching all argument triples.
///
/// MAJ: equality with the conjunction of the binary projections.
/// XOR3: the translate `r ^ a0` is closed under XOR.
/// x&(y|z): Horn, and `a|b` is in `r` whenever it lies below some member
/// (then it equals `x&(a|b)` for that member `x`); x|(y&z) dually.
pub fn is_closed(r: &Relation, op: ClosureOp) -> bool {
    let ts: Vec<u32> = r.tuples().collect();
    let pairwise = |f: &dyn Fn(u32, u32) -> bool| {
        ts.iter()
            .enumerate()
            .all(|(i, &a)| ts[i + 1..].iter().all(|&b| f(a, b)))
    };
    match op {
        ClosureOp::And | ClosureOp::Or => pairwise(&|a, b| r.contains(op.apply(a, b, 0))),
        ClosureOp::Xor3 => match ts.first() {
            None => true,
            Some(&a0) => pairwise(&|a, b| r.contains(a ^ b ^ a0)),
        },
        ClosureOp::Maj => {
            let n = r.arity();
            let bit = |t: u32, i: usize| (t >> (n - 1 - i) & 1) as usize;
            // seen[i][j] has bit 2*t_i+t_j set for each member t
            let mut seen = vec![vec![0u8; n]; n];
            for &t in &ts {
                for (i, row) in seen.iter_mut().enumerate() {
                    for (j, cell) in row.iter_mut().enumerate() {
                        *cell |= 1 << (2 * bit(t, i) + bit(t, j));
                    }
                }
            }
            (0..1u32 << n).all(|t| {
                r.contains(t)
                    || (0..n)
                        .any(|i| (0..n).any(|j| seen[i][j] >> (2 * bit(t, i) + bit(t, j)) & 1 == 0))
            })
        }
        ClosureOp::XAndOr | ClosureOp::XOrAnd => {
            let n = r.arity();
            let size = 1usize << n;
            let minus = op == ClosureOp::XAndOr;
            if !is_closed(r, if minus { ClosureOp::And } else { ClosureOp::Or }) {
                return false;
            }
            // minus: below[t] iff t <= some member; plus: iff t >= some member
            let mut reach: Vec<bool> = (0..size as u32).map(|t| r.contains(t)).collect();
            for i in 0..n {
                let b = 1usize << i;
                for t in 0..size {
                    if t & b == 0 {
                        if minus {
                            reach[t] |= reach[t | b];
                        } else {
                            reach[t | b] |= reach[t];
                        }
                    }
                }
            }
            pairwise(&|a, b| {
                let c = if minus { a | b } else { a & b };
                r.contains(c) || !reach[c as usize]
            })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BaseProperty {
    ZeroValid,
    OneValid,
    Bijunctive,
    Horn,
    DualHorn,
    Affine,
    IhsbMinus,
    IhsbPlus,
}

impl BaseProperty {
    pub const ALL: [BaseProperty; 8] = [
        BaseProperty::ZeroValid,
        BaseProperty::OneValid,
        BaseProperty::Bijunctive,
        BaseProperty::Horn,
        BaseProperty::DualHorn,
        BaseProperty::Affine,
        BaseProperty::IhsbMinus,
        BaseProperty::IhsbPlus,
    ];

    pub fn closure_op(self) -> Option<ClosureOp> {
        match self {
            BaseProperty::ZeroValid | BaseProperty::OneValid => None,
            BaseProperty::Bijunctive => Some(ClosureOp::Maj),
            BaseProperty::Horn => Some(ClosureOp::And),
            BaseProperty::DualHorn => Some(ClosureOp::Or),
            BaseProperty::Affine => Some(ClosureOp::Xor3),
            BaseProperty::IhsbMinus => Some(ClosureOp::XAndOr),
            BaseProperty::IhsbPlus => Some(ClosureOp::XOrAnd),
        }
    }
}

pub fn check_property(r: &Relation, prop: BaseProperty) -> bool {
    match prop {
        BaseProperty::ZeroValid => r.contains(0),
        BaseProperty::OneValid => r.contains((1u32 << r.arity()) - 1),
        _ => is_closed(r, prop.closure_op().expect("closure property")),
    }
}

/// Every connected component of `G(r)` has `prop`.
pub fn is_componentwise(r: &Relation, prop: BaseProperty) -> bool {
    r.components().iter().all(|c| check_property(c, prop))
}

/// A substitution-of-constants pattern with two output variables that
/// derives `target` (a binary relation) from `r`.
pub fn binary_substitution_witness(r: &Relation, target: &Relation) -> Option<ArgPattern> {
    debug_assert_eq!(target.arity(), 2);
    let n = r.arity();
    if n < 2 {
        return None;
    }
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let rest: Vec<usize> = (0..n).filter(|&c| c != i && c != j).collect();
            for consts in 0..(1u32 << rest.len()) {
                let mut base = 0u32;
                for (k, &c) in rest.iter().enumerate() {
                    if consts >> (rest.len() - 1 - k) & 1 == 1 {
                        base |= 1 << (n - 1 - c);
                    }
                }
                let hits = (0..4u32).all(|ab| {
                    let t = base | (ab >> 1) << (n - 1 - i) | (ab & 1) << (n - 1 - j);
                    r.contains(t) == target.contains(ab)
                });
                if hits {
                    let mut slots = vec![Slot::Const(false); n];
                    slots[i] = Slot::Var(0);
                    slots[j] = Slot::Var(1);
                    for (k, &c) in rest.iter().enumerate() {
                        slots[c] = Slot::Const(consts >> (rest.len() - 1 - k) & 1 == 1);
                    }
                    return Some(ArgPattern::new(slots).expect("both outputs used"));
                }
            }
        }
    }
    None
}

pub fn or_relation() -> Relation {
    Relation::from_tuples(2, [0b01, 0b10, 0b11])
        .expect("static")
        .with_name("OR")
}

pub fn nand_relation() -> Relation {
    Relation::from_tuples(2, [0b00, 0b01, 0b10])
        .expect("static")
        .with_name("NAND")
}

pub fn or_witness(r: &Relation) -> Option<ArgPattern> {
    binary_substitution_witness(r, &or_relation())
}

pub fn nand_witness(r: &Relation) -> Option<ArgPattern> {
    binary_substitution_witness(r, &nand_relation())
}

pub fn is_or_free(r: &Relation) -> bool {
    or_witness(r).is_none()
}

pub fn is_nand_free(r: &Relation) -> bool {
    nand_witness(r).is_none()
}

/// Non-safe counterparts of the "safely" classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TightProperty {
    ComponentwiseBijunctive,
    OrFree,
    NandFree,
    ComponentwiseIhsbMinus,
    ComponentwiseIhsbPlus,
}

impl TightProperty {
    pub const ALL: [TightProperty; 5] = [
        TightProperty::ComponentwiseBijunctive,
        TightProperty::OrFree,
        TightProperty::NandFree,
        TightProperty::ComponentwiseIhsbMinus,
        TightProperty::ComponentwiseIhsbPlus,
    ];

    pub fn holds(self, r: &Relation) -> bool {
        match self {
            TightProperty::ComponentwiseBijunctive => is_componentwise(r, BaseProperty::Bijunctive),
            TightProperty::OrFree => is_or_free(r),
            TightProperty::NandFree => is_nand_free(r),
            TightProperty::ComponentwiseIhsbMinus => is_componentwise(r, BaseProperty::IhsbMinus),
            TightProperty::ComponentwiseIhsbPlus => is_componentwise(r, BaseProperty::IhsbPlus),
        }
    }
}

/// The property must hold for `r` and every relation obtained from it by
/// identification of variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SafeProperty {
    SafelyComponentwiseBijunctive,
    SafelyOrFree,
    SafelyNandFree,
    SafelyComponentwiseIhsbMinus,
    SafelyComponentwiseIhsbPlus,
}

impl SafeProperty {
    pub const ALL: [SafeProperty; 5] = [
        SafeProperty::SafelyComponentwiseBijunctive,
        SafeProperty::SafelyOrFree,
        SafeProperty::SafelyNandFree,
        SafeProperty::SafelyComponentwiseIhsbMinus,
        SafeProperty::SafelyComponentwiseIhsbPlus,
    ];

    pub fn unsafe_version(self) -> TightProperty {
        match self {
            SafeProperty::SafelyComponentwiseBijunctive => TightProperty::ComponentwiseBijunctive,
            SafeProperty::SafelyOrFree => TightProperty::OrFree,
            SafeProperty::SafelyNandFree => TightProperty::NandFree,
            SafeProperty::SafelyComponentwiseIhsbMinus => TightProperty::ComponentwiseIhsbMinus,
            SafeProperty::SafelyComponentwiseIhsbPlus => TightProperty::ComponentwiseIhsbPlus,
        }
    }
}

/// First identification (in canonical partition order) violating the
/// unsafe version of `prop`.
pub fn safely_witness(r: &Relation, prop: SafeProperty) -> Result<Option<Identification>> {
    let base = prop.unsafe_version();
    Ok(r.identification_iter()?
        .find(|id| !base.holds(&id.relation)))
}

pub fn is_safely(r: &Relation, prop: SafeProperty) -> Result<bool> {
    Ok(safely_witness(r, prop)?.is_none())
}
