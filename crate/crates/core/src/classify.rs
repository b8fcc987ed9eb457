//! Relation profiles and the four-way classification of relation sets.

use std::fmt;

use serde::Serialize;

use crate::clausal::SchaeferClass;
use crate::error::{Error, Result};
use crate::properties::{
    check_property, is_componentwise, is_nand_free, is_or_free, is_safely, BaseProperty,
    SafeProperty,
};
use crate::relation::{Relation, SAFE_CHECK_ARITY_MAX};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RelationProfile {
    pub name: Option<String>,
    pub arity: usize,
    pub size: usize,
    pub zero_valid: bool,
    pub one_valid: bool,
    pub bijunctive: bool,
    pub horn: bool,
    pub dual_horn: bool,
    pub affine: bool,
    pub ihsb_minus: bool,
    pub ihsb_plus: bool,
    pub or_free: bool,
    pub nand_free: bool,
    pub componentwise_bijunctive: bool,
    pub componentwise_ihsb_minus: bool,
    pub componentwise_ihsb_plus: bool,
    /// `None` when the arity is above [`SAFE_CHECK_ARITY_MAX`].
    pub safely_componentwise_bijunctive: Option<bool>,
    pub safely_or_free: Option<bool>,
    pub safely_nand_free: Option<bool>,
    pub safely_componentwise_ihsb_minus: Option<bool>,
    pub safely_componentwise_ihsb_plus: Option<bool>,
}

impl RelationProfile {
    pub fn base(&self, p: BaseProperty) -> bool {
        match p {
            BaseProperty::ZeroValid => self.zero_valid,
            BaseProperty::OneValid => self.one_valid,
            BaseProperty::Bijunctive => self.bijunctive,
            BaseProperty::Horn => self.horn,
            BaseProperty::DualHorn => self.dual_horn,
            BaseProperty::Affine => self.affine,
            BaseProperty::IhsbMinus => self.ihsb_minus,
            BaseProperty::IhsbPlus => self.ihsb_plus,
        }
    }

    pub fn safely(&self, p: SafeProperty) -> Option<bool> {
        match p {
            SafeProperty::SafelyComponentwiseBijunctive => self.safely_componentwise_bijunctive,
            SafeProperty::SafelyOrFree => self.safely_or_free,
            SafeProperty::SafelyNandFree => self.safely_nand_free,
            SafeProperty::SafelyComponentwiseIhsbMinus => self.safely_componentwise_ihsb_minus,
            SafeProperty::SafelyComponentwiseIhsbPlus => self.safely_componentwise_ihsb_plus,
        }
    }

    pub fn in_class(&self, c: SchaeferClass) -> bool {
        self.base(c.property())
    }

    pub fn is_schaefer(&self) -> bool {
        SchaeferClass::ALL.iter().any(|&c| self.in_class(c))
    }
}

pub fn profile(r: &Relation) -> RelationProfile {
    let safe = |p| {
        if r.arity() > SAFE_CHECK_ARITY_MAX {
            None
        } else {
            Some(is_safely(r, p).expect("arity checked"))
        }
    };
    RelationProfile {
        name: r.name().map(str::to_string),
        arity: r.arity(),
        size: r.len(),
        zero_valid: check_property(r, BaseProperty::ZeroValid),
        one_valid: check_property(r, BaseProperty::OneValid),
        bijunctive: check_property(r, BaseProperty::Bijunctive),
        horn: check_property(r, BaseProperty::Horn),
        dual_horn: check_property(r, BaseProperty::DualHorn),
        affine: check_property(r, BaseProperty::Affine),
        ihsb_minus: check_property(r, BaseProperty::IhsbMinus),
        ihsb_plus: check_property(r, BaseProperty::IhsbPlus),
        or_free: is_or_free(r),
        nand_free: is_nand_free(r),
        componentwise_bijunctive: is_componentwise(r, BaseProperty::Bijunctive),
        componentwise_ihsb_minus: is_componentwise(r, BaseProperty::IhsbMinus),
        componentwise_ihsb_plus: is_componentwise(r, BaseProperty::IhsbPlus),
        safely_componentwise_bijunctive: safe(SafeProperty::SafelyComponentwiseBijunctive),
        safely_or_free: safe(SafeProperty::SafelyOrFree),
        safely_nand_free: safe(SafeProperty::SafelyNandFree),
        safely_componentwise_ihsb_minus: safe(SafeProperty::SafelyComponentwiseIhsbMinus),
        safely_componentwise_ihsb_plus: safe(SafeProperty::SafelyComponentwiseIhsbPlus),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum SetClass {
    #[serde(rename = "CPSS")]
    Cpss,
    SchaeferNotCPSS,
    SafelyTightNotSchaefer,
    NotSafelyTight,
}

impl fmt::Display for SetClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SetClass::Cpss => "CPSS",
            SetClass::SchaeferNotCPSS => "SchaeferNotCPSS",
            SetClass::SafelyTightNotSchaefer => "SafelyTightNotSchaefer",
            SetClass::NotSafelyTight => "NotSafelyTight",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Complexity {
    P,
    #[serde(rename = "NP-complete")]
    NpComplete,
    #[serde(rename = "coNP-complete")]
    CoNpComplete,
    #[serde(rename = "PSPACE-complete")]
    PspaceComplete,
}

impl fmt::Display for Complexity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Complexity::P => "P",
            Complexity::NpComplete => "NP-complete",
            Complexity::CoNpComplete => "coNP-complete",
            Complexity::PspaceComplete => "PSPACE-complete",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum DiameterBound {
    #[serde(rename = "O(n)")]
    Linear,
    #[serde(rename = "2^Ω(√n)")]
    Exponential,
}

impl fmt::Display for DiameterBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DiameterBound::Linear => "O(n)",
            DiameterBound::Exponential => "2^Ω(√n)",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Predictions {
    pub sat: Complexity,
    pub st_conn: Complexity,
    pub conn: Complexity,
    pub diameter_bound: DiameterBound,
}

impl fmt::Display for Predictions {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Conn_C: {}; st-Conn_C: {}; diameter: {}",
            self.conn, self.st_conn, self.diameter_bound
        )
    }
}

/// Row lookup in the results table.
pub fn predict(class: SetClass) -> Predictions {
    use Complexity::*;
    match class {
        SetClass::Cpss => Predictions {
            sat: P,
            st_conn: P,
            conn: P,
            diameter_bound: DiameterBound::Linear,
        },
        SetClass::SchaeferNotCPSS => Predictions {
            sat: P,
            st_conn: P,
            conn: CoNpComplete,
            diameter_bound: DiameterBound::Linear,
        },
        SetClass::SafelyTightNotSchaefer => Predictions {
            sat: NpComplete,
            st_conn: P,
            conn: CoNpComplete,
            diameter_bound: DiameterBound::Linear,
        },
        SetClass::NotSafelyTight => Predictions {
            sat: NpComplete,
            st_conn: PspaceComplete,
            conn: PspaceComplete,
            diameter_bound: DiameterBound::Exponential,
        },
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SetClassification {
    pub set_class: SetClass,
    pub tight: bool,
    pub safely_tight: bool,
    pub schaefer: bool,
    pub cpss: bool,
    /// Schaefer classes containing every relation of the set.
    pub schaefer_classes: Vec<SchaeferClass>,
    /// Schaefer classes witnessing the CPSS conditions.
    pub cpss_classes: Vec<SchaeferClass>,
    pub predictions: Predictions,
    pub profiles: Vec<RelationProfile>,
}

impl SetClassification {
    /// One-line summary such as
    /// `SchaeferNotCPSS; Conn_C: coNP-complete; st-Conn_C: P; diameter: O(n)`.
    pub fn summary(&self) -> String {
        format!("{}; {}", self.set_class, self.predictions)
    }
}

// three-valued "for all" over profiles
fn all3(
    profiles: &[RelationProfile],
    f: impl Fn(&RelationProfile) -> Option<bool>,
) -> Option<bool> {
    let mut unknown = false;
    for p in profiles {
        match f(p) {
            Some(false) => return Some(false),
            None => unknown = true,
            Some(true) => {}
        }
    }
    if unknown {
        None
    } else {
        Some(true)
    }
}

fn any3(values: impl IntoIterator<Item = Option<bool>>) -> Option<bool> {
    let mut unknown = false;
    for v in values {
        match v {
            Some(true) => return Some(true),
            None => unknown = true,
            Some(false) => {}
        }
    }
    if unknown {
        None
    } else {
        Some(false)
    }
}

fn and3(a: bool, b: Option<bool>) -> Option<bool> {
    if a {
        b
    } else {
        Some(false)
    }
}

fn bound_error(profiles: &[RelationProfile]) -> Error {
    let arity = profiles.iter().map(|p| p.arity).max().unwrap_or(0);
    Error::ArityTooLarge {
        arity,
        max: SAFE_CHECK_ARITY_MAX,
    }
}

pub fn classify_profiles(profiles: Vec<RelationProfile>) -> Result<SetClassification> {
    if profiles.is_empty() {
        return Err(Error::EmptySet);
    }
    let ps = &profiles[..];
    let every = |f: fn(&RelationProfile) -> bool| ps.iter().all(f);

    let schaefer_classes: Vec<SchaeferClass> = SchaeferClass::ALL
        .into_iter()
        .filter(|&c| ps.iter().all(|p| p.in_class(c)))
        .collect();
    let schaefer = !schaefer_classes.is_empty();

    let mut cpss_classes = Vec::new();
    let mut cpss_unknown = false;
    for c in SchaeferClass::ALL {
        let holds = match c {
            SchaeferClass::Bijunctive | SchaeferClass::Affine => {
                Some(ps.iter().all(|p| p.in_class(c)))
            }
            SchaeferClass::Horn => all3(ps, |p| and3(p.horn, p.safely_componentwise_ihsb_minus)),
            SchaeferClass::DualHorn => {
                all3(ps, |p| and3(p.dual_horn, p.safely_componentwise_ihsb_plus))
            }
        };
        match holds {
            Some(true) => cpss_classes.push(c),
            Some(false) => {}
            None => cpss_unknown = true,
        }
    }
    let cpss = !cpss_classes.is_empty();
    if !cpss && cpss_unknown {
        return Err(bound_error(ps));
    }

    let tight =
        every(|p| p.componentwise_bijunctive) || every(|p| p.or_free) || every(|p| p.nand_free);
    let safely_tight = match any3([
        all3(ps, |p| p.safely_componentwise_bijunctive),
        all3(ps, |p| p.safely_or_free),
        all3(ps, |p| p.safely_nand_free),
    ]) {
        Some(v) => v,
        // every Schaefer set is safely tight
        None if schaefer => true,
        None => return Err(bound_error(ps)),
    };

    let set_class = if cpss {
        SetClass::Cpss
    } else if schaefer {
        SetClass::SchaeferNotCPSS
    } else if safely_tight {
        SetClass::SafelyTightNotSchaefer
    } else {
        SetClass::NotSafelyTight
    };
    Ok(SetClassification {
        set_class,
        tight,
        safely_tight,
        schaefer,
        cpss,
        schaefer_classes,
        cpss_classes,
        predictions: predict(set_class),
        profiles,
    })
}

pub fn classify_set(set: &[Relation]) -> Result<SetClassification> {
    classify_profiles(set.iter().map(profile).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::builtin;

    fn rel(arity: usize, ts: &[&str]) -> Relation {
        Relation::from_bitstrings(arity, ts).unwrap()
    }

    fn class_of(names: &[&str]) -> SetClassification {
        let set: Vec<Relation> = names.iter().map(|n| builtin(n).unwrap()).collect();
        classify_set(&set).unwrap()
    }

    #[test]
    fn or_example_profile() {
        let p = profile(&rel(3, &["001", "110", "111"]));
        assert!(p.or_free);
        assert_eq!(p.safely_or_free, Some(false));
    }

    #[test]
    fn r_pspa_profile() {
        let p = profile(&builtin("R_PSPA").unwrap());
        assert!(!p.is_schaefer());
        assert!(p.componentwise_bijunctive && p.or_free && !p.nand_free);
        assert_eq!(p.safely_componentwise_bijunctive, Some(false));
        assert_eq!(p.safely_or_free, Some(false));
    }

    #[test]
    fn full_unary_profile() {
        let p = profile(&Relation::full(1).unwrap());
        for b in BaseProperty::ALL {
            assert!(p.base(b));
        }
        for s in SafeProperty::ALL {
            assert_eq!(p.safely(s), Some(true));
        }
        assert!(p.or_free && p.nand_free);
    }

    #[test]
    fn set_classes() {
        let m = class_of(&["M"]);
        assert_eq!(m.set_class, SetClass::SchaeferNotCPSS);
        assert_eq!(
            m.summary(),
            "SchaeferNotCPSS; Conn_C: coNP-complete; st-Conn_C: P; diameter: O(n)"
        );
        let pspa = class_of(&["R_PSPA"]);
        assert_eq!(pspa.set_class, SetClass::NotSafelyTight);
        assert!(pspa.tight && !pspa.safely_tight);
        assert_eq!(class_of(&["PHI_coNP"]).set_class, SetClass::SchaeferNotCPSS);
        assert_eq!(class_of(&["OR", "NAND"]).set_class, SetClass::Cpss);
        assert_eq!(class_of(&["P", "N"]).set_class, SetClass::NotSafelyTight);
        assert_eq!(class_of(&["R_NAE"]).set_class, SetClass::NotSafelyTight);
    }

    #[test]
    fn r_conp_is_not_schaefer() {
        let c = class_of(&["R_coNP"]);
        assert!(!c.schaefer);
        assert!(!c.profiles[0].horn);
        assert_eq!(c.set_class, SetClass::SafelyTightNotSchaefer);
        assert!(c.safely_tight);
    }

    #[test]
    fn empty_set_rejected() {
        assert_eq!(classify_set(&[]), Err(Error::EmptySet));
    }

    #[test]
    fn wide_relations() {
        // schaefer classes need no safely checks except horn/dual horn
        let wide = Relation::from_predicate(11, |t| t.count_ones() % 2 == 0).unwrap();
        let c = classify_set(std::slice::from_ref(&wide)).unwrap();
        assert_eq!(c.set_class, SetClass::Cpss);
        let horn_wide = Relation::from_predicate(11, |t| t & 0b111 != 0b111).unwrap();
        assert!(matches!(
            classify_set(&[horn_wide]),
            Err(Error::ArityTooLarge { .. })
        ));
    }

    #[test]
    fn predictions_table() {
        let p = predict(SetClass::Cpss);
        assert_eq!(
            (p.conn, p.st_conn, p.sat),
            (Complexity::P, Complexity::P, Complexity::P)
        );
        let p = predict(SetClass::SafelyTightNotSchaefer);
        assert_eq!(p.sat, Complexity::NpComplete);
        assert_eq!(p.conn, Complexity::CoNpComplete);
        assert_eq!(p.st_conn, Complexity::P);
        let p = predict(SetClass::NotSafelyTight);
        assert_eq!(p.conn, Complexity::PspaceComplete);
        assert_eq!(p.st_conn, Complexity::PspaceComplete);
        assert_eq!(p.diameter_bound, DiameterBound::Exponential);
    }
}
