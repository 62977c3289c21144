use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::exactnum::{Rational, ValueExpr};

/// A vector written as symbol name to coefficient.
pub type NamedVector = BTreeMap<String, Rational>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Claim {
    InnerInnerBounded,
    AbsAbsDiscontinuous,
    InnerAbsUnbounded,
    AbsInnerDiscontinuous,
    RationalRestrictionContinuous,
}

impl Claim {
    pub const ALL: [Claim; 5] = [
        Claim::InnerInnerBounded,
        Claim::AbsAbsDiscontinuous,
        Claim::InnerAbsUnbounded,
        Claim::AbsInnerDiscontinuous,
        Claim::RationalRestrictionContinuous,
    ];

    /// Short name used on the command line.
    pub fn kind(self) -> &'static str {
        match self {
            Claim::InnerInnerBounded => "inner-inner",
            Claim::AbsAbsDiscontinuous => "abs-abs",
            Claim::InnerAbsUnbounded => "inner-abs",
            Claim::AbsInnerDiscontinuous => "abs-inner",
            Claim::RationalRestrictionContinuous => "rational",
        }
    }

    pub fn from_kind(kind: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.kind() == kind)
    }
}

impl fmt::Display for Claim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.kind())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn passed(self) -> bool {
        self == Verdict::Pass
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = "=")]
    Eq,
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = ">")]
    Gt,
}

impl Relation {
    pub fn holds(self, lhs: &Rational, rhs: &Rational) -> bool {
        match self {
            Relation::Lt => lhs < rhs,
            Relation::Le => lhs <= rhs,
            Relation::Eq => lhs == rhs,
            Relation::Ge => lhs >= rhs,
            Relation::Gt => lhs > rhs,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Lt => "<",
            Relation::Le => "<=",
            Relation::Eq => "=",
            Relation::Ge => ">=",
            Relation::Gt => ">",
        }
    }
}

/// One re-checkable statement inside a certificate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub clause: String,
    pub check: Check,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    /// `lhs relation rhs` over the rationals.
    Exact {
        lhs: Rational,
        relation: Relation,
        rhs: Rational,
    },
    /// `image_norm_sq relation bound_sq * norm_sq` for the vector with the
    /// given coordinates in `frame`; `j_value` is J of that vector.
    NormBound {
        frame: String,
        coordinates: BTreeMap<usize, Rational>,
        j_value: Rational,
        image_norm_sq: Rational,
        bound_sq: Rational,
        norm_sq: Rational,
        relation: Relation,
        kernel_component_zero: bool,
    },
    /// J of the vector with the given coordinates in `frame`, and the
    /// squared norm of that image in the range frame.
    JValue {
        frame: String,
        coordinates: BTreeMap<usize, Rational>,
        value: Rational,
        image_norm_sq: Rational,
    },
    /// `|left| <= left_abs_hi < right_abs_lo <= |right|` from interval
    /// enclosures at `precision_bits`.
    AbsLess {
        left: NamedVector,
        right: NamedVector,
        left_abs_hi: Rational,
        right_abs_lo: Rational,
        precision_bits: u32,
    },
}

impl Check {
    /// Whether the recorded numbers are consistent on their face. Semantic
    /// re-derivation is the verifier's job.
    pub fn holds(&self) -> bool {
        match self {
            Check::Exact { lhs, relation, rhs } => relation.holds(lhs, rhs),
            Check::NormBound {
                image_norm_sq,
                bound_sq,
                norm_sq,
                relation,
                ..
            } => relation.holds(image_norm_sq, &(bound_sq * norm_sq)),
            Check::JValue { .. } => true,
            Check::AbsLess {
                left_abs_hi,
                right_abs_lo,
                ..
            } => left_abs_hi < right_abs_lo,
        }
    }
}

/// Exact evidence for one continuity or boundedness claim about J.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProbeCertificate {
    pub claim: Claim,
    pub verdict: Verdict,
    pub parameters: BTreeMap<String, String>,
    /// Values of every symbol appearing in `frames` or in a witness.
    pub symbols: BTreeMap<String, ValueExpr>,
    /// Frame vectors by label, in frame order. A frame may be truncated to
    /// the prefix the witnesses use.
    pub frames: BTreeMap<String, Vec<NamedVector>>,
    pub witnesses: Vec<Witness>,
    pub conclusion: String,
}

impl ProbeCertificate {
    pub fn all_witnesses_hold(&self) -> bool {
        self.witnesses.iter().all(|w| w.check.holds())
    }
}
