//! Atom signatures and instances.
//!
//! An *atom* is a named information source (a sensor, a rule, a goal). A
//! [`Signature`] fixes the finite set of atoms for a problem and assigns each
//! a stable position. An [`Instance`] is a nonempty subset of the signature's
//! atoms, stored as a bit vector over those positions; instances are the unit
//! of quantification and the thing modal operators are indexed by.

use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SignatureError {
    #[error("unknown atom `{0}`")]
    UnknownAtom(String),
    #[error("an instance must contain at least one atom")]
    EmptyInstance,
    #[error("duplicate atom `{0}`")]
    DuplicateAtom(String),
    #[error("a signature must declare at least one atom")]
    EmptySignature,
    #[error("at most 64 atoms are supported, got {0}")]
    TooManyAtoms(usize),
    #[error("`{0}` is not a valid atom name")]
    InvalidAtomName(String),
}

/// The ordered set of atoms of a problem. Atom order is fixed at creation;
/// instance bit order, printing, and iteration all follow it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Signature {
    atoms: Vec<String>,
    index: HashMap<String, usize>,
}

fn valid_atom_name(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() => {}
        _ => return false,
    }
    name != "x" && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl Signature {
    pub fn new<I, S>(atoms: I) -> Result<Self, SignatureError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let atoms: Vec<String> = atoms.into_iter().map(Into::into).collect();
        if atoms.is_empty() {
            return Err(SignatureError::EmptySignature);
        }
        if atoms.len() > 64 {
            return Err(SignatureError::TooManyAtoms(atoms.len()));
        }
        let mut index = HashMap::with_capacity(atoms.len());
        for (i, name) in atoms.iter().enumerate() {
            if !valid_atom_name(name) {
                return Err(SignatureError::InvalidAtomName(name.clone()));
            }
            if index.insert(name.clone(), i).is_some() {
                return Err(SignatureError::DuplicateAtom(name.clone()));
            }
        }
        Ok(Signature { atoms, index })
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn atoms(&self) -> impl Iterator<Item = &str> {
        self.atoms.iter().map(String::as_str)
    }

    pub fn atom_name(&self, position: usize) -> &str {
        &self.atoms[position]
    }

    pub fn atom_index(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    /// Builds the instance containing exactly the named atoms. Duplicates
    /// collapse; an empty list is rejected, as instances are nonempty.
    pub fn instance<I, S>(&self, names: I) -> Result<Instance, SignatureError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut bits = 0u64;
        for name in names {
            let name = name.as_ref();
            match self.atom_index(name) {
                Some(i) => bits |= 1 << i,
                None => return Err(SignatureError::UnknownAtom(name.to_string())),
            }
        }
        if bits == 0 {
            return Err(SignatureError::EmptyInstance);
        }
        Ok(Instance { bits, width: self.atoms.len() as u8 })
    }

    pub fn singleton(&self, name: &str) -> Result<Instance, SignatureError> {
        self.instance([name])
    }

    /// The instance containing every atom of the signature.
    pub fn full_instance(&self) -> Instance {
        let width = self.atoms.len() as u8;
        Instance { bits: mask(width), width }
    }

    pub(crate) fn instance_from_bits(&self, bits: u64) -> Instance {
        debug_assert!(bits != 0 && bits & !mask(self.atoms.len() as u8) == 0);
        Instance { bits, width: self.atoms.len() as u8 }
    }

    /// Renders an instance as `a,b,c` in atom order.
    pub fn instance_names(&self, instance: Instance) -> Vec<String> {
        instance.atom_indices().map(|i| self.atoms[i].clone()).collect()
    }

    pub fn format_instance(&self, instance: Instance) -> String {
        self.instance_names(instance).join(",")
    }
}

fn mask(width: u8) -> u64 {
    if width >= 64 {
        u64::MAX
    } else {
        (1u64 << width) - 1
    }
}

/// A nonempty subset of a signature's atoms, as a fixed-width bit vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Instance {
    bits: u64,
    width: u8,
}

impl Instance {
    pub(crate) fn bits(self) -> u64 {
        self.bits
    }

    pub fn width(self) -> usize {
        self.width as usize
    }

    pub fn atom_count(self) -> u32 {
        self.bits.count_ones()
    }

    pub fn contains_atom(self, position: usize) -> bool {
        position < self.width as usize && self.bits & (1 << position) != 0
    }

    /// Positions of the member atoms, ascending.
    pub fn atom_indices(self) -> impl Iterator<Item = usize> {
        let bits = self.bits;
        (0..self.width as usize).filter(move |i| bits & (1 << i) != 0)
    }

    /// Bitwise union; commutative, associative, idempotent.
    pub fn union(self, other: Instance) -> Instance {
        assert_eq!(self.width, other.width, "instances from different signatures");
        Instance { bits: self.bits | other.bits, width: self.width }
    }

    /// True iff every atom of `self` is an atom of `other`.
    pub fn is_subinstance_of(self, other: Instance) -> bool {
        assert_eq!(self.width, other.width, "instances from different signatures");
        self.bits & !other.bits == 0
    }

    /// Removes one atom; `None` if that would leave the instance empty.
    pub fn without_atom(self, position: usize) -> Option<Instance> {
        let bits = self.bits & !(1u64 << position);
        (bits != 0).then_some(Instance { bits, width: self.width })
    }

    /// All nonempty instances `r` with `lower ⊆ r ⊆ upper`, in ascending
    /// bit order. Incompatible bounds give an empty range.
    pub fn range(lower: Option<Instance>, upper: Instance) -> InstanceRange {
        let base = lower.map_or(0, |l| {
            assert_eq!(l.width, upper.width, "instances from different signatures");
            l.bits
        });
        if base & !upper.bits != 0 {
            return InstanceRange { base: 0, diff: 0, width: upper.width, sub: 0, done: true };
        }
        InstanceRange {
            base,
            diff: upper.bits & !base,
            width: upper.width,
            sub: 0,
            done: false,
        }
    }

    /// Number of instances yielded by [`Instance::range`].
    pub fn range_count(lower: Option<Instance>, upper: Instance) -> u64 {
        let base = lower.map_or(0, |l| l.bits);
        if base & !upper.bits != 0 {
            return 0;
        }
        let diff = (upper.bits & !base).count_ones();
        let total = 1u64 << diff;
        if base == 0 {
            total - 1 // skip the empty set
        } else {
            total
        }
    }
}

/// Iterator over the instances between two bounds; see [`Instance::range`].
pub struct InstanceRange {
    base: u64,
    diff: u64,
    width: u8,
    sub: u64,
    done: bool,
}

impl Iterator for InstanceRange {
    type Item = Instance;

    fn next(&mut self) -> Option<Instance> {
        while !self.done {
            let bits = self.base | self.sub;
            // Next submask of `diff` in ascending order.
            self.sub = self.sub.wrapping_sub(self.diff) & self.diff;
            if self.sub == 0 {
                self.done = true;
            }
            if bits != 0 {
                return Some(Instance { bits, width: self.width });
            }
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lane_signature() -> Signature {
        Signature::new(["o1", "o2", "r1", "r2", "r3", "r4", "g1", "g2"]).unwrap()
    }

    #[test]
    fn instance_of_named_atoms() {
        let sig = lane_signature();
        let s = sig.instance(["o1", "o2"]).unwrap();
        assert_eq!(sig.instance_names(s), ["o1", "o2"]);
        assert_eq!(s.atom_count(), 2);
    }

    #[test]
    fn duplicates_collapse() {
        let sig = lane_signature();
        let s = sig.instance(["o1", "o1"]).unwrap();
        assert_eq!(s.atom_count(), 1);
        assert_eq!(s, sig.singleton("o1").unwrap());
    }

    #[test]
    fn empty_instance_rejected() {
        let sig = lane_signature();
        let err = sig.instance(Vec::<&str>::new()).unwrap_err();
        assert_eq!(err, SignatureError::EmptyInstance);
    }

    #[test]
    fn unknown_atom_rejected() {
        let sig = lane_signature();
        assert_eq!(
            sig.instance(["o1", "o9"]).unwrap_err(),
            SignatureError::UnknownAtom("o9".into())
        );
    }

    #[test]
    fn union_combines_contributions() {
        let sig = lane_signature();
        let r3 = sig.singleton("r3").unwrap();
        let g1 = sig.singleton("g1").unwrap();
        assert_eq!(r3.union(g1), sig.instance(["r3", "g1"]).unwrap());

        let a = sig.instance(["o1", "r1"]).unwrap();
        let b = sig.instance(["r3", "g1"]).unwrap();
        assert_eq!(a.union(b), sig.instance(["o1", "r1", "r3", "g1"]).unwrap());

        let s = sig.instance(["o1", "r2"]).unwrap();
        assert_eq!(s.union(s), s);
    }

    #[test]
    fn subinstance_checks() {
        let sig = lane_signature();
        let r1 = sig.singleton("r1").unwrap();
        let r12 = sig.instance(["r1", "r2"]).unwrap();
        let r1o1 = sig.instance(["r1", "o1"]).unwrap();
        assert!(r1.is_subinstance_of(r12));
        assert!(!r1o1.is_subinstance_of(r12));
        assert!(r12.is_subinstance_of(r12));
    }

    #[test]
    fn signature_validation() {
        assert_eq!(
            Signature::new(["a", "a"]).unwrap_err(),
            SignatureError::DuplicateAtom("a".into())
        );
        assert_eq!(Signature::new(Vec::<&str>::new()).unwrap_err(), SignatureError::EmptySignature);
        assert_eq!(
            Signature::new(["x"]).unwrap_err(),
            SignatureError::InvalidAtomName("x".into())
        );
        assert_eq!(
            Signature::new(["1a"]).unwrap_err(),
            SignatureError::InvalidAtomName("1a".into())
        );
    }

    #[test]
    fn range_enumerates_between_bounds_ascending() {
        let sig = Signature::new(["a", "b", "c"]).unwrap();
        let upper = sig.instance(["a", "c"]).unwrap();
        let all: Vec<_> = Instance::range(None, upper).map(|i| sig.format_instance(i)).collect();
        assert_eq!(all, ["a", "c", "a,c"]);

        let lower = sig.singleton("c").unwrap();
        let bounded: Vec<_> =
            Instance::range(Some(lower), upper).map(|i| sig.format_instance(i)).collect();
        assert_eq!(bounded, ["c", "a,c"]);

        // Incompatible bounds make the range empty.
        let lower = sig.singleton("b").unwrap();
        assert_eq!(Instance::range(Some(lower), upper).count(), 0);
        assert_eq!(Instance::range_count(Some(lower), upper), 0);
    }

    #[test]
    fn range_count_matches_enumeration() {
        let sig = lane_signature();
        let full = sig.full_instance();
        assert_eq!(Instance::range_count(None, full), 255);
        assert_eq!(Instance::range(None, full).count(), 255);
        let lower = sig.instance(["r1", "r2", "r3", "r4", "o1", "o2"]).unwrap();
        assert_eq!(
            Instance::range_count(Some(lower), full) as usize,
            Instance::range(Some(lower), full).count()
        );
    }
}
