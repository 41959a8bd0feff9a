//! Lagrangian decompositions of F*/F*^d for the Hilbert-symbol pairing and
//! the dual group of F*/F*^d.

use std::collections::HashSet;
use std::fmt;

use crate::characters::MultChar;
use crate::tame_field::{FStarClass, TameContext};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DecompositionKind {
    /// J = unit classes, K = powers of varpi.
    Standard,
    /// J = powers of varpi, K = unit classes.
    Swapped,
}

impl DecompositionKind {
    pub fn parse(s: &str) -> Option<DecompositionKind> {
        match s {
            "standard" => Some(DecompositionKind::Standard),
            "swapped" => Some(DecompositionKind::Swapped),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            DecompositionKind::Standard => "standard",
            DecompositionKind::Swapped => "swapped",
        }
    }
}

/// (J, K) with both subgroups listed by reduced representatives mod F*^d.
/// `kbar` is ordered and indexes the rows and columns of an Slcm.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LagrangianDecomposition {
    pub kind: Option<DecompositionKind>,
    pub d: u64,
    pub jbar: Vec<FStarClass>,
    pub kbar: Vec<FStarClass>,
}

/// Why a candidate pair fails to be a Lagrangian decomposition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LagrangianFailure {
    WrongSize { j: usize, k: usize, d: u64 },
    NotSubgroup(FStarClass, FStarClass),
    NotIsotropic(FStarClass, FStarClass),
    NotMaximal(FStarClass),
    NotDirect(FStarClass),
    NotDual(FStarClass),
}

impl fmt::Display for LagrangianFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LagrangianFailure::WrongSize { j, k, d } => write!(f, "#J = {}, #K = {}, expected {}", j, k, d),
            LagrangianFailure::NotSubgroup(x, y) => write!(f, "not closed: {:?} * {:?}", x, y),
            LagrangianFailure::NotIsotropic(x, y) => write!(f, "(x, y)_d != 1 for x = {:?}, y = {:?}", x, y),
            LagrangianFailure::NotMaximal(x) => write!(f, "{:?} is orthogonal to J but not in J", x),
            LagrangianFailure::NotDirect(x) => write!(f, "{:?} is not a product j k", x),
            LagrangianFailure::NotDual(x) => write!(f, "eta_k|J is trivial for k = {:?}", x),
        }
    }
}

impl LagrangianDecomposition {
    pub fn standard(ctx: &TameContext) -> LagrangianDecomposition {
        let d = ctx.d() as i64;
        LagrangianDecomposition {
            kind: Some(DecompositionKind::Standard),
            d: ctx.d(),
            jbar: (0..d).map(|j| ctx.class(0, j)).collect(),
            kbar: (0..d).map(|i| ctx.class(i, 0)).collect(),
        }
    }

    pub fn swapped(ctx: &TameContext) -> LagrangianDecomposition {
        let d = ctx.d() as i64;
        LagrangianDecomposition {
            kind: Some(DecompositionKind::Swapped),
            d: ctx.d(),
            jbar: (0..d).map(|i| ctx.class(i, 0)).collect(),
            kbar: (0..d).map(|j| ctx.class(0, j)).collect(),
        }
    }

    pub fn of_kind(ctx: &TameContext, kind: DecompositionKind) -> LagrangianDecomposition {
        match kind {
            DecompositionKind::Standard => Self::standard(ctx),
            DecompositionKind::Swapped => Self::swapped(ctx),
        }
    }

    /// Reduced representative of x mod F*^d.
    pub fn reduce(&self, ctx: &TameContext, x: FStarClass) -> FStarClass {
        ctx.reduce_class(x, self.d)
    }

    /// Index of the K-class of x, if x lies in K F*^d.
    pub fn k_index(&self, ctx: &TameContext, x: FStarClass) -> Option<usize> {
        let r = self.reduce(ctx, x);
        self.kbar.iter().position(|&k| k == r)
    }

    pub fn in_j(&self, ctx: &TameContext, x: FStarClass) -> bool {
        let r = self.reduce(ctx, x);
        self.jbar.contains(&r)
    }

    /// Whether x lies in J k.
    pub fn in_coset(&self, ctx: &TameContext, x: FStarClass, k: FStarClass) -> bool {
        self.in_j(ctx, ctx.cmul(x, ctx.cinv(k)))
    }
}

/// Checks isotropy, maximality, the direct product and the perfect pairing.
pub fn verify_lagrangian(ctx: &TameContext, l: &LagrangianDecomposition) -> Result<(), LagrangianFailure> {
    let d = l.d;
    if l.jbar.len() as u64 != d || l.kbar.len() as u64 != d {
        return Err(LagrangianFailure::WrongSize { j: l.jbar.len(), k: l.kbar.len(), d });
    }
    for sub in [&l.jbar, &l.kbar] {
        let set: HashSet<FStarClass> = sub.iter().map(|&x| l.reduce(ctx, x)).collect();
        for &x in sub.iter() {
            for &y in sub.iter() {
                if !set.contains(&l.reduce(ctx, ctx.cmul(x, y))) {
                    return Err(LagrangianFailure::NotSubgroup(x, y));
                }
                if ctx.hilbert_exponent(d, x, y) != 0 {
                    return Err(LagrangianFailure::NotIsotropic(x, y));
                }
            }
        }
    }
    let group = ctx.class_group(d).expect("d divides q - 1");
    for &x in &group {
        let orth = l.jbar.iter().all(|&j| ctx.hilbert_exponent(d, x, j) == 0);
        if orth && !l.in_j(ctx, x) {
            return Err(LagrangianFailure::NotMaximal(x));
        }
    }
    let mut products = HashSet::new();
    for &j in &l.jbar {
        for &k in &l.kbar {
            products.insert(l.reduce(ctx, ctx.cmul(j, k)));
        }
    }
    for &x in &group {
        if !products.contains(&x) {
            return Err(LagrangianFailure::NotDirect(x));
        }
    }
    for &k in &l.kbar {
        if k != ctx.one_class() && l.reduce(ctx, k) != ctx.one_class() {
            if l.jbar.iter().all(|&j| ctx.hilbert_exponent(d, k, j) == 0) {
                return Err(LagrangianFailure::NotDual(k));
            }
        }
    }
    Ok(())
}

/// All characters eta_x, x in F*/F*^d, in the order of `class_group(d)`.
pub fn dual_group(ctx: &TameContext) -> Vec<(FStarClass, MultChar)> {
    ctx.class_group(ctx.d()).expect("d divides q - 1").into_iter().map(|x| (x, ctx.eta(x))).collect()
}
