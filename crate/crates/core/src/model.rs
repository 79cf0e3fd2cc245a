//! Truncated Hilbert space of the cavity-fiber-cavity system.
//!
//! Atom 1 is a tripod (`g0`, `gL`, `gR`, `e0`), atom 2 is M-type (`g0`, `gL`,
//! `gR`, `eL`, `eR`). Six bosonic modes (two cavities and the fiber, each with
//! a left and right circular polarization) are truncated at one photon.
//!
//! Every coupling in the model moves a single basis state onto a single basis
//! state with unit amplitude, so operators are assembled from [`Transfer`]s
//! acting directly on labels instead of from products of truncated matrices.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Tolerance attached to the `hermitian` flag of an [`Operator`].
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Number of states listed in the Zeno-subspace derivation (`|phi_1>`..`|phi_12>`).
pub const ZENO_BLOCK: usize = 12;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Atom1Level {
    G0,
    GL,
    GR,
    E0,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Atom2Level {
    G0,
    GL,
    GR,
    EL,
    ER,
}

impl Atom1Level {
    pub const ALL: [Atom1Level; 4] = [Self::G0, Self::GL, Self::GR, Self::E0];

    pub fn is_excited(self) -> bool {
        self == Self::E0
    }

    pub fn label(self) -> &'static str {
        match self {
            Self::G0 => "g0",
            Self::GL => "gL",
            Self::GR => "gR",
            Self::E0 => "e0",
        }
    }
}

impl Atom2Level {
    pub const ALL: [Atom2Level; 5] = [Self::G0, Self::GL, Self::GR, Self::EL, Self::ER];

    pub fn is_excited(self) -> bool {
        matches!(self, Self::EL | Self::ER)
    }

    pub fn label(self) -> &'static str {
        match self {
            Self::G0 => "g0",
            Self::GL => "gL",
            Self::GR => "gR",
            Self::EL => "eL",
            Self::ER => "eR",
        }
    }
}

/// Level label shared by both atoms, used where the atom is chosen at runtime.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum Level {
    G0,
    GL,
    GR,
    E0,
    EL,
    ER,
}

impl TryFrom<Level> for Atom1Level {
    type Error = Error;

    fn try_from(l: Level) -> Result<Self> {
        match l {
            Level::G0 => Ok(Self::G0),
            Level::GL => Ok(Self::GL),
            Level::GR => Ok(Self::GR),
            Level::E0 => Ok(Self::E0),
            other => Err(Error::InvalidArgument(format!(
                "level {other:?} does not exist on the tripod atom"
            ))),
        }
    }
}

impl TryFrom<Level> for Atom2Level {
    type Error = Error;

    fn try_from(l: Level) -> Result<Self> {
        match l {
            Level::G0 => Ok(Self::G0),
            Level::GL => Ok(Self::GL),
            Level::GR => Ok(Self::GR),
            Level::EL => Ok(Self::EL),
            Level::ER => Ok(Self::ER),
            other => Err(Error::InvalidArgument(format!(
                "level {other:?} does not exist on the M-type atom"
            ))),
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum Atom {
    One,
    Two,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Location {
    Cavity1,
    Fiber,
    Cavity2,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Polarization {
    L,
    R,
}

impl Polarization {
    pub const BOTH: [Polarization; 2] = [Self::L, Self::R];

    pub fn atom1_ground(self) -> Atom1Level {
        match self {
            Self::L => Atom1Level::GL,
            Self::R => Atom1Level::GR,
        }
    }

    pub fn atom2_ground(self) -> Atom2Level {
        match self {
            Self::L => Atom2Level::GL,
            Self::R => Atom2Level::GR,
        }
    }

    pub fn atom2_excited(self) -> Atom2Level {
        match self {
            Self::L => Atom2Level::EL,
            Self::R => Atom2Level::ER,
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ModeId {
    pub location: Location,
    pub polarization: Polarization,
}

impl ModeId {
    pub const fn new(location: Location, polarization: Polarization) -> Self {
        Self { location, polarization }
    }

    /// All six modes in storage order: cavity 1, fiber, cavity 2; L before R.
    pub const ALL: [ModeId; 6] = [
        ModeId::new(Location::Cavity1, Polarization::L),
        ModeId::new(Location::Cavity1, Polarization::R),
        ModeId::new(Location::Fiber, Polarization::L),
        ModeId::new(Location::Fiber, Polarization::R),
        ModeId::new(Location::Cavity2, Polarization::L),
        ModeId::new(Location::Cavity2, Polarization::R),
    ];

    pub fn index(self) -> usize {
        let loc = match self.location {
            Location::Cavity1 => 0,
            Location::Fiber => 1,
            Location::Cavity2 => 2,
        };
        let pol = match self.polarization {
            Polarization::L => 0,
            Polarization::R => 1,
        };
        2 * loc + pol
    }

    pub fn from_index(i: usize) -> Result<Self> {
        Self::ALL
            .get(i)
            .copied()
            .ok_or_else(|| Error::InvalidArgument(format!("unknown mode index {i}")))
    }
}

impl fmt::Display for ModeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let loc = match self.location {
            Location::Cavity1 => "c1",
            Location::Fiber => "f",
            Location::Cavity2 => "c2",
        };
        let pol = match self.polarization {
            Polarization::L => "L",
            Polarization::R => "R",
        };
        write!(f, "{loc}{pol}")
    }
}

impl FromStr for ModeId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .iter()
            .copied()
            .find(|m| m.to_string() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown mode id {s:?}")))
    }
}

/// One product configuration: two atomic levels and six photon numbers.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasisState {
    pub atom1: Atom1Level,
    pub atom2: Atom2Level,
    pub occupations: [u8; 6],
}

impl BasisState {
    pub const fn vacuum(atom1: Atom1Level, atom2: Atom2Level) -> Self {
        Self { atom1, atom2, occupations: [0; 6] }
    }

    pub fn with_photon(atom1: Atom1Level, atom2: Atom2Level, mode: ModeId) -> Self {
        let mut s = Self::vacuum(atom1, atom2);
        s.occupations[mode.index()] = 1;
        s
    }

    pub fn occupation(&self, mode: ModeId) -> u8 {
        self.occupations[mode.index()]
    }

    pub fn photons(&self) -> u32 {
        self.occupations.iter().map(|&n| n as u32).sum()
    }

    /// Photons plus atomic excitations.
    pub fn excitation(&self) -> u32 {
        self.photons() + self.atom1.is_excited() as u32 + self.atom2.is_excited() as u32
    }
}

impl fmt::Display for BasisState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let field: Vec<String> = ModeId::ALL
            .iter()
            .filter(|m| self.occupation(**m) > 0)
            .map(|m| m.to_string())
            .collect();
        let field = if field.is_empty() { "vac".to_string() } else { field.join("+") };
        write!(f, "|{},{},{}>", self.atom1.label(), self.atom2.label(), field)
    }
}

/// The twelve states spanned by the unitary dynamics, in the derivation's order.
pub fn zeno_block_states() -> [BasisState; ZENO_BLOCK] {
    use Atom1Level as A1;
    use Atom2Level as A2;
    let c1 = |p| ModeId::new(Location::Cavity1, p);
    let fb = |p| ModeId::new(Location::Fiber, p);
    let c2 = |p| ModeId::new(Location::Cavity2, p);
    [
        BasisState::vacuum(A1::G0, A2::G0),
        BasisState::vacuum(A1::E0, A2::G0),
        BasisState::with_photon(A1::GL, A2::G0, c1(Polarization::L)),
        BasisState::with_photon(A1::GR, A2::G0, c1(Polarization::R)),
        BasisState::with_photon(A1::GL, A2::G0, fb(Polarization::L)),
        BasisState::with_photon(A1::GR, A2::G0, fb(Polarization::R)),
        BasisState::with_photon(A1::GL, A2::G0, c2(Polarization::L)),
        BasisState::with_photon(A1::GR, A2::G0, c2(Polarization::R)),
        BasisState::vacuum(A1::GL, A2::EL),
        BasisState::vacuum(A1::GR, A2::ER),
        BasisState::vacuum(A1::GL, A2::GL),
        BasisState::vacuum(A1::GR, A2::GR),
    ]
}

/// Elementary relabelling of a [`BasisState`].
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Step {
    Lower(ModeId),
    Raise(ModeId),
    Atom1 { from: Atom1Level, to: Atom1Level },
    Atom2 { from: Atom2Level, to: Atom2Level },
}

impl Step {
    fn apply(self, s: &mut BasisState) -> bool {
        match self {
            Step::Lower(m) => {
                let n = &mut s.occupations[m.index()];
                if *n == 0 {
                    return false;
                }
                *n -= 1;
            }
            Step::Raise(m) => {
                let n = &mut s.occupations[m.index()];
                if *n >= 1 {
                    return false;
                }
                *n += 1;
            }
            Step::Atom1 { from, to } => {
                if s.atom1 != from {
                    return false;
                }
                s.atom1 = to;
            }
            Step::Atom2 { from, to } => {
                if s.atom2 != from {
                    return false;
                }
                s.atom2 = to;
            }
        }
        true
    }

    fn inverse(self) -> Step {
        match self {
            Step::Lower(m) => Step::Raise(m),
            Step::Raise(m) => Step::Lower(m),
            Step::Atom1 { from, to } => Step::Atom1 { from: to, to: from },
            Step::Atom2 { from, to } => Step::Atom2 { from: to, to: from },
        }
    }
}

/// A product of elementary steps, applied in order. In the single-photon
/// truncation each transfer maps at most one state onto one state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transfer {
    steps: Vec<Step>,
}

impl Transfer {
    pub fn new(steps: Vec<Step>) -> Self {
        Self { steps }
    }

    pub fn apply(&self, s: &BasisState) -> Option<BasisState> {
        let mut out = *s;
        for step in &self.steps {
            if !step.apply(&mut out) {
                return None;
            }
        }
        Some(out)
    }

    /// The transfer whose matrix is the adjoint of this one.
    pub fn reversed(&self) -> Transfer {
        Transfer { steps: self.steps.iter().rev().map(|s| s.inverse()).collect() }
    }
}

/// Named couplings of the model, without amplitudes.
pub mod terms {
    use super::*;

    /// `|e0><g0|` on atom 1 (laser Omega_1).
    pub fn atom1_drive() -> Transfer {
        Transfer::new(vec![Step::Atom1 { from: Atom1Level::G0, to: Atom1Level::E0 }])
    }

    /// `|e_p><g_p|` on atom 2 (laser Omega_2).
    pub fn atom2_drive(p: Polarization) -> Transfer {
        Transfer::new(vec![Step::Atom2 { from: p.atom2_ground(), to: p.atom2_excited() }])
    }

    /// `a_{1,p} |e0><g_p|`.
    pub fn atom1_cavity(p: Polarization) -> Transfer {
        Transfer::new(vec![
            Step::Lower(ModeId::new(Location::Cavity1, p)),
            Step::Atom1 { from: p.atom1_ground(), to: Atom1Level::E0 },
        ])
    }

    /// `a_{2,p} |e_p><g0|`.
    pub fn atom2_cavity(p: Polarization) -> Transfer {
        Transfer::new(vec![
            Step::Lower(ModeId::new(Location::Cavity2, p)),
            Step::Atom2 { from: Atom2Level::G0, to: p.atom2_excited() },
        ])
    }

    /// `b_p a_{c,p}^dag` for cavity `c`.
    pub fn fiber_to_cavity(p: Polarization, cavity: Location) -> Transfer {
        Transfer::new(vec![
            Step::Lower(ModeId::new(Location::Fiber, p)),
            Step::Raise(ModeId::new(cavity, p)),
        ])
    }

    pub fn mode_leak(mode: ModeId) -> Transfer {
        Transfer::new(vec![Step::Lower(mode)])
    }

    /// `|g><e0|` on atom 1.
    pub fn atom1_decay(to: Atom1Level) -> Transfer {
        Transfer::new(vec![Step::Atom1 { from: Atom1Level::E0, to }])
    }

    /// `|g><e|` on atom 2.
    pub fn atom2_decay(from: Atom2Level, to: Atom2Level) -> Transfer {
        Transfer::new(vec![Step::Atom2 { from, to }])
    }

    /// Every Hamiltonian coupling, one direction each (the Hermitian
    /// conjugates are the reversed transfers).
    pub fn hamiltonian() -> Vec<Transfer> {
        let mut out = vec![atom1_drive()];
        for p in Polarization::BOTH {
            out.push(atom2_drive(p));
            out.push(atom1_cavity(p));
            out.push(atom2_cavity(p));
            out.push(fiber_to_cavity(p, Location::Cavity1));
            out.push(fiber_to_cavity(p, Location::Cavity2));
        }
        out
    }

    /// Jump transfers of all fifteen dissipative channels.
    pub fn jumps() -> Vec<Transfer> {
        let grounds1 = [Atom1Level::G0, Atom1Level::GL, Atom1Level::GR];
        let grounds2 = [Atom2Level::G0, Atom2Level::GL, Atom2Level::GR];
        let mut out: Vec<Transfer> = ModeId::ALL.iter().map(|&m| mode_leak(m)).collect();
        out.extend(grounds1.iter().map(|&g| atom1_decay(g)));
        for e in [Atom2Level::EL, Atom2Level::ER] {
            out.extend(grounds2.iter().map(|&g| atom2_decay(e, g)));
        }
        out
    }
}

/// Ordered list of basis states with reverse lookup.
#[derive(Clone, Debug)]
pub struct Basis {
    states: Vec<BasisState>,
    index: HashMap<BasisState, usize>,
    closed: bool,
}

impl Basis {
    /// Builds a basis from an explicit list. Such a basis is treated as a
    /// truncation: operator images falling outside it are dropped.
    pub fn from_states(states: Vec<BasisState>) -> Result<Self> {
        let mut index = HashMap::with_capacity(states.len());
        for (i, s) in states.iter().enumerate() {
            if index.insert(*s, i).is_some() {
                return Err(Error::InvalidArgument(format!("duplicate basis state {s}")));
            }
        }
        Ok(Self { states, index, closed: false })
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[BasisState] {
        &self.states
    }

    pub fn state(&self, i: usize) -> &BasisState {
        &self.states[i]
    }

    pub fn index_of(&self, s: &BasisState) -> Option<usize> {
        self.index.get(s).copied()
    }

    /// Whether every model coupling and jump maps the basis into itself.
    pub fn is_closed(&self) -> bool {
        self.closed
    }

    /// Index of `|phi_n>` for `n` in `1..=12`.
    pub fn phi(&self, n: usize) -> usize {
        assert!((1..=ZENO_BLOCK).contains(&n), "phi index {n} out of 1..=12");
        self.index_of(&zeno_block_states()[n - 1]).expect("basis lacks the Zeno block")
    }

    /// The twelve-state block reachable by the unitary dynamics alone.
    pub fn zeno_block() -> Basis {
        Basis::from_states(zeno_block_states().to_vec()).expect("zeno block states are distinct")
    }
}

/// Enumerates the closure of `|phi_1>` under all Hamiltonian couplings (both
/// directions) and all jump operators. The twelve Zeno-block states come first in
/// their canonical order; the rest follow in lexicographic order.
pub fn enumerate_basis() -> Basis {
    let mut generators = Vec::new();
    for t in terms::hamiltonian() {
        generators.push(t.reversed());
        generators.push(t);
    }
    generators.extend(terms::jumps());

    let start = zeno_block_states()[0];
    let mut seen = BTreeSet::from([start]);
    let mut queue = VecDeque::from([start]);
    while let Some(s) = queue.pop_front() {
        for g in &generators {
            if let Some(img) = g.apply(&s) {
                if seen.insert(img) {
                    queue.push_back(img);
                }
            }
        }
    }

    let head = zeno_block_states();
    for s in &head {
        assert!(seen.contains(s), "closure misses {s}");
    }
    let mut states = head.to_vec();
    states.extend(seen.into_iter().filter(|s| !head.contains(s)));
    let mut basis = Basis::from_states(states).expect("closure has no duplicates");
    basis.closed = true;
    basis
}

/// Reachable set of `|phi_1>` found a second way: build the coupling and jump
/// matrices on the explicit space of all states with at most one excitation,
/// then walk their nonzero pattern.
pub fn closure_oracle() -> BTreeSet<BasisState> {
    let mut space = Vec::new();
    for a1 in Atom1Level::ALL {
        for a2 in Atom2Level::ALL {
            let atomic = a1.is_excited() as u32 + a2.is_excited() as u32;
            if atomic > 1 {
                continue;
            }
            space.push(BasisState::vacuum(a1, a2));
            if atomic == 0 {
                space.extend(ModeId::ALL.iter().map(|&m| BasisState::with_photon(a1, a2, m)));
            }
        }
    }
    let explicit = Basis::from_states(space).expect("product states are distinct");
    let one = C64::from(1.0);
    let mut pattern = DMatrix::<f64>::zeros(explicit.len(), explicit.len());
    let h = terms::hamiltonian();
    let jumps = terms::jumps();
    let ops = h.iter().map(|t| Operator::from_transfers(&explicit, [(one, t)]).plus_adjoint()).chain(
        jumps.iter().map(|t| Operator::from_transfers(&explicit, [(one, t)])),
    );
    for op in ops {
        pattern += op.matrix().map(|z| z.norm());
    }

    let start = explicit.index_of(&zeno_block_states()[0]).expect("ground state is in the explicit space");
    let mut reached = vec![false; explicit.len()];
    reached[start] = true;
    let mut stack = vec![start];
    while let Some(col) = stack.pop() {
        for row in 0..explicit.len() {
            if pattern[(row, col)] > 0.0 && !reached[row] {
                reached[row] = true;
                stack.push(row);
            }
        }
    }
    explicit.states().iter().zip(reached).filter(|(_, r)| *r).map(|(s, _)| *s).collect()
}

/// Dense complex square matrix with a Hermiticity flag.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    matrix: DMatrix<C64>,
    hermitian: bool,
}

impl Operator {
    pub fn new(matrix: DMatrix<C64>) -> Result<Self> {
        if !matrix.is_square() || matrix.nrows() == 0 {
            return Err(Error::InvalidArgument(format!(
                "operator must be square and non-empty, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        Ok(Self { matrix, hermitian: false })
    }

    /// Wraps a matrix and sets the Hermitian flag after checking it.
    pub fn hermitian(matrix: DMatrix<C64>) -> Result<Self> {
        let mut op = Self::new(matrix)?;
        let residual = op.hermiticity_residual();
        if residual > HERMITIAN_TOL {
            return Err(Error::InvalidArgument(format!(
                "matrix is not Hermitian: max |A - A^dag| = {residual:e}"
            )));
        }
        op.hermitian = true;
        Ok(op)
    }

    pub fn zeros(dim: usize) -> Self {
        Self { matrix: DMatrix::zeros(dim, dim), hermitian: true }
    }

    /// Sum of `amplitude * |T(s)><s|` over the basis for each transfer `T`.
    ///
    /// Panics if an image leaves a closed basis; on an explicit (non-closed)
    /// basis such images are dropped.
    pub fn from_transfers<'a, I>(basis: &Basis, transfers: I) -> Self
    where
        I: IntoIterator<Item = (C64, &'a Transfer)>,
    {
        Self::assemble(basis, transfers, basis.is_closed())
    }

    /// Like [`Operator::from_transfers`] but always drops images outside the
    /// basis, i.e. the compression `P T P` onto its span.
    pub fn projected_transfers<'a, I>(basis: &Basis, transfers: I) -> Self
    where
        I: IntoIterator<Item = (C64, &'a Transfer)>,
    {
        Self::assemble(basis, transfers, false)
    }

    fn assemble<'a, I>(basis: &Basis, transfers: I, strict: bool) -> Self
    where
        I: IntoIterator<Item = (C64, &'a Transfer)>,
    {
        let n = basis.len();
        let mut m = DMatrix::zeros(n, n);
        for (amp, t) in transfers {
            for (col, s) in basis.states().iter().enumerate() {
                if let Some(img) = t.apply(s) {
                    match basis.index_of(&img) {
                        Some(row) => m[(row, col)] += amp,
                        None => assert!(!strict, "image {img} of {s} escapes a closed basis"),
                    }
                }
            }
        }
        Self { matrix: m, hermitian: false }
    }

    /// `A + A^dag`, flagged Hermitian.
    pub fn plus_adjoint(&self) -> Self {
        let matrix = &self.matrix + self.matrix.adjoint();
        Self { matrix, hermitian: true }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.matrix
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn entry(&self, row: usize, col: usize) -> C64 {
        self.matrix[(row, col)]
    }

    /// `max |A - A^dag|` over entries.
    pub fn hermiticity_residual(&self) -> f64 {
        (&self.matrix - self.matrix.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn adjoint(&self) -> Self {
        Self { matrix: self.matrix.adjoint(), hermitian: self.hermitian }
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self { matrix: &self.matrix * C64::from(s), hermitian: self.hermitian }
    }

    /// Sum of two operators; the flag survives only if both are Hermitian.
    pub fn add(&self, other: &Operator) -> Result<Self> {
        check_dim(self.dim(), other.dim())?;
        Ok(Self { matrix: &self.matrix + &other.matrix, hermitian: self.hermitian && other.hermitian })
    }

    pub fn mul(&self, other: &Operator) -> Result<Self> {
        check_dim(self.dim(), other.dim())?;
        Ok(Self { matrix: &self.matrix * &other.matrix, hermitian: false })
    }

    pub fn commutator(&self, other: &Operator) -> Result<Self> {
        check_dim(self.dim(), other.dim())?;
        let m = &self.matrix * &other.matrix - &other.matrix * &self.matrix;
        Ok(Self { matrix: m, hermitian: false })
    }

    pub fn apply(&self, psi: &StateVector) -> Result<StateVector> {
        check_dim(self.dim(), psi.dim())?;
        Ok(StateVector { amplitudes: &self.matrix * &psi.amplitudes })
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.matrix.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Eigenvalues (ascending) of a Hermitian operator.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        if !self.hermitian {
            return Err(Error::Precondition("eigenvalues requested for a non-Hermitian operator".into()));
        }
        let mut ev: Vec<f64> = self.matrix.clone().symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        Ok(ev)
    }
}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

/// `|upper><lower|` acting on one atom, compressed onto the span of `basis`.
pub fn atomic_sigma(atom: Atom, upper: Level, lower: Level, basis: &Basis) -> Result<Operator> {
    let step = match atom {
        Atom::One => Step::Atom1 { from: lower.try_into()?, to: upper.try_into()? },
        Atom::Two => Step::Atom2 { from: lower.try_into()?, to: upper.try_into()? },
    };
    let t = Transfer::new(vec![step]);
    Ok(Operator::projected_transfers(basis, [(C64::from(1.0), &t)]))
}

/// Single-photon annihilation operator of `mode`.
pub fn annihilation(mode: ModeId, basis: &Basis) -> Operator {
    let t = terms::mode_leak(mode);
    Operator::from_transfers(basis, [(C64::from(1.0), &t)])
}

/// Pure state over a basis.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    amplitudes: DVector<C64>,
}

impl StateVector {
    pub fn new(amplitudes: DVector<C64>) -> Self {
        Self { amplitudes }
    }

    pub fn from_slice(amps: &[C64]) -> Self {
        Self { amplitudes: DVector::from_column_slice(amps) }
    }

    pub fn basis_vector(dim: usize, index: usize) -> Self {
        let mut a = DVector::zeros(dim);
        a[index] = C64::from(1.0);
        Self { amplitudes: a }
    }

    pub fn basis_state(basis: &Basis, s: &BasisState) -> Result<Self> {
        let i = basis
            .index_of(s)
            .ok_or_else(|| Error::InvalidArgument(format!("{s} is not in the basis")))?;
        Ok(Self::basis_vector(basis.len(), i))
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    pub fn amplitude(&self, i: usize) -> C64 {
        self.amplitudes[i]
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    /// `|‖psi‖ - 1|`.
    pub fn norm_drift(&self) -> f64 {
        (self.norm() - 1.0).abs()
    }

    pub fn normalized(&self) -> Self {
        Self { amplitudes: &self.amplitudes / C64::from(self.norm()) }
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        check_dim(self.dim(), other.dim())?;
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }

    pub fn population(&self, i: usize) -> f64 {
        self.amplitudes[i].norm_sqr()
    }
}

/// Density matrix over a basis.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    matrix: DMatrix<C64>,
}

impl DensityMatrix {
    pub fn new(matrix: DMatrix<C64>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::InvalidArgument("density matrix must be square".into()));
        }
        Ok(Self { matrix })
    }

    pub fn from_pure(psi: &StateVector) -> Self {
        let a = psi.amplitudes();
        Self { matrix: a * a.adjoint() }
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self { matrix: DMatrix::identity(dim, dim) * C64::from(1.0 / dim as f64) }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    pub fn population(&self, i: usize) -> f64 {
        self.matrix[(i, i)].re
    }

    pub fn hermiticity_residual(&self) -> f64 {
        (&self.matrix - self.matrix.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Smallest eigenvalue of the Hermitian part.
    pub fn min_eigenvalue(&self) -> f64 {
        let h = (&self.matrix + self.matrix.adjoint()) * C64::from(0.5);
        h.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
    }
}
