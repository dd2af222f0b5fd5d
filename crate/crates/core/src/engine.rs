use crate::error::Result;
use crate::rootdata::RootDatum;

/// Default bound on the height of weight spaces the engine will build.
pub const DEFAULT_HEIGHT_CAP: usize = 10;

/// Computation context: a root datum together with the per-weight caches of every module.
pub struct Engine {
    rd: RootDatum,
    height_cap: usize,
    pub(crate) uq: crate::uqminus::UqCache,
    pub(crate) pbw: crate::pbw::PbwCache,
    pub(crate) dcb: crate::canonical::CanonicalCache,
    pub(crate) hw: crate::highest_weight::ModuleCache,
    pub(crate) cells: crate::cells::CellCache,
}

impl Engine {
    pub fn new(rd: RootDatum) -> Self {
        Engine { rd, height_cap: DEFAULT_HEIGHT_CAP, uq: Default::default(), pbw: Default::default(), dcb: Default::default(), hw: Default::default(), cells: Default::default() }
    }

    /// Builds an engine for one of the shorthands `A1`, `A2`, `A3`, `B2`, `G2`.
    pub fn from_type(name: &str) -> Result<Self> {
        Ok(Self::new(RootDatum::from_type(name)?))
    }

    pub fn with_height_cap(mut self, cap: usize) -> Self {
        self.height_cap = cap;
        self
    }

    pub fn root_datum(&self) -> &RootDatum {
        &self.rd
    }

    pub fn rank(&self) -> usize {
        self.rd.rank()
    }

    pub fn height_cap(&self) -> usize {
        self.height_cap
    }
}
