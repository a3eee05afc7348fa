//! Finite product spaces and exact probability measures on them.
//!
//! Every σ-algebra here is the power set of a finite atom set, so a measure is
//! just a weight per atom and "almost surely" means "at every atom of
//! positive weight". Weight maps are sparse: atoms that are absent weigh 0.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::rationals::Rational;

/// An atom of a [`ProductLayout`]: one label index per factor, in factor order.
pub type Atom = Vec<usize>;

/// A named finite coordinate space with an ordered list of distinct labels.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FiniteSpace {
    name: String,
    atoms: Vec<String>,
}

impl FiniteSpace {
    pub fn new<S: Into<String>>(name: impl Into<String>, atoms: impl IntoIterator<Item = S>) -> Result<Self> {
        let name = name.into();
        let atoms: Vec<String> = atoms.into_iter().map(Into::into).collect();
        if name.is_empty() {
            return Err(Error::layout("space name must be nonempty"));
        }
        if atoms.is_empty() {
            return Err(Error::layout(format!("space {name:?} has no atoms")));
        }
        let mut seen = HashSet::new();
        for a in &atoms {
            if !seen.insert(a.as_str()) {
                return Err(Error::layout(format!("space {name:?} repeats atom {a:?}")));
            }
        }
        Ok(FiniteSpace { name, atoms })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn atoms(&self) -> &[String] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.atoms.iter().position(|a| a == label)
    }

    pub fn label(&self, index: usize) -> &str {
        &self.atoms[index]
    }

    /// Same labels under a different name.
    pub fn renamed(&self, name: impl Into<String>) -> Result<Self> {
        FiniteSpace::new(name, self.atoms.clone())
    }
}

/// An ordered product of finite spaces with distinct names.
///
/// Atoms are ordered lexicographically by factor, first factor most
/// significant. This is the canonical order used for iteration, witnesses
/// and serialization.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ProductLayout {
    factors: Vec<FiniteSpace>,
}

impl ProductLayout {
    pub fn new(factors: Vec<FiniteSpace>) -> Result<Self> {
        let mut seen = HashSet::new();
        for f in &factors {
            if !seen.insert(f.name()) {
                return Err(Error::layout(format!("factor name {:?} used twice", f.name())));
            }
        }
        Ok(ProductLayout { factors })
    }

    pub fn factors(&self) -> &[FiniteSpace] {
        &self.factors
    }

    pub fn names(&self) -> Vec<&str> {
        self.factors.iter().map(|f| f.name()).collect()
    }

    pub fn factor(&self, name: &str) -> Option<&FiniteSpace> {
        self.factors.iter().find(|f| f.name() == name)
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.factors.iter().position(|f| f.name() == name)
    }

    /// Positions of `names`, in the order given. Unknown or repeated names are errors.
    pub fn positions(&self, names: &[&str]) -> Result<Vec<usize>> {
        let mut seen = HashSet::new();
        names
            .iter()
            .map(|n| {
                if !seen.insert(*n) {
                    return Err(Error::layout(format!("coordinate {n:?} named twice")));
                }
                self.position(n)
                    .ok_or_else(|| Error::layout(format!("unknown coordinate {n:?} (have {:?})", self.names())))
            })
            .collect()
    }

    pub fn sub_layout(&self, positions: &[usize]) -> ProductLayout {
        ProductLayout { factors: positions.iter().map(|&i| self.factors[i].clone()).collect() }
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    /// Number of atoms, or `None` on overflow.
    pub fn atom_count(&self) -> Option<usize> {
        self.factors.iter().try_fold(1usize, |acc, f| acc.checked_mul(f.len()))
    }

    /// All atoms in canonical order.
    pub fn atoms(&self) -> AtomIter {
        AtomIter {
            radices: self.factors.iter().map(FiniteSpace::len).collect(),
            next: Some(vec![0; self.factors.len()]),
        }
    }

    pub fn contains(&self, atom: &[usize]) -> bool {
        atom.len() == self.factors.len() && atom.iter().zip(&self.factors).all(|(&i, f)| i < f.len())
    }

    /// Atom from labels given in factor order.
    pub fn atom_from_labels(&self, labels: &[&str]) -> Result<Atom> {
        if labels.len() != self.factors.len() {
            return Err(Error::layout(format!(
                "atom has {} labels, layout has {} factors",
                labels.len(),
                self.factors.len()
            )));
        }
        labels
            .iter()
            .zip(&self.factors)
            .map(|(l, f)| f.index_of(l).ok_or_else(|| Error::layout(format!("{l:?} is not an atom of {:?}", f.name()))))
            .collect()
    }

    pub fn labels<'a>(&'a self, atom: &[usize]) -> Vec<&'a str> {
        atom.iter().zip(&self.factors).map(|(&i, f)| f.label(i)).collect()
    }

    /// `(factor name, label)` pairs for an atom.
    pub fn labeled(&self, atom: &[usize]) -> Vec<(String, String)> {
        atom.iter().zip(&self.factors).map(|(&i, f)| (f.name().to_string(), f.label(i).to_string())).collect()
    }

    pub fn describe(&self, atom: &[usize]) -> String {
        let parts: Vec<String> = self.labeled(atom).into_iter().map(|(n, l)| format!("{n}={l}")).collect();
        format!("({})", parts.join(", "))
    }

    /// For each factor of `other`, its position in `self`; errors unless both
    /// layouts have the same factors up to order.
    fn alignment_of(&self, other: &ProductLayout) -> Result<Vec<usize>> {
        if self.len() != other.len() {
            return Err(Error::layout(format!("layouts differ: {:?} vs {:?}", self.names(), other.names())));
        }
        other
            .factors
            .iter()
            .map(|f| match self.position(f.name()) {
                Some(i) if &self.factors[i] == f => Ok(i),
                Some(_) => Err(Error::layout(format!("factor {:?} has different atoms", f.name()))),
                None => Err(Error::layout(format!("layouts differ: {:?} vs {:?}", self.names(), other.names()))),
            })
            .collect()
    }
}

impl fmt::Display for ProductLayout {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.names().join("×"))
    }
}

/// Mixed-radix enumeration of a layout's atoms.
pub struct AtomIter {
    radices: Vec<usize>,
    next: Option<Atom>,
}

impl Iterator for AtomIter {
    type Item = Atom;

    fn next(&mut self) -> Option<Atom> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        let mut carried = true;
        for i in (0..succ.len()).rev() {
            succ[i] += 1;
            if succ[i] < self.radices[i] {
                carried = false;
                break;
            }
            succ[i] = 0;
        }
        if !carried {
            self.next = Some(succ);
        }
        Some(current)
    }
}

pub(crate) fn project(atom: &[usize], positions: &[usize]) -> Atom {
    positions.iter().map(|&i| atom[i]).collect()
}

/// A set of atoms of some product layout.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Event {
    layout: ProductLayout,
    atoms: BTreeSet<Atom>,
}

impl Event {
    pub fn new(layout: ProductLayout, atoms: impl IntoIterator<Item = Atom>) -> Result<Self> {
        let atoms: BTreeSet<Atom> = atoms.into_iter().collect();
        if let Some(bad) = atoms.iter().find(|a| !layout.contains(a)) {
            return Err(Error::layout(format!("{bad:?} is not an atom of {layout}")));
        }
        Ok(Event { layout, atoms })
    }

    pub fn singleton(layout: ProductLayout, atom: Atom) -> Result<Self> {
        Event::new(layout, [atom])
    }

    /// Event on the named sub-coordinates of `parent`, listed by labels.
    pub fn from_labels(parent: &ProductLayout, coords: &[&str], members: &[&[&str]]) -> Result<Self> {
        let layout = parent.sub_layout(&parent.positions(coords)?);
        let atoms = members.iter().map(|labels| layout.atom_from_labels(labels)).collect::<Result<Vec<_>>>()?;
        Event::new(layout, atoms)
    }

    pub fn layout(&self) -> &ProductLayout {
        &self.layout
    }

    pub fn atoms(&self) -> &BTreeSet<Atom> {
        &self.atoms
    }

    pub fn contains(&self, atom: &[usize]) -> bool {
        self.atoms.contains(atom)
    }

    /// Positions of this event's factors inside `parent`, checking the spaces match.
    fn positions_in(&self, parent: &ProductLayout) -> Result<Vec<usize>> {
        self.layout
            .factors()
            .iter()
            .map(|f| match parent.position(f.name()) {
                Some(i) if &parent.factors()[i] == f => Ok(i),
                Some(_) => Err(Error::layout(format!("factor {:?} has different atoms", f.name()))),
                None => Err(Error::layout(format!("unknown coordinate {:?}", f.name()))),
            })
            .collect()
    }
}

/// An exact probability measure on a [`ProductLayout`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteMeasure {
    layout: ProductLayout,
    weights: BTreeMap<Atom, Rational>,
}

impl FiniteMeasure {
    /// Builds a measure from `(atom, weight)` pairs. Repeated atoms
    /// accumulate; zero weights are dropped. Weights must be nonnegative and
    /// sum to exactly 1.
    pub fn from_weights(layout: ProductLayout, weights: impl IntoIterator<Item = (Atom, Rational)>) -> Result<Self> {
        let mut map: BTreeMap<Atom, Rational> = BTreeMap::new();
        for (atom, w) in weights {
            if !layout.contains(&atom) {
                return Err(Error::layout(format!("{atom:?} is not an atom of {layout}")));
            }
            if w.is_negative() {
                return Err(Error::InvalidMeasure(format!("negative weight {w} at {}", layout.describe(&atom))));
            }
            *map.entry(atom).or_insert_with(Rational::zero) += w;
        }
        map.retain(|_, w| !w.is_zero());
        let total: Rational = map.values().sum();
        if !total.is_one() {
            return Err(Error::InvalidMeasure(format!("weights sum to {total}, not 1")));
        }
        Ok(FiniteMeasure { layout, weights: map })
    }

    /// Builds a measure from label tuples in factor order.
    pub fn from_labeled<'a>(
        layout: ProductLayout,
        weights: impl IntoIterator<Item = (&'a [&'a str], Rational)>,
    ) -> Result<Self> {
        let pairs = weights
            .into_iter()
            .map(|(labels, w)| Ok((layout.atom_from_labels(labels)?, w)))
            .collect::<Result<Vec<_>>>()?;
        FiniteMeasure::from_weights(layout, pairs)
    }

    // Internal constructor for maps already known to be valid.
    pub(crate) fn from_parts_unchecked(layout: ProductLayout, weights: BTreeMap<Atom, Rational>) -> Self {
        debug_assert!(weights.values().all(Rational::is_positive));
        debug_assert!(weights.values().sum::<Rational>().is_one());
        FiniteMeasure { layout, weights }
    }

    pub fn point_mass(layout: ProductLayout, atom: Atom) -> Result<Self> {
        FiniteMeasure::from_weights(layout, [(atom, Rational::one())])
    }

    pub fn uniform(layout: ProductLayout) -> Result<Self> {
        let n = layout.atom_count().ok_or_else(|| Error::Resource(format!("layout {layout} is too large")))?;
        let w = Rational::new(1, n as u64)?;
        let atoms: Vec<Atom> = layout.atoms().collect();
        FiniteMeasure::from_weights(layout, atoms.into_iter().map(|a| (a, w.clone())))
    }

    /// Convex combination `Σ cᵢ mᵢ` of measures on one layout.
    pub fn mixture(components: &[(Rational, &FiniteMeasure)]) -> Result<Self> {
        let (_, first) = components.first().ok_or_else(|| Error::InvalidMeasure("empty mixture".into()))?;
        let layout = first.layout.clone();
        let mut pairs = Vec::new();
        for (c, m) in components {
            let m = m.aligned_to(&layout)?;
            pairs.extend(m.weights.into_iter().map(|(a, w)| (a, c * &w)));
        }
        FiniteMeasure::from_weights(layout, pairs)
    }

    pub fn layout(&self) -> &ProductLayout {
        &self.layout
    }

    pub fn weight(&self, atom: &[usize]) -> Rational {
        self.weights.get(atom).cloned().unwrap_or_else(Rational::zero)
    }

    /// Atoms of positive weight in canonical order.
    pub fn support(&self) -> impl Iterator<Item = (&Atom, &Rational)> {
        self.weights.iter()
    }

    pub fn weights(&self) -> &BTreeMap<Atom, Rational> {
        &self.weights
    }

    pub fn support_len(&self) -> usize {
        self.weights.len()
    }

    /// Marginal on the named coordinates. The result keeps this measure's
    /// factor order regardless of the order `coords` are listed in.
    pub fn marginal(&self, coords: &[&str]) -> Result<FiniteMeasure> {
        if coords.is_empty() {
            return Err(Error::layout("marginal needs at least one coordinate"));
        }
        let mut positions = self.layout.positions(coords)?;
        positions.sort_unstable();
        Ok(self.marginal_at(&positions))
    }

    pub(crate) fn marginal_at(&self, positions: &[usize]) -> FiniteMeasure {
        FiniteMeasure { layout: self.layout.sub_layout(positions), weights: self.pushforward(positions) }
    }

    pub(crate) fn pushforward(&self, positions: &[usize]) -> BTreeMap<Atom, Rational> {
        let mut out: BTreeMap<Atom, Rational> = BTreeMap::new();
        for (atom, w) in &self.weights {
            *out.entry(project(atom, positions)).or_insert_with(Rational::zero) += w;
        }
        out
    }

    /// The same measure with factors reordered to `order` (a permutation of
    /// this layout's names).
    pub fn permuted(&self, order: &[&str]) -> Result<FiniteMeasure> {
        if order.len() != self.layout.len() {
            return Err(Error::layout(format!("{order:?} is not a permutation of {:?}", self.layout.names())));
        }
        let positions = self.layout.positions(order)?;
        Ok(self.reindexed(&positions))
    }

    fn reindexed(&self, positions: &[usize]) -> FiniteMeasure {
        FiniteMeasure {
            layout: self.layout.sub_layout(positions),
            weights: self.weights.iter().map(|(a, w)| (project(a, positions), w.clone())).collect(),
        }
    }

    /// The same measure expressed in `layout`'s factor order.
    pub fn aligned_to(&self, layout: &ProductLayout) -> Result<FiniteMeasure> {
        if &self.layout == layout {
            return Ok(self.clone());
        }
        let positions = self.layout.alignment_of(layout)?;
        Ok(self.reindexed(&positions))
    }

    /// Product measure on the concatenated layout.
    pub fn product(&self, other: &FiniteMeasure) -> Result<FiniteMeasure> {
        let mut factors = self.layout.factors.clone();
        factors.extend(other.layout.factors.iter().cloned());
        let layout = ProductLayout::new(factors)?;
        let mut weights = BTreeMap::new();
        for (a, wa) in &self.weights {
            for (b, wb) in &other.weights {
                let mut atom = a.clone();
                atom.extend_from_slice(b);
                weights.insert(atom, wa * wb);
            }
        }
        Ok(FiniteMeasure::from_parts_unchecked(layout, weights))
    }

    /// Exact atomwise equality. The layouts must have the same factors (with
    /// identical atom lists); factor order may differ.
    pub fn measures_equal(&self, other: &FiniteMeasure) -> Result<bool> {
        let other = other.aligned_to(&self.layout)?;
        Ok(self.weights == other.weights)
    }

    /// First atom (canonical order of `self`) where the two measures differ.
    pub fn first_difference(&self, other: &FiniteMeasure) -> Result<Option<Atom>> {
        let other = other.aligned_to(&self.layout)?;
        let keys: BTreeSet<&Atom> = self.weights.keys().chain(other.weights.keys()).collect();
        let first = keys.into_iter().find(|a| self.weights.get(*a) != other.weights.get(*a)).cloned();
        Ok(first)
    }

    pub fn event_prob(&self, event: &Event) -> Result<Rational> {
        let positions = event.positions_in(&self.layout)?;
        Ok(self.weights.iter().filter(|(a, _)| event.contains(&project(a, &positions))).map(|(_, w)| w).sum())
    }

    /// Conditional distribution of the `target` coordinates given the `given`
    /// coordinates. Rows exist only for given-atoms of positive probability.
    pub fn conditional(&self, target: &[&str], given: &[&str]) -> Result<CondProb> {
        let tpos = self.layout.positions(target)?;
        let gpos = self.layout.positions(given)?;
        if let Some(n) = target.iter().find(|n| given.contains(n)) {
            return Err(Error::layout(format!("coordinate {n:?} is both target and given")));
        }
        Ok(self.conditional_at(&tpos, &gpos))
    }

    pub(crate) fn conditional_at(&self, tpos: &[usize], gpos: &[usize]) -> CondProb {
        let mut joint: BTreeMap<Atom, BTreeMap<Atom, Rational>> = BTreeMap::new();
        let mut given_marginal: BTreeMap<Atom, Rational> = BTreeMap::new();
        for (atom, w) in &self.weights {
            let g = project(atom, gpos);
            *given_marginal.entry(g.clone()).or_insert_with(Rational::zero) += w;
            *joint.entry(g).or_default().entry(project(atom, tpos)).or_insert_with(Rational::zero) += w;
        }
        for (g, row) in joint.iter_mut() {
            let pz = &given_marginal[g];
            for v in row.values_mut() {
                *v = &*v / pz;
            }
        }
        CondProb {
            target: self.layout.sub_layout(tpos),
            given: self.layout.sub_layout(gpos),
            given_marginal,
            rows: joint,
        }
    }

    /// `z ↦ p(event | z)` for every given-atom `z` of positive probability.
    pub fn conditional_event(&self, event: &Event, given: &[&str]) -> Result<BTreeMap<Atom, Rational>> {
        let target: Vec<&str> = event.layout().names();
        let cond = self.conditional(&target, given)?;
        cond.given_support()
            .map(|(z, _)| Ok((z.clone(), cond.event_prob(event, z)?.expect("z is in the support"))))
            .collect()
    }
}

/// Conditional probabilities `p[x ‖ z]` for target atoms `x` and given atoms
/// `z`, defined only where the given marginal is positive.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CondProb {
    target: ProductLayout,
    given: ProductLayout,
    given_marginal: BTreeMap<Atom, Rational>,
    rows: BTreeMap<Atom, BTreeMap<Atom, Rational>>,
}

impl CondProb {
    pub fn target(&self) -> &ProductLayout {
        &self.target
    }

    pub fn given(&self) -> &ProductLayout {
        &self.given
    }

    /// Given-atoms of positive probability with their probability.
    pub fn given_support(&self) -> impl Iterator<Item = (&Atom, &Rational)> {
        self.given_marginal.iter()
    }

    pub fn given_weight(&self, given: &[usize]) -> Rational {
        self.given_marginal.get(given).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn given_marginal(&self) -> &BTreeMap<Atom, Rational> {
        &self.given_marginal
    }

    /// Positive entries of the row at `given`; `None` at a null given-atom.
    pub fn row(&self, given: &[usize]) -> Option<&BTreeMap<Atom, Rational>> {
        self.rows.get(given)
    }

    /// `p[target ‖ given]`; `None` when `given` has probability zero.
    pub fn prob(&self, target: &[usize], given: &[usize]) -> Option<Rational> {
        self.rows.get(given).map(|row| row.get(target).cloned().unwrap_or_else(Rational::zero))
    }

    pub fn event_prob(&self, event: &Event, given: &[usize]) -> Result<Option<Rational>> {
        if event.layout() != &self.target {
            return Err(Error::layout(format!("event is on {}, conditional targets {}", event.layout(), self.target)));
        }
        Ok(self.rows.get(given).map(|row| row.iter().filter(|(x, _)| event.contains(x)).map(|(_, v)| v).sum()))
    }
}
