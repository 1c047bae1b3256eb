//! Følner sets in the lattices `(ℕ^d, +)` and in finite semigroups given by
//! Cayley tables, together with the averages built from them.
//!
//! Semigroup elements are written as `Vec<u64>`: lattice points by their
//! coordinates, elements of a finite table as a single index.

use std::collections::HashSet;

use crate::error::{shape, Error, Result};
use crate::linalg::{spectral_norm, CMat, CVec, Complex};

pub type Element = Vec<u64>;

/// Multiplicativity is checked on at most this many elements (all pairs).
const REP_CHECK_ELEMENTS: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CayleyTable {
    table: Vec<Vec<usize>>,
    right_cancellative: bool,
}

impl CayleyTable {
    /// Validates closure and associativity (exhaustively).
    pub fn new(table: Vec<Vec<usize>>) -> Result<Self> {
        let m = table.len();
        if m == 0 {
            return Err(Error::PayloadInvalid("Cayley table is empty".into()));
        }
        for row in &table {
            if row.len() != m {
                return Err(shape(
                    format!("{m}x{m} table"),
                    format!("row of length {}", row.len()),
                ));
            }
            if let Some(bad) = row.iter().find(|&&v| v >= m) {
                return Err(Error::PayloadInvalid(format!(
                    "table entry {bad} is not an element"
                )));
            }
        }
        for a in 0..m {
            for b in 0..m {
                for c in 0..m {
                    if table[table[a][b]][c] != table[a][table[b][c]] {
                        return Err(Error::NotAssociative(a, b, c));
                    }
                }
            }
        }
        let right_cancellative = right_cancellation_witness(&table).is_none();
        Ok(CayleyTable {
            table,
            right_cancellative,
        })
    }

    /// Cyclic group `ℤ/mℤ`.
    pub fn cyclic(m: usize) -> Self {
        Self::new(
            (0..m)
                .map(|a| (0..m).map(|b| (a + b) % m).collect())
                .collect(),
        )
        .expect("group table")
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn op(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn rows(&self) -> &[Vec<usize>] {
        &self.table
    }

    pub fn right_cancellative(&self) -> bool {
        self.right_cancellative
    }
}

/// `(r, s, t)` with `r ≠ s` and `rt = st`, if one exists.
fn right_cancellation_witness(table: &[Vec<usize>]) -> Option<(usize, usize, usize)> {
    let m = table.len();
    for t in 0..m {
        let mut seen = vec![usize::MAX; m];
        for (r, row) in table.iter().enumerate() {
            let p = row[t];
            if seen[p] != usize::MAX {
                return Some((seen[p], r, t));
            }
            seen[p] = r;
        }
    }
    None
}

/// Exhaustive right-cancellativity check with a witness `(r, s, t)` on failure.
pub fn is_right_cancellative(table: &CayleyTable) -> (bool, Option<(usize, usize, usize)>) {
    let w = right_cancellation_witness(&table.table);
    (w.is_none(), w)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Semigroup {
    /// `(ℕ^d, +)`.
    Lattice {
        dim: usize,
    },
    Finite(CayleyTable),
}

impl Semigroup {
    pub fn lattice(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::PayloadInvalid(
                "lattice dimension must be positive".into(),
            ));
        }
        Ok(Semigroup::Lattice { dim })
    }

    pub fn check(&self, x: &Element) -> Result<()> {
        match self {
            Semigroup::Lattice { dim } if x.len() == *dim => Ok(()),
            Semigroup::Lattice { dim } => Err(shape(format!("{dim} coordinates"), x.len())),
            Semigroup::Finite(t) if x.len() == 1 && (x[0] as usize) < t.order() => Ok(()),
            Semigroup::Finite(t) => Err(Error::PayloadInvalid(format!(
                "{x:?} is not an element of a semigroup of order {}",
                t.order()
            ))),
        }
    }

    pub fn op(&self, a: &Element, b: &Element) -> Element {
        match self {
            Semigroup::Lattice { .. } => a.iter().zip(b).map(|(x, y)| x + y).collect(),
            Semigroup::Finite(t) => vec![t.op(a[0] as usize, b[0] as usize) as u64],
        }
    }

    pub fn right_cancellative(&self) -> bool {
        match self {
            Semigroup::Lattice { .. } => true,
            Semigroup::Finite(t) => t.right_cancellative(),
        }
    }
}

/// A nonempty finite subset of a semigroup.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FolnerSet {
    /// `∏ [1..L_i]` in a lattice.
    Box {
        sides: Vec<u64>,
    },
    Explicit(Vec<Element>),
}

impl FolnerSet {
    pub fn lattice_box(sides: Vec<u64>) -> Result<Self> {
        if sides.is_empty() || sides.contains(&0) {
            return Err(Error::PayloadInvalid(format!(
                "box sides must be positive, got {sides:?}"
            )));
        }
        Ok(FolnerSet::Box { sides })
    }

    /// Cube `[1..L]^d`.
    pub fn cube(dim: usize, side: u64) -> Result<Self> {
        Self::lattice_box(vec![side; dim])
    }

    /// Deduplicated explicit set.
    pub fn explicit(mut elements: Vec<Element>) -> Result<Self> {
        elements.sort();
        elements.dedup();
        if elements.is_empty() {
            return Err(Error::PayloadInvalid("Følner sets must be nonempty".into()));
        }
        Ok(FolnerSet::Explicit(elements))
    }

    /// All elements of a finite semigroup.
    pub fn whole(table: &CayleyTable) -> Self {
        FolnerSet::Explicit((0..table.order() as u64).map(|a| vec![a]).collect())
    }

    pub fn len(&self) -> usize {
        match self {
            FolnerSet::Box { sides } => sides.iter().product::<u64>() as usize,
            FolnerSet::Explicit(e) => e.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Elements in lexicographic order.
    pub fn elements(&self) -> Vec<Element> {
        match self {
            FolnerSet::Box { sides } => {
                let mut out = Vec::with_capacity(self.len());
                let mut cur = vec![1u64; sides.len()];
                loop {
                    out.push(cur.clone());
                    let mut k = sides.len();
                    loop {
                        if k == 0 {
                            return out;
                        }
                        k -= 1;
                        if cur[k] < sides[k] {
                            cur[k] += 1;
                            break;
                        }
                        cur[k] = 1;
                    }
                }
            }
            FolnerSet::Explicit(e) => e.clone(),
        }
    }

    pub fn check(&self, sg: &Semigroup) -> Result<()> {
        match (self, sg) {
            (FolnerSet::Box { sides }, Semigroup::Lattice { dim }) if sides.len() == *dim => Ok(()),
            (FolnerSet::Box { sides }, _) => Err(shape(
                format!("{:?}", sg),
                format!("box with sides {sides:?}"),
            )),
            (FolnerSet::Explicit(e), _) => e.iter().try_for_each(|x| sg.check(x)),
        }
    }
}

/// `|F·s Δ F| / |F|` by explicit enumeration.
pub fn folner_defect_exhaustive(sg: &Semigroup, f: &FolnerSet, s: &Element) -> Result<f64> {
    f.check(sg)?;
    sg.check(s)?;
    let base: HashSet<Element> = f.elements().into_iter().collect();
    let moved: HashSet<Element> = base.iter().map(|t| sg.op(t, s)).collect();
    let sym = moved.symmetric_difference(&base).count();
    Ok(sym as f64 / base.len() as f64)
}

/// `|F·s Δ F| / |F|`; closed form `2(1 − ∏(1 − s_i/L_i)₊)` for lattice boxes.
pub fn folner_defect(sg: &Semigroup, f: &FolnerSet, s: &Element) -> Result<f64> {
    f.check(sg)?;
    sg.check(s)?;
    match f {
        FolnerSet::Box { sides } => {
            // counted in integers so that e.g. 2/L comes out exact
            let size: u128 = sides.iter().map(|&l| l as u128).product();
            let overlap: u128 = sides
                .iter()
                .zip(s)
                .map(|(&l, &si)| l.saturating_sub(si) as u128)
                .product();
            Ok(2.0 * (size - overlap) as f64 / size as f64)
        }
        FolnerSet::Explicit(_) => folner_defect_exhaustive(sg, f, s),
    }
}

/// `(1/|F|) Σ_{t∈F} u(r·t)`, with `r` omitted meaning no offset.
pub fn folner_average<U>(sg: &Semigroup, u: U, f: &FolnerSet, r: Option<&Element>) -> Result<CVec>
where
    U: Fn(&Element) -> CVec,
{
    f.check(sg)?;
    if let Some(r) = r {
        sg.check(r)?;
    }
    let mut acc: Option<CVec> = None;
    for t in f.elements() {
        let arg = match r {
            Some(r) => sg.op(r, &t),
            None => t,
        };
        let v = u(&arg);
        match acc.as_mut() {
            Some(a) => *a += v,
            None => acc = Some(v),
        }
    }
    Ok(acc.expect("nonempty set").unscale(f.len() as f64))
}

#[derive(Debug, Clone, PartialEq)]
pub struct NetDefect {
    /// `‖C_F·rep(t) − C_F‖`.
    pub value: f64,
    /// `sup ‖rep(s)‖` over the elements touched.
    pub rep_bound: f64,
    pub folner_defect: f64,
    /// Largest `‖rep(a)rep(b) − rep(ab)‖` over the checked pairs.
    pub multiplicativity_defect: f64,
}

impl NetDefect {
    /// `rep_bound · folner_defect`, the bound the averaging lemma gives.
    pub fn bound(&self) -> f64 {
        self.rep_bound * self.folner_defect
    }
}

/// Measures how far `C_F = (1/|F|) Σ_{s∈F} rep(s)` is from being right
/// invariant under `rep(t)`, after checking that `rep` is multiplicative on a
/// deterministic sample of pairs.
pub fn ergodic_net_defect<R>(
    sg: &Semigroup,
    rep: R,
    f: &FolnerSet,
    t: &Element,
) -> Result<NetDefect>
where
    R: Fn(&Element) -> CMat,
{
    f.check(sg)?;
    sg.check(t)?;
    let elements = f.elements();
    let rep_t = rep(t);
    let h = rep_t.nrows();

    let stride = (elements.len() / REP_CHECK_ELEMENTS).max(1);
    let mut sample: Vec<Element> = elements
        .iter()
        .step_by(stride)
        .take(REP_CHECK_ELEMENTS)
        .cloned()
        .collect();
    sample.push(t.clone());
    let mut mult = 0.0f64;
    for a in &sample {
        for b in &sample {
            let d = spectral_norm(&(rep(a) * rep(b) - rep(&sg.op(a, b))));
            if d > mult {
                mult = d;
            }
            if d > 1e-9 {
                return Err(Error::NotRepresentation {
                    defect: d,
                    left: format!("{a:?}"),
                    right: format!("{b:?}"),
                });
            }
        }
    }

    let mut c_f = CMat::zeros(h, h);
    let mut rep_bound = spectral_norm(&rep_t);
    for s in &elements {
        let m = rep(s);
        rep_bound = rep_bound.max(spectral_norm(&m));
        rep_bound = rep_bound.max(spectral_norm(&rep(&sg.op(s, t))));
        c_f += m;
    }
    c_f /= Complex::new(elements.len() as f64, 0.0);
    let value = spectral_norm(&(&c_f * &rep_t - &c_f));
    Ok(NetDefect {
        value,
        rep_bound,
        folner_defect: folner_defect(sg, f, t)?,
        multiplicativity_defect: mult,
    })
}

/// Scalar character `t ↦ exp(2πi⟨θ, t⟩)` of a lattice, as a `1×1` representation.
pub fn lattice_character(theta: Vec<f64>) -> impl Fn(&Element) -> CMat {
    move |t: &Element| {
        let turns: f64 = theta
            .iter()
            .zip(t)
            .map(|(&th, &x)| crate::linalg::frac_product(th, x as f64))
            .sum();
        CMat::from_element(1, 1, crate::linalg::cis_turns(turns))
    }
}

/// Left-regular permutation representation `L_g e_x = e_{gx}` of a table.
pub fn left_regular_permutation(table: &CayleyTable) -> impl Fn(&Element) -> CMat + '_ {
    move |g: &Element| {
        let m = table.order();
        let g = g[0] as usize;
        CMat::from_fn(m, m, |row, x| {
            if table.op(g, x) == row {
                Complex::new(1.0, 0.0)
            } else {
                Complex::new(0.0, 0.0)
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, cis_turns};

    fn left_zero(m: usize) -> Vec<Vec<usize>> {
        (0..m).map(|a| vec![a; m]).collect()
    }

    fn right_zero(m: usize) -> Vec<Vec<usize>> {
        (0..m).map(|_| (0..m).collect()).collect()
    }

    #[test]
    fn box_defects() {
        let z = Semigroup::lattice(1).unwrap();
        let f = FolnerSet::cube(1, 10).unwrap();
        assert!((folner_defect(&z, &f, &vec![1]).unwrap() - 0.2).abs() < 1e-15);
        assert!((folner_defect_exhaustive(&z, &f, &vec![1]).unwrap() - 0.2).abs() < 1e-15);

        let z2 = Semigroup::lattice(2).unwrap();
        for l in [3u64, 10, 17] {
            let f = FolnerSet::cube(2, l).unwrap();
            for s in [vec![1, 0], vec![0, 1], vec![2, 3], vec![l + 1, 0]] {
                let closed = folner_defect(&z2, &f, &s).unwrap();
                let brute = folner_defect_exhaustive(&z2, &f, &s).unwrap();
                assert!((closed - brute).abs() < 1e-14, "L={l} s={s:?}");
            }
            assert!((folner_defect(&z2, &f, &vec![1, 0]).unwrap() - 2.0 / l as f64).abs() < 1e-15);
        }
    }

    #[test]
    fn defect_decreases_along_doubling_boxes() {
        let z2 = Semigroup::lattice(2).unwrap();
        let s = vec![3, 1];
        let mut prev = f64::INFINITY;
        let mut l = 2;
        while l <= 1024 {
            let d = folner_defect(&z2, &FolnerSet::cube(2, l).unwrap(), &s).unwrap();
            assert!(d <= prev);
            prev = d;
            l *= 2;
        }
    }

    #[test]
    fn whole_group_is_invariant() {
        let g = CayleyTable::cyclic(7);
        let sg = Semigroup::Finite(g.clone());
        let f = FolnerSet::whole(&g);
        for s in 0..7 {
            assert_eq!(folner_defect(&sg, &f, &vec![s]).unwrap(), 0.0);
        }
    }

    #[test]
    fn cancellation() {
        assert!(is_right_cancellative(&CayleyTable::cyclic(5)).0);
        assert!(is_right_cancellative(&CayleyTable::new(left_zero(4)).unwrap()).0);
        let (ok, w) = is_right_cancellative(&CayleyTable::new(right_zero(3)).unwrap());
        assert!(!ok);
        let (r, s, t) = w.unwrap();
        let rz = right_zero(3);
        assert!(r != s && rz[r][t] == rz[s][t]);
    }

    #[test]
    fn rejects_non_associative_tables() {
        // subtraction mod 3 is not associative
        let table: Vec<Vec<usize>> = (0..3)
            .map(|a| (0..3).map(|b| (a + 3 - b) % 3).collect())
            .collect();
        assert!(matches!(
            CayleyTable::new(table),
            Err(Error::NotAssociative(..))
        ));
        assert!(CayleyTable::new(vec![vec![0, 5], vec![1, 0]]).is_err());
    }

    #[test]
    fn averages() {
        let z = Semigroup::lattice(1).unwrap();
        let f = FolnerSet::cube(1, 8).unwrap();
        let cst = CVec::from_vec(vec![c(1.0, 2.0), c(0.0, -1.0)]);
        let avg = folner_average(&z, |_| cst.clone(), &f, None).unwrap();
        assert!((avg - &cst).norm() < 1e-15);

        let alt = folner_average(
            &z,
            |t| CVec::from_element(1, cis_turns(0.5 * t[0] as f64)),
            &f,
            None,
        )
        .unwrap();
        assert!(alt.norm() < 1e-14);

        let z2 = Semigroup::lattice(2).unwrap();
        let (a, b) = (0.13, 0.41);
        let f = FolnerSet::lattice_box(vec![6, 9]).unwrap();
        let r = vec![2, 5];
        let chi = |t: &Element| CVec::from_element(1, cis_turns(a * t[0] as f64 + b * t[1] as f64));
        let avg = folner_average(&z2, chi, &f, Some(&r)).unwrap();
        let one_d = |theta: f64, l: u64, off: u64| -> Complex {
            (1..=l)
                .map(|t| cis_turns(theta * (t + off) as f64))
                .sum::<Complex>()
                / l as f64
        };
        let expect = one_d(a, 6, 2) * one_d(b, 9, 5);
        assert!((avg[0] - expect).norm() < 1e-12);
    }

    #[test]
    fn net_defects() {
        let z = Semigroup::lattice(1).unwrap();
        let trivial = |_: &Element| CMat::identity(2, 2);
        let f = FolnerSet::cube(1, 50).unwrap();
        assert_eq!(
            ergodic_net_defect(&z, trivial, &f, &vec![3]).unwrap().value,
            0.0
        );

        let theta = 0.1;
        let chi = lattice_character(vec![theta]);
        for l in [10u64, 100, 1000] {
            let f = FolnerSet::cube(1, l).unwrap();
            let d = ergodic_net_defect(&z, &chi, &f, &vec![1]).unwrap();
            // C_F(χ(1) − 1) = (χ(L+1) − χ(1)) / L
            let expect = (cis_turns(theta * (l + 1) as f64) - cis_turns(theta)).norm() / l as f64;
            assert!((d.value - expect).abs() < 1e-12);
            assert!(d.value <= d.bound() * 1.01);
        }

        let g = CayleyTable::cyclic(5);
        let sg = Semigroup::Finite(g.clone());
        let rep = left_regular_permutation(&g);
        let d = ergodic_net_defect(&sg, &rep, &FolnerSet::whole(&g), &vec![2]).unwrap();
        assert!(d.value < 1e-15);
    }

    #[test]
    fn detects_non_representations() {
        let z = Semigroup::lattice(1).unwrap();
        let bad = |t: &Element| CMat::from_element(1, 1, c(t[0] as f64, 0.0));
        let err =
            ergodic_net_defect(&z, bad, &FolnerSet::cube(1, 5).unwrap(), &vec![1]).unwrap_err();
        assert!(matches!(err, Error::NotRepresentation { .. }));
    }
}
