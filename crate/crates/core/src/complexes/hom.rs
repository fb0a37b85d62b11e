use num_bigint::BigInt;

use super::system::{boundary_equations, chain_equations, Layout, System};
use super::{ChainMap, Complex, ComplexError};
use crate::lattice::{AffineCoset, FgAbelianGroup};

/// `Hom_K(X, Y)`: chain maps modulo null-homotopic maps.
#[derive(Clone, Debug)]
pub struct HomGroupPresentation {
    source: Complex,
    target: Complex,
    group: FgAbelianGroup,
    representatives: Vec<ChainMap>,
    orders: Vec<BigInt>,
    layout: Layout,
    coset: AffineCoset,
}

impl HomGroupPresentation {
    pub fn source(&self) -> &Complex {
        &self.source
    }

    pub fn target(&self) -> &Complex {
        &self.target
    }

    pub fn group(&self) -> &FgAbelianGroup {
        &self.group
    }

    /// Chain maps whose classes generate the group, one per cyclic factor.
    pub fn representatives(&self) -> &[ChainMap] {
        &self.representatives
    }

    /// Cyclic order of each representative's class (zero: infinite).
    pub fn orders(&self) -> &[BigInt] {
        &self.orders
    }

    /// Coordinates of the class of `f` against `representatives`, reduced
    /// modulo the finite orders. Equal coordinates iff homotopic.
    pub fn lookup(&self, f: &ChainMap) -> Result<Vec<BigInt>, ComplexError> {
        if f.source() != &self.source || f.target() != &self.target {
            return Err(ComplexError::Shape("lookup of a map with the wrong source or target".into()));
        }
        let v = self.layout.pack(|i| f.component(i));
        self.coset
            .coordinates(&v)
            .ok_or_else(|| ComplexError::Shape("map is not a chain map".into()))
    }

    /// Chain map with the given coordinates.
    pub fn element(&self, coeffs: &[BigInt]) -> ChainMap {
        let v = self.coset.element(coeffs);
        ChainMap::new_unchecked(&self.source, &self.target, self.layout.unpack(&v)).expect("layout shapes")
    }

    /// Underlying class coset in component coordinates.
    pub fn coset(&self) -> &AffineCoset {
        &self.coset
    }
}

/// Hom-group in the homotopy category, presented from the chain-condition
/// kernel and the boundary image `h -> d h + h d`.
pub fn hom_group(x: &Complex, y: &Complex) -> Result<HomGroupPresentation, ComplexError> {
    super::complex::same_ring(x.ring(), y.ring())?;
    let ring = x.ring();
    let layout = Layout::maps(x, y, 0, 0);
    let mut sys = System::new(layout.len());
    chain_equations(&mut sys, &layout, x, y);
    let kernel = match sys.solve(ring)? {
        Some(sol) => sol.kernel,
        None => unreachable!("homogeneous system"),
    };
    let relations = boundary_image(x, y, &layout)?;
    let coset = AffineCoset::new(
        layout.len(),
        ring.modulus().cloned(),
        vec![BigInt::from(0); layout.len()],
        &kernel,
        &relations,
        ring.is_prime_field(),
    );
    let orders = coset.orders().to_vec();
    let group = FgAbelianGroup::from_cyclic_orders(&orders);
    let representatives = coset
        .class_generators()
        .iter()
        .map(|g| ChainMap::new(x, y, layout.unpack(g)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(HomGroupPresentation {
        source: x.clone(),
        target: y.clone(),
        group,
        representatives,
        orders,
        layout,
        coset,
    })
}

/// Images `d h + h d` of the unit homotopies, in map coordinates of `layout`.
pub(crate) fn boundary_image(x: &Complex, y: &Complex, layout: &Layout) -> Result<Vec<Vec<BigInt>>, ComplexError> {
    let hl = Layout::maps(x, y, -1, 0);
    let mut sys = System::new(hl.len());
    let eqs = boundary_equations(&mut sys, &hl, x, y);
    debug_assert_eq!(
        eqs.values().count(),
        layout.blocks().len(),
        "boundary equations align with map blocks"
    );
    let a = sys.matrix();
    Ok((0..hl.len()).map(|j| a.column(j)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complexes::{homotopic, Ring};
    use crate::lattice::IntMatrix;

    #[test]
    fn hom_of_point() {
        let x = Complex::concentrated(Ring::Integers, 0, 1);
        let h = hom_group(&x, &x).unwrap();
        assert_eq!(h.group(), &FgAbelianGroup::free(1));
        let c = h.lookup(&ChainMap::identity(&x)).unwrap();
        assert_eq!(c.len(), 1);
        assert!(c[0] == BigInt::from(1) || c[0] == BigInt::from(-1));
    }

    #[test]
    fn hom_from_contractible_is_zero() {
        let x = Complex::new(Ring::Integers, [(0, 1), (1, 1)], [(0, IntMatrix::identity(1))]).unwrap();
        let y = Complex::concentrated(Ring::Integers, 0, 2);
        assert!(hom_group(&x, &y).unwrap().group().is_trivial());
    }

    #[test]
    fn hom_of_nine() {
        let x = Complex::new(Ring::Integers, [(0, 1), (1, 1)], [(0, IntMatrix::from_i64(&[&[9]]))]).unwrap();
        let h = hom_group(&x, &x).unwrap();
        assert_eq!(h.group().to_string(), "Z/9");
        let id = ChainMap::identity(&x);
        let ten = id.scale(&BigInt::from(10));
        assert_eq!(h.lookup(&id).unwrap(), h.lookup(&ten).unwrap());
        assert!(homotopic(&id, &ten).unwrap().is_some());
        let two = id.scale(&BigInt::from(2));
        assert_ne!(h.lookup(&id).unwrap(), h.lookup(&two).unwrap());
    }
}
