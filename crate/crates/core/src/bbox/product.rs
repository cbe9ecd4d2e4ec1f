use super::{BlackBoxGroup, ElementString, GlobalExponent, SharedBox};
use crate::error::{Error, Result};
use std::sync::Arc;

/// Direct product of boxes. Strings are concatenations of component strings
/// and every operation acts componentwise.
pub struct DirectProduct {
    parts: Vec<SharedBox>,
    offsets: Vec<usize>,
    generators: Vec<ElementString>,
    exponent: GlobalExponent,
}

impl DirectProduct {
    pub fn new(parts: Vec<SharedBox>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::invalid("direct product of no boxes"));
        }
        let mut offsets = vec![0];
        for p in &parts {
            offsets.push(offsets.last().unwrap() + p.byte_len());
        }
        let mut exponent = parts[0].exponent().clone();
        for p in &parts[1..] {
            exponent = exponent.lcm(p.exponent())?;
        }
        let ids: Vec<ElementString> = parts.iter().map(|p| p.identity()).collect();
        let mut generators = Vec::new();
        for (i, p) in parts.iter().enumerate() {
            for g in p.generators() {
                let mut xs = ids.clone();
                xs[i] = g.clone();
                generators.push(ElementString::concat(&xs.iter().collect::<Vec<_>>()));
            }
        }
        Ok(DirectProduct {
            parts,
            offsets,
            generators,
            exponent,
        })
    }

    pub fn parts(&self) -> &[SharedBox] {
        &self.parts
    }

    pub fn split(&self, s: &ElementString) -> Vec<ElementString> {
        (0..self.parts.len())
            .map(|i| s.slice(self.offsets[i]..self.offsets[i + 1]))
            .collect()
    }

    pub fn component(&self, s: &ElementString, i: usize) -> ElementString {
        s.slice(self.offsets[i]..self.offsets[i + 1])
    }

    pub fn join(&self, xs: &[ElementString]) -> ElementString {
        assert_eq!(xs.len(), self.parts.len(), "wrong number of components");
        ElementString::concat(&xs.iter().collect::<Vec<_>>())
    }

    fn zip_map(&self, a: &ElementString, b: &ElementString, f: impl Fn(&dyn BlackBoxGroup, &ElementString, &ElementString) -> ElementString) -> ElementString {
        let xs: Vec<ElementString> = (0..self.parts.len())
            .map(|i| f(self.parts[i].as_ref(), &self.component(a, i), &self.component(b, i)))
            .collect();
        self.join(&xs)
    }
}

impl BlackBoxGroup for DirectProduct {
    fn byte_len(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    fn exponent(&self) -> &GlobalExponent {
        &self.exponent
    }

    fn generators(&self) -> &[ElementString] {
        &self.generators
    }

    fn mul(&self, a: &ElementString, b: &ElementString) -> ElementString {
        self.zip_map(a, b, |g, x, y| g.mul(x, y))
    }

    fn inv(&self, a: &ElementString) -> ElementString {
        let xs: Vec<ElementString> = (0..self.parts.len())
            .map(|i| self.parts[i].inv(&self.component(a, i)))
            .collect();
        self.join(&xs)
    }

    fn eq(&self, a: &ElementString, b: &ElementString) -> bool {
        (0..self.parts.len()).all(|i| self.parts[i].eq(&self.component(a, i), &self.component(b, i)))
    }

    fn identity(&self) -> ElementString {
        let xs: Vec<ElementString> = self.parts.iter().map(|p| p.identity()).collect();
        self.join(&xs)
    }

    fn components(&self) -> Option<Vec<&dyn BlackBoxGroup>> {
        Some(self.parts.iter().map(|p| p.as_ref()).collect())
    }
}

/// The subgroup of a box generated by given strings. Operations are the
/// parent's; sampling runs product replacement on the new generators.
pub struct SubgroupBox {
    parent: SharedBox,
    generators: Vec<ElementString>,
}

impl SubgroupBox {
    pub fn new(parent: SharedBox, generators: Vec<ElementString>) -> Result<Self> {
        if generators.is_empty() {
            return Err(Error::invalid("subgroup needs at least one generator"));
        }
        if generators.iter().any(|g| g.as_bytes().len() != parent.byte_len()) {
            return Err(Error::invalid("generator string has the wrong length"));
        }
        Ok(SubgroupBox { parent, generators })
    }

    pub fn parent(&self) -> &SharedBox {
        &self.parent
    }
}

impl BlackBoxGroup for SubgroupBox {
    fn byte_len(&self) -> usize {
        self.parent.byte_len()
    }

    fn exponent(&self) -> &GlobalExponent {
        self.parent.exponent()
    }

    fn generators(&self) -> &[ElementString] {
        &self.generators
    }

    fn mul(&self, a: &ElementString, b: &ElementString) -> ElementString {
        self.parent.mul(a, b)
    }

    fn inv(&self, a: &ElementString) -> ElementString {
        self.parent.inv(a)
    }

    fn eq(&self, a: &ElementString, b: &ElementString) -> bool {
        self.parent.eq(a, b)
    }

    fn identity(&self) -> ElementString {
        self.parent.identity()
    }
}

/// A box modulo a known central subgroup `<z>`: strings compare equal when
/// they differ by a power of `z`.
pub struct QuotientBox {
    parent: SharedBox,
    center: Vec<ElementString>,
}

impl QuotientBox {
    /// `z` must be central of small order; centrality is spot-checked on the
    /// generators.
    pub fn new(parent: SharedBox, z: &ElementString) -> Result<Self> {
        if !parent.generators().iter().all(|g| parent.commute(g, z)) {
            return Err(Error::invalid("quotient element is not central"));
        }
        let order = parent.order(z)?;
        if order > 1 << 16 {
            return Err(Error::invalid("central element of too large an order"));
        }
        let mut center = vec![parent.identity()];
        for _ in 1..order {
            center.push(parent.mul(center.last().unwrap(), z));
        }
        Ok(QuotientBox { parent, center })
    }
}

impl BlackBoxGroup for QuotientBox {
    fn byte_len(&self) -> usize {
        self.parent.byte_len()
    }

    fn exponent(&self) -> &GlobalExponent {
        self.parent.exponent()
    }

    fn generators(&self) -> &[ElementString] {
        self.parent.generators()
    }

    fn mul(&self, a: &ElementString, b: &ElementString) -> ElementString {
        self.parent.mul(a, b)
    }

    fn inv(&self, a: &ElementString) -> ElementString {
        self.parent.inv(a)
    }

    fn eq(&self, a: &ElementString, b: &ElementString) -> bool {
        let d = self.parent.mul(a, &self.parent.inv(b));
        self.center.iter().any(|z| self.parent.eq(&d, z))
    }

    fn identity(&self) -> ElementString {
        self.parent.identity()
    }
}

/// Black box over the graph `{(x, mu(x))}` of a homomorphism `mu: X -> Y`,
/// generated by the pairs `(x_i, y_i)` inside `X x Y`. Any sampled pair
/// carries the image of its first coordinate in its second.
pub struct MorphismGraph {
    product: Arc<DirectProduct>,
    graph: SubgroupBox,
}

impl MorphismGraph {
    pub fn new(domain: SharedBox, codomain: SharedBox, gens: &[ElementString], images: &[ElementString]) -> Result<Self> {
        if gens.len() != images.len() {
            return Err(Error::invalid("generators and images differ in number"));
        }
        let product = Arc::new(DirectProduct::new(vec![domain, codomain])?);
        let pairs = gens
            .iter()
            .zip(images)
            .map(|(x, y)| product.join(&[x.clone(), y.clone()]))
            .collect();
        let graph = SubgroupBox::new(product.clone(), pairs)?;
        Ok(MorphismGraph { product, graph })
    }

    pub fn split(&self, s: &ElementString) -> (ElementString, ElementString) {
        (self.product.component(s, 0), self.product.component(s, 1))
    }

    /// The image coordinate of a string produced by this box.
    pub fn apply(&self, s: &ElementString) -> ElementString {
        self.product.component(s, 1)
    }
}

/// Convenience constructor matching the other box builders.
pub fn graph_morphism(domain: SharedBox, codomain: SharedBox, gens: &[ElementString], images: &[ElementString]) -> Result<MorphismGraph> {
    MorphismGraph::new(domain, codomain, gens, images)
}

impl BlackBoxGroup for MorphismGraph {
    fn byte_len(&self) -> usize {
        self.graph.byte_len()
    }

    fn exponent(&self) -> &GlobalExponent {
        self.graph.exponent()
    }

    fn generators(&self) -> &[ElementString] {
        self.graph.generators()
    }

    fn mul(&self, a: &ElementString, b: &ElementString) -> ElementString {
        self.graph.mul(a, b)
    }

    fn inv(&self, a: &ElementString) -> ElementString {
        self.graph.inv(a)
    }

    fn eq(&self, a: &ElementString, b: &ElementString) -> bool {
        self.graph.eq(a, b)
    }

    fn identity(&self) -> ElementString {
        self.graph.identity()
    }
}
