//! Homomorphisms between group contexts, given by generator images.

use std::collections::VecDeque;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::group::{Backend, GroupContext, GroupElement};
use crate::lattice;

/// A homomorphism determined by the images of the source generators. The
/// defining relations of the source backend are checked at construction, as
/// is surjectivity whenever the target is finite. `kernel_generators`, when
/// present, is a generating set of the kernel; construction only verifies
/// that each entry maps to the identity.
#[derive(Debug, Clone)]
pub struct Homomorphism {
    source: Arc<GroupContext>,
    target: Arc<GroupContext>,
    images: Vec<GroupElement>,
    kernel_generators: Option<Vec<GroupElement>>,
}

impl Homomorphism {
    pub fn new(
        source: Arc<GroupContext>,
        target: Arc<GroupContext>,
        images: Vec<GroupElement>,
        kernel_generators: Option<Vec<GroupElement>>,
    ) -> Result<Homomorphism> {
        let gens = source.generators();
        if images.len() != gens.len() {
            return Err(Error::InvalidHomomorphism(format!(
                "expected {} generator images, got {}",
                gens.len(),
                images.len()
            )));
        }
        for img in &images {
            target.validate_elem(img)?;
        }
        let hom = Homomorphism { source, target, images, kernel_generators };
        hom.check_relations()?;
        if let Some(ker) = &hom.kernel_generators {
            for k in ker {
                hom.source.validate_elem(k)?;
                if !hom.target.is_identity(&hom.apply(k)?) {
                    return Err(Error::InvalidHomomorphism(format!(
                        "kernel generator {} does not map to the identity",
                        hom.source.render(k)
                    )));
                }
            }
        }
        if hom.target.is_finite() {
            hom.check_onto_finite()?;
        }
        Ok(hom)
    }

    fn check_relations(&self) -> Result<()> {
        match self.source.backend() {
            Backend::FreeAbelian { rank } => {
                for i in 0..*rank {
                    for j in (i + 1)..*rank {
                        let ij = self.target.mul(&self.images[i], &self.images[j])?;
                        let ji = self.target.mul(&self.images[j], &self.images[i])?;
                        if ij != ji {
                            return Err(Error::InvalidHomomorphism(format!(
                                "images of generators {} and {} do not commute",
                                i + 1,
                                j + 1
                            )));
                        }
                    }
                }
            }
            Backend::FreeGroup { .. } => {}
            Backend::Heisenberg => {
                let t = &self.target;
                let comm = |a: &GroupElement, b: &GroupElement| -> Result<GroupElement> {
                    t.mul(&t.mul(&t.mul(&t.inv(a)?, &t.inv(b)?)?, a)?, b)
                };
                let (x, y, z) = (&self.images[0], &self.images[1], &self.images[2]);
                if comm(x, y)? != *z {
                    return Err(Error::InvalidHomomorphism(
                        "images must satisfy [x,y] = z".into(),
                    ));
                }
                if !t.is_identity(&comm(x, z)?) || !t.is_identity(&comm(y, z)?) {
                    return Err(Error::InvalidHomomorphism(
                        "image of z must be central among the images".into(),
                    ));
                }
            }
            Backend::Finite(fin) => {
                for g in 0..fin.order() {
                    for h in 0..fin.order() {
                        let lhs = self.target.mul(
                            &self.apply(&GroupElement::Index(g))?,
                            &self.apply(&GroupElement::Index(h))?,
                        )?;
                        let rhs = self.apply(&GroupElement::Index(fin.mul_idx(g, h)))?;
                        if lhs != rhs {
                            return Err(Error::InvalidHomomorphism(format!(
                                "images do not respect the product of elements {g} and {h}"
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    fn check_onto_finite(&self) -> Result<()> {
        let order = self.target.order().expect("finite target");
        let mut seen = vec![false; order];
        let start = match self.target.identity() {
            GroupElement::Index(i) => i,
            _ => unreachable!(),
        };
        seen[start] = true;
        let mut queue = VecDeque::from([start]);
        let mut count = 1;
        while let Some(cur) = queue.pop_front() {
            for img in &self.images {
                for step in [img.clone(), self.target.inv(img)?] {
                    let next = match self.target.mul(&GroupElement::Index(cur), &step)? {
                        GroupElement::Index(i) => i,
                        _ => unreachable!(),
                    };
                    if !seen[next] {
                        seen[next] = true;
                        count += 1;
                        queue.push_back(next);
                    }
                }
            }
        }
        if count != order {
            return Err(Error::InvalidHomomorphism(
                "images do not generate the finite target".into(),
            ));
        }
        Ok(())
    }

    pub fn source(&self) -> &Arc<GroupContext> {
        &self.source
    }

    pub fn target(&self) -> &Arc<GroupContext> {
        &self.target
    }

    pub fn images(&self) -> &[GroupElement] {
        &self.images
    }

    pub fn kernel_generators(&self) -> Option<&Vec<GroupElement>> {
        self.kernel_generators.as_ref()
    }

    pub fn apply(&self, g: &GroupElement) -> Result<GroupElement> {
        self.source.validate_elem(g)?;
        // Exponentiate images directly where the normal form allows it, so
        // the cost does not grow with the coordinate magnitudes.
        match g {
            GroupElement::Vector(v) => {
                let mut acc = self.target.identity();
                for (x, img) in v.iter().zip(&self.images) {
                    acc = self.target.mul(&acc, &self.target.pow(img, *x)?)?;
                }
                return Ok(acc);
            }
            GroupElement::Triple(t) => {
                let mut acc = self.target.identity();
                for (x, img) in t.iter().zip(&self.images) {
                    acc = self.target.mul(&acc, &self.target.pow(img, *x)?)?;
                }
                return Ok(acc);
            }
            _ => {}
        }
        let mut acc = self.target.identity();
        for &x in &self.source.word(g)? {
            let img = &self.images[(x.unsigned_abs() - 1) as usize];
            let step = if x > 0 { img.clone() } else { self.target.inv(img)? };
            acc = self.target.mul(&acc, &step)?;
        }
        Ok(acc)
    }

    /// Index of the target element hit by g; only for finite targets.
    pub fn apply_idx(&self, g: &GroupElement) -> Result<usize> {
        match self.apply(g)? {
            GroupElement::Index(i) => Ok(i),
            _ => Err(Error::BackendMismatch("target is not finite".into())),
        }
    }

    /// Composition: first self, then `next`.
    pub fn then(&self, next: &Homomorphism) -> Result<Homomorphism> {
        if !self.target.same_group(next.source()) {
            return Err(Error::GroupMismatch(
                "composition needs matching middle groups".into(),
            ));
        }
        let mut images = Vec::new();
        for img in &self.images {
            images.push(next.apply(img)?);
        }
        // The composed kernel is generally larger than either factor's, so
        // no generating set is claimed here.
        Homomorphism::new(Arc::clone(&self.source), Arc::clone(next.target()), images, None)
    }

    /// A source element mapping to the given target element, found breadth
    /// first through the generator images. Needs a finite target.
    pub fn lift(&self, q: &GroupElement) -> Result<GroupElement> {
        self.target.validate_elem(q)?;
        let order = self
            .target
            .order()
            .ok_or_else(|| Error::Unsupported("lifting needs a finite target".into()))?;
        let want = match q {
            GroupElement::Index(i) => *i,
            _ => unreachable!("validated above"),
        };
        let start = match self.target.identity() {
            GroupElement::Index(i) => i,
            _ => unreachable!(),
        };
        let mut words: Vec<Option<Vec<i32>>> = vec![None; order];
        words[start] = Some(Vec::new());
        let mut queue = VecDeque::from([start]);
        while let Some(cur) = queue.pop_front() {
            if cur == want {
                break;
            }
            for (k, img) in self.images.iter().enumerate() {
                for (letter, step) in [(k as i32 + 1, img.clone()), (-(k as i32 + 1), self.target.inv(img)?)]
                {
                    let next = match self.target.mul(&GroupElement::Index(cur), &step)? {
                        GroupElement::Index(i) => i,
                        _ => unreachable!(),
                    };
                    if words[next].is_none() {
                        let mut w = words[cur].clone().unwrap();
                        w.push(letter);
                        words[next] = Some(w);
                        queue.push_back(next);
                    }
                }
            }
        }
        let word = words[want]
            .clone()
            .ok_or_else(|| Error::InvalidHomomorphism("element is not in the image".into()))?;
        self.source.eval_word(&word)
    }

    /// HNF basis of the kernel lattice for a Z^d source and finite target,
    /// computed by scanning the box [0, |Q|)^d, which always contains a
    /// fundamental domain of the kernel.
    pub fn kernel_lattice(&self) -> Result<Vec<Vec<i64>>> {
        let rank = match self.source.backend() {
            Backend::FreeAbelian { rank } => *rank,
            _ => {
                return Err(Error::Unsupported(
                    "kernel lattices need a free abelian source".into(),
                ))
            }
        };
        let order = self
            .target
            .order()
            .ok_or_else(|| Error::Unsupported("kernel lattices need a finite target".into()))?;
        let identity = self.target.identity();
        let h = lattice::lattice_from_box(rank, order as u64, |v| {
            self.apply(&GroupElement::Vector(v.to_vec())).map(|img| img == identity).unwrap_or(false)
        })?;
        debug_assert_eq!(lattice::index(&h), order as u64);
        Ok(h)
    }

    /// The identity map of a context, with a trivial kernel generating set.
    pub fn identity(ctx: &Arc<GroupContext>) -> Result<Homomorphism> {
        let images = ctx.generators().into_iter().map(|(_, g)| g).collect();
        Homomorphism::new(Arc::clone(ctx), Arc::clone(ctx), images, Some(Vec::new()))
    }
}
