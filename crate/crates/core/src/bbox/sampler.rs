use super::{BlackBoxGroup, ElementString};
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Replacement moves performed before the first sample.
pub const BURN_IN: usize = 100;

/// Product replacement with an accumulator ("rattle").
///
/// The tuple starts as the generators repeated cyclically. Each step picks
/// `i != j`, replaces `t_i` by `t_i t_j^{±1}` or `t_j^{±1} t_i`, then
/// multiplies the accumulator by the new `t_i`.
pub struct ProductReplacer<'a> {
    group: &'a dyn BlackBoxGroup,
    tuple: Vec<ElementString>,
    accumulator: ElementString,
}

impl<'a> ProductReplacer<'a> {
    pub fn new(group: &'a dyn BlackBoxGroup, gens: &[ElementString], burn_in: usize, rng: &mut dyn RngCore) -> Self {
        assert!(!gens.is_empty(), "product replacement needs generators");
        let len = (2 * gens.len()).max(10);
        let tuple = (0..len).map(|i| gens[i % gens.len()].clone()).collect();
        let mut pr = ProductReplacer {
            group,
            tuple,
            accumulator: group.identity(),
        };
        for _ in 0..burn_in {
            pr.step(rng);
        }
        pr
    }

    fn step(&mut self, rng: &mut dyn RngCore) {
        let n = self.tuple.len();
        let i = rng.gen_range(0..n);
        let mut j = rng.gen_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        let g = &self.group;
        let tj = if rng.gen::<bool>() { g.inv(&self.tuple[j]) } else { self.tuple[j].clone() };
        self.tuple[i] = if rng.gen::<bool>() {
            g.mul(&self.tuple[i], &tj)
        } else {
            g.mul(&tj, &self.tuple[i])
        };
        self.accumulator = g.mul(&self.accumulator, &self.tuple[i]);
    }

    pub fn sample(&mut self, rng: &mut dyn RngCore) -> ElementString {
        self.step(rng);
        self.accumulator.clone()
    }
}

enum State<'a> {
    Replacer(ProductReplacer<'a>),
    Components(Vec<Sampler<'a>>),
}

/// Random element source for a black box. Direct products are sampled
/// independently per component; everything else by product replacement on
/// the box's generators.
///
/// A sampler owns its own random stream, seeded from the caller's generator
/// at construction, and counts the samples it has produced.
pub struct Sampler<'a> {
    state: State<'a>,
    rng: ChaCha8Rng,
    used: u64,
}

impl<'a> Sampler<'a> {
    pub fn new(group: &'a dyn BlackBoxGroup, rng: &mut dyn RngCore) -> Self {
        Self::with_generators(group, group.generators(), rng)
    }

    /// Product replacement on `gens`, which must lie in `group`.
    pub fn with_generators(group: &'a dyn BlackBoxGroup, gens: &[ElementString], rng: &mut dyn RngCore) -> Self {
        let mut own = ChaCha8Rng::seed_from_u64(rng.next_u64());
        let state = match group.components() {
            Some(parts) if std::ptr::eq(gens, group.generators()) => {
                State::Components(parts.into_iter().map(|c| Sampler::new(c, &mut own)).collect())
            }
            _ => State::Replacer(ProductReplacer::new(group, gens, BURN_IN, &mut own)),
        };
        Sampler { state, rng: own, used: 0 }
    }

    pub fn sample(&mut self) -> ElementString {
        self.used += 1;
        match &mut self.state {
            State::Replacer(pr) => pr.sample(&mut self.rng),
            State::Components(parts) => {
                let xs: Vec<ElementString> = parts.iter_mut().map(|s| s.sample()).collect();
                ElementString::concat(&xs.iter().collect::<Vec<_>>())
            }
        }
    }

    pub fn samples_used(&self) -> u64 {
        self.used
    }

    /// The sampler's own random stream, for auxiliary choices that should
    /// stay reproducible alongside the samples.
    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }
}
