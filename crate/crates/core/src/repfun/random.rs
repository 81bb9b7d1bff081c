use serde::{Deserialize, Serialize};

use super::{Atom, Form, FunctionSpec, Interval, KTONE_NODE_MARGIN};
use crate::error::Result;
use crate::sampler::{SampleConfig, Sampler};

/// Class a random spec is certified to belong to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertifiedClass {
    Ktone(usize),
    Monotone,
    Decreasing,
    Convex,
}

/// Random spec from the representation family of `class`.
///
/// Weights are log-uniform in `[1e-2, 1]`. Ktone nodes are uniform in
/// `[-1 + 1e-3, 1 - 1e-3]`; nodes on `(0, inf)` are log-uniform in
/// `[1e-2, 1e2]` (`decreasing` and `convex` also allow a node at 0 with
/// probability 1/8). Decreasing specs use `beta = 0`.
pub fn random_certified(class: CertifiedClass, seed: u64, atom_count: usize) -> Result<FunctionSpec> {
    let mut rng = Sampler::new(&SampleConfig::new(1, seed))?;
    let weight = |rng: &mut Sampler| rng.log_uniform(1e-2, 1.0);
    match class {
        CertifiedClass::Ktone(l) => {
            let lim = 1.0 - KTONE_NODE_MARGIN;
            let atoms = (0..atom_count)
                .map(|_| {
                    let w = weight(&mut rng);
                    Atom { weight: w, node: rng.uniform_in(-lim, lim) }
                })
                .collect();
            let deg = (rng.next_u64() % (l as u64 + 1)) as usize;
            let poly = (0..deg).map(|_| rng.normal()).collect();
            FunctionSpec::new(Interval::symmetric_unit(), Form::KtoneRep { order: l.max(1), poly, atoms })
        }
        CertifiedClass::Monotone => {
            let alpha = rng.uniform();
            let beta = rng.uniform();
            let atoms = (0..atom_count)
                .map(|_| {
                    let w = weight(&mut rng);
                    Atom { weight: w, node: rng.log_uniform(1e-2, 1e2) }
                })
                .collect();
            FunctionSpec::new(Interval::positive(), Form::MonotoneRep { alpha, beta, atoms })
        }
        CertifiedClass::Decreasing | CertifiedClass::Convex => {
            let mut atoms = Vec::with_capacity(atom_count);
            for _ in 0..atom_count {
                let w = weight(&mut rng);
                let node = if rng.next_u64() % 8 == 0 { 0.0 } else { rng.log_uniform(1e-2, 1e2) };
                atoms.push(Atom { weight: w, node });
            }
            if class == CertifiedClass::Decreasing {
                let alpha = rng.uniform();
                FunctionSpec::new(Interval::positive(), Form::DecreasingRep { alpha, beta: 0.0, atoms })
            } else {
                let c0 = rng.normal();
                let c1 = rng.normal();
                let gamma = rng.uniform();
                FunctionSpec::new(Interval::positive(), Form::ConvexRep { c0, c1, gamma, atoms })
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn certified_tags() {
        for seed in 0..20 {
            for k in 1..9 {
                let f = random_certified(CertifiedClass::Ktone(k), seed, 3).unwrap();
                assert!(f.is_ktone(k));
                assert!(f.class_tags.node_margin.unwrap() >= 1e-3);
            }
            assert!(random_certified(CertifiedClass::Monotone, seed, 2).unwrap().class_tags.monotone);
            assert!(random_certified(CertifiedClass::Decreasing, seed, 2).unwrap().class_tags.decreasing);
            assert!(random_certified(CertifiedClass::Convex, seed, 2).unwrap().class_tags.convex);
        }
        let lin = random_certified(CertifiedClass::Monotone, 3, 0).unwrap();
        assert!(lin.class_tags.monotone && lin.class_tags.convex);
    }

    #[test]
    fn deterministic() {
        let a = random_certified(CertifiedClass::Ktone(4), 11, 5).unwrap();
        let b = random_certified(CertifiedClass::Ktone(4), 11, 5).unwrap();
        assert_eq!(a, b);
    }
}
