use crate::error::{Error, Result};
use crate::graph::{GraphPoint, NodeId};
use crate::par;
use crate::smoothing::{lift_morphism, shift_morphism, Morphism};

use super::existence::{Probe, Side, Witness};

/// First node where a lifted composition misses the 2ε shift, checking
/// ψ^ε ∘ φ on T1 and then φ^ε ∘ ψ on T2.
///
/// On trees two function-preserving maps agreeing on nodes agree on each
/// edge, since the edge's image is the unique path between the images of
/// its endpoints. Node images therefore decide equality.
pub(crate) fn failure(probe: &Probe, phi: &Morphism, psi: &Morphism) -> Result<Option<Witness>> {
    for (side, first, second) in [(Side::Forward, phi, psi), (Side::Backward, psi, phi)] {
        let (d, c) = match side {
            Side::Forward => (0, 1),
            Side::Backward => (1, 0),
        };
        let domain = probe.tree(d);
        let nodes: Vec<NodeId> = domain.nodes().collect();
        let checks = par::map(probe.mode(), &nodes, |&v| -> Result<bool> {
            let (x, t) = probe.once(c).representative(first.node_image(v))?;
            let lhs = probe.twice(d).projection(second.eval(x), t)?;
            let rhs = probe.twice(d).shift_eta(probe.once(d).shift_eta(GraphPoint::Node(v))?)?;
            Ok(lhs == rhs)
        });
        for (v, ok) in nodes.iter().zip(checks) {
            if !ok? {
                return Ok(Some(Witness::Commutativity { side, node: *v }));
            }
        }
    }
    Ok(None)
}

/// Whether ψ^ε ∘ φ = η1^{2ε} and φ^ε ∘ ψ = η2^{2ε}.
pub fn check_commutativity(probe: &Probe, phi: &Morphism, psi: &Morphism) -> Result<bool> {
    check_maps(probe, phi, psi)?;
    Ok(failure(probe, phi, psi)?.is_none())
}

fn check_maps(probe: &Probe, phi: &Morphism, psi: &Morphism) -> Result<()> {
    let fits = |m: &Morphism, d: usize, c: usize| {
        m.domain().as_ref() == probe.tree(d).as_ref() && m.codomain().as_ref() == probe.once(c).graph()
    };
    if fits(phi, 0, 1) && fits(psi, 1, 0) {
        Ok(())
    } else {
        Err(Error::Morphism("maps do not match the probe's trees and smoothings".into()))
    }
}

/// Re-checks a labeled ε-interleaving through the generic morphism
/// machinery: lifts both maps, composes them, compares with the composed
/// shifts, and tests every label's image against its path neighborhood.
pub fn verify_interleaving(probe: &Probe, phi: &Morphism, psi: &Morphism) -> Result<bool> {
    check_maps(probe, phi, psi)?;
    for (first, second, d, c) in [(phi, psi, 0, 1), (psi, phi, 1, 0)] {
        // lift `second`: T_c^ε → T_d^{2ε}
        let lifted = lift_morphism(second, probe.once(c), probe.twice(d))?;
        let composed = first.compose(&lifted)?;
        let shift_once = shift_morphism(probe.once(d))?;
        let shift_again = shift_morphism(probe.twice(d))?;
        if !composed.agrees_with(&shift_once.compose(&shift_again)?) {
            return Ok(false);
        }
        // label condition for `first`: first^ε(s(v)) ∈ P^ε(s(v′))
        let first_lifted = lift_morphism(first, probe.once(d), probe.twice(c))?;
        for (label, v) in probe.labeling(d).iter() {
            let partner = probe.labeling(c).node(label);
            let image = first_lifted.eval(probe.once(d).correspondence(v));
            if !probe.twice(c).on_path_neighborhood(probe.once(c).correspondence(partner), image)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
