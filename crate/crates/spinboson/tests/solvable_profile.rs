//! A one-state atom couples to the field as a displaced oscillator: the exact
//! ground energy is quadratic in the coupling strength, so every expansion
//! coefficient beyond the second vanishes identically — at any quadrature
//! resolution, since the displacement argument is algebraic in the discretized
//! couplings.  Computing order six on this model drives the complete
//! renormalized stack (linked contractions, insertion subtraction, resolvent
//! compositions) through a case where the answer is known exactly.

use std::sync::Arc;

use spinboson::model::scalar_exp;
use spinboson::renorm::{Engine, RenormConfig};

#[test]
fn one_state_series_terminates_after_second_order() {
    let model = Arc::new(scalar_exp());
    let mut config = RenormConfig::for_model(&model);
    config.n_max = 6;
    config.quadrature = config.quadrature.with_nodes(16);
    let engine = Engine::new(model, config);
    engine.ensure_energies_through(6).unwrap();
    let e2 = engine.energy_coefficient(2).unwrap();
    let e4 = engine.energy_coefficient(4).unwrap();
    let e6 = engine.energy_coefficient(6).unwrap();
    assert!(e2 < -1.0, "second order is a genuine nonzero value, got {e2}");
    assert!(e4.abs() < 1e-10, "fourth order should cancel exactly, got {e4:.3e}");
    assert!(e6.abs() < 1e-9, "sixth order should cancel exactly, got {e6:.3e}");
}
