//! Closed-form analytics of the giant atom: coupling function, self-energy,
//! BIC design, out-of-band bound states and residue dynamics.

mod boc;
mod design;
mod residue;
mod self_energy;

pub use boc::{
    boc_edge_offset, boc_emitter_probability_asymptotic, bound_state_weight, find_boc_energy,
    predict_boc, BocPrediction,
};
pub use design::{
    continuous_waveguide_comparison, design_oscillating_bic, emitter_probability_bic,
    emitter_probability_bic_asymptotic, emitter_probability_bic_limit,
    emitter_probability_mod4_two_limit, non_markovianity, non_markovianity_asymptotic,
    non_markovianity_limit, verify_m2_no_oscillation, BicDesign, ContinuousComparison,
    DesignBranch, TwoPointReport,
};
pub use residue::{residue_prediction, ResiduePredictor};
pub use self_energy::{
    g_abs_sq, pole_weight, self_energy, self_energy_derivative, self_energy_on_branch,
    zero_coupling_momenta, SelfEnergyBranch, SelfEnergyMode, ZeroCouplingMomentum,
};
