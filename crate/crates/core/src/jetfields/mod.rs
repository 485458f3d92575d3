//! Differential forms with exact 2-jet coefficients on coordinate charts.

mod chart;
mod form;
mod jet;
mod quadrature;

pub use chart::{Chart, ChartKind};
pub use form::{
    eval_form, ext_d, ext_d_at, mask_indices, mask_position, multi_indices, shuffle_sign, wedge_at,
    wedge_bilinear, wedge_bracket, wedge_pair, Bilinear, FormJet, LinearMap, ValueSpace,
    ValuedForm,
};
pub use jet::{make_trig_field, Jet, Jet2Scalar, TrigTerm, MAX_DIM};
pub use quadrature::{integrate_abs, integrate_top, pairwise_sum, sample_grid, QuadratureGrid};
