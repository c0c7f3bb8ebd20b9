//! Special functions: Gamma and its product limit, `l_p` ball volumes, the
//! Beta integral, the Lambert W function and the coupon-collector objective.

pub mod coupon;
pub mod gamma;
mod lambert;
pub mod quad;

pub use coupon::{
    convexity_probe, parse_rational, pn_ie, pn_integral, pn_perm, rational_to_f64, ConvexityProbe,
    CouponInput,
};
pub use gamma::{
    ball_volume, beta_quadrature, gamma, gamma_limit, ln_gamma, log_concavity_check, volume_real,
    LogConcavity,
};
pub use lambert::lambert_w0;
