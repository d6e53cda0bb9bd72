//! Post-hoc probability calibration: Platt scaling, SURE minimization under
//! a mean constraint with sigmoid or Kumaraswamy maps, and two-stage stacks.

mod calibrator;
mod maps;
mod platt;
mod sure;

pub use calibrator::{
    apply_calibrator, fit_calibrator, read_calibrated_csv, stack_fit, write_calibrated_csv,
    CalibFunctionKind, CalibratedRows, CalibrationConfig, CalibrationMethod, Calibrator,
    CalibratorParams, FitDiagnostics, StackedCalibrator,
};
pub use maps::{
    kumaraswamy_apply, kumaraswamy_derivatives, sigmoid_apply, sigmoid_derivatives,
    DerivativeBundle, Family, KUMARASWAMY_DELTA,
};
pub use platt::{platt_fit, PlattConfig, PlattFit};
pub use sure::{
    constraint_value, estimate_noise_variance, penalty_gradient, penalty_value, sure_fit,
    sure_loss, SureFit, SureSolverConfig, SIGMA2_FLOOR,
};
