//! Network models `w = G w + R r + F e`, their validation, open-loop
//! responses, spectra and numeric equivalence checks.

pub mod io;
mod model;
mod response;
mod validate;

pub use model::{CovarianceMatrix, Labels, NetworkModel, NoiseRep, SelectionMatrix};
pub use response::{
    check_abstraction, check_equivalence, exact_response_matches, noise_spectrum_at, open_loop_response,
    response_at, FrequencyGrid, DEFAULT_GRID_SIZE, DEFAULT_TOLERANCE, POLE_RETRIES,
};
pub use validate::{validate_model, ClauseResult, ValidationReport};
