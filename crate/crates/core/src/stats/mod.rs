//! Gaussian reference tools: distribution function and quantile, sample
//! distances, covariance and Cholesky factors, Gaussian maxima.

mod covariance;
mod distance;
mod gaussmax;
mod normal;

pub use covariance::{cholesky, empirical_covariance, CholeskyFactor, CovarianceMatrix};
pub use distance::{kolmogorov_distance, wasserstein1_normal, EmpiricalSample};
pub use gaussmax::{gaussian_max_prob, slepian_rhs, GaussianMaxReport};
pub use normal::{normal_quantile, std_normal_cdf, std_normal_pdf};
