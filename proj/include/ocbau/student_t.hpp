#pragma once

#include <cmath>
#include <stdexcept>

#include <boost/math/distributions/students_t.hpp>

namespace ocbau {

inline double student_t_pdf(double nu, double z) {
    return boost::math::pdf(boost::math::students_t_distribution<double>(nu), z);
}

inline double student_t_cdf(double nu, double z) {
    return boost::math::cdf(boost::math::students_t_distribution<double>(nu), z);
}

/// Student-t expected-improvement kernel: for T ~ t_nu,
///   psi_nu(z) = E[max(T - z, 0)] = ((nu + z^2)/(nu - 1)) f_nu(z) - z (1 - F_nu(z)).
/// Finite only for nu > 1.
inline double ei_psi(double nu, double z) {
    if (!(nu > 1.0)) throw std::domain_error("ei_psi requires nu > 1");
    return (nu + z * z) / (nu - 1.0) * student_t_pdf(nu, z) - z * (1.0 - student_t_cdf(nu, z));
}

inline double normal_pdf(double z) {
    return std::exp(-0.5 * z * z) * 0.39894228040143267793994605993438;
}

inline double normal_cdf(double z) {
    return 0.5 * std::erfc(-z * 0.70710678118654752440084436210485);
}

/// Gaussian limit of ei_psi as nu -> infinity.
inline double ei_psi_gaussian(double z) { return normal_pdf(z) - z * (1.0 - normal_cdf(z)); }

} // namespace ocbau
