#pragma once

#include "ferrospin/model.hpp"

#include <vector>

namespace ferrospin {

// Potential phi(x) = min{1 / (x log(lambda/x)), 1/t} on [0, lambda) and the
// constants that certify contraction of the tree recursion.
struct PotentialParams {
    double beta = 1.0;
    double gamma = 1.0;
    double lambda = 1.0;
    double lambda_c = 1.0;
    double x0 = 0.0;
    double alpha = 0.0;
    double t = 0.0;
    bool constant = false; // t >= lambda/e, so phi = 1/t everywhere
    double x1 = 0.0;       // roots of x log(lambda/x) = t when not constant
    double x2 = 0.0;
    double c_min = 0.0;
    double c_max = 0.0;
};

// Needs lambda_bound < lambda_c; throws RegimeError otherwise.
PotentialParams derive_potential(const ParamClass& pc);

double phi(const PotentialParams& pp, double x);
// Integral of phi over [0, x] by adaptive Simpson (relative tolerance 1e-10 per piece).
double big_phi(const PotentialParams& pp, double x);

// g_{lambda,e}(x) for an edge with parameters (beta_e, gamma_e).
double g_edge(double lambda, double beta_e, double gamma_e, double x);

// F_u(x) = lambda_u prod (beta_i x_i + 1) / (x_i + gamma_i).
double recursion_value(double lambda_u, const std::vector<double>& x, const std::vector<double>& beta,
                       const std::vector<double>& gamma);
// |dF_u / dx_i|.
double recursion_partial(double lambda_u, const std::vector<double>& x, const std::vector<double>& beta,
                         const std::vector<double>& gamma, std::size_t i);

// phi(F_u(x)) |dF_u/dx_i| / phi(x_i).
double decay_term(const PotentialParams& pp, double lambda_u, const std::vector<double>& x,
                  const std::vector<double>& beta, const std::vector<double>& gamma, std::size_t i);
// C_{phi,d}(x) = sum_i decay_term(i).
double decay_factor(const PotentialParams& pp, double lambda_u, const std::vector<double>& x,
                    const std::vector<double>& beta, const std::vector<double>& gamma);

// (c_max / c_min) (beta gamma - 1) / gamma^2.
double trivial_constant(const PotentialParams& pp);
// C_trl lambda_u ((beta lambda + 1) / (lambda + gamma))^(d-1).
double trivial_term_bound(const PotentialParams& pp, double lambda_u, std::size_t d);

} // namespace ferrospin
