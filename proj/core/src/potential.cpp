#include "ferrospin/potential.hpp"

#include "ferrospin/errors.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace ferrospin {

namespace {

constexpr double kE = 2.718281828459045235360287;

// Root of f on [lo, hi] given f(lo) and f(hi) of opposite sign; returns the
// endpoint on the side where f has the sign of f(lo).
double bisect(const std::function<double(double)>& f, double lo, double hi) {
    const bool lo_neg = f(lo) < 0.0;
    for (int i = 0; i < 400; ++i) {
        // Geometric steps while the bracket spans orders of magnitude.
        const double mid = (lo > 0.0 && hi > 4.0 * lo) ? std::sqrt(lo) * std::sqrt(hi) : 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if ((f(mid) < 0.0) == lo_neg) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return lo;
}

double simpson(double a, double fa, double b, double fb, double fm) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double fa, double b, double fb,
                        double m, double fm, double whole, double tol, int depth) {
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = simpson(a, fa, m, fm, flm);
    const double right = simpson(m, fm, b, fb, frm);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol * std::max(1.0, std::abs(left + right))) return left + right + delta / 15.0;
    return adaptive_simpson(f, a, fa, m, fm, lm, flm, left, tol, depth - 1) +
           adaptive_simpson(f, m, fm, b, fb, rm, frm, right, tol, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
    if (b <= a) return 0.0;
    const double m = 0.5 * (a + b);
    const double fa = f(a);
    const double fb = f(b);
    const double fm = f(m);
    return adaptive_simpson(f, a, fa, b, fb, m, fm, simpson(a, fa, b, fb, fm), tol, 60);
}

double golden_max(const std::function<double(double)>& f, double lo, double hi) {
    const double r = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo;
    double b = hi;
    double c = b - r * (b - a);
    double d = a + r * (b - a);
    for (int i = 0; i < 200 && b - a > 1e-15 * hi; ++i) {
        if (f(c) > f(d)) {
            b = d;
        } else {
            a = c;
        }
        c = b - r * (b - a);
        d = a + r * (b - a);
    }
    return f(0.5 * (a + b));
}

} // namespace

PotentialParams derive_potential(const ParamClass& pc) {
    pc.validate();
    PotentialParams pp;
    pp.beta = pc.beta;
    pp.gamma = pc.gamma;
    pp.lambda = pc.lambda_bound;
    pp.lambda_c = lambda_c(pc);
    if (!(pp.lambda < pp.lambda_c)) {
        throw RegimeError("lambda bound " + std::to_string(pp.lambda) + " is not below lambda_c " +
                          std::to_string(pp.lambda_c));
    }
    const double b = pp.beta;
    const double g = pp.gamma;
    const double lam = pp.lambda;
    const double denom = std::log1p((g - 1.0) / (lam + 1.0));
    const double log_lam = std::log(lam);
    auto xlog = [&](double x) { return x * (log_lam - std::log(x)); };
    auto h = [&](double x) { return (b * g - 1.0) * xlog(x) / denom; };

    double ratio = 0.0;
    if (h(lam / kE) <= 0.5) {
        // The bound holds on all of (0, lambda); take the supremum.
        pp.x0 = lam;
    } else {
        pp.x0 = bisect([&](double x) { return h(x) - 0.5; }, 1e-300, lam / kE);
        ratio = (std::log(lam) - std::log(pp.x0)) / (std::log(pp.lambda_c) - std::log(pp.x0));
    }
    pp.alpha = 1.0 - std::max(0.5, ratio);
    pp.t = (1.0 - pp.alpha) * g / (b * g - 1.0) * std::log((lam + g) / (b * lam + 1.0));

    pp.constant = pp.t >= lam / kE;
    if (!pp.constant) {
        auto s = [&](double x) { return xlog(x) - pp.t; };
        pp.x1 = bisect(s, 1e-300, lam / kE);
        pp.x2 = bisect(s, lam / kE, lam);
    }
    const double peak = golden_max(xlog, 0.0, lam);
    pp.c_max = 1.0 / pp.t;
    pp.c_min = std::min(1.0 / pp.t, 1.0 / peak);
    return pp;
}

double phi(const PotentialParams& pp, double x) {
    if (!(x >= 0.0 && x < pp.lambda)) throw InputError("phi is defined on [0, lambda)");
    if (x == 0.0) return 1.0 / pp.t;
    return std::min(1.0 / (x * (std::log(pp.lambda) - std::log(x))), 1.0 / pp.t);
}

double big_phi(const PotentialParams& pp, double x) {
    if (!(x >= 0.0 && x < pp.lambda)) throw InputError("Phi is defined on [0, lambda)");
    auto f = [&](double y) { return phi(pp, y); };
    // Split at the kinks so each piece is smooth.
    std::vector<double> cuts{0.0};
    if (!pp.constant) {
        if (pp.x1 < x) cuts.push_back(pp.x1);
        if (pp.x2 < x) cuts.push_back(pp.x2);
    }
    cuts.push_back(x);
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) total += integrate(f, cuts[i], cuts[i + 1], 1e-10);
    return total;
}

double g_edge(double lambda, double beta_e, double gamma_e, double x) {
    if (!(x > 0.0 && x < lambda)) throw InputError("g is evaluated on (0, lambda)");
    const double num = (beta_e * gamma_e - 1.0) * x * std::log(lambda / x);
    const double den = (beta_e * x + 1.0) * (x + gamma_e) * std::log((x + gamma_e) / (beta_e * x + 1.0));
    return num / den;
}

double recursion_value(double lambda_u, const std::vector<double>& x, const std::vector<double>& beta,
                       const std::vector<double>& gamma) {
    if (x.size() != beta.size() || x.size() != gamma.size()) throw InputError("child vectors differ in length");
    double f = lambda_u;
    for (std::size_t i = 0; i < x.size(); ++i) f *= (beta[i] * x[i] + 1.0) / (x[i] + gamma[i]);
    return f;
}

double recursion_partial(double lambda_u, const std::vector<double>& x, const std::vector<double>& beta,
                         const std::vector<double>& gamma, std::size_t i) {
    const double f = recursion_value(lambda_u, x, beta, gamma);
    return f * std::abs(beta[i] * gamma[i] - 1.0) / ((beta[i] * x[i] + 1.0) * (x[i] + gamma[i]));
}

double decay_term(const PotentialParams& pp, double lambda_u, const std::vector<double>& x,
                  const std::vector<double>& beta, const std::vector<double>& gamma, std::size_t i) {
    const double f = recursion_value(lambda_u, x, beta, gamma);
    return phi(pp, f) * recursion_partial(lambda_u, x, beta, gamma, i) / phi(pp, x[i]);
}

double decay_factor(const PotentialParams& pp, double lambda_u, const std::vector<double>& x,
                    const std::vector<double>& beta, const std::vector<double>& gamma) {
    double c = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) c += decay_term(pp, lambda_u, x, beta, gamma, i);
    return c;
}

double trivial_constant(const PotentialParams& pp) {
    return pp.c_max / pp.c_min * (pp.beta * pp.gamma - 1.0) / (pp.gamma * pp.gamma);
}

double trivial_term_bound(const PotentialParams& pp, double lambda_u, std::size_t d) {
    if (d == 0) throw InputError("degree must be positive");
    const double base = (pp.beta * pp.lambda + 1.0) / (pp.lambda + pp.gamma);
    return trivial_constant(pp) * lambda_u * std::pow(base, static_cast<double>(d - 1));
}

} // namespace ferrospin
