#include "cuspflow/profile.hpp"

#include "cuspflow/errors.hpp"

#include <cmath>
#include <limits>

namespace cuspflow {

std::string_view family_name(ProfileFamily f) {
    switch (f) {
    case ProfileFamily::poly_bump: return "poly-bump";
    case ProfileFamily::zero: return "zero";
    }
    return "?";
}

ProfileFamily family_from_name(std::string_view name) {
    if (name == "poly-bump") return ProfileFamily::poly_bump;
    if (name == "zero") return ProfileFamily::zero;
    throw config_error("unknown profile family: " + std::string(name));
}

namespace {

int bump_power(const InitialProfile& p) {
    return static_cast<int>(p.params.at(0));
}

} // namespace

// poly-bump: theta0(y) = (1 - (y/R)^2)^p on [0, R], zero beyond.
double InitialProfile::theta(double y) const {
    if (family == ProfileFamily::zero) return 0.0;
    const double R = support_radius;
    if (y >= R) return 0.0;
    const double u = 1.0 - (y / R) * (y / R);
    return std::pow(u, bump_power(*this));
}

double InitialProfile::theta_prime(double y) const {
    if (family == ProfileFamily::zero) return 0.0;
    const double R = support_radius;
    if (y >= R) return 0.0;
    const int p = bump_power(*this);
    const double u = 1.0 - (y / R) * (y / R);
    return p * std::pow(u, p - 1) * (-2.0 * y / (R * R));
}

double InitialProfile::theta_second(double y) const {
    if (family == ProfileFamily::zero) return 0.0;
    const double R = support_radius;
    if (y >= R) return 0.0;
    const int p = bump_power(*this);
    const double u = 1.0 - (y / R) * (y / R);
    const double du = -2.0 * y / (R * R);
    const double ddu = -2.0 / (R * R);
    return p * (p - 1) * std::pow(u, p - 2) * du * du + p * std::pow(u, p - 1) * ddu;
}

double InitialProfile::theta_drop(double y) const {
    if (family == ProfileFamily::zero) return 0.0;
    const double R = support_radius;
    if (y >= R) return theta0();
    const int p = bump_power(*this);
    // 1 - (1-v)^p = v * sum_{j<p} (1-v)^j with v = (y/R)^2; no cancellation.
    const double v = (y / R) * (y / R);
    const double w = 1.0 - v;
    double s = 0.0, wj = 1.0;
    for (int j = 0; j < p; ++j) {
        s += wj;
        wj *= w;
    }
    return v * s;
}

InitialProfile build_profile(ProfileFamily family, std::span<const double> params,
                             double support_radius) {
    if (!(support_radius > 0.0)) {
        throw profile_error("support-radius", "support radius must be positive");
    }
    InitialProfile p;
    p.family = family;
    p.params.assign(params.begin(), params.end());
    p.support_radius = support_radius;

    if (family == ProfileFamily::zero) {
        if (!params.empty()) throw profile_error("params", "zero family takes no parameters");
        return p;
    }

    if (params.size() != 1) {
        throw profile_error("params", "poly-bump takes exactly one parameter (the power)");
    }
    const double pw = params[0];
    if (pw != std::floor(pw) || pw < 1.0 || pw > 64.0) {
        throw profile_error("params", "poly-bump power must be an integer in [1, 64]");
    }

    const double R = p.support_radius;
    // Smoothness across the support edge: theta0'(R) = theta0''(R) = 0.
    if (std::fabs(p.theta_prime(R * (1.0 - 1e-13))) > 1e-9 ||
        std::fabs(p.theta_second(R * (1.0 - 1e-13))) > 1e-6) {
        throw profile_error("support-edge-smoothness",
                            "profile is not C^2 across the support edge y = R");
    }
    if (p.theta_prime(0.0) != 0.0) {
        throw profile_error("flat-at-origin", "theta0'(0) must vanish");
    }
    if (!(p.theta_second(0.0) < 0.0)) {
        throw profile_error("nondegenerate-maximum", "theta0''(0) must be negative");
    }
    // Dense re-verification of nonnegativity and monotonicity.
    constexpr int samples = 4096;
    for (int i = 0; i <= samples; ++i) {
        const double y = R * static_cast<double>(i) / samples;
        if (p.theta(y) < 0.0) throw profile_error("nonnegativity", "theta0 takes a negative value");
        if (p.theta_prime(y) > 1e-14) {
            throw profile_error("monotonicity", "theta0 is not nonincreasing");
        }
    }
    return p;
}

InitialProfile build_profile(std::string_view family, std::span<const double> params,
                             double support_radius) {
    return build_profile(family_from_name(family), params, support_radius);
}

Forcing build_forcing(const InitialProfile& profile, double eps0) {
    if (!(eps0 > 0.0) || eps0 > 1.0) {
        throw config_error("eps0 must lie in (0, 1]");
    }
    Forcing f;
    f.profile = profile;
    f.eps0 = eps0;
    f.a = profile.support_radius / eps0;
    return f;
}

KBounds fit_k_bounds(const Forcing& forcing) {
    const double e2 = forcing.eps0 * forcing.eps0;
    // Ratio rho(z) = -g'(z) / (eps0^2 z) on (0, 1]; limit at z->0 is -theta0''(0).
    const double limit0 = -forcing.profile.theta_second(0.0);
    constexpr int samples = 10000;
    double lo = limit0, hi = limit0;
    double max_slope = 0.0, prev = limit0;
    for (int i = 1; i <= samples; ++i) {
        const double z = static_cast<double>(i) / samples;
        const double rho = -forcing.g_prime(z) / (e2 * z);
        lo = std::min(lo, rho);
        hi = std::max(hi, rho);
        max_slope = std::max(max_slope, std::fabs(rho - prev) * samples);
        prev = rho;
    }
    if (!(lo > 0.0)) {
        throw infeasible_error("quadratic envelope infeasible on [0,1]: inf of -g'(z)/(eps0^2 z) "
                               "is not positive (eps0 too large for this profile)");
    }
    KBounds kb;
    kb.k0 = lo;
    kb.k1 = hi;
    kb.sample_tolerance = 0.5 * max_slope / samples;
    return kb;
}

} // namespace cuspflow
