#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cuspflow {

enum class ProfileFamily { poly_bump, zero };

std::string_view family_name(ProfileFamily f);
ProfileFamily family_from_name(std::string_view name);

/// Eulerian initial datum theta0: nonnegative, nonincreasing, compactly
/// supported on [0, R], with closed-form derivatives. The one admitted
/// exception is the `zero` family (theta0 == 0), a degenerate stationary
/// profile kept for diagnostics; it has no nondegenerate maximum and is
/// rejected by the certified pipeline.
struct InitialProfile {
    ProfileFamily family = ProfileFamily::poly_bump;
    std::vector<double> params; // poly_bump: {power}
    double support_radius = 1.0;

    double theta(double y) const;
    double theta_prime(double y) const;
    double theta_second(double y) const;
    /// theta(0) - theta(y), evaluated cancellation-free.
    double theta_drop(double y) const;
    double theta0() const { return theta(0.0); }
};

/// Lagrangian forcing g(z) = theta0(eps0 * z); supp g = [0, a], a = R/eps0.
struct Forcing {
    InitialProfile profile;
    double eps0 = 1.0;
    double a = 1.0;

    double g(double z) const { return profile.theta(eps0 * z); }
    double g_prime(double z) const { return eps0 * profile.theta_prime(eps0 * z); }
    double g_second(double z) const { return eps0 * eps0 * profile.theta_second(eps0 * z); }
    double g_drop(double z) const { return profile.theta_drop(eps0 * z); }
    double g0() const { return profile.theta0(); }
};

/// Quadratic envelope of -g': eps0^2 K0 z <= -g'(z) <= eps0^2 K1 z on [0, 1].
struct KBounds {
    double k0 = 0.0;
    double k1 = 0.0;
    double sample_tolerance = 0.0; // bound on the sampling error of k0/k1
};

/// Validates the family invariants on a dense grid and via the closed-form
/// derivatives; throws profile_error naming the violated check.
InitialProfile build_profile(ProfileFamily family, std::span<const double> params,
                             double support_radius);
InitialProfile build_profile(std::string_view family, std::span<const double> params,
                             double support_radius);

/// Requires 0 < eps0 <= 1.
Forcing build_forcing(const InitialProfile& profile, double eps0);

/// K0 = inf, K1 = sup of -g'(z)/(eps0^2 z) over z in (0, 1], sampled densely
/// and joined with the z->0 limit -theta0''(0). Throws infeasible_error when
/// the infimum is not positive (eps0 too large for the envelope to hold).
KBounds fit_k_bounds(const Forcing& forcing);

} // namespace cuspflow
