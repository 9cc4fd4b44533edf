#pragma once
#include <optional>
#include <utility>
#include <vector>

#include "crossfv/scheme.hpp"

namespace crossfv {

/// Least-squares exponential fit of a distance series on the natural-log scale.
struct DecayFit {
    double slope = 0;      // per unit time
    double intercept = 0;  // log distance at t = 0
    double t_a = 0;        // fit window
    double t_b = 0;
    double residual_rms = 0;
    int n_samples = 0;
};

/// Analytical decay constants evaluated for one scenario.
struct TheoryReport {
    double c_p = 0;                     // diam(Omega)/pi on convex boxes
    double lambda_over_2cp2 = 0;        // system decay rate lambda/(2 C_P^2)
    double prefactor_general = 1;       // exp(3 ||V||_inf)
    double prefactor_scalar = 1;        // exp(3/2 (V_u - V_l))
    double rate_scalar = 0;             // 1/(2 C_P^2)
    double delta_threshold = 0;         // admissible delta of the system bound
    bool system_bound_applicable = false;  // requires C_P ||grad V||_inf < 1
    double gamma_m = 0;
    double k1 = 0;
    double k2 = 0;
    double k_delta = 0;                 // K(delta) = delta (K1 + K2)
    bool k_condition_met = false;       // K(delta) < 1/2 - d2 max b
    double delta = 0;
    double c_gn = 0;
    double parabolic_norm = 0;          // measured ||h||_Z used in K2
    int dimension = 1;
};

/// Measured inputs for the scalar-branch constants (w = r exp(V) variables).
struct ScalarTheoryInputs {
    double delta = 0;
    double delta2_b_sup = 0;     // d2 * max b
    double w_star_sup = 0;       // ||w*||_inf
    double grad_w_star_sup = 0;  // ||grad w*||_inf
    double grad_b_sup = 0;
    double parabolic_norm = 0;   // L with ||h||_Z <= L
    double c_gn = 1.4142135623730951;  // Ladyzhenskaya constant bound on boxes
    double c_sobolev = 1.0;            // d = 3 branch only
    int dimension = 1;
};

struct StationaryOptions {
    double tol = 1e-10;    // residual ||r^{n+1}-r^n||_L2 / dt
    double t_max = 1000;
    StepControl control;
};

/// Discrete stationary state by time marching from the uniform field of the
/// given mass until the residual drops below tol. Throws numerics_error with
/// the last residual if t_max is reached first.
Field compute_stationary(const ScalarModelParams& p, double mass,
                         const StationaryOptions& opts);
std::vector<Field> compute_stationary_two_species(const TwoSpeciesParams& p, double mass1,
                                                  double mass2,
                                                  const StationaryOptions& opts);

/// L2 norm sqrt(sum_i |C_i| (a_i - b_i)^2); multi-species variant stacks
/// the components.
double l2_distance(const Field& a, const Field& b);
double l2_distance(const std::vector<Field>& a, const std::vector<Field>& b);

/// Fits log(distance) over the window [t_a, t_b]. Default window is
/// [0.1 T, T'] with T' the last time the distance exceeds 1e-10 times the
/// initial one (floating-point floor avoidance); nonpositive samples inside
/// an explicit window shrink it to the last positive prefix. Needs at least
/// 10 samples.
DecayFit fit_decay_rate(const std::vector<std::pair<double, double>>& series,
                        std::optional<std::pair<double, double>> window = std::nullopt);

/// Fills every analytical constant for a scenario. The scalar K-constants
/// are only computed when inputs are provided.
TheoryReport make_theory_report(const TheoryParams& theory,
                                const std::optional<ScalarTheoryInputs>& scalar_inputs);

enum class StationaryKind { scalar, general };

struct DecayBoundCheck {
    bool passed = false;
    double worst_margin = 0;  // min over pairs of log rhs - log lhs
    int n_pairs = 0;
};

/// Checks d(t2) <= prefactor exp(-rate (t2-t1)) d(t1) over all sampled pairs
/// above the floating-point floor; returns the worst log-scale margin.
DecayBoundCheck verify_decay_bound(const std::vector<std::pair<double, double>>& series,
                                   const TheoryReport& report, StationaryKind kind);

} // namespace crossfv
