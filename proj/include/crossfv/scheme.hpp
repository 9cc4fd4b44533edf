#pragma once
#include <optional>
#include <vector>

#include "crossfv/model.hpp"

namespace crossfv {

/// Time-stepped solution state: one Field per species.
struct State {
    double t = 0;
    long step_count = 0;
    std::vector<Field> fields;
};

struct StepControl {
    std::optional<double> dt_fixed;
    double cfl_safety = 0.5;
    double dt_min = 1e-12;  // abort threshold for the rejection cascade
};

/// Upwind finite-volume flux across one interior face,
///   F = r_L [(-dxi)_+ + (1 - d2 b)(-dV)_+] + r_R [(-dxi)_- + (1 - d2 b)(-dV)_-]
///     + d2 b (r_R - r_L) / dx_half,
/// with dxi, dV the face difference quotients and (z)_pm the positive and
/// negative parts. The entropy part and the drift are upwinded; the frozen
/// species contributes a centered diffusion remainder.
double numerical_flux_1d(double r_left, double r_right, double xi_left, double xi_right,
                         double b_face, double V_left, double V_right, double dx_half,
                         const ScalarModelParams& p);

/// Entropy variable per cell, log(r + eps) + d1 r + d3 b.
ArrayXd xi_field(const Field& r, const ScalarModelParams& p);

/// All face fluxes of a 1D state, boundary faces exactly zero (no-flux).
ArrayXd assemble_fluxes_1d(const State& state, const ScalarModelParams& p);

/// One explicit Euler step r^{n+1}_i = r^n_i - (dt/dx_i)(F_{i+1/2} - F_{i-1/2}).
/// Mass is conserved by the telescoping flux differences. Returns nullopt if
/// any cell turns negative (caller halves dt and retries).
std::optional<State> step_explicit(const State& state, double dt, const ScalarModelParams& p);

/// Unsplit 2D step: x-row and y-column fluxes evaluated at time n and
/// combined in a single update; all four boundary sides are no-flux.
std::optional<State> step_2d(const State& state, double dt, const ScalarModelParams& p);

/// Dimension dispatch over the two scalar steppers.
std::optional<State> step_scalar(const State& state, double dt, const ScalarModelParams& p);

/// Two-species step: per species the scalar template with entropy variable
/// xi_i = log(u_i + eps) + d_{i,1} u_i + d_{i,3} u_j, drift velocity
/// (1 - d_{i,2} u_j)(-dV_i) + d_{j,2} u_j (-dV_j), and the centered
/// d_{i,2} u_j remainder; the other species enters faces by arithmetic mean.
/// With D2 = 0 and V2 = 0 the first species reproduces the scalar scheme
/// with b := u2.
std::optional<State> step_two_species(const State& state, double dt,
                                      const TwoSpeciesParams& p);

/// CFL step suggestion: cfl_safety/dim * min over faces of
///   h^2 / (2 (1 + d1 max r + d2 max b) + h |v|),
/// where |v| collects the upwinded entropy and drift face speeds.
/// Throws numerics_error if the result falls below control.dt_min.
double suggest_dt(const State& state, const ScalarModelParams& p, const StepControl& control);
double suggest_dt(const State& state, const TwoSpeciesParams& p, const StepControl& control);

/// One accepted step with rejection cascade: tries min(suggested, dt_cap),
/// halving on a negativity rejection until accepted or dt_min is hit.
struct AdvanceResult {
    State state;
    double dt_used = 0;
    bool had_rejection = false;
};
AdvanceResult advance(const State& state, const ScalarModelParams& p,
                      const StepControl& control, double dt_cap);
AdvanceResult advance(const State& state, const TwoSpeciesParams& p,
                      const StepControl& control, double dt_cap);

} // namespace crossfv
