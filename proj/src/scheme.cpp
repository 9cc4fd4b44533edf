#include "crossfv/scheme.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "crossfv/errors.hpp"

namespace crossfv {

namespace {

inline double pos(double z) { return z > 0 ? z : 0.0; }
inline double neg(double z) { return z < 0 ? z : 0.0; }

void require_species(const State& s, std::size_t n, const char* who) {
    if (s.fields.size() != n)
        throw std::invalid_argument(std::string(who) + ": wrong number of species fields");
}

// Divergence (F_{i+1/2} - F_{i-1/2})/dx_i accumulated over directions.
ArrayXd scalar_divergence(const State& state, const ScalarModelParams& p) {
    const Field& r = state.fields[0];
    const Grid& g = r.grid;
    const ArrayXd xi_arr = xi_field(r, p);
    ArrayXd div = ArrayXd::Zero(g.n_cells());

    if (g.dim() == 1) {
        const ArrayXd flux = assemble_fluxes_1d(state, p);
        const Grid1D& ax = g.x();
        for (Index i = 0; i < ax.n(); ++i)
            div(i) = (flux(i + 1) - flux(i)) / ax.dx(i);
        return div;
    }

    const Grid1D& ax = g.x();
    const Grid1D& ay = g.y();
    const Index ny = ay.n();
    for (Index fi = 0; fi + 1 < ax.n(); ++fi) {
        const double h = ax.dx_half(fi);
        for (Index j = 0; j < ny; ++j) {
            const Index L = g.index(fi, j), R = g.index(fi + 1, j);
            const double F = numerical_flux_1d(r.values(L), r.values(R), xi_arr(L),
                                               xi_arr(R), p.b_face_x(fi * ny + j),
                                               p.V.values(L), p.V.values(R), h, p);
            div(L) += F / ax.dx(fi);
            div(R) -= F / ax.dx(fi + 1);
        }
    }
    for (Index i = 0; i < ax.n(); ++i) {
        for (Index fj = 0; fj + 1 < ny; ++fj) {
            const double h = ay.dx_half(fj);
            const Index L = g.index(i, fj), R = g.index(i, fj + 1);
            const double F = numerical_flux_1d(r.values(L), r.values(R), xi_arr(L),
                                               xi_arr(R), p.b_face_y(i * (ny - 1) + fj),
                                               p.V.values(L), p.V.values(R), h, p);
            div(L) += F / ay.dx(fj);
            div(R) -= F / ay.dx(fj + 1);
        }
    }
    return div;
}

std::optional<State> apply_update(const State& state, double dt,
                                  const std::vector<ArrayXd>& divs) {
    State next;
    next.t = state.t + dt;
    next.step_count = state.step_count + 1;
    next.fields.reserve(state.fields.size());
    for (std::size_t k = 0; k < state.fields.size(); ++k) {
        ArrayXd v = state.fields[k].values - dt * divs[k];
        if (!v.allFinite())
            throw numerics_error("time step produced non-finite values");
        if ((v < 0).any())
            return std::nullopt;
        next.fields.push_back(Field{state.fields[k].grid, std::move(v)});
    }
    return next;
}

// Per-species entropy variables of the two-species model; same expression
// shape as xi_field so the frozen-species reduction is exact.
std::pair<ArrayXd, ArrayXd> two_species_xi(const Field& u1, const Field& u2,
                                           const TwoSpeciesParams& p) {
    ArrayXd xi1 = (u1.values + p.epsilon).log() + p.d11 * u1.values + p.d13 * u2.values;
    ArrayXd xi2 = (u2.values + p.epsilon).log() + p.d21 * u2.values + p.d23 * u1.values;
    return {std::move(xi1), std::move(xi2)};
}

struct TwoSpeciesFaceFlux {
    double F1;
    double F2;
};

inline TwoSpeciesFaceFlux two_species_flux(double u1L, double u1R, double u2L, double u2R,
                                           double xi1L, double xi1R, double xi2L,
                                           double xi2R, double dV1, double dV2, double h,
                                           const TwoSpeciesParams& p) {
    const double u1f = 0.5 * (u1L + u1R);
    const double u2f = 0.5 * (u2L + u2R);
    const double dxi1 = (xi1R - xi1L) / h;
    const double dxi2 = (xi2R - xi2L) / h;
    const double w1 = (1.0 - p.d12 * u2f) * (-dV1) + p.d22 * u2f * (-dV2);
    const double w2 = (1.0 - p.d22 * u1f) * (-dV2) + p.d12 * u1f * (-dV1);
    const double F1 = p.D1 * (u1L * (pos(-dxi1) + pos(w1)) + u1R * (neg(-dxi1) + neg(w1)) +
                              p.d12 * u2f * (u1R - u1L) / h);
    const double F2 = p.D2 * (u2L * (pos(-dxi2) + pos(w2)) + u2R * (neg(-dxi2) + neg(w2)) +
                              p.d22 * u1f * (u2R - u2L) / h);
    return {F1, F2};
}

std::pair<ArrayXd, ArrayXd> two_species_divergence(const State& state,
                                                   const TwoSpeciesParams& p) {
    const Field& u1 = state.fields[0];
    const Field& u2 = state.fields[1];
    const Grid& g = u1.grid;
    auto [xi1, xi2] = two_species_xi(u1, u2, p);
    ArrayXd div1 = ArrayXd::Zero(g.n_cells());
    ArrayXd div2 = ArrayXd::Zero(g.n_cells());

    const Grid1D& ax = g.x();
    if (g.dim() == 1) {
        ArrayXd f1 = ArrayXd::Zero(ax.n() + 1);  // no-flux boundaries
        ArrayXd f2 = ArrayXd::Zero(ax.n() + 1);
        for (Index i = 0; i + 1 < ax.n(); ++i) {
            const auto F = two_species_flux(u1.values(i), u1.values(i + 1), u2.values(i),
                                            u2.values(i + 1), xi1(i), xi1(i + 1), xi2(i),
                                            xi2(i + 1), p.grad_V1_x(i), p.grad_V2_x(i),
                                            ax.dx_half(i), p);
            f1(i + 1) = F.F1;
            f2(i + 1) = F.F2;
        }
        for (Index i = 0; i < ax.n(); ++i) {
            div1(i) = (f1(i + 1) - f1(i)) / ax.dx(i);
            div2(i) = (f2(i + 1) - f2(i)) / ax.dx(i);
        }
        return {std::move(div1), std::move(div2)};
    }

    const Grid1D& ay = g.y();
    const Index ny = ay.n();
    for (Index fi = 0; fi + 1 < ax.n(); ++fi) {
        const double h = ax.dx_half(fi);
        for (Index j = 0; j < ny; ++j) {
            const Index L = g.index(fi, j), R = g.index(fi + 1, j);
            const Index f = fi * ny + j;
            const auto F = two_species_flux(u1.values(L), u1.values(R), u2.values(L),
                                            u2.values(R), xi1(L), xi1(R), xi2(L), xi2(R),
                                            p.grad_V1_x(f), p.grad_V2_x(f), h, p);
            div1(L) += F.F1 / ax.dx(fi);
            div1(R) -= F.F1 / ax.dx(fi + 1);
            div2(L) += F.F2 / ax.dx(fi);
            div2(R) -= F.F2 / ax.dx(fi + 1);
        }
    }
    for (Index i = 0; i < ax.n(); ++i) {
        for (Index fj = 0; fj + 1 < ny; ++fj) {
            const double h = ay.dx_half(fj);
            const Index L = g.index(i, fj), R = g.index(i, fj + 1);
            const Index f = i * (ny - 1) + fj;
            const auto F = two_species_flux(u1.values(L), u1.values(R), u2.values(L),
                                            u2.values(R), xi1(L), xi1(R), xi2(L), xi2(R),
                                            p.grad_V1_y(f), p.grad_V2_y(f), h, p);
            div1(L) += F.F1 / ay.dx(fj);
            div1(R) -= F.F1 / ay.dx(fj + 1);
            div2(L) += F.F2 / ay.dx(fj);
            div2(R) -= F.F2 / ay.dx(fj + 1);
        }
    }
    return {std::move(div1), std::move(div2)};
}

} // namespace

double numerical_flux_1d(double r_left, double r_right, double xi_left, double xi_right,
                         double b_face, double V_left, double V_right, double dx_half,
                         const ScalarModelParams& p) {
    const double dxi = (xi_right - xi_left) / dx_half;
    const double dv = (V_right - V_left) / dx_half;
    const double k = 1.0 - p.delta2 * b_face;
    return r_left * (pos(-dxi) + k * pos(-dv)) + r_right * (neg(-dxi) + k * neg(-dv)) +
           p.delta2 * b_face * (r_right - r_left) / dx_half;
}

ArrayXd xi_field(const Field& r, const ScalarModelParams& p) {
    return ((r.values + p.epsilon).log() + p.delta1 * r.values + p.delta3 * p.b.values)
        .eval();
}

ArrayXd assemble_fluxes_1d(const State& state, const ScalarModelParams& p) {
    require_species(state, 1, "assemble_fluxes_1d");
    const Field& r = state.fields[0];
    if (r.grid.dim() != 1)
        throw std::invalid_argument("assemble_fluxes_1d: 1D states only");
    const Grid1D& ax = r.grid.x();
    const ArrayXd xi_arr = xi_field(r, p);
    ArrayXd flux = ArrayXd::Zero(ax.n() + 1);  // F_{1/2} = F_{N+1/2} = 0
    for (Index i = 0; i + 1 < ax.n(); ++i)
        flux(i + 1) = numerical_flux_1d(r.values(i), r.values(i + 1), xi_arr(i),
                                        xi_arr(i + 1), p.b_face_x(i), p.V.values(i),
                                        p.V.values(i + 1), ax.dx_half(i), p);
    return flux;
}

std::optional<State> step_explicit(const State& state, double dt,
                                   const ScalarModelParams& p) {
    require_species(state, 1, "step_explicit");
    if (!(dt > 0)) throw std::invalid_argument("step_explicit: dt must be > 0");
    if (state.fields[0].grid.dim() != 1)
        throw std::invalid_argument("step_explicit: 1D states only (use step_2d)");
    return apply_update(state, dt, {scalar_divergence(state, p)});
}

std::optional<State> step_2d(const State& state, double dt, const ScalarModelParams& p) {
    require_species(state, 1, "step_2d");
    if (!(dt > 0)) throw std::invalid_argument("step_2d: dt must be > 0");
    if (state.fields[0].grid.dim() != 2)
        throw std::invalid_argument("step_2d: 2D states only");
    return apply_update(state, dt, {scalar_divergence(state, p)});
}

std::optional<State> step_scalar(const State& state, double dt, const ScalarModelParams& p) {
    return state.fields.at(0).grid.dim() == 1 ? step_explicit(state, dt, p)
                                              : step_2d(state, dt, p);
}

std::optional<State> step_two_species(const State& state, double dt,
                                      const TwoSpeciesParams& p) {
    require_species(state, 2, "step_two_species");
    if (!(dt > 0)) throw std::invalid_argument("step_two_species: dt must be > 0");
    auto [div1, div2] = two_species_divergence(state, p);
    return apply_update(state, dt, {std::move(div1), std::move(div2)});
}

namespace {

double finalize_dt(double worst, int dim, const StepControl& control) {
    const double dt = control.cfl_safety * worst / dim;
    if (std::isnan(dt) || !(dt > 0))
        throw numerics_error("suggest_dt: no admissible step size");
    if (dt < control.dt_min)
        throw numerics_error("suggest_dt: step size below dt_min (blow-up or bad config)");
    return dt;
}

} // namespace

double suggest_dt(const State& state, const ScalarModelParams& p,
                  const StepControl& control) {
    require_species(state, 1, "suggest_dt");
    if (control.dt_fixed) return *control.dt_fixed;
    const Field& r = state.fields[0];
    const Grid& g = r.grid;
    const ArrayXd xi_arr = xi_field(r, p);
    const double diff =
        1.0 + p.delta1 * std::max(0.0, r.values.maxCoeff()) + p.delta2 * p.b_sup;

    double worst = std::numeric_limits<double>::infinity();
    auto visit_face = [&](Index L, Index R, double h_half, double hL, double hR,
                          double b_face, double grad_v) {
        const double v = std::abs((xi_arr(R) - xi_arr(L)) / h_half) +
                         std::abs(1.0 - p.delta2 * b_face) * std::abs(grad_v);
        const double h = std::min(hL, hR);
        worst = std::min(worst, h * h / (2.0 * diff + h * v));
    };

    const Grid1D& ax = g.x();
    if (g.dim() == 1) {
        for (Index i = 0; i + 1 < ax.n(); ++i)
            visit_face(i, i + 1, ax.dx_half(i), ax.dx(i), ax.dx(i + 1), p.b_face_x(i),
                       p.grad_V_x(i));
        return finalize_dt(worst, 1, control);
    }
    const Grid1D& ay = g.y();
    const Index ny = ay.n();
    for (Index fi = 0; fi + 1 < ax.n(); ++fi)
        for (Index j = 0; j < ny; ++j)
            visit_face(g.index(fi, j), g.index(fi + 1, j), ax.dx_half(fi), ax.dx(fi),
                       ax.dx(fi + 1), p.b_face_x(fi * ny + j), p.grad_V_x(fi * ny + j));
    for (Index i = 0; i < ax.n(); ++i)
        for (Index fj = 0; fj + 1 < ny; ++fj)
            visit_face(g.index(i, fj), g.index(i, fj + 1), ay.dx_half(fj), ay.dx(fj),
                       ay.dx(fj + 1), p.b_face_y(i * (ny - 1) + fj),
                       p.grad_V_y(i * (ny - 1) + fj));
    return finalize_dt(worst, 2, control);
}

double suggest_dt(const State& state, const TwoSpeciesParams& p,
                  const StepControl& control) {
    require_species(state, 2, "suggest_dt");
    if (control.dt_fixed) return *control.dt_fixed;
    const Field& u1 = state.fields[0];
    const Field& u2 = state.fields[1];
    const Grid& g = u1.grid;
    auto [xi1, xi2] = two_species_xi(u1, u2, p);
    const double m1 = std::max(0.0, u1.values.maxCoeff());
    const double m2 = std::max(0.0, u2.values.maxCoeff());
    const double diff = std::max(p.D1 * (1.0 + p.d11 * m1 + p.d12 * m2),
                                 p.D2 * (1.0 + p.d21 * m2 + p.d22 * m1));

    double worst = std::numeric_limits<double>::infinity();
    auto visit_face = [&](Index L, Index R, double h_half, double hL, double hR,
                          double dV1, double dV2) {
        const double u1f = 0.5 * (u1.values(L) + u1.values(R));
        const double u2f = 0.5 * (u2.values(L) + u2.values(R));
        const double w1 = std::abs(1.0 - p.d12 * u2f) * std::abs(dV1) +
                          p.d22 * std::abs(u2f) * std::abs(dV2);
        const double w2 = std::abs(1.0 - p.d22 * u1f) * std::abs(dV2) +
                          p.d12 * std::abs(u1f) * std::abs(dV1);
        const double v1 = p.D1 * (std::abs((xi1(R) - xi1(L)) / h_half) + w1);
        const double v2 = p.D2 * (std::abs((xi2(R) - xi2(L)) / h_half) + w2);
        const double v = std::max(v1, v2);
        const double h = std::min(hL, hR);
        worst = std::min(worst, h * h / (2.0 * diff + h * v));
    };

    const Grid1D& ax = g.x();
    if (g.dim() == 1) {
        for (Index i = 0; i + 1 < ax.n(); ++i)
            visit_face(i, i + 1, ax.dx_half(i), ax.dx(i), ax.dx(i + 1), p.grad_V1_x(i),
                       p.grad_V2_x(i));
        return finalize_dt(worst, 1, control);
    }
    const Grid1D& ay = g.y();
    const Index ny = ay.n();
    for (Index fi = 0; fi + 1 < ax.n(); ++fi)
        for (Index j = 0; j < ny; ++j)
            visit_face(g.index(fi, j), g.index(fi + 1, j), ax.dx_half(fi), ax.dx(fi),
                       ax.dx(fi + 1), p.grad_V1_x(fi * ny + j), p.grad_V2_x(fi * ny + j));
    for (Index i = 0; i < ax.n(); ++i)
        for (Index fj = 0; fj + 1 < ny; ++fj)
            visit_face(g.index(i, fj), g.index(i, fj + 1), ay.dx_half(fj), ay.dx(fj),
                       ay.dx(fj + 1), p.grad_V1_y(i * (ny - 1) + fj),
                       p.grad_V2_y(i * (ny - 1) + fj));
    return finalize_dt(worst, 2, control);
}

namespace {

template <class Params, class DivFn>
AdvanceResult advance_impl(const State& state, const Params& p, const StepControl& control,
                           double dt_cap, DivFn&& divergence) {
    double dt = std::min(suggest_dt(state, p, control), dt_cap);
    if (!(dt > 0))
        throw numerics_error("advance: nonpositive step size");
    const std::vector<ArrayXd> divs = divergence(state, p);
    bool rejected = false;
    for (;;) {
        auto next = apply_update(state, dt, divs);
        if (next) return {std::move(*next), dt, rejected};
        rejected = true;
        dt *= 0.5;
        if (dt < control.dt_min)
            throw numerics_error("advance: step size collapsed below dt_min");
    }
}

} // namespace

AdvanceResult advance(const State& state, const ScalarModelParams& p,
                      const StepControl& control, double dt_cap) {
    require_species(state, 1, "advance");
    return advance_impl(state, p, control, dt_cap,
                        [](const State& s, const ScalarModelParams& q) {
                            return std::vector<ArrayXd>{scalar_divergence(s, q)};
                        });
}

AdvanceResult advance(const State& state, const TwoSpeciesParams& p,
                      const StepControl& control, double dt_cap) {
    require_species(state, 2, "advance");
    return advance_impl(state, p, control, dt_cap,
                        [](const State& s, const TwoSpeciesParams& q) {
                            auto [d1, d2] = two_species_divergence(s, q);
                            return std::vector<ArrayXd>{std::move(d1), std::move(d2)};
                        });
}

} // namespace crossfv
