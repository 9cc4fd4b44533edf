#include "crossfv/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "crossfv/errors.hpp"

namespace crossfv {

namespace {

double l2_of_diff(const ArrayXd& a, const ArrayXd& b, const ArrayXd& vol) {
    return weighted_sum((a - b).square(), vol);
}

template <class Params>
State march_to_stationary(const Params& p, State state, const StationaryOptions& opts) {
    if (!(opts.tol > 0))
        throw std::invalid_argument("compute_stationary: tol must be > 0");
    const ArrayXd& vol = state.fields[0].grid.volumes();
    double residual = std::numeric_limits<double>::infinity();
    while (state.t < opts.t_max) {
        AdvanceResult step = advance(state, p, opts.control, opts.t_max - state.t);
        double sq = 0;
        for (std::size_t k = 0; k < state.fields.size(); ++k)
            sq += l2_of_diff(step.state.fields[k].values, state.fields[k].values, vol);
        residual = std::sqrt(sq) / step.dt_used;
        state = std::move(step.state);
        if (residual < opts.tol) return state;
    }
    std::ostringstream msg;
    msg << "compute_stationary: no convergence by t_max = " << opts.t_max
        << " (last residual " << residual << ", tol " << opts.tol << ")";
    throw numerics_error(msg.str());
}

} // namespace

Field compute_stationary(const ScalarModelParams& p, double mass,
                         const StationaryOptions& opts) {
    const Grid& g = p.grid();
    State init{0.0, 0, {make_field(g, mass / g.measure())}};
    return march_to_stationary(p, std::move(init), opts).fields[0];
}

std::vector<Field> compute_stationary_two_species(const TwoSpeciesParams& p, double mass1,
                                                  double mass2,
                                                  const StationaryOptions& opts) {
    const Grid& g = p.grid();
    State init{0.0, 0,
               {make_field(g, mass1 / g.measure()), make_field(g, mass2 / g.measure())}};
    return march_to_stationary(p, std::move(init), opts).fields;
}

double l2_distance(const Field& a, const Field& b) {
    if (!a.grid.same_as(b.grid))
        throw std::invalid_argument("l2_distance: fields live on different grids");
    return std::sqrt(l2_of_diff(a.values, b.values, a.grid.volumes()));
}

double l2_distance(const std::vector<Field>& a, const std::vector<Field>& b) {
    if (a.size() != b.size())
        throw std::invalid_argument("l2_distance: species count mismatch");
    double sq = 0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        if (!a[k].grid.same_as(b[k].grid))
            throw std::invalid_argument("l2_distance: fields live on different grids");
        sq += l2_of_diff(a[k].values, b[k].values, a[k].grid.volumes());
    }
    return std::sqrt(sq);
}

DecayFit fit_decay_rate(const std::vector<std::pair<double, double>>& series,
                        std::optional<std::pair<double, double>> window) {
    if (series.empty())
        throw std::invalid_argument("fit_decay_rate: empty series");

    double t_a, t_b;
    if (window) {
        t_a = window->first;
        t_b = window->second;
        if (!(t_a < t_b))
            throw std::invalid_argument("fit_decay_rate: window must satisfy t_a < t_b");
        // shrink to the last positive prefix if the floor was reached inside
        for (const auto& [t, d] : series)
            if (t >= t_a && t <= t_b && !(d > 0)) {
                t_b = std::min(t_b, t);
                break;
            }
    } else {
        const double T = series.back().first;
        const double floor = 1e-10 * series.front().second;
        t_a = 0.1 * T;
        t_b = series.front().first;
        for (const auto& [t, d] : series)
            if (d > floor) t_b = t;
    }

    std::vector<std::pair<double, double>> pts;  // (t, log d)
    for (const auto& [t, d] : series)
        if (t >= t_a && t <= t_b && d > 0) pts.emplace_back(t, std::log(d));
    if (pts.size() < 10)
        throw std::invalid_argument("fit_decay_rate: fewer than 10 usable samples");

    double st = 0, sy = 0, stt = 0, sty = 0;
    for (const auto& [t, y] : pts) {
        st += t;
        sy += y;
        stt += t * t;
        sty += t * y;
    }
    const double n = static_cast<double>(pts.size());
    const double denom = n * stt - st * st;
    if (!(std::abs(denom) > 0))
        throw std::invalid_argument("fit_decay_rate: degenerate time samples");

    DecayFit fit;
    fit.slope = (n * sty - st * sy) / denom;
    fit.intercept = (sy - fit.slope * st) / n;
    fit.t_a = t_a;
    fit.t_b = t_b;
    fit.n_samples = static_cast<int>(pts.size());
    double rss = 0;
    for (const auto& [t, y] : pts) {
        const double e = y - (fit.intercept + fit.slope * t);
        rss += e * e;
    }
    fit.residual_rms = std::sqrt(rss / n);
    return fit;
}

TheoryReport make_theory_report(const TheoryParams& theory,
                                const std::optional<ScalarTheoryInputs>& scalar_inputs) {
    TheoryReport r;
    r.c_p = theory.C_P;
    if (!(theory.C_P > 0))
        throw std::invalid_argument("make_theory_report: C_P must be > 0");
    r.lambda_over_2cp2 = theory.lambda / (2.0 * theory.C_P * theory.C_P);
    r.prefactor_general = std::exp(3.0 * theory.V_inf_norm);
    r.prefactor_scalar = std::exp(1.5 * (theory.V_u - theory.V_l));
    r.rate_scalar = 1.0 / (2.0 * theory.C_P * theory.C_P);
    r.gamma_m = theory.Gamma_M;

    const double cv = theory.C_P * theory.grad_V_inf_norm;
    r.system_bound_applicable = cv < 1.0;
    if (r.system_bound_applicable && theory.Gamma_M > 0) {
        r.delta_threshold = theory.lambda * (1.0 - cv) /
                            (2.0 * theory.Lambda * std::exp(theory.V_inf_norm) *
                             theory.Gamma_M * (1.0 + cv));
    } else if (r.system_bound_applicable) {
        r.delta_threshold = std::numeric_limits<double>::infinity();
    } else {
        r.delta_threshold = 0;
    }

    if (scalar_inputs) {
        const ScalarTheoryInputs& in = *scalar_inputs;
        r.delta = in.delta;
        r.c_gn = in.c_gn;
        r.parabolic_norm = in.parabolic_norm;
        r.dimension = in.dimension;
        const double evl = std::exp(-theory.V_l);
        r.k1 = theory.C_P * (evl * in.grad_w_star_sup +
                             2.0 * evl * in.w_star_sup * theory.grad_V_inf_norm +
                             in.grad_b_sup);
        if (in.dimension == 3)
            r.k2 = 2.0 * evl * evl * theory.grad_V_inf_norm * in.c_sobolev * theory.M;
        else
            r.k2 = evl * evl * theory.grad_V_inf_norm * in.c_gn * in.parabolic_norm;
        r.k_delta = in.delta * (r.k1 + r.k2);
        r.k_condition_met = r.k_delta < 0.5 - in.delta2_b_sup;
    }
    return r;
}

DecayBoundCheck verify_decay_bound(const std::vector<std::pair<double, double>>& series,
                                   const TheoryReport& report, StationaryKind kind) {
    const double prefactor = kind == StationaryKind::scalar ? report.prefactor_scalar
                                                            : report.prefactor_general;
    const double rate = kind == StationaryKind::scalar ? report.rate_scalar
                                                       : report.lambda_over_2cp2;
    DecayBoundCheck out;
    out.passed = true;
    out.worst_margin = std::numeric_limits<double>::infinity();
    if (series.empty()) return out;

    const double floor = 1e-10 * series.front().second;
    const double log_pref = std::log(prefactor);
    for (std::size_t i = 0; i < series.size(); ++i) {
        const auto& [t1, d1] = series[i];
        if (!(d1 > floor)) continue;
        for (std::size_t j = i + 1; j < series.size(); ++j) {
            const auto& [t2, d2] = series[j];
            if (!(d2 > 0)) continue;  // decayed to zero: bound trivially holds
            if (!(d2 > floor)) continue;
            const double margin = log_pref - rate * (t2 - t1) - std::log(d2 / d1);
            out.n_pairs += 1;
            out.worst_margin = std::min(out.worst_margin, margin);
            if (margin < -1e-12) out.passed = false;
        }
    }
    if (out.n_pairs == 0) out.worst_margin = 0;
    return out;
}

} // namespace crossfv
