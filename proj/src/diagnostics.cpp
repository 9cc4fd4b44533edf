#include "crossfv/diagnostics.hpp"

#include <cmath>

#include "crossfv/equilibrium.hpp"

namespace crossfv {

namespace {

double principle_ratio(const Field& r, const Field& V, double v_sup, double r0_sup) {
    if (!(r0_sup > 0)) return 0.0;
    const double m = (r.values * (V.values - v_sup).exp()).maxCoeff();
    return m / r0_sup;
}

void finish_record(DiagnosticsRecord& rec, RecordContext& ctx) {
    if (ctx.dt_rejected_since_last) {
        rec.flags |= kFlagDtRejected;
        ctx.dt_rejected_since_last = false;
    }
    if (!ctx.previous_entropy) {
        ctx.entropy_tol = 1e-10 * (1.0 + std::abs(rec.entropy));
    } else if (rec.entropy > *ctx.previous_entropy + ctx.entropy_tol) {
        rec.flags |= kFlagEntropyIncrease;
    }
    ctx.previous_entropy = rec.entropy;
}

} // namespace

DiagnosticsRecord record(const State& state, const ScalarModelParams& p, RecordContext& ctx,
                         const Field* reference) {
    const Field& r = state.fields.at(0);
    DiagnosticsRecord rec;
    rec.t = state.t;
    rec.masses = {total_mass(r)};
    rec.entropy = entropy_scalar(r, p);
    rec.min_value = r.values.minCoeff();
    rec.max_value = r.values.maxCoeff();
    if (reference) rec.l2_to_reference = l2_distance(r, *reference);
    rec.max_principle_ratio = principle_ratio(r, p.V, p.v_sup, ctx.r0_sup.at(0));

    const ArrayXd elliptic = 1.0 + p.delta1 * r.values - p.delta2 * p.b.values;
    if ((elliptic <= 0).any() || !p.elliptic_ok()) rec.flags |= kFlagEllipticityViolation;
    finish_record(rec, ctx);
    return rec;
}

DiagnosticsRecord record(const State& state, const TwoSpeciesParams& p, RecordContext& ctx,
                         const std::vector<Field>* reference) {
    const Field& u1 = state.fields.at(0);
    const Field& u2 = state.fields.at(1);
    DiagnosticsRecord rec;
    rec.t = state.t;
    rec.masses = {total_mass(u1), total_mass(u2)};
    rec.entropy = entropy_two_species(u1, u2, p);
    rec.min_value = std::min(u1.values.minCoeff(), u2.values.minCoeff());
    rec.max_value = std::max(u1.values.maxCoeff(), u2.values.maxCoeff());
    if (reference) rec.l2_to_reference = l2_distance(state.fields, *reference);

    const double v1_sup = p.V1.values.abs().maxCoeff();
    const double v2_sup = p.V2.values.abs().maxCoeff();
    rec.max_principle_ratio =
        std::max(principle_ratio(u1, p.V1, v1_sup, ctx.r0_sup.at(0)),
                 principle_ratio(u2, p.V2, v2_sup, ctx.r0_sup.at(1)));

    // I + delta Phi(u) must stay positive definite cellwise
    for (Index i = 0; i < u1.values.size(); ++i) {
        const auto c = coefficients_A_B(std::max(0.0, u1.values(i)),
                                        std::max(0.0, u2.values(i)), 0, 0, p);
        if (!diffusion_positive_definite(c.A)) {
            rec.flags |= kFlagEllipticityViolation;
            break;
        }
    }
    finish_record(rec, ctx);
    return rec;
}

EntropyDissipationReport check_entropy_dissipation(
    const std::vector<DiagnosticsRecord>& records, bool assert_monotone) {
    EntropyDissipationReport rep;
    rep.asserted = assert_monotone;
    if (records.empty()) return rep;
    rep.tolerance = 1e-10 * (1.0 + std::abs(records.front().entropy));
    for (std::size_t i = 1; i < records.size(); ++i) {
        const double inc = records[i].entropy - records[i - 1].entropy;
        if (inc > rep.tolerance) {
            rep.n_increases += 1;
            rep.max_increase = std::max(rep.max_increase, inc);
        }
    }
    rep.ok = !assert_monotone || rep.n_increases == 0;
    return rep;
}

MaxPrincipleReport check_max_principle(const std::vector<DiagnosticsRecord>& records,
                                       double delta) {
    MaxPrincipleReport rep;
    if (records.empty()) return rep;
    const std::size_t n = records.size();
    const std::size_t quarter = std::max<std::size_t>(1, n / 4);
    for (std::size_t i = 0; i < n; ++i) {
        const double rho = records[i].max_principle_ratio;
        rep.sup_ratio = std::max(rep.sup_ratio, rho);
        if (i < quarter) rep.first_quarter_max = std::max(rep.first_quarter_max, rho);
        if (i >= n - quarter) rep.last_quarter_max = std::max(rep.last_quarter_max, rho);
    }
    rep.bounded = std::isfinite(rep.sup_ratio) &&
                  rep.last_quarter_max <= rep.first_quarter_max + 1e-8;
    rep.empirical_c = delta > 0 ? (rep.sup_ratio - 1.0) / std::sqrt(delta) : 0.0;
    return rep;
}

} // namespace crossfv
