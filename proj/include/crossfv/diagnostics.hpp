#pragma once
#include <optional>
#include <vector>

#include "crossfv/model.hpp"
#include "crossfv/scheme.hpp"

namespace crossfv {

enum RecordFlag : unsigned {
    kFlagEllipticityViolation = 1u,
    kFlagDtRejected = 2u,
    kFlagEntropyIncrease = 4u,
};

/// One row of run monitoring: conserved masses, entropy, extrema, distance
/// to a reference field and the maximum-principle ratio
/// sup_x r(t,x) exp(V(x) - ||V||_inf) / ||r_0||_inf.
struct DiagnosticsRecord {
    double t = 0;
    std::vector<double> masses;
    double entropy = 0;
    double min_value = 0;
    double max_value = 0;
    std::optional<double> l2_to_reference;
    double max_principle_ratio = 0;
    unsigned flags = 0;
};

/// Per-run constants the records are measured against.
struct RecordContext {
    std::vector<double> r0_sup;  // initial sup norm per species
    bool dt_rejected_since_last = false;
    std::optional<double> previous_entropy;
    double entropy_tol = 0;  // set after the first record: 1e-10 (1 + |E0|)
};

DiagnosticsRecord record(const State& state, const ScalarModelParams& p, RecordContext& ctx,
                         const Field* reference);
DiagnosticsRecord record(const State& state, const TwoSpeciesParams& p, RecordContext& ctx,
                         const std::vector<Field>* reference);

struct EntropyDissipationReport {
    bool asserted = false;  // monotonicity demanded (gradient-flow regime)
    int n_increases = 0;
    double max_increase = 0;
    double tolerance = 0;
    bool ok = true;
};

/// Scans consecutive records for entropy increases beyond
/// 1e-10 (1 + |E(0)|). In the gradient-flow regime violations fail the
/// check; outside it they are only reported.
EntropyDissipationReport check_entropy_dissipation(
    const std::vector<DiagnosticsRecord>& records, bool assert_monotone);

struct MaxPrincipleReport {
    double sup_ratio = 0;
    double first_quarter_max = 0;
    double last_quarter_max = 0;
    bool bounded = false;    // last-quarter max <= first-quarter max + 1e-8
    double empirical_c = 0;  // (sup ratio - 1)/sqrt(delta), delta > 0
};

MaxPrincipleReport check_max_principle(const std::vector<DiagnosticsRecord>& records,
                                       double delta);

/// The scalar equation is a full gradient flow exactly when the frozen
/// species does not perturb the mobility (d2 = 0).
inline bool is_gradient_flow_regime(const ScalarModelParams& p) { return p.delta2 == 0; }

} // namespace crossfv
