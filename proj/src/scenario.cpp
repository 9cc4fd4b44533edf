#include "crossfv/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "crossfv/errors.hpp"

namespace crossfv {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw validation_error("scenario: " + path + ": " + what);
}

void check_keys(const json& obj, const std::string& path,
                std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) fail(path, "expected an object");
    for (const auto& [key, _] : obj.items()) {
        if (std::find_if(allowed.begin(), allowed.end(),
                         [&](const char* a) { return key == a; }) == allowed.end())
            fail(path, "unknown key '" + key + "'");
    }
}

const json& get(const json& obj, const char* key, const std::string& path) {
    auto it = obj.find(key);
    if (it == obj.end()) fail(path, std::string("missing key '") + key + "'");
    return *it;
}

double num(const json& obj, const char* key, const std::string& path) {
    const json& v = get(obj, key, path);
    if (!v.is_number()) fail(path + "." + key, "expected a number");
    return v.get<double>();
}

double num_or(const json& obj, const char* key, const std::string& path, double dflt) {
    if (!obj.contains(key)) return dflt;
    return num(obj, key, path);
}

int integer(const json& obj, const char* key, const std::string& path) {
    const json& v = get(obj, key, path);
    if (!v.is_number_integer()) fail(path + "." + key, "expected an integer");
    return v.get<int>();
}

std::string text(const json& obj, const char* key, const std::string& path) {
    const json& v = get(obj, key, path);
    if (!v.is_string()) fail(path + "." + key, "expected a string");
    return v.get<std::string>();
}

std::vector<double> number_list(const json& v, const std::string& path) {
    if (!v.is_array()) fail(path, "expected an array of numbers");
    std::vector<double> out;
    for (const auto& e : v) {
        if (!e.is_number()) fail(path, "expected an array of numbers");
        out.push_back(e.get<double>());
    }
    return out;
}

FunctionSpec parse_function(const json& obj, const std::string& path, bool allow_normalize);

FunctionSpec parse_function_inner(const json& obj, const std::string& path,
                                  bool allow_normalize) {
    FunctionSpec s;
    const std::string kind = text(obj, "kind", path);
    auto with_norm = [&](std::initializer_list<const char*> keys) {
        std::vector<const char*> all(keys.begin(), keys.end());
        if (allow_normalize) all.push_back("normalize_mass");
        if (!obj.is_object()) fail(path, "expected an object");
        for (const auto& [key, _] : obj.items()) {
            if (std::find_if(all.begin(), all.end(),
                             [&](const char* a) { return key == a; }) == all.end())
                fail(path, "unknown key '" + key + "'");
        }
    };

    if (kind == "constant") {
        with_norm({"kind", "value"});
        s.kind = FunctionSpec::Kind::constant;
        s.value = num(obj, "value", path);
    } else if (kind == "gaussian") {
        with_norm({"kind", "center", "sigma"});
        s.kind = FunctionSpec::Kind::gaussian;
        s.center = number_list(get(obj, "center", path), path + ".center");
        s.sigma = num(obj, "sigma", path);
        if (!(s.sigma > 0)) fail(path, "gaussian sigma must be > 0");
    } else if (kind == "sum") {
        with_norm({"kind", "terms"});
        s.kind = FunctionSpec::Kind::sum;
        const json& terms = get(obj, "terms", path);
        if (!terms.is_array() || terms.empty()) fail(path + ".terms", "expected a non-empty array");
        int k = 0;
        for (const auto& t : terms) {
            const std::string tp = path + ".terms[" + std::to_string(k++) + "]";
            check_keys(t, tp, {"weight", "fn"});
            const double w = num(t, "weight", tp);
            auto fn = std::make_shared<FunctionSpec>(
                parse_function(get(t, "fn", tp), tp + ".fn", false));
            s.terms.emplace_back(w, std::move(fn));
        }
    } else if (kind == "scaled") {
        with_norm({"kind", "factor", "fn"});
        s.kind = FunctionSpec::Kind::scaled;
        s.factor = num(obj, "factor", path);
        s.child = std::make_shared<FunctionSpec>(
            parse_function(get(obj, "fn", path), path + ".fn", false));
    } else if (kind == "piecewise_power") {
        with_norm({"kind", "pivot", "left_exponent", "right_exponent"});
        s.kind = FunctionSpec::Kind::piecewise_power;
        s.pivot = num(obj, "pivot", path);
        s.left_exponent = num(obj, "left_exponent", path);
        s.right_exponent = num(obj, "right_exponent", path);
    } else if (kind == "cosine_product") {
        with_norm({"kind", "wavenumber", "base"});
        s.kind = FunctionSpec::Kind::cosine_product;
        s.wavenumber = num(obj, "wavenumber", path);
        s.base = num_or(obj, "base", path, 1.0);
    } else if (kind == "ring_sine_barrier") {
        with_norm({"kind"});
        s.kind = FunctionSpec::Kind::ring_sine_barrier;
    } else if (kind == "quadratic_well") {
        with_norm({"kind", "center", "strength"});
        s.kind = FunctionSpec::Kind::quadratic_well;
        s.center = number_list(get(obj, "center", path), path + ".center");
        s.strength = num(obj, "strength", path);
    } else {
        fail(path, "unknown function kind '" + kind + "'");
    }
    return s;
}

FunctionSpec parse_function(const json& obj, const std::string& path, bool allow_normalize) {
    FunctionSpec s = parse_function_inner(obj, path, allow_normalize);
    if (allow_normalize && obj.contains("normalize_mass")) {
        s.normalize_mass = num(obj, "normalize_mass", path);
        if (!(*s.normalize_mass > 0)) fail(path, "normalize_mass must be > 0");
    }
    return s;
}

// ---------------------------------------------------------------------------
// closure construction

double eval_piecewise_power(const FunctionSpec& s, double x) {
    return x < s.pivot ? std::pow(s.pivot - x, s.left_exponent)
                       : std::pow(x - s.pivot, s.right_exponent);
}

double ring_sine_barrier_value(double x, double y) {
    const double rho = std::hypot(x + 1.75, y + 1.75);
    const double rho_min = -1.75 + 7.0 * M_PI / 5.0;
    const double rho_max = -1.75 + 7.5 * M_PI / 5.0;
    if (rho < rho_min || rho > rho_max) return 0.0;
    double v = std::sin(5.0 * rho);
    v *= (y >= -1.0 && y <= 1.0) ? 1.0 + std::cos(4.0 * M_PI / 3.0 * (y + 1.0)) : 0.0;
    v *= (x >= -1.0 && x <= 1.0) ? 1.0 + std::cos(4.0 * M_PI / 3.0 * (x + 1.0)) : 0.0;
    return v;
}

Func1D build_1d(const FunctionSpec& s) {
    using K = FunctionSpec::Kind;
    switch (s.kind) {
        case K::constant:
            return [v = s.value](double) { return v; };
        case K::gaussian: {
            if (s.center.size() != 1)
                throw validation_error("scenario: gaussian center must have 1 entry on a 1D domain");
            const double c = s.center[0], sig = s.sigma;
            const double pref = 1.0 / std::sqrt(2.0 * M_PI * sig * sig);
            return [=](double x) { return pref * std::exp(-(x - c) * (x - c) / (2 * sig * sig)); };
        }
        case K::sum: {
            std::vector<std::pair<double, Func1D>> parts;
            for (const auto& [w, fn] : s.terms) parts.emplace_back(w, build_1d(*fn));
            return [parts](double x) {
                double v = 0;
                for (const auto& [w, f] : parts) v += w * f(x);
                return v;
            };
        }
        case K::scaled: {
            Func1D f = build_1d(*s.child);
            return [f, a = s.factor](double x) { return a * f(x); };
        }
        case K::piecewise_power:
            return [s](double x) { return eval_piecewise_power(s, x); };
        case K::cosine_product:
            return [k = s.wavenumber, b = s.base](double x) { return b + std::cos(k * x); };
        case K::ring_sine_barrier:
            throw validation_error("scenario: ring_sine_barrier needs a 2D domain");
        case K::quadratic_well: {
            if (s.center.size() != 1)
                throw validation_error("scenario: quadratic_well center must have 1 entry on a 1D domain");
            const double c = s.center[0], a = s.strength;
            return [=](double x) { return a * (x - c) * (x - c); };
        }
    }
    throw validation_error("scenario: unhandled function kind");
}

Func2D build_2d(const FunctionSpec& s) {
    using K = FunctionSpec::Kind;
    switch (s.kind) {
        case K::constant:
            return [v = s.value](double, double) { return v; };
        case K::gaussian: {
            if (s.center.size() != 2)
                throw validation_error("scenario: gaussian center must have 2 entries on a 2D domain");
            const double cx = s.center[0], cy = s.center[1], sig = s.sigma;
            const double pref = 1.0 / std::sqrt(2.0 * M_PI * sig * sig);
            return [=](double x, double y) {
                const double q = (x - cx) * (x - cx) + (y - cy) * (y - cy);
                return pref * std::exp(-q / (2 * sig * sig));
            };
        }
        case K::sum: {
            std::vector<std::pair<double, Func2D>> parts;
            for (const auto& [w, fn] : s.terms) parts.emplace_back(w, build_2d(*fn));
            return [parts](double x, double y) {
                double v = 0;
                for (const auto& [w, f] : parts) v += w * f(x, y);
                return v;
            };
        }
        case K::scaled: {
            Func2D f = build_2d(*s.child);
            return [f, a = s.factor](double x, double y) { return a * f(x, y); };
        }
        case K::piecewise_power:
            throw validation_error("scenario: piecewise_power is 1D only");
        case K::cosine_product:
            return [k = s.wavenumber, b = s.base](double x, double y) {
                return b + std::cos(k * x) + std::cos(k * y);
            };
        case K::ring_sine_barrier:
            return [](double x, double y) { return ring_sine_barrier_value(x, y); };
        case K::quadratic_well: {
            if (s.center.size() != 2)
                throw validation_error("scenario: quadratic_well center must have 2 entries on a 2D domain");
            const double cx = s.center[0], cy = s.center[1], a = s.strength;
            return [=](double x, double y) {
                return a * ((x - cx) * (x - cx) + (y - cy) * (y - cy));
            };
        }
    }
    throw validation_error("scenario: unhandled function kind");
}

} // namespace

AnalyticFunction instantiate(const FunctionSpec& spec, const Grid& grid) {
    AnalyticFunction fn;
    double scale = 1.0;
    if (grid.dim() == 1) {
        Func1D raw = build_1d(spec);
        if (spec.normalize_mass) {
            const double mass = total_mass(cell_average(grid, raw));
            if (!(mass > 0))
                throw validation_error("scenario: normalize_mass on a function with nonpositive mass");
            scale = *spec.normalize_mass / mass;
        }
        fn.f1 = [raw, scale](double x) { return scale * raw(x); };
    } else {
        Func2D raw = build_2d(spec);
        if (spec.normalize_mass) {
            const double mass = total_mass(cell_average(grid, raw));
            if (!(mass > 0))
                throw validation_error("scenario: normalize_mass on a function with nonpositive mass");
            scale = *spec.normalize_mass / mass;
        }
        fn.f2 = [raw, scale](double x, double y) { return scale * raw(x, y); };
    }
    return fn;
}

namespace {

void validate_on_grid(Scenario& s) {
    const Grid grid = make_grid(s);
    try {
        if (s.model == ModelKind::scalar) {
            const ScalarModelParams p = build_scalar_params(s, grid);
            const std::vector<Field> init = initial_fields(s, grid);
            if ((init[0].values < 0).any())
                throw validation_error("scenario: initial data has negative cell averages");
            if (!p.elliptic_ok())
                s.warnings.push_back("ellipticity margin 1 - delta2*max(b) is not positive");
            const double dmax = std::max({s.scalar.delta1, s.scalar.delta2, s.scalar.delta3});
            if (dmax > 1)
                s.warnings.push_back("max delta exceeds 1; outside the small-coupling regime");
        } else {
            const TwoSpeciesParams p = build_two_species_params(s, grid);
            const std::vector<Field> init = initial_fields(s, grid);
            for (const Field& f : init)
                if ((f.values < 0).any())
                    throw validation_error("scenario: initial data has negative cell averages");
            if (p.max_delta() > 1)
                s.warnings.push_back("max delta exceeds 1; outside the small-coupling regime");
            // positive definiteness of I + delta Phi(u) at the initial data
            for (Index i = 0; i < init[0].values.size(); ++i) {
                const auto c = coefficients_A_B(init[0].values(i), init[1].values(i), 0, 0, p);
                if (!diffusion_positive_definite(c.A)) {
                    s.warnings.push_back("I + delta Phi(u0) loses positive definiteness");
                    break;
                }
            }
        }
    } catch (const validation_error&) {
        throw;
    } catch (const std::exception& e) {
        throw validation_error(std::string("scenario: ") + e.what());
    }
}

} // namespace

Scenario load_scenario_json(const json& doc, const std::string& name) {
    const std::string path = "$";
    check_keys(doc, path,
               {"description", "model", "domain", "resolution", "params", "t_end",
                "step_control", "stride", "snapshot_times", "outputs", "stationary",
                "fit_window", "reference_slope"});

    Scenario s;
    s.name = name;
    if (doc.contains("description")) s.description = text(doc, "description", path);

    const std::string model = text(doc, "model", path);
    if (model == "scalar")
        s.model = ModelKind::scalar;
    else if (model == "two_species")
        s.model = ModelKind::two_species;
    else
        fail(path + ".model", "expected 'scalar' or 'two_species'");

    const json& dom = get(doc, "domain", path);
    s.dim = dom.contains("y_min") || dom.contains("y_max") ? 2 : 1;
    if (s.dim == 1) {
        check_keys(dom, path + ".domain", {"x_min", "x_max"});
    } else {
        check_keys(dom, path + ".domain", {"x_min", "x_max", "y_min", "y_max"});
    }
    s.x_min = num(dom, "x_min", path + ".domain");
    s.x_max = num(dom, "x_max", path + ".domain");
    if (!(s.x_min < s.x_max)) fail(path + ".domain", "need x_min < x_max");
    if (s.dim == 2) {
        s.y_min = num(dom, "y_min", path + ".domain");
        s.y_max = num(dom, "y_max", path + ".domain");
        if (!(s.y_min < s.y_max)) fail(path + ".domain", "need y_min < y_max");
    }

    const json& res = get(doc, "resolution", path);
    if (s.dim == 1)
        check_keys(res, path + ".resolution", {"nx"});
    else
        check_keys(res, path + ".resolution", {"nx", "ny"});
    s.nx = integer(res, "nx", path + ".resolution");
    if (s.nx < 2) fail(path + ".resolution", "nx must be >= 2");
    if (s.dim == 2) {
        s.ny = integer(res, "ny", path + ".resolution");
        if (s.ny < 2) fail(path + ".resolution", "ny must be >= 2");
    }

    const json& pr = get(doc, "params", path);
    const std::string ppath = path + ".params";
    if (s.model == ModelKind::scalar) {
        check_keys(pr, ppath, {"delta1", "delta2", "delta3", "epsilon", "b", "V", "r0"});
        s.scalar.delta1 = num_or(pr, "delta1", ppath, 0.0);
        s.scalar.delta2 = num_or(pr, "delta2", ppath, 0.0);
        s.scalar.delta3 = num_or(pr, "delta3", ppath, 0.0);
        s.scalar.epsilon = num_or(pr, "epsilon", ppath, 1e-7);
        if (s.scalar.delta1 < 0 || s.scalar.delta2 < 0 || s.scalar.delta3 < 0)
            fail(ppath, "delta coefficients must be >= 0");
        if (!(s.scalar.epsilon > 0)) fail(ppath, "epsilon must be > 0");
        s.scalar.b = pr.contains("b") ? parse_function(pr["b"], ppath + ".b", true)
                                      : FunctionSpec{};
        s.scalar.V = pr.contains("V") ? parse_function(pr["V"], ppath + ".V", true)
                                      : FunctionSpec{};
        s.scalar.r0 = parse_function(get(pr, "r0", ppath), ppath + ".r0", true);
    } else {
        check_keys(pr, ppath, {"D1", "D2", "delta", "epsilon", "V1", "V2", "u1_0", "u2_0"});
        s.two_species.D1 = num_or(pr, "D1", ppath, 1.0);
        s.two_species.D2 = num_or(pr, "D2", ppath, 1.0);
        if (s.two_species.D1 < 0 || s.two_species.D2 < 0)
            fail(ppath, "diffusivities must be >= 0");
        const json& dd = get(pr, "delta", ppath);
        check_keys(dd, ppath + ".delta", {"d11", "d12", "d13", "d21", "d22", "d23"});
        s.two_species.d11 = num_or(dd, "d11", ppath + ".delta", 0.0);
        s.two_species.d12 = num_or(dd, "d12", ppath + ".delta", 0.0);
        s.two_species.d13 = num_or(dd, "d13", ppath + ".delta", 0.0);
        s.two_species.d21 = num_or(dd, "d21", ppath + ".delta", 0.0);
        s.two_species.d22 = num_or(dd, "d22", ppath + ".delta", 0.0);
        s.two_species.d23 = num_or(dd, "d23", ppath + ".delta", 0.0);
        for (double d : {s.two_species.d11, s.two_species.d12, s.two_species.d13,
                         s.two_species.d21, s.two_species.d22, s.two_species.d23})
            if (d < 0) fail(ppath + ".delta", "delta coefficients must be >= 0");
        s.two_species.epsilon = num_or(pr, "epsilon", ppath, 1e-7);
        if (!(s.two_species.epsilon > 0)) fail(ppath, "epsilon must be > 0");
        s.two_species.V1 = pr.contains("V1") ? parse_function(pr["V1"], ppath + ".V1", true)
                                             : FunctionSpec{};
        s.two_species.V2 = pr.contains("V2") ? parse_function(pr["V2"], ppath + ".V2", true)
                                             : FunctionSpec{};
        s.two_species.u1_0 = parse_function(get(pr, "u1_0", ppath), ppath + ".u1_0", true);
        s.two_species.u2_0 = parse_function(get(pr, "u2_0", ppath), ppath + ".u2_0", true);
    }

    s.t_end = num(doc, "t_end", path);
    if (!(s.t_end > 0)) fail(path, "t_end must be > 0");

    if (doc.contains("step_control")) {
        const json& sc = doc["step_control"];
        const std::string spath = path + ".step_control";
        check_keys(sc, spath, {"dt_fixed", "cfl_safety", "dt_min"});
        if (sc.contains("dt_fixed")) {
            s.step.dt_fixed = num(sc, "dt_fixed", spath);
            if (!(*s.step.dt_fixed > 0)) fail(spath, "dt_fixed must be > 0");
        }
        s.step.cfl_safety = num_or(sc, "cfl_safety", spath, 0.5);
        if (!(s.step.cfl_safety > 0 && s.step.cfl_safety <= 1))
            fail(spath, "cfl_safety must lie in (0, 1]");
        s.step.dt_min = num_or(sc, "dt_min", spath, 1e-12);
        if (!(s.step.dt_min > 0)) fail(spath, "dt_min must be > 0");
    }

    if (doc.contains("stride")) {
        s.stride = integer(doc, "stride", path);
        if (s.stride < 1) fail(path, "stride must be >= 1");
    }

    if (doc.contains("snapshot_times")) {
        s.snapshot_times = number_list(doc["snapshot_times"], path + ".snapshot_times");
        for (double t : s.snapshot_times)
            if (t < 0 || t > s.t_end)
                fail(path + ".snapshot_times", "snapshot times must lie in [0, t_end]");
        std::sort(s.snapshot_times.begin(), s.snapshot_times.end());
    }

    if (doc.contains("outputs")) {
        const json& outs = doc["outputs"];
        if (!outs.is_array()) fail(path + ".outputs", "expected an array");
        for (const auto& o : outs) {
            if (!o.is_string()) fail(path + ".outputs", "expected strings");
            const std::string v = o.get<std::string>();
            if (v == "trajectory")
                s.outputs.push_back(OutputKind::trajectory);
            else if (v == "diagnostics")
                s.outputs.push_back(OutputKind::diagnostics);
            else if (v == "decay_fit")
                s.outputs.push_back(OutputKind::decay_fit);
            else if (v == "plot_script")
                s.outputs.push_back(OutputKind::plot_script);
            else
                fail(path + ".outputs", "unknown output '" + v + "'");
        }
    } else {
        s.outputs = {OutputKind::diagnostics};
    }

    if (doc.contains("stationary")) {
        const json& st = doc["stationary"];
        check_keys(st, path + ".stationary", {"tol", "t_max"});
        s.stationary_tol = num_or(st, "tol", path + ".stationary", 1e-10);
        s.stationary_t_max = num_or(st, "t_max", path + ".stationary", 400.0);
        if (!(s.stationary_tol > 0)) fail(path + ".stationary", "tol must be > 0");
        if (!(s.stationary_t_max > 0)) fail(path + ".stationary", "t_max must be > 0");
    }

    if (doc.contains("fit_window")) {
        const auto w = number_list(doc["fit_window"], path + ".fit_window");
        if (w.size() != 2 || !(w[0] < w[1]))
            fail(path + ".fit_window", "expected [t_a, t_b] with t_a < t_b");
        s.fit_window = std::make_pair(w[0], w[1]);
    }

    if (doc.contains("reference_slope"))
        s.reference_slope = num(doc, "reference_slope", path);

    validate_on_grid(s);
    return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw validation_error("scenario: cannot open '" + path.string() + "'");
    json doc;
    try {
        in >> doc;
    } catch (const json::parse_error& e) {
        throw validation_error("scenario: parse error in '" + path.string() + "': " + e.what());
    }
    return load_scenario_json(doc, path.stem().string());
}

Grid make_grid(const Scenario& s) {
    if (s.dim == 1) return build_uniform_grid_1d(s.x_min, s.x_max, s.nx);
    return build_uniform_grid_2d(s.x_min, s.x_max, s.y_min, s.y_max, s.nx, s.ny);
}

ScalarModelParams build_scalar_params(const Scenario& s, const Grid& grid) {
    if (s.model != ModelKind::scalar)
        throw std::logic_error("build_scalar_params: not a scalar scenario");
    const AnalyticFunction b = instantiate(s.scalar.b, grid);
    const AnalyticFunction V = instantiate(s.scalar.V, grid);
    if (grid.dim() == 1)
        return make_scalar_params(grid, s.scalar.delta1, s.scalar.delta2, s.scalar.delta3,
                                  s.scalar.epsilon, b.f1, V.f1);
    return make_scalar_params(grid, s.scalar.delta1, s.scalar.delta2, s.scalar.delta3,
                              s.scalar.epsilon, b.f2, V.f2);
}

TwoSpeciesParams build_two_species_params(const Scenario& s, const Grid& grid) {
    if (s.model != ModelKind::two_species)
        throw std::logic_error("build_two_species_params: not a two-species scenario");
    const TwoSpeciesConfig& c = s.two_species;
    const AnalyticFunction V1 = instantiate(c.V1, grid);
    const AnalyticFunction V2 = instantiate(c.V2, grid);
    if (grid.dim() == 1)
        return make_two_species_params(grid, c.D1, c.D2, c.d11, c.d12, c.d13, c.d21, c.d22,
                                       c.d23, c.epsilon, V1.f1, V2.f1);
    return make_two_species_params(grid, c.D1, c.D2, c.d11, c.d12, c.d13, c.d21, c.d22,
                                   c.d23, c.epsilon, V1.f2, V2.f2);
}

std::vector<Field> initial_fields(const Scenario& s, const Grid& grid) {
    auto average = [&](const FunctionSpec& spec) {
        const AnalyticFunction fn = instantiate(spec, grid);
        return grid.dim() == 1 ? cell_average(grid, fn.f1) : cell_average(grid, fn.f2);
    };
    if (s.model == ModelKind::scalar) return {average(s.scalar.r0)};
    return {average(s.two_species.u1_0), average(s.two_species.u2_0)};
}

bool has_output(const Scenario& s, OutputKind kind) {
    return std::find(s.outputs.begin(), s.outputs.end(), kind) != s.outputs.end();
}

} // namespace crossfv
