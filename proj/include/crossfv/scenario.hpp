#pragma once
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "crossfv/model.hpp"

namespace crossfv {

/// Catalog of named analytic functions; every potential, frozen species and
/// initial datum of the built-in scenarios is assembled from these.
struct FunctionSpec {
    enum class Kind {
        constant,
        gaussian,          // exp(-|x - c|^2 / (2 sigma^2)) / sqrt(2 pi sigma^2)
        sum,               // weighted sum of sub-functions
        scaled,            // factor * sub-function
        piecewise_power,   // (p - x)^a for x < p, (x - p)^b for x >= p (1D)
        cosine_product,    // base + sum_axes cos(k * coord)
        ring_sine_barrier, // windowed sine ring (2D)
        quadratic_well,    // strength * |x - c|^2
    };

    Kind kind = Kind::constant;
    double value = 0;
    std::vector<double> center;
    double sigma = 1;
    double factor = 1;
    double pivot = 0;
    double left_exponent = 2;
    double right_exponent = 5;
    double wavenumber = 1;
    double base = 1;
    double strength = 1;
    std::vector<std::pair<double, std::shared_ptr<FunctionSpec>>> terms;
    std::shared_ptr<FunctionSpec> child;
    std::optional<double> normalize_mass;  // rescale so the grid quadrature mass matches
};

/// Evaluable form of a FunctionSpec for a fixed dimension.
struct AnalyticFunction {
    Func1D f1;  // set when dim == 1
    Func2D f2;  // set when dim == 2
};

/// Builds the closure; mass normalization uses the cell-average quadrature
/// on the given grid. Throws validation_error on kind/dimension mismatches.
AnalyticFunction instantiate(const FunctionSpec& spec, const Grid& grid);

enum class ModelKind { scalar, two_species };
enum class OutputKind { trajectory, diagnostics, decay_fit, plot_script };

struct StepControlConfig {
    std::optional<double> dt_fixed;
    double cfl_safety = 0.5;
    double dt_min = 1e-12;
};

struct ScalarConfig {
    double delta1 = 0, delta2 = 0, delta3 = 0;
    double epsilon = 1e-7;
    FunctionSpec b;
    FunctionSpec V;
    FunctionSpec r0;
};

struct TwoSpeciesConfig {
    double D1 = 1, D2 = 1;
    double d11 = 0, d12 = 0, d13 = 0, d21 = 0, d22 = 0, d23 = 0;
    double epsilon = 1e-7;
    FunctionSpec V1, V2, u1_0, u2_0;
};

/// A fully validated, deterministic run description.
struct Scenario {
    std::string name;
    std::string description;
    ModelKind model = ModelKind::scalar;
    int dim = 1;
    double x_min = 0, x_max = 1, y_min = 0, y_max = 1;
    int nx = 2, ny = 2;
    ScalarConfig scalar;
    TwoSpeciesConfig two_species;
    double t_end = 1;
    StepControlConfig step;
    int stride = 10;  // records every this many accepted steps
    std::vector<double> snapshot_times;
    std::vector<OutputKind> outputs;
    double stationary_tol = 1e-10;
    double stationary_t_max = 400;
    std::optional<std::pair<double, double>> fit_window;
    std::optional<double> reference_slope;  // drawn in the emitted plot script
    std::vector<std::string> warnings;      // regime flags, not errors
};

/// Parses and validates a scenario document; unknown keys anywhere are
/// errors. Validation samples b, V and the initial data on the actual grid
/// (b >= 0, finite V, non-negative initial averages) and collects regime
/// warnings (ellipticity margin, large delta).
Scenario load_scenario(const std::filesystem::path& path);
Scenario load_scenario_json(const nlohmann::json& doc, const std::string& name);

Grid make_grid(const Scenario& s);
ScalarModelParams build_scalar_params(const Scenario& s, const Grid& grid);
TwoSpeciesParams build_two_species_params(const Scenario& s, const Grid& grid);
/// Initial fields by cell averaging (one for scalar, two for two_species).
std::vector<Field> initial_fields(const Scenario& s, const Grid& grid);

struct PresetInfo {
    std::string name;
    std::string description;
};

/// Built-in scenario catalog: the figure presets plus validation demos.
const std::vector<PresetInfo>& list_presets();
std::optional<std::string> preset_json(const std::string& name);
bool has_output(const Scenario& s, OutputKind kind);

} // namespace crossfv
