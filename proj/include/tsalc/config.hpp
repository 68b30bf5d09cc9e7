#pragma once

// Experiment configuration: a JSON document with a schema version. Missing
// keys take the defaults below, unknown keys are rejected.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "tsalc/cost.hpp"
#include "tsalc/function_space.hpp"
#include "tsalc/plant_sim.hpp"

namespace tsalc {

inline constexpr int kSchemaVersion = 1;

struct MonomialConfig {
    double coef = 0.0;
    std::vector<int> powers;

    bool operator==(const MonomialConfig&) const = default;
};

using PolynomialRows = std::vector<std::vector<MonomialConfig>>;
using DenseRows = std::vector<std::vector<double>>;

struct NoiseConfig {
    std::string family = "none";  // none | truncated_gaussian
    double scale = 0.0;
    double truncation = 3.0;

    bool operator==(const NoiseConfig&) const = default;
};

struct PlantConfig {
    std::string kind = "logistic";  // logistic | pendulum | vanderpol | polynomial
    double a = 2.5;
    double g_over_l = 9.81;
    double damping = 0.1;
    double mu = 1.0;
    double dt = 0.05;
    int state_dim = 1;  // polynomial only
    int input_dim = 1;  // polynomial only
    PolynomialRows dynamics;  // polynomial only, powers over (x, u)
    NoiseConfig noise;
    std::vector<double> box_lower{-1.0};
    std::vector<double> box_upper{1.0};
    std::vector<double> x0{0.4};

    bool operator==(const PlantConfig&) const = default;
};

struct LawConfig {
    std::string kind = "linear_feedback";  // linear_feedback | polynomial
    DenseRows gain{{1.25}};                // m x n
    std::vector<double> reference;         // empty = zeros
    std::vector<double> offset;            // empty = zeros
    PolynomialRows channels;               // polynomial only, powers over x

    bool operator==(const LawConfig&) const = default;
};

struct CostConfig {
    std::string kind = "quadratic";  // quadratic | risk_sensitive
    DenseRows Q{{1.0}};
    DenseRows R{{0.1}};
    double alpha_risk = 0.0;
    std::optional<double> floor;      // default 1e-6 * trace(Q)
    std::optional<double> lipschitz;  // L_J

    bool operator==(const CostConfig&) const = default;
};

struct GridConfig {
    std::size_t vertices = 2;
    std::size_t samples = 6;

    bool operator==(const GridConfig&) const = default;
};

struct HypothesisConfig {
    std::string generator = "rbf";  // rbf | quadratic
    std::size_t count = 20;         // N_h, including the injected truth
    bool realizable = true;
    std::size_t rollouts = 1;
    int rbf_centers = 3;
    double rbf_length_scale = 0.3;
    double rbf_amplitude = 1.0;
    double quadratic_curvature = 1.0;

    bool operator==(const HypothesisConfig&) const = default;
};

struct MetricSection {
    std::string metric = "hellinger";  // hellinger | kl
    double delta = 0.05;

    bool operator==(const MetricSection&) const = default;
};

struct ExperimentConfig {
    int schema_version = kSchemaVersion;
    std::string name = "experiment";
    PlantConfig plant;
    LawConfig law;
    std::optional<double> gamma;  // default 2^n
    std::vector<double> anchor;   // empty = zeros
    CostConfig cost;
    std::size_t horizon = 20;     // K
    GridConfig grid;
    HypothesisConfig hypotheses;
    std::size_t segments = 200;   // T
    MetricSection metric;
    std::string selection = "argmax";  // argmax | density
    std::uint64_t seed = 1;
    std::size_t replicates = 1;
    std::string output_dir = "out";
    int quadrature_nodes = 16;

    bool operator==(const ExperimentConfig&) const = default;
};

/// Throws ConfigError on unknown keys, wrong types or a missing/unsupported schema_version.
ExperimentConfig parse_config(const nlohmann::json& j);
nlohmann::json serialize_config(const ExperimentConfig& c);

ExperimentConfig load_config(const std::string& path);

/// Applies "a.b.c=value" to a config document. The value is read as JSON when
/// it parses, else as a string.
void apply_override(nlohmann::json& doc, const std::string& assignment);

/// Semantic checks (ranges, dimensions, kinds). Throws ConfigError.
void validate_config(const ExperimentConfig& c);

// --- builders ---------------------------------------------------------------

PlantModel build_plant(const PlantConfig& c);
InitialLaw build_law(const LawConfig& c, int n);
BasisSet build_basis(const ExperimentConfig& c, const PlantModel& plant);
CostSpec build_cost(const ExperimentConfig& c, int n, int m);

}  // namespace tsalc
