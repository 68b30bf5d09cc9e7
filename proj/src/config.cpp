#include "tsalc/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace tsalc {

using nlohmann::json;

namespace {

// Reads the keys of one object, remembering which ones were consumed so that
// leftovers can be reported.
class ObjectReader {
public:
    ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ConfigError(where() + " must be an object");
    }

    template <class T, class Fn>
    void read(const std::string& key, T& out, Fn&& convert) {
        seen_.insert(key);
        auto it = j_.find(key);
        if (it == j_.end()) return;
        try {
            out = convert(*it, child(key));
        } catch (const json::exception& e) {
            throw ConfigError(child(key) + ": " + e.what());
        }
    }

    template <class T>
    void read(const std::string& key, T& out) {
        read(key, out, [](const json& v, const std::string&) { return v.get<T>(); });
    }

    template <class T>
    void read_optional(const std::string& key, std::optional<T>& out) {
        seen_.insert(key);
        auto it = j_.find(key);
        if (it == j_.end() || it->is_null()) {
            out.reset();
            return;
        }
        try {
            out = it->get<T>();
        } catch (const json::exception& e) {
            throw ConfigError(child(key) + ": " + e.what());
        }
    }

    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!seen_.count(it.key())) throw ConfigError("unknown key " + child(it.key()));
    }

private:
    std::string child(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
    std::string where() const { return path_.empty() ? "config" : path_; }

    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

PolynomialRows read_rows(const json& v, const std::string& path) {
    if (!v.is_array()) throw ConfigError(path + " must be an array of rows");
    PolynomialRows rows;
    for (const auto& row : v) {
        if (!row.is_array()) throw ConfigError(path + " rows must be arrays of monomials");
        std::vector<MonomialConfig> terms;
        for (const auto& t : row) {
            ObjectReader r(t, path + "[]");
            MonomialConfig m;
            r.read("coef", m.coef);
            r.read("powers", m.powers);
            r.finish();
            terms.push_back(std::move(m));
        }
        rows.push_back(std::move(terms));
    }
    return rows;
}

json write_rows(const PolynomialRows& rows) {
    json out = json::array();
    for (const auto& row : rows) {
        json jr = json::array();
        for (const auto& t : row) jr.push_back({{"coef", t.coef}, {"powers", t.powers}});
        out.push_back(std::move(jr));
    }
    return out;
}

template <class T>
T read_section(const json& v, const std::string& path, void (*fill)(ObjectReader&, T&)) {
    ObjectReader r(v, path);
    T out;
    fill(r, out);
    r.finish();
    return out;
}

void fill_noise(ObjectReader& r, NoiseConfig& c) {
    r.read("family", c.family);
    r.read("scale", c.scale);
    r.read("truncation", c.truncation);
}

void fill_plant(ObjectReader& r, PlantConfig& c) {
    r.read("kind", c.kind);
    r.read("a", c.a);
    r.read("g_over_l", c.g_over_l);
    r.read("damping", c.damping);
    r.read("mu", c.mu);
    r.read("dt", c.dt);
    r.read("state_dim", c.state_dim);
    r.read("input_dim", c.input_dim);
    r.read("dynamics", c.dynamics, read_rows);
    r.read("noise", c.noise, [](const json& v, const std::string& p) { return read_section(v, p, fill_noise); });
    r.read("box_lower", c.box_lower);
    r.read("box_upper", c.box_upper);
    r.read("x0", c.x0);
}

void fill_law(ObjectReader& r, LawConfig& c) {
    r.read("kind", c.kind);
    r.read("gain", c.gain);
    r.read("reference", c.reference);
    r.read("offset", c.offset);
    r.read("channels", c.channels, read_rows);
}

void fill_cost(ObjectReader& r, CostConfig& c) {
    r.read("kind", c.kind);
    r.read("Q", c.Q);
    r.read("R", c.R);
    r.read("alpha_risk", c.alpha_risk);
    r.read_optional("floor", c.floor);
    r.read_optional("lipschitz", c.lipschitz);
}

void fill_grid(ObjectReader& r, GridConfig& c) {
    r.read("vertices", c.vertices);
    r.read("samples", c.samples);
}

void fill_hypotheses(ObjectReader& r, HypothesisConfig& c) {
    r.read("generator", c.generator);
    r.read("count", c.count);
    r.read("realizable", c.realizable);
    r.read("rollouts", c.rollouts);
    r.read("rbf_centers", c.rbf_centers);
    r.read("rbf_length_scale", c.rbf_length_scale);
    r.read("rbf_amplitude", c.rbf_amplitude);
    r.read("quadratic_curvature", c.quadratic_curvature);
}

void fill_metric(ObjectReader& r, MetricSection& c) {
    r.read("metric", c.metric);
    r.read("delta", c.delta);
}

template <class T>
auto section(void (*fill)(ObjectReader&, T&)) {
    return [fill](const json& v, const std::string& p) { return read_section(v, p, fill); };
}

Matrix dense(const DenseRows& rows, const std::string& what) {
    if (rows.empty()) throw ConfigError(what + " must have at least one row");
    const std::size_t cols = rows.front().size();
    Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != cols || cols == 0) throw ConfigError(what + " must be a nonempty rectangular matrix");
        for (std::size_t j = 0; j < cols; ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
    return m;
}

Vector vec_or_zero(const std::vector<double>& v, int size, const std::string& what) {
    if (v.empty()) return Vector::Zero(size);
    if (static_cast<int>(v.size()) != size) throw ConfigError(what + " has the wrong length");
    return to_eigen(v);
}

}  // namespace

ExperimentConfig parse_config(const json& j) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    auto sv = j.find("schema_version");
    if (sv == j.end()) throw ConfigError("config is missing schema_version");
    if (!sv->is_number_integer() || sv->get<int>() != kSchemaVersion)
        throw ConfigError("unsupported schema_version (expected " + std::to_string(kSchemaVersion) + ")");

    ObjectReader r(j, "");
    ExperimentConfig c;
    r.read("schema_version", c.schema_version);
    r.read("name", c.name);
    r.read("plant", c.plant, section(fill_plant));
    r.read("law", c.law, section(fill_law));
    r.read_optional("gamma", c.gamma);
    r.read("anchor", c.anchor);
    r.read("cost", c.cost, section(fill_cost));
    r.read("horizon", c.horizon);
    r.read("grid", c.grid, section(fill_grid));
    r.read("hypotheses", c.hypotheses, section(fill_hypotheses));
    r.read("segments", c.segments);
    r.read("metric", c.metric, section(fill_metric));
    r.read("selection", c.selection);
    r.read("seed", c.seed);
    r.read("replicates", c.replicates);
    r.read("output_dir", c.output_dir);
    r.read("quadrature_nodes", c.quadrature_nodes);
    r.finish();
    return c;
}

json serialize_config(const ExperimentConfig& c) {
    json j;
    j["schema_version"] = c.schema_version;
    j["name"] = c.name;
    j["plant"] = {
        {"kind", c.plant.kind},
        {"a", c.plant.a},
        {"g_over_l", c.plant.g_over_l},
        {"damping", c.plant.damping},
        {"mu", c.plant.mu},
        {"dt", c.plant.dt},
        {"state_dim", c.plant.state_dim},
        {"input_dim", c.plant.input_dim},
        {"dynamics", write_rows(c.plant.dynamics)},
        {"noise", {{"family", c.plant.noise.family}, {"scale", c.plant.noise.scale}, {"truncation", c.plant.noise.truncation}}},
        {"box_lower", c.plant.box_lower},
        {"box_upper", c.plant.box_upper},
        {"x0", c.plant.x0},
    };
    j["law"] = {
        {"kind", c.law.kind},
        {"gain", c.law.gain},
        {"reference", c.law.reference},
        {"offset", c.law.offset},
        {"channels", write_rows(c.law.channels)},
    };
    j["gamma"] = c.gamma ? json(*c.gamma) : json(nullptr);
    j["anchor"] = c.anchor;
    j["cost"] = {
        {"kind", c.cost.kind},
        {"Q", c.cost.Q},
        {"R", c.cost.R},
        {"alpha_risk", c.cost.alpha_risk},
        {"floor", c.cost.floor ? json(*c.cost.floor) : json(nullptr)},
        {"lipschitz", c.cost.lipschitz ? json(*c.cost.lipschitz) : json(nullptr)},
    };
    j["horizon"] = c.horizon;
    j["grid"] = {{"vertices", c.grid.vertices}, {"samples", c.grid.samples}};
    j["hypotheses"] = {
        {"generator", c.hypotheses.generator},
        {"count", c.hypotheses.count},
        {"realizable", c.hypotheses.realizable},
        {"rollouts", c.hypotheses.rollouts},
        {"rbf_centers", c.hypotheses.rbf_centers},
        {"rbf_length_scale", c.hypotheses.rbf_length_scale},
        {"rbf_amplitude", c.hypotheses.rbf_amplitude},
        {"quadratic_curvature", c.hypotheses.quadratic_curvature},
    };
    j["segments"] = c.segments;
    j["metric"] = {{"metric", c.metric.metric}, {"delta", c.metric.delta}};
    j["selection"] = c.selection;
    j["seed"] = c.seed;
    j["replicates"] = c.replicates;
    j["output_dir"] = c.output_dir;
    j["quadrature_nodes"] = c.quadrature_nodes;
    return j;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("config " + path + " is not valid JSON: " + e.what());
    }
    return parse_config(j);
}

void apply_override(json& doc, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("override must look like key=value: " + assignment);
    const std::string key = assignment.substr(0, eq);
    const std::string text = assignment.substr(eq + 1);
    json value = json::parse(text, nullptr, false);
    if (value.is_discarded()) value = text;

    json* node = &doc;
    std::size_t start = 0;
    while (true) {
        const auto dot = key.find('.', start);
        const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (part.empty()) throw ConfigError("override key has an empty component: " + key);
        if (!node->is_object()) throw ConfigError("override path is not an object: " + key);
        if (dot == std::string::npos) {
            (*node)[part] = std::move(value);
            return;
        }
        node = &(*node)[part];
        if (node->is_null()) *node = json::object();
        start = dot + 1;
    }
}

void validate_config(const ExperimentConfig& c) {
    auto check = [](bool ok, const std::string& msg) {
        if (!ok) throw ConfigError(msg);
    };
    check(c.schema_version == kSchemaVersion, "unsupported schema_version");
    check(c.segments >= 1, "segments (T) must be at least 1");
    check(c.horizon >= 1, "horizon (K) must be at least 1");
    check(c.hypotheses.count >= 2, "hypotheses.count must be at least 2");
    check(c.hypotheses.rollouts >= 1, "hypotheses.rollouts must be at least 1");
    check(c.hypotheses.generator == "rbf" || c.hypotheses.generator == "quadratic", "hypotheses.generator must be rbf or quadratic");
    check(c.replicates >= 1, "replicates must be at least 1");
    check(c.metric.delta > 0.0, "metric.delta must be positive");
    check(c.metric.metric == "hellinger" || c.metric.metric == "kl", "metric.metric must be hellinger or kl");
    check(c.selection == "argmax" || c.selection == "density", "selection must be argmax or density");
    check(c.selection != "density" || c.hypotheses.realizable, "density selection needs a realizable hypothesis");
    check(c.grid.vertices + c.grid.samples >= 1, "grid must contain at least one controller");
    check(c.quadrature_nodes >= 1, "quadrature_nodes must be positive");
    check(!c.gamma || *c.gamma > 0.0, "gamma must be positive");
    check(c.cost.kind == "quadratic" || c.cost.kind == "risk_sensitive", "cost.kind must be quadratic or risk_sensitive");
    check(c.law.kind == "linear_feedback" || c.law.kind == "polynomial", "law.kind must be linear_feedback or polynomial");
    check(c.plant.noise.family == "none" || c.plant.noise.family == "truncated_gaussian",
          "plant.noise.family must be none or truncated_gaussian");
    check(c.plant.kind == "logistic" || c.plant.kind == "pendulum" || c.plant.kind == "vanderpol" ||
              c.plant.kind == "polynomial",
          "plant.kind must be logistic, pendulum, vanderpol or polynomial");
    try {
        const PlantModel plant = build_plant(c.plant);
        const BasisSet basis = build_basis(c, plant);
        validate_spec(build_cost(c, plant.state_dim(), plant.input_dim()));
    } catch (const InvalidInput& e) {
        throw ConfigError(e.what());
    }
}

PlantModel build_plant(const PlantConfig& c) {
    NoiseSpec noise{c.noise.family, c.noise.scale, c.noise.truncation};
    require(noise.family == "none" || (noise.scale >= 0.0 && noise.truncation > 0.0), "invalid noise parameters");
    StateBox box(to_eigen(c.box_lower), to_eigen(c.box_upper));
    Vector x0 = to_eigen(c.x0);
    if (c.kind == "logistic") return PlantModel::logistic(c.a, noise, box, x0);
    if (c.kind == "pendulum") return PlantModel::pendulum(c.g_over_l, c.damping, c.dt, noise, box, x0);
    if (c.kind == "vanderpol") return PlantModel::vanderpol(c.mu, c.dt, noise, box, x0);
    if (c.kind == "polynomial") {
        std::vector<std::vector<PlantModel::Term>> rows;
        for (const auto& row : c.dynamics) {
            std::vector<PlantModel::Term> terms;
            for (const auto& t : row) terms.push_back({t.coef, t.powers});
            rows.push_back(std::move(terms));
        }
        return PlantModel::polynomial(c.state_dim, c.input_dim, std::move(rows), noise, box, x0);
    }
    throw ConfigError("unknown plant kind " + c.kind);
}

InitialLaw build_law(const LawConfig& c, int n) {
    if (c.kind == "linear_feedback") {
        const Matrix gain = dense(c.gain, "law.gain");
        if (gain.cols() != n) throw ConfigError("law.gain must have one column per state");
        const int m = static_cast<int>(gain.rows());
        return InitialLaw::linear_feedback(gain, vec_or_zero(c.reference, n, "law.reference"),
                                           vec_or_zero(c.offset, m, "law.offset"));
    }
    if (c.kind == "polynomial") {
        std::vector<std::vector<InitialLaw::Term>> channels;
        for (const auto& row : c.channels) {
            std::vector<InitialLaw::Term> terms;
            for (const auto& t : row) terms.push_back({t.coef, t.powers});
            channels.push_back(std::move(terms));
        }
        return InitialLaw::polynomial(n, std::move(channels));
    }
    throw ConfigError("unknown law kind " + c.kind);
}

BasisSet build_basis(const ExperimentConfig& c, const PlantModel& plant) {
    const int n = plant.state_dim();
    InitialLaw law = build_law(c.law, n);
    if (law.input_dim() != plant.input_dim()) throw ConfigError("law output count does not match the plant input count");
    const double gamma = c.gamma ? *c.gamma : BasisSet::default_gamma(n);
    return BasisSet(std::move(law), vec_or_zero(c.anchor, n, "anchor"), gamma, plant.box());
}

CostSpec build_cost(const ExperimentConfig& c, int n, int m) {
    CostSpec spec;
    spec.kind = c.cost.kind == "risk_sensitive" ? CostKind::risk_sensitive : CostKind::quadratic;
    spec.Q = dense(c.cost.Q, "cost.Q");
    spec.R = dense(c.cost.R, "cost.R");
    if (spec.Q.rows() != n) throw ConfigError("cost.Q must be n x n");
    if (spec.R.rows() != m) throw ConfigError("cost.R must be m x m");
    spec.alpha_risk = c.cost.alpha_risk;
    spec.horizon = c.horizon;
    spec.floor = c.cost.floor ? *c.cost.floor : CostSpec::default_floor(spec.Q);
    spec.lipschitz = c.cost.lipschitz;
    return spec;
}

}  // namespace tsalc
