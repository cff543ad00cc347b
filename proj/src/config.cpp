#include "corrnoise/config.hpp"

#include "corrnoise/errors.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace corrnoise {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double to_double(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    if (t == "inf" || t == "infinity") return std::numeric_limits<double>::infinity();
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
    if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
        throw ConfigError("config key '" + key + "': '" + text + "' is not a number");
    }
    return value;
}

long to_long(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    long value = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
    if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
        throw ConfigError("config key '" + key + "': '" + text + "' is not an integer");
    }
    return value;
}

int to_int(const std::string& key, const std::string& text) {
    const long v = to_long(key, text);
    if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max())
        throw ConfigError("config key '" + key + "': value out of range");
    return static_cast<int>(v);
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::vector<double> to_doubles(const std::string& key, const std::string& text) {
    std::vector<double> out;
    for (const auto& item : split_list(text)) out.push_back(to_double(key, item));
    return out;
}

std::vector<int> to_ints(const std::string& key, const std::string& text) {
    std::vector<int> out;
    for (const auto& item : split_list(text)) out.push_back(to_int(key, item));
    return out;
}

Topology parse_topology(const std::string& s) {
    if (s == "chain") return Topology::Chain;
    if (s == "uncoupled") return Topology::Uncoupled;
    throw ConfigError("topology must be 'chain' or 'uncoupled', got '" + s + "'");
}

Fault parse_fault(const std::string& s) {
    if (s == "none") return Fault::None;
    if (s == "sign-flip") return Fault::SignFlip;
    if (s == "large-dt") return Fault::LargeDt;
    throw ConfigError("inject_fault must be none, sign-flip or large-dt, got '" + s + "'");
}

} // namespace

Scenario parse_scenario(const std::string& name) {
    if (name == "evolve") return Scenario::Evolve;
    if (name == "sweep-xi") return Scenario::SweepXi;
    if (name == "blocking") return Scenario::Blocking;
    if (name == "strobe") return Scenario::Strobe;
    if (name == "validate") return Scenario::Validate;
    throw ConfigError("unknown scenario '" + name + "'");
}

std::string scenario_name(Scenario scenario) {
    switch (scenario) {
    case Scenario::Evolve: return "evolve";
    case Scenario::SweepXi: return "sweep-xi";
    case Scenario::Blocking: return "blocking";
    case Scenario::Strobe: return "strobe";
    case Scenario::Validate: return "validate";
    }
    return "unknown";
}

EngineChoice parse_engine(const std::string& name) {
    if (name == "full") return EngineChoice::Full;
    if (name == "reduced") return EngineChoice::Reduced;
    if (name == "auto") return EngineChoice::Auto;
    throw ConfigError("engine must be full, reduced or auto, got '" + name + "'");
}

std::string engine_name(EngineChoice engine) {
    switch (engine) {
    case EngineChoice::Full: return "full";
    case EngineChoice::Reduced: return "reduced";
    case EngineChoice::Auto: return "auto";
    }
    return "unknown";
}

ScenarioConfig ScenarioConfig::defaults(Scenario scenario) {
    ScenarioConfig c;
    c.scenario = scenario;
    switch (scenario) {
    case Scenario::Evolve:
        break;
    case Scenario::SweepXi:
        c.v = 1.0;
        c.n_list = {6, 10, 14, 20, 26};
        break;
    case Scenario::Blocking:
        c.topology = Topology::Uncoupled;
        c.nu = 1.0;
        c.xi = kPerfectCorrelation;
        c.engine = EngineChoice::Reduced;
        c.n_list = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
        break;
    case Scenario::Strobe:
        c.nu = 1.0;
        c.xi = 100.0;
        break;
    case Scenario::Validate:
        break;
    }
    return c;
}

NetworkSpec ScenarioConfig::network(int n) const {
    NetworkSpec net = topology == Topology::Chain && n >= 2 ? NetworkSpec::chain(n, g, omega_q, v, nu)
                                                            : NetworkSpec::uncoupled(n, omega_q, v, nu);
    if (!dephasing_couplings.empty()) {
        if (static_cast<int>(dephasing_couplings.size()) != n)
            throw ConfigError("dephasing_couplings must list one value per spin");
        net.dephasing_couplings = Eigen::Map<const Eigen::VectorXd>(dephasing_couplings.data(), n);
    }
    if (!relaxation_couplings.empty()) {
        if (static_cast<int>(relaxation_couplings.size()) != n)
            throw ConfigError("relaxation_couplings must list one value per spin");
        net.relaxation_couplings = Eigen::Map<const Eigen::VectorXd>(relaxation_couplings.data(), n);
    }
    return net;
}

NoiseSpec ScenarioConfig::noise(double at_xi) const {
    return NoiseSpec{at_xi, c_dephasing, c_relax_down, c_relax_up};
}

std::vector<double> ScenarioConfig::xi_grid() const {
    if (!xi_list.empty()) return xi_list;
    std::vector<double> grid;
    if (xi_points == 1) return {xi_min};
    for (int i = 0; i < xi_points; ++i) {
        grid.push_back(xi_min * std::pow(xi_max / xi_min, static_cast<double>(i) / (xi_points - 1)));
    }
    return grid;
}

void ScenarioConfig::validate() const {
    auto fail = [](const std::string& msg) { throw ConfigError(msg); };
    if (n_spins < 1) fail("n_spins must be >= 1");
    if (!(g > 0.0)) fail("g must be > 0");
    if (!(omega_q > 0.0)) fail("omega_q must be > 0");
    if (v < 0.0 || nu < 0.0) fail("v and nu must be >= 0");
    if (std::isnan(xi) || xi < 0.0) fail("xi must be >= 0");
    if (c_dephasing < 0.0 || c_relax_down < 0.0 || c_relax_up < 0.0) fail("bath amplitudes must be >= 0");
    if (dt < 0.0 || t_final < 0.0) fail("dt and t_final must be >= 0");
    if (sample_every < 0) fail("sample_every must be >= 0");
    if (workers < 0) fail("workers must be >= 0");
    switch (scenario) {
    case Scenario::Evolve:
        if (initial_site < 1 || initial_site > n_spins) fail("initial_site must be in 1..n_spins");
        break;
    case Scenario::SweepXi: {
        if (n_list.size() < 2) fail("sweep-xi needs at least two chain lengths in n_list");
        for (int n : n_list)
            if (n < 2) fail("sweep-xi chain lengths must be >= 2");
        const auto grid = xi_grid();
        if (grid.size() < 8) fail("sweep-xi needs at least 8 xi points");
        for (std::size_t i = 0; i < grid.size(); ++i) {
            if (!(grid[i] > 0.0) || (i > 0 && !(grid[i] > grid[i - 1])))
                fail("xi grid must be positive and strictly increasing");
        }
        if (topology != Topology::Chain) fail("sweep-xi needs topology = chain");
        break;
    }
    case Scenario::Blocking:
        if (n_list.empty()) fail("blocking needs n_list");
        for (int n : n_list)
            if (n < 1) fail("blocking spin counts must be >= 1");
        if (topology != Topology::Uncoupled) fail("blocking needs topology = uncoupled (zero coupling matrix)");
        if (c_relax_up != 0.0) fail("blocking needs c_relax_up = 0");
        if (engine == EngineChoice::Full) fail("blocking runs on the reduced engine (engine = reduced or auto)");
        break;
    case Scenario::Strobe:
        if (passes < 40) fail("strobe needs passes >= 40");
        if (topology != Topology::Chain || n_spins < 2) fail("strobe needs a chain of at least two spins");
        if (nu == 0.0 && relaxation_couplings.empty()) fail("strobe needs relaxation noise (nu > 0)");
        if (c_relax_down <= 0.0) fail("strobe needs c_relax_down > 0");
        if (c_relax_up != 0.0 || engine == EngineChoice::Full)
            fail("strobe runs on the reduced engine (c_relax_up = 0, engine = reduced or auto)");
        break;
    case Scenario::Validate:
        break;
    }
}

ConfigMap parse_config_text(const std::string& text) {
    ConfigMap out;
    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
        if (!out.emplace(key, value).second) {
            throw ConfigError("config line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
        }
    }
    return out;
}

ConfigMap read_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config_text(buffer.str());
}

ScenarioConfig make_config(Scenario scenario, const ConfigMap& entries) {
    ScenarioConfig c = ScenarioConfig::defaults(scenario);
    for (const auto& [key, value] : entries) {
        if (key == "scenario") {
            if (parse_scenario(value) != scenario)
                throw ConfigError("config is for scenario '" + value + "', not '" + scenario_name(scenario) + "'");
        } else if (key == "topology") c.topology = parse_topology(value);
        else if (key == "n_spins") c.n_spins = to_int(key, value);
        else if (key == "g") c.g = to_double(key, value);
        else if (key == "omega_q") c.omega_q = to_double(key, value);
        else if (key == "v") c.v = to_double(key, value);
        else if (key == "nu") c.nu = to_double(key, value);
        else if (key == "dephasing_couplings") c.dephasing_couplings = to_doubles(key, value);
        else if (key == "relaxation_couplings") c.relaxation_couplings = to_doubles(key, value);
        else if (key == "xi") c.xi = to_double(key, value);
        else if (key == "c_dephasing") c.c_dephasing = to_double(key, value);
        else if (key == "c_relax_down") c.c_relax_down = to_double(key, value);
        else if (key == "c_relax_up") c.c_relax_up = to_double(key, value);
        else if (key == "engine") c.engine = parse_engine(value);
        else if (key == "dt") c.dt = to_double(key, value);
        else if (key == "t_final") c.t_final = to_double(key, value);
        else if (key == "sample_every") c.sample_every = to_int(key, value);
        else if (key == "initial_site") c.initial_site = to_int(key, value);
        else if (key == "xi_list") c.xi_list = to_doubles(key, value);
        else if (key == "xi_min") c.xi_min = to_double(key, value);
        else if (key == "xi_max") c.xi_max = to_double(key, value);
        else if (key == "xi_points") c.xi_points = to_int(key, value);
        else if (key == "n_list") c.n_list = to_ints(key, value);
        else if (key == "passes") c.passes = to_int(key, value);
        else if (key == "inject_fault") c.inject_fault = parse_fault(value);
        else if (key == "out") c.out_dir = value;
        else if (key == "workers") c.workers = to_int(key, value);
        else if (key == "seed") c.seed = to_long(key, value);
        else throw ConfigError("unknown config key '" + key + "'");
    }
    c.validate();
    return c;
}

} // namespace corrnoise
