#include "nlrs_cli/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <fmt/format.h>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace nlrs::cli {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t");
    return std::string(s.substr(b, e - b + 1));
}

double to_double(const std::string& key, std::string_view text) {
    const std::string t = trim(text);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
        throw std::invalid_argument(fmt::format("{}: '{}' is not a number", key, t));
    return v;
}

template <class Int>
Int to_int(const std::string& key, std::string_view text) {
    const std::string t = trim(text);
    Int v{};
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
        throw std::invalid_argument(fmt::format("{}: '{}' is not an integer", key, t));
    return v;
}

bool to_bool(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    if (t == "true" || t == "1") return true;
    if (t == "false" || t == "0") return false;
    throw std::invalid_argument(fmt::format("{}: '{}' is not a boolean", key, t));
}

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> out;
    if (trim(text).empty()) return out;
    std::string item;
    std::istringstream is(text);
    while (std::getline(is, item, sep)) out.push_back(trim(item));
    return out;
}

Point to_point(const std::string& key, const std::string& text) {
    const auto parts = split(text, ':');
    if (parts.empty() || parts.size() > 2) throw std::invalid_argument(fmt::format("{}: bad point '{}'", key, text));
    return {to_double(key, parts[0]), parts.size() == 2 ? to_double(key, parts[1]) : 0.0};
}

std::string num(double v) { return fmt::format("{}", v); }

std::string point_str(const Point& p) { return p[1] == 0.0 ? num(p[0]) : num(p[0]) + ":" + num(p[1]); }

template <class T, class F>
std::string join(const std::vector<T>& v, F f) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + f(v[i]);
    return out;
}

std::string scope_kind_name(ScopeSpec::Kind k) {
    switch (k) {
    case ScopeSpec::Kind::constant:
        return "constant";
    case ScopeSpec::Kind::saturating:
        return "saturating";
    case ScopeSpec::Kind::infinite:
        return "infinite";
    }
    return {};
}

std::string coeff_kind_name(CoeffProfile::Kind k) {
    switch (k) {
    case CoeffProfile::Kind::constant:
        return "constant";
    case CoeffProfile::Kind::lorentzian:
        return "lorentzian";
    case CoeffProfile::Kind::gaussian:
        return "gaussian";
    }
    return {};
}

struct Key {
    std::string section;
    std::string name;
    std::function<void(RunConfig&, const std::string& key, const std::string& value)> set;
    std::function<std::string(const RunConfig&)> get;
};

#define NLRS_DOUBLE(sec, name, member)                                                            \
    Key {                                                                                         \
        sec, name, [](RunConfig& c, const std::string& k, const std::string& v) { c.member = to_double(k, v); }, \
            [](const RunConfig& c) { return num(c.member); }                                      \
    }
#define NLRS_INT(sec, name, member, type)                                                               \
    Key {                                                                                               \
        sec, name, [](RunConfig& c, const std::string& k, const std::string& v) { c.member = to_int<type>(k, v); }, \
            [](const RunConfig& c) { return fmt::format("{}", c.member); }                              \
    }

std::vector<Key> coeff_keys(const std::string& prefix, CoeffProfile CoeffSpec::*which) {
    return {
        {"coeffs", prefix + "_kind",
         [which](RunConfig& c, const std::string&, const std::string& v) {
             (c.coeffs.*which).kind = CoeffProfile::kind_from_name(trim(v));
         },
         [which](const RunConfig& c) { return coeff_kind_name((c.coeffs.*which).kind); }},
        {"coeffs", prefix + "_inf",
         [which](RunConfig& c, const std::string& k, const std::string& v) { (c.coeffs.*which).value_inf = to_double(k, v); },
         [which](const RunConfig& c) { return num((c.coeffs.*which).value_inf); }},
        {"coeffs", prefix + "_center_value",
         [which](RunConfig& c, const std::string& k, const std::string& v) {
             (c.coeffs.*which).value_center = to_double(k, v);
         },
         [which](const RunConfig& c) { return num((c.coeffs.*which).value_center); }},
        {"coeffs", prefix + "_center",
         [which](RunConfig& c, const std::string& k, const std::string& v) { (c.coeffs.*which).center = to_point(k, v); },
         [which](const RunConfig& c) { return point_str((c.coeffs.*which).center); }},
        {"coeffs", prefix + "_width",
         [which](RunConfig& c, const std::string& k, const std::string& v) { (c.coeffs.*which).width = to_double(k, v); },
         [which](const RunConfig& c) { return num((c.coeffs.*which).width); }},
    };
}

const std::vector<Key>& schema() {
    static const std::vector<Key> keys = [] {
        std::vector<Key> k{
            NLRS_DOUBLE("problem", "alpha", alpha),
            NLRS_INT("problem", "n", n, int),
            NLRS_DOUBLE("problem", "p", p),
            NLRS_DOUBLE("problem", "eps", eps),
            {"problem", "frame",
             [](RunConfig& c, const std::string&, const std::string& v) { c.frame = frame_from_name(trim(v)); },
             [](const RunConfig& c) { return to_string(c.frame); }},
            NLRS_DOUBLE("problem", "L", L),
            NLRS_INT("problem", "N", N, std::size_t),

            {"scope", "kind",
             [](RunConfig& c, const std::string&, const std::string& v) {
                 c.scope.kind = ScopeSpec::kind_from_name(trim(v));
             },
             [](const RunConfig& c) { return scope_kind_name(c.scope.kind); }},
            NLRS_DOUBLE("scope", "rho0", scope.rho0),
            NLRS_DOUBLE("scope", "rho_inf", scope.rho_inf),
            NLRS_DOUBLE("scope", "width", scope.width),
        };
        for (auto& key : coeff_keys("Q", &CoeffSpec::Q)) k.push_back(std::move(key));
        for (auto& key : coeff_keys("K", &CoeffSpec::K)) k.push_back(std::move(key));
        std::vector<Key> rest{
            NLRS_DOUBLE("coeffs", "a1", coeffs.a1),
            NLRS_DOUBLE("coeffs", "a2", coeffs.a2),

            NLRS_INT("solver", "max_iters", solver.max_iters, int),
            NLRS_DOUBLE("solver", "tol_g", solver.tol_g),
            NLRS_DOUBLE("solver", "tol_c_rel", solver.tol_c_rel),
            NLRS_DOUBLE("solver", "initial_step", solver.initial_step),
            NLRS_INT("solver", "memory", solver.memory, int),
            NLRS_INT("solver", "max_backtracks", solver.max_backtracks, int),
            {"solver", "clip_negative",
             [](RunConfig& c, const std::string& k, const std::string& v) { c.solver.clip_negative = to_bool(k, v); },
             [](const RunConfig& c) { return std::string(c.solver.clip_negative ? "true" : "false"); }},
            {"solver", "centers",
             [](RunConfig& c, const std::string& k, const std::string& v) {
                 c.solver.centers.clear();
                 for (const auto& s : split(v, ',')) c.solver.centers.push_back(to_point(k, s));
             },
             [](const RunConfig& c) { return join(c.solver.centers, point_str); }},
            NLRS_INT("solver", "restarts", solver.restarts, int),
            NLRS_DOUBLE("solver", "width", solver.width),
            NLRS_DOUBLE("solver", "amplitude", solver.amplitude),
            NLRS_INT("solver", "seed", solver.seed, std::uint64_t),
            NLRS_INT("solver", "threads", solver.threads, int),

            {"sweep", "eps_list",
             [](RunConfig& c, const std::string& k, const std::string& v) {
                 c.eps_list.clear();
                 for (const auto& s : split(v, ',')) c.eps_list.push_back(to_double(k, s));
             },
             [](const RunConfig& c) { return join(c.eps_list, num); }},
            {"sweep", "radii",
             [](RunConfig& c, const std::string& k, const std::string& v) {
                 c.radii.clear();
                 for (const auto& s : split(v, ',')) c.radii.push_back(to_double(k, s));
             },
             [](const RunConfig& c) { return join(c.radii, num); }},
            NLRS_DOUBLE("sweep", "localization_R", localization_R),

            {"experiment", "qk_pairs",
             [](RunConfig& c, const std::string& k, const std::string& v) {
                 c.qk_pairs.clear();
                 for (const auto& s : split(v, ',')) {
                     const auto qk = split(s, ':');
                     if (qk.size() != 2) throw std::invalid_argument(fmt::format("{}: bad pair '{}'", k, s));
                     c.qk_pairs.emplace_back(to_double(k, qk[0]), to_double(k, qk[1]));
                 }
             },
             [](const RunConfig& c) {
                 return join(c.qk_pairs, [](const auto& q) { return num(q.first) + ":" + num(q.second); });
             }},
            NLRS_DOUBLE("experiment", "ladder_L", ladder_L),
            {"experiment", "ladder_N",
             [](RunConfig& c, const std::string& k, const std::string& v) {
                 c.ladder_N.clear();
                 for (const auto& s : split(v, ',')) c.ladder_N.push_back(to_int<std::size_t>(k, s));
             },
             [](const RunConfig& c) { return join(c.ladder_N, [](std::size_t x) { return fmt::format("{}", x); }); }},
            NLRS_DOUBLE("experiment", "scaling_L", scaling_L),
            NLRS_INT("experiment", "scaling_N", scaling_N, std::size_t),
            NLRS_DOUBLE("experiment", "scan_half_width", scan.half_width),
            NLRS_INT("experiment", "scan_points", scan.points, std::size_t),
            {"experiment", "spot_checks",
             [](RunConfig& c, const std::string& k, const std::string& v) {
                 c.spot_checks.clear();
                 for (const auto& s : split(v, ',')) c.spot_checks.push_back(to_point(k, s));
             },
             [](const RunConfig& c) { return join(c.spot_checks, point_str); }},
            NLRS_INT("experiment", "audit_samples", audit_samples, std::size_t),
            {"experiment", "audit_eps",
             [](RunConfig& c, const std::string& k, const std::string& v) {
                 c.audit_eps.clear();
                 for (const auto& s : split(v, ',')) c.audit_eps.push_back(to_double(k, s));
             },
             [](const RunConfig& c) { return join(c.audit_eps, num); }},
            NLRS_DOUBLE("experiment", "audit_L", audit_L),
            NLRS_INT("experiment", "audit_N", audit_N, std::size_t),

            {"output", "dir",
             [](RunConfig& c, const std::string&, const std::string& v) { c.out_dir = trim(v); },
             [](const RunConfig& c) { return c.out_dir.string(); }},
        };
        for (auto& key : rest) k.push_back(std::move(key));
        return k;
    }();
    return keys;
}

#undef NLRS_DOUBLE
#undef NLRS_INT

RunConfig from_ptree(const boost::property_tree::ptree& tree) {
    RunConfig c;
    for (const auto& [section, body] : tree) {
        if (body.empty() && !body.data().empty())
            throw std::invalid_argument(fmt::format("key '{}' outside any section", section));
        bool known_section = false;
        for (const auto& k : schema()) known_section = known_section || k.section == section;
        if (!known_section) throw std::invalid_argument(fmt::format("unknown section [{}]", section));
        for (const auto& [name, value] : body) {
            const Key* key = nullptr;
            for (const auto& k : schema())
                if (k.section == section && k.name == name) key = &k;
            if (!key) throw std::invalid_argument(fmt::format("unknown key '{}' in [{}]", name, section));
            key->set(c, section + "." + name, value.data());
        }
    }
    c.validate();
    return c;
}

}  // namespace

ProblemSpec RunConfig::problem() const {
    ProblemSpec s;
    s.alpha = alpha;
    s.n = n;
    s.p = p;
    s.eps = eps;
    s.frame = frame;
    s.scope = scope;
    s.coeffs = coeffs;
    s.grid = make_grid(n, L, N);
    return s;
}

std::vector<LadderRung> RunConfig::ladder() const {
    std::vector<LadderRung> out;
    for (std::size_t N_ : ladder_N) out.push_back({ladder_L, N_});
    return out;
}

void RunConfig::validate() const {
    problem().validate();
    SolverOptions s = solver;
    s.centers.push_back({0.0, 0.0});
    s.validate();
    if (!(localization_R > 0.0)) throw std::invalid_argument("sweep.localization_R must be positive");
    for (double r : radii)
        if (!(r > 0.0)) throw std::invalid_argument("sweep.radii must be positive");
    for (const auto& [Q, K] : qk_pairs)
        if (!(Q > 0.0 && K > 0.0)) throw std::invalid_argument("experiment.qk_pairs must be positive");
    if (!(scan.half_width > 0.0) || scan.points < 2) throw std::invalid_argument("bad xi scan settings");
    if (out_dir.empty()) throw std::invalid_argument("output.dir is empty");
}

RunConfig parse_config(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open config '" + path.string() + "'");
    std::stringstream ss;
    ss << is.rdbuf();
    return parse_config_string(ss.str());
}

RunConfig parse_config_string(const std::string& text) {
    boost::property_tree::ptree tree;
    std::istringstream is(text);
    try {
        boost::property_tree::read_ini(is, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw std::invalid_argument(std::string("config syntax error: ") + e.what());
    }
    return from_ptree(tree);
}

ConfigEcho echo_config(const RunConfig& config) {
    ConfigEcho e;
    for (const auto& k : schema()) e[k.section][k.name] = k.get(config);
    return e;
}

std::string to_ini(const RunConfig& config) {
    std::string out;
    std::string current;
    for (const auto& k : schema()) {
        if (k.section != current) {
            out += (current.empty() ? "" : "\n") + fmt::format("[{}]\n", k.section);
            current = k.section;
        }
        out += fmt::format("{} = {}\n", k.name, k.get(config));
    }
    return out;
}

}  // namespace nlrs::cli
