#include "run_config.hpp"

#include <algorithm>
#include <cmath>

#include "dv/errors.hpp"

namespace dv::cli {

namespace {

using nlohmann::json;

const json kRequired = json::value_t::discarded;

ParamSpec num(std::string key, json def, std::string help) {
    return {std::move(key), ParamKind::Number, std::move(def), std::move(help)};
}
ParamSpec integer(std::string key, json def, std::string help) {
    return {std::move(key), ParamKind::Integer, std::move(def), std::move(help)};
}
ParamSpec str(std::string key, json def, std::string help) {
    return {std::move(key), ParamKind::String, std::move(def), std::move(help)};
}
ParamSpec flag(std::string key, bool def, std::string help) {
    return {std::move(key), ParamKind::Boolean, json(def), std::move(help)};
}

std::vector<ParamSpec> with_common(std::vector<ParamSpec> p) {
    p.push_back(str("output_dir", "out", "directory for all artifacts"));
    p.push_back(integer("seed", 0, "random seed"));
    return p;
}

std::vector<ParamSpec> density_params() {
    return {num("charge", 1.0, "total charge Z of the Gaussian density"),
            num("sigma", 1.0, "Gaussian width"),
            num("k_min", 1e-4, "first momentum grid node"),
            num("k_max", 1e4, "last momentum grid node"),
            integer("grid_points", 2048, "number of log-spaced grid nodes")};
}

std::vector<ParamSpec> concat(std::vector<ParamSpec> a, const std::vector<ParamSpec>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

json parse_number(const ParamSpec& p, const std::string& text) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (...) {
        used = 0;
    }
    if (used != text.size() || text.empty()) throw DomainError("--" + kebab(p.key) + " expects a number, got '" + text + "'");
    return v;
}

json coerce_text(const ParamSpec& p, const std::string& text) {
    switch (p.kind) {
        case ParamKind::Number:
            return parse_number(p, text);
        case ParamKind::Integer: {
            const double v = parse_number(p, text).get<double>();
            if (v != std::floor(v)) throw DomainError("--" + kebab(p.key) + " expects an integer");
            return static_cast<long long>(v);
        }
        case ParamKind::Boolean:
            if (text == "true" || text == "1") return true;
            if (text == "false" || text == "0") return false;
            throw DomainError("--" + kebab(p.key) + " expects true or false");
        case ParamKind::String:
            return text;
    }
    return text;
}

json coerce_json(const ParamSpec& p, const json& v) {
    if (v.is_string()) return coerce_text(p, v.get<std::string>());
    switch (p.kind) {
        case ParamKind::Number:
            if (v.is_number()) return v.get<double>();
            break;
        case ParamKind::Integer:
            if (v.is_number_integer()) return v.get<long long>();
            if (v.is_number_float() && v.get<double>() == std::floor(v.get<double>()))
                return static_cast<long long>(v.get<double>());
            break;
        case ParamKind::Boolean:
            if (v.is_boolean()) return v;
            break;
        case ParamKind::String:
            break;
    }
    throw DomainError("config key '" + p.key + "' has the wrong type");
}

}  // namespace

std::string kebab(const std::string& key) {
    std::string s = key;
    std::replace(s.begin(), s.end(), '_', '-');
    return s;
}

const std::vector<CommandSpec>& command_specs() {
    static const std::vector<CommandSpec> specs = {
        {"multiplier", "tabulate a scalar function on a log-spaced r grid",
         with_common({str("function", "U", "U, U_prime, Phi, U_Lambda, B_Lambda_k, Z_Lambda or E"),
                      num("rmin", 1e-3, "first r"), num("rmax", 1e3, "last r"),
                      integer("points", 200, "number of r values"),
                      num("log_lambda", nullptr, "ln(Lambda), needed by the cutoff functions")})},
        {"renorm", "convert between bare and physical couplings",
         with_common({num("alpha_ph", nullptr, "physical coupling"), num("z3", nullptr, "renormalization constant"),
                      num("alpha_bare", nullptr, "bare coupling"),
                      num("log_lambda", nullptr, "ln(Lambda), used with alpha_bare")})},
        {"expand", "order-by-order coefficients nu_0..nu_N",
         with_common(concat({integer("order", 3, "highest order N"),
                             num("log_lambda", nullptr, "ln(Lambda); omit for the cutoff-free recursion"),
                             flag("f3", false, "include the Monte Carlo F_3 term"),
                             integer("f3_samples", 20000, "Monte Carlo samples per F_3 evaluation"),
                             str("probe_sigmas", "0.5,1,2", "Gaussian probe widths for F_3")},
                            density_params()))},
        {"scf", "linearized self-consistent density and remainder",
         with_common(concat({num("alpha_ph", kRequired, "physical coupling"),
                             num("z3", kRequired, "renormalization constant"),
                             integer("order", 3, "order N of the remainder")},
                            density_params()))},
        {"uehling", "Uehling potential of a Gaussian density",
         with_common(concat({str("route", "both", "direct, fourier or both"), num("xmin", 0.1, "first radius"),
                             num("xmax", 10.0, "last radius"), integer("points", 50, "number of radii")},
                            density_params()))},
        {"lemma-check", "run the verification suites",
         with_common({str("suite", "all", "suite name or all")})},
        {"f3-mc", "Monte Carlo loop functionals",
         with_common({str("functional", "f3", "f3 or loop1"),
                      num("log_lambda", nullptr, "ln(Lambda); required for loop1 and cutoff masks"),
                      str("mask", "0,0,0,0", "cutoff flags for the four loop momenta"),
                      integer("samples", 100000, "number of samples"), num("k", 1.0, "external momentum (loop1)"),
                      num("charge", 1.0, "charge of the Gaussian insertions"),
                      num("mu_sigma", 1.0, "width of the Gaussian insertions"),
                      num("zeta_sigma", 1.0, "width of the Gaussian test function")})},
    };
    return specs;
}

const CommandSpec& find_command(const std::string& name) {
    for (const auto& c : command_specs())
        if (c.name == name) return c;
    throw DomainError("unknown command: " + name);
}

RunConfig resolve(const CommandSpec& spec, const json& file, const std::map<std::string, std::string>& flags) {
    if (!file.is_null() && !file.is_object()) throw DomainError("config file must hold a JSON object");
    RunConfig cfg;
    cfg.command = spec.name;
    cfg.params = json::object();
    if (file.is_object()) {
        for (const auto& [key, value] : file.items()) {
            if (key == "command") {
                if (value != spec.name) throw DomainError("config file is for command " + value.dump());
                continue;
            }
            const bool known = std::any_of(spec.params.begin(), spec.params.end(),
                                           [&](const ParamSpec& p) { return p.key == key; });
            if (!known) throw DomainError("unknown config key '" + key + "' for " + spec.name);
        }
    }
    for (const auto& p : spec.params) {
        json v = p.default_value;
        if (file.is_object() && file.contains(p.key) && !file.at(p.key).is_null()) v = coerce_json(p, file.at(p.key));
        if (auto it = flags.find(p.key); it != flags.end()) v = coerce_text(p, it->second);
        if (v.is_discarded()) throw DomainError("missing parameter --" + kebab(p.key));
        cfg.params[p.key] = v;
    }
    cfg.output_dir = cfg.params.at("output_dir").get<std::string>();
    const long long seed = cfg.params.at("seed").get<long long>();
    if (seed < 0) throw DomainError("seed must be >= 0");
    cfg.seed = static_cast<std::uint64_t>(seed);
    return cfg;
}

double RunConfig::number(const std::string& key) const {
    const json& v = params.at(key);
    if (v.is_null()) throw DomainError("missing parameter --" + kebab(key));
    return v.get<double>();
}

std::optional<double> RunConfig::optional_number(const std::string& key) const {
    const json& v = params.at(key);
    if (v.is_null()) return std::nullopt;
    return v.get<double>();
}

long long RunConfig::integer(const std::string& key) const { return params.at(key).get<long long>(); }

const std::string& RunConfig::string(const std::string& key) const {
    return params.at(key).get_ref<const std::string&>();
}

bool RunConfig::boolean(const std::string& key) const { return params.at(key).get<bool>(); }

}  // namespace dv::cli
