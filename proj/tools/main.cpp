// dirac-vacuum <command> [--config file.json] [flags...]
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <map>

#include <CLI11.hpp>

#include "commands.hpp"
#include "dv/errors.hpp"
#include "dv/f3_loop.hpp"
#include "dv/io.hpp"
#include "run_config.hpp"

namespace {

using dv::cli::CommandSpec;

struct SubcommandFlags {
    CLI::App* app = nullptr;
    std::string config_path;
    std::map<std::string, std::string> raw;
    std::map<std::string, CLI::Option*> options;
};

void write_manifest(const dv::cli::RunConfig& cfg, double seconds, int exit_code, const nlohmann::json& summary,
                    const std::string& error) {
    nlohmann::json m;
    m["command"] = cfg.command;
    m["config"] = cfg.params;
    m["version"] = DV_VERSION;
    m["wall_time_seconds"] = seconds;
    m["exit_code"] = exit_code;
    m["summary"] = summary;
    if (!error.empty()) m["error"] = error;
    dv::write_json((std::filesystem::path(cfg.output_dir) / "manifest.json").string(), m);
}

int run(const CommandSpec& spec, const SubcommandFlags& f) {
    nlohmann::json file;
    std::map<std::string, std::string> flags;
    for (const auto& [key, opt] : f.options)
        if (opt->count() > 0) flags[key] = f.raw.at(key);
    if (!f.config_path.empty()) file = dv::read_json(f.config_path);
    const dv::cli::RunConfig cfg = dv::cli::resolve(spec, file, flags);
    dv::ensure_directory(cfg.output_dir);

    const auto t0 = std::chrono::steady_clock::now();
    auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(); };
    int code = 0;
    std::string error;
    nlohmann::json summary = nlohmann::json::object();
    try {
        const dv::cli::CommandOutcome out = dv::cli::run_command(cfg);
        code = out.exit_code;
        summary = out.summary;
    } catch (const dv::DomainError& e) {
        code = 1;
        error = e.what();
    } catch (const dv::IoError& e) {
        code = 3;
        error = e.what();
    } catch (const dv::ToleranceError& e) {
        code = 2;
        error = e.what();
    } catch (const dv::QuadratureError& e) {
        code = 2;
        error = e.what();
    } catch (const dv::MonteCarloError& e) {
        code = 2;
        error = e.what();
    }
    write_manifest(cfg, elapsed(), code, summary, error);
    if (!error.empty()) std::fprintf(stderr, "error: %s\n", error.c_str());
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Charge renormalization and vacuum polarization toolkit"};
    app.set_version_flag("--version", DV_VERSION);
    app.require_subcommand(1);
    std::map<std::string, SubcommandFlags> subs;
    for (const auto& spec : dv::cli::command_specs()) {
        SubcommandFlags& f = subs[spec.name];
        f.app = app.add_subcommand(spec.name, spec.help);
        f.app->add_option("--config", f.config_path, "JSON file with flat keys; flags override it");
        for (const auto& p : spec.params) {
            f.raw[p.key];
            f.options[p.key] = f.app->add_option("--" + dv::cli::kebab(p.key), f.raw[p.key], p.help);
        }
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }
    try {
        for (const auto& spec : dv::cli::command_specs())
            if (subs[spec.name].app->parsed()) return run(spec, subs[spec.name]);
    } catch (const dv::DomainError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const dv::IoError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
    return 1;
}
