#include <doctest.h>

#include "dv/errors.hpp"
#include "run_config.hpp"

using namespace dv;
using namespace dv::cli;

TEST_CASE("flags override the config file, which overrides defaults") {
    const CommandSpec& spec = find_command("multiplier");
    RunConfig c = resolve(spec, nullptr, {});
    CHECK(c.string("function") == "U");
    CHECK(c.integer("points") == 200);
    CHECK(c.seed == 0);
    CHECK(c.output_dir == "out");
    CHECK_FALSE(c.optional_number("log_lambda").has_value());

    const nlohmann::json file = {{"points", 50}, {"rmin", "0.01"}, {"seed", 4}};
    c = resolve(spec, file, {});
    CHECK(c.integer("points") == 50);
    CHECK(c.number("rmin") == 0.01);
    CHECK(c.seed == 4);
    c = resolve(spec, file, {{"points", "7"}});
    CHECK(c.integer("points") == 7);
}

TEST_CASE("config validation") {
    const CommandSpec& spec = find_command("scf");
    CHECK_THROWS_AS(resolve(spec, nullptr, {}), DomainError);  // alpha_ph and z3 are required
    CHECK_NOTHROW(resolve(spec, nullptr, {{"alpha_ph", "0.1"}, {"z3", "0.5"}}));
    CHECK_THROWS_AS(resolve(spec, nlohmann::json{{"bogus", 1}}, {{"alpha_ph", "0.1"}, {"z3", "0.5"}}), DomainError);
    CHECK_THROWS_AS(resolve(spec, nullptr, {{"alpha_ph", "abc"}, {"z3", "0.5"}}), DomainError);
    CHECK_THROWS_AS(resolve(spec, nullptr, {{"alpha_ph", "0.1"}, {"z3", "0.5"}, {"order", "1.5"}}), DomainError);
    CHECK_THROWS_AS(resolve(spec, nlohmann::json{{"command", "renorm"}}, {}), DomainError);
    CHECK_THROWS_AS(find_command("nope"), DomainError);
    CHECK(kebab("alpha_ph") == "alpha-ph");
}

TEST_CASE("every command resolves with its defaults plus required keys") {
    for (const auto& spec : command_specs()) {
        std::map<std::string, std::string> flags;
        for (const auto& p : spec.params)
            if (p.default_value.is_discarded()) flags[p.key] = "0.5";
        const RunConfig c = resolve(spec, nullptr, flags);
        CHECK(c.params.size() == spec.params.size());
    }
}
