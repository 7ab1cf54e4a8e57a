#include <doctest.h>

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "dv/errors.hpp"
#include "dv/io.hpp"
#include "dv/parallel.hpp"
#include "dv/quadrature.hpp"

using namespace dv;
using doctest::Approx;

namespace {

std::string temp_dir(const std::string& name) {
    auto p = std::filesystem::temp_directory_path() / ("dv_test_" + name);
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p.string();
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("adaptive quadrature") {
    QuadResult r = integrate([](double x) { return std::exp(-x * x); }, 0.0, 10.0);
    CHECK(r.converged);
    CHECK(r.value == Approx(std::sqrt(std::numbers::pi) / 2).epsilon(1e-13));
    CHECK(r.error < 1e-10);
    // Integrable endpoint singularity.
    r = integrate([](double x) { return 1.0 / std::sqrt(x); }, std::vector<double>{0.0, 1.0});
    CHECK(r.value == Approx(2.0).epsilon(1e-9));
    // Breakpoints at a kink.
    r = integrate([](double x) { return std::abs(x - 0.3); }, std::vector<double>{0.0, 0.3, 1.0});
    CHECK(r.value == Approx(0.045 + 0.245).epsilon(1e-14));
    CHECK(r.evaluations == 42);
}

TEST_CASE("quadrature reports non-convergence") {
    QuadOptions o;
    o.max_intervals = 3;
    auto f = [](double x) { return std::sin(1.0 / (x + 1e-3)); };
    const QuadResult r = integrate(f, 0.0, 1.0, o);
    CHECK_FALSE(r.converged);
    CHECK_THROWS_AS(integrate_or_throw(f, {0.0, 1.0}, o, "wiggle"), QuadratureError);
    try {
        integrate_or_throw(f, {0.0, 1.0}, o, "wiggle");
    } catch (const QuadratureError& e) {
        CHECK(e.error_estimate() > 0.0);
    }
}

TEST_CASE("parallel_for covers every index once and propagates exceptions") {
    std::vector<std::atomic<int>> hits(1000);
    parallel_for(hits.size(), [&](std::size_t i) { hits[i]++; });
    for (auto& h : hits) CHECK(h.load() == 1);
    CHECK_THROWS_AS(parallel_for(10, [](std::size_t i) {
                        if (i == 7) throw DomainError("boom");
                    }),
                    DomainError);
    CHECK(thread_count() >= 1);
}

TEST_CASE("pairwise sum") {
    std::vector<double> v(100000, 0.1);
    CHECK(pairwise_sum(v) == Approx(10000.0).epsilon(1e-14));
    CHECK(pairwise_sum(std::vector<double>{}) == 0.0);
}

TEST_CASE("17-digit decimal formatting round-trips") {
    for (double x : {0.1, 1.0 / 3.0, 1e-300, -2.5e17, std::numbers::pi})
        CHECK(std::stod(format_double(x)) == x);
}

TEST_CASE("CSV round trip with LF endings") {
    const std::string dir = temp_dir("csv");
    const std::string path = dir + "/t.csv";
    std::vector<std::vector<double>> rows = {{0.1, 1.0 / 3.0}, {1e-5, -7.0}};
    write_csv(path, {"a", "b"}, rows);
    const std::string text = slurp(path);
    CHECK(text.find('\r') == std::string::npos);
    CHECK(text.substr(0, 4) == "a,b\n");
    const CsvTable t = read_csv(path);
    CHECK(t.header == std::vector<std::string>{"a", "b"});
    CHECK(t.rows == rows);
    CHECK_THROWS_AS(write_csv(path, {"a"}, rows), IoError);
    CHECK_THROWS_AS(read_csv(dir + "/missing.csv"), IoError);
}

TEST_CASE("JSON output has sorted keys") {
    const std::string path = temp_dir("json") + "/t.json";
    nlohmann::json j;
    j["zeta"] = 1;
    j["alpha"] = 0.5;
    write_json(path, j);
    const std::string text = slurp(path);
    CHECK(text.find("alpha") < text.find("zeta"));
    CHECK(text.back() == '\n');
    CHECK(read_json(path) == j);
}
