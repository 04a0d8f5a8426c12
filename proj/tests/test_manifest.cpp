#include <doctest.h>

#include "mslab/runner.hpp"

using namespace mslab;

namespace {

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const char* kGridBlock =
    "[grid]\n"
    "dim = 1\n"
    "lo = 0\n"
    "hi = 1\n"
    "nx = 21\n"
    "nt = 21\n"
    "T = 1.0\n";

}  // namespace

TEST_CASE("manifest parsing") {
    const Manifest m = Manifest::parseText(
        "# comment\n[alpha]\nkey = 1.5\nname = hello world\n\n[beta]\nlist = 1, 2.5, -3\n");
    CHECK(m.getDouble("alpha", "key") == 1.5);
    CHECK(m.getString("alpha", "name") == "hello world");
    const std::vector<double> l = m.getDoubleList("beta", "list");
    REQUIRE(l.size() == 3);
    CHECK(l[2] == -3.0);
    CHECK(m.getInt("beta", "missing", 7) == 7);

    CHECK_THROWS_WITH_AS(Manifest::parseText("[a]\nkey 1\n"),
                         doctest::Contains("2: expected key = value"), ManifestError);
    CHECK_THROWS_WITH_AS(Manifest::parseText("key = 1\n"), doctest::Contains("outside any section"),
                         ManifestError);
    CHECK_THROWS_WITH_AS(Manifest::parseText("[a]\nk = 1\nk = 2\n"),
                         doctest::Contains("duplicate key"), ManifestError);
    CHECK_THROWS_WITH_AS(Manifest::parseText("[a]\nk = abc\n").getDouble("a", "k"),
                         doctest::Contains("not a number"), ManifestError);
    CHECK_THROWS_AS(Manifest::parseText("[a]\n").getString("a", "missing"), ManifestError);
}

TEST_CASE("grid, s-grid and x0 blocks") {
    const Manifest m = Manifest::parseText(std::string(kGridBlock) +
                                           "[weight]\nx0 = -0.2\nlambda = 1\n"
                                           "s_min = 1\ns_max = 4\ns_count = 3\n");
    const SpaceTimeGrid g = gridFromManifest(m);
    CHECK(g.nx == 21);
    CHECK(g.T == 1.0);
    const std::vector<double> s = sGridFromManifest(m);
    REQUIRE(s.size() == 3);
    CHECK(s[0] == doctest::Approx(1.0));
    CHECK(s[1] == doctest::Approx(2.0));
    CHECK(s[2] == doctest::Approx(4.0));
    CHECK(x0FromManifest(m, 1)[0] == -0.2);

    const Manifest bad = Manifest::parseText(std::string(kGridBlock) +
                                             "[weight]\nx0 = -0.2\nlambda = 1\n"
                                             "s_min = -1\ns_max = 4\ns_count = 3\n");
    CHECK_THROWS_AS(sGridFromManifest(bad), ManifestError);
}

TEST_CASE("17-digit floats round-trip") {
    for (double v : {1.0 / 3.0, M_PI, 1e-120, -7.25, 0.0}) {
        CHECK(std::stod(formatDouble(v)) == v);
    }
}

TEST_CASE("csv writer is atomic and shape-checked") {
    const std::filesystem::path dir = std::filesystem::temp_directory_path() / "mslab_csv_test";
    std::filesystem::remove_all(dir);
    CsvWriter w(dir / "t.csv", {"a", "b"});
    w.row({"1", "2"});
    CHECK_THROWS_AS(w.row({"1"}), std::invalid_argument);
    CHECK(!std::filesystem::exists(dir / "t.csv"));  // nothing lands before commit
    w.commit();
    CHECK(slurp(dir / "t.csv") == "a,b\n1,2\n");
    CHECK(!std::filesystem::exists(dir / "t.csv.tmp"));
    std::filesystem::remove_all(dir);
}

TEST_CASE("run: delta = 0 is degenerate, exit 0") {
    const Manifest m = Manifest::parseText(
        std::string(kGridBlock) +
        "[weight]\nx0 = -0.2\nlambda = 1\ns_min = 0.5\ns_max = 10\ns_count = 4\n"
        "[experiment]\nkind = stability\ncase = 1\ndelta = 0\nr0 = 2\n");
    const std::filesystem::path dir = std::filesystem::temp_directory_path() / "mslab_run_deg";
    std::filesystem::remove_all(dir);
    const RunResult res = runManifest(m, dir);
    CHECK(res.exitStatus == 0);
    REQUIRE(!res.summary.empty());
    CHECK(res.summary[0].find("degenerate") != std::string::npos);
    std::filesystem::remove_all(dir);
}

TEST_CASE("run: x0 inside Omega is rejected citing the weight precondition") {
    const Manifest m = Manifest::parseText(
        std::string(kGridBlock) +
        "[weight]\nx0 = 0.5\nlambda = 1\ns_min = 0.5\ns_max = 10\ns_count = 4\n"
        "[experiment]\nkind = stability\ncase = 1\ndelta = 0.1\nr0 = 2\n");
    CHECK_THROWS_WITH_AS(runManifest(m, std::filesystem::temp_directory_path() / "mslab_run_x0"),
                         doctest::Contains("closure"), std::invalid_argument);
}

TEST_CASE("golden stability manifest is byte-identical across reruns") {
    const Manifest m = Manifest::parseText(
        "[grid]\ndim = 1\nlo = 0\nhi = 1\nnx = 201\nnt = 401\nT = 1.0\n"
        "[weight]\nx0 = -0.2\nlambda = 1\ns_min = 0.5\ns_max = 10\ns_count = 12\n"
        "[experiment]\nkind = stability\ncase = 1\ndelta = 0.01\nr0 = 2\n"
        "[run]\nseed = 42\n");
    const std::filesystem::path d1 = std::filesystem::temp_directory_path() / "mslab_gold_1";
    const std::filesystem::path d2 = std::filesystem::temp_directory_path() / "mslab_gold_2";
    std::filesystem::remove_all(d1);
    std::filesystem::remove_all(d2);
    const RunResult r1 = runManifest(m, d1, 42);
    const RunResult r2 = runManifest(m, d2, 42);
    CHECK(r1.exitStatus == 0);
    CHECK(slurp(d1 / "stability.csv") == slurp(d2 / "stability.csv"));
    CHECK(!slurp(d1 / "stability.csv").empty());
    std::filesystem::remove_all(d1);
    std::filesystem::remove_all(d2);
}

TEST_CASE("carleman-verify with a single s value emits a single-row report") {
    const Manifest m = Manifest::parseText(
        std::string(kGridBlock) +
        "[weight]\nx0 = -0.2\nlambda = 1\ns_min = 2\ns_max = 2\ns_count = 1\n"
        "[experiment]\nkind = carleman\n[run]\nseed = 3\n");
    const std::filesystem::path dir = std::filesystem::temp_directory_path() / "mslab_cv1";
    std::filesystem::remove_all(dir);
    const RunResult res = runManifest(m, dir, 3);
    CHECK(res.exitStatus == 0);
    const std::string csv = slurp(dir / "carleman.csv");
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);  // header + one row
    std::filesystem::remove_all(dir);
}

TEST_CASE("convergence runner reports second order on the free eigenmode") {
    const Manifest m = Manifest::parseText(
        "[grid]\ndim = 1\nlo = 0\nhi = 1\nnx = 13\nnt = 13\nT = 1.0\n"
        "[experiment]\nkind = convergence\nlevels = 3\n");
    const std::filesystem::path dir = std::filesystem::temp_directory_path() / "mslab_conv";
    std::filesystem::remove_all(dir);
    const RunResult res = runManifest(m, dir);
    CHECK(res.exitStatus == 0);
    REQUIRE(res.summary.size() >= 2);
    for (const std::string& line : res.summary) {
        const std::size_t p = line.find("order ");
        REQUIRE(p != std::string::npos);
        const double order = std::stod(line.substr(p + 6));
        CHECK(order > 1.8);
        CHECK(order < 2.2);
    }
    std::filesystem::remove_all(dir);
}

TEST_CASE("solve runner dumps the full field") {
    const Manifest m = Manifest::parseText(std::string(kGridBlock) +
                                           "[potential]\nrho = 0.5, 0.1\nprofile = bracket\n"
                                           "[state]\nkind = constant\nr0 = 2\n"
                                           "[experiment]\nkind = solve\n");
    const std::filesystem::path dir = std::filesystem::temp_directory_path() / "mslab_solve";
    std::filesystem::remove_all(dir);
    const RunResult res = runManifest(m, dir);
    CHECK(res.exitStatus == 0);
    const std::string csv = slurp(dir / "solve.csv");
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 21 * 21);
    std::filesystem::remove_all(dir);
}
