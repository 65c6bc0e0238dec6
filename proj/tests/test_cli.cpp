#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>
#include <sys/wait.h>

#include <nlohmann/json.hpp>

#include "flamelab/io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const char* cli_path() {
    if (const char* env = std::getenv("FLAMELAB_CLI_PATH")) return env;
    return FLAMELAB_CLI_PATH;
}

fs::path fresh_dir(const std::string& name) {
    fs::path dir = fs::temp_directory_path() / "flamelab_cli_tests" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

int run_cli(const std::string& args, const std::string& env_prefix = {}) {
    std::string cmd = env_prefix + std::string(cli_path()) + " " + args +
                      " >/dev/null 2>/dev/null";
    const int rc = std::system(cmd.c_str());
    if (rc < 0 || !WIFEXITED(rc)) return -1;
    return WEXITSTATUS(rc);
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
    std::vector<std::vector<std::string>> rows;
    std::string text = flamelab::read_file(p);
    size_t pos = 0;
    while (pos < text.size()) {
        size_t eol = text.find('\n', pos);
        if (eol == std::string::npos) eol = text.size();
        std::string line = text.substr(pos, eol - pos);
        pos = eol + 1;
        if (line.empty()) continue;
        std::vector<std::string> cells;
        size_t c = 0;
        while (true) {
            size_t comma = line.find(',', c);
            if (comma == std::string::npos) {
                cells.push_back(line.substr(c));
                break;
            }
            cells.push_back(line.substr(c, comma - c));
            c = comma + 1;
        }
        rows.push_back(std::move(cells));
    }
    return rows;
}

} // namespace

TEST_CASE("steady run writes checksummed reproducible artifacts", "[cli]") {
    auto a = fresh_dir("steady_a");
    auto b = fresh_dir("steady_b");
    REQUIRE(run_cli("steady-rs --epsilon 0.5 --j 1 --output-dir " +
                    a.string()) == 0);
    REQUIRE(run_cli("steady-rs --epsilon 0.5 --j 1 --output-dir " +
                    b.string()) == 0);

    // bit-identical tables on identical configuration
    CHECK(flamelab::read_file(a / "steady.csv") ==
          flamelab::read_file(b / "steady.csv"));

    auto rows = read_csv(a / "steady.csv");
    REQUIRE(rows.size() > 2);
    CHECK(rows[0] == std::vector<std::string>{"x", "v", "theta", "residual"});
    double max_res = 0.0;
    for (size_t i = 1; i < rows.size(); ++i)
        max_res = std::max(max_res, std::stod(rows[i][3]));
    CHECK(max_res <= 1e-8);

    auto manifest = json::parse(flamelab::read_file(a / "manifest.json"));
    CHECK(manifest["completed"] == true);
    CHECK(manifest["config"]["command"] == "steady-rs");
    REQUIRE(manifest["outputs"].size() >= 2);
    for (const auto& out : manifest["outputs"]) {
        const auto name = out["name"].get<std::string>();
        const auto body = flamelab::read_file(a / name);
        CHECK(out["sha256"].get<std::string>() == flamelab::sha256_hex(body));
        CHECK(out["bytes"].get<size_t>() == body.size());
    }

    auto params = json::parse(flamelab::read_file(a / "params.json"));
    CHECK(params["residual"].get<double>() <= 1e-8);
    CHECK(params["j"] == 1);
}

TEST_CASE("invalid configurations are rejected with status 2", "[cli]") {
    auto dir = fresh_dir("invalid");
    const std::string out = " --output-dir " + (dir / "o").string();
    CHECK(run_cli("--command steady-rs --epsilon 1.5" + out) == 2);
    CHECK(run_cli("steady-rs" + out) == 2);             // epsilon missing
    CHECK(run_cli("steady-rs --epsilon 0.5 --no-such-flag" + out) == 2);
    CHECK(run_cli("verify --epsilon 0.3" + out) == 2);  // verify takes none
    CHECK(run_cli("simulate --eps-start 0.1 --eps-stop 0.5 --eps-count 3" +
                  out) == 2);                           // sweep unsupported
    CHECK(run_cli("mystery-command --epsilon 0.5" + out) == 2);
    CHECK(run_cli("poles --epsilon 0.25" + out) == 2);  // heights missing
    CHECK_FALSE(fs::exists(dir / "o" / "manifest.json"));

    flamelab::write_file(dir / "bad.cfg",
                         "command=steady-rs\nepsilon=0.5\nbogus=1\n");
    CHECK(run_cli("--config " + (dir / "bad.cfg").string() + out) == 2);
}

TEST_CASE("numerical failures exit 3 with an error report", "[cli]") {
    auto dir = fresh_dir("escape");
    // above the linear-growth threshold a lone pole runs off to infinity
    CHECK(run_cli("poles --epsilon 1.2 --heights 0.5 --t-max 400 "
                  "--output-dir " +
                  dir.string()) == 3);
    auto err = json::parse(flamelab::read_file(dir / "error.json"));
    CHECK(err["error"]["type"] == "numerical");
    CHECK(err["error"]["message"].get<std::string>().find("escaped") !=
          std::string::npos);
    CHECK_FALSE(fs::exists(dir / "manifest.json"));
}

TEST_CASE("catalog command reproduces the counting example", "[cli]") {
    auto dir = fresh_dir("catalog");
    REQUIRE(run_cli("catalog-ms --epsilon 0.21 --output-dir " +
                    dir.string()) == 0);
    auto rows = read_csv(dir / "catalog.csv");
    REQUIRE(rows.size() == 11); // header + ten entries
    CHECK(rows[0].front() == "epsilon");
    CHECK(rows[0].back() == "classification");
    for (size_t i = 1; i < rows.size(); ++i) {
        CHECK(rows[i].back() == "MAXIMUM");
        CHECK(std::stod(rows[i][rows[0].size() - 2]) <= 1e-8); // residual
    }
}

TEST_CASE("config file values are overridden by flags", "[cli]") {
    auto dir = fresh_dir("config_file");
    flamelab::write_file(dir / "run.cfg",
                         "command=steady-rs\nepsilon=0.5\nj=2\n");
    REQUIRE(run_cli("--config " + (dir / "run.cfg").string() +
                    " --epsilon 0.2 --output-dir " + (dir / "o").string()) ==
            0);
    auto params = json::parse(flamelab::read_file(dir / "o" / "params.json"));
    CHECK(params["epsilon"].get<double>() == 0.2); // flag wins
    CHECK(params["j"] == 2);                       // file value kept
}

TEST_CASE("environment variable picks the output directory", "[cli]") {
    auto dir = fresh_dir("env_dir");
    REQUIRE(run_cli("stability --kind trivial-rs --epsilon 0.5 --n-max 4",
                    "FLAMELAB_OUTPUT_DIR=" + (dir / "from_env").string() +
                        " ") == 0);
    auto spec =
        json::parse(flamelab::read_file(dir / "from_env" / "spectrum.json"));
    CHECK(spec["kind"] == "trivial-rs");
    CHECK(spec["epsilon"].get<double>() == 0.5);
    REQUIRE(spec["eigenvalues"].size() == 4);
    const double expect[] = {0.5, -1.0, -3.5, -7.0};
    for (size_t i = 0; i < 4; ++i)
        CHECK(spec["eigenvalues"][i].get<double>() ==
              Catch::Approx(expect[i]).margin(1e-12));
}

TEST_CASE("simulate trajectory rows follow the sampling contract", "[cli]") {
    auto dir = fresh_dir("simulate");
    REQUIRE(run_cli("simulate --epsilon 0.5 --t-end 0.2 --dt 1e-3 "
                    "--sample-every 50 --seed 7 --output-dir " +
                    dir.string()) == 0);
    auto rows = read_csv(dir / "trajectory.csv");
    REQUIRE(rows.size() == 6); // header + five samples
    CHECK(rows[0][0] == "t");
    CHECK(rows[0].size() == 514); // t plus one column per grid point
    CHECK(std::stod(rows[1][0]) == 0.0);
    CHECK(std::stod(rows[5][0]) == Catch::Approx(0.2).margin(1e-12));

    auto params = json::parse(flamelab::read_file(dir / "params.json"));
    CHECK(params["blew_up"] == false);
    CHECK(params["samples"] == 5);
    CHECK(params["seed"] == 7);

    auto manifest = json::parse(flamelab::read_file(dir / "manifest.json"));
    std::vector<std::string> names;
    for (const auto& out : manifest["outputs"])
        names.push_back(out["name"].get<std::string>());
    CHECK(names == std::vector<std::string>{"trajectory.csv", "params.json"});
}

TEST_CASE("bifurcation sweep emits one row per live branch and sign",
          "[cli]") {
    auto dir = fresh_dir("diagram");
    REQUIRE(run_cli("bifurcation-rs --eps-start 0.45 --eps-stop 0.75 "
                    "--eps-count 3 --j-max 2 --output-dir " +
                    dir.string()) == 0);
    auto rows = read_csv(dir / "diagram.csv");
    REQUIRE(rows.size() == 7); // only j = 1 lives above eps = 1/4
    double prev_w0 = 1.0;
    for (size_t i = 1; i < rows.size(); ++i) {
        CHECK(rows[i][1] == "1");
        CHECK(rows[i].back() == "STABLE");
        const double w0 = std::stod(rows[i][3]);
        if (i % 2 == 1) { // first row of each epsilon pair
            CHECK(w0 < prev_w0);
            prev_w0 = w0;
        }
    }
}

TEST_CASE("positional and flag command spellings agree", "[cli]") {
    auto a = fresh_dir("spelling_a");
    auto b = fresh_dir("spelling_b");
    REQUIRE(run_cli("steady-rs --epsilon 0.6 --output-dir " + a.string()) ==
            0);
    REQUIRE(run_cli("--command steady-rs --epsilon 0.6 --output-dir " +
                    b.string()) == 0);
    CHECK(flamelab::read_file(a / "steady.csv") ==
          flamelab::read_file(b / "steady.csv"));
    CHECK(run_cli("steady-rs --command poles --epsilon 0.6 --output-dir " +
                  a.string()) == 2);
}
