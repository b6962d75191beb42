#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

std::string bin() {
    const char* b = std::getenv("QKDSIM_BIN");
    REQUIRE_MESSAGE(b != nullptr, "QKDSIM_BIN must point at the qkdsim executable");
    return b;
}

fs::path work_dir() {
    const fs::path dir = fs::temp_directory_path() / "qkdsim_cli_tests";
    fs::create_directories(dir);
    return dir;
}

// Runs the tool and returns its exit code; stdout/stderr go to `log`.
int run(const std::string& args, const fs::path& log) {
    const std::string cmd = bin() + " " + args + " >" + log.string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    REQUIRE(status != -1);
    return (status >> 8) & 0xff;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int count_lines(const std::string& text) {
    int n = 0;
    for (char c : text) n += (c == '\n');
    return n;
}

std::vector<double> parse_csv_row(const std::string& line) {
    std::vector<double> out;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) out.push_back(std::stod(field));
    return out;
}

} // namespace

TEST_CASE("sweep and analyze are byte-identical across runs") {
    const fs::path dir = work_dir();
    const fs::path log = dir / "log.txt";
    const std::string base = "sweep --states plus minus plus_i minus_i --angles 20 --shots 50 "
                             "--seed 99 --out ";
    CHECK(run(base + (dir / "a.csv").string(), log) == 0);
    CHECK(run(base + (dir / "b.csv").string(), log) == 0);
    const std::string csv_a = slurp(dir / "a.csv");
    CHECK(csv_a == slurp(dir / "b.csv"));
    CHECK(count_lines(csv_a) == 81);

    const std::string analyze = "analyze " + (dir / "a.csv").string() +
                                " --reps 500 --seed 7 --plot-out " + (dir / "p.csv").string() +
                                " --out ";
    CHECK(run(analyze + (dir / "r1.json").string(), log) == 0);
    CHECK(run(analyze + (dir / "r2.json").string(), log) == 0);
    CHECK(slurp(dir / "r1.json") == slurp(dir / "r2.json"));

    const json report = json::parse(slurp(dir / "r1.json"));
    CHECK(report["schema_version"] == 1);
    CHECK(report["states"].size() == 4);
    for (const auto& [label, block] : report["states"].items()) {
        CHECK(block["n_records"] == 20);
        CHECK(block.contains("fit_a"));
        CHECK(block.contains("monte_carlo"));
        CHECK(block.contains("bootstrap"));
    }
    CHECK(report["cumulative"].contains("qber"));

    // The plot CSV samples both fitted curves per state.
    const std::string plot = slurp(dir / "p.csv");
    CHECK(plot.rfind("state,theta,fit_a,fit_b\n", 0) == 0);
    CHECK(count_lines(plot) == 401);

    // Data outputs sit beside a manifest describing the invocation.
    const json manifest = json::parse(slurp(dir / "a.csv.manifest.json"));
    CHECK(manifest["tool"] == "qkdsim");
    CHECK(manifest["command"] == "sweep");
    CHECK(manifest["seed"] == 99);
}

TEST_CASE("sweep honors a state subset") {
    const fs::path dir = work_dir();
    const fs::path log = dir / "log.txt";
    const fs::path out = dir / "subset.csv";
    CHECK(run("sweep --states minus --angles 10 --shots 50 --seed 1 --out " + out.string(),
              log) == 0);
    const std::string csv = slurp(out);
    CHECK(count_lines(csv) == 11);
    CHECK(csv.find("minus,") != std::string::npos);
    CHECK(csv.find("plus,") == std::string::npos);
}

TEST_CASE("theory tabulates the exact curves") {
    const fs::path dir = work_dir();
    const fs::path log = dir / "log.txt";
    const fs::path out = dir / "theory.csv";

    CHECK(run("theory --out " + out.string(), log) == 0);
    CHECK(count_lines(slurp(out)) == 101); // header + default 100-point grid

    CHECK(run("theory --grid 2 --theta-min pi/8 --theta-max pi/4 --out " + out.string(), log) == 0);
    std::ifstream in(out);
    std::string header, row_mid, row_end;
    std::getline(in, header);
    std::getline(in, row_mid);
    std::getline(in, row_end);
    CHECK(header == "theta,f_a,f_b,e_b,e_e,i_ab,i_ae,s");

    // theta,f_a,f_b,e_b,e_e,i_ab,i_ae,s
    const auto mid = parse_csv_row(row_mid);
    CHECK(std::abs(mid[0] - 0.39269908169872414) < 1e-12); // pi/8
    CHECK(std::abs(mid[3] - 0.14645) < 1e-4);
    CHECK(std::abs(mid[4] - mid[3]) < 1e-12);
    CHECK(std::abs(mid[7]) < 1e-3); // S = 0 at the crossover

    const auto end = parse_csv_row(row_end);
    CHECK(std::abs(end[3]) < 1e-12);
    CHECK(std::abs(end[7] - 1.0) < 1e-12); // no attack, S = I_AB = 1

    CHECK(run("theory --grid 1 --out " + out.string(), log) == 1);
    CHECK(run("theory --theta-max pi --out " + out.string(), log) == 1);
}

TEST_CASE("protocol accepts pi-literal angles and reports rates") {
    const fs::path dir = work_dir();
    const fs::path log = dir / "log.txt";
    const fs::path out = dir / "protocol.json";
    CHECK(run("protocol --rounds 4000 --eve-theta pi/8 --seed 11 --out " + out.string(), log) == 0);
    const json j = json::parse(slurp(out));
    CHECK(j["rounds"] == 4000);
    CHECK(std::abs(j["sift_rate"].get<double>() - 0.5) < 0.05);
    CHECK(std::abs(j["e_b_hat"].get<double>() - 0.1464) < 0.03);
    CHECK(std::abs(j["rate"]["s_raw"].get<double>()) < 0.1);
    CHECK_FALSE(j.contains("alice_bits"));

    CHECK(run("protocol --rounds 200 --eve-theta pi/3 --out " + out.string(), log) == 1);
    CHECK(run("protocol --rounds 0 --out " + out.string(), log) == 1);
}

TEST_CASE("optimize") {
    const fs::path dir = work_dir();
    const fs::path log = dir / "log.txt";
    const fs::path out = dir / "optimize.json";
    CHECK(run("optimize --eta-a 0.6 --out " + out.string(), log) == 0);
    const json j = json::parse(slurp(out));
    CHECK(std::abs(j["eta_b"].get<double>() - 0.8) < 1e-12);
    for (const double r : j["residuals"].get<std::vector<double>>()) {
        CHECK(std::abs(r) < 1e-10);
    }

    CHECK(run("optimize --eta-a 1.2 --out " + out.string(), log) == 1);
}

TEST_CASE("exit codes distinguish usage, data, and analysis failures") {
    const fs::path dir = work_dir();
    const fs::path log = dir / "log.txt";

    CHECK(run("nonsense", log) == 1);
    CHECK(run("sweep --angles 2 --out " + (dir / "x.csv").string(), log) == 1);
    CHECK(run("sweep --states spam --out " + (dir / "x.csv").string(), log) == 1);

    CHECK(run("analyze " + (dir / "does_not_exist.csv").string(), log) == 2);
    const fs::path corrupt = dir / "corrupt.csv";
    {
        std::ofstream f(corrupt);
        f << "state,theta,shots,fid_a,fid_b\nplus,oops,10,0.5,0.5\n";
    }
    CHECK(run("analyze " + corrupt.string() + " --out -", log) == 2);

    // Valid CSV but every state is rank-deficient: all records share a theta.
    const fs::path degenerate = dir / "degenerate.csv";
    {
        std::ofstream f(degenerate);
        f << "state,theta,shots,fid_a,fid_b\n";
        for (int i = 0; i < 6; ++i) f << "plus,0.3,10,0.9,0.8\n";
    }
    CHECK(run("analyze " + degenerate.string() + " --out - --plot-out " +
                  (dir / "p.csv").string(),
              log) == 3);
}

TEST_CASE("config file supplies defaults that flags override") {
    const fs::path dir = work_dir();
    const fs::path log = dir / "log.txt";
    const fs::path cfg = dir / "sweep.ini";
    const fs::path out = dir / "from_config.csv";
    {
        std::ofstream f(cfg);
        f << "[sweep]\n"
          << "states=plus\n"
          << "angles=7\n"
          << "shots=5\n"
          << "seed=4\n"
          << "out=" << out.string() << "\n";
    }
    CHECK(run("--config " + cfg.string() + " sweep", log) == 0);
    CHECK(count_lines(slurp(out)) == 8);

    CHECK(run("--config " + cfg.string() + " sweep --angles 3 --out " + out.string(), log) == 0);
    CHECK(count_lines(slurp(out)) == 4);
}
