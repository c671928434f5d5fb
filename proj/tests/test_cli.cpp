#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

const char* kCli = RFFNET_CLI_PATH;

struct RunResult {
    int exit_code;
    std::string output;  // stdout + stderr
};

RunResult run(const std::string& args) {
    const fs::path out = fs::temp_directory_path() / "rffnet_cli_out.txt";
    const std::string cmd =
        std::string(kCli) + " " + args + " > " + out.string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    RunResult result;
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    std::ifstream in(out);
    std::stringstream buffer;
    buffer << in.rdbuf();
    result.output = buffer.str();
    std::remove(out.c_str());
    return result;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

// Working directory for all artifacts of this suite.
struct Workspace {
    fs::path dir;
    Workspace() : dir(fs::temp_directory_path() / "rffnet_cli_tests") {
        fs::create_directories(dir);
    }
    ~Workspace() { fs::remove_all(dir); }
    std::string path(const std::string& name) const {
        return (dir / name).string();
    }
};

long count_data_lines(const std::string& text) {
    long count = 0;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line))
        if (!line.empty() && line[0] != '#') ++count;
    return count;
}

std::string header_value(const std::string& text, const std::string& key) {
    std::istringstream in(text);
    std::string line;
    const std::string prefix = "# " + key + " ";
    while (std::getline(in, line))
        if (line.rfind(prefix, 0) == 0) return line.substr(prefix.size());
    return "";
}

}  // namespace

TEST_CASE("synth writes a deterministic CSV of the right shape") {
    Workspace ws;
    const std::string a = ws.path("se1_a.csv"), b = ws.path("se1_b.csv");
    CHECK(run("synth --kind se1 --n 100 --seed 1 --out " + a).exit_code == 0);
    CHECK(run("synth --kind se1 --n 100 --seed 1 --out " + b).exit_code == 0);

    const std::string content = slurp(a);
    CHECK(content == slurp(b));

    std::istringstream in(content);
    std::string header;
    std::getline(in, header);
    CHECK(std::count(header.begin(), header.end(), ',') == 18);  // 19 columns
    CHECK(header.substr(header.size() - 2) == ",y");
    long rows = 0;
    std::string line;
    while (std::getline(in, line))
        if (!line.empty()) ++rows;
    CHECK(rows == 100);
}

TEST_CASE("synth rejects unknown kinds with a usage exit") {
    Workspace ws;
    const RunResult r =
        run("synth --kind se9 --n 5 --out " + ws.path("x.csv"));
    CHECK(r.exit_code == 2);
}

TEST_CASE("train writes model and history with the resolved feature count") {
    Workspace ws;
    const std::string csv = ws.path("data.csv");
    REQUIRE(run("synth --kind se1 --n 400 --seed 3 --out " + csv).exit_code ==
            0);

    SUBCASE("one epoch gives one history record") {
        const std::string model = ws.path("m1.bin");
        const RunResult r = run("train --data " + csv +
                                " --task regression --max-epochs 1 --out " +
                                model);
        CHECK(r.exit_code == 0);
        const std::string history = slurp(model + ".history");
        CHECK(count_data_lines(history) == 1);
        CHECK(fs::exists(model));
    }
    SUBCASE("auto feature count follows the training-split rule") {
        // 400 rows, val fraction 0.1 -> 360 training rows,
        // floor(sqrt(360) ln 360) = 111.
        const std::string model = ws.path("m2.bin");
        REQUIRE(run("train --data " + csv +
                    " --task regression --max-epochs 1 --out " + model)
                    .exit_code == 0);
        const std::string history = slurp(model + ".history");
        CHECK(header_value(history, "num_features") == "111");
        CHECK(header_value(history, "num_features_mode") == "auto");
        CHECK(header_value(history, "n_train") == "360");
    }
    SUBCASE("explicit feature count is honored") {
        const std::string model = ws.path("m3.bin");
        REQUIRE(run("train --data " + csv +
                    " --task regression --max-epochs 1 --num-features 40 "
                    "--out " +
                    model)
                    .exit_code == 0);
        const std::string history = slurp(model + ".history");
        CHECK(header_value(history, "num_features") == "40");
        CHECK(header_value(history, "num_features_mode") == "explicit");
    }
}

TEST_CASE("train fails cleanly on a missing data file") {
    Workspace ws;
    const std::string model = ws.path("m.bin");
    const RunResult r = run(
        "train --data /nonexistent/nope.csv --task regression --out " + model);
    CHECK(r.exit_code == 1);
    CHECK(r.output.find("/nonexistent/nope.csv") != std::string::npos);
    CHECK_FALSE(fs::exists(model));
    CHECK_FALSE(fs::exists(model + ".tmp"));
}

TEST_CASE("repeated training is byte-identical") {
    Workspace ws;
    const std::string csv = ws.path("data.csv");
    REQUIRE(run("synth --kind se1 --n 200 --seed 5 --out " + csv).exit_code ==
            0);
    const std::string flags = "train --data " + csv +
                              " --task regression --max-epochs 3 --seed 9 "
                              "--out ";
    const std::string m1 = ws.path("d1.bin"), m2 = ws.path("d2.bin");
    REQUIRE(run(flags + m1).exit_code == 0);
    REQUIRE(run(flags + m2).exit_code == 0);
    CHECK(slurp(m1) == slurp(m2));
    CHECK(!slurp(m1).empty());
}

TEST_CASE("seed falls back to the RFFNET_SEED environment variable") {
    Workspace ws;
    const std::string csv = ws.path("data.csv");
    REQUIRE(run("synth --kind se1 --n 120 --seed 2 --out " + csv).exit_code ==
            0);
    const std::string base = "train --data " + csv +
                             " --task regression --max-epochs 1 --out ";
    const std::string m_env = ws.path("env.bin"), m_flag = ws.path("flag.bin");
    const std::string env_cmd = "RFFNET_SEED=77 " + std::string(kCli) + " " +
                                base + m_env + " >/dev/null 2>&1";
    REQUIRE(std::system(env_cmd.c_str()) == 0);
    REQUIRE(run(base + m_flag + " --seed 77").exit_code == 0);
    CHECK(slurp(m_env) == slurp(m_flag));
}

TEST_CASE("eval reports near-zero error on an overfit training set") {
    Workspace ws;
    // A tiny linear problem the model can drive to interpolation.
    const std::string csv = ws.path("line.csv");
    {
        std::ofstream out(csv);
        out << "x1,y\n";
        for (int i = 0; i < 24; ++i) {
            const double x = -1.0 + i / 12.0;
            out << x << ',' << 0.3 * x << "\n";
        }
    }
    const std::string model = ws.path("line.bin");
    REQUIRE(run("train --data " + csv +
                " --task regression --loss squared --reg 0 --lr 0.05 "
                "--max-epochs 600 --patience 600 --num-features 48 --seed 1 "
                "--out " +
                model)
                .exit_code == 0);
    const RunResult r = run("eval --model " + model + " --data " + csv);
    CHECK(r.exit_code == 0);
    const auto pos = r.output.find("mse=");
    REQUIRE(pos != std::string::npos);
    const double value = std::strtod(r.output.c_str() + pos + 4, nullptr);
    CHECK(value <= 1e-2);
}

TEST_CASE("eval rejects mismatched dimensions and task flags") {
    Workspace ws;
    const std::string se1 = ws.path("se1.csv"), se2 = ws.path("se2.csv");
    REQUIRE(run("synth --kind se1 --n 80 --seed 1 --out " + se1).exit_code ==
            0);
    REQUIRE(run("synth --kind se2 --n 80 --seed 1 --out " + se2).exit_code ==
            0);
    const std::string model = ws.path("m.bin");
    REQUIRE(run("train --data " + se1 +
                " --task regression --max-epochs 1 --out " + model)
                .exit_code == 0);

    SUBCASE("p mismatch is a runtime error") {
        const RunResult r = run("eval --model " + model + " --data " + se2);
        CHECK(r.exit_code == 1);
        CHECK(r.output.find("dimension") != std::string::npos);
    }
    SUBCASE("task mismatch is a usage error") {
        const RunResult r = run("eval --model " + model + " --data " + se1 +
                                " --task classification");
        CHECK(r.exit_code == 2);
    }
    SUBCASE("matching task flag is accepted") {
        const RunResult r = run("eval --model " + model + " --data " + se1 +
                                " --task regression");
        CHECK(r.exit_code == 0);
    }
}

TEST_CASE("classification training and evaluation end to end") {
    Workspace ws;
    // Separable labels from a linear score through the logistic link.
    const std::string csv = ws.path("binary.csv");
    {
        std::ofstream out(csv);
        out << "x1,x2,y\n";
        for (int i = 0; i < 60; ++i) {
            const double a = std::sin(i * 0.7) * 1.3;
            const double b = std::cos(i * 1.3);
            out << a << ',' << b << ',' << (a + b > 0.0 ? 1 : 0) << "\n";
        }
    }
    const std::string model = ws.path("binary.bin");
    const RunResult train = run("train --data " + csv +
                                " --task classification --max-epochs 40 "
                                "--lr 0.05 --num-features 32 --out " +
                                model);
    CHECK(train.exit_code == 0);
    const RunResult r = run("eval --model " + model + " --data " + csv);
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("accuracy=") != std::string::npos);
    CHECK(r.output.find("f1=") != std::string::npos);
    CHECK(r.output.find("auc=") != std::string::npos);
    const auto pos = r.output.find("auc=");
    const double auc_value = std::strtod(r.output.c_str() + pos + 4, nullptr);
    CHECK(auc_value >= 0.9);
}

TEST_CASE("relevances are sorted descending with index tie-break") {
    Workspace ws;
    const std::string csv = ws.path("data.csv");
    REQUIRE(run("synth --kind se1 --n 150 --seed 4 --out " + csv).exit_code ==
            0);
    const std::string model = ws.path("m.bin");
    REQUIRE(run("train --data " + csv +
                " --task regression --max-epochs 2 --out " + model)
                .exit_code == 0);
    const std::string out = ws.path("rel.txt");
    const RunResult r = run("relevances --model " + model + " --out " + out);
    CHECK(r.exit_code == 0);

    std::istringstream in(slurp(out));
    std::string line;
    double prev = 2.0;
    long rows = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        ++rows;
        std::istringstream fields(line);
        std::string name;
        double value;
        fields >> name >> value;
        CHECK(name.front() == 'f');
        CHECK(value <= prev);
        CHECK(value >= 0.0);
        CHECK(value <= 1.0);
        prev = value;
    }
    CHECK(rows == 18);
}

TEST_CASE("tune evaluates the whole grid and reports a winner") {
    Workspace ws;
    const std::string csv = ws.path("data.csv");
    REQUIRE(run("synth --kind se1 --n 150 --seed 6 --out " + csv).exit_code ==
            0);

    SUBCASE("single cell") {
        const std::string out = ws.path("tune1.txt");
        const RunResult r = run("tune --data " + csv +
                                " --task regression --lrs 1e-3 --regs 1e-4 "
                                "--max-epochs 2 --out " +
                                out);
        CHECK(r.exit_code == 0);
        const std::string report = slurp(out);
        CHECK(count_data_lines(report) == 1);
        CHECK(report.find("# winner lr=0.001 reg=0.0001") !=
              std::string::npos);
    }
    SUBCASE("default grid is 4 x 7") {
        const std::string out = ws.path("tune2.txt");
        const RunResult r =
            run("tune --data " + csv +
                " --task regression --max-epochs 1 --num-features 8 --out " +
                out);
        CHECK(r.exit_code == 0);
        CHECK(count_data_lines(slurp(out)) == 28);
    }
}

TEST_CASE("missing required flags exit with usage code") {
    CHECK(run("train --task regression").exit_code == 2);
    CHECK(run("bogus-subcommand").exit_code == 2);
    CHECK(run("--help").exit_code == 0);
}
