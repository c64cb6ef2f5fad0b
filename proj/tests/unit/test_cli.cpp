#include "qcnn/cli.hpp"
#include "qcnn/dataio.hpp"
#include "qcnn/util.hpp"

#include <doctest.h>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <sstream>

namespace fs = std::filesystem;
using qcnn::cli::kExitOk;
using qcnn::cli::kExitRuntime;
using qcnn::cli::kExitUsage;

namespace {

const char *const kSmallData = "synth:dim=256,n=6,sep=8,seed=0";

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = qcnn::cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

struct TempDir {
    fs::path path;
    explicit TempDir(const char *name) : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    [[nodiscard]] std::string operator/(const char *leaf) const { return (path / leaf).string(); }
};

nlohmann::json load_json(const std::string &path) {
    return nlohmann::json::parse(qcnn::read_file(path));
}

std::size_t count_lines(const std::string &text) {
    return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

} // namespace

TEST_CASE("encode-dump prints amplitudes") {
    const auto r = run({"encode-dump", "--encoding", "amplitude", "--x", "3,4"});
    CHECK(r.code == kExitOk);
    CHECK(r.out.find("0,0.6") != std::string::npos);
    CHECK(r.out.find("1,0.8") != std::string::npos);
}

TEST_CASE("usage errors exit with 2") {
    CHECK(run({}).code == kExitUsage);
    CHECK(run({"train", "--ansatz", "a10-pool"}).code == kExitUsage);
    CHECK(run({"train"}).code == kExitUsage);
    CHECK(run({"baseline", "--variant", "cnn9"}).code == kExitUsage);
    CHECK(run({"entropy", "--conv", "10"}).code == kExitUsage);
    CHECK(run({"entropy", "--conv", "2", "--ansatz", "a1-pool", "--layerwise"}).code ==
          kExitUsage);
    CHECK(run({"train", "--ansatz", "a3-nopool", "--noise", "thermal"}).code == kExitUsage);
    CHECK(run({"train", "--ansatz", "a3-nopool", "--lr", "-1"}).code == kExitUsage);
    CHECK(run({"frobnicate"}).code == kExitUsage);
    CHECK(run({"--help"}).code == kExitOk);
}

TEST_CASE("runtime errors exit with 1") {
    TempDir dir("qcnn_cli_runtime");
    const auto r = run({"train", "--ansatz", "a3-nopool", "--data", dir / "missing.csv",
                        "--out", dir / "r.json"});
    CHECK(r.code == kExitRuntime);
    CHECK(r.err.find("missing.csv") != std::string::npos);
    const auto angle = run({"train", "--ansatz", "a3-nopool", "--encoding", "angle", "--data",
                            kSmallData, "--out", dir / "r.json"});
    CHECK(angle.code == kExitRuntime);
}

TEST_CASE("synth writes a deterministic dataset with a manifest") {
    TempDir dir("qcnn_cli_synth");
    REQUIRE(run({"synth", "--dim", "256", "--n", "200", "--sep", "8", "--seed", "0", "--out",
                 dir / "a.csv"})
                .code == kExitOk);
    REQUIRE(run({"synth", "--out", dir / "b.csv"}).code == kExitOk);
    const auto a = qcnn::read_file(dir / "a.csv");
    CHECK(a == qcnn::read_file(dir / "b.csv"));
    CHECK(count_lines(a) == 401);
    const auto manifest = load_json(dir / "a.csv.manifest.json");
    CHECK(manifest["n_records"] == 400);
    CHECK(manifest["checksum"] == qcnn::fnv1a_hex(a));
    CHECK(qcnn::load_features(dir / "a.csv").records.size() == 400);
}

TEST_CASE("train report and config replay") {
    TempDir dir("qcnn_cli_train");
    const auto first = run({"train", "--ansatz", "a2-nopool", "--data", kSmallData, "--epochs",
                            "2", "--batch-size", "4", "--out", dir / "r1.json", "--save-config",
                            dir / "run.ini", "--export-layer", "1", "--export-states",
                            dir / "states.csv"});
    REQUIRE(first.code == kExitOk);
    auto r1 = load_json(dir / "r1.json");
    CHECK(r1["losses"].size() == 3);
    CHECK(r1["config"]["epochs"] == 2);
    CHECK(r1["config"]["data"] == kSmallData);
    CHECK(r1["model"]["param_count"] == 6);
    CHECK(qcnn::read_file(dir / "states.csv").rfind("index,label,q0_z,q0_p1", 0) == 0);

    const auto ini = qcnn::read_file(dir / "run.ini");
    CHECK(ini.rfind("[train]\n", 0) == 0);
    CHECK(ini.find("save-config") == std::string::npos);
    CHECK(ini.find("epochs=2") != std::string::npos);

    REQUIRE(run({"--config", dir / "run.ini", "train", "--out", dir / "r2.json"}).code ==
            kExitOk);
    auto r2 = load_json(dir / "r2.json");
    r1.erase("wall_time_s");
    r2.erase("wall_time_s");
    CHECK(r1.dump() == r2.dump());

    REQUIRE(run({"--config", dir / "run.ini", "train", "--epochs", "1", "--out",
                 dir / "r3.json"})
                .code == kExitOk);
    CHECK(load_json(dir / "r3.json")["losses"].size() == 2);
}

TEST_CASE("baseline report shares the quantum schema") {
    TempDir dir("qcnn_cli_baseline");
    REQUIRE(run({"baseline", "--variant", "cnn1", "--data", kSmallData, "--epochs", "1", "--out",
                 dir / "b.json"})
                .code == kExitOk);
    REQUIRE(run({"train", "--ansatz", "a1-nopool", "--data", kSmallData, "--epochs", "1",
                 "--out", dir / "q.json"})
                .code == kExitOk);
    const auto b = load_json(dir / "b.json");
    const auto q = load_json(dir / "q.json");
    CHECK(b["model"]["param_count"] == 12);
    std::vector<std::string> bk, qk;
    for (const auto &[k, v] : b.items()) {
        bk.push_back(k);
    }
    for (const auto &[k, v] : q.items()) {
        qk.push_back(k);
    }
    CHECK(bk == qk);
    CHECK(b["config"] == q["config"]);
}

TEST_CASE("sweep cardinality") {
    TempDir dir("qcnn_cli_sweep");
    auto r = run({"sweep", "--ansatz", "a1-pool,a3-nopool", "--noise",
                  "bitflip,phaseflip,ampdamp,depol", "--p", "0.01,0.05", "--seeds", "3",
                  "--epochs", "0", "--data", kSmallData, "--out", dir / "s"});
    REQUIRE(r.code == kExitOk);
    const auto csv = qcnn::read_file(dir / "s/sweep.csv");
    CHECK(count_lines(csv) == 17);
    CHECK(csv.rfind("ansatz,noise,p,n_seeds,mean_acc,std_acc,n_failed\n", 0) == 0);
    CHECK(std::distance(fs::directory_iterator(dir.path / "s/cells"), fs::directory_iterator{}) ==
          48);
    CHECK(load_json(dir / "s/sweep.config.json")["seeds"] == 3);

    r = run({"sweep", "--epochs", "0", "--data", kSmallData, "--out", dir / "all"});
    REQUIRE(r.code == kExitOk);
    CHECK(count_lines(qcnn::read_file(dir / "all/sweep.csv")) == 19);
}

TEST_CASE("interrupted sweep resumes with the remaining cells") {
    TempDir dir("qcnn_cli_resume");
    const std::vector<std::string> base = {"sweep",    "--ansatz", "a1-nopool,a2-nopool",
                                           "--noise",  "none,depol", "--p", "0.05",
                                           "--seeds",  "2",        "--epochs", "1",
                                           "--data",   kSmallData, "--out", dir / "s"};
    auto limited = base;
    limited.insert(limited.end(), {"--max-cells", "3"});
    auto r = run(limited);
    REQUIRE(r.code == kExitOk);
    CHECK(r.out.find("ran 3 cells") != std::string::npos);
    CHECK_FALSE(fs::exists(dir.path / "s/sweep.csv"));

    r = run(base);
    REQUIRE(r.code == kExitOk);
    CHECK(r.out.find("ran 5, skipped 3") != std::string::npos);
    const auto csv = qcnn::read_file(dir / "s/sweep.csv");

    r = run(base);
    CHECK(r.out.find("ran 0, skipped 8") != std::string::npos);
    CHECK(qcnn::read_file(dir / "s/sweep.csv") == csv);
}

TEST_CASE("entropy command writes histogram and summary") {
    TempDir dir("qcnn_cli_entropy");
    REQUIRE(run({"entropy", "--conv", "2", "-n", "1000", "--out", dir / "e"}).code == kExitOk);
    const auto summary = load_json(dir / "e/conv2.json");
    CHECK(summary["n"] == 1000);
    CHECK(std::abs(summary["mean"].get<double>() - 1.0) < 1e-6);
    CHECK(summary["config"]["seed"] == 0);
    CHECK(count_lines(qcnn::read_file(dir / "e/conv2.csv")) == 51);

    REQUIRE(run({"entropy", "--ansatz", "a8-nopool", "--layerwise", "-n", "30", "--out",
                 dir / "e"})
                .code == kExitOk);
    CHECK(fs::exists(dir.path / "e/a8-nopool-layer3.json"));
}

TEST_CASE("probe command") {
    const auto r = run({"probe", "--ansatz", "a1-nopool", "--draws", "10"});
    CHECK(r.code == kExitOk);
    CHECK(r.out.find("median=") != std::string::npos);
}
