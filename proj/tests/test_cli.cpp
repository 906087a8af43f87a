#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "lcf/csv.hpp"
#include "lcf/rng.hpp"

namespace fs = std::filesystem;

namespace {

const fs::path kWork = fs::temp_directory_path() / "lcf_cli_tests";

struct CliResult {
    int exit_code;
    std::string out;
    std::string err;
};

CliResult run_cli(const std::string& args) {
    fs::create_directories(kWork);
    const fs::path out_f = kWork / "stdout.txt";
    const fs::path err_f = kWork / "stderr.txt";
    const std::string cmd = std::string(LCF_CLI_PATH) + " " + args + " > " +
                            out_f.string() + " 2> " + err_f.string();
    const int rc = std::system(cmd.c_str());
    auto slurp = [](const fs::path& p) {
        std::ifstream in(p);
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    return {WEXITSTATUS(rc), slurp(out_f), slurp(err_f)};
}

fs::path write_config(const std::string& name, const nlohmann::json& j) {
    fs::create_directories(kWork);
    const fs::path p = kWork / name;
    std::ofstream out(p);
    out << j.dump(2);
    return p;
}

fs::path write_sine_csv(const std::string& name) {
    fs::create_directories(kWork);
    const fs::path p = kWork / name;
    std::ofstream out(p);
    out << "i_leak\n";
    out.precision(17);
    for (int i = 0; i < 400; ++i) {
        const double t = static_cast<double>(i);
        out << 0.1 + 0.0004 * t + 0.02 * std::sin(2 * 3.14159265358979 * t / 16.0) +
               0.005 * std::sin(2 * 3.14159265358979 * t / 5.0)
            << "\n";
    }
    return p;
}

nlohmann::json tiny_model_block() {
    return nlohmann::json{{"embed_dim", 8},  {"num_heads", 2}, {"input_size", 12},
                          {"horizon", 5},    {"epochs", 12},   {"batch_size", 16},
                          {"dropout", 0.1},  {"learning_rate", 0.005}};
}

std::vector<nlohmann::json> read_jsonl(const fs::path& p) {
    std::ifstream in(p);
    std::vector<nlohmann::json> lines;
    std::string line;
    while (std::getline(in, line))
        if (!line.empty()) lines.push_back(nlohmann::json::parse(line));
    return lines;
}

} // namespace

TEST_CASE("help exits cleanly") {
    REQUIRE(run_cli("--help").exit_code == 0);
}

TEST_CASE("decompose emits components that sum back to the input") {
    const auto csv_path = write_sine_csv("sine.csv");
    const auto cfg = write_config(
        "decompose.json",
        {{"dataset", {{"path", csv_path.string()}}},
         {"filter", {{"name", "ewt"}, {"params", {{"modes", 3}}}}},
         {"out_dir", (kWork / "out_decomp").string()},
         {"experiment", {{"run_label", "t1"}}}});
    const auto r = run_cli("--config " + cfg.string() + " decompose");
    INFO(r.err);
    REQUIRE(r.exit_code == 0);

    const fs::path comp = kWork / "out_decomp" / "decompose" / "t1" / "components.csv";
    REQUIRE(fs::exists(comp));
    // input column equals trend + seasonals + residual
    std::ifstream in(comp);
    std::string header;
    std::getline(in, header);
    REQUIRE(header.rfind("input,trend", 0) == 0);
    std::string line;
    while (std::getline(in, line)) {
        const auto f = lcf::csv::split_record(line, ',');
        const double input = std::stod(f[0]);
        double sum = 0.0;
        for (std::size_t i = 1; i + 1 < f.size(); ++i) sum += std::stod(f[i]);
        REQUIRE(sum == Catch::Approx(input).margin(1e-8));
    }
    REQUIRE(fs::exists(kWork / "out_decomp" / "decompose" / "t1" / "effective_config.json"));
}

TEST_CASE("train then predict reports the fault crossing") {
    const auto cfg = write_config(
        "train.json",
        {{"seed", 11},
         {"model", tiny_model_block()},
         {"filter", {{"name", "hp"}}},
         {"out_dir", (kWork / "out_train").string()},
         {"experiment", {{"run_label", "t1"}, {"max_train_windows", 64}, {"n_eval_windows", 8}}}});
    const auto r = run_cli("--config " + cfg.string() + " train");
    INFO(r.err);
    REQUIRE(r.exit_code == 0);
    const fs::path ckpt = kWork / "out_train" / "train" / "t1" / "checkpoint.json";
    REQUIRE(fs::exists(ckpt));
    REQUIRE(fs::exists(kWork / "out_train" / "train" / "t1" / "loss_curve.csv"));
    REQUIRE(fs::exists(kWork / "out_train" / "train" / "t1" / "metrics.csv"));

    // the surrogate ends near 0.24 A and still rising: with a threshold just
    // above the current level the forecast crosses inside the horizon
    auto pj = nlohmann::json{
        {"seed", 11},
        {"model", tiny_model_block()},
        {"filter", {{"name", "hp"}}},
        {"predict", {{"checkpoint", ckpt.string()}}},
        {"fault", {{"limit_amperes", 0.2}}},
        {"out_dir", (kWork / "out_pred").string()},
        {"experiment", {{"run_label", "t1"}}}};
    const auto pcfg = write_config("predict.json", pj);
    const auto pr = run_cli("--config " + pcfg.string() + " predict");
    INFO(pr.err);
    REQUIRE(pr.exit_code == 0);
    const fs::path rep = kWork / "out_pred" / "predict" / "t1" / "fault_report.json";
    REQUIRE(fs::exists(rep));
    std::ifstream in(rep);
    nlohmann::json j;
    in >> j;
    REQUIRE(j.at("limit_amperes").get<double>() == 0.2);
    REQUIRE_FALSE(j.at("first_crossing_step").is_null());
    REQUIRE(j.at("first_crossing_step").get<std::size_t>() < 5);
    REQUIRE(fs::exists(kWork / "out_pred" / "predict" / "t1" / "forecast.csv"));
}

TEST_CASE("tune stays inside the search space and reports importance") {
    auto model = tiny_model_block();
    model["epochs"] = 6;
    const auto cfg = write_config(
        "tune.json",
        {{"seed", 5},
         {"model", model},
         {"filter", {{"name", "hp"}}},
         {"tpe", {{"n_trials", 12}, {"n_startup", 4}}},
         {"out_dir", (kWork / "out_tune").string()},
         {"experiment",
          {{"run_label", "t1"}, {"max_train_windows", 48}, {"n_eval_windows", 6}}}});
    const auto r = run_cli("--config " + cfg.string() + " tune");
    INFO(r.err);
    REQUIRE(r.exit_code == 0);

    const fs::path dir = kWork / "out_tune" / "tune" / "t1";
    REQUIRE(fs::exists(dir / "history.jsonl"));
    REQUIRE(fs::exists(dir / "best_config.json"));
    REQUIRE(fs::exists(dir / "plot.svg"));

    std::ifstream bf(dir / "best_config.json");
    nlohmann::json best;
    bf >> best;
    const auto& params = best.at("params");
    REQUIRE(params.at("batch_size").get<double>() >= 10);
    REQUIRE(params.at("batch_size").get<double>() <= 20);
    REQUIRE(params.at("num_heads").get<double>() >= 1);
    REQUIRE(params.at("num_heads").get<double>() <= 8);
    REQUIRE(params.at("learning_rate").get<double>() >= 1e-3);
    REQUIRE(params.at("learning_rate").get<double>() <= 1e-2);
    REQUIRE(params.at("dropout").get<double>() >= 0.0);
    REQUIRE(params.at("dropout").get<double>() <= 0.7);
    REQUIRE(read_jsonl(dir / "history.jsonl").size() == 12);
}

TEST_CASE("unknown config keys are a config error (exit 2)") {
    const auto cfg = write_config("bad.json", {{"seedd", 1}, {"modle", {{"x", 1}}}});
    const auto r = run_cli("--config " + cfg.string() + " decompose");
    REQUIRE(r.exit_code == 2);
    const auto err = nlohmann::json::parse(r.err);
    REQUIRE(err.at("error").at("type") == "config");
    const std::string msg = err.at("error").at("message").get<std::string>();
    REQUIRE(msg.find("seedd") != std::string::npos);
    REQUIRE(msg.find("modle") != std::string::npos);
}

TEST_CASE("missing dataset is a data error (exit 3)") {
    const auto cfg = write_config(
        "missing.json", {{"dataset", {{"path", "/nonexistent/definitely.csv"}}}});
    const auto r = run_cli("--config " + cfg.string() + " decompose");
    REQUIRE(r.exit_code == 3);
    const auto err = nlohmann::json::parse(r.err);
    REQUIRE(err.at("error").at("type") == "data");
}

TEST_CASE("quiet mode keeps stdout empty") {
    const auto cfg = write_config(
        "quiet.json", {{"filter", {{"name", "hp"}}},
                       {"out_dir", (kWork / "out_quiet").string()},
                       {"experiment", {{"run_label", "t1"}}}});
    const auto r = run_cli("--quiet --config " + cfg.string() + " decompose");
    REQUIRE(r.exit_code == 0);
    REQUIRE(r.out.empty());
}

TEST_CASE("bench reruns from the effective config reproduce the records") {
    auto model = tiny_model_block();
    const auto cfg = write_config(
        "bench.json",
        {{"seed", 21},
         {"model", model},
         {"filter", {{"name", "hp"}}},
         {"threads", 4},
         {"out_dir", (kWork / "out_bench_a").string()},
         {"experiment",
          {{"name", "horizon_sweep"},
           {"horizons", {5, 10}},
           {"n_seeds", 2},
           {"run_label", "t1"},
           {"max_train_windows", 48},
           {"n_eval_windows", 6}}}});
    const auto r = run_cli("--config " + cfg.string() + " bench");
    INFO(r.err);
    REQUIRE(r.exit_code == 0);
    const fs::path dir_a = kWork / "out_bench_a" / "horizon_sweep" / "t1";
    REQUIRE(fs::exists(dir_a / "records.jsonl"));
    REQUIRE(fs::exists(dir_a / "table.csv"));
    REQUIRE(fs::exists(dir_a / "plot.svg"));
    REQUIRE(fs::exists(dir_a / "effective_config.json"));

    // rerun from the persisted effective config, only redirecting the output
    const auto r2 = run_cli("--config " + (dir_a / "effective_config.json").string() +
                            " --out " + (kWork / "out_bench_b").string() + " bench");
    INFO(r2.err);
    REQUIRE(r2.exit_code == 0);
    const fs::path dir_b = kWork / "out_bench_b" / "horizon_sweep" / "t1";

    auto ja = read_jsonl(dir_a / "records.jsonl");
    auto jb = read_jsonl(dir_b / "records.jsonl");
    REQUIRE(ja.size() == jb.size());
    for (std::size_t i = 0; i < ja.size(); ++i) {
        ja[i].erase("wall_time_s");
        jb[i].erase("wall_time_s");
        REQUIRE(ja[i].dump() == jb[i].dump());
    }
}

TEST_CASE("thread count does not change the records") {
    auto model = tiny_model_block();
    nlohmann::json base{
        {"seed", 31},
        {"model", model},
        {"filter", {{"name", "hp"}}},
        {"threads", 1},
        {"out_dir", (kWork / "out_thr1").string()},
        {"experiment",
         {{"name", "statistical_study"},
          {"n_runs", 3},
          {"horizon", 5},
          {"run_label", "t1"},
          {"max_train_windows", 48},
          {"n_eval_windows", 6}}}};
    const auto c1 = write_config("thr1.json", base);
    base["threads"] = 4;
    base["out_dir"] = (kWork / "out_thr4").string();
    const auto c4 = write_config("thr4.json", base);
    REQUIRE(run_cli("--config " + c1.string() + " bench").exit_code == 0);
    REQUIRE(run_cli("--config " + c4.string() + " bench").exit_code == 0);

    auto ja = read_jsonl(kWork / "out_thr1" / "statistical_study" / "t1" / "records.jsonl");
    auto jb = read_jsonl(kWork / "out_thr4" / "statistical_study" / "t1" / "records.jsonl");
    REQUIRE(ja.size() == jb.size());
    for (std::size_t i = 0; i < ja.size(); ++i) {
        ja[i].erase("wall_time_s");
        jb[i].erase("wall_time_s");
        REQUIRE(ja[i].dump() == jb[i].dump());
    }
}
