#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "gsmote/benchmark.hpp"
#include "gsmote/dataset.hpp"
#include "gsmote/fixtures.hpp"
#include "gsmote/rng.hpp"

using namespace gsmote;
namespace fs = std::filesystem;

namespace {

class TempDir {
  public:
    TempDir() {
        base_ = fs::temp_directory_path() /
                ("gsmote_test_" + std::to_string(counter_++));
        fs::create_directories(base_);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(base_, ec);
    }
    std::string path(const std::string& name) const { return (base_ / name).string(); }

  private:
    fs::path base_;
    static inline int counter_ = 0;
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    EXPECT_TRUE(in.is_open()) << path;
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

void spit(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
}

std::size_t line_count(const std::string& text) {
    std::size_t n = 0;
    for (char c : text)
        if (c == '\n') ++n;
    return n;
}

void write_fixture_csv(const std::string& path, double ir, std::size_t n, std::uint64_t seed) {
    FixtureSpec spec;
    spec.kind = "two_gaussians";
    spec.ir = ir;
    spec.n = n;
    spec.seed = seed;
    save_csv(make_fixture(spec), path);
}

}  // namespace

TEST(run_config, defaults_and_grid_sizes) {
    RunConfig cfg;
    EXPECT_EQ(cfg.oversamplers,
              (std::vector<std::string>{"none", "smote", "borderline1", "borderline2", "adasyn",
                                        "gsmote"}));
    EXPECT_EQ(cfg.classifiers, (std::vector<std::string>{"lr", "gbc"}));
    EXPECT_EQ(cfg.folds, 5u);
    EXPECT_EQ(cfg.repeats, 5u);
    EXPECT_EQ(cfg.seed, 42u);

    // Grid expansion: 3 strategies x 2 k x 4 truncation x 3 deformation.
    EXPECT_EQ(expand_os_grid("gsmote", default_grid("gsmote")).size(), 72u);
    EXPECT_EQ(expand_os_grid("smote", default_grid("smote")).size(), 2u);
    EXPECT_EQ(expand_os_grid("borderline1", default_grid("borderline1")).size(), 2u);
    EXPECT_EQ(expand_os_grid("adasyn", default_grid("adasyn")).size(), 1u);
    EXPECT_EQ(expand_os_grid("none", default_grid("none")).size(), 1u);
    EXPECT_EQ(expand_os_grid("random", default_grid("random")).size(), 1u);
    EXPECT_EQ(expand_clf_grid("lr", cfg).size(), 1u);
    EXPECT_EQ(expand_clf_grid("gbc", cfg).size(), 4u);

    // Nesting order: deformation varies fastest, then truncation, then k,
    // then strategy; the first combo is the all-first-values corner.
    const auto combos = expand_os_grid("gsmote", default_grid("gsmote"));
    EXPECT_EQ(combos[0].a_sel, SelectionStrategy::minority);
    EXPECT_EQ(combos[0].k, 3u);
    EXPECT_DOUBLE_EQ(combos[0].a_trunc, -1.0);
    EXPECT_DOUBLE_EQ(combos[0].a_def, 0.0);
    EXPECT_DOUBLE_EQ(combos[1].a_def, 0.5);
    EXPECT_DOUBLE_EQ(combos[3].a_trunc, 0.0);
    EXPECT_EQ(combos[12].k, 4u);
    EXPECT_EQ(combos[24].a_sel, SelectionStrategy::majority);
}

TEST(run_config, rejects_bad_values_before_any_work) {
    TempDir dir;
    const std::string data = dir.path("d.csv");
    write_fixture_csv(data, 4.0, 60, 1);

    auto config_with = [&](const std::string& body) {
        const std::string path = dir.path("cfg.json");
        spit(path, body);
        return path;
    };

    // a_trunc outside [-1, 1] fails validation at load time.
    EXPECT_THROW(
        load_run_config(config_with("{\"datasets\": [\"" + data +
                                    "\"], \"grids\": {\"gsmote\": {\"a_trunc\": [2.0]}}}")),
        std::runtime_error);
    EXPECT_THROW(load_run_config(config_with("{\"datasets\": []}")), std::runtime_error);
    EXPECT_THROW(load_run_config(config_with("{}")), std::runtime_error);
    EXPECT_THROW(
        load_run_config(config_with("{\"datasets\": [\"x\"], \"mystery\": 1}")),
        std::runtime_error);
    EXPECT_THROW(
        load_run_config(config_with("{\"datasets\": [\"x\"], \"oversamplers\": [\"vae\"]}")),
        std::runtime_error);
    EXPECT_THROW(
        load_run_config(config_with("{\"datasets\": [\"x\"], \"folds\": 1}")),
        std::runtime_error);
    EXPECT_THROW(
        load_run_config(config_with("{\"datasets\": [\"x\"], \"repeats\": 0}")),
        std::runtime_error);
    EXPECT_THROW(
        load_run_config(config_with("{\"datasets\": [\"x\"], \"oversamplers\": [\"smote\"],"
                                    "\"grids\": {\"gsmote\": {\"k\": [3]}}}")),
        std::runtime_error);

    // A bad grid value aborts run_benchmark before the output dir is created.
    const std::string out = dir.path("never");
    const std::string bad = config_with(
        "{\"datasets\": [\"" + data + "\"], \"output_dir\": \"" + out +
        "\", \"grids\": {\"gsmote\": {\"a_def\": [1.5]}}}");
    std::ostringstream log;
    BenchmarkOptions opt;
    opt.config_path = bad;
    EXPECT_EQ(run_benchmark(opt, log), 1);
    EXPECT_FALSE(fs::exists(out));
    EXPECT_NE(log.str().find("a_def"), std::string::npos);
}

TEST(run_config, parses_explicit_grids) {
    TempDir dir;
    const std::string path = dir.path("cfg.json");
    spit(path, R"({
      "datasets": [{"path": "a.csv", "label_column": "cls"}, "b.csv"],
      "oversamplers": ["none", "gsmote"],
      "classifiers": ["gbc"],
      "grids": {"gsmote": {"k": [5], "a_sel": ["majority"], "a_trunc": [0.25], "a_def": [0.75]}},
      "gbc": {"max_depth": [2], "n_estimators": [10, 20]},
      "folds": 3,
      "repeats": 2,
      "seed": 7,
      "output_dir": "out",
      "workers": 4
    })");
    const RunConfig cfg = load_run_config(path);
    ASSERT_EQ(cfg.datasets.size(), 2u);
    EXPECT_EQ(cfg.datasets[0].path, "a.csv");
    ASSERT_TRUE(cfg.datasets[0].label_column.has_value());
    EXPECT_EQ(*cfg.datasets[0].label_column, "cls");
    EXPECT_FALSE(cfg.datasets[1].label_column.has_value());
    EXPECT_EQ(cfg.workers, 4u);
    EXPECT_EQ(cfg.seed, 7u);

    const auto combos = expand_os_grid("gsmote", cfg.grids.at("gsmote"));
    ASSERT_EQ(combos.size(), 1u);
    EXPECT_EQ(combos[0].k, 5u);
    EXPECT_EQ(combos[0].a_sel, SelectionStrategy::majority);
    EXPECT_DOUBLE_EQ(combos[0].a_trunc, 0.25);
    EXPECT_DOUBLE_EQ(combos[0].a_def, 0.75);
    const auto clf = expand_clf_grid("gbc", cfg);
    ASSERT_EQ(clf.size(), 2u);
    EXPECT_EQ(clf[0].max_depth, 2u);
    EXPECT_EQ(clf[0].n_estimators, 10u);
    EXPECT_EQ(clf[1].n_estimators, 20u);
}

namespace {

// A small but real benchmark configuration: two oversamplers, two
// classifiers, shrunken grids so the whole run takes a second or two.
std::string tiny_config(const std::string& data, const std::string& out,
                        const std::string& oversamplers = "[\"none\", \"smote\"]",
                        const std::string& grids = "{\"smote\": {\"k\": [3]}}") {
    return "{\n"
           "  \"datasets\": [\"" + data + "\"],\n"
           "  \"oversamplers\": " + oversamplers + ",\n"
           "  \"classifiers\": [\"lr\", \"gbc\"],\n"
           "  \"grids\": " + grids + ",\n"
           "  \"gbc\": {\"max_depth\": [2], \"n_estimators\": [5]},\n"
           "  \"folds\": 3,\n"
           "  \"repeats\": 2,\n"
           "  \"seed\": 42,\n"
           "  \"output_dir\": \"" + out + "\",\n"
           "  \"workers\": 1\n"
           "}\n";
}

}  // namespace

TEST(benchmark, tiny_run_emits_expected_journal) {
    TempDir dir;
    const std::string data = dir.path("tiny.csv");
    write_fixture_csv(data, 4.0, 60, 2);
    const std::string out = dir.path("out");
    const std::string cfg = dir.path("cfg.json");
    spit(cfg, tiny_config(data, out));

    std::ostringstream log;
    BenchmarkOptions opt;
    opt.config_path = cfg;
    ASSERT_EQ(run_benchmark(opt, log), 0) << log.str();

    const std::string journal = slurp(out + "/cells.csv");
    // Header plus 2 oversamplers x 2 classifiers x 3 metrics x 2 repeats:
    // 12 rows per repeat.
    EXPECT_EQ(line_count(journal), 1u + 24u);
    EXPECT_NE(journal.find("dataset,classifier,oversampler,metric,repeat,score,best_params"),
              std::string::npos);
    EXPECT_NE(journal.find("tiny,gbc,none,auc,0,"), std::string::npos);
    EXPECT_NE(journal.find("tiny,lr,smote,g_mean,1,"), std::string::npos);
    EXPECT_NE(journal.find("smote(k=3)+gbc(depth=2,trees=5)"), std::string::npos);

    // cv_scores: one row per (dataset, classifier, metric).
    const std::string scores = slurp(out + "/cv_scores.csv");
    EXPECT_EQ(line_count(scores), 1u + 6u);
    EXPECT_NE(scores.find("dataset,classifier,metric,none,smote"), std::string::npos);

    // mean_ranking: one row per (classifier, metric); single dataset ranks
    // are each a permutation of {1, 2} or a tie.
    const std::string ranking = slurp(out + "/mean_ranking.csv");
    EXPECT_EQ(line_count(ranking), 1u + 6u);

    // friedman needs two datasets; with one it holds only the header.
    const std::string fried = slurp(out + "/friedman.csv");
    EXPECT_EQ(line_count(fried), 1u);

    const std::string manifest = slurp(out + "/manifest.json");
    EXPECT_NE(manifest.find("\"cells\": 24"), std::string::npos);
    EXPECT_NE(manifest.find("\"seed\": 42"), std::string::npos);
    EXPECT_EQ(manifest.find("workers"), std::string::npos)
        << "manifest must not record the worker count";
    EXPECT_EQ(manifest.find("time"), std::string::npos)
        << "manifest must not record timestamps";
}

TEST(benchmark, reruns_are_byte_identical) {
    TempDir dir;
    const std::string data = dir.path("tiny.csv");
    write_fixture_csv(data, 4.0, 60, 3);

    auto run_into = [&](const std::string& out, std::size_t workers) {
        const std::string cfg = dir.path("cfg_" + out + ".json");
        spit(cfg, tiny_config(data, dir.path(out)));
        std::ostringstream log;
        BenchmarkOptions opt;
        opt.config_path = cfg;
        opt.workers = workers;
        EXPECT_EQ(run_benchmark(opt, log), 0) << log.str();
    };
    run_into("a", 1);
    run_into("b", 1);
    run_into("c", 3);

    for (const std::string file :
         {"cells.csv", "cv_scores.csv", "mean_ranking.csv", "friedman.csv", "manifest.json",
          "warnings.log"}) {
        const std::string a = slurp(dir.path("a") + "/" + file);
        EXPECT_EQ(a, slurp(dir.path("b") + "/" + file)) << file;
        EXPECT_EQ(a, slurp(dir.path("c") + "/" + file)) << file << " (3 workers)";
    }
}

TEST(benchmark, resume_skips_complete_units_and_finishes_partial_ones) {
    TempDir dir;
    const std::string data = dir.path("tiny.csv");
    write_fixture_csv(data, 4.0, 60, 4);
    const std::string out = dir.path("out");
    const std::string cfg = dir.path("cfg.json");
    spit(cfg, tiny_config(data, out));

    BenchmarkOptions opt;
    opt.config_path = cfg;
    {
        std::ostringstream log;
        ASSERT_EQ(run_benchmark(opt, log), 0);
    }
    const std::string full_journal = slurp(out + "/cells.csv");
    const std::string full_scores = slurp(out + "/cv_scores.csv");

    // Resume over a complete journal runs nothing and rewrites identically.
    {
        std::ostringstream log;
        BenchmarkOptions resume = opt;
        resume.resume = true;
        ASSERT_EQ(run_benchmark(resume, log), 0);
        EXPECT_NE(log.str().find("0 to run"), std::string::npos) << log.str();
    }
    EXPECT_EQ(slurp(out + "/cells.csv"), full_journal);
    EXPECT_EQ(slurp(out + "/cv_scores.csv"), full_scores);

    // Truncate the journal to an incomplete prefix; resume must redo only
    // the incomplete units and reproduce the full outputs byte for byte.
    std::istringstream lines(full_journal);
    std::string line, partial;
    for (int i = 0; i < 5 && std::getline(lines, line); ++i) partial += line + "\n";
    spit(out + "/cells.csv", partial);
    {
        std::ostringstream log;
        BenchmarkOptions resume = opt;
        resume.resume = true;
        ASSERT_EQ(run_benchmark(resume, log), 0);
        EXPECT_EQ(log.str().find("0 to run"), std::string::npos) << log.str();
    }
    EXPECT_EQ(slurp(out + "/cells.csv"), full_journal);
    EXPECT_EQ(slurp(out + "/cv_scores.csv"), full_scores);
}

TEST(benchmark, resume_refuses_changed_configuration) {
    TempDir dir;
    const std::string data = dir.path("tiny.csv");
    write_fixture_csv(data, 4.0, 60, 5);
    const std::string out = dir.path("out");
    const std::string cfg = dir.path("cfg.json");
    spit(cfg, tiny_config(data, out));

    BenchmarkOptions opt;
    opt.config_path = cfg;
    {
        std::ostringstream log;
        ASSERT_EQ(run_benchmark(opt, log), 0);
    }
    // Drop smote from the config; its journal rows no longer belong.
    spit(cfg, tiny_config(data, out, "[\"none\"]", "{}"));
    std::ostringstream log;
    BenchmarkOptions resume = opt;
    resume.resume = true;
    EXPECT_EQ(run_benchmark(resume, log), 1);
    EXPECT_NE(log.str().find("not in this configuration"), std::string::npos) << log.str();
    EXPECT_NE(log.str().find("config changed?"), std::string::npos) << log.str();
}

TEST(benchmark, failing_cell_names_itself_and_preserves_journal) {
    TempDir dir;
    // Minority class smaller than the fold count: the first cell fails.
    const std::string data = dir.path("narrow.csv");
    write_fixture_csv(data, 14.0, 60, 6);  // 4 minority rows
    const std::string out = dir.path("out");
    const std::string cfg = dir.path("cfg.json");
    spit(cfg, tiny_config(data, out));  // folds = 3 > would pass; force 5

    std::string body = slurp(cfg);
    const auto at = body.find("\"folds\": 3");
    ASSERT_NE(at, std::string::npos);
    body.replace(at, 10, "\"folds\": 5");
    spit(cfg, body);

    std::ostringstream log;
    BenchmarkOptions opt;
    opt.config_path = cfg;
    EXPECT_EQ(run_benchmark(opt, log), 1);
    const std::string msg = log.str();
    EXPECT_NE(msg.find("cell dataset=narrow"), std::string::npos) << msg;
    EXPECT_NE(msg.find("oversampler=none"), std::string::npos) << msg;
    EXPECT_NE(msg.find("repeat=0"), std::string::npos) << msg;
    EXPECT_NE(msg.find("partial results preserved"), std::string::npos) << msg;
    EXPECT_TRUE(fs::exists(out + "/cells.csv"));
}

TEST(benchmark, warnings_deduplicate_into_sorted_log) {
    TempDir dir;
    // Isolated minority cluster: borderline falls back in every fold.
    Dataset d;
    d.name = "isolated";
    d.feature_names = {"f1", "f2"};
    d.label_name = "label";
    d.features = Matrix(0, 2);
    Rng rng(9);
    for (int i = 0; i < 60; ++i) {
        d.features.append_row({50.0 + rng.uniform(), 50.0 + rng.uniform()});
        d.labels.push_back("0");
    }
    for (int i = 0; i < 12; ++i) {
        d.features.append_row({0.01 * rng.uniform(), 0.01 * rng.uniform()});
        d.labels.push_back("1");
    }
    finalize_dataset(d);
    const std::string data = dir.path("isolated.csv");
    save_csv(d, data);

    const std::string out = dir.path("out");
    const std::string cfg = dir.path("cfg.json");
    spit(cfg, "{\n"
              "  \"datasets\": [\"" + data + "\"],\n"
              "  \"oversamplers\": [\"borderline1\"],\n"
              "  \"classifiers\": [\"lr\"],\n"
              "  \"grids\": {\"borderline1\": {\"k\": [3]}},\n"
              "  \"folds\": 3,\n"
              "  \"repeats\": 2,\n"
              "  \"seed\": 42,\n"
              "  \"output_dir\": \"" + out + "\",\n"
              "  \"workers\": 1\n"
              "}\n");

    std::ostringstream log;
    BenchmarkOptions opt;
    opt.config_path = cfg;
    ASSERT_EQ(run_benchmark(opt, log), 0) << log.str();

    const std::string warnings = slurp(out + "/warnings.log");
    ASSERT_FALSE(warnings.empty());
    std::istringstream in(warnings);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line))
        if (!line.empty()) lines.push_back(line);
    // 3 folds x 2 repeats distinct contexts, sorted, no duplicates.
    EXPECT_EQ(lines.size(), 6u);
    EXPECT_TRUE(std::is_sorted(lines.begin(), lines.end()));
    EXPECT_EQ(std::adjacent_find(lines.begin(), lines.end()), lines.end());
    for (const std::string& w : lines)
        EXPECT_NE(w.find("danger set is empty"), std::string::npos) << w;

    // The manifest mirrors the warnings.
    const std::string manifest = slurp(out + "/manifest.json");
    EXPECT_NE(manifest.find("danger set is empty"), std::string::npos);
}

TEST(benchmark, journal_round_trips_params_with_commas) {
    detail::CellKey key{"ds", "gbc", "gsmote", "auc", 3};
    detail::CellValue value{0.912345678901234,
                            "gsmote(sel=combined,k=3,trunc=0.5,def=0)+gbc(depth=5,trees=50)"};
    const std::string line = detail::journal_line(key, value);
    const auto [k2, v2] = detail::parse_journal_line(line, 1);
    EXPECT_EQ(k2, key);
    EXPECT_EQ(v2.score, value.score);
    EXPECT_EQ(v2.best_params, value.best_params);

    EXPECT_THROW(detail::parse_journal_line("too,few,fields", 1), std::runtime_error);
    EXPECT_THROW(detail::parse_journal_line("a,b,c,d,notanint,0.5,p", 1), std::runtime_error);
    EXPECT_THROW(detail::parse_journal_line("a,b,c,d,1,notascore,p", 1), std::runtime_error);
}
