#pragma once

#include <atomic>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "gsmote/evaluation.hpp"
#include "gsmote/stats.hpp"

namespace gsmote {

inline constexpr const char* kVersion = "0.1.0";

struct DatasetRef {
    std::string path;
    std::optional<std::string> label_column;
};

// Per-oversampler hyper-parameter lists. Only k applies to the interpolation
// methods; the geometric oversampler consumes all four dimensions.
struct MethodGrid {
    std::vector<std::size_t> k{3, 4};
    std::vector<std::string> a_sel{"minority", "majority", "combined"};
    std::vector<double> a_trunc{-1.0, 0.0, 0.5, 1.0};
    std::vector<double> a_def{0.0, 0.5, 1.0};
};

inline MethodGrid default_grid(const std::string& method) {
    MethodGrid g;
    if (method == "adasyn") g.k = {3};
    return g;
}

struct RunConfig {
    std::vector<DatasetRef> datasets;
    std::vector<std::string> oversamplers{"none",        "smote",  "borderline1",
                                          "borderline2", "adasyn", "gsmote"};
    std::vector<std::string> classifiers{"lr", "gbc"};
    std::map<std::string, MethodGrid> grids;
    std::vector<std::size_t> gbc_max_depth{5, 8};
    std::vector<std::size_t> gbc_n_estimators{50, 100};
    std::size_t folds = 5;
    std::size_t repeats = 5;
    std::uint64_t seed = 42;
    std::string output_dir = "results";
    std::size_t workers = 1;
};

namespace detail {

inline void require_keys(const nlohmann::json& obj, const std::set<std::string>& allowed,
                         const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!allowed.contains(it.key()))
            throw std::runtime_error("config: unknown key '" + it.key() + "' in " + where);
}

template <typename T>
inline std::vector<T> list_of(const nlohmann::json& j, const std::string& where) {
    if (!j.is_array() || j.empty())
        throw std::runtime_error("config: " + where + " must be a nonempty array");
    std::vector<T> out;
    for (const auto& v : j) out.push_back(v.get<T>());
    return out;
}

}  // namespace detail

// Parses and fully validates a run configuration. Every grid value is range
// checked here, before any dataset is read or any directory is touched, so a
// bad config fails before work starts. Datasets themselves load later.
inline RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("config parse error in " + path + ": " + e.what());
    }
    if (!j.is_object()) throw std::runtime_error("config: top level must be an object");
    detail::require_keys(j,
                         {"datasets", "oversamplers", "classifiers", "grids", "gbc", "folds",
                          "repeats", "seed", "output_dir", "workers"},
                         "top level");

    RunConfig cfg;
    if (!j.contains("datasets")) throw std::runtime_error("config: datasets is required");
    for (const auto& dj : j.at("datasets")) {
        DatasetRef ref;
        if (dj.is_string()) {
            ref.path = dj.get<std::string>();
        } else if (dj.is_object()) {
            detail::require_keys(dj, {"path", "label_column"}, "a dataset entry");
            ref.path = dj.at("path").get<std::string>();
            if (dj.contains("label_column"))
                ref.label_column = dj.at("label_column").get<std::string>();
        } else {
            throw std::runtime_error("config: dataset entries must be paths or objects");
        }
        cfg.datasets.push_back(std::move(ref));
    }
    if (cfg.datasets.empty()) throw std::runtime_error("config: datasets must be nonempty");

    if (j.contains("oversamplers"))
        cfg.oversamplers = detail::list_of<std::string>(j.at("oversamplers"), "oversamplers");
    if (j.contains("classifiers"))
        cfg.classifiers = detail::list_of<std::string>(j.at("classifiers"), "classifiers");
    if (j.contains("folds")) cfg.folds = j.at("folds").get<std::size_t>();
    if (j.contains("repeats")) cfg.repeats = j.at("repeats").get<std::size_t>();
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("output_dir")) cfg.output_dir = j.at("output_dir").get<std::string>();
    if (j.contains("workers")) cfg.workers = j.at("workers").get<std::size_t>();

    std::set<std::string> seen;
    for (const auto& m : cfg.oversamplers) {
        bool known = false;
        for (const auto& id : method_ids()) known = known || id == m;
        if (!known) throw std::runtime_error("config: unknown oversampler '" + m + "'");
        if (!seen.insert(m).second)
            throw std::runtime_error("config: duplicate oversampler '" + m + "'");
    }
    seen.clear();
    for (const auto& c : cfg.classifiers) {
        if (c != "lr" && c != "gbc")
            throw std::runtime_error("config: unknown classifier '" + c + "'");
        if (!seen.insert(c).second)
            throw std::runtime_error("config: duplicate classifier '" + c + "'");
    }
    if (cfg.oversamplers.empty()) throw std::runtime_error("config: oversamplers must be nonempty");
    if (cfg.classifiers.empty()) throw std::runtime_error("config: classifiers must be nonempty");
    if (cfg.folds < 2) throw std::runtime_error("config: folds must be at least 2");
    if (cfg.repeats < 1) throw std::runtime_error("config: repeats must be at least 1");
    if (cfg.workers < 1) throw std::runtime_error("config: workers must be at least 1");

    for (const auto& m : cfg.oversamplers) cfg.grids.emplace(m, default_grid(m));
    if (j.contains("grids")) {
        const auto& gj = j.at("grids");
        if (!gj.is_object()) throw std::runtime_error("config: grids must be an object");
        for (auto it = gj.begin(); it != gj.end(); ++it) {
            auto found = cfg.grids.find(it.key());
            if (found == cfg.grids.end())
                throw std::runtime_error("config: grid for '" + it.key() +
                                         "' does not match any configured oversampler");
            detail::require_keys(*it, {"k", "a_sel", "a_trunc", "a_def"},
                                 "grids." + it.key());
            MethodGrid& g = found->second;
            if (it->contains("k")) g.k = detail::list_of<std::size_t>(it->at("k"), "grids.k");
            if (it->contains("a_sel"))
                g.a_sel = detail::list_of<std::string>(it->at("a_sel"), "grids.a_sel");
            if (it->contains("a_trunc"))
                g.a_trunc = detail::list_of<double>(it->at("a_trunc"), "grids.a_trunc");
            if (it->contains("a_def"))
                g.a_def = detail::list_of<double>(it->at("a_def"), "grids.a_def");
        }
    }
    for (const auto& [method, g] : cfg.grids) {
        for (std::size_t k : g.k)
            if (k < 1) throw std::runtime_error("config: k must be positive in grid for " + method);
        for (double v : g.a_trunc)
            if (v < -1.0 || v > 1.0)
                throw std::runtime_error("config: a_trunc must lie in [-1, 1] in grid for " +
                                         method);
        for (double v : g.a_def)
            if (v < 0.0 || v > 1.0)
                throw std::runtime_error("config: a_def must lie in [0, 1] in grid for " + method);
        for (const auto& s : g.a_sel) strategy_from_string(s);
        if (g.k.empty() || g.a_sel.empty() || g.a_trunc.empty() || g.a_def.empty())
            throw std::runtime_error("config: empty grid dimension for " + method);
    }

    if (j.contains("gbc")) {
        const auto& bj = j.at("gbc");
        detail::require_keys(bj, {"max_depth", "n_estimators"}, "gbc");
        if (bj.contains("max_depth"))
            cfg.gbc_max_depth = detail::list_of<std::size_t>(bj.at("max_depth"), "gbc.max_depth");
        if (bj.contains("n_estimators"))
            cfg.gbc_n_estimators =
                detail::list_of<std::size_t>(bj.at("n_estimators"), "gbc.n_estimators");
    }
    for (std::size_t d : cfg.gbc_max_depth)
        if (d < 1) throw std::runtime_error("config: gbc max_depth must be at least 1");
    return cfg;
}

// Expands one oversampler id into its parameter combos, in a fixed nesting
// order (selection strategy, then k, then truncation, then deformation) that
// defines the tie-breaking sequence for grid maximization.
inline std::vector<OversamplerParams> expand_os_grid(const std::string& method,
                                                     const MethodGrid& g) {
    std::vector<OversamplerParams> out;
    OversamplerParams base;
    base.method = method;
    if (method == "none" || method == "random") {
        out.push_back(base);
        return out;
    }
    if (method == "gsmote") {
        for (const auto& sel : g.a_sel) {
            for (std::size_t k : g.k) {
                for (double at : g.a_trunc) {
                    for (double ad : g.a_def) {
                        OversamplerParams op = base;
                        op.a_sel = strategy_from_string(sel);
                        op.k = k;
                        op.a_trunc = at;
                        op.a_def = ad;
                        out.push_back(op);
                    }
                }
            }
        }
        return out;
    }
    for (std::size_t k : g.k) {
        OversamplerParams op = base;
        op.k = k;
        out.push_back(op);
    }
    return out;
}

inline std::vector<ClassifierParams> expand_clf_grid(const std::string& family,
                                                     const RunConfig& cfg) {
    std::vector<ClassifierParams> out;
    if (family == "lr") {
        ClassifierParams cp;
        cp.id = "lr";
        out.push_back(cp);
        return out;
    }
    for (std::size_t d : cfg.gbc_max_depth) {
        for (std::size_t e : cfg.gbc_n_estimators) {
            ClassifierParams cp;
            cp.id = "gbc";
            cp.max_depth = d;
            cp.n_estimators = e;
            out.push_back(cp);
        }
    }
    return out;
}

namespace detail {

struct CellKey {
    std::string dataset;
    std::string classifier;
    std::string oversampler;
    std::string metric;
    int repeat = 0;
    auto operator<=>(const CellKey&) const = default;
};

struct CellValue {
    double score = 0.0;
    std::string best_params;
};

inline std::string journal_line(const CellKey& k, const CellValue& v) {
    return k.dataset + "," + k.classifier + "," + k.oversampler + "," + k.metric + "," +
           std::to_string(k.repeat) + "," + format_double(v.score) + "," + v.best_params;
}

// Inverse of journal_line. The trailing best_params field may itself contain
// commas, so only the first six fields are split.
inline std::pair<CellKey, CellValue> parse_journal_line(const std::string& line,
                                                        std::size_t line_no) {
    std::vector<std::string> head;
    std::size_t start = 0;
    for (int field = 0; field < 6; ++field) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string::npos)
            throw std::runtime_error("journal line " + std::to_string(line_no) +
                                     " has too few fields");
        head.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    CellKey key;
    key.dataset = head[0];
    key.classifier = head[1];
    key.oversampler = head[2];
    key.metric = head[3];
    const auto* begin = head[4].data();
    const auto* end = begin + head[4].size();
    if (std::from_chars(begin, end, key.repeat).ptr != end)
        throw std::runtime_error("journal line " + std::to_string(line_no) + ": bad repeat");
    CellValue value;
    if (!parse_cell(head[5], value.score))
        throw std::runtime_error("journal line " + std::to_string(line_no) + ": bad score");
    value.best_params = line.substr(start);
    return {key, value};
}

inline std::string unit_id(const std::string& ds, const std::string& clf, const std::string& os,
                           int repeat) {
    return ds + "|" + clf + "|" + os + "|" + std::to_string(repeat);
}

}  // namespace detail

struct BenchmarkOptions {
    std::string config_path;
    std::optional<std::size_t> workers;
    bool resume = false;
};

// Runs the full benchmark grid described by a config file.
//
// Work units are (dataset, oversampler, classifier, repeat) cells; a journal
// row per metric is appended to <output_dir>/cells.csv as each unit finishes,
// so interrupted runs restart with --resume and skip completed units. On
// success the journal is rewritten in sorted order and the aggregate tables
// (cv_scores.csv, mean_ranking.csv, friedman.csv) plus manifest.json are
// written from full-precision scores, making every output byte independent of
// worker count and scheduling. Returns a process exit code.
inline int run_benchmark(const BenchmarkOptions& opt, std::ostream& log) {
    namespace fs = std::filesystem;
    RunConfig cfg;
    try {
        cfg = load_run_config(opt.config_path);
    } catch (const std::exception& e) {
        log << "error: " << e.what() << "\n";
        return 1;
    }
    if (opt.workers) cfg.workers = *opt.workers;

    std::vector<Dataset> datasets;
    try {
        for (const auto& ref : cfg.datasets) datasets.push_back(load_csv(ref.path, ref.label_column));
    } catch (const std::exception& e) {
        log << "error: " << e.what() << "\n";
        return 1;
    }
    {
        std::set<std::string> names;
        for (const auto& d : datasets)
            if (!names.insert(d.name).second) {
                log << "error: duplicate dataset name '" << d.name << "'\n";
                return 1;
            }
    }

    std::map<std::string, std::vector<OversamplerParams>> os_grids;
    for (const auto& m : cfg.oversamplers) os_grids[m] = expand_os_grid(m, cfg.grids.at(m));
    std::map<std::string, std::vector<ClassifierParams>> clf_grids;
    for (const auto& c : cfg.classifiers) clf_grids[c] = expand_clf_grid(c, cfg);

    fs::create_directories(cfg.output_dir);
    const std::string journal_path = cfg.output_dir + "/cells.csv";
    const std::string warnings_path = cfg.output_dir + "/warnings.log";
    const std::string journal_header = "dataset,classifier,oversampler,metric,repeat,score,best_params";

    std::map<detail::CellKey, detail::CellValue> results;
    std::set<std::string> completed_units;
    std::set<std::string> warnings;
    const bool resuming = opt.resume && fs::exists(journal_path);
    if (resuming) {
        const std::vector<std::string> lines = read_lines(journal_path);
        std::map<std::string, int> rows_per_unit;
        try {
            for (std::size_t i = 1; i < lines.size(); ++i) {
                if (lines[i].empty()) continue;
                auto [key, value] = detail::parse_journal_line(lines[i], i + 1);
                results[key] = value;
                ++rows_per_unit[detail::unit_id(key.dataset, key.classifier, key.oversampler,
                                                key.repeat)];
            }
        } catch (const std::exception& e) {
            log << "error: cannot resume: " << e.what() << "\n";
            return 1;
        }
        for (const auto& [unit, count] : rows_per_unit)
            if (count == 3) completed_units.insert(unit);
        if (fs::exists(warnings_path))
            for (const auto& w : read_lines(warnings_path))
                if (!w.empty()) warnings.insert(w);
    }

    struct Unit {
        std::size_t dataset_idx;
        std::string method;
        std::string classifier;
        int repeat;
    };
    std::vector<Unit> units;
    std::size_t total_units = 0;
    for (std::size_t di = 0; di < datasets.size(); ++di) {
        for (const auto& m : cfg.oversamplers) {
            for (const auto& c : cfg.classifiers) {
                for (std::size_t rep = 0; rep < cfg.repeats; ++rep) {
                    ++total_units;
                    if (!completed_units.contains(detail::unit_id(
                            datasets[di].name, c, m, static_cast<int>(rep))))
                        units.push_back({di, m, c, static_cast<int>(rep)});
                }
            }
        }
    }
    log << "benchmark: " << total_units << " cells total, " << units.size() << " to run, "
        << cfg.workers << " worker(s)\n";

    std::ofstream journal(journal_path,
                          resuming ? std::ios::app : std::ios::trunc);
    if (!journal) {
        log << "error: cannot write " << journal_path << "\n";
        return 1;
    }
    if (!resuming) journal << journal_header << "\n" << std::flush;
    std::ofstream warn_out(warnings_path, resuming ? std::ios::app : std::ios::trunc);

    std::mutex mu;
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::string first_error;
    std::size_t done = 0;

    auto worker = [&]() {
        while (!failed.load()) {
            const std::size_t i = next.fetch_add(1);
            if (i >= units.size()) break;
            const Unit& u = units[i];
            const Dataset& d = datasets[u.dataset_idx];
            CellRequest req;
            req.data = &d;
            req.method = u.method;
            req.os_grid = os_grids.at(u.method);
            req.classifier = u.classifier;
            req.clf_grid = clf_grids.at(u.classifier);
            req.n_folds = cfg.folds;
            req.repeat = u.repeat;
            req.root_seed = cfg.seed;
            CellRepeatResult res;
            try {
                res = run_cell_repeat(req);
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(mu);
                if (!failed.exchange(true))
                    first_error = "cell dataset=" + d.name + " classifier=" + u.classifier +
                                  " oversampler=" + u.method + " repeat=" +
                                  std::to_string(u.repeat) + " failed: " + e.what();
                break;
            }
            std::lock_guard<std::mutex> lock(mu);
            for (std::size_t mi = 0; mi < 3; ++mi) {
                detail::CellKey key{d.name, u.classifier, u.method, metric_ids()[mi], u.repeat};
                detail::CellValue value{res.scores[mi], res.best_params[mi]};
                journal << detail::journal_line(key, value) << "\n";
                results[key] = std::move(value);
            }
            journal.flush();
            for (const auto& w : res.warnings)
                if (warnings.insert(w).second) warn_out << w << "\n";
            warn_out.flush();
            ++done;
            log << "done " << done << "/" << units.size() << ": " << d.name << " "
                << u.classifier << " " << u.method << " repeat=" << u.repeat << "\n";
        }
    };

    if (!units.empty()) {
        const std::size_t n_threads = std::min(cfg.workers, units.size());
        std::vector<std::thread> pool;
        pool.reserve(n_threads);
        for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    journal.close();
    warn_out.close();

    if (failed.load()) {
        log << "error: " << first_error << "\n";
        log << "partial results preserved in " << journal_path << "\n";
        return 1;
    }

    // Completeness check: the journal must hold exactly the configured grid
    // (a --resume against a changed config is refused rather than mixed in).
    std::set<detail::CellKey> expected;
    for (const auto& d : datasets)
        for (const auto& m : cfg.oversamplers)
            for (const auto& c : cfg.classifiers)
                for (const auto& metric : metric_ids())
                    for (std::size_t rep = 0; rep < cfg.repeats; ++rep)
                        expected.insert({d.name, c, m, metric, static_cast<int>(rep)});
    for (const auto& key : expected)
        if (!results.contains(key)) {
            log << "error: journal is missing cell " << detail::journal_line(key, {}) << "\n";
            return 1;
        }
    for (const auto& [key, value] : results)
        if (!expected.contains(key)) {
            log << "error: journal row not in this configuration: "
                << detail::journal_line(key, value)
                << " (config changed? delete " << journal_path << " or drop --resume)\n";
            return 1;
        }

    {
        std::ofstream out(journal_path, std::ios::trunc);
        out << journal_header << "\n";
        for (const auto& [key, value] : results) out << detail::journal_line(key, value) << "\n";
    }
    {
        std::ofstream out(warnings_path, std::ios::trunc);
        for (const auto& w : warnings) out << w << "\n";
    }

    // Full-precision means over repeats feed every table.
    const double inv_repeats = 1.0 / static_cast<double>(cfg.repeats);
    std::map<std::tuple<std::string, std::string, std::string, std::string>, double> means;
    for (const auto& [key, value] : results) {
        auto k = std::make_tuple(key.dataset, key.classifier, key.oversampler, key.metric);
        means[k] += value.score * inv_repeats;
    }
    auto mean_of = [&](const Dataset& d, const std::string& clf, const std::string& os,
                       const std::string& metric) {
        return means.at(std::make_tuple(d.name, clf, os, metric));
    };

    {
        std::ofstream out(cfg.output_dir + "/cv_scores.csv", std::ios::trunc);
        out << "dataset,classifier,metric";
        for (const auto& m : cfg.oversamplers) out << "," << m;
        out << "\n";
        for (const auto& d : datasets) {
            for (const auto& c : cfg.classifiers) {
                for (const auto& metric : metric_ids()) {
                    out << d.name << "," << c << "," << metric;
                    for (const auto& m : cfg.oversamplers)
                        out << "," << format_fixed(mean_of(d, c, m, metric), 6);
                    out << "\n";
                }
            }
        }
    }

    {
        std::ofstream ranking(cfg.output_dir + "/mean_ranking.csv", std::ios::trunc);
        ranking << "classifier,metric";
        for (const auto& m : cfg.oversamplers) ranking << "," << m;
        ranking << "\n";
        std::ofstream fried(cfg.output_dir + "/friedman.csv", std::ios::trunc);
        fried << "classifier,metric,statistic,p_value,df,significant_at_0.05\n";
        for (const auto& c : cfg.classifiers) {
            for (const auto& metric : metric_ids()) {
                std::vector<std::vector<double>> rank_rows;
                std::vector<double> mean_rank(cfg.oversamplers.size(), 0.0);
                for (const auto& d : datasets) {
                    std::vector<double> scores;
                    scores.reserve(cfg.oversamplers.size());
                    for (const auto& m : cfg.oversamplers) scores.push_back(mean_of(d, c, m, metric));
                    rank_rows.push_back(rank_row(scores, true));
                    for (std::size_t mi = 0; mi < mean_rank.size(); ++mi)
                        mean_rank[mi] += rank_rows.back()[mi] / static_cast<double>(datasets.size());
                }
                ranking << c << "," << metric;
                for (double r : mean_rank) ranking << "," << format_fixed(r, 6);
                ranking << "\n";
                if (datasets.size() >= 2) {
                    const FriedmanResult fr = friedman(rank_rows);
                    fried << c << "," << metric << "," << format_double(fr.statistic) << ","
                          << format_double(fr.p_value) << "," << fr.df << ","
                          << (fr.p_value < 0.05 ? "yes" : "no") << "\n";
                }
            }
        }
    }

    {
        nlohmann::json manifest;
        manifest["version"] = kVersion;
        manifest["seed"] = cfg.seed;
        manifest["folds"] = cfg.folds;
        manifest["repeats"] = cfg.repeats;
        std::vector<std::string> names;
        for (const auto& d : datasets) names.push_back(d.name);
        manifest["datasets"] = names;
        manifest["oversamplers"] = cfg.oversamplers;
        manifest["classifiers"] = cfg.classifiers;
        nlohmann::json grid_sizes;
        for (const auto& m : cfg.oversamplers) grid_sizes[m] = os_grids.at(m).size();
        manifest["oversampler_grid_sizes"] = grid_sizes;
        nlohmann::json clf_sizes;
        for (const auto& c : cfg.classifiers) clf_sizes[c] = clf_grids.at(c).size();
        manifest["classifier_grid_sizes"] = clf_sizes;
        manifest["cells"] = results.size();
        manifest["fallback_warnings"] = std::vector<std::string>(warnings.begin(), warnings.end());
        if (datasets.size() < 2)
            manifest["notes"] =
                std::vector<std::string>{"friedman.csv is empty: the test needs at least 2 datasets"};
        std::ofstream out(cfg.output_dir + "/manifest.json", std::ios::trunc);
        out << manifest.dump(2) << "\n";
    }

    log << "results written to " << cfg.output_dir << "\n";
    return 0;
}

}  // namespace gsmote
