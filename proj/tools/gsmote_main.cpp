#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "gsmote/gsmote.hpp"

namespace {

int cmd_run(const std::string& config_path, std::size_t workers, bool workers_set, bool resume) {
    gsmote::BenchmarkOptions opt;
    opt.config_path = config_path;
    if (workers_set) opt.workers = workers;
    opt.resume = resume;
    return gsmote::run_benchmark(opt, std::cout);
}

int cmd_fixture(const gsmote::FixtureSpec& spec, const std::string& out_path) {
    const gsmote::Dataset d = gsmote::make_fixture(spec);
    gsmote::save_csv(d, out_path);
    std::cout << "wrote " << d.size() << " rows (" << d.minority_indices.size() << " minority, "
              << d.majority_indices.size() << " majority) to " << out_path << "\n";
    return 0;
}

// Oversamples a whole file for inspection: scaling is fitted on every row,
// generation happens in scaled space, and synthetic rows are mapped back to
// the original units before writing. An extra `synthetic` column flags them.
int cmd_oversample(const std::string& data_path, const std::string& label_column,
                   const gsmote::OversamplerParams& params, std::uint64_t seed,
                   const std::string& out_path) {
    using namespace gsmote;
    const Dataset d = label_column.empty()
                          ? load_csv(data_path)
                          : load_csv(data_path, label_column);
    const ScalingParams scaling = fit_minmax(d.features);
    const Matrix scaled = apply_minmax(scaling, d.features);

    Matrix s_min(0, d.dim()), s_maj(0, d.dim());
    for (int i : d.minority_indices) s_min.append_row(scaled.row(i));
    for (int i : d.majority_indices) s_maj.append_row(scaled.row(i));

    Rng rng(seed);
    const std::size_t n_syn = params.method == "none" ? 0 : synthetic_count(d);
    const SyntheticBatch batch = generate(params, s_min, s_maj, n_syn, d.minority_label, rng);
    const Matrix raw_synthetic = invert_minmax(scaling, batch.samples);

    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + out_path);
    for (const auto& name : d.feature_names) out << name << ',';
    out << d.label_name << ",synthetic\n";
    for (std::size_t r = 0; r < d.size(); ++r) {
        for (std::size_t c = 0; c < d.dim(); ++c) out << format_double(d.features.at(r, c)) << ',';
        out << d.labels[r] << ",0\n";
    }
    for (std::size_t r = 0; r < raw_synthetic.rows(); ++r) {
        for (std::size_t c = 0; c < raw_synthetic.cols(); ++c)
            out << format_double(raw_synthetic.at(r, c)) << ',';
        out << batch.label << ",1\n";
    }
    for (const auto& w : batch.warnings) std::cerr << "warning: " << w << "\n";
    std::cout << "wrote " << d.size() << " original + " << raw_synthetic.rows()
              << " synthetic rows to " << out_path << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Geometric minority oversampling: benchmark runner and data tools"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "Run the benchmark grid from a config file");
    std::string config_path;
    std::size_t workers = 1;
    bool resume = false;
    run->add_option("--config", config_path, "Path to the JSON run configuration")->required();
    auto* workers_opt = run->add_option("--workers", workers, "Parallel worker count override");
    run->add_flag("--resume", resume, "Skip cells already present in the journal");

    auto* fixture = app.add_subcommand("fixture", "Generate a synthetic benchmark dataset");
    gsmote::FixtureSpec spec;
    std::string fixture_out;
    fixture->add_option("--kind", spec.kind, "two_gaussians, noisy_moons, or sparse_clusters")
        ->required();
    fixture->add_option("--ir", spec.ir, "Imbalance ratio, majority/minority")->required();
    fixture->add_option("--n", spec.n, "Total row count")->required();
    fixture->add_option("--seed", spec.seed, "Random seed")->required();
    fixture->add_option("--noise", spec.noise, "Fraction of minority-count label pairs to swap");
    fixture->add_option("--out", fixture_out, "Output CSV path")->required();

    auto* over = app.add_subcommand("oversample", "Balance one CSV file and write the result");
    std::string data_path, over_out, label_column;
    std::uint64_t seed = 0;
    gsmote::OversamplerParams params;
    std::string a_sel = "combined";
    over->add_option("--data", data_path, "Input CSV path")->required();
    over->add_option("--method", params.method, "Oversampler id")->required();
    over->add_option("--k", params.k, "Neighbor count");
    over->add_option("--a-trunc", params.a_trunc, "Truncation factor in [-1, 1]");
    over->add_option("--a-def", params.a_def, "Deformation factor in [0, 1]");
    over->add_option("--a-sel", a_sel, "Selection strategy: minority, majority, combined");
    over->add_option("--seed", seed, "Random seed");
    over->add_option("--label-column", label_column, "Label column name (default: last column)");
    over->add_option("--out", over_out, "Output CSV path")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(config_path, workers, workers_opt->count() > 0, resume);
        if (fixture->parsed()) return cmd_fixture(spec, fixture_out);
        params.a_sel = gsmote::strategy_from_string(a_sel);
        return cmd_oversample(data_path, label_column, params, seed, over_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
