#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sdlab/experiment.hpp"
#include "sdlab/language_model.hpp"

namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot read file: " + path.string());
    }
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

int cmd_train(const fs::path& corpus_path, int order, double alpha, const fs::path& out) {
    const std::string corpus = read_file(corpus_path);
    const auto vocab = sdlab::Vocabulary::from_corpus(corpus);
    const auto model = sdlab::train_ngram(corpus, order, vocab, alpha);
    if (!out.parent_path().empty()) {
        fs::create_directories(out.parent_path());
    }
    sdlab::save_ngram(model, out);
    std::cout << "vocabulary size: " << vocab.size() << "\n"
              << "context table size: " << model.context_count() << "\n"
              << "model written to " << out.string() << "\n";
    return 0;
}

int cmd_run(const fs::path& config_path, std::optional<std::uint64_t> seed,
            std::optional<fs::path> out_dir) {
    auto cfg = sdlab::load_experiment_config(config_path);
    if (seed) {
        cfg.seed = *seed;
    }
    if (out_dir) {
        cfg.output_dir = *out_dir;
    }
    const auto result = sdlab::run_experiment(cfg);
    std::cout << sdlab::summary_csv_text(result.summaries);
    std::cout << "summary written to " << result.summary_csv.string() << " ("
              << result.trace_files.size() << " traces)\n";
    return 0;
}

int cmd_analyze(const std::vector<fs::path>& traces, const fs::path& out_dir) {
    const auto result = sdlab::analyze_traces(traces, out_dir);
    const auto print_class = [](const char* name, const std::optional<sdlab::ClassSummary>& c) {
        if (!c) {
            std::cout << name << ": missing (no tokens in this class)\n";
            return;
        }
        std::cout << name << ": count " << c->count << ", mean entropy " << c->mean_entropy
                  << ", mean JS distance " << c->mean_js_distance << "\n";
    };
    print_class("accepted", result.report.accepted);
    print_class("rejected", result.report.rejected);
    if (result.report.accepted && result.report.rejected) {
        std::cout << "rejected mean entropy above accepted: "
                  << (result.rejected_entropy_above_accepted ? "true" : "false") << "\n"
                  << "rejected mean JS distance above accepted: "
                  << (result.rejected_js_above_accepted ? "true" : "false") << "\n";
    }
    std::cout << "report written to " << (out_dir / "separation.json").string() << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"speculative decoding laboratory"};
    app.require_subcommand(1);

    // train
    fs::path corpus_path, model_out = "model.json";
    int order = 4;
    double alpha = 0.1;
    auto* train = app.add_subcommand("train", "train an n-gram model on a text corpus");
    train->add_option("corpus", corpus_path, "UTF-8 corpus file")->required();
    train->add_option("--order", order, "n-gram order")->check(CLI::PositiveNumber);
    train->add_option("--alpha", alpha, "additive smoothing constant")
        ->check(CLI::NonNegativeNumber);
    train->add_option("--out", model_out, "output model JSON path");

    // run
    fs::path config_path;
    std::optional<std::uint64_t> seed;
    std::optional<fs::path> out_dir;
    auto* run = app.add_subcommand("run", "run a method-comparison experiment");
    run->add_option("--config", config_path, "experiment config JSON")->required();
    run->add_option("--seed", seed, "override the config seed");
    run->add_option("--out", out_dir, "override the config output directory");

    // analyze
    std::vector<fs::path> trace_paths;
    fs::path analyze_out = "analysis";
    auto* analyze = app.add_subcommand("analyze", "accepted/rejected separation report");
    analyze->add_option("traces", trace_paths, "trace JSON files")->required();
    analyze->add_option("--out", analyze_out, "output directory");

    // compare
    fs::path csv_a, csv_b;
    auto* compare = app.add_subcommand("compare", "diff two summary CSVs");
    compare->add_option("a", csv_a, "first summary CSV")->required();
    compare->add_option("b", csv_b, "second summary CSV")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (train->parsed()) {
            return cmd_train(corpus_path, order, alpha, model_out);
        }
        if (run->parsed()) {
            return cmd_run(config_path, seed, out_dir);
        }
        if (analyze->parsed()) {
            return cmd_analyze(trace_paths, analyze_out);
        }
        if (compare->parsed()) {
            std::cout << sdlab::compare_summaries(csv_a, csv_b);
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
