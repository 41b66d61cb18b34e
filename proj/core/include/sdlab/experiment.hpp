#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "sdlab/adaptive.hpp"
#include "sdlab/decoding.hpp"
#include "sdlab/metrics.hpp"

namespace sdlab {

struct ModelSpec {
    int order = 2;
    double smoothing_alpha = 0.1;
};

enum class MethodKind { autoregressive_target, autoregressive_draft, fixed_window, adaptive };

struct MethodSpec {
    std::string name;
    MethodKind kind = MethodKind::fixed_window;
    Strategy strategy = Strategy::spec_sampling_sd; // fixed_window only
    Variant variant = Variant::midpoint;            // adaptive only
    int window = 5;                                 // 20 for adaptive methods
    int max_tokens = 200;
};

// One harness run: corpus, draft/target n-gram pair, methods, prompts, seed,
// cost model. Every default is explicit in the emitted resolved config.
struct ExperimentConfig {
    std::filesystem::path corpus_path;
    ModelSpec draft{2, 0.1};
    ModelSpec target{4, 0.1};
    std::vector<MethodSpec> methods;
    std::string baseline = "vanilla";
    std::vector<std::string> prompts; // resolved from the corpus when empty
    int prompt_count = 10;
    int prompt_length = 32;
    std::uint64_t seed = 48763;
    CostModel cost_model;
    std::filesystem::path output_dir;
};

ExperimentConfig load_experiment_config(const std::filesystem::path& path);
std::string experiment_config_to_json(const ExperimentConfig& cfg);

struct MethodSummary {
    std::string name;
    double tks_sim = 0.0;
    std::optional<double> js_dist; // mean verification threshold; empty when unused
    std::optional<double> mean_candidates;
    std::optional<double> mean_matches;
    std::optional<double> acceptance_rate;
    double speedup = 0.0;
    long tokens_emitted = 0;
    long target_passes = 0;
    long draft_steps = 0;
};

struct RunOutput {
    std::vector<MethodSummary> summaries; // sorted by method name
    std::vector<std::filesystem::path> trace_files;
    std::filesystem::path summary_csv;
};

// Runs every method over every prompt, persists per-run traces and the
// resolved config, and writes summary.csv with header
// method,tks_sim,JSDist,cand,match,AccRate,speedup.
RunOutput run_experiment(const ExperimentConfig& cfg);

std::string summary_csv_text(const std::vector<MethodSummary>& summaries);

struct AnalyzeOutput {
    SeparationReport report;
    // Direction flags; meaningful only when both classes are present.
    bool rejected_entropy_above_accepted = false;
    bool rejected_js_above_accepted = false;
};

// Pools tokens from the given trace files, writes separation.json and
// js_histogram.csv under out_dir.
AnalyzeOutput analyze_traces(const std::vector<std::filesystem::path>& trace_files,
                             const std::filesystem::path& out_dir);

// Row-by-row diff of two summary CSVs; returns a human-readable table.
std::string compare_summaries(const std::filesystem::path& a, const std::filesystem::path& b);

// Evenly spaced fixed-length character prefixes of the corpus, used as the
// default prompt set.
std::vector<std::string> corpus_prompts(const std::string& corpus_text, int count, int length);

} // namespace sdlab
