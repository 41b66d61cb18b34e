#include "sdlab/experiment.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace sdlab {

namespace {

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot read file: " + path.string());
    }
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write file: " + path.string());
    }
    out << text;
}

const char* to_string(MethodKind k) {
    switch (k) {
    case MethodKind::autoregressive_target:
        return "autoregressive_target";
    case MethodKind::autoregressive_draft:
        return "autoregressive_draft";
    case MethodKind::fixed_window:
        return "fixed_window";
    case MethodKind::adaptive:
        return "adaptive";
    }
    return "unknown";
}

MethodKind method_kind_from_string(const std::string& s) {
    if (s == "autoregressive_target") {
        return MethodKind::autoregressive_target;
    }
    if (s == "autoregressive_draft") {
        return MethodKind::autoregressive_draft;
    }
    if (s == "fixed_window") {
        return MethodKind::fixed_window;
    }
    if (s == "adaptive") {
        return MethodKind::adaptive;
    }
    throw std::invalid_argument("unknown method kind: " + s);
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

std::string fmt_opt(const std::optional<double>& v) { return v ? fmt(*v) : std::string("-"); }

} // namespace

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
    const auto j = nlohmann::json::parse(read_file(path));
    ExperimentConfig cfg;
    cfg.corpus_path = j.at("corpus_path").get<std::string>();
    const auto model_spec = [](const nlohmann::json& m) {
        ModelSpec s;
        s.order = m.value("order", s.order);
        s.smoothing_alpha = m.value("smoothing_alpha", s.smoothing_alpha);
        return s;
    };
    if (j.contains("draft")) {
        cfg.draft = model_spec(j.at("draft"));
    }
    if (j.contains("target")) {
        cfg.target = model_spec(j.at("target"));
    }
    for (const auto& m : j.at("methods")) {
        MethodSpec spec;
        spec.name = m.at("name").get<std::string>();
        spec.kind = method_kind_from_string(m.value("kind", std::string("fixed_window")));
        if (m.contains("strategy")) {
            spec.strategy = strategy_from_string(m.at("strategy").get<std::string>());
        }
        if (m.contains("variant")) {
            spec.variant = variant_from_string(m.at("variant").get<std::string>());
        }
        const bool adaptive_window =
            spec.kind == MethodKind::adaptive && spec.variant != Variant::verify_only;
        spec.window = m.value("window", adaptive_window ? 20 : 5);
        spec.max_tokens = m.value("max_tokens", spec.max_tokens);
        cfg.methods.push_back(std::move(spec));
    }
    cfg.baseline = j.value("baseline", cfg.baseline);
    if (j.contains("prompts")) {
        cfg.prompts = j.at("prompts").get<std::vector<std::string>>();
    }
    cfg.prompt_count = j.value("prompt_count", cfg.prompt_count);
    cfg.prompt_length = j.value("prompt_length", cfg.prompt_length);
    cfg.seed = j.value("seed", cfg.seed);
    if (j.contains("cost_model")) {
        cfg.cost_model.draft_step_cost =
            j.at("cost_model").value("draft_step_cost", cfg.cost_model.draft_step_cost);
        cfg.cost_model.target_pass_cost =
            j.at("cost_model").value("target_pass_cost", cfg.cost_model.target_pass_cost);
    }
    cfg.output_dir = j.value("output_dir", std::string("out"));
    if (cfg.methods.empty()) {
        throw std::invalid_argument("config lists no methods");
    }
    return cfg;
}

std::string experiment_config_to_json(const ExperimentConfig& cfg) {
    nlohmann::json j;
    j["corpus_path"] = cfg.corpus_path.string();
    j["draft"] = {{"order", cfg.draft.order}, {"smoothing_alpha", cfg.draft.smoothing_alpha}};
    j["target"] = {{"order", cfg.target.order}, {"smoothing_alpha", cfg.target.smoothing_alpha}};
    auto& methods = j["methods"] = nlohmann::json::array();
    for (const auto& m : cfg.methods) {
        nlohmann::json e = {{"name", m.name},
                            {"kind", to_string(m.kind)},
                            {"window", m.window},
                            {"max_tokens", m.max_tokens}};
        if (m.kind == MethodKind::fixed_window) {
            e["strategy"] = to_string(m.strategy);
        }
        if (m.kind == MethodKind::adaptive) {
            e["variant"] = to_string(m.variant);
        }
        methods.push_back(std::move(e));
    }
    j["baseline"] = cfg.baseline;
    j["prompts"] = cfg.prompts;
    j["prompt_count"] = cfg.prompt_count;
    j["prompt_length"] = cfg.prompt_length;
    j["seed"] = cfg.seed;
    j["cost_model"] = {{"draft_step_cost", cfg.cost_model.draft_step_cost},
                       {"target_pass_cost", cfg.cost_model.target_pass_cost}};
    j["output_dir"] = cfg.output_dir.string();
    return j.dump(2);
}

std::vector<std::string> corpus_prompts(const std::string& corpus_text, int count, int length) {
    const auto scalars = utf8_scalars(corpus_text);
    if (scalars.size() < static_cast<std::size_t>(length)) {
        throw std::invalid_argument("corpus shorter than the prompt length");
    }
    const std::size_t span = scalars.size() - static_cast<std::size_t>(length);
    std::vector<std::string> prompts;
    for (int i = 0; i < count; ++i) {
        const std::size_t offset =
            count > 1 ? span * static_cast<std::size_t>(i) / static_cast<std::size_t>(count - 1)
                      : 0;
        std::string prompt;
        for (int k = 0; k < length; ++k) {
            prompt += scalars[offset + static_cast<std::size_t>(k)];
        }
        prompts.push_back(std::move(prompt));
    }
    return prompts;
}

std::string summary_csv_text(const std::vector<MethodSummary>& summaries) {
    std::ostringstream out;
    out << "method,tks_sim,JSDist,cand,match,AccRate,speedup\n";
    for (const auto& s : summaries) {
        out << s.name << ',' << fmt(s.tks_sim) << ',' << fmt_opt(s.js_dist) << ','
            << fmt_opt(s.mean_candidates) << ',' << fmt_opt(s.mean_matches) << ','
            << fmt_opt(s.acceptance_rate) << ',' << fmt(s.speedup) << '\n';
    }
    return out.str();
}

RunOutput run_experiment(const ExperimentConfig& cfg) {
    const std::string corpus = read_file(cfg.corpus_path);
    const Vocabulary vocab = Vocabulary::from_corpus(corpus);
    const NGramModel draft = train_ngram(corpus, cfg.draft.order, vocab, cfg.draft.smoothing_alpha);
    const NGramModel target =
        train_ngram(corpus, cfg.target.order, vocab, cfg.target.smoothing_alpha);
    if (!(draft.vocab() == target.vocab())) {
        throw std::invalid_argument(
            "draft and target vocabularies differ; both models must share identical token sets");
    }

    ExperimentConfig resolved = cfg;
    if (resolved.prompts.empty()) {
        resolved.prompts = corpus_prompts(corpus, cfg.prompt_count, cfg.prompt_length);
    }

    std::filesystem::create_directories(cfg.output_dir / "traces");
    write_file(cfg.output_dir / "resolved_config.json", experiment_config_to_json(resolved) + "\n");

    RunOutput output;
    std::map<std::string, std::vector<DecodeTrace>> traces_by_method;
    for (std::size_t mi = 0; mi < resolved.methods.size(); ++mi) {
        const MethodSpec& method = resolved.methods[mi];
        for (std::size_t pi = 0; pi < resolved.prompts.size(); ++pi) {
            const auto prompt_ids = vocab.encode(resolved.prompts[pi]);
            Pcg32 rng(resolved.seed, mi * 100000 + pi);

            DecodeResult decoded;
            switch (method.kind) {
            case MethodKind::autoregressive_target:
            case MethodKind::autoregressive_draft: {
                DecodeConfig dc;
                dc.max_tokens = method.max_tokens;
                dc.strategy = method.kind == MethodKind::autoregressive_target
                                  ? Strategy::autoregressive_target
                                  : Strategy::autoregressive_draft;
                dc.seed = resolved.seed;
                const LanguageModel& model =
                    method.kind == MethodKind::autoregressive_target
                        ? static_cast<const LanguageModel&>(target)
                        : static_cast<const LanguageModel&>(draft);
                decoded = autoregressive_decode(model, prompt_ids, dc, rng);
                break;
            }
            case MethodKind::fixed_window: {
                DecodeConfig dc;
                dc.max_tokens = method.max_tokens;
                dc.window = method.window;
                dc.strategy = method.strategy;
                dc.seed = resolved.seed;
                decoded = fixed_window_sd(draft, target, prompt_ids, dc, rng);
                break;
            }
            case MethodKind::adaptive: {
                AdaptiveConfig ac;
                ac.variant = method.variant;
                if (method.variant == Variant::verify_only) {
                    ac.fixed_window_for_verify_only = method.window;
                } else {
                    ac.window = method.window;
                }
                ac.max_tokens = method.max_tokens;
                ac.seed = resolved.seed;
                decoded = adaptive_decode(draft, target, prompt_ids, ac, rng);
                break;
            }
            }

            decoded.trace.method = method.name;
            const auto trace_path = cfg.output_dir / "traces" /
                                    (method.name + "__prompt" + std::to_string(pi) + ".trace.json");
            save_trace(decoded.trace, trace_path);
            output.trace_files.push_back(trace_path);
            traces_by_method[method.name].push_back(std::move(decoded.trace));
        }
    }

    // Pooled per-method summaries.
    std::vector<MethodSummary> summaries;
    for (const auto& method : resolved.methods) {
        const auto& traces = traces_by_method.at(method.name);
        MethodSummary s;
        s.name = method.name;
        long iterations = 0, candidates = 0, matches = 0;
        double weighted_tv = 0.0;
        double cost = 0.0;
        for (const auto& trace : traces) {
            s.tokens_emitted += trace.tokens_emitted;
            s.target_passes += trace.target_passes;
            s.draft_steps += trace.draft_steps;
            cost += simulated_cost(trace, resolved.cost_model);
            iterations += static_cast<long>(trace.iterations.size());
            for (const auto& it : trace.iterations) {
                candidates += it.candidate_count;
                matches += it.accepted_count;
                weighted_tv += it.threshold_verify_before * it.candidate_count;
            }
        }
        s.tks_sim = cost > 0.0 ? static_cast<double>(s.tokens_emitted) / cost : 0.0;
        if (candidates > 0) {
            s.mean_candidates = static_cast<double>(candidates) / static_cast<double>(iterations);
            s.mean_matches = static_cast<double>(matches) / static_cast<double>(iterations);
            s.acceptance_rate = static_cast<double>(matches) / static_cast<double>(candidates);
        }
        const bool uses_tv = method.kind == MethodKind::adaptive && method.variant != Variant::gen_only;
        if (uses_tv && candidates > 0) {
            s.js_dist = weighted_tv / static_cast<double>(candidates);
        }
        summaries.push_back(std::move(s));
    }

    const auto baseline_it =
        std::find_if(summaries.begin(), summaries.end(),
                     [&](const MethodSummary& s) { return s.name == resolved.baseline; });
    if (baseline_it == summaries.end()) {
        throw std::invalid_argument("baseline method not found: " + resolved.baseline);
    }
    const double baseline_tks = baseline_it->tks_sim;
    for (auto& s : summaries) {
        s.speedup = baseline_tks > 0.0 ? s.tks_sim / baseline_tks : 0.0;
    }
    std::sort(summaries.begin(), summaries.end(),
              [](const MethodSummary& a, const MethodSummary& b) { return a.name < b.name; });

    output.summary_csv = cfg.output_dir / "summary.csv";
    write_file(output.summary_csv, summary_csv_text(summaries));

    // Direction-of-effect check: adaptive decoding is expected to emit more
    // tokens per target pass than the baseline. Corpus-dependent, so it is
    // reported rather than enforced.
    const auto adaptive_it = std::find_if(
        resolved.methods.begin(), resolved.methods.end(), [](const MethodSpec& m) {
            return m.kind == MethodKind::adaptive && m.variant == Variant::midpoint;
        });
    if (adaptive_it != resolved.methods.end() && adaptive_it->name != resolved.baseline) {
        const auto tpp = [&](const std::string& name) {
            const auto it = std::find_if(summaries.begin(), summaries.end(),
                                         [&](const MethodSummary& s) { return s.name == name; });
            return static_cast<double>(it->tokens_emitted) /
                   static_cast<double>(it->target_passes);
        };
        nlohmann::json j;
        j["adaptive_method"] = adaptive_it->name;
        j["baseline_method"] = resolved.baseline;
        j["adaptive_tokens_per_target_pass"] = tpp(adaptive_it->name);
        j["baseline_tokens_per_target_pass"] = tpp(resolved.baseline);
        j["direction_holds"] =
            tpp(adaptive_it->name) >= tpp(resolved.baseline);
        write_file(cfg.output_dir / "direction_check.json", j.dump(2) + "\n");
    }

    output.summaries = std::move(summaries);
    return output;
}

AnalyzeOutput analyze_traces(const std::vector<std::filesystem::path>& trace_files,
                             const std::filesystem::path& out_dir) {
    if (trace_files.empty()) {
        throw std::invalid_argument("no trace files given");
    }
    std::vector<DecodeTrace> traces;
    traces.reserve(trace_files.size());
    for (const auto& path : trace_files) {
        traces.push_back(load_trace(path));
    }
    AnalyzeOutput out;
    out.report = separation_report(traces);
    if (out.report.accepted && out.report.rejected) {
        out.rejected_entropy_above_accepted =
            out.report.rejected->mean_entropy > out.report.accepted->mean_entropy;
        out.rejected_js_above_accepted =
            out.report.rejected->mean_js_distance > out.report.accepted->mean_js_distance;
    }

    std::filesystem::create_directories(out_dir);
    nlohmann::json j;
    const auto cls = [](const std::optional<ClassSummary>& c) -> nlohmann::json {
        if (!c) {
            return {{"missing", true}};
        }
        return {{"missing", false},
                {"count", c->count},
                {"mean_entropy", c->mean_entropy},
                {"mean_js_distance", c->mean_js_distance}};
    };
    j["accepted"] = cls(out.report.accepted);
    j["rejected"] = cls(out.report.rejected);
    j["rejected_entropy_above_accepted"] = out.rejected_entropy_above_accepted;
    j["rejected_js_above_accepted"] = out.rejected_js_above_accepted;
    write_file(out_dir / "separation.json", j.dump(2) + "\n");

    std::ostringstream csv;
    csv << "bin_lo,bin_hi,accepted_count,rejected_count\n";
    for (int b = 0; b < SeparationReport::kHistogramBins; ++b) {
        csv << fmt(b * 0.05) << ',' << fmt((b + 1) * 0.05) << ','
            << out.report.accepted_histogram[static_cast<std::size_t>(b)] << ','
            << out.report.rejected_histogram[static_cast<std::size_t>(b)] << '\n';
    }
    write_file(out_dir / "js_histogram.csv", csv.str());
    return out;
}

std::string compare_summaries(const std::filesystem::path& a, const std::filesystem::path& b) {
    const auto parse = [](const std::filesystem::path& path) {
        std::map<std::string, std::vector<std::string>> rows;
        std::istringstream in(read_file(path));
        std::string line;
        std::getline(in, line); // header
        while (std::getline(in, line)) {
            if (line.empty()) {
                continue;
            }
            std::vector<std::string> cells;
            std::istringstream ls(line);
            std::string cell;
            while (std::getline(ls, cell, ',')) {
                cells.push_back(cell);
            }
            rows.emplace(cells.at(0), std::vector<std::string>(cells.begin() + 1, cells.end()));
        }
        return rows;
    };
    static const char* kColumns[] = {"tks_sim", "JSDist", "cand", "match", "AccRate", "speedup"};
    const auto rows_a = parse(a);
    const auto rows_b = parse(b);
    std::ostringstream out;
    for (const auto& [name, cells_a] : rows_a) {
        const auto it = rows_b.find(name);
        if (it == rows_b.end()) {
            out << name << ": only in " << a.filename().string() << '\n';
            continue;
        }
        for (std::size_t c = 0; c < cells_a.size() && c < it->second.size(); ++c) {
            if (cells_a[c] != it->second[c]) {
                out << name << '.' << kColumns[c] << ": " << cells_a[c] << " -> " << it->second[c]
                    << '\n';
            }
        }
    }
    for (const auto& [name, cells_b] : rows_b) {
        if (!rows_a.contains(name)) {
            out << name << ": only in " << b.filename().string() << '\n';
        }
    }
    if (out.str().empty()) {
        return "summaries identical\n";
    }
    return out.str();
}

} // namespace sdlab
