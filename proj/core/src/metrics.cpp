#include "sdlab/metrics.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace sdlab {

const char* to_string(Verdict v) {
    switch (v) {
    case Verdict::accepted_match:
        return "accepted_match";
    case Verdict::accepted_relaxed:
        return "accepted_relaxed";
    case Verdict::rejected:
        return "rejected";
    }
    return "unknown";
}

Verdict verdict_from_string(const std::string& s) {
    if (s == "accepted_match") {
        return Verdict::accepted_match;
    }
    if (s == "accepted_relaxed") {
        return Verdict::accepted_relaxed;
    }
    if (s == "rejected") {
        return Verdict::rejected;
    }
    throw std::invalid_argument("unknown verdict: " + s);
}

void DecodeTrace::add_iteration(IterationRecord rec) {
    target_passes += rec.target_pass_count;
    draft_steps += rec.draft_step_count;
    tokens_emitted += rec.emitted_count;
    iterations.push_back(std::move(rec));
}

AcceptanceStats acceptance_stats(const DecodeTrace& trace) {
    if (trace.iterations.empty()) {
        throw std::invalid_argument("acceptance_stats on empty trace");
    }
    long total_cand = 0;
    long total_match = 0;
    for (const auto& it : trace.iterations) {
        total_cand += it.candidate_count;
        total_match += it.accepted_count;
    }
    AcceptanceStats s;
    const auto n = static_cast<double>(trace.iterations.size());
    s.mean_candidates = static_cast<double>(total_cand) / n;
    s.mean_matches = static_cast<double>(total_match) / n;
    s.acceptance_rate =
        total_cand > 0 ? static_cast<double>(total_match) / static_cast<double>(total_cand) : 0.0;
    return s;
}

double simulated_cost(const DecodeTrace& trace, const CostModel& cost) {
    return static_cast<double>(trace.draft_steps) * cost.draft_step_cost +
           static_cast<double>(trace.target_passes) * cost.target_pass_cost;
}

double simulated_throughput(const DecodeTrace& trace, const CostModel& cost) {
    if (trace.tokens_emitted < 1) {
        throw std::invalid_argument("trace emitted no tokens");
    }
    return static_cast<double>(trace.tokens_emitted) / simulated_cost(trace, cost);
}

double simulated_speedup(const DecodeTrace& method, const DecodeTrace& baseline,
                         const CostModel& cost) {
    return simulated_throughput(method, cost) / simulated_throughput(baseline, cost);
}

std::optional<double> mean_verification_threshold(const DecodeTrace& trace) {
    double weighted = 0.0;
    long tokens = 0;
    for (const auto& it : trace.iterations) {
        weighted += it.threshold_verify_before * it.candidate_count;
        tokens += it.candidate_count;
    }
    if (tokens == 0) {
        return std::nullopt;
    }
    return weighted / static_cast<double>(tokens);
}

SeparationReport separation_report(const std::vector<DecodeTrace>& traces) {
    SeparationReport report;
    double acc_entropy = 0.0, acc_js = 0.0, rej_entropy = 0.0, rej_js = 0.0;
    long acc_n = 0, rej_n = 0;

    const auto bin_of = [](double d) {
        auto b = static_cast<int>(d / 0.05);
        if (b < 0) {
            b = 0;
        }
        if (b >= SeparationReport::kHistogramBins) {
            b = SeparationReport::kHistogramBins - 1; // d == 1.0 lands in the last bin
        }
        return b;
    };

    for (const auto& trace : traces) {
        for (const auto& it : trace.iterations) {
            const std::size_t scored = it.verdicts.size();
            for (std::size_t i = 0; i < scored; ++i) {
                if (i >= it.entropies.size() || i >= it.js_distances.size()) {
                    continue; // strategy did not record per-token measures
                }
                if (it.verdicts[i] == Verdict::rejected) {
                    rej_entropy += it.entropies[i];
                    rej_js += it.js_distances[i];
                    ++rej_n;
                    ++report.rejected_histogram[bin_of(it.js_distances[i])];
                } else {
                    acc_entropy += it.entropies[i];
                    acc_js += it.js_distances[i];
                    ++acc_n;
                    ++report.accepted_histogram[bin_of(it.js_distances[i])];
                }
            }
        }
    }
    if (acc_n > 0) {
        report.accepted = ClassSummary{acc_n, acc_entropy / acc_n, acc_js / acc_n};
    }
    if (rej_n > 0) {
        report.rejected = ClassSummary{rej_n, rej_entropy / rej_n, rej_js / rej_n};
    }
    if (acc_n == 0 && rej_n == 0) {
        throw std::invalid_argument("separation_report: no scored tokens in traces");
    }
    return report;
}

namespace {

nlohmann::json verdicts_to_json(const std::vector<Verdict>& verdicts) {
    auto arr = nlohmann::json::array();
    for (Verdict v : verdicts) {
        arr.push_back(to_string(v));
    }
    return arr;
}

} // namespace

std::string trace_to_json(const DecodeTrace& trace) {
    nlohmann::json j;
    j["schema_version"] = DecodeTrace::kSchemaVersion;
    j["method"] = trace.method;
    j["seed"] = trace.seed;
    j["totals"] = {{"target_passes", trace.target_passes},
                   {"draft_steps", trace.draft_steps},
                   {"tokens_emitted", trace.tokens_emitted}};
    auto& iters = j["iterations"] = nlohmann::json::array();
    for (const auto& it : trace.iterations) {
        iters.push_back({{"candidate_count", it.candidate_count},
                         {"accepted_count", it.accepted_count},
                         {"verdicts", verdicts_to_json(it.verdicts)},
                         {"entropies", it.entropies},
                         {"js_distances", it.js_distances},
                         {"threshold_gen_before", it.threshold_gen_before},
                         {"threshold_verify_before", it.threshold_verify_before},
                         {"threshold_gen_after", it.threshold_gen_after},
                         {"threshold_verify_after", it.threshold_verify_after},
                         {"emitted_count", it.emitted_count},
                         {"draft_step_count", it.draft_step_count},
                         {"target_pass_count", it.target_pass_count}});
    }
    return j.dump(2);
}

DecodeTrace trace_from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    if (j.at("schema_version").get<int>() != DecodeTrace::kSchemaVersion) {
        throw std::runtime_error("unsupported trace schema version");
    }
    DecodeTrace trace;
    trace.method = j.at("method").get<std::string>();
    trace.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& rec : j.at("iterations")) {
        IterationRecord it;
        it.candidate_count = rec.at("candidate_count").get<int>();
        it.accepted_count = rec.at("accepted_count").get<int>();
        for (const auto& v : rec.at("verdicts")) {
            it.verdicts.push_back(verdict_from_string(v.get<std::string>()));
        }
        it.entropies = rec.at("entropies").get<std::vector<double>>();
        it.js_distances = rec.at("js_distances").get<std::vector<double>>();
        it.threshold_gen_before = rec.at("threshold_gen_before").get<double>();
        it.threshold_verify_before = rec.at("threshold_verify_before").get<double>();
        it.threshold_gen_after = rec.at("threshold_gen_after").get<double>();
        it.threshold_verify_after = rec.at("threshold_verify_after").get<double>();
        it.emitted_count = rec.at("emitted_count").get<int>();
        it.draft_step_count = rec.at("draft_step_count").get<int>();
        it.target_pass_count = rec.at("target_pass_count").get<int>();
        trace.add_iteration(std::move(it));
    }
    const auto& totals = j.at("totals");
    if (trace.target_passes != totals.at("target_passes").get<long>() ||
        trace.draft_steps != totals.at("draft_steps").get<long>() ||
        trace.tokens_emitted != totals.at("tokens_emitted").get<long>()) {
        throw std::runtime_error("trace totals do not match per-iteration records");
    }
    return trace;
}

void save_trace(const DecodeTrace& trace, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot open trace file for writing: " + path.string());
    }
    out << trace_to_json(trace) << '\n';
}

DecodeTrace load_trace(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open trace file: " + path.string());
    }
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return trace_from_json(text);
}

} // namespace sdlab
