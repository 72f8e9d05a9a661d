#include "certpri/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <iomanip>
#include <json.hpp>
#include <sstream>

#include "certpri/error.hpp"
#include "certpri/trainer.hpp"

namespace certpri {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

ordered_json finite_or_null(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); }

ordered_json optional_value(const std::optional<double>& v) {
    return v && std::isfinite(*v) ? ordered_json(*v) : ordered_json(nullptr);
}

}  // namespace

std::string result_to_json(const PrioritizationResult& result) {
    const CertPriConfig& c = result.config;
    ordered_json doc;
    doc["schema"] = kResultSchema;
    doc["task"] = to_string(result.task);
    doc["config"] = {
        {"p", c.p == Norm::linf ? ordered_json("inf") : ordered_json(c.p == Norm::l1 ? 1 : 2)},
        {"q", c.q() == Norm::linf ? ordered_json("inf") : ordered_json(c.q() == Norm::l1 ? 1 : 2)},
        {"radius", c.radius.to_string()},
        {"radius_resolved", result.radius},
        {"batches", c.batches},
        {"samples_per_batch", c.samples_per_batch},
        {"mode", to_string(c.mode)},
        {"fd_step", c.fd_step},
        {"endpoint", to_string(c.endpoint)},
    };
    doc["seed"] = c.seed;
    ordered_json inputs = ordered_json::array();
    for (const InputResult& in : result.inputs) {
        const MovementCost& mc = in.cost;
        ordered_json item;
        item["index"] = in.index;
        item["gamma_L"] = finite_or_null(mc.gamma_L);
        item["h"] = mc.h_value;
        item["lipschitz"] = mc.lipschitz;
        item["fallback"] = mc.fallback;
        if (mc.fit.ok() && mc.fit.fit) {
            const WeibullFit& f = *mc.fit.fit;
            item["fit"] = {{"xi", f.xi}, {"u", f.u}, {"sigma", f.sigma}, {"endpoint", f.endpoint},
                           {"loglik", f.log_likelihood}};
        } else {
            item["fit"] = nullptr;
        }
        item["block_maxima"] = mc.block_maxima;
        if (result.task == Task::classification)
            item["prediction"] = static_cast<long long>(in.prediction.at(0));
        else
            item["prediction"] = in.prediction;
        item["warnings"] = mc.warnings;
        inputs.push_back(std::move(item));
    }
    doc["inputs"] = std::move(inputs);
    doc["omega"] = result.omega;
    return doc.dump(1) + "\n";
}

StoredResult parse_result_json(std::string_view text) {
    const json doc = json::parse(text, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) throw InputError("result file is not a JSON object");
    try {
        if (doc.at("schema").get<std::string>() != kResultSchema)
            throw InputError("unsupported result schema '" + doc.at("schema").get<std::string>() + "'");
        StoredResult r;
        r.task = parse_task(doc.at("task").get<std::string>());
        r.mode = doc.at("config").at("mode").get<std::string>();
        const json& inputs = doc.at("inputs");
        r.gamma.resize(inputs.size());
        r.prediction.resize(inputs.size());
        for (const json& item : inputs) {
            const auto idx = item.at("index").get<std::size_t>();
            if (idx >= inputs.size()) throw InputError("result input index out of range");
            const json& g = item.at("gamma_L");
            r.gamma[idx] = g.is_null() ? INFINITY : g.get<double>();
            const json& pred = item.at("prediction");
            if (pred.is_array())
                r.prediction[idx] = pred.get<std::vector<double>>();
            else
                r.prediction[idx] = {pred.get<double>()};
        }
        r.omega = doc.at("omega").get<std::vector<std::size_t>>();
        if (r.omega.size() != inputs.size()) throw InputError("omega length does not match inputs");
        return r;
    } catch (const json::exception& e) {
        throw InputError(std::string("malformed result file: ") + e.what());
    }
}

std::string fit_to_json(const FitOutcome& outcome, std::span<const double> values) {
    ordered_json doc;
    doc["schema"] = kFitSchema;
    doc["n"] = values.size();
    doc["status"] = to_string(outcome.status);
    if (outcome.ok() && outcome.fit) {
        const WeibullFit& f = *outcome.fit;
        doc["xi"] = f.xi;
        doc["u"] = f.u;
        doc["sigma"] = f.sigma;
        doc["endpoint"] = f.endpoint;
        doc["loglik"] = f.log_likelihood;
    } else {
        doc["xi"] = nullptr;
        doc["u"] = nullptr;
        doc["sigma"] = nullptr;
        doc["endpoint"] = nullptr;
        doc["loglik"] = nullptr;
        doc["message"] = outcome.message;
    }
    // Estimate the pipeline would use: endpoint, or sample max on fallback.
    doc["lipschitz_estimate"] = values.empty() ? ordered_json(nullptr)
                                               : ordered_json(lipschitz_estimate(outcome, values).value);
    return doc.dump(1) + "\n";
}

std::vector<Cutoff> parse_cutoffs(std::string_view text) {
    std::vector<Cutoff> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t comma = text.find(',', start);
        if (comma == std::string_view::npos) comma = text.size();
        const std::string_view tok = text.substr(start, comma - start);
        if (tok == "all") {
            out.emplace_back(std::nullopt);
        } else {
            std::size_t v = 0;
            auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
            if (tok.empty() || ec != std::errc{} || ptr != tok.data() + tok.size() || v == 0)
                throw InputError("bad cutoff '" + std::string(tok) + "'");
            out.emplace_back(v);
        }
        start = comma + 1;
    }
    return out;
}

std::string cutoff_key(const Cutoff& c) { return c ? "rauc_" + std::to_string(*c) : "rauc_all"; }

Outcomes outcomes_for(const StoredResult& result, const Dataset& labeled) {
    const std::size_t n = result.prediction.size();
    if (labeled.rows != n)
        throw InputError("labeled dataset has " + std::to_string(labeled.rows) + " rows, result has " +
                         std::to_string(n));
    Outcomes out;
    if (result.task == Task::classification) {
        if (!labeled.has_labels()) throw InputError("classification evaluation needs a label column");
        out.is_bug.resize(n);
        for (std::size_t i = 0; i < n; ++i)
            out.is_bug[i] = static_cast<int>(result.prediction[i].at(0)) != labeled.labels[i];
    } else {
        if (!labeled.has_targets()) throw InputError("regression evaluation needs target columns");
        out.mse.resize(n);
        for (std::size_t i = 0; i < n; ++i) out.mse[i] = input_mse(result.prediction[i], labeled.target(i));
    }
    return out;
}

std::vector<std::pair<std::string, double>> rauc_table(Task task, std::span<const std::size_t> omega,
                                                       const Outcomes& outcomes, const std::vector<Cutoff>& cutoffs,
                                                       BugCount mode, std::vector<std::string>& warnings) {
    std::vector<std::pair<std::string, double>> table;
    for (const Cutoff& c : cutoffs) {
        std::size_t n = c.value_or(omega.size());
        if (n > omega.size()) {
            const std::string w = cutoff_key(c) + ": cutoff exceeds " + std::to_string(omega.size()) +
                                  " inputs, clamped";
            if (std::find(warnings.begin(), warnings.end(), w) == warnings.end()) warnings.push_back(w);
            n = omega.size();
        }
        const double v = task == Task::classification ? rauc_classification(omega, outcomes.is_bug, n, mode)
                                                      : rauc_regression(omega, outcomes.mse, n);
        table.emplace_back(cutoff_key(c), v);
    }
    return table;
}

void assign_genrew(MetricReport& report) {
    std::vector<double> all;
    for (const MethodReport& m : report.methods) {
        auto it = std::find_if(m.rauc.begin(), m.rauc.end(), [](const auto& kv) { return kv.first == "rauc_all"; });
        if (it == m.rauc.end()) throw InvariantError("rauc_all missing for method " + m.method);
        all.push_back(it->second);
    }
    const std::vector<int> ranks = descending_ranks(all);
    const int n_pm = static_cast<int>(report.methods.size());
    for (std::size_t i = 0; i < report.methods.size(); ++i)
        report.methods[i].genrew = genrew({{ranks[i]}}, n_pm);
}

std::string report_to_json(const MetricReport& report) {
    ordered_json doc;
    doc["schema"] = kReportSchema;
    doc["task"] = to_string(report.task);
    doc["n_inputs"] = report.n_inputs;
    doc["n_bugs"] = report.n_bugs ? ordered_json(*report.n_bugs) : ordered_json(nullptr);
    ordered_json methods = ordered_json::array();
    for (const MethodReport& m : report.methods) {
        ordered_json item;
        item["method"] = m.method;
        item["source"] = m.source;
        for (const auto& [key, value] : m.rauc) item[key] = value;
        item["robr"] = optional_value(m.robr);
        item["genrew"] = optional_value(m.genrew);
        item["t"] = optional_value(m.t);
        item["p"] = optional_value(m.p);
        methods.push_back(std::move(item));
    }
    doc["methods"] = std::move(methods);
    ordered_json corr = ordered_json::array();
    for (const auto& c : report.rank_correlations)
        corr.push_back({{"a", c.a}, {"b", c.b}, {"spearman", finite_or_null(c.spearman)}});
    doc["rank_correlations"] = std::move(corr);
    doc["warnings"] = report.warnings;
    return doc.dump(1) + "\n";
}

std::string report_to_table(const MetricReport& report) {
    std::vector<std::string> header{"method"};
    if (!report.methods.empty())
        for (const auto& kv : report.methods.front().rauc) header.push_back(kv.first);
    for (const char* k : {"robr", "genrew", "t", "p"}) header.emplace_back(k);

    auto fmt = [](const std::optional<double>& v) {
        if (!v || !std::isfinite(*v)) return std::string("n/a");
        std::ostringstream os;
        if (*v != 0.0 && (std::abs(*v) < 1e-3 || std::abs(*v) >= 1e5))
            os << std::scientific << std::setprecision(3) << *v;
        else
            os << std::fixed << std::setprecision(4) << *v;
        return os.str();
    };
    std::vector<std::vector<std::string>> rows;
    for (const MethodReport& m : report.methods) {
        std::vector<std::string> row{m.method};
        for (const auto& kv : m.rauc) row.push_back(fmt(kv.second));
        for (const auto* v : {&m.robr, &m.genrew, &m.t, &m.p}) row.push_back(fmt(*v));
        rows.push_back(std::move(row));
    }
    std::vector<std::size_t> width(header.size());
    for (std::size_t c = 0; c < header.size(); ++c) {
        width[c] = header[c].size();
        for (const auto& row : rows) width[c] = std::max(width[c], row[c].size());
    }
    std::ostringstream os;
    auto emit = [&](const std::vector<std::string>& row) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) os << "  ";
            if (c == 0)
                os << std::left << std::setw(static_cast<int>(width[c])) << row[c];
            else
                os << std::right << std::setw(static_cast<int>(width[c])) << row[c];
        }
        os << '\n';
    };
    emit(header);
    for (const auto& row : rows) emit(row);
    for (const auto& c : report.rank_correlations)
        os << "spearman(" << c.a << ", " << c.b << ") = " << fmt(c.spearman) << '\n';
    for (const std::string& w : report.warnings) os << "warning: " << w << '\n';
    return os.str();
}

}  // namespace certpri
