#include <CLI11.hpp>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <json.hpp>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "certpri/dataset.hpp"
#include "certpri/error.hpp"
#include "certpri/gevt.hpp"
#include "certpri/io.hpp"
#include "certpri/metrics.hpp"
#include "certpri/model.hpp"
#include "certpri/prioritizer.hpp"
#include "certpri/report.hpp"
#include "certpri/rng.hpp"
#include "certpri/synthetic.hpp"
#include "certpri/trainer.hpp"

namespace fs = std::filesystem;
using namespace certpri;
using ordered_json = nlohmann::ordered_json;

namespace {

void emit(const std::string& out, const std::string& text) {
    if (out.empty() || out == "-")
        std::cout << text;
    else
        write_file_atomic(out, text);
}

std::vector<std::size_t> parse_widths(const std::string& text) {
    std::vector<std::size_t> out;
    if (text.empty() || text == "none") return out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            std::size_t pos = 0;
            const long v = std::stol(tok, &pos);
            if (pos != tok.size() || v < 1) throw std::invalid_argument(tok);
            out.push_back(static_cast<std::size_t>(v));
        } catch (const std::exception&) {
            throw InputError("bad hidden layer width '" + tok + "'");
        }
    }
    return out;
}

// ---- gen-synthetic

struct GenArgs {
    std::string generator = "gaussian_blobs";
    SyntheticSpec spec;
    std::string out_dir = ".";
};

void run_gen(const GenArgs& a) {
    SyntheticSpec spec = a.spec;
    spec.generator = parse_generator(a.generator);
    const SyntheticData data = gen_synthetic(spec);
    const fs::path dir(a.out_dir);
    fs::create_directories(dir);
    save_dataset(data.train, dir / "train.csv");
    save_dataset(data.test, dir / "test.csv");

    ordered_json truth;
    truth["generator"] = to_string(spec.generator);
    truth["seed"] = spec.seed;
    truth["input_dim"] = spec.input_dim;
    if (spec.generator == Generator::linear_regression_noise) {
        truth["output_dim"] = spec.output_dim;
        truth["weights"] = data.weights;
        truth["target_noise"] = spec.target_noise;
    } else {
        truth["classes"] = spec.generator == Generator::two_moons ? 2 : spec.classes;
        if (spec.generator == Generator::gaussian_blobs) {
            truth["centers"] = data.centers;
            truth["spread"] = spec.spread;
            truth["separation"] = spec.separation;
            truth["off_manifold"] = spec.off_manifold;
        } else {
            truth["moon_noise"] = spec.moon_noise;
        }
    }
    truth["train_count"] = spec.train_count;
    truth["test_count"] = spec.test_count;
    truth["label_noise"] = spec.label_noise;
    truth["corrupted_train"] = data.corrupted_train;
    write_file_atomic(dir / "truth.json", truth.dump(1) + "\n");
}

// ---- train-toy

struct TrainArgs {
    std::string data, test, hidden = "16", activation = "tanh", out;
    TrainOptions opts;
    std::optional<std::size_t> num_classes;
};

void run_train(const TrainArgs& a) {
    DatasetReadOptions ro;
    ro.num_classes = a.num_classes;
    const Dataset train = load_dataset(a.data, ro);
    std::optional<Dataset> test;
    if (!a.test.empty()) test = load_dataset(a.test, ro);
    Architecture arch;
    arch.hidden = parse_widths(a.hidden);
    arch.activation = parse_activation(a.activation);
    TrainOptions opts = a.opts;
    opts.num_classes = a.num_classes;
    TrainReport rep;
    const Model model = train_toy(train, arch, opts, &rep, test ? &*test : nullptr);
    save_model(model, a.out);

    const bool cls = model.signature().task == Task::classification;
    ordered_json summary;
    summary["task"] = to_string(model.signature().task);
    summary["final_loss"] = rep.final_loss;
    summary[cls ? "train_accuracy" : "train_mse"] = rep.train_metric;
    if (rep.test_metric) summary[cls ? "test_accuracy" : "test_mse"] = *rep.test_metric;
    std::cout << summary.dump() << '\n';
}

// ---- prioritize

struct PriArgs {
    std::string model, data, out, norm = "2", radius = "0.04x", mode = "white-box", endpoint = "location-scale";
    std::size_t batches = 6, samples = 10;
    double fd_step = 1e-4;
    std::uint64_t seed = 0;
    bool serial = false;
};

void run_prioritize(const PriArgs& a) {
    const Model model = load_model(a.model);
    DatasetReadOptions ro;
    ro.read_ground_truth = false;
    const Dataset data = load_dataset(a.data, ro);
    if (data.dim != model.signature().input_dim)
        throw InputError("dataset has " + std::to_string(data.dim) + " features, model expects " +
                         std::to_string(model.signature().input_dim));
    CertPriConfig cfg;
    cfg.p = parse_norm(a.norm);
    cfg.radius = Radius::parse(a.radius);
    cfg.batches = a.batches;
    cfg.samples_per_batch = a.samples;
    cfg.mode = parse_mode(a.mode);
    cfg.fd_step = a.fd_step;
    cfg.seed = a.seed;
    cfg.endpoint = parse_endpoint_variant(a.endpoint);
    cfg.validate();
    const InputScale scale = InputScale::of(data);
    const FeatureMatrix inputs = FeatureMatrix::of(data);
    const PrioritizationResult res =
        a.serial ? prioritize_serial(model, inputs, cfg, scale) : prioritize(model, inputs, cfg, scale);
    emit(a.out, result_to_json(res));
}

// ---- evaluate

struct EvalArgs {
    std::vector<std::string> results, attacked_results, attacked_data, baselines;
    std::string data, model, cutoffs = "100,200,300,500,all", format = "json", out, bug_count = "global";
    std::size_t shuffles = 20;
    std::uint64_t seed = 0;
};

std::optional<TTestResult> gamma_t_test(const StoredResult& r, const Outcomes& o, std::vector<std::string>& warnings,
                                        const std::string& name) {
    std::vector<double> bug, ok;
    for (std::size_t i = 0; i < r.gamma.size(); ++i) {
        if (!std::isfinite(r.gamma[i])) continue;
        (o.is_bug[i] ? bug : ok).push_back(r.gamma[i]);
    }
    try {
        if (bug.size() < 2 || ok.size() < 2) throw InputError("fewer than 2 values in a group");
        return welch_t_test(bug, ok);
    } catch (const InputError& e) {
        warnings.push_back(name + ": t-test skipped (" + e.what() + ")");
        return std::nullopt;
    }
}

void run_evaluate(const EvalArgs& a) {
    if (a.results.empty() && a.baselines.empty()) throw InputError("nothing to evaluate");
    if (!a.attacked_results.empty() && a.attacked_results.size() != a.results.size())
        throw InputError("--attacked-result must be given once per --result");
    if (a.attacked_data.size() > 1 && a.attacked_data.size() != a.attacked_results.size())
        throw InputError("--attacked-data must be given once, or once per --attacked-result");
    const BugCount mode = a.bug_count == "prefix" ? BugCount::prefix : BugCount::global;
    std::vector<Cutoff> cutoffs = parse_cutoffs(a.cutoffs);
    const bool has_all = std::any_of(cutoffs.begin(), cutoffs.end(), [](const Cutoff& c) { return !c; });
    if (!has_all) cutoffs.emplace_back(std::nullopt);

    const Dataset labeled = load_dataset(a.data);
    MetricReport report;
    report.n_inputs = labeled.rows;
    report.task = labeled.has_labels() ? Task::classification : Task::regression;

    std::vector<StoredResult> stored;
    std::vector<std::string> names;
    std::optional<Outcomes> outcomes;
    for (std::size_t k = 0; k < a.results.size(); ++k) {
        StoredResult r = parse_result_json(read_text_file(a.results[k]));
        if (r.task != report.task) throw InputError(a.results[k] + ": task does not match the labeled data");
        Outcomes o = outcomes_for(r, labeled);
        if (!outcomes) outcomes = o;
        std::string name = "certpri-" + r.mode;
        if (std::find(names.begin(), names.end(), name) != names.end()) name += "#" + std::to_string(k + 1);
        names.push_back(name);

        MethodReport m;
        m.method = name;
        m.source = fs::path(a.results[k]).filename().string();
        m.rauc = rauc_table(report.task, r.omega, o, cutoffs, mode, report.warnings);
        if (report.task == Task::classification) {
            if (auto tt = gamma_t_test(r, o, report.warnings, name)) {
                m.t = tt->t;
                m.p = tt->p;
            }
        }
        if (!a.attacked_results.empty()) {
            const std::string& adata = a.attacked_data.empty() ? a.data
                                       : a.attacked_data.size() == 1 ? a.attacked_data[0]
                                                                     : a.attacked_data[k];
            const StoredResult ar = parse_result_json(read_text_file(a.attacked_results[k]));
            const Outcomes ao = outcomes_for(ar, load_dataset(adata));
            const double attacked = report.task == Task::classification
                                        ? rauc_classification(ar.omega, ao.is_bug, ar.omega.size(), mode)
                                        : rauc_regression(ar.omega, ao.mse, ar.omega.size());
            const double original = std::find_if(m.rauc.begin(), m.rauc.end(), [](const auto& kv) {
                                        return kv.first == "rauc_all";
                                    })->second;
            m.robr = robr(attacked, original);
        }
        report.methods.push_back(std::move(m));
        stored.push_back(std::move(r));
    }

    for (const std::string& base : a.baselines) {
        MethodReport m;
        m.method = base;
        if (base == "deepgini") {
            if (report.task != Task::classification) throw InputError("deepgini baseline needs a classification task");
            if (a.model.empty()) throw InputError("deepgini baseline needs --model");
            const Model model = load_model(a.model);
            if (model.signature().input_dim != labeled.dim) throw InputError("model and data dimensions differ");
            std::vector<double> scores(labeled.rows);
            Outcomes o;
            o.is_bug.resize(labeled.rows);
            for (std::size_t i = 0; i < labeled.rows; ++i) {
                const std::vector<double> prob = model.forward(labeled.row(i));
                scores[i] = deepgini_score(prob);
                o.is_bug[i] = static_cast<int>(argmax(prob)) != labeled.labels[i];
            }
            m.source = fs::path(a.model).filename().string();
            m.rauc = rauc_table(report.task, deepgini_order(scores), o, cutoffs, mode, report.warnings);
            if (!outcomes) outcomes = o;
        } else if (base == "random") {
            if (!outcomes) throw InputError("random baseline needs a --result or deepgini baseline listed first");
            if (a.shuffles < 1) throw InputError("--shuffles must be >= 1");
            Rng rng(a.seed);
            std::vector<std::size_t> order(labeled.rows);
            std::vector<std::string> scratch;
            for (std::size_t s = 0; s < a.shuffles; ++s) {
                std::iota(order.begin(), order.end(), std::size_t{0});
                for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
                auto t = rauc_table(report.task, order, *outcomes, cutoffs, mode, scratch);
                if (m.rauc.empty()) {
                    m.rauc = t;
                } else {
                    for (std::size_t c = 0; c < t.size(); ++c) m.rauc[c].second += t[c].second;
                }
            }
            for (auto& kv : m.rauc) kv.second /= static_cast<double>(a.shuffles);
            m.source = "mean of " + std::to_string(a.shuffles) + " shuffles";
        } else {
            throw InputError("unknown baseline '" + base + "'");
        }
        report.methods.push_back(std::move(m));
    }

    if (outcomes && report.task == Task::classification)
        report.n_bugs = static_cast<std::size_t>(std::count(outcomes->is_bug.begin(), outcomes->is_bug.end(), true));
    // rauc_all is always computed for ranking; dropped again if not asked for
    assign_genrew(report);
    if (!has_all)
        for (auto& m : report.methods) m.rauc.pop_back();

    for (std::size_t i = 0; i < stored.size(); ++i)
        for (std::size_t j = i + 1; j < stored.size(); ++j) {
            if (stored[i].gamma.size() != stored[j].gamma.size()) {
                report.warnings.push_back(names[i] + " vs " + names[j] + ": different input counts, no rank correlation");
                continue;
            }
            try {
                report.rank_correlations.push_back({names[i], names[j], spearman(stored[i].gamma, stored[j].gamma)});
            } catch (const InputError& err) {
                report.warnings.push_back(names[i] + " vs " + names[j] + ": " + err.what());
            }
        }

    emit(a.out, a.format == "table" ? report_to_table(report) : report_to_json(report));
}

// ---- fit-gevt

struct FitArgs {
    std::string values, out, endpoint = "location-scale";
};

void run_fit(const FitArgs& a) {
    std::istringstream in(read_text_file(a.values));
    std::vector<double> values;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        try {
            std::size_t pos = 0;
            values.push_back(std::stod(line.substr(first), &pos));
        } catch (const std::exception&) {
            throw InputError("line " + std::to_string(lineno) + ": not a number");
        }
    }
    const FitOutcome outcome = fit_reverse_weibull(values);
    std::string text = fit_to_json(outcome, values);
    const EndpointVariant variant = parse_endpoint_variant(a.endpoint);
    if (variant != EndpointVariant::location_scale) {
        auto doc = ordered_json::parse(text);
        doc["endpoint_variant"] = to_string(variant);
        doc["lipschitz_estimate"] = lipschitz_estimate(outcome, values, variant).value;
        text = doc.dump(1) + "\n";
    }
    emit(a.out, text);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"CertPri test input prioritization"};
    app.require_subcommand(1);
    const auto mode_check = CLI::IsMember({"white-box", "black-box"});
    const auto norm_check = CLI::IsMember({"1", "2", "inf"});
    const auto endpoint_check = CLI::IsMember({"location-scale", "standardized"});

    GenArgs gen;
    auto* g = app.add_subcommand("gen-synthetic", "write train.csv, test.csv and truth.json");
    g->add_option("--generator", gen.generator)->check(CLI::IsMember(
        {"gaussian_blobs", "blobs", "two_moons", "moons", "linear_regression_noise", "linear"}));
    g->add_option("--classes", gen.spec.classes);
    g->add_option("--output-dim", gen.spec.output_dim);
    g->add_option("--input-dim", gen.spec.input_dim);
    g->add_option("--train", gen.spec.train_count);
    g->add_option("--test", gen.spec.test_count);
    g->add_option("--noise", gen.spec.label_noise, "fraction of corrupted training labels/targets");
    g->add_option("--spread", gen.spec.spread);
    g->add_option("--separation", gen.spec.separation);
    g->add_option("--moon-noise", gen.spec.moon_noise);
    g->add_option("--target-noise", gen.spec.target_noise);
    g->add_option("--off-manifold", gen.spec.off_manifold);
    g->add_option("--seed", gen.spec.seed)->envname("CERTPRI_SEED");
    g->add_option("--out-dir", gen.out_dir);

    TrainArgs tr;
    auto* t = app.add_subcommand("train-toy", "train a dense model on a CSV dataset");
    t->add_option("--data", tr.data)->required();
    t->add_option("--test", tr.test);
    t->add_option("--hidden", tr.hidden, "comma-separated widths, or none");
    t->add_option("--activation", tr.activation)->check(CLI::IsMember({"relu", "tanh", "sigmoid", "identity"}));
    t->add_option("--epochs", tr.opts.epochs);
    t->add_option("--lr", tr.opts.learning_rate);
    t->add_option("--batch-size", tr.opts.batch_size);
    t->add_option("--num-classes", tr.num_classes);
    t->add_option("--seed", tr.opts.seed)->envname("CERTPRI_SEED");
    t->add_option("--out", tr.out)->required();

    PriArgs pr;
    auto* p = app.add_subcommand("prioritize", "rank inputs by certified movement cost");
    p->add_option("--model", pr.model)->required();
    p->add_option("--data", pr.data)->required();
    p->add_option("--out", pr.out, "result JSON (stdout if omitted)");
    p->add_option("--norm,--p", pr.norm)->check(norm_check);
    p->add_option("--radius", pr.radius, "absolute, or 0.04x for 0.04 max|x|");
    p->add_option("--batches", pr.batches);
    p->add_option("--samples-per-batch", pr.samples);
    p->add_option("--mode", pr.mode)->check(mode_check);
    p->add_option("--fd-step", pr.fd_step);
    p->add_option("--endpoint", pr.endpoint)->check(endpoint_check);
    p->add_option("--seed", pr.seed)->envname("CERTPRI_SEED");
    p->add_flag("--serial", pr.serial, "single-threaded reference path");

    EvalArgs ev;
    auto* e = app.add_subcommand("evaluate", "metrics for stored orderings");
    e->add_option("--result", ev.results);
    e->add_option("--data", ev.data, "labeled dataset")->required();
    e->add_option("--cutoffs", ev.cutoffs);
    e->add_option("--baseline", ev.baselines)->check(CLI::IsMember({"deepgini", "random"}));
    e->add_option("--model", ev.model, "needed by the deepgini baseline");
    e->add_option("--shuffles", ev.shuffles);
    e->add_option("--attacked-result", ev.attacked_results);
    e->add_option("--attacked-data", ev.attacked_data);
    e->add_option("--format", ev.format)->check(CLI::IsMember({"json", "table"}));
    e->add_option("--bug-count", ev.bug_count)->check(CLI::IsMember({"global", "prefix"}));
    e->add_option("--seed", ev.seed)->envname("CERTPRI_SEED");
    e->add_option("--out", ev.out);

    FitArgs fa;
    auto* f = app.add_subcommand("fit-gevt", "fit a reverse Weibull to newline-separated values");
    f->add_option("values", fa.values)->required();
    f->add_option("--endpoint", fa.endpoint)->check(endpoint_check);
    f->add_option("--out", fa.out);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& err) {
        const int code = app.exit(err);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*g) run_gen(gen);
        if (*t) run_train(tr);
        if (*p) run_prioritize(pr);
        if (*e) run_evaluate(ev);
        if (*f) run_fit(fa);
    } catch (const InputError& err) {
        std::cerr << "error: " << err.what() << '\n';
        return 1;
    } catch (const NumericError& err) {
        std::cerr << "error: " << err.what() << '\n';
        return 1;
    } catch (const std::logic_error& err) {
        std::cerr << "internal error: " << err.what() << '\n';
        return 2;
    } catch (const std::filesystem::filesystem_error& err) {
        std::cerr << "error: " << err.what() << '\n';
        return 1;
    } catch (const std::exception& err) {
        std::cerr << "internal error: " << err.what() << '\n';
        return 2;
    }
    return 0;
}
