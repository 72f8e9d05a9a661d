#include <chrono>
#include <cstdlib>
#include <iostream>
#include <json.hpp>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "certpri/prioritizer.hpp"
#include "certpri/report.hpp"
#include "certpri/synthetic.hpp"
#include "certpri/trainer.hpp"

using namespace certpri;

namespace {

template <class F>
double seconds(F&& f) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
    const std::size_t n = argc > 1 ? std::strtoul(argv[1], nullptr, 10) : 1000;
    const std::size_t d = argc > 2 ? std::strtoul(argv[2], nullptr, 10) : 20;

    SyntheticSpec spec;
    spec.input_dim = d;
    spec.test_count = n;
    spec.train_count = 10;
    spec.seed = 11;
    const SyntheticData data = gen_synthetic(spec);
    ModelSignature sig{d, spec.classes, Task::classification, std::nullopt, std::nullopt};
    const Model model = init_model(sig, Architecture{{32, 32}, Activation::tanh}, 5);

    CertPriConfig cfg;
    cfg.seed = 1;
    const InputScale scale = InputScale::of(data.test);
    const FeatureMatrix inputs = FeatureMatrix::of(data.test);

    nlohmann::ordered_json out;
    out["inputs"] = n;
    out["dim"] = d;
#ifdef _OPENMP
    out["threads"] = omp_get_max_threads();
#else
    out["threads"] = 1;
#endif
    for (Mode mode : {Mode::white_box, Mode::black_box}) {
        cfg.mode = mode;
        PrioritizationResult a, b;
        const double ts = seconds([&] { a = prioritize_serial(model, inputs, cfg, scale); });
        const double tp = seconds([&] { b = prioritize(model, inputs, cfg, scale); });
        auto& entry = out[std::string(to_string(mode))];
        entry["serial_s"] = ts;
        entry["parallel_s"] = tp;
        entry["speedup"] = ts / tp;
        entry["identical"] = result_to_json(a) == result_to_json(b);
    }
    std::cout << out.dump(1) << '\n';
}
