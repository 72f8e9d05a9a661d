#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace certpri {

// Row-major N x d feature matrix with optional ground truth. Ground truth is
// either integer class labels or an N x d2 target matrix, never both.
struct Dataset {
    std::size_t rows = 0;
    std::size_t dim = 0;
    std::vector<double> features;
    std::vector<int> labels;
    std::size_t target_dim = 0;
    std::vector<double> targets;

    std::span<const double> row(std::size_t i) const { return {features.data() + i * dim, dim}; }
    std::span<const double> target(std::size_t i) const {
        return {targets.data() + i * target_dim, target_dim};
    }
    bool has_labels() const noexcept { return !labels.empty(); }
    bool has_targets() const noexcept { return target_dim > 0; }

    // Largest absolute feature value; the reference scale for relative radii.
    double max_abs_feature() const;
    // Per-column largest absolute value, floored at 1e-12.
    std::vector<double> column_scale() const;

    void validate() const;
};

struct DatasetReadOptions {
    // When false, `label` and `t*` columns are skipped without being parsed.
    bool read_ground_truth = true;
    // When set, labels must lie in [0, num_classes).
    std::optional<std::size_t> num_classes;
};

Dataset parse_dataset_csv(std::string_view text, const DatasetReadOptions& options = {});
Dataset load_dataset(const std::filesystem::path& path, const DatasetReadOptions& options = {});

std::string dataset_to_csv(const Dataset& data);
void save_dataset(const Dataset& data, const std::filesystem::path& path);

// Copy with labels and targets removed.
Dataset strip_ground_truth(Dataset data);

}  // namespace certpri
