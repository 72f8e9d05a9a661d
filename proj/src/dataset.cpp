#include "certpri/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <string>

#include "certpri/error.hpp"
#include "certpri/io.hpp"

namespace certpri {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const std::size_t comma = line.find(',', start);
        out.push_back(trim(line.substr(start, comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

// Parses "<prefix><index>"; returns -1 when the name does not match.
long indexed_column(std::string_view name, char prefix) {
    if (name.size() < 2 || name[0] != prefix) return -1;
    long idx = 0;
    auto [ptr, ec] = std::from_chars(name.data() + 1, name.data() + name.size(), idx);
    if (ec != std::errc{} || ptr != name.data() + name.size() || idx < 0) return -1;
    return idx;
}

double parse_real(std::string_view cell, std::size_t line_no) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (ec != std::errc{} || ptr != cell.data() + cell.size() || !std::isfinite(v))
        throw InputError("line " + std::to_string(line_no) + ": bad number '" + std::string(cell) + "'");
    return v;
}

enum class ColumnKind { feature, label, target };
struct Column {
    ColumnKind kind;
    std::size_t index;
};

// Column-mean imputation over a row-major matrix with NaN marking missing cells.
void fill_missing(std::vector<double>& matrix, std::size_t cols, const char* what) {
    if (cols == 0) return;
    const std::size_t rows = matrix.size() / cols;
    for (std::size_t c = 0; c < cols; ++c) {
        double sum = 0.0;
        std::size_t present = 0;
        for (std::size_t r = 0; r < rows; ++r) {
            const double v = matrix[r * cols + c];
            if (!std::isnan(v)) {
                sum += v;
                ++present;
            }
        }
        if (present == rows) continue;
        if (present == 0)
            throw InputError(std::string(what) + " column " + std::to_string(c) + " has no values");
        const double mean = sum / static_cast<double>(present);
        for (std::size_t r = 0; r < rows; ++r)
            if (std::isnan(matrix[r * cols + c])) matrix[r * cols + c] = mean;
    }
}

}  // namespace

double Dataset::max_abs_feature() const {
    double m = 0.0;
    for (double v : features) m = std::max(m, std::abs(v));
    return m;
}

std::vector<double> Dataset::column_scale() const {
    std::vector<double> scale(dim, 0.0);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < dim; ++c)
            scale[c] = std::max(scale[c], std::abs(features[r * dim + c]));
    for (double& s : scale) s = std::max(s, 1e-12);
    return scale;
}

void Dataset::validate() const {
    if (rows < 1) throw InputError("dataset has no rows");
    if (dim < 1) throw InputError("dataset has no feature columns");
    if (features.size() != rows * dim) throw InputError("feature matrix has wrong size");
    if (!std::all_of(features.begin(), features.end(), [](double v) { return std::isfinite(v); }))
        throw InputError("non-finite feature value");
    if (!labels.empty() && labels.size() != rows) throw InputError("label vector has wrong length");
    if (!labels.empty() && target_dim > 0) throw InputError("dataset has both labels and targets");
    if (targets.size() != rows * target_dim) throw InputError("target matrix has wrong size");
    for (int label : labels)
        if (label < 0) throw InputError("negative class label");
}

Dataset parse_dataset_csv(std::string_view text, const DatasetReadOptions& options) {
    std::vector<std::string_view> lines;
    {
        std::size_t start = 0;
        while (start < text.size()) {
            std::size_t nl = text.find('\n', start);
            if (nl == std::string_view::npos) nl = text.size();
            std::string_view line = text.substr(start, nl - start);
            if (!trim(line).empty()) lines.push_back(line);
            start = nl + 1;
        }
    }
    if (lines.empty()) throw InputError("dataset file is empty");
    // UTF-8 byte order mark.
    if (lines[0].substr(0, 3) == "\xEF\xBB\xBF") lines[0].remove_prefix(3);

    const std::vector<std::string_view> header = split_fields(lines[0]);
    std::vector<Column> columns;
    std::size_t dim = 0, target_dim = 0;
    bool has_label = false;
    std::vector<bool> seen_f, seen_t;
    auto mark = [](std::vector<bool>& seen, std::size_t idx) {
        if (seen.size() <= idx) seen.resize(idx + 1, false);
        if (seen[idx]) return false;
        seen[idx] = true;
        return true;
    };
    for (std::string_view name : header) {
        if (name == "label") {
            if (has_label) throw InputError("duplicate 'label' column");
            has_label = true;
            columns.push_back({ColumnKind::label, 0});
        } else if (long f = indexed_column(name, 'f'); f >= 0) {
            if (!mark(seen_f, static_cast<std::size_t>(f))) throw InputError("duplicate column " + std::string(name));
            columns.push_back({ColumnKind::feature, static_cast<std::size_t>(f)});
            ++dim;
        } else if (long t = indexed_column(name, 't'); t >= 0) {
            if (!mark(seen_t, static_cast<std::size_t>(t))) throw InputError("duplicate column " + std::string(name));
            columns.push_back({ColumnKind::target, static_cast<std::size_t>(t)});
            ++target_dim;
        } else {
            throw InputError("unexpected header column '" + std::string(name) + "'");
        }
    }
    if (dim == 0) throw InputError("header has no feature columns");
    if (seen_f.size() != dim) throw InputError("feature columns must be named f0..f" + std::to_string(dim - 1));
    if (seen_t.size() != target_dim) throw InputError("target columns must be named t0..t" + std::to_string(target_dim - 1));
    if (has_label && target_dim > 0) throw InputError("dataset cannot have both label and target columns");

    Dataset data;
    data.dim = dim;
    data.rows = lines.size() - 1;
    if (data.rows == 0) throw InputError("dataset has a header but no rows");
    const bool want_truth = options.read_ground_truth;
    data.features.assign(data.rows * dim, std::nan(""));
    if (want_truth && has_label) data.labels.assign(data.rows, 0);
    if (want_truth && target_dim > 0) {
        data.target_dim = target_dim;
        data.targets.assign(data.rows * target_dim, std::nan(""));
    }

    for (std::size_t r = 0; r < data.rows; ++r) {
        const std::size_t line_no = r + 2;
        const std::vector<std::string_view> cells = split_fields(lines[r + 1]);
        if (cells.size() != columns.size())
            throw InputError("line " + std::to_string(line_no) + ": expected " +
                             std::to_string(columns.size()) + " cells, found " + std::to_string(cells.size()));
        for (std::size_t c = 0; c < columns.size(); ++c) {
            const Column& col = columns[c];
            const std::string_view cell = cells[c];
            switch (col.kind) {
                case ColumnKind::feature:
                    if (!cell.empty()) data.features[r * dim + col.index] = parse_real(cell, line_no);
                    break;
                case ColumnKind::target:
                    if (want_truth && !cell.empty())
                        data.targets[r * target_dim + col.index] = parse_real(cell, line_no);
                    break;
                case ColumnKind::label: {
                    if (!want_truth) break;
                    long label = -1;
                    auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), label);
                    if (cell.empty() || ec != std::errc{} || ptr != cell.data() + cell.size())
                        throw InputError("line " + std::to_string(line_no) + ": bad label '" + std::string(cell) + "'");
                    if (label < 0 || (options.num_classes && static_cast<std::size_t>(label) >= *options.num_classes))
                        throw InputError("line " + std::to_string(line_no) + ": label " + std::to_string(label) +
                                         " out of range");
                    data.labels[r] = static_cast<int>(label);
                    break;
                }
            }
        }
    }
    fill_missing(data.features, dim, "feature");
    fill_missing(data.targets, data.target_dim, "target");
    data.validate();
    return data;
}

Dataset load_dataset(const std::filesystem::path& path, const DatasetReadOptions& options) {
    return parse_dataset_csv(read_text_file(path), options);
}

std::string dataset_to_csv(const Dataset& data) {
    data.validate();
    std::string out;
    for (std::size_t c = 0; c < data.dim; ++c) {
        if (c) out += ',';
        out += 'f' + std::to_string(c);
    }
    if (data.has_labels()) out += ",label";
    for (std::size_t c = 0; c < data.target_dim; ++c) out += ",t" + std::to_string(c);
    out += '\n';
    for (std::size_t r = 0; r < data.rows; ++r) {
        for (std::size_t c = 0; c < data.dim; ++c) {
            if (c) out += ',';
            out += format_double(data.features[r * data.dim + c]);
        }
        if (data.has_labels()) out += ',' + std::to_string(data.labels[r]);
        for (std::size_t c = 0; c < data.target_dim; ++c)
            out += ',' + format_double(data.targets[r * data.target_dim + c]);
        out += '\n';
    }
    return out;
}

void save_dataset(const Dataset& data, const std::filesystem::path& path) {
    write_file_atomic(path, dataset_to_csv(data));
}

Dataset strip_ground_truth(Dataset data) {
    data.labels.clear();
    data.targets.clear();
    data.target_dim = 0;
    return data;
}

}  // namespace certpri
