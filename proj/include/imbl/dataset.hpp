#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace imbl {

// Exit-code categories used by the CLI.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Label : std::uint8_t { negative = 0, positive = 1 };

// Dense row-major matrix; small enough data that nothing fancier is needed.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& at(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double at(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    const double* row(std::size_t r) const { return data_.data() + r * cols_; }
    double* row(std::size_t r) { return data_.data() + r * cols_; }

    void append_row(const double* values) {
        data_.insert(data_.end(), values, values + cols_);
        ++rows_;
    }

    bool operator==(const Matrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

struct Dataset {
    Matrix features;
    std::vector<Label> labels;
    std::vector<std::string> feature_names;
    std::vector<std::string> row_ids;  // optional (e.g. dropped identifier column)

    std::size_t size() const { return labels.size(); }
    std::size_t dim() const { return features.cols(); }
    std::size_t count(Label l) const;
    std::vector<std::size_t> indices_of(Label l) const;

    // Row-subset view materialized as a new Dataset.
    Dataset subset(const std::vector<std::size_t>& rows) const;

    // Throws DataError unless both classes are present and all values finite.
    void require_trainable() const;
};

struct FoldPlan {
    std::vector<std::size_t> assignments;  // fold index per row, in [0, k)
    std::size_t k = 0;

    std::vector<std::size_t> fold_rows(std::size_t fold) const;
    std::vector<std::size_t> complement_rows(std::size_t fold) const;
};

struct StandardizationParams {
    std::vector<double> means;
    std::vector<double> stddevs;
};

struct SyntheticSpec {
    std::size_t n_total = 0;
    double majority_fraction = 0.9;  // in (0.5, 1)
    std::size_t d = 20;
    double class_separation = 2.0;  // distance between class means
    std::uint64_t seed = 0;
};

struct CsvOptions {
    std::string label_column = "label";
    std::string positive_label = "pos";
    std::string negative_label = "neg";  // used on write only; read maps non-positive to negative
    bool impute_missing = false;  // column-median imputation for empty cells
};

Dataset load_csv(const std::string& path, const CsvOptions& opts);
void save_csv(const Dataset& ds, const std::string& path, const CsvOptions& opts);

Dataset generate_synthetic(const SyntheticSpec& spec);

FoldPlan stratified_folds(const Dataset& ds, std::size_t k, std::uint64_t seed);

StandardizationParams standardize_fit(const Dataset& ds);
Dataset standardize_apply(const StandardizationParams& p, const Dataset& ds);

}  // namespace imbl
