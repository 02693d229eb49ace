#include "imbl/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "imbl/rng.hpp"

namespace imbl {

std::size_t Dataset::count(Label l) const {
    return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), l));
}

std::vector<std::size_t> Dataset::indices_of(Label l) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (labels[i] == l) out.push_back(i);
    return out;
}

Dataset Dataset::subset(const std::vector<std::size_t>& rows) const {
    Dataset out;
    out.feature_names = feature_names;
    out.features = Matrix(0, features.cols());
    out.labels.reserve(rows.size());
    for (std::size_t r : rows) {
        out.features.append_row(features.row(r));
        out.labels.push_back(labels[r]);
        if (!row_ids.empty()) out.row_ids.push_back(row_ids[r]);
    }
    return out;
}

void Dataset::require_trainable() const {
    if (size() == 0) throw DataError("dataset is empty");
    if (count(Label::positive) == 0 || count(Label::negative) == 0)
        throw DataError("dataset must contain both classes");
    for (std::size_t r = 0; r < features.rows(); ++r)
        for (std::size_t c = 0; c < features.cols(); ++c)
            if (!std::isfinite(features.at(r, c)))
                throw DataError("non-finite feature value at row " + std::to_string(r));
}

std::vector<std::size_t> FoldPlan::fold_rows(std::size_t fold) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < assignments.size(); ++i)
        if (assignments[i] == fold) out.push_back(i);
    return out;
}

std::vector<std::size_t> FoldPlan::complement_rows(std::size_t fold) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < assignments.size(); ++i)
        if (assignments[i] != fold) out.push_back(i);
    return out;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

bool parse_double(const std::string& s, double& out) {
    const std::string t = trim(s);
    if (t.empty()) return false;
    char* end = nullptr;
    out = std::strtod(t.c_str(), &end);
    return end == t.c_str() + t.size();
}

}  // namespace

Dataset load_csv(const std::string& path, const CsvOptions& opts) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open file: " + path);

    std::string line;
    if (!std::getline(in, line)) throw DataError("empty file: " + path);
    std::vector<std::string> header = split_csv_line(line);
    for (auto& h : header) h = trim(h);

    std::ptrdiff_t label_col = -1, id_col = -1;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == opts.label_column) label_col = static_cast<std::ptrdiff_t>(i);
        else if (header[i] == "DomainName") id_col = static_cast<std::ptrdiff_t>(i);
    }
    if (label_col < 0)
        throw DataError("label column '" + opts.label_column + "' not found in " + path);

    Dataset ds;
    for (std::size_t i = 0; i < header.size(); ++i)
        if (static_cast<std::ptrdiff_t>(i) != label_col &&
            static_cast<std::ptrdiff_t>(i) != id_col)
            ds.feature_names.push_back(header[i]);

    const std::size_t d = ds.feature_names.size();
    ds.features = Matrix(0, d);
    std::vector<std::vector<bool>> missing_mask;  // per row, per feature
    bool any_missing = false;

    std::size_t line_no = 1;
    std::vector<double> row(d);
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        std::vector<std::string> cells = split_csv_line(line);
        if (cells.size() != header.size())
            throw DataError(path + ": row " + std::to_string(line_no) + " has " +
                            std::to_string(cells.size()) + " cells, expected " +
                            std::to_string(header.size()));
        std::vector<bool> miss(d, false);
        std::size_t fi = 0;
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (static_cast<std::ptrdiff_t>(i) == label_col) {
                ds.labels.push_back(trim(cells[i]) == opts.positive_label
                                        ? Label::positive
                                        : Label::negative);
                continue;
            }
            if (static_cast<std::ptrdiff_t>(i) == id_col) {
                ds.row_ids.push_back(trim(cells[i]));
                continue;
            }
            double v = 0.0;
            if (!parse_double(cells[i], v)) {
                if (opts.impute_missing && trim(cells[i]).empty()) {
                    miss[fi] = true;
                    any_missing = true;
                    v = 0.0;
                } else {
                    throw DataError(path + ": non-numeric value '" + trim(cells[i]) +
                                    "' at row " + std::to_string(line_no) + ", column '" +
                                    header[i] + "'");
                }
            }
            row[fi++] = v;
        }
        ds.features.append_row(row.data());
        missing_mask.push_back(std::move(miss));
    }

    if (ds.size() == 0) throw DataError(path + ": no data rows");
    if (ds.count(Label::positive) == 0 || ds.count(Label::negative) == 0)
        throw DataError(path + ": only one class present");

    if (any_missing) {
        for (std::size_t c = 0; c < d; ++c) {
            std::vector<double> present;
            for (std::size_t r = 0; r < ds.size(); ++r)
                if (!missing_mask[r][c]) present.push_back(ds.features.at(r, c));
            if (present.empty())
                throw DataError(path + ": column '" + ds.feature_names[c] +
                                "' has no present values to impute from");
            std::sort(present.begin(), present.end());
            const std::size_t m = present.size();
            const double median = (m % 2 == 1)
                                      ? present[m / 2]
                                      : 0.5 * (present[m / 2 - 1] + present[m / 2]);
            for (std::size_t r = 0; r < ds.size(); ++r)
                if (missing_mask[r][c]) ds.features.at(r, c) = median;
        }
    }
    return ds;
}

void save_csv(const Dataset& ds, const std::string& path, const CsvOptions& opts) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write file: " + path);
    for (const auto& name : ds.feature_names) out << name << ',';
    out << opts.label_column << '\n';
    char buf[64];
    for (std::size_t r = 0; r < ds.size(); ++r) {
        for (std::size_t c = 0; c < ds.dim(); ++c) {
            std::snprintf(buf, sizeof(buf), "%.17g", ds.features.at(r, c));
            out << buf << ',';
        }
        out << (ds.labels[r] == Label::positive ? opts.positive_label
                                                : opts.negative_label)
            << '\n';
    }
}

Dataset generate_synthetic(const SyntheticSpec& spec) {
    const auto n_major = static_cast<std::size_t>(
        std::llround(static_cast<double>(spec.n_total) * spec.majority_fraction));
    if (n_major >= spec.n_total) throw DataError("majority_fraction leaves no minority rows");
    const std::size_t n_minor = spec.n_total - n_major;
    if (n_minor < 2) throw DataError("synthetic spec yields fewer than 2 minority rows");
    if (spec.majority_fraction <= 0.5 || spec.majority_fraction >= 1.0)
        throw DataError("majority_fraction must lie in (0.5, 1)");
    if (spec.d == 0) throw DataError("feature count must be positive");

    // Class means sit `class_separation` apart along the all-ones direction.
    const double shift = spec.class_separation / std::sqrt(static_cast<double>(spec.d));

    Dataset ds;
    ds.features = Matrix(spec.n_total, spec.d);
    ds.labels.assign(spec.n_total, Label::negative);
    ds.feature_names.reserve(spec.d);
    for (std::size_t c = 0; c < spec.d; ++c)
        ds.feature_names.push_back("f" + std::to_string(c + 1));

    Rng rng(spec.seed);
    for (std::size_t r = 0; r < spec.n_total; ++r) {
        const bool minority = r >= n_major;
        for (std::size_t c = 0; c < spec.d; ++c)
            ds.features.at(r, c) = rng.normal() + (minority ? shift : 0.0);
        if (minority) ds.labels[r] = Label::positive;
    }
    return ds;
}

FoldPlan stratified_folds(const Dataset& ds, std::size_t k, std::uint64_t seed) {
    if (k < 2) throw DataError("fold count must be at least 2");
    FoldPlan plan;
    plan.k = k;
    plan.assignments.assign(ds.size(), 0);

    Rng rng(derive_seed(seed, hash_str("folds")));
    std::size_t deal = 0;  // continues across classes so fold sizes differ by at most 1
    for (Label l : {Label::positive, Label::negative}) {
        std::vector<std::size_t> idx = ds.indices_of(l);
        if (idx.size() < k)
            throw DataError("class has fewer members (" + std::to_string(idx.size()) +
                            ") than fold count " + std::to_string(k));
        for (std::size_t i = idx.size(); i > 1; --i)
            std::swap(idx[i - 1], idx[rng.index(i)]);
        for (std::size_t i : idx) plan.assignments[i] = deal++ % k;
    }
    return plan;
}

StandardizationParams standardize_fit(const Dataset& ds) {
    if (ds.size() == 0) throw DataError("cannot fit standardization on empty data");
    const std::size_t n = ds.size(), d = ds.dim();
    StandardizationParams p;
    p.means.assign(d, 0.0);
    p.stddevs.assign(d, 0.0);
    for (std::size_t c = 0; c < d; ++c) {
        double sum = 0.0;
        for (std::size_t r = 0; r < n; ++r) sum += ds.features.at(r, c);
        p.means[c] = sum / static_cast<double>(n);
        double sq = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            const double dev = ds.features.at(r, c) - p.means[c];
            sq += dev * dev;
        }
        p.stddevs[c] = std::sqrt(sq / static_cast<double>(n));  // population stddev
    }
    return p;
}

Dataset standardize_apply(const StandardizationParams& p, const Dataset& ds) {
    Dataset out = ds;
    for (std::size_t c = 0; c < ds.dim(); ++c) {
        const double sd = p.stddevs[c];
        for (std::size_t r = 0; r < ds.size(); ++r)
            out.features.at(r, c) =
                sd > 0.0 ? (ds.features.at(r, c) - p.means[c]) / sd : 0.0;
    }
    return out;
}

}  // namespace imbl
