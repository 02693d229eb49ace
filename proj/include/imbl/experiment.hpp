#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "imbl/classifiers.hpp"
#include "imbl/dataset.hpp"
#include "imbl/integrated.hpp"
#include "imbl/metrics.hpp"
#include "imbl/stats.hpp"

namespace imbl {

struct DatasetConfig {
    std::string name;
    std::string csv_path;  // empty: synthetic
    CsvOptions csv;
    SyntheticSpec synthetic;

    Dataset materialize() const;
};

struct StrategyConfig {
    enum class Kind { ori, ru, ro, smote, pso, integrated };
    std::string name;
    Kind kind = Kind::ori;
    // smote baseline: amount_pct <= 0 means "to balance"
    int smote_amount_pct = 0;
    std::size_t smote_k = 5;
    double smote_fraction = 0.0;  // integrated fractional growth mode
    PsoConfig pso;                // desk-scale defaults set by the parser
};

StrategyConfig::Kind strategy_kind_from(const std::string& name);

struct NamedClassifier {
    std::string name;
    ClassifierSpec spec;
};

struct ExperimentConfig {
    std::vector<DatasetConfig> datasets;
    std::vector<StrategyConfig> strategies;
    std::vector<NamedClassifier> classifiers;
    std::size_t folds = 10;
    std::uint64_t master_seed = 0;
    std::string output_dir = ".";
    std::uint64_t config_hash = 0;
};

// Strict `key = value` sections; unknown sections or keys are errors.
ExperimentConfig parse_experiment_config(const std::string& path);

struct ExperimentResult {
    std::vector<std::string> datasets, strategies, classifiers;
    std::size_t folds = 0;
    std::uint64_t master_seed = 0;
    std::uint64_t config_hash = 0;

    std::vector<MetricReport> fold_reports;  // (d, c, s, f) row-major

    // Provenance for the leak check: original-dataset row ids present in each
    // resampled training set, and the ids of each held-out fold.
    std::vector<std::vector<std::size_t>> train_identities;  // (d, s, f)
    std::vector<std::vector<std::size_t>> test_identities;   // (d, f)

    std::size_t report_index(std::size_t d, std::size_t c, std::size_t s,
                             std::size_t f) const;
    const MetricReport& at(std::size_t d, std::size_t c, std::size_t s,
                           std::size_t f) const;
    MetricReport mean(std::size_t d, std::size_t c, std::size_t s) const;
};

// Runs the strategy x classifier grid under k-fold CV. Resampling and
// standardization see only the training folds. Deterministic for a fixed
// master seed at any thread count.
ExperimentResult run_experiment(const ExperimentConfig& cfg, std::size_t threads = 1);

enum class TableMetric { f_measure, gmean, auc };

ResultMatrix emit_table(const ExperimentResult& result, TableMetric metric);

// results_folds.csv, results_mean.csv, table_{fm,gmean,auc}.csv
void write_result_files(const ExperimentResult& result, const std::string& out_dir);

// Markdown summary over the table_*.csv files in `results_dir`: per-row
// best/worst marks and improvement percentages over the ori baseline.
void write_report(const std::string& results_dir, const std::string& out_path);

}  // namespace imbl
