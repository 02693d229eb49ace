#include "imbl/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include "imbl/pso.hpp"
#include "imbl/resampling.hpp"
#include "imbl/rng.hpp"

namespace imbl {

Dataset DatasetConfig::materialize() const {
    return csv_path.empty() ? generate_synthetic(synthetic)
                            : load_csv(csv_path, csv);
}

StrategyConfig::Kind strategy_kind_from(const std::string& name) {
    using Kind = StrategyConfig::Kind;
    if (name == "ori") return Kind::ori;
    if (name == "ru") return Kind::ru;
    if (name == "ro") return Kind::ro;
    if (name == "smote") return Kind::smote;
    if (name == "pso") return Kind::pso;
    if (name == "integrated") return Kind::integrated;
    throw DataError("unknown strategy kind: " + name);
}

// ---------------------------------------------------------------------------
// Config parsing

namespace {

struct ConfigError : DataError {
    using DataError::DataError;
};

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double to_number(const std::string& v, const std::string& key) {
    try {
        std::size_t used = 0;
        const double x = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "': expected a number, got '" + v + "'");
    }
}

std::size_t to_count(const std::string& v, const std::string& key) {
    const double x = to_number(v, key);
    if (x < 0 || x != std::floor(x))
        throw ConfigError("key '" + key + "': expected a nonnegative integer");
    return static_cast<std::size_t>(x);
}

// Desk-scale defaults for grid runs; the published settings (2000
// iterations) are reachable through pso_iters.
PsoConfig desk_pso_defaults() {
    PsoConfig pso;
    pso.swarm_size = 40;
    pso.max_iterations = 100;
    pso.patience = 20;
    return pso;
}

struct Section {
    std::string header;
    std::vector<std::pair<std::string, std::string>> entries;
    std::size_t line_no = 0;
};

std::vector<Section> read_sections(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config: " + path);
    std::vector<Section> sections;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        if (t.front() == '[') {
            if (t.back() != ']')
                throw ConfigError(path + ":" + std::to_string(line_no) +
                                  ": malformed section header");
            sections.push_back({trim(t.substr(1, t.size() - 2)), {}, line_no});
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos || sections.empty())
            throw ConfigError(path + ":" + std::to_string(line_no) +
                              ": expected 'key = value' inside a section");
        sections.back().entries.emplace_back(trim(t.substr(0, eq)),
                                             trim(t.substr(eq + 1)));
    }
    return sections;
}

bool apply_pso_key(PsoConfig& pso, const std::string& key, const std::string& value) {
    if (key == "pso_swarm") pso.swarm_size = to_count(value, key);
    else if (key == "pso_iters") pso.max_iterations = to_count(value, key);
    else if (key == "pso_patience") pso.patience = to_count(value, key);
    else if (key == "pso_c1") pso.c1 = to_number(value, key);
    else if (key == "pso_c2") pso.c2 = to_number(value, key);
    else if (key == "pso_inertia") pso.inertia = to_number(value, key);
    else if (key == "pso_vmax") pso.v_max = to_number(value, key);
    else if (key == "pso_folds") pso.fitness_folds = to_count(value, key);
    else return false;
    return true;
}

}  // namespace

ExperimentConfig parse_experiment_config(const std::string& path) {
    ExperimentConfig cfg;

    {
        std::ifstream in(path, std::ios::binary);
        std::stringstream buffer;
        buffer << in.rdbuf();
        cfg.config_hash = hash_str(buffer.str());
    }

    for (const Section& sec : read_sections(path)) {
        std::istringstream hs(sec.header);
        std::string kind, name;
        hs >> kind >> name;

        if (kind == "experiment") {
            for (const auto& [key, value] : sec.entries) {
                if (key == "folds") cfg.folds = to_count(value, key);
                else if (key == "master_seed") cfg.master_seed = to_count(value, key);
                else if (key == "output_dir") cfg.output_dir = value;
                else throw ConfigError("unknown key '" + key + "' in [experiment]");
            }
        } else if (kind == "dataset") {
            if (name.empty()) throw ConfigError("[dataset] needs a name");
            DatasetConfig ds;
            ds.name = name;
            for (const auto& [key, value] : sec.entries) {
                if (key == "csv") ds.csv_path = value;
                else if (key == "label_column") ds.csv.label_column = value;
                else if (key == "positive_label") ds.csv.positive_label = value;
                else if (key == "impute_missing") ds.csv.impute_missing = value == "true";
                else if (key == "synthetic_n") ds.synthetic.n_total = to_count(value, key);
                else if (key == "synthetic_ratio")
                    ds.synthetic.majority_fraction = to_number(value, key);
                else if (key == "synthetic_features")
                    ds.synthetic.d = to_count(value, key);
                else if (key == "synthetic_separation")
                    ds.synthetic.class_separation = to_number(value, key);
                else if (key == "synthetic_seed")
                    ds.synthetic.seed = to_count(value, key);
                else throw ConfigError("unknown key '" + key + "' in [dataset " + name + "]");
            }
            if (ds.csv_path.empty() && ds.synthetic.n_total == 0)
                throw ConfigError("[dataset " + name + "]: set csv or synthetic_n");
            cfg.datasets.push_back(std::move(ds));
        } else if (kind == "strategy") {
            if (name.empty()) throw ConfigError("[strategy] needs a name");
            StrategyConfig st;
            st.name = name;
            st.pso = desk_pso_defaults();
            bool kind_seen = false;
            for (const auto& [key, value] : sec.entries) {
                if (key == "kind") {
                    st.kind = strategy_kind_from(value);
                    kind_seen = true;
                } else if (key == "smote_amount") {
                    st.smote_amount_pct =
                        value == "balance" ? 0 : static_cast<int>(to_count(value, key));
                } else if (key == "smote_k") st.smote_k = to_count(value, key);
                else if (key == "smote_fraction") st.smote_fraction = to_number(value, key);
                else if (apply_pso_key(st.pso, key, value)) {}
                else throw ConfigError("unknown key '" + key + "' in [strategy " + name + "]");
            }
            if (!kind_seen) st.kind = strategy_kind_from(name);
            if (st.kind == StrategyConfig::Kind::integrated && st.smote_amount_pct == 0 &&
                st.smote_fraction == 0.0)
                st.smote_amount_pct = 100;
            cfg.strategies.push_back(std::move(st));
        } else if (kind == "classifier") {
            if (name.empty()) throw ConfigError("[classifier] needs a name");
            NamedClassifier clf;
            clf.name = name;
            bool kind_seen = false;
            for (const auto& [key, value] : sec.entries) {
                if (key == "kind") {
                    clf.spec.kind = classifier_kind_from(value);
                    kind_seen = true;
                } else {
                    clf.spec.params[key] = to_number(value, key);
                }
            }
            if (!kind_seen) clf.spec.kind = classifier_kind_from(name);
            cfg.classifiers.push_back(std::move(clf));
        } else {
            throw ConfigError("unknown section [" + sec.header + "]");
        }
    }

    if (cfg.datasets.empty() || cfg.strategies.empty() || cfg.classifiers.empty())
        throw ConfigError(path + ": need at least one dataset, strategy and classifier");
    auto unique_names = [](auto& list, const char* what) {
        for (std::size_t i = 0; i < list.size(); ++i)
            for (std::size_t j = i + 1; j < list.size(); ++j)
                if (list[i].name == list[j].name)
                    throw ConfigError(std::string("duplicate ") + what + " name: " +
                                      list[i].name);
    };
    unique_names(cfg.datasets, "dataset");
    unique_names(cfg.strategies, "strategy");
    unique_names(cfg.classifiers, "classifier");
    return cfg;
}

// ---------------------------------------------------------------------------
// Grid execution

std::size_t ExperimentResult::report_index(std::size_t d, std::size_t c,
                                           std::size_t s, std::size_t f) const {
    return ((d * classifiers.size() + c) * strategies.size() + s) * folds + f;
}

const MetricReport& ExperimentResult::at(std::size_t d, std::size_t c,
                                         std::size_t s, std::size_t f) const {
    return fold_reports[report_index(d, c, s, f)];
}

MetricReport ExperimentResult::mean(std::size_t d, std::size_t c, std::size_t s) const {
    std::vector<MetricReport> cell;
    for (std::size_t f = 0; f < folds; ++f) cell.push_back(at(d, c, s, f));
    return aggregate_folds(cell);
}

namespace {

std::uint64_t cell_seed(std::uint64_t master, const std::string& dataset,
                        const std::string& strategy, std::size_t fold,
                        const std::string& extra = "") {
    std::uint64_t h = derive_seed(master, hash_str(dataset));
    h = derive_seed(h, hash_str(strategy));
    h = derive_seed(h, fold);
    if (!extra.empty()) h = derive_seed(h, hash_str(extra));
    return h;
}

ResampleOutcome apply_strategy(const Dataset& train, const StrategyConfig& st,
                               std::uint64_t seed) {
    using Kind = StrategyConfig::Kind;
    switch (st.kind) {
        case Kind::ori: return identity(train);
        case Kind::ru: return random_undersample(train, seed);
        case Kind::ro: return random_oversample(train, seed);
        case Kind::smote:
            if (st.smote_amount_pct > 0)
                return smote(train, st.smote_amount_pct, st.smote_k, seed);
            return smote_to_target(train, train.count(Label::negative), st.smote_k,
                                   seed);
        case Kind::pso: {
            PsoConfig pso = st.pso;
            pso.target_ones = train.count(Label::positive);
            pso.seed = seed;
            const PsoResult r = pso_undersample(train, pso);
            std::vector<std::size_t> keep = train.indices_of(Label::positive);
            keep.insert(keep.end(), r.selected.begin(), r.selected.end());
            std::sort(keep.begin(), keep.end());
            ResampleOutcome out;
            out.dataset = train.subset(keep);
            for (std::size_t row : keep)
                out.origins.push_back({Provenance::original, row, 0, 0.0});
            return out;
        }
        case Kind::integrated: {
            IntegratedConfig cfg;
            cfg.smote_amount_pct = st.smote_amount_pct;
            cfg.smote_fraction = st.smote_fraction;
            cfg.smote_k = st.smote_k;
            cfg.pso = st.pso;
            return integrated_resample(train, cfg, seed).resampled;
        }
    }
    throw DataError("unreachable strategy kind");
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg, std::size_t threads) {
    ExperimentResult result;
    for (const auto& d : cfg.datasets) result.datasets.push_back(d.name);
    for (const auto& s : cfg.strategies) result.strategies.push_back(s.name);
    for (const auto& c : cfg.classifiers) result.classifiers.push_back(c.name);
    result.folds = cfg.folds;
    result.master_seed = cfg.master_seed;
    result.config_hash = cfg.config_hash;

    const std::size_t nd = cfg.datasets.size(), ns = cfg.strategies.size(),
                      nc = cfg.classifiers.size(), nf = cfg.folds;
    result.fold_reports.assign(nd * nc * ns * nf, {});
    result.train_identities.assign(nd * ns * nf, {});
    result.test_identities.assign(nd * nf, {});

    // Datasets and fold plans are built once and shared read-only.
    std::vector<Dataset> data;
    std::vector<FoldPlan> plans;
    for (const auto& dc : cfg.datasets) {
        Dataset ds = dc.materialize();
        ds.require_trainable();
        plans.push_back(stratified_folds(
            ds, cfg.folds, derive_seed(cfg.master_seed, hash_str(dc.name))));
        data.push_back(std::move(ds));
    }
    for (std::size_t d = 0; d < nd; ++d)
        for (std::size_t f = 0; f < nf; ++f)
            result.test_identities[d * nf + f] = plans[d].fold_rows(f);

    struct Task {
        std::size_t d, s, f;
    };
    std::vector<Task> tasks;
    for (std::size_t d = 0; d < nd; ++d)
        for (std::size_t s = 0; s < ns; ++s)
            for (std::size_t f = 0; f < nf; ++f) tasks.push_back({d, s, f});

    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::string first_error;
    std::mutex error_mutex;

    auto worker = [&]() {
        for (;;) {
            const std::size_t t = next.fetch_add(1);
            if (t >= tasks.size() || failed.load()) return;
            const auto [d, s, f] = tasks[t];
            const auto& st = cfg.strategies[s];
            const auto start = std::chrono::steady_clock::now();
            try {
                const std::vector<std::size_t> train_rows = plans[d].complement_rows(f);
                const std::vector<std::size_t> test_rows = plans[d].fold_rows(f);
                Dataset train = data[d].subset(train_rows);
                const StandardizationParams scale = standardize_fit(train);
                train = standardize_apply(scale, train);
                const Dataset test =
                    standardize_apply(scale, data[d].subset(test_rows));

                ResampleOutcome resampled = apply_strategy(
                    train, st, cell_seed(cfg.master_seed, cfg.datasets[d].name,
                                         st.name, f));

                auto& ids = result.train_identities[(d * ns + s) * nf + f];
                for (const RowOrigin& origin : resampled.origins)
                    if (origin.kind != Provenance::synthetic)
                        ids.push_back(train_rows[origin.source]);

                for (std::size_t c = 0; c < nc; ++c) {
                    ClassifierSpec spec = cfg.classifiers[c].spec;
                    spec.seed = cell_seed(cfg.master_seed, cfg.datasets[d].name,
                                          st.name, f, cfg.classifiers[c].name);
                    const auto model = imbl::train(spec, resampled.dataset);
                    const auto predicted = model->predict(test.features);
                    result.fold_reports[result.report_index(d, c, s, f)] =
                        score(confusion(predicted, test.labels));
                }
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!failed.exchange(true))
                    first_error = "cell (" + cfg.datasets[d].name + ", " + st.name +
                                  ", fold " + std::to_string(f) + "): " + e.what();
                return;
            }
            const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                                std::chrono::steady_clock::now() - start)
                                .count();
            std::fprintf(stderr, "[run] %s / %s / fold %zu: %lld ms\n",
                         cfg.datasets[d].name.c_str(), st.name.c_str(), f,
                         static_cast<long long>(ms));
        }
    };

    const std::size_t n_threads = std::max<std::size_t>(1, threads);
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t i = 0; i < n_threads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (failed.load()) throw DataError(first_error);
    return result;
}

// ---------------------------------------------------------------------------
// Output

ResultMatrix emit_table(const ExperimentResult& result, TableMetric metric) {
    ResultMatrix m;
    m.higher_is_better = true;
    m.column_names = result.strategies;
    m.values = Matrix(0, result.strategies.size());
    std::vector<double> row(result.strategies.size());
    for (std::size_t d = 0; d < result.datasets.size(); ++d)
        for (std::size_t c = 0; c < result.classifiers.size(); ++c) {
            for (std::size_t s = 0; s < result.strategies.size(); ++s) {
                const MetricReport mean = result.mean(d, c, s);
                row[s] = metric == TableMetric::f_measure ? mean.f_measure
                         : metric == TableMetric::gmean   ? mean.gmean
                                                          : mean.auc;
            }
            m.row_names.push_back(result.datasets[d] + "." + result.classifiers[c]);
            m.values.append_row(row.data());
        }
    return m;
}

namespace {

void write_metric_row(std::ofstream& out, const MetricReport& m) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), "%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f",
                  m.accuracy, m.precision, m.recall, m.tn_rate, m.fp_rate,
                  m.f_measure, m.gmean, m.auc);
    out << buf << '\n';
}

constexpr const char* kMetricHeader =
    "accuracy,precision,recall,tn_rate,fp_rate,f_measure,gmean,auc";

}  // namespace

void write_result_files(const ExperimentResult& result, const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);

    std::ofstream folds(out_dir + "/results_folds.csv");
    folds << "dataset,classifier,strategy,fold," << kMetricHeader << '\n';
    std::ofstream means(out_dir + "/results_mean.csv");
    means << "dataset,classifier,strategy," << kMetricHeader << '\n';

    for (std::size_t d = 0; d < result.datasets.size(); ++d)
        for (std::size_t c = 0; c < result.classifiers.size(); ++c)
            for (std::size_t s = 0; s < result.strategies.size(); ++s) {
                for (std::size_t f = 0; f < result.folds; ++f) {
                    folds << result.datasets[d] << ',' << result.classifiers[c] << ','
                          << result.strategies[s] << ',' << f << ',';
                    write_metric_row(folds, result.at(d, c, s, f));
                }
                means << result.datasets[d] << ',' << result.classifiers[c] << ','
                      << result.strategies[s] << ',';
                write_metric_row(means, result.mean(d, c, s));
            }

    save_result_matrix(emit_table(result, TableMetric::f_measure),
                       out_dir + "/table_fm.csv");
    save_result_matrix(emit_table(result, TableMetric::gmean),
                       out_dir + "/table_gmean.csv");
    save_result_matrix(emit_table(result, TableMetric::auc),
                       out_dir + "/table_auc.csv");
}

void write_report(const std::string& results_dir, const std::string& out_path) {
    std::ofstream out(out_path);
    if (!out) throw DataError("cannot write report: " + out_path);
    out << "# Resampling comparison report\n";

    const std::pair<const char*, const char*> tables[] = {
        {"F-measure", "table_fm.csv"},
        {"GMean", "table_gmean.csv"},
        {"AUC", "table_auc.csv"}};
    for (const auto& [title, file] : tables) {
        const ResultMatrix m = load_result_matrix(results_dir + "/" + std::string(file), true);
        out << "\n## " << title << "\n\n|case|";
        for (const auto& name : m.column_names) out << name << '|';
        out << "\n|" << std::string(5, '-') << '|';
        for (std::size_t c = 0; c < m.column_names.size(); ++c) out << "---|";
        out << '\n';

        std::ptrdiff_t ori_col = -1;
        for (std::size_t c = 0; c < m.column_names.size(); ++c) {
            std::string lower = m.column_names[c];
            std::transform(lower.begin(), lower.end(), lower.begin(), ::tolower);
            if (lower == "ori") ori_col = static_cast<std::ptrdiff_t>(c);
        }

        char buf[64];
        for (std::size_t r = 0; r < m.values.rows(); ++r) {
            std::size_t best = 0, worst = 0;
            for (std::size_t c = 1; c < m.values.cols(); ++c) {
                if (m.values.at(r, c) > m.values.at(r, best)) best = c;
                if (m.values.at(r, c) < m.values.at(r, worst)) worst = c;
            }
            out << '|' << (m.row_names.empty() ? std::to_string(r) : m.row_names[r])
                << '|';
            for (std::size_t c = 0; c < m.values.cols(); ++c) {
                std::snprintf(buf, sizeof(buf), "%.4f", m.values.at(r, c));
                if (c == best) out << "**" << buf << "**";
                else if (c == worst) out << '_' << buf << '_';
                else out << buf;
                out << '|';
            }
            out << '\n';
        }

        if (ori_col >= 0) {
            out << "\nImprovement over " << m.column_names[ori_col] << " (%):\n\n|case|";
            for (const auto& name : m.column_names) out << name << '|';
            out << "\n|---|";
            for (std::size_t c = 0; c < m.column_names.size(); ++c) out << "---|";
            out << '\n';
            for (std::size_t r = 0; r < m.values.rows(); ++r) {
                out << '|' << (m.row_names.empty() ? std::to_string(r) : m.row_names[r])
                    << '|';
                const double base = m.values.at(r, static_cast<std::size_t>(ori_col));
                for (std::size_t c = 0; c < m.values.cols(); ++c) {
                    if (base > 0.0) {
                        std::snprintf(buf, sizeof(buf), "%.2f",
                                      (m.values.at(r, c) - base) / base * 100.0);
                        out << buf;
                    } else {
                        out << "n/a";
                    }
                    out << '|';
                }
                out << '\n';
            }
        }
    }
}

}  // namespace imbl
