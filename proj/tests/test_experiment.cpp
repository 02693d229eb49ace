#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "imbl/experiment.hpp"
#include "imbl/rng.hpp"

using namespace imbl;

namespace {

std::string write_temp(const std::string& name, const std::string& content) {
    const std::string path =
        (std::filesystem::temp_directory_path() / name).string();
    std::ofstream(path) << content;
    return path;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

const char* kSmallConfig = R"(# small grid
[experiment]
folds = 5
master_seed = 11

[dataset toy]
synthetic_n = 150
synthetic_ratio = 0.8
synthetic_features = 4
synthetic_separation = 2.0
synthetic_seed = 3

[strategy ori]
[strategy ru]

[classifier knn]
k = 5
[classifier gnb]
[classifier tree]
max_depth = 5
)";

bool same_report(const MetricReport& a, const MetricReport& b) {
    return a.accuracy == b.accuracy && a.precision == b.precision &&
           a.recall == b.recall && a.tn_rate == b.tn_rate &&
           a.fp_rate == b.fp_rate && a.f_measure == b.f_measure &&
           a.gmean == b.gmean && a.auc == b.auc;
}

}  // namespace

TEST_CASE("config parsing fills the whole grid description") {
    const ExperimentConfig cfg =
        parse_experiment_config(write_temp("grid.cfg", kSmallConfig));
    CHECK(cfg.folds == 5);
    CHECK(cfg.master_seed == 11);
    REQUIRE(cfg.datasets.size() == 1);
    CHECK(cfg.datasets[0].name == "toy");
    CHECK(cfg.datasets[0].synthetic.n_total == 150);
    REQUIRE(cfg.strategies.size() == 2);
    CHECK(cfg.strategies[0].kind == StrategyConfig::Kind::ori);
    CHECK(cfg.strategies[1].kind == StrategyConfig::Kind::ru);
    REQUIRE(cfg.classifiers.size() == 3);
    CHECK(cfg.classifiers[0].spec.params.at("k") == 5);
    CHECK(cfg.config_hash != 0);
}

TEST_CASE("config parsing rejects malformed input") {
    CHECK_THROWS_AS(parse_experiment_config("/nonexistent.cfg"), DataError);
    CHECK_THROWS_AS(
        parse_experiment_config(write_temp(
            "bad1.cfg", "[experiment]\nbogus_key = 1\n")),
        DataError);
    CHECK_THROWS_AS(
        parse_experiment_config(write_temp("bad2.cfg", "[mystery]\nx = 1\n")),
        DataError);
    CHECK_THROWS_AS(
        parse_experiment_config(write_temp("bad3.cfg", "key_outside_section = 1\n")),
        DataError);
    CHECK_THROWS_AS(
        parse_experiment_config(write_temp(
            "bad4.cfg",
            "[dataset a]\nsynthetic_n = 100\n[dataset a]\nsynthetic_n = 100\n"
            "[strategy ori]\n[classifier knn]\n")),
        DataError);
    CHECK_THROWS_AS(
        parse_experiment_config(write_temp(
            "bad5.cfg", "[experiment]\nfolds = 10\n")),  // nothing to run
        DataError);
    CHECK_THROWS_AS(
        parse_experiment_config(write_temp(
            "bad6.cfg", "[dataset a]\nsynthetic_n = abc\n")),
        DataError);
}

TEST_CASE("a 2-strategy 3-classifier grid yields folds*6 reports") {
    const ExperimentConfig cfg =
        parse_experiment_config(write_temp("grid.cfg", kSmallConfig));
    const ExperimentResult result = run_experiment(cfg);
    CHECK(result.fold_reports.size() == 2 * 3 * 5);
    CHECK(result.folds == 5);
    // means agree with aggregate_folds over the cell
    for (std::size_t c = 0; c < 3; ++c)
        for (std::size_t s = 0; s < 2; ++s) {
            std::vector<MetricReport> cell;
            for (std::size_t f = 0; f < 5; ++f) cell.push_back(result.at(0, c, s, f));
            CHECK(same_report(result.mean(0, c, s), aggregate_folds(cell)));
        }
}

TEST_CASE("the ori strategy equals a hand-rolled CV loop bit for bit") {
    const ExperimentConfig cfg =
        parse_experiment_config(write_temp("grid.cfg", kSmallConfig));
    const ExperimentResult result = run_experiment(cfg);

    const Dataset ds = cfg.datasets[0].materialize();
    const FoldPlan plan = stratified_folds(
        ds, cfg.folds, derive_seed(cfg.master_seed, hash_str("toy")));
    for (std::size_t f = 0; f < cfg.folds; ++f) {
        Dataset train = ds.subset(plan.complement_rows(f));
        const StandardizationParams scale = standardize_fit(train);
        train = standardize_apply(scale, train);
        const Dataset test = standardize_apply(scale, ds.subset(plan.fold_rows(f)));
        for (std::size_t c = 0; c < cfg.classifiers.size(); ++c) {
            // knn/gnb/tree ignore the seed, so the runner's per-cell seeding
            // cannot make this comparison diverge
            const auto model = imbl::train(cfg.classifiers[c].spec, train);
            const MetricReport direct =
                score(confusion(model->predict(test.features), test.labels));
            CHECK(same_report(direct, result.at(0, c, 0, f)));
        }
    }
}

TEST_CASE("no test row leaks into any resampled training set") {
    const std::string config = R"(
[experiment]
folds = 4
master_seed = 5

[dataset leaky]
synthetic_n = 160
synthetic_ratio = 0.75
synthetic_features = 3
synthetic_seed = 8

[strategy ori]
[strategy ru]
[strategy ro]
[strategy smote]
smote_k = 3
[strategy integrated]
smote_k = 3
pso_swarm = 6
pso_iters = 2
pso_patience = 2

[classifier knn]
)";
    const ExperimentConfig cfg =
        parse_experiment_config(write_temp("leak.cfg", config));
    const ExperimentResult result = run_experiment(cfg);
    const std::size_t nf = cfg.folds, ns = cfg.strategies.size();
    for (std::size_t f = 0; f < nf; ++f) {
        const std::set<std::size_t> test_rows(result.test_identities[f].begin(),
                                              result.test_identities[f].end());
        for (std::size_t s = 0; s < ns; ++s) {
            const auto& train_ids = result.train_identities[s * nf + f];
            CHECK(!train_ids.empty());
            for (std::size_t id : train_ids) CHECK(test_rows.count(id) == 0);
        }
    }
}

TEST_CASE("result files are byte-identical across thread counts") {
    const ExperimentConfig base =
        parse_experiment_config(write_temp("grid.cfg", kSmallConfig));
    ExperimentConfig cfg = base;
    const auto tmp = std::filesystem::temp_directory_path();

    cfg.output_dir = (tmp / "det_a").string();
    write_result_files(run_experiment(cfg, 1), cfg.output_dir);
    cfg.output_dir = (tmp / "det_b").string();
    write_result_files(run_experiment(cfg, 3), cfg.output_dir);

    for (const char* name : {"results_folds.csv", "results_mean.csv", "table_fm.csv",
                             "table_gmean.csv", "table_auc.csv"}) {
        const std::string a = read_file((tmp / "det_a" / name).string());
        const std::string b = read_file((tmp / "det_b" / name).string());
        CHECK(!a.empty());
        CHECK(a == b);
    }
}

TEST_CASE("emit_table follows config strategy order and grid shape") {
    const ExperimentConfig cfg =
        parse_experiment_config(write_temp("grid.cfg", kSmallConfig));
    const ExperimentResult result = run_experiment(cfg);
    const ResultMatrix m = emit_table(result, TableMetric::gmean);
    CHECK(m.column_names == std::vector<std::string>{"ori", "ru"});
    CHECK(m.values.rows() == 3);  // dataset x classifier cases
    CHECK(m.row_names[0] == "toy.knn");
    for (std::size_t r = 0; r < m.values.rows(); ++r)
        for (std::size_t c = 0; c < m.values.cols(); ++c) {
            CHECK(m.values.at(r, c) >= 0.0);
            CHECK(m.values.at(r, c) <= 1.0);
        }
}

TEST_CASE("a failing cell names its grid coordinates") {
    const std::string config = R"(
[experiment]
folds = 3
master_seed = 1

[dataset tiny]
synthetic_n = 40
synthetic_ratio = 0.75
synthetic_features = 2
synthetic_seed = 2

[strategy smote]
smote_k = 25

[classifier knn]
)";
    const ExperimentConfig cfg =
        parse_experiment_config(write_temp("fail.cfg", config));
    try {
        run_experiment(cfg);
        FAIL("expected DataError");
    } catch (const DataError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("tiny") != std::string::npos);
        CHECK(msg.find("smote") != std::string::npos);
        CHECK(msg.find("fold") != std::string::npos);
    }
}
