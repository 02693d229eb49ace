#include <cstdio>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "imbl/experiment.hpp"
#include "imbl/integrated.hpp"
#include "imbl/pso.hpp"
#include "imbl/reference.hpp"
#include "imbl/resampling.hpp"
#include "imbl/stats.hpp"

#ifndef IMBL_FIXTURE_DIR
#define IMBL_FIXTURE_DIR "fixtures"
#endif

namespace {

using imbl::Label;

int cmd_gen(const imbl::SyntheticSpec& spec, const std::string& out) {
    imbl::Dataset ds = imbl::generate_synthetic(spec);
    imbl::CsvOptions csv;
    csv.label_column = "label";
    csv.positive_label = "malicious";
    csv.negative_label = "benign";
    imbl::save_csv(ds, out, csv);
    std::cerr << "wrote " << ds.size() << " rows (" << ds.count(Label::positive)
              << " positive) to " << out << "\n";
    return 0;
}

struct ResampleArgs {
    std::string method, input, label_col = "label", positive = "malicious", out;
    std::uint64_t seed = 0;
    std::size_t smote_k = 5;
    int smote_amount = 0;  // 0 = to balance
    std::size_t pso_iters = 100, pso_swarm = 40;
};

int cmd_resample(const ResampleArgs& args) {
    imbl::CsvOptions csv;
    csv.label_column = args.label_col;
    csv.positive_label = args.positive;
    const imbl::Dataset ds = imbl::load_csv(args.input, csv);
    ds.require_trainable();

    imbl::StrategyConfig st;
    st.name = args.method;
    st.kind = imbl::strategy_kind_from(args.method);
    st.smote_k = args.smote_k;
    st.smote_amount_pct = args.smote_amount;
    st.pso.swarm_size = args.pso_swarm;
    st.pso.max_iterations = args.pso_iters;
    st.pso.patience = std::max<std::size_t>(1, args.pso_iters / 5);
    st.pso.seed = args.seed;

    imbl::ResampleOutcome out;
    switch (st.kind) {
        case imbl::StrategyConfig::Kind::ori: out = imbl::identity(ds); break;
        case imbl::StrategyConfig::Kind::ru:
            out = imbl::random_undersample(ds, args.seed);
            break;
        case imbl::StrategyConfig::Kind::ro:
            out = imbl::random_oversample(ds, args.seed);
            break;
        case imbl::StrategyConfig::Kind::smote:
            out = args.smote_amount > 0
                      ? imbl::smote(ds, args.smote_amount, args.smote_k, args.seed)
                      : imbl::smote_to_target(ds, ds.count(Label::negative),
                                              args.smote_k, args.seed);
            break;
        case imbl::StrategyConfig::Kind::pso: {
            imbl::PsoConfig pso = st.pso;
            pso.target_ones = ds.count(Label::positive);
            const imbl::PsoResult r = imbl::pso_undersample(ds, pso);
            std::vector<std::size_t> keep = ds.indices_of(Label::positive);
            keep.insert(keep.end(), r.selected.begin(), r.selected.end());
            std::sort(keep.begin(), keep.end());
            out.dataset = ds.subset(keep);
            break;
        }
        case imbl::StrategyConfig::Kind::integrated: {
            imbl::IntegratedConfig cfg;
            cfg.smote_amount_pct = args.smote_amount > 0 ? args.smote_amount : 100;
            cfg.smote_k = args.smote_k;
            cfg.pso = st.pso;
            out = imbl::integrated_resample(ds, cfg, args.seed).resampled;
            break;
        }
    }
    imbl::save_csv(out.dataset, args.out, csv);
    std::cerr << "wrote " << out.dataset.size() << " rows ("
              << out.dataset.count(Label::positive) << " positive) to " << args.out
              << "\n";
    return 0;
}

int cmd_run(const std::string& config_path, std::size_t threads) {
    const imbl::ExperimentConfig cfg = imbl::parse_experiment_config(config_path);
    const imbl::ExperimentResult result = imbl::run_experiment(cfg, threads);
    imbl::write_result_files(result, cfg.output_dir);
    std::cerr << "results written to " << cfg.output_dir << "\n";
    return 0;
}

int cmd_stats_matrix(const std::string& matrix_path, bool higher_is_better,
                     const std::string& out_dir) {
    const imbl::ResultMatrix m = imbl::load_result_matrix(matrix_path, higher_is_better);
    const imbl::RankSummary ranks = imbl::friedman(m);
    const imbl::PosthocReport report = imbl::posthoc(ranks);

    std::ofstream rank_csv(out_dir + "/ranks.csv");
    rank_csv << "approach,mean_rank\n";
    for (std::size_t j = 0; j < ranks.mean_ranks.size(); ++j) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.17g", ranks.mean_ranks[j]);
        rank_csv << ranks.column_names[j] << ',' << buf << '\n';
    }
    std::ofstream ph_csv(out_dir + "/posthoc.csv");
    ph_csv << "comparison,z,p_raw,p_bonferroni,p_holm,p_hochberg\n";
    for (const auto& c : report.comparisons) {
        char buf[256];
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g,%.17g", c.z, c.p_raw,
                      c.p_bonferroni, c.p_holm, c.p_hochberg);
        ph_csv << report.control << " vs " << c.name << ',' << buf << '\n';
    }

    std::printf("Friedman chi2 = %.4f (p = %s), Iman-Davenport F = %.4f (p = %s)\n",
                ranks.friedman_chi2, imbl::format_p(ranks.friedman_p).c_str(),
                ranks.iman_davenport_f, imbl::format_p(ranks.iman_davenport_p).c_str());
    std::printf("control: %s (lowest mean rank)\n", report.control.c_str());
    for (std::size_t j = 0; j < ranks.mean_ranks.size(); ++j)
        std::printf("  rank %-12s %.4f\n", ranks.column_names[j].c_str(),
                    ranks.mean_ranks[j]);
    for (const auto& c : report.comparisons)
        std::printf("  %s vs %-12s z=%.3f  p=%s  bonf=%s holm=%s hochberg=%s\n",
                    report.control.c_str(), c.name.c_str(), c.z,
                    imbl::format_p(c.p_raw).c_str(),
                    imbl::format_p(c.p_bonferroni).c_str(),
                    imbl::format_p(c.p_holm).c_str(),
                    imbl::format_p(c.p_hochberg).c_str());
    if (!report.omnibus_significant)
        std::printf("note: omnibus test not significant at 0.05\n");
    return 0;
}

int cmd_stats_fixture(const std::string& fixture_dir) {
    const auto checks = imbl::check_fixtures(fixture_dir);
    imbl::print_fixture_checks(checks, std::cout);
    for (const auto& c : checks)
        if (!c.all_pass) return 3;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Imbalanced-classification resampling toolkit"};
    app.require_subcommand(1);

    // gen
    imbl::SyntheticSpec spec;
    spec.n_total = 2000;
    std::string gen_out;
    auto* gen = app.add_subcommand("gen", "Generate a synthetic imbalanced dataset");
    gen->add_option("--n", spec.n_total, "Total rows")->required();
    gen->add_option("--ratio", spec.majority_fraction, "Majority fraction in (0.5,1)")
        ->required();
    gen->add_option("--features", spec.d, "Feature count");
    gen->add_option("--separation", spec.class_separation, "Class mean separation");
    gen->add_option("--seed", spec.seed, "RNG seed");
    gen->add_option("--out", gen_out, "Output CSV path")->required();

    // resample
    ResampleArgs rs;
    auto* resample = app.add_subcommand("resample", "Apply one resampling strategy");
    resample->add_option("--method", rs.method, "ru|ro|smote|pso|integrated")
        ->required()
        ->check(CLI::IsMember({"ru", "ro", "smote", "pso", "integrated", "ori"}));
    resample->add_option("--input", rs.input, "Input CSV")->required();
    resample->add_option("--label-col", rs.label_col, "Label column name");
    resample->add_option("--positive", rs.positive, "Positive label value");
    resample->add_option("--seed", rs.seed, "RNG seed");
    resample->add_option("--out", rs.out, "Output CSV path")->required();
    resample->add_option("--smote-k", rs.smote_k, "SMOTE neighbour count");
    resample->add_option("--smote-amount", rs.smote_amount,
                         "SMOTE amount %% (multiple of 100; 0 = to balance)");
    resample->add_option("--pso-iters", rs.pso_iters, "PSO iteration cap");
    resample->add_option("--pso-swarm", rs.pso_swarm, "PSO swarm size");

    // run
    std::string config_path;
    std::size_t threads = 1;
    auto* run = app.add_subcommand("run", "Run a strategy x classifier grid");
    run->add_option("--config", config_path, "Experiment config file")->required();
    run->add_option("--threads", threads, "Worker threads (output is identical)");

    // stats
    std::string matrix_path, fixture, stats_out = ".";
    std::string fixture_dir = IMBL_FIXTURE_DIR;
    bool higher_is_better = false;
    auto* stats = app.add_subcommand("stats", "Friedman omnibus + post-hoc tests");
    auto* matrix_opt = stats->add_option("--matrix", matrix_path, "Result matrix CSV");
    stats->add_flag("--higher-is-better", higher_is_better,
                    "Larger values rank better");
    auto* fixture_opt =
        stats->add_option("--fixture", fixture,
                          "Run the bundled published-table fixtures ('paper')");
    stats->add_option("--fixture-dir", fixture_dir, "Fixture CSV directory");
    stats->add_option("--out-dir", stats_out, "Where to write ranks/posthoc CSVs");
    matrix_opt->excludes(fixture_opt);

    // report
    std::string results_dir, report_out;
    auto* report = app.add_subcommand("report", "Markdown summary of a grid run");
    report->add_option("--results", results_dir, "Results directory")->required();
    report->add_option("--out", report_out, "Output markdown path")->required();

    try {
        app.parse(argc, argv);
        if (gen->parsed()) return cmd_gen(spec, gen_out);
        if (resample->parsed()) return cmd_resample(rs);
        if (run->parsed()) return cmd_run(config_path, threads);
        if (stats->parsed()) {
            if (!fixture.empty()) {
                if (fixture != "paper")
                    throw CLI::ValidationError("--fixture", "only 'paper' is bundled");
                return cmd_stats_fixture(fixture_dir);
            }
            if (matrix_path.empty())
                throw CLI::ValidationError("stats", "need --matrix or --fixture");
            return cmd_stats_matrix(matrix_path, higher_is_better, stats_out);
        }
        if (report->parsed()) {
            imbl::write_report(results_dir, report_out);
            return 0;
        }
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const imbl::DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 3;
    }
    return 1;
}
