// Command-line entry point: dataset generation, training, and the
// verification suites.
#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>

#include "ca/data.hpp"
#include "ca/encoder.hpp"
#include "ca/trainer.hpp"
#include "ca/verify.hpp"

using nlohmann::json;

namespace {

struct GenerateArgs {
    int k = 10, dim = 16, n = 10000;
    double sep = 6.0, stddev = 1.0;
    std::uint64_t seed = 0;
    std::string imbalance = "none";
    std::string out = "dataset.csv";
};

struct TrainArgs {
    std::string data;
    std::string method = "ca";
    std::string out_prefix = "run";
    std::string encoder = "mlp";
    std::string prior_csv;  // comma-separated explicit prior
    ca::TrainConfig cfg;
};

ca::GmmSpec spec_from_args(const GenerateArgs& a) {
    ca::GmmSpec spec = ca::GmmSpec::desk_default(a.seed);
    if (a.k != 10 || a.dim != 16 || a.sep != 6.0 || a.stddev != 1.0) {
        spec.k = a.k;
        spec.d = a.dim;
        spec.stddev = a.stddev;
        spec.weights = ca::Vector::Constant(a.k, 1.0 / a.k);
        std::mt19937_64 rng(a.seed ^ 0x9e3779b97f4a7c15ULL);
        std::normal_distribution<double> gauss(0.0, 1.0);
        spec.means.resize(a.k, a.dim);
        for (int j = 0; j < a.k; ++j) {
            ca::Vector dir(a.dim);
            for (int c = 0; c < a.dim; ++c) dir[c] = gauss(rng);
            spec.means.row(j) = a.sep * dir.transpose() / dir.norm();
        }
    }
    return spec;
}

void write_manifest(const std::string& path, const std::vector<std::pair<std::string, std::string>>& kv) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path);
    for (const auto& [k, v] : kv) f << k << '=' << v << '\n';
}

int cmd_generate(const GenerateArgs& a) {
    const ca::GmmSpec spec = spec_from_args(a);
    ca::LabeledDataset dataset = ca::gmm_generate(spec, a.n);
    ca::Prior prior = ca::Prior::uniform(a.k);
    if (a.imbalance != "none") {
        const int level = std::stoi(a.imbalance);
        const ca::ImbalanceSchedule sched = level == 1   ? ca::ImbalanceSchedule::Imb1
                                            : level == 2 ? ca::ImbalanceSchedule::Imb2
                                                         : ca::ImbalanceSchedule::Imb3;
        auto res = ca::apply_imbalance(dataset, ca::imbalance_keep_probs(sched, a.k), a.seed + 1);
        dataset = std::move(res.dataset);
        prior = res.prior;
    }
    ca::save_csv(dataset, a.out);

    std::ostringstream prior_str;
    for (int j = 0; j < prior.k(); ++j) prior_str << (j ? "," : "") << prior.probs[j];
    write_manifest(a.out + ".manifest",
                   {{"k", std::to_string(a.k)},
                    {"dim", std::to_string(a.dim)},
                    {"n", std::to_string(dataset.n())},
                    {"sep", std::to_string(a.sep)},
                    {"stddev", std::to_string(a.stddev)},
                    {"seed", std::to_string(a.seed)},
                    {"imbalance", a.imbalance},
                    {"prior", prior_str.str()}});
    std::cout << "wrote " << dataset.n() << " rows to " << a.out << "\n";
    return 0;
}

json epoch_to_json(const ca::EpochReport& r) {
    json j;
    j["epoch"] = r.epoch;
    j["loss"] = r.mean_loss;
    j["acc"] = r.metrics.acc;
    j["nmi"] = r.metrics.nmi;
    j["ari"] = r.metrics.ari;
    j["kl_star_hard"] = r.metrics.kl_star_hard;
    j["kl_star_soft"] = r.metrics.kl_star_soft;
    j["hard_counts"] = r.hard_counts;
    std::vector<double> soft(r.soft_counts.data(), r.soft_counts.data() + r.soft_counts.size());
    j["soft_counts"] = soft;
    return j;
}

int cmd_train(TrainArgs& a) {
    const ca::LabeledDataset dataset = ca::load_csv(a.data);
    a.cfg.method = ca::method_from_name(a.method);
    if (a.encoder == "identity") a.cfg.encoder = ca::EncoderKind::Identity;
    else if (a.encoder == "linear") a.cfg.encoder = ca::EncoderKind::Linear;
    else if (a.encoder == "mlp") a.cfg.encoder = ca::EncoderKind::Mlp;
    else throw CLI::ValidationError("--encoder", "must be identity|linear|mlp");
    if (!a.prior_csv.empty()) {
        std::vector<double> p;
        std::istringstream ps(a.prior_csv);
        std::string cell;
        while (std::getline(ps, cell, ',')) p.push_back(std::stod(cell));
        a.cfg.prior_probs = Eigen::Map<ca::Vector>(p.data(), p.size());
    }
    const int k = dataset.k > 0 ? dataset.k
                                : (a.cfg.prior_probs ? static_cast<int>(a.cfg.prior_probs->size())
                                                     : 10);

    ca::Trainer trainer(a.cfg, dataset.dim(), k);
    std::ofstream jsonl(a.out_prefix + ".jsonl");
    const ca::TrainResult result = trainer.train_epochs(dataset);
    for (const auto& r : result.epochs) jsonl << epoch_to_json(r).dump() << '\n';

    std::ofstream summary(a.out_prefix + ".summary.txt");
    summary << "method: " << a.method << "\n"
            << "best epoch: " << result.best.epoch << "\n"
            << "acc: " << result.best.metrics.acc << "\n"
            << "nmi: " << result.best.metrics.nmi << "\n"
            << "ari: " << result.best.metrics.ari << "\n"
            << "kl_star_hard: " << result.best.metrics.kl_star_hard << "\n"
            << "kl_star_soft: " << result.best.metrics.kl_star_soft << "\n";
    ca::save_checkpoint(a.out_prefix + ".ckpt", trainer.encoder(), trainer.model());
    std::cout << "best acc=" << result.best.metrics.acc << " nmi=" << result.best.metrics.nmi
              << " ari=" << result.best.metrics.ari
              << " kl*=" << result.best.metrics.kl_star_hard << "\n";
    return 0;
}

int cmd_verify(const std::vector<std::string>& suites, int n_max, const std::string& report_path) {
    std::vector<ca::verify::SuiteResult> results;
    auto want = [&](const std::string& name) {
        return suites.empty() || std::find(suites.begin(), suites.end(), name) != suites.end();
    };
    if (want("d-matrices")) results.push_back(ca::verify::suite_d_matrices());
    if (want("penalty-bound")) results.push_back(ca::verify::suite_penalty_bound(n_max));
    if (want("equivalence")) results.push_back(ca::verify::suite_equivalence());
    if (want("oracle")) results.push_back(ca::verify::suite_oracle());
    if (want("sinkhorn")) results.push_back(ca::verify::suite_sinkhorn());
    if (want("metric-oracles")) results.push_back(ca::verify::suite_metric_oracles());
    if (want("grad-checks")) results.push_back(ca::verify::suite_grad_checks());
    if (want("hard-soft-gap")) results.push_back(ca::verify::suite_hard_soft_gap());

    bool all_ok = true;
    json report = json::array();
    for (const auto& r : results) {
        all_ok = all_ok && r.passed;
        std::printf("[%s] %-15s %ld checks, %ld failures%s%s\n", r.passed ? "PASS" : "FAIL",
                    r.name.c_str(), r.checks, r.failures, r.detail.empty() ? "" : " -- ",
                    r.detail.c_str());
        report.push_back({{"suite", r.name},
                          {"passed", r.passed},
                          {"checks", r.checks},
                          {"failures", r.failures},
                          {"detail", r.detail}});
    }
    if (!report_path.empty()) {
        std::ofstream f(report_path);
        f << report.dump(2) << '\n';
    }
    return all_ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"combination-assignment online clustering"};
    app.require_subcommand(1);

    GenerateArgs gen;
    auto* sub_gen = app.add_subcommand("generate", "generate a synthetic Gaussian-mixture CSV");
    sub_gen->add_option("--k", gen.k, "number of clusters")->check(CLI::PositiveNumber);
    sub_gen->add_option("--dim", gen.dim, "feature dimension")->check(CLI::PositiveNumber);
    sub_gen->add_option("--n", gen.n, "number of points")->check(CLI::PositiveNumber);
    sub_gen->add_option("--sep", gen.sep, "centroid radius");
    sub_gen->add_option("--stddev", gen.stddev, "component stddev");
    sub_gen->add_option("--seed", gen.seed, "RNG seed");
    sub_gen->add_option("--imbalance", gen.imbalance, "1|2|3|none");
    sub_gen->add_option("--out", gen.out, "output CSV path");

    TrainArgs tr;
    auto* sub_tr = app.add_subcommand("train", "train a clustering model on a CSV dataset");
    sub_tr->add_option("--data", tr.data, "dataset CSV")->required();
    sub_tr->add_option("--method", tr.method, "ca|sk|ent|ss|varm|noreg");
    sub_tr->add_option("--epochs", tr.cfg.epochs)->check(CLI::PositiveNumber);
    sub_tr->add_option("--batch-size", tr.cfg.batch_size)->check(CLI::PositiveNumber);
    sub_tr->add_option("--nz", tr.cfg.nz)->check(CLI::PositiveNumber);
    sub_tr->add_option("--hidden", tr.cfg.hidden)->check(CLI::PositiveNumber);
    sub_tr->add_option("--sigma", tr.cfg.sigma)->check(CLI::PositiveNumber);
    sub_tr->add_option("--lr", tr.cfg.lr)->check(CLI::PositiveNumber);
    sub_tr->add_option("--lr-centroids", tr.cfg.lr_centroids);
    sub_tr->add_option("--seed", tr.cfg.seed);
    sub_tr->add_option("--encoder", tr.encoder, "identity|linear|mlp");
    sub_tr->add_option("--prior", tr.prior_csv, "explicit prior, comma-separated");
    sub_tr->add_flag("--warm-start", tr.cfg.warm_start);
    sub_tr->add_flag("--keep-counts", tr.cfg.keep_counts_across_batches);
    sub_tr->add_flag("--estimate-covars", tr.cfg.estimate_covars);
    sub_tr->add_option("--w-ent", tr.cfg.w_ent);
    sub_tr->add_option("--w-reg", tr.cfg.w_reg);
    sub_tr->add_option("--w-point", tr.cfg.w_point);
    sub_tr->add_option("--sk-eps", tr.cfg.sk_eps)->check(CLI::PositiveNumber);
    sub_tr->add_option("--sk-iters", tr.cfg.sk_iters)->check(CLI::PositiveNumber);
    sub_tr->add_option("--out", tr.out_prefix, "output prefix");

    std::vector<std::string> suites;
    int n_max = 30;
    std::string report_path;
    auto* sub_ver = app.add_subcommand("verify", "run the property/oracle suites");
    sub_ver->add_option("--suite", suites,
                        "suite names (default all): d-matrices penalty-bound equivalence oracle "
                        "sinkhorn metric-oracles grad-checks hard-soft-gap");
    sub_ver->add_option("--n-max", n_max, "penalty-bound sweep limit");
    sub_ver->add_option("--report", report_path, "write JSON report here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (sub_gen->parsed()) return cmd_generate(gen);
        if (sub_tr->parsed()) return cmd_train(tr);
        if (sub_ver->parsed()) return cmd_verify(suites, n_max, report_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
