// ricmatch: batch front-end for trace generation, training, the three
// experiment sweeps, heterogeneity scoring, and SVG report emission.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ricmatch/experiments.hpp"
#include "ricmatch/matching.hpp"
#include "ricmatch/netcost.hpp"
#include "ricmatch/nn.hpp"
#include "ricmatch/preprocess.hpp"
#include "ricmatch/svg.hpp"
#include "ricmatch/trace.hpp"
#include "ricmatch/xapp.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace ricmatch;

namespace {

std::uint64_t env_seed_fallback() {
    const char* env = std::getenv("RICMATCH_SEED");
    return env ? std::strtoull(env, nullptr, 10) : 0ULL;
}

TraceKind sniff_kind(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open trace file '" + path + "'");
    std::string header;
    std::getline(in, header);
    if (!header.empty() && header.back() == '\r') header.pop_back();
    if (header.rfind("ru_id,slice,", 0) == 0) return TraceKind::PerUe;
    if (header.rfind("ru_id,mcs,", 0) == 0) return TraceKind::PerRu;
    throw DataError("unrecognized trace header in '" + path + "'");
}

Trace load_trace(const std::string& path) { return parse_csv_file(path, sniff_kind(path)); }

std::vector<double> parse_real_list(const std::string& text) {
    std::vector<double> out;
    // "a:b:n" expands to n evenly spaced values from a to b inclusive.
    if (std::count(text.begin(), text.end(), ':') == 2) {
        double a = 0, b = 0;
        int n = 0;
        if (std::sscanf(text.c_str(), "%lf:%lf:%d", &a, &b, &n) != 3 || n < 1)
            throw DataError("bad range '" + text + "' (expected a:b:n)");
        for (int i = 0; i < n; ++i)
            out.push_back(n == 1 ? a : a + (b - a) * i / static_cast<double>(n - 1));
        return out;
    }
    std::stringstream ss(text);
    std::string field;
    while (std::getline(ss, field, ',')) {
        try {
            out.push_back(std::stod(field));
        } catch (const std::exception&) {
            throw DataError("bad numeric list entry '" + field + "'");
        }
    }
    if (out.empty()) throw DataError("empty numeric list '" + text + "'");
    return out;
}

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
    std::vector<std::uint64_t> out;
    std::stringstream ss(text);
    std::string field;
    while (std::getline(ss, field, ',')) {
        try {
            out.push_back(std::stoull(field));
        } catch (const std::exception&) {
            throw DataError("bad seed '" + field + "'");
        }
    }
    if (out.empty()) throw DataError("empty seed list");
    return out;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write '" + path.string() + "'");
    out << content;
}

std::vector<MatchingPlan> resolve_plans(const std::string& spec, const Trace& trace,
                                        const std::string& target_ru) {
    std::vector<MatchingPlan> plans;
    if (spec == "all-singles+hoard" || spec == "all-singles") {
        for (const auto& ru : trace.ru_ids)
            plans.push_back(plan_choose_single(ru, target_ru, trace.ru_ids));
        if (spec == "all-singles+hoard") plans.push_back(plan_hoard(trace.ru_ids));
    } else if (spec == "hoard") {
        plans.push_back(plan_hoard(trace.ru_ids));
    } else if (spec.rfind("choose:", 0) == 0) {
        plans.push_back(plan_choose_single(spec.substr(7), target_ru, trace.ru_ids));
    } else {
        // A plan JSON file; may contain one plan object or a list of them.
        const json j = json::parse(read_file(spec), nullptr, false);
        if (j.is_discarded()) throw DataError("bad plan file '" + spec + "'");
        if (j.is_array()) {
            for (const auto& item : j) plans.push_back(plan_from_json(item.dump(), trace.ru_ids));
        } else {
            plans.push_back(plan_from_json(j.dump(), trace.ru_ids));
        }
    }
    return plans;
}

// Shared sweep flags; JSON config supplies defaults, explicit flags win.
struct SweepArgs {
    std::string trace_path;
    std::string target_ru;
    std::string plans_spec = "all-singles+hoard";
    std::string config_path;
    std::string out_dir = "out";
    std::string x_spec;
    std::string seeds_spec = "1";
    double learning_rate = 1e-3;
    int epochs = 100;
    std::size_t batch_size = 512;
    int jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    bool no_svg = false;
};

void add_sweep_flags(CLI::App* cmd, SweepArgs& args, const char* x_name, const char* x_desc) {
    cmd->add_option("--trace", args.trace_path, "input trace CSV")->required();
    cmd->add_option("--target", args.target_ru, "target RU id")->required();
    cmd->add_option("--plans", args.plans_spec,
                    "all-singles+hoard | all-singles | hoard | choose:RU | plan JSON file");
    cmd->add_option("--config", args.config_path, "JSON config file (flags override it)");
    cmd->add_option("--out", args.out_dir, "output directory");
    cmd->add_option(x_name, args.x_spec, x_desc)->required();
    cmd->add_option("--seeds", args.seeds_spec, "comma-separated seeds");
    cmd->add_option("--lr", args.learning_rate, "learning rate");
    cmd->add_option("--epochs", args.epochs, "max epochs per point");
    cmd->add_option("--batch", args.batch_size, "mini-batch size");
    cmd->add_option("--jobs", args.jobs, "parallel sweep points");
    cmd->add_flag("--no-svg", args.no_svg, "skip chart emission");
}

SweepConfig build_sweep_config(const SweepArgs& args, const Trace& trace, const CLI::App* cmd) {
    SweepConfig cfg;
    cfg.target_ru = args.target_ru;
    cfg.plans = resolve_plans(args.plans_spec, trace, args.target_ru);
    cfg.x_values = parse_real_list(args.x_spec);
    cfg.seeds = parse_seed_list(args.seeds_spec);
    cfg.train.learning_rate = args.learning_rate;
    cfg.train.max_epochs = args.epochs;
    cfg.train.batch_size = args.batch_size;
    cfg.jobs = args.jobs;

    if (!args.config_path.empty()) {
        const json j = json::parse(read_file(args.config_path), nullptr, false);
        if (j.is_discarded()) throw DataError("bad config JSON '" + args.config_path + "'");
        if (j.contains("links")) {
            const auto& l = j["links"];
            cfg.links.default_bandwidth_bps = l.value("bandwidth_bps", cfg.links.default_bandwidth_bps);
            cfg.links.default_base_latency_s =
                l.value("base_latency_s", cfg.links.default_base_latency_s);
            cfg.links.record_size_bytes = l.value("record_size_bytes", cfg.links.record_size_bytes);
            if (l.contains("per_ru")) {
                for (const auto& [ru, entry] : l["per_ru"].items()) {
                    if (entry.contains("bandwidth_bps"))
                        cfg.links.bandwidth_bps[ru] = entry["bandwidth_bps"].get<double>();
                    if (entry.contains("base_latency_s"))
                        cfg.links.base_latency_s[ru] = entry["base_latency_s"].get<double>();
                }
            }
        }
        if (j.contains("compute")) {
            cfg.compute.c_per_sample_s = j["compute"].value("c_per_sample_s", cfg.compute.c_per_sample_s);
            cfg.compute.c_fixed_s = j["compute"].value("c_fixed_s", cfg.compute.c_fixed_s);
        }
        if (j.contains("train")) {
            const auto& t = j["train"];
            if (!cmd->count("--lr")) cfg.train.learning_rate = t.value("learning_rate", cfg.train.learning_rate);
            if (!cmd->count("--epochs")) cfg.train.max_epochs = t.value("max_epochs", cfg.train.max_epochs);
            if (!cmd->count("--batch")) cfg.train.batch_size = t.value("batch_size", cfg.train.batch_size);
        }
    }
    return cfg;
}

json run_echo(const std::string& command, const SweepConfig& cfg, const SweepArgs& args) {
    json j;
    j["command"] = command;
    j["trace"] = args.trace_path;
    j["target_ru"] = cfg.target_ru;
    j["x_values"] = cfg.x_values;
    j["seeds"] = cfg.seeds;
    j["train"] = {{"learning_rate", cfg.train.learning_rate},
                  {"max_epochs", cfg.train.max_epochs},
                  {"batch_size", cfg.train.batch_size}};
    j["links"] = {{"default_bandwidth_bps", cfg.links.default_bandwidth_bps},
                  {"default_base_latency_s", cfg.links.default_base_latency_s},
                  {"record_size_bytes", cfg.links.record_size_bytes}};
    j["compute"] = {{"c_per_sample_s", cfg.compute.c_per_sample_s},
                    {"c_fixed_s", cfg.compute.c_fixed_s}};
    j["jobs"] = args.jobs;
    j["plans"] = json::array();
    for (const auto& plan : cfg.plans) j["plans"].push_back(json::parse(plan_to_json(plan)));
    return j;
}

void emit_sweep_outputs(const SweepResult& result, const SweepArgs& args, const json& echo) {
    const fs::path dir(args.out_dir);
    write_file(dir / "result.csv", sweep_csv(result));
    write_file(dir / "summary.json", sweep_summary_json(result) + "\n");
    write_file(dir / "run.json", echo.dump(2) + "\n");
    if (!args.no_svg) write_file(dir / "chart.svg", sweep_chart_svg(result));
    std::cout << "wrote " << (dir / "result.csv").string() << " (" << result.points.size()
              << " points)\n";
}

int cmd_gen(const std::string& mode, int rus, int samples, std::uint64_t seed,
            const std::string& lambdas, const std::string& betas, double p0, double noise,
            const std::string& out_path) {
    GenConfig cfg;
    cfg.n_rus = rus;
    cfg.samples_per_ru = samples;
    cfg.seed = seed;
    cfg.zero_prob = p0;
    cfg.noise_sigma = noise;
    if (!lambdas.empty()) cfg.load_scale = parse_real_list(lambdas);
    if (!betas.empty()) cfg.spectral_bias = parse_real_list(betas);

    Trace trace;
    if (mode == "homo") {
        trace = gen_homogeneous(cfg);
    } else if (mode == "hetero") {
        trace = gen_heterogeneous(cfg);
    } else {
        throw DataError("unknown --mode '" + mode + "' (expected homo|hetero)");
    }
    write_file(out_path, write_csv(trace));

    json echo;
    echo["command"] = "gen";
    echo["mode"] = mode;
    echo["n_rus"] = cfg.n_rus;
    echo["samples_per_ru"] = cfg.samples_per_ru;
    echo["seed"] = cfg.seed;
    echo["zero_prob"] = cfg.zero_prob;
    echo["noise_sigma"] = cfg.noise_sigma;
    echo["load_scale"] = cfg.load_scale.empty() ? std::vector<double>(rus, 1.0) : cfg.load_scale;
    echo["spectral_bias"] =
        cfg.spectral_bias.empty() ? std::vector<double>(rus, 1.0) : cfg.spectral_bias;
    echo["out"] = out_path;
    write_file(out_path + ".run.json", echo.dump(2) + "\n");
    std::cout << "wrote " << out_path << " (" << trace.size() << " rows)\n";
    return 0;
}

int cmd_train(const std::string& trace_path, const std::string& target_ru,
              const std::string& plan_spec, double lr, int epochs, std::size_t batch,
              std::uint64_t seed, const std::string& out_dir) {
    const Trace trace = load_trace(trace_path);
    const auto plans = resolve_plans(plan_spec, trace, target_ru);
    if (plans.size() != 1) throw DataError("train: expected exactly one plan");
    const MatchingPlan& plan = plans.front();

    const InstanceSpec* inst = nullptr;
    for (const auto& candidate : plan.instances)
        for (const auto& ru : candidate.serving)
            if (ru == target_ru) inst = &candidate;
    if (!inst) throw DataError("train: no instance serves target RU '" + target_ru + "'");

    InstanceData data = build_instance_data(trace, *inst, target_ru, 1.0, seed);
    TrainConfig cfg;
    cfg.learning_rate = lr;
    cfg.max_epochs = epochs;
    cfg.batch_size = batch;
    cfg.seed = seed;
    const Network initial = init_network(default_spec_for(trace), seed);
    auto [best, report] = train(initial, data.train, data.val, cfg);

    const fs::path dir(out_dir);
    write_file(dir / "checkpoint.json",
               network_to_json(best, data.norm, data.val.targets.scale_factor) + "\n");

    json jr;
    jr["epochs_completed"] = report.epochs_completed;
    jr["best_epoch"] = report.best_epoch;
    jr["best_val_mape_percent"] = report.best_val_mape;
    jr["train_mse"] = report.train_mse;
    jr["val_mape_percent"] = report.val_mape;
    jr["epoch_time_s"] = report.epoch_time_s;
    write_file(dir / "report.json", jr.dump(2) + "\n");

    json echo;
    echo["command"] = "train";
    echo["trace"] = trace_path;
    echo["target_ru"] = target_ru;
    echo["plan"] = json::parse(plan_to_json(plan));
    echo["train"] = {{"learning_rate", lr}, {"max_epochs", epochs}, {"batch_size", batch}};
    echo["seed"] = seed;
    write_file(dir / "run.json", echo.dump(2) + "\n");

    std::cout << "best validation MAPE " << report.best_val_mape << "% at epoch "
              << report.best_epoch + 1 << "\n";
    return 0;
}

int cmd_hetero(const std::string& trace_path, const std::string& out_path) {
    const Trace trace = load_trace(trace_path);
    const double score = heterogeneity_score(trace);
    char line[64];
    std::snprintf(line, sizeof(line), "heterogeneity_score=%.9g", score);
    std::cout << line << "\n";
    json j;
    j["trace"] = trace_path;
    j["n_rus"] = trace.ru_ids.size();
    j["n_records"] = trace.size();
    j["heterogeneity_score"] = score;
    write_file(out_path, j.dump(2) + "\n");
    return 0;
}

int cmd_report(const std::string& in_dir, const std::string& out_path) {
    const fs::path dir(in_dir);
    const std::string summary_text = read_file((dir / "summary.json").string());
    const json summary = json::parse(summary_text, nullptr, false);
    if (summary.is_discarded()) throw DataError("malformed summary.json in '" + in_dir + "'");

    SweepResult result;
    result.sweep_kind = summary.value("sweep", "data_fraction");
    result.metric_is_accuracy = summary.value("metric", "") == "accuracy_percent";

    // Reload points from result.csv.
    std::istringstream csv(read_file((dir / "result.csv").string()));
    std::string line;
    if (!std::getline(csv, line)) throw DataError("empty result.csv in '" + in_dir + "'");
    const bool has_confusion = line.find(",tp,") != std::string::npos;
    result.has_confusion = has_confusion;
    std::size_t line_no = 1;
    while (std::getline(csv, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string field;
        std::vector<std::string> f;
        while (std::getline(ss, field, ',')) f.push_back(field);
        const std::size_t want = has_confusion ? 12 : 8;
        if (f.size() != want)
            throw DataError("malformed result.csv row at line " + std::to_string(line_no));
        try {
            CurvePoint p;
            p.plan_id = f[0];
            p.x = std::stod(f[1]);
            p.seed = std::stoull(f[2]);
            p.metric = std::stod(f[3]);
            p.bytes_moved = std::stoll(f[4]);
            p.transfer_delay_s = std::stod(f[5]);
            p.epochs = std::stoi(f[6]);
            if (has_confusion) {
                p.tp = std::stoll(f[7]);
                p.tn = std::stoll(f[8]);
                p.fp = std::stoll(f[9]);
                p.fn = std::stoll(f[10]);
            }
            p.skipped = std::stoi(f.back()) != 0;
            result.points.push_back(std::move(p));
        } catch (const std::exception&) {
            throw DataError("malformed result.csv row at line " + std::to_string(line_no));
        }
    }
    result.envelope = best_instance_envelope(result.points, result.metric_is_accuracy);
    write_file(out_path, sweep_chart_svg(result));

    std::cout << "plans: ";
    std::vector<std::string> plan_ids;
    for (const auto& p : result.points)
        if (std::find(plan_ids.begin(), plan_ids.end(), p.plan_id) == plan_ids.end())
            plan_ids.push_back(p.plan_id);
    for (const auto& id : plan_ids) std::cout << id << ' ';
    std::cout << "\npoints: " << result.points.size() << "\nwrote " << out_path << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"data-to-model matching experiments for RIC KPI prediction"};
    app.require_subcommand(1);

    // gen
    std::string gen_mode = "homo", gen_lambdas, gen_betas, gen_out = "trace.csv";
    int gen_rus = 4, gen_samples = 10000;
    std::uint64_t gen_seed = env_seed_fallback();
    double gen_p0 = 0.1, gen_noise = 0.1;
    auto* gen = app.add_subcommand("gen", "generate a synthetic trace");
    gen->add_option("--mode", gen_mode, "homo | hetero");
    gen->add_option("--rus", gen_rus, "number of RUs");
    gen->add_option("--samples", gen_samples, "samples per RU");
    gen->add_option("--seed", gen_seed, "generator seed");
    gen->add_option("--lambda", gen_lambdas, "per-RU load scale, comma list");
    gen->add_option("--beta", gen_betas, "per-RU spectral bias, comma list");
    gen->add_option("--p0", gen_p0, "zero-bitrate probability (homo mode)");
    gen->add_option("--noise", gen_noise, "lognormal noise sigma");
    gen->add_option("--out", gen_out, "output CSV path");

    // train
    std::string tr_trace, tr_target, tr_plan = "hoard", tr_out = "train_out";
    double tr_lr = 1e-3;
    int tr_epochs = 100;
    std::size_t tr_batch = 512;
    std::uint64_t tr_seed = env_seed_fallback();
    auto* trn = app.add_subcommand("train", "train one instance for a target RU");
    trn->add_option("--trace", tr_trace)->required();
    trn->add_option("--target", tr_target)->required();
    trn->add_option("--plan", tr_plan, "hoard | choose:RU | plan JSON file");
    trn->add_option("--lr", tr_lr);
    trn->add_option("--epochs", tr_epochs);
    trn->add_option("--batch", tr_batch);
    trn->add_option("--seed", tr_seed);
    trn->add_option("--out", tr_out, "output directory");

    // sweeps
    SweepArgs sd, st, sx;
    auto* sweep_data = app.add_subcommand("sweep-data", "MAPE vs training data fraction");
    add_sweep_flags(sweep_data, sd, "--fractions", "fractions: comma list or a:b:n");
    auto* sweep_time = app.add_subcommand("sweep-time", "MAPE vs modeled time budget");
    add_sweep_flags(sweep_time, st, "--budgets", "budgets in 100-hoard-epoch units");
    auto* xapp = app.add_subcommand("xapp", "quality-predictor accuracy vs sample count");
    add_sweep_flags(xapp, sx, "--samples", "absolute sample counts, comma list");
    double xapp_threshold = 0.0;
    bool xapp_all_slices = false;
    xapp->add_option("--threshold", xapp_threshold,
                     "zero-class threshold in bps (default: half smallest positive training target)");
    xapp->add_flag("--all-slices", xapp_all_slices, "evaluate on all slices, not just MTC");

    // hetero
    std::string het_trace, het_out = "hetero.json";
    auto* het = app.add_subcommand("hetero", "scenario heterogeneity score");
    het->add_option("--trace", het_trace)->required();
    het->add_option("--out", het_out, "output JSON path");

    // report
    std::string rep_in, rep_out = "chart.svg";
    auto* rep = app.add_subcommand("report", "re-render a sweep result directory as SVG");
    rep->add_option("--in", rep_in, "sweep output directory")->required();
    rep->add_option("--out", rep_out, "output SVG path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_exit_code() == 0 ? 0 : 1;
    }

    try {
        if (gen->parsed())
            return cmd_gen(gen_mode, gen_rus, gen_samples, gen_seed, gen_lambdas, gen_betas, gen_p0,
                           gen_noise, gen_out);
        if (trn->parsed())
            return cmd_train(tr_trace, tr_target, tr_plan, tr_lr, tr_epochs, tr_batch, tr_seed,
                             tr_out);
        if (sweep_data->parsed()) {
            const Trace trace = load_trace(sd.trace_path);
            const SweepConfig cfg = build_sweep_config(sd, trace, sweep_data);
            const SweepResult result = sweep_data_fraction(trace, cfg);
            emit_sweep_outputs(result, sd, run_echo("sweep-data", cfg, sd));
            return 0;
        }
        if (sweep_time->parsed()) {
            const Trace trace = load_trace(st.trace_path);
            const SweepConfig cfg = build_sweep_config(st, trace, sweep_time);
            const SweepResult result = sweep_time_budget(trace, cfg);
            emit_sweep_outputs(result, st, run_echo("sweep-time", cfg, st));
            return 0;
        }
        if (xapp->parsed()) {
            const Trace trace = load_trace(sx.trace_path);
            SweepConfig cfg = build_sweep_config(sx, trace, xapp);
            QpConfig qp;
            qp.threshold_bps = xapp_threshold;
            qp.mtc_only = !xapp_all_slices;
            for (double x : cfg.x_values) qp.sample_counts.push_back(static_cast<long long>(x));
            const SweepResult result = sweep_xapp(trace, cfg, qp);
            json echo = run_echo("xapp", cfg, sx);
            echo["threshold_bps"] = xapp_threshold;
            echo["mtc_only"] = qp.mtc_only;
            emit_sweep_outputs(result, sx, echo);
            return 0;
        }
        if (het->parsed()) return cmd_hetero(het_trace, het_out);
        if (rep->parsed()) return cmd_report(rep_in, rep_out);
    } catch (const NumericError& e) {
        std::cerr << "numerical abort: " << e.what() << "\n";
        return 3;
    } catch (const DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
