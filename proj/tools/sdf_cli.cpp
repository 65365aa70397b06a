// sdf: command-line front end for stream generation, prequential runs,
// budget sweeps, depth ablations and rank statistics.

#include <charconv>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sdf/active.hpp"
#include "sdf/classifier.hpp"
#include "sdf/errors.hpp"
#include "sdf/prequential.hpp"
#include "sdf/ranking.hpp"
#include "sdf/streams.hpp"

namespace {

enum Exit { ok = 0, usage = 1, data_error = 2, runtime_error = 3 };

struct GlobalOptions {
    std::uint64_t seed = 1;
    std::string output;
    std::uint64_t window = 1000;
};

struct SourceOptions {
    std::string stream = "SEA_a";
    std::string data;
    std::string format;
    std::string class_column;
    std::string generator_config;
    std::vector<std::string> params;
    std::uint64_t instances = 100000;
};

struct ModelOptions {
    std::string model = "sdf";
    std::size_t layers = 3;
    std::size_t trees = 50;
    double lambda = 6.0;
    double warning_delta = 1e-4;
    double drift_delta = 1e-5;
    double grace_period = 50;
    double split_confidence = 0.01;
    double tie_threshold = 0.05;
    std::size_t threads = 1;
};

struct StrategyOptions {
    std::string strategy = "none";
    double budget = 1.0;
    double step = 0.01;
    double ss_b = 0.1;
};

std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return ec == std::errc() ? std::string(buf, ptr) : std::to_string(v);
}

std::string fixed(double v, int digits = 6) {
    std::ostringstream out;
    out << std::fixed << std::setprecision(digits) << v;
    return out.str();
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string config_header(const std::string& command, const std::string& canonical) {
    std::ostringstream out;
    out << "# sdf " << command << " config_hash=" << std::hex << std::setw(16) << std::setfill('0')
        << fnv1a(canonical) << " " << canonical << "\n";
    return out.str();
}

std::map<std::string, std::string> parse_params(const std::vector<std::string>& params) {
    std::map<std::string, std::string> out;
    for (const auto& p : params) {
        const auto eq = p.find('=');
        if (eq == std::string::npos) throw sdf::ConfigError("param", "expected key=value, got '" + p + "'");
        out[p.substr(0, eq)] = p.substr(eq + 1);
    }
    return out;
}

std::unique_ptr<sdf::Stream> open_source(const SourceOptions& src, std::uint64_t seed) {
    if (!src.data.empty()) {
        const auto format = src.format.empty() ? sdf::format_from_path(src.data)
                            : src.format == "arff"  ? sdf::DatasetFormat::arff
                            : src.format == "csv"   ? sdf::DatasetFormat::csv
                                                    : throw sdf::ConfigError("format", "expected csv or arff");
        sdf::DatasetOptions opts;
        if (!src.class_column.empty()) opts.class_column = src.class_column;
        auto stream = sdf::load_dataset(src.data, format, opts);
        return src.instances ? sdf::take(std::move(stream), src.instances) : std::move(stream);
    }
    if (!src.generator_config.empty() || !src.params.empty() || !sdf::is_preset(src.stream)) {
        std::map<std::string, std::string> kv;
        if (!src.generator_config.empty()) kv = sdf::read_key_value_file(src.generator_config);
        for (auto& [k, v] : parse_params(src.params)) kv[k] = v;
        if (!kv.count("seed")) kv["seed"] = std::to_string(seed);
        if (!kv.count("length")) kv["length"] = std::to_string(src.instances);
        if (!kv.count("kind")) kv["kind"] = src.stream;
        return sdf::create_generator(sdf::generator_config_from(kv));
    }
    return sdf::make_preset(src.stream, seed, src.instances);
}

std::string source_key(const SourceOptions& src, std::uint64_t seed) {
    std::ostringstream out;
    if (!src.data.empty()) {
        out << "data=" << src.data << " format=" << src.format << " class_column=" << src.class_column;
    } else {
        out << "stream=" << src.stream << " generator_config=" << src.generator_config;
        for (const auto& p : src.params) out << " param:" << p;
    }
    out << " instances=" << src.instances << " seed=" << seed;
    return out.str();
}

std::unique_ptr<sdf::Classifier> build_model(const ModelOptions& m, const sdf::Schema& schema, std::uint64_t seed) {
    sdf::TreeConfig tree;
    tree.grace_period = m.grace_period;
    tree.split_confidence = m.split_confidence;
    tree.tie_threshold = m.tie_threshold;
    sdf::ArfConfig arf;
    arf.ensemble_size = m.trees;
    arf.tree = tree;
    arf.lambda = m.lambda;
    arf.warning_delta = m.warning_delta;
    arf.drift_delta = m.drift_delta;
    arf.threads = m.threads;
    arf.seed = seed;
    if (m.model == "sdf") {
        sdf::CascadeConfig c;
        c.layers = m.layers;
        c.forest = arf;
        c.threads = m.threads;
        c.seed = seed;
        return std::make_unique<sdf::CascadeClassifier>(schema, c);
    }
    if (m.model == "arf") return std::make_unique<sdf::ForestClassifier>(schema, arf);
    if (m.model == "ht") {
        tree.seed = seed;
        return std::make_unique<sdf::TreeClassifier>(schema, tree);
    }
    throw sdf::ConfigError("model", "expected sdf, arf or ht");
}

std::string model_key(const ModelOptions& m) {
    std::ostringstream out;
    out << "model=" << m.model << " layers=" << m.layers << " trees=" << m.trees << " lambda=" << format_double(m.lambda)
        << " warning_delta=" << format_double(m.warning_delta) << " drift_delta=" << format_double(m.drift_delta)
        << " grace_period=" << format_double(m.grace_period)
        << " split_confidence=" << format_double(m.split_confidence)
        << " tie_threshold=" << format_double(m.tie_threshold);
    return out.str();
}

sdf::PrequentialOptions prequential_options(const StrategyOptions& s, const GlobalOptions& g) {
    sdf::PrequentialOptions opts;
    if (s.strategy != "none") opts.strategy = sdf::Strategy{sdf::parse_strategy(s.strategy), s.ss_b};
    opts.budget = s.budget;
    opts.step = s.step;
    opts.window = g.window;
    opts.seed = g.seed;
    opts.keep_records = false;
    return opts;
}

class Output {
public:
    explicit Output(const std::string& path) {
        if (!path.empty() && path != "-") {
            file_.open(path);
            if (!file_) throw std::runtime_error("cannot write '" + path + "'");
        }
    }
    std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }
    bool to_stdout() const { return !file_.is_open(); }

private:
    std::ofstream file_;
};

void add_source_options(CLI::App* cmd, SourceOptions& src) {
    cmd->add_option("--stream", src.stream, "Preset or generator kind (SEA_a, SEA_g, AGR_a, AGR_g, RBF_m, RBF_f, "
                                            "HYPER, RTG, SEA, AGRAWAL, RBF, HYPERPLANE)")
        ->capture_default_str();
    cmd->add_option("--data", src.data, "Read instances from a CSV or ARFF file instead of a generator");
    cmd->add_option("--format", src.format, "Dataset format (csv or arff); inferred from the extension by default");
    cmd->add_option("--class-column", src.class_column, "Name of the class column/attribute");
    cmd->add_option("--generator-config", src.generator_config, "Generator key = value file (kind, seed, sea.threshold, ...)");
    cmd->add_option("--param", src.params, "Generator option as key=value (repeatable)");
    cmd->add_option("-n,--instances", src.instances, "Number of instances (0 = whole file)")->capture_default_str();
}

void add_model_options(CLI::App* cmd, ModelOptions& m) {
    cmd->add_option("--model", m.model, "sdf, arf or ht")->capture_default_str();
    cmd->add_option("--layers", m.layers, "Cascade layers")->capture_default_str();
    cmd->add_option("--trees", m.trees, "Trees per forest")->capture_default_str();
    cmd->add_option("--lambda", m.lambda, "Online bagging Poisson rate")->capture_default_str();
    cmd->add_option("--warning-delta", m.warning_delta, "ADWIN confidence for warnings")->capture_default_str();
    cmd->add_option("--drift-delta", m.drift_delta, "ADWIN confidence for drifts")->capture_default_str();
    cmd->add_option("--grace-period", m.grace_period, "Weight between split attempts")->capture_default_str();
    cmd->add_option("--split-confidence", m.split_confidence, "Hoeffding split confidence")->capture_default_str();
    cmd->add_option("--tie-threshold", m.tie_threshold, "Hoeffding tie threshold")->capture_default_str();
    cmd->add_option("--threads", m.threads, "Worker threads for member-parallel updates")->capture_default_str();
}

void add_strategy_options(CLI::App* cmd, StrategyOptions& s, bool single) {
    if (single) {
        cmd->add_option("--strategy", s.strategy, "none, vu, vru, ss or avu")->capture_default_str();
        cmd->add_option("--budget", s.budget, "Labeling budget B in [0, 1]")
            ->check(CLI::Range(0.0, 1.0))
            ->capture_default_str();
    }
    cmd->add_option("--step", s.step, "Threshold adjusting step s")->capture_default_str();
    cmd->add_option("--ss-b", s.ss_b, "Selective sampling parameter b")->capture_default_str();
}

int cmd_generate(const GlobalOptions& g, const SourceOptions& src) {
    if (src.instances == 0) throw sdf::ConfigError("instances", "generate needs a positive instance count");
    auto stream = open_source(src, g.seed);
    const sdf::Schema& schema = stream->schema();
    Output out(g.output);
    auto& os = out.stream();
    for (const auto& f : schema.features()) os << f.name << ",";
    os << "class\n";
    while (auto inst = stream->next()) {
        for (std::size_t i = 0; i < inst->x.size(); ++i) {
            const auto& f = schema.feature(i);
            os << (f.is_nominal() ? f.values[static_cast<std::size_t>(inst->x[i])] : format_double(inst->x[i])) << ",";
        }
        os << schema.class_labels()[static_cast<std::size_t>(*inst->y)] << "\n";
    }
    return ok;
}

int cmd_run(const GlobalOptions& g, const SourceOptions& src, const ModelOptions& m, const StrategyOptions& s) {
    auto stream = open_source(src, g.seed);
    auto model = build_model(m, stream->schema(), g.seed);
    const auto opts = prequential_options(s, g);
    const auto result = sdf::run_prequential(*model, *stream, opts);

    std::ostringstream canonical;
    canonical << source_key(src, g.seed) << " " << model_key(m) << " strategy=" << s.strategy
              << " budget=" << format_double(s.budget) << " step=" << format_double(s.step)
              << " ss_b=" << format_double(s.ss_b) << " window=" << g.window;
    Output out(g.output);
    auto& os = out.stream();
    os << config_header("run", canonical.str());
    os << "end,count,window_accuracy,cumulative_accuracy,label_fraction,warnings,drifts\n";
    for (const auto& w : result.windows)
        os << w.end << "," << w.count << "," << fixed(w.accuracy) << "," << fixed(w.cumulative_accuracy) << ","
           << fixed(w.label_fraction) << "," << w.drift.warnings << "," << w.drift.drifts << "\n";

    std::ostream& summary = out.to_stdout() ? std::cerr : std::cout;
    const auto& sm = result.summary;
    summary << "instances: " << sm.instances << "\n"
            << "accuracy: " << fixed(sm.accuracy) << "\n"
            << "label_fraction: " << fixed(sm.label_fraction) << "\n"
            << "warnings: " << sm.drift.warnings << "\n"
            << "drifts: " << sm.drift.drifts << "\n"
            << "wall_seconds: " << fixed(sm.wall_seconds, 3) << "\n";
    return ok;
}

std::vector<double> parse_list(const std::string& text, const char* field) {
    std::vector<double> out;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        double v = 0;
        const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
        if (ec != std::errc() || ptr != item.data() + item.size())
            throw sdf::ConfigError(field, "cannot parse '" + item + "'");
        out.push_back(v);
    }
    if (out.empty()) throw sdf::ConfigError(field, "empty list");
    return out;
}

int cmd_sweep(const GlobalOptions& g, const SourceOptions& src, const ModelOptions& m, StrategyOptions s,
              const std::string& budgets, const std::string& strategies) {
    const auto budget_list = parse_list(budgets, "budgets");
    std::vector<std::string> strategy_list;
    std::stringstream in(strategies);
    for (std::string item; std::getline(in, item, ',');) {
        sdf::parse_strategy(item);
        strategy_list.push_back(item);
    }
    std::ostringstream canonical;
    canonical << source_key(src, g.seed) << " " << model_key(m) << " strategies=" << strategies
              << " budgets=" << budgets << " step=" << format_double(s.step) << " ss_b=" << format_double(s.ss_b);
    Output out(g.output);
    auto& os = out.stream();
    os << config_header("sweep", canonical.str());
    os << "strategy,budget,instances,accuracy,label_fraction,warnings,drifts\n";
    for (const auto& name : strategy_list) {
        for (double b : budget_list) {
            s.strategy = name;
            s.budget = b;
            auto stream = open_source(src, g.seed);
            auto model = build_model(m, stream->schema(), g.seed);
            const auto r = sdf::run_prequential(*model, *stream, prequential_options(s, g)).summary;
            os << sdf::to_string(sdf::parse_strategy(name)) << "," << format_double(b) << "," << r.instances << ","
               << fixed(r.accuracy) << "," << fixed(r.label_fraction) << "," << r.drift.warnings << ","
               << r.drift.drifts << "\n";
            os.flush();
        }
    }
    return ok;
}

int cmd_depth(const GlobalOptions& g, const SourceOptions& src, ModelOptions m, const std::string& layers,
              std::size_t seeds) {
    const auto layer_list = parse_list(layers, "layers-list");
    std::ostringstream canonical;
    canonical << source_key(src, g.seed) << " " << model_key(m) << " layers_list=" << layers << " seeds=" << seeds;
    Output out(g.output);
    auto& os = out.stream();
    os << config_header("depth", canonical.str());
    os << "layers,seed,instances,accuracy,warnings,drifts\n";
    for (std::size_t i = 0; i < seeds; ++i) {
        const std::uint64_t seed = g.seed + i;
        for (double l : layer_list) {
            m.layers = static_cast<std::size_t>(l);
            auto stream = open_source(src, seed);
            auto model = build_model(m, stream->schema(), seed);
            sdf::PrequentialOptions opts;
            opts.keep_records = false;
            opts.window = g.window;
            const auto r = sdf::run_prequential(*model, *stream, opts).summary;
            os << m.layers << "," << seed << "," << r.instances << "," << fixed(r.accuracy) << "," << r.drift.warnings
               << "," << r.drift.drifts << "\n";
            os.flush();
        }
    }
    return ok;
}

int cmd_rank(const GlobalOptions& g, const std::string& input, double alpha) {
    const auto matrix = sdf::RankMatrix::from_csv_file(input);
    matrix.validate();
    std::vector<double> means = sdf::average_ranks(matrix);
    std::cout << "method,mean_rank\n";
    for (std::size_t i = 0; i < matrix.methods.size(); ++i)
        std::cout << matrix.methods[i] << "," << fixed(means[i], 2) << "\n";
    if (matrix.methods.size() >= 3 && matrix.datasets.size() >= 2) {
        const auto fn = sdf::friedman_nemenyi(matrix, alpha);
        std::cout << "friedman_chi_square: " << fixed(fn.chi_square, 4) << "\n"
                  << "friedman_p_value: " << fn.p_value << "\n"
                  << "reject_equal_performance: " << (fn.reject ? "true" : "false") << "\n"
                  << "nemenyi_q_alpha: " << fixed(fn.q_alpha, 3) << "\n"
                  << "critical_distance: " << fixed(fn.critical_distance, 4) << "\n";
    }
    if (!g.output.empty()) {
        Output out(g.output);
        out.stream() << "method,mean_rank\n";
        for (std::size_t i = 0; i < matrix.methods.size(); ++i)
            out.stream() << matrix.methods[i] << "," << fixed(means[i], 4) << "\n";
    }
    return ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Streaming Deep Forest toolkit: generators, prequential evaluation, active learning, ranking"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_config("--config", "", "Read options from a key = value file");

    GlobalOptions g;
    app.add_option("--seed", g.seed, "Random seed")->capture_default_str();
    app.add_option("-o,--output", g.output, "Output path (stdout when omitted)");
    app.add_option("--window", g.window, "Accuracy reporting window")->capture_default_str();

    SourceOptions src;
    ModelOptions model;
    StrategyOptions strategy;

    auto* generate = app.add_subcommand("generate", "Write a synthetic stream to CSV");
    add_source_options(generate, src);

    auto* run = app.add_subcommand("run", "Prequential run of a model, optionally with an active-learning strategy");
    add_source_options(run, src);
    add_model_options(run, model);
    add_strategy_options(run, strategy, true);

    std::string budgets = "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9";
    std::string strategies = "vu,avu";
    auto* sweep = app.add_subcommand("sweep", "Budgets x strategies grid of prequential runs");
    add_source_options(sweep, src);
    add_model_options(sweep, model);
    add_strategy_options(sweep, strategy, false);
    sweep->add_option("--budgets", budgets, "Comma-separated budgets")->capture_default_str();
    sweep->add_option("--strategies", strategies, "Comma-separated strategies")->capture_default_str();

    std::string layers = "1,2,3,4,5";
    std::size_t seeds = 3;
    auto* depth = app.add_subcommand("depth", "Layer-count ablation of the cascade");
    add_source_options(depth, src);
    add_model_options(depth, model);
    depth->add_option("--layers-list", layers, "Comma-separated layer counts")->capture_default_str();
    depth->add_option("--seeds", seeds, "Number of seeds, starting at --seed")->capture_default_str();

    std::string input;
    double alpha = 0.05;
    auto* rank = app.add_subcommand("rank", "Average ranks, Friedman test and Nemenyi critical distance");
    rank->add_option("-i,--input", input, "Accuracy CSV: dataset,<method>,...")->required();
    rank->add_option("--alpha", alpha, "Significance level (0.05 only)")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? ok : usage;
    }

    try {
        if (*generate) return cmd_generate(g, src);
        if (*run) return cmd_run(g, src, model, strategy);
        if (*sweep) return cmd_sweep(g, src, model, strategy, budgets, strategies);
        if (*depth) return cmd_depth(g, src, model, layers, seeds);
        if (*rank) return cmd_rank(g, input, alpha);
    } catch (const sdf::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return usage;
    } catch (const sdf::DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return data_error;
    } catch (const sdf::SchemaError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return data_error;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return runtime_error;
    }
    return usage;
}
