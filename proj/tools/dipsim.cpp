// dipsim: run distributed interactive protocols on generated or loaded
// graphs. Exit codes: 0 on completion whatever the verdict, 2 on a
// configuration error, 3 on an I/O error.
#include "dip/engine.hpp"
#include "dip/graph.hpp"
#include "dip/registry.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

constexpr int kConfigError = 2;
constexpr int kIoError = 3;

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Options {
    std::string protocol;
    std::string gen;
    std::string graph_path;
    std::string prover = "honest";
    size_t trials = 100;
    uint64_t seed = 1;
    std::vector<std::string> params;
    std::string format;
    std::string sizes;
    // Shorthands for --param.
    std::string c, b, t, lambda, K, pi_path;
};

std::string read_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot read " + path);
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) {
        throw IoError("error reading " + path);
    }
    return ss.str();
}

dip::Params collect_params(const Options& o)
{
    dip::Params out;
    for (const auto& kv : o.params) {
        auto eq = kv.find('=');
        if (eq == std::string::npos || eq == 0) {
            throw dip::ConfigError("--param expects k=v, got '" + kv + "'");
        }
        out[kv.substr(0, eq)] = kv.substr(eq + 1);
    }
    const std::pair<const char*, const std::string*> shorthand[] = {
        {"c", &o.c}, {"b", &o.b}, {"t", &o.t}, {"lambda", &o.lambda}, {"K", &o.K}};
    for (const auto& [k, v] : shorthand) {
        if (!v->empty()) {
            out[k] = *v;
        }
    }
    return out;
}

// "kind:args" with the first argument replaced by n; a bare kind gets ":n".
std::string spec_for_size(const std::string& gen, int n)
{
    auto colon = gen.find(':');
    if (colon == std::string::npos) {
        return gen + ":" + std::to_string(n);
    }
    auto comma = gen.find(',', colon);
    return gen.substr(0, colon + 1) + std::to_string(n) + (comma == std::string::npos ? "" : gen.substr(comma));
}

dip::Graph load_or_generate(const Options& o, const std::string& gen)
{
    if (!o.graph_path.empty()) {
        std::string text = read_file(o.graph_path);
        try {
            return dip::load_graph(text);
        } catch (const dip::GraphError& e) {
            throw dip::ConfigError(std::string("graph file: ") + e.what());
        }
    }
    if (gen.empty()) {
        throw dip::ConfigError("one of --gen or --graph is required");
    }
    try {
        return dip::generate_from_spec(gen, o.seed);
    } catch (const dip::GraphError& e) {
        throw dip::ConfigError(std::string("generator: ") + e.what());
    } catch (const std::invalid_argument&) {
        throw dip::ConfigError("generator: bad spec '" + gen + "'");
    } catch (const std::out_of_range&) {
        throw dip::ConfigError("generator: bad spec '" + gen + "'");
    }
}

dip::Stats run_one(const Options& o, const dip::Graph& g)
{
    dip::ProtocolParams pp;
    pp.values = collect_params(o);
    if (!o.pi_path.empty()) {
        pp.pi = dip::parse_permutation(read_file(o.pi_path), g.n);
    }
    dip::Instance inst;
    try {
        inst = dip::build_instance(o.protocol, g, pp, o.seed);
    } catch (const dip::GraphError& e) {
        throw dip::ConfigError(e.what());
    } catch (const std::invalid_argument& e) {
        throw dip::ConfigError(e.what());
    }
    auto prover = inst.prover(o.prover);
    return dip::monte_carlo(*inst.protocol, g, prover, o.trials, o.seed);
}

void check_names(const Options& o)
{
    auto provers = dip::prover_names(o.protocol);
    if (std::find(provers.begin(), provers.end(), o.prover) == provers.end()) {
        throw dip::ConfigError("unknown prover '" + o.prover + "' for " + o.protocol);
    }
    if (o.trials == 0) {
        throw dip::ConfigError("--trials must be positive");
    }
}

std::vector<int> parse_sizes(const std::string& text)
{
    std::vector<int> out;
    std::istringstream in(text);
    std::string tok;
    while (std::getline(in, tok, ',')) {
        if (tok.empty()) {
            continue;
        }
        size_t used = 0;
        int v = 0;
        try {
            v = std::stoi(tok, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != tok.size() || v < 1) {
            throw dip::ConfigError("bad size '" + tok + "'");
        }
        if (!out.empty() && v <= out.back()) {
            throw dip::ConfigError("sizes must be ascending");
        }
        out.push_back(v);
    }
    if (out.empty()) {
        throw dip::ConfigError("empty size list");
    }
    return out;
}

nlohmann::ordered_json stats_object(const dip::Stats& s)
{
    return nlohmann::ordered_json::parse(dip::stats_json(s));
}

void print_csv_row(const dip::Stats& s)
{
    std::cout << s.n << ',' << s.max_bits_per_node_per_round << ',' << s.accept_rate << '\n';
}

int cmd_run(const Options& o)
{
    check_names(o);
    auto g = load_or_generate(o, o.gen);
    auto s = run_one(o, g);
    if (o.format == "csv") {
        std::cout << "n,max_bits_per_node,accept_rate\n";
        print_csv_row(s);
    } else {
        std::cout << dip::stats_json(s) << '\n';
    }
    return 0;
}

int cmd_sweep(const Options& o)
{
    check_names(o);
    auto sizes = parse_sizes(o.sizes);
    if (!o.graph_path.empty()) {
        throw dip::ConfigError("sweep generates its graphs; use --gen");
    }
    std::string gen = o.gen.empty() ? "tree" : o.gen;
    std::vector<dip::Stats> rows;
    for (int n : sizes) {
        rows.push_back(run_one(o, load_or_generate(o, spec_for_size(gen, n))));
    }
    if (o.format == "json") {
        auto arr = nlohmann::ordered_json::array();
        for (const auto& s : rows) {
            arr.push_back(stats_object(s));
        }
        std::cout << arr.dump() << '\n';
    } else {
        std::cout << "n,max_bits_per_node,accept_rate\n";
        for (const auto& s : rows) {
            print_csv_row(s);
        }
    }
    return 0;
}

// Every registered prover of the protocol on one graph.
int cmd_suite(const Options& base)
{
    auto provers = dip::prover_names(base.protocol);
    auto g = load_or_generate(base, base.gen);
    auto arr = nlohmann::ordered_json::array();
    for (const auto& name : provers) {
        Options o = base;
        o.prover = name;
        check_names(o);
        nlohmann::ordered_json j;
        try {
            j = stats_object(run_one(o, g));
        } catch (const dip::GraphError& e) {
            // Some forgeries need structure the graph lacks (a cycle, say).
            j["protocol"] = base.protocol;
            j["error"] = e.what();
        }
        j["prover"] = name;
        arr.push_back(j);
    }
    std::cout << arr.dump() << '\n';
    return 0;
}

int cmd_list()
{
    for (const auto& p : dip::protocol_names()) {
        std::cout << p << ':';
        for (const auto& v : dip::prover_names(p)) {
            std::cout << ' ' << v;
        }
        std::cout << '\n';
    }
    return 0;
}

void add_common(CLI::App* cmd, Options& o)
{
    cmd->add_option("--gen", o.gen, "graph generator spec, kind:n[,arg...]");
    cmd->add_option("--graph", o.graph_path, "graph file");
    cmd->add_option("--trials", o.trials, "Monte Carlo trials");
    cmd->add_option("--seed", o.seed, "master seed");
    cmd->add_option("--param", o.params, "protocol parameter k=v (repeatable)");
    cmd->add_option("--c", o.c, "element exponent c");
    cmd->add_option("--b", o.b, "block parameter b");
    cmd->add_option("--t", o.t, "repetitions t");
    cmd->add_option("--lambda", o.lambda, "oracle output bits");
    cmd->add_option("--K", o.K, "target K");
    cmd->add_option("--pi", o.pi_path, "permutation table file");
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Distributed interactive proof simulator"};
    app.require_subcommand(1);
    Options o;

    auto* run = app.add_subcommand("run", "run one protocol and print stats");
    run->add_option("protocol", o.protocol)->required();
    run->add_option("--prover", o.prover, "prover name");
    run->add_option("--format", o.format)->check(CLI::IsMember({"json", "csv"}));
    add_common(run, o);

    auto* sweep = app.add_subcommand("sweep", "run over a list of sizes");
    sweep->add_option("protocol", o.protocol)->required();
    sweep->add_option("sizes", o.sizes, "ascending comma-separated sizes")->required();
    sweep->add_option("--prover", o.prover, "prover name");
    sweep->add_option("--format", o.format)->check(CLI::IsMember({"json", "csv"}));
    add_common(sweep, o);

    auto* suite = app.add_subcommand("suite", "run every registered prover");
    suite->add_option("protocol", o.protocol)->required();
    add_common(suite, o);

    auto* list = app.add_subcommand("list", "print protocols and provers");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kConfigError;
    }

    try {
        if (*list) {
            return cmd_list();
        }
        if (*run) {
            return cmd_run(o);
        }
        if (*sweep) {
            return cmd_sweep(o);
        }
        return cmd_suite(o);
    } catch (const dip::ConfigError& e) {
        std::cerr << "dipsim: " << e.what() << '\n';
        return kConfigError;
    } catch (const IoError& e) {
        std::cerr << "dipsim: " << e.what() << '\n';
        return kIoError;
    } catch (const std::exception& e) {
        std::cerr << "dipsim: error: " << e.what() << '\n';
        return 1;
    }
}
