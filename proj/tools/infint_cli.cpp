#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "infint/cbc.hpp"
#include "infint/convergence.hpp"
#include "infint/coordgraph.hpp"
#include "infint/error.hpp"
#include "infint/walsh.hpp"

using namespace infint;

namespace {

constexpr int kExitInvalid = 2;
constexpr int kExitBudget = 3;

struct Common {
    unsigned alpha = 1;
    double anchor = 0.0;
    std::uint32_t base = 2;
    std::uint64_t seed = 0;
    std::string out = ".";
    std::string weights_file;
    double product_decay = 2.0;
};

void add_common(CLI::App* app, Common& c) {
    app->add_option("--alpha", c.alpha, "Smoothness of the anchored Sobolev kernel")->capture_default_str();
    app->add_option("--anchor", c.anchor, "Anchor c in [0, 1]")->capture_default_str();
    app->add_option("--base", c.base, "Prime base b")->capture_default_str();
    app->add_option("--seed", c.seed, "Seed for sampled candidates, shifts and corpora")->capture_default_str();
    app->add_option("--out", c.out, "Output directory")->capture_default_str();
    app->add_option("--weights-file", c.weights_file, "Explicit weights, one 'j1 j2 ... : gamma' per line");
    app->add_option("--product-decay", c.product_decay, "Product weights gamma_j = j^-decay")->capture_default_str();
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::ParseError, "cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& dir, const std::string& name, const std::string& text) {
    std::filesystem::create_directories(dir);
    std::ofstream out(std::filesystem::path(dir) / name, std::ios::binary);
    if (!out) throw Error(ErrorKind::InvalidParameters, "cannot write into " + dir);
    out << text;
}

WeightFamily weights_from(const Common& c) {
    if (!c.weights_file.empty()) return parse_explicit_weights(read_file(c.weights_file));
    return WeightFamily::product(UnivariateRule::power_law(1.0, c.product_decay));
}

std::string num(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

// Keys outside any section belong to the subcommand given on the command line.
class SubcommandConfig : public CLI::ConfigTOML {
public:
    explicit SubcommandConfig(const CLI::App& app) : app_(app) {}

    std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
        auto items = CLI::ConfigTOML::from_config(input);
        const auto subs = app_.get_subcommands();
        if (!subs.empty())
            for (auto& item : items)
                if (item.parents.empty()) item.parents = {subs.front()->get_name()};
        return items;
    }

private:
    const CLI::App& app_;
};

// ---------------------------------------------------------------- cbc

struct CbcArgs {
    Common common;
    int m = 0;
    std::size_t dim = 1;
    std::size_t shift_trials = 0;
    std::uint64_t candidate_cap = std::uint64_t{1} << 20;
};

int run_cbc(const CbcArgs& a) {
    CBCConfig cfg;
    cfg.b = a.common.base;
    cfg.m = a.m;
    cfg.alpha = a.common.alpha;
    cfg.s = a.dim;
    cfg.weights = weights_from(a.common);
    cfg.kernel = {a.common.alpha, a.common.anchor};
    cfg.shift_trials = a.shift_trials;
    cfg.seed = a.common.seed;
    cfg.candidate_cap = a.candidate_cap;
    const CBCResult res = cbc_construct(cfg);
    PointSet points = generate_points(res.spec);
    if (res.shift) points = apply_shift(points, *res.shift);
    write_file(a.common.out, "points.txt", format_point_set(res.spec, &points));
    write_file(a.common.out, "criterion.csv", format_criterion_log(res));
    std::cout << "points " << points.count() << ", final criterion " << num(res.final_criterion) << '\n';
    return 0;
}

// ---------------------------------------------------------------- convergence

struct ConvArgs {
    Common common;
    std::string algorithm = "ml";
    std::string model = "nested";
    double cost_exponent = 1.0;
    std::vector<double> budgets{100.0, 1000.0, 10000.0};
    std::uint32_t L = 1;
    double a = 2.0;
    std::string level_mode = "prefix";
    double level_share = 0.5;
    double tau = 0.0;  // 0 picks the default of the algorithm
    double lambda0 = 0.0;
    double c_const = 1.0;
    double C_const = 0.0;  // 0 picks C_0
};

int run_convergence_cmd(const ConvArgs& a) {
    ConvergenceSetup s;
    s.algorithm = a.algorithm == "ml" ? Algorithm::Multilevel : Algorithm::ChangingDimension;
    s.space = {{a.common.alpha, a.common.anchor}, weights_from(a.common), {}};
    s.space.kernel.validate();
    s.cost = {a.cost_exponent, a.model == "nested" ? CostVariant::Nested : CostVariant::Unrestricted};
    s.b = a.common.base;
    s.seed = a.common.seed;
    s.budgets = a.budgets;
    const double alpha = a.common.alpha;
    const double c0 = AnchoredKernel(s.space.kernel).c0();

    // decay of the weights: the product exponent, or a fit over the ordered explicit weights
    double decay = a.common.product_decay;
    if (!a.common.weights_file.empty()) {
        const auto ordered = enumerate_ordered(s.space.weights, std::nullopt, c0, 4096);
        const std::size_t n = ordered.entries.size();
        decay = n >= 8 ? decay_estimate(ordered, std::max<std::size_t>(1, n / 10), n).value : 1.0;
        s.weight_class = WeightClass::General;
    }
    s.decay = {{1, decay}};

    s.plan.L = a.L;
    s.plan.a = a.a;
    s.plan.mode = a.level_mode == "union" ? LevelMode::Union : LevelMode::Prefix;
    s.plan.tau = a.tau > 0.0 ? a.tau : 0.99 * alpha;
    s.level_share = a.level_share;

    s.cd.decay = decay;
    s.cd.lambda0 = a.lambda0 > 0.0 ? a.lambda0 : 0.96 * (1.0 - 1.0 / decay);
    s.cd.tau = a.tau > 0.0 ? a.tau : 0.75 * alpha;
    s.cd.c_const = a.c_const;
    s.cd.C_const = a.C_const > 0.0 ? a.C_const : c0;

    const ConvergenceResult res = run_convergence(s);
    write_file(a.common.out, "convergence.csv", format_convergence_rows(res));
    write_file(a.common.out, "rate.csv", format_convergence_summary(s, res));
    std::cout << format_convergence_rows(res) << "measured rate " << num(res.measured_rate) << ", predicted "
              << num(res.predicted_rate) << " (" << res.prediction.case_tag << ")\n";
    return 0;
}

// ---------------------------------------------------------------- weights

struct WeightsArgs {
    Common common;
    std::string family = "product";
    double p_star = 4.0, q_star = 2.0;
    unsigned clique_d = 3;
    std::uint32_t coord_max = 9;
    std::uint32_t pairs = 200;
    std::vector<unsigned> sigmas{1, 2};
    std::size_t terms = 3000;
    double c0 = 1.0;
};

int run_weights(const WeightsArgs& a) {
    WeightFamily w = weights_from(a.common);
    if (a.family == "pod-example") w = pod_example_weights(a.p_star, a.q_star);
    if (a.family == "clique") w = clique_weights(a.clique_d, a.coord_max);
    if (a.family == "pairs") w = disjoint_pairs_weights(a.pairs, a.common.product_decay);
    const double c0 = a.c0;

    std::ostringstream csv, txt;
    csv << "quantity,sigma,value\n";
    auto row = [&](const std::string& q, const std::string& sigma, const std::string& v) {
        csv << q << ',' << sigma << ',' << v << '\n';
        txt << q << (sigma.empty() ? "" : "[" + sigma + "]") << " = " << v << '\n';
    };
    auto decay_row = [&](std::optional<unsigned> sigma) {
        const auto ordered = enumerate_ordered(w, sigma, c0, a.terms);
        const std::size_t n = ordered.entries.size();
        const std::string tag = sigma ? std::to_string(*sigma) : "inf";
        try {
            const auto d = decay_estimate(ordered, std::max<std::size_t>(1, n / 10), n);
            row("decay", tag, d.degenerate ? "nan" : num(d.value));
        } catch (const Error&) {
            row("decay", tag, "nan");  // too few active sets for a fit
        }
    };
    decay_row(std::nullopt);
    for (unsigned s : a.sigmas) decay_row(s);
    for (unsigned s : a.sigmas) {
        const auto ordered = enumerate_ordered(w, s, c0, 16);
        row("t_star", std::to_string(s), num(t_star_estimate(ordered, s, {8, 16, 32, 64})));
    }
    row("power_sum", "", num(power_sum(w, 1.0, c0).value));

    if (w.kind() == WeightKind::Explicit) {
        const SetSystem sys = SetSystem::from_weights(w);
        const CoordGraph g = build_graph(sys);
        row("vertices", "", std::to_string(g.vertex_count()));
        row("clique_lower_bound", "", std::to_string(clique_lower_bound(sys)));
        if (g.vertex_count() <= 24) row("chromatic", "", std::to_string(chromatic_exact(g)));
        row("greedy_smallest_last", "", std::to_string(greedy_coloring(g, VertexOrder::SmallestLast).num_colors));
        row("degree_bound", "", std::to_string(degree_bound(sys)));
        if (auto bb = brooks_bound(sys)) row("brooks_bound", "", std::to_string(*bb));
    }
    write_file(a.common.out, "weights.csv", csv.str());
    std::cout << txt.str();
    return 0;
}

// ---------------------------------------------------------------- audit

struct AuditArgs {
    Common common;
    std::size_t seeds = 20;
    std::uint64_t k_max = 4095;
    double scale = 1.0;
};

int run_audit(const AuditArgs& a) {
    const AnchoredKernelParams params{a.common.alpha, a.common.anchor};
    const double bound = const_c3(a.common.alpha, a.common.base);
    std::ostringstream csv;
    csv << "seed,atoms,max_ratio,argmax,norm,bound,pass\n";
    std::size_t failures = 0;
    for (std::size_t i = 0; i < a.seeds; ++i) {
        const std::uint64_t seed = a.common.seed + i;
        auto atoms = random_atoms(seed);
        for (auto& at : atoms) at.coeff *= a.scale;
        const auto r = embedding_audit(params, atoms, a.k_max, a.common.base);
        failures += r.pass ? 0 : 1;
        csv << seed << ',' << atoms.size() << ',' << num(r.max_ratio) << ',' << r.argmax << ',' << num(r.norm) << ','
            << num(bound) << ',' << (r.pass ? "pass" : "fail") << '\n';
    }
    write_file(a.common.out, "audit.csv", csv.str());
    std::cout << a.seeds - failures << " of " << a.seeds << " pass, bound " << num(bound) << '\n';
    return 0;
}

int exit_code(const Error& e) {
    switch (e.kind()) {
        case ErrorKind::InvalidParameters:
        case ErrorKind::ParseError:
        case ErrorKind::InvalidTau:
            return kExitInvalid;
        case ErrorKind::BudgetExceeded:
        case ErrorKind::BudgetTooSmall:
        case ErrorKind::TruncationInsufficient:
        case ErrorKind::DivergentSum:
            return kExitBudget;
        default:
            return 1;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Quasi-Monte Carlo rules and infinite-dimensional integration algorithms"};
    app.require_subcommand(1);
    app.fallthrough();
    app.allow_config_extras(CLI::config_extras_mode::error);
    app.set_config("--config", "", "File of 'key = value' lines using the long option names");
    app.config_formatter(std::make_shared<SubcommandConfig>(app));

    CbcArgs cbc;
    auto* c = app.add_subcommand("cbc", "Build a polynomial lattice rule component by component");
    add_common(c, cbc.common);
    c->add_option("--m", cbc.m, "Points b^m")->required()->check(CLI::Range(1, 30));
    c->add_option("--dim", cbc.dim, "Dimension s")->capture_default_str()->check(CLI::PositiveNumber);
    c->add_option("--shift-trials", cbc.shift_trials, "Random digital shifts tried")->capture_default_str();
    c->add_option("--candidate-cap", cbc.candidate_cap, "Candidates per component before giving up")
        ->capture_default_str();

    ConvArgs conv;
    conv.common.product_decay = 3.0;
    auto* v = app.add_subcommand("convergence", "Error against cost for multilevel or changing-dimension algorithms");
    add_common(v, conv.common);
    v->add_option("--algorithm", conv.algorithm)->check(CLI::IsMember({"ml", "cd"}))->capture_default_str();
    v->add_option("--model", conv.model)->check(CLI::IsMember({"nested", "unrestricted"}))->capture_default_str();
    v->add_option("--cost-exponent", conv.cost_exponent, "s in $(k) = max(1, k^s)")->capture_default_str();
    v->add_option("--budgets", conv.budgets, "Comma-separated cost budgets")->delimiter(',')->capture_default_str();
    v->add_option("--L", conv.L, "First level size")->capture_default_str();
    v->add_option("--a", conv.a, "Level growth factor")->capture_default_str();
    v->add_option("--level-mode", conv.level_mode)->check(CLI::IsMember({"prefix", "union"}))->capture_default_str();
    v->add_option("--level-share", conv.level_share, "Budget share for one node per level")->capture_default_str();
    v->add_option("--tau", conv.tau, "Rate parameter (default 0.99 alpha for ml, 0.75 alpha for cd)");
    v->add_option("--lambda0", conv.lambda0, "Changing dimension lambda0 (default 0.96 (1 - 1/decay))");
    v->add_option("--c-const", conv.c_const, "Changing dimension c")->capture_default_str();
    v->add_option("--C-const", conv.C_const, "Changing dimension C (default C_0)");

    WeightsArgs wts;
    auto* w = app.add_subcommand("weights", "Decay, t*, sums and coordinate-graph bounds of a weight family");
    add_common(w, wts.common);
    w->add_option("--family", wts.family)
        ->check(CLI::IsMember({"product", "pod-example", "clique", "pairs", "file"}))
        ->capture_default_str();
    w->add_option("--p-star", wts.p_star)->capture_default_str();
    w->add_option("--q-star", wts.q_star)->capture_default_str();
    w->add_option("--clique-d", wts.clique_d)->capture_default_str();
    w->add_option("--coord-max", wts.coord_max)->capture_default_str();
    w->add_option("--pairs", wts.pairs)->capture_default_str();
    w->add_option("--sigma", wts.sigmas, "Cut-off orders")->delimiter(',')->capture_default_str();
    w->add_option("--terms", wts.terms, "Ordered weights used for decay fits")->capture_default_str();
    w->add_option("--c0", wts.c0, "C_0 in gamma_u C_0^|u| for the ordering and decay fits")->capture_default_str();

    AuditArgs aud;
    aud.common.alpha = 2;
    auto* u = app.add_subcommand("audit", "Embedding audit of kernel-atom functions against C_{3,alpha}");
    add_common(u, aud.common);
    u->add_option("--seeds", aud.seeds, "Number of seeded atom sets")->capture_default_str();
    u->add_option("--k-max", aud.k_max, "Largest Walsh index")->capture_default_str();
    u->add_option("--scale", aud.scale, "Factor on every atom coefficient")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        std::cerr << app.help();
        return kExitInvalid;
    }

    try {
        if (*c) return run_cbc(cbc);
        if (*v) return run_convergence_cmd(conv);
        if (*w) return run_weights(wts);
        if (*u) return run_audit(aud);
    } catch (const Error& e) {
        std::cerr << e.what() << '\n';
        return exit_code(e);
    } catch (const std::exception& e) {
        std::cerr << e.what() << '\n';
        return 1;
    }
    return 0;
}
