#include "infint/infdim.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <memory>
#include <sstream>

#include "infint/error.hpp"

namespace infint {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::uint64_t kMaxPairPoints = 8192;

// The node restricted to w: coordinates outside w move to the anchor.
QuadratureNode restrict_node(const QuadratureNode& node, const CoordinateSet& w) {
    QuadratureNode out;
    std::vector<std::uint32_t> keep;
    for (std::size_t k = 0; k < node.support.size(); ++k)
        if (w.contains(node.support[k])) {
            keep.push_back(node.support[k]);
            out.t.push_back(node.t[k]);
        }
    out.support = CoordinateSet(std::move(keep));
    out.a = node.a;
    return out;
}

// Largest m >= 1 with b^m <= max(n, b).
int floor_log(std::uint64_t n, std::uint32_t b) {
    int m = 1;
    for (std::uint64_t p = b; p <= n / b; p *= b) ++m;
    return m;
}

std::uint64_t ipow(std::uint64_t b, int e) {
    std::uint64_t r = 1;
    for (int i = 0; i < e; ++i) r *= b;
    return r;
}

// The family seen through positions 1..|v| of v.
WeightFamily relabel(const WeightFamily& w, const CoordinateSet& v) {
    WeightFamily out = w;
    if (w.kind() == WeightKind::Explicit) {
        std::map<CoordinateSet, double> kept;
        for (const auto& [u, g] : w.entries()) {
            if (u.empty() || !u.subset_of(v)) continue;
            std::vector<std::uint32_t> pos;
            for (auto j : u) pos.push_back(static_cast<std::uint32_t>(v.index_of(j) + 1));
            kept.emplace(CoordinateSet(std::move(pos)), g);
        }
        out = WeightFamily::explicit_map(std::move(kept));
    } else {
        std::vector<double> vals;
        for (auto j : v) vals.push_back(w.univariate()(j));
        const auto rule = UnivariateRule::finite(std::move(vals));
        switch (w.kind()) {
            case WeightKind::Product: out = WeightFamily::product(rule); break;
            case WeightKind::FiniteProduct: out = WeightFamily::finite_product(rule, w.order().max_order()); break;
            default: out = WeightFamily::pod(w.order(), rule); break;
        }
    }
    if (w.cutoff()) out = cutoff(out, *w.cutoff());
    return out;
}

bool plain_product(const WeightFamily& w) { return w.kind() == WeightKind::Product && !w.cutoff(); }

// Equal-weight rule from the first |support| columns of a builder.
Quadrature rule_from_builder(const CBCBuilder& builder, const CoordinateSet& support) {
    const std::size_t count = builder.spec().count();
    Quadrature q;
    q.nodes.resize(count);
    const double a = 1.0 / static_cast<double>(count);
    for (std::size_t h = 0; h < count; ++h) {
        q.nodes[h].support = support;
        q.nodes[h].a = a;
        q.nodes[h].t.resize(support.size());
        for (std::size_t j = 0; j < support.size(); ++j) q.nodes[h].t[j] = builder.column(j)[h];
    }
    return q;
}

PolyLatticeSpec truncated_spec(const CBCBuilder& builder, std::size_t s) {
    PolyLatticeSpec spec = builder.spec();
    spec.q.resize(std::min(s, spec.q.size()), Poly(spec.b));
    return spec;
}

// Sum over u outside v of gamma_u C_0^{|u|}.
ValueBound uncovered_sum(const CoordinateSet& v, const WeightedSpaceSpec& spec, double c0) {
    if (plain_product(spec.weights)) {
        const UnivariateRule& g = spec.weights.univariate();
        const std::uint32_t J = std::min(v.max() + spec.trunc.j_sum, g.support_size());
        long double covered = 0.0L, outside = 0.0L;
        for (std::uint32_t j = 1; j <= J; ++j) {
            const long double x = std::log1p(static_cast<long double>(g(j)) * c0);
            (v.contains(j) ? covered : outside) += x;
        }
        auto [lo1, hi1] = g.tail_power_sum(J, 1.0, c0);
        if (!std::isfinite(hi1)) throw Error(ErrorKind::DivergentSum, "univariate series diverges");
        const double r2 = g.tail_power_sum(J, 2.0, c0).second;
        const long double P = std::exp(covered);
        const long double lo = P * std::expm1(outside + lo1 - r2 / 2.0);
        const long double hi = P * std::expm1(outside + hi1);
        return {static_cast<double>(lo), static_cast<double>(hi - lo)};
    }
    const ValueBound total = power_sum(spec.weights, 1.0, c0, spec.trunc);
    long double inside = 0.0L;
    if (!v.empty()) {
        std::vector<std::pair<std::uint32_t, long double>> xs;
        for (auto j : v) xs.emplace_back(j, c0);
        inside = weighted_symmetric_sum(spec.weights, v, xs);
    }
    return {std::max(0.0, static_cast<double>(total.value - inside)), total.bound};
}

// Doubles (times b) the level with the largest drop of sigma_k N_k^{-2 tau} per unit of added cost while
// the budget allows, keeping the counts nonincreasing.
void fill_levels(const MLPlanned& planned, std::vector<int>& lm, double& cost, double budget, const MLSetup& setup,
                 std::uint64_t cap_m) {
    const CostModel& cm = setup.cost;
    const double b = setup.b, tau = setup.plan.tau;
    for (;;) {
        std::size_t best = lm.size();
        double best_gain = 0.0, best_add = 0.0;
        for (std::size_t k = 0; k < lm.size(); ++k) {
            if (k && lm[k] + 1 > lm[k - 1]) continue;
            if (planned.v[k].size() > 1 && static_cast<std::uint64_t>(lm[k]) + 1 > cap_m) continue;
            const double N = std::pow(b, lm[k]);
            const double per = cm.dollar(planned.v[k].size()) + (k ? cm.dollar(planned.v[k - 1].size()) : 0.0);
            const double add = N * (b - 1.0) * per;
            if (cost + add > budget) continue;
            const double gain = planned.sigma[k] * std::pow(N, -2.0 * tau) * (1.0 - std::pow(b, -2.0 * tau)) / add;
            if (gain > best_gain) {
                best = k;
                best_gain = gain;
                best_add = add;
            }
        }
        if (best == lm.size()) return;
        ++lm[best];
        cost += best_add;
    }
}

// Allocation for a fixed level count, rounded to powers of b and fitted to the budget.
std::optional<MLPlanned> fit_levels(const LevelPlan& plan, const MLSetup& setup, const WeightFamily& weights,
                                    const OrderedWeights& ordered, double budget, std::uint64_t cap_m) {
    const CostModel& cm = setup.cost;
    MLPlanned out;
    out.plan = plan;
    out.v = level_sets(plan, ordered);
    out.sigma = level_constants(plan, out.v, weights, setup.c_tau);
    std::vector<double> sizes;
    for (const auto& vk : out.v) sizes.push_back(static_cast<double>(vk.size()));
    double S = budget;
    for (int iter = 0; iter < 200; ++iter) {
        std::vector<std::uint64_t> n;
        try {
            n = ml_allocate(out.sigma, sizes, cm.s_exponent, plan.tau, S);
        } catch (const Error& e) {
            if (e.kind() == ErrorKind::BudgetTooSmall) return std::nullopt;
            throw;
        }
        std::vector<int> lm;
        double cost = cm.dollar(0);
        for (std::size_t k = 0; k < n.size(); ++k) {
            int mk = floor_log(n[k], setup.b);
            if (out.v[k].size() > 1) mk = std::min<int>(mk, static_cast<int>(cap_m));
            if (k) mk = std::min(mk, lm.back());
            lm.push_back(mk);
            const double N = static_cast<double>(ipow(setup.b, mk));
            cost += N * cm.dollar(out.v[k].size());
            if (k) cost += N * cm.dollar(out.v[k - 1].size());
        }
        if (cost <= budget) {
            fill_levels(out, lm, cost, budget, setup, cap_m);
            out.n_alloc = std::move(n);
            out.level_m = std::move(lm);
            out.fitted_budget = S;
            out.predicted_cost = cost;
            for (std::size_t k = 0; k < out.level_m.size(); ++k)
                out.error_model += out.sigma[k] * std::pow(static_cast<double>(setup.b), -2.0 * plan.tau * out.level_m[k]);
            return out;
        }
        S *= std::clamp(budget / cost, 0.5, 0.999);
    }
    return std::nullopt;
}

// Weight left outside v_m: sum_{j > L_m} gamma_j in prefix mode, the ordered tail in union mode.
double level_tail(const LevelPlan& plan, const CoordinateSet& vm, const WeightFamily& weights,
                  const OrderedWeights& ordered) {
    if (plan.mode == LevelMode::Union) return tail(ordered, plan.level_sizes().back()).value;
    if (weights.kind() == WeightKind::Explicit) {
        double s = 0.0;
        for (const auto& [u, g] : weights.entries())
            if (!u.empty() && !u.subset_of(vm)) s += g;
        return s;
    }
    const auto& g = weights.univariate();
    const auto [lo, hi] = g.tail_power_sum(vm.max(), 1.0);
    return 0.5 * (lo + hi);
}

}  // namespace

double CostModel::dollar(std::size_t k) const {
    return std::max(1.0, std::pow(static_cast<double>(k), s_exponent));
}

void LevelPlan::validate() const {
    if (L < 1 || !(a > 1.0)) throw Error(ErrorKind::InvalidParameters, "level plan needs L >= 1 and a > 1");
    if (!(tau >= 0.5)) throw Error(ErrorKind::InvalidParameters, "level plan needs tau >= 1/2");
    if (!(budget >= 0.0)) throw Error(ErrorKind::InvalidParameters, "budget must be nonnegative");
}

std::vector<std::uint32_t> LevelPlan::level_sizes() const {
    validate();
    std::vector<std::uint32_t> out;
    for (std::size_t k = 1; k <= m; ++k) {
        const double v = static_cast<double>(L) * std::ceil(std::pow(a, static_cast<double>(k - 1)) - 1e-12);
        if (v > 4e9) throw Error(ErrorKind::TooLarge, "level size overflows");
        const auto Lk = static_cast<std::uint32_t>(v);
        if (!out.empty() && Lk <= out.back())
            throw Error(ErrorKind::InvalidParameters, "level sizes must increase; raise a");
        out.push_back(Lk);
    }
    return out;
}

std::vector<CoordinateSet> level_sets(const LevelPlan& plan, const OrderedWeights& ordered) {
    const auto sizes = plan.level_sizes();
    std::vector<CoordinateSet> out;
    if (plan.mode == LevelMode::Prefix) {
        for (auto Lk : sizes) out.push_back(CoordinateSet::prefix(Lk));
        return out;
    }
    if (!sizes.empty() && ordered.entries.size() < sizes.back())
        throw Error(ErrorKind::TruncationInsufficient, "not enough ordered sets for the last level");
    CoordinateSet acc;
    std::size_t used = 0;
    for (auto Lk : sizes) {
        for (; used < Lk; ++used) acc = acc.unite(ordered.entries[used].u);
        out.push_back(acc);
    }
    return out;
}

std::vector<std::vector<std::size_t>> level_partition(const std::vector<CoordinateSet>& v,
                                                      const OrderedWeights& ordered) {
    std::vector<std::vector<std::size_t>> out(v.size());
    for (std::size_t j = 0; j < ordered.entries.size(); ++j)
        for (std::size_t k = 0; k < v.size(); ++k)
            if (ordered.entries[j].u.subset_of(v[k])) {
                out[k].push_back(j);
                break;
            }
    return out;
}

std::vector<std::uint64_t> ml_allocate(const std::vector<double>& sigma, const std::vector<double>& L_k, double s,
                                       double tau, double budget) {
    if (sigma.empty() || sigma.size() != L_k.size())
        throw Error(ErrorKind::InvalidParameters, "need one sigma per level");
    if (!(s >= 0.0) || !(tau > 0.0)) throw Error(ErrorKind::InvalidParameters, "need s >= 0 and tau > 0");
    double M = 0.0, denom = 0.0;
    const double e = 1.0 / (2.0 * tau + 1.0);
    for (std::size_t k = 0; k < sigma.size(); ++k) {
        if (!(sigma[k] > 0.0) || !(L_k[k] >= 1.0))
            throw Error(ErrorKind::InvalidParameters, "need sigma_k > 0 and L_k >= 1");
        M += std::pow(L_k[k], s);
        denom += std::pow(sigma[k], e) * std::pow(L_k[k], 2.0 * tau * s * e);
    }
    if (budget < M) throw Error(ErrorKind::BudgetTooSmall, "budget below sum of L_k^s");
    const double C = budget / denom;
    std::vector<std::uint64_t> n(sigma.size());
    for (std::size_t k = 0; k < sigma.size(); ++k) {
        const double x = C * std::pow(sigma[k], e) * std::pow(L_k[k], -s * e);
        // rounding noise must not push an exact integer to the next one
        n[k] = static_cast<std::uint64_t>(std::max(1.0, std::ceil(x * (1.0 - 1e-12))));
        if (k) n[k] = std::min(n[k], n[k - 1]);
    }
    return n;
}

std::vector<double> level_constants(const LevelPlan& plan, const std::vector<CoordinateSet>& v,
                                    const WeightFamily& weights, double c_tau) {
    std::vector<double> out;
    const bool expl = weights.kind() == WeightKind::Explicit;
    // sum of gamma_u over u with max(u) = l
    auto by_max = [&](std::uint32_t l, double inv_tau) {
        long double s = 0.0L;
        for (const auto& [u, g] : weights.entries())
            if (u.max() == l && g > 0.0 && !(weights.cutoff() && u.size() > *weights.cutoff()))
                s += std::pow(static_cast<long double>(g), inv_tau) *
                     std::pow(static_cast<long double>(c_tau), static_cast<long double>(u.size()));
        return static_cast<double>(s);
    };
    CoordinateSet prev;
    for (const auto& vk : v) {
        long double s = 0.0L;
        for (auto l : vk.minus(prev)) {
            if (plan.mode == LevelMode::Prefix) {
                s += expl ? by_max(l, 1.0) : weights.univariate()(l);
            } else {
                const double inner = expl ? by_max(l, 1.0 / (2.0 * plan.tau))
                                          : pod_anchored_sum(weights, l, 1.0 / (2.0 * plan.tau), c_tau);
                s += std::pow(static_cast<long double>(inner), 2.0L * plan.tau);
            }
        }
        out.push_back(static_cast<double>(s));
        prev = vk;
    }
    return out;
}

MultilevelAlgo ml_assemble(std::vector<CoordinateSet> v, std::vector<Quadrature> rules, double anchor) {
    if (v.size() != rules.size()) throw Error(ErrorKind::InvalidParameters, "need one rule per level");
    MultilevelAlgo algo;
    algo.anchor = anchor;
    for (std::size_t k = 1; k < v.size(); ++k)
        if (!v[k - 1].subset_of(v[k])) throw Error(ErrorKind::InvalidParameters, "level sets must be nested");
    for (std::size_t k = 0; k < v.size(); ++k) {
        for (const auto& node : rules[k].nodes)
            if (!node.support.subset_of(v[k]))
                throw Error(ErrorKind::InvalidParameters, "rule node outside its level set");
        algo.levels.push_back({std::move(v[k]), std::move(rules[k]), std::nullopt});
    }
    return algo;
}

CBCRuleSource::CBCRuleSource(WeightedSpaceSpec space, Options options)
    : space_(std::move(space)), options_(options) {}

CBCConfig CBCRuleSource::config(int m, WeightFamily weights) const {
    CBCConfig c;
    c.b = options_.b;
    c.m = m;
    c.alpha = options_.alpha;
    c.weights = std::move(weights);
    c.kernel = space_.kernel;
    c.seed = options_.seed;
    c.candidate_cap = options_.candidate_cap;
    c.sample_size = options_.sample_size;
    c.pairwise_work = options_.pairwise_work;
    return c;
}

MLLevel CBCRuleSource::rule(const CoordinateSet& v, int m) {
    if (v.empty()) throw Error(ErrorKind::InvalidParameters, "rule needs a nonempty coordinate set");
    if (v.max() == v.size()) {
        auto it = prefix_.find(m);
        if (it == prefix_.end()) it = prefix_.emplace(m, CBCBuilder(config(m, space_.weights))).first;
        it->second.extend(v.size());
        return {v, rule_from_builder(it->second, v), truncated_spec(it->second, v.size())};
    }
    CBCBuilder builder(config(m, relabel(space_.weights, v)));
    builder.extend(v.size());
    return {v, rule_from_builder(builder, v), truncated_spec(builder, v.size())};
}

std::vector<double> CBCRuleSource::criteria(int m, std::size_t s) {
    auto it = prefix_.find(m);
    if (it == prefix_.end()) it = prefix_.emplace(m, CBCBuilder(config(m, space_.weights))).first;
    it->second.extend(s);
    const auto& all = it->second.per_component_criterion();
    return {all.begin(), all.begin() + static_cast<std::ptrdiff_t>(s)};
}

MultilevelAlgo ml_build(const std::vector<CoordinateSet>& v, const std::vector<int>& level_m, CBCRuleSource& source,
                        double anchor) {
    if (v.size() != level_m.size()) throw Error(ErrorKind::InvalidParameters, "need one point count per level");
    MultilevelAlgo algo;
    algo.anchor = anchor;
    for (std::size_t k = 0; k < v.size(); ++k) {
        if (k && !v[k - 1].subset_of(v[k])) throw Error(ErrorKind::InvalidParameters, "level sets must be nested");
        algo.levels.push_back(source.rule(v[k], level_m[k]));
    }
    return algo;
}

Quadrature flatten(const MultilevelAlgo& algo) {
    Quadrature out;
    out.nodes.push_back({CoordinateSet{}, {}, 1.0});
    CoordinateSet prev;
    for (const auto& level : algo.levels) {
        for (const auto& node : level.rule.nodes) {
            out.nodes.push_back(node);
            QuadratureNode r = restrict_node(node, prev);
            if (r.support.empty()) {
                out.nodes[0].a -= node.a;
                continue;
            }
            r.a = -node.a;
            out.nodes.push_back(std::move(r));
        }
        prev = level.v;
    }
    return out;
}

double quadrature_apply(const Quadrature& q, const Integrand& f) {
    long double s = 0.0L;
    for (const auto& node : q.nodes) s += node.a * static_cast<long double>(f(node.support, node.t));
    return static_cast<double>(s);
}

double ml_apply(const MultilevelAlgo& algo, const Integrand& f) {
    const double fc = f(CoordinateSet{}, {});
    long double s = fc;
    CoordinateSet prev;
    for (const auto& level : algo.levels) {
        for (const auto& node : level.rule.nodes) {
            const QuadratureNode r = restrict_node(node, prev);
            const double low = r.support.empty() ? fc : f(r.support, r.t);
            s += node.a * (static_cast<long double>(f(node.support, node.t)) - low);
        }
        prev = level.v;
    }
    return static_cast<double>(s);
}

ValueBound ml_error_exact(const MultilevelAlgo& algo, const WeightedSpaceSpec& spec) {
    const AnchoredKernel kernel(spec.kernel);
    long double covered = 0.0L;
    CoordinateSet prev;
    for (const auto& level : algo.levels) {
        covered += subset_error_sum(level.rule, level.v, spec.weights, kernel);
        if (!prev.empty()) covered -= subset_error_sum(level.rule, prev, spec.weights, kernel);
        prev = level.v;
    }
    const ValueBound tail = uncovered_sum(prev, spec, kernel.c0());
    return {std::max(0.0, static_cast<double>(covered + tail.value)), tail.bound};
}

double ml_cost_bound(const MultilevelAlgo& algo, const CostModel& model) {
    double c = model.dollar(0);
    for (const auto& level : algo.levels)
        c += 2.0 * static_cast<double>(level.rule.size()) * model.dollar(level.v.size());
    return c;
}

MLPlanned ml_plan_for_budget(const MLSetup& setup, const WeightFamily& weights, const OrderedWeights& ordered,
                             double budget) {
    LevelPlan plan = setup.plan;
    plan.budget = budget;
    plan.validate();
    const CostModel& cm = setup.cost;
    std::size_t m_max = 0;
    for (std::size_t m = 1;; ++m) {
        plan.m = m;
        std::vector<CoordinateSet> v;
        try {
            v = level_sets(plan, ordered);
        } catch (const Error& e) {
            if (e.kind() == ErrorKind::TruncationInsufficient || e.kind() == ErrorKind::TooLarge) break;
            throw;
        }
        double sum = 0.0;
        for (const auto& vk : v) sum += cm.dollar(vk.size());
        if (sum > setup.level_share * budget) break;
        m_max = m;
    }
    const std::uint64_t cap_m = static_cast<std::uint64_t>(floor_log(kMaxPairPoints, setup.b));
    std::optional<MLPlanned> best;
    for (std::size_t m = 1; m <= m_max; ++m) {
        plan.m = m;
        auto cand = fit_levels(plan, setup, weights, ordered, budget, cap_m);
        if (!cand) continue;
        cand->error_model += level_tail(plan, cand->v.back(), weights, ordered);
        if (!best || cand->error_model < best->error_model) best = std::move(cand);
    }
    if (!best) throw Error(ErrorKind::BudgetTooSmall, "no level count fits the budget");
    return *best;
}

// ---------------------------------------------------------------- changing dimension

CDAllocation cd_allocate(const WeightedSpaceSpec& spec, const CDParams& p) {
    const double c0 = AnchoredKernel(spec.kernel).c0();
    if (!(p.decay > 1.0)) throw Error(ErrorKind::InvalidParameters, "changing dimension needs decay > 1");
    if (!(p.lambda0 > 0.0 && p.lambda0 < 1.0 - 1.0 / p.decay))
        throw Error(ErrorKind::InvalidParameters, "lambda0 must lie in (0, 1 - 1/decay)");
    if (!(p.tau > 0.0 && p.tau < p.lambda0 * p.decay / 2.0))
        throw Error(ErrorKind::InvalidParameters, "tau must lie in (0, lambda0 decay / 2)");
    if (!(p.c_const >= 1.0) || !(p.C_const >= c0))
        throw Error(ErrorKind::InvalidParameters, "need c >= 1 and C >= C_0");
    if (!(p.epsilon > 0.0)) throw Error(ErrorKind::InvalidParameters, "epsilon must be positive");

    CDAllocation out;
    out.L_value = big_L(spec.weights, 1.0 - p.lambda0, spec.trunc).value;
    const double scale = out.L_value * p.c_const / (p.epsilon * p.epsilon);
    // gamma_u^lambda0 L c C^{|u|} > eps^2  <=>  gamma_u (C^{1/lambda0})^{|u|} > (eps^2 / (L c))^{1/lambda0}
    const double boost = std::pow(p.C_const, 1.0 / p.lambda0);
    const double thr = std::pow(1.0 / scale, 1.0 / p.lambda0);
    std::size_t largest = 0;
    for (const auto& e : enumerate_above(spec.weights, boost, thr)) {
        const double g = weight_of(spec.weights, e.u);
        const double base = std::pow(g, p.lambda0) * scale * std::pow(p.C_const, static_cast<double>(e.u.size()));
        // rounding noise in eps^2 must not drop an exact integer to the one below
        const auto n = static_cast<std::uint64_t>(std::floor(std::pow(base, 1.0 / (2.0 * p.tau)) * (1.0 + 1e-12)));
        if (n == 0) continue;
        out.n[e.u] = n;
        largest = std::max(largest, e.u.size());
    }
    if (spec.weights.kind() == WeightKind::Explicit) {
        out.d_eps = largest;
        return out;
    }
    // log of c C^l L gamma_[l]^lambda0 / eps^2, accumulated over l
    const double lc = std::log(scale), lC = std::log(p.C_const);
    double log_gamma = 0.0;
    const unsigned kmax = std::min<unsigned>(spec.weights.max_cardinality(), 4096);
    for (unsigned l = 1; l <= kmax; ++l) {
        const double g = spec.weights.univariate()(l);
        if (!(g > 0.0)) break;
        log_gamma += std::log(g);
        const double lG = spec.weights.log_order_factor(l);
        if (!std::isfinite(lG)) continue;
        if (lc + l * lC + p.lambda0 * (log_gamma + lG) > 0.0) out.d_eps = l;
    }
    return out;
}

ChangingDimAlgo cd_build(const CDAllocation& alloc, const WeightedSpaceSpec& spec, const CBCRuleSource::Options& opts) {
    ChangingDimAlgo algo;
    algo.anchor = spec.kernel.c;
    // Q_{n_u,u} only meets f_u, so only the top-order projection matters; large equal product weights make
    // it dominate the criterion of every component
    CBCRuleSource source({spec.kernel, WeightFamily::product(UnivariateRule::power_law(1e3, 0.0)), spec.trunc}, opts);
    const int cap_m = floor_log(kMaxPairPoints, opts.b);
    for (const auto& [u, n] : alloc.n) {
        // n_u < b keeps the zero rule: e^2 = C_0^{|u|} <= b^{2 tau} C^{|u|} (n_u + 1)^{-2 tau}
        if (n < opts.b) continue;
        int m = floor_log(n, opts.b);
        if (u.size() > 1) m = std::min(m, cap_m);
        MLLevel lvl = source.rule(CoordinateSet::prefix(static_cast<std::uint32_t>(u.size())), m);
        for (auto& node : lvl.rule.nodes) node.support = u;
        algo.terms[u] = {n, std::move(lvl.rule)};
    }
    return algo;
}

double cd_apply(const ChangingDimAlgo& algo, const Integrand& f) {
    const double fc = f(CoordinateSet{}, {});
    long double s = fc;
    for (const auto& [u, term] : algo.terms) {
        const std::size_t k = u.size();
        if (k > 30) throw Error(ErrorKind::TooLarge, "inclusion-exclusion limited to 30 coordinates");
        for (const auto& node : term.rule.nodes) {
            long double fu = 0.0L;
            for (std::uint32_t mask = 0; mask < (1u << k); ++mask) {
                std::vector<std::uint32_t> sub;
                std::vector<double> t;
                for (std::size_t i = 0; i < k; ++i)
                    if (mask >> i & 1) {
                        sub.push_back(u[i]);
                        t.push_back(node.t[i]);
                    }
                const double val = sub.empty() ? fc : f(CoordinateSet(std::move(sub)), t);
                fu += ((k - static_cast<std::size_t>(std::popcount(mask))) % 2 ? -1.0L : 1.0L) * val;
            }
            s += node.a * fu;
        }
    }
    return static_cast<double>(s);
}

ValueBound cd_error_exact(const ChangingDimAlgo& algo, const WeightedSpaceSpec& spec) {
    const AnchoredKernel kernel(spec.kernel);
    const ValueBound total = power_sum(spec.weights, 1.0, kernel.c0(), spec.trunc);
    long double gain = 0.0L;
    for (const auto& [u, term] : algo.terms) {
        const long double init = std::pow(static_cast<long double>(kernel.c0()), static_cast<long double>(u.size()));
        gain += weight_of(spec.weights, u) * (init - wce_projected_sq(term.rule, u, kernel));
    }
    return {std::max(0.0, static_cast<double>(total.value - gain)), total.bound};
}

double cd_cost(const ChangingDimAlgo& algo, const CostModel& model) {
    double c = model.dollar(0);
    for (const auto& [u, term] : algo.terms)
        c += static_cast<double>(term.rule.size()) * std::ldexp(1.0, static_cast<int>(u.size())) *
             model.dollar(u.size());
    return c;
}

double cd_planned_cost(const CDAllocation& alloc, std::uint32_t b, const CostModel& model) {
    const int cap_m = floor_log(kMaxPairPoints, b);
    double c = model.dollar(0);
    for (const auto& [u, n] : alloc.n) {
        if (n < b) continue;
        int m = floor_log(n, b);
        if (u.size() > 1) m = std::min(m, cap_m);
        c += static_cast<double>(ipow(b, m)) * std::ldexp(1.0, static_cast<int>(u.size())) * model.dollar(u.size());
    }
    return c;
}

double cd_epsilon_for_budget(const WeightedSpaceSpec& spec, CDParams params, std::uint32_t b, const CostModel& model,
                             double budget) {
    auto cost_at = [&](double eps) {
        params.epsilon = eps;
        return cd_planned_cost(cd_allocate(spec, params), b, model);
    };
    if (cost_at(1e6) > budget) throw Error(ErrorKind::BudgetTooSmall, "budget below the constant algorithm");
    // the planned cost only grows as epsilon shrinks
    double hi = 1e6, lo = hi;
    while (true) {
        lo = hi / 2.0;
        if (lo < 1e-12) return hi;
        if (cost_at(lo) > budget) break;
        hi = lo;
    }
    while (hi / lo > 1.001) {
        const double mid = std::sqrt(lo * hi);
        (cost_at(mid) > budget ? lo : hi) = mid;
    }
    return hi;
}

// ---------------------------------------------------------------- costs

double cost_unrestricted(const Quadrature& q, const CostModel& model) {
    if (model.variant != CostVariant::Unrestricted)
        throw Error(ErrorKind::InvalidParameters, "cost_unrestricted needs the unrestricted model");
    double c = 0.0;
    for (const auto& node : q.nodes) c += model.dollar(node.support.size());
    return c;
}

NestedCost cost_nested(const Quadrature& q, const CostModel& model) {
    if (model.variant != CostVariant::Nested)
        throw Error(ErrorKind::InvalidParameters, "cost_nested needs the nested model");
    std::map<CoordinateSet, double> counts;
    double lower = 0.0;
    for (const auto& node : q.nodes) {
        counts[node.support] += 1.0;
        lower += model.dollar(node.support.size());
    }
    std::vector<CoordinateSet> sup;
    std::vector<double> cnt;
    for (const auto& [u, c] : counts) {
        sup.push_back(u);
        cnt.push_back(c);
    }
    const std::size_t r = sup.size();
    if (r == 0) return {0.0, true};
    if (r > 12) {
        CoordinateSet acc;
        double c = 0.0;
        for (std::size_t i = 0; i < r; ++i) {
            acc = acc.unite(sup[i]);
            c += cnt[i] * model.dollar(acc.size());
        }
        return {c, c <= lower * (1.0 + 1e-12)};
    }
    // Chain elements may be taken as unions of the supports assigned so far, so the search runs over
    // ordered partitions of the supports: dp[A] is the cheapest chain covering exactly the supports in A.
    const std::size_t full = (std::size_t{1} << r) - 1;
    std::vector<double> union_cost(full + 1, 0.0), block(full + 1, 0.0);
    auto visit = [&](auto&& self, std::size_t start, std::size_t mask, const CoordinateSet& acc) -> void {
        union_cost[mask] = model.dollar(acc.size());
        for (std::size_t i = start; i < r; ++i) self(self, i + 1, mask | std::size_t{1} << i, acc.unite(sup[i]));
    };
    visit(visit, 0, 0, CoordinateSet{});
    for (std::size_t mask = 1; mask <= full; ++mask)
        block[mask] = block[mask & (mask - 1)] + cnt[static_cast<std::size_t>(std::countr_zero(mask))];
    std::vector<double> dp(full + 1, kInf);
    dp[0] = 0.0;
    for (std::size_t A = 0; A < full; ++A) {
        if (dp[A] == kInf) continue;
        const std::size_t rest = full & ~A;
        for (std::size_t B = rest; B; B = (B - 1) & rest) {
            const double c = dp[A] + block[B] * union_cost[A | B];
            if (c < dp[A | B]) dp[A | B] = c;
        }
    }
    return {dp[full], true};
}

// ---------------------------------------------------------------- exponents

RatePrediction predict_exponents(WeightClass weight_class, const std::map<unsigned, double>& decay,
                                 const std::map<unsigned, double>& t_star, double alpha, double s) {
    if (decay.empty()) throw Error(ErrorKind::InvalidParameters, "need at least one decay value");
    if (!(alpha > 0.0) || !(s >= 0.0)) throw Error(ErrorKind::InvalidParameters, "need alpha > 0 and s >= 0");
    RatePrediction r;
    const double d_inf = decay.rbegin()->second;
    const double d1 = decay.begin()->second;
    if (!(d_inf > 1.0)) {
        r.strongly_tractable = false;
        r.lower_nes = r.lower_unr = r.upper_nes = r.upper_unr = kInf;
        r.case_tag = "not_strongly_tractable";
        return r;
    }
    const double base = 1.0 / alpha;
    const double smin = std::min(1.0, s);
    switch (weight_class) {
        case WeightClass::Pod: {
            r.lower_nes = std::max(base, 2.0 * s / (d1 - 1.0));
            r.lower_unr = std::max(base, 2.0 * smin / (d1 - 1.0));
            if (s >= (2.0 * alpha - 1.0) / (2.0 * alpha)) {
                r.upper_nes = std::max(base, 2.0 * s / (d1 - 1.0));
                r.case_tag = "pod_s_large";
            } else if (d1 >= 2.0 * alpha) {
                r.upper_nes = base;
                r.case_tag = "pod_decay_ge_2alpha";
            } else if (d1 > 1.0 / (1.0 - s)) {
                r.upper_nes = 2.0 / d1;
                r.case_tag = "pod_decay_mid";
            } else {
                r.upper_nes = 2.0 * s / (d1 - 1.0);
                r.case_tag = "pod_decay_low";
            }
            r.upper_unr = s >= (2.0 * alpha - 1.0) / (2.0 * alpha) ? std::max(base, 2.0 * smin / (d1 - 1.0))
                                                                   : r.upper_nes;
            return r;
        }
        case WeightClass::FiniteIntersection:
        case WeightClass::FiniteAlgDim: {
            r.upper_nes = std::max(base, 2.0 * s / (d_inf - 1.0));
            r.upper_unr = std::max(base, 2.0 * smin / (d_inf - 1.0));
            if (weight_class == WeightClass::FiniteIntersection) {
                r.lower_nes = r.upper_nes;
                r.lower_unr = r.upper_unr;
                r.case_tag = "finite_intersection";
                return r;
            }
            r.case_tag = "finite_alg_dim";
            break;
        }
        case WeightClass::General:
            r.upper_nes = r.upper_unr = kInf;
            r.case_tag = "general";
            break;
    }
    r.lower_nes = r.lower_unr = base;
    for (const auto& [sigma, d] : decay) {
        auto it = t_star.find(sigma);
        if (it == t_star.end() || !(d > 1.0) || !(it->second > 0.0)) continue;
        r.lower_nes = std::max(r.lower_nes, 2.0 * s / it->second / (d - 1.0));
        r.lower_unr = std::max(r.lower_unr, 2.0 * std::min(1.0, s / it->second) / (d - 1.0));
    }
    return r;
}

// ---------------------------------------------------------------- integrands

Integrand representer_integrand(const WeightedSpaceSpec& spec) {
    const auto kernel = std::make_shared<AnchoredKernel>(spec.kernel);
    const WeightFamily weights = spec.weights;
    return [kernel, weights](const CoordinateSet& support, const std::vector<double>& t) {
        std::vector<std::pair<std::uint32_t, long double>> xs;
        for (std::size_t k = 0; k < support.size(); ++k) xs.emplace_back(support[k], kernel->integral(t[k]));
        const long double w = support.empty() ? 0.0L : weighted_symmetric_sum(weights, support, xs);
        return static_cast<double>(weights.empty_weight() + w);
    };
}

Integrand anchored_product_integrand(const CoordinateSet& w, double c) {
    return [w, c](const CoordinateSet& support, const std::vector<double>& t) {
        double prod = 1.0;
        for (auto j : w) {
            const auto pos = support.index_of(j);
            if (pos < 0) return 0.0;
            prod *= t[static_cast<std::size_t>(pos)] - c;
        }
        return prod;
    };
}

// ---------------------------------------------------------------- manifests

std::string ml_manifest(const MLPlanned& planned, const MultilevelAlgo& algo,
                        const std::vector<std::string>& point_files) {
    std::ostringstream out;
    out.precision(17);
    const LevelPlan& p = planned.plan;
    out << "L = " << p.L << "\na = " << p.a << "\nm = " << p.m
        << "\nmode = " << (p.mode == LevelMode::Prefix ? "prefix" : "union") << "\ntau = " << p.tau
        << "\nbudget = " << p.budget << "\nfitted_budget = " << planned.fitted_budget
        << "\nlevel,support_size,points,allocated,sigma,point_file\n";
    for (std::size_t k = 0; k < algo.levels.size(); ++k) {
        out << k + 1 << ',' << algo.levels[k].v.size() << ',' << algo.levels[k].rule.size() << ','
            << (k < planned.n_alloc.size() ? planned.n_alloc[k] : 0) << ','
            << (k < planned.sigma.size() ? planned.sigma[k] : 0.0) << ','
            << (k < point_files.size() ? point_files[k] : "") << '\n';
    }
    return out.str();
}

std::string cd_manifest(const CDParams& params, const CDAllocation& alloc, const ChangingDimAlgo& algo) {
    std::ostringstream out;
    out.precision(17);
    out << "lambda0 = " << params.lambda0 << "\ntau = " << params.tau << "\nc = " << params.c_const
        << "\nC = " << params.C_const << "\nepsilon = " << params.epsilon << "\nd_eps = " << alloc.d_eps
        << "\nL = " << alloc.L_value << "\nset,allocated,points\n";
    for (const auto& [u, term] : algo.terms) {
        std::string name;
        for (auto j : u) name += (name.empty() ? "" : " ") + std::to_string(j);
        out << '"' << name << "\"," << term.n_alloc << ',' << term.rule.size() << '\n';
    }
    return out.str();
}

}  // namespace infint
