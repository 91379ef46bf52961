#include "infint/cbc.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <unordered_set>

#include "infint/error.hpp"
#include "infint/walsh.hpp"

namespace infint {

namespace {

constexpr std::size_t kGenericPairs = 4096, kProductPairs = 8192;

std::uint64_t ipow(std::uint64_t b, int e) {
    std::uint64_t r = 1;
    for (int i = 0; i < e; ++i) r *= b;
    return r;
}

// Digitwise addition mod b of g-digit blocks (b^g <= 256) by table lookup.
struct BlockAdder {
    std::size_t g = 1, B = 1;
    std::vector<std::uint8_t> table;
};

const BlockAdder& block_adder(std::uint32_t b) {
    thread_local std::map<std::uint32_t, BlockAdder> cache;
    auto [it, fresh] = cache.try_emplace(b);
    BlockAdder& a = it->second;
    if (!fresh) return a;
    while (ipow(b, static_cast<int>(a.g + 1)) <= 256) ++a.g;
    a.B = ipow(b, static_cast<int>(a.g));
    a.table.resize(a.B * a.B);
    for (std::size_t x = 0; x < a.B; ++x)
        for (std::size_t y = 0; y < a.B; ++y) {
            std::size_t z = 0, xx = x, yy = y, w = 1;
            for (std::size_t i = 0; i < a.g; ++i, xx /= b, yy /= b, w *= b) z += ((xx % b + yy % b) % b) * w;
            a.table[x * a.B + y] = static_cast<std::uint8_t>(z);
        }
    return a;
}

// Unshifted lattice coordinate as integers: point h has value keys[h] * b^-n.
std::vector<std::uint64_t> lattice_keys(const PolyLatticeSpec& spec, const Poly& q) {
    const std::uint32_t b = spec.b;
    const std::size_t count = spec.count();
    const std::size_t n = static_cast<std::size_t>(spec.n);
    const auto basis = lattice_basis(spec, q);
    std::vector<std::uint64_t> keys(count, 0);
    if (b == 2) {
        // digit l (weight 2^-l-1) sits at bit n-1-l, so digitwise addition is xor
        std::vector<std::uint64_t> rows(basis.size(), 0);
        for (std::size_t r = 0; r < basis.size(); ++r)
            for (std::size_t l = 0; l < n; ++l) rows[r] |= std::uint64_t{basis[r][l]} << (n - 1 - l);
        // clearing the lowest set bit of h gives the point one basis row away
        for (std::size_t h = 1; h < count; ++h)
            keys[h] = keys[h & (h - 1)] ^ rows[static_cast<std::size_t>(std::countr_zero(h))];
        return keys;
    }
    const BlockAdder& adder = block_adder(b);
    const std::size_t g = adder.g, B = adder.B, blocks = (n + g - 1) / g;
    const std::uint8_t* add = adder.table.data();
    // block i holds digits l in [i g, (i+1) g), the last digit in the block is least significant
    auto pack = [&](const std::vector<std::uint8_t>& dig) {
        std::vector<std::uint8_t> out(blocks, 0);
        for (std::size_t i = 0; i < blocks; ++i) {
            std::size_t v = 0;
            for (std::size_t l = i * g; l < (i + 1) * g; ++l) v = v * b + (l < n ? dig[l] : 0u);
            out[i] = static_cast<std::uint8_t>(v);
        }
        return out;
    };
    std::vector<std::vector<std::uint8_t>> rows;
    for (const auto& r : basis) rows.push_back(pack(r));
    // key = sum_i block_i * B^{blocks-1-i} / b^{blocks g - n}
    std::vector<std::uint64_t> weight(blocks);
    for (std::size_t i = blocks; i-- > 0;) weight[i] = i + 1 == blocks ? 1 : weight[i + 1] * B;
    const std::uint64_t pad = ipow(b, static_cast<int>(blocks * g - n));
    std::vector<std::uint8_t> pts(count * blocks, 0);
    std::vector<std::uint32_t> odometer(static_cast<std::size_t>(spec.m) + 1, 0);
    for (std::size_t h = 1; h < count; ++h) {
        std::size_t r = 0, stride = 1;  // b^r for the lowest nonzero digit r of h
        while (++odometer[r] == b) {
            odometer[r++] = 0;
            stride *= b;
        }
        const std::uint8_t* prev = &pts[(h - stride) * blocks];
        std::uint8_t* cur = &pts[h * blocks];
        const std::uint8_t* row = rows[r].data();
        std::uint64_t k = 0;
        for (std::size_t i = 0; i < blocks; ++i) {
            cur[i] = add[prev[i] * B + row[i]];
            k += cur[i] * weight[i];
        }
        keys[h] = k / pad;
    }
    return keys;
}

// Point values from keys with the anchor collision replaced.
struct KeyScale {
    double scale, anchor, nudged;

    KeyScale(const PolyLatticeSpec& spec, double c)
        : scale(std::pow(static_cast<double>(spec.b), -spec.n)), anchor(c),
          nudged(anchor_perturbation(c, spec.b, spec.n)) {}

    double operator()(std::uint64_t key) const {
        const double v = static_cast<double>(key) * scale;
        return v == anchor ? nudged : v;
    }
};

std::vector<double> lattice_column(const PolyLatticeSpec& spec, const Poly& q, double anchor) {
    const auto keys = lattice_keys(spec, q);
    const KeyScale value(spec, anchor);
    std::vector<double> col(keys.size());
    for (std::size_t h = 0; h < keys.size(); ++h) col[h] = value(keys[h]);
    return col;
}

// sum over u in [d] containing d of gamma_u prod_{j in u, j < d} x_j
long double forced_sum(const WeightFamily& w, std::uint32_t d, std::vector<std::pair<std::uint32_t, long double>>& xs) {
    const CoordinateSet v = CoordinateSet::prefix(d);
    xs.back() = {d, 1.0L};
    const long double with = weighted_symmetric_sum(w, v, xs);
    xs.back() = {d, 0.0L};
    const long double without = weighted_symmetric_sum(w, v, xs);
    return with - without;
}

// Evaluates the component-d criterion for candidate columns; prefix data is built once.
class ComponentCriterion {
public:
    ComponentCriterion(const std::vector<std::vector<double>>& prefix_cols, const WeightFamily& weights,
                       const AnchoredKernel& kernel, const PolyLatticeSpec& spec)
        : kernel_(kernel), count_(spec.count()), value_(spec, kernel.params().c),
          bucket_div_(ipow(spec.b, spec.n - spec.m)) {
        const std::size_t count = count_;
        const std::uint32_t d = static_cast<std::uint32_t>(prefix_cols.size() + 1);
        std::vector<std::pair<std::uint32_t, long double>> xs(d);
        for (std::uint32_t j = 1; j < d; ++j) xs[j - 1] = {j, kernel.c0()};
        const long double bc = forced_sum(weights, d, xs);
        constant_ = kernel.c0() * bc;
        col_.resize(count);
        if (d == 1) {
            scalar_ = bc;
            keys_.resize(count);
            starts_.resize(count + 1);
            return;
        }
        if (count > kGenericPairs) throw Error(ErrorKind::BudgetExceeded, "pairwise criterion limited to 4096 points");
        bg_.resize(count);
        for (std::size_t i = 0; i < count; ++i) {
            for (std::uint32_t j = 1; j < d; ++j) xs[j - 1] = {j, kernel.integral(prefix_cols[j - 1][i])};
            bg_[i] = forced_sum(weights, d, xs);
        }
        bk_store_.resize(count * (count + 1) / 2);
        std::size_t at = 0;
        for (std::size_t i = 0; i < count; ++i)
            for (std::size_t k = i; k < count; ++k) {
                for (std::uint32_t j = 1; j < d; ++j)
                    xs[j - 1] = {j, kernel.eval(prefix_cols[j - 1][i], prefix_cols[j - 1][k])};
                bk_store_[at++] = static_cast<double>(forced_sum(weights, d, xs));
            }
        bk_ = bk_store_.data();
    }

    // Product weights: the forced sums are gamma_d times running products over earlier components.
    ComponentCriterion(long double gamma_d, long double prod_c, const std::vector<long double>& prod_g,
                       const std::vector<double>& prod_k, const AnchoredKernel& kernel, const PolyLatticeSpec& spec)
        : kernel_(kernel), count_(spec.count()), value_(spec, kernel.params().c),
          bucket_div_(ipow(spec.b, spec.n - spec.m)), scale_(gamma_d) {
        constant_ = kernel.c0() * gamma_d * prod_c;
        col_.resize(count_);
        bg_.resize(count_);
        for (std::size_t i = 0; i < count_; ++i) bg_[i] = gamma_d * prod_g[i];
        bk_ = prod_k.data();
    }

    double operator()(const std::vector<std::uint64_t>& keys) {
        const long double inv_n = 1.0L / count_;
        if (bg_.empty()) {
            if (scalar_ == 0.0L) return 0.0;
            sort_keys(keys);
            for (std::size_t i = 0; i < count_; ++i) col_[i] = value_(keys_[i]);
            const auto [lin, quad] = kernel_.unit_sums(col_);
            return static_cast<double>(scalar_ * (kernel_.c0() - 2.0L * lin * inv_n + quad * inv_n * inv_n));
        }
        for (std::size_t i = 0; i < count_; ++i) col_[i] = value_(keys[i]);
        long double s1 = 0.0L, s2 = 0.0L;
        std::size_t at = 0;
        for (std::size_t i = 0; i < count_; ++i) {
            s1 += bg_[i] * kernel_.integral(col_[i]);
            s2 += bk_[at++] * kernel_.eval(col_[i], col_[i]);
            long double row = 0.0L;
            for (std::size_t k = i + 1; k < count_; ++k) row += bk_[at++] * kernel_.eval(col_[i], col_[k]);
            s2 += 2.0L * row;
        }
        return static_cast<double>(constant_ - 2.0L * s1 * inv_n + scale_ * s2 * inv_n * inv_n);
    }

private:
    // Counting sort on the leading m digits; lattice points spread over those cells, so the
    // insertion pass touches few elements.
    void sort_keys(const std::vector<std::uint64_t>& keys) {
        std::fill(starts_.begin(), starts_.end(), 0);
        for (auto k : keys) ++starts_[k / bucket_div_ + 1];
        for (std::size_t i = 1; i <= count_; ++i) starts_[i] += starts_[i - 1];
        for (auto k : keys) keys_[starts_[k / bucket_div_]++] = k;
        for (std::size_t i = 1; i < count_; ++i) {
            const std::uint64_t k = keys_[i];
            std::size_t j = i;
            for (; j > 0 && keys_[j - 1] > k; --j) keys_[j] = keys_[j - 1];
            keys_[j] = k;
        }
    }

    const AnchoredKernel& kernel_;
    std::size_t count_;
    KeyScale value_;
    std::uint64_t bucket_div_;
    long double constant_ = 0.0L, scalar_ = 0.0L, scale_ = 1.0L;
    std::vector<long double> bg_;
    std::vector<double> bk_store_;
    const double* bk_ = nullptr;  // upper triangle, row major, times scale_
    std::vector<double> col_;
    std::vector<std::uint64_t> keys_;
    std::vector<std::size_t> starts_;
};

// Candidate encodings for one component, ascending. The first component only needs monic candidates:
// scaling q by a unit permutes h and leaves the point set unchanged, and the monic multiple has the
// smallest encoding.
std::vector<std::uint64_t> candidates(const CBCConfig& config, int n, bool first, std::size_t component,
                                      std::size_t count) {
    const std::uint64_t b = config.b;
    std::uint64_t cap = config.candidate_cap, sample = config.sample_size;
    if (!first && config.pairwise_work > 0) {
        const std::uint64_t pairs = static_cast<std::uint64_t>(count) * count;
        cap = std::min(cap, std::max<std::uint64_t>(8, config.pairwise_work / pairs));
        sample = cap;
    }
    const std::uint64_t total = first ? (ipow(b, n) - 1) / (b - 1) : ipow(b, n) - 1;
    auto decode = [&](std::uint64_t idx) -> std::uint64_t {
        if (!first) return idx + 1;
        std::uint64_t pw = 1;  // b^deg: monic codes of degree deg are pw + [0, pw)
        while (idx >= pw) {
            idx -= pw;
            pw *= b;
        }
        return pw + idx;
    };
    std::vector<std::uint64_t> out;
    if (total <= cap) {
        out.reserve(total);
        for (std::uint64_t i = 0; i < total; ++i) out.push_back(decode(i));
        return out;
    }
    if (sample == 0)
        throw Error(ErrorKind::BudgetExceeded, "candidate count " + std::to_string(total) + " exceeds the cap");
    std::mt19937_64 rng(config.seed ^ (0x9e3779b97f4a7c15ULL * (component + 1)));
    std::uniform_int_distribution<std::uint64_t> pick(0, total - 1);
    std::unordered_set<std::uint64_t> seen;
    const std::uint64_t want = std::min(sample, total);
    while (seen.size() < want) seen.insert(decode(pick(rng)));
    out.assign(seen.begin(), seen.end());
    std::sort(out.begin(), out.end());
    return out;
}

PolyLatticeSpec make_spec(const CBCConfig& config, std::vector<Poly> q) {
    return higher_order_spec(config.b, config.m, static_cast<int>(config.alpha), std::move(q));
}

}  // namespace

void CBCConfig::validate() const {
    if (!is_prime(b)) throw Error(ErrorKind::InvalidParameters, "base must be prime");
    if (m < 1 || alpha < 1 || s < 1) throw Error(ErrorKind::InvalidParameters, "need m, alpha, s >= 1");
    if (static_cast<double>(alpha) * m * std::log2(static_cast<double>(b)) > 62.0)
        throw Error(ErrorKind::InvalidParameters, "b^(alpha m) must fit in 62 bits");
    kernel.validate();
    for (double tau : tau_report)
        if (!(tau >= 1.0 && tau < alpha)) throw Error(ErrorKind::InvalidTau, "tau must lie in [1, alpha)");
}

Quadrature lattice_quadrature(const PolyLatticeSpec& spec, const std::optional<DigitalShift>& shift, double anchor) {
    PointSet ps = generate_points(spec);
    if (shift) ps = apply_shift(ps, *shift);
    std::vector<std::uint32_t> coords(spec.dim());
    for (std::size_t j = 0; j < coords.size(); ++j) coords[j] = static_cast<std::uint32_t>(j + 1);
    return equal_weight_quadrature(ps, ps.count(), CoordinateSet(coords), anchor, AnchorPolicy::Perturb, spec.n);
}

WeightFamily restrict_to_prefix(const WeightFamily& weights, std::size_t s) {
    WeightFamily out = weights;
    if (weights.kind() == WeightKind::Explicit) {
        std::map<CoordinateSet, double> kept;
        for (const auto& [u, g] : weights.entries())
            if (u.max() <= s) kept.emplace(u, g);
        out = WeightFamily::explicit_map(std::move(kept));
    } else {
        std::vector<double> vals(s);
        for (std::size_t j = 0; j < s; ++j) vals[j] = weights.univariate()(static_cast<std::uint32_t>(j + 1));
        const auto rule = UnivariateRule::finite(std::move(vals));
        switch (weights.kind()) {
            case WeightKind::Product: out = WeightFamily::product(rule); break;
            case WeightKind::FiniteProduct:
                out = WeightFamily::finite_product(rule, weights.order().max_order());
                break;
            default: out = WeightFamily::pod(weights.order(), rule); break;
        }
    }
    if (weights.cutoff()) out = cutoff(out, *weights.cutoff());
    return out;
}

double criterion(const std::vector<Poly>& prefix, const Poly& candidate, const CBCConfig& config) {
    config.validate();
    if (prefix.size() >= config.s) throw Error(ErrorKind::InvalidParameters, "component beyond dimension");
    std::vector<Poly> q = prefix;
    q.push_back(candidate);
    const PolyLatticeSpec spec = make_spec(config, q);
    const AnchoredKernel kernel(config.kernel);
    std::vector<std::vector<double>> cols;
    for (const auto& qi : prefix) cols.push_back(lattice_column(spec, qi, config.kernel.c));
    ComponentCriterion crit(cols, config.weights, kernel, spec);
    return crit(lattice_keys(spec, candidate));
}

double weighted_criterion(const PolyLatticeSpec& spec, const std::optional<DigitalShift>& shift,
                          const CBCConfig& config) {
    const Quadrature q = lattice_quadrature(spec, shift, config.kernel.c);
    return subset_error_sum(q, CoordinateSet::prefix(static_cast<std::uint32_t>(spec.dim())), config.weights,
                            AnchoredKernel(config.kernel));
}

DigitalShift shift_search(const CBCConfig& config, const PolyLatticeSpec& spec) {
    if (config.shift_trials < 1) throw Error(ErrorKind::InvalidParameters, "need at least one shift trial");
    std::mt19937_64 rng(config.seed);
    std::optional<DigitalShift> best;
    double best_val = 0.0;
    for (std::size_t r = 0; r < config.shift_trials; ++r) {
        DigitalShift sh = DigitalShift::random(spec.b, spec.dim(), spec.n + 16, rng);
        const double v = weighted_criterion(spec, sh, config);
        if (!best || v < best_val) {
            best = std::move(sh);
            best_val = v;
        }
    }
    return *best;
}

double theory_bound(const CBCConfig& config, double tau) {
    if (!(tau >= 1.0 && tau < config.alpha)) throw Error(ErrorKind::InvalidTau, "tau must lie in [1, alpha)");
    if (config.s > 20) throw Error(ErrorKind::TooLarge, "bound enumerates subsets of at most 20 coordinates");
    const double c3 = const_c3(config.alpha, config.b);
    const double grow = 1.0 + 2.0 * const_cbat(config.b, config.alpha, tau);
    const std::uint32_t s = static_cast<std::uint32_t>(config.s);
    double sum = std::pow(config.weights.empty_weight(), 1.0 / (2.0 * tau));
    for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << s); ++mask) {
        std::vector<std::uint32_t> elems;
        for (std::uint32_t j = 0; j < s; ++j)
            if (mask >> j & 1) elems.push_back(j + 1);
        const double g = weight_of(config.weights, CoordinateSet(elems));
        if (g <= 0.0) continue;
        const double k = static_cast<double>(elems.size());
        sum += std::pow(g, 1.0 / (2.0 * tau)) * std::pow(c3, k / tau) * std::pow(grow, k);
    }
    return std::pow(static_cast<double>(config.b), -tau * config.m) * std::pow(sum, tau);
}

CBCBuilder::CBCBuilder(CBCConfig config)
    : config_(std::move(config)), kernel_(config_.kernel),
      spec_(make_spec(config_, {})) {
    config_.validate();
    product_ = config_.weights.kind() == WeightKind::Product && !config_.weights.cutoff();
}

void CBCBuilder::absorb(const std::vector<double>& col, long double gamma) {
    prod_c_ *= 1.0L + gamma * kernel_.c0();
    const double g = static_cast<double>(gamma);
    std::size_t at = 0;
    for (std::size_t i = 0; i < col.size(); ++i) {
        prod_g_[i] *= 1.0L + gamma * kernel_.integral(col[i]);
        for (std::size_t k = i; k < col.size(); ++k) prod_k_[at++] *= 1.0 + g * kernel_.eval(col[i], col[k]);
    }
}

void CBCBuilder::extend(std::size_t s) {
    const int n = spec_.n;
    const std::size_t count = spec_.count();
    const double c = config_.kernel.c;
    for (std::size_t d = cols_.size() + 1; d <= s; ++d) {
        std::optional<ComponentCriterion> crit;
        const long double gamma_d = config_.weights.univariate()(static_cast<std::uint32_t>(d));
        if (product_ && d > 1) {
            if (count > kProductPairs)
                throw Error(ErrorKind::BudgetExceeded, "pairwise criterion limited to 8192 points");
            if (prod_g_.empty()) {
                prod_g_.assign(count, 1.0L);
                prod_k_.assign(count * (count + 1) / 2, 1.0);
                for (std::size_t j = 0; j < cols_.size(); ++j)
                    absorb(cols_[j], config_.weights.univariate()(static_cast<std::uint32_t>(j + 1)));
            }
            crit.emplace(gamma_d, prod_c_, prod_g_, prod_k_, kernel_, spec_);
        } else {
            crit.emplace(cols_, config_.weights, kernel_, spec_);
        }
        const auto cands = candidates(config_, n, d == 1, d, count);
        std::uint64_t best_code = 0;
        double best = 0.0;
        std::vector<std::uint64_t> best_keys;
        for (std::uint64_t code : cands) {
            auto keys = lattice_keys(spec_, Poly::from_encoding(config_.b, code));
            const double v = (*crit)(keys);
            // relative slack so rounding noise never overturns the smaller encoding
            if (best_code == 0 || v < best - 1e-13 * std::abs(best)) {
                best = v;
                best_code = code;
                best_keys = std::move(keys);
            }
        }
        crit.reset();
        spec_.q.push_back(Poly::from_encoding(config_.b, best_code));
        criterion_.push_back(std::max(best, 0.0));
        log_.push_back({d, cands.size(), best_code, std::max(best, 0.0)});
        const KeyScale value(spec_, c);
        std::vector<double> col(best_keys.size());
        for (std::size_t h = 0; h < col.size(); ++h) col[h] = value(best_keys[h]);
        if (!prod_g_.empty()) absorb(col, gamma_d);
        cols_.push_back(std::move(col));
    }
}

CBCResult cbc_construct(const CBCConfig& config) {
    CBCBuilder builder(config);
    builder.extend(config.s);
    CBCResult res;
    res.spec = builder.spec();
    res.per_component_criterion = builder.per_component_criterion();
    res.log = builder.log();
    if (config.shift_trials > 0) res.shift = shift_search(config, res.spec);
    res.final_criterion = weighted_criterion(res.spec, res.shift, config);

    const Quadrature quad = lattice_quadrature(res.spec, res.shift, config.kernel.c);
    for (double tau : config.tau_report) {
        res.bound_values[tau] = theory_bound(config, tau);
        const double single = std::pow(static_cast<double>(config.b), -tau * config.m) *
                              std::pow(const_cbat(config.b, config.alpha, tau), tau);
        bool ok = true;
        for (std::uint32_t j = 1; j <= config.s; ++j)
            ok = ok && wce_projected(quad, CoordinateSet{j}, config.kernel) <= single;
        res.singleton_bound_holds[tau] = ok;
    }
    return res;
}

std::string format_criterion_log(const CBCResult& result) {
    std::ostringstream out;
    out << "component,candidate_count,best_encoding,criterion\n";
    char buf[40];
    for (const auto& e : result.log) {
        std::snprintf(buf, sizeof buf, "%.17g", e.criterion);
        out << e.component << ',' << e.candidate_count << ',' << e.best_encoding << ',' << buf << '\n';
    }
    return out.str();
}

}  // namespace infint
