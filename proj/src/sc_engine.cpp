#include "polargp/sc_engine.hpp"

#include <cmath>
#include <stdexcept>

namespace polargp {

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

BitBlock polar_transform(const BitBlock& u) {
    int n = static_cast<int>(u.size());
    if (!is_power_of_two(n)) throw std::invalid_argument("polar_transform: n must be a power of 2");
    BitBlock x = u;
    for (int step = 1; step < n; step <<= 1)
        for (int i = 0; i < n; i += 2 * step)
            for (int j = i; j < i + step; ++j) x[j] ^= x[j + step];
    return x;
}

double BitConditional::z() const { return 2.0 * std::sqrt(p0 * p1); }

uint8_t BitConditional::map_decision() const { return p1 > p0 ? 1 : 0; }

ScEvaluator::ScEvaluator(const JointPmf& joint, std::vector<int> observations)
    : joint_(joint), obs_(std::move(observations)) {
    n_ = static_cast<int>(obs_.size());
    if (!is_power_of_two(n_)) throw std::invalid_argument("ScEvaluator: n must be a power of 2");
    kappa_ = 0;
    while ((1 << kappa_) < n_) ++kappa_;
    nodes_.resize((size_t(2) << kappa_) - 1);
    for (int o : obs_)
        if (o < 0 || o >= joint_.obs_size)
            throw std::invalid_argument("ScEvaluator: observation outside alphabet");
}

// Tree geometry: node (d,p) covers observation positions j = p (mod 2^d)
// and sees them as one length n/2^d subproblem with the same per-symbol
// joint. Its local sequence splits pairwise: local bit 2r-1 = s_r ^ t_r,
// local bit 2r = t_r, where s goes to child (d+1,p) and t to (d+1,p+2^d).
std::optional<BitConditional> ScEvaluator::node_conditional(int depth, int path) {
    if (depth == kappa_) {
        int o = obs_[path];
        double a = joint_.p(0, o), b = joint_.p(1, o);
        double sum = a + b;
        if (sum <= 0.0) return std::nullopt;
        return BitConditional{a / sum, b / sum};
    }
    Node& nd = node(depth, path);
    int pair = nd.count / 2;
    if (nd.pair_index != pair) {
        auto s = node_conditional(depth + 1, path);
        auto t = node_conditional(depth + 1, path + (1 << depth));
        if (!s || !t) return std::nullopt;
        nd.s = *s;
        nd.t = *t;
        nd.pair_index = pair;
    }
    double p0, p1;
    if (nd.count % 2 == 0) {
        p0 = nd.s.p0 * nd.t.p0 + nd.s.p1 * nd.t.p1;
        p1 = nd.s.p1 * nd.t.p0 + nd.s.p0 * nd.t.p1;
    } else {
        uint8_t a = nd.last_bit;
        p0 = (a ? nd.s.p1 : nd.s.p0) * nd.t.p0;
        p1 = (a ? nd.s.p0 : nd.s.p1) * nd.t.p1;
    }
    double sum = p0 + p1;
    if (sum <= 0.0) return std::nullopt;
    return BitConditional{p0 / sum, p1 / sum};
}

void ScEvaluator::node_push(int depth, int path, uint8_t bit) {
    if (depth == kappa_) return;
    Node& nd = node(depth, path);
    // Child state only advances when a completed pair moves down, so a
    // conditional for the current pair can still be queried lazily after
    // unqueried pushes.
    if (nd.count % 2 == 0) {
        nd.last_bit = bit;
    } else {
        node_push(depth + 1, path, nd.last_bit ^ bit);
        node_push(depth + 1, path + (1 << depth), bit);
    }
    ++nd.count;
}

std::optional<BitConditional> ScEvaluator::next_conditional() {
    if (poisoned_) return std::nullopt;
    if (decided_ >= n_) throw std::logic_error("ScEvaluator: block exhausted");
    if (!current_valid_) {
        current_ = node_conditional(0, 0);
        current_valid_ = true;
        if (!current_) poisoned_ = true;
    }
    return current_;
}

void ScEvaluator::push(uint8_t bit) {
    if (decided_ >= n_) throw std::logic_error("ScEvaluator: block exhausted");
    node_push(0, 0, bit & 1);
    ++decided_;
    current_valid_ = false;
}

std::optional<BitConditional> sc_conditional(const ScContext& ctx) {
    ScEvaluator ev(ctx.joint, ctx.observations);
    if (ctx.decided.size() >= ctx.observations.size())
        throw std::invalid_argument("sc_conditional: decided prefix must be shorter than n");
    for (uint8_t b : ctx.decided) ev.push(b);
    return ev.next_conditional();
}

std::optional<BitConditional> brute_force_conditional(const ScContext& ctx) {
    int n = static_cast<int>(ctx.observations.size());
    if (!is_power_of_two(n)) throw std::invalid_argument("brute_force: n must be a power of 2");
    if (n > 16) throw std::invalid_argument("brute_force: n too large for enumeration");
    int i = static_cast<int>(ctx.decided.size());
    if (i >= n) throw std::invalid_argument("brute_force: decided prefix must be shorter than n");
    double acc[2] = {0.0, 0.0};
    BitBlock x(n);
    for (uint32_t m = 0; m < (uint32_t(1) << n); ++m) {
        for (int j = 0; j < n; ++j) x[j] = (m >> j) & 1;
        BitBlock u = polar_transform(x);
        bool ok = true;
        for (int j = 0; j < i && ok; ++j) ok = (u[j] == ctx.decided[j]);
        if (!ok) continue;
        double lik = 1.0;
        for (int j = 0; j < n; ++j) lik *= ctx.joint.p(x[j], ctx.observations[j]);
        acc[u[i]] += lik;
    }
    double sum = acc[0] + acc[1];
    if (sum <= 0.0) return std::nullopt;
    return BitConditional{acc[0] / sum, acc[1] / sum};
}

double brute_force_obs_probability(const JointPmf& joint, const std::vector<int>& obs) {
    int n = static_cast<int>(obs.size());
    if (n > 16) throw std::invalid_argument("brute_force: n too large for enumeration");
    double total = 0.0;
    BitBlock x(n);
    for (uint32_t m = 0; m < (uint32_t(1) << n); ++m) {
        double lik = 1.0;
        for (int j = 0; j < n; ++j) lik *= joint.p((m >> j) & 1, obs[j]);
        total += lik;
    }
    return total;
}

}  // namespace polargp
